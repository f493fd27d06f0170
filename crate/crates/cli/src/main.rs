use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadunit::report::{
    self, convergence_all, expectation, frequency_table, theorem_check, DEFAULT_CONVERGENCE_CUTOFF,
    DEFAULT_TOP_K,
};
use quadunit::sweep::{read_csv, read_metadata, SweepConfig, DEFAULT_CHUNK_SIZE};
use quadunit::{
    cf_expand, fundamental_unit_exact, fundamental_unit_mod_p, order_and_quotient_single,
    run_sweep, CaseHistograms, CaseKey, Error, FieldParams, SweepStatus,
};

#[derive(Parser)]
#[command(
    name = "quadunit",
    version,
    about = "Units of real quadratic fields and their index in prime-conductor orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental unit of Q(sqrt(d)) in exact arithmetic.
    Unit { d: u64 },
    /// n(p) and the quotient q for one field and one odd prime.
    Order { d: u64, p: u64 },
    /// Sweep d and p ranges into the four quotient histograms.
    Sweep(SweepArgs),
    /// Render tables and statistics from sweep output files.
    Report(ReportArgs),
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    d_min: u64,
    #[arg(long)]
    d_max: u64,
    #[arg(long, default_value_t = 3)]
    p_min: u32,
    /// Defaults to --d-max.
    #[arg(long)]
    p_max: Option<u32>,
    #[arg(long, env = "SWEEP_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    chunk_size: u64,
    /// Stop after this many work units, leaving the checkpoint for a later resume.
    #[arg(long, requires = "checkpoint")]
    stop_after_chunks: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Table,
    Expectation,
    Theorem,
    Convergence,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// Sweep output files (the range m of each is read from its .meta.json sidecar unless --m is given).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Table)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Range m for each input, in the same order.
    #[arg(long, num_args = 1..)]
    m: Vec<u64>,
    /// Restrict table/convergence output to one case (1-4).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    case: Option<u8>,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: u64,
    #[arg(long, default_value_t = DEFAULT_CONVERGENCE_CUTOFF)]
    cutoff: u64,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Unit { d } => {
            let params = FieldParams::new(d)?;
            let unit = fundamental_unit_exact(&params)?;
            let period = cf_expand(&params).period();
            println!(
                "x={} y={} norm={} period={period}",
                unit.x1, unit.y1, unit.norm_sign
            );
        }
        Command::Order { d, p } => {
            let params = FieldParams::new(d)?;
            let unit = fundamental_unit_mod_p(&params, p)?;
            let r = order_and_quotient_single(&unit, p as u32, d)?;
            println!("ls={} q0={} n={} q={}", r.ls, r.q0, r.n, r.q);
        }
        Command::Sweep(args) => sweep(args)?,
        Command::Report(args) => report(args)?,
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let p_max = match args.p_max {
        Some(p) => p,
        None => u32::try_from(args.d_max)
            .map_err(|_| Failure::Usage("--d-max too large to double as --p-max".into()))?,
    };
    let mut config = SweepConfig::new(args.d_max, p_max);
    config.d_min = args.d_min;
    config.p_min = args.p_min;
    if let Some(w) = args.workers {
        config.workers = w;
    }
    config.checkpoint_path = args.checkpoint;
    config.output_path = Some(args.out.clone());
    config.chunk_size = args.chunk_size;
    config.stop_after_chunks = args.stop_after_chunks;

    let outcome = run_sweep(&config)?;
    let h = &outcome.histograms;
    match outcome.status {
        SweepStatus::Complete => println!(
            "status=complete pairs={} j1={} j2={} j3={} j4={} seconds={:.3} out={}",
            h.pairs(),
            h.get(CaseKey::J1).total(),
            h.get(CaseKey::J2).total(),
            h.get(CaseKey::J3).total(),
            h.get(CaseKey::J4).total(),
            outcome.elapsed.as_secs_f64(),
            args.out.display()
        ),
        SweepStatus::Interrupted => println!(
            "status=interrupted chunks={} pairs={} seconds={:.3}",
            outcome.chunks_processed,
            h.pairs(),
            outcome.elapsed.as_secs_f64()
        ),
    }
    Ok(())
}

fn load_inputs(args: &ReportArgs) -> Result<Vec<(u64, CaseHistograms)>, Failure> {
    if !args.m.is_empty() && args.m.len() != args.inputs.len() {
        return Err(Failure::Usage(format!(
            "--m given {} values for {} inputs",
            args.m.len(),
            args.inputs.len()
        )));
    }
    let mut out = Vec::with_capacity(args.inputs.len());
    for (i, path) in args.inputs.iter().enumerate() {
        let m = match args.m.get(i) {
            Some(&m) => m,
            None => read_metadata(path)?.range(),
        };
        out.push((m, read_csv(path)?));
    }
    out.sort_by_key(|&(m, _)| m);
    Ok(out)
}

fn selected_cases(args: &ReportArgs) -> Vec<CaseKey> {
    match args.case.and_then(CaseKey::from_index) {
        Some(c) => vec![c],
        None => CaseKey::ALL.to_vec(),
    }
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let inputs = load_inputs(&args)?;
    let csv = matches!(args.format, Format::Csv);
    match args.mode {
        Mode::Table => {
            if csv {
                println!("{}", report::FREQUENCY_CSV_HEADER);
            }
            for case in selected_cases(&args) {
                if inputs.iter().any(|(_, h)| h.get(case).is_empty()) {
                    eprintln!("note: {case} is empty in at least one input; skipped");
                    continue;
                }
                let columns = inputs
                    .iter()
                    .map(|(m, h)| Ok((*m, frequency_table(h.get(case), args.top_k)?)))
                    .collect::<Result<Vec<_>, Error>>()?;
                if csv {
                    print!("{}", report::render_frequency_csv(&columns));
                } else {
                    println!("{}", report::render_frequency_text(&columns));
                }
            }
        }
        Mode::Expectation => {
            let reports = inputs
                .iter()
                .map(|(m, h)| expectation(h.get(CaseKey::J1), *m))
                .collect::<Result<Vec<_>, Error>>()?;
            if csv {
                println!("{}", report::EXPECTATION_CSV_HEADER);
                print!("{}", report::render_expectation_csv(&reports));
            } else {
                print!("{}", report::render_expectation_text(&reports));
            }
        }
        Mode::Theorem => {
            let mut all_passed = true;
            for (m, h) in &inputs {
                let r = theorem_check(h.get(CaseKey::J4));
                all_passed &= r.passed();
                println!("m={m}");
                print!("{r}");
            }
            if !all_passed {
                return Err(Failure::Data(Error::Consistency(
                    "q=4 observed in case j=4".into(),
                )));
            }
        }
        Mode::Convergence => {
            let series: Vec<(u64, &CaseHistograms)> = inputs.iter().map(|(m, h)| (*m, h)).collect();
            let mut reports = convergence_all(&series, args.cutoff)?;
            if let Some(c) = args.case.and_then(CaseKey::from_index) {
                reports.retain(|r| r.case == c);
            }
            if csv {
                println!("{}", report::CONVERGENCE_CSV_HEADER);
                print!("{}", report::render_convergence_csv(&reports));
            } else {
                print!("{}", report::render_convergence_text(&reports));
            }
        }
    }
    Ok(())
}
