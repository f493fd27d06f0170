//! Acceptance criteria. Runs as a plain binary so every criterion prints its
//! PASS/FAIL line; exits nonzero if any criterion fails.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use quadunit::report::{expectation, frequency_table, theorem_check};
use quadunit::sweep::{read_csv, SweepPlan};
use quadunit::{
    fundamental_unit_exact, fundamental_unit_mod_p, naive_order, order_and_quotient, run_sweep,
    CaseHistograms, CaseKey, FieldParams, SweepConfig, SweepStatus,
};

/// Absolute tolerance on table percentages, in percentage points.
const PERCENT_TOL: f64 = 0.3;
/// Relative tolerance on the "Values" totals.
const TOTAL_REL_TOL: f64 = 0.01;
const EXPECTATION_TOL: f64 = 0.05;
const RATIO_TOL: f64 = 0.005;

struct Outcome {
    id: &'static str,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new(id: &'static str, title: &'static str) -> Self {
        Self {
            id,
            title,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }
}

fn sweep(m: u64) -> CaseHistograms {
    let out = run_sweep(&SweepConfig::square(m)).expect("sweep failed");
    assert_eq!(out.status, SweepStatus::Complete);
    out.histograms
}

fn check_table(
    o: &mut Outcome,
    hists: &CaseHistograms,
    case: CaseKey,
    expected: &[(u64, f64)],
    expected_total: u64,
) {
    let table = frequency_table(hists.get(case), 20).expect("empty histogram");
    for &(q, want) in expected {
        let got = table.row(q).unwrap().percent;
        o.check(
            (got.value() - want).abs() <= PERCENT_TOL,
            format!("{case} q={q}: {got} vs {want} (tol {PERCENT_TOL})"),
        );
    }
    let rel = (table.total as f64 - expected_total as f64).abs() / expected_total as f64;
    o.check(
        rel <= TOTAL_REL_TOL,
        format!(
            "{case} total {} vs {expected_total} (rel err {rel:.2e})",
            table.total
        ),
    );
}

fn criterion_1(h: &CaseHistograms) -> Outcome {
    let mut o = Outcome::new("AC1", "table reproduction, case j=1, m=10000");
    check_table(
        &mut o,
        h,
        CaseKey::J1,
        &[(1, 57.3), (2, 11.8), (3, 9.91), (12, 0.817)],
        2_249_621,
    );
    o
}

fn criterion_2(h: &CaseHistograms) -> Outcome {
    let mut o = Outcome::new("AC2", "table reproduction, case j=2, m=10000");
    check_table(
        &mut o,
        h,
        CaseKey::J2,
        &[(1, 56.3), (2, 14.5), (3, 9.94)],
        2_272_057,
    );
    o
}

fn criterion_3(h: &CaseHistograms) -> Outcome {
    let mut o = Outcome::new("AC3", "no q=4 (nor multiples of 4) in case j=4, m=10000");
    let h4 = h.get(CaseKey::J4);
    for q in [4, 8, 12, 16, 20] {
        o.check(
            h4.count(q) == 0,
            format!("j=4 count[{q}] = {}", h4.count(q)),
        );
    }
    let report = theorem_check(h4);
    o.check(
        report.passed(),
        format!("theorem_check verdict pass={}", report.passed()),
    );
    o.check(
        report.anomalies.is_empty(),
        format!("anomalies: {:?}", report.anomalies),
    );
    o
}

fn criterion_4(h10000: &CaseHistograms) -> Outcome {
    let mut o = Outcome::new("AC4", "expectation E(1000), E(10000) for case j=1");
    let h1000 = sweep(1000);
    let r = expectation(h1000.get(CaseKey::J1), 1000).unwrap();
    o.check(
        (r.expectation - 3.921).abs() <= EXPECTATION_TOL,
        format!("E(1000) = {:.4} vs 3.921", r.expectation),
    );
    o.check(
        (r.ratio - 0.293).abs() <= RATIO_TOL,
        format!("E(1000)/normalizer = {:.4} vs 0.293", r.ratio),
    );
    let r = expectation(h10000.get(CaseKey::J1), 10_000).unwrap();
    o.check(
        (r.expectation - 6.086).abs() <= EXPECTATION_TOL,
        format!("E(10000) = {:.4} vs 6.086", r.expectation),
    );
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new("AC5", "prime-power stripping equals naive order, d,p <= 200");
    let tables = quadunit::arith::PrimeTables::build(202).unwrap();
    let primes = tables.primes_in(3, 200);
    let mut pairs = 0;
    let mut mismatches = Vec::new();
    for d in 2..=200u64 {
        let Ok(params) = FieldParams::new(d) else {
            continue;
        };
        for &p in primes.iter().filter(|&&p| d % p as u64 != 0) {
            let unit = fundamental_unit_mod_p(&params, p as u64).unwrap();
            let fast = order_and_quotient(&unit, p, d, &tables).unwrap();
            let slow = naive_order(&unit, p, d, p as u64 + 1).unwrap();
            pairs += 1;
            if fast.n as u64 != slow {
                mismatches.push((d, p, fast.n, slow));
            }
        }
    }
    o.check(
        mismatches.is_empty(),
        format!("{pairs} pairs, mismatches: {mismatches:?}"),
    );
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new(
        "AC6",
        "exact fundamental units satisfy x^2 - d y^2 = N, d <= 10^4",
    );
    let mut checked = 0;
    let mut bad = Vec::new();
    for d in 2..=10_000u64 {
        let Ok(params) = FieldParams::new(d) else {
            continue;
        };
        match fundamental_unit_exact(&params) {
            Ok(u) => {
                let lhs = &u.x1 * &u.x1;
                let dyy = &u.y1 * &u.y1 * d;
                let ok = if u.norm_sign == 1 {
                    lhs == dyy + 1u32
                } else {
                    lhs + 1u32 == dyy
                };
                if !ok {
                    bad.push(d);
                }
            }
            Err(_) => bad.push(d),
        }
        checked += 1;
    }
    o.check(
        bad.is_empty(),
        format!("{checked} fields, failures: {bad:?}"),
    );
    for (d, x, y, n) in [
        (2u64, 1u32, 1u32, -1i8),
        (3, 2, 1, 1),
        (7, 8, 3, 1),
        (10, 3, 1, -1),
    ] {
        let u = fundamental_unit_exact(&FieldParams::new(d).unwrap()).unwrap();
        o.check(
            u.x1 == BigUint::from(x) && u.y1 == BigUint::from(y) && u.norm_sign == n,
            format!("d={d} -> ({}, {}, {})", u.x1, u.y1, u.norm_sign),
        );
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new("AC7", "divisor law n*q = q0 on every record, m=10000");
    let plan = SweepPlan::new(&SweepConfig::square(10_000)).unwrap();
    let mut records = 0u64;
    let mut violations = Vec::new();
    for d in plan.valid_ds().collect::<Vec<_>>() {
        plan.for_each_record(d, |r| {
            records += 1;
            let base = (r.p as i64 - r.ls as i64) as u32;
            let q0 = if r.case.norm_sign() > 0 {
                base / 2
            } else {
                base
            };
            if r.n * r.q != r.q0 || r.q0 != q0 {
                violations.push((r.d, r.p));
            }
        })
        .unwrap();
    }
    o.check(
        violations.is_empty(),
        format!("{records} records, {} violations", violations.len()),
    );
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new(
        "AC8",
        "determinism across workers and checkpoint resume, m=2000",
    );
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: usize| {
        let path = dir.path().join(name);
        let mut cfg = SweepConfig::square(2000);
        cfg.workers = workers;
        cfg.output_path = Some(path.clone());
        run_sweep(&cfg).unwrap();
        fs::read(path).unwrap()
    };
    let reference = run("w1.csv", 1);
    for w in [2, 8] {
        let bytes = run(&format!("w{w}.csv"), w);
        o.check(
            bytes == reference,
            format!("workers={w} output identical to workers=1"),
        );
    }

    let ck = dir.path().join("ck.json");
    let out = dir.path().join("resumed.csv");
    let mut cfg = SweepConfig::square(2000);
    cfg.workers = 2;
    cfg.chunk_size = 50;
    cfg.batch_chunks = 4;
    cfg.checkpoint_path = Some(ck.clone());
    cfg.output_path = Some(out.clone());
    let total_chunks = (2000 - 2 + 1usize).div_ceil(50);
    cfg.stop_after_chunks = Some(total_chunks / 2);
    let first = run_sweep(&cfg).unwrap();
    o.check(
        first.status == SweepStatus::Interrupted && !out.exists() && ck.exists(),
        format!(
            "interrupted after {}/{total_chunks} chunks with checkpoint only",
            first.chunks_processed
        ),
    );
    cfg.stop_after_chunks = None;
    let second = run_sweep(&cfg).unwrap();
    o.check(
        second.status == SweepStatus::Complete
            && first.chunks_processed + second.chunks_processed == total_chunks,
        format!("resumed {} remaining chunks", second.chunks_processed),
    );
    let resumed = fs::read(&out).unwrap();
    o.check(
        resumed == reference,
        "resumed output identical to uninterrupted run".into(),
    );
    o.check(
        read_csv(&out).unwrap() == second.histograms,
        "output file parses back to the returned histograms".into(),
    );
    o
}

fn main() -> ExitCode {
    let started = Instant::now();
    let h10000 = sweep(10_000);
    let outcomes = [
        criterion_1(&h10000),
        criterion_2(&h10000),
        criterion_3(&h10000),
        criterion_4(&h10000),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let mut failed = 0;
    for o in &outcomes {
        let verdict = if o.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("[{verdict}] {} {}", o.id, o.title);
        for n in &o.notes {
            println!("         ok   {n}");
        }
        for f in &o.failures {
            println!("         FAIL {f}");
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        outcomes.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
