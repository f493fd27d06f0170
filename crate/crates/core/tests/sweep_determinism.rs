use proptest::prelude::*;
use quadunit::sweep::{read_csv, to_csv, Checkpoint, SweepPlan};
use quadunit::{run_sweep, Error, SweepConfig, SweepStatus};

fn config(d_min: u64, d_max: u64, p_max: u32, workers: usize, chunk: u64) -> SweepConfig {
    SweepConfig {
        d_min,
        workers,
        chunk_size: chunk,
        ..SweepConfig::new(d_max, p_max)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn result_independent_of_workers_and_chunking(
        d_min in 2u64..300,
        span in 0u64..400,
        p_max in 3u32..600,
        workers in 1usize..6,
        chunk in 1u64..100,
        batch in 0usize..5,
    ) {
        let reference = run_sweep(&config(d_min, d_min + span, p_max, 1, 64)).unwrap();
        let mut cfg = config(d_min, d_min + span, p_max, workers, chunk);
        cfg.batch_chunks = batch;
        let other = run_sweep(&cfg).unwrap();
        prop_assert_eq!(to_csv(&other.histograms), to_csv(&reference.histograms));
    }
}

#[test]
fn pair_count_matches_enumeration() {
    let cfg = config(2, 1500, 1200, 3, 17);
    let plan = SweepPlan::new(&cfg).unwrap();
    let expected: u64 = plan
        .valid_ds()
        .map(|d| plan.primes().iter().filter(|&&p| d % p as u64 != 0).count() as u64)
        .sum();
    assert_eq!(run_sweep(&cfg).unwrap().histograms.pairs(), expected);
}

#[test]
fn resume_in_several_steps_matches_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let reference = run_sweep(&config(2, 1200, 1200, 1, 64)).unwrap().histograms;

    let mut cfg = config(2, 1200, 1200, 2, 37);
    cfg.batch_chunks = 2;
    cfg.checkpoint_path = Some(dir.path().join("ck.json"));
    cfg.output_path = Some(dir.path().join("out.csv"));
    cfg.stop_after_chunks = Some(7);
    let mut steps = 0;
    loop {
        let out = run_sweep(&cfg).unwrap();
        steps += 1;
        if out.status == SweepStatus::Complete {
            assert_eq!(out.histograms, reference);
            break;
        }
        // Worker count and chunking may change between resumes.
        cfg.workers = 1 + steps % 3;
        cfg.chunk_size = 20 + 7 * steps as u64;
    }
    assert!(steps > 2);
    assert_eq!(read_csv(&dir.path().join("out.csv")).unwrap(), reference);

    // A rerun of a finished checkpoint does no work and returns the same result.
    cfg.stop_after_chunks = None;
    let again = run_sweep(&cfg).unwrap();
    assert_eq!(again.chunks_processed, 0);
    assert_eq!(again.histograms, reference);
}

#[test]
fn resume_refuses_other_ranges_and_corrupt_files() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let mut cfg = config(2, 500, 500, 1, 50);
    cfg.checkpoint_path = Some(ck.clone());
    cfg.stop_after_chunks = Some(3);
    run_sweep(&cfg).unwrap();

    let mut other = cfg.clone();
    other.d_max = 600;
    assert!(matches!(
        run_sweep(&other),
        Err(Error::CheckpointMismatch { .. })
    ));

    let bytes = std::fs::read(&ck).unwrap();
    std::fs::write(&ck, &bytes[..bytes.len() - 40]).unwrap();
    assert!(matches!(
        run_sweep(&cfg),
        Err(Error::CorruptCheckpoint { .. })
    ));
    assert!(Checkpoint::load(&ck, &cfg).is_err());
}
