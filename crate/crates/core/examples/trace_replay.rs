// Write the per-iteration trace to CSV and confirm that a second run with
// the same seed reproduces it byte for byte.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_ipm::{random_feasible_lp, solve, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let lp = random_feasible_lp(&mut rng, 4, 12)?.lp;
    let dir = tempfile::tempdir()?;

    let mut traces = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("trace-{run}.csv"));
        let config = SolverConfig {
            seed: 42,
            trace_path: Some(path.clone()),
            keep_trace: false,
            ..SolverConfig::default()
        };
        let report = solve(&lp, &config)?;
        println!("run {run}: objective {:.8}, {} iterations", report.objective, report.iterations);
        traces.push(std::fs::read_to_string(&path)?);
    }

    for line in traces[0].lines().take(3) {
        println!("{line}");
    }
    if traces[0] != traces[1] {
        return Err("traces differ".into());
    }
    println!("traces identical ({} lines)", traces[0].lines().count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
