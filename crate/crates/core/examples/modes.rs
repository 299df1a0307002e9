// The three parameter presets and what they cost on a small random instance.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_ipm::solver::Parameters;
use stochastic_ipm::{random_feasible_lp, solve, Mode, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let generated = random_feasible_lp(&mut rng, 3, 8)?;
    let lp = &generated.lp;
    // Two extra columns come from the reformulation.
    let n_bar = lp.num_variables() + 2;

    println!("mode         eps        k      lambda  a      iterations");
    for mode in [Mode::Paper, Mode::Practical, Mode::UltraShort] {
        let p = Parameters::derive(n_bar, mode, 1e-3, None)?;
        println!(
            "{:<12} {:<10.3e} {:<6.0} {:<7.2} {:<6.3} {}",
            mode.to_string(),
            p.eps,
            p.k,
            p.lambda,
            p.a,
            p.scheduled_iterations()
        );
    }

    // Paper mode needs millions of iterations here, so only the others run.
    for mode in [Mode::Practical, Mode::UltraShort] {
        let report = solve(
            lp,
            &SolverConfig {
                keep_trace: false,
                ..SolverConfig::with_mode(mode)
            },
        )?;
        println!(
            "{mode}: objective {:.6}, {} iterations, total update rank {}",
            report.objective, report.iterations, report.counters.total_rank
        );
        if !report.converged {
            return Err(format!("{mode} did not converge").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
