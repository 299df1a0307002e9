// The two exact references: vertex enumeration and a textbook short-step
// interior point method, on the same random instance.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_ipm::{random_feasible_lp, reference_ipm, vertex_enumerate_solve, OracleStatus};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let generated = random_feasible_lp(&mut rng, 3, 7)?;
    let lp = &generated.lp;

    let exact = vertex_enumerate_solve(lp)?;
    if exact.status != OracleStatus::Optimal {
        return Err(format!("unexpected status {:?}", exact.status).into());
    }
    println!("vertex enumeration: optimum {:.8}", exact.optimum);
    println!("  argmin {:.4?}", exact.argmin);

    let delta = 1e-4;
    let run = reference_ipm(lp, delta)?;
    println!(
        "short-step method: objective {:.8} after {} iterations (gap {:.2e})",
        run.result.optimum, run.iterations, run.gap
    );

    let slack = delta * lp.lipschitz() * lp.diameter();
    if (run.result.optimum - exact.optimum).abs() > slack {
        return Err("the two references disagree".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
