// Solve `min −x₁ s.t. x₁ + x₂ = 1, x ≥ 0` from a JSON file and check it
// against exact vertex enumeration.

use std::error::Error;
use std::path::Path;

use stochastic_ipm::{read_instance, solve, vertex_enumerate_solve, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/tiny.json");
    let inst = read_instance(&path)?;
    let lp = &inst.lp;

    let config = SolverConfig {
        delta: 1e-3,
        seed: 7,
        ..SolverConfig::default()
    };
    let report = solve(lp, &config)?;
    let exact = vertex_enumerate_solve(lp)?;

    println!("x̂ = {:?}", report.x_hat);
    println!(
        "objective {:.6} (optimum {:.6}), ‖Ax̂ − b‖₁ = {:.2e}",
        report.objective, exact.optimum, report.primal_infeas_l1
    );
    println!("{} iterations, {} fallbacks", report.iterations, report.fallbacks);

    let slack = config.delta * lp.lipschitz() * lp.diameter();
    if !report.converged || report.objective > exact.optimum + slack {
        return Err(format!("objective {} misses {} + {slack}", report.objective, exact.optimum).into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
