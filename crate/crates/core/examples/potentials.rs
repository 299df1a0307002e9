// The cosh centrality potential, the soft error potential and the rank
// cost weights used by the maintainer.

use std::error::Error;

use stochastic_ipm::{CoshPotential, SoftErrorPotential, WeightSchedule};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cosh = CoshPotential::new(20.0)?;
    let r = [0.0, 0.01, -0.02, 0.05];
    let grad = cosh.gradient(&r)?;
    println!("Φ(r) = {:.4}, ∇Φ(r) = {grad:.3?}", cosh.value(&r)?);

    // Lower bound on the gradient norm in terms of the potential.
    let n = r.len() as f64;
    let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let bound = cosh.lambda() / n.sqrt() * (cosh.value(&r)? - n);
    println!("‖∇Φ‖ = {gnorm:.4} ≥ {bound:.4}");
    if gnorm < bound {
        return Err("gradient bound violated".into());
    }

    let psi = SoftErrorPotential::new(0.1)?;
    for x in [0.0, 0.05, 0.1, 0.15, 0.2, 0.5] {
        println!("ψ({x:.2}) = {:.5}, ψ'({x:.2}) = {:.4}", psi.value(x), psi.derivative(x));
    }

    let sched = WeightSchedule::new(64, 1.0 / 3.0, 2.373)?;
    let weights: Vec<String> = [1, 2, 4, 8, 16, 32, 64]
        .iter()
        .map(|&i| format!("g_{i} = {:.4}", sched.weight(i)))
        .collect();
    println!("{}", weights.join(", "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
