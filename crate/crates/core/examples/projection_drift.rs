// Keep `Aᵀ(AṼAᵀ)⁻¹A` up to date while the weights drift, and compare its
// projections with a from-scratch solve.

use std::error::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stochastic_ipm::linalg::norm2;
use stochastic_ipm::{naive_projection_apply, Matrix, ProjectionMaintainer};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (d, n) = (16, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = Matrix::new(d, n, (0..d * n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.05, 1.0 / 3.0)?;

    let mut worst: f64 = 0.0;
    for step in 1..=40 {
        // A few coordinates move by up to 10% per step.
        for wi in w.iter_mut() {
            if rng.gen_bool(0.2) {
                *wi *= 1.0 + rng.gen_range(-0.1..0.1);
            }
        }
        let vtilde = mp.update(&w)?.to_vec();
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = mp.query(&h)?;
        let exact = naive_projection_apply(&a, &vtilde, &h)?;
        let diff: Vec<f64> = fast.iter().zip(&exact).map(|(x, y)| x - y).collect();
        let err = norm2(&diff) / norm2(&exact);
        worst = worst.max(err);
        if step % 10 == 0 {
            println!(
                "step {step:>2}: rank {:>2}, deferred {:>2}, query error {err:.1e}",
                mp.last_rank(),
                mp.outside().len()
            );
        }
    }
    print!("{}", mp.counters().to_csv());

    if worst > 1e-8 {
        return Err(format!("query error {worst}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
