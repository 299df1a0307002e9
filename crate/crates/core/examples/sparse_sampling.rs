// Unbiased sparsification of a direction: coordinate `i` survives with
// probability `p_i` and is rescaled by `1/p_i`.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_ipm::step::keep_probabilities;
use stochastic_ipm::sample_sparse_direction;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let delta = [4.0, -2.0, 1.0, 0.5, 0.25, -0.125, 0.0625, 0.03125];
    let k = 3.0;
    println!("keep probabilities {:?}", keep_probabilities(&delta, k));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 20_000;
    let mut mean = vec![0.0; delta.len()];
    let mut support = 0;
    for _ in 0..draws {
        let d = sample_sparse_direction(&delta, k, &mut rng)?;
        support += d.len();
        for (m, v) in mean.iter_mut().zip(&d.values) {
            *m += v / draws as f64;
        }
    }
    println!("average support {:.2} of {}", support as f64 / draws as f64, delta.len());
    for (i, (m, t)) in mean.iter().zip(&delta).enumerate() {
        println!("  {i}: mean {m:+.4}, target {t:+.4}");
    }

    let worst = mean
        .iter()
        .zip(&delta)
        .map(|(m, t)| (m - t).abs())
        .fold(0.0, f64::max);
    if worst > 0.05 {
        return Err(format!("empirical mean off by {worst}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
