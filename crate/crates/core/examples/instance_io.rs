// Generate a feasible instance, write it as JSON and read it back.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_ipm::{parse_instance, random_feasible_lp, write_instance};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let generated = random_feasible_lp(&mut rng, 2, 4)?;
    let text = write_instance(&generated.lp, Some("generated"));
    print!("{text}");

    let back = parse_instance(&text)?;
    if back.lp != generated.lp {
        return Err("round trip changed the instance".into());
    }
    println!(
        "x₀ = {:.3?} is feasible: ‖Ax₀ − b‖₁ = {:.1e}",
        generated.x0,
        back.lp.infeasibility_l1(&generated.x0)
    );

    match parse_instance(r#"{"A": [[1, 1]], "b": [1], "c": [0, 0], "R": 1, "extra": 0}"#) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => return Err("unknown field accepted".into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
