//! Descend single points over the potential surface with BFGS.
//!
//! Each data point slides downhill to the bottom of its basin; points
//! sharing a basin end up at the same spot, which is how clusters form.
//! This example follows three starts over a two-cluster dataset and
//! reports where each lands.
//!
//! Run with: cargo run -p qclust --example descend_point

use ndarray::array;
use qclust::optimizer::{descend_point, BfgsConfig};
use qclust::potential::{Dataset, KernelWidth, PotentialField, PotentialMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = Dataset::from_rows(&[
        vec![-1.0, 0.0],
        vec![-1.2, 0.1],
        vec![-0.9, -0.1],
        vec![1.0, 0.0],
        vec![1.1, 0.2],
    ])?;
    let field = PotentialField::new(
        &dataset,
        KernelWidth::new(0.5)?,
        PotentialMode::Direct,
    );
    let cfg = BfgsConfig::default();

    for start in [array![-1.3, 0.3], array![-0.2, 0.05], array![0.8, -0.3]] {
        let outcome = descend_point(&field, start.view(), &cfg)?;
        println!(
            "start ({:+.2}, {:+.2}) -> minimum ({:+.4}, {:+.4}), v = {:.5}, {} iterations, converged: {}",
            start[0],
            start[1],
            outcome.x_star[0],
            outcome.x_star[1],
            outcome.f_star,
            outcome.iterations,
            outcome.converged
        );
    }

    println!();
    println!("the first two starts share the left basin; the third settles on the right");
    Ok(())
}
