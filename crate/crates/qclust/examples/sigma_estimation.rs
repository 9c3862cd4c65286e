//! Estimate the kernel width from the pairwise-distance histogram.
//!
//! The estimator bins all n(n-1)/2 pairwise distances and returns the
//! center of the most common bin: the distance scale at which points
//! typically see their neighbors. A tiny hand-checkable case comes first,
//! then a full scenario.
//!
//! Run with: cargo run -p qclust --example sigma_estimation

use qclust::clustering::estimate_sigma;
use qclust::datagen::{generate_default, ScenarioId};
use qclust::potential::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Points {0, 1, 2, 3} have pair distances 1,1,1,2,2,3. With three
    // bins of width 1 the mode is the first bin, so sigma is its center.
    let tiny = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]])?;
    let (sigma, hist) = estimate_sigma(&tiny, 3)?;
    println!("tiny dataset: counts {:?}, sigma {}", hist.counts, sigma.get());

    let scenario = generate_default(ScenarioId::A, 3)?;
    let (sigma, hist) = estimate_sigma(&scenario.dataset, 50)?;
    println!();
    println!(
        "scenario A: sigma {:.4} from mode bin {} (center {:.4})",
        sigma.get(),
        hist.mode_bin,
        hist.mode_bin_center
    );

    // Print the busiest stretch of the histogram.
    let peak = hist.counts.iter().copied().max().unwrap_or(1);
    println!("distance histogram (each * is ~{} pairs):", peak.div_ceil(40));
    for (i, count) in hist.counts.iter().enumerate() {
        if *count == 0 {
            continue;
        }
        let bar = "*".repeat(((count * 40).div_ceil(peak)) as usize);
        let mark = if i == hist.mode_bin { " <- mode" } else { "" };
        println!(
            "  [{:6.2}, {:6.2}) {bar}{mark}",
            hist.bin_edges[i],
            hist.bin_edges[i + 1]
        );
    }
    Ok(())
}
