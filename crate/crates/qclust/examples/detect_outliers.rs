//! End-to-end outlier detection on a synthetic dataset.
//!
//! Generates a Gaussian blob with five distant stragglers, runs the full
//! pipeline with every parameter at its default (kernel width estimated
//! from the distance histogram, small-cluster threshold at 5% of n), and
//! compares the flags against the generator's ground truth.
//!
//! Run with: cargo run -p qclust --example detect_outliers

use qclust::clustering::{detect, QcParams};
use qclust::datagen::{generate_default, ScenarioId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = generate_default(ScenarioId::A, 7)?;
    println!(
        "dataset: {} points, {} planted outliers",
        scenario.dataset.n(),
        scenario.planted_count()
    );

    let detection = detect(&scenario.dataset, &QcParams::default())?;
    println!(
        "estimated sigma {:.4}, merge radius {:.4}, small-cluster threshold {}",
        detection.sigma, detection.merge_radius, detection.k
    );
    println!(
        "clusters found: {} with sizes {:?}",
        detection.result.cluster_sizes.len(),
        detection.result.cluster_sizes
    );

    let mut hits = 0;
    let mut false_alarms = 0;
    for i in 0..scenario.dataset.n() {
        match (detection.result.outlier_flags[i], scenario.truth[i]) {
            (true, true) => hits += 1,
            (true, false) => false_alarms += 1,
            _ => {}
        }
    }
    println!(
        "flagged {} points: {} of {} planted outliers recovered, {} extra",
        hits + false_alarms,
        hits,
        scenario.truth.iter().filter(|&&t| t).count(),
        false_alarms
    );

    for (i, flag) in detection.result.outlier_flags.iter().enumerate() {
        if *flag {
            let row = scenario.dataset.row(i);
            println!(
                "  point {i}: ({:+.3}, {:+.3}) in cluster of size {}",
                row[0],
                row[1],
                detection.result.cluster_sizes[detection.result.labels[i]]
            );
        }
    }
    Ok(())
}
