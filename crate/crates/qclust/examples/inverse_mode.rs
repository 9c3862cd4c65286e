//! Find outliers in a density hole with the inverse potential.
//!
//! A handful of sparse points inside a hole in an otherwise dense plate
//! defeats direct descent: the sparse points just roll into the
//! surrounding structure. Negating the potential turns density holes into
//! attractors, so descent gathers exactly the hole's occupants.
//!
//! Run with: cargo run -p qclust --example inverse_mode

use qclust::clustering::{detect, QcParams};
use qclust::datagen::{generate_default, ScenarioId};
use qclust::potential::PotentialMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = generate_default(ScenarioId::F, 0)?;
    println!(
        "plate with a hole: {} points, {} sparse points inside the hole",
        scenario.dataset.n(),
        scenario.planted_count()
    );

    for mode in [PotentialMode::Direct, PotentialMode::Inverse] {
        let params = QcParams {
            mode,
            ..QcParams::default()
        };
        let detection = detect(&scenario.dataset, &params)?;
        let recovered = scenario
            .truth
            .iter()
            .enumerate()
            .filter(|(i, t)| **t && detection.result.outlier_flags[*i])
            .count();
        let flagged = detection
            .result
            .outlier_flags
            .iter()
            .filter(|f| **f)
            .count();
        println!(
            "mode {mode}: sigma {:.3}, {} clusters, {flagged} flagged, {recovered}/{} hole points recovered",
            detection.sigma,
            detection.result.cluster_sizes.len(),
            scenario.planted_count()
        );
    }

    Ok(())
}
