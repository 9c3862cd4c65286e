//! The air-quality pipeline on the UCI sensor dataset.
//!
//! Loads the hourly air-quality export (semicolon separated, comma
//! decimals, -200 missing sentinels), standardizes, projects onto the top
//! two principal components, and detects outliers at two kernel widths: a
//! wide one that shows the gross cluster structure and a narrow one that
//! flags the fringe.
//!
//! The dataset is not bundled. Download AirQualityUCI.csv from the UCI
//! Machine Learning Repository ("Air Quality" dataset) and place it at
//! data/AirQualityUCI.csv, or point QC_AIR_QUALITY at it.
//!
//! Run with: cargo run -p qclust --example air_quality

use qclust::clustering::{detect, QcParams, SigmaSpec};
use qclust::io::load_air_quality;
use qclust::potential::Dataset;
use qclust::preprocess::{pca_fit, pca_project};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::var_os("QC_AIR_QUALITY")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| "data/AirQualityUCI.csv".into());
    if !path.exists() {
        println!("air-quality file not found at {}", path.display());
        println!("download AirQualityUCI.csv from the UCI repository to run this example");
        return Ok(());
    }

    let loaded = load_air_quality(&path)?;
    println!(
        "loaded {} rows, {} standardized columns ({} cells imputed)",
        loaded.dataset.n(),
        loaded.dataset.d(),
        loaded.imputed_cells
    );

    let model = pca_fit(loaded.dataset.points(), 2)?;
    println!(
        "top-2 explained variance: {:.3}",
        model.explained_variance_ratio.iter().sum::<f64>()
    );
    let dataset = Dataset::new(pca_project(&model, loaded.dataset.points())?)?;

    for sigma in [6.0, 1.0] {
        let params = QcParams {
            sigma: SigmaSpec::Fixed(sigma),
            ..QcParams::default()
        };
        let detection = detect(&dataset, &params)?;
        let flagged = detection
            .result
            .outlier_flags
            .iter()
            .filter(|f| **f)
            .count();
        let mut sizes = detection.result.cluster_sizes.clone();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes.truncate(8);
        println!(
            "sigma {sigma}: {} clusters (largest {:?}), {flagged} flagged",
            detection.result.cluster_sizes.len(),
            sizes
        );
    }
    Ok(())
}
