//! Evaluate the potential surface over a grid and sketch it in the
//! terminal.
//!
//! The potential is low near dense regions and rises in empty space; its
//! minima are the cluster attractors every data point descends toward.
//! The grid CSV written at the end feeds external contour plotting.
//!
//! Run with: cargo run -p qclust --example potential_surface

use qclust::io::write_grid;
use qclust::potential::{Dataset, GridBounds, KernelWidth, PotentialField, PotentialMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two clusters of different density.
    let rows = vec![
        vec![-2.0, 0.0],
        vec![-2.2, 0.1],
        vec![-1.9, -0.2],
        vec![-2.1, -0.1],
        vec![-1.8, 0.2],
        vec![2.0, 0.0],
        vec![2.3, 0.2],
        vec![1.7, -0.2],
    ];
    let dataset = Dataset::from_rows(&rows)?;
    let field = PotentialField::new(
        &dataset,
        KernelWidth::new(0.7)?,
        PotentialMode::Direct,
    );

    let bounds = GridBounds {
        x: (-4.0, 4.0),
        y: (-1.6, 1.6),
    };
    let grid = field.potential_grid(bounds, (64, 18))?;

    // Shade cells by potential: dark means low (attracting).
    let shades = [b'@', b'#', b'+', b'-', b'.', b' '];
    let (lo, hi) = grid
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    for gy in (0..grid.ys.len()).rev() {
        let mut line = Vec::with_capacity(grid.xs.len());
        for gx in 0..grid.xs.len() {
            let t = (grid.values[[gy, gx]] - lo) / (hi - lo);
            let idx = ((t * (shades.len() - 1) as f64).round() as usize).min(shades.len() - 1);
            line.push(shades[idx]);
        }
        println!("{}", String::from_utf8(line)?);
    }
    println!("potential range [{lo:.3}, {hi:.3}] at sigma 0.7");

    let v_left = field.potential(ndarray::Array1::from(vec![-2.0, 0.0]).view())?;
    let v_mid = field.potential(ndarray::Array1::from(vec![0.0, 0.0]).view())?;
    println!("v at left cluster center {v_left:.3}, v between clusters {v_mid:.3}");

    let out = std::env::temp_dir().join("qclust_potential_grid.csv");
    write_grid(&grid, &out)?;
    println!("grid written to {}", out.display());
    Ok(())
}
