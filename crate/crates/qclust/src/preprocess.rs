//! Column-wise cleanup and dimensionality reduction for raw tables.
//!
//! Real measurement tables need three things before clustering: sentinel
//! values replaced ([`impute_missing`]), columns brought onto a common
//! scale ([`standardize`]), and optionally a projection onto the top
//! principal directions ([`pca_fit`] and [`pca_project`]).

use ndarray::{Array1, Array2};

use crate::error::{QcError, Result};

fn check_table(matrix: &Array2<f64>, what: &'static str) -> Result<()> {
    if matrix.nrows() == 0 {
        return Err(QcError::EmptyInput { context: what });
    }
    if matrix.ncols() == 0 {
        return Err(QcError::EmptyInput { context: what });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(QcError::NonFinite { context: what });
    }
    Ok(())
}

/// A table rescaled to zero mean and unit spread per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    /// Rescaled table; constant columns are absent.
    pub matrix: Array2<f64>,
    /// Mean of each kept column, aligned with `matrix`.
    pub means: Vec<f64>,
    /// Spread of each kept column, aligned with `matrix`.
    pub stds: Vec<f64>,
    /// Original indices of columns dropped for having no spread.
    pub dropped_columns: Vec<usize>,
}

/// Centers each column and divides by its spread, computed with the
/// population convention (divide by `n`). Columns whose spread is exactly
/// zero carry no information at any scale and are dropped; their original
/// indices are reported so callers can surface a diagnostic.
pub fn standardize(matrix: &Array2<f64>) -> Result<Standardized> {
    check_table(matrix, "standardize input")?;
    let n = matrix.nrows();
    let mut kept = Vec::new();
    let mut means = Vec::new();
    let mut stds = Vec::new();
    let mut dropped_columns = Vec::new();
    for c in 0..matrix.ncols() {
        let col = matrix.column(c);
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        if std == 0.0 {
            dropped_columns.push(c);
        } else {
            kept.push(c);
            means.push(mean);
            stds.push(std);
        }
    }
    if kept.is_empty() {
        return Err(QcError::EmptyInput {
            context: "standardize output: every column is constant",
        });
    }
    let mut out = Array2::<f64>::zeros((n, kept.len()));
    for (oc, &c) in kept.iter().enumerate() {
        for r in 0..n {
            out[[r, oc]] = (matrix[[r, c]] - means[oc]) / stds[oc];
        }
    }
    Ok(Standardized {
        matrix: out,
        means,
        stds,
        dropped_columns,
    })
}

/// A table with sentinel cells replaced by their column means.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputed {
    /// Table with sentinels replaced; all-sentinel columns are absent.
    pub matrix: Array2<f64>,
    /// Mean of the observed (non-sentinel) cells per kept column.
    pub column_means: Vec<f64>,
    /// How many cells were replaced.
    pub imputed_cells: usize,
    /// Original indices of columns that held only sentinels.
    pub dropped_columns: Vec<usize>,
}

/// Replaces every cell exactly equal to `sentinel` with the mean of the
/// observed cells in its column. Columns with no observed cells at all are
/// dropped and reported.
pub fn impute_missing(matrix: &Array2<f64>, sentinel: f64) -> Result<Imputed> {
    check_table(matrix, "impute input")?;
    if !sentinel.is_finite() {
        return Err(QcError::invalid(
            "sentinel",
            format!("must be finite, got {sentinel}"),
        ));
    }
    let n = matrix.nrows();
    let mut kept = Vec::new();
    let mut column_means = Vec::new();
    let mut dropped_columns = Vec::new();
    for c in 0..matrix.ncols() {
        let col = matrix.column(c);
        let mut sum = 0.0;
        let mut observed = 0usize;
        for &v in col.iter() {
            if v != sentinel {
                sum += v;
                observed += 1;
            }
        }
        if observed == 0 {
            dropped_columns.push(c);
        } else {
            kept.push(c);
            column_means.push(sum / observed as f64);
        }
    }
    if kept.is_empty() {
        return Err(QcError::EmptyInput {
            context: "impute output: every column is entirely sentinel",
        });
    }
    let mut out = Array2::<f64>::zeros((n, kept.len()));
    let mut imputed_cells = 0;
    for (oc, &c) in kept.iter().enumerate() {
        for r in 0..n {
            let v = matrix[[r, c]];
            out[[r, oc]] = if v == sentinel {
                imputed_cells += 1;
                column_means[oc]
            } else {
                v
            };
        }
    }
    Ok(Imputed {
        matrix: out,
        column_means,
        imputed_cells,
        dropped_columns,
    })
}

/// A fitted principal-component basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// Column means of the training table.
    pub mean: Vec<f64>,
    /// One orthonormal component per row, strongest first. May hold fewer
    /// rows than requested when the table has less variance structure; see
    /// [`pca_fit`].
    pub components: Array2<f64>,
    /// Variance along the components; descending.
    pub eigenvalues: Vec<f64>,
    /// Share of total variance captured by each kept component.
    pub explained_variance_ratio: Vec<f64>,
}

/// Diagonalizes a symmetric matrix with cyclic Jacobi rotations. Returns
/// eigenvalues and matching eigenvector columns, unordered.
fn jacobi_eigen(sym: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let d = sym.nrows();
    let mut a = sym.clone();
    let mut v = Array2::<f64>::eye(d);
    let frob = sym.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-14 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[[p, q]].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = Array1::from_iter((0..d).map(|i| a[[i, i]]));
    (eigenvalues, v)
}

/// Fits a PCA basis of up to `components` directions.
///
/// The covariance uses the sample convention (divide by `n - 1`), so at
/// least two rows are required and the request may not exceed `n - 1` or
/// the column count. Directions along which the data carries essentially
/// no variance are not returned: when the table's rank is below the
/// request, the model simply holds fewer components, and callers can
/// compare `model.components.nrows()` against what they asked for.
///
/// Each component's sign is fixed by making its largest-magnitude entry
/// (ties to the earliest index) positive, so refits are reproducible.
pub fn pca_fit(matrix: &Array2<f64>, components: usize) -> Result<PcaModel> {
    check_table(matrix, "pca input")?;
    let n = matrix.nrows();
    let d = matrix.ncols();
    if n < 2 {
        return Err(QcError::TooFewPoints { needed: 2, got: n });
    }
    if components == 0 {
        return Err(QcError::invalid("components", "must be at least 1"));
    }
    if components > d {
        return Err(QcError::invalid(
            "components",
            format!("cannot exceed the column count {d}, got {components}"),
        ));
    }
    if components > n - 1 {
        return Err(QcError::invalid(
            "components",
            format!(
                "cannot exceed the covariance rank bound n - 1 = {}, got {components}",
                n - 1
            ),
        ));
    }

    let mean: Vec<f64> = (0..d).map(|c| matrix.column(c).sum() / n as f64).collect();
    let mut cov = Array2::<f64>::zeros((d, d));
    for r in 0..n {
        for i in 0..d {
            let di = matrix[[r, i]] - mean[i];
            for j in i..d {
                cov[[i, j]] += di * (matrix[[r, j]] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[[i, j]] /= (n - 1) as f64;
            cov[[j, i]] = cov[[i, j]];
        }
    }

    let (eigenvalues, vectors) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        eigenvalues[j]
            .partial_cmp(&eigenvalues[i])
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });

    let total: f64 = eigenvalues.iter().map(|l| l.max(0.0)).sum();
    if total <= 0.0 {
        return Err(QcError::DegenerateDistances);
    }
    let rank_floor = 1e-12 * eigenvalues[order[0]].max(0.0);
    let available = order
        .iter()
        .take(components)
        .take_while(|&&i| eigenvalues[i] > rank_floor)
        .count()
        .max(1);

    let mut comp = Array2::<f64>::zeros((available, d));
    let mut kept_eigenvalues = Vec::with_capacity(available);
    let mut ratio = Vec::with_capacity(available);
    for (row, &src) in order.iter().take(available).enumerate() {
        let mut best = 0;
        for k in 1..d {
            if vectors[[k, src]].abs() > vectors[[best, src]].abs() {
                best = k;
            }
        }
        let flip = if vectors[[best, src]] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..d {
            comp[[row, k]] = flip * vectors[[k, src]];
        }
        kept_eigenvalues.push(eigenvalues[src].max(0.0));
        ratio.push(eigenvalues[src].max(0.0) / total);
    }

    Ok(PcaModel {
        mean,
        components: comp,
        eigenvalues: kept_eigenvalues,
        explained_variance_ratio: ratio,
    })
}

/// Projects rows onto a fitted basis: center by the model mean, then take
/// inner products with each component. Output is `n x m'` for a model
/// holding `m'` components.
pub fn pca_project(model: &PcaModel, matrix: &Array2<f64>) -> Result<Array2<f64>> {
    check_table(matrix, "pca projection input")?;
    let d = model.mean.len();
    if matrix.ncols() != d {
        return Err(QcError::DimensionMismatch {
            expected: d,
            got: matrix.ncols(),
        });
    }
    let m = model.components.nrows();
    let n = matrix.nrows();
    let mut out = Array2::<f64>::zeros((n, m));
    for r in 0..n {
        for c in 0..m {
            let mut acc = 0.0;
            for k in 0..d {
                acc += (matrix[[r, k]] - model.mean[k]) * model.components[[c, k]];
            }
            out[[r, c]] = acc;
        }
    }
    Ok(out)
}
