//! The quantum potential and its building blocks.
//!
//! A dataset of points induces a Parzen-style wave function: a sum of
//! Gaussian kernels of width `sigma` centered at the data points. The
//! potential derived from it,
//!
//! ```text
//! v(x) = 1/(2 sigma^2 psi(x)) * sum_i |x - x_i|^2 exp(-|x - x_i|^2 / 2 sigma^2)
//! ```
//!
//! is low near the modes of dense regions and rises wherever the local
//! density fluctuates. Descending data points on this surface groups them
//! by basin; that grouping is what the clustering layer consumes.
//!
//! All evaluations are pure functions of their arguments: a
//! [`PotentialField`] is immutable and can be shared across threads.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{QcError, Result};

/// Below this wave-function magnitude the evaluation switches to a
/// shifted (log-sum-exp) form. The potential is a ratio of two kernel
/// sums, so subtracting the maximum exponent from every term before
/// exponentiating leaves the result unchanged while keeping the
/// denominator representable arbitrarily far from the data.
const PSI_FLOOR: f64 = 1e-300;

/// An immutable n x d matrix of finite real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Array2<f64>,
}

impl Dataset {
    /// Validates and wraps a point matrix: at least one row, at least one
    /// column, every entry finite.
    pub fn new(points: Array2<f64>) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(QcError::EmptyInput {
                context: "dataset has no rows",
            });
        }
        if points.ncols() == 0 {
            return Err(QcError::EmptyInput {
                context: "dataset has no columns",
            });
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(QcError::NonFinite {
                context: "dataset coordinates",
            });
        }
        Ok(Dataset { points })
    }

    /// Builds a dataset from row vectors, all of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(QcError::EmptyInput {
                context: "dataset has no rows",
            });
        }
        let d = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(QcError::InconsistentWidth {
                    path: "<memory>".into(),
                    row: i,
                    expected: d,
                    got: r.len(),
                });
            }
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let points = Array2::from_shape_vec((rows.len(), d), flat)
            .expect("row-major shape matches collected length");
        Dataset::new(points)
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }
}

/// The Gaussian kernel width; strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelWidth(f64);

impl KernelWidth {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(QcError::invalid("sigma", format!("must satisfy sigma > 0 and be finite, got {sigma}")));
        }
        Ok(KernelWidth(sigma))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Direct mode minimizes the potential itself; inverse mode minimizes its
/// negation, so descent seeks potential maxima (density holes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialMode {
    #[default]
    Direct,
    Inverse,
}

impl std::fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PotentialMode::Direct => write!(f, "direct"),
            PotentialMode::Inverse => write!(f, "inverse"),
        }
    }
}

impl std::str::FromStr for PotentialMode {
    type Err = QcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(PotentialMode::Direct),
            "inverse" => Ok(PotentialMode::Inverse),
            other => Err(QcError::invalid(
                "mode",
                format!("expected 'direct' or 'inverse', got {other:?}"),
            )),
        }
    }
}

/// Evaluator binding a dataset and a kernel width.
#[derive(Debug, Clone)]
pub struct PotentialField<'d> {
    dataset: &'d Dataset,
    sigma: f64,
    sigma_sq: f64,
    mode: PotentialMode,
}

/// Accumulated kernel sums at one query point.
///
/// `psi` is the wave function, `weighted_sq` the squared-distance-weighted
/// sum; both may carry an implicit common factor `exp(shift)` that cancels
/// in every ratio the potential needs.
struct KernelSums {
    psi: f64,
    weighted_sq: f64,
}

impl<'d> PotentialField<'d> {
    pub fn new(dataset: &'d Dataset, sigma: KernelWidth, mode: PotentialMode) -> Self {
        let s = sigma.get();
        PotentialField {
            dataset,
            sigma: s,
            sigma_sq: s * s,
            mode,
        }
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mode(&self) -> PotentialMode {
        self.mode
    }

    pub(crate) fn check_query(&self, x: ArrayView1<'_, f64>) -> Result<()> {
        if x.len() != self.dataset.d() {
            return Err(QcError::DimensionMismatch {
                expected: self.dataset.d(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(QcError::NonFinite {
                context: "query point",
            });
        }
        Ok(())
    }

    /// The wave function `psi(x)`: a sum of `n` Gaussian kernels, hence
    /// strictly positive in exact arithmetic and at most `n`.
    pub fn wave_function(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_query(x)?;
        let points = self.dataset.points();
        let inv_two_sigma_sq = 0.5 / self.sigma_sq;
        let mut psi = 0.0;
        for i in 0..points.nrows() {
            let mut r_sq = 0.0;
            for k in 0..points.ncols() {
                let u = x[k] - points[[i, k]];
                r_sq += u * u;
            }
            psi += (-r_sq * inv_two_sigma_sq).exp();
        }
        Ok(psi)
    }

    /// Plain single-pass kernel sums; underflows far from the data.
    fn sums_direct(&self, x: ArrayView1<'_, f64>) -> KernelSums {
        let points = self.dataset.points();
        let inv_two_sigma_sq = 0.5 / self.sigma_sq;
        let mut psi = 0.0;
        let mut weighted_sq = 0.0;
        for i in 0..points.nrows() {
            let mut r_sq = 0.0;
            for k in 0..points.ncols() {
                let u = x[k] - points[[i, k]];
                r_sq += u * u;
            }
            let w = (-r_sq * inv_two_sigma_sq).exp();
            psi += w;
            weighted_sq += r_sq * w;
        }
        KernelSums { psi, weighted_sq }
    }

    /// Kernel sums with the maximum exponent factored out, used when the
    /// plain sums underflow. The factored-out `exp(max)` cancels in the
    /// ratio, so the potential is unaffected.
    fn sums_shifted(&self, x: ArrayView1<'_, f64>) -> Result<KernelSums> {
        let points = self.dataset.points();
        let inv_two_sigma_sq = 0.5 / self.sigma_sq;
        let mut max_exp = f64::NEG_INFINITY;
        let mut r_sqs = Vec::with_capacity(points.nrows());
        for i in 0..points.nrows() {
            let mut r_sq = 0.0;
            for k in 0..points.ncols() {
                let u = x[k] - points[[i, k]];
                r_sq += u * u;
            }
            let e = -r_sq * inv_two_sigma_sq;
            if e > max_exp {
                max_exp = e;
            }
            r_sqs.push((r_sq, e));
        }
        if !max_exp.is_finite() {
            // Squared distances overflowed; the query is unrepresentably far.
            return Err(QcError::OutOfSupport);
        }
        let mut psi = 0.0;
        let mut weighted_sq = 0.0;
        for &(r_sq, e) in &r_sqs {
            let w = (e - max_exp).exp();
            psi += w;
            weighted_sq += r_sq * w;
        }
        Ok(KernelSums { psi, weighted_sq })
    }

    fn sums(&self, x: ArrayView1<'_, f64>) -> Result<KernelSums> {
        let direct = self.sums_direct(x);
        if direct.psi >= PSI_FLOOR {
            Ok(direct)
        } else {
            self.sums_shifted(x)
        }
    }

    /// The potential `v(x)`. Direct mode is nonnegative everywhere; inverse
    /// mode returns the negated value.
    pub fn potential(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_query(x)?;
        self.potential_unchecked(x)
    }

    /// `potential` without the query validation; descent loops call this on
    /// points already known to be finite and of the right dimension.
    pub(crate) fn potential_unchecked(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        let s = self.sums(x)?;
        let v = s.weighted_sq / (2.0 * self.sigma_sq * s.psi);
        Ok(match self.mode {
            PotentialMode::Direct => v,
            PotentialMode::Inverse => -v,
        })
    }

    /// The exact analytic gradient of [`PotentialField::potential`];
    /// negated in inverse mode.
    pub fn potential_gradient(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        self.check_query(x)?;
        self.gradient_unchecked(x)
    }

    pub(crate) fn gradient_unchecked(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let points = self.dataset.points();
        let d = points.ncols();
        let inv_two_sigma_sq = 0.5 / self.sigma_sq;

        // One pass accumulating psi, S = sum r^2 w and the vector sums
        // A = sum u w, B = sum u r^2 w with u = x - x_i. Then
        //   grad v = (2 A - B / sigma^2 + (S / (sigma^2 psi)) A) / (2 sigma^2 psi).
        // When psi underflows, redo the pass with the max exponent factored
        // out; every term above scales by the same factor, which cancels.
        let mut shift = 0.0;
        loop {
            let mut psi = 0.0;
            let mut s_sum = 0.0;
            let mut a = Array1::<f64>::zeros(d);
            let mut b = Array1::<f64>::zeros(d);
            for i in 0..points.nrows() {
                let mut r_sq = 0.0;
                for k in 0..d {
                    let u = x[k] - points[[i, k]];
                    r_sq += u * u;
                }
                let w = (-r_sq * inv_two_sigma_sq - shift).exp();
                psi += w;
                s_sum += r_sq * w;
                for k in 0..d {
                    let u = x[k] - points[[i, k]];
                    a[k] += u * w;
                    b[k] += u * r_sq * w;
                }
            }
            if psi < PSI_FLOOR && shift == 0.0 {
                // Find the dominating exponent and retry shifted.
                let mut max_exp = f64::NEG_INFINITY;
                for i in 0..points.nrows() {
                    let mut r_sq = 0.0;
                    for k in 0..d {
                        let u = x[k] - points[[i, k]];
                        r_sq += u * u;
                    }
                    max_exp = max_exp.max(-r_sq * inv_two_sigma_sq);
                }
                if !max_exp.is_finite() {
                    return Err(QcError::OutOfSupport);
                }
                shift = -max_exp;
                continue;
            }
            let scale = 1.0 / (2.0 * self.sigma_sq * psi);
            let ratio = s_sum / (self.sigma_sq * psi);
            let mut grad = Array1::<f64>::zeros(d);
            for k in 0..d {
                grad[k] = scale * (2.0 * a[k] - b[k] / self.sigma_sq + ratio * a[k]);
            }
            if let PotentialMode::Inverse = self.mode {
                grad.mapv_inplace(|g| -g);
            }
            return Ok(grad);
        }
    }

    /// Samples the potential on a 2-D lattice. Requires `d == 2`; the
    /// lattice includes both endpoints per axis and is laid out row-major
    /// with the x axis varying fastest.
    pub fn potential_grid(&self, bounds: GridBounds, resolution: (usize, usize)) -> Result<PotentialGrid> {
        if self.dataset.d() != 2 {
            return Err(QcError::invalid(
                "grid",
                format!("grids are only defined for 2-D datasets, got d={}", self.dataset.d()),
            ));
        }
        bounds.validate()?;
        let (nx, ny) = resolution;
        if nx < 2 || ny < 2 {
            return Err(QcError::invalid(
                "resolution",
                format!("needs at least 2 samples per axis, got ({nx}, {ny})"),
            ));
        }
        let xs: Vec<f64> = (0..nx)
            .map(|i| bounds.x.0 + (bounds.x.1 - bounds.x.0) * i as f64 / (nx - 1) as f64)
            .collect();
        let ys: Vec<f64> = (0..ny)
            .map(|j| bounds.y.0 + (bounds.y.1 - bounds.y.0) * j as f64 / (ny - 1) as f64)
            .collect();
        let mut values = Array2::<f64>::zeros((ny, nx));
        // Cells are independent; partitioning must not affect the result, so
        // each cell is a standalone potential call.
        {
            use rayon::prelude::*;
            let cells: Vec<(usize, usize)> = (0..ny)
                .flat_map(|j| (0..nx).map(move |i| (j, i)))
                .collect();
            let computed: Vec<f64> = cells
                .par_iter()
                .map(|&(j, i)| {
                    let q = [xs[i], ys[j]];
                    self.potential_unchecked(ArrayView1::from(&q[..]))
                        .expect("grid cell within float range")
                })
                .collect();
            for (idx, &(j, i)) in cells.iter().enumerate() {
                values[[j, i]] = computed[idx];
            }
        }
        Ok(PotentialGrid { xs, ys, values })
    }
}

/// Inclusive per-axis bounds of a 2-D evaluation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl GridBounds {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("x bounds", self.x), ("y bounds", self.y)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(QcError::invalid(
                    "bounds",
                    format!("{name} must be finite with lo < hi, got [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }
}

/// Potential values sampled on a lattice; `values[[j, i]]` belongs to the
/// coordinate `(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Array2<f64>,
}

impl PotentialGrid {
    /// Iterates cells row-major as `(x, y, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ys.iter().enumerate().flat_map(move |(j, &y)| {
            self.xs
                .iter()
                .enumerate()
                .map(move |(i, &x)| (x, y, self.values[[j, i]]))
        })
    }
}
