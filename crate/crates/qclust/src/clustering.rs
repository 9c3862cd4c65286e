//! From a raw point cloud to cluster labels and outlier flags.
//!
//! The pipeline in [`detect`]:
//!
//! 1. pick the kernel width, either fixed or estimated from the mode of
//!    the pairwise-distance histogram,
//! 2. slide every data point downhill on the potential surface,
//! 3. merge settled points whose distance is at most the merge radius
//!    (single linkage, so chains of nearby points join one cluster),
//! 4. flag every member of a cluster smaller than `k` as an outlier.
//!
//! Descents are independent, so step 2 runs in parallel; results are
//! collected by point index and each descent is internally sequential,
//! which keeps the whole pipeline deterministic for fixed inputs.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{QcError, Result};
use crate::optimizer::{descend_point, BfgsConfig};
use crate::potential::{Dataset, KernelWidth, PotentialField, PotentialMode};

/// Histogram resolution used when no bin count is given.
pub const DEFAULT_BINS: usize = 50;

/// How the kernel width is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSpec {
    Fixed(f64),
    /// Estimate from the pairwise-distance histogram with this many bins.
    Estimate { bins: usize },
}

impl Default for SigmaSpec {
    fn default() -> Self {
        SigmaSpec::Estimate { bins: DEFAULT_BINS }
    }
}

/// How the small-cluster threshold is chosen. A cluster is outlying when
/// its size is strictly below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KSpec {
    Fixed(usize),
    /// `max(2, ceil(0.05 n))`: five percent of the data, floored at 2 so
    /// that singletons are always outliers.
    #[default]
    Auto,
}

/// How the merge radius for settled points is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MergeSpec {
    Fixed(f64),
    /// A quarter of the kernel width: well inside the basin spacing, well
    /// above descent noise.
    #[default]
    Auto,
}

/// Full parameter set for [`detect`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QcParams {
    pub sigma: SigmaSpec,
    pub k: KSpec,
    pub merge_radius: MergeSpec,
    pub mode: PotentialMode,
    pub opt: BfgsConfig,
}

/// Histogram of all pairwise point distances.
///
/// Bins partition `[0, max_distance]` uniformly; a distance landing on an
/// interior edge counts toward the lower bin, so the last bin alone owns
/// its upper edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceHistogram {
    /// `bins + 1` ascending edges from 0 to the maximum pairwise distance.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Index of the fullest bin; ties resolve to the smallest index.
    pub mode_bin: usize,
    /// Center of the fullest bin, which is the sigma estimate.
    pub mode_bin_center: f64,
}

/// Estimates the kernel width as the most common pairwise distance.
///
/// Streams the `n (n - 1) / 2` distances twice, once for the maximum and
/// once for the counts, so no distance list is materialized. Needs at
/// least two points and at least two distinct ones.
pub fn estimate_sigma(
    dataset: &Dataset,
    num_bins: usize,
) -> Result<(KernelWidth, DistanceHistogram)> {
    if num_bins == 0 {
        return Err(QcError::invalid("num_bins", "must be at least 1"));
    }
    let n = dataset.n();
    if n < 2 {
        return Err(QcError::TooFewPoints { needed: 2, got: n });
    }
    let points = dataset.points();
    let d = dataset.d();

    let mut max_dist = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sq = 0.0;
            for k in 0..d {
                let u = points[[i, k]] - points[[j, k]];
                sq += u * u;
            }
            max_dist = max_dist.max(sq.sqrt());
        }
    }
    if max_dist == 0.0 {
        return Err(QcError::DegenerateDistances);
    }

    let mut counts = vec![0u64; num_bins];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sq = 0.0;
            for k in 0..d {
                let u = points[[i, k]] - points[[j, k]];
                sq += u * u;
            }
            let dist = sq.sqrt();
            let idx = if dist <= 0.0 {
                0
            } else {
                // Edge values fall to the lower bin: ceil maps (lo, hi]
                // to the bin index plus one.
                let b = (dist * num_bins as f64 / max_dist).ceil() as usize;
                b.saturating_sub(1).min(num_bins - 1)
            };
            counts[idx] += 1;
        }
    }

    let mode_bin = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("num_bins >= 1");
    let sigma = max_dist * (mode_bin as f64 + 0.5) / num_bins as f64;
    let bin_edges = (0..=num_bins)
        .map(|i| max_dist * i as f64 / num_bins as f64)
        .collect();
    Ok((
        KernelWidth::new(sigma)?,
        DistanceHistogram {
            bin_edges,
            counts,
            mode_bin,
            mode_bin_center: sigma,
        },
    ))
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Groups settled points by single linkage: two points share a cluster
/// when a chain of pairwise distances, each at most `merge_radius`, joins
/// them. Labels are dense from 0 in order of first appearance; the second
/// element counts members per label.
pub fn assign_clusters(
    converged: &Array2<f64>,
    merge_radius: f64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(merge_radius.is_finite() && merge_radius > 0.0) {
        return Err(QcError::invalid(
            "merge_radius",
            format!("must be finite and > 0, got {merge_radius}"),
        ));
    }
    let n = converged.nrows();
    if n == 0 {
        return Err(QcError::EmptyInput {
            context: "converged points",
        });
    }
    if converged.iter().any(|v| !v.is_finite()) {
        return Err(QcError::NonFinite {
            context: "converged points",
        });
    }
    let d = converged.ncols();
    let r_sq = merge_radius * merge_radius;
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sq = 0.0;
            for k in 0..d {
                let u = converged[[i, k]] - converged[[j, k]];
                sq += u * u;
            }
            if sq <= r_sq {
                uf.union(i, j);
            }
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut cluster_sizes = Vec::new();
    let mut next = 0;
    for i in 0..n {
        let root = uf.find(i);
        if label_of_root[root] == usize::MAX {
            label_of_root[root] = next;
            cluster_sizes.push(0);
            next += 1;
        }
        labels.push(label_of_root[root]);
        cluster_sizes[label_of_root[root]] += 1;
    }
    Ok((labels, cluster_sizes))
}

/// Flags members of small clusters: `flags[i]` is true exactly when
/// `cluster_sizes[labels[i]] < k`.
pub fn label_outliers(labels: &[usize], cluster_sizes: &[usize], k: usize) -> Result<Vec<bool>> {
    if labels.is_empty() {
        return Err(QcError::EmptyInput { context: "labels" });
    }
    if k == 0 {
        return Err(QcError::invalid("k", "must be at least 1"));
    }
    let mut recount = vec![0usize; cluster_sizes.len()];
    for &l in labels {
        if l >= recount.len() {
            return Err(QcError::invalid(
                "cluster_sizes",
                "must count the members of each label exactly",
            ));
        }
        recount[l] += 1;
    }
    if recount != cluster_sizes {
        return Err(QcError::invalid(
            "cluster_sizes",
            "must count the members of each label exactly",
        ));
    }
    Ok(labels.iter().map(|&l| cluster_sizes[l] < k).collect())
}

/// Per-point clustering output.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Basin minimum each point settled into, one row per input point.
    pub converged: Array2<f64>,
    /// Dense cluster label per point, numbered by first appearance.
    pub labels: Vec<usize>,
    /// Member count per label; sums to `n`.
    pub cluster_sizes: Vec<usize>,
    /// True for members of clusters smaller than the resolved `k`.
    pub outlier_flags: Vec<bool>,
}

/// A [`ClusterResult`] together with the resolved parameter values and
/// run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub result: ClusterResult,
    /// Kernel width actually used (estimated or fixed).
    pub sigma: f64,
    pub merge_radius: f64,
    pub k: usize,
    pub mode: PotentialMode,
    /// Whether each point's descent met a stopping test within budget.
    pub descent_converged: Vec<bool>,
    /// Count of descents that exhausted the iteration budget; those points
    /// keep their final position and still participate in merging.
    pub non_converged: usize,
    /// Present when sigma was estimated rather than fixed.
    pub histogram: Option<DistanceHistogram>,
}

/// Runs the full pipeline on a dataset.
pub fn detect(dataset: &Dataset, params: &QcParams) -> Result<Detection> {
    params.opt.validate()?;
    let n = dataset.n();

    let (sigma, histogram) = match params.sigma {
        SigmaSpec::Fixed(s) => (KernelWidth::new(s)?, None),
        SigmaSpec::Estimate { bins } => {
            let (s, h) = estimate_sigma(dataset, bins)?;
            (s, Some(h))
        }
    };
    let k = match params.k {
        KSpec::Fixed(k) => {
            if k == 0 {
                return Err(QcError::invalid("k", "must be at least 1"));
            }
            k
        }
        KSpec::Auto => ((n as f64 * 0.05).ceil() as usize).max(2),
    };
    let merge_radius = match params.merge_radius {
        MergeSpec::Fixed(r) => {
            if !(r.is_finite() && r > 0.0) {
                return Err(QcError::invalid(
                    "merge_radius",
                    format!("must be finite and > 0, got {r}"),
                ));
            }
            r
        }
        MergeSpec::Auto => sigma.get() / 4.0,
    };

    let field = PotentialField::new(dataset, sigma, params.mode);
    let outcomes: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| descend_point(&field, dataset.row(i), &params.opt))
        .collect::<Result<_>>()?;

    let d = dataset.d();
    let mut converged = Array2::<f64>::zeros((n, d));
    let mut descent_converged = Vec::with_capacity(n);
    for (i, out) in outcomes.iter().enumerate() {
        for kdim in 0..d {
            converged[[i, kdim]] = out.x_star[kdim];
        }
        descent_converged.push(out.converged);
    }
    let non_converged = descent_converged.iter().filter(|c| !**c).count();

    let (labels, cluster_sizes) = assign_clusters(&converged, merge_radius)?;
    let outlier_flags = label_outliers(&labels, &cluster_sizes, k)?;

    Ok(Detection {
        result: ClusterResult {
            converged,
            labels,
            cluster_sizes,
            outlier_flags,
        },
        sigma: sigma.get(),
        merge_radius,
        k,
        mode: params.mode,
        descent_converged,
        non_converged,
        histogram,
    })
}
