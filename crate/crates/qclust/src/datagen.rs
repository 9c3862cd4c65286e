//! Seeded 2-D benchmark scenarios with planted outliers.
//!
//! Six constructions, [`ScenarioId::A`] through [`ScenarioId::F`], cover
//! the classic failure modes of density-based detectors: global
//! stragglers, points enclosed by a ring, a far micro-cluster, a lone
//! point between a dense blob and a sparse region, micro-clusters on a
//! blob edge, and sparse points inside a hole through a uniform plate.
//!
//! Every random draw comes from [`CounterRng`], a counter-based generator
//! with fixed published constants, so a `(scenario, seed, params)` triple
//! produces bitwise-identical data on every platform. Normal points are
//! emitted first and planted outliers last, and `truth` marks exactly the
//! planted rows.

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::potential::Dataset;

/// Weyl increment of the splitmix64 sequence.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counter-based generator: draw `i` of stream `seed` is
/// `mix64(seed + i * GOLDEN)` where `mix64` is the splitmix64 finalizer
/// (xor-shift 30, multiply `0xBF58476D1CE4E5B9`, xor-shift 27, multiply
/// `0x94D049BB133111EB`, xor-shift 31). Outputs depend only on the seed
/// and the draw index, never on process or platform state.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    fn mix64(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        Self::mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal pair by the Box-Muller transform. Always consumes
    /// exactly two uniforms, so draw counts stay predictable.
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let r = (-2.0 * (1.0 - self.uniform()).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        (r * theta.cos(), r * theta.sin())
    }

    /// Standard normal scalar; consumes two uniforms and discards the
    /// second Box-Muller coordinate rather than caching it.
    pub fn gaussian(&mut self) -> f64 {
        self.gaussian_pair().0
    }

    /// Uniform point in the disk of the given radius around the origin.
    pub fn in_disk(&mut self, radius: f64) -> (f64, f64) {
        let r = radius * self.uniform().sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        (r * theta.cos(), r * theta.sin())
    }

    /// Area-uniform point in the annulus between the two radii.
    fn in_annulus(&mut self, inner: f64, outer: f64) -> (f64, f64) {
        let r = self.uniform_in(inner * inner, outer * outer).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        (r * theta.cos(), r * theta.sin())
    }

    /// Standard normal pair conditioned on norm at most `trunc`.
    fn gaussian_pair_trunc(&mut self, trunc: f64) -> (f64, f64) {
        loop {
            let (a, b) = self.gaussian_pair();
            if a * a + b * b <= trunc * trunc {
                return (a, b);
            }
        }
    }
}

/// Names the six benchmark constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    /// Gaussian blob plus far uniform stragglers.
    A,
    /// Ring of points enclosing a few interior points.
    B,
    /// Gaussian blob plus one far micro-cluster.
    C,
    /// Dense blob, a clumped sparse region around it, and one lone point
    /// planted between the two scales.
    D,
    /// Gaussian blob with two tight micro-clusters on its edge.
    E,
    /// Uniform plate with a circular hole holding a few sparse points.
    F,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::A,
        ScenarioId::B,
        ScenarioId::C,
        ScenarioId::D,
        ScenarioId::E,
        ScenarioId::F,
    ];

    pub fn default_params(self) -> ScenarioParams {
        match self {
            ScenarioId::A => ScenarioParams::A(StragglerParams::default()),
            ScenarioId::B => ScenarioParams::B(RingParams::default()),
            ScenarioId::C => ScenarioParams::C(MicroClusterParams::default()),
            ScenarioId::D => ScenarioParams::D(SparseRegionParams::default()),
            ScenarioId::E => ScenarioParams::E(EdgeClusterParams::default()),
            ScenarioId::F => ScenarioParams::F(HolePlateParams::default()),
        }
    }
}

impl std::fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for ScenarioId {
    type Err = QcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(ScenarioId::A),
            "B" => Ok(ScenarioId::B),
            "C" => Ok(ScenarioId::C),
            "D" => Ok(ScenarioId::D),
            "E" => Ok(ScenarioId::E),
            "F" => Ok(ScenarioId::F),
            other => Err(QcError::invalid(
                "scenario",
                format!("expected one of A-F, got {other:?}"),
            )),
        }
    }
}

/// Scenario A: an isotropic Gaussian blob plus a handful of uniform
/// stragglers planted at `straggler_radius_min` blob spreads or farther
/// from the blob center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StragglerParams {
    /// Blob size; default 200.
    pub blob_n: usize,
    /// Blob standard deviation; default 1.
    pub blob_spread: f64,
    /// Planted straggler count; default 5.
    pub straggler_n: usize,
    /// Closest allowed straggler radius in blob spreads; default 6.
    pub straggler_radius_min: f64,
    /// Farthest straggler radius in blob spreads; default 10.
    pub straggler_radius_max: f64,
}

impl Default for StragglerParams {
    fn default() -> Self {
        StragglerParams {
            blob_n: 200,
            blob_spread: 1.0,
            straggler_n: 5,
            straggler_radius_min: 6.0,
            straggler_radius_max: 10.0,
        }
    }
}

/// Scenario B: a circular band of normal points enclosing a few interior
/// points near the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RingParams {
    /// Ring size; default 200.
    pub ring_n: usize,
    /// Ring radius; default 8.
    pub ring_radius: f64,
    /// Radial band spread; samples stay within three spreads. Default 0.5.
    pub ring_width: f64,
    /// Planted interior count; default 4.
    pub core_n: usize,
    /// Interior points land uniformly in this disk; default 2.
    pub core_radius: f64,
}

impl Default for RingParams {
    fn default() -> Self {
        RingParams {
            ring_n: 200,
            ring_radius: 8.0,
            ring_width: 0.5,
            core_n: 4,
            core_radius: 2.0,
        }
    }
}

/// Scenario C: an isotropic Gaussian blob plus one tight micro-cluster
/// planted far away.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MicroClusterParams {
    /// Blob size; default 200.
    pub blob_n: usize,
    /// Blob standard deviation; default 1.
    pub blob_spread: f64,
    /// Micro-cluster size; default 8.
    pub micro_n: usize,
    /// Micro-cluster spread, truncated at three spreads; default 0.1.
    pub micro_spread: f64,
    /// Distance from blob center to micro-cluster center, in blob
    /// spreads; default 8.
    pub micro_distance: f64,
}

impl Default for MicroClusterParams {
    fn default() -> Self {
        MicroClusterParams {
            blob_n: 200,
            blob_spread: 1.0,
            micro_n: 8,
            micro_spread: 0.1,
            micro_distance: 8.0,
        }
    }
}

/// Scenario D: a dense blob at the origin, a surrounding sparse region
/// built from small clumps, and a single planted point on the positive x
/// axis exactly `planted_distance_factor` dense spreads from the origin.
///
/// The sparse region is clumped rather than one diffuse cloud so that its
/// members keep nearby companions: each clump is far larger than the
/// default small-cluster threshold, which keeps the planted point the
/// only isolated observation. The clumps sit at roughly eight dense
/// spreads on opposite sides of the blob, defining the region's scale,
/// and are soft enough that their internal pair distances dominate the
/// distance histogram, steering the estimated kernel width to a value
/// that frees the planted point without shattering anything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SparseRegionParams {
    /// Dense blob size; default 90.
    pub dense_n: usize,
    /// Dense blob standard deviation; default 1.
    pub dense_spread: f64,
    /// Dense samples stay within this many spreads of the origin, keeping
    /// a clear gap to the planted point; default 1.
    pub dense_trunc: f64,
    /// Number of sparse clumps; default 2.
    pub clump_count: usize,
    /// Points per clump; default 60.
    pub clump_n: usize,
    /// Clump spread; default 0.7.
    pub clump_spread: f64,
    /// Clump samples stay within this many clump spreads of their center,
    /// keeping each clump compact relative to the estimated kernel width;
    /// default 1.5.
    pub clump_trunc: f64,
    /// Clump centers land area-uniformly between these radii (in dense
    /// spreads); defaults 6 and 12.
    pub region_inner: f64,
    pub region_outer: f64,
    /// Minimum distance between clump centers, keeping the clumps on
    /// opposite sides of the region so their distance populations spread
    /// out instead of stacking; default 12.
    pub clump_min_separation: f64,
    /// Minimum distance from each clump center to the planted point;
    /// default 6.
    pub planted_clearance: f64,
    /// Planted point distance from the origin in dense spreads; default 3.
    pub planted_distance_factor: f64,
}

impl Default for SparseRegionParams {
    fn default() -> Self {
        SparseRegionParams {
            dense_n: 90,
            dense_spread: 1.0,
            dense_trunc: 1.0,
            clump_count: 2,
            clump_n: 60,
            clump_spread: 0.7,
            clump_trunc: 1.5,
            region_inner: 6.0,
            region_outer: 12.0,
            clump_min_separation: 12.0,
            planted_clearance: 6.0,
            planted_distance_factor: 3.0,
        }
    }
}

/// Scenario E: an isotropic Gaussian blob with two tight micro-clusters
/// planted just beyond its truncation edge, separated in angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeClusterParams {
    /// Blob size; default 200.
    pub blob_n: usize,
    /// Blob standard deviation; default 1.
    pub blob_spread: f64,
    /// Blob samples stay within this many spreads; default 3.
    pub blob_trunc: f64,
    /// Points per micro-cluster (two clusters are planted); default 10.
    pub cluster_n: usize,
    /// Micro-cluster spread, truncated at three spreads; default 0.08.
    pub cluster_spread: f64,
    /// Micro-cluster center radius in blob spreads; default 4.5.
    pub edge_radius: f64,
    /// Minimum angle between the two cluster centers, radians; default
    /// pi / 2.
    pub min_angle_separation: f64,
}

impl Default for EdgeClusterParams {
    fn default() -> Self {
        EdgeClusterParams {
            blob_n: 200,
            blob_spread: 1.0,
            blob_trunc: 3.0,
            cluster_n: 10,
            cluster_spread: 0.08,
            edge_radius: 4.5,
            min_angle_separation: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Scenario F: a uniform square plate with a circular hole at the center;
/// a few sparse points sit inside the hole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolePlateParams {
    /// Plate size; default 600.
    pub plate_n: usize,
    /// Plate spans `[-half_side, half_side]` on each axis; default 10.
    pub half_side: f64,
    /// Hole radius around the origin; default 3.
    pub hole_radius: f64,
    /// Planted count inside the hole; default 6.
    pub hole_n: usize,
    /// Planted points land in a disk of this fraction of the hole radius,
    /// keeping them clear of the hole wall; default 0.3.
    pub hole_fill: f64,
}

impl Default for HolePlateParams {
    fn default() -> Self {
        HolePlateParams {
            plate_n: 600,
            half_side: 10.0,
            hole_radius: 3.0,
            hole_n: 6,
            hole_fill: 0.3,
        }
    }
}

/// Parameter set for one scenario; the variant selects the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScenarioParams {
    A(StragglerParams),
    B(RingParams),
    C(MicroClusterParams),
    D(SparseRegionParams),
    E(EdgeClusterParams),
    F(HolePlateParams),
}

impl ScenarioParams {
    pub fn id(&self) -> ScenarioId {
        match self {
            ScenarioParams::A(_) => ScenarioId::A,
            ScenarioParams::B(_) => ScenarioId::B,
            ScenarioParams::C(_) => ScenarioId::C,
            ScenarioParams::D(_) => ScenarioId::D,
            ScenarioParams::E(_) => ScenarioId::E,
            ScenarioParams::F(_) => ScenarioId::F,
        }
    }

    /// Builds the parameter set for `id` from a JSON object holding any
    /// subset of that scenario's fields; absent fields keep their
    /// defaults and unknown fields are an error.
    pub fn from_overrides(id: ScenarioId, json: &str) -> Result<ScenarioParams> {
        fn parse<T: for<'de> Deserialize<'de>>(json: &str) -> Result<T> {
            serde_json::from_str(json).map_err(QcError::from)
        }
        Ok(match id {
            ScenarioId::A => ScenarioParams::A(parse(json)?),
            ScenarioId::B => ScenarioParams::B(parse(json)?),
            ScenarioId::C => ScenarioParams::C(parse(json)?),
            ScenarioId::D => ScenarioParams::D(parse(json)?),
            ScenarioId::E => ScenarioParams::E(parse(json)?),
            ScenarioId::F => ScenarioParams::F(parse(json)?),
        })
    }
}

/// A generated benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub dataset: Dataset,
    /// True exactly for planted outlier rows; planted rows come last.
    pub truth: Vec<bool>,
    pub seed: u64,
    pub params: ScenarioParams,
}

impl Scenario {
    /// Number of planted outliers.
    pub fn planted_count(&self) -> usize {
        self.truth.iter().filter(|t| **t).count()
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(QcError::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ));
    }
    Ok(())
}

fn check_count(name: &'static str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(QcError::invalid(name, "must be at least 1"));
    }
    Ok(())
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn finish(
    id: ScenarioId,
    seed: u64,
    params: ScenarioParams,
    normals: Vec<(f64, f64)>,
    planted: Vec<(f64, f64)>,
) -> Result<Scenario> {
    let mut rows = Vec::with_capacity(normals.len() + planted.len());
    let mut truth = Vec::with_capacity(normals.len() + planted.len());
    for p in normals {
        rows.push(vec![p.0, p.1]);
        truth.push(false);
    }
    for p in planted {
        rows.push(vec![p.0, p.1]);
        truth.push(true);
    }
    Ok(Scenario {
        id,
        dataset: Dataset::from_rows(&rows)?,
        truth,
        seed,
        params,
    })
}

fn gen_stragglers(seed: u64, p: &StragglerParams) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    check_count("blob_n", p.blob_n)?;
    check_count("straggler_n", p.straggler_n)?;
    check_positive("blob_spread", p.blob_spread)?;
    check_positive("straggler_radius_min", p.straggler_radius_min)?;
    if !(p.straggler_radius_max >= p.straggler_radius_min) {
        return Err(QcError::invalid(
            "straggler_radius_max",
            "must be at least straggler_radius_min",
        ));
    }
    let mut rng = CounterRng::new(seed);
    let mut normals = Vec::with_capacity(p.blob_n);
    for _ in 0..p.blob_n {
        let (a, b) = rng.gaussian_pair();
        normals.push((a * p.blob_spread, b * p.blob_spread));
    }
    let mut planted = Vec::with_capacity(p.straggler_n);
    for _ in 0..p.straggler_n {
        let r = rng.uniform_in(p.straggler_radius_min, p.straggler_radius_max) * p.blob_spread;
        let theta = 2.0 * std::f64::consts::PI * rng.uniform();
        planted.push((r * theta.cos(), r * theta.sin()));
    }
    for q in &planted {
        assert!(
            dist(*q, (0.0, 0.0)) >= p.straggler_radius_min * p.blob_spread * (1.0 - 1e-12),
            "straggler broke its distance contract"
        );
    }
    Ok((normals, planted))
}

fn gen_ring(seed: u64, p: &RingParams) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    check_count("ring_n", p.ring_n)?;
    check_count("core_n", p.core_n)?;
    check_positive("ring_radius", p.ring_radius)?;
    check_positive("ring_width", p.ring_width)?;
    check_positive("core_radius", p.core_radius)?;
    if p.core_radius + 3.0 * p.ring_width >= p.ring_radius {
        return Err(QcError::invalid(
            "core_radius",
            "interior disk must stay clear of the ring band",
        ));
    }
    let mut rng = CounterRng::new(seed);
    let mut normals = Vec::with_capacity(p.ring_n);
    for _ in 0..p.ring_n {
        let theta = 2.0 * std::f64::consts::PI * rng.uniform();
        let mut offset = rng.gaussian();
        while offset.abs() > 3.0 {
            offset = rng.gaussian();
        }
        let r = p.ring_radius + offset * p.ring_width;
        normals.push((r * theta.cos(), r * theta.sin()));
    }
    let mut planted = Vec::with_capacity(p.core_n);
    for _ in 0..p.core_n {
        planted.push(rng.in_disk(p.core_radius));
    }
    Ok((normals, planted))
}

fn gen_micro(seed: u64, p: &MicroClusterParams) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    check_count("blob_n", p.blob_n)?;
    check_count("micro_n", p.micro_n)?;
    check_positive("blob_spread", p.blob_spread)?;
    check_positive("micro_spread", p.micro_spread)?;
    check_positive("micro_distance", p.micro_distance)?;
    let mut rng = CounterRng::new(seed);
    let mut normals = Vec::with_capacity(p.blob_n);
    for _ in 0..p.blob_n {
        let (a, b) = rng.gaussian_pair();
        normals.push((a * p.blob_spread, b * p.blob_spread));
    }
    let theta = 2.0 * std::f64::consts::PI * rng.uniform();
    let distance = p.micro_distance * p.blob_spread;
    let center = (distance * theta.cos(), distance * theta.sin());
    let mut planted = Vec::with_capacity(p.micro_n);
    for _ in 0..p.micro_n {
        let (a, b) = rng.gaussian_pair_trunc(3.0);
        planted.push((center.0 + a * p.micro_spread, center.1 + b * p.micro_spread));
    }
    for q in &planted {
        assert!(
            dist(*q, (0.0, 0.0)) >= distance - 3.0 * p.micro_spread - 1e-9,
            "micro-cluster point broke its distance contract"
        );
    }
    Ok((normals, planted))
}

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

fn gen_sparse_region(
    seed: u64,
    p: &SparseRegionParams,
) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    check_count("dense_n", p.dense_n)?;
    check_count("clump_count", p.clump_count)?;
    check_count("clump_n", p.clump_n)?;
    check_positive("dense_spread", p.dense_spread)?;
    check_positive("dense_trunc", p.dense_trunc)?;
    check_positive("clump_spread", p.clump_spread)?;
    check_positive("clump_trunc", p.clump_trunc)?;
    check_positive("region_inner", p.region_inner)?;
    check_positive("clump_min_separation", p.clump_min_separation)?;
    check_positive("planted_clearance", p.planted_clearance)?;
    check_positive("planted_distance_factor", p.planted_distance_factor)?;
    if !(p.region_outer > p.region_inner) {
        return Err(QcError::invalid(
            "region_outer",
            "must exceed region_inner",
        ));
    }
    if p.planted_distance_factor <= p.dense_trunc {
        return Err(QcError::invalid(
            "planted_distance_factor",
            "must exceed dense_trunc or the planted point lands inside the blob",
        ));
    }

    let s = p.dense_spread;
    let planted_point = (p.planted_distance_factor * s, 0.0);

    let mut rng = CounterRng::new(seed);
    let mut normals = Vec::new();
    for _ in 0..p.dense_n {
        let (a, b) = rng.gaussian_pair_trunc(p.dense_trunc);
        normals.push((a * s, b * s));
    }

    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(p.clump_count);
    let mut attempts = 0;
    while centers.len() < p.clump_count {
        attempts += 1;
        if attempts > MAX_PLACEMENT_ATTEMPTS {
            return Err(QcError::invalid(
                "clump_count",
                "annulus too crowded for the requested clump separation and clearance",
            ));
        }
        let c = rng.in_annulus(p.region_inner * s, p.region_outer * s);
        if dist(c, planted_point) < p.planted_clearance * s {
            continue;
        }
        if centers
            .iter()
            .all(|e| dist(c, *e) >= p.clump_min_separation * s)
        {
            centers.push(c);
        }
    }
    for c in &centers {
        for _ in 0..p.clump_n {
            let (a, b) = rng.gaussian_pair_trunc(p.clump_trunc);
            normals.push((c.0 + a * p.clump_spread, c.1 + b * p.clump_spread));
        }
    }

    let planted = vec![planted_point];
    let clearance = p.planted_clearance * s - p.clump_trunc * p.clump_spread;
    let gap = (p.planted_distance_factor - p.dense_trunc) * s;
    for q in &normals {
        assert!(
            dist(*q, planted_point) >= gap.min(clearance) - 1e-9,
            "normal point broke the planted clearance contract"
        );
    }
    Ok((normals, planted))
}

fn gen_edge_clusters(
    seed: u64,
    p: &EdgeClusterParams,
) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    check_count("blob_n", p.blob_n)?;
    check_count("cluster_n", p.cluster_n)?;
    check_positive("blob_spread", p.blob_spread)?;
    check_positive("blob_trunc", p.blob_trunc)?;
    check_positive("cluster_spread", p.cluster_spread)?;
    check_positive("edge_radius", p.edge_radius)?;
    if !(p.min_angle_separation > 0.0 && p.min_angle_separation <= std::f64::consts::PI) {
        return Err(QcError::invalid(
            "min_angle_separation",
            "must lie in (0, pi]",
        ));
    }
    if p.edge_radius <= p.blob_trunc {
        return Err(QcError::invalid(
            "edge_radius",
            "must exceed blob_trunc so the clusters sit outside the blob",
        ));
    }
    let mut rng = CounterRng::new(seed);
    let mut normals = Vec::with_capacity(p.blob_n);
    for _ in 0..p.blob_n {
        let (a, b) = rng.gaussian_pair_trunc(p.blob_trunc);
        normals.push((a * p.blob_spread, b * p.blob_spread));
    }
    let theta1 = 2.0 * std::f64::consts::PI * rng.uniform();
    let mut attempts = 0;
    let theta2 = loop {
        attempts += 1;
        if attempts > MAX_PLACEMENT_ATTEMPTS {
            return Err(QcError::invalid(
                "min_angle_separation",
                "no angle satisfies the requested separation",
            ));
        }
        let t = 2.0 * std::f64::consts::PI * rng.uniform();
        let mut delta = (t - theta1).abs() % (2.0 * std::f64::consts::PI);
        if delta > std::f64::consts::PI {
            delta = 2.0 * std::f64::consts::PI - delta;
        }
        if delta >= p.min_angle_separation {
            break t;
        }
    };
    let radius = p.edge_radius * p.blob_spread;
    let mut planted = Vec::with_capacity(2 * p.cluster_n);
    for theta in [theta1, theta2] {
        let center = (radius * theta.cos(), radius * theta.sin());
        for _ in 0..p.cluster_n {
            let (a, b) = rng.gaussian_pair_trunc(3.0);
            planted.push((
                center.0 + a * p.cluster_spread,
                center.1 + b * p.cluster_spread,
            ));
        }
    }
    Ok((normals, planted))
}

fn gen_hole_plate(seed: u64, p: &HolePlateParams) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    check_count("plate_n", p.plate_n)?;
    check_count("hole_n", p.hole_n)?;
    check_positive("half_side", p.half_side)?;
    check_positive("hole_radius", p.hole_radius)?;
    if !(p.hole_fill > 0.0 && p.hole_fill < 1.0) {
        return Err(QcError::invalid("hole_fill", "must lie in (0, 1)"));
    }
    if p.hole_radius >= p.half_side {
        return Err(QcError::invalid(
            "hole_radius",
            "must be smaller than half_side",
        ));
    }
    let mut rng = CounterRng::new(seed);
    let mut normals = Vec::with_capacity(p.plate_n);
    let mut attempts = 0;
    while normals.len() < p.plate_n {
        attempts += 1;
        if attempts > MAX_PLACEMENT_ATTEMPTS.max(100 * p.plate_n) {
            return Err(QcError::invalid(
                "hole_radius",
                "hole leaves too little plate area to fill",
            ));
        }
        let x = rng.uniform_in(-p.half_side, p.half_side);
        let y = rng.uniform_in(-p.half_side, p.half_side);
        if x * x + y * y > p.hole_radius * p.hole_radius {
            normals.push((x, y));
        }
    }
    let mut planted = Vec::with_capacity(p.hole_n);
    for _ in 0..p.hole_n {
        planted.push(rng.in_disk(p.hole_fill * p.hole_radius));
    }
    Ok((normals, planted))
}

/// Generates one scenario instance. The same `(id, seed, params)` triple
/// always yields a bitwise-identical dataset; `params` must carry the
/// variant matching `id`.
pub fn generate(id: ScenarioId, seed: u64, params: &ScenarioParams) -> Result<Scenario> {
    if params.id() != id {
        return Err(QcError::invalid(
            "params",
            format!("parameter set is for scenario {}, not {id}", params.id()),
        ));
    }
    let (normals, planted) = match params {
        ScenarioParams::A(p) => gen_stragglers(seed, p)?,
        ScenarioParams::B(p) => gen_ring(seed, p)?,
        ScenarioParams::C(p) => gen_micro(seed, p)?,
        ScenarioParams::D(p) => gen_sparse_region(seed, p)?,
        ScenarioParams::E(p) => gen_edge_clusters(seed, p)?,
        ScenarioParams::F(p) => gen_hole_plate(seed, p)?,
    };
    finish(id, seed, *params, normals, planted)
}

/// [`generate`] with the scenario's documented default parameters.
pub fn generate_default(id: ScenarioId, seed: u64) -> Result<Scenario> {
    generate(id, seed, &id.default_params())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_rng_matches_published_sequence() {
        // First outputs of the splitmix64 stream for seed 0.
        let mut rng = CounterRng::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn counter_rng_streams_are_reproducible_and_seed_sensitive() {
        let a: Vec<u64> = {
            let mut rng = CounterRng::new(99);
            (0..64).map(|_| rng.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut rng = CounterRng::new(99);
            (0..64).map(|_| rng.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut rng = CounterRng::new(100);
            (0..64).map(|_| rng.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_draws_stay_in_unit_interval() {
        let mut rng = CounterRng::new(7);
        let mut sum = 0.0;
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn gaussian_moments_are_standard() {
        let mut rng = CounterRng::new(13);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = rng.gaussian();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn disk_draws_respect_radius() {
        let mut rng = CounterRng::new(29);
        let mut inner = 0usize;
        for _ in 0..4_000 {
            let (x, y) = rng.in_disk(2.0);
            let r = (x * x + y * y).sqrt();
            assert!(r <= 2.0);
            if r <= 2.0 * 0.5f64.sqrt() {
                inner += 1;
            }
        }
        // Area-uniform: the radius enclosing half the area holds half the
        // draws.
        let frac = inner as f64 / 4_000.0;
        assert!((frac - 0.5).abs() < 0.05, "inner fraction {frac}");
    }

    #[test]
    fn scenarios_have_documented_shape() {
        let expect = [
            (ScenarioId::A, 205, 5),
            (ScenarioId::B, 204, 4),
            (ScenarioId::C, 208, 8),
            (ScenarioId::D, 211, 1),
            (ScenarioId::E, 220, 20),
            (ScenarioId::F, 606, 6),
        ];
        for (id, n, planted) in expect {
            let sc = generate_default(id, 0).unwrap();
            assert_eq!(sc.dataset.n(), n, "scenario {id}");
            assert_eq!(sc.dataset.d(), 2, "scenario {id}");
            assert_eq!(sc.truth.len(), n, "scenario {id}");
            assert_eq!(sc.planted_count(), planted, "scenario {id}");
            // Planted rows come last.
            for (i, t) in sc.truth.iter().enumerate() {
                assert_eq!(*t, i >= n - planted, "scenario {id} row {i}");
            }
            assert_eq!(sc.id, id);
            assert_eq!(sc.seed, 0);
        }
    }

    #[test]
    fn generation_is_bitwise_reproducible() {
        for id in ScenarioId::ALL {
            let a = generate_default(id, 31).unwrap();
            let b = generate_default(id, 31).unwrap();
            assert_eq!(a.dataset.points(), b.dataset.points(), "scenario {id}");
            assert_eq!(a.truth, b.truth);
            let c = generate_default(id, 32).unwrap();
            assert_ne!(a.dataset.points(), c.dataset.points(), "scenario {id}");
        }
    }

    #[test]
    fn straggler_scenario_separation() {
        for seed in 0..10 {
            let sc = generate_default(ScenarioId::A, seed).unwrap();
            let pts = sc.dataset.points();
            for (i, t) in sc.truth.iter().enumerate() {
                let r = (pts[[i, 0]].powi(2) + pts[[i, 1]].powi(2)).sqrt();
                if *t {
                    assert!((6.0..=10.0).contains(&r), "seed {seed} straggler radius {r}");
                }
            }
        }
    }

    #[test]
    fn ring_scenario_band_and_core() {
        let sc = generate_default(ScenarioId::B, 3).unwrap();
        let pts = sc.dataset.points();
        for (i, t) in sc.truth.iter().enumerate() {
            let r = (pts[[i, 0]].powi(2) + pts[[i, 1]].powi(2)).sqrt();
            if *t {
                assert!(r <= 2.0, "core point at radius {r}");
            } else {
                assert!((6.5..=9.5).contains(&r), "ring point at radius {r}");
            }
        }
    }

    #[test]
    fn micro_scenario_keeps_cluster_tight_and_far() {
        let sc = generate_default(ScenarioId::C, 11).unwrap();
        let pts = sc.dataset.points();
        let planted: Vec<(f64, f64)> = sc
            .truth
            .iter()
            .enumerate()
            .filter(|(_, t)| **t)
            .map(|(i, _)| (pts[[i, 0]], pts[[i, 1]]))
            .collect();
        assert_eq!(planted.len(), 8);
        for a in &planted {
            let r = (a.0 * a.0 + a.1 * a.1).sqrt();
            assert!(r >= 8.0 - 0.3 - 1e-9, "micro point at radius {r}");
            for b in &planted {
                assert!(dist(*a, *b) <= 0.6 + 1e-9);
            }
        }
    }

    #[test]
    fn sparse_region_scenario_contract() {
        for seed in 0..10 {
            let sc = generate_default(ScenarioId::D, seed).unwrap();
            let pts = sc.dataset.points();
            let n = sc.dataset.n();
            // The planted point is exactly (3, 0).
            assert_eq!(pts[[n - 1, 0]], 3.0, "seed {seed}");
            assert_eq!(pts[[n - 1, 1]], 0.0, "seed {seed}");
            assert_eq!(sc.planted_count(), 1);
            // Dense blob inside radius 1, clump members well clear of the
            // planted point and inside the region band.
            for i in 0..90 {
                let r = (pts[[i, 0]].powi(2) + pts[[i, 1]].powi(2)).sqrt();
                assert!(r <= 1.0 + 1e-9, "seed {seed} dense point at {r}");
            }
            for i in 90..(n - 1) {
                let d = dist((pts[[i, 0]], pts[[i, 1]]), (3.0, 0.0));
                assert!(d >= 4.95 - 1e-9, "seed {seed} clump point {d} from planted");
                let r = (pts[[i, 0]].powi(2) + pts[[i, 1]].powi(2)).sqrt();
                assert!((4.95..=13.05 + 1e-9).contains(&r), "seed {seed} clump point at {r}");
            }
            // The two clumps sit on opposite sides: their means are far apart.
            let mean = |lo: usize, hi: usize| {
                let m = (hi - lo) as f64;
                (
                    (lo..hi).map(|i| pts[[i, 0]]).sum::<f64>() / m,
                    (lo..hi).map(|i| pts[[i, 1]]).sum::<f64>() / m,
                )
            };
            assert!(
                dist(mean(90, 150), mean(150, 210)) >= 11.0,
                "seed {seed} clumps too close"
            );
        }
    }

    #[test]
    fn edge_cluster_scenario_contract() {
        for seed in 0..10 {
            let sc = generate_default(ScenarioId::E, seed).unwrap();
            let pts = sc.dataset.points();
            for i in 0..200 {
                let r = (pts[[i, 0]].powi(2) + pts[[i, 1]].powi(2)).sqrt();
                assert!(r <= 3.0 + 1e-9, "seed {seed} blob point at {r}");
            }
            // Each micro-cluster is tight around its center at radius 4.5.
            for base in [200, 210] {
                let cx: f64 = (0..10).map(|j| pts[[base + j, 0]]).sum::<f64>() / 10.0;
                let cy: f64 = (0..10).map(|j| pts[[base + j, 1]]).sum::<f64>() / 10.0;
                let r = (cx * cx + cy * cy).sqrt();
                assert!((r - 4.5).abs() < 0.2, "seed {seed} cluster center radius {r}");
                for j in 0..10 {
                    let d = dist((pts[[base + j, 0]], pts[[base + j, 1]]), (cx, cy));
                    assert!(d <= 0.3, "seed {seed} cluster point {d} from center");
                }
            }
            // Centers sit at least sqrt(2) * 4.5 apart for a quarter-turn.
            let c1 = (
                (0..10).map(|j| pts[[200 + j, 0]]).sum::<f64>() / 10.0,
                (0..10).map(|j| pts[[200 + j, 1]]).sum::<f64>() / 10.0,
            );
            let c2 = (
                (0..10).map(|j| pts[[210 + j, 0]]).sum::<f64>() / 10.0,
                (0..10).map(|j| pts[[210 + j, 1]]).sum::<f64>() / 10.0,
            );
            assert!(dist(c1, c2) >= 4.5 * std::f64::consts::SQRT_2 - 0.5, "seed {seed}");
        }
    }

    #[test]
    fn hole_plate_scenario_contract() {
        let sc = generate_default(ScenarioId::F, 17).unwrap();
        let pts = sc.dataset.points();
        for (i, t) in sc.truth.iter().enumerate() {
            let r = (pts[[i, 0]].powi(2) + pts[[i, 1]].powi(2)).sqrt();
            if *t {
                assert!(r <= 0.9 + 1e-9, "hole point at radius {r}");
            } else {
                assert!(r > 3.0, "plate point inside the hole at {r}");
                assert!(pts[[i, 0]].abs() <= 10.0 && pts[[i, 1]].abs() <= 10.0);
            }
        }
    }

    #[test]
    fn overrides_merge_with_defaults() {
        let p = ScenarioParams::from_overrides(ScenarioId::A, r#"{"blob_n": 50}"#).unwrap();
        match p {
            ScenarioParams::A(sp) => {
                assert_eq!(sp.blob_n, 50);
                assert_eq!(sp.straggler_n, 5);
                assert_eq!(sp.blob_spread, 1.0);
            }
            _ => panic!("wrong variant"),
        }
        let sc = generate(ScenarioId::A, 1, &p).unwrap();
        assert_eq!(sc.dataset.n(), 55);

        assert!(ScenarioParams::from_overrides(ScenarioId::A, r#"{"bogus": 1}"#).is_err());
        assert!(ScenarioParams::from_overrides(ScenarioId::F, r#"{"blob_n": 5}"#).is_err());
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let p = ScenarioId::A.default_params();
        assert!(generate(ScenarioId::B, 0, &p).is_err());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = ScenarioParams::A(StragglerParams {
            blob_n: 0,
            ..StragglerParams::default()
        });
        assert!(generate(ScenarioId::A, 0, &bad).is_err());

        let bad = ScenarioParams::A(StragglerParams {
            straggler_radius_max: 2.0,
            ..StragglerParams::default()
        });
        assert!(generate(ScenarioId::A, 0, &bad).is_err());

        let bad = ScenarioParams::D(SparseRegionParams {
            region_outer: 5.0,
            ..SparseRegionParams::default()
        });
        assert!(generate(ScenarioId::D, 0, &bad).is_err());

        let bad = ScenarioParams::D(SparseRegionParams {
            clump_min_separation: 40.0,
            ..SparseRegionParams::default()
        });
        assert!(generate(ScenarioId::D, 0, &bad).is_err());

        let bad = ScenarioParams::E(EdgeClusterParams {
            edge_radius: 2.0,
            ..EdgeClusterParams::default()
        });
        assert!(generate(ScenarioId::E, 0, &bad).is_err());

        let bad = ScenarioParams::F(HolePlateParams {
            hole_radius: 20.0,
            ..HolePlateParams::default()
        });
        assert!(generate(ScenarioId::F, 0, &bad).is_err());
    }

    #[test]
    fn scenario_id_parses_case_insensitively() {
        assert_eq!("a".parse::<ScenarioId>().unwrap(), ScenarioId::A);
        assert_eq!(" F ".parse::<ScenarioId>().unwrap(), ScenarioId::F);
        assert!("G".parse::<ScenarioId>().is_err());
        assert_eq!(ScenarioId::C.to_string(), "C");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

            #[test]
            fn any_seed_generates_consistent_scenarios(seed in 0u64..1_000_000) {
                for id in ScenarioId::ALL {
                    let sc = generate_default(id, seed).unwrap();
                    prop_assert_eq!(sc.dataset.n(), sc.truth.len());
                    prop_assert!(sc.planted_count() > 0);
                    prop_assert!(sc.dataset.points().iter().all(|v| v.is_finite()));
                }
            }
        }
    }
}
