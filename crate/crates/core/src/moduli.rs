//! Monte-Carlo witnesses for the geometry of `‖·‖_{r(H)}`.
//!
//! Block-random kernels from `𝕌(n, 𝒟)` concentrate: `t(H, U) → 𝔼[𝒟]^{e(H)}`.
//! Normalising two independent draws `U_1, U_2 ~ 𝕌(n, 𝒟_1)` gives unit
//! vectors `x = U_1/‖U_1‖`, `y = U_2/‖U_2‖` whose midpoint deficiency tends to
//! `0` while `‖x − y‖ → 1`, and whose smoothness expression with `εy` tends
//! to `ε/2`. Each estimate stores the kernels it was computed from, so it can
//! be re-evaluated exactly.
//!
//! "Tends to" is operationalised as a median over seeds, a strictly
//! decreasing trend along a doubling `n` grid, and an absolute tolerance at
//! the largest `n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{density, norm_rh};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{DiracMixture, SpecialKernelSpec, StepKernel};
use crate::seeds::derive_seed;

/// Draws tried before giving up on a nonzero block-random kernel.
pub const MAX_RESAMPLES: u64 = 32;
/// Default absolute tolerance at the largest `n`.
pub const DEFAULT_TOLERANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusKind {
    /// `1 − ‖(x+y)/2‖` for unit `x, y`: bounds `𝔡(ε)` above once `‖x−y‖ ≥ ε`.
    ConvexityUpperBound,
    /// `½(‖x+y‖ + ‖x−y‖ − 2)` for `‖x‖ = 1`, `‖y‖ = ε`: bounds `𝔰(ε)` below.
    SmoothnessLowerBound,
}

impl ModulusKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ModulusKind::ConvexityUpperBound => "convexity",
            ModulusKind::SmoothnessLowerBound => "smoothness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub h: Graph,
    pub kind: ModulusKind,
    pub epsilon: f64,
    pub n: usize,
    pub seed: u64,
    pub value: f64,
    /// `‖x − y‖`; the convexity bound applies only when this is at least `ε`.
    pub distance: f64,
    /// `[x, y]`, with `‖x‖ = 1` and `‖y‖ = 1` (convexity) or `ε` (smoothness).
    pub witnesses: [StepKernel; 2],
}

impl ModulusEstimate {
    /// Recomputes `(value, distance)` from the stored witnesses.
    pub fn reevaluate(&self) -> Result<(f64, f64)> {
        let [x, y] = &self.witnesses;
        match self.kind {
            ModulusKind::ConvexityUpperBound => convexity_terms(&self.h, x, y),
            ModulusKind::SmoothnessLowerBound => smoothness_terms(&self.h, x, y),
        }
    }

    /// Whether the convexity bound applies (`‖x − y‖ ≥ ε`); always true for
    /// smoothness.
    pub fn applies(&self) -> bool {
        self.kind == ModulusKind::SmoothnessLowerBound || self.distance >= self.epsilon
    }
}

fn convexity_terms(h: &Graph, x: &StepKernel, y: &StepKernel) -> Result<(f64, f64)> {
    let mid = x.add(y)?.scale(0.5)?;
    Ok((1.0 - norm_rh(h, &mid)?, norm_rh(h, &x.sub(y)?)?))
}

fn smoothness_terms(h: &Graph, x: &StepKernel, y: &StepKernel) -> Result<(f64, f64)> {
    let plus = norm_rh(h, &x.add(y)?)?;
    let minus = norm_rh(h, &x.sub(y)?)?;
    Ok((0.5 * (plus + minus - 2.0), minus))
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "epsilon {eps} is outside (0, 1), the range in which the moduli bounds hold"
        )))
    }
}

fn check_graph(h: &Graph) -> Result<()> {
    if h.edge_count() == 0 {
        Err(Error::Precondition("graph needs at least one edge".into()))
    } else {
        Ok(())
    }
}

/// Two independent nonzero draws from `𝕌(n, 𝒟_1)`. Attempt `a` uses child
/// seeds `2a` and `2a + 1` of `seed`.
pub fn sample_pair(h: &Graph, n: usize, seed: u64) -> Result<(StepKernel, StepKernel)> {
    let d1 = DiracMixture::d1();
    for attempt in 0..MAX_RESAMPLES {
        let u1 = StepKernel::sample_block_random(n, &d1, derive_seed(seed, 2 * attempt))?;
        let u2 = StepKernel::sample_block_random(n, &d1, derive_seed(seed, 2 * attempt + 1))?;
        if norm_rh(h, &u1)? > 0.0 && norm_rh(h, &u2)? > 0.0 {
            return Ok((u1, u2));
        }
    }
    Err(Error::Sampling(format!(
        "no pair with nonzero norms after {MAX_RESAMPLES} draws at n = {n}"
    )))
}

/// `U / ‖U‖_{r(H)}`, dividing by the computed norm.
pub fn normalize(h: &Graph, u: &StepKernel) -> Result<StepKernel> {
    let norm = norm_rh(h, u)?;
    if norm == 0.0 {
        return Err(Error::Precondition("cannot normalise a kernel of norm zero".into()));
    }
    u.scale(1.0 / norm)
}

/// Convexity estimate from a given pair of kernels.
pub fn convexity_from_pair(
    h: &Graph,
    u1: &StepKernel,
    u2: &StepKernel,
    epsilon: f64,
    seed: u64,
) -> Result<ModulusEstimate> {
    check_epsilon(epsilon)?;
    check_graph(h)?;
    let x = normalize(h, u1)?;
    let y = normalize(h, u2)?;
    let (value, distance) = convexity_terms(h, &x, &y)?;
    Ok(ModulusEstimate {
        h: h.clone(),
        kind: ModulusKind::ConvexityUpperBound,
        epsilon,
        n: u1.parts(),
        seed,
        value,
        distance,
        witnesses: [x, y],
    })
}

/// Smoothness estimate from a given pair of kernels.
pub fn smoothness_from_pair(
    h: &Graph,
    u1: &StepKernel,
    u2: &StepKernel,
    epsilon: f64,
    seed: u64,
) -> Result<ModulusEstimate> {
    check_epsilon(epsilon)?;
    check_graph(h)?;
    let x = normalize(h, u1)?;
    let y = normalize(h, u2)?.scale(epsilon)?;
    let (value, distance) = smoothness_terms(h, &x, &y)?;
    Ok(ModulusEstimate {
        h: h.clone(),
        kind: ModulusKind::SmoothnessLowerBound,
        epsilon,
        n: u1.parts(),
        seed,
        value,
        distance,
        witnesses: [x, y],
    })
}

/// Midpoint deficiency of two normalised draws from `𝕌(n, 𝒟_1)`.
pub fn convexity_witness(h: &Graph, epsilon: f64, n: usize, seed: u64) -> Result<ModulusEstimate> {
    check_epsilon(epsilon)?;
    check_graph(h)?;
    let (u1, u2) = sample_pair(h, n, seed)?;
    convexity_from_pair(h, &u1, &u2, epsilon, seed)
}

/// Smoothness expression for `x = U_1/‖U_1‖` and `y = εU_2/‖U_2‖`.
pub fn smoothness_witness(h: &Graph, epsilon: f64, n: usize, seed: u64) -> Result<ModulusEstimate> {
    check_epsilon(epsilon)?;
    check_graph(h)?;
    let (u1, u2) = sample_pair(h, n, seed)?;
    smoothness_from_pair(h, &u1, &u2, epsilon, seed)
}

/// `‖x + y‖ − ‖x‖ − ‖y‖`; positive values contradict the triangle inequality.
pub fn triangle_excess(h: &Graph, x: &StepKernel, y: &StepKernel) -> Result<f64> {
    Ok(norm_rh(h, &x.add(y)?)? - norm_rh(h, x)? - norm_rh(h, y)?)
}

/// Runs the witness for every `(ε, n, seed)` cell, ordered by `ε`, then `n`,
/// then seed.
pub fn modulus_scan(
    h: &Graph,
    kind: ModulusKind,
    eps_grid: &[f64],
    n_grid: &[usize],
    seeds: &[u64],
) -> Result<Vec<ModulusEstimate>> {
    check_graph(h)?;
    for &eps in eps_grid {
        check_epsilon(eps)?;
    }
    let cells: Vec<(f64, usize, u64)> = eps_grid
        .iter()
        .flat_map(|&e| n_grid.iter().flat_map(move |&n| seeds.iter().map(move |&s| (e, n, s))))
        .collect();
    cells
        .into_par_iter()
        .map(|(eps, n, seed)| match kind {
            ModulusKind::ConvexityUpperBound => convexity_witness(h, eps, n, seed),
            ModulusKind::SmoothnessLowerBound => smoothness_witness(h, eps, n, seed),
        })
        .collect()
}

/// Median over the seeds of one `(ε, n)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub epsilon: f64,
    pub n: usize,
    pub median_value: f64,
    pub median_distance: f64,
    pub count: usize,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Groups a scan by `(ε, n)` in first-appearance order.
pub fn summarize(estimates: &[ModulusEstimate]) -> Vec<CellSummary> {
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for e in estimates {
        if !keys.contains(&(e.epsilon, e.n)) {
            keys.push((e.epsilon, e.n));
        }
    }
    keys.into_iter()
        .map(|(epsilon, n)| {
            let cell: Vec<&ModulusEstimate> =
                estimates.iter().filter(|e| e.epsilon == epsilon && e.n == n).collect();
            let values: Vec<f64> = cell.iter().map(|e| e.value).collect();
            let distances: Vec<f64> = cell.iter().map(|e| e.distance).collect();
            CellSummary {
                epsilon,
                n,
                median_value: median(&values),
                median_distance: median(&distances),
                count: cell.len(),
            }
        })
        .collect()
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Deviation statistics at one `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub deviations: Vec<f64>,
}

/// Concentration of `t(H, U)` around `𝔼[𝒟]^{e(H)}` along an `n` grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub h: Graph,
    pub distribution: DiracMixture,
    pub limit: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub stats: Vec<DeviationStats>,
    pub tolerance: f64,
    pub monotone: bool,
    pub within_tolerance: bool,
    pub pass: bool,
}

fn deviation_stats(h: &Graph, n: usize, d: &DiracMixture, trials: usize, seed: u64) -> Result<DeviationStats> {
    let limit = d.mean().powi(h.edge_count() as i32);
    let deviations = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let u = StepKernel::sample_block_random(n, d, seed.wrapping_add(i))?;
            Ok((density(h, &u) - limit).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DeviationStats {
        n,
        mean: deviations.iter().sum::<f64>() / trials as f64,
        median: median(&deviations),
        max: deviations.iter().copied().fold(0.0, f64::max),
        deviations,
    })
}

/// `|t(H, U) − 𝔼[𝒟]^{e(H)}|` over `trials` draws `U ~ 𝕌(n, 𝒟)` for each
/// `n` in a strictly increasing grid. Trial `i` samples with seed `seed + i`,
/// so a run covers the seeds `seed, …, seed + trials − 1`.
/// Passes when the median strictly decreases along the grid and is at most
/// `tolerance` at the largest `n`.
pub fn concentration_scan(
    h: &Graph,
    n_grid: &[usize],
    d: &DiracMixture,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ExperimentRecord> {
    check_graph(h)?;
    if trials == 0 {
        return Err(Error::Precondition("trials must be positive".into()));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("n grid must be nonempty and strictly increasing".into()));
    }
    let stats = n_grid
        .iter()
        .map(|&n| deviation_stats(h, n, d, trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let medians: Vec<f64> = stats.iter().map(|s| s.median).collect();
    // a point mass has zero deviation everywhere, which is as concentrated as it gets
    let monotone = medians.iter().all(|&m| m == 0.0) || strictly_decreasing(&medians);
    let within_tolerance = stats.last().is_some_and(|s| s.median <= tolerance);
    Ok(ExperimentRecord {
        h: h.clone(),
        distribution: d.clone(),
        limit: d.mean().powi(h.edge_count() as i32),
        n_grid: n_grid.to_vec(),
        trials,
        seed,
        stats,
        tolerance,
        monotone,
        within_tolerance,
        pass: monotone && within_tolerance,
    })
}

/// Single-`n` form of [`concentration_scan`].
pub fn concentration_check(
    h: &Graph,
    n: usize,
    d: &DiracMixture,
    trials: usize,
    seed: u64,
) -> Result<ExperimentRecord> {
    concentration_scan(h, &[n], d, trials, seed, DEFAULT_TOLERANCE)
}

/// `t(H, W_{v/e, a})` against `Σ a_i^{e(H)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub h: Graph,
    pub a: Vec<f64>,
    pub gamma: f64,
    pub density: f64,
    pub power_sum: f64,
    pub relative_error: f64,
    pub holds: bool,
}

/// Tolerance for the embedding identity.
pub const EMBEDDING_TOLERANCE: f64 = 1e-10;

fn embedding_values(h: &Graph, a: &[f64]) -> Result<(f64, f64)> {
    let gamma = h.vertex_count() as f64 / h.edge_count() as f64;
    let w = StepKernel::special(&SpecialKernelSpec::new(gamma, a.to_vec())?);
    Ok((gamma, density(h, &w)))
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Checks `t(H, W_{v/e, a}) = Σ_i a_i^{e(H)}` for connected `H`: every
/// homomorphism with nonzero weight maps `H` into a single diagonal block.
pub fn lp_embedding_check(h: &Graph, a: &[f64]) -> Result<EmbeddingReport> {
    check_graph(h)?;
    if h.has_isolated_vertices() {
        return Err(Error::Precondition("remove isolated vertices first".into()));
    }
    if !h.is_connected() {
        return Err(Error::Precondition(
            "the identity needs a connected graph; use lp_embedding_contrast for disconnected ones".into(),
        ));
    }
    let (gamma, t) = embedding_values(h, a)?;
    let power_sum: f64 = a.iter().map(|x| x.powi(h.edge_count() as i32)).sum();
    let err = relative_error(t, power_sum);
    Ok(EmbeddingReport {
        h: h.clone(),
        a: a.to_vec(),
        gamma,
        density: t,
        power_sum,
        relative_error: err,
        holds: err <= EMBEDDING_TOLERANCE,
    })
}

/// The same kernel on `H ⊔ H`: density `(Σ a_i^m)^2` against `Σ a_i^{2m}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingContrast {
    pub h: Graph,
    pub a: Vec<f64>,
    pub density: f64,
    pub power_sum: f64,
    /// `max / min` of the two values (`∞` when exactly one is zero).
    pub factor: f64,
}

pub fn lp_embedding_contrast(h: &Graph, a: &[f64]) -> Result<EmbeddingContrast> {
    check_graph(h)?;
    let doubled = h.remove_isolated_vertices().copies(2);
    let (_, t) = embedding_values(&doubled, a)?;
    let power_sum: f64 = a.iter().map(|x| x.powi(doubled.edge_count() as i32)).sum();
    let (hi, lo) = (t.abs().max(power_sum.abs()), t.abs().min(power_sum.abs()));
    let factor = if hi == lo { 1.0 } else if lo == 0.0 { f64::INFINITY } else { hi / lo };
    Ok(EmbeddingContrast {
        h: h.clone(),
        a: a.to_vec(),
        density: t,
        power_sum,
        factor,
    })
}
