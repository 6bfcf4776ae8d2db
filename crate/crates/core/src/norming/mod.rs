//! Necessary conditions for the weakly norming and seminorming properties,
//! and certificates that refute them.
//!
//! All checks are one-sided. A failed check carries a [`Certificate`] that can
//! be re-validated from its payload alone; a passed check only means no
//! counterexample was found. Nothing here ever claims a graph *is* norming.

mod certificate;
mod search;

pub use certificate::{Certificate, CertificateCheck};
pub use search::{distinguishing_kernel_search, holder_search, Distinguisher, DISTINGUISH_GAP};

use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::density::{
    decorated_density, decorated_density_exact, density, density_exact, rational_pow, Decoration,
};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, find_subgraph_embedding, Graph};
use crate::kernel::{SpecialKernelSpec, StepKernel};

/// Relative margin a certificate must exceed on re-validation.
pub const CERTIFICATE_MARGIN: f64 = 1e-9;
/// Relative margin a search hit must exceed to be reported.
pub const SEARCH_MARGIN: f64 = 1e-6;
/// Default cap on subgraph size for the average-degree check.
pub const DEFAULT_SUBGRAPH_CAP: usize = 8;

/// Which Hölder characterisation is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Weakly norming: non-negative decorations, `∏ t(H, W_e)`.
    Weak,
    /// Seminorming: signed decorations, `∏ |t(H, W_e)|`.
    Semi,
}

/// Both sides of `t(H, w)^{e(H)} ≤ ∏_e t(H, W_e)` (or `∏ |t(H, W_e)|`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub mode: Mode,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `+∞` when `rhs = 0 < lhs`.
    pub ratio: f64,
    pub decoration: Decoration,
}

impl HolderReport {
    pub fn violates(&self, margin: f64) -> bool {
        self.ratio > 1.0 + margin
    }
}

pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else if lhs == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Relative amount by which `lhs` exceeds `rhs`.
pub(crate) fn relative_excess(lhs: f64, rhs: f64) -> f64 {
    ratio(lhs, rhs) - 1.0
}

/// Densities of `H` in each distinct kernel of `d`, one entry per edge.
fn edge_densities(d: &Decoration) -> Vec<f64> {
    let h = d.host();
    let mut cache: Vec<(&StepKernel, f64)> = Vec::new();
    d.kernels()
        .iter()
        .map(|w| match cache.iter().find(|(k, _)| *k == w) {
            Some(&(_, t)) => t,
            None => {
                let t = density(h, w);
                cache.push((w, t));
                t
            }
        })
        .collect()
}

/// `(lhs, rhs, lhs/rhs)` of the Hölder inequality. When a side under- or
/// overflows, the ratio is formed in log space instead.
pub(crate) fn holder_sides(d: &Decoration, mode: Mode) -> (f64, f64, f64) {
    let m = d.host().edge_count();
    let t = decorated_density(d);
    let factors: Vec<f64> = edge_densities(d)
        .into_iter()
        .map(|x| if mode == Mode::Semi { x.abs() } else { x })
        .collect();
    let lhs = t.powi(m as i32);
    let rhs: f64 = factors.iter().product();
    let ratio = if factors.contains(&0.0) || t == 0.0 {
        ratio(lhs, if factors.contains(&0.0) { 0.0 } else { rhs })
    } else if lhs.is_normal() && rhs.is_normal() {
        lhs / rhs
    } else {
        let log = m as f64 * t.abs().ln() - factors.iter().map(|x| x.abs().ln()).sum::<f64>();
        let odd_factors = factors.iter().filter(|&&x| x < 0.0).count() % 2 == 1;
        let negative = (t < 0.0 && m % 2 == 1) != odd_factors;
        if negative { -log.exp() } else { log.exp() }
    };
    (lhs, rhs, ratio)
}

/// Both sides in exact rational arithmetic on the stored binary values.
pub(crate) fn holder_sides_exact(d: &Decoration, mode: Mode) -> (BigRational, BigRational) {
    let h = d.host();
    let lhs = rational_pow(&decorated_density_exact(d), h.edge_count());
    let mut cache: Vec<(&StepKernel, BigRational)> = Vec::new();
    let mut rhs = BigRational::one();
    for w in d.kernels() {
        let t = match cache.iter().find(|(k, _)| *k == w) {
            Some((_, t)) => t.clone(),
            None => {
                let t = density_exact(h, w);
                cache.push((w, t.clone()));
                t
            }
        };
        rhs *= if mode == Mode::Semi { t.abs() } else { t };
    }
    (lhs, rhs)
}

/// Evaluates both sides of the Hölder inequality for `d` on `h`.
pub fn holder_check(h: &Graph, d: &Decoration, mode: Mode) -> Result<HolderReport> {
    if d.host() != h {
        return Err(Error::Precondition("decoration is for a different graph".into()));
    }
    if mode == Mode::Weak && !d.all_nonnegative() {
        return Err(Error::Precondition(
            "weak mode needs non-negative kernels on every edge".into(),
        ));
    }
    let (lhs, rhs, ratio) = holder_sides(d, mode);
    Ok(HolderReport {
        mode,
        lhs,
        rhs,
        ratio,
        decoration: d.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// One named check inside a [`Verdict`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    pub evidence: String,
    /// Reported for context only; does not enter the overall verdict.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl CheckEntry {
    fn new(name: &str, status: CheckStatus, evidence: String) -> Self {
        CheckEntry {
            name: name.into(),
            status,
            evidence,
            informational: false,
            certificate: None,
        }
    }

    fn with_certificate(mut self, certificate: Option<Certificate>) -> Self {
        self.certificate = certificate;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    /// Every check passed and the search found nothing.
    Consistent,
    /// At least one certificate refutes the property.
    Refuted,
    /// Some check failed without a certificate, or the graph has no edges.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub graph: Graph,
    pub mode: Mode,
    pub subgraph_cap: usize,
    pub search_trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckEntry>,
    pub overall: Overall,
}

impl Verdict {
    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.checks.iter().filter_map(|c| c.certificate.as_ref())
    }
}

/// Search parameters for [`full_verdict`].
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub subgraph_cap: usize,
    pub kernel_trials: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            mode: Mode::Weak,
            trials: 1000,
            seed: 0,
            subgraph_cap: DEFAULT_SUBGRAPH_CAP,
            kernel_trials: 1000,
        }
    }
}

fn ratio_string(r: Ratio<u64>) -> String {
    r.to_string()
}

fn combinations(n: usize, r: usize, mut visit: impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, r: usize, buf: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if buf.len() == r {
            visit(buf);
            return;
        }
        for v in start..n {
            if n - v < r - buf.len() {
                break;
            }
            buf.push(v);
            go(v + 1, n, r, buf, visit);
            buf.pop();
        }
    }
    go(0, n, r, &mut Vec::with_capacity(r), &mut visit);
}

/// Checks `e(F)/v(F) ≤ e(H)/v(H)` for every subgraph `F` with at most `cap`
/// vertices.
///
/// It suffices to look at induced subgraphs: adding edges inside a vertex set
/// or dropping isolated vertices only raises `e/v`. A violation comes with a
/// certificate built from the half-square kernel on `E(F)` and `1` elsewhere.
pub fn subgraph_avg_degree_check(h: &Graph, cap: usize) -> Result<CheckEntry> {
    if h.has_isolated_vertices() {
        return Err(Error::Precondition(
            "remove isolated vertices before the subgraph average-degree check".into(),
        ));
    }
    if h.edge_count() == 0 {
        return Err(Error::Precondition("graph has no edges".into()));
    }
    let (eh, vh) = (h.edge_count() as u64, h.vertex_count() as u64);
    let limit = cap.min(h.vertex_count());
    let mut best: Option<(Ratio<u64>, Vec<usize>)> = None;
    for size in 2..=limit {
        combinations(h.vertex_count(), size, |set| {
            let f = h.induced_subgraph(set);
            let ef = f.edge_count() as u64;
            let r = Ratio::new(ef, size as u64);
            // e(F)/v(F) > e(H)/v(H)
            if ef * vh > eh * size as u64 && best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, set.to_vec()));
            }
        });
    }
    let complete = if limit == h.vertex_count() {
        "all subgraphs examined".to_string()
    } else {
        format!("subgraphs with at most {cap} vertices examined")
    };
    let graph_ratio = Ratio::new(eh, vh);
    let Some((_, set)) = best else {
        return Ok(CheckEntry::new(
            "subgraph-average-degree",
            CheckStatus::Pass,
            format!("no subgraph beats e(H)/v(H) = {}; {complete}", ratio_string(graph_ratio)),
        ));
    };
    // keep only the vertices touched by the induced edges
    let induced = h.induced_subgraph(&set);
    let touched: Vec<usize> = set
        .iter()
        .enumerate()
        .filter(|&(i, _)| induced.degree(i) > 0)
        .map(|(_, &v)| v)
        .collect();
    let certificate = Certificate::average_degree(h, &touched)?;
    let f = h.induced_subgraph(&touched);
    Ok(CheckEntry::new(
        "subgraph-average-degree",
        CheckStatus::Fail,
        format!(
            "subgraph on vertices {touched:?} has e(F)/v(F) = {} > e(H)/v(H) = {}",
            ratio_string(Ratio::new(f.edge_count() as u64, f.vertex_count() as u64)),
            ratio_string(graph_ratio)
        ),
    )
    .with_certificate(Some(certificate)))
}

/// The three component-level conditions: equal average degree, equal edge
/// count and pairwise isomorphism of the non-singleton components.
pub fn component_analysis(h: &Graph, kernel_trials: usize, seed: u64) -> Vec<CheckEntry> {
    let h = h.remove_isolated_vertices();
    let comps: Vec<Graph> = h.components().into_iter().map(|c| c.graph).collect();
    let mut entries = Vec::new();

    let degrees: Vec<Ratio<u64>> = comps
        .iter()
        .map(|c| c.average_degree().expect("components are nonempty"))
        .collect();
    let listing = degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
    let degrees_equal = degrees.windows(2).all(|w| w[0] == w[1]);
    if degrees_equal {
        entries.push(CheckEntry::new(
            "component-average-degree",
            CheckStatus::Pass,
            format!("all {} components have average degree {}", comps.len(), listing),
        ));
    } else {
        // the densest component is the offending subgraph
        let comps_full = h.components();
        let densest = comps_full
            .iter()
            .max_by(|a, b| {
                a.graph
                    .average_degree()
                    .unwrap()
                    .cmp(&b.graph.average_degree().unwrap())
                    .then(b.vertices[0].cmp(&a.vertices[0]))
            })
            .expect("at least two components");
        let certificate = Certificate::average_degree(&h, &densest.vertices).ok();
        entries.push(
            CheckEntry::new(
                "component-average-degree",
                CheckStatus::Fail,
                format!("component average degrees differ: {listing}"),
            )
            .with_certificate(certificate),
        );
    }

    let edges: Vec<usize> = comps.iter().map(Graph::edge_count).collect();
    let edges_equal = edges.windows(2).all(|w| w[0] == w[1]);
    if edges_equal {
        entries.push(CheckEntry::new(
            "component-edge-count",
            CheckStatus::Pass,
            format!("all components have {} edges", edges.first().copied().unwrap_or(0)),
        ));
    } else {
        let (certificate, note) = if degrees_equal {
            (edge_mismatch_certificate(&h).ok(), "")
        } else {
            (None, "; no certificate since average degrees already differ")
        };
        entries.push(
            CheckEntry::new(
                "component-edge-count",
                CheckStatus::Fail,
                format!("component edge counts differ: {edges:?}{note}"),
            )
            .with_certificate(certificate),
        );
    }

    let odd = comps
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, c)| are_isomorphic(&comps[0], c).is_none())
        .map(|(i, _)| i);
    match odd {
        None => entries.push(CheckEntry::new(
            "component-isomorphism",
            CheckStatus::Pass,
            format!("all {} components are isomorphic", comps.len()),
        )),
        Some(i) => {
            let certificate = if edges_equal {
                Some(Certificate::component_nonisomorphism(
                    &h,
                    &comps[0],
                    &comps[i],
                    kernel_trials,
                    seed,
                ))
            } else {
                None
            };
            let kernel_note = match &certificate {
                Some(c) if c.has_kernel() => "; a distinguishing kernel witnesses the violated domination",
                Some(_) => "; no distinguishing kernel found within budget, structural witness only",
                None => "; no certificate since edge counts already differ",
            };
            entries.push(
                CheckEntry::new(
                    "component-isomorphism",
                    CheckStatus::Fail,
                    format!("components 0 and {i} are not isomorphic{kernel_note}"),
                )
                .with_certificate(certificate),
            );
        }
    }
    entries
}

/// The Hölder certificate for components with equal average degree but
/// different edge counts: `|W_{γ,c}|` with `c = (1, 1)` on a minimum-edge
/// component, `1` elsewhere.
pub fn edge_mismatch_certificate(h: &Graph) -> Result<Certificate> {
    let h = h.remove_isolated_vertices();
    let comps = h.components();
    if comps.is_empty() {
        return Err(Error::Precondition("graph has no edges".into()));
    }
    let degrees: Vec<_> = comps.iter().map(|c| c.graph.average_degree().unwrap()).collect();
    if degrees.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Precondition(
            "components must share one average degree (they do not)".into(),
        ));
    }
    let edges: Vec<usize> = comps.iter().map(|c| c.graph.edge_count()).collect();
    if edges.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Precondition(
            "components must have at least two distinct edge counts (they are all equal)".into(),
        ));
    }
    let first = comps
        .iter()
        .min_by_key(|c| (c.graph.edge_count(), c.vertices[0]))
        .expect("nonempty");
    Ok(Certificate::edge_count_mismatch(&h, &first.vertices, vec![1.0, 1.0]))
}

/// Builds `|W_{γ,c}|` on the edges inside `vertices` and the constant `1` on
/// the rest, with `γ = v(F)/e(F)` for the component `F` spanned by `vertices`.
pub(crate) fn special_decoration(h: &Graph, vertices: &[usize], c: &[f64]) -> (f64, Decoration) {
    let f = h.induced_subgraph(vertices);
    let gamma = f.vertex_count() as f64 / f.edge_count() as f64;
    let w = StepKernel::special(&SpecialKernelSpec::new(gamma, c.to_vec()).expect("valid spec")).abs();
    let one = StepKernel::constant_on(w.measures().to_vec(), 1.0).expect("valid");
    let inside: Vec<bool> = (0..h.vertex_count()).map(|v| vertices.contains(&v)).collect();
    let d = Decoration::from_fn(h.clone(), |e| {
        let (u, v) = h.edges()[e];
        if inside[u] && inside[v] {
            w.clone()
        } else {
            one.clone()
        }
    })
    .expect("shared partition");
    (gamma, d)
}

/// Both sides of `t(F, W) ≤ t(H, W)^{e(F)/e(H)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub embedding: Vec<usize>,
    pub violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

pub fn domination_check(f: &Graph, h: &Graph, w: &StepKernel) -> Result<DominationReport> {
    let embedding = find_subgraph_embedding(f, h)
        .ok_or_else(|| Error::Precondition("first graph is not a subgraph of the second".into()))?;
    if !w.is_nonnegative() {
        return Err(Error::Precondition("domination check needs a non-negative kernel".into()));
    }
    if h.edge_count() == 0 {
        return Err(Error::Precondition("host graph has no edges".into()));
    }
    let (lhs, rhs) = domination_sides(f, h, w);
    let violated = relative_excess(lhs, rhs) > CERTIFICATE_MARGIN;
    Ok(DominationReport {
        lhs,
        rhs,
        embedding,
        violated,
        certificate: violated.then(|| Certificate::DensityDominationViolation {
            subgraph: f.clone(),
            graph: h.clone(),
            kernel: w.clone(),
            lhs,
            rhs,
        }),
    })
}

pub(crate) fn domination_sides(f: &Graph, h: &Graph, w: &StepKernel) -> (f64, f64) {
    let lhs = density(f, w);
    let exponent = f.edge_count() as f64 / h.edge_count() as f64;
    let rhs = if exponent == 1.0 { density(h, w) } else { density(h, w).powf(exponent) };
    (lhs, rhs)
}

/// Star-or-Eulerian condition for seminorming graphs: after dropping isolated
/// vertices, all components are isomorphic and each is a star or Eulerian.
pub fn star_or_eulerian_check(h: &Graph) -> CheckEntry {
    let h = h.remove_isolated_vertices();
    let comps: Vec<Graph> = h.components().into_iter().map(|c| c.graph).collect();
    if comps.is_empty() {
        return CheckEntry::new("star-or-eulerian", CheckStatus::Inconclusive, "graph has no edges".into());
    }
    let iso = comps.iter().all(|c| are_isomorphic(&comps[0], c).is_some());
    let shape = |c: &Graph| {
        if c.is_star().unwrap_or(false) {
            Some("star")
        } else if c.is_eulerian().unwrap_or(false) {
            Some("eulerian")
        } else {
            None
        }
    };
    let shapes: Vec<Option<&str>> = comps.iter().map(shape).collect();
    let ok = iso && shapes.iter().all(Option::is_some);
    let described = shapes
        .iter()
        .map(|s| s.unwrap_or("neither"))
        .collect::<Vec<_>>()
        .join(", ");
    let evidence = format!(
        "components {}isomorphic; shapes: {described}",
        if iso { "" } else { "not " }
    );
    CheckEntry::new(
        "star-or-eulerian",
        if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        evidence,
    )
}

/// Parity of the per-component edge count. Necessary for norming graphs only
/// (`K_2` is seminorming with one edge), so it is informational.
pub fn even_edge_count_check(h: &Graph) -> CheckEntry {
    let h = h.remove_isolated_vertices();
    let comps = h.components();
    let m = comps.first().map_or(0, |c| c.graph.edge_count());
    let even = comps.iter().all(|c| c.graph.edge_count() % 2 == 0);
    let mut entry = CheckEntry::new(
        "even-edge-count",
        if even { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("per-component edge count {m}; an odd count rules out norming, not seminorming"),
    );
    entry.informational = true;
    entry
}

/// Runs every check and aggregates them.
pub fn full_verdict(h: &Graph, budget: &Budget) -> Verdict {
    let stripped = h.remove_isolated_vertices();
    let mut checks = Vec::new();
    if stripped.edge_count() == 0 {
        checks.push(CheckEntry::new(
            "has-edges",
            CheckStatus::Fail,
            "graph norms are undefined without edges".into(),
        ));
    } else {
        checks.extend(component_analysis(&stripped, budget.kernel_trials, budget.seed));
        checks.push(
            subgraph_avg_degree_check(&stripped, budget.subgraph_cap)
                .expect("isolated vertices were removed"),
        );
        if budget.mode == Mode::Semi {
            checks.push(star_or_eulerian_check(&stripped));
            checks.push(even_edge_count_check(&stripped));
        }
        let found = holder_search(&stripped, budget.trials, budget.seed, budget.mode);
        checks.push(match found {
            Some(cert) => CheckEntry::new(
                "holder-search",
                CheckStatus::Fail,
                format!("Hölder violation found within {} trials", budget.trials),
            )
            .with_certificate(Some(cert)),
            None => CheckEntry::new(
                "holder-search",
                CheckStatus::Pass,
                format!("no violation in {} trials (seed {})", budget.trials, budget.seed),
            ),
        });
    }
    let decisive = || checks.iter().filter(|c| !c.informational);
    let overall = if decisive().any(|c| c.certificate.is_some()) {
        Overall::Refuted
    } else if decisive().any(|c| c.status != CheckStatus::Pass) {
        Overall::Inconclusive
    } else {
        Overall::Consistent
    };
    Verdict {
        graph: h.clone(),
        mode: budget.mode,
        subgraph_cap: budget.subgraph_cap,
        search_trials: budget.trials,
        seed: budget.seed,
        checks,
        overall,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4_c6() -> Graph {
        Graph::cycle(4).disjoint_union(&Graph::cycle(6))
    }

    fn triangle_with_pendant() -> Graph {
        Graph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn holder_equality_case() {
        let w = StepKernel::from_fn(vec![0.3, 0.7], |i, j| 0.2 + 0.3 * (i * j) as f64).unwrap();
        for h in [Graph::cycle(4), Graph::complete(3), Graph::path(4)] {
            let d = Decoration::uniform(h.clone(), &w);
            let r = holder_check(&h, &d, Mode::Weak).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-12, "{}", r.ratio);
        }
    }

    #[test]
    fn holder_check_rejects_signed_in_weak_mode() {
        let h = Graph::cycle(4);
        let d = Decoration::uniform(h.clone(), &StepKernel::constant(-1.0).unwrap());
        assert!(holder_check(&h, &d, Mode::Weak).is_err());
        assert!(holder_check(&h, &d, Mode::Semi).is_ok());
        assert!(holder_check(&Graph::cycle(5), &d, Mode::Semi).is_err());
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(0.0, 0.0), 1.0);
        assert_eq!(ratio(2.0, 4.0), 0.5);
    }

    #[test]
    fn edge_mismatch_on_c4_c6() {
        let cert = edge_mismatch_certificate(&c4_c6()).unwrap();
        let (lhs, rhs) = cert.sides().unwrap();
        assert_eq!(lhs, 1024.0);
        assert_eq!(rhs, 256.0);
        let check = cert.validate();
        assert!(check.valid, "{check:?}");
        assert_eq!(check.exact_lhs.as_deref(), Some("1024"));
        assert_eq!(check.exact_rhs.as_deref(), Some("256"));
        let d = cert.decoration().unwrap();
        let r = holder_check(d.host(), d, Mode::Weak).unwrap();
        assert_eq!(r.ratio, 4.0);
    }

    #[test]
    fn edge_mismatch_preconditions() {
        let err = edge_mismatch_certificate(&Graph::cycle(4).copies(2)).unwrap_err();
        assert!(err.to_string().contains("all equal"));
        let err = edge_mismatch_certificate(&Graph::cycle(4).disjoint_union(&Graph::star(2)))
            .unwrap_err();
        assert!(err.to_string().contains("average degree"));
    }

    #[test]
    fn edge_mismatch_three_components() {
        let h = Graph::cycle(6).copies(2).disjoint_union(&Graph::cycle(4));
        let cert = edge_mismatch_certificate(&h).unwrap();
        match &cert {
            Certificate::EdgeCountMismatch { component, .. } => {
                assert!(are_isomorphic(component, &Graph::cycle(4)).is_some())
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(cert.validate().valid);
    }

    #[test]
    fn subgraph_check_examples() {
        assert_eq!(
            subgraph_avg_degree_check(&Graph::cycle(4), 8).unwrap().status,
            CheckStatus::Pass
        );
        assert_eq!(
            subgraph_avg_degree_check(&Graph::star(2).copies(2), 8).unwrap().status,
            CheckStatus::Pass
        );
        // e/v is 1 for both the triangle and the whole graph
        let entry = subgraph_avg_degree_check(&triangle_with_pendant(), 8).unwrap();
        assert_eq!(entry.status, CheckStatus::Pass);
        // K3 ⊔ K2: 1 > 4/5
        let h = Graph::complete(3).disjoint_union(&Graph::path(2));
        let entry = subgraph_avg_degree_check(&h, 8).unwrap();
        assert_eq!(entry.status, CheckStatus::Fail);
        let cert = entry.certificate.unwrap();
        match &cert {
            Certificate::AvgDegreeViolation { subgraph, .. } => {
                assert!(are_isomorphic(subgraph, &Graph::complete(3)).is_some())
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(cert.validate().valid);
        assert!(subgraph_avg_degree_check(&Graph::parse_edge_list("vertices 3\n0 1").unwrap(), 8).is_err());
    }

    #[test]
    fn component_examples() {
        let entries = component_analysis(&Graph::star(2).copies(2), 100, 0);
        assert!(entries.iter().all(|e| e.status == CheckStatus::Pass), "{entries:?}");

        let entries = component_analysis(&c4_c6(), 100, 0);
        assert_eq!(entries[0].status, CheckStatus::Pass);
        assert_eq!(entries[1].status, CheckStatus::Fail);
        assert!(matches!(entries[1].certificate, Some(Certificate::EdgeCountMismatch { .. })));

        let entries = component_analysis(&Graph::cycle(4).disjoint_union(&Graph::star(2)), 100, 0);
        assert_eq!(entries[0].status, CheckStatus::Fail);
        let cert = entries[0].certificate.as_ref().unwrap();
        assert!(matches!(cert, Certificate::AvgDegreeViolation { .. }));
        assert!(cert.validate().valid);
    }

    #[test]
    fn component_nonisomorphism_certificate() {
        // C6 and a triangle with three pendant edges: 6 vertices, 6 edges each
        let sun = Graph::new(6, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]).unwrap();
        let h = Graph::cycle(6).disjoint_union(&sun);
        let entries = component_analysis(&h, 200, 0);
        assert_eq!(entries[0].status, CheckStatus::Pass);
        assert_eq!(entries[1].status, CheckStatus::Pass);
        assert_eq!(entries[2].status, CheckStatus::Fail);
        let cert = entries[2].certificate.as_ref().unwrap();
        assert!(cert.has_kernel());
        assert!(cert.validate().valid);
    }

    #[test]
    fn domination_examples() {
        let c4 = Graph::cycle(4);
        let w = StepKernel::half_square();
        let r = domination_check(&c4, &c4, &w).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(!r.violated);

        let r = domination_check(&Graph::path(2), &c4, &w).unwrap();
        assert_eq!(r.lhs, 0.25);
        assert_eq!(r.rhs, 0.5);
        assert!(!r.violated);

        let special = StepKernel::special(&SpecialKernelSpec::new(1.0, vec![1.0, 1.0]).unwrap());
        let r = domination_check(&c4, &c4_c6(), &special).unwrap();
        assert!(r.violated, "{r:?}");
        assert_eq!(r.lhs, 2.0);

        assert!(domination_check(&Graph::complete(3), &c4, &w).is_err());
        assert!(domination_check(&c4, &c4, &StepKernel::constant(-1.0).unwrap()).is_err());
    }

    #[test]
    fn star_or_eulerian_examples() {
        assert_eq!(star_or_eulerian_check(&Graph::star(2).copies(2)).status, CheckStatus::Pass);
        assert_eq!(star_or_eulerian_check(&Graph::cycle(4)).status, CheckStatus::Pass);
        assert_eq!(star_or_eulerian_check(&Graph::path(4)).status, CheckStatus::Fail);
        assert_eq!(
            star_or_eulerian_check(&Graph::star(2).disjoint_union(&Graph::star(3))).status,
            CheckStatus::Fail
        );
        assert_eq!(even_edge_count_check(&Graph::path(2)).status, CheckStatus::Fail);
        assert!(even_edge_count_check(&Graph::path(2)).informational);
    }

    #[test]
    fn verdict_examples() {
        let budget = Budget { trials: 200, ..Budget::default() };
        let v = full_verdict(&Graph::cycle(4), &budget);
        assert_eq!(v.overall, Overall::Consistent, "{v:?}");

        let v = full_verdict(&c4_c6(), &budget);
        assert_eq!(v.overall, Overall::Refuted);
        assert!(v.certificates().any(|c| matches!(c, Certificate::EdgeCountMismatch { .. })));

        let v = full_verdict(&Graph::complete(3), &budget);
        assert_eq!(v.overall, Overall::Refuted);

        let v = full_verdict(&Graph::empty(3), &budget);
        assert_eq!(v.overall, Overall::Inconclusive);

        for cert in full_verdict(&c4_c6(), &budget).certificates() {
            assert!(cert.validate().valid);
        }
    }

    #[test]
    fn semi_mode_verdicts() {
        let budget = Budget { trials: 300, mode: Mode::Semi, ..Budget::default() };
        let v = full_verdict(&Graph::cycle(4), &budget);
        assert_eq!(v.overall, Overall::Consistent, "{v:?}");
        let v = full_verdict(&Graph::path(2), &budget);
        assert_eq!(v.overall, Overall::Consistent, "{v:?}");
        let v = full_verdict(&Graph::path(4), &budget);
        assert_ne!(v.overall, Overall::Consistent, "{v:?}");
    }
}
