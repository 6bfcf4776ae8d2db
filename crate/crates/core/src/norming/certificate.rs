//! Machine-checkable refutations.
//!
//! A certificate carries every kernel and graph it needs, so [`Certificate::validate`]
//! recomputes both sides of the violated inequality from the payload alone.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{
    domination_sides, holder_sides, holder_sides_exact, relative_excess, special_decoration,
    Mode, CERTIFICATE_MARGIN,
};
use crate::density::{density, rational_string, Decoration};
use crate::error::Result;
use crate::graph::{are_isomorphic, find_subgraph_embedding, Graph};
use crate::kernel::StepKernel;

use super::search::distinguishing_kernel_search;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// A decoration with `t(H, w)^{e(H)} > ∏_e t(H, W_e)` (or `∏ |t(H, W_e)|`).
    HolderViolation {
        graph: Graph,
        mode: Mode,
        decoration: Decoration,
        lhs: f64,
        rhs: f64,
    },
    /// A subgraph `F` with `e(F)/v(F) > e(H)/v(H)`, witnessed by the
    /// half-square kernel on `E(F)` and `1` elsewhere.
    AvgDegreeViolation {
        graph: Graph,
        vertices: Vec<usize>,
        subgraph: Graph,
        subgraph_ratio: String,
        graph_ratio: String,
        decoration: Decoration,
        lhs: f64,
        rhs: f64,
        lhs_exact: String,
        rhs_exact: String,
    },
    /// Components of equal average degree but different edge counts,
    /// witnessed by `|W_{γ,c}|` on one component and `1` elsewhere.
    EdgeCountMismatch {
        graph: Graph,
        vertices: Vec<usize>,
        component: Graph,
        gamma: f64,
        c: Vec<f64>,
        decoration: Decoration,
        lhs: f64,
        rhs: f64,
        lhs_exact: String,
        rhs_exact: String,
    },
    /// Two non-isomorphic components. When `kernel` is present, the densest
    /// component `F` in it satisfies `t(F, U) > t(H, U)^{e(F)/e(H)}`.
    ComponentNonisomorphism {
        graph: Graph,
        first: Graph,
        second: Graph,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<StepKernel>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lhs: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rhs: Option<f64>,
    },
    /// `t(F, W) > t(H, W)^{e(F)/e(H)}` for a subgraph `F` of `H`.
    DensityDominationViolation {
        subgraph: Graph,
        graph: Graph,
        kernel: StepKernel,
        lhs: f64,
        rhs: f64,
    },
}

/// Outcome of re-validating a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    /// Recomputed `lhs/rhs − 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_rhs: Option<String>,
    pub problems: Vec<String>,
}

fn agrees(stored: f64, recomputed: f64) -> bool {
    stored == recomputed
        || (stored - recomputed).abs() <= CERTIFICATE_MARGIN * stored.abs().max(recomputed.abs())
}

struct Checker {
    check: CertificateCheck,
}

impl Checker {
    fn new(kind: &str) -> Self {
        Checker {
            check: CertificateCheck {
                valid: false,
                kind: kind.into(),
                lhs: None,
                rhs: None,
                margin: None,
                exact_lhs: None,
                exact_rhs: None,
                problems: Vec::new(),
            },
        }
    }

    fn require(&mut self, ok: bool, problem: impl FnOnce() -> String) {
        if !ok {
            self.check.problems.push(problem());
        }
    }

    /// Records recomputed sides and compares them with the stored ones.
    fn sides(&mut self, stored: (f64, f64), recomputed: (f64, f64), ratio: f64) {
        let (lhs, rhs) = recomputed;
        self.require(agrees(stored.0, lhs), || {
            format!("stored lhs {} but payload gives {lhs}", stored.0)
        });
        self.require(agrees(stored.1, rhs), || {
            format!("stored rhs {} but payload gives {rhs}", stored.1)
        });
        let margin = ratio - 1.0;
        self.require(margin > CERTIFICATE_MARGIN, || {
            format!("margin {margin} does not exceed {CERTIFICATE_MARGIN}")
        });
        self.check.lhs = Some(lhs);
        self.check.rhs = Some(rhs);
        self.check.margin = Some(margin);
    }

    /// Exact comparison of the Hölder sides, and against stored strings if any.
    fn exact(&mut self, d: &Decoration, mode: Mode, stored: Option<(&str, &str)>) {
        let (lhs, rhs) = holder_sides_exact(d, mode);
        self.require(lhs > rhs, || "exact lhs does not exceed exact rhs".into());
        // random decorations have exact sides thousands of digits long, so
        // strings are only reported where the certificate stores them
        if let Some((sl, sr)) = stored {
            let (l, r) = (rational_string(&lhs), rational_string(&rhs));
            self.require(sl == l, || format!("stored exact lhs {sl} but payload gives {l}"));
            self.require(sr == r, || format!("stored exact rhs {sr} but payload gives {r}"));
            self.check.exact_lhs = Some(l);
            self.check.exact_rhs = Some(r);
        }
    }

    fn finish(mut self) -> CertificateCheck {
        self.check.valid = self.check.problems.is_empty();
        self.check
    }
}

fn ratio_of(e: usize, v: usize) -> String {
    Ratio::new(e as u64, v as u64).to_string()
}

/// Densest component of `h` in `w` (first by position on ties), with its
/// density.
fn densest_component(h: &Graph, w: &StepKernel) -> (Graph, f64) {
    h.remove_isolated_vertices()
        .components()
        .into_iter()
        .map(|c| {
            let t = density(&c.graph, w);
            (c.graph, t)
        })
        .fold(None, |best: Option<(Graph, f64)>, (g, t)| match best {
            Some((bg, bt)) if bt >= t => Some((bg, bt)),
            _ => Some((g, t)),
        })
        .expect("graph has a component")
}

impl Certificate {
    pub(crate) fn average_degree(h: &Graph, vertices: &[usize]) -> Result<Self> {
        let inside: Vec<bool> = (0..h.vertex_count()).map(|v| vertices.contains(&v)).collect();
        let u = StepKernel::half_square();
        let one = StepKernel::constant_on(u.measures().to_vec(), 1.0)?;
        let decoration = Decoration::from_fn(h.clone(), |e| {
            let (a, b) = h.edges()[e];
            if inside[a] && inside[b] {
                u.clone()
            } else {
                one.clone()
            }
        })?;
        let f = h.induced_subgraph(vertices);
        let (lhs, rhs, _) = holder_sides(&decoration, Mode::Weak);
        let (le, re) = holder_sides_exact(&decoration, Mode::Weak);
        Ok(Certificate::AvgDegreeViolation {
            graph: h.clone(),
            vertices: vertices.to_vec(),
            subgraph_ratio: ratio_of(f.edge_count(), f.vertex_count()),
            graph_ratio: ratio_of(h.edge_count(), h.vertex_count()),
            subgraph: f,
            decoration,
            lhs,
            rhs,
            lhs_exact: rational_string(&le),
            rhs_exact: rational_string(&re),
        })
    }

    pub(crate) fn edge_count_mismatch(h: &Graph, vertices: &[usize], c: Vec<f64>) -> Self {
        let (gamma, decoration) = special_decoration(h, vertices, &c);
        let (lhs, rhs, _) = holder_sides(&decoration, Mode::Weak);
        let (le, re) = holder_sides_exact(&decoration, Mode::Weak);
        Certificate::EdgeCountMismatch {
            graph: h.clone(),
            vertices: vertices.to_vec(),
            component: h.induced_subgraph(vertices),
            gamma,
            c,
            decoration,
            lhs,
            rhs,
            lhs_exact: rational_string(&le),
            rhs_exact: rational_string(&re),
        }
    }

    /// Searches for a kernel separating `first` and `second`; without one the
    /// certificate is structural only.
    pub(crate) fn component_nonisomorphism(
        h: &Graph,
        first: &Graph,
        second: &Graph,
        trials: usize,
        seed: u64,
    ) -> Self {
        let found = distinguishing_kernel_search(first, second, trials, seed)
            .ok()
            .flatten()
            .and_then(|hit| {
                let (f, _) = densest_component(h, &hit.kernel);
                let (lhs, rhs) = domination_sides(&f, h, &hit.kernel);
                (relative_excess(lhs, rhs) > CERTIFICATE_MARGIN).then_some((hit.kernel, lhs, rhs))
            });
        let (kernel, lhs, rhs) = match found {
            Some((k, l, r)) => (Some(k), Some(l), Some(r)),
            None => (None, None, None),
        };
        Certificate::ComponentNonisomorphism {
            graph: h.clone(),
            first: first.clone(),
            second: second.clone(),
            kernel,
            lhs,
            rhs,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::HolderViolation { .. } => "holder-violation",
            Certificate::AvgDegreeViolation { .. } => "avg-degree-violation",
            Certificate::EdgeCountMismatch { .. } => "edge-count-mismatch",
            Certificate::ComponentNonisomorphism { .. } => "component-nonisomorphism",
            Certificate::DensityDominationViolation { .. } => "density-domination-violation",
        }
    }

    pub fn graph(&self) -> &Graph {
        match self {
            Certificate::HolderViolation { graph, .. }
            | Certificate::AvgDegreeViolation { graph, .. }
            | Certificate::EdgeCountMismatch { graph, .. }
            | Certificate::ComponentNonisomorphism { graph, .. }
            | Certificate::DensityDominationViolation { graph, .. } => graph,
        }
    }

    /// Stored `(lhs, rhs)`, absent for a structural-only certificate.
    pub fn sides(&self) -> Option<(f64, f64)> {
        match self {
            Certificate::HolderViolation { lhs, rhs, .. }
            | Certificate::AvgDegreeViolation { lhs, rhs, .. }
            | Certificate::EdgeCountMismatch { lhs, rhs, .. }
            | Certificate::DensityDominationViolation { lhs, rhs, .. } => Some((*lhs, *rhs)),
            Certificate::ComponentNonisomorphism { lhs, rhs, .. } => lhs.zip(*rhs),
        }
    }

    pub fn decoration(&self) -> Option<&Decoration> {
        match self {
            Certificate::HolderViolation { decoration, .. }
            | Certificate::AvgDegreeViolation { decoration, .. }
            | Certificate::EdgeCountMismatch { decoration, .. } => Some(decoration),
            _ => None,
        }
    }

    /// Whether the certificate carries a numerical witness.
    pub fn has_kernel(&self) -> bool {
        !matches!(self, Certificate::ComponentNonisomorphism { kernel: None, .. })
    }

    /// Recomputes the violation from the payload.
    pub fn validate(&self) -> CertificateCheck {
        let mut ck = Checker::new(self.kind());
        match self {
            Certificate::HolderViolation { graph, mode, decoration, lhs, rhs } => {
                ck.require(decoration.host() == graph, || "decoration is for another graph".into());
                if *mode == Mode::Weak {
                    ck.require(decoration.all_nonnegative(), || {
                        "weak mode needs non-negative kernels".into()
                    });
                }
                let (l, r, ratio) = holder_sides(decoration, *mode);
                ck.sides((*lhs, *rhs), (l, r), ratio);
                ck.exact(decoration, *mode, None);
            }
            Certificate::AvgDegreeViolation {
                graph,
                vertices,
                subgraph,
                subgraph_ratio,
                graph_ratio,
                decoration,
                lhs,
                rhs,
                lhs_exact,
                rhs_exact,
            } => {
                let in_range = vertices.iter().all(|&v| v < graph.vertex_count());
                ck.require(in_range, || "vertex outside the graph".into());
                if in_range {
                    let f = graph.induced_subgraph(vertices);
                    ck.require(&f == subgraph, || "subgraph is not induced by the vertices".into());
                    let (rf, rh) = (
                        ratio_of(f.edge_count(), f.vertex_count()),
                        ratio_of(graph.edge_count(), graph.vertex_count()),
                    );
                    ck.require(&rf == subgraph_ratio && &rh == graph_ratio, || {
                        format!("ratios are {rf} and {rh}")
                    });
                    ck.require(
                        (f.edge_count() * graph.vertex_count()) > (graph.edge_count() * f.vertex_count()),
                        || format!("e(F)/v(F) = {rf} does not exceed e(H)/v(H) = {rh}"),
                    );
                    match Certificate::average_degree(graph, vertices) {
                        Ok(Certificate::AvgDegreeViolation { decoration: canon, .. }) => ck
                            .require(&canon == decoration, || {
                                "decoration differs from the half-square construction".into()
                            }),
                        _ => ck.require(false, || "cannot rebuild the construction".into()),
                    }
                }
                ck.require(decoration.host() == graph, || "decoration is for another graph".into());
                let (l, r, ratio) = holder_sides(decoration, Mode::Weak);
                ck.sides((*lhs, *rhs), (l, r), ratio);
                ck.exact(decoration, Mode::Weak, Some((lhs_exact, rhs_exact)));
            }
            Certificate::EdgeCountMismatch {
                graph,
                vertices,
                component,
                gamma,
                c,
                decoration,
                lhs,
                rhs,
                lhs_exact,
                rhs_exact,
            } => {
                let in_range = vertices.iter().all(|&v| v < graph.vertex_count());
                ck.require(in_range, || "vertex outside the graph".into());
                if in_range {
                    let f = graph.induced_subgraph(vertices);
                    ck.require(&f == component, || "component is not induced by the vertices".into());
                    ck.require(f.is_connected() && f.edge_count() > 0, || {
                        "vertices do not span a connected component".into()
                    });
                    if f.edge_count() > 0 {
                        let g = f.vertex_count() as f64 / f.edge_count() as f64;
                        ck.require(g == *gamma, || format!("gamma should be v/e = {g}"));
                        let (_, canon) = special_decoration(graph, vertices, c);
                        ck.require(&canon == decoration, || {
                            "decoration differs from the |W_{γ,c}| construction".into()
                        });
                    }
                }
                ck.require(decoration.host() == graph, || "decoration is for another graph".into());
                let (l, r, ratio) = holder_sides(decoration, Mode::Weak);
                ck.sides((*lhs, *rhs), (l, r), ratio);
                ck.exact(decoration, Mode::Weak, Some((lhs_exact, rhs_exact)));
            }
            Certificate::ComponentNonisomorphism { graph, first, second, kernel, lhs, rhs } => {
                let comps: Vec<Graph> = graph
                    .remove_isolated_vertices()
                    .components()
                    .into_iter()
                    .map(|c| c.graph)
                    .collect();
                for (name, g) in [("first", first), ("second", second)] {
                    ck.require(comps.iter().any(|c| are_isomorphic(c, g).is_some()), || {
                        format!("{name} graph is not a component")
                    });
                }
                ck.require(are_isomorphic(first, second).is_none(), || {
                    "the two components are isomorphic".into()
                });
                match (kernel, lhs, rhs) {
                    (None, None, None) => {}
                    (Some(w), Some(sl), Some(sr)) => {
                        ck.require(w.is_nonnegative(), || "kernel must be non-negative".into());
                        let (f, _) = densest_component(graph, w);
                        let (l, r) = domination_sides(&f, graph, w);
                        ck.sides((*sl, *sr), (l, r), super::ratio(l, r));
                    }
                    _ => ck.require(false, || "kernel, lhs and rhs must appear together".into()),
                }
            }
            Certificate::DensityDominationViolation { subgraph, graph, kernel, lhs, rhs } => {
                ck.require(find_subgraph_embedding(subgraph, graph).is_some(), || {
                    "subgraph does not embed in the graph".into()
                });
                ck.require(kernel.is_nonnegative(), || "kernel must be non-negative".into());
                ck.require(graph.edge_count() > 0, || "graph has no edges".into());
                if graph.edge_count() > 0 {
                    let (l, r) = domination_sides(subgraph, graph, kernel);
                    ck.sides((*lhs, *rhs), (l, r), super::ratio(l, r));
                }
            }
        }
        ck.finish()
    }
}
