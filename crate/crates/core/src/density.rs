//! Homomorphism densities of graphs in step kernels.
//!
//! For a step kernel with parts `μ_1..μ_k`, `t(H, W)` is the finite sum
//! over maps `φ: V(H) → [k]` of `∏_v μ_{φ(v)} ∏_{uv ∈ E} W[φ(u)][φ(v)]`.
//! [`density`] evaluates it by variable elimination along a greedy
//! min-fill order, which costs `O(k^{width+1} · v(H))`;
//! [`density_bruteforce`] is the direct sum and serves as the oracle.
//! Disconnected hosts are evaluated per component and multiplied.

use std::collections::BTreeSet;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::StepKernel;

/// Largest number of part assignments the brute-force oracle will visit.
pub const BRUTEFORCE_LIMIT: f64 = 1e8;

/// A scalar the contraction can run in, with its own summation strategy.
pub(crate) trait Scalar: Clone + Zero + One + Mul<Output = Self> {
    type Acc;
    fn acc_new() -> Self::Acc;
    fn acc_add(acc: &mut Self::Acc, x: Self);
    fn acc_total(acc: Self::Acc) -> Self;
}

/// Neumaier's compensated summation.
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Scalar for f64 {
    type Acc = Compensated;

    fn acc_new() -> Compensated {
        Compensated { sum: 0.0, carry: 0.0 }
    }

    fn acc_add(acc: &mut Compensated, x: f64) {
        let t = acc.sum + x;
        if acc.sum.abs() >= x.abs() {
            acc.carry += (acc.sum - t) + x;
        } else {
            acc.carry += (x - t) + acc.sum;
        }
        acc.sum = t;
    }

    fn acc_total(acc: Compensated) -> f64 {
        acc.sum + acc.carry
    }
}

impl Scalar for BigRational {
    type Acc = BigRational;

    fn acc_new() -> BigRational {
        BigRational::zero()
    }

    fn acc_add(acc: &mut BigRational, x: BigRational) {
        *acc += x;
    }

    fn acc_total(acc: BigRational) -> BigRational {
        acc
    }
}

/// A vertex elimination order and the width it induces (the largest number
/// of not-yet-eliminated neighbours a vertex has when it is eliminated).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationPlan {
    pub order: Vec<usize>,
    pub width: usize,
}

/// Greedy min-fill order, ties broken by degree then by vertex index.
pub fn elimination_plan(h: &Graph) -> EliminationPlan {
    let n = h.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> =
        (0..n).map(|v| h.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    for _ in 0..n {
        let fill = |v: usize| {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a].contains(&b) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill(v), adj[v].len(), v))
            .expect("a live vertex remains");
        eliminate(&mut adj, v);
        width = width.max(adj[v].len());
        alive[v] = false;
        order.push(v);
    }
    EliminationPlan { order, width }
}

// Removes `v` from its neighbours' lists and joins them into a clique;
// `adj[v]` itself is left intact so the caller can read the step width.
fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    for (i, &a) in nb.iter().enumerate() {
        adj[a].remove(&v);
        for &b in &nb[i + 1..] {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
}

/// Width induced by an arbitrary order.
pub fn order_width(h: &Graph, order: &[usize]) -> Result<usize> {
    check_order(h, order)?;
    let mut adj: Vec<BTreeSet<usize>> = (0..h.vertex_count())
        .map(|v| h.neighbors(v).iter().copied().collect())
        .collect();
    let mut width = 0;
    for &v in order {
        eliminate(&mut adj, v);
        width = width.max(adj[v].len());
    }
    Ok(width)
}

fn check_order(h: &Graph, order: &[usize]) -> Result<()> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..h.vertex_count()).collect::<Vec<_>>() {
        return Err(Error::Precondition(
            "elimination order must be a permutation of the vertices".into(),
        ));
    }
    Ok(())
}

struct Factor<T> {
    // sorted vertex ids
    scope: Vec<usize>,
    // row-major over `scope`, k entries per axis
    table: Vec<T>,
}

/// Sums out every vertex of `h` in `order`. `table(e)` is the `k × k`
/// row-major table attached to edge `e` of `h`.
fn contract<'a, T: Scalar + 'a>(
    h: &Graph,
    k: usize,
    measures: &[T],
    table: impl Fn(usize) -> &'a [T],
    order: &[usize],
) -> T {
    let mut factors: Vec<Factor<T>> = h
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| Factor {
            scope: vec![u, v],
            table: table(e).to_vec(),
        })
        .collect();
    for &v in order {
        let (bucket, rest): (Vec<_>, Vec<_>) =
            factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        let scope: Vec<usize> = bucket
            .iter()
            .flat_map(|f| f.scope.iter().copied())
            .filter(|&u| u != v)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        // strides[f][p]: stride of scope[p] in factor f; last slot is v itself
        let strides: Vec<Vec<usize>> = bucket
            .iter()
            .map(|f| {
                let mut s = vec![0usize; scope.len() + 1];
                let len = f.scope.len();
                for (pos, &u) in f.scope.iter().enumerate() {
                    let stride = k.pow((len - 1 - pos) as u32);
                    match scope.iter().position(|&x| x == u) {
                        Some(p) => s[p] = stride,
                        None => s[scope.len()] = stride,
                    }
                }
                s
            })
            .collect();
        let size = k.pow(scope.len() as u32);
        let mut out = Vec::with_capacity(size);
        let mut digits = vec![0usize; scope.len()];
        let mut bases = vec![0usize; bucket.len()];
        for _ in 0..size {
            for (b, s) in bases.iter_mut().zip(&strides) {
                *b = digits.iter().zip(s).map(|(d, st)| d * st).sum();
            }
            let mut acc = T::acc_new();
            for x in 0..k {
                let mut prod = measures[x].clone();
                for ((f, s), &b) in bucket.iter().zip(&strides).zip(&bases) {
                    prod = prod * f.table[b + x * s[scope.len()]].clone();
                }
                T::acc_add(&mut acc, prod);
            }
            out.push(T::acc_total(acc));
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < k {
                    break;
                }
                *d = 0;
            }
        }
        factors.push(Factor { scope, table: out });
    }
    factors
        .into_iter()
        .fold(T::one(), |acc, f| acc * f.table[0].clone())
}

/// Evaluates a decorated density component by component.
fn evaluate<'a, T: Scalar + 'a>(
    host: &Graph,
    k: usize,
    measures: &[T],
    table: impl Fn(usize) -> &'a [T],
) -> T {
    let mut result = T::one();
    for comp in host.components() {
        if comp.graph.edge_count() == 0 {
            continue;
        }
        let local: Vec<usize> = comp
            .graph
            .edges()
            .iter()
            .map(|&(a, b)| {
                host.edge_index(comp.vertices[a], comp.vertices[b])
                    .expect("component edge belongs to host")
            })
            .collect();
        let plan = elimination_plan(&comp.graph);
        let value = contract(&comp.graph, k, measures, |e| table(local[e]), &plan.order);
        result = result * value;
    }
    result
}

/// `t(H, W)`. Edgeless graphs give 1.
pub fn density(h: &Graph, w: &StepKernel) -> f64 {
    evaluate(h, w.parts(), w.measures(), |_| w.values())
}

/// `t(H, W)` contracted as one network along `order`, without splitting
/// into components. Isolated vertices contribute `Σ μ_i`.
pub fn density_with_order(h: &Graph, w: &StepKernel, order: &[usize]) -> Result<f64> {
    check_order(h, order)?;
    Ok(contract(h, w.parts(), w.measures(), |_| w.values(), order))
}

/// Per-edge kernels on a shared partition: the `w = (W_e)` of a decorated
/// density. Kernels are stored in the order of [`Graph::edges`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DecorationRepr", into = "DecorationRepr")]
pub struct Decoration {
    host: Graph,
    kernels: Vec<StepKernel>,
}

#[derive(Serialize, Deserialize)]
struct DecorationRepr {
    host: Graph,
    assignment: Vec<EdgeKernel>,
}

#[derive(Serialize, Deserialize)]
struct EdgeKernel {
    edge: [usize; 2],
    kernel: StepKernel,
}

impl TryFrom<DecorationRepr> for Decoration {
    type Error = Error;

    fn try_from(repr: DecorationRepr) -> Result<Self> {
        let mut slots: Vec<Option<StepKernel>> = vec![None; repr.host.edge_count()];
        for EdgeKernel { edge: [u, v], kernel } in repr.assignment {
            let e = repr.host.edge_index(u, v).ok_or_else(|| {
                Error::Precondition(format!("decoration names {u}-{v}, which is not an edge"))
            })?;
            if slots[e].replace(kernel).is_some() {
                return Err(Error::Precondition(format!("edge {u}-{v} decorated twice")));
            }
        }
        let kernels = slots
            .into_iter()
            .enumerate()
            .map(|(e, k)| {
                k.ok_or_else(|| {
                    let (u, v) = repr.host.edges()[e];
                    Error::Precondition(format!("edge {u}-{v} has no kernel"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Decoration::new(repr.host, kernels)
    }
}

impl From<Decoration> for DecorationRepr {
    fn from(d: Decoration) -> Self {
        DecorationRepr {
            assignment: d
                .host
                .edges()
                .iter()
                .zip(d.kernels)
                .map(|(&(u, v), kernel)| EdgeKernel { edge: [u, v], kernel })
                .collect(),
            host: d.host,
        }
    }
}

impl Decoration {
    /// `kernels[e]` decorates `host.edges()[e]`; all kernels must share one
    /// partition.
    pub fn new(host: Graph, kernels: Vec<StepKernel>) -> Result<Self> {
        if kernels.len() != host.edge_count() {
            return Err(Error::Precondition(format!(
                "{} kernels for {} edges",
                kernels.len(),
                host.edge_count()
            )));
        }
        if let Some(first) = kernels.first() {
            if kernels.iter().any(|w| !w.same_partition(first)) {
                return Err(Error::PartitionMismatch);
            }
        }
        Ok(Decoration { host, kernels })
    }

    /// Every edge gets `w`.
    pub fn uniform(host: Graph, w: &StepKernel) -> Self {
        let kernels = vec![w.clone(); host.edge_count()];
        Decoration { host, kernels }
    }

    pub fn from_fn(host: Graph, f: impl FnMut(usize) -> StepKernel) -> Result<Self> {
        let kernels = (0..host.edge_count()).map(f).collect();
        Self::new(host, kernels)
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn kernels(&self) -> &[StepKernel] {
        &self.kernels
    }

    pub fn kernel(&self, edge: usize) -> &StepKernel {
        &self.kernels[edge]
    }

    /// Shared part measures, or `None` for an edgeless host.
    pub fn measures(&self) -> Option<&[f64]> {
        self.kernels.first().map(StepKernel::measures)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.kernels.iter().all(StepKernel::is_nonnegative)
    }

    pub fn into_kernels(self) -> Vec<StepKernel> {
        self.kernels
    }
}

/// `t(H, w)` for a decoration `w = (W_e)`.
pub fn decorated_density(d: &Decoration) -> f64 {
    match d.kernels.first() {
        None => 1.0,
        Some(first) => evaluate(&d.host, first.parts(), first.measures(), |e| {
            d.kernels[e].values()
        }),
    }
}

fn bruteforce<F: Fn(usize, usize, usize) -> f64>(
    h: &Graph,
    measures: &[f64],
    value: F,
) -> Result<f64> {
    let k = measures.len();
    let n = h.vertex_count();
    let count = (k as f64).powi(n as i32);
    if count > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge(count, BRUTEFORCE_LIMIT));
    }
    let mut phi = vec![0usize; n];
    let mut acc = f64::acc_new();
    loop {
        let mut term: f64 = phi.iter().map(|&p| measures[p]).product();
        for (e, &(u, v)) in h.edges().iter().enumerate() {
            term *= value(e, phi[u], phi[v]);
        }
        f64::acc_add(&mut acc, term);
        let mut carried = true;
        for p in phi.iter_mut().rev() {
            *p += 1;
            if *p < k {
                carried = false;
                break;
            }
            *p = 0;
        }
        if carried {
            break;
        }
    }
    Ok(f64::acc_total(acc))
}

/// Direct sum over all `k^{v(H)}` part assignments.
pub fn density_bruteforce(h: &Graph, w: &StepKernel) -> Result<f64> {
    if h.edge_count() == 0 {
        return Ok(1.0);
    }
    bruteforce(h, w.measures(), |_, a, b| w.value(a, b))
}

/// Direct sum for a decorated density.
pub fn decorated_density_bruteforce(d: &Decoration) -> Result<f64> {
    match d.measures() {
        None => Ok(1.0),
        Some(m) => bruteforce(&d.host, m, |e, a, b| d.kernels[e].value(a, b)),
    }
}

/// `‖W‖_H = |t(H, W)|^{1/e(H)}`.
pub fn norm_h(h: &Graph, w: &StepKernel) -> Result<f64> {
    let m = require_edges(h)?;
    Ok(density(h, w).abs().powf(1.0 / m))
}

/// `‖W‖_{r(H)} = t(H, |W|)^{1/e(H)}`.
pub fn norm_rh(h: &Graph, w: &StepKernel) -> Result<f64> {
    let m = require_edges(h)?;
    Ok(density(h, &w.abs()).powf(1.0 / m))
}

fn require_edges(h: &Graph) -> Result<f64> {
    match h.edge_count() {
        0 => Err(Error::Precondition("graph norms need at least one edge".into())),
        m => Ok(m as f64),
    }
}

/// Every finite `f64` is a dyadic rational; this is its exact value.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn exact_table(values: &[f64]) -> Vec<BigRational> {
    values.iter().map(|&x| exact(x)).collect()
}

/// `t(H, W)` in exact rational arithmetic on the stored (binary) values.
pub fn density_exact(h: &Graph, w: &StepKernel) -> BigRational {
    let measures = exact_table(w.measures());
    let table = exact_table(w.values());
    evaluate(h, w.parts(), &measures, |_| &table[..])
}

/// `t(H, w)` in exact rational arithmetic.
pub fn decorated_density_exact(d: &Decoration) -> BigRational {
    let Some(measures) = d.measures() else {
        return BigRational::one();
    };
    let measures = exact_table(measures);
    let tables: Vec<Vec<BigRational>> = d.kernels.iter().map(|w| exact_table(w.values())).collect();
    evaluate(&d.host, measures.len(), &measures, |e| &tables[e][..])
}

/// `x^n` for rationals.
pub fn rational_pow(x: &BigRational, n: usize) -> BigRational {
    num_traits::pow(x.clone(), n)
}

/// Renders a rational as `p/q` (or `p` when integral).
pub fn rational_string(x: &BigRational) -> String {
    if x.denom() == &BigInt::one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
