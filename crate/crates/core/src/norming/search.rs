//! Randomised searches: Hölder violations and distinguishing kernels.
//!
//! Trial `t` draws from `derive_path(seed, [stream, t])`, so results do not
//! depend on how trials are scheduled across threads.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{holder_sides, holder_sides_exact, Certificate, Mode, SEARCH_MARGIN};
use crate::density::{density, Decoration};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, Graph};
use crate::kernel::{SpecialKernelSpec, StepKernel};
use crate::seeds::{derive_path, rng_for};

const HOLDER_STREAM: u64 = 0;
const CLIMB_STREAM: u64 = 1;
const DISTINGUISH_STREAM: u64 = 2;
const CHUNK: usize = 256;
/// Smallest density gap accepted as distinguishing.
pub const DISTINGUISH_GAP: f64 = 1e-6;

fn random_measures(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| 0.2 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut m: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = m[..k - 1].iter().sum();
    m[k - 1] = 1.0 - head;
    m
}

fn random_value(rng: &mut ChaCha8Rng, mode: Mode) -> f64 {
    match mode {
        Mode::Weak => rng.gen::<f64>(),
        Mode::Semi => rng.gen_range(-1.0..1.0),
    }
}

fn random_kernel(rng: &mut ChaCha8Rng, measures: &[f64], mode: Mode) -> StepKernel {
    StepKernel::from_fn(measures.to_vec(), |_, _| random_value(rng, mode)).expect("valid measures")
}

fn rank_one(rng: &mut ChaCha8Rng, measures: &[f64], mode: Mode) -> StepKernel {
    let f: Vec<f64> = (0..measures.len()).map(|_| random_value(rng, mode)).collect();
    StepKernel::from_fn(measures.to_vec(), |i, j| f[i] * f[j]).expect("valid measures")
}

/// 0/1 patterns on two parts: one square, the other square, bipartite, full.
fn indicator(rng: &mut ChaCha8Rng, measures: &[f64], mode: Mode) -> StepKernel {
    let pattern: [f64; 3] = *[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]
        .choose(rng)
        .expect("nonempty");
    let sign = if mode == Mode::Semi && rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    StepKernel::from_fn(measures.to_vec(), |i, j| sign * pattern[i + j]).expect("valid measures")
}

fn block_random_family(h: &Graph, rng: &mut ChaCha8Rng, mode: Mode) -> Decoration {
    let k = rng.gen_range(2..=4);
    let m = random_measures(rng, k);
    Decoration::from_fn(h.clone(), |_| random_kernel(rng, &m, mode)).expect("shared partition")
}

fn indicator_family(h: &Graph, rng: &mut ChaCha8Rng, mode: Mode) -> Decoration {
    let m = if rng.gen_bool(0.5) { vec![0.5, 0.5] } else { random_measures(rng, 2) };
    Decoration::from_fn(h.clone(), |_| indicator(rng, &m, mode)).expect("shared partition")
}

/// `|W_{γ,a}|` on a random component (or a random edge set), `1` elsewhere.
fn special_family(h: &Graph, rng: &mut ChaCha8Rng) -> Decoration {
    let comps = h.components();
    let chosen: Vec<bool> = if comps.len() > 1 && rng.gen_bool(0.7) {
        let c = comps.choose(rng).expect("nonempty");
        (0..h.vertex_count()).map(|v| c.vertices.contains(&v)).collect()
    } else {
        (0..h.vertex_count()).map(|_| rng.gen_bool(0.6)).collect()
    };
    let on: Vec<bool> = h.edges().iter().map(|&(u, v)| chosen[u] && chosen[v]).collect();
    let (ve, ee) = {
        let vs = chosen.iter().filter(|&&b| b).count();
        let es = on.iter().filter(|&&b| b).count();
        (vs.max(1), es.max(1))
    };
    let gamma = if rng.gen_bool(0.5) {
        ve as f64 / ee as f64
    } else {
        rng.gen_range(0.25..2.0)
    };
    let depth = rng.gen_range(1..=3);
    let a: Vec<f64> = (0..depth).map(|_| rng.gen::<f64>()).collect();
    let w = StepKernel::special(&SpecialKernelSpec::new(gamma, a).expect("valid spec")).abs();
    let one = StepKernel::constant_on(w.measures().to_vec(), 1.0).expect("valid");
    Decoration::from_fn(h.clone(), |e| if on[e] { w.clone() } else { one.clone() })
        .expect("shared partition")
}

fn rank_one_family(h: &Graph, rng: &mut ChaCha8Rng, mode: Mode) -> Decoration {
    let k = rng.gen_range(2..=4);
    let m = random_measures(rng, k);
    Decoration::from_fn(h.clone(), |_| rank_one(rng, &m, mode)).expect("shared partition")
}

fn mixed_family(h: &Graph, rng: &mut ChaCha8Rng, mode: Mode) -> Decoration {
    let k = rng.gen_range(2..=3);
    let m = random_measures(rng, k);
    Decoration::from_fn(h.clone(), |_| match rng.gen_range(0..4) {
        0 => StepKernel::constant_on(m.clone(), random_value(rng, mode)).expect("valid"),
        1 => random_kernel(rng, &m, mode),
        2 => rank_one(rng, &m, mode),
        _ if k == 2 => indicator(rng, &m, mode),
        _ => random_kernel(rng, &m, mode),
    })
    .expect("shared partition")
}

/// The decoration tried at trial `t`.
pub(crate) fn trial_decoration(h: &Graph, t: usize, seed: u64, mode: Mode) -> Decoration {
    let mut rng = rng_for(derive_path(seed, &[HOLDER_STREAM, t as u64]));
    match t % 5 {
        0 => block_random_family(h, &mut rng, mode),
        1 => indicator_family(h, &mut rng, mode),
        2 => special_family(h, &mut rng),
        3 => rank_one_family(h, &mut rng, mode),
        _ => mixed_family(h, &mut rng, mode),
    }
}

/// Float ratio above the search margin and confirmed in exact arithmetic.
fn accept(d: &Decoration, mode: Mode) -> Option<Certificate> {
    let (lhs, rhs, ratio) = holder_sides(d, mode);
    if !(ratio > 1.0 + SEARCH_MARGIN) {
        return None;
    }
    let (le, re) = holder_sides_exact(d, mode);
    (le > re).then(|| Certificate::HolderViolation {
        graph: d.host().clone(),
        mode,
        decoration: d.clone(),
        lhs,
        rhs,
    })
}

fn perturb(d: &Decoration, rng: &mut ChaCha8Rng, mode: Mode, step: f64) -> Decoration {
    let e = rng.gen_range(0..d.host().edge_count());
    let mut kernels = d.kernels().to_vec();
    let (i, j) = {
        let k = kernels[e].parts();
        (rng.gen_range(0..k), rng.gen_range(0..k))
    };
    let delta = rng.gen_range(-step..step);
    let w = &kernels[e];
    let bumped = StepKernel::from_fn(w.measures().to_vec(), |a, b| {
        let x = w.value(a, b);
        if (a, b) == (i.min(j), i.max(j)) {
            let y = x + delta;
            if mode == Mode::Weak { y.max(0.0) } else { y }
        } else {
            x
        }
    })
    .expect("valid measures");
    kernels[e] = bumped;
    Decoration::new(d.host().clone(), kernels).expect("partition unchanged")
}

/// Draws `trials` decorations from five families (block-random, 0/1
/// indicators, `|W_{γ,a}|` on a component, rank-one, mixed), then
/// hill-climbs from the best one for `trials / 10` steps. Returns the first
/// decoration whose ratio exceeds `1 + 1e-6` and whose violation survives an
/// exact recomputation.
pub fn holder_search(h: &Graph, trials: usize, seed: u64, mode: Mode) -> Option<Certificate> {
    if h.edge_count() == 0 {
        return None;
    }
    let mut best: Option<(f64, usize)> = None;
    for start in (0..trials).step_by(CHUNK) {
        let end = (start + CHUNK).min(trials);
        let results: Vec<(usize, f64, Option<Certificate>)> = (start..end)
            .into_par_iter()
            .map(|t| {
                let d = trial_decoration(h, t, seed, mode);
                let (_, _, ratio) = holder_sides(&d, mode);
                (t, ratio, accept(&d, mode))
            })
            .collect();
        if let Some(cert) = results.iter().find_map(|(_, _, c)| c.clone()) {
            return Some(cert);
        }
        for (t, ratio, _) in results {
            if ratio.is_finite() && best.is_none_or(|(r, _)| ratio > r) {
                best = Some((ratio, t));
            }
        }
    }
    let (mut current_ratio, t) = best?;
    let mut current = trial_decoration(h, t, seed, mode);
    let mut rng = rng_for(derive_path(seed, &[CLIMB_STREAM]));
    for step in 0..trials / 10 {
        let size = 0.5 / (1.0 + step as f64 / 50.0);
        let candidate = perturb(&current, &mut rng, mode, size);
        let (_, _, ratio) = holder_sides(&candidate, mode);
        if ratio > current_ratio {
            if let Some(cert) = accept(&candidate, mode) {
                return Some(cert);
            }
            current_ratio = ratio;
            current = candidate;
        }
    }
    None
}

/// A kernel with `|t(F1, U) − t(F2, U)| > 1e-6`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distinguisher {
    pub kernel: StepKernel,
    pub t1: f64,
    pub t2: f64,
    pub trial: usize,
}

/// Looks for a graphon separating the densities of two connected
/// non-isomorphic graphs. Trial 0 is the constant `1/2`; later trials are
/// random 2–4 part kernels with values in `[0, 1]`.
pub fn distinguishing_kernel_search(
    f1: &Graph,
    f2: &Graph,
    trials: usize,
    seed: u64,
) -> Result<Option<Distinguisher>> {
    for (name, f) in [("first", f1), ("second", f2)] {
        if f.edge_count() == 0 || !f.is_connected() {
            return Err(Error::Precondition(format!("{name} graph must be connected with an edge")));
        }
    }
    if are_isomorphic(f1, f2).is_some() {
        return Err(Error::Precondition("graphs are isomorphic; no kernel separates them".into()));
    }
    let candidate = |t: usize| {
        if t == 0 {
            return StepKernel::constant(0.5).expect("finite");
        }
        let mut rng = rng_for(derive_path(seed, &[DISTINGUISH_STREAM, t as u64]));
        let k = 2 + t % 3;
        let m = random_measures(&mut rng, k);
        random_kernel(&mut rng, &m, Mode::Weak)
    };
    Ok((0..trials).find_map(|t| {
        let kernel = candidate(t);
        let (t1, t2) = (density(f1, &kernel), density(f2, &kernel));
        ((t1 - t2).abs() > DISTINGUISH_GAP).then_some(Distinguisher { kernel, t1, t2, trial: t })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_are_reproducible() {
        let h = Graph::cycle(5);
        for t in 0..10 {
            assert_eq!(trial_decoration(&h, t, 3, Mode::Weak), trial_decoration(&h, t, 3, Mode::Weak));
            assert!(trial_decoration(&h, t, 3, Mode::Weak).all_nonnegative());
        }
    }

    #[test]
    fn triangle_is_refuted_and_edge_is_not() {
        let cert = holder_search(&Graph::complete(3), 10_000, 0, Mode::Weak).expect("violation");
        assert!(cert.validate().valid);
        assert!(holder_search(&Graph::path(2), 1000, 0, Mode::Weak).is_none());
        assert!(holder_search(&Graph::path(2), 1000, 0, Mode::Semi).is_none());
    }

    #[test]
    fn c4_c6_found_by_search() {
        let h = Graph::cycle(4).disjoint_union(&Graph::cycle(6));
        let cert = holder_search(&h, 1000, 0, Mode::Weak).expect("violation");
        assert!(cert.validate().valid);
    }

    #[test]
    fn c4_is_not_refuted() {
        for seed in 0..3 {
            assert!(holder_search(&Graph::cycle(4), 1000, seed, Mode::Weak).is_none());
        }
    }

    #[test]
    fn distinguishing_examples() {
        let hit = distinguishing_kernel_search(&Graph::cycle(4), &Graph::path(4), 10, 0)
            .unwrap()
            .unwrap();
        assert_eq!(hit.trial, 0);
        assert_eq!((hit.t1, hit.t2), (0.0625, 0.125));

        let sun = Graph::new(6, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]).unwrap();
        let hit = distinguishing_kernel_search(&Graph::cycle(6), &sun, 100, 0).unwrap().unwrap();
        assert!((density(&Graph::cycle(6), &hit.kernel) - density(&sun, &hit.kernel)).abs() > 1e-6);

        assert!(distinguishing_kernel_search(&Graph::cycle(4), &Graph::complete_bipartite(2, 2), 10, 0).is_err());
    }
}
