#![allow(dead_code)]

use graphnorm::{Graph, StepKernel};
use proptest::prelude::*;

/// Graphs on `1..=max_n` vertices with each possible edge present or not.
pub fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            Graph::new(n, pairs.iter().zip(&mask).filter(|(_, &b)| b).map(|(&e, _)| e)).unwrap()
        })
    })
}

pub fn graph_with_edges(max_n: usize) -> impl Strategy<Value = Graph> {
    graph(max_n).prop_filter("needs an edge", |g| g.edge_count() > 0)
}

pub fn measures(k: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, k).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let mut m: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let head: f64 = m[..m.len() - 1].iter().sum();
        let last = m.len() - 1;
        m[last] = 1.0 - head;
        m
    })
}

fn kernel_on(k: usize, lo: f64, hi: f64) -> impl Strategy<Value = StepKernel> {
    (measures(k), proptest::collection::vec(lo..hi, k * k)).prop_map(move |(m, vals)| {
        StepKernel::from_fn(m, |i, j| vals[i * k + j]).unwrap()
    })
}

/// Signed kernels with `1..=max_k` parts and values in `[-1, 1]`.
pub fn kernel(max_k: usize) -> impl Strategy<Value = StepKernel> {
    (1..=max_k).prop_flat_map(|k| kernel_on(k, -1.0, 1.0))
}

/// Graphons with `1..=max_k` parts.
pub fn graphon(max_k: usize) -> impl Strategy<Value = StepKernel> {
    (1..=max_k).prop_flat_map(|k| kernel_on(k, 0.0, 1.0))
}

/// `k` kernels sharing one random partition.
pub fn kernels_on_shared_partition(
    parts: usize,
    count: usize,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = Vec<StepKernel>> {
    (measures(parts), proptest::collection::vec(proptest::collection::vec(lo..hi, parts * parts), count))
        .prop_map(move |(m, tables)| {
            tables
                .into_iter()
                .map(|vals| StepKernel::from_fn(m.clone(), |i, j| vals[i * parts + j]).unwrap())
                .collect()
        })
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Close in relative terms, or both below `floor` in absolute value.
pub fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    relative_error(a, b) <= rel || (a.abs() < floor && b.abs() < floor)
}
