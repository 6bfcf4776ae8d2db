mod common;

use common::*;
use graphnorm::density::{
    decorated_density, decorated_density_bruteforce, density_exact, density_with_order,
    order_width,
};
use graphnorm::kernel::{common_refinement, SpecialKernelSpec};
use graphnorm::{density, density_bruteforce, elimination_plan, norm_rh, Decoration, Graph, StepKernel};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::sample::subsequence;

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_bruteforce(h in graph(6), w in kernel(4)) {
        let fast = density(&h, &w);
        let slow = density_bruteforce(&h, &w).unwrap();
        // signed sums are compared against the scale of |W|
        let scale = density_bruteforce(&h, &w.abs()).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE), "{fast} vs {slow}");
    }

    #[test]
    fn graphon_densities_match_bruteforce_relatively(h in graph(6), w in graphon(4)) {
        let fast = density(&h, &w);
        let slow = density_bruteforce(&h, &w).unwrap();
        prop_assert!(relative_error(fast, slow) <= 1e-10, "{fast} vs {slow}");
    }

    #[test]
    fn decorated_matches_bruteforce(h in graph_with_edges(5), parts in 1usize..4, seed in any::<u64>()) {
        let mut rng = graphnorm::seeds::rng_for(seed);
        use rand::Rng;
        let m: Vec<f64> = vec![1.0 / parts as f64; parts];
        let d = Decoration::from_fn(h.clone(), |_| {
            StepKernel::from_fn(m.clone(), |_, _| rng.gen_range(0.0..1.0)).unwrap()
        }).unwrap();
        let fast = decorated_density(&d);
        let slow = decorated_density_bruteforce(&d).unwrap();
        prop_assert!(relative_error(fast, slow) <= 1e-10);
    }

    #[test]
    fn invariant_under_relabelling((h, perm) in graph(7).prop_flat_map(|h| {
        let n = h.vertex_count();
        (Just(h), permutation(n))
    }), w in kernel(3)) {
        let g = h.relabel(&perm).unwrap();
        let scale = density(&h, &w.abs());
        prop_assert!((density(&h, &w) - density(&g, &w)).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn invariant_under_part_permutation(h in graph(6), (w, perm) in kernel(4).prop_flat_map(|w| {
        let k = w.parts();
        (Just(w), permutation(k))
    })) {
        let p = w.permute_parts(&perm).unwrap();
        let scale = density(&h, &w.abs());
        prop_assert!((density(&h, &w) - density(&h, &p)).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn multiplicative_over_components(g1 in graph(5), g2 in graph(5), w in graphon(4)) {
        let joint = density(&g1.disjoint_union(&g2), &w);
        let split = density(&g1, &w) * density(&g2, &w);
        prop_assert!(relative_error(joint, split) <= 1e-12, "{joint} vs {split}");
    }

    #[test]
    fn norm_is_homogeneous(h in graph_with_edges(6), w in kernel(4), c in -3.0f64..3.0) {
        let scaled = norm_rh(&h, &w.scale(c).unwrap()).unwrap();
        let expected = c.abs() * norm_rh(&h, &w).unwrap();
        prop_assert!(relative_error(scaled, expected) <= 1e-12, "{scaled} vs {expected}");
    }

    #[test]
    fn refinement_preserves_density(h in graph(5), w1 in kernel(3), w2 in kernel(3)) {
        let (r1, r2) = common_refinement(&w1, &w2).unwrap();
        prop_assert_eq!(r1.parts(), w1.parts() * w2.parts());
        for (w, r) in [(&w1, &r1), (&w2, &r2)] {
            let scale = density(&h, &w.abs());
            prop_assert!((density(&h, w) - density(&h, r)).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn any_order_gives_the_same_value((h, order) in graph(6).prop_flat_map(|h| {
        let n = h.vertex_count();
        (Just(h), permutation(n))
    }), w in graphon(4)) {
        let a = density(&h, &w);
        let b = density_with_order(&h, &w, &order).unwrap();
        prop_assert!(relative_error(a, b) <= 1e-12);
        let plan = elimination_plan(&h);
        prop_assert_eq!(order_width(&h, &plan.order).unwrap(), plan.width);
    }

    #[test]
    fn exact_density_agrees_with_float(h in graph(5), w in graphon(3)) {
        let exact = density_exact(&h, &w).to_f64().unwrap();
        prop_assert!(relative_error(exact, density(&h, &w)) <= 1e-12);
    }

    #[test]
    fn special_kernel_power_sum(a in proptest::collection::vec(-1.0f64..1.0, 1..=10), pick in 0usize..2) {
        let h = [Graph::cycle(4), Graph::star(2)][pick].clone();
        let gamma = h.vertex_count() as f64 / h.edge_count() as f64;
        let w = StepKernel::special(&SpecialKernelSpec::new(gamma, a.clone()).unwrap());
        let m = h.edge_count() as i32;
        let sum: f64 = a.iter().map(|x| x.powi(m)).sum();
        prop_assert!(close(density(&h, &w), sum, 1e-10, 1e-300));
    }

    #[test]
    fn edge_subgraph_densities_need_no_isolated_vertices(h in graph_with_edges(5), keep in subsequence((0..10).collect::<Vec<_>>(), 0..=3)) {
        // isolated vertices contribute a factor of one
        let mut g = h.clone();
        for _ in &keep {
            g = g.disjoint_union(&Graph::empty(1));
        }
        let w = StepKernel::half_square();
        prop_assert_eq!(density(&h, &w), density(&g, &w));
    }
}

#[test]
fn half_square_gives_two_to_minus_v() {
    let u = StepKernel::half_square();
    for (h, expected) in [
        (Graph::path(2), 0.25),
        (Graph::star(2), 0.125),
        (Graph::cycle(4), 0.0625),
        (Graph::cycle(6), 1.0 / 64.0),
    ] {
        assert_eq!(density(&h, &u), expected);
    }
}

#[test]
fn special_kernel_on_c4() {
    let w = StepKernel::special(&SpecialKernelSpec::new(1.0, vec![1.0, 1.0]).unwrap());
    assert_eq!(density(&Graph::cycle(4), &w), 2.0);
}

#[test]
fn single_edge_decoration_on_c4() {
    let h = Graph::cycle(4);
    let u = StepKernel::half_square();
    let one = StepKernel::constant_on(vec![0.5, 0.5], 1.0).unwrap();
    let d = Decoration::from_fn(h, |e| if e == 0 { u.clone() } else { one.clone() }).unwrap();
    assert_eq!(decorated_density(&d), 0.25);
    assert_eq!(decorated_density_bruteforce(&d).unwrap(), 0.25);
}
