//! Symmetric step kernels on finite partitions of a probability space.
//!
//! A [`StepKernel`] is constant on every block `Ω_i × Ω_j` of a finite
//! partition `Ω = Ω_1 ⊔ … ⊔ Ω_k`. It stands in for general bounded symmetric
//! functions: values may be negative or exceed one. Being a graphon is a
//! predicate ([`StepKernel::is_graphon`]), not an invariant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Tolerance on `Σ measures = 1`.
pub const MEASURE_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct StepKernel {
    measures: Vec<f64>,
    // row-major k × k, symmetric
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    measures: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<KernelRepr> for StepKernel {
    type Error = Error;

    fn try_from(repr: KernelRepr) -> Result<Self> {
        StepKernel::new(repr.measures, repr.values)
    }
}

impl From<StepKernel> for KernelRepr {
    fn from(w: StepKernel) -> Self {
        let k = w.parts();
        KernelRepr {
            values: w.values.chunks(k).map(<[f64]>::to_vec).collect(),
            measures: w.measures,
        }
    }
}

fn validate_measures(measures: &[f64]) -> Result<()> {
    if measures.is_empty() {
        return Err(Error::InvalidKernel("partition has no parts".into()));
    }
    if let Some(m) = measures.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(Error::InvalidKernel(format!(
            "part measures must be positive and finite, found {m}"
        )));
    }
    let sum: f64 = measures.iter().sum();
    if (sum - 1.0).abs() > MEASURE_SUM_TOLERANCE {
        return Err(Error::InvalidKernel(format!(
            "part measures sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// `2^x`, exact whenever `x` is an integer in the normal range.
pub(crate) fn pow2(x: f64) -> f64 {
    if x.fract() == 0.0 && (-1022.0..=1023.0).contains(&x) {
        f64::from_bits(((x as i64 + 1023) as u64) << 52)
    } else {
        x.exp2()
    }
}

impl StepKernel {
    /// Builds a kernel from part measures and a full value matrix; the matrix
    /// must be exactly symmetric.
    pub fn new(measures: Vec<f64>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        validate_measures(&measures)?;
        let k = measures.len();
        if matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidKernel(format!(
                "value matrix must be {k} x {k} to match the partition"
            )));
        }
        for i in 0..k {
            for j in 0..k {
                let x = matrix[i][j];
                if !x.is_finite() {
                    return Err(Error::InvalidKernel(format!("value ({i},{j}) = {x} is not finite")));
                }
                if x != matrix[j][i] {
                    return Err(Error::InvalidKernel(format!(
                        "values ({i},{j}) = {x} and ({j},{i}) = {} differ",
                        matrix[j][i]
                    )));
                }
            }
        }
        Ok(StepKernel {
            measures,
            values: matrix.into_iter().flatten().collect(),
        })
    }

    /// Builds a kernel by evaluating `f(i, j)` for `i <= j` and mirroring.
    pub fn from_fn(measures: Vec<f64>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        validate_measures(&measures)?;
        let k = measures.len();
        let mut values = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let x = f(i, j);
                if !x.is_finite() {
                    return Err(Error::InvalidKernel(format!("value ({i},{j}) = {x} is not finite")));
                }
                values[i * k + j] = x;
                values[j * k + i] = x;
            }
        }
        Ok(StepKernel { measures, values })
    }

    /// The constant kernel `p` on a single part.
    pub fn constant(p: f64) -> Result<Self> {
        Self::constant_on(vec![1.0], p)
    }

    /// The constant kernel `p` on a given partition.
    pub fn constant_on(measures: Vec<f64>, p: f64) -> Result<Self> {
        Self::from_fn(measures, |_, _| p)
    }

    /// `1` on `X × X` for a part `X` of measure 1/2, zero elsewhere.
    pub fn half_square() -> Self {
        Self::from_fn(vec![0.5, 0.5], |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 })
            .expect("half-square kernel is valid")
    }

    /// The diagonal dyadic kernel `W_{γ,a}` truncated after `a.len()` parts.
    ///
    /// Part `i` (1-based) has measure `2^{-i}` and diagonal value
    /// `2^{iγ} a_i`; a final zero-valued part of measure `2^{-N}` carries the
    /// truncated tail. For connected `F` with `m` edges the truncation error in
    /// `t(F, |W_{γ,a}|)` is exactly `Σ_{i>N} |a_i|^m`.
    pub fn special(spec: &SpecialKernelSpec) -> Self {
        let n = spec.a.len();
        let mut measures: Vec<f64> = (1..=n).map(|i| pow2(-(i as f64))).collect();
        measures.push(pow2(-(n as f64)));
        Self::from_fn(measures, |i, j| {
            if i == j && i < n {
                pow2((i + 1) as f64 * spec.gamma) * spec.a[i]
            } else {
                0.0
            }
        })
        .expect("special kernel spec was validated")
    }

    /// One draw from the block-random model `𝕌(n, d)`: `n` parts of measure
    /// `1/n`, block `(i, j)` for `i <= j` drawn independently from `d`.
    ///
    /// Block `(i, j)` uses keystream position `i * n + j` of `seed`, so the
    /// kernel is identical however the blocks are visited.
    pub fn sample_block_random(n: usize, d: &DiracMixture, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("block-random kernel needs n >= 1".into()));
        }
        let width = n as u64;
        Self::from_fn(vec![1.0 / n as f64; n], |i, j| {
            d.sample(seeds::uniform_at(seed, i as u64 * width + j as u64))
        })
    }

    pub fn parts(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.parts() + j]
    }

    /// Row-major `k × k` value table.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Upper-triangular block values `(i, j)`, `i <= j`, in row-major order.
    pub fn block_values(&self) -> Vec<f64> {
        let k = self.parts();
        (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).map(|(i, j)| self.value(i, j)).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&x| x >= 0.0)
    }

    pub fn is_graphon(&self) -> bool {
        self.values.iter().all(|&x| (0.0..=1.0).contains(&x))
    }

    pub fn same_partition(&self, other: &StepKernel) -> bool {
        self.measures == other.measures
    }

    /// Applies `f` to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let k = self.parts();
        Self::from_fn(self.measures.clone(), |i, j| f(self.values[i * k + j]))
    }

    /// Combines two kernels on the same partition value by value.
    pub fn zip_with(&self, other: &StepKernel, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_partition(other) {
            return Err(Error::PartitionMismatch);
        }
        let k = self.parts();
        Self::from_fn(self.measures.clone(), |i, j| {
            f(self.values[i * k + j], other.values[i * k + j])
        })
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs).expect("abs of finite values is finite")
    }

    pub fn scale(&self, alpha: f64) -> Result<Self> {
        self.map(|x| alpha * x)
    }

    pub fn add(&self, other: &StepKernel) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &StepKernel) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &StepKernel, beta: f64) -> Result<Self> {
        self.zip_with(other, |x, y| alpha * x + beta * y)
    }

    /// Reorders the parts: part `p` of the result is part `perm[p]` of `self`.
    pub fn permute_parts(&self, perm: &[usize]) -> Result<Self> {
        let k = self.parts();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(Error::Precondition("not a permutation of the parts".into()));
        }
        Self::from_fn(perm.iter().map(|&p| self.measures[p]).collect(), |i, j| {
            self.value(perm[i], perm[j])
        })
    }
}

/// Re-expresses two kernels on the product partition `{A_i ∩ B_j}`, where
/// part `(i, j)` (row-major) has measure `μ_i μ'_j`. Densities are unchanged.
pub fn common_refinement(w1: &StepKernel, w2: &StepKernel) -> Result<(StepKernel, StepKernel)> {
    let (k1, k2) = (w1.parts(), w2.parts());
    let measures: Vec<f64> = w1
        .measures
        .iter()
        .flat_map(|&a| w2.measures.iter().map(move |&b| a * b))
        .collect();
    let r1 = StepKernel::from_fn(measures.clone(), |p, q| w1.value(p / k2, q / k2))?;
    let r2 = StepKernel::from_fn(measures, |p, q| w2.value(p % k2, q % k2))?;
    debug_assert_eq!(r1.parts(), k1 * k2);
    Ok((r1, r2))
}

/// Parameters of the dyadic diagonal kernel `W_{γ,a}`; the truncation depth
/// is `a.len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialKernelSpec {
    pub gamma: f64,
    pub a: Vec<f64>,
}

impl SpecialKernelSpec {
    pub fn new(gamma: f64, a: Vec<f64>) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidKernel(format!("gamma must be positive, got {gamma}")));
        }
        if a.is_empty() || a.len() > 1000 {
            return Err(Error::InvalidKernel(format!(
                "truncation depth must be in 1..=1000, got {}",
                a.len()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidKernel("sequence entries must be finite".into()));
        }
        if a.iter().enumerate().any(|(i, x)| !(pow2((i + 1) as f64 * gamma) * x).is_finite()) {
            return Err(Error::InvalidKernel("block value overflows".into()));
        }
        Ok(SpecialKernelSpec { gamma, a })
    }

    pub fn depth(&self) -> usize {
        self.a.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub probability: f64,
}

/// A finitely supported probability distribution on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracMixture {
    atoms: Vec<Atom>,
}

impl DiracMixture {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        for &(value, probability) in &atoms {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidDistribution(format!("atom {value} outside [0, 1]")));
            }
            if !(probability.is_finite() && probability > 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {probability} must be positive"
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MEASURE_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(DiracMixture {
            atoms: atoms
                .into_iter()
                .map(|(value, probability)| Atom { value, probability })
                .collect(),
        })
    }

    /// The Dirac measure at `p`.
    pub fn point(p: f64) -> Result<Self> {
        Self::new(vec![(p, 1.0)])
    }

    /// `½·1{0} + ½·1{1}`.
    pub fn d1() -> Self {
        Self::new(vec![(0.0, 0.5), (1.0, 0.5)]).expect("valid")
    }

    /// `¼·1{0} + ½·1{½} + ¼·1{1}`.
    pub fn d2() -> Self {
        Self::new(vec![(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)]).expect("valid")
    }

    /// `¼(1{0} + 1{ε} + 1{1−ε} + 1{1})`.
    pub fn d3(eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Self::new(vec![(0.0, 0.25), (eps, 0.25), (1.0 - eps, 0.25), (1.0, 0.25)])
    }

    /// `¼(1{0} + 1{ε/2} + 1{½} + 1{(1+ε)/2})`.
    pub fn d4(eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Self::new(vec![
            (0.0, 0.25),
            (eps / 2.0, 0.25),
            (0.5, 0.25),
            ((1.0 + eps) / 2.0, 0.25),
        ])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.probability).sum()
    }

    /// Inverse-CDF draw for a uniform `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        let mut cumulative = 0.0;
        for atom in &self.atoms {
            cumulative += atom.probability;
            if u < cumulative {
                return atom.value;
            }
        }
        self.atoms.last().expect("nonempty").value
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("epsilon must lie in (0, 1), got {eps}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_kernels() {
        assert!(StepKernel::new(vec![0.5, 0.4], vec![vec![0.0; 2]; 2]).is_err());
        assert!(StepKernel::new(vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![0.5, 0.0]]).is_err());
        assert!(StepKernel::new(vec![1.0], vec![vec![f64::NAN]]).is_err());
        assert!(StepKernel::new(vec![1.5, -0.5], vec![vec![0.0; 2]; 2]).is_err());
        assert!(StepKernel::new(vec![0.5, 0.5], vec![vec![0.0; 3]; 2]).is_err());
        let json = r#"{"measures":[0.5,0.5],"values":[[1,2],[3,4]]}"#;
        assert!(serde_json::from_str::<StepKernel>(json).is_err());
    }

    #[test]
    fn json_layout() {
        let w = StepKernel::half_square();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"measures":[0.5,0.5],"values":[[1.0,0.0],[0.0,0.0]]}"#);
        assert_eq!(serde_json::from_str::<StepKernel>(&s).unwrap(), w);
    }

    #[test]
    fn special_kernel_examples() {
        let w = StepKernel::special(&SpecialKernelSpec::new(1.0, vec![1.0]).unwrap());
        assert_eq!(w.measures(), &[0.5, 0.5]);
        assert_eq!(w.values(), &[2.0, 0.0, 0.0, 0.0]);

        let w = StepKernel::special(&SpecialKernelSpec::new(1.0, vec![1.0, 1.0]).unwrap());
        assert_eq!(w.measures(), &[0.5, 0.25, 0.25]);
        assert_eq!(w.value(0, 0), 2.0);
        assert_eq!(w.value(1, 1), 4.0);
        assert_eq!(w.value(2, 2), 0.0);
        assert_eq!(w.value(0, 1), 0.0);
    }

    #[test]
    fn special_kernel_measures_are_exactly_dyadic() {
        for n in 1..=50 {
            let w = StepKernel::special(&SpecialKernelSpec::new(1.5, vec![1.0; n]).unwrap());
            let sum: f64 = w.measures().iter().sum();
            assert_eq!(sum, 1.0, "depth {n}");
            for (i, m) in w.measures()[..n].iter().enumerate() {
                assert_eq!(*m, 0.5f64.powi(i as i32 + 1));
            }
        }
    }

    #[test]
    fn special_spec_validation() {
        assert!(SpecialKernelSpec::new(0.0, vec![1.0]).is_err());
        assert!(SpecialKernelSpec::new(1.0, vec![]).is_err());
        assert!(SpecialKernelSpec::new(1.0, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn pow2_is_exact_on_integers() {
        for e in -60..60 {
            assert_eq!(pow2(e as f64), 2f64.powi(e));
        }
        assert!((pow2(1.5) - 2f64.sqrt() * 2.0).abs() < 1e-15);
    }

    #[test]
    fn half_square_layout() {
        let w = StepKernel::half_square();
        assert_eq!(w.measures(), &[0.5, 0.5]);
        assert_eq!(w.values(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(w.is_graphon());
    }

    #[test]
    fn dirac_means() {
        assert_eq!(DiracMixture::d1().mean(), 0.5);
        assert_eq!(DiracMixture::d2().mean(), 0.5);
        for eps in [0.1, 0.25, 0.5, 0.9] {
            assert!((DiracMixture::d3(eps).unwrap().mean() - 0.5).abs() < 1e-15);
            let d4 = DiracMixture::d4(eps).unwrap().mean();
            assert!((d4 - (1.0 + eps) / 4.0).abs() < 1e-15);
        }
        assert_eq!(DiracMixture::d4(0.5).unwrap().mean(), 0.375);
    }

    #[test]
    fn dirac_epsilon_range() {
        for eps in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(DiracMixture::d3(eps).is_err());
            assert!(DiracMixture::d4(eps).is_err());
        }
        assert!(DiracMixture::new(vec![(1.5, 1.0)]).is_err());
        assert!(DiracMixture::new(vec![(0.5, 0.6)]).is_err());
    }

    #[test]
    fn sampling_examples() {
        let d = DiracMixture::d1();
        let w = StepKernel::sample_block_random(1, &d, 3).unwrap();
        assert_eq!(w.parts(), 1);
        assert!(w.value(0, 0) == 0.0 || w.value(0, 0) == 1.0);

        let point = DiracMixture::point(0.3).unwrap();
        for seed in 0..5 {
            let w = StepKernel::sample_block_random(7, &point, seed).unwrap();
            assert!(w.values().iter().all(|&x| x == 0.3));
        }
        let w = StepKernel::sample_block_random(1, &point, 0).unwrap();
        assert_eq!(w, StepKernel::constant(0.3).unwrap());
        assert!(StepKernel::sample_block_random(0, &d, 0).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = DiracMixture::d2();
        let a = StepKernel::sample_block_random(40, &d, 11).unwrap();
        let b = StepKernel::sample_block_random(40, &d, 11).unwrap();
        let c = StepKernel::sample_block_random(40, &d, 12).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn pointwise_examples() {
        let w = StepKernel::constant(-0.5).unwrap().abs();
        assert_eq!(w, StepKernel::constant(0.5).unwrap());
        let h = StepKernel::half_square();
        let zero = h.combine(1.0, &h, -1.0).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
        let err = h.add(&StepKernel::constant(1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::PartitionMismatch));
        assert!(err.to_string().contains("common_refinement"));
    }

    #[test]
    fn refinement_shapes() {
        let (a, b) =
            common_refinement(&StepKernel::constant(0.2).unwrap(), &StepKernel::constant(0.7).unwrap())
                .unwrap();
        assert_eq!(a, StepKernel::constant(0.2).unwrap());
        assert_eq!(b, StepKernel::constant(0.7).unwrap());

        let three = StepKernel::from_fn(vec![0.2, 0.3, 0.5], |i, j| (i + j) as f64).unwrap();
        let (a, b) = common_refinement(&StepKernel::half_square(), &three).unwrap();
        assert_eq!(a.parts(), 6);
        assert!(a.same_partition(&b));
        assert_eq!(a.value(0, 2), 1.0);
        assert_eq!(a.value(0, 3), 0.0);
        assert_eq!(b.value(1, 5), 3.0);
    }

    #[test]
    fn permute_parts_rejects_non_permutations() {
        let w = StepKernel::half_square();
        assert!(w.permute_parts(&[0, 0]).is_err());
        let p = w.permute_parts(&[1, 0]).unwrap();
        assert_eq!(p.value(1, 1), 1.0);
    }
}
