//! Chaos decomposition on a finite Rademacher space.
//!
//! Every functional has the expansion `F = E[F] + Σ_n J_n(f_n)` with
//! symmetric kernels vanishing on diagonals, where
//! `J_n(f) = n! Σ_{i_1<…<i_n} f(i_1, …, i_n) Y_{i_1} ⋯ Y_{i_n}`.
//! Internally a decomposition stores, for every subset `S` of coordinates
//! (as a bitmask), the coefficient `c_S = E[F Y_S] = |S|! f_{|S|}(S)`, so
//! that `F = Σ_S c_S Y_S`.
//!
//! The coefficients are obtained with a butterfly over the coordinates: for
//! coordinate `k`, the pair `(F_k^-, F_k^+)` is replaced by
//! `(q_k F_k^- + p_k F_k^+, sqrt(p_k q_k)(F_k^+ - F_k^-))`, i.e. the partial
//! expectation and the partial gradient. After all coordinates this is
//! `E[D^n F] = E[F Y_{k_1} ⋯ Y_{k_n}]` for every subset.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{check_functional, Enumeration, DEFAULT_ENUMERATION_CAP};
use crate::functional::{Functional, TableFunctional};
use crate::montecarlo::sample_rng;
use crate::space::{Configuration, RademacherSpace};

/// A symmetric kernel of order `n` vanishing on diagonals, stored by its
/// values on strictly increasing index tuples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Kernel {
    order: usize,
    entries: BTreeMap<Vec<usize>, f64>,
}

fn canonical_tuple(order: usize, tuple: &[usize]) -> Result<Vec<usize>> {
    if tuple.len() != order {
        return Err(Error::KernelOrderMismatch { expected: order, got: tuple.len() });
    }
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DiagonalTuple(tuple.to_vec()));
    }
    Ok(sorted)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl Kernel {
    pub fn new(order: usize) -> Self {
        Self { order, entries: BTreeMap::new() }
    }

    pub fn from_entries<I>(order: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut kernel = Self::new(order);
        for (tuple, value) in entries {
            kernel.insert(&tuple, value)?;
        }
        Ok(kernel)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Sets the value on the symmetry class of `tuple` (any order of the
    /// indices). Tuples with a repeated index are rejected.
    pub fn insert(&mut self, tuple: &[usize], value: f64) -> Result<()> {
        let key = canonical_tuple(self.order, tuple)?;
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Kernel value at any index tuple; zero on diagonals.
    pub fn get(&self, tuple: &[usize]) -> f64 {
        match canonical_tuple(self.order, tuple) {
            Ok(key) => self.entries.get(&key).copied().unwrap_or(0.0),
            Err(_) => 0.0,
        }
    }

    /// Stored `(strictly increasing tuple, value)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.entries.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().filter_map(|k| k.last().copied()).max()
    }

    /// `⟨f, g⟩` in `ℓ²` over ordered tuples, i.e. `n!` times the sum over
    /// increasing tuples.
    pub fn inner(&self, other: &Kernel) -> f64 {
        if self.order != other.order {
            return 0.0;
        }
        let sum: f64 = self
            .entries
            .iter()
            .filter_map(|(k, v)| other.entries.get(k).map(|w| v * w))
            .sum();
        factorial(self.order) * sum
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }
}

/// The multiple stochastic integral `J_n(f)` as a functional.
#[derive(Debug, Clone)]
pub struct MultipleIntegral {
    space: RademacherSpace,
    scale: f64,
    terms: Vec<(Vec<usize>, f64)>,
}

impl Functional for MultipleIntegral {
    fn index_count(&self) -> usize {
        self.space.len()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|(tuple, f)| f * tuple.iter().map(|&k| self.space.y(config.get(k), k)).product::<f64>())
            .sum();
        self.scale * sum
    }
}

pub fn multiple_integral(space: &RademacherSpace, kernel: &Kernel) -> Result<MultipleIntegral> {
    if let Some(max) = kernel.max_index() {
        space.check_index(max)?;
    }
    Ok(MultipleIntegral {
        space: space.clone(),
        scale: factorial(kernel.order()),
        terms: kernel.entries().map(|(t, v)| (t.to_vec(), v)).collect(),
    })
}

/// Mean plus chaos kernels of a functional on at most `cap` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosDecomposition {
    space: RademacherSpace,
    coeffs: Vec<f64>,
}

/// Ornstein-Uhlenbeck operations acting diagonally on the chaos.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuMode {
    /// `L`: order `n` scaled by `-n`.
    Generator,
    /// `L⁻¹`: order `n ≥ 1` scaled by `-1/n`; requires a centred input.
    Inverse,
    /// `P_t`: order `n` scaled by `e^{-nt}`.
    Semigroup(f64),
}

impl ChaosDecomposition {
    /// Builds a decomposition from subset coefficients `c_S = |S|! f(S)`.
    pub fn from_coefficients(space: &RademacherSpace, coeffs: Vec<f64>) -> Result<Self> {
        if space.len() >= usize::BITS as usize || coeffs.len() != 1usize << space.len() {
            return Err(Error::Invalid("coefficient vector must have length 2^m".into()));
        }
        Ok(Self { space: space.clone(), coeffs })
    }

    /// Mean plus kernels of orders `1..`.
    pub fn from_kernels(space: &RademacherSpace, mean: f64, kernels: &[Kernel]) -> Result<Self> {
        Enumeration::new(space, DEFAULT_ENUMERATION_CAP)?;
        let mut coeffs = vec![0.0; 1usize << space.len()];
        coeffs[0] = mean;
        for kernel in kernels {
            let scale = factorial(kernel.order());
            for (tuple, v) in kernel.entries() {
                let mut mask = 0usize;
                for &k in tuple {
                    space.check_index(k)?;
                    mask |= 1 << k;
                }
                coeffs[mask] += scale * v;
            }
        }
        Ok(Self { space: space.clone(), coeffs })
    }

    pub fn space(&self) -> &RademacherSpace {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.space.len()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficients `c_S = E[F Y_S]` indexed by subset mask.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f_n(k_1, …, k_n)`; zero on diagonals.
    pub fn kernel_value(&self, tuple: &[usize]) -> f64 {
        let mut mask = 0usize;
        for &k in tuple {
            if k >= self.m() || mask & (1 << k) != 0 {
                return 0.0;
            }
            mask |= 1 << k;
        }
        self.coeffs[mask] / factorial(tuple.len())
    }

    /// The order-`n` kernel, keeping entries with `|f_n| > threshold`.
    pub fn kernel_with_threshold(&self, order: usize, threshold: f64) -> Kernel {
        let scale = factorial(order);
        let mut kernel = Kernel::new(order);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if mask.count_ones() as usize == order && order > 0 && (c / scale).abs() > threshold {
                let tuple: Vec<usize> = (0..self.m()).filter(|k| mask & (1 << k) != 0).collect();
                kernel.entries.insert(tuple, c / scale);
            }
        }
        kernel
    }

    pub fn kernel(&self, order: usize) -> Kernel {
        self.kernel_with_threshold(order, 0.0)
    }

    /// Kernels of orders `1..=m`.
    pub fn kernels(&self) -> Vec<Kernel> {
        (1..=self.m()).map(|n| self.kernel(n)).collect()
    }

    /// `Σ_n n! ‖f_n‖²`.
    pub fn variance(&self) -> f64 {
        self.coeffs.iter().skip(1).map(|c| c * c).sum()
    }

    /// Values of the represented functional on every configuration.
    pub fn to_table(&self) -> Vec<f64> {
        let mut t = self.coeffs.clone();
        inverse_transform(&self.space, &mut t);
        t
    }

    pub fn to_functional(&self) -> TableFunctional {
        TableFunctional::new(self.m(), self.to_table()).expect("table length is 2^m")
    }

    fn map_orders(&self, scale: impl Fn(usize) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, &c)| if c == 0.0 { 0.0 } else { c * scale(mask.count_ones() as usize) })
            .collect();
        Self { space: self.space.clone(), coeffs }
    }
}

/// Stroock's formula: `f_n(k_1, …, k_n) = E[F Y_{k_1} ⋯ Y_{k_n}] / n!`.
pub fn stroock_decompose(space: &RademacherSpace, f: &dyn Functional) -> Result<ChaosDecomposition> {
    check_functional(space, f)?;
    let e = Enumeration::new(space, DEFAULT_ENUMERATION_CAP)?;
    Ok(decompose_table(space, e.tabulate(f)))
}

/// Decomposition of a functional given by its table of values.
pub fn decompose_table(space: &RademacherSpace, mut table: Vec<f64>) -> ChaosDecomposition {
    forward_transform(space, &mut table);
    ChaosDecomposition { space: space.clone(), coeffs: table }
}

fn forward_transform(space: &RademacherSpace, t: &mut [f64]) {
    for k in 0..space.len() {
        let bit = 1usize << k;
        let (p, q, c) = (space.p(k), space.q(k), space.sqrt_pq(k));
        for mask in 0..t.len() {
            if mask & bit == 0 {
                let minus = t[mask];
                let plus = t[mask | bit];
                t[mask] = q * minus + p * plus;
                t[mask | bit] = c * (plus - minus);
            }
        }
    }
}

fn inverse_transform(space: &RademacherSpace, t: &mut [f64]) {
    for k in 0..space.len() {
        let bit = 1usize << k;
        let (yp, ym) = (space.y_plus(k), space.y_minus(k));
        for mask in 0..t.len() {
            if mask & bit == 0 {
                let lo = t[mask];
                let hi = t[mask | bit];
                t[mask] = lo + hi * ym;
                t[mask | bit] = lo + hi * yp;
            }
        }
    }
}

/// Applies `L`, `L⁻¹` or `P_t` coefficientwise.
pub fn ou_transform(decomp: &ChaosDecomposition, mode: OuMode) -> Result<ChaosDecomposition> {
    match mode {
        OuMode::Generator => Ok(decomp.map_orders(|n| -(n as f64))),
        OuMode::Inverse => {
            // exact zero is required; callers centre by subtracting the mean
            let mean = decomp.mean();
            if mean.abs() > 1e-12 {
                return Err(Error::NotCentred { mean });
            }
            let mut out = decomp.map_orders(|n| if n == 0 { 0.0 } else { -1.0 / n as f64 });
            out.coeffs[0] = 0.0;
            Ok(out)
        }
        OuMode::Semigroup(t) => {
            if !(t >= 0.0) {
                return Err(Error::OutOfRange(format!("semigroup time {t} must be nonnegative")));
            }
            Ok(decomp.map_orders(|n| (-(n as f64) * t).exp()))
        }
    }
}

/// `D_k F = Σ_n n J_{n-1}(f_n(·, k))`: the coefficient of `Y_S` in `D_k F`
/// is `c_{S ∪ {k}}` for `k ∉ S`.
pub fn gradient_via_chaos(decomp: &ChaosDecomposition, k: usize) -> Result<ChaosDecomposition> {
    decomp.space.check_index(k)?;
    let bit = 1usize << k;
    let coeffs = (0..decomp.coeffs.len())
        .map(|mask| if mask & bit == 0 { decomp.coeffs[mask | bit] } else { 0.0 })
        .collect();
    Ok(ChaosDecomposition { space: decomp.space.clone(), coeffs })
}

/// Divergence of a process given by the decompositions of its components.
///
/// With `u_k = Σ_n J_n(g_{n+1}(·, k))`, `δ(u) = Σ_n J_{n+1}(g̃_{n+1} 1_Δ)`.
/// Symmetrizing `g_{n+1}` over all permutations averages over which slot
/// holds the distinguished index, so the coefficient of `Y_T` in `δ(u)` is
/// `Σ_{k∈T} c^{(k)}_{T∖{k}}`. Parts of `u_k` that involve `Y_k` lie on the
/// diagonal and are dropped.
pub fn divergence_of_decompositions(u: &[ChaosDecomposition]) -> Result<ChaosDecomposition> {
    let first = u.first().ok_or_else(|| Error::Empty("divergence of an empty process".into()))?;
    let space = first.space.clone();
    if u.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: u.len() });
    }
    let size = 1usize << space.len();
    let mut coeffs = vec![0.0; size];
    for (mask, out) in coeffs.iter_mut().enumerate() {
        let mut rest = mask;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            *out += u[k].coeffs[mask & !(1 << k)];
        }
    }
    Ok(ChaosDecomposition { space, coeffs })
}

/// `δ(u)` for a process `u = (u_0, …, u_{m-1})` of functionals.
pub fn divergence(space: &RademacherSpace, u: &[&dyn Functional]) -> Result<TableFunctional> {
    if u.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: u.len() });
    }
    let decomps = u
        .iter()
        .map(|uk| stroock_decompose(space, *uk))
        .collect::<Result<Vec<_>>>()?;
    Ok(divergence_of_decompositions(&decomps)?.to_functional())
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Mehler's formula `P_t F(ω) = E[F(X^t) | X = ω]`, estimated by sampling.
///
/// `X^t_k` equals an independent copy `X*_k` when an exponential clock
/// `Z_k` rings before `t`, and `ω_k` otherwise. Each coordinate is therefore
/// resampled from its own law with probability `1 - e^{-t}`. The clock and
/// the copy are drawn here and never stored. Sample `i` uses the counter
/// stream `(seed, i)`.
pub fn mehler_estimate(
    space: &RademacherSpace,
    f: &dyn Functional,
    t: f64,
    base: &Configuration,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_functional(space, f)?;
    space.check_config(base)?;
    if samples == 0 {
        return Err(Error::OutOfRange("at least one sample is required".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::OutOfRange(format!("time {t} must be nonnegative")));
    }
    let resample = 1.0 - (-t).exp();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut config = base.clone();
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        for k in 0..space.len() {
            let clock: f64 = rng.random();
            let copy: f64 = rng.random();
            let bit = if clock < resample { copy < space.p(k) } else { base.get(k) };
            config.set(k, bit);
        }
        let x = f.evaluate(&config);
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let stderr = if samples > 1 { (m2 / (samples - 1) as f64 / samples as f64).sqrt() } else { 0.0 };
    Ok(Estimate { estimate: mean, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::expectation_exact;
    use crate::functional::{Constant, Coordinate, CoordinateProduct, FnFunctional};
    use crate::gradient::gradient;

    fn configs(m: usize) -> impl Iterator<Item = Configuration> {
        (0..1u64 << m).map(move |mask| Configuration::from_mask(m, mask))
    }

    /// Stroock kernel by direct enumeration of `E[F Y_S] / n!`.
    fn naive_kernel_value(space: &RademacherSpace, f: &dyn Functional, tuple: &[usize]) -> f64 {
        let prod = CoordinateProduct::new(space, tuple).unwrap();
        let g = FnFunctional::new(space.len(), |c: &Configuration| f.evaluate(c) * prod.evaluate(c));
        expectation_exact(space, &g).unwrap() / factorial(tuple.len())
    }

    #[test]
    fn stroock_examples() {
        let space = RademacherSpace::new(vec![0.3, 0.6, 0.75]).unwrap();
        let f = CoordinateProduct::new(&space, &[0, 1]).unwrap();
        let d = stroock_decompose(&space, &f).unwrap();
        assert!(d.mean().abs() < 1e-12);
        assert!((d.kernel_value(&[0, 1]) - 0.5).abs() < 1e-12);
        assert!((d.kernel_value(&[1, 0]) - 0.5).abs() < 1e-12);
        for (mask, &c) in d.coefficients().iter().enumerate() {
            if mask != 0b011 {
                assert!(c.abs() < 1e-12, "mask {mask:b} has {c}");
            }
        }

        let c = Constant { m: 3, value: 4.0 };
        let d = stroock_decompose(&space, &c).unwrap();
        assert!((d.mean() - 4.0).abs() < 1e-12);
        assert!(d.coefficients()[1..].iter().all(|c| c.abs() < 1e-12));

        let y = Coordinate::new(&space, 2).unwrap();
        let d = stroock_decompose(&space, &y).unwrap();
        assert!((d.kernel_value(&[2]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn butterfly_matches_direct_stroock() {
        let space = RademacherSpace::new(vec![0.2, 0.55, 0.7, 0.35]).unwrap();
        let f = FnFunctional::new(4, |c: &Configuration| ((c.mask() * 7 + 3) as f64).sin() * 2.0);
        let d = stroock_decompose(&space, &f).unwrap();
        for mask in 1usize..16 {
            let tuple: Vec<usize> = (0..4).filter(|k| mask & (1 << k) != 0).collect();
            let direct = naive_kernel_value(&space, &f, &tuple);
            assert!((direct - d.kernel_value(&tuple)).abs() < 1e-12);
        }
    }

    #[test]
    fn multiple_integral_examples() {
        let space = RademacherSpace::new(vec![0.25, 0.6]).unwrap();
        let k = Kernel::from_entries(1, vec![(vec![1], 3.0)]).unwrap();
        let j = multiple_integral(&space, &k).unwrap();
        let y = Coordinate::new(&space, 1).unwrap();
        assert!(configs(2).all(|c| (j.evaluate(&c) - 3.0 * y.evaluate(&c)).abs() < 1e-12));

        let k = Kernel::from_entries(2, vec![(vec![0, 1], 0.5)]).unwrap();
        let j = multiple_integral(&space, &k).unwrap();
        let yy = CoordinateProduct::new(&space, &[0, 1]).unwrap();
        assert!(configs(2).all(|c| (j.evaluate(&c) - yy.evaluate(&c)).abs() < 1e-12));

        let j = multiple_integral(&space, &Kernel::new(2)).unwrap();
        assert!(configs(2).all(|c| j.evaluate(&c) == 0.0));

        let bad = Kernel::from_entries(1, vec![(vec![5], 1.0)]).unwrap();
        assert!(multiple_integral(&space, &bad).is_err());
    }

    #[test]
    fn kernel_rejects_diagonals() {
        let mut k = Kernel::new(2);
        assert_eq!(k.insert(&[1, 1], 1.0), Err(Error::DiagonalTuple(vec![1, 1])));
        assert!(matches!(k.insert(&[1], 1.0), Err(Error::KernelOrderMismatch { .. })));
        k.insert(&[3, 1], 2.0).unwrap();
        assert_eq!(k.get(&[1, 3]), 2.0);
        assert_eq!(k.entries().next().unwrap().0, &[1, 3]);
        assert_eq!(k.norm_squared(), 8.0);
    }

    #[test]
    fn ou_examples() {
        let space = RademacherSpace::new(vec![0.3, 0.6, 0.45]).unwrap();
        let y = Coordinate::new(&space, 1).unwrap();
        let d = stroock_decompose(&space, &y).unwrap();
        let inv = ou_transform(&d, OuMode::Inverse).unwrap();
        assert!((inv.kernel_value(&[1]) + 1.0).abs() < 1e-12);

        let f = CoordinateProduct::new(&space, &[0, 2]).unwrap();
        let d = stroock_decompose(&space, &f).unwrap();
        let pt = ou_transform(&d, OuMode::Semigroup(0.7)).unwrap();
        let table = pt.to_table();
        for (mask, c) in configs(3).enumerate() {
            assert!((table[mask] - (-1.4f64).exp() * f.evaluate(&c)).abs() < 1e-12);
        }
        let p0 = ou_transform(&d, OuMode::Semigroup(0.0)).unwrap();
        assert_eq!(p0, d);

        let c = Constant { m: 3, value: 2.0 };
        let d = stroock_decompose(&space, &c).unwrap();
        let l = ou_transform(&d, OuMode::Generator).unwrap();
        assert!(l.to_table().iter().all(|v| v.abs() < 1e-12));
        assert!(matches!(ou_transform(&d, OuMode::Inverse), Err(Error::NotCentred { .. })));
    }

    #[test]
    fn gradient_via_chaos_examples() {
        let space = RademacherSpace::new(vec![0.3, 0.6, 0.2]).unwrap();
        let f = CoordinateProduct::new(&space, &[0, 1]).unwrap();
        let d = stroock_decompose(&space, &f).unwrap();
        let g = gradient_via_chaos(&d, 0).unwrap();
        assert!((g.kernel_value(&[1]) - 1.0).abs() < 1e-12);
        let table = g.to_table();
        let path = gradient(&space, &f, 0).unwrap();
        for (mask, c) in configs(3).enumerate() {
            assert!((table[mask] - path.evaluate(&c)).abs() < 1e-12);
        }

        let c = stroock_decompose(&space, &Constant { m: 3, value: 5.0 }).unwrap();
        let g = gradient_via_chaos(&c, 1).unwrap();
        assert!(g.coefficients().iter().all(|x| x.abs() < 1e-12));

        let y = stroock_decompose(&space, &Coordinate::new(&space, 2).unwrap()).unwrap();
        let g = gradient_via_chaos(&y, 2).unwrap();
        assert!((g.mean() - 1.0).abs() < 1e-12);
        assert!(g.coefficients()[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn divergence_examples() {
        let space = RademacherSpace::new(vec![0.35, 0.7]).unwrap();
        let one = Constant { m: 2, value: 1.0 };
        let zero = Constant { m: 2, value: 0.0 };
        let d = divergence(&space, &[&one, &zero]).unwrap();
        let y1 = Coordinate::new(&space, 0).unwrap();
        assert!(configs(2).all(|c| (d.evaluate(&c) - y1.evaluate(&c)).abs() < 1e-12));

        let d = divergence(&space, &[&zero, &zero]).unwrap();
        assert!(configs(2).all(|c| d.evaluate(&c).abs() < 1e-12));

        let f = CoordinateProduct::new(&space, &[0, 1]).unwrap();
        let d0 = gradient(&space, &f, 0).unwrap();
        let d1 = gradient(&space, &f, 1).unwrap();
        let delta = divergence(&space, &[&d0, &d1]).unwrap();
        assert!(configs(2).all(|c| (delta.evaluate(&c) - 2.0 * f.evaluate(&c)).abs() < 1e-12));
    }

    #[test]
    fn mehler_examples() {
        let space = RademacherSpace::new(vec![0.3, 0.6, 0.8]).unwrap();
        let f = FnFunctional::new(3, |c: &Configuration| c.count_ones() as f64 * 0.7 + (c.mask() as f64));
        let base = Configuration::from_mask(3, 0b101);
        let e0 = mehler_estimate(&space, &f, 0.0, &base, 50, 1).unwrap();
        assert_eq!(e0.estimate, f.evaluate(&base));
        assert_eq!(e0.stderr, 0.0);

        let mean = expectation_exact(&space, &f).unwrap();
        let e = mehler_estimate(&space, &f, 50.0, &base, 20_000, 2).unwrap();
        assert!((e.estimate - mean).abs() < 3.0 * e.stderr, "{e:?} vs {mean}");

        let y = Coordinate::new(&space, 0).unwrap();
        let t: f64 = 0.4;
        let e = mehler_estimate(&space, &y, t, &base, 20_000, 3).unwrap();
        let want = (-t).exp() * y.evaluate(&base);
        assert!((e.estimate - want).abs() < 3.0 * e.stderr, "{e:?} vs {want}");
        assert!(mehler_estimate(&space, &y, t, &base, 0, 3).is_err());
    }
}
