//! Rademacher functionals `F: {-1, +1}^m → ℝ` and their optional analytic
//! gradient oracles.

use crate::error::{Error, Result};
use crate::space::{Configuration, RademacherSpace};

/// A deterministic real-valued function of a configuration.
pub trait Functional: Sync {
    /// Number of coordinates `m` the functional reads.
    fn index_count(&self) -> usize;

    fn evaluate(&self, config: &Configuration) -> f64;

    /// Analytic first/second gradients and the interaction structure, when the
    /// functional knows them. Pathwise recomputation is used otherwise.
    fn oracles(&self) -> Option<&dyn GradientOracles> {
        None
    }

    /// A measure-preserving relabeling group of the coordinates under which
    /// the functional is invariant.
    fn symmetry(&self) -> Option<&dyn IndexSymmetry> {
        None
    }

    /// Exact `(mean, variance)` when available in closed form.
    fn known_moments(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Analytic gradient information for a functional.
///
/// `gradient(c, k)` must equal the pathwise `D_k F(c)` and
/// `second_gradient(c, k, l)` must equal `D_l D_k F(c)`. `interacts(k, l)`
/// must be true whenever `D_l D_k F` is not identically zero.
pub trait GradientOracles: Functional {
    fn gradient(&self, config: &Configuration, k: usize) -> f64;

    fn second_gradient(&self, config: &Configuration, k: usize, l: usize) -> f64;

    /// Indices `l ≠ k` with `D_l D_k F` not identically zero.
    fn interactions(&self, k: usize) -> Vec<usize>;

    fn interacts(&self, k: usize, l: usize) -> bool {
        k != l && self.interactions(k).contains(&l)
    }

    /// Evaluates `F`, a set of first gradients and a set of second gradients
    /// at one configuration. Implementors override this to share per-sample
    /// preprocessing (adjacency structures and the like).
    fn evaluate_batch(
        &self,
        config: &Configuration,
        firsts: &[usize],
        seconds: &[(usize, usize)],
        first_out: &mut [f64],
        second_out: &mut [f64],
    ) -> f64 {
        for (out, &k) in first_out.iter_mut().zip(firsts) {
            *out = self.gradient(config, k);
        }
        for (out, &(k, l)) in second_out.iter_mut().zip(seconds) {
            *out = self.second_gradient(config, k, l);
        }
        self.evaluate(config)
    }
}

/// The index tuples entering the second-order bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TupleKind {
    /// `(k)` for every coordinate.
    Single,
    /// `(k, l)` with `l` interacting with `k`.
    Pair,
    /// `(l, j, k)` with `j` and `k` (possibly equal) both interacting with `l`.
    Star,
}

impl TupleKind {
    pub fn arity(self) -> usize {
        match self {
            TupleKind::Single => 1,
            TupleKind::Pair => 2,
            TupleKind::Star => 3,
        }
    }
}

/// An orbit of ordered index tuples under a symmetry group.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleOrbit {
    pub representative: Vec<usize>,
    pub multiplicity: f64,
}

/// Coordinate relabelings that preserve both the product measure and the
/// functional, so expectations of gradient expressions are constant on orbits.
pub trait IndexSymmetry: Sync {
    /// Orbits of the tuples of the given kind, with their sizes.
    fn orbits(&self, kind: TupleKind) -> Vec<TupleOrbit>;
}

/// Wraps a closure as a functional.
pub struct FnFunctional<F> {
    m: usize,
    f: F,
}

impl<F> FnFunctional<F>
where
    F: Fn(&Configuration) -> f64 + Sync,
{
    pub fn new(m: usize, f: F) -> Self {
        Self { m, f }
    }
}

impl<F> Functional for FnFunctional<F>
where
    F: Fn(&Configuration) -> f64 + Sync,
{
    fn index_count(&self) -> usize {
        self.m
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        (self.f)(config)
    }
}

/// The constant functional.
#[derive(Debug, Clone, Copy)]
pub struct Constant {
    pub m: usize,
    pub value: f64,
}

impl Functional for Constant {
    fn index_count(&self) -> usize {
        self.m
    }

    fn evaluate(&self, _config: &Configuration) -> f64 {
        self.value
    }
}

/// The normalized coordinate `Y_k` as a functional.
#[derive(Debug, Clone)]
pub struct Coordinate {
    space: RademacherSpace,
    k: usize,
}

impl Coordinate {
    pub fn new(space: &RademacherSpace, k: usize) -> Result<Self> {
        space.check_index(k)?;
        Ok(Self { space: space.clone(), k })
    }
}

impl Functional for Coordinate {
    fn index_count(&self) -> usize {
        self.space.len()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        self.space.y(config.get(self.k), self.k)
    }
}

/// Product `Y_{k_1} ⋯ Y_{k_n}` of normalized coordinates.
#[derive(Debug, Clone)]
pub struct CoordinateProduct {
    space: RademacherSpace,
    indices: Vec<usize>,
}

impl CoordinateProduct {
    pub fn new(space: &RademacherSpace, indices: &[usize]) -> Result<Self> {
        for &k in indices {
            space.check_index(k)?;
        }
        Ok(Self { space: space.clone(), indices: indices.to_vec() })
    }
}

impl Functional for CoordinateProduct {
    fn index_count(&self) -> usize {
        self.space.len()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        self.indices.iter().map(|&k| self.space.y(config.get(k), k)).product()
    }
}

/// A functional on at most 64 coordinates stored as a table indexed by the
/// configuration mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFunctional {
    m: usize,
    values: Vec<f64>,
}

impl TableFunctional {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m >= usize::BITS as usize || values.len() != 1usize << m {
            return Err(Error::Invalid(format!(
                "table of length {} does not match 2^{m}",
                values.len()
            )));
        }
        Ok(Self { m, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Functional for TableFunctional {
    fn index_count(&self) -> usize {
        self.m
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        self.values[config.mask() as usize]
    }
}

/// `(F - mean) / sd`, with oracles rescaled accordingly.
pub struct Normalized<'a> {
    inner: &'a dyn Functional,
    mean: f64,
    sd: f64,
}

impl<'a> Normalized<'a> {
    pub fn new(inner: &'a dyn Functional, mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::DegenerateVariance);
        }
        Ok(Self { inner, mean, sd: variance.sqrt() })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn inner(&self) -> &'a dyn Functional {
        self.inner
    }
}

impl Functional for Normalized<'_> {
    fn index_count(&self) -> usize {
        self.inner.index_count()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        (self.inner.evaluate(config) - self.mean) / self.sd
    }

    fn oracles(&self) -> Option<&dyn GradientOracles> {
        self.inner.oracles().map(|_| self as &dyn GradientOracles)
    }

    fn symmetry(&self) -> Option<&dyn IndexSymmetry> {
        self.inner.symmetry()
    }

    fn known_moments(&self) -> Option<(f64, f64)> {
        self.inner.known_moments().map(|(m, v)| ((m - self.mean) / self.sd, v / (self.sd * self.sd)))
    }
}

impl GradientOracles for Normalized<'_> {
    fn gradient(&self, config: &Configuration, k: usize) -> f64 {
        self.inner.oracles().expect("oracles checked").gradient(config, k) / self.sd
    }

    fn second_gradient(&self, config: &Configuration, k: usize, l: usize) -> f64 {
        self.inner.oracles().expect("oracles checked").second_gradient(config, k, l) / self.sd
    }

    fn interactions(&self, k: usize) -> Vec<usize> {
        self.inner.oracles().expect("oracles checked").interactions(k)
    }

    fn interacts(&self, k: usize, l: usize) -> bool {
        self.inner.oracles().expect("oracles checked").interacts(k, l)
    }

    fn evaluate_batch(
        &self,
        config: &Configuration,
        firsts: &[usize],
        seconds: &[(usize, usize)],
        first_out: &mut [f64],
        second_out: &mut [f64],
    ) -> f64 {
        let inner = self.inner.oracles().expect("oracles checked");
        let value = inner.evaluate_batch(config, firsts, seconds, first_out, second_out);
        for v in first_out.iter_mut().chain(second_out.iter_mut()) {
            *v /= self.sd;
        }
        (value - self.mean) / self.sd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_functional_checks_length() {
        assert!(TableFunctional::new(2, vec![0.0; 4]).is_ok());
        assert!(TableFunctional::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn normalized_rescales() {
        let f = FnFunctional::new(2, |c: &Configuration| c.count_ones() as f64);
        let n = Normalized::new(&f, 1.0, 4.0).unwrap();
        assert_eq!(n.evaluate(&Configuration::full(2)), 0.5);
        assert!(n.oracles().is_none());
        assert!(Normalized::new(&f, 1.0, 0.0).is_err());
    }
}
