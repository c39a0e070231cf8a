//! Configuration sampling and batch-means estimation.
//!
//! Sample `i` of a run with seed `s` draws its coordinates from the ChaCha8
//! stream `i` of key `s`, in coordinate order. A sample is therefore a pure
//! function of `(s, i, k)` and runs are reproducible for any thread count.
//! Samples are grouped into contiguous batches; each batch keeps running
//! means in sample order and batches are merged in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::check_functional;
use crate::functional::Functional;
use crate::space::{Configuration, RademacherSpace};

pub const DEFAULT_BATCHES: usize = 100;

/// The generator for sample `index` of a run keyed by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes a label into a seed so that auxiliary runs (pilots and the like)
/// use streams unrelated to the main run.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ label.rotate_left(32));
    rng.set_stream(u64::MAX - label);
    rng.random()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub batches: usize,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64) -> Self {
        Self { count, seed, batches: DEFAULT_BATCHES.min(count.max(1)) }
    }

    pub fn with_batches(mut self, batches: usize) -> Self {
        self.batches = batches;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 || self.batches == 0 || self.batches > self.count {
            return Err(Error::OutOfRange(format!(
                "need count >= batches >= 1, got count {} and {} batches",
                self.count, self.batches
            )));
        }
        Ok(())
    }

    fn batch_range(&self, b: usize) -> std::ops::Range<usize> {
        let lo = b * self.count / self.batches;
        let hi = (b + 1) * self.count / self.batches;
        lo..hi
    }
}

/// Overwrites `config` with sample `index`.
pub fn fill_configuration(space: &RademacherSpace, seed: u64, index: u64, config: &mut Configuration) {
    let mut rng = sample_rng(seed, index);
    for (k, &p) in space.probs().iter().enumerate() {
        let u: f64 = rng.random();
        config.set(k, u < p);
    }
}

pub fn sample_configuration(space: &RademacherSpace, sample_index: u64, seed: u64) -> Configuration {
    let mut c = Configuration::empty(space.len());
    fill_configuration(space, seed, sample_index, &mut c);
    c
}

#[derive(Debug, Clone, PartialEq)]
struct Running {
    count: usize,
    means: Vec<f64>,
}

impl Running {
    fn empty(width: usize) -> Self {
        Self { count: 0, means: vec![0.0; width] }
    }

    fn push(&mut self, obs: &[f64]) {
        self.count += 1;
        let inv = 1.0 / self.count as f64;
        for (m, &x) in self.means.iter_mut().zip(obs) {
            *m += (x - *m) * inv;
        }
    }

    fn merged(&self, other: &Running) -> Running {
        if other.count == 0 {
            return self.clone();
        }
        if self.count == 0 {
            return other.clone();
        }
        let count = self.count + other.count;
        let w = other.count as f64 / count as f64;
        let means = self.means.iter().zip(&other.means).map(|(a, b)| a + (b - a) * w).collect();
        Running { count, means }
    }
}

/// Per-batch means of a vector of observed quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchMeans {
    batches: Vec<Running>,
    total: Running,
    /// First observed quantity of every sample, in sample order, when kept.
    pub values: Option<Vec<f64>>,
}

impl BatchMeans {
    pub fn width(&self) -> usize {
        self.total.means.len()
    }

    pub fn count(&self) -> usize {
        self.total.count
    }

    pub fn means(&self) -> &[f64] {
        &self.total.means
    }

    /// Batch-means standard error of quantity `i`.
    pub fn stderr(&self, i: usize) -> f64 {
        let b = self.batches.len();
        if b < 2 {
            return 0.0;
        }
        let mean = self.total.means[i];
        let ss: f64 = self.batches.iter().map(|r| (r.means[i] - mean).powi(2)).sum();
        (ss / ((b - 1) * b) as f64).sqrt()
    }

    /// Leave-one-batch-out means, one vector per batch.
    pub fn leave_one_out(&self) -> Vec<Vec<f64>> {
        let b = self.batches.len();
        let width = self.width();
        let mut prefix = vec![Running::empty(width)];
        for r in &self.batches {
            let next = prefix.last().unwrap().merged(r);
            prefix.push(next);
        }
        let mut suffix = vec![Running::empty(width); b + 1];
        for i in (0..b).rev() {
            suffix[i] = self.batches[i].merged(&suffix[i + 1]);
        }
        (0..b).map(|i| prefix[i].merged(&suffix[i + 1]).means).collect()
    }

    /// Plug-in estimate of `g(means)` with a jackknife-over-batches
    /// standard error.
    pub fn jackknife<G: Fn(&[f64]) -> f64>(&self, g: G) -> (f64, f64) {
        let estimate = g(&self.total.means);
        let b = self.batches.len();
        if b < 2 {
            return (estimate, 0.0);
        }
        let loo: Vec<f64> = self.leave_one_out().iter().map(|m| g(m)).collect();
        let centre = loo.iter().sum::<f64>() / b as f64;
        let ss: f64 = loo.iter().map(|v| (v - centre).powi(2)).sum();
        (estimate, ((b - 1) as f64 / b as f64 * ss).sqrt())
    }
}

/// Runs `observe` on every sample of `spec` and collects batch means of the
/// `width` quantities it writes. `scratch` builds per-batch working state.
pub fn batch_means<S, M, O>(
    space: &RademacherSpace,
    spec: &SampleSpec,
    width: usize,
    keep_values: bool,
    scratch: M,
    observe: O,
) -> Result<BatchMeans>
where
    M: Fn() -> S + Sync,
    O: Fn(&mut S, &Configuration, &mut [f64]) + Sync,
{
    spec.validate()?;
    let parts: Vec<(Running, Vec<f64>)> = (0..spec.batches)
        .into_par_iter()
        .map(|b| {
            let mut state = scratch();
            let mut config = Configuration::empty(space.len());
            let mut obs = vec![0.0; width];
            let mut run = Running::empty(width);
            let range = spec.batch_range(b);
            let mut values = Vec::with_capacity(if keep_values { range.len() } else { 0 });
            for i in range {
                fill_configuration(space, spec.seed, i as u64, &mut config);
                observe(&mut state, &config, &mut obs);
                run.push(&obs);
                if keep_values {
                    values.push(obs[0]);
                }
            }
            (run, values)
        })
        .collect();
    let mut total = Running::empty(width);
    let mut batches = Vec::with_capacity(parts.len());
    let mut values = keep_values.then(|| Vec::with_capacity(spec.count));
    for (run, vals) in parts {
        total = total.merged(&run);
        batches.push(run);
        if let Some(v) = values.as_mut() {
            v.extend(vals);
        }
    }
    Ok(BatchMeans { batches, total, values })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentEstimate {
    pub order: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FunctionalStats {
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    /// `E|F|^r` for each requested `r`.
    pub moments: Vec<MomentEstimate>,
}

pub fn estimate_functional_stats(
    space: &RademacherSpace,
    f: &dyn Functional,
    spec: &SampleSpec,
    moments: &[f64],
) -> Result<FunctionalStats> {
    check_functional(space, f)?;
    if let Some(&r) = moments.iter().find(|&&r| !(r >= 1.0)) {
        return Err(Error::OutOfRange(format!("moment order {r} must be at least 1")));
    }
    let bm = batch_means(space, spec, 2 + moments.len(), false, || (), |_, c, out| {
        let x = f.evaluate(c);
        out[0] = x;
        out[1] = x * x;
        for (o, &r) in out[2..].iter_mut().zip(moments) {
            *o = abs_pow(x, r);
        }
    })?;
    let (variance, variance_stderr) = bm.jackknife(|m| (m[1] - m[0] * m[0]).max(0.0));
    Ok(FunctionalStats {
        mean: bm.means()[0],
        mean_stderr: bm.stderr(0),
        variance,
        variance_stderr,
        moments: moments
            .iter()
            .enumerate()
            .map(|(i, &r)| MomentEstimate { order: r, value: bm.means()[2 + i], stderr: bm.stderr(2 + i) })
            .collect(),
    })
}

/// `|x|^r`, using repeated multiplication for small integer orders.
#[inline]
pub fn abs_pow(x: f64, r: f64) -> f64 {
    let a = x.abs();
    if r == 1.0 {
        a
    } else if r == 2.0 {
        a * a
    } else if r == 3.0 {
        a * a * a
    } else if r == 4.0 {
        let s = a * a;
        s * s
    } else if r.fract() == 0.0 && r <= 64.0 {
        a.powi(r as i32)
    } else {
        a.powf(r)
    }
}

/// Pilot estimate of `(mean, variance)` for normalizing a functional.
pub fn estimate_normalization(space: &RademacherSpace, f: &dyn Functional, spec: &SampleSpec) -> Result<(f64, f64)> {
    let s = estimate_functional_stats(space, f, spec, &[])?;
    Ok((s.mean, s.variance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{Constant, Coordinate, FnFunctional};

    #[test]
    fn samples_are_reproducible() {
        let space = RademacherSpace::homogeneous(40, 0.3).unwrap();
        let a = sample_configuration(&space, 17, 99);
        let b = sample_configuration(&space, 17, 99);
        assert_eq!(a, b);
        assert_ne!(a, sample_configuration(&space, 18, 99));
    }

    #[test]
    fn set_bit_frequencies() {
        let space = RademacherSpace::homogeneous(20, 0.3).unwrap();
        let n = 100_000;
        let total: usize = (0..n).map(|i| sample_configuration(&space, i, 5).count_ones()).sum();
        let mean = total as f64 / n as f64;
        let sd = (20.0f64 * 0.3 * 0.7 / n as f64).sqrt();
        assert!((mean - 6.0).abs() < 3.0 * sd, "{mean}");

        let eps = 1e-4;
        let space = RademacherSpace::homogeneous(10, 1.0 - eps).unwrap();
        let ones: usize = (0..1000).map(|i| sample_configuration(&space, i, 1).count_ones()).sum();
        let frac = ones as f64 / 10_000.0;
        assert!(frac > 1.0 - eps - 3.0 * (eps / 1e4).sqrt() - 1e-3);
    }

    #[test]
    fn coordinate_second_moment() {
        let space = RademacherSpace::new(vec![0.2, 0.5]).unwrap();
        let y = Coordinate::new(&space, 0).unwrap();
        let s = estimate_functional_stats(&space, &y, &SampleSpec::new(50_000, 3), &[2.0]).unwrap();
        let m2 = s.moments[0];
        assert!((m2.value - 1.0).abs() < 3.0 * m2.stderr, "{m2:?}");
        assert!(s.mean.abs() < 4.0 * s.mean_stderr);
    }

    #[test]
    fn constant_has_zero_variance() {
        let space = RademacherSpace::symmetric(3).unwrap();
        let c = Constant { m: 3, value: 0.1 };
        let s = estimate_functional_stats(&space, &c, &SampleSpec::new(1000, 3), &[1.0, 3.0]).unwrap();
        assert_eq!(s.mean, 0.1);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.variance_stderr, 0.0);
        assert_eq!(s.mean_stderr, 0.0);
        assert_eq!(s.moments[0].stderr, 0.0);
    }

    #[test]
    fn report_independent_of_threads() {
        let space = RademacherSpace::homogeneous(12, 0.35).unwrap();
        let f = FnFunctional::new(12, |c: &Configuration| (c.mask() as f64).sqrt());
        let spec = SampleSpec::new(5000, 11);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_functional_stats(&space, &f, &spec, &[3.0]).unwrap())
        };
        let a = run(1);
        assert_eq!(a, run(2));
        assert_eq!(a, run(8));
    }

    #[test]
    fn spec_validation() {
        assert!(SampleSpec::new(10, 0).validate().is_ok());
        assert_eq!(SampleSpec::new(10, 0).batches, 10);
        assert!(SampleSpec::new(10, 0).with_batches(11).validate().is_err());
        assert!(SampleSpec::new(0, 0).validate().is_err());
    }

    #[test]
    fn jackknife_of_mean_matches_batch_stderr() {
        let space = RademacherSpace::symmetric(4).unwrap();
        let spec = SampleSpec::new(2000, 8).with_batches(20);
        let bm = batch_means(&space, &spec, 1, true, || (), |_, c, out| out[0] = c.count_ones() as f64).unwrap();
        let (est, se) = bm.jackknife(|m| m[0]);
        assert!((est - bm.means()[0]).abs() < 1e-12);
        assert!((se - bm.stderr(0)).abs() < 1e-9);
        assert_eq!(bm.values.as_ref().unwrap().len(), 2000);
    }
}
