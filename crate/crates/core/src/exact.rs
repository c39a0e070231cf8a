//! Exact expectations by full enumeration of `{-1, +1}^m`.
//!
//! Configurations are the integers `0..2^m` read as bitmasks. The product
//! probability of a mask is split into a low-bit and a high-bit factor, each
//! read from a precomputed table. The mask range is cut into fixed chunks,
//! each summed in index order, and the chunk partials are added in chunk
//! order, so results do not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::space::{Configuration, RademacherSpace};

/// Largest `m` accepted by exact enumeration unless configured otherwise.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

const CHUNK_BITS: usize = 12;

/// The enumerated product measure of a space with `m <= cap` coordinates.
#[derive(Debug, Clone)]
pub struct Enumeration {
    space: RademacherSpace,
    lo_bits: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn partial_weights(space: &RademacherSpace, from: usize, bits: usize) -> Vec<f64> {
    let mut table = vec![1.0; 1usize << bits];
    for (mask, w) in table.iter_mut().enumerate() {
        for b in 0..bits {
            let k = from + b;
            *w *= if (mask >> b) & 1 == 1 { space.p(k) } else { space.q(k) };
        }
    }
    table
}

impl Enumeration {
    pub fn new(space: &RademacherSpace, cap: usize) -> Result<Self> {
        let m = space.len();
        if m > cap || m > 40 {
            return Err(Error::EnumerationCapExceeded { m, cap: cap.min(40) });
        }
        let lo_bits = m.div_ceil(2);
        let hi_bits = m - lo_bits;
        Ok(Self {
            space: space.clone(),
            lo_bits,
            lo: partial_weights(space, 0, lo_bits),
            hi: partial_weights(space, lo_bits, hi_bits),
        })
    }

    pub fn with_default_cap(space: &RademacherSpace) -> Result<Self> {
        Self::new(space, DEFAULT_ENUMERATION_CAP)
    }

    pub fn space(&self) -> &RademacherSpace {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.space.len()
    }

    /// Number of configurations, `2^m`.
    pub fn size(&self) -> usize {
        1usize << self.m()
    }

    #[inline]
    pub fn weight(&self, mask: usize) -> f64 {
        self.lo[mask & ((1 << self.lo_bits) - 1)] * self.hi[mask >> self.lo_bits]
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.size()).map(|mask| self.weight(mask)).collect()
    }

    fn chunking(&self) -> (usize, usize) {
        let chunk = (1usize << CHUNK_BITS).min(self.size());
        (chunk, self.size() / chunk)
    }

    /// `Σ_ω P(ω) g(ω)` for a function of the mask.
    pub fn expect<G>(&self, g: G) -> f64
    where
        G: Fn(usize) -> f64 + Sync,
    {
        let (chunk, chunks) = self.chunking();
        let partials: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * chunk;
                let mut sum = 0.0;
                for mask in start..start + chunk {
                    sum += self.weight(mask) * g(mask);
                }
                sum
            })
            .collect();
        partials.iter().sum()
    }

    pub fn expect_table(&self, table: &[f64]) -> f64 {
        debug_assert_eq!(table.len(), self.size());
        self.expect(|mask| table[mask])
    }

    /// Values of `f` on every configuration, indexed by mask.
    pub fn tabulate(&self, f: &dyn Functional) -> Vec<f64> {
        let m = self.m();
        let (chunk, chunks) = self.chunking();
        let parts: Vec<Vec<f64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * chunk;
                let mut config = Configuration::empty(m);
                (start..start + chunk)
                    .map(|mask| {
                        config.set_mask(mask as u64);
                        f.evaluate(&config)
                    })
                    .collect()
            })
            .collect();
        parts.concat()
    }

    /// The law of a tabulated functional: distinct values in increasing order
    /// with their probabilities.
    pub fn distribution(&self, table: &[f64]) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> =
            table.iter().enumerate().map(|(mask, &v)| (v, self.weight(mask))).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (v, w) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => out.push((v, w)),
            }
        }
        out
    }

    /// Exact mean and variance of a tabulated functional.
    pub fn mean_variance(&self, table: &[f64]) -> (f64, f64) {
        let mean = self.expect_table(table);
        let var = self.expect(|mask| (table[mask] - mean).powi(2));
        (mean, var)
    }
}

/// `E[F] = Σ_ω P(ω) F(ω)` with the default enumeration cap.
pub fn expectation_exact(space: &RademacherSpace, f: &dyn Functional) -> Result<f64> {
    expectation_exact_with_cap(space, f, DEFAULT_ENUMERATION_CAP)
}

pub fn expectation_exact_with_cap(
    space: &RademacherSpace,
    f: &dyn Functional,
    cap: usize,
) -> Result<f64> {
    check_functional(space, f)?;
    let e = Enumeration::new(space, cap)?;
    let m = space.len();
    let (chunk, chunks) = e.chunking();
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let mut config = Configuration::empty(m);
            let mut sum = 0.0;
            for mask in start..start + chunk {
                config.set_mask(mask as u64);
                sum += e.weight(mask) * f.evaluate(&config);
            }
            sum
        })
        .collect();
    Ok(partials.iter().sum())
}

pub(crate) fn check_functional(space: &RademacherSpace, f: &dyn Functional) -> Result<()> {
    if f.index_count() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: f.index_count() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{Constant, Coordinate, CoordinateProduct, FnFunctional};

    #[test]
    fn constant_and_centred_coordinates() {
        let space = RademacherSpace::new(vec![0.3, 0.65, 0.8]).unwrap();
        let c = Constant { m: 3, value: 2.5 };
        assert!((expectation_exact(&space, &c).unwrap() - 2.5).abs() < 1e-12);
        let y = Coordinate::new(&space, 0).unwrap();
        assert!(expectation_exact(&space, &y).unwrap().abs() < 1e-12);
        let yy = CoordinateProduct::new(&space, &[0, 1]).unwrap();
        assert!(expectation_exact(&space, &yy).unwrap().abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_one() {
        let space = RademacherSpace::new(vec![0.1, 0.2, 0.3, 0.4, 0.9]).unwrap();
        let e = Enumeration::with_default_cap(&space).unwrap();
        assert!((e.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // weight of all-plus
        assert!((e.weight(0b11111) - 0.1 * 0.2 * 0.3 * 0.4 * 0.9).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let space = RademacherSpace::symmetric(10).unwrap();
        let f = Constant { m: 10, value: 1.0 };
        let err = expectation_exact_with_cap(&space, &f, 8).unwrap_err();
        assert_eq!(err, Error::EnumerationCapExceeded { m: 10, cap: 8 });
        assert!(err.to_string().contains("Monte Carlo"));
    }

    #[test]
    fn expectation_is_linear() {
        let space = RademacherSpace::new(vec![0.25, 0.5, 0.7, 0.15]).unwrap();
        let f = FnFunctional::new(4, |c: &Configuration| (c.mask() as f64).sin());
        let g = FnFunctional::new(4, |c: &Configuration| c.count_ones() as f64 * 1.5);
        let h = FnFunctional::new(4, |c: &Configuration| {
            2.0 * (c.mask() as f64).sin() - 3.0 * c.count_ones() as f64 * 1.5
        });
        let ef = expectation_exact(&space, &f).unwrap();
        let eg = expectation_exact(&space, &g).unwrap();
        let eh = expectation_exact(&space, &h).unwrap();
        assert!((eh - (2.0 * ef - 3.0 * eg)).abs() < 1e-12);
    }

    #[test]
    fn distribution_merges_ties() {
        let space = RademacherSpace::symmetric(2).unwrap();
        let e = Enumeration::with_default_cap(&space).unwrap();
        let table = vec![0.0, 1.0, 1.0, 2.0];
        let d = e.distribution(&table);
        assert_eq!(d, vec![(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]);
    }
}
