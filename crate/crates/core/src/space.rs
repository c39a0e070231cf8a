//! Finite product Rademacher spaces and their configurations.
//!
//! A space of `m` coordinates carries success probabilities `p_k ∈ (0, 1)`.
//! Coordinate `k` of a configuration is `+1` with probability `p_k` and `-1`
//! otherwise. Indices are zero-based throughout the crate.

use crate::error::{Error, Result};

/// Independent, possibly non-symmetric and non-homogeneous, Rademacher
/// coordinates `X_0, …, X_{m-1}` with `P(X_k = +1) = p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RademacherSpace {
    probs: Vec<f64>,
    sqrt_pq: Vec<f64>,
}

impl RademacherSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sqrt_pq = probs.iter().map(|&p| (p * (1.0 - p)).sqrt()).collect();
        Ok(Self { probs, sqrt_pq })
    }

    /// All coordinates share the success probability `p`.
    pub fn homogeneous(m: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; m])
    }

    /// The symmetric case `p_k = 1/2`.
    pub fn symmetric(m: usize) -> Result<Self> {
        Self::homogeneous(m, 0.5)
    }

    /// Number of coordinates `m`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn p(&self, k: usize) -> f64 {
        self.probs[k]
    }

    #[inline]
    pub fn q(&self, k: usize) -> f64 {
        1.0 - self.probs[k]
    }

    #[inline]
    pub fn pq(&self, k: usize) -> f64 {
        self.probs[k] * (1.0 - self.probs[k])
    }

    #[inline]
    pub fn sqrt_pq(&self, k: usize) -> f64 {
        self.sqrt_pq[k]
    }

    /// Value of `Y_k` when `X_k = +1`, i.e. `sqrt(q_k / p_k)`.
    #[inline]
    pub fn y_plus(&self, k: usize) -> f64 {
        (self.q(k) / self.p(k)).sqrt()
    }

    /// Value of `Y_k` when `X_k = -1`, i.e. `-sqrt(p_k / q_k)`.
    #[inline]
    pub fn y_minus(&self, k: usize) -> f64 {
        -(self.p(k) / self.q(k)).sqrt()
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: k, len: self.len() })
        }
    }

    pub fn check_config(&self, config: &Configuration) -> Result<()> {
        if config.len() == self.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.len(), got: config.len() })
        }
    }

    /// The normalized coordinate `Y_k = (X_k - p_k + q_k) / (2 sqrt(p_k q_k))`,
    /// centred with unit variance.
    pub fn normalized_value(&self, config: &Configuration, k: usize) -> Result<f64> {
        self.check_index(k)?;
        self.check_config(config)?;
        Ok(self.y(config.get(k), k))
    }

    /// `Y_k` for a known sign of `X_k`, without bounds checks.
    #[inline]
    pub fn y(&self, plus: bool, k: usize) -> f64 {
        let x = if plus { 1.0 } else { -1.0 };
        (x - self.p(k) + self.q(k)) / (2.0 * self.sqrt_pq[k])
    }
}

/// A point `ω ∈ {-1, +1}^m`, stored as a bitmask (bit set ⇔ `X_k = +1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    /// All coordinates equal to `-1`.
    pub fn empty(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64).max(1)], len }
    }

    /// All coordinates equal to `+1`.
    pub fn full(len: usize) -> Self {
        let mut c = Self::empty(len);
        for k in 0..len {
            c.set(k, true);
        }
        c
    }

    /// Configuration of a space with at most 64 coordinates from its mask.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        let mut c = Self::empty(len);
        c.set_mask(mask);
        c
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = Self::empty(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            c.set(k, b);
        }
        c
    }

    /// Overwrites the first word; used by exact enumeration (`len <= 64`).
    #[inline]
    pub fn set_mask(&mut self, mask: u64) {
        debug_assert!(self.len <= 64);
        self.words[0] = if self.len == 64 { mask } else { mask & ((1u64 << self.len) - 1) };
    }

    /// The low 64 coordinates as a bitmask.
    #[inline]
    pub fn mask(&self) -> u64 {
        self.words[0]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        (self.words[k >> 6] >> (k & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, value: bool) {
        debug_assert!(k < self.len);
        let bit = 1u64 << (k & 63);
        if value {
            self.words[k >> 6] |= bit;
        } else {
            self.words[k >> 6] &= !bit;
        }
    }

    /// `X_k` as `±1.0`.
    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        if self.get(k) {
            1.0
        } else {
            -1.0
        }
    }

    /// Copy with coordinate `k` forced to the given sign.
    pub fn with(&self, k: usize, value: bool) -> Self {
        let mut c = self.clone();
        c.set(k, value);
        c
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the `+1` coordinates in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + tz)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_value_examples() {
        let sym = RademacherSpace::symmetric(1).unwrap();
        let plus = Configuration::full(1);
        let minus = Configuration::empty(1);
        assert!((sym.normalized_value(&plus, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((sym.normalized_value(&minus, 0).unwrap() + 1.0).abs() < 1e-15);

        let skew = RademacherSpace::homogeneous(1, 0.2).unwrap();
        assert!((skew.normalized_value(&plus, 0).unwrap() - 2.0).abs() < 1e-12);
        assert!((skew.y_plus(0) - 2.0).abs() < 1e-12);
        assert!((skew.y_minus(0) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn normalized_value_rejects_bad_index() {
        let space = RademacherSpace::symmetric(3).unwrap();
        let c = Configuration::empty(3);
        assert_eq!(
            space.normalized_value(&c, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        );
    }

    #[test]
    fn space_rejects_degenerate_probabilities() {
        assert!(matches!(
            RademacherSpace::new(vec![0.5, 1.0]),
            Err(Error::InvalidProbability { index: 1, .. })
        ));
        assert!(matches!(RademacherSpace::new(vec![0.0]), Err(Error::InvalidProbability { .. })));
        assert_eq!(RademacherSpace::new(vec![]), Err(Error::EmptySpace));
    }

    #[test]
    fn configuration_bits_span_words() {
        let mut c = Configuration::empty(130);
        c.set(0, true);
        c.set(64, true);
        c.set(129, true);
        assert_eq!(c.count_ones(), 3);
        assert_eq!(c.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert!(!c.with(64, false).get(64));
        assert_eq!(Configuration::full(70).count_ones(), 70);
    }

    #[test]
    fn mask_round_trip() {
        let c = Configuration::from_mask(5, 0b1_0110);
        assert_eq!(c.mask(), 0b1_0110);
        assert!(c.get(1) && c.get(2) && c.get(4) && !c.get(0));
        // bits above len are dropped
        assert_eq!(Configuration::from_mask(3, 0xff).mask(), 0b111);
    }
}
