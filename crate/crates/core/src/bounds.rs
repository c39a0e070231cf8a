//! Berry-Esseen bounds in the Kolmogorov distance for normalized functionals.
//!
//! The second-order bound has seven terms built from moments of first and
//! second gradients:
//!
//! ```text
//! A1 = sqrt(15/4 Σ_{l,j,k} sqrt(E[(D_jF)²(D_kF)²]) sqrt(E[(D_lD_jF)²(D_lD_kF)²]))
//! A2 = sqrt(3/4 Σ_{l,j,k} E[(D_lD_jF)²(D_lD_kF)²] / (p_l q_l))
//! A3 = √(2π)/8 Σ_k E|D_kF|³ / sqrt(p_k q_k)
//! A4 = 1/2 (E|F|^r)^{1/r} Σ_k (E|D_kF|^{2s})^{1/s} (E|D_kF|^t)^{1/t} / sqrt(p_k q_k)
//! A5 = sqrt(Σ_k E[(D_kF)⁴] / (p_k q_k))
//! A6 = sqrt(6 Σ_{k,l} sqrt(E[(D_kF)⁴]) sqrt(E[(D_lD_kF)⁴]) / (p_k q_k))
//! A7 = sqrt(3 Σ_{k,l} E[(D_lD_kF)⁴] / (p_k q_k p_l q_l))
//! ```
//!
//! Sums involving second gradients only run over interacting indices. Exact
//! mode fills every moment by enumeration; Monte Carlo mode estimates the
//! moments of one representative per symmetry orbit (or every tuple when no
//! symmetry is known) from a shared sample, and both modes go through the
//! same assembly.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::chaos::{decompose_table, ou_transform, OuMode};
use crate::error::{Error, Result};
use crate::exact::{check_functional, Enumeration, DEFAULT_ENUMERATION_CAP};
use crate::functional::{Functional, GradientOracles, Normalized, TupleKind, TupleOrbit};
use crate::gradient::gradient_table;
use crate::montecarlo::{abs_pow, batch_means, derive_seed, estimate_normalization, SampleSpec};
use crate::space::RademacherSpace;

const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Exponents with `1/r + 1/s + 1/t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderTriple {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl HolderTriple {
    pub fn new(r: f64, s: f64, t: f64) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidHolderTriple { r, s, t, reason: reason.into() };
        if !(r > 1.0 && s > 1.0 && t > 1.0) || !(r.is_finite() && s.is_finite() && t.is_finite()) {
            return Err(bad("exponents must lie in (1, ∞)"));
        }
        if (1.0 / r + 1.0 / s + 1.0 / t - 1.0).abs() > 1e-12 {
            return Err(bad("reciprocals must sum to 1"));
        }
        Ok(Self { r, s, t })
    }

    /// `r = 2`, `s = t = 4`.
    pub fn standard() -> Self {
        Self { r: 2.0, s: 4.0, t: 4.0 }
    }
}

/// `r` is the smallest even integer at least `max(2, 4(2α−1)/(1−α))` and
/// `s = t = 2r/(r−1)`.
pub fn holder_select(alpha: f64) -> Result<HolderTriple> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("alpha {alpha} must lie in [0, 1)")));
    }
    let lower = (4.0 * (2.0 * alpha - 1.0) / (1.0 - alpha)).max(2.0);
    // tolerate rounding when the bound is an exact integer
    let mut r = (lower - 1e-12).ceil() as u64;
    if r % 2 == 1 {
        r += 1;
    }
    let r = r as f64;
    let s = 2.0 * r / (r - 1.0);
    HolderTriple::new(r, s, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeTag {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub samples: usize,
    pub seed: u64,
    pub batches: usize,
    /// Pilot sample size as a multiple of `samples`, used when the functional
    /// has no closed-form moments.
    pub pilot_factor: usize,
}

impl McParams {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, batches: crate::montecarlo::DEFAULT_BATCHES.min(samples.max(1)), pilot_factor: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    Exact,
    MonteCarlo(McParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationSource {
    /// Already centred with unit variance.
    Given,
    Enumeration,
    ClosedForm,
    Pilot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: f64,
    pub variance: f64,
    pub source: NormalizationSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// The seven terms of the second-order bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub terms: [f64; 7],
    pub total: f64,
    pub triple: HolderTriple,
    pub mode: ModeTag,
    pub stderrs: Option<[f64; 7]>,
    pub total_stderr: Option<f64>,
    pub normalization: Option<Normalization>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Kolmogorov distance of the sampled values to the normal law.
    pub empirical_dk: Option<KolmogorovEstimate>,
}

/// The four terms of the bound in terms of `⟨DF, −DL⁻¹F⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MalliavinSteinBound {
    pub terms: [f64; 4],
    pub total: f64,
}

/// Which tuples the moments are collected for, with multiplicities.
#[derive(Debug, Clone)]
struct Plan {
    singles: Vec<TupleOrbit>,
    pairs: Vec<TupleOrbit>,
    stars: Vec<TupleOrbit>,
}

// offsets in the flat moment vector
const F_VALUE: usize = 0;
const F_ABS_R: usize = 1;
const HEADER: usize = 2;
const PER_SINGLE: usize = 4;
const PER_PAIR: usize = 2;
const PER_STAR: usize = 2;

impl Plan {
    fn width(&self) -> usize {
        HEADER + PER_SINGLE * self.singles.len() + PER_PAIR * self.pairs.len() + PER_STAR * self.stars.len()
    }

    fn pair_base(&self) -> usize {
        HEADER + PER_SINGLE * self.singles.len()
    }

    fn star_base(&self) -> usize {
        self.pair_base() + PER_PAIR * self.pairs.len()
    }

    fn from_interactions(m: usize, neighbours: &dyn Fn(usize) -> Vec<usize>) -> Self {
        let one = |representative: Vec<usize>| TupleOrbit { representative, multiplicity: 1.0 };
        let mut pairs = Vec::new();
        let mut stars = Vec::new();
        for k in 0..m {
            let nb = neighbours(k);
            pairs.extend(nb.iter().map(|&l| one(vec![k, l])));
            for &j in &nb {
                stars.extend(nb.iter().map(|&i| one(vec![k, j, i])));
            }
        }
        Self { singles: (0..m).map(|k| one(vec![k])).collect(), pairs, stars }
    }

    fn from_symmetry(f: &dyn Functional) -> Option<Self> {
        let sym = f.symmetry()?;
        Some(Self {
            singles: sym.orbits(TupleKind::Single),
            pairs: sym.orbits(TupleKind::Pair),
            stars: sym.orbits(TupleKind::Star),
        })
    }
}

/// Combines the moment vector into the seven terms.
fn assemble(space: &RademacherSpace, plan: &Plan, triple: &HolderTriple, means: &[f64]) -> [f64; 7] {
    let HolderTriple { r, s, t } = *triple;
    let mut a = [0.0; 7];

    let mut sum3 = 0.0;
    let mut sum4 = 0.0;
    let mut sum5 = 0.0;
    for (i, o) in plan.singles.iter().enumerate() {
        let k = o.representative[0];
        let base = HEADER + PER_SINGLE * i;
        let inv = 1.0 / space.sqrt_pq(k);
        sum3 += o.multiplicity * inv * means[base];
        sum4 += o.multiplicity * inv * means[base + 1].powf(1.0 / s) * means[base + 2].powf(1.0 / t);
        sum5 += o.multiplicity * means[base + 3] / space.pq(k);
    }
    a[2] = (2.0 * PI).sqrt() / 8.0 * sum3;
    a[3] = 0.5 * means[F_ABS_R].powf(1.0 / r) * sum4;
    a[4] = sum5.sqrt();

    let mut sum6 = 0.0;
    let mut sum7 = 0.0;
    let pb = plan.pair_base();
    for (i, o) in plan.pairs.iter().enumerate() {
        let (k, l) = (o.representative[0], o.representative[1]);
        let base = pb + PER_PAIR * i;
        sum6 += o.multiplicity / space.pq(k) * means[base].sqrt() * means[base + 1].sqrt();
        sum7 += o.multiplicity * means[base + 1] / (space.pq(k) * space.pq(l));
    }
    a[5] = (6.0 * sum6).sqrt();
    a[6] = (3.0 * sum7).sqrt();

    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    let sb = plan.star_base();
    for (i, o) in plan.stars.iter().enumerate() {
        let l = o.representative[0];
        let base = sb + PER_STAR * i;
        sum1 += o.multiplicity * means[base].sqrt() * means[base + 1].sqrt();
        sum2 += o.multiplicity * means[base + 1] / space.pq(l);
    }
    a[0] = (15.0 / 4.0 * sum1).sqrt();
    a[1] = (3.0 / 4.0 * sum2).sqrt();
    a
}

/// Exact mean and variance by enumeration.
pub fn exact_moments(space: &RademacherSpace, f: &dyn Functional) -> Result<(f64, f64)> {
    check_functional(space, f)?;
    let e = Enumeration::new(space, DEFAULT_ENUMERATION_CAP)?;
    Ok(e.mean_variance(&e.tabulate(f)))
}

fn check_normalized(e: &Enumeration, table: &[f64]) -> Result<()> {
    let mean = e.expect_table(table);
    let second_moment = e.expect(|w| table[w] * table[w]);
    if mean.abs() > NORMALIZATION_TOLERANCE || (second_moment - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { mean, second_moment });
    }
    Ok(())
}

/// The seven-term second-order Poincaré bound.
///
/// Exact mode needs `E[F] = 0` and `E[F²] = 1`. Monte Carlo mode needs the
/// gradient oracles and normalizes internally, using closed-form moments
/// when the functional has them and a pilot sample otherwise.
pub fn second_order_bound(
    space: &RademacherSpace,
    f: &dyn Functional,
    triple: HolderTriple,
    mode: BoundMode,
) -> Result<BoundBreakdown> {
    check_functional(space, f)?;
    HolderTriple::new(triple.r, triple.s, triple.t)?;
    match mode {
        BoundMode::Exact => exact_bound(space, f, triple),
        BoundMode::MonteCarlo(params) => mc_bound(space, f, triple, params),
    }
}

fn exact_bound(space: &RademacherSpace, f: &dyn Functional, triple: HolderTriple) -> Result<BoundBreakdown> {
    let e = Enumeration::new(space, DEFAULT_ENUMERATION_CAP)?;
    let m = space.len();
    let table = e.tabulate(f);
    check_normalized(&e, &table)?;
    let grads: Vec<Vec<f64>> = (0..m).map(|k| gradient_table(space, &table, k)).collect();

    let neighbours: Vec<Vec<usize>> = match f.oracles() {
        Some(o) => (0..m).map(|k| o.interactions(k)).collect(),
        None => (0..m)
            .map(|k| {
                (0..m)
                    .filter(|&l| l != k && gradient_table(space, &grads[k], l).iter().any(|v| v.abs() > 1e-13))
                    .collect()
            })
            .collect(),
    };
    let plan = Plan::from_interactions(m, &|k| neighbours[k].clone());

    let mut means = vec![0.0; plan.width()];
    means[F_VALUE] = e.expect_table(&table);
    means[F_ABS_R] = e.expect(|w| abs_pow(table[w], triple.r));
    for k in 0..m {
        let g = &grads[k];
        let base = HEADER + PER_SINGLE * k;
        means[base] = e.expect(|w| abs_pow(g[w], 3.0));
        means[base + 1] = e.expect(|w| abs_pow(g[w], 2.0 * triple.s));
        means[base + 2] = e.expect(|w| abs_pow(g[w], triple.t));
        means[base + 3] = e.expect(|w| g[w].powi(4));
    }
    let second = |k: usize, l: usize| gradient_table(space, &grads[k], l);
    let mut pair_index = BTreeMap::new();
    for (i, o) in plan.pairs.iter().enumerate() {
        pair_index.insert((o.representative[0], o.representative[1]), i);
    }
    let pb = plan.pair_base();
    let sb = plan.star_base();
    let mut star = 0;
    for l in 0..m {
        let hs: BTreeMap<usize, Vec<f64>> = neighbours[l].iter().map(|&j| (j, second(j, l))).collect();
        for &k in &neighbours[l] {
            let i = pair_index[&(k, l)];
            let h = &hs[&k];
            means[pb + PER_PAIR * i] = means[HEADER + PER_SINGLE * k + 3];
            means[pb + PER_PAIR * i + 1] = e.expect(|w| h[w].powi(4));
        }
        for &j in &neighbours[l] {
            for &k in &neighbours[l] {
                let (gj, gk, hj, hk) = (&grads[j], &grads[k], &hs[&j], &hs[&k]);
                let base = sb + PER_STAR * star;
                means[base] = e.expect(|w| (gj[w] * gk[w]).powi(2));
                means[base + 1] = e.expect(|w| (hj[w] * hk[w]).powi(2));
                star += 1;
            }
        }
    }
    let terms = assemble(space, &plan, &triple, &means);
    Ok(BoundBreakdown {
        terms,
        total: terms.iter().sum(),
        triple,
        mode: ModeTag::Exact,
        stderrs: None,
        total_stderr: None,
        normalization: Some(Normalization { mean: 0.0, variance: 1.0, source: NormalizationSource::Given }),
        samples: None,
        seed: None,
        empirical_dk: None,
    })
}

/// Mean and variance used to normalize `f` in Monte Carlo mode.
pub fn mc_normalization(space: &RademacherSpace, f: &dyn Functional, params: &McParams) -> Result<Normalization> {
    if let Some((mean, variance)) = f.known_moments() {
        return Ok(Normalization { mean, variance, source: NormalizationSource::ClosedForm });
    }
    let count = params.samples.saturating_mul(params.pilot_factor.max(1));
    let spec = SampleSpec::new(count, derive_seed(params.seed, 0x7069_6c6f));
    let (mean, variance) = estimate_normalization(space, f, &spec)?;
    Ok(Normalization { mean, variance, source: NormalizationSource::Pilot })
}

fn mc_bound(
    space: &RademacherSpace,
    f: &dyn Functional,
    triple: HolderTriple,
    params: McParams,
) -> Result<BoundBreakdown> {
    let oracles = f.oracles().ok_or(Error::MissingOracles)?;
    let norm = mc_normalization(space, f, &params)?;
    let nf = Normalized::new(f, norm.mean, norm.variance)?;
    let m = space.len();
    let plan = Plan::from_symmetry(f).unwrap_or_else(|| Plan::from_interactions(m, &|k| oracles.interactions(k)));

    // deduplicated gradient requests and where each tuple finds its values
    let mut firsts: Vec<usize> = Vec::new();
    let mut first_at: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seconds: Vec<(usize, usize)> = Vec::new();
    let mut second_at: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut want_first = |k: usize| {
        *first_at.entry(k).or_insert_with(|| {
            firsts.push(k);
            firsts.len() - 1
        })
    };
    let single_slots: Vec<usize> = plan.singles.iter().map(|o| want_first(o.representative[0])).collect();
    let pair_firsts: Vec<usize> = plan.pairs.iter().map(|o| want_first(o.representative[0])).collect();
    let star_firsts: Vec<(usize, usize)> = plan
        .stars
        .iter()
        .map(|o| (want_first(o.representative[1]), want_first(o.representative[2])))
        .collect();
    let mut want_second = |k: usize, l: usize| {
        let key = (k.min(l), k.max(l));
        *second_at.entry(key).or_insert_with(|| {
            seconds.push(key);
            seconds.len() - 1
        })
    };
    let pair_seconds: Vec<usize> =
        plan.pairs.iter().map(|o| want_second(o.representative[0], o.representative[1])).collect();
    let star_seconds: Vec<(usize, usize)> = plan
        .stars
        .iter()
        .map(|o| {
            let r = &o.representative;
            (want_second(r[1], r[0]), want_second(r[2], r[0]))
        })
        .collect();

    let spec = SampleSpec::new(params.samples, params.seed).with_batches(params.batches);
    let (nf_ref, firsts_ref, seconds_ref) = (&nf, &firsts, &seconds);
    let (pb, sb) = (plan.pair_base(), plan.star_base());
    let bm = batch_means(
        space,
        &spec,
        plan.width(),
        true,
        || (vec![0.0; firsts_ref.len()], vec![0.0; seconds_ref.len()]),
        |(fo, so), config, out| {
            let x = nf_ref.evaluate_batch(config, firsts_ref, seconds_ref, fo, so);
            out[F_VALUE] = x;
            out[F_ABS_R] = abs_pow(x, triple.r);
            for (i, &slot) in single_slots.iter().enumerate() {
                let g = fo[slot];
                let base = HEADER + PER_SINGLE * i;
                out[base] = abs_pow(g, 3.0);
                out[base + 1] = abs_pow(g, 2.0 * triple.s);
                out[base + 2] = abs_pow(g, triple.t);
                out[base + 3] = g.powi(4);
            }
            for (i, (&fs, &ss)) in pair_firsts.iter().zip(&pair_seconds).enumerate() {
                out[pb + PER_PAIR * i] = fo[fs].powi(4);
                out[pb + PER_PAIR * i + 1] = so[ss].powi(4);
            }
            for (i, (&(fj, fk), &(sj, sk))) in star_firsts.iter().zip(&star_seconds).enumerate() {
                out[sb + PER_STAR * i] = (fo[fj] * fo[fk]).powi(2);
                out[sb + PER_STAR * i + 1] = (so[sj] * so[sk]).powi(2);
            }
        },
    )?;

    let terms = assemble(space, &plan, &triple, bm.means());
    let loo: Vec<[f64; 7]> = bm.leave_one_out().iter().map(|mv| assemble(space, &plan, &triple, mv)).collect();
    let b = loo.len() as f64;
    let jack = |g: &dyn Fn(&[f64; 7]) -> f64| {
        if loo.len() < 2 {
            return 0.0;
        }
        let vals: Vec<f64> = loo.iter().map(g).collect();
        let centre = vals.iter().sum::<f64>() / b;
        ((b - 1.0) / b * vals.iter().map(|v| (v - centre).powi(2)).sum::<f64>()).sqrt()
    };
    let mut stderrs = [0.0; 7];
    for (i, s) in stderrs.iter_mut().enumerate() {
        *s = jack(&|t: &[f64; 7]| t[i]);
    }
    let total_stderr = jack(&|t: &[f64; 7]| t.iter().sum());
    let values = bm.values.unwrap_or_default();
    let empirical_dk = empirical_kolmogorov_with_stderr(&values)?;
    Ok(BoundBreakdown {
        terms,
        total: terms.iter().sum(),
        triple,
        mode: ModeTag::MonteCarlo,
        stderrs: Some(stderrs),
        total_stderr: Some(total_stderr),
        normalization: Some(norm),
        samples: Some(params.samples),
        seed: Some(params.seed),
        empirical_dk: Some(empirical_dk),
    })
}

/// The four-term bound
/// `E|1 − ⟨DF, −DL⁻¹F⟩| + √(2π)/8 E⟨(pq)^{-1/2}(DF)², |DL⁻¹F|⟩
///  + 1/2 E⟨(pq)^{-1/2}(DF)², |F·DL⁻¹F|⟩ + sup_x E⟨(pq)^{-1/2}(DF)D1{F>x}, |DL⁻¹F|⟩`,
/// computed exactly through the chaos decomposition.
pub fn malliavin_stein_bound(space: &RademacherSpace, f: &dyn Functional) -> Result<MalliavinSteinBound> {
    check_functional(space, f)?;
    let e = Enumeration::new(space, DEFAULT_ENUMERATION_CAP)?;
    let m = space.len();
    let table = e.tabulate(f);
    check_normalized(&e, &table)?;
    let mut decomp = decompose_table(space, table.clone());
    // centred up to the tolerance checked above
    let mut coeffs = decomp.coefficients().to_vec();
    coeffs[0] = 0.0;
    decomp = crate::chaos::ChaosDecomposition::from_coefficients(space, coeffs)?;
    let inverse = ou_transform(&decomp, OuMode::Inverse)?.to_table();

    let size = e.size();
    let mut inner = vec![0.0; size];
    let mut second = 0.0;
    let mut third = 0.0;
    let mut events: Vec<(f64, f64)> = Vec::new();
    for k in 0..m {
        let df = gradient_table(space, &table, k);
        let dg = gradient_table(space, &inverse, k);
        let inv = 1.0 / space.sqrt_pq(k);
        for w in 0..size {
            inner[w] -= df[w] * dg[w];
        }
        second += e.expect(|w| inv * df[w] * df[w] * dg[w].abs());
        third += e.expect(|w| inv * df[w] * df[w] * (table[w] * dg[w]).abs());
        let bit = 1usize << k;
        for w in (0..size).filter(|w| w & bit == 0) {
            let (lo, hi) = (table[w], table[w | bit]);
            let weight = e.weight(w) + e.weight(w | bit);
            let c = weight * space.sqrt_pq(k) * (hi - lo).abs() * dg[w].abs();
            if c > 0.0 && lo != hi {
                events.push((lo.min(hi), c));
                events.push((lo.max(hi), -c));
            }
        }
    }
    let first = e.expect(|w| (1.0 - inner[w]).abs());
    // the integrand is a sum of weights on intervals [min, max), so its
    // supremum is attained at a left endpoint
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut level = 0.0f64;
    let mut fourth = 0.0f64;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            level += events[i].1;
            i += 1;
        }
        fourth = fourth.max(level);
    }
    let terms = [first, (2.0 * PI).sqrt() / 8.0 * second, 0.5 * third, fourth];
    Ok(MalliavinSteinBound { terms, total: terms.iter().sum() })
}

/// `E‖DF‖² = Σ_k E[(D_kF)²]`, an upper bound for `Var[F]`. Uses enumeration
/// within the cap and otherwise a Monte Carlo estimate through the gradient
/// oracle (10⁵ samples, seed 0).
pub fn poincare_upper(space: &RademacherSpace, f: &dyn Functional) -> Result<f64> {
    check_functional(space, f)?;
    match Enumeration::new(space, DEFAULT_ENUMERATION_CAP) {
        Ok(e) => {
            let table = e.tabulate(f);
            Ok((0..space.len())
                .map(|k| {
                    let g = gradient_table(space, &table, k);
                    e.expect(|w| g[w] * g[w])
                })
                .sum())
        }
        Err(err) => {
            let oracles = f.oracles().ok_or(err)?;
            let firsts: Vec<usize> = (0..space.len()).collect();
            let spec = SampleSpec::new(100_000, 0);
            let bm = batch_means(
                space,
                &spec,
                1,
                false,
                || vec![0.0; firsts.len()],
                |fo, c, out| {
                    oracles.evaluate_batch(c, &firsts, &[], fo, &mut []);
                    out[0] = fo.iter().map(|g| g * g).sum();
                },
            )?;
            Ok(bm.means()[0])
        }
    }
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `sup_x |F_N(x) − Φ(x)|` for the empirical distribution of the samples.
pub fn empirical_kolmogorov(samples: &[f64]) -> Result<f64> {
    Ok(empirical_kolmogorov_with_stderr(samples)?.value)
}

/// Empirical Kolmogorov distance with the binomial standard error
/// `sqrt(Φ(x*)(1 − Φ(x*))/N)` at the maximizing point.
pub fn empirical_kolmogorov_with_stderr(samples: &[f64]) -> Result<KolmogorovEstimate> {
    if samples.is_empty() {
        return Err(Error::Empty("Kolmogorov distance of no samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut best = (0.0f64, 0.5f64);
    for (i, &x) in sorted.iter().enumerate() {
        let phi = normal_cdf(x);
        let d = ((i + 1) as f64 / n - phi).abs().max((i as f64 / n - phi).abs());
        if d > best.0 {
            best = (d, phi);
        }
    }
    Ok(KolmogorovEstimate { value: best.0, stderr: (best.1 * (1.0 - best.1) / n).sqrt() })
}

/// Kolmogorov distance to the normal law of a finitely supported law given
/// as `(value, probability)` pairs.
pub fn weighted_kolmogorov(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("Kolmogorov distance of an empty law".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = sorted.iter().map(|p| p.1).sum();
    let mut below = 0.0;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i].0;
        let mut mass = 0.0;
        while i < sorted.len() && sorted[i].0 == x {
            mass += sorted[i].1;
            i += 1;
        }
        let phi = normal_cdf(x);
        let upto = below + mass;
        best = best.max((below / total - phi).abs()).max((upto / total - phi).abs());
        below = upto;
    }
    Ok(best)
}

/// `d_K(F, N)` from the full enumerated law of `F`.
pub fn exact_kolmogorov(space: &RademacherSpace, f: &dyn Functional) -> Result<f64> {
    check_functional(space, f)?;
    let e = Enumeration::new(space, DEFAULT_ENUMERATION_CAP)?;
    weighted_kolmogorov(&e.distribution(&e.tabulate(f)))
}
