//! Pathwise discrete gradients `D_k F = sqrt(p_k q_k) (F_k^+ - F_k^-)`.

use crate::error::{Error, Result};
use crate::exact::check_functional;
use crate::functional::Functional;
use crate::space::{Configuration, RademacherSpace};

/// `D_k F` evaluated by recomputing `F` with coordinate `k` forced to `±1`.
pub struct Gradient<'a> {
    f: &'a dyn Functional,
    k: usize,
    scale: f64,
}

impl Functional for Gradient<'_> {
    fn index_count(&self) -> usize {
        self.f.index_count()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        let mut c = config.clone();
        c.set(self.k, true);
        let plus = self.f.evaluate(&c);
        c.set(self.k, false);
        let minus = self.f.evaluate(&c);
        self.scale * (plus - minus)
    }
}

pub fn gradient<'a>(space: &RademacherSpace, f: &'a dyn Functional, k: usize) -> Result<Gradient<'a>> {
    check_functional(space, f)?;
    space.check_index(k)?;
    Ok(Gradient { f, k, scale: space.sqrt_pq(k) })
}

/// `D_l D_k F`, the gradient in direction `l` of `D_k F`.
pub struct SecondGradient<'a> {
    f: &'a dyn Functional,
    k: usize,
    l: usize,
    scale: f64,
}

impl Functional for SecondGradient<'_> {
    fn index_count(&self) -> usize {
        self.f.index_count()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        let mut c = config.clone();
        let inner = |c: &mut Configuration| {
            c.set(self.k, true);
            let plus = self.f.evaluate(c);
            c.set(self.k, false);
            plus - self.f.evaluate(c)
        };
        c.set(self.l, true);
        let plus = inner(&mut c);
        c.set(self.l, false);
        let minus = inner(&mut c);
        self.scale * (plus - minus)
    }
}

pub fn second_gradient<'a>(
    space: &RademacherSpace,
    f: &'a dyn Functional,
    k: usize,
    l: usize,
) -> Result<SecondGradient<'a>> {
    check_functional(space, f)?;
    space.check_index(k)?;
    space.check_index(l)?;
    Ok(SecondGradient { f, k, l, scale: space.sqrt_pq(k) * space.sqrt_pq(l) })
}

/// Table of `D_k F` given the table of `F` (indexed by mask).
pub fn gradient_table(space: &RademacherSpace, table: &[f64], k: usize) -> Vec<f64> {
    let bit = 1usize << k;
    let c = space.sqrt_pq(k);
    (0..table.len()).map(|mask| c * (table[mask | bit] - table[mask & !bit])).collect()
}

/// Checks that an oracle-backed functional agrees with its pathwise
/// gradients on the given configurations. Returns the largest deviation.
pub fn oracle_deviation(
    space: &RademacherSpace,
    f: &dyn Functional,
    configs: &[Configuration],
) -> Result<f64> {
    check_functional(space, f)?;
    let oracles = f.oracles().ok_or(Error::MissingOracles)?;
    let m = space.len();
    let mut worst: f64 = 0.0;
    for c in configs {
        for k in 0..m {
            let path = gradient(space, f, k)?.evaluate(c);
            worst = worst.max((path - oracles.gradient(c, k)).abs());
            for l in 0..m {
                let path2 = second_gradient(space, f, k, l)?.evaluate(c);
                let oracle2 = oracles.second_gradient(c, k, l);
                worst = worst.max((path2 - oracle2).abs());
                if path2 != 0.0 && !oracles.interacts(k, l) {
                    return Err(Error::Invalid(format!(
                        "D_{l} D_{k} F is nonzero but the interaction oracle omits ({k}, {l})"
                    )));
                }
            }
        }
    }
    Ok(worst)
}
