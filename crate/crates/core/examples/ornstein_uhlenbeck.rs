//! Generator, pseudo-inverse and semigroup, with a Mehler-formula check.
use rademacher::chaos::{mehler_estimate, ou_transform, stroock_decompose, OuMode};
use rademacher::functional::FnFunctional;
use rademacher::{Configuration, RademacherSpace};

fn main() -> rademacher::Result<()> {
    let space = RademacherSpace::new(vec![0.2, 0.5, 0.7, 0.4])?;
    let f = FnFunctional::new(4, |c: &Configuration| (c.count_ones() as f64).powi(2) + if c.get(0) && c.get(3) { 1.5 } else { 0.0 });
    let decomp = stroock_decompose(&space, &f)?;
    let generated = ou_transform(&decomp, OuMode::Generator)?;
    let back = ou_transform(&generated, OuMode::Inverse)?;
    let err = back.coefficients().iter().zip(decomp.coefficients()).skip(1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("|L^-1 L F - (F - EF)| max coefficient error {err:.2e}");

    let t = 0.7;
    let semigroup = ou_transform(&decomp, OuMode::Semigroup(t))?.to_table();
    let base = Configuration::from_mask(4, 0b0101);
    let est = mehler_estimate(&space, &f, t, &base, 200_000, 42)?;
    let exact = semigroup[base.mask() as usize];
    println!("P_t F at {:04b}: exact {exact:.5}, Mehler {:.5} ± {:.5}", base.mask(), est.estimate, est.stderr);
    Ok(())
}
