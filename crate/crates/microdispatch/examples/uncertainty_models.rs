//! Probability building blocks: density evaluation, Beta moment fitting and
//! the level discretization of a normal forecast error.

use microdispatch::uncertainty::{
    beta_moments, beta_params_from_moments, discretize_normal, Pdf,
};

fn main() -> anyhow::Result<()> {
    let normal = Pdf::normal(0.0, 1.0)?;
    let beta = Pdf::beta(2.0, 2.0)?;
    let rayleigh = Pdf::rayleigh(8.0)?;
    println!("densities:");
    println!("  standard normal at 0      = {:.5}", normal.density(0.0)?);
    println!("  Beta(2,2) at 0.5          = {:.5}", beta.density(0.5)?);
    println!("  Rayleigh(c=8) at 8        = {:.5}", rayleigh.density(8.0)?);
    println!("  Rayleigh CDF at the scale = {:.5}", rayleigh.cdf(8.0)?);

    println!("\nBeta moment fit:");
    for (mu, sigma) in [(0.5, 0.05f64.sqrt()), (0.75, 0.12), (0.3, 0.1)] {
        let (a, b) = beta_params_from_moments(mu, sigma)?;
        let (m, s) = beta_moments(a, b);
        println!("  mu {mu:.3} sigma {sigma:.4} -> alpha {a:.4} beta {b:.4} (back: {m:.3}, {s:.4})");
    }

    println!("\nseven-level discretization of Normal(100, 5):");
    for (level, prob) in discretize_normal(100.0, 5.0, 7)? {
        let bar = "#".repeat((prob * 120.0) as usize);
        println!("  {level:>6.1}  p = {prob:.4}  {bar}");
    }
    Ok(())
}
