//! Probability models for load, wind and irradiance, scenario generation and
//! backward scenario reduction.

mod reduce;
mod scenario;

use serde::{Deserialize, Serialize};
use statrs::function::erf;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::grid::ScalarOrSeries;

pub use reduce::{reduce_scenarios, reduction_fidelity, FidelityReport, QuantityFidelity};
pub use scenario::{
    forecast_scenario, generate_scenarios, read_scenarios_csv, write_scenarios_csv, Scenario,
    ScenarioSet,
};

#[derive(Debug, Error)]
pub enum UncertaintyError {
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("value {0} outside the distribution support")]
    OutOfSupport(f64),
    #[error("no Beta distribution has mean {mu} and std dev {sigma}")]
    InfeasibleMoments { mu: f64, sigma: f64 },
    #[error("level count must be an odd integer >= 3, got {0}")]
    BadLevelCount(usize),
    #[error("case is missing profile: {0}")]
    MissingProfile(String),
    #[error("reduction target {target} not in 1..={len}")]
    BadTarget { target: usize, len: usize },
    #[error("scenario sets have different horizons ({0} vs {1})")]
    HorizonMismatch(usize, usize),
    #[error("scenario CSV malformed: {0}")]
    MalformedCsv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A univariate probability density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Pdf {
    Normal { mu: f64, sigma: f64 },
    Beta { alpha: f64, beta: f64 },
    Rayleigh { scale: f64 },
    Weibull { shape: f64, scale: f64 },
}

impl Pdf {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self, UncertaintyError> {
        if !(sigma > 0.0) {
            return Err(UncertaintyError::InvalidParameter(format!(
                "normal sigma must be positive, got {sigma}"
            )));
        }
        Ok(Pdf::Normal { mu, sigma })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self, UncertaintyError> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(UncertaintyError::InvalidParameter(format!(
                "beta shape parameters must be positive, got {alpha}, {beta}"
            )));
        }
        Ok(Pdf::Beta { alpha, beta })
    }

    pub fn rayleigh(scale: f64) -> Result<Self, UncertaintyError> {
        if !(scale > 0.0) {
            return Err(UncertaintyError::InvalidParameter(format!(
                "rayleigh scale must be positive, got {scale}"
            )));
        }
        Ok(Pdf::Rayleigh { scale })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self, UncertaintyError> {
        if !(shape > 0.0 && scale > 0.0) {
            return Err(UncertaintyError::InvalidParameter(format!(
                "weibull shape and scale must be positive, got {shape}, {scale}"
            )));
        }
        Ok(Pdf::Weibull { shape, scale })
    }

    /// Probability density at `x`. The Beta density is only defined on
    /// [0, 1]; other kinds evaluate to 0 left of their support.
    pub fn density(&self, x: f64) -> Result<f64, UncertaintyError> {
        match *self {
            Pdf::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                Ok((-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
            }
            Pdf::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&x) {
                    return Err(UncertaintyError::OutOfSupport(x));
                }
                let ln_norm = ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta);
                // At the endpoints the density is a limit; evaluate the
                // interior formula only where the powers are finite.
                let ln_x = if alpha == 1.0 { 0.0 } else { (alpha - 1.0) * x.ln() };
                let ln_1x = if beta == 1.0 {
                    0.0
                } else {
                    (beta - 1.0) * (1.0 - x).ln()
                };
                Ok((ln_norm + ln_x + ln_1x).exp())
            }
            Pdf::Rayleigh { scale } => {
                // Weibull shape-2 convention: f(x) = 2x/c^2 * exp(-(x/c)^2).
                if x < 0.0 {
                    return Ok(0.0);
                }
                let c2 = scale * scale;
                Ok(2.0 * x / c2 * (-x * x / c2).exp())
            }
            Pdf::Weibull { shape, scale } => {
                if x < 0.0 {
                    return Ok(0.0);
                }
                let t = x / scale;
                Ok(shape / scale * t.powf(shape - 1.0) * (-t.powf(shape)).exp())
            }
        }
    }

    /// Cumulative distribution function at `x`.
    pub fn cdf(&self, x: f64) -> Result<f64, UncertaintyError> {
        match *self {
            Pdf::Normal { mu, sigma } => Ok(normal_cdf((x - mu) / sigma)),
            Pdf::Beta { .. } => Err(UncertaintyError::InvalidParameter(
                "closed-form Beta CDF not provided".into(),
            )),
            Pdf::Rayleigh { scale } => {
                if x < 0.0 {
                    return Ok(0.0);
                }
                Ok(1.0 - (-x * x / (scale * scale)).exp())
            }
            Pdf::Weibull { shape, scale } => {
                if x < 0.0 {
                    return Ok(0.0);
                }
                Ok(1.0 - (-(x / scale).powf(shape)).exp())
            }
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf::erf(z / std::f64::consts::SQRT_2))
}

/// Fit Beta shape parameters to a mean and standard deviation.
///
/// Feasible only when `sigma^2 < mu * (1 - mu)`.
pub fn beta_params_from_moments(mu: f64, sigma: f64) -> Result<(f64, f64), UncertaintyError> {
    if !(0.0 < mu && mu < 1.0) || !(sigma > 0.0) {
        return Err(UncertaintyError::InfeasibleMoments { mu, sigma });
    }
    let var = sigma * sigma;
    if var >= mu * (1.0 - mu) {
        return Err(UncertaintyError::InfeasibleMoments { mu, sigma });
    }
    let beta = (1.0 - mu) * (mu * (1.0 - mu) / var - 1.0);
    let alpha = mu * beta / (1.0 - mu);
    Ok((alpha, beta))
}

/// Mean and standard deviation of a Beta(alpha, beta) distribution.
pub fn beta_moments(alpha: f64, beta: f64) -> (f64, f64) {
    let s = alpha + beta;
    let mean = alpha / s;
    let var = alpha * beta / (s * s * (s + 1.0));
    (mean, var.sqrt())
}

/// Discretize a normal distribution into an odd number of levels centered on
/// the mean, one sigma apart. Each level carries the CDF mass of the band
/// `[level - sigma/2, level + sigma/2]`; the outermost levels absorb the
/// tails.
pub fn discretize_normal(
    mu: f64,
    sigma: f64,
    n_levels: usize,
) -> Result<Vec<(f64, f64)>, UncertaintyError> {
    if n_levels < 3 || n_levels % 2 == 0 {
        return Err(UncertaintyError::BadLevelCount(n_levels));
    }
    if !(sigma > 0.0) {
        return Err(UncertaintyError::InvalidParameter(format!(
            "normal sigma must be positive, got {sigma}"
        )));
    }
    let half = (n_levels as i64 - 1) / 2;
    let mut out = Vec::with_capacity(n_levels);
    for j in -half..=half {
        let level = mu + j as f64 * sigma;
        let lo = if j == -half {
            0.0
        } else {
            normal_cdf(j as f64 - 0.5)
        };
        let hi = if j == half {
            1.0
        } else {
            normal_cdf(j as f64 + 0.5)
        };
        out.push((level, hi - lo));
    }
    Ok(out)
}

/// Wind speed sampling model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindModel {
    /// No wind uncertainty: scenarios carry the forecast speed.
    Forecast,
    /// Rayleigh with the scale chosen so the mean equals the forecast.
    Rayleigh,
    /// Weibull with configured shape, scale chosen to match the forecast
    /// mean.
    Weibull,
}

/// Per-quantity uncertainty configuration, stored in the case file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UncertaintyConfig {
    /// Std dev of the multiplicative normal load forecast error.
    pub sigma_load: f64,
    pub wind_model: WindModel,
    pub weibull_shape: f64,
    /// Mean of the Beta clearness fraction, scalar or per hour.
    pub irradiance_mu: ScalarOrSeries,
    /// Std dev of the Beta clearness fraction; 0 makes irradiance
    /// deterministic at `mu * clear_sky`.
    pub irradiance_sigma: ScalarOrSeries,
    /// Std dev of the multiplicative normal price error (0 = price certain).
    pub price_sigma: f64,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        UncertaintyConfig {
            sigma_load: 0.05,
            wind_model: WindModel::Rayleigh,
            weibull_shape: 4.0,
            irradiance_mu: ScalarOrSeries::Scalar(0.7),
            irradiance_sigma: ScalarOrSeries::Scalar(0.15),
            price_sigma: 0.0,
        }
    }
}

impl UncertaintyConfig {
    /// A configuration with every distribution collapsed onto the forecast.
    pub fn degenerate() -> Self {
        UncertaintyConfig {
            sigma_load: 0.0,
            wind_model: WindModel::Forecast,
            weibull_shape: 4.0,
            irradiance_mu: ScalarOrSeries::Scalar(1.0),
            irradiance_sigma: ScalarOrSeries::Scalar(0.0),
            price_sigma: 0.0,
        }
    }

    pub(crate) fn validate(&self, steps: usize) -> Result<(), String> {
        if !(self.sigma_load >= 0.0) {
            return Err(format!("sigma_load must be >= 0, got {}", self.sigma_load));
        }
        if !(self.price_sigma >= 0.0) {
            return Err(format!(
                "price_sigma must be >= 0, got {}",
                self.price_sigma
            ));
        }
        if !(self.weibull_shape > 0.0) {
            return Err(format!(
                "weibull_shape must be > 0, got {}",
                self.weibull_shape
            ));
        }
        self.irradiance_mu
            .check_len(steps)
            .map_err(|e| format!("irradiance_mu: {e}"))?;
        self.irradiance_sigma
            .check_len(steps)
            .map_err(|e| format!("irradiance_sigma: {e}"))?;
        for t in 0..steps {
            let mu = self.irradiance_mu.value_at(t);
            let sigma = self.irradiance_sigma.value_at(t);
            if !(0.0 < mu && mu <= 1.0) {
                return Err(format!("irradiance_mu must be in (0, 1], got {mu} at hour {t}"));
            }
            if sigma < 0.0 {
                return Err(format!(
                    "irradiance_sigma must be >= 0, got {sigma} at hour {t}"
                ));
            }
            if sigma > 0.0 {
                beta_params_from_moments(mu, sigma).map_err(|e| format!("hour {t}: {e}"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_beta_density_is_one() {
        let pdf = Pdf::beta(1.0, 1.0).unwrap();
        assert!((pdf.density(0.3).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            pdf.density(1.5),
            Err(UncertaintyError::OutOfSupport(_))
        ));
    }

    #[test]
    fn standard_normal_mode_density() {
        let pdf = Pdf::normal(0.0, 1.0).unwrap();
        let expect = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((pdf.density(0.0).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.39894).abs() < 1e-5);
    }

    #[test]
    fn rayleigh_cdf_at_scale_matches_quadrature() {
        let c = 2.5;
        let pdf = Pdf::rayleigh(c).unwrap();
        // Analytic CDF at x = c.
        let cdf = pdf.cdf(c).unwrap();
        assert!((cdf - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((cdf - 0.63212).abs() < 1e-5);
        // Oracle: composite Simpson integration of the density over [0, c].
        let n = 10_000;
        let h = c / n as f64;
        let mut sum = pdf.density(0.0).unwrap() + pdf.density(c).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * pdf.density(i as f64 * h).unwrap();
        }
        let integral = sum * h / 3.0;
        assert!((integral - cdf).abs() < 1e-9);
    }

    #[test]
    fn beta_moment_fit_recovers_2_2() {
        let (alpha, beta) = beta_params_from_moments(0.5, 0.05f64.sqrt()).unwrap();
        assert!((alpha - 2.0).abs() < 1e-12);
        assert!((beta - 2.0).abs() < 1e-12);
        // Oracle: the variance identity alpha*beta/((a+b)^2 (a+b+1)).
        let var = alpha * beta / ((alpha + beta).powi(2) * (alpha + beta + 1.0));
        assert!((var - 0.05).abs() < 1e-12);
    }

    #[test]
    fn beta_moment_fit_rejects_boundary() {
        let mu: f64 = 0.5;
        let sigma = (mu * (1.0 - mu)).sqrt();
        assert!(matches!(
            beta_params_from_moments(mu, sigma),
            Err(UncertaintyError::InfeasibleMoments { .. })
        ));
    }

    #[test]
    fn beta_moment_round_trip() {
        let mut seed = 0x5eed_u64;
        // simple LCG is enough to spread test points
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let mu = 0.05 + 0.9 * next();
            let max_sigma = (mu * (1.0 - mu)).sqrt();
            let sigma = max_sigma * (0.05 + 0.9 * next());
            let (a, b) = beta_params_from_moments(mu, sigma).unwrap();
            let (m2, s2) = beta_moments(a, b);
            assert!((m2 - mu).abs() < 1e-12, "mu {mu} sigma {sigma}");
            assert!((s2 - sigma).abs() < 1e-10, "mu {mu} sigma {sigma}");
        }
    }

    #[test]
    fn discretize_three_levels() {
        let levels = discretize_normal(0.0, 1.0, 3).unwrap();
        let phi_half = normal_cdf(0.5);
        let expect = [
            (-1.0, normal_cdf(-0.5)),
            (0.0, phi_half - normal_cdf(-0.5)),
            (1.0, 1.0 - phi_half),
        ];
        for ((lv, p), (elv, ep)) in levels.iter().zip(expect.iter()) {
            assert!((lv - elv).abs() < 1e-12);
            assert!((p - ep).abs() < 1e-12);
        }
        assert!((levels[0].1 - 0.3085).abs() < 1e-4);
        assert!((levels[1].1 - 0.3829).abs() < 1e-4);
    }

    #[test]
    fn discretize_partitions_unity_and_shifts_affinely() {
        for n in [3usize, 5, 7, 11] {
            let a = discretize_normal(0.0, 1.0, n).unwrap();
            let total: f64 = a.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n}");
            let b = discretize_normal(10.0, 2.0, n).unwrap();
            for (j, ((lv_a, p_a), (lv_b, p_b))) in a.iter().zip(b.iter()).enumerate() {
                assert!((lv_b - (10.0 + 2.0 * (lv_a - 0.0))).abs() < 1e-12, "n={n} j={j}");
                assert!((p_a - p_b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn discretize_rejects_even_or_small_counts() {
        assert!(matches!(
            discretize_normal(0.0, 1.0, 4),
            Err(UncertaintyError::BadLevelCount(4))
        ));
        assert!(matches!(
            discretize_normal(0.0, 1.0, 1),
            Err(UncertaintyError::BadLevelCount(1))
        ));
    }
}
