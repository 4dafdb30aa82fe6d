//! Per-unit operating cost components: CHP fuel cost with heat credit, O&M,
//! and emission mass.

use crate::der::ChpParams;
use crate::grid::{EmissionCoeffs, PriceBook};

use super::EvalError;

/// Exponent cap before `exp` in the emission curve.
const EMISSION_EXP_CAP: f64 = 700.0;

/// CHP operating cost in $/h: fuel at `gas_price` divided by electrical
/// efficiency, minus the heat credit for recovered heat.
pub fn chp_fuel_cost(p_kw: f64, chp: &ChpParams, prices: &PriceBook) -> Result<f64, EvalError> {
    if p_kw < chp.p_min || p_kw > chp.p_max {
        return Err(EvalError::OutOfRange {
            value: p_kw,
            min: chp.p_min,
            max: chp.p_max,
        });
    }
    Ok(prices.gas_price * (p_kw / chp.efficiency)
        - prices.heat_credit * chp.heat_to_electric * p_kw)
}

/// Operation and maintenance cost in $ for one step. Callers pass the
/// absolute throughput for storage units.
pub fn om_cost(p_kw: f64, om_rate: f64, dt_h: f64) -> f64 {
    om_rate * p_kw * dt_h
}

/// Emission mass flow in kg/h at output `p_kw`: quadratic plus exponential
/// term. The exponent is capped to keep the evaluation finite.
pub fn emission_mass(p_kw: f64, coefs: &EmissionCoeffs) -> Result<f64, EvalError> {
    let exponent = coefs.lambda * p_kw;
    if exponent > EMISSION_EXP_CAP {
        return Err(EvalError::EmissionOverflow { exponent });
    }
    Ok(coefs.alpha
        + coefs.beta * p_kw
        + coefs.gamma * p_kw * p_kw
        + coefs.zeta * exponent.exp())
}
