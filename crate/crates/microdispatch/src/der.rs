//! Device models for the DER fleet: wind turbine power curve, PV output,
//! CHP fuel rate and battery state of charge.
//!
//! All operations are pure functions of their inputs; parameter blocks are
//! validated on construction and immutable afterwards.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DerError {
    #[error("invalid device parameters: {0}")]
    InvalidParams(String),
    #[error("power setpoint {value} kW outside [{min}, {max}] kW")]
    OutOfRange { value: f64, min: f64, max: f64 },
    #[error("simultaneous charge ({charge} kW) and discharge ({discharge} kW)")]
    SimultaneousChargeDischarge { charge: f64, discharge: f64 },
    #[error("storage rate limit violated: {0}")]
    RateLimit(String),
}

/// Wind turbine power curve parameters.
///
/// The curve is zero below the cut-in speed, a quadratic between cut-in and
/// rated speed, flat at `p_rate` up to cut-out, and zero above cut-out. The
/// quadratic coefficients are fixed by requiring zero output at cut-in, rated
/// output at rated speed, and a smooth (zero slope) join at rated speed:
/// `P(v) = p_rate * (1 - ((v_r - v)/(v_r - v_ci))^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WtParamsRaw", into = "WtParamsRaw")]
pub struct WtParams {
    pub p_rate: f64,
    pub v_ci: f64,
    pub v_r: f64,
    pub v_co: f64,
    /// Quadratic coefficients of the normalized curve `a*v^2 + b*v + c`,
    /// derived from the speeds above.
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WtParamsRaw {
    p_rate: f64,
    v_ci: f64,
    v_r: f64,
    v_co: f64,
}

impl TryFrom<WtParamsRaw> for WtParams {
    type Error = DerError;
    fn try_from(raw: WtParamsRaw) -> Result<Self, DerError> {
        WtParams::new(raw.p_rate, raw.v_ci, raw.v_r, raw.v_co)
    }
}

impl From<WtParams> for WtParamsRaw {
    fn from(p: WtParams) -> Self {
        WtParamsRaw {
            p_rate: p.p_rate,
            v_ci: p.v_ci,
            v_r: p.v_r,
            v_co: p.v_co,
        }
    }
}

impl WtParams {
    pub fn new(p_rate: f64, v_ci: f64, v_r: f64, v_co: f64) -> Result<Self, DerError> {
        if !(p_rate > 0.0) {
            return Err(DerError::InvalidParams(format!(
                "wind rated power must be positive, got {p_rate}"
            )));
        }
        if !(0.0 < v_ci && v_ci < v_r && v_r < v_co) {
            return Err(DerError::InvalidParams(format!(
                "wind speeds must satisfy 0 < v_ci < v_r < v_co, got {v_ci}, {v_r}, {v_co}"
            )));
        }
        // Expand p_rate*(1 - ((v_r - v)/d)^2) into a*v^2 + b*v + c (normalized
        // so the value at v_r is 1.0 before scaling by p_rate).
        let d = v_r - v_ci;
        let a = -1.0 / (d * d);
        let b = 2.0 * v_r / (d * d);
        let c = 1.0 - (v_r * v_r) / (d * d);
        Ok(WtParams {
            p_rate,
            v_ci,
            v_r,
            v_co,
            a,
            b,
            c,
        })
    }
}

/// PV array parameters for the irradiance/temperature output model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvParams {
    pub p_stc: f64,
    /// Irradiance at standard test conditions, W/m².
    #[serde(default = "default_g_stc")]
    pub g_stc: f64,
    /// Temperature coefficient, 1/°C.
    pub k: f64,
    /// Reference cell temperature, °C.
    #[serde(default = "default_t_ref")]
    pub t_ref: f64,
}

fn default_g_stc() -> f64 {
    1000.0
}

fn default_t_ref() -> f64 {
    25.0
}

impl PvParams {
    pub fn validate(&self) -> Result<(), DerError> {
        if !(self.p_stc > 0.0) {
            return Err(DerError::InvalidParams(format!(
                "PV rated power must be positive, got {}",
                self.p_stc
            )));
        }
        if !(self.g_stc > 0.0) {
            return Err(DerError::InvalidParams(format!(
                "PV reference irradiance must be positive, got {}",
                self.g_stc
            )));
        }
        Ok(())
    }
}

/// CHP unit parameters: quadratic fuel-rate curve, electrical efficiency and
/// heat-to-electric ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChpParams {
    /// Fuel rate quadratic coefficient, fuel/h per kW².
    pub theta: f64,
    /// Fuel rate linear coefficient, fuel/h per kW.
    pub rho: f64,
    /// Fuel rate constant term, fuel/h.
    pub gamma: f64,
    pub efficiency: f64,
    pub heat_to_electric: f64,
    #[serde(default)]
    pub ramp: Option<f64>,
    pub p_min: f64,
    pub p_max: f64,
}

impl ChpParams {
    pub fn validate(&self) -> Result<(), DerError> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(DerError::InvalidParams(format!(
                "CHP efficiency must be in (0, 1], got {}",
                self.efficiency
            )));
        }
        if self.p_min > self.p_max {
            return Err(DerError::InvalidParams(format!(
                "CHP p_min {} exceeds p_max {}",
                self.p_min, self.p_max
            )));
        }
        if let Some(r) = self.ramp {
            if !(r >= 0.0) {
                return Err(DerError::InvalidParams(format!(
                    "CHP ramp limit must be nonnegative, got {r}"
                )));
            }
        }
        // The fuel rate must be nonnegative over the whole operating range.
        // For a quadratic the minimum is either at an endpoint or, when the
        // curve opens upward, at its vertex.
        let ends = [self.fuel_rate_unchecked(self.p_min), self.fuel_rate_unchecked(self.p_max)];
        let mut min_rate = ends[0].min(ends[1]);
        if self.theta > 0.0 {
            let vertex = -self.rho / (2.0 * self.theta);
            if vertex > self.p_min && vertex < self.p_max {
                min_rate = min_rate.min(self.fuel_rate_unchecked(vertex));
            }
        }
        if min_rate < 0.0 {
            return Err(DerError::InvalidParams(format!(
                "CHP fuel rate goes negative over [{}, {}] kW",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }

    fn fuel_rate_unchecked(&self, p: f64) -> f64 {
        self.theta * p * p + self.rho * p + self.gamma
    }
}

/// Battery storage parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssParams {
    pub capacity: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub soc_init: f64,
    pub p_ch_max: f64,
    pub p_dis_max: f64,
    pub eta_ch: f64,
    pub eta_dis: f64,
}

impl EssParams {
    pub fn validate(&self) -> Result<(), DerError> {
        if !(0.0 <= self.soc_min
            && self.soc_min <= self.soc_init
            && self.soc_init <= self.soc_max
            && self.soc_max <= self.capacity)
        {
            return Err(DerError::InvalidParams(format!(
                "storage SOC bounds must satisfy 0 <= soc_min <= soc_init <= soc_max <= capacity, \
                 got {} <= {} <= {} <= {}",
                self.soc_min, self.soc_init, self.soc_max, self.capacity
            )));
        }
        for (name, eta) in [("eta_ch", self.eta_ch), ("eta_dis", self.eta_dis)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(DerError::InvalidParams(format!(
                    "storage {name} must be in (0, 1], got {eta}"
                )));
            }
        }
        if !(self.p_ch_max >= 0.0 && self.p_dis_max >= 0.0) {
            return Err(DerError::InvalidParams(
                "storage rate limits must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Wind turbine output in kW for a wind speed in m/s. Total function: zero
/// outside the cut-in/cut-out window, rated between rated and cut-out speed.
pub fn wt_power(v: f64, p: &WtParams) -> f64 {
    if v < p.v_ci || v > p.v_co {
        0.0
    } else if v >= p.v_r {
        p.p_rate
    } else {
        let frac = p.a * v * v + p.b * v + p.c;
        (p.p_rate * frac).clamp(0.0, p.p_rate)
    }
}

/// PV output in kW for incident irradiance (W/m²) and cell temperature (°C),
/// clamped to be nonnegative.
pub fn pv_power(g: f64, t_cell: f64, p: &PvParams) -> f64 {
    let out = p.p_stc * (g / p.g_stc) * (1.0 + p.k * (t_cell - p.t_ref));
    out.max(0.0)
}

/// Fuel consumption rate of a CHP unit at output `p_chp` kW, in fuel units
/// per hour.
pub fn chp_fuel_rate(p_chp: f64, c: &ChpParams) -> Result<f64, DerError> {
    if p_chp < c.p_min || p_chp > c.p_max {
        return Err(DerError::OutOfRange {
            value: p_chp,
            min: c.p_min,
            max: c.p_max,
        });
    }
    Ok(c.fuel_rate_unchecked(p_chp))
}

/// Advance the battery state of charge by one step. Charging and discharging
/// are exclusive; the caller encodes one signed power per step and splits it
/// before calling.
pub fn ess_step(
    soc_prev: f64,
    p_ch: f64,
    p_dis: f64,
    dt: f64,
    e: &EssParams,
) -> Result<f64, DerError> {
    if p_ch > 0.0 && p_dis > 0.0 {
        return Err(DerError::SimultaneousChargeDischarge {
            charge: p_ch,
            discharge: p_dis,
        });
    }
    if p_ch < 0.0 || p_dis < 0.0 {
        return Err(DerError::RateLimit(format!(
            "negative rate (charge {p_ch} kW, discharge {p_dis} kW)"
        )));
    }
    if p_ch > e.p_ch_max {
        return Err(DerError::RateLimit(format!(
            "charge {p_ch} kW exceeds limit {} kW",
            e.p_ch_max
        )));
    }
    if p_dis > e.p_dis_max {
        return Err(DerError::RateLimit(format!(
            "discharge {p_dis} kW exceeds limit {} kW",
            e.p_dis_max
        )));
    }
    Ok(soc_prev + e.eta_ch * p_ch * dt - p_dis * dt / e.eta_dis)
}
