//! The here-and-now decision vector and its flattening to the optimizer
//! genome.

use serde::{Deserialize, Serialize};

use crate::grid::{DerKindTag, DerParams, NetworkCase};

use super::EvalError;

/// Day-ahead setpoints fixed before uncertainty resolves: CHP output and
/// signed ESS power (positive = discharge) per unit per hour. Grid exchange
/// is the per-scenario recourse and is computed, not encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSchedule {
    /// kW, outer index = CHP unit in case order, inner = hour.
    pub chp_kw: Vec<Vec<f64>>,
    /// Signed kW, outer index = ESS unit in case order, inner = hour.
    pub ess_kw: Vec<Vec<f64>>,
}

impl DispatchSchedule {
    pub fn zeros(case: &NetworkCase) -> Self {
        let steps = case.horizon.steps;
        DispatchSchedule {
            chp_kw: vec![vec![0.0; steps]; case.units_of_kind(DerKindTag::Chp).len()],
            ess_kw: vec![vec![0.0; steps]; case.units_of_kind(DerKindTag::Ess).len()],
        }
    }

    pub fn check_dims(&self, case: &NetworkCase) -> Result<(), EvalError> {
        let steps = case.horizon.steps;
        let n_chp = case.units_of_kind(DerKindTag::Chp).len();
        let n_ess = case.units_of_kind(DerKindTag::Ess).len();
        let ok = self.chp_kw.len() == n_chp
            && self.ess_kw.len() == n_ess
            && self.chp_kw.iter().all(|v| v.len() == steps)
            && self.ess_kw.iter().all(|v| v.len() == steps);
        if ok {
            Ok(())
        } else {
            Err(EvalError::DimensionMismatch(format!(
                "schedule needs {n_chp} CHP and {n_ess} ESS series of {steps} hours"
            )))
        }
    }

    /// Genome dimension: steps * (n_CHP + n_ESS).
    pub fn genome_len(case: &NetworkCase) -> usize {
        let steps = case.horizon.steps;
        steps
            * (case.units_of_kind(DerKindTag::Chp).len()
                + case.units_of_kind(DerKindTag::Ess).len())
    }

    /// Per-dimension genome bounds: `[p_min, p_max]` for each CHP hour, then
    /// `[-p_ch_max, p_dis_max]` for each ESS hour, unit-major.
    pub fn genome_bounds(case: &NetworkCase) -> (Vec<f64>, Vec<f64>) {
        let steps = case.horizon.steps;
        let mut lo = Vec::with_capacity(Self::genome_len(case));
        let mut hi = Vec::with_capacity(Self::genome_len(case));
        for &u in &case.units_of_kind(DerKindTag::Chp) {
            let der = &case.ders[u];
            for _ in 0..steps {
                lo.push(der.p_min);
                hi.push(der.p_max);
            }
        }
        for &u in &case.units_of_kind(DerKindTag::Ess) {
            if let DerParams::Ess(p) = &case.ders[u].params {
                for _ in 0..steps {
                    lo.push(-p.p_ch_max);
                    hi.push(p.p_dis_max);
                }
            }
        }
        (lo, hi)
    }

    pub fn from_genome(case: &NetworkCase, x: &[f64]) -> Result<Self, EvalError> {
        if x.len() != Self::genome_len(case) {
            return Err(EvalError::DimensionMismatch(format!(
                "genome has {} entries, expected {}",
                x.len(),
                Self::genome_len(case)
            )));
        }
        let steps = case.horizon.steps;
        let n_chp = case.units_of_kind(DerKindTag::Chp).len();
        let n_ess = case.units_of_kind(DerKindTag::Ess).len();
        let mut chp_kw = Vec::with_capacity(n_chp);
        for u in 0..n_chp {
            chp_kw.push(x[u * steps..(u + 1) * steps].to_vec());
        }
        let base = n_chp * steps;
        let mut ess_kw = Vec::with_capacity(n_ess);
        for u in 0..n_ess {
            ess_kw.push(x[base + u * steps..base + (u + 1) * steps].to_vec());
        }
        Ok(DispatchSchedule { chp_kw, ess_kw })
    }

    pub fn to_genome(&self) -> Vec<f64> {
        self.chp_kw
            .iter()
            .chain(self.ess_kw.iter())
            .flatten()
            .copied()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{fixture_path, load_case};

    #[test]
    fn genome_round_trip_on_lv_fixture() {
        let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
        assert_eq!(DispatchSchedule::genome_len(&case), 48);
        let (lo, hi) = DispatchSchedule::genome_bounds(&case);
        assert_eq!(lo.len(), 48);
        // CHP block then ESS block
        assert_eq!(lo[0], 0.0);
        assert_eq!(hi[0], 200.0);
        assert_eq!(lo[24], -60.0);
        assert_eq!(hi[24], 60.0);
        let x: Vec<f64> = (0..48).map(|i| i as f64).collect();
        let sched = DispatchSchedule::from_genome(&case, &x).unwrap();
        assert_eq!(sched.chp_kw[0][5], 5.0);
        assert_eq!(sched.ess_kw[0][5], 29.0);
        assert_eq!(sched.to_genome(), x);
    }

    #[test]
    fn wrong_genome_length_rejected() {
        let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
        assert!(DispatchSchedule::from_genome(&case, &[0.0; 4]).is_err());
    }
}
