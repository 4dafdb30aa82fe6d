//! Scenario-based stochastic day-ahead scheduling of grid-connected
//! microgrids on radial feeders.
//!
//! The library models a microgrid as a radial distribution feeder with
//! distributed energy resources (wind, PV, CHP, battery storage), generates
//! and reduces uncertainty scenarios for load, wind and irradiance, evaluates
//! candidate dispatch schedules through a radial power flow against a
//! combined cost / emission / loss / reliability objective, and searches for
//! the best schedule with a cuckoo optimization algorithm.
//!
//! The main entry points are:
//!
//! - [`grid::load_case`] — read and validate a case file,
//! - [`uncertainty::generate_scenarios`] / [`uncertainty::reduce_scenarios`],
//! - [`powerflow::solve_radial`] — backward/forward sweep load flow,
//! - [`evaluate::evaluate_schedule`] — score a schedule over a scenario set,
//! - [`coa::optimize`] — cuckoo optimization over bounded real vectors,
//! - [`pipeline::run_study`] — the full study, end to end.
//!
//! Each major capability has a runnable program under `examples/`; the
//! `microdispatch` binary exposes the same stages as subcommands.

pub mod rng;

pub mod cli;
pub mod coa;
pub mod der;
pub mod evaluate;
pub mod grid;
pub mod pipeline;
pub mod powerflow;
pub mod uncertainty;

pub use grid::{load_case, save_case, NetworkCase};
