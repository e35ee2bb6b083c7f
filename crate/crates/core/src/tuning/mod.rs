//! Tuning phases: trialling candidate configurations on live iterations and
//! selecting the cheapest, with pluggable candidate strategies.

pub mod controller;
pub mod evidence;
pub mod predictive;
pub mod strategy;

pub use controller::{
    run_tuning_phase, write_tuning_log, Directive, PhaseRecord, TrialHost, TuningController, TuningLogRow, TuningSettings,
};
pub use evidence::{evidence_cost, median, PerformanceEvidence};
pub use predictive::{predict_cost, PredictorEntry, Predictive};
pub use strategy::{full_search_candidates, Expert, Fixed, FullSearch, PhaseContext, RandomForest, Strategy};
