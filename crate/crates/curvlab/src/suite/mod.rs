//! The identity suite: one evaluator per named identity, with hypothesis
//! gates, calibrated tolerances and negative-control hooks.

pub mod algebra_checks;
pub mod catalog;
pub mod global;
pub mod lemma;
pub mod negative;
pub mod section3;

pub use catalog::{IdentityId, CATALOG};
pub use global::{run_chart_suite, SuiteConfig, SuiteError};
pub use lemma::{Eq210Reading, LemmaData};
