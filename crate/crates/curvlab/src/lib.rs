//! curvlab: numerical verification of almost-Hermitian curvature identities.
//!
//! The crate has four layers:
//!
//! * [`space`] / [`tensor`] / [`algebra`] / [`sampling`] - pointwise
//!   (single tangent space) multilinear algebra: canonical curvature
//!   tensors, lifts, contractions, sectional curvature, plane sampling and
//!   constrained random inputs.
//! * [`chart`] / [`expr`] - coordinate charts (builtin model geometries and
//!   JSON-defined user charts with a small expression language).
//! * [`jet`] - finite-difference differential geometry on charts:
//!   Christoffel symbols, curvature, nabla omega / J / R, almost-Kaehler
//!   residuals.
//! * [`suite`] / [`report`] - evaluators for the named identity catalog,
//!   assembled into deterministic JSON reports.

pub mod algebra;
pub mod chart;
pub mod expr;
pub mod jet;
pub mod report;
pub mod sampling;
pub mod space;
pub mod suite;
pub mod tensor;

pub use algebra::{
    canonical, contractions, ganchev_reconstruct, l3, lift, nu_from_scalars, pcasc_estimate,
    q_tensor, reconstruct_from_q, scalar_identities, sectional, Canonical, Lift,
};
pub use space::{plane_defects, HermitianSpace, SpaceError, TwoPlane};
pub use tensor::{symmetry_defect, Bilinear, Curv4, Rank3, Rank5};
