//! Exact analysis of linear systems of partial differential equations with
//! rational-function coefficients: formal integrability, Spencer δ-cohomology,
//! Janet tabulars, compatibility conditions and their syzygies.

pub mod cc;
pub mod field;
pub mod jet;
pub mod linalg;
pub mod symbol;
pub mod system;
