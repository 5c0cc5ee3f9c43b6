//! Exact engine for ideals on ω, density functionals and ideal convergence.

pub mod density;
pub mod ideals;
pub mod natset;
pub mod rational;
pub mod sequences;
pub mod theorems;
