//! Exact computations for the tubular algebra C(4, λ) and its relatives.
//!
//! * [`algebra`]: quivers with relations, normal-form path bases, the Cartan
//!   matrix and the Euler form.
//! * [`lattice`]: K₀ arithmetic (χ, ⟨−,−⟩, slopes, μ, radical vectors).
//! * [`omega`]: the finite exceptional set Ω and the χ = 1 decomposition.
//! * [`irrational`] and [`search`]: exact slope-window searches against a
//!   quadratic irrational, each result paired with a brute-force certificate.
//! * [`rep`]: finite-dimensional representations, Hom and Ext.
//! * [`pp`]: pp formulas, solution subspaces, free realisations and pushouts.

pub mod algebra;
pub mod error;
pub mod irrational;
pub mod lattice;
pub mod linalg;
pub mod omega;
pub mod pp;
pub mod rational;
pub mod rep;
pub mod search;

pub use error::{Error, Result};
