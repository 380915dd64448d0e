//! Geometric measure of entanglement of multipartite pure quantum states.
//!
//! A pure state on n parties is a dense complex tensor with one mode per
//! party. Its distance to the nearest product (rank-one) state,
//! `sqrt(2 - 2*sigma)` where `sigma` is the largest overlap with any unit
//! product state, quantifies how entangled the state is. This crate finds
//! `sigma` by a shifted alternating power iteration over random restarts
//! ([`solver`]), checks it against a dimension-only upper bound
//! ([`bounds`]), parses states written in Dirac notation ([`ket`]), and
//! ships a catalog of reference states with known values ([`catalog`]).
//!
//! ```
//! use gme::{solve, SolverConfig};
//!
//! let expr = gme::ket::parse("(|000> + |111>)/sqrt(2)").unwrap();
//! let state = expr.to_tensor(gme::NormalizePolicy::Strict).unwrap().tensor;
//! let cfg = SolverConfig { restarts: 8, ..SolverConfig::default() };
//! let result = solve(&state, &cfg).unwrap();
//! let gme = gme::gme_from_sigma(result.sigma).unwrap();
//! assert!((result.sigma - 0.5f64.sqrt()).abs() < 1e-9);
//! assert!((gme - 0.7654).abs() < 1e-4);
//! ```

#![forbid(unsafe_code)]

pub mod bounds;
pub mod catalog;
pub mod ket;
pub mod report;
pub mod solver;
pub mod tensor;

pub use bounds::{bipartite_sigma, gme_from_sigma, sigma_floor, sigma_from_gme, upper_bound, GmeReport};
pub use ket::{BuiltState, KetExpr, NormalizePolicy};
pub use solver::{power_iterate, solve, solve_symmetric, SolveResult, SolverConfig};
pub use tensor::{ProductState, StateTensor};
