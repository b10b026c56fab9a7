//! Symbolic toolkit for the Lie symmetry analysis of the two-dimensional
//! Ricci flow model equation
//!
//! ```text
//! u^2*u_t + u_y*u_x - u*u_xy = 0
//! ```
//!
//! on the chart (x, y, t, u). The crate provides:
//!
//! - [`expr`]: an exact-arithmetic expression kernel with parsing,
//!   differentiation through unknown functions, canonical simplification,
//!   numeric evaluation and a seeded zero-test oracle;
//! - [`algebra`]: the six-dimensional symmetry algebra by structure
//!   constants, with symbolic adjoint matrices `Ad(exp(s·X_i))`;
//! - [`fields`]: concrete vector fields on coordinate charts, commutators,
//!   one-parameter flows and the solution-to-solution transformations;
//! - [`optimal`]: canonicalization of an arbitrary algebra element onto the
//!   eight normal forms of the one-dimensional optimal system, with a
//!   replayable adjoint word;
//! - [`reduction`]: invariants of a one-parameter subgroup via the
//!   characteristic system, similarity charts, and the reduction of the
//!   equation to PDEs in (z, w) and ODEs in s;
//! - [`catalog`]: the shipped tables of charts, reduced equations and
//!   closed-form group-invariant solutions, plus the verification harness
//!   that checks every claim numerically and, where possible, exactly.

pub mod algebra;
pub mod catalog;
pub mod expr;
pub mod fields;
pub mod optimal;
pub mod reduction;
pub mod sym;

pub use expr::{parse, render, Expr, Q};
pub use sym::{Func, Sym};
