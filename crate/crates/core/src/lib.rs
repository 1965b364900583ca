//! Numerical toolkit for analysis relative to a critical radius function.
//!
//! Everything lives on a uniform cell-centered grid over a box `[-L, L]^d`
//! (`d <= 3`): variable exponents and their Luxemburg norms, critical radius
//! functions (including the one induced by a nonnegative potential), the
//! local and penalized maximal operators, the three Muckenhoupt-type weight
//! constants and the covering constructions used to pass from local to
//! global estimates.
//!
//! The crate is `no_std` (it needs `alloc`). The `std` feature only adds
//! `std::error::Error` integration; `parallel` evaluates per-cell operator
//! loops on the rayon pool; `serde` derives `Serialize` on report types.
//!
//! Conventions shared by every module:
//!
//! * a cell belongs to a ball when its center lies strictly inside it;
//! * `|B|` is the discrete measure `h^d * #cells`;
//! * functions are extended by zero outside the box.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` rejects NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod cover;
pub mod exponent;
pub mod expr;
pub mod grid;
pub mod maximal;
pub mod norm;
pub mod rho;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use math::pairwise_sum;

pub use cover::{BallFamily, FamilyTag, OverlapReport, SubcriticalCovering};
pub use exponent::{LogHolderReport, VariableExponent};
pub use expr::Expr;
pub use grid::{Ball, Domain, GridFunction, Measure, PrefixSums};
pub use maximal::{RadiusGrid, ThetaSplit};
pub use norm::NormResult;
pub use rho::{RhoConstants, RhoFunction};
pub use weights::ClassReport;
