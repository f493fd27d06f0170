//! Fundamental units of real quadratic fields `Q(sqrt(d))`, `d = 2, 3 (mod 4)`,
//! and the least power `n(p)` of the unit lying in the order of odd prime
//! conductor `p`.
//!
//! The crate computes `n(p)` and the quotient `q` for individual pairs,
//! sweeps whole `(d, p)` ranges into frequency histograms (in parallel with
//! the default `parallel` feature), and renders the resulting tables.

pub mod arith;
mod error;
mod exec;
pub mod orderfind;
pub mod pell;
pub mod report;
pub mod ringmod;
pub mod sweep;

pub use error::{Error, Result};
pub use orderfind::{
    case_key, naive_order, order_and_quotient, order_and_quotient_single, CaseKey, OrderResult,
};
pub use pell::{cf_expand, fundamental_unit_exact, fundamental_unit_mod_p, FieldParams};
pub use sweep::{run_sweep, CaseHistograms, Histogram, SweepConfig, SweepOutcome, SweepStatus};
