//! Analysis toolkit: transport-cost accounting, failure-rate tails,
//! uncorrectable-class counting, and eavesdropper information bounds.
//!
//! Everything here is closed-form or exhaustive arithmetic — no sampling.
//! Where a quantity can overflow or underflow `f64`, the computation runs
//! in log space or exact big-integer/rational arithmetic, and results carry
//! both representations so reports can show the rounded figure while tests
//! pin the exact one.

pub mod bigprob;
pub mod eavesdropper;
pub mod nu;
pub mod overhead;
pub mod rates;
