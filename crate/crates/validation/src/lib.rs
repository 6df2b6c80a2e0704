//! Reference solutions used to check `svm-core` from the outside.
//!
//! Nothing here calls into the solver's wave-speed or Riemann code; the
//! references are written directly from the model equations.

pub mod jacobian;
pub mod record;
pub mod sample;
pub mod suliciu;
