//! Covering codes in the Hamming space `[q]^n`.
//!
//! The crate is split along the lines of the problem:
//!
//! * [`hamming`] – spaces, words, ball volumes and ball enumeration.
//! * [`code`] – covering codes, exhaustive and sampled covering checks, densities.
//! * [`construction`] – direct sums, partial dominating sets and the recursive
//!   split construction `K = X ⊕ [q]^r ∪ N̄(X) ⊕ K₂`.
//! * [`exact`] – branch-and-bound search for minimum covering codes on tiny spaces.
//! * [`bounds`] – closed-form upper bounds on the asymptotic covering density,
//!   their optimizer and the numeric checks around them.

pub mod bounds;
pub mod code;
pub mod construction;
mod error;
pub mod exact;
pub mod hamming;

pub use code::{Code, DensityValue, SampledVerdict, Verdict};
pub use error::{Error, Result};
pub use hamming::{HammingSpace, Word};
