//! Euler classes of sums of line bundles over products of 2-spheres,
//! decided combinatorially.
//!
//! The Euler class of `zeta_I1 + ... + zeta_Im` lives in
//! `Z[x1, x2, ...] / (xi^2)` and is nonzero exactly when the sets
//! `I1, ..., Im` admit a system of distinct representatives. This crate
//! computes both sides exactly, cross-checks them, turns them into verdicts
//! about splitting off a trivial line, and runs the index-set dynamics that
//! keeps Hall's condition alive under iteration.
//!
//! * [`ring`]: exact sparse arithmetic in the squarefree ring.
//! * [`bundles`]: families of line bundles and their Euler classes.
//! * [`matching`]: Hall's condition, matchings, permanents.
//! * [`obstruction`]: the equivalence harness and subordination verdicts.
//! * [`dynamics`]: `nu`, `alpha_j`, the generations `Gamma_n` and their labels.
//! * [`cli`]: the batch front end behind the `euler-hall` binary.

pub mod bundles;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod matching;
pub mod obstruction;
pub mod ring;
pub mod sample;
pub mod selftest;
pub mod sweep;

pub use bundles::{euler_class, euler_line, BundleFamily, IndexSet};
pub use error::{Error, Result};
pub use matching::{HallViolation, MatchingResult};
pub use obstruction::Verdict;
pub use ring::{Atom, Monomial, RingElement};
