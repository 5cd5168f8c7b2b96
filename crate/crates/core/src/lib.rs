//! Algorithms for sets of integers free of differences of the form `h(n)`
//! with `h` an intersective polynomial.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards)]

pub mod arcs;
pub mod arith;
pub mod energy;
pub mod error;
pub mod expsum;
pub mod hfree;
pub mod increment;
pub mod intersective;
pub mod intpoly;
pub mod numeric;
pub mod sieve;

pub use arcs::{ArcClass, ArcSpec, TorusPoint};
pub use energy::{Delta, FreqSet};
pub use error::{Error, Result};
pub use expsum::{Cutoff, ExpSumResult, PhaseSumSpec};
pub use hfree::{HFreeCheck, HFreeInstance, MaxSet};
pub use increment::{Cor0, GammaSelection, IncrementState, IterationOptions, SelectOptions, StopReason, Trajectory};
pub use intersective::{AuxEntry, AuxFamily, Bound, IntersectivityVerdict, PAdicRootData};
pub use intpoly::{IntPoly, ModPoly};
pub use sieve::{SieveCount, SieveProfile};
