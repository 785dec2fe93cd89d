//! Greedy (rho-weak pre-orthogonal adaptive Fourier decomposition) and
//! n-best simultaneous kernel approximation in Hardy and weighted Bergman
//! spaces on the unit disc.

// negated comparisons double as NaN rejection
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dict;
pub mod error;
pub mod greedy;
pub mod nbest;
pub mod optim;
pub mod probes;
pub mod rational;
pub mod ortho;
pub mod series;
pub mod space;
pub mod targets;

pub use error::{Error, Result};
pub use series::{PowerSeries, C64};
pub use space::{SpaceKind, SpaceSpec};
