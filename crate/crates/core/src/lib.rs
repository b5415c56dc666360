//! Weak β-greedy kernel interpolation with Newton-basis updates, closed-form
//! references for the Brownian-bridge example, and run diagnostics.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod greedy;
pub mod interp;
pub mod kernel;
pub mod oracle;

pub use domain::{Domain, PointSet};
pub use error::{Error, Result};
pub use greedy::{run, Beta, GammaSchedule, GreedyConfig, RunResult, StopReason, WeakPolicy};
pub use interp::{GreedyState, TargetFunction};
pub use kernel::{gram, GramMatrix, KernelFamily, KernelSpec};
