//! Exact solvers for vehicle scheduling at lane merges and crossroads.
//!
//! Four models are covered:
//!
//! * two lane chains merging onto one machine, equal processing time
//!   ([`dp_merge`]);
//! * the same with one processing time per lane ([`dp_merge`]);
//! * a flexible chain that may use either of two dedicated machines
//!   ([`dp_dedicated`]);
//! * a four-sector crossroad job shop with limited buffers ([`bnb`]).
//!
//! Every solver has a brute-force counterpart in [`oracle`] used to certify it
//! on small instances. Instances and solutions are exchanged as JSON documents
//! ([`format`]); random instances come from [`generator`].
//!
//! ```
//! use cav_sched::model::{Instance, JobSpec, Objective, ProcTimes, ProblemKind};
//! use cav_sched::dp_merge::solve_two_chains;
//!
//! let instance = Instance::new(
//!     ProblemKind::TwoChains,
//!     ProcTimes::Equal(2),
//!     vec![
//!         vec![JobSpec::new(1, 0), JobSpec::new(2, 3)],
//!         vec![JobSpec::new(3, 1), JobSpec::new(4, 4)],
//!     ],
//!     None,
//! )
//! .unwrap();
//! let solution = solve_two_chains(&instance, Objective::SumC).unwrap();
//! assert_eq!(solution.value, 20);
//! ```

pub mod bnb;
pub mod dp_dedicated;
pub mod dp_merge;
mod error;
pub mod format;
pub mod gantt;
pub mod generator;
pub mod model;
pub mod oracle;
pub mod par;
pub mod solver;

pub use error::{Error, Result};
