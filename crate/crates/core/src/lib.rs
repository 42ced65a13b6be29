//! Mechanisms for makespan scheduling on related machines (`Q||Cmax`) with
//! strategic machines.
//!
//! The crate is `no_std` (it needs `alloc`). Every quantity is an exact
//! rational; there is no floating point anywhere in the allocation rules,
//! payment schemes, property checkers or certificates.
//!
//! Layout:
//! - [`rational`]: scalar helpers, exact `⌈log₂⌉`, logarithm enclosures.
//! - [`model`]: instances, assignments, expected allocations, outcomes.
//! - [`allocations`]: LPT*, the Archer–Tardos binning rule, VCG, exact OPT
//!   and the two-machine min-makespan/min-completion rule.
//! - [`payments`]: envy-free chain payments, truthful (integral) payments,
//!   Clarke pivot payments, mechanisms and `h` extraction.
//! - [`workcurve`]: a machine's workload as a step function of its own bid,
//!   exact integration, and the symbolic expected curve of the binning rule.
//! - [`properties`]: checkers for local efficiency, monotonicity,
//!   envy-freeness, IR, truthfulness, anonymity, scalability, approximation.
//! - [`certificates`]: exact reproductions of the impossibility arguments and
//!   a finite-grid payment polytope feasibility solver.
//!
//! ```
//! use relmech_core::payments::vcg;
//! use relmech_core::properties::{check_truthful, default_grid};
//! use relmech_core::rational::int;
//! use relmech_core::{Instance, Mechanism};
//!
//! # fn main() -> relmech_core::Result<()> {
//! let inst = Instance::new(vec![int(2), int(1)], vec![int(1), int(3)])?;
//! let mech = vcg();
//! let outcome = mech.run(&inst)?;
//! assert_eq!(outcome.workloads(), &[int(3), int(0)]);
//! let verdict = check_truthful(&mech, &inst, &default_grid(inst.bids()))?;
//! assert!(verdict.passed);
//! # Ok(())
//! # }
//! ```

#![no_std]

extern crate alloc;

pub mod allocations;
pub mod certificates;
mod error;
pub mod lp;
pub mod model;
pub mod payments;
pub mod properties;
pub mod rational;
pub mod sampling;
pub mod workcurve;

pub use allocations::{AllocationRule, Rule, TieBreakPolicy};
pub use error::{Error, NotTruthfulEvidence, Result};
pub use model::{makespan, utility, Allocation, Assignment, ExpectedAllocation, Instance, Outcome};
pub use payments::{Mechanism, PaymentScheme, RuleMechanism};
pub use properties::{Property, PropertyVerdict};
pub use rational::{parse_rational, rounded_speed, Rational};
pub use workcurve::WorkCurve;
