//! Belief identification by proxy.
//!
//! An agent's belief over a state space `S` cannot be read off choices when
//! utility may depend on the state. Appending a proxy space `T` on which the
//! agent has no stakes makes the conditionals `π_T(·|s)` elicitable; with a
//! known marginal on `T` and linearly independent conditionals, the joint
//! belief on `S × T` is pinned down, and conditioning on an uninformative
//! event returns the actual belief.
//!
//! - [`model`]: distributions, joint beliefs, lotteries, acts, SEU representations.
//! - [`identify`]: rank test, simplex-constrained solve, belief and utility recovery.
//! - [`elicit`]: simulated strategy-method elicitation with a binarized scoring rule.
//! - [`axioms`]: representation-level checks of the proxy axiomatization.

pub mod axioms;
pub mod elicit;
pub mod identify;
pub mod model;
pub mod sample;
pub mod simplex;

pub use identify::{identify, IdentificationResult, IdentifyError, ProxyProblem};
pub use model::{Act, ConditionalFamily, Dist, Event, JointBelief, Lottery, SEURep, UtilityTensor};
