//! Classical and operator Sinkhorn scaling, the scaling-based decision
//! procedure for the Edmonds problem, and capacity estimates.
//!
//! The operator iteration carries the pair (P, Q) with
//! T_n(X) = P^{1/2} T(Q^{1/2} X Q^{1/2}) P^{1/2}; scaled Kraus matrices are
//! only formed when a caller asks for them.

mod capacity;
mod decide;
mod osi;
mod sinkhorn;

pub use capacity::{
    capacity_tuple, capacity_upper, decoherence_tuple, indecomposability_coefficient, TupleCapacity,
};
pub use decide::{
    decide_edmonds, decide_edmonds_with, entry_bits, iteration_budget, DecideOptions, DecisionReport,
    Threshold, Verdict, FLOAT_ENTRY_BITS, WITNESS_DRAWS,
};
pub use osi::{ds_at, osi_run, osi_step, ScalingState, ScalingTrace, POTENTIAL_MAX_N};
pub use sinkhorn::{classical_ds, classical_sinkhorn_run, classical_sinkhorn_step, Side, SinkhornTrace};
