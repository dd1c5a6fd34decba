use serde::{Deserialize, Serialize};

use super::osi::{ds_at, osi_step, ScalingState};
use crate::cpmap::KrausTuple;
use crate::error::Error;
use crate::estimators::{sample_gaussian, GaussianKind, GaussianSpec};
use crate::numkernel::{is_nonsingular, singular_values, ComplexMatrix, Tolerance};

/// Default entry bit size assumed for floating-point tuples.
pub const FLOAT_ENTRY_BITS: u32 = 53;
/// Random combinations tried when looking for a nonsingular witness.
pub const WITNESS_DRAWS: u64 = 50;

/// ⌈3N(N ln N + N(ln N + b ln 2))⌉, at least 1.
pub fn iteration_budget(n: usize, max_entry_bits: u32) -> u64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let l = 3.0 * nf * (nf * ln_n + nf * (ln_n + max_entry_bits as f64 * std::f64::consts::LN_2));
    (l.ceil() as u64).max(1)
}

/// ⌈log₂ max|entry|⌉ of the Choi matrix of an integer tuple, at least 1;
/// [`FLOAT_ENTRY_BITS`] for anything else.
pub fn entry_bits(t: &KrausTuple) -> u32 {
    if !t.is_gaussian_integer() {
        return FLOAT_ENTRY_BITS;
    }
    let m = t.choi().matrix().max_abs();
    if m <= 1.0 {
        1
    } else {
        (m.log2().ceil() as u32).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NonsingularExists,
    NoNonsingular,
    BudgetExhaustedNoNonsingular,
    InconclusiveNumerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// DS ≤ 1/N.
    #[default]
    InverseN,
    /// DS ≤ 1/(2N+1).
    Strict,
}

impl Threshold {
    pub fn value(self, n: usize) -> f64 {
        match self {
            Threshold::InverseN => 1.0 / n as f64,
            Threshold::Strict => 1.0 / (2 * n + 1) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DecideOptions {
    pub budget_override: Option<u64>,
    /// Entry bit size for the budget; derived from the tuple when absent.
    pub max_entry_bits: Option<u32>,
    pub threshold: Threshold,
    pub witness_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub verdict: Verdict,
    /// OSI steps performed.
    pub iterations: u64,
    pub final_ds: f64,
    pub budget: u64,
    pub threshold: f64,
    pub log_det_product: f64,
    pub witness: Option<ComplexMatrix>,
}

fn condition(m: &ComplexMatrix) -> f64 {
    let sv = singular_values(m);
    sv[sv.len() - 1] / sv[0]
}

fn find_witness(t: &KrausTuple, tol: &Tolerance, seed: u64) -> Option<ComplexMatrix> {
    let spec = GaussianSpec::new(t.k(), GaussianKind::RealStandard, seed).ok()?;
    (0..WITNESS_DRAWS)
        .map(|i| t.combination(&sample_gaussian(&spec, i)))
        .filter_map(Result::ok)
        .find(|m| is_nonsingular(m, tol))
}

/// Edmonds-problem decision by operator Sinkhorn scaling with default options
/// and an optional budget override.
pub fn decide_edmonds(t: &KrausTuple, tol: &Tolerance, budget_override: Option<u64>) -> DecisionReport {
    decide_edmonds_with(
        t,
        tol,
        &DecideOptions {
            budget_override,
            ..DecideOptions::default()
        },
    )
}

/// Runs OSI from (I, I) until DS falls below the threshold, an inversion
/// breaks down, or the budget runs out.
///
/// The verdict is sound for tuples whose span has the property that a
/// nonsingular member exists iff the operator is rank non-decreasing, such as
/// bipartite and rank-one families.
pub fn decide_edmonds_with(t: &KrausTuple, tol: &Tolerance, opts: &DecideOptions) -> DecisionReport {
    let n = t.n();
    let threshold = opts.threshold.value(n);
    let budget = opts
        .budget_override
        .unwrap_or_else(|| iteration_budget(n, opts.max_entry_bits.unwrap_or_else(|| entry_bits(t))));
    let mut state = ScalingState::initial(n);
    let report = |verdict, state: &ScalingState, ds: f64| DecisionReport {
        verdict,
        iterations: state.step as u64,
        final_ds: ds,
        budget,
        threshold,
        log_det_product: state.log_det_product,
        witness: None,
    };
    let mut ds = ds_at(t, &state);
    loop {
        if !ds.is_finite() {
            return report(Verdict::InconclusiveNumerical, &state, ds);
        }
        if ds <= threshold {
            let mut r = report(Verdict::NonsingularExists, &state, ds);
            r.witness = find_witness(t, tol, opts.witness_seed);
            return r;
        }
        if state.step as u64 >= budget {
            return report(Verdict::BudgetExhaustedNoNonsingular, &state, ds);
        }
        match osi_step(t, &state, tol) {
            Ok(next) => state = next,
            Err(Error::NotStrictlyPositive { .. }) => {
                return report(Verdict::NoNonsingular, &state, ds);
            }
            Err(_) => return report(Verdict::InconclusiveNumerical, &state, ds),
        }
        let limit = 1.0 / tol.singular_eps;
        if !(condition(&state.p) <= limit && condition(&state.q) <= limit) {
            return report(Verdict::InconclusiveNumerical, &state, f64::NAN);
        }
        ds = ds_at(t, &state);
    }
}
