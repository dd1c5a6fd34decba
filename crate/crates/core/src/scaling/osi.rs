use serde::{Deserialize, Serialize};

use super::sinkhorn::Side;
use crate::cpmap::{choi_from_kraus, KrausTuple};
use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eigen, inverse_pd, sqrt_psd, ComplexMatrix, Tolerance};
use crate::qperm::quantum_permanent;

/// Largest N for which [`osi_run`] records the quantum permanent.
pub const POTENTIAL_MAX_N: usize = 4;

/// Scaling pair (P, Q) describing T_n(X) = P^{1/2} T(Q^{1/2} X Q^{1/2}) P^{1/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingState {
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    pub step: usize,
    pub last_side: Option<Side>,
    /// log det P + log det Q, i.e. log QP(T_n) − log QP(T).
    pub log_det_product: f64,
}

impl ScalingState {
    pub fn initial(n: usize) -> Self {
        Self {
            p: ComplexMatrix::identity(n),
            q: ComplexMatrix::identity(n),
            step: 0,
            last_side: None,
            log_det_product: 0.0,
        }
    }

    pub fn next_side(&self) -> Side {
        match self.last_side {
            Some(Side::Row) => Side::Column,
            _ => Side::Row,
        }
    }

    /// Explicit Kraus tuple (P^{1/2} A_i Q^{1/2}) of the scaled operator.
    pub fn scaled_tuple(&self, t: &KrausTuple, tol: &Tolerance) -> Result<KrausTuple> {
        t.sandwich(&sqrt_psd(&self.p, tol)?, &sqrt_psd(&self.q, tol)?)
    }
}

fn log_det_pd(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.values.iter().map(|l| l.ln()).sum())
}

/// One alternating step: P ← T(Q)⁻¹ on a row step, Q ← T*(P)⁻¹ on a column step.
pub fn osi_step(t: &KrausTuple, s: &ScalingState, tol: &Tolerance) -> Result<ScalingState> {
    let n = t.n();
    s.p.require_shape(n, n, "scaling matrix P")?;
    s.q.require_shape(n, n, "scaling matrix Q")?;
    let side = s.next_side();
    let target = match side {
        Side::Row => t.apply_unchecked(&s.q),
        Side::Column => t.apply_dual_unchecked(&s.p),
    }
    .hermitian_part();
    if !target.is_finite() {
        return Err(Error::NonFinite);
    }
    let inv = inverse_pd(&target, tol)?;
    let gained = -log_det_pd(&target)?;
    let old = match side {
        Side::Row => &s.p,
        Side::Column => &s.q,
    };
    let log_det_product = s.log_det_product + gained - log_det_pd(old)?;
    let (p, q) = match side {
        Side::Row => (inv, s.q.clone()),
        Side::Column => (s.p.clone(), inv),
    };
    Ok(ScalingState {
        p,
        q,
        step: s.step + 1,
        last_side: Some(side),
        log_det_product,
    })
}

/// DS(T_n) = tr((P T(Q) − I)²) + tr((Q T*(P) − I)²).
///
/// Each trace equals a squared Frobenius norm of a similar Hermitian matrix;
/// rounding near a fixed point can push the raw value below zero, so it is
/// clamped.
pub fn ds_at(t: &KrausTuple, s: &ScalingState) -> f64 {
    let id = ComplexMatrix::identity(t.n());
    let a = &(&s.p * &t.apply_unchecked(&s.q)) - &id;
    let b = &(&s.q * &t.apply_dual_unchecked(&s.p)) - &id;
    ((&a * &a).trace().re + (&b * &b).trace().re).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTrace {
    /// States from the initial (I, I) onward.
    pub states: Vec<ScalingState>,
    pub ds_values: Vec<f64>,
    /// QP(CH(T_n)) per state, when requested and N ≤ [`POTENTIAL_MAX_N`].
    pub potential_values: Option<Vec<f64>>,
    /// The step error that cut the run short, if any.
    #[serde(skip)]
    pub error: Option<Error>,
}

fn potential(t: &KrausTuple, s: &ScalingState, tol: &Tolerance) -> Result<f64> {
    let scaled = s.scaled_tuple(t, tol)?;
    Ok(quantum_permanent(choi_from_kraus(&scaled).matrix())?.re)
}

/// Runs `steps` OSI steps from (I, I) and records DS (and optionally the
/// quantum permanent) at every state.
pub fn osi_run(t: &KrausTuple, steps: usize, track_potential: bool, tol: &Tolerance) -> ScalingTrace {
    let track = track_potential && t.n() <= POTENTIAL_MAX_N;
    let mut state = ScalingState::initial(t.n());
    let mut trace = ScalingTrace {
        states: Vec::with_capacity(steps + 1),
        ds_values: Vec::with_capacity(steps + 1),
        potential_values: track.then(Vec::new),
        error: None,
    };
    loop {
        if let Some(pv) = trace.potential_values.as_mut() {
            match potential(t, &state, tol) {
                Ok(v) => pv.push(v),
                Err(e) => {
                    trace.error = Some(e);
                    break;
                }
            }
        }
        trace.ds_values.push(ds_at(t, &state));
        trace.states.push(state.clone());
        if state.step == steps {
            break;
        }
        match osi_step(t, &state, tol) {
            Ok(next) => state = next,
            Err(e) => {
                trace.error = Some(e);
                break;
            }
        }
    }
    trace
}
