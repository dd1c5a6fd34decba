use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Row,
    Column,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::Row => Side::Column,
            Side::Column => Side::Row,
        }
    }
}

fn nonnegative_entries(a: &ComplexMatrix) -> Result<()> {
    for z in a.as_slice() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if z.im != 0.0 || z.re < 0.0 {
            return Err(Error::Invalid(
                "classical scaling needs nonnegative real entries".into(),
            ));
        }
    }
    Ok(())
}

fn row_sums(a: &ComplexMatrix) -> Vec<f64> {
    (0..a.rows()).map(|i| a.row(i).iter().map(|z| z.re).sum()).collect()
}

fn col_sums(a: &ComplexMatrix) -> Vec<f64> {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].re).sum())
        .collect()
}

/// Row normalization R(A) or column normalization C(A).
pub fn classical_sinkhorn_step(a: &ComplexMatrix, side: Side) -> Result<ComplexMatrix> {
    nonnegative_entries(a)?;
    let sums = match side {
        Side::Row => row_sums(a),
        Side::Column => col_sums(a),
    };
    if let Some(idx) = sums.iter().position(|&s| s == 0.0) {
        let what = if side == Side::Row { "row" } else { "column" };
        return Err(Error::Invalid(format!("{what} {idx} sums to zero")));
    }
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let s = if side == Side::Row { sums[i] } else { sums[j] };
        C64::new(a[(i, j)].re / s, 0.0)
    }))
}

/// Σ(row sum − 1)² + Σ(column sum − 1)².
pub fn classical_ds(a: &ComplexMatrix) -> f64 {
    let f = |s: f64| (s - 1.0) * (s - 1.0);
    row_sums(a).into_iter().map(f).sum::<f64>() + col_sums(a).into_iter().map(f).sum::<f64>()
}

/// Alternating classical scaling with cumulative factors, so that after
/// step n the current matrix is diag(row_factors[n])·A·diag(col_factors[n]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinkhornTrace {
    pub row_factors: Vec<Vec<f64>>,
    pub col_factors: Vec<Vec<f64>>,
    pub ds_values: Vec<f64>,
    pub matrix: ComplexMatrix,
}

/// Runs `steps` alternating steps starting with a row step. Entry 0 of each
/// list describes the input.
pub fn classical_sinkhorn_run(a: &ComplexMatrix, steps: usize) -> Result<SinkhornTrace> {
    nonnegative_entries(a)?;
    let mut r = vec![1.0; a.rows()];
    let mut c = vec![1.0; a.cols()];
    let mut cur = a.clone();
    let mut trace = SinkhornTrace {
        row_factors: vec![r.clone()],
        col_factors: vec![c.clone()],
        ds_values: vec![classical_ds(a)],
        matrix: a.clone(),
    };
    let mut side = Side::Row;
    for _ in 0..steps {
        match side {
            Side::Row => {
                for (f, s) in r.iter_mut().zip(row_sums(&cur)) {
                    *f /= s;
                }
            }
            Side::Column => {
                for (f, s) in c.iter_mut().zip(col_sums(&cur)) {
                    *f /= s;
                }
            }
        }
        cur = classical_sinkhorn_step(&cur, side)?;
        trace.row_factors.push(r.clone());
        trace.col_factors.push(c.clone());
        trace.ds_values.push(classical_ds(&cur));
        side = side.other();
    }
    trace.matrix = cur;
    Ok(trace)
}
