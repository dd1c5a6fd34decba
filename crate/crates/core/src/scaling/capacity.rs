use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpmap::KrausTuple;
use crate::error::{dim_err, Error, Result};
use crate::estimators::{sample_gaussian, GaussianKind, GaussianSpec};
use crate::numkernel::{
    determinant, expm_hermitian, inverse_pd, is_psd, ComplexMatrix, Tolerance, C64,
};

/// min det T(X) over X = I and `samples − 1` random positive definite X
/// with det X = 1; an upper bound on the capacity.
pub fn capacity_upper(t: &KrausTuple, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Invalid("at least one sample is required".into()));
    }
    let n = t.n();
    let spec = GaussianSpec::new(n * n, GaussianKind::ComplexStandard, seed)?;
    let value = |x: &ComplexMatrix| determinant(&t.apply_unchecked(x)).map(|d| d.re.max(0.0));
    let at_identity = value(&ComplexMatrix::identity(n))?;
    let sampled = (1..samples)
        .into_par_iter()
        .map(|i| {
            let g = ComplexMatrix::from_row_major(n, n, sample_gaussian(&spec, i))?;
            let h = g.hermitian_part();
            let shift = h.trace().re / n as f64;
            let h = &h - &ComplexMatrix::identity(n).scale_real(shift);
            value(&expm_hermitian(&h)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(sampled.into_iter().fold(at_identity, f64::min))
}

/// (T(u₁u₁†), …, T(u_N u_N†)) for the columns u_i of a unitary U.
pub fn decoherence_tuple(t: &KrausTuple, u: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<ComplexMatrix>> {
    let n = t.n();
    u.require_shape(n, n, "basis matrix")?;
    let defect = (&(&u.adjoint() * u) - &ComplexMatrix::identity(n)).frobenius_norm();
    if defect.is_nan() || defect > tol.agree_rtol * n as f64 {
        return Err(Error::NotUnitary);
    }
    Ok((0..n)
        .map(|i| {
            let col = u.column(i);
            t.apply_unchecked(&ComplexMatrix::outer(&col, &col))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleCapacity {
    /// Smallest det(Σ γ_i B_i) reached with Π γ_i = 1.
    pub value: f64,
    pub gamma: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// inf { det(Σ γ_i B_i) : γ_i > 0, Π γ_i = 1 } for PSD B₁,…,B_N.
///
/// Iterates γ_i ← 1 / tr(B_i S⁻¹) with S = Σ γ_j B_j, renormalized to
/// Π γ_i = 1. Fixed points satisfy γ_i tr(B_i S⁻¹) = 1 for all i, the
/// stationarity condition of log det S on the constraint surface.
pub fn capacity_tuple(bs: &[ComplexMatrix], max_iters: usize, tol: &Tolerance) -> Result<TupleCapacity> {
    let n = bs.len();
    if n == 0 {
        return Err(dim_err("capacity needs at least one matrix"));
    }
    for (idx, b) in bs.iter().enumerate() {
        b.require_shape(n, n, "capacity argument")?;
        if !is_psd(b, tol) {
            return Err(Error::Invalid(format!("argument {idx} is not PSD")));
        }
    }
    let combine = |g: &[f64]| {
        let mut s = ComplexMatrix::zeros(n, n);
        for (b, &w) in bs.iter().zip(g) {
            s = &s + &b.scale_real(w);
        }
        s.hermitian_part()
    };
    let mut gamma = vec![1.0; n];
    let mut s = combine(&gamma);
    let mut s_inv = inverse_pd(&s, tol)?;
    let mut best = determinant(&s)?.re;
    let mut best_gamma = gamma.clone();
    for iter in 1..=max_iters {
        let w: Vec<f64> = bs.iter().map(|b| (b * &s_inv).trace().re).collect();
        if w.iter().any(|&x| x <= 0.0) {
            // some B_i vanishes, so γ_i can grow without bound and det → 0
            return Ok(TupleCapacity {
                value: 0.0,
                gamma: best_gamma,
                iterations: iter,
                converged: true,
            });
        }
        let log_mean = w.iter().map(|x| -x.ln()).sum::<f64>() / n as f64;
        gamma = w.iter().map(|x| (-x.ln() - log_mean).exp()).collect();
        s = combine(&gamma);
        s_inv = match inverse_pd(&s, tol) {
            Ok(m) => m,
            Err(_) => break,
        };
        let v = determinant(&s)?.re;
        let prev = best;
        if v < best {
            best = v;
            best_gamma = gamma.clone();
        }
        if (prev - v).abs() <= tol.agree_rtol * prev.abs() {
            return Ok(TupleCapacity {
                value: best,
                gamma: best_gamma,
                iterations: iter,
                converged: true,
            });
        }
    }
    Ok(TupleCapacity {
        value: best,
        gamma: best_gamma,
        iterations: max_iters,
        converged: false,
    })
}

fn hermitian_basis(n: usize, traceless: bool) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in j + 1..n {
            let mut re = ComplexMatrix::zeros(n, n);
            re[(j, k)] = C64::new(s, 0.0);
            re[(k, j)] = C64::new(s, 0.0);
            basis.push(re);
            let mut im = ComplexMatrix::zeros(n, n);
            im[(j, k)] = C64::new(0.0, -s);
            im[(k, j)] = C64::new(0.0, s);
            basis.push(im);
        }
    }
    if traceless {
        // orthonormal traceless diagonals (1,…,1,−l,0,…)/√(l(l+1))
        for l in 1..n {
            let norm = ((l * (l + 1)) as f64).sqrt();
            let mut d = vec![C64::new(0.0, 0.0); n];
            for z in d.iter_mut().take(l) {
                *z = C64::new(1.0 / norm, 0.0);
            }
            d[l] = C64::new(-(l as f64) / norm, 0.0);
            basis.push(ComplexMatrix::diag(&d));
        }
    } else {
        basis.extend((0..n).map(|i| ComplexMatrix::unit(n, i, i)));
    }
    basis
}

/// Smallest a with tr(T(X)²) ≤ a·tr(X²) for all traceless Hermitian X:
/// the squared operator norm of T restricted to that subspace.
pub fn indecomposability_coefficient(t: &KrausTuple) -> f64 {
    let n = t.n();
    let basis = hermitian_basis(n, true);
    if basis.is_empty() {
        return 0.0;
    }
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|x| {
            t.apply_unchecked(x)
                .as_slice()
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect()
        })
        .collect();
    let m = DMatrix::from_fn(2 * n * n, cols.len(), |r, c| cols[c][r]);
    let smax = m.singular_values().iter().copied().fold(0.0, f64::max);
    smax * smax
}
