//! Dense complex matrix primitives: determinants, inverses, Hermitian
//! spectral functions and PSD tests.
//!
//! LU-based routines are written out by hand since they sit in the inner
//! loops of the combinatorial functionals; Hermitian eigendecompositions and
//! SVDs are delegated to `nalgebra`.

mod matrix;
mod sum;

pub use matrix::{ComplexMatrix, C64};
pub use sum::CompensatedSum;

pub(crate) use matrix::{ONE, ZERO};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative smallest-singular-value threshold for singularity.
    pub singular_eps: f64,
    /// Relative eigenvalue / Hermitian-defect threshold for PSD tests.
    pub psd_eps: f64,
    /// Relative agreement threshold between independent routes.
    pub agree_rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            singular_eps: 1e-12,
            psd_eps: 1e-9,
            agree_rtol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(singular_eps: f64, psd_eps: f64, agree_rtol: f64) -> Result<Self> {
        let tol = Self {
            singular_eps,
            psd_eps,
            agree_rtol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("singular_eps", self.singular_eps),
            ("psd_eps", self.psd_eps),
            ("agree_rtol", self.agree_rtol),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Invalid(format!("{name} must lie in [0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    let n = m.require_square("determinant input")?;
    Ok(det_in_place(&mut m.as_slice().to_vec(), n))
}

/// Determinant of an `n x n` row-major buffer, destroying the buffer.
pub(crate) fn det_in_place(a: &mut [C64], n: usize) -> C64 {
    let mut det = ONE;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in k + 1..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if piv != k {
            for j in k..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        let inv = ONE / pivot;
        for i in k + 1..n {
            let f = a[i * n + k] * inv;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
            }
        }
    }
    det
}

/// Inverse of a square matrix; fails when σ_min < singular_eps·σ_max.
pub fn inverse(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let n = m.require_square("inverse input")?;
    let sv = singular_values(m);
    let smax = sv.last().copied().unwrap_or(0.0);
    let smin = sv.first().copied().unwrap_or(0.0);
    let threshold = tol.singular_eps * smax;
    if smax == 0.0 || smin <= threshold {
        return Err(Error::Singular {
            sigma_min: smin,
            threshold,
        });
    }
    gauss_jordan(m, n).ok_or(Error::Singular {
        sigma_min: smin,
        threshold,
    })
}

fn gauss_jordan(m: &ComplexMatrix, n: usize) -> Option<ComplexMatrix> {
    let mut a = m.as_slice().to_vec();
    let mut inv = ComplexMatrix::identity(n).into_vec();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| {
            a[i * n + k]
                .norm_sqr()
                .total_cmp(&a[j * n + k].norm_sqr())
        })?;
        if a[piv * n + k] == ZERO {
            return None;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
                inv.swap(k * n + j, piv * n + j);
            }
        }
        let p = ONE / a[k * n + k];
        for j in 0..n {
            a[k * n + j] *= p;
            inv[k * n + j] *= p;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i * n + k];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let (ak, ik) = (a[k * n + j], inv[k * n + j]);
                a[i * n + j] -= f * ak;
                inv[i * n + j] -= f * ik;
            }
        }
    }
    ComplexMatrix::from_row_major(n, n, inv).ok()
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector is rotated so that its first
/// non-negligible component is real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Reassembles V f(Λ) V†.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }
}

/// Eigendecomposition of the Hermitian part of `h`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = h.require_square("hermitian_eigen input")?;
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let offdiag_zero = (0..n).all(|i| (0..n).all(|j| i == j || h[(i, j)] == ZERO));
    if offdiag_zero {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| h[(a, a)].re.total_cmp(&h[(b, b)].re));
        let values = order.iter().map(|&i| h[(i, i)].re).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |i, col| if i == order[col] { ONE } else { ZERO });
        return Ok(HermitianEigen { values, vectors });
    }
    let herm: DMatrix<C64> = h.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let v: Vec<C64> = (0..n).map(|i| eig.eigenvectors[(i, src)]).collect();
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let phase = v
            .iter()
            .find(|z| z.norm() > 1e-10 * scale)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(ONE);
        for (i, z) in v.into_iter().enumerate() {
            vectors[(i, col)] = z * phase;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn require_hermitian(h: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    let scale = h.max_abs().max(1.0);
    if h.hermitian_defect() > tol.psd_eps * scale {
        return Err(Error::Invalid("matrix is not Hermitian within psd_eps".into()));
    }
    Ok(())
}

fn strictly_positive_eigen(h: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    h.require_square("positive definite input")?;
    require_hermitian(h, tol)?;
    let eig = hermitian_eigen(h)?;
    let lambda_min = eig.values[0];
    let threshold = tol.psd_eps * eig.spectral_radius();
    if lambda_min.is_nan() || lambda_min <= threshold {
        return Err(Error::NotStrictlyPositive {
            lambda_min,
            threshold,
        });
    }
    Ok(eig)
}

/// H^{-1/2} for Hermitian H ≻ 0.
pub fn inv_sqrt_psd(h: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    Ok(strictly_positive_eigen(h, tol)?.reconstruct(|l| 1.0 / l.sqrt()))
}

/// H^{-1} for Hermitian H ≻ 0, returned exactly Hermitian.
pub fn inverse_pd(h: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    Ok(strictly_positive_eigen(h, tol)?.reconstruct(|l| 1.0 / l))
}

/// Principal square root of a Hermitian PSD matrix (negative rounding noise clamped).
pub fn sqrt_psd(h: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !is_psd(h, tol) {
        return Err(Error::NotPsd);
    }
    Ok(hermitian_eigen(h)?.reconstruct(|l| l.max(0.0).sqrt()))
}

/// exp(H) for Hermitian H.
pub fn expm_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigen(h)?.reconstruct(f64::exp))
}

/// True iff `h` is Hermitian within psd_eps and λ_min ≥ −psd_eps·‖h‖.
pub fn is_psd(h: &ComplexMatrix, tol: &Tolerance) -> bool {
    if !h.is_square() || !h.is_finite() {
        return false;
    }
    if require_hermitian(h, tol).is_err() {
        return false;
    }
    match hermitian_eigen(h) {
        Ok(eig) => eig.values[0] >= -tol.psd_eps * eig.spectral_radius(),
        Err(_) => false,
    }
}

/// Singular values in ascending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    sv
}

/// Number of singular values above `rel_eps · σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, rel_eps: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.last().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_eps * smax).count()
}

/// True when σ_min(m) > singular_eps·σ_max(m).
pub fn is_nonsingular(m: &ComplexMatrix, tol: &Tolerance) -> bool {
    m.is_square() && numerical_rank(m, tol.singular_eps) == m.rows()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: C64, b: C64, eps: f64) -> bool {
        (a - b).norm() <= eps
    }

    #[test]
    fn determinant_examples() {
        let tol = 1e-12;
        assert!(close(determinant(&ComplexMatrix::identity(3)).unwrap(), c(1.0), tol));
        assert!(close(determinant(&ComplexMatrix::zeros(2, 2)).unwrap(), c(0.0), tol));
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(close(determinant(&m).unwrap(), c(-2.0), tol));
        assert!(matches!(
            determinant(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn inverse_examples() {
        let tol = Tolerance::default();
        let id = ComplexMatrix::identity(4);
        assert_eq!(inverse(&id, &tol).unwrap(), id);
        let d = ComplexMatrix::diag_real(&[2.0, 4.0]);
        let inv = inverse(&d, &tol).unwrap();
        assert!(close(inv[(0, 0)], c(0.5), 1e-15));
        assert!(close(inv[(1, 1)], c(0.25), 1e-15));
        let s = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(inverse(&s, &tol), Err(Error::Singular { .. })));
    }

    #[test]
    fn inverse_residual_is_small() {
        let tol = Tolerance::default();
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(0.5, -1.0), c(3.0)],
            vec![c(0.0), C64::new(2.0, 0.3), C64::new(-1.0, 1.0)],
            vec![C64::new(0.1, 0.1), c(4.0), C64::new(0.0, -2.0)],
        ])
        .unwrap();
        let inv = inverse(&m, &tol).unwrap();
        let r = &(&m * &inv) - &ComplexMatrix::identity(3);
        assert!(r.frobenius_norm() <= tol.agree_rtol * 3.0);
    }

    #[test]
    fn inv_sqrt_examples() {
        let tol = Tolerance::default();
        let id = ComplexMatrix::identity(3);
        let r = inv_sqrt_psd(&id, &tol).unwrap();
        assert!((&r - &id).frobenius_norm() < 1e-14);
        let r = inv_sqrt_psd(&ComplexMatrix::diag_real(&[4.0, 9.0]), &tol).unwrap();
        assert!(close(r[(0, 0)], c(0.5), 1e-14));
        assert!(close(r[(1, 1)], c(1.0 / 3.0), 1e-14));
        assert!(close(r[(0, 1)], c(0.0), 1e-14));
        let proj = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(matches!(
            inv_sqrt_psd(&proj, &tol),
            Err(Error::NotStrictlyPositive { .. })
        ));
    }

    #[test]
    fn psd_examples() {
        let tol = Tolerance::default();
        assert!(is_psd(&ComplexMatrix::identity(3), &tol));
        assert!(!is_psd(&ComplexMatrix::diag_real(&[1.0, -1.0]), &tol));
        let v = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 3.0)];
        assert!(is_psd(&ComplexMatrix::outer(&v, &v), &tol));
        let nonherm = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(!is_psd(&nonherm, &tol));
    }

    #[test]
    fn eigen_is_sorted_and_phase_normalized() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(2.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0), c(2.0)],
        ])
        .unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);
        for k in 0..2 {
            let first = eig.vectors[(0, k)];
            assert!(first.im.abs() < 1e-14 && first.re > 0.0);
        }
        let back = eig.reconstruct(|l| l);
        assert!((&back - &h).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rank_counts_independent_columns() {
        let m = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(numerical_rank(&m, 1e-12), 2);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(2, 2), 1e-12), 0);
    }

    #[test]
    fn tolerance_range_is_checked() {
        assert!(Tolerance::new(1e-12, 1e-9, 1e-8).is_ok());
        assert!(Tolerance::new(1.0, 1e-9, 1e-8).is_err());
        assert!(Tolerance::new(1e-12, -1e-9, 1e-8).is_err());
    }
}
