//! Gaussian Monte-Carlo estimators for G-norms, permanents, quantum
//! permanents and hafnians.
//!
//! Sample `i` under seed `s` is drawn from a ChaCha8 stream keyed by `(s, i)`,
//! so results do not depend on how samples are scheduled across threads.
//! The reduction to mean and standard error always runs in index order.
//!
//! These estimators are unbiased but their variance can be very large on
//! entangled inputs; no variance reduction is attempted.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpmap::{choi_from_kraus, kraus_from_choi, KrausTuple};
use crate::error::{dim_err, Error, Result};
use crate::numkernel::{det_in_place, ComplexMatrix, Tolerance, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianKind {
    /// Independent real and imaginary parts of variance 1/2 each, E|ξ|² = 1.
    ComplexStandard,
    /// Real N(0, 1) entries stored with zero imaginary part.
    RealStandard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub dim: usize,
    pub kind: GaussianKind,
    pub seed: u64,
}

impl GaussianSpec {
    pub fn new(dim: usize, kind: GaussianKind, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("Gaussian dimension must be at least 1".into()));
        }
        Ok(Self { dim, kind, seed })
    }
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1]: never zero so the logarithm below is finite
    ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

/// Box–Muller pair of independent N(0, 1) variates.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = uniform_open(rng);
    let u2 = uniform_open(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Deterministic Gaussian vector for sample `index` under `spec.seed`.
pub fn sample_gaussian(spec: &GaussianSpec, index: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    match spec.kind {
        GaussianKind::ComplexStandard => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            (0..spec.dim)
                .map(|_| {
                    let (a, b) = normal_pair(&mut rng);
                    C64::new(a * s, b * s)
                })
                .collect()
        }
        GaussianKind::RealStandard => {
            let mut out = Vec::with_capacity(spec.dim);
            while out.len() < spec.dim {
                let (a, b) = normal_pair(&mut rng);
                out.push(C64::new(a, 0.0));
                if out.len() < spec.dim {
                    out.push(C64::new(b, 0.0));
                }
            }
            out
        }
    }
}

/// Empirical summary of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: C64,
    /// Sample standard deviation divided by √samples.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl EstimatorResult {
    pub fn from_values(values: &[C64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::Invalid("at least two samples are required".into()));
        }
        let mean = values.iter().sum::<C64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
        Ok(Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n as u64,
            seed,
        })
    }

    pub fn from_real(values: &[f64], seed: u64) -> Result<Self> {
        let values: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::from_values(&values, seed)
    }

    /// |mean − exact| / std_error (infinite when the error is zero but the
    /// means differ).
    pub fn z_score(&self, exact: C64) -> f64 {
        let diff = (self.mean - exact).norm();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < 2 {
        return Err(Error::Invalid("at least two samples are required".into()));
    }
    Ok(())
}

fn run<T, F>(samples: u64, spec: GaussianSpec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[C64]) -> T + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| f(&sample_gaussian(&spec, i)))
        .collect()
}

fn det_of_combination(mats: &[&[C64]], coeffs: &[C64], n: usize) -> C64 {
    let mut buf = vec![ZERO; n * n];
    for (m, &c) in mats.iter().zip(coeffs) {
        for (b, x) in buf.iter_mut().zip(m.iter()) {
            *b += c * x;
        }
    }
    det_in_place(&mut buf, n)
}

/// Per-sample values |det(Σ ξ_i A_i)|² in index order.
pub fn gnorm_samples(t: &KrausTuple, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let n = t.n();
    let spec = GaussianSpec::new(t.k(), GaussianKind::ComplexStandard, seed)?;
    let mats: Vec<&[C64]> = t.mats().iter().map(ComplexMatrix::as_slice).collect();
    Ok(run(samples, spec, |xi| det_of_combination(&mats, xi, n).norm_sqr()))
}

/// Estimates ‖P_A‖_G² = E|det(Σ ξ_i A_i)|².
pub fn gnorm_mc(t: &KrausTuple, samples: u64, seed: u64) -> Result<EstimatorResult> {
    check_samples(samples)?;
    EstimatorResult::from_real(&gnorm_samples(t, samples, seed)?, seed)
}

/// Per-sample values |z₁|²⋯|z_N|² with z = Dξ, in index order.
pub fn perm_samples(d: &ComplexMatrix, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let spec = GaussianSpec::new(d.cols(), GaussianKind::ComplexStandard, seed)?;
    Ok(run(samples, spec, |xi| {
        d.mat_vec(xi).iter().map(|zi| zi.norm_sqr()).product()
    }))
}

/// Estimates Per(DD†) = E(|z₁|²⋯|z_N|²) with z = Dξ.
pub fn perm_mc(d: &ComplexMatrix, samples: u64, seed: u64) -> Result<EstimatorResult> {
    check_samples(samples)?;
    EstimatorResult::from_real(&perm_samples(d, samples, seed)?, seed)
}

/// Quantum-permanent estimate with its bilinear cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpermEstimate {
    /// E|det C(X)|², the nonnegative estimator reported as the result.
    pub estimate: EstimatorResult,
    /// E(det T(X)·conj det X) over the same draws.
    pub bilinear: EstimatorResult,
    /// Paired standard error of the difference between the two means.
    pub diff_std_error: f64,
}

impl QpermEstimate {
    /// Separation of the two means in paired standard errors.
    pub fn agreement_z(&self) -> f64 {
        let diff = (self.estimate.mean - self.bilinear.mean).norm();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.diff_std_error
        }
    }
}

/// Per-sample pairs (|det C(X)|², det T(X)·conj det X) in index order.
///
/// The tuple is laid over the entries of X in row-major order (zero-padded
/// to N² matrices); tuples longer than N² are first compressed to a minimal
/// Kraus presentation of the same Choi matrix.
pub fn qperm_samples(t: &KrausTuple, samples: u64, seed: u64) -> Result<Vec<(f64, C64)>> {
    let n = t.n();
    let rho = choi_from_kraus(t);
    let compact;
    let tuple = if t.k() > n * n {
        compact = kraus_from_choi(&rho, &Tolerance::default())?;
        &compact
    } else {
        t
    };
    let mats: Vec<&[C64]> = tuple.mats().iter().map(ComplexMatrix::as_slice).collect();
    let blocks: Vec<ComplexMatrix> = (0..n * n).map(|ij| rho.block(ij / n, ij % n)).collect();
    let block_slices: Vec<&[C64]> = blocks.iter().map(ComplexMatrix::as_slice).collect();
    let spec = GaussianSpec::new(n * n, GaussianKind::ComplexStandard, seed)?;
    Ok(run(samples, spec, |x| {
        let abs_form = det_of_combination(&mats, &x[..mats.len()], n).norm_sqr();
        let t_of_x = det_of_combination(&block_slices, x, n);
        let det_x = det_in_place(&mut x.to_vec(), n);
        (abs_form, t_of_x * det_x.conj())
    }))
}

/// Estimates QP(ρ_A) from an N×N complex Gaussian matrix X per sample.
pub fn qperm_mc(t: &KrausTuple, samples: u64, seed: u64) -> Result<QpermEstimate> {
    check_samples(samples)?;
    let pairs = qperm_samples(t, samples, seed)?;
    let abs_vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let bil_vals: Vec<C64> = pairs.iter().map(|p| p.1).collect();
    let diffs: Vec<C64> = pairs.iter().map(|p| p.0 - p.1).collect();
    Ok(QpermEstimate {
        estimate: EstimatorResult::from_real(&abs_vals, seed)?,
        bilinear: EstimatorResult::from_values(&bil_vals, seed)?,
        diff_std_error: EstimatorResult::from_values(&diffs, seed)?.std_error,
    })
}

/// Per-sample products Π (Ax)_i in index order.
pub fn wick_samples(a: &ComplexMatrix, samples: u64, seed: u64) -> Result<Vec<C64>> {
    if !a.rows().is_multiple_of(2) {
        return Err(dim_err(format!(
            "Wick estimator needs an even number of rows, got {}",
            a.rows()
        )));
    }
    let spec = GaussianSpec::new(a.cols(), GaussianKind::RealStandard, seed)?;
    Ok(run(samples, spec, |x| a.mat_vec(x).into_iter().product()))
}

/// Estimates Haf(AAᵀ) = E(Π y_i) with y = Ax and x real standard Gaussian.
pub fn wick_mc(a: &ComplexMatrix, samples: u64, seed: u64) -> Result<EstimatorResult> {
    check_samples(samples)?;
    EstimatorResult::from_values(&wick_samples(a, samples, seed)?, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpmap::make_sk3;

    #[test]
    fn sampling_is_deterministic_per_index() {
        let spec = GaussianSpec::new(5, GaussianKind::ComplexStandard, 42).unwrap();
        assert_eq!(sample_gaussian(&spec, 7), sample_gaussian(&spec, 7));
        assert_ne!(sample_gaussian(&spec, 7), sample_gaussian(&spec, 8));
        let other = GaussianSpec { seed: 43, ..spec };
        assert_ne!(sample_gaussian(&spec, 7), sample_gaussian(&other, 7));
    }

    #[test]
    fn complex_second_moments() {
        let spec = GaussianSpec::new(2, GaussianKind::ComplexStandard, 1).unwrap();
        let draws: Vec<Vec<C64>> = (0..100_000).map(|i| sample_gaussian(&spec, i)).collect();
        let abs2: Vec<C64> = draws.iter().map(|v| C64::new(v[0].norm_sqr(), 0.0)).collect();
        let r = EstimatorResult::from_values(&abs2, 1).unwrap();
        assert!(r.z_score(C64::new(1.0, 0.0)) < 5.0, "{r:?}");
        let re2: Vec<C64> = draws.iter().map(|v| C64::new(v[0].re * v[0].re, 0.0)).collect();
        let r = EstimatorResult::from_values(&re2, 1).unwrap();
        assert!(r.z_score(C64::new(0.5, 0.0)) < 5.0, "{r:?}");
        let cross: Vec<C64> = draws.iter().map(|v| v[0] * v[1].conj()).collect();
        let r = EstimatorResult::from_values(&cross, 1).unwrap();
        assert!(r.z_score(ZERO) < 5.0, "{r:?}");
    }

    #[test]
    fn real_second_moment() {
        let spec = GaussianSpec::new(3, GaussianKind::RealStandard, 9).unwrap();
        let vals: Vec<C64> = (0..50_000)
            .map(|i| {
                let v = sample_gaussian(&spec, i);
                assert!(v.iter().all(|z| z.im == 0.0));
                C64::new(v[2].re * v[2].re, 0.0)
            })
            .collect();
        let r = EstimatorResult::from_values(&vals, 9).unwrap();
        assert!(r.z_score(C64::new(1.0, 0.0)) < 5.0);
    }

    #[test]
    fn identity_gnorm() {
        let t = KrausTuple::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let r = gnorm_mc(&t, 100_000, 3).unwrap();
        assert!(r.z_score(C64::new(2.0, 0.0)) < 5.0, "{r:?}");
    }

    #[test]
    fn identity_factor_permanent() {
        let r = perm_mc(&ComplexMatrix::identity(2), 100_000, 5).unwrap();
        assert!(r.z_score(C64::new(1.0, 0.0)) < 5.0, "{r:?}");
        let ones = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let r = perm_mc(&ones, 100_000, 5).unwrap();
        assert!(r.z_score(C64::new(2.0, 0.0)) < 5.0, "{r:?}");
    }

    #[test]
    fn sk3_estimates_vanish() {
        let q = qperm_mc(&make_sk3(), 2000, 11).unwrap();
        assert!(q.estimate.mean.norm() < 1e-20);
        assert!(q.agreement_z() < 5.0);
        let g = gnorm_mc(&make_sk3(), 2000, 11).unwrap();
        assert!(g.mean.norm() < 1e-20);
    }

    #[test]
    fn zero_wick_matrix_is_exact() {
        let r = wick_mc(&ComplexMatrix::zeros(4, 3), 100, 1).unwrap();
        assert_eq!(r.mean, ZERO);
        assert_eq!(r.std_error, 0.0);
        assert!(wick_mc(&ComplexMatrix::zeros(3, 3), 100, 1).is_err());
    }

    #[test]
    fn too_few_samples() {
        let t = KrausTuple::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(gnorm_mc(&t, 1, 0).is_err());
        assert!(GaussianSpec::new(0, GaussianKind::RealStandard, 0).is_err());
    }

    #[test]
    fn results_are_reproducible() {
        let t = make_sk3().scaled(1.0);
        let d = ComplexMatrix::from_real(2, 2, &[1.0, 0.5, -0.2, 2.0]).unwrap();
        assert_eq!(perm_mc(&d, 1000, 77).unwrap(), perm_mc(&d, 1000, 77).unwrap());
        assert_eq!(qperm_mc(&t, 500, 77).unwrap(), qperm_mc(&t, 500, 77).unwrap());
    }
}
