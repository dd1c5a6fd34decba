//! Exact combinatorial functionals: mixed discriminants, quantum permanents,
//! G-norms of determinantal polynomials, permanents and hafnians.
//!
//! The quantum permanent has four independent routes which must agree:
//!
//! * [`quantum_permanent`]: signed sum over σ of mixed discriminants of the
//!   block rows (A_{1,σ(1)}, …, A_{N,σ(N)}).
//! * [`quantum_permanent_naive`]: the four-permutation sum over tensor entries.
//! * [`qperm_via_tuples`]: (1/N!) Σ_t |M(A_{t₁},…,A_{t_N})|² over Kraus index tuples.
//! * [`gnorm_expand`]: the G-norm of det(Σ x_i A_i) from its monomial coefficients.
//!
//! QP functions accept any N²×N² block matrix, PSD or not, since index
//! permutations and local transformations leave the PSD cone.

mod mixed;
mod permanent;
mod perms;

pub use mixed::{mixed_discriminant, mixed_discriminant_naive, MIXED_MAX_N, MIXED_NAIVE_MAX_N};
pub use permanent::{
    hafnian, permanent, permanent_naive, permanent_ryser, wick_matrix, HAFNIAN_MAX_DIM,
    PERMANENT_NAIVE_MAX_N, PERMANENT_RYSER_MAX_N,
};

use serde::{Deserialize, Serialize};

use crate::cpmap::{block_dim, block_of, KrausTuple};
use crate::error::{Error, Result};
use crate::numkernel::{CompensatedSum, ComplexMatrix, C64};
use mixed::mixed_discriminant_slices;
use perms::{binomial, factorial, signed_permutations};

pub const QP_MAX_N: usize = 6;
pub const QP_NAIVE_MAX_N: usize = 4;
pub const TUPLE_ENUM_LIMIT: u128 = 1_000_000;
pub const EXPANSION_LIMIT: u128 = 100_000;

fn too_large(what: &'static str, size: u128, limit: u128) -> Error {
    Error::TooLarge { what, size, limit }
}

/// QP(ρ) = Σ_σ sgn(σ) M(A_{1,σ(1)},…,A_{N,σ(N)}).
pub fn quantum_permanent(rho: &ComplexMatrix) -> Result<C64> {
    let n = block_dim(rho)?;
    if n > QP_MAX_N {
        return Err(too_large("quantum permanent dimension", n as u128, QP_MAX_N as u128));
    }
    let blocks: Vec<Vec<ComplexMatrix>> = (0..n)
        .map(|i| (0..n).map(|j| block_of(rho, n, i, j)).collect())
        .collect();
    let mut acc = CompensatedSum::new();
    for (sigma, sign) in signed_permutations(n) {
        let args: Vec<&[C64]> = (0..n).map(|i| blocks[i][sigma[i]].as_slice()).collect();
        acc.add(mixed_discriminant_slices(&args, n) * sign);
    }
    Ok(acc.value())
}

/// QP(ρ) = (1/N!) Σ_{τ₁..τ₄} sgn(τ₁τ₂τ₃τ₄) Π_i ρ(τ₁(i), τ₂(i), τ₃(i), τ₄(i)),
/// where ρ(i₁,i₂,j₁,j₂) is entry (i₂, j₂) of block (i₁, j₁).
pub fn quantum_permanent_naive(rho: &ComplexMatrix) -> Result<C64> {
    let n = block_dim(rho)?;
    if n > QP_NAIVE_MAX_N {
        return Err(too_large(
            "naive quantum permanent dimension",
            n as u128,
            QP_NAIVE_MAX_N as u128,
        ));
    }
    let perms = signed_permutations(n);
    let mut acc = CompensatedSum::new();
    for (t1, s1) in &perms {
        for (t2, s2) in &perms {
            let rows: Vec<usize> = (0..n).map(|i| t1[i] * n + t2[i]).collect();
            for (t3, s3) in &perms {
                for (t4, s4) in &perms {
                    let mut prod = C64::new(s1 * s2 * s3 * s4, 0.0);
                    for i in 0..n {
                        prod *= rho[(rows[i], t3[i] * n + t4[i])];
                    }
                    acc.add(prod);
                }
            }
        }
    }
    Ok(acc.value() / factorial(n))
}

/// QP(ρ_A) = (1/N!) Σ_{t ∈ [k]^N} |M(A_{t₁},…,A_{t_N})|².
pub fn qperm_via_tuples(t: &KrausTuple) -> Result<f64> {
    let (n, k) = (t.n(), t.k());
    let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > TUPLE_ENUM_LIMIT {
        return Err(too_large("Kraus index tuple enumeration", count, TUPLE_ENUM_LIMIT));
    }
    let mats: Vec<&[C64]> = t.mats().iter().map(ComplexMatrix::as_slice).collect();
    let mut idx = vec![0usize; n];
    let mut acc = CompensatedSum::new();
    loop {
        let args: Vec<&[C64]> = idx.iter().map(|&l| mats[l]).collect();
        acc.add(C64::new(mixed_discriminant_slices(&args, n).norm_sqr(), 0.0));
        // odometer increment
        let mut pos = 0;
        while pos < n {
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    Ok(acc.value().re / factorial(n))
}

/// Exponent vector r with Σ r_i = N.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<usize>);

impl ExponentVector {
    pub fn new(r: Vec<usize>, degree: usize) -> Result<Self> {
        let sum: usize = r.iter().sum();
        if sum != degree {
            return Err(Error::Invalid(format!(
                "exponent vector sums to {sum}, expected {degree}"
            )));
        }
        Ok(Self(r))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// Π r_i!.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&r| factorial(r)).product()
    }
}

/// All exponent vectors of length k summing to n, colexicographically ordered
/// (last component most significant).
pub fn exponent_vectors(k: usize, n: usize) -> Vec<ExponentVector> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fill_compositions(&mut cur, k, n, &mut out);
    out
}

fn fill_compositions(cur: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<ExponentVector>) {
    // choose components from the last (most significant) down
    if pos == 1 {
        cur[0] = remaining;
        out.push(ExponentVector(cur.clone()));
        return;
    }
    for v in 0..=remaining {
        cur[pos - 1] = v;
        fill_compositions(cur, pos - 1, remaining - v, out);
    }
    cur[pos - 1] = 0;
}

/// Coefficients of the homogeneous polynomial det(Σ x_i A_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialExpansion {
    pub n: usize,
    pub k: usize,
    /// (r, a_r) in colexicographic order of r.
    pub terms: Vec<(ExponentVector, C64)>,
}

impl MonomialExpansion {
    pub fn coefficient(&self, r: &[usize]) -> Option<C64> {
        self.terms
            .iter()
            .find(|(e, _)| e.as_slice() == r)
            .map(|(_, a)| *a)
    }

    /// Σ_r a_r Π x_i^{r_i}.
    pub fn evaluate(&self, x: &[C64]) -> C64 {
        let acc: CompensatedSum = self
            .terms
            .iter()
            .map(|(r, a)| {
                r.as_slice()
                    .iter()
                    .zip(x)
                    .fold(*a, |p, (&e, &xi)| p * xi.powu(e as u32))
            })
            .sum();
        acc.value()
    }

    /// ‖P‖_G² = Σ |a_r|² Π r_i!.
    pub fn g_norm_sq(&self) -> f64 {
        let acc: CompensatedSum = self
            .terms
            .iter()
            .map(|(r, a)| C64::new(a.norm_sqr() * r.factorial_product(), 0.0))
            .sum();
        acc.value().re
    }
}

/// Full monomial expansion of det(Σ x_i A_i) via a_r = M(B_r)/Π r_i!, where
/// B_r repeats A_i exactly r_i times, together with its squared G-norm.
pub fn gnorm_expand(t: &KrausTuple) -> Result<(MonomialExpansion, f64)> {
    let (n, k) = (t.n(), t.k());
    let count = binomial(n + k - 1, k - 1);
    if count > EXPANSION_LIMIT {
        return Err(too_large("monomial expansion", count, EXPANSION_LIMIT));
    }
    let mats: Vec<&[C64]> = t.mats().iter().map(ComplexMatrix::as_slice).collect();
    let terms = exponent_vectors(k, n)
        .into_iter()
        .map(|r| {
            let args: Vec<&[C64]> = r
                .as_slice()
                .iter()
                .enumerate()
                .flat_map(|(i, &ri)| std::iter::repeat_n(mats[i], ri))
                .collect();
            let md = mixed_discriminant_slices(&args, n);
            let a = md / r.factorial_product();
            (r, a)
        })
        .collect();
    let expansion = MonomialExpansion { n, k, terms };
    let norm = expansion.g_norm_sq();
    Ok((expansion, norm))
}

/// Number of monomials |I_{k,N}|.
pub fn expansion_size(k: usize, n: usize) -> u128 {
    binomial(n + k - 1, k - 1)
}
