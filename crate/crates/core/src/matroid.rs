//! Rank of the intersection of two linear matroids given by vector pairs
//! (x_i, y_i), computed from the definition and from the Edmonds–Rado
//! min-formula. The span of {x_i y_i†} holds a nonsingular matrix exactly
//! when this rank equals N.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpmap::{make_rank_one, KrausTuple};
use crate::error::{dim_err, Error, Result};
use crate::numkernel::{numerical_rank, ComplexMatrix, Tolerance, C64, ZERO};

/// Largest family size accepted by the subset enumerations.
pub const MAX_PAIRS: usize = 20;

/// Family of K pairs of nonzero complex N-vectors. Duplicate pairs are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct VectorPairFamily {
    n: usize,
    pairs: Vec<(Vec<C64>, Vec<C64>)>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    x: Vec<[f64; 2]>,
    y: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    n: usize,
    pairs: Vec<RawPair>,
}

impl TryFrom<RawFamily> for VectorPairFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        let conv = |v: Vec<[f64; 2]>| v.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        Self::new(raw.n, raw.pairs.into_iter().map(|p| (conv(p.x), conv(p.y))).collect())
    }
}

impl From<VectorPairFamily> for RawFamily {
    fn from(f: VectorPairFamily) -> Self {
        let conv = |v: Vec<C64>| v.into_iter().map(|z| [z.re, z.im]).collect();
        RawFamily {
            n: f.n,
            pairs: f
                .pairs
                .into_iter()
                .map(|(x, y)| RawPair { x: conv(x), y: conv(y) })
                .collect(),
        }
    }
}

impl VectorPairFamily {
    pub fn new(n: usize, pairs: Vec<(Vec<C64>, Vec<C64>)>) -> Result<Self> {
        if n == 0 {
            return Err(dim_err("ambient dimension must be at least 1"));
        }
        if pairs.is_empty() {
            return Err(Error::Invalid("family must contain at least one pair".into()));
        }
        for (idx, (x, y)) in pairs.iter().enumerate() {
            if x.len() != n || y.len() != n {
                return Err(dim_err(format!(
                    "pair {idx} has dimensions ({}, {}), expected {n}",
                    x.len(),
                    y.len()
                )));
            }
            if x.iter().chain(y).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if x.iter().all(|z| *z == ZERO) || y.iter().all(|z| *z == ZERO) {
                return Err(Error::Invalid(format!("pair {idx} contains a zero vector")));
            }
        }
        Ok(Self { n, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Vec<C64>, Vec<C64>)] {
        &self.pairs
    }

    /// Appends a pair after validating it.
    pub fn push(&mut self, x: Vec<C64>, y: Vec<C64>) -> Result<()> {
        let mut pairs = self.pairs.clone();
        pairs.push((x, y));
        *self = Self::new(self.n, pairs)?;
        Ok(())
    }

    /// Kraus tuple {x_i y_i†}.
    pub fn to_kraus(&self) -> Result<KrausTuple> {
        let (xs, ys): (Vec<_>, Vec<_>) = self.pairs.iter().cloned().unzip();
        make_rank_one(&xs, &ys)
    }

    fn check_size(&self) -> Result<()> {
        if self.k() > MAX_PAIRS {
            return Err(Error::TooLarge {
                what: "vector pair family",
                size: self.k() as u128,
                limit: MAX_PAIRS as u128,
            });
        }
        Ok(())
    }

    /// Numerical rank of the selected left (or right) vectors.
    fn rank(&self, mask: u32, right: bool, tol: &Tolerance) -> usize {
        let idx: Vec<usize> = (0..self.k()).filter(|&i| mask & (1 << i) != 0).collect();
        if idx.is_empty() {
            return 0;
        }
        let m = ComplexMatrix::from_fn(self.n, idx.len(), |r, c| {
            let (x, y) = &self.pairs[idx[c]];
            if right {
                y[r]
            } else {
                x[r]
            }
        });
        numerical_rank(&m, tol.singular_eps)
    }
}

fn masks_of_size(k: usize, size: usize) -> Vec<u32> {
    (0u32..(1u32 << k))
        .filter(|m| m.count_ones() as usize == size)
        .collect()
}

/// Largest m such that some m pairs have both sides linearly independent.
pub fn mi_rank_direct(f: &VectorPairFamily, tol: &Tolerance) -> Result<usize> {
    f.check_size()?;
    for size in (1..=f.n.min(f.k())).rev() {
        let found = masks_of_size(f.k(), size)
            .into_par_iter()
            .any(|m| f.rank(m, false, tol) == size && f.rank(m, true, tol) == size);
        if found {
            return Ok(size);
        }
    }
    Ok(0)
}

/// min over S ⊆ [K] of dim span{x_i : i ∈ S} + dim span{y_j : j ∉ S}.
pub fn mi_rank_edmonds_rado(f: &VectorPairFamily, tol: &Tolerance) -> Result<usize> {
    f.check_size()?;
    let full = (1u32 << f.k()) - 1;
    Ok((0u32..=full)
        .into_par_iter()
        .map(|s| f.rank(s, false, tol) + f.rank(full & !s, true, tol))
        .min()
        .unwrap_or(0))
}

/// True iff the span of {x_i y_i†} contains a nonsingular matrix.
pub fn span_contains_nonsingular(f: &VectorPairFamily, tol: &Tolerance) -> Result<bool> {
    Ok(mi_rank_direct(f, tol)? == f.n)
}
