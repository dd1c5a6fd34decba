use super::perms::signed_permutations;
use crate::error::{dim_err, Error, Result};
use crate::numkernel::{CompensatedSum, ComplexMatrix, C64, ONE, ZERO};

pub const PERMANENT_NAIVE_MAX_N: usize = 8;
pub const PERMANENT_RYSER_MAX_N: usize = 30;
pub const HAFNIAN_MAX_DIM: usize = 16;

/// Per(A) by summing over all N! permutations.
pub fn permanent_naive(m: &ComplexMatrix) -> Result<C64> {
    let n = m.require_square("permanent input")?;
    if n > PERMANENT_NAIVE_MAX_N {
        return Err(Error::TooLarge {
            what: "naive permanent dimension",
            size: n as u128,
            limit: PERMANENT_NAIVE_MAX_N as u128,
        });
    }
    let acc: CompensatedSum = signed_permutations(n)
        .iter()
        .map(|(p, _)| p.iter().enumerate().map(|(i, &j)| m[(i, j)]).product())
        .sum();
    Ok(acc.value())
}

/// Per(A) by Ryser's inclusion–exclusion with Gray-code updates.
pub fn permanent_ryser(m: &ComplexMatrix) -> Result<C64> {
    let n = m.require_square("permanent input")?;
    if n > PERMANENT_RYSER_MAX_N {
        return Err(Error::TooLarge {
            what: "permanent dimension",
            size: n as u128,
            limit: PERMANENT_RYSER_MAX_N as u128,
        });
    }
    let mut row_sums = vec![ZERO; n];
    let mut acc = CompensatedSum::new();
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let adding = gray & (1 << bit) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += m[(i, bit)];
            } else {
                *s -= m[(i, bit)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        // (−1)^{N−|S|}
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            acc.add(prod);
        } else {
            acc.add(-prod);
        }
    }
    Ok(acc.value())
}

/// Per(A); Ryser's formula.
pub fn permanent(m: &ComplexMatrix) -> Result<C64> {
    permanent_ryser(m)
}

/// Haf(B) summed over all perfect pairings of the index set, reading only
/// entries B(p, q) with p < q.
pub fn hafnian(b: &ComplexMatrix) -> Result<C64> {
    let dim = b.require_square("hafnian input")?;
    if dim % 2 != 0 {
        return Err(dim_err(format!("hafnian needs even dimension, got {dim}")));
    }
    if dim > HAFNIAN_MAX_DIM {
        return Err(Error::TooLarge {
            what: "hafnian dimension",
            size: dim as u128,
            limit: HAFNIAN_MAX_DIM as u128,
        });
    }
    let mut acc = CompensatedSum::new();
    let mut free: Vec<usize> = (0..dim).collect();
    pairings(b, &mut free, ONE, &mut acc);
    Ok(acc.value())
}

fn pairings(b: &ComplexMatrix, free: &mut Vec<usize>, prod: C64, acc: &mut CompensatedSum) {
    if free.is_empty() {
        acc.add(prod);
        return;
    }
    let p = free.remove(0);
    for idx in 0..free.len() {
        let q = free.remove(idx);
        let w = b[(p.min(q), p.max(q))];
        if w != ZERO {
            pairings(b, free, prod * w, acc);
        }
        free.insert(idx, q);
    }
    free.insert(0, p);
}

/// For D = C + iB (N×M), the 2N×2M matrix
/// A = (1/√2)·[[C+iB, iC−B], [C−iB, −B−iC]] whose A·Aᵀ is
/// [[0, DD†], [(DD†)ᵀ, 0]], so Haf(AAᵀ) = Per(DD†).
pub fn wick_matrix(d: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (d.rows(), d.cols());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::from_fn(2 * n, 2 * m, |r, c| {
        let z = d[(r % n, c % m)];
        let (cr, br) = (C64::new(z.re, 0.0), C64::new(z.im, 0.0));
        let v = match (r < n, c < m) {
            (true, true) => cr + i * br,
            (true, false) => i * cr - br,
            (false, true) => cr - i * br,
            (false, false) => -br - i * cr,
        };
        v * s
    })
}
