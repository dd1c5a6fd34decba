use super::perms::signed_permutations;
use crate::error::{dim_err, Error, Result};
use crate::numkernel::{det_in_place, CompensatedSum, ComplexMatrix, C64, ZERO};

pub const MIXED_NAIVE_MAX_N: usize = 6;
pub const MIXED_MAX_N: usize = 24;

fn check_tuple(bs: &[ComplexMatrix]) -> Result<usize> {
    let n = bs.len();
    if n == 0 {
        return Err(dim_err("mixed discriminant needs at least one matrix"));
    }
    for (idx, b) in bs.iter().enumerate() {
        if b.rows() != n || b.cols() != n {
            return Err(dim_err(format!(
                "argument {idx} is {}x{}, expected {n}x{n} for an {n}-tuple",
                b.rows(),
                b.cols()
            )));
        }
    }
    Ok(n)
}

/// M(B₁,…,B_N) = Σ_{σ,τ} sgn(σ)sgn(τ) Π_i B_i(σ(i), τ(i)).
pub fn mixed_discriminant_naive(bs: &[ComplexMatrix]) -> Result<C64> {
    let n = check_tuple(bs)?;
    if n > MIXED_NAIVE_MAX_N {
        return Err(Error::TooLarge {
            what: "naive mixed discriminant dimension",
            size: n as u128,
            limit: MIXED_NAIVE_MAX_N as u128,
        });
    }
    let perms = signed_permutations(n);
    let mut acc = CompensatedSum::new();
    for (sigma, s_sign) in &perms {
        for (tau, t_sign) in &perms {
            let mut prod = C64::new(s_sign * t_sign, 0.0);
            for (i, b) in bs.iter().enumerate() {
                prod *= b[(sigma[i], tau[i])];
                if prod == ZERO {
                    break;
                }
            }
            acc.add(prod);
        }
    }
    Ok(acc.value())
}

/// M(B₁,…,B_N) = Σ_{S ⊆ [N]} (−1)^{N−|S|} det(Σ_{i∈S} B_i), 2^N determinants.
pub fn mixed_discriminant(bs: &[ComplexMatrix]) -> Result<C64> {
    let n = check_tuple(bs)?;
    if n > MIXED_MAX_N {
        return Err(Error::TooLarge {
            what: "mixed discriminant dimension",
            size: n as u128,
            limit: MIXED_MAX_N as u128,
        });
    }
    let slices: Vec<&[C64]> = bs.iter().map(ComplexMatrix::as_slice).collect();
    Ok(mixed_discriminant_slices(&slices, n))
}

/// Unchecked inclusion–exclusion over row-major `n x n` buffers.
pub(crate) fn mixed_discriminant_slices(bs: &[&[C64]], n: usize) -> C64 {
    let nn = n * n;
    let mut acc = CompensatedSum::new();
    let mut sum = vec![ZERO; nn];
    let mut work = vec![ZERO; nn];
    for mask in 1usize..(1 << n) {
        sum.iter_mut().for_each(|z| *z = ZERO);
        for (i, b) in bs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (s, x) in sum.iter_mut().zip(b.iter()) {
                    *s += x;
                }
            }
        }
        work.copy_from_slice(&sum);
        let d = det_in_place(&mut work, n);
        if (n - mask.count_ones() as usize).is_multiple_of(2) {
            acc.add(d);
        } else {
            acc.add(-d);
        }
    }
    acc.value()
}
