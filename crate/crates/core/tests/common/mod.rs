//! Random instance generators and brute-force oracles shared by the
//! integration test targets.
#![allow(dead_code)]

use opscale::cpmap::KrausTuple;
use opscale::{ComplexMatrix, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut StdRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn cgauss(rng: &mut StdRng) -> C64 {
    C64::new(gauss(rng), gauss(rng))
}

pub fn complex_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| cgauss(rng))
}

pub fn real_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(gauss(rng), 0.0))
}

pub fn complex_vector(rng: &mut StdRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| cgauss(rng)).collect()
}

/// G·G† for a complex Gaussian G.
pub fn random_psd(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n);
    &g * &g.adjoint()
}

/// G·G† + shift·I, safely positive definite.
pub fn random_pd(rng: &mut StdRng, n: usize, shift: f64) -> ComplexMatrix {
    &random_psd(rng, n) + &ComplexMatrix::identity(n).scale_real(shift)
}

pub fn random_tuple(rng: &mut StdRng, n: usize, k: usize) -> KrausTuple {
    KrausTuple::new((0..k).map(|_| complex_matrix(rng, n, n)).collect()).unwrap()
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Exhaustive search for a perfect matching in an n×n bipartite graph.
pub fn has_perfect_matching(n: usize, contains: impl Fn(usize, usize) -> bool) -> bool {
    permutations(n).iter().any(|p| (0..n).all(|i| contains(i, p[i])))
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn rel_err_real(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
