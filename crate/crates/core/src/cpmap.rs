//! Completely positive maps T(X) = Σ A_i X A_i† presented by Kraus tuples,
//! their Choi matrices, marginals and the doubly-stochastic defect.
//!
//! Choi layout: the N²×N² matrix is an N×N grid of N×N blocks with
//! block (i, j) = T(e_i e_j†). Equivalently it is Σ_l vec(A_l) vec(A_l)†
//! where `vec` stacks columns, so row index `i·N + a` carries A_l(a, i).

use std::collections::BTreeSet;

use crate::error::{dim_err, Error, Result};
use crate::numkernel::{hermitian_eigen, is_psd, ComplexMatrix, Tolerance, C64, ONE, ZERO};

/// Ordered tuple (A₁,…,A_k) of N×N matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausTuple {
    n: usize,
    mats: Vec<ComplexMatrix>,
}

impl KrausTuple {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Invalid("Kraus tuple must contain at least one matrix".into()))?;
        let n = first.require_square("Kraus matrix")?;
        for (idx, m) in mats.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(dim_err(format!(
                    "Kraus matrix {idx} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if mats.iter().all(ComplexMatrix::is_zero) {
            return Err(Error::Invalid("Kraus tuple must contain a nonzero matrix".into()));
        }
        Ok(Self { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    fn check_arg(&self, x: &ComplexMatrix) -> Result<()> {
        x.require_shape(self.n, self.n, "operator argument")
    }

    /// T(X) = Σ A_i X A_i†.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_arg(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for a in &self.mats {
            acc = &acc + &(&(a * x) * &a.adjoint());
        }
        acc
    }

    /// T*(X) = Σ A_i† X A_i, the adjoint under ⟨X, Y⟩ = tr(X Y†).
    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_arg(x)?;
        Ok(self.apply_dual_unchecked(x))
    }

    pub(crate) fn apply_dual_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for a in &self.mats {
            acc = &acc + &(&(&a.adjoint() * x) * a);
        }
        acc
    }

    /// Linear combination Σ c_i A_i.
    pub fn combination(&self, coeffs: &[C64]) -> Result<ComplexMatrix> {
        if coeffs.len() != self.k() {
            return Err(dim_err(format!(
                "expected {} coefficients, got {}",
                self.k(),
                coeffs.len()
            )));
        }
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (a, &c) in self.mats.iter().zip(coeffs) {
            acc = &acc + &a.scale(c);
        }
        Ok(acc)
    }

    /// Tuple (L A_i R), the Kraus presentation of X ↦ L T(R X R†) L†.
    pub fn sandwich(&self, left: &ComplexMatrix, right: &ComplexMatrix) -> Result<Self> {
        self.check_arg(left)?;
        self.check_arg(right)?;
        Ok(Self {
            n: self.n,
            mats: self.mats.iter().map(|a| &(left * a) * right).collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            mats: self.mats.iter().map(|a| a.scale_real(s)).collect(),
        }
    }

    /// True when every Kraus entry has integer real and imaginary parts.
    pub fn is_gaussian_integer(&self) -> bool {
        self.mats
            .iter()
            .flat_map(|m| m.as_slice())
            .all(|z| z.re.fract() == 0.0 && z.im.fract() == 0.0)
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi_from_kraus(self)
    }
}

/// Bipartite unnormalized density matrix, viewed as an N×N grid of N×N blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    mat: ComplexMatrix,
}

impl ChoiMatrix {
    /// Validates an N²×N² matrix as a PSD block matrix.
    pub fn new(mat: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let n = block_dim(&mat)?;
        if !is_psd(&mat, tol) {
            return Err(Error::NotPsd);
        }
        Ok(Self { n, mat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Block A_{i,j} (zero-based).
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        block_of(&self.mat, self.n, i, j)
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

/// Side length N of an N²×N² block matrix.
pub fn block_dim(mat: &ComplexMatrix) -> Result<usize> {
    let size = mat.require_square("block matrix")?;
    let n = (size as f64).sqrt().round() as usize;
    if n * n != size {
        return Err(dim_err(format!(
            "block matrix size {size} is not a perfect square"
        )));
    }
    Ok(n)
}

pub(crate) fn block_of(mat: &ComplexMatrix, n: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |a, b| mat[(i * n + a, j * n + b)])
}

/// Column-stacking vectorization: entry `i·N + a` is A(a, i).
fn vec_columns(a: &ComplexMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        for r in 0..n {
            v[i * n + r] = a[(r, i)];
        }
    }
    v
}

fn unvec_columns(v: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, i| v[i * n + r])
}

pub fn choi_from_kraus(t: &KrausTuple) -> ChoiMatrix {
    let n = t.n;
    let size = n * n;
    let mut mat = ComplexMatrix::zeros(size, size);
    for a in &t.mats {
        let v = vec_columns(a);
        for r in 0..size {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..size {
                mat[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    ChoiMatrix { n, mat }
}

/// Minimal Kraus tuple from the spectral decomposition of a Choi matrix.
///
/// Eigenvalues below `psd_eps · tr(c)` are dropped.
pub fn kraus_from_choi(c: &ChoiMatrix, tol: &Tolerance) -> Result<KrausTuple> {
    if !is_psd(&c.mat, tol) {
        return Err(Error::NotPsd);
    }
    let eig = hermitian_eigen(&c.mat)?;
    let cutoff = tol.psd_eps * c.trace().abs();
    let size = c.n * c.n;
    let mut mats = Vec::new();
    for k in (0..size).rev() {
        let lambda = eig.values[k];
        if lambda <= cutoff {
            continue;
        }
        let s = lambda.sqrt();
        let v: Vec<C64> = (0..size).map(|r| eig.vectors[(r, k)] * s).collect();
        mats.push(unvec_columns(&v, c.n));
    }
    if mats.is_empty() {
        return Err(Error::Invalid("Choi matrix is numerically zero".into()));
    }
    KrausTuple::new(mats)
}

/// Quantum marginals (ρ_A, ρ_B): ρ_A = Σ_i A_{i,i}, ρ_B(i,j) = tr(A_{i,j}).
pub fn marginals(c: &ChoiMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = c.n;
    let mut rho_a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        rho_a = &rho_a + &c.block(i, i);
    }
    let rho_b = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|a| c.mat[(i * n + a, j * n + a)]).sum()
    });
    (rho_a, rho_b)
}

/// DS(T) = tr((T(I) − I)²) + tr((T*(I) − I)²).
pub fn ds_measure(t: &KrausTuple) -> f64 {
    let id = ComplexMatrix::identity(t.n);
    let row = &t.apply_unchecked(&id) - &id;
    let col = &t.apply_dual_unchecked(&id) - &id;
    squared_defect(&row) + squared_defect(&col)
}

/// tr(D²) for a (numerically) Hermitian defect D, computed as ‖D‖_F².
pub(crate) fn squared_defect(d: &ComplexMatrix) -> f64 {
    d.frobenius_norm().powi(2)
}

/// The skew-symmetric channel Sk₃ with Kraus matrices (e_i e_j† − e_j e_i†)/√2.
pub fn make_sk3() -> KrausTuple {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mats = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| {
            let mut m = ComplexMatrix::zeros(3, 3);
            m[(i, j)] = C64::new(s, 0.0);
            m[(j, i)] = C64::new(-s, 0.0);
            m
        })
        .collect();
    KrausTuple { n: 3, mats }
}

/// Bipartite graph on two parts of size `n`, edges as zero-based (row, column).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(dim_err(format!("edge ({i}, {j}) out of range for n = {n}")));
        }
        Ok(Self { n, edges })
    }

    pub fn complete(n: usize) -> Self {
        Self {
            n,
            edges: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// 0/1 incidence matrix.
    pub fn incidence(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| {
            if self.contains(i, j) {
                ONE
            } else {
                ZERO
            }
        })
    }
}

/// Tuple {e_i e_j† : (i, j) ∈ edges}; its span has a nonsingular member iff
/// the graph has a perfect matching.
pub fn make_bipartite(g: &BipartiteGraph) -> Result<KrausTuple> {
    make_weighted_bipartite(g.n, &g.edges().map(|(i, j)| (i, j, 1.0)).collect::<Vec<_>>())
}

/// Tuple {√w e_i e_j†}; the Choi matrix is diagonal with entries w.
pub fn make_weighted_bipartite(n: usize, edges: &[(usize, usize, f64)]) -> Result<KrausTuple> {
    if edges.is_empty() {
        return Err(Error::Invalid("edge set must be nonempty".into()));
    }
    let mut mats = Vec::with_capacity(edges.len());
    for &(i, j, w) in edges {
        if i >= n || j >= n {
            return Err(dim_err(format!("edge ({i}, {j}) out of range for n = {n}")));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Invalid(format!("edge weight must be positive, got {w}")));
        }
        let mut m = ComplexMatrix::zeros(n, n);
        m[(i, j)] = C64::new(w.sqrt(), 0.0);
        mats.push(m);
    }
    KrausTuple::new(mats)
}

/// Tuple {x_i y_i†} of rank-one matrices.
pub fn make_rank_one(xs: &[Vec<C64>], ys: &[Vec<C64>]) -> Result<KrausTuple> {
    if xs.len() != ys.len() {
        return Err(dim_err(format!(
            "{} left vectors but {} right vectors",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Invalid("vector lists must be nonempty".into()))?;
    let mut mats = Vec::with_capacity(xs.len());
    for (x, y) in xs.iter().zip(ys) {
        if x.len() != n || y.len() != n {
            return Err(dim_err("all vectors must share one dimension"));
        }
        if x.iter().all(|z| *z == ZERO) || y.iter().all(|z| *z == ZERO) {
            return Err(Error::Invalid("zero vector in rank-one family".into()));
        }
        mats.push(ComplexMatrix::outer(x, y));
    }
    KrausTuple::new(mats)
}
