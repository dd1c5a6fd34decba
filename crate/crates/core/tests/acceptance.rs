//! Acceptance suite. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion together with its runtime and limit.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use opscale::cpmap::{
    choi_from_kraus, ds_measure, make_bipartite, make_rank_one, make_sk3, marginals,
    BipartiteGraph, KrausTuple,
};
use opscale::estimators::{
    gnorm_mc, gnorm_samples, perm_mc, perm_samples, qperm_mc, qperm_samples, wick_mc,
};
use opscale::matroid::{mi_rank_direct, mi_rank_edmonds_rado, span_contains_nonsingular, VectorPairFamily};
use opscale::numkernel::determinant;
use opscale::qperm::{
    gnorm_expand, hafnian, mixed_discriminant, permanent, permanent_naive, qperm_via_tuples,
    quantum_permanent, quantum_permanent_naive, wick_matrix,
};
use opscale::scaling::{
    capacity_tuple, classical_sinkhorn_run, decide_edmonds, entry_bits, iteration_budget, osi_run,
    Verdict,
};
use opscale::{ComplexMatrix, Tolerance, C64};
use rand::rngs::StdRng;
use rand::Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn qp(rho: &ComplexMatrix) -> C64 {
    quantum_permanent(rho).unwrap()
}

fn det(m: &ComplexMatrix) -> C64 {
    determinant(m).unwrap()
}

fn closed_form_identities() -> Result<String, String> {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for case in 0..10 {
        let c = random_psd(&mut r, 3);
        let d = random_psd(&mut r, 3);
        let got = qp(&c.kron(&d));
        let want = det(&c) * det(&d) * 6.0;
        let e = rel_err(got, want);
        worst = worst.max(e);
        ensure(e <= 1e-8, || format!("product case {case}: {got} vs {want}"))?;

        let rm = complex_matrix(&mut r, 3, 3);
        let pure = choi_from_kraus(&KrausTuple::new(vec![rm.clone()]).unwrap());
        let got = qp(pure.matrix());
        let want = C64::new(6.0 * det(&rm).norm_sqr(), 0.0);
        let e = rel_err(got, want);
        worst = worst.max(e);
        ensure(e <= 1e-8, || format!("pure case {case}: {got} vs {want}"))?;

        // block (i, j) = R(i, j)·e_i e_j†
        let blocks = ComplexMatrix::from_fn(9, 9, |row, col| {
            let (i, a, j, b) = (row / 3, row % 3, col / 3, col % 3);
            if a == i && b == j {
                rm[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let got = qp(&blocks);
        let want = permanent_naive(&rm).unwrap();
        let e = rel_err(got, want);
        worst = worst.max(e);
        ensure(e <= 1e-8, || format!("matrix-unit case {case}: {got} vs {want}"))?;
    }
    Ok(format!("30 identities, max rel err {worst:.1e}"))
}

fn sk3_battery() -> Result<String, String> {
    let t = make_sk3();
    let ds = ds_measure(&t);
    ensure(ds <= 1e-12, || format!("DS = {ds:e}"))?;
    let q = qp(choi_from_kraus(&t).matrix());
    ensure(q.norm() <= 1e-9, || format!("QP = {q}"))?;
    let mut r = rng(202);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let coeffs: Vec<C64> = (0..t.k()).map(|_| C64::new(gauss(&mut r), 0.0)).collect();
        let d = det(&t.combination(&coeffs).unwrap()).norm();
        worst = worst.max(d);
    }
    ensure(worst <= 1e-9, || format!("combination det {worst:e}"))?;
    let report = decide_edmonds(&t, &tol(), None);
    ensure(report.verdict == Verdict::NonsingularExists, || {
        format!("verdict {:?}", report.verdict)
    })?;
    Ok(format!("DS {ds:.1e}, |QP| {:.1e}, max |det| {worst:.1e}, verdict nonsingular_exists", q.norm()))
}

fn four_routes() -> Result<String, String> {
    let mut r = rng(303);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let n = r.random_range(1..=3);
        let k = r.random_range(1..=3);
        let t = random_tuple(&mut r, n, k);
        let rho = choi_from_kraus(&t);
        let vals = [
            qp(rho.matrix()).re,
            quantum_permanent_naive(rho.matrix()).unwrap().re,
            qperm_via_tuples(&t).unwrap(),
            gnorm_expand(&t).unwrap().1,
        ];
        for a in 0..4 {
            for b in a + 1..4 {
                let e = rel_err_real(vals[a], vals[b]);
                worst = worst.max(e);
                ensure(e <= 1e-7, || format!("case {case} (N={n}, k={k}): routes {vals:?}"))?;
            }
        }
    }
    Ok(format!("20 tuples, max pairwise rel err {worst:.1e}"))
}

fn verdict_says_yes(v: Verdict) -> Result<bool, String> {
    match v {
        Verdict::NonsingularExists => Ok(true),
        Verdict::NoNonsingular | Verdict::BudgetExhaustedNoNonsingular => Ok(false),
        Verdict::InconclusiveNumerical => Err("inconclusive_numerical".into()),
    }
}

fn bipartite_decisions() -> Result<String, String> {
    let mut r = rng(404);
    let (mut yes, mut max_iter) = (0, 0);
    for case in 0..50 {
        let p = 0.12 + 0.5 * (case as f64 / 49.0);
        let mut edges = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                if r.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        if edges.is_empty() {
            edges.push((r.random_range(0..6), r.random_range(0..6)));
        }
        let g = BipartiteGraph::new(6, edges).unwrap();
        let t = make_bipartite(&g).unwrap();
        let oracle = has_perfect_matching(6, |i, j| g.contains(i, j));
        let report = decide_edmonds(&t, &tol(), None);
        let got = verdict_says_yes(report.verdict).map_err(|e| format!("case {case}: {e}"))?;
        ensure(got == oracle, || format!("case {case}: decide {got}, oracle {oracle}, edges {:?}", g.edges().collect::<Vec<_>>()))?;
        let budget = iteration_budget(6, entry_bits(&t));
        ensure(report.iterations <= budget, || {
            format!("case {case}: {} iterations over budget {budget}", report.iterations)
        })?;
        yes += oracle as usize;
        max_iter = max_iter.max(report.iterations);
    }
    Ok(format!("50/50 agree ({yes} with a perfect matching), max iterations {max_iter}"))
}

fn small_int_vector(r: &mut StdRng, n: usize, complex: bool) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| {
                let im = if complex { r.random_range(-1..=1) } else { 0 };
                C64::new(r.random_range(-2..=2) as f64, im as f64)
            })
            .collect();
        if v.iter().any(|z| z.norm() > 0.0) {
            return v;
        }
    }
}

/// Small-integer combination of a basis, never the zero vector.
fn from_subspace(r: &mut StdRng, basis: &[Vec<C64>]) -> Vec<C64> {
    let n = basis[0].len();
    loop {
        let mut v = vec![C64::new(0.0, 0.0); n];
        for b in basis {
            let c = r.random_range(-2..=2) as f64;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += bi * c;
            }
        }
        if v.iter().any(|z| z.norm() > 0.0) {
            return v;
        }
    }
}

fn random_family(r: &mut StdRng) -> VectorPairFamily {
    let n = r.random_range(2..=4);
    let k = r.random_range(1..=8);
    let complex = r.random_bool(0.3);
    // two groups of pairs, each confined to its own pair of subspaces
    let groups: Vec<[Vec<Vec<C64>>; 2]> = (0..2)
        .map(|_| {
            let dx = r.random_range(1..=n);
            let dy = r.random_range(1..=n);
            let bx = (0..dx).map(|_| small_int_vector(r, n, complex)).collect();
            let by = (0..dy).map(|_| small_int_vector(r, n, complex)).collect();
            [bx, by]
        })
        .collect();
    let pairs = (0..k)
        .map(|_| {
            let [bx, by] = &groups[r.random_range(0..2)];
            (from_subspace(r, bx), from_subspace(r, by))
        })
        .collect();
    VectorPairFamily::new(n, pairs).unwrap()
}

fn separable_decisions() -> Result<String, String> {
    let mut r = rng(505);
    let mut yes = 0;
    for case in 0..100 {
        let f = random_family(&mut r);
        let direct = mi_rank_direct(&f, &tol()).unwrap();
        let er = mi_rank_edmonds_rado(&f, &tol()).unwrap();
        ensure(direct == er, || format!("case {case}: direct {direct}, Edmonds-Rado {er}"))?;
        let oracle = span_contains_nonsingular(&f, &tol()).unwrap();
        let report = decide_edmonds(&f.to_kraus().unwrap(), &tol(), None);
        let got = verdict_says_yes(report.verdict).map_err(|e| format!("case {case}: {e}"))?;
        ensure(got == oracle, || format!("case {case}: decide {got}, rank {direct}, family {f:?}"))?;
        yes += oracle as usize;
    }
    ensure(yes > 0 && yes < 100, || format!("degenerate sample: {yes} positives"))?;
    Ok(format!("100/100 agree ({yes} positive), direct rank = Edmonds-Rado rank"))
}

fn potential_monotone() -> Result<String, String> {
    let mut r = rng(606);
    let mut worst = 0.0f64;
    for case in 0..10 {
        let k = r.random_range(2..=4);
        let t = random_tuple(&mut r, 3, k);
        let tr = t.apply(&ComplexMatrix::identity(3)).unwrap().trace().re;
        let t = t.scaled(3.0 / tr);
        let trace = osi_run(&t, 20, true, &tol());
        ensure(trace.error.is_none(), || format!("case {case}: {:?}", trace.error))?;
        let pv = trace.potential_values.unwrap();
        for w in pv.windows(2) {
            let drop = (w[0] - w[1]) / w[0].abs();
            worst = worst.max(drop);
            ensure(w[1] >= w[0] * (1.0 - 1e-6), || format!("case {case}: potentials {pv:?}"))?;
        }
    }
    Ok(format!("10 runs x 20 steps, largest relative drop {worst:.1e}"))
}

fn leq(a: f64, b: f64, slack: f64) -> bool {
    a <= b + slack * b.abs().max(1.0)
}

fn bounds_suite() -> Result<String, String> {
    let mut r = rng(707);
    for case in 0..50 {
        let k = r.random_range(1..=9);
        let rho = choi_from_kraus(&random_tuple(&mut r, 3, k));
        let q = qp(rho.matrix()).re;
        let diag: Vec<ComplexMatrix> = (0..3).map(|i| rho.block(i, i)).collect();
        let m = 6.0 * mixed_discriminant(&diag).unwrap().re;
        let d = 6.0 * det(&marginals(&rho).0).re;
        ensure(leq(q, m, 1e-8) && leq(m, d, 1e-8), || {
            format!("BUDM case {case}: QP {q}, N!M {m}, N!det {d}")
        })?;
    }
    let mut checks = 0;
    for case in 0..20 {
        let k = r.random_range(1..=6);
        let xs: Vec<Vec<C64>> = (0..k).map(|_| complex_vector(&mut r, 3)).collect();
        let ys: Vec<Vec<C64>> = (0..k).map(|_| complex_vector(&mut r, 3)).collect();
        let t = make_rank_one(&xs, &ys).unwrap();
        let q = qp(choi_from_kraus(&t).matrix()).re;
        for _ in 0..20 {
            let x = random_pd(&mut r, 3, 0.1);
            let lhs = det(&t.apply(&x).unwrap()).re;
            let rhs = q * det(&x).re;
            ensure(lhs >= rhs - 1e-8 * rhs.abs().max(1.0), || {
                format!("separable case {case}: det T(X) {lhs} < QP det X {rhs}")
            })?;
            checks += 1;
        }
    }
    let mut worst = 0.0f64;
    for case in 0..20 {
        let k = r.random_range(1..=4);
        let rho = choi_from_kraus(&random_tuple(&mut r, 3, k)).into_matrix();
        let a: Vec<ComplexMatrix> = (0..4).map(|_| complex_matrix(&mut r, 3, 3)).collect();
        let left = a[0].kron(&a[1]);
        let right = a[2].kron(&a[3]);
        let got = qp(&(&(&left * &rho) * &right));
        let want = det(&(&(&a[0] * &a[1]) * &(&a[2] * &a[3]))) * qp(&rho);
        let e = rel_err(got, want);
        worst = worst.max(e);
        ensure(e <= 1e-7, || format!("local transform case {case}: {got} vs {want}"))?;
    }
    Ok(format!(
        "50 BUDM chains, {checks} separable checks, local-transform max rel err {worst:.1e}"
    ))
}

fn capacity_sandwich() -> Result<String, String> {
    let mut r = rng(808);
    let mut ratio_range = (f64::INFINITY, 0.0f64);
    for case in 0..20 {
        let bs: Vec<ComplexMatrix> = (0..3).map(|_| random_psd(&mut r, 3)).collect();
        let m = mixed_discriminant(&bs).unwrap().re;
        let cap = capacity_tuple(&bs, 100_000, &tol()).unwrap();
        let upper = 27.0 / 6.0 * m;
        ensure(cap.value >= m - 1e-6 && cap.value <= upper + 1e-6, || {
            format!("case {case}: M {m}, capacity {} ({} iterations), bound {upper}", cap.value, cap.iterations)
        })?;
        let ratio = cap.value / m;
        ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
    }
    Ok(format!("20 tuples, capacity/M in [{:.3}, {:.3}]", ratio_range.0, ratio_range.1))
}

fn within(name: &str, mean: C64, se: f64, exact: C64) -> Result<f64, String> {
    let z = (mean - exact).norm() / se;
    ensure(z <= 5.0, || format!("{name}: mean {mean} vs exact {exact}, SE {se:e}, z {z:.2}"))?;
    Ok(z)
}

fn monte_carlo() -> Result<String, String> {
    const S: u64 = 100_000;
    let mut r = rng(909);
    let mut zs = Vec::new();

    let t = random_tuple(&mut r, 3, 2);
    let exact = gnorm_expand(&t).unwrap().1;
    let est = gnorm_mc(&t, S, 11).unwrap();
    zs.push(within("gnorm", est.mean, est.std_error, C64::new(exact, 0.0))?);
    ensure(gnorm_samples(&t, S, 11).unwrap().iter().all(|&v| v >= 0.0), || "negative gnorm sample".into())?;

    let d = complex_matrix(&mut r, 3, 3);
    let exact = permanent(&(&d * &d.adjoint())).unwrap();
    let est = perm_mc(&d, S, 12).unwrap();
    zs.push(within("perm", est.mean, est.std_error, exact)?);
    ensure(perm_samples(&d, S, 12).unwrap().iter().all(|&v| v >= 0.0), || "negative perm sample".into())?;

    for (n, k, seed) in [(2, 3, 13), (3, 2, 14)] {
        let t = random_tuple(&mut r, n, k);
        let exact = qp(choi_from_kraus(&t).matrix());
        let est = qperm_mc(&t, S, seed).unwrap();
        zs.push(within("qperm", est.estimate.mean, est.estimate.std_error, exact)?);
        zs.push(within("qperm bilinear", est.bilinear.mean, est.bilinear.std_error, exact)?);
        ensure(qperm_samples(&t, S, seed).unwrap().iter().all(|p| p.0 >= 0.0), || {
            "negative qperm sample".into()
        })?;
    }

    let a = real_matrix(&mut r, 4, 4);
    let exact = hafnian(&(&a * &a.transpose())).unwrap();
    let est = wick_mc(&a, S, 15).unwrap();
    zs.push(within("wick real", est.mean, est.std_error, exact)?);
    let d = complex_matrix(&mut r, 2, 2);
    let exact = permanent(&(&d * &d.adjoint())).unwrap();
    let est = wick_mc(&wick_matrix(&d), S, 16).unwrap();
    zs.push(within("wick bridge", est.mean, est.std_error, exact)?);

    let zmax = zs.iter().cloned().fold(0.0, f64::max);
    Ok(format!("{} estimates at 1e5 samples, max |z| {zmax:.2}", zs.len()))
}

fn classical_equivalence() -> Result<String, String> {
    let mut r = rng(1010);
    let mut worst = 0.0f64;
    for case in 0..10 {
        let n = r.random_range(3..=6);
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, r.random_range(0..n))).collect();
        edges.extend((0..n).map(|j| (r.random_range(0..n), j)));
        for i in 0..n {
            for j in 0..n {
                if r.random_bool(0.3) {
                    edges.push((i, j));
                }
            }
        }
        let g = BipartiteGraph::new(n, edges).unwrap();
        let t = make_bipartite(&g).unwrap();
        let trace = osi_run(&t, 20, false, &tol());
        ensure(trace.error.is_none() && trace.states.len() == 21, || format!("case {case}: OSI stopped early"))?;
        let classical = classical_sinkhorn_run(&g.incidence(), 20).unwrap();
        for (step, s) in trace.states.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        ensure(s.p[(i, j)].norm() == 0.0 && s.q[(i, j)].norm() == 0.0, || {
                            format!("case {case} step {step}: off-diagonal scaling entry")
                        })?;
                    }
                }
                let ep = rel_err_real(s.p[(i, i)].re, classical.row_factors[step][i]);
                let eq = rel_err_real(s.q[(i, i)].re, classical.col_factors[step][i]);
                worst = worst.max(ep).max(eq);
                ensure(ep <= 1e-8 && eq <= 1e-8, || {
                    format!("case {case} step {step} index {i}: rel err {ep:e} / {eq:e}")
                })?;
            }
        }
    }
    Ok(format!("10 graphs x 21 states, max rel err {worst:.1e}"))
}

fn wick_bridge() -> Result<String, String> {
    let mut r = rng(1111);
    let mut worst = 0.0f64;
    for n in [2, 3] {
        for case in 0..10 {
            let d = complex_matrix(&mut r, n, n);
            let w = wick_matrix(&d);
            let got = hafnian(&(&w * &w.transpose())).unwrap();
            let want = permanent(&(&d * &d.adjoint())).unwrap();
            let e = rel_err(got, want);
            worst = worst.max(e);
            ensure(e <= 1e-7, || format!("{n}x{n} case {case}: {got} vs {want}"))?;
        }
    }
    Ok(format!("20 matrices, max rel err {worst:.1e}"))
}

const CRITERIA: [(&str, u64, Check); 11] = [
    ("closed-form quantum permanent identities", 1, closed_form_identities),
    ("skew-symmetric channel battery", 1, sk3_battery),
    ("four-route quantum permanent agreement", 30, four_routes),
    ("decisions on bipartite graphs", 60, bipartite_decisions),
    ("decisions on rank-one families", 120, separable_decisions),
    ("potential monotonicity", 30, potential_monotone),
    ("permanent bounds and local transformations", 30, bounds_suite),
    ("capacity sandwich", 30, capacity_sandwich),
    ("Monte Carlo unbiasedness", 60, monte_carlo),
    ("classical and operator scaling agree", 10, classical_equivalence),
    ("Wick bridge", 5, wick_bridge),
];

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (idx, (name, limit, check)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; runtime over limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {status} ({:.2} s, limit {limit} s) {detail}",
            idx + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
