//! Acceptance criteria 1-8. Each prints one PASS/FAIL line with its runtime;
//! the test fails if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grsk::exact_numerics::{rat, random_rational, PosRational};
use grsk::grsk_core::{
    apply_grsk, bender_knuth, braid_generator, check_fundamental_identity, check_t11_identity, energy,
    log_jacobian_det, noumi_yamada, path_partition_oracle, path_product_from_output, patterns_from_matrix,
    random_matrix, schuetzenberger, JacobianMap,
};
use grsk::grsk_symmetric::{
    apply_grsk_symmetric, apply_grsk_symmetric_recursive, diagonal_product_identity, log_jacobian_det_symmetric,
};
use grsk::grsk_triangular::{
    apply_grsk_triangular, check_shape_ratios, epsilon_embedding_check, log_jacobian_det_triangular, triangular_type,
    triangular_type_from_weights,
};
use grsk::polymer_mc::{pushforward_check, random_measure_params, z1_symmetric_equivalence, MeasureParams};
use grsk::tropical_rsk::{gt_membership_check, laguerre_marginal_check, tropicalization_limit_check, RealMatrix};
use grsk::whittaker_eval::{
    bessel_relation_error, random_stade_params, stade_identity_check, QuadratureSpec, StadeKind,
};
use grsk::{SymmetricWeightMatrix, TriangularArray};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let pass = o.pass && took <= budget;
    println!(
        "{} criterion {id} ({name}): {} [{:.1}s, budget {}s]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn unimodular(d: grsk::Result<PosRational>) -> bool {
    matches!(d, Ok(v) if v == rat(1, 1) || v == rat(-1, 1))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sym(g: &mut ChaCha8Rng, n: usize) -> SymmetricWeightMatrix<PosRational> {
    SymmetricWeightMatrix::from_fn(n, |_, _| random_rational(g, 9))
}

fn random_tri(g: &mut ChaCha8Rng, n: usize) -> TriangularArray<PosRational> {
    TriangularArray::from_fn(n, |_, _| random_rational(g, 9))
}

fn fundamental_identity() -> Outcome {
    let mut g = rng(1);
    let mut ok = 0;
    for _ in 0..200 {
        let (n, m) = (g.random_range(1..=5), g.random_range(1..=5));
        let w = random_matrix(&mut g, n, m, 9);
        let s = random_rational(&mut g, 9);
        ok += check_fundamental_identity(&w, &s) as usize;
    }
    Outcome { pass: ok == 200, detail: format!("{ok}/200 exact") }
}

fn volume_preservation() -> Outcome {
    let mut g = rng(2);
    let (mut rect, mut sym, mut tri) = (0, 0, 0);
    for _ in 0..50 {
        let (n, m) = (g.random_range(1..=5), g.random_range(1..=5));
        rect += unimodular(log_jacobian_det(JacobianMap::Grsk, &random_matrix(&mut g, n, m, 9))) as usize;
        let n = g.random_range(1..=5);
        sym += unimodular(log_jacobian_det_symmetric(&random_sym(&mut g, n))) as usize;
        let n = g.random_range(2..=5);
        tri += unimodular(log_jacobian_det_triangular(&random_tri(&mut g, n))) as usize;
    }
    Outcome {
        pass: rect == 50 && sym == 50 && tri == 50,
        detail: format!("det = ±1 for rect {rect}/50, sym {sym}/50, tri {tri}/50"),
    }
}

fn path_identities() -> Outcome {
    let mut g = rng(3);
    let (mut paths, mut paths_total) = (0, 0);
    for n in 1..=9 {
        for m in 1..=(10 - n) {
            let w = random_matrix(&mut g, n, m, 9);
            let t = apply_grsk(&w);
            for k in 1..=m {
                for r in 1..=n.min(k) {
                    paths_total += 1;
                    paths += path_partition_oracle(&w, k, r).is_ok_and(|v| v == path_product_from_output(&t, k, r))
                        as usize;
                }
            }
        }
    }
    let mut t11 = 0;
    for n in 1..=6 {
        for m in 1..=6 {
            t11 += check_t11_identity(&random_matrix(&mut g, n, m, 9)) as usize;
        }
    }
    let mut shape = 0;
    for n in 2..=8 {
        shape += check_shape_ratios(&random_tri(&mut g, n)).unwrap_or(false) as usize;
    }
    Outcome {
        pass: paths == paths_total && t11 == 36 && shape == 7,
        detail: format!("paths {paths}/{paths_total}, t11 {t11}/36, triangular shape {shape}/7"),
    }
}

fn structural_equivalences() -> Outcome {
    let mut g = rng(4);
    let mut ny = 0;
    for _ in 0..100 {
        let (n, m) = (g.random_range(1..=5), g.random_range(1..=5));
        let w = random_matrix(&mut g, n, m, 9);
        ny += noumi_yamada(&w).is_ok_and(|pq| pq == patterns_from_matrix(&apply_grsk(&w))) as usize;
    }
    let (mut rec, mut diag) = (0, 0);
    for _ in 0..50 {
        let n = g.random_range(1..=6);
        let w = random_sym(&mut g, n);
        let t = apply_grsk_symmetric(&w);
        rec += (apply_grsk_symmetric_recursive(&w).is_ok_and(|r| r == t) && t.to_full() == apply_grsk(&w.to_full()))
            as usize;
        diag += diagonal_product_identity(&w) as usize;
    }
    let mut ty = 0;
    for n in 2..=7 {
        let w = random_tri(&mut g, n);
        ty += (triangular_type(&apply_grsk_triangular(&w)) == triangular_type_from_weights(&w)) as usize;
    }
    // Bender-Knuth: involution, and ℰ₀ conserved up to the corner terms.
    let (mut bk, mut bk_total) = (0, 0);
    let zero = rat(0, 1);
    for _ in 0..10 {
        let (n, m) = (g.random_range(2..=4), g.random_range(2..=4));
        let x = random_matrix(&mut g, n, m, 9);
        for i in 1..=n {
            for j in 1..=m {
                bk_total += 1;
                let Ok(y) = bender_knuth(&x, i, j) else { continue };
                let inv = bender_knuth(&y, i, j).is_ok_and(|z| z == x);
                let (dx, dy) = match (i, j) {
                    (1, 1) => (rat(1, 1) / x.get(1, 1).clone(), rat(1, 1) / y.get(1, 1).clone()),
                    _ if (i, j) == (n, m) => (x.get(n, m).clone(), y.get(n, m).clone()),
                    _ => (zero.clone(), zero.clone()),
                };
                bk += (inv && energy(&y, &zero) + dy == energy(&x, &zero) + dx) as usize;
            }
        }
    }
    let mut braids = 0;
    for _ in 0..10 {
        let p = patterns_from_matrix(&random_matrix(&mut g, 4, 4, 9)).p;
        let mut ok = (1..4).all(|i| schuetzenberger(&p, i).and_then(|q| schuetzenberger(&q, i)).is_ok_and(|q| q == p));
        for i in 1..=2 {
            let mut x = p.clone();
            for _ in 0..3 {
                x = braid_generator(&x, i + 1).and_then(|y| braid_generator(&y, i)).unwrap_or_else(|_| p.clone());
            }
            ok &= x == p;
        }
        braids += ok as usize;
    }
    Outcome {
        pass: ny == 100 && rec == 50 && diag == 50 && ty == 6 && bk == bk_total && braids == 10,
        detail: format!(
            "NY {ny}/100, recursion {rec}/50, diagonal product {diag}/50, type {ty}/6, BK {bk}/{bk_total}, braids n=4 {braids}/10"
        ),
    }
}

fn whittaker_identities() -> Outcome {
    let quad = QuadratureSpec::with_tol(1e-12);
    let mut bessel = 0.0f64;
    for a in [0.0, 0.25, 0.5, 0.9, 1.3] {
        for y in [0.1, 0.2, 0.4, 0.7, 1.0] {
            bessel = bessel.max(bessel_relation_error(a, y, &quad).unwrap_or(f64::INFINITY));
        }
    }
    let mut pass = bessel <= 1e-8;
    let mut detail = format!("Bessel max {bessel:.1e}");
    let mut g = rng(5);
    for (label, kind, dim, tol) in [
        ("square n=2", StadeKind::Square, 2, 1e-5),
        ("square n=3", StadeKind::Square, 3, 1e-3),
        ("rect m=2 n=3", StadeKind::Rectangular, 2, 1e-4),
        ("bf n=2", StadeKind::BumpFriedberg, 2, 1e-3),
        ("bf n=3", StadeKind::BumpFriedberg, 3, 1e-3),
    ] {
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let p = random_stade_params(kind, dim, &mut g);
            let e = stade_identity_check(kind, &p, &QuadratureSpec::default()).map_or(f64::INFINITY, |r| r.rel_error);
            worst = worst.max(e);
        }
        pass &= worst <= tol;
        detail += &format!(", {label} max {worst:.1e}");
    }
    Outcome { pass, detail }
}

fn tropicalization() -> Outcome {
    let mut g = rng(6);
    let mut limit = 0;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let y = RealMatrix::from_fn(3, 3, |_, _| g.random_range(-5..=5) as f64);
        if let Ok(r) = tropicalization_limit_check(&y, &[1e-1, 1e-2, 1e-3]) {
            worst = worst.max(r.max_err[2]);
            limit += (r.decreasing && r.max_err[2] < 0.05) as usize;
        }
    }
    let (mut nonneg, mut negative) = (0, 0);
    for _ in 0..500 {
        let (n, m) = (g.random_range(1..=4), g.random_range(1..=4));
        let y = RealMatrix::from_fn(n, m, |_, _| random_rational(&mut g, 9) - rat(1, 9));
        nonneg += gt_membership_check(&y) as usize;
        let mut z = y.clone();
        let (i, j) = (g.random_range(1..=n), g.random_range(1..=m));
        z.set(i, j, -random_rational(&mut g, 9));
        negative += !gt_membership_check(&z) as usize;
    }
    Outcome {
        pass: limit == 20 && nonneg == 500 && negative == 500,
        detail: format!(
            "limit {limit}/20 (max err at 1e-3 {worst:.1e}), GT for Y >= 0 {nonneg}/500, not GT with a negative entry {negative}/500"
        ),
    }
}

fn epsilon_embedding() -> Outcome {
    let mut g = rng(7);
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let (mut ok, mut total) = (0, 0);
    let mut worst_ratio = 0.0f64;
    for n in 2..=4 {
        for _ in 0..20 {
            total += 1;
            let w = TriangularArray::from_fn(n, |_, _| g.random_range(0.5..2.0));
            let Ok(r) = epsilon_embedding_check(&w, &eps) else { continue };
            // Errors below round-off (n = 2 is exact) are not compared.
            let good = r.max_rel_err.windows(2).all(|e| {
                if e[1] < 1e-11 {
                    return true;
                }
                worst_ratio = worst_ratio.max(e[1] / e[0]);
                e[1] < 0.2 * e[0]
            });
            ok += (good && r.passed) as usize;
        }
    }
    Outcome {
        pass: ok == total,
        detail: format!("{ok}/{total} arrays, worst error ratio per decade {worst_ratio:.3}"),
    }
}

fn pushforwards() -> Outcome {
    const N: usize = 100_000;
    let mut params = vec![
        MeasureParams::Rect { theta_hat: vec![1.0, 2.0], theta: vec![0.5, 1.5], s: 1.0 },
        MeasureParams::Sym { alpha: vec![1.0, 2.0], zeta: 0.5 },
        MeasureParams::Tri { alpha: vec![0.8, 1.2, 1.0] },
    ];
    let mut g = rng(8);
    for model in ["rect", "sym", "tri"] {
        for _ in 0..3 {
            params.push(random_measure_params(model, &mut g).expect("valid model"));
        }
    }
    let mut pass = true;
    let mut worst_z = 0.0f64;
    let mut min_probes = usize::MAX;
    for (k, p) in params.iter().enumerate() {
        match pushforward_check(p, N, 100 + k as u64) {
            Ok(r) => {
                pass &= r.pass && r.probes.len() >= 6;
                min_probes = min_probes.min(r.probes.len());
                worst_z = r.probes.iter().map(|q| q.z.abs()).fold(worst_z, f64::max);
            }
            Err(_) => pass = false,
        }
    }
    let mut min_p = 1.0f64;
    for alpha in [vec![1.0, 1.5], vec![1.0, 1.5, 2.0], vec![0.8, 1.3, 1.0, 1.7]] {
        match z1_symmetric_equivalence(&alpha, N, 200 + alpha.len() as u64) {
            Ok(r) => {
                pass &= r.pass;
                min_p = min_p.min(r.ks.map_or(0.0, |k| k.p_value));
            }
            Err(_) => pass = false,
        }
    }
    let lag = laguerre_marginal_check(&[1.0, 2.0], &[1.0, 3.0], N, &mut rng(9));
    let ks = lag.map_or(f64::INFINITY, |r| r.ks_distance);
    pass &= ks < 0.01;
    Outcome {
        pass,
        detail: format!(
            "{} push-forward runs, >= {min_probes} probes, max |z| {worst_z:.2}; z1 min KS p {min_p:.3}; Laguerre KS {ks:.4}",
            params.len()
        ),
    }
}

#[test]
fn acceptance() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        run(1, "exact fundamental identity", Duration::from_secs(30), fundamental_identity),
        run(2, "exact volume preservation", min(5), volume_preservation),
        run(3, "exact path identities", min(2), path_identities),
        run(4, "exact structural equivalences", min(5), structural_equivalences),
        run(5, "Whittaker identities", min(10), whittaker_identities),
        run(6, "tropicalization", min(5), tropicalization),
        run(7, "epsilon embedding", min(5), epsilon_embedding),
        run(8, "push-forward laws by Monte Carlo", min(15), pushforwards),
    ];
    let failed: Vec<usize> = (1..=8).filter(|i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
