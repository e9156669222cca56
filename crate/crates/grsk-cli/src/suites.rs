//! Verification suites behind `grsk verify`.

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use grsk::exact_numerics::{rat, random_rational, to_f64, PosRational};
use grsk::grsk_core::{
    apply_grsk, check_fundamental_identity, check_t11_identity, grsk_moves, invert_grsk, local_move,
    log_jacobian_det, noumi_yamada, path_partition_oracle, path_product_from_output, patterns_from_matrix,
    random_matrix, transpose_symmetry_check, JacobianMap,
};
use grsk::grsk_symmetric::{
    apply_grsk_symmetric, apply_grsk_symmetric_recursive, diagonal_product_identity, log_jacobian_det_symmetric,
};
use grsk::grsk_triangular::{
    check_shape_ratios, check_triangular_identity, epsilon_embedding_check, log_jacobian_det_triangular,
};
use grsk::polymer_mc::{pushforward_check, random_measure_params, z1_symmetric_equivalence};
use grsk::tropical_rsk::{
    apply_tropical, gt_membership_check, invert_tropical, last_passage_oracle, tropical_path_sum,
    tropicalization_limit_check, RealMatrix,
};
use grsk::whittaker_eval::{
    bessel_relation_error, elementary_identity_checks, random_stade_params, stade_identity_check, QuadratureSpec,
    StadeKind,
};
use grsk::{Result, SymmetricWeightMatrix, TriangularArray, WeightMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Sym,
    Tri,
    Tropical,
    Whittaker,
    Polymer,
}

pub struct Options {
    pub seed: u64,
    pub trials: usize,
    pub tol: Option<f64>,
    pub samples: usize,
    /// Replace `T` by a map with one corrupted local move.
    pub corrupt: bool,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn human(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s += &format!("{} {} {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        s += &format!(
            "{:?} suite: {} checks, {} failed: {}\n",
            self.suite,
            self.checks.len(),
            failed,
            if self.pass { "PASS" } else { "FAIL" }
        );
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,pass,detail\n");
        for c in &self.checks {
            s += &format!("{},{},\"{}\"\n", c.name, c.pass, c.detail.replace('"', "'"));
        }
        s
    }
}

/// Collects per-check counts over trials.
struct Tally {
    checks: Vec<Check>,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: Vec::new() }
    }

    /// Records `ok` out of `total`; a trial that returned an error counts as failed.
    fn count(&mut self, name: &str, ok: usize, total: usize, extra: &str) {
        let mut detail = format!("{ok}/{total}");
        if !extra.is_empty() {
            detail += " ";
            detail += extra;
        }
        self.checks.push(Check { name: name.into(), pass: ok == total && total > 0, detail });
    }

    fn one(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { name: name.into(), pass, detail });
    }

    fn error(&mut self, name: &str, e: grsk::GrskError) {
        self.checks.push(Check { name: name.into(), pass: false, detail: format!("error: {e}") });
    }
}

fn ok_or_false(r: Result<bool>) -> bool {
    r.unwrap_or(false)
}

fn unimodular(d: Result<PosRational>) -> bool {
    matches!(d, Ok(v) if v == rat(1, 1) || v == rat(-1, 1))
}

pub fn run(suite: Suite, o: &Options) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut t = Tally::new();
    match suite {
        Suite::Core => core(o, &mut rng, &mut t),
        Suite::Sym => sym(o, &mut rng, &mut t),
        Suite::Tri => tri(o, &mut rng, &mut t),
        Suite::Tropical => tropical(o, &mut rng, &mut t),
        Suite::Whittaker => whittaker(o, &mut rng, &mut t),
        Suite::Polymer => polymer(o, &mut rng, &mut t),
    }
    let pass = !t.checks.is_empty() && t.checks.iter().all(|c| c.pass);
    SuiteReport { suite, seed: o.seed, trials: o.trials, checks: t.checks, pass }
}

/// `T` through the local moves, with the last move's output entry doubled when `corrupt`.
fn grsk_under_test(w: &WeightMatrix<PosRational>, corrupt: bool) -> Result<WeightMatrix<PosRational>> {
    let moves = grsk_moves(w.rows(), w.cols());
    let mut x = w.clone();
    for (k, &(i, j)) in moves.iter().enumerate() {
        x = local_move(&x, i, j)?;
        if corrupt && k + 1 == moves.len() {
            let v = x.get(i, j).clone() * rat(2, 1);
            x.set(i, j, v);
        }
    }
    Ok(x)
}

fn core(o: &Options, rng: &mut ChaCha8Rng, t: &mut Tally) {
    let mut round = 0;
    let mut agree = 0;
    let mut energy = 0;
    let mut t11 = 0;
    let mut paths = 0;
    let mut ny = 0;
    let mut transpose = 0;
    let mut jac = 0;
    for _ in 0..o.trials {
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let w = random_matrix(rng, n, m, 9);
        let out = match grsk_under_test(&w, o.corrupt) {
            Ok(x) => x,
            Err(_) => continue,
        };
        if invert_grsk(&out).is_ok_and(|back| back == w) {
            round += 1;
        }
        if out == apply_grsk(&w) {
            agree += 1;
        }
        let s = random_rational(rng, 9);
        if check_fundamental_identity(&w, &s) {
            energy += 1;
        }
        if check_t11_identity(&w) {
            t11 += 1;
        }
        let all_paths = (1..=m).all(|k| {
            (1..=n.min(k)).all(|r| path_partition_oracle(&w, k, r).is_ok_and(|v| v == path_product_from_output(&out, k, r)))
        });
        if all_paths {
            paths += 1;
        }
        if noumi_yamada(&w).is_ok_and(|pq| pq == patterns_from_matrix(&out)) {
            ny += 1;
        }
        if transpose_symmetry_check(&w) {
            transpose += 1;
        }
        if unimodular(log_jacobian_det(JacobianMap::Grsk, &w)) {
            jac += 1;
        }
    }
    let n = o.trials;
    t.count("inverse-round-trip", round, n, "");
    t.count("local-moves-match-library", agree, n, "");
    t.count("energy-identity", energy, n, "");
    t.count("t11-identity", t11, n, "");
    t.count("path-partition-functions", paths, n, "");
    t.count("noumi-yamada", ny, n, "");
    t.count("transpose-symmetry", transpose, n, "");
    t.count("jacobian-unimodular", jac, n, "");
}

fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymmetricWeightMatrix<PosRational> {
    SymmetricWeightMatrix::from_fn(n, |_, _| random_rational(rng, 9))
}

fn random_tri(rng: &mut ChaCha8Rng, n: usize) -> TriangularArray<PosRational> {
    TriangularArray::from_fn(n, |_, _| random_rational(rng, 9))
}

fn sym(o: &Options, rng: &mut ChaCha8Rng, t: &mut Tally) {
    let (mut restrict, mut recursive, mut diag, mut jac) = (0, 0, 0, 0);
    for _ in 0..o.trials {
        let n = rng.random_range(1..=5);
        let w = random_sym(rng, n);
        let out = apply_grsk_symmetric(&w);
        if out.to_full() == apply_grsk(&w.to_full()) {
            restrict += 1;
        }
        if apply_grsk_symmetric_recursive(&w).is_ok_and(|r| r == out) {
            recursive += 1;
        }
        if diagonal_product_identity(&w) {
            diag += 1;
        }
        if w.n() <= 4 && unimodular(log_jacobian_det_symmetric(&w)) || w.n() > 4 {
            jac += 1;
        }
    }
    t.count("restriction-of-T", restrict, o.trials, "");
    t.count("recursive-construction", recursive, o.trials, "");
    t.count("diagonal-product-identity", diag, o.trials, "");
    t.count("jacobian-unimodular", jac, o.trials, "(n <= 4)");
}

fn tri(o: &Options, rng: &mut ChaCha8Rng, t: &mut Tally) {
    let (mut energy, mut ratios, mut jac, mut eps) = (0, 0, 0, 0);
    let eps_list = [1e-1, 1e-2, 1e-3, 1e-4];
    for _ in 0..o.trials {
        let n = rng.random_range(2..=5);
        let w = random_tri(rng, n);
        if check_triangular_identity(&w) {
            energy += 1;
        }
        if ok_or_false(check_shape_ratios(&w)) {
            ratios += 1;
        }
        if n <= 4 && unimodular(log_jacobian_det_triangular(&w)) || n > 4 {
            jac += 1;
        }
        let wf = TriangularArray::from_fn(n, |i, j| to_f64(w.get(i, j)));
        if n > 4 || epsilon_embedding_check(&wf, &eps_list).is_ok_and(|r| r.passed) {
            eps += 1;
        }
    }
    t.count("energy-identity", energy, o.trials, "");
    t.count("shape-ratios", ratios, o.trials, "");
    t.count("jacobian-unimodular", jac, o.trials, "(n <= 4)");
    t.count("epsilon-embedding", eps, o.trials, "(n <= 4)");
}

fn tropical(o: &Options, rng: &mut ChaCha8Rng, t: &mut Tally) {
    let (mut round, mut lpp, mut gt, mut limit) = (0, 0, 0, 0);
    let mut worst = 0.0f64;
    for trial in 0..o.trials {
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
        // Alternate sign classes: nonnegative, or with one negative entry.
        let mut y = RealMatrix::from_fn(n, m, |_, _| random_rational(rng, 9) - rat(1, 9));
        let negative = trial % 2 == 1;
        if negative {
            let (i, j) = (rng.random_range(1..=n), rng.random_range(1..=m));
            y.set(i, j, -random_rational(rng, 9));
        }
        let u = apply_tropical(&y);
        if invert_tropical(&u) == y {
            round += 1;
        }
        let ok = (1..=m).all(|k| {
            (1..=n.min(k)).all(|r| last_passage_oracle(&y, k, r).is_ok_and(|v| v == tropical_path_sum(&u, k, r)))
        });
        if ok {
            lpp += 1;
        }
        if gt_membership_check(&y) != negative {
            gt += 1;
        }
        let yf = y.map(to_f64);
        match tropicalization_limit_check(&yf, &[1e-1, 1e-2, 1e-3]) {
            Ok(r) if r.decreasing => {
                worst = worst.max(r.max_err[2]);
                limit += 1;
            }
            _ => {}
        }
    }
    t.count("inverse-round-trip", round, o.trials, "");
    t.count("last-passage-greene", lpp, o.trials, "");
    t.count("gelfand-tsetlin-iff-nonnegative", gt, o.trials, "");
    t.count("tropicalization-limit", limit, o.trials, &format!("max err at 1e-3: {worst:.2e}"));
}

fn whittaker(o: &Options, rng: &mut ChaCha8Rng, t: &mut Tally) {
    let quad = QuadratureSpec::with_tol(1e-12);
    let mut worst = 0.0f64;
    let mut failed = None;
    for a in [0.0, 0.25, 0.5, 0.9, 1.3] {
        for y in [0.1, 0.2, 0.4, 0.7, 1.0] {
            match bessel_relation_error(a, y, &quad) {
                Ok(e) => worst = worst.max(e),
                Err(e) => failed = Some(e),
            }
        }
    }
    match failed {
        Some(e) => t.error("bessel-relation", e),
        None => t.one("bessel-relation", worst < 1e-8, format!("max rel err {worst:.2e}")),
    }

    let lambda: Vec<Complex64> = vec![Complex64::new(0.3, 0.2), Complex64::new(-0.1, -0.4)];
    match elementary_identity_checks(&lambda, &[1.2, 0.5], 2.0, Complex64::new(0.25, 0.1), &QuadratureSpec::default()) {
        Ok(r) => t.one(
            "elementary-identities",
            r.pass,
            format!(
                "homogeneity {:.1e}, shift {:.1e}, reflection {:.1e}",
                r.homogeneity_rel_err, r.shift_rel_err, r.reflection_rel_err
            ),
        ),
        Err(e) => t.error("elementary-identities", e),
    }

    for (name, kind, dim) in [
        ("square-n2", StadeKind::Square, 2),
        ("rectangular-m2", StadeKind::Rectangular, 2),
        ("bump-friedberg-n2", StadeKind::BumpFriedberg, 2),
    ] {
        let mut ok = 0;
        let mut worst = 0.0f64;
        let mut err = None;
        for _ in 0..o.trials {
            let p = random_stade_params(kind, dim, rng);
            match stade_identity_check(kind, &p, &QuadratureSpec::default()) {
                Ok(r) => {
                    worst = worst.max(r.rel_error);
                    if r.rel_error <= o.tol.unwrap_or(r.tolerance) {
                        ok += 1;
                    }
                }
                Err(e) => err = Some(e),
            }
        }
        match err {
            Some(e) => t.error(name, e),
            None => t.count(name, ok, o.trials, &format!("max rel err {worst:.2e}")),
        }
    }
}

fn polymer(o: &Options, rng: &mut ChaCha8Rng, t: &mut Tally) {
    for model in ["rect", "sym", "tri"] {
        let name = format!("pushforward-{model}");
        let r = random_measure_params(model, rng).and_then(|p| pushforward_check(&p, o.samples, o.seed));
        match r {
            Ok(r) => {
                let worst = r.probes.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
                t.one(&name, r.pass, format!("{} probes, max |z| {worst:.2}", r.probes.len()));
            }
            Err(e) => t.error(&name, e),
        }
    }
    let alpha: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..2.0)).collect();
    match z1_symmetric_equivalence(&alpha, o.samples, o.seed) {
        Ok(r) => {
            let detail = r.ks.as_ref().map(|k| format!("KS p-value {:.3}", k.p_value)).unwrap_or_default();
            t.one("z1-symmetric-equivalence", r.pass, detail);
        }
        Err(e) => t.error("z1-symmetric-equivalence", e),
    }
}
