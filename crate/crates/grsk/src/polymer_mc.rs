//! Samplers for the inverse-gamma weight measures and Monte Carlo checks of
//! the shape laws they induce under gRSK.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrskError, Result};
use crate::grsk_core::{apply_grsk, WeightMatrix};
use crate::grsk_symmetric::{apply_grsk_symmetric_recursive, SymmetricWeightMatrix};
use crate::grsk_triangular::{apply_grsk_triangular, TriangularArray};
use crate::whittaker_eval::{gamma, psi2_grid, Grid};

/// Parameters of one weight measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum MeasureParams {
    Rect { theta_hat: Vec<f64>, theta: Vec<f64>, s: f64 },
    Sym { alpha: Vec<f64>, zeta: f64 },
    Tri { alpha: Vec<f64> },
}

fn usage<T>(msg: String) -> Result<T> {
    Err(GrskError::Usage(msg))
}

impl MeasureParams {
    pub fn validate(&self) -> Result<()> {
        let pairs_ok = |a: &[f64]| {
            (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] + a[j] > 0.0))
        };
        match self {
            MeasureParams::Rect { theta_hat, theta, s } => {
                if theta_hat.is_empty() || theta.is_empty() {
                    return usage("rect needs nonempty theta_hat and theta".into());
                }
                if !(*s > 0.0) {
                    return usage(format!("rect needs s > 0, got {s}"));
                }
                if theta_hat.iter().any(|a| theta.iter().any(|b| !(a + b > 0.0))) {
                    return usage("rect needs theta_hat_i + theta_j > 0".into());
                }
            }
            MeasureParams::Sym { alpha, zeta } => {
                if alpha.is_empty() {
                    return usage("sym needs a nonempty alpha".into());
                }
                if alpha.iter().any(|a| !(a + zeta > 0.0)) || !pairs_ok(alpha) {
                    return usage("sym needs alpha_i + zeta > 0 and alpha_i + alpha_j > 0".into());
                }
            }
            MeasureParams::Tri { alpha } => {
                if alpha.len() < 2 {
                    return usage("tri needs alpha of length >= 2".into());
                }
                if !pairs_ok(alpha) {
                    return usage("tri needs alpha_i + alpha_j > 0".into());
                }
            }
        }
        Ok(())
    }

    /// Smallest gamma shape among the weights.
    pub fn min_shape(&self) -> f64 {
        let mut m = f64::INFINITY;
        match self {
            MeasureParams::Rect { theta_hat, theta, .. } => {
                for a in theta_hat {
                    for b in theta {
                        m = m.min(a + b);
                    }
                }
            }
            MeasureParams::Sym { alpha, zeta } => {
                for (i, a) in alpha.iter().enumerate() {
                    m = m.min(a + zeta);
                    for b in &alpha[i + 1..] {
                        m = m.min(a + b);
                    }
                }
            }
            MeasureParams::Tri { alpha } => {
                for (i, a) in alpha.iter().enumerate() {
                    for b in &alpha[i + 1..] {
                        m = m.min(a + b);
                    }
                }
            }
        }
        m
    }
}

/// Admissible draw at the sizes the push-forward checks use (`2×2`, `2`, `3`).
pub fn random_measure_params<R: Rng + ?Sized>(model: &str, rng: &mut R) -> Result<MeasureParams> {
    let mut v = |k: usize| (0..k).map(|_| rng.random_range(0.5..2.0)).collect::<Vec<f64>>();
    Ok(match model {
        "rect" => {
            let (theta_hat, theta) = (v(2), v(2));
            MeasureParams::Rect { theta_hat, theta, s: rng.random_range(0.5..2.0) }
        }
        "sym" => {
            let alpha = v(2);
            MeasureParams::Sym { alpha, zeta: rng.random_range(0.3..1.5) }
        }
        "tri" => MeasureParams::Tri { alpha: v(3) },
        _ => return usage(format!("unknown model {model:?}")),
    })
}

fn gamma_dist(shape: f64) -> Gamma<f64> {
    Gamma::new(shape, 1.0).expect("validated shape")
}

/// `1/w_ij ~ Gamma(θ̂_i + θ_j)`, divided by `s` on the anti-diagonal `j = p − i + 1`.
pub fn sample_rect<R: Rng + ?Sized>(params: &MeasureParams, rng: &mut R) -> Result<WeightMatrix<f64>> {
    params.validate()?;
    let MeasureParams::Rect { theta_hat, theta, s } = params else {
        return usage("sample_rect needs rect parameters".into());
    };
    let (n, m) = (theta_hat.len(), theta.len());
    let p = n.min(m);
    Ok(WeightMatrix::from_fn(n, m, |i, j| {
        let g = gamma_dist(theta_hat[i - 1] + theta[j - 1]).sample(rng);
        if i <= p && j == p - i + 1 {
            s / g
        } else {
            1.0 / g
        }
    }))
}

/// `1/w_ij ~ Gamma(α_i + α_j)` for `i < j`, `1/w_ii = 2·Gamma(α_i + ζ)`.
pub fn sample_sym<R: Rng + ?Sized>(
    params: &MeasureParams,
    rng: &mut R,
) -> Result<SymmetricWeightMatrix<f64>> {
    params.validate()?;
    let MeasureParams::Sym { alpha, zeta } = params else {
        return usage("sample_sym needs sym parameters".into());
    };
    Ok(SymmetricWeightMatrix::from_fn(alpha.len(), |i, j| {
        if i == j {
            1.0 / (2.0 * gamma_dist(alpha[i - 1] + zeta).sample(rng))
        } else {
            1.0 / gamma_dist(alpha[i - 1] + alpha[j - 1]).sample(rng)
        }
    }))
}

/// `1/w_ij ~ Gamma(α_i + α_j)` for `j < i`.
pub fn sample_tri<R: Rng + ?Sized>(params: &MeasureParams, rng: &mut R) -> Result<TriangularArray<f64>> {
    params.validate()?;
    let MeasureParams::Tri { alpha } = params else {
        return usage("sample_tri needs tri parameters".into());
    };
    Ok(TriangularArray::from_fn(alpha.len(), |i, j| {
        1.0 / gamma_dist(alpha[i - 1] + alpha[j - 1]).sample(rng)
    }))
}

// ---------------------------------------------------------------------------
// Parallel sampling

/// Work is split into this many chunks whatever the thread count, so
/// results depend only on `(seed, samples)`.
const CHUNKS: u64 = 64;

/// Runs `f(rng, count)` on each chunk with stream `chunk` of `seed`, in chunk order.
pub fn run_chunks<T: Send>(
    seed: u64,
    samples: usize,
    f: impl Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let base = samples / CHUNKS as usize;
            let count = base + usize::from((c as usize) < samples % CHUNKS as usize);
            f(&mut rng, count)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub probe: String,
    pub estimate: f64,
    pub stderr: f64,
    pub reference: f64,
    /// Quadrature error of the reference.
    pub reference_error: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub params: Option<MeasureParams>,
    pub probes: Vec<ProbeResult>,
    pub ks: Option<KsResult>,
    pub pass: bool,
}

impl McReport {
    /// `probe,estimate,stderr,reference,z` rows; KS results use the
    /// statistic as estimate and the p-value as reference.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe,estimate,stderr,reference,z\n");
        for p in &self.probes {
            out += &format!("{},{:.16e},{:.16e},{:.16e},{:.16e}\n", p.probe, p.estimate, p.stderr, p.reference, p.z);
        }
        if let Some(k) = &self.ks {
            out += &format!("ks,{:.16e},,{:.16e},\n", k.statistic, k.p_value);
        }
        out
    }
}

pub const Z_THRESHOLD: f64 = 3.5;
pub const KS_P_THRESHOLD: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Push-forward checks

#[derive(Clone, Copy, Debug, PartialEq)]
enum Probe {
    /// `x₁^{−u} x₂^{−v}`.
    Moment(f64, f64),
    /// `e^{−r x₁}`.
    Laplace(f64),
}

impl Probe {
    fn eval(&self, x1: f64, x2: f64) -> f64 {
        match *self {
            Probe::Moment(u, v) => x1.powf(-u) * x2.powf(-v),
            Probe::Laplace(r) => (-r * x1).exp(),
        }
    }
    fn label(&self) -> String {
        match *self {
            Probe::Moment(u, v) if u == 0.0 && v == 0.0 => "norm".into(),
            Probe::Moment(u, v) => format!("x1^-{u:.3} x2^-{v:.3}"),
            Probe::Laplace(r) => format!("exp(-{r:.3} x1)"),
        }
    }
}

fn ln_gamma(x: f64) -> f64 {
    gamma(num_complex::Complex64::new(x, 0.0)).re.ln()
}

/// Log density of the shape vector `(x₁, x₂)` on the log grid, with respect to `du₁ du₂`.
fn shape_log_density(params: &MeasureParams, g: &Grid) -> Result<Vec<f64>> {
    let n = g.n;
    let mut out = vec![f64::NEG_INFINITY; n * n];
    let fill = |out: &mut Vec<f64>, psi: &[f64], extra: &dyn Fn(f64, f64) -> f64, log_z: f64| {
        for a in 0..n {
            for b in 0..n {
                let w = psi[a * n + b];
                if w > 0.0 {
                    out[a * n + b] = w.ln() + extra(g.u(a), g.u(b)) - log_z;
                }
            }
        }
    };
    match params {
        MeasureParams::Rect { theta_hat, theta, s } => {
            if theta_hat.len() != 2 || theta.len() != 2 {
                return usage("rect push-forward check runs at n = m = 2".into());
            }
            // Ψ_θ Ψ_{θ̂;s} / Z, Z = s^{−Σ(θ̂_i + θ_{3−i})} Π Γ(θ̂_i + θ_j).
            let pa = psi2_grid(theta, g)?;
            let pb = psi2_grid(theta_hat, g)?;
            let prod: Vec<f64> = pa.iter().zip(&pb).map(|(a, b)| a * b).collect();
            let mut log_z = -s.ln() * (theta_hat[0] + theta[1] + theta_hat[1] + theta[0]);
            for a in theta_hat {
                for b in theta {
                    log_z += ln_gamma(a + b);
                }
            }
            fill(&mut out, &prod, &|_, u2| -s * (-u2).exp(), log_z);
        }
        MeasureParams::Sym { alpha, zeta } => {
            if alpha.len() != 2 {
                return usage("sym push-forward check runs at n = 2".into());
            }
            // 4^ζ f(x)^ζ e^{−1/(2x₂)} Ψ_α / Z, f(x) = x₂/x₁.
            let p = psi2_grid(alpha, g)?;
            let mut log_z = alpha.iter().map(|a| a + zeta).sum::<f64>() * 2f64.ln()
                + ln_gamma(alpha[0] + zeta)
                + ln_gamma(alpha[1] + zeta)
                + ln_gamma(alpha[0] + alpha[1]);
            log_z -= zeta * 4f64.ln();
            fill(&mut out, &p, &|u1, u2| zeta * (u2 - u1) - 0.5 * (-u2).exp(), log_z);
        }
        MeasureParams::Tri { alpha } => {
            if alpha.len() != 3 {
                return usage("tri push-forward check runs at n = 3".into());
            }
            // (t₂₁/t₃₂)^{α₃} e^{−1/t₂₁} Ψ²_{α₁,α₂}(t₃₂, t₂₁) / Π Γ(α_i + α_j).
            let p = psi2_grid(&alpha[..2], g)?;
            let log_z = ln_gamma(alpha[0] + alpha[1])
                + ln_gamma(alpha[0] + alpha[2])
                + ln_gamma(alpha[1] + alpha[2]);
            fill(&mut out, &p, &|u1, u2| alpha[2] * (u2 - u1) - (-u2).exp(), log_z);
        }
    }
    Ok(out)
}

fn grid_expectation(params: &MeasureParams, probes: &[Probe], g: &Grid) -> Result<Vec<f64>> {
    let dens = shape_log_density(params, g)?;
    let n = g.n;
    let mut acc = vec![0.0; probes.len()];
    for a in 0..n {
        for b in 0..n {
            let d = dens[a * n + b];
            if d == f64::NEG_INFINITY {
                continue;
            }
            let (x1, x2) = (g.u(a).exp(), g.u(b).exp());
            for (k, p) in probes.iter().enumerate() {
                acc[k] += (d + p.eval(x1, x2).ln()).exp();
            }
        }
    }
    Ok(acc.into_iter().map(|v| v * g.h * g.h).collect())
}

/// Reference expectations and their error estimates (grid step halving).
fn reference_values(params: &MeasureParams, probes: &[Probe]) -> Result<Vec<(f64, f64)>> {
    let g = Grid::new(-20.0, 60.0, 0.1);
    let fine = grid_expectation(params, probes, &g)?;
    let coarse = grid_expectation(params, probes, &g.coarse())?;
    Ok(fine.into_iter().zip(coarse).map(|(f, c)| (f, (f - c).abs())).collect())
}

/// Shape vector `(x₁, x₂)` of one sample.
fn sample_shape<R: Rng + ?Sized>(params: &MeasureParams, rng: &mut R) -> Result<(f64, f64)> {
    Ok(match params {
        MeasureParams::Rect { .. } => {
            let t = apply_grsk(&sample_rect(params, rng)?);
            (*t.get(2, 2), *t.get(1, 1))
        }
        MeasureParams::Sym { .. } => {
            let t = apply_grsk_symmetric_recursive(&sample_sym(params, rng)?)?;
            (*t.get(2, 2), *t.get(1, 1))
        }
        MeasureParams::Tri { .. } => {
            let t = apply_grsk_triangular(&sample_tri(params, rng)?);
            (*t.get(3, 2), *t.get(2, 1))
        }
    })
}

fn default_probes(params: &MeasureParams) -> Vec<Probe> {
    let a = 0.2 * params.min_shape().min(2.0);
    let mut p = vec![
        Probe::Moment(0.0, 0.0),
        Probe::Moment(a, 0.0),
        Probe::Moment(0.0, a),
        Probe::Moment(a, a),
        Probe::Moment(2.0 * a, 0.0),
        Probe::Moment(0.0, 2.0 * a),
        Probe::Moment(2.0 * a, a),
    ];
    if matches!(params, MeasureParams::Sym { .. }) {
        p.extend([Probe::Laplace(0.5), Probe::Laplace(1.0), Probe::Laplace(2.0)]);
    }
    p
}

/// Empirical probe means of the shape vector against quadrature of the
/// push-forward density (rect at `n = m = 2`, sym at `n = 2`, tri at `n = 3`).
pub fn pushforward_check(params: &MeasureParams, samples: usize, seed: u64) -> Result<McReport> {
    params.validate()?;
    if samples < 2 {
        return usage("need at least 2 samples".into());
    }
    let probes = default_probes(params);
    let refs = reference_values(params, &probes)?;
    let k = probes.len();
    let chunks = run_chunks(seed, samples, |rng, count| {
        let mut s = vec![0.0; 2 * k];
        for _ in 0..count {
            let (x1, x2) = sample_shape(params, rng)?;
            for (i, p) in probes.iter().enumerate() {
                let v = p.eval(x1, x2);
                s[i] += v;
                s[k + i] += v * v;
            }
        }
        Ok(s)
    })?;
    let mut tot = vec![0.0; 2 * k];
    for c in &chunks {
        for (t, v) in tot.iter_mut().zip(c) {
            *t += v;
        }
    }
    let nf = samples as f64;
    let results: Vec<ProbeResult> = probes
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mean = tot[i] / nf;
            let var = ((tot[k + i] / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
            let stderr = (var / nf).sqrt();
            let (reference, reference_error) = refs[i];
            let scale = (stderr * stderr + reference_error * reference_error).sqrt().max(1e-12);
            let z = (mean - reference) / scale;
            ProbeResult {
                probe: p.label(),
                estimate: mean,
                stderr,
                reference,
                reference_error,
                z,
                pass: z.abs() <= Z_THRESHOLD,
            }
        })
        .collect();
    let name = match params {
        MeasureParams::Rect { .. } => "pushforward-rect",
        MeasureParams::Sym { .. } => "pushforward-sym",
        MeasureParams::Tri { .. } => "pushforward-tri",
    };
    Ok(McReport {
        name: name.into(),
        seed,
        samples,
        params: Some(params.clone()),
        pass: results.iter().all(|r| r.pass),
        probes: results,
        ks: None,
    })
}

// ---------------------------------------------------------------------------
// Kolmogorov–Smirnov

/// Asymptotic Kolmogorov tail `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let t = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample KS statistic and asymptotic p-value; the inputs are sorted in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> (f64, f64) {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    (d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d))
}

/// `z₁ = t_{n,n−1}` under triangular weights against `2 t_{n−1,n−1}` under
/// symmetric `(n−1)×(n−1)` weights with `ζ = α_n`.
pub fn z1_symmetric_equivalence(alpha: &[f64], samples: usize, seed: u64) -> Result<McReport> {
    let n = alpha.len();
    let tri = MeasureParams::Tri { alpha: alpha.to_vec() };
    tri.validate()?;
    let sym = MeasureParams::Sym { alpha: alpha[..n - 1].to_vec(), zeta: alpha[n - 1] };
    sym.validate()?;
    let draws = run_chunks(seed, samples, |rng, count| {
        let mut a = Vec::with_capacity(count);
        let mut b = Vec::with_capacity(count);
        for _ in 0..count {
            a.push(*apply_grsk_triangular(&sample_tri(&tri, rng)?).get(n, n - 1));
            let t = apply_grsk_symmetric_recursive(&sample_sym(&sym, rng)?)?;
            b.push(2.0 * *t.get(n - 1, n - 1));
        }
        Ok((a, b))
    })?;
    let (mut a, mut b): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for (x, y) in draws {
        a.extend(x);
        b.extend(y);
    }
    let (statistic, p_value) = ks_two_sample(&mut a, &mut b);
    let pass = p_value > KS_P_THRESHOLD;
    Ok(McReport {
        name: format!("z1-vs-2t (n = {n})"),
        seed,
        samples,
        params: Some(tri),
        probes: Vec::new(),
        ks: Some(KsResult { statistic, p_value, threshold: KS_P_THRESHOLD, pass }),
        pass,
    })
}

/// Sample means of the reciprocal weights against their gamma means, `|z| ≤ 3.5`.
pub fn sampler_mean_check(params: &MeasureParams, samples: usize, seed: u64) -> Result<McReport> {
    params.validate()?;
    let (cells, expected): (Vec<(usize, usize)>, Vec<f64>) = match params {
        MeasureParams::Rect { theta_hat, theta, s } => {
            let p = theta_hat.len().min(theta.len());
            (1..=theta_hat.len())
                .flat_map(|i| (1..=theta.len()).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let m = theta_hat[i - 1] + theta[j - 1];
                    ((i, j), if i <= p && j == p - i + 1 { m / s } else { m })
                })
                .unzip()
        }
        MeasureParams::Sym { alpha, zeta } => (1..=alpha.len())
            .flat_map(|i| (i..=alpha.len()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let m = if i == j { 2.0 * (alpha[i - 1] + zeta) } else { alpha[i - 1] + alpha[j - 1] };
                ((i, j), m)
            })
            .unzip(),
        MeasureParams::Tri { alpha } => (2..=alpha.len())
            .flat_map(|i| (1..i).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), alpha[i - 1] + alpha[j - 1]))
            .unzip(),
    };
    let k = cells.len();
    let chunks = run_chunks(seed, samples, |rng, count| {
        let mut s = vec![0.0; 2 * k];
        for _ in 0..count {
            let get: Box<dyn Fn(usize, usize) -> f64> = match params {
                MeasureParams::Rect { .. } => {
                    let w = sample_rect(params, rng)?;
                    Box::new(move |i, j| *w.get(i, j))
                }
                MeasureParams::Sym { .. } => {
                    let w = sample_sym(params, rng)?;
                    Box::new(move |i, j| *w.get(i, j))
                }
                MeasureParams::Tri { .. } => {
                    let w = sample_tri(params, rng)?;
                    Box::new(move |i, j| *w.get(i, j))
                }
            };
            for (c, &(i, j)) in cells.iter().enumerate() {
                let v = 1.0 / get(i, j);
                s[c] += v;
                s[k + c] += v * v;
            }
        }
        Ok(s)
    })?;
    let mut tot = vec![0.0; 2 * k];
    for c in &chunks {
        for (t, v) in tot.iter_mut().zip(c) {
            *t += v;
        }
    }
    let nf = samples as f64;
    let probes: Vec<ProbeResult> = cells
        .iter()
        .enumerate()
        .map(|(c, &(i, j))| {
            let mean = tot[c] / nf;
            let stderr = ((tot[k + c] / nf - mean * mean).max(0.0) / nf).sqrt();
            let z = (mean - expected[c]) / stderr.max(1e-300);
            ProbeResult {
                probe: format!("1/w{i}{j}"),
                estimate: mean,
                stderr,
                reference: expected[c],
                reference_error: 0.0,
                z,
                pass: z.abs() <= Z_THRESHOLD,
            }
        })
        .collect();
    Ok(McReport {
        name: "sampler-means".into(),
        seed,
        samples,
        params: Some(params.clone()),
        pass: probes.iter().all(|p| p.pass),
        probes,
        ks: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect() -> MeasureParams {
        MeasureParams::Rect { theta_hat: vec![1.0, 2.0], theta: vec![0.5, 1.5], s: 1.0 }
    }

    #[test]
    fn validation() {
        assert!(rect().validate().is_ok());
        let bad = MeasureParams::Rect { theta_hat: vec![-1.0], theta: vec![0.5], s: 1.0 };
        assert!(bad.validate().is_err());
        assert!(MeasureParams::Sym { alpha: vec![1.0, -0.5], zeta: 1.0 }.validate().is_ok());
        assert!(MeasureParams::Sym { alpha: vec![1.0, -1.5], zeta: 1.0 }.validate().is_err());
        assert!(MeasureParams::Tri { alpha: vec![1.0] }.validate().is_err());
        let mut g = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_sym(&rect(), &mut g).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = MeasureParams::Sym { alpha: vec![1.0, 2.0], zeta: 0.5 };
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"model\":\"sym\""));
        assert_eq!(serde_json::from_str::<MeasureParams>(&s).unwrap(), p);
    }

    #[test]
    fn sampler_means() {
        for p in [
            MeasureParams::Rect { theta_hat: vec![1.0, 2.0], theta: vec![0.5, 1.5], s: 2.5 },
            MeasureParams::Rect { theta_hat: vec![0.7], theta: vec![0.4, 0.9, 1.2], s: 1.0 },
            MeasureParams::Sym { alpha: vec![0.8, 1.3, 0.6], zeta: 0.4 },
            MeasureParams::Tri { alpha: vec![0.3, 0.5, 1.0] },
            MeasureParams::Tri { alpha: vec![0.9, 1.1] },
        ] {
            let r = sampler_mean_check(&p, 100_000, 3).unwrap();
            assert!(r.pass, "{r:#?}");
        }
    }

    #[test]
    fn large_zeta_diagonal_scaling() {
        for zeta in [1e3, 1e4] {
            let p = MeasureParams::Sym { alpha: vec![0.5, 1.0], zeta };
            let mut g = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..200 {
                let w = sample_sym(&p, &mut g).unwrap();
                assert!((zeta * w.get(1, 1) - 0.5).abs() < 0.05);
                assert!((zeta * w.get(2, 2) - 0.5).abs() < 0.05);
            }
        }
    }

    #[test]
    fn chunked_runs_are_deterministic() {
        let f = |rng: &mut ChaCha8Rng, count: usize| Ok((0..count).map(|_| rng.random::<u32>()).collect::<Vec<_>>());
        let a = run_chunks(9, 1000, f).unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_chunks(9, 1000, f).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.iter().map(Vec::len).sum::<usize>(), 1000);
    }

    #[test]
    fn kolmogorov_tail() {
        assert!((kolmogorov_q(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_q(1.949) - 0.001).abs() < 1e-4);
        let mut a: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let mut b = a.clone();
        assert_eq!(ks_two_sample(&mut a, &mut b).0, 0.0);
        let mut c: Vec<f64> = (0..100).map(|k| k as f64 + 1000.0).collect();
        let (d, p) = ks_two_sample(&mut a, &mut c);
        assert_eq!(d, 1.0);
        assert!(p < 1e-10);
    }

    #[test]
    fn reference_normalizations() {
        for p in [
            rect(),
            MeasureParams::Sym { alpha: vec![1.0, 2.0], zeta: 0.5 },
            MeasureParams::Sym { alpha: vec![1.0, 2.0], zeta: 0.0 },
            MeasureParams::Tri { alpha: vec![0.8, 1.2, 1.0] },
        ] {
            let r = reference_values(&p, &[Probe::Moment(0.0, 0.0)]).unwrap();
            assert!((r[0].0 - 1.0).abs() < 1e-8, "{p:?}: {r:?}");
        }
    }

    #[test]
    fn z1_at_n2() {
        let r = z1_symmetric_equivalence(&[0.7, 1.1], 20_000, 5).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn pushforward_small() {
        let r = pushforward_check(&rect(), 20_000, 11).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!(r.to_csv().starts_with("probe,estimate,stderr,reference,z\nnorm,"));
    }
}
