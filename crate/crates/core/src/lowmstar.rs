//! Level sets, relative volume ratios, random subspaces, and the finite
//! volume-ratio / low-M* experiments.
//!
//! High-dimensional runs stay in the radial representation, where level-set
//! radii are exact 1-D root-findings and the subspace plays no role (a
//! rotation-invariant function restricted to any k-dimensional subspace is
//! the same profile). Shell radii are drawn once per experiment from a
//! dedicated stream, so per-subspace results of radial runs agree bit for
//! bit, which is exactly the invariance the theorems predict.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::calculus::asplund;
use crate::error::{Error, Result};
use crate::meanwidth::{log_lebesgue_integral, mean_width, EstimateReport};
use crate::potential::{LogConcaveFn, Potential, Repr};
use crate::quadrature::standard_normal;
use crate::radial::RadialProfile;

/// K_{f, beta} = {x : f(x) >= e^{-beta n}} = {phi <= beta n}, a convex body
/// for log-concave f.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    pub beta: f64,
    pub repr: LevelSetRepr,
}

#[derive(Debug, Clone, Serialize)]
pub enum LevelSetRepr {
    Empty,
    /// Centered ball of this radius (radial and centered-quadratic cases);
    /// +inf when the sublevel set is all of R^n.
    Radius(f64),
    /// Grid case: coordinates of the nodes in the set.
    Mask(Vec<Vec<f64>>),
}

impl LevelSet {
    pub fn is_empty(&self) -> bool {
        match &self.repr {
            LevelSetRepr::Empty => true,
            LevelSetRepr::Mask(pts) => pts.is_empty(),
            LevelSetRepr::Radius(_) => false,
        }
    }

    /// Radius of the smallest centered ball containing the set.
    pub fn circumradius(&self) -> f64 {
        match &self.repr {
            LevelSetRepr::Empty => 0.0,
            LevelSetRepr::Radius(r) => *r,
            LevelSetRepr::Mask(pts) => pts
                .iter()
                .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        }
    }
}

pub fn level_set(f: &LogConcaveFn, beta: f64) -> Result<LevelSet> {
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", format!("need beta > 0, got {beta}")));
    }
    let n = f.dim() as f64;
    let level = beta * n;
    let phi = f.phi();
    match phi.repr() {
        Repr::Radial(p) => Ok(match p.sublevel_radius(level) {
            None => LevelSet { beta, repr: LevelSetRepr::Empty },
            Some(r) => LevelSet { beta, repr: LevelSetRepr::Radius(r) },
        }),
        Repr::Grid(g) => {
            let mut pts = Vec::new();
            for flat in 0..g.len() {
                if let Some(v) = g.values()[flat].finite_value() {
                    if v <= level {
                        pts.push(g.node(flat));
                    }
                }
            }
            Ok(LevelSet { beta, repr: LevelSetRepr::Mask(pts) })
        }
        Repr::Analytic(a) => match crate::legendre::radial_profile_of_analytic(a) {
            Some(p) => Ok(match p.sublevel_radius(level) {
                None => LevelSet { beta, repr: LevelSetRepr::Empty },
                Some(r) => LevelSet { beta, repr: LevelSetRepr::Radius(r) },
            }),
            None => {
                let g = crate::legendre::analytic_to_grid(phi, 129)?;
                level_set(&LogConcaveFn::new(g)?, beta)
            }
        },
    }
}

/// Checks f >= G on the sampled support and returns a witness on failure.
/// Radial profiles are checked densely on [0, rmax]; grids at their nodes.
pub fn check_dominates_gaussian(f: &LogConcaveFn) -> std::result::Result<(), Vec<f64>> {
    let tol = 1e-9;
    match f.phi().repr() {
        Repr::Radial(p) => {
            let r_hi = p.rmax().min((f.dim() as f64).sqrt() + 40.0);
            let mut rs: Vec<f64> = (0..=2000).map(|k| r_hi * k as f64 / 2000.0).collect();
            rs.extend(p.breakpoints());
            for r in rs {
                if let Some(v) = p.eval(r).finite_value() {
                    if v > 0.5 * r * r + tol {
                        let mut x = vec![0.0; f.dim()];
                        x[0] = r;
                        return Err(x);
                    }
                }
            }
            Ok(())
        }
        Repr::Grid(g) => {
            for flat in 0..g.len() {
                if let Some(v) = g.values()[flat].finite_value() {
                    let x = g.node(flat);
                    let r2: f64 = x.iter().map(|c| c * c).sum();
                    if v > 0.5 * r2 + tol {
                        return Err(x);
                    }
                }
            }
            Ok(())
        }
        Repr::Analytic(a) => {
            match crate::legendre::radial_profile_of_analytic(a) {
                Some(p) => {
                    let g = LogConcaveFn::new(Potential::from_radial(f.dim(), p)).unwrap();
                    check_dominates_gaussian(&g)
                }
                None => {
                    // Sample a box around the origin.
                    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
                    for _ in 0..4000 {
                        let x: Vec<f64> =
                            (0..f.dim()).map(|_| rng.gen_range(-8.0..8.0)).collect();
                        let v = a.eval(&x);
                        if let Some(v) = v.finite_value() {
                            let r2: f64 = x.iter().map(|c| c * c).sum();
                            if v > 0.5 * r2 + tol {
                                return Err(x);
                            }
                        }
                    }
                    Ok(())
                }
            }
        }
    }
}

/// V(f) = (int f / int G)^{1/n}, defined for f >= G. The domination check
/// runs on the support sample and its outcome lands in the diagnostics;
/// a witness aborts with a precondition error.
pub fn volume_ratio(f: &LogConcaveFn) -> Result<EstimateReport> {
    if let Err(witness) = check_dominates_gaussian(f) {
        return Err(Error::Precondition(format!(
            "f >= G fails at x = {witness:?}"
        )));
    }
    let n = f.dim() as f64;
    let log_if = log_lebesgue_integral(f)?;
    let log_ig = 0.5 * n * (2.0 * std::f64::consts::PI).ln();
    let v = ((log_if - log_ig) / n).exp();
    let mut rep = EstimateReport::radial(v, 0);
    rep.diagnostics
        .insert("f_ge_g_check".into(), "passed on support sample".into());
    rep.diagnostics
        .insert("log_integral_f".into(), format!("{log_if:.12e}"));
    Ok(rep)
}

/// A k-dimensional subspace of R^n with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient: usize,
    pub dim: usize,
    pub seed: u64,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Embeds subspace coordinates t into R^n.
    pub fn embed(&self, t: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient];
        for (tc, b) in t.iter().zip(&self.basis) {
            for d in 0..self.ambient {
                x[d] += tc * b[d];
            }
        }
        x
    }

    /// |P_E u|^2 for a unit vector u.
    pub fn projection_sq(&self, u: &[f64]) -> f64 {
        self.basis
            .iter()
            .map(|b| {
                let d: f64 = b.iter().zip(u).map(|(a, c)| a * c).sum();
                d * d
            })
            .sum()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d: f64 = self.basis[i].iter().zip(&self.basis[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }
}

/// Haar-distributed subspace: Gram-Schmidt (with one re-orthogonalization
/// pass) of k seeded Gaussian vectors.
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("need 1 <= k <= {n}, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
                for i in 0..n {
                    v[i] -= d * b[i];
                }
            }
        }
        let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        basis.push(v.into_iter().map(|c| c / norm).collect());
    }
    Ok(Subspace { ambient: n, dim: k, seed, basis })
}

/// The sharpness family: phi(x) = psi(|x|) with psi = 0 below sqrt(n),
/// 2 sqrt(n) r - 2n up to 2 sqrt(n), then r^2/2. The log-concave envelope
/// of max(G, 1_{sqrt(n) D}); satisfies f >= G with threshold radius
/// (eps + 2) sqrt(n) / 2 at height e^{-eps n}.
pub fn counterexample_potential(n: usize) -> Result<LogConcaveFn> {
    let nf = n as f64;
    let s = nf.sqrt();
    let profile = RadialProfile::new(vec![
        crate::radial::RadialPiece { lo: 0.0, hi: s, a: 0.0, b: 0.0, c: 0.0 },
        crate::radial::RadialPiece { lo: s, hi: 2.0 * s, a: 0.0, b: 2.0 * s, c: -2.0 * nf },
        crate::radial::RadialPiece { lo: 2.0 * s, hi: f64::INFINITY, a: 1.0, b: 0.0, c: 0.0 },
    ])?;
    LogConcaveFn::new(Potential::from_radial(n, profile))
}

/// Configuration of the volume-ratio / low-M* experiments.
#[derive(Debug, Clone, Serialize)]
pub struct LowMstarConfig {
    pub eps: f64,
    /// Upper shell height exponent M: the shell is e^{-eps n} >= f >= e^{-M n}.
    pub m: f64,
    pub lambda: f64,
    pub trials: usize,
    pub shell_samples: usize,
    pub seed: u64,
    /// Probe constants for the pass-fraction table.
    pub c_probe: Vec<f64>,
}

impl Default for LowMstarConfig {
    fn default() -> Self {
        LowMstarConfig {
            eps: 0.25,
            m: 4.0,
            lambda: 0.5,
            trials: 64,
            shell_samples: 4096,
            seed: 17,
            c_probe: vec![0.5, 1.0, 2.0, 4.0, 8.0],
        }
    }
}

impl LowMstarConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < self.m) {
            return Err(Error::invalid("eps", "need 0 < eps < M"));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::invalid("lambda", "need lambda in (0, 1)"));
        }
        if self.trials == 0 || self.shell_samples == 0 {
            return Err(Error::invalid("trials", "need positive trials and samples"));
        }
        // The proof's floor: n >= log log (M / eps).
        let ll = (self.m / self.eps).ln().ln();
        if ll.is_finite() && (n as f64) < ll {
            return Err(Error::invalid(
                "n",
                format!("need n >= log log(M/eps) = {ll:.3}, got {n}"),
            ));
        }
        Ok(())
    }
}

/// The one-dimensional net eps = beta_0 < ... < beta_N = M with ratios
/// at most 2 and N <= ceil(log2(M / eps)).
pub fn beta_net(eps: f64, m: f64) -> Vec<f64> {
    let steps = (m / eps).log2().ceil().max(1.0) as usize;
    (0..=steps)
        .map(|i| eps * (m / eps).powf(i as f64 / steps as f64))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub subspace_seed: u64,
    pub max_c: f64,
    pub shell_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaLevelReport {
    pub beta: f64,
    pub inradius: f64,
    pub circumradius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub max_c: f64,
    pub quantiles: BTreeMap<String, f64>,
    /// Fraction of subspaces with max_c <= [C_probe V(f)]^{2/(1-lambda)}.
    pub pass_fraction: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: LowMstarConfig,
    pub n: usize,
    pub volume_ratio: f64,
    pub beta_net: Vec<f64>,
    pub per_beta: Vec<BetaLevelReport>,
    pub per_trial: Vec<TrialReport>,
    pub summary: ExperimentSummary,
    pub empty_shell: bool,
    pub radial: bool,
}

const RADII_STREAM_TAG: u64 = 0x52414449; // shared radius stream

/// Finite volume-ratio experiment: on each random subspace, sample
/// the shell {e^{-eps n} >= f >= e^{-M n}} and record the smallest c with
/// f(x) <= (c . G)(x) at every sample, i.e. c = max |x|^2 / (2 phi(x)).
pub fn finite_volume_ratio_experiment(
    f: &LogConcaveFn,
    cfg: &LowMstarConfig,
) -> Result<ExperimentReport> {
    let n = f.dim();
    cfg.validate(n)?;
    let vr = volume_ratio(f)?.value.raw();
    experiment_core(f, f, cfg, vr)
}

/// Shared engine: the shell is defined by `shell_f`, the homothety
/// constant measured on `bound_f` (the two coincide in the volume-ratio
/// experiment; the low-M* experiment shells by h = f * G and bounds f).
fn experiment_core(
    shell_f: &LogConcaveFn,
    bound_f: &LogConcaveFn,
    cfg: &LowMstarConfig,
    vr: f64,
) -> Result<ExperimentReport> {
    let n = shell_f.dim();
    let nf = n as f64;
    let net = beta_net(cfg.eps, cfg.m);
    debug_assert!(net.windows(2).all(|w| w[1] / w[0] <= 2.0 + 1e-12));
    let mut per_beta = Vec::with_capacity(net.len());
    for &beta in &net {
        let ls = level_set(shell_f, beta)?;
        let circum = ls.circumradius();
        let inr = match &ls.repr {
            LevelSetRepr::Radius(r) => *r,
            LevelSetRepr::Empty => 0.0,
            LevelSetRepr::Mask(pts) => grid_inradius(shell_f, pts, beta * nf),
        };
        per_beta.push(BetaLevelReport { beta, inradius: inr, circumradius: circum });
    }
    let radial = matches!(shell_f.phi().repr(), Repr::Radial(_));
    let k = (cfg.lambda * nf).ceil() as usize;
    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut empty_shell = false;
    if radial {
        let psi = shell_f.phi().as_radial().unwrap();
        let flat = psi.flatten_to_min();
        let r_in = flat.sublevel_radius(cfg.eps * nf);
        let r_out = flat.sublevel_radius(cfg.m * nf);
        match (r_in, r_out) {
            (Some(r_in), Some(r_out)) if r_out > r_in && r_out.is_finite() => {
                // One radius stream for every subspace: a rotation-invariant
                // f cannot tell subspaces apart, and the shared stream makes
                // that exact in the report.
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ RADII_STREAM_TAG);
                let radii: Vec<f64> =
                    (0..cfg.shell_samples).map(|_| rng.gen_range(r_in..r_out)).collect();
                let bound_phi = bound_f.phi();
                let mut max_c = 0.0f64;
                let mut x = vec![0.0; n];
                for &r in &radii {
                    x[0] = r;
                    let c = homothety_constant(bound_phi.eval(&x)?, r);
                    max_c = max_c.max(c);
                }
                for trial in 0..cfg.trials {
                    per_trial.push(TrialReport {
                        subspace_seed: trial_seed(cfg.seed, trial),
                        max_c,
                        shell_count: radii.len(),
                    });
                }
            }
            _ => {
                empty_shell = true;
                for trial in 0..cfg.trials {
                    per_trial.push(TrialReport {
                        subspace_seed: trial_seed(cfg.seed, trial),
                        max_c: 0.0,
                        shell_count: 0,
                    });
                }
            }
        }
    } else {
        // Grid / analytic shells: explicit subspaces and rejection sampling.
        let lo = (-cfg.m * nf).exp();
        let hi = (-cfg.eps * nf).exp();
        let r_cap = per_beta.last().map(|b| b.circumradius).unwrap_or(0.0).max(1e-9);
        let mut any = false;
        for trial in 0..cfg.trials {
            let sseed = trial_seed(cfg.seed, trial);
            let sub = random_subspace(n, k, sseed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(sseed ^ 0x5A5A);
            let mut max_c = 0.0f64;
            let mut count = 0usize;
            let mut tries = 0usize;
            while count < cfg.shell_samples && tries < cfg.shell_samples * 64 {
                tries += 1;
                let t: Vec<f64> = (0..k).map(|_| rng.gen_range(-r_cap..r_cap)).collect();
                let x = sub.embed(&t);
                let fv = shell_f.eval(&x)?;
                if fv >= lo && fv <= hi {
                    count += 1;
                    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                    max_c = max_c.max(homothety_constant(bound_f.phi().eval(&x)?, r));
                }
            }
            any |= count > 0;
            per_trial.push(TrialReport { subspace_seed: sseed, max_c, shell_count: count });
        }
        empty_shell = !any;
    }
    let mut cs: Vec<f64> = per_trial.iter().map(|t| t.max_c).collect();
    cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| cs[((p * (cs.len() - 1) as f64).round() as usize).min(cs.len() - 1)];
    let mut quantiles = BTreeMap::new();
    quantiles.insert("q50".into(), q(0.5));
    quantiles.insert("q90".into(), q(0.9));
    quantiles.insert("max".into(), *cs.last().unwrap());
    let mut pass_fraction = BTreeMap::new();
    for &cp in &cfg.c_probe {
        let threshold = (cp * vr).powf(2.0 / (1.0 - cfg.lambda));
        let frac =
            per_trial.iter().filter(|t| t.max_c <= threshold).count() as f64 / cfg.trials as f64;
        pass_fraction.insert(format!("{cp}"), frac);
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        n,
        volume_ratio: vr,
        beta_net: net,
        per_beta,
        per_trial,
        summary: ExperimentSummary { max_c: *cs.last().unwrap(), quantiles, pass_fraction },
        empty_shell,
        radial,
    })
}

/// Smallest c with f(x) <= (c . G)(x) at one point: c = |x|^2 / (2 phi(x)).
/// phi = +inf (f = 0 there) satisfies every homothety, contributing 0.
fn homothety_constant(phi_val: crate::ext::ExtReal, r: f64) -> f64 {
    match phi_val.finite_value() {
        Some(v) if v > 0.0 => r * r / (2.0 * v),
        Some(_) => f64::INFINITY, // f(x) >= 1 away from 0: no finite c
        None => 0.0,
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add((trial as u64).wrapping_mul(0x9E3779B97F4A7C15))
}

fn grid_inradius(f: &LogConcaveFn, mask: &[Vec<f64>], level: f64) -> f64 {
    if mask.is_empty() {
        return 0.0;
    }
    // Largest centered ball inside the mask: bounded by the nearest
    // finite node outside the sublevel set.
    let g = match f.phi().repr() {
        Repr::Grid(g) => g,
        _ => return 0.0,
    };
    let mut best = f64::INFINITY;
    for flat in 0..g.len() {
        let v = g.values()[flat];
        let keep = match v.finite_value() {
            Some(v) => v > level,
            None => true,
        };
        if keep {
            let x = g.node(flat);
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            best = best.min(r);
        }
    }
    if best.is_finite() {
        best
    } else {
        mask.iter()
            .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Report of the low-M* experiment on f (f(0) = 1, M*(f) <= 1): shells are
/// cut by h = f * G, the homothety constant is measured on f itself.
#[derive(Debug, Clone, Serialize)]
pub struct LowMstarReport {
    pub f_mean_width: EstimateReport,
    pub h_mean_width: EstimateReport,
    /// V(h); bounded by sqrt(e) through Urysohn.
    pub v_h: f64,
    pub v_h_bound_ok: bool,
    pub h_dominates_g: bool,
    pub f_below_h: bool,
    pub experiment: ExperimentReport,
    /// The per-run minimal homothety constant for f on the h-shell.
    pub max_c_f: f64,
    /// f(x) <= (max_c_f . G)(x) at every sampled shell point, re-verified.
    pub bound_holds: bool,
}

pub fn low_mstar_experiment(f: &LogConcaveFn, cfg: &LowMstarConfig) -> Result<LowMstarReport> {
    let n = f.dim();
    cfg.validate(n)?;
    let f0 = f.phi().at_origin();
    if f0.finite_value().is_none_or(|v| v.abs() > 1e-9) {
        return Err(Error::Precondition(format!("f(0) = e^{{-{f0}}} != 1")));
    }
    let f_mean_width = mean_width(f)?;
    if f_mean_width.is_infinite() || f_mean_width.value.raw() > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!(
            "M*(f) = {} exceeds 1",
            f_mean_width.value
        )));
    }
    let g = LogConcaveFn::standard_gaussian(n);
    let h = asplund(f, &g, None)?;
    let h_dominates_g = check_dominates_gaussian(&h).is_ok();
    let h_mean_width = mean_width(&h)?;
    let v_h = volume_ratio(&h)?.value.raw();
    let v_h_bound_ok = v_h <= (0.5_f64).exp() + 1e-3;
    // f <= h pointwise (h = f * G >= f(x) G(0)).
    let f_below_h = {
        let probe_ok = |x: &[f64]| -> Result<bool> {
            Ok(f.eval(x)? <= h.eval(x)? + 1e-12)
        };
        let mut ok = true;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xF0);
        for _ in 0..512 {
            let x: Vec<f64> = (0..n)
                .map(|_| rng.gen_range(-2.0 * (n as f64).sqrt()..2.0 * (n as f64).sqrt()))
                .collect();
            ok &= probe_ok(&x)?;
        }
        ok
    };
    let experiment = experiment_core(&h, f, cfg, v_h)?;
    let max_c_f = experiment.summary.max_c;
    // Re-verify the reported constant over a fresh sample of the shell.
    let bound_holds = verify_bound(&h, f, cfg, max_c_f)?;
    Ok(LowMstarReport {
        f_mean_width,
        h_mean_width,
        v_h,
        v_h_bound_ok,
        h_dominates_g,
        f_below_h,
        experiment,
        max_c_f,
        bound_holds,
    })
}

/// Re-verifies f(x) <= (c . G)(x) at the experiment's own sample points
/// (same streams), through the direct exponential inequality rather than
/// the |x|^2/(2 phi) bookkeeping that produced c. The reported constant is
/// a maximum over exactly these points, so any failure here is an algebra
/// bug, not sampling noise.
fn verify_bound(
    shell_f: &LogConcaveFn,
    bound_f: &LogConcaveFn,
    cfg: &LowMstarConfig,
    c: f64,
) -> Result<bool> {
    let n = shell_f.dim();
    let nf = n as f64;
    // (c . G)(x) = e^{-|x|^2/(2c)}; the degenerate c = 0 bound is the
    // point mass at 0, satisfied only by f = 0 on the shell.
    let holds = |x: &[f64], r2: f64| -> Result<bool> {
        let fv = bound_f.eval(x)?;
        let bound = if c > 0.0 { (-r2 / (2.0 * c)).exp() } else { 0.0 };
        Ok(fv <= bound + 1e-12)
    };
    if let Some(psi) = shell_f.phi().as_radial() {
        let flat = psi.flatten_to_min();
        let (Some(r_in), Some(r_out)) =
            (flat.sublevel_radius(cfg.eps * nf), flat.sublevel_radius(cfg.m * nf))
        else {
            return Ok(true);
        };
        if !r_out.is_finite() || r_out <= r_in {
            return Ok(true);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ RADII_STREAM_TAG);
        let mut x = vec![0.0; n];
        for _ in 0..cfg.shell_samples {
            let r = rng.gen_range(r_in..r_out);
            x[0] = r;
            if !holds(&x, r * r)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    // Grid / analytic shells: replay the per-trial rejection streams
    // (r_cap must match the experiment's bit for bit or the streams fork).
    let k = (cfg.lambda * nf).ceil() as usize;
    let lo = (-cfg.m * nf).exp();
    let hi = (-cfg.eps * nf).exp();
    let beta_last = *beta_net(cfg.eps, cfg.m).last().unwrap();
    let r_cap = level_set(shell_f, beta_last)?.circumradius().max(1e-9);
    for trial in 0..cfg.trials {
        let sseed = trial_seed(cfg.seed, trial);
        let sub = random_subspace(n, k, sseed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(sseed ^ 0x5A5A);
        let mut count = 0usize;
        let mut tries = 0usize;
        while count < cfg.shell_samples && tries < cfg.shell_samples * 64 {
            tries += 1;
            let t: Vec<f64> = (0..k).map(|_| rng.gen_range(-r_cap..r_cap)).collect();
            let x = sub.embed(&t);
            let fv = shell_f.eval(&x)?;
            if fv >= lo && fv <= hi {
                count += 1;
                let r2 = x.iter().map(|c| c * c).sum::<f64>();
                if !holds(&x, r2)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_level_set_radius() {
        let f = LogConcaveFn::standard_gaussian(10);
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let ls = level_set(&f, beta).unwrap();
            assert_relative_eq!(
                ls.circumradius(),
                (2.0 * beta * 10.0).sqrt(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn level_set_nesting_and_homothety_bound() {
        let f = counterexample_potential(25).unwrap();
        let pairs = [(0.25, 0.5), (0.5, 1.0), (1.0, 2.5)];
        for (b1, b2) in pairs {
            let r1 = level_set(&f, b1).unwrap().circumradius();
            let r2 = level_set(&f, b2).unwrap().circumradius();
            assert!(r1 <= r2 + 1e-12);
            assert!(r2 <= (b2 / b1) * r1 + 1e-9, "homothety bound at ({b1}, {b2})");
        }
    }

    #[test]
    fn level_set_volume_bound() {
        // |K_{f,1}| e^{-n} <= int f for a radial f.
        let n = 12;
        let f = counterexample_potential(n).unwrap();
        let r1 = level_set(&f, 1.0).unwrap().circumradius();
        let log_k = crate::bodies::unit_ball_volume(n).ln() + n as f64 * r1.ln();
        let log_if = log_lebesgue_integral(&f).unwrap();
        assert!(log_k - n as f64 <= log_if + 1e-9);
    }

    #[test]
    fn level_set_contains_gaussian_level_set() {
        // f >= G gives K_{f, beta} >= sqrt(2 beta n) D.
        let n = 64;
        let f = counterexample_potential(n).unwrap();
        for beta in [0.1, 0.5, 1.0] {
            let r = level_set(&f, beta).unwrap().circumradius();
            assert!(r >= (2.0 * beta * n as f64).sqrt() - 1e-9);
        }
    }

    #[test]
    fn volume_ratio_of_gaussian_and_scaled() {
        let g = LogConcaveFn::standard_gaussian(6);
        let v = volume_ratio(&g).unwrap().value.raw();
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
        // f = 2^n G: V = 2.
        let f = crate::calculus::scalar_mult(64.0, &g).unwrap();
        let v = volume_ratio(&f).unwrap().value.raw();
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn volume_ratio_rejects_sub_gaussian() {
        let g = LogConcaveFn::standard_gaussian(4);
        let f = crate::calculus::scalar_mult(0.5, &g).unwrap();
        assert!(volume_ratio(&f).is_err());
    }

    #[test]
    fn counterexample_shape() {
        let n = 100;
        let f = counterexample_potential(n).unwrap();
        let p = f.phi().as_radial().unwrap();
        let s = (n as f64).sqrt();
        // Continuity at both breakpoints.
        assert_relative_eq!(p.eval(s).raw(), 0.0);
        assert_relative_eq!(p.eval(2.0 * s).raw(), 2.0 * n as f64, max_relative = 1e-12);
        // f >= G and the screen passes.
        assert!(check_dominates_gaussian(&f).is_ok());
        assert!(crate::potential::convexity_screen(f.phi(), 1e-9).unwrap().passed());
        // V(f) bounded by a universal constant.
        let v = volume_ratio(&f).unwrap().value.raw();
        assert!(v < 3.0, "V(f) = {v}");
    }

    #[test]
    fn counterexample_threshold_radius() {
        // psi(r*) = eps n at r* = (eps + 2) sqrt(n) / 2, the sharp constant
        // (eps+2)^2/(8 eps) in f <= (c . G).
        let n = 10_000;
        let f = counterexample_potential(n).unwrap();
        let p = f.phi().as_radial().unwrap();
        for eps in [0.5, 0.25, 0.125] {
            let r = p.sublevel_radius(eps * n as f64).unwrap();
            let expected = (eps + 2.0) * (n as f64).sqrt() / 2.0;
            assert_relative_eq!(r, expected, max_relative = 1e-12);
            let c = r * r / (2.0 * eps * n as f64);
            assert_relative_eq!(c, (eps + 2.0) * (eps + 2.0) / (8.0 * eps), max_relative = 1e-12);
        }
    }

    #[test]
    fn subspace_orthonormal_and_projection_moment() {
        let sub = random_subspace(30, 12, 99).unwrap();
        assert!(sub.orthonormality_defect() < 1e-12);
        // E |P_E u|^2 = k/n for a random unit u; 3 sigma band via the Beta
        // moments.
        let (n, k, draws) = (20usize, 5usize, 10_000usize);
        let sub = random_subspace(n, k, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut acc = 0.0;
        for _ in 0..draws {
            let u = crate::quadrature::random_unit_vector(&mut rng, n);
            acc += sub.projection_sq(&u);
        }
        let mean = acc / draws as f64;
        let expect = k as f64 / n as f64;
        let var = 2.0 * (k as f64) * (n - k) as f64
            / ((n as f64) * (n as f64) * (n as f64 + 2.0));
        let sigma = (var / draws as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 3.0 * sigma,
            "mean {mean} vs {expect} +- {sigma}"
        );
        // k = n spans everything.
        let full = random_subspace(6, 6, 3).unwrap();
        let u = crate::quadrature::random_unit_vector(&mut rng, 6);
        assert_relative_eq!(full.projection_sq(&u), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn beta_net_properties() {
        for (eps, m) in [(0.125, 4.0), (0.5, 8.0), (0.9, 1.0001)] {
            let net = beta_net(eps, m);
            assert_eq!(net[0], eps);
            assert_relative_eq!(*net.last().unwrap(), m, max_relative = 1e-12);
            for w in net.windows(2) {
                assert!(w[1] / w[0] <= 2.0 + 1e-12);
            }
            assert!(net.len() <= (m / eps).log2().ceil() as usize + 1);
        }
    }

    #[test]
    fn gaussian_shell_has_constant_one() {
        // f = G: the shell is the annulus sqrt(2 eps n) <= |x| <= sqrt(2 M n)
        // and c = 1 on it for every subspace.
        let f = LogConcaveFn::standard_gaussian(50);
        let cfg = LowMstarConfig { trials: 8, shell_samples: 512, ..Default::default() };
        let rep = finite_volume_ratio_experiment(&f, &cfg).unwrap();
        assert!(!rep.empty_shell);
        for t in &rep.per_trial {
            assert_relative_eq!(t.max_c, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn radial_runs_are_subspace_invariant() {
        let f = counterexample_potential(400).unwrap();
        let cfg = LowMstarConfig { trials: 16, ..Default::default() };
        let rep = finite_volume_ratio_experiment(&f, &cfg).unwrap();
        let c0 = rep.per_trial[0].max_c;
        for t in &rep.per_trial {
            assert!((t.max_c - c0).abs() <= 1e-10);
        }
    }

    #[test]
    fn sharpness_constant_recovered() {
        let f = counterexample_potential(10_000).unwrap();
        for eps in [0.5, 0.25, 0.125] {
            let cfg = LowMstarConfig { eps, m: 4.0, trials: 8, ..Default::default() };
            let rep = finite_volume_ratio_experiment(&f, &cfg).unwrap();
            let expected = (eps + 2.0) * (eps + 2.0) / (8.0 * eps);
            assert_relative_eq!(rep.summary.max_c, expected, max_relative = 0.1);
        }
    }

    #[test]
    fn indicator_shell_is_empty() {
        let n = 32;
        let r = (2.0 * n as f64).sqrt();
        let f = LogConcaveFn::new(Potential::from_radial(
            n,
            RadialProfile::ball_indicator(r),
        ))
        .unwrap();
        // Level sets are the same ball for every beta.
        for beta in [0.1, 1.0, 3.0] {
            assert_relative_eq!(level_set(&f, beta).unwrap().circumradius(), r);
        }
        let cfg = LowMstarConfig { trials: 4, ..Default::default() };
        let rep = finite_volume_ratio_experiment(&f, &cfg).unwrap();
        assert!(rep.empty_shell);
    }

    #[test]
    fn low_mstar_gaussian_case() {
        // f = G: h = 2.G = e^{-|x|^2/4}, M*(h) = 2, V(h) = sqrt(2).
        let n = 40;
        let f = LogConcaveFn::standard_gaussian(n);
        let cfg = LowMstarConfig { trials: 8, shell_samples: 1024, ..Default::default() };
        let rep = low_mstar_experiment(&f, &cfg).unwrap();
        assert_relative_eq!(rep.h_mean_width.value.raw(), 2.0, epsilon = 1e-8);
        assert_relative_eq!(rep.v_h, 2.0_f64.sqrt(), epsilon = 1e-9);
        assert!(rep.v_h_bound_ok && rep.h_dominates_g && rep.f_below_h);
        assert!(rep.bound_holds);
        // h's potential is |x|^2/4: on the shell c = |x|^2/(2 |x|^2/2) = 1
        // measured on f.
        assert_relative_eq!(rep.max_c_f, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn low_mstar_ball_indicator() {
        // f = 1_{r D} with r tuned so M*(f) <= 1: h is the exact
        // squared-distance profile.
        let n = 60;
        let chi_mean = crate::quadrature::chi_expectation(n, &|r| r, &[]);
        let r = 0.45 * n as f64 / chi_mean;
        let f = LogConcaveFn::new(Potential::from_radial(
            n,
            RadialProfile::ball_indicator(r),
        ))
        .unwrap();
        let cfg = LowMstarConfig { trials: 8, shell_samples: 1024, ..Default::default() };
        let rep = low_mstar_experiment(&f, &cfg).unwrap();
        assert!(rep.f_mean_width.value.raw() <= 1.0);
        assert_relative_eq!(
            rep.h_mean_width.value.raw(),
            rep.f_mean_width.value.raw() + 1.0,
            epsilon = 1e-8
        );
        assert!(rep.v_h <= (0.5_f64).exp() + 1e-3);
        assert!(rep.bound_holds);
    }

    #[test]
    fn grid_shell_experiment() {
        // Non-radial branch: explicit subspaces and rejection sampling on a
        // 2-D grid f = 4 G (phi = r^2/2 - log 4, f >= G on its support).
        let log4 = 4.0_f64.ln();
        let g = crate::grid::Grid::sample(
            vec![-6.0, -6.0],
            vec![0.25, 0.25],
            vec![49, 49],
            |x| crate::ext::ExtReal::finite(0.5 * (x[0] * x[0] + x[1] * x[1]) - log4),
        )
        .unwrap();
        let f = LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap();
        let cfg = LowMstarConfig {
            eps: 0.25,
            m: 4.0,
            trials: 8,
            shell_samples: 512,
            ..Default::default()
        };
        let rep = finite_volume_ratio_experiment(&f, &cfg).unwrap();
        assert!(!rep.radial);
        assert!(!rep.empty_shell);
        for t in &rep.per_trial {
            assert!(t.shell_count > 0, "trial found no shell points");
        }
        // c(r) = r^2 / (r^2 - 2 log 4) on the shell, maximal at the inner
        // radius r_in^2 = 2(eps n + log 4); grid interpolation and sampling
        // keep the empirical max below the analytic supremum.
        let n = 2.0;
        let r_in2 = 2.0 * (cfg.eps * n + log4);
        let c_sup = r_in2 / (r_in2 - 2.0 * log4);
        assert!(rep.summary.max_c <= c_sup * 1.01, "{} vs {c_sup}", rep.summary.max_c);
        assert!(rep.summary.max_c > 1.0);
    }

    #[test]
    fn low_mstar_on_grid_input() {
        // 2-D grid Gaussian: f(0) = 1 and M*(f) just below 1 (the discrete
        // conjugate undershoots), so the whole non-radial pipeline runs:
        // grid Asplund with G, domination checks, shell sampling on
        // explicit subspaces, and the replayed bound verification.
        let g = crate::grid::Grid::sample(
            vec![-6.0, -6.0],
            vec![0.375, 0.375],
            vec![33, 33],
            |x| crate::ext::ExtReal::finite(0.5 * (x[0] * x[0] + x[1] * x[1])),
        )
        .unwrap();
        let f = LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap();
        let cfg = LowMstarConfig {
            eps: 0.25,
            m: 4.0,
            trials: 6,
            shell_samples: 512,
            ..Default::default()
        };
        let rep = low_mstar_experiment(&f, &cfg).unwrap();
        assert!(rep.f_mean_width.value.raw() <= 1.0);
        assert!(rep.h_dominates_g && rep.f_below_h);
        assert!(rep.v_h <= (0.5_f64).exp() + 1e-3);
        // h ~ 2.G, so the pointwise constant on f is ~1 (slightly below,
        // from the piecewise-linear sampling of the exponent).
        assert!(
            rep.max_c_f > 0.9 && rep.max_c_f <= 1.0 + 1e-9,
            "max_c_f = {}",
            rep.max_c_f
        );
        assert!(rep.bound_holds);
        // The Gaussian factor materializes at the partner's spacing, so the
        // +1 in the linearity chain carries the O(h^2) sampling bias.
        assert!(
            (rep.h_mean_width.value.raw() - rep.f_mean_width.value.raw() - 1.0).abs() <= 3e-2
        );
    }

    #[test]
    fn config_validation() {
        let f = LogConcaveFn::standard_gaussian(8);
        let bad = LowMstarConfig { lambda: 1.5, ..Default::default() };
        assert!(finite_volume_ratio_experiment(&f, &bad).is_err());
        let bad = LowMstarConfig { eps: 2.0, m: 1.0, ..Default::default() };
        assert!(finite_volume_ratio_experiment(&f, &bad).is_err());
    }
}
