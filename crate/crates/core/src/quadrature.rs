//! Deterministic integration backends.
//!
//! Gaussian expectations in n <= 3 use tensor-product Gauss-Legendre panels
//! with the density folded into the weights; panel boundaries sit at 0 (and
//! at caller-supplied cuts) so the piecewise-affine support functions this
//! library integrates stay smooth inside each panel. Radial work in any
//! dimension reduces to 1-D integrals against r^{n-1} e^{-r^2/2}, done in
//! log space around the numerically located mode.

use crate::ext::ExtReal;
use crate::grid::Grid;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 2);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_eval(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_eval(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..m {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Per-axis nodes/weights for a panelled Gauss-Legendre rule over the given
/// cut sequence.
fn panel_rule(cuts: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(order * (cuts.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for k in 0..order {
            nodes.push(mid + half * gx[k]);
            weights.push(half * gw[k]);
        }
    }
    (nodes, weights)
}

/// Result of a deterministic expectation: finite, or +inf with the node
/// that witnessed it.
#[derive(Debug, Clone)]
pub enum QuadValue {
    Finite(f64),
    Infinite { witness: Vec<f64> },
}

impl QuadValue {
    pub fn expect_finite(&self) -> f64 {
        match self {
            QuadValue::Finite(v) => *v,
            QuadValue::Infinite { witness } => panic!("unexpected +inf at {witness:?}"),
        }
    }
}

fn axis_cuts(n: usize, extra: &[f64]) -> Vec<f64> {
    let reach = 12.0;
    let mut cuts: Vec<f64> = match n {
        1 => vec![-reach, -6.0, -2.0, 0.0, 2.0, 6.0, reach],
        2 => vec![-reach, -5.0, 0.0, 5.0, reach],
        _ => vec![-10.0, -4.0, 0.0, 4.0, 10.0],
    };
    for &c in extra {
        if c.abs() < reach {
            cuts.push(c);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    cuts
}

fn axis_order(n: usize) -> usize {
    match n {
        1 => 40,
        2 => 20,
        _ => 14,
    }
}

/// E_gamma\[g\] for n <= 3 by tensor panels. `extra_cuts[d]` adds panel
/// boundaries on axis d (kink locations of the integrand, when known).
/// A +inf value of `g` at any node short-circuits to +inf.
pub fn gaussian_expectation_nd(
    n: usize,
    extra_cuts: &[Vec<f64>],
    mut g: impl FnMut(&[f64]) -> ExtReal,
) -> QuadValue {
    assert!((1..=3).contains(&n), "tensor quadrature supports n <= 3");
    let empty = Vec::new();
    let mut axes = Vec::with_capacity(n);
    for d in 0..n {
        let extra = extra_cuts.get(d).unwrap_or(&empty);
        let cuts = axis_cuts(n, extra);
        let (nodes, weights) = panel_rule(&cuts, axis_order(n));
        // Fold the 1-D Gaussian density into the weights.
        let weights: Vec<f64> = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        axes.push((nodes, weights));
    }
    let mut acc = 0.0;
    let mut x = vec![0.0; n];
    let mut idx = vec![0usize; n];
    'outer: loop {
        let mut w = 1.0;
        for d in 0..n {
            x[d] = axes[d].0[idx[d]];
            w *= axes[d].1[idx[d]];
        }
        let v = g(&x);
        if v.is_inf() {
            return QuadValue::Infinite { witness: x.clone() };
        }
        acc += w * v.raw();
        for d in (0..n).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].0.len() {
                continue 'outer;
            }
            idx[d] = 0;
            if d == 0 {
                break 'outer;
            }
        }
    }
    QuadValue::Finite(acc)
}

/// Number of nodes the tensor rule uses for dimension n (for reports).
pub fn gaussian_expectation_nodes(n: usize, extra_cuts: &[Vec<f64>]) -> usize {
    let empty = Vec::new();
    (0..n)
        .map(|d| {
            let cuts = axis_cuts(n, extra_cuts.get(d).unwrap_or(&empty));
            (cuts.len() - 1) * axis_order(n)
        })
        .product()
}

/// log of integral_0^rmax e^{g(r)} dr. The mode of g is located by probing
/// and golden-section refinement; panels concentrate around it and split at
/// the supplied breakpoints. g may return -inf.
pub fn log_integral_exp(g: &dyn Fn(f64) -> f64, rmax: f64, breaks: &[f64]) -> f64 {
    // Probe for the mode.
    let mut probes: Vec<f64> = Vec::new();
    let mut r = 1.0 / 1024.0;
    while r < 1.1e7 && r < rmax {
        probes.push(r);
        r *= 2.0;
    }
    if rmax.is_finite() {
        probes.push(rmax * (1.0 - 1e-12));
        probes.push(rmax * 0.5);
    }
    probes.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < rmax));
    let (mut best_r, mut best_g) = (probes[0], f64::NEG_INFINITY);
    for &p in &probes {
        let v = g(p);
        if v > best_g {
            best_g = v;
            best_r = p;
        }
    }
    // Golden-section refinement around the best probe.
    let mut lo = (best_r / 4.0).max(0.0);
    let mut hi = (best_r * 4.0).min(rmax);
    let inv_phi = 0.618_033_988_749_895;
    for _ in 0..90 {
        let m1 = hi - inv_phi * (hi - lo);
        let m2 = lo + inv_phi * (hi - lo);
        if g(m1) < g(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let mode = 0.5 * (lo + hi);
    let gmode = g(mode).max(best_g);
    // Curvature-based width estimate.
    let delta = 1e-3 * (1.0 + mode);
    let curv = (g(mode + delta) + g((mode - delta).max(delta * 0.5)) - 2.0 * g(mode)) / (delta * delta);
    let width = if curv < -1e-12 { (-1.0 / curv).sqrt() } else { 1.0 + mode };
    let width = width.clamp(1e-6 * (1.0 + mode), 10.0 * (1.0 + mode));
    // Expand the window until the integrand is negligible.
    let drop = 80.0;
    let mut left = mode;
    while left > 0.0 && g(left) > gmode - drop {
        left = (left - width).max(0.0);
        if left == 0.0 {
            break;
        }
    }
    let mut right = mode;
    let mut steps = 0;
    while right < rmax && g(right) > gmode - drop && steps < 10_000 {
        right = (right + width).min(rmax);
        steps += 1;
        if right == rmax {
            break;
        }
    }
    // Panel cuts: geometric fan around the mode plus the breakpoints.
    let mut cuts = vec![left, right.min(1e300)];
    let mut k = 1.0;
    while k <= 64.0 {
        for s in [-1.0, 1.0] {
            let c = mode + s * k * width;
            if c > left && c < right {
                cuts.push(c);
            }
        }
        k *= 2.0;
    }
    for &b in breaks {
        if b > left && b < right {
            cuts.push(b);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + a.abs()));
    let (nodes, weights) = panel_rule(&cuts, 24);
    // Log-sum-exp accumulation.
    let mut terms: Vec<f64> = Vec::with_capacity(nodes.len());
    let mut m = f64::NEG_INFINITY;
    for (&r, &w) in nodes.iter().zip(&weights) {
        let t = g(r) + w.ln();
        terms.push(t);
        m = m.max(t);
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// log density of |x| under gamma_n, up to the normalization:
/// (n-1) ln r - r^2/2.
fn chi_log_kernel(n: usize, r: f64) -> f64 {
    (n as f64 - 1.0) * r.ln() - 0.5 * r * r
}

/// E[f(R)] for R = |x|, x ~ gamma_n. `f` must be finite on (0, inf) and of
/// at most polynomial growth; `breaks` marks its kinks.
pub fn chi_expectation(n: usize, f: &dyn Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let s = (n as f64).sqrt();
    let lo = (s - 14.0).max(0.0);
    let hi = s + 14.0;
    let mut cuts = vec![lo, 0.25 * (3.0 * lo + hi), s.max(lo), 0.25 * (lo + 3.0 * hi), hi];
    for &b in breaks {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let (nodes, weights) = panel_rule(&cuts, 32);
    let mut lw: Vec<f64> = Vec::with_capacity(nodes.len());
    let mut m = f64::NEG_INFINITY;
    for (&r, &w) in nodes.iter().zip(&weights) {
        let t = if r > 0.0 { chi_log_kernel(n, r) + w.ln() } else { f64::NEG_INFINITY };
        lw.push(t);
        m = m.max(t);
    }
    let mut den = 0.0;
    let mut num = 0.0;
    for (k, &r) in nodes.iter().enumerate() {
        let w = (lw[k] - m).exp();
        den += w;
        num += w * f(r);
    }
    num / den
}

/// E[e^{log_f(R)}] for R = |x|, x ~ gamma_n, stable when either factor
/// overflows f64 on its own. Used for the I(eps) integrals and for
/// volume ratios at large n.
pub fn chi_expectation_log_factor(n: usize, log_f: &dyn Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let num = log_integral_exp(&|r| log_f(r) + chi_log_kernel(n, r), f64::INFINITY, breaks);
    let den = log_integral_exp(&|r| chi_log_kernel(n, r), f64::INFINITY, breaks);
    (num - den).exp()
}

#[allow(clippy::needless_range_loop)] // corner indices double as bit masks
/// log of integral e^{-phi} over the grid box, integrating the same
/// multilinear interpolation the grid evaluates. Cells touching a +inf
/// corner contribute nothing (the interpolant is +inf on them). 1-D cells
/// integrate the piecewise exponential in closed form; higher dimensions
/// use per-cell Gauss-Legendre on the multilinear exponent.
pub fn log_integral_exp_neg_grid(grid: &Grid) -> f64 {
    let n = grid.dim();
    let mut acc = LogSum::new();
    match n {
        1 => {
            let h = grid.spacing()[0];
            let vals = grid.values();
            for j in 0..grid.shape()[0] - 1 {
                let (a, b) = (vals[j], vals[j + 1]);
                if a.is_inf() || b.is_inf() {
                    continue;
                }
                // integral over the cell of e^{-lerp(a, b)}:
                // e^{-min} h (1 - e^{-d}) / d with d = |b - a|.
                let m = a.raw().min(b.raw());
                let d = (a.raw() - b.raw()).abs();
                let factor = if d > 1e-12 { (-(-d).exp_m1()) / d } else { 1.0 };
                acc.add(-m + h.ln() + factor.ln());
            }
        }
        _ => {
            let shape = grid.shape().to_vec();
            if shape.iter().any(|&m| m < 2) {
                return f64::NEG_INFINITY; // zero-volume box
            }
            // Per cell: the last axis integrates in closed form (the
            // exponent is affine along it); GL-12 handles the remaining
            // smooth axes.
            let (gx, gw) = gauss_legendre(12);
            let log_cell_vol: f64 = grid.spacing().iter().map(|h| h.ln()).sum();
            let mut idx = vec![0usize; n];
            let corners = 1usize << n;
            let mut corner_vals = vec![0.0f64; corners];
            let mut cidx = vec![0usize; n];
            'cells: loop {
                let mut finite = true;
                for corner in 0..corners {
                    for d in 0..n {
                        cidx[d] = idx[d] + ((corner >> d) & 1);
                    }
                    match grid.value(&cidx).finite_value() {
                        Some(v) => corner_vals[corner] = v,
                        None => {
                            finite = false;
                            break;
                        }
                    }
                }
                if finite {
                    // Tensor GL over the first n-1 axes.
                    let m = n - 1;
                    let mut q = vec![0usize; m];
                    'quad: loop {
                        let mut logw = log_cell_vol;
                        // Multilinear collapse onto the last axis: exponent
                        // = a + b * u_last.
                        let mut a = 0.0;
                        let mut b = 0.0;
                        for corner in 0..corners {
                            let mut cw = 1.0;
                            for d in 0..m {
                                let u = 0.5 * (gx[q[d]] + 1.0);
                                cw *= if (corner >> d) & 1 == 1 { u } else { 1.0 - u };
                            }
                            if (corner >> m) & 1 == 1 {
                                b += cw * corner_vals[corner];
                            } else {
                                a += cw * corner_vals[corner];
                            }
                        }
                        for d in 0..m {
                            logw += (0.5 * gw[q[d]]).ln();
                        }
                        // integral_0^1 e^{-(a + (b - a) t)} dt.
                        acc.add(logw - a + log_expint(b - a));
                        for d in (0..m).rev() {
                            q[d] += 1;
                            if q[d] < gx.len() {
                                continue 'quad;
                            }
                            q[d] = 0;
                            if d == 0 {
                                break 'quad;
                            }
                        }
                    }
                }
                for d in (0..n).rev() {
                    idx[d] += 1;
                    if idx[d] + 1 < shape[d] {
                        continue 'cells;
                    }
                    idx[d] = 0;
                    if d == 0 {
                        break 'cells;
                    }
                }
            }
        }
    }
    acc.value()
}

/// ln of integral_0^1 e^{-b t} dt = ln((1 - e^{-b}) / b), stable for any b.
fn log_expint(b: f64) -> f64 {
    if b.abs() < 1e-9 {
        return -0.5 * b + b * b / 24.0;
    }
    if b > 0.0 {
        (-(-b).exp_m1()).ln() - b.ln()
    } else {
        let a = -b;
        a + (-(-a).exp_m1()).ln() - a.ln()
    }
}

/// Online log-sum-exp accumulator.
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> LogSum {
        LogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn add(&mut self, t: f64) {
        if t == f64::NEG_INFINITY {
            return;
        }
        if t <= self.max {
            self.sum += (t - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - t).exp() + 1.0;
            self.max = t;
        }
    }

    fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// One standard normal draw (Box-Muller).
pub(crate) fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub(crate) fn random_unit_vector<R: rand::Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let len: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len > 1e-12 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let int_x6: f64 = x.iter().zip(&w).map(|(&t, &w)| w * t.powi(6)).sum();
        assert_relative_eq!(int_x6, 2.0 / 7.0, epsilon = 1e-13);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_mass_is_one() {
        for n in 1..=3 {
            let v = gaussian_expectation_nd(n, &[], |_| ExtReal::finite(1.0)).expect_finite();
            assert_relative_eq!(v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn gaussian_second_moment() {
        let v = gaussian_expectation_nd(2, &[], |x| ExtReal::finite(x[0] * x[0])).expect_finite();
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_abs_moment() {
        // E|x_1| = sqrt(2/pi); the kink at 0 sits on a panel boundary.
        let v = gaussian_expectation_nd(1, &[], |x| ExtReal::finite(x[0].abs())).expect_finite();
        assert_relative_eq!(v, (2.0 / std::f64::consts::PI).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn inf_integrand_reports_witness() {
        let v = gaussian_expectation_nd(1, &[], |x| {
            if x[0] > 1.0 {
                ExtReal::INF
            } else {
                ExtReal::ZERO
            }
        });
        match v {
            QuadValue::Infinite { witness } => assert!(witness[0] > 1.0),
            QuadValue::Finite(_) => panic!("expected +inf"),
        }
    }

    #[test]
    fn chi_mean_matches_closed_form() {
        // E|x| in n = 2 is sqrt(pi/2).
        let v = chi_expectation(2, &|r| r, &[]);
        assert_relative_eq!(v, (std::f64::consts::PI / 2.0).sqrt(), epsilon = 1e-10);
        // E|x|^2 = n at n = 1000.
        let v = chi_expectation(1000, &|r| r * r, &[]);
        assert_relative_eq!(v, 1000.0, max_relative = 1e-10);
    }

    #[test]
    fn log_integral_gaussian() {
        // integral_0^inf e^{-r^2/2} dr = sqrt(pi/2).
        let v = log_integral_exp(&|r| -0.5 * r * r, f64::INFINITY, &[]);
        assert_relative_eq!(v.exp(), (std::f64::consts::PI / 2.0).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn log_integral_large_n_kernel() {
        // integral r^{n-1} e^{-r^2/2} dr = 2^{n/2-1} Gamma(n/2).
        let n = 400;
        let v = log_integral_exp(&|r| chi_log_kernel(n, r), f64::INFINITY, &[]);
        let expected = (n as f64 / 2.0 - 1.0) * 2.0_f64.ln()
            + statrs::function::gamma::ln_gamma(n as f64 / 2.0);
        assert_relative_eq!(v, expected, max_relative = 1e-12);
    }

    #[test]
    fn grid_gaussian_mass() {
        // The integral is of the interpolated object: chords sit above the
        // convex exponent, so the mass undershoots sqrt(2 pi) by O(h^2).
        let g = Grid::sample_1d(10.0, 161, |x| ExtReal::finite(0.5 * x[0] * x[0])).unwrap();
        let v = log_integral_exp_neg_grid(&g).exp();
        assert_relative_eq!(v, (2.0 * std::f64::consts::PI).sqrt(), max_relative = 2e-3);
        // Exact for a piecewise-linear potential: e^{-|x|} on [-6, 6].
        let g = Grid::sample_1d(6.0, 25, |x| ExtReal::finite(x[0].abs())).unwrap();
        let expected = 2.0 * (1.0 - (-6.0_f64).exp());
        assert_relative_eq!(log_integral_exp_neg_grid(&g).exp(), expected, epsilon = 1e-12);
    }

    #[test]
    fn grid_cell_integral_2d_vs_product() {
        // Separable |x| + |y| on a coarse grid: the 2-D cell rule must
        // match the product of exact 1-D integrals.
        let g1 = Grid::sample_1d(3.0, 7, |x| ExtReal::finite(x[0].abs())).unwrap();
        let one_d = log_integral_exp_neg_grid(&g1);
        let g2 = Grid::sample(
            vec![-3.0, -3.0],
            vec![1.0, 1.0],
            vec![7, 7],
            |x| ExtReal::finite(x[0].abs() + x[1].abs()),
        )
        .unwrap();
        assert_relative_eq!(log_integral_exp_neg_grid(&g2), 2.0 * one_d, epsilon = 1e-9);
    }
}
