//! Convex bodies and their classical mean-width machinery: exact support
//! functions, spherical mean width, the dilation-limit definition, and
//! Steiner-polynomial fits recovering quermassintegrals from Monte Carlo
//! volumes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::meanwidth::{EstimateReport, Method};
use crate::quadrature::random_unit_vector;

/// A convex body with an exactly evaluable support function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ConvexBody {
    Ball { center: Vec<f64>, radius: f64 },
    Box { intervals: Vec<(f64, f64)> },
    Polytope { vertices: Vec<Vec<f64>> },
    Segment { a: Vec<f64>, b: Vec<f64> },
}

impl ConvexBody {
    pub fn unit_ball(dim: usize) -> ConvexBody {
        ConvexBody::Ball { center: vec![0.0; dim], radius: 1.0 }
    }

    /// The centered cube [-half, half]^dim.
    pub fn cube(dim: usize, half: f64) -> ConvexBody {
        ConvexBody::Box { intervals: vec![(-half, half); dim] }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Box { intervals } => intervals.len(),
            ConvexBody::Polytope { vertices } => vertices.first().map_or(0, Vec::len),
            ConvexBody::Segment { a, .. } => a.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ConvexBody::Ball { radius, .. } => *radius >= 0.0,
            ConvexBody::Box { intervals } => {
                !intervals.is_empty() && intervals.iter().all(|(lo, hi)| lo <= hi)
            }
            ConvexBody::Polytope { vertices } => {
                !vertices.is_empty() && vertices.iter().all(|v| v.len() == self.dim())
            }
            ConvexBody::Segment { a, b } => !a.is_empty() && a.len() == b.len(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("body", "empty or inconsistent body"))
        }
    }

    /// h_K(x) = sup_{y in K} <x, y>, exact per representation.
    pub fn support(&self, x: &[f64]) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => radius * norm(x) + dot(x, center),
            ConvexBody::Box { intervals } => x
                .iter()
                .zip(intervals)
                .map(|(&xi, &(lo, hi))| (xi * lo).max(xi * hi))
                .sum(),
            ConvexBody::Polytope { vertices } => vertices
                .iter()
                .map(|v| dot(x, v))
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::Segment { a, b } => dot(x, a).max(dot(x, b)),
        }
    }

    /// Euclidean distance from `x` to the body (0 inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => {
                let d: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (d.sqrt() - radius).max(0.0)
            }
            ConvexBody::Box { intervals } => x
                .iter()
                .zip(intervals)
                .map(|(&xi, &(lo, hi))| {
                    let r = if xi < lo { lo - xi } else if xi > hi { xi - hi } else { 0.0 };
                    r * r
                })
                .sum::<f64>()
                .sqrt(),
            ConvexBody::Segment { a, b } => {
                let mut ab2 = 0.0;
                let mut t = 0.0;
                for i in 0..a.len() {
                    let d = b[i] - a[i];
                    ab2 += d * d;
                    t += (x[i] - a[i]) * d;
                }
                let t = if ab2 > 0.0 { (t / ab2).clamp(0.0, 1.0) } else { 0.0 };
                x.iter()
                    .enumerate()
                    .map(|(i, &xi)| {
                        let p = a[i] + t * (b[i] - a[i]);
                        (xi - p) * (xi - p)
                    })
                    .sum::<f64>()
                    .sqrt()
            }
            ConvexBody::Polytope { vertices } => polytope_distance(vertices, x),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Scales the body about the origin.
    pub fn scale(&self, t: f64) -> ConvexBody {
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: center.iter().map(|c| c * t).collect(),
                radius: radius * t,
            },
            ConvexBody::Box { intervals } => ConvexBody::Box {
                intervals: intervals.iter().map(|&(lo, hi)| (lo * t, hi * t)).collect(),
            },
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices
                    .iter()
                    .map(|v| v.iter().map(|c| c * t).collect())
                    .collect(),
            },
            ConvexBody::Segment { a, b } => ConvexBody::Segment {
                a: a.iter().map(|c| c * t).collect(),
                b: b.iter().map(|c| c * t).collect(),
            },
        }
    }

    pub fn translate(&self, shift: &[f64]) -> ConvexBody {
        let add = |v: &[f64]| v.iter().zip(shift).map(|(a, s)| a + s).collect::<Vec<_>>();
        match self {
            ConvexBody::Ball { center, radius } => {
                ConvexBody::Ball { center: add(center), radius: *radius }
            }
            ConvexBody::Box { intervals } => ConvexBody::Box {
                intervals: intervals
                    .iter()
                    .zip(shift)
                    .map(|(&(lo, hi), s)| (lo + s, hi + s))
                    .collect(),
            },
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(|v| add(v)).collect(),
            },
            ConvexBody::Segment { a, b } => ConvexBody::Segment { a: add(a), b: add(b) },
        }
    }

    /// An axis-aligned box containing the body.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let n = self.dim();
        (0..n)
            .map(|d| {
                let mut e = vec![0.0; n];
                e[d] = 1.0;
                let hi = self.support(&e);
                e[d] = -1.0;
                let lo = -self.support(&e);
                (lo, hi)
            })
            .collect()
    }

    /// Diameter estimate from the bounding box.
    pub fn diameter(&self) -> f64 {
        self.bounding_box()
            .iter()
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Distance from `x` to conv(vertices) by Frank-Wolfe on the simplex of
/// vertex weights. Adequate for the small vertex lists used in Monte Carlo
/// membership tests; not a general-purpose QP solver.
fn polytope_distance(vertices: &[Vec<f64>], x: &[f64]) -> f64 {
    let n = x.len();
    let m = vertices.len();
    // Start from the vertex nearest to x.
    let mut point: Vec<f64> = vertices
        .iter()
        .min_by(|u, v| {
            let du: f64 = u.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            let dv: f64 = v.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            du.partial_cmp(&dv).unwrap()
        })
        .unwrap()
        .clone();
    for _ in 0..120 {
        // Gradient of |p - x|^2 is 2(p - x); the linear minimization oracle
        // over the hull is the support in direction x - p.
        let dir: Vec<f64> = x.iter().zip(&point).map(|(a, b)| a - b).collect();
        let (mut best, mut best_v) = (f64::NEG_INFINITY, 0usize);
        for (k, v) in vertices.iter().enumerate() {
            let s = dot(&dir, v);
            if s > best {
                best = s;
                best_v = k;
            }
        }
        let v = &vertices[best_v];
        // Exact line search toward the chosen vertex.
        let dv: Vec<f64> = v.iter().zip(&point).map(|(a, b)| a - b).collect();
        let denom = dot(&dv, &dv);
        if denom <= 1e-30 {
            break;
        }
        let gamma = (dot(&dir, &dv) / denom).clamp(0.0, 1.0);
        if gamma <= 1e-15 {
            break;
        }
        for i in 0..n {
            point[i] += gamma * dv[i];
        }
    }
    let _ = m;
    x.iter()
        .zip(&point)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Volume of the unit ball in dimension n.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    std::f64::consts::PI.powf(half) / statrs::function::gamma::gamma(half + 1.0)
}

/// Quermassintegral fit from Monte Carlo Steiner volumes.
#[derive(Debug, Clone, Serialize)]
pub struct QuermassReport {
    /// V_0 .. V_n, so that |K + tD| = sum_i binom(n, i) V_{n-i} t^i.
    pub coefficients: Vec<f64>,
    pub fit_residual: f64,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    pub volume_errors: Vec<f64>,
    /// |D| * M*(K) recomputed from the spherical definition, for the
    /// V_1 consistency check.
    pub v1_from_mean_width: f64,
}

/// M*(K) = int_{S^{n-1}} h_K dsigma. Deterministic angular quadrature in
/// dimension 2, seeded sphere Monte Carlo otherwise.
pub fn mean_width_body(body: &ConvexBody, seed: u64) -> Result<EstimateReport> {
    body.validate()?;
    let n = body.dim();
    if n == 2 {
        let m = 16384;
        let mut acc = 0.0;
        for k in 0..m {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
            acc += body.support(&[th.cos(), th.sin()]);
        }
        return Ok(EstimateReport::quadrature(acc / m as f64, m));
    }
    let samples = 400_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..samples {
        let theta = random_unit_vector(&mut rng, n);
        let h = body.support(&theta);
        sum += h;
        sumsq += h * h;
    }
    let mean = sum / samples as f64;
    let var = (sumsq / samples as f64 - mean * mean).max(0.0);
    Ok(EstimateReport::monte_carlo(mean, (var / samples as f64).sqrt(), samples, seed))
}

/// Monte Carlo volume of K + tD via the membership test dist(x, K) <= t,
/// rejection-sampled from the bounding box. Chunked partial sums keep the
/// result identical whether or not the chunks run in parallel.
pub fn volume_dilated(body: &ConvexBody, t: f64, samples: usize, seed: u64) -> (f64, f64) {
    let bb: Vec<(f64, f64)> = body
        .bounding_box()
        .into_iter()
        .map(|(lo, hi)| (lo - t, hi + t))
        .collect();
    let box_vol: f64 = bb.iter().map(|(lo, hi)| hi - lo).product();
    let chunk = 65536;
    let chunks: Vec<usize> = (0..samples.div_ceil(chunk)).collect();
    let hits: Vec<u64> = chunks
        .par_iter()
        .map(|&c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (c as u64).wrapping_mul(0x9E3779B97F4A7C15));
            let lo = c * chunk;
            let hi = ((c + 1) * chunk).min(samples);
            let mut count = 0u64;
            let mut x = vec![0.0; bb.len()];
            for _ in lo..hi {
                for (d, &(a, b)) in bb.iter().enumerate() {
                    x[d] = rng.gen_range(a..b);
                }
                if body.distance(&x) <= t {
                    count += 1;
                }
            }
            count
        })
        .collect();
    let hit: u64 = hits.iter().sum();
    let p = hit as f64 / samples as f64;
    let vol = p * box_vol;
    let err = box_vol * (p * (1.0 - p) / samples as f64).sqrt();
    (vol, err)
}

/// M*(K) through the dilation limit (|D + eps K| - |D|) / (n |D| eps).
/// One common sample set serves every epsilon: for each point we record the
/// smallest dilation that captures it, which makes the secants smooth
/// enough to extrapolate.
pub fn mean_width_body_limit(
    body: &ConvexBody,
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    body.validate()?;
    let n = body.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::invalid("dim", "limit path supports n in {2, 3}"));
    }
    let eps_schedule = [0.4, 0.2, 0.1, 0.05];
    let eps_max = eps_schedule[0];
    // Bounding box of D + eps_max K.
    let kb = body.bounding_box();
    let bb: Vec<(f64, f64)> = kb
        .iter()
        .map(|&(lo, hi)| ((eps_max * lo).min(0.0) - 1.0, (eps_max * hi).max(0.0) + 1.0))
        .collect();
    let box_vol: f64 = bb.iter().map(|(lo, hi)| hi - lo).product();
    let ball = ConvexBody::unit_ball(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; eps_schedule.len()];
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        for (d, &(a, b)) in bb.iter().enumerate() {
            x[d] = rng.gen_range(a..b);
        }
        // x in D + eps K  <=>  dist(x, eps K) <= 1; monotone in eps.
        for (j, &eps) in eps_schedule.iter().enumerate() {
            if body.scale(eps).distance(&x) <= 1.0 {
                counts[j] += 1;
            }
        }
    }
    let ball_vol = unit_ball_volume(n);
    let _ = ball;
    let mut slopes = Vec::new();
    for (j, &eps) in eps_schedule.iter().enumerate() {
        let vol = counts[j] as f64 / samples as f64 * box_vol;
        slopes.push((vol - ball_vol) / (eps * n as f64 * ball_vol));
    }
    // Affine extrapolation of the last secants to eps = 0.
    let ks = eps_schedule.len();
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..ks {
        sx += eps_schedule[j];
        sy += slopes[j];
        sxx += eps_schedule[j] * eps_schedule[j];
        sxy += eps_schedule[j] * slopes[j];
    }
    let det = ks as f64 * sxx - sx * sx;
    let intercept = (sy * sxx - sx * sxy) / det;
    let mut report = EstimateReport::monte_carlo(
        intercept,
        (slopes[ks - 1] - intercept).abs().max(1e-12),
        samples,
        seed,
    );
    report.method = Method::FiniteDifference;
    for (j, &eps) in eps_schedule.iter().enumerate() {
        report
            .diagnostics
            .insert(format!("slope_eps_{eps}"), format!("{:.6}", slopes[j]));
    }
    Ok(report)
}

/// Fits the Steiner polynomial |K + tD| = sum_i binom(n,i) V_{n-i} t^i by
/// least squares over Monte Carlo volumes at the given radii.
pub fn steiner_fit(
    body: &ConvexBody,
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<QuermassReport> {
    body.validate()?;
    let n = body.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::invalid("dim", "steiner_fit supports n in {2, 3}"));
    }
    if radii.len() < n + 2 {
        return Err(Error::invalid("radii", format!("need at least {} radii", n + 2)));
    }
    let spread = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / radii.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-12);
    if !(spread > 1.2) {
        return Err(Error::invalid("radii", "radii are too clustered for a stable fit"));
    }
    let mut volumes = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    for (j, &t) in radii.iter().enumerate() {
        let (v, e) = volume_dilated(body, t, samples_per_radius, seed.wrapping_add(j as u64));
        volumes.push(v);
        errors.push(e);
    }
    // Least squares for the monomial coefficients c_i of sum c_i t^i.
    let deg = n;
    let mut ata = vec![vec![0.0; deg + 1]; deg + 1];
    let mut atb = vec![0.0; deg + 1];
    for (j, &t) in radii.iter().enumerate() {
        let row: Vec<f64> = (0..=deg).map(|i| t.powi(i as i32)).collect();
        for p in 0..=deg {
            for q in 0..=deg {
                ata[p][q] += row[p] * row[q];
            }
            atb[p] += row[p] * volumes[j];
        }
    }
    let coef = solve_dense(&mut ata, &mut atb)?;
    let mut residual = 0.0;
    for (j, &t) in radii.iter().enumerate() {
        let fit: f64 = coef.iter().enumerate().map(|(i, c)| c * t.powi(i as i32)).sum();
        residual += (fit - volumes[j]) * (fit - volumes[j]);
    }
    // c_i = binom(n, i) V_{n-i}  =>  V_{n-i} = c_i / binom(n, i).
    let mut quermass = vec![0.0; n + 1];
    for i in 0..=deg {
        quermass[n - i] = coef[i] / binomial(n, i);
    }
    let mw = mean_width_body(body, seed)?;
    Ok(QuermassReport {
        coefficients: quermass,
        fit_residual: residual.sqrt(),
        radii: radii.to_vec(),
        volumes,
        volume_errors: errors,
        v1_from_mean_width: unit_ball_volume(n) * mw.value.raw(),
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}

#[allow(clippy::needless_range_loop)]
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-12 {
            return Err(Error::invalid("radii", "ill-conditioned Steiner fit"));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        let mut acc = b[col];
        for k in col + 1..m {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn support_values() {
        let ball = ConvexBody::unit_ball(2);
        assert_relative_eq!(ball.support(&[0.6, 0.8]), 1.0);
        let cube = ConvexBody::cube(2, 1.0);
        assert_relative_eq!(cube.support(&[1.0, 1.0]), 2.0);
        let seg = ConvexBody::Segment { a: vec![0.0, 0.0], b: vec![3.0, 0.0] };
        assert_relative_eq!(seg.support(&[1.0, 1.0]), 3.0);
        let poly = ConvexBody::Polytope {
            vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert_relative_eq!(poly.support(&[1.0, 2.0]), 2.0);
    }

    #[test]
    fn support_is_minkowski_linear() {
        // h_{lambda K + T} = lambda h_K + h_T on random directions, with
        // the Minkowski sum built explicitly for box + box.
        let k = ConvexBody::Box { intervals: vec![(-1.0, 0.5), (-0.25, 1.0)] };
        let t = ConvexBody::Box { intervals: vec![(0.0, 2.0), (-1.0, 1.0)] };
        let lambda = 2.5;
        let lk = k.scale(lambda);
        let sum = ConvexBody::Box {
            intervals: vec![
                (lk_interval(&lk, 0).0 + 0.0, lk_interval(&lk, 0).1 + 2.0),
                (lk_interval(&lk, 1).0 - 1.0, lk_interval(&lk, 1).1 + 1.0),
            ],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..64 {
            let dir = random_unit_vector(&mut rng, 2);
            let lhs = sum.support(&dir);
            let rhs = lambda * k.support(&dir) + t.support(&dir);
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    fn lk_interval(b: &ConvexBody, d: usize) -> (f64, f64) {
        match b {
            ConvexBody::Box { intervals } => intervals[d],
            _ => unreachable!(),
        }
    }

    #[test]
    fn classical_urysohn_on_random_polytopes() {
        // M*(K) >= (|K| / |D|)^{1/n} via Monte Carlo volumes.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [2usize, 3] {
            for case in 0..4 {
                let m = 4 + n + case;
                let vertices: Vec<Vec<f64>> = (0..m)
                    .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                    .collect();
                let body = ConvexBody::Polytope { vertices };
                let mw = mean_width_body(&body, 100 + case as u64).unwrap();
                let (vol, err) = volume_dilated(&body, 1e-6, 200_000, 200 + case as u64);
                let ratio = ((vol + 4.0 * err) / unit_ball_volume(n)).powf(1.0 / n as f64);
                assert!(
                    mw.value.raw() + 4.0 * mw.std_error >= ratio,
                    "n={n} case {case}: M* {} vs (|K|/|D|)^(1/n) {ratio}",
                    mw.value
                );
            }
        }
    }

    #[test]
    fn distances() {
        let cube = ConvexBody::cube(2, 1.0);
        assert_relative_eq!(cube.distance(&[2.0, 0.0]), 1.0);
        assert_relative_eq!(cube.distance(&[2.0, 2.0]), std::f64::consts::SQRT_2);
        assert_eq!(cube.distance(&[0.3, -0.9]), 0.0);
        let poly = ConvexBody::Polytope {
            vertices: vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]],
        };
        assert_relative_eq!(poly.distance(&[-1.0, -1.0]), std::f64::consts::SQRT_2, epsilon = 1e-6);
        assert!(poly.distance(&[0.5, 0.5]) < 1e-7);
    }

    #[test]
    fn ball_mean_width_is_one() {
        let report = mean_width_body(&ConvexBody::unit_ball(2), 1).unwrap();
        assert_relative_eq!(report.value.raw(), 1.0, epsilon = 1e-9);
        let report3 = mean_width_body(&ConvexBody::unit_ball(3), 1).unwrap();
        assert_relative_eq!(report3.value.raw(), 1.0, epsilon = 5e-3);
    }

    #[test]
    fn square_mean_width() {
        let report = mean_width_body(&ConvexBody::cube(2, 1.0), 1).unwrap();
        assert_relative_eq!(report.value.raw(), 4.0 / std::f64::consts::PI, epsilon = 1e-6);
    }

    #[test]
    fn translation_leaves_mean_width() {
        let k = ConvexBody::cube(2, 1.0);
        let kt = k.translate(&[0.7, -0.3]);
        let a = mean_width_body(&k, 1).unwrap().value.raw();
        let b = mean_width_body(&kt, 1).unwrap().value.raw();
        assert_relative_eq!(a, b, epsilon = 1e-9);
    }

    #[test]
    fn volume_of_ball() {
        let (v, e) = volume_dilated(&ConvexBody::Ball { center: vec![0.0; 2], radius: 0.0 }, 1.0, 200_000, 3);
        assert!((v - std::f64::consts::PI).abs() < 4.0 * e + 1e-3);
    }

    #[test]
    fn steiner_on_segment() {
        // |K + tD| = 2 L t + pi t^2 for a segment of length L in the plane.
        let body = ConvexBody::Segment { a: vec![0.0, 0.0], b: vec![2.0, 0.0] };
        let radii = [0.2, 0.35, 0.5, 0.8, 1.1, 1.5];
        let rep = steiner_fit(&body, &radii, 150_000, 11).unwrap();
        // V_2 = |K| = 0, C(2,1) V_1 = 2 L  =>  V_1 = L = 2.
        assert!(rep.coefficients[2].abs() < 0.05);
        assert_relative_eq!(rep.coefficients[1], 2.0, max_relative = 0.05);
        assert_relative_eq!(rep.coefficients[0], std::f64::consts::PI, max_relative = 0.05);
    }

    #[test]
    fn limit_path_for_point_is_zero() {
        let body = ConvexBody::Ball { center: vec![0.0, 0.0], radius: 0.0 };
        let rep = mean_width_body_limit(&body, 200_000, 5).unwrap();
        assert!(rep.value.raw().abs() < 0.02);
    }
}
