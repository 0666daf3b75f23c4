//! The algebra of log-concave functions: Asplund products (sup-convolution),
//! lambda-homotheties, pointwise scaling, translation, and truncation.
//!
//! On potentials the Asplund product is the infimal convolution, computed
//! in conjugate space: exactly for radial profiles and analytic families,
//! and by the slope-merge form of L(L phi_f + L phi_g) for 1-D grids. The
//! n-D grid route takes the discrete supremum over node splits directly;
//! sampled slope grids would reintroduce exactly the convexification error
//! the conjugate path is meant to avoid.

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid::Grid;
use crate::legendre::{analytic_to_grid, lower_convex_hull_1d, radial_profile_of_analytic, GridSpec};
use crate::potential::{Analytic, LogConcaveFn, Potential, Repr};

/// (f * g)(x) = sup_{x1 + x2 = x} f(x1) g(x2). `out` picks the output grid
/// for grid inputs; the default covers the Minkowski sum of the supports.
pub fn asplund(f: &LogConcaveFn, g: &LogConcaveFn, out: Option<&GridSpec>) -> Result<LogConcaveFn> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: g.dim() });
    }
    let phi = infimal_convolution(f.phi(), g.phi(), out)?;
    LogConcaveFn::new(phi)
}

fn infimal_convolution(pf: &Potential, pg: &Potential, out: Option<&GridSpec>) -> Result<Potential> {
    match (pf.repr(), pg.repr()) {
        (Repr::Radial(a), Repr::Radial(b)) => {
            // Conjugate profiles add; transform back. Exact on the pieces.
            let eta = a.conjugate().sum(&b.conjugate());
            Ok(Potential::from_radial(pf.dim(), eta.conjugate()))
        }
        (Repr::Analytic(a), Repr::Analytic(b)) => analytic_infconv(pf.dim(), a, b, out),
        (Repr::Grid(a), Repr::Grid(b)) => {
            if a.dim() == 1 {
                grid_infconv_1d(a, b, out)
            } else {
                grid_infconv_nd(a, b, out)
            }
        }
        // Mixed analytic/radial pairs: push the analytic side into the
        // matching carrier.
        (Repr::Analytic(a), Repr::Radial(_)) => match radial_profile_of_analytic(a) {
            Some(p) => infimal_convolution(&Potential::from_radial(pf.dim(), p), pg, out),
            None => infimal_convolution(&analytic_to_grid(pf, 129)?, pg, out),
        },
        (Repr::Radial(_), Repr::Analytic(_)) => infimal_convolution(pg, pf, out),
        (Repr::Analytic(_), Repr::Grid(_)) => {
            infimal_convolution(&analytic_to_grid(pf, 129)?, pg, out)
        }
        (Repr::Grid(_), Repr::Analytic(_)) => infimal_convolution(pg, pf, out),
        (Repr::Radial(p), Repr::Grid(_)) => {
            let gr = radial_to_grid(pf.dim(), p, pg.as_grid().unwrap())?;
            infimal_convolution(&gr, pg, out)
        }
        (Repr::Grid(_), Repr::Radial(_)) => infimal_convolution(pg, pf, out),
    }
}

/// Samples a radial profile onto a grid commensurate with `like` (same
/// per-axis spacings), so the n-D split route can pair them node-exactly.
fn radial_to_grid(dim: usize, p: &crate::radial::RadialProfile, like: &Grid) -> Result<Potential> {
    let target_half = p.rmax().min(12.0);
    let mut origin = Vec::with_capacity(dim);
    let mut spacing = Vec::with_capacity(dim);
    let mut shape = Vec::with_capacity(dim);
    for d in 0..dim {
        let h = like.spacing()[d];
        let steps = ((target_half / h).ceil() as usize).max(8);
        origin.push(-(steps as f64) * h);
        spacing.push(h);
        shape.push(2 * steps + 1);
    }
    let g = Grid::sample(origin, spacing, shape, |x| {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        p.eval(r)
    })?;
    Potential::from_grid(g)
}

fn analytic_infconv(
    dim: usize,
    a: &Analytic,
    b: &Analytic,
    out: Option<&GridSpec>,
) -> Result<Potential> {
    match (a, b) {
        (
            Analytic::Quadratic { scale: s1, center: c1, offset: o1 },
            Analytic::Quadratic { scale: s2, center: c2, offset: o2 },
        ) => {
            // Conjugates |y|^2/(2 s) + <y, c> - o add into one scaled
            // quadratic; transform back in closed form.
            let s = s1 * s2 / (s1 + s2);
            let center: Vec<f64> = c1.iter().zip(c2).map(|(x, y)| x + y).collect();
            Ok(Potential::from_analytic(Analytic::Quadratic {
                scale: s,
                center,
                offset: o1 + o2,
            }))
        }
        (
            Analytic::IndicatorBody { body: k1, linear: l1, offset: o1 },
            Analytic::IndicatorBody { body: k2, linear: l2, offset: o2 },
        ) if l1.iter().all(|&v| v == 0.0) && l2.iter().all(|&v| v == 0.0) => {
            let sum = minkowski_sum(k1, k2).ok_or_else(|| {
                Error::invalid("asplund", "unsupported body pair for exact Minkowski sum")
            })?;
            Ok(Potential::from_analytic(Analytic::IndicatorBody {
                body: sum,
                linear: vec![0.0; dim],
                offset: o1 + o2,
            }))
        }
        _ => {
            // No closed form: fall back through grids.
            let ga = analytic_to_grid(&Potential::from_analytic(a.clone()), 129)?;
            let gb = analytic_to_grid(&Potential::from_analytic(b.clone()), 129)?;
            infimal_convolution(&ga, &gb, out)
        }
    }
}

fn minkowski_sum(a: &ConvexBody, b: &ConvexBody) -> Option<ConvexBody> {
    match (a, b) {
        (ConvexBody::Box { intervals: i1 }, ConvexBody::Box { intervals: i2 }) => {
            Some(ConvexBody::Box {
                intervals: i1
                    .iter()
                    .zip(i2)
                    .map(|(&(a1, b1), &(a2, b2))| (a1 + a2, b1 + b2))
                    .collect(),
            })
        }
        (
            ConvexBody::Ball { center: c1, radius: r1 },
            ConvexBody::Ball { center: c2, radius: r2 },
        ) => Some(ConvexBody::Ball {
            center: c1.iter().zip(c2).map(|(x, y)| x + y).collect(),
            radius: r1 + r2,
        }),
        _ => None,
    }
}

/// Exact 1-D infimal convolution of two convex grid potentials: the slopes
/// of the result are the sorted merge of the input hull slopes (this is
/// L(L phi_f + L phi_g) walked kink by kink). The piecewise-linear result
/// is then sampled onto the output grid, +inf outside the summed supports.
fn grid_infconv_1d(a: &Grid, b: &Grid, out: Option<&GridSpec>) -> Result<Potential> {
    let ha = lower_convex_hull_1d(a);
    let hb = lower_convex_hull_1d(b);
    let seg_a = hull_segments(&ha)?;
    let seg_b = hull_segments(&hb)?;
    // Walk breakpoints: start at the summed left ends, append segments in
    // slope order.
    let mut xs = vec![seg_a.x0 + seg_b.x0];
    let mut vs = vec![seg_a.v0 + seg_b.v0];
    let (mut i, mut j) = (0usize, 0usize);
    while i < seg_a.slopes.len() || j < seg_b.slopes.len() {
        let take_a = match (seg_a.slopes.get(i), seg_b.slopes.get(j)) {
            (Some(sa), Some(sb)) => sa <= sb,
            (Some(_), None) => true,
            _ => false,
        };
        let (s, h) = if take_a {
            i += 1;
            (seg_a.slopes[i - 1], seg_a.h)
        } else {
            j += 1;
            (seg_b.slopes[j - 1], seg_b.h)
        };
        xs.push(xs.last().unwrap() + h);
        vs.push(vs.last().unwrap() + s * h);
    }
    let default_spec;
    let spec = match out {
        Some(s) => s,
        None => {
            let h = a.spacing()[0].min(b.spacing()[0]);
            let lo = xs[0];
            let hi = *xs.last().unwrap();
            let len = (((hi - lo) / h).round() as usize + 1).max(2);
            default_spec = GridSpec::axis(lo, (hi - lo) / (len - 1) as f64, len);
            &default_spec
        }
    };
    let mut values = Vec::with_capacity(spec.shape[0]);
    for k in 0..spec.shape[0] {
        let x = spec.node(0, k);
        values.push(eval_pl(&xs, &vs, x));
    }
    let grid = Grid::new(spec.origin.clone(), spec.spacing.clone(), spec.shape.clone(), values)?;
    Potential::from_grid(grid)
}

struct HullSegments {
    x0: f64,
    v0: f64,
    h: f64,
    slopes: Vec<f64>,
}

fn hull_segments(g: &Grid) -> Result<HullSegments> {
    let vals = g.values();
    let first = vals
        .iter()
        .position(|v| v.is_finite())
        .ok_or(Error::EmptyDomain)?;
    let last = vals.len() - 1 - vals.iter().rev().position(|v| v.is_finite()).unwrap();
    let h = g.spacing()[0];
    let mut slopes = Vec::with_capacity(last - first);
    for k in first..last {
        slopes.push((vals[k + 1].raw() - vals[k].raw()) / h);
    }
    Ok(HullSegments { x0: g.axis_node(0, first), v0: vals[first].raw(), h, slopes })
}

fn eval_pl(xs: &[f64], vs: &[f64], x: f64) -> ExtReal {
    let slack = 1e-9 * (1.0 + x.abs());
    if x < xs[0] - slack || x > xs[xs.len() - 1] + slack {
        return ExtReal::INF;
    }
    let k = xs.partition_point(|&t| t < x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let t = if x1 > x0 { ((x - x0) / (x1 - x0)).clamp(0.0, 1.0) } else { 0.0 };
    ExtReal::finite(vs[k - 1] + t * (vs[k] - vs[k - 1]))
}

/// n-D grid route: the discrete supremum over node splits, on a grid
/// commensurate with both inputs.
fn grid_infconv_nd(a: &Grid, b: &Grid, out: Option<&GridSpec>) -> Result<Potential> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
    }
    for d in 0..n {
        if (a.spacing()[d] - b.spacing()[d]).abs() > 1e-12 * a.spacing()[d] {
            return Err(Error::invalid(
                "asplund",
                "n-D grid inputs need equal spacings (resample first)",
            ));
        }
    }
    let default_spec;
    let spec = match out {
        Some(s) => s,
        None => {
            let origin: Vec<f64> = (0..n).map(|d| a.origin()[d] + b.origin()[d]).collect();
            let shape: Vec<usize> = (0..n).map(|d| a.shape()[d] + b.shape()[d] - 1).collect();
            default_spec = GridSpec { origin, spacing: a.spacing().to_vec(), shape };
            &default_spec
        }
    };
    let total: usize = spec.shape.iter().product();
    let mut values = vec![ExtReal::INF; total];
    let mut ia = vec![0usize; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    for (flat, slot) in values.iter_mut().enumerate() {
        let mut rem = flat;
        let mut x = vec![0.0; n];
        for d in (0..n).rev() {
            x[d] = spec.node(d, rem % spec.shape[d]);
            rem /= spec.shape[d];
        }
        let mut best = f64::INFINITY;
        // min over nodes y of a: phi_a(y) + phi_b(x - y).
        'split: loop {
            let mut va = 0.0;
            for d in 0..n {
                y[d] = a.axis_node(d, ia[d]);
                z[d] = x[d] - y[d];
            }
            let fa = a.value(&ia);
            if fa.is_finite() {
                va += fa.raw();
                let fb = b.eval(&z)?;
                if fb.is_finite() {
                    best = best.min(va + fb.raw());
                }
            }
            for d in (0..n).rev() {
                ia[d] += 1;
                if ia[d] < a.shape()[d] {
                    continue 'split;
                }
                ia[d] = 0;
                if d == 0 {
                    break 'split;
                }
            }
        }
        if best.is_finite() {
            *slot = ExtReal::finite(best);
        }
    }
    let grid = Grid::new(spec.origin.clone(), spec.spacing.clone(), spec.shape.clone(), values)?;
    Potential::from_grid(grid)
}

/// (lambda . f)(x) = f(x / lambda)^lambda; on potentials
/// phi -> lambda phi(. / lambda). Exact in every representation.
pub fn homothety(lambda: f64, f: &LogConcaveFn) -> Result<LogConcaveFn> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("need lambda > 0, got {lambda}")));
    }
    let phi = f.phi();
    let out = match phi.repr() {
        Repr::Grid(g) => {
            let origin: Vec<f64> = g.origin().iter().map(|o| o * lambda).collect();
            let spacing: Vec<f64> = g.spacing().iter().map(|h| h * lambda).collect();
            let values: Vec<ExtReal> = g
                .values()
                .iter()
                .map(|v| if v.is_inf() { ExtReal::INF } else { *v * lambda })
                .collect();
            Potential::from_grid(Grid::new(origin, spacing, g.shape().to_vec(), values)?)?
        }
        Repr::Radial(p) => Potential::from_radial(phi.dim(), p.homothety(lambda)),
        Repr::Analytic(a) => Potential::from_analytic(match a {
            Analytic::Quadratic { scale, center, offset } => Analytic::Quadratic {
                scale: scale / lambda,
                center: center.iter().map(|c| c * lambda).collect(),
                offset: offset * lambda,
            },
            Analytic::IndicatorBody { body, linear, offset } => Analytic::IndicatorBody {
                body: body.scale(lambda),
                linear: linear.clone(),
                offset: offset * lambda,
            },
            Analytic::BodySupport { body, shift, offset } => Analytic::BodySupport {
                body: body.clone(),
                shift: shift.iter().map(|s| s * lambda).collect(),
                offset: offset * lambda,
            },
        }),
    };
    LogConcaveFn::new(out)
}

/// f_a(x) = a f(x), a > 0: phi -> phi - log a.
pub fn scalar_mult(a: f64, f: &LogConcaveFn) -> Result<LogConcaveFn> {
    if !(a > 0.0) {
        return Err(Error::invalid("a", format!("need a > 0, got {a}")));
    }
    let log_a = a.ln();
    let phi = f.phi();
    let out = match phi.repr() {
        Repr::Grid(g) => {
            let values: Vec<ExtReal> = g
                .values()
                .iter()
                .map(|v| if v.is_inf() { ExtReal::INF } else { *v - log_a })
                .collect();
            Potential::from_grid(Grid::new(
                g.origin().to_vec(),
                g.spacing().to_vec(),
                g.shape().to_vec(),
                values,
            )?)?
        }
        Repr::Radial(p) => Potential::from_radial(phi.dim(), p.add_const(-log_a)),
        Repr::Analytic(a) => Potential::from_analytic(match a {
            Analytic::Quadratic { scale, center, offset } => Analytic::Quadratic {
                scale: *scale,
                center: center.clone(),
                offset: offset - log_a,
            },
            Analytic::IndicatorBody { body, linear, offset } => Analytic::IndicatorBody {
                body: body.clone(),
                linear: linear.clone(),
                offset: offset - log_a,
            },
            Analytic::BodySupport { body, shift, offset } => Analytic::BodySupport {
                body: body.clone(),
                shift: shift.clone(),
                offset: offset - log_a,
            },
        }),
    };
    LogConcaveFn::new(out)
}

/// f_tilde(x) = f(x - a). Grids translate exactly by moving the origin;
/// radial representations resample onto a grid (n <= 3) since a shifted
/// radial function is no longer radial.
pub fn translate(f: &LogConcaveFn, a: &[f64]) -> Result<LogConcaveFn> {
    let phi = f.phi();
    if a.len() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), got: a.len() });
    }
    if a.iter().all(|&c| c == 0.0) {
        return LogConcaveFn::new(phi.clone());
    }
    let out = match phi.repr() {
        Repr::Grid(g) => {
            let origin: Vec<f64> = g.origin().iter().zip(a).map(|(o, s)| o + s).collect();
            Potential::from_grid(Grid::new(
                origin,
                g.spacing().to_vec(),
                g.shape().to_vec(),
                g.values().to_vec(),
            )?)?
        }
        Repr::Analytic(an) => Potential::from_analytic(match an {
            Analytic::Quadratic { scale, center, offset } => Analytic::Quadratic {
                scale: *scale,
                center: center.iter().zip(a).map(|(c, s)| c + s).collect(),
                offset: *offset,
            },
            Analytic::IndicatorBody { body, linear, offset } => {
                let lin_dot: f64 = linear.iter().zip(a).map(|(l, s)| l * s).sum();
                Analytic::IndicatorBody {
                    body: body.translate(a),
                    linear: linear.clone(),
                    offset: offset - lin_dot,
                }
            }
            Analytic::BodySupport { body, shift, offset } => Analytic::BodySupport {
                body: body.clone(),
                shift: shift.iter().zip(a).map(|(c, s)| c + s).collect(),
                offset: *offset,
            },
        }),
        Repr::Radial(p) => {
            if phi.dim() > 3 {
                return Err(Error::invalid(
                    "translate",
                    "shifted radial functions need n <= 3 (grid resample)",
                ));
            }
            let half = p.rmax().min(16.0) + a.iter().map(|c| c.abs()).fold(0.0, f64::max);
            let len = 129;
            let spec = GridSpec::symmetric(phi.dim(), half, len);
            let g = Grid::sample(spec.origin, spec.spacing, spec.shape, |x| {
                let r = x.iter().zip(a).map(|(c, s)| (c - s) * (c - s)).sum::<f64>().sqrt();
                p.eval(r)
            })?;
            Potential::from_grid(g)?
        }
    };
    LogConcaveFn::new(out)
}

/// f_k = min(f 1_{|x| <= k}, k): compactly supported, bounded, log-concave,
/// increasing to f pointwise as k grows.
pub fn truncate(f: &LogConcaveFn, k: f64) -> Result<LogConcaveFn> {
    if !(k > 0.0) {
        return Err(Error::invalid("k", format!("need k > 0, got {k}")));
    }
    let floor = -k.ln(); // phi_k = max(phi, -log k) inside |x| <= k
    let phi = f.phi();
    let out = match phi.repr() {
        Repr::Grid(g) => {
            let mut out = g.clone();
            let mut x = vec![0.0; g.dim()];
            for flat in 0..out.len() {
                out.node_at(flat, &mut x);
                let r2: f64 = x.iter().map(|c| c * c).sum();
                let v = out.values()[flat];
                out.values_mut()[flat] = if r2 > k * k || v.is_inf() {
                    ExtReal::INF
                } else {
                    ExtReal::finite(v.raw().max(floor))
                };
            }
            Potential::from_grid(out)?
        }
        Repr::Radial(p) => {
            Potential::from_radial(phi.dim(), p.max_const(floor).truncate_domain(k))
        }
        Repr::Analytic(a) => {
            if let Some(p) = radial_profile_of_analytic(a) {
                Potential::from_radial(phi.dim(), p.max_const(floor).truncate_domain(k))
            } else {
                let g = analytic_to_grid(phi, 129)?;
                return truncate(&LogConcaveFn::new(g)?, k);
            }
        }
    };
    LogConcaveFn::new(out)
}
