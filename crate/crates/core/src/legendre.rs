//! The Legendre-Fenchel transform (L phi)(x) = sup_y (<x,y> - phi(y)) in
//! every representation, biconjugation, and the perturbed profile
//! H(x, eps) = L(phi + eps |.|^2 / 2).
//!
//! Grid transforms are discrete suprema over the finite input nodes. The
//! 1-D kernel is a linear-time monotone-argmax sweep whose result equals
//! the O(NM) brute-force double loop bit for bit (same candidates, same
//! arithmetic); n-D factorizes into per-axis 1-D sweeps. Radial and
//! analytic potentials conjugate in closed form.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid::Grid;
use crate::potential::{convexity_screen, Analytic, LogConcaveFn, Potential, Repr};
use crate::radial::RadialProfile;
use std::sync::Arc;

/// Output-grid request: per-axis origin/spacing/node count.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn axis(origin: f64, spacing: f64, len: usize) -> GridSpec {
        GridSpec { origin: vec![origin], spacing: vec![spacing], shape: vec![len] }
    }

    /// Symmetric spec on [-half, half]^dim with `len` nodes per axis.
    pub fn symmetric(dim: usize, half: f64, len: usize) -> GridSpec {
        let h = 2.0 * half / (len - 1) as f64;
        GridSpec { origin: vec![-half; dim], spacing: vec![h; dim], shape: vec![len; dim] }
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn node(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }
}

/// Default slope window for conjugating a grid: the span of the input's
/// finite-difference slopes per axis, padded by 10%. Outside that range the
/// discrete conjugate is affine (the argmax sticks to an extreme node) and
/// carries no further information.
pub fn default_slope_spec(grid: &Grid) -> GridSpec {
    let n = grid.dim();
    let mut origin = vec![0.0; n];
    let mut spacing = vec![1.0; n];
    let mut shape = vec![0usize; n];
    for axis in 0..n {
        let stride = grid.stride(axis);
        let len = grid.shape()[axis];
        let h = grid.spacing()[axis];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for start in grid.line_starts(axis) {
            for i in 0..len - 1 {
                let v0 = grid.values()[start + i * stride];
                let v1 = grid.values()[start + (i + 1) * stride];
                if v0.is_finite() && v1.is_finite() {
                    let s = (v1.raw() - v0.raw()) / h;
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            // Single finite node along this axis: conjugate is affine; keep
            // a token window around slope zero.
            lo = -1.0;
            hi = 1.0;
        }
        let pad = 0.1 * (hi - lo).max(1e-6);
        let (lo, hi) = (lo - pad, hi + pad);
        let m = len.max(3);
        origin[axis] = lo;
        spacing[axis] = (hi - lo) / (m - 1) as f64;
        shape[axis] = m;
    }
    GridSpec { origin, spacing, shape }
}

/// Finite nodes (point, value) of a grid potential, shared by its
/// conjugates for exact evaluation.
type SourcePoints = Arc<Vec<(Vec<f64>, f64)>>;

/// The support function h_f = L(-log f) of a log-concave function, or any
/// other conjugate the legendre module produces.
///
/// `repr` uses the same carriers as `Potential`. Conjugates of grid
/// potentials additionally keep the finite source nodes, so evaluation
/// anywhere in R^n is the exact discrete supremum rather than an
/// interpolation (and is finite everywhere, the source being compactly
/// supported).
#[derive(Debug, Clone)]
pub struct SupportFn {
    dim: usize,
    repr: Repr,
    source_points: Option<SourcePoints>,
    provenance: String,
}

impl SupportFn {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn as_grid(&self) -> Option<&Grid> {
        match &self.repr {
            Repr::Grid(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialProfile> {
        match &self.repr {
            Repr::Radial(p) => Some(p),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if let Some(points) = &self.source_points {
            let mut best = f64::NEG_INFINITY;
            for (y, v) in points.iter() {
                let mut dot = 0.0;
                for d in 0..x.len() {
                    dot += x[d] * y[d];
                }
                best = best.max(dot - v);
            }
            return Ok(ExtReal::finite(best));
        }
        match &self.repr {
            Repr::Grid(g) => g.eval(x),
            Repr::Analytic(a) => Ok(a.eval(x)),
            Repr::Radial(p) => {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                Ok(p.eval(r))
            }
        }
    }

    /// A point where the support function is +inf, if any. By the
    /// half-space argument, one witness means mean width +inf.
    pub fn inf_witness(&self) -> Option<Vec<f64>> {
        if self.source_points.is_some() {
            return None;
        }
        match &self.repr {
            Repr::Radial(p) => {
                let rmax = p.rmax();
                rmax.is_finite().then(|| {
                    let mut x = vec![0.0; self.dim];
                    x[0] = rmax + 1.0;
                    x
                })
            }
            Repr::Analytic(Analytic::IndicatorBody { body, .. }) => {
                let bb = body.bounding_box();
                Some(bb.iter().map(|(_, hi)| hi + 1.0).collect())
            }
            Repr::Analytic(_) => None,
            Repr::Grid(g) => {
                let flat = g.values().iter().position(|v| v.is_inf())?;
                Some(g.node(flat))
            }
        }
    }

    /// Kink locations per axis, used to place quadrature panel cuts.
    pub fn axis_cuts(&self) -> Vec<Vec<f64>> {
        match &self.repr {
            Repr::Analytic(Analytic::IndicatorBody { body, .. })
            | Repr::Analytic(Analytic::BodySupport { body, .. }) => body
                .bounding_box()
                .iter()
                .map(|&(lo, hi)| vec![lo, hi, 0.0])
                .collect(),
            _ => vec![vec![0.0]; self.dim],
        }
    }

    pub(crate) fn from_parts(
        dim: usize,
        repr: Repr,
        source_points: Option<SourcePoints>,
        provenance: String,
    ) -> SupportFn {
        SupportFn { dim, repr, source_points, provenance }
    }
}

/// max over finite nodes j of (s * y_j - psi_j) for every output slope `s`,
/// by a two-pointer sweep: for convex psi the argmax index is nondecreasing
/// in s. A short lookahead rides out ulp-level plateaus so the returned
/// maxima match the brute-force double loop bit for bit. +inf nodes never
/// win; an all-inf line yields -inf.
fn conj_line(
    y0: f64,
    hy: f64,
    psi: &[f64],
    out_s0: f64,
    out_hs: f64,
    out_len: usize,
    out: &mut [f64],
) {
    debug_assert_eq!(out.len(), out_len);
    let n = psi.len();
    let value = |s: f64, j: usize| -> f64 { s * (y0 + j as f64 * hy) - psi[j] };
    // First finite node, if any.
    let Some(first) = psi.iter().position(|v| v.is_finite()) else {
        out.fill(f64::NEG_INFINITY);
        return;
    };
    let mut arg = first;
    for (k, slot) in out.iter_mut().enumerate() {
        let s = out_s0 + k as f64 * out_hs;
        loop {
            // Advance past +inf nodes and uphill steps.
            let mut next = arg + 1;
            while next < n && psi[next].is_infinite() {
                next += 1;
            }
            if next >= n {
                break;
            }
            if value(s, next) >= value(s, arg) {
                arg = next;
                continue;
            }
            // Lookahead over possible ulp plateaus.
            let mut jumped = false;
            let mut probe = next + 1;
            let mut seen = 0;
            while probe < n && seen < 3 {
                if psi[probe].is_finite() {
                    seen += 1;
                    if value(s, probe) > value(s, arg) {
                        arg = probe;
                        jumped = true;
                        break;
                    }
                }
                probe += 1;
            }
            if !jumped {
                break;
            }
        }
        // Guard the result with the immediate finite neighborhood.
        let mut best = value(s, arg);
        let mut j = arg;
        let mut taken = 0;
        while j > 0 && taken < 2 {
            j -= 1;
            if psi[j].is_finite() {
                best = best.max(value(s, j));
                taken += 1;
            }
        }
        *slot = best;
    }
}

fn finite_points(grid: &Grid) -> Vec<(Vec<f64>, f64)> {
    let mut pts = Vec::new();
    for flat in 0..grid.len() {
        if let Some(v) = grid.values()[flat].finite_value() {
            pts.push((grid.node(flat), v));
        }
    }
    pts
}

/// 1-D discrete Legendre transform of a grid potential onto `out`.
///
/// For a convex input the result equals the brute-force double loop exactly
/// (criterion: same finite candidate set, same arithmetic per candidate).
/// For non-convex input it computes the conjugate of the convex envelope,
/// which is the same thing.
pub fn legendre_1d(phi: &Potential, out: &GridSpec) -> Result<SupportFn> {
    let grid = phi
        .as_grid()
        .ok_or_else(|| Error::invalid("phi", "legendre_1d needs a 1-D grid potential"))?;
    if grid.dim() != 1 || out.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: grid.dim().max(out.dim()) });
    }
    legendre_nd(phi, out)
}

/// n-D discrete Legendre transform by successive axis sweeps (n <= 3).
///
/// sup_y (<s,y> - phi(y)) factorizes into nested 1-D suprema; each
/// intermediate slice is re-convexified implicitly by the 1-D kernel (a
/// conjugate only sees the convex envelope). Every output node equals the
/// brute-force supremum over all input nodes up to the rounding of the
/// nested partial sums.
pub fn legendre_nd(phi: &Potential, out: &GridSpec) -> Result<SupportFn> {
    let grid = phi
        .as_grid()
        .ok_or_else(|| Error::invalid("phi", "legendre_nd needs a grid potential"))?;
    let n = grid.dim();
    if out.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: out.dim() });
    }
    if !grid.has_finite_value() {
        return Err(Error::EmptyDomain);
    }
    // Working tensor: axes 0..k are output (slope) axes, axes k..n input axes.
    let mut shape: Vec<usize> = grid.shape().to_vec();
    let mut data: Vec<f64> = grid.values().iter().map(|v| v.raw()).collect();
    for axis in 0..n {
        let in_len = shape[axis];
        let out_len = out.shape[axis];
        let mut new_shape = shape.clone();
        new_shape[axis] = out_len;
        let mut new_data = vec![0.0f64; new_shape.iter().product()];
        // Strides for walking lines along `axis` in both tensors.
        let stride: usize = shape[axis + 1..].iter().product();
        let new_stride: usize = new_shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let inner = stride;
        let mut line_in = vec![0.0f64; in_len];
        let mut line_out = vec![0.0f64; out_len];
        for o in 0..outer {
            for i in 0..inner {
                let base_in = o * in_len * stride + i;
                let base_out = o * out_len * new_stride + i;
                for j in 0..in_len {
                    line_in[j] = data[base_in + j * stride];
                }
                conj_line(
                    grid.origin()[axis],
                    grid.spacing()[axis],
                    &line_in,
                    out.origin[axis],
                    out.spacing[axis],
                    out_len,
                    &mut line_out,
                );
                for (k, &v) in line_out.iter().enumerate() {
                    new_data[base_out + k * new_stride] = v;
                }
            }
        }
        shape = new_shape;
        data = new_data;
        if axis + 1 < n {
            // Feed the next pass in potential form: the remaining suprema
            // read max(s y - T), so negate; empty lines become +inf.
            for v in data.iter_mut() {
                *v = -*v;
            }
        }
    }
    let values: Vec<ExtReal> = data
        .iter()
        .map(|&v| {
            debug_assert!(v.is_finite(), "conjugate of a nonempty potential is finite");
            ExtReal::finite(v)
        })
        .collect();
    let out_grid = Grid::new(out.origin.clone(), out.spacing.clone(), out.shape.clone(), values)?;
    Ok(SupportFn::from_parts(
        n,
        Repr::Grid(out_grid),
        Some(Arc::new(finite_points(grid))),
        format!("L(grid {:?})", grid.shape()),
    ))
}

/// Radial conjugate: for phi(x) = psi(|x|), (L phi)(x) = eta(|x|) with
/// eta(rho) = sup_{r >= 0}(r rho - psi(r)). Dimension-free.
pub fn legendre_radial(psi: &RadialProfile) -> Result<RadialProfile> {
    let flat = psi.flatten_to_min();
    if let Some(r) = flat.convexity_witness(1e-9) {
        return Err(Error::Precondition(format!(
            "radial profile is not convex near r = {r}"
        )));
    }
    Ok(psi.conjugate())
}

/// Closed-form conjugates of the analytic family; an involution.
pub fn analytic_conjugate(a: &Analytic) -> Analytic {
    match a {
        Analytic::Quadratic { scale, center, offset } => {
            // L(s|x - q|^2/2 + c) = |y|^2/(2s) + <y, q> - c.
            let s = *scale;
            let q2: f64 = center.iter().map(|c| c * c).sum();
            Analytic::Quadratic {
                scale: 1.0 / s,
                center: center.iter().map(|c| -s * c).collect(),
                offset: -0.5 * s * q2 - offset,
            }
        }
        Analytic::IndicatorBody { body, linear, offset } => Analytic::BodySupport {
            body: body.clone(),
            shift: linear.clone(),
            offset: -offset,
        },
        Analytic::BodySupport { body, shift, offset } => Analytic::IndicatorBody {
            body: body.clone(),
            linear: shift.clone(),
            offset: -offset,
        },
    }
}

/// h_f = L(-log f), in the representation best suited to the source:
/// closed form for analytic, exact profile conjugation for radial, and the
/// discrete transform (with exact global evaluation via the source nodes)
/// for grids.
pub fn support_fn(f: &LogConcaveFn) -> Result<SupportFn> {
    let phi = f.phi();
    match phi.repr() {
        Repr::Grid(g) => {
            let spec = default_slope_spec(g);
            legendre_nd(phi, &spec)
        }
        Repr::Radial(p) => Ok(SupportFn::from_parts(
            phi.dim(),
            Repr::Radial(legendre_radial(p)?),
            None,
            "L(radial profile)".to_string(),
        )),
        Repr::Analytic(a) => Ok(SupportFn::from_parts(
            phi.dim(),
            Repr::Analytic(analytic_conjugate(a)),
            None,
            "L(analytic)".to_string(),
        )),
    }
}

/// L(L(phi)): the lower semi-continuous convex envelope; idempotent.
///
/// A potential that already passes the convexity screen is its own
/// biconjugate and is returned unchanged, which is what makes the second
/// application a node-exact fixed point.
pub fn biconjugate(phi: &Potential) -> Result<Potential> {
    if convexity_screen(phi, 1e-9)?.passed() {
        return Ok(phi.clone());
    }
    match phi.repr() {
        Repr::Analytic(_) => Ok(phi.clone()),
        Repr::Radial(p) => {
            // Double monotone conjugation = convex nondecreasing envelope of
            // the flattened profile = the radial profile of the n-D envelope.
            Ok(Potential::from_radial(phi.dim(), p.conjugate().conjugate()))
        }
        Repr::Grid(g) if g.dim() == 1 => {
            let hull = lower_convex_hull_1d(g);
            Potential::from_grid(hull)
        }
        Repr::Grid(g) => {
            // n-D: transform to the default slope grid and back.
            let spec = default_slope_spec(g);
            let conj = legendre_nd(phi, &spec)?;
            let back_spec = GridSpec {
                origin: g.origin().to_vec(),
                spacing: g.spacing().to_vec(),
                shape: g.shape().to_vec(),
            };
            let conj_phi = Potential::from_grid(conj.as_grid().unwrap().clone())?;
            let back = legendre_nd(&conj_phi, &back_spec)?;
            Potential::from_grid(back.as_grid().unwrap().clone())
        }
    }
}

/// Discrete convex envelope of a 1-D grid: lower convex hull of the finite
/// node points, chord values at interior nodes, +inf kept outside the
/// finite range.
pub(crate) fn lower_convex_hull_1d(g: &Grid) -> Grid {
    let n = g.shape()[0];
    let vals = g.values();
    let mut hull: Vec<usize> = Vec::new();
    for j in 0..n {
        if vals[j].is_inf() {
            continue;
        }
        let vj = vals[j].raw();
        let yj = g.axis_node(0, j);
        while hull.len() >= 2 {
            let b = hull[hull.len() - 1];
            let a = hull[hull.len() - 2];
            let (ya, va) = (g.axis_node(0, a), vals[a].raw());
            let (yb, vb) = (g.axis_node(0, b), vals[b].raw());
            // Pop b if it lies strictly above the chord a -> j.
            if (vb - va) * (yj - yb) > (vj - vb) * (yb - ya) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }
    let mut out = g.clone();
    if hull.len() < 2 {
        return out;
    }
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ya, va) = (g.axis_node(0, a), vals[a].raw());
        let slope = (vals[b].raw() - va) / (g.axis_node(0, b) - ya);
        for j in a + 1..b {
            out.values_mut()[j] = ExtReal::finite(va + slope * (g.axis_node(0, j) - ya));
        }
    }
    out
}

/// H(., eps) = L(phi + eps |.|^2 / 2), computed by forming the perturbed
/// potential explicitly and conjugating. For phi(0) < inf it is sandwiched
/// between -phi(0) and (L phi) pointwise, and increases to (L phi) as
/// eps decreases to 0.
pub fn h_profile(phi: &Potential, eps: f64) -> Result<SupportFn> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", format!("need eps > 0, got {eps}")));
    }
    match phi.repr() {
        Repr::Grid(g) => {
            let mut pg = g.clone();
            let mut x = vec![0.0; g.dim()];
            for flat in 0..pg.len() {
                pg.node_at(flat, &mut x);
                let r2: f64 = x.iter().map(|c| c * c).sum();
                let v = pg.values()[flat];
                pg.values_mut()[flat] = v + 0.5 * eps * r2;
            }
            let perturbed = Potential::from_grid(pg)?;
            let spec = default_slope_spec(perturbed.as_grid().unwrap());
            let mut sf = legendre_nd(&perturbed, &spec)?;
            sf.provenance = format!("L(phi + {eps}/2 |x|^2)");
            Ok(sf)
        }
        Repr::Radial(p) => Ok(SupportFn::from_parts(
            phi.dim(),
            Repr::Radial(p.add_quadratic(eps).conjugate()),
            None,
            format!("L(psi + {eps}/2 r^2), radial"),
        )),
        Repr::Analytic(Analytic::Quadratic { scale, center, offset }) => {
            // s|x-q|^2/2 + c + eps|x|^2/2 is again a scaled quadratic.
            let s = *scale;
            let s2 = s + eps;
            let q2: f64 = center.iter().map(|c| c * c).sum();
            let perturbed = Analytic::Quadratic {
                scale: s2,
                center: center.iter().map(|c| s * c / s2).collect(),
                offset: offset + 0.5 * s * q2 * (1.0 - s / s2),
            };
            Ok(SupportFn::from_parts(
                phi.dim(),
                Repr::Analytic(analytic_conjugate(&perturbed)),
                None,
                format!("L(phi + {eps}/2 |x|^2), analytic"),
            ))
        }
        Repr::Analytic(a) => {
            // Remaining analytic potentials: go through a grid (n <= 3) or,
            // when centered and radial, through the profile.
            if let Some(p) = radial_profile_of_analytic(a) {
                return Ok(SupportFn::from_parts(
                    phi.dim(),
                    Repr::Radial(p.add_quadratic(eps).conjugate()),
                    None,
                    format!("L(psi + {eps}/2 r^2), radial"),
                ));
            }
            let g = analytic_to_grid(phi, 129)?;
            h_profile(&g, eps)
        }
    }
}

/// Radial profile of a centered analytic potential, when it has one.
pub fn radial_profile_of_analytic(a: &Analytic) -> Option<RadialProfile> {
    let centered = |v: &[f64]| v.iter().all(|&c| c == 0.0);
    match a {
        Analytic::Quadratic { scale, center, offset } if centered(center) => {
            Some(RadialProfile::gaussian().scale_values(*scale).add_const(*offset))
        }
        Analytic::IndicatorBody { body: crate::bodies::ConvexBody::Ball { center, radius }, linear, offset }
            if centered(center) && centered(linear) =>
        {
            Some(RadialProfile::ball_indicator(*radius).add_const(*offset))
        }
        Analytic::BodySupport { body: crate::bodies::ConvexBody::Ball { center, radius }, shift, offset }
            if centered(center) && centered(shift) =>
        {
            Some(RadialProfile::linear(*radius, *offset))
        }
        _ => None,
    }
}

/// Samples an analytic potential onto a symmetric grid wide enough to hold
/// its effective support.
pub fn analytic_to_grid(phi: &Potential, len: usize) -> Result<Potential> {
    let a = phi
        .as_analytic()
        .ok_or_else(|| Error::invalid("phi", "analytic_to_grid needs an analytic potential"))?;
    let half = match a {
        Analytic::Quadratic { center, .. } => {
            8.0 + center.iter().map(|c| c.abs()).fold(0.0, f64::max)
        }
        Analytic::IndicatorBody { body, .. } | Analytic::BodySupport { body, .. } => {
            1.0 + body
                .bounding_box()
                .iter()
                .map(|(lo, hi)| lo.abs().max(hi.abs()))
                .fold(0.0, f64::max)
        }
    };
    let spec = GridSpec::symmetric(phi.dim(), half, len);
    let g = Grid::sample(spec.origin, spec.spacing, spec.shape, |x| a.eval(x))?;
    Potential::from_grid(g)
}

/// Brute-force O(NM) oracle for grid conjugates; the referee for the sweep.
pub fn brute_force_conjugate(grid: &Grid, out: &GridSpec) -> Vec<f64> {
    assert_eq!(grid.dim(), out.dim());
    let n = grid.dim();
    let out_total: usize = out.shape.iter().product();
    let pts = finite_points(grid);
    let mut result = vec![f64::NEG_INFINITY; out_total];
    let mut idx = vec![0usize; n];
    for (flat, slot) in result.iter_mut().enumerate() {
        let mut rem = flat;
        for d in (0..n).rev() {
            idx[d] = rem % out.shape[d];
            rem /= out.shape[d];
        }
        let s: Vec<f64> = (0..n).map(|d| out.node(d, idx[d])).collect();
        let mut best = f64::NEG_INFINITY;
        for (y, v) in &pts {
            let mut dot = 0.0;
            for d in 0..n {
                dot += s[d] * y[d];
            }
            best = best.max(dot - v);
        }
        *slot = best;
    }
    result
}
