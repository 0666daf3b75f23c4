//! Potentials phi: R^n -> (-inf, inf] and the log-concave functions
//! f = e^{-phi} they encode.
//!
//! Three representations share one interface. Grids carry sampled values
//! and are +inf outside their box, so every grid function is compactly
//! supported. Analytic potentials are exact formula families closed under
//! conjugation. Radial potentials delegate to a 1-D profile and work in any
//! dimension.

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid::Grid;
use crate::radial::RadialProfile;

/// Exact potential families, closed under the Legendre transform: the
/// conjugate of each variant is again a variant (see the legendre module).
#[derive(Debug, Clone, PartialEq)]
pub enum Analytic {
    /// scale * |x - center|^2 / 2 + offset.
    Quadratic { scale: f64, center: Vec<f64>, offset: f64 },
    /// Indicator of the body plus <linear, x> + offset.
    IndicatorBody { body: ConvexBody, linear: Vec<f64>, offset: f64 },
    /// h_body(x - shift) + offset. Covers norm cones: alpha |x - a| is the
    /// support function of the alpha-ball shifted by a.
    BodySupport { body: ConvexBody, shift: Vec<f64>, offset: f64 },
}

impl Analytic {
    /// Potential of C e^{-|x - center|^2 / 2} with C = e^{log_height}.
    pub fn gaussian(center: Vec<f64>, log_height: f64) -> Analytic {
        Analytic::Quadratic { scale: 1.0, center, offset: -log_height }
    }

    /// The indicator potential of a body: 0 on K, +inf outside.
    pub fn indicator(body: ConvexBody) -> Analytic {
        let n = body.dim();
        Analytic::IndicatorBody { body, linear: vec![0.0; n], offset: 0.0 }
    }

    /// alpha |x - center| + offset, the potential of e^{-alpha |x - center|}.
    pub fn norm_cone(alpha: f64, center: Vec<f64>, offset: f64) -> Analytic {
        assert!(alpha > 0.0);
        let n = center.len();
        Analytic::BodySupport {
            body: ConvexBody::Ball { center: vec![0.0; n], radius: alpha },
            shift: center,
            offset,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Analytic::Quadratic { center, .. } => center.len(),
            Analytic::IndicatorBody { body, .. } | Analytic::BodySupport { body, .. } => body.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        match self {
            Analytic::Quadratic { scale, center, offset } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                ExtReal::finite(0.5 * scale * d2 + offset)
            }
            Analytic::IndicatorBody { body, linear, offset } => {
                if body.contains(x, 1e-12) {
                    let lin: f64 = x.iter().zip(linear).map(|(a, b)| a * b).sum();
                    ExtReal::finite(lin + offset)
                } else {
                    ExtReal::INF
                }
            }
            Analytic::BodySupport { body, shift, offset } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
                ExtReal::finite(body.support(&y) + offset)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    Grid(Grid),
    Analytic(Analytic),
    Radial(RadialProfile),
}

/// An extended-real convex(ish) potential. Construction checks only cheap
/// structural facts; convexity is screened separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    dim: usize,
    repr: Repr,
}

impl Potential {
    pub fn from_grid(grid: Grid) -> Result<Potential> {
        if !grid.has_finite_value() {
            return Err(Error::EmptyDomain);
        }
        Ok(Potential { dim: grid.dim(), repr: Repr::Grid(grid) })
    }

    pub fn from_analytic(a: Analytic) -> Potential {
        Potential { dim: a.dim(), repr: Repr::Analytic(a) }
    }

    /// phi(x) = profile(|x|) in ambient dimension `dim`.
    pub fn from_radial(dim: usize, profile: RadialProfile) -> Potential {
        Potential { dim, repr: Repr::Radial(profile) }
    }

    /// The standard Gaussian potential |x|^2/2, kept radial so it works in
    /// any dimension.
    pub fn standard_gaussian(dim: usize) -> Potential {
        Potential::from_radial(dim, RadialProfile::gaussian())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
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

    pub fn as_analytic(&self) -> Option<&Analytic> {
        match &self.repr {
            Repr::Analytic(a) => Some(a),
            _ => None,
        }
    }

    /// phi(x). Grid representations interpolate multilinearly among finite
    /// neighbors and are +inf outside the box; analytic and radial
    /// representations evaluate exactly.
    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
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

    /// phi(0), a value several preconditions look at.
    pub fn at_origin(&self) -> ExtReal {
        self.eval(&vec![0.0; self.dim]).expect("origin has the right dimension")
    }

    /// Some point with phi finite, if one exists.
    pub fn finite_point(&self) -> Option<Vec<f64>> {
        match &self.repr {
            Repr::Grid(g) => {
                let flat = g.values().iter().position(|v| v.is_finite())?;
                Some(g.node(flat))
            }
            Repr::Analytic(a) => match a {
                Analytic::Quadratic { center, .. } => Some(center.clone()),
                Analytic::IndicatorBody { body, .. } => Some(body_point(body)),
                Analytic::BodySupport { body, .. } => Some(vec![0.0; body.dim()]),
            },
            Repr::Radial(_) => Some(vec![0.0; self.dim]),
        }
    }
}

fn body_point(body: &ConvexBody) -> Vec<f64> {
    match body {
        ConvexBody::Ball { center, .. } => center.clone(),
        ConvexBody::Box { intervals } => {
            intervals.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
        }
        ConvexBody::Polytope { vertices } => vertices[0].clone(),
        ConvexBody::Segment { a, .. } => a.clone(),
    }
}

/// Outcome of the discrete convexity screen. This is a necessary-condition
/// filter along sampled directions, not a certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Screen {
    Pass,
    /// Violating node triple (multi-indices of the three nodes) and the
    /// direction in index space along which the second difference failed.
    Fail { direction: Vec<i64>, triple: [Vec<usize>; 3] },
}

impl Screen {
    pub fn passed(&self) -> bool {
        matches!(self, Screen::Pass)
    }
}

/// Screens grid potentials along every axis-parallel line and the pairwise
/// diagonal directions; radial potentials check piece convexity and slope
/// monotonicity. Second differences must be >= -tol, with
/// tol = tol_rel * value scale.
pub fn convexity_screen(phi: &Potential, tol_rel: f64) -> Result<Screen> {
    match phi.repr() {
        Repr::Analytic(_) => Ok(Screen::Pass),
        Repr::Radial(p) => {
            let scale = p
                .pieces()
                .iter()
                .map(|q| q.c.abs().max(q.b.abs()).max(q.a.abs()))
                .fold(1.0_f64, f64::max);
            match p.convexity_witness(tol_rel * scale) {
                None => Ok(Screen::Pass),
                Some(r) => {
                    // Report the offending piece and its neighbors.
                    let k = p.pieces().partition_point(|q| q.hi < r).min(p.pieces().len() - 1);
                    Ok(Screen::Fail {
                        direction: vec![1],
                        triple: [vec![k.saturating_sub(1)], vec![k], vec![(k + 1).min(p.pieces().len() - 1)]],
                    })
                }
            }
        }
        Repr::Grid(g) => Ok(screen_grid(g, tol_rel * g.finite_scale())),
    }
}

pub(crate) fn screen_grid(g: &Grid, tol: f64) -> Screen {
    let n = g.dim();
    let mut directions: Vec<Vec<i64>> = Vec::new();
    for d in 0..n {
        let mut e = vec![0i64; n];
        e[d] = 1;
        directions.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            for sj in [1i64, -1] {
                let mut e = vec![0i64; n];
                e[i] = 1;
                e[j] = sj;
                directions.push(e);
            }
        }
    }
    for dir in &directions {
        if let Some(triple) = screen_direction(g, dir, tol) {
            return Screen::Fail { direction: dir.clone(), triple };
        }
    }
    Screen::Pass
}

fn screen_direction(g: &Grid, dir: &[i64], tol: f64) -> Option<[Vec<usize>; 3]> {
    let shape = g.shape();
    let in_range = |idx: &[i64]| -> bool {
        idx.iter().zip(shape).all(|(&i, &m)| i >= 0 && (i as usize) < m)
    };
    let step = |idx: &[i64], k: i64| -> Vec<i64> {
        idx.iter().zip(dir).map(|(&i, &d)| i + k * d).collect()
    };
    for flat in 0..g.len() {
        let idx: Vec<i64> = g.multi_index(flat).iter().map(|&i| i as i64).collect();
        // Only walk lines from their first node.
        if in_range(&step(&idx, -1)) {
            continue;
        }
        let mut line: Vec<(Vec<usize>, ExtReal)> = Vec::new();
        let mut cur = idx.clone();
        while in_range(&cur) {
            let u: Vec<usize> = cur.iter().map(|&i| i as usize).collect();
            let v = g.value(&u);
            line.push((u, v));
            cur = step(&cur, 1);
        }
        // The finite part must be one contiguous interval,
        let finite: Vec<usize> = line
            .iter()
            .enumerate()
            .filter(|(_, (_, v))| v.is_finite())
            .map(|(k, _)| k)
            .collect();
        if let (Some(&first), Some(&last)) = (finite.first(), finite.last()) {
            if finite.len() != last - first + 1 {
                let hole = (first..=last).find(|k| line[k - first].1.is_inf()).unwrap_or(first);
                return Some([
                    line[first].0.clone(),
                    line[hole].0.clone(),
                    line[last].0.clone(),
                ]);
            }
            // and second differences along it must not dip below -tol.
            for k in first..last.saturating_sub(1) {
                let v0 = line[k].1.raw();
                let v1 = line[k + 1].1.raw();
                let v2 = line[k + 2].1.raw();
                if v0 + v2 - 2.0 * v1 < -tol {
                    return Some([line[k].0.clone(), line[k + 1].0.clone(), line[k + 2].0.clone()]);
                }
            }
        }
    }
    None
}

/// f = e^{-phi}, maintained through the potential; raw f values are never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConcaveFn {
    phi: Potential,
}

impl LogConcaveFn {
    pub fn new(phi: Potential) -> Result<LogConcaveFn> {
        if phi.finite_point().is_none() {
            return Err(Error::EmptyDomain);
        }
        Ok(LogConcaveFn { phi })
    }

    /// The standard Gaussian G(x) = e^{-|x|^2/2}.
    pub fn standard_gaussian(dim: usize) -> LogConcaveFn {
        LogConcaveFn { phi: Potential::standard_gaussian(dim) }
    }

    pub fn phi(&self) -> &Potential {
        &self.phi
    }

    pub fn into_phi(self) -> Potential {
        self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// f(x) = exp(-phi(x)) in [0, inf), with exp(-inf) = 0.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.phi.eval(x)?.exp_neg())
    }
}
