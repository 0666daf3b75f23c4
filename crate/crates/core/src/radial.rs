//! Radial potentials as piecewise linear-quadratic profiles.
//!
//! A radial potential phi(x) = psi(|x|) is stored as its profile psi on
//! [0, rmax], a list of contiguous pieces a/2 r^2 + b r + c, with psi = +inf
//! beyond rmax. The family is closed under everything the library does to
//! radial functions — adding a quadratic, pointwise sums, homotheties, and
//! the (monotone) conjugate sup_{r>=0}(rho r - psi(r)) — and each of those
//! operations is exact on the coefficients, so high dimensions cost nothing.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid::Grid;

/// a/2 r^2 + b r + c on [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPiece {
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RadialPiece {
    fn value(&self, r: f64) -> f64 {
        (0.5 * self.a * r + self.b) * r + self.c
    }

    fn slope(&self, r: f64) -> f64 {
        self.a * r + self.b
    }
}

/// A profile psi: [0, rmax] -> R, +inf beyond rmax; pieces are contiguous
/// from 0 and continuous at the joints.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pieces: Vec<RadialPiece>,
}

const JOINT_TOL: f64 = 1e-7;

impl RadialProfile {
    pub fn new(pieces: Vec<RadialPiece>) -> Result<RadialProfile> {
        if pieces.is_empty() {
            return Err(Error::invalid("pieces", "profile needs at least one piece"));
        }
        if pieces[0].lo != 0.0 {
            return Err(Error::invalid("pieces", "profile must start at r = 0"));
        }
        let mut scale: f64 = 1.0;
        for (k, p) in pieces.iter().enumerate() {
            if !(p.lo < p.hi) {
                return Err(Error::invalid("pieces", format!("piece {k} has empty interval")));
            }
            if !p.lo.is_finite() || !p.a.is_finite() || !p.b.is_finite() || !p.c.is_finite() {
                return Err(Error::invalid("pieces", format!("piece {k} has non-finite data")));
            }
            if p.hi == f64::INFINITY && p.a < 0.0 {
                return Err(Error::invalid("pieces", "concave infinite tail"));
            }
            if k + 1 < pieces.len() && pieces[k + 1].lo != p.hi {
                return Err(Error::invalid("pieces", format!("gap after piece {k}")));
            }
            if p.hi.is_finite() {
                scale = scale.max(p.value(p.hi).abs());
            }
            scale = scale.max(p.value(p.lo).abs());
        }
        for k in 0..pieces.len() - 1 {
            let left = pieces[k].value(pieces[k].hi);
            let right = pieces[k + 1].value(pieces[k + 1].lo);
            if (left - right).abs() > JOINT_TOL * scale {
                return Err(Error::invalid(
                    "pieces",
                    format!("discontinuity at r = {}: {left} vs {right}", pieces[k].hi),
                ));
            }
        }
        Ok(RadialProfile { pieces })
    }

    /// psi(r) = r^2/2 on [0, inf): the Gaussian potential.
    pub fn gaussian() -> RadialProfile {
        RadialProfile {
            pieces: vec![RadialPiece { lo: 0.0, hi: f64::INFINITY, a: 1.0, b: 0.0, c: 0.0 }],
        }
    }

    /// psi(r) = slope * r + offset on [0, inf).
    pub fn linear(slope: f64, offset: f64) -> RadialProfile {
        assert!(slope >= 0.0, "infinite linear tail must be nondecreasing");
        RadialProfile {
            pieces: vec![RadialPiece { lo: 0.0, hi: f64::INFINITY, a: 0.0, b: slope, c: offset }],
        }
    }

    /// Indicator profile of the centered ball of the given radius.
    pub fn ball_indicator(radius: f64) -> RadialProfile {
        assert!(radius > 0.0);
        RadialProfile {
            pieces: vec![RadialPiece { lo: 0.0, hi: radius, a: 0.0, b: 0.0, c: 0.0 }],
        }
    }

    pub fn constant(value: f64, rmax: f64) -> RadialProfile {
        RadialProfile {
            pieces: vec![RadialPiece { lo: 0.0, hi: rmax, a: 0.0, b: 0.0, c: value }],
        }
    }

    /// Piecewise-linear profile through the nodes of a 1-D grid starting at 0.
    /// Trailing +inf nodes truncate the domain; interior +inf is rejected.
    pub fn from_grid(grid: &Grid) -> Result<RadialProfile> {
        if grid.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: grid.dim() });
        }
        if grid.origin()[0] != 0.0 {
            return Err(Error::invalid("origin", "radial grid must start at r = 0"));
        }
        let vals = grid.values();
        let finite_len = vals.iter().take_while(|v| v.is_finite()).count();
        if finite_len < 2 {
            return Err(Error::invalid("values", "need >= 2 finite leading nodes"));
        }
        if vals[finite_len..].iter().any(|v| v.is_finite()) {
            return Err(Error::invalid("values", "finite region must be an initial segment"));
        }
        let h = grid.spacing()[0];
        let mut pieces = Vec::with_capacity(finite_len - 1);
        for i in 0..finite_len - 1 {
            let (r0, r1) = (grid.axis_node(0, i), grid.axis_node(0, i + 1));
            let (v0, v1) = (vals[i].raw(), vals[i + 1].raw());
            let slope = (v1 - v0) / h;
            pieces.push(RadialPiece { lo: r0, hi: r1, a: 0.0, b: slope, c: v0 - slope * r0 });
        }
        RadialProfile::new(pieces)
    }

    pub fn pieces(&self) -> &[RadialPiece] {
        &self.pieces
    }

    /// Domain endpoint; psi = +inf for r > rmax.
    pub fn rmax(&self) -> f64 {
        self.pieces.last().unwrap().hi
    }

    /// Interior breakpoints (piece joints), for quadrature panel splits.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[..self.pieces.len() - 1].iter().map(|p| p.hi).collect()
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        debug_assert!(r >= 0.0, "radial profiles are evaluated at r >= 0");
        if r > self.rmax() {
            return ExtReal::INF;
        }
        ExtReal::finite(self.eval_finite(r))
    }

    fn eval_finite(&self, r: f64) -> f64 {
        let k = self
            .pieces
            .partition_point(|p| p.hi < r)
            .min(self.pieces.len() - 1);
        self.pieces[k].value(r)
    }

    /// sup of psi' over the domain; +inf for a quadratic tail.
    pub fn slope_sup(&self) -> f64 {
        let last = self.pieces.last().unwrap();
        if last.hi == f64::INFINITY {
            if last.a > 0.0 {
                f64::INFINITY
            } else {
                last.b
            }
        } else {
            last.slope(last.hi)
        }
    }

    /// Convexity: every piece has a >= 0 and one-sided slopes are
    /// nondecreasing at the joints. Returns the offending radius on failure.
    pub fn convexity_witness(&self, tol: f64) -> Option<f64> {
        for p in &self.pieces {
            if p.a < -tol {
                return Some(p.lo);
            }
        }
        for k in 0..self.pieces.len() - 1 {
            let r = self.pieces[k].hi;
            if self.pieces[k].slope(r) > self.pieces[k + 1].slope(r) + tol {
                return Some(r);
            }
        }
        None
    }

    /// Global minimum (r*, psi(r*)) of a convex profile.
    pub fn min_point(&self) -> (f64, f64) {
        for p in &self.pieces {
            if p.slope(p.lo) >= 0.0 {
                return (p.lo, p.value(p.lo));
            }
            let hi_slope = if p.hi.is_finite() { p.slope(p.hi) } else { f64::INFINITY };
            if hi_slope >= 0.0 {
                if p.a > 0.0 {
                    let r = -p.b / p.a;
                    let r = r.clamp(p.lo, if p.hi.is_finite() { p.hi } else { r });
                    return (r, p.value(r));
                }
                return (p.lo, p.value(p.lo));
            }
        }
        let r = self.rmax();
        (r, self.eval_finite(r))
    }

    /// Replaces the profile by its nondecreasing hull: constant at the
    /// minimum up to the argmin, unchanged after. The sup over r >= 0 of
    /// rho r - psi(r) with rho >= 0 only sees this hull.
    pub fn flatten_to_min(&self) -> RadialProfile {
        let (r_star, v_star) = self.min_point();
        if r_star == 0.0 {
            return self.clone();
        }
        let mut pieces = Vec::new();
        pieces.push(RadialPiece { lo: 0.0, hi: r_star, a: 0.0, b: 0.0, c: v_star });
        for p in &self.pieces {
            if p.hi <= r_star {
                continue;
            }
            let lo = p.lo.max(r_star);
            pieces.push(RadialPiece { lo, hi: p.hi, ..*p });
        }
        RadialProfile { pieces }
    }

    /// psi + eps r^2 / 2.
    pub fn add_quadratic(&self, eps: f64) -> RadialProfile {
        let pieces = self
            .pieces
            .iter()
            .map(|p| RadialPiece { a: p.a + eps, ..*p })
            .collect();
        RadialProfile { pieces }
    }

    pub fn add_const(&self, dc: f64) -> RadialProfile {
        let pieces = self.pieces.iter().map(|p| RadialPiece { c: p.c + dc, ..*p }).collect();
        RadialProfile { pieces }
    }

    /// lambda * psi(r / lambda): the potential of the lambda-homothety.
    pub fn homothety(&self, lambda: f64) -> RadialProfile {
        assert!(lambda > 0.0);
        let pieces = self
            .pieces
            .iter()
            .map(|p| RadialPiece {
                lo: p.lo * lambda,
                hi: p.hi * lambda,
                a: p.a / lambda,
                b: p.b,
                c: p.c * lambda,
            })
            .collect();
        RadialProfile { pieces }
    }

    /// lambda * psi(r), lambda > 0.
    pub fn scale_values(&self, lambda: f64) -> RadialProfile {
        assert!(lambda > 0.0);
        let pieces = self
            .pieces
            .iter()
            .map(|p| RadialPiece { a: p.a * lambda, b: p.b * lambda, c: p.c * lambda, ..*p })
            .collect();
        RadialProfile { pieces }
    }

    /// Pointwise max(psi, level): pieces are split at the crossings and the
    /// sub-level parts replaced by the constant.
    pub fn max_const(&self, level: f64) -> RadialProfile {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            // Roots of p(r) = level inside [lo, hi].
            let mut cuts = vec![p.lo];
            if p.a != 0.0 {
                let disc = p.b * p.b - 2.0 * p.a * (p.c - level);
                if disc > 0.0 {
                    let sq = disc.sqrt();
                    for r in [(-p.b - sq) / p.a, (-p.b + sq) / p.a] {
                        if r > p.lo && r < p.hi {
                            cuts.push(r);
                        }
                    }
                }
            } else if p.b != 0.0 {
                let r = (level - p.c) / p.b;
                if r > p.lo && r < p.hi {
                    cuts.push(r);
                }
            }
            cuts.push(p.hi);
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            cuts.dedup();
            for w in cuts.windows(2) {
                let probe = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] + 1.0 };
                if p.value(probe) < level {
                    pieces.push(RadialPiece { lo: w[0], hi: w[1], a: 0.0, b: 0.0, c: level });
                } else {
                    pieces.push(RadialPiece { lo: w[0], hi: w[1], ..*p });
                }
            }
        }
        // Merge exactly-adjacent duplicates of the constant.
        RadialProfile { pieces }
    }

    /// Restricts the domain to [0, rmax]; psi = +inf beyond.
    pub fn truncate_domain(&self, rmax: f64) -> RadialProfile {
        assert!(rmax > 0.0);
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.lo >= rmax {
                break;
            }
            pieces.push(RadialPiece { hi: p.hi.min(rmax), ..*p });
        }
        RadialProfile { pieces }
    }

    /// Pointwise sum; the domain is the intersection of the domains.
    pub fn sum(&self, other: &RadialProfile) -> RadialProfile {
        let rmax = self.rmax().min(other.rmax());
        let mut cuts: Vec<f64> = vec![0.0];
        for r in self.breakpoints().into_iter().chain(other.breakpoints()) {
            if r < rmax {
                cuts.push(r);
            }
        }
        cuts.push(rmax);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut pieces = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let probe = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] + 1.0 };
            let pa = self.piece_at(probe);
            let pb = other.piece_at(probe);
            pieces.push(RadialPiece {
                lo: w[0],
                hi: w[1],
                a: pa.a + pb.a,
                b: pa.b + pb.b,
                c: pa.c + pb.c,
            });
        }
        RadialProfile { pieces }
    }

    fn piece_at(&self, r: f64) -> &RadialPiece {
        let k = self
            .pieces
            .partition_point(|p| p.hi < r)
            .min(self.pieces.len() - 1);
        &self.pieces[k]
    }

    /// The monotone conjugate eta(rho) = sup_{r >= 0} (rho r - psi(r)) for
    /// rho >= 0, piece by piece in closed form. The profile is first
    /// flattened to its running minimum, which leaves the supremum
    /// unchanged. For a convex input this equals the restriction of the
    /// full n-dimensional Legendre transform to radii.
    pub fn conjugate(&self) -> RadialProfile {
        let psi = self.flatten_to_min();
        let mut out: Vec<RadialPiece> = Vec::new();
        let mut cur_slope = 0.0_f64;
        for p in &psi.pieces {
            let s_lo = p.slope(p.lo);
            // Slope gap [cur_slope, s_lo]: the argmax is pinned at the kink r = p.lo.
            if s_lo > cur_slope {
                out.push(RadialPiece {
                    lo: cur_slope,
                    hi: s_lo,
                    a: 0.0,
                    b: p.lo,
                    c: -psi.eval_finite(p.lo),
                });
                cur_slope = s_lo;
            }
            if p.a > 0.0 {
                let s_hi = if p.hi.is_finite() { p.slope(p.hi) } else { f64::INFINITY };
                if s_hi > cur_slope {
                    // Interior argmax r = (rho - b)/a gives (rho - b)^2/(2a) - c.
                    out.push(RadialPiece {
                        lo: cur_slope,
                        hi: s_hi,
                        a: 1.0 / p.a,
                        b: -p.b / p.a,
                        c: p.b * p.b / (2.0 * p.a) - p.c,
                    });
                    cur_slope = s_hi;
                }
            }
        }
        let rmax = psi.rmax();
        if rmax.is_finite() {
            // Beyond the largest slope the argmax sits at the domain end.
            out.push(RadialPiece {
                lo: cur_slope,
                hi: f64::INFINITY,
                a: 0.0,
                b: rmax,
                c: -psi.eval_finite(rmax),
            });
        }
        if out.is_empty() {
            // psi constant on [0, inf): conjugate is -psi(0) at rho = 0 and
            // +inf beyond; keep a degenerate tiny flat piece at 0.
            out.push(RadialPiece { lo: 0.0, hi: 0.0_f64.max(cur_slope), a: 0.0, b: 0.0, c: -psi.eval_finite(0.0) });
            if out[0].hi == out[0].lo {
                out[0].hi = f64::MIN_POSITIVE;
            }
        }
        RadialProfile { pieces: out }
    }

    /// Largest r with psi(r) <= level (the level-set radius), solved in
    /// closed form per piece. None if the sublevel set is empty, +inf if
    /// psi stays below the level forever.
    pub fn sublevel_radius(&self, level: f64) -> Option<f64> {
        let psi = self.flatten_to_min();
        let (_, v_min) = psi.min_point();
        if v_min > level {
            return None;
        }
        let mut radius = f64::INFINITY;
        for p in psi.pieces.iter().rev() {
            let v_lo = p.value(p.lo);
            if v_lo > level {
                continue;
            }
            let v_hi = if p.hi.is_finite() { p.value(p.hi) } else { f64::INFINITY };
            if v_hi <= level {
                radius = p.hi;
                break;
            }
            // The level is crossed inside this piece.
            radius = if p.a > 0.0 {
                let disc = p.b * p.b + 2.0 * p.a * (level - p.c);
                (-p.b + disc.max(0.0).sqrt()) / p.a
            } else if p.b > 0.0 {
                (level - p.c) / p.b
            } else {
                p.hi
            };
            radius = radius.clamp(p.lo, p.hi);
            break;
        }
        Some(radius.min(self.rmax()))
    }
}
