//! Extended-real scalars for potentials valued in (-inf, +inf].
//!
//! Potentials take the value +inf outside their effective domain, and that
//! infinity has to behave like a genuine infinity (not a big-M stand-in):
//! a node at +inf must contribute nothing to a supremum of affine forms,
//! and `exp(-inf)` must be exactly 0. `ExtReal` wraps an IEEE `f64` whose
//! only non-finite value is `+inf`; NaN and `-inf` are rejected at
//! construction, so arithmetic on the wrapped value follows the required
//! conventions for free: `r + inf = inf`, `min(r, inf) = r`, and
//! `x*y - inf = -inf` (a sentinel that loses every supremum, used only
//! transiently inside transform kernels).

use std::cmp::Ordering;
use std::fmt;

/// A real number or +inf. Total order with `INF` above every finite value.
#[derive(Clone, Copy, PartialEq)]
#[repr(transparent)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INF: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Wraps a finite value. Panics on NaN or -inf, which are not members.
    pub fn finite(v: f64) -> ExtReal {
        assert!(
            v.is_finite(),
            "ExtReal::finite requires a finite value, got {v}"
        );
        ExtReal(v)
    }

    /// Wraps a raw f64 that is known to be finite or +inf.
    pub fn new(v: f64) -> ExtReal {
        assert!(!v.is_nan() && v != f64::NEG_INFINITY, "ExtReal cannot hold {v}");
        ExtReal(v)
    }

    pub fn is_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// The underlying f64, +inf included.
    pub fn raw(self) -> f64 {
        self.0
    }

    /// The finite value, if any.
    pub fn finite_value(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// `exp(-self)`, with `exp(-inf) = 0`. Always lands in [0, inf).
    pub fn exp_neg(self) -> f64 {
        (-self.0).exp()
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0.min(other.0))
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0.max(other.0))
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // Neither operand can be NaN by construction.
        self.0.partial_cmp(&other.0).expect("ExtReal is never NaN")
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl std::ops::Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs.is_finite());
        ExtReal(self.0 + rhs)
    }
}

impl std::ops::Sub<f64> for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs.is_finite());
        ExtReal(self.0 - rhs)
    }
}

impl std::ops::Mul<f64> for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs > 0.0, "ExtReal scaling is positive-only");
        ExtReal(self.0 * rhs)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}
