//! The Legendre associate of `χ(s) = cosh(s) - 1`.
//!
//! ```text
//! ζ(t,d) = max_{λ≥0} { dλ - χ(λ) t } = d·asinh(d/t) - √(d² + t²) + t
//! ```
//!
//! attained at `λ(t,d) = asinh(d/t)`. `ζ` is homogeneous of degree one,
//! increasing and convex in `d`, decreasing in `t`, and interpolates between
//! the Gaussian regime `ζ ≈ d²/2t` (large `t/d`) and `ζ ≈ d log(2d/t)`
//! (small `t/d`). `h` is the inverse of `t ↦ ζ(t,1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `cosh(s) - 1`, computed as `2 sinh²(s/2)` so small arguments keep full
/// relative precision.
#[inline]
pub fn chi<S: Scalar>(s: S) -> S {
    let h = (s * S::lit(0.5)).sinh();
    S::lit(2.0) * h * h
}

/// Inverse hyperbolic sine, `log(x + √(x²+1))` in a cancellation-free form.
pub fn asinh<S: Scalar>(x: S) -> S {
    if x < S::zero() {
        return -asinh(-x);
    }
    if x < S::lit(1e-4) {
        let x2 = x * x;
        return x * (S::one() - x2 / S::lit(6.0) + S::lit(3.0 / 40.0) * x2 * x2);
    }
    if x > S::lit(1e150) {
        return S::lit(std::f64::consts::LN_2) + x.ln();
    }
    // log1p(x + x²/(1 + √(1+x²))) = log(x + √(1+x²))
    let x2 = x * x;
    (x + x2 / (S::one() + (S::one() + x2).sqrt())).ln_1p()
}

/// `√(1+r²) - 1` without cancellation.
#[inline]
fn hypot_m1<S: Scalar>(r: S) -> S {
    if r < S::one() {
        r * r / ((S::one() + r * r).sqrt() + S::one())
    } else {
        S::one().hypot(r) - S::one()
    }
}

fn check_time<S: Scalar>(t: S) -> Result<()> {
    if t > S::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be positive and finite, got {t}")))
    }
}

fn check_distance<S: Scalar>(d: S) -> Result<()> {
    if d >= S::zero() && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("distance must be nonnegative, got {d}")))
    }
}

/// `ζ(t,d) = d asinh(d/t) - √(d²+t²) + t`.
pub fn zeta<S: Scalar>(t: S, d: S) -> Result<S> {
    check_time(t)?;
    check_distance(d)?;
    let r = d / t;
    if r < S::lit(1e-6) {
        // t(r²/2 - r⁴/24)
        let r2 = r * r;
        return Ok(t * r2 * (S::lit(0.5) - r2 / S::lit(24.0)));
    }
    Ok(t * (r * asinh(r) - hypot_m1(r)))
}

/// The maximizer `λ(t,d) = asinh(d/t)`.
pub fn lambda_star<S: Scalar>(t: S, d: S) -> Result<S> {
    check_time(t)?;
    check_distance(d)?;
    Ok(asinh(d / t))
}

/// `∂ζ/∂t = -χ(λ(t,d)) = 1 - √(1 + d²/t²)`.
pub fn zeta_dt<S: Scalar>(t: S, d: S) -> Result<S> {
    check_time(t)?;
    check_distance(d)?;
    Ok(-hypot_m1(d / t))
}

/// `∂ζ/∂d = λ(t,d)`.
pub fn zeta_dd<S: Scalar>(t: S, d: S) -> Result<S> {
    lambda_star(t, d)
}

/// `σ asinh(1/σ)`, which increases to 1 as `σ → ∞`.
pub fn sigma_factor<S: Scalar>(sigma: S) -> S {
    let u = S::one() / sigma;
    asinh(u) / u
}

const H_MAX_ITER: usize = 200;

/// `h(a)`, the unique `t > 0` with `ζ(t,1) = a`.
pub fn h_inverse<S: Scalar>(a: S) -> Result<S> {
    if !(a > S::zero()) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("h is defined for a > 0, got {a}")));
    }
    let z = |t: S| zeta(t, S::one()).expect("positive time");
    let mut lo = S::lit(1e-8);
    let mut hi = S::one();
    for _ in 0..H_MAX_ITER {
        if z(lo) >= a {
            break;
        }
        lo *= S::lit(0.5);
    }
    for _ in 0..H_MAX_ITER {
        if z(hi) < a {
            break;
        }
        hi *= S::lit(2.0);
    }
    if z(lo) < a || z(hi) >= a {
        return Err(Error::Numerical(format!("could not bracket h({a})")));
    }
    for _ in 0..H_MAX_ITER {
        let mid = lo + (hi - lo) * S::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if z(mid) >= a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = ((z(lo) - a).abs(), (z(hi) - a).abs());
    Ok(if rl <= rh { lo } else { hi })
}

/// Both sides of `ζ ≤ d²/2t` and, when `t ≥ σd`, of `ζ ≥ σ asinh(1/σ) d²/2t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaBounds {
    pub t: f64,
    pub d: f64,
    pub sigma: f64,
    pub zeta: f64,
    pub gaussian: f64,
    /// `d²/2t - ζ`.
    pub upper_margin: f64,
    /// `σ asinh(1/σ) d²/2t`, present only in the regime `t ≥ σd`.
    pub lower_bound: Option<f64>,
    /// `ζ - lower_bound`.
    pub lower_margin: Option<f64>,
}

impl ZetaBounds {
    pub fn holds(&self) -> bool {
        self.upper_margin >= 0.0 && self.lower_margin.is_none_or(|m| m >= 0.0)
    }
}

pub fn zeta_bounds_check(t: f64, d: f64, sigma: f64) -> Result<ZetaBounds> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let z = zeta(t, d)?;
    let gaussian = d * d / (2.0 * t);
    let lower_bound = (t >= sigma * d).then(|| sigma_factor(sigma) * gaussian);
    Ok(ZetaBounds {
        t,
        d,
        sigma,
        zeta: z,
        gaussian,
        upper_margin: gaussian - z,
        lower_bound,
        lower_margin: lower_bound.map(|b| z - b),
    })
}
