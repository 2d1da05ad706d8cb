use num_complex::Complex;

use super::MeasureError;
use crate::quadrature::{integrate, Probe};
use crate::scalar::Real;

/// Smooth factor of an interval density. The full density is
/// `(t - a)^alpha (b - t)^beta h(t)` with `h` given by the family.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    /// `1 / (π sqrt((t - a)(b - t)))`, mass one.
    Arcsine,
    /// `sqrt((t - a)(b - t)) / π`; on `[-1, 1]` this has mass 1/2.
    Semicircle,
    /// `1 / (b - a)`, mass one.
    Uniform,
    /// Jacobi weight times a polynomial in `t` (coefficients by ascending power).
    Jacobi { alpha: T, beta: T, poly: Vec<T> },
    /// Jacobi weight times a piecewise-cubic interpolant of equispaced samples.
    Tabulated { alpha: T, beta: T, values: Vec<T> },
    /// `scale |∏(t - root)| / sqrt(∏|t - e|)` over the other endpoints `e`,
    /// with exponents `-1/2` at both ends. Harmonic measures of interval
    /// unions restrict to each interval in this form.
    Equilibrium {
        roots: Vec<T>,
        outer: Vec<T>,
        scale: T,
    },
}

impl<T: Real> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Arcsine => "arcsine",
            Family::Semicircle => "semicircle",
            Family::Uniform => "uniform",
            Family::Jacobi { .. } => "jacobi",
            Family::Tabulated { .. } => "tabulated",
            Family::Equilibrium { .. } => "equilibrium",
        }
    }

    fn exponents(&self) -> (T, T) {
        let half = T::lit(0.5);
        match self {
            Family::Arcsine | Family::Equilibrium { .. } => (-half, -half),
            Family::Semicircle => (half, half),
            Family::Uniform => (T::zero(), T::zero()),
            Family::Jacobi { alpha, beta, .. } | Family::Tabulated { alpha, beta, .. } => {
                (*alpha, *beta)
            }
        }
    }
}

/// Real density on `[a, b]` with algebraic endpoint behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDensity<T> {
    a: T,
    b: T,
    alpha: T,
    beta: T,
    family: Family<T>,
    mass: T,
    variation: T,
}

impl<T: Real> IntervalDensity<T> {
    pub fn new(a: T, b: T, family: Family<T>) -> Result<Self, MeasureError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(MeasureError::NonFinite("interval endpoint".into()));
        }
        if !(b > a) {
            return Err(MeasureError::EmptyInterval {
                a: a.as_f64(),
                b: b.as_f64(),
            });
        }
        let (alpha, beta) = family.exponents();
        if !(alpha > -T::one() && beta > -T::one()) {
            return Err(MeasureError::BadExponent {
                alpha: alpha.as_f64(),
                beta: beta.as_f64(),
            });
        }
        match &family {
            Family::Tabulated { values, .. } if values.len() < 2 => {
                return Err(MeasureError::Invalid(
                    "tabulated density needs at least two samples".into(),
                ))
            }
            Family::Tabulated { values, .. } if values.iter().any(|v| !v.is_finite()) => {
                return Err(MeasureError::NonFinite("tabulated sample".into()))
            }
            Family::Jacobi { poly, .. } if poly.iter().any(|v| !v.is_finite()) => {
                return Err(MeasureError::NonFinite("polynomial coefficient".into()))
            }
            Family::Equilibrium {
                roots,
                outer,
                scale,
            } => {
                if !scale.is_finite() || roots.iter().chain(outer).any(|v| !v.is_finite()) {
                    return Err(MeasureError::NonFinite("equilibrium parameters".into()));
                }
                if outer.iter().any(|&e| e > a && e < b) {
                    return Err(MeasureError::Invalid(
                        "equilibrium endpoint inside its own interval".into(),
                    ));
                }
            }
            _ => {}
        }
        let mut out = IntervalDensity {
            a,
            b,
            alpha,
            beta,
            family,
            mass: T::zero(),
            variation: T::zero(),
        };
        out.mass = out.integrate_density(|_| T::one());
        out.variation = out.integrate_density_abs();
        if !(out.mass.is_finite() && out.variation.is_finite()) {
            return Err(MeasureError::NonFinite("interval mass".into()));
        }
        Ok(out)
    }

    pub fn arcsine(a: T, b: T) -> Result<Self, MeasureError> {
        Self::new(a, b, Family::Arcsine)
    }

    pub fn semicircle(a: T, b: T) -> Result<Self, MeasureError> {
        Self::new(a, b, Family::Semicircle)
    }

    pub fn uniform(a: T, b: T) -> Result<Self, MeasureError> {
        Self::new(a, b, Family::Uniform)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// Exponents `(alpha, beta)` at `a` and `b`.
    pub fn exponents(&self) -> (T, T) {
        (self.alpha, self.beta)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    /// `∫ g(t) dt`.
    pub fn mass(&self) -> T {
        self.mass
    }

    /// `∫ |g(t)| dt`.
    pub fn variation(&self) -> T {
        self.variation
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.family {
            Family::Arcsine | Family::Semicircle | Family::Uniform | Family::Equilibrium { .. } => {
                true
            }
            Family::Tabulated { values, .. } => values.iter().all(|v| *v >= T::zero()),
            Family::Jacobi { .. } => (0..=256).all(|k| {
                let t = self.a + (self.b - self.a) * T::of_usize(k) / T::lit(256.0);
                self.smooth(t) >= T::zero()
            }),
        }
    }

    /// Interior sample knots of a tabulated density, where the interpolant
    /// loses smoothness.
    pub fn knots(&self) -> Vec<T> {
        match &self.family {
            Family::Tabulated { values, .. } if values.len() > 2 => {
                let m = values.len() - 1;
                (1..m)
                    .map(|k| self.a + (self.b - self.a) * T::of_usize(k) / T::of_usize(m))
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Endpoint weight `(t - a)^alpha (b - t)^beta` from exact distances.
    #[inline]
    pub fn weight(&self, d_a: T, d_b: T) -> T {
        pow(d_a, self.alpha) * pow(d_b, self.beta)
    }

    /// The smooth factor `h(t)`.
    pub fn smooth(&self, t: T) -> T {
        let (a, b) = (self.a, self.b);
        match &self.family {
            Family::Arcsine | Family::Semicircle => T::FRAC_1_PI(),
            Family::Uniform => (b - a).recip(),
            Family::Jacobi { poly, .. } => poly.iter().rev().fold(T::zero(), |acc, c| acc * t + *c),
            Family::Tabulated { values, .. } => cubic_equispaced(values, (t - a) / (b - a)),
            Family::Equilibrium {
                roots,
                outer,
                scale,
            } => {
                let num = roots.iter().fold(T::one(), |acc, c| acc * (t - *c));
                let den = outer.iter().fold(T::one(), |acc, e| acc * (t - *e).abs());
                *scale * num.abs() / den.sqrt()
            }
        }
    }

    /// Density at `t` given exact distances to both ends.
    #[inline]
    pub fn density_with(&self, t: T, d_a: T, d_b: T) -> T {
        self.weight(d_a, d_b) * self.smooth(t)
    }

    /// Density at an interior point; zero outside `[a, b]`.
    pub fn density(&self, t: T) -> T {
        if t <= self.a || t >= self.b {
            if (t == self.a && self.alpha == T::zero()) || (t == self.b && self.beta == T::zero()) {
                return self.smooth(t);
            }
            return T::zero();
        }
        self.density_with(t, t - self.a, self.b - t)
    }

    /// Maps a probe on the sub-piece `[lo, hi] ⊂ [a, b]` to exact
    /// distances from `a` and `b`.
    #[inline]
    pub fn distances(&self, p: &Probe<T>, lo: T, hi: T) -> (T, T) {
        let d_a = if lo == self.a { p.d_lo } else { p.t - self.a };
        let d_b = if hi == self.b { p.d_hi } else { self.b - p.t };
        (d_a, d_b)
    }

    /// `∫ f(t) g(t) dt` by adaptive quadrature.
    pub fn integrate_density<F: Fn(T) -> T>(&self, f: F) -> T {
        let (a, b) = (self.a, self.b);
        integrate(
            |p: Probe<T>| Complex::new(f(p.t) * self.density_with(p.t, p.d_lo, p.d_hi), T::zero()),
            a,
            b,
            T::lit(1e-14),
        )
        .value
        .re
    }

    fn integrate_density_abs(&self) -> T {
        let (a, b) = (self.a, self.b);
        integrate(
            |p: Probe<T>| Complex::new(self.density_with(p.t, p.d_lo, p.d_hi).abs(), T::zero()),
            a,
            b,
            T::lit(1e-14),
        )
        .value
        .re
    }

    /// Closed form of `p.v. ∫ (t-a)^α (b-t)^β / (t - x) dt` for the exponent
    /// pairs that have one, `x ∈ (a, b)`.
    pub fn weight_hilbert_closed(&self, x: T) -> Option<T> {
        let half = T::lit(0.5);
        let (a, b) = (self.a, self.b);
        if self.alpha == -half && self.beta == -half {
            Some(T::zero())
        } else if self.alpha == half && self.beta == half {
            Some(-T::PI() * (x - (a + b) * half))
        } else if self.alpha == T::zero() && self.beta == T::zero() {
            Some(((b - x) / (x - a)).ln())
        } else {
            None
        }
    }
}

#[inline]
fn pow<T: Real>(x: T, e: T) -> T {
    if e == T::zero() {
        T::one()
    } else if e == T::lit(-0.5) {
        x.sqrt().recip()
    } else if e == T::lit(0.5) {
        x.sqrt()
    } else {
        x.powf(e)
    }
}

/// Cubic Hermite interpolation of equispaced samples on `[0, 1]` with
/// finite-difference slopes.
pub(crate) fn cubic_equispaced<T: Real>(values: &[T], s: T) -> T {
    let m = values.len();
    if m == 1 {
        return values[0];
    }
    let h = (T::of_usize(m - 1)).recip();
    let s = s.max(T::zero()).min(T::one());
    let pos = s / h;
    let k = pos.floor().to_usize().unwrap_or(0).min(m - 2);
    let u = pos - T::of_usize(k);
    let slope = |i: usize| -> T {
        if m == 2 || i == 0 {
            values[1] - values[0]
        } else if i == m - 1 {
            values[m - 1] - values[m - 2]
        } else {
            (values[i + 1] - values[i - 1]) * T::lit(0.5)
        }
    };
    let (y0, y1, m0, m1) = (values[k], values[k + 1], slope(k), slope(k + 1));
    let u2 = u * u;
    let u3 = u2 * u;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    (two * u3 - three * u2 + T::one()) * y0
        + (u3 - two * u2 + u) * m0
        + (-two * u3 + three * u2) * y1
        + (u3 - u2) * m1
}
