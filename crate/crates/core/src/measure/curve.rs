use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::MeasureError;
use crate::quadrature::Probe;
use crate::scalar::{cx, Cx, Real};

/// Closed curve `t ↦ ζ(t)`, `t ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape<T> {
    Circle {
        center: Cx<T>,
        radius: T,
    },
    /// `ζ(t) = Σ c_k e^{ikt}`.
    Fourier {
        terms: Vec<(i32, Cx<T>)>,
    },
}

impl<T: Real> CurveShape<T> {
    pub fn point(&self, t: T) -> Cx<T> {
        match self {
            CurveShape::Circle { center, radius } => *center + Complex::from_polar(*radius, t),
            CurveShape::Fourier { terms } => {
                terms.iter().fold(cx(T::zero(), T::zero()), |acc, (k, c)| {
                    acc + *c * Complex::from_polar(T::one(), T::lit(*k as f64) * t)
                })
            }
        }
    }

    /// `ζ(t0 + δ) - ζ(t0)`, free of cancellation for small `δ`.
    pub fn chord(&self, t0: T, delta: T) -> Cx<T> {
        // e^{iθ} - 1 = 2i sin(θ/2) e^{iθ/2}
        let em1 = |th: T| {
            let h = th * T::lit(0.5);
            Complex::from_polar(T::lit(2.0) * h.sin(), h) * cx(T::zero(), T::one())
        };
        match self {
            CurveShape::Circle { radius, .. } => Complex::from_polar(*radius, t0) * em1(delta),
            CurveShape::Fourier { terms } => {
                terms.iter().fold(cx(T::zero(), T::zero()), |acc, (k, c)| {
                    let kf = T::lit(*k as f64);
                    acc + *c * Complex::from_polar(T::one(), kf * t0) * em1(kf * delta)
                })
            }
        }
    }

    pub fn tangent(&self, t: T) -> Cx<T> {
        match self {
            CurveShape::Circle { radius, .. } => {
                Complex::from_polar(*radius, t) * cx(T::zero(), T::one())
            }
            CurveShape::Fourier { terms } => {
                terms.iter().fold(cx(T::zero(), T::zero()), |acc, (k, c)| {
                    let kf = T::lit(*k as f64);
                    acc + *c * cx(T::zero(), kf) * Complex::from_polar(T::one(), kf * t)
                })
            }
        }
    }
}

/// Complex density on a curve.
#[derive(Clone)]
pub enum CurveFn<T> {
    Constant(Cx<T>),
    /// `ζ ↦ ζ`.
    Identity,
    /// `2 sqrt(ζ² - 1)` on the branch that behaves like `2ζ` at infinity
    /// (cut along `[-1, 1]`).
    SqrtSlit,
    Custom(Arc<dyn Fn(Cx<T>) -> Cx<T> + Send + Sync>),
}

impl<T: Real> CurveFn<T> {
    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        match self {
            CurveFn::Constant(c) => *c,
            CurveFn::Identity => z,
            CurveFn::SqrtSlit => sqrt_slit(z) * T::lit(2.0),
            CurveFn::Custom(f) => f(z),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CurveFn::Constant(_) => "constant",
            CurveFn::Identity => "z",
            CurveFn::SqrtSlit => "sqrt_slit",
            CurveFn::Custom(_) => "custom",
        }
    }
}

impl<T: Real> fmt::Debug for CurveFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveFn::Constant(c) => write!(f, "Constant({c})"),
            other => f.write_str(other.name()),
        }
    }
}

/// `sqrt(z² - 1)` analytic off `[-1, 1]` and asymptotic to `z`.
pub fn sqrt_slit<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.norm() < T::lit(1e-300) {
        // on the cut; the upper-side value
        return cx(T::zero(), T::one());
    }
    let w = Complex::new(T::one(), T::zero()) - (z * z).inv();
    z * w.sqrt()
}

/// Parameter samples used for validation and arc-length tables.
pub(crate) const BASE_SAMPLES: usize = 256;

/// Measure `coef · f(ζ) dζ` along a closed curve with the given orientation.
#[derive(Clone)]
pub struct CurveDensity<T> {
    shape: CurveShape<T>,
    density: CurveFn<T>,
    orientation: i8,
    /// Cumulative arc length at `4 * BASE_SAMPLES` parameter points.
    arc: Vec<T>,
    variation: T,
    scale: T,
}

impl<T: Real> fmt::Debug for CurveDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveDensity")
            .field("shape", &self.shape)
            .field("density", &self.density)
            .field("orientation", &self.orientation)
            .field("variation", &self.variation)
            .finish()
    }
}

impl<T: Real> CurveDensity<T> {
    pub fn new(
        shape: CurveShape<T>,
        density: CurveFn<T>,
        orientation: i8,
    ) -> Result<Self, MeasureError> {
        if orientation != 1 && orientation != -1 {
            return Err(MeasureError::Invalid("orientation must be +1 or -1".into()));
        }
        if let CurveShape::Circle { center, radius } = &shape {
            if !(*radius > T::zero())
                || !radius.is_finite()
                || !center.re.is_finite()
                || !center.im.is_finite()
            {
                return Err(MeasureError::Invalid(
                    "circle radius must be positive".into(),
                ));
            }
        }
        let two_pi = T::TAU();
        let n = BASE_SAMPLES;
        let pts: Vec<Cx<T>> = (0..n)
            .map(|k| shape.point(two_pi * T::of_usize(k) / T::of_usize(n)))
            .collect();
        let scale = pts
            .iter()
            .map(|p| (*p - pts[0]).norm())
            .fold(T::zero(), T::max);
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(MeasureError::DegenerateTangent);
        }
        let m = 4 * n;
        let dt = two_pi / T::of_usize(m);
        let mut arc = Vec::with_capacity(m + 1);
        arc.push(T::zero());
        let mut speed_min = T::infinity();
        let mut variation = T::zero();
        let mut acc = T::zero();
        for k in 0..m {
            let t = dt * T::of_usize(k);
            let d = shape.tangent(t);
            let speed = d.norm();
            speed_min = speed_min.min(speed);
            acc += speed * dt;
            arc.push(acc);
            variation += density.eval(shape.point(t)).norm() * speed * dt;
        }
        if !(speed_min > scale * T::lit(1e-10)) {
            return Err(MeasureError::DegenerateTangent);
        }
        if !variation.is_finite() {
            return Err(MeasureError::NonFinite("curve density".into()));
        }
        if !matches!(shape, CurveShape::Circle { .. }) && polygon_self_intersects(&pts) {
            return Err(MeasureError::NonSimpleCurve);
        }
        Ok(CurveDensity {
            shape,
            density,
            orientation,
            arc,
            variation,
            scale,
        })
    }

    pub fn circle(center: Cx<T>, radius: T, density: CurveFn<T>) -> Result<Self, MeasureError> {
        Self::new(CurveShape::Circle { center, radius }, density, 1)
    }

    pub fn shape(&self) -> &CurveShape<T> {
        &self.shape
    }

    pub fn density_fn(&self) -> &CurveFn<T> {
        &self.density
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn length(&self) -> T {
        *self.arc.last().unwrap()
    }

    /// Cumulative arc-length table at `4 * 256` parameter samples.
    pub fn arc_table(&self) -> &[T] {
        &self.arc
    }

    /// `∫ |f(ζ)| |dζ|`.
    pub fn variation(&self) -> T {
        self.variation
    }

    /// Rough diameter of the curve.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// Density of the measure in the parameter: `o · f(ζ(t)) ζ'(t)`.
    #[inline]
    pub fn element(&self, t: T) -> Cx<T> {
        let z = self.shape.point(t);
        self.density.eval(z) * self.shape.tangent(t) * T::lit(self.orientation as f64)
    }

    pub fn integral(&self) -> Cx<T> {
        let n = 4 * BASE_SAMPLES;
        let dt = T::TAU() / T::of_usize(n);
        (0..n).fold(cx(T::zero(), T::zero()), |acc, k| {
            acc + self.element(dt * T::of_usize(k)) * dt
        })
    }

    /// `+1` if the parametrisation runs counter-clockwise, `-1` otherwise.
    pub fn param_sign(&self) -> T {
        let n = BASE_SAMPLES;
        let dt = T::TAU() / T::of_usize(n);
        let area = (0..n).fold(T::zero(), |acc, k| {
            let t = dt * T::of_usize(k);
            acc + (self.shape.point(t).conj() * self.shape.tangent(t)).im
        });
        if area >= T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }

    /// Parameter of the closest curve point to `z` and its distance.
    pub fn closest(&self, z: Cx<T>) -> (T, T) {
        if let CurveShape::Circle { center, radius } = &self.shape {
            let d = z - *center;
            let t = if d.norm() == T::zero() {
                T::zero()
            } else {
                d.arg()
            };
            let t = if t < T::zero() { t + T::TAU() } else { t };
            return (t, (d.norm() - *radius).abs());
        }
        let n = 4 * BASE_SAMPLES;
        let dt = T::TAU() / T::of_usize(n);
        let mut best = (T::zero(), T::infinity());
        for k in 0..n {
            let t = dt * T::of_usize(k);
            let d = (self.shape.point(t) - z).norm();
            if d < best.1 {
                best = (t, d);
            }
        }
        // golden-section refinement on the bracketing cell
        let (mut lo, mut hi) = (best.0 - dt, best.0 + dt);
        let g = T::lit(0.618_033_988_749_894_9);
        let dist = |t: T| (self.shape.point(t) - z).norm();
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if dist(m1) < dist(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let t = (lo + hi) * T::lit(0.5);
        let t = t - T::TAU() * (t / T::TAU()).floor();
        (t, dist(t))
    }

    /// Parameter ranges where `|ζ(t) - z| > eps`, anchored at the closest
    /// parameter `t0`. Ranges lie in `[t0, t0 + 2π]`; without excision the
    /// whole period is returned.
    pub fn excision(&self, z: Cx<T>, eps: T) -> Excision<T> {
        let (t0, dmin) = self.closest(z);
        let base = self.shape.point(t0) - z;
        let two_pi = T::TAU();
        let whole = ParamRange {
            lo: t0,
            hi: t0 + two_pi,
            lo_off: T::zero(),
            hi_off: T::zero(),
        };
        let mut ex = Excision {
            t0,
            base,
            ranges: vec![whole],
        };
        if dmin >= eps {
            return ex;
        }
        if let CurveShape::Circle { center, radius } = &self.shape {
            let d = (z - *center).norm();
            let r = *radius;
            // |ζ(t0 + δ) - z|² = (r - d)² + 4rd sin²(δ/2)
            let g = (r - d).abs();
            let s2 = (eps - g) * (eps + g) / (T::lit(4.0) * r * d.max(T::min_positive_value()));
            ex.ranges.clear();
            if d == T::zero() || s2 >= T::one() {
                return ex;
            }
            let half = T::lit(2.0) * s2.sqrt().asin();
            ex.ranges.push(ParamRange {
                lo: t0 + half,
                hi: t0 + two_pi - half,
                lo_off: half,
                hi_off: -half,
            });
            return ex;
        }
        let inside = |delta: T| (self.shape.chord(t0, delta) + base).norm() <= eps;
        let n = 4 * BASE_SAMPLES;
        let dt = two_pi / T::of_usize(n);
        // boundary of the excised set between `lo` and `hi`, scanning in
        // direction `sign`
        let cut = |mut lo: T, mut hi: T, lo_in: bool, sign: T| {
            for _ in 0..200 {
                let mid = (lo + hi) * T::lit(0.5);
                if mid == lo || mid == hi {
                    break;
                }
                if inside(sign * mid) == lo_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo + hi) * T::lit(0.5)
        };
        // the component around δ = 0, walked outwards both ways
        let edge = |sign: T| {
            (1..=n / 2)
                .find(|&k| !inside(sign * dt * T::of_usize(k)))
                .map(|k| cut(dt * T::of_usize(k - 1), dt * T::of_usize(k), true, sign))
        };
        let (Some(up), Some(down)) = (edge(T::one()), edge(-T::one())) else {
            ex.ranges.clear();
            return ex;
        };
        let down = -down;
        // any further components on [up, 2π + down]
        let end = two_pi + down;
        let mut cuts: Vec<(T, bool)> = Vec::new();
        let mut prev = up;
        let mut prev_in = false;
        let mut k = (up / dt).ceil().to_usize().unwrap_or(1).max(1);
        loop {
            let d = dt * T::of_usize(k);
            if d >= end {
                break;
            }
            let cur_in = inside(d);
            if cur_in != prev_in {
                cuts.push((cut(prev, d, prev_in, T::one()), cur_in));
            }
            prev = d;
            prev_in = cur_in;
            k += 1;
        }
        ex.ranges.clear();
        let mut start = up;
        let mut open = true;
        for (d, now_in) in cuts {
            if now_in && open {
                ex.ranges.push(ParamRange {
                    lo: t0 + start,
                    hi: t0 + d,
                    lo_off: start,
                    hi_off: d,
                });
                open = false;
            } else if !now_in {
                start = d;
                open = true;
            }
        }
        if open {
            ex.ranges.push(ParamRange {
                lo: t0 + start,
                hi: t0 + end,
                lo_off: start,
                hi_off: down,
            });
        }
        ex
    }
}

/// Parameter range `[lo, hi]` whose ends sit at offsets `lo_off` and
/// `hi_off` (modulo 2π) from the anchor of an [`Excision`].
#[derive(Debug, Clone, Copy)]
pub struct ParamRange<T> {
    pub lo: T,
    pub hi: T,
    pub lo_off: T,
    pub hi_off: T,
}

impl<T: Real> ParamRange<T> {
    /// Offset from the anchor for a probe on this range, taken from the
    /// nearer end.
    #[inline]
    pub fn delta(&self, p: &Probe<T>) -> T {
        if p.d_lo <= p.d_hi {
            self.lo_off + p.d_lo
        } else {
            self.hi_off - p.d_hi
        }
    }
}

/// Result of [`CurveDensity::excision`]. `ζ(t0 + δ) - z` is
/// `shape.chord(t0, δ) + base`.
#[derive(Debug, Clone)]
pub struct Excision<T> {
    pub t0: T,
    pub base: Cx<T>,
    pub ranges: Vec<ParamRange<T>>,
}

fn polygon_self_intersects<T: Real>(pts: &[Cx<T>]) -> bool {
    let n = pts.len();
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let orient = |a: Cx<T>, b: Cx<T>, c: Cx<T>| ((b - a).conj() * (c - a)).im;
    for i in 0..n {
        let (p1, p2) = seg(i);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q1, q2) = seg(j);
            let d1 = orient(p1, p2, q1);
            let d2 = orient(p1, p2, q2);
            let d3 = orient(q1, q2, p1);
            let d4 = orient(q1, q2, p2);
            if d1 * d2 < T::zero() && d3 * d4 < T::zero() {
                return true;
            }
        }
    }
    false
}
