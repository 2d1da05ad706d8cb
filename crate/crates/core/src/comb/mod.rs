//! Boundary geometry of `F(z) = ∫^z C^μ` for positive measures on the line:
//! the traced boundary, the ray (comb) test, vertical/horizontal tangent
//! classification and Widom sums of interval unions.

mod check;
mod widom;

use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

pub use check::{
    comb_check, straight_comb, vertical_slot_comb, CombCheck, Opening, Slot, Violation,
};
pub use widom::{widom_sum, WidomReport};

use crate::constructions::ConstructionError;
use crate::measure::{ComplexMeasure, Continuous, MeasureError};
use crate::quadrature::{integrate, Probe};
use crate::scalar::{cx, Cx, Real};
use crate::transforms::{cauchy_direct, cauchy_pv_with, log_potential, PvOptions, TransformError};

#[derive(Debug, Error)]
pub enum CombError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("{0}")]
    Invalid(String),
}

/// Tangent class of a boundary sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tangent {
    Vertical,
    Horizontal,
    Neither,
}

impl Tangent {
    pub fn code(&self) -> char {
        match self {
            Tangent::Vertical => 'V',
            Tangent::Horizontal => 'H',
            Tangent::Neither => 'N',
        }
    }
}

/// Real support `[min, max]` and a density evaluator for a positive,
/// atom-free measure made of interval densities.
struct LineMeasure<'a, T: Real> {
    mu: &'a ComplexMeasure<T>,
    lo: T,
    hi: T,
}

impl<'a, T: Real> LineMeasure<'a, T> {
    fn new(mu: &'a ComplexMeasure<T>) -> Result<Self, CombError> {
        if !mu.is_continuous() {
            return Err(CombError::Invalid("measure has atoms".into()));
        }
        if !mu.is_on_real_line() || !mu.is_positive() {
            return Err(CombError::Invalid(
                "measure must be positive and live on the real line".into(),
            ));
        }
        let mut ends = Vec::new();
        for p in mu.parts() {
            if let Continuous::Interval(d) = &p.kind {
                ends.push(d.a());
                ends.push(d.b());
            }
        }
        if ends.is_empty() {
            return Err(CombError::Invalid("measure is empty".into()));
        }
        ends.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ends.dedup();
        Ok(LineMeasure {
            mu,
            lo: ends[0],
            hi: ends[ends.len() - 1],
        })
    }

    fn density(&self, x: T) -> T {
        self.mu
            .parts()
            .iter()
            .map(|p| match &p.kind {
                Continuous::Interval(d) => p.coef.re * d.density(x),
                _ => T::zero(),
            })
            .sum()
    }

    /// `μ((x, ∞))`, integrated from the exact distances to the right ends.
    fn mass_right(&self, x: T) -> T {
        let mut m = T::zero();
        for p in self.mu.parts() {
            if let Continuous::Interval(d) = &p.kind {
                if x >= d.b() {
                    continue;
                }
                if x <= d.a() {
                    m += p.coef.re * d.mass();
                    continue;
                }
                let r = integrate(
                    |q: Probe<T>| cx(d.density_with(q.t, q.t - d.a(), q.d_hi), T::zero()),
                    x,
                    d.b(),
                    T::lit(1e-14),
                );
                m += p.coef.re * r.value.re;
            }
        }
        m
    }

    /// Boundary value `F'(x + i0) = p.v. C^μ(x) + iπ g(x)`.
    fn derivative(&self, x: T) -> Result<Cx<T>, TransformError> {
        let pv = cauchy_pv_with(self.mu, cx(x, T::zero()), &PvOptions::fast(T::lit(1e-13)))?.value;
        Ok(cx(pv.re, T::PI() * self.density(x)))
    }
}

/// Boundary values of `F` on a real grid, normalised by `F(base) = 0` at
/// the right end of the support.
#[derive(Debug, Clone)]
pub struct Trace<T: Real> {
    pub x: Vec<T>,
    pub f: Vec<Cx<T>>,
    pub fprime: Vec<Cx<T>>,
    /// Grid indices where `F'` could not be evaluated; their values are
    /// interpolated from the neighbours.
    pub flagged: Vec<usize>,
    pub base: T,
}

impl<T: Real> Trace<T> {
    pub fn length(&self) -> T {
        self.f.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn height(&self) -> T {
        let (lo, hi) = self
            .f
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(l, h), w| {
                (l.min(w.im), h.max(w.im))
            });
        hi - lo
    }

    /// Whether `Im F` never decreases along the grid by more than `tol`.
    pub fn im_monotone(&self, tol: T) -> bool {
        self.f.windows(2).all(|w| w[1].im >= w[0].im - tol)
    }
}

/// Cell-centred grid of `n` points on the support padded by half its
/// length on each side.
pub fn default_grid<T: Real>(mu: &ComplexMeasure<T>, n: usize) -> Result<Vec<T>, CombError> {
    let lm = LineMeasure::new(mu)?;
    if n < 4 {
        return Err(CombError::Invalid("grid needs at least 4 points".into()));
    }
    let pad = (lm.hi - lm.lo) * T::lit(0.5);
    let (a, b) = (lm.lo - pad, lm.hi + pad);
    let h = (b - a) / T::of_usize(n);
    Ok((0..n)
        .map(|k| a + h * (T::of_usize(k) + T::lit(0.5)))
        .collect())
}

/// `F(x + i0) = U(b) - U(x) - iπ μ((x, ∞))` with `U` the logarithmic
/// potential.
fn boundary_value<T: Real>(lm: &LineMeasure<'_, T>, x: T) -> Cx<T> {
    let u = |t: T| log_potential(lm.mu, cx(t, T::zero())).re;
    cx(u(lm.hi) - u(x), -T::PI() * lm.mass_right(x))
}

/// `F(x)` and `F'(x)` on an increasing grid.
pub fn boundary_trace<T: Real>(mu: &ComplexMeasure<T>, grid: &[T]) -> Result<Trace<T>, CombError> {
    let lm = LineMeasure::new(mu)?;
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CombError::Invalid(
            "grid must be strictly increasing with at least 2 points".into(),
        ));
    }
    let base = lm.hi;
    let n = grid.len();
    let mut fprime = Vec::with_capacity(n);
    let mut flagged = Vec::new();
    for (k, &x) in grid.iter().enumerate() {
        match lm.derivative(x) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => fprime.push(v),
            _ => {
                flagged.push(k);
                fprime.push(cx(T::nan(), T::nan()));
            }
        }
    }
    for &k in &flagged {
        let left = (0..k).rev().find(|j| !flagged.contains(j));
        let right = (k + 1..n).find(|j| !flagged.contains(j));
        fprime[k] = match (left, right) {
            (Some(l), Some(r)) => {
                let s = (grid[k] - grid[l]) / (grid[r] - grid[l]);
                fprime[l] + (fprime[r] - fprime[l]) * s
            }
            (Some(l), None) => fprime[l],
            (None, Some(r)) => fprime[r],
            (None, None) => {
                return Err(CombError::Invalid(
                    "no grid point has a finite derivative".into(),
                ))
            }
        };
    }
    let f = grid.iter().map(|&x| boundary_value(&lm, x)).collect();
    Ok(Trace {
        x: grid.to_vec(),
        f,
        fprime,
        flagged,
        base,
    })
}

/// `F(z) = ∫_b^z C^μ` with `b` the right end of the support.
///
/// Real `z` takes the boundary value from above; otherwise the path
/// runs from `b` straight up to height `h`, across, and down to `z`
/// (`h` defaults to the larger of `Im z` and half the support length).
pub fn conformal_f<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    height: Option<T>,
) -> Result<Cx<T>, CombError> {
    let lm = LineMeasure::new(mu)?;
    if z.im < T::zero() {
        return Err(CombError::Invalid(
            "point must lie in the closed upper half-plane".into(),
        ));
    }
    if z.im == T::zero() {
        return Ok(boundary_value(&lm, z.re));
    }
    let h = height.unwrap_or_else(|| z.im.max((lm.hi - lm.lo) * T::lit(0.5)));
    if !(h > T::zero()) {
        return Err(CombError::Invalid("path height must be positive".into()));
    }
    let corners = [cx(lm.hi, T::zero()), cx(lm.hi, h), cx(z.re, h), z];
    let mut acc = cx(T::zero(), T::zero());
    for w in corners.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p == q {
            continue;
        }
        let d = q - p;
        let r = integrate(
            |s: Probe<T>| {
                // the first leg starts on the support; measure from its end exactly
                let at = if s.d_lo <= s.d_hi {
                    p + d * s.d_lo
                } else {
                    q - d * s.d_hi
                };
                cauchy_direct(mu, at) * d
            },
            T::zero(),
            T::one(),
            T::lit(1e-12),
        );
        acc += r.value;
    }
    Ok(acc)
}

/// Angle classification of `F'` at each trace sample.
pub fn classify<T: Real>(fprime: &[Cx<T>], tol_angle: T) -> Vec<Tangent> {
    fprime
        .iter()
        .map(|d| {
            let m = d.norm();
            if !m.is_finite() {
                Tangent::Neither
            } else if d.re.abs() < tol_angle * m {
                Tangent::Vertical
            } else if d.im.abs() < tol_angle * m {
                Tangent::Horizontal
            } else {
                Tangent::Neither
            }
        })
        .collect()
}

/// Arc-length weighted fractions `(vertical, horizontal, neither)`; each
/// sample carries half the length of its two adjacent trace segments.
pub fn vh_fractions<T: Real>(trace: &Trace<T>, classes: &[Tangent]) -> (T, T, T) {
    let n = trace.f.len();
    let seg: Vec<T> = trace.f.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let mut acc = [T::zero(); 3];
    for k in 0..n {
        let mut w = T::zero();
        if k > 0 {
            w += seg[k - 1] * T::lit(0.5);
        }
        if k + 1 < n {
            w += seg[k] * T::lit(0.5);
        }
        let i = match classes[k] {
            Tangent::Vertical => 0,
            Tangent::Horizontal => 1,
            Tangent::Neither => 2,
        };
        acc[i] += w;
    }
    let total = acc[0] + acc[1] + acc[2];
    if total > T::zero() {
        (acc[0] / total, acc[1] / total, acc[2] / total)
    } else {
        (T::zero(), T::zero(), T::zero())
    }
}

/// Traces `mu` on `grid` and classifies every sample.
pub fn vh_classify<T: Real>(
    mu: &ComplexMeasure<T>,
    grid: &[T],
    tol_angle: T,
) -> Result<(Trace<T>, Vec<Tangent>, (T, T, T)), CombError> {
    let trace = boundary_trace(mu, grid)?;
    let classes = classify(&trace.fprime, tol_angle);
    let fr = vh_fractions(&trace, &classes);
    Ok((trace, classes, fr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rectifiability {
    AtResolution,
    NonRectifiableTrend,
}

impl Rectifiability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rectifiability::AtResolution => "rectifiable at resolution",
            Rectifiability::NonRectifiableTrend => "non-rectifiable trend",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CombReport<T: Real> {
    pub trace: Trace<T>,
    pub classes: Vec<Tangent>,
    pub comb: CombCheck<T>,
    /// `(vertical, horizontal, neither)`.
    pub vh_fractions: (T, T, T),
    pub rect_length: T,
    /// Trace lengths at `n`, `2n`, `4n` grid points (the last two only
    /// while the ratio stays away from one).
    pub refined_lengths: Vec<T>,
    pub rectifiability: Rectifiability,
    pub strip_height: T,
    pub mass: T,
    pub im_monotone: bool,
    pub tol_angle: T,
}

/// Full boundary report on the default grid of `n` points.
pub fn comb_report<T: Real>(
    mu: &ComplexMeasure<T>,
    n: usize,
    tol_angle: T,
) -> Result<CombReport<T>, CombError> {
    let grid = default_grid(mu, n)?;
    let (trace, classes, vh) = vh_classify(mu, &grid, tol_angle)?;
    let comb = comb_check(&trace.f, None);
    let rect_length = trace.length();
    let mut refined_lengths = vec![rect_length];
    let near_one = |r: T| (r - T::one()).abs() < T::lit(1e-2);
    let mut m = n;
    let mut rectifiability = Rectifiability::NonRectifiableTrend;
    for _ in 0..2 {
        m *= 2;
        let t = boundary_trace(mu, &default_grid(mu, m)?)?;
        let prev = *refined_lengths.last().unwrap_or(&rect_length);
        refined_lengths.push(t.length());
        if near_one(t.length() / prev) {
            rectifiability = Rectifiability::AtResolution;
            break;
        }
    }
    let mass = mu.mass().re;
    let strip_height = trace.height();
    let im_monotone = trace.im_monotone(T::lit(1e-9) * mass.max(T::one()));
    Ok(CombReport {
        trace,
        classes,
        comb,
        vh_fractions: vh,
        rect_length,
        refined_lengths,
        rectifiability,
        strip_height,
        mass,
        im_monotone,
        tol_angle,
    })
}

impl<T: Real> CombReport<T> {
    /// Columns `x, ReF, ImF, ReF', ImF', class`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,ReF,ImF,ReF',ImF',class\n");
        let t = &self.trace;
        for k in 0..t.x.len() {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e},{}",
                t.x[k].as_f64(),
                t.f[k].re.as_f64(),
                t.f[k].im.as_f64(),
                t.fprime[k].re.as_f64(),
                t.fprime[k].im.as_f64(),
                self.classes[k].code()
            );
        }
        s
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "comb_like": self.comb.comb_like,
            "opening": self.comb.opening.map(|o| o.as_str()),
            "violations": self.comb.violations.len(),
            "vh_fractions": {
                "vertical": self.vh_fractions.0.as_f64(),
                "horizontal": self.vh_fractions.1.as_f64(),
                "neither": self.vh_fractions.2.as_f64(),
            },
            "tol_angle": self.tol_angle.as_f64(),
            "rect_length": self.rect_length.as_f64(),
            "refined_lengths": self.refined_lengths.iter().map(|v| v.as_f64()).collect::<Vec<_>>(),
            "rectifiability": self.rectifiability.as_str(),
            "strip_height": self.strip_height.as_f64(),
            "mass": self.mass.as_f64(),
            "im_monotone": self.im_monotone,
            "grid_points": self.trace.x.len(),
            "flagged_points": self.trace.flagged.len(),
        })
    }
}

#[cfg(test)]
mod tests;
