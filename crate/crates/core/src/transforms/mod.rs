//! Truncated and principal-value Cauchy transforms, the Cauchy maximal
//! function, Poisson and conjugate Poisson integrals, the Riesz transform
//! `R₁`, odd kernels and kernel difference identities.
//!
//! The Cauchy transform is `C^μ(z) = ∫ dμ(ζ) / (ζ - z)`, so
//! `C^μ(z) ~ -μ(ℂ) / z` at infinity.

mod engine;
mod kernels;

use thiserror::Error;

pub(crate) use engine::{kernel_integral, PlaneKernel, Quad, Weighting};
pub use kernels::{
    interpolation_decay, interpolation_error, kernel_diff_coeffs, kernel_symmetry_residual,
    odd_kernel_eps, KernelSpec,
};

use crate::measure::{ComplexMeasure, Continuous, CurveDensity, CurveFn, IntervalDensity};
use crate::quadrature::{gauss_jacobi, integrate, Probe};
use crate::scalar::{cx, tol_floor, Cx, Real};
use engine::{interval_pieces, part_integral, CauchyKernel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("principal value at atom excluded by definition")]
    AtAtom,
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("kernel {0} is not odd")]
    NotOdd(String),
    #[error("measure has components off the real line")]
    OffRealLine,
    #[error("principal value not evaluable: {0}")]
    NotEvaluable(String),
    #[error("{0}")]
    BadArgument(String),
}

/// Tolerance handed to the inner quadratures for a requested accuracy.
pub(crate) fn quad_tol<T: Real>(tol: T) -> T {
    tol_floor((tol * T::lit(1e-2)).min(T::lit(1e-12)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    Oscillating,
    Diverging,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Oscillating => "oscillating",
            Status::Diverging => "diverging",
        }
    }
}

/// Principal value with its ε-ladder cross-check.
#[derive(Debug, Clone)]
pub struct EvalResult<T: Real> {
    pub value: Cx<T>,
    /// Strictly decreasing.
    pub epsilons: Vec<T>,
    /// `C^μ_ε(z)` at each ε.
    pub ladder: Vec<Cx<T>>,
    /// `|last - second-last|` of the ladder, or the quadrature error
    /// estimate when no ladder was run.
    pub tail_estimate: T,
    pub status: Status,
    pub on_support: bool,
}

/// Geometric ε-ladder used to cross-check a principal value.
#[derive(Debug, Clone, Copy)]
pub struct Ladder<T> {
    pub rungs: usize,
    pub ratio: T,
    /// Defaults to `1e-12` times the support scale.
    pub eps_min: Option<T>,
}

impl<T: Real> Default for Ladder<T> {
    fn default() -> Self {
        Ladder {
            rungs: 40,
            ratio: T::lit(0.5),
            eps_min: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PvOptions<T> {
    pub tol: T,
    pub ladder: Option<Ladder<T>>,
    /// Use an `n`-point Gauss–Jacobi rule for the regular part on intervals
    /// instead of adaptive quadrature.
    pub nodes: Option<usize>,
}

impl<T: Real> PvOptions<T> {
    pub fn new(tol: T) -> Self {
        PvOptions {
            tol,
            ladder: Some(Ladder::default()),
            nodes: None,
        }
    }

    /// No ladder: status comes from the quadrature error estimate.
    pub fn fast(tol: T) -> Self {
        PvOptions {
            tol,
            ladder: None,
            nodes: None,
        }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes = Some(n);
        self
    }
}

fn check_eps<T: Real>(eps: T) -> Result<(), TransformError> {
    if eps > T::zero() && !eps.is_nan() {
        Ok(())
    } else {
        Err(TransformError::BadEpsilon(eps.as_f64()))
    }
}

/// Largest distance from `z` to the support's bounding box, or the support
/// diameter if larger.
pub(crate) fn reach<T: Real>(mu: &ComplexMeasure<T>, z: Cx<T>) -> T {
    let (x0, x1, y0, y1) = mu.bbox();
    if !(x1 >= x0) {
        return T::zero();
    }
    let far = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
        .iter()
        .map(|&(x, y)| (cx(x, y) - z).norm())
        .fold(T::zero(), T::max);
    far.max(mu.diameter())
}

/// `C^μ_ε(z) = ∫_{|ζ - z| > ε} dμ(ζ) / (ζ - z)`.
pub fn cauchy_eps<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    eps: T,
) -> Result<Cx<T>, TransformError> {
    check_eps(eps)?;
    Ok(kernel_integral(
        mu,
        z,
        eps,
        &CauchyKernel,
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    )
    .value)
}

/// `C^μ(z)` as a principal value, cross-checked by the default ε-ladder.
pub fn cauchy_pv<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    tol: T,
) -> Result<EvalResult<T>, TransformError> {
    cauchy_pv_with(mu, z, &PvOptions::new(tol))
}

pub fn cauchy_pv_with<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    opts: &PvOptions<T>,
) -> Result<EvalResult<T>, TransformError> {
    if !(opts.tol > T::zero()) {
        return Err(TransformError::BadArgument(
            "tolerance must be positive".into(),
        ));
    }
    let (q, on_support) = pv_quad(mu, z, opts)?;
    let Some(ladder) = opts.ladder else {
        let status = if q.converged && q.error <= opts.tol {
            Status::Converged
        } else {
            Status::Oscillating
        };
        return Ok(EvalResult {
            value: q.value,
            epsilons: Vec::new(),
            ladder: Vec::new(),
            tail_estimate: q.error,
            status,
            on_support,
        });
    };
    let epsilons = if on_support {
        ladder_epsilons(mu, z, &ladder)?
    } else {
        // truncation below the distance to the support changes nothing
        let d = mu.distance(z);
        vec![d * T::lit(0.5), d * T::lit(0.25)]
    };
    let values = epsilons
        .iter()
        .map(|&e| cauchy_eps(mu, z, e))
        .collect::<Result<Vec<_>, _>>()?;
    let (tail, status) = classify_ladder(&values, opts.tol);
    Ok(EvalResult {
        value: q.value,
        epsilons,
        ladder: values,
        tail_estimate: tail,
        status,
        on_support,
    })
}

fn ladder_epsilons<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    l: &Ladder<T>,
) -> Result<Vec<T>, TransformError> {
    if !(l.ratio > T::zero() && l.ratio < T::one()) || l.rungs < 2 {
        return Err(TransformError::BadArgument(
            "ladder needs ratio in (0, 1) and at least 2 rungs".into(),
        ));
    }
    let top = reach(mu, z);
    let floor = l.eps_min.unwrap_or(top * T::lit(1e-12));
    let mut out = Vec::with_capacity(l.rungs);
    let mut e = top;
    while out.len() < l.rungs && e >= floor {
        out.push(e);
        e *= l.ratio;
    }
    if out.len() < 2 {
        return Err(TransformError::BadArgument(
            "ladder has fewer than two rungs above eps_min".into(),
        ));
    }
    Ok(out)
}

fn classify_ladder<T: Real>(values: &[Cx<T>], tol: T) -> (T, Status) {
    let n = values.len();
    if n < 2 {
        return (T::zero(), Status::Converged);
    }
    let diffs: Vec<T> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let tail = diffs[n - 2];
    if !tail.is_finite() {
        return (tail, Status::Diverging);
    }
    if tail <= tol {
        return (tail, Status::Converged);
    }
    let window = &diffs[diffs.len().saturating_sub(8)..];
    let growing = window.len() >= 2 && window[window.len() - 1] > T::lit(2.0) * window[0];
    (
        tail,
        if growing {
            Status::Diverging
        } else {
            Status::Oscillating
        },
    )
}

fn pv_quad<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    opts: &PvOptions<T>,
) -> Result<(Quad<T>, bool), TransformError> {
    let qt = quad_tol(opts.tol);
    let mut out = Quad::zero();
    let mut on_support = false;
    for a in mu.atom_list() {
        if a.location == z {
            return Err(TransformError::AtAtom);
        }
        out.add(a.weight / (a.location - z), T::zero(), true);
    }
    for p in mu.parts() {
        let q = match &p.kind {
            Continuous::Interval(d) if z.im == T::zero() && z.re >= d.a() && z.re <= d.b() => {
                on_support = true;
                interval_pv(d, z.re, opts.nodes, qt)?
            }
            Continuous::Curve(c) => {
                let (_, dist) = c.closest(z);
                if dist <= T::lit(1e-13) * c.scale() {
                    on_support = true;
                    curve_pv(c, z, qt)
                } else {
                    part_integral(&p.kind, z, T::zero(), &CauchyKernel, Weighting::Signed, qt)
                }
            }
            Continuous::Area(a) => {
                on_support |= a.region().contains(z);
                part_integral(&p.kind, z, T::zero(), &CauchyKernel, Weighting::Signed, qt)
            }
            _ => part_integral(&p.kind, z, T::zero(), &CauchyKernel, Weighting::Signed, qt),
        };
        out.add_scaled(q, p.coef);
    }
    Ok((out, on_support))
}

/// `p.v. ∫ g(t) / (t - x) dt` for `x ∈ [a, b]` by subtracting `h(x)` from the
/// smooth factor and adding `h(x)` times the transform of the bare weight.
pub(crate) fn interval_pv<T: Real>(
    d: &IntervalDensity<T>,
    x: T,
    nodes: Option<usize>,
    qt: T,
) -> Result<Quad<T>, TransformError> {
    let (a, b) = (d.a(), d.b());
    let (alpha, beta) = d.exponents();
    if x == a || x == b {
        let e = if x == a { alpha } else { beta };
        if e > T::zero() {
            return Ok(part_integral(
                &Continuous::Interval(d.clone()),
                cx(x, T::zero()),
                T::zero(),
                &CauchyKernel,
                Weighting::Signed,
                qt,
            ));
        }
        return Err(TransformError::NotEvaluable(format!(
            "endpoint {} of [{}, {}] with exponent {}",
            x.as_f64(),
            a.as_f64(),
            b.as_f64(),
            e.as_f64()
        )));
    }
    let hx = d.smooth(x);
    let mut out = Quad::zero();
    match nodes {
        Some(n) => {
            let rule = gauss_jacobi(n, alpha.as_f64(), beta.as_f64());
            let half = (b - a) * T::lit(0.5);
            let scale = half.powf(T::one() + alpha + beta);
            let mut s = cx(T::zero(), T::zero());
            for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                let t = a + half * (T::one() + T::lit(u));
                let dx = t - x;
                let q = if dx == T::zero() {
                    let h = (b - a) * T::lit(1e-6);
                    (d.smooth(x + h) - d.smooth(x - h)) / (h + h)
                } else {
                    (d.smooth(t) - hx) / dx
                };
                s.re += T::lit(w) * scale * q;
            }
            out.add(s, T::zero(), true);
        }
        None => {
            for pc in interval_pieces(d, cx(x, T::zero()), T::zero()) {
                let (lo, hi) = (pc.lo, pc.hi);
                let r = integrate(
                    |p: Probe<T>| {
                        let (da, db) = d.distances(&p, lo, hi);
                        let dx = pc.offset(&p);
                        cx(d.weight(da, db) * (d.smooth(p.t) - hx) / dx, T::zero())
                    },
                    lo,
                    hi,
                    qt,
                );
                out.add(r.value, r.error, r.converged);
            }
        }
    }
    if hx != T::zero() {
        let hw = match d.weight_hilbert_closed(x) {
            Some(v) => v,
            None => weight_hilbert_numeric(d, x, qt),
        };
        out.add(cx(hx * hw, T::zero()), T::zero(), true);
    }
    Ok(out)
}

/// `p.v. ∫ (t-a)^α (b-t)^β / (t - x) dt` by subtracting the weight at `x`.
fn weight_hilbert_numeric<T: Real>(d: &IntervalDensity<T>, x: T, qt: T) -> T {
    let (a, b) = (d.a(), d.b());
    let wx = d.weight(x - a, b - x);
    let mut s = T::zero();
    for (lo, hi) in [(a, x), (x, b)] {
        s += integrate(
            |p: Probe<T>| {
                let (da, db) = d.distances(&p, lo, hi);
                let dx = if lo == x { p.d_lo } else { -p.d_hi };
                cx((d.weight(da, db) - wx) / dx, T::zero())
            },
            lo,
            hi,
            qt,
        )
        .value
        .re;
    }
    s + wx * ((b - x) / (x - a)).ln()
}

/// On-curve principal value: the subtracted integral plus the half residue.
fn curve_pv<T: Real>(c: &CurveDensity<T>, z: Cx<T>, qt: T) -> Quad<T> {
    let fz = c.density_fn().eval(z);
    let o = T::lit(c.orientation() as f64);
    let ex = c.excision(z, T::zero());
    let rg = ex.ranges[0];
    let r = integrate(
        |p: Probe<T>| {
            let dz = c.shape().chord(ex.t0, rg.delta(&p)) + ex.base;
            let diff = match c.density_fn() {
                CurveFn::Constant(_) => return cx(T::zero(), T::zero()),
                CurveFn::Identity => dz,
                f => f.eval(c.shape().point(p.t)) - fz,
            };
            diff * c.shape().tangent(p.t) * o / dz
        },
        rg.lo,
        rg.hi,
        qt,
    );
    let half_residue = cx(T::zero(), T::PI()) * fz * o * c.param_sign();
    Quad {
        value: r.value + half_residue,
        error: r.error,
        converged: r.converged,
    }
}

/// Geometric grid of truncation radii for the maximal function.
#[derive(Debug, Clone, Copy)]
pub struct EpsGrid<T> {
    pub eps_min: T,
    pub eps_max: T,
    /// Ratio of successive coarse radii, in `(1, 2]`.
    pub ratio: T,
    /// Each coarse step is split into `2^splits` geometric sub-steps.
    pub splits: u32,
}

impl<T: Real> EpsGrid<T> {
    /// `[1e-13 · scale, diam(supp μ ∪ {z})]` with ratio 2.
    pub fn for_target(mu: &ComplexMeasure<T>, z: Cx<T>) -> Self {
        let top = reach(mu, z);
        EpsGrid {
            eps_min: top * T::lit(1e-13),
            eps_max: top,
            ratio: T::lit(2.0),
            splits: 0,
        }
    }

    /// Same span with the effective ratio square-rooted; contains every
    /// old radius bit for bit.
    pub fn refined(&self) -> Self {
        EpsGrid {
            splits: self.splits + 1,
            ..*self
        }
    }

    /// Ratio between neighbouring radii.
    pub fn step(&self) -> T {
        self.ratio.powf(T::one() / T::of_usize(1 << self.splits))
    }

    /// Radii from `eps_max` down to `eps_min`, both included.
    pub fn radii(&self) -> Vec<T> {
        let sub = 1usize << self.splits;
        let lr = self.ratio.ln();
        let mut out = Vec::new();
        for k in 0.. {
            let coarse = self.eps_max / self.ratio.powi(k);
            if !(coarse > self.eps_min) {
                break;
            }
            out.push(coarse);
            for j in 1..sub {
                let e = coarse * (-lr * T::of_usize(j) / T::of_usize(sub)).exp();
                if e > self.eps_min {
                    out.push(e);
                }
            }
        }
        out.push(self.eps_min);
        out
    }

    fn validate(&self) -> Result<(), TransformError> {
        if !(self.eps_min > T::zero() && self.eps_max >= self.eps_min) {
            return Err(TransformError::BadArgument(
                "eps grid needs 0 < eps_min <= eps_max".into(),
            ));
        }
        if !(self.ratio > T::one() && self.ratio <= T::lit(2.0)) {
            return Err(TransformError::BadArgument(
                "eps grid ratio must lie in (1, 2]".into(),
            ));
        }
        if self.splits > 16 {
            return Err(TransformError::BadArgument(
                "eps grid splits must be at most 16".into(),
            ));
        }
        Ok(())
    }
}

/// `C^μ_ε(z)` at every radius of the grid.
pub fn maximal_profile<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    grid: &EpsGrid<T>,
) -> Result<Vec<(T, Cx<T>)>, TransformError> {
    grid.validate()?;
    grid.radii()
        .into_iter()
        .map(|e| Ok((e, cauchy_eps(mu, z, e)?)))
        .collect()
}

/// Grid supremum of `|C^μ_ε(z)|`: a lower bound for `C^μ_*(z)`.
pub fn cauchy_maximal<T: Real>(
    mu: &ComplexMeasure<T>,
    z: Cx<T>,
    grid: &EpsGrid<T>,
) -> Result<T, TransformError> {
    Ok(maximal_profile(mu, z, grid)?
        .iter()
        .map(|(_, v)| v.norm())
        .fold(T::zero(), T::max))
}

/// `Q^μ(x + ih) = ∫ (x - y) / ((x - y)² + h²) dμ(y) = Re ∫ dμ(y) / (x - ih - y)`.
pub fn conjugate_poisson<T: Real>(mu: &ComplexMeasure<T>, x: T, h: T) -> Result<T, TransformError> {
    if !(h > T::zero()) {
        return Err(TransformError::BadArgument(
            "conjugate Poisson needs h > 0".into(),
        ));
    }
    let z = cx(x, -h);
    let q = kernel_integral(
        mu,
        z,
        T::zero(),
        &CauchyKernel,
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    );
    Ok(-q.value.re)
}

/// `(1/π) ∫ y / ((x - t)² + y²) dμ(t)` for `μ` on the real line.
pub fn poisson<T: Real>(mu: &ComplexMeasure<T>, x: T, y: T) -> Result<T, TransformError> {
    if !(y > T::zero()) {
        return Err(TransformError::BadArgument(
            "Poisson integral needs y > 0".into(),
        ));
    }
    if !mu.is_on_real_line() {
        return Err(TransformError::OffRealLine);
    }
    let q = kernel_integral(
        mu,
        cx(x, y),
        T::zero(),
        &CauchyKernel,
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    );
    // Im 1/(t - x - iy) = y / ((t-x)² + y²)
    Ok(q.value.im / T::PI())
}

struct RieszKernel<T> {
    h: T,
}

impl<T: Real> PlaneKernel<T> for RieszKernel<T> {
    fn at(&self, d: Cx<T>) -> Cx<T> {
        let s = d.norm_sqr() + self.h * self.h;
        cx(self.h / (s * s.sqrt()), T::zero())
    }

    fn polar(&self, rho: T, _phi: T) -> Cx<T> {
        let s = rho * rho + self.h * self.h;
        cx(self.h * rho / (s * s.sqrt()), T::zero())
    }

    fn scale_hint(&self) -> Option<T> {
        Some(self.h)
    }
}

fn riesz_check<T: Real>(z: T) -> Result<(), TransformError> {
    if z > T::zero() && z.is_finite() {
        Ok(())
    } else {
        Err(TransformError::BadArgument("R1 needs height z > 0".into()))
    }
}

/// `R₁μ(x, y, z) = ∫ z / |(u, v, 0) - (x, y, z)|³ dμ(u + iv)`.
pub fn riesz_r1<T: Real>(
    mu: &ComplexMeasure<T>,
    x: T,
    y: T,
    z: T,
) -> Result<Cx<T>, TransformError> {
    riesz_check(z)?;
    Ok(kernel_integral(
        mu,
        cx(x, y),
        T::zero(),
        &RieszKernel { h: z },
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    )
    .value)
}

/// `R₁|μ|(x, y, z)`.
pub fn riesz_r1_variation<T: Real>(
    mu: &ComplexMeasure<T>,
    x: T,
    y: T,
    z: T,
) -> Result<T, TransformError> {
    riesz_check(z)?;
    Ok(kernel_integral(
        mu,
        cx(x, y),
        T::zero(),
        &RieszKernel { h: z },
        Weighting::Variation,
        quad_tol(T::lit(1e-13)),
    )
    .value
    .re)
}

/// `R₁μ(x, y, z)` along decreasing heights and the `z → 0⁺` limit from a
/// linear extrapolation of the two lowest heights.
#[derive(Debug, Clone)]
pub struct RieszLimit<T: Real> {
    pub heights: Vec<T>,
    pub values: Vec<Cx<T>>,
    pub limit: Cx<T>,
}

pub fn riesz_r1_limit<T: Real>(
    mu: &ComplexMeasure<T>,
    x: T,
    y: T,
    heights: &[T],
) -> Result<RieszLimit<T>, TransformError> {
    if heights.len() < 2 || heights.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(TransformError::BadArgument(
            "need at least two strictly decreasing heights".into(),
        ));
    }
    let values = heights
        .iter()
        .map(|&h| riesz_r1(mu, x, y, h))
        .collect::<Result<Vec<_>, _>>()?;
    let n = heights.len();
    let (h1, h2) = (heights[n - 2], heights[n - 1]);
    let (v1, v2) = (values[n - 2], values[n - 1]);
    let limit = (v2 * h1 - v1 * h2) / (h1 - h2);
    Ok(RieszLimit {
        heights: heights.to_vec(),
        values,
        limit,
    })
}

struct LogKernel;

impl<T: Real> PlaneKernel<T> for LogKernel {
    fn at(&self, d: Cx<T>) -> Cx<T> {
        cx(d.norm().ln(), T::zero())
    }

    fn polar(&self, rho: T, _phi: T) -> Cx<T> {
        cx(rho * rho.ln(), T::zero())
    }
}

/// `∫ log|z - ζ| dμ(ζ)`.
pub fn log_potential<T: Real>(mu: &ComplexMeasure<T>, z: Cx<T>) -> Cx<T> {
    kernel_integral(
        mu,
        z,
        T::zero(),
        &LogKernel,
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    )
    .value
}

struct UnitKernel;

impl<T: Real> PlaneKernel<T> for UnitKernel {
    fn at(&self, _d: Cx<T>) -> Cx<T> {
        cx(T::one(), T::zero())
    }
}

/// `μ(B(w, r))` for the closed disc, as the total mass minus the mass
/// outside it.
pub fn mass_in_disc<T: Real>(
    mu: &ComplexMeasure<T>,
    w: Cx<T>,
    r: T,
) -> Result<Cx<T>, TransformError> {
    check_eps(r)?;
    let outside = kernel_integral(
        mu,
        w,
        r,
        &UnitKernel,
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    )
    .value;
    Ok(mu.mass() - outside)
}

/// `C^μ(z)` at points known to be off the support, without a ladder.
pub fn cauchy_direct<T: Real>(mu: &ComplexMeasure<T>, z: Cx<T>) -> Cx<T> {
    kernel_integral(
        mu,
        z,
        T::zero(),
        &CauchyKernel,
        Weighting::Signed,
        quad_tol(T::lit(1e-13)),
    )
    .value
}

#[cfg(test)]
mod tests;
