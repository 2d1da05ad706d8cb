//! Kernel integrals against every component of a measure, with an optional
//! excised disc `|ζ - w| ≤ ε` around the target.

use num_complex::Complex;

use crate::measure::{AreaDensity, ComplexMeasure, Continuous, CurveDensity, IntervalDensity};
use crate::quadrature::{integrate, Probe};
use crate::scalar::{cx, Cx, Real};

/// Convolution kernel `K(ζ - w)` in the plane.
pub(crate) trait PlaneKernel<T: Real>: Sync {
    fn at(&self, d: Cx<T>) -> Cx<T>;

    /// `K(ρ e^{iφ}) ρ`, the kernel with the polar Jacobian folded in.
    fn polar(&self, rho: T, phi: T) -> Cx<T> {
        self.at(Complex::from_polar(rho, phi)) * rho
    }

    /// Length scale of a peak at the origin, if any.
    fn scale_hint(&self) -> Option<T> {
        None
    }
}

pub(crate) struct CauchyKernel;

impl<T: Real> PlaneKernel<T> for CauchyKernel {
    #[inline]
    fn at(&self, d: Cx<T>) -> Cx<T> {
        d.inv()
    }

    #[inline]
    fn polar(&self, _rho: T, phi: T) -> Cx<T> {
        Complex::from_polar(T::one(), -phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weighting {
    Signed,
    Variation,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Quad<T: Real> {
    pub value: Cx<T>,
    pub error: T,
    pub converged: bool,
}

impl<T: Real> Quad<T> {
    pub fn zero() -> Self {
        Quad {
            value: cx(T::zero(), T::zero()),
            error: T::zero(),
            converged: true,
        }
    }

    pub fn add(&mut self, v: Cx<T>, error: T, converged: bool) {
        self.value += v;
        self.error += error;
        self.converged &= converged;
    }

    pub fn add_scaled(&mut self, q: Quad<T>, c: Cx<T>) {
        self.add(q.value * c, q.error * c.norm(), q.converged);
    }
}

/// `∫_{|ζ - w| > ε} K(ζ - w) dμ(ζ)` (or against `|μ|`).
pub(crate) fn kernel_integral<T: Real, K: PlaneKernel<T>>(
    mu: &ComplexMeasure<T>,
    w: Cx<T>,
    eps: T,
    k: &K,
    mode: Weighting,
    tol: T,
) -> Quad<T> {
    let mut out = Quad::zero();
    for a in mu.atom_list() {
        let d = a.location - w;
        if eps == T::zero() || d.norm() > eps {
            let wt = match mode {
                Weighting::Signed => a.weight,
                Weighting::Variation => cx(a.weight.norm(), T::zero()),
            };
            out.add(k.at(d) * wt, T::zero(), true);
        }
    }
    for p in mu.parts() {
        let q = part_integral(&p.kind, w, eps, k, mode, tol);
        let c = match mode {
            Weighting::Signed => p.coef,
            Weighting::Variation => cx(p.coef.norm(), T::zero()),
        };
        out.add_scaled(q, c);
    }
    out
}

pub(crate) fn part_integral<T: Real, K: PlaneKernel<T>>(
    part: &Continuous<T>,
    w: Cx<T>,
    eps: T,
    k: &K,
    mode: Weighting,
    tol: T,
) -> Quad<T> {
    match part {
        Continuous::Interval(d) => interval_integral(d, w, eps, k, mode, tol),
        Continuous::Curve(c) => curve_integral(c, w, eps, k, mode, tol),
        Continuous::Area(a) => area_integral(a, w, eps, k, mode, tol),
    }
}

/// Sub-interval of an integration range together with the offsets `t - x`
/// at its ends. Excision edges and the target's own abscissa sit at piece
/// ends, and the integrand there must see the offset free of the rounding
/// in `lo` and `hi`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub lo_off: T,
    pub hi_off: T,
}

impl<T: Real> Piece<T> {
    /// `t - x` for a probe on this piece, taken from the nearer end.
    #[inline]
    pub fn offset(&self, p: &Probe<T>) -> T {
        if p.d_lo <= p.d_hi {
            self.lo_off + p.d_lo
        } else {
            self.hi_off - p.d_hi
        }
    }
}

/// Pieces of `[a, b]` outside the excised disc, split at `Re w` when it is
/// interior and not excised, and at any density knots.
pub(crate) fn interval_pieces<T: Real>(d: &IntervalDensity<T>, w: Cx<T>, eps: T) -> Vec<Piece<T>> {
    let (a, b) = (d.a(), d.b());
    let (x, y) = (w.re, w.im.abs());
    let mut pieces = Vec::new();
    if eps > y {
        let r = ((eps - y) * (eps + y)).sqrt();
        let (l, h) = (x - r, x + r);
        if l > a {
            let hi_off = if l < b { -r } else { b - x };
            pieces.push(Piece {
                lo: a,
                hi: l.min(b),
                lo_off: a - x,
                hi_off,
            });
        }
        if h < b {
            let lo_off = if h > a { r } else { a - x };
            pieces.push(Piece {
                lo: h.max(a),
                hi: b,
                lo_off,
                hi_off: b - x,
            });
        }
    } else if x > a && x < b {
        pieces.push(Piece {
            lo: a,
            hi: x,
            lo_off: a - x,
            hi_off: T::zero(),
        });
        pieces.push(Piece {
            lo: x,
            hi: b,
            lo_off: T::zero(),
            hi_off: b - x,
        });
    } else {
        pieces.push(Piece {
            lo: a,
            hi: b,
            lo_off: a - x,
            hi_off: b - x,
        });
    }
    let knots = d.knots();
    if knots.is_empty() {
        return pieces;
    }
    let mut out = Vec::new();
    for pc in pieces {
        let mut cur = pc;
        for &k in knots.iter().filter(|&&k| k > pc.lo && k < pc.hi) {
            out.push(Piece {
                hi: k,
                hi_off: k - x,
                ..cur
            });
            cur = Piece {
                lo: k,
                lo_off: k - x,
                ..cur
            };
        }
        out.push(cur);
    }
    out
}

fn interval_integral<T: Real, K: PlaneKernel<T>>(
    d: &IntervalDensity<T>,
    w: Cx<T>,
    eps: T,
    k: &K,
    mode: Weighting,
    tol: T,
) -> Quad<T> {
    let mut out = Quad::zero();
    for pc in interval_pieces(d, w, eps) {
        let (lo, hi) = (pc.lo, pc.hi);
        if !(hi > lo) {
            continue;
        }
        let r = integrate(
            |p: Probe<T>| {
                let (da, db) = d.distances(&p, lo, hi);
                let mut g = d.density_with(p.t, da, db);
                if mode == Weighting::Variation {
                    g = g.abs();
                }
                if g == T::zero() {
                    return cx(T::zero(), T::zero());
                }
                let dx = pc.offset(&p);
                k.at(cx(dx, -w.im)) * g
            },
            lo,
            hi,
            tol,
        );
        out.add(r.value, r.error, r.converged);
    }
    out
}

fn curve_integral<T: Real, K: PlaneKernel<T>>(
    c: &CurveDensity<T>,
    w: Cx<T>,
    eps: T,
    k: &K,
    mode: Weighting,
    tol: T,
) -> Quad<T> {
    let ex = c.excision(w, eps);
    let mut out = Quad::zero();
    for rg in &ex.ranges {
        let r = integrate(
            |p: Probe<T>| {
                let el = match mode {
                    Weighting::Signed => c.element(p.t),
                    Weighting::Variation => cx(
                        c.density_fn().eval(c.shape().point(p.t)).norm()
                            * c.shape().tangent(p.t).norm(),
                        T::zero(),
                    ),
                };
                k.at(c.shape().chord(ex.t0, rg.delta(&p)) + ex.base) * el
            },
            rg.lo,
            rg.hi,
            tol,
        );
        out.add(r.value, r.error, r.converged);
    }
    out
}

fn area_integral<T: Real, K: PlaneKernel<T>>(
    a: &AreaDensity<T>,
    w: Cx<T>,
    eps: T,
    k: &K,
    mode: Weighting,
    tol: T,
) -> Quad<T> {
    let run = |lo: T, hi: T| -> Cx<T> {
        match mode {
            Weighting::Signed => a.polar_integral(w, lo, hi, |_, rho, phi| k.polar(rho, phi), tol),
            Weighting::Variation => a.polar_raw(
                w,
                lo,
                hi,
                |z, rho, phi| k.polar(rho, phi) * a.eval_inside(z).norm(),
                tol,
            ),
        }
    };
    let value = match k.scale_hint() {
        Some(h) if T::lit(4.0) * h > eps => {
            run(eps, T::lit(4.0) * h) + run(T::lit(4.0) * h, T::infinity())
        }
        _ => run(eps, T::infinity()),
    };
    Quad {
        value,
        error: T::zero(),
        converged: value.re.is_finite() && value.im.is_finite(),
    }
}
