use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::interval::cubic_equispaced;
use super::MeasureError;
use crate::quadrature::{integrate, integrate_pieces, Probe};
use crate::scalar::{cx, Cx, Real};

/// Support of an area density.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<T> {
    Disk { center: Cx<T>, radius: T },
    Rect { x0: T, x1: T, y0: T, y1: T },
}

impl<T: Real> Region<T> {
    pub fn contains(&self, z: Cx<T>) -> bool {
        match self {
            Region::Disk { center, radius } => (z - *center).norm() <= *radius,
            Region::Rect { x0, x1, y0, y1 } => {
                z.re >= *x0 && z.re <= *x1 && z.im >= *y0 && z.im <= *y1
            }
        }
    }

    /// `(x0, x1, y0, y1)` bounding box.
    pub fn bbox(&self) -> (T, T, T, T) {
        match self {
            Region::Disk { center, radius } => (
                center.re - *radius,
                center.re + *radius,
                center.im - *radius,
                center.im + *radius,
            ),
            Region::Rect { x0, x1, y0, y1 } => (*x0, *x1, *y0, *y1),
        }
    }

    pub fn area(&self) -> T {
        match self {
            Region::Disk { radius, .. } => T::PI() * *radius * *radius,
            Region::Rect { x0, x1, y0, y1 } => (*x1 - *x0) * (*y1 - *y0),
        }
    }

    pub fn distance(&self, z: Cx<T>) -> T {
        match self {
            Region::Disk { center, radius } => ((z - *center).norm() - *radius).max(T::zero()),
            Region::Rect { x0, x1, y0, y1 } => {
                let dx = (*x0 - z.re).max(z.re - *x1).max(T::zero());
                let dy = (*y0 - z.im).max(z.im - *y1).max(T::zero());
                dx.hypot(dy)
            }
        }
    }

    /// Range of `ρ ≥ 0` with `z + ρ e^{iφ}` inside the region.
    pub fn ray_range(&self, z: Cx<T>, phi: T) -> Option<(T, T)> {
        let dir = Complex::from_polar(T::one(), phi);
        match self {
            Region::Disk { center, radius } => {
                // |w + ρ dir|² = r², w = z - c
                let w = z - *center;
                let b = w.re * dir.re + w.im * dir.im;
                let c = w.norm_sqr() - *radius * *radius;
                let disc = b * b - c;
                if disc <= T::zero() {
                    return None;
                }
                let s = disc.sqrt();
                // stable roots of ρ² + 2bρ + c = 0
                let q = -(b + s.copysign(b));
                let (r1, r2) = if q == T::zero() {
                    (-s, s)
                } else {
                    let a1 = q;
                    let a2 = c / q;
                    (a1.min(a2), a1.max(a2))
                };
                let lo = r1.max(T::zero());
                (r2 > lo).then_some((lo, r2))
            }
            Region::Rect { x0, x1, y0, y1 } => {
                let mut lo = T::zero();
                let mut hi = T::infinity();
                for (o, d, a, b) in [(z.re, dir.re, *x0, *x1), (z.im, dir.im, *y0, *y1)] {
                    if d.abs() < T::lit(1e-300) {
                        if o < a || o > b {
                            return None;
                        }
                        continue;
                    }
                    let t1 = (a - o) / d;
                    let t2 = (b - o) / d;
                    lo = lo.max(t1.min(t2));
                    hi = hi.min(t1.max(t2));
                }
                (hi > lo).then_some((lo, hi))
            }
        }
    }

    /// Angles where `ray_range` changes smoothness as seen from `z`.
    pub fn angle_breaks(&self, z: Cx<T>) -> Vec<T> {
        match self {
            Region::Disk { center, radius } => {
                let w = *center - z;
                let d = w.norm();
                if d < *radius {
                    Vec::new()
                } else {
                    let half = (*radius / d).asin();
                    vec![w.arg() - half, w.arg() + half]
                }
            }
            Region::Rect { x0, x1, y0, y1 } => [(*x0, *y0), (*x1, *y0), (*x1, *y1), (*x0, *y1)]
                .iter()
                .filter_map(|&(x, y)| {
                    let v = cx(x, y) - z;
                    (v.norm() > T::zero()).then(|| v.arg())
                })
                .collect(),
        }
    }
}

/// Regular grid of samples over the region's bounding box, row-major in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Cx<T>>,
}

#[derive(Clone)]
pub enum AreaFn<T> {
    Constant(Cx<T>),
    Grid(Grid<T>),
    Custom(Arc<dyn Fn(Cx<T>) -> Cx<T> + Send + Sync>),
}

impl<T: Real> fmt::Debug for AreaFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AreaFn::Constant(c) => write!(f, "Constant({c})"),
            AreaFn::Grid(g) => write!(f, "Grid({}x{})", g.nx, g.ny),
            AreaFn::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Density with respect to planar Lebesgue measure on a disk or rectangle.
#[derive(Clone, Debug)]
pub struct AreaDensity<T: Real> {
    region: Region<T>,
    density: AreaFn<T>,
    resolution: (usize, usize),
    variation: T,
}

/// Default relative tolerance for the nested polar quadrature.
pub(crate) const POLAR_TOL: f64 = 1e-12;

impl<T: Real> AreaDensity<T> {
    pub fn new(region: Region<T>, density: AreaFn<T>) -> Result<Self, MeasureError> {
        let ok = match &region {
            Region::Disk { center, radius } => {
                *radius > T::zero()
                    && radius.is_finite()
                    && center.re.is_finite()
                    && center.im.is_finite()
            }
            Region::Rect { x0, x1, y0, y1 } => {
                x1 > x0
                    && y1 > y0
                    && x0.is_finite()
                    && x1.is_finite()
                    && y0.is_finite()
                    && y1.is_finite()
            }
        };
        if !ok {
            return Err(MeasureError::Invalid("degenerate area region".into()));
        }
        let resolution = match &density {
            AreaFn::Grid(g) => {
                if g.nx < 2 || g.ny < 2 || g.values.len() != g.nx * g.ny {
                    return Err(MeasureError::Invalid(format!(
                        "grid has {} samples, expected {}x{} with both at least 2",
                        g.values.len(),
                        g.nx,
                        g.ny
                    )));
                }
                if g.values
                    .iter()
                    .any(|v| !v.re.is_finite() || !v.im.is_finite())
                {
                    return Err(MeasureError::NonFinite("grid sample".into()));
                }
                (g.nx, g.ny)
            }
            _ => (0, 0),
        };
        let mut out = AreaDensity {
            region,
            density,
            resolution,
            variation: T::zero(),
        };
        let center = out.anchor();
        out.variation = out
            .polar_raw(
                center,
                T::zero(),
                T::infinity(),
                |w, rho, _| cx(out.eval_inside(w).norm() * rho, T::zero()),
                T::lit(POLAR_TOL),
            )
            .re;
        if !out.variation.is_finite() {
            return Err(MeasureError::NonFinite("area variation".into()));
        }
        Ok(out)
    }

    pub fn region(&self) -> &Region<T> {
        &self.region
    }

    pub fn density_fn(&self) -> &AreaFn<T> {
        &self.density
    }

    /// Grid dimensions for tabulated densities, `(0, 0)` otherwise.
    pub fn resolution(&self) -> (usize, usize) {
        self.resolution
    }

    pub fn variation(&self) -> T {
        self.variation
    }

    fn anchor(&self) -> Cx<T> {
        let (x0, x1, y0, y1) = self.region.bbox();
        cx((x0 + x1) * T::lit(0.5), (y0 + y1) * T::lit(0.5))
    }

    /// Density at `w`; zero outside the region.
    pub fn eval(&self, w: Cx<T>) -> Cx<T> {
        if !self.region.contains(w) {
            return cx(T::zero(), T::zero());
        }
        self.eval_inside(w)
    }

    /// Density at a point known to lie in the region.
    pub(crate) fn eval_inside(&self, w: Cx<T>) -> Cx<T> {
        match &self.density {
            AreaFn::Constant(c) => *c,
            AreaFn::Custom(f) => f(w),
            AreaFn::Grid(g) => {
                let (x0, x1, y0, y1) = self.region.bbox();
                let sx = (w.re - x0) / (x1 - x0);
                let sy = (w.im - y0) / (y1 - y0);
                // cubic in x along each row, then cubic in y
                let cols: Vec<Cx<T>> = (0..g.ny)
                    .map(|j| {
                        let row = &g.values[j * g.nx..(j + 1) * g.nx];
                        let re: Vec<T> = row.iter().map(|v| v.re).collect();
                        let im: Vec<T> = row.iter().map(|v| v.im).collect();
                        cx(cubic_equispaced(&re, sx), cubic_equispaced(&im, sx))
                    })
                    .collect();
                let re: Vec<T> = cols.iter().map(|v| v.re).collect();
                let im: Vec<T> = cols.iter().map(|v| v.im).collect();
                cx(cubic_equispaced(&re, sy), cubic_equispaced(&im, sy))
            }
        }
    }

    /// `∫_φ ∫_ρ F(z + ρ e^{iφ}, ρ, φ) dρ dφ` over the part of the region with
    /// `rho_min < ρ < rho_max`, in polar coordinates centred at `z`. `F` must
    /// include the `ρ` Jacobian if one is wanted.
    pub fn polar_integral<F>(&self, z: Cx<T>, rho_min: T, rho_max: T, f: F, tol: T) -> Cx<T>
    where
        F: Fn(Cx<T>, T, T) -> Cx<T>,
    {
        self.polar_raw(
            z,
            rho_min,
            rho_max,
            |w, rho, phi| {
                // ρ lies inside the clipped ray range; skip the containment
                // test, which can fail at roundoff on the boundary
                let dens = self.eval_inside(w);
                if dens == cx(T::zero(), T::zero()) {
                    dens
                } else {
                    f(w, rho, phi) * dens
                }
            },
            tol,
        )
    }

    /// Like [`polar_integral`](Self::polar_integral) without the density factor.
    pub(crate) fn polar_raw<F>(&self, z: Cx<T>, rho_min: T, rho_max: T, f: F, tol: T) -> Cx<T>
    where
        F: Fn(Cx<T>, T, T) -> Cx<T>,
    {
        let inner = |phi: T| -> Cx<T> {
            let Some((r1, r2)) = self.region.ray_range(z, phi) else {
                return cx(T::zero(), T::zero());
            };
            let lo = r1.max(rho_min);
            let hi = r2.min(rho_max);
            if !(hi > lo) {
                return cx(T::zero(), T::zero());
            }
            let dir = Complex::from_polar(T::one(), phi);
            integrate(
                |p: Probe<T>| {
                    let rho = if p.d_lo < p.d_hi {
                        lo + p.d_lo
                    } else {
                        hi - p.d_hi
                    };
                    f(z + dir * rho, rho, phi)
                },
                lo,
                hi,
                tol,
            )
            .value
        };
        let mut breaks = self.region.angle_breaks(z);
        let base = breaks.first().copied().unwrap_or(T::zero());
        for b in breaks.iter_mut() {
            *b = base + (*b - base - T::TAU() * ((*b - base) / T::TAU()).floor());
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut pts = breaks.clone();
        pts.push(base + T::TAU());
        if pts.len() == 1 {
            pts.insert(0, base);
        }
        integrate_pieces(|p: Probe<T>| inner(p.t), &pts, tol).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn disk() -> AreaDensity<f64> {
        AreaDensity::new(
            Region::Disk {
                center: cx(0.0, 0.0),
                radius: 1.0,
            },
            AreaFn::Constant(cx(1.0, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn disk_variation_is_area() {
        assert_abs_diff_eq!(disk().variation(), std::f64::consts::PI, epsilon = 1e-11);
    }

    #[test]
    fn off_center_polar_area() {
        let d = disk();
        for z in [cx(0.3, -0.2), cx(2.0, 1.0), cx(0.0, 1.0)] {
            let a = d.polar_integral(z, 0.0, f64::INFINITY, |_, rho, _| cx(rho, 0.0), 1e-12);
            assert_abs_diff_eq!(a.re, std::f64::consts::PI, epsilon = 1e-9);
        }
    }

    #[test]
    fn rectangle_from_outside() {
        let r = AreaDensity::new(
            Region::Rect {
                x0: 0.0,
                x1: 2.0,
                y0: -1.0,
                y1: 0.5,
            },
            AreaFn::Constant(cx(2.0, 0.0)),
        )
        .unwrap();
        assert_abs_diff_eq!(r.variation(), 6.0, epsilon = 1e-10);
        let a = r.polar_integral(
            cx(-1.0, 3.0),
            0.0,
            f64::INFINITY,
            |_, rho, _| cx(rho, 0.0),
            1e-12,
        );
        assert_abs_diff_eq!(a.re, 6.0, epsilon = 1e-9);
    }

    #[test]
    fn grid_density_interpolates_linear_data() {
        let (nx, ny) = (5, 4);
        let values = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| cx(i as f64 / 4.0 + j as f64 / 3.0, 0.0)))
            .collect();
        let r = AreaDensity::new(
            Region::Rect {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            },
            AreaFn::Grid(Grid { nx, ny, values }),
        )
        .unwrap();
        assert_abs_diff_eq!(r.eval(cx(0.37, 0.61)).re, 0.98, epsilon = 1e-12);
        assert_eq!(r.resolution(), (5, 4));
    }
}
