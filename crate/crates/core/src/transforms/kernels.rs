//! Odd convolution kernels, the three-point symmetry identity and the
//! two-point interpolation coefficients.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::engine::{kernel_integral, PlaneKernel, Weighting};
use super::{quad_tol, TransformError};
use crate::measure::ComplexMeasure;
use crate::scalar::{cx, Cx, Real};

/// Kernel `K(x)` on the plane, identified with ℂ.
#[derive(Clone)]
pub enum KernelSpec<T> {
    /// `1 / x`.
    Cauchy,
    /// `x_index / |x|^power`; `index` 1 or 2 picks a coordinate, 0 keeps the
    /// complex vector `x / |x|^power`.
    Riesz { power: T, index: u8 },
    /// User kernel; oddness is checked by sampling before use.
    Custom {
        name: String,
        k: Arc<dyn Fn(Cx<T>) -> Cx<T> + Send + Sync>,
    },
}

impl<T: Real> fmt::Debug for KernelSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl<T: Real> KernelSpec<T> {
    pub fn riesz(power: T, index: u8) -> Self {
        KernelSpec::Riesz { power, index }
    }

    pub fn custom(
        name: impl Into<String>,
        k: impl Fn(Cx<T>) -> Cx<T> + Send + Sync + 'static,
    ) -> Self {
        KernelSpec::Custom {
            name: name.into(),
            k: Arc::new(k),
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::Cauchy => "cauchy".into(),
            KernelSpec::Riesz { power, index } => format!("riesz({power},{index})"),
            KernelSpec::Custom { name, .. } => name.clone(),
        }
    }

    /// Dimension of the space the kernel acts on.
    pub fn dimension(&self) -> usize {
        2
    }

    #[inline]
    pub fn eval(&self, x: Cx<T>) -> Cx<T> {
        match self {
            KernelSpec::Cauchy => x.inv(),
            KernelSpec::Riesz { power, index } => {
                let r = x.norm().powf(*power);
                match index {
                    1 => cx(x.re / r, T::zero()),
                    2 => cx(x.im / r, T::zero()),
                    _ => x / r,
                }
            }
            KernelSpec::Custom { k, .. } => k(x),
        }
    }

    /// `K(-x) = -K(x)` at a fixed set of sample points, to a few ulps.
    pub fn is_odd(&self) -> bool {
        let n = 64;
        (0..n).all(|j| {
            let r = T::lit(0.05 * 1.7f64.powi(j % 12));
            let phi = T::lit(0.37 + 2.1 * j as f64);
            let x = Complex::from_polar(r, phi);
            let (p, m) = (self.eval(x), self.eval(-x));
            let scale = p.norm().max(m.norm());
            if !scale.is_finite() {
                return false;
            }
            (p + m).norm() <= T::lit(16.0) * T::epsilon() * scale
        })
    }

    fn require_odd(&self) -> Result<(), TransformError> {
        if self.is_odd() {
            Ok(())
        } else {
            Err(TransformError::NotOdd(self.name()))
        }
    }
}

impl<T: Real> PlaneKernel<T> for KernelSpec<T> {
    fn at(&self, d: Cx<T>) -> Cx<T> {
        self.eval(d)
    }
}

/// `∫_{|ζ - x| > ε} K(ζ - x) dμ(ζ)`.
pub fn odd_kernel_eps<T: Real>(
    k: &KernelSpec<T>,
    mu: &ComplexMeasure<T>,
    x: Cx<T>,
    eps: T,
) -> Result<Cx<T>, TransformError> {
    k.require_odd()?;
    if !(eps > T::zero()) {
        return Err(TransformError::BadEpsilon(eps.as_f64()));
    }
    let q = kernel_integral(mu, x, eps, k, Weighting::Signed, quad_tol(T::lit(1e-13)));
    Ok(q.value)
}

/// `K(x-y)K(y-z) + K(y-z)K(z-x) + K(z-x)K(x-y)`.
pub fn kernel_symmetry_residual<T: Real>(
    k: &KernelSpec<T>,
    x: Cx<T>,
    y: Cx<T>,
    z: Cx<T>,
) -> Result<Cx<T>, TransformError> {
    if x == y || y == z || z == x {
        return Err(TransformError::BadArgument(
            "symmetry residual needs three distinct points".into(),
        ));
    }
    let (a, b, c) = (k.eval(x - y), k.eval(y - z), k.eval(z - x));
    Ok(a * b + b * c + c * a)
}

/// `(A, B)` with `A + B = 1` and `A a + B b = c`.
pub fn kernel_diff_coeffs<T: Real>(
    a: Cx<T>,
    b: Cx<T>,
    c: Cx<T>,
) -> Result<(Cx<T>, Cx<T>), TransformError> {
    if a == b {
        return Err(TransformError::BadArgument(
            "interpolation nodes coincide".into(),
        ));
    }
    Ok(((b - c) / (b - a), (a - c) / (a - b)))
}

/// `A / (z - a) + B / (z - b) - 1 / (z - c)`.
pub fn interpolation_error<T: Real>(
    a: Cx<T>,
    b: Cx<T>,
    c: Cx<T>,
    z: Cx<T>,
) -> Result<Cx<T>, TransformError> {
    let (ca, cb) = kernel_diff_coeffs(a, b, c)?;
    Ok(ca / (z - a) + cb / (z - b) - (z - c).inv())
}

/// For each radius `ρ`, `sup_{|z| = ρ} |interpolation_error| ρ³ / r²` over
/// `angles` equispaced directions.
pub fn interpolation_decay<T: Real>(
    a: Cx<T>,
    b: Cx<T>,
    c: Cx<T>,
    r: T,
    radii: &[T],
    angles: usize,
) -> Result<Vec<T>, TransformError> {
    if !(r > T::zero()) || angles == 0 {
        return Err(TransformError::BadArgument(
            "need r > 0 and at least one angle".into(),
        ));
    }
    radii
        .iter()
        .map(|&rho| {
            let mut best = T::zero();
            for j in 0..angles {
                let z = Complex::from_polar(rho, T::TAU() * T::of_usize(j) / T::of_usize(angles));
                let e = interpolation_error(a, b, c, z)?.norm();
                best = best.max(e * rho * rho * rho / (r * r));
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cauchy_triple_vanishes() {
        let k = KernelSpec::<f64>::Cauchy;
        let r = kernel_symmetry_residual(&k, cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0)).unwrap();
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn planar_vector_kernel_fails_symmetry() {
        let k = KernelSpec::riesz(3.0, 0);
        let r = kernel_symmetry_residual(&k, cx(0.0, 0.0), cx(1.0, 0.2), cx(-0.3, 0.8)).unwrap();
        assert!(r.norm() > 1e-2);
    }

    #[test]
    fn coincident_points_rejected() {
        let k = KernelSpec::<f64>::Cauchy;
        assert!(kernel_symmetry_residual(&k, cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0)).is_err());
        assert!(kernel_diff_coeffs(cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)).is_err());
    }

    #[test]
    fn oddness() {
        assert!(KernelSpec::<f64>::Cauchy.is_odd());
        assert!(KernelSpec::riesz(2.0, 1).is_odd());
        assert!(KernelSpec::riesz(3.0, 0).is_odd());
        let even = KernelSpec::custom("even", |x: Cx<f64>| cx(x.norm_sqr(), 0.0));
        assert!(!even.is_odd());
        let mu = ComplexMeasure::atoms(&[(cx(1.0, 0.0), cx(1.0, 0.0))]).unwrap();
        assert!(matches!(
            odd_kernel_eps(&even, &mu, cx(0.0, 0.0), 0.1),
            Err(TransformError::NotOdd(_))
        ));
    }

    #[test]
    fn symmetric_atoms_cancel_for_riesz() {
        let mu =
            ComplexMeasure::atoms(&[(cx(-1.0, 0.0), cx(1.0, 0.0)), (cx(1.0, 0.0), cx(1.0, 0.0))])
                .unwrap();
        let v = odd_kernel_eps(&KernelSpec::riesz(2.0, 1), &mu, cx(0.0, 0.0), 0.5).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn difference_coefficients() {
        let (a, b) = kernel_diff_coeffs(cx(-1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)).unwrap();
        assert_eq!((a, b), (cx(0.5, 0.0), cx(0.5, 0.0)));
        let (a, b) = kernel_diff_coeffs(cx(0.3, 0.1), cx(-0.2, 0.4), cx(0.3, 0.1)).unwrap();
        assert_abs_diff_eq!((a - cx(1.0, 0.0)).norm(), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(b.norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn decay_matches_cubic_law() {
        let (a, b, c) = (cx(-0.6, 0.1), cx(0.5, -0.2), cx(0.1, 0.3));
        // the numerator of the error is the constant c(Ab + Ba) - ab
        let (ca, cb) = kernel_diff_coeffs(a, b, c).unwrap();
        let n = (c * (ca * b + cb * a) - a * b).norm();
        let vals: Vec<f64> = interpolation_decay(a, b, c, 1.0, &[64.0, 128.0, 1024.0], 64).unwrap();
        for v in vals {
            assert!((v - n).abs() < 0.1 * n, "{v} vs {n}");
        }
    }
}
