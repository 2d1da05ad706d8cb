use num_complex::Complex;

use super::{AreaFn, Component, MeasureError, Region};
use crate::measure::interval::Family;
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::scalar::{cx, Cx, Real};

/// Quadrature nodes with complex measure weights.
#[derive(Debug, Clone, Default)]
pub struct NodeSet<T: Real> {
    pub nodes: Vec<Cx<T>>,
    pub weights: Vec<Cx<T>>,
    /// Accuracy warnings (for example fewer nodes than tabulated samples).
    pub warnings: Vec<String>,
}

impl<T: Real> NodeSet<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(z_k)`.
    pub fn integrate<F: Fn(Cx<T>) -> Cx<T>>(&self, f: F) -> Cx<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(cx(T::zero(), T::zero()), |acc, (z, w)| acc + *w * f(*z))
    }

    pub fn total_weight(&self) -> Cx<T> {
        self.weights
            .iter()
            .fold(cx(T::zero(), T::zero()), |a, b| a + *b)
    }
}

/// Nodes and weights integrating against one component.
///
/// Interval densities use the Gauss rule of their endpoint weight, so the
/// rule is exact for `h · p` with `h` the family's smooth factor and
/// `deg(h p) ≤ 2n - 1`. Curves use the periodic trapezoid rule; disks a
/// polar Gauss × trapezoid product; rectangles a tensor Gauss rule.
pub fn quadrature_nodes<T: Real>(
    component: &Component<T>,
    n: usize,
) -> Result<NodeSet<T>, MeasureError> {
    if let Component::Atom(a) = component {
        return Ok(NodeSet {
            nodes: vec![a.location],
            weights: vec![a.weight],
            warnings: Vec::new(),
        });
    }
    if n < 2 {
        return Err(MeasureError::TooFewNodes(n));
    }
    let mut out = NodeSet::default();
    match component {
        Component::Atom(_) => unreachable!(),
        Component::Interval(d) => {
            let (alpha, beta) = d.exponents();
            let rule = gauss_jacobi(n, alpha.as_f64(), beta.as_f64());
            let (a, b) = (d.a(), d.b());
            let half = (b - a) * T::lit(0.5);
            let jac = half.powf(T::one() + alpha + beta);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let x = T::lit(*x);
                let t = a + half * (x + T::one());
                out.nodes.push(cx(t, T::zero()));
                out.weights
                    .push(cx(T::lit(*w) * jac * d.smooth(t), T::zero()));
            }
            match d.family() {
                Family::Tabulated { values, .. } if n < values.len() => out.warnings.push(format!(
                    "{n} nodes for a density tabulated at {} points",
                    values.len()
                )),
                Family::Jacobi { poly, .. } if 2 * n < poly.len() => out.warnings.push(format!(
                    "{n} nodes cannot integrate the degree-{} density factor exactly",
                    poly.len() - 1
                )),
                Family::Equilibrium { .. } if n < 16 => out
                    .warnings
                    .push(format!("{n} nodes for a non-polynomial density factor")),
                _ => {}
            }
        }
        Component::Curve(c) => {
            let dt = T::TAU() / T::of_usize(n);
            for k in 0..n {
                let t = dt * T::of_usize(k);
                out.nodes.push(c.shape().point(t));
                out.weights.push(c.element(t) * dt);
            }
            if n < 16 {
                out.warnings
                    .push(format!("{n} trapezoid nodes on a closed curve"));
            }
        }
        Component::Area(a) => {
            match a.region() {
                Region::Disk { center, radius } => {
                    let nr = ((n as f64 / 4.0).sqrt().round() as usize).max(1);
                    let nt = (n / nr).max(2);
                    let rule = gauss_legendre(nr);
                    let dth = T::TAU() / T::of_usize(nt);
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        let r = *radius * (T::lit(*x) + T::one()) * T::lit(0.5);
                        let wr = T::lit(*w) * *radius * T::lit(0.5) * r;
                        for j in 0..nt {
                            let z = *center + Complex::from_polar(r, dth * T::of_usize(j));
                            out.nodes.push(z);
                            out.weights.push(a.eval(z) * wr * dth);
                        }
                    }
                }
                Region::Rect { x0, x1, y0, y1 } => {
                    let m = ((n as f64).sqrt().ceil() as usize).max(2);
                    let rule = gauss_legendre(m);
                    let hx = (*x1 - *x0) * T::lit(0.5);
                    let hy = (*y1 - *y0) * T::lit(0.5);
                    for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
                        for (yj, wj) in rule.nodes.iter().zip(&rule.weights) {
                            let z = cx(
                                *x0 + hx * (T::lit(*xi) + T::one()),
                                *y0 + hy * (T::lit(*yj) + T::one()),
                            );
                            out.nodes.push(z);
                            out.weights.push(a.eval(z) * T::lit(wi * wj) * hx * hy);
                        }
                    }
                }
            }
            if matches!(a.density_fn(), AreaFn::Grid(_)) && n < a.resolution().0 * a.resolution().1
            {
                out.warnings
                    .push(format!("{n} nodes for a {:?} density grid", a.resolution()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::IntervalDensity;
    use approx::assert_abs_diff_eq;

    #[test]
    fn arcsine_weights_sum_to_one() {
        let c = Component::Interval(IntervalDensity::arcsine(-1.0, 1.0).unwrap());
        let ns = quadrature_nodes(&c, 16).unwrap();
        assert_eq!(ns.len(), 16);
        assert_abs_diff_eq!(ns.total_weight().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_second_moment() {
        let c = Component::Interval(IntervalDensity::uniform(-1.0, 1.0).unwrap());
        let ns = quadrature_nodes(&c, 8).unwrap();
        assert_abs_diff_eq!(ns.integrate(|z| z * z).re, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn semicircle_mass_against_adaptive_oracle() {
        // oracle: composite midpoint in θ of (1/π) sin²θ on [0, π]
        let m = 200_000;
        let oracle: f64 = (0..m)
            .map(|k| {
                let th = (k as f64 + 0.5) * std::f64::consts::PI / m as f64;
                th.sin().powi(2) / std::f64::consts::PI * std::f64::consts::PI / m as f64
            })
            .sum();
        let c = Component::Interval(IntervalDensity::semicircle(-1.0, 1.0).unwrap());
        let ns = quadrature_nodes(&c, 32).unwrap();
        assert_abs_diff_eq!(ns.total_weight().re, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(ns.total_weight().re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn too_few_nodes() {
        let c = Component::Interval(IntervalDensity::uniform(0.0, 1.0).unwrap());
        assert!(matches!(
            quadrature_nodes(&c, 1),
            Err(MeasureError::TooFewNodes(1))
        ));
    }

    #[test]
    fn tabulated_warning_channel() {
        let fam = Family::Tabulated {
            alpha: 0.0,
            beta: 0.0,
            values: vec![1.0; 40],
        };
        let c = Component::Interval(IntervalDensity::new(0.0, 1.0, fam).unwrap());
        let ns = quadrature_nodes(&c, 8).unwrap();
        assert_eq!(ns.warnings.len(), 1);
    }
}
