//! Sample points of a measure with signed and total-variation weights.

use crate::measure::{quadrature_nodes, ComplexMeasure, Component, Continuous, MeasureError};
use crate::quadrature::de_rule;
use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone, Copy)]
pub struct Sample<T: Real> {
    /// Where integrands are evaluated. Interval samples closer to an end
    /// than the floating-point spacing there are pulled in to it.
    pub at: Cx<T>,
    pub weight: Cx<T>,
    pub abs_weight: T,
    /// Distance to the nearest interval endpoint (infinite off intervals).
    pub edge: T,
}

const MAX_DE_LEVEL: usize = 8;
const MIN_PER_PIECE: usize = 8;

/// Double-exponential nodes on intervals (at least `n` per interval,
/// shared among the pieces between knots, where the level allows),
/// `n`-point trapezoid on curves, the product rules on areas, and atoms as
/// they are.
pub fn samples<T: Real>(mu: &ComplexMeasure<T>, n: usize) -> Result<Vec<Sample<T>>, MeasureError> {
    let mut out: Vec<Sample<T>> = mu
        .atom_list()
        .iter()
        .map(|a| Sample {
            at: a.location,
            weight: a.weight,
            abs_weight: a.weight.norm(),
            edge: T::infinity(),
        })
        .collect();
    for part in mu.parts() {
        let coef = part.coef;
        match &part.kind {
            Continuous::Interval(d) => {
                let (a, b) = (d.a(), d.b());
                let floor = T::lit(64.0) * T::epsilon() * a.abs().max(b.abs()).max(b - a);
                let mut cuts = vec![a];
                cuts.extend(d.knots());
                cuts.push(b);
                let per_piece = n.div_ceil(cuts.len() - 1).max(MIN_PER_PIECE);
                for w in cuts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let mut level = 2;
                    let mut rule = de_rule(lo, hi, level);
                    while rule.len() < per_piece && level < MAX_DE_LEVEL {
                        level += 1;
                        rule = de_rule(lo, hi, level);
                    }
                    for (p, wt) in rule {
                        let (da, db) = d.distances(&p, lo, hi);
                        let g = d.density_with(p.t, da, db) * wt;
                        if g == T::zero() || !g.is_finite() {
                            continue;
                        }
                        let t = p.t.max(a + floor).min(b - floor);
                        out.push(Sample {
                            at: cx(t, T::zero()),
                            weight: coef * g,
                            abs_weight: coef.norm() * g.abs(),
                            edge: (t - a).min(b - t),
                        });
                    }
                }
            }
            Continuous::Curve(c) => {
                let dt = T::TAU() / T::of_usize(n);
                for k in 0..n {
                    let t = dt * T::of_usize(k);
                    let z = c.shape().point(t);
                    let el = c.element(t) * dt;
                    out.push(Sample {
                        at: z,
                        weight: coef * el,
                        abs_weight: coef.norm() * el.norm(),
                        edge: T::infinity(),
                    });
                }
            }
            Continuous::Area(a) => {
                let ns = quadrature_nodes(&Component::Area(a.clone()), n)?;
                for (z, w) in ns.nodes.into_iter().zip(ns.weights) {
                    out.push(Sample {
                        at: z,
                        weight: coef * w,
                        abs_weight: (coef * w).norm(),
                        edge: T::infinity(),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{CurveDensity, CurveFn, IntervalDensity};
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_reproduce_mass_and_variation() {
        let mu = ComplexMeasure::single(IntervalDensity::arcsine(-1.0, 2.0).unwrap()).unwrap();
        let s = samples(&mu, 100).unwrap();
        let m: f64 = s.iter().map(|x| x.weight.re).sum();
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-12);
        assert!(s.iter().all(|x| x.at.re > -1.0 && x.at.re < 2.0));
        let circ =
            CurveDensity::circle(cx(0.0, 0.0), 2.0, CurveFn::Constant(cx(1.0, 0.0))).unwrap();
        let mu = ComplexMeasure::single(circ).unwrap();
        let s = samples(&mu, 64).unwrap();
        let v: f64 = s.iter().map(|x| x.abs_weight).sum();
        assert_abs_diff_eq!(v, 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        let total = s.iter().fold(cx(0.0, 0.0), |a, x| a + x.weight);
        assert!(total.norm() < 1e-12);
    }
}
