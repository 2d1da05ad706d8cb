//! Critical points of the Green's function in the gaps and their sums.

use serde_json::{json, Value};

use super::CombError;
use crate::constructions::{greens_function, HarmonicMeasureSpec};
use crate::scalar::{cx, Real};
use crate::transforms::cauchy_direct;

#[derive(Debug, Clone)]
pub struct WidomReport<T: Real> {
    /// One zero of `∂G/∂x` per finite gap, found by bisection.
    pub critical_points: Vec<T>,
    pub green_values: Vec<T>,
    /// Running sums of `green_values` in gap order.
    pub partial_sums: Vec<T>,
    pub sum: T,
    /// Largest distance between a critical point and the gap root of the
    /// density.
    pub root_agreement: T,
}

impl<T: Real> WidomReport<T> {
    pub fn summary_json(&self) -> Value {
        let v = |xs: &[T]| xs.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        json!({
            "critical_points": v(&self.critical_points),
            "green_values": v(&self.green_values),
            "partial_sums": v(&self.partial_sums),
            "sum": self.sum.as_f64(),
            "root_agreement": self.root_agreement.as_f64(),
        })
    }
}

const MAX_BISECTIONS: usize = 200;

/// Bisection on `∂G/∂x = -Re C^ω(x)`, which is positive just right of a
/// gap's left end and negative just left of its right end.
pub fn widom_sum<T: Real>(spec: &HarmonicMeasureSpec<T>) -> Result<WidomReport<T>, CombError> {
    let mu = spec.measure();
    let gx = |x: T| -cauchy_direct(mu, cx(x, T::zero())).re;
    let mut critical_points = Vec::new();
    for k in 0..spec.intervals.len().saturating_sub(1) {
        let (l, r) = (spec.intervals[k].1, spec.intervals[k + 1].0);
        let inset = (r - l) * T::lit(1e-9);
        let (mut lo, mut hi) = (l + inset, r - inset);
        let (glo, ghi) = (gx(lo), gx(hi));
        if !(glo > T::zero() && ghi < T::zero()) {
            return Err(CombError::Invalid(format!(
                "gap {k}: no sign change of dG/dx on [{:e}, {:e}] (values {:e}, {:e})",
                lo.as_f64(),
                hi.as_f64(),
                glo.as_f64(),
                ghi.as_f64()
            )));
        }
        let mut it = 0;
        while it < MAX_BISECTIONS {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if gx(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            it += 1;
        }
        critical_points.push((lo + hi) * T::lit(0.5));
    }
    let green_values = critical_points
        .iter()
        .map(|&c| greens_function(spec, cx(c, T::zero())).map(|g| g.value))
        .collect::<Result<Vec<_>, _>>()?;
    let mut acc = T::zero();
    let partial_sums: Vec<T> = green_values
        .iter()
        .map(|g| {
            acc += *g;
            acc
        })
        .collect();
    let root_agreement = critical_points
        .iter()
        .zip(&spec.gap_roots)
        .map(|(c, r)| (*c - *r).abs())
        .fold(T::zero(), T::max);
    Ok(WidomReport {
        critical_points,
        green_values,
        partial_sums,
        sum: acc,
        root_agreement,
    })
}
