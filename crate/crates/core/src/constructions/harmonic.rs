//! Harmonic measure at infinity of a finite union of real intervals, its
//! Green's function and Robin constant.

use serde_json::{json, Value};

use super::ConstructionError;
use crate::measure::spec_file::SpecFile;
use crate::measure::{
    make_measure, ComplexMeasure, Component, Family, IntervalDensity, MeasureError,
};
use crate::scalar::{cx, Cx, Real};
use crate::transforms::{cauchy_direct, cauchy_pv_with, log_potential, PvOptions};

const MAX_SWEEPS: usize = 2000;

/// `ω = |p(x)| / (π sqrt(|∏(x - aⱼ)(x - bⱼ)|)) dx` on `E = ∪[aⱼ, bⱼ]`,
/// with `p` monic and one root per gap.
#[derive(Debug, Clone)]
pub struct HarmonicMeasureSpec<T: Real> {
    pub intervals: Vec<(T, T)>,
    pub gap_roots: Vec<T>,
    pub robin_constant: T,
    /// Largest deviation of the per-interval Robin estimates from their mean.
    pub robin_spread: T,
    /// Mass before normalisation; one up to quadrature error.
    pub raw_mass: T,
    /// Mass after normalisation.
    pub mass: T,
    /// Gauss-Seidel sweeps used by the root solver.
    pub sweeps: usize,
    pub density: Vec<IntervalDensity<T>>,
    measure: ComplexMeasure<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEval<T: Real> {
    pub point: Cx<T>,
    pub value: T,
    /// `(∂G/∂x, ∂G/∂y)`; on `E` the limit from the upper half-plane.
    pub gradient: [T; 2],
}

fn check_intervals<T: Real>(intervals: &[(T, T)]) -> Result<(), ConstructionError> {
    if intervals.is_empty() {
        return Err(ConstructionError::Invalid(
            "need at least one interval".into(),
        ));
    }
    for (k, &(a, b)) in intervals.iter().enumerate() {
        if !(a.is_finite() && b.is_finite()) {
            return Err(ConstructionError::Invalid(format!(
                "interval {k} is not finite"
            )));
        }
        if !(b > a) {
            return Err(ConstructionError::Invalid(format!(
                "interval {k} = [{}, {}] is empty",
                a.as_f64(),
                b.as_f64()
            )));
        }
        if k > 0 && !(a > intervals[k - 1].1) {
            return Err(ConstructionError::Invalid(format!(
                "intervals {} and {k} overlap or are out of order",
                k - 1
            )));
        }
    }
    Ok(())
}

fn endpoints_except<T: Real>(intervals: &[(T, T)], skip: (T, T)) -> Vec<T> {
    intervals
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .filter(|e| *e != skip.0 && *e != skip.1)
        .collect()
}

/// Weighted mean of `t` over a gap for `|∏_{j≠k}(t - c_j)| / sqrt|Q(t)|`,
/// the unique root making the gap integral of `p / sqrt|Q|` vanish.
fn gap_mean<T: Real>(intervals: &[(T, T)], roots: &[T], k: usize) -> Result<T, MeasureError> {
    let (lo, hi) = (intervals[k].1, intervals[k + 1].0);
    let others: Vec<T> = roots
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, c)| *c)
        .collect();
    let d = IntervalDensity::new(
        lo,
        hi,
        Family::Equilibrium {
            roots: others,
            outer: endpoints_except(intervals, (lo, hi)),
            scale: T::one(),
        },
    )?;
    let mid = (lo + hi) * T::lit(0.5);
    Ok(mid + d.integrate_density(|t| t - mid) / d.mass())
}

/// Harmonic measure of `∪[aⱼ, bⱼ]` (closed, disjoint, increasing).
///
/// Gap roots are found by Gauss-Seidel sweeps; each update solves its own
/// gap condition exactly, since that condition is linear in the root.
pub fn harmonic_measure<T: Real>(
    intervals: &[(T, T)],
) -> Result<HarmonicMeasureSpec<T>, ConstructionError> {
    check_intervals(intervals)?;
    let n = intervals.len();
    let span = intervals[n - 1].1 - intervals[0].0;
    let mut roots: Vec<T> = (0..n - 1)
        .map(|k| (intervals[k].1 + intervals[k + 1].0) * T::lit(0.5))
        .collect();
    let tol = T::lit(1e-14) * span.max(intervals[0].0.abs()).max(intervals[n - 1].1.abs());
    let mut sweeps = 0;
    if n > 1 {
        loop {
            sweeps += 1;
            let mut change = T::zero();
            for k in 0..n - 1 {
                let c = gap_mean(intervals, &roots, k)?;
                let (lo, hi) = (intervals[k].1, intervals[k + 1].0);
                if !(c > lo && c < hi) {
                    return Err(ConstructionError::NonConvergence(format!(
                        "gap {k} root {} left its bracket ({}, {})",
                        c.as_f64(),
                        lo.as_f64(),
                        hi.as_f64()
                    )));
                }
                change = change.max((c - roots[k]).abs());
                roots[k] = c;
            }
            if n == 2 || change <= tol {
                break;
            }
            if sweeps >= MAX_SWEEPS {
                return Err(ConstructionError::NonConvergence(format!(
                    "gap roots still moving by {:e} after {sweeps} sweeps: {:?}",
                    change.as_f64(),
                    roots.iter().map(|c| c.as_f64()).collect::<Vec<_>>()
                )));
            }
        }
    }
    let build = |scale: T| -> Result<Vec<IntervalDensity<T>>, MeasureError> {
        intervals
            .iter()
            .map(|&(a, b)| {
                IntervalDensity::new(
                    a,
                    b,
                    Family::Equilibrium {
                        roots: roots.clone(),
                        outer: endpoints_except(intervals, (a, b)),
                        scale,
                    },
                )
            })
            .collect()
    };
    let raw = build(T::FRAC_1_PI())?;
    let raw_mass: T = raw.iter().map(|d| d.mass()).sum();
    let density = build(T::FRAC_1_PI() / raw_mass)?;
    let mass: T = density.iter().map(|d| d.mass()).sum();
    let measure = make_measure(
        density
            .iter()
            .map(|d| (cx(T::one(), T::zero()), Component::Interval(d.clone()))),
    )?;
    let estimates: Vec<T> = intervals
        .iter()
        .map(|&(a, b)| -log_potential(&measure, cx((a + b) * T::lit(0.5), T::zero())).re)
        .collect();
    let robin_constant = estimates.iter().copied().sum::<T>() / T::of_usize(n);
    let robin_spread = estimates
        .iter()
        .map(|e| (*e - robin_constant).abs())
        .fold(T::zero(), T::max);
    Ok(HarmonicMeasureSpec {
        intervals: intervals.to_vec(),
        gap_roots: roots,
        robin_constant,
        robin_spread,
        raw_mass,
        mass,
        sweeps,
        density,
        measure,
    })
}

impl<T: Real> HarmonicMeasureSpec<T> {
    pub fn measure(&self) -> &ComplexMeasure<T> {
        &self.measure
    }

    /// Index of the interval containing `x`.
    pub fn interval_of(&self, x: T) -> Option<usize> {
        self.intervals.iter().position(|&(a, b)| x >= a && x <= b)
    }

    /// Density of `ω` at a real point.
    pub fn density_at(&self, x: T) -> T {
        self.interval_of(x)
            .map_or(T::zero(), |j| self.density[j].density(x))
    }

    pub fn sidecar_json(&self) -> Value {
        json!({
            "intervals": self.intervals.iter().map(|(a, b)| [a.as_f64(), b.as_f64()]).collect::<Vec<_>>(),
            "gap_roots": self.gap_roots.iter().map(|c| c.as_f64()).collect::<Vec<_>>(),
            "robin_constant": self.robin_constant.as_f64(),
        })
    }
}

impl HarmonicMeasureSpec<f64> {
    pub fn spec_file(&self) -> Result<SpecFile, MeasureError> {
        SpecFile::from_measure(&self.measure)
    }
}

/// `G(z) = ∫ log|z - y| dω(y) + C∞` and its gradient.
pub fn greens_function<T: Real>(
    spec: &HarmonicMeasureSpec<T>,
    z: Cx<T>,
) -> Result<GreenEval<T>, ConstructionError> {
    let value = log_potential(&spec.measure, z).re + spec.robin_constant;
    let on_e = z.im == T::zero() && spec.interval_of(z.re).is_some();
    let gradient = if on_e {
        let x = z.re;
        let pv = cauchy_pv_with(&spec.measure, z, &PvOptions::fast(T::lit(1e-13)))?.value;
        [-pv.re, T::PI() * spec.density_at(x)]
    } else {
        // ∂G/∂x - i ∂G/∂y = ∫ dω(y) / (z - y) = -C^ω(z)
        let f = -cauchy_direct(&spec.measure, z);
        [f.re, -f.im]
    };
    Ok(GreenEval {
        point: z,
        value,
        gradient,
    })
}

/// Circle averages of `G(z) - ln|z|` at the given radii around the origin
/// (16 points each); they tend to the Robin constant.
pub fn robin_fit<T: Real>(
    spec: &HarmonicMeasureSpec<T>,
    radii: &[T],
) -> Result<Vec<T>, ConstructionError> {
    let m = 16;
    radii
        .iter()
        .map(|&r| {
            let mut acc = T::zero();
            for k in 0..m {
                let th = T::TAU() * (T::of_usize(k) + T::lit(0.5)) / T::of_usize(m);
                let z = Cx::from_polar(r, th);
                acc += greens_function(spec, z)?.value - r.ln();
            }
            Ok(acc / T::of_usize(m))
        })
        .collect()
}

/// `|E ∩ (x - h, x + h)|`.
fn local_length<T: Real>(intervals: &[(T, T)], x: T, h: T) -> T {
    intervals
        .iter()
        .map(|&(a, b)| (b.min(x + h) - a.max(x - h)).max(T::zero()))
        .sum()
}

/// Smallest `|E ∩ (x - h, x + h)| / h` over `x ∈ E` and `h ∈ (0, r)`.
///
/// `x` runs over the endpoints and 64 points per interval. For fixed `x`
/// the ratio is monotone between the breakpoints `h = |x - e|`, so the
/// minimum over `h` is taken exactly from the breakpoints and the two
/// ends of the range.
pub fn homogeneity_margin<T: Real>(intervals: &[(T, T)], r: T) -> Result<T, ConstructionError> {
    check_intervals(intervals)?;
    if !(r > T::zero()) {
        return Err(ConstructionError::Invalid("radius must be positive".into()));
    }
    let ends: Vec<T> = intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut xs = ends.clone();
    for &(a, b) in intervals {
        xs.extend((1..64).map(|k| a + (b - a) * T::of_usize(k) / T::lit(64.0)));
    }
    let mut worst = T::infinity();
    for &x in &xs {
        let interior = ends.iter().all(|e| *e != x);
        worst = worst.min(if interior { T::lit(2.0) } else { T::one() });
        for &e in &ends {
            let h = (x - e).abs();
            if h > T::zero() && h < r {
                worst = worst.min(local_length(intervals, x, h) / h);
            }
        }
        worst = worst.min(local_length(intervals, x, r) / r);
    }
    Ok(worst)
}

/// Whether `|E ∩ (x - h, x + h)| ≥ δh` for all sampled `x ∈ E`, `h ∈ (0, r)`.
pub fn homogeneity_check<T: Real>(
    intervals: &[(T, T)],
    delta: T,
    r: T,
) -> Result<bool, ConstructionError> {
    if !(delta > T::zero() && delta <= T::lit(2.0)) {
        return Err(ConstructionError::Invalid("δ must lie in (0, 2]".into()));
    }
    Ok(homogeneity_margin(intervals, r)? >= delta)
}

/// Middle-gap construction on `[0, 1]`: each interval keeps a fraction
/// `keep` of its length at both ends, `depth` times.
pub fn cantor_intervals<T: Real>(depth: usize, keep: T) -> Result<Vec<(T, T)>, ConstructionError> {
    if !(keep > T::zero() && keep < T::lit(0.5)) {
        return Err(ConstructionError::Invalid(
            "kept fraction must lie in (0, 1/2)".into(),
        ));
    }
    let mut out = vec![(T::zero(), T::one())];
    for _ in 0..depth {
        out = out
            .iter()
            .flat_map(|&(a, b)| {
                let l = (b - a) * keep;
                [(a, a + l), (b - l, b)]
            })
            .collect();
    }
    Ok(out)
}
