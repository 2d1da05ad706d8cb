//! Numerical checks of the transform identities: the quadratic identity,
//! vanishing principal values, kernel antisymmetry, half-space sums,
//! maximal-function summability and density-point traces.

mod maximal;
mod samples;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

pub use maximal::{maximal_summability, MaximalOptions, MaximalStats, Summability};
pub use samples::{samples, Sample};

use crate::measure::{ComplexMeasure, Continuous, MeasureError};
use crate::parallel::thread_pool;
use crate::scalar::{cx, Cx, Real};
use crate::transforms::{
    cauchy_pv_with, mass_in_disc, riesz_r1_variation, KernelSpec, PvOptions, TransformError,
};

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("reflectionless requires continuous measure")]
    NotContinuous,
    #[error("measure must be positive")]
    NotPositive,
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("{0}")]
    BadArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A negative control failed as it should.
    ExpectedFail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::ExpectedFail => "expected-fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn decide(max_residual: f64, tol: f64, expect_fail: bool, inconclusive: bool) -> Self {
        let ok = max_residual < tol;
        match (inconclusive, expect_fail, ok) {
            (true, _, _) => Verdict::Inconclusive,
            (false, false, true) => Verdict::Pass,
            (false, false, false) => Verdict::Fail,
            (false, true, false) => Verdict::ExpectedFail,
            // a negative control that passes means the check is blind
            (false, true, true) => Verdict::Fail,
        }
    }
}

/// Both sides of an identity at each test point.
#[derive(Debug, Clone)]
pub struct IdentityReport<T: Real> {
    pub name: String,
    pub points: Vec<Cx<T>>,
    pub lhs: Vec<Cx<T>>,
    pub rhs: Vec<Cx<T>>,
    pub residuals: Vec<T>,
    pub inconclusive: Vec<bool>,
    pub max_residual: T,
    pub tolerance: T,
    pub nodes: Vec<usize>,
    /// Largest residual within named subsets of the points.
    pub groups: Vec<(String, T)>,
    pub verdict: Verdict,
}

impl<T: Real> IdentityReport<T> {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        name: &str,
        points: Vec<Cx<T>>,
        lhs: Vec<Cx<T>>,
        rhs: Vec<Cx<T>>,
        inconclusive: Vec<bool>,
        tolerance: T,
        nodes: Vec<usize>,
        expect_fail: bool,
    ) -> Self {
        let residuals: Vec<T> = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| (*l - *r).norm())
            .collect();
        let max_residual = residuals
            .iter()
            .zip(&inconclusive)
            .filter(|(_, &bad)| !bad)
            .map(|(r, _)| *r)
            .fold(T::zero(), T::max);
        let verdict = Verdict::decide(
            max_residual.as_f64(),
            tolerance.as_f64(),
            expect_fail,
            inconclusive.iter().any(|&b| b),
        );
        IdentityReport {
            name: name.to_string(),
            points,
            lhs,
            rhs,
            residuals,
            inconclusive,
            max_residual,
            tolerance,
            nodes,
            groups: Vec::new(),
            verdict,
        }
    }

    /// Residual and point of the worst conclusive test point.
    pub fn worst(&self) -> Option<(Cx<T>, T)> {
        self.residuals
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.inconclusive[*i])
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, r)| (self.points[i], *r))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("point_re,point_im,lhs_re,lhs_im,rhs_re,rhs_im,residual\n");
        for i in 0..self.points.len() {
            let (p, l, r) = (self.points[i], self.lhs[i], self.rhs[i]);
            let res = if self.inconclusive[i] {
                "nan".to_string()
            } else {
                format!("{:e}", self.residuals[i].as_f64())
            };
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e},{:e},{}",
                p.re.as_f64(),
                p.im.as_f64(),
                l.re.as_f64(),
                l.im.as_f64(),
                r.re.as_f64(),
                r.im.as_f64(),
                res
            );
        }
        s
    }

    pub fn summary_json(&self) -> Value {
        let groups: serde_json::Map<String, Value> = self
            .groups
            .iter()
            .map(|(k, v)| (k.clone(), json!(v.as_f64())))
            .collect();
        json!({
            "identity": self.name,
            "max_residual": self.max_residual.as_f64(),
            "verdict": self.verdict.as_str(),
            "tolerance": self.tolerance.as_f64(),
            "nodes": self.nodes,
            "points": self.points.len(),
            "inconclusive_points": self.inconclusive.iter().filter(|&&b| b).count(),
            "groups": groups,
        })
    }
}

/// Centre of the bounding box and the largest distance from it to the
/// support, estimated on sample nodes.
fn support_disc<T: Real>(mu: &ComplexMeasure<T>) -> Result<(Cx<T>, T), MeasureError> {
    let c = mu.center();
    let r = samples(mu, 64)?
        .iter()
        .map(|s| (s.at - c).norm())
        .fold(T::zero(), T::max);
    Ok((c, if r > T::zero() { r } else { T::one() }))
}

/// Default test points for the quadratic identity: 32 points on each of
/// the circles of radius 1.5R and 3R around the support, plus 16 points
/// on the circle of radius R/2 when the measure lives on circles
/// concentric with the support disc (the inner disc is then free of
/// support).
pub fn default_quadratic_points<T: Real>(
    mu: &ComplexMeasure<T>,
) -> Result<Vec<Cx<T>>, MeasureError> {
    let (c, r) = support_disc(mu)?;
    let ring = |rad: T, n: usize, phase: f64| -> Vec<Cx<T>> {
        (0..n)
            .map(|k| {
                let th = T::lit(phase + std::f64::consts::TAU * k as f64 / n as f64);
                c + Cx::from_polar(rad, th)
            })
            .collect()
    };
    let mut pts = ring(r * T::lit(1.5), 32, 0.1);
    pts.extend(ring(r * T::lit(3.0), 32, 0.25));
    let inner_free = mu.atom_list().is_empty()
        && !mu.parts().is_empty()
        && mu.parts().iter().all(|p| match &p.kind {
            Continuous::Curve(cv) => cv.closest(c).1 >= r * T::lit(0.75),
            _ => false,
        });
    if inner_free {
        pts.extend(ring(r * T::lit(0.5), 16, 0.05));
    }
    Ok(pts)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadraticOptions<T> {
    pub tol: T,
    /// Samples per component for the outer integral.
    pub nodes: usize,
    pub expect_fail: bool,
}

impl<T: Real> QuadraticOptions<T> {
    pub fn new(tol: T) -> Self {
        QuadraticOptions {
            tol,
            nodes: 256,
            expect_fail: false,
        }
    }
}

/// `2 ∫ C^μ(t) dμ(t) / (t - z)` against `[C^μ(z)]²`. The inner principal
/// values are computed once at the outer nodes.
pub fn verify_quadratic<T: Real>(
    mu: &ComplexMeasure<T>,
    points: &[Cx<T>],
    opts: &QuadraticOptions<T>,
) -> Result<IdentityReport<T>, IdentityError> {
    if !(opts.tol > T::zero()) {
        return Err(IdentityError::BadArgument(
            "tolerance must be positive".into(),
        ));
    }
    if let Some(a) = mu.atom_list().iter().find(|a| points.contains(&a.location)) {
        return Err(IdentityError::BadArgument(format!(
            "test point {} sits on an atom",
            a.location
        )));
    }
    let nodes = samples(mu, opts.nodes)?;
    let inner_tol = (opts.tol * T::lit(1e-3)).max(T::lit(1e-13));
    let pv = PvOptions::fast(inner_tol);
    let inner: Vec<Option<Cx<T>>> = thread_pool().install(|| {
        nodes
            .par_iter()
            .map(|s| cauchy_pv_with(mu, s.at, &pv).ok().map(|r| r.value))
            .collect()
    });
    let any_failed = inner.iter().any(|v| v.is_none());
    let rows: Vec<(Cx<T>, Cx<T>, bool)> = thread_pool().install(|| {
        points
            .par_iter()
            .map(|&z| {
                let lhs = nodes
                    .iter()
                    .zip(&inner)
                    .fold(cx(T::zero(), T::zero()), |acc, (s, c)| match c {
                        Some(c) => acc + *c * s.weight / (s.at - z),
                        None => acc,
                    })
                    * T::lit(2.0);
                match cauchy_pv_with(mu, z, &pv) {
                    Ok(r) => (lhs, r.value * r.value, any_failed),
                    Err(_) => (lhs, cx(T::nan(), T::nan()), true),
                }
            })
            .collect()
    });
    let (lhs, rest): (Vec<_>, Vec<_>) = rows.into_iter().map(|(l, r, b)| (l, (r, b))).unzip();
    let (rhs, bad): (Vec<_>, Vec<_>) = rest.into_iter().unzip();
    Ok(IdentityReport::assemble(
        "quadratic",
        points.to_vec(),
        lhs,
        rhs,
        bad,
        opts.tol,
        vec![nodes.len()],
        opts.expect_fail,
    ))
}

/// Principal values at `|μ|`-weighted quadrature nodes for `n` and `2n`
/// nodes, plus the quarter points of each interval. Passes when every
/// residual is below `tol`.
pub fn verify_reflectionless<T: Real>(
    mu: &ComplexMeasure<T>,
    n: usize,
    tol: T,
    opts: &PvOptions<T>,
    expect_fail: bool,
) -> Result<IdentityReport<T>, IdentityError> {
    if !mu.is_continuous() {
        return Err(IdentityError::NotContinuous);
    }
    if !(tol > T::zero()) {
        return Err(IdentityError::BadArgument(
            "tolerance must be positive".into(),
        ));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for m in [n, 2 * n] {
        let ns = mu.discretize(m)?;
        labels.extend(std::iter::repeat_n(format!("n={m}"), ns.len()));
        points.extend(ns.nodes);
    }
    for p in mu.parts() {
        if let Continuous::Interval(d) = &p.kind {
            for q in [0.25, 0.5, 0.75] {
                points.push(cx(d.a() + (d.b() - d.a()) * T::lit(q), T::zero()));
                labels.push("quarter points".to_string());
            }
        }
    }
    let vals: Vec<Option<Cx<T>>> = thread_pool().install(|| {
        points
            .par_iter()
            .map(|&z| cauchy_pv_with(mu, z, opts).ok().map(|r| r.value))
            .collect()
    });
    let bad: Vec<bool> = vals.iter().map(|v| v.is_none()).collect();
    let lhs: Vec<Cx<T>> = vals
        .iter()
        .map(|v| v.unwrap_or(cx(T::nan(), T::nan())))
        .collect();
    let rhs = vec![cx(T::zero(), T::zero()); points.len()];
    let mut rep = IdentityReport::assemble(
        "reflectionless",
        points,
        lhs,
        rhs,
        bad,
        tol,
        vec![n, 2 * n],
        expect_fail,
    );
    let mut groups: Vec<(String, T)> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        if rep.inconclusive[i] {
            continue;
        }
        match groups.iter_mut().find(|g| &g.0 == l) {
            Some(g) => g.1 = g.1.max(rep.residuals[i]),
            None => groups.push((l.clone(), rep.residuals[i])),
        }
    }
    rep.groups = groups;
    Ok(rep)
}

/// Both orders of the double integral `∫ K^μ_ε dν` and `∫ K^ν_ε dμ` with
/// `K^μ_ε(z) = ∫_{|ζ - z| > ε} K(ζ - z) dμ(ζ)`.
#[derive(Debug, Clone, Copy)]
pub struct Antisymmetry<T: Real> {
    pub forward: Cx<T>,
    pub backward: Cx<T>,
    pub residual: T,
}

fn truncated_pair_sum<T: Real>(
    src: &[(Cx<T>, Cx<T>)],
    dst: &[(Cx<T>, Cx<T>)],
    k: &KernelSpec<T>,
    eps: T,
) -> Cx<T> {
    let mut acc = cx(T::zero(), T::zero());
    for (z, wz) in dst {
        for (s, ws) in src {
            let d = *s - *z;
            if d.norm() > eps {
                acc += k.eval(d) * *ws * *wz;
            }
        }
    }
    acc
}

fn pairs<T: Real>(mu: &ComplexMeasure<T>, n: usize) -> Result<Vec<(Cx<T>, Cx<T>)>, MeasureError> {
    let ns = mu.discretize(n)?;
    Ok(ns.nodes.into_iter().zip(ns.weights).collect())
}

/// `|∫K^μ_ε dν + ∫K^ν_ε dμ|` on the discretised measures (atoms are
/// used as they are, continuous parts through `n` quadrature nodes).
pub fn antisymmetry_check<T: Real>(
    mu: &ComplexMeasure<T>,
    nu: &ComplexMeasure<T>,
    k: &KernelSpec<T>,
    eps: T,
    n: usize,
) -> Result<Antisymmetry<T>, IdentityError> {
    if !k.is_odd() {
        return Err(TransformError::NotOdd(k.name()).into());
    }
    if !(eps > T::zero()) {
        return Err(TransformError::BadEpsilon(eps.as_f64()).into());
    }
    let (m, v) = (pairs(mu, n)?, pairs(nu, n)?);
    let forward = truncated_pair_sum(&m, &v, k, eps);
    let backward = truncated_pair_sum(&v, &m, k, eps);
    Ok(Antisymmetry {
        forward,
        backward,
        residual: (forward + backward).norm(),
    })
}

#[derive(Debug, Clone)]
pub struct HalfspaceTrace<T: Real> {
    pub eps: Vec<T>,
    /// `∫ K^ν_ε dη` with `ν`, `η` the restrictions to `x₁ > c`, `x₁ < c`.
    pub values: Vec<Cx<T>>,
    pub positive: bool,
    /// Real parts never decrease as ε decreases.
    pub nondecreasing: bool,
}

/// Splits a positive measure at the vertical line `x₁ = c` and follows
/// `∫ K^ν_ε dη` down the ε-ladder.
pub fn halfspace_diagnostic<T: Real>(
    mu: &ComplexMeasure<T>,
    k: &KernelSpec<T>,
    c: T,
    eps_ladder: &[T],
    n: usize,
) -> Result<HalfspaceTrace<T>, IdentityError> {
    if !mu.is_positive() {
        return Err(IdentityError::NotPositive);
    }
    if eps_ladder.iter().any(|e| !(*e > T::zero())) {
        return Err(IdentityError::BadArgument(
            "ε-ladder must be positive".into(),
        ));
    }
    if mu.atom_list().iter().any(|a| a.location.re == c) {
        return Err(IdentityError::DegenerateSplit(
            "mass on the splitting line".into(),
        ));
    }
    let on_line = |v: &[(Cx<T>, Cx<T>)]| v.iter().any(|(z, w)| z.re == c && w.norm() > T::zero());
    // symmetric rules put a node on the line; one more node moves it off
    let mut all = pairs(mu, n)?;
    if on_line(&all) {
        all = pairs(mu, n + 1)?;
    }
    if on_line(&all) {
        return Err(IdentityError::DegenerateSplit(
            "mass on the splitting line".into(),
        ));
    }
    let right: Vec<_> = all.iter().copied().filter(|(z, _)| z.re > c).collect();
    let left: Vec<_> = all.iter().copied().filter(|(z, _)| z.re < c).collect();
    if right.is_empty() || left.is_empty() {
        return Err(IdentityError::DegenerateSplit(
            "one side of the split is empty".into(),
        ));
    }
    let mut ladder = eps_ladder.to_vec();
    ladder.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<Cx<T>> = ladder
        .iter()
        .map(|&e| truncated_pair_sum(&right, &left, k, e))
        .collect();
    let positive = values.iter().all(|v| v.re > T::zero());
    let slack = T::lit(1e-12);
    let nondecreasing = values
        .windows(2)
        .all(|w| w[1].re >= w[0].re - slack * w[0].re.abs().max(T::one()));
    Ok(HalfspaceTrace {
        eps: ladder,
        values,
        positive,
        nondecreasing,
    })
}

#[derive(Debug, Clone)]
pub struct RatioTrace<T: Real> {
    pub radii: Vec<T>,
    /// `μ(B(w, r)) / (π r²)`.
    pub mass_ratio: Vec<Cx<T>>,
    /// `R₁|μ|(x, y, r)`.
    pub riesz_value: Vec<T>,
    /// `|mass_ratio| / riesz_value`.
    pub quotient: Vec<T>,
}

/// Mass ratio against the Riesz average at each radius (no verdict: the
/// relation between them is only asymptotic).
pub fn density_point_trace<T: Real>(
    mu: &ComplexMeasure<T>,
    w: Cx<T>,
    radii: &[T],
) -> Result<RatioTrace<T>, IdentityError> {
    if radii.is_empty()
        || radii.iter().any(|r| !(*r > T::zero()))
        || radii.windows(2).any(|p| !(p[1] < p[0]))
    {
        return Err(IdentityError::BadArgument(
            "radii must be positive and decreasing".into(),
        ));
    }
    let mut out = RatioTrace {
        radii: radii.to_vec(),
        mass_ratio: Vec::new(),
        riesz_value: Vec::new(),
        quotient: Vec::new(),
    };
    for &r in radii {
        let m = mass_in_disc(mu, w, r)? / (T::PI() * r * r);
        let rz = riesz_r1_variation(mu, w.re, w.im, r)?;
        let q = if m.norm() == T::zero() {
            T::zero()
        } else {
            m.norm() / rz
        };
        out.mass_ratio.push(m);
        out.riesz_value.push(rz);
        out.quotient.push(q);
    }
    Ok(out)
}

/// Fraction of an `n × n` grid over the area parts of `μ` (grid points
/// inside their regions only) where `|C^μ| < threshold`.
pub fn small_transform_fraction<T: Real>(
    mu: &ComplexMeasure<T>,
    n: usize,
    threshold: T,
) -> Result<T, IdentityError> {
    let regions: Vec<_> = mu
        .parts()
        .iter()
        .filter_map(|p| match &p.kind {
            Continuous::Area(a) => Some(a.region().clone()),
            _ => None,
        })
        .collect();
    if regions.is_empty() || n < 2 {
        return Err(IdentityError::BadArgument(
            "needs an area component and n ≥ 2".into(),
        ));
    }
    let mut pts = Vec::new();
    for reg in &regions {
        let (x0, x1, y0, y1) = reg.bbox();
        for i in 0..n {
            for j in 0..n {
                let z = cx(
                    x0 + (x1 - x0) * (T::of_usize(i) + T::lit(0.5)) / T::of_usize(n),
                    y0 + (y1 - y0) * (T::of_usize(j) + T::lit(0.5)) / T::of_usize(n),
                );
                if reg.contains(z) {
                    pts.push(z);
                }
            }
        }
    }
    let opts = PvOptions::fast(T::lit(1e-10));
    let small: Result<Vec<bool>, TransformError> = thread_pool().install(|| {
        pts.par_iter()
            .map(|&z| Ok(cauchy_pv_with(mu, z, &opts)?.value.norm() < threshold))
            .collect()
    });
    let small = small?;
    Ok(T::of_usize(small.iter().filter(|&&b| b).count()) / T::of_usize(pts.len().max(1)))
}

#[cfg(test)]
mod tests;
