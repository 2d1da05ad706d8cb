//! Named measures: arcsine, semicircle, the unit-circle current, the
//! nested-curve example built from `2 sqrt(z² - 1) dz`, and harmonic
//! measures of interval unions.

mod harmonic;

use thiserror::Error;

pub use harmonic::{
    cantor_intervals, greens_function, harmonic_measure, homogeneity_check, homogeneity_margin,
    robin_fit, GreenEval, HarmonicMeasureSpec,
};

use crate::measure::{
    make_measure, sqrt_slit, ComplexMeasure, Component, CurveDensity, CurveFn, CurveShape,
    IntervalDensity, MeasureError,
};
use crate::scalar::{cx, Cx, Real};
use crate::transforms::{cauchy_direct, TransformError};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("{0}")]
    Invalid(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

/// `dx / (π sqrt((x - a)(b - x)))` on `[a, b]`.
pub fn arcsine<T: Real>(a: T, b: T) -> Result<ComplexMeasure<T>, ConstructionError> {
    Ok(ComplexMeasure::single(IntervalDensity::arcsine(a, b)?)?)
}

/// `μ₀ = (1/π) sqrt(1 - x²) dx` on `[-1, 1]`.
pub fn semicircle<T: Real>() -> ComplexMeasure<T> {
    let d = IntervalDensity::semicircle(-T::one(), T::one()).expect("fixed interval");
    ComplexMeasure::single(d).expect("finite density")
}

/// `c dz` on the counter-clockwise unit circle. With `c = 1/(πi)` the
/// transform is 2 inside, 0 outside and 1 (principal value) on the circle.
pub fn circle_unit_current<T: Real>(
    normalization: Cx<T>,
) -> Result<ComplexMeasure<T>, ConstructionError> {
    if normalization.norm() == T::zero() || !normalization.norm().is_finite() {
        return Err(ConstructionError::Invalid(
            "normalization must be finite and nonzero".into(),
        ));
    }
    let c = CurveDensity::circle(
        cx(T::zero(), T::zero()),
        T::one(),
        CurveFn::Constant(cx(T::one(), T::zero())),
    )?;
    Ok(make_measure([(normalization, Component::Curve(c))])?)
}

/// `z - sqrt(z² - 1)`, the branch vanishing at infinity.
pub fn r1<T: Real>(z: Cx<T>) -> Cx<T> {
    z - sqrt_slit(z)
}

/// `z + sqrt(z² - 1)`.
pub fn r2<T: Real>(z: Cx<T>) -> Cx<T> {
    z + sqrt_slit(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Outside the outer curve.
    Outside,
    /// Inside the outer curve, off the slit and outside every disk.
    Between,
    Disk(usize),
}

#[derive(Debug, Clone)]
pub struct RegionCheck<T: Real> {
    pub region: Region,
    pub point: Cx<T>,
    pub value: Cx<T>,
    pub target: Cx<T>,
    pub residual: T,
    /// Whether the point was used to fit the coefficients.
    pub calibration: bool,
}

/// The nested-curve measure `κ R dz|_Γ - κ R dz|_{∪γⱼ} + λ μ₀` with
/// `R = 2 sqrt(z² - 1)`, where `κ` and `λ` are fitted so that the transform
/// is `z - sqrt(z² - 1)` outside `Γ` and `z + sqrt(z² - 1)` between `Γ`
/// and the disks.
#[derive(Debug, Clone)]
pub struct DeGiorgiExample<T: Real> {
    pub measure: ComplexMeasure<T>,
    pub curve_coef: Cx<T>,
    pub interval_coef: Cx<T>,
    pub checks: Vec<RegionCheck<T>>,
    pub max_residual: T,
}

fn polygon<T: Real>(shape: &CurveShape<T>, n: usize) -> Vec<Cx<T>> {
    (0..n)
        .map(|k| shape.point(T::TAU() * T::of_usize(k) / T::of_usize(n)))
        .collect()
}

/// Winding number of a closed polygon around `z`.
fn winding<T: Real>(poly: &[Cx<T>], z: Cx<T>) -> i32 {
    let n = poly.len();
    let mut total = T::zero();
    for k in 0..n {
        let (a, b) = (poly[k] - z, poly[(k + 1) % n] - z);
        total += (b / a).arg();
    }
    (total / T::TAU()).round().to_i32().unwrap_or(0)
}

fn dist_to_polygon<T: Real>(poly: &[Cx<T>], z: Cx<T>) -> T {
    let n = poly.len();
    (0..n)
        .map(|k| dist_to_segment(poly[k], poly[(k + 1) % n], z))
        .fold(T::infinity(), T::min)
}

fn dist_to_segment<T: Real>(a: Cx<T>, b: Cx<T>, z: Cx<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    let s = if len2 > T::zero() {
        (((z - a) * d.conj()).re / len2)
            .max(T::zero())
            .min(T::one())
    } else {
        T::zero()
    };
    (a + d * s - z).norm()
}

fn dist_to_slit<T: Real>(z: Cx<T>) -> T {
    let x = z.re.max(-T::one()).min(T::one());
    (z - cx(x, T::zero())).norm()
}

/// Solves `m (x, y)ᵀ = rhs`.
fn solve2<T: Real>(m: [[Cx<T>; 2]; 2], rhs: [Cx<T>; 2]) -> Option<(Cx<T>, Cx<T>)> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() == T::zero() || !det.norm().is_finite() {
        return None;
    }
    Some((
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ))
}

/// Builds the nested-curve example. `outer` must enclose `[-1, 1]`;
/// `disks` are `(center, radius)` pairs inside `outer`, pairwise disjoint
/// and away from `[-1, 1]`.
///
/// The coefficients are fitted at one probe outside `outer` and one probe
/// between `outer` and the disks; every disk centre plus further points in
/// both regions are then checked against the target values.
pub fn degiorgi_example<T: Real>(
    outer: CurveShape<T>,
    disks: &[(Cx<T>, T)],
) -> Result<DeGiorgiExample<T>, ConstructionError> {
    let poly = polygon(&outer, 1024);
    let orient = winding(&poly, cx(T::zero(), T::zero()));
    if orient == 0 {
        return Err(ConstructionError::Geometry(
            "outer curve does not enclose the origin".into(),
        ));
    }
    for x in [-T::one(), T::zero(), T::one()] {
        let z = cx(x, T::zero());
        if winding(&poly, z) != orient {
            return Err(ConstructionError::Geometry(
                "outer curve does not enclose [-1, 1]".into(),
            ));
        }
    }
    let seg_gap = poly
        .iter()
        .map(|p| dist_to_slit(*p))
        .fold(T::infinity(), T::min);
    if !(seg_gap > T::zero()) {
        return Err(ConstructionError::Geometry(
            "outer curve meets [-1, 1]".into(),
        ));
    }
    for (j, &(c, r)) in disks.iter().enumerate() {
        if !(r > T::zero()) {
            return Err(ConstructionError::Geometry(format!(
                "disk {j} has no interior"
            )));
        }
        if !(dist_to_slit(c) > r) {
            return Err(ConstructionError::Geometry(format!(
                "disk {j} meets [-1, 1]"
            )));
        }
        if winding(&poly, c) != orient || !(dist_to_polygon(&poly, c) > r) {
            return Err(ConstructionError::Geometry(format!(
                "disk {j} is not inside the outer curve"
            )));
        }
        for (i, &(c2, r2)) in disks.iter().enumerate().take(j) {
            if !((c - c2).norm() > r + r2) {
                return Err(ConstructionError::Geometry(format!(
                    "disks {i} and {j} intersect"
                )));
            }
        }
    }

    let outer_curve = CurveDensity::new(outer.clone(), CurveFn::SqrtSlit, orient.signum() as i8)?;
    let mut comps: Vec<(Cx<T>, Component<T>)> =
        vec![(cx(T::one(), T::zero()), Component::Curve(outer_curve))];
    for &(c, r) in disks {
        comps.push((
            cx(-T::one(), T::zero()),
            Component::Curve(CurveDensity::circle(c, r, CurveFn::SqrtSlit)?),
        ));
    }
    let curves = make_measure(comps)?;
    let mu0 = semicircle::<T>();

    let region_of = |z: Cx<T>| -> Option<Region> {
        if winding(&poly, z) == 0 {
            return Some(Region::Outside);
        }
        if dist_to_slit(z) == T::zero() {
            return None;
        }
        match disks.iter().position(|&(c, r)| (z - c).norm() < r) {
            Some(j) => Some(Region::Disk(j)),
            None => Some(Region::Between),
        }
    };
    // clearance of a point from every curve and the slit
    let clearance = |z: Cx<T>| -> T {
        let mut d = dist_to_polygon(&poly, z).min(dist_to_slit(z));
        for &(c, r) in disks {
            d = d.min(((z - c).norm() - r).abs());
        }
        d
    };
    let (xmin, xmax, ymin, ymax) = poly.iter().fold(
        (
            T::infinity(),
            T::neg_infinity(),
            T::infinity(),
            T::neg_infinity(),
        ),
        |(a, b, c, d), p| (a.min(p.re), b.max(p.re), c.min(p.im), d.max(p.im)),
    );
    let m = 41;
    let mut between: Vec<(T, Cx<T>)> = Vec::new();
    for i in 0..m {
        for k in 0..m {
            let z = cx(
                xmin + (xmax - xmin) * T::of_usize(i) / T::of_usize(m - 1),
                ymin + (ymax - ymin) * T::of_usize(k) / T::of_usize(m - 1),
            );
            if region_of(z) == Some(Region::Between) {
                between.push((clearance(z), z));
            }
        }
    }
    between.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    if between.is_empty() {
        return Err(ConstructionError::Geometry(
            "no room between the outer curve and the disks".into(),
        ));
    }
    let size = (xmax - xmin).max(ymax - ymin);
    let centre = cx((xmin + xmax) * T::lit(0.5), (ymin + ymax) * T::lit(0.5));
    let outside: Vec<Cx<T>> = [0.3, 1.7, 3.1, 4.4]
        .iter()
        .map(|&th| centre + Cx::from_polar(size * T::lit(1.5), T::lit(th)))
        .collect();

    let target = |r: Region, z: Cx<T>| match r {
        Region::Between => r2(z),
        _ => r1(z),
    };
    let p_out = outside[0];
    let p_mid = between[0].1;
    let a = [cauchy_direct(&curves, p_out), cauchy_direct(&curves, p_mid)];
    let b = [cauchy_direct(&mu0, p_out), cauchy_direct(&mu0, p_mid)];
    let (kappa, lambda) = solve2(
        [[a[0], b[0]], [a[1], b[1]]],
        [
            target(Region::Outside, p_out),
            target(Region::Between, p_mid),
        ],
    )
    .ok_or_else(|| ConstructionError::NonConvergence("calibration system is singular".into()))?;

    let measure = curves.scaled(kappa).plus(&mu0.scaled(lambda));
    let mut probes: Vec<(Region, Cx<T>, bool)> = vec![
        (Region::Outside, p_out, true),
        (Region::Between, p_mid, true),
    ];
    probes.extend(outside.iter().skip(1).map(|&z| (Region::Outside, z, false)));
    probes.extend(
        between
            .iter()
            .skip(1)
            .step_by(7)
            .take(6)
            .map(|&(_, z)| (Region::Between, z, false)),
    );
    probes.extend(
        disks
            .iter()
            .enumerate()
            .map(|(j, &(c, _))| (Region::Disk(j), c, false)),
    );
    let checks: Vec<RegionCheck<T>> = probes
        .into_iter()
        .map(|(region, z, calibration)| {
            let value = cauchy_direct(&measure, z);
            let t = target(region, z);
            RegionCheck {
                region,
                point: z,
                value,
                target: t,
                residual: (value - t).norm(),
                calibration,
            }
        })
        .collect();
    let max_residual = checks.iter().map(|c| c.residual).fold(T::zero(), T::max);
    Ok(DeGiorgiExample {
        measure,
        curve_coef: kappa,
        interval_coef: lambda,
        checks,
        max_residual,
    })
}
