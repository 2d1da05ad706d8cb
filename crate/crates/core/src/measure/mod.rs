//! Finite complex measures in the plane built from atoms, weighted interval
//! densities, curve densities and area densities.

mod area;
mod curve;
mod interval;
mod nodes;
pub mod spec_file;

use thiserror::Error;

pub use area::{AreaDensity, AreaFn, Grid, Region};
pub use curve::{sqrt_slit, CurveDensity, CurveFn, CurveShape, Excision, ParamRange};
pub use interval::{Family, IntervalDensity};
pub use nodes::{quadrature_nodes, NodeSet};

use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("endpoint exponents must exceed -1 (alpha = {alpha}, beta = {beta})")]
    BadExponent { alpha: f64, beta: f64 },
    #[error("interval [{a}, {b}] has no interior")]
    EmptyInterval { a: f64, b: f64 },
    #[error("curve is not simple at sample resolution")]
    NonSimpleCurve,
    #[error("curve tangent vanishes or curve is degenerate")]
    DegenerateTangent,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("quadrature needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{0}")]
    Invalid(String),
    #[error("measure spec: {0}")]
    Spec(String),
}

/// Point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T: Real> {
    pub location: Cx<T>,
    pub weight: Cx<T>,
}

/// One building block of a measure, before its scalar coefficient.
#[derive(Debug, Clone)]
pub enum Component<T: Real> {
    Atom(Atom<T>),
    Interval(IntervalDensity<T>),
    Curve(CurveDensity<T>),
    Area(AreaDensity<T>),
}

impl<T: Real> Component<T> {
    /// Total variation of the unscaled component.
    pub fn variation(&self) -> T {
        match self {
            Component::Atom(a) => a.weight.norm(),
            Component::Interval(d) => d.variation(),
            Component::Curve(c) => c.variation(),
            Component::Area(a) => a.variation(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Component::Atom(_) => "atom",
            Component::Interval(_) => "interval",
            Component::Curve(_) => "curve",
            Component::Area(_) => "area",
        }
    }
}

impl<T: Real> From<IntervalDensity<T>> for Component<T> {
    fn from(d: IntervalDensity<T>) -> Self {
        Component::Interval(d)
    }
}

impl<T: Real> From<CurveDensity<T>> for Component<T> {
    fn from(d: CurveDensity<T>) -> Self {
        Component::Curve(d)
    }
}

impl<T: Real> From<AreaDensity<T>> for Component<T> {
    fn from(d: AreaDensity<T>) -> Self {
        Component::Area(d)
    }
}

impl<T: Real> From<Atom<T>> for Component<T> {
    fn from(a: Atom<T>) -> Self {
        Component::Atom(a)
    }
}

/// Non-atomic component with its coefficient.
#[derive(Debug, Clone)]
pub struct Part<T: Real> {
    pub coef: Cx<T>,
    pub kind: Continuous<T>,
}

#[derive(Debug, Clone)]
pub enum Continuous<T: Real> {
    Interval(IntervalDensity<T>),
    Curve(CurveDensity<T>),
    Area(AreaDensity<T>),
}

impl<T: Real> Part<T> {
    pub fn variation(&self) -> T {
        self.coef.norm()
            * match &self.kind {
                Continuous::Interval(d) => d.variation(),
                Continuous::Curve(c) => c.variation(),
                Continuous::Area(a) => a.variation(),
            }
    }

    /// Distance from `z` to the closed support of this part.
    pub fn distance(&self, z: Cx<T>) -> T {
        match &self.kind {
            Continuous::Interval(d) => {
                let x = z.re.max(d.a()).min(d.b());
                (z - cx(x, T::zero())).norm()
            }
            Continuous::Curve(c) => c.closest(z).1,
            Continuous::Area(a) => a.region().distance(z),
        }
    }

    fn bbox(&self) -> (T, T, T, T) {
        match &self.kind {
            Continuous::Interval(d) => (d.a(), d.b(), T::zero(), T::zero()),
            Continuous::Curve(c) => {
                let n = 512;
                let mut b = (
                    T::infinity(),
                    T::neg_infinity(),
                    T::infinity(),
                    T::neg_infinity(),
                );
                for k in 0..n {
                    let p = c.shape().point(T::TAU() * T::of_usize(k) / T::of_usize(n));
                    b = (b.0.min(p.re), b.1.max(p.re), b.2.min(p.im), b.3.max(p.im));
                }
                b
            }
            Continuous::Area(a) => a.region().bbox(),
        }
    }

    fn mass(&self) -> Cx<T> {
        self.coef
            * match &self.kind {
                Continuous::Interval(d) => cx(d.mass(), T::zero()),
                Continuous::Curve(c) => c.integral(),
                Continuous::Area(a) => {
                    let (x0, x1, y0, y1) = a.region().bbox();
                    let c = cx((x0 + x1) * T::lit(0.5), (y0 + y1) * T::lit(0.5));
                    a.polar_integral(
                        c,
                        T::zero(),
                        T::infinity(),
                        |_, rho, _| cx(rho, T::zero()),
                        T::lit(area::POLAR_TOL),
                    )
                }
            }
    }

    fn is_positive(&self) -> bool {
        let coef_ok = self.coef.im == T::zero() && self.coef.re >= T::zero();
        coef_ok
            && match &self.kind {
                Continuous::Interval(d) => d.is_nonnegative(),
                // dζ is never a positive measure on a closed curve
                Continuous::Curve(_) => false,
                Continuous::Area(a) => match a.density_fn() {
                    AreaFn::Constant(c) => c.im == T::zero() && c.re >= T::zero(),
                    AreaFn::Grid(g) => g
                        .values
                        .iter()
                        .all(|v| v.im == T::zero() && v.re >= T::zero()),
                    AreaFn::Custom(_) => {
                        let (x0, x1, y0, y1) = a.region().bbox();
                        (0..=32).all(|i| {
                            (0..=32).all(|j| {
                                let w = cx(
                                    x0 + (x1 - x0) * T::of_usize(i) / T::lit(32.0),
                                    y0 + (y1 - y0) * T::of_usize(j) / T::lit(32.0),
                                );
                                let v = a.eval(w);
                                v.im == T::zero() && v.re >= T::zero()
                            })
                        })
                    }
                },
            }
    }
}

/// A finite complex measure: merged atoms plus scaled continuous parts.
#[derive(Debug, Clone)]
pub struct ComplexMeasure<T: Real> {
    atoms: Vec<Atom<T>>,
    parts: Vec<Part<T>>,
    total_variation: T,
}

/// Builds a measure from `(coefficient, component)` pairs.
///
/// Coincident atoms are merged by adding weights and atoms whose merged
/// weight vanishes are dropped.
pub fn make_measure<T: Real>(
    components: impl IntoIterator<Item = (Cx<T>, Component<T>)>,
) -> Result<ComplexMeasure<T>, MeasureError> {
    let mut atoms: Vec<Atom<T>> = Vec::new();
    let mut parts = Vec::new();
    for (coef, comp) in components {
        if !(coef.re.is_finite() && coef.im.is_finite()) {
            return Err(MeasureError::NonFinite("coefficient".into()));
        }
        match comp {
            Component::Atom(a) => {
                if !(a.location.re.is_finite()
                    && a.location.im.is_finite()
                    && a.weight.re.is_finite()
                    && a.weight.im.is_finite())
                {
                    return Err(MeasureError::NonFinite("atom".into()));
                }
                let w = a.weight * coef;
                match atoms.iter_mut().find(|b| b.location == a.location) {
                    Some(b) => b.weight += w,
                    None => atoms.push(Atom {
                        location: a.location,
                        weight: w,
                    }),
                }
            }
            Component::Interval(d) => parts.push(Part {
                coef,
                kind: Continuous::Interval(d),
            }),
            Component::Curve(c) => parts.push(Part {
                coef,
                kind: Continuous::Curve(c),
            }),
            Component::Area(a) => parts.push(Part {
                coef,
                kind: Continuous::Area(a),
            }),
        }
    }
    atoms.retain(|a| a.weight != cx(T::zero(), T::zero()));
    let total_variation = atoms.iter().map(|a| a.weight.norm()).sum::<T>()
        + parts.iter().map(Part::variation).sum::<T>();
    Ok(ComplexMeasure {
        atoms,
        parts,
        total_variation,
    })
}

/// `‖μ‖`, the total variation.
pub fn total_variation<T: Real>(mu: &ComplexMeasure<T>) -> T {
    mu.total_variation()
}

impl<T: Real> ComplexMeasure<T> {
    /// Single component with unit coefficient.
    pub fn single(c: impl Into<Component<T>>) -> Result<Self, MeasureError> {
        make_measure([(cx(T::one(), T::zero()), c.into())])
    }

    /// Measure consisting of point masses.
    pub fn atoms(points: &[(Cx<T>, Cx<T>)]) -> Result<Self, MeasureError> {
        make_measure(points.iter().map(|&(location, weight)| {
            (
                cx(T::one(), T::zero()),
                Component::Atom(Atom { location, weight }),
            )
        }))
    }

    pub fn atom_list(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn parts(&self) -> &[Part<T>] {
        &self.parts
    }

    pub fn total_variation(&self) -> T {
        self.total_variation
    }

    /// No atoms with nonzero weight.
    pub fn is_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| a.weight.im == T::zero() && a.weight.re > T::zero())
            && self.parts.iter().all(Part::is_positive)
    }

    /// Every component lies on the real axis.
    pub fn is_on_real_line(&self) -> bool {
        self.atoms.iter().all(|a| a.location.im == T::zero())
            && self
                .parts
                .iter()
                .all(|p| matches!(p.kind, Continuous::Interval(_)))
    }

    /// `μ(ℂ)`.
    pub fn mass(&self) -> Cx<T> {
        self.atoms
            .iter()
            .map(|a| a.weight)
            .fold(cx(T::zero(), T::zero()), |a, b| a + b)
            + self
                .parts
                .iter()
                .map(Part::mass)
                .fold(cx(T::zero(), T::zero()), |a, b| a + b)
    }

    /// `c μ`.
    pub fn scaled(&self, c: Cx<T>) -> Self {
        ComplexMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location,
                    weight: a.weight * c,
                })
                .filter(|a| a.weight != cx(T::zero(), T::zero()))
                .collect(),
            parts: self
                .parts
                .iter()
                .map(|p| Part {
                    coef: p.coef * c,
                    kind: p.kind.clone(),
                })
                .collect(),
            total_variation: self.total_variation * c.norm(),
        }
    }

    /// `μ + ν`.
    pub fn plus(&self, other: &Self) -> Self {
        let mut comps: Vec<(Cx<T>, Component<T>)> = Vec::new();
        for m in [self, other] {
            for a in &m.atoms {
                comps.push((cx(T::one(), T::zero()), Component::Atom(*a)));
            }
            for p in &m.parts {
                let c = match &p.kind {
                    Continuous::Interval(d) => Component::Interval(d.clone()),
                    Continuous::Curve(c) => Component::Curve(c.clone()),
                    Continuous::Area(a) => Component::Area(a.clone()),
                };
                comps.push((p.coef, c));
            }
        }
        make_measure(comps).expect("sum of valid measures is valid")
    }

    /// `(x0, x1, y0, y1)` bounding box of the support.
    pub fn bbox(&self) -> (T, T, T, T) {
        let mut b = (
            T::infinity(),
            T::neg_infinity(),
            T::infinity(),
            T::neg_infinity(),
        );
        for a in &self.atoms {
            b = (
                b.0.min(a.location.re),
                b.1.max(a.location.re),
                b.2.min(a.location.im),
                b.3.max(a.location.im),
            );
        }
        for p in &self.parts {
            let q = p.bbox();
            b = (b.0.min(q.0), b.1.max(q.1), b.2.min(q.2), b.3.max(q.3));
        }
        b
    }

    /// Diameter of the support's bounding box.
    pub fn diameter(&self) -> T {
        let (x0, x1, y0, y1) = self.bbox();
        if !(x1 >= x0) {
            return T::zero();
        }
        (x1 - x0).hypot(y1 - y0)
    }

    /// Centre of the bounding box.
    pub fn center(&self) -> Cx<T> {
        let (x0, x1, y0, y1) = self.bbox();
        cx((x0 + x1) * T::lit(0.5), (y0 + y1) * T::lit(0.5))
    }

    /// Distance from `z` to the support.
    pub fn distance(&self, z: Cx<T>) -> T {
        self.atoms
            .iter()
            .map(|a| (a.location - z).norm())
            .chain(self.parts.iter().map(|p| p.distance(z)))
            .fold(T::infinity(), T::min)
    }

    /// Quadrature discretisation: every atom plus `n` nodes per continuous
    /// part, weights already multiplied by the coefficients.
    pub fn discretize(&self, n: usize) -> Result<NodeSet<T>, MeasureError> {
        let mut out = NodeSet::default();
        for a in &self.atoms {
            out.nodes.push(a.location);
            out.weights.push(a.weight);
        }
        for p in &self.parts {
            let comp = match &p.kind {
                Continuous::Interval(d) => Component::Interval(d.clone()),
                Continuous::Curve(c) => Component::Curve(c.clone()),
                Continuous::Area(a) => Component::Area(a.clone()),
            };
            let ns = quadrature_nodes(&comp, n)?;
            out.nodes.extend(ns.nodes);
            out.weights
                .extend(ns.weights.into_iter().map(|w| w * p.coef));
            out.warnings.extend(ns.warnings);
        }
        Ok(out)
    }
}
