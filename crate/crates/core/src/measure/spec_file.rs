//! JSON measure spec files.
//!
//! ```json
//! {"components": [
//!   {"coef": [1, 0], "kind": "interval", "a": -1, "b": 1, "family": "arcsine"},
//!   {"coef": [0, -0.3183098861837907], "kind": "curve", "shape": "circle",
//!    "center": [0, 0], "radius": 1, "density": "one"}
//! ]}
//! ```
//!
//! Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    make_measure, AreaDensity, AreaFn, Atom, ComplexMeasure, Component, Continuous, CurveDensity,
    CurveFn, CurveShape, Family, Grid, IntervalDensity, MeasureError, Region,
};
use crate::scalar::cx;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub components: Vec<RawComponent>,
    /// `"fail"` marks a negative control whose verification is expected to fail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawComponent {
    pub coef: [f64; 2],
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<(i32, f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RawRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum RawRegion {
    Disk { center: [f64; 2], radius: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

fn spec_err(msg: impl Into<String>) -> MeasureError {
    MeasureError::Spec(msg.into())
}

impl RawComponent {
    fn only(&self, allowed: &[&str]) -> Result<(), MeasureError> {
        let present: [(&str, bool); 14] = [
            ("at", self.at.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("family", self.family.is_some()),
            ("params", self.params.is_some()),
            ("shape", self.shape.is_some()),
            ("center", self.center.is_some()),
            ("radius", self.radius.is_some()),
            ("terms", self.terms.is_some()),
            ("density", self.density.is_some()),
            ("orientation", self.orientation.is_some()),
            ("region", self.region.is_some()),
            ("grid", self.grid.is_some()),
            ("constant", self.constant.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return Err(spec_err(format!(
                    "key \"{key}\" not allowed for kind \"{}\"",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn build(&self, base: &Path) -> Result<Component<f64>, MeasureError> {
        match self.kind.as_str() {
            "atom" => {
                self.only(&["at"])?;
                let at = self.at.ok_or_else(|| spec_err("atom needs \"at\""))?;
                Ok(Component::Atom(Atom {
                    location: cx(at[0], at[1]),
                    weight: cx(1.0, 0.0),
                }))
            }
            "interval" => {
                self.only(&["a", "b", "family", "params"])?;
                let a = self.a.ok_or_else(|| spec_err("interval needs \"a\""))?;
                let b = self.b.ok_or_else(|| spec_err("interval needs \"b\""))?;
                let fam = self
                    .family
                    .as_deref()
                    .ok_or_else(|| spec_err("interval needs \"family\""))?;
                let p = self.params.clone().unwrap_or_default();
                let need = |v: Option<f64>, k: &str| {
                    v.ok_or_else(|| spec_err(format!("family {fam} needs params.{k}")))
                };
                let family = match fam {
                    "arcsine" => Family::Arcsine,
                    "semicircle" => Family::Semicircle,
                    "uniform" => Family::Uniform,
                    "jacobi" => Family::Jacobi {
                        alpha: need(p.alpha, "alpha")?,
                        beta: need(p.beta, "beta")?,
                        poly: p.poly.clone().unwrap_or_else(|| vec![1.0]),
                    },
                    "tabulated" => Family::Tabulated {
                        alpha: p.alpha.unwrap_or(0.0),
                        beta: p.beta.unwrap_or(0.0),
                        values: p
                            .values
                            .clone()
                            .ok_or_else(|| spec_err("tabulated needs params.values"))?,
                    },
                    "equilibrium" => Family::Equilibrium {
                        roots: p.roots.clone().unwrap_or_default(),
                        outer: p.outer.clone().unwrap_or_default(),
                        scale: need(p.scale, "scale")?,
                    },
                    other => return Err(spec_err(format!("unknown interval family \"{other}\""))),
                };
                Ok(Component::Interval(IntervalDensity::new(a, b, family)?))
            }
            "curve" => {
                self.only(&[
                    "shape",
                    "center",
                    "radius",
                    "terms",
                    "density",
                    "orientation",
                ])?;
                let shape = match self.shape.as_deref() {
                    Some("circle") => CurveShape::Circle {
                        center: self
                            .center
                            .map(|c| cx(c[0], c[1]))
                            .ok_or_else(|| spec_err("circle needs \"center\""))?,
                        radius: self
                            .radius
                            .ok_or_else(|| spec_err("circle needs \"radius\""))?,
                    },
                    Some("fourier") => CurveShape::Fourier {
                        terms: self
                            .terms
                            .as_ref()
                            .ok_or_else(|| spec_err("fourier curve needs \"terms\""))?
                            .iter()
                            .map(|&(k, re, im)| (k, cx(re, im)))
                            .collect(),
                    },
                    Some(other) => {
                        return Err(spec_err(format!("unknown curve shape \"{other}\"")))
                    }
                    None => return Err(spec_err("curve needs \"shape\"")),
                };
                let density = match &self.density {
                    None => CurveFn::Constant(cx(1.0, 0.0)),
                    Some(Value::String(s)) => match s.as_str() {
                        "one" => CurveFn::Constant(cx(1.0, 0.0)),
                        "z" => CurveFn::Identity,
                        "sqrt_slit" => CurveFn::SqrtSlit,
                        other => {
                            return Err(spec_err(format!("unknown curve density \"{other}\"")))
                        }
                    },
                    Some(Value::Object(m)) if m.len() == 1 && m.contains_key("constant") => {
                        let c: [f64; 2] = serde_json::from_value(m["constant"].clone())
                            .map_err(|e| spec_err(format!("curve density constant: {e}")))?;
                        CurveFn::Constant(cx(c[0], c[1]))
                    }
                    Some(other) => return Err(spec_err(format!("bad curve density {other}"))),
                };
                Ok(Component::Curve(CurveDensity::new(
                    shape,
                    density,
                    self.orientation.unwrap_or(1),
                )?))
            }
            "area" => {
                self.only(&["region", "grid", "constant"])?;
                let region = match self
                    .region
                    .as_ref()
                    .ok_or_else(|| spec_err("area needs \"region\""))?
                {
                    RawRegion::Disk { center, radius } => Region::Disk {
                        center: cx(center[0], center[1]),
                        radius: *radius,
                    },
                    RawRegion::Rect { x0, x1, y0, y1 } => Region::Rect {
                        x0: *x0,
                        x1: *x1,
                        y0: *y0,
                        y1: *y1,
                    },
                };
                let density = match (&self.grid, self.constant) {
                    (Some(path), None) => AreaFn::Grid(read_grid(&resolve(base, path))?),
                    (None, Some(c)) => AreaFn::Constant(cx(c[0], c[1])),
                    (None, None) => return Err(spec_err("area needs \"grid\" or \"constant\"")),
                    (Some(_), Some(_)) => {
                        return Err(spec_err("area takes only one of \"grid\" and \"constant\""))
                    }
                };
                Ok(Component::Area(AreaDensity::new(region, density)?))
            }
            other => Err(spec_err(format!("unknown component kind \"{other}\""))),
        }
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Reads a density grid: one CSV row per `y` sample (ascending), one column
/// per `x` sample.
pub fn read_grid(path: &Path) -> Result<Grid<f64>, MeasureError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| spec_err(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| spec_err(format!("{}:{}: {e}", path.display(), ln + 1)))?;
        rows.push(row);
    }
    let ny = rows.len();
    let nx = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nx) {
        return Err(spec_err(format!("{}: ragged grid", path.display())));
    }
    Ok(Grid {
        nx,
        ny,
        values: rows.into_iter().flatten().map(|v| cx(v, 0.0)).collect(),
    })
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, MeasureError> {
        serde_json::from_str(text).map_err(|e| spec_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, MeasureError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| spec_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn expects_failure(&self) -> bool {
        self.expect.as_deref() == Some("fail")
    }

    /// Builds the measure; relative grid paths resolve against `base`.
    pub fn to_measure(&self, base: &Path) -> Result<ComplexMeasure<f64>, MeasureError> {
        if let Some(e) = &self.expect {
            if e != "fail" && e != "pass" {
                return Err(spec_err(format!(
                    "\"expect\" must be \"pass\" or \"fail\", got \"{e}\""
                )));
            }
        }
        let comps = self
            .components
            .iter()
            .map(|c| Ok((cx(c.coef[0], c.coef[1]), c.build(base)?)))
            .collect::<Result<Vec<_>, MeasureError>>()?;
        make_measure(comps)
    }

    /// Serialises a measure. Custom closures and gridded areas cannot be
    /// written back and are rejected.
    pub fn from_measure(mu: &ComplexMeasure<f64>) -> Result<Self, MeasureError> {
        let mut components = Vec::new();
        for a in mu.atom_list() {
            components.push(RawComponent {
                coef: [a.weight.re, a.weight.im],
                kind: "atom".into(),
                at: Some([a.location.re, a.location.im]),
                ..Default::default()
            });
        }
        for p in mu.parts() {
            let coef = [p.coef.re, p.coef.im];
            let raw = match &p.kind {
                Continuous::Interval(d) => {
                    let params = match d.family() {
                        Family::Arcsine | Family::Semicircle | Family::Uniform => None,
                        Family::Jacobi { alpha, beta, poly } => Some(Params {
                            alpha: Some(*alpha),
                            beta: Some(*beta),
                            poly: Some(poly.clone()),
                            ..Default::default()
                        }),
                        Family::Tabulated {
                            alpha,
                            beta,
                            values,
                        } => Some(Params {
                            alpha: Some(*alpha),
                            beta: Some(*beta),
                            values: Some(values.clone()),
                            ..Default::default()
                        }),
                        Family::Equilibrium {
                            roots,
                            outer,
                            scale,
                        } => Some(Params {
                            roots: Some(roots.clone()),
                            outer: Some(outer.clone()),
                            scale: Some(*scale),
                            ..Default::default()
                        }),
                    };
                    RawComponent {
                        coef,
                        kind: "interval".into(),
                        a: Some(d.a()),
                        b: Some(d.b()),
                        family: Some(d.family().name().into()),
                        params,
                        ..Default::default()
                    }
                }
                Continuous::Curve(c) => {
                    let density = match c.density_fn() {
                        CurveFn::Constant(v) if *v == cx(1.0, 0.0) => json!("one"),
                        CurveFn::Constant(v) => json!({"constant": [v.re, v.im]}),
                        CurveFn::Identity => json!("z"),
                        CurveFn::SqrtSlit => json!("sqrt_slit"),
                        CurveFn::Custom(_) => {
                            return Err(spec_err("custom curve density is not serialisable"))
                        }
                    };
                    let mut raw = RawComponent {
                        coef,
                        kind: "curve".into(),
                        density: Some(density),
                        orientation: (c.orientation() != 1).then_some(c.orientation()),
                        ..Default::default()
                    };
                    match c.shape() {
                        CurveShape::Circle { center, radius } => {
                            raw.shape = Some("circle".into());
                            raw.center = Some([center.re, center.im]);
                            raw.radius = Some(*radius);
                        }
                        CurveShape::Fourier { terms } => {
                            raw.shape = Some("fourier".into());
                            raw.terms = Some(terms.iter().map(|(k, c)| (*k, c.re, c.im)).collect());
                        }
                    }
                    raw
                }
                Continuous::Area(a) => {
                    let constant = match a.density_fn() {
                        AreaFn::Constant(v) => [v.re, v.im],
                        _ => return Err(spec_err("only constant area densities are serialisable")),
                    };
                    let region = match a.region() {
                        Region::Disk { center, radius } => RawRegion::Disk {
                            center: [center.re, center.im],
                            radius: *radius,
                        },
                        Region::Rect { x0, x1, y0, y1 } => RawRegion::Rect {
                            x0: *x0,
                            x1: *x1,
                            y0: *y0,
                            y1: *y1,
                        },
                    };
                    RawComponent {
                        coef,
                        kind: "area".into(),
                        region: Some(region),
                        constant: Some(constant),
                        ..Default::default()
                    }
                }
            };
            components.push(raw);
        }
        Ok(SpecFile {
            components,
            expect: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec file serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parses_arcsine_and_circle() {
        let text = r#"{"components": [
            {"coef": [1, 0], "kind": "interval", "a": -1, "b": 1, "family": "arcsine"},
            {"coef": [0, -0.3183098861837907], "kind": "curve", "shape": "circle",
             "center": [0, 0], "radius": 1, "density": "one"}
        ]}"#;
        let mu = SpecFile::parse(text)
            .unwrap()
            .to_measure(Path::new("."))
            .unwrap();
        assert_eq!(mu.parts().len(), 2);
        assert_abs_diff_eq!(mu.total_variation(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_unknown_keys() {
        let top = r#"{"components": [], "extra": 1}"#;
        assert!(SpecFile::parse(top).is_err());
        let inner =
            r#"{"components": [{"coef": [1,0], "kind": "atom", "at": [0,0], "colour": "red"}]}"#;
        assert!(SpecFile::parse(inner).is_err());
        let params = r#"{"components": [{"coef": [1,0], "kind": "interval", "a": 0, "b": 1,
            "family": "jacobi", "params": {"alpha": 0, "beta": 0, "gamma": 2}}]}"#;
        assert!(SpecFile::parse(params).is_err());
        let misplaced =
            r#"{"components": [{"coef": [1,0], "kind": "atom", "at": [0,0], "radius": 2}]}"#;
        let spec = SpecFile::parse(misplaced).unwrap();
        assert!(spec.to_measure(Path::new(".")).is_err());
    }

    #[test]
    fn rejects_bad_exponent() {
        let text = r#"{"components": [{"coef": [1,0], "kind": "interval", "a": 0, "b": 1,
            "family": "jacobi", "params": {"alpha": -1.0, "beta": 0}}]}"#;
        let err = SpecFile::parse(text)
            .unwrap()
            .to_measure(Path::new("."))
            .unwrap_err();
        assert!(matches!(err, MeasureError::BadExponent { .. }));
    }

    #[test]
    fn grid_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.csv"), "1,1,1\n1,1,1\n").unwrap();
        let text = r#"{"components": [{"coef": [1,0], "kind": "area",
            "region": {"rect": {"x0": 0, "x1": 2, "y0": 0, "y1": 1}}, "grid": "g.csv"}]}"#;
        let mu = SpecFile::parse(text)
            .unwrap()
            .to_measure(dir.path())
            .unwrap();
        assert_abs_diff_eq!(mu.total_variation(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn serialise_then_parse() {
        let mu = make_measure([
            (
                cx(0.5, 0.0),
                Component::Interval(IntervalDensity::arcsine(-1.0, 1.0).unwrap()),
            ),
            (
                cx(2.0, 1.0),
                Component::Atom(Atom {
                    location: cx(3.0, 1.0),
                    weight: cx(1.0, 0.0),
                }),
            ),
        ])
        .unwrap();
        let spec = SpecFile::from_measure(&mu).unwrap();
        let back = SpecFile::parse(&spec.to_json())
            .unwrap()
            .to_measure(Path::new("."))
            .unwrap();
        assert_abs_diff_eq!(
            back.total_variation(),
            mu.total_variation(),
            epsilon = 1e-14
        );
    }
}
