//! Discrete ray test on traced boundaries and synthetic comb polylines.

use crate::scalar::{cx, Cx, Real};

/// Direction in which the domain extends to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opening {
    Left,
    Right,
}

impl Opening {
    pub fn as_str(&self) -> &'static str {
        match self {
            Opening::Left => "left",
            Opening::Right => "right",
        }
    }

    fn sign<T: Real>(&self) -> T {
        match self {
            Opening::Left => -T::one(),
            Opening::Right => T::one(),
        }
    }
}

/// A horizontal ray from `vertex` meeting trace segment `segment` at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation<T> {
    pub vertex: usize,
    pub segment: usize,
    pub at: Cx<T>,
}

#[derive(Debug, Clone)]
pub struct CombCheck<T> {
    pub comb_like: bool,
    pub opening: Option<Opening>,
    /// First blocking segment for every vertex whose ray is blocked.
    pub violations: Vec<Violation<T>>,
    /// Why the opening could not be determined, if it could not.
    pub note: Option<String>,
}

/// Opening read off the two ends of the trace: both end segments must move
/// outwards in the same horizontal direction.
fn detect_opening<T: Real>(trace: &[Cx<T>]) -> Result<Opening, String> {
    let n = trace.len();
    let left = trace[0] - trace[1];
    let right = trace[n - 1] - trace[n - 2];
    let horizontal = |d: Cx<T>| d.im.abs() <= T::lit(1e-6) * d.re.abs();
    if !horizontal(left) || !horizontal(right) {
        return Err("trace ends are not horizontal".into());
    }
    match (left.re < T::zero(), right.re < T::zero()) {
        (true, true) => Ok(Opening::Left),
        (false, false) => Ok(Opening::Right),
        _ => Err("trace ends run in opposite directions".into()),
    }
}

/// For each vertex `w₀` the horizontal ray from `w₀` in the opening
/// direction must not cross the trace again. Segments lying on the ray's
/// line are overlaps, not crossings. With `opening = None` the direction is
/// detected from the ends of the trace.
pub fn comb_check<T: Real>(trace: &[Cx<T>], opening: Option<Opening>) -> CombCheck<T> {
    if trace.len() < 3 {
        return CombCheck {
            comb_like: false,
            opening,
            violations: Vec::new(),
            note: Some("trace needs at least 3 vertices".into()),
        };
    }
    let opening = match opening {
        Some(o) => o,
        None => match detect_opening(trace) {
            Ok(o) => o,
            Err(note) => {
                return CombCheck {
                    comb_like: false,
                    opening: None,
                    violations: Vec::new(),
                    note: Some(note),
                }
            }
        },
    };
    let d: T = opening.sign();
    let scale = trace
        .iter()
        .map(|w| w.norm())
        .fold(T::zero(), T::max)
        .max(T::one());
    let tol = T::lit(1e-9) * scale;
    let mut violations = Vec::new();
    for (k, w0) in trace.iter().enumerate() {
        let y0 = w0.im;
        for j in 0..trace.len() - 1 {
            if j + 1 == k || j == k {
                continue;
            }
            let (p, q) = (trace[j], trace[j + 1]);
            if (p.im > y0) == (q.im > y0) {
                continue;
            }
            let xc = p.re + (y0 - p.im) * (q.re - p.re) / (q.im - p.im);
            if d * (xc - w0.re) > tol {
                violations.push(Violation {
                    vertex: k,
                    segment: j,
                    at: cx(xc, y0),
                });
                break;
            }
        }
    }
    CombCheck {
        comb_like: violations.is_empty(),
        opening: Some(opening),
        violations,
        note: None,
    }
}

/// Horizontal slit of a synthetic comb: at height `y`, protruding `length`
/// from the base into the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot<T> {
    pub y: T,
    pub length: T,
}

fn push_segment<T: Real>(out: &mut Vec<Cx<T>>, to: Cx<T>, step: T) {
    let from = *out.last().expect("polyline has a start");
    let m = ((to - from).norm() / step)
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    for i in 1..=m {
        out.push(from + (to - from) * (T::of_usize(i) / T::of_usize(m)));
    }
}

fn mirror<T: Real>(pts: Vec<Cx<T>>, opening: Opening) -> Vec<Cx<T>> {
    match opening {
        Opening::Left => pts,
        Opening::Right => pts.into_iter().map(|w| cx(-w.re, w.im)).collect(),
    }
}

/// Truncated straight comb `{-height < Im w < 0}` minus horizontal slits,
/// opening to the left (or mirrored), traced bottom ray, base, top ray
/// with vertices at most `step` apart. Without slots this is the strip.
pub fn straight_comb<T: Real>(
    height: T,
    depth: T,
    slots: &[Slot<T>],
    opening: Opening,
    step: T,
) -> Vec<Cx<T>> {
    let mut s: Vec<Slot<T>> = slots.to_vec();
    s.sort_by(|a, b| a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = vec![cx(-depth, -height)];
    push_segment(&mut out, cx(T::zero(), -height), step);
    for sl in &s {
        push_segment(&mut out, cx(T::zero(), sl.y), step);
        push_segment(&mut out, cx(-sl.length, sl.y), step);
        push_segment(&mut out, cx(T::zero(), sl.y), step);
    }
    push_segment(&mut out, cx(T::zero(), T::zero()), step);
    push_segment(&mut out, cx(-depth, T::zero()), step);
    mirror(out, opening)
}

/// The strip with a vertical slit hanging from its top edge at distance
/// `at` from the base, reaching down by `length`; rays from the base above
/// the slit's tip run into it.
pub fn vertical_slot_comb<T: Real>(
    height: T,
    depth: T,
    at: T,
    length: T,
    opening: Opening,
    step: T,
) -> Vec<Cx<T>> {
    let mut out = vec![cx(-depth, -height)];
    push_segment(&mut out, cx(T::zero(), -height), step);
    push_segment(&mut out, cx(T::zero(), T::zero()), step);
    push_segment(&mut out, cx(-at, T::zero()), step);
    push_segment(&mut out, cx(-at, -length), step);
    push_segment(&mut out, cx(-at, T::zero()), step);
    push_segment(&mut out, cx(-depth, T::zero()), step);
    mirror(out, opening)
}
