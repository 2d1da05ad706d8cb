use std::sync::OnceLock;

use num_complex::Complex;

use crate::scalar::{Cx, Real};

const MAX_LEVEL: usize = 8;
const MIN_LEVEL: usize = 2;
const MAX_SPLIT_DEPTH: usize = 6;

/// A sample point handed to the integrand together with its exact distances
/// to the two ends of the interval passed to [`integrate`], also after
/// internal bisection. Near an end, `t` itself may have
/// rounded onto the endpoint while the distance is still resolved.
#[derive(Debug, Clone, Copy)]
pub struct Probe<T> {
    pub t: T,
    pub d_lo: T,
    pub d_hi: T,
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T: Real> {
    pub value: Cx<T>,
    pub error: T,
    pub converged: bool,
    pub evals: usize,
}

impl<T: Real> Integral<T> {
    fn zero() -> Self {
        Integral {
            value: Complex::new(T::zero(), T::zero()),
            error: T::zero(),
            converged: true,
            evals: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        Integral {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
            evals: self.evals + other.evals,
        }
    }
}

/// `(t, 1 - x(t), w(t))` for the positive abscissas introduced at each level.
struct Table {
    levels: Vec<Vec<(f64, f64, f64)>>,
    w0: f64,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        use std::f64::consts::FRAC_PI_2;
        let node = |t: f64| {
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u).exp();
            let comp = 2.0 * e / (1.0 + e);
            let w = FRAC_PI_2 * t.cosh() * comp * (2.0 - comp);
            (t, comp, w)
        };
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        for level in 0..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let step = if level == 0 { 1 } else { 2 };
            let mut pts = Vec::new();
            let mut j = 1usize;
            loop {
                let (t, comp, w) = node(j as f64 * h);
                if comp < 1e-280 || w == 0.0 {
                    break;
                }
                pts.push((t, comp, w));
                j += step;
            }
            levels.push(pts);
        }
        Table {
            levels,
            w0: FRAC_PI_2,
        }
    })
}

fn probes<T: Real>(lo: T, hi: T, off: (T, T), comp: f64) -> (Probe<T>, Probe<T>) {
    let half = (hi - lo) * T::lit(0.5);
    let near = half * T::lit(comp);
    let far = half * T::lit(2.0 - comp);
    (
        Probe {
            t: hi - near,
            d_lo: off.0 + far,
            d_hi: off.1 + near,
        },
        Probe {
            t: lo + near,
            d_lo: off.0 + near,
            d_hi: off.1 + far,
        },
    )
}

/// Adaptive tanh-sinh quadrature of a complex integrand on `[lo, hi]`.
///
/// Endpoint algebraic singularities and near-singular behaviour at the ends
/// are resolved by the double-exponential clustering; place any interior
/// trouble spot at a piece boundary via [`integrate_pieces`]. Convergence is
/// declared when successive levels agree to `tol * max(1, |I|)`; otherwise
/// the interval is bisected a bounded number of times.
pub fn integrate<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Integral<T>
where
    T: Real,
    F: FnMut(Probe<T>) -> Cx<T>,
{
    integrate_rec(&mut f, lo, hi, (T::zero(), T::zero()), tol, 0)
}

/// `off` holds the distances from `lo` back to the outermost left end and
/// from `hi` on to the outermost right end.
fn integrate_rec<T, F>(f: &mut F, lo: T, hi: T, off: (T, T), tol: T, depth: usize) -> Integral<T>
where
    T: Real,
    F: FnMut(Probe<T>) -> Cx<T>,
{
    if !(hi > lo) {
        return Integral::zero();
    }
    let tab = table();
    let half = (hi - lo) * T::lit(0.5);
    let mut evals = 0usize;
    let mut eval = |p: Probe<T>, evals: &mut usize| {
        *evals += 1;
        let v = f(p);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex::new(T::zero(), T::zero())
        }
    };

    let mid = Probe {
        t: lo + half,
        d_lo: off.0 + half,
        d_hi: off.1 + half,
    };
    let mut sum = eval(mid, &mut evals) * T::lit(tab.w0);
    let mut t_cut = [f64::INFINITY; 2];
    {
        let mut tails: [Vec<(f64, T)>; 2] = [Vec::new(), Vec::new()];
        for &(t, comp, w) in &tab.levels[0] {
            let (p, m) = probes(lo, hi, off, comp);
            let a = eval(p, &mut evals) * T::lit(w);
            let b = eval(m, &mut evals) * T::lit(w);
            tails[0].push((t, a.norm()));
            tails[1].push((t, b.norm()));
            sum += a + b;
        }
        let scale = sum.norm().max(T::min_positive_value());
        for side in 0..2 {
            let mut cut = f64::INFINITY;
            for &(t, mag) in tails[side].iter().rev() {
                if mag < scale * T::lit(1e-22) {
                    cut = t;
                } else {
                    break;
                }
            }
            t_cut[side] = cut;
        }
    }
    let mut h = 1.0f64;
    let mut prev = sum * half * T::lit(h);
    let mut err = T::infinity();
    let mut value = prev;
    let mut converged = false;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        for &(t, comp, w) in &tab.levels[level] {
            let (p, m) = probes(lo, hi, off, comp);
            if t < t_cut[0] {
                sum += eval(p, &mut evals) * T::lit(w);
            }
            if t < t_cut[1] {
                sum += eval(m, &mut evals) * T::lit(w);
            }
        }
        value = sum * half * T::lit(h);
        err = (value - prev).norm();
        prev = value;
        if level >= MIN_LEVEL && err <= tol * value.norm().max(T::one()) {
            converged = true;
            break;
        }
    }
    if converged || depth >= MAX_SPLIT_DEPTH {
        return Integral {
            value,
            error: err,
            converged,
            evals,
        };
    }
    let m = lo + half;
    let sub = tol * T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let left = integrate_rec(f, lo, m, (off.0, off.1 + half), sub, depth + 1);
    let right = integrate_rec(f, m, hi, (off.0 + half, off.1), sub, depth + 1);
    let mut out = left.merge(right);
    out.evals += evals;
    out
}

/// Integrates over consecutive pieces `[points[i], points[i+1]]`.
/// `points` must be sorted; zero-length pieces are skipped.
pub fn integrate_pieces<T, F>(mut f: F, points: &[T], tol: T) -> Integral<T>
where
    T: Real,
    F: FnMut(Probe<T>) -> Cx<T>,
{
    let mut out = Integral::zero();
    for w in points.windows(2) {
        if w[1] > w[0] {
            out = out.merge(integrate_rec(
                &mut f,
                w[0],
                w[1],
                (T::zero(), T::zero()),
                tol,
                0,
            ));
        }
    }
    out
}

/// Fixed double-exponential rule on `[lo, hi]` with step `2^-level`.
/// Weights include the interval scaling.
pub fn de_rule<T: Real>(lo: T, hi: T, level: usize) -> Vec<(Probe<T>, T)> {
    let tab = table();
    let level = level.min(MAX_LEVEL);
    let half = (hi - lo) * T::lit(0.5);
    let h = 0.5f64.powi(level as i32);
    let scale = half * T::lit(h);
    let mut out = vec![(
        Probe {
            t: lo + half,
            d_lo: half,
            d_hi: half,
        },
        scale * T::lit(tab.w0),
    )];
    for lv in &tab.levels[..=level] {
        for &(_, comp, w) in lv {
            let (p, m) = probes(lo, hi, (T::zero(), T::zero()), comp);
            out.push((p, scale * T::lit(w)));
            out.push((m, scale * T::lit(w)));
        }
    }
    out.sort_by(|a, b| {
        a.0.t
            .partial_cmp(&b.0.t)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real<F: Fn(f64) -> f64>(f: F) -> impl FnMut(Probe<f64>) -> Cx<f64> {
        move |p| Complex::new(f(p.t), 0.0)
    }

    #[test]
    fn smooth_integrand() {
        let r = integrate(real(|x| x.exp()), 0.0, 1.0, 1e-14);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value.re, std::f64::consts::E - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn endpoint_singularity_uses_exact_distance() {
        // ∫_0^1 d^{-1/2} (1-t)^{-1/2} = π
        let r = integrate(
            |p: Probe<f64>| Complex::new(1.0 / (p.d_lo * p.d_hi).sqrt(), 0.0),
            0.0,
            1.0,
            1e-14,
        );
        assert_abs_diff_eq!(r.value.re, std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn log_singularity() {
        let r = integrate(
            |p: Probe<f64>| Complex::new(p.d_lo.ln(), 0.0),
            0.0,
            1.0,
            1e-14,
        );
        assert_abs_diff_eq!(r.value.re, -1.0, epsilon = 1e-13);
    }

    #[test]
    fn near_singular_endpoint_kernel() {
        // ∫_0^1 dt / (t - i y) = ln((1 - iy)/(-iy))
        let y = 1e-9;
        let r = integrate(
            |p: Probe<f64>| Complex::new(p.d_lo, -y).inv(),
            0.0,
            1.0,
            1e-14,
        );
        let want = (Complex::new(1.0, -y) / Complex::new(0.0, -y)).ln();
        assert!(
            (r.value - want).norm() < 1e-11,
            "{:?} vs {:?}",
            r.value,
            want
        );
    }

    #[test]
    fn fixed_rule_matches_adaptive() {
        let rule = de_rule(-1.0f64, 2.0, 5);
        let s: f64 = rule.iter().map(|(p, w)| w * (p.t * p.t)).sum();
        assert_abs_diff_eq!(s, 3.0, epsilon = 1e-13);
    }
}
