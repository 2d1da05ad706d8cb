use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`, stored in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

type Key = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Legendre rule with `n` points on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss rule for the weight `(1 + x)^left * (1 - x)^right` on `[-1, 1]`.
///
/// Chebyshev weights (both exponents `-1/2` or both `+1/2`) use closed forms;
/// everything else goes through Golub-Welsch on the Jacobi matrix. Rules are
/// cached per `(n, left, right)`.
pub fn gauss_jacobi(n: usize, left: f64, right: f64) -> Arc<Rule> {
    assert!(n >= 1, "quadrature rule needs at least one node");
    assert!(
        left > -1.0 && right > -1.0,
        "Jacobi exponents must exceed -1"
    );
    let key = (n, left.to_bits(), right.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(build(n, left, right));
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

fn build(n: usize, left: f64, right: f64) -> Rule {
    use std::f64::consts::PI;
    if left == -0.5 && right == -0.5 {
        let nodes = (0..n)
            .map(|k| (PI * (2 * (n - k) - 1) as f64 / (2 * n) as f64).cos())
            .collect();
        return Rule {
            nodes,
            weights: vec![PI / n as f64; n],
        };
    }
    if left == 0.5 && right == 0.5 {
        let m = (n + 1) as f64;
        let (mut nodes, mut weights) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for k in (1..=n).rev() {
            let th = k as f64 * PI / m;
            nodes.push(th.cos());
            weights.push(PI / m * th.sin().powi(2));
        }
        return Rule { nodes, weights };
    }
    golub_welsch(n, right, left)
}

/// Golub-Welsch for the classical Jacobi weight `(1 - x)^a (1 + x)^b`.
fn golub_welsch(n: usize, a: f64, b: f64) -> Rule {
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
    }
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        off[k] = if k == 1 {
            (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
        } else {
            (4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        };
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first);
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Rule { nodes, weights }
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking only the first
/// row of the eigenvector matrix. `off[i]` couples rows `i - 1` and `i`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(8);
        let m: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert_abs_diff_eq!(m, 2.0 / 15.0, epsilon = 1e-14);
        let s: f64 = r.weights.iter().sum();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn chebyshev_closed_forms_match_golub_welsch() {
        for &(l, r) in &[(-0.5, -0.5), (0.5, 0.5)] {
            let closed = gauss_jacobi(12, l, r);
            let gw = golub_welsch(12, r, l);
            for (x, y) in closed.nodes.iter().zip(&gw.nodes) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-13);
            }
            for (x, y) in closed.weights.iter().zip(&gw.weights) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_moments() {
        // ∫ (1+x)^{-1/3} (1-x)^{0.7} x^2 dx, oracle by tanh-sinh with exact
        // endpoint distances.
        let r = gauss_jacobi(20, -1.0 / 3.0, 0.7);
        let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        let want = crate::quadrature::integrate(
            |p: crate::quadrature::Probe<f64>| {
                let v = p.d_lo.powf(-1.0 / 3.0) * p.d_hi.powf(0.7) * p.t * p.t;
                num_complex::Complex::new(v, 0.0)
            },
            -1.0,
            1.0,
            1e-15,
        );
        assert_abs_diff_eq!(got, want.value.re, epsilon = 1e-13);
    }

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-13);
    }
}
