use std::f64::consts::PI;

use approx::assert_abs_diff_eq;

use super::*;
use crate::constructions::{cantor_intervals, greens_function, harmonic_measure};
use crate::measure::{sqrt_slit, IntervalDensity};

fn c(re: f64, im: f64) -> Cx<f64> {
    cx(re, im)
}

fn arcsine() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::arcsine(-1.0, 1.0).unwrap()).unwrap()
}

fn uniform() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::uniform(-1.0, 1.0).unwrap()).unwrap()
}

/// Boundary value of `-log(z + sqrt(z² - 1))` from above.
fn arcsine_f(x: f64) -> Cx<f64> {
    if x > 1.0 {
        c(-(x + (x * x - 1.0).sqrt()).ln(), 0.0)
    } else if x >= -1.0 {
        c(0.0, -x.acos())
    } else {
        c(-(-x + (x * x - 1.0).sqrt()).ln(), -PI)
    }
}

/// Boundary value for the uniform density on `[-1, 1]`, from
/// `∫ log|x - t| dt / 2 = ((x + 1) log|x + 1| - (x - 1) log|x - 1|) / 2 - 1`.
fn uniform_f(x: f64) -> Cx<f64> {
    let xlx = |t: f64| if t == 0.0 { 0.0 } else { t * t.abs().ln() };
    let u = |x: f64| (xlx(x + 1.0) - xlx(x - 1.0)) / 2.0 - 1.0;
    let right = ((1.0 - x) / 2.0).clamp(0.0, 1.0);
    c(u(1.0) - u(x), -PI * right)
}

#[test]
fn arcsine_trace_is_the_strip() {
    let mu = arcsine();
    let grid = default_grid(&mu, 200).unwrap();
    let tr = boundary_trace(&mu, &grid).unwrap();
    assert!(tr.flagged.is_empty());
    for (x, f) in tr.x.iter().zip(&tr.f) {
        assert_abs_diff_eq!((f - arcsine_f(*x)).norm(), 0.0, epsilon = 1e-9);
    }
    assert_abs_diff_eq!(tr.height(), PI, epsilon = 1e-9);
    assert!(tr.im_monotone(1e-12));
    let f1 = conformal_f(&mu, c(1.0, 0.0), None).unwrap();
    let fm1 = conformal_f(&mu, c(-1.0, 0.0), None).unwrap();
    assert_abs_diff_eq!((f1 - fm1).norm(), PI, epsilon = 1e-9);
    let cls = classify(&tr.fprime, 1e-3);
    for (x, k) in tr.x.iter().zip(&cls) {
        let want = if x.abs() < 1.0 {
            Tangent::Vertical
        } else {
            Tangent::Horizontal
        };
        assert_eq!(*k, want, "{x}");
    }
}

#[test]
fn arcsine_report() {
    let rep = comb_report(&arcsine(), 200, 1e-3).unwrap();
    assert!(rep.comb.comb_like);
    assert_eq!(rep.comb.opening, Some(Opening::Left));
    assert!(rep.vh_fractions.2 < 0.01);
    assert_abs_diff_eq!(
        rep.vh_fractions.0 + rep.vh_fractions.1 + rep.vh_fractions.2,
        1.0,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(rep.strip_height, PI * rep.mass, epsilon = 1e-6);
    assert!(rep.rect_length >= rep.strip_height);
    assert_eq!(rep.rectifiability, Rectifiability::AtResolution);
    assert!(rep.im_monotone);
    let csv = rep.to_csv();
    assert!(csv.starts_with("x,ReF,ImF,ReF',ImF',class\n"));
    assert_eq!(csv.lines().count(), 201);
    assert_eq!(rep.summary_json()["opening"], "left");
}

#[test]
fn uniform_trace_is_not_vh() {
    let mu = uniform();
    let rep = comb_report(&mu, 200, 1e-3).unwrap();
    assert!(rep.vh_fractions.2 > 0.5, "{:?}", rep.vh_fractions);
    assert!(rep.im_monotone);
    assert_abs_diff_eq!(rep.strip_height, PI, epsilon = 1e-6);
    let tr = &rep.trace;
    for k in (0..tr.x.len()).step_by(17) {
        assert_abs_diff_eq!((tr.f[k] - uniform_f(tr.x[k])).norm(), 0.0, epsilon = 1e-9);
    }
}

#[test]
fn two_interval_trace_has_one_slot() {
    let h = harmonic_measure::<f64>(&[(-1.0, -0.3), (0.3, 1.0)]).unwrap();
    let rep = comb_report(h.measure(), 400, 1e-3).unwrap();
    assert!(rep.vh_fractions.2 < 0.01, "{:?}", rep.vh_fractions);
    assert!(rep.comb.comb_like, "{:?}", rep.comb.violations.first());
    assert_abs_diff_eq!(rep.strip_height, PI, epsilon = 1e-6);
    let tr = &rep.trace;
    let gap: Vec<usize> = (0..tr.x.len()).filter(|&k| tr.x[k].abs() < 0.3).collect();
    let y = tr.f[gap[0]].im;
    assert_abs_diff_eq!(y, -PI / 2.0, epsilon = 1e-9);
    for &k in &gap {
        assert_abs_diff_eq!(tr.f[k].im, y, epsilon = 1e-12);
    }
    // out along the slot and back: the deepest point sits at the gap root
    let deepest = gap
        .iter()
        .copied()
        .min_by(|&i, &j| tr.f[i].re.partial_cmp(&tr.f[j].re).unwrap())
        .unwrap();
    assert!(tr.x[deepest].abs() < 0.01);
    let ends = [
        conformal_f(h.measure(), c(-0.3, 0.0), None).unwrap(),
        conformal_f(h.measure(), c(0.3, 0.0), None).unwrap(),
    ];
    assert_abs_diff_eq!(ends[0].re, ends[1].re, epsilon = 1e-9);
    assert!(tr.f[deepest].re < ends[0].re - 0.1);
}

#[test]
fn im_f_is_monotone_for_positive_measures() {
    let h = harmonic_measure::<f64>(&[(-2.0, -1.2), (-0.4, 0.1), (0.5, 3.0)]).unwrap();
    let semi = ComplexMeasure::single(IntervalDensity::semicircle(-1.0, 2.0).unwrap()).unwrap();
    for mu in [arcsine(), uniform(), semi, h.measure().clone()] {
        let tr = boundary_trace(&mu, &default_grid(&mu, 120).unwrap()).unwrap();
        assert!(tr.im_monotone(1e-12));
        assert_abs_diff_eq!(tr.height(), PI * mu.mass().re, epsilon = 1e-8);
    }
}

#[test]
fn path_independence() {
    for mu in [arcsine(), uniform()] {
        for z in [c(0.3, 0.4), c(-2.0, 0.1), c(1.5, 2.0)] {
            let a = conformal_f(&mu, z, Some(0.7)).unwrap();
            let b = conformal_f(&mu, z, Some(3.0)).unwrap();
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-9);
        }
    }
    let z = c(0.3, 0.4);
    let f = conformal_f(&arcsine(), z, None).unwrap();
    assert_abs_diff_eq!((f + (z + sqrt_slit(z)).ln()).norm(), 0.0, epsilon = 1e-9);
    assert!(conformal_f(&arcsine(), c(0.0, -1.0), None).is_err());
}

#[test]
fn rejects_unsuitable_measures() {
    let atom = ComplexMeasure::atoms(&[(c(0.0, 0.0), c(1.0, 0.0))]).unwrap();
    assert!(boundary_trace(&atom, &[0.0, 1.0]).is_err());
    let neg = arcsine().scaled(c(-1.0, 0.0));
    assert!(boundary_trace(&neg, &[0.0, 1.0]).is_err());
    assert!(boundary_trace(&arcsine(), &[1.0, 0.0]).is_err());
}

#[test]
fn synthetic_combs() {
    for o in [Opening::Left, Opening::Right] {
        let strip = straight_comb(PI, 5.0, &[], o, 0.05);
        let r = comb_check(&strip, None);
        assert!(r.comb_like);
        assert_eq!(r.opening, Some(o));
        let slots = [
            Slot {
                y: -0.5,
                length: 2.0,
            },
            Slot {
                y: -1.3,
                length: 0.7,
            },
            Slot {
                y: -2.9,
                length: 3.5,
            },
        ];
        let comb = straight_comb(PI, 5.0, &slots, o, 0.05);
        assert!(comb_check(&comb, None).comb_like);
        let blocked = vertical_slot_comb(PI, 5.0, 2.0, 1.5, o, 0.05);
        let r = comb_check(&blocked, None);
        assert!(!r.comb_like);
        assert!(r
            .violations
            .iter()
            .all(|v| (v.at.re.abs() - 2.0).abs() < 1e-12 && v.at.im > -1.5));
    }
    let bad = vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0), c(3.0, 1.0)];
    let r = comb_check(&bad, None);
    assert!(!r.comb_like);
    assert!(r.note.is_some());
}

#[test]
fn widom_examples() {
    let one = harmonic_measure::<f64>(&[(-1.0, 1.0)]).unwrap();
    let w = widom_sum(&one).unwrap();
    assert!(w.critical_points.is_empty());
    assert_eq!(w.sum, 0.0);
    let two = harmonic_measure::<f64>(&[(-1.0, -0.3), (0.3, 1.0)]).unwrap();
    let w = widom_sum(&two).unwrap();
    assert_eq!(w.critical_points.len(), 1);
    assert!(w.critical_points[0].abs() < 1e-12f64);
    assert!(w.sum > 0.0);
    assert_abs_diff_eq!(
        w.sum,
        greens_function(&two, c(0.0, 0.0)).unwrap().value,
        epsilon = 1e-15
    );
    let three = harmonic_measure::<f64>(&[(-2.0, -1.2), (-0.4, 0.1), (0.5, 3.0)]).unwrap();
    let w = widom_sum(&three).unwrap();
    assert!(w.root_agreement < 1e-10, "{}", w.root_agreement);
    assert!(w.green_values.iter().all(|g| *g > 0.0));
}

#[test]
fn widom_sums_over_cantor_depths() {
    let mut last = 0.0;
    for depth in 1..=3 {
        let e = cantor_intervals::<f64>(depth, 0.3).unwrap();
        let w = widom_sum(&harmonic_measure(&e).unwrap()).unwrap();
        assert_eq!(w.critical_points.len(), (1 << depth) - 1);
        assert!(w.partial_sums.windows(2).all(|p| p[1] >= p[0]));
        assert!(w.sum > last);
        last = w.sum;
    }
}
