use num_complex::Complex;

use pvcauchy::constructions::{arcsine, greens_function, harmonic_measure};
use pvcauchy::fast_eval::{audit, EvalTree, SourceSet};
use pvcauchy::measure::IntervalDensity;
use pvcauchy::transforms::{cauchy_pv, PvOptions};
use pvcauchy::{Cx32, Measure32};

fn c(re: f32, im: f32) -> Cx32 {
    Complex::new(re, im)
}

#[test]
fn arcsine_in_f32() {
    let mu = arcsine::<f32>(-1.0, 1.0).unwrap();
    for x in [-0.9f32, -0.3, 0.0, 0.45, 0.99] {
        let v = cauchy_pv(&mu, c(x, 0.0), 1e-5).unwrap().value;
        assert!(v.norm() < 1e-5, "{x}: {v}");
    }
    let z = c(2.0, 0.0);
    let v = cauchy_pv(&mu, z, 1e-5).unwrap().value;
    assert!((v.re + 1.0 / 3f32.sqrt()).abs() < 1e-5, "{v}");
}

#[test]
fn uniform_pv_in_f32() {
    let mu = Measure32::single(IntervalDensity::uniform(-1.0f32, 1.0).unwrap()).unwrap();
    let v = pvcauchy::transforms::cauchy_pv_with(&mu, c(0.5, 0.0), &PvOptions::fast(1e-5))
        .unwrap()
        .value;
    // ln((1 - x)/(1 + x)) / 2 at x = 1/2
    assert!((v.re - (1.0f32 / 3.0).ln() / 2.0).abs() < 1e-5, "{v}");
}

#[test]
fn harmonic_measure_in_f32() {
    let h = harmonic_measure::<f32>(&[(-1.0, -0.3), (0.3, 1.0)]).unwrap();
    assert!((h.measure().mass().re - 1.0).abs() < 1e-5);
    assert!(h.gap_roots[0].abs() < 1e-5);
    let one = harmonic_measure::<f32>(&[(-1.0, 1.0)]).unwrap();
    let g = greens_function(&one, c(2.0, 0.0)).unwrap().value;
    assert!((g - (2.0 + 3f32.sqrt()).ln()).abs() < 1e-4, "{g}");
}

#[test]
fn treecode_in_f32() {
    let n = 2000;
    let pts: Vec<Cx32> = (0..n)
        .map(|k| {
            let t = k as f32 * 0.618_034;
            c(t.fract(), (t * 1.3).fract())
        })
        .collect();
    let w = vec![c(1.0 / n as f32, 0.0); n];
    let src = SourceSet::new(pts, w).unwrap();
    let tree = EvalTree::build(&src, 8, 16).unwrap();
    let targets: Vec<Cx32> = (0..100).map(|k| c(1.5, k as f32 / 100.0)).collect();
    let (_, err) = audit(&src, &tree, &targets, 0.0, 100);
    assert!(err < 1e-4, "{err}");
}
