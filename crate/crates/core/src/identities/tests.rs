use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::measure::{
    make_measure, AreaDensity, AreaFn, Component, CurveDensity, CurveFn, Family, IntervalDensity,
    Region,
};

fn c(re: f64, im: f64) -> Cx<f64> {
    cx(re, im)
}

fn arcsine() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::arcsine(-1.0, 1.0).unwrap()).unwrap()
}

fn uniform() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::uniform(-1.0, 1.0).unwrap()).unwrap()
}

fn circle_current() -> ComplexMeasure<f64> {
    let curve = CurveDensity::circle(c(0.0, 0.0), 1.0, CurveFn::Constant(c(1.0, 0.0))).unwrap();
    make_measure([(c(0.0, PI).inv(), Component::Curve(curve))]).unwrap()
}

fn unit_disk() -> ComplexMeasure<f64> {
    ComplexMeasure::single(
        AreaDensity::new(
            Region::Disk {
                center: c(0.0, 0.0),
                radius: 1.0,
            },
            AreaFn::Constant(c(1.0, 0.0)),
        )
        .unwrap(),
    )
    .unwrap()
}

#[test]
fn quadratic_identity_on_the_circle() {
    let mu = circle_current();
    let rep = verify_quadratic(&mu, &[c(0.4, 0.0)], &QuadraticOptions::new(1e-8)).unwrap();
    assert_abs_diff_eq!((rep.lhs[0] - c(4.0, 0.0)).norm(), 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!((rep.rhs[0] - c(4.0, 0.0)).norm(), 0.0, epsilon = 1e-9);
    let pts = default_quadratic_points(&mu).unwrap();
    assert_eq!(pts.len(), 80);
    let rep = verify_quadratic(&mu, &pts, &QuadraticOptions::new(1e-8)).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.max_residual);
}

#[test]
fn quadratic_identity_at_random_points_off_the_circle() {
    let mu = circle_current();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Cx<f64>> = (0..50)
        .map(|_| {
            let r = if rng.gen::<bool>() {
                rng.gen_range(0.0..0.8)
            } else {
                rng.gen_range(1.2..4.0)
            };
            Cx::from_polar(r, rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let rep = verify_quadratic(&mu, &pts, &QuadraticOptions::new(1e-8)).unwrap();
    assert!(rep.max_residual < 1e-8, "{}", rep.max_residual);
}

#[test]
fn quadratic_identity_for_uniform() {
    let mu = uniform();
    let rep = verify_quadratic(&mu, &[c(0.0, 2.0)], &QuadraticOptions::new(1e-6)).unwrap();
    assert!(rep.max_residual < 1e-6);
    let pts = default_quadratic_points(&mu).unwrap();
    assert_eq!(pts.len(), 64);
    let rep = verify_quadratic(&mu, &pts, &QuadraticOptions::new(1e-6)).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.max_residual);
}

#[test]
fn quadratic_identity_fails_for_arcsine() {
    let mut opts = QuadraticOptions::new(1e-6);
    opts.expect_fail = true;
    let rep = verify_quadratic(&arcsine(), &[c(2.0, 0.0)], &opts).unwrap();
    assert_abs_diff_eq!(rep.max_residual, 1.0 / 3.0, epsilon = 1e-6);
    assert_eq!(rep.verdict, Verdict::ExpectedFail);
    opts.expect_fail = false;
    let rep = verify_quadratic(&arcsine(), &[c(2.0, 0.0)], &opts).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
}

#[test]
fn report_serialisation() {
    let rep = verify_quadratic(
        &uniform(),
        &[c(0.0, 2.0), c(3.0, 0.0)],
        &QuadraticOptions::new(1e-6),
    )
    .unwrap();
    let csv = rep.to_csv();
    assert!(csv.starts_with("point_re,point_im,lhs_re,lhs_im,rhs_re,rhs_im,residual\n"));
    assert_eq!(csv.lines().count(), 3);
    let js = rep.summary_json();
    assert_eq!(js["verdict"], "pass");
    assert_eq!(js["tolerance"], 1e-6);
}

#[test]
fn arcsine_is_reflectionless() {
    let rep = verify_reflectionless(&arcsine(), 64, 1e-6, &PvOptions::fast(1e-12), false).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass);
    assert!(rep.max_residual < 1e-6);
    assert_eq!(rep.groups.len(), 3);
}

#[test]
fn reflectionless_residual_shrinks_with_nodes() {
    let mu = arcsine();
    let small = verify_reflectionless(&mu, 16, 1e-6, &PvOptions::fast(1e-12).with_nodes(16), false)
        .unwrap();
    let large = verify_reflectionless(&mu, 16, 1e-6, &PvOptions::fast(1e-12).with_nodes(64), false)
        .unwrap();
    assert!(large.max_residual <= small.max_residual + 1e-15);
}

#[test]
fn uniform_is_not_reflectionless() {
    let rep = verify_reflectionless(&uniform(), 32, 1e-6, &PvOptions::fast(1e-12), false).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    let i = rep.points.iter().position(|z| *z == c(0.5, 0.0)).unwrap();
    assert_abs_diff_eq!(rep.lhs[i].re, 0.5 * (1.0f64 / 3.0).ln(), epsilon = 1e-10);
}

#[test]
fn reflectionless_rejects_atoms() {
    let mu = ComplexMeasure::atoms(&[(c(0.0, 0.0), c(1.0, 0.0))]).unwrap();
    let err = verify_reflectionless(&mu, 8, 1e-6, &PvOptions::fast(1e-10), false).unwrap_err();
    assert_eq!(
        err.to_string(),
        "reflectionless requires continuous measure"
    );
}

#[test]
fn antisymmetry_examples() {
    let mu = ComplexMeasure::atoms(&[(c(0.0, 0.0), c(1.0, 0.0))]).unwrap();
    let nu = ComplexMeasure::atoms(&[(c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
    let r = antisymmetry_check(&mu, &nu, &KernelSpec::Cauchy, 0.5, 4).unwrap();
    assert_eq!(r.forward, c(-1.0, 0.0));
    assert_eq!(r.backward, c(1.0, 0.0));
    assert_eq!(r.residual, 0.0);
    let d = ComplexMeasure::atoms(&[
        (c(0.0, 0.0), c(1.0, 0.5)),
        (c(0.3, 1.0), c(-2.0, 0.0)),
        (c(2.0, -1.0), c(0.5, 0.5)),
    ])
    .unwrap();
    let r = antisymmetry_check(&d, &d, &KernelSpec::riesz(2.0, 1), 0.1, 4).unwrap();
    assert!(r.forward.norm() < 1e-15);
    let even = KernelSpec::custom("even", |z: Cx<f64>| c(z.norm(), 0.0));
    assert!(antisymmetry_check(&d, &d, &even, 0.1, 4).is_err());
}

fn random_atoms(rng: &mut ChaCha8Rng, n: usize) -> ComplexMeasure<f64> {
    let pts: Vec<(Cx<f64>, Cx<f64>)> = (0..n)
        .map(|_| {
            (
                c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    ComplexMeasure::atoms(&pts).unwrap()
}

#[test]
fn antisymmetry_on_random_discrete_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let mu = random_atoms(&mut rng, 20);
        let nu = random_atoms(&mut rng, 20);
        for k in [
            KernelSpec::Cauchy,
            KernelSpec::riesz(2.0, 1),
            KernelSpec::riesz(1.5, 0),
        ] {
            let r = antisymmetry_check(&mu, &nu, &k, 0.05, 4).unwrap();
            assert!(r.residual < 1e-12, "{} {}", k.name(), r.residual);
        }
    }
}

#[test]
fn halfspace_examples() {
    let k = KernelSpec::riesz(2.0, 1);
    let pair =
        ComplexMeasure::atoms(&[(c(-1.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
    let tr = halfspace_diagnostic(&pair, &k, 0.0, &[1.9, 1.0, 0.1], 4).unwrap();
    for v in &tr.values {
        assert_abs_diff_eq!(v.re, 0.5, epsilon = 1e-15);
    }
    let ladder: Vec<f64> = (0..20).map(|j| 0.5f64.powi(j)).collect();
    for mu in [uniform(), arcsine()] {
        let tr = halfspace_diagnostic(&mu, &k, 0.0, &ladder, 101).unwrap();
        assert!(tr.positive && tr.nondecreasing);
    }
    let one_sided = ComplexMeasure::atoms(&[(c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
    assert!(matches!(
        halfspace_diagnostic(&one_sided, &k, 0.0, &[0.5], 4),
        Err(IdentityError::DegenerateSplit(_))
    ));
    let signed = uniform().scaled(c(-1.0, 0.0));
    assert!(matches!(
        halfspace_diagnostic(&signed, &k, 0.0, &[0.5], 4),
        Err(IdentityError::NotPositive)
    ));
}

#[test]
fn maximal_dichotomy() {
    let opts = MaximalOptions::default();
    let a = maximal_summability(&arcsine(), &opts).unwrap();
    assert_eq!(
        a.class,
        Summability::WeakOnly,
        "r2 {} weak {}",
        a.r_squared,
        a.weak_variation
    );
    assert!(a.r_squared > 0.99);
    assert!(a.l1_truncated.windows(2).all(|w| w[1] >= w[0]));
    let u = maximal_summability(&uniform(), &opts).unwrap();
    assert_eq!(u.class, Summability::Summable);
    assert!(u.last_growth < 0.01);
}

#[test]
fn smooth_bump_pair_is_summable() {
    let n = 17;
    let values: Vec<f64> = (0..n)
        .map(|k| {
            let x = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
            (-((x - 0.4) / 0.1f64).powi(2)).exp() + (-((x + 0.4) / 0.1f64).powi(2)).exp()
        })
        .collect();
    let d = IntervalDensity::new(
        -1.0,
        1.0,
        Family::Tabulated {
            alpha: 0.0,
            beta: 0.0,
            values,
        },
    )
    .unwrap();
    let mu = ComplexMeasure::single(d).unwrap();
    let opts = MaximalOptions {
        nodes: 100,
        eps_min_rel: 1e-8,
        ..MaximalOptions::default()
    };
    let s = maximal_summability(&mu, &opts).unwrap();
    assert_eq!(s.class, Summability::Summable);
}

#[test]
fn maximal_l1_is_stable_under_node_refinement() {
    let base = MaximalOptions {
        nodes: 200,
        ..MaximalOptions::default()
    };
    let fine = MaximalOptions {
        nodes: 400,
        ..MaximalOptions::default()
    };
    let a = maximal_summability(&uniform(), &base).unwrap();
    let b = maximal_summability(&uniform(), &fine).unwrap();
    for (x, y) in a.l1_truncated.iter().zip(&b.l1_truncated) {
        assert!((x - y).abs() / y < 0.02);
    }
}

#[test]
fn density_point_traces() {
    let disk = unit_disk();
    let tr = density_point_trace(&disk, c(2.0, 0.0), &[0.5, 0.1, 0.01]).unwrap();
    assert!(tr.mass_ratio.iter().all(|m| m.norm() == 0.0));
    assert!(tr.quotient.iter().all(|q| *q == 0.0));
    assert!(tr.riesz_value.windows(2).all(|w| w[1] < w[0]));
    let far = density_point_trace(&uniform(), c(0.0, 5.0), &[1.0, 0.5]).unwrap();
    assert!(far.quotient.iter().all(|q| *q == 0.0));
    let inside = density_point_trace(&disk, c(0.1, 0.0), &[0.5, 0.1]).unwrap();
    for m in &inside.mass_ratio {
        assert_abs_diff_eq!(m.re, 1.0, epsilon = 1e-9);
    }
    assert!(density_point_trace(&disk, c(0.0, 0.0), &[0.1, 0.5]).is_err());
}

#[test]
fn disk_transform_vanishes_on_a_small_set() {
    let f = small_transform_fraction(&unit_disk(), 40, 1e-3).unwrap();
    assert!(f < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn self_pairing_vanishes_for_odd_kernels(seed in 0u64..1000, eps in 0.01f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_atoms(&mut rng, 12);
        let r = antisymmetry_check(&mu, &mu, &KernelSpec::riesz(2.0, 2), eps, 4).unwrap();
        prop_assert!(r.forward.norm() < 1e-12);
    }

    #[test]
    fn halfspace_values_never_decrease(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(Cx<f64>, Cx<f64>)> = (0..16)
            .map(|k| {
                let x = if k % 2 == 0 { rng.gen_range(0.1..2.0) } else { -rng.gen_range(0.1..2.0) };
                (c(x, rng.gen_range(-1.0..1.0)), c(rng.gen_range(0.1..1.0), 0.0))
            })
            .collect();
        let mu = ComplexMeasure::atoms(&pts).unwrap();
        let ladder: Vec<f64> = (0..12).map(|j| 4.0 * 0.5f64.powi(j)).collect();
        let tr = halfspace_diagnostic(&mu, &KernelSpec::riesz(2.0, 1), 0.0, &ladder, 4).unwrap();
        prop_assert!(tr.nondecreasing);
    }
}
