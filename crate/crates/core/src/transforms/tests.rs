use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;
use crate::measure::{
    make_measure, AreaDensity, AreaFn, Atom, Component, CurveDensity, CurveFn, CurveShape, Family,
    IntervalDensity, Region,
};

fn c(re: f64, im: f64) -> Cx<f64> {
    cx(re, im)
}

fn atom_at(z: Cx<f64>) -> ComplexMeasure<f64> {
    ComplexMeasure::atoms(&[(z, c(1.0, 0.0))]).unwrap()
}

fn arcsine() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::arcsine(-1.0, 1.0).unwrap()).unwrap()
}

fn uniform() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::uniform(-1.0, 1.0).unwrap()).unwrap()
}

fn semicircle() -> ComplexMeasure<f64> {
    ComplexMeasure::single(IntervalDensity::semicircle(-1.0, 1.0).unwrap()).unwrap()
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
fn eps_transform_of_atoms() {
    let mu = atom_at(c(0.0, 0.0));
    assert_eq!(cauchy_eps(&mu, c(1.0, 0.0), 0.5).unwrap(), c(-1.0, 0.0));
    assert_eq!(cauchy_eps(&mu, c(0.0, 0.0), 0.1).unwrap(), c(0.0, 0.0));
    assert!(cauchy_eps(&mu, c(1.0, 0.0), 0.0).is_err());
}

#[test]
fn eps_transform_of_uniform_far_point() {
    // ½ ∫ dt/(t-2) = ½ ln(1/3)
    let v = cauchy_eps(&uniform(), c(2.0, 0.0), 0.1).unwrap();
    assert_abs_diff_eq!(v.re, -0.5 * 3f64.ln(), epsilon = 1e-14);
    assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
}

#[test]
fn eps_transform_excises_interval_symmetrically() {
    // uniform, z = 0.2, ε = 0.3: ½ [ln|t-0.2|] over [-1,-0.1] and [0.5,1]
    let v = cauchy_eps(&uniform(), c(0.2, 0.0), 0.3).unwrap();
    let oracle = 0.5 * ((0.3f64).ln() - (1.2f64).ln() + (0.8f64).ln() - (0.3f64).ln());
    assert_abs_diff_eq!(v.re, oracle, epsilon = 1e-14);
}

#[test]
fn arcsine_is_reflectionless_with_ladder() {
    for x in [-0.9, -0.3, 0.0, 0.3, 0.77] {
        let r = cauchy_pv(&arcsine(), c(x, 0.0), 1e-9).unwrap();
        assert!(r.on_support);
        assert!(r.value.norm() < 1e-13, "{x}: {}", r.value);
        assert_eq!(r.status, Status::Converged, "{x}: tail {}", r.tail_estimate);
        assert!(r.epsilons.windows(2).all(|w| w[1] < w[0]));
        assert!(r.ladder.last().unwrap().norm() < 1e-9);
    }
}

#[test]
fn uniform_pv_matches_log_formula() {
    // ½ ln((1-x)/(1+x)) at x = 0.5
    let r = cauchy_pv(&uniform(), c(0.5, 0.0), 1e-9).unwrap();
    assert_abs_diff_eq!(r.value.re, 0.5 * (1.0f64 / 3.0).ln(), epsilon = 1e-13);
    assert_eq!(r.status, Status::Converged);
}

#[test]
fn semicircle_transform_follows_kernel_sign() {
    // with the kernel 1/(ζ - z), C^{μ₀}(z) = -(z - sqrt(z² - 1))
    let r = cauchy_pv(&semicircle(), c(2.0, 0.0), 1e-12).unwrap();
    assert_abs_diff_eq!(r.value.re, -(2.0 - 3f64.sqrt()), epsilon = 1e-13);
    assert!(!r.on_support);
    for y in [1e3, 1e4] {
        let z = c(0.0, y);
        let v = cauchy_pv(&semicircle(), z, 1e-12).unwrap().value;
        assert_abs_diff_eq!((v * z).re, -0.5, epsilon = 1e-6);
    }
}

#[test]
fn semicircle_pv_on_support() {
    // pv ∫ (1/π) sqrt(1-t²)/(t-x) dt = -x
    let r = cauchy_pv(&semicircle(), c(0.4, 0.0), 1e-9).unwrap();
    assert_abs_diff_eq!(r.value.re, -0.4, epsilon = 1e-13);
    assert_eq!(r.status, Status::Converged);
}

#[test]
fn circle_current_values() {
    let mu = circle_current();
    let inside = cauchy_pv(&mu, c(0.0, 0.0), 1e-10).unwrap();
    assert_abs_diff_eq!((inside.value - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    let outside = cauchy_pv(&mu, c(3.0, 0.0), 1e-10).unwrap();
    assert!(outside.value.norm() < 1e-12);
    let on = cauchy_pv(&mu, c(1.0, 0.0), 1e-8).unwrap();
    assert!(on.on_support);
    assert_abs_diff_eq!((on.value - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    assert!((on.ladder.last().unwrap() - c(1.0, 0.0)).norm() < 1e-8);
    assert_eq!(on.status, Status::Converged);
}

#[test]
fn clockwise_curve_half_residue() {
    let curve = CurveDensity::new(
        CurveShape::Fourier {
            terms: vec![(-1, c(1.5, 0.0)), (1, c(0.2, 0.0))],
        },
        CurveFn::Identity,
        1,
    )
    .unwrap();
    let mu = ComplexMeasure::single(curve.clone()).unwrap();
    let z = curve.shape().point(0.7);
    let r = cauchy_pv(&mu, z, 1e-7).unwrap();
    assert!(r.on_support);
    assert!(
        (r.value - *r.ladder.last().unwrap()).norm() < 1e-7,
        "{} vs {}",
        r.value,
        r.ladder.last().unwrap()
    );
}

#[test]
fn jacobi_pv_agrees_with_ladder() {
    let d = IntervalDensity::new(
        -0.5,
        2.0,
        Family::Jacobi {
            alpha: 0.3,
            beta: -0.4,
            poly: vec![1.0, 0.5, -0.2],
        },
    )
    .unwrap();
    let mu = ComplexMeasure::single(d).unwrap();
    for x in [-0.2, 0.6, 1.7] {
        let r = cauchy_pv(&mu, c(x, 0.0), 1e-9).unwrap();
        assert_eq!(
            r.status,
            Status::Converged,
            "x = {x}, tail {}",
            r.tail_estimate
        );
        assert!((r.value - *r.ladder.last().unwrap()).norm() < 1e-9);
    }
}

#[test]
fn gauss_rule_pv_converges() {
    let d = IntervalDensity::new(
        -1.0,
        1.0,
        Family::Jacobi {
            alpha: -0.5,
            beta: -0.5,
            poly: vec![1.0, 0.0, 2.0],
        },
    )
    .unwrap();
    let mu = ComplexMeasure::single(d).unwrap();
    let x = c(0.35, 0.0);
    let exact = cauchy_pv_with(&mu, x, &PvOptions::fast(1e-12))
        .unwrap()
        .value;
    let g = cauchy_pv_with(&mu, x, &PvOptions::fast(1e-12).with_nodes(16))
        .unwrap()
        .value;
    assert_abs_diff_eq!((g - exact).norm(), 0.0, epsilon = 1e-13);
}

#[test]
fn atom_coincidence_is_an_error() {
    let mu = atom_at(c(0.5, 0.5));
    assert_eq!(
        cauchy_pv(&mu, c(0.5, 0.5), 1e-8).unwrap_err(),
        TransformError::AtAtom
    );
}

#[test]
fn endpoint_pv_rules() {
    assert!(matches!(
        cauchy_pv(&arcsine(), c(1.0, 0.0), 1e-8),
        Err(TransformError::NotEvaluable(_))
    ));
    // semicircle vanishes at the ends, so the integral converges: -x at x = 1
    let r = cauchy_pv_with(&semicircle(), c(1.0, 0.0), &PvOptions::fast(1e-10)).unwrap();
    assert_abs_diff_eq!(r.value.re, -1.0, epsilon = 1e-10);
}

#[test]
fn area_transform_of_disk() {
    let mu = unit_disk();
    let z = c(0.3, -0.4);
    let v = cauchy_pv(&mu, z, 1e-9).unwrap();
    assert_abs_diff_eq!((v.value + PI * z.conj()).norm(), 0.0, epsilon = 1e-10);
    let far = c(1.5, 1.0);
    let v = cauchy_pv(&mu, far, 1e-9).unwrap().value;
    assert_abs_diff_eq!((v + PI * far.inv()).norm(), 0.0, epsilon = 1e-10);
}

#[test]
fn maximal_examples() {
    let atom = atom_at(c(0.0, 0.0));
    let g = EpsGrid::for_target(&atom, c(1.0, 0.0));
    assert_abs_diff_eq!(
        cauchy_maximal(&atom, c(1.0, 0.0), &g).unwrap(),
        1.0,
        epsilon = 1e-15
    );
    let u = uniform();
    let g = EpsGrid::for_target(&u, c(0.0, 0.0));
    assert!(cauchy_maximal(&u, c(0.0, 0.0), &g).unwrap() < 1e-13);
    // the arcsine law is symmetric, so every truncation vanishes at 0
    let a = arcsine();
    let m0 = cauchy_maximal(&a, c(0.0, 0.0), &EpsGrid::for_target(&a, c(0.0, 0.0))).unwrap();
    assert!(m0 < 1e-13);
    let w = |x: f64| 1.0 / (1.0 - x * x).sqrt();
    let m = |x: f64| cauchy_maximal(&a, c(x, 0.0), &EpsGrid::for_target(&a, c(x, 0.0))).unwrap();
    let ratio = (m(0.99) / m(0.5)) / (w(0.99) / w(0.5));
    assert!(ratio > 0.25 && ratio < 4.0, "ratio {ratio}");
}

#[test]
fn maximal_grid_refinement_is_monotone() {
    let a = arcsine();
    for x in [0.1, 0.5, 0.95] {
        let z = c(x, 0.0);
        let g = EpsGrid::for_target(&a, z);
        let coarse = cauchy_maximal(&a, z, &g).unwrap();
        let fine = cauchy_maximal(&a, z, &g.refined()).unwrap();
        assert!(fine >= coarse);
    }
    let bad = EpsGrid {
        eps_min: 1e-3,
        eps_max: 1.0,
        ratio: 3.0,
        splits: 0,
    };
    assert!(cauchy_maximal(&a, c(0.0, 0.0), &bad).is_err());
}

#[test]
fn conjugate_poisson_examples() {
    assert_abs_diff_eq!(
        conjugate_poisson(&atom_at(c(0.0, 0.0)), 1.0, 1.0).unwrap(),
        0.5,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(
        conjugate_poisson(&uniform(), 0.0, 0.3).unwrap(),
        0.0,
        epsilon = 1e-14
    );
    let mut prev = f64::INFINITY;
    for k in 1..=5 {
        let q = conjugate_poisson(&arcsine(), 0.5, 10f64.powi(-k))
            .unwrap()
            .abs();
        assert!(q < prev);
        prev = q;
    }
    assert!(prev < 1e-4);
}

#[test]
fn poisson_examples() {
    assert_abs_diff_eq!(
        poisson(&atom_at(c(0.0, 0.0)), 0.0, 1.0).unwrap(),
        1.0 / PI,
        epsilon = 1e-15
    );
    let y = 1e6;
    assert_abs_diff_eq!(
        poisson(&arcsine(), 0.0, y).unwrap() * PI * y,
        1.0,
        epsilon = 1e-9
    );
    assert_abs_diff_eq!(poisson(&uniform(), 0.0, 1e-4).unwrap(), 0.5, epsilon = 1e-3);
    assert_eq!(
        poisson(&unit_disk(), 0.0, 1.0),
        Err(TransformError::OffRealLine)
    );
}

#[test]
fn riesz_examples() {
    assert_abs_diff_eq!(
        riesz_r1(&atom_at(c(0.0, 0.0)), 0.0, 0.0, 1.0).unwrap().re,
        1.0,
        epsilon = 1e-15
    );
    let d = unit_disk();
    for z in [2.0, 0.5, 1e-2, 1e-4] {
        let v = riesz_r1(&d, 0.0, 0.0, z).unwrap().re;
        let oracle = 2.0 * PI * (1.0 - z / (1.0 + z * z).sqrt());
        assert_abs_diff_eq!(v, oracle, epsilon = 1e-9);
    }
    let lim = riesz_r1_limit(&d, 0.0, 0.0, &[1e-2, 1e-3, 1e-4]).unwrap();
    assert_abs_diff_eq!(lim.limit.re, 2.0 * PI, epsilon = 1e-6);
    assert!(riesz_r1(&d, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn riesz_variation_of_signed_measure() {
    let mu = ComplexMeasure::atoms(&[(c(0.0, 0.0), c(-2.0, 0.0))]).unwrap();
    assert_abs_diff_eq!(
        riesz_r1_variation(&mu, 0.0, 0.0, 1.0).unwrap(),
        2.0,
        epsilon = 1e-15
    );
}

#[test]
fn cauchy_kernel_matches_eps_transform() {
    let mu = uniform().plus(&atom_at(c(0.2, 0.7)));
    for (z, e) in [(c(0.1, 0.05), 0.2), (c(1.5, 0.0), 0.1), (c(0.0, 0.0), 0.9)] {
        let a = odd_kernel_eps(&KernelSpec::Cauchy, &mu, z, e).unwrap();
        let b = cauchy_eps(&mu, z, e).unwrap();
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
    }
}

#[test]
fn log_potential_of_arcsine() {
    // ∫ log|x - t| dμ(t) = -ln 2 on [-1, 1]
    for x in [-0.7, 0.0, 0.4] {
        assert_abs_diff_eq!(
            log_potential(&arcsine(), c(x, 0.0)).re,
            -(2f64.ln()),
            epsilon = 1e-12
        );
    }
}

fn arb_atoms() -> impl Strategy<Value = Vec<(Cx<f64>, Cx<f64>)>> {
    prop::collection::vec(
        (
            (-2.0..2.0f64),
            (-2.0..2.0f64),
            (-1.0..1.0f64),
            (-1.0..1.0f64),
        )
            .prop_map(|(x, y, a, b)| (cx(x, y), cx(a, b))),
        10,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eps_transform_is_linear(al in -2.0..2.0f64, be in -2.0..2.0f64, zx in -1.5..1.5f64, zy in 0.01..1.0f64, e in 0.01..0.5f64) {
        let mu = uniform();
        let nu = ComplexMeasure::single(
            CurveDensity::circle(c(0.3, 0.2), 0.8, CurveFn::Identity).unwrap()
        ).unwrap();
        let z = c(zx, zy);
        let combo = mu.scaled(c(al, 0.0)).plus(&nu.scaled(c(0.0, be)));
        let lhs = cauchy_eps(&combo, z, e).unwrap();
        let rhs = cauchy_eps(&mu, z, e).unwrap() * al + cauchy_eps(&nu, z, e).unwrap() * c(0.0, be);
        prop_assert!((lhs - rhs).norm() < 1e-13 * (1.0 + lhs.norm()));
    }

    #[test]
    fn truncation_below_distance_is_irrelevant(zx in -3.0..3.0f64, zy in 0.05..2.0f64, frac in 0.01..0.99f64) {
        let mu = arcsine().plus(&atom_at(c(0.0, 3.0)));
        let z = c(zx, zy);
        let d = mu.distance(z);
        let pv = cauchy_pv(&mu, z, 1e-10).unwrap().value;
        let e = cauchy_eps(&mu, z, frac * d).unwrap();
        prop_assert!((pv - e).norm() < 1e-12 * (1.0 + pv.norm()));
    }

    #[test]
    fn odd_kernel_matches_brute_force(atoms in arb_atoms(), zx in -2.0..2.0f64, zy in -2.0..2.0f64, e in 0.05..1.0f64) {
        let mu = make_measure(atoms.iter().map(|&(loc, w)| (cx(1.0, 0.0), Component::Atom(Atom { location: loc, weight: w })))).unwrap();
        let z = c(zx, zy);
        for k in [KernelSpec::Cauchy, KernelSpec::riesz(2.0, 1), KernelSpec::riesz(3.0, 0)] {
            let got = odd_kernel_eps(&k, &mu, z, e).unwrap();
            let mut brute = c(0.0, 0.0);
            for a in mu.atom_list() {
                if (a.location - z).norm() > e {
                    brute += k.eval(a.location - z) * a.weight;
                }
            }
            prop_assert!((got - brute).norm() <= 1e-13 * (1.0 + brute.norm()));
        }
    }

    #[test]
    fn cauchy_symmetry_identity(p in prop::array::uniform6(-3.0..3.0f64)) {
        let (x, y, z) = (c(p[0], p[1]), c(p[2], p[3]), c(p[4], p[5]));
        prop_assume!((x - y).norm() > 0.05 && (y - z).norm() > 0.05 && (z - x).norm() > 0.05);
        let r = kernel_symmetry_residual(&KernelSpec::Cauchy, x, y, z).unwrap();
        let scale = ((x - y) * (y - z)).inv().norm() + ((y - z) * (z - x)).inv().norm() + ((z - x) * (x - y)).inv().norm();
        prop_assert!(r.norm() < 1e-15 * scale.max(1.0) * 8.0);
    }

    #[test]
    fn kernel_difference_identities(p in prop::array::uniform6(-1.0..1.0f64)) {
        let (a, b, cc) = (c(p[0], p[1]), c(p[2], p[3]), c(p[4], p[5]));
        prop_assume!((a - b).norm() > 1e-3);
        let (ca, cb) = kernel_diff_coeffs(a, b, cc).unwrap();
        let s = (ca + cb - c(1.0, 0.0)).norm();
        let m = (ca * a + cb * b - cc).norm();
        let scale = ca.norm() + cb.norm();
        prop_assert!(s <= 4.0 * f64::EPSILON * scale.max(1.0));
        prop_assert!(m <= 8.0 * f64::EPSILON * scale.max(1.0) * 2.0);
    }

    #[test]
    fn far_field_mass_asymptotics(y in 1e3..1e4f64) {
        let mu = uniform().plus(&atom_at(c(0.3, 0.1)).scaled(c(0.5, -0.5)));
        let z = c(0.0, y);
        let v = cauchy_pv(&mu, z, 1e-10).unwrap().value;
        prop_assert!((v * z + mu.mass()).norm() < 2.0 / y);
    }
}

#[test]
fn disc_mass() {
    let u = uniform();
    assert_abs_diff_eq!(
        mass_in_disc(&u, c(0.0, 0.3), 0.5).unwrap().re,
        0.4,
        epsilon = 1e-12
    );
    let d = unit_disk();
    assert_abs_diff_eq!(
        mass_in_disc(&d, c(0.2, 0.0), 0.5).unwrap().re,
        PI * 0.25,
        epsilon = 1e-10
    );
    let a = atom_at(c(1.0, 0.0));
    assert_eq!(mass_in_disc(&a, c(0.0, 0.0), 0.5).unwrap(), c(0.0, 0.0));
    assert_eq!(mass_in_disc(&a, c(0.0, 0.0), 1.5).unwrap(), c(1.0, 0.0));
}
