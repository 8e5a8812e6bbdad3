//! Worked examples checked against values computed here from first principles.

use std::f64::consts::PI;

use shadowlab::geometry::{one_sided_within, point_to_set_dist, torus_dist, PointSet, TorusPoint};
use shadowlab::hyperbolicity::{
    anosov_certificate_linear, classify_periodic, cone_report, periodic_points_linear, Classification,
};
use shadowlab::linalg::IntMatrix;
use shadowlab::orbits::{method_from_map, orbit_segment, random_method, validate_pseudo_orbit, PseudoOrbit};
use shadowlab::shadowing::{
    check_inverse_shadowing, check_orbital_inverse, check_weak_inverse, shadow_solve_linear, shadow_solve_newton,
    shadowing_constant,
};
use shadowlab::systems::{
    c1_distance, make_conservative_perturbation, make_conservative_perturbation_with, make_linear, make_rotation,
    make_translation_method_map, volume_defect, PerturbationMode, ShearAxis,
};

const SQRT5: f64 = 2.236_067_977_499_79;

/// Distance on the 2-torus by exhaustive search over the nine nearest lifts.
fn brute_dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            let dx = p[0] - q[0] + i as f64;
            let dy = p[1] - q[1] + j as f64;
            best = best.min(dx.hypot(dy));
        }
    }
    best
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

fn cat_step(p: [f64; 2]) -> [f64; 2] {
    [frac(2.0 * p[0] + p[1]), frac(p[0] + p[1])]
}

fn cat_step_back(p: [f64; 2]) -> [f64; 2] {
    [frac(p[0] - p[1]), frac(-p[0] + 2.0 * p[1])]
}

fn close(p: &TorusPoint, q: [f64; 2], tol: f64) -> bool {
    brute_dist([p.x(), p.y()], q) <= tol
}

#[test]
fn distance_across_the_corner() {
    let d = torus_dist(&TorusPoint::torus(0.9, 0.9), &TorusPoint::torus(0.1, 0.1)).unwrap();
    assert!((d - brute_dist([0.9, 0.9], [0.1, 0.1])).abs() < 1e-12);
    assert!((d - 0.08f64.sqrt()).abs() < 1e-12);
}

#[test]
fn distance_to_a_cat_orbit() {
    let mut fwd = vec![[0.2, 0.3]];
    let mut bwd = vec![[0.2, 0.3]];
    for _ in 0..3 {
        fwd.push(cat_step(*fwd.last().unwrap()));
        bwd.push(cat_step_back(*bwd.last().unwrap()));
    }
    let pts: Vec<[f64; 2]> = bwd.iter().skip(1).chain(fwd.iter()).copied().collect();
    assert_eq!(pts.len(), 7);
    let expected = pts
        .iter()
        .map(|&q| brute_dist([0.0, 0.0], q))
        .fold(f64::INFINITY, f64::min);

    let f = make_linear([[2, 1], [1, 1]]).unwrap();
    let seg = orbit_segment(&f, &TorusPoint::torus(0.2, 0.3), 3).unwrap();
    let set = PointSet::new(seg.into_points()).unwrap();
    let d = point_to_set_dist(&TorusPoint::torus(0.0, 0.0), &set).unwrap();
    assert!((d - expected).abs() < 1e-12, "{d} vs {expected}");
}

#[test]
fn one_sided_inclusion_on_the_circle() {
    let s1 = PointSet::new(vec![TorusPoint::circle(0.3)]).unwrap();
    let s2 = PointSet::new(vec![TorusPoint::circle(0.0), TorusPoint::circle(0.25)]).unwrap();
    assert!(one_sided_within(&s1, &s2, 0.1).unwrap());
    assert!(!one_sided_within(&s1, &s2, 0.04).unwrap());
}

#[test]
fn linear_maps_forward() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    assert!(close(&cat.forward(&TorusPoint::torus(0.5, 0.5)), [0.5, 0.0], 1e-12));
    let shear = make_linear([[1, 0], [1, 1]]).unwrap();
    assert!(close(
        &shear.forward(&TorusPoint::torus(0.25, 0.1)),
        [0.25, 0.35],
        1e-12
    ));
}

#[test]
fn golden_rotation_orbit() {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let r = make_rotation(theta).unwrap();
    let mut p = TorusPoint::circle(0.0);
    for k in 1..=3 {
        p = r.forward(&p);
        let expected = frac(k as f64 * theta);
        assert!(torus_dist(&p, &TorusPoint::circle(expected)).unwrap() < 1e-12);
    }
    assert!((p.x() - 0.854_101_966_249_684_5).abs() < 1e-12);
}

#[test]
fn drift_map_at_the_origin() {
    let shear = make_linear([[1, 0], [1, 1]]).unwrap();
    let h = make_translation_method_map(&shear, 0.01).unwrap();
    assert!(close(&h.forward(&TorusPoint::origin(2)), [0.01, 0.0], 1e-15));
    // h(x, y) = (x + 0.01, x + y)
    assert!(close(&h.forward(&TorusPoint::torus(0.3, 0.4)), [0.31, 0.7], 1e-12));
}

#[test]
fn shear_sin_at_quarter_height() {
    let id = make_linear([[1, 0], [0, 1]]).unwrap();
    let tau = make_conservative_perturbation_with(&id, 0.001, PerturbationMode::ShearSin, 0.0, ShearAxis::X).unwrap();
    assert!(close(&tau.forward(&TorusPoint::torus(0.0, 0.25)), [0.001, 0.25], 1e-15));
}

#[test]
fn cat_composed_with_shear_sin() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let g = make_conservative_perturbation(&cat, 0.001, PerturbationMode::ShearSin).unwrap();
    // D(cat o tau) - A = 2 pi delta cos(2 pi y) A E12, whose norm peaks at 2 pi delta |A e1|
    let expected = 2.0 * PI * 0.001 * SQRT5;
    let d1 = c1_distance(&g, &cat, 256).unwrap();
    assert!((d1 - expected).abs() <= 1e-9 * expected.max(1.0), "{d1} vs {expected}");
    assert!(volume_defect(&g, 100) <= 1e-12);
}

#[test]
fn translation_method_distance() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let h = make_translation_method_map(&cat, 0.001).unwrap();
    assert!((c1_distance(&h, &cat, 64).unwrap() - 0.001).abs() < 1e-12);
}

#[test]
fn one_step_cat_segment() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let seg = orbit_segment(&cat, &TorusPoint::torus(0.2, 0.3), 1).unwrap();
    let back = cat_step_back([0.2, 0.3]);
    assert!(close(&seg.at(-1), back, 1e-12));
    assert!(close(&seg.at(0), [0.2, 0.3], 0.0));
    assert!(close(&seg.at(1), [0.7, 0.5], 1e-12));
}

#[test]
fn pseudo_orbit_gap_is_strict() {
    let r = make_rotation(0.25).unwrap();
    let seq: Vec<_> = [0.0, 0.25, 0.6].iter().map(|&v| TorusPoint::circle(v)).collect();
    // the only nonzero gap is the wrapped difference 0.6 - 0.5
    let gap = {
        let d = 0.6 - 0.5f64;
        (d - d.round()).abs()
    };
    assert!(!validate_pseudo_orbit(&r, &seq, gap));
    assert!(validate_pseudo_orbit(&r, &seq, 0.11));
}

#[test]
fn drift_method_first_coordinates() {
    let shear = make_linear([[1, 0], [1, 1]]).unwrap();
    let g = make_translation_method_map(&shear, 0.01).unwrap();
    let m = method_from_map(&shear, &g).unwrap();
    let phi = m.evaluate(&TorusPoint::origin(2), 2);
    for (point, expected) in phi.iter().zip([-0.02, -0.01, 0.0, 0.01, 0.02]) {
        let d = point.x() - expected;
        assert!((d - d.round()).abs() < 1e-12, "{} vs {expected}", point.x());
    }
}

#[test]
fn random_method_validates() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let m = random_method(&cat, 0.01, 3).unwrap();
    let x = TorusPoint::torus(0.4, 0.7);
    let phi = m.evaluate(&x, 20);
    assert!(validate_pseudo_orbit(&cat, &phi, 0.01));
}

#[test]
fn cat_shadowing_constant() {
    // symmetric matrix: orthonormal eigenbasis, K = 1/(1 - lambda_s) + 1/(lambda_u - 1)
    let lu = (3.0 + SQRT5) / 2.0;
    let ls = (3.0 - SQRT5) / 2.0;
    let expected = 1.0 / (1.0 - ls) + 1.0 / (lu - 1.0);
    assert!((expected - SQRT5).abs() < 1e-12);
    let k = shadowing_constant(IntMatrix::CAT).unwrap();
    assert!((k - expected).abs() < 1e-9, "{k}");

    let f = make_linear([[2, 1], [1, 1]]).unwrap();
    let m = random_method(&f, 1e-3, 11).unwrap();
    let x = TorusPoint::torus(0.31, 0.77);
    let po = PseudoOrbit::new(&f, m.evaluate(&x, 50), 1e-3).unwrap();
    let s = shadow_solve_linear(IntMatrix::CAT, &po).unwrap();
    assert!(s.achieved <= expected * 1e-3, "{}", s.achieved);
    assert!(shadowing_constant(IntMatrix::IDENTITY).is_err());
}

#[test]
fn newton_shadows_perturbed_cat() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let g = make_conservative_perturbation(&cat, 1e-3, PerturbationMode::ShearSin).unwrap();
    let po = orbit_segment(&cat, &TorusPoint::torus(0.2, 0.3), 50).unwrap();
    let out = shadow_solve_newton(&g, &po, 1e-10, 40).unwrap();
    let s = out.shadow().expect("converges");
    assert!(s.achieved < 0.05);
    let worst = s
        .orbit
        .iter()
        .zip(po.points())
        .map(|(a, b)| torus_dist(a, b).unwrap())
        .fold(0.0, f64::max);
    assert!((worst - s.achieved).abs() < 1e-12);
    for w in s.orbit.windows(2) {
        assert!(torus_dist(&g.forward(&w[0]), &w[1]).unwrap() < 1e-9);
    }
}

#[test]
fn neutral_circle_drift_is_certified() {
    let id = make_rotation(0.0).unwrap();
    let m = method_from_map(&id, &make_rotation(0.01).unwrap()).unwrap();
    let v = check_inverse_shadowing(&id, &m, &TorusPoint::circle(0.0), 0.1, 25, 1.0 / 512.0).unwrap();
    assert!(v.is_certified_failure());
    // min over y of max_k |y + k delta|, |k| <= 25, is attained at y = 0
    let min = v.min_over_grid().unwrap();
    assert!((min - 0.25).abs() < 1e-9, "{min}");
}

#[test]
fn perturbed_cat_is_tracked() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let g = make_conservative_perturbation(&cat, 1e-3, PerturbationMode::ShearSin).unwrap();
    let m = method_from_map(&cat, &g).unwrap();
    let x = TorusPoint::torus(0.2, 0.3);
    assert!(check_inverse_shadowing(&cat, &m, &x, 0.1, 30, 1.0 / 512.0)
        .unwrap()
        .is_tracked());
    assert!(check_weak_inverse(&cat, &m, &x, 0.1, 30, 1.0 / 512.0)
        .unwrap()
        .is_tracked());
}

#[test]
fn shear_drift_defeats_weak_tracking() {
    let shear = make_linear([[1, 0], [1, 1]]).unwrap();
    let g = make_translation_method_map(&shear, 0.01).unwrap();
    let m = method_from_map(&shear, &g).unwrap();
    let v = check_weak_inverse(&shear, &m, &TorusPoint::origin(2), 0.1, 25, 1.0 / 512.0).unwrap();
    assert!(v.is_failure());
    assert!(v.min_over_grid().unwrap() >= 0.25 - 1e-9);
}

#[test]
fn golden_rotation_orbital_versus_pointwise() {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let f = make_rotation(theta).unwrap();
    let m = method_from_map(&f, &make_rotation(theta + 1e-3).unwrap()).unwrap();
    let x = TorusPoint::circle(0.0);
    assert!(check_orbital_inverse(&f, &m, &x, 0.1, 1000, 1.0 / 512.0)
        .unwrap()
        .is_tracked());
    assert!(check_inverse_shadowing(&f, &m, &x, 0.1, 1000, 1.0 / 512.0)
        .unwrap()
        .is_failure());
}

#[test]
fn cat_periodic_counts() {
    // |det(A^n - I)| = L_{2n} - 2 with Lucas numbers L_0 = 2, L_1 = 1
    let mut lucas = vec![2i64, 1];
    for i in 2..=12 {
        lucas.push(lucas[i - 1] + lucas[i - 2]);
    }
    for n in 1..=6 {
        let pts = periodic_points_linear(IntMatrix::CAT, n).unwrap();
        assert_eq!(pts.len() as i64, lucas[2 * n] - 2, "period {n}");
    }
    let fixed = periodic_points_linear(IntMatrix::CAT, 1).unwrap();
    assert!(close(&fixed[0].point, [0.0, 0.0], 1e-12));
}

#[test]
fn cat_origin_classification() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let rec = classify_periodic(&cat, &TorusPoint::origin(2), 1, 1e-9).unwrap();
    assert_eq!(rec.classification, Classification::Hyperbolic);
    let mut moduli: Vec<f64> = rec.eigenvalues.iter().map(|e| e.modulus()).collect();
    moduli.sort_by(f64::total_cmp);
    assert!((moduli[0] - (3.0 - SQRT5) / 2.0).abs() < 1e-12);
    assert!((moduli[1] - (3.0 + SQRT5) / 2.0).abs() < 1e-12);
}

#[test]
fn cat_certificate_rate() {
    let cert = anosov_certificate_linear(IntMatrix::CAT);
    let c = cert.certificate().unwrap();
    assert!((c.lambda - (3.0 - SQRT5) / 2.0).abs() < 1e-12);
    assert!((c.lambda - 0.381_966_011_3).abs() < 1e-10);
    assert!(!anosov_certificate_linear(IntMatrix::SHEAR).is_granted());
}

#[test]
fn cones() {
    let cat = make_linear([[2, 1], [1, 1]]).unwrap();
    let r = cone_report(&cat, 0.2, 64, 1);
    assert!(r.holds);
    assert!(r.min_expansion >= 2.0, "{}", r.min_expansion);
    let g = make_conservative_perturbation(&cat, 1e-3, PerturbationMode::ShearSin).unwrap();
    assert!(cone_report(&g, 0.2, 256, 1).holds);
    let shear = make_linear([[1, 0], [1, 1]]).unwrap();
    assert!(!cone_report(&shear, 0.2, 64, 1).holds);
}
