mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srbm2d::{points, Srbm, Vector2};

fn instance(seed: u64) -> Srbm {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Nonzero root of t ↦ γ(t·p) by bisection, without the closed form.
fn bisect_ray(s: &Srbm, p: Vector2) -> Vector2 {
    let eps = 1e-9;
    let d = if s.gamma(eps * p) > 0.0 { p } else { -p };
    let (mut lo, mut hi) = (eps, 1.0);
    while s.gamma(hi * d) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if s.gamma(mid * d) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)) * d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn gamma_strictly_concave(seed in any::<u64>(), a in -5.0..5.0f64, b in -5.0..5.0f64,
                              c in -5.0..5.0f64, d in -5.0..5.0f64, t in 0.01..0.99f64) {
        let s = instance(seed);
        let (x, y) = (Vector2::new(a, b), Vector2::new(c, d));
        prop_assume!(x.distance(y) > 1e-3);
        let mid = s.gamma(t * x + (1.0 - t) * y);
        prop_assert!(mid > t * s.gamma(x) + (1.0 - t) * s.gamma(y));
    }

    #[test]
    fn normal_is_minus_gradient(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let s = instance(seed);
        let th = Vector2::new(a, b);
        let h = 1e-6;
        let g1 = (s.gamma(th + h * Vector2::E1) - s.gamma(th - h * Vector2::E1)) / (2.0 * h);
        let g2 = (s.gamma(th + h * Vector2::E2) - s.gamma(th - h * Vector2::E2)) / (2.0 * h);
        let n = s.normal(th);
        let err = (n + Vector2::new(g1, g2)).norm() / n.norm().max(1.0);
        prop_assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn p_orthogonal_to_other_column(seed in any::<u64>()) {
        let s = instance(seed);
        for i in [1, 2] {
            prop_assert!(s.p_vec(i).dot(s.r().column(3 - i)).abs() <= 1e-12);
        }
    }

    #[test]
    fn characteristic_points_on_ellipse(seed in any::<u64>()) {
        let s = instance(seed);
        let cp = points::CharPoints::compute(&s);
        for p in cp.all() {
            prop_assert!(s.gamma(p).abs() <= 1e-9, "{p:?}");
        }
        for i in [1, 2] {
            prop_assert!(cp.r(i).get(i) > 0.0);
            prop_assert_eq!(cp.r(i).get(i), cp.r_tilde(i).get(i));
            prop_assert!(s.gamma_i(3 - i, cp.r(i)).abs() <= 1e-12 * (1.0 + cp.r(i).norm()));
        }
    }

    #[test]
    fn theta_r_matches_bisection(seed in any::<u64>()) {
        let s = instance(seed);
        for i in [1, 2] {
            let closed = points::theta_r(&s, i);
            let oracle = bisect_ray(&s, s.p_vec(i));
            prop_assert!(closed.distance(oracle) <= 1e-9 * (1.0 + closed.norm()),
                "{closed:?} vs {oracle:?}");
        }
    }

    #[test]
    fn vieta_root_sum(seed in any::<u64>()) {
        let s = instance(seed);
        let sig = s.sigma();
        for i in [1, 2] {
            let j = 3 - i;
            let ti = points::theta_r(&s, i).get(i);
            // −½Σ_jj t² − (Σ_ij θ_i + μ_j) t + const = 0
            let a = -0.5 * sig.get(j, j);
            let b = -(sig.get(i, j) * ti + s.mu().get(j));
            let sum = points::theta_r(&s, i).get(j) + points::theta_r_tilde(&s, i).get(j);
            prop_assert!((sum + b / a).abs() <= 1e-9 * (1.0 + (b / a).abs()));
        }
    }

    #[test]
    fn theta_max_bounds_samples(seed in any::<u64>()) {
        let s = instance(seed);
        let samples = points::ellipse_samples(&s, 1000);
        for i in [1, 2] {
            let top = points::theta_max(&s, i);
            prop_assert!(s.normal(top).get(3 - i).abs() <= 1e-9 * (1.0 + s.normal(top).norm()));
            for p in &samples {
                prop_assert!(p.get(i) <= top.get(i) + 1e-9);
            }
        }
        for p in &samples {
            prop_assert!(s.gamma(*p).abs() <= 1e-9);
        }
    }

    #[test]
    fn theta_gamma_branch(seed in any::<u64>()) {
        let s = instance(seed);
        for i in [1, 2] {
            let top = points::theta_max(&s, i);
            let expected = if s.gamma_i(3 - i, top) <= 0.0 { top } else { points::theta_r(&s, i) };
            prop_assert!(points::theta_gamma(&s, i).distance(expected) <= 1e-9 * (1.0 + top.norm()));
        }
    }
}

#[test]
fn ellipse_sample_layout() {
    let s = identity();
    let pts = points::ellipse_samples(&s, 4);
    assert_eq!(pts.len(), 4);
    for p in &pts {
        assert!((p.distance(Vector2::new(1.0, 1.0)) - 2f64.sqrt()).abs() < 1e-12);
    }
    let first = pts[0] - Vector2::new(1.0, 1.0);
    assert!(first.x2.abs() < 1e-12 && first.x1 > 0.0);
    let second = pts[1] - Vector2::new(1.0, 1.0);
    assert!(first.cross(second) > 0.0);
}

#[test]
fn e1_points_against_quadratics() {
    let s = e1();
    // θ^(2,r) = t·(−0.5, 1) with γ = −½·1.25t² + 0.5t = 0.
    let t = 0.5 / 0.625;
    assert!(points::theta_r(&s, 2).distance(Vector2::new(-0.5 * t, t)) < 1e-12);
    // θ1² − 2θ1 − 0.96 = 0 at θ2 = 0.8
    let other = 1.0 + (1.0f64 + 0.96).sqrt();
    assert!(points::theta_r_tilde(&s, 2).distance(Vector2::new(other, 0.8)) < 1e-12);
    assert!(points::theta_gamma(&s, 2).distance(Vector2::new(-0.4, 0.8)) < 1e-12);
}
