//! Property tests for fields, residuals and closed-form families.

use std::sync::Arc;

use biharm_core::families::{
    best_sobolev_constant, classical_example, classify_mobius, mobius_conformal_factor,
    mobius_normal_form, sobolev_quotient, Bubble, BubbleRadial, ClassicalExample, Classification,
    ClassifyOptions, Epsilon, FamilyParams, FamilyRegistry, GaussianRadial, MetricPairing,
    MobiusTransform, RadialQuadrature, ScaledRadial, SobolevConvention,
};
use biharm_core::fields::{
    fd_consistency, laplace_beltrami, laplacian_flat, ConformalMetric, DerivativeMode,
    EinsteinDatum, ExpLinear, FieldN, FnField, Point4, RadialPower, RationalQuadratic,
    ScalarField, StandardGrid, Vec4,
};
use biharm_core::residuals::{
    curvature_law_residual, eq4d_residual, estimate_a, sf_residual, CodomainCurvature,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(r: f64) -> impl Strategy<Value = Point4> {
    prop::array::uniform4(-r..r).prop_map(Point4::from)
}

fn bubble(delta: f64, center: Point4) -> RationalQuadratic {
    RationalQuadratic::bubble4(delta, center)
}

fn fd_ratio(f: &dyn ScalarField, x: &Point4, h: f64) -> f64 {
    let coarse = fd_consistency(f, x, h).unwrap();
    let fine = fd_consistency(f, x, h / 2.0).unwrap();
    coarse.laplacian / fine.laplacian
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fd_laplacian_converges_at_second_order(
        x in point(1.5),
        delta in 0.5f64..2.0,
        k in prop::array::uniform4(-0.5f64..0.5),
    ) {
        let fields: Vec<Box<dyn ScalarField>> = vec![
            Box::new(bubble(delta, Point4::zeros())),
            Box::new(ExpLinear { k: Vec4::from(k) }),
            Box::new(RadialPower::new(1.0, -1.0, Point4::new(3.0, 0.0, 0.0, 0.0))),
        ];
        for f in &fields {
            let r = fd_ratio(f.as_ref(), &x, 2e-2);
            prop_assert!((r - 4.0).abs() < 0.4, "{}: ratio {r}", f.describe());
        }
    }

    #[test]
    fn flat_laplace_beltrami_is_the_flat_laplacian(x in point(3.0), delta in 0.3f64..3.0) {
        let f = bubble(delta, Point4::new(0.1, 0.2, 0.0, -0.3));
        for mode in [DerivativeMode::Analytic, DerivativeMode::fd()] {
            let lb = laplace_beltrami(&f, &ConformalMetric::Flat, &x, mode).unwrap();
            prop_assert_eq!(lb, laplacian_flat(&f, &x, mode).unwrap());
        }
    }

    #[test]
    fn sf_identity_holds_off_solutions(
        x in point(2.0),
        delta in 0.5f64..2.0,
        c in point(0.5),
        a in -2.0f64..2.0,
        big_a in -3.0f64..3.0,
    ) {
        let f = bubble(delta, c);
        let datum = EinsteinDatum { n: 4, a };
        let r = |y: &Point4| eq4d_residual(&f, a, big_a, y).unwrap();
        let h = 1e-4;
        let grad_r = Vec4::from_fn(|k, _| {
            let mut e = Vec4::zeros();
            e[k] = h;
            (r(&(x + e)) - r(&(x - e))) / (2.0 * h)
        });
        let lam = f.value(&x);
        let grad_l = f.gradient(&x).unwrap();
        let expected = grad_r * lam - grad_l * (3.0 * r(&x));
        let got = sf_residual(&f, &datum, &x).unwrap();
        prop_assert!((got - expected).norm() < 1e-4 * (1.0 + expected.norm()));
    }

    #[test]
    fn curvature_law_is_consistent_for_bubbles(x in point(4.0), delta in 0.3f64..3.0, c in point(1.0)) {
        let f = bubble(delta, c);
        let r = curvature_law_residual(
            &f,
            4,
            0.0,
            &CodomainCurvature::FromConstants { big_a: -2.0, a: 0.0 },
            &x,
        )
        .unwrap();
        prop_assert!(r.abs() < 1e-6, "{r}");
    }

    #[test]
    fn bubbles_solve_the_critical_equation(
        n in 3usize..=6,
        delta in 0.3f64..3.0,
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = Bubble::new(n, delta, center).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let (v, _, lap) = b.derivatives(&x);
            let p = (n as f64 + 2.0) / (n as f64 - 2.0);
            let r = lap + (n * (n - 2)) as f64 / 4.0 * v.powf(p);
            prop_assert!(r.abs() < 1e-8, "n = {n}: {r}");
            let fd = b.laplacian_or_fd(&x, 1e-3).unwrap();
            prop_assert!((fd - lap).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_form_reproduces_flat_sphere_factor(seed in any::<u64>(), two in any::<bool>()) {
        let eps = if two { Epsilon::Two } else { Epsilon::Zero };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = MobiusTransform::random(&mut rng, eps);
        let lambda = mobius_conformal_factor(&t, MetricPairing::FLAT_SPHERE).unwrap();
        let nf = mobius_normal_form(&t, MetricPairing::FLAT_SPHERE).unwrap();
        prop_assert!(nf.delta > 0.0);
        let field = nf.field();
        let grid = StandardGrid::new(100, 5.0, 0.05, &lambda.singular_set(), seed);
        for x in &grid.points {
            let (a, b) = (field.value(x), lambda.value(x));
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn composition_multiplies_conformal_factors(
        seed in any::<u64>(),
        e1 in any::<bool>(),
        e2 in any::<bool>(),
        x in point(3.0),
    ) {
        let pick = |b: bool| if b { Epsilon::Two } else { Epsilon::Zero };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = MobiusTransform::random(&mut rng, pick(e1));
        let t2 = MobiusTransform::random(&mut rng, pick(e2));
        let ff = MetricPairing::FLAT_FLAT;
        let Ok(y) = t1.apply(&x) else { return Ok(()) };
        prop_assume!((x - t1.t_in).norm() > 0.05 && (y - t2.t_in).norm() > 0.05);
        let composed = t2.compose(&t1);
        let lhs = mobius_conformal_factor(&composed, ff).unwrap().value(&x);
        let rhs = mobius_conformal_factor(&t2, ff).unwrap().value(&y)
            * mobius_conformal_factor(&t1, ff).unwrap().value(&x);
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
        let direct = t2.apply(&y).unwrap();
        let via = composed.apply(&x).unwrap();
        prop_assert!((direct - via).norm() < 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn sphere_isometries_have_unit_factor(seed in any::<u64>(), two in any::<bool>()) {
        let eps = if two { Epsilon::Two } else { Epsilon::Zero };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = MobiusTransform::random_isometry(&mut rng, eps);
        prop_assert!(t.on_isometry_locus(1e-12));
        let ss = MetricPairing::SPHERE_SPHERE;
        let f = mobius_conformal_factor(&t, ss).unwrap();
        let grid = StandardGrid::new(60, 3.0, 0.05, &f.singular_set(), seed);
        for x in &grid.points {
            prop_assert!((f.value(x) - 1.0).abs() < 1e-12);
        }
        let mut bent = t.clone();
        bent.alpha *= 1.01;
        prop_assert!(!bent.on_isometry_locus(1e-9));
        let g = mobius_conformal_factor(&bent, ss).unwrap();
        let vals: Vec<f64> = grid.points.iter().map(|x| g.value(x)).collect();
        let range = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(range > 1e-3, "range {range}");
        let v = classify_mobius(&bent, ss, &ClassifyOptions { grid_points: 30, ..Default::default() }).unwrap();
        prop_assert_eq!(v.classification, Classification::NotBiharmonic);
    }

    #[test]
    fn transform_literal_round_trips(seed in any::<u64>(), two in any::<bool>()) {
        let eps = if two { Epsilon::Two } else { Epsilon::Zero };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = MobiusTransform::random(&mut rng, eps);
        let back: MobiusTransform = t.to_string().parse().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn sobolev_quotient_is_scale_and_dilation_invariant(
        delta in 0.3f64..3.0,
        scale in 0.1f64..10.0,
        s in 0.2f64..5.0,
    ) {
        let quad = RadialQuadrature::default();
        let base = sobolev_quotient(&BubbleRadial { n: 4, delta }, &quad).unwrap().value;
        let scaled = sobolev_quotient(&ScaledRadial { scale, inner: BubbleRadial { n: 4, delta } }, &quad)
            .unwrap()
            .value;
        prop_assert!(((scaled - base) / base).abs() < 1e-10);
        let best = best_sobolev_constant(4, SobolevConvention::UnitSphereVolume);
        prop_assert!(((base - best) / best).abs() < 5e-3);
        let g = sobolev_quotient(&GaussianRadial { n: 4, s }, &quad).unwrap().value;
        prop_assert!(g > best * 1.01, "{g} vs {best}");
    }
}

#[test]
fn spherical_laplacian_of_a_coordinate_matches_an_independent_stencil() {
    // X₁ = 2x₁/(1+|x|²) is the first ambient coordinate restricted to S⁴,
    // an eigenfunction with Δ_{S⁴} X₁ = −4 X₁.
    let x1 = FnField::new("X1", |x: &Point4| 2.0 * x[0] / (1.0 + x.norm_squared()));
    let mu2 = |x: &Point4| (2.0 / (1.0 + x.norm_squared())).powi(2);
    // Divergence form on the chart: Δ_g f = μ⁻⁴ ∂ᵢ(μ² ∂ᵢ f).
    let stencil = |x: &Point4, h: f64| {
        let f0 = x1.value(x);
        let mut acc = 0.0;
        for k in 0..4 {
            let mut e = Vec4::zeros();
            e[k] = h;
            acc += mu2(&(x + e * 0.5)) * (x1.value(&(x + e)) - f0)
                - mu2(&(x - e * 0.5)) * (f0 - x1.value(&(x - e)));
        }
        acc / (h * h) / (mu2(x) * mu2(x))
    };
    let grid = StandardGrid::new(40, 2.0, 0.05, &[], 3);
    for x in &grid.points {
        let lb = laplace_beltrami(&x1, &ConformalMetric::Spherical, x, DerivativeMode::fd()).unwrap();
        let exact = -4.0 * x1.value(x);
        assert!((lb - exact).abs() < 1e-5, "{lb} vs {exact}");
        let (e1, e2) = ((stencil(x, 4e-2) - lb).abs(), (stencil(x, 2e-2) - lb).abs());
        assert!(e2 < 1e-3);
        if e1 > 1e-8 {
            assert!((e1 / e2 - 4.0).abs() < 0.6, "ratio {}", e1 / e2);
        }
    }
}

#[test]
fn catalog_solutions_recover_their_constants() {
    let mut entries: Vec<_> = [
        ClassicalExample::InverseRadius,
        ClassicalExample::SphereIdentity,
        ClassicalExample::PoincareBall,
        ClassicalExample::PowerAlpha(-1.0),
        ClassicalExample::HarmonicInversion,
    ]
    .into_iter()
    .map(classical_example)
    .collect();
    entries.push(
        FamilyRegistry::standard()
            .build("bubble", &FamilyParams { delta: 1.7, ..FamilyParams::default() })
            .unwrap(),
    );
    for e in entries {
        let grid = e.grid(2);
        let declared = e.big_a.unwrap();
        let est = estimate_a(e.field.as_ref(), e.a, &grid.points).unwrap();
        assert!((est.value - declared).abs() < 1e-8, "{}: {}", e.name, est.value);
        assert!(est.fit_residual < 1e-8, "{}: {}", e.name, est.fit_residual);
        if let (Some(r_h), ConformalMetric::Flat) = (e.r_h, &e.metric) {
            for x in grid.points.iter().take(50) {
                let r = curvature_law_residual(e.field.as_ref(), 4, 4.0 * e.a, &CodomainCurvature::Constant(r_h), x)
                    .unwrap();
                assert!(r.abs() < 1e-6, "{}: {r}", e.name);
            }
        }
    }
}

#[test]
fn flat_sphere_verdicts_are_corroborated() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for eps in Epsilon::ALL {
        for _ in 0..10 {
            let t = MobiusTransform::random(&mut rng, eps);
            let v = classify_mobius(&t, MetricPairing::FLAT_SPHERE, &ClassifyOptions::default()).unwrap();
            assert_eq!(v.classification, Classification::ProperBiharmonic);
            assert!(v.evidence.bfo_sup < 1e-5);
            assert!(v.evidence.tension_sup > 0.0);
            assert!(v.evidence.eq4d_sup.unwrap() < 1e-6);
            let sf = classify_mobius(&t, MetricPairing::SPHERE_FLAT, &ClassifyOptions::default()).unwrap();
            assert!(sf.evidence.bfo_sup > 1e-2);
        }
    }
}

#[test]
fn perturbed_solutions_are_detected() {
    use biharm_core::fields::{BumpPerturbation, Product};
    use biharm_core::residuals::bfo_residual;
    let e = classical_example(ClassicalExample::SphereIdentity);
    let p = Product::new(e.field.clone(), Arc::new(BumpPerturbation { amplitude: 0.1 }));
    let grid = e.grid(0);
    let datum = EinsteinDatum { n: 4, a: e.a };
    let sup = grid
        .points
        .iter()
        .map(|x| bfo_residual(&p, &datum, x).unwrap().norm())
        .fold(0.0, f64::max);
    assert!(sup > 1e-2);
}
