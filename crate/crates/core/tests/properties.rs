use ddwave::stability::*;
use ddwave::wave::*;
use ddwave::{Grid, ModelParams, WaveContext};
use proptest::prelude::*;

fn ctx_strategy() -> impl Strategy<Value = WaveContext> {
    (0.5f64..8.0, 0.0f64..0.9, 1.5f64..8.0, 0.0f64..0.9).prop_map(|(a, mu, p, c)| {
        WaveContext::new(ModelParams::from_mu(a, mu, p).unwrap(), c).unwrap()
    })
}

fn moving_ctx() -> impl Strategy<Value = WaveContext> {
    (0.1f64..10.0, 0.0f64..0.99, 1.05f64..12.0, 0.01f64..0.99).prop_map(|(a, mu, p, c)| {
        WaveContext::new(ModelParams::from_mu(a, mu, p).unwrap(), c).unwrap()
    })
}

/// A smooth periodic field: a few Gaussian bumps with random sign and width.
fn field(grid: &Grid, bumps: &[(f64, f64, f64)]) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|&x| {
            bumps
                .iter()
                .map(|&(amp, x0, w)| amp * (-((x - x0) / w).powi(2)).exp())
                .sum()
        })
        .collect()
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -8.0f64..8.0, 0.7f64..3.0), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pohozaev_and_profile_equation(ctx in ctx_strategy()) {
        let grid = profile_grid(&ctx, 1024).unwrap();
        let field = profile_on_grid(&ctx, &grid).unwrap();
        let (r1, r2) = pohozaev_residuals(&field, &ctx);
        prop_assert!(r1.abs() <= 1e-8 && r2.abs() <= 1e-8, "{r1:e} {r2:e}");
        prop_assert!(ode_residual(&field, &ctx) <= 1e-8);
    }

    #[test]
    fn scaling_law(ctx in ctx_strategy()) {
        let params = ctx.params();
        let norm_sq = |c: &WaveContext| {
            let g = profile_grid(c, 2048).unwrap();
            g.l2_sq(&profile_on_grid(c, &g).unwrap().values)
        };
        let rest = norm_sq(&WaveContext::new(*params, 0.0).unwrap());
        let p = params.p();
        let predicted = params.a().powf(-0.5)
            * ctx.big_a().powf((5.0 - p) / (2.0 * p - 2.0))
            * ctx.big_b().sqrt()
            * rest;
        let got = norm_sq(&ctx);
        prop_assert!((got - predicted).abs() <= 1e-8 * predicted);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn k_alpha_is_linear_combination(ctx in ctx_strategy(), b in bumps(), alpha in -3.0f64..3.0) {
        let grid = Grid::new(40.0, 256).unwrap();
        let u = field(&grid, &b);
        let rep = functionals(&grid, &u, &ctx, alpha);
        prop_assert_eq!(rep.k_alpha, alpha * rep.p1 + rep.p2);
    }

    #[test]
    fn energy_plus_momentum_identity(ctx in ctx_strategy(), bu in bumps(), bw in bumps()) {
        let grid = Grid::new(40.0, 256).unwrap();
        let u = field(&grid, &bu);
        let w = field(&grid, &bw);
        let params = ctx.params();
        let c = ctx.c();
        let (e, m) = energy_momentum(&grid, &u, &w, params);
        let s: Vec<f64> = w.iter().zip(&u).map(|(w, u)| w + c * u).collect();
        let sx = grid.derivative(&s);
        let rep = functionals(&grid, &u, &ctx, 0.0);
        let rhs = 0.5 * grid.l2_sq(&s) + 0.5 * params.b() * grid.l2_sq(&sx) + rep.v;
        let scale = grid.l2_sq(&u) + grid.l2_sq(&w) + grid.l2_sq(&sx) + rep.norms.dx_l2_sq + rep.norms.lp1;
        prop_assert!((e + c * m - rhs).abs() <= 1e-10 * scale);
    }

    #[test]
    fn sigma_vanishes(ctx in moving_ctx()) {
        prop_assert!(sigma_residual(&ctx).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn threshold_is_root_of_k(a in 0.1f64..10.0, mu in 0.0f64..0.999, p in 1.05f64..12.0) {
        let params = ModelParams::from_mu(a, mu, p).unwrap();
        let c02 = critical_velocity_squared(&params);
        let scale = a * (p + 3.0) * 2.0;
        prop_assert!(quartic_k(c02, &params).abs() <= 1e-12 * scale);
        prop_assert!(c02 > 0.0 && c02 <= (p - 1.0) / (p + 3.0) + 1e-15);
    }

    #[test]
    fn alpha_threshold_duality(ctx in moving_ctx()) {
        let c02 = critical_velocity_squared(ctx.params());
        prop_assume!((ctx.c2() - c02).abs() > 1e-9);
        let alpha = alpha_and_c(&ctx).unwrap().alpha;
        prop_assert_eq!(alpha > 0.5, ctx.c2() < c02);
    }

    #[test]
    fn endpoint_identity(p in 1.05f64..12.0, mu in 0.0f64..=1.0) {
        let expected = (mu - 1.0).powi(2) * (p + 3.0) * (5.0 - p);
        prop_assert!((g_eval(1.0, p, mu) - expected).abs() <= 1e-12 * (p + 3.0).powi(2));
    }

    #[test]
    fn p5_factorization(mu in 0.0f64..=1.0, z in 0.0f64..3.0) {
        let f = 16.0 * (z - 1.0) * (6.0 * mu * mu * z * z - 9.0 * mu * z + mu + 2.0);
        let scale = g_coefficients(5.0, mu).scale() * (1.0 + z).powi(3);
        prop_assert!((g_eval(z, 5.0, mu) - f).abs() <= 1e-12 * scale);
    }

    #[test]
    fn mu1_factorization(p in 1.05f64..12.0, z in 0.0f64..3.0) {
        let f = 2.0 * (p + 1.0) * (p + 3.0) * (z - (p - 1.0) / (p + 3.0)) * (z - 1.0).powi(2);
        let scale = g_coefficients(p, 1.0).scale() * (1.0 + z).powi(3);
        prop_assert!((g_eval(z, p, 1.0) - f).abs() <= 1e-12 * scale);
    }

    #[test]
    fn root_count_parity(p in prop_oneof![1.1f64..4.9, 5.1f64..12.0], mu in 0.0f64..0.99) {
        let n = roots_in_unit_interval(p, mu).unwrap().len();
        prop_assert_eq!(n % 2 == 1, g_eval(1.0, p, mu) > 0.0);
        prop_assert_eq!(n % 2 == 1, p < 5.0);
    }

    #[test]
    fn classification_agrees_with_sign_of_g(p in 1.1f64..12.0, mu in 0.0f64..0.99, t in 0.0f64..1.0) {
        let rep = classify_region(p, mu).unwrap();
        let z = t.clamp(1e-6, 1.0 - 1e-6);
        prop_assume!(rep.roots_in_unit.iter().all(|r| (r - z).abs() > 1e-6));
        prop_assert_eq!(rep.contains(z), g_eval(z, p, mu) > 0.0);
    }
}

// Empirical: the window endpoints move apart as mu grows.
#[test]
fn window_endpoints_monotone_in_mu() {
    for p in [6.0, 7.0, 8.0, 10.0] {
        let mu_p = critical_mu(p).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for i in 1..=40 {
            let mu = mu_p + (0.99 - mu_p) * i as f64 / 40.0;
            let (z1, z2) = classify_region(p, mu).unwrap().interval.unwrap();
            if let Some((q1, q2)) = prev {
                assert!(z1 < q1 && z2 > q2, "p={p} mu={mu}");
            }
            prev = Some((z1, z2));
        }
    }
}

#[test]
fn lower_root_decreasing_in_mu_below_five() {
    for p in [2.0, 3.0, 4.0] {
        let z = |mu: f64| classify_region(p, mu).unwrap().interval.unwrap().0;
        let mut prev = z(0.0);
        for i in 1..=40 {
            let cur = z(0.99 * i as f64 / 40.0);
            assert!(cur < prev, "p={p}");
            prev = cur;
        }
    }
}
