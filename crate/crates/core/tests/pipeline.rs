use pnmc_core::analysis::{analyze, AnalysisOptions, Immersion, SurfaceClass};
use pnmc_core::canonical::{canonicalize, CanonicalizeOptions};
use pnmc_core::frame::{compatibility_residual, reconstruct, ReconstructOptions};
use pnmc_core::natural::{
    jet_manufacture, residual, solve_goursat_degenerate, solve_goursat_hyperbolic, HyperbolicGoursatData, JetSeed,
    JetTriple,
};
use pnmc_core::{standard_frame, CanonicalTriple, Case, Error, GridSpec, MinkVec, ScalarField};

fn seed(sign_mu: f64) -> JetSeed {
    JetSeed {
        g0: 0.2,
        g_u: vec![0.0, 0.5, -0.3, 0.2, 0.1, -0.2, 0.1],
        g_v: vec![0.0, -0.4, 0.2, 0.3, -0.1, 0.2, 0.1],
        lambda: vec![0.7, 0.3, -0.5, 0.2, 0.4, -0.3, 0.2],
        nu: vec![1.2, -0.6, 0.4, 0.1, -0.2, 0.3, 0.1],
        sign_mu,
    }
}

fn interior_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    let g = *b.grid();
    let mut m = 0.0f64;
    for i in 0..g.nu {
        for j in 0..g.nv {
            if g.is_interior(i, j) {
                m = m.max((a.at(i, j) - b.at(i, j)).abs());
            }
        }
    }
    m
}

fn surface(t: &CanonicalTriple) -> Immersion {
    reconstruct(t, MinkVec::ZERO, &standard_frame(), ReconstructOptions::default()).unwrap().immersion
}

fn degenerate(n: usize) -> CanonicalTriple {
    let g = GridSpec::square(1.0, n).unwrap();
    let nu: Vec<f64> = g.us().iter().map(|u| 1.0 + u).collect();
    let bottom: Vec<f64> = g.us().iter().map(|u| 1.5 * u).collect();
    let left: Vec<f64> = g.vs().iter().map(|v| 1.5 * v).collect();
    solve_goursat_degenerate(&nu, &bottom, &left, &vec![0.0; n], 1.0, g).unwrap()
}

#[test]
fn negative_jet_round_trip() {
    let t = jet_manufacture(Case::NegativeKH, 6, &seed(-1.0), (0.0, 0.0), 0.1, 65).unwrap();
    let a = analyze(&surface(&t), &AnalysisOptions::default()).unwrap();
    let f = &a.functions;
    assert!(interior_diff(&f.lambda1, &t.lambda) <= 5e-4);
    assert!(interior_diff(&f.mu1, &t.mu) <= 5e-4);
    assert!(interior_diff(&f.nu, &t.nu) <= 5e-4);
    assert_eq!(a.case_at(32, 32).unwrap().0, Case::NegativeKH);
    assert!(a.invariants.kmh2_direct.max() < 0.0);
    assert_eq!(a.invariants.overall, SurfaceClass::Pnmc);
}

#[test]
fn degenerate_surface_has_k_equal_nu_squared() {
    let t = degenerate(65);
    let a = analyze(&surface(&t), &AnalysisOptions::default()).unwrap();
    let nu2 = &t.nu * &t.nu;
    let rel = (&(&a.invariants.k_frame - &nu2) / &nu2).interior_max_abs();
    assert!(rel <= 1e-3, "{rel:e}");
    assert_eq!(a.invariants.overall, SurfaceClass::Pnmc);
    assert_eq!(a.case_at(32, 32).unwrap().0, Case::Degenerate);
}

#[test]
fn degenerate_surface_canonical_metric() {
    let c = canonicalize(&surface(&degenerate(65)), &CanonicalizeOptions::default()).unwrap();
    assert_eq!(c.triple.case, Case::Degenerate);
    assert!(c.metric_deviation <= 1e-3);
}

#[test]
fn hyperbolic_goursat_surface_is_pnmc() {
    let jet = JetTriple::solve(Case::NegativeKH, 12, &seed(1.0)).unwrap();
    let [l, m, n] = jet.evaluators((0.0, 0.25));
    let g = GridSpec::new(0.0, 0.5, 0.0, 0.5, 65, 65).unwrap();
    let (l2, n2) = (l.clone(), n.clone());
    let data = HyperbolicGoursatData::from_fns(
        &g,
        move |u, v| l.value(u, v) + n.value(u, v),
        move |u, v| l2.value(u, v) - n2.value(u, v),
        move |u, v| m.value(u, v).abs().ln(),
        1.0,
    );
    let t = solve_goursat_hyperbolic(&data, g).unwrap();
    assert_eq!(t.case, Case::NegativeKH);
    assert!(residual(&t).unwrap().interior_max_abs <= 1e-3);
    let a = analyze(&surface(&t), &AnalysisOptions::default()).unwrap();
    assert_eq!(a.invariants.overall, SurfaceClass::Pnmc);
}

#[test]
fn perturbed_fixture_is_refused() {
    let g = GridSpec::square(1.0, 65).unwrap();
    let exact = CanonicalTriple::constant(g, 0.0, 1.0, 1.0, Case::NegativeKH).unwrap();
    let bump = ScalarField::from_fn(g, |u, v| {
        1.0 + 0.01 * (-((u - 0.5).powi(2) + (v - 0.5).powi(2)) / 0.02).exp()
    })
    .unwrap();
    let bumped = CanonicalTriple::new(exact.lambda.clone(), &exact.mu * &bump, exact.nu.clone(), Case::NegativeKH)
        .unwrap();
    let c0 = compatibility_residual(&exact).unwrap().max_abs();
    let c1 = compatibility_residual(&bumped).unwrap().max_abs();
    assert!(c1 >= 10.0 * c0.max(1e-300));
    let err = reconstruct(&bumped, MinkVec::ZERO, &standard_frame(), ReconstructOptions::default()).unwrap_err();
    assert!(matches!(err, Error::ResidualTooLarge { .. }));
    let force = ReconstructOptions { force: true, ..Default::default() };
    let d0 = reconstruct(&exact, MinkVec::ZERO, &standard_frame(), force).unwrap().diagnostics;
    let d1 = reconstruct(&bumped, MinkVec::ZERO, &standard_frame(), force).unwrap().diagnostics;
    assert!(d1.path_discrepancy >= 10.0 * d0.path_discrepancy);
}

#[test]
fn canonicalize_undoes_affine_rescaling() {
    let t = jet_manufacture(Case::PositiveKH, 6, &seed(1.0), (0.0, 0.0), 0.1, 65).unwrap();
    let m = surface(&t);
    for (a, c) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let out = canonicalize(&m.reparametrize_affine(a, 0.0, c, 0.0).unwrap(), &CanonicalizeOptions::default())
            .unwrap();
        assert_eq!(out.triple.case, Case::PositiveKH);
        for (x, y) in [(&out.triple.lambda, &t.lambda), (&out.triple.mu, &t.mu), (&out.triple.nu, &t.nu)] {
            assert!(interior_diff(x, y) <= 1e-3);
        }
    }
}
