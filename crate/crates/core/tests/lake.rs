use groupsim::lake::{
    characteristic_roots, reduced_ode_general_m, temperature_case1, temperature_case2, LakeCase,
    LakeParams, LakeProfile, Profile,
};
use groupsim::linspace;
use groupsim::solve::{LakeSolution, BVP_POINTS};
use groupsim::verify::{lake_pde_residual, reduced_ode_residual};
use proptest::prelude::*;

fn paper_grids() -> (groupsim::Grid1D, groupsim::Grid1D) {
    (
        linspace(10.0, 390.0, 101).unwrap(),
        linspace(1.0, 150.0, 51).unwrap(),
    )
}

#[test]
fn closed_forms_pass_residual_gate_on_paper_grid() {
    let (z, t) = paper_grids();
    let r = lake_pde_residual(&LakeParams::case1_reference(), LakeCase::Case1, &z, &t).unwrap();
    assert!(r.relative_max() < 1e-8, "{:e}", r.relative_max());
    assert_eq!(r.samples, 101 * 51);
    let r = lake_pde_residual(&LakeParams::case2_reference(), LakeCase::Case2, &z, &t).unwrap();
    assert!(r.relative_max() < 1e-8, "{:e}", r.relative_max());
}

#[test]
fn case2_starts_homothermal_with_flat_surface() {
    let p = LakeParams::case2_reference();
    let prof = LakeProfile::case2(&p).unwrap();
    let mut excess = 0.0f64;
    for k in 0..=400 {
        let z = k as f64;
        assert_eq!(temperature_case2(&p, z, 0.0).unwrap(), p.t0);
        for t in [10.0, 40.0, 150.0] {
            excess = excess.max((temperature_case2(&p, z, t).unwrap() - p.t0).abs());
        }
    }
    let slope = 150.0 * prof.df(0.0).abs();
    assert!(slope < 1e-10 * excess, "{slope:e} {excess:e}");
}

#[test]
fn general_solver_matches_closed_form_at_unit_exponent() {
    let p = LakeParams::case1_reference();
    let grid = linspace(0.0, p.h, BVP_POINTS).unwrap();
    let sol = reduced_ode_general_m(&p, &grid).unwrap();
    let prof = LakeProfile::case1(&p).unwrap();
    let scale = grid
        .points()
        .iter()
        .fold(0.0f64, |m, z| m.max(prof.f(*z).abs()));
    let worst = grid
        .points()
        .iter()
        .zip(sol.f.values())
        .fold(0.0f64, |m, (z, v)| m.max((v - prof.f(*z)).abs()));
    assert!(worst / scale < 1e-8, "{:e}", worst / scale);
}

#[test]
fn quadratic_exponent_solves_reduced_equation() {
    let p = LakeParams {
        m: 2.0,
        gamma: 0.01,
        ..LakeParams::case1_reference()
    };
    let grid = linspace(0.0, p.h, BVP_POINTS).unwrap();
    let sol = reduced_ode_general_m(&p, &grid).unwrap();
    let r = reduced_ode_residual(&p, &sol).unwrap();
    assert!(r.max_norm < 1e-6, "{:e}", r.max_norm);
    let f = sol.f.values();
    assert!((f[f.len() - 1] - 0.01 / 2f64.sqrt()).abs() < 1e-10);
    assert!(f.iter().all(|v| *v > 0.0));

    let solved = LakeSolution::solve(&p, LakeCase::Case1).unwrap();
    assert!(matches!(solved, LakeSolution::Bvp { .. }));
    // T - T0 = (m t)^(1/m) F
    let got = solved.temperature(&p, 0.0, 8.0) - p.t0;
    assert!((got - 4.0 * f[0]).abs() < 1e-12 * got.abs());
}

#[test]
fn perturbed_exponent_breaks_reduced_equation() {
    let p = LakeParams {
        m: 2.0,
        gamma: 0.01,
        ..LakeParams::case1_reference()
    };
    let grid = linspace(0.0, p.h, 4001).unwrap();
    let sol = reduced_ode_general_m(&p, &grid).unwrap();
    let wrong = LakeParams { m: 2.1, ..p };
    assert!(reduced_ode_residual(&wrong, &sol).unwrap().max_norm > 1e-3);
}

fn ulps(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (f64::EPSILON * scale)
}

proptest! {
    #[test]
    fn roots_satisfy_vieta(
        mu in 0.0..1.0f64,
        alpha in 1.0..1e5f64,
        beta in 1.0..1e5f64,
    ) {
        let p = LakeParams { mu, alpha, beta, ..LakeParams::case1_reference() };
        let (r1, r2) = characteristic_roots(&p).unwrap();
        let s2 = p.sigma_squared();
        prop_assert!(ulps(r1 + r2, mu, r1.abs()) <= 4.0, "{} {}", r1 + r2, mu);
        prop_assert!(ulps(r1 * r2, -s2, s2) <= 4.0, "{} {}", r1 * r2, -s2);
    }

    #[test]
    fn unit_exponent_temperature_is_affine_in_time(
        z in 0.0..400.0f64,
        t1 in 0.0..200.0f64,
        t2 in 0.0..200.0f64,
    ) {
        let p = LakeParams::case1_reference();
        let d = |t: f64| temperature_case1(&p, z, t).unwrap() - p.t0;
        let sum = d(t1 + t2);
        prop_assert!((sum - d(t1) - d(t2)).abs() <= 1e-12 * (1.0 + sum.abs()));
    }

    #[test]
    fn heating_decreases_with_depth(z1 in 0.0..400.0f64, dz in 0.5..50.0f64, t in 1.0..150.0f64) {
        let z2 = (z1 + dz).min(400.0);
        prop_assume!(z2 > z1);
        for (p, temp) in [
            (LakeParams::case1_reference(), temperature_case1 as fn(&LakeParams, f64, f64) -> _),
            (LakeParams::case2_reference(), temperature_case2),
        ] {
            let a = temp(&p, z1, t).unwrap() - p.t0;
            let b = temp(&p, z2, t).unwrap() - p.t0;
            prop_assert!(a > 0.0);
            prop_assert!(b < a, "{} {}", a, b);
        }
    }
}
