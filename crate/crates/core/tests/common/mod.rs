#![allow(dead_code)]

use groupsim::blayer::WallLaw;
use groupsim::catalog::find;
use groupsim::scenario::{AppParams, Scenario};
use groupsim::verify::symmetry::{BlayerAction, LakeAction, PlumeAction};
use groupsim::verify::GroupElement;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn bundled(name: &str) -> Scenario {
    find(name).unwrap().scenario().unwrap()
}

/// Lake case 1 with `m = 2`, solved by the boundary-value solver.
pub fn lake_quadratic() -> Scenario {
    let mut s = bundled("fig2");
    if let AppParams::Lake(p) = &mut s.params {
        p.m = 2.0;
        p.gamma = 0.01;
    }
    s
}

/// Boundary layer with `a1 = 1` and the wall law that makes the fields exact.
pub fn blayer_unsteady() -> Scenario {
    let mut s = bundled("blayer-ref");
    if let AppParams::Blayer(p) = &mut s.params {
        p.prandtl = 0.7;
        p.a1 = 1.0;
        p.wall_law = WallLaw::Consistent;
    }
    s
}

pub fn random_lake(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::lake(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
}

pub fn random_blayer(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::blayer(
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-0.25..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

pub fn random_plume(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::plume(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
}

pub fn broken_lake(c_w: f64) -> GroupElement {
    GroupElement::Lake(LakeAction {
        c_w,
        c_q: 1.0,
        time_exponent: Some(1.0),
    })
}

pub fn broken_blayer(c: f64) -> GroupElement {
    GroupElement::Blayer(BlayerAction {
        c,
        c_psi: 1.0,
        k_x: 0.0,
        k_t: 0.0,
        k_psi: 0.0,
        time_exponent: Some(1.0),
    })
}

pub fn broken_plume(e_x: f64) -> GroupElement {
    GroupElement::Plume(PlumeAction {
        e_x,
        e_c: 1.0,
        kappa1_exponent: Some(1.0),
    })
}

/// Relative norms of two report sets agree within `factor` both ways.
pub fn within_band(
    base: &[groupsim::verify::ResidualReport],
    mapped: &[groupsim::verify::ResidualReport],
    factor: f64,
) -> bool {
    base.len() == mapped.len()
        && base.iter().zip(mapped).all(|(b, m)| {
            let (x, y) = (b.relative_max(), m.relative_max());
            y <= factor * x && x <= factor * y
        })
}
