//! One time step of each algorithm against the dense oracle.

mod common;

use biot::biot::ProblemData;
use biot::mesh::unit_square_mesh;
use common::step_cases::{cases, step_discrepancy};
use common::Oracle;

#[test]
fn coupled_step_matches_dense_oracle() {
    for (i, c) in cases().iter().enumerate() {
        let (r, at) = step_discrepancy(c, true);
        assert!(r <= 1e-10, "coupled case {i}: {at} off by {r:e}");
    }
}

#[test]
fn decoupled_step_matches_dense_oracle() {
    for (i, c) in cases().iter().enumerate() {
        let (r, at) = step_discrepancy(c, false);
        assert!(r <= 1e-10, "decoupled case {i}: {at} off by {r:e}");
    }
}

#[test]
fn oracle_sanity_rigid_motion_has_no_strain() {
    let oracle = Oracle::new(&unit_square_mesh(2));
    let bl = oracle.blocks(&ProblemData::default());
    // rotation (−y, x) and translations
    let mut rot = vec![0.0; oracle.nu()];
    for (k, n) in oracle.nodes.iter().enumerate() {
        rot[2 * k] = -n[1];
        rot[2 * k + 1] = n[0];
    }
    assert!(bl.strain.mul(&rot).iter().all(|v| v.abs() < 1e-13));
    let area: f64 = bl.mass.a.iter().sum();
    assert!((area - 1.0).abs() < 1e-14);
}
