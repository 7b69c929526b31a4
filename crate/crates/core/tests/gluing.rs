//! Pieces must be glued consistently: a small loop around any cone
//! self-intersection line transports to the identity.

use knotcover_core::cone::{assign_generators, build_cone, choose_apex, split_cone};
use knotcover_core::diagram::{central_diagram, generator_names};
use knotcover_core::geom::{orthonormal_basis, Vec3};
use knotcover_core::group::{add_branching_relators, enumerate};
use knotcover_core::knot::{sample_parametric, ParametricKnot, DEFAULT_SAMPLES};
use knotcover_core::transport::{Portals, WorldState};

fn check(knot: ParametricKnot, order: u32, expected_order: usize) {
    let c = sample_parametric(&knot, DEFAULT_SAMPLES).unwrap();
    let apex = choose_apex(&c, None).unwrap();
    let d = central_diagram(&c, &apex).unwrap().mirrored();
    let g = enumerate(&add_branching_relators(&d.wirtinger(), order), 10_000).unwrap();
    assert_eq!(g.table.order(), expected_order);
    let s = split_cone(&build_cone(&c, &apex).unwrap()).unwrap();
    let segs = assign_generators(&s, &generator_names(d.arc_count()), &g).unwrap();
    let portals = Portals::new(&segs, c.diameter());
    let e = WorldState { element: g.table.identity() };
    assert!(!s.double_lines.is_empty());
    for line in &s.double_lines {
        for f in [0.2, 0.5, 0.8] {
            let mid = apex.lerp(&line.end, f);
            let (u, v) = orthonormal_basis(&(line.end - apex).normalize());
            let r = 1e-3 * c.diameter();
            let lp: Vec<Vec3> = (0..=64)
                .map(|k| {
                    let th = std::f64::consts::TAU * k as f64 / 64.0;
                    mid + (u * th.cos() + v * th.sin()) * r
                })
                .collect();
            let (w, log) = portals.transport_path(&g.table, e, &lp).unwrap();
            assert_eq!(log.len(), 4);
            assert_eq!(w, e);
        }
    }
}

#[test]
fn trefoil_order_two() {
    check(ParametricKnot::trefoil(), 2, 6);
}

#[test]
fn trefoil_order_three_fixes_the_sign_convention() {
    check(ParametricKnot::trefoil(), 3, 24);
}

#[test]
fn figure_eight_order_two() {
    check(ParametricKnot::figure_eight(), 2, 10);
}

#[test]
fn solomon_order_two() {
    check(ParametricKnot::solomon_seal(), 2, 10);
}
