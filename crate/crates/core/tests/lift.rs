use helix::experiments::LIFT_FAMILIES;
use helix::lift::{d3_reduced, lift, restrict, verify_scalings, D3_CONSTANT_BOUND};
use helix::{build_grid, SigmaParam, VectorField3};

#[test]
fn scalings_hold_for_every_family() {
    let g = build_grid(32, 32).unwrap();
    for s in [1.0, 4.0, 16.0] {
        let sp = SigmaParam::finite(s).unwrap();
        for fam in LIFT_FAMILIES {
            let r = verify_scalings(&fam.sample(&g, 1.0), sp, 16).unwrap();
            assert!(r.l2_rel_error < 1e-8, "{s} {}: {r:?}", fam.name());
            assert!((r.grad_ratio - 1.0).abs() < 1e-8, "{r:?}");
            assert!(r.d3_constant <= D3_CONSTANT_BOUND, "{r:?}");
        }
    }
}

#[test]
fn d3_bound_on_rough_fields() {
    let g = build_grid(32, 32).unwrap();
    let w = VectorField3::from_fn(&g, |a, b| {
        let bump = 1.0 - a * a - b * b;
        [bump * (5.0 * b).sin(), bump * (4.0 * a).cos(), bump * a * b]
    });
    for s in [1.0, 2.0, 8.0] {
        let r = verify_scalings(&w, SigmaParam::finite(s).unwrap(), 16).unwrap();
        assert!(r.d3_constant <= D3_CONSTANT_BOUND, "{r:?}");
    }
}

#[test]
fn vertical_derivative_matches_differences() {
    let g = build_grid(24, 32).unwrap();
    let sp = SigmaParam::finite(2.0).unwrap();
    let w = LIFT_FAMILIES[0].sample(&g, 1.0);
    let exact = d3_reduced(&w, sp).unwrap();
    let coarse = lift(&w, sp, 64).unwrap().d3_fd(0).sub(&exact).unwrap().max_norm();
    let fine = lift(&w, sp, 128).unwrap().d3_fd(0).sub(&exact).unwrap().max_norm();
    assert!(fine < coarse / 3.0, "{coarse:.3e} {fine:.3e}");
}

#[test]
fn restrict_undoes_lift() {
    let g = build_grid(16, 16).unwrap();
    let w = LIFT_FAMILIES[1].sample(&g, 1.0);
    let u = lift(&w, SigmaParam::finite(3.0).unwrap(), 8).unwrap();
    assert!(restrict(&u).sub(&w).unwrap().max_norm() < 1e-14);
    assert!(lift(&w, SigmaParam::Planar, 8).is_err());
}
