use helix::euler::{run_euler, EulerConfig, EulerSolver};
use helix::families::VorticityFamily;
use helix::lift::vorticity3d_check;
use helix::{build_grid, SigmaParam};

#[test]
fn blob_conserves_vorticity_norms() {
    let g = build_grid(64, 128).unwrap();
    let vort = VorticityFamily::DEFAULT_BLOB.sample(&g, 1.0);
    let cfg = EulerConfig { t_end: 1.0, ..Default::default() };
    for sp in [SigmaParam::Planar, SigmaParam::finite(4.0).unwrap()] {
        let r = run_euler(&vort, sp, &cfg).unwrap();
        let d = r.max_drift();
        assert!(d.l1 < 5e-3 && d.l2 < 5e-3, "{sp}: {d:?}");
        assert!(d.linf < 1e-2, "{sp}: {d:?}");
        assert!((r.final_state().t - 1.0).abs() < 1e-12);
    }
}

#[test]
fn radial_vortex_is_stationary() {
    let g = build_grid(32, 64).unwrap();
    let vort = VorticityFamily::RadialVortex.sample(&g, 1.0);
    let cfg = EulerConfig { dt: 2e-3, t_end: 0.5, ..Default::default() };
    for sp in [SigmaParam::Planar, SigmaParam::finite(2.0).unwrap()] {
        let r = run_euler(&vort, sp, &cfg).unwrap();
        let change = r.final_state().vort.sub(&vort).unwrap().max_abs();
        assert!(change < 1e-6, "{sp}: {change:.3e}");
    }
}

#[test]
fn planar_limit_shrinks_stream_difference() {
    let g = build_grid(32, 64).unwrap();
    let vort = VorticityFamily::DEFAULT_BLOB.sample(&g, 1.0);
    let cfg = EulerConfig { dt: 2e-3, t_end: 0.2, ..Default::default() };
    let psi_inf = run_euler(&vort, SigmaParam::Planar, &cfg).unwrap().final_state().psi.clone();
    let diffs: Vec<f64> = [4.0, 16.0, 64.0]
        .iter()
        .map(|&s| {
            let r = run_euler(&vort, SigmaParam::finite(s).unwrap(), &cfg).unwrap();
            r.final_state().psi.sub(&psi_inf).unwrap().max_abs()
        })
        .collect();
    assert!(diffs[1] < diffs[0] && diffs[2] < diffs[1], "{diffs:?}");
}

#[test]
fn lifted_vorticity_follows_the_helix() {
    let sp = SigmaParam::finite(8.0).unwrap();
    let cfg = EulerConfig::default();
    let reports: Vec<_> = [(32usize, 16usize), (64, 32)]
        .iter()
        .map(|&(n, n_z)| {
            let g = build_grid(n, n).unwrap();
            let solver = EulerSolver::new(&g, sp, &cfg).unwrap();
            let state = solver.initial_state(&VorticityFamily::DEFAULT_BLOB.sample(&g, 1.0));
            vorticity3d_check(&state, sp, n_z).unwrap()
        })
        .collect();
    let (c, f) = (&reports[0], &reports[1]);
    assert!(c.parallel_residual < 0.05 && c.rel_error < 0.05, "{c:?}");
    assert!(f.parallel_residual < c.parallel_residual / 2.0, "{c:?} {f:?}");
    assert!(f.rel_error < c.rel_error / 2.0, "{c:?} {f:?}");
    let g = build_grid(16, 16).unwrap();
    let state = EulerSolver::new(&g, sp, &cfg).unwrap().initial_state(&VorticityFamily::RadialVortex.sample(&g, 1.0));
    assert!(vorticity3d_check(&state, SigmaParam::Planar, 8).is_err());
}

#[test]
fn too_large_step_is_refused() {
    let g = build_grid(32, 64).unwrap();
    let vort = VorticityFamily::DEFAULT_BLOB.sample(&g, 50.0);
    let cfg = EulerConfig { dt: 0.05, t_end: 0.1, ..Default::default() };
    assert!(run_euler(&vort, SigmaParam::Planar, &cfg).is_err());
}
