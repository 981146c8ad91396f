use helix::diagnostics::{energy_identity_residual, fit_rate, ladyzhenskaya_check, ConvergenceReport};
use helix::experiments::random_band_limited;
use helix::families::VelocityFamily;
use helix::ns::{run, NsConfig};
use helix::{build_grid, ScalarField, SigmaParam};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bessel_energy_balance_from_quadrature_gradient() {
    // the quadrature gradient differs from the stepper's operators at O(dr^2),
    // so the residual floor moves with n_r rather than dt
    let sp = SigmaParam::finite(2.0).unwrap();
    let res: Vec<f64> = [32usize, 64]
        .iter()
        .map(|&n_r| {
            let g = build_grid(n_r, 64).unwrap();
            let w = VelocityFamily::BesselSwirl.sample(&g, 1.0);
            let cfg = NsConfig { dt: 5e-4, t_end: 0.1, ..Default::default() };
            let r = run(&w, sp, &cfg).unwrap();
            assert_eq!(r.snapshots.len(), cfg.n_steps() + 1);
            energy_identity_residual(&r.snapshots, sp)
                .iter()
                .map(|row| row.residual)
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(res[1] < 1e-3, "{res:?}");
    assert!(res[1] < res[0] / 2.0, "{res:?}");
}

#[test]
fn ladyzhenskaya_on_random_fields() {
    let g = build_grid(48, 48).unwrap();
    let bump = ScalarField::from_polar(&g, |r, _| 1.0 - r * r);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let f = random_band_limited(&g, &mut rng).mul(&bump).unwrap();
        let (lhs, rhs) = ladyzhenskaya_check(&f).unwrap();
        assert!(lhs <= rhs, "{lhs} > {rhs}");
    }
}

#[test]
fn sweep_of_known_rate() {
    let s = vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let e: Vec<f64> = s.iter().map(|x: &f64| 0.1 / x.sqrt() * (1.0 + 0.01 * x.ln())).collect();
    let h: Vec<f64> = s.iter().map(|x| 0.3 / x).collect();
    let r = ConvergenceReport::new(s.clone(), e.clone(), h, 0.5);
    assert!(r.strictly_decreasing());
    let slope = r.fitted_slope().unwrap();
    assert!((slope + 0.5).abs() < 0.02, "{slope}");
    assert!((r.h1_fit().unwrap().slope + 1.0).abs() < 1e-12);
    assert_eq!(fit_rate(&s, &e).unwrap().pairwise.len(), 5);
}
