use helix::bessel::bessel_zero;
use helix::families::VelocityFamily;
use helix::ns::{run, NsConfig};
use helix::{build_grid, SigmaParam};

#[test]
fn bessel_swirl_decay() {
    let g = build_grid(64, 64).unwrap();
    let w = VelocityFamily::BesselSwirl.sample(&g, 1.0);
    let j = bessel_zero(1, 1);
    let cfg = NsConfig { dt: 1e-3, t_end: 0.1, ..Default::default() };
    let mut finals = vec![];
    for sp in [SigmaParam::finite(2.0).unwrap(), SigmaParam::Planar] {
        let r = run(&w, sp, &cfg).unwrap();
        let n0 = r.snapshots[0].w.l2_norm();
        let n1 = r.final_state().w.l2_norm();
        let want = (-j * j * 0.1).exp();
        let rel = (n1 / n0 - want).abs() / want;
        println!("{sp}: rel {rel:.3e} energy {:.3e}", r.energy.max_residual());
        assert!(rel < 5e-3);
        finals.push(r.final_state().w.clone());
    }
    let d = finals[0].sub(&finals[1]).unwrap().l2_norm();
    println!("diff {d:.3e}");
    assert!(d < 1e-8);
}
