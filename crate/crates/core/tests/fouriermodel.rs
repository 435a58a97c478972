use cattaneo_core::fit::fit_decay;
use cattaneo_core::fouriermodel::*;
use cattaneo_core::linsim::{make_lowerbound_data, BandSel, Components, Evolver, FrequencyBands, NormRequest};
use cattaneo_core::symbol::log_grid;
use cattaneo_core::{NormalizedParams, PhysicalParams};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn np() -> NormalizedParams {
    NormalizedParams::defaults()
}

fn det3(m: [[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn horner(p: &[f64], z: C64) -> C64 {
    p.iter().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

#[test]
fn symbol_entries() {
    let n = np();
    let s = build_symbol_fourier([0.0, 1.0, 0.0], &n);
    let i = C64::new(0.0, 1.0);
    assert!((s.entries[(0, 2)] - i * n.c).norm() < 1e-15);
    assert!((s.entries[(2, 4)] - i * n.sigma).norm() < 1e-15);
    assert!((s.entries[(2, 2)].re - n.two_nu_eta).abs() < 1e-15);
    assert!((s.entries[(1, 1)].re - n.nu).abs() < 1e-15);
    assert!((s.entries[(4, 4)].re - n.kappa_prime).abs() < 1e-15);
    assert_eq!(s.entries[(0, 0)], C64::new(0.0, 0.0));
}

#[test]
fn conductivity_from_relaxation_data() {
    let n = np();
    assert!((n.kappa_prime - n.tau * n.b * n.b).abs() < 1e-15);
    assert!((n.kappa_prime - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn cubic_is_characteristic_polynomial() {
    let n = np();
    for r in [0.05, 1.0, 12.0] {
        let b = longitudinal_block_fourier(r, &n);
        let p = fourier_cubic(r, &n);
        for z in [C64::new(0.3, -1.0), C64::new(-2.0, 0.5), C64::new(0.0, 4.0)] {
            let mut m = [[C64::new(0.0, 0.0); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] = b[(i, j)] + if i == j { z } else { C64::new(0.0, 0.0) };
                }
            }
            let want = det3(m);
            assert!((horner(&p, z) - want).norm() <= 1e-12 * (1.0 + want.norm()), "r={r} z={z}");
        }
    }
}

#[test]
fn acoustic_speed_matches_cattaneo() {
    // both models propagate sound at ĉ = √(c² + σ²)
    let n = np();
    assert!((n.c_hat - (n.c * n.c + n.sigma * n.sigma).sqrt()).abs() < 1e-15);
    for r in [1e-3, 1e-2] {
        let im = fourier_roots(r, &n).unwrap().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!((im / r - n.c_hat).abs() < 10.0 * r * r, "r={r}");
    }
}

#[test]
fn fourier_decay_rates() {
    let n = np();
    let d = make_lowerbound_data(1.0, 0.1, 10.0).unwrap();
    let times = log_grid(1e2, 1e5, 40);
    let reqs = [NormRequest::derivative(Components::FLUID, 0, BandSel::Full), NormRequest::derivative(Components::PSI, 0, BandSel::Full)];
    let s = evolve_series_fourier(&n, &d, &times, &reqs, &FrequencyBands::default(), None).unwrap();
    let f = |i: usize| fit_decay(&times, &s.columns[i], (1e2, 1e5)).unwrap().slope;
    assert!((f(0) + 0.75).abs() < 0.03, "{}", f(0));
    assert!((f(1) + 1.25).abs() < 0.03, "{}", f(1));
}

#[test]
fn evolver_reports_gradient_flux() {
    let n = np();
    let ev = FourierEvolver { np: n };
    let u0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.2), C64::new(0.5, 0.0), C64::new(9.0, 9.0)];
    for (r, t) in [(0.3, 1.0), (2.0, 0.1)] {
        let u = ev.evolve(r, t, &u0).unwrap();
        let want = C64::new(0.0, -n.tau * n.b * r) * u[2];
        assert!((u[3] - want).norm() < 1e-15);
        // incoming ψ is ignored
        let v = ev.evolve(r, t, &[u0[0], u0[1], u0[2], C64::new(0.0, 0.0)]).unwrap();
        assert_eq!(u, v);
    }
    assert_eq!(ev.evolve(0.0, 5.0, &u0).unwrap()[0], u0[0]);
}

#[test]
fn relaxation_limit_first_order() {
    let rep = relaxation_limit(&PhysicalParams::default(), &[1.0, 0.1, 0.01], &[0.05, 0.1, 0.2, 0.5, 1.0]).unwrap();
    assert!(rep.errors.windows(2).all(|w| w[1] < w[0]), "{rep:?}");
    assert!(rep.min_order() >= 0.7, "{rep:?}");
    assert!(relaxation_limit(&PhysicalParams::default(), &[1.0], &[0.1]).is_err());
}

proptest! {
    #[test]
    fn modes_agree_with_expm(r in 0.01f64..20.0, t in 0.0f64..5.0) {
        let n = np();
        let e = fourier_expm(r, t, &n);
        let v = [C64::new(1.0, 0.0), C64::new(0.0, -0.4), C64::new(0.2, 0.1)];
        let want = e.matvec(&v);
        if let Some(m) = FourierModes::new(r, &n).unwrap() {
            let got = m.apply(t, &v);
            for i in 0..3 {
                prop_assert!((got[i] - want[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn cubic_roots_stable(r in 1e-3f64..1e3) {
        for z in fourier_roots(r, &np()).unwrap() {
            prop_assert!(z.re <= 1e-12 * (1.0 + z.norm()));
        }
    }
}
