#![allow(clippy::needless_range_loop)]

use cattaneo_core::green::*;
use cattaneo_core::linalg::CMatrix;
use cattaneo_core::symbol::{build_symbol, eigen_set, Band};
use cattaneo_core::{NormalizedParams, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn np() -> NormalizedParams {
    NormalizedParams::defaults()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Adaptive Dormand–Prince 5(4) integration of `Ġ = −B G`, `G(0) = I`.
fn ode_oracle(xi: [f64; 3], t_end: f64, tol: f64) -> CMatrix {
    let b = build_symbol(xi, &np()).entries.scale(c(-1.0, 0.0));
    let f = |y: &CMatrix| &b * y;
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut y = CMatrix::identity(8);
    let mut t = 0.0;
    let mut h: f64 = 1e-3;
    while t < t_end {
        h = h.min(t_end - t);
        let mut k: Vec<CMatrix> = vec![f(&y)];
        for s in 0..6 {
            let terms: Vec<(f64, &CMatrix)> = (0..=s).map(|j| (h * A[s][j], &k[j])).collect();
            let stage = y.add(&CMatrix::lincomb(&terms));
            k.push(f(&stage));
        }
        let terms: Vec<(f64, &CMatrix)> = (0..6).map(|j| (h * A[5][j], &k[j])).collect();
        let y5 = y.add(&CMatrix::lincomb(&terms));
        let eterms: Vec<(f64, &CMatrix)> = (0..7).map(|j| (h * E[j], &k[j])).collect();
        let err = CMatrix::lincomb(&eterms).max_abs() / (tol * (1.0 + y.max_abs()));
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    y
}

fn random_vec(rng: &mut ChaCha8Rng) -> [C64; 8] {
    std::array::from_fn(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

#[test]
fn weights_definitions() {
    let z = cattaneo_core::symbol::unlabeled_set(0.0, &np()).unwrap();
    let w = gk_hk(&z, &np());
    for k in 0..4 {
        assert!(w.g[k].norm() < 1e-15 && (z.quartic[k].norm() > 0.5 || w.h[k].norm() < 1e-15));
    }
    let s = eigen_set(1.0, &np(), Band::Low).unwrap();
    let w = gk_hk(&s, &np());
    let n = np();
    for k in 0..4 {
        let l = s.quartic[k];
        let g = l * l + l / n.tau + n.b * n.b;
        let h = l * l + n.two_nu_eta * l + n.c * n.c;
        assert!((w.g[k] - g).norm() < 1e-12 && (w.h[k] - h).norm() < 1e-12);
    }
}

#[test]
fn initial_identity_all_methods() {
    for xi in [[0.3, 0.0, 0.0], [0.01, 0.02, -0.05], [3.0, -7.0, 1.0], [400.0, 0.0, 10.0]] {
        let g = green_explicit(xi, 0.0, &np()).unwrap();
        assert!(g.entries.max_abs_diff(&CMatrix::identity(8)) < 1e-9, "{xi:?}");
        assert!(green_expm(xi, 0.0, &np()).entries.max_abs_diff(&CMatrix::identity(8)) < 1e-15);
    }
    let lf = green_lowfreq_leading([0.01, 0.0, 0.0], 0.0, &np(), 0.1).unwrap();
    assert!(lf.entries.max_abs_diff(&CMatrix::identity(8)) < 0.05);
}

#[test]
fn explicit_matches_expm_example() {
    let e = green_explicit([0.3, 0.0, 0.0], 2.0, &np()).unwrap();
    let m = green_expm([0.3, 0.0, 0.0], 2.0, &np());
    assert!(e.entries.max_abs_diff(&m.entries) < 1e-8);
    assert_eq!(e.method, Method::Explicit);
}

#[test]
fn explicit_decays() {
    let g = green_explicit([0.1, 0.0, 0.0], 1e4, &np()).unwrap();
    assert!(g.entries.max_abs() < 1e-6);
}

#[test]
fn explicit_needs_nonzero_frequency() {
    assert!(green_explicit([0.0; 3], 1.0, &np()).is_err());
    let g = green_auto([0.0; 3], 1.0, &np());
    assert_eq!(g.method, Method::Expm);
}

#[test]
fn expm_at_zero_frequency() {
    let t = 2.5;
    let g = green_expm([0.0; 3], t, &np()).entries;
    for i in 0..8 {
        for j in 0..8 {
            let want = if i != j { 0.0 } else if i >= 5 { (-t).exp() } else { 1.0 };
            assert!((g[(i, j)] - c(want, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn expm_semigroup() {
    let xi = [0.7, -0.2, 1.1];
    let a = green_expm(xi, 1.3, &np()).entries;
    let b = green_expm(xi, 2.9, &np()).entries;
    let ab = green_expm(xi, 4.2, &np()).entries;
    assert!((&a * &b).max_abs_diff(&ab) < 1e-10);
}

#[test]
fn expm_against_ode_integration() {
    let xi = [1.0, 0.0, 0.0];
    let g = green_expm(xi, 1.0, &np()).entries;
    let o = ode_oracle(xi, 1.0, 1e-13);
    for j in 0..8 {
        let cg: f64 = (0..8).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        let co: f64 = (0..8).map(|i| o[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        assert!((cg - co).abs() < 1e-9, "column {j}: {cg} vs {co}");
    }
    assert!(g.max_abs_diff(&o) < 1e-9);
}

#[test]
fn explicit_against_ode_integration() {
    let xi = [0.2, 0.5, -0.3];
    let g = green_explicit(xi, 3.0, &np()).unwrap().entries;
    assert!(g.max_abs_diff(&ode_oracle(xi, 3.0, 1e-13)) < 1e-9);
}

#[test]
fn lowfreq_g34_dominant_term() {
    // Ĝ₃₄ ≈ i b τ r e^{λ₃t}+…; relative error O(r)
    let mut errs = vec![];
    for r in [0.02, 0.01, 0.005] {
        let lf = green_lowfreq_leading([r, 0.0, 0.0], 10.0, &np(), 0.1).unwrap().entries;
        let ex = green_expm([r, 0.0, 0.0], 10.0, &np()).entries;
        errs.push((lf[(4, 5)] - ex[(4, 5)]).norm() / ex[(4, 5)].norm());
    }
    assert!(errs[0] < 0.05, "{errs:?}");
    for w in errs.windows(2) {
        assert!(w[0] / w[1] > 1.6, "{errs:?}");
    }
}

#[test]
fn lowfreq_coefficient_identity() {
    let n = np();
    let ch2 = n.c * n.c + n.sigma * n.sigma;
    let sum = n.c * n.c / (2.0 * ch2) * 2.0 + n.sigma * n.sigma / ch2;
    assert!((sum - 1.0).abs() < 1e-15);
}

#[test]
fn lowfreq_error_halves_at_fixed_scaled_time() {
    let mut errs = vec![];
    for r in [0.04, 0.02, 0.01, 0.005] {
        // worst case over a window of scaled times smooths out the acoustic phase
        let mut worst: f64 = 0.0;
        for j in 0..32 {
            let t = (0.25 + 0.125 * j as f64) / (r * r);
            let lf = green_lowfreq_leading([0.0, r, 0.0], t, &np(), 0.1).unwrap().entries;
            let ex = green_expm([0.0, r, 0.0], t, &np()).entries;
            worst = worst.max(lf.max_abs_diff(&ex) / ex.max_abs());
        }
        errs.push(worst);
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 1.7 && ratio < 2.3, "{errs:?}");
    }
}

#[test]
fn lowfreq_out_of_band() {
    assert!(matches!(
        green_lowfreq_leading([0.5, 0.0, 0.0], 1.0, &np(), 0.1),
        Err(cattaneo_core::Error::OutOfBand { .. })
    ));
}

#[test]
fn apply_green_trivial_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_vec(&mut rng);
    let id = green_expm([0.4, 0.1, 0.0], 0.0, &np());
    let v = apply_green(&id, &u);
    assert!(v.iter().zip(&u).all(|(a, b)| (a - b).norm() < 1e-15));
    let g = green_expm([0.4, 0.1, 0.0], 1.0, &np());
    assert!(apply_green(&g, &[c(0.0, 0.0); 8]).iter().all(|z| z.norm() == 0.0));
}

#[test]
fn apply_green_methods_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let xi: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let t = rng.random_range(0.0..20.0);
        let u = random_vec(&mut rng);
        let a = apply_green(&green_expm(xi, t, &np()), &u);
        let b = apply_green(&green_explicit(xi, t, &np()).unwrap(), &u);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-8));
    }
}

#[test]
fn transverse_decoupling() {
    let (r, t) = (0.8, 1.7);
    let g = green_explicit([r, 0.0, 0.0], t, &np()).unwrap().entries;
    let l1 = (-np().nu * r * r * t).exp();
    let l2 = (-t / np().tau).exp();
    for (idx, f) in [(2, l1), (3, l1), (6, l2), (7, l2)] {
        for j in 0..8 {
            let want = if j == idx { f } else { 0.0 };
            assert!((g[(idx, j)] - c(want, 0.0)).norm() < 1e-12);
            assert!((g[(j, idx)] - c(want, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn oracle_equivalence_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut collisions = 0;
    let n = 300;
    for _ in 0..n {
        let r = 10f64.powf(rng.random_range(-3.0..3.0));
        let th: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xi = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
        let t = rng.random_range(0.0..100.0);
        match green_explicit(xi, t, &np()) {
            Ok(e) => {
                let m = green_expm(xi, t, &np()).entries;
                assert!(e.entries.max_abs_diff(&m) <= 1e-7 + 1e-7 * m.max_abs(), "r={r} t={t}");
            }
            Err(_) => collisions += 1,
        }
    }
    assert!(collisions * 100 < n);
}

proptest! {
    #[test]
    fn realness(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0, t in 0.0f64..50.0) {
        prop_assume!(x * x + y * y + z * z > 1e-6);
        let a = green_expm([x, y, z], t, &np()).entries;
        let b = green_expm([-x, -y, -z], t, &np()).entries;
        prop_assert!(a.conj().max_abs_diff(&b) < 1e-12);
        let e = green_explicit([x, y, z], t, &np()).unwrap().entries;
        let f = green_explicit([-x, -y, -z], t, &np()).unwrap().entries;
        prop_assert!(e.conj().max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn contraction(r in 1e-2f64..1e2, t in 0.01f64..100.0) {
        let g = green_expm([r, 0.0, 0.0], t, &np()).entries;
        let radius = cattaneo_core::linalg::eigenvalues(&g).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(radius <= 1.0 + 1e-9);
        prop_assert!(g.is_finite());
    }
}
