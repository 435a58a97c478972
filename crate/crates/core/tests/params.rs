use cattaneo_core::params::*;
use cattaneo_core::Error;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * (1.0 + b.abs())
}

#[test]
fn validate_reports_each_violation() {
    assert!(PhysicalParams::default().validate().is_empty());

    let p = PhysicalParams { eta_tilde: -1.0, ..Default::default() };
    let v = p.validate();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].constraint, "eta_tilde+(2/3)nu_tilde >= 0");
    assert!(close(v[0].value, -1.0 / 3.0));

    let p = PhysicalParams { gamma: 1.0, ..Default::default() };
    assert_eq!(p.validate()[0].constraint, "gamma > 1");

    let p = PhysicalParams { gamma: 1.0, kappa: -2.0, rho_star: 0.0, ..Default::default() };
    assert_eq!(p.validate().len(), 3);
}

#[test]
fn normalize_default_set() {
    let np = PhysicalParams::default().normalize().unwrap();
    let s = (2.0f64 / 3.0).sqrt();
    assert!(close(np.c, 1.0) && close(np.a, 1.0) && close(np.nu, 1.0));
    assert_eq!(np.eta, 0.0);
    assert!(close(np.sigma, s) && close(np.b, s));
    assert!(close(np.two_nu_eta, 2.0));
    assert!(close(np.c_hat, (5.0f64 / 3.0).sqrt()));
    assert!(close(np.kappa_prime, 2.0 / 3.0));
    assert!(close(np.nu1(), 17.0 / 15.0));
    assert!(close(np.nu2(), 0.4));
}

#[test]
fn normalize_tau_four() {
    let np = PhysicalParams::default().with_tau(4.0).normalize().unwrap();
    assert!(close(np.a, 0.5));
    assert!(close(np.b, (1.0f64 / 6.0).sqrt()));
    let d = NormalizedParams::defaults();
    assert_eq!((np.c, np.sigma, np.nu, np.eta), (d.c, d.sigma, d.nu, d.eta));
}

#[test]
fn normalize_gamma_two() {
    let np = PhysicalParams { gamma: 2.0, ..Default::default() }.normalize().unwrap();
    for v in [np.c, np.sigma, np.b, np.a] {
        assert!(close(v, 1.0));
    }
}

#[test]
fn normalize_rejects_invalid() {
    let p = PhysicalParams { nu_tilde: 0.0, ..Default::default() };
    assert!(matches!(p.normalize(), Err(Error::InvalidParams(v)) if v.len() == 1));
}

#[test]
fn equilibrium_maps_to_origin() {
    let np = NormalizedParams::defaults();
    let x = PrimitiveFields {
        rho: vec![1.0; 3],
        u: [vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]],
        theta: vec![1.0; 3],
        q: [vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]],
    };
    let y = to_perturbation(&x, &np).unwrap();
    assert!(y.n.iter().chain(&y.phi).all(|v| *v == 0.0));
    let x = PrimitiveFields { rho: vec![1.1; 3], ..x };
    let y = to_perturbation(&x, &np).unwrap();
    assert!(y.n.iter().all(|v| (v - 0.1).abs() < 1e-15));
}

#[test]
fn positivity_errors() {
    let np = NormalizedParams::defaults();
    let z = || [vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]];
    let x = PrimitiveFields { rho: vec![1.0, -0.5], u: z(), theta: vec![1.0; 2], q: z() };
    assert!(matches!(to_perturbation(&x, &np), Err(Error::VacuumBreach { index: 1, .. })));
    let x = PrimitiveFields { rho: vec![1.0; 2], u: z(), theta: vec![0.0, 1.0], q: z() };
    assert!(matches!(to_perturbation(&x, &np), Err(Error::NegativeTemperature { index: 0, .. })));
    let y = PerturbationFields { n: vec![-1.0], w: [vec![0.0], vec![0.0], vec![0.0]], phi: vec![0.0], psi: [vec![0.0], vec![0.0], vec![0.0]] };
    assert!(matches!(from_perturbation(&y, &np), Err(Error::VacuumBreach { .. })));
}

fn physical() -> impl Strategy<Value = PhysicalParams> {
    (0.1f64..10.0, 1.05f64..3.0, 0.1f64..10.0, 0.01f64..10.0, 0.1f64..5.0, -0.06f64..5.0, 0.1f64..10.0, 0.1f64..10.0).prop_map(
        |(r_gas, gamma, kappa, tau, nu_tilde, eta_frac, rho_star, theta_star)| PhysicalParams {
            r_gas,
            gamma,
            kappa,
            tau,
            nu_tilde,
            eta_tilde: eta_frac * nu_tilde,
            rho_star,
            theta_star,
        },
    )
}

proptest! {
    #[test]
    fn six_defining_formulas(p in physical()) {
        let np = p.normalize().unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-14 * b.abs().max(1e-300);
        prop_assert!(rel(np.c * np.c, p.r_gas * p.theta_star));
        prop_assert!(rel(np.sigma * np.sigma, (p.gamma - 1.0) * p.r_gas * p.theta_star));
        prop_assert!(rel(np.nu, p.nu_tilde / p.rho_star));
        prop_assert!((np.eta - p.eta_tilde / p.rho_star).abs() <= 1e-15 * np.nu);
        prop_assert!(rel(np.a * np.a, p.kappa * p.rho_star * p.r_gas * p.theta_star * p.theta_star / p.tau));
        prop_assert!(rel(np.b * np.b, p.kappa * (p.gamma - 1.0) / (p.tau * p.rho_star * p.r_gas)));
    }

    #[test]
    fn roundtrip(p in physical(), seed in proptest::collection::vec(-1.0f64..1.0, 40)) {
        let np = p.normalize().unwrap();
        let m = 5;
        let pick = |k: usize| seed[k * m..(k + 1) * m].to_vec();
        let scale = |v: Vec<f64>, s: f64, o: f64| v.into_iter().map(|x| o + s * x).collect::<Vec<_>>();
        let x = PrimitiveFields {
            rho: scale(pick(0), 0.5 * p.rho_star, p.rho_star),
            u: [scale(pick(1), 2.0, 0.0), scale(pick(2), 2.0, 0.0), scale(pick(3), 2.0, 0.0)],
            theta: scale(pick(4), 0.5 * p.theta_star, p.theta_star),
            q: [scale(pick(5), 3.0, 0.0), scale(pick(6), 3.0, 0.0), scale(pick(7), 3.0, 0.0)],
        };
        let back = from_perturbation(&to_perturbation(&x, &np).unwrap(), &np).unwrap();
        let eps = 10.0 * f64::EPSILON;
        let check = |a: &[f64], b: &[f64], unit: f64| a.iter().zip(b).all(|(u, v)| (u - v).abs() <= eps * v.abs().max(unit));
        prop_assert!(check(&back.rho, &x.rho, p.rho_star));
        prop_assert!(check(&back.theta, &x.theta, p.theta_star));
        for i in 0..3 {
            prop_assert!(check(&back.u[i], &x.u[i], np.c));
            prop_assert!(check(&back.q[i], &x.q[i], np.a));
        }
    }
}
