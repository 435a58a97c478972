//! Physical constants, the normalized constants of the perturbation system and
//! the change of variables `(ρ, u, θ, q) ↔ (n, w, φ, ψ)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Fluid constants in consistent (nondimensional) units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Gas constant `R`.
    pub r_gas: f64,
    pub gamma: f64,
    pub kappa: f64,
    /// Relaxation time of the heat flux.
    pub tau: f64,
    pub nu_tilde: f64,
    pub eta_tilde: f64,
    pub rho_star: f64,
    pub theta_star: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            r_gas: 1.0,
            gamma: 5.0 / 3.0,
            kappa: 1.0,
            tau: 1.0,
            nu_tilde: 1.0,
            eta_tilde: 0.0,
            rho_star: 1.0,
            theta_star: 1.0,
        }
    }
}

/// A violated parameter constraint together with the offending value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub constraint: &'static str,
    pub value: f64,
}

impl PhysicalParams {
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Every violated constraint; empty means the set is admissible.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check = |ok: bool, constraint: &'static str, value: f64| {
            if !ok || !value.is_finite() {
                out.push(Violation { constraint, value });
            }
        };
        check(self.r_gas > 0.0, "R > 0", self.r_gas);
        check(self.gamma > 1.0, "gamma > 1", self.gamma);
        check(self.kappa > 0.0, "kappa > 0", self.kappa);
        check(self.tau > 0.0, "tau > 0", self.tau);
        check(self.nu_tilde > 0.0, "nu_tilde > 0", self.nu_tilde);
        let bulk = self.eta_tilde + 2.0 / 3.0 * self.nu_tilde;
        check(bulk >= 0.0, "eta_tilde+(2/3)nu_tilde >= 0", bulk);
        check(self.rho_star > 0.0, "rho_star > 0", self.rho_star);
        check(self.theta_star > 0.0, "theta_star > 0", self.theta_star);
        out
    }

    pub fn normalize(&self) -> Result<NormalizedParams> {
        NormalizedParams::from_physical(self)
    }
}

/// Constants of the reformulated perturbation system.
///
/// `c`, `sigma`, `nu`, `eta`, `a`, `b` follow their defining formulas; the
/// remaining fields are carried along because every downstream formula needs
/// them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedParams {
    pub c: f64,
    pub sigma: f64,
    pub nu: f64,
    pub eta: f64,
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub gamma: f64,
    /// `2ν + η`
    pub two_nu_eta: f64,
    /// `sqrt(c² + σ²)`, the low-frequency sound speed.
    pub c_hat: f64,
    /// `τ b²`, the diffusivity of the Fourier-law limit in φ-units.
    pub kappa_prime: f64,
    pub physical: PhysicalParams,
}

impl NormalizedParams {
    pub fn from_physical(p: &PhysicalParams) -> Result<Self> {
        let violations = p.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidParams(violations));
        }
        let c = (p.r_gas * p.theta_star).sqrt();
        let sigma = ((p.gamma - 1.0) * p.r_gas * p.theta_star).sqrt();
        let nu = p.nu_tilde / p.rho_star;
        let eta = p.eta_tilde / p.rho_star;
        let a = (p.kappa * p.rho_star * p.r_gas * p.theta_star * p.theta_star / p.tau).sqrt();
        let b = (p.kappa * (p.gamma - 1.0) / (p.tau * p.rho_star * p.r_gas)).sqrt();
        Ok(Self {
            c,
            sigma,
            nu,
            eta,
            a,
            b,
            tau: p.tau,
            gamma: p.gamma,
            two_nu_eta: 2.0 * nu + eta,
            c_hat: (c * c + sigma * sigma).sqrt(),
            kappa_prime: p.tau * b * b,
            physical: *p,
        })
    }

    /// Default parameter set `(1, 5/3, 1, 1, 1, 0, 1, 1)`.
    pub fn defaults() -> Self {
        Self::from_physical(&PhysicalParams::default()).expect("default parameters are valid")
    }

    /// `ν₁ = τb²σ²/(2ĉ²) + (2ν+η)/2`, damping rate of the acoustic pair.
    pub fn nu1(&self) -> f64 {
        self.tau * self.b * self.b * self.sigma * self.sigma / (2.0 * self.c_hat * self.c_hat)
            + 0.5 * self.two_nu_eta
    }

    /// `ν₂ = τb²c²/ĉ²`, damping rate of the slow thermal branch.
    pub fn nu2(&self) -> f64 {
        self.tau * self.b * self.b * self.c * self.c / (self.c_hat * self.c_hat)
    }
}

/// Primitive fields sampled at the same set of points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrimitiveFields {
    pub rho: Vec<f64>,
    pub u: [Vec<f64>; 3],
    pub theta: Vec<f64>,
    pub q: [Vec<f64>; 3],
}

/// Perturbation fields `(n, w, φ, ψ)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerturbationFields {
    pub n: Vec<f64>,
    pub w: [Vec<f64>; 3],
    pub phi: Vec<f64>,
    pub psi: [Vec<f64>; 3],
}

impl PrimitiveFields {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

fn check_lengths(len: usize, others: &[&[f64]]) -> Result<()> {
    if others.iter().any(|v| v.len() != len) {
        return Err(Error::InvalidInput("field lengths differ".into()));
    }
    Ok(())
}

pub fn to_perturbation(x: &PrimitiveFields, np: &NormalizedParams) -> Result<PerturbationFields> {
    let p = &np.physical;
    let len = x.rho.len();
    check_lengths(
        len,
        &[&x.u[0], &x.u[1], &x.u[2], &x.theta, &x.q[0], &x.q[1], &x.q[2]],
    )?;
    if let Some((index, &value)) = x.rho.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::VacuumBreach { index, value: value / p.rho_star });
    }
    if let Some((index, &value)) = x.theta.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NegativeTemperature { index, value: value / p.theta_star });
    }
    let phi_scale = (p.gamma - 1.0).sqrt() * p.theta_star;
    let map = |v: &[f64], f: &dyn Fn(f64) -> f64| v.iter().map(|&s| f(s)).collect::<Vec<_>>();
    Ok(PerturbationFields {
        n: map(&x.rho, &|r| (r - p.rho_star) / p.rho_star),
        w: core::array::from_fn(|i| map(&x.u[i], &|u| u / np.c)),
        phi: map(&x.theta, &|t| (t - p.theta_star) / phi_scale),
        psi: core::array::from_fn(|i| map(&x.q[i], &|q| q / np.a)),
    })
}

pub fn from_perturbation(y: &PerturbationFields, np: &NormalizedParams) -> Result<PrimitiveFields> {
    let p = &np.physical;
    let len = y.n.len();
    check_lengths(
        len,
        &[&y.w[0], &y.w[1], &y.w[2], &y.phi, &y.psi[0], &y.psi[1], &y.psi[2]],
    )?;
    if let Some((index, &n)) = y.n.iter().enumerate().find(|(_, n)| !(1.0 + **n > 0.0)) {
        return Err(Error::VacuumBreach { index, value: 1.0 + n });
    }
    let gs = (p.gamma - 1.0).sqrt();
    if let Some((index, &f)) = y.phi.iter().enumerate().find(|(_, f)| !(1.0 + gs * **f > 0.0)) {
        return Err(Error::NegativeTemperature { index, value: 1.0 + gs * f });
    }
    let phi_scale = gs * p.theta_star;
    let map = |v: &[f64], f: &dyn Fn(f64) -> f64| v.iter().map(|&s| f(s)).collect::<Vec<_>>();
    Ok(PrimitiveFields {
        rho: map(&y.n, &|n| p.rho_star * (1.0 + n)),
        u: core::array::from_fn(|i| map(&y.w[i], &|w| w * np.c)),
        theta: map(&y.phi, &|f| p.theta_star + phi_scale * f),
        q: core::array::from_fn(|i| map(&y.psi[i], &|s| s * np.a)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn defaults_are_valid() {
        assert!(PhysicalParams::default().validate().is_empty());
    }

    #[test]
    fn negative_bulk_viscosity_is_reported() {
        let p = PhysicalParams { eta_tilde: -1.0, ..Default::default() };
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, "eta_tilde+(2/3)nu_tilde >= 0");
        assert!(close(v[0].value, -1.0 / 3.0, 1e-15));
    }

    #[test]
    fn gamma_one_is_reported() {
        let p = PhysicalParams { gamma: 1.0, ..Default::default() };
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, "gamma > 1");
        assert!(matches!(p.normalize(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn normalize_defaults() {
        let np = NormalizedParams::defaults();
        let s23 = (2.0f64 / 3.0).sqrt();
        assert!(close(np.c, 1.0, 1e-15));
        assert!(close(np.sigma, s23, 1e-15));
        assert!(close(np.nu, 1.0, 1e-15));
        assert_eq!(np.eta, 0.0);
        assert!(close(np.a, 1.0, 1e-15));
        assert!(close(np.b, s23, 1e-15));
        assert!(close(np.c_hat, (5.0f64 / 3.0).sqrt(), 1e-15));
        assert!(close(np.kappa_prime, 2.0 / 3.0, 1e-15));
        assert!(close(np.nu1(), 17.0 / 15.0, 1e-15));
        assert!(close(np.nu2(), 0.4, 1e-15));
    }

    #[test]
    fn normalize_tau_four() {
        let np = PhysicalParams::default().with_tau(4.0).normalize().unwrap();
        assert!(close(np.a, 0.5, 1e-15));
        assert!(close(np.b, (1.0f64 / 6.0).sqrt(), 1e-15));
        assert!(close(np.c, 1.0, 1e-15));
        assert!(close(np.sigma, (2.0f64 / 3.0).sqrt(), 1e-15));
    }

    #[test]
    fn normalize_gamma_two() {
        let p = PhysicalParams { gamma: 2.0, ..Default::default() };
        let np = p.normalize().unwrap();
        for v in [np.c, np.sigma, np.b, np.a] {
            assert!(close(v, 1.0, 1e-15));
        }
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
        let x2 = PrimitiveFields { rho: vec![1.1; 3], ..x };
        let y2 = to_perturbation(&x2, &np).unwrap();
        assert!(y2.n.iter().all(|v| close(*v, 0.1, 1e-14)));
    }

    #[test]
    fn vacuum_and_temperature_errors() {
        let np = NormalizedParams::defaults();
        let z = || [vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]];
        let x = PrimitiveFields { rho: vec![1.0, 0.0], u: z(), theta: vec![1.0; 2], q: z() };
        assert!(matches!(to_perturbation(&x, &np), Err(Error::VacuumBreach { index: 1, .. })));
        let x = PrimitiveFields { rho: vec![1.0; 2], u: z(), theta: vec![-1.0, 1.0], q: z() };
        assert!(matches!(
            to_perturbation(&x, &np),
            Err(Error::NegativeTemperature { index: 0, .. })
        ));
    }
}
