//! Fourier-law comparator. Replacing the relaxation law by `q = −κ∇θ` and
//! keeping the same perturbation scalings turns the `φ` equation into a
//! diffusion with `κ′ = τb²`:
//!
//! ```text
//! ∂ₜφ + σ div w − κ′Δφ = 0
//! ```
//!
//! The induced flux is reported as `ψ_F = −τb∇φ`, commensurate with `ψ`.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{expm, poly_roots, CMatrix};
use crate::linsim::{evolve_series_with, Diagnostics, Evolver, FrequencyBands, NormRequest, NormSeries, RadialDataSpec};
use crate::params::{NormalizedParams, PhysicalParams};
use crate::symbol::unlabeled_set;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol {
    pub entries: CMatrix,
    pub xi: [f64; 3],
}

/// 5×5 symbol in the ordering `(n, w₁, w₂, w₃, φ)`.
pub fn build_symbol_fourier(xi: [f64; 3], np: &NormalizedParams) -> FourierSymbol {
    let mut b = CMatrix::zeros(5);
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    for j in 0..3 {
        b[(0, 1 + j)] = I * (np.c * xi[j]);
        b[(1 + j, 0)] = I * (np.c * xi[j]);
        for k in 0..3 {
            let mut v = (np.nu + np.eta) * xi[j] * xi[k];
            if j == k {
                v += np.nu * r2;
            }
            b[(1 + j, 1 + k)] = C64::new(v, 0.0);
        }
        b[(1 + j, 4)] = I * (np.sigma * xi[j]);
        b[(4, 1 + j)] = I * (np.sigma * xi[j]);
    }
    b[(4, 4)] = C64::new(np.kappa_prime * r2, 0.0);
    FourierSymbol { entries: b, xi }
}

/// 3×3 longitudinal block in `(n, w·e, φ)`.
pub fn longitudinal_block_fourier(r: f64, np: &NormalizedParams) -> CMatrix {
    let mut b = CMatrix::zeros(3);
    b[(0, 1)] = I * (np.c * r);
    b[(1, 0)] = I * (np.c * r);
    b[(1, 1)] = C64::new(np.two_nu_eta * r * r, 0.0);
    b[(1, 2)] = I * (np.sigma * r);
    b[(2, 1)] = I * (np.sigma * r);
    b[(2, 2)] = C64::new(np.kappa_prime * r * r, 0.0);
    b
}

/// Coefficients (descending) of `det(λ + B_F) = 0`.
pub fn fourier_cubic(r: f64, np: &NormalizedParams) -> [f64; 4] {
    let (c2, s2, d, k) = (np.c * np.c, np.sigma * np.sigma, np.two_nu_eta, np.kappa_prime);
    let r2 = r * r;
    [1.0, (d + k) * r2, (c2 + s2) * r2 + d * k * r2 * r2, c2 * k * r2 * r2]
}

pub fn fourier_roots(r: f64, np: &NormalizedParams) -> Result<[C64; 3]> {
    let z = poly_roots(&fourier_cubic(r, np))?;
    Ok([z[0], z[1], z[2]])
}

/// `exp(−B_F t)` as a sum of Sylvester projectors, or `None` at root
/// collisions.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierModes {
    pub lambdas: [C64; 3],
    pub projectors: [[[C64; 3]; 3]; 3],
}

impl FourierModes {
    pub fn new(r: f64, np: &NormalizedParams) -> Result<Option<Self>> {
        let lam = fourier_roots(r, np)?;
        let scale = lam.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut sep = f64::INFINITY;
        for i in 0..3 {
            for j in i + 1..3 {
                sep = sep.min((lam[i] - lam[j]).norm());
            }
        }
        if !(sep > crate::green::COLLISION_FACTOR * scale) {
            return Ok(None);
        }
        let a = longitudinal_block_fourier(r, np).scale(C64::new(-1.0, 0.0));
        let mut projectors = [[[ZERO; 3]; 3]; 3];
        for k in 0..3 {
            let mut p = CMatrix::identity(3);
            for j in 0..3 {
                if j != k {
                    let shifted = a.sub(&CMatrix::identity(3).scale(lam[j])).scale((lam[k] - lam[j]).inv());
                    p = &p * &shifted;
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    projectors[k][i][j] = p[(i, j)];
                }
            }
        }
        Ok(Some(Self { lambdas: lam, projectors }))
    }

    pub fn apply(&self, t: f64, v: &[C64; 3]) -> [C64; 3] {
        let mut out = [ZERO; 3];
        for k in 0..3 {
            let e = (self.lambdas[k] * t).exp();
            if e == ZERO {
                continue;
            }
            for i in 0..3 {
                let mut acc = ZERO;
                for j in 0..3 {
                    acc += self.projectors[k][i][j] * v[j];
                }
                out[i] += acc * e;
            }
        }
        out
    }
}

pub fn fourier_expm(r: f64, t: f64, np: &NormalizedParams) -> CMatrix {
    expm(&longitudinal_block_fourier(r, np).scale(C64::new(-t, 0.0)))
}

/// Fourier-law evolution of `(n, w, φ)`; the fourth slot carries `ψ_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierEvolver {
    pub np: NormalizedParams,
}

impl Evolver for FourierEvolver {
    fn oscillation_speed(&self) -> f64 {
        self.np.c_hat
    }

    fn evolve(&self, r: f64, t: f64, u0: &[C64; 4]) -> Result<[C64; 4]> {
        let v = [u0[0], u0[1], u0[2]];
        let out = if r == 0.0 {
            v
        } else {
            match FourierModes::new(r, &self.np)? {
                Some(m) => m.apply(t, &v),
                None => {
                    let m = fourier_expm(r, t, &self.np);
                    let w = m.matvec(&v);
                    [w[0], w[1], w[2]]
                }
            }
        };
        Ok([out[0], out[1], out[2], psi_fourier(r, out[2], &self.np)])
    }
}

/// `ψ̂_F = −τ b (i r) φ̂` along `e`.
pub fn psi_fourier(r: f64, phi: C64, np: &NormalizedParams) -> C64 {
    -I * (np.tau * np.b * r) * phi
}

/// Norm series under the Fourier law; the data's `ψ` profile is ignored
/// and `ψ` columns report `ψ_F`.
pub fn evolve_series_fourier(
    np: &NormalizedParams,
    data: &RadialDataSpec,
    times: &[f64],
    requests: &[NormRequest],
    bands: &FrequencyBands,
    diagnostics: Option<Diagnostics>,
) -> Result<NormSeries> {
    let mut d = data.clone();
    d.psi0 = crate::linsim::Profile::Zero;
    evolve_series_with(&FourierEvolver { np: *np }, &d, times, requests, bands, diagnostics)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationReport {
    pub taus: Vec<f64>,
    pub radii: Vec<f64>,
    /// Largest branch distance over the radii, per `τ`.
    pub errors: Vec<f64>,
    /// `log(e_i/e_{i+1}) / log(τ_i/τ_{i+1})` between consecutive `τ`.
    pub orders: Vec<f64>,
}

impl RelaxationReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Compares the Cattaneo quartic roots at relaxation times `taus` (other
/// physical constants fixed) with the Fourier cubic roots. Three of the four
/// roots are matched to the cubic by the assignment with the smallest
/// largest distance; the leftover root is the one escaping to `−∞`.
pub fn relaxation_limit(base: &PhysicalParams, taus: &[f64], radii: &[f64]) -> Result<RelaxationReport> {
    if taus.len() < 2 || radii.is_empty() {
        return Err(Error::InvalidInput("need at least two tau values and one radius".into()));
    }
    let mut errors = Vec::with_capacity(taus.len());
    for &tau in taus {
        let np = base.with_tau(tau).normalize()?;
        let mut worst: f64 = 0.0;
        for &r in radii {
            let cat = unlabeled_set(r, &np)?.quartic;
            let fou = fourier_roots(r, &np)?;
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let mut best = f64::INFINITY;
            for drop in 0..4 {
                let rest: Vec<C64> = (0..4).filter(|&i| i != drop).map(|i| cat[i]).collect();
                for p in &perms {
                    let e = (0..3).map(|k| (rest[p[k]] - fou[k]).norm()).fold(0.0, f64::max);
                    best = best.min(e);
                }
            }
            worst = worst.max(best);
        }
        errors.push(worst);
    }
    let orders = (0..taus.len() - 1)
        .map(|i| (errors[i] / errors[i + 1]).ln() / (taus[i] / taus[i + 1]).ln())
        .collect();
    Ok(RelaxationReport { taus: taus.to_vec(), radii: radii.to_vec(), errors, orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;

    fn np() -> NormalizedParams {
        NormalizedParams::defaults()
    }

    #[test]
    fn symbol_zero_and_unit() {
        let z = build_symbol_fourier([0.0; 3], &np());
        assert_eq!(z.entries.max_abs(), 0.0);
        let e = build_symbol_fourier([1.0, 0.0, 0.0], &np());
        assert!((e.entries[(4, 4)].re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_matches_block_eigenvalues() {
        for r in [0.01, 0.7, 30.0] {
            let roots = fourier_roots(r, &np()).unwrap();
            let eig = eigenvalues(&longitudinal_block_fourier(r, &np()).scale(C64::new(-1.0, 0.0))).unwrap();
            for z in roots {
                let d = eig.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-9 * (1.0 + z.norm()), "r={r}");
            }
        }
    }

    #[test]
    fn acoustic_speed_shared() {
        let r = 0.01;
        let roots = fourier_roots(r, &np()).unwrap();
        let im = roots.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
        assert!((im - np().c_hat * r).abs() < 5.0 * r * r * r);
    }

    #[test]
    fn modes_match_expm() {
        let (r, t) = (0.8, 3.0);
        let m = FourierModes::new(r, &np()).unwrap().unwrap();
        let e = fourier_expm(r, t, &np());
        let v = [C64::new(1.0, 0.0), C64::new(0.0, 0.5), C64::new(-0.3, 0.0)];
        let a = m.apply(t, &v);
        let b = e.matvec(&v);
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_f_definition() {
        let p = psi_fourier(2.0, C64::new(1.0, 0.0), &np());
        assert!((p - C64::new(0.0, -2.0 * (2.0f64 / 3.0).sqrt())).norm() < 1e-15);
    }
}
