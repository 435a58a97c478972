//! The Fourier-space Green matrix `Ĝ(ξ,t) = exp(−B(ξ)t)`.
//!
//! Three evaluators: explicit spectral sums over the quartic roots, the
//! matrix exponential, and the low-frequency leading-order expressions.
//! All work on the 4×4 longitudinal block and embed it into 8×8 with the
//! transverse projector `I − eeᵀ`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{expm, CMatrix};
use crate::params::NormalizedParams;
use crate::symbol::{build_symbol, eigen_set, longitudinal_block, norm3, Band, EigenSet};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Dense 4×4 longitudinal block `(n, w·e, φ, ψ·e)`.
pub type L4 = [[C64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Explicit,
    Expm,
    LowFreq,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Explicit => "explicit",
            Method::Expm => "expm",
            Method::LowFreq => "lowfreq",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    pub entries: CMatrix,
    pub xi: [f64; 3],
    pub t: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWeights {
    pub g: [C64; 4],
    pub h: [C64; 4],
}

pub fn gk_hk(eigs: &EigenSet, np: &NormalizedParams) -> SpectralWeights {
    let r2 = eigs.r * eigs.r;
    let mut g = [ZERO; 4];
    let mut h = [ZERO; 4];
    for (k, &l) in eigs.quartic.iter().enumerate() {
        g[k] = l * l + l / np.tau + np.b * np.b * r2;
        h[k] = l * l + l * (np.two_nu_eta * r2) + np.c * np.c * r2;
    }
    SpectralWeights { g, h }
}

pub const COLLISION_FACTOR: f64 = 1e-6;

/// Fails when two roots sit closer than `1e−6·max|λ|`.
pub fn collision_check(eigs: &EigenSet) -> Result<()> {
    let scale = eigs.quartic.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = COLLISION_FACTOR * scale;
    let sep = eigs.min_separation();
    if !(sep > threshold) {
        return Err(Error::EigenvalueCollision { separation: sep, threshold });
    }
    Ok(())
}

/// `Ĝ_L(t) = Σ_k e^{λ_k t} M_k` over the four longitudinal roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalPropagator {
    pub lambdas: [C64; 4],
    pub residues: [L4; 4],
}

impl ModalPropagator {
    /// Residue matrices read off the explicit spectral sums. Fails on root
    /// collisions, where the sums are singular.
    pub fn new(eigs: &EigenSet, np: &NormalizedParams) -> Result<Self> {
        collision_check(eigs)?;
        let w = gk_hk(eigs, np);
        let (c, s, b, it) = (np.c, np.sigma, np.b, 1.0 / np.tau);
        let r = eigs.r;
        let r2 = r * r;
        let ir = I * r;
        let lam = eigs.quartic;
        let mut residues = [[[ZERO; 4]; 4]; 4];
        for k in 0..4 {
            let l = lam[k];
            let mut pi = C64::new(1.0, 0.0);
            for j in 0..4 {
                if j != k {
                    pi *= l - lam[j];
                }
            }
            let inv = pi.inv();
            let (g, h) = (w.g[k], w.h[k]);
            let m = &mut residues[k];
            m[0][0] = -(g * c * c * r2) / l * inv;
            m[0][1] = -(g * c) * ir * inv;
            m[0][2] = -(l + it) * (c * s * r2) * inv;
            m[0][3] = ir * (c * s * b * r2) * inv;
            m[1][1] = g * l * inv;
            m[1][2] = -(l + it) * l * s * ir * inv;
            m[1][3] = -l * (s * b * r2) * inv;
            m[2][2] = (l + it) * h * inv;
            m[2][3] = -h * b * ir * inv;
            m[3][3] = l * (h + s * s * r2) * inv;
            for i in 0..4 {
                for j in 0..i {
                    m[i][j] = m[j][i];
                }
            }
        }
        Ok(Self { lambdas: lam, residues })
    }

    pub fn at(&self, t: f64) -> L4 {
        let mut out = [[ZERO; 4]; 4];
        for k in 0..4 {
            let e = (self.lambdas[k] * t).exp();
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] += self.residues[k][i][j] * e;
                }
            }
        }
        out
    }

    /// `Ĝ_L(t)·v` without forming the matrix.
    pub fn apply(&self, t: f64, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for k in 0..4 {
            let e = (self.lambdas[k] * t).exp();
            if e == ZERO {
                continue;
            }
            for i in 0..4 {
                let mut acc = ZERO;
                for j in 0..4 {
                    acc += self.residues[k][i][j] * v[j];
                }
                out[i] += acc * e;
            }
        }
        out
    }
}

pub fn l4_from_cmatrix(m: &CMatrix) -> L4 {
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

pub fn l4_apply(m: &L4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

/// `exp(−B_L t)` for the longitudinal block.
pub fn longitudinal_expm(r: f64, t: f64, np: &NormalizedParams) -> L4 {
    let b = longitudinal_block(r, np).scale(C64::new(-t, 0.0));
    l4_from_cmatrix(&expm(&b))
}

/// Leading-order longitudinal block for `r ≤ r0`, with labels from the
/// low-frequency expansion (`λ₄` in the upper half-plane).
pub fn longitudinal_lowfreq(eigs: &EigenSet, t: f64, np: &NormalizedParams) -> L4 {
    let (c, s, b, tau) = (np.c, np.sigma, np.b, np.tau);
    let ch2 = c * c + s * s;
    let ch = ch2.sqrt();
    let r = eigs.r;
    let r2 = r * r;
    let ix = I * r;
    let [e3, e4, e5, e6] = [0, 1, 2, 3].map(|k| (eigs.quartic[k] * t).exp());
    let (b2, b4) = (b * b, b * b * b * b);
    let mut g = [[ZERO; 4]; 4];
    g[0][0] = e3 * (-c * c * b4 * tau.powi(6) * r2 * r2 * r2) + (e4 + e5) * (c * c / (2.0 * ch2)) + e6 * (s * s / ch2);
    g[0][1] = ix * e3 * (c * b4 * tau.powi(5) * r2 * r2) - e4 * (c / (2.0 * ch)) + e5 * (c / (2.0 * ch))
        - ix * e6 * (c * b2 * s * s * tau / (ch2 * ch2));
    g[0][2] = e3 * (c * b2 * s * tau.powi(4) * r2 * r2) + (e4 + e5) * (c * s / (2.0 * ch2)) - e6 * (c * s / ch2);
    g[0][3] = -ix * e3 * (c * b * s * tau.powi(3) * r2) - ix * e4 * (c * b * s * tau / (2.0 * ch2))
        + ix * e5 * (c * b * s * tau / (2.0 * ch2))
        + ix * e6 * (c * b * s * tau / ch2);
    g[1][1] = e3 * (b4 * tau.powi(4) * r2 * r2) + (e4 + e5) * 0.5 - e6 * (c * c * b4 * s * s * tau * tau / (ch2 * ch2 * ch2) * r2);
    g[1][2] = -ix * e3 * (b2 * s * tau.powi(3) * r2) - e4 * (s / (2.0 * ch)) + e5 * (s / (2.0 * ch))
        + ix * e6 * (c * c * b2 * s * tau / (ch2 * ch2));
    g[1][3] = -e3 * (b * s * tau * tau * r2) + I * e4 * (b * s * tau / (2.0 * ch) * r) - I * e5 * (b * s * tau / (2.0 * ch) * r)
        + e6 * (c * c * b2 * b * s * tau * tau / (ch2 * ch2) * r2);
    g[2][2] = -e3 * (b2 * tau * tau * r2) + (e4 + e5) * (s * s / (2.0 * ch2)) + e6 * (c * c / ch2);
    g[2][3] = ix * e3 * (b * tau) - ix * (e4 + e5) * (b * s * s * tau / (2.0 * ch2)) - ix * e6 * (c * c * b * tau / ch2);
    g[3][3] = e3 - (e4 + e5) * (b2 * s * s * tau * tau / (2.0 * ch2) * r2) - e6 * (c * c * b2 * tau * tau / ch2 * r2);
    for i in 0..4 {
        for j in 0..i {
            g[i][j] = g[j][i];
        }
    }
    g
}


/// Builds the 8×8 matrix from a longitudinal block along `e = ξ/|ξ|` and the
/// transverse factors for the `w` and `ψ` blocks.
pub fn embed(l: &L4, e: [f64; 3], trans_w: C64, trans_psi: C64) -> CMatrix {
    let mut g = CMatrix::zeros(8);
    // longitudinal slot of each 8×8 index, plus the direction component
    let slot = |i: usize| -> (usize, Option<usize>) {
        match i {
            0 => (0, None),
            1..=3 => (1, Some(i - 1)),
            4 => (2, None),
            _ => (3, Some(i - 5)),
        }
    };
    for i in 0..8 {
        let (si, di) = slot(i);
        for j in 0..8 {
            let (sj, dj) = slot(j);
            let mut v = l[si][sj];
            if let Some(a) = di {
                v *= e[a];
            }
            if let Some(bb) = dj {
                v *= e[bb];
            }
            if let (Some(a), Some(bb)) = (di, dj) {
                if si == sj {
                    let proj = if a == bb { 1.0 } else { 0.0 } - e[a] * e[bb];
                    let f = if si == 1 { trans_w } else { trans_psi };
                    v += f * proj;
                }
            }
            g[(i, j)] = v;
        }
    }
    g
}

fn direction(xi: &[f64; 3]) -> (f64, [f64; 3]) {
    let r = norm3(xi);
    (r, [xi[0] / r, xi[1] / r, xi[2] / r])
}

fn transverse(r: f64, t: f64, np: &NormalizedParams) -> (C64, C64) {
    (
        C64::new((-np.nu * r * r * t).exp(), 0.0),
        C64::new((-t / np.tau).exp(), 0.0),
    )
}

pub fn green_explicit(xi: [f64; 3], t: f64, np: &NormalizedParams) -> Result<GreenMatrix> {
    let (r, e) = direction(&xi);
    if !(r > 0.0) {
        return Err(Error::EigenvalueCollision { separation: 0.0, threshold: 0.0 });
    }
    let eigs = eigen_set(r, np, Band::Low)?;
    let modal = ModalPropagator::new(&eigs, np)?;
    let (tw, tp) = transverse(r, t, np);
    Ok(GreenMatrix { entries: embed(&modal.at(t), e, tw, tp), xi, t, method: Method::Explicit })
}

pub fn green_expm(xi: [f64; 3], t: f64, np: &NormalizedParams) -> GreenMatrix {
    let b = build_symbol(xi, np).entries.scale(C64::new(-t, 0.0));
    GreenMatrix { entries: expm(&b), xi, t, method: Method::Expm }
}

pub fn green_lowfreq_leading(xi: [f64; 3], t: f64, np: &NormalizedParams, r0: f64) -> Result<GreenMatrix> {
    let r = norm3(&xi);
    if r > r0 {
        return Err(Error::OutOfBand { r, r0 });
    }
    if r == 0.0 {
        return Err(Error::InvalidInput("leading-order matrix needs a direction, |xi| > 0".into()));
    }
    let (_, e) = direction(&xi);
    let eigs = eigen_set(r, np, Band::Low)?;
    let (tw, tp) = transverse(r, t, np);
    let l = longitudinal_lowfreq(&eigs, t, np);
    Ok(GreenMatrix { entries: embed(&l, e, tw, tp), xi, t, method: Method::LowFreq })
}

/// Explicit evaluation, switching to the matrix exponential at collisions.
pub fn green_auto(xi: [f64; 3], t: f64, np: &NormalizedParams) -> GreenMatrix {
    match green_explicit(xi, t, np) {
        Ok(g) => g,
        Err(_) => green_expm(xi, t, np),
    }
}

pub fn apply_green(g: &GreenMatrix, u0: &[C64; 8]) -> [C64; 8] {
    let v = g.entries.matvec(u0);
    let mut out = [ZERO; 8];
    out.copy_from_slice(&v);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np() -> NormalizedParams {
        NormalizedParams::defaults()
    }

    #[test]
    fn weights_vanish_at_origin() {
        let set = EigenSet { r: 0.0, lambda1: 0.0, lambda2: -1.0, quartic: [C64::new(-1.0, 0.0), ZERO, ZERO, ZERO] };
        let w = gk_hk(&set, &np());
        assert!(w.g[0].norm() < 1e-15);
        assert_eq!(w.g[1], ZERO);
        assert_eq!(w.h[1], ZERO);
    }

    #[test]
    fn explicit_is_identity_at_zero_time() {
        for xi in [[0.3, 0.0, 0.0], [0.01, -0.02, 0.005], [40.0, 3.0, -7.0]] {
            let g = green_explicit(xi, 0.0, &np()).unwrap();
            assert!(g.entries.max_abs_diff(&CMatrix::identity(8)) < 1e-9, "{xi:?}");
        }
    }

    #[test]
    fn explicit_matches_expm() {
        let g = green_explicit([0.3, 0.0, 0.0], 2.0, &np()).unwrap();
        let h = green_expm([0.3, 0.0, 0.0], 2.0, &np());
        assert!(g.entries.max_abs_diff(&h.entries) < 1e-8);
    }

    #[test]
    fn explicit_decays() {
        let g = green_explicit([0.1, 0.0, 0.0], 1e4, &np()).unwrap();
        assert!(g.entries.max_abs() < 1e-6);
    }

    #[test]
    fn expm_at_origin() {
        let t = 1.7;
        let g = green_expm([0.0; 3], t, &np());
        for i in 0..8 {
            let want = if i >= 5 { (-t).exp() } else { 1.0 };
            assert!((g.entries[(i, i)].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn expm_semigroup() {
        let xi = [0.7, -0.2, 0.4];
        let a = green_expm(xi, 0.8, &np());
        let b = green_expm(xi, 1.9, &np());
        let ab = green_expm(xi, 2.7, &np());
        assert!((&a.entries * &b.entries).max_abs_diff(&ab.entries) < 1e-10);
    }

    #[test]
    fn lowfreq_out_of_band() {
        let err = green_lowfreq_leading([0.2, 0.0, 0.0], 1.0, &np(), 0.1);
        assert_eq!(err.unwrap_err(), Error::OutOfBand { r: 0.2, r0: 0.1 });
    }

    #[test]
    fn lowfreq_dominant_entry() {
        let xi = [0.01, 0.0, 0.0];
        let lo = green_lowfreq_leading(xi, 10.0, &np(), 0.1).unwrap();
        let ex = green_expm(xi, 10.0, &np());
        let (a, b) = (lo.entries[(4, 5)], ex.entries[(4, 5)]);
        assert!((a - b).norm() / b.norm() < 0.05);
    }

    #[test]
    fn collision_routes_to_expm() {
        assert!(matches!(green_explicit([0.0; 3], 1.0, &np()), Err(Error::EigenvalueCollision { .. })));
        let g = green_auto([0.0; 3], 1.0, &np());
        assert_eq!(g.method, Method::Expm);
    }

    #[test]
    fn apply_identity() {
        let g = green_expm([0.4, 0.1, 0.0], 0.0, &np());
        let u: [C64; 8] = core::array::from_fn(|i| C64::new(i as f64, 1.0 - i as f64));
        let v = apply_green(&g, &u);
        for (a, b) in u.iter().zip(v) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
