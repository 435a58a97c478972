//! Exact whole-space linear evolution for radially structured data.
//!
//! Scalar data are radial profiles; vector data are longitudinal,
//! `ŵ₀(ξ) = i·w(r)·ξ/|ξ|`, so the physical fields are real gradients. In
//! the basis `(n, w·e, φ, ψ·e)` the evolution at `|ξ| = r` is the 4×4
//! longitudinal propagator, and every L² quantity reduces by Plancherel to a
//! one-dimensional integral `∫ 4π r² (…) dr`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::green::{longitudinal_expm, l4_apply, ModalPropagator};
use crate::params::NormalizedParams;
use crate::quadrature::{integrate, radial_integrate, GaussLegendre, RadialPlan};
use crate::symbol::unlabeled_set;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `1 − s²(3 − 2s)` with `s = (r − a)/(b − a)` clipped to `[0, 1]`.
pub fn smoothstep_down(r: f64, a: f64, b: f64) -> f64 {
    let s = ((r - a) / (b - a)).clamp(0.0, 1.0);
    1.0 - s * s * (3.0 - 2.0 * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Zero,
    /// `scale` on `[0, r0]`, smoothstep down to 0 on `[r0, r1]`.
    Smoothstep { scale: f64, r0: f64, r1: f64 },
    /// `scale` on `[0, radius]`, 0 beyond.
    Indicator { scale: f64, radius: f64 },
    /// `scale·exp(−r²/(2 width²))`.
    Gaussian { scale: f64, width: f64 },
}

impl Profile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Smoothstep { scale, r0, r1 } => scale * smoothstep_down(r, r0, r1),
            Profile::Indicator { scale, radius } => {
                if r <= radius {
                    scale
                } else {
                    0.0
                }
            }
            Profile::Gaussian { scale, width } => scale * (-r * r / (2.0 * width * width)).exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Smoothstep { scale, .. } | Profile::Indicator { scale, .. } | Profile::Gaussian { scale, .. } => scale == 0.0,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Profile::Zero => Vec::new(),
            Profile::Smoothstep { r0, r1, .. } => vec![r0, r1],
            Profile::Indicator { radius, .. } => vec![radius],
            Profile::Gaussian { width, .. } => vec![width],
        }
    }

    /// Radius beyond which the profile vanishes; `None` if unbounded.
    pub fn support(&self) -> Option<f64> {
        match *self {
            Profile::Zero => Some(0.0),
            Profile::Smoothstep { r1, .. } => Some(r1),
            Profile::Indicator { radius, .. } => Some(radius),
            Profile::Gaussian { .. } => None,
        }
    }

    /// Exponent `p` with `|profile(r)| ~ r^p` as `r → 0`.
    pub fn small_r_exponent(&self) -> f64 {
        if self.is_zero() {
            f64::INFINITY
        } else {
            0.0
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Smoothstep { scale, .. } | Profile::Indicator { scale, .. } | Profile::Gaussian { scale, .. } => scale.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialDataSpec {
    pub n0: Profile,
    /// Longitudinal velocity profile; the coefficient is `i·w0(r)`.
    pub w0: Profile,
    pub phi0: Profile,
    /// Longitudinal flux profile; the coefficient is `i·psi0(r)`.
    pub psi0: Profile,
    pub mu0: f64,
    pub r0: f64,
    /// Lower estimate of `‖U₀‖_{L¹}` from `sup|Û₀| ≤ ‖U₀‖_{L¹}`.
    pub a0: f64,
}

impl RadialDataSpec {
    pub fn zero() -> Self {
        Self { n0: Profile::Zero, w0: Profile::Zero, phi0: Profile::Zero, psi0: Profile::Zero, mu0: 0.0, r0: 0.0, a0: 0.0 }
    }

    pub fn from_profiles(n0: Profile, w0: Profile, phi0: Profile, psi0: Profile) -> Self {
        let a0 = [n0, w0, phi0, psi0].iter().map(|p| p.sup()).fold(0.0, f64::max);
        Self { n0, w0, phi0, psi0, mu0: 0.0, r0: 0.0, a0 }
    }

    fn profiles(&self) -> [Profile; 4] {
        [self.n0, self.w0, self.phi0, self.psi0]
    }

    pub fn is_zero(&self) -> bool {
        self.profiles().iter().all(|p| p.is_zero())
    }

    /// Longitudinal coefficients `(n̂, ŵ·e, φ̂, ψ̂·e)` at radius `r`.
    pub fn at(&self, r: f64) -> [C64; 4] {
        [
            C64::new(self.n0.eval(r), 0.0),
            I * self.w0.eval(r),
            C64::new(self.phi0.eval(r), 0.0),
            I * self.psi0.eval(r),
        ]
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.profiles().iter().flat_map(|p| p.breakpoints()).collect()
    }

    pub fn support(&self) -> Option<f64> {
        let mut s: f64 = 0.0;
        for p in self.profiles().iter().filter(|p| !p.is_zero()) {
            s = s.max(p.support()?);
        }
        Some(s)
    }

    pub fn small_r_exponent(&self) -> f64 {
        self.profiles().iter().map(|p| p.small_r_exponent()).fold(f64::INFINITY, f64::min)
    }
}

/// Data with `n̂₀ = μ₀·χ₁`, all other fields zero.
pub fn make_lowerbound_data(mu0: f64, r0: f64, big_r0: f64) -> Result<RadialDataSpec> {
    if !(mu0 > 0.0) || !(r0 > 0.0 && r0 < big_r0) {
        return Err(Error::InvalidInput(format!("need mu0 > 0 and 0 < r0 < R0, got ({mu0}, {r0}, {big_r0})")));
    }
    Ok(RadialDataSpec {
        n0: Profile::Smoothstep { scale: mu0, r0, r1: big_r0 },
        w0: Profile::Zero,
        phi0: Profile::Zero,
        psi0: Profile::Zero,
        mu0,
        r0,
        a0: mu0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBands {
    pub r0: f64,
    pub big_r0: f64,
}

impl FrequencyBands {
    pub fn new(r0: f64, big_r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < big_r0) {
            return Err(Error::InvalidInput(format!("bands need 0 < r0 < R0, got ({r0}, {big_r0})")));
        }
        Ok(Self { r0, big_r0 })
    }

    pub fn chi1(&self, r: f64) -> f64 {
        smoothstep_down(r, self.r0, self.big_r0)
    }

    pub fn chi_inf(&self, r: f64) -> f64 {
        1.0 - self.chi1(r)
    }

    pub fn weight(&self, band: BandSel, r: f64) -> f64 {
        match band {
            BandSel::Full => 1.0,
            BandSel::Low => self.chi1(r).powi(2),
            BandSel::High => self.chi_inf(r).powi(2),
        }
    }
}

impl Default for FrequencyBands {
    fn default() -> Self {
        Self { r0: 0.1, big_r0: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSel {
    Full,
    Low,
    High,
}

impl BandSel {
    pub fn name(self) -> &'static str {
        match self {
            BandSel::Full => "full",
            BandSel::Low => "low",
            BandSel::High => "high",
        }
    }
}

/// Subset of `(n, w, φ, ψ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Components(pub [bool; 4]);

impl Components {
    pub const N: Self = Self([true, false, false, false]);
    pub const W: Self = Self([false, true, false, false]);
    pub const PHI: Self = Self([false, false, true, false]);
    pub const PSI: Self = Self([false, false, false, true]);
    pub const FLUID: Self = Self([true, true, true, false]);
    pub const ALL: Self = Self([true, true, true, true]);

    pub fn label(&self) -> String {
        let names = ["n", "w", "phi", "psi"];
        let parts: Vec<&str> = (0..4).filter(|&i| self.0[i]).map(|i| names[i]).collect();
        parts.join("+")
    }

    fn sum_sq(&self, u: &[C64; 4]) -> f64 {
        (0..4).filter(|&i| self.0[i]).map(|i| u[i].norm_sqr()).sum()
    }
}

/// One norm column: `(∫ 4π r² r^{2·order} w_band |U_c|² dr)^{1/2}`. A
/// derivative order `k` has `order = k`; `Λ^{−ℓ}` has `order = −ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRequest {
    pub components: Components,
    pub order: f64,
    pub band: BandSel,
}

impl NormRequest {
    pub fn derivative(components: Components, k: u32, band: BandSel) -> Self {
        Self { components, order: k as f64, band }
    }

    pub fn negative(components: Components, ell: f64) -> Self {
        Self { components, order: -ell, band: BandSel::Full }
    }

    pub fn label(&self) -> String {
        if self.order < 0.0 {
            format!("{}_neg{}_{}", self.components.label(), -self.order, self.band.name())
        } else {
            format!("{}_k{}_{}", self.components.label(), self.order, self.band.name())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub k: u32,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    /// Quadrature error estimates for each column (in the norm, not squared).
    pub errors: Vec<Vec<f64>>,
    /// `E_k^s = Σ_{j=k}^{s} ‖∇ʲ(n,w,φ,ψ)‖²`.
    pub e_k_s: Option<Vec<f64>>,
    /// Running supremum of `(1+t)^{3/4}·(E_0^s)^{1/2}`.
    pub m_t: Option<Vec<f64>>,
}

impl NormSeries {
    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.labels.iter().position(|l| l == label).map(|i| self.columns[i].as_slice())
    }
}

/// Exact frequency-space evolution of the longitudinal block.
pub trait Evolver {
    /// Largest `∂ Im λ/∂r`, used to cap panel widths at `π/(speed·t)`.
    fn oscillation_speed(&self) -> f64;
    fn evolve(&self, r: f64, t: f64, u0: &[C64; 4]) -> Result<[C64; 4]>;
}

/// The Cattaneo system: modal sums, or the matrix exponential at root
/// collisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CattaneoEvolver {
    pub np: NormalizedParams,
}

// built once per radius and used immediately, so boxing buys nothing
#[allow(clippy::large_enum_variant)]
pub enum Modes {
    Modal(ModalPropagator),
    Expm(f64),
}

impl CattaneoEvolver {
    pub fn new(np: NormalizedParams) -> Self {
        Self { np }
    }

    pub fn modes(&self, r: f64) -> Result<Modes> {
        if r == 0.0 {
            return Ok(Modes::Expm(0.0));
        }
        let set = unlabeled_set(r, &self.np)?;
        Ok(match ModalPropagator::new(&set, &self.np) {
            Ok(m) => Modes::Modal(m),
            Err(_) => Modes::Expm(r),
        })
    }

    pub fn apply(&self, modes: &Modes, t: f64, u0: &[C64; 4]) -> [C64; 4] {
        match modes {
            Modes::Modal(m) => m.apply(t, u0),
            Modes::Expm(r) => l4_apply(&longitudinal_expm(*r, t, &self.np), u0),
        }
    }
}

impl Evolver for CattaneoEvolver {
    fn oscillation_speed(&self) -> f64 {
        self.np.c_hat.max(self.np.b)
    }

    fn evolve(&self, r: f64, t: f64, u0: &[C64; 4]) -> Result<[C64; 4]> {
        let modes = self.modes(r)?;
        Ok(self.apply(&modes, t, u0))
    }
}

pub const NORM_REL_TOL: f64 = 1e-10;

fn plan_for(data: &RadialDataSpec, bands: &FrequencyBands, speed: f64, t: f64) -> RadialPlan {
    let mut bps = data.breakpoints();
    bps.push(bands.r0);
    bps.push(bands.big_r0);
    RadialPlan {
        breakpoints: bps,
        support: data.support(),
        cap: if t > 0.0 { PI / (speed * t) } else { f64::INFINITY },
        rel_tol: NORM_REL_TOL,
        ..Default::default()
    }
}

fn check_integrable(data: &RadialDataSpec, requests: &[NormRequest]) -> Result<()> {
    let p = data.small_r_exponent();
    for req in requests {
        // integrand ~ r^{2 + 2·order + 2p} near 0
        let exponent = 2.0 + 2.0 * req.order + 2.0 * p;
        if exponent <= -1.0 {
            return Err(Error::DivergentIntegral { exponent });
        }
    }
    Ok(())
}

/// All requested norms at one time in a single quadrature pass. Returns
/// `(values, error estimates)`.
pub fn norms_at<E: Evolver>(
    ev: &E,
    data: &RadialDataSpec,
    t: f64,
    requests: &[NormRequest],
    bands: &FrequencyBands,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_integrable(data, requests)?;
    if data.is_zero() {
        return Ok((vec![0.0; requests.len()], vec![0.0; requests.len()]));
    }
    let gl = GaussLegendre::gl16();
    let plan = plan_for(data, bands, ev.oscillation_speed(), t);
    let res = radial_integrate(&gl, requests.len(), &plan, |r, out| {
        let u0 = data.at(r);
        let u = if t == 0.0 { u0 } else { ev.evolve(r, t, &u0)? };
        for (o, req) in out.iter_mut().zip(requests) {
            let w = bands.weight(req.band, r);
            *o = if w == 0.0 {
                0.0
            } else {
                4.0 * PI * r * r * r.powf(2.0 * req.order) * w * req.components.sum_sq(&u)
            };
        }
        Ok(())
    })?;
    let values: Vec<f64> = res.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    let errors = res
        .errors
        .iter()
        .zip(&values)
        .map(|(e, v)| if *v > 0.0 { e / (2.0 * v) } else { e.sqrt() })
        .collect();
    Ok((values, errors))
}

pub fn sobolev_norm(
    np: &NormalizedParams,
    data: &RadialDataSpec,
    t: f64,
    components: Components,
    k: u32,
    band: BandSel,
    bands: &FrequencyBands,
) -> Result<f64> {
    let req = NormRequest::derivative(components, k, band);
    Ok(norms_at(&CattaneoEvolver::new(*np), data, t, &[req], bands)?.0[0])
}

pub fn negative_norm(np: &NormalizedParams, data: &RadialDataSpec, t: f64, components: Components, ell: f64) -> Result<f64> {
    if !(ell > 0.0) {
        return Err(Error::InvalidInput(format!("ell must be positive, got {ell}")));
    }
    let req = NormRequest::negative(components, ell);
    Ok(norms_at(&CattaneoEvolver::new(*np), data, t, &[req], &FrequencyBands::default())?.0[0])
}

/// Norm columns over a time grid, with optional `E_k^s` and `M(t)`.
pub fn evolve_series_with<E: Evolver>(
    ev: &E,
    data: &RadialDataSpec,
    times: &[f64],
    requests: &[NormRequest],
    bands: &FrequencyBands,
    diagnostics: Option<Diagnostics>,
) -> Result<NormSeries> {
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidInput("times must be nonnegative and increasing".into()));
    }
    let mut all: Vec<NormRequest> = requests.to_vec();
    if let Some(d) = diagnostics {
        if d.k > d.s {
            return Err(Error::InvalidInput("diagnostics need k <= s".into()));
        }
        for j in 0..=d.s {
            all.push(NormRequest::derivative(Components::ALL, j, BandSel::Full));
        }
    }
    let m = requests.len();
    let mut columns = vec![Vec::with_capacity(times.len()); m];
    let mut errors = vec![Vec::with_capacity(times.len()); m];
    let mut e_k_s = Vec::new();
    let mut m_t = Vec::new();
    let mut running: f64 = 0.0;
    for &t in times {
        let (vals, errs) = norms_at(ev, data, t, &all, bands)?;
        for i in 0..m {
            columns[i].push(vals[i]);
            errors[i].push(errs[i]);
        }
        if let Some(d) = diagnostics {
            let sq = |j: u32| vals[m + j as usize].powi(2);
            e_k_s.push((d.k..=d.s).map(sq).sum());
            let e0: f64 = (0..=d.s).map(sq).sum();
            running = running.max((1.0 + t).powf(0.75) * e0.sqrt());
            m_t.push(running);
        }
    }
    Ok(NormSeries {
        times: times.to_vec(),
        labels: requests.iter().map(|r| r.label()).collect(),
        columns,
        errors,
        e_k_s: diagnostics.map(|_| e_k_s),
        m_t: diagnostics.map(|_| m_t),
    })
}

pub fn evolve_series(
    np: &NormalizedParams,
    data: &RadialDataSpec,
    times: &[f64],
    requests: &[NormRequest],
    bands: &FrequencyBands,
    diagnostics: Option<Diagnostics>,
) -> Result<NormSeries> {
    evolve_series_with(&CattaneoEvolver::new(*np), data, times, requests, bands, diagnostics)
}

/// Time integrals below `t − DAMPING_WINDOW·τ` are dropped: the kernel there
/// is below `e^{−50}`.
pub const DAMPING_WINDOW: f64 = 50.0;

/// `e^{−t/τ}ψ̂₀ − b∫₀ᵗ e^{−(t−s)/τ}(ir)φ̂(r,s) ds` at one radius, using the
/// exactly known `φ̂(r,s)`.
pub fn reconstruct_psi_at(ev: &CattaneoEvolver, modes: &Modes, u0: &[C64; 4], r: f64, t: f64) -> Result<C64> {
    let np = &ev.np;
    let mut out = u0[3] * (-t / np.tau).exp();
    if t == 0.0 || r == 0.0 {
        return Ok(out);
    }
    let gl = GaussLegendre::gl16();
    let lo = (t - DAMPING_WINDOW * np.tau).max(0.0);
    let speed = match modes {
        Modes::Modal(m) => m.lambdas.iter().map(|l| l.im.abs()).fold(0.0, f64::max),
        Modes::Expm(_) => ev.oscillation_speed() * r,
    };
    let width = np.tau.min(if speed > 0.0 { PI / speed } else { f64::INFINITY });
    let scale = u0.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let part = |f: &dyn Fn(C64) -> f64| -> Result<f64> {
        integrate(
            &gl,
            &mut |s| {
                let phi = ev.apply(modes, s, u0)[2];
                f((-(t - s) / np.tau).exp() * I * r * phi)
            },
            lo,
            t,
            1e-12,
            1e-16 * scale,
            width,
        )
        .map(|e| e.value)
    };
    let re = part(&|z| z.re)?;
    let im = part(&|z| z.im)?;
    out -= C64::new(re, im) * np.b;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhamelReport {
    pub t: f64,
    /// `‖ψ_rec − ψ‖_{L²}`.
    pub discrepancy: f64,
    /// `‖ψ‖_{L²}` of the directly evolved flux.
    pub reference: f64,
    pub relative: f64,
    /// Discrepancy of `e^{−t/τ}ψ₀` alone.
    pub naive_discrepancy: f64,
}

pub fn duhamel_reconstruct_psi(np: &NormalizedParams, data: &RadialDataSpec, t: f64) -> Result<DuhamelReport> {
    let ev = CattaneoEvolver::new(*np);
    if data.is_zero() || t == 0.0 {
        // ψ(0) = ψ₀ on both sides
        let reference = if t == 0.0 { norms_at(&ev, data, 0.0, &[NormRequest::derivative(Components::PSI, 0, BandSel::Full)], &FrequencyBands::default())?.0[0] } else { 0.0 };
        return Ok(DuhamelReport { t, discrepancy: 0.0, reference, relative: 0.0, naive_discrepancy: 0.0 });
    }
    let gl = GaussLegendre::gl16();
    let mut plan = plan_for(data, &FrequencyBands::default(), ev.oscillation_speed(), t);
    plan.floors = vec![(0, 1, 1e-18), (2, 1, 1e-13)];
    let res = radial_integrate(&gl, 3, &plan, |r, out| {
        let u0 = data.at(r);
        let modes = ev.modes(r)?;
        let psi = ev.apply(&modes, t, &u0)[3];
        let rec = reconstruct_psi_at(&ev, &modes, &u0, r, t)?;
        let naive = u0[3] * (-t / np.tau).exp();
        let w = 4.0 * PI * r * r;
        out[0] = w * (rec - psi).norm_sqr();
        out[1] = w * psi.norm_sqr();
        out[2] = w * (naive - psi).norm_sqr();
        Ok(())
    })?;
    let discrepancy = res.values[0].max(0.0).sqrt();
    let reference = res.values[1].max(0.0).sqrt();
    let relative = if reference > 0.0 { discrepancy / reference } else { discrepancy };
    Ok(DuhamelReport { t, discrepancy, reference, relative, naive_discrepancy: res.values[2].max(0.0).sqrt() })
}

/// Prefactor `C` in front of the `Z₁` integral: the `4π` of the radial
/// volume element.
pub const Z1_PREFACTOR: f64 = 4.0 * PI;

/// `C μ₀² t^{−3/2} ∫₀^{r₀√t} e^{−(ν₁+ν₂)m²}(1 + cos(ĉ m√t))² m² dm`, with
/// panels no wider than `π/(ĉ√t)`.
pub fn z1_lower_integral(t: f64, mu0: f64, r0: f64, np: &NormalizedParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let a = np.nu1() + np.nu2();
    let st = t.sqrt();
    let omega = np.c_hat * st;
    // beyond this the Gaussian factor is below 1e-30 of its peak
    let upper = (r0 * st).min((70.0 / a).sqrt());
    let gl = GaussLegendre::gl16();
    let e = integrate(
        &gl,
        &mut |m| {
            let c = 1.0 + (omega * m).cos();
            (-a * m * m).exp() * c * c * m * m
        },
        0.0,
        upper,
        1e-12,
        // the integral is O(1); panels near the zeros of 1 + cos are tiny
        1e-14,
        PI / omega,
    )?;
    Ok(Z1_PREFACTOR * mu0 * mu0 * t.powf(-1.5) * e.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np() -> NormalizedParams {
        NormalizedParams::defaults()
    }

    fn ball() -> RadialDataSpec {
        RadialDataSpec::from_profiles(Profile::Indicator { scale: 1.0, radius: 1.0 }, Profile::Zero, Profile::Zero, Profile::Zero)
    }

    #[test]
    fn lowerbound_profile() {
        let d = make_lowerbound_data(1.0, 0.1, 10.0).unwrap();
        assert_eq!(d.at(0.05)[0].re, 1.0);
        assert_eq!(d.at(20.0)[0].re, 0.0);
        assert!(make_lowerbound_data(1.0, 0.2, 0.1).is_err());
    }

    #[test]
    fn ball_norms_at_zero_time() {
        let b = FrequencyBands::default();
        let n0 = sobolev_norm(&np(), &ball(), 0.0, Components::N, 0, BandSel::Full, &b).unwrap();
        assert!((n0 - (4.0 * PI / 3.0).sqrt()).abs() < 1e-12);
        let n1 = sobolev_norm(&np(), &ball(), 0.0, Components::N, 1, BandSel::Full, &b).unwrap();
        assert!((n1 - (4.0 * PI / 5.0).sqrt()).abs() < 1e-12);
        let neg = negative_norm(&np(), &ball(), 0.0, Components::N, 1.0).unwrap();
        assert!((neg - (4.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn divergent_negative_norm() {
        let err = negative_norm(&np(), &ball(), 0.0, Components::N, 1.6).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
    }

    #[test]
    fn zero_data_gives_zero_series() {
        let s = evolve_series(&np(), &RadialDataSpec::zero(), &[0.0, 1.0], &[NormRequest::derivative(Components::ALL, 0, BandSel::Full)], &FrequencyBands::default(), None).unwrap();
        assert!(s.columns[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn duhamel_exact_at_zero() {
        let d = make_lowerbound_data(1.0, 0.1, 10.0).unwrap();
        let rep = duhamel_reconstruct_psi(&np(), &d, 0.0).unwrap();
        assert_eq!(rep.discrepancy, 0.0);
    }

    #[test]
    fn z1_zero_of_integrand() {
        // (1 + cos)² vanishes where cos = −1
        let c = 1.0 + PI.cos();
        assert_eq!(c * c, 0.0);
        let v = z1_lower_integral(1e4, 1.0, 0.1, &np()).unwrap();
        assert!(v > 0.0);
    }
}
