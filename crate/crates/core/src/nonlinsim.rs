//! Pseudo-spectral solver for the full nonlinear perturbation system on the
//! periodic box `[0, 2πL)³`.
//!
//! The box replaces `ℝ³`, so nothing here measures algebraic decay; the solver
//! exists to exercise the nonlinear terms and to monitor the conserved and
//! dissipated functionals. Fields are stored as Fourier coefficients with
//! `f(x) = Σ_k f̂_k e^{ik·x/L}` in the order `(n, w₁, w₂, w₃, φ, ψ₁, ψ₂, ψ₃)`.
//!
//! A step is Strang splitting: exact linear flow `exp(−B dt/2)` per mode, one
//! explicit midpoint step of the dealiased nonlinearity, exact linear flow
//! again. Quadratic products are alias-free under the 2/3 rule; the factor
//! `1/(1+n)` is evaluated pointwise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fft::{wavenumber, Fft3};
use crate::green::green_expm;
use crate::params::{from_perturbation, NormalizedParams, PerturbationFields};

pub const FIELDS: usize = 8;
pub const N_IDX: usize = 0;
pub const W_IDX: [usize; 3] = [1, 2, 3];
pub const PHI_IDX: usize = 4;
pub const PSI_IDX: [usize; 3] = [5, 6, 7];

/// Abort thresholds for `1+n` and `1+√(γ−1)φ`.
pub const POSITIVITY_FLOOR: f64 = 0.25;
/// Largest admissible initial sup-bound of `n` and `√(γ−1)φ`.
pub const INIT_MARGIN: f64 = 0.5;
/// Advective Courant number limit.
pub const CFL_LIMIT: f64 = 0.5;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

type Coeffs = [Vec<C64>; FIELDS];

#[derive(Debug, Clone)]
pub struct PeriodicGrid {
    n: usize,
    l: f64,
    fft: Fft3,
    mask: Vec<bool>,
    xi: Vec<[f64; 3]>,
}

impl PeriodicGrid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(alloc::format!("grid size {n} must be a power of two >= 8")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!("box scale L = {l} must be positive")));
        }
        let fft = Fft3::new(n)?;
        let total = n * n * n;
        let mut mask = Vec::with_capacity(total);
        let mut xi = Vec::with_capacity(total);
        for idx in 0..total {
            let k = Self::split(n, idx).map(|i| wavenumber(i, n));
            // |k| > N/3  ⇔  3|k| > N
            mask.push(k.iter().all(|&ki| 3 * ki.unsigned_abs() as usize <= n));
            xi.push(k.map(|ki| ki as f64 / l));
        }
        Ok(Self { n, l, fft, mask, xi })
    }

    fn split(n: usize, idx: usize) -> [usize; 3] {
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI * self.l).powi(3)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.l / self.n as f64
    }

    /// Retained by the 2/3 rule.
    pub fn retained(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn xi(&self, idx: usize) -> [f64; 3] {
        self.xi[idx]
    }

    /// Storage index of the integer wavevector `k`.
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        let w = k.map(|ki| ki.rem_euclid(n) as usize);
        (w[0] * self.n + w[1]) * self.n + w[2]
    }

    /// Index of `−k`.
    pub fn partner(&self, idx: usize) -> usize {
        let n = self.n;
        let s = Self::split(n, idx).map(|i| (n - i) % n);
        (s[0] * n + s[1]) * n + s[2]
    }

    pub fn to_physical(&self, spec: &[C64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Forward transform with the dealiasing mask applied.
    pub fn to_spectral(&self, phys: &[f64]) -> Vec<C64> {
        let mut buf: Vec<C64> = phys.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.fft.forward(&mut buf);
        for (z, &keep) in buf.iter_mut().zip(&self.mask) {
            if !keep {
                *z = ZERO;
            }
        }
        buf
    }

    fn derivative(&self, spec: &[C64], axis: usize) -> Vec<f64> {
        let d: Vec<C64> = spec.iter().zip(&self.xi).map(|(z, xi)| z * I * xi[axis]).collect();
        self.to_physical(&d)
    }

    fn symbol_fn(&self, f: impl Fn(&[f64; 3]) -> C64) -> Vec<C64> {
        self.xi.iter().map(f).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub coeffs: Coeffs,
    pub time: f64,
}

impl StateField {
    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self { coeffs: core::array::from_fn(|_| vec![ZERO; grid.len()]), time: 0.0 }
    }

    /// Largest `|f̂(−k) − conj f̂(k)|` over all fields and modes.
    pub fn hermitian_defect(&self, grid: &PeriodicGrid) -> f64 {
        let mut worst: f64 = 0.0;
        for f in &self.coeffs {
            for idx in 0..f.len() {
                worst = worst.max((f[grid.partner(idx)] - f[idx].conj()).norm());
            }
        }
        worst
    }

    /// Number of nonzero coefficients of field `field`.
    pub fn support(&self, field: usize) -> usize {
        self.coeffs[field].iter().filter(|z| **z != ZERO).count()
    }

    pub fn physical(&self, grid: &PeriodicGrid) -> PerturbationFields {
        let p = |i: usize| grid.to_physical(&self.coeffs[i]);
        PerturbationFields {
            n: p(N_IDX),
            w: W_IDX.map(p),
            phi: p(PHI_IDX),
            psi: PSI_IDX.map(p),
        }
    }
}

/// `√(V Σ_k |â_k − b̂_k|²)` over all fields.
pub fn l2_distance(grid: &PeriodicGrid, a: &StateField, b: &StateField) -> f64 {
    let mut s = 0.0;
    for (fa, fb) in a.coeffs.iter().zip(&b.coeffs) {
        s += fa.iter().zip(fb).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
    }
    (grid.volume() * s).sqrt()
}

/// A prescribed Fourier mode; the conjugate partner at `−k` is added so the
/// field is `2 Re(coeff e^{ik·x/L})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub field: usize,
    pub k: [i64; 3],
    pub coeff: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// Random coefficients on `|k_i| ≤ k_max` (mean mode excluded), each field
    /// scaled so that `Σ_k |f̂_k|` (a bound on its sup norm) equals the amplitude.
    Random { seed: u64, k_max: usize },
    /// Listed modes, each coefficient multiplied by the amplitude.
    Modes(Vec<ModeSpec>),
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::Random { seed: 0, k_max: 2 }
    }
}

pub fn init_state(grid: &PeriodicGrid, spec: &InitSpec, amplitude: f64, np: &NormalizedParams) -> Result<StateField> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidInput(alloc::format!("amplitude {amplitude} must be finite and >= 0")));
    }
    let mut state = StateField::zeros(grid);
    match spec {
        InitSpec::Random { seed, k_max } => {
            let km = *k_max as i64;
            if km < 1 || 3 * km > grid.n() as i64 {
                return Err(Error::InvalidInput(alloc::format!("k_max {k_max} must lie in [1, N/3]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for field in state.coeffs.iter_mut() {
                for k0 in -km..=km {
                    for k1 in -km..=km {
                        for k2 in -km..=km {
                            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                            field[grid.index_of([k0, k1, k2])] = z;
                        }
                    }
                }
                field[0] = ZERO;
                let sym: Vec<C64> = (0..field.len()).map(|i| 0.5 * (field[i] + field[grid.partner(i)].conj())).collect();
                let total: f64 = sym.iter().map(|z| z.norm()).sum();
                let s = if total > 0.0 { amplitude / total } else { 0.0 };
                *field = sym.into_iter().map(|z| z * s).collect();
            }
        }
        InitSpec::Modes(modes) => {
            for m in modes {
                if m.field >= FIELDS {
                    return Err(Error::InvalidInput(alloc::format!("field index {} out of range", m.field)));
                }
                let idx = grid.index_of(m.k);
                if !grid.retained(idx) {
                    return Err(Error::InvalidInput(alloc::format!("mode {:?} is removed by dealiasing", m.k)));
                }
                let z = m.coeff * amplitude;
                let p = grid.partner(idx);
                if p == idx {
                    state.coeffs[m.field][idx] += C64::new(2.0 * z.re, 0.0);
                } else {
                    state.coeffs[m.field][idx] += z;
                    state.coeffs[m.field][p] += z.conj();
                }
            }
        }
    }
    let sup = |f: &Vec<C64>| f.iter().map(|z| z.norm()).sum::<f64>();
    let gs = (np.gamma - 1.0).sqrt();
    let min_factor = (1.0 - sup(&state.coeffs[N_IDX])).min(1.0 - gs * sup(&state.coeffs[PHI_IDX]));
    if min_factor <= INIT_MARGIN {
        return Err(Error::AmplitudeTooLarge { amplitude, min_factor });
    }
    Ok(state)
}

fn check_positivity(n: &[f64], phi: &[f64], np: &NormalizedParams) -> Result<()> {
    if let Some((index, &v)) = n.iter().enumerate().find(|(_, v)| !(1.0 + **v > POSITIVITY_FLOOR)) {
        return Err(Error::VacuumBreach { index, value: 1.0 + v });
    }
    let gs = (np.gamma - 1.0).sqrt();
    if let Some((index, &v)) = phi.iter().enumerate().find(|(_, v)| !(1.0 + gs * **v > POSITIVITY_FLOOR)) {
        return Err(Error::NegativeTemperature { index, value: 1.0 + gs * v });
    }
    Ok(())
}

/// Dealiased spectral tendencies `(f₁, f₂, f₃, 0)`.
pub fn rhs_nonlinear(grid: &PeriodicGrid, state: &StateField, np: &NormalizedParams) -> Result<Coeffs> {
    let co = &state.coeffs;
    let n = grid.to_physical(&co[N_IDX]);
    let phi = grid.to_physical(&co[PHI_IDX]);
    check_positivity(&n, &phi, np)?;
    let w = W_IDX.map(|i| grid.to_physical(&co[i]));
    let grad_n: [Vec<f64>; 3] = core::array::from_fn(|j| grid.derivative(&co[N_IDX], j));
    let grad_phi: [Vec<f64>; 3] = core::array::from_fn(|j| grid.derivative(&co[PHI_IDX], j));
    // dw[i][j] = ∂_j w_i
    let dw: [[Vec<f64>; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| grid.derivative(&co[W_IDX[i]], j)));
    let lap_w: [Vec<f64>; 3] = core::array::from_fn(|i| {
        let s = grid.symbol_fn(|xi| -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) * C64::new(1.0, 0.0));
        let v: Vec<C64> = co[W_IDX[i]].iter().zip(&s).map(|(a, b)| a * b).collect();
        grid.to_physical(&v)
    });
    let div_hat: Vec<C64> = (0..grid.len())
        .map(|idx| {
            let xi = grid.xi(idx);
            (0..3).map(|j| I * xi[j] * co[W_IDX[j]][idx]).sum()
        })
        .collect();
    let grad_div: [Vec<f64>; 3] = core::array::from_fn(|j| grid.derivative(&div_hat, j));
    let div_psi_hat: Vec<C64> = (0..grid.len())
        .map(|idx| {
            let xi = grid.xi(idx);
            (0..3).map(|j| I * xi[j] * co[PSI_IDX[j]][idx]).sum()
        })
        .collect();
    let div_psi = grid.to_physical(&div_psi_hat);

    let (c, sigma, nu, eta, b, gamma) = (np.c, np.sigma, np.nu, np.eta, np.b, np.gamma);
    let len = grid.len();
    let mut nw: [Vec<f64>; 3] = core::array::from_fn(|_| vec![0.0; len]);
    let mut f2: [Vec<f64>; 3] = core::array::from_fn(|_| vec![0.0; len]);
    let mut f3 = vec![0.0; len];
    for p in 0..len {
        let inv = 1.0 / (1.0 + n[p]);
        let div_w = dw[0][0][p] + dw[1][1][p] + dw[2][2][p];
        for i in 0..3 {
            nw[i][p] = n[p] * w[i][p];
            let adv: f64 = (0..3).map(|j| w[j][p] * dw[i][j][p]).sum();
            f2[i][p] = -c * adv + c * n[p] * grad_n[i][p] * inv - sigma * phi[p] * grad_n[i][p] * inv
                - nu * n[p] * lap_w[i][p] * inv
                - (nu + eta) * n[p] * grad_div[i][p] * inv;
        }
        let mut dd = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = 0.5 * (dw[i][j][p] + dw[j][i][p]);
                dd += d * d;
            }
        }
        let adv_phi: f64 = (0..3).map(|j| w[j][p] * grad_phi[j][p]).sum();
        f3[p] = -c * adv_phi - c * (gamma - 1.0) * phi[p] * div_w
            + sigma * (2.0 * nu * dd + eta * div_w * div_w) * inv / c
            + b * n[p] * div_psi[p] * inv;
    }

    let nw_hat = nw.map(|v| grid.to_spectral(&v));
    let f1: Vec<C64> = (0..len)
        .map(|idx| {
            let xi = grid.xi(idx);
            -c * (0..3).map(|j| I * xi[j] * nw_hat[j][idx]).sum::<C64>()
        })
        .collect();
    let [f2a, f2b, f2c] = f2.map(|v| grid.to_spectral(&v));
    let zero = || vec![ZERO; len];
    Ok([f1, f2a, f2b, f2c, grid.to_spectral(&f3), zero(), zero(), zero()])
}

/// `exp(−B(ξ)t)` for every retained mode, with `G(−ξ) = conj G(ξ)` imposed
/// exactly so the flow keeps the fields real.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    pub t: f64,
    active: Vec<usize>,
    mats: Vec<[[C64; FIELDS]; FIELDS]>,
}

impl LinearPropagator {
    pub fn new(grid: &PeriodicGrid, t: f64, np: &NormalizedParams) -> Self {
        let mut pos = vec![usize::MAX; grid.len()];
        let mut active = Vec::new();
        let mut mats: Vec<[[C64; FIELDS]; FIELDS]> = Vec::new();
        for idx in (0..grid.len()).filter(|&i| grid.retained(i)) {
            let p = grid.partner(idx);
            let m = if p < idx && pos[p] != usize::MAX {
                mats[pos[p]].map(|row| row.map(|z| z.conj()))
            } else {
                let g = green_expm(grid.xi(idx), t, np).entries;
                core::array::from_fn(|i| core::array::from_fn(|j| g[(i, j)]))
            };
            pos[idx] = mats.len();
            active.push(idx);
            mats.push(m);
        }
        Self { t, active, mats }
    }

    pub fn apply(&self, state: &mut StateField) {
        for (&idx, m) in self.active.iter().zip(&self.mats) {
            let v: [C64; FIELDS] = core::array::from_fn(|c| state.coeffs[c][idx]);
            for (i, row) in m.iter().enumerate() {
                state.coeffs[i][idx] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            }
        }
        state.time += self.t;
    }
}

/// Exact solution of the linearized system from `state` after time `t`.
pub fn linear_evolve(grid: &PeriodicGrid, state: &StateField, t: f64, np: &NormalizedParams) -> StateField {
    let mut s = state.clone();
    LinearPropagator::new(grid, t, np).apply(&mut s);
    s
}

/// `0.5·Δx / max|c w|`, infinite at rest.
pub fn cfl_bound(grid: &PeriodicGrid, state: &StateField, np: &NormalizedParams) -> f64 {
    let w = W_IDX.map(|i| grid.to_physical(&state.coeffs[i]));
    let vmax = (0..grid.len())
        .map(|p| (w[0][p] * w[0][p] + w[1][p] * w[1][p] + w[2][p] * w[2][p]).sqrt())
        .fold(0.0, f64::max)
        * np.c;
    if vmax > 0.0 {
        CFL_LIMIT * grid.spacing() / vmax
    } else {
        f64::INFINITY
    }
}

fn axpy(state: &StateField, h: f64, k: &Coeffs) -> StateField {
    let mut out = state.clone();
    for (f, g) in out.coeffs.iter_mut().zip(k) {
        for (a, b) in f.iter_mut().zip(g) {
            *a += b * h;
        }
    }
    out
}

/// One Strang step; `half` must propagate over `dt/2`.
pub fn step_with(
    grid: &PeriodicGrid,
    state: &StateField,
    dt: f64,
    half: &LinearPropagator,
    np: &NormalizedParams,
) -> Result<StateField> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("time step {dt} must be positive")));
    }
    if (half.t - 0.5 * dt).abs() > 1e-14 * dt {
        return Err(Error::InvalidInput("propagator does not match dt/2".into()));
    }
    let bound = cfl_bound(grid, state, np);
    if dt > bound {
        return Err(Error::CflViolation { dt, bound });
    }
    let t0 = state.time;
    let mut s = state.clone();
    half.apply(&mut s);
    let k1 = rhs_nonlinear(grid, &s, np)?;
    let mid = axpy(&s, 0.5 * dt, &k1);
    let k2 = rhs_nonlinear(grid, &mid, np)?;
    let mut s = axpy(&s, dt, &k2);
    half.apply(&mut s);
    s.time = t0 + dt;
    Ok(s)
}

pub fn step(grid: &PeriodicGrid, state: &StateField, dt: f64, np: &NormalizedParams) -> Result<StateField> {
    step_with(grid, state, dt, &LinearPropagator::new(grid, 0.5 * dt, np), np)
}

/// `(1+x) ln(1+x) − x`, accurate for small `x`.
fn rel_entropy_density(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut s = 0.0;
        let mut p = x * x;
        for k in 2..40 {
            let term = p / (k * (k - 1)) as f64;
            s += if k % 2 == 0 { term } else { -term };
            p *= x;
            if term.abs() < 1e-18 * s.abs() {
                break;
            }
        }
        s
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

/// `x − ln(1+x)`, accurate for small `x`.
fn log_gap(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut s = 0.0;
        let mut p = x * x;
        for k in 2..40 {
            let term = p / k as f64;
            s += if k % 2 == 0 { term } else { -term };
            p *= x;
            if term.abs() < 1e-18 * s.abs() {
                break;
            }
        }
        s
    } else {
        x - x.ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRow {
    pub time: f64,
    /// `∫ n dx`.
    pub mass: f64,
    /// `∫ (½ρ|u|² + R/(γ−1) ρ(θ−θ*)) dx`.
    pub energy: f64,
    /// Relative-entropy functional.
    pub entropy: f64,
    /// `‖(ρ−ρ*, u, θ−θ*, q)‖²_{L²}`.
    pub l2_primitive: f64,
    /// `H³` norms of `n`, `w`, `φ`, `ψ`.
    pub h3: [f64; 4],
    pub min_density: f64,
}

pub fn monitors(grid: &PeriodicGrid, state: &StateField, np: &NormalizedParams) -> Result<MonitorRow> {
    let p = &np.physical;
    let vol = grid.volume();
    let dv = vol / grid.len() as f64;
    let pert = state.physical(grid);
    let prim = from_perturbation(&pert, np)?;
    let cv = p.r_gas / (p.gamma - 1.0);
    let (mut energy, mut entropy, mut l2) = (0.0, 0.0, 0.0);
    for i in 0..grid.len() {
        let rho = prim.rho[i];
        let th = prim.theta[i];
        let u2: f64 = (0..3).map(|j| prim.u[j][i] * prim.u[j][i]).sum();
        let q2: f64 = (0..3).map(|j| prim.q[j][i] * prim.q[j][i]).sum();
        let dth = th - p.theta_star;
        energy += 0.5 * rho * u2 + cv * rho * dth;
        entropy += p.r_gas * p.theta_star * p.rho_star * rel_entropy_density(pert.n[i])
            + 0.5 * rho * u2
            + cv * rho * p.theta_star * log_gap(dth / p.theta_star)
            + p.tau * p.theta_star / (2.0 * p.kappa * th * th) * q2;
        let drho = rho - p.rho_star;
        l2 += drho * drho + u2 + dth * dth + q2;
    }
    let sob = |fields: &[usize]| {
        let s: f64 = fields
            .iter()
            .map(|&f| {
                state.coeffs[f]
                    .iter()
                    .enumerate()
                    .map(|(idx, z)| {
                        let xi = grid.xi(idx);
                        (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).powi(3) * z.norm_sqr()
                    })
                    .sum::<f64>()
            })
            .sum();
        (vol * s).sqrt()
    };
    Ok(MonitorRow {
        time: state.time,
        mass: vol * state.coeffs[N_IDX][0].re,
        energy: energy * dv,
        entropy: entropy * dv,
        l2_primitive: l2 * dv,
        h3: [sob(&[N_IDX]), sob(&W_IDX), sob(&[PHI_IDX]), sob(&PSI_IDX)],
        min_density: pert.n.iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Fixed step, shortened uniformly so that an integer number of steps
    /// reaches `t_max`.
    Fixed(f64),
    /// `dt = min(dt_max, cfl · Δx / max|c w|)`, last step clipped to `t_max`.
    Cfl { cfl: f64, dt_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub t_max: f64,
    pub policy: StepPolicy,
    /// Steps between monitor rows; the final state is always recorded.
    pub monitor_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub dt_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonitorReport {
    pub rows: Vec<MonitorRow>,
    /// Step size taken just before each row (0 for the initial row).
    pub dt: Vec<f64>,
}

impl MonitorReport {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.time).collect()
    }

    pub fn column(&self, f: impl Fn(&MonitorRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: MonitorReport,
    pub stats: StepStats,
    pub state: StateField,
    /// Set when the run stopped early; the report covers the completed steps.
    pub error: Option<Error>,
}

/// Time loop. `observer` sees every monitored state.
pub fn run_with(
    grid: &PeriodicGrid,
    initial: StateField,
    cfg: &RunConfig,
    np: &NormalizedParams,
    mut observer: impl FnMut(&StateField, &MonitorRow),
) -> RunOutcome {
    let mut report = MonitorReport::default();
    let mut stats = StepStats { steps: 0, dt_min: f64::INFINITY, dt_max: 0.0, dt_mean: 0.0 };
    let mut state = initial;
    let finish = |report, mut stats: StepStats, state, error| {
        if stats.steps == 0 {
            stats.dt_min = 0.0;
        }
        RunOutcome { report, stats, state, error }
    };
    if !(cfg.t_max >= 0.0) || cfg.monitor_every == 0 {
        return finish(report, stats, state, Some(Error::InvalidInput("t_max must be >= 0 and monitor_every >= 1".into())));
    }
    let mut record = |s: &StateField, dt: f64, report: &mut MonitorReport| -> Result<()> {
        let row = monitors(grid, s, np)?;
        observer(s, &row);
        report.rows.push(row);
        report.dt.push(dt);
        Ok(())
    };
    if let Err(e) = record(&state, 0.0, &mut report) {
        return finish(report, stats, state, Some(e));
    }
    let t0 = state.time;
    let t_end = t0 + cfg.t_max;
    let fixed = match cfg.policy {
        StepPolicy::Fixed(dt) => {
            if !(dt > 0.0) {
                return finish(report, stats, state, Some(Error::InvalidInput("dt must be positive".into())));
            }
            let steps = ((cfg.t_max / dt) - 1e-9).ceil().max(0.0) as usize;
            Some((steps, if steps > 0 { cfg.t_max / steps as f64 } else { dt }))
        }
        StepPolicy::Cfl { cfl, dt_max } => {
            if !(cfl > 0.0 && cfl <= CFL_LIMIT && dt_max > 0.0) {
                return finish(report, stats, state, Some(Error::InvalidInput("cfl must lie in (0, 0.5] and dt_max > 0".into())));
            }
            None
        }
    };
    let mut cache: Option<LinearPropagator> = None;
    let mut k = 0usize;
    let mut total_dt = 0.0;
    loop {
        let dt = match (fixed, cfg.policy) {
            (Some((steps, dt)), _) => {
                if k == steps {
                    break;
                }
                dt
            }
            (None, StepPolicy::Cfl { cfl, dt_max }) => {
                let remaining = t_end - state.time;
                if remaining <= 1e-12 * cfg.t_max.max(1.0) {
                    break;
                }
                let adv = cfl_bound(grid, &state, np) * cfl / CFL_LIMIT;
                dt_max.min(adv).min(remaining)
            }
            _ => unreachable!(),
        };
        if cache.as_ref().is_none_or(|p| p.t != 0.5 * dt) {
            cache = Some(LinearPropagator::new(grid, 0.5 * dt, np));
        }
        let next = match step_with(grid, &state, dt, cache.as_ref().unwrap(), np) {
            Ok(s) => s,
            Err(e) => return finish(report, stats, state, Some(e)),
        };
        state = next;
        if fixed.is_some() && k + 1 == fixed.unwrap().0 {
            state.time = t_end;
        }
        k += 1;
        stats.steps = k;
        stats.dt_min = stats.dt_min.min(dt);
        stats.dt_max = stats.dt_max.max(dt);
        total_dt += dt;
        stats.dt_mean = total_dt / k as f64;
        let last = match fixed {
            Some((steps, _)) => k == steps,
            None => t_end - state.time <= 1e-12 * cfg.t_max.max(1.0),
        };
        if k.is_multiple_of(cfg.monitor_every) || last {
            if let Err(e) = record(&state, dt, &mut report) {
                return finish(report, stats, state, Some(e));
            }
        }
    }
    finish(report, stats, state, None)
}

pub fn run(grid: &PeriodicGrid, initial: StateField, cfg: &RunConfig, np: &NormalizedParams) -> RunOutcome {
    run_with(grid, initial, cfg, np, |_, _| {})
}

/// Little-endian snapshot: `N` (u64), `L` (f64), time (f64), then the eight
/// coefficient blocks of `N³` complex values, Re/Im interleaved.
pub fn snapshot_bytes(grid: &PeriodicGrid, state: &StateField) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + FIELDS * grid.len() * 16);
    out.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    out.extend_from_slice(&grid.l().to_le_bytes());
    out.extend_from_slice(&state.time.to_le_bytes());
    for f in &state.coeffs {
        for z in f {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn parse_snapshot(bytes: &[u8]) -> Result<(PeriodicGrid, StateField)> {
    let bad = || Error::InvalidInput("truncated or malformed snapshot".into());
    let word = |i: usize| -> Result<[u8; 8]> { bytes.get(8 * i..8 * i + 8).and_then(|s| s.try_into().ok()).ok_or_else(bad) };
    let n = u64::from_le_bytes(word(0)?) as usize;
    let l = f64::from_le_bytes(word(1)?);
    let time = f64::from_le_bytes(word(2)?);
    let grid = PeriodicGrid::new(n, l)?;
    if bytes.len() != 24 + FIELDS * grid.len() * 16 {
        return Err(bad());
    }
    let mut state = StateField::zeros(&grid);
    state.time = time;
    let mut w = 3;
    for f in state.coeffs.iter_mut() {
        for z in f.iter_mut() {
            *z = C64::new(f64::from_le_bytes(word(w)?), f64::from_le_bytes(word(w + 1)?));
            w += 2;
        }
    }
    Ok((grid, state))
}
