//! Fourier symbol of the linearized operator and its eigenvalue branches.
//!
//! Variables are ordered `(n, w₁, w₂, w₃, φ, ψ₁, ψ₂, ψ₃)`. Along a direction
//! `e = ξ/|ξ|` the vector fields split into a longitudinal part (coupled
//! 4×4 block in `(n, w·e, φ, ψ·e)`) and transverse parts that decay with
//! `λ₁ = −ν r²` and `λ₂ = −1/τ`.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{horner, poly_roots, CMatrix};
use crate::params::NormalizedParams;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn norm3(xi: &[f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub entries: CMatrix,
    pub xi: [f64; 3],
}

pub fn build_symbol(xi: [f64; 3], np: &NormalizedParams) -> SymbolMatrix {
    let mut b = CMatrix::zeros(8);
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    for j in 0..3 {
        b[(0, 1 + j)] = I * (np.c * xi[j]);
        b[(1 + j, 0)] = I * (np.c * xi[j]);
        for k in 0..3 {
            let mut v = (np.nu + np.eta) * xi[j] * xi[k];
            if j == k {
                v += np.nu * r2;
            }
            b[(1 + j, 1 + k)] = re(v);
        }
        b[(1 + j, 4)] = I * (np.sigma * xi[j]);
        b[(4, 1 + j)] = I * (np.sigma * xi[j]);
        b[(4, 5 + j)] = I * (np.b * xi[j]);
        b[(5 + j, 4)] = I * (np.b * xi[j]);
        b[(5 + j, 5 + j)] = re(1.0 / np.tau);
    }
    SymbolMatrix { entries: b, xi }
}

/// The 4×4 longitudinal block in the basis `(n, w·e, φ, ψ·e)` at `|ξ| = r`.
pub fn longitudinal_block(r: f64, np: &NormalizedParams) -> CMatrix {
    let mut b = CMatrix::zeros(4);
    b[(0, 1)] = I * (np.c * r);
    b[(1, 0)] = I * (np.c * r);
    b[(1, 1)] = re(np.two_nu_eta * r * r);
    b[(1, 2)] = I * (np.sigma * r);
    b[(2, 1)] = I * (np.sigma * r);
    b[(2, 3)] = I * (np.b * r);
    b[(3, 2)] = I * (np.b * r);
    b[(3, 3)] = re(1.0 / np.tau);
    b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoeffs {
    pub a4: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl QuarticCoeffs {
    pub fn descending(&self) -> [f64; 5] {
        [self.a4, self.a3, self.a2, self.a1, self.a0]
    }

    pub fn eval(&self, z: C64) -> C64 {
        horner(&self.descending(), z).0
    }

    pub fn max_abs(&self) -> f64 {
        self.descending().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn longitudinal_quartic(r: f64, np: &NormalizedParams) -> QuarticCoeffs {
    let (c2, s2, b2, d, tau) = (np.c * np.c, np.sigma * np.sigma, np.b * np.b, np.two_nu_eta, np.tau);
    let r2 = r * r;
    QuarticCoeffs {
        a4: tau,
        a3: 1.0 + tau * d * r2,
        a2: (tau * (c2 + b2 + s2) + d) * r2,
        a1: (c2 + s2 + tau * b2 * d * r2) * r2,
        a0: tau * c2 * b2 * r2 * r2,
    }
}

pub fn solve_quartic(qc: &QuarticCoeffs) -> Result<[C64; 4]> {
    let roots = poly_roots(&qc.descending())?;
    Ok([roots[0], roots[1], roots[2], roots[3]])
}

/// Eigenvalues of `−B` at one radius. `quartic[k]` holds `λ_{k+3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSet {
    pub r: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub quartic: [C64; 4],
}

impl EigenSet {
    /// `λ_k` for `k ∈ 1..=6`.
    pub fn lambda(&self, k: usize) -> C64 {
        match k {
            1 => re(self.lambda1),
            2 => re(self.lambda2),
            3..=6 => self.quartic[k - 3],
            _ => panic!("branch index {k} out of range"),
        }
    }

    /// All eight eigenvalues with multiplicity.
    pub fn all(&self) -> [C64; 8] {
        let (l1, l2) = (re(self.lambda1), re(self.lambda2));
        let q = self.quartic;
        [l1, l1, l2, l2, q[0], q[1], q[2], q[3]]
    }

    pub fn min_separation(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                m = m.min((self.quartic[i] - self.quartic[j]).norm());
            }
        }
        m
    }
}

/// Which asymptotic regime supplies the initial labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub values: [C64; 4],
    /// Remainder order of each branch: `O(r^p)` in the low band, `O(r^{−p})`
    /// in the high band.
    pub orders: [f64; 4],
}

pub fn low_freq_expansion(r: f64, np: &NormalizedParams) -> Expansion {
    let r2 = r * r;
    let l3 = -1.0 / np.tau + np.tau * np.b * np.b * r2;
    let re45 = -np.nu1() * r2;
    let im45 = np.c_hat * r;
    let l6 = -np.nu2() * r2;
    Expansion {
        values: [re(l3), C64::new(re45, im45), C64::new(re45, -im45), re(l6)],
        orders: [4.0, 3.0, 3.0, 4.0],
    }
}

pub fn high_freq_expansion(r: f64, np: &NormalizedParams) -> Expansion {
    let (c2, s2, d) = (np.c * np.c, np.sigma * np.sigma, np.two_nu_eta);
    let l3 = -c2 / d;
    let re45 = -s2 / (2.0 * d) - 1.0 / (2.0 * np.tau);
    let im45 = np.b * r;
    let l6 = -d * r * r + (c2 + s2) / d;
    Expansion {
        values: [re(l3), C64::new(re45, im45), C64::new(re45, -im45), re(l6)],
        orders: [2.0, 1.0, 1.0, 1.0],
    }
}

pub fn expansion(band: Band, r: f64, np: &NormalizedParams) -> Expansion {
    match band {
        Band::Low => low_freq_expansion(r, np),
        Band::High => high_freq_expansion(r, np),
    }
}

const PERMS: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

/// Reorders `roots` so that `out[k]` is the root assigned to `targets[k]`,
/// minimizing total displacement over all 24 assignments.
pub fn match_roots(targets: &[C64; 4], roots: &[C64; 4]) -> [C64; 4] {
    let mut best = PERMS[0];
    let mut best_cost = f64::INFINITY;
    for p in PERMS.iter() {
        let cost: f64 = (0..4).map(|k| (targets[k] - roots[p[k]]).norm()).sum();
        if cost < best_cost {
            best_cost = cost;
            best = *p;
        }
    }
    [roots[best[0]], roots[best[1]], roots[best[2]], roots[best[3]]]
}

fn lex(a: &C64, b: &C64) -> core::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(core::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
}

/// Assigns roots to the labels held by `prev` in lexicographic order.
fn lex_assign(prev: &[C64; 4], roots: &[C64; 4]) -> [C64; 4] {
    let mut label_order = [0usize, 1, 2, 3];
    label_order.sort_by(|&i, &j| lex(&prev[i], &prev[j]));
    let mut sorted = *roots;
    sorted.sort_by(lex);
    let mut out = [C64::new(0.0, 0.0); 4];
    for (slot, &label) in label_order.iter().enumerate() {
        out[label] = sorted[slot];
    }
    out
}

/// Keeps the pair carried by labels 4 and 5 as `(upper, lower)` half-plane.
fn orient_pair(q: &mut [C64; 4]) {
    let (a, b) = (q[1], q[2]);
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    let conjugate = (a - b.conj()).norm() <= 1e-8 * scale;
    if conjugate && a.im < b.im {
        q.swap(1, 2);
    }
}

pub const AMBIGUITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Ambiguity {
    pub r: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackedBranches {
    pub sets: Vec<EigenSet>,
    pub ambiguities: Vec<Ambiguity>,
}

impl TrackedBranches {
    pub fn first_ambiguity(&self) -> Option<Error> {
        self.ambiguities
            .first()
            .map(|a| Error::TrackingAmbiguity { r: a.r, separation: a.separation })
    }
}

/// Roots in solver order, without branch labels.
pub fn unlabeled_set(r: f64, np: &NormalizedParams) -> Result<EigenSet> {
    let roots = solve_quartic(&longitudinal_quartic(r, np))?;
    Ok(EigenSet { r, lambda1: -np.nu * r * r, lambda2: -1.0 / np.tau, quartic: roots })
}

/// Branch tracking with labels seeded from the low-frequency expansion at
/// the smallest radius.
pub fn eigen_branches(r_grid: &[f64], np: &NormalizedParams) -> Result<TrackedBranches> {
    eigen_branches_seeded(r_grid, np, Band::Low)
}

/// Branch tracking seeded from the given band: `Low` seeds at the smallest
/// radius and walks outward, `High` seeds at the largest radius and walks
/// inward. Labels are therefore local to the seeding band.
pub fn eigen_branches_seeded(r_grid: &[f64], np: &NormalizedParams, seed: Band) -> Result<TrackedBranches> {
    if r_grid.is_empty() {
        return Err(Error::InvalidInput("empty radial grid".into()));
    }
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid[0] < 0.0 {
        return Err(Error::InvalidInput("radial grid must be nonnegative and increasing".into()));
    }
    let order: Vec<usize> = match seed {
        Band::Low => (0..r_grid.len()).collect(),
        Band::High => (0..r_grid.len()).rev().collect(),
    };
    let mut sets = Vec::with_capacity(r_grid.len());
    let mut ambiguities = Vec::new();
    let mut prev: Option<[C64; 4]> = None;
    for &idx in &order {
        let r = r_grid[idx];
        let mut set = unlabeled_set(r, np)?;
        let sep = set.min_separation();
        let target = match prev {
            Some(p) => p,
            None => expansion(seed, r, np).values,
        };
        let mut q = if sep < AMBIGUITY_THRESHOLD {
            ambiguities.push(Ambiguity { r, separation: sep });
            lex_assign(&target, &set.quartic)
        } else {
            match_roots(&target, &set.quartic)
        };
        orient_pair(&mut q);
        set.quartic = q;
        prev = Some(q);
        sets.push(set);
    }
    if seed == Band::High {
        sets.reverse();
    }
    Ok(TrackedBranches { sets, ambiguities })
}

/// Labels a single radius by matching to the expansion of the given band.
pub fn eigen_set(r: f64, np: &NormalizedParams, band: Band) -> Result<EigenSet> {
    let mut set = unlabeled_set(r, np)?;
    let mut q = match_roots(&expansion(band, r, np).values, &set.quartic);
    orient_pair(&mut q);
    set.quartic = q;
    Ok(set)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchOrder {
    /// Branch index 3..=6.
    pub branch: usize,
    pub claimed: f64,
    pub errors: Vec<f64>,
    /// Empirical order between consecutive radii.
    pub orders: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub band: Band,
    pub radii: Vec<f64>,
    pub branches: Vec<BranchOrder>,
}

impl ExpansionReport {
    pub fn pass(&self) -> bool {
        self.branches.iter().all(|b| b.pass)
    }

    pub fn min_margin(&self) -> f64 {
        self.branches
            .iter()
            .flat_map(|b| b.orders.iter().map(move |p| p - (b.claimed - 0.3)))
            .fold(f64::INFINITY, f64::min)
    }
}

pub const ORDER_SLACK: f64 = 0.3;

/// Empirical convergence orders of (tracked root − truncated expansion).
/// The radii may be given in any order; consecutive pairs are compared in
/// the direction in which the remainder shrinks.
pub fn verify_expansions(np: &NormalizedParams, band: Band, radii: &[f64]) -> Result<ExpansionReport> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii".into()));
    }
    let mut grid: Vec<f64> = radii.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let tracked = eigen_branches_seeded(&grid, np, band)?;
    if let Some(e) = tracked.first_ambiguity() {
        return Err(e);
    }
    // walk from the radius farthest from the band's limit
    if band == Band::Low {
        grid.reverse();
    }
    let sets: Vec<EigenSet> = match band {
        Band::Low => tracked.sets.iter().rev().copied().collect(),
        Band::High => tracked.sets.clone(),
    };
    let mut branches = Vec::with_capacity(4);
    for k in 0..4 {
        let mut errors = Vec::with_capacity(grid.len());
        let mut claimed = 0.0;
        for (set, &r) in sets.iter().zip(&grid) {
            let ex = expansion(band, r, np);
            claimed = ex.orders[k];
            errors.push((set.quartic[k] - ex.values[k]).norm());
        }
        let orders: Vec<f64> = (0..grid.len() - 1)
            .map(|i| (errors[i] / errors[i + 1]).ln() / (grid[i] / grid[i + 1]).ln().abs())
            .collect();
        let pass = orders.iter().all(|p| *p >= claimed - ORDER_SLACK);
        branches.push(BranchOrder { branch: k + 3, claimed, errors, orders, pass });
    }
    Ok(ExpansionReport { band, radii: grid, branches })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub beta: f64,
    pub r1: f64,
    pub r2: f64,
    pub r0: f64,
    pub big_r0: f64,
}

/// Gap constants from branch samples: `beta` over `r ≤ r0` (scaled by `r²`),
/// `R1` over `r ≥ R0`, `R2` over the band between. All six branches enter.
pub fn spectral_bounds(sets: &[EigenSet], r0: f64, big_r0: f64) -> Result<SpectralBounds> {
    if !(r0 > 0.0 && r0 < big_r0) {
        return Err(Error::InvalidInput("cutoffs must satisfy 0 < r0 < R0".into()));
    }
    let mut beta = f64::INFINITY;
    let mut r1 = f64::INFINITY;
    let mut r2 = f64::INFINITY;
    for s in sets.iter().filter(|s| s.r > 0.0) {
        let worst = (1..=6).map(|k| -s.lambda(k).re).fold(f64::INFINITY, f64::min);
        if s.r <= r0 {
            beta = beta.min(worst / (s.r * s.r));
        }
        if s.r >= big_r0 {
            r1 = r1.min(worst);
        }
        if s.r >= r0 && s.r <= big_r0 {
            r2 = r2.min(worst);
        }
    }
    for (which, v) in [("beta", beta), ("R1", r1), ("R2", r2)] {
        if !v.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("no samples for {which}")));
        }
        if v <= 0.0 {
            return Err(Error::BoundViolation { which, value: v });
        }
    }
    Ok(SpectralBounds { beta, r1, r2, r0, big_r0 })
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}
