//! Small dense complex matrices: products, LU solves, the matrix exponential
//! and eigenvalues by shifted Hessenberg QR. Sizes here never exceed 8, so
//! everything is a plain row-major `Vec`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64 as C64;
use num_traits::Zero;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `Σ cᵢ Mᵢ` over matrices of equal size.
    pub fn lincomb(terms: &[(f64, &CMatrix)]) -> Self {
        let n = terms[0].1.n;
        let mut out = Self::zeros(n);
        for (c, m) in terms {
            for (o, v) in out.data.iter_mut().zip(&m.data) {
                *o += v * *c;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v.conj()).collect() }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut x = rhs.clone();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if pmax == 0.0 {
                return Err(Error::InvalidInput("singular matrix in solve".into()));
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                    x.data.swap(k * n + j, p * n + j);
                }
            }
            let inv = a[(k, k)].inv();
            for i in k + 1..n {
                let f = a[(i, k)] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
                for j in 0..n {
                    let v = x[(k, j)];
                    x[(i, j)] -= f * v;
                }
            }
        }
        for k in (0..n).rev() {
            let inv = a[(k, k)].inv();
            for j in 0..n {
                let mut s = x[(k, j)];
                for m in k + 1..n {
                    s -= a[(k, m)] * x[(m, j)];
                }
                x[(k, j)] = s * inv;
            }
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(A)` by scaling and squaring with the diagonal [13/13] Padé
/// approximant; the number of squarings comes from the 1-norm.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let norm = a.norm1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(C64::new(2f64.powi(-s), 0.0));
    let id = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = CMatrix::lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_tail = CMatrix::lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)]);
    let u = &a * &(&a6 * &u_inner).add(&u_tail);
    let v_inner = CMatrix::lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_tail = CMatrix::lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)]);
    let v = (&a6 * &v_inner).add(&v_tail);
    let mut r = v.sub(&u).solve(&v.add(&u)).expect("Pade denominator is nonsingular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Diagonal similarity with powers of two that equalizes row and column
/// norms (Parlett–Reinsch). Eigenvalues are unchanged.
pub fn balance(a: &mut CMatrix) {
    let n = a.dim();
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (in place).
pub fn hessenberg(a: &mut CMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A ← (I − 2vvᴴ) A
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(p, vp)| vp.conj() * a[(k + 1 + p, j)]).sum();
            for (p, vp) in v.iter().enumerate() {
                a[(k + 1 + p, j)] -= vp * dot * 2.0;
            }
        }
        // A ← A (I − 2vvᴴ)
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(p, vp)| a[(i, k + 1 + p)] * vp).sum();
            for (p, vp) in v.iter().enumerate() {
                a[(i, k + 1 + p)] -= dot * vp.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::zero();
        }
    }
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    // returns (c, s) with [c s; -s̄ c]·[a; b] = [r; 0]
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::zero());
    }
    if an == 0.0 {
        return (0.0, (b / bn).conj());
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// All eigenvalues of a general complex matrix (balanced, reduced to
/// Hessenberg form, then single-shift QR with Wilkinson shifts).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.dim();
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut eig = vec![C64::zero(); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { h.max_abs() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = C64::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::NoConvergence);
        }
        let shift = if iter % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let m1 = tr + disc;
            let m2 = tr - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for i in l..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] += shift;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

/// Evaluates `Σ coeffs[i] z^(deg−i)` (coefficients in descending order) and
/// its derivative by Horner's rule.
pub fn horner(coeffs: &[f64], z: C64) -> (C64, C64) {
    let mut p = C64::zero();
    let mut dp = C64::zero();
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a real polynomial (descending coefficients) as eigenvalues of its
/// balanced companion matrix, each followed by one Newton step that is kept
/// only when it lowers the residual.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<C64>> {
    let lead = coeffs[0];
    if lead == 0.0 {
        return Err(Error::Degenerate);
    }
    let deg = coeffs.len() - 1;
    let mut comp = CMatrix::zeros(deg);
    for j in 0..deg {
        comp[(0, j)] = C64::new(-coeffs[j + 1] / lead, 0.0);
    }
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    let mut roots = eigenvalues(&comp)?;
    for z in roots.iter_mut() {
        let (p, dp) = horner(coeffs, *z);
        if dp.norm() > 0.0 {
            let cand = *z - p / dp;
            let (pc, _) = horner(coeffs, cand);
            if cand.re.is_finite() && cand.im.is_finite() && pc.norm() < p.norm() {
                *z = cand;
            }
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_of_diagonal() {
        let mut a = CMatrix::zeros(3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(-20.0, 0.0);
        a[(2, 2)] = c(0.0, 3.0);
        let e = expm(&a);
        assert!((e[(0, 0)] - c(1f64.exp(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - c((-20f64).exp(), 0.0)).norm() < 1e-18);
        assert!((e[(2, 2)] - c(3f64.cos(), 3f64.sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_rotation_generator() {
        // exp([[0, θ], [−θ, 0]]) is a rotation by θ
        let th = 7.3;
        let a = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(th, 0.0),
            (1, 0) => c(-th, 0.0),
            _ => C64::zero(),
        });
        let e = expm(&a);
        assert!((e[(0, 0)].re - th.cos()).abs() < 1e-13);
        assert!((e[(0, 1)].re - th.sin()).abs() < 1e-13);
    }

    #[test]
    fn solve_recovers_identity() {
        let a = CMatrix::from_fn(4, |i, j| c((i * 3 + j) as f64 % 5.0 + 0.5, (i as f64) - (j as f64)));
        let x = a.solve(&a).unwrap();
        assert!(x.max_abs_diff(&CMatrix::identity(4)) < 1e-13);
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let a = CMatrix::from_fn(4, |i, j| if j >= i { c((i + 1) as f64, j as f64) } else { C64::zero() });
        let mut e = eigenvalues(&a).unwrap();
        e.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (k, z) in e.iter().enumerate() {
            assert!((z - c((k + 1) as f64, k as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn roots_of_factored_quartic() {
        // λ³(λ+1)
        let r = poly_roots(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-14);
        assert!(r.iter().all(|z| z.im.abs() < 1e-12));
        assert!(re[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn roots_wide_dynamic_range() {
        // (λ+1e-6)(λ+1)(λ+1e3)(λ+1e6)
        let roots = [1e-6, 1.0, 1e3, 1e6];
        let mut coeffs = [1.0, 0.0, 0.0, 0.0, 0.0];
        for (k, r) in roots.iter().enumerate() {
            for i in (1..=k + 1).rev() {
                coeffs[i] += r * coeffs[i - 1];
            }
        }
        let mut got = poly_roots(&coeffs).unwrap();
        got.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
        for (z, r) in got.iter().zip(roots) {
            assert!((z.re + r).abs() < 1e-10 * r, "{z} vs {r}");
        }
    }

    #[test]
    fn degenerate_polynomial() {
        assert_eq!(poly_roots(&[0.0, 1.0, 2.0]), Err(Error::Degenerate));
    }
}
