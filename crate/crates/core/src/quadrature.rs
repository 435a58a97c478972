//! Gauss–Legendre panel quadrature with bisection error control, and a
//! vector-valued radial marcher for integrals over `[0, ∞)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn gl16() -> Self {
        Self::new(16)
    }

    /// Single-panel rule for a scalar integrand.
    pub fn panel(&self, f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
    }

    /// Single-panel rule for a vector integrand; `f(x, out)` overwrites `out`.
    pub fn panel_vec(&self, f: &mut impl FnMut(f64, &mut [f64]) -> Result<()>, a: f64, b: f64, acc: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        acc.iter_mut().for_each(|v| *v = 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            f(m + h * x, scratch)?;
            for (a, s) in acc.iter_mut().zip(scratch.iter()) {
                *a += w * h * s;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

pub const MAX_DEPTH: u32 = 40;

/// Adaptive bisection on `[a, b]` until the two-half estimate agrees with
/// the whole-panel estimate to `max(abs_tol, rel_tol·|I|)`. Wide intervals
/// are first cut into panels no wider than `max_width`.
pub fn integrate(
    gl: &GaussLegendre,
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_width: f64,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let n = (((b - a) / max_width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for i in 0..n {
        let (lo, hi) = (a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 });
        let whole = gl.panel(f, lo, hi);
        let e = bisect(gl, f, lo, hi, whole, rel_tol, abs_tol / n as f64, 0)?;
        total.value += e.value;
        total.error += e.error;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    gl: &GaussLegendre,
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<Estimate> {
    let m = 0.5 * (a + b);
    let left = gl.panel(f, a, m);
    let right = gl.panel(f, m, b);
    let halves = left + right;
    let diff = (halves - whole).abs();
    if diff <= abs_tol.max(rel_tol * halves.abs()) {
        return Ok(Estimate { value: halves, error: diff });
    }
    if depth >= MAX_DEPTH || !(diff.is_finite()) {
        return Err(Error::QuadratureFailure { a, b });
    }
    let l = bisect(gl, f, a, m, left, rel_tol, 0.5 * abs_tol, depth + 1)?;
    let r = bisect(gl, f, m, b, right, rel_tol, 0.5 * abs_tol, depth + 1)?;
    Ok(Estimate { value: l.value + r.value, error: l.error + r.error })
}

/// Controls for [`radial_integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPlan {
    /// Points where the integrand may lose smoothness; panels never cross them.
    pub breakpoints: Vec<f64>,
    /// Upper end of the support, if known.
    pub support: Option<f64>,
    /// Maximum panel width (oscillation cap).
    pub cap: f64,
    pub rel_tol: f64,
    /// Marching stops once this many consecutive panels each add less than
    /// `tail_tol` of the running total in every component.
    pub tail_panels: usize,
    pub tail_tol: f64,
    pub max_panels: usize,
    /// `(i, j, f)`: component `i` is also accepted at absolute accuracy
    /// `f·total_j`. Used for components that are pure round-off by design.
    pub floors: Vec<(usize, usize, f64)>,
}

impl Default for RadialPlan {
    fn default() -> Self {
        Self {
            breakpoints: Vec::new(),
            support: None,
            cap: f64::INFINITY,
            rel_tol: 1e-10,
            tail_panels: 4,
            tail_tol: 1e-14,
            max_panels: 2_000_000,
            floors: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub extent: f64,
    pub panels: usize,
}

/// Integrates a nonnegative vector integrand `f(r, out)` over `[0, ∞)` by
/// marching outward in Gauss–Legendre panels.
pub fn radial_integrate(
    gl: &GaussLegendre,
    dim: usize,
    plan: &RadialPlan,
    mut f: impl FnMut(f64, &mut [f64]) -> Result<()>,
) -> Result<RadialResult> {
    let mut bps: Vec<f64> = plan.breakpoints.iter().copied().filter(|b| *b > 0.0 && b.is_finite()).collect();
    if let Some(s) = plan.support {
        bps.retain(|b| *b < s);
        bps.push(s);
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    bps.dedup();
    let h0 = bps.first().copied().unwrap_or(1.0) * 0.25;
    let end = plan.support.unwrap_or(f64::INFINITY);

    let mut total = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut whole = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let mut quiet = 0usize;
    let mut a = 0.0;
    let mut panels = 0usize;
    let mut next_bp = 0usize;
    while a < end {
        while next_bp < bps.len() && bps[next_bp] <= a {
            next_bp += 1;
        }
        let stop = if next_bp < bps.len() { bps[next_bp] } else { end };
        let grow = if a > 0.0 { a.max(h0) } else { h0 };
        let mut b = a + plan.cap.min(grow);
        if b > stop || (stop - b) < 1e-12 * stop {
            b = stop;
        }
        if !(b > a) || !b.is_finite() {
            return Err(Error::QuadratureFailure { a, b });
        }
        gl.panel_vec(&mut f, a, b, &mut whole, &mut scratch)?;
        let mut contrib = vec![0.0; dim];
        let mut floor: Vec<f64> = total.iter().map(|t| 1e-3 * plan.rel_tol * t).collect();
        for &(i, j, f) in &plan.floors {
            floor[i] = floor[i].max(f * (total[j] + whole[j].abs()));
        }
        bisect_vec(gl, &mut f, a, b, &whole, plan.rel_tol, &floor, 0, &mut contrib, &mut err)?;
        let negligible = total.iter().any(|t| *t > 0.0)
            && total.iter().zip(&contrib).enumerate().all(|(i, (t, c))| {
                c.abs() <= plan.tail_tol * t || plan.floors.iter().any(|&(a, b, _)| a == i && contrib[b].abs() <= plan.tail_tol * total[b])
            });
        for (t, c) in total.iter_mut().zip(&contrib) {
            *t += c;
        }
        panels += 1;
        if panels > plan.max_panels {
            return Err(Error::QuadratureFailure { a, b });
        }
        quiet = if negligible { quiet + 1 } else { 0 };
        a = b;
        if quiet >= plan.tail_panels {
            break;
        }
    }
    Ok(RadialResult { values: total, errors: err, extent: a, panels })
}

#[allow(clippy::too_many_arguments)]
fn bisect_vec(
    gl: &GaussLegendre,
    f: &mut impl FnMut(f64, &mut [f64]) -> Result<()>,
    a: f64,
    b: f64,
    whole: &[f64],
    rel_tol: f64,
    floor: &[f64],
    depth: u32,
    out: &mut [f64],
    err: &mut [f64],
) -> Result<()> {
    let dim = whole.len();
    let m = 0.5 * (a + b);
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    gl.panel_vec(f, a, m, &mut left, &mut scratch)?;
    gl.panel_vec(f, m, b, &mut right, &mut scratch)?;
    let ok = (0..dim).all(|i| {
        let h = left[i] + right[i];
        let d = (h - whole[i]).abs();
        d.is_finite() && d <= (rel_tol * h.abs()).max(floor[i])
    });
    if ok {
        for i in 0..dim {
            let h = left[i] + right[i];
            out[i] += h;
            err[i] += (h - whole[i]).abs();
        }
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure { a, b });
    }
    let half: Vec<f64> = floor.iter().map(|x| 0.5 * x).collect();
    bisect_vec(gl, f, a, m, &left, rel_tol, &half, depth + 1, out, err)?;
    bisect_vec(gl, f, m, b, &right, rel_tol, &half, depth + 1, out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl16_integrates_polynomials_exactly() {
        let gl = GaussLegendre::gl16();
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 31 is the highest exact degree
        let v = gl.panel(&mut |x| x.powi(30), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_oscillatory() {
        let gl = GaussLegendre::gl16();
        let w = 200.0;
        let e = integrate(&gl, &mut |x| (w * x).cos(), 0.0, 1.0, 1e-12, 1e-15, PI / w).unwrap();
        assert!((e.value - w.sin() / w).abs() < 1e-13);
    }

    #[test]
    fn adaptive_kink() {
        let gl = GaussLegendre::gl16();
        let e = integrate(&gl, &mut |x| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 1e-14, 1.0).unwrap();
        assert!((e.value - (0.045 + 0.245)).abs() < 1e-11);
    }

    #[test]
    fn radial_gaussian_moment() {
        // ∫ 4π r² e^{−r²} dr = π^{3/2}
        let gl = GaussLegendre::gl16();
        let plan = RadialPlan { breakpoints: vec![1.0], ..Default::default() };
        let res = radial_integrate(&gl, 1, &plan, |r, out| {
            out[0] = 4.0 * PI * r * r * (-r * r).exp();
            Ok(())
        })
        .unwrap();
        assert!((res.values[0] - PI.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn radial_support() {
        let gl = GaussLegendre::gl16();
        let plan = RadialPlan { support: Some(1.0), ..Default::default() };
        let res = radial_integrate(&gl, 2, &plan, |r, out| {
            out[0] = r * r;
            out[1] = r.powi(4);
            Ok(())
        })
        .unwrap();
        assert!((res.values[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((res.values[1] - 0.2).abs() < 1e-15);
    }
}
