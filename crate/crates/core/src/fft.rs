//! Iterative radix-2 FFT and its 3D tensor-product version.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<C64>,
    rev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(alloc::format!("FFT length {n} is not a power of two")));
        }
        let bits = n.trailing_zeros();
        let rev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..n / 2).map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)).collect();
        Ok(Self { n, twiddles, rev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn run(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.rev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + len / 2] * w;
                    data[start + k] = a + b;
                    data[start + k + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
    }

    /// `X_k = Σ_j x_j e^{−2πijk/n}` (unnormalized).
    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, false);
    }

    /// `x_j = Σ_k X_k e^{+2πijk/n}` (unnormalized).
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, true);
    }
}

/// 3D transform on an `n³` array stored with index `(i·n + j)·n + k`.
/// `forward` divides by `n³`, so coefficients satisfy
/// `f(x) = Σ f̂_k e^{ik·x}` and `inverse` is the plain synthesis.
#[derive(Debug, Clone)]
pub struct Fft3 {
    n: usize,
    fft: Fft,
}

impl Fft3 {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { n, fft: Fft::new(n)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn lines(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for (stride, outer) in [(n * n, 0usize), (n, 1), (1, 2)] {
            for a in 0..n {
                for b in 0..n {
                    let base = match outer {
                        0 => a * n + b,
                        1 => a * n * n + b,
                        _ => (a * n + b) * n,
                    };
                    for m in 0..n {
                        buf[m] = data[base + m * stride];
                    }
                    if inverse {
                        self.fft.inverse(&mut buf);
                    } else {
                        self.fft.forward(&mut buf);
                    }
                    for m in 0..n {
                        data[base + m * stride] = buf[m];
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.lines(data, false);
        let s = 1.0 / (self.n * self.n * self.n) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.lines(data, true);
    }
}

/// Signed integer wavenumber of index `i` on an `n`-point axis.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
