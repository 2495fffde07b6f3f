//! Finite trigonometric polynomials on the circle R/Z and their exact
//! L^2 arithmetic.
//!
//! A `TrigPoly` stores the expansion
//!
//! ```text
//! f(tau) = constant + sum_{n=1}^{N} ( cos[n-1] * cos(2 pi n tau)
//!                                   + sin[n-1] * sin(2 pi n tau) )
//! ```
//!
//! Every integral of a trig-polynomial integrand is computed from the
//! coefficients, never by quadrature, so inner products, derivatives and
//! products are exact up to floating rounding.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real 1-periodic function given by finitely many Fourier modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    constant: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

// Deserialization goes through `new` so that mode lists of unequal
// length are padded rather than breaking the structural invariant.
impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            constant: f64,
            #[serde(default)]
            cos: Vec<f64>,
            #[serde(default)]
            sin: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Ok(TrigPoly::new(raw.constant, raw.cos, raw.sin))
    }
}

impl TrigPoly {
    /// Builds a polynomial from raw coefficients; the shorter of the two
    /// mode lists is zero-padded so both have equal length.
    pub fn new(constant: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Self {
        let n = cos.len().max(sin.len());
        cos.resize(n, 0.0);
        sin.resize(n, 0.0);
        TrigPoly { constant, cos, sin }
    }

    pub fn zero() -> Self {
        TrigPoly {
            constant: 0.0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            constant: c,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// `amp * cos(2 pi n tau)`; `n = 0` yields the constant `amp`.
    pub fn cosine(n: usize, amp: f64) -> Self {
        if n == 0 {
            return TrigPoly::constant(amp);
        }
        let mut cos = vec![0.0; n];
        cos[n - 1] = amp;
        TrigPoly {
            constant: 0.0,
            cos,
            sin: vec![0.0; n],
        }
    }

    /// `amp * sin(2 pi n tau)`; `n = 0` yields the zero polynomial.
    pub fn sine(n: usize, amp: f64) -> Self {
        if n == 0 {
            return TrigPoly::zero();
        }
        let mut sin = vec![0.0; n];
        sin[n - 1] = amp;
        TrigPoly {
            constant: 0.0,
            cos: vec![0.0; n],
            sin,
        }
    }

    /// Truncation level N (highest stored mode).
    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn constant_coeff(&self) -> f64 {
        self.constant
    }

    /// Coefficient of `cos(2 pi n tau)`, zero beyond the truncation.
    pub fn cos_coeff(&self, n: usize) -> f64 {
        if n == 0 {
            self.constant
        } else {
            self.cos.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    /// Coefficient of `sin(2 pi n tau)`, zero beyond the truncation.
    pub fn sin_coeff(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.sin.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Drops trailing modes whose coefficients are exactly zero.
    pub fn trimmed(mut self) -> Self {
        while let (Some(&a), Some(&b)) = (self.cos.last(), self.sin.last()) {
            if a == 0.0 && b == 0.0 {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn eval(&self, tau: f64) -> f64 {
        let mut acc = self.constant;
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let theta = 2.0 * PI * (i + 1) as f64 * tau;
            let (s, c) = theta.sin_cos();
            acc += a * c + b * s;
        }
        acc
    }

    /// Term-wise derivative; the constant of the result is zero.
    pub fn derivative(&self) -> TrigPoly {
        let n = self.degree();
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for i in 0..n {
            let w = 2.0 * PI * (i + 1) as f64;
            cos[i] = w * self.sin[i];
            sin[i] = -w * self.cos[i];
        }
        TrigPoly {
            constant: 0.0,
            cos,
            sin,
        }
    }

    pub fn second_derivative(&self) -> TrigPoly {
        self.derivative().derivative()
    }

    /// Exact L^2(S^1) inner product from coefficients; missing modes count
    /// as zero.
    pub fn inner(&self, other: &TrigPoly) -> f64 {
        let mut acc = self.constant * other.constant;
        let n = self.degree().min(other.degree());
        for i in 0..n {
            acc += 0.5 * (self.cos[i] * other.cos[i] + self.sin[i] * other.sin[i]);
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Exact product, computed by the product-to-sum identities; the result
    /// has degree `deg f + deg g`.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let n_out = self.degree() + other.degree();
        let mut out = TrigPoly::new(0.0, vec![0.0; n_out], vec![0.0; n_out]);
        // Term-by-term: indices 0 denote the constant mode.
        let terms = |p: &TrigPoly| -> Vec<(usize, f64, f64)> {
            let mut v = vec![(0usize, p.constant, 0.0)];
            for i in 0..p.degree() {
                v.push((i + 1, p.cos[i], p.sin[i]));
            }
            v
        };
        for &(m, am, bm) in &terms(self) {
            for &(n, an, bn) in &terms(other) {
                if (am == 0.0 && bm == 0.0) || (an == 0.0 && bn == 0.0) {
                    continue;
                }
                let sum = m + n;
                let diff = m.abs_diff(n);
                // cos m * cos n = (cos(m-n) + cos(m+n))/2
                out.add_cos(diff, 0.5 * am * an);
                out.add_cos(sum, 0.5 * am * an);
                // sin m * sin n = (cos(m-n) - cos(m+n))/2
                out.add_cos(diff, 0.5 * bm * bn);
                out.add_cos(sum, -0.5 * bm * bn);
                // sin m * cos n = (sin(m+n) + sin(m-n))/2
                out.add_sin_signed(sum as i64, 0.5 * bm * an);
                out.add_sin_signed(m as i64 - n as i64, 0.5 * bm * an);
                // cos m * sin n = (sin(m+n) - sin(m-n))/2
                out.add_sin_signed(sum as i64, 0.5 * am * bn);
                out.add_sin_signed(n as i64 - m as i64, 0.5 * am * bn);
            }
        }
        out.trimmed()
    }

    fn add_cos(&mut self, n: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        if n == 0 {
            self.constant += v;
        } else {
            self.cos[n - 1] += v;
        }
    }

    fn add_sin_signed(&mut self, n: i64, v: f64) {
        if v == 0.0 || n == 0 {
            return;
        }
        let (idx, sign) = if n > 0 {
            (n as usize, 1.0)
        } else {
            ((-n) as usize, -1.0)
        };
        self.sin[idx - 1] += sign * v;
    }

    /// `int_0^tau f(s) ds`, exact; not periodic unless the mean vanishes.
    pub fn integral_from_zero(&self, tau: f64) -> f64 {
        let mut acc = self.constant * tau;
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = 2.0 * PI * (i + 1) as f64;
            let theta = w * tau;
            acc += a * theta.sin() / w - b * (theta.cos() - 1.0) / w;
        }
        acc
    }

    /// Time shift `f(. + sigma)`.
    pub fn shift(&self, sigma: f64) -> TrigPoly {
        let n = self.degree();
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for i in 0..n {
            let phi = 2.0 * PI * (i + 1) as f64 * sigma;
            let (s, c) = phi.sin_cos();
            cos[i] = self.cos[i] * c + self.sin[i] * s;
            sin[i] = -self.cos[i] * s + self.sin[i] * c;
        }
        TrigPoly {
            constant: self.constant,
            cos,
            sin,
        }
    }

    /// Values on the uniform grid `tau_j = j/M`, `j = 0..M-1`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        (0..m).map(|j| self.eval(j as f64 / m as f64)).collect()
    }

    /// Discrete Fourier projection of grid values onto modes `<= n`.
    /// Lossless for trig polynomials of degree `<= n` when `M >= 2n+1`.
    pub fn from_samples(vals: &[f64], n: usize) -> Result<TrigPoly> {
        let m = vals.len();
        if m < 2 * n + 1 {
            return Err(Error::InsufficientSamples {
                got: m,
                need: 2 * n + 1,
            });
        }
        let mf = m as f64;
        let constant = vals.iter().sum::<f64>() / mf;
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 1..=n {
            let mut ak = 0.0;
            let mut bk = 0.0;
            for (j, &v) in vals.iter().enumerate() {
                let theta = 2.0 * PI * k as f64 * j as f64 / mf;
                let (s, c) = theta.sin_cos();
                ak += v * c;
                bk += v * s;
            }
            cos[k - 1] = 2.0 * ak / mf;
            sin[k - 1] = 2.0 * bk / mf;
        }
        Ok(TrigPoly { constant, cos, sin })
    }

    pub fn scaled(&self, r: f64) -> TrigPoly {
        TrigPoly {
            constant: self.constant * r,
            cos: self.cos.iter().map(|c| c * r).collect(),
            sin: self.sin.iter().map(|s| s * r).collect(),
        }
    }

    /// Largest absolute coefficient; a cheap sup-norm bound.
    pub fn max_coeff(&self) -> f64 {
        let mut m = self.constant.abs();
        for &c in self.cos.iter().chain(&self.sin) {
            m = m.max(c.abs());
        }
        m
    }
}

impl std::ops::Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let n = self.degree().max(rhs.degree());
        let mut out = TrigPoly::new(self.constant + rhs.constant, vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            out.cos[i] = self.cos.get(i).unwrap_or(&0.0) + rhs.cos.get(i).unwrap_or(&0.0);
            out.sin[i] = self.sin.get(i).unwrap_or(&0.0) + rhs.sin.get(i).unwrap_or(&0.0);
        }
        out
    }
}

impl std::ops::Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        let n = self.degree().max(rhs.degree());
        let mut out = TrigPoly::new(self.constant - rhs.constant, vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            out.cos[i] = self.cos.get(i).unwrap_or(&0.0) - rhs.cos.get(i).unwrap_or(&0.0);
            out.sin[i] = self.sin.get(i).unwrap_or(&0.0) - rhs.sin.get(i).unwrap_or(&0.0);
        }
        out
    }
}

impl std::ops::Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scaled(-1.0)
    }
}

/// Loop-dependent metric `<f,g>_x = 4 ||x||^2 <f,g>`.
pub fn weighted_inner(x: &TrigPoly, f: &TrigPoly, g: &TrigPoly) -> Result<f64> {
    let nx = x.norm_sq();
    if nx == 0.0 {
        return Err(Error::ZeroLoop);
    }
    Ok(4.0 * nx * f.inner(g))
}

/// Dual metric `<f,g>^x = <f,g> / (4 ||x||^2)`.
pub fn dual_inner(x: &TrigPoly, f: &TrigPoly, g: &TrigPoly) -> Result<f64> {
    let nx = x.norm_sq();
    if nx == 0.0 {
        return Err(Error::ZeroLoop);
    }
    Ok(f.inner(g) / (4.0 * nx))
}
