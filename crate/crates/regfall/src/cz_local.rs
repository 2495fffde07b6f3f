//! The local theory as a stand-alone computer: for a continuous path of
//! symmetric 2x2 matrices `S(t)`, `t in [0,1]`, the operator
//! `L_S zeta = -J0 zeta' - S zeta` on 1-periodic plane loops, its Galerkin
//! spectrum, eigenvector winding numbers, the largest winding `alpha(S)`
//! among negative eigenvalues, the parity `p(S)`, and
//! `CZ(S) = 2 alpha(S) + p(S)`.
//!
//! An independent shooting oracle locates eigenvalues as the parameters
//! `lambda` where the monodromy of `zeta' = J0 (S + lambda) zeta` has
//! eigenvalue one; since the monodromy is symplectic this reduces to
//! `tr Phi(1) = 2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::spectral::{
    assemble_pair_operator, cluster_adaptive, eigensolve, vector_to_loops, DenseSymmetric, Layout,
    SpectrumEntry,
};

pub use crate::spectral::winding_of_loop;

/// `J0 = [[0, -1], [1, 0]]`, multiplication by i under R^2 ~ C.
pub const J0: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];

/// A symmetric 2x2 matrix sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
}

/// A path of symmetric matrices given by samples on a uniform grid over
/// `[0,1]`, linearly interpolated in between. The path need not close up.
#[derive(Debug, Clone)]
pub struct SymmetricPath {
    samples: Vec<Sym2>,
}

/// JSON form: `{"grid": [t_0, ...], "S": [[[s11,s12],[s12,s22]], ...]}`.
#[derive(Serialize, Deserialize)]
pub struct SymmetricPathJson {
    pub grid: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<[[f64; 2]; 2]>,
}

impl SymmetricPath {
    /// Builds from samples at `t_j = j / (len - 1)`.
    pub fn from_samples(samples: Vec<Sym2>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("need at least two samples".into()));
        }
        Ok(SymmetricPath { samples })
    }

    pub fn from_fn(f: impl Fn(f64) -> Sym2, grid_size: usize) -> Result<Self> {
        let n = grid_size.max(2);
        let samples = (0..n).map(|j| f(j as f64 / (n - 1) as f64)).collect();
        SymmetricPath::from_samples(samples)
    }

    pub fn constant(m: Sym2) -> Self {
        SymmetricPath {
            samples: vec![m, m],
        }
    }

    pub fn from_json(json: &SymmetricPathJson) -> Result<Self> {
        let n = json.grid.len();
        if n != json.s.len() {
            return Err(Error::InvalidInput("grid and S lengths differ".into()));
        }
        if n < 2 {
            return Err(Error::InvalidInput("need at least two samples".into()));
        }
        let h = 1.0 / (n - 1) as f64;
        for (j, &t) in json.grid.iter().enumerate() {
            if (t - j as f64 * h).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "grid is not uniform over [0,1] at index {j}"
                )));
            }
        }
        let mut samples = Vec::with_capacity(n);
        for (j, m) in json.s.iter().enumerate() {
            if m[0][1] != m[1][0] {
                return Err(Error::InvalidInput(format!(
                    "sample {j} is not symmetric: {} != {}",
                    m[0][1], m[1][0]
                )));
            }
            samples.push(Sym2 {
                s11: m[0][0],
                s12: m[0][1],
                s22: m[1][1],
            });
        }
        Ok(SymmetricPath { samples })
    }

    pub fn to_json(&self) -> SymmetricPathJson {
        let n = self.samples.len();
        SymmetricPathJson {
            grid: (0..n).map(|j| j as f64 / (n - 1) as f64).collect(),
            s: self
                .samples
                .iter()
                .map(|m| [[m.s11, m.s12], [m.s12, m.s22]])
                .collect(),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn segments(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn eval(&self, t: f64) -> Sym2 {
        let n = self.segments();
        let u = (t.clamp(0.0, 1.0)) * n as f64;
        let j = (u as usize).min(n - 1);
        let w = u - j as f64;
        let a = self.samples[j];
        let b = self.samples[j + 1];
        Sym2 {
            s11: a.s11 + w * (b.s11 - a.s11),
            s12: a.s12 + w * (b.s12 - a.s12),
            s22: a.s22 + w * (b.s22 - a.s22),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, s| {
            m.max(s.s11.abs()).max(s.s12.abs()).max(s.s22.abs())
        })
    }

    pub fn scaled(&self, r: f64) -> SymmetricPath {
        SymmetricPath {
            samples: self
                .samples
                .iter()
                .map(|s| Sym2 {
                    s11: r * s.s11,
                    s12: r * s.s12,
                    s22: r * s.s22,
                })
                .collect(),
        }
    }

    /// Fourier coefficients of one entry of the piecewise-linear path up
    /// to `max_freq`, from per-segment closed-form integrals.
    fn entry_fourier(&self, pick: impl Fn(&Sym2) -> f64, max_freq: usize) -> TrigPoly {
        let n = self.segments();
        let h = 1.0 / n as f64;
        let vals: Vec<f64> = self.samples.iter().map(&pick).collect();
        let mut constant = 0.0;
        for j in 0..n {
            constant += 0.5 * (vals[j] + vals[j + 1]) * h;
        }
        let mut cos = vec![0.0; max_freq];
        let mut sin = vec![0.0; max_freq];
        for m in 1..=max_freq {
            let w = 2.0 * PI * m as f64;
            let mut ac = 0.0;
            let mut as_ = 0.0;
            for j in 0..n {
                let t0 = j as f64 * h;
                let t1 = t0 + h;
                let g0 = vals[j];
                let slope = (vals[j + 1] - vals[j]) / h;
                // int (g0 + slope (t - t0)) cos(w t) dt over [t0, t1]
                let (s0, c0) = (w * t0).sin_cos();
                let (s1, c1) = (w * t1).sin_cos();
                let lin0 = g0;
                let lin1 = g0 + slope * h;
                ac += (lin1 * s1 - lin0 * s0) / w + slope * (c1 - c0) / (w * w);
                as_ += (-lin1 * c1 + lin0 * c0) / w + slope * (s1 - s0) / (w * w);
            }
            cos[m - 1] = 2.0 * ac;
            sin[m - 1] = 2.0 * as_;
        }
        TrigPoly::new(constant, cos, sin)
    }
}

/// Galerkin matrix of `L_S` in the interleaved orthonormal pair basis of
/// dimension `2(2N+1)`. Entries are exact for the piecewise-linear path:
/// products of basis elements have frequency at most `2N`, so the symbol's
/// Fourier coefficients up to `2N` determine every projection.
pub fn assemble_ls(path: &SymmetricPath, n_modes: usize) -> (DenseSymmetric, f64) {
    let s11 = path.entry_fourier(|s| s.s11, 2 * n_modes);
    let s12 = path.entry_fourier(|s| s.s12, 2 * n_modes);
    let s22 = path.entry_fourier(|s| s.s22, 2 * n_modes);
    assemble_pair_operator(n_modes, |xi, eta| {
        let first = &eta.derivative() - &(&s11.mul(xi) + &s12.mul(eta));
        let second = &(-&xi.derivative()) - &(&s12.mul(xi) + &s22.mul(eta));
        (first, second)
    })
}

/// Default reliable window for truncation `N`: Galerkin edge modes are
/// unreliable, so only `[-pi N / 2, pi N / 2]` is reported.
pub fn default_window(n_modes: usize) -> (f64, f64) {
    let w = PI * n_modes as f64 / 2.0;
    (-w, w)
}

/// Clustered eigenvalues of the truncated `L_S` inside `window`, each
/// cluster carrying the common winding of its eigenvectors.
pub fn spectrum_with_winding(
    path: &SymmetricPath,
    n_modes: usize,
    window: (f64, f64),
) -> Result<Vec<SpectrumEntry>> {
    let max_window = PI * n_modes as f64;
    if window.0 < -max_window || window.1 > max_window {
        return Err(Error::WindowTooWide);
    }
    let (matrix, _) = assemble_ls(path, n_modes);
    let eig = eigensolve(&matrix)?;
    let layout = Layout::PhasePair { n_modes };
    let grid = (32 * (n_modes + 1)).max(512);
    let mut out = Vec::new();
    for c in cluster_adaptive(&eig.values) {
        if c.value < window.0 || c.value > window.1 {
            continue;
        }
        let mut winding: Option<i64> = None;
        let mut vectors = Vec::new();
        for &idx in &c.members {
            let (xi, eta) = vector_to_loops(&eig.vectors[idx], layout)?;
            let w = winding_of_loop(&xi, &eta, grid)?;
            match winding {
                None => winding = Some(w),
                Some(prev) if prev != w => {
                    return Err(Error::DegenerateWindingMismatch { lambda: c.value })
                }
                _ => {}
            }
            vectors.push((xi, eta));
        }
        out.push(SpectrumEntry {
            lambda: c.value,
            multiplicity: c.multiplicity,
            winding,
            family: "L_S".into(),
            mode: None,
            eigenvectors: vectors,
        });
    }
    Ok(out)
}

/// `alpha(S)`, the parity `p(S)` and `CZ(S) = 2 alpha(S) + p(S)` for a
/// nondegenerate path. Zero in the spectrum is refused.
pub fn cz_of_path(path: &SymmetricPath, n_modes: usize) -> Result<(i64, u8, i64)> {
    let zero_tol = 1e-9 * (1.0 + path.sup_norm());
    let window = default_window(n_modes);
    let spectrum = spectrum_with_winding(path, n_modes, window)?;
    if spectrum.iter().any(|e| e.lambda.abs() <= zero_tol) {
        return Err(Error::DegenerateAtZero);
    }
    let alpha = spectrum
        .iter()
        .filter(|e| e.lambda < 0.0)
        .filter_map(|e| e.winding)
        .max()
        .ok_or(Error::WindowInsufficient)?;
    let achieving: Vec<&SpectrumEntry> = spectrum
        .iter()
        .filter(|e| e.winding == Some(alpha))
        .collect();
    let count: usize = achieving.iter().map(|e| e.multiplicity).sum();
    if count != 2 {
        return Err(Error::WindowInsufficient);
    }
    // both achieving eigenvalues must sit safely inside the window
    let margin = 2.0 * PI;
    for e in &achieving {
        if e.lambda < window.0 + margin || e.lambda > window.1 - margin {
            return Err(Error::WindowInsufficient);
        }
    }
    let parity = if achieving.iter().all(|e| e.lambda < 0.0) {
        1u8
    } else {
        0u8
    };
    Ok((alpha, parity, 2 * alpha + parity as i64))
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn rhs_matrix(path: &SymmetricPath, lambda: f64, t: f64) -> [[f64; 2]; 2] {
    // J0 (S(t) + lambda)
    let s = path.eval(t);
    let a = s.s11 + lambda;
    let d = s.s22 + lambda;
    [[-s.s12, -d], [a, s.s12]]
}

/// Monodromy `Phi(1)` of `zeta' = J0 (S + lambda) zeta` by fixed-step RK4,
/// with steps aligned to the sample segments so the integrand stays smooth
/// within each step.
pub fn monodromy(path: &SymmetricPath, lambda: f64, total_steps: usize) -> [[f64; 2]; 2] {
    let segs = path.segments();
    let per_seg = total_steps.div_ceil(segs).max(1);
    let h = 1.0 / (segs * per_seg) as f64;
    let mut phi = [[1.0, 0.0], [0.0, 1.0]];
    for step in 0..segs * per_seg {
        let t = step as f64 * h;
        let k1 = mat_mul(rhs_matrix(path, lambda, t), phi);
        let half = add_scaled(phi, k1, 0.5 * h);
        let k2 = mat_mul(rhs_matrix(path, lambda, t + 0.5 * h), half);
        let half2 = add_scaled(phi, k2, 0.5 * h);
        let k3 = mat_mul(rhs_matrix(path, lambda, t + 0.5 * h), half2);
        let full = add_scaled(phi, k3, h);
        let k4 = mat_mul(rhs_matrix(path, lambda, t + h), full);
        for i in 0..2 {
            for j in 0..2 {
                phi[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    phi
}

fn add_scaled(a: [[f64; 2]; 2], b: [[f64; 2]; 2], s: f64) -> [[f64; 2]; 2] {
    [
        [a[0][0] + s * b[0][0], a[0][1] + s * b[0][1]],
        [a[1][0] + s * b[1][0], a[1][1] + s * b[1][1]],
    ]
}

/// Shooting function whose zeros are the eigenvalues of `L_S`: the
/// monodromy is symplectic, so `det(Phi - 1) = 2 - tr Phi`.
pub fn shooting_fn(path: &SymmetricPath, lambda: f64, steps: usize) -> f64 {
    let phi = monodromy(path, lambda, steps);
    2.0 - (phi[0][0] + phi[1][1])
}

fn frob_dist_identity(phi: [[f64; 2]; 2]) -> f64 {
    ((phi[0][0] - 1.0).powi(2) + phi[0][1].powi(2) + phi[1][0].powi(2) + (phi[1][1] - 1.0).powi(2))
        .sqrt()
}

/// Golden-section extremum of `sign * f` over a bracket; returns the
/// abscissa.
fn golden_extremum(path: &SymmetricPath, mut lo: f64, mut hi: f64, steps: usize, sign: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = sign * shooting_fn(path, a, steps);
    let mut fb = sign * shooting_fn(path, b, steps);
    for _ in 0..70 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = sign * shooting_fn(path, a, steps);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = sign * shooting_fn(path, b, steps);
        }
    }
    0.5 * (lo + hi)
}

fn bisect_root(path: &SymmetricPath, mut lo: f64, mut hi: f64, flo: f64, steps: usize) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if shooting_fn(path, mid, steps) * flo.signum() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sharpens a tangential (double) root by bisecting the sign change of the
/// slope; golden section alone only localizes a noisy quadratic minimum to
/// the square root of the function noise.
fn refine_extremum(path: &SymmetricPath, mut lo: f64, mut hi: f64, steps: usize, sign: f64) -> f64 {
    let h = 1e-4;
    let slope = |l: f64| sign * (shooting_fn(path, l + h, steps) - shooting_fn(path, l - h, steps));
    if !(slope(lo) < 0.0 && slope(hi) > 0.0) {
        return 0.5 * (lo + hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locates the root of the shooting function nearest to `guess` within
/// `radius`; returns `None` when the residual does not vanish there.
pub fn refine_near(path: &SymmetricPath, guess: f64, radius: f64, steps: usize) -> Option<f64> {
    let roots = shooting_eigenvalues(path, (guess - radius, guess + radius), radius / 20.0, steps);
    roots
        .into_iter()
        .map(|(l, _)| l)
        .min_by(|a, b| (a - guess).abs().partial_cmp(&(b - guess).abs()).unwrap())
}

/// Brute-force eigenvalue scan: walks `window` with `coarse_step`,
/// bisects sign changes of the shooting function, resolves dips that stay
/// inside one cell, and inspects tangential extrema. Reports
/// `(lambda, geometric multiplicity)` pairs; the multiplicity is 2 exactly
/// when the monodromy is the identity.
pub fn shooting_eigenvalues(
    path: &SymmetricPath,
    window: (f64, f64),
    coarse_step: f64,
    steps: usize,
) -> Vec<(f64, usize)> {
    let mut lambdas: Vec<f64> = Vec::new();
    let n = (((window.1 - window.0) / coarse_step).ceil() as usize).max(2);
    let grid: Vec<f64> = (0..=n)
        .map(|j| window.0 + (window.1 - window.0) * j as f64 / n as f64)
        .collect();
    let f: Vec<f64> = grid.iter().map(|&l| shooting_fn(path, l, steps)).collect();
    let root_tol = |l: f64| 1e-7 * (1.0 + l.abs());
    for j in 0..n {
        if f[j] == 0.0 {
            lambdas.push(grid[j]);
        } else if f[j] * f[j + 1] < 0.0 {
            lambdas.push(bisect_root(path, grid[j], grid[j + 1], f[j], steps));
        }
        // interior extremum of f: either a tangential double root or a
        // dip/bump crossing zero twice within the bracket
        if j == 0 || j == n {
            continue;
        }
        let local_min = f[j] < f[j - 1] && f[j] <= f[j + 1] && f[j] > 0.0;
        let local_max = f[j] > f[j - 1] && f[j] >= f[j + 1] && f[j] < 0.0;
        if !(local_min || local_max) {
            continue;
        }
        let sign = if local_min { 1.0 } else { -1.0 };
        let lambda = golden_extremum(path, grid[j - 1], grid[j + 1], steps, sign);
        let fext = shooting_fn(path, lambda, steps);
        if fext.abs() <= root_tol(lambda) {
            lambdas.push(refine_extremum(path, grid[j - 1], grid[j + 1], steps, sign));
        } else if sign * fext < 0.0 {
            // the extremum overshoots zero: two crossings hide in here
            let fl = shooting_fn(path, grid[j - 1], steps);
            let fr = shooting_fn(path, grid[j + 1], steps);
            if fl * fext < 0.0 {
                lambdas.push(bisect_root(path, grid[j - 1], lambda, fl, steps));
            }
            if fext * fr < 0.0 {
                lambdas.push(bisect_root(path, lambda, grid[j + 1], fext, steps));
            }
        }
    }
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lambdas.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let isolated = |i: usize, all: &[f64]| -> bool {
        all.iter()
            .enumerate()
            .all(|(j, l)| i == j || (l - all[i]).abs() > 1e-3)
    };
    let snapshot = lambdas.clone();
    lambdas
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let phi = monodromy(path, l, steps);
            let double = frob_dist_identity(phi) < 1e-5 && isolated(i, &snapshot);
            (l, if double { 2 } else { 1 })
        })
        .collect()
}
