//! The non-local Hamiltonian side.
//!
//! On pairs of loops `(x, y)` with `x` nonzero the Hamiltonian is
//! `H(x,y) = (||y||^2/2 - 4) / (4 ||x||^2)` and the action is
//! `A(x,y) = int y x' - H(x,y)`. Critical points pair the Lagrangian
//! family with `y_k = -2 c_k^3 (2 pi k) sin(2 pi k tau)` through the
//! fiberwise transform `y_x = 4 ||x||^2 x'`.
//!
//! The Hessian-type operator at a critical point is
//! `L zeta = -J0 zeta' - S zeta` with the non-local symmetric operator `S`
//! coming from the linearized Hamilton equations; its kernel consists of
//! the linearized solutions. Eigenvalues come in the families
//! `lambda_n^-+` (roots of `(l - 1/2c^2)(l - 4/c^4) = 4 pi^2 n^2`) and
//! `lambda_hat_k^-+` (roots of `(l - 1/2c^2)(l + 12/c^4) = 36 pi^2 k^2`),
//! each eigenvalue carrying a winding number; the index built from the
//! windings equals the Morse index on the Lagrangian side.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::lagrangian::{self, amplitude, MorseMode};
use crate::spectral::{
    assemble_pair_operator, cluster_adaptive, eigensolve, vector_to_loops, winding_of_loop,
    DenseSymmetric, Layout, SpectrumEntry,
};

/// A point of the phase loop space.
#[derive(Debug, Clone)]
pub struct PhaseLoop {
    pub x: TrigPoly,
    pub y: TrigPoly,
}

/// The mode-k critical point of the Hamiltonian action.
#[derive(Debug, Clone)]
pub struct HamCritical {
    pub k: usize,
    pub c_k: f64,
    pub x: TrigPoly,
    pub y: TrigPoly,
    /// `a = 1/(4||x||^2)`, the coefficient in `x' = a y`.
    pub a: f64,
    /// `b = (2 - ||y||^2/4)/||x||^4`, the coefficient in `y' = -b x`.
    pub b: f64,
}

/// The index bookkeeping at mode k. `cz = 2 alpha + parity` is the
/// counter-clockwise normalization, `cz_can = -cz` the clockwise one that
/// matches the Morse index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexReport {
    pub k: usize,
    pub alpha_s: i64,
    pub parity: u8,
    pub cz: i64,
    pub cz_can: i64,
    pub morse: i64,
}

fn require_nonzero(x: &TrigPoly) -> Result<f64> {
    let n = x.norm_sq();
    if n == 0.0 {
        Err(Error::ZeroLoop)
    } else {
        Ok(n)
    }
}

/// `H(x,y) = (||y||^2 / 2 - 4) / (4 ||x||^2)`.
pub fn hamiltonian_h(p: &PhaseLoop) -> Result<f64> {
    let nx = require_nonzero(&p.x)?;
    Ok((0.5 * p.y.norm_sq() - 4.0) / (4.0 * nx))
}

/// `A(x,y) = <y, x'> - H(x,y)`.
pub fn action_ah(p: &PhaseLoop) -> Result<f64> {
    Ok(p.y.inner(&p.x.derivative()) - hamiltonian_h(p)?)
}

/// Differential of the action paired with `(xi, eta)`:
/// `<x' - y/(4||x||^2), eta> + <-y' + (||y||^2/4 - 2) x / ||x||^4, xi>`.
pub fn diff_ah(p: &PhaseLoop, xi: &TrigPoly, eta: &TrigPoly) -> Result<f64> {
    let nx = require_nonzero(&p.x)?;
    let first = &p.x.derivative() - &p.y.scaled(1.0 / (4.0 * nx));
    let second = &(-&p.y.derivative()) + &p.x.scaled((0.25 * p.y.norm_sq() - 2.0) / (nx * nx));
    Ok(first.inner(eta) + second.inner(xi))
}

/// L^2 residuals of the two delay Hamilton equations
/// `x' = y/(4||x||^2)` and `y' = x (||y||^2/4 - 2) / ||x||^4`.
pub fn hamilton_residual(p: &PhaseLoop) -> Result<(f64, f64)> {
    let nx = require_nonzero(&p.x)?;
    let r1 = (&p.x.derivative() - &p.y.scaled(1.0 / (4.0 * nx))).norm();
    let r2 = (&p.y.derivative() - &p.x.scaled((0.25 * p.y.norm_sq() - 2.0) / (nx * nx))).norm();
    Ok((r1, r2))
}

/// The fiberwise transform `y_x = 4 ||x||^2 x'`.
pub fn legendre_fiber(x: &TrigPoly) -> Result<TrigPoly> {
    let nx = require_nonzero(x)?;
    Ok(x.derivative().scaled(4.0 * nx))
}

/// The non-negative gap `B(x) - A(x,y) = ||4||x||^2 x' - y||^2 / (8 ||x||^2)`.
pub fn domination_gap(p: &PhaseLoop) -> Result<f64> {
    let nx = require_nonzero(&p.x)?;
    let diff = &legendre_fiber(&p.x)? - &p.y;
    Ok(0.5 * diff.norm_sq() / (4.0 * nx))
}

/// `(x, xi) -> (x, 4||x||^2 (x' + xi))`.
pub fn l_map(x: &TrigPoly, xi: &TrigPoly) -> Result<PhaseLoop> {
    let nx = require_nonzero(x)?;
    let y = (&x.derivative() + xi).scaled(4.0 * nx);
    Ok(PhaseLoop { x: x.clone(), y })
}

/// `(x, y) -> (x, y/(4||x||^2) - x')`; inverse of `l_map`.
pub fn l_inverse(p: &PhaseLoop) -> Result<(TrigPoly, TrigPoly)> {
    let nx = require_nonzero(&p.x)?;
    let xi = &p.y.scaled(1.0 / (4.0 * nx)) - &p.x.derivative();
    Ok((p.x.clone(), xi))
}

/// The critical pair `(x_k, y_k)` with its attached coefficients.
pub fn critical_point_ham(k: usize) -> Result<HamCritical> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    let c = amplitude(k);
    let w = 2.0 * PI * k as f64;
    let x = TrigPoly::cosine(k, c);
    let y = TrigPoly::sine(k, -2.0 * c.powi(3) * w);
    let nx = c * c / 2.0;
    let ny = y.norm_sq();
    Ok(HamCritical {
        k,
        c_k: c,
        a: 1.0 / (4.0 * nx),
        b: (2.0 - ny / 4.0) / (nx * nx),
        x,
        y,
    })
}

/// Coefficients of the two quadratics at mode k:
/// `lambda^2 - beta_k lambda + gamma_{k,n} = 0` for the plain families and
/// `lambda^2 - B_k lambda + C_k = 0` for the hatted ones.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticData {
    pub beta_k: f64,
    pub b_k: f64,
    pub c_big_k: f64,
    pub half_inv_c_sq: f64,
}

pub fn quadratic_data(k: usize) -> QuadraticData {
    let c = amplitude(k);
    let c2 = c * c;
    let c4 = c2 * c2;
    QuadraticData {
        beta_k: 4.0 / c4 + 1.0 / (2.0 * c2),
        b_k: 1.0 / (2.0 * c2) - 12.0 / c4,
        c_big_k: -48.0 * PI * PI * (k * k) as f64,
        half_inv_c_sq: 1.0 / (2.0 * c2),
    }
}

/// `gamma_{k,n} = 4 pi^2 (k^2 - n^2)`.
pub fn gamma_kn(k: usize, n: usize) -> f64 {
    4.0 * PI * PI * ((k * k) as f64 - (n * n) as f64)
}

/// `(lambda_n^-, lambda_n^+)`.
pub fn lambda_n(k: usize, n: usize) -> (f64, f64) {
    let q = quadratic_data(k);
    let disc = (q.beta_k * q.beta_k - 4.0 * gamma_kn(k, n)).sqrt();
    (0.5 * (q.beta_k - disc), 0.5 * (q.beta_k + disc))
}

/// `(lambda_hat_k^-, lambda_hat_k^+)`.
pub fn lambda_hat(k: usize) -> (f64, f64) {
    let q = quadratic_data(k);
    let disc = (q.b_k * q.b_k - 4.0 * q.c_big_k).sqrt();
    (0.5 * (q.b_k - disc), 0.5 * (q.b_k + disc))
}

fn eigvec_u(k: usize, n: usize, lambda: f64) -> (TrigPoly, TrigPoly) {
    let q = quadratic_data(k);
    let coeff = -(lambda - q.half_inv_c_sq) / (2.0 * PI * n as f64);
    (TrigPoly::sine(n, coeff), TrigPoly::cosine(n, 1.0))
}

fn eigvec_v(k: usize, n: usize, lambda: f64) -> (TrigPoly, TrigPoly) {
    let q = quadratic_data(k);
    let coeff = (lambda - q.half_inv_c_sq) / (2.0 * PI * n as f64);
    (TrigPoly::cosine(n, coeff), TrigPoly::sine(n, 1.0))
}

fn eigvec_v_hat(k: usize, lambda: f64) -> (TrigPoly, TrigPoly) {
    let q = quadratic_data(k);
    let coeff = (lambda - q.half_inv_c_sq) / (6.0 * PI * k as f64);
    (TrigPoly::cosine(k, coeff), TrigPoly::sine(k, 1.0))
}

/// Closed-form spectrum of the Hessian at `(x_k, y_k)` for modes up to
/// `n_max`, ascending, with multiplicities, windings `w(lambda_n^-+)= -+n`,
/// `w(lambda_hat_k^-+) = -+k`, and representative eigenvectors.
pub fn ham_spectrum_closed(k: usize, n_max: usize) -> Result<Vec<SpectrumEntry>> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    if n_max < k {
        return Err(Error::BadRange {
            reason: format!("n_max = {n_max} < k = {k}"),
        });
    }
    let mut entries = Vec::new();
    for n in 0..=n_max {
        let (lo, hi) = lambda_n(k, n);
        if n == 0 {
            entries.push(SpectrumEntry {
                lambda: lo,
                multiplicity: 1,
                winding: Some(0),
                family: "lambda_minus".into(),
                mode: Some(0),
                eigenvectors: vec![(TrigPoly::zero(), TrigPoly::constant(1.0))],
            });
            entries.push(SpectrumEntry {
                lambda: hi,
                multiplicity: 1,
                winding: Some(0),
                family: "lambda_plus".into(),
                mode: Some(0),
                eigenvectors: vec![(TrigPoly::constant(1.0), TrigPoly::zero())],
            });
        } else if n == k {
            // the two simple eigenvalues lambda_k^- = 0 and lambda_k^+ = beta_k
            entries.push(SpectrumEntry {
                lambda: lo,
                multiplicity: 1,
                winding: Some(-(k as i64)),
                family: "lambda_minus".into(),
                mode: Some(k),
                eigenvectors: vec![eigvec_u(k, k, lo)],
            });
            entries.push(SpectrumEntry {
                lambda: hi,
                multiplicity: 1,
                winding: Some(k as i64),
                family: "lambda_plus".into(),
                mode: Some(k),
                eigenvectors: vec![eigvec_u(k, k, hi)],
            });
        } else {
            entries.push(SpectrumEntry {
                lambda: lo,
                multiplicity: 2,
                winding: Some(-(n as i64)),
                family: "lambda_minus".into(),
                mode: Some(n),
                eigenvectors: vec![eigvec_u(k, n, lo), eigvec_v(k, n, lo)],
            });
            entries.push(SpectrumEntry {
                lambda: hi,
                multiplicity: 2,
                winding: Some(n as i64),
                family: "lambda_plus".into(),
                mode: Some(n),
                eigenvectors: vec![eigvec_u(k, n, hi), eigvec_v(k, n, hi)],
            });
        }
    }
    let (hat_lo, hat_hi) = lambda_hat(k);
    entries.push(SpectrumEntry {
        lambda: hat_lo,
        multiplicity: 1,
        winding: Some(-(k as i64)),
        family: "lambda_hat_minus".into(),
        mode: Some(k),
        eigenvectors: vec![eigvec_v_hat(k, hat_lo)],
    });
    entries.push(SpectrumEntry {
        lambda: hat_hi,
        multiplicity: 1,
        winding: Some(k as i64),
        family: "lambda_hat_plus".into(),
        mode: Some(k),
        eigenvectors: vec![eigvec_v_hat(k, hat_hi)],
    });
    entries.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    Ok(entries)
}

/// The operator `L zeta = -J0 zeta' - S zeta` at a critical pair, applied
/// to a loop pair. `S` is minus the Hessian of `H` read off from the
/// linearized Hamilton equations, so the kernel of `L` consists exactly of
/// the linearized solutions.
pub fn ham_hessian_apply(cp: &HamCritical, xi: &TrigPoly, eta: &TrigPoly) -> (TrigPoly, TrigPoly) {
    let nx = cp.x.norm_sq();
    let ny = cp.y.norm_sq();
    let x_xi = cp.x.inner(xi);
    let y_eta = cp.y.inner(eta);
    let factor = 0.25 * ny - 2.0;
    let s1 = &(&xi.scaled(factor / (nx * nx)) - &cp.x.scaled(4.0 * x_xi * factor / (nx * nx * nx)))
        + &cp.x.scaled(y_eta / (2.0 * nx * nx));
    let s2 = &cp.y.scaled(x_xi / (2.0 * nx * nx)) - &eta.scaled(1.0 / (4.0 * nx));
    (&eta.derivative() - &s1, &(-&xi.derivative()) - &s2)
}

/// Galerkin matrix of the Hessian at `(x_k, y_k)` in the interleaved
/// orthonormal pair basis of dimension `2(2N+1)`. Returns the matrix and
/// its symmetry defect. The truncation is exact: the non-local terms only
/// touch mode-k coefficients, so the matrix is block diagonal over modes.
pub fn ham_hessian_matrix(k: usize, n_modes: usize) -> Result<(DenseSymmetric, f64)> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    if n_modes < k {
        return Err(Error::TruncationTooSmall {
            n: n_modes,
            need: k,
        });
    }
    let cp = critical_point_ham(k)?;
    Ok(assemble_pair_operator(n_modes, |xi, eta| {
        ham_hessian_apply(&cp, xi, eta)
    }))
}

/// One clustered numeric eigenvalue with the winding computed from its
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct NumericSpectrumEntry {
    pub lambda: f64,
    pub multiplicity: usize,
    pub winding: i64,
}

/// Numeric spectrum of the truncated Hessian with windings from the
/// argument-increment algorithm; all eigenvectors of one cluster must
/// agree on the winding.
pub fn ham_spectrum_numeric(k: usize, n_modes: usize) -> Result<Vec<NumericSpectrumEntry>> {
    let (matrix, _) = ham_hessian_matrix(k, n_modes)?;
    let eig = eigensolve(&matrix)?;
    let layout = Layout::PhasePair { n_modes };
    let grid = (32 * (n_modes + 1)).max(512);
    let mut out = Vec::new();
    for c in cluster_adaptive(&eig.values) {
        let mut winding: Option<i64> = None;
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
        }
        out.push(NumericSpectrumEntry {
            lambda: c.value,
            multiplicity: c.multiplicity,
            winding: winding.expect("cluster is nonempty"),
        });
    }
    Ok(out)
}

/// Conley-Zehnder index at mode k from the closed-form spectrum.
///
/// `alpha` is the largest winding among negative eigenvalues. The parity
/// is 1 when no eigenvalue of winding `alpha` is positive; this realizes
/// the two-eigenvalue parity rule in the presence of the kernel eigenvalue
/// `lambda_k^- = 0`, which shares the winding `-k` with the negative
/// `lambda_hat_k^-`.
pub fn cz_index(k: usize) -> Result<IndexReport> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    let entries = ham_spectrum_closed(k, 2 * k + 2)?;
    let alpha = entries
        .iter()
        .filter(|e| e.lambda < 0.0)
        .filter_map(|e| e.winding)
        .max()
        .expect("negative eigenvalues exist");
    let achieving: Vec<&SpectrumEntry> = entries
        .iter()
        .filter(|e| e.winding == Some(alpha))
        .collect();
    let achieving_count: usize = achieving.iter().map(|e| e.multiplicity).sum();
    debug_assert_eq!(achieving_count, 2);
    let parity = if achieving.iter().any(|e| e.lambda > 0.0) {
        0
    } else {
        1
    };
    let cz = 2 * alpha + parity as i64;
    let cz_can = -cz;
    let morse = lagrangian::morse_index(k, MorseMode::ClosedForm)? as i64;
    debug_assert_eq!(cz_can, morse);
    Ok(IndexReport {
        k,
        alpha_s: alpha,
        parity,
        cz,
        cz_can,
        morse,
    })
}

/// Minimum distance between the plain eigenvalue families and the hatted
/// ones over `n <= n_max`; strictly positive by the disjointness of the
/// two quadratics.
pub fn disjointness_gap(k: usize, n_max: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    if n_max < k {
        return Err(Error::BadRange {
            reason: format!("n_max = {n_max} < k = {k}"),
        });
    }
    let (hat_lo, hat_hi) = lambda_hat(k);
    let mut gap = f64::INFINITY;
    for n in 0..=n_max {
        let (lo, hi) = lambda_n(k, n);
        for l in [lo, hi] {
            gap = gap.min((l - hat_lo).abs()).min((l - hat_hi).abs());
        }
    }
    Ok(gap)
}
