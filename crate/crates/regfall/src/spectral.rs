//! Shared numerical machinery: orthonormal trig-basis layouts, a dense
//! cyclic-Jacobi eigensolver, eigenvalue clustering, and conversion of
//! eigenvectors back into loop pairs.
//!
//! The orthonormal scalar basis on the circle is
//! `{1, sqrt(2) cos(2 pi n tau), sqrt(2) sin(2 pi n tau)}_{n=1..N}`.

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;

/// Dense symmetric matrix in row-major storage, symmetrized on construction.
#[derive(Debug, Clone)]
pub struct DenseSymmetric {
    dim: usize,
    data: Vec<f64>,
}

impl DenseSymmetric {
    /// Builds from arbitrary row-major entries, averaging with the transpose.
    /// Returns the matrix and the largest symmetry defect `max |M - M^T|`.
    pub fn symmetrized(dim: usize, raw: &[f64]) -> (Self, f64) {
        assert_eq!(raw.len(), dim * dim);
        let mut data = vec![0.0; dim * dim];
        let mut defect = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let a = raw[i * dim + j];
                let b = raw[j * dim + i];
                defect = defect.max((a - b).abs());
                data[i * dim + j] = 0.5 * (a + b);
            }
        }
        (DenseSymmetric { dim, data }, defect)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> (Self, f64) {
        let mut raw = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                raw[i * dim + j] = f(i, j);
            }
        }
        Self::symmetrized(dim, &raw)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Eigendecomposition with eigenvalues ascending and orthonormal
/// eigenvectors; `vectors[i]` belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations with a fixed sweep order. Deterministic,
/// dependency-free, adequate for the desk-scale dimensions used here.
pub fn eigensolve(m: &DenseSymmetric) -> Result<EigenDecomposition> {
    let n = m.dim;
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: vec![],
        });
    }
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // smaller-root tangent for stability
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// One cluster of nearby eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    pub members: Vec<usize>,
}

/// Greedy chaining of an ascending list: consecutive values within `tol`
/// join one cluster whose value is the member mean.
pub fn cluster(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[*c.members.last().unwrap()]).abs() <= tol => {
                c.members.push(i);
                c.multiplicity += 1;
                c.value = c.members.iter().map(|&j| values[j]).sum::<f64>() / c.multiplicity as f64;
            }
            _ => out.push(Cluster {
                value: v,
                multiplicity: 1,
                members: vec![i],
            }),
        }
    }
    out
}

/// Shared cluster tolerance: `1e-7 * max(1, |lambda|)`.
pub fn cluster_tol(lambda: f64) -> f64 {
    1e-7 * lambda.abs().max(1.0)
}

/// Clustering with the scale-relative tolerance applied per gap.
pub fn cluster_adaptive(values: &[f64]) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[*c.members.last().unwrap()]).abs() <= cluster_tol(v) => {
                c.members.push(i);
                c.multiplicity += 1;
                c.value = c.members.iter().map(|&j| values[j]).sum::<f64>() / c.multiplicity as f64;
            }
            _ => out.push(Cluster {
                value: v,
                multiplicity: 1,
                members: vec![i],
            }),
        }
    }
    out
}

/// Winding number of a non-vanishing loop `t -> (xi(t), eta(t))` in the
/// plane: the accumulated principal-branch angle increment over a uniform
/// grid of `m` points, divided by `2 pi`.
pub fn winding_of_loop(xi: &TrigPoly, eta: &TrigPoly, m: usize) -> Result<i64> {
    let pts: Vec<(f64, f64)> = (0..m)
        .map(|j| (xi.eval(j as f64 / m as f64), eta.eval(j as f64 / m as f64)))
        .collect();
    let max_norm = pts
        .iter()
        .map(|&(a, b)| (a * a + b * b).sqrt())
        .fold(0.0f64, f64::max);
    let floor = 1e-8 * max_norm;
    let mut total = 0.0f64;
    for j in 0..m {
        let (a1, b1) = pts[j];
        let (a2, b2) = pts[(j + 1) % m];
        if (a1 * a1 + b1 * b1).sqrt() <= floor {
            return Err(Error::VanishingEigenvector);
        }
        let cross = a1 * b2 - b1 * a2;
        let dot = a1 * a2 + b1 * b2;
        total += cross.atan2(dot);
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual >= 0.25 {
        return Err(Error::NonIntegralWinding { residual });
    }
    Ok(rounded as i64)
}

/// Basis layout of an assembled matrix.
///
/// `Scalar` is the plain trig basis of dimension `2N+1`, slot order
/// `[1, cos_1, sin_1, ..., cos_N, sin_N]`.
///
/// `PhasePair` interleaves a pair `(xi, eta)` of scalar loops into
/// dimension `2(2N+1)`, slot order
/// `[const_xi, const_eta, (cos_n xi, sin_n xi, cos_n eta, sin_n eta)_{n=1..N}]`,
/// so the local part is block diagonal per mode and non-local rank-type
/// terms show up as a bordered block at the special mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Scalar { n_modes: usize },
    PhasePair { n_modes: usize },
}

impl Layout {
    pub fn dim(&self) -> usize {
        match *self {
            Layout::Scalar { n_modes } => 2 * n_modes + 1,
            Layout::PhasePair { n_modes } => 2 * (2 * n_modes + 1),
        }
    }

    pub fn n_modes(&self) -> usize {
        match *self {
            Layout::Scalar { n_modes } | Layout::PhasePair { n_modes } => n_modes,
        }
    }
}

/// Coordinates of a loop in the orthonormal scalar basis:
/// `[f_0, f_cos(n)/sqrt(2), f_sin(n)/sqrt(2), ...]`.
pub fn scalar_coords(f: &TrigPoly, n_modes: usize) -> Vec<f64> {
    let s = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(2 * n_modes + 1);
    v.push(f.constant_coeff());
    for n in 1..=n_modes {
        v.push(f.cos_coeff(n) / s);
        v.push(f.sin_coeff(n) / s);
    }
    v
}

/// Inverse of `scalar_coords`: rebuilds the loop with plain coefficients
/// `sqrt(2) * coordinate` on each cos/sin slot.
pub fn scalar_from_coords(v: &[f64], n_modes: usize) -> TrigPoly {
    let s = std::f64::consts::SQRT_2;
    let mut cos = vec![0.0; n_modes];
    let mut sin = vec![0.0; n_modes];
    for n in 1..=n_modes {
        cos[n - 1] = s * v[2 * n - 1];
        sin[n - 1] = s * v[2 * n];
    }
    TrigPoly::new(v[0], cos, sin)
}

/// Orthonormal basis element for a scalar slot index.
pub fn scalar_basis_element(slot: usize) -> TrigPoly {
    let s = std::f64::consts::SQRT_2;
    if slot == 0 {
        TrigPoly::constant(1.0)
    } else {
        let n = slot.div_ceil(2);
        if slot % 2 == 1 {
            TrigPoly::cosine(n, s)
        } else {
            TrigPoly::sine(n, s)
        }
    }
}

/// Splits an eigenvector into a `(xi, eta)` pair of loops, undoing the
/// orthonormal scaling. For `Scalar` layouts `eta` is the zero loop.
pub fn vector_to_loops(v: &[f64], layout: Layout) -> Result<(TrigPoly, TrigPoly)> {
    if v.len() != layout.dim() {
        return Err(Error::LayoutMismatch {
            got: v.len(),
            need: layout.dim(),
        });
    }
    match layout {
        Layout::Scalar { n_modes } => Ok((scalar_from_coords(v, n_modes), TrigPoly::zero())),
        Layout::PhasePair { n_modes } => {
            let (xi_v, eta_v) = split_pair_coords(v, n_modes);
            Ok((
                scalar_from_coords(&xi_v, n_modes),
                scalar_from_coords(&eta_v, n_modes),
            ))
        }
    }
}

/// Interleaves scalar coordinate vectors of `(xi, eta)` into the
/// `PhasePair` slot order.
pub fn pair_coords(xi: &TrigPoly, eta: &TrigPoly, n_modes: usize) -> Vec<f64> {
    let a = scalar_coords(xi, n_modes);
    let b = scalar_coords(eta, n_modes);
    let mut v = Vec::with_capacity(2 * a.len());
    v.push(a[0]);
    v.push(b[0]);
    for n in 1..=n_modes {
        v.push(a[2 * n - 1]);
        v.push(a[2 * n]);
        v.push(b[2 * n - 1]);
        v.push(b[2 * n]);
    }
    v
}

fn split_pair_coords(v: &[f64], n_modes: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xi = vec![0.0; 2 * n_modes + 1];
    let mut eta = vec![0.0; 2 * n_modes + 1];
    xi[0] = v[0];
    eta[0] = v[1];
    for n in 1..=n_modes {
        let base = 2 + 4 * (n - 1);
        xi[2 * n - 1] = v[base];
        xi[2 * n] = v[base + 1];
        eta[2 * n - 1] = v[base + 2];
        eta[2 * n] = v[base + 3];
    }
    (xi, eta)
}

/// Assembles the matrix of a symmetric operator on loop pairs by applying
/// it to every basis element of the layout and projecting back.
pub fn assemble_pair_operator(
    n_modes: usize,
    mut apply: impl FnMut(&TrigPoly, &TrigPoly) -> (TrigPoly, TrigPoly),
) -> (DenseSymmetric, f64) {
    let layout = Layout::PhasePair { n_modes };
    let dim = layout.dim();
    let mut raw = vec![0.0; dim * dim];
    let mut unit = vec![0.0; dim];
    for j in 0..dim {
        unit[j] = 1.0;
        let (xi, eta) = vector_to_loops(&unit, layout).expect("layout fits by construction");
        unit[j] = 0.0;
        let (fx, fe) = apply(&xi, &eta);
        let col = pair_coords(&fx, &fe, n_modes);
        for i in 0..dim {
            raw[i * dim + j] = col[i];
        }
    }
    DenseSymmetric::symmetrized(dim, &raw)
}

/// Same for operators on scalar loops in the `Scalar` layout.
pub fn assemble_scalar_operator(
    n_modes: usize,
    mut apply: impl FnMut(&TrigPoly) -> TrigPoly,
) -> (DenseSymmetric, f64) {
    let dim = 2 * n_modes + 1;
    let mut raw = vec![0.0; dim * dim];
    for j in 0..dim {
        let e = scalar_basis_element(j);
        let f = apply(&e);
        let col = scalar_coords(&f, n_modes);
        for i in 0..dim {
            raw[i * dim + j] = col[i];
        }
    }
    DenseSymmetric::symmetrized(dim, &raw)
}

/// One eigenvalue with its bookkeeping: multiplicity, winding number where
/// meaningful, a family label, the mode index for labelled families, and
/// representative eigenvector pairs `(xi, eta)`.
#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub multiplicity: usize,
    pub winding: Option<i64>,
    pub family: String,
    pub mode: Option<usize>,
    pub eigenvectors: Vec<(TrigPoly, TrigPoly)>,
}
