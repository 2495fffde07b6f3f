//! The non-local Lagrangian action
//!
//! ```text
//! B(x) = 2 ||x||^2 ||x'||^2 + 1 / ||x||^2
//! ```
//!
//! on nonzero loops, its differential and gradient in the loop-dependent
//! metric, the critical family `x_k = c_k cos(2 pi k tau)`, the Hessian
//! operator at a critical point with its closed-form spectrum, and the
//! Morse index `2k - 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::spectral::{
    assemble_scalar_operator, cluster, cluster_tol, eigensolve, DenseSymmetric, SpectrumEntry,
};

/// A critical point of the Lagrangian action at mode `k`, fully populated
/// with the closed-form data attached to it.
#[derive(Debug, Clone)]
pub struct LagCritical {
    pub k: usize,
    pub c_k: f64,
    pub x: TrigPoly,
    /// Coefficient in the critical-point equation `x'' = alpha x`.
    pub alpha: f64,
    pub norm_x_sq: f64,
    pub norm_dx_sq: f64,
}

/// Amplitude `c_k = 2^(-1/6) (pi k)^(-1/3)` of the mode-k critical loop.
pub fn amplitude(k: usize) -> f64 {
    1.0 / (2.0f64.powf(1.0 / 6.0) * (PI * k as f64).powf(1.0 / 3.0))
}

fn require_nonzero(x: &TrigPoly) -> Result<f64> {
    let n = x.norm_sq();
    if n == 0.0 {
        Err(Error::ZeroLoop)
    } else {
        Ok(n)
    }
}

/// `B(x) = 2 ||x||^2 ||x'||^2 + 1/||x||^2`, strictly positive.
pub fn action_b(x: &TrigPoly) -> Result<f64> {
    let n = require_nonzero(x)?;
    let nd = x.derivative().norm_sq();
    Ok(2.0 * n * nd + 1.0 / n)
}

/// `alpha = ||x'||^2 / ||x||^2 - 1 / (2 ||x||^6)`.
pub fn alpha_coeff(x: &TrigPoly) -> Result<f64> {
    let n = require_nonzero(x)?;
    let nd = x.derivative().norm_sq();
    Ok(nd / n - 1.0 / (2.0 * n.powi(3)))
}

/// Differential of the action,
/// `dB(x) xi = 4 <x,xi> ||x'||^2 + 4 ||x||^2 <x',xi'> - 2 <x,xi> / ||x||^4`,
/// valid for every `W^{1,2}` loop.
pub fn diff_b(x: &TrigPoly, xi: &TrigPoly) -> Result<f64> {
    let n = require_nonzero(x)?;
    let dx = x.derivative();
    Ok(
        4.0 * x.inner(xi) * dx.norm_sq() + 4.0 * n * dx.inner(&xi.derivative())
            - 2.0 * x.inner(xi) / n.powi(2),
    )
}

/// Gradient in the loop metric, `grad B(x) = -x'' + alpha x`; pairing it
/// with `<.,.>_x` reproduces `diff_b`.
pub fn grad_b(x: &TrigPoly) -> Result<TrigPoly> {
    let alpha = alpha_coeff(x)?;
    Ok(&(-&x.second_derivative()) + &x.scaled(alpha))
}

/// The circle of critical loops at mode `k`, shifted by `sigma`.
pub fn critical_loop_shifted(k: usize, sigma: f64) -> Result<TrigPoly> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    Ok(TrigPoly::cosine(k, amplitude(k)).shift(sigma))
}

/// The critical point `x_k = c_k cos(2 pi k tau)` with its attached data.
pub fn critical_point(k: usize) -> Result<LagCritical> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    let c_k = amplitude(k);
    let x = TrigPoly::cosine(k, c_k);
    let w = 2.0 * PI * k as f64;
    Ok(LagCritical {
        k,
        c_k,
        x,
        alpha: -w * w,
        norm_x_sq: c_k * c_k / 2.0,
        norm_dx_sq: w * w * c_k * c_k / 2.0,
    })
}

/// Closed-form critical value `B(x_k) = 3 * 2^(1/3) (pi k)^(2/3)`.
pub fn critical_value(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    Ok(3.0 * 2.0f64.powf(1.0 / 3.0) * (PI * k as f64).powf(2.0 / 3.0))
}

/// Hessian operator at `x_k` applied to a loop:
/// `A xi = -xi'' - (2 pi k)^2 xi + 12 (2 pi k)^2 xi_k cos(2 pi k tau)`
/// where `xi_k` is the cos-mode-k coefficient of `xi`.
pub fn hessian_apply(cp: &LagCritical, xi: &TrigPoly) -> TrigPoly {
    let w2 = (2.0 * PI * cp.k as f64).powi(2);
    let local = &(-&xi.second_derivative()) + &xi.scaled(-w2);
    &local + &TrigPoly::cosine(cp.k, 12.0 * w2 * xi.cos_coeff(cp.k))
}

/// Tolerance for classifying numeric Hessian eigenvalues as zero;
/// scale-relative because the spectrum grows like `k^2`.
pub fn tol_zero(k: usize) -> f64 {
    1e-9 * (2.0 * PI * k as f64).powi(2)
}

/// Closed-form spectrum of the Hessian at `x_k`, ascending:
/// `mu_n = 4 pi^2 (n^2 - k^2)` with multiplicity 2 for `n != k`, plus the
/// simple eigenvalues `mu_0 = -4 pi^2 k^2`, `mu_k = 0`, and
/// `mu_hat_k = 12 (2 pi k)^2`.
pub fn lag_spectrum(k: usize, n_max: usize) -> Result<Vec<SpectrumEntry>> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    if n_max < k {
        return Err(Error::BadRange {
            reason: format!("n_max = {n_max} < k = {k}"),
        });
    }
    let kf = k as f64;
    let mut entries = Vec::new();
    entries.push(SpectrumEntry {
        lambda: -4.0 * PI * PI * kf * kf,
        multiplicity: 1,
        winding: None,
        family: "mu_0".into(),
        mode: Some(0),
        eigenvectors: vec![(TrigPoly::constant(1.0), TrigPoly::zero())],
    });
    entries.push(SpectrumEntry {
        lambda: 0.0,
        multiplicity: 1,
        winding: None,
        family: "mu_k".into(),
        mode: Some(k),
        eigenvectors: vec![(TrigPoly::sine(k, 1.0), TrigPoly::zero())],
    });
    entries.push(SpectrumEntry {
        lambda: 12.0 * (2.0 * PI * kf).powi(2),
        multiplicity: 1,
        winding: None,
        family: "mu_hat_k".into(),
        mode: Some(k),
        eigenvectors: vec![(TrigPoly::cosine(k, 1.0), TrigPoly::zero())],
    });
    for n in 1..=n_max {
        if n == k {
            continue;
        }
        let nf = n as f64;
        entries.push(SpectrumEntry {
            lambda: 4.0 * PI * PI * (nf * nf - kf * kf),
            multiplicity: 2,
            winding: None,
            family: "mu_n".into(),
            mode: Some(n),
            eigenvectors: vec![
                (TrigPoly::cosine(n, 1.0), TrigPoly::zero()),
                (TrigPoly::sine(n, 1.0), TrigPoly::zero()),
            ],
        });
    }
    entries.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    Ok(entries)
}

/// Dense Galerkin matrix of the Hessian at `x_k` in the orthonormal trig
/// basis of dimension `2N+1`, assembled by applying the operator to every
/// basis element. Returns the matrix and its symmetry defect.
pub fn lag_hessian_matrix(k: usize, n_modes: usize) -> Result<(DenseSymmetric, f64)> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    if n_modes < k {
        return Err(Error::TruncationTooSmall {
            n: n_modes,
            need: k,
        });
    }
    let cp = critical_point(k)?;
    Ok(assemble_scalar_operator(n_modes, |xi| {
        hessian_apply(&cp, xi)
    }))
}

/// How the Morse index is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorseMode {
    ClosedForm,
    /// Assemble the truncated Hessian and count eigenvalues below
    /// `-tol_zero(k)`.
    Numeric {
        n_modes: usize,
    },
}

/// Morse index of `x_k`; the closed form is `2k - 1`, the numeric route
/// counts negative eigenvalues of the truncated Hessian.
pub fn morse_index(k: usize, mode: MorseMode) -> Result<usize> {
    if k < 1 {
        return Err(Error::BadMode { k: k as i64 });
    }
    match mode {
        MorseMode::ClosedForm => Ok(2 * k - 1),
        MorseMode::Numeric { n_modes } => {
            if n_modes < 2 * k {
                return Err(Error::TruncationTooSmall {
                    n: n_modes,
                    need: 2 * k,
                });
            }
            let (m, _) = lag_hessian_matrix(k, n_modes)?;
            let eig = eigensolve(&m)?;
            let tol = tol_zero(k);
            Ok(eig.values.iter().filter(|&&v| v < -tol).count())
        }
    }
}

/// Numeric spectrum of the truncated Hessian at `x_k`, clustered with the
/// shared tolerance.
pub fn lag_spectrum_numeric(k: usize, n_modes: usize) -> Result<Vec<(f64, usize)>> {
    let (m, _) = lag_hessian_matrix(k, n_modes)?;
    let eig = eigensolve(&m)?;
    let tol = cluster_tol(eig.values.last().copied().unwrap_or(1.0));
    Ok(cluster(&eig.values, tol)
        .into_iter()
        .map(|c| (c.value, c.multiplicity))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::weighted_inner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn random_loop(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> TrigPoly {
        let mut cos = Vec::with_capacity(n);
        let mut sin = Vec::with_capacity(n);
        for m in 1..=n {
            let damp = scale / (1.0 + (m * m) as f64);
            cos.push(rng.random_range(-damp..damp));
            sin.push(rng.random_range(-damp..damp));
        }
        TrigPoly::new(rng.random_range(-scale..scale), cos, sin)
    }

    #[test]
    fn action_examples() {
        assert!(rel(action_b(&TrigPoly::constant(1.0)).unwrap(), 1.0) < 1e-15);

        let cp = critical_point(1).unwrap();
        let closed = 3.0 * 2.0f64.powf(1.0 / 3.0) * PI.powf(2.0 / 3.0);
        assert!(rel(action_b(&cp.x).unwrap(), closed) < 1e-14);
        assert!((closed - 8.10767).abs() < 1e-4);

        // scaling identity B(r x0) = 2 r^4 ||x0||^2 ||x0'||^2 + 1/(r^2 ||x0||^2)
        let x0 = TrigPoly::new(0.5, vec![0.3, -0.2], vec![0.1, 0.4]);
        let r: f64 = 1.7;
        let direct = 2.0 * r.powi(4) * x0.norm_sq() * x0.derivative().norm_sq()
            + 1.0 / (r * r * x0.norm_sq());
        assert!(rel(action_b(&x0.scaled(r)).unwrap(), direct) < 1e-13);

        assert_eq!(action_b(&TrigPoly::zero()), Err(Error::ZeroLoop));
    }

    #[test]
    fn alpha_examples() {
        for k in 1..=4 {
            let cp = critical_point(k).unwrap();
            let w2 = (2.0 * PI * k as f64).powi(2);
            assert!(rel(alpha_coeff(&cp.x).unwrap(), -w2) < 1e-12);
            // both closed forms agree: -(2 pi k)^2 = -2/c_k^6
            assert!(rel(-2.0 / cp.c_k.powi(6), -w2) < 1e-10);
        }
        assert!(rel(alpha_coeff(&TrigPoly::constant(1.0)).unwrap(), -0.5) < 1e-15);

        let x = critical_point(1).unwrap().x.scaled(2.0);
        let n = x.norm_sq();
        let expected = x.derivative().norm_sq() / n - 1.0 / (2.0 * n.powi(3));
        assert!(rel(alpha_coeff(&x).unwrap(), expected) < 1e-14);
    }

    #[test]
    fn diff_vanishes_at_critical_points() {
        for k in [1, 2, 3] {
            let cp = critical_point(k).unwrap();
            for xi in [
                TrigPoly::constant(1.0),
                TrigPoly::cosine(1, 1.0),
                TrigPoly::sine(k, 1.0),
                TrigPoly::cosine(k, 1.0),
            ] {
                assert!(diff_b(&cp.x, &xi).unwrap().abs() < 1e-12);
            }
        }
        let one = TrigPoly::constant(1.0);
        assert!(rel(diff_b(&one, &one).unwrap(), -2.0) < 1e-15);
    }

    #[test]
    fn diff_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..20 {
            let x = random_loop(&mut rng, 5, 1.0);
            if x.norm_sq() < 0.05 {
                continue;
            }
            let xi = random_loop(&mut rng, 5, 1.0);
            let fd = (action_b(&(&x + &xi.scaled(h))).unwrap()
                - action_b(&(&x - &xi.scaled(h))).unwrap())
                / (2.0 * h);
            let exact = diff_b(&x, &xi).unwrap();
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "fd {fd} vs exact {exact}"
            );
        }
    }

    #[test]
    fn gradient_examples() {
        let cp = critical_point(2).unwrap();
        assert!(grad_b(&cp.x).unwrap().max_coeff() < 1e-12);

        let g = grad_b(&TrigPoly::constant(1.0)).unwrap();
        assert!(rel(g.constant_coeff(), -0.5) < 1e-15);
        assert_eq!(g.degree(), 0);

        // duality: <grad B(x), xi>_x = dB(x) xi
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let x = random_loop(&mut rng, 4, 1.0);
            if x.norm_sq() < 0.05 {
                continue;
            }
            let xi = random_loop(&mut rng, 4, 1.0);
            let lhs = weighted_inner(&x, &grad_b(&x).unwrap(), &xi).unwrap();
            let rhs = diff_b(&x, &xi).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn critical_point_data() {
        let cp = critical_point(1).unwrap();
        // independent oracle: bisect 1/c^6 = 2 pi^2 for c
        let target = 2.0 * PI * PI;
        let (mut lo, mut hi) = (0.1f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 1.0 / mid.powi(6) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((cp.c_k - lo).abs() < 1e-12);
        assert!(cp.c_k > 0.0 && cp.c_k < 1.0);
        assert!(rel(cp.alpha, -4.0 * PI * PI) < 1e-15);
        for k in 1..=10 {
            let cp = critical_point(k).unwrap();
            assert!(rel(1.0 / cp.c_k.powi(6), 2.0 * (PI * k as f64).powi(2)) < 1e-12);
            // vanishes to 1e-12 relative to the operator scale (2 pi k)^2
            let scale = (2.0 * PI * k as f64).powi(2).max(1.0);
            assert!(grad_b(&cp.x).unwrap().max_coeff() <= 1e-12 * scale);
            assert!(rel(cp.norm_x_sq, cp.x.norm_sq()) < 1e-15);
            assert!(rel(cp.norm_dx_sq, cp.x.derivative().norm_sq()) < 1e-14);
        }
        assert_eq!(critical_point(0).err(), Some(Error::BadMode { k: 0 }));
    }

    #[test]
    fn critical_values() {
        for k in 1..=10 {
            let v = critical_value(k).unwrap();
            assert!(rel(action_b(&critical_point(k).unwrap().x).unwrap(), v) < 1e-12);
            assert!(rel(v / critical_value(1).unwrap(), (k as f64).powf(2.0 / 3.0)) < 1e-13);
        }
        assert!((critical_value(1).unwrap() - 8.10767).abs() < 1e-4);
    }

    #[test]
    fn hessian_eigendirections() {
        for k in [1, 3] {
            let cp = critical_point(k).unwrap();
            let w2 = (2.0 * PI * k as f64).powi(2);

            let a_cos = hessian_apply(&cp, &TrigPoly::cosine(k, 1.0));
            assert!(rel(a_cos.cos_coeff(k), 12.0 * w2) < 1e-14);
            assert!((&a_cos - &TrigPoly::cosine(k, 12.0 * w2)).max_coeff() < 1e-10);

            let a_sin = hessian_apply(&cp, &TrigPoly::sine(k, 1.0));
            assert!(a_sin.max_coeff() < 1e-10);

            let a_one = hessian_apply(&cp, &TrigPoly::constant(1.0));
            assert!(rel(a_one.constant_coeff(), -w2) < 1e-15);
        }
    }

    #[test]
    fn hessian_is_symmetric_in_weighted_metric() {
        // all basis directions of mode <= 4k, for every k up to 10
        for k in 1..=10 {
            let cp = critical_point(k).unwrap();
            let dim = 2 * (4 * k) + 1;
            let images: Vec<TrigPoly> = (0..dim)
                .map(|i| hessian_apply(&cp, &crate::spectral::scalar_basis_element(i)))
                .collect();
            let scale = 4.0 * cp.norm_x_sq;
            for i in 0..dim {
                let ei = crate::spectral::scalar_basis_element(i);
                for j in i..dim {
                    let ej = crate::spectral::scalar_basis_element(j);
                    let a = scale * images[i].inner(&ej);
                    let b = scale * images[j].inner(&ei);
                    assert!(
                        (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                        "k = {k}, slots ({i}, {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn shift_invariance_of_critical_circle() {
        let scale = (4.0 * PI).powi(2);
        for sigma in [0.0, 0.13, 0.5, 0.77] {
            let x = critical_loop_shifted(2, sigma).unwrap();
            assert!(grad_b(&x).unwrap().max_coeff() < 1e-12 * scale);
        }
    }

    #[test]
    fn spectrum_example_k1() {
        let entries = lag_spectrum(1, 3).unwrap();
        let p2 = PI * PI;
        let expect = [
            (-4.0 * p2, 1, "mu_0"),
            (0.0, 1, "mu_k"),
            (12.0 * p2, 2, "mu_n"),
            (32.0 * p2, 2, "mu_n"),
            (48.0 * p2, 1, "mu_hat_k"),
        ];
        assert_eq!(entries.len(), expect.len());
        for (e, (lam, mult, fam)) in entries.iter().zip(expect) {
            assert!((e.lambda - lam).abs() < 1e-12 * lam.abs().max(1.0));
            assert_eq!(e.multiplicity, mult);
            assert_eq!(e.family, fam);
        }
    }

    #[test]
    fn mu_hat_never_collides() {
        // 13 k^2 = n^2 has no integer solutions
        for k in 1..=10usize {
            let hat = 48.0 * PI * PI * (k * k) as f64;
            for n in 0..=40usize {
                let mu = 4.0 * PI * PI * ((n * n) as f64 - (k * k) as f64);
                assert!((hat - mu).abs() > 1.0);
            }
        }
    }

    #[test]
    fn negative_count_k2() {
        let entries = lag_spectrum(2, 6).unwrap();
        let neg: usize = entries
            .iter()
            .filter(|e| e.lambda < 0.0)
            .map(|e| e.multiplicity)
            .sum();
        assert_eq!(neg, 3);
    }

    #[test]
    fn morse_index_closed_and_numeric_agree() {
        for k in 1..=10 {
            let closed = morse_index(k, MorseMode::ClosedForm).unwrap();
            assert_eq!(closed, 2 * k - 1);
            assert_eq!(closed % 2, 1);
            assert!(closed >= 1);
            let numeric = morse_index(k, MorseMode::Numeric { n_modes: 4 * k }).unwrap();
            assert_eq!(numeric, closed, "k = {k}");
        }
        assert!(matches!(
            morse_index(3, MorseMode::Numeric { n_modes: 5 }),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn numeric_spectrum_multiplicities_k1() {
        let clusters = lag_spectrum_numeric(1, 6).unwrap();
        let closed = lag_spectrum(1, 6).unwrap();
        assert_eq!(clusters.len(), closed.len());
        for ((got, mult), want) in clusters.iter().zip(&closed) {
            assert!((got - want.lambda).abs() <= 1e-9 * want.lambda.abs().max(1.0));
            assert_eq!(*mult, want.multiplicity);
        }
    }

    #[test]
    fn second_difference_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = 1e-3;
        for k in [1, 2] {
            let cp = critical_point(k).unwrap();
            for _ in 0..5 {
                let xi = random_loop(&mut rng, 3 * k, 1.0);
                let b0 = action_b(&cp.x).unwrap();
                let bp = action_b(&(&cp.x + &xi.scaled(h))).unwrap();
                let bm = action_b(&(&cp.x - &xi.scaled(h))).unwrap();
                let fd = (bp - 2.0 * b0 + bm) / (h * h);
                let quad = weighted_inner(&cp.x, &hessian_apply(&cp, &xi), &xi).unwrap();
                assert!(
                    (fd - quad).abs() <= 1e-4 * quad.abs().max(1.0),
                    "fd {fd} vs quadratic form {quad}"
                );
            }
        }
    }
}
