//! The acceptance checklist: every end-to-end claim the library makes,
//! runnable from the CLI (`regfall verify`) and from the integration test
//! suite. Each criterion reports one pass/fail line; tolerances are pinned
//! here.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cz_local::{
    default_window, shooting_eigenvalues, spectrum_with_winding, Sym2, SymmetricPath,
};
use crate::fourier::TrigPoly;
use crate::hamiltonian::{
    action_ah, critical_point_ham, cz_index, diff_ah, disjointness_gap, domination_gap,
    ham_spectrum_closed, ham_spectrum_numeric, lambda_hat, lambda_n, legendre_fiber, PhaseLoop,
};
use crate::lagrangian::{
    action_b, critical_point, critical_value, diff_b, lag_spectrum, morse_index, MorseMode,
};
use crate::regularization::{
    energy_drift, inverse_q_from_orbit, inverse_q_from_poly, mean_inverse_check, physical_residual,
    rescale_square,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Spectra,
    Regularization,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        match name {
            "core" => Some(Suite::Core),
            "spectra" => Some(Suite::Spectra),
            "regularization" => Some(Suite::Regularization),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    fn criteria(self) -> Vec<usize> {
        match self {
            Suite::Core => vec![2, 5, 6, 7],
            Suite::Spectra => vec![1, 3, 4, 9, 10, 11],
            Suite::Regularization => vec![8],
            Suite::All => (1..=11).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "[{tag}] criterion {:2} ({}): {}",
            self.id, self.label, self.detail
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub kmax: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            kmax: 5,
            seed: 7,
            threads: 1,
        }
    }
}

pub fn random_loop(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> TrigPoly {
    let mut cos = Vec::with_capacity(n);
    let mut sin = Vec::with_capacity(n);
    for m in 1..=n {
        let damp = scale / (1.0 + (m * m) as f64);
        cos.push(rng.random_range(-damp..damp));
        sin.push(rng.random_range(-damp..damp));
    }
    TrigPoly::new(rng.random_range(-scale..scale), cos, sin)
}

pub fn random_nonzero_loop(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> TrigPoly {
    loop {
        let f = random_loop(rng, n, scale);
        if f.norm_sq() >= 0.05 {
            return f;
        }
    }
}

pub fn random_positive_loop(rng: &mut ChaCha8Rng, n: usize) -> TrigPoly {
    loop {
        let f = random_loop(rng, n, 0.5);
        let g = &TrigPoly::constant(1.0) + &f;
        let min = (0..256)
            .map(|j| g.eval(j as f64 / 256.0))
            .fold(f64::INFINITY, f64::min);
        if min > 0.2 {
            return g;
        }
    }
}

fn random_smooth_path(rng: &mut ChaCha8Rng, grid: usize, scale: f64) -> SymmetricPath {
    let mut coef = |_: ()| {
        (
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    };
    let (a0, a1, a2) = coef(());
    let (b0, b1, b2) = coef(());
    let (d0, d1, d2) = coef(());
    SymmetricPath::from_fn(
        |t| {
            let w = 2.0 * PI * t;
            Sym2 {
                s11: a0 + a1 * w.cos() + a2 * (2.0 * w).sin(),
                s12: b0 + b1 * w.sin() + b2 * (2.0 * w).cos(),
                s22: d0 + d1 * w.cos() + d2 * (2.0 * w).sin(),
            }
        },
        grid,
    )
    .expect("grid size is fixed and valid")
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

fn result(
    id: usize,
    label: &'static str,
    outcome: std::result::Result<String, String>,
) -> CriterionResult {
    match outcome {
        Ok(detail) => CriterionResult {
            id,
            label,
            passed: true,
            detail,
        },
        Err(detail) => CriterionResult {
            id,
            label,
            passed: false,
            detail,
        },
    }
}

/// 1. Numeric Morse index (N = 4k) equals the clockwise Conley-Zehnder
///    index equals `2k - 1`, as integers.
fn criterion_1(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        for k in 1..=cfg.kmax {
            let numeric = morse_index(k, MorseMode::Numeric { n_modes: 4 * k })
                .map_err(|e| format!("k = {k}: {e}"))?;
            let report = cz_index(k).map_err(|e| format!("k = {k}: {e}"))?;
            let want = 2 * k - 1;
            if numeric != want || report.cz_can != want as i64 || report.morse != want as i64 {
                return Err(format!(
                    "k = {k}: morse_numeric {numeric}, cz_can {}, want {want}",
                    report.cz_can
                ));
            }
        }
        Ok(format!("morse = cz_can = 2k-1 for k = 1..{}", cfg.kmax))
    };
    result(1, "index theorem", run())
}

/// 2. `B(x_k)` matches `3 * 2^(1/3) (pi k)^(2/3)` to 1e-12 relative.
fn criterion_2(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let mut worst = 0.0f64;
        for k in 1..=cfg.kmax {
            let got = action_b(&critical_point(k).map_err(|e| e.to_string())?.x)
                .map_err(|e| e.to_string())?;
            let want = critical_value(k).map_err(|e| e.to_string())?;
            let err = (got - want).abs() / want;
            worst = worst.max(err);
            if err > 1e-12 {
                return Err(format!("k = {k}: relative error {err:e}"));
            }
        }
        Ok(format!(
            "max relative error {worst:.2e} over k = 1..{}",
            cfg.kmax
        ))
    };
    result(2, "critical values", run())
}

/// 3. Numeric Lagrangian Hessian spectrum (N = 4k) reproduces the closed
///    eigenvalue families with the right multiplicities to 1e-9 relative.
fn criterion_3(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        for k in 1..=cfg.kmax {
            let clusters =
                crate::lagrangian::lag_spectrum_numeric(k, 4 * k).map_err(|e| e.to_string())?;
            let closed = lag_spectrum(k, 2 * k).map_err(|e| e.to_string())?;
            for want in &closed {
                let hit = clusters
                    .iter()
                    .find(|(v, _)| (v - want.lambda).abs() <= 1e-9 * want.lambda.abs().max(1.0))
                    .ok_or_else(|| {
                        format!(
                            "k = {k}: no numeric cluster near {} ({})",
                            want.lambda, want.family
                        )
                    })?;
                if hit.1 != want.multiplicity {
                    return Err(format!(
                        "k = {k}: multiplicity {} at {} ({}), want {}",
                        hit.1, want.lambda, want.family, want.multiplicity
                    ));
                }
            }
        }
        Ok(format!(
            "families mu_0/mu_k/mu_hat_k/mu_n verified for k = 1..{}",
            cfg.kmax
        ))
    };
    result(3, "Lagrangian spectrum", run())
}

/// 4. Numeric Hamiltonian Hessian spectrum matches both closed quadratic
///    families to 1e-9 relative, with eigenvector windings `+-n`, `+-k`,
///    and the kernel eigenvalue carrying winding `-k`.
fn criterion_4(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let k_hi = cfg.kmax.min(5);
        for k in 1..=k_hi {
            let n_modes = 4 * k;
            let numeric = ham_spectrum_numeric(k, n_modes).map_err(|e| e.to_string())?;
            let closed = ham_spectrum_closed(k, n_modes).map_err(|e| e.to_string())?;
            if numeric.len() != closed.len() {
                return Err(format!(
                    "k = {k}: {} numeric clusters vs {} closed entries",
                    numeric.len(),
                    closed.len()
                ));
            }
            let mut saw_kernel = false;
            for (num, want) in numeric.iter().zip(&closed) {
                if (num.lambda - want.lambda).abs() > 1e-9 * want.lambda.abs().max(1.0) {
                    return Err(format!(
                        "k = {k}: eigenvalue {} vs closed {} ({})",
                        num.lambda, want.lambda, want.family
                    ));
                }
                if num.multiplicity != want.multiplicity || num.winding != want.winding.unwrap() {
                    return Err(format!(
                        "k = {k}: (mult, winding) = ({}, {}) at {}, want ({}, {})",
                        num.multiplicity,
                        num.winding,
                        want.lambda,
                        want.multiplicity,
                        want.winding.unwrap()
                    ));
                }
                if want.lambda == 0.0 {
                    saw_kernel = num.winding == -(k as i64);
                }
            }
            if !saw_kernel {
                return Err(format!(
                    "k = {k}: kernel eigenvalue with winding -k not found"
                ));
            }
        }
        Ok(format!(
            "eigenvalues and windings verified for k = 1..{k_hi}, N = 4k"
        ))
    };
    result(4, "Hamiltonian spectrum", run())
}

/// 5. `||x_k||^2 = (4 pi k)^(-2/3)` and `||y_k||^2 = 4` to 1e-12 relative.
fn criterion_5(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let mut worst = 0.0f64;
        for k in 1..=cfg.kmax {
            let cp = critical_point_ham(k).map_err(|e| e.to_string())?;
            let want_x = (4.0 * PI * k as f64).powf(-2.0 / 3.0);
            let ex = (cp.x.norm_sq() - want_x).abs() / want_x;
            let ey = (cp.y.norm_sq() - 4.0).abs() / 4.0;
            worst = worst.max(ex).max(ey);
            if ex > 1e-12 || ey > 1e-12 {
                return Err(format!("k = {k}: errors {ex:e}, {ey:e}"));
            }
        }
        Ok(format!(
            "max relative error {worst:.2e} over k = 1..{}",
            cfg.kmax
        ))
    };
    result(5, "norm identities", run())
}

/// 6. Central finite differences reproduce both differentials on 50 random
///    inputs to 1e-6 relative at h = 1e-5.
fn criterion_6(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let h = 1e-5;
        let mut worst = 0.0f64;
        for trial in 0..50 {
            let x = random_nonzero_loop(&mut rng, 5, 1.0);
            let xi = random_loop(&mut rng, 5, 1.0);
            let fd = (action_b(&(&x + &xi.scaled(h))).map_err(|e| e.to_string())?
                - action_b(&(&x - &xi.scaled(h))).map_err(|e| e.to_string())?)
                / (2.0 * h);
            let exact = diff_b(&x, &xi).map_err(|e| e.to_string())?;
            let err = rel_err(fd, exact);
            worst = worst.max(err);
            if err > 1e-6 {
                return Err(format!("diff_b trial {trial}: relative error {err:e}"));
            }

            let y = random_loop(&mut rng, 5, 1.0);
            let eta = random_loop(&mut rng, 5, 1.0);
            let plus = PhaseLoop {
                x: &x + &xi.scaled(h),
                y: &y + &eta.scaled(h),
            };
            let minus = PhaseLoop {
                x: &x - &xi.scaled(h),
                y: &y - &eta.scaled(h),
            };
            let fd = (action_ah(&plus).map_err(|e| e.to_string())?
                - action_ah(&minus).map_err(|e| e.to_string())?)
                / (2.0 * h);
            let exact = diff_ah(&PhaseLoop { x, y }, &xi, &eta).map_err(|e| e.to_string())?;
            let err = rel_err(fd, exact);
            worst = worst.max(err);
            if err > 1e-6 {
                return Err(format!("diff_ah trial {trial}: relative error {err:e}"));
            }
        }
        Ok(format!("50 trials each, max relative error {worst:.2e}"))
    };
    result(6, "gradient checks", run())
}

/// 7. `B(x) = A(x,y) + gap(x,y)` on 100 random pairs to 1e-10 relative,
///    and the gap vanishes on the fiberwise transform.
fn criterion_7(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
        let mut worst = 0.0f64;
        for trial in 0..100 {
            let x = random_nonzero_loop(&mut rng, 5, 1.0);
            let y = random_loop(&mut rng, 5, 1.0);
            let p = PhaseLoop { x: x.clone(), y };
            let lhs = action_b(&x).map_err(|e| e.to_string())?;
            let rhs = action_ah(&p).map_err(|e| e.to_string())?
                + domination_gap(&p).map_err(|e| e.to_string())?;
            let err = (lhs - rhs).abs() / lhs.abs().max(1.0);
            worst = worst.max(err);
            if err > 1e-10 {
                return Err(format!("trial {trial}: relative error {err:e}"));
            }
            let fiber = PhaseLoop {
                x: x.clone(),
                y: legendre_fiber(&x).map_err(|e| e.to_string())?,
            };
            let gap = domination_gap(&fiber).map_err(|e| e.to_string())?;
            if gap.abs() > 1e-12 {
                return Err(format!("trial {trial}: gap at (x, y_x) is {gap:e}"));
            }
        }
        Ok(format!(
            "100 pairs, max relative error {worst:.2e}; gap = 0 on the fiber"
        ))
    };
    result(7, "domination identity", run())
}

/// 8. The rescale-square bijection round-trips on positive loops, the mean
///    inverse identity holds, and critical orbits solve the free-fall
///    equation with constant energy away from collisions.
fn criterion_8(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
        for trial in 0..10 {
            // Q then R
            let q = random_positive_loop(&mut rng, 3);
            let x = inverse_q_from_poly(&q, 24).map_err(|e| e.to_string())?;
            let orbit = rescale_square(&x, 512).map_err(|e| e.to_string())?;
            let err = orbit
                .q
                .iter()
                .enumerate()
                .map(|(j, qv)| (qv - q.eval(j as f64 / 512.0)).abs())
                .fold(0.0f64, f64::max);
            if err > 1e-6 {
                return Err(format!("trial {trial}: R(Q(q)) error {err:e}"));
            }
            // R then Q
            let x = random_positive_loop(&mut rng, 3);
            let orbit = rescale_square(&x, 1024).map_err(|e| e.to_string())?;
            let back = inverse_q_from_orbit(&orbit, 16).map_err(|e| e.to_string())?;
            let err = (0..256)
                .map(|j| {
                    let t = j as f64 / 256.0;
                    (back.eval(t) - x.eval(t)).abs()
                })
                .fold(0.0f64, f64::max);
            if err > 1e-6 {
                return Err(format!("trial {trial}: Q(R(x)) error {err:e}"));
            }
            // mean inverse identity in t coordinates
            let report = mean_inverse_check(&x, 2048).map_err(|e| e.to_string())?;
            if report.discrepancy > 1e-6 {
                return Err(format!(
                    "trial {trial}: mean inverse discrepancy {:e}",
                    report.discrepancy
                ));
            }
        }
        let k_hi = cfg.kmax.min(5);
        for k in 1..=k_hi {
            let x = critical_point(k).map_err(|e| e.to_string())?.x;
            let res = physical_residual(&x, 0.05, 2000).map_err(|e| e.to_string())?;
            if res > 1e-6 {
                return Err(format!("k = {k}: physical residual {res:e}"));
            }
            let drift = energy_drift(&x, 0.05, 2000).map_err(|e| e.to_string())?;
            if drift > 1e-6 {
                return Err(format!("k = {k}: energy drift {drift:e}"));
            }
        }
        Ok(format!(
            "bijection, mean inverse, residual and energy hold (k = 1..{k_hi})"
        ))
    };
    result(8, "regularization", run())
}

/// 9. The local module: exact spectrum for the zero path, winding
///    monotonicity on random paths, and agreement with the shooting
///    oracle to 1e-6 per eigenvalue.
fn criterion_9(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let n_modes = 12;
        // odd truncation keeps the checked eigenvalues 2 pi (N/2) strictly
        // inside the window
        let n_zero = 13;
        let zero = SymmetricPath::constant(Sym2 {
            s11: 0.0,
            s12: 0.0,
            s22: 0.0,
        });
        let window = (-PI * n_zero as f64, PI * n_zero as f64);
        let entries = spectrum_with_winding(&zero, n_zero, window).map_err(|e| e.to_string())?;
        for ell in -(n_zero as i64) / 2..=(n_zero as i64) / 2 {
            let want = 2.0 * PI * ell as f64;
            let hit = entries
                .iter()
                .find(|e| (e.lambda - want).abs() <= 1e-9 * want.abs().max(1.0))
                .ok_or_else(|| format!("zero path: no eigenvalue at 2 pi {ell}"))?;
            if hit.multiplicity != 2 || hit.winding != Some(ell) {
                return Err(format!(
                    "zero path: at 2 pi {ell} found (mult, winding) = ({}, {:?})",
                    hit.multiplicity, hit.winding
                ));
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
        for trial in 0..5 {
            let path = random_smooth_path(&mut rng, 33, 0.6);
            let entries = spectrum_with_winding(&path, n_modes, default_window(n_modes))
                .map_err(|e| e.to_string())?;
            for pair in entries.windows(2) {
                if pair[0].winding.unwrap() > pair[1].winding.unwrap() {
                    return Err(format!(
                        "trial {trial}: winding drops from {} to {} across {} < {}",
                        pair[0].winding.unwrap(),
                        pair[1].winding.unwrap(),
                        pair[0].lambda,
                        pair[1].lambda
                    ));
                }
            }
            let oracle_window = (-7.0, 7.0);
            let in_window =
                spectrum_with_winding(&path, n_modes, oracle_window).map_err(|e| e.to_string())?;
            let oracle = shooting_eigenvalues(&path, (-7.5, 7.5), 0.05, 2000);
            let galerkin_count: usize = in_window
                .iter()
                .filter(|e| e.lambda > -6.8 && e.lambda < 6.8)
                .map(|e| e.multiplicity)
                .sum();
            let oracle_count: usize = oracle
                .iter()
                .filter(|(l, _)| *l > -6.8 && *l < 6.8)
                .map(|(_, m)| m)
                .sum();
            if galerkin_count != oracle_count {
                return Err(format!(
                    "trial {trial}: {galerkin_count} Galerkin eigenvalues vs {oracle_count} shooting roots"
                ));
            }
            for e in &in_window {
                let nearest = oracle
                    .iter()
                    .map(|(l, _)| (l - e.lambda).abs())
                    .fold(f64::INFINITY, f64::min);
                if nearest > 1e-6 {
                    return Err(format!(
                        "trial {trial}: eigenvalue {} off the shooting oracle by {nearest:e}",
                        e.lambda
                    ));
                }
            }
        }
        Ok("zero-path table, monotonicity, and shooting agreement on 5 random paths".into())
    };
    result(9, "local CZ module", run())
}

/// 10. The hatted and plain eigenvalue families never intersect, and the
///     four eigenvalues at n = 3k interleave in the documented order.
fn criterion_10(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        let k_hi = cfg.kmax.min(5);
        let mut min_gap = f64::INFINITY;
        for k in 1..=k_hi {
            let gap = disjointness_gap(k, 10 * k).map_err(|e| e.to_string())?;
            min_gap = min_gap.min(gap);
            if gap <= 0.0 {
                return Err(format!("k = {k}: families intersect"));
            }
            let (hat_lo, hat_hi) = lambda_hat(k);
            let (lo3k, hi3k) = lambda_n(k, 3 * k);
            if !(hat_lo < lo3k && lo3k < hat_hi && hat_hi < hi3k) {
                return Err(format!("k = {k}: ordering at n = 3k violated"));
            }
        }
        Ok(format!(
            "min gap {min_gap:.3e} over k = 1..{k_hi}, n <= 10k; ordering holds"
        ))
    };
    result(10, "family disjointness", run())
}

/// 11. Branch monotonicity in n, and the Morse index is odd and never
///     zero (the action has no minimum).
fn criterion_11(cfg: VerifyConfig) -> CriterionResult {
    let run = || -> std::result::Result<String, String> {
        for k in 1..=cfg.kmax {
            let mut prev = lambda_n(k, 0);
            for n in 1..=(2 * k + 10) {
                let cur = lambda_n(k, n);
                if cur.0 >= prev.0 {
                    return Err(format!(
                        "k = {k}: lambda_n^- not strictly decreasing at n = {n}"
                    ));
                }
                if cur.1 <= prev.1 {
                    return Err(format!(
                        "k = {k}: lambda_n^+ not strictly increasing at n = {n}"
                    ));
                }
                prev = cur;
            }
            let morse = morse_index(k, MorseMode::ClosedForm).map_err(|e| e.to_string())?;
            if morse % 2 != 1 || morse < 1 {
                return Err(format!("k = {k}: morse index {morse}"));
            }
        }
        Ok(format!(
            "branches strictly monotone; index odd and >= 1 for k = 1..{}",
            cfg.kmax
        ))
    };
    result(11, "branch monotonicity and index parity", run())
}

fn run_criterion(id: usize, cfg: VerifyConfig) -> CriterionResult {
    match id {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        10 => criterion_10(cfg),
        11 => criterion_11(cfg),
        _ => unreachable!("criterion ids are 1..=11"),
    }
}

/// Runs the requested suite, spreading independent criteria over at most
/// `cfg.threads` workers, and returns results ordered by criterion id.
pub fn run_suite(suite: Suite, cfg: VerifyConfig) -> Vec<CriterionResult> {
    let ids = suite.criteria();
    let threads = cfg.threads.max(1).min(ids.len());
    if threads == 1 {
        return ids.into_iter().map(|id| run_criterion(id, cfg)).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<CriterionResult>>> =
        ids.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= ids.len() {
                    break;
                }
                let r = run_criterion(ids[i], cfg);
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });
    let mut out: Vec<CriterionResult> = results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("worker filled every slot"))
        .collect();
    out.sort_by_key(|r| r.id);
    out
}
