//! Time rescaling between regularized loops `x(tau)` and physical
//! trajectories `q(t)`.
//!
//! Classical time is `t_x(tau) = int_0^tau x^2 / ||x||^2`, a bijection of
//! `[0,1]` whose inverse is `tau_x`. The rescale-square map sends `x` to
//! `q_x = x^2 \circ tau_x`; on collision-free data its inverse is
//! `Q(q) = sqrt(q) \circ tau_{1/sqrt(q)}`. Critical loops of the action map
//! to trajectories solving `q'' = -1/q^2` away from the collision set.

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::lagrangian::{alpha_coeff, grad_b};

/// Loops with values below this floor count as touching zero.
pub const POS_FLOOR: f64 = 1e-9;

/// A sampled physical trajectory with its collision bookkeeping.
#[derive(Debug, Clone)]
pub struct PhysicalOrbit {
    /// Classical times `t_j = j/M`.
    pub grid: Vec<f64>,
    /// Positions `q(t_j) >= 0`, zero only inside collision neighbourhoods.
    pub q: Vec<f64>,
    /// Velocities; NaN where the trajectory touches zero.
    pub q_dot: Vec<f64>,
    /// Classical collision times, strictly increasing in `[0,1)`.
    pub collision_times: Vec<f64>,
    /// `||x||^2` of the generating loop.
    pub source_norm_sq: f64,
}

fn require_nonzero(x: &TrigPoly) -> Result<f64> {
    let n = x.norm_sq();
    if n == 0.0 {
        Err(Error::ZeroLoop)
    } else {
        Ok(n)
    }
}

/// `t_x(tau)`, computed exactly by integrating the trig polynomial `x^2`
/// coefficient-wise. Monotone non-decreasing with `t_x(0)=0, t_x(1)=1`.
pub fn classical_time(x: &TrigPoly, tau: f64) -> Result<f64> {
    let n = require_nonzero(x)?;
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::DomainError { value: tau });
    }
    Ok(x.mul(x).integral_from_zero(tau) / n)
}

/// Inverse of classical time by bisection; `t_x` is strictly increasing
/// because a nonzero trig polynomial has only isolated zeros.
pub fn inverse_time(x: &TrigPoly, t: f64) -> Result<f64> {
    let n = require_nonzero(x)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError { value: t });
    }
    let sq = x.mul(x);
    let f = |tau: f64| sq.integral_from_zero(tau) / n - t;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zeros of `x` in `[0,1)`, located by sign-change bracketing on a
/// `64 (N+1)` grid followed by bisection.
pub fn regularized_collision_times(x: &TrigPoly) -> Result<Vec<f64>> {
    require_nonzero(x)?;
    let m = 64 * (x.degree() + 1);
    let mut zeros = Vec::new();
    let mut prev = x.eval(0.0);
    for j in 1..=m {
        let tau = j as f64 / m as f64;
        let cur = x.eval(tau);
        if prev == 0.0 {
            zeros.push((j - 1) as f64 / m as f64);
        } else if prev * cur < 0.0 {
            let (mut lo, mut hi) = (((j - 1) as f64) / m as f64, tau);
            let flo = prev;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if x.eval(mid) * flo.signum() > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    zeros.retain(|&z| z < 1.0);
    Ok(zeros)
}

/// The rescale-square map `x -> x^2 \circ tau_x`, sampled on a uniform
/// grid of `m` classical times. Velocities use the chain-rule form
/// `2 ||x||^2 x'(tau) / x(tau)` and are NaN at collision samples.
pub fn rescale_square(x: &TrigPoly, m: usize) -> Result<PhysicalOrbit> {
    let n = require_nonzero(x)?;
    let dx = x.derivative();
    let taus_of_zeros = regularized_collision_times(x)?;
    let mut collision_times: Vec<f64> = taus_of_zeros
        .iter()
        .map(|&tau| classical_time(x, tau))
        .collect::<Result<_>>()?;
    collision_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    collision_times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut grid = Vec::with_capacity(m);
    let mut q = Vec::with_capacity(m);
    let mut q_dot = Vec::with_capacity(m);
    for j in 0..m {
        let t = j as f64 / m as f64;
        let tau = inverse_time(x, t)?;
        let xv = x.eval(tau);
        grid.push(t);
        q.push(xv * xv);
        if xv.abs() <= POS_FLOOR {
            q_dot.push(f64::NAN);
        } else {
            q_dot.push(2.0 * n * dx.eval(tau) / xv);
        }
    }
    Ok(PhysicalOrbit {
        grid,
        q,
        q_dot,
        collision_times,
        source_norm_sq: n,
    })
}

impl PhysicalOrbit {
    /// Trapezoidal (= mean, by periodicity) estimate of `int_0^1 dt/q`.
    pub fn mean_inverse_trapezoid(&self) -> f64 {
        let m = self.q.len() as f64;
        self.q
            .iter()
            .map(|&v| 1.0 / v.max(POS_FLOOR * POS_FLOOR))
            .sum::<f64>()
            / m
    }
}

/// Normalized cumulative integral of `1/q` used by the inverse map:
/// `F(tau) = int_0^tau 1/q / int_0^1 1/q`, with per-cell Gauss quadrature.
struct InverseCumulative {
    cells: Vec<f64>,
    total: f64,
    q: TrigPoly,
}

const GAUSS4_X: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GAUSS4_W: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

impl InverseCumulative {
    fn new(q: &TrigPoly, cells: usize) -> Self {
        let h = 1.0 / cells as f64;
        let mut acc = Vec::with_capacity(cells + 1);
        acc.push(0.0);
        let mut running = 0.0;
        for c in 0..cells {
            let a = c as f64 * h;
            running += gauss_cell(q, a, a + h);
            acc.push(running);
        }
        InverseCumulative {
            cells: acc,
            total: running,
            q: q.clone(),
        }
    }

    fn eval(&self, tau: f64) -> f64 {
        let n = self.cells.len() - 1;
        let h = 1.0 / n as f64;
        let c = ((tau / h) as usize).min(n - 1);
        let a = c as f64 * h;
        (self.cells[c] + gauss_cell(&self.q, a, tau)) / self.total
    }

    /// Solves `F(tau) = target` by cell lookup plus bisection.
    fn invert(&self, target: f64) -> f64 {
        let n = self.cells.len() - 1;
        let t = target.clamp(0.0, 1.0) * self.total;
        let mut lo_c = 0;
        let mut hi_c = n;
        while hi_c - lo_c > 1 {
            let mid = (lo_c + hi_c) / 2;
            if self.cells[mid] <= t {
                lo_c = mid;
            } else {
                hi_c = mid;
            }
        }
        let h = 1.0 / n as f64;
        let (mut lo, mut hi) = (lo_c as f64 * h, hi_c as f64 * h);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) * self.total <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn gauss_cell(q: &TrigPoly, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (xi, wi) in GAUSS4_X.iter().zip(GAUSS4_W) {
        acc += wi / q.eval(mid + half * xi);
    }
    acc * half
}

/// Inverse of the rescale-square map on strictly positive data:
/// `Q(q) = sqrt(q) \circ tau_{1/sqrt(q)}`, fitted back into a trig
/// polynomial of degree `n_out` through the discrete projection.
pub fn inverse_q_from_poly(q: &TrigPoly, n_out: usize) -> Result<TrigPoly> {
    let probe = 64 * (q.degree() + 1);
    let min_q = (0..probe)
        .map(|j| q.eval(j as f64 / probe as f64))
        .fold(f64::INFINITY, f64::min);
    if min_q <= POS_FLOOR {
        return Err(Error::CollisionPresent { min_value: min_q });
    }
    let cells = (64 * (q.degree() + 1)).max(2048);
    let cum = InverseCumulative::new(q, cells);
    let m = (2 * n_out + 1).max(4 * q.degree() + 9);
    let vals: Vec<f64> = (0..m)
        .map(|j| {
            let sigma = j as f64 / m as f64;
            let tau = cum.invert(sigma);
            q.eval(tau).max(0.0).sqrt()
        })
        .collect();
    TrigPoly::from_samples(&vals, n_out)
}

/// Same map starting from a sampled orbit; the samples are first projected
/// onto a trig polynomial, which is accurate because collision-free
/// trajectories of trig-polynomial loops are analytic.
pub fn inverse_q_from_orbit(orbit: &PhysicalOrbit, n_out: usize) -> Result<TrigPoly> {
    let min_q = orbit.q.iter().copied().fold(f64::INFINITY, f64::min);
    if min_q <= POS_FLOOR {
        return Err(Error::CollisionPresent { min_value: min_q });
    }
    let n_fit = ((orbit.q.len() - 1) / 2).min(64);
    let q_poly = TrigPoly::from_samples(&orbit.q, n_fit)?;
    inverse_q_from_poly(&q_poly, n_out)
}

/// Two routes to `int_0^1 dt / q_x`.
#[derive(Debug, Clone, Copy)]
pub struct MeanInverseReport {
    /// Value in tau coordinates, where the substitution collapses the
    /// integral to exactly `1 / ||x||^2`.
    pub tau_route: f64,
    /// Direct quadrature in t coordinates.
    pub t_route: f64,
    pub discrepancy: f64,
}

/// Checks the identity `int_0^1 dt/q_x = 1/||x||^2` along both routes.
pub fn mean_inverse_check(x: &TrigPoly, m: usize) -> Result<MeanInverseReport> {
    let n = require_nonzero(x)?;
    let tau_route = 1.0 / n;
    let orbit = rescale_square(x, m)?;
    let t_route = orbit.mean_inverse_trapezoid();
    Ok(MeanInverseReport {
        tau_route,
        t_route,
        discrepancy: (t_route - tau_route).abs(),
    })
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn require_critical(x: &TrigPoly) -> Result<()> {
    let g = grad_b(x)?;
    let scale = 1.0 + alpha_coeff(x)?.abs();
    let residual = g.norm();
    if residual > 1e-8 * scale {
        return Err(Error::NotCritical { residual });
    }
    Ok(())
}

/// Max of `|q'' + 1/q^2|` over grid points farther than `exclusion` from
/// every collision time. The second derivative comes from the analytic
/// chain rule `q'' = 2||x||^4 (x'' - x'^2/x) / x^3`; double finite
/// differencing is hopeless near collisions.
pub fn physical_residual(x: &TrigPoly, exclusion: f64, m: usize) -> Result<f64> {
    require_critical(x)?;
    let n = x.norm_sq();
    let dx = x.derivative();
    let ddx = x.second_derivative();
    let collisions: Vec<f64> = regularized_collision_times(x)?
        .into_iter()
        .map(|tau| classical_time(x, tau))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for j in 0..m {
        let t = j as f64 / m as f64;
        if collisions
            .iter()
            .any(|&tc| circular_distance(t, tc) <= exclusion)
        {
            continue;
        }
        let tau = inverse_time(x, t)?;
        let xv = x.eval(tau);
        let q = xv * xv;
        let qdd = 2.0 * n * n / xv.powi(3) * (ddx.eval(tau) - dx.eval(tau).powi(2) / xv);
        worst = worst.max((qdd + 1.0 / (q * q)).abs());
    }
    Ok(worst)
}

/// Relative drift of the energy `E = q'^2/2 - 1/q` over the grid points
/// away from collisions; `E` is a constant of motion between collisions.
pub fn energy_drift(x: &TrigPoly, exclusion: f64, m: usize) -> Result<f64> {
    require_critical(x)?;
    let n = x.norm_sq();
    let dx = x.derivative();
    let collisions: Vec<f64> = regularized_collision_times(x)?
        .into_iter()
        .map(|tau| classical_time(x, tau))
        .collect::<Result<_>>()?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..m {
        let t = j as f64 / m as f64;
        if collisions
            .iter()
            .any(|&tc| circular_distance(t, tc) <= exclusion)
        {
            continue;
        }
        let tau = inverse_time(x, t)?;
        let xv = x.eval(tau);
        let q = xv * xv;
        let qd = 2.0 * n * dx.eval(tau) / xv;
        let e = 0.5 * qd * qd - 1.0 / q;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    let scale = lo.abs().max(hi.abs()).max(1e-300);
    Ok((hi - lo) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::critical_point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn positive_loop(rng: &mut ChaCha8Rng, n: usize) -> TrigPoly {
        loop {
            let mut cos = Vec::new();
            let mut sin = Vec::new();
            for m in 1..=n {
                let damp = 0.5 / (1.0 + (m * m) as f64);
                cos.push(rng.random_range(-damp..damp));
                sin.push(rng.random_range(-damp..damp));
            }
            let f = TrigPoly::new(1.0, cos, sin);
            let min = (0..256)
                .map(|j| f.eval(j as f64 / 256.0))
                .fold(f64::INFINITY, f64::min);
            if min > 0.2 {
                return f;
            }
        }
    }

    #[test]
    fn classical_time_examples() {
        let one = TrigPoly::constant(1.0);
        for &tau in &[0.0, 0.3, 0.71, 1.0] {
            assert!((classical_time(&one, tau).unwrap() - tau).abs() < 1e-15);
        }
        let x = critical_point(1).unwrap().x;
        assert!(classical_time(&x, 0.0).unwrap().abs() < 1e-15);
        assert!((classical_time(&x, 1.0).unwrap() - 1.0).abs() < 1e-13);
        // scale invariance t_{rx} = t_x
        let rx = x.scaled(2.0);
        for j in 0..9 {
            let tau = j as f64 / 9.0;
            let a = classical_time(&x, tau).unwrap();
            let b = classical_time(&rx, tau).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        assert!(matches!(
            classical_time(&x, 1.5),
            Err(Error::DomainError { .. })
        ));
        // monotone non-decreasing on a grid
        let mut prev = 0.0;
        for j in 1..=64 {
            let t = classical_time(&x, j as f64 / 64.0).unwrap();
            assert!(t >= prev - 1e-15);
            prev = t;
        }
    }

    #[test]
    fn inverse_time_round_trip() {
        let one = TrigPoly::constant(1.0);
        assert!((inverse_time(&one, 0.3).unwrap() - 0.3).abs() < 1e-12);

        let x = critical_point(1).unwrap().x;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let tau = rng.random_range(0.0..1.0);
            let t = classical_time(&x, tau).unwrap();
            let back = inverse_time(&x, t).unwrap();
            assert!((back - tau).abs() < 1e-10, "tau {tau} back {back}");
        }
        // derivative of tau_x matches ||x||^2 / x(tau)^2 away from collisions
        let t = 0.11;
        let h = 1e-6;
        let fd = (inverse_time(&x, t + h).unwrap() - inverse_time(&x, t - h).unwrap()) / (2.0 * h);
        let tau = inverse_time(&x, t).unwrap();
        let exact = x.norm_sq() / x.eval(tau).powi(2);
        assert!((fd - exact).abs() <= 1e-6 * exact.abs());
    }

    #[test]
    fn rescale_examples() {
        let orbit = rescale_square(&TrigPoly::constant(1.0), 64).unwrap();
        assert!(orbit.collision_times.is_empty());
        for (q, qd) in orbit.q.iter().zip(&orbit.q_dot) {
            assert!((q - 1.0).abs() < 1e-13);
            assert!(qd.abs() < 1e-13);
        }

        let x = critical_point(1).unwrap().x;
        let orbit = rescale_square(&x, 256).unwrap();
        assert_eq!(orbit.collision_times.len(), 2);

        // ||q'||^2 = 4 ||x||^2 ||x'||^2 for positive loops
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = positive_loop(&mut rng, 3);
        let orbit = rescale_square(&f, 4096).unwrap();
        let disc = orbit.q_dot.iter().map(|v| v * v).sum::<f64>() / orbit.q_dot.len() as f64;
        let exact = 4.0 * f.norm_sq() * f.derivative().norm_sq();
        assert!(
            (disc - exact).abs() <= 1e-8 * exact.max(1.0),
            "{disc} vs {exact}"
        );
    }

    #[test]
    fn inverse_q_round_trips() {
        // q == 1 -> x == 1
        let x = inverse_q_from_poly(&TrigPoly::constant(1.0), 4).unwrap();
        assert!((x.constant_coeff() - 1.0).abs() < 1e-10);
        assert!((&x - &TrigPoly::constant(1.0)).max_coeff() < 1e-10);

        // Q(R(x)) = x for a positive loop
        let f = TrigPoly::new(1.0, vec![0.3], vec![]);
        let orbit = rescale_square(&f, 1024).unwrap();
        let back = inverse_q_from_orbit(&orbit, 8).unwrap();
        assert!((&back - &f).max_coeff() <= 1e-6);

        // R(Q(q)) = q and Q(R(x)) = x on random positive loops
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let q = positive_loop(&mut rng, 3);
            let xq = inverse_q_from_poly(&q, 24).unwrap();
            let orbit = rescale_square(&xq, 512).unwrap();
            for (j, qv) in orbit.q.iter().enumerate() {
                let t = j as f64 / 512.0;
                assert!(
                    (qv - q.eval(t)).abs() <= 1e-6,
                    "R(Q(q)) mismatch {}",
                    (qv - q.eval(t)).abs()
                );
            }

            let x = positive_loop(&mut rng, 3);
            let orbit = rescale_square(&x, 1024).unwrap();
            let back = inverse_q_from_orbit(&orbit, 3 + 12).unwrap();
            let diff = (0..256)
                .map(|j| (back.eval(j as f64 / 256.0) - x.eval(j as f64 / 256.0)).abs())
                .fold(0.0f64, f64::max);
            assert!(diff <= 1e-6, "Q(R(x)) mismatch {diff}");
        }

        let dip = TrigPoly::new(0.5, vec![0.6], vec![]);
        assert!(matches!(
            inverse_q_from_poly(&dip, 8),
            Err(Error::CollisionPresent { .. })
        ));
    }

    #[test]
    fn mean_inverse_examples() {
        let r = mean_inverse_check(&TrigPoly::constant(1.0), 256).unwrap();
        assert!((r.tau_route - 1.0).abs() < 1e-15);
        assert!((r.t_route - 1.0).abs() < 1e-12);

        let x = critical_point(1).unwrap().x;
        let r = mean_inverse_check(&x, 256).unwrap();
        let closed = (4.0 * std::f64::consts::PI).powf(2.0 / 3.0);
        assert!((r.tau_route - closed).abs() <= 1e-12 * closed);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let f = positive_loop(&mut rng, 3);
            let r = mean_inverse_check(&f, 2048).unwrap();
            assert!(r.discrepancy <= 1e-6, "discrepancy {}", r.discrepancy);
        }
    }

    #[test]
    fn physical_residual_and_energy() {
        for k in [1, 2] {
            let x = critical_point(k).unwrap().x;
            let res = physical_residual(&x, 0.05, 2000).unwrap();
            assert!(res <= 1e-6, "k = {k}: residual {res:e}");
            let drift = energy_drift(&x, 0.05, 2000).unwrap();
            assert!(drift <= 1e-6, "k = {k}: energy drift {drift:e}");
        }
        // a non-critical loop is rejected
        let bad = TrigPoly::new(1.0, vec![0.3], vec![]);
        assert!(matches!(
            physical_residual(&bad, 0.05, 100),
            Err(Error::NotCritical { .. })
        ));
    }

    #[test]
    fn velocity_blows_up_at_collisions() {
        let x = critical_point(1).unwrap().x;
        let n = x.norm_sq();
        let dx = x.derivative();
        let tc = classical_time(&x, 0.25).unwrap();
        let speeds: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|d| {
                let tau = inverse_time(&x, tc - d).unwrap();
                (2.0 * n * dx.eval(tau) / x.eval(tau)).abs()
            })
            .collect();
        assert!(speeds[0] < speeds[1] && speeds[1] < speeds[2], "{speeds:?}");
    }

    #[test]
    fn orbit_trapezoid_identity_collision_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let f = positive_loop(&mut rng, 2);
        let orbit = rescale_square(&f, 2048).unwrap();
        let lhs = orbit.mean_inverse_trapezoid();
        assert!((lhs - 1.0 / orbit.source_norm_sq).abs() <= 1e-6);
        // collision times strictly increasing in [0,1)
        let x = critical_point(3).unwrap().x;
        let orbit = rescale_square(&x, 128).unwrap();
        assert!(orbit.collision_times.windows(2).all(|w| w[0] < w[1]));
        assert!(orbit
            .collision_times
            .iter()
            .all(|&t| (0.0..1.0).contains(&t)));
        assert!(orbit.q.iter().all(|&v| v >= 0.0));
        // q vanishes only inside collision neighbourhoods
        for (j, &q) in orbit.q.iter().enumerate() {
            let t = j as f64 / 128.0;
            let near = orbit.collision_times.iter().any(|&tc| {
                let d = (t - tc).rem_euclid(1.0);
                d.min(1.0 - d) <= 0.05
            });
            if !near {
                assert!(q > 1e-3, "q = {q:e} away from collisions at t = {t}");
            }
        }
    }
}
