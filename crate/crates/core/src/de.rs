//! Density evolution and the closed-form predictions built on it.
//!
//! Profiles are passed as fractions `r[l]` = share of checks of degree `l`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance for scalar solves.
pub const TOL: f64 = 1e-9;
const MAX_BISECTION: usize = 200;

/// `R'(x) = sum_l l R_l x^(l-1)`.
pub fn r_prime(r: &[f64], x: f64) -> f64 {
    r.iter().enumerate().skip(1).map(|(l, &rl)| l as f64 * rl * x.powi(l as i32 - 1)).sum()
}

fn r_second(r: &[f64], x: f64) -> f64 {
    r.iter()
        .enumerate()
        .skip(2)
        .map(|(l, &rl)| (l * (l - 1)) as f64 * rl * x.powi(l as i32 - 2))
        .sum()
}

/// The `k`-regular profile.
pub fn regular(k: usize) -> Vec<f64> {
    let mut r = vec![0.0; k + 1];
    r[k] = 1.0;
    r
}

fn de_map(alpha: f64, r: &[f64], z: f64) -> f64 {
    1.0 - (-alpha * r_prime(r, z)).exp()
}

/// `z_0 = z0`, `z_t = 1 - exp(-alpha R'(z_{t-1}))`, stopping after `t_max`
/// steps or once successive values differ by less than `tol`.
pub fn de_sequence(alpha: f64, r: &[f64], z0: f64, t_max: usize, tol: f64) -> Vec<f64> {
    let mut z = vec![z0];
    for _ in 0..t_max {
        let prev = *z.last().expect("nonempty");
        let next = de_map(alpha, r, prev);
        z.push(next);
        if (next - prev).abs() < tol {
            break;
        }
    }
    z
}

/// Largest fixed point of the density-evolution map, reached by iterating
/// from 1 and polished with Newton steps. Returns `(Q, Q̂)` with
/// `Q̂ = R'(Q)/R'(1)`; `Q = 0` when the iteration dies out.
pub fn de_fixed_point(alpha: f64, r: &[f64]) -> (f64, f64) {
    let mut z = 1.0f64;
    for _ in 0..10_000_000 {
        let next = de_map(alpha, r, z);
        let done = (z - next).abs() < 1e-15;
        z = next;
        if done || z < 1e-12 {
            break;
        }
    }
    if z < 1e-9 {
        return (0.0, 0.0);
    }
    for _ in 0..50 {
        let e = (-alpha * r_prime(r, z)).exp();
        let h = z - 1.0 + e;
        let dh = 1.0 - alpha * r_second(r, z) * e;
        if dh.abs() < 1e-8 {
            break;
        }
        let next = z - h / dh;
        if !(0.0..=1.0).contains(&next) || (next - z).abs() > 1e-4 {
            break;
        }
        let done = (next - z).abs() < 1e-17;
        z = next;
        if done {
            break;
        }
    }
    (z, r_prime(r, z) / r_prime(r, 1.0))
}

/// `(Q, Q̂ = Q^(k-1))` for the `k`-regular profile.
pub fn fixed_point_q(alpha: f64, k: usize) -> (f64, f64) {
    de_fixed_point(alpha, &regular(k))
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidParameters(format!("need k >= 3, got {k}")));
    }
    Ok(())
}

/// `g(z) = z - 1 + exp(-k alpha z^(k-1))`.
fn gap(alpha: f64, k: usize, z: f64) -> f64 {
    z - 1.0 + (-(k as f64) * alpha * z.powi(k as i32 - 1)).exp()
}

/// Minimum of `gap` over (0, 1]: coarse grid, then golden-section search
/// around the best grid point.
fn min_gap(alpha: f64, k: usize) -> f64 {
    const N: usize = 4000;
    let (best, _) = (1..=N)
        .map(|i| (i, gap(alpha, k, i as f64 / N as f64)))
        .fold((1, f64::INFINITY), |acc, (i, g)| if g < acc.1 { (i, g) } else { acc });
    let mut lo = (best - 1) as f64 / N as f64;
    let mut hi = ((best + 1) as f64 / N as f64).min(1.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (gap(alpha, k, c), gap(alpha, k, d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = gap(alpha, k, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = gap(alpha, k, d);
        }
    }
    fc.min(fd).min(gap(alpha, k, best as f64 / N as f64))
}

/// Bisection on alpha for the boundary of "gap(z) > 0 on (0,1]".
fn bisect_threshold(tol: f64, below: impl Fn(f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while below(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..MAX_BISECTION {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Clustering threshold: the largest alpha with `z > 1 - exp(-k alpha
/// z^(k-1))` for every z in (0, 1).
pub fn alpha_d(k: usize, tol: f64) -> Result<f64> {
    check_k(k)?;
    Ok(bisect_threshold(tol, |a| min_gap(a, k) > 0.0))
}

/// Same threshold by brute force: uniform grid of step `dz`, bisection to
/// `tol`. Slow; used as a cross-check.
pub fn alpha_d_grid_scan(k: usize, dz: f64, tol: f64) -> Result<f64> {
    check_k(k)?;
    let steps = (1.0 / dz).round() as usize;
    Ok(bisect_threshold(tol, |a| {
        (1..=steps).all(|i| gap(a, k, i as f64 * dz) > 0.0)
    }))
}

/// Same threshold from the tangency condition: solve
/// `-(1-Q) ln(1-Q) = Q/(k-1)` for Q in (0,1), then
/// `alpha = -ln(1-Q) / (k Q^(k-1))`.
pub fn alpha_d_closed_form(k: usize) -> Result<f64> {
    check_k(k)?;
    let phi = |q: f64| -(1.0 - q) * (1.0 - q).ln() - q / (k as f64 - 1.0);
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-15);
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(-(1.0 - q).ln() / (k as f64 * q.powi(k as i32 - 1)))
}

/// `Q - k alpha Q̂ + (k-1) alpha Q Q̂`, zero below the threshold.
pub fn sigma_value(alpha: f64, k: usize) -> f64 {
    let (q, qh) = fixed_point_q(alpha, k);
    let kf = k as f64;
    q - kf * alpha * qh + (kf - 1.0) * alpha * q * qh
}

/// Per-variable exponent of the cluster count; fails when there is no core.
pub fn sigma(alpha: f64, k: usize) -> Result<f64> {
    let (q, _) = fixed_point_q(alpha, k);
    if q == 0.0 {
        return Err(Error::NoClusters(format!("alpha = {alpha} is below the clustering threshold")));
    }
    Ok(sigma_value(alpha, k))
}

/// `alpha k (k-1) (1-Q) Q^(k-2)`: slope of the map at its fixed point, and
/// the mean excess degree of degree-2 periphery checks.
pub fn theta(alpha: f64, k: usize) -> f64 {
    let (q, _) = fixed_point_q(alpha, k);
    let kf = k as f64;
    alpha * kf * (kf - 1.0) * (1.0 - q) * q.powi(k as i32 - 2)
}

/// `1 - sup_{z in (0,1]} f(z)/z` with `f(z) = 1 - exp(-alpha R'(z))`, or
/// `None` when the map has a positive fixed point or the supremum reaches 1.
pub fn peelability_rate(alpha: f64, r: &[f64]) -> Option<f64> {
    let (q, _) = de_fixed_point(alpha, r);
    if q > 0.0 {
        return None;
    }
    let slope_at_zero = 2.0 * alpha * r.get(2).copied().unwrap_or(0.0);
    let linear = (1..=20_000).map(|i| i as f64 / 20_000.0);
    let small = (0..=60).map(|i| 10f64.powf(-10.0 + i as f64 * 0.1));
    let sup = linear
        .chain(small)
        .map(|z| de_map(alpha, r, z) / z)
        .fold(slope_at_zero, f64::max);
    (sup < 1.0).then_some(1.0 - sup)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Mean check density and degree profile of the periphery.
pub fn periphery_profile(alpha: f64, k: usize) -> Result<(f64, Vec<f64>)> {
    let (q, _) = fixed_point_q(alpha, k);
    if q == 0.0 {
        return Err(Error::Undefined(format!("no core at alpha = {alpha}, so no periphery profile")));
    }
    let ki = k as i32;
    let norm = 1.0 - q.powi(ki) - k as f64 * (1.0 - q) * q.powi(ki - 1);
    let mut r = vec![0.0; k + 1];
    for (l, rl) in r.iter_mut().enumerate().skip(2) {
        *rl = binomial(k, l) * (1.0 - q).powi(l as i32) * q.powi(ki - l as i32) / norm;
    }
    Ok((alpha * norm / (1.0 - q), r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorePrediction {
    pub n_c: f64,
    pub m_c: f64,
    pub alpha_c: f64,
    pub eta_c: f64,
    pub theta_2c: f64,
}

/// Root of `eta (e^eta - 1)/(e^eta - 1 - eta) = target` (needs target > 2).
pub fn solve_eta_c(target: f64) -> Result<f64> {
    if target <= 2.0 {
        return Err(Error::InvalidParameters(format!("mean core degree {target} must exceed 2")));
    }
    let lhs = |eta: f64| eta * eta.exp_m1() / (eta.exp_m1() - eta);
    let (mut lo, mut hi) = (1e-6, 1.0);
    while lhs(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Predicted core size and shape; all zeros below the threshold.
pub fn core_predictions(alpha: f64, k: usize) -> CorePrediction {
    let (q, qh) = fixed_point_q(alpha, k);
    if q == 0.0 {
        return CorePrediction { n_c: 0.0, m_c: 0.0, alpha_c: 0.0, eta_c: 0.0, theta_2c: 0.0 };
    }
    let x = alpha * k as f64 * qh;
    let n_c = 1.0 - (-x).exp() * (1.0 + x);
    let m_c = alpha * q.powi(k as i32);
    let alpha_c = m_c / n_c;
    let eta_c = solve_eta_c(alpha_c * k as f64).expect("core mean degree exceeds 2");
    let theta_2c = eta_c * (k as f64 - 1.0) / eta_c.exp_m1();
    CorePrediction { n_c, m_c, alpha_c, eta_c, theta_2c }
}

/// Predicted statistics of the graph left after `t` peeling rounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualPrediction {
    pub t: usize,
    /// `m_l / n` for each check degree `l`.
    pub m: Vec<f64>,
    pub n1: f64,
    pub n2plus: f64,
}

pub fn residual_predictions(alpha: f64, r: &[f64], t: usize) -> ResidualPrediction {
    let z = de_sequence(alpha, r, 1.0, t, 0.0);
    let rp1 = r_prime(r, 1.0);
    let omega = alpha * rp1;
    let zt = z[t];
    let m = r.iter().enumerate().map(|(l, &rl)| alpha * rl * zt.powi(l as i32)).collect();
    if t == 0 {
        // nothing peeled yet: plain Poisson(omega) degrees
        return ResidualPrediction {
            t,
            m,
            n1: omega * (-omega).exp(),
            n2plus: 1.0 - (-omega).exp() * (1.0 + omega),
        };
    }
    let zhat = |s: usize| if rp1 == 0.0 { 0.0 } else { r_prime(r, z[s]) / rp1 };
    let (zh, zh_prev) = (zhat(t), zhat(t - 1));
    let x = omega * zh;
    ResidualPrediction {
        t,
        m,
        n1: x * (-x).exp() * (1.0 - (-omega * (zh_prev - zh)).exp()),
        n2plus: 1.0 - (-x).exp() * (1.0 + x),
    }
}

/// Limiting law of incoming-message signatures at the all-zero-start fixed
/// point: checks see Binomial(k, Q) zeros, variables see independent
/// Poisson(k alpha Q̂) zeros and Poisson(k alpha (1 - Q̂)) stars.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPointLaw {
    pub alpha: f64,
    pub k: usize,
    pub q: f64,
    pub qhat: f64,
}

fn poisson(lambda: f64, j: usize) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (j as f64 * lambda.ln() - lambda - (1..=j).map(|i| (i as f64).ln()).sum::<f64>()).exp()
}

impl FixedPointLaw {
    pub fn check_prob(&self, l0: usize) -> f64 {
        if l0 > self.k {
            return 0.0;
        }
        binomial(self.k, l0) * self.q.powi(l0 as i32) * (1.0 - self.q).powi((self.k - l0) as i32)
    }

    pub fn var_prob(&self, zeros: usize, stars: usize) -> f64 {
        let lam = self.k as f64 * self.alpha;
        poisson(lam * self.qhat, zeros) * poisson(lam * (1.0 - self.qhat), stars)
    }
}

pub fn fp_message_distribution(alpha: f64, k: usize) -> FixedPointLaw {
    let (q, qhat) = fixed_point_q(alpha, k);
    FixedPointLaw { alpha, k, q, qhat }
}

/// Everything density evolution predicts at one `(alpha, k)`.
#[derive(Clone, Debug, Serialize)]
pub struct DeReport {
    pub alpha: f64,
    pub k: usize,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub zhat: Vec<f64>,
    pub omega: f64,
    pub q: f64,
    pub qhat: f64,
    pub sigma: f64,
    pub eta: Option<f64>,
    pub theta: f64,
    pub periphery_alpha: Option<f64>,
    pub periphery_r: Option<Vec<f64>>,
    pub core: CorePrediction,
    pub tolerance: f64,
}

pub fn de_report(alpha: f64, k: usize, t_max: usize) -> Result<DeReport> {
    check_k(k)?;
    let r = regular(k);
    let z = de_sequence(alpha, &r, 1.0, t_max, TOL);
    let rp1 = r_prime(&r, 1.0);
    let zhat = z.iter().map(|&x| r_prime(&r, x) / rp1).collect();
    let (q, qhat) = fixed_point_q(alpha, k);
    let periphery = periphery_profile(alpha, k).ok();
    Ok(DeReport {
        alpha,
        k,
        omega: alpha * rp1,
        z,
        zhat,
        q,
        qhat,
        sigma: sigma_value(alpha, k),
        eta: peelability_rate(alpha, &r),
        theta: theta(alpha, k),
        periphery_alpha: periphery.as_ref().map(|p| p.0),
        periphery_r: periphery.map(|p| p.1),
        core: core_predictions(alpha, k),
        tolerance: TOL,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent bisection on the scalar equation z = 1 - exp(-k alpha z^(k-1))
    /// over an upper bracket [lo, 1].
    fn q_by_bisection(alpha: f64, k: usize, lo: f64) -> f64 {
        let h = |z: f64| z - 1.0 + (-(k as f64) * alpha * z.powi(k as i32 - 1)).exp();
        let (mut lo, mut hi) = (lo, 1.0);
        assert!(h(lo) < 0.0 && h(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn first_step_and_zero_density() {
        let z = de_sequence(0.5, &regular(3), 1.0, 1, 0.0);
        assert!((z[1] - (1.0 - (-1.5f64).exp())).abs() < 1e-15);
        assert!((z[1] - 0.7768698).abs() < 1e-7);
        let z = de_sequence(0.0, &[0.0, 0.0, 0.3, 0.7], 1.0, 1, 0.0);
        assert_eq!(z[1], 0.0);
    }

    #[test]
    fn sequence_is_non_increasing() {
        for &alpha in &[0.3, 0.7, 0.81, 0.85, 0.9, 1.2] {
            let z = de_sequence(alpha, &regular(3), 1.0, 500, 1e-14);
            assert!(z.windows(2).all(|w| w[1] <= w[0] + 1e-15));
            assert!(z.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn fixed_point_values() {
        assert_eq!(fixed_point_q(0.5, 3), (0.0, 0.0));
        let (q, qh) = fixed_point_q(0.9, 3);
        assert!((q - q_by_bisection(0.9, 3, 0.8)).abs() < 1e-12);
        assert!((q - 0.871127).abs() < 1e-6, "{q}");
        assert!((qh - 0.758862).abs() < 1e-6, "{qh}");
        assert!(fixed_point_q(100.0, 3).0 > 0.999);
        // no root of the gap on (0,1) at alpha = 0.5
        assert!((1..10_000).all(|i| gap(0.5, 3, i as f64 / 10_000.0) > 0.0));
    }

    #[test]
    fn thresholds_agree_across_methods() {
        for k in [3, 4] {
            let a = alpha_d(k, 1e-10).unwrap();
            let c = alpha_d_closed_form(k).unwrap();
            assert!((a - c).abs() < 1e-7, "k={k}: {a} vs {c}");
        }
        assert!((alpha_d(3, 1e-10).unwrap() - 0.8185).abs() < 1e-4);
        assert_eq!(alpha_d(2, 1e-9).unwrap_err().tag(), "invalid-parameters");
        assert!(min_gap(0.0, 3) > 0.0);
    }

    #[test]
    fn threshold_brackets_the_core() {
        for k in [3, 4, 5] {
            let a = alpha_d(k, 1e-10).unwrap();
            assert!(peelability_rate(a - 1e-3, &regular(k)).is_some());
            assert!(fixed_point_q(a + 1e-3, k).0 > 0.0);
        }
    }

    #[test]
    fn sigma_values_and_identity() {
        assert!(sigma(0.5, 3).is_err());
        assert_eq!(sigma_value(0.5, 3), 0.0);
        let s = sigma(0.9, 3).unwrap();
        assert!((s - 0.012117).abs() < 1e-6, "{s}");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let k = rng.gen_range(3..=6);
            let alpha = alpha_d_closed_form(k).unwrap() + rng.gen_range(0.01..1.5);
            let p = core_predictions(alpha, k);
            assert!((sigma_value(alpha, k) - (p.n_c - p.m_c)).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_below_one() {
        let t = theta(0.9, 3);
        assert!((t - 0.606).abs() < 1e-3, "{t}");
        for k in [3, 4, 5] {
            let a = alpha_d(k, 1e-10).unwrap();
            for i in 1..=40 {
                let alpha = a + (1.0 - a) * i as f64 / 40.0;
                assert!(theta(alpha, k) < 1.0);
            }
        }
    }

    #[test]
    fn peelability_examples() {
        let eta = peelability_rate(0.4, &regular(3)).unwrap();
        assert!(eta > 0.0);
        assert!(peelability_rate(0.9, &regular(3)).is_none());
        assert!(peelability_rate(0.8, &[0.0, 0.0, 0.9, 0.1]).is_none());
    }

    #[test]
    fn periphery_profile_is_normalized_and_peelable() {
        let (ab, rb) = periphery_profile(0.9, 3).unwrap();
        assert!((rb.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!((rb[0], rb[1]), (0.0, 0.0));
        assert!((2.0 * ab * rb[2] - theta(0.9, 3)).abs() < 1e-12);
        assert!(peelability_rate(ab, &rb).is_some());
        assert!(periphery_profile(0.5, 3).is_err());
    }

    #[test]
    fn core_prediction_values() {
        let p = core_predictions(0.9, 3);
        assert!((p.n_c - 0.607076).abs() < 1e-6, "{}", p.n_c);
        assert!((p.m_c - 0.594959).abs() < 1e-6, "{}", p.m_c);
        let (_, qh) = fixed_point_q(0.9, 3);
        assert!((p.eta_c - 0.9 * 3.0 * qh).abs() < 1e-6);
        assert!(p.theta_2c < 1.0);
        assert_eq!(core_predictions(0.5, 3).n_c, 0.0);
    }

    #[test]
    fn residuals_limits() {
        let r = regular(3);
        let p = residual_predictions(0.0, &r, 3);
        assert!(p.m.iter().all(|&x| x == 0.0) && p.n1 == 0.0 && p.n2plus == 0.0);
        let far = residual_predictions(0.9, &r, 400);
        assert!((far.n2plus - core_predictions(0.9, 3).n_c).abs() < 1e-9);
        let p0 = residual_predictions(0.7, &r, 0);
        assert!((p0.m[3] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_law_sums_to_one() {
        for alpha in [0.5, 0.9] {
            let law = fp_message_distribution(alpha, 3);
            let c: f64 = (0..=3).map(|l| law.check_prob(l)).sum();
            assert!((c - 1.0).abs() < 1e-12);
            let v: f64 = (0..60).flat_map(|z| (0..60).map(move |s| (z, s))).map(|(z, s)| law.var_prob(z, s)).sum();
            assert!((v - 1.0).abs() < 1e-12);
        }
        let below = fp_message_distribution(0.5, 3);
        assert_eq!(below.check_prob(0), 1.0);
        assert_eq!(below.var_prob(0, 0), (-1.5f64).exp());
    }
}
