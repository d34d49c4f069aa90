//! Synthetic Markov chains and Monte-Carlo checks for hitting and return
//! time laws. Every random draw comes from a seeded ChaCha8 stream.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::markov;
use crate::math::{self, EULER_GAMMA};
use crate::stats::{classify_topicality, PairStats};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticChain {
    pub p: Matrix,
    pub pi: Vec<f64>,
    pub reversible: bool,
}

impl SyntheticChain {
    /// Wraps an irreducible stochastic matrix, solving for its equilibrium.
    pub fn from_matrix(p: Matrix) -> Result<Self> {
        let pi = markov::equilibrium(&p)?;
        Ok(SyntheticChain { p, pi, reversible: false })
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSize {
            what: "synthetic chains need at least two states",
            got: n,
        });
    }
    Ok(())
}

/// Dense chain with entries `1 - u`, `u` uniform on `[0, 1)`, normalized
/// by row.
pub fn random_ergodic_chain(n: usize, seed: u64) -> Result<SyntheticChain> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Matrix::from_fn(n, n, |_, _| 1.0 - rng.gen::<f64>());
    let p = markov::row_normalize(&w).expect("positive rows");
    SyntheticChain::from_matrix(p)
}

/// Random walk on a complete graph with symmetric positive weights.
pub fn reversible_chain(n: usize, seed: u64) -> Result<SyntheticChain> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = 1.0 - rng.gen::<f64>();
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    Ok(from_symmetric_weights(&w))
}

/// `p_ij = w_ij / sum_k w_ik`, `pi_i` proportional to the row sums.
pub fn from_symmetric_weights(w: &Matrix) -> SyntheticChain {
    let sums = w.row_sums();
    let total: f64 = sums.iter().sum();
    let p = Matrix::from_fn(w.rows(), w.cols(), |i, j| w[(i, j)] / sums[i]);
    SyntheticChain {
        p,
        pi: sums.iter().map(|s| s / total).collect(),
        reversible: true,
    }
}

struct Taboo {
    inside: Vec<usize>,
    outside: Vec<usize>,
}

fn split(n: usize, subset: &[usize]) -> Result<Taboo> {
    let mut flag = vec![false; n];
    for &s in subset {
        if s >= n {
            return Err(Error::InvalidSubset);
        }
        flag[s] = true;
    }
    let inside: Vec<usize> = (0..n).filter(|&k| flag[k]).collect();
    let outside: Vec<usize> = (0..n).filter(|&k| !flag[k]).collect();
    if inside.is_empty() || outside.is_empty() {
        return Err(Error::InvalidSubset);
    }
    Ok(Taboo { inside, outside })
}

/// Iterates `v_t = Q^(t-2) 1` for `t = 2..=horizon`, `Q` the chain
/// restricted to the complement of the target set, and reports
/// `weights . v_t` for each `t`.
fn taboo_series(chain: &SyntheticChain, t: &Taboo, weights: &[f64], horizon: usize) -> Vec<f64> {
    let q = Matrix::from_fn(t.outside.len(), t.outside.len(), |a, b| chain.p[(t.outside[a], t.outside[b])]);
    let mut v = vec![1.0; t.outside.len()];
    let mut out = Vec::with_capacity(horizon.saturating_sub(1));
    for step in 2..=horizon {
        if step > 2 {
            v = q.right_mul(&v);
        }
        out.push(weights.iter().zip(&v).map(|(a, b)| a * b).sum());
    }
    out
}

/// `H_W(t)` for `t = 1..=horizon`: probability that a chain started in
/// equilibrium has entered `subset` by step `t - 2`.
pub fn exact_hitting_cdf(chain: &SyntheticChain, subset: &[usize], horizon: usize) -> Result<Vec<f64>> {
    let t = split(chain.len(), subset)?;
    let pi_out: Vec<f64> = t.outside.iter().map(|&k| chain.pi[k]).collect();
    let mut h = vec![0.0];
    h.extend(taboo_series(chain, &t, &pi_out, horizon).into_iter().map(|s| 1.0 - s));
    h.truncate(horizon);
    Ok(h)
}

/// `R_W(t)` for `t = 1..=horizon`: probability of returning to `subset`
/// within `t - 1` steps, starting from equilibrium conditioned on it.
pub fn exact_return_cdf(chain: &SyntheticChain, subset: &[usize], horizon: usize) -> Result<Vec<f64>> {
    let mut r = vec![0.0];
    r.extend(return_survival(chain, subset, horizon)?.into_iter().map(|s| 1.0 - s));
    r.truncate(horizon);
    Ok(r)
}

/// `1 - R_W(t)` for `t = 2..=horizon`, summed directly so small tails
/// keep their relative precision.
fn return_survival(chain: &SyntheticChain, subset: &[usize], horizon: usize) -> Result<Vec<f64>> {
    let t = split(chain.len(), subset)?;
    let mass: f64 = t.inside.iter().map(|&k| chain.pi[k]).sum();
    let exit: Vec<f64> = t
        .outside
        .iter()
        .map(|&b| t.inside.iter().map(|&a| chain.pi[a] * chain.p[(a, b)]).sum::<f64>() / mass)
        .collect();
    Ok(taboo_series(chain, &t, &exit, horizon))
}

/// Largest violation over `t <= horizon` of
/// `H(t + 1) / pi(W) = sum_{n <= t} (1 - R(n))`.
pub fn verify_hr_identity(chain: &SyntheticChain, subset: &[usize], horizon: usize) -> Result<f64> {
    let h = exact_hitting_cdf(chain, subset, horizon + 1)?;
    let r = exact_return_cdf(chain, subset, horizon)?;
    // Same summation as the hitting series, so the first step is exact.
    let outside: f64 = (0..chain.len()).filter(|k| !subset.contains(k)).map(|k| chain.pi[k]).sum();
    let mass = 1.0 - outside;
    let mut cumulative = 0.0;
    let mut worst: f64 = 0.0;
    for step in 1..=horizon {
        cumulative += 1.0 - r[step - 1];
        worst = worst.max((h[step] / mass - cumulative).abs());
    }
    Ok(worst)
}

/// Return-time tail `a_s = 1 - R_W(s + 2)` for `s = 0..len`.
pub fn return_tail(chain: &SyntheticChain, subset: &[usize], len: usize) -> Result<Vec<f64>> {
    let mut a = return_survival(chain, subset, len + 1)?;
    a.truncate(len);
    Ok(a)
}

/// Real part of `sum_{r,s} c_r conj(c_s) a[t_r + t_s]`.
pub fn tail_quadratic_form(tail: &[f64], times: &[usize], coeffs: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, &cr) in coeffs.iter().enumerate() {
        for (s, &cs) in coeffs.iter().enumerate() {
            acc += cr * cs.conj() * tail[times[r] + times[s]];
        }
    }
    acc.re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfCheck {
    pub monte_carlo: f64,
    pub closed_form: f64,
    pub std_err: f64,
}

impl MgfCheck {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.monte_carlo - self.closed_form).abs() <= sigmas * self.std_err
    }
}

/// `E exp(-t Y_N) = N^t Gamma(N) / Gamma(N + t) * Gamma(1 + t/N)^N` for
/// `Y_N = log(mean X) - mean(log X)` over `N` unit exponentials.
pub fn yn_mgf_closed_form(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    math::exp(t * math::ln(nf) + math::lgamma(nf) - math::lgamma(nf + t) + nf * math::lgamma(1.0 + t / nf))
}

pub fn yn_mgf_check(n: usize, t: f64, trials: usize, seed: u64) -> Result<MgfCheck> {
    if n == 0 {
        return Err(Error::InvalidSize {
            what: "need at least one exponential sample",
            got: 0,
        });
    }
    if trials < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: trials });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let (mut sum, mut sum_log) = (0.0, 0.0);
        for _ in 0..n {
            let x: f64 = Exp1.sample(&mut rng);
            sum += x;
            sum_log += math::ln(x);
        }
        let y = math::ln(sum / n as f64) - sum_log / n as f64;
        let v = math::exp(-t * y);
        s1 += v;
        s2 += v * v;
    }
    let m = trials as f64;
    let mean = s1 / m;
    let var = ((s2 - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(MgfCheck {
        monte_carlo: mean,
        closed_form: yn_mgf_closed_form(n, t),
        std_err: math::sqrt(var / m),
    })
}

/// Monte-Carlo and predicted moments of the log hitting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub mean_mc: f64,
    pub mean_predicted: f64,
    pub mean_se: f64,
    pub var_mc: f64,
    pub var_predicted: f64,
    pub var_se: f64,
    /// The predictions re-estimated from sampled return times.
    pub mean_from_returns: f64,
    pub var_from_returns: f64,
}

impl MomentCheck {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.mean_mc - self.mean_predicted).abs() <= sigmas * self.mean_se
            && (self.var_mc - self.var_predicted).abs() <= sigmas * self.var_se
    }
}

fn check_mixture(mixture: &[(f64, f64)]) -> Result<()> {
    if mixture.is_empty() {
        return Err(Error::InvalidParameter("empty mixture".into()));
    }
    if mixture.iter().any(|&(c, k)| !(c > 0.0 && k > 0.0 && c.is_finite() && k.is_finite())) {
        return Err(Error::InvalidParameter("mixture weights and rates must be positive".into()));
    }
    let total: f64 = mixture.iter().map(|m| m.0).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(alloc::format!("mixture weights sum to {total}")));
    }
    Ok(())
}

/// Draws from `sum_n w_n Exp(k_n)`.
fn sample_mixture(rng: &mut ChaCha8Rng, weights: &[f64], rates: &[f64]) -> f64 {
    let mut u: f64 = rng.gen();
    let mut pick = rates.len() - 1;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            pick = k;
            break;
        }
        u -= w;
    }
    let x: f64 = Exp1.sample(rng);
    x / rates[pick]
}

/// Mean and variance of `log L` for the hitting law induced by a return
/// law with density `sum c_n k_n exp(-k_n t)`. Hitting times then have
/// density `sum c_n exp(-k_n t) / <L>`.
pub fn log_hitting_moments_check(mixture: &[(f64, f64)], trials: usize, seed: u64) -> Result<MomentCheck> {
    check_mixture(mixture)?;
    if trials < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: trials });
    }
    let rates: Vec<f64> = mixture.iter().map(|m| m.1).collect();
    let ret_weights: Vec<f64> = mixture.iter().map(|m| m.0).collect();
    let mean_len: f64 = mixture.iter().map(|&(c, k)| c / k).sum();
    let hit_weights: Vec<f64> = mixture.iter().map(|&(c, k)| c / k / mean_len).collect();

    // For X ~ Exp(k): E[X log X] = (1 - g - log k)/k and
    // E[X (a - log X)^2] = ((a + log k - (1 - g))^2 + pi^2/6 - 1)/k.
    let g = EULER_GAMMA;
    let pi2_6 = core::f64::consts::PI * core::f64::consts::PI / 6.0;
    let ell = mixture.iter().map(|&(c, k)| c * (1.0 - g - math::ln(k)) / k).sum::<f64>() / mean_len - 1.0;
    let var_predicted = mixture
        .iter()
        .map(|&(c, k)| {
            let b = ell + math::ln(k) - (1.0 - g);
            c * (b * b + pi2_6 - 1.0) / k
        })
        .sum::<f64>()
        / mean_len;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let logs: Vec<f64> = (0..trials).map(|_| math::ln(sample_mixture(&mut rng, &hit_weights, &rates))).collect();
    let m = trials as f64;
    let mean_mc = logs.iter().sum::<f64>() / m;
    let (mut c2, mut c4) = (0.0, 0.0);
    for &x in &logs {
        let d = (x - mean_mc) * (x - mean_mc);
        c2 += d;
        c4 += d * d;
    }
    let var_mc = c2 / (m - 1.0);
    let m4 = c4 / m;

    let returns = PairStats::from_lengths((0..trials).map(|_| sample_mixture(&mut rng, &ret_weights, &rates)));
    let mean_from_returns = returns.sum_len_log / returns.sum_len - 1.0;
    let var_from_returns = (returns.sum_len_log2 - 2.0 * mean_from_returns * returns.sum_len_log
        + mean_from_returns * mean_from_returns * returns.sum_len)
        / returns.sum_len;

    Ok(MomentCheck {
        mean_mc,
        mean_predicted: ell,
        mean_se: math::sqrt(var_mc / m),
        var_mc,
        var_predicted,
        var_se: math::sqrt(((m4 - var_mc * var_mc) / m).max(0.0)),
        mean_from_returns,
        var_from_returns,
    })
}

/// Fraction of `sequences` i.i.d. unit-exponential samples of length `n`
/// that the topicality test calls non-topical.
pub fn poisson_calibration(n: usize, sequences: usize, seed: u64) -> Result<f64> {
    if sequences == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut banal = 0usize;
    for _ in 0..sequences {
        let stats = PairStats::from_lengths((0..n).map(|_| Exp1.sample(&mut rng)));
        if !classify_topicality(&stats)?.verdict.is_topical() {
            banal += 1;
        }
    }
    Ok(banal as f64 / sequences as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn generators_are_deterministic_and_stochastic() {
        let a = random_ergodic_chain(5, 7).unwrap();
        assert_eq!(a, random_ergodic_chain(5, 7).unwrap());
        assert_ne!(a, random_ergodic_chain(5, 8).unwrap());
        for s in a.p.row_sums() {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
        assert!(a.p.as_slice().iter().all(|&x| x > 0.0));
        assert!(random_ergodic_chain(1, 0).is_err());
    }

    #[test]
    fn reversible_from_ones_is_uniform() {
        let c = from_symmetric_weights(&Matrix::from_fn(3, 3, |_, _| 1.0));
        assert!(c.p.as_slice().iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        assert!(c.pi.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        let r = reversible_chain(6, 3).unwrap();
        assert!(markov::balance_residual(&r.p, &r.pi, 1) <= 1e-12);
    }

    #[test]
    fn cdf_boundaries() {
        let c = random_ergodic_chain(4, 1).unwrap();
        let h = exact_hitting_cdf(&c, &[1, 3], 400).unwrap();
        assert_eq!(h[0], 0.0);
        assert_abs_diff_eq!(h[1], c.pi[1] + c.pi[3], epsilon = 1e-14);
        assert!(h.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        assert_abs_diff_eq!(h[399], 1.0, epsilon = 1e-12);
        let r = exact_return_cdf(&c, &[2], 5).unwrap();
        assert_eq!(r[0], 0.0);
        assert_eq!(exact_hitting_cdf(&c, &[], 3), Err(Error::InvalidSubset));
        assert_eq!(exact_hitting_cdf(&c, &[0, 1, 2, 3], 3), Err(Error::InvalidSubset));
    }

    #[test]
    fn two_state_return_increments() {
        let (p11, p12, p21, p22) = (0.3, 0.7, 0.4, 0.6);
        let c = SyntheticChain::from_matrix(Matrix::from_rows(&[[p11, p12], [p21, p22]])).unwrap();
        let r = exact_return_cdf(&c, &[0], 8).unwrap();
        assert_abs_diff_eq!(r[1] - r[0], p11, epsilon = 1e-15);
        for t in 2..8 {
            let expected = p12 * libm::pow(p22, (t - 2) as f64) * p21;
            assert_abs_diff_eq!(r[t] - r[t - 1], expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn identity_holds_at_first_step() {
        let c = random_ergodic_chain(3, 11).unwrap();
        assert_eq!(verify_hr_identity(&c, &[0], 1).unwrap(), 0.0);
        assert!(verify_hr_identity(&c, &[0, 2], 50).unwrap() < 1e-12);
    }

    #[test]
    fn mgf_trivial_cases() {
        assert_eq!(yn_mgf_closed_form(5, 0.0), 1.0);
        assert_abs_diff_eq!(yn_mgf_closed_form(1, 0.7), 1.0, epsilon = 1e-14);
        let c = yn_mgf_check(1, 0.7, 1000, 0).unwrap();
        assert_eq!((c.monte_carlo, c.std_err), (1.0, 0.0));
        let c = yn_mgf_check(4, 0.0, 1000, 0).unwrap();
        assert_eq!(c.monte_carlo, 1.0);
    }

    #[test]
    fn single_component_moments() {
        let c = log_hitting_moments_check(&[(1.0, 1.0)], 1000, 1).unwrap();
        assert_abs_diff_eq!(c.mean_predicted, -EULER_GAMMA, epsilon = 1e-15);
        let pi2_6 = core::f64::consts::PI * core::f64::consts::PI / 6.0;
        assert_abs_diff_eq!(c.var_predicted, pi2_6, epsilon = 1e-14);
        let d = log_hitting_moments_check(&[(0.5, 1.0), (0.5, 1.0)], 1000, 1).unwrap();
        assert_abs_diff_eq!(d.mean_predicted, c.mean_predicted, epsilon = 1e-15);
        assert_abs_diff_eq!(d.var_predicted, c.var_predicted, epsilon = 1e-14);
        assert!(log_hitting_moments_check(&[(0.5, 1.0)], 10, 0).is_err());
        assert!(log_hitting_moments_check(&[(1.0, -1.0)], 10, 0).is_err());
    }
}
