//! Closed-form thresholds, exact finite-`n` probabilities and the tail
//! exponent algebra for maximal key rings.
//!
//! All logarithms are natural. Ratios of binomial coefficients are evaluated
//! in log-space as `Σ_ℓ ln((x - ℓ)/(y - ℓ))`, which stays finite for `n` in
//! the millions. `C(a, b) = 0` whenever `a < b`, so degenerate events get
//! probability zero instead of an error.
//!
//! The scaling constant of the maximal-ring analysis is called `lambda`
//! throughout; some treatments reuse the symbol `γ` for it, which clashes
//! with the deployment fraction.

use crate::error::{Error, Result};
use crate::gamma::Gamma;

/// `λ* = 1 / (2 ln 2 − 1)`.
pub fn lambda_star() -> f64 {
    1.0 / (2.0 * std::f64::consts::LN_2 - 1.0)
}

/// Isolated-node threshold `r(γ) = (1 − ln(1 − γ)/γ)^{-1}` for `γ ∈ (0, 1)`.
pub fn r_gamma(gamma: f64) -> Result<f64> {
    let g = Gamma::proper(gamma)?.value();
    Ok(1.0 / (1.0 - (-g).ln_1p() / g))
}

/// `c · ln(n) / γ` before rounding.
pub fn scaling_value(n: usize, c: f64, gamma: Gamma) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("scaling needs n >= 2, got {n}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("scaling constant must be positive, got {c}")));
    }
    Ok(c * (n as f64).ln() / gamma.value())
}

/// `K_n = ⌈c · ln(n) / γ⌉`.
pub fn scaling_k(n: usize, c: f64, gamma: Gamma) -> Result<usize> {
    Ok(scaling_value(n, c, gamma)?.ceil() as usize)
}

/// `ln(C(x, k) / C(y, k))` for `k <= y`; `-∞` when `x < k`.
pub fn ln_binomial_ratio(x: usize, y: usize, k: usize) -> f64 {
    debug_assert!(k <= y);
    if x < k {
        return f64::NEG_INFINITY;
    }
    (0..k).map(|l| ((x - l) as f64 / (y - l) as f64).ln()).sum()
}

/// `e · t` with `0 · (−∞) = 0`.
fn scaled(count: usize, ln_value: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_value
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::Domain(format!("need n >= 2 and 1 <= K < n, got n = {n}, K = {k}")));
    }
    Ok(())
}

/// Probability that node 1 is isolated in `H_γ(n;K)`:
/// `C(n−m, K)/C(n−1, K) · (C(n−2, K)/C(n−1, K))^{m−1}` with `m = ⌊γn⌋ >= 2`.
pub fn isolation_prob_exact(n: usize, k: usize, gamma: Gamma) -> Result<f64> {
    check_nk(n, k)?;
    let m = gamma.retained(n);
    if m < 2 {
        return Err(Error::Domain(format!("need ⌊γn⌋ >= 2, got {m}")));
    }
    let ln_p = ln_binomial_ratio(n - m, n - 1, k) + scaled(m - 1, ln_binomial_ratio(n - 2, n - 1, k));
    Ok(ln_p.exp())
}

/// `E[I] = ⌊γn⌋ · P[node 1 isolated]`.
pub fn expected_isolated(n: usize, k: usize, gamma: Gamma) -> Result<f64> {
    let p = isolation_prob_exact(n, k, gamma)?;
    Ok(gamma.retained(n) as f64 * p)
}

/// Probability that `{1, …, r}` has no edge to `{r+1, …, ⌊γn⌋}`.
///
/// Requires `2(K + 1) < n` and `1 <= r <= ⌊γn⌋`.
pub fn isolation_event_prob(n: usize, k: usize, gamma: Gamma, r: usize) -> Result<f64> {
    check_nk(n, k)?;
    if 2 * (k + 1) >= n {
        return Err(Error::Domain(format!("need 2(K+1) < n, got n = {n}, K = {k}")));
    }
    let m = gamma.retained(n);
    if r == 0 || r > m {
        return Err(Error::Domain(format!("need 1 <= r <= ⌊γn⌋ = {m}, got r = {r}")));
    }
    Ok(ln_isolation_event_prob(n, k, m, r).exp())
}

fn ln_isolation_event_prob(n: usize, k: usize, m: usize, r: usize) -> f64 {
    scaled(r, ln_binomial_ratio(n - m + r - 1, n - 1, k))
        + scaled(m - r, ln_binomial_ratio(n - r - 1, n - 1, k))
}

/// Checks `2(K+1) < n`, `K + 1 <= n − ⌊γn⌋` and `2 < γn`.
pub fn check_one_law_conditions(n: usize, k: usize, gamma: Gamma) -> Result<()> {
    check_nk(n, k)?;
    let m = gamma.retained(n);
    if 2 * (k + 1) >= n {
        return Err(Error::Domain(format!("need 2(K+1) < n, got n = {n}, K = {k}")));
    }
    if k + 1 > n - m {
        return Err(Error::Domain(format!("need K+1 <= n − ⌊γn⌋ = {}, got K = {k}", n - m)));
    }
    if gamma.value() * n as f64 <= 2.0 {
        return Err(Error::Domain(format!("need γn > 2, got {}", gamma.value() * n as f64)));
    }
    Ok(())
}

/// Natural log of [`connectivity_union_bound`].
pub fn ln_connectivity_union_bound(n: usize, k: usize, gamma: Gamma) -> Result<f64> {
    check_one_law_conditions(n, k, gamma)?;
    let m = gamma.retained(n);
    let mut ln_choose = 0.0;
    let mut terms = Vec::with_capacity(m / 2);
    for r in 1..=m / 2 {
        ln_choose += ((m - r + 1) as f64 / r as f64).ln();
        terms.push(ln_choose + ln_isolation_event_prob(n, k, m, r));
    }
    Ok(log_sum_exp(&terms))
}

/// Union bound on `P[H_γ(n;K) is not connected]`:
/// `Σ_{r=1}^{⌊m/2⌋} C(m, r) · P[{1..r} isolated from the rest]`.
///
/// Values above one are returned as is; they are valid but vacuous.
pub fn connectivity_union_bound(n: usize, k: usize, gamma: Gamma) -> Result<f64> {
    Ok(ln_connectivity_union_bound(n, k, gamma)?.exp())
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `1 − 27/(2n²)`, the finite-`n` lower bound on full-graph connectivity for
/// `K >= 2`. Negative (vacuous) for tiny `n`.
pub fn connectivity_lower_bound_full(n: usize) -> f64 {
    let n = n as f64;
    1.0 - 27.0 / (2.0 * n * n)
}

/// `φ(x) = (1 + x) ln(1 + x) − x` on `x >= 0`.
pub fn phi(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("φ is defined on x >= 0, got {x}")));
    }
    Ok((1.0 + x) * x.ln_1p() - x)
}

/// `a(λ; c) = 1 + c − (λ + c) ln(1 + c/λ)` for `c > 0`.
pub fn coeff_a(lambda: f64, c: f64) -> Result<f64> {
    if !(lambda > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!("a(λ;c) needs λ, c > 0, got λ = {lambda}, c = {c}")));
    }
    Ok(1.0 + c - (lambda + c) * (c / lambda).ln_1p())
}

/// `b(λ; c) = −c − (λ − c) ln(1 − c/λ)` for `0 < c <= λ`, with `0 · ln 0 = 0`
/// at `c = λ`.
pub fn coeff_b(lambda: f64, c: f64) -> Result<f64> {
    if !(lambda > 0.0 && c > 0.0 && c <= lambda) {
        return Err(Error::Domain(format!(
            "b(λ;c) needs 0 < c <= λ, got λ = {lambda}, c = {c}"
        )));
    }
    if c == lambda {
        return Ok(-c);
    }
    Ok(-c - (lambda - c) * (-c / lambda).ln_1p())
}

/// The coefficients `a`, `b` and the tail exponent `h = −max(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailExponents {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

pub fn h_exponent(lambda: f64, c: f64) -> Result<TailExponents> {
    let a = coeff_a(lambda, c)?;
    let b = coeff_b(lambda, c)?;
    Ok(TailExponents { a, b, h: -a.max(b) })
}

/// Bisection for a root of a continuous function with a sign change on
/// `[lo, hi]`. Stops once the bracket is no wider than `tol` or can no
/// longer shrink in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `x(λ)`, the unique root of `φ(x) = 1/λ` in `(0, 1)` for `λ > λ*`.
///
/// The bracket is refined to machine precision, well inside the `1e-9`
/// tolerance on `x`.
pub fn solve_x_of_lambda(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > lambda_star()) {
        return Err(Error::Domain(format!("c(λ) needs λ > λ* ≈ 2.5887, got {lambda}")));
    }
    let target = 1.0 / lambda;
    bisect(|x| (1.0 + x) * x.ln_1p() - x - target, 0.0, 1.0, 0.0)
}

/// `c(λ) = λ · x(λ)`, the root of `a(λ; c) = 0`; always below `λ`.
pub fn solve_c_of_lambda(lambda: f64) -> Result<f64> {
    Ok(lambda * solve_x_of_lambda(lambda)?)
}

/// `A_n(K; t) = ln n + t − (K + t) ln(1 + t/K)`, the log of the union bound
/// on `P[max_i B_i > K + t]`.
pub fn upper_tail_exponent(n: usize, k: usize, t: f64) -> Result<f64> {
    check_nk(n, k)?;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("tail offset must be positive, got {t}")));
    }
    let k = k as f64;
    Ok((n as f64).ln() + t - (k + t) * (t / k).ln_1p())
}

/// `B_n(K; t) = −t − (K − t) ln(1 − t/K)` for `0 < t <= K`, the log of the
/// bound on `P[max_i B_i < K − t]`. At `t = K` the convention `0 · ln 0 = 0`
/// gives `−K`.
pub fn lower_tail_exponent(k: usize, t: f64) -> Result<f64> {
    let kf = k as f64;
    if !(t > 0.0 && t <= kf) {
        return Err(Error::Domain(format!("lower tail needs 0 < t <= K = {k}, got {t}")));
    }
    if t == kf {
        return Ok(-kf);
    }
    Ok(-t - (kf - t) * (-t / kf).ln_1p())
}

/// `e^{A_n} + e^{B_n}`, a bound on `P[|M_n − 2K| > t]` where `M_n` is the
/// largest key ring.
pub fn maxring_tail_bound(n: usize, k: usize, t: f64) -> Result<f64> {
    let upper = upper_tail_exponent(n, k, t)?;
    let lower = lower_tail_exponent(k, t)?;
    Ok(upper.exp() + lower.exp())
}

/// `2 n^{−h(λ; c)}`, the bound on `P[|M_n − 2K_n| >= c ln n]` for scalings
/// `K_n ~ λ ln n`. Meaningful on `c(λ) < c < λ` where `h > 0`.
pub fn maxring_scaled_bound(n: usize, lambda: f64, c: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if c.is_nan() || lambda.is_nan() || c >= lambda {
        return Err(Error::Domain(format!("need c < λ, got c = {c}, λ = {lambda}")));
    }
    let h = h_exponent(lambda, c)?.h;
    Ok(2.0 * (n as f64).powf(-h))
}

/// `E[χ_1 χ_2] / E[χ_1]²` for the isolation indicators of nodes 1 and 2,
/// with its bound `exp(−K·E(n;K))`. Only used as a sanity value.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn second_moment_ratio(n: usize, k: usize, gamma: Gamma) -> (f64, f64) {
    let m = gamma.retained(n) as f64;
    let (nf, kf) = (n as f64, k as f64);
    let ratio = (1.0 - kf / (nf - 2.0)).powf(m - 2.0) * (1.0 + kf / (nf - 1.0 - kf)).powf(m);
    let e = (m - 2.0) / (nf - 2.0) - m / (nf - 1.0 - kf);
    (ratio, (-kf * e).exp())
}
