//! Explicit error bounds for the saddle-point estimate of `[q^m] P_n`.
//!
//! The relative error of the Gaussian main term splits into four parts:
//! `eps0` (the leading summand off the central arc), `eps1` (the secondary
//! summands on the arc), `eps2` (their majorants off the arc) and `eps3`
//! (summands with `j > j0`). Their sum below one certifies positivity.

use serde::Serialize;
use thiserror::Error;

use crate::families::Family;
use crate::saddle::{self, SaddleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("family {0} has no error budget; use D, E or F")]
    UnsupportedFamily(Family),
    #[error("index j={j} outside 1..={max} for n={n}")]
    IndexOutOfRange { n: usize, j: usize, max: usize },
    #[error("radius {0} outside (0, 1)")]
    InvalidRadius(f64),
    #[error(transparent)]
    Saddle(#[from] SaddleError),
}

fn check_family(family: Family) -> Result<(), BoundsError> {
    match family {
        Family::D | Family::E | Family::F => Ok(()),
        other => Err(BoundsError::UnsupportedFamily(other)),
    }
}

// ---------------------------------------------------------------------------
// erfc

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Complementary error function.
///
/// For `0 <= x < 2` uses `erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^k x^{2k+1} / (2k+1)!!`,
/// whose terms are all positive. For `x >= 2` evaluates the Laplace continued
/// fraction backwards from a fixed depth.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term > sum * 1e-17 {
            k += 1.0;
            term *= 2.0 * x2 / (2.0 * k + 1.0);
            sum += term;
        }
        1.0 - 2.0 * FRAC_1_SQRT_PI * (-x2).exp() * sum
    } else {
        let mut t = x;
        for k in (1..=120).rev() {
            t = x + (k as f64 * 0.5) / t;
        }
        FRAC_1_SQRT_PI * (-x * x).exp() / t
    }
}

// ---------------------------------------------------------------------------
// eps0 and eps1

/// `7 sqrt(2) / sqrt(3 pi lambda) + erfc(sqrt(lambda / 84))`.
pub fn eps0_bound(lambda: f64) -> f64 {
    7.0 * 2f64.sqrt() / (3.0 * std::f64::consts::PI * lambda).sqrt() + erfc((lambda / 84.0).sqrt())
}

/// Term ratio of `27^{-j} C(3j+1, j)`: `(3j+1)(3j-1) / (18 j (2j+1))`.
fn fuss_ratio(j: f64) -> f64 {
    (3.0 * j + 1.0) * (3.0 * j - 1.0) / (18.0 * j * (2.0 * j + 1.0))
}

/// `sum_{j>=start} boost^j 27^{-j} C(3j+1, j) w(j)`, summed until terms drop below `1e-17`.
fn fuss_series(boost: f64, start: usize, w: impl Fn(f64) -> f64) -> f64 {
    assert!(boost < 4.0, "series diverges for boost >= 4");
    let mut c = 1.0;
    let mut sum = 0.0;
    let mut j = 0usize;
    loop {
        if j >= start {
            let t = c * w(j as f64);
            sum += t;
            if j > 4 && t < 1e-17 * sum {
                break;
            }
        }
        j += 1;
        c *= boost * fuss_ratio(j as f64);
    }
    sum
}

/// `sum_{j>=1} boost^j 27^{-j} C(3j+1, j) w_j` with `w_j = 1` for `D` and `1/(3j+1)` for `E, F`.
pub fn secondary_series(family: Family, boost: f64) -> Result<f64, BoundsError> {
    check_family(family)?;
    Ok(match family {
        Family::D => fuss_series(boost, 1, |_| 1.0),
        _ => fuss_series(boost, 1, |j| 1.0 / (3.0 * j + 1.0)),
    })
}

/// Boost applied to the secondary series of `D` and `F`.
pub const SECONDARY_BOOST: f64 = 1.006;
/// Extra per-step factor applied for `E`.
pub const E_EXTRA_BOOST: f64 = 1.0003;

/// Constant `c_P` in `eps1 = c_P (1 + sqrt5 / (3 sqrt(3 lambda)))`.
pub fn eps1_constant(family: Family) -> Result<f64, BoundsError> {
    check_family(family)?;
    Ok(if family == Family::D { 0.187 } else { 0.043 })
}

pub fn eps1_bound(family: Family, lambda: f64) -> Result<f64, BoundsError> {
    Ok(eps1_constant(family)? * (1.0 + 5f64.sqrt() / (3.0 * (3.0 * lambda).sqrt())))
}

// ---------------------------------------------------------------------------
// majorants of the summands
//
// Each summand factors as (nonnegative-coefficient part) x (product of 1 - q^k).
// The majorant evaluates the first part at r and replaces every 1 - q^k by 1 + r^k.
// Below the regime boundary 6j <= n-2 the first part is
// q^s prod_{k=3j+2}^{n-3j-1} (1+q^k+q^{2k}) [3j+1; j]_{q^3}; above it the first part
// is q^s [K+j+1; 2j+1]_{q^3}, K = floor((n-1)/3).

fn ln_one_minus(lr: f64, k: f64) -> f64 {
    (-(k * lr).exp_m1()).ln()
}

fn ln_one_plus(lr: f64, k: f64) -> f64 {
    (k * lr).exp().ln_1p()
}

fn ln_tri(lr: f64, k: f64) -> f64 {
    let x = (k * lr).exp();
    (x * (1.0 + x)).ln_1p()
}

/// `log [a; b]_Q` at `Q = r^step`.
fn ln_gauss_binomial(lr: f64, step: f64, a: i64, b: i64) -> f64 {
    (1..=b)
        .map(|i| ln_one_minus(lr, step * (a - b + i) as f64) - ln_one_minus(lr, step * i as f64))
        .sum()
}

/// Whether `j` lies in the low regime `6j <= n - 2`.
pub fn low_regime(n: usize, j: usize) -> bool {
    6 * j + 2 <= n
}

fn check_tilde_args(family: Family, n: usize, j: usize, r: f64) -> Result<(), BoundsError> {
    check_family(family)?;
    let max = n.saturating_sub(2) / 3;
    if n < 2 || j > max {
        return Err(BoundsError::IndexOutOfRange { n, j, max });
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(BoundsError::InvalidRadius(r));
    }
    Ok(())
}

/// `log P~_{n,j}(r)` for `0 <= j <= floor((n-2)/3)` and `0 < r < 1`; equals
/// `log P_{n,0}(r)` at `j = 0`.
pub fn tilde_value(family: Family, n: usize, j: usize, r: f64) -> Result<f64, BoundsError> {
    check_tilde_args(family, n, j, r)?;
    let lr = r.ln();
    let (ni, ji) = (n as i64, j as i64);
    let k = (ni - 1) / 3;
    let shift = (3 * ji * ji + 3 * ji) as f64 * lr;
    let is_d = family == Family::D;
    let mut acc = shift;
    if low_regime(n, j) {
        acc += (3 * ji + 2..=ni - 3 * ji - 1).map(|m| ln_tri(lr, m as f64)).sum::<f64>();
        acc += ln_gauss_binomial(lr, 3.0, 3 * ji + 1, ji);
        if !is_d {
            // (1 - Q)/(1 - Q^{3j+1}) [3j+1; j]_Q and (1+q^{3j+1}+q^{6j+2})/(1+q+q^2)
            acc += ln_one_minus(lr, 3.0) - ln_one_minus(lr, (9 * ji + 3) as f64);
            acc += ln_one_minus(lr, (6 * ji + 1) as f64) - ln_one_minus(lr, 1.0);
        }
        acc += (ni - 3 * ji..=ni - ji - 1).map(|i| ln_one_plus(lr, (3 * i) as f64)).sum::<f64>();
    } else {
        acc += ln_gauss_binomial(lr, 3.0, k + ji + 1, 2 * ji + 1);
        acc += (k + ji + 2..=ni - ji - 1).map(|i| ln_one_plus(lr, (3 * i) as f64)).sum::<f64>();
        let top = if is_d { 3 * ji + 1 } else { 3 * ji };
        acc += (ni - 3 * ji..=top)
            .filter(|m| m % 3 != 0)
            .map(|m| ln_one_plus(lr, m as f64))
            .sum::<f64>();
        if !is_d {
            acc += ln_one_plus(lr, 1.0);
        }
    }
    if family == Family::F {
        acc += (3 * ji) as f64 * lr;
    }
    Ok(acc)
}

/// `P~_{n,j}(r) / P~_{n,j-1}(r)` for `1 <= j <= floor((n-2)/3)`.
pub fn tilde_ratio(family: Family, n: usize, j: usize, r: f64) -> Result<f64, BoundsError> {
    if j == 0 {
        return Err(BoundsError::IndexOutOfRange { n, j, max: n.saturating_sub(2) / 3 });
    }
    Ok((tilde_value(family, n, j, r)? - tilde_value(family, n, j - 1, r)?).exp())
}

fn p1(r: f64, k: i64) -> f64 {
    1.0 + r.powi(k as i32)
}

fn m1(r: f64, k: i64) -> f64 {
    1.0 - r.powi(k as i32)
}

fn t1(r: f64, k: i64) -> f64 {
    let x = r.powi(k as i32);
    1.0 + x + x * x
}

/// Rational closed form of [`tilde_ratio`] when `j - 1` and `j` lie in the same
/// regime; `None` across the regime boundary.
pub fn tilde_ratio_closed_form(family: Family, n: usize, j: usize, r: f64) -> Result<Option<f64>, BoundsError> {
    check_tilde_args(family, n, j, r)?;
    if j == 0 {
        return Err(BoundsError::IndexOutOfRange { n, j, max: n.saturating_sub(2) / 3 });
    }
    if low_regime(n, j) != low_regime(n, j - 1) {
        return Ok(None);
    }
    let (ni, ji) = (n as i64, j as i64);
    let k = (ni - 1) / 3;
    let d = family == Family::D;
    let e = if low_regime(n, j) {
        let outer = p1(r, 3 * ni - 9 * ji) * p1(r, 3 * ni - 9 * ji + 3) * p1(r, 3 * ni - 9 * ji + 6)
            / (t1(r, ni - 3 * ji) * t1(r, ni - 3 * ji + 1) * t1(r, ni - 3 * ji + 2) * p1(r, 3 * ni - 3 * ji));
        let head = r.powi(6 * ji as i32) * m1(r, 3 * ji - 1) * m1(r, 3 * ji + 1) / (m1(r, 6 * ji + 3) * m1(r, 6 * ji));
        if d {
            outer * head
        } else {
            outer * head * m1(r, 9 * ji - 6) * m1(r, 6 * ji + 1) / (m1(r, 9 * ji + 3) * m1(r, 6 * ji - 5))
        }
    } else {
        let tail = p1(r, ni - 3 * ji) * p1(r, ni - 3 * ji + 1) * p1(r, ni - 3 * ji + 2)
            / (p1(r, 3 * k + 3 * ji + 3) * p1(r, 3 * k - 3 * ji + 3) * p1(r, 3 * ni - 3 * ji));
        let binom = m1(r, 3 * k + 3 * ji + 3) * m1(r, 3 * k - 3 * ji + 3) / (m1(r, 6 * ji + 3) * m1(r, 6 * ji));
        let low = if d { p1(r, 3 * ji + 1) } else { p1(r, 3 * ji - 2) };
        r.powi(6 * ji as i32) * p1(r, 3 * ji - 1) * low * tail * binom
    };
    Ok(Some(if family == Family::F { r * r * r * e } else { e }))
}

/// Closed-form upper bound on [`tilde_ratio`] for `0 < r < 1` within a regime.
pub fn tilde_ratio_bound(family: Family, n: usize, j: usize, r: f64) -> Result<f64, BoundsError> {
    check_tilde_args(family, n, j, r)?;
    let jf = j as f64;
    let kf = ((n - 1) / 3) as f64;
    let boost = if family == Family::D { 1.0 } else { r.powf(-1.5) };
    Ok(if low_regime(n, j) {
        if family == Family::D {
            (3.0 * jf - 1.0) * (3.0 * jf + 1.0) / (18.0 * jf * (2.0 * jf + 1.0))
        } else {
            boost * (3.0 * jf - 1.0) * (3.0 * jf - 2.0) * (6.0 * jf + 1.0)
                / (18.0 * jf * (2.0 * jf + 1.0) * (6.0 * jf - 5.0))
        }
    } else {
        boost * 4.0 * (kf - jf + 1.0) / (3.0 * jf - kf)
    })
}

/// Tail factor `sum_{j>=0} boost^j 27^{-j} C(3j+1, j) w_j`, `w_j = 1` for `D`
/// and `(6j+1)/(3j+1)` for `E, F`.
pub fn tail_factor(family: Family, boost: f64) -> Result<f64, BoundsError> {
    check_family(family)?;
    Ok(match family {
        Family::D => fuss_series(boost, 0, |_| 1.0),
        _ => fuss_series(boost, 0, |j| (6.0 * j + 1.0) / (3.0 * j + 1.0)),
    })
}

/// Per-step boost used in the `E, F` tail factor.
pub const TAIL_BOOST_E: f64 = 1.003;

/// Certified upper bound `S_P` on the tail factor.
pub fn tail_constant(family: Family) -> Result<f64, BoundsError> {
    check_family(family)?;
    Ok(if family == Family::D { 1.185 } else { 1.329 })
}

// ---------------------------------------------------------------------------
// eps2 and eps3

/// `sqrt(c log2 / (3 n log n)) + 2^{s - 4n/21} n^2` with `(c, s) = (4, -1/2)` for `D`
/// and `(16, 1/2)` for `E, F`.
pub fn eps3_bound(family: Family, n: usize) -> Result<f64, BoundsError> {
    check_family(family)?;
    let (c, s) = if family == Family::D { (4.0, -0.5) } else { (16.0, 0.5) };
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    Ok((c * ln2 / (3.0 * nf * nf.ln())).sqrt() + (s - 4.0 * nf / 21.0).exp2() * nf * nf)
}

/// `(5/12)(1 - sqrt((1 + 1e-4)/(1 + rho^2))) (1 - r^{n/12}) / (1 - r)`.
pub fn phi_star(n: usize, r: f64, rho: f64) -> f64 {
    let shape = 1.0 - ((1.0 + 1e-4) / (1.0 + rho * rho)).sqrt();
    let nf = n as f64;
    let geom = if (1.0 - r).abs() < saddle::UNIT_EPS {
        nf / 12.0
    } else {
        let t = r.ln();
        -(t * nf / 12.0).exp_m1() / -t.exp_m1()
    };
    5.0 / 12.0 * shape * geom
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Threshold above which the budget is claimed.
pub const N_REF: usize = 7000;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Eps2Parts {
    pub n_ref: usize,
    pub r0: f64,
    pub integral: f64,
    pub t1: f64,
    pub t2: f64,
    /// `sqrt(24/(5 pi)) (T1 + T2)`.
    pub inner: f64,
}

/// Pieces of the `eps2` bound evaluated at `n_ref` with `r = r0(n_ref)`.
pub fn eps2_parts(n_ref: usize) -> Eps2Parts {
    let r0 = saddle::r0(n_ref);
    let l = 1.0 / (1.0 - r0);
    let integral = integrate(|rho| (-phi_star(n_ref, r0, rho)).exp(), 1.0 / 3.0, 1.5, 1e-13);
    let t1 = l.sqrt() * integral;
    let t2 = std::f64::consts::PI * l.powf(1.5) * (-phi_star(n_ref, r0, 1.5)).exp();
    let inner = (24.0 / (5.0 * std::f64::consts::PI)).sqrt() * (t1 + t2);
    Eps2Parts { n_ref, r0, integral, t1, t2, inner }
}

/// `eps2 = S_P sqrt(24/(5 pi)) (T1 + T2)`.
///
/// For `n > N_REF` the bound is uniform and evaluated at `N_REF`; below that it is
/// evaluated at `n` itself.
pub fn eps2_bound(family: Family, n: usize) -> Result<f64, BoundsError> {
    let s = tail_constant(family)?;
    let n_ref = if n > N_REF { N_REF } else { n };
    Ok(s * eps2_parts(n_ref).inner)
}

// ---------------------------------------------------------------------------
// certificate

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ErrorBudget {
    pub family: Family,
    pub n: usize,
    pub m: f64,
    pub r: f64,
    pub lambda: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub total: f64,
    /// `log P_{n,0}(r) - m log r - log(2 pi g)/2 + log(1 - total)` when `total < 1`.
    pub log_lower_bound: Option<f64>,
    pub valid: bool,
}

pub fn certificate(n: usize, m: f64, family: Family) -> Result<ErrorBudget, BoundsError> {
    check_family(family)?;
    let ctx = saddle::solve_saddle(n, m)?;
    let eps0 = eps0_bound(ctx.lambda);
    let eps1 = eps1_bound(family, ctx.lambda)?;
    let eps2 = eps2_bound(family, n)?;
    let eps3 = eps3_bound(family, n)?;
    let total = eps0 + eps1 + eps2 + eps3;
    let log_lower_bound = (total < 1.0).then(|| log_gaussian(n, m, ctx.r, ctx.g) + (-total).ln_1p());
    let valid = n > N_REF && total < 1.0 && ctx.r >= ctx.r0 && ctx.r <= 1.0;
    Ok(ErrorBudget {
        family,
        n,
        m,
        r: ctx.r,
        lambda: ctx.lambda,
        eps0,
        eps1,
        eps2,
        eps3,
        total,
        log_lower_bound,
        valid,
    })
}

fn log_gaussian(n: usize, m: f64, r: f64, g: f64) -> f64 {
    saddle::log_p0(n, r) - m * r.ln() - 0.5 * (2.0 * std::f64::consts::PI * g).ln()
}

/// `P_{n,0}(r) / (r^m sqrt(2 pi g))` at the saddle radius.
pub fn gaussian_estimate(n: usize, m: f64) -> Result<f64, BoundsError> {
    let ctx = saddle::solve_saddle(n, m)?;
    Ok(log_gaussian(n, m, ctx.r, ctx.g).exp())
}

// ---------------------------------------------------------------------------
// uniform table

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TableRow {
    pub family: Family,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub total: f64,
}

/// Smallest `lambda` over the certified regime.
pub const LAMBDA_MIN: f64 = 77.0;

/// Rounds up to three decimals.
pub fn ceil3(x: f64) -> f64 {
    (x * 1000.0 - 1e-9).ceil() / 1000.0
}

/// Uniform bounds valid for every `n > 7000`, each rounded up to three decimals.
///
/// `eps0, eps1` are evaluated at `LAMBDA_MIN`, `eps2` with the inner factor
/// rounded up to `1/5`, and `eps3` at `n = 7001` (all decreasing in `n`).
pub fn uniform_table() -> Vec<TableRow> {
    let inner = eps2_parts(N_REF).inner;
    assert!(inner < 0.2, "inner factor exceeds 1/5");
    [Family::D, Family::E, Family::F]
        .into_iter()
        .map(|family| {
            let eps0 = ceil3(eps0_bound(LAMBDA_MIN));
            let eps1 = ceil3(eps1_bound(family, LAMBDA_MIN).unwrap());
            let eps2 = ceil3(tail_constant(family).unwrap() * 0.2);
            let eps3 = ceil3(eps3_bound(family, N_REF + 1).unwrap());
            let total = (1000.0 * (eps0 + eps1 + eps2 + eps3)).round() / 1000.0;
            TableRow { family, eps0, eps1, eps2, eps3, total }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_basic() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
    }

    #[test]
    fn eps0_at_77() {
        assert!((eps0_bound(77.0) - 0.54321).abs() < 1e-4);
    }

    #[test]
    fn unsupported_family() {
        assert!(matches!(eps3_bound(Family::A, 7001), Err(BoundsError::UnsupportedFamily(_))));
    }

    #[test]
    fn ceil3_rounds_up() {
        assert_eq!(ceil3(0.5432), 0.544);
        assert_eq!(ceil3(0.237), 0.237);
    }
}
