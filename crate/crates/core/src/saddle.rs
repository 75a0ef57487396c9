//! Saddle point of `P_{n,0}(q) q^{-m}` on the positive real axis.
//!
//! `P_{n,0}(q) = prod_{k=2}^{n-1} (1 + q^k + q^{2k})`. The saddle radius `r`
//! solves `f(n, r) = m`, where `f = r d/dr log P_{n,0}`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaddleError {
    #[error("m={m} must satisfy 0 < m < {deg} for n={n}")]
    OutOfRange { n: usize, m: f64, deg: usize },
    #[error("bisection did not reach the residual tolerance (residual {residual:e})")]
    NoConvergence { residual: f64 },
}

/// `2/sqrt(3)`.
pub fn alpha() -> f64 {
    2.0 / 3f64.sqrt()
}

/// Distance from one below which closed forms switch to their limits.
pub const UNIT_EPS: f64 = 1e-14;

/// `(k, r^k)` pairs for `k = 2..n-1`, with `r^k` folded to `r^{-k}` when `r > 1`.
fn powers(n: usize, r: f64) -> impl Iterator<Item = (f64, f64)> {
    let inv = r > 1.0;
    let base = if inv { 1.0 / r } else { r };
    let mut x = base;
    (2..n).map(move |k| {
        x *= base;
        (k as f64, x)
    })
}

/// `sum_{k=2}^{n-1} k (2r^{2k} + r^k) / (1 + r^k + r^{2k})`.
pub fn f(n: usize, r: f64) -> f64 {
    let inv = r > 1.0;
    powers(n, r)
        .map(|(k, x)| {
            let t = 1.0 + x + x * x;
            if inv {
                k * (2.0 + x) / t
            } else {
                k * (2.0 * x * x + x) / t
            }
        })
        .sum()
}

/// `sum_{k=2}^{n-1} k^2 r^k (1 + 4r^k + r^{2k}) / (1 + r^k + r^{2k})^2`.
///
/// Invariant under `r -> 1/r`, so large radii are folded back.
pub fn g(n: usize, r: f64) -> f64 {
    powers(n, r)
        .map(|(k, x)| {
            let t = 1.0 + x + x * x;
            k * k * x * (1.0 + 4.0 * x + x * x) / (t * t)
        })
        .sum()
}

/// `g(n, 1) = (2n^3 - 3n^2 + n - 6) / 9`.
pub fn g_at_one(n: usize) -> f64 {
    let n = n as f64;
    (2.0 * n * n * n - 3.0 * n * n + n - 6.0) / 9.0
}

/// `sum_{k=1}^{n} k^m r^k`.
pub fn power_sum(m: u32, n: usize, r: f64) -> f64 {
    let mut x = 1.0;
    let mut s = 0.0;
    for k in 1..=n {
        x *= r;
        s += (k as f64).powi(m as i32) * x;
    }
    s
}

/// `log P_{n,0}(r) = sum_{k=2}^{n-1} log(1 + r^k + r^{2k})`.
pub fn log_p0(n: usize, r: f64) -> f64 {
    let inv = r > 1.0;
    let lr = r.ln();
    powers(n, r)
        .map(|(k, x)| {
            let base = (x * (1.0 + x)).ln_1p();
            if inv {
                base + 2.0 * k * lr
            } else {
                base
            }
        })
        .sum()
}

/// Degree of `P_{n,0}`: `n^2 - n - 2` for `n >= 2`.
pub fn degree(n: usize) -> usize {
    (n * n).saturating_sub(n + 2)
}

/// `exp(-sqrt(alpha/n))`.
pub fn r0(n: usize) -> f64 {
    (-(alpha() / n as f64).sqrt()).exp()
}

/// `floor(log2 n)`.
pub fn j0(n: usize) -> u32 {
    assert!(n > 0, "n must be positive");
    usize::BITS - 1 - n.leading_zeros()
}

/// `(r - r^{n+1}) / (1 - r)`, equal to `n` at `r = 1`.
pub fn lambda(n: usize, r: f64) -> f64 {
    if (1.0 - r).abs() < UNIT_EPS {
        n as f64
    } else {
        (r - r.powi(n as i32 + 1)) / (1.0 - r)
    }
}

/// `(1 - r) / (3 (1 - r^n))`, equal to `1/(3n)` at `r = 1`.
pub fn theta0(n: usize, r: f64) -> f64 {
    if (1.0 - r).abs() < UNIT_EPS {
        1.0 / (3.0 * n as f64)
    } else {
        (1.0 - r) / (3.0 * (1.0 - r.powi(n as i32)))
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SaddleContext {
    pub n: usize,
    pub m: f64,
    pub r: f64,
    pub g: f64,
    pub lambda: f64,
    pub r0: f64,
    pub theta0: f64,
    pub j0: u32,
    pub alpha: f64,
    pub residual: f64,
    pub iterations: u32,
}

pub const MAX_ITERATIONS: u32 = 200;

/// Residual tolerance `1e-10 * max(1, m)`.
pub fn tolerance(m: f64) -> f64 {
    1e-10 * m.max(1.0)
}

/// Solves `f(n, r) = m` by bisection.
///
/// The bracket is `(0, 1]` when `m <= deg/2 = f(n, 1)` and is doubled beyond one otherwise.
pub fn solve_saddle(n: usize, m: f64) -> Result<SaddleContext, SaddleError> {
    let deg = degree(n);
    if !(m > 0.0 && m < deg as f64) {
        return Err(SaddleError::OutOfRange { n, m, deg });
    }
    let tol = tolerance(m);
    let f1 = f(n, 1.0);
    let (r, iterations) = if (f1 - m).abs() <= tol {
        (1.0, 0)
    } else {
        let (mut lo, mut hi) = if m < f1 { (0.0, 1.0) } else { (1.0, 2.0) };
        while f(n, hi) < m {
            lo = hi;
            hi *= 2.0;
        }
        let mut it = 0;
        loop {
            let mid = 0.5 * (lo + hi);
            let fm = f(n, mid);
            it += 1;
            if (fm - m).abs() <= tol {
                break (mid, it);
            }
            if mid <= lo || mid >= hi || it >= MAX_ITERATIONS {
                return Err(SaddleError::NoConvergence { residual: (fm - m).abs() });
            }
            if fm < m {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    };
    Ok(context(n, m, r, iterations))
}

fn context(n: usize, m: f64, r: f64, iterations: u32) -> SaddleContext {
    SaddleContext {
        n,
        m,
        r,
        g: g(n, r),
        lambda: lambda(n, r),
        r0: r0(n),
        theta0: theta0(n, r),
        j0: j0(n),
        alpha: alpha(),
        residual: (f(n, r) - m).abs(),
        iterations,
    }
}
