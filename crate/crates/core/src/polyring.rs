//! Dense integer polynomials in one variable `q`.
//!
//! Coefficients are arbitrary-precision integers stored low degree first.
//! The representation is canonical: trailing zero coefficients are trimmed,
//! so the zero polynomial has an empty coefficient vector and no degree.

use std::fmt;
use std::io::{self, Write};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division leaves a nonzero remainder")]
    NonzeroRemainder,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DensePoly {
    coeffs: Vec<BigInt>,
}

impl DensePoly {
    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        DensePoly { coeffs: vec![BigInt::one()] }
    }

    /// `c * q^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        DensePoly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        DensePoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms(terms: &[(usize, i64)]) -> Self {
        let len = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); len];
        for &(k, c) in terms {
            coeffs[k] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `q^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        DensePoly { coeffs }
    }

    /// Keeps the terms of degree `< terms`.
    pub fn truncate(&self, terms: usize) -> Self {
        let mut coeffs: Vec<BigInt> = self.coeffs.iter().take(terms).cloned().collect();
        trim(&mut coeffs);
        DensePoly { coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Substitutes `q -> q^step`.
    pub fn substitute_power(&self, step: usize) -> Self {
        assert!(step > 0, "step must be positive");
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * step] = c.clone();
        }
        DensePoly { coeffs }
    }

    /// The polynomial `sum_m c_{modulus*m + residue} q^m`.
    pub fn sieve(&self, modulus: usize, residue: usize) -> Self {
        assert!(residue < modulus, "residue out of range");
        Self::from_coeffs(
            self.coeffs
                .iter()
                .skip(residue)
                .step_by(modulus)
                .cloned()
                .collect(),
        )
    }

    /// `q^deg * p(1/q)`; the zero polynomial has no reciprocal.
    pub fn reciprocal(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Ok(Self::from_coeffs(coeffs))
    }

    /// In-place multiplication by `1 - q^k`.
    pub fn mul_one_minus(&mut self, k: usize) {
        if self.is_zero() {
            return;
        }
        if k == 0 {
            self.coeffs.clear();
            return;
        }
        let old_len = self.coeffs.len();
        self.coeffs.resize(old_len + k, BigInt::zero());
        for i in (k..old_len + k).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            hi[0] -= &lo[i - k];
        }
        trim(&mut self.coeffs);
    }

    /// In-place exact division by `1 - q^k`.
    pub fn div_one_minus(&mut self, k: usize) -> Result<(), PolyError> {
        if k == 0 {
            return Err(PolyError::DivisionByZero);
        }
        let n = self.coeffs.len();
        if n == 0 {
            return Ok(());
        }
        if n <= k {
            return Err(PolyError::NonzeroRemainder);
        }
        // Quotient coefficients satisfy c_i = a_i + c_{i-k}; the top k must vanish.
        for i in k..n {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            hi[0] += &lo[i - k];
        }
        if self.coeffs[n - k..].iter().any(|c| !c.is_zero()) {
            return Err(PolyError::NonzeroRemainder);
        }
        self.coeffs.truncate(n - k);
        trim(&mut self.coeffs);
        Ok(())
    }

    /// Power-series multiplication by `1/(1 - q^k)` keeping the first `terms` coefficients.
    pub fn div_one_minus_series(&mut self, k: usize, terms: usize) {
        assert!(k > 0, "k must be positive");
        self.coeffs.resize(terms, BigInt::zero());
        for i in k..terms {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            hi[0] += &lo[i - k];
        }
        trim(&mut self.coeffs);
    }

    /// Value at `r e^{i theta}` by Horner's rule.
    pub fn eval_complex(&self, r: f64, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(r, theta);
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    /// Value at a real point.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Writes the nonzero coefficients as `exponent,coefficient` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "exponent,coefficient")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                writeln!(w, "{k},{c}")?;
            }
        }
        Ok(())
    }

    /// Coefficients as decimal strings, low degree first.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

/// Serialised as a list of decimal strings, low degree first.
impl serde::Serialize for DensePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

fn trim(coeffs: &mut Vec<BigInt>) {
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{mag}q^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &DensePoly {
    type Output = DensePoly;
    fn add(self, rhs: &DensePoly) -> DensePoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        DensePoly::from_coeffs(coeffs)
    }
}

impl Sub for &DensePoly {
    type Output = DensePoly;
    fn sub(self, rhs: &DensePoly) -> DensePoly {
        self + &(-rhs)
    }
}

impl Neg for &DensePoly {
    type Output = DensePoly;
    fn neg(self) -> DensePoly {
        DensePoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &DensePoly {
    type Output = DensePoly;
    fn mul(self, rhs: &DensePoly) -> DensePoly {
        mul(self, rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DensePoly {
            type Output = DensePoly;
            fn $m(self, rhs: DensePoly) -> DensePoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Schoolbook product, skipping zero coefficients of the sparser factor.
pub fn mul(a: &DensePoly, b: &DensePoly) -> DensePoly {
    if a.is_zero() || b.is_zero() {
        return DensePoly::zero();
    }
    let (dense, sparse) = if count_nonzero(a) >= count_nonzero(b) {
        (a, b)
    } else {
        (b, a)
    };
    let mut out = vec![BigInt::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (j, s) in sparse.coeffs.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        for (i, d) in dense.coeffs.iter().enumerate() {
            out[i + j] += d * s;
        }
    }
    DensePoly::from_coeffs(out)
}

fn count_nonzero(p: &DensePoly) -> usize {
    p.coeffs.iter().filter(|c| !c.is_zero()).count()
}

/// `prod_i (1 - q^{e_i})` built by repeated shift-and-subtract.
pub fn product_one_minus(exps: &[usize]) -> DensePoly {
    let mut p = DensePoly::one();
    for &e in exps {
        p.mul_one_minus(e);
    }
    p
}

/// `(q^step; q^step)_count = prod_{i=1}^{count} (1 - q^{step*i})`.
pub fn q_pochhammer(step: usize, count: usize) -> DensePoly {
    let exps: Vec<usize> = (1..=count).map(|i| i * step).collect();
    product_one_minus(&exps)
}

/// Exact quotient `num / den`; any remainder is an error.
pub fn exact_div(num: &DensePoly, den: &DensePoly) -> Result<DensePoly, PolyError> {
    let dd = den.degree().ok_or(PolyError::DivisionByZero)?;
    let Some(nd) = num.degree() else {
        return Ok(DensePoly::zero());
    };
    if nd < dd {
        return Err(PolyError::NonzeroRemainder);
    }
    let lead = &den.coeffs[dd];
    let den_terms: Vec<(usize, &BigInt)> = den.coeffs[..dd]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mut rem = num.coeffs.clone();
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let top = &rem[i + dd];
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lead);
        if !r.is_zero() {
            return Err(PolyError::NonzeroRemainder);
        }
        for &(k, c) in &den_terms {
            rem[i + k] -= &q * c;
        }
        rem[i + dd] = BigInt::zero();
        quot[i] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return Err(PolyError::NonzeroRemainder);
    }
    Ok(DensePoly::from_coeffs(quot))
}

/// Gaussian binomial `[a; b]` in the variable `q^step`; zero when `b > a`.
///
/// Built as `prod_{i=1}^{b} (1 - q^{step(a-b+i)}) / (1 - q^{step i})`, where every
/// partial product is itself a Gaussian binomial, so each division is exact.
pub fn q_binomial(a: i64, b: i64, step: usize) -> DensePoly {
    if b < 0 || a < 0 || b > a {
        return DensePoly::zero();
    }
    let (a, b) = (a as usize, b as usize);
    let b = b.min(a - b);
    let mut p = DensePoly::one();
    for i in 1..=b {
        p.mul_one_minus(step * (a - b + i));
        p.div_one_minus(step * i)
            .expect("partial Gaussian binomial is a polynomial");
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> DensePoly {
        DensePoly::from_i64s(cs)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(p(&[0, 0]).degree(), None);
        assert!(p(&[]).is_zero());
    }

    #[test]
    fn product_one_minus_example() {
        let got = product_one_minus(&[1, 2, 4, 5]);
        assert_eq!(got, p(&[1, -1, -1, 1, -1, 0, 2, 0, -1, 1, -1, -1, 1]));
    }

    #[test]
    fn q_binomial_examples() {
        assert_eq!(q_binomial(4, 2, 1), p(&[1, 1, 2, 1, 1]));
        assert_eq!(q_binomial(3, 1, 3), p(&[1, 0, 0, 1, 0, 0, 1]));
        assert!(q_binomial(3, 4, 1).is_zero());
        assert!(q_binomial(3, -1, 1).is_zero());
        assert_eq!(q_binomial(5, 0, 2), DensePoly::one());
    }

    #[test]
    fn reciprocal_example() {
        assert_eq!(p(&[1, 1, 0, 1]).reciprocal().unwrap(), p(&[1, 0, 1, 1]));
        assert_eq!(DensePoly::zero().reciprocal(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn eval_example() {
        let v = p(&[1, 0, 1, 0, 1]).eval_complex(0.5, 0.0);
        assert!((v.re - 1.3125).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn exact_div_detects_remainder() {
        let num = p(&[1, 0, 1]);
        let den = p(&[1, -1]);
        assert_eq!(exact_div(&num, &den), Err(PolyError::NonzeroRemainder));
        let mut x = num.clone();
        assert_eq!(x.div_one_minus(1), Err(PolyError::NonzeroRemainder));
        assert_eq!(exact_div(&num, &DensePoly::zero()), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn exact_div_non_monic() {
        let a = p(&[3, 0, -2, 5]);
        let b = p(&[2, 7]);
        assert_eq!(exact_div(&mul(&a, &b), &b).unwrap(), a);
        assert_eq!(exact_div(&p(&[1, 1]), &p(&[2])), Err(PolyError::NonzeroRemainder));
    }

    #[test]
    fn sieve_and_substitute() {
        let x = p(&[1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(x.sieve(3, 0), p(&[1, 4, 7]));
        assert_eq!(x.sieve(3, 2), p(&[3, 6]));
        assert_eq!(p(&[1, 2]).substitute_power(3), p(&[1, 0, 0, 2]));
    }

    #[test]
    fn series_inverse_of_one_minus_q_is_geometric() {
        let mut s = DensePoly::one();
        s.div_one_minus_series(2, 7);
        assert_eq!(s, p(&[1, 0, 1, 0, 1, 0, 1]));
    }

    #[test]
    fn csv_rows() {
        let mut out = Vec::new();
        p(&[1, 1, 0, 1]).write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "exponent,coefficient\n0,1\n1,1\n3,1\n");
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -1, 0, 2]).to_string(), "1 - q + 2q^3");
        assert_eq!(DensePoly::zero().to_string(), "0");
    }
}
