//! The Borwein triple `A, B, C` and the finite families `D, E, F`.
//!
//! `(q;q)_{3n} / (q^3;q^3)_n = A_n(q^3) - q B_n(q^3) - q^2 C_n(q^3)`.
//! Three independent routes produce the triple: sieving the quotient product,
//! summing the positive Andrews expansions, and the alternating q-binomial sums.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{mul, product_one_minus, q_binomial, DensePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("index j={j} out of range for family {family} at n={n}")]
    IndexOutOfRange { family: Family, n: usize, j: usize },
    #[error("family {0} is not supported by this operation")]
    Unsupported(Family),
    #[error("exponent at j={j} is not an integer")]
    NonIntegralExponent { j: i64 },
    #[error("exponent at j={j} is negative")]
    NegativeExponent { j: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
            Family::F => "F",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            other => Err(format!("unknown family '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub a: DensePoly,
    pub b: DensePoly,
    pub c: DensePoly,
}

impl Triple {
    pub fn get(&self, family: Family) -> Option<&DensePoly> {
        match family {
            Family::A => Some(&self.a),
            Family::B => Some(&self.b),
            Family::C => Some(&self.c),
            _ => None,
        }
    }
}

/// Exponents `3i-2, 3i-1` for `i = 1..=n`: the product `(q;q)_{3n}/(q^3;q^3)_n`.
pub fn base_exponents(n: usize) -> Vec<usize> {
    (1..=n).flat_map(|i| [3 * i - 2, 3 * i - 1]).collect()
}

/// Splits `A(q^3) - q B(q^3) - q^2 C(q^3)` into its three parts.
pub fn split_triple(p: &DensePoly) -> Triple {
    Triple {
        a: p.sieve(3, 0),
        b: -&p.sieve(3, 1),
        c: -&p.sieve(3, 2),
    }
}

pub fn triple_from_quotient(n: usize) -> Triple {
    split_triple(&product_one_minus(&base_exponents(n)))
}

/// A term `q^shift * extra * prod(1 - q^num) / prod(1 - q^den)`.
struct Quotient {
    shift: usize,
    extra: DensePoly,
    num: Vec<usize>,
    den: Vec<usize>,
}

impl Quotient {
    fn new(shift: usize, extra: DensePoly) -> Self {
        Quotient { shift, extra, num: Vec::new(), den: Vec::new() }
    }

    /// Multiplies by `(q^step; q^step)_count`.
    fn times_poch(mut self, step: usize, count: usize) -> Self {
        self.num.extend((1..=count).map(|i| i * step));
        self
    }

    /// Divides by `(q^step; q^step)_count`.
    fn over_poch(mut self, step: usize, count: usize) -> Self {
        self.den.extend((1..=count).map(|i| i * step));
        self
    }

    fn eval(mut self) -> DensePoly {
        self.num.sort_unstable();
        self.den.sort_unstable();
        let (num, den) = cancel_sorted(&self.num, &self.den);
        let mut p = self.extra;
        for e in num {
            p.mul_one_minus(e);
        }
        for e in den {
            p.div_one_minus(e).expect("term is a polynomial");
        }
        p.shift(self.shift)
    }
}

/// Removes the common part of two sorted multisets.
fn cancel_sorted(a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                ra.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                rb.push(b[j]);
                j += 1;
            }
        }
    }
    ra.extend_from_slice(&a[i..]);
    rb.extend_from_slice(&b[j..]);
    (ra, rb)
}

/// Largest admissible `j` for the Andrews expansion of `family` at `n`, or `None` if empty.
pub fn j_max(family: Family, n: usize) -> Option<usize> {
    match family {
        Family::A => Some(n / 3),
        Family::D => n.checked_sub(2).map(|m| m / 3),
        _ => n.checked_sub(1).map(|m| m / 3),
    }
}

/// Common denominator `(q;q)_{n-3j-1} (q^3;q^3)_{2j+1} (q^3;q^3)_j`.
fn bde_frame(shift: usize, extra: DensePoly, n: usize, j: usize) -> Quotient {
    Quotient::new(shift, extra)
        .times_poch(3, n - j - 1)
        .over_poch(1, n - 3 * j - 1)
        .over_poch(3, 2 * j + 1)
        .over_poch(3, j)
}

fn four_term(a: usize, b: usize, c: usize) -> DensePoly {
    DensePoly::from_terms(&[(0, 1), (a, -1), (b, 1), (c, -1)])
}

/// The `j`-th summand of the positive expansion of `family` at `n`.
///
/// `D` vanishes at the borderline `n = 3j+1`; there `E` takes the value of the
/// `B` summand and `F` its reciprocal with respect to `n^2-n-2` (and `F_1 = 1`).
pub fn andrews_term(family: Family, n: usize, j: usize) -> Result<DensePoly, FamilyError> {
    let out_of_range = || FamilyError::IndexOutOfRange { family, n, j };
    let jm = match family {
        Family::A => Some(n / 3),
        _ => n.checked_sub(1).map(|m| m / 3),
    };
    if jm.is_none_or(|m| j > m) {
        return Err(out_of_range());
    }
    let borderline = n == 3 * j + 1;
    let s = 3 * j * j + 3 * j;
    let p = match family {
        Family::A => {
            if n == 0 {
                return Ok(DensePoly::one());
            }
            let extra = DensePoly::from_terms(&[(0, 1), (2 * n, -1)]);
            Quotient::new(3 * j * j, extra)
                .times_poch(3, n - j - 1)
                .times_poch(1, 3 * j)
                .over_poch(1, n - 3 * j)
                .over_poch(3, 2 * j)
                .over_poch(3, j)
                .eval()
        }
        Family::B => {
            bde_frame(s, four_term(3 * j + 2, n + 1, n + 3 * j + 2), n, j).times_poch(1, 3 * j).eval()
        }
        Family::C => {
            bde_frame(s, four_term(3 * j + 1, n, n + 3 * j + 2), n, j).times_poch(1, 3 * j).eval()
        }
        Family::D if borderline => DensePoly::zero(),
        Family::D => bde_frame(s, DensePoly::one(), n, j).times_poch(1, 3 * j + 1).eval(),
        Family::E if borderline => andrews_term(Family::B, n, j)?,
        Family::E => {
            let extra = DensePoly::from_terms(&[(0, 1), (1, -1)]);
            bde_frame(s, extra, n, j).times_poch(1, 3 * j).eval()
        }
        Family::F if borderline => {
            if j == 0 {
                DensePoly::one()
            } else {
                Quotient::new(3 * j * j - 2, DensePoly::one())
                    .times_poch(1, 3 * j)
                    .over_poch(3, j)
                    .eval()
            }
        }
        Family::F => andrews_term(Family::E, n, j)?.shift(3 * j),
    };
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyPoly {
    pub family: Family,
    pub n: usize,
    pub terms: Vec<DensePoly>,
    pub total: DensePoly,
}

/// All summands of the positive expansion and their sum.
pub fn family_sum(family: Family, n: usize) -> FamilyPoly {
    let terms: Vec<DensePoly> = match j_max(family, n) {
        Some(m) => (0..=m)
            .map(|j| andrews_term(family, n, j).expect("j within range"))
            .collect(),
        None => Vec::new(),
    };
    let total = terms.iter().fold(DensePoly::zero(), |acc, t| &acc + t);
    FamilyPoly { family, n, terms, total }
}

/// Triple from the Andrews expansions.
pub fn triple_from_andrews(n: usize) -> Triple {
    Triple {
        a: family_sum(Family::A, n).total,
        b: family_sum(Family::B, n).total,
        c: family_sum(Family::C, n).total,
    }
}

/// Alternating q-binomial sum for `A`, `B` or `C`.
pub fn altsum(family: Family, n: usize) -> Result<DensePoly, FamilyError> {
    // exponent j(9j + lin)/2 and lower index n + 3j + delta
    let (lin, delta): (i64, i64) = match family {
        Family::A => (1, 0),
        Family::B => (-5, -1),
        Family::C => (7, 1),
        other => return Err(FamilyError::Unsupported(other)),
    };
    let n = n as i64;
    let lo = (-n - delta).div_euclid(3) - 1;
    let hi = (n - delta).div_euclid(3) + 1;
    let mut acc = DensePoly::zero();
    for j in lo..=hi {
        let k = n + 3 * j + delta;
        if k < 0 || k > 2 * n {
            continue;
        }
        let e = (j * (9 * j + lin) / 2) as usize;
        let mut t = q_binomial(2 * n, k, 1).shift(e);
        if j % 2 != 0 {
            t = -&t;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

pub fn triple_from_altsum(n: usize) -> Triple {
    Triple {
        a: altsum(Family::A, n).expect("A supported"),
        b: altsum(Family::B, n).expect("B supported"),
        c: altsum(Family::C, n).expect("C supported"),
    }
}

/// `B_n = q(1+q^n) D_n + E_n`.
pub fn decomposition_check(n: usize) -> bool {
    let b = triple_from_quotient(n).b;
    let d = family_sum(Family::D, n).total;
    let e = family_sum(Family::E, n).total;
    let factor = DensePoly::from_terms(&[(1, 1), (n + 1, 1)]);
    b == &mul(&factor, &d) + &e
}

/// `A_n = (1 + q^{2n-1}) A_{n-1} + q^n (B_{n-1} + C_{n-1})` for `n >= 1`.
pub fn recursion_check(n: usize) -> bool {
    assert!(n >= 1, "recursion needs n >= 1");
    let cur = triple_from_quotient(n);
    let prev = triple_from_quotient(n - 1);
    let lhs = mul(&DensePoly::from_terms(&[(0, 1), (2 * n - 1, 1)]), &prev.a);
    let rhs = (&prev.b + &prev.c).shift(n);
    cur.a == &lhs + &rhs
}

/// Power series `P_infinity` truncated to the first `terms` coefficients.
pub fn limit_series(family: Family, terms: usize) -> Result<DensePoly, FamilyError> {
    // one extra coefficient so that (B - C)/q keeps `terms` exact coefficients
    let t = terms + 1;
    let b = nine_product_over_euler(&[2, 7, 0], t);
    let c = nine_product_over_euler(&[1, 8, 0], t);
    let p = match family {
        Family::B => b,
        Family::C | Family::D => c,
        Family::E => &b - &c.shift(1),
        Family::F => {
            let diff = &b - &c;
            debug_assert!(diff.coeff(0).is_zero());
            DensePoly::from_coeffs(diff.coeffs().iter().skip(1).cloned().collect())
        }
        Family::A => return Err(FamilyError::Unsupported(Family::A)),
    };
    Ok(p.truncate(terms))
}

/// `prod_{k ≡ r (mod 9)} (1-q^k) / (q;q)_inf`, truncated below `q^terms`.
fn nine_product_over_euler(residues: &[usize], terms: usize) -> DensePoly {
    let exps: Vec<usize> = (1..terms).filter(|k| residues.contains(&(k % 9))).collect();
    let mut p = product_one_minus(&exps).truncate(terms);
    for k in 1..terms {
        p.div_one_minus_series(k, terms);
    }
    p
}

/// Cross-multiplied check of the ratio `P_{n,j} / P_{n,j-1}` for `P` in `{D, E}`.
pub fn quotient_identity_check(family: Family, n: usize, j: usize) -> Result<bool, FamilyError> {
    let e1 = match family {
        Family::D => 3 * j + 1,
        Family::E => 3 * j - 2,
        other => return Err(FamilyError::Unsupported(other)),
    };
    if j == 0 || n < 2 || j > (n - 2) / 3 {
        return Err(FamilyError::IndexOutOfRange { family, n, j });
    }
    let cur = andrews_term(family, n, j)?;
    let prev = andrews_term(family, n, j - 1)?;
    let mut lhs = cur;
    for e in [3 * n - 3 * j, 6 * j + 3, 6 * j] {
        lhs.mul_one_minus(e);
    }
    let mut rhs = prev.shift(6 * j);
    for e in [n - 3 * j, n - 3 * j + 1, n - 3 * j + 2, 3 * j - 1, e1] {
        rhs.mul_one_minus(e);
    }
    Ok(lhs == rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `(q;q)_{3n} / (q^3;q^3)_n`.
    Borwein,
    /// `(q;q)_{3n}^2 / (q^3;q^3)_n^2`.
    Second,
    /// `(q;q)_{5n} / (q^5;q^5)_n`.
    Third,
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "borwein" => Ok(Variant::Borwein),
            "second" => Ok(Variant::Second),
            "third" => Ok(Variant::Third),
            other => Err(format!("unknown variant '{other}'")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Borwein => "borwein",
            Variant::Second => "second",
            Variant::Third => "third",
        })
    }
}

impl Variant {
    /// Number of residue classes in the sieve.
    pub fn modulus(self) -> usize {
        match self {
            Variant::Borwein | Variant::Second => 3,
            Variant::Third => 5,
        }
    }

    /// Exponents of the `(1 - q^e)` factors contributed by step `n`.
    pub fn step_exponents(self, n: usize) -> Vec<usize> {
        match self {
            Variant::Borwein => vec![3 * n - 2, 3 * n - 1],
            Variant::Second => vec![3 * n - 2, 3 * n - 2, 3 * n - 1, 3 * n - 1],
            Variant::Third => (5 * n - 4..5 * n).collect(),
        }
    }

    /// Expected sign of residue class `c`: `+1` for class 0, `-1` otherwise.
    pub fn expected_sign(self, class: usize) -> i8 {
        if class == 0 {
            1
        } else {
            -1
        }
    }

    pub fn product(self, n: usize) -> DensePoly {
        let exps: Vec<usize> = (1..=n).flat_map(|i| self.step_exponents(i)).collect();
        product_one_minus(&exps)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantReport {
    pub variant: Variant,
    pub n: usize,
    /// Sign-normalised classes: class `c` is `sign_c * sieve(c)`.
    pub classes: Vec<DensePoly>,
    pub signs_ok: bool,
    /// For the squared variant: whether class 0 equals `A^2 + 2qBC`.
    pub alpha_identity: Option<bool>,
}

pub fn variant_sieve(n: usize, variant: Variant) -> VariantReport {
    let p = variant.product(n);
    let m = variant.modulus();
    let classes: Vec<DensePoly> = (0..m)
        .map(|c| {
            let s = p.sieve(m, c);
            if variant.expected_sign(c) < 0 {
                -&s
            } else {
                s
            }
        })
        .collect();
    let signs_ok = classes.iter().all(DensePoly::is_nonnegative);
    let alpha_identity = (variant == Variant::Second).then(|| {
        let t = triple_from_quotient(n);
        let rhs = &mul(&t.a, &t.a) + &mul(&t.b, &t.c).shift(1).scale(&BigInt::from(2));
        classes[0] == rhs
    });
    VariantReport { variant, n, classes, signs_ok, alpha_identity }
}

/// `sum_j (-1)^j q^{j(K(alpha+beta)j + K(alpha-beta))/2} [m+n; m+Kj]`.
pub fn bressoud_sum(
    m: usize,
    n: usize,
    k: usize,
    alpha: Ratio<i64>,
    beta: Ratio<i64>,
) -> Result<DensePoly, FamilyError> {
    assert!(k >= 1, "K must be positive");
    let (mi, ni, ki) = (m as i64, n as i64, k as i64);
    let kk = Ratio::from_integer(ki);
    let quad = kk * (alpha + beta);
    let lin = kk * (alpha - beta);
    let mut acc = DensePoly::zero();
    for j in (-mi / ki - 1)..=(ni / ki + 1) {
        let lower = mi + ki * j;
        if lower < 0 || lower > mi + ni {
            continue;
        }
        let jj = Ratio::from_integer(j);
        let e = jj * (quad * jj + lin) / Ratio::from_integer(2);
        if !e.is_integer() {
            return Err(FamilyError::NonIntegralExponent { j });
        }
        if e.is_negative() {
            return Err(FamilyError::NegativeExponent { j });
        }
        let e = e.to_integer().to_usize().expect("exponent fits");
        let mut t = q_binomial(mi + ni, lower, 1).shift(e);
        if j % 2 != 0 {
            t = -&t;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// `prod_{k=2}^{n-1} (1 + q^k + q^{2k})`, the common `j = 0` summand of `D, E, F`.
pub fn leading_product(n: usize) -> DensePoly {
    let mut p = DensePoly::one();
    for k in 2..n {
        let tri = DensePoly::from_terms(&[(0, 1), (k, 1), (2 * k, 1)]);
        p = mul(&p, &tri);
    }
    p
}

/// Sign-normalised check helper: `true` iff every coefficient is nonnegative.
pub fn nonnegative_through(p: &DensePoly, terms: usize) -> bool {
    p.coeffs().iter().take(terms).all(|c| !c.is_negative())
}
