use borwein::polyring::{exact_div, mul, product_one_minus, q_binomial, q_pochhammer, DensePoly, PolyError};
use num_bigint::BigInt;
use proptest::prelude::*;

fn p(cs: &[i64]) -> DensePoly {
    DensePoly::from_i64s(cs)
}

#[test]
fn difference_of_squares() {
    assert_eq!(mul(&p(&[1, -1]), &p(&[1, 1])), p(&[1, 0, -1]));
}

#[test]
fn pochhammer_three() {
    let expected = p(&[1, -1, -1, 0, 1, 1, -1]);
    assert_eq!(product_one_minus(&[1, 2, 3]), expected);
    assert_eq!(q_pochhammer(1, 3), expected);
    assert_eq!(mul(&mul(&p(&[1, -1]), &p(&[1, 0, -1])), &p(&[1, 0, 0, -1])), expected);
}

#[test]
fn empty_product_is_one() {
    assert_eq!(product_one_minus(&[]), DensePoly::one());
}

#[test]
fn base_product_for_two() {
    assert_eq!(product_one_minus(&[1, 2, 4, 5]), p(&[1, -1, -1, 1, -1, 0, 2, 0, -1, 1, -1, -1, 1]));
}

#[test]
fn exact_division_examples() {
    assert_eq!(exact_div(&p(&[1, 0, -1]), &p(&[1, -1])).unwrap(), p(&[1, 1]));
    let num = q_pochhammer(1, 6);
    let den = q_pochhammer(3, 2);
    assert_eq!(exact_div(&num, &den).unwrap(), product_one_minus(&[1, 2, 4, 5]));
    assert_eq!(exact_div(&p(&[1, 0, -1]), &p(&[1, 0, 0, -1])), Err(PolyError::NonzeroRemainder));
    assert_eq!(exact_div(&p(&[1]), &DensePoly::zero()), Err(PolyError::DivisionByZero));
}

#[test]
fn in_place_division_rejects_remainder() {
    let mut x = p(&[1, 0, -1]);
    assert_eq!(x.div_one_minus(3), Err(PolyError::NonzeroRemainder));
}

#[test]
fn q_binomial_examples() {
    assert_eq!(q_binomial(4, 2, 1), p(&[1, 1, 2, 1, 1]));
    assert_eq!(q_binomial(9, 0, 1), DensePoly::one());
    assert_eq!(q_binomial(3, 1, 3), p(&[1, 0, 0, 1, 0, 0, 1]));
    assert!(q_binomial(3, 4, 1).is_zero());
    assert!(q_binomial(3, -1, 1).is_zero());
}

#[test]
fn reciprocal_examples() {
    assert_eq!(p(&[1, 1, 0, 1]).reciprocal().unwrap(), p(&[1, 0, 1, 1]));
    let pal = p(&[1, 0, 1, 0, 1]);
    assert_eq!(pal.reciprocal().unwrap(), pal);
    assert_eq!(DensePoly::zero().reciprocal(), Err(PolyError::ZeroPolynomial));
}

#[test]
fn eval_examples() {
    assert!((p(&[1, 1]).eval_complex(1.0, 0.0).re - 2.0).abs() < 1e-15);
    let v = p(&[1, -1]).eval_complex(1.0, std::f64::consts::PI);
    assert!((v.re - 2.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    assert_eq!(p(&[1, 0, 1, 0, 1]).eval_complex(0.5, 0.0).re, 1.3125);
}

#[test]
fn zero_degree_is_none() {
    assert_eq!(DensePoly::zero().degree(), None);
    assert_eq!(DensePoly::one().degree(), Some(0));
    assert_eq!(p(&[0, 0, 0]), DensePoly::zero());
}

#[test]
fn csv_format() {
    let mut out = Vec::new();
    p(&[1, 1, 0, 1]).write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "exponent,coefficient\n0,1\n1,1\n3,1\n");
}

#[test]
fn big_coefficients_survive() {
    let big: BigInt = "123456789012345678901234567890".parse().unwrap();
    let x = DensePoly::monomial(big.clone(), 2);
    let y = mul(&x, &x);
    assert_eq!(y.coeff(4), &big * &big);
    assert_eq!(y.degree(), Some(4));
}

fn poly_strategy() -> impl Strategy<Value = DensePoly> {
    prop::collection::vec(-50i64..50, 0..12).prop_map(|v| DensePoly::from_i64s(&v))
}

fn nonzero_poly() -> impl Strategy<Value = DensePoly> {
    poly_strategy().prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #[test]
    fn mul_commutes(a in poly_strategy(), b in poly_strategy()) {
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
    }

    #[test]
    fn mul_associates(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
    }

    #[test]
    fn mul_degree_adds(a in nonzero_poly(), b in nonzero_poly()) {
        prop_assert_eq!(mul(&a, &b).degree(), Some(a.degree().unwrap() + b.degree().unwrap()));
    }

    #[test]
    fn exact_div_inverts_mul(a in poly_strategy(), b in nonzero_poly()) {
        prop_assert_eq!(exact_div(&mul(&a, &b), &b).unwrap(), a);
    }

    #[test]
    fn one_minus_roundtrip(a in poly_strategy(), k in 1usize..9) {
        let mut x = a.clone();
        x.mul_one_minus(k);
        prop_assert_eq!(&x, &mul(&a, &DensePoly::from_terms(&[(0, 1), (k, -1)])));
        x.div_one_minus(k).unwrap();
        prop_assert_eq!(x, a);
    }

    #[test]
    fn reciprocal_involution(c0 in 1i64..50, rest in prop::collection::vec(-50i64..50, 0..10)) {
        let mut cs = vec![c0];
        cs.extend(rest);
        let a = DensePoly::from_i64s(&cs);
        prop_assert_eq!(a.reciprocal().unwrap().reciprocal().unwrap(), a);
    }

    #[test]
    fn product_degree_is_exponent_sum(exps in prop::collection::vec(1usize..15, 0..10)) {
        let expected = exps.iter().sum::<usize>();
        prop_assert_eq!(product_one_minus(&exps).degree(), Some(expected));
    }

    #[test]
    fn q_binomial_nonnegative_palindromic(a in 0i64..=12, b_frac in 0.0f64..=1.0, step in prop::sample::select(vec![1usize, 3])) {
        let b = (a as f64 * b_frac).round() as i64;
        let g = q_binomial(a, b, step);
        prop_assert!(g.is_nonnegative());
        prop_assert!(g.is_palindromic());
        prop_assert_eq!(g.degree(), Some(step * (b * (a - b)) as usize));
    }

    #[test]
    fn eval_matches_mul(a in poly_strategy(), b in poly_strategy(), r in 0.1f64..1.0, theta in -3.0f64..3.0) {
        let lhs = mul(&a, &b).eval_complex(r, theta);
        let rhs = a.eval_complex(r, theta) * b.eval_complex(r, theta);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }
}
