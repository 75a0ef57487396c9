use borwein::families::leading_product;
use borwein::saddle::*;
use proptest::prelude::*;

#[test]
fn f_examples() {
    assert_eq!(f(3, 1.0), 2.0);
    assert!(f(3, 1e-9) < 1e-15);
    let (a, b, c) = (f(10, 0.8), f(10, 0.9), f(10, 1.0));
    assert!(a < b && b < c);
    assert_eq!(f(10, 1.0), degree(10) as f64 / 2.0);
}

#[test]
fn solve_examples() {
    let ctx = solve_saddle(3, 2.0).unwrap();
    assert_eq!(ctx.r, 1.0);
    let ctx = solve_saddle(7001, 7001.0).unwrap();
    assert!(ctx.r > ctx.r0 && ctx.r < 1.0);
    // frozen bisection oracle
    assert!((ctx.r - 0.98756).abs() < 1e-5);
    assert!((ctx.lambda - 79.41).abs() < 0.01);
    let central = (degree(7001) / 2) as f64;
    assert_eq!(solve_saddle(7001, central).unwrap().r, 1.0);
}

#[test]
fn g_examples() {
    assert!((g(3, 1.0) - 8.0 / 3.0).abs() < 1e-15);
    assert_eq!(g(2, 0.7), 0.0);
    for n in 3..=50 {
        let (a, b) = (g(n, 1.0), g_at_one(n));
        assert!((a - b).abs() <= 1e-12 * b, "n={n}");
    }
}

#[test]
fn power_sum_examples() {
    assert_eq!(power_sum(0, 9, 1.0), 9.0);
    assert_eq!(power_sum(2, 3, 1.0), 14.0);
    assert_eq!(power_sum(0, 5, 0.5), 0.96875);
}

#[test]
fn log_p0_examples() {
    assert!((log_p0(3, 1.0) - 3f64.ln()).abs() < 1e-15);
    assert!((log_p0(5, 1.0) - 3.0 * 3f64.ln()).abs() < 1e-14);
    let exact = leading_product(6).eval_complex(0.9, 0.0).re;
    assert!((log_p0(6, 0.9).exp() / exact - 1.0).abs() < 1e-10);
}

#[test]
fn cutoffs() {
    assert!((r0(7000) - 0.987239).abs() < 1e-5);
    assert!((r0(7000) - 0.987238559381780555).abs() < 1e-15);
    assert_eq!(j0(7000), 12);
    assert!(lambda(7001, r0(7001)) > 77.0);
    assert!((lambda(7001, r0(7001)) - 77.36662005794743).abs() < 1e-9);
    assert_eq!(lambda(50, 1.0), 50.0);
    assert_eq!(theta0(30, 1.0), 1.0 / 90.0);
    assert!((theta0(30, 1.0 - 1e-9) - 1.0 / 90.0).abs() < 1e-8);
}

#[test]
fn errors() {
    assert!(matches!(solve_saddle(10, 0.0), Err(SaddleError::OutOfRange { .. })));
    assert!(matches!(solve_saddle(10, 88.0), Err(SaddleError::OutOfRange { .. })));
    assert!(matches!(solve_saddle(2, 0.5), Err(SaddleError::OutOfRange { .. })));
}

proptest! {
    #[test]
    fn f_increasing(n in 3usize..500, a in 0.01f64..1.2, b in 0.01f64..1.2) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(f(n, lo) < f(n, hi));
    }

    #[test]
    fn residual_and_range(n in 3usize..3000, t in 0.0f64..1.0) {
        let deg = degree(n) as f64;
        let m = (0.5 + t * (deg - 1.0)).min(deg - 0.5);
        let ctx = solve_saddle(n, m).unwrap();
        prop_assert!(ctx.residual <= tolerance(m));
        if m >= n as f64 && m <= deg / 2.0 {
            prop_assert!(ctx.r > ctx.r0 && ctx.r <= 1.0);
        }
    }

    #[test]
    fn g_symmetric_under_inversion(n in 3usize..200, r in 0.2f64..1.0) {
        prop_assert!((g(n, r) - g(n, 1.0 / r)).abs() <= 1e-9 * g(n, r).max(1.0));
    }
}
