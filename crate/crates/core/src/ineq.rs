//! Numerical stress tests for the auxiliary inequalities behind the error bounds.
//!
//! Every check evaluates `margin = bound - value` (or a relative version) over a
//! grid or a seeded random sample and reports the worst point. A check passes
//! iff its worst margin is nonnegative; where a closed form has exact equality
//! cases, a stated absolute tolerance is added to the margin.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bounds;
use crate::families::{andrews_term, Family};
use crate::saddle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IneqError {
    #[error("unknown check id '{0}'")]
    UnknownId(String),
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IneqReport {
    pub id: String,
    pub samples: usize,
    pub worst_margin: f64,
    /// Named coordinates of the worst sample.
    pub worst_point: Vec<(String, f64)>,
    /// Absolute allowance already folded into every margin.
    pub tolerance: f64,
    pub pass: bool,
}

struct Tracker {
    id: String,
    samples: usize,
    worst: f64,
    point: Vec<(String, f64)>,
    tolerance: f64,
}

impl Tracker {
    fn new(id: &str, tolerance: f64) -> Self {
        Tracker {
            id: id.to_string(),
            samples: 0,
            worst: f64::INFINITY,
            point: Vec::new(),
            tolerance,
        }
    }

    fn observe(&mut self, margin: f64, point: &[(&str, f64)]) {
        self.samples += 1;
        let m = margin + self.tolerance;
        if m < self.worst || m.is_nan() && !self.worst.is_nan() {
            self.worst = m;
            self.point = point.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        }
    }


    fn finish(self) -> IneqReport {
        let pass = self.samples > 0 && self.worst >= 0.0;
        IneqReport {
            id: self.id,
            samples: self.samples,
            worst_margin: self.worst,
            worst_point: self.point,
            tolerance: self.tolerance,
            pass,
        }
    }
}

/// Shared knobs for the randomised and sampled checks.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LabConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { samples: 200_000, seed: 0 }
    }
}

pub const IDS: &[&str] = &[
    "region",
    "beta",
    "power-sums",
    "sinh-ratio",
    "tail-aux",
    "sine-sum",
    "phi",
    "misc",
    "derivative-bounds",
    "tilde-bound",
    "tilde-majorant",
];

/// Runs one check group (or `all`).
pub fn run(id: &str, cfg: LabConfig) -> Result<Vec<IneqReport>, IneqError> {
    if id == "all" {
        let mut out = Vec::new();
        for id in IDS {
            out.extend(run(id, cfg)?);
        }
        return Ok(out);
    }
    Ok(match id {
        "region" => check_region(cfg.samples),
        "beta" => vec![check_beta(BetaKind::Cubic, &beta_grid()), check_beta(BetaKind::Quartic, &beta_grid())],
        "power-sums" => check_power_sums(300, 200),
        "sinh-ratio" => vec![check_sinh_ratio(cfg.samples, cfg.seed)],
        "tail-aux" => vec![check_tail_aux(400, 2001)],
        "sine-sum" => check_sine_sum(cfg.samples, cfg.seed),
        "phi" => check_phi(&[7001, 7500, 10_000, 100_000, 1_000_000]),
        "misc" => check_misc(cfg.samples.min(20_000), cfg.seed),
        "derivative-bounds" => check_derivative_bounds(&[10, 50, 200, 1000, 7001], 720),
        "tilde-bound" => vec![check_tilde_bounds(400)],
        "tilde-majorant" => vec![check_tilde_majorant(14, &[0.5, 0.9, 0.99], 720)],
        other => return Err(IneqError::UnknownId(other.to_string())),
    })
}

// ---------------------------------------------------------------------------
// region bounds

/// `-log r / (3 (1 - r))`, the angular half-width of the region at radius `r`.
pub fn region_half_width(r: f64) -> f64 {
    if (1.0 - r).abs() < 1e-12 {
        1.0 / 3.0
    } else {
        -r.ln() / (3.0 * (1.0 - r))
    }
}

/// `N(z) / (1 + z + z^2)^p`, one of the four functions bounded on the region.
#[derive(Clone, Copy, Debug)]
pub struct RegionFn {
    pub id: &'static str,
    /// Coefficients of `N`, ascending.
    pub num: &'static [f64],
    pub power: i32,
    pub bound: f64,
}

impl RegionFn {
    pub fn value(&self, z: Complex64) -> f64 {
        let n = self.num.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
        n.norm() / (1.0 + z + z * z).norm().powi(self.power)
    }

    /// Bound on `|f'|` over the disc of radius `h` about `z`, from coefficient sums:
    /// `|N'| <= sum k|a_k| rho^{k-1}`, `|N| <= sum |a_k| rho^k`, `|D'| <= 1 + 2 rho` and
    /// `|D| >= |D(z)| - (1 + 2 rho) h` with `rho = |z| + h`.
    pub fn local_lipschitz(&self, z: Complex64, h: f64) -> f64 {
        let rho = z.norm() + h;
        let dprime = 1.0 + 2.0 * rho;
        let delta = (1.0 + z + z * z).norm() - dprime * h;
        assert!(delta > 0.0, "sample spacing too coarse near a pole");
        let n0: f64 = self.num.iter().enumerate().map(|(k, a)| a.abs() * rho.powi(k as i32)).sum();
        let n1: f64 = self.num.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a.abs() * rho.powi(k as i32 - 1)).sum();
        let p = self.power;
        n1 / delta.powi(p) + p as f64 * dprime * n0 / delta.powi(p + 1)
    }
}

pub const REGION_FNS: [RegionFn; 4] = [
    RegionFn { id: "region-recip", num: &[1.0], power: 1, bound: 1.002 },
    RegionFn { id: "region-square", num: &[1.0, -2.0, 1.0], power: 1, bound: 1.005 },
    RegionFn { id: "region-cubic", num: &[1.0, 7.0, 0.0, -7.0, -1.0], power: 3, bound: 1.4 },
    RegionFn {
        id: "region-quartic",
        num: &[1.0, 12.0, -12.0, -56.0, -12.0, 12.0, 1.0],
        power: 4,
        bound: 5.0 / 3.0,
    },
];

/// Boundary points of the upper half of the region, equally spaced in arc length.
///
/// Returns the points and the largest arc-length gap between neighbours.
pub fn region_boundary(samples: usize) -> (Vec<Complex64>, f64) {
    // radius where the half-width reaches pi; below it the whole circle is inside
    let (mut lo, mut hi) = (1e-12_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if region_half_width(mid) > PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_star = hi;
    let curve = |r: f64| Complex64::from_polar(r, region_half_width(r).min(PI));
    // dense parametrisation: log-spaced radii, linear radii, then the unit arc
    let dense = 400_000;
    let mut params: Vec<(f64, bool)> = Vec::with_capacity(3 * dense);
    for i in 0..dense {
        let t = i as f64 / dense as f64;
        params.push(((r_star.ln() * (1.0 - t) + 0.5f64.ln() * t).exp(), false));
    }
    for i in 0..dense {
        params.push((0.5 + 0.5 * i as f64 / dense as f64, false));
    }
    for i in 0..=dense {
        params.push((1.0 / 3.0 * (1.0 - i as f64 / dense as f64), true));
    }
    let point = |p: (f64, bool)| if p.1 { Complex64::from_polar(1.0, p.0) } else { curve(p.0) };
    let mut cum = vec![0.0; params.len()];
    for i in 1..params.len() {
        cum[i] = cum[i - 1] + (point(params[i]) - point(params[i - 1])).norm();
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(samples);
    let mut seg = 0;
    for k in 0..samples {
        let s = total * k as f64 / (samples - 1).max(1) as f64;
        while seg + 2 < params.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let (a, b) = (params[seg], params[seg + 1]);
        let w = if cum[seg + 1] > cum[seg] { ((s - cum[seg]) / (cum[seg + 1] - cum[seg])).clamp(0.0, 1.0) } else { 0.0 };
        if a.1 == b.1 {
            out.push(point((a.0 + w * (b.0 - a.0), a.1)));
        } else {
            out.push(point(if w < 0.5 { a } else { b }));
        }
    }
    let max_gap = out.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
    // chord gaps underestimate arc gaps by at most the dense-grid resolution
    let dense_gap = (1..params.len()).map(|i| cum[i] - cum[i - 1]).fold(0.0, f64::max);
    (out, max_gap + 2.0 * dense_gap)
}

/// Sup of the four bounded functions on the region boundary, with a local Lipschitz
/// allowance for the gaps between samples. Conjugate symmetry covers the lower half,
/// and the maximum modulus principle carries the bound to the interior.
pub fn check_region(samples: usize) -> Vec<IneqReport> {
    let (pts, gap) = region_boundary(samples.max(2));
    let h = gap / 2.0;
    REGION_FNS
        .iter()
        .map(|f| {
            let mut t = Tracker::new(f.id, 0.0);
            for z in &pts {
                t.observe(f.bound - f.value(*z) - f.local_lipschitz(*z, h) * h, &[("re", z.re), ("im", z.im)]);
            }
            t.finish()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// beta integrals

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaKind {
    Cubic,
    Quartic,
}

pub fn beta_grid() -> Vec<f64> {
    (1..=4000).map(|i| i as f64 * 0.1).collect()
}

/// `int_0^{3/4} w e^{-w x^2}(e^{w x^3} - 1) dx` or `int_0^{3/(4 sqrt2)} w e^{-w x^2}(e^{w x^4} - 1) dx`.
pub fn beta_integral(kind: BetaKind, w: f64) -> f64 {
    match kind {
        BetaKind::Cubic => bounds::integrate(|x| w * (-w * x * x).exp() * (w * x * x * x).exp_m1(), 0.0, 0.75, 1e-12),
        BetaKind::Quartic => bounds::integrate(
            |x| w * (-w * x * x).exp() * (w * x.powi(4)).exp_m1(),
            0.0,
            3.0 / (4.0 * 2f64.sqrt()),
            1e-12,
        ),
    }
}

pub fn beta_bound(kind: BetaKind) -> f64 {
    match kind {
        BetaKind::Cubic => 1.1,
        BetaKind::Quartic => 1.0 / (3.0 * 3f64.sqrt()),
    }
}

pub fn check_beta(kind: BetaKind, w_grid: &[f64]) -> IneqReport {
    let id = match kind {
        BetaKind::Cubic => "beta-cubic",
        BetaKind::Quartic => "beta-quartic",
    };
    let mut t = Tracker::new(id, 0.0);
    for &w in w_grid {
        t.observe(beta_bound(kind) - beta_integral(kind, w), &[("w", w)]);
    }
    t.finish()
}

// ---------------------------------------------------------------------------
// power sums

/// Left and right sides of the six power-sum inequalities `lhs >= rhs`.
pub fn power_sum_sides(n: usize, r: f64) -> [(f64, f64); 6] {
    let x = |m| saddle::power_sum(m, n, r);
    let (x0, x2, x3, x4) = (x(0), x(2), x(3), x(4));
    let a = r * r + 4.0 * r + 1.0;
    let b = r * r + 10.0 * r + 1.0;
    [
        (3.0 * r * r * x2, x0.powi(3)),
        ((r + 1.0) * x0.powi(3), r * r * x2),
        (a * x0 * x2, r * (r + 1.0) * x3),
        (a * a * x2.powi(3), (r + 1.0).powi(3) * x3 * x3 * x0),
        (b * x0 * x0 * x2, r * r * x4),
        (b * x2 * x2, (r + 1.0) * x4 * x0),
    ]
}

/// Relative margins `(lhs - rhs)/lhs` over `1 <= n <= n_max` and `r` on a grid in `(0, 1]`.
///
/// Inequalities 2 to 6 become equalities for the infinite sums, so large `n` with
/// `r < 1` needs a rounding allowance.
pub fn check_power_sums(n_max: usize, r_points: usize) -> Vec<IneqReport> {
    let mut ts: Vec<Tracker> = (1..=6).map(|i| Tracker::new(&format!("power-sum-{i}"), 1e-12)).collect();
    for n in 1..=n_max {
        for i in 1..=r_points {
            let r = i as f64 / r_points as f64;
            for (t, (l, rhs)) in ts.iter_mut().zip(power_sum_sides(n, r)) {
                t.observe((l - rhs) / l, &[("n", n as f64), ("r", r)]);
            }
        }
    }
    ts.into_iter().map(Tracker::finish).collect()
}

// ---------------------------------------------------------------------------
// sinh ratio

/// Relative margin of `|sinh(az)/sinh(bz)| <= sin(ac)/sin(bc)`.
pub fn sinh_ratio_margin(a: f64, b: f64, c: f64, z: Complex64) -> f64 {
    let value = ((a * z).sinh() / (b * z).sinh()).norm();
    let bound = (a * c).sin() / (b * c).sin();
    (bound - value) / bound
}

pub fn check_sinh_ratio(samples: usize, seed: u64) -> IneqReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5111);
    let mut t = Tracker::new("sinh-ratio", 1e-12);
    for _ in 0..samples {
        let b: f64 = rng.gen_range(0.1..10.0);
        let a: f64 = b * rng.gen_range(1e-6..=1.0);
        let c: f64 = PI / b * rng.gen_range(1e-6..0.999);
        let x: f64 = rng.gen_range(-30.0..30.0) / b;
        let ymax = (x * x + c * c).sqrt();
        let y: f64 = rng.gen_range(-ymax..=ymax);
        let z = Complex64::new(x, y);
        t.observe(sinh_ratio_margin(a, b, c, z), &[("a", a), ("b", b), ("c", c), ("re", x), ("im", y)]);
    }
    t.finish()
}

// ---------------------------------------------------------------------------
// tail auxiliary bound

/// `exp(-(2r/(1+r^2)) sin^2(theta/2)) - |(1 + r e^{i theta} + r^2 e^{2 i theta})/(1 + r + r^2)|`.
pub fn tail_aux_margin(r: f64, theta: f64) -> f64 {
    let z = Complex64::from_polar(r, theta);
    let lhs = ((1.0 + z + z * z) / (1.0 + r + r * r)).norm();
    let s = (theta / 2.0).sin();
    (-(2.0 * r / (1.0 + r * r)) * s * s).exp() - lhs
}

pub fn check_tail_aux(r_points: usize, theta_points: usize) -> IneqReport {
    let mut t = Tracker::new("tail-aux", 1e-14);
    for i in 1..=r_points {
        let r = 2.0 * i as f64 / r_points as f64;
        for k in 0..theta_points {
            let theta = -PI + 2.0 * PI * k as f64 / (theta_points - 1) as f64;
            t.observe(tail_aux_margin(r, theta), &[("r", r), ("theta", theta)]);
        }
    }
    t.finish()
}

// ---------------------------------------------------------------------------
// weighted sine sums

/// `sum_{m=a}^{a+b-1} r^{m-a} sin^2(m theta / 2)`.
pub fn sine_sum_direct(a: u32, b: u32, r: f64, theta: f64) -> f64 {
    let mut w = 1.0;
    let mut s = 0.0;
    for m in a..a + b {
        let x = (m as f64 * theta / 2.0).sin();
        s += w * x * x;
        w *= r;
    }
    s
}

fn geometric(r: f64, b: f64) -> f64 {
    if (1.0 - r).abs() < 1e-9 {
        b
    } else {
        (1.0 - r.powf(b)) / (1.0 - r)
    }
}

/// Closed form of [`sine_sum_direct`] via `sin^2 x = (1 - cos 2x)/2`.
pub fn sine_sum_closed(a: u32, b: u32, r: f64, theta: f64) -> f64 {
    let (af, bf) = (a as f64, b as f64);
    let c = |k: f64| (k * theta).cos();
    let num = (c(af) - r * c(af - 1.0)) - r.powf(bf) * (c(af + bf) - r * c(af + bf - 1.0));
    0.5 * (geometric(r, bf) - num / (1.0 - 2.0 * r * theta.cos() + r * r))
}

/// Lower bound for [`sine_sum_direct`].
pub fn sine_sum_lower(b: u32, r: f64, theta: f64) -> f64 {
    let bf = b as f64;
    let tan2 = (theta / 2.0).tan().powi(2);
    let (inner_b, inner_1) = if (1.0 - r).abs() < 1e-9 {
        (tan2 / 3.0, bf * bf * tan2 / 3.0)
    } else {
        let rb = r.powf(bf);
        let rb3 = r.powf(bf / 3.0);
        let kappa = (1.0 - rb) * (1.0 - rb3) / ((1.0 + rb) * (1.0 + rb3));
        (
            kappa * ((1.0 + rb) / (1.0 - rb)).powi(2) * tan2,
            kappa * ((1.0 + r) / (1.0 - r)).powi(2) * tan2,
        )
    };
    0.5 * geometric(r, bf) * (1.0 - ((1.0 + inner_b) / (1.0 + inner_1)).sqrt())
}

pub fn check_sine_sum(samples: usize, seed: u64) -> Vec<IneqReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e5e);
    let mut ineq = Tracker::new("sine-sum", 1e-12);
    let mut ident = Tracker::new("sine-sum-closed-form", 0.0);
    for i in 0..samples {
        let a: u32 = rng.gen_range(1..=40);
        let b: u32 = rng.gen_range(2..=120);
        let r: f64 = if i % 10 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
        let theta: f64 = rng.gen_range(-0.999 * PI..0.999 * PI);
        let direct = sine_sum_direct(a, b, r, theta);
        let pt = [("a", a as f64), ("b", b as f64), ("r", r), ("theta", theta)];
        ineq.observe(direct - sine_sum_lower(b, r, theta), &pt);
        if (1.0 - r).abs() > 1e-3 {
            // the closed form subtracts from the geometric sum, so rounding scales with it
            let scale = geometric(r, b as f64).max(1.0);
            let closed = sine_sum_closed(a, b, r, theta);
            ident.observe(1e-10 * scale - (closed - direct).abs(), &pt);
        }
    }
    vec![ineq.finish(), ident.finish()]
}

// ---------------------------------------------------------------------------
// off-arc exponent

/// The exponent `phi(n, a, b, r, rho)` of the off-arc decay of the leading summand.
pub fn phi(n: usize, a: f64, b: f64, r: f64, rho: f64) -> f64 {
    let nf = n as f64;
    let unit = (1.0 - r).abs() < saddle::UNIT_EPS;
    let geom = if unit { nf / 12.0 } else { (1.0 - r.powf(nf / 12.0)) / (1.0 - r) };
    let ratio = if unit { 1.0 / b } else { (1.0 - r) * (1.0 + r.powf(b)) / ((1.0 + r) * (1.0 - r.powf(b))) };
    let ra = r.powf(a);
    let shape = 1.0 - ((1.0 + ratio * ratio * rho * rho) / (1.0 + rho * rho)).sqrt();
    (b / nf).powi(3) * ra / (1.0 + ra * ra) * (1.0 + r) * (1.0 + r) / 4.0 * geom * shape
}

/// `phi(n, 3 j0 + 2, n - 6 j0 - 2, r, rho) >= phi*(n, r, rho)` and its numeric prerequisites.
pub fn check_phi(ns: &[usize]) -> Vec<IneqReport> {
    let mut main = Tracker::new("phi-minorant", 0.0);
    let mut pre = Tracker::new("phi-prerequisites", 0.0);
    for &n in ns {
        let nf = n as f64;
        let j0 = saddle::j0(n) as f64;
        let (a, b) = (3.0 * j0 + 2.0, nf - 6.0 * j0 - 2.0);
        let r0 = saddle::r0(n);
        let pt = [("n", nf)];
        pre.observe(b / nf - 0.9887, &pt);
        let lower_pow = (-(3.0 * nf.log2() + 2.0) * (saddle::alpha() / nf).sqrt()).exp();
        pre.observe(lower_pow - 0.5958, &pt);
        pre.observe((1.0 + r0).powi(2) / 4.0 - 74.0 / 75.0, &pt);
        for i in 0..=200 {
            let r = r0 + (1.0 - r0) * i as f64 / 200.0;
            let ratio = if i == 200 { 1.0 / b } else { (1.0 - r) * (1.0 + r.powf(b)) / ((1.0 + r) * (1.0 - r.powf(b))) };
            pre.observe(1.0 / 150.0 - ratio, &[("n", nf), ("r", r)]);
            for k in 0..=60 {
                let rho = 1.0 / 3.0 + (1.5 - 1.0 / 3.0) * k as f64 / 60.0;
                let lhs = phi(n, a, b, r, rho);
                let rhs = bounds::phi_star(n, r, rho);
                main.observe((lhs - rhs) / rhs, &[("n", nf), ("r", r), ("rho", rho)]);
            }
        }
    }
    vec![main.finish(), pre.finish()]
}

// ---------------------------------------------------------------------------
// scalar inequalities

/// Relative margin of
/// `(1-r^{b+1})(1-r^{b-1}) / (r^{b-1}(b^2-1)(1-r)^2) >= (1+r^{b/3})(1+r^b) / (2(r^{b/3}+r^b))`,
/// evaluated in the equivalent hyperbolic form with `z = (b/2) log r`.
pub fn rb_ratio_margin(b: f64, r: f64) -> f64 {
    let z = 0.5 * b * r.ln();
    if z == 0.0 {
        return 0.0;
    }
    let lhs = (z + z / b).sinh() * (z - z / b).sinh() / ((b * b - 1.0) * (z / b).sinh().powi(2));
    let rhs = (z / 3.0).cosh() * z.cosh() / (2.0 * z / 3.0).cosh();
    (lhs - rhs) / rhs
}

pub fn check_rb_ratio(samples: usize, seed: u64) -> IneqReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7b);
    let mut t = Tracker::new("rb-ratio", 0.0);
    for b in 2..=60 {
        for i in 1..=300 {
            let r = 1.5 * i as f64 / 300.0;
            t.observe(rb_ratio_margin(b as f64, r), &[("b", b as f64), ("r", r)]);
        }
    }
    for _ in 0..samples {
        let b: f64 = rng.gen_range(2.0..100.0);
        let r: f64 = rng.gen_range(0.01..1.5);
        if (1.0 - r).abs() > 1e-3 {
            t.observe(rb_ratio_margin(b, r), &[("b", b), ("r", r)]);
        }
    }
    t.finish()
}

/// The four scalar inequalities on their default grids.
pub fn check_misc(samples: usize, seed: u64) -> Vec<IneqReport> {
    vec![
        check_rb_ratio(samples, seed),
        check_r_derivative(200, 400),
        check_r_rational(&[6924, 7000, 7001, 10_000, 100_000], 2000),
        check_chebyshev(60, 4001),
    ]
}

/// `(1 - r^n)/(1 - r)` as a finite geometric sum.
fn geom_sum(n: usize, r: f64) -> f64 {
    (0..n).rev().fold(0.0, |acc, _| acc * r + 1.0)
}

/// `(1-r^n)^2/(1-r)^2 >= d/dr (1-r^n)/(1-r) >= (1-r^n)(1-r^{(n-1)/2})/(1-r)^2`,
/// the derivative by a central difference with step `1e-6 (1 - r)`.
pub fn check_r_derivative(n_max: usize, r_points: usize) -> IneqReport {
    let mut t = Tracker::new("r-derivative", 1e-4);
    for n in 1..=n_max {
        for i in 1..r_points {
            let r = i as f64 / r_points as f64;
            let h = 1e-6 * (1.0 - r);
            let d = (geom_sum(n, r + h) - geom_sum(n, r - h)) / (2.0 * h);
            let g = geom_sum(n, r);
            let upper = g * g;
            let lower = g * (1.0 - r.powf((n as f64 - 1.0) / 2.0)) / (1.0 - r);
            let pt = [("n", n as f64), ("r", r)];
            t.observe((upper - d) / upper, &pt);
            t.observe((d - lower) / d.max(f64::MIN_POSITIVE).max(lower), &pt);
        }
    }
    t.finish()
}

/// `(1-r^{n/12})(1-r^{(n-12)/24}) / ((1-r)(1-r^n)) >= 24` for `r = e^{-t}`,
/// `0 <= t <= sqrt(alpha/n)`.
pub fn r_rational_value(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    if t == 0.0 {
        return (nf - 12.0) / 288.0;
    }
    let om = |x: f64| -(-x).exp_m1();
    om(t * nf / 12.0) * om(t * (nf - 12.0) / 24.0) / (om(t) * om(t * nf))
}

pub fn check_r_rational(ns: &[usize], t_points: usize) -> IneqReport {
    let mut tr = Tracker::new("r-rational", 0.0);
    for &n in ns {
        let tmax = (saddle::alpha() / n as f64).sqrt();
        for i in 0..t_points {
            let t = tmax * i as f64 / t_points as f64;
            tr.observe((r_rational_value(n, t) - 24.0) / 24.0, &[("n", n as f64), ("r", (-t).exp())]);
        }
    }
    tr.finish()
}

/// `T_n(x)` by the three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// `(-n^2(1-x)(2x+3) + 3(1+x)) / (n^2(1-x) + 3(1+x))`.
pub fn chebyshev_lower(n: usize, x: f64) -> f64 {
    let n2 = (n * n) as f64;
    (-n2 * (1.0 - x) * (2.0 * x + 3.0) + 3.0 * (1.0 + x)) / (n2 * (1.0 - x) + 3.0 * (1.0 + x))
}

pub fn check_chebyshev(n_max: usize, x_points: usize) -> IneqReport {
    let mut t = Tracker::new("chebyshev", 1e-10);
    for n in 1..=n_max {
        for i in 0..x_points {
            let x = -1.0 + 2.0 * i as f64 / (x_points - 1) as f64;
            t.observe(chebyshev_t(n, x) - chebyshev_lower(n, x), &[("n", n as f64), ("x", x)]);
        }
    }
    t.finish()
}

// ---------------------------------------------------------------------------
// third and fourth log-derivatives of the leading summand

/// `sum_k k^3 w (1 - w^2)(1 + 7w + w^2)/(1 + w + w^2)^3` and the quartic analogue at
/// `w = (r e^{i theta})^k`, `k = 2..n-1`: up to a unit factor, the third and fourth
/// `theta`-derivatives of `log P_{n,0}(r e^{i theta})`.
pub fn log_derivatives(n: usize, r: f64, theta: f64) -> (Complex64, Complex64) {
    let q = Complex64::from_polar(r, theta);
    let mut w = q;
    let mut d3 = Complex64::new(0.0, 0.0);
    let mut d4 = Complex64::new(0.0, 0.0);
    for k in 2..n {
        w *= q;
        let kf = k as f64;
        let t = 1.0 + w + w * w;
        let t2 = t * t;
        let w2 = w * w;
        let w3 = w2 * w;
        d3 += kf.powi(3) * w * (1.0 - w2) * (1.0 + 7.0 * w + w2) / (t2 * t);
        let num = 1.0 + 12.0 * w - 12.0 * w2 - 56.0 * w3 - 12.0 * w3 * w + 12.0 * w3 * w2 + w3 * w3;
        d4 += kf.powi(4) * w * num / (t2 * t2);
    }
    (d3, d4)
}

pub fn check_derivative_bounds(ns: &[usize], theta_points: usize) -> Vec<IneqReport> {
    let mut t3 = Tracker::new("derivative-cubic", 0.0);
    let mut t4 = Tracker::new("derivative-quartic", 0.0);
    for &n in ns {
        let r0 = saddle::r0(n);
        for i in 0..=8 {
            let r = r0 + (1.0 - r0) * i as f64 / 8.0;
            let x3 = saddle::power_sum(3, n, r);
            let x4 = saddle::power_sum(4, n, r);
            let th0 = saddle::theta0(n, r);
            for k in 0..theta_points {
                let theta = -th0 + 2.0 * th0 * k as f64 / (theta_points - 1) as f64;
                let (d3, d4) = log_derivatives(n, r, theta);
                let pt = [("n", n as f64), ("r", r), ("theta", theta)];
                t3.observe(1.0 - d3.norm() / (1.4 * x3), &pt);
                t4.observe(1.0 - d4.norm() / (5.0 / 3.0 * x4), &pt);
            }
        }
    }
    vec![t3.finish(), t4.finish()]
}

// ---------------------------------------------------------------------------
// majorants

/// Relative margin of each successive majorant ratio against its closed-form bound,
/// for `n <= n_max` and radii in `[r0(n), 1)` plus a few fixed radii.
pub fn check_tilde_bounds(n_max: usize) -> IneqReport {
    let mut t = Tracker::new("tilde-bound", 1e-12);
    for n in 5..=n_max {
        let r0 = saddle::r0(n);
        let mut radii = vec![0.5, 0.9, 0.99];
        radii.extend((0..6).map(|i| r0 + (1.0 - r0) * i as f64 / 6.0));
        for fam in [Family::D, Family::E, Family::F] {
            for j in 1..=(n - 2) / 3 {
                for &r in &radii {
                    let ratio = bounds::tilde_ratio(fam, n, j, r).expect("valid index");
                    let bound = bounds::tilde_ratio_bound(fam, n, j, r).expect("valid index");
                    let fam_code = match fam {
                        Family::D => 0.0,
                        Family::E => 1.0,
                        _ => 2.0,
                    };
                    t.observe((bound - ratio) / bound, &[("family", fam_code), ("n", n as f64), ("j", j as f64), ("r", r)]);
                }
            }
        }
    }
    t.finish()
}

/// `|P_{n,j}(r e^{i theta})| <= (1 + 1e-9) P~_{n,j}(r)` on a `theta` grid, in log form.
pub fn check_tilde_majorant(n_max: usize, radii: &[f64], theta_points: usize) -> IneqReport {
    let mut t = Tracker::new("tilde-majorant", (1e-9f64).ln_1p());
    for n in 2..=n_max {
        for fam in [Family::D, Family::E, Family::F] {
            for j in 0..=(n - 2) / 3 {
                let poly = andrews_term(fam, n, j).expect("valid index");
                for &r in radii {
                    let tv = bounds::tilde_value(fam, n, j, r).expect("valid index");
                    for k in 0..theta_points {
                        let theta = -PI + 2.0 * PI * (k as f64 + 0.5) / theta_points as f64;
                        let v = poly.eval_complex(r, theta).norm().ln();
                        t.observe(tv - v, &[("n", n as f64), ("j", j as f64), ("r", r), ("theta", theta)]);
                    }
                }
            }
        }
    }
    t.finish()
}
