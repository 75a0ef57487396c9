//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use borwein::bounds::*;
use borwein::families::*;
use borwein::ineq::{self, LabConfig};
use borwein::saddle;
use borwein::verify::{self, RunOutcome, StepStatus, VerifyOptions};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

fn route_equivalence() -> Outcome {
    let start = Instant::now();
    for n in 0..=40 {
        let q = triple_from_quotient(n);
        ensure(q == triple_from_altsum(n), || format!("altsum differs at n={n}"))?;
        if n >= 1 {
            ensure(q == triple_from_andrews(n), || format!("family sums differ at n={n}"))?;
            ensure(decomposition_check(n), || format!("B decomposition fails at n={n}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok("n in 0..=40 agree on A, B, C".into())
}

fn structural_identities() -> Outcome {
    for n in 2..=40usize {
        let d = family_sum(Family::D, n).total;
        let e = family_sum(Family::E, n).total;
        let f = family_sum(Family::F, n).total;
        let deg = Some(n * n - n - 2);
        ensure(d.degree() == deg && e.degree() == deg && f.degree() == deg, || format!("degree at n={n}"))?;
        ensure(d.is_palindromic(), || format!("D not palindromic at n={n}"))?;
        ensure(e.reciprocal().ok().as_ref() == Some(&f), || format!("F != reciprocal(E) at n={n}"))?;
        ensure(decomposition_check(n), || format!("B decomposition at n={n}"))?;
        let t = triple_from_quotient(n);
        ensure(t.b.reciprocal().ok().as_ref() == Some(&t.c), || format!("C != reciprocal(B) at n={n}"))?;
        ensure(recursion_check(n), || format!("recursion at n={n}"))?;
    }
    for n in 0..=20 {
        ensure(variant_sieve(n, Variant::Second).alpha_identity == Some(true), || format!("alpha identity at n={n}"))?;
    }
    Ok("n in 2..=40, alpha identity n <= 20".into())
}

fn limit_agreement() -> Outcome {
    let fams = [Family::B, Family::C, Family::D, Family::E, Family::F];
    for n in [10usize, 30, 60] {
        let t = triple_from_quotient(n);
        for fam in fams {
            let finite = match fam {
                Family::B => t.b.clone(),
                Family::C => t.c.clone(),
                _ => family_sum(fam, n).total,
            };
            let lim = limit_series(fam, n).map_err(|e| e.to_string())?;
            ensure(finite.truncate(n) == lim, || format!("{fam} differs mod q^{n}"))?;
        }
    }
    let terms = 201;
    let b = limit_series(Family::B, terms).map_err(|e| e.to_string())?;
    let c = limit_series(Family::C, terms).map_err(|e| e.to_string())?;
    let diff = &b - &c;
    ensure(diff.coeff(0) == 0.into(), || "B - C has a constant term".into())?;
    let quotient = limit_series(Family::F, terms).map_err(|e| e.to_string())?;
    ensure(quotient.shift(1).truncate(terms) == diff.truncate(terms), || "(B - C)/q mismatch".into())?;
    for (name, p) in [("B", &b), ("C", &c), ("(B-C)/q", &quotient)] {
        ensure(nonnegative_through(p, 201), || format!("{name} has a negative coefficient through q^200"))?;
    }
    Ok("n in {10,30,60}, nonnegative through q^200".into())
}

fn peak_rss_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn sign_pattern() -> Outcome {
    let start = Instant::now();
    let mut opts = VerifyOptions::new(Variant::Borwein, 200);
    opts.threads = verify::default_threads();
    let cert = match verify::run(&opts).map_err(|e| e.to_string())? {
        RunOutcome::Complete(c) => c,
        RunOutcome::Interrupted { completed_n } => return Err(format!("interrupted at {completed_n}")),
    };
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600))?;
    ensure(cert.status != StepStatus::Violation, || "violation found".into())?;
    // the only zeros are the top-but-one coefficient of B and the q^1 coefficient of C
    for e in &cert.entries {
        let [a, b, c] = &e.classes[..] else { return Err("expected three classes".into()) };
        ensure(a.zero_count == 0, || format!("zero in A at n={}", e.n))?;
        let edge_b = b.degree.map(|d| d.saturating_sub(1));
        if e.n >= 2 {
            ensure(b.zero_count == 1 && b.argmin == edge_b, || format!("unexpected zero in B at n={}", e.n))?;
            ensure(c.zero_count == 1 && c.argmin == Some(1), || format!("unexpected zero in C at n={}", e.n))?;
        } else {
            ensure(b.zero_count == 0 && c.zero_count == 0, || "zero at n=1".into())?;
        }
    }
    if let Some(mb) = peak_rss_mb() {
        ensure(mb < 2048.0, || format!("peak memory {mb:.0} MB"))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut resumable = opts.clone();
    resumable.checkpoint = Some(dir.path().join("acceptance.ckpt"));
    let mut interrupts = 0;
    for stop in [40, 60, 80] {
        resumable.stop_after = Some(stop);
        if let RunOutcome::Interrupted { .. } = verify::run(&resumable).map_err(|e| e.to_string())? {
            interrupts += 1;
        }
    }
    resumable.stop_after = None;
    let resumed = match verify::run(&resumable).map_err(|e| e.to_string())? {
        RunOutcome::Complete(c) => c,
        RunOutcome::Interrupted { .. } => return Err("resumed run interrupted".into()),
    };
    ensure(interrupts == 3, || format!("{interrupts} interrupts"))?;
    let same = serde_json::to_vec(&resumed).unwrap() == serde_json::to_vec(&cert).unwrap();
    ensure(same, || "resumed certificate differs".into())?;
    let mem = peak_rss_mb().map_or("n/a".into(), |m| format!("{m:.0} MB"));
    Ok(format!("n <= 200 in {elapsed:.1?}, peak {mem}, resume identical after 3 interrupts"))
}

fn constants() -> Outcome {
    let close = |name: &str, got: f64, want: f64, tol: f64| {
        ensure((got - want).abs() <= tol, || format!("{name} = {got}, want {want} +- {tol}"))
    };
    let r0 = saddle::r0(7000);
    close("r0", r0, 0.987239, 1e-5)?;
    close("1/(1-r0)", 1.0 / (1.0 - r0), 78.3612, 1e-3)?;
    close("phi*", phi_star(7000, r0, 1.5), 14.5302, 1e-3)?;
    let parts = eps2_parts(N_REF);
    close("integral", parts.integral, 0.0177756, 1e-5)?;
    close("inner", parts.inner, 0.195842, 1e-4)?;
    let series = |f, b| secondary_series(f, b).map_err(|e| e.to_string());
    close("series D", series(Family::D, SECONDARY_BOOST)?, 0.18618, 1e-4)?;
    close("series E", series(Family::E, SECONDARY_BOOST * E_EXTRA_BOOST)?, 0.04219, 1e-4)?;
    close("series F", series(Family::F, SECONDARY_BOOST)?, 0.04218, 1e-4)?;
    close("eps0(77)", eps0_bound(77.0), 0.54321, 1e-4)?;
    let e3d = eps3_bound(Family::D, 7001).map_err(|e| e.to_string())?;
    let e3e = eps3_bound(Family::E, 7001).map_err(|e| e.to_string())?;
    ensure(e3d < 0.004 && e3e < 0.008, || format!("eps3 {e3d} / {e3e}"))?;
    let td = tail_factor(Family::D, 1.0).map_err(|e| e.to_string())?;
    let te = tail_factor(Family::E, TAIL_BOOST_E).map_err(|e| e.to_string())?;
    ensure(td < 1.185 && te < 1.329, || format!("tail factors {td} / {te}"))?;
    Ok(format!("r0={r0:.6}, inner={:.6}, eps0(77)={:.5}", parts.inner, eps0_bound(77.0)))
}

fn table_certificate() -> Outcome {
    let start = Instant::now();
    let n = 7001;
    let central = (saddle::degree(n) / 2) as f64;
    let mut worst = [0.0f64; 2];
    for m in [n as f64, central] {
        for fam in [Family::D, Family::E, Family::F] {
            let c = certificate(n, m, fam).map_err(|e| e.to_string())?;
            let (cap, slot) = if fam == Family::D { (0.982, 0) } else { (0.864, 1) };
            ensure(c.total <= cap, || format!("{fam} at m={m}: total {}", c.total))?;
            ensure(c.log_lower_bound.is_some_and(|l| l > 0.0), || format!("{fam} at m={m}: no positive bound"))?;
            worst[slot] = worst[slot].max(c.total);
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("max total D {:.3}, E/F {:.3}", worst[0], worst[1]))
}

fn gaussian_oracle() -> Outcome {
    let mut gaps = Vec::new();
    for n in [50usize, 100, 200] {
        let m = saddle::degree(n) / 2;
        let exact = leading_product(n).coeff(m).to_f64().ok_or("coefficient overflow")?;
        let ratio = gaussian_estimate(n, m as f64).map_err(|e| e.to_string())? / exact;
        ensure((0.5..=2.0).contains(&ratio), || format!("ratio {ratio} at n={n}"))?;
        gaps.push((ratio - 1.0).abs());
    }
    ensure(gaps[2] < gaps[0], || "no improvement from n=50 to n=200".into())?;
    Ok(format!("|ratio-1|: {:.2e}, {:.2e}, {:.2e}", gaps[0], gaps[1], gaps[2]))
}

fn inequality_lab() -> Outcome {
    let start = Instant::now();
    let reports = ineq::run("all", LabConfig::default()).map_err(|e| e.to_string())?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).map(|r| r.id.clone()).collect();
    ensure(failed.is_empty(), || format!("failed: {}", failed.join(", ")))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{} checks", reports.len()))
}

fn saddle_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5add1e);
    for _ in 0..1000 {
        let n = rng.gen_range(3..=7001usize);
        let deg = saddle::degree(n) as f64;
        let m = rng.gen_range(0.5..deg - 0.5);
        let ctx = saddle::solve_saddle(n, m).map_err(|e| e.to_string())?;
        let resid = (saddle::f(n, ctx.r) - m).abs();
        ensure(resid <= 1e-10 * m.max(1.0), || format!("residual {resid} at n={n}, m={m}"))?;
        if (n as f64) <= m && m <= deg / 2.0 {
            ensure(ctx.r > ctx.r0 && ctx.r <= 1.0, || format!("r={} outside (r0,1] at n={n}, m={m}", ctx.r))?;
        }
    }
    for n in 3..=50 {
        let (a, b) = (saddle::g(n, 1.0), saddle::g_at_one(n));
        ensure((a - b).abs() <= 1e-12 * b, || format!("g(n,1) mismatch at n={n}"))?;
    }
    Ok("1000 random (n, m), g(n,1) for n <= 50".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("route-equivalence", route_equivalence),
        ("structural-identities", structural_identities),
        ("limit-agreement", limit_agreement),
        ("sign-pattern", sign_pattern),
        ("constants", constants),
        ("table-certificate", table_certificate),
        ("gaussian-oracle", gaussian_oracle),
        ("inequality-lab", inequality_lab),
        ("saddle-solver", saddle_solver),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({t:.2?}): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name} ({t:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
