//! `borwein`: command-line front end for the polynomial, saddle, bound,
//! inequality and verification modules.
//!
//! Exit codes: 0 success, 1 violation or failed check, 2 usage error, 3 internal error.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use borwein::bounds::{self, ErrorBudget};
use borwein::families::{self, Family, Triple, Variant};
use borwein::ineq::{self, LabConfig};
use borwein::polyring::DensePoly;
use borwein::saddle;
use borwein::verify::{self, RunOutcome, VerifyError, VerifyOptions};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

const BUILD_ID: &str = concat!("borwein-cli/", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "borwein", version, about = "Exact and numeric tools for the Borwein sign pattern")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Output format; each command picks a sensible default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Quotient,
    Andrews,
    Altsum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum FamilyArg {
    A,
    B,
    C,
    D,
    E,
    F,
    All,
}

impl FamilyArg {
    fn family(self) -> Option<Family> {
        Some(match self {
            FamilyArg::A => Family::A,
            FamilyArg::B => Family::B,
            FamilyArg::C => Family::C,
            FamilyArg::D => Family::D,
            FamilyArg::E => Family::E,
            FamilyArg::F => Family::F,
            FamilyArg::All => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Borwein,
    Second,
    Third,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Borwein => Variant::Borwein,
            VariantArg::Second => Variant::Second,
            VariantArg::Third => Variant::Third,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// A, B, C for one n by one of three independent constructions.
    Triple {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "quotient")]
        method: Method,
        /// Restrict output to one of A, B, C.
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        /// Also write the coefficients as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Saddle radius and derived quantities for P_{n,0}(q) q^{-m}.
    Saddle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
    },
    /// Error budget of the coefficient lower bound, or the uniform table.
    Bounds {
        #[arg(long, required_unless_present = "table1")]
        n: Option<usize>,
        /// Target exponent; defaults to the central one.
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        /// Emit the uniform bound table instead of a single budget.
        #[arg(long)]
        table1: bool,
    },
    /// Numeric stress tests of the auxiliary inequalities.
    Ineq {
        #[arg(long, default_value = "all")]
        id: String,
        #[arg(long, default_value_t = LabConfig::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact sign-pattern verification up to a given n.
    Verify {
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "borwein")]
        variant: VariantArg,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        checkpoint_every: usize,
        /// Certificate destination; stdout when absent.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Defaults to BORWEIN_THREADS or the core count.
        #[arg(long)]
        threads: Option<usize>,
        /// Stop after this many steps (checkpoint is written first).
        #[arg(long)]
        #[serde(skip)]
        stop_after: Option<usize>,
        /// Record wall-clock runtime in the certificate.
        #[arg(long)]
        timing: bool,
    },
    /// Truncated limit series of B, C, D, E or F.
    Limit {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 50)]
        terms: usize,
    },
    /// Bressoud's alternating q-binomial sum.
    Bressoud {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Rational, e.g. `1` or `1/2`.
        #[arg(long)]
        #[serde(serialize_with = "ser_ratio")]
        alpha: Ratio<i64>,
        #[arg(long)]
        #[serde(serialize_with = "ser_ratio")]
        beta: Ratio<i64>,
    },
    /// CSV of |P_{n,j}(r e^{i theta})| over theta for external plotting.
    DumpCurve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, value_enum, default_value = "d")]
        family: FamilyArg,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 720)]
        points: usize,
    },
    /// Coefficient CSV of one family polynomial.
    Export {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Serialize)]
struct RunConfig<'a> {
    build: &'a str,
    format: Format,
    #[serde(flatten)]
    command: &'a Command,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Violation(String),
    Internal(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn format_of(cli: &Cli, default: Format) -> Format {
    if cli.json {
        Format::Json
    } else {
        cli.format.unwrap_or(default)
    }
}

fn config_value(cli: &Cli, format: Format) -> Value {
    serde_json::to_value(RunConfig { build: BUILD_ID, format, command: &cli.command }).expect("config serialises")
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn emit_json(v: &Value) -> Result<(), Failure> {
    emit(&serde_json::to_string_pretty(v).expect("json"))
}

fn poly_csv(p: &DensePoly) -> String {
    let mut buf = Vec::new();
    p.write_csv(&mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii")
}

fn family_arg_or_usage(f: FamilyArg, allowed: &[Family]) -> Result<Family, Failure> {
    f.family()
        .filter(|f| allowed.contains(f))
        .ok_or_else(|| Failure::Usage(format!("family must be one of {allowed:?}")))
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Triple { n, method, family, out } => triple(cli, *n, *method, *family, out.as_ref()),
        Command::Saddle { n, m } => {
            let ctx = saddle::solve_saddle(*n, *m).map_err(|e| Failure::Usage(e.to_string()))?;
            let format = format_of(cli, Format::Json);
            match format {
                Format::Human => emit(&format!(
                    "n = {}\nm = {}\nr = {}\ng = {}\nlambda = {}\nr0 = {}\ntheta0 = {}\nj0 = {}\nresidual = {:e}\n",
                    ctx.n, ctx.m, ctx.r, ctx.g, ctx.lambda, ctx.r0, ctx.theta0, ctx.j0, ctx.residual
                )),
                _ => {
                    let mut v = serde_json::to_value(&ctx).expect("json");
                    v["config"] = config_value(cli, format);
                    emit_json(&v)
                }
            }
        }
        Command::Bounds { n, m, family, table1 } => bounds_cmd(cli, *n, *m, *family, *table1),
        Command::Ineq { id, samples, seed } => {
            let format = format_of(cli, Format::Human);
            let reports = ineq::run(id, LabConfig { samples: *samples, seed: *seed })
                .map_err(|e| Failure::Usage(format!("{e}; known ids: all, {}", ineq::IDS.join(", "))))?;
            match format {
                Format::Json => emit_json(&json!({ "config": config_value(cli, format), "reports": reports }))?,
                Format::Csv => {
                    let mut s = String::from("id,samples,worst_margin,tolerance,pass\n");
                    for r in &reports {
                        writeln!(s, "{},{},{:e},{:e},{}", r.id, r.samples, r.worst_margin, r.tolerance, r.pass).unwrap();
                    }
                    emit(&s)?
                }
                Format::Human => {
                    let mut s = String::new();
                    for r in &reports {
                        let at: Vec<String> = r.worst_point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        writeln!(
                            s,
                            "{} {:<22} samples={:<8} worst_margin={:<12.4e} at {}",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.id,
                            r.samples,
                            r.worst_margin,
                            at.join(" ")
                        )
                        .unwrap();
                    }
                    emit(&s)?
                }
            }
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violation(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Verify { max_n, variant, checkpoint, checkpoint_every, emit: dest, threads, stop_after, timing } => {
            let mut opts = VerifyOptions::new((*variant).into(), *max_n);
            if let Some(t) = threads {
                if *t == 0 {
                    return Err(Failure::Usage("--threads must be positive".into()));
                }
                opts.threads = *t;
            }
            opts.checkpoint = checkpoint.clone();
            opts.checkpoint_every = *checkpoint_every;
            opts.stop_after = *stop_after;
            opts.timing = *timing;
            let cert = match verify::run(&opts) {
                Ok(RunOutcome::Complete(c)) => c,
                Ok(RunOutcome::Interrupted { completed_n }) => {
                    eprintln!("stopped after n={completed_n}; checkpoint written");
                    return Ok(());
                }
                Err(e @ VerifyError::ViolationFound { .. }) => return Err(Failure::Violation(e.to_string())),
                Err(e) => return Err(Failure::Internal(e.to_string())),
            };
            let format = format_of(cli, Format::Json);
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&json!({
                    "run_config": config_value(cli, format),
                    "certificate": cert,
                }))
                .expect("json"),
                Format::Human => {
                    let mut s = String::new();
                    for e in &cert.entries {
                        let status = serde_json::to_value(e.status).unwrap();
                        write!(s, "n={:<5} {:<11}", e.n, status.as_str().unwrap()).unwrap();
                        for c in &e.classes {
                            let min = c.min_coeff.as_deref().unwrap_or("-");
                            let at = c.argmin.map(|a| a.to_string()).unwrap_or_else(|| "-".into());
                            write!(s, "  {}: min {min} at q^{at}, {} zero(s)", c.class, c.zero_count).unwrap();
                        }
                        s.push('\n');
                    }
                    let status = serde_json::to_value(cert.status).unwrap();
                    write!(s, "{} n in 1..={}: {}", cert.variant, cert.range.1, status.as_str().unwrap()).unwrap();
                    s
                }
                Format::Csv => {
                    let mut s = String::from("n,status");
                    for l in verify::class_labels(cert.variant) {
                        write!(s, ",min_{l},argmin_{l},zeros_{l}").unwrap();
                    }
                    s.push_str(",coeff_hash\n");
                    for e in &cert.entries {
                        write!(s, "{},{}", e.n, serde_json::to_value(e.status).unwrap().as_str().unwrap()).unwrap();
                        for c in &e.classes {
                            write!(
                                s,
                                ",{},{},{}",
                                c.min_coeff.as_deref().unwrap_or(""),
                                c.argmin.map(|a| a.to_string()).unwrap_or_default(),
                                c.zero_count
                            )
                            .unwrap();
                        }
                        writeln!(s, ",{}", e.coeff_hash).unwrap();
                    }
                    s
                }
            };
            match dest {
                Some(path) => {
                    let mut f = BufWriter::new(File::create(path)?);
                    f.write_all(text.as_bytes())?;
                    f.write_all(b"\n")?;
                    f.flush()?;
                    eprintln!("{} n<={}: {:?}", cert.variant, max_n, cert.status);
                    Ok(())
                }
                None => emit(&text),
            }
        }
        Command::Limit { family, terms } => {
            let fam = family_arg_or_usage(*family, &[Family::B, Family::C, Family::D, Family::E, Family::F])?;
            let p = families::limit_series(fam, *terms).map_err(|e| Failure::Usage(e.to_string()))?;
            poly_output(cli, &p, Format::Human, json!({ "family": fam, "terms": terms }))
        }
        Command::Bressoud { m, n, k, alpha, beta } => {
            if *k == 0 {
                return Err(Failure::Usage("--k must be positive".into()));
            }
            let p = families::bressoud_sum(*m, *n, *k, *alpha, *beta).map_err(|e| Failure::Usage(e.to_string()))?;
            poly_output(cli, &p, Format::Human, json!({}))
        }
        Command::DumpCurve { n, j, family, r, points } => {
            let fam = family_arg_or_usage(*family, &Family::ALL)?;
            if *points < 2 || !(r.is_finite() && *r > 0.0) {
                return Err(Failure::Usage("need --points >= 2 and --r > 0".into()));
            }
            let p = families::andrews_term(fam, *n, *j).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut s = String::from("theta,abs\n");
            for k in 0..*points {
                let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / (*points - 1) as f64;
                writeln!(s, "{theta},{}", p.eval_complex(*r, theta).norm()).unwrap();
            }
            emit(&s)
        }
        Command::Export { n, family, out } => {
            let fam = family_arg_or_usage(*family, &Family::ALL)?;
            match out {
                Some(path) => {
                    let mut f = BufWriter::new(File::create(path)?);
                    verify::export_coeffs(*n, fam, &mut f)?;
                    f.flush()?;
                    Ok(())
                }
                None => {
                    let mut out = io::stdout().lock();
                    verify::export_coeffs(*n, fam, &mut out)?;
                    Ok(())
                }
            }
        }
    }
}

fn poly_output(cli: &Cli, p: &DensePoly, default: Format, extra: Value) -> Result<(), Failure> {
    let format = format_of(cli, default);
    match format {
        Format::Json => {
            let mut v = json!({ "config": config_value(cli, format), "coefficients": p });
            if let (Value::Object(o), Value::Object(e)) = (&mut v, extra) {
                o.extend(e);
            }
            emit_json(&v)
        }
        Format::Csv => emit(&poly_csv(p)),
        Format::Human => emit(&p.to_string()),
    }
}

fn triple(cli: &Cli, n: usize, method: Method, family: FamilyArg, out: Option<&PathBuf>) -> Result<(), Failure> {
    let selected: Vec<Family> = match family.family() {
        None => vec![Family::A, Family::B, Family::C],
        Some(f @ (Family::A | Family::B | Family::C)) => vec![f],
        Some(_) => return Err(Failure::Usage("triple covers A, B and C only".into())),
    };
    let t: Triple = match method {
        Method::Quotient => families::triple_from_quotient(n),
        Method::Andrews => families::triple_from_andrews(n),
        Method::Altsum => families::triple_from_altsum(n),
    };
    let get = |f: Family| t.get(f).expect("triple family");
    let csv = || {
        if selected.len() == 1 {
            poly_csv(get(selected[0]))
        } else {
            let mut s = String::from("family,exponent,coefficient\n");
            for &f in &selected {
                for row in poly_csv(get(f)).lines().skip(1) {
                    writeln!(s, "{f},{row}").unwrap();
                }
            }
            s
        }
    };
    if let Some(path) = out {
        std::fs::write(path, csv())?;
    }
    let format = format_of(cli, Format::Human);
    match format {
        Format::Json => {
            let mut v = json!({ "config": config_value(cli, format), "n": n });
            for &f in &selected {
                v[f.to_string()] = serde_json::to_value(get(f)).expect("json");
            }
            emit_json(&v)
        }
        Format::Csv => emit(&csv()),
        Format::Human => {
            let mut s = String::new();
            for &f in &selected {
                writeln!(s, "{f}_{n}(q) = {}", get(f)).unwrap();
            }
            emit(&s)
        }
    }
}

fn bounds_cmd(cli: &Cli, n: Option<usize>, m: Option<f64>, family: FamilyArg, table1: bool) -> Result<(), Failure> {
    let fams: Vec<Family> = match family.family() {
        None => vec![Family::D, Family::E, Family::F],
        Some(f @ (Family::D | Family::E | Family::F)) => vec![f],
        Some(_) => return Err(Failure::Usage("bounds covers D, E and F only".into())),
    };
    if table1 {
        let rows: Vec<bounds::TableRow> =
            bounds::uniform_table().into_iter().filter(|r| fams.contains(&r.family)).collect();
        let format = format_of(cli, Format::Csv);
        return match format {
            Format::Json => emit_json(&json!({ "config": config_value(cli, format), "table": rows })),
            Format::Csv => {
                let mut s = String::from("family,eps0,eps1,eps2,eps3,total\n");
                for r in &rows {
                    writeln!(s, "{},{:.3},{:.3},{:.3},{:.3},{:.3}", r.family, r.eps0, r.eps1, r.eps2, r.eps3, r.total)
                        .unwrap();
                }
                emit(&s)
            }
            Format::Human => {
                let mut s = format!("{:<8}{:>8}{:>8}{:>8}{:>8}{:>8}\n", "family", "eps0", "eps1", "eps2", "eps3", "total");
                for r in &rows {
                    writeln!(
                        s,
                        "{:<8}{:>8.3}{:>8.3}{:>8.3}{:>8.3}{:>8.3}",
                        r.family.to_string(),
                        r.eps0,
                        r.eps1,
                        r.eps2,
                        r.eps3,
                        r.total
                    )
                    .unwrap();
                }
                emit(&s)
            }
        };
    }
    let n = n.expect("clap requires --n without --table1");
    let m = m.unwrap_or_else(|| (saddle::degree(n) / 2) as f64);
    let budgets: Vec<ErrorBudget> = fams
        .iter()
        .map(|&f| bounds::certificate(n, m, f))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let format = format_of(cli, Format::Json);
    match format {
        Format::Json => emit_json(&json!({ "config": config_value(cli, format), "budgets": budgets })),
        Format::Csv | Format::Human => {
            let mut s = String::from("family,n,m,r,lambda,eps0,eps1,eps2,eps3,total,log_lower_bound,valid\n");
            for b in &budgets {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    b.family,
                    b.n,
                    b.m,
                    b.r,
                    b.lambda,
                    b.eps0,
                    b.eps1,
                    b.eps2,
                    b.eps3,
                    b.total,
                    b.log_lower_bound.map(|x| x.to_string()).unwrap_or_default(),
                    b.valid
                )
                .unwrap();
            }
            emit(&s)
        }
    }
}
