//! Exact sign-pattern verification by repeated multiplication.
//!
//! The harness keeps the running product `prod_{i<=n} prod_e (1 - q^e)` for a
//! [`Variant`], advances it one step at a time and scans every residue class of
//! the exponent modulo the sieve modulus. Class `c` must carry the sign
//! [`Variant::expected_sign`]; a wrong sign anywhere is a violation, and a zero
//! at an exponent `m <= min(n^2, deg)` of the class polynomial is reported as
//! `zero-found` without failing.
//!
//! Progress can be checkpointed to disk and resumed; a resumed run emits a
//! certificate byte-identical to an uninterrupted one.

use std::cmp::Ordering;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::{BigInt, Sign};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::families::{family_sum, triple_from_quotient, Family, Variant};
use crate::polyring::DensePoly;

pub const CERTIFICATE_VERSION: &str = concat!("borwein-verify/", env!("CARGO_PKG_VERSION"));
const MAGIC: &[u8; 8] = b"BWCKPT01";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("sign violation at n={n}: coefficient of q^{exponent} is {value}")]
    ViolationFound { n: usize, exponent: usize, value: String },
    #[error("checkpoint does not match this run: {0}")]
    ResumeMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepStatus {
    Pass,
    ZeroFound,
    Violation,
}

/// Scan result for one residue class of one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    /// Degree of the sign-normalised class polynomial, `None` if it vanishes.
    pub degree: Option<usize>,
    /// Upper end of the strict range `m <= min(n^2, degree)`.
    pub checked_through: Option<usize>,
    /// Minimum over the strict range, as a decimal string.
    pub min_coeff: Option<String>,
    pub argmin: Option<usize>,
    pub zero_count: usize,
    /// First exponent of the class polynomial with the wrong sign.
    pub first_violation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEntry {
    pub n: usize,
    pub status: StepStatus,
    pub classes: Vec<ClassSummary>,
    /// SHA-256 of the encoded coefficient stream of the running product.
    pub coeff_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub variant: Variant,
    pub n_max: usize,
    pub threads: usize,
    pub checkpoint_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyCertificate {
    pub version: String,
    pub variant: Variant,
    pub range: (usize, usize),
    pub status: StepStatus,
    pub entries: Vec<StepEntry>,
    /// Only filled when timing is requested, so that default output is reproducible.
    pub runtime_seconds: Option<f64>,
    pub config: VerifyConfig,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub variant: Variant,
    pub n_max: usize,
    pub threads: usize,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: usize,
    /// Simulated interrupt: stop (after checkpointing) once this many steps ran in this call.
    pub stop_after: Option<usize>,
    pub timing: bool,
}

impl VerifyOptions {
    pub fn new(variant: Variant, n_max: usize) -> Self {
        VerifyOptions {
            variant,
            n_max,
            threads: default_threads(),
            checkpoint: None,
            checkpoint_every: 10,
            stop_after: None,
            timing: false,
        }
    }
}

/// `BORWEIN_THREADS` if set to a positive integer, else the number of available cores.
pub fn default_threads() -> usize {
    std::env::var("BORWEIN_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Complete(VerifyCertificate),
    Interrupted { completed_n: usize },
}

/// Class labels: `A, B, C` for the original sieve, `class0..` otherwise.
pub fn class_labels(variant: Variant) -> Vec<String> {
    match variant {
        Variant::Borwein => vec!["A".into(), "B".into(), "C".into()],
        _ => (0..variant.modulus()).map(|c| format!("class{c}")).collect(),
    }
}

/// Sparse expansion of `prod_e (1 - q^e)` as `(shift, coefficient)` pairs.
fn step_factor(exps: &[usize]) -> Vec<(usize, i64)> {
    let mut terms: Vec<(usize, i64)> = vec![(0, 1)];
    for &e in exps {
        let mut next = terms.clone();
        next.extend(terms.iter().map(|&(s, c)| (s + e, -c)));
        next.sort_unstable();
        terms.clear();
        for (s, c) in next {
            match terms.last_mut() {
                Some(last) if last.0 == s => last.1 += c,
                _ => terms.push((s, c)),
            }
        }
        terms.retain(|t| t.1 != 0);
    }
    terms
}

#[derive(Clone, Default)]
struct ClassAcc {
    best: Option<usize>,
    zeros: usize,
    violation: Option<usize>,
}

/// Running product together with the scratch buffer for double-buffered updates.
pub struct Harness {
    variant: Variant,
    n: usize,
    coeffs: Vec<BigInt>,
    scratch: Vec<BigInt>,
    pool: rayon::ThreadPool,
}

impl Harness {
    pub fn new(variant: Variant, threads: usize) -> Result<Self, VerifyError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| VerifyError::ThreadPool(e.to_string()))?;
        Ok(Harness { variant, n: 0, coeffs: vec![BigInt::from(1)], scratch: Vec::new(), pool })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn product(&self) -> DensePoly {
        DensePoly::from_coeffs(self.coeffs.clone())
    }

    /// Sign-normalised class polynomials of the current product.
    pub fn classes(&self) -> Vec<DensePoly> {
        let m = self.variant.modulus();
        (0..m)
            .map(|c| {
                let s = self.variant.expected_sign(c);
                DensePoly::from_coeffs(
                    self.coeffs.iter().skip(c).step_by(m).map(|x| if s > 0 { x.clone() } else { -x }).collect(),
                )
            })
            .collect()
    }

    /// Multiplies in the factors of step `n + 1` and scans the result.
    pub fn step(&mut self) -> StepEntry {
        let n = self.n + 1;
        let factor = step_factor(&self.variant.step_exponents(n));
        let top = factor.last().map(|t| t.0).unwrap_or(0);
        let old = &self.coeffs;
        let old_len = old.len();
        self.scratch.resize(old_len + top, BigInt::zero());
        self.pool.install(|| {
            self.scratch.par_iter_mut().with_min_len(1024).enumerate().for_each(|(i, x)| {
                x.set_zero();
                for &(s, c) in &factor {
                    if i >= s && i - s < old_len {
                        let src = &old[i - s];
                        match c {
                            1 => *x += src,
                            -1 => *x -= src,
                            _ => *x += src * c,
                        }
                    }
                }
            });
        });
        std::mem::swap(&mut self.coeffs, &mut self.scratch);
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self.n = n;
        self.scan()
    }

    fn scan(&self) -> StepEntry {
        let m = self.variant.modulus();
        let coeffs = &self.coeffs;
        let signs: Vec<i8> = (0..m).map(|c| self.variant.expected_sign(c)).collect();
        // class degree in class-local exponents
        let degrees: Vec<Option<usize>> = (0..m)
            .map(|c| (0..coeffs.len()).rev().find(|&i| i % m == c && !coeffs[i].is_zero()).map(|i| i / m))
            .collect();
        let limits: Vec<Option<usize>> = degrees.iter().map(|d| d.map(|d| d.min(self.n * self.n))).collect();
        let norm_cmp = |c: usize, a: &BigInt, b: &BigInt| if signs[c] > 0 { a.cmp(b) } else { b.cmp(a) };
        let wrong_sign = |c: usize, x: &BigInt| match x.sign() {
            Sign::NoSign => false,
            Sign::Plus => signs[c] < 0,
            Sign::Minus => signs[c] > 0,
        };
        let merge = |mut a: Vec<ClassAcc>, b: Vec<ClassAcc>| {
            for (c, (x, y)) in a.iter_mut().zip(b).enumerate() {
                x.zeros += y.zeros;
                x.violation = match (x.violation, y.violation) {
                    (Some(p), Some(q)) => Some(p.min(q)),
                    (p, q) => p.or(q),
                };
                x.best = match (x.best, y.best) {
                    (Some(p), Some(q)) => match norm_cmp(c, &coeffs[q], &coeffs[p]) {
                        Ordering::Less => Some(q),
                        Ordering::Equal => Some(p.min(q)),
                        Ordering::Greater => Some(p),
                    },
                    (p, q) => p.or(q),
                };
            }
            a
        };
        let accs = self.pool.install(|| {
            (0..coeffs.len())
                .into_par_iter()
                .with_min_len(4096)
                .fold(
                    || vec![ClassAcc::default(); m],
                    |mut acc, i| {
                        let c = i % m;
                        let t = i / m;
                        let x = &coeffs[i];
                        let a = &mut acc[c];
                        if wrong_sign(c, x) && a.violation.is_none() {
                            a.violation = Some(i);
                        }
                        if limits[c].is_some_and(|l| t <= l) {
                            if x.is_zero() {
                                a.zeros += 1;
                            }
                            let better = match a.best {
                                None => true,
                                Some(b) => norm_cmp(c, x, &coeffs[b]) == Ordering::Less,
                            };
                            if better {
                                a.best = Some(i);
                            }
                        }
                        acc
                    },
                )
                .reduce(|| vec![ClassAcc::default(); m], merge)
        });
        let labels = class_labels(self.variant);
        let classes: Vec<ClassSummary> = accs
            .into_iter()
            .enumerate()
            .map(|(c, a)| ClassSummary {
                class: labels[c].clone(),
                degree: degrees[c],
                checked_through: limits[c],
                min_coeff: a.best.map(|i| if signs[c] > 0 { coeffs[i].to_string() } else { (-&coeffs[i]).to_string() }),
                argmin: a.best.map(|i| i / m),
                zero_count: a.zeros,
                first_violation: a.violation.map(|i| i / m),
            })
            .collect();
        let status = if classes.iter().any(|c| c.first_violation.is_some()) {
            StepStatus::Violation
        } else if classes.iter().any(|c| c.zero_count > 0) {
            StepStatus::ZeroFound
        } else {
            StepStatus::Pass
        };
        StepEntry { n: self.n, status, classes, coeff_hash: coeff_hash(coeffs) }
    }

    /// First wrong-sign coefficient of the running product, as `(exponent, value)`.
    fn first_violation(&self, entry: &StepEntry) -> Option<(usize, String)> {
        let m = self.variant.modulus();
        entry
            .classes
            .iter()
            .enumerate()
            .filter_map(|(c, s)| s.first_violation.map(|t| t * m + c))
            .min()
            .map(|e| (e, self.coeffs[e].to_string()))
    }
}

fn write_coeff<W: Write>(w: &mut W, x: &BigInt) -> io::Result<()> {
    let (sign, mag) = x.to_bytes_le();
    let tag = match sign {
        Sign::NoSign => 0u8,
        Sign::Plus => 1,
        Sign::Minus => 2,
    };
    let mag: &[u8] = if tag == 0 { &[] } else { &mag };
    w.write_all(&[tag])?;
    w.write_all(&(mag.len() as u32).to_le_bytes())?;
    w.write_all(mag)
}

fn read_coeff<R: Read>(r: &mut R) -> io::Result<BigInt> {
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let len = read_u32(r)? as usize;
    let mut mag = vec![0u8; len];
    r.read_exact(&mut mag)?;
    let sign = match tag[0] {
        0 => Sign::NoSign,
        1 => Sign::Plus,
        2 => Sign::Minus,
        t => return Err(io::Error::new(io::ErrorKind::InvalidData, format!("bad sign tag {t}"))),
    };
    Ok(BigInt::from_bytes_le(sign, &mag))
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Hex SHA-256 of the length-prefixed sign and magnitude encoding of `coeffs`.
pub fn coeff_hash(coeffs: &[BigInt]) -> String {
    let mut h = Sha256::new();
    h.update((coeffs.len() as u64).to_le_bytes());
    for x in coeffs {
        write_coeff(&mut h, x).expect("hashing cannot fail");
    }
    hex::encode(h.finalize())
}

/// On-disk state: the running product after `n` steps plus the entries so far.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub variant: Variant,
    pub n: usize,
    pub coeffs: Vec<BigInt>,
    pub entries: Vec<StepEntry>,
}

impl Checkpoint {
    fn encode(&self) -> io::Result<Vec<u8>> {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        let variant = serde_json::to_vec(&self.variant).map_err(io::Error::other)?;
        let entries = serde_json::to_vec(&self.entries).map_err(io::Error::other)?;
        buf.extend_from_slice(&(variant.len() as u32).to_le_bytes());
        buf.extend_from_slice(&variant);
        buf.extend_from_slice(&(self.n as u64).to_le_bytes());
        buf.extend_from_slice(&(entries.len() as u64).to_le_bytes());
        buf.extend_from_slice(&entries);
        buf.extend_from_slice(&(self.coeffs.len() as u64).to_le_bytes());
        for x in &self.coeffs {
            write_coeff(&mut buf, x)?;
        }
        let digest = Sha256::digest(&buf);
        buf.extend_from_slice(&digest);
        Ok(buf)
    }

    /// Writes to a temporary sibling and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<(), VerifyError> {
        let bytes = self.encode()?;
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        {
            let mut f = BufWriter::new(File::create(&tmp)?);
            f.write_all(&bytes)?;
            f.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, VerifyError> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        let mismatch = |msg: &str| VerifyError::ResumeMismatch(msg.to_string());
        if bytes.len() < MAGIC.len() + 32 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(mismatch("not a checkpoint file"));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(mismatch("checkpoint digest does not match its contents"));
        }
        let parse = |e: io::Error| VerifyError::ResumeMismatch(format!("malformed checkpoint: {e}"));
        let mut r = &body[MAGIC.len()..];
        let vlen = read_u32(&mut r).map_err(parse)? as usize;
        let variant: Variant = serde_json::from_slice(r.get(..vlen).ok_or_else(|| mismatch("truncated"))?)
            .map_err(|e| VerifyError::ResumeMismatch(e.to_string()))?;
        r = &r[vlen..];
        let n = read_u64(&mut r).map_err(parse)? as usize;
        let elen = read_u64(&mut r).map_err(parse)? as usize;
        let entries: Vec<StepEntry> = serde_json::from_slice(r.get(..elen).ok_or_else(|| mismatch("truncated"))?)
            .map_err(|e| VerifyError::ResumeMismatch(e.to_string()))?;
        r = &r[elen..];
        let clen = read_u64(&mut r).map_err(parse)? as usize;
        let mut coeffs = Vec::with_capacity(clen.min(1 << 24));
        for _ in 0..clen {
            coeffs.push(read_coeff(&mut r).map_err(parse)?);
        }
        if !r.is_empty() {
            return Err(mismatch("trailing bytes"));
        }
        Ok(Checkpoint { variant, n, coeffs, entries })
    }
}

/// Runs (or resumes) the harness up to `opts.n_max`.
pub fn run(opts: &VerifyOptions) -> Result<RunOutcome, VerifyError> {
    let start = Instant::now();
    let mut harness = Harness::new(opts.variant, opts.threads)?;
    let mut entries: Vec<StepEntry> = Vec::new();
    if let Some(path) = opts.checkpoint.as_deref().filter(|p| p.exists()) {
        let ck = Checkpoint::load(path)?;
        if ck.variant != opts.variant {
            return Err(VerifyError::ResumeMismatch(format!(
                "checkpoint is for variant {}, run is for {}",
                ck.variant, opts.variant
            )));
        }
        if ck.n > opts.n_max {
            return Err(VerifyError::ResumeMismatch(format!("checkpoint at n={} exceeds n_max={}", ck.n, opts.n_max)));
        }
        let contiguous = ck.entries.iter().enumerate().all(|(i, e)| e.n == i + 1) && ck.entries.len() == ck.n;
        let expected = ck.entries.last().map(|e| e.coeff_hash.clone()).unwrap_or_else(|| coeff_hash(&[BigInt::from(1)]));
        if !contiguous || coeff_hash(&ck.coeffs) != expected {
            return Err(VerifyError::ResumeMismatch("coefficient hash disagrees with recorded entries".into()));
        }
        harness.coeffs = ck.coeffs;
        harness.n = ck.n;
        entries = ck.entries;
    }
    let save = |h: &Harness, entries: &[StepEntry]| -> Result<(), VerifyError> {
        if let Some(path) = &opts.checkpoint {
            Checkpoint { variant: opts.variant, n: h.n, coeffs: h.coeffs.clone(), entries: entries.to_vec() }.save(path)?;
        }
        Ok(())
    };
    let mut steps_this_call = 0;
    while harness.n < opts.n_max {
        let entry = harness.step();
        if entry.status == StepStatus::Violation {
            let (exponent, value) = harness.first_violation(&entry).expect("violation has a witness");
            return Err(VerifyError::ViolationFound { n: entry.n, exponent, value });
        }
        entries.push(entry);
        steps_this_call += 1;
        if opts.stop_after == Some(steps_this_call) && harness.n < opts.n_max {
            save(&harness, &entries)?;
            return Ok(RunOutcome::Interrupted { completed_n: harness.n });
        }
        if opts.checkpoint_every > 0 && harness.n % opts.checkpoint_every == 0 {
            save(&harness, &entries)?;
        }
    }
    save(&harness, &entries)?;
    let status = if entries.iter().any(|e| e.status == StepStatus::ZeroFound) {
        StepStatus::ZeroFound
    } else {
        StepStatus::Pass
    };
    Ok(RunOutcome::Complete(VerifyCertificate {
        version: CERTIFICATE_VERSION.to_string(),
        variant: opts.variant,
        range: (1, opts.n_max),
        status,
        entries,
        runtime_seconds: opts.timing.then(|| start.elapsed().as_secs_f64()),
        config: VerifyConfig {
            variant: opts.variant,
            n_max: opts.n_max,
            threads: opts.threads,
            checkpoint_every: opts.checkpoint_every,
        },
    }))
}

/// Uninterrupted run without checkpointing for one of the variant sieves.
pub fn run_variant(n_max: usize, variant: Variant) -> Result<VerifyCertificate, VerifyError> {
    match run(&VerifyOptions::new(variant, n_max))? {
        RunOutcome::Complete(c) => Ok(c),
        RunOutcome::Interrupted { .. } => unreachable!("no interrupt requested"),
    }
}

/// Family polynomial at `n`: `A, B, C` via the quotient route, `D, E, F` via their sums.
pub fn family_poly(n: usize, family: Family) -> DensePoly {
    match family {
        Family::A | Family::B | Family::C => {
            let t = triple_from_quotient(n);
            t.get(family).expect("triple family").clone()
        }
        _ => family_sum(family, n).total,
    }
}

/// Writes the family polynomial as `exponent,coefficient` CSV.
pub fn export_coeffs<W: Write>(n: usize, family: Family, out: W) -> io::Result<()> {
    family_poly(n, family).write_csv(out)
}
