//! Batch front end: every input and output is UTF-8 JSON.
//!
//! Exit codes: 0 when everything requested succeeded, 1 when a verification
//! ran and some check failed, 2 for malformed input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cns::{self, AssociativeCubicAlgebra, CubicNormStructure};
use crate::compalg::{self, CompositionAlgebra};
use crate::jordan::{self, CheckMode, JordanAlgebra};
use crate::linalg::Matrix;
use crate::picmod::{self, Query, VBundle};
use crate::report::{self, Report, SampleConfig};
use crate::scalars::{Ring, Scalar};
use crate::tits::{self, EtaleParams, TitsError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "jaf", version, about = "Exact cubic Jordan algebras and their verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub bound: u64,
}

impl Sampling {
    fn config(&self) -> SampleConfig {
        SampleConfig { samples: self.samples as usize, seed: self.seed, bound: self.bound }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sampled,
    Symbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalOp {
    Norm,
    Sharp,
    U,
    Inverse,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportWhat {
    /// Norm, trilinear form and adjoint as sparse coefficient lists.
    Cns,
    /// The U-operator structure tensor.
    Tensor,
    /// Gram matrix of the trace form.
    Gram,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an algebra from a descriptor.
    Construct {
        #[arg(short = 'c', long = "config")]
        config: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run the axiom battery on an algebra.
    Verify {
        #[arg(short, long = "algebra")]
        algebra: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Sampled)]
        mode: Mode,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Evaluate an operator on an element.
    Eval {
        #[arg(long, value_enum)]
        op: EvalOp,
        #[arg(short, long = "algebra")]
        algebra: String,
        #[arg(short = 'x', long)]
        x: String,
        /// Second argument of `u`.
        #[arg(short = 'y', long)]
        y: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Peirce spaces relative to a list of orthogonal idempotents.
    Peirce {
        #[arg(short, long = "algebra")]
        algebra: String,
        #[arg(short = 'e', long)]
        idempotents: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover the cubic minimum equation of an element.
    Fit {
        #[arg(short, long = "algebra")]
        algebra: String,
        #[arg(short = 'x', long)]
        x: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Trace form Gram matrix, or its invariants mod p.
    Gram {
        #[arg(short, long = "algebra")]
        algebra: String,
        #[arg(short, long)]
        p: Vec<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bundle calculus over Brauer–Severi surfaces.
    Picmod {
        #[command(subcommand)]
        op: PicmodOp,
    },
    /// Dump one part of an algebra.
    Export {
        #[arg(short, long = "algebra")]
        algebra: String,
        #[arg(long, value_enum, default_value_t = ExportWhat::Cns)]
        what: ExportWhat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PicmodOp {
    /// Instantiate a decomposition template.
    Enumerate {
        #[arg(long)]
        which: String,
        #[arg(long)]
        case: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        /// Further parameters as `name=value`.
        #[arg(long = "param", value_parser = parse_param, allow_hyphen_values = true)]
        params: Vec<(String, i64)>,
        #[arg(long)]
        split: Option<bool>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Tensor {
        #[arg(short = 'a')]
        a: String,
        #[arg(short = 'b')]
        b: String,
    },
    Det {
        #[arg(short = 'a')]
        a: String,
    },
    BaseChange {
        #[arg(short = 'a')]
        a: String,
    },
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let v = v.trim().parse::<i64>().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Errors that end a run, with the exit code they map to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_MALFORMED, message: e.to_string() }
}

fn tits_failure(e: TitsError) -> Failure {
    let code = match e {
        TitsError::AdmissibilityFailure(_)
        | TitsError::AmpleFailure(_)
        | TitsError::NormCompatibilityFailure(_)
        | TitsError::EmbeddingFailure { .. } => EXIT_FAILED,
        _ => EXIT_MALFORMED,
    };
    Failure { code, message: e.to_string() }
}

/// Parse and run, writing results to `out` (or the `-o` file) and
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    report::init_threads_from_env();
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Construct { config, output, sampling } => {
            let desc = read_json(&config)?;
            let c = build(&desc, &sampling.config())?;
            let mut v = JordanAlgebra::from_cns(&c).to_json();
            v["descriptor"] = desc;
            emit(out, output.as_deref(), &v)?;
            Ok(EXIT_OK)
        }
        Command::Verify { algebra, output, mode, sampling } => {
            let j = load_algebra(&algebra)?;
            let report = verify(&j, &sampling.config(), mode)?;
            let passed = report.passed();
            let v = json!({"subject": report.subject, "passed": passed, "checks": report.checks});
            emit(out, output.as_deref(), &v)?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Eval { op, algebra, x, y, output } => {
            let j = load_algebra(&algebra)?;
            let x = parse_element(&j, &x)?;
            let v = match op {
                EvalOp::Norm => j.norm(&x).map_err(malformed)?.to_json(),
                EvalOp::Trace => j.trace(&x).map_err(malformed)?.to_json(),
                EvalOp::Sharp => {
                    vector_json(&j.cns().ok_or_else(|| malformed("algebra has no norm structure"))?.sharp(&x))
                }
                EvalOp::U => {
                    let y = y.ok_or_else(|| malformed("u needs -y"))?;
                    vector_json(&j.u(&x, &parse_element(&j, &y)?))
                }
                EvalOp::Inverse => match jordan::invert_element(&j, &x) {
                    Ok(inv) => vector_json(&inv),
                    Err(jordan::JordanError::NotInvertible(_)) => {
                        emit(out, output.as_deref(), &json!({"invertible": false}))?;
                        return Ok(EXIT_FAILED);
                    }
                    Err(e) => return Err(malformed(e)),
                },
            };
            emit(out, output.as_deref(), &v)?;
            Ok(EXIT_OK)
        }
        Command::Peirce { algebra, idempotents, output } => {
            let j = load_algebra(&algebra)?;
            let es = read_json(&idempotents)?;
            let es = es
                .as_array()
                .ok_or_else(|| malformed("idempotents must be a list of elements"))?
                .iter()
                .map(|e| j.ring().parse_vector(e).map_err(malformed))
                .collect::<Result<Vec<_>, _>>()?;
            let spaces = jordan::peirce_decompose(&j, &es).map_err(malformed)?;
            let v: Vec<Value> = spaces
                .iter()
                .map(|s| json!({"i": s.i, "j": s.j, "dim": s.dim(), "basis": s.basis.iter().map(|b| vector_json(b)).collect::<Vec<_>>()}))
                .collect();
            emit(out, output.as_deref(), &Value::Array(v))?;
            Ok(EXIT_OK)
        }
        Command::Fit { algebra, x, output } => {
            let j = load_algebra(&algebra)?;
            let x = parse_element(&j, &x)?;
            let fit = jordan::charpoly_fit(&j, &x).map_err(malformed)?;
            let mut v = json!({"coefficients": vector_json(&fit.coefficients), "degenerate": fit.degenerate});
            if let Ok(g) = jordan::generic_coefficients(&j, &x) {
                v["generic"] = vector_json(&g);
                v["matches_generic"] = json!(!fit.degenerate && g == fit.coefficients);
            }
            emit(out, output.as_deref(), &v)?;
            Ok(EXIT_OK)
        }
        Command::Gram { algebra, p, output } => {
            let j = load_algebra(&algebra)?;
            let g = jordan::trace_gram(&j).map_err(malformed)?;
            let v = if p.is_empty() {
                matrix_json(&g)
            } else {
                let inv = p
                    .iter()
                    .map(|&p| jordan::gram_fp_invariants(&g, p).map_err(malformed))
                    .collect::<Result<Vec<_>, _>>()?;
                serde_json::to_value(inv).map_err(malformed)?
            };
            emit(out, output.as_deref(), &v)?;
            Ok(EXIT_OK)
        }
        Command::Export { algebra, what, output } => {
            let j = load_algebra(&algebra)?;
            let v = match what {
                ExportWhat::Cns => j.cns().ok_or_else(|| malformed("algebra has no norm structure"))?.to_json(),
                ExportWhat::Tensor => j.tensor().to_json(),
                ExportWhat::Gram => matrix_json(&jordan::trace_gram(&j).map_err(malformed)?),
            };
            emit(out, output.as_deref(), &v)?;
            Ok(EXIT_OK)
        }
        Command::Picmod { op } => picmod_command(op, out),
    }
}

fn picmod_command(op: PicmodOp, out: &mut dyn Write) -> Result<i32, Failure> {
    let show = |out: &mut dyn Write, v: &VBundle| -> Result<(), Failure> {
        let j = json!({"bundle": v, "expression": v.to_string(), "rank": v.rank()});
        emit(out, None, &j)
    };
    match op {
        PicmodOp::Enumerate { which, case, m, params, split, output } => {
            let mut q = Query::new(&which);
            q.case = case;
            q.split = split;
            if let Some(m) = m {
                q.params.insert("m".into(), m);
            }
            q.params.extend(params);
            let ds = picmod::enumerate(&q).map_err(malformed)?;
            let v: Vec<Value> = ds
                .iter()
                .map(|d| {
                    json!({
                        "template": d.template, "case": d.case, "context": d.context,
                        "expression": d.expression(), "rank": d.rank(), "groups": d.groups,
                        "excluded": d.excluded, "flags": d.flags, "checks": d.checks,
                    })
                })
                .collect();
            emit(out, output.as_deref(), &Value::Array(v))?;
            Ok(EXIT_OK)
        }
        PicmodOp::Tensor { a, b } => {
            show(out, &picmod::vb_tensor(&read_bundle(&a)?, &read_bundle(&b)?).map_err(malformed)?)?;
            Ok(EXIT_OK)
        }
        PicmodOp::Det { a } => {
            let a = read_bundle(&a)?;
            let d = picmod::vb_det(&a).map_err(malformed)?;
            show(out, &VBundle { base: a.base, ..VBundle::from_symbols(a.context, [d]) })?;
            Ok(EXIT_OK)
        }
        PicmodOp::BaseChange { a } => {
            show(out, &picmod::vb_base_change(&read_bundle(&a)?).map_err(malformed)?)?;
            Ok(EXIT_OK)
        }
    }
}

/// CNS, Jordan and degree-3 checks. Symbolic mode replaces the sampled
/// CNS and Jordan suites by polynomial identities.
pub fn verify(j: &JordanAlgebra, cfg: &SampleConfig, mode: Mode) -> Result<Report, Failure> {
    let mut report = Report::new(format!("rank {} algebra over {}", j.rank(), j.ring()));
    if let Some(c) = j.cns() {
        report.extend(match mode {
            Mode::Sampled => cns::check_cns_axioms(c, cfg),
            Mode::Symbolic => cns::check_cns_axioms_symbolic(c).map_err(malformed)?,
        });
    }
    let jm = match mode {
        Mode::Sampled => CheckMode::Sampled,
        Mode::Symbolic => CheckMode::Symbolic,
    };
    report.extend(jordan::check_jordan_axioms(j, cfg, jm).map_err(malformed)?);
    if j.cns().is_some() {
        report.push(jordan::check_degree3_identity(j, cfg).map_err(malformed)?);
    }
    Ok(report)
}

/// Read a JSON argument given inline or as a path to a file.
fn read_json(arg: &str) -> Result<Value, Failure> {
    let trimmed = arg.trim_start();
    let inline = trimmed.starts_with(['{', '[', '"', '-']) || trimmed.starts_with(|c: char| c.is_ascii_digit());
    let text =
        if inline { arg.to_string() } else { fs::read_to_string(arg).map_err(|e| malformed(format!("{arg}: {e}")))? };
    serde_json::from_str(&text).map_err(|e| malformed(format!("{arg}: {e}")))
}

fn read_bundle(arg: &str) -> Result<VBundle, Failure> {
    serde_json::from_value(read_json(arg)?).map_err(malformed)
}

fn load_algebra(arg: &str) -> Result<JordanAlgebra, Failure> {
    JordanAlgebra::from_json(&read_json(arg)?).map_err(malformed)
}

fn parse_element(j: &JordanAlgebra, arg: &str) -> Result<Vec<Scalar>, Failure> {
    let x = j.ring().parse_vector(&read_json(arg)?).map_err(malformed)?;
    if x.len() != j.rank() {
        return Err(malformed(format!("element has length {}, algebra has rank {}", x.len(), j.rank())));
    }
    Ok(x)
}

fn vector_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|r| vector_json(r)).collect())
}

fn emit(out: &mut dyn Write, path: Option<&Path>, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(malformed)?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(|e| malformed(format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(malformed),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Failure> {
    v.get(key).ok_or_else(|| malformed(format!("descriptor is missing '{key}'")))
}

fn ring_of(v: &Value) -> Result<Ring, Failure> {
    match v.get("ring") {
        Some(r) => Ring::from_json(r).map_err(malformed),
        None => Ok(Ring::rational()),
    }
}

fn scalar_field(ring: &Ring, v: &Value, key: &str) -> Result<Scalar, Failure> {
    ring.parse(field(v, key)?).map_err(malformed)
}

fn optional_scalar(ring: &Ring, v: &Value, key: &str) -> Result<Option<Scalar>, Failure> {
    v.get(key).map(|x| ring.parse(x).map_err(malformed)).transpose()
}

fn matrix_field(ring: &Ring, v: &Value) -> Result<Matrix, Failure> {
    v.as_array()
        .ok_or_else(|| malformed("expected a matrix"))?
        .iter()
        .map(|r| ring.parse_vector(r).map_err(malformed))
        .collect()
}

fn kind(v: &Value) -> Result<&str, Failure> {
    field(v, "kind")?.as_str().ok_or_else(|| malformed("'kind' must be a string"))
}

/// Composition algebra descriptors: `scalar`, `etale2` (`d`),
/// `split_quaternion`, `zorn`, `cayley_dickson` (`base`, `mu`).
pub fn build_composition(v: &Value, ring: &Ring) -> Result<CompositionAlgebra, Failure> {
    match kind(v)? {
        "scalar" => Ok(compalg::scalar(ring)),
        "etale2" => compalg::etale2(ring, &scalar_field(ring, v, "d")?).map_err(malformed),
        "split_quaternion" => Ok(compalg::split_quaternion(ring)),
        "zorn" => Ok(compalg::zorn(ring)),
        "cayley_dickson" => {
            let base = build_composition(field(v, "base")?, ring)?;
            compalg::cayley_dickson(&base, &scalar_field(ring, v, "mu")?).map_err(malformed)
        }
        "table" => CompositionAlgebra::from_json(v).map_err(malformed),
        other => Err(malformed(format!("unknown composition algebra '{other}'"))),
    }
}

/// Associative cubic algebras: `diagonal`, `mat3` (optionally with a
/// hermitian `form` giving the adjoint involution), `cubic_etale`.
pub fn build_associative(v: &Value) -> Result<AssociativeCubicAlgebra, Failure> {
    let ring = ring_of(v)?;
    match kind(v)? {
        "diagonal" => Ok(cns::diagonal(&ring)),
        "mat3" | "mat3_plus" => match v.get("form") {
            Some(h) => tits::mat3_with_form(&matrix_field(&ring, h)?).map_err(tits_failure),
            None if ring.has_involution() => {
                let id = crate::linalg::identity(&ring, 3);
                tits::mat3_with_form(&id).map_err(tits_failure)
            }
            None => Ok(cns::mat3(&ring)),
        },
        "cubic_etale" => cns::cubic_etale(&ring).map_err(malformed),
        other => Err(malformed(format!("'{other}' is not an associative cubic algebra"))),
    }
}

/// Build the norm structure described by a descriptor.
pub fn build(v: &Value, cfg: &SampleConfig) -> Result<CubicNormStructure, Failure> {
    let ring = ring_of(v)?;
    match kind(v)? {
        "diagonal" | "mat3" | "mat3_plus" | "cubic_etale" => Ok(build_associative(v)?.cns),
        "rank1" => Ok(cns::rank1(&ring)),
        "hyperbolic_spin" => Ok(cns::hyperbolic_spin(&ring)),
        "spin" => match (v.get("q"), v.get("base")) {
            (Some(q), Some(b)) => {
                let base = ring.parse_vector(b).map_err(malformed)?;
                cns::spin(&ring, &matrix_field(&ring, q)?, &base).map_err(malformed)
            }
            _ => Ok(cns::hyperbolic_spin(&ring)),
        },
        "h3" => {
            let c = build_composition(field(v, "composition")?, &ring)?;
            let gamma = match v.get("gamma") {
                Some(g) => ring.parse_vector(g).map_err(malformed)?,
                None => vec![ring.one(); 3],
            };
            let gamma: [Scalar; 3] = gamma.try_into().map_err(|_| malformed("gamma needs three entries"))?;
            cns::h3(&c, &gamma).map_err(malformed)
        }
        "first_tits" => {
            let a = build_associative(field(v, "algebra")?)?;
            let beta = scalar_field(a.ring(), v, "beta")?;
            tits::first_tits(&a, &beta, cfg).map_err(tits_failure)
        }
        "tits_process" => {
            let b = build_associative(field(v, "algebra")?)?;
            let big = b.ring().clone();
            let u = match v.get("u") {
                Some(u) => big.parse_vector(u).map_err(malformed)?,
                None => b.table.unit().to_vec(),
            };
            let beta = optional_scalar(&big, v, "beta")?.unwrap_or_else(|| big.one());
            Ok(tits::tits_process(&b, &u, &beta, cfg).map_err(tits_failure)?.cns)
        }
        "etale_process" => {
            let e = build_associative(field(v, "e")?)?;
            let k = e.ring().clone();
            let d = scalar_field(&k, v, "d")?;
            let big = Ring::quadratic(&k, d.clone()).map_err(malformed)?;
            let u = v.get("u").map(|u| big.parse_vector(u).map_err(malformed)).transpose()?;
            let beta = optional_scalar(&big, v, "beta")?;
            tits::build_etale(&EtaleParams::Process { e, d, u, beta }, cfg).map_err(tits_failure)
        }
        "rank1_process" => {
            let d = scalar_field(&ring, v, "d")?;
            let big = Ring::quadratic(&ring, d.clone()).map_err(malformed)?;
            let u = optional_scalar(&big, v, "u")?;
            let beta = optional_scalar(&big, v, "beta")?;
            tits::build_etale(&EtaleParams::Rank1Process { k: ring, d, u, beta }, cfg).map_err(tits_failure)
        }
        "etale_first" => {
            let e = build_associative(field(v, "e")?)?;
            let beta = scalar_field(e.ring(), v, "beta")?;
            tits::build_etale(&EtaleParams::First { e, beta }, cfg).map_err(tits_failure)
        }
        other => Err(malformed(format!("unknown algebra kind '{other}'"))),
    }
}
