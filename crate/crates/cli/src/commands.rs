//! Subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use kproj_core::analysis::{
    check_complexity_bound, fractal_copy_census, fractal_decompose, word_complexity,
    word_periodicity, word_repetitions,
};
use kproj_core::generators::CoeffFamily;
use kproj_core::matrix::{becker_lift, verify_cartier};
use kproj_core::pade::{
    deg2_pair, dn_check, pade_solve, prop52_pair, DNParams, MSequence, PadePair,
};
use kproj_core::seq::{gen_series, prefix, SequenceSpec, SequenceView};
use kproj_core::{limits, Error, Scalar};

use crate::builtins;
use crate::cache::{spec_hash, CoefficientCache};
use crate::document::SpecDocument;
use crate::{CliError, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "kproj",
    version,
    about = "Exact workbench for k-projective sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DnMode {
    Prop52,
    Deg2,
    Solve,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the first N terms.
    Gen {
        /// Path to a spec document, or `builtin:NAME`.
        #[arg(long)]
        spec: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write a binary coefficient cache.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Read the terms from a cache instead of evaluating the spec.
        #[arg(long)]
        from_cache: Option<PathBuf>,
    },
    /// Factor complexity, periodicity scan and long repetitions of a prefix.
    Analyze {
        #[arg(long)]
        spec: String,
        #[arg(long = "W")]
        w: usize,
        #[arg(long, default_value_t = 16)]
        m_max: usize,
        /// Check p(m) <= b^(2d) k m; needs --d.
        #[arg(long, requires = "d")]
        bound: bool,
        /// Alphabet size; defaults to the number of symbols in the window.
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        d: Option<u32>,
        /// Radix; defaults to the spec radix.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 16)]
        l_max: usize,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        #[arg(long)]
        repetitions: bool,
        #[arg(long, default_value_t = 4.0)]
        u_cap: f64,
        #[arg(long, default_value_t = 4.0)]
        w_cap: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block decomposition of a Cartier system at level y.
    Fractal {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Padé pairs and the cross-determinant criterion.
    Dn {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum)]
        mode: DnMode,
        /// Comma-separated levels; defaults depend on the mode.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 3)]
        deg_q: usize,
        #[arg(long, default_value_t = 3)]
        deg_p: usize,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long)]
        c1: Option<String>,
        #[arg(long)]
        c2: Option<String>,
        #[arg(long)]
        c3: Option<u64>,
        #[arg(long)]
        r: Option<u32>,
        /// m(i) = m_step * i.
        #[arg(long)]
        m_step: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First base-b digits of sum a(n) / b^(n+1), i.e. a(0) a(1) ... a(D-1).
    Expand {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        base: u32,
        #[arg(long)]
        digits: usize,
    },
    /// Cross-check a system against an independent evaluation route.
    Verify {
        #[arg(long)]
        spec: String,
        #[arg(long = "N", default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        e_max: usize,
        #[arg(long, default_value_t = 32)]
        n_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a builtin document, or list them.
    Builtin { name: Option<String> },
}

pub fn load_spec(arg: &str) -> Result<SpecDocument, CliError> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtins::document(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown builtin {name:?}; known: {}",
                builtins::NAMES.join(", ")
            ))
        });
    }
    let text =
        fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))?;
    SpecDocument::parse(&text)
}

/// Writes through a temporary file so a failed run leaves nothing behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io)?;
    tmp.write_all(bytes).map_err(CliError::io)?;
    tmp.persist(path).map_err(|e| CliError::io(e.error))?;
    Ok(())
}

fn emit(bytes: Vec<u8>, out: &Option<PathBuf>, passed: bool) -> Result<Outcome, CliError> {
    match out {
        Some(path) => {
            write_atomic(path, &bytes)?;
            Ok(Outcome {
                stdout: Vec::new(),
                passed,
            })
        }
        None => Ok(Outcome {
            stdout: bytes,
            passed,
        }),
    }
}

fn json_bytes(value: &impl Serialize) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("reports serialize");
    v.push(b'\n');
    v
}

pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen {
            spec,
            n,
            out,
            format,
            cache,
            from_cache,
        } => gen(&spec, n, out, format, cache, from_cache),
        Command::Analyze {
            spec,
            w,
            m_max,
            bound,
            b,
            d,
            k,
            l_max,
            n_max,
            repetitions,
            u_cap,
            w_cap,
            out,
        } => {
            let opts = AnalyzeOptions {
                w,
                m_max,
                bound,
                b,
                d,
                k,
                l_max,
                n_max,
                repetitions,
                caps: (u_cap, w_cap),
            };
            analyze(&spec, opts, out)
        }
        Command::Fractal {
            spec,
            y,
            n_max,
            out,
        } => fractal(&spec, y, n_max, out),
        Command::Dn {
            spec,
            mode,
            levels,
            s,
            t,
            n,
            deg_q,
            deg_p,
            target,
            c1,
            c2,
            c3,
            r,
            m_step,
            out,
        } => {
            let opts = DnOptions {
                mode,
                levels,
                s,
                t,
                n,
                deg_q,
                deg_p,
                target,
                c1,
                c2,
                c3,
                r,
                m_step,
            };
            dn(&spec, opts, out)
        }
        Command::Expand { spec, base, digits } => expand(&spec, base, digits),
        Command::Verify {
            spec,
            n,
            e_max,
            n_max,
            out,
        } => verify(&spec, n, e_max, n_max, out),
        Command::Builtin { name } => match name {
            None => Ok(Outcome {
                stdout: format!("{}\n", builtins::NAMES.join("\n")).into_bytes(),
                passed: true,
            }),
            Some(name) => {
                let doc = builtins::document(&name)
                    .ok_or_else(|| CliError::Usage(format!("unknown builtin {name:?}")))?;
                Ok(Outcome {
                    stdout: json_bytes(&doc),
                    passed: true,
                })
            }
        },
    }
}

/// Dimension recorded in cache headers.
fn dimension(body: &SequenceSpec) -> u32 {
    match body {
        SequenceSpec::CartierSystem(s) => s.d as u32,
        SequenceSpec::MatrixProduct(m) => m.d as u32,
        SequenceSpec::Chain(c) => c.depth as u32,
        SequenceSpec::RecursiveWord(w) => w.d as u32,
        _ => 1,
    }
}

fn gen(
    spec: &str,
    n: usize,
    out: Option<PathBuf>,
    format: Format,
    cache: Option<PathBuf>,
    from_cache: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let doc = load_spec(spec)?;
    limits::check_coeffs(n)?;
    let hash = spec_hash(&doc.body_bytes());
    let values = match &from_cache {
        Some(path) => {
            let bytes = fs::read(path).map_err(CliError::io)?;
            let loaded = CoefficientCache::from_bytes(&bytes)?;
            if loaded.header.spec_hash != hash {
                return Err(CliError::Schema(
                    "cache was generated from a different spec".into(),
                ));
            }
            if loaded.values.len() < n {
                return Err(CliError::Usage(format!(
                    "cache holds {} terms, {n} requested",
                    loaded.values.len()
                )));
            }
            loaded.values[..n].to_vec()
        }
        None => prefix(&doc.body, n)?,
    };
    for (i, v) in values.iter().enumerate() {
        doc.check_scalar(i as u64, v)?;
    }
    let bytes = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["index", "value"])
                .map_err(|e| CliError::Io(e.to_string()))?;
            for (i, v) in values.iter().enumerate() {
                w.write_record([i.to_string(), v.to_string()])
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))?
        }
        Format::Json => json_bytes(&json!({ "name": doc.name, "count": n, "values": values })),
    };
    if let Some(path) = &cache {
        let k = doc.radix().unwrap_or(0);
        let c = CoefficientCache::new(
            hash,
            k,
            dimension(&doc.body),
            doc.field.cyclotomic_order,
            values,
        );
        write_atomic(path, &c.to_bytes()?)?;
    }
    emit(bytes, &out, true)
}

struct AnalyzeOptions {
    w: usize,
    m_max: usize,
    bound: bool,
    b: Option<u64>,
    d: Option<u32>,
    k: Option<u32>,
    l_max: usize,
    n_max: usize,
    repetitions: bool,
    caps: (f64, f64),
}

fn analyze(spec: &str, o: AnalyzeOptions, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    let doc = load_spec(spec)?;
    limits::check_coeffs(o.w)?;
    let word = prefix(&doc.body, o.w)?;
    let mut complexity = word_complexity(&word, o.m_max)?;
    if o.bound {
        let d =
            o.d.ok_or_else(|| CliError::Usage("--bound needs --d".into()))?;
        let k =
            o.k.or(doc.radix())
                .ok_or_else(|| CliError::Usage("--bound needs --k for a radix-free spec".into()))?;
        let b = o.b.unwrap_or(complexity.alphabet_size as u64);
        complexity.bound = Some(check_complexity_bound(&complexity, b, d, k));
    }
    let periodicity = word_periodicity(&word, o.l_max, o.n_max)?;
    let repetitions = if o.repetitions {
        Some(word_repetitions(&word, o.caps)?)
    } else {
        None
    };
    let passed = complexity.bound.as_ref().is_none_or(|b| b.passed);
    let report = json!({
        "window": o.w,
        "note": "finite-window evidence over the first W terms",
        "complexity": complexity,
        "periodicity": periodicity,
        "repetitions": repetitions,
    });
    emit(json_bytes(&report), &out, passed)
}

fn cartier_body(doc: &SpecDocument) -> Result<&kproj_core::matrix::CartierSystem, CliError> {
    match &doc.body {
        SequenceSpec::CartierSystem(sys) => Ok(sys),
        _ => Err(CliError::Usage(
            "this command needs a cartier_system body".into(),
        )),
    }
}

fn fractal(spec: &str, y: usize, n_max: u64, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    let doc = load_spec(spec)?;
    let sys = cartier_body(&doc)?;
    match fractal_decompose(sys, y, n_max) {
        Ok(dec) => {
            let census = fractal_copy_census(&dec);
            let report = json!({ "passed": true, "y": y, "n_max": n_max, "census": census, "decomposition": dec });
            emit(json_bytes(&report), &out, true)
        }
        Err(Error::BlockMismatch { n, j, detail }) => {
            let report = json!({ "passed": false, "y": y, "n_max": n_max, "mismatch": { "n": n, "j": j, "detail": detail } });
            emit(json_bytes(&report), &out, false)
        }
        Err(e) => Err(e.into()),
    }
}

struct DnOptions {
    mode: DnMode,
    levels: Vec<usize>,
    s: usize,
    t: usize,
    n: Option<usize>,
    deg_q: usize,
    deg_p: usize,
    target: Option<usize>,
    c1: Option<String>,
    c2: Option<String>,
    c3: Option<u64>,
    r: Option<u32>,
    m_step: Option<u64>,
}

fn parse_rational(s: &Option<String>, default: i64) -> Result<Scalar, CliError> {
    match s {
        None => Ok(Scalar::from_int(default)),
        Some(text) => {
            let v: Scalar = text
                .parse()
                .map_err(|e| CliError::Usage(format!("bad constant {text:?}: {e}")))?;
            if v.as_rational().is_none() {
                return Err(CliError::Usage(format!(
                    "constant {text:?} must be rational"
                )));
            }
            Ok(v)
        }
    }
}

fn family(doc: &SpecDocument) -> Result<&CoeffFamily, CliError> {
    match &doc.body {
        SequenceSpec::InfiniteProduct(fam) => Ok(fam),
        _ => Err(CliError::Usage(
            "this mode needs an infinite_product body".into(),
        )),
    }
}

fn dn(spec: &str, o: DnOptions, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    let doc = load_spec(spec)?;
    let params = |c1: i64, c2: i64, c3: u64, r: u32, step: u64| -> Result<DNParams, CliError> {
        let c1 = parse_rational(&o.c1, c1)?;
        let c2 = parse_rational(&o.c2, c2)?;
        let m = MSequence::affine(o.m_step.unwrap_or(step), 0);
        DNParams::new(c1, c2, o.c3.unwrap_or(c3), o.r.unwrap_or(r), m)
            .map_err(|e| CliError::Usage(e.to_string()))
    };
    let (pairs, params) = match o.mode {
        DnMode::Prop52 => {
            let fam = family(&doc)?;
            let levels = if o.levels.is_empty() {
                (0..=5).collect()
            } else {
                o.levels.clone()
            };
            let pairs = levels
                .iter()
                .map(|&y| prop52_pair(fam, y, o.s, o.t))
                .collect::<Result<Vec<_>, _>>()?;
            let p = params(o.t as i64, o.t as i64 + 1, 1, fam.k, 1)?;
            (pairs, p)
        }
        DnMode::Deg2 => {
            let fam = family(&doc)?;
            let levels = if o.levels.is_empty() {
                vec![0, 2, 4]
            } else {
                o.levels.clone()
            };
            let pairs = levels
                .iter()
                .map(|&n| deg2_pair(fam, n))
                .collect::<Result<Vec<_>, _>>()?;
            let p = params(3, 4, 2, 2, 2)?;
            (pairs, p)
        }
        DnMode::Solve => {
            let n =
                o.n.ok_or_else(|| CliError::Usage("solve mode needs --N".into()))?;
            let target = o.target.unwrap_or(o.deg_q + o.deg_p + 1);
            let f = gen_series(&doc.body, n)?;
            let pair = pade_solve(&f, o.deg_q, o.deg_p, target)?;
            let report = json!({ "mode": "solve", "N": n, "target": target, "pair": pair });
            return emit(json_bytes(&report), &out, pair.is_some());
        }
    };
    let needed = pairs.iter().map(|p| p.certified_order).max().unwrap_or(0);
    let f = gen_series(&doc.body, needed)?;
    let report = dn_check(&f, &pairs, &params)?;
    let passed = report.passed;
    let body = json!({
        "mode": match o.mode { DnMode::Prop52 => "prop52", DnMode::Deg2 => "deg2", DnMode::Solve => "solve" },
        "pairs": pairs.iter().map(pair_json).collect::<Vec<_>>(),
        "report": report,
    });
    emit(json_bytes(&body), &out, passed)
}

fn pair_json(p: &PadePair) -> serde_json::Value {
    json!({ "n": p.n, "certified_order": p.certified_order, "q": p.q, "p": p.p })
}

fn expand(spec: &str, base: u32, digits: usize) -> Result<Outcome, CliError> {
    if !(2..=36).contains(&base) {
        return Err(CliError::Usage(format!(
            "base must be in 2..=36, got {base}"
        )));
    }
    let doc = load_spec(spec)?;
    limits::check_coeffs(digits)?;
    let view = SequenceView::new(&doc.body)?;
    let mut text = String::with_capacity(digits + 1);
    for n in 0..digits as u64 {
        let v = view.eval(n)?;
        let d = v
            .to_i64()
            .filter(|d| (0..base as i64).contains(d))
            .ok_or_else(|| Error::OutOfRange {
                index: n,
                value: v.to_string(),
                reason: format!("not a base-{base} digit"),
            })?;
        text.push(char::from_digit(d as u32, base).expect("digit below base"));
    }
    text.push('\n');
    Ok(Outcome {
        stdout: text.into_bytes(),
        passed: true,
    })
}

fn first_difference(a: &[Scalar], b: &[Scalar]) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .or((a.len() != b.len()).then(|| a.len().min(b.len())))
}

fn verify(
    spec: &str,
    n: usize,
    e_max: usize,
    n_max: u64,
    out: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let doc = load_spec(spec)?;
    limits::check_coeffs(n)?;
    let report = match &doc.body {
        SequenceSpec::CartierSystem(sys) => {
            let target = sys
                .target
                .as_deref()
                .ok_or_else(|| CliError::Usage("the system has no target".into()))?;
            let cartier = verify_cartier(sys, target, e_max, n_max)?;
            let product = sys.to_matrix_product().product_coeffs(n)?;
            let direct = prefix(target, n)?;
            let diff = first_difference(product.coeffs(), &direct);
            json!({
                "passed": cartier.passed && diff.is_none(),
                "kind": "cartier_system",
                "cartier": cartier,
                "product_vs_target_first_difference": diff,
                "N": n,
            })
        }
        SequenceSpec::MatrixProduct(m) => {
            let product = m.product_coeffs(n)?;
            let sys = m.to_cartier()?;
            let direct = (0..n as u64)
                .map(|i| sys.eval(i))
                .collect::<Result<Vec<_>, _>>()?;
            let diff = first_difference(product.coeffs(), &direct);
            json!({ "passed": diff.is_none(), "kind": "matrix_product", "first_difference": diff, "N": n })
        }
        SequenceSpec::Chain(c) => {
            let l = c
                .coeff_degree()
                .ok_or_else(|| CliError::Usage("lift needs polynomial coefficients".into()))?;
            let lifted = becker_lift(c, l)?.product_coeffs(n)?;
            let solved = c.chain_solve(n)?;
            let diff = first_difference(lifted.coeffs(), solved.coeffs());
            json!({ "passed": diff.is_none(), "kind": "chain", "degree": l, "first_difference": diff, "N": n })
        }
        _ => {
            return Err(CliError::Usage(
                "verify needs a cartier_system, matrix_product or chain body".into(),
            ))
        }
    };
    let passed = report["passed"].as_bool().unwrap_or(false);
    emit(json_bytes(&report), &out, passed)
}
