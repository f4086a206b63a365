//! `findeg`: homotopy classes, invariant degrees and verification suites
//! from the command line.
//!
//! Exit codes: 0 success, 2 check failure, 3 cap exceeded, 4 bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use findeg::catalog::{class_labels, find_class, resolve, resolve_crew, Describe, InvariantFile, Object};
use findeg::invariants::{Context, DEFAULT_R_MAX};
use findeg::simplicial::Caps;
use findeg::suites::{run_suite, SuiteConfig, Verdict};
use findeg::{Error, Fp};

#[derive(Parser, Debug)]
#[command(name = "findeg", version, about = "Finite-degree invariants of maps into simplicial targets")]
struct Cli {
    /// Worker threads (defaults to FINDEG_THREADS, then the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output on stdout.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Enumeration caps, e.g. `maps=4096,cells=20000,level=65536`.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Seed for every random choice; echoed in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON report (or, for `separate`, the separating
    /// invariant) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Homotopy classes of maps from a crew into a target.
    Pi0 {
        #[command(flatten)]
        pair: Pair,
    },
    /// Simplicial degree of an invariant given as a JSON table.
    Degree {
        #[command(flatten)]
        pair: Pair,
        /// `{"values": {class-label: int}}`.
        #[arg(long)]
        invariant: PathBuf,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: usize,
    },
    /// Least degree of an invariant telling two classes apart.
    Separate {
        #[command(flatten)]
        pair: Pair,
        /// Class label, or `#index`.
        #[arg(long)]
        class1: String,
        #[arg(long)]
        class2: String,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: usize,
    },
    /// Run a verification suite: lemma-3, lemma-4, lemma-7, lemma-12,
    /// theorem-1-2 or all.
    Suite {
        name: String,
        /// Key trials in the keys suite.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: usize,
    },
}

#[derive(clap::Args, Debug, Serialize)]
struct Pair {
    #[arg(long)]
    source: String,
    #[arg(long)]
    target: String,
    /// Coefficient prime when the target is a crew (modules carry their own).
    #[arg(long, default_value_t = 2)]
    prime: u32,
}

fn parse_caps(spec: Option<&str>) -> Result<Caps, Error> {
    let mut caps = Caps::default();
    let Some(spec) = spec else { return Ok(caps) };
    for part in spec.split(',').filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::argument(format!("cap `{part}` is not key=value")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::argument(format!("cap `{part}` is not a number")))?;
        match key {
            "maps" => caps.maps = value,
            "cells" => caps.cells = value,
            "level" => caps.level_elements = value,
            _ => return Err(Error::argument(format!("unknown cap `{key}`"))),
        }
    }
    Ok(caps)
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a Command,
    seed: u64,
    caps: Caps,
    result: Value,
}

/// What a command produced: the JSON result, a text rendering and the exit
/// code.
struct Outcome {
    result: Value,
    text: String,
    code: u8,
    /// Written to `--out` instead of the report.
    file: Option<Value>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(4, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let threads = match cli.threads {
        Some(n) => Some(n),
        None => std::env::var("FINDEG_THREADS").ok().and_then(|s| s.parse().ok()),
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let caps = parse_caps(cli.caps.as_deref())?;
    let outcome = match &cli.command {
        Command::Pi0 { pair } => with_context(pair, caps, |ctx| Ok(pi0(ctx)))?,
        Command::Degree { pair, invariant, r_max } => with_context(pair, caps, |ctx| degree(ctx, invariant, *r_max))?,
        Command::Separate {
            pair,
            class1,
            class2,
            r_max,
        } => with_context(pair, caps, |ctx| separate(ctx, class1, class2, *r_max))?,
        Command::Suite { name, trials, r_max } => suite(name, cli.seed, caps, *trials, *r_max)?,
    };
    let report = Report {
        command: &cli.command,
        seed: cli.seed,
        caps,
        result: outcome.result,
    };
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &cli.out {
        let body = match &outcome.file {
            Some(v) => serde_json::to_string_pretty(v)?,
            None => json.clone(),
        };
        std::fs::write(path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    match cli.format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{}", outcome.text),
    }
    Ok(outcome.code)
}

/// Builds the function complex for a pair and hands it to `f`, whatever
/// kind the target is.
fn with_context(
    pair: &Pair,
    caps: Caps,
    f: impl Fn(&dyn FunctionComplex) -> anyhow::Result<Outcome>,
) -> anyhow::Result<Outcome> {
    let source = resolve_crew(&pair.source, &caps)?;
    match resolve(&pair.target, &caps)? {
        Object::Module(m) => f(&Context::module(&source, &m, caps)?),
        Object::Crew(t) => {
            let field = Fp::new(pair.prime).map_err(|e| Error::argument(e.to_string()))?;
            f(&Context::crew(&source, &t, field, caps)?)
        }
    }
}

/// The operations commands need from a function complex, independent of
/// the target kind.
trait FunctionComplex {
    fn labels(&self) -> Vec<String>;
    fn field(&self) -> Fp;
    fn pi0(&self) -> &findeg::simplicial::Pi0;
    fn edge_quotient(&self) -> bool;
    fn degree(&self, t: &findeg::invariants::InvariantTable, r_max: usize) -> findeg::Result<findeg::invariants::DegreeReport>;
    fn separate(&self, a: usize, b: usize, r_max: usize) -> findeg::Result<Option<findeg::invariants::Separation>>;
}

impl<T: Describe> FunctionComplex for Context<T> {
    fn labels(&self) -> Vec<String> {
        class_labels(self.source(), self.target(), self.vertices(), self.pi0())
    }
    fn field(&self) -> Fp {
        Context::field(self)
    }
    fn pi0(&self) -> &findeg::simplicial::Pi0 {
        Context::pi0(self)
    }
    fn edge_quotient(&self) -> bool {
        self.is_edge_quotient()
    }
    fn degree(&self, t: &findeg::invariants::InvariantTable, r_max: usize) -> findeg::Result<findeg::invariants::DegreeReport> {
        self.simp_degree(t, r_max)
    }
    fn separate(&self, a: usize, b: usize, r_max: usize) -> findeg::Result<Option<findeg::invariants::Separation>> {
        Context::separate(self, a, b, r_max)
    }
}

fn pi0(ctx: &dyn FunctionComplex) -> Outcome {
    let pi0 = ctx.pi0();
    let labels = ctx.labels();
    let mut text = format!("{} maps, {} classes\n", pi0.vertex_count, pi0.class_count());
    if ctx.edge_quotient() {
        text += "(classes are taken modulo elementary homotopies)\n";
    }
    for (i, l) in labels.iter().enumerate() {
        text += &format!("  #{i} {l} ({} maps)\n", pi0.classes[i].len());
    }
    if let Some(m) = &pi0.module {
        text += &format!("module structure: F_{}^{}\n", ctx.field().p(), m.h0_dim);
    }
    Outcome {
        result: json!({
            "maps": pi0.vertex_count,
            "classes": pi0.class_count(),
            "representatives": labels,
            "class_sizes": pi0.classes.iter().map(Vec::len).collect::<Vec<_>>(),
            "module": pi0.module,
            "edge_quotient": ctx.edge_quotient(),
        }),
        text,
        code: 0,
        file: None,
    }
}

fn degree(ctx: &dyn FunctionComplex, invariant: &PathBuf, r_max: usize) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(invariant)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", invariant.display())))?;
    let file: InvariantFile = serde_json::from_str(&text)
        .map_err(|e| Error::validation(format!("{}: {e}", invariant.display())))?;
    let table = file.to_table(ctx.field().p(), &ctx.labels())?;
    let rep = ctx.degree(&table, r_max)?;
    let digest = rep.factorization.as_ref().map(|f| f.digest());
    let text = match (rep.degree, &digest) {
        (Some(d), Some(h)) => format!("degree {d} (factorization {h})\n"),
        (Some(d), None) => format!("degree {d}\n"),
        (None, _) => format!("degree exceeds r_max = {r_max}\n"),
    };
    Ok(Outcome {
        result: json!({
            "degree": rep.degree.map_or(json!("exceeds r_max"), |d| json!(d)),
            "r_max": r_max,
            "factorization_digest": digest,
            "table": table.values,
        }),
        text,
        code: 0,
        file: None,
    })
}

fn separate(ctx: &dyn FunctionComplex, class1: &str, class2: &str, r_max: usize) -> anyhow::Result<Outcome> {
    let labels = ctx.labels();
    let (a, b) = (find_class(&labels, class1)?, find_class(&labels, class2)?);
    if a == b {
        return Err(Error::validation(format!("`{class1}` and `{class2}` are the same class")).into());
    }
    let Some(sep) = ctx.separate(a, b, r_max)? else {
        return Ok(Outcome {
            result: json!({ "separated": false, "r_max": r_max }),
            text: format!("inseparable at r_max = {r_max}\n"),
            code: 0,
            file: None,
        });
    };
    let file = InvariantFile::from_table(&sep.table, &labels);
    Ok(Outcome {
        result: json!({ "separated": true, "r": sep.r, "invariant": file }),
        text: format!("separated in degree {}: {} -> {}, {} -> {}\n", sep.r, labels[a], sep.table.values[a], labels[b], sep.table.values[b]),
        code: 0,
        file: Some(serde_json::to_value(&file)?),
    })
}

fn suite(name: &str, seed: u64, caps: Caps, trials: usize, r_max: usize) -> anyhow::Result<Outcome> {
    let config = SuiteConfig {
        seed,
        caps,
        trials,
        r_max,
    };
    let report = run_suite(name, &config)?;
    let mut text = String::new();
    for c in &report.checks {
        let tag = match c.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::CapExceeded => "CAP ",
        };
        text += &format!("{tag} [{}] {}\n", c.suite, c.name);
        if c.verdict != Verdict::Pass {
            text += &format!("     {}\n", c.detail);
        }
    }
    text += &format!(
        "{} passed, {} failed, {} capped (seed {seed})\n",
        report.passed, report.failed, report.capped
    );
    Ok(Outcome {
        result: serde_json::to_value(&report).map_err(|e| anyhow!(e))?,
        text,
        code: report.exit_code() as u8,
        file: None,
    })
}
