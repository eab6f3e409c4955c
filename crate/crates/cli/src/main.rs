use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mclex_core::classifier::{classify_regular, implies_mal_lex};
use mclex_core::engine::DEFAULT_CSP_NODES;
use mclex_core::finite_models::{interp_closed, FiniteRelation, DEFAULT_INTERP_CAP};
use mclex_core::format::MatrixJson;
use mclex_core::poset::{
    build_poset_with_stats, emit_dot, enumerate_canonical, DotOptions, VerdictCache,
    DEFAULT_ENUM_CEILING,
};
use mclex_core::{
    degeneracy_class, gen_mn, gen_named, implies_lex_with, parse_matrix, render_matrix, Error,
    Format, Limits, Matrix, Named,
};

const LONG_ABOUT: &str = "\
Decides implications between matrix properties of finitely complete
categories, classifies matrices, and builds posets of matrix classes.

MATRIX arguments are files in text form (one row per line, left entries,
then `|` and the right entry, e.g. `1 2 2 | 1`) or JSON form. `-` reads
standard input. `@mal`, `@maj`, `@ari` and `@mN` (for example `@m4`) name
generated matrices.

Exit status: 0 for a positive verdict or success, 1 for a negative verdict,
2 for input errors and exhausted resource limits.";

#[derive(Parser, Debug)]
#[command(name = "mclex", version, about = "Matrix property solver", long_about = LONG_ABOUT)]
struct Cli {
    /// Search node cap for one implication query.
    #[arg(long, env = "MCLEX_CSP_NODES", default_value_t = DEFAULT_CSP_NODES,
          value_parser = clap::value_parser!(u64).range(1..), global = true)]
    csp_nodes: u64,

    /// Cap on the number of interpretations scanned by `check-relation`.
    #[arg(long, env = "MCLEX_INTERP_CAP", default_value_t = DEFAULT_INTERP_CAP,
          value_parser = clap::value_parser!(u64).range(1..), global = true)]
    interp_cap: u64,

    /// Cap on the number of raw matrices enumerated by `poset`.
    #[arg(long, env = "MCLEX_ENUM_CEILING", default_value_t = DEFAULT_ENUM_CEILING,
          value_parser = clap::value_parser!(u64).range(1..), global = true)]
    enum_ceiling: u64,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "MCLEX_WORKERS", value_parser = clap::value_parser!(u64).range(1..),
          global = true)]
    workers: Option<u64>,

    /// Output form for matrices printed by `gen`.
    #[arg(long, env = "MCLEX_FORMAT", value_enum, default_value_t = OutputFormat::Text,
          global = true)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide SOURCE ⇒_lex TARGET and print the verdict with a certificate.
    Implies { source: String, target: String },
    /// Degeneracy class of a matrix, or its regular classification.
    Classify {
        matrix: String,
        /// Place the matrix relative to Mal and Maj in regular categories.
        #[arg(long)]
        regular: bool,
    },
    /// Print a generated matrix.
    Gen {
        #[arg(value_enum)]
        family: Family,
        /// Row count for `mn`.
        rows: Option<usize>,
    },
    /// Build the poset of matrix classes with N rows, M left columns and K variables.
    Poset {
        n: usize,
        m: usize,
        k: usize,
        /// Keep only non-degenerate matrices.
        #[arg(long)]
        nondegenerate_only: bool,
        /// Write the Hasse diagram in DOT form to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Write the poset as JSON to this file.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Verdict cache, read before and written after the build.
        #[arg(long, env = "MCLEX_CACHE", value_name = "FILE")]
        cache: Option<PathBuf>,
    },
    /// Check whether a finite relation is strictly closed under a matrix.
    CheckRelation { relation: PathBuf, matrix: String },
    /// Search for a Boolean function matching every row of a matrix.
    BoolTerm { matrix: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Mal,
    Maj,
    Ari,
    Mn,
}

fn read_input(arg: &str) -> anyhow::Result<String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

fn load_matrix(arg: &str) -> anyhow::Result<Matrix> {
    if let Some(name) = arg.strip_prefix('@') {
        let lower = name.to_ascii_lowercase();
        if let Some(n) = lower
            .strip_prefix('m')
            .and_then(|d| d.parse::<usize>().ok())
        {
            return Ok(gen_mn(n)?);
        }
        return Ok(gen_named(lower.parse::<Named>()?));
    }
    let text = read_input(arg)?;
    parse_matrix(&text).with_context(|| format!("parsing {arg}"))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON renders"));
}

fn limits(cli: &Cli) -> Limits {
    Limits {
        csp_nodes: cli.csp_nodes,
        ..Limits::default()
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build_global()
            .context("starting worker pool")?;
    }
    match &cli.command {
        Command::Implies { source, target } => {
            let a = load_matrix(source)?;
            let b = load_matrix(target)?;
            let verdict = implies_lex_with(&a, &b, &limits(cli))?;
            print_json(&json!({
                "source": MatrixJson::from(&a),
                "target": MatrixJson::from(&b),
                "holds": verdict.holds,
                "certificate": verdict.certificate,
                "stats": verdict.stats,
            }));
            Ok(exit(verdict.holds))
        }
        Command::Classify { matrix, regular } => {
            let m = load_matrix(matrix)?;
            if *regular {
                let mut v = classify_regular(&m).to_json();
                v["implies_mal_lex"] = json!(implies_mal_lex(&m));
                print_json(&v);
            } else {
                print_json(&degeneracy_class(&m).to_json());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { family, rows } => {
            let m = match (family, rows) {
                (Family::Mn, Some(n)) => gen_mn(*n)?,
                (Family::Mn, None) => bail!("`gen mn` needs a row count"),
                (_, Some(_)) => bail!("only `gen mn` takes a row count"),
                (Family::Mal, None) => gen_named(Named::Mal),
                (Family::Maj, None) => gen_named(Named::Maj),
                (Family::Ari, None) => gen_named(Named::Ari),
            };
            print!("{}", render_matrix(&m, cli.format.into()));
            if matches!(cli.format, OutputFormat::Json) {
                println!();
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Poset {
            n,
            m,
            k,
            nondegenerate_only,
            dot,
            json: json_out,
            cache,
        } => {
            let mut ms = enumerate_canonical(*n, *m, *k, cli.enum_ceiling)?;
            if *nondegenerate_only {
                ms.retain(|c| !degeneracy_class(c).tag.is_degenerate());
            }
            let mut verdicts = match cache {
                Some(p) => VerdictCache::load(p)?,
                None => VerdictCache::default(),
            };
            let (poset, stats) = build_poset_with_stats(&ms, &limits(cli), &mut verdicts)?;
            if let Some(p) = cache {
                verdicts.save(p)?;
            }
            if let Some(p) = dot {
                write(p, &emit_dot(&poset, DotOptions::default()))?;
            }
            if let Some(p) = json_out {
                let mut text = serde_json::to_string_pretty(&poset.to_json())?;
                text.push('\n');
                write(p, &text)?;
            }
            print_json(&json!({
                "shape": [n, m, k],
                "matrices": ms.len(),
                "classes": poset.len(),
                "hasse_edges": poset.hasse().len(),
                "minimum": poset.minimum(),
                "queries": stats.queries,
                "engine_calls": stats.engine_calls,
                "cache_hits": stats.cache_hits,
                "entailed": stats.entailed,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckRelation { relation, matrix } => {
            let text = fs::read_to_string(relation)
                .with_context(|| format!("reading {}", relation.display()))?;
            let r = FiniteRelation::parse(&text)?;
            let m = load_matrix(matrix)?;
            let report = interp_closed(&r, &m, cli.interp_cap)?;
            let cx = report
                .counterexample
                .as_ref()
                .map(|c| json!({ "interps": c.interps, "left": c.left, "right": c.right }));
            print_json(&json!({ "closed": report.closed, "counterexample": cx }));
            Ok(exit(report.closed))
        }
        Command::BoolTerm { matrix } => {
            let m = load_matrix(matrix)?;
            let verdict = degeneracy_class(&m);
            let v = verdict.to_json();
            print_json(&json!({
                "exists": verdict.witness.is_some(),
                "witness": v["witness"],
                "conflict": v["conflict"],
            }));
            Ok(exit(verdict.witness.is_some()))
        }
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn exit(positive: bool) -> ExitCode {
    if positive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let text = e.render().to_string();
            eprint!("{text}");
            if !text.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(Error::ResourceLimit { .. }) => eprintln!("mclex: resource limit: {e:#}"),
                _ => eprintln!("mclex: error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
