use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qgsmooth::config::{export_dot, parse, Document};
use qgsmooth::corpus::{self, ExampleOutcome};
use qgsmooth::exec::Exec;
use qgsmooth::ratlin::fmt_rational;
use qgsmooth::smoothing::{report, ReportError, SingularSurfaceReport};
use qgsmooth::wahl::{analyze, generate_class_t, Chain, ChainAnalysis};

#[derive(Parser)]
#[command(
    name = "qgsmooth",
    version,
    about = "Verify Q-Gorenstein smoothing constructions"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Output::Text)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for a configuration document
    Verify { path: PathBuf },
    /// Report for one shipped example
    Example { name: String },
    /// Check every shipped example, or every document in a directory
    VerifyAll {
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Analyze a chain given as comma-separated entries, e.g. 4,2,3,2
    Chain { entries: String },
    /// List every class T chain within the bounds
    #[command(name = "enumerate-classT")]
    EnumerateClassT {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        max_entry: u64,
    },
    /// Dual graph of a document in DOT
    ExportDot {
        path: PathBuf,
        /// Export the configuration after all blow-ups
        #[arg(long)]
        blown_up: bool,
    },
}

/// Exit 2: the input itself is unusable.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Run = Result<(String, bool), InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Run {
    let json = cli.output == Output::Json;
    match &cli.command {
        Command::Verify { path } => verify(&load(path)?, json),
        Command::Example { name } => {
            corpus::builtin(name)?;
            let outcome = corpus::verify_example(name)?;
            example(&outcome, json)
        }
        Command::VerifyAll {
            corpus_dir,
            sequential,
        } => {
            let exec = if *sequential {
                Exec::Sequential
            } else {
                Exec::Parallel
            };
            let rows = match corpus_dir {
                Some(dir) => corpus::verify_dir(dir, exec)?,
                None => corpus::verify_all(exec),
            };
            table(&rows, json)
        }
        Command::Chain { entries } => chain(&parse_chain(entries)?, json),
        Command::EnumerateClassT { max_len, max_entry } => {
            Ok((enumerate(*max_len, *max_entry, json), true))
        }
        Command::ExportDot { path, blown_up } => {
            let doc = load(path)?;
            let config = if *blown_up {
                doc.final_configuration()?
            } else {
                doc.config
            };
            Ok((export_dot(&config), true))
        }
    }
}

fn load(path: &Path) -> Result<Document, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn build_report(doc: &Document) -> Result<SingularSurfaceReport, InputError> {
    report(doc).map_err(|e| match e {
        ReportError::NoPlan => InputError("plan: document has no contraction plan".into()),
        e => InputError(e.to_string()),
    })
}

fn verify(doc: &Document, json: bool) -> Run {
    let r = build_report(doc)?;
    let ok = r.passed();
    Ok((if json { to_json(&r) } else { r.to_text() }, ok))
}

fn example(o: &ExampleOutcome, json: bool) -> Run {
    if json {
        return Ok((to_json(o), o.passed));
    }
    let Some(r) = &o.report else {
        return Err(InputError(o.row()));
    };
    let mut s = String::new();
    for m in &o.mismatches {
        let _ = writeln!(s, "mismatch={m}");
    }
    s.push_str(&r.to_text());
    Ok((s, o.passed))
}

fn table(rows: &[ExampleOutcome], json: bool) -> Run {
    let ok = corpus::all_passed(rows);
    if json {
        return Ok((to_json(&rows), ok));
    }
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(s, "{}", r.row());
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    let _ = writeln!(s, "summary={passed}/{} passed", rows.len());
    Ok((s, ok))
}

fn parse_chain(text: &str) -> Result<Chain, InputError> {
    let entries = text
        .split(',')
        .map(|t| {
            t.trim().parse::<u64>().map_err(|_| {
                InputError(format!(
                    "chain: entry `{}` is not a positive integer",
                    t.trim()
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Chain::new(entries).map_err(|e| InputError(format!("chain: {e}")))
}

fn joined<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn chain_line(a: &ChainAnalysis) -> String {
    let tail = format!(
        "contribution={} discrepancies={}",
        fmt_rational(&a.contribution),
        joined(a.discrepancies.iter().map(fmt_rational))
    );
    match &a.class_t {
        Some(t) => format!(
            "classT d={} n={} a={} m={} q={} index={} {tail}",
            t.d, t.n, t.a, t.m, t.q, t.n
        ),
        None => format!("not-classT m={} q={} {tail}", a.m, a.q),
    }
}

fn chain_json(a: &ChainAnalysis) -> serde_json::Value {
    let t = a.class_t.as_ref();
    json!({
        "chain": a.chain.entries(),
        "m": a.m.to_string(),
        "q": a.q.to_string(),
        "class_t": t.is_some(),
        "d": t.map(|t| t.d.to_string()),
        "n": t.map(|t| t.n.to_string()),
        "a": t.map(|t| t.a.to_string()),
        "index": t.map(|t| t.n.to_string()),
        "contribution": fmt_rational(&a.contribution),
        "discrepancies": a.discrepancies.iter().map(fmt_rational).collect::<Vec<_>>(),
    })
}

fn chain(c: &Chain, json: bool) -> Run {
    let a = analyze(c);
    let ok = a.class_t.is_some();
    let out = if json {
        to_json(&chain_json(&a))
    } else {
        format!("{}\n", chain_line(&a))
    };
    Ok((out, ok))
}

fn enumerate(max_len: usize, max_entry: u64, json: bool) -> String {
    let all: Vec<ChainAnalysis> = generate_class_t(max_len, max_entry)
        .iter()
        .map(analyze)
        .collect();
    if json {
        return to_json(&all.iter().map(chain_json).collect::<Vec<_>>());
    }
    let mut s = String::new();
    for a in &all {
        let _ = writeln!(s, "[{}] {}", a.chain, chain_line(a));
    }
    s
}
