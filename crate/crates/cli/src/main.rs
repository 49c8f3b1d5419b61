use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use poincare_degrees::complex::ComplexDoc;
use poincare_degrees::solver::{
    check_degree, classify, degree_set, is_equivalent, DegreeReport, SearchParams, SolverError,
    Verdict, WitnessMatrix,
};
use poincare_degrees::{ComplexSpec, GroupTable, TableDoc};

/// Degrees of maps, degree sets and homotopy classification of
/// torsion-free (n-2)-connected (2n-1)-dimensional Poincaré complexes
#[derive(Parser, Debug)]
#[command(name = "pdeg", version, about, long_about = None)]
struct Cli {
    /// Homotopy table as JSON (defaults to the built-in table for n)
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Print machine-readable JSON
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a map X -> Y of degree d exists
    Check {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[command(flatten)]
        search: Search,
    },
    /// Degree verdicts for every d in [-range, range]
    Degrees {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        range: u64,
        #[command(flatten)]
        search: Search,
    },
    /// Decide whether X and Y are homotopy equivalent
    Equiv {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        search: Search,
    },
    /// Homotopy types of all complexes of a given rank
    Classify {
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        search: Search,
    },
    /// Show built-in homotopy tables
    Tables {
        #[arg(long)]
        n: Option<i64>,
    },
}

#[derive(Args, Debug)]
struct Pair {
    /// Dimension parameter; needed when X and Y are given as product:K or zk:K
    #[arg(long)]
    n: Option<i64>,
    /// Source complex: a JSON file, product:K or zk:K
    #[arg(long)]
    x: String,
    /// Target complex: a JSON file, product:K or zk:K
    #[arg(long)]
    y: String,
}

#[derive(Args, Debug)]
struct Search {
    /// Half-width of the search box for the A block
    #[arg(long = "box")]
    box_bound: Option<u64>,
    /// Comma-separated moduli for infeasibility certificates
    #[arg(long, value_delimiter = ',')]
    moduli: Option<Vec<u64>>,
}

impl Search {
    fn params(&self) -> SearchParams {
        SearchParams {
            moduli: self.moduli.clone(),
            box_bound: self.box_bound,
            ..SearchParams::default()
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckReport {
    x: ComplexDoc,
    y: ComplexDoc,
    d: i64,
    verdict: Verdict,
}

#[derive(Debug, Serialize, Deserialize)]
struct DegreesReport {
    x: ComplexDoc,
    y: ComplexDoc,
    report: DegreeReport,
}

#[derive(Debug, Serialize, Deserialize)]
struct EquivReport {
    x: ComplexDoc,
    y: ComplexDoc,
    equivalent: bool,
    witness: Option<WitnessMatrix>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClassDoc {
    representative: ComplexDoc,
    size: usize,
    members: Vec<ComplexDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClassifyReport {
    n: i64,
    rank: usize,
    classes: Vec<ClassDoc>,
}

/// A computation finished but hit an undecided verdict.
const UNDECIDED: u8 = 2;

fn load_table(path: Option<&Path>, n: Option<i64>) -> Result<Arc<GroupTable>> {
    let table = match path {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading table {}", p.display()))?;
            GroupTable::from_json(&text)
                .with_context(|| format!("loading table {}", p.display()))?
        }
        None => {
            let n = n.ok_or_else(|| anyhow!("--n or --table is required"))?;
            GroupTable::builtin(n)?
        }
    };
    if let Some(n) = n {
        if n != table.n() {
            bail!("--n {n} does not match the table (n = {})", table.n());
        }
    }
    Ok(Arc::new(table))
}

fn parse_rank(s: &str, spec: &str) -> Result<usize> {
    s.parse().with_context(|| format!("bad rank in {spec:?}"))
}

fn load_complex(spec: &str, table_path: Option<&Path>, n: Option<i64>) -> Result<ComplexSpec> {
    if let Some(k) = spec.strip_prefix("product:") {
        let table = load_table(table_path, n)?;
        return Ok(ComplexSpec::product_sum(table, parse_rank(k, spec)?)?);
    }
    if let Some(k) = spec.strip_prefix("zk:") {
        let z = ComplexSpec::z_complex(parse_rank(k, spec)?)?;
        if let Some(n) = n.filter(|&n| n != 7) {
            bail!("zk complexes live at n = 7, not {n}");
        }
        return Ok(z);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading complex {spec}"))?;
    let doc: ComplexDoc =
        serde_json::from_str(&text).with_context(|| format!("parsing complex {spec}"))?;
    let table = load_table(table_path, Some(n.unwrap_or(doc.n)))?;
    ComplexSpec::from_doc(&doc, table).with_context(|| format!("loading complex {spec}"))
}

fn load_pair(pair: &Pair, table: Option<&Path>) -> Result<(ComplexSpec, ComplexSpec)> {
    let x = load_complex(&pair.x, table, pair.n)?;
    let y = load_complex(&pair.y, table, pair.n.or(Some(x.n())))?;
    Ok((x, y))
}

fn print_json<T: Serialize>(out: &mut String, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn print_table(out: &mut String, t: &GroupTable) -> std::fmt::Result {
    let mo = t.required_moduli();
    writeln!(out, "n = {}", t.n())?;
    writeln!(
        out,
        "  g1 = pi_{}(S^{}) = {}  {:?}",
        2 * t.n() - 2,
        t.n() - 1,
        t.g1(),
        t.g1().names()
    )?;
    writeln!(
        out,
        "  g2 = pi_{}(S^{}) = {}  {:?}",
        2 * t.n() - 2,
        t.n(),
        t.g2(),
        t.g2().names()
    )?;
    writeln!(out, "  eta_push images: {:?}", t.eta_push().images())?;
    writeln!(out, "  whitehead_eta: {}", t.whitehead_eta())?;
    writeln!(out, "  hopf_h images: {:?}", t.hopf_h().images())?;
    writeln!(
        out,
        "  moduli: M_A = {}, M_C = {}, M_D = {}",
        mo.a, mo.c, mo.d
    )
}

fn run(cli: &Cli, out: &mut String) -> Result<u8> {
    let table = cli.table.as_deref();
    match &cli.command {
        Command::Check { pair, d, search } => {
            let (x, y) = load_pair(pair, table)?;
            let verdict = check_degree(&x, &y, *d, &search.params())?;
            let status = if verdict.is_undecided() { UNDECIDED } else { 0 };
            if cli.json {
                print_json(
                    out,
                    &CheckReport {
                        x: x.to_doc(),
                        y: y.to_doc(),
                        d: *d,
                        verdict,
                    },
                )?;
            } else {
                writeln!(out, "X: {x}")?;
                writeln!(out, "Y: {y}")?;
                writeln!(out, "d = {d}: {verdict}")?;
                if let Some(w) = verdict.witness() {
                    writeln!(out, "{w}")?;
                }
            }
            Ok(status)
        }
        Command::Degrees {
            pair,
            range,
            search,
        } => {
            let (x, y) = load_pair(pair, table)?;
            let report = degree_set(&x, &y, *range, &search.params())?;
            let status = if report.exact { 0 } else { UNDECIDED };
            if cli.json {
                print_json(
                    out,
                    &DegreesReport {
                        x: x.to_doc(),
                        y: y.to_doc(),
                        report,
                    },
                )?;
                return Ok(status);
            }
            writeln!(out, "X: {x}")?;
            writeln!(out, "Y: {y}")?;
            for e in &report.entries {
                writeln!(out, "{:>6}  {}", e.d, e.verdict)?;
            }
            let members: Vec<String> = report.members().iter().map(i64::to_string).collect();
            writeln!(out, "members: {}", members.join(", "))?;
            if !report.exact {
                writeln!(out, "undecided: {:?}", report.undecided())?;
            }
            match &report.progression {
                Some(ap) => writeln!(out, "CONJECTURE (checked on [-{range}, {range}]): {ap}")?,
                None if report.exact => writeln!(out, "no progression pattern")?,
                None => {}
            }
            Ok(status)
        }
        Command::Equiv { pair, search } => {
            let (x, y) = load_pair(pair, table)?;
            let witness = is_equivalent(&x, &y, &search.params())?;
            if cli.json {
                print_json(
                    out,
                    &EquivReport {
                        x: x.to_doc(),
                        y: y.to_doc(),
                        equivalent: witness.is_some(),
                        witness,
                    },
                )?;
            } else {
                match witness {
                    Some(w) => writeln!(out, "equivalent: yes\n{w}")?,
                    None => writeln!(out, "equivalent: no")?,
                }
            }
            Ok(0)
        }
        Command::Classify { n, rank, search } => {
            let t = load_table(table, *n)?;
            let classes = classify(Arc::clone(&t), *rank, &search.params())?;
            if cli.json {
                let classes = classes
                    .iter()
                    .map(|c| ClassDoc {
                        representative: c.representative.to_doc(),
                        size: c.size(),
                        members: c.members.iter().map(ComplexSpec::to_doc).collect(),
                    })
                    .collect();
                print_json(
                    out,
                    &ClassifyReport {
                        n: t.n(),
                        rank: *rank,
                        classes,
                    },
                )?;
                return Ok(0);
            }
            writeln!(out, "{} classes", classes.len())?;
            for (i, c) in classes.iter().enumerate() {
                writeln!(
                    out,
                    "class {} (size {}): {}",
                    i + 1,
                    c.size(),
                    c.representative
                )?;
                for m in &c.members {
                    writeln!(out, "    {m}")?;
                }
            }
            Ok(0)
        }
        Command::Tables { n } => {
            let tables: Vec<GroupTable> = match (table, n) {
                (Some(_), _) => vec![(*load_table(table, *n)?).clone()],
                (None, Some(n)) => vec![GroupTable::builtin(*n)?],
                (None, None) => (4..=7).map(GroupTable::builtin).collect::<Result<_, _>>()?,
            };
            if cli.json {
                let docs: Vec<TableDoc> = tables.iter().map(GroupTable::to_doc).collect();
                print_json(out, &docs)?;
            } else {
                for t in &tables {
                    print_table(out, t)?;
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    let result = match cli.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| run(&cli, &mut out))),
        None => run(&cli, &mut out),
    };
    let mut stdout = io::stdout().lock();
    if let Err(e) = stdout
        .write_all(out.as_bytes())
        .and_then(|()| stdout.flush())
    {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            let undecided = matches!(
                e.downcast_ref::<SolverError>(),
                Some(SolverError::Undecided(_))
            );
            ExitCode::from(if undecided { UNDECIDED } else { 1 })
        }
    }
}
