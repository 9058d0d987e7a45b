//! `fixedj` command line: `sigma`, `phi`, `tau`, `rt` and `table`.
//!
//! Exit codes: 0 success, 2 dimension defect, 3 non-integral result,
//! 64 usage error, 65 unsupported ambient for tau, 74 cache I/O or format.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fixedj::constraints::{pointed_dimension, sigma_dimension_defect};
use fixedj::{tau_rescale, ConstraintMultiset, Engine, Error, JClass, Stats, TauResult};
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIMENSION: u8 = 2;
pub const EXIT_NON_INTEGRAL: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_UNSUPPORTED: u8 = 65;
pub const EXIT_CACHE: u8 = 74;

#[derive(Debug, Parser)]
#[command(name = "fixedj", version, about = "Exact genus-0 and fixed-j genus-1 counts in P^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Genus-0 count sigma_d(constraints)
    Sigma(Common),
    /// c1(L*)^i ev*(H^j) on 1-pointed rational curves
    Phi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: u32,
        #[arg(long = "j-exp")]
        j_exp: u32,
    },
    /// Genus-1 fixed-j count tau_d(constraints)
    Tau {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "generic")]
        j: JArg,
    },
    /// Genus-1 perturbed invariant: sum of sigma_d(H^i1, H^i2, constraints)
    Rt(Common),
    /// One row per degree, one column per j class
    Table {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: String,
        #[arg(long)]
        family: Family,
        /// Number of points for the p3-points-lines family
        #[arg(long, default_value_t = 0)]
        a: u32,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[arg(long, env = "FIXEDJ_CACHE")]
        cache: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d: String,
    #[arg(long)]
    constraints: String,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[arg(long, env = "FIXEDJ_CACHE")]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    /// P^2, 3d - 1 points
    P2Points,
    /// P^3, 4d - 1 lines
    P3Lines,
    /// P^3, `a` points and 4d - 1 - 2a lines
    P3PointsLines,
}

#[derive(Clone, Copy, Debug)]
struct JArg(JClass);

impl std::str::FromStr for JArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<JClass>().map(JArg).map_err(|_| "expected generic, 0 or 1728".into())
    }
}

/// Failure of one invocation: exit code plus message.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension { .. } => EXIT_DIMENSION,
            Error::NonIntegral { .. } => EXIT_NON_INTEGRAL,
            Error::UnsupportedAmbient(_) => EXIT_UNSUPPORTED,
            Error::Cache(_) => EXIT_CACHE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Parse `argv` (program name first), run the query, write the result to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code
        }
    }
}

/// Degree argument: a single value or an inclusive range `a..b`.
fn parse_degrees(text: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::usage(format!("--d expects <int> or <a..b>, got {text:?}"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            Ok((a..=b).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}

fn single_degree(text: &str) -> Result<u32, Failure> {
    match parse_degrees(text)?.as_slice() {
        [d] => Ok(*d),
        _ => Err(Failure::usage("a degree range is only accepted by `table`")),
    }
}

fn open_engine(n: u32, cache: Option<&Path>) -> Result<Engine, Failure> {
    let mut engine = Engine::new(n)?;
    if let Some(path) = cache {
        if path.exists() {
            engine.load_cache(path)?;
        }
    }
    Ok(engine)
}

fn close_engine(engine: &Engine, cache: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = cache {
        engine.save_cache(path)?;
    }
    Ok(())
}

fn stats_json(stats: Stats) -> Value {
    json!({
        "sigma_evals": stats.sigma_evals,
        "phi_evals": stats.phi_evals,
        "cache_hits": stats.cache_hits,
    })
}

fn stats_line(stats: Stats) -> String {
    format!(
        "stats: sigma_evals={} phi_evals={} cache_hits={}",
        stats.sigma_evals, stats.phi_evals, stats.cache_hits
    )
}

/// Query fields in canonical order, as printed in the header.
fn header(command: &str, fields: &[(&str, String)]) -> String {
    let mut line = format!("query: {command}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

fn query_json(command: &str, fields: &[(&str, String)]) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), Value::String(command.into()));
    for (k, v) in fields {
        map.insert((*k).into(), Value::String(v.clone()));
    }
    Value::Object(map)
}

fn emit(
    out: &mut dyn Write,
    format: Format,
    command: &str,
    fields: &[(&str, String)],
    result: &[(&str, String)],
    stats: Stats,
) -> Result<(), Failure> {
    let text = match format {
        Format::Json => {
            let mut r = serde_json::Map::new();
            for (k, v) in result {
                r.insert((*k).into(), Value::String(v.clone()));
            }
            let doc = json!({
                "query": query_json(command, fields),
                "result": Value::Object(r),
                "stats": stats_json(stats),
            });
            format!("{doc}\n")
        }
        Format::Plain => {
            let mut text = header(command, fields);
            text.push('\n');
            for (k, v) in result {
                text.push_str(&format!("{k}: {v}\n"));
            }
            text.push_str(&stats_line(stats));
            text.push('\n');
            text
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}

fn tau_fields(t: &TauResult) -> Vec<(&'static str, String)> {
    vec![
        ("tau", t.value.to_string()),
        ("nj_times_tau", t.n_j_times_tau.to_string()),
        ("n_j", t.j.n_j().to_string()),
        ("formula_path", t.path.label().to_string()),
    ]
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Sigma(c) => {
            let d = single_degree(&c.d)?;
            let constraints = ConstraintMultiset::parse(&c.constraints, c.n)?;
            let mut engine = open_engine(c.n, c.cache.as_deref())?;
            if d == 0 {
                return Err(Error::ZeroDegree.into());
            }
            let defect = sigma_dimension_defect(c.n, d, &constraints);
            if defect != 0 {
                return Err(Error::Dimension { defect }.into());
            }
            let value = engine.sigma(d, &constraints)?;
            close_engine(&engine, c.cache.as_deref())?;
            let fields = base_fields(c.n, d, &constraints);
            emit(out, c.format, "sigma", &fields, &[("value", value.to_string())], engine.stats())
        }
        Command::Phi { common: c, i, j_exp } => {
            let d = single_degree(&c.d)?;
            let constraints = ConstraintMultiset::parse(&c.constraints, c.n)?;
            let mut engine = open_engine(c.n, c.cache.as_deref())?;
            if d == 0 {
                return Err(Error::ZeroDegree.into());
            }
            let defect = (i + j_exp) as i64 - pointed_dimension(c.n, d, &constraints);
            if defect != 0 {
                return Err(Error::Dimension { defect }.into());
            }
            let value = engine.phi(d, i, j_exp, &constraints)?;
            close_engine(&engine, c.cache.as_deref())?;
            let mut fields = base_fields(c.n, d, &constraints);
            fields.push(("i", i.to_string()));
            fields.push(("j_exp", j_exp.to_string()));
            emit(out, c.format, "phi", &fields, &[("value", value.to_string())], engine.stats())
        }
        Command::Tau { common: c, j } => {
            let d = single_degree(&c.d)?;
            let constraints = ConstraintMultiset::parse(&c.constraints, c.n)?;
            let mut engine = open_engine(c.n, c.cache.as_deref())?;
            let tau = engine.tau_general(d, &constraints, j.0)?;
            close_engine(&engine, c.cache.as_deref())?;
            let mut fields = base_fields(c.n, d, &constraints);
            fields.push(("j", j.0.label().to_string()));
            emit(out, c.format, "tau", &fields, &tau_fields(&tau), engine.stats())
        }
        Command::Rt(c) => {
            let d = single_degree(&c.d)?;
            let constraints = ConstraintMultiset::parse(&c.constraints, c.n)?;
            let mut engine = open_engine(c.n, c.cache.as_deref())?;
            let first = *constraints
                .descending()
                .first()
                .ok_or_else(|| Failure::usage("rt needs at least one constraint"))?;
            let value = engine.rt_genus1(d, first, &constraints.without(first))?;
            close_engine(&engine, c.cache.as_deref())?;
            let fields = base_fields(c.n, d, &constraints);
            emit(out, c.format, "rt", &fields, &[("value", value.to_string())], engine.stats())
        }
        Command::Table {
            n,
            d,
            family,
            a,
            format,
            cache,
        } => table(out, n, &d, family, a, format, cache.as_deref()),
    }
}

fn base_fields(n: u32, d: u32, c: &ConstraintMultiset) -> Vec<(&'static str, String)> {
    vec![
        ("n", n.to_string()),
        ("d", d.to_string()),
        ("constraints", c.to_string()),
    ]
}

fn family_constraints(family: Family, n: u32, d: u32, a: u32) -> Result<ConstraintMultiset, Failure> {
    let (want, pairs) = match family {
        Family::P2Points => (2, vec![(2, 3 * d - 1)]),
        Family::P3Lines => (3, vec![(2, 4 * d - 1)]),
        Family::P3PointsLines => {
            let lines = (4 * d - 1)
                .checked_sub(2 * a)
                .ok_or(Error::Dimension {
                    defect: 2 * a as i64 - (4 * d - 1) as i64,
                })?;
            (3, vec![(3, a), (2, lines)])
        }
    };
    if n != want {
        return Err(Failure::usage(format!(
            "this family lives in P^{want}, not P^{n}"
        )));
    }
    Ok(ConstraintMultiset::from_pairs(n, &pairs)?)
}

fn table(
    out: &mut dyn Write,
    n: u32,
    d_text: &str,
    family: Family,
    a: u32,
    format: Format,
    cache: Option<&Path>,
) -> Result<(), Failure> {
    let degrees = parse_degrees(d_text)?;
    if degrees.contains(&0) {
        return Err(Error::ZeroDegree.into());
    }
    let mut engine = open_engine(n, cache)?;
    let mut rows = Vec::new();
    for &d in &degrees {
        let constraints = family_constraints(family, n, d, a)?;
        let generic = engine.tau_general(d, &constraints, JClass::Generic)?;
        let columns = JClass::ALL
            .iter()
            .map(|&j| tau_rescale(&generic, j))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((d, constraints, columns));
    }
    close_engine(&engine, cache)?;

    let text = match format {
        Format::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|(d, c, columns)| {
                    let mut cols = serde_json::Map::new();
                    for t in columns {
                        cols.insert(
                            t.j.label().into(),
                            json!({"tau": t.value.to_string(), "nj_times_tau": t.n_j_times_tau.to_string()}),
                        );
                    }
                    json!({
                        "query": {"command": "tau", "n": n.to_string(), "d": d.to_string(), "constraints": c.to_string()},
                        "formula_path": columns[0].path.label(),
                        "columns": Value::Object(cols),
                    })
                })
                .collect();
            format!("{}\n", Value::Array(records))
        }
        Format::Plain => {
            let name = family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            let mut text = format!("query: table n={n} d={d_text} family={name}\n");
            text.push_str("d\tconstraints\tgeneric\tj=0\tj=1728\tnj_times_tau\n");
            for (d, c, columns) in &rows {
                text.push_str(&format!(
                    "{d}\t{c}\t{}\t{}\t{}\t{}\n",
                    columns[0].value, columns[1].value, columns[2].value, columns[0].n_j_times_tau
                ));
            }
            text.push_str(&stats_line(engine.stats()));
            text.push('\n');
            text
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}
