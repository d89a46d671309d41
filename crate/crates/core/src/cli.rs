//! `wmlab` command-line front end.
//!
//! [`dispatch`] parses an argument vector, runs one subcommand and writes
//! the report to `out` and diagnostics to `err`. Exit codes: 0 on success,
//! 2 on usage or parameter errors, 1 when a verification or protocol check
//! fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::designs::{
    identity, paley_one, paley_two, parse_matrix, serialize_matrix, sylvester, tensor,
    verify_weighing, w43_power, DesignError, TernaryMatrix,
};
use crate::field::{FieldError, FieldSpec};
use crate::protocols::{
    bv_recover, classical_bounds, corollary_family, matrix_family, optimal_tree, sls_bounds,
    sls_classical, sls_family, table_rows, wm_recover, ProtocolError, RunMode, RunReport,
    SlsQuantumSolver, ASYMPTOTIC_ROWS,
};
use crate::qsim::QsimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Full,
    Sample,
}

#[derive(Debug, Parser)]
#[command(
    name = "wmlab",
    version,
    about = "Weighing-matrix and shifted-Legendre query experiments"
)]
pub struct Cli {
    /// Seed for sampled measurements.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    pub p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct HiddenArgs {
    /// Hidden parameter, by rank.
    #[arg(long, conflicts_with = "all_s", required_unless_present = "all_s")]
    pub s: Option<String>,
    /// Run every hidden parameter.
    #[arg(long)]
    pub all_s: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite field parameters.
    Field {
        #[command(subcommand)]
        command: FieldCommand,
    },
    /// Quadratic character table.
    Chi {
        #[command(flatten)]
        field: FieldArgs,
        /// Single element by rank.
        #[arg(long)]
        x: Option<usize>,
    },
    /// Construct or verify weighing matrices.
    Matrix {
        #[command(subcommand)]
        command: MatrixCommand,
    },
    /// Run a query protocol.
    Run {
        #[command(subcommand)]
        command: RunCommand,
    },
    /// Classical lower bounds and quantum budgets.
    Bounds {
        #[arg(long, required_unless_present = "q")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        /// Shifted-Legendre bounds for a field of order q.
        #[arg(long, conflicts_with_all = ["n", "k"])]
        q: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Tensor-power family of a W(n, k).
    Family {
        #[arg(long, required_unless_present = "matrix")]
        n: Option<u64>,
        #[arg(long, required_unless_present = "matrix")]
        k: Option<u64>,
        /// Base matrix spec such as `w43:1`; n and k are read from it.
        #[arg(long, conflicts_with_all = ["n", "k"])]
        matrix: Option<String>,
        #[arg(long, default_value_t = 3)]
        t_max: u32,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Optimal classical decision tree for a small family.
    Tree {
        /// `sls:Q` or a matrix spec such as `identity:4`.
        #[arg(long)]
        family: String,
    },
    /// Bounds table for the built-in families.
    Table {
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum FieldCommand {
    Info {
        #[command(flatten)]
        field: FieldArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum MatrixCommand {
    /// W(2^t, 2^t).
    Sylvester {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hadamard matrix of order q + 1, q = 3 mod 4.
    Paley1 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hadamard matrix of order 2(q + 1), q = 1 mod 4.
    Paley2 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// W(4^t, 3^t).
    W43 {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// W(n, 1).
    Identity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tensor product of two matrix specs.
    Tensor {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact check of M M^T = k I for a matrix file.
    Verify {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RunCommand {
    /// Recover the hidden row of a weighing matrix.
    Wm {
        /// Matrix spec such as `sylvester:3`.
        #[arg(long, required_unless_present = "file", conflicts_with = "file")]
        matrix: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        hidden: HiddenArgs,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
    },
    /// Bernstein-Vazirani; `--s` accepts decimal or `0b` binary.
    Bv {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        hidden: HiddenArgs,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
    },
    /// Two-query quantum shifted-Legendre solver.
    SlsQuantum {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        hidden: HiddenArgs,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
    },
    /// Adaptive classical shifted-Legendre solver.
    SlsClassical {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        hidden: HiddenArgs,
    },
}

#[derive(Debug)]
enum CliError {
    /// Bad input: exit 2.
    Usage(String),
    /// A check failed: exit 1.
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::NotWeighing { .. }
            | DesignError::WeightMismatch { .. }
            | DesignError::Unverified => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Design(d) => d.into(),
            ProtocolError::Qsim(QsimError::AmplificationMismatch(_))
            | ProtocolError::Failed(_)
            | ProtocolError::SlowShrink { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let fmt = cli.format;
    match &cli.command {
        Command::Field {
            command: FieldCommand::Info { field },
        } => field_info(field, fmt, out),
        Command::Chi { field, x } => chi_table(field, *x, fmt, out),
        Command::Matrix { command } => matrix(command, fmt, out),
        Command::Run { command } => run_protocol(command, cli.seed, fmt, out),
        Command::Bounds { n, k, q, eps } => bounds(*n, *k, *q, *eps, fmt, out),
        Command::Family {
            n,
            k,
            matrix,
            t_max,
            eps,
        } => family(*n, *k, matrix.as_deref(), *t_max, *eps, fmt, out),
        Command::Tree { family } => tree(family, fmt, out),
        Command::Table { eps } => table(*eps, fmt, out),
    }
}

fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv(
    out: &mut dyn Write,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult {
    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn field_of(args: &FieldArgs) -> Result<FieldSpec, CliError> {
    Ok(FieldSpec::new(args.p, args.k)?)
}

fn poly(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && j > 0 {
            String::new()
        } else {
            c.to_string()
        };
        terms.push(match j {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{j}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn field_info(args: &FieldArgs, fmt: Format, out: &mut dyn Write) -> CliResult {
    let f = field_of(args)?;
    let g = f.generator();
    let g_rank = f.rank(g);
    match fmt {
        Format::Text => {
            writeln!(out, "F_{} = F_{}[x]/({})", f.q(), f.p(), poly(f.modulus()))?;
            writeln!(out, "p = {}, k = {}, q = {}", f.p(), f.k(), f.q())?;
            writeln!(out, "generator = {g} (rank {g_rank})")?;
        }
        Format::Json => write_json(
            out,
            &json!({
                "p": f.p(),
                "k": f.k(),
                "q": f.q(),
                "modulus": f.modulus(),
                "generator": g.coeffs(),
                "generator_rank": g_rank,
            }),
        )?,
        Format::Csv => write_csv(
            out,
            &["p", "k", "q", "modulus", "generator_rank"],
            [vec![
                f.p().to_string(),
                f.k().to_string(),
                f.q().to_string(),
                poly(f.modulus()),
                g_rank.to_string(),
            ]],
        )?,
    }
    Ok(())
}

fn chi_table(args: &FieldArgs, x: Option<usize>, fmt: Format, out: &mut dyn Write) -> CliResult {
    let f = field_of(args)?;
    let ranks: Vec<usize> = match x {
        Some(r) => {
            f.from_rank(r)?;
            vec![r]
        }
        None => (0..f.q()).collect(),
    };
    let rows: Vec<(usize, String, i8)> = ranks
        .into_iter()
        .map(|r| {
            let e = f.from_rank(r).expect("rank checked");
            (r, e.to_string(), f.legendre(&e))
        })
        .collect();
    match fmt {
        Format::Text => {
            for (r, e, c) in &rows {
                writeln!(out, "chi({e}) = {c:+}  [rank {r}]")?;
            }
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(r, e, c)| json!({"rank": r, "element": e, "chi": c}))
                .collect();
            write_json(out, &v)?;
        }
        Format::Csv => write_csv(
            out,
            &["rank", "element", "chi"],
            rows.into_iter()
                .map(|(r, e, c)| vec![r.to_string(), e, c.to_string()]),
        )?,
    }
    Ok(())
}

/// Builds a certified matrix from `name:param`, or `file:path`.
pub fn matrix_from_spec(spec: &str) -> Result<TernaryMatrix, String> {
    let (name, arg) = spec
        .split_once(':')
        .ok_or_else(|| format!("matrix spec {spec:?} is not of the form name:param"))?;
    if name == "file" {
        return load_matrix(Path::new(arg)).map_err(|e| e.message().to_string());
    }
    let num: u64 = arg
        .parse()
        .map_err(|_| format!("bad parameter {arg:?} in matrix spec {spec:?}"))?;
    let small = || u32::try_from(num).map_err(|_| format!("parameter {num} too large"));
    let m = match name {
        "sylvester" => sylvester(small()?),
        "paley1" => paley_one(num),
        "paley2" => paley_two(num),
        "w43" => w43_power(small()?),
        "identity" => identity(num as usize),
        _ => return Err(format!("unknown matrix family {name:?}")),
    };
    m.map_err(|e| e.to_string())
}

fn spec_matrix(spec: &str) -> Result<TernaryMatrix, CliError> {
    matrix_from_spec(spec).map_err(CliError::Usage)
}

/// Reads a matrix file, certifying it when the header carries no weight.
fn load_matrix(path: &Path) -> Result<TernaryMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))?;
    let m = parse_matrix(&text)?;
    if m.claimed_weight().is_some() {
        Ok(m)
    } else {
        Ok(m.certified()?)
    }
}

fn emit_matrix(
    m: &TernaryMatrix,
    dest: Option<&Path>,
    fmt: Format,
    out: &mut dyn Write,
) -> CliResult {
    if let Some(path) = dest {
        std::fs::write(path, serialize_matrix(m))?;
        writeln!(
            out,
            "wrote W({},{}) to {}",
            m.n(),
            m.claimed_weight().map_or(-1, |k| k as i64),
            path.display()
        )?;
        return Ok(());
    }
    match fmt {
        Format::Text => write!(out, "{}", serialize_matrix(m))?,
        Format::Json => {
            let rows: Vec<&[i8]> = m.rows().collect();
            write_json(
                out,
                &json!({"n": m.n(), "k": m.claimed_weight(), "rows": rows}),
            )?
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut *out);
            for row in m.rows() {
                w.write_record(row.iter().map(i8::to_string))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn matrix(cmd: &MatrixCommand, fmt: Format, out: &mut dyn Write) -> CliResult {
    let (m, dest) = match cmd {
        MatrixCommand::Sylvester { t, out } => (sylvester(*t)?, out),
        MatrixCommand::Paley1 { q, out } => (paley_one(*q)?, out),
        MatrixCommand::Paley2 { q, out } => (paley_two(*q)?, out),
        MatrixCommand::W43 { t, out } => (w43_power(*t)?, out),
        MatrixCommand::Identity { n, out } => (identity(*n)?, out),
        MatrixCommand::Tensor { a, b, out } => (tensor(&spec_matrix(a)?, &spec_matrix(b)?)?, out),
        MatrixCommand::Verify { file } => return verify_file(file, fmt, out),
    };
    emit_matrix(&m, dest.as_deref(), fmt, out)
}

fn verify_file(path: &Path, fmt: Format, out: &mut dyn Write) -> CliResult {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))?;
    let m = parse_matrix(&text)?;
    let cert = verify_weighing(&m)?;
    match fmt {
        Format::Text => writeln!(out, "W({},{}) verified", cert.n, cert.k)?,
        Format::Json => write_json(out, &cert)?,
        Format::Csv => {
            let class = serde_json::to_value(cert.class)?;
            write_csv(
                out,
                &["n", "k", "class"],
                [vec![
                    cert.n.to_string(),
                    cert.k.to_string(),
                    class.as_str().unwrap_or_default().to_string(),
                ]],
            )?
        }
    }
    Ok(())
}

fn parse_hidden(text: &str) -> Result<usize, CliError> {
    let parsed = match text.strip_prefix("0b") {
        Some(bits) => usize::from_str_radix(bits, 2),
        None => text.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("bad hidden parameter {text:?}")))
}

fn hidden_list(h: &HiddenArgs, range: usize) -> Result<Vec<usize>, CliError> {
    match &h.s {
        Some(s) => Ok(vec![parse_hidden(s)?]),
        None => Ok((0..range).collect()),
    }
}

fn mode_for(mode: Mode, seed: u64, s: usize, all: bool) -> RunMode {
    match mode {
        Mode::Full => RunMode::Full,
        Mode::Sample if all => RunMode::Sample(seed.wrapping_add(s as u64)),
        Mode::Sample => RunMode::Sample(seed),
    }
}

fn run_protocol(cmd: &RunCommand, seed: u64, fmt: Format, out: &mut dyn Write) -> CliResult {
    let mut notes: Vec<String> = Vec::new();
    let reports: Vec<RunReport> = match cmd {
        RunCommand::Wm {
            matrix,
            file,
            hidden,
            mode,
        } => {
            let m = match (matrix, file) {
                (Some(spec), _) => spec_matrix(spec)?,
                (None, Some(path)) => load_matrix(path)?,
                (None, None) => return Err(CliError::Usage("need --matrix or --file".into())),
            };
            let list = hidden_list(hidden, m.n())?;
            list.par_iter()
                .map(|&s| wm_recover(&m, s, mode_for(*mode, seed, s, hidden.all_s)))
                .collect::<Result<_, _>>()?
        }
        RunCommand::Bv { n, hidden, mode } => {
            let range = 1usize.checked_shl(*n).unwrap_or(0);
            let list = hidden_list(hidden, range)?;
            list.par_iter()
                .map(|&s| bv_recover(*n, s, mode_for(*mode, seed, s, hidden.all_s)))
                .collect::<Result<_, _>>()?
        }
        RunCommand::SlsQuantum {
            field,
            hidden,
            mode,
        } => {
            let f = field_of(field)?;
            let solver = SlsQuantumSolver::new(&f)?;
            let list = hidden_list(hidden, f.q())?;
            let runs = list
                .par_iter()
                .map(|&s| solver.run(s, mode_for(*mode, seed, s, hidden.all_s)))
                .collect::<Result<Vec<_>, _>>()?;
            for run in &runs {
                for b in &run.branches {
                    let mut line = format!(
                        "  s={} branch={} p={:.12} recovered={} success={:.12} queries={}",
                        run.report.hidden_s,
                        b.label,
                        b.probability,
                        b.recovered_s,
                        b.success_probability,
                        b.queries_used
                    );
                    if let Some(fp) = b.filler_probability {
                        let _ = write!(line, " filler={fp:.3e}");
                    }
                    notes.push(line);
                }
            }
            runs.into_iter().map(|r| r.report).collect()
        }
        RunCommand::SlsClassical { field, hidden } => {
            let f = field_of(field)?;
            let list = hidden_list(hidden, f.q())?;
            let runs = list
                .par_iter()
                .map(|&s| sls_classical(&f, s))
                .collect::<Result<Vec<_>, _>>()?;
            for run in &runs {
                let sizes: Vec<String> = run
                    .rounds
                    .iter()
                    .map(|r| r.candidates.to_string())
                    .collect();
                notes.push(format!(
                    "  s={} rounds={} |S|: {} checks={}",
                    run.report.hidden_s,
                    run.rounds.len(),
                    sizes.join(" -> "),
                    run.checks.len()
                ));
            }
            runs.into_iter().map(|r| r.report).collect()
        }
    };

    match fmt {
        Format::Text => {
            for r in &reports {
                writeln!(
                    out,
                    "{} hidden_s={} recovered_s={} queries={}/{} success={:.12} branch={}",
                    r.protocol,
                    r.hidden_s,
                    r.recovered_s,
                    r.queries_used,
                    r.query_budget,
                    r.success_probability,
                    r.branch_taken
                )?;
            }
            for line in &notes {
                writeln!(out, "{line}")?;
            }
        }
        Format::Json if reports.len() == 1 => write_json(out, &reports[0])?,
        Format::Json => write_json(out, &reports)?,
        Format::Csv => write_csv(
            out,
            &RunReport::CSV_HEADER,
            reports.iter().map(RunReport::csv_record),
        )?,
    }

    let bad: Vec<usize> = reports
        .iter()
        .filter(|r| r.recovered_s != r.hidden_s || r.queries_used > r.query_budget)
        .map(|r| r.hidden_s)
        .collect();
    if !bad.is_empty() {
        return Err(CliError::Failure(format!(
            "runs failed for hidden parameters {bad:?}"
        )));
    }
    Ok(())
}

fn bounds(
    n: Option<usize>,
    k: Option<usize>,
    q: Option<usize>,
    eps: f64,
    fmt: Format,
    out: &mut dyn Write,
) -> CliResult {
    if let Some(q) = q {
        let b = sls_bounds(q, eps)?;
        match fmt {
            Format::Text => {
                writeln!(out, "shifted Legendre sequence, q = {q}, eps = {eps}")?;
                writeln!(out, "classical lower (stated) : {:.4}", b.stated_lower)?;
                writeln!(out, "classical lower (exact)  : {:.4}", b.proof_lower)?;
                writeln!(out, "minimum depth            : {}", b.min_depth)?;
                writeln!(out, "classical upper          : {}", b.classical_upper)?;
                writeln!(out, "quantum upper            : {}", b.quantum_upper)?;
            }
            Format::Json => write_json(out, &b)?,
            Format::Csv => write_csv(
                out,
                &[
                    "q",
                    "eps",
                    "stated_lower",
                    "proof_lower",
                    "min_depth",
                    "classical_upper",
                    "quantum_upper",
                ],
                [vec![
                    q.to_string(),
                    eps.to_string(),
                    format!("{:.6}", b.stated_lower),
                    format!("{:.6}", b.proof_lower),
                    b.min_depth.to_string(),
                    b.classical_upper.to_string(),
                    b.quantum_upper.to_string(),
                ]],
            )?,
        }
        return Ok(());
    }
    let n = n.ok_or_else(|| CliError::Usage("need --n".into()))?;
    let k = k.ok_or_else(|| CliError::Usage("need --k".into()))?;
    let b = classical_bounds(n, k, eps)?;
    match fmt {
        Format::Text => {
            writeln!(out, "W({n},{k}), eps = {eps}")?;
            writeln!(out, "log3 bound   : {:.4}", b.bound_log3)?;
            writeln!(out, "n/k bound    : {:.4}", b.bound_nk)?;
            writeln!(out, "log2 bound   : {:.4}", b.bound_log2)?;
            writeln!(out, "min depth    : {}", b.min_depth)?;
            writeln!(out, "quantum upper: {}", b.quantum_upper)?;
        }
        Format::Json => write_json(out, &b)?,
        Format::Csv => write_csv(
            out,
            &[
                "n",
                "k",
                "eps",
                "bound_log3",
                "bound_nk",
                "bound_log2",
                "quantum_upper",
                "min_depth",
            ],
            [vec![
                n.to_string(),
                k.to_string(),
                eps.to_string(),
                format!("{:.6}", b.bound_log3),
                format!("{:.6}", b.bound_nk),
                format!("{:.6}", b.bound_log2),
                b.quantum_upper.to_string(),
                b.min_depth.to_string(),
            ]],
        )?,
    }
    Ok(())
}

fn family(
    n: Option<u64>,
    k: Option<u64>,
    spec: Option<&str>,
    t_max: u32,
    eps: f64,
    fmt: Format,
    out: &mut dyn Write,
) -> CliResult {
    let (n, k) = match spec {
        Some(spec) => {
            let m = spec_matrix(spec)?;
            let k = m.claimed_weight().ok_or(DesignError::Unverified)?;
            (m.n() as u64, k as u64)
        }
        None => (
            n.ok_or_else(|| CliError::Usage("need --n".into()))?,
            k.ok_or_else(|| CliError::Usage("need --k".into()))?,
        ),
    };
    let rows = corollary_family(n, k, t_max, eps)?;
    match fmt {
        Format::Text => {
            writeln!(out, "family of W({n},{k}): gamma = {:.4}", rows[0].gamma)?;
            writeln!(
                out,
                "{:>3} {:>6} {:>6} {:>8} {:>14}",
                "t", "N", "K", "quantum", "classical_lb"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>3} {:>6} {:>6} {:>8} {:>14.4}",
                    r.t, r.n, r.k, r.quantum_budget, r.classical_lower
                )?;
            }
        }
        Format::Json => write_json(out, &rows)?,
        Format::Csv => write_csv(
            out,
            &["t", "n", "k", "gamma", "quantum_budget", "classical_lower"],
            rows.iter().map(|r| {
                vec![
                    r.t.to_string(),
                    r.n.to_string(),
                    r.k.to_string(),
                    format!("{:.6}", r.gamma),
                    r.quantum_budget.to_string(),
                    format!("{:.6}", r.classical_lower),
                ]
            }),
        )?,
    }
    Ok(())
}

fn tree(spec: &str, fmt: Format, out: &mut dyn Write) -> CliResult {
    let members = match spec.strip_prefix("sls:") {
        Some(q) => {
            let q: u64 = q
                .parse()
                .map_err(|_| CliError::Usage(format!("bad field order {q:?}")))?;
            sls_family(&FieldSpec::of_order(q)?)
        }
        None => matrix_family(&spec_matrix(spec)?),
    };
    let (t, depth) = optimal_tree(&members)?;
    match fmt {
        Format::Text => {
            writeln!(
                out,
                "family {spec}: {} members, optimal depth {depth}",
                members.len()
            )?;
            write!(out, "{}", t.render())?;
        }
        Format::Json => write_json(
            out,
            &json!({"family": spec, "members": members.len(), "depth": depth, "tree": t}),
        )?,
        Format::Csv => write_csv(
            out,
            &["family", "members", "depth"],
            [vec![
                spec.to_string(),
                members.len().to_string(),
                depth.to_string(),
            ]],
        )?,
    }
    Ok(())
}

fn table(eps: f64, fmt: Format, out: &mut dyn Write) -> CliResult {
    let rows = table_rows(eps)?;
    match fmt {
        Format::Text => {
            writeln!(
                out,
                "{:<10} {:<22} {:<26}",
                "k", "quantum upper", "classical lower"
            )?;
            for (k, qu, cl) in ASYMPTOTIC_ROWS {
                writeln!(out, "{k:<10} {qu:<22} {cl:<26}")?;
            }
            writeln!(out)?;
            writeln!(
                out,
                "{:<22} {:<9} {:>5} {:>5} {:>8} {:>8} {:>8} {:>8} {:>6}",
                "family", "regime", "N", "K", "quantum", "log3", "n/k", "log2", "depth"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<22} {:<9} {:>5} {:>5} {:>8} {:>8.3} {:>8.3} {:>8.3} {:>6}",
                    r.family,
                    r.regime,
                    r.n,
                    r.k,
                    r.quantum_budget,
                    r.bound_log3,
                    r.bound_nk,
                    r.bound_log2,
                    r.classical_min_depth
                )?;
            }
        }
        Format::Json => {
            let asymptotic: Vec<_> = ASYMPTOTIC_ROWS
                .iter()
                .map(|(k, qu, cl)| json!({"k": k, "quantum_upper": qu, "classical_lower": cl}))
                .collect();
            write_json(
                out,
                &json!({"eps": eps, "asymptotic": asymptotic, "concrete": rows}),
            )?
        }
        Format::Csv => write_csv(
            out,
            &[
                "family",
                "regime",
                "n",
                "k",
                "quantum_budget",
                "bound_log3",
                "bound_nk",
                "bound_log2",
                "classical_min_depth",
            ],
            rows.iter().map(|r| {
                vec![
                    r.family.clone(),
                    r.regime.clone(),
                    r.n.to_string(),
                    r.k.to_string(),
                    r.quantum_budget.to_string(),
                    format!("{:.6}", r.bound_log3),
                    format!("{:.6}", r.bound_nk),
                    format!("{:.6}", r.bound_log2),
                    r.classical_min_depth.to_string(),
                ]
            }),
        )?,
    }
    Ok(())
}
