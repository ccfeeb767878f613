//! `volcur` command-line tool.
//!
//! Exit statuses: `0` success, `1` an identity or bound was violated,
//! `2` invalid arguments or degenerate input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use volcur::cur::{cur_approximation, error_decomposition, optimal_error_sq, partition};
use volcur::generate::{gaussian, low_rank_plus_noise};
use volcur::io::read_matrix_file;
use volcur::suite::{run_identity_suite, Identity, SuiteReport};
use volcur::volume_sampling::{
    expected_errors_exact, expected_errors_mc, BoundReport, EstimationMode, FactoredSampler, CSV_COLUMNS,
};
use volcur::{Error, IndexSet, Matrix};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

const BOUNDS_HELP: &str = "\
Output columns (CSV header, JSON keys and table headings):
  m, n                  shape of the input matrix
  k, r                  column and row subset sizes
  estimation_mode       exact | monte_carlo
  samples, seed         Monte-Carlo draw count and seed (empty for exact)
  b_err_expected        E ||(I - A A+) B||_F^2 over volume-sampled (I, J)
  d_err_expected        E ||C A+ B - D||_F^2
  total_expected        E ||CUR - M||_F^2
  b_std_error, d_std_error, total_std_error
                        Monte-Carlo standard errors (empty for exact)
  thm2_rhs              (k+1)(r-k)/(m-k) * compound_ratio, equal to b_err_expected
  thm3_rhs              (k+1)^2 (m-r)/(m-k) * compound_ratio, bounds d_err_expected
  thm4_rhs              interpolation_factor * compound_ratio, bounds total_expected
  sv_bound              interpolation_factor * e_{k+1}(s^2)/e_k(s^2), r < min(m, n) only
  tail_bound            interpolation_factor * sum_{i>k} s_i^2, r < min(m, n) only
  compound_ratio        ||C_{k+1}(M)||_F^2 / ||C_k(M)||_F^2
  interpolation_factor  ((m-r)(k+1)^2 + (r-k)(k+1)) / (m-k)

A row is a violation (exit 1) when a measured expectation exceeds its bound,
beyond 1e-10 * ||M||_F^2 in exact mode and beyond 4 standard errors in
Monte-Carlo mode.";

#[derive(Parser, Debug)]
#[command(
    name = "volcur",
    version,
    about = "CUR approximation under volume sampling: identity checks, error bounds and sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the determinant identities and local bounds on seeded random instances.
    Identities(IdentitiesArgs),
    /// Expected CUR errors under volume sampling against their closed-form bounds.
    #[command(after_long_help = BOUNDS_HELP)]
    Bounds(BoundsArgs),
    /// Error of the CUR approximation for explicit row and column sets.
    Cur(CurArgs),
    /// Draw (I, J) pairs from the volume-sampling distribution.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force the named identity to fail (negative control).
    #[arg(long, hide = true)]
    corrupt: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Gaussian,
    LowRankPlusNoise,
    /// `m × n` matrix with ones on the diagonal.
    Identity,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "gen"])))]
struct MatrixSource {
    /// Matrix CSV file: one row per line, comma-separated, no header.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generate the matrix instead of reading it.
    #[arg(long, value_enum)]
    gen: Option<GenKind>,
    #[arg(long, requires = "gen")]
    m: Option<usize>,
    #[arg(long, requires = "gen")]
    n: Option<usize>,
    /// Factor rank for low_rank_plus_noise.
    #[arg(long, requires = "gen")]
    rank: Option<usize>,
    /// Noise standard deviation for low_rank_plus_noise.
    #[arg(long, requires = "gen", default_value_t = 0.0)]
    noise: f64,
    /// Seed of the ChaCha8 stream the generator draws from.
    #[arg(long, requires = "gen", default_value_t = 0)]
    gen_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long)]
    k: usize,
    /// Single row-subset size; shorthand for --r-min R --r-max R.
    #[arg(long, conflicts_with_all = ["r_min", "r_max"])]
    r: Option<usize>,
    /// Smallest r reported [default: k].
    #[arg(long)]
    r_min: Option<usize>,
    /// Largest r reported [default: m].
    #[arg(long)]
    r_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Monte-Carlo draws per row.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CurArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Row set I, e.g. "0,2".
    #[arg(long, allow_hyphen_values = true)]
    rows: String,
    /// Column set J, e.g. "1,3".
    #[arg(long, allow_hyphen_values = true)]
    cols: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r: usize,
    /// Number of pairs to draw.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure that ends a command with a nonzero status.
struct Exit {
    code: u8,
    message: String,
}

impl From<Error> for Exit {
    fn from(e: Error) -> Exit {
        let message = match e {
            Error::RankDeficient { sigma_min, sigma_max } => {
                format!("A = M[I,J] is rank deficient: sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e}")
            }
            other => other.to_string(),
        };
        Exit {
            code: EXIT_INVALID,
            message,
        }
    }
}

fn invalid(message: impl Into<String>) -> Exit {
    Exit {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

/// Output of a command: text for `--out` or stdout, and the exit status.
struct Output {
    text: String,
    code: u8,
    notes: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return EXIT_INVALID;
            }
            let _ = write!(stdout, "{text}");
            return EXIT_OK;
        }
    };
    let out_path = match &cli.command {
        Command::Identities(a) => a.out.clone(),
        Command::Bounds(a) => a.out.clone(),
        Command::Cur(a) => a.out.clone(),
        Command::Sample(a) => a.out.clone(),
    };
    let result = match cli.command {
        Command::Identities(a) => cmd_identities(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Cur(a) => cmd_cur(&a),
        Command::Sample(a) => cmd_sample(&a),
    };
    match result {
        Ok(output) => {
            for note in &output.notes {
                let _ = writeln!(stderr, "{note}");
            }
            let written = match out_path {
                Some(path) => {
                    std::fs::write(&path, &output.text).map_err(|e| format!("cannot write {}: {e}", path.display()))
                }
                None => stdout.write_all(output.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(message) = written {
                let _ = writeln!(stderr, "error: {message}");
                return EXIT_INVALID;
            }
            output.code
        }
        Err(exit) => {
            let _ = writeln!(stderr, "error: {}", exit.message);
            exit.code
        }
    }
}

fn load_matrix(src: &MatrixSource) -> Result<Matrix, Exit> {
    if let Some(path) = &src.input {
        return read_matrix_file(path).map_err(|e| invalid(format!("{}: {e}", path.display())));
    }
    let kind = src.gen.expect("clap enforces a source");
    let m = src.m.ok_or_else(|| invalid("--gen needs --m"))?;
    let n = src.n.ok_or_else(|| invalid("--gen needs --n"))?;
    if m == 0 || n == 0 {
        return Err(invalid("--m and --n must be positive"));
    }
    Ok(match kind {
        GenKind::Gaussian => gaussian(m, n, src.gen_seed),
        GenKind::Identity => Matrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 }),
        GenKind::LowRankPlusNoise => {
            let rank = src.rank.ok_or_else(|| invalid("low_rank_plus_noise needs --rank"))?;
            if !(src.noise.is_finite() && src.noise >= 0.0) {
                return Err(invalid("--noise must be finite and nonnegative"));
            }
            low_rank_plus_noise(m, n, rank, src.noise, src.gen_seed)
        }
    })
}

/// Renders rows of named values. `Csv` has a header row, `Json` is an
/// array of objects, `Table` is aligned.
fn render(columns: &[&str], rows: &[Vec<String>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = columns.join(",");
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> = columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), json_scalar(v)))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&Value::Array(objects)).expect("plain values serialize");
            out.push('\n');
            out
        }
        Format::Table => {
            let mut widths: Vec<usize> = columns.iter().map(|c| c.len()).collect();
            for row in rows {
                for (w, v) in widths.iter_mut().zip(row) {
                    *w = (*w).max(v.len());
                }
            }
            let line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                let mut s = padded.join("  ").trim_end().to_string();
                s.push('\n');
                s
            };
            let mut out = line(columns.to_vec());
            for row in rows {
                out.push_str(&line(row.iter().map(String::as_str).collect()));
            }
            out
        }
    }
}

fn json_scalar(v: &str) -> Value {
    if v.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = v.parse::<u64>() {
        return json!(i);
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => json!(x),
        _ => json!(v),
    }
}

fn cmd_identities(a: &IdentitiesArgs) -> Result<Output, Exit> {
    let corrupt = match &a.corrupt {
        Some(name) => Some(Identity::from_name(name).ok_or_else(|| {
            let names: Vec<&str> = Identity::ALL.iter().map(|i| i.name()).collect();
            invalid(format!(
                "unknown identity {name:?}; expected one of {}",
                names.join(", ")
            ))
        })?),
        None => None,
    };
    let report = run_identity_suite(a.trials, a.seed, corrupt);
    let mut notes = Vec::new();
    if a.trials == 0 {
        notes.push("warning: 0 trials requested, nothing was checked".to_string());
    }
    let text = render_suite(&report, a.format);
    let code = match &report.first_failure {
        None => EXIT_OK,
        Some(f) => {
            let detail = f.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
            notes.push(format!(
                "FAIL: {} at trial {} (instance seed {}): residual {:e} > {:e}{detail}",
                f.identity.name(),
                f.trial,
                f.instance_seed,
                f.residual,
                f.identity.tolerance()
            ));
            EXIT_VIOLATION
        }
    };
    Ok(Output { text, code, notes })
}

fn render_suite(report: &SuiteReport, format: Format) -> String {
    let columns = ["identity", "checks", "max_residual", "tolerance", "status"];
    let rows: Vec<Vec<String>> = report
        .stats
        .iter()
        .map(|s| {
            let ok = s.max_residual <= s.identity.tolerance();
            vec![
                s.identity.name().to_string(),
                s.checks.to_string(),
                format!("{:e}", s.max_residual),
                format!("{:e}", s.identity.tolerance()),
                if ok { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    render(&columns, &rows, format)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Output, Exit> {
    let m = load_matrix(&a.source)?;
    if a.mode == Mode::Mc && a.samples == 0 {
        return Err(invalid("--mode mc needs --samples >= 1"));
    }
    let (r_min, r_max) = match a.r {
        Some(r) => (r, r),
        None => (a.r_min.unwrap_or(a.k), a.r_max.unwrap_or(m.rows())),
    };
    if r_min > r_max {
        return Err(invalid(format!("empty r range {r_min}..={r_max}")));
    }
    let mut reports = Vec::new();
    for r in r_min..=r_max {
        let rep = match a.mode {
            Mode::Exact => expected_errors_exact(&m, r, a.k)?,
            Mode::Mc => expected_errors_mc(&m, r, a.k, a.samples, a.seed)?,
        };
        reports.push(rep);
    }
    let scale = m.frobenius_sq();
    let mut notes = Vec::new();
    for rep in &reports {
        notes.extend(violations(rep, scale));
    }
    let code = if notes.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    let text = match a.format {
        Format::Csv => BoundReport::write_csv(&reports),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = reports.iter().map(BoundReport::fields).collect();
            render(&CSV_COLUMNS, &rows, Format::Table)
        }
    };
    Ok(Output { text, code, notes })
}

fn violations(rep: &BoundReport, scale: f64) -> Vec<String> {
    let slack = 1e-10 * scale;
    let (b_se, d_se, t_se) = match rep.estimation_mode {
        EstimationMode::MonteCarlo {
            b_std_error,
            d_std_error,
            total_std_error,
            ..
        } => (4.0 * b_std_error, 4.0 * d_std_error, 4.0 * total_std_error),
        _ => (0.0, 0.0, 0.0),
    };
    let mut out = Vec::new();
    let mut check = |name: &str, measured: Option<f64>, bound: f64, allowance: f64| {
        if let Some(v) = measured {
            if v > bound + slack + allowance {
                out.push(format!("VIOLATION r={}: {name} = {v} exceeds {bound}", rep.r));
            }
        }
    };
    check(
        "b_err_expected",
        rep.b_err_expected,
        rep.thm2_rhs,
        b_se + 1e-7 * rep.thm2_rhs,
    );
    check("d_err_expected", rep.d_err_expected, rep.thm3_rhs, d_se);
    check("total_expected", rep.total_expected, rep.thm4_rhs, t_se);
    out
}

fn parse_set(text: &str, universe: usize, flag: &str) -> Result<IndexSet, Exit> {
    IndexSet::parse(text, universe).map_err(|e| invalid(format!("{flag}: {e}")))
}

fn cmd_cur(a: &CurArgs) -> Result<Output, Exit> {
    let m = load_matrix(&a.source)?;
    let i = parse_set(&a.rows, m.rows(), "--rows")?;
    let j = parse_set(&a.cols, m.cols(), "--cols")?;
    let components = error_decomposition(&partition(&m, &i, &j)?)?;
    let (_, approx) = cur_approximation(&m, &i, &j)?;
    let total = approx.sub(&m).frobenius_sq();
    let optimal = optimal_error_sq(&m, &i, &j)?;
    let columns = ["rows", "cols", "total_err2", "b_err", "d_err", "optimal_err2"];
    let row = vec![
        i.to_string(),
        j.to_string(),
        total.to_string(),
        components.b_err.to_string(),
        components.d_err.to_string(),
        optimal.to_string(),
    ];
    let text = match a.format {
        // index sets contain commas, so quote them in CSV
        Format::Csv => format!(
            "{}\n\"{}\",\"{}\",{}\n",
            columns.join(","),
            row[0],
            row[1],
            row[2..].join(",")
        ),
        Format::Json => {
            let value = json!({
                "rows": i.indices(),
                "cols": j.indices(),
                "total_err2": total,
                "b_err": components.b_err,
                "d_err": components.d_err,
                "optimal_err2": optimal,
            });
            let mut s = serde_json::to_string_pretty(&value).expect("plain values serialize");
            s.push('\n');
            s
        }
        Format::Table => columns
            .iter()
            .zip(&row)
            .map(|(c, v)| format!("{c:<12}  {v}\n"))
            .collect(),
    };
    Ok(Output {
        text,
        code: EXIT_OK,
        notes: Vec::new(),
    })
}

fn cmd_sample(a: &SampleArgs) -> Result<Output, Exit> {
    let m = load_matrix(&a.source)?;
    let mut sampler = FactoredSampler::new(&m, a.r, a.k)?;
    let mut text = String::new();
    for (i, j) in sampler.sample(a.seed, a.samples) {
        let (_, approx) = cur_approximation(&m, &i, &j)?;
        let err2 = approx.sub(&m).frobenius_sq();
        text.push_str(&format!("I={i} J={j} err2={err2}\n"));
    }
    Ok(Output {
        text,
        code: EXIT_OK,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["volcur"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn json_scalars() {
        assert_eq!(json_scalar(""), Value::Null);
        assert_eq!(json_scalar("3"), json!(3));
        assert_eq!(json_scalar("2.5"), json!(2.5));
        assert_eq!(json_scalar("pass"), json!("pass"));
    }

    #[test]
    fn table_is_aligned() {
        let t = render(&["a", "bb"], &[vec!["100".into(), "x".into()]], Format::Table);
        assert_eq!(t, "a    bb\n100  x\n");
    }

    #[test]
    fn missing_source_is_usage_error() {
        let (code, _, err) = run_capture(&["bounds", "--k", "1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("--input"));
    }

    #[test]
    fn both_sources_rejected() {
        let (code, _, _) = run_capture(&[
            "cur", "--input", "x.csv", "--gen", "gaussian", "--rows", "0", "--cols", "0",
        ]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["bounds", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("interpolation_factor"));
    }

    #[test]
    fn mc_needs_samples() {
        let (code, _, err) = run_capture(&[
            "bounds",
            "--gen",
            "identity",
            "--m",
            "3",
            "--n",
            "3",
            "--k",
            "1",
            "--mode",
            "mc",
            "--samples",
            "0",
        ]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("samples"));
    }
}
