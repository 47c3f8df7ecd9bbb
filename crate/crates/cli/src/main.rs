use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use octosos::certificate::{self, Certificate, CertificateBody};
use octosos::convexity;
use octosos::dense::{self, DenseForm};
use octosos::linalg::fmt_rational;
use octosos::octonion::MulTable;
use octosos::verify;
use octosos::Error;

/// Exit code for a completed run whose verification failed.
const FAILED: u8 = 1;
/// Exit code for bad usage or unreadable input.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "octosos", version, about = "Certificates and gap computations for octonionic Cauchy-Schwarz quartics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance for floating-point checks.
    #[arg(long, global = true, default_value_t = dense::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check the octonion table and Clifford identities exactly.
    VerifyAlgebra {
        /// Random octonion triples per identity.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Flip the sign of one table entry, given as ROW,COL (fault injection).
        #[arg(long, hide = true, value_parser = parse_pair)]
        corrupt_table: Option<(usize, usize)>,
    },
    /// Decide whether q_k is a sum of squares and emit a verified certificate.
    Certify {
        #[arg(long, conflicts_with = "k_range")]
        k: Option<usize>,
        /// Inclusive range `A..B`.
        #[arg(long, value_parser = parse_range)]
        k_range: Option<(usize, usize)>,
    },
    /// Exact SOS lower bound and gap of cs_k for a range of k.
    GapTable {
        /// Inclusive range `A..B`.
        #[arg(long, value_parser = parse_range, default_value = "2..24")]
        k_range: (usize, usize),
    },
    /// Sphere extrema, SOS bound and gap of a small dense form.
    Dense {
        /// Form file: lines `coefficient e_1 ... e_n`.
        #[arg(required_unless_present_any = ["motzkin", "stable_set"])]
        file: Option<PathBuf>,
        /// Use the built-in Motzkin form.
        #[arg(long, conflicts_with_all = ["file", "stable_set"])]
        motzkin: bool,
        /// Graph file: `n m` then `m` lines `i j` with 0-based vertices.
        #[arg(long, conflicts_with = "file")]
        stable_set: Option<PathBuf>,
    },
    /// Sampled Hessian, midpoint and window checks of q_k.
    Convexity {
        #[arg(long, default_value_t = 17)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad bound {t:?}"));
    let (a, b) = (p(a)?, p(b)?);
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected ROW,COL, got {s:?}"))?;
    let p = |t: &str| match t.trim().parse::<usize>() {
        Ok(v) if v < 8 => Ok(v),
        _ => Err(format!("table index {t:?} not in 0..8")),
    };
    Ok((p(a)?, p(b)?))
}

/// A finished command: its report text and whether verification passed.
struct Outcome {
    body: String,
    passed: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::ParseLine { .. } | Error::InvalidArgument(_) => Self::Usage(e.to_string()),
            other => Self::Runtime(other.to_string()),
        }
    }
}

/// Nine decimals, without a sign on values that round to zero.
fn fixed(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn verify_algebra(g: &Global, samples: usize, corrupt: Option<(usize, usize)>) -> Result<Outcome, Failure> {
    let table = match corrupt {
        Some((r, c)) => MulTable::with_flipped_sign(r, c),
        None => MulTable::standard(),
    };
    let report = verify::verify_algebra_with(&table, samples, g.seed)?;
    let body = match g.format {
        Format::Json => pretty(&json!({ "passed": report.all_passed(), "checks": report.checks })),
        Format::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for c in &report.checks {
                let _ = writeln!(s, "\"{}\",{},\"{}\"", c.name, c.passed, c.detail);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let detail = if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) };
                let _ = writeln!(s, "{mark} {}{detail}", c.name);
            }
            let failed = report.failures().count();
            let _ = writeln!(s, "{} of {} checks passed", report.checks.len() - failed, report.checks.len());
            s
        }
    };
    Ok(Outcome {
        body,
        passed: report.all_passed(),
    })
}

fn certificate_line(c: &Certificate) -> String {
    let verdict = match c.verdict {
        certificate::Verdict::Sos => "sos",
        certificate::Verdict::NotSos => "not_sos",
    };
    match &c.certificate {
        CertificateBody::Decomposition { lambda } => {
            format!("k={} {verdict} lambda=({})", c.k, lambda.join(", "))
        }
        CertificateBody::Farkas {
            farkas_row,
            product_row,
            product_rhs,
        } => format!(
            "k={} {verdict} farkas_row=({}) product_row=({}) product_rhs={product_rhs}",
            c.k,
            farkas_row.join(", "),
            product_row.join(", ")
        ),
    }
}

fn certify(g: &Global, k: Option<usize>, range: Option<(usize, usize)>) -> Result<Outcome, Failure> {
    let (lo, hi) = match (k, range) {
        (Some(k), _) => (k, k),
        (None, Some(r)) => r,
        (None, None) => (16, 24),
    };
    if lo < 16 {
        return Err(Failure::Usage(format!("certify needs k >= 16, got {lo}")));
    }
    let mut certs = Vec::new();
    let mut passed = true;
    for k in lo..=hi {
        let c = certificate::certify(k)?;
        passed &= c.check().is_ok();
        certs.push(c);
    }
    let body = match g.format {
        Format::Json if k.is_some() => pretty(&serde_json::to_value(&certs[0]).expect("serializable")),
        Format::Json => pretty(&serde_json::to_value(&certs).expect("serializable")),
        Format::Csv => {
            let mut s = String::from("k,verdict,certificate\n");
            for c in &certs {
                let line = certificate_line(c);
                let mut parts = line.splitn(3, ' ').skip(1);
                let verdict = parts.next().unwrap_or("");
                let rest = parts.next().unwrap_or("");
                let _ = writeln!(s, "{},{verdict},\"{rest}\"", c.k);
            }
            s
        }
        Format::Text => certs.iter().map(|c| certificate_line(c) + "\n").collect(),
    };
    Ok(Outcome { body, passed })
}

fn gap_table(g: &Global, (lo, hi): (usize, usize)) -> Result<Outcome, Failure> {
    if lo < 2 {
        return Err(Failure::Usage(format!("gap-table needs k >= 2, got {lo}")));
    }
    let mut rows = Vec::new();
    let mut passed = true;
    let two = octosos::linalg::qi(2);
    for k in lo..=hi {
        let sos_min = certificate::sos_min_invariant(k)?;
        let gap = certificate::gap_invariant(k)?;
        passed &= sos_min == certificate::sos_min_closed_form(k) && gap == certificate::gap_closed_form(k);
        rows.push((k, sos_min.clone(), gap.clone(), gap > two));
    }
    let body = match g.format {
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|(k, s, gp, f)| {
                    json!({ "k": k, "sos_min": fmt_rational(s), "gap": fmt_rational(gp), "gap_gt_2": f })
                })
                .collect(),
        )),
        Format::Csv => {
            let mut s = String::from("k,sos_min,gap,gap_gt_2\n");
            for (k, m, gp, f) in &rows {
                let _ = writeln!(s, "{k},{},{},{f}", fmt_rational(m), fmt_rational(gp));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>4}  {:>12}  {:>12}  {}\n", "k", "sos_min", "gap", "gap>2");
            for (k, m, gp, f) in &rows {
                let _ = writeln!(s, "{k:>4}  {:>12}  {:>12}  {f}", fmt_rational(m), fmt_rational(gp));
            }
            s
        }
    };
    Ok(Outcome { body, passed })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Failure {
    match Failure::from(e) {
        Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn dense_cmd(
    g: &Global,
    file: Option<&Path>,
    motzkin: bool,
    stable_set: Option<&Path>,
) -> Result<Outcome, Failure> {
    let (label, form, alpha): (String, DenseForm, Option<usize>) = if motzkin {
        ("motzkin".into(), dense::motzkin_form(), None)
    } else if let Some(path) = stable_set {
        let graph = dense::parse_graph(&read(path)?).map_err(|e| with_path(path, e))?;
        let a = graph.independence_number();
        (format!("stable-set {}", path.display()), dense::stable_set_form(&graph), Some(a))
    } else {
        let path = file.expect("clap requires a source");
        let form = dense::parse_form(&read(path)?).map_err(|e| with_path(path, e))?;
        (format!("form {}", path.display()), form, None)
    };
    let (min, max, sdp) = dense::extrema_and_bound(&form, g.tol, g.seed)?;
    let gap = (max - min > g.tol * max.abs().max(1.0)).then(|| (max - sdp.gamma) / (max - min));
    // The bound can never beat the true minimum by more than the tolerance.
    let mut passed = sdp.gamma <= min + 10.0 * g.tol;
    if let Some(a) = alpha {
        passed &= (min - 1.0 / a as f64).abs() <= 1e-4;
    }
    let body = match g.format {
        Format::Json => pretty(&json!({
            "form": label,
            "variables": form.n(),
            "degree": form.degree(),
            "min": min,
            "max": max,
            "sos_bound": sdp.gamma,
            "gap": gap,
            "independence_number": alpha,
            "primal_dual_gap": sdp.primal_dual_gap,
            "residual": sdp.residual,
        })),
        Format::Csv => format!(
            "form,min,max,sos_bound,gap\n\"{label}\",{},{},{},{}\n",
            fixed(min),
            fixed(max),
            fixed(sdp.gamma),
            gap.map_or("undefined".into(), fixed)
        ),
        Format::Text => {
            let mut s = format!("{label}\n");
            let _ = writeln!(s, "  min        {}", fixed(min));
            let _ = writeln!(s, "  max        {}", fixed(max));
            let _ = writeln!(s, "  sos bound  {}", fixed(sdp.gamma));
            match gap {
                Some(v) => {
                    let _ = writeln!(s, "  gap        {}", fixed(v));
                }
                None => s.push_str("  gap        undefined (form is constant on the sphere)\n"),
            }
            if let Some(a) = alpha {
                let _ = writeln!(s, "  alpha      {a} (1/alpha = {})", fixed(1.0 / a as f64));
            }
            s
        }
    };
    Ok(Outcome { body, passed })
}

fn convexity_cmd(g: &Global, k: usize, samples: usize) -> Result<Outcome, Failure> {
    if k == 0 || samples == 0 {
        return Err(Failure::Usage("k and samples must be positive".into()));
    }
    let (report, passed) = match convexity::convexity_report(k, samples, g.tol, g.seed) {
        Ok(r) => {
            let ok = r.window_ok;
            (json!(r), ok)
        }
        Err(e @ (Error::ConvexityRefuted { .. } | Error::IdentityMismatch(_))) => {
            (json!({ "k": k, "error": e.to_string() }), false)
        }
        Err(e) => return Err(e.into()),
    };
    let body = match g.format {
        Format::Json => pretty(&report),
        Format::Csv | Format::Text => {
            let mut s = String::new();
            if let Value::Object(map) = &report {
                for (key, v) in map {
                    let _ = writeln!(s, "{key},{v}");
                }
            }
            s
        }
    };
    Ok(Outcome { body, passed })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    if !g.tol.is_finite() || g.tol <= 0.0 {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", g.tol)));
    }
    match &cli.command {
        Command::VerifyAlgebra { samples, corrupt_table } => verify_algebra(g, *samples, *corrupt_table),
        Command::Certify { k, k_range } => certify(g, *k, *k_range),
        Command::GapTable { k_range } => gap_table(g, *k_range),
        Command::Dense {
            file,
            motzkin,
            stable_set,
        } => dense_cmd(g, file.as_deref(), *motzkin, stable_set.as_deref()),
        Command::Convexity { k, samples } => convexity_cmd(g, *k, *samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.global.output {
                if let Err(e) = fs::write(path, &out.body) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(USAGE);
                }
            } else {
                print!("{}", out.body);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(FAILED)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(FAILED)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        assert_eq!(parse_range("16..24"), Ok((16, 24)));
        assert_eq!(parse_range("2..=3"), Ok((2, 3)));
        assert!(parse_range("5..4").is_err());
        assert!(parse_range("5").is_err());
        assert!(parse_range("a..4").is_err());
    }

    #[test]
    fn table_pairs_are_bounded() {
        assert_eq!(parse_pair("1,2"), Ok((1, 2)));
        assert!(parse_pair("1,8").is_err());
        assert!(parse_pair("12").is_err());
    }

    #[test]
    fn fixed_drops_negative_zero() {
        assert_eq!(fixed(-1e-12), "0.000000000");
        assert_eq!(fixed(-0.5), "-0.500000000");
        assert_eq!(fixed(1.0045964118), "1.004596412");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
