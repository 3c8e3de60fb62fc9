//! The `cuntz` command line: expression evaluation, flow reports, invariant
//! suites and the numerical cross-checks, with JSON on stdout.
//!
//! Exit status is 0 on success, 1 when a check fails or a computation runs
//! out of budget or precision, and 2 on a usage error (including arguments
//! outside an operation's domain).

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuntz_core::flow::{aps_index_traces, projection_perturbation};
use cuntz_core::json::Sig17;
use cuntz_core::numerics::{dixmier_limit, dixmier_term, sf_integral};
use cuntz_core::{
    build_u_mu_nu, flow_report, parse, CuntzError, Element, MultiIndex, Quadrature, Suite, SummationConfig,
};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "cuntz", version, about = "Exact modular index computations in the Cuntz algebras")]
struct Cli {
    /// Output format; `eval` defaults to text, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and evaluate an element expression.
    Eval {
        #[arg(long)]
        n: u32,
        /// Print the canonical form instead of the evaluated sum.
        #[arg(long)]
        canonical: bool,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Spectral flow report for the unitary built from `mu`, `nu`.
    Sf(PairArgs),
    /// Relative entropy of the conjugated state.
    Entropy(PairArgs),
    /// APS index traces for `v = S_mu S_nu^*`.
    Aps(PairArgs),
    /// Run a named invariant suite.
    Check {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Extrapolated `(s-1)`-weighted zeta sum.
    Dixmier {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', default_value = "1.1,1.05,1.02,1.01")]
        s_list: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        #[arg(long)]
        no_tail: bool,
    },
    /// Spectral flow from the integral formula.
    Sfint {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 10_000)]
        cutoff: u64,
        #[arg(long)]
        no_tail: bool,
        #[arg(long, value_enum, default_value_t = QuadratureArg::Midpoint)]
        quadrature: QuadratureArg,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    n: u32,
    /// Comma-separated letters; empty for the empty word.
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, allow_hyphen_values = true)]
    nu: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Kms,
    Tomita,
    Cocycle,
    Hochschild,
    Keyfact,
    Homotopy,
    Tracesplit,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Kms => Suite::Kms,
            SuiteArg::Tomita => Suite::Tomita,
            SuiteArg::Cocycle => Suite::Cocycle,
            SuiteArg::Hochschild => Suite::Hochschild,
            SuiteArg::Keyfact => Suite::Keyfact,
            SuiteArg::Homotopy => Suite::Homotopy,
            SuiteArg::Tracesplit => Suite::Tracesplit,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuadratureArg {
    Midpoint,
    Adaptive,
}

/// What a verb produced: serialized JSON, a text rendering, and whether a
/// check passed.
struct Report {
    json: String,
    text: String,
    passed: bool,
}

impl Report {
    fn ok(value: impl Serialize, text: String) -> Result<Report, CuntzError> {
        let json = serde_json::to_string(&value).map_err(|e| CuntzError::Numeric(e.to_string()))?;
        Ok(Report { json, text, passed: true })
    }
}

#[derive(Serialize)]
struct EvalOut<'a> {
    n: u32,
    backend: String,
    element: &'a str,
}

#[derive(Serialize)]
struct EntropyOut {
    n: u32,
    mu: MultiIndex,
    nu: MultiIndex,
    sf: String,
    entropy: Sig17,
}

#[derive(Serialize)]
struct ApsOut {
    n: u32,
    mu: MultiIndex,
    nu: MultiIndex,
    v: String,
    traces: [String; 2],
    sum: String,
}

#[derive(Serialize)]
struct CheckOut {
    suite: Suite,
    n: u32,
    max_len: usize,
    cases: usize,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_failure: Option<String>,
}

#[derive(Serialize)]
struct DixmierOut {
    n: u32,
    s_list: Vec<Sig17>,
    config: SummationConfig,
    values: Vec<Sig17>,
    limit: Sig17,
}

#[derive(Serialize)]
struct SfintOut {
    n: u32,
    mu: MultiIndex,
    nu: MultiIndex,
    r: Sig17,
    config: SummationConfig,
    value: Sig17,
    sf: String,
}

fn require_n(n: u32) -> Result<(), CuntzError> {
    if n < 2 {
        return Err(CuntzError::Usage(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn words(pair: &PairArgs) -> Result<(MultiIndex, MultiIndex), CuntzError> {
    require_n(pair.n)?;
    Ok((MultiIndex::parse_list(&pair.mu, pair.n)?, MultiIndex::parse_list(&pair.nu, pair.n)?))
}

fn dispatch(command: &Command) -> Result<Report, CuntzError> {
    match command {
        Command::Eval { n, canonical, expr } => {
            require_n(*n)?;
            let mut a = parse(expr, *n)?;
            if *canonical {
                a = a.canonical_form()?;
            }
            let rendered = a.render();
            Report::ok(
                EvalOut {
                    n: *n,
                    backend: a.backend().to_string(),
                    element: &rendered,
                },
                rendered.clone(),
            )
        }
        Command::Sf(pair) => {
            let (mu, nu) = words(pair)?;
            let report = flow_report(pair.n, &mu, &nu)?;
            let text = format!("sf = {}", cuntz_core::scalar::format_rational(&report.sf));
            Report::ok(report, text)
        }
        Command::Entropy(pair) => {
            let (mu, nu) = words(pair)?;
            let report = flow_report(pair.n, &mu, &nu)?;
            let text = format!("entropy = {}", cuntz_core::json::sig17(report.entropy));
            Report::ok(
                EntropyOut {
                    n: pair.n,
                    mu,
                    nu,
                    sf: cuntz_core::scalar::format_rational(&report.sf),
                    entropy: Sig17(report.entropy),
                },
                text,
            )
        }
        Command::Aps(pair) => {
            let (mu, nu) = words(pair)?;
            let v = Element::monomial(pair.n, mu.clone(), nu.clone())?;
            let (first, second) = aps_index_traces(&v)?;
            let sum = &first + &second;
            let text = format!("traces = ({first}, {second}), sum = {sum}");
            Report::ok(
                ApsOut {
                    n: pair.n,
                    mu,
                    nu,
                    v: v.render(),
                    traces: [first.to_string(), second.to_string()],
                    sum: sum.to_string(),
                },
                text,
            )
        }
        Command::Check { suite, n, max_len } => {
            require_n(*n)?;
            let suite = Suite::from(*suite);
            let report = suite.run(*n, *max_len)?;
            let passed = report.passed();
            let text = format!(
                "{suite}: {} cases, {} failures{}",
                report.cases,
                report.failures,
                report.first_failure.as_deref().map(|f| format!("; first: {f}")).unwrap_or_default()
            );
            let mut out = Report::ok(
                CheckOut {
                    suite,
                    n: *n,
                    max_len: *max_len,
                    cases: report.cases,
                    failures: report.failures,
                    first_failure: report.first_failure,
                },
                text,
            )?;
            out.passed = passed;
            Ok(out)
        }
        Command::Dixmier {
            n,
            s_list,
            cutoff,
            no_tail,
        } => {
            require_n(*n)?;
            let mut config = SummationConfig::new(*cutoff);
            config.tail_correction = !no_tail;
            let limit = dixmier_limit(*n, s_list, &config)?;
            let values = s_list
                .iter()
                .map(|&s| dixmier_term(s, &config).map(Sig17))
                .collect::<Result<Vec<_>, _>>()?;
            let text = format!("limit = {}", cuntz_core::json::sig17(limit));
            Report::ok(
                DixmierOut {
                    n: *n,
                    s_list: s_list.iter().copied().map(Sig17).collect(),
                    config,
                    values,
                    limit: Sig17(limit),
                },
                text,
            )
        }
        Command::Sfint {
            pair,
            r,
            cutoff,
            no_tail,
            quadrature,
        } => {
            let (mu, nu) = words(pair)?;
            let mut config = SummationConfig::new(*cutoff);
            config.tail_correction = !no_tail;
            config.quadrature = match quadrature {
                QuadratureArg::Midpoint => Quadrature::Midpoint,
                QuadratureArg::Adaptive => Quadrature::Adaptive,
            };
            let u = build_u_mu_nu(pair.n, &mu, &nu)?;
            let x = projection_perturbation(&u)?;
            let value = sf_integral(&x, *r, &config)?;
            let sf = cuntz_core::scalar::format_rational(&x.zeroth_moment());
            let text = format!("integral = {}, exact sf = {sf}", cuntz_core::json::sig17(value));
            Report::ok(
                SfintOut {
                    n: pair.n,
                    mu,
                    nu,
                    r: Sig17(*r),
                    config,
                    value: Sig17(value),
                    sf,
                },
                text,
            )
        }
    }
}

fn exit_code(e: &CuntzError) -> i32 {
    match e {
        CuntzError::Usage(_)
        | CuntzError::Parse { .. }
        | CuntzError::IndexOutOfRange { .. }
        | CuntzError::Backend(_)
        | CuntzError::Domain(_) => 2,
        CuntzError::TermBudget { .. } | CuntzError::Numeric(_) => 1,
    }
}

/// Runs the command line `args` (program name first), writing the report to
/// `stdout` and diagnostics to `stderr`. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let default = match cli.command {
        Command::Eval { .. } => Output::Text,
        _ => Output::Json,
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            let body = match cli.output.unwrap_or(default) {
                Output::Json => report.json,
                Output::Text => report.text,
            };
            if writeln!(stdout, "{body}").is_err() {
                return 1;
            }
            if report.passed {
                0
            } else {
                let _ = writeln!(stderr, "check failed");
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
