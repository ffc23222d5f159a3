//! `helson`: command-line front end for helson-core.
//!
//! Exit codes: 0 success, 1 user or configuration error, 2 numerical
//! failure (including inconclusive or divergent diagnostics under
//! `--strict`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use helson_core::diagnostics::{coeff_decay_1d, gram_dual, halfline_grid, halfline_window, helson_decay, window_multi, Verdict};
use helson_core::experiments::{counterexample_ratio, counterexample_xnorm, mult_hilbert_study, tensor_check, xnorm_grid};
use helson_core::finiterank::{boundedness_check, form_rank, symbol_eval_at, symbol_taylor, HelsonFormSpec, SymbolArg, DEFAULT_RANK_CAP};
use helson_core::matrix::{build_helson, HelsonOperator};
use helson_core::moments::{ClosedForm, HalfLineDensity};
use helson_core::spectral::norm_schedule;
use helson_core::{alpha, factorize, MomentSequence};

#[derive(Parser, Debug)]
#[command(name = "helson", version, about = "Helson matrices: moments, spectra, diagnostics, finite-rank forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Moment sequence or form: inline JSON, `closed:<name>`, or a file path.
    #[arg(long, global = true)]
    spec: Option<String>,
    /// Index, degree or coordinate count, depending on the command.
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Largest matrix index (build, spectrum, gram) or cube side (tensor experiment).
    #[arg(long, global = true)]
    size: Option<u64>,
    /// Comma-separated list of dimensions for norm schedules.
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// First matrix index, 1 or 2; defaults to where the sequence is defined.
    #[arg(long, global = true)]
    offset: Option<u64>,
    /// Monomial cap `n(κ) ≤ cap` for rank computations.
    #[arg(long, global = true)]
    degree_cap: Option<u64>,
    /// Comma-separated values, or `auto:<decades>` for a generated grid.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 2 on inconclusive or divergent diagnostics.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print α(n).
    Alpha,
    /// Section [α(nm)] as CSV.
    Build,
    /// Eigenvalues of one section as CSV, or a JSON norm schedule with --sizes.
    Spectrum,
    /// Boundedness diagnostics as JSON.
    Diagnose,
    /// Rank of a Helson form.
    Rank,
    /// Taylor coefficients and values of the analytic symbol of a form.
    Symbol,
    /// Gram matrix of a discrete measure and its spectrum.
    Gram,
    /// Scripted studies.
    Experiment { name: Experiment },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Experiment {
    MultHilbert,
    Xnorm,
    Ratio,
    Tensor,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<helson_core::Error>() {
            Some(e) if e.is_numerical() => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

impl From<helson_core::Error> for Failure {
    fn from(e: helson_core::Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

/// Command output plus whether `--strict` should turn it into a failure.
struct Output {
    text: String,
    flagged: Option<String>,
}

impl Output {
    fn plain(text: String) -> Self {
        Output { text, flagged: None }
    }
}

enum Grid {
    Auto(usize),
    List(Vec<f64>),
}

fn parse_grid(text: &str) -> anyhow::Result<Grid> {
    if let Some(d) = text.strip_prefix("auto:") {
        let d = d.parse().with_context(|| format!("bad decade count in --grid {text:?}"))?;
        return Ok(Grid::Auto(d));
    }
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad grid value {v:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if values.is_empty() {
        bail!("empty --grid");
    }
    Ok(Grid::List(values))
}

fn spec_text(raw: &str) -> anyhow::Result<String> {
    if raw.trim_start().starts_with('{') {
        return Ok(raw.to_string());
    }
    fs::read_to_string(raw).with_context(|| format!("cannot read spec file {raw}"))
}

fn moment_spec(raw: Option<&str>) -> anyhow::Result<MomentSequence> {
    let raw = raw.ok_or_else(|| anyhow!("--spec is required"))?;
    if let Some(name) = raw.strip_prefix("closed:") {
        return Ok(MomentSequence::closed(ClosedForm::parse(name)?));
    }
    Ok(MomentSequence::from_json(&spec_text(raw)?)?)
}

fn form_spec(raw: Option<&str>) -> anyhow::Result<HelsonFormSpec> {
    let raw = raw.ok_or_else(|| anyhow!("--spec is required"))?;
    Ok(HelsonFormSpec::from_json(&spec_text(raw)?)?)
}

fn to_json(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn offset_for(cli: &Cli, seq: &MomentSequence) -> anyhow::Result<u64> {
    let o = cli.offset.unwrap_or_else(|| seq.first_index());
    if o != 1 && o != 2 {
        bail!("--offset must be 1 or 2");
    }
    Ok(o)
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("{flag} is required for this command"))
}

fn run_alpha(cli: &Cli) -> Result<Output, Failure> {
    let seq = moment_spec(cli.spec.as_deref())?;
    let n = required(cli.n, "--n")?;
    let a = alpha(&seq, n)?;
    Ok(Output::plain(format!("{a}\n")))
}

fn run_build(cli: &Cli) -> Result<Output, Failure> {
    let seq = moment_spec(cli.spec.as_deref())?;
    let m = build_helson(&seq, required(cli.size, "--size")?, offset_for(cli, &seq)?)?;
    Ok(Output::plain(m.to_csv()))
}

fn run_spectrum(cli: &Cli) -> Result<Output, Failure> {
    let seq = moment_spec(cli.spec.as_deref())?;
    let offset = offset_for(cli, &seq)?;
    if let Some(sizes) = &cli.sizes {
        let s = norm_schedule(&seq, sizes, offset)?;
        let flagged = (!s.points.iter().all(|p| p.converged)).then(|| "unconverged schedule point".to_string());
        return Ok(Output { text: to_json(json!({ "spec": seq, "offset": offset, "schedule": s })), flagged });
    }
    let size = required(cli.size, "--size")?;
    let op = HelsonOperator::new(&seq, size, offset)?;
    let r = match &op {
        HelsonOperator::Dense(m) => m.eigenvalues()?,
        HelsonOperator::Streaming { .. } => op.top_eigenvalues(8)?,
    };
    let flagged = (!r.converged).then(|| "eigensolver did not converge".to_string());
    Ok(Output { text: r.to_csv(), flagged })
}

fn run_diagnose(cli: &Cli) -> Result<Output, Failure> {
    let seq = moment_spec(cli.spec.as_deref())?;
    let n_max = cli.n.unwrap_or(1 << 20);
    let mut reports = vec![helson_decay(&seq, n_max)?];
    match &seq {
        MomentSequence::HalfLine { density } if !matches!(density, HalfLineDensity::Appendix) => {
            let grid = match cli.grid.as_deref().map(parse_grid).transpose()? {
                None => halfline_grid(8),
                Some(Grid::Auto(d)) => halfline_grid(d),
                Some(Grid::List(v)) => v,
            };
            reports.push(halfline_window(density, &grid)?);
        }
        MomentSequence::Discrete(mu) if mu.atoms.iter().all(|a| a.point.support().is_some()) => {
            reports.push(window_multi(mu, &[])?);
        }
        MomentSequence::Multiplicative { primes } => {
            let cap = n_max.min(1 << 16) as usize;
            reports.extend(primes.values().map(|beta| coeff_decay_1d(beta, cap)));
        }
        _ => {}
    }
    let flagged = reports
        .iter()
        .find(|r| r.verdict != Verdict::Bounded)
        .map(|r| format!("{} verdict is {:?}", r.test, r.verdict));
    Ok(Output { text: to_json(json!({ "spec": seq, "reports": reports })), flagged })
}

fn run_rank(cli: &Cli) -> Result<Output, Failure> {
    let spec = form_spec(cli.spec.as_deref())?;
    let r = form_rank(&spec, cli.degree_cap.unwrap_or(DEFAULT_RANK_CAP))?;
    let flagged = (!r.stabilized).then(|| format!("rank not stabilized: {:?}", r.history));
    if let Some(msg) = &flagged {
        eprintln!("warning: {msg}");
    }
    Ok(Output { text: format!("{}\n", r.rank), flagged })
}

fn run_symbol(cli: &Cli) -> Result<Output, Failure> {
    let spec = form_spec(cli.spec.as_deref())?;
    let report = boundedness_check(&spec)?;
    if !report.bounded {
        return Err(anyhow!("the form is unbounded; offending points {:?}", report.offending_points).into());
    }
    let mut coefficients = Vec::new();
    for n in 1..=cli.n.unwrap_or(16) {
        let b = symbol_taylor(&spec, &factorize(n)?)?;
        coefficients.push(json!({ "n": n, "re": b.re, "im": b.im }));
    }
    let mut values = Vec::new();
    let grid = match cli.grid.as_deref().map(parse_grid).transpose()? {
        None => Vec::new(),
        Some(Grid::List(v)) => v,
        Some(Grid::Auto(_)) => return Err(anyhow!("symbol takes an explicit list of Bohr exponents").into()),
    };
    for s in grid {
        let b = symbol_eval_at(&spec, &SymbolArg::Bohr(s))?;
        values.push(json!({ "s": s, "re": b.re, "im": b.im }));
    }
    let text = to_json(json!({ "spec": spec, "coefficients": coefficients, "bohr_values": values }));
    Ok(Output::plain(text))
}

fn run_gram(cli: &Cli) -> Result<Output, Failure> {
    let seq = moment_spec(cli.spec.as_deref())?;
    let MomentSequence::Discrete(mu) = &seq else {
        return Err(anyhow!("gram needs a discrete measure").into());
    };
    let dual = gram_dual(mu)?;
    let section = match cli.size {
        Some(size) => {
            let op = HelsonOperator::new(&seq, size, offset_for(cli, &seq)?)?;
            let k = dual.size.min(op.dim());
            Some(op.top_eigenvalues(k)?)
        }
        None => None,
    };
    Ok(Output::plain(to_json(json!({ "spec": seq, "gram": dual, "section": section }))))
}

fn run_experiment(cli: &Cli, name: Experiment) -> Result<Output, Failure> {
    let grid = |default: usize| -> anyhow::Result<Vec<f64>> {
        Ok(match cli.grid.as_deref().map(parse_grid).transpose()? {
            None => xnorm_grid(default),
            Some(Grid::Auto(d)) => xnorm_grid(d),
            Some(Grid::List(v)) => v,
        })
    };
    let n = usize::try_from(cli.n.unwrap_or(4)).context("--n too large")?;
    let value = match name {
        Experiment::MultHilbert => {
            let sizes = cli.sizes.clone().unwrap_or_else(|| vec![16, 64, 256, 1024]);
            let r = mult_hilbert_study(&sizes)?;
            let flagged = (!r.points.iter().all(|p| p.converged)).then(|| "unconverged eigenvalues".to_string());
            return Ok(Output { text: to_json(json!({ "experiment": "mult-hilbert", "report": r })), flagged });
        }
        Experiment::Xnorm => json!({ "experiment": "xnorm", "report": counterexample_xnorm(n, &grid(8)?)? }),
        Experiment::Ratio => {
            let sizes = cli.sizes.clone().unwrap_or_else(|| vec![64, 256, 1024]);
            json!({ "experiment": "ratio", "report": counterexample_ratio(n, &sizes, &grid(8)?)? })
        }
        Experiment::Tensor => {
            let d = usize::try_from(cli.n.unwrap_or(2)).context("--n too large")?;
            let cap = usize::try_from(cli.size.unwrap_or(8)).context("--size too large")?;
            json!({ "experiment": "tensor", "report": tensor_check(d, cap)? })
        }
    };
    Ok(Output::plain(to_json(value)))
}

/// Writes through a sibling temporary file and a rename.
fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| anyhow!("--out {} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: &Cli) -> Result<Option<String>, Failure> {
    let out = match cli.command {
        Command::Alpha => run_alpha(cli),
        Command::Build => run_build(cli),
        Command::Spectrum => run_spectrum(cli),
        Command::Diagnose => run_diagnose(cli),
        Command::Rank => run_rank(cli),
        Command::Symbol => run_symbol(cli),
        Command::Gram => run_gram(cli),
        Command::Experiment { name } => run_experiment(cli, name),
    }?;
    match &cli.out {
        Some(path) => write_atomic(path, &out.text)?,
        None => print!("{}", out.text),
    }
    Ok(out.flagged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Some(flag)) if cli.strict => {
            eprintln!("strict: {flag}");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert!(matches!(parse_grid("auto:3").unwrap(), Grid::Auto(3)));
        match parse_grid("0.5, 0.75").unwrap() {
            Grid::List(v) => assert_eq!(v, vec![0.5, 0.75]),
            Grid::Auto(_) => panic!("expected a list"),
        }
        assert!(parse_grid("auto:x").is_err());
        assert!(parse_grid("0.5,,1").is_err());
    }

    #[test]
    fn closed_specs() {
        let seq = moment_spec(Some("closed:multiplicative-hilbert")).unwrap();
        assert_eq!(seq, MomentSequence::closed(ClosedForm::MultiplicativeHilbert));
        assert!(moment_spec(Some("closed:nope")).is_err());
        assert!(moment_spec(None).is_err());
    }

    #[test]
    fn error_codes() {
        let f: Failure = helson_core::Error::Divergence("x".into()).into();
        assert_eq!(f.code, 2);
        let f: Failure = helson_core::Error::Contract("x".into()).into();
        assert_eq!(f.code, 1);
    }
}
