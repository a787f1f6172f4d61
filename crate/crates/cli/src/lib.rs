//! Command-line front end for `blochsep`.
//!
//! Subsystems are labelled from 1 in every report and flag; the library
//! underneath counts from 0.

pub mod json;
pub mod source;

use std::path::PathBuf;
use std::time::Instant;

use blochsep::bloch::correlation_tensor;
use blochsep::criteria::{
    analyze, build_separable_decomposition, prop2_lhs, separability_bound, threshold_search,
    threshold_search_with, CriteriaSet, Criterion, SubsetSelection, ThresholdCriterion,
    ThresholdMethod, Verdict,
};
use blochsep::states::ZooSpec;
use blochsep::tensor::tensor_kyfan;
use clap::{Args, Parser, Subcommand, ValueEnum};

use json::Json;
use source::{load_source, parse_family, write_atomic, write_state_file, Metadata};

/// Version tag written into every state file and report.
pub const SCHEMA: &str = "blochsep/1";

/// Failure with the process exit status it maps to.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub const INVALID: i32 = 2;
    pub const INAPPLICABLE: i32 = 3;
    pub const NUMERIC: i32 = 4;

    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: Self::INVALID, message: message.into() }
    }

    pub fn inapplicable(message: impl Into<String>) -> Self {
        Self { code: Self::INAPPLICABLE, message: message.into() }
    }
}

impl From<blochsep::Error> for CliError {
    fn from(e: blochsep::Error) -> Self {
        let code = match e {
            blochsep::Error::NumericIntegrity(_) => Self::NUMERIC,
            blochsep::Error::Unavailable(_) | blochsep::Error::NoThreshold(_) => Self::INAPPLICABLE,
            _ => Self::INVALID,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "blochsep", version, about = "Bloch-representation separability analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ky Fan norm tests, subset scans and sufficiency tests for one state.
    Analyze(AnalyzeArgs),
    /// Mixing parameter at which a noisy family's verdict flips.
    Threshold(ThresholdArgs),
    /// Thresholds of noisy GHZ and W states for 3 to 6 qubits.
    Table7(OutputArgs),
    /// Explicit separable mixture for a state passing the sufficiency test.
    Decompose(DecomposeArgs),
    /// Write a named state to a state file.
    Zoo(ZooArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write here (atomically) instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include wall-clock timing in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// `zoo:<family>[:k=v,...]` or a state file path.
    pub source: String,
    /// full | all | pairs | k=<M>
    #[arg(long, default_value = "all")]
    pub subsets: String,
    /// Comma-separated list of t1, c1, c2, p2, or all.
    #[arg(long, default_value = "all")]
    pub criteria: String,
    /// Guard band for norm-versus-bound comparisons.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdTest {
    T1,
    C1,
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bisect,
    Scan,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// `<family>[:k=v,...]`; any `p` given is ignored.
    pub family: String,
    #[arg(long, value_enum, default_value = "t1")]
    pub criterion: ThresholdTest,
    /// Subsystems for `--criterion c1`, comma-separated, 1-based.
    #[arg(long)]
    pub subset: Option<String>,
    /// `scan` grids p in steps of 1e-3 before bisecting, for families not
    /// known to be monotone.
    #[arg(long, value_enum, default_value = "bisect")]
    pub method: Method,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    pub source: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ZooArgs {
    /// `<family>[:k=v,...]`, with or without a `zoo:` prefix.
    pub family: String,
    /// Write here (atomically) instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parse `full | all | pairs | k=<M>`.
pub fn parse_subsets(text: &str) -> Result<SubsetSelection, CliError> {
    match text.trim() {
        "full" => Ok(SubsetSelection::Full),
        "all" => Ok(SubsetSelection::All),
        "pairs" => Ok(SubsetSelection::Pairs),
        other => other
            .strip_prefix("k=")
            .and_then(|m| m.parse().ok())
            .map(SubsetSelection::Size)
            .ok_or_else(|| {
                CliError::invalid(format!("--subsets `{other}`: expected full, all, pairs or k=<M>"))
            }),
    }
}

/// Parse a comma-separated criteria list.
pub fn parse_criteria(text: &str) -> Result<CriteriaSet, CliError> {
    let mut set = CriteriaSet::default();
    for item in text.split(',').map(str::trim) {
        match item {
            "t1" => set.theorem1 = true,
            "c1" => set.corollary1 = true,
            "c2" => set.corollary2 = true,
            "p2" => set.prop2 = true,
            "all" => set = CriteriaSet::all(),
            other => {
                return Err(CliError::invalid(format!(
                    "--criteria `{other}`: expected t1, c1, c2, p2 or all"
                )))
            }
        }
    }
    Ok(set)
}

fn parse_subset_labels(text: &str) -> Result<Vec<usize>, CliError> {
    let labels = text
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .map(|k| k - 1)
                .ok_or_else(|| CliError::invalid(format!("--subset entry `{x}` is not a label >= 1")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(labels)
}

fn one_based(subset: &[usize]) -> Vec<usize> {
    subset.iter().map(|k| k + 1).collect()
}

fn verdict_json(v: &Verdict) -> Json {
    Json::obj()
        .with("criterion", v.criterion.id())
        .with("decision", v.decision.as_str())
        .with("norm", v.norm)
        .with("bound", v.bound)
        .with("borderline", v.borderline)
        .with("reason", v.reason.clone())
}

fn subset_label(subset: &[usize]) -> String {
    let inner: Vec<String> = one_based(subset).iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn csv_float(x: f64) -> String {
    if x.is_finite() {
        json::sci(if x == 0.0 { 0.0 } else { x }, json::REPORT_DIGITS)
    } else {
        String::new()
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::invalid(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::invalid(e.to_string()))
}

/// Produced text plus where it went.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub written_to: Option<PathBuf>,
}

fn deliver(text: String, output: &Option<PathBuf>) -> Result<Outcome, CliError> {
    if let Some(path) = output {
        write_atomic(path, &text)?;
    }
    Ok(Outcome { text, written_to: output.clone() })
}

fn with_timing(report: Json, out: &OutputArgs, start: Instant) -> Json {
    if out.timing {
        report.with("timing", Json::obj().with("seconds", start.elapsed().as_secs_f64()))
    } else {
        report
    }
}

fn header(command: &str) -> Json {
    Json::obj().with("schema", SCHEMA).with("command", command)
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let loaded = load_source(&args.source)?;
    let rho = &loaded.state;
    if rho.parties() < 2 {
        return Err(CliError::invalid("analysis needs at least two subsystems"));
    }
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return Err(CliError::invalid(format!("--tol {} must be a nonnegative number", args.tol)));
    }
    let selection = parse_subsets(&args.subsets)?;
    let criteria = parse_criteria(&args.criteria)?;
    let report = analyze(rho, &selection, criteria)?;
    let regrade = |v: &Verdict| v.regraded(args.tol);

    if args.out.format == Format::Csv {
        let rows = report
            .records
            .iter()
            .map(|r| {
                let v = regrade(&r.verdict);
                let dims: Vec<String> = r.subset.iter().map(|&k| rho.dims()[k].to_string()).collect();
                vec![
                    subset_label(&r.subset),
                    dims.join("x"),
                    csv_float(v.norm),
                    csv_float(v.bound),
                    v.decision.as_str().to_string(),
                    v.borderline.to_string(),
                    v.criterion.id().to_string(),
                ]
            })
            .collect();
        let text = csv_text(
            &["subset", "dims", "norm", "bound", "decision", "borderline", "criterion"],
            rows,
        )?;
        return deliver(text, &args.out.output);
    }

    let mut names = Vec::new();
    for (on, id) in [
        (criteria.theorem1, Criterion::Theorem1),
        (criteria.corollary1, Criterion::Corollary1),
        (criteria.corollary2, Criterion::Corollary2),
        (criteria.prop2, Criterion::Prop2),
    ] {
        if on {
            names.push(id.id());
        }
    }
    let records: Vec<Json> = report
        .records
        .iter()
        .map(|r| {
            let dims: Vec<usize> = r.subset.iter().map(|&k| rho.dims()[k]).collect();
            Json::obj()
                .with("subset", one_based(&r.subset))
                .with("dims", dims)
                .with("verdict", verdict_json(&regrade(&r.verdict)))
        })
        .collect();
    let t1 = report.theorem1.as_ref().map(regrade);
    let c2 = report.corollary2.as_ref().map(regrade);
    let p2 = report.prop2.as_ref().map(|p| (p, regrade(&p.verdict)));
    let entangled = records_entangled(&report.records, args.tol)
        || t1.as_ref().is_some_and(Verdict::is_entangled)
        || c2.as_ref().is_some_and(Verdict::is_entangled);
    let separable = c2.as_ref().is_some_and(Verdict::is_separable)
        || p2.as_ref().is_some_and(|(_, v)| v.is_separable());
    let mut out = header("analyze")
        .with("input", loaded.descriptor())
        .with(
            "options",
            Json::obj()
                .with("subsets", args.subsets.as_str())
                .with("criteria", names.into_iter().map(Json::from).collect::<Vec<_>>())
                .with("tol", args.tol),
        )
        .with("records", Json::Arr(records));
    if let Some(v) = &t1 {
        out = out.with("theorem1", verdict_json(v));
    }
    if let Some(v) = &c2 {
        out = out.with("corollary2", verdict_json(v));
    }
    if let Some((p, v)) = &p2 {
        let unavailable: Vec<Json> = p.unavailable.iter().map(|s| Json::from(one_based(s))).collect();
        out = out.with(
            "prop2",
            Json::obj()
                .with("lhs", p.lhs)
                .with("available", p.lhs.is_some())
                .with("unavailable", Json::Arr(unavailable))
                .with("verdict", verdict_json(v)),
        );
    }
    out = out.with("summary", Json::obj().with("entangled", entangled).with("separable", separable));
    let out = with_timing(out, &args.out, start);
    deliver(out.to_pretty() + "\n", &args.out.output)
}

fn records_entangled(records: &[blochsep::criteria::SubsetRecord], tol: f64) -> bool {
    records.iter().any(|r| r.verdict.regraded(tol).is_entangled())
}

/// Threshold with the closed-form cross-check `bound / ‖T(p = 1)‖` for the
/// Ky Fan tests, which holds because every coefficient is linear in `p`.
fn threshold_with_check(
    spec: &ZooSpec,
    criterion: &ThresholdCriterion,
    method: ThresholdMethod,
) -> Result<(f64, Option<f64>), CliError> {
    let p = match method {
        ThresholdMethod::Bisect => threshold_search(spec, criterion)?,
        ThresholdMethod::ScanThenBisect => {
            let c = criterion.clone();
            threshold_search_with(
                |p| {
                    let rho = spec.with_p(p).expect("noisy family").build()?;
                    let one = ThresholdCriterion::clone(&c);
                    Ok(match one {
                        ThresholdCriterion::Prop2 => {
                            !prop2_lhs(&rho)?.is_some_and(|l| l <= 1.0 + 1e-10)
                        }
                        ThresholdCriterion::Theorem1 => blochsep::criteria::theorem1_check(&rho)?.is_entangled(),
                        ThresholdCriterion::Subset(s) => {
                            let t = correlation_tensor(&rho, &s)?;
                            let dims: Vec<usize> = s.iter().map(|&k| rho.dims()[k]).collect();
                            tensor_kyfan(&t)? > separability_bound(&dims)? + 1e-9
                        }
                    })
                },
                ThresholdMethod::ScanThenBisect,
            )?
        }
    };
    let closed = match criterion {
        ThresholdCriterion::Prop2 => None,
        ThresholdCriterion::Theorem1 | ThresholdCriterion::Subset(_) => {
            let rho = spec.with_p(1.0).expect("noisy family").build()?;
            let subset: Vec<usize> = match criterion {
                ThresholdCriterion::Subset(s) => s.clone(),
                _ => (0..rho.parties()).collect(),
            };
            let dims: Vec<usize> = subset.iter().map(|&k| rho.dims()[k]).collect();
            let norm = tensor_kyfan(&correlation_tensor(&rho, &subset)?)?;
            Some(separability_bound(&dims)? / norm)
        }
    };
    Ok((p, closed))
}

pub fn cmd_threshold(args: &ThresholdArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let text = args.family.strip_prefix("zoo:").unwrap_or(&args.family);
    let spec = parse_family(text, Some(1.0))?;
    if spec.p().is_none() {
        return Err(CliError::invalid(format!(
            "family `{}` has no mixing parameter p",
            spec.family()
        )));
    }
    let criterion = match (args.criterion, &args.subset) {
        (ThresholdTest::T1, None) => ThresholdCriterion::Theorem1,
        (ThresholdTest::P2, None) => ThresholdCriterion::Prop2,
        (ThresholdTest::C1, Some(s)) => ThresholdCriterion::Subset(parse_subset_labels(s)?),
        (ThresholdTest::C1, None) => return Err(CliError::invalid("--criterion c1 needs --subset")),
        (_, Some(_)) => return Err(CliError::invalid("--subset only applies to --criterion c1")),
    };
    if let ThresholdCriterion::Subset(s) = &criterion {
        let parties = spec.build()?.parties();
        SubsetSelection::Explicit(vec![s.clone()]).resolve(parties)?;
        if s.len() < 2 || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&k| k >= parties) {
            return Err(CliError::invalid(format!(
                "--subset must list at least two ascending labels in 1..={parties}"
            )));
        }
    }
    let method = match args.method {
        Method::Bisect => ThresholdMethod::Bisect,
        Method::Scan => ThresholdMethod::ScanThenBisect,
    };
    let (p, closed) = threshold_with_check(&spec, &criterion, method)?;
    let crit_id = match args.criterion {
        ThresholdTest::T1 => "t1",
        ThresholdTest::C1 => "c1",
        ThresholdTest::P2 => "p2",
    };
    let method_id = match args.method {
        Method::Bisect => "bisect",
        Method::Scan => "scan",
    };
    if args.out.format == Format::Csv {
        let text = csv_text(
            &["family", "criterion", "method", "threshold", "closed_form"],
            vec![vec![
                text.to_string(),
                crit_id.to_string(),
                method_id.to_string(),
                csv_float(p),
                closed.map(csv_float).unwrap_or_default(),
            ]],
        )?;
        return deliver(text, &args.out.output);
    }
    let mut report = header("threshold")
        .with("family", text)
        .with("criterion", crit_id)
        .with("method", method_id);
    if let ThresholdCriterion::Subset(s) = &criterion {
        report = report.with("subset", one_based(s));
    }
    let report = report
        .with("tolerance", 1e-6)
        .with("threshold", p)
        .with("closed_form", closed);
    let report = with_timing(report, &args.out, start);
    deliver(report.to_pretty() + "\n", &args.out.output)
}

/// One row of the noisy GHZ / W table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table7Row {
    pub family: &'static str,
    pub parties: usize,
    pub norm: f64,
    pub threshold: f64,
    pub closed_form: f64,
}

pub fn table7_rows() -> Result<Vec<Table7Row>, CliError> {
    let mut rows = Vec::new();
    for family in ["ghz-noisy", "w-noisy"] {
        for n in 3..=6 {
            let spec = if family == "ghz-noisy" {
                ZooSpec::GhzNoisy { parties: n, levels: 2, p: 1.0 }
            } else {
                ZooSpec::WNoisy { parties: n, p: 1.0 }
            };
            let (threshold, closed) =
                threshold_with_check(&spec, &ThresholdCriterion::Theorem1, ThresholdMethod::Bisect)?;
            let closed_form = closed.expect("Ky Fan threshold has a closed form");
            rows.push(Table7Row { family, parties: n, norm: 1.0 / closed_form, threshold, closed_form });
        }
    }
    Ok(rows)
}

pub fn cmd_table7(out: &OutputArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let rows = table7_rows()?;
    if out.format == Format::Csv {
        let text = csv_text(
            &["family", "N", "norm", "threshold", "closed_form"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.family.to_string(),
                        r.parties.to_string(),
                        csv_float(r.norm),
                        csv_float(r.threshold),
                        csv_float(r.closed_form),
                    ]
                })
                .collect(),
        )?;
        return deliver(text, &out.output);
    }
    let rows: Vec<Json> = rows
        .iter()
        .map(|r| {
            Json::obj()
                .with("family", r.family)
                .with("N", r.parties)
                .with("norm", r.norm)
                .with("threshold", r.threshold)
                .with("closed_form", r.closed_form)
        })
        .collect();
    let report = header("table7").with("criterion", "t1").with("rows", Json::Arr(rows));
    let report = with_timing(report, out, start);
    deliver(report.to_pretty() + "\n", &out.output)
}

pub fn cmd_decompose(args: &DecomposeArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let loaded = load_source(&args.source)?;
    let rho = &loaded.state;
    let d = build_separable_decomposition(rho).map_err(|e| match e {
        blochsep::Error::Unavailable(reason) => {
            CliError::inapplicable(format!("separable decomposition unavailable: {reason}"))
        }
        other => other.into(),
    })?;
    let check = d.verify(rho)?;
    if args.out.format == Format::Csv {
        let mut rows = vec![vec!["0".into(), csv_float(d.identity_weight), String::new(), String::new()]];
        for (i, t) in d.terms.iter().enumerate() {
            for (k, v) in t.factors.iter().enumerate() {
                let comps: Vec<String> = v.iter().map(|&x| csv_float(x)).collect();
                rows.push(vec![(i + 1).to_string(), csv_float(t.weight), (k + 1).to_string(), comps.join(" ")]);
            }
        }
        let text = csv_text(&["term", "weight", "subsystem", "vector"], rows)?;
        return deliver(text, &args.out.output);
    }
    let terms: Vec<Json> = d
        .terms
        .iter()
        .map(|t| {
            Json::obj().with("weight", t.weight).with(
                "factors",
                Json::Arr(t.factors.iter().map(|v| Json::from(v.iter().copied().collect::<Vec<f64>>())).collect()),
            )
        })
        .collect();
    let lhs = 1.0 - d.identity_weight;
    let report = header("decompose")
        .with("input", loaded.descriptor())
        .with("lhs", lhs)
        .with("identity_weight", d.identity_weight)
        .with("term_count", d.term_count())
        .with("terms", Json::Arr(terms))
        .with(
            "check",
            Json::obj()
                .with("residual", check.residual)
                .with("weight_error", check.weight_error)
                .with("max_radius_excess", check.max_radius_excess)
                .with("min_factor_eigenvalue", check.min_factor_eigenvalue)
                .with("passes", check.passes()),
        );
    let report = with_timing(report, &args.out, start);
    deliver(report.to_pretty() + "\n", &args.out.output)
}

pub fn cmd_zoo(args: &ZooArgs) -> Result<Outcome, CliError> {
    let text = args.family.strip_prefix("zoo:").unwrap_or(&args.family);
    let state = parse_family(text, None)?.build()?;
    let meta = Metadata { name: Some(text.to_string()), source: Some("zoo".into()) };
    deliver(write_state_file(&state, &meta), &args.output)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Table7(o) => cmd_table7(o),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Zoo(a) => cmd_zoo(a),
    }
}
