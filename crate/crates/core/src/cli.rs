//! Command-line front end. Every data-producing command writes a first line
//! `# tfim <config json>` followed by CSV or JSON-lines records; the `replay`
//! command re-runs the embedded config and reproduces the file exactly.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{CodeSpec, Variant};
use crate::decode::{
    decode_single_error, erasure_recoverable, erasure_recoverable_brute_force, syndrome_of,
    ErasureModel, ErasurePattern,
};
use crate::error::Error;
use crate::experiments::{
    check_support_stats, depth_to_target, plan_teleport, recovery_curve, run_teleport, substream,
    Backend, EncoderSetup,
};
use crate::pauli::PauliString;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Runtime failure such as an unwritable output path or a failed self test.
pub const EXIT_FAILURE: i32 = 1;
/// Invalid arguments or configuration.
pub const EXIT_CONFIG: i32 = 2;
/// The decoder found the error ambiguous or uncorrectable.
pub const EXIT_DECODE: i32 = 3;

const HEADER_PREFIX: &str = "# tfim ";
const TAG_TELEPORT: u64 = 16;

#[derive(Debug, Parser)]
#[command(name = "tfim", version, about = "TFIM code simulator and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the check and logical operators of a code.
    Ops(Sink<OpsArgs>),
    /// Syndrome and single-error correction for a given Pauli error.
    Decode(Sink<DecodeArgs>),
    /// Measurement-based state transfer over random outcome branches.
    Teleport(Sink<TeleportArgs>),
    /// Letter statistics of the evolved Z checks.
    Stats(Sink<StatsArgs>),
    /// Erasure recovery success against erasure rate and depth.
    RecoveryCurve(Sink<CurveArgs>),
    /// Depth needed to reach a target success, against system size.
    DepthScaling(Sink<ScalingArgs>),
    /// Quick internal consistency checks.
    Selftest(Sink<SelftestArgs>),
    /// Re-run the config embedded in an output file.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

/// Command parameters plus where to write the result.
#[derive(Debug, Args)]
pub struct Sink<T: Args> {
    #[command(flatten)]
    pub params: T,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// File produced by an earlier run.
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct OpsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "open")]
    pub variant: Variant,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    /// Initial logical sites.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub logical: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "periodic")]
    pub variant: Variant,
    #[arg(long, default_value_t = 2)]
    pub rounds: usize,
    /// Pauli word such as "X4" or "-Y3 Z5"; "I" for no error.
    #[arg(long, allow_hyphen_values = true)]
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct TeleportArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub source: usize,
    /// Defaults to the last site.
    #[arg(long)]
    pub target: Option<usize>,
    /// Number of random input states and outcome branches.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "oracle")]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Oracle,
    Tableau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "periodic")]
    pub variant: Variant,
    #[arg(long, default_value_t = 4)]
    pub rounds: usize,
    /// Hadamard probabilities, comma separated.
    #[arg(
        long = "ph",
        value_delimiter = ',',
        default_value = "0,0.25,0.5,0.75,1"
    )]
    pub p_h: Vec<f64>,
    /// Sampled encoders per point.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Erasure rates or fixed erasure counts; exactly one is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct ErasureArgs {
    /// Bernoulli erasure probabilities, comma separated.
    #[arg(long = "pe", value_delimiter = ',')]
    pub p_e: Vec<f64>,
    /// Fixed erasure counts, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "p_e")]
    pub erasures: Vec<usize>,
}

impl ErasureArgs {
    fn models(&self, default_p: &[f64]) -> Vec<ErasureModel> {
        if !self.erasures.is_empty() {
            self.erasures
                .iter()
                .map(|&count| ErasureModel::FixedCount { count })
                .collect()
        } else if !self.p_e.is_empty() {
            self.p_e
                .iter()
                .map(|&p| ErasureModel::Bernoulli { p })
                .collect()
        } else {
            default_p
                .iter()
                .map(|&p| ErasureModel::Bernoulli { p })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "periodic")]
    pub variant: Variant,
    /// Round counts, comma separated; depth is twice the rounds.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
    pub rounds: Vec<usize>,
    #[arg(long = "ph", default_value_t = 0.5)]
    pub p_h: f64,
    #[command(flatten)]
    pub erasure: ErasureArgs,
    #[arg(long, default_value_t = 0.5)]
    pub logical_fraction: f64,
    /// Keep Hadamards off the initial logical sites.
    #[arg(long)]
    pub spare_logical_sites: bool,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct ScalingArgs {
    /// System sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    pub n: Vec<usize>,
    #[arg(long, default_value = "periodic")]
    pub variant: Variant,
    #[arg(long = "ph", default_value_t = 0.02)]
    pub p_h: f64,
    #[arg(long = "pe", default_value_t = 0.03)]
    pub p_e: f64,
    /// Fixed erasure count instead of a rate.
    #[arg(long, conflicts_with = "p_e")]
    pub erasures: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub logical_fraction: f64,
    #[arg(long)]
    pub spare_logical_sites: bool,
    /// Mean success to reach.
    #[arg(long, default_value_t = 0.9)]
    pub target: f64,
    #[arg(long, default_value_t = 60)]
    pub max_rounds: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Ops {
        format: Format,
        params: OpsArgs,
    },
    Decode {
        format: Format,
        params: DecodeArgs,
    },
    Teleport {
        format: Format,
        params: TeleportArgs,
    },
    Stats {
        format: Format,
        params: StatsArgs,
    },
    RecoveryCurve {
        format: Format,
        params: CurveArgs,
    },
    DepthScaling {
        format: Format,
        params: ScalingArgs,
    },
    Selftest {
        format: Format,
        params: SelftestArgs,
    },
}

impl RunConfig {
    fn format(&self) -> Format {
        match self {
            RunConfig::Ops { format, .. }
            | RunConfig::Decode { format, .. }
            | RunConfig::Teleport { format, .. }
            | RunConfig::Stats { format, .. }
            | RunConfig::RecoveryCurve { format, .. }
            | RunConfig::DepthScaling { format, .. }
            | RunConfig::Selftest { format, .. } => *format,
        }
    }

    pub fn header(&self) -> String {
        format!(
            "{HEADER_PREFIX}{}",
            serde_json::to_string(self).expect("config serializes")
        )
    }

    pub fn from_header(line: &str) -> Option<RunConfig> {
        serde_json::from_str(line.strip_prefix(HEADER_PREFIX)?).ok()
    }
}

/// Failure of a command, mapped to an exit status.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Decode(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Decode(_) => EXIT_DECODE,
            CliError::Runtime(_) => EXIT_FAILURE,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Decode(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_decode_failure() {
            CliError::Decode(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

/// Output of a command: the rendered file, plus an error to report after
/// writing it (a decode failure still produces its report).
pub struct Rendered {
    pub text: String,
    pub error: Option<CliError>,
}

struct Table {
    format: Format,
    csv: Option<csv::Writer<Vec<u8>>>,
    lines: String,
}

impl Table {
    fn new(config: &RunConfig) -> Self {
        let format = config.format();
        Table {
            format,
            csv: (format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new())),
            lines: format!("{}\n", config.header()),
        }
    }

    fn push<T: Serialize>(&mut self, record: &T) -> Result<(), CliError> {
        match self.format {
            Format::Csv => self
                .csv
                .as_mut()
                .expect("csv writer")
                .serialize(record)
                .map_err(|e| CliError::Runtime(e.to_string())),
            Format::Jsonl => {
                let line =
                    serde_json::to_string(record).map_err(|e| CliError::Runtime(e.to_string()))?;
                self.lines.push_str(&line);
                self.lines.push('\n');
                Ok(())
            }
        }
    }

    fn finish(mut self) -> Result<String, CliError> {
        if let Some(w) = self.csv.take() {
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            self.lines
                .push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
        }
        Ok(self.lines)
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct OpsRow {
    kind: &'static str,
    index: usize,
    operator: String,
}

fn run_ops(config: &RunConfig, a: &OpsArgs) -> Result<Rendered, CliError> {
    let code = CodeSpec::new(a.n, a.variant, a.rounds)
        .with_logical_sites(a.logical.clone())
        .build()?;
    let mut t = Table::new(config);
    for c in code.checks() {
        t.push(&OpsRow {
            kind: "check",
            index: c.index,
            operator: c.op.to_string(),
        })?;
    }
    for (i, &site) in code.logical_sites().iter().enumerate() {
        for (kind, op) in [
            ("logical_x", &code.logical_x()[i]),
            ("logical_z", &code.logical_z()[i]),
        ] {
            t.push(&OpsRow {
                kind,
                index: site,
                operator: op.to_string(),
            })?;
        }
    }
    Ok(Rendered {
        text: t.finish()?,
        error: None,
    })
}

#[derive(Serialize)]
struct DecodeRow {
    error: String,
    syndrome: String,
    flagged: String,
    status: &'static str,
    correction: String,
    candidates: String,
    checks_restored: Option<bool>,
    logicals_preserved: Option<bool>,
}

fn run_decode(config: &RunConfig, a: &DecodeArgs) -> Result<Rendered, CliError> {
    let code = CodeSpec::new(a.n, a.variant, a.rounds).build()?;
    let error = PauliString::parse(a.n, &a.error)?;
    let checks = code.checks();
    let syndrome = syndrome_of(&error, &checks)?;
    let mut row = DecodeRow {
        error: error.to_string(),
        syndrome: syndrome.to_bit_string(),
        flagged: join(&syndrome.flagged()),
        status: "ok",
        correction: String::new(),
        candidates: String::new(),
        checks_restored: None,
        logicals_preserved: None,
    };
    let mut failure = None;
    match decode_single_error(&syndrome, &code) {
        Ok(corr) => {
            let residual = corr.mul(&error)?;
            row.correction = corr.to_string();
            row.checks_restored = Some(syndrome_of(&residual, &checks)?.is_trivial());
            let mut preserved = true;
            for l in code.logical_x().iter().chain(code.logical_z()) {
                preserved &= residual.commutes(l)?;
            }
            row.logicals_preserved = Some(preserved);
        }
        Err(Error::Ambiguous { candidates }) => {
            row.status = "ambiguous";
            row.candidates = candidates.join(";");
            failure = Some(CliError::Decode(format!(
                "syndrome is shared by {} candidates",
                candidates.len()
            )));
        }
        Err(e) if e.is_decode_failure() => {
            row.status = "uncorrectable";
            failure = Some(CliError::from(e));
        }
        Err(e) => return Err(e.into()),
    }
    let mut t = Table::new(config);
    t.push(&row)?;
    Ok(Rendered {
        text: t.finish()?,
        error: failure,
    })
}

#[derive(Serialize)]
struct TeleportRow {
    trial: usize,
    backend: BackendArg,
    transfer_logical: String,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    /// Outcome bits of the measured sites in site order, `1` for `-1`.
    outcomes: String,
    apply_x: bool,
    apply_z: bool,
    fidelity: f64,
}

/// Uniform random qubit state from four normal deviates (Box-Muller).
fn random_state<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let mut g = || {
        let u: f64 = 1.0 - rng.random::<f64>();
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    let (a, b, c, d) = (g(), g(), g(), g());
    (Complex64::new(a, b), Complex64::new(c, d))
}

fn run_teleport_cmd(config: &RunConfig, a: &TeleportArgs) -> Result<Rendered, CliError> {
    let target = a.target.unwrap_or(a.n);
    let code = CodeSpec::new(a.n, Variant::Open, 1)
        .with_logical_sites(vec![a.source])
        .build()?;
    let plan = plan_teleport(a.source, target, &code)?;
    let backend = match a.backend {
        BackendArg::Oracle => Backend::Oracle,
        BackendArg::Tableau => Backend::Tableau,
    };
    let mut t = Table::new(config);
    for trial in 0..a.trials {
        let mut rng = substream(a.seed, [TAG_TELEPORT, a.n as u64, trial as u64]);
        let (alpha, beta) = random_state(&mut rng);
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let out = run_teleport(&plan, &code, alpha, beta, &mut rng, backend)?;
        t.push(&TeleportRow {
            trial,
            backend: a.backend,
            transfer_logical: plan.transfer_logical.to_string(),
            alpha_re: alpha.re / norm,
            alpha_im: alpha.im / norm,
            beta_re: beta.re / norm,
            beta_im: beta.im / norm,
            outcomes: out
                .outcomes
                .iter()
                .map(|&(_, o)| if o < 0 { '1' } else { '0' })
                .collect(),
            apply_x: out.applied_x,
            apply_z: out.applied_z,
            fidelity: out.fidelity,
        })?;
    }
    Ok(Rendered {
        text: t.finish()?,
        error: None,
    })
}

#[derive(Serialize)]
struct StatsRow {
    n: usize,
    variant: Variant,
    rounds: usize,
    p_h: f64,
    samples: usize,
    even_x: f64,
    even_y: f64,
    even_z: f64,
    even_any: f64,
    odd_x: f64,
    odd_y: f64,
    odd_z: f64,
    odd_any: f64,
    even_x_std: f64,
    even_y_std: f64,
    even_z_std: f64,
    odd_x_std: f64,
    odd_y_std: f64,
    odd_z_std: f64,
    central_site: usize,
    central_overlap_by_round: String,
    central_overlap_by_sublayer: String,
}

fn run_stats(config: &RunConfig, a: &StatsArgs) -> Result<Rendered, CliError> {
    let mut t = Table::new(config);
    for &p_h in &a.p_h {
        let s = check_support_stats(a.n, a.variant, a.rounds, p_h, a.trials, a.seed)?;
        t.push(&StatsRow {
            n: s.n,
            variant: s.variant,
            rounds: s.rounds,
            p_h,
            samples: s.samples,
            even_x: s.even.x,
            even_y: s.even.y,
            even_z: s.even.z,
            even_any: s.even.any,
            odd_x: s.odd.x,
            odd_y: s.odd.y,
            odd_z: s.odd.z,
            odd_any: s.odd.any,
            even_x_std: s.even_std.x,
            even_y_std: s.even_std.y,
            even_z_std: s.even_std.z,
            odd_x_std: s.odd_std.x,
            odd_y_std: s.odd_std.y,
            odd_z_std: s.odd_std.z,
            central_site: s.central_site,
            central_overlap_by_round: join(&s.central_overlap_by_round),
            central_overlap_by_sublayer: join(&s.central_overlap_by_sublayer),
        })?;
    }
    Ok(Rendered {
        text: t.finish()?,
        error: None,
    })
}

fn model_columns(m: ErasureModel) -> (&'static str, Option<f64>, Option<usize>) {
    match m {
        ErasureModel::Bernoulli { p } => ("bernoulli", Some(p), None),
        ErasureModel::FixedCount { count } => ("fixed_count", None, Some(count)),
    }
}

#[derive(Serialize)]
struct CurveRow {
    n: usize,
    variant: Variant,
    rounds: usize,
    depth: usize,
    p_h: f64,
    logical_fraction: f64,
    model: &'static str,
    p_e: Option<f64>,
    erasures: Option<usize>,
    trials: usize,
    successes: usize,
    mean: f64,
    ci_low: f64,
    ci_high: f64,
    hamming_limit: f64,
}

fn run_curve(config: &RunConfig, a: &CurveArgs) -> Result<Rendered, CliError> {
    let setup = EncoderSetup {
        spare_logical_sites: a.spare_logical_sites,
        ..EncoderSetup::new(a.n, a.variant, a.p_h, a.logical_fraction)
    };
    let models = a.erasure.models(&[0.05, 0.1, 0.15, 0.2, 0.25, 0.3]);
    let curve = recovery_curve(&setup, &a.rounds, &models, a.trials, a.seed)?;
    let mut t = Table::new(config);
    for p in &curve.points {
        let (model, p_e, erasures) = model_columns(p.erasure);
        t.push(&CurveRow {
            n: p.n,
            variant: a.variant,
            rounds: p.rounds,
            depth: p.depth,
            p_h: a.p_h,
            logical_fraction: a.logical_fraction,
            model,
            p_e,
            erasures,
            trials: p.trials,
            successes: p.successes,
            mean: p.mean,
            ci_low: p.ci_low,
            ci_high: p.ci_high,
            hamming_limit: curve.hamming_limit,
        })?;
    }
    Ok(Rendered {
        text: t.finish()?,
        error: None,
    })
}

#[derive(Serialize)]
struct ScalingRow {
    record: &'static str,
    n: Option<usize>,
    depth: Option<usize>,
    censored: Option<bool>,
    success_by_depth: String,
    longest_run_estimate: Option<f64>,
    slope: Option<f64>,
    intercept: Option<f64>,
    r_squared: Option<f64>,
    fitted_points: Option<usize>,
}

fn run_scaling(config: &RunConfig, a: &ScalingArgs) -> Result<Rendered, CliError> {
    let template = EncoderSetup {
        spare_logical_sites: a.spare_logical_sites,
        ..EncoderSetup::new(
            a.n.first().copied().unwrap_or(0),
            a.variant,
            a.p_h,
            a.logical_fraction,
        )
    };
    let model = match a.erasures {
        Some(count) => ErasureModel::FixedCount { count },
        None => ErasureModel::Bernoulli { p: a.p_e },
    };
    let fit = depth_to_target(
        &a.n,
        &template,
        model,
        a.target,
        a.trials,
        a.max_rounds,
        a.seed,
    )?;
    let mut t = Table::new(config);
    for p in &fit.points {
        t.push(&ScalingRow {
            record: "point",
            n: Some(p.n),
            depth: p.depth,
            censored: Some(p.depth.is_none()),
            success_by_depth: join(&p.success_by_depth),
            longest_run_estimate: p.longest_run_estimate,
            slope: None,
            intercept: None,
            r_squared: None,
            fitted_points: None,
        })?;
    }
    t.push(&ScalingRow {
        record: "fit",
        n: None,
        depth: None,
        censored: None,
        success_by_depth: String::new(),
        longest_run_estimate: None,
        slope: fit.fit.map(|f| f.slope),
        intercept: fit.fit.map(|f| f.intercept),
        r_squared: fit.fit.map(|f| f.r_squared),
        fitted_points: Some(fit.points.iter().filter(|p| p.depth.is_some()).count()),
    })?;
    Ok(Rendered {
        text: t.finish()?,
        error: None,
    })
}

#[derive(Serialize)]
struct SelftestRow {
    check: &'static str,
    pass: bool,
    detail: String,
}

fn selftest_checks(seed: u64) -> Result<Vec<SelftestRow>, Error> {
    let mut rows = Vec::new();

    let open = CodeSpec::new(10, Variant::Open, 1).build()?;
    let y1y2 = open.check(2)?.map(|c| c.to_string()).unwrap_or_default();
    rows.push(SelftestRow {
        check: "open_round_check_2",
        pass: y1y2 == "Y1 Y2",
        detail: y1y2,
    });

    let code = CodeSpec::new(10, Variant::Periodic, 2).build()?;
    let checks = code.checks();
    let mut all_ok = true;
    for e in crate::decode::weight_one_candidates(10) {
        let s = syndrome_of(&e, &checks)?;
        all_ok &= decode_single_error(&s, &code)? == e;
    }
    rows.push(SelftestRow {
        check: "single_error_decoding_n10",
        pass: all_ok,
        detail: "31 candidates".into(),
    });

    let tele = CodeSpec::new(8, Variant::Open, 1).build()?;
    let plan = plan_teleport(1, 8, &tele)?;
    let mut rng = substream(seed, [TAG_TELEPORT, 0, 0]);
    let mut worst = 1.0f64;
    for _ in 0..20 {
        let (a, b) = random_state(&mut rng);
        let out = run_teleport(&plan, &tele, a, b, &mut rng, Backend::Oracle)?;
        worst = worst.min(out.fidelity);
    }
    rows.push(SelftestRow {
        check: "teleport_n8_oracle",
        pass: (worst - 1.0).abs() < 1e-10,
        detail: format!("min fidelity {worst}"),
    });

    let frame = CodeSpec::new(8, Variant::Periodic, 2)
        .with_logical_sites(vec![1, 3])
        .build()?
        .frame()
        .clone();
    let mut agree = true;
    for a in 1..=8 {
        for b in a + 1..=8 {
            let e = ErasurePattern::new(8, [a, b])?;
            agree &= erasure_recoverable(&frame, &e)?.success
                == erasure_recoverable_brute_force(&frame, &e)?;
        }
    }
    rows.push(SelftestRow {
        check: "erasure_solver_vs_enumeration",
        pass: agree,
        detail: "all pairs at n=8".into(),
    });
    Ok(rows)
}

fn run_selftest(config: &RunConfig, a: &SelftestArgs) -> Result<Rendered, CliError> {
    let rows = selftest_checks(a.seed).map_err(|e| CliError::Runtime(e.to_string()))?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut t = Table::new(config);
    for r in &rows {
        t.push(r)?;
    }
    Ok(Rendered {
        text: t.finish()?,
        error: (failed > 0).then(|| CliError::Runtime(format!("{failed} self checks failed"))),
    })
}

/// Runs a config and returns the file contents it produces.
pub fn render(config: &RunConfig) -> Result<Rendered, CliError> {
    match config {
        RunConfig::Ops { params, .. } => run_ops(config, params),
        RunConfig::Decode { params, .. } => run_decode(config, params),
        RunConfig::Teleport { params, .. } => run_teleport_cmd(config, params),
        RunConfig::Stats { params, .. } => run_stats(config, params),
        RunConfig::RecoveryCurve { params, .. } => run_curve(config, params),
        RunConfig::DepthScaling { params, .. } => run_scaling(config, params),
        RunConfig::Selftest { params, .. } => run_selftest(config, params),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .next()
        .and_then(RunConfig::from_header)
        .ok_or_else(|| CliError::Config(format!("{} has no run header", path.display())))
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    macro_rules! cfg {
        ($variant:ident, $sink:expr) => {
            (
                RunConfig::$variant {
                    format: $sink.format,
                    params: $sink.params.clone(),
                },
                $sink.out.clone(),
            )
        };
    }
    let loaded = match &cli.command {
        Command::Ops(s) => Ok(cfg!(Ops, s)),
        Command::Decode(s) => Ok(cfg!(Decode, s)),
        Command::Teleport(s) => Ok(cfg!(Teleport, s)),
        Command::Stats(s) => Ok(cfg!(Stats, s)),
        Command::RecoveryCurve(s) => Ok(cfg!(RecoveryCurve, s)),
        Command::DepthScaling(s) => Ok(cfg!(DepthScaling, s)),
        Command::Selftest(s) => Ok(cfg!(Selftest, s)),
        Command::Replay(r) => load_config(&r.file).map(|c| (c, r.out.clone())),
    };
    let result = loaded.and_then(|(config, out)| {
        let rendered = render(&config)?;
        emit(&rendered.text, out.as_ref())?;
        rendered.error.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
