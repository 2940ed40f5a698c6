use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dampwave_core::experiments::*;
use dampwave_core::functionals::{EnergyReport, MonitorVerdict, VerdictStatus};
use dampwave_core::inequalities::*;
use dampwave_core::solver;
use dampwave_core::specfun::{kummer_m, kummer_m_derivative, KummerArgs};
use dampwave_core::weights::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{config, svg, CliError};

#[derive(Debug, Parser)]
#[command(name = "dampwave", version, about = "Weighted-energy experiments for the damped wave equation")]
pub struct Cli {
    /// Primary output file (standard output when omitted).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Manifest path; defaults to `<output>.manifest.json` or
    /// `dampwave-manifest.json`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one configuration and stream NDJSON energy reports.
    Simulate(SimulateArgs),
    /// Blowup times over a list of amplitudes, with the log-log fit (CSV).
    SweepLifespan(SweepArgs),
    /// Survival or blowup across exponents at one small amplitude (CSV).
    ScanDichotomy(ScanArgs),
    /// Log-log decay slope of one quantity in an NDJSON report file (CSV).
    FitDecay(FitArgs),
    /// One-dimensional decay fits above the exponent threshold (CSV).
    Theorem41(Theorem41Args),
    /// Certified bounds on `Φ_β Ψ^β`, or the identity self-test (JSON).
    VerifyWeights(WeightArgs),
    /// Randomized check of one functional inequality (JSON verdict).
    VerifyInequalities(InequalityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate(_) => "simulate",
            Self::SweepLifespan(_) => "sweep-lifespan",
            Self::ScanDichotomy(_) => "scan-dichotomy",
            Self::FitDecay(_) => "fit-decay",
            Self::Theorem41(_) => "theorem41",
            Self::VerifyWeights(_) => "verify-weights",
            Self::VerifyInequalities(_) => "verify-inequalities",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Also run the four weighted-energy monitors; a failure exits with 1.
    #[arg(long)]
    pub monitors: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long)]
    pub p: f64,
    /// Comma-separated amplitudes.
    #[arg(long, value_delimiter = ',', default_values_t = LIFESPAN_EPSILONS.to_vec())]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub t_max: f64,
    /// Relative slope tolerance.
    #[arg(long, default_value_t = 0.15)]
    pub tol: f64,
    /// Optional log-log plot of `T_*` against `ε`.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_list: Vec<f64>,
    /// Amplitude; found by halving from 1 at the largest exponent when
    /// omitted.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// NDJSON reports, as written by `simulate`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub quantity: String,
    /// Fit window `lo,hi` in time.
    #[arg(long, value_delimiter = ',', default_values_t = [50.0, 400.0])]
    pub window: Vec<f64>,
    /// Expected slope; when given, a miss by more than `tol` exits with 1.
    #[arg(long, allow_negative_numbers = true)]
    pub expect: Option<f64>,
    #[arg(long, default_value_t = DECAY_SLOPE_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem41Args {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    #[arg(long, default_value_t = 400.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub report_every: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [50.0, 400.0])]
    pub window: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightArgs {
    /// Check the special-function and weight identities instead.
    #[arg(long, conflicts_with_all = ["dim", "beta"])]
    pub selftest: bool,
    #[arg(long, required_unless_present = "selftest")]
    pub dim: Option<usize>,
    #[arg(long, required_unless_present = "selftest")]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    /// Seeded random points added to the tensor grid.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    Hardy,
    Gn,
    Wgn,
    Ibp,
}

#[derive(Debug, Args, Serialize)]
pub struct InequalityArgs {
    #[arg(long, value_enum)]
    pub lemma: Lemma,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Time at which the weights are evaluated (Hardy and IBP).
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
}

/// Result of one subcommand, before the manifest is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Resolved inputs; hashed into the manifest.
    pub inputs: Value,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub summary: Value,
    /// Set when a check failed; the run still produced its outputs.
    pub failure: Option<String>,
}

struct Sink {
    out: BufWriter<Box<dyn Write>>,
    name: String,
}

impl Sink {
    fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let (out, name): (Box<dyn Write>, String) = match path {
            Some(p) => (
                Box::new(File::create(p).map_err(|e| CliError::io(p, e))?),
                p.display().to_string(),
            ),
            None => (Box::new(io::stdout().lock()), "-".into()),
        };
        Ok(Self {
            out: BufWriter::new(out),
            name,
        })
    }

    fn line(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.out, "{text}").map_err(|e| CliError::io(&self.name, e))
    }

    fn finish(mut self) -> Result<String, CliError> {
        self.out.flush().map_err(|e| CliError::io(&self.name, e))?;
        Ok(self.name)
    }
}

/// CSV number: shortest round-trip form, exponent notation at the extremes.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn inputs_of<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn write_svg(path: &Path, content: &str) -> Result<String, CliError> {
    std::fs::write(path, content).map_err(|e| CliError::io(path, e))?;
    Ok(path.display().to_string())
}

fn window_of(v: &[f64]) -> Result<(f64, f64), CliError> {
    match v {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(CliError::Usage(format!("window must be lo,hi with lo < hi, got {v:?}"))),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::SweepLifespan(a) => sweep_lifespan(a, out),
        Command::ScanDichotomy(a) => scan_dichotomy(a, out),
        Command::FitDecay(a) => fit(a, out),
        Command::Theorem41(a) => theorem41(a, out),
        Command::VerifyWeights(a) => verify_weights(a, out),
        Command::VerifyInequalities(a) => verify_inequalities(a, out),
    }
}

fn simulate(args: &SimulateArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    let resolved = config::parse_config(&args.config)?;
    let sim = &resolved.sim;
    let (reports, record) = solver::run(sim)?;
    let mut sink = Sink::open(out)?;
    for r in &reports {
        sink.line(&serde_json::to_string(r).expect("report serializes"))?;
    }
    let outputs = vec![sink.finish()?];
    let mut summary = json!({
        "reports": reports.len(),
        "t_blowup": record.blew_up().then_some(record.t_blowup),
        "refined_agreement": record.refined_agreement,
    });
    let mut failure = None;
    if args.monitors {
        let verdicts = run_monitors(&reports, sim)?;
        let mut failed = Vec::new();
        let listed: Vec<Value> = verdicts
            .iter()
            .zip(["lemma32", "lemma33", "equivalence", "wee"])
            .map(|(v, name)| match v {
                Ok(v) if v.status != VerdictStatus::Fail => json!(v),
                Ok(v) => {
                    failed.push(name);
                    json!(v)
                }
                Err(e) => {
                    failed.push(name);
                    json!({ "name": name, "error": e.to_string() })
                }
            })
            .collect();
        summary["monitors"] = Value::Array(listed);
        if !failed.is_empty() {
            failure = Some(format!("monitors failed: {}", failed.join(", ")));
        }
    }
    Ok(Outcome {
        // The file path is left out so that moved configs keep their hash.
        inputs: json!({ "monitors": args.monitors, "config": resolved }),
        seed: resolved.seed,
        outputs,
        summary,
        failure,
    })
}

fn sweep_lifespan(args: &SweepArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    let disc = Discretization {
        h: args.h,
        tau: args.tau,
        t_max: args.t_max,
        report_every: args.t_max,
    };
    let base = lifespan_preset(args.dim, args.lambda, args.p, disc)?;
    let (records, fit) = lifespan_sweep(&base, &args.epsilons)?;
    let mut sink = Sink::open(out)?;
    sink.line("epsilon,t_blowup,refined_agreement,h,tau")?;
    for r in &records {
        let agreement = r.refined_agreement.map(num).unwrap_or_default();
        sink.line(&format!("{},{},{agreement},{},{}", num(r.epsilon), num(r.t_blowup), num(r.h), num(r.tau)))?;
    }
    let mut outputs = vec![sink.finish()?];
    let expected = lifespan_exponent(args.dim, args.lambda, args.p);
    let rel = (fit.slope / expected - 1.0).abs();
    let worst_agreement = records.iter().filter_map(|r| r.refined_agreement).fold(0.0, f64::max);
    let mut problems = Vec::new();
    if !(rel <= args.tol) {
        problems.push(format!("slope {:.4} is {:.1}% off {expected:.4}", fit.slope, 100.0 * rel));
    }
    if !(fit.r_squared >= 0.95) {
        problems.push(format!("r² = {:.4} below 0.95", fit.r_squared));
    }
    if !(worst_agreement < 0.1) {
        problems.push(format!("refined blowup times differ by {:.1}%", 100.0 * worst_agreement));
    }
    if let Some(path) = &args.svg {
        let pts: Vec<(f64, f64)> = records.iter().filter(|r| r.blew_up()).map(|r| (r.epsilon, r.t_blowup)).collect();
        let plot = svg::loglog("lifespan", "epsilon", "T*", &pts, Some((fit.slope, fit.intercept)));
        outputs.push(write_svg(path, &plot)?);
    }
    Ok(Outcome {
        inputs: inputs_of(args),
        seed: 0,
        outputs,
        summary: json!({
            "fit": fit,
            "expected_slope": expected,
            "relative_error": rel,
            "max_refined_agreement": worst_agreement,
        }),
        failure: (!problems.is_empty()).then(|| problems.join("; ")),
    })
}

fn scan_dichotomy(args: &ScanArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => {
            let top = args.p_list.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            find_small_epsilon(&dichotomy_preset(args.dim, args.lambda, top, 1.0)?, 12)?
        }
    };
    let scan = dichotomy_scan(args.dim, args.lambda, &args.p_list, epsilon)?;
    let mut sink = Sink::open(out)?;
    sink.line("p,verdict,t_blowup,initial_m_lambda,max_m_lambda")?;
    for i in 0..scan.p_values.len() {
        let verdict = match scan.verdicts[i] {
            ScanVerdict::Survived => "survived",
            ScanVerdict::BlewUp => "blew_up",
        };
        sink.line(&format!(
            "{},{verdict},{},{},{}",
            num(scan.p_values[i]),
            num(scan.t_blowup[i]),
            num(scan.initial_m_lambda[i]),
            num(scan.max_m_lambda[i])
        ))?;
    }
    let monotone = scan.is_monotone();
    Ok(Outcome {
        inputs: inputs_of(args),
        seed: 0,
        outputs: vec![sink.finish()?],
        summary: json!({ "epsilon": epsilon, "p_c": scan.p_c, "monotone": monotone }),
        failure: (!monotone).then(|| "verdicts are not monotone in p".to_string()),
    })
}

fn read_reports(path: &Path) -> Result<Vec<EnergyReport>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Input {
                path: path.display().to_string(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn fit(args: &FitArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    if EnergyReport::default().quantity(&args.quantity).is_none() {
        return Err(CliError::Usage(format!(
            "unknown quantity {:?}; expected one of {}",
            args.quantity,
            dampwave_core::functionals::QUANTITY_NAMES.join(", ")
        )));
    }
    let window = window_of(&args.window)?;
    let series = read_reports(&args.input)?;
    let f = fit_decay(&series, &args.quantity, window)?;
    let mut sink = Sink::open(out)?;
    sink.line("quantity,slope,intercept,r_squared,window_lo,window_hi")?;
    sink.line(&format!(
        "{},{},{},{},{},{}",
        args.quantity,
        num(f.slope),
        num(f.intercept),
        num(f.r_squared),
        num(window.0),
        num(window.1)
    ))?;
    let mut outputs = vec![sink.finish()?];
    if let Some(path) = &args.svg {
        let pts: Vec<(f64, f64)> = series
            .iter()
            .filter(|r| r.t >= window.0 && r.t <= window.1)
            .filter_map(|r| Some((1.0 + r.t, r.quantity(&args.quantity)?)))
            .collect();
        let plot = svg::loglog(&args.quantity, "1 + t", &args.quantity, &pts, Some((f.slope, f.intercept)));
        outputs.push(write_svg(path, &plot)?);
    }
    let failure = args
        .expect
        .filter(|want| !((f.slope - want).abs() <= args.tol))
        .map(|want| format!("slope {:.4} outside {want} ± {}", f.slope, args.tol));
    Ok(Outcome {
        inputs: json!({ "args": inputs_of(args), "series_hash": crate::manifest::hash_inputs(&json!(series)) }),
        seed: 0,
        outputs,
        summary: json!({ "fit": f }),
        failure,
    })
}

fn theorem41(args: &Theorem41Args, out: Option<&Path>) -> Result<Outcome, CliError> {
    let disc = Discretization {
        h: args.h,
        tau: args.tau,
        t_max: args.t_max,
        report_every: args.report_every,
    };
    let report = theorem41_check(args.lambda, args.p, disc, window_of(&args.window)?)?;
    let rows = [
        ("energy", &report.energy_fit, -args.lambda - 1.0),
        ("l2", &report.mass_fit, -args.lambda),
        ("weighted_energy", &report.weighted_energy_fit, -1.0),
        ("weighted_mass", &report.weighted_mass_fit, 0.0),
    ];
    let mut sink = Sink::open(out)?;
    sink.line("quantity,slope,r_squared,bound,passed")?;
    let mut failed = Vec::new();
    for (name, f, rate) in rows {
        let bound = rate + DECAY_SLOPE_TOL;
        let ok = f.slope <= bound;
        if !ok {
            failed.push(name);
        }
        sink.line(&format!("{name},{},{},{},{ok}", num(f.slope), num(f.r_squared), num(bound)))?;
    }
    let failure = if !failed.is_empty() {
        Some(format!("decay fits above bound: {}", failed.join(", ")))
    } else if !report.passed {
        Some("modified line energy went negative".to_string())
    } else {
        None
    };
    Ok(Outcome {
        inputs: inputs_of(args),
        seed: 0,
        outputs: vec![sink.finish()?],
        summary: json!(report),
        failure,
    })
}

#[derive(Debug, Serialize)]
struct IdentityCheck {
    name: String,
    max_error: f64,
    tolerance: f64,
    passed: bool,
}

fn check(name: &str, errors: impl Iterator<Item = f64>, tolerance: f64) -> IdentityCheck {
    // NaN propagates through `max` as a failure.
    let max_error = errors.fold(0.0_f64, |m, e| if e.is_nan() || m.is_nan() { f64::NAN } else { m.max(e) });
    IdentityCheck {
        name: name.into(),
        max_error,
        tolerance,
        passed: max_error <= tolerance,
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
}

/// Kummer and weight identities on fixed parameter grids.
fn selftest() -> Result<Vec<IdentityCheck>, CliError> {
    let m = |a: f64, c: f64, z: f64| -> Result<f64, CliError> {
        Ok(kummer_m(KummerArgs::new(a, c, z).map_err(WeightError::from)?).map_err(WeightError::from)?)
    };
    let mut transform = Vec::new();
    let mut diagonal = Vec::new();
    let mut zero = Vec::new();
    let mut derivative = Vec::new();
    for a in [-2.5, -0.3, 0.7, 3.1] {
        for c in [0.5, 1.5, 4.0] {
            for z in [-15.0, -3.0, 0.5, 8.0, 19.0] {
                let v = m(a, c, z)?;
                transform.push((v - z.exp() * m(c - a, c, -z)?).abs() / (1.0 + v.abs()));
                diagonal.push((m(c, c, z)? / z.exp() - 1.0).abs());
                zero.push((m(0.0, c, z)? - 1.0).abs());
                let d = kummer_m_derivative(KummerArgs::new(a, c, z).map_err(WeightError::from)?)
                    .map_err(WeightError::from)?;
                let shifted = a / c * m(a + 1.0, c + 1.0, z)?;
                derivative.push((d - shifted).abs() / d.abs().max(shifted.abs()).max(1e-300));
            }
        }
    }
    let mut heat = Vec::new();
    let mut shift = Vec::new();
    for (dim, beta) in [(2usize, 0.5), (3, 1.2), (1, 0.4)] {
        let params = WeightParams::new(dim, 0.0, 1.0)?;
        for r in log_grid(-2.0, 2.5, 20) {
            for t in log_grid(-2.0, 3.0, 20) {
                let phi = phi_beta_radial(r, t, beta, &params)?;
                let (dt, lap, _) = phi_beta_derivatives_radial(r, t, beta, &params)?;
                let next = phi_beta_radial(r, t, beta + 1.0, &params)?;
                heat.push((dt - lap).abs() / phi.abs());
                shift.push((dt + beta * next).abs() / dt.abs().max((beta * next).abs()));
            }
        }
    }
    Ok(vec![
        check("kummer_transformation", transform.into_iter(), 1e-10),
        check("kummer_diagonal", diagonal.into_iter(), 1e-10),
        check("kummer_zero_a", zero.into_iter(), 0.0),
        check("kummer_derivative", derivative.into_iter(), 1e-10),
        check("heat_residual", heat.into_iter(), 1e-8),
        check("index_shift", shift.into_iter(), 1e-9),
    ])
}

fn verify_weights(args: &WeightArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    let mut sink = Sink::open(out)?;
    let (summary, failure) = if args.selftest {
        let checks = selftest()?;
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let passed = failed.is_empty();
        let body = json!({ "selftest": checks, "passed": passed });
        sink.line(&body.to_string())?;
        (body, (!passed).then(|| format!("identities failed: {}", failed.join(", "))))
    } else {
        let (dim, beta) = (args.dim.unwrap_or(0), args.beta.unwrap_or(f64::NAN));
        let params = WeightParams::new(dim, 0.0, args.t0)?;
        let sampler = BoundSampler {
            seed: args.seed,
            random_samples: args.samples,
            t0_values: vec![args.t0],
            ..BoundSampler::default()
        };
        let bounds = certify_bounds(beta, &params, &sampler)?;
        let body = json!(bounds);
        sink.line(&body.to_string())?;
        (body, None)
    };
    Ok(Outcome {
        inputs: inputs_of(args),
        seed: args.seed,
        outputs: vec![sink.finish()?],
        summary,
        failure,
    })
}

fn verify_inequalities(args: &InequalityArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    let verdict: MonitorVerdict = match args.lemma {
        Lemma::Hardy => {
            // Ψ depends only on t₀, so the family's own λ is irrelevant here
            // and the Hardy exponent may leave [0, N/2).
            let params = WeightParams::new(args.dim, 0.0, args.t0)?;
            hardy_suite(args.dim, args.lambda, args.t, &params, args.trials, args.seed)?
        }
        Lemma::Gn => {
            let mut v = gn_dilation_suite(args.dim, args.p, &[0.5, 2.0], args.trials, args.seed)?;
            let c = estimate_c_gn(args.dim, args.p, args.trials, args.seed)?;
            v.extras.insert("C_GN".into(), c.value);
            v
        }
        Lemma::Wgn => {
            let params = WeightParams::new(args.dim, args.lambda, args.t0)?;
            let c = estimate_c_gn(args.dim, args.p, args.trials, args.seed)?;
            let mut v = weighted_gn_suite(
                args.dim,
                args.p,
                args.lambda,
                &[0.0, 10.0, 100.0],
                &params,
                args.trials,
                args.seed,
                c.value,
            )?;
            v.extras.insert("C_GN".into(), c.value);
            v
        }
        Lemma::Ibp => {
            let params = WeightParams::new(args.dim, args.lambda, args.t0)?;
            ibp_suite(args.dim, params.beta, params.delta, &params, args.trials, args.seed)?
        }
    };
    let mut sink = Sink::open(out)?;
    let body = json!(verdict);
    sink.line(&body.to_string())?;
    let failure = (verdict.status == VerdictStatus::Fail).then(|| format!("{} failed", verdict.name));
    Ok(Outcome {
        inputs: inputs_of(args),
        seed: args.seed,
        outputs: vec![sink.finish()?],
        summary: body,
        failure,
    })
}
