//! Decay fits, lifespan sweeps, the critical-exponent scan and the presets
//! that drive them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::{
    check_equivalence, check_lemma32, check_lemma33_with, check_wee, equivalence_t0, proposition_nu, EnergyReport,
    Lemma33Constants, MonitorError, MonitorVerdict,
};
use crate::grid::Geometry;
use crate::solver::{
    run_with, DomainSpec, InitialData, InitialProfile, LifespanRecord, NonlinearityKind, NonlinearitySpec, RunOptions,
    SimConfig, SolverError, DEFAULT_BLOWUP_THRESHOLD,
};
use crate::weights::{BoundSampler, WeightError, WeightParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("sweep inconclusive: only {finite} finite blowup times")]
    SweepInconclusive { finite: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParameter(msg.into())
}

/// Least-squares line through `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Interval of the independent variable (time or ε) the fit used.
    pub window: (f64, f64),
}

/// Ordinary least squares. The window is the range of `xs`.
///
/// Degenerate inputs (fewer than two points or all `x` equal) give a NaN
/// slope; callers check their own minimum counts.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> FitResult {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    FitResult {
        slope,
        intercept: my - slope * mx,
        r_squared,
        window: (lo, hi),
    }
}

/// Slope of `log q` against `log(1+t)` over reports with `t ∈ window`.
pub fn fit_decay(series: &[EnergyReport], quantity: &str, window: (f64, f64)) -> Result<FitResult, ExperimentError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in series.iter().filter(|r| r.t >= window.0 && r.t <= window.1) {
        let q = r
            .quantity(quantity)
            .ok_or_else(|| ExperimentError::InsufficientData(format!("unknown quantity {quantity}")))?;
        if !(q > 0.0) {
            return Err(ExperimentError::InsufficientData(format!(
                "{quantity} = {q} is not positive at t = {}",
                r.t
            )));
        }
        xs.push((1.0 + r.t).ln());
        ys.push(q.ln());
    }
    if xs.len() < 10 {
        return Err(ExperimentError::InsufficientData(format!(
            "{} reports in window [{}, {}], need 10",
            xs.len(),
            window.0,
            window.1
        )));
    }
    let mut fit = linear_fit(&xs, &ys);
    fit.window = window;
    Ok(fit)
}

/// `p_c = 1 + 4/(N + 2λ)`.
pub fn critical_exponent(dim: usize, lambda: f64) -> f64 {
    1.0 + 4.0 / (dim as f64 + 2.0 * lambda)
}

/// Predicted slope of `log T_*` against `log ε`:
/// `−1/(1/(p−1) − (N+2λ)/4)`.
pub fn lifespan_exponent(dim: usize, lambda: f64, p: f64) -> f64 {
    -1.0 / (1.0 / (p - 1.0) - (dim as f64 + 2.0 * lambda) / 4.0)
}

/// Resolution and horizon shared by the presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub h: f64,
    pub tau: f64,
    pub t_max: f64,
    /// Time between reports.
    pub report_every: f64,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            h: 0.05,
            tau: 0.025,
            t_max: 100.0,
            report_every: 1.0,
        }
    }
}

/// Line for `N = 1`, exterior of the unit ball otherwise, with the outer
/// radius sized by the propagation-cone rule.
pub fn standard_config(
    dim: usize,
    weight: WeightParams,
    nonlinearity: NonlinearitySpec,
    initial_data: InitialData,
    disc: Discretization,
) -> Result<SimConfig, ExperimentError> {
    let geometry = if dim == 1 {
        Geometry::FullLine
    } else {
        Geometry::RadialExterior { r_in: 1.0 }
    };
    let stride = ((disc.report_every / disc.tau).round() as usize).max(1);
    let config = SimConfig {
        domain: DomainSpec {
            dim,
            geometry,
            r_outer: SimConfig::required_r_outer(&initial_data, disc.t_max, disc.h),
            h: disc.h,
        },
        nonlinearity,
        weight,
        initial_data,
        tau: disc.tau,
        t_max: disc.t_max,
        blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
        output_stride: stride,
    };
    config.validate()?;
    Ok(config)
}

fn survives(config: &SimConfig) -> Result<bool, ExperimentError> {
    let options = RunOptions {
        reports: false,
        refine_on_blowup: false,
        ..RunOptions::default()
    };
    Ok(!run_with(config, options)?.1.blew_up())
}

/// Runs `base` at each `ε` (in parallel) and fits `log T_*` against `log ε`.
///
/// Each blowup is rerun at half resolution to fill `refined_agreement`.
pub fn lifespan_sweep(base: &SimConfig, epsilons: &[f64]) -> Result<(Vec<LifespanRecord>, FitResult), ExperimentError> {
    if epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(invalid("sweep amplitudes must be positive"));
    }
    let options = RunOptions {
        reports: false,
        ..RunOptions::default()
    };
    let records: Vec<LifespanRecord> = epsilons
        .par_iter()
        .map(|&eps| {
            let mut c = base.clone();
            c.initial_data.epsilon = eps;
            run_with(&c, options).map(|(_, rec)| rec)
        })
        .collect::<Result<_, _>>()?;
    let finite: Vec<&LifespanRecord> = records.iter().filter(|r| r.blew_up()).collect();
    if finite.len() < 4 {
        return Err(ExperimentError::SweepInconclusive { finite: finite.len() });
    }
    let xs: Vec<f64> = finite.iter().map(|r| r.epsilon.ln()).collect();
    let ys: Vec<f64> = finite.iter().map(|r| r.t_blowup.ln()).collect();
    let mut fit = linear_fit(&xs, &ys);
    fit.window = (fit.window.0.exp(), fit.window.1.exp());
    Ok((records, fit))
}

/// Amplitudes used by the lifespan acceptance sweep.
///
/// Above `ε ≈ 10⁻²` the blowup happens before the data has spread, so the
/// lifespan follows the ODE scaling instead of the diffusive one.
pub const LIFESPAN_EPSILONS: [f64; 5] = [2e-3, 1e-3, 5e-4, 2.5e-4, 1.25e-4];

/// Borderline data `εΦ_β(·, 0)` with `β = (N+2λ)/4`, cut at `r_cut = 300`,
/// and an absolute-power source: the setting of the lifespan lower bound.
///
/// The heat profile decays like `|x|^{−(N/2+λ)}` and starts on the
/// self-similar linear flow, which removes most of the transient that plain
/// `⟨x⟩^{−(N/2+λ)}` data carries into the fitted slope.
pub fn lifespan_preset(dim: usize, lambda: f64, p: f64, disc: Discretization) -> Result<SimConfig, ExperimentError> {
    if !(p > 1.0 && p < critical_exponent(dim, lambda)) {
        return Err(invalid(format!(
            "lifespan sweep needs 1 < p < p_c = {}",
            critical_exponent(dim, lambda)
        )));
    }
    let data = InitialData {
        profile: InitialProfile::SelfSimilar {
            beta: (dim as f64 + 2.0 * lambda) / 4.0,
            r_cut: 300.0,
        },
        epsilon: LIFESPAN_EPSILONS[0],
        u1_factor: 0.0,
    };
    let weight = WeightParams::new(dim, lambda, 1.0)?;
    standard_config(
        dim,
        weight,
        NonlinearitySpec::new(NonlinearityKind::AbsolutePower, p),
        data,
        disc,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    Survived,
    BlewUp,
}

/// Survival or blowup at each `p` for one small amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyScan {
    pub dim: usize,
    pub lambda: f64,
    pub epsilon: f64,
    pub p_values: Vec<f64>,
    pub verdicts: Vec<ScanVerdict>,
    /// Largest `m_λ` over the run (reports up to blowup).
    pub max_m_lambda: Vec<f64>,
    /// `m_λ` of the initial data.
    pub initial_m_lambda: Vec<f64>,
    /// Blowup time, `+∞` for survivors.
    pub t_blowup: Vec<f64>,
    pub p_c: f64,
}

impl DichotomyScan {
    /// No `survived` followed by `blew_up` as `p` increases.
    pub fn is_monotone(&self) -> bool {
        let mut order: Vec<usize> = (0..self.p_values.len()).collect();
        order.sort_by(|&a, &b| self.p_values[a].total_cmp(&self.p_values[b]));
        let mut seen_survivor = false;
        for i in order {
            match self.verdicts[i] {
                ScanVerdict::Survived => seen_survivor = true,
                ScanVerdict::BlewUp if seen_survivor => return false,
                ScanVerdict::BlewUp => {}
            }
        }
        true
    }

    /// `max m_λ / m_λ(0)` at exponent `p`.
    pub fn growth_at(&self, p: f64) -> Option<f64> {
        let i = self.p_values.iter().position(|&q| q == p)?;
        Some(self.max_m_lambda[i] / self.initial_m_lambda[i])
    }

    pub fn verdict_at(&self, p: f64) -> Option<ScanVerdict> {
        self.p_values.iter().position(|&q| q == p).map(|i| self.verdicts[i])
    }
}

/// Positive tail data `ε⟨x⟩^{−(N/2+λ+1/4)}` cut at `r_cut = 50`, absolute
/// power source, horizon 200. `λ = N/2` is accepted since the scan only
/// measures `m_λ`.
pub fn dichotomy_preset(dim: usize, lambda: f64, p: f64, epsilon: f64) -> Result<SimConfig, ExperimentError> {
    let data = InitialData {
        profile: InitialProfile::PolyTail {
            mu: dim as f64 / 2.0 + lambda + 0.25,
            r_cut: 50.0,
        },
        epsilon,
        u1_factor: 0.0,
    };
    let disc = Discretization {
        h: 0.1,
        tau: 0.05,
        t_max: 200.0,
        report_every: 2.0,
    };
    standard_config(
        dim,
        WeightParams::closed(dim, lambda, 1.0)?,
        NonlinearitySpec::new(NonlinearityKind::AbsolutePower, p),
        data,
        disc,
    )
}

/// [`dichotomy_scan_with`] on [`dichotomy_preset`] data.
pub fn dichotomy_scan(dim: usize, lambda: f64, p_list: &[f64], epsilon: f64) -> Result<DichotomyScan, ExperimentError> {
    let base = dichotomy_preset(dim, lambda, p_list.first().copied().unwrap_or(2.0), epsilon)?;
    dichotomy_scan_with(&base, p_list)
}

/// Runs `base` once per exponent in parallel; ambiguous cells are reported
/// as they come out.
pub fn dichotomy_scan_with(base: &SimConfig, p_list: &[f64]) -> Result<DichotomyScan, ExperimentError> {
    if p_list.is_empty() {
        return Err(invalid("empty exponent list"));
    }
    let options = RunOptions {
        refine_on_blowup: false,
        ..RunOptions::default()
    };
    let results: Vec<(ScanVerdict, f64, f64, f64)> = p_list
        .par_iter()
        .map(|&p| {
            let mut c = base.clone();
            c.nonlinearity = NonlinearitySpec::new(base.nonlinearity.kind, p);
            c.validate()?;
            let (reports, rec) = run_with(&c, options)?;
            let m = reports.iter().map(|r| r.m_lambda).fold(0.0, f64::max);
            let m0 = reports.first().map_or(f64::NAN, |r| r.m_lambda);
            let v = if rec.blew_up() {
                ScanVerdict::BlewUp
            } else {
                ScanVerdict::Survived
            };
            Ok((v, m, rec.t_blowup, m0))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let (dim, lambda) = (base.domain.dim, base.weight.lambda);
    Ok(DichotomyScan {
        dim,
        lambda,
        epsilon: base.initial_data.epsilon,
        p_values: p_list.to_vec(),
        verdicts: results.iter().map(|r| r.0).collect(),
        max_m_lambda: results.iter().map(|r| r.1).collect(),
        initial_m_lambda: results.iter().map(|r| r.3).collect(),
        t_blowup: results.iter().map(|r| r.2).collect(),
        p_c: critical_exponent(dim, lambda),
    })
}

/// Halves `ε` from 1 until `base` survives to its horizon, then halves once
/// more.
pub fn find_small_epsilon(base: &SimConfig, max_halvings: usize) -> Result<f64, ExperimentError> {
    let mut eps = 1.0;
    for _ in 0..=max_halvings {
        let mut c = base.clone();
        c.initial_data.epsilon = eps;
        if survives(&c)? {
            return Ok(eps / 2.0);
        }
        eps /= 2.0;
    }
    Err(ExperimentError::InsufficientData(format!(
        "no surviving amplitude after {max_halvings} halvings"
    )))
}

/// Global-existence preset for polynomially decaying data measured in the
/// `⟨x⟩^N` weight.
///
/// `λ` is the midpoint of `[max(2/(p−1) − N/2, 0), N/2)`, which makes
/// `p ≥ 1 + 4/(N+2λ)`. The data decays like `⟨x⟩^{−(N+1/2)}`, so its
/// `⟨x⟩^N`-weighted norm is finite.
pub fn corollary_preset(dim: usize, p: f64) -> Result<SimConfig, ExperimentError> {
    let n = dim as f64;
    let lower = 1.0 + 2.0 / n;
    if !(p > lower) {
        return Err(invalid(format!("p = {p} must exceed 1 + 2/N = {lower}")));
    }
    if dim >= 3 && p > n / (n - 2.0) {
        return Err(invalid(format!("p = {p} exceeds N/(N-2) = {}", n / (n - 2.0))));
    }
    let lo = (2.0 / (p - 1.0) - n / 2.0).max(0.0);
    let lambda = 0.5 * (lo + n / 2.0);
    if p < critical_exponent(dim, lambda) {
        return Err(invalid(format!("p = {p} below p_c at lambda = {lambda}")));
    }
    let data = InitialData {
        profile: InitialProfile::PolyTail {
            mu: n + 0.5,
            r_cut: 20.0,
        },
        epsilon: 0.1,
        u1_factor: 0.0,
    };
    standard_config(
        dim,
        WeightParams::new(dim, lambda, 1.0)?,
        NonlinearitySpec::new(NonlinearityKind::OddPower, p),
        data,
        Discretization::default(),
    )
}

/// `1 + 4/(1+2λ)`, the exponent threshold in one dimension.
pub fn theorem41_threshold(lambda: f64) -> f64 {
    1.0 + 4.0 / (1.0 + 2.0 * lambda)
}

/// Outcome of the one-dimensional decay check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem41Report {
    pub lambda: f64,
    pub p: f64,
    pub threshold: f64,
    pub epsilon: f64,
    /// `∫(|∂ₓu|²+|∂ₜu|²)`, bound `−λ−1+0.15`.
    pub energy_fit: FitResult,
    /// `∫u²`, bound `−λ+0.15`.
    pub mass_fit: FitResult,
    /// Same energy with weight `(1+t+x²)^λ`, bound `−1+0.15`.
    pub weighted_energy_fit: FitResult,
    /// Same mass with weight `(1+t+x²)^λ`, bound `0.15`.
    pub weighted_mass_fit: FitResult,
    /// Smallest `Ẽ_λ` built on the modified weight, over the run.
    pub min_e_tilde_1d: f64,
    pub passed: bool,
}

/// Slope allowance on every decay fit.
pub const DECAY_SLOPE_TOL: f64 = 0.15;

/// Odd-power 1-D data `εΦ_β(·, 0)` with `β = 1/4 + λ/2 + 1/20`, cut at
/// `r_cut = 400`, `ε = 1/2`.
///
/// The profile decays like `|x|^{−(1/2+λ+1/10)}`, just inside the weighted
/// space, and its linear flow decays at the rates `−λ−1.1` and `−λ−0.1`
/// from the start. Plain `⟨x⟩^{−μ}` data needs far longer horizons to shed
/// its transient.
pub fn theorem41_preset(lambda: f64, p: f64, disc: Discretization) -> Result<SimConfig, ExperimentError> {
    if !(0.0..0.5).contains(&lambda) {
        return Err(invalid(format!("lambda = {lambda} outside [0, 1/2)")));
    }
    let threshold = theorem41_threshold(lambda);
    if !(p > threshold) {
        return Err(invalid(format!(
            "p = {p} must exceed 1 + 4/(1+2λ) = {threshold} strictly"
        )));
    }
    let data = InitialData {
        profile: InitialProfile::SelfSimilar {
            beta: 0.3 + 0.5 * lambda,
            r_cut: 400.0,
        },
        epsilon: 0.5,
        u1_factor: 0.0,
    };
    standard_config(
        1,
        WeightParams::new(1, lambda, 1.0)?,
        NonlinearitySpec::new(NonlinearityKind::OddPower, p),
        data,
        disc,
    )
}

/// Runs [`theorem41_preset`] and fits both decay groups over `window`.
pub fn theorem41_check(lambda: f64, p: f64, disc: Discretization, window: (f64, f64)) -> Result<Theorem41Report, ExperimentError> {
    let config = theorem41_preset(lambda, p, disc)?;
    theorem41_check_with(&config, window)
}

pub fn theorem41_check_with(config: &SimConfig, window: (f64, f64)) -> Result<Theorem41Report, ExperimentError> {
    let (lambda, p) = (config.weight.lambda, config.nonlinearity.p);
    if config.domain.dim != 1 {
        return Err(invalid("the one-dimensional check needs N = 1"));
    }
    if !(p > theorem41_threshold(lambda)) {
        return Err(invalid(format!("p = {p} must exceed {}", theorem41_threshold(lambda))));
    }
    let (series, record) = run_with(
        config,
        RunOptions {
            refine_on_blowup: false,
            ..RunOptions::default()
        },
    )?;
    if record.blew_up() {
        return Err(ExperimentError::Solver(SolverError::BlowupDetected { t: record.t_blowup }));
    }
    let energy_fit = fit_decay(&series, "energy", window)?;
    let mass_fit = fit_decay(&series, "l2", window)?;
    let weighted_energy_fit = fit_decay(&series, "theorem_energy", window)?;
    let weighted_mass_fit = fit_decay(&series, "theorem_mass", window)?;
    let min_e_tilde_1d = series
        .iter()
        .filter_map(|r| r.e_tilde_1d)
        .fold(f64::INFINITY, f64::min);
    let passed = energy_fit.slope <= -lambda - 1.0 + DECAY_SLOPE_TOL
        && mass_fit.slope <= -lambda + DECAY_SLOPE_TOL
        && weighted_energy_fit.slope <= -1.0 + DECAY_SLOPE_TOL
        && weighted_mass_fit.slope <= DECAY_SLOPE_TOL;
    Ok(Theorem41Report {
        lambda,
        p,
        threshold: theorem41_threshold(lambda),
        epsilon: config.initial_data.epsilon,
        energy_fit,
        mass_fit,
        weighted_energy_fit,
        weighted_mass_fit,
        min_e_tilde_1d,
        passed,
    })
}

/// Linear run on borderline data: the self-similar heat profile with
/// `β = N/4 + λ/2`, whose tail `|x|^{−(N/2+λ)}` just misses the
/// `⟨x⟩^{2λ}`-weighted class. Its unweighted energy and mass decay like
/// `t^{−λ−1}` and `t^{−λ}`.
///
/// Plain `⟨x⟩^{−(N/2+λ)}` data reaches the same rates only after
/// corrections of relative size `t^{−(N/2−λ)/2}` have died out, which for
/// `λ` near `N/2` is far beyond any practical horizon.
pub fn linear_decay_preset(dim: usize, lambda: f64, r_cut: f64, disc: Discretization) -> Result<SimConfig, ExperimentError> {
    let data = InitialData {
        profile: InitialProfile::SelfSimilar {
            beta: dim as f64 / 4.0 + lambda / 2.0,
            r_cut,
        },
        epsilon: 1.0,
        u1_factor: 0.0,
    };
    standard_config(dim, WeightParams::new(dim, lambda, 1.0)?, NonlinearitySpec::zero(), data, disc)
}

/// `ν` of the weighted energy estimate and the smallest integer `t₀` that
/// satisfies the equivalence hypothesis `t₀ ≥ c_β^{−1+2δ} ν`, both from
/// certified bounds.
pub fn monitor_t0(dim: usize, lambda: f64) -> Result<(f64, f64), ExperimentError> {
    let params = WeightParams::new(dim, lambda, 1.0)?;
    let consts = Lemma33Constants::certify(&params, &BoundSampler::default())?;
    let nu = proposition_nu(&params, consts.C_beta);
    Ok((equivalence_t0(&params, consts.c_beta, nu).ceil().max(1.0), nu))
}

/// Bump data of amplitude `ε` (centered at 0 on the line, on `[2, 6]`
/// outside the obstacle) with `t₀` from [`monitor_t0`], horizon 100 and
/// reports every `τ·10`, fine enough for the differenced monitors.
pub fn monitor_preset(
    dim: usize,
    lambda: f64,
    nonlinearity: NonlinearitySpec,
    epsilon: f64,
) -> Result<SimConfig, ExperimentError> {
    let (t0, _) = monitor_t0(dim, lambda)?;
    let center = if dim == 1 { 0.0 } else { 4.0 };
    let data = InitialData {
        profile: InitialProfile::Bump { center, radius: 2.0 },
        epsilon,
        u1_factor: 0.0,
    };
    let disc = Discretization {
        h: 0.05,
        tau: 0.025,
        t_max: 100.0,
        report_every: 0.25,
    };
    standard_config(dim, WeightParams::new(dim, lambda, t0)?, nonlinearity, data, disc)
}

/// Verdicts of the four series monitors, in the order [`check_lemma32`],
/// [`check_lemma33_with`], [`check_equivalence`] (with `ν` from
/// [`monitor_t0`]) and [`check_wee`].
///
/// A violated monitor comes back as `Err` inside the list so that the other
/// verdicts are still reported.
pub fn run_monitors(series: &[EnergyReport], config: &SimConfig) -> Result<Vec<Result<MonitorVerdict, MonitorError>>, ExperimentError> {
    let w = &config.weight;
    let consts = Lemma33Constants::certify(w, &BoundSampler::default())?;
    let nu = proposition_nu(w, consts.C_beta);
    Ok(vec![
        check_lemma32(series, config),
        check_lemma33_with(series, config, &consts),
        check_equivalence(series, config, nu),
        check_wee(series, config).map(|(_, v)| v),
    ])
}
