//! The placement flow: spectral seed with orientation search, global
//! placement, then MILP legalization. Each stage is a function of its input
//! placement and the run configuration only, so running the stages one at a
//! time through files reproduces a full run exactly.

use std::time::Instant;

use nsplace_core::global::{run_global_placement, GpConfig, GpError, GpOutcome, TraceRow};
use nsplace_core::milp::{default_threshold, legalize, BnbConfig, Clock, Legalized};
use nsplace_core::objective::{DensityGrid, Objective, ObjectiveConfig};
use nsplace_core::separation::pair_set;
use nsplace_core::spectral::{orientation_search, spectral_coordinates, SpectralConfig, SpectralError};
use nsplace_core::{Design, DesignError, Placement};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Net-separation weight.
    pub lambda_ns: f64,
    /// Density weight.
    pub lambda_d: f64,
    /// Wirelength smoothing in mm; 1% of the longer board side when absent.
    pub smoothing: Option<f64>,
    pub alpha: f64,
    pub momentum: f64,
    pub iterations: usize,
    pub tol: f64,
    pub window: usize,
    pub refresh_every: usize,
    /// Relative-constraint threshold in mm; 5% of the longer board side when
    /// absent.
    pub k: Option<f64>,
    pub relative_constraints: bool,
    /// Density bin side in mm; twice the mean component side when absent.
    pub bin_size: Option<f64>,
    /// MILP wall-clock cap in seconds.
    pub time_cap: f64,
    pub node_limit: Option<usize>,
    pub seed: u64,
    /// Net pairs whose pin boxes are farther apart than this are skipped.
    pub pair_radius: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let gp = GpConfig::default();
        let bnb = BnbConfig::default();
        Self {
            lambda_ns: 1.0,
            lambda_d: 1.0,
            smoothing: None,
            alpha: gp.alpha,
            momentum: gp.momentum,
            iterations: gp.iterations,
            tol: gp.tol,
            window: gp.window,
            refresh_every: gp.refresh_every,
            k: None,
            relative_constraints: true,
            bin_size: None,
            time_cap: bnb.time_cap,
            node_limit: bnb.node_limit,
            seed: 0,
            pair_radius: None,
        }
    }
}

impl RunConfig {
    pub fn objective_config(&self, design: &Design) -> ObjectiveConfig {
        let base = ObjectiveConfig::for_board(&design.board);
        ObjectiveConfig { smoothing: self.smoothing.unwrap_or(base.smoothing), density_weight: self.lambda_d, separation_weight: self.lambda_ns }
    }

    pub fn grid(&self, design: &Design) -> DensityGrid {
        match self.bin_size {
            Some(side) => DensityGrid::with_bin_size(design, side),
            None => DensityGrid::default_for(design),
        }
    }

    pub fn gp_config(&self) -> GpConfig {
        GpConfig { alpha: self.alpha, momentum: self.momentum, iterations: self.iterations, tol: self.tol, window: self.window, refresh_every: self.refresh_every }
    }

    pub fn bnb_config(&self) -> BnbConfig {
        BnbConfig { time_cap: self.time_cap, node_limit: self.node_limit, ..BnbConfig::default() }
    }

    /// Threshold handed to the legalizer; `None` disables pruning.
    pub fn threshold(&self, design: &Design) -> Option<f64> {
        self.relative_constraints.then(|| self.k.unwrap_or_else(|| default_threshold(design)))
    }

    /// Objective over the net pairs active at `placement`.
    pub fn objective<'d>(&self, design: &'d Design, placement: &Placement) -> Objective<'d> {
        Objective::new(design, self.objective_config(design), self.grid(design), pair_set(design, placement, self.pair_radius))
    }
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

fn validate(cfg: &RunConfig) -> Result<(), FlowError> {
    let bad = |m: &str| Err(FlowError::Config(m.into()));
    if !(cfg.lambda_ns >= 0.0 && cfg.lambda_d >= 0.0) {
        return bad("weights must be nonnegative");
    }
    if cfg.smoothing.is_some_and(|c| !(c > 0.0)) {
        return bad("smoothing must be positive");
    }
    if cfg.bin_size.is_some_and(|b| !(b > 0.0)) {
        return bad("bin size must be positive");
    }
    if cfg.k.is_some_and(|k| !(k >= 0.0)) {
        return bad("threshold must be nonnegative");
    }
    if !(cfg.time_cap >= 0.0) {
        return bad("time cap must be nonnegative");
    }
    cfg.gp_config().validate()?;
    Ok(())
}

/// Spectral seed refined by the flip and orientation search.
pub fn run_init(design: &Design, cfg: &RunConfig) -> Result<Placement, FlowError> {
    validate(cfg)?;
    let seed = spectral_coordinates(design, &SpectralConfig::for_design(design), cfg.seed)?;
    let mut obj = cfg.objective(design, &seed);
    Ok(orientation_search(design, &seed, &mut obj))
}

/// Global placement from `seed`; the separated pairs are those active at
/// `seed`.
pub fn run_gp(design: &Design, seed: &Placement, cfg: &RunConfig, trace: Option<&mut dyn FnMut(TraceRow)>) -> Result<GpOutcome, FlowError> {
    validate(cfg)?;
    seed.check(design)?;
    let mut obj = cfg.objective(design, seed);
    Ok(run_global_placement(seed, &cfg.gp_config(), &mut obj, trace)?)
}

pub fn run_legalize(design: &Design, gp: &Placement, cfg: &RunConfig, clock: &dyn Clock) -> Result<Legalized, FlowError> {
    validate(cfg)?;
    gp.check(design)?;
    Ok(legalize(design, gp, cfg.threshold(design), &cfg.bnb_config(), clock))
}

/// Seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        Self(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub init: Placement,
    pub gp: GpOutcome,
    pub legal: Legalized,
    /// Seconds per stage: `init`, `gp`, `legalize`.
    pub timings: Vec<(String, f64)>,
}

/// All three stages back to back.
pub fn run_flow(design: &Design, cfg: &RunConfig, trace: Option<&mut dyn FnMut(TraceRow)>) -> Result<FlowResult, FlowError> {
    let t = Instant::now();
    let init = run_init(design, cfg)?;
    let t_init = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let gp = run_gp(design, &init, cfg, trace)?;
    let t_gp = t.elapsed().as_secs_f64();
    let clock = WallClock::start();
    let legal = run_legalize(design, &gp.placement, cfg, &clock)?;
    let timings = vec![("init".into(), t_init), ("gp".into(), t_gp), ("legalize".into(), clock.elapsed())];
    Ok(FlowResult { init, gp, legal, timings })
}

/// One trace line: `iter F wa ns d`.
pub fn trace_line(row: &TraceRow) -> String {
    let t = &row.terms;
    format!("{} {} {} {} {}", row.iter, t.total, t.wirelength, t.separation, t.density)
}
