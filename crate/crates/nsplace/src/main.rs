use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsplace::flow::{self, RunConfig, WallClock};
use nsplace::format::{parse_design, parse_placement, serialize_design, serialize_placement};
use nsplace::gen::{generate, GenParams};
use nsplace::lpfile::{export_lp, import_solution};
use nsplace::report::{format_table, to_csv};
use nsplace::svg::{render_svg, SvgOptions};
use nsplace_core::global::TraceRow;
use nsplace_core::metrics::MetricsReport;
use nsplace_core::milp::{build_model, derive_relative_constraints, Legalized, MilpStatus};
use nsplace_core::{Design, Placement};

#[derive(Parser)]
#[command(name = "nsplace", version, about = "Net-separation-aware component placement")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, env = "NSPLACE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FlowArgs {
    /// Net-separation weight.
    #[arg(long, default_value_t = 1.0)]
    lns: f64,
    /// Density weight.
    #[arg(long, default_value_t = 1.0)]
    ld: f64,
    /// Wirelength smoothing in mm (default: 1% of the longer board side).
    #[arg(long)]
    c: Option<f64>,
    /// Learning rate.
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// Momentum coefficient.
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    /// Global placement iteration budget.
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    /// Relative-constraint threshold in mm (default: 5% of the longer board side).
    #[arg(long)]
    k: Option<f64>,
    /// Solve the legalization MILP without relative-position constraints.
    #[arg(long)]
    no_rel_constraints: bool,
    /// Density bin side in mm.
    #[arg(long)]
    bin_size: Option<f64>,
    /// MILP wall-clock cap in seconds.
    #[arg(long, default_value_t = 4.0 * 3600.0)]
    time_cap: f64,
    /// MILP node limit.
    #[arg(long)]
    node_limit: Option<usize>,
    /// Seed for every stochastic choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip net pairs whose pin boxes are farther apart than this (mm).
    #[arg(long)]
    pair_radius: Option<f64>,
}

impl FlowArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            lambda_ns: self.lns,
            lambda_d: self.ld,
            smoothing: self.c,
            alpha: self.alpha,
            momentum: self.beta,
            iterations: self.iters,
            k: self.k,
            relative_constraints: !self.no_rel_constraints,
            bin_size: self.bin_size,
            time_cap: self.time_cap,
            node_limit: self.node_limit,
            seed: self.seed,
            pair_radius: self.pair_radius,
            ..RunConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run init, global placement and legalization, then report.
    Place {
        design: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Metrics CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Per-iteration global placement trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Spectral seed with orientation search.
    Init {
        design: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Global placement from a seed placement.
    Gp {
        design: PathBuf,
        placement: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Legalize a global placement.
    Legalize {
        design: PathBuf,
        placement: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the model as CPLEX LP text.
        #[arg(long)]
        lp_out: Option<PathBuf>,
        /// Read an external solver's `var value` solution instead of solving.
        #[arg(long)]
        solution: Option<PathBuf>,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Print metrics of a placement.
    Eval {
        design: PathBuf,
        placement: PathBuf,
        /// Placement to report percent improvements against.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw a placement as SVG.
    Render {
        design: PathBuf,
        placement: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Draw net hulls.
        #[arg(long)]
        hulls: bool,
    },
    /// Write a synthetic design.
    Gen {
        #[arg(long)]
        components: usize,
        #[arg(long)]
        nets: usize,
        #[arg(long, requires = "height")]
        width: Option<f64>,
        #[arg(long, requires = "width")]
        height: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        min_dim: f64,
        #[arg(long, default_value_t = 10.0)]
        max_dim: f64,
        #[arg(long, default_value_t = 0.5)]
        utilization: f64,
        /// Leading components locked in place.
        #[arg(long, default_value_t = 0)]
        locked: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure with its exit code: 1 input or run error, 2 infeasible, 3 limit
/// reached.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Self { code: 1, msg: msg.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_design(path: &Path) -> Result<Design, Failure> {
    parse_design(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_placement(path: &Path, design: &Design) -> Result<Placement, Failure> {
    parse_placement(&read(path)?, design).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Run `f` with a trace sink that collects lines for `path`.
fn with_trace<T>(path: Option<&Path>, f: impl FnOnce(Option<&mut dyn FnMut(TraceRow)>) -> Result<T, Failure>) -> Result<T, Failure> {
    let Some(path) = path else { return f(None) };
    let mut text = String::from("# iter F wa ns d\n");
    let mut sink = |row: TraceRow| {
        text.push_str(&flow::trace_line(&row));
        text.push('\n');
    };
    let out = f(Some(&mut sink));
    write(path, &text)?;
    out
}

/// Write the legalized placement, or fail with the status's exit code.
/// A limit-stopped search with an incumbent still writes it.
fn finish_legal(design: &Design, legal: &Legalized, out: &Path) -> Result<(Placement, Option<Failure>), Failure> {
    let s = &legal.solution;
    eprintln!("legalize: {:?}, objective {}, {} nodes, {} of {} pairs pinned, {} binaries", s.status, s.objective, s.nodes, legal.constraints.len(), design.components.len() * design.components.len().saturating_sub(1) / 2, legal.binaries);
    match (s.status, &s.placement) {
        (MilpStatus::Infeasible, _) => Err(Failure { code: 2, msg: "legalization model is infeasible".into() }),
        (_, None) => Err(Failure { code: 3, msg: "limit reached before any legal placement was found".into() }),
        (status, Some(p)) => {
            write(out, &serialize_placement(design, p))?;
            let late = (status == MilpStatus::FeasibleTimeout).then(|| Failure { code: 3, msg: "limit reached; wrote the best legal placement found".into() });
            Ok((p.clone(), late))
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Place { design, out, report, svg, trace, flow: args } => {
            let d = load_design(&design)?;
            let cfg = args.config();
            let result = with_trace(trace.as_deref(), |t| flow::run_flow(&d, &cfg, t).map_err(Failure::input))?;
            eprintln!("gp: {} iterations, converged {}, F {}", result.gp.iterations, result.gp.converged, result.gp.value);
            let (placement, late) = finish_legal(&d, &result.legal, &out)?;
            let metrics = MetricsReport::evaluate(&d, &placement, result.timings);
            print!("{}", format_table(&metrics, None));
            if let Some(path) = report {
                write(&path, &to_csv(&metrics))?;
            }
            if let Some(path) = svg {
                write(&path, &render_svg(&d, &placement, &SvgOptions::default()))?;
            }
            late.map_or(Ok(()), Err)
        }
        Command::Init { design, out, flow: args } => {
            let d = load_design(&design)?;
            let p = flow::run_init(&d, &args.config()).map_err(Failure::input)?;
            write(&out, &serialize_placement(&d, &p))
        }
        Command::Gp { design, placement, out, trace, flow: args } => {
            let d = load_design(&design)?;
            let seed = load_placement(&placement, &d)?;
            let gp = with_trace(trace.as_deref(), |t| flow::run_gp(&d, &seed, &args.config(), t).map_err(Failure::input))?;
            eprintln!("gp: {} iterations, converged {}, F {}", gp.iterations, gp.converged, gp.value);
            write(&out, &serialize_placement(&d, &gp.placement))
        }
        Command::Legalize { design, placement, out, lp_out, solution, flow: args } => {
            let d = load_design(&design)?;
            let gp = load_placement(&placement, &d)?;
            let cfg = args.config();
            if lp_out.is_some() || solution.is_some() {
                let rels = cfg.threshold(&d).map_or_else(Vec::new, |k| derive_relative_constraints(&gp, &d, k));
                let model = build_model(&d, &rels);
                if let Some(path) = &lp_out {
                    write(path, &export_lp(&model))?;
                }
                if let Some(path) = &solution {
                    let p = import_solution(&read(path)?, &model).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                    return write(&out, &serialize_placement(&d, &p));
                }
            }
            let legal = flow::run_legalize(&d, &gp, &cfg, &WallClock::start()).map_err(Failure::input)?;
            let (_, late) = finish_legal(&d, &legal, &out)?;
            late.map_or(Ok(()), Err)
        }
        Command::Eval { design, placement, baseline, report } => {
            let d = load_design(&design)?;
            let p = load_placement(&placement, &d)?;
            let metrics = MetricsReport::evaluate(&d, &p, Vec::new());
            let base = match baseline {
                Some(path) => Some(MetricsReport::evaluate(&d, &load_placement(&path, &d)?, Vec::new())),
                None => None,
            };
            print!("{}", format_table(&metrics, base.as_ref()));
            match report {
                Some(path) => write(&path, &to_csv(&metrics)),
                None => Ok(()),
            }
        }
        Command::Render { design, placement, out, hulls } => {
            let d = load_design(&design)?;
            let p = load_placement(&placement, &d)?;
            write(&out, &render_svg(&d, &p, &SvgOptions { hulls, ..Default::default() }))
        }
        Command::Gen { components, nets, width, height, min_dim, max_dim, utilization, locked, seed, out } => {
            let params = GenParams { components, nets, board: width.zip(height), dim_range: (min_dim, max_dim), utilization, locked, seed };
            let d = generate(&params).map_err(Failure::input)?;
            write(&out, &serialize_design(&d))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
