use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rbfsmooth::approx::{compare, fit_approx, make_grid};
use rbfsmooth::exact::{diagnostics, fit_exact, fit_smoother};
use rbfsmooth::io::{self, DataTable, Delimiter, ReadOptions};
use rbfsmooth::model::fit_interpolant;
use rbfsmooth::study::{
    self, convergence_sweep, delta_data, delta_function, density_law, exponential_sizes,
    rho_search, RhoPolicy, RhoSearchConfig, SweepConfig, SweepMode,
};
use rbfsmooth::{FittedModel, KernelFamily, KernelSpec, ModelKind, Points, PolyFrame};

/// Largest data miss, relative to the data scale, an interpolant may show
/// before the fit is reported as ill-conditioned.
const INTERPOLATION_SLACK: f64 = 1e-6;

/// Scattered-data interpolation and smoothing with radial basis functions.
#[derive(Parser)]
#[command(name = "rbfsmooth", version)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the summary printed on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelimiterArg {
    Auto,
    Comma,
    Tab,
    Whitespace,
}

#[derive(Args)]
struct DataArgs {
    /// Delimited text file, one point per row, value in the last column.
    #[arg(long)]
    data: PathBuf,
    /// Kernel, e.g. `thinplate:s=1.5`, `shifted-tps:s=1,a=0.5`, `mq:a=1`, `imq:a=1`, `gauss`.
    #[arg(long)]
    kernel: KernelFamily,
    /// Polynomial order (degree < theta is reproduced).
    #[arg(long)]
    theta: usize,
    /// Zero-based field ids to read, comma separated; the last is the value.
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = DelimiterArg::Auto)]
    delimiter: DelimiterArg,
}

impl DataArgs {
    fn read_options(&self) -> ReadOptions {
        ReadOptions {
            delimiter: match self.delimiter {
                DelimiterArg::Auto => Delimiter::Auto,
                DelimiterArg::Comma => Delimiter::Comma,
                DelimiterArg::Tab => Delimiter::Tab,
                DelimiterArg::Whitespace => Delimiter::Whitespace,
            },
            columns: self.columns.clone(),
        }
    }

    fn load(&self) -> io::Result<(DataTable, KernelSpec, PolyFrame)> {
        let table = io::read_csv(&self.data, &self.read_options())?;
        let spec = KernelSpec::new(self.kernel, self.theta, table.dim())?;
        let frame = PolyFrame::new(table.dim(), self.theta)?;
        Ok((table, spec, frame))
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Evaluate on a grid `a1,..:b1,..:n1,..` or at the points of a file;
    /// the default is the data points.
    #[arg(long, allow_hyphen_values = true)]
    eval: Option<String>,
    /// Save the fitted model.
    #[arg(long)]
    save: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the interpolant.
    Interpolate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit the Exact smoother.
    SmoothExact {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Print the smoother identity checks.
        #[arg(long)]
        diagnostics: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit the Approximate smoother on a regular grid of centers.
    SmoothApprox {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Center grid `a1,..,ad:b1,..,bd:n1,..,nd`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Also fit the Exact smoother and print the comparison identity.
        #[arg(long)]
        compare_exact: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a saved model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Grid `a1,..:b1,..:n1,..` or point file.
        #[arg(long, allow_hyphen_values = true)]
        eval: String,
    },
    /// Experiments on synthetic data.
    #[command(subcommand)]
    Study(StudyCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum DataFunction {
    /// `sin(x1 + .. + xd)`
    Sin,
    /// `exp(x1 + .. + xd)`
    Exp,
    /// `1 / (1 + 25 |x|^2)`
    Runge,
}

impl DataFunction {
    fn eval(self, x: &[f64]) -> f64 {
        match self {
            DataFunction::Sin => x.iter().sum::<f64>().sin(),
            DataFunction::Exp => x.iter().sum::<f64>().exp(),
            DataFunction::Runge => 1.0 / (1.0 + 25.0 * x.iter().map(|v| v * v).sum::<f64>()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Interpolant,
    Exact,
    Approx,
}

#[derive(Clone, Copy, ValueEnum)]
enum Criterion {
    /// Squared error against the data function on an error grid.
    Function,
    /// Squared residual at the data points.
    Data,
}

#[derive(Subcommand)]
enum StudyCommand {
    /// Fit the cavity-density law `h = h1 N^(-a)` on uniform samples.
    Density {
        #[arg(long, default_value = "-1.5:1.5", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 5000)]
        max: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 1.2)]
        multiplier: f64,
        /// Density probes per axis (default 10000 in 1D, 256 otherwise).
        #[arg(long)]
        probes: Option<usize>,
    },
    /// Measure convergence of fits to a known function.
    Convergence {
        #[arg(long)]
        kernel: KernelFamily,
        #[arg(long)]
        theta: usize,
        #[arg(long, default_value = "-1.5:1.5", allow_hyphen_values = true)]
        region: String,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400,800,1600")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Approximate-mode centers per axis, comma separated.
        #[arg(long, value_delimiter = ',')]
        grid_counts: Option<Vec<usize>>,
        /// Fixed smoothing parameter; without it rho is coupled to h.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        a_over_b: f64,
        #[arg(long, default_value_t = 3.09)]
        h1: f64,
        #[arg(long, default_value_t = 0.81)]
        a_exp: f64,
        #[arg(long, value_enum, default_value_t = DataFunction::Sin)]
        function: DataFunction,
        /// Half-width of uniform noise added to the data.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Search for the smoothing parameter minimizing an error criterion.
    RhoSearch {
        /// Data file; without it data are sampled from `--function`.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        kernel: KernelFamily,
        #[arg(long)]
        theta: usize,
        #[arg(long, default_value = "-1.5:1.5", allow_hyphen_values = true)]
        region: String,
        /// Number of synthetic data points.
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DataFunction::Sin)]
        function: DataFunction,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Defaults to `function` for synthetic data and `data` for files.
        #[arg(long, value_enum)]
        criterion: Option<Criterion>,
        /// Error-grid points per axis for the `function` criterion.
        #[arg(long, default_value_t = 200)]
        error_probes: usize,
        /// Use the Approximate smoother on this grid instead of the Exact one.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        rho0: f64,
        #[arg(long, default_value_t = 10.0)]
        factor: f64,
        #[arg(long, default_value_t = 1.0)]
        error_tol: f64,
        #[arg(long, default_value_t = 1.0)]
        rho_tol: f64,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
    },
}

/// Evaluation points: a grid when the flag parses as one, else a point file.
fn eval_points(flag: &str, dim: usize) -> io::Result<Points> {
    if flag.matches(':').count() == 2 && !Path::new(flag).exists() {
        let gs = io::parse_grid(flag)?;
        if gs.dim() != dim {
            return Err(io::Error::Format(format!(
                "--eval grid has dimension {}, model has {dim}",
                gs.dim()
            )));
        }
        return Ok(make_grid(&gs, 1).points);
    }
    io::read_points(Path::new(flag), dim, &ReadOptions::default())
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn coord_header(dim: usize) -> String {
    (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

fn predictions_csv(model: &FittedModel, points: &Points, data: Option<&[f64]>) -> String {
    let mut out = coord_header(points.dim());
    out.push_str(if data.is_some() { ",y,fit\n" } else { ",fit\n" });
    for (k, p) in points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().copied().map(real).collect();
        if let Some(y) = data {
            row.push(real(y[k]));
        }
        row.push(real(model.eval(p)));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

struct Context {
    out: Option<PathBuf>,
    quiet: bool,
    seed: u64,
}

impl Context {
    fn emit(&self, text: &str) -> io::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|source| io::Error::Io {
                path: path.clone(),
                source,
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn note(&self, text: &str) {
        if !self.quiet {
            eprintln!("{text}");
        }
    }

    fn finish(&self, model: &FittedModel, table: &DataTable, output: &OutputArgs) -> io::Result<()> {
        let v_max = model.v().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.note(&format!(
            "{} fit: N = {}, centers = {}, max |v| = {v_max:.3e}, seminorm^2 = {:.6e}",
            model.kind().tag(),
            table.len(),
            model.centers().len(),
            model.seminorm_sq()
        ));
        if model.kind() == ModelKind::Interpolant {
            let scale = table.y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let miss = table
                .x
                .iter()
                .zip(&table.y)
                .map(|(p, y)| (model.eval(p) - y).abs())
                .fold(0.0, f64::max);
            if miss.is_nan() || miss > INTERPOLATION_SLACK * scale {
                self.note(&format!(
                    "warning: the system is ill-conditioned; the fit misses the data by up to {miss:.3e}"
                ));
            }
        }
        if let Some(path) = &output.save {
            io::save_model(path, model)?;
        }
        let csv = match &output.eval {
            Some(flag) => predictions_csv(model, &eval_points(flag, table.dim())?, None),
            None => predictions_csv(model, &table.x, Some(&table.y)),
        };
        self.emit(&csv)
    }
}

fn run(cli: Cli) -> io::Result<()> {
    let ctx = Context {
        out: cli.out,
        quiet: cli.quiet,
        seed: cli.seed,
    };
    match cli.command {
        Command::Interpolate { data, output } => {
            let (table, spec, frame) = data.load()?;
            let model = fit_interpolant(&spec, &frame, &table.x, &table.y)?;
            ctx.finish(&model, &table, &output)
        }
        Command::SmoothExact {
            data,
            rho,
            diagnostics: show,
            output,
        } => {
            let (table, spec, frame) = data.load()?;
            let model = fit_exact(&spec, &frame, &table.x, &table.y, rho)?;
            if show {
                let d = diagnostics(&model, &table.x, &table.y)?;
                eprintln!("J_e = {:.12e}", d.j_e);
                eprintln!("seminorm^2 = {:.12e}", d.seminorm_sq);
                eprintln!("mean residual^2 = {:.12e}", d.residual_ms);
                eprintln!("energy identity gap = {:.3e}", d.energy_gap);
                eprintln!("seminorm identity gap = {:.3e}", d.seminorm_gap);
                eprintln!("functional identity gap = {:.3e}", d.functional_gap);
                eprintln!("moment gap |P^T (s - y)| = {:.3e}", d.moment_gap);
                eprintln!(
                    "identities hold: {} (worst relative gap {:.3e})",
                    if d.identities_hold() { "yes" } else { "no" },
                    d.worst_relative_gap()
                );
            }
            ctx.finish(&model, &table, &output)
        }
        Command::SmoothApprox {
            data,
            rho,
            grid,
            compare_exact,
            output,
        } => {
            let (table, spec, frame) = data.load()?;
            let gs = io::parse_grid(&grid)?;
            let g = make_grid(&gs, data.theta);
            if !g.unisolvent_guaranteed {
                ctx.note("warning: grid has fewer nodes per axis than theta; unisolvency is checked numerically");
            }
            let model = fit_approx(&spec, &frame, &table.x, &table.y, &g.points, rho)?;
            if compare_exact {
                let exact = fit_exact(&spec, &frame, &table.x, &table.y, rho)?;
                let c = compare(&exact, &model, &table.x, &table.y, rho)?;
                eprintln!("J_e[exact] = {:.12e}", c.j_exact);
                eprintln!("J_e[approx] = {:.12e}", c.j_approx);
                eprintln!("rho |s_e - s_a|^2 = {:.12e}", rho * c.seminorm_sq_diff);
                eprintln!("mean |s_e - s_a|^2 = {:.12e}", c.mean_sq_diff);
                eprintln!("identity lhs = {:.12e}", c.lhs);
                eprintln!("identity rhs = {:.12e}", c.rhs);
                eprintln!("identity holds: {}", if c.holds() { "yes" } else { "no" });
            }
            ctx.finish(&model, &table, &output)
        }
        Command::Eval { model, eval } => {
            let model = io::load_model(&model)?;
            let points = eval_points(&eval, model.spec().dim())?;
            ctx.emit(&predictions_csv(&model, &points, None))
        }
        Command::Study(cmd) => run_study(&ctx, cmd),
    }
}

fn run_study(ctx: &Context, cmd: StudyCommand) -> io::Result<()> {
    match cmd {
        StudyCommand::Density {
            region,
            max,
            count,
            multiplier,
            probes,
        } => {
            let region = io::parse_region(&region)?;
            let probes = probes.unwrap_or(if region.dim() == 1 { 10_000 } else { 256 });
            let sizes = exponential_sizes(max, count, multiplier);
            let fit = density_law(&region, &sizes, ctx.seed, probes)?;
            ctx.note(&format!(
                "h_X = {:.4} N^(-{:.4}), r^2 = {:.4}",
                fit.h1, fit.a_exp, fit.r2
            ));
            ctx.emit(&io::density_csv(&fit))
        }
        StudyCommand::Convergence {
            kernel,
            theta,
            region,
            sizes,
            mode,
            grid_counts,
            rho,
            a_over_b,
            h1,
            a_exp,
            function,
            noise,
        } => {
            let region = io::parse_region(&region)?;
            let spec = KernelSpec::new(kernel, theta, region.dim())?;
            let mode = match mode {
                ModeArg::Interpolant => SweepMode::Interpolant,
                ModeArg::Exact => SweepMode::Exact,
                ModeArg::Approx => SweepMode::Approx {
                    counts: grid_counts.ok_or_else(|| {
                        io::Error::Format("--mode approx requires --grid-counts".into())
                    })?,
                },
            };
            let mut cfg = SweepConfig::new(sizes, mode, region.dim());
            cfg.seed = ctx.seed;
            cfg.noise = noise;
            cfg.rho = match rho {
                Some(r) => RhoPolicy::Fixed(r),
                None => RhoPolicy::Coupled {
                    a_over_b,
                    h1,
                    a_exp,
                },
            };
            let report = convergence_sweep(&spec, &region, &|x| function.eval(x), &cfg)?;
            for r in report.rows.iter().filter(|r| r.failure.is_some()) {
                ctx.note(&format!("N = {}: {}", r.n, r.failure.as_deref().unwrap_or("")));
            }
            ctx.note(&format!(
                "slope = {}, predicted eta_G = {}",
                report
                    .slope()
                    .map_or_else(|| "undefined".to_string(), |s| format!("{s:.4}")),
                report.predicted.total()
            ));
            ctx.emit(&io::study_csv(&report))
        }
        StudyCommand::RhoSearch {
            data,
            kernel,
            theta,
            region,
            n,
            function,
            noise,
            criterion,
            error_probes,
            grid,
            rho0,
            factor,
            error_tol,
            rho_tol,
            max_iter,
        } => {
            let region = io::parse_region(&region)?;
            let synthetic = data.is_none();
            let (x, y) = match &data {
                Some(path) => {
                    let t = io::read_csv(path, &ReadOptions::default())?;
                    (t.x, t.y)
                }
                None => {
                    let x = study::gen_uniform(&region, n, ctx.seed)?;
                    let mut rng = rbfsmooth::random::SeededRng::new(ctx.seed ^ 0x5EED);
                    let y = x
                        .iter()
                        .map(|p| function.eval(p) + noise * rng.uniform(-1.0, 1.0))
                        .collect::<Vec<_>>();
                    (x, y)
                }
            };
            let criterion = criterion.unwrap_or(if synthetic {
                Criterion::Function
            } else {
                Criterion::Data
            });
            if matches!(criterion, Criterion::Function) && !synthetic {
                return Err(io::Error::Format(
                    "--criterion function needs synthetic data (omit --data)".into(),
                ));
            }
            let spec = KernelSpec::new(kernel, theta, x.dim())?;
            let frame = PolyFrame::new(x.dim(), theta)?;
            let centers = grid
                .map(|g| io::parse_grid(&g).map(|gs| make_grid(&gs, theta).points))
                .transpose()?;
            let error_grid = region.probe_grid(error_probes)?;
            let fit = |rho: f64| match &centers {
                Some(c) => fit_approx(&spec, &frame, &x, &y, c, rho),
                None => fit_smoother(&spec, &frame, &x, &y, rho),
            };
            let config = RhoSearchConfig {
                factor,
                error_change_pct: error_tol,
                rho_change_pct: rho_tol,
                max_iterations: max_iter,
            };
            let result = rho_search(
                |rho| {
                    let model = fit(rho)?;
                    Ok(match criterion {
                        Criterion::Function => {
                            delta_function(&model, &error_grid, &|p| function.eval(p))
                        }
                        Criterion::Data => delta_data(&model, &x, &y),
                    })
                },
                rho0,
                &config,
            )?;
            ctx.note(&format!(
                "rho* = {:.6e}, error = {:.6e}, iterations = {}, stop = {:?}",
                result.rho, result.error, result.iterations, result.stop
            ));
            ctx.emit(&io::search_csv(&result))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
