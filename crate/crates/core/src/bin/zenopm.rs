use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use zenopm::montecarlo::Simulator;
use zenopm::oracle::Oracle;
use zenopm::output::{self, Format, Table};
use zenopm::parallel::{threads_from_env, with_threads};
use zenopm::sweep::{
    density_table, emit_figure_data, inverse_design, run_sweep, DensitySpec, Figure, FigureData, FigureOverrides,
    GridRequest, Quantity, SweepSpec,
};
use zenopm::{Error, RunSeed, SystemState, ZenoConfig};

/// Zeno protective measurement simulator.
///
/// List-valued flags accept comma-separated values and ranges
/// `start:end[:step]`, e.g. `--r 0:1:0.05 --stages 5:100`.
#[derive(Parser, Debug)]
#[command(name = "zenopm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and approximate final pointer densities on a grid.
    Wavepacket {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Survival probability through all Zeno stages.
    Survival {
        #[command(flatten)]
        point: PointArgs,
        /// Also evaluate the exact overlap-sum survival probability.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        allow_large_n: bool,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Final pointer width and broadening ratio.
    Width {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Performance ratio R, its large-N limit and, given --photons, u_SM and u_PM.
    Performance {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        photons: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Monte Carlo ensemble of both measurement schemes.
    Montecarlo {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        photons: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit per-stage photon losses instead of summary rows (single point only).
        #[arg(long)]
        attrition: bool,
        #[arg(long)]
        allow_large_n: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Evaluate a set of quantities over an (r, N, sigma) grid.
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        /// Comma-separated quantity names, e.g. survival,R,survival_exact.
        #[arg(long, value_delimiter = ',', required = true)]
        quantities: Vec<String>,
        #[arg(long)]
        photons: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        allow_large_n: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Data behind one of the figures (fig1..fig5), with optional overrides.
    Figure {
        figure: String,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        stages: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Smallest stage count reaching a target performance ratio.
    Design {
        #[arg(long)]
        target: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        sigma: f64,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    r: String,
    #[arg(long)]
    stages: String,
    #[arg(long)]
    sigma: String,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    grid_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

impl GridArgs {
    fn request(&self) -> GridRequest {
        GridRequest {
            min: self.grid_min,
            max: self.grid_max,
            points: self.grid_points,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct IoArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl IoArgs {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_list<T, F>(flag: &str, text: &str, parse: F) -> Result<Vec<T>, Error>
where
    F: Fn(&str, &str, Option<&str>) -> Option<Vec<T>>,
{
    let bad = || Error::Usage {
        field: flag.to_string(),
        message: format!("cannot parse '{text}' as a list of values or start:end[:step] ranges"),
    };
    let mut values = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let chunk = match parts.as_slice() {
            [single] => parse(single, single, None),
            [start, end] => parse(start, end, None),
            [start, end, step] => parse(start, end, Some(step)),
            _ => None,
        };
        values.extend(chunk.ok_or_else(bad)?);
    }
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

fn parse_reals(flag: &str, text: &str) -> Result<Vec<f64>, Error> {
    parse_list(flag, text, |start, end, step| {
        let (a, b): (f64, f64) = (start.parse().ok()?, end.parse().ok()?);
        if start == end {
            return Some(vec![a]);
        }
        let h: f64 = step?.parse().ok()?;
        (h > 0.0 && b >= a).then(|| zenopm::sweep::linspace_step(a, b, h))
    })
}

fn parse_counts(flag: &str, text: &str) -> Result<Vec<u64>, Error> {
    parse_list(flag, text, |start, end, step| {
        let (a, b): (u64, u64) = (start.parse().ok()?, end.parse().ok()?);
        let h: u64 = step.map_or(Some(1), |s| s.parse().ok())?;
        (h > 0 && b >= a).then(|| (a..=b).step_by(h as usize).collect())
    })
}

impl PointArgs {
    fn axes(&self) -> Result<(Vec<f64>, Vec<u64>, Vec<f64>), Error> {
        Ok((
            parse_reals("r", &self.r)?,
            parse_counts("stages", &self.stages)?,
            parse_reals("sigma", &self.sigma)?,
        ))
    }

    fn spec(&self, quantities: Vec<Quantity>) -> Result<SweepSpec, Error> {
        let (r, n, sigma) = self.axes()?;
        Ok(SweepSpec::new(r, n, sigma, quantities))
    }
}

enum CliError {
    Model(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn emit(io_args: &IoArgs, table: &Table, echo: &impl serde::Serialize) -> Result<(), CliError> {
    match &io_args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(io_args.format(), echo, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(io_args.format(), echo, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_sweep(io_args: &IoArgs, spec: &SweepSpec) -> Result<(), CliError> {
    let result = run_sweep(spec)?;
    emit(io_args, &output::sweep_table(&result), &result.spec)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Wavepacket { point, grid, io } => {
            let (r, n, sigma) = point.axes()?;
            let spec = DensitySpec {
                r_values: r,
                n_values: n,
                sigma_values: sigma,
                grid: grid.request(),
            };
            SweepSpec::new(spec.r_values.clone(), spec.n_values.clone(), spec.sigma_values.clone(), vec![Quantity::Width])
                .validate()?;
            let table = density_table(&spec)?;
            emit(&io, &output::density_table(&table), &table.spec)
        }
        Command::Survival {
            point,
            exact,
            allow_large_n,
            io,
        } => {
            let mut quantities = vec![Quantity::Survival];
            if exact {
                quantities.push(Quantity::SurvivalExact);
            }
            let mut spec = point.spec(quantities)?;
            spec.allow_large_n = allow_large_n;
            emit_sweep(&io, &spec)
        }
        Command::Width { point, io } => emit_sweep(&io, &point.spec(vec![Quantity::Width, Quantity::WidthRatio])?),
        Command::Performance { point, photons, io } => {
            let mut quantities = vec![Quantity::R, Quantity::RLargeN];
            if photons.is_some() {
                quantities.extend([Quantity::USm, Quantity::UPm]);
            }
            let mut spec = point.spec(quantities)?;
            spec.photons = photons;
            emit_sweep(&io, &spec)
        }
        Command::Montecarlo {
            point,
            photons,
            seed,
            attrition,
            allow_large_n,
            grid,
            io,
        } => {
            let mut spec = point.spec(Quantity::monte_carlo())?.with_monte_carlo(photons, RunSeed(seed));
            spec.allow_large_n = allow_large_n;
            spec.grid = grid.request();
            if !attrition {
                return emit_sweep(&io, &spec);
            }
            spec.validate()?;
            let ([r], [n], [sigma]) = (&spec.r_values[..], &spec.n_values[..], &spec.sigma_values[..]) else {
                return Err(Error::Usage {
                    field: "attrition".into(),
                    message: "per-stage output needs a single (r, N, sigma) point".into(),
                }
                .into());
            };
            let state = SystemState::new(*r)?;
            let config = ZenoConfig::new(*n, *sigma)?;
            let oracle = if allow_large_n { Oracle::unbounded() } else { Oracle::default() };
            let grid = spec.grid.resolve(config)?;
            let stats = Simulator::new(oracle, Some(grid)).simulate_protective(state, config, photons, RunSeed(seed))?;
            let profile = oracle.stage_survival_profile(state, config)?;
            emit(&io, &output::attrition_table(&stats, &profile), &spec)
        }
        Command::Sweep {
            point,
            quantities,
            photons,
            seed,
            allow_large_n,
            grid,
            io,
        } => {
            let quantities = quantities.iter().map(|q| q.parse()).collect::<Result<Vec<Quantity>, _>>()?;
            let mut spec = point.spec(quantities)?;
            spec.photons = photons;
            spec.seed = seed.map(RunSeed);
            spec.allow_large_n = allow_large_n;
            spec.grid = grid.request();
            emit_sweep(&io, &spec)
        }
        Command::Figure {
            figure,
            r,
            stages,
            sigma,
            grid,
            io,
        } => {
            let figure: Figure = figure.parse()?;
            let overrides = FigureOverrides {
                r_values: r.map(|t| parse_reals("r", &t)).transpose()?,
                n_values: stages.map(|t| parse_counts("stages", &t)).transpose()?,
                sigma_values: sigma.map(|t| parse_reals("sigma", &t)).transpose()?,
                grid: grid.request(),
            };
            match emit_figure_data(figure, &overrides)? {
                FigureData::Densities(table) => emit(
                    &io,
                    &output::density_table(&table),
                    &json!({ "figure": figure, "densities": table.spec }),
                ),
                FigureData::Sweep(result) => emit(
                    &io,
                    &output::sweep_table(&result),
                    &json!({ "figure": figure, "sweep": result.spec }),
                ),
            }
        }
        Command::Design { target, r, sigma, io } => {
            let state = SystemState::new(r)?;
            let design = inverse_design(target, state, sigma)?;
            emit(
                &io,
                &output::design_table(target, r, sigma, design),
                &json!({ "target_R": target, "r": r, "sigma": sigma }),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match with_threads(threads_from_env(), || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Model(e)) => {
            eprintln!("zenopm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(CliError::Io(e)) => {
            eprintln!("zenopm: {e}");
            ExitCode::from(1)
        }
    }
}
