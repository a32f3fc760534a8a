//! A small parameter sweep written as CSV to stdout.

use zenopm::output::{sweep_table, Format};
use zenopm::sweep::{run_sweep, Quantity, SweepSpec};
use zenopm::RunSeed;

fn main() -> zenopm::Result<()> {
    let spec = SweepSpec::new(
        vec![0.3, 0.5],
        vec![10, 50],
        vec![0.1],
        vec![Quantity::Survival, Quantity::SurvivalExact, Quantity::R, Quantity::McSurvival],
    )
    .with_monte_carlo(20_000, RunSeed(1));
    let result = run_sweep(&spec)?;
    sweep_table(&result).write(Format::Csv, &result.spec, std::io::stdout().lock())?;

    let r = result.value(0.5, 50, 0.1, Quantity::R).unwrap_or(f64::NAN);
    eprintln!("R(0.5, 50, 0.1) = {r:.4}");
    Ok(())
}
