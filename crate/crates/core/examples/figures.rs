//! Regenerates the data behind every figure with default axes and reports
//! table sizes. Pass a directory to write one CSV per figure.

use std::fs::File;
use std::path::PathBuf;

use zenopm::output::{density_table, sweep_table, Format};
use zenopm::sweep::{emit_figure_data, Figure, FigureData, FigureOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    for figure in [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5] {
        let data = emit_figure_data(figure, &FigureOverrides::default())?;
        let (table, rows) = match &data {
            FigureData::Densities(t) => (density_table(t), t.rows.len()),
            FigureData::Sweep(s) => (sweep_table(s), s.rows.len()),
        };
        println!("{figure:?}: {rows} rows");
        if let Some(dir) = &out_dir {
            let file = File::create(dir.join(format!("{figure:?}.csv").to_lowercase()))?;
            table.write(Format::Csv, &(), file)?;
        }
    }
    Ok(())
}
