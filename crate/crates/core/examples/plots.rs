//! Write a CSV table and render it as a line plot and a heatmap.

use rigidity_lab::field::sample;
use rigidity_lab::report::{num, write_text, Table};
use rigidity_lab::svg::{Heatmap, LinePlot, Series};
use rigidity_lab::{poisson, FieldExpr};

fn main() -> rigidity_lab::Result<()> {
    let dir = std::env::temp_dir().join("rigidity-lab-plots");
    std::fs::create_dir_all(&dir).map_err(|e| rigidity_lab::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let fg = poisson(&FieldExpr::sin(1, 0), &FieldExpr::cos(1, 1));
    let grid = sample(&fg, 96);
    write_text(&dir.join("bracket.svg"), &Heatmap::from_grid(&grid, "{sin 2pi q, cos 2pi(q+p)}").render())?;

    let mut table = Table::new(&["q", "bracket"]);
    let mut points = Vec::new();
    for i in 0..96 {
        let x = grid.point(i, 0);
        table.push(vec![num(x.q), num(grid.get(i, 0))]);
        points.push((x.q, grid.get(i, 0)));
    }
    table.write(&dir.join("slice.csv"))?;
    let plot = LinePlot {
        title: "slice p = 0".into(),
        x_label: "q".into(),
        y_label: "bracket".into(),
        series: vec![Series::new("bracket", points)],
        ..LinePlot::default()
    };
    write_text(&dir.join("slice.svg"), &plot.render())?;
    println!("wrote {}", dir.display());
    Ok(())
}
