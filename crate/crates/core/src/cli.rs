//! The `rigidity-lab` command line.
//!
//! Every subcommand prints a short text summary on stdout and writes its
//! tables and plots to the paths given by `--out` and `--svg`. Exit code 0
//! on success, 1 on bad input, 2 on numeric failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commutator::{dyadic_scan, tau_nodes, DyadicScan};
use crate::error::{Error, Result};
use crate::experiment::{
    nested_delta_runs, ExperimentRecord, FamilyKind, Objective, PerturbationFamily, SearchSettings,
};
use crate::field::{extrema, nested_poisson, parse_field_file, sample, Domain, FieldExpr, FieldFile, GridSample, Point2};
use crate::flow::{FlowParams, FlowSpec, Integrator};
use crate::hofer::{hof2_check, lemma2_check, Lemma2Settings};
use crate::implant::{default_chi, default_seed, theorem3_demo, ImplantSettings, Theorem3Report};
use crate::report::{num, read_text, write_text, Table};
use crate::svg::{Heatmap, LinePlot, Series};
use crate::tamed::{default_eta, tame_to_epsilon, tame_triple, square_tame_triple, TamedTriple};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "RIGIDITY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rigidity-lab", version, about = "Poisson bracket rigidity workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poisson bracket (or right-nested bracket) of two fields on a lattice.
    Bracket(BracketArgs),
    /// Integrates a Hamiltonian flow from a list of points.
    Flow(FlowArgs),
    /// Dyadic scan of the commutator residual.
    CommutatorScan(ScanArgs),
    /// Lengths and identities of the commutator path of H and K.
    HoferCheck(HoferArgs),
    /// Tames a triple of fields so that their triple bracket vanishes.
    Tame(TameArgs),
    /// Implants a planar triple into a 4D chart and tames it there.
    ImplantDemo(ImplantArgs),
    /// Searches small perturbations minimizing max{F', G'}.
    PerturbSearch(SearchArgs),
    /// Searches small perturbations minimizing max{{F', G'}, G'} (exploratory).
    TripleSearch(SearchArgs),
    /// Renders a CSV table as an SVG plot.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    Midpoint,
    Gauss4,
    Gauss6,
}

impl From<IntegratorArg> for Integrator {
    fn from(a: IntegratorArg) -> Self {
        match a {
            IntegratorArg::Midpoint => Integrator::ImplicitMidpoint,
            IntegratorArg::Gauss4 => Integrator::Gauss4,
            IntegratorArg::Gauss6 => Integrator::Gauss6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    TrigNoise,
    TamedLock,
    SmoothingBlend,
}

impl From<FamilyArg> for FamilyKind {
    fn from(a: FamilyArg) -> Self {
        match a {
            FamilyArg::TrigNoise => FamilyKind::TrigNoise,
            FamilyArg::TamedLock => FamilyKind::TamedLock,
            FamilyArg::SmoothingBlend => FamilyKind::SmoothingBlend,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Line,
    Heatmap,
}

#[derive(Debug, Args)]
pub struct Outputs {
    /// CSV table.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    /// Comma-separated `f`/`g` list, right-nested: `f,f,g` is {F,{F,G}}.
    #[arg(long)]
    pub nested: Option<String>,
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub h: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Starting points, one `q p` or `q,p` per line.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Gauss6)]
    pub integrator: IntegratorArg,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub kmin: u32,
    #[arg(long, default_value_t = 8)]
    pub kmax: u32,
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub tau_samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct HoferArgs {
    #[arg(long)]
    pub h: PathBuf,
    #[arg(long)]
    pub k: PathBuf,
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub tau_samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct TameArgs {
    #[arg(long)]
    pub f1: PathBuf,
    #[arg(long)]
    pub f2: PathBuf,
    #[arg(long)]
    pub f3: PathBuf,
    /// Grid parameter; mesh `c = 1/(3m)`.
    #[arg(long, required_unless_present = "epsilon")]
    pub m: Option<usize>,
    /// Plateau margin, default `c/8`.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Increase `m` until every taming error is at most this.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub m_max: usize,
    /// Work on the unit square with compactly supported fields.
    #[arg(long)]
    pub chart: bool,
    /// Verification lattice.
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Field file receiving the tamed fields.
    #[arg(long)]
    pub fields_out: Option<PathBuf>,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct ImplantArgs {
    #[arg(long, num_args = 1.., default_values_t = [0.1, 0.05, 0.025])]
    pub delta: Vec<f64>,
    /// Amplitude of the built-in seed triple.
    #[arg(long, default_value_t = 0.08)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 40)]
    pub n_plane1: usize,
    #[arg(long, default_value_t = 128)]
    pub n_plane2: usize,
    /// Text summary.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    /// One or more radii; several run warm-started from the smallest up.
    #[arg(long, num_args = 1.., required = true)]
    pub delta: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::TrigNoise)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Convergence history of the last run.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PlotKind::Line)]
    pub kind: PlotKind,
    /// x column (line) or first coordinate column (heatmap).
    #[arg(long)]
    pub x: Option<String>,
    /// y columns (line) or the second coordinate and value columns (heatmap).
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<String>,
    #[arg(long)]
    pub log_y: bool,
    #[arg(long)]
    pub title: Option<String>,
}

/// Parses `args`, runs the command with stdout as sink, and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool can only be installed once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Bracket(a) => bracket(a, out),
        Command::Flow(a) => flow(a, out),
        Command::CommutatorScan(a) => commutator_scan(a, out),
        Command::HoferCheck(a) => hofer_check(a, out),
        Command::Tame(a) => tame_cmd(a, out),
        Command::ImplantDemo(a) => implant_demo(a, out),
        Command::PerturbSearch(a) => search_cmd(Objective::Bracket, a, out),
        Command::TripleSearch(a) => search_cmd(Objective::Triple, a, out),
        Command::Plot(a) => plot(a),
    }
}

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    out.write_all(text.as_ref().as_bytes()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// First field of a field file.
pub fn load_field(path: &Path, domain: Domain) -> Result<FieldExpr> {
    let file: FieldFile = parse_field_file(&read_text(path)?, domain)?;
    file.first()
        .cloned()
        .ok_or_else(|| Error::precondition(format!("{}: no field found", path.display())))
}

fn grid_table(grid: &GridSample) -> Table {
    let n = grid.resolution();
    let mut t = Table::new(&["q", "p", "value"]);
    for i in 0..n {
        for j in 0..n {
            let x = grid.point(i, j);
            t.push(vec![num(x.q), num(x.p), num(grid.get(i, j))]);
        }
    }
    t
}

fn emit(outputs: &Outputs, table: &Table, svg: impl FnOnce() -> String) -> Result<()> {
    if let Some(p) = &outputs.out {
        table.write(p)?;
    }
    if let Some(p) = &outputs.svg {
        write_text(p, &svg())?;
    }
    Ok(())
}

fn bracket(a: &BracketArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_field(&a.f, Domain::Torus)?;
    let g = load_field(&a.g, Domain::Torus)?;
    let spec = a.nested.as_deref().unwrap_or("f,g");
    let fields = spec
        .split(',')
        .map(|s| match s.trim() {
            "f" | "F" => Ok(f.clone()),
            "g" | "G" => Ok(g.clone()),
            other => Err(Error::precondition(format!("nested spec entries are f or g, got `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if fields.len() < 2 {
        return Err(Error::precondition("a bracket needs at least two entries"));
    }
    if a.n < 2 {
        return Err(Error::precondition("n must be at least 2"));
    }
    let tree = nested_poisson(&fields);
    let e = extrema(&tree, a.n, 10);
    say(
        out,
        format!(
            "bracket {spec} on {n}x{n}\nmax {:.12e} at ({:.6}, {:.6})\nmin {:.12e} at ({:.6}, {:.6})\n",
            e.max,
            e.argmax.q,
            e.argmax.p,
            e.min,
            e.argmin.q,
            e.argmin.p,
            n = a.n
        ),
    )?;
    let grid = sample(&tree, a.n);
    emit(&a.outputs, &grid_table(&grid), || {
        Heatmap::from_grid(&grid, format!("bracket {spec}")).render()
    })
}

fn read_points(path: &Path) -> Result<Vec<Point2>> {
    let text = read_text(path)?;
    let mut pts = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Option<Vec<f64>> = nums.iter().map(|s| s.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => pts.push(Point2::new(v[0], v[1])),
            // a header line is tolerated at the top
            _ if pts.is_empty() && k == 0 => continue,
            _ => {
                return Err(Error::precondition(format!(
                    "{}:{}: expected two numbers",
                    path.display(),
                    k + 1
                )))
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::precondition(format!("{}: no points", path.display())));
    }
    Ok(pts)
}

fn flow(a: &FlowArgs, out: &mut dyn Write) -> Result<()> {
    let h = load_field(&a.h, Domain::Torus)?;
    let params = FlowParams {
        integrator: a.integrator.into(),
        ..FlowParams::with_dt(a.dt)
    };
    let spec = FlowSpec::new(h.clone(), params)?;
    let pts = read_points(&a.points)?;
    let mut table = Table::new(&["q0", "p0", "t", "q", "p", "energy_drift"]);
    let mut worst: f64 = 0.0;
    for x in &pts {
        let y = spec.advance(*x, a.t)?;
        let drift = h.evaluate(y) - h.evaluate(*x);
        worst = worst.max(drift.abs());
        table.push(vec![num(x.q), num(x.p), num(a.t), num(y.q), num(y.p), num(drift)]);
    }
    say(
        out,
        format!("flow of {} points to t = {}: max energy drift {worst:.3e}\n", pts.len(), a.t),
    )?;
    emit(&a.outputs, &table, || {
        let series = vec![
            Series::new("start", pts.iter().map(|x| (x.q, x.p)).collect()),
            Series::new(
                "end",
                table
                    .rows
                    .iter()
                    .map(|r| (r[3].parse().unwrap_or(f64::NAN), r[4].parse().unwrap_or(f64::NAN)))
                    .collect(),
            ),
        ];
        LinePlot {
            title: format!("flow to t = {}", a.t),
            x_label: "q".into(),
            y_label: "p".into(),
            log_y: false,
            series,
        }
        .render()
    })
}

fn scan_plot(scan: &DyadicScan) -> String {
    let pts = scan
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| ((scan.k_min as usize + i) as f64, r.ratio))
        .collect();
    LinePlot {
        title: "commutator residual / st".into(),
        x_label: "k (s = t = 2^-k)".into(),
        y_label: "ratio".into(),
        log_y: true,
        series: vec![Series::new("ratio", pts)],
    }
    .render()
}

fn commutator_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_field(&a.f, Domain::Torus)?;
    let g = load_field(&a.g, Domain::Torus)?;
    let scan = dyadic_scan(&f, &g, a.kmin, a.kmax, a.n, a.tau_samples, FlowParams::with_dt(a.dt))?;
    let mut text = format!("commutator scan at N = {}, tau samples = {}\n", a.n, a.tau_samples);
    for row in scan.csv_rows() {
        text.push_str(&format!("k = {:>2}  sup residual {}  ratio {}\n", row[0], row[3], row[4]));
    }
    match scan.decay_exponent {
        Some(e) => text.push_str(&format!("fitted log2 decay exponent {e:.4}\n")),
        None => text.push_str("fitted log2 decay exponent: undefined (vanishing ratio)\n"),
    }
    say(out, text)?;
    let table = Table::with_rows(&DyadicScan::CSV_HEADER, scan.csv_rows());
    emit(&a.outputs, &table, || scan_plot(&scan))
}

fn hofer_check(a: &HoferArgs, out: &mut dyn Write) -> Result<()> {
    let h = load_field(&a.h, Domain::Torus)?;
    let k = load_field(&a.k, Domain::Torus)?;
    let settings = Lemma2Settings {
        n: a.n,
        tau_samples: a.tau_samples,
        params: FlowParams::with_dt(a.dt),
        ..Lemma2Settings::default()
    };
    let r = lemma2_check(&h, &k, &settings)?;
    let hof2 = hof2_check(&h, &k, 1.0)?;
    say(
        out,
        format!(
            "commutator path of H and K at N = {}, {} tau intervals (upper bounds)\n\
             max_x L over tau: [{:.12e}, {:.12e}] (spread {:.3e})\n\
             max(H o psi_K - H)      {:.12e}\n\
             max{{H,K}}                {:.12e}\n\
             integral identity residual {:.3e}\n\
             |l+(H) - l+(K)| = {:.6e} <= 2 sup|H-K| = {:.6e}: {}\n",
            a.n,
            a.tau_samples,
            r.min_over_tau_of_max_l,
            r.max_over_tau_of_max_l,
            r.tau_spread(),
            r.max_h_pullback_diff,
            r.max_bracket,
            r.identity_residual,
            hof2.difference,
            hof2.bound,
            hof2.holds()
        ),
    )?;
    let taus = tau_nodes(a.tau_samples);
    let mut table = Table::new(&["tau", "max_L", "max_H_pullback_diff", "max_bracket"]);
    for (tau, v) in taus.iter().zip(&r.max_l_per_tau) {
        table.push(vec![num(*tau), num(*v), num(r.max_h_pullback_diff), num(r.max_bracket)]);
    }
    emit(&a.outputs, &table, || {
        line_plot_of(&table, "tau", &["max_L", "max_H_pullback_diff"], false, "commutator path maxima")
            .expect("numeric columns")
    })
}

fn tame_cmd(a: &TameArgs, out: &mut dyn Write) -> Result<()> {
    let domain = if a.chart { Domain::unit_chart() } else { Domain::Torus };
    let fs = [
        load_field(&a.f1, domain)?,
        load_field(&a.f2, domain)?,
        load_field(&a.f3, domain)?,
    ];
    let refs = [&fs[0], &fs[1], &fs[2]];
    let tamed: TamedTriple = match (a.epsilon, a.m) {
        (Some(eps), _) => {
            if a.eta.is_some() {
                return Err(Error::precondition("--eta is fixed to c/8 when --epsilon is given"));
            }
            tame_to_epsilon(refs, eps, a.m_max, domain)?
        }
        (None, Some(m)) => {
            if m == 0 {
                return Err(Error::precondition("m must be at least 1"));
            }
            let eta = a.eta.unwrap_or_else(|| default_eta(m));
            if a.chart {
                square_tame_triple(refs, m, eta)?
            } else {
                tame_triple(refs, m, eta)?
            }
        }
        (None, None) => return Err(Error::precondition("give --m or --epsilon")),
    };
    let check = tamed.verify(a.n);
    let mut text = format!(
        "tamed with m = {} (c = {:.6}), eta = {:.6e} on the {}\n",
        tamed.m(),
        tamed.grids[0].c(),
        tamed.eta,
        if a.chart { "unit square" } else { "torus" }
    );
    for k in 0..3 {
        text.push_str(&format!(
            "F{}: C0 error {:.6e} (oscillation bound {:.6e})\n",
            k + 1,
            tamed.c0_errors[k],
            tamed.oscillation_bounds[k]
        ));
    }
    text.push_str(&format!(
        "triple bracket sup on {n}x{n}: {:.3e}; unlocked points: {}\n",
        check.sup_triple_bracket,
        check.unlocked_points,
        n = a.n
    ));
    say(out, text)?;
    if let Some(p) = &a.fields_out {
        let file = FieldFile {
            entries: (0..3).map(|k| (format!("F{}_tamed", k + 1), tamed.fields[k].clone())).collect(),
        };
        write_text(p, &file.to_text())?;
    }
    let mut table = Table::new(&[
        "field",
        "m",
        "eta",
        "c0_error",
        "oscillation_bound",
        "sup_triple_bracket",
        "N",
    ]);
    for k in 0..3 {
        table.push(vec![
            (k + 1).to_string(),
            tamed.m().to_string(),
            num(tamed.eta),
            num(tamed.c0_errors[k]),
            num(tamed.oscillation_bounds[k]),
            num(check.sup_triple_bracket),
            a.n.to_string(),
        ]);
    }
    emit(&a.outputs, &table, || {
        let grid = GridSample::from_fn(128, domain, |x| tamed.fields[0].evaluate(x));
        Heatmap::from_grid(&grid, "tamed F1").render()
    })
}

fn implant_demo(a: &ImplantArgs, out: &mut dyn Write) -> Result<()> {
    let seed = default_seed(a.amplitude);
    let chi = default_chi();
    let settings = ImplantSettings {
        n_plane1: a.n_plane1,
        n_plane2: a.n_plane2,
        ..ImplantSettings::default()
    };
    let mut reports: Vec<Theorem3Report> = Vec::new();
    let mut text = String::new();
    for &delta in &a.delta {
        let r = theorem3_demo([&seed[0], &seed[1], &seed[2]], &chi, delta, &settings)?;
        text.push_str(&r.summary());
        text.push('\n');
        reports.push(r);
    }
    say(out, &text)?;
    if let Some(p) = &a.summary {
        write_text(p, &text)?;
    }
    let table = Table::with_rows(&Theorem3Report::CSV_HEADER, reports.iter().map(|r| r.csv_row()).collect());
    emit(&a.outputs, &table, || {
        line_plot_of(&table, "delta", &["dist_F", "dist_G", "dist_H", "dist_bound"], false, "implant C0 distances")
            .expect("numeric columns")
    })
}

fn search_cmd(objective: Objective, a: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_field(&a.f, Domain::Torus)?;
    let g = load_field(&a.g, Domain::Torus)?;
    let family = PerturbationFamily::new(a.family.into(), 0.0);
    let settings = SearchSettings {
        n: a.n,
        ..SearchSettings::default()
    };
    let records = nested_delta_runs(objective, &f, &g, &family, &a.delta, a.budget, a.seed, &settings)?;
    let mut text = String::new();
    if objective == Objective::Triple {
        text.push_str("EXPLORATORY: no reference value exists for this quantity\n");
    }
    for r in &records {
        text.push_str(&format!(
            "delta {:<8} best {:.12e} (baseline {:.12e}) after {} evaluations; dist {:.3e} {:.3e}; {}\n",
            r.delta, r.best_value, r.baseline, r.evaluations, r.dist_f, r.dist_g, r.label()
        ));
    }
    say(out, text)?;
    let table = Table::with_rows(&ExperimentRecord::CSV_HEADER, records.iter().map(|r| r.csv_row()).collect());
    let last = records.last().expect("at least one delta");
    let history = Table::with_rows(&ExperimentRecord::HISTORY_HEADER, last.history_rows());
    if let Some(p) = &a.history {
        history.write(p)?;
    }
    emit(&a.outputs, &table, || {
        let series = records
            .iter()
            .map(|r| {
                Series::new(
                    format!("delta {}", r.delta),
                    r.history.iter().map(|&(k, v)| (k as f64, v)).collect(),
                )
            })
            .collect();
        LinePlot {
            title: format!("{} best value", family.kind),
            x_label: "evaluations".into(),
            y_label: "best value".into(),
            log_y: false,
            series,
        }
        .render()
    })
}

/// Line plot of named numeric columns of a table.
pub fn line_plot_of(table: &Table, x: &str, ys: &[&str], log_y: bool, title: &str) -> Result<String> {
    let column = |name: &str| -> Result<Vec<f64>> {
        let k = table
            .column_index(name)
            .ok_or_else(|| Error::precondition(format!("no column `{name}`")))?;
        table
            .numeric_column(k)
            .ok_or_else(|| Error::precondition(format!("column `{name}` is not numeric")))
    };
    let xs = column(x)?;
    let mut series = Vec::new();
    for y in ys {
        let vs = column(y)?;
        series.push(Series::new(*y, xs.iter().copied().zip(vs).collect()));
    }
    Ok(LinePlot {
        title: title.into(),
        x_label: x.into(),
        y_label: if ys.len() == 1 { ys[0].into() } else { "value".into() },
        log_y,
        series,
    }
    .render())
}

/// Heatmap of a long-format table `(x, y, value)`.
pub fn heatmap_of(table: &Table, x: &str, y: &str, value: &str, title: &str) -> Result<String> {
    let column = |name: &str| -> Result<Vec<f64>> {
        let k = table
            .column_index(name)
            .ok_or_else(|| Error::precondition(format!("no column `{name}`")))?;
        table
            .numeric_column(k)
            .ok_or_else(|| Error::precondition(format!("column `{name}` is not numeric")))
    };
    let (xs, ys, vs) = (column(x)?, column(y)?, column(value)?);
    let distinct = |v: &[f64]| {
        let mut d = v.to_vec();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    };
    let (ux, uy) = (distinct(&xs), distinct(&ys));
    if ux.len() * uy.len() != vs.len() {
        return Err(Error::precondition(format!(
            "heatmap needs a full lattice: {} x {} cells but {} rows",
            ux.len(),
            uy.len(),
            vs.len()
        )));
    }
    let mut values = vec![f64::NAN; vs.len()];
    for ((xv, yv), v) in xs.iter().zip(&ys).zip(&vs) {
        let i = ux.binary_search_by(|u| u.total_cmp(xv)).expect("present");
        let j = uy.binary_search_by(|u| u.total_cmp(yv)).expect("present");
        values[i * uy.len() + j] = *v;
    }
    let (x_range, y_range) = match (ux.first(), ux.last(), uy.first(), uy.last()) {
        (Some(a), Some(b), Some(c), Some(d)) => ((*a, *b), (*c, *d)),
        _ => ((0.0, 1.0), (0.0, 1.0)),
    };
    Ok(Heatmap {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        x_range,
        y_range,
        nx: ux.len(),
        ny: uy.len(),
        values,
    }
    .render())
}

fn plot(a: &PlotArgs) -> Result<()> {
    let table = Table::read(&a.input)?;
    let numeric: Vec<&str> = (0..table.header.len())
        .filter(|&k| table.numeric_column(k).is_some())
        .map(|k| table.header[k].as_str())
        .collect();
    let title = a
        .title
        .clone()
        .unwrap_or_else(|| a.input.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let svg = match a.kind {
        PlotKind::Line => {
            let x = match &a.x {
                Some(x) => x.as_str(),
                None => *numeric
                    .first()
                    .ok_or_else(|| Error::precondition("no numeric column to plot"))?,
            };
            let ys: Vec<&str> = if a.y.is_empty() {
                numeric.iter().copied().filter(|c| *c != x).collect()
            } else {
                a.y.iter().map(String::as_str).collect()
            };
            line_plot_of(&table, x, &ys, a.log_y, &title)?
        }
        PlotKind::Heatmap => {
            let cols: Vec<&str> = match (&a.x, a.y.as_slice()) {
                (Some(x), [y, v]) => vec![x.as_str(), y.as_str(), v.as_str()],
                (None, []) if numeric.len() >= 3 => numeric[..3].to_vec(),
                _ => {
                    return Err(Error::precondition(
                        "heatmap needs --x X --y Y,VALUE or three numeric columns",
                    ))
                }
            };
            heatmap_of(&table, cols[0], cols[1], cols[2], &title)?
        }
    };
    write_text(&a.out, &svg)
}
