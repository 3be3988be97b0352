//! Command-line front end. [`run`] takes the full argument list (program name
//! first) and returns the process exit code:
//!
//! * `0` success
//! * `1` usage error, malformed flag value or out-of-domain parameter
//! * `2` numerical or I/O failure
//!
//! Temperatures given with `--T` are reduced temperatures, in the same units
//! as the quasiparticle dispersion.

pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use xychain::correlator::g_k;
use xychain::oracle::{compare, CorrelatorDeviation, FiniteChain};
use xychain::scans::{pair_range, sweep_field, thermal_thresholds, FigureConfig, SweepRow};
use xychain::state::rho3_for;
use xychain::{
    analyze_triple, correlator_set, CorrelatorSet, Error, ModelParams, QuadratureConfig,
    TripleGeometry,
};

pub use output::{emit, format_number, OutputFormat, Table, Value};

#[derive(Debug, Parser)]
#[command(name = "xychain", version, about = "Entanglement of three spins in the infinite XY chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Contractions G_k for k in --k
    G,
    /// The nineteen correlators of the triple (--alpha, --beta)
    Correlators,
    /// Entries of the three-spin density matrix
    Rho,
    /// Negativities, concurrences and classification of one triple
    Analyze,
    /// Largest distance with an entangled spin pair, up to --dmax
    Range,
    /// Sweep the field over --grid for the layout --config
    ScanField,
    /// Death temperatures over the field grid --grid; --T is the upper end of the search
    ScanThermal,
    /// Exact diagonalization vs finite free fermions vs the infinite chain
    OracleCompare,
}

#[derive(Debug, Args)]
struct Common {
    /// Transverse field
    #[arg(long = "h", global = true, default_value_t = 0.5, allow_hyphen_values = true)]
    h: f64,
    /// Anisotropy in [0, 1]
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Reduced temperature (scan-thermal: upper end of the search, default 2)
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, global = true, default_value_t = 1)]
    alpha: usize,
    #[arg(long, global = true, default_value_t = 1)]
    beta: usize,
    /// a:<d> for (α, β) = (d, 1), b:<d> for (d, d)
    #[arg(long, global = true, default_value = "b:4", value_parser = parse_config)]
    config: FigureConfig,
    /// lo:hi:n, n evenly spaced points including both ends
    #[arg(long, global = true, default_value = "0:1.5:20", value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[arg(long, global = true, default_value_t = 10)]
    dmax: usize,
    /// Chain length for oracle-compare
    #[arg(long = "N", global = true, default_value_t = 8)]
    n: usize,
    /// i,j,k for oracle-compare (default: central adjacent triple)
    #[arg(long, global = true, value_parser = parse_sites)]
    sites: Option<[usize; 3]>,
    /// Absolute quadrature tolerance for each G_k
    #[arg(long, global = true, default_value_t = 1e-10, allow_hyphen_values = true)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// lo:hi, inclusive range of k for the g subcommand
    #[arg(long, global = true, default_value = "-3:3", value_parser = parse_k_range, allow_hyphen_values = true)]
    k: (i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        xychain::scans::linear_grid(self.lo, self.hi, self.n)
    }
}

fn parse_config(s: &str) -> Result<FigureConfig, String> {
    let (kind, d) = s.split_once(':').ok_or("expected a:<d> or b:<d>")?;
    let d: usize = d.parse().map_err(|e| format!("bad distance {d:?}: {e}"))?;
    if d == 0 {
        return Err("distance must be >= 1".into());
    }
    match kind {
        "a" | "A" => Ok(FigureConfig::ConfigA(d)),
        "b" | "B" => Ok(FigureConfig::ConfigB(d)),
        _ => Err(format!("unknown layout {kind:?}, expected a or b")),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err("expected lo:hi:n".into());
    };
    let lo: f64 = lo.parse().map_err(|e| format!("bad lo {lo:?}: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("bad hi {hi:?}: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("bad n {n:?}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("grid ends must be finite".into());
    }
    if n == 0 {
        return Err("grid needs at least one point".into());
    }
    if n > 1 && hi <= lo {
        return Err(format!("grid must be increasing, got {lo}:{hi}"));
    }
    Ok(Grid { lo, hi, n })
}

fn parse_sites(s: &str) -> Result<[usize; 3], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|e| format!("bad site {x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [i, j, k] = v[..] else {
        return Err("expected three sites i,j,k".into());
    };
    if !(i < j && j < k) {
        return Err("sites must be strictly increasing".into());
    }
    Ok([i, j, k])
}

fn parse_k_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: i64 = lo.parse().map_err(|e| format!("bad lo {lo:?}: {e}"))?;
    let hi: i64 = hi.parse().map_err(|e| format!("bad hi {hi:?}: {e}"))?;
    if hi < lo {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::SizeLimit { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(format!("I/O error: {e}"))
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let quad = QuadratureConfig::new(c.tol, QuadratureConfig::default().max_subdivisions)?;
    let (table, row_errors) = match cli.command {
        Command::G => (g_table(c, &quad)?, 0),
        Command::Correlators => (correlators_table(c, &quad)?, 0),
        Command::Rho => (rho_table(c, &quad)?, 0),
        Command::Analyze => (analyze_table(c, &quad)?, 0),
        Command::Range => (range_table(c, &quad)?, 0),
        Command::ScanField => scan_field_table(c, &quad)?,
        Command::ScanThermal => (scan_thermal_table(c, &quad)?, 0),
        Command::OracleCompare => (oracle_table(c, &quad)?, 0),
    };
    write_table(&table, c)?;
    if row_errors > 0 {
        return Err(Failure::Numerical(format!("{row_errors} grid points failed; see the error column")));
    }
    Ok(())
}

fn write_table(table: &Table, c: &Common) -> Result<(), Failure> {
    match &c.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(table, c.format, &mut w)?;
            w.flush()?;
        }
        None => emit(table, c.format, &mut io::stdout().lock())?,
    }
    Ok(())
}

fn params(c: &Common) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(c.h, c.gamma, c.t.unwrap_or(0.0))?)
}

fn geometry(c: &Common) -> Result<TripleGeometry, Failure> {
    Ok(TripleGeometry::new(c.alpha, c.beta)?)
}

fn g_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let p = params(c)?;
    let mut t = Table::new(vec!["k", "g"]);
    for k in c.k.0..=c.k.1 {
        t.push(vec![k.into(), g_k(k, &p, quad)?.into()]);
    }
    Ok(t)
}

fn correlators_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let (p, geom) = (params(c)?, geometry(c)?);
    let set = correlator_set(&geom, &p, quad)?;
    let mut columns = vec!["h", "gamma", "t", "alpha", "beta"];
    columns.extend(CorrelatorSet::NAMES);
    let mut t = Table::new(columns);
    let mut row: Vec<Value> = vec![p.h.into(), p.gamma.into(), p.t.into(), c.alpha.into(), c.beta.into()];
    row.extend(set.values().map(Value::from));
    t.push(row);
    Ok(t)
}

fn rho_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let (p, geom) = (params(c)?, geometry(c)?);
    let rho = rho3_for(&geom, &p, quad)?;
    let mut t = Table::new(vec!["row", "col", "value"]);
    for r in 0..8usize {
        for col in 0..8usize {
            t.push(vec![r.into(), col.into(), rho.matrix()[(r, col)].into()]);
        }
    }
    Ok(t)
}

const SWEEP_COLUMNS: [&str; 12] = [
    "h", "t", "alpha", "beta", "neg_first", "neg_middle", "neg_last", "conc_ij", "conc_jk",
    "conc_ik", "class_label", "error",
];

fn sweep_row(r: &SweepRow) -> Vec<Value> {
    vec![
        r.h.into(),
        r.t.into(),
        r.alpha.into(),
        r.beta.into(),
        r.neg_first.into(),
        r.neg_middle.into(),
        r.neg_last.into(),
        r.conc_ij.into(),
        r.conc_jk.into(),
        r.conc_ik.into(),
        r.class_label.as_str().into(),
        r.error.as_deref().into(),
    ]
}

fn analyze_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let (p, geom) = (params(c)?, geometry(c)?);
    let report = analyze_triple(&p, &geom, quad)?;
    let mut t = Table::new(SWEEP_COLUMNS.to_vec());
    t.push(sweep_row(&SweepRow::from_report(p.h, p.t, &geom, &report)));
    Ok(t)
}

fn range_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let p = params(c)?;
    if c.dmax == 0 {
        return Err(Failure::Usage("--dmax must be >= 1".into()));
    }
    let r = pair_range(&p, c.dmax, quad)?;
    let mut t = Table::new(vec!["h", "gamma", "t", "dmax", "range", "capped"]);
    t.push(vec![p.h.into(), p.gamma.into(), p.t.into(), c.dmax.into(), r.range.into(), r.capped.into()]);
    Ok(t)
}

fn scan_field_table(c: &Common, quad: &QuadratureConfig) -> Result<(Table, usize), Failure> {
    // validate the fixed parameters once before the sweep
    ModelParams::new(c.grid.lo.max(0.0), c.gamma, c.t.unwrap_or(0.0))?;
    let rows = sweep_field(c.gamma, c.t.unwrap_or(0.0), c.config, &c.grid.points(), quad)?;
    let mut t = Table::new(SWEEP_COLUMNS.to_vec());
    for r in &rows {
        t.push(sweep_row(r));
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok((t, failed))
}

fn scan_thermal_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let t_max = c.t.unwrap_or(2.0);
    let grid = c.grid.points();
    for &h in &grid {
        ModelParams::new(h, c.gamma, t_max)?;
    }
    let mut t = Table::new(vec![
        "h", "gamma", "t_c2", "t_c1", "t_n_ext", "t_n_centr", "half_width", "ordering_holds",
    ]);
    for h in grid {
        let set = thermal_thresholds(c.gamma, h, t_max, quad)?;
        let [c2, c1, ext, centr] = set.ordered().map(|x| Value::from(x.map(|th| th.t)));
        let half_width = set.ordered().iter().flatten().map(|th| th.half_width).fold(0.0, f64::max);
        t.push(vec![
            h.into(),
            c.gamma.into(),
            c2,
            c1,
            ext,
            centr,
            half_width.into(),
            set.ordering_holds().into(),
        ]);
    }
    Ok(t)
}

fn spread(d: &CorrelatorDeviation) -> f64 {
    (d.ed - d.fermion).abs().max((d.ed - d.thermodynamic).abs())
}

fn oracle_table(c: &Common, quad: &QuadratureConfig) -> Result<Table, Failure> {
    let p = params(c)?;
    let sites = match c.sites {
        Some(s) => s,
        None => FiniteChain::new(c.n, p)?.bulk_sites(&TripleGeometry::block())?,
    };
    let cmp = compare(&p, c.n, sites, quad)?;
    let worst = cmp
        .correlators
        .iter()
        .max_by(|a, b| spread(a).total_cmp(&spread(b)))
        .map(|d| d.name);
    let mut t = Table::new(vec![
        "n_sites",
        "site_i",
        "site_j",
        "site_k",
        "h",
        "gamma",
        "t",
        "ed_vs_fermion",
        "ed_vs_thermodynamic",
        "fermion_vs_thermodynamic",
        "worst_correlator",
    ]);
    t.push(vec![
        cmp.n_sites.into(),
        sites[0].into(),
        sites[1].into(),
        sites[2].into(),
        p.h.into(),
        p.gamma.into(),
        p.t.into(),
        cmp.ed_vs_fermion.into(),
        cmp.ed_vs_thermodynamic.into(),
        cmp.fermion_vs_thermodynamic.into(),
        worst.into(),
    ]);
    Ok(t)
}
