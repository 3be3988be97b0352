//! Field sweeps, pair entanglement range and thermal death temperatures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlator::{correlator_set_from_table, GTable};
use crate::entanglement::{
    concurrence, report_for_correlators, Cut, EntanglementReport, Pair, ZERO_TOL,
};
use crate::error::{Error, Result};
use crate::params::{ModelParams, QuadratureConfig, TripleGeometry};
use crate::state::reduced_pair_from_table;

/// Triple layouts used for field sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureConfig {
    /// A spin and an adjacent pair at distance `d`: `(α, β) = (d, 1)`.
    ConfigA(usize),
    /// Symmetric triple: `(α, β) = (d, d)`.
    ConfigB(usize),
}

impl FigureConfig {
    pub fn geometry(self) -> Result<TripleGeometry> {
        match self {
            FigureConfig::ConfigA(d) => TripleGeometry::new(d, 1),
            FigureConfig::ConfigB(d) => TripleGeometry::new(d, d),
        }
    }
}

/// Outcome of [`pair_range`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRange {
    pub range: usize,
    /// The pair at `d_max` is still entangled, so the true range may be larger.
    pub capped: bool,
}

/// Largest distance `d ≤ d_max` with nonzero concurrence, or 0.
///
/// Every distance is evaluated: the concurrence need not be monotone in `d`.
pub fn pair_range(params: &ModelParams, d_max: usize, quad: &QuadratureConfig) -> Result<PairRange> {
    if d_max < 1 {
        return Err(Error::invalid("d_max", "must be >= 1"));
    }
    let table = GTable::new(params, quad, d_max + 1)?;
    let mut range = 0;
    let mut last = 0.0;
    for d in 1..=d_max {
        last = concurrence(&reduced_pair_from_table(&table, d))?;
        if last > ZERO_TOL {
            range = d;
        }
    }
    Ok(PairRange {
        range,
        capped: last > ZERO_TOL,
    })
}

fn analyze_uncached(
    params: &ModelParams,
    geom: &TripleGeometry,
    quad: &QuadratureConfig,
) -> Result<EntanglementReport> {
    let table = GTable::new(params, quad, GTable::window_for(geom))?;
    report_for_correlators(&correlator_set_from_table(&table, geom), ZERO_TOL)
}

/// One point of a field sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub t: f64,
    pub alpha: usize,
    pub beta: usize,
    pub neg_first: f64,
    pub neg_middle: f64,
    pub neg_last: f64,
    pub conc_ij: f64,
    pub conc_jk: f64,
    pub conc_ik: f64,
    pub class_label: String,
    /// Upstream failure at this point; the numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_report(h: f64, t: f64, geom: &TripleGeometry, r: &EntanglementReport) -> Self {
        Self {
            h,
            t,
            alpha: geom.alpha(),
            beta: geom.beta(),
            neg_first: r.negativity(Cut::FirstVsRest),
            neg_middle: r.negativity(Cut::MiddleVsRest),
            neg_last: r.negativity(Cut::LastVsRest),
            conc_ij: r.concurrence(Pair::Ij),
            conc_jk: r.concurrence(Pair::Jk),
            conc_ik: r.concurrence(Pair::Ik),
            class_label: r.classification.label().to_string(),
            error: None,
        }
    }

    fn failed(h: f64, t: f64, geom: &TripleGeometry, err: &Error) -> Self {
        Self {
            h,
            t,
            alpha: geom.alpha(),
            beta: geom.beta(),
            neg_first: f64::NAN,
            neg_middle: f64::NAN,
            neg_last: f64::NAN,
            conc_ij: f64::NAN,
            conc_jk: f64::NAN,
            conc_ik: f64::NAN,
            class_label: "error".to_string(),
            error: Some(err.to_string()),
        }
    }

    pub fn max_concurrence(&self) -> f64 {
        self.conc_ij.max(self.conc_jk).max(self.conc_ik)
    }
}

fn check_grid(grid: &[f64], name: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid(name, "grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// Evaluates `config` at every field in `h_grid`, in parallel, returning rows
/// in grid order. Per-point failures are recorded in the row.
pub fn sweep_field(
    gamma: f64,
    t: f64,
    config: FigureConfig,
    h_grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<SweepRow>> {
    check_grid(h_grid, "h_grid")?;
    let geom = config.geometry()?;
    ModelParams::new(h_grid[0], gamma, t)?;
    quad.validate()?;
    Ok(h_grid
        .par_iter()
        .map(|&h| {
            let report = ModelParams::new(h, gamma, t).and_then(|p| analyze_uncached(&p, &geom, quad));
            match report {
                Ok(r) => SweepRow::from_report(h, t, &geom, &r),
                Err(e) => SweepRow::failed(h, t, &geom, &e),
            }
        })
        .collect())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Points of the scouting grid used before bisection.
pub const SCOUT_POINTS: usize = 200;
/// Target bracket width of every threshold.
pub const BRACKET_WIDTH: f64 = 1e-4;

/// A death temperature as the midpoint of a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub t: f64,
    pub half_width: f64,
    /// The scouting grid showed a revival after a death, so the last sign
    /// change was bisected instead of the first.
    pub grid_fallback: bool,
}

/// Death temperatures for the adjacent triple `α = β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub h: f64,
    pub gamma: f64,
    /// Concurrence of the external pair `(i, k)`.
    pub t_c2: Option<Threshold>,
    /// Concurrence of an adjacent pair.
    pub t_c1: Option<Threshold>,
    /// Negativity across an external cut.
    pub t_n_ext: Option<Threshold>,
    /// Negativity across the central cut.
    pub t_n_centr: Option<Threshold>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    ConcExternal,
    ConcAdjacent,
    NegExternal,
    NegCentral,
}

impl Quantity {
    const ALL: [Quantity; 4] = [
        Quantity::ConcExternal,
        Quantity::ConcAdjacent,
        Quantity::NegExternal,
        Quantity::NegCentral,
    ];

    fn name(self) -> &'static str {
        match self {
            Quantity::ConcExternal => "external-pair concurrence",
            Quantity::ConcAdjacent => "adjacent-pair concurrence",
            Quantity::NegExternal => "external-cut negativity",
            Quantity::NegCentral => "central-cut negativity",
        }
    }

    fn value(self, r: &EntanglementReport) -> f64 {
        match self {
            Quantity::ConcExternal => r.concurrence(Pair::Ik),
            Quantity::ConcAdjacent => r.concurrence(Pair::Ij),
            Quantity::NegExternal => r.negativity(Cut::FirstVsRest),
            Quantity::NegCentral => r.negativity(Cut::MiddleVsRest),
        }
    }
}

impl ThresholdSet {
    /// Thresholds in the expected order of death.
    pub fn ordered(&self) -> [Option<Threshold>; 4] {
        [self.t_c2, self.t_c1, self.t_n_ext, self.t_n_centr]
    }

    pub fn all_present(&self) -> bool {
        self.ordered().iter().all(Option::is_some)
    }

    /// `t_c2 ≤ t_c1 ≤ t_n_ext ≤ t_n_centr` up to bracket widths, checked
    /// between consecutive present thresholds.
    pub fn ordering_holds(&self) -> bool {
        let present: Vec<Threshold> = self.ordered().into_iter().flatten().collect();
        present
            .windows(2)
            .all(|w| w[0].t <= w[1].t + w[0].half_width + w[1].half_width)
    }

    /// Open temperature interval `(t_n_ext, t_n_centr)` in which only the
    /// central cut is NPT. The true region may be wider since PPT
    /// entanglement is invisible to negativity.
    pub fn bound_window(&self) -> Option<(f64, f64)> {
        match (self.t_n_ext, self.t_n_centr) {
            (Some(a), Some(b)) if b.t - b.half_width > a.t + a.half_width => Some((a.t, b.t)),
            _ => None,
        }
    }
}

/// Locates the four death temperatures of the adjacent triple at field `h`.
///
/// A quantity already zero at `t = 0` has no threshold. A quantity still
/// alive at `t_max` is an error.
pub fn thermal_thresholds(
    gamma: f64,
    h: f64,
    t_max: f64,
    quad: &QuadratureConfig,
) -> Result<ThresholdSet> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::invalid("t_max", format!("{t_max} must be positive")));
    }
    let base = ModelParams::ground_state(h, gamma)?;
    quad.validate()?;
    let geom = TripleGeometry::block();
    let eval = |t: f64| -> Result<EntanglementReport> {
        analyze_uncached(&base.with_t(t)?, &geom, quad)
    };

    let grid = linear_grid(0.0, t_max, SCOUT_POINTS + 1);
    let reports: Vec<EntanglementReport> = grid
        .par_iter()
        .map(|&t| eval(t))
        .collect::<Result<_>>()?;

    let mut out = [None; 4];
    for (slot, q) in out.iter_mut().zip(Quantity::ALL) {
        let alive: Vec<bool> = reports.iter().map(|r| q.value(r) > ZERO_TOL).collect();
        if !alive[0] {
            continue;
        }
        if alive[SCOUT_POINTS] {
            return Err(Error::NoBracket {
                quantity: q.name(),
                t_max,
            });
        }
        let first_dead = alive.iter().position(|a| !a).expect("dead at t_max");
        let last_alive = alive.iter().rposition(|&a| a).expect("alive at t = 0");
        let grid_fallback = last_alive >= first_dead;
        if grid_fallback {
            log::warn!("{} revives on the scouting grid at h = {h}", q.name());
        }
        let (mut lo, mut hi) = (grid[last_alive], grid[last_alive + 1]);
        while hi - lo > BRACKET_WIDTH {
            let mid = 0.5 * (lo + hi);
            if q.value(&eval(mid)?) > ZERO_TOL {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        *slot = Some(Threshold {
            t: 0.5 * (lo + hi),
            half_width: 0.5 * (hi - lo),
            grid_fallback,
        });
    }

    let [t_c2, t_c1, t_n_ext, t_n_centr] = out;
    let set = ThresholdSet {
        h,
        gamma,
        t_c2,
        t_c1,
        t_n_ext,
        t_n_centr,
    };
    if !set.ordering_holds() {
        log::warn!("threshold ordering violated at h = {h}, γ = {gamma}: {set:?}");
    }
    Ok(set)
}

/// Field at which the ground state factorizes, `h_f = √(1 − γ²)`.
pub fn factorizing_field(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma", format!("{gamma} is outside (0, 1]")));
    }
    Ok((1.0 - gamma * gamma).sqrt())
}
