//! Spin correlators of the XY chain from the fermionic contraction `G_k`.
//!
//! After the Jordan–Wigner map the spins become Majorana pairs
//! `A_l = c_l + c_l†`, `B_l = c_l − c_l†`, with `σᶻ_l = −A_l B_l`. In a
//! Gaussian state the only nonvanishing contractions between distinct
//! operators are `⟨A_l B_m⟩`, so every spin correlator collapses to a
//! determinant of those. In the infinite chain `⟨A_l B_m⟩ = G_{m−l}` and the
//! matrices are (nearly) Toeplitz; the oracle reuses the same shapes on an
//! open chain through the [`Contraction`] trait.
//!
//! Sign convention: the chain is ferromagnetic,
//! `H = −¼ Σ [(1+γ) σˣσˣ + (1−γ) σʸσʸ] − (h/2) Σ σᶻ`, so that
//! `⟨σˣ_l σˣ_{l+1}⟩ = +1` for the Ising chain at `h = 0`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::params::{ModelParams, QuadratureConfig, TripleGeometry};
use crate::quadrature;

/// Quasiparticle energy `Λ(φ) = sqrt(γ² sin²φ + (h − cos φ)²)`.
pub fn dispersion(phi: f64, params: &ModelParams) -> f64 {
    let s = params.gamma * phi.sin();
    let c = params.h - phi.cos();
    s.hypot(c)
}

/// Thermal weight `tanh(Λ/2t)/Λ`, with `tanh → 1` at `t = 0`.
fn thermal_weight(lambda: f64, t: f64) -> f64 {
    if t == 0.0 {
        if lambda == 0.0 {
            // only reachable at φ = 0, h = 1 where the numerator vanishes too
            0.0
        } else {
            1.0 / lambda
        }
    } else {
        let x = lambda / (2.0 * t);
        if x < 1e-8 {
            1.0 / (2.0 * t)
        } else {
            x.tanh() / lambda
        }
    }
}

fn initial_breakpoints(k: i64, params: &ModelParams) -> Vec<f64> {
    // Roughly one panel per period of cos(kφ).
    let n = 2 + (k.unsigned_abs() as usize) / 2;
    let mut points: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
    // Fermi point: for small γ the integrand has a kink where cos φ = h.
    if params.h > 0.0 && params.h < 1.0 {
        let fermi = params.h.acos();
        if points.iter().all(|p| (p - fermi).abs() > 1e-9) {
            points.push(fermi);
            points.sort_by(f64::total_cmp);
        }
    }
    points
}

/// `G_k = ⟨A_l B_{l+k}⟩` in the thermodynamic limit.
///
/// `G_k = (1/π) ∫₀^π [cos(kφ)(cos φ − h) − γ sin(kφ) sin φ] tanh(Λ/2t)/Λ dφ`.
pub fn g_k(k: i64, params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    params.validate()?;
    quad.validate()?;
    let kf = k as f64;
    let (h, gamma, t) = (params.h, params.gamma, params.t);
    let integrand = |phi: f64| {
        let lambda = dispersion(phi, params);
        let num = (kf * phi).cos() * (phi.cos() - h) - gamma * (kf * phi).sin() * phi.sin();
        num * thermal_weight(lambda, t)
    };
    let budget = quad.max_subdivisions + 8 * k.unsigned_abs() as usize;
    let breakpoints = initial_breakpoints(k, params);
    match quadrature::integrate(integrand, &breakpoints, quad.abs_tol * PI, budget) {
        Ok(est) => Ok(est.value / PI),
        Err(est) => Err(Error::QuadratureNonConvergence {
            k,
            abs_tol: quad.abs_tol,
            estimate: est.error / PI,
            panels: est.panels,
        }),
    }
}

/// Source of Majorana contractions `⟨A_l B_m⟩` between sites `l` and `m`.
pub trait Contraction {
    fn contraction(&self, l: i64, m: i64) -> f64;
}

/// `G_k` for `k ∈ [−max_k, max_k]`, evaluated once per `(params, quad)`.
#[derive(Debug, Clone)]
pub struct GTable {
    params: ModelParams,
    quad: QuadratureConfig,
    max_k: usize,
    values: Vec<f64>,
}

impl GTable {
    pub fn new(params: &ModelParams, quad: &QuadratureConfig, max_k: usize) -> Result<Self> {
        let m = max_k as i64;
        let values = (-m..=m)
            .map(|k| g_k(k, params, quad))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            quad: *quad,
            max_k,
            values,
        })
    }

    /// Table from the process-wide cache, computed on a miss.
    pub fn shared(params: &ModelParams, quad: &QuadratureConfig, max_k: usize) -> Result<Arc<Self>> {
        GTableCache::global().get_or_compute(params, quad, max_k)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    /// `G_k`; panics if `|k|` exceeds the tabulated window.
    pub fn get(&self, k: i64) -> f64 {
        let idx = k + self.max_k as i64;
        assert!(
            idx >= 0 && (idx as usize) < self.values.len(),
            "G_{k} outside the tabulated window ±{}",
            self.max_k
        );
        self.values[idx as usize]
    }

    /// Window needed for every correlator of a geometry.
    pub fn window_for(geom: &TripleGeometry) -> usize {
        geom.gamma_dist() + 1
    }
}

impl Contraction for GTable {
    fn contraction(&self, l: i64, m: i64) -> f64 {
        self.get(m - l)
    }
}

type CacheKey = ([u64; 3], [u64; 2]);

/// Read-through cache of [`GTable`]s keyed by the exact bits of the inputs.
///
/// A cached table is reused whenever its window covers the request;
/// otherwise a wider table is computed and replaces it.
#[derive(Debug, Default)]
pub struct GTableCache {
    tables: RwLock<HashMap<CacheKey, Arc<GTable>>>,
}

const CACHE_CAPACITY: usize = 4096;

impl GTableCache {
    pub fn global() -> &'static GTableCache {
        static CACHE: OnceLock<GTableCache> = OnceLock::new();
        CACHE.get_or_init(GTableCache::default)
    }

    pub fn get_or_compute(
        &self,
        params: &ModelParams,
        quad: &QuadratureConfig,
        max_k: usize,
    ) -> Result<Arc<GTable>> {
        let key = (params.key(), quad.key());
        if let Some(t) = self.tables.read().expect("poisoned").get(&key) {
            if t.max_k >= max_k {
                return Ok(Arc::clone(t));
            }
        }
        let table = Arc::new(GTable::new(params, quad, max_k)?);
        let mut map = self.tables.write().expect("poisoned");
        if map.len() >= CACHE_CAPACITY {
            map.clear();
        }
        let entry = map.entry(key).or_insert_with(|| Arc::clone(&table));
        if entry.max_k < table.max_k {
            *entry = Arc::clone(&table);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.tables.read().expect("poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.tables.write().expect("poisoned").clear();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwoPointKind {
    XX,
    YY,
    ZZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThreePointKind {
    ZZZ,
    XXZ,
    ZXX,
    XZX,
    YYZ,
    ZYY,
    YZY,
}

impl ThreePointKind {
    pub const ALL: [ThreePointKind; 7] = [
        ThreePointKind::ZZZ,
        ThreePointKind::XXZ,
        ThreePointKind::ZXX,
        ThreePointKind::XZX,
        ThreePointKind::YYZ,
        ThreePointKind::ZYY,
        ThreePointKind::YZY,
    ];
}

fn span(a: i64, b: i64) -> impl Iterator<Item = i64> {
    a..b
}

/// Determinant of `[⟨A_r B_c⟩]` over the given A-sites (rows) and B-sites (columns).
fn contraction_det<C: Contraction + ?Sized>(c: &C, rows: &[i64], cols: &[i64]) -> f64 {
    debug_assert_eq!(rows.len(), cols.len());
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |r, col| c.contraction(rows[r], cols[col]));
    determinant(m)
}

/// `⟨σᶻ_l⟩ = −⟨A_l B_l⟩`.
pub fn z_at<C: Contraction + ?Sized>(c: &C, l: i64) -> f64 {
    -c.contraction(l, l)
}

/// Two-point correlator between sites `i < j`.
pub fn two_point_at<C: Contraction + ?Sized>(c: &C, kind: TwoPointKind, i: i64, j: i64) -> f64 {
    debug_assert!(i < j);
    match kind {
        TwoPointKind::ZZ => {
            c.contraction(i, i) * c.contraction(j, j) - c.contraction(i, j) * c.contraction(j, i)
        }
        TwoPointKind::XX => {
            let rows: Vec<i64> = span(i + 1, j + 1).collect();
            let cols: Vec<i64> = span(i, j).collect();
            contraction_det(c, &rows, &cols)
        }
        TwoPointKind::YY => {
            let rows: Vec<i64> = span(i, j).collect();
            let cols: Vec<i64> = span(i + 1, j + 1).collect();
            contraction_det(c, &rows, &cols)
        }
    }
}

/// Three-point correlator `⟨σᵖ_i σ^q_j σʳ_k⟩` for sites `i < j < k`.
///
/// Matrix sizes: `α+1` for XXZ/YYZ, `β+1` for ZXX/ZYY, `α+β−1` for XZX/YZY
/// and 3 for ZZZ. The string operators of XXZ-type correlators carry an
/// extra `σᶻ` pair that contributes the overall minus sign.
pub fn three_point_at<C: Contraction + ?Sized>(
    c: &C,
    kind: ThreePointKind,
    i: i64,
    j: i64,
    k: i64,
) -> f64 {
    debug_assert!(i < j && j < k);
    let (rows, cols, sign): (Vec<i64>, Vec<i64>, f64) = match kind {
        ThreePointKind::ZZZ => (vec![i, j, k], vec![i, j, k], -1.0),
        ThreePointKind::XXZ => (
            span(i + 1, j + 1).chain([k]).collect(),
            span(i, j).chain([k]).collect(),
            -1.0,
        ),
        ThreePointKind::YYZ => (
            span(i, j).chain([k]).collect(),
            span(i + 1, j + 1).chain([k]).collect(),
            -1.0,
        ),
        ThreePointKind::ZXX => (
            [i].into_iter().chain(span(j + 1, k + 1)).collect(),
            [i].into_iter().chain(span(j, k)).collect(),
            -1.0,
        ),
        ThreePointKind::ZYY => (
            [i].into_iter().chain(span(j, k)).collect(),
            [i].into_iter().chain(span(j + 1, k + 1)).collect(),
            -1.0,
        ),
        ThreePointKind::XZX => (
            span(i + 1, j).chain(span(j + 1, k + 1)).collect(),
            span(i, j).chain(span(j + 1, k)).collect(),
            1.0,
        ),
        ThreePointKind::YZY => (
            span(i, j).chain(span(j + 1, k)).collect(),
            span(i + 1, j).chain(span(j + 1, k + 1)).collect(),
            1.0,
        ),
    };
    sign * contraction_det(c, &rows, &cols)
}

/// `⟨σᶻ⟩` of the infinite chain.
pub fn magnetization(params: &ModelParams, quad: &QuadratureConfig) -> Result<f64> {
    Ok(-g_k(0, params, quad)?)
}

pub fn two_point(
    kind: TwoPointKind,
    d: usize,
    params: &ModelParams,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if d < 1 {
        return Err(Error::invalid("d", "pair distance must be >= 1"));
    }
    let table = GTable::shared(params, quad, d + 1)?;
    Ok(two_point_at(table.as_ref(), kind, 0, d as i64))
}

/// Three-point correlator of the infinite chain.
///
/// ZXX and ZYY are defined through reflection of the chain,
/// `ZXX_{αβ} = XXZ_{βα}` and `ZYY_{αβ} = YYZ_{βα}`.
pub fn three_point(
    kind: ThreePointKind,
    geom: &TripleGeometry,
    params: &ModelParams,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let table = GTable::shared(params, quad, GTable::window_for(geom))?;
    Ok(three_point_from_table(&table, kind, geom))
}

fn three_point_from_table(table: &GTable, kind: ThreePointKind, geom: &TripleGeometry) -> f64 {
    let (kind, geom) = match kind {
        ThreePointKind::ZXX => (ThreePointKind::XXZ, geom.reflected()),
        ThreePointKind::ZYY => (ThreePointKind::YYZ, geom.reflected()),
        other => (other, *geom),
    };
    let [i, j, k] = geom.offsets().map(|s| s as i64);
    three_point_at(table, kind, i, j, k)
}

/// Every correlator that survives the parity symmetry for sites `i < j < k`.
///
/// `alpha`, `beta`, `gamma` suffixes refer to the pairs `(i, j)`, `(j, k)`
/// and `(i, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    /// `⟨σᶻ⟩` at sites i, j, k (all equal in the infinite chain).
    pub z: [f64; 3],
    pub zz_alpha: f64,
    pub zz_beta: f64,
    pub zz_gamma: f64,
    pub xx_alpha: f64,
    pub xx_beta: f64,
    pub xx_gamma: f64,
    pub yy_alpha: f64,
    pub yy_beta: f64,
    pub yy_gamma: f64,
    pub zzz: f64,
    pub xxz: f64,
    pub zxx: f64,
    pub xzx: f64,
    pub yyz: f64,
    pub zyy: f64,
    pub yzy: f64,
}

impl CorrelatorSet {
    /// The infinite-temperature (all-zero) set.
    pub fn zero() -> Self {
        Self::from_values(&[0.0; 19])
    }

    /// Fully polarized `|↑↑↑⟩`.
    pub fn polarized() -> Self {
        let mut v = [0.0; 19];
        for x in v.iter_mut().take(6) {
            *x = 1.0;
        }
        v[12] = 1.0; // zzz
        Self::from_values(&v)
    }

    /// Direct evaluation of every shape for sites `i < j < k`.
    pub fn from_contraction<C: Contraction + ?Sized>(c: &C, sites: [i64; 3]) -> Self {
        use ThreePointKind::*;
        use TwoPointKind::*;
        let [i, j, k] = sites;
        Self {
            z: [z_at(c, i), z_at(c, j), z_at(c, k)],
            zz_alpha: two_point_at(c, ZZ, i, j),
            zz_beta: two_point_at(c, ZZ, j, k),
            zz_gamma: two_point_at(c, ZZ, i, k),
            xx_alpha: two_point_at(c, XX, i, j),
            xx_beta: two_point_at(c, XX, j, k),
            xx_gamma: two_point_at(c, XX, i, k),
            yy_alpha: two_point_at(c, YY, i, j),
            yy_beta: two_point_at(c, YY, j, k),
            yy_gamma: two_point_at(c, YY, i, k),
            zzz: three_point_at(c, ZZZ, i, j, k),
            xxz: three_point_at(c, XXZ, i, j, k),
            zxx: three_point_at(c, ZXX, i, j, k),
            xzx: three_point_at(c, XZX, i, j, k),
            yyz: three_point_at(c, YYZ, i, j, k),
            zyy: three_point_at(c, ZYY, i, j, k),
            yzy: three_point_at(c, YZY, i, j, k),
        }
    }

    pub const NAMES: [&'static str; 19] = [
        "z_i", "z_j", "z_k", "zz_alpha", "zz_beta", "zz_gamma", "xx_alpha", "xx_beta",
        "xx_gamma", "yy_alpha", "yy_beta", "yy_gamma", "zzz", "xxz", "zxx", "xzx", "yyz", "zyy",
        "yzy",
    ];

    /// Values in the order of [`CorrelatorSet::NAMES`].
    pub fn values(&self) -> [f64; 19] {
        [
            self.z[0], self.z[1], self.z[2], self.zz_alpha, self.zz_beta, self.zz_gamma,
            self.xx_alpha, self.xx_beta, self.xx_gamma, self.yy_alpha, self.yy_beta,
            self.yy_gamma, self.zzz, self.xxz, self.zxx, self.xzx, self.yyz, self.zyy, self.yzy,
        ]
    }

    pub fn from_values(v: &[f64; 19]) -> Self {
        Self {
            z: [v[0], v[1], v[2]],
            zz_alpha: v[3],
            zz_beta: v[4],
            zz_gamma: v[5],
            xx_alpha: v[6],
            xx_beta: v[7],
            xx_gamma: v[8],
            yy_alpha: v[9],
            yy_beta: v[10],
            yy_gamma: v[11],
            zzz: v[12],
            xxz: v[13],
            zxx: v[14],
            xzx: v[15],
            yyz: v[16],
            zyy: v[17],
            yzy: v[18],
        }
    }

    pub fn named_values(&self) -> impl Iterator<Item = (&'static str, f64)> {
        Self::NAMES.into_iter().zip(self.values())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// All correlators for one geometry of the infinite chain, from one shared
/// `G` table covering `|k| ≤ α+β+1`.
pub fn correlator_set(
    geom: &TripleGeometry,
    params: &ModelParams,
    quad: &QuadratureConfig,
) -> Result<CorrelatorSet> {
    let table = GTable::shared(params, quad, GTable::window_for(geom))?;
    Ok(correlator_set_from_table(&table, geom))
}

pub fn correlator_set_from_table(table: &GTable, geom: &TripleGeometry) -> CorrelatorSet {
    let sites = geom.offsets().map(|s| s as i64);
    let mut set = CorrelatorSet::from_contraction(table, sites);
    set.zxx = three_point_from_table(table, ThreePointKind::ZXX, geom);
    set.zyy = three_point_from_table(table, ThreePointKind::ZYY, geom);
    set
}
