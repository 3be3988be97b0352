//! Independent validators on finite open chains.
//!
//! Two routes to the reduced state of a few sites, neither of which uses the
//! quadrature engine:
//!
//! * exact diagonalization of the `2^N`-dimensional Hamiltonian, block
//!   diagonal in the sectors of the parity `Πσᶻ` and the mirror reflection;
//! * the free-fermion contraction matrix `g[l][m] = ⟨A_l B_m⟩` of the open
//!   chain, fed through the same determinant shapes as the infinite chain.
//!
//! Agreement of the two certifies the determinant formulas, signs and basis
//! conventions; agreement of the second with the thermodynamic engine for
//! bulk sites of a long chain certifies the quadrature.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlator::{correlator_set, Contraction, CorrelatorSet};
use crate::error::{Error, Result};
use crate::params::{ModelParams, QuadratureConfig, TripleGeometry};
use crate::state::{assemble_rho3, Matrix8, Rho2, Rho3};

/// Hard cap for dense exact diagonalization (`2^14` basis states).
pub const MAX_ED_SITES: usize = 14;
/// Cap for the free-fermion pipeline (a `2N × 2N` SVD).
pub const MAX_FERMION_SITES: usize = 4096;
/// Many-body levels within this window of the minimum form the ground
/// multiplet at `t = 0`; single-particle modes below it count as zero modes.
pub const DEGENERACY_TOL: f64 = 1e-10;

// Boltzmann weights below this fraction of the largest are dropped.
const WEIGHT_CUTOFF: f64 = 1e-18;

/// Open chain of `n_sites` spins with free ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteChain {
    n_sites: usize,
    params: ModelParams,
}

impl FiniteChain {
    pub fn new(n_sites: usize, params: ModelParams) -> Result<Self> {
        params.validate()?;
        if n_sites < 2 {
            return Err(Error::invalid("n_sites", format!("{n_sites} < 2")));
        }
        if n_sites > MAX_FERMION_SITES {
            return Err(Error::invalid(
                "n_sites",
                format!("{n_sites} exceeds {MAX_FERMION_SITES}"),
            ));
        }
        Ok(Self { n_sites, params })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn require_ed(&self) -> Result<()> {
        if self.n_sites > MAX_ED_SITES {
            Err(Error::SizeLimit {
                n_sites: self.n_sites,
                max_sites: MAX_ED_SITES,
            })
        } else {
            Ok(())
        }
    }

    // Site 0 is the most significant bit; a set bit is spin down.
    fn bit(&self, state: usize, site: usize) -> usize {
        (state >> (self.n_sites - 1 - site)) & 1
    }

    fn diagonal(&self, state: usize) -> f64 {
        let down = state.count_ones() as f64;
        let up = self.n_sites as f64 - down;
        -0.5 * self.params.h * (up - down)
    }

    /// Nonzero off-diagonal entries `(target, value)` in row `state`.
    fn hops(&self, state: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let gamma = self.params.gamma;
        (0..self.n_sites - 1).map(move |i| {
            let mask = (0b11usize) << (self.n_sites - 2 - i);
            let value = if self.bit(state, i) == self.bit(state, i + 1) {
                -0.5 * gamma
            } else {
                -0.5
            };
            (state ^ mask, value)
        })
    }

    /// Sites `[s, s+α, s+α+β]` placed as centrally as possible.
    pub fn bulk_sites(&self, geom: &TripleGeometry) -> Result<[usize; 3]> {
        let span = geom.gamma_dist();
        if span >= self.n_sites {
            return Err(Error::invalid(
                "geometry",
                format!("span {span} does not fit in {} sites", self.n_sites),
            ));
        }
        let start = (self.n_sites - 1 - span) / 2 + (self.n_sites - 1 - span) % 2;
        let [_, a, g] = geom.offsets();
        Ok([start, start + a, start + g])
    }
}

/// Dense Hamiltonian
/// `H = −Σ_i [(1+γ)/4 σˣ_i σˣ_{i+1} + (1−γ)/4 σʸ_i σʸ_{i+1}] − (h/2) Σ_i σᶻ_i`.
pub fn build_hamiltonian(chain: &FiniteChain) -> Result<DMatrix<f64>> {
    chain.require_ed()?;
    let dim = 1usize << chain.n_sites;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = chain.diagonal(s);
        for (t, v) in chain.hops(s) {
            h[(s, t)] += v;
        }
    }
    Ok(h)
}

/// The parity operator `Πσᶻ` as a diagonal of ±1.
pub fn parity_diagonal(n_sites: usize) -> Vec<f64> {
    (0..1usize << n_sites)
        .map(|s| if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

fn gibbs_weights(energies: &[f64], t: f64) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = energies
        .iter()
        .map(|&e| {
            if t == 0.0 {
                if e - e0 <= DEGENERACY_TOL {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-(e - e0) / t).exp()
            }
        })
        .collect();
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    w
}

/// Gibbs state of an arbitrary symmetric matrix; at `t = 0` the normalized
/// projector onto the levels within [`DEGENERACY_TOL`] of the minimum.
pub fn thermal_state(h: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("{t} is not a finite value >= 0")));
    }
    if !h.is_square() {
        return Err(Error::invalid("hamiltonian", "matrix is not square"));
    }
    let eig = h.clone().symmetric_eigen();
    let w = gibbs_weights(eig.eigenvalues.as_slice(), t);
    let v = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, c)] * w[c]);
    Ok(scaled * v.transpose())
}

#[derive(Debug, Clone)]
struct Component {
    states: Vec<usize>,
    vectors: DMatrix<f64>,
    weights: Vec<f64>,
    energies: Vec<f64>,
}

fn reflect(state: usize, n: usize) -> usize {
    state.reverse_bits() >> (usize::BITS as usize - n)
}

/// States of one parity sector combined into eigenstates of the mirror
/// reflection `i ↦ N−1−i` with eigenvalue `sign`.
struct SymmetryBlock {
    states: Vec<usize>,
    /// `(orbit, coefficient)` of each entry of `states`.
    members: Vec<(usize, f64)>,
    n_orbits: usize,
}

impl SymmetryBlock {
    fn new(chain: &FiniteChain, parity: u32, sign: f64) -> Self {
        let n = chain.n_sites;
        let mut states = Vec::new();
        let mut members = Vec::new();
        let mut n_orbits = 0;
        for s in (0..1usize << n).filter(|s| s.count_ones() % 2 == parity) {
            let r = reflect(s, n);
            if s < r {
                states.extend([s, r]);
                members.extend([(n_orbits, FRAC_1_SQRT_2), (n_orbits, sign * FRAC_1_SQRT_2)]);
                n_orbits += 1;
            } else if s == r && sign > 0.0 {
                states.push(s);
                members.push((n_orbits, 1.0));
                n_orbits += 1;
            }
        }
        Self {
            states,
            members,
            n_orbits,
        }
    }

    fn hamiltonian(&self, chain: &FiniteChain) -> DMatrix<f64> {
        let mut index = vec![usize::MAX; 1 << chain.n_sites];
        for (p, &s) in self.states.iter().enumerate() {
            index[s] = p;
        }
        let mut h = DMatrix::zeros(self.n_orbits, self.n_orbits);
        for (&m, &(b, c_m)) in self.states.iter().zip(&self.members) {
            let targets = std::iter::once((m, chain.diagonal(m))).chain(chain.hops(m));
            for (t, value) in targets {
                let q = index[t];
                if q != usize::MAX {
                    let (a, c_t) = self.members[q];
                    h[(a, b)] += c_t * value * c_m;
                }
            }
        }
        h
    }
}

/// Gibbs state of a finite chain kept in spectral form, one block per
/// parity and reflection sector, with negligible weights dropped.
#[derive(Debug, Clone)]
pub struct GibbsState {
    n_sites: usize,
    components: Vec<Component>,
}

impl GibbsState {
    pub fn new(chain: &FiniteChain) -> Result<Self> {
        chain.require_ed()?;
        let n = chain.n_sites;
        let blocks: Vec<SymmetryBlock> = (0..2u32)
            .flat_map(|parity| [(parity, 1.0), (parity, -1.0)])
            .map(|(parity, sign)| SymmetryBlock::new(chain, parity, sign))
            .filter(|b| b.n_orbits > 0)
            .collect();
        let solved: Vec<(SymmetryBlock, nalgebra::SymmetricEigen<f64, nalgebra::Dyn>)> = blocks
            .into_par_iter()
            .map(|b| {
                let eig = b.hamiltonian(chain).symmetric_eigen();
                (b, eig)
            })
            .collect();

        let all: Vec<f64> = solved
            .iter()
            .flat_map(|(_, e)| e.eigenvalues.iter().copied())
            .collect();
        let weights = gibbs_weights(&all, chain.params.t);
        let w_max = weights.iter().copied().fold(0.0, f64::max);

        let mut offset = 0;
        let mut components = Vec::with_capacity(solved.len());
        for (block, eig) in solved {
            let len = block.n_orbits;
            let keep: Vec<usize> = (0..len)
                .filter(|&c| weights[offset + c] > WEIGHT_CUTOFF * w_max)
                .collect();
            let vectors = DMatrix::from_fn(block.states.len(), keep.len(), |r, c| {
                let (orbit, coef) = block.members[r];
                coef * eig.eigenvectors[(orbit, keep[c])]
            });
            components.push(Component {
                weights: keep.iter().map(|&c| weights[offset + c]).collect(),
                energies: keep.iter().map(|&c| eig.eigenvalues[c]).collect(),
                states: block.states,
                vectors,
            });
            offset += len;
        }
        Ok(Self { n_sites: n, components })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `Tr(ρH)` from the retained spectrum.
    pub fn energy(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.weights.iter().zip(&c.energies))
            .map(|(w, e)| w * e)
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n_sites;
        let mut rho = DMatrix::zeros(dim, dim);
        for comp in &self.components {
            for (c, &w) in comp.weights.iter().enumerate() {
                let v = comp.vectors.column(c);
                for (p, &s) in comp.states.iter().enumerate() {
                    if v[p] == 0.0 {
                        continue;
                    }
                    for (q, &t) in comp.states.iter().enumerate() {
                        rho[(s, t)] += w * v[p] * v[q];
                    }
                }
            }
        }
        rho
    }

    /// Reduced density matrix of `sites` (strictly increasing), with the
    /// first listed site as the most significant bit.
    pub fn reduce(&self, sites: &[usize]) -> Result<DMatrix<f64>> {
        check_sites(sites, self.n_sites)?;
        let n = self.n_sites;
        let k = sites.len();
        let site_mask: usize = sites.iter().map(|&s| 1usize << (n - 1 - s)).sum();
        let mut rest_index = vec![usize::MAX; 1 << n];
        let mut n_rest = 0;
        let mut rho = DMatrix::zeros(1 << k, 1 << k);
        for comp in &self.components {
            let mut rows = Vec::with_capacity(comp.states.len());
            for &s in &comp.states {
                let rest = s & !site_mask;
                if rest_index[rest] == usize::MAX {
                    rest_index[rest] = n_rest;
                    n_rest += 1;
                }
                rows.push((rest_index[rest], extract_bits(s, sites, n)));
            }
            let mut m = DMatrix::zeros(n_rest, 1 << k);
            for (c, &w) in comp.weights.iter().enumerate() {
                m.fill(0.0);
                let v = comp.vectors.column(c);
                for (p, &(r, a)) in rows.iter().enumerate() {
                    m[(r, a)] = v[p];
                }
                rho.gemm_tr(w, &m, &m, 1.0);
            }
        }
        Ok(rho)
    }

    pub fn reduce_to_triple(&self, sites: [usize; 3]) -> Result<Rho3> {
        Rho3::from_matrix(Matrix8::from_iterator(self.reduce(&sites)?.iter().copied()))
    }

    pub fn reduce_to_pair(&self, sites: [usize; 2]) -> Result<Rho2> {
        Rho2::from_matrix(nalgebra::Matrix4::from_iterator(
            self.reduce(&sites)?.iter().copied(),
        ))
    }
}

fn check_sites(sites: &[usize], n_sites: usize) -> Result<()> {
    if sites.is_empty() || !sites.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("sites", format!("{sites:?} is not strictly increasing")));
    }
    if sites[sites.len() - 1] >= n_sites {
        return Err(Error::invalid(
            "sites",
            format!("{sites:?} outside a chain of {n_sites} sites"),
        ));
    }
    Ok(())
}

fn extract_bits(state: usize, sites: &[usize], n: usize) -> usize {
    sites
        .iter()
        .fold(0, |acc, &s| (acc << 1) | ((state >> (n - 1 - s)) & 1))
}

/// Partial trace of a dense `2^N` density matrix down to `sites`.
pub fn reduce_to_sites(rho: &DMatrix<f64>, n_sites: usize, sites: &[usize]) -> Result<DMatrix<f64>> {
    check_sites(sites, n_sites)?;
    if rho.nrows() != 1 << n_sites || !rho.is_square() {
        return Err(Error::invalid("rho", format!("expected a {0}x{0} matrix", 1 << n_sites)));
    }
    let k = sites.len();
    let site_mask: usize = sites.iter().map(|&s| 1usize << (n_sites - 1 - s)).sum();
    let embed = |a: usize, rest: usize| {
        sites.iter().enumerate().fold(rest, |acc, (idx, &s)| {
            acc | (((a >> (k - 1 - idx)) & 1) << (n_sites - 1 - s))
        })
    };
    let mut out = DMatrix::zeros(1 << k, 1 << k);
    for rest in (0..1usize << n_sites).filter(|r| r & site_mask == 0) {
        for a in 0..1 << k {
            for b in 0..1 << k {
                out[(a, b)] += rho[(embed(a, rest), embed(b, rest))];
            }
        }
    }
    Ok(out)
}

/// Contraction matrix `g[l][m] = ⟨A_l B_m⟩` of a finite open chain.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    pub g: DMatrix<f64>,
}

impl GMatrix {
    pub fn n_sites(&self) -> usize {
        self.g.nrows()
    }
}

impl Contraction for GMatrix {
    fn contraction(&self, l: i64, m: i64) -> f64 {
        self.g[(l as usize, m as usize)]
    }
}

/// Free-fermion contraction matrix of the open chain.
///
/// With Majoranas `w_{2l} = A_l`, `w_{2l+1} = −iB_l` the Hamiltonian is
/// `(i/4) Σ M_pq w_p w_q` for a real antisymmetric `M`. Writing
/// `M = U S Vᵀ`, the thermal two-point matrix is `U tanh(S/2t) Vᵀ`; at `t = 0`
/// exact zero modes get occupation ½, i.e. the ground multiplet is mixed.
pub fn finite_g_matrix(chain: &FiniteChain) -> Result<GMatrix> {
    let n = chain.n_sites;
    let p = &chain.params;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for l in 0..n {
        m[(2 * l, 2 * l + 1)] = p.h;
        if l + 1 < n {
            m[(2 * l + 1, 2 * l + 2)] = 0.5 * (1.0 + p.gamma);
            m[(2 * l, 2 * l + 3)] = -0.5 * (1.0 - p.gamma);
        }
    }
    let m = &m - m.transpose();

    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let f: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| {
            if p.t == 0.0 {
                if s > DEGENERACY_TOL {
                    1.0
                } else {
                    0.0
                }
            } else {
                (s / (2.0 * p.t)).tanh()
            }
        })
        .collect();
    let g = DMatrix::from_fn(n, n, |l, mm| {
        let (r, c) = (2 * l, 2 * mm + 1);
        -(0..2 * n).map(|q| u[(r, q)] * f[q] * v_t[(q, c)]).sum::<f64>()
    });
    Ok(GMatrix { g })
}

/// Correlators of three sites of a finite chain from its contraction matrix.
pub fn finite_correlators(g: &GMatrix, sites: [usize; 3]) -> Result<CorrelatorSet> {
    check_sites(&sites, g.n_sites())?;
    Ok(CorrelatorSet::from_contraction(
        g,
        sites.map(|s| s as i64),
    ))
}

pub fn fermion_rho3(chain: &FiniteChain, sites: [usize; 3]) -> Result<Rho3> {
    assemble_rho3(&finite_correlators(&finite_g_matrix(chain)?, sites)?)
}

pub fn ed_rho3(chain: &FiniteChain, sites: [usize; 3]) -> Result<Rho3> {
    GibbsState::new(chain)?.reduce_to_triple(sites)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorDeviation {
    pub name: &'static str,
    pub ed: f64,
    pub fermion: f64,
    pub thermodynamic: f64,
}

/// Max-abs entry deviations between the three routes to `ρ_ijk`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub n_sites: usize,
    pub sites: [usize; 3],
    pub ed_vs_fermion: f64,
    pub ed_vs_thermodynamic: f64,
    pub fermion_vs_thermodynamic: f64,
    pub correlators: Vec<CorrelatorDeviation>,
}

fn max_abs(a: &Matrix8, b: &Matrix8) -> f64 {
    (a - b).abs().max()
}

pub fn compare(
    params: &ModelParams,
    n_sites: usize,
    sites: [usize; 3],
    quad: &QuadratureConfig,
) -> Result<Comparison> {
    let chain = FiniteChain::new(n_sites, *params)?;
    chain.require_ed()?;
    check_sites(&sites, n_sites)?;
    let geom = TripleGeometry::new(sites[1] - sites[0], sites[2] - sites[1])?;

    let ed = ed_rho3(&chain, sites)?;
    let fermion_set = finite_correlators(&finite_g_matrix(&chain)?, sites)?;
    let fermion = assemble_rho3(&fermion_set)?;
    let thermo_set = correlator_set(&geom, params, quad)?;
    let thermo = assemble_rho3(&thermo_set)?;

    let ed_set = ed.correlators();
    let correlators = CorrelatorSet::NAMES
        .iter()
        .zip(ed_set.values())
        .zip(fermion_set.values())
        .zip(thermo_set.values())
        .map(|(((&name, ed), fermion), thermodynamic)| CorrelatorDeviation {
            name,
            ed,
            fermion,
            thermodynamic,
        })
        .collect();

    Ok(Comparison {
        n_sites,
        sites,
        ed_vs_fermion: max_abs(ed.matrix(), fermion.matrix()),
        ed_vs_thermodynamic: max_abs(ed.matrix(), thermo.matrix()),
        fermion_vs_thermodynamic: max_abs(fermion.matrix(), thermo.matrix()),
        correlators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Site;

    fn chain(n: usize, h: f64, gamma: f64, t: f64) -> FiniteChain {
        FiniteChain::new(n, ModelParams::new(h, gamma, t).unwrap()).unwrap()
    }

    fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn two_site_ising_spectrum() {
        // H = −σˣσˣ/2 on two sites
        let h = build_hamiltonian(&chain(2, 0.0, 1.0, 0.0)).unwrap();
        let e = sorted_eigenvalues(&h);
        for (a, b) in e.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_is_symmetric_and_parity_conserving() {
        let h = build_hamiltonian(&chain(6, 0.7, 0.4, 0.0)).unwrap();
        assert!((&h - h.transpose()).abs().max() == 0.0);
        let p = parity_diagonal(6);
        for r in 0..h.nrows() {
            for c in 0..h.ncols() {
                if p[r] != p[c] {
                    assert!(h[(r, c)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectrum_matches_single_particle_energies() {
        let c = chain(3, 0.5, 0.5, 0.0);
        let e = sorted_eigenvalues(&build_hamiltonian(&c).unwrap());
        let n = c.n_sites();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for l in 0..n {
            m[(2 * l, 2 * l + 1)] = 0.5;
            if l + 1 < n {
                m[(2 * l + 1, 2 * l + 2)] = 0.75;
                m[(2 * l, 2 * l + 3)] = -0.25;
            }
        }
        let m = &m - m.transpose();
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        s.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        // singular values come in equal pairs; one energy per mode
        let eps = s;
        assert_eq!(eps.len(), 3, "{eps:?}");
        let e0 = -0.5 * eps.iter().sum::<f64>();
        let mut levels: Vec<f64> = (0..8)
            .map(|occ: usize| e0 + (0..3).filter(|q| occ >> q & 1 == 1).map(|q| eps[q]).sum::<f64>())
            .collect();
        levels.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&levels) {
            assert!((a - b).abs() < 1e-12, "{e:?} vs {levels:?}");
        }
    }

    #[test]
    fn size_limit_is_enforced() {
        let c = chain(15, 0.5, 0.5, 0.0);
        assert!(matches!(build_hamiltonian(&c), Err(Error::SizeLimit { .. })));
        assert!(matches!(GibbsState::new(&c), Err(Error::SizeLimit { .. })));
        assert!(finite_g_matrix(&c).is_ok());
        assert!(FiniteChain::new(1, ModelParams::new(0.5, 0.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn gibbs_state_matches_dense_thermal_state() {
        for t in [0.0, 0.3] {
            let c = chain(6, 0.8, 0.6, t);
            let dense = thermal_state(&build_hamiltonian(&c).unwrap(), t).unwrap();
            let gibbs = GibbsState::new(&c).unwrap();
            assert!((gibbs.to_dense() - &dense).abs().max() < 1e-12);
            assert!((dense.trace() - 1.0).abs() < 1e-12);
            let a = gibbs.reduce(&[1, 2, 4]).unwrap();
            let b = reduce_to_sites(&dense, 6, &[1, 2, 4]).unwrap();
            assert!((a - b).abs().max() < 1e-12);
        }
    }

    #[test]
    fn thermal_state_limits() {
        let h = build_hamiltonian(&chain(4, 0.5, 0.5, 0.0)).unwrap();
        let hot = thermal_state(&h, 1e9).unwrap();
        assert!((hot - DMatrix::identity(16, 16) / 16.0).abs().max() < 1e-9);
        let cold = thermal_state(&h, 0.0).unwrap();
        // nondegenerate ground state: rank-1 projector
        assert!((&cold * &cold - &cold).abs().max() < 1e-10);
        assert!((cold.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_matches_spectrum() {
        let c = chain(8, 1.0, 1.0, 0.5);
        let e = sorted_eigenvalues(&build_hamiltonian(&c).unwrap());
        let z: f64 = e.iter().map(|x| (-x / 0.5).exp()).sum();
        let mean: f64 = e.iter().map(|x| x * (-x / 0.5).exp()).sum::<f64>() / z;
        assert!((GibbsState::new(&c).unwrap().energy() - mean).abs() < 1e-10);
    }

    #[test]
    fn reduce_simple_states() {
        let id = DMatrix::identity(8, 8) / 8.0;
        let r = reduce_to_sites(&id, 3, &[0, 1, 2]).unwrap();
        assert_eq!(r, id);
        // GHZ over three sites
        let mut ghz = DMatrix::zeros(8, 8);
        for (a, b) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            ghz[(a, b)] = 0.5;
        }
        let r = reduce_to_sites(&ghz, 3, &[0, 1, 2]).unwrap();
        assert_eq!(r, ghz);
        // |↑↓↑↓⟩ reduces to |↓↓⟩ on sites (1, 3)
        let mut prod = DMatrix::zeros(16, 16);
        prod[(0b0101, 0b0101)] = 1.0;
        let r = reduce_to_sites(&prod, 4, &[1, 3]).unwrap();
        assert_eq!(r[(3, 3)], 1.0);
        assert!(reduce_to_sites(&prod, 4, &[3, 1]).is_err());
    }

    #[test]
    fn polarized_chain() {
        let c = chain(6, 1e4, 1.0, 0.0);
        let g = finite_g_matrix(&c).unwrap();
        assert!((&g.g + DMatrix::identity(6, 6)).abs().max() < 1e-3);
        let set = finite_correlators(&g, [1, 2, 4]).unwrap();
        assert!(set.max_abs_diff(&CorrelatorSet::polarized()) < 1e-3);
        let ed = ed_rho3(&c, [1, 2, 4]).unwrap();
        assert!((ed.matrix()[(0, 0)] - 1.0).abs() < 1e-3);
        let hot = finite_g_matrix(&chain(6, 0.5, 0.5, 1e12)).unwrap();
        assert!(hot.g.abs().max() < 1e-11);
    }

    #[test]
    fn ed_and_fermion_routes_agree() {
        for (n, h, gamma, t, sites) in [
            (6, 0.5, 1.0, 0.0, [0, 2, 5]),
            (7, 1.0, 0.25, 0.3, [1, 2, 3]),
            (8, 0.0, 1.0, 0.0, [2, 3, 6]),
            (8, 1.5, 0.25, 1.0, [0, 4, 7]),
        ] {
            let c = chain(n, h, gamma, t);
            let ed = ed_rho3(&c, sites).unwrap();
            let ff = fermion_rho3(&c, sites).unwrap();
            assert!(
                (ed.matrix() - ff.matrix()).abs().max() < 1e-10,
                "N={n} h={h} γ={gamma} t={t}"
            );
            let pair = GibbsState::new(&c).unwrap().reduce_to_pair([sites[0], sites[2]]).unwrap();
            assert!((pair.matrix() - ed.partial_trace(Site::Middle).matrix()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn bulk_sites_are_centered() {
        let c = chain(10, 0.5, 0.5, 0.0);
        assert_eq!(c.bulk_sites(&TripleGeometry::block()).unwrap(), [4, 5, 6]);
        assert_eq!(c.bulk_sites(&TripleGeometry::new(2, 3).unwrap()).unwrap(), [2, 4, 7]);
        assert!(c.bulk_sites(&TripleGeometry::new(5, 5).unwrap()).is_err());
    }
}
