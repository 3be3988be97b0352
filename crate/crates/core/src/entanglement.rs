//! Partial transposes, negativity, concurrence and the free/bound
//! classification of three-spin states.
//!
//! Bound entanglement is detected through incomplete separability: a state
//! that is PPT across two single-spin cuts, NPT across the third, and has no
//! entangled pair cannot be distilled into a Bell pair between any two
//! parties because PPT is preserved by LOCC.

use std::fmt;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::correlator::{correlator_set, CorrelatorSet};
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, symmetric_eigenvalues};
use crate::params::{ModelParams, QuadratureConfig, TripleGeometry};
use crate::state::{assemble_rho3, Matrix8, Pauli, Rho2, Rho3, Site, SHAPE_TOL};

/// Threshold below which negative eigenvalues and concurrences count as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Bipartition of the three spins into one spin and the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cut {
    /// A|BC
    FirstVsRest,
    /// B|AC
    MiddleVsRest,
    /// C|AB
    LastVsRest,
}

impl Cut {
    pub const ALL: [Cut; 3] = [Cut::FirstVsRest, Cut::MiddleVsRest, Cut::LastVsRest];

    pub fn site(self) -> Site {
        match self {
            Cut::FirstVsRest => Site::First,
            Cut::MiddleVsRest => Site::Middle,
            Cut::LastVsRest => Site::Last,
        }
    }

    pub fn index(self) -> usize {
        self.site().index()
    }

    pub fn label(self) -> &'static str {
        match self {
            Cut::FirstVsRest => "A|BC",
            Cut::MiddleVsRest => "B|AC",
            Cut::LastVsRest => "C|AB",
        }
    }
}

/// The three spin pairs of a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    /// `(i, j)`, distance α.
    Ij,
    /// `(j, k)`, distance β.
    Jk,
    /// `(i, k)`, distance α+β.
    Ik,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::Ij, Pair::Jk, Pair::Ik];

    /// The spin traced out to obtain this pair.
    pub fn traced_site(self) -> Site {
        match self {
            Pair::Ij => Site::Last,
            Pair::Jk => Site::First,
            Pair::Ik => Site::Middle,
        }
    }

    /// The two cuts that separate the spins of this pair.
    pub fn separating_cuts(self) -> [Cut; 2] {
        match self {
            Pair::Ij => [Cut::FirstVsRest, Cut::MiddleVsRest],
            Pair::Jk => [Cut::MiddleVsRest, Cut::LastVsRest],
            Pair::Ik => [Cut::FirstVsRest, Cut::LastVsRest],
        }
    }
}

/// Transposes the indices of the spin singled out by `cut`.
pub fn partial_transpose(rho: &Rho3, cut: Cut) -> Matrix8 {
    let bit = 1usize << (2 - cut.index());
    let m = rho.matrix();
    Matrix8::from_fn(|r, c| {
        let (rs, cs) = (r & bit, c & bit);
        m[((r & !bit) | cs, (c & !bit) | rs)]
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    /// Sum of the magnitudes of the negative eigenvalues.
    pub value: f64,
    /// Eigenvalues of the partial transpose below `−tol`, ascending.
    pub negative_eigenvalues: Vec<f64>,
}

impl NegativityResult {
    pub fn is_npt(&self) -> bool {
        !self.negative_eigenvalues.is_empty()
    }
}

pub fn negativity(rho: &Rho3, cut: Cut, tol: f64) -> Result<NegativityResult> {
    let pt = partial_transpose(rho, cut);
    let eig = symmetric_eigenvalues(&pt)?;
    let negative_eigenvalues: Vec<f64> = eig.iter().copied().filter(|&e| e < -tol).collect();
    let value = negative_eigenvalues.iter().map(|e| e.abs()).sum();
    Ok(NegativityResult {
        value,
        negative_eigenvalues,
    })
}

/// Concurrence of an X-shaped two-qubit state,
/// `C = 2 max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄))`.
pub fn concurrence(rho: &Rho2) -> Result<f64> {
    let violation = rho.x_shape_violation();
    if violation > SHAPE_TOL {
        return Err(Error::ShapeViolation {
            magnitude: violation,
        });
    }
    let m = rho.matrix();
    let diag = |i: usize| m[(i, i)].max(0.0);
    let a = m[(0, 3)].abs() - (diag(1) * diag(2)).sqrt();
    let b = m[(1, 2)].abs() - (diag(0) * diag(3)).sqrt();
    Ok((2.0 * a.max(b)).max(0.0))
}

/// Wootters concurrence for an arbitrary real two-qubit state.
///
/// Uses the eigenvalues of `√ρ ρ̃ √ρ` with `ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`, which
/// coincide with those of `ρ ρ̃` but come from a symmetric matrix.
pub fn concurrence_general(rho: &Rho2) -> Result<f64> {
    let m = rho.matrix();
    let yy = Matrix4::from_fn(|r, c| {
        // σʸ⊗σʸ is real: +1 on the inner anti-diagonal, −1 on the outer one
        match (r, c) {
            (0, 3) | (3, 0) => -1.0,
            (1, 2) | (2, 1) => 1.0,
            _ => 0.0,
        }
    });
    let flipped = yy * m * yy;
    let e = jacobi_eigen(m)?;
    let sqrt_vals = e.values.map(|v| v.max(0.0).sqrt());
    let sqrt_rho = e.vectors * Matrix4::from_diagonal(&sqrt_vals) * e.vectors.transpose();
    let r = sqrt_rho * flipped * sqrt_rho;
    let r = (r + r.transpose()) * 0.5;
    let mut l: Vec<f64> = symmetric_eigenvalues(&r)?
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntanglementClass {
    /// Every cut is PPT: separable, or entangled in a way negativity cannot see.
    AllPpt,
    /// Exactly one NPT cut and no entangled pair: bound entanglement.
    BoundBySingleNptCut,
    /// Two or more NPT cuts and no entangled pair.
    NptMultiCut,
    /// At least one pair has nonzero concurrence.
    PairwiseEntangled,
}

impl EntanglementClass {
    pub fn label(self) -> &'static str {
        match self {
            EntanglementClass::AllPpt => "all_ppt",
            EntanglementClass::BoundBySingleNptCut => "bound_single_npt",
            EntanglementClass::NptMultiCut => "npt_multi_cut",
            EntanglementClass::PairwiseEntangled => "pairwise_entangled",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            EntanglementClass::AllPpt => "separable or undetected PPT entanglement",
            EntanglementClass::BoundBySingleNptCut => {
                "bound entanglement (incomplete separability)"
            }
            EntanglementClass::NptMultiCut => "multiparticle entanglement, no entangled pair",
            EntanglementClass::PairwiseEntangled => "pairwise entanglement present",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [
            EntanglementClass::AllPpt,
            EntanglementClass::BoundBySingleNptCut,
            EntanglementClass::NptMultiCut,
            EntanglementClass::PairwiseEntangled,
        ]
        .into_iter()
        .find(|c| c.label() == s)
    }
}

impl fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify(npt_cuts: &[Cut], concurrences: &[f64; 3], tol: f64) -> EntanglementClass {
    if concurrences.iter().any(|&c| c > tol) {
        EntanglementClass::PairwiseEntangled
    } else {
        match npt_cuts.len() {
            0 => EntanglementClass::AllPpt,
            1 => EntanglementClass::BoundBySingleNptCut,
            _ => EntanglementClass::NptMultiCut,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Indexed by [`Cut::index`].
    pub neg: [NegativityResult; 3],
    /// Indexed like [`Pair::ALL`]: `(i,j)`, `(j,k)`, `(i,k)`.
    pub conc: [f64; 3],
    pub classification: EntanglementClass,
    pub npt_cuts: Vec<Cut>,
    /// Zero threshold used for negativities and concurrences.
    pub tol: f64,
}

impl EntanglementReport {
    pub fn negativity(&self, cut: Cut) -> f64 {
        self.neg[cut.index()].value
    }

    pub fn concurrence(&self, pair: Pair) -> f64 {
        match pair {
            Pair::Ij => self.conc[0],
            Pair::Jk => self.conc[1],
            Pair::Ik => self.conc[2],
        }
    }

    pub fn max_concurrence(&self) -> f64 {
        self.conc.iter().copied().fold(0.0, f64::max)
    }
}

/// Negativities, pair concurrences and the classification of a state.
pub fn report_for_state(rho: &Rho3, tol: f64) -> Result<EntanglementReport> {
    let neg = [
        negativity(rho, Cut::FirstVsRest, tol)?,
        negativity(rho, Cut::MiddleVsRest, tol)?,
        negativity(rho, Cut::LastVsRest, tol)?,
    ];
    let mut conc = [0.0; 3];
    for (slot, pair) in conc.iter_mut().zip(Pair::ALL) {
        *slot = concurrence(&rho.partial_trace(pair.traced_site()))?;
    }
    let npt_cuts: Vec<Cut> = Cut::ALL.into_iter().filter(|c| neg[c.index()].is_npt()).collect();
    let classification = classify(&npt_cuts, &conc, tol);
    Ok(EntanglementReport {
        neg,
        conc,
        classification,
        npt_cuts,
        tol,
    })
}

pub fn report_for_correlators(cset: &CorrelatorSet, tol: f64) -> Result<EntanglementReport> {
    report_for_state(&assemble_rho3(cset)?, tol)
}

/// Full entanglement analysis of three spins of the infinite chain.
pub fn analyze_triple(
    params: &ModelParams,
    geom: &TripleGeometry,
    quad: &QuadratureConfig,
) -> Result<EntanglementReport> {
    report_for_correlators(&correlator_set(geom, params, quad)?, ZERO_TOL)
}

/// Expectation of a two-spin Pauli string, re-exported for consumers that
/// only hold a [`Rho2`].
pub fn pair_expectation(rho: &Rho2, ops: [Pauli; 2]) -> f64 {
    rho.expectation(ops)
}
