//! Three-spin reduced density matrices of the infinite anisotropic XY chain
//! in a transverse field, and their free and bound entanglement.
//!
//! The model is `H = −Σ [(1+γ)/4 σˣσˣ + (1−γ)/4 σʸσʸ] − (h/2) Σ σᶻ`.
//! All spin correlators follow from the single-particle contraction
//! [`correlator::g_k`] by Wick's theorem.

pub mod correlator;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod scans;
pub mod state;

pub use correlator::{correlator_set, g_k, CorrelatorSet, GTable, ThreePointKind, TwoPointKind};
pub use entanglement::{analyze_triple, Cut, EntanglementClass, EntanglementReport, Pair};
pub use error::{Error, Result};
pub use params::{ModelParams, QuadratureConfig, TripleGeometry};
pub use state::{assemble_rho3, Pauli, Rho2, Rho3, Site};
