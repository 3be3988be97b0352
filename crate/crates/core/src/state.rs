//! Three- and two-spin reduced density matrices.
//!
//! Basis index `r = 4a + 2b + c` for spins `(i, j, k)` with `0 = ↑`, `1 = ↓`,
//! so the first spin is the most significant bit. The matrices are built
//! from the Pauli-string expansion `ρ = ⅛ Σ ⟨σᵖσ^qσʳ⟩ σᵖ⊗σ^q⊗σʳ` restricted
//! to the parity-allowed correlators; every such string with an even number
//! of `σʸ` is a real matrix, so `ρ` is real symmetric.

use nalgebra::{Complex, Matrix2, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::correlator::{
    correlator_set, two_point_at, z_at, CorrelatorSet, GTable, TwoPointKind,
};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::params::{ModelParams, QuadratureConfig, TripleGeometry};

pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Entries below this magnitude count as numerically zero.
pub const SHAPE_TOL: f64 = 1e-9;
/// Eigenvalue floor for [`assemble_rho3`]; below it the correlators are inconsistent.
pub const NOT_POSITIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `⟨row|σ|col⟩` for a single spin.
    fn element(self, row: usize, col: usize) -> Complex<f64> {
        let zero = Complex::new(0.0, 0.0);
        match self {
            Pauli::I if row == col => Complex::new(1.0, 0.0),
            Pauli::X if row != col => Complex::new(1.0, 0.0),
            Pauli::Y if row != col => {
                // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩
                if row == 1 {
                    Complex::new(0.0, 1.0)
                } else {
                    Complex::new(0.0, -1.0)
                }
            }
            Pauli::Z if row == col => Complex::new(if row == 0 { 1.0 } else { -1.0 }, 0.0),
            _ => zero,
        }
    }
}

fn string_element<const S: usize>(ops: &[Pauli; S], row: usize, col: usize) -> Complex<f64> {
    let mut v = Complex::new(1.0, 0.0);
    for (s, p) in ops.iter().enumerate() {
        let shift = S - 1 - s;
        v *= p.element((row >> shift) & 1, (col >> shift) & 1);
    }
    v
}

/// Dense real part of a Pauli string on `S` spins (`D = 2^S`).
fn pauli_string<const S: usize, const D: usize>(ops: &[Pauli; S]) -> SMatrix<f64, D, D> {
    SMatrix::from_fn(|r, c| {
        let v = string_element(ops, r, c);
        debug_assert!(v.im.abs() < 1e-15, "imaginary Pauli string {ops:?}");
        v.re
    })
}

fn is_symmetric<const D: usize>(m: &SMatrix<f64, D, D>, tol: f64) -> bool {
    (m - m.transpose()).abs().max() <= tol
}

/// Which of the three spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    First,
    Middle,
    Last,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::First, Site::Middle, Site::Last];

    pub fn index(self) -> usize {
        match self {
            Site::First => 0,
            Site::Middle => 1,
            Site::Last => 2,
        }
    }
}

/// Three-spin reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho3 {
    m: Matrix8,
}

impl Rho3 {
    /// Wraps a matrix after checking symmetry and unit trace (both to 1e-12).
    pub fn from_matrix(m: Matrix8) -> Result<Self> {
        if !is_symmetric(&m, 1e-12) {
            return Err(Error::invalid("rho3", "matrix is not symmetric"));
        }
        if (m.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("rho3", format!("trace {} != 1", m.trace())));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix8::identity() / 8.0,
        }
    }

    /// Projector onto a computational basis state `|abc⟩`.
    pub fn basis_projector(index: usize) -> Self {
        let mut m = Matrix8::zeros();
        m[(index, index)] = 1.0;
        Self { m }
    }

    /// `(|↑↑↑⟩ + |↓↓↓⟩)/√2`.
    pub fn ghz() -> Self {
        let mut m = Matrix8::zeros();
        for (r, c) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            m[(r, c)] = 0.5;
        }
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.m
    }

    pub fn eigenvalues(&self) -> Result<[f64; 8]> {
        let v = symmetric_eigenvalues(&self.m)?;
        Ok(std::array::from_fn(|i| v[i]))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// `Tr(ρ σᵖ⊗σ^q⊗σʳ)`.
    pub fn expectation(&self, ops: [Pauli; 3]) -> f64 {
        let mut acc = Complex::new(0.0, 0.0);
        for r in 0..8 {
            for c in 0..8 {
                if self.m[(r, c)] != 0.0 {
                    acc += string_element(&ops, c, r) * self.m[(r, c)];
                }
            }
        }
        acc.re
    }

    /// Correlators recovered from the matrix by tracing against Pauli strings.
    pub fn correlators(&self) -> CorrelatorSet {
        let v: [f64; 19] = std::array::from_fn(|n| self.expectation(EXPANSION[n]));
        CorrelatorSet::from_values(&v)
    }

    /// Conjugation by the permutation that swaps the first and last spin.
    pub fn reversed(&self) -> Self {
        let perm = |r: usize| ((r & 1) << 2) | (r & 2) | ((r >> 2) & 1);
        Self {
            m: Matrix8::from_fn(|r, c| self.m[(perm(r), perm(c))]),
        }
    }

    pub fn partial_trace(&self, site: Site) -> Rho2 {
        partial_trace(self, site)
    }

    /// Single-spin state of one of the three sites.
    pub fn single_site(&self, site: Site) -> Matrix2<f64> {
        let s = site.index();
        Matrix2::from_fn(|a, b| {
            let mut acc = 0.0;
            for rest in 0..4 {
                let insert = |bit: usize| {
                    let high = rest >> (2 - s) << (3 - s);
                    let low = rest & ((1 << (2 - s)) - 1);
                    high | (bit << (2 - s)) | low
                };
                acc += self.m[(insert(a), insert(b))];
            }
            acc
        })
    }

    /// Largest entry at a position that parity forbids (odd number of flips).
    pub fn parity_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..8usize {
            for c in 0..8usize {
                if (r ^ c).count_ones() % 2 == 1 {
                    worst = worst.max(self.m[(r, c)].abs());
                }
            }
        }
        worst
    }
}

// Order matches `CorrelatorSet::NAMES`.
const EXPANSION: [[Pauli; 3]; 19] = {
    use Pauli::*;
    [
        [Z, I, I],
        [I, Z, I],
        [I, I, Z],
        [Z, Z, I],
        [I, Z, Z],
        [Z, I, Z],
        [X, X, I],
        [I, X, X],
        [X, I, X],
        [Y, Y, I],
        [I, Y, Y],
        [Y, I, Y],
        [Z, Z, Z],
        [X, X, Z],
        [Z, X, X],
        [X, Z, X],
        [Y, Y, Z],
        [Z, Y, Y],
        [Y, Z, Y],
    ]
};

/// Builds `ρ_ijk` from its correlators.
///
/// Fails with [`Error::NotPositive`] when the smallest eigenvalue is below
/// `−1e-6`, which signals mutually inconsistent correlators.
pub fn assemble_rho3(cset: &CorrelatorSet) -> Result<Rho3> {
    let rho = assemble_rho3_unchecked(cset);
    let min = rho.min_eigenvalue()?;
    if min < -NOT_POSITIVE_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(rho)
}

/// [`assemble_rho3`] without the positivity check.
pub fn assemble_rho3_unchecked(cset: &CorrelatorSet) -> Rho3 {
    let mut m = Matrix8::identity();
    for (ops, value) in EXPANSION.iter().zip(cset.values()) {
        if value != 0.0 {
            m += pauli_string::<3, 8>(ops) * value;
        }
    }
    Rho3 { m: m / 8.0 }
}

/// Two-spin reduced density matrix, basis index `2a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho2 {
    m: Matrix4<f64>,
}

impl Rho2 {
    pub fn from_matrix(m: Matrix4<f64>) -> Result<Self> {
        if !is_symmetric(&m, 1e-12) {
            return Err(Error::invalid("rho2", "matrix is not symmetric"));
        }
        if (m.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("rho2", format!("trace {} != 1", m.trace())));
        }
        Ok(Self { m })
    }

    /// X-shaped state from the pair correlators of two spins.
    pub fn from_pair_correlators(z: [f64; 2], zz: f64, xx: f64, yy: f64) -> Self {
        use Pauli::*;
        let mut m = Matrix4::identity();
        m += pauli_string::<2, 4>(&[Z, I]) * z[0];
        m += pauli_string::<2, 4>(&[I, Z]) * z[1];
        m += pauli_string::<2, 4>(&[Z, Z]) * zz;
        m += pauli_string::<2, 4>(&[X, X]) * xx;
        m += pauli_string::<2, 4>(&[Y, Y]) * yy;
        Self { m: m / 4.0 }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix4::identity() / 4.0,
        }
    }

    /// `(|↑↑⟩ + |↓↓⟩)/√2`.
    pub fn bell() -> Self {
        let mut m = Matrix4::zeros();
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, c)] = 0.5;
        }
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(symmetric_eigenvalues(&self.m)?[0])
    }

    /// Largest entry outside the diagonal and anti-diagonal.
    pub fn x_shape_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                if r != c && r + c != 3 {
                    worst = worst.max(self.m[(r, c)].abs());
                }
            }
        }
        worst
    }

    pub fn expectation(&self, ops: [Pauli; 2]) -> f64 {
        let mut acc = Complex::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                acc += string_element(&ops, c, r) * self.m[(r, c)];
            }
        }
        acc.re
    }
}

/// Traces out one of the three spins; the remaining two keep their order.
pub fn partial_trace(rho: &Rho3, site: Site) -> Rho2 {
    let s = site.index();
    let embed = |pair: usize, bit: usize| -> usize {
        // insert `bit` at position s (0 = most significant) into the 2-bit index
        let hi = pair >> (2 - s);
        let lo = pair & ((1 << (2 - s)) - 1);
        (hi << (3 - s)) | (bit << (2 - s)) | lo
    };
    let m = Matrix4::from_fn(|r, c| {
        (0..2)
            .map(|bit| rho.m[(embed(r, bit), embed(c, bit))])
            .sum()
    });
    Rho2 { m }
}

/// Two-spin state of the infinite chain for spins at distance `d`.
pub fn reduced_pair(d: usize, params: &ModelParams, quad: &QuadratureConfig) -> Result<Rho2> {
    if d < 1 {
        return Err(Error::invalid("d", "pair distance must be >= 1"));
    }
    let table = GTable::shared(params, quad, d + 1)?;
    Ok(reduced_pair_from_table(&table, d))
}

pub fn reduced_pair_from_table(table: &GTable, d: usize) -> Rho2 {
    let d = d as i64;
    let z = z_at(table, 0);
    Rho2::from_pair_correlators(
        [z, z],
        two_point_at(table, TwoPointKind::ZZ, 0, d),
        two_point_at(table, TwoPointKind::XX, 0, d),
        two_point_at(table, TwoPointKind::YY, 0, d),
    )
}

/// Correlators and `ρ_ijk` of the infinite chain in one call.
pub fn rho3_for(
    geom: &TripleGeometry,
    params: &ModelParams,
    quad: &QuadratureConfig,
) -> Result<Rho3> {
    assemble_rho3(&correlator_set(geom, params, quad)?)
}
