//! Points of the phase diagram, quadrature settings and three-site geometries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(h, γ, t)` of the XY chain phase diagram.
///
/// `h` is the reduced field `B/2J` (critical at `h = 1`), `gamma` the
/// anisotropy (`γ = 1` is the quantum Ising chain) and `t` the reduced
/// temperature, measured in the same units as the quasiparticle dispersion
/// [`crate::correlator::dispersion`]. `t = 0` selects the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub h: f64,
    pub gamma: f64,
    pub t: f64,
}

impl ModelParams {
    pub fn new(h: f64, gamma: f64, t: f64) -> Result<Self> {
        let p = Self { h, gamma, t };
        p.validate()?;
        Ok(p)
    }

    pub fn ground_state(h: f64, gamma: f64) -> Result<Self> {
        Self::new(h, gamma, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.h.is_finite() || self.h < 0.0 {
            return Err(Error::invalid("h", format!("{} must be finite and >= 0", self.h)));
        }
        if !self.gamma.is_finite() || !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(
                "gamma",
                format!("{} must lie in [0, 1]", self.gamma),
            ));
        }
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(Error::invalid("t", format!("{} must be finite and >= 0", self.t)));
        }
        Ok(())
    }

    pub fn with_t(self, t: f64) -> Result<Self> {
        Self::new(self.h, self.gamma, t)
    }

    pub fn with_h(self, h: f64) -> Result<Self> {
        Self::new(h, self.gamma, self.t)
    }

    /// Exact bit pattern, used as a cache key.
    pub(crate) fn key(&self) -> [u64; 3] {
        [self.h.to_bits(), self.gamma.to_bits(), self.t.to_bits()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target absolute error for each `G_k`.
    pub abs_tol: f64,
    /// Panel budget for `k = 0`; the effective budget grows with `|k|`.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_subdivisions: 2048,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let q = Self {
            abs_tol,
            max_subdivisions,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", format!("{} must be > 0", self.abs_tol)));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::invalid(
                "max_subdivisions",
                format!("{} must be >= 16", self.max_subdivisions),
            ));
        }
        Ok(())
    }

    pub(crate) fn key(&self) -> [u64; 2] {
        [self.abs_tol.to_bits(), self.max_subdivisions as u64]
    }
}

/// Three sites `i < j < k` of the chain, given by `alpha = j - i` and
/// `beta = k - j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleGeometry {
    alpha: usize,
    beta: usize,
}

impl TripleGeometry {
    pub fn new(alpha: usize, beta: usize) -> Result<Self> {
        if alpha < 1 {
            return Err(Error::invalid("alpha", "distance j - i must be >= 1"));
        }
        if beta < 1 {
            return Err(Error::invalid("beta", "distance k - j must be >= 1"));
        }
        Ok(Self { alpha, beta })
    }

    /// Three adjacent spins.
    pub fn block() -> Self {
        Self { alpha: 1, beta: 1 }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Distance `k - i` between the outer spins.
    pub fn gamma_dist(&self) -> usize {
        self.alpha + self.beta
    }

    /// The same three sites read from the other end of the chain.
    pub fn reflected(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    /// Site offsets `(0, alpha, alpha + beta)`.
    pub fn offsets(&self) -> [usize; 3] {
        [0, self.alpha, self.alpha + self.beta]
    }
}
