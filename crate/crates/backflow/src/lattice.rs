//! Chain parameters, dispersion, momentum eigenvalues, and the
//! positive-momentum window for both boundary conditions.

use std::f64::consts::PI;

use crate::error::{BackflowError, Result};

/// Boundary condition of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Infinite,
    /// Periodic chain with `N` sites.
    Ring(usize),
}

/// Physical parameters of a biased tight-binding chain.
///
/// The nearest-neighbor coupling is `-tau(1 + i*epsilon)` forward and its
/// conjugate backward; `epsilon` biases the motion. The derived angle
/// `xi = arctan(epsilon)` shifts both the dispersion and the
/// positive-momentum window. All fluxes are reported in units of
/// `tau/hbar`; momentum eigenvalues are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    tau: f64,
    epsilon: f64,
    hbar: f64,
    boundary: Boundary,
}

impl ChainParams {
    pub fn new(tau: f64, epsilon: f64, hbar: f64, boundary: Boundary) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(BackflowError::InvalidParams(format!(
                "tau must be positive and finite, got {tau}"
            )));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(BackflowError::InvalidParams(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !epsilon.is_finite() {
            return Err(BackflowError::InvalidParams(format!(
                "epsilon must be finite, got {epsilon}"
            )));
        }
        if let Boundary::Ring(n) = boundary {
            if n < 3 {
                return Err(BackflowError::InvalidParams(format!(
                    "ring needs at least 3 sites, got {n}"
                )));
            }
        }
        Ok(Self {
            tau,
            epsilon,
            hbar,
            boundary,
        })
    }

    /// Infinite chain with `tau = hbar = 1`.
    pub fn infinite(epsilon: f64) -> Self {
        Self::new(1.0, epsilon, 1.0, Boundary::Infinite).expect("unit parameters are valid")
    }

    /// Ring with `tau = hbar = 1`.
    pub fn ring(n: usize, epsilon: f64) -> Result<Self> {
        Self::new(1.0, epsilon, 1.0, Boundary::Ring(n))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Bias angle `xi = arctan(epsilon)`, in `(-pi/2, pi/2)`.
    pub fn xi(&self) -> f64 {
        self.epsilon.atan()
    }

    /// `sqrt(1 + epsilon^2)`.
    pub fn bias_factor(&self) -> f64 {
        self.epsilon.hypot(1.0)
    }

    /// Site count, if periodic.
    pub fn ring_sites(&self) -> Option<usize> {
        match self.boundary {
            Boundary::Ring(n) => Some(n),
            Boundary::Infinite => None,
        }
    }

    /// Site count or a `BoundaryMismatch` error naming `what`.
    pub fn require_ring(&self, what: &str) -> Result<usize> {
        self.ring_sites()
            .ok_or_else(|| BackflowError::BoundaryMismatch(format!("{what} needs a ring")))
    }

    /// Pseudo-momentum `k(n) = 2 pi n / N` of ring mode `n`.
    pub fn ring_k(&self, n: i64) -> Result<f64> {
        let sites = self.require_ring("mode pseudo-momentum")?;
        Ok(2.0 * PI * n as f64 / sites as f64)
    }
}

/// Support of the positive-momentum states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumWindow {
    /// Closed interval `[k_lo, k_hi]` of pseudo-momenta, width exactly pi.
    Continuous { k_lo: f64, k_hi: f64 },
    /// Ring mode indices `eta1..=eta2`.
    Discrete { eta1: i64, eta2: i64 },
}

impl MomentumWindow {
    /// Number of modes (ring) in the window.
    pub fn mode_count(&self) -> Option<usize> {
        match *self {
            MomentumWindow::Discrete { eta1, eta2 } => Some((eta2 - eta1 + 1) as usize),
            MomentumWindow::Continuous { .. } => None,
        }
    }

    pub fn discrete(&self) -> Option<(i64, i64)> {
        match *self {
            MomentumWindow::Discrete { eta1, eta2 } => Some((eta1, eta2)),
            MomentumWindow::Continuous { .. } => None,
        }
    }

    pub fn continuous(&self) -> Option<(f64, f64)> {
        match *self {
            MomentumWindow::Continuous { k_lo, k_hi } => Some((k_lo, k_hi)),
            MomentumWindow::Discrete { .. } => None,
        }
    }

    pub fn contains_mode(&self, n: i64) -> bool {
        matches!(*self, MomentumWindow::Discrete { eta1, eta2 } if eta1 <= n && n <= eta2)
    }
}

/// Dispersion relation `E(k) = -2 tau sqrt(1 + epsilon^2) cos(k + xi)`.
pub fn dispersion(params: &ChainParams, k: f64) -> f64 {
    -2.0 * params.tau() * params.bias_factor() * (k + params.xi()).cos()
}

/// Dimensionless momentum eigenvalue `sqrt(1 + epsilon^2) sin(k + xi)`.
///
/// Sign gives the direction of motion; reported in units of
/// `2 dx mu tau / hbar`, which the unit convention absorbs.
pub fn momentum_eigenvalue(params: &ChainParams, k: f64) -> f64 {
    params.bias_factor() * (k + params.xi()).sin()
}

/// Floor/ceil boundary indices tolerate ~1e-9 of roundoff so that
/// zero-momentum endpoint modes stay inside the window.
const INDEX_NUDGE: f64 = 1e-9;

/// The positive-momentum window: `[-xi, pi - xi]` on the infinite chain,
/// the mode set `{eta1..eta2}` on the ring. Zero-momentum endpoints are
/// included. At `epsilon == 0` the ring uses `eta1 = 0` and
/// `eta2 = N/2 - 1` (even) or `(N-1)/2` (odd) so the zero-momentum state
/// is not counted twice.
pub fn positive_momentum_window(params: &ChainParams) -> MomentumWindow {
    let xi = params.xi();
    match params.boundary() {
        Boundary::Infinite => MomentumWindow::Continuous {
            k_lo: -xi,
            k_hi: PI - xi,
        },
        Boundary::Ring(n) => {
            let nf = n as f64;
            if params.epsilon() == 0.0 {
                let eta2 = if n % 2 == 0 {
                    (n / 2 - 1) as i64
                } else {
                    ((n - 1) / 2) as i64
                };
                MomentumWindow::Discrete { eta1: 0, eta2 }
            } else {
                let eta1 = (-xi * nf / (2.0 * PI) - INDEX_NUDGE).ceil() as i64;
                let eta2 = ((PI - xi) * nf / (2.0 * PI) + INDEX_NUDGE).floor() as i64;
                MomentumWindow::Discrete { eta1, eta2 }
            }
        }
    }
}
