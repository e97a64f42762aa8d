//! Closed-form extremal flux bounds and the positive-momentum states that
//! attain them.
//!
//! Superpositions over the whole positive-momentum window have their
//! instantaneous flux confined to `[lambda_minus, lambda_plus]`. Both bounds
//! come from a rank-two reduction of the flux form: a 2x2 eigenproblem whose
//! eigenvalues are the bounds and whose eigenvectors build the optimal weight
//! function (infinite chain) or coefficient sequence (ring). The optimal
//! state attains its bound exactly at the chosen anchor `(j', t')`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{BackflowError, Result};
use crate::flux::{RingState, WeightState};
use crate::lattice::{dispersion, positive_momentum_window, ChainParams};
use crate::numerics::QuadratureRule;

/// Which extremum a routine should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Extreme instantaneous flux values, in units of tau/hbar.
#[derive(Debug, Clone, Copy)]
pub struct FluxBounds {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl FluxBounds {
    pub fn branch(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }
}

/// Infinite-chain bounds `lambda_{+-} = (2 +- pi) sqrt(1+eps^2) tau / (2 pi hbar)`.
pub fn infinite_bounds(params: &ChainParams) -> Result<FluxBounds> {
    if params.ring_sites().is_some() {
        return Err(BackflowError::BoundaryMismatch(
            "infinite-chain bounds need an infinite chain".into(),
        ));
    }
    let scale = params.bias_factor() * params.tau() / (2.0 * PI * params.hbar());
    Ok(FluxBounds {
        lambda_plus: (2.0 + PI) * scale,
        lambda_minus: (2.0 - PI) * scale,
    })
}

/// Optimal weight function for the infinite chain, sampled on `rule`:
///
/// `phi_{+-}(k) = e^{-i((j'-1/2)k - E_k t'/hbar)} [+-cos((k+xi)/2) + sin((k+xi)/2)] / sqrt(pi +- 2)`
///
/// The closed form is exactly unit-norm over `[-xi, pi-xi]`; its flux at
/// `(j', t')` equals the branch bound.
pub fn infinite_optimal_weight(
    params: &ChainParams,
    jprime: i64,
    tprime: f64,
    branch: Branch,
    rule: &QuadratureRule,
) -> Result<WeightState> {
    if params.ring_sites().is_some() {
        return Err(BackflowError::BoundaryMismatch(
            "optimal weight needs an infinite chain".into(),
        ));
    }
    let xi = params.xi();
    let sign = branch.sign();
    let norm = (PI + sign * 2.0).sqrt().recip();
    let phi: Vec<Complex64> = rule
        .nodes
        .iter()
        .map(|&k| {
            let theta = (jprime as f64 - 0.5) * k - dispersion(params, k) * tprime / params.hbar();
            let envelope = sign * (0.5 * (k + xi)).cos() + (0.5 * (k + xi)).sin();
            Complex64::from_polar(norm * envelope, -theta)
        })
        .collect();
    WeightState::new(rule.nodes.clone(), rule.weights.clone(), phi)
}

/// Window geometry shared by the ring formulas: mode count `W` and the
/// Dirichlet-sum factors
/// `G = cos(pi(eta1+eta2)/N + xi) csc(pi/N) sin(pi W / N)` and
/// `T = sin(pi(eta1+eta2)/N + xi) csc(pi/N) sin(pi W / N)`.
struct RingGeometry {
    n_sites: f64,
    eta1: i64,
    eta2: i64,
    count: f64,
    g: f64,
    t: f64,
}

fn ring_geometry(params: &ChainParams) -> Result<RingGeometry> {
    let n_sites = params.require_ring("ring bounds")? as f64;
    let (eta1, eta2) = positive_momentum_window(params)
        .discrete()
        .expect("ring window is discrete");
    let count = (eta2 - eta1 + 1) as f64;
    let mid = PI * (eta1 + eta2) as f64 / n_sites + params.xi();
    let span = (PI / n_sites).sin().recip() * (PI * count / n_sites).sin();
    Ok(RingGeometry {
        n_sites,
        eta1,
        eta2,
        count,
        g: mid.cos() * span,
        t: mid.sin() * span,
    })
}

/// Clamps tiny negative square-root arguments produced by roundoff.
fn guarded_sqrt(x: f64) -> f64 {
    if x < 0.0 {
        debug_assert!(x > -1e-12, "sqrt argument {x} too negative");
        0.0
    } else {
        x.sqrt()
    }
}

/// The 2x2 matrix of the ring's rank-two flux reduction; its eigenvalues are
/// the bounds of [`ring_bounds`]. The entries do not depend on the anchor
/// `(j', t')`, which only rotates phases of the optimal coefficients.
pub fn ring_extremal_matrix(
    params: &ChainParams,
    _jprime: i64,
    _tprime: f64,
) -> Result<[[f64; 2]; 2]> {
    let geo = ring_geometry(params)?;
    let scale = params.tau() * params.bias_factor() / (geo.n_sites * params.hbar());
    Ok([
        [scale * geo.t, scale * (geo.count - geo.g)],
        [scale * (geo.count + geo.g), scale * geo.t],
    ])
}

/// Ring bounds
/// `lambda_{+-} = (tau sqrt(1+eps^2) / N hbar) [T +- sqrt(W^2 - G^2)]`.
///
/// Errors with `WindowTooSmall` when the window holds a single mode: a lone
/// plane wave has fixed positive flux and no backflow.
pub fn ring_bounds(params: &ChainParams) -> Result<FluxBounds> {
    let geo = ring_geometry(params)?;
    if geo.eta1 == geo.eta2 {
        return Err(BackflowError::WindowTooSmall(geo.eta1));
    }
    let scale = params.tau() * params.bias_factor() / (geo.n_sites * params.hbar());
    let root = guarded_sqrt(geo.count * geo.count - geo.g * geo.g);
    Ok(FluxBounds {
        lambda_plus: scale * (geo.t + root),
        lambda_minus: scale * (geo.t - root),
    })
}

/// Optimal ring coefficients
///
/// `c_m = N_{+-} e^{-i((2j'-1)m pi/N - E_m t'/hbar)}
///        [+-sqrt(W-G) cos(m pi/N + xi/2) + sqrt(W+G) sin(m pi/N + xi/2)]`
///
/// for modes `m = eta1..=eta2`, unit-norm, attaining the branch bound at
/// `(j', t')`. Moving the anchor only multiplies each `c_m` by a phase.
pub fn ring_optimal_coeffs(
    params: &ChainParams,
    jprime: i64,
    tprime: f64,
    branch: Branch,
) -> Result<RingState> {
    let geo = ring_geometry(params)?;
    if geo.eta1 == geo.eta2 {
        return Err(BackflowError::WindowTooSmall(geo.eta1));
    }
    let sign = branch.sign();
    let root = guarded_sqrt(geo.count * geo.count - geo.g * geo.g);
    let denom = geo.count * geo.count - geo.g * geo.g + sign * geo.t * root;
    let norm = guarded_sqrt(denom).recip();
    let cos_amp = sign * guarded_sqrt(geo.count - geo.g);
    let sin_amp = guarded_sqrt(geo.count + geo.g);

    let half_xi = 0.5 * params.xi();
    let coeffs: Vec<Complex64> = (geo.eta1..=geo.eta2)
        .map(|m| {
            let angle = m as f64 * PI / geo.n_sites + half_xi;
            let envelope = cos_amp * angle.cos() + sin_amp * angle.sin();
            let energy = dispersion(params, params.ring_k(m).expect("ring"));
            let phase =
                (2 * jprime - 1) as f64 * m as f64 * PI / geo.n_sites - energy * tprime / params.hbar();
            Complex64::from_polar(norm * envelope, -phase)
        })
        .collect();
    RingState::new(geo.eta1, coeffs)
}
