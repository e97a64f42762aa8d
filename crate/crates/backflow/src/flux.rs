//! Discrete probability flux, continuity-equation residuals, and the
//! two-state backflow minimum.
//!
//! `J(j, t)` is the flux from site `j-1` to `j`. For a single plane wave it
//! reduces to `(2 tau sqrt(1+eps^2) / N hbar) sin(k + xi)`, so positive
//! momentum means positive flux; superpositions of positive-momentum modes
//! can still drive it negative.

use num_complex::Complex64;

use crate::error::{BackflowError, Result};
use crate::lattice::{dispersion, positive_momentum_window, ChainParams, MomentumWindow};

/// Unit-norm state over the positive-momentum window of a ring:
/// coefficients `c_n` for modes `n = eta1..=eta2`.
#[derive(Debug, Clone)]
pub struct RingState {
    eta1: i64,
    coeffs: Vec<Complex64>,
}

impl RingState {
    /// Checks `sum |c_n|^2 = 1` within 1e-10.
    pub fn new(eta1: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(BackflowError::InvalidParams(
                "ring state needs at least one coefficient".into(),
            ));
        }
        let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(BackflowError::NormViolation((norm2 - 1.0).abs()));
        }
        Ok(Self { eta1, coeffs })
    }

    /// Rescales to unit norm, then constructs.
    pub fn normalized(eta1: i64, mut coeffs: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(BackflowError::NormViolation(1.0));
        }
        let scale = norm2.sqrt().recip();
        for c in &mut coeffs {
            *c *= scale;
        }
        Self::new(eta1, coeffs)
    }

    pub fn eta1(&self) -> i64 {
        self.eta1
    }

    pub fn eta2(&self) -> i64 {
        self.eta1 + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.eta1 + i as i64, c))
    }

    /// Site amplitude `Psi(j, t) = (1/sqrt(N)) sum_n c_n e^{i(2 pi n j / N - E_n t / hbar)}`.
    pub fn amplitude(&self, params: &ChainParams, j: i64, t: f64) -> Result<Complex64> {
        let n_sites = params.require_ring("site amplitude")?;
        let mut psi = Complex64::ZERO;
        for (n, c) in self.modes() {
            let k = params.ring_k(n)?;
            let phase = k * j as f64 - dispersion(params, k) * t / params.hbar();
            psi += c * Complex64::from_polar(1.0, phase);
        }
        Ok(psi / (n_sites as f64).sqrt())
    }
}

/// Unit-norm state over the continuous window: weight-function samples
/// `phi(k_i)` on quadrature nodes `k_i` with weights `w_i`.
#[derive(Debug, Clone)]
pub struct WeightState {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    phi: Vec<Complex64>,
}

impl WeightState {
    /// Checks `sum w_i |phi_i|^2 = 1` within 1e-10.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, phi: Vec<Complex64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.len() != phi.len() || nodes.is_empty() {
            return Err(BackflowError::InvalidParams(
                "weight state needs matching nonempty nodes, weights, samples".into(),
            ));
        }
        let norm2: f64 = weights
            .iter()
            .zip(&phi)
            .map(|(w, p)| w * p.norm_sqr())
            .sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(BackflowError::NormViolation((norm2 - 1.0).abs()));
        }
        Ok(Self {
            nodes,
            weights,
            phi,
        })
    }

    pub fn normalized(nodes: Vec<f64>, weights: Vec<f64>, mut phi: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = weights
            .iter()
            .zip(&phi)
            .map(|(w, p)| w * p.norm_sqr())
            .sum();
        if norm2 <= 0.0 {
            return Err(BackflowError::NormViolation(1.0));
        }
        let scale = norm2.sqrt().recip();
        for p in &mut phi {
            *p *= scale;
        }
        Self::new(nodes, weights, phi)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }

    /// Applies a pointwise phase `e^{i g(k)}` to the samples (norm preserving).
    pub fn with_phase(&self, g: impl Fn(f64) -> f64) -> Self {
        let phi = self
            .nodes
            .iter()
            .zip(&self.phi)
            .map(|(&k, &p)| p * Complex64::from_polar(1.0, g(k)))
            .collect();
        Self {
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            phi,
        }
    }
}

/// A positive-momentum state in either representation.
#[derive(Debug, Clone)]
pub enum PositiveMomentumState {
    Ring(RingState),
    Weight(WeightState),
}

/// One tabulated flux trace at a fixed site.
#[derive(Debug, Clone)]
pub struct FluxSeries {
    pub site: i64,
    /// `(t, J)` pairs, times strictly increasing; flux in units of tau/hbar.
    pub samples: Vec<(f64, f64)>,
}

impl FluxSeries {
    pub fn new(site: i64, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(BackflowError::InvalidParams(
                "flux series times must be strictly increasing".into(),
            ));
        }
        Ok(Self { site, samples })
    }
}

/// Flux from site `j-1` to `j` given the two amplitudes:
/// `(2 tau / hbar) [Im(psi*_{j-1} psi_j) + epsilon Re(psi*_{j-1} psi_j)]`.
pub fn site_flux(psi_left: Complex64, psi_here: Complex64, params: &ChainParams) -> f64 {
    let z = psi_left.conj() * psi_here;
    2.0 * params.tau() / params.hbar() * (z.im + params.epsilon() * z.re)
}

/// `|d|Psi(j,t)|^2/dt + J(j+1,t) - J(j,t)|` with the time derivative taken
/// analytically from the eigenbasis expansion. Zero up to roundoff for any
/// solution of the Schroedinger equation; site indices wrap mod N.
pub fn continuity_residual(
    state: &RingState,
    params: &ChainParams,
    j: i64,
    t: f64,
) -> Result<f64> {
    let n_sites = params.require_ring("continuity residual")? as i64;
    let wrap = |site: i64| site.rem_euclid(n_sites);

    let psi = |site: i64| state.amplitude(params, wrap(site), t);
    let psi_jm1 = psi(j - 1)?;
    let psi_j = psi(j)?;
    let psi_jp1 = psi(j + 1)?;

    // d|Psi|^2/dt = 2 Re(Psi* dPsi/dt), each mode evolving by e^{-i E_n t / hbar}.
    let mut dpsi = Complex64::ZERO;
    for (n, c) in state.modes() {
        let k = params.ring_k(n)?;
        let energy = dispersion(params, k);
        let phase = k * wrap(j) as f64 - energy * t / params.hbar();
        dpsi += c * Complex64::from_polar(1.0, phase) * Complex64::new(0.0, -energy / params.hbar());
    }
    dpsi /= (n_sites as f64).sqrt();
    let density_rate = 2.0 * (psi_j.conj() * dpsi).re;

    let flux_in = site_flux(psi_jm1, psi_j, params);
    let flux_out = site_flux(psi_j, psi_jp1, params);
    Ok((density_rate + flux_out - flux_in).abs())
}

fn check_two_modes(params: &ChainParams, m1: i64, m2: i64) -> Result<usize> {
    let n_sites = params.require_ring("two-state flux")?;
    if m1 == m2 {
        return Err(BackflowError::SameMode(m1));
    }
    Ok(n_sites)
}

/// Flux of the two-mode superposition
/// `cos(theta/2) |m1> + sin(theta/2) e^{i gamma} |m2>` at `(j, t)`.
pub fn two_state_flux(
    params: &ChainParams,
    m1: i64,
    m2: i64,
    theta: f64,
    gamma: f64,
    j: i64,
    t: f64,
) -> Result<f64> {
    let n_sites = check_two_modes(params, m1, m2)? as f64;
    let xi = params.xi();
    let pi_n = std::f64::consts::PI / n_sites;
    let diff = (m1 - m2) as f64 * pi_n;
    let total = (m1 + m2) as f64 * pi_n + xi;
    let e1 = dispersion(params, params.ring_k(m1)?);
    let e2 = dispersion(params, params.ring_k(m2)?);
    let beat = (2 * j - 1) as f64 * diff - (e1 - e2) * t / params.hbar() - gamma;

    let prefactor = 2.0 * params.tau() * params.bias_factor() / (n_sites * params.hbar());
    Ok(prefactor
        * (diff.cos() * total.sin()
            + theta.cos() * diff.sin() * total.cos()
            + beat.cos() * total.sin() * theta.sin()))
}

/// Global minimum of the two-mode flux over mixing angle, phase, site, and
/// time, with the minimizing angle.
#[derive(Debug, Clone, Copy)]
pub struct TwoStateMin {
    /// Most negative flux attainable, in units of tau/hbar.
    pub j_min: f64,
    /// Mixing angle in `[0, pi]` attaining it.
    pub theta_star: f64,
}

/// Closed-form two-mode minimum `(2 tau sqrt(1+eps^2) / N hbar)(a - sqrt(b^2 + c^2))`.
///
/// Negative whenever `m1 != m2` and both modes sit in the positive-momentum
/// window.
pub fn two_state_min(params: &ChainParams, m1: i64, m2: i64) -> Result<TwoStateMin> {
    let n_sites = check_two_modes(params, m1, m2)? as f64;
    let xi = params.xi();
    let pi_n = std::f64::consts::PI / n_sites;
    let diff = (m1 - m2) as f64 * pi_n;
    let total = (m1 + m2) as f64 * pi_n + xi;

    let a = diff.cos() * total.sin();
    let b = diff.sin() * total.cos();
    let c = total.sin();

    let prefactor = 2.0 * params.tau() * params.bias_factor() / (n_sites * params.hbar());
    let j_min = prefactor * (a - b.hypot(c));

    // tan(theta) = -c/b, with the branch on [0, pi] chosen by direct
    // evaluation of a + b cos(theta) - c sin(theta).
    let value = |theta: f64| a + b * theta.cos() - c * theta.sin();
    let mut theta_star = c.atan2(-b).rem_euclid(std::f64::consts::PI);
    let other = theta_star + std::f64::consts::PI;
    if other <= std::f64::consts::PI && value(other) < value(theta_star) {
        theta_star = other;
    }

    Ok(TwoStateMin { j_min, theta_star })
}

fn check_unit_norm(norm2: f64) -> Result<()> {
    if (norm2 - 1.0).abs() > 1e-8 {
        return Err(BackflowError::NormViolation((norm2 - 1.0).abs()));
    }
    Ok(())
}

fn take_real(z: Complex64) -> f64 {
    debug_assert!(
        z.im.abs() <= 1e-12,
        "flux lost reality: Im = {:.3e}",
        z.im
    );
    z.re
}

/// Flux of a general ring superposition at `(j, t)`: the double mode sum
/// weighted by `sin((m+n) pi / N + xi)`.
pub fn general_flux_ring(
    state: &RingState,
    params: &ChainParams,
    j: i64,
    t: f64,
) -> Result<f64> {
    let n_sites = params.require_ring("ring flux")? as f64;
    check_unit_norm(state.coeffs().iter().map(|c| c.norm_sqr()).sum())?;
    let xi = params.xi();
    let pi_n = std::f64::consts::PI / n_sites;
    let hbar = params.hbar();

    // Per-mode phase factors; the (m, n) term carries exp(i(phase_n - phase_m)).
    let modes: Vec<(f64, Complex64)> = state
        .modes()
        .map(|(n, c)| {
            let energy = dispersion(params, params.ring_k(n).expect("ring"));
            let phase = (2 * j - 1) as f64 * n as f64 * pi_n - energy * t / hbar;
            (n as f64, c * Complex64::from_polar(1.0, phase))
        })
        .collect();

    let mut acc = Complex64::ZERO;
    for (m, um) in &modes {
        for (n, un) in &modes {
            acc += um.conj() * un * ((m + n) * pi_n + xi).sin();
        }
    }
    let prefactor = 2.0 * params.tau() * params.bias_factor() / (n_sites * hbar);
    Ok(prefactor * take_real(acc))
}

/// Flux of a general continuous-window superposition at `(j, t)`: the double
/// integral over the attached quadrature rule.
pub fn general_flux_infinite(
    state: &WeightState,
    params: &ChainParams,
    j: i64,
    t: f64,
) -> Result<f64> {
    if params.ring_sites().is_some() {
        return Err(BackflowError::BoundaryMismatch(
            "continuous-window flux needs an infinite chain".into(),
        ));
    }
    check_unit_norm(
        state
            .weights()
            .iter()
            .zip(state.phi())
            .map(|(w, p)| w * p.norm_sqr())
            .sum(),
    )?;
    let xi = params.xi();
    let hbar = params.hbar();

    // h(k) = phi(k) e^{i((j - 1/2) k - E_k t / hbar)}; the (k', k) term is
    // conj(h(k')) h(k) sin((k + k')/2 + xi).
    let h: Vec<(f64, f64, Complex64)> = state
        .nodes()
        .iter()
        .zip(state.weights())
        .zip(state.phi())
        .map(|((&k, &w), &p)| {
            let phase = (j as f64 - 0.5) * k - dispersion(params, k) * t / hbar;
            (k, w, p * Complex64::from_polar(1.0, phase))
        })
        .collect();

    let mut acc = Complex64::ZERO;
    for (kp, wp, hp) in &h {
        for (k, w, hk) in &h {
            acc += hp.conj() * hk * (w * wp) * (0.5 * (k + kp) + xi).sin();
        }
    }
    let prefactor = params.tau() * params.bias_factor() / (std::f64::consts::PI * hbar);
    Ok(prefactor * take_real(acc))
}

/// Draws a unit-norm random state over the ring's positive-momentum window
/// (complex Gaussian coefficients).
pub fn random_ring_state(params: &ChainParams, rng: &mut impl rand::Rng) -> Result<RingState> {
    use rand_distr::{Distribution, StandardNormal};
    let window = positive_momentum_window(params);
    let (eta1, eta2) = window.discrete().ok_or_else(|| {
        BackflowError::BoundaryMismatch("random ring state needs a ring".into())
    })?;
    let count = (eta2 - eta1 + 1) as usize;
    let coeffs: Vec<Complex64> = (0..count)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    RingState::normalized(eta1, coeffs)
}

/// Window of a ring state as a `MomentumWindow`.
pub fn ring_state_window(state: &RingState) -> MomentumWindow {
    MomentumWindow::Discrete {
        eta1: state.eta1(),
        eta2: state.eta2(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn plane_wave(n: i64) -> RingState {
        RingState::new(n, vec![Complex64::ONE]).unwrap()
    }

    #[test]
    fn site_flux_of_plane_wave() {
        for (n_sites, eps, mode) in [(9usize, 0.0, 2i64), (9, 1.0, 3), (12, 0.5, -1)] {
            let p = ChainParams::ring(n_sites, eps).unwrap();
            let k = p.ring_k(mode).unwrap();
            let t = 0.7;
            let state = plane_wave(mode);
            let psi_l = state.amplitude(&p, 4, t).unwrap();
            let psi_r = state.amplitude(&p, 5, t).unwrap();
            let flux = site_flux(psi_l, psi_r, &p);
            let expect =
                2.0 * p.bias_factor() / n_sites as f64 * (k + p.xi()).sin();
            assert!((flux - expect).abs() < 1e-14, "flux={flux} expect={expect}");
        }
    }

    #[test]
    fn site_flux_real_amplitudes_unbiased() {
        let p = ChainParams::infinite(0.0);
        let flux = site_flux(Complex64::new(0.3, 0.0), Complex64::new(-0.8, 0.0), &p);
        assert_eq!(flux, 0.0);
    }

    #[test]
    fn site_flux_uniform_biased() {
        let p = ChainParams::infinite(1.0);
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let flux = site_flux(amp, amp, &p);
        assert!((flux - 1.0).abs() < 1e-15);
    }

    #[test]
    fn continuity_single_eigenstate_is_stationary() {
        let p = ChainParams::ring(7, 0.4).unwrap();
        let state = plane_wave(1);
        for j in 0..7 {
            let r = continuity_residual(&state, &p, j, 1.3).unwrap();
            assert!(r < 1e-14, "j={j} r={r}");
        }
    }

    #[test]
    fn continuity_two_state_superposition() {
        let p = ChainParams::ring(4, 0.0).unwrap();
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let state = RingState::new(0, vec![c, c]).unwrap();
        for j in 0..4 {
            for t in [0.0, 0.31, 2.7, 10.0] {
                let r = continuity_residual(&state, &p, j, t).unwrap();
                assert!(r <= 1e-12, "j={j} t={t} r={r}");
            }
        }
    }

    #[test]
    fn continuity_random_three_state() {
        let p = ChainParams::ring(9, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xB0F107);
        for _ in 0..20 {
            let state = random_ring_state(&p, &mut rng).unwrap();
            // Keep three modes, renormalized.
            let coeffs = state.coeffs()[..3.min(state.coeffs().len())].to_vec();
            let state = RingState::normalized(state.eta1(), coeffs).unwrap();
            for j in [0, 4, 8] {
                for t in [0.0, 0.9, 5.5] {
                    let r = continuity_residual(&state, &p, j, t).unwrap();
                    assert!(r <= 1e-10, "r={r}");
                }
            }
        }
    }

    #[test]
    fn two_state_flux_theta_zero_is_pure_mode() {
        let p = ChainParams::ring(9, 0.5).unwrap();
        let (m1, m2) = (1, 3);
        let k = p.ring_k(m1).unwrap();
        let expect = 2.0 * p.bias_factor() / 9.0 * (k + p.xi()).sin();
        for j in 0..9 {
            let f = two_state_flux(&p, m1, m2, 0.0, 0.0, j, 2.2).unwrap();
            assert!((f - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn two_state_flux_known_minimum_point() {
        // N=4, eps=0, modes 0 and 1, theta=pi/2: at the beat cosine's minimum
        // the flux is (2/4)(1/2 - sqrt(2)/2).
        let p = ChainParams::ring(4, 0.0).unwrap();
        let expect = 0.5 * (0.5 - std::f64::consts::SQRT_2 / 2.0);
        // beat = (2j-1)(m1-m2)pi/4 - (E1-E2)t; scan a period for its minimum.
        let mut best = f64::INFINITY;
        for j in 0..4 {
            for i in 0..4000 {
                let t = i as f64 * 4.0 * PI / 4000.0;
                let f = two_state_flux(&p, 0, 1, PI / 2.0, 0.0, j, t).unwrap();
                best = best.min(f);
            }
        }
        assert!((best - expect).abs() < 1e-5, "best={best} expect={expect}");
        assert!((expect + 0.10355).abs() < 1e-4);
    }

    #[test]
    fn two_state_flux_matches_site_flux() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        use rand::Rng;
        for &(n_sites, eps) in &[(9usize, 1.0), (6, 0.0), (11, 0.3)] {
            let p = ChainParams::ring(n_sites, eps).unwrap();
            let (e1, e2) = positive_momentum_window(&p).discrete().unwrap();
            for _ in 0..34 {
                let m1 = rng.random_range(e1..=e2);
                let m2 = loop {
                    let m = rng.random_range(e1..=e2);
                    if m != m1 {
                        break m;
                    }
                };
                let theta: f64 = rng.random_range(0.0..PI);
                let gamma: f64 = rng.random_range(0.0..2.0 * PI);
                let j = rng.random_range(0..n_sites as i64);
                let t: f64 = rng.random_range(0.0..20.0);

                let direct = two_state_flux(&p, m1, m2, theta, gamma, j, t).unwrap();

                // Build the superposition explicitly and take the site flux.
                let lo = m1.min(m2);
                let span = (m1.max(m2) - lo + 1) as usize;
                let mut coeffs = vec![Complex64::ZERO; span];
                coeffs[(m1 - lo) as usize] += Complex64::from((theta / 2.0).cos());
                coeffs[(m2 - lo) as usize] +=
                    Complex64::from_polar((theta / 2.0).sin(), gamma);
                let state = RingState::new(lo, coeffs).unwrap();
                let psi_l = state
                    .amplitude(&p, (j - 1).rem_euclid(n_sites as i64), t)
                    .unwrap();
                let psi_r = state.amplitude(&p, j, t).unwrap();
                let reference = site_flux(psi_l, psi_r, &p);

                assert!(
                    (direct - reference).abs() <= 1e-12,
                    "N={n_sites} eps={eps} m1={m1} m2={m2} direct={direct} ref={reference}"
                );
            }
        }
    }

    #[test]
    fn two_state_min_known_value() {
        // N=4, eps=0, modes 0,1: a=1/2, b=-1/2, c=sqrt(2)/2.
        let p = ChainParams::ring(4, 0.0).unwrap();
        let res = two_state_min(&p, 0, 1).unwrap();
        let expect = 0.5 * (0.5 - 0.75f64.sqrt());
        assert!((res.j_min - expect).abs() < 1e-15);
        assert!((res.j_min + 0.18301).abs() < 1e-5);
        assert!(res.j_min < 0.0);
        // theta* satisfies tan(theta) = -c/b.
        let (b, c) = (-0.5, 0.5f64 * std::f64::consts::SQRT_2);
        assert!((res.theta_star.tan() - (-c / b)).abs() < 1e-10);
    }

    #[test]
    fn two_state_min_matches_brute_force() {
        let p = ChainParams::ring(5, 0.5).unwrap();
        let (m1, m2) = (0, 2);
        let res = two_state_min(&p, m1, m2).unwrap();

        let e1 = dispersion(&p, p.ring_k(m1).unwrap());
        let e2 = dispersion(&p, p.ring_k(m2).unwrap());
        let beat_period = 2.0 * PI * p.hbar() / (e1 - e2).abs();
        let mut best = f64::INFINITY;
        for ti in 0..1000 {
            let t = beat_period * ti as f64 / 999.0;
            for j in 0..5 {
                for si in 0..3601 {
                    let theta = PI * si as f64 / 3600.0;
                    let f = two_state_flux(&p, m1, m2, theta, 0.0, j, t).unwrap();
                    best = best.min(f);
                }
            }
        }
        assert!(best >= res.j_min - 1e-6, "grid {best} below bound {}", res.j_min);
        assert!((best - res.j_min).abs() < 1e-4);
    }

    #[test]
    fn two_state_min_continuous_in_epsilon() {
        let p0 = ChainParams::ring(9, 0.0).unwrap();
        let p1 = ChainParams::ring(9, 1e-12).unwrap();
        let a = two_state_min(&p0, 1, 3).unwrap().j_min;
        let b = two_state_min(&p1, 1, 3).unwrap().j_min;
        assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn two_state_rejects_same_mode() {
        let p = ChainParams::ring(9, 0.0).unwrap();
        assert!(matches!(
            two_state_min(&p, 2, 2),
            Err(BackflowError::SameMode(2))
        ));
        assert!(matches!(
            two_state_flux(&p, 1, 1, 0.3, 0.0, 0, 0.0),
            Err(BackflowError::SameMode(1))
        ));
    }

    #[test]
    fn general_flux_ring_single_mode_is_plane_wave() {
        let p = ChainParams::ring(9, 1.0).unwrap();
        let state = plane_wave(2);
        let k = p.ring_k(2).unwrap();
        let expect = 2.0 * p.bias_factor() / 9.0 * (k + p.xi()).sin();
        for (j, t) in [(0i64, 0.0), (3, 1.5), (8, 7.0)] {
            let f = general_flux_ring(&state, &p, j, t).unwrap();
            assert!((f - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn general_flux_ring_matches_two_state() {
        let p = ChainParams::ring(9, 0.6).unwrap();
        let (m1, m2) = (0i64, 3i64);
        let (theta, gamma) = (1.1, 2.3);
        let mut coeffs = vec![Complex64::ZERO; 4];
        coeffs[0] = Complex64::from((theta / 2.0).cos());
        coeffs[3] = Complex64::from_polar((theta / 2.0).sin(), gamma);
        let state = RingState::new(0, coeffs).unwrap();
        for (j, t) in [(0i64, 0.0), (2, 0.4), (5, 3.3), (7, 11.0)] {
            let a = general_flux_ring(&state, &p, j, t).unwrap();
            let b = two_state_flux(&p, m1, m2, theta, gamma, j, t).unwrap();
            assert!((a - b).abs() < 1e-13, "j={j} t={t} a={a} b={b}");
        }
    }

    #[test]
    fn general_flux_ring_matches_site_flux_for_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xB0F107);
        for &(n_sites, eps) in &[(9usize, 1.0), (8, 0.0), (12, 0.4)] {
            let p = ChainParams::ring(n_sites, eps).unwrap();
            for _ in 0..10 {
                let state = random_ring_state(&p, &mut rng).unwrap();
                for (j, t) in [(0i64, 0.2), (3, 4.4)] {
                    let a = general_flux_ring(&state, &p, j, t).unwrap();
                    let psi_l = state
                        .amplitude(&p, (j - 1).rem_euclid(n_sites as i64), t)
                        .unwrap();
                    let psi_r = state.amplitude(&p, j.rem_euclid(n_sites as i64), t).unwrap();
                    let b = site_flux(psi_l, psi_r, &p);
                    assert!((a - b).abs() < 1e-12, "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn general_flux_ring_rejects_bad_norm() {
        let p = ChainParams::ring(9, 0.0).unwrap();
        let state = RingState {
            eta1: 0,
            coeffs: vec![Complex64::new(0.9, 0.0), Complex64::new(0.1, 0.0)],
        };
        assert!(matches!(
            general_flux_ring(&state, &p, 0, 0.0),
            Err(BackflowError::NormViolation(_))
        ));
    }

    #[test]
    fn general_flux_infinite_narrow_packet_nonnegative() {
        // A weight concentrated at an interior k0 approximates a single
        // momentum, whose flux is nonnegative.
        let p = ChainParams::infinite(0.5);
        let rule = crate::numerics::gauss_legendre(300, -p.xi(), PI - p.xi()).unwrap();
        let k0 = 1.1;
        let phi: Vec<Complex64> = rule
            .nodes
            .iter()
            .map(|&k| Complex64::from((-((k - k0) / 0.05).powi(2)).exp()))
            .collect();
        let state = WeightState::normalized(rule.nodes, rule.weights, phi).unwrap();
        for (j, t) in [(0i64, 0.0), (5, 2.0)] {
            let f = general_flux_infinite(&state, &p, j, t).unwrap();
            assert!(f > 0.0, "narrow packet flux should be positive, got {f}");
        }
    }
}
