//! One-axis twisting `exp(-i τ Jz²)` and its closed-form curves.
//!
//! The twisting phase `τ` is a pure number here. Every closed form below has
//! a direct state-vector counterpart (`*_direct`) computed from the evolved
//! amplitudes; the pairs act as mutual oracles and are held to `1e-8`
//! agreement or better in tests.
//!
//! Large-`N` evaluation: powers like `(cos 2τ)^(N-2)` are evaluated
//! sign-aware in log space (`N = 10⁴` underflows naive powers), and the
//! difference `A - √(A²+B²)` in the rotated-squeezing curve is rationalized
//! to `-B²/(A + √(A²+B²))`, which would otherwise lose all significant
//! digits near the squeezing optimum.

use std::f64::consts::FRAC_PI_2;

use crate::linalg::C64;
use crate::numeric::signed_powi;
use crate::rotation::rotate;
use crate::spinspace::{angular_momentum, coherent_spin_state, DickeState, Direction, Spin};
use crate::{Error, Result};

/// Twisting strength and particle count for the closed-form curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistingParams {
    pub tau: f64,
    pub particles: u32,
}

impl TwistingParams {
    pub fn new(particles: u32, tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::InvalidParameter("tau must be finite".into()));
        }
        if particles < 2 {
            return Err(Error::InvalidParticleCount {
                n: particles,
                min: 2,
            });
        }
        Ok(Self { tau, particles })
    }
}

/// `exp(-i τ Jz²) |ψ⟩`: multiplies each amplitude by `exp(-i τ μ²)`.
pub fn evolve_oat(state: &DickeState, tau: f64) -> DickeState {
    let spin = state.spin();
    let mut amplitudes = state.amplitudes().clone();
    for (i, mu) in spin.projections().enumerate() {
        amplitudes[i] *= C64::from_polar(1.0, -tau * mu * mu);
    }
    DickeState::from_vector_unchecked(spin, amplitudes)
}

/// The twisted coherent state `exp(-i τ Jz²) |j,j⟩_x` for `N` qubits.
pub fn twisted_coherent_state(particles: u32, tau: f64) -> Result<DickeState> {
    let spin = Spin::from_particles(particles)?;
    Ok(evolve_oat(&coherent_spin_state(spin, Direction::X), tau))
}

/// Closed-form `χ² = 2 / [(N+1) - (N-1)(cos 2τ)^(N-2)]` of the twisted
/// coherent state, with the rotation axis along `y`.
///
/// The denominator stays in `[2, 2N]`, so the value is always in `[1/N, 1]`.
pub fn chi2_oat_analytic(particles: u32, tau: f64) -> Result<f64> {
    let p = TwistingParams::new(particles, tau)?;
    let n = f64::from(p.particles);
    let pw = signed_powi((2.0 * tau).cos(), u64::from(p.particles - 2));
    Ok(2.0 / ((n + 1.0) - (n - 1.0) * pw))
}

/// Closed-form `ξ² = (cos τ)^(-2(N-1))` of the twisted coherent state in the
/// fixed `(x, y, z)` frame. Divergence at `cos τ = 0` is reported as `+∞`.
pub fn xi2_oat_analytic(particles: u32, tau: f64) -> Result<f64> {
    let p = TwistingParams::new(particles, tau)?;
    let c = p.tau.cos().abs();
    if c == 0.0 {
        return Ok(f64::INFINITY);
    }
    // Even total exponent: sign-free, log-space.
    let ln = -2.0 * f64::from(p.particles - 1) * c.ln();
    Ok(ln.exp())
}

/// `A = 1 - (cos 2τ)^(N-2)` and `B = 4 sin τ (cos τ)^(N-2)`, the two
/// parameters of the twisted state's transverse covariance ellipse.
fn twisting_ellipse(particles: u32, tau: f64) -> (f64, f64) {
    let e = u64::from(particles - 2);
    let a = 1.0 - signed_powi((2.0 * tau).cos(), e);
    let b = 4.0 * tau.sin() * signed_powi(tau.cos(), e);
    (a, b)
}

fn check_rotated_domain(particles: u32, tau: f64) -> Result<()> {
    if particles < 3 {
        return Err(Error::InvalidParticleCount {
            n: particles,
            min: 3,
        });
    }
    if !(0.0..FRAC_PI_2).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "tau must lie in [0, π/2) for the rotated squeezing curve (got {tau})"
        )));
    }
    Ok(())
}

/// Optimal rotation angle `δ(N, τ) = ½ arctan(B/A)` about the mean-spin
/// axis; `δ = 0` at `τ = 0` by continuity (the ellipse is degenerate there).
pub fn delta_opt(particles: u32, tau: f64) -> Result<f64> {
    check_rotated_domain(particles, tau)?;
    let (a, b) = twisting_ellipse(particles, tau);
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * b.atan2(a))
}

/// Closed-form squeezing `ξ² = [4 + (N-1)(A - √(A²+B²))] / [4 (cos τ)^(2N-2)]`
/// of the optimally rotated twisted state `exp(+iδ Jx)|ψ(τ)⟩`.
pub fn xi2_rotated_analytic(particles: u32, tau: f64) -> Result<f64> {
    check_rotated_domain(particles, tau)?;
    let (a, b) = twisting_ellipse(particles, tau);
    let hyp = a.hypot(b);
    let diff = if hyp == 0.0 { 0.0 } else { -b * b / (a + hyp) };
    let numerator = 4.0 + f64::from(particles - 1) * diff;
    let ln_denom = 2.0 * f64::from(particles - 1) * tau.cos().ln();
    Ok(numerator / (4.0 * ln_denom.exp()))
}

/// `χ² = N / (4 Var Jy)` computed on the explicitly evolved state; the
/// state-vector route the closed form is checked against.
pub fn chi2_oat_direct(particles: u32, tau: f64) -> Result<f64> {
    let p = TwistingParams::new(particles, tau)?;
    let state = twisted_coherent_state(p.particles, p.tau)?;
    let jy = angular_momentum(state.spin(), Direction::Y);
    Ok(f64::from(p.particles) / (4.0 * state.variance(&jy)))
}

/// `ξ² = N Var(Jz) / (⟨Jx⟩² + ⟨Jy⟩²)` computed on the explicitly evolved
/// state in the fixed `(x, y, z)` frame.
pub fn xi2_oat_direct(particles: u32, tau: f64) -> Result<f64> {
    let p = TwistingParams::new(particles, tau)?;
    let state = twisted_coherent_state(p.particles, p.tau)?;
    let spin = state.spin();
    let var_z = state.variance(&angular_momentum(spin, Direction::Z));
    let jx = state.expect(&angular_momentum(spin, Direction::X));
    let jy = state.expect(&angular_momentum(spin, Direction::Y));
    let denom = jx * jx + jy * jy;
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(f64::from(p.particles) * var_z / denom)
}

/// Squeezing of the rotated state by explicit construction: evolve, rotate
/// by `δ(N,τ)` about `x`, then search the minimal-variance direction in the
/// plane orthogonal to the mean spin instead of trusting the closed form.
///
/// Full-matrix path, kept to `N ≤ 200`.
pub fn xi2_rotated_direct(particles: u32, tau: f64) -> Result<f64> {
    check_rotated_domain(particles, tau)?;
    if particles > 200 {
        return Err(Error::InvalidParameter(format!(
            "direct squeezing evaluation is limited to N <= 200 (got {particles})"
        )));
    }
    let delta = delta_opt(particles, tau)?;
    let state = twisted_coherent_state(particles, tau)?;
    // |ψ̃⟩ = e^{+iδ Jx} |ψ(τ)⟩
    let rotated = rotate(&state, Direction::X, -delta);
    min_transverse_xi2(&rotated)
}

/// `ξ²` of a state with the squeezing direction minimized over the plane
/// orthogonal to its mean spin (golden-section after a coarse scan).
///
/// Returns `+∞` for states with vanishing mean spin.
pub fn min_transverse_xi2(state: &DickeState) -> Result<f64> {
    let spin = state.spin();
    let m = state.mean_spin();
    let m_norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    if m_norm < 1e-12 {
        return Ok(f64::INFINITY);
    }
    let n1 = Direction::new(m[0], m[1], m[2])?;
    let e1 = n1.any_orthogonal();
    let e2 = n1.cross(e1)?;
    let var_at = |phi: f64| {
        let u = direction_in_plane(e1, e2, phi);
        state.variance(&angular_momentum(spin, u))
    };
    // Var(J_u(φ)) is a sinusoid of period π: coarse scan, then refine.
    let coarse = 64;
    let mut best_phi = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..coarse {
        let phi = std::f64::consts::PI * k as f64 / coarse as f64;
        let v = var_at(phi);
        if v < best {
            best = v;
            best_phi = phi;
        }
    }
    let half_step = std::f64::consts::PI / coarse as f64;
    let min_var = golden_section_min(&var_at, best_phi - half_step, best_phi + half_step, 1e-12);
    Ok(f64::from(spin.particles()) * min_var / (m_norm * m_norm))
}

/// Unit vector `cos φ · e1 + sin φ · e2`.
pub(crate) fn direction_in_plane(e1: Direction, e2: Direction, phi: f64) -> Direction {
    let [x1, y1, z1] = e1.components();
    let [x2, y2, z2] = e2.components();
    let (c, s) = (phi.cos(), phi.sin());
    Direction::new(c * x1 + s * x2, c * y1 + s * y2, c * z1 + s * z2).expect("unit")
}

pub(crate) fn golden_section_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Argmin refinement companion to [`golden_section_min`].
pub(crate) fn golden_section_argmin(
    f: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}
