//! Entanglement-usefulness witnesses built on the quantum Fisher
//! information.
//!
//! For a pure state `F_Q = 4 (ΔJ·n)²`; for a mixed state `F_Q = 4 (ΔR)²`
//! where the Hermitian `R` solves `{R, ρ} = i [J·n, ρ]` (solved in the
//! eigenbasis of `ρ` with null-space pairs zeroed). Two independent mixed
//! forms — the `R`-operator variance and the eigenpair sum — are both
//! computed and must agree.
//!
//! The derived quantities follow from `F_Q` alone: `χ² = N/F_Q` (values
//! below 1 certify entanglement useful for sub-shot-noise interferometry),
//! the Cramér-Rao phase bound `Δθ_QCR = 1/√F_Q = χ/√N`, and the statistical
//! speed `√F_Q` against its separable ceiling `√N` and absolute ceiling `N`.
//! `ξ²` is the spin-squeezing parameter in an explicit orthogonal frame; it
//! certifies a strictly smaller class of states (`χ ≤ ξ`).

use serde::{Deserialize, Serialize};

use crate::dynamics::{direction_in_plane, golden_section_argmin};
use crate::linalg::{self, CMatrix, C64};
use crate::rotation::RotationGenerator;
use crate::spinspace::{
    angular_momentum, CollectiveOperator, DensityOperator, DickeState, Direction, Spin,
};
use crate::{tol, Error, Result};

// ---------------------------------------------------------------------------
// Inputs and frames
// ---------------------------------------------------------------------------

/// Either a pure Dicke state or a density operator.
#[derive(Clone, Copy, Debug)]
pub enum WitnessInput<'a> {
    Pure(&'a DickeState),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a DickeState> for WitnessInput<'a> {
    fn from(s: &'a DickeState) -> Self {
        WitnessInput::Pure(s)
    }
}

impl<'a> From<&'a DensityOperator> for WitnessInput<'a> {
    fn from(r: &'a DensityOperator) -> Self {
        WitnessInput::Mixed(r)
    }
}

impl WitnessInput<'_> {
    pub fn spin(&self) -> Spin {
        match self {
            WitnessInput::Pure(s) => s.spin(),
            WitnessInput::Mixed(r) => r.spin(),
        }
    }

    pub fn expect(&self, op: &CollectiveOperator) -> f64 {
        match self {
            WitnessInput::Pure(s) => s.expect(op),
            WitnessInput::Mixed(r) => r.expect(op),
        }
    }

    pub fn variance(&self, op: &CollectiveOperator) -> f64 {
        match self {
            WitnessInput::Pure(s) => s.variance(op),
            WitnessInput::Mixed(r) => r.variance(op),
        }
    }

    pub fn mean_spin(&self) -> [f64; 3] {
        match self {
            WitnessInput::Pure(s) => s.mean_spin(),
            WitnessInput::Mixed(r) => r.mean_spin(),
        }
    }
}

/// Three mutually orthogonal measurement directions.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    n1: Direction,
    n2: Direction,
    n3: Direction,
}

impl Frame {
    pub fn new(n1: Direction, n2: Direction, n3: Direction) -> Result<Self> {
        let max_dot = n1
            .dot(n2)
            .abs()
            .max(n1.dot(n3).abs())
            .max(n2.dot(n3).abs());
        if max_dot > tol::FRAME_ORTHOGONALITY {
            return Err(Error::NonOrthogonalFrame { max_dot });
        }
        Ok(Self { n1, n2, n3 })
    }

    pub fn xyz() -> Self {
        Self {
            n1: Direction::X,
            n2: Direction::Y,
            n3: Direction::Z,
        }
    }

    pub fn n1(&self) -> Direction {
        self.n1
    }

    pub fn n2(&self) -> Direction {
        self.n2
    }

    pub fn n3(&self) -> Direction {
        self.n3
    }

    /// `n1 × n2 · n3 > 0`.
    pub fn is_right_handed(&self) -> bool {
        match self.n1.cross(self.n2) {
            Ok(c) => c.dot(self.n3) > 0.0,
            Err(_) => false,
        }
    }
}

/// Right-handed frame adapted to a state: `n1` along the mean spin (so
/// `⟨J_n2⟩ = ⟨J_n3⟩ = 0`), `n3` the minimal-variance direction in the
/// transverse plane, `n2 = n3 × n1`.
///
/// Fails with [`Error::ZeroDirection`] when the mean spin vanishes (any
/// transverse frame is then as good as any other and `ξ²` diverges).
pub fn squeezing_frame<'a>(input: impl Into<WitnessInput<'a>>) -> Result<Frame> {
    let input = input.into();
    let spin = input.spin();
    let m = input.mean_spin();
    let n1 = Direction::new(m[0], m[1], m[2])?;
    let e1 = n1.any_orthogonal();
    let e2 = n1.cross(e1)?;
    let var_at = |phi: f64| {
        let u = direction_in_plane(e1, e2, phi);
        input.variance(&angular_momentum(spin, u))
    };
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
    let half = std::f64::consts::PI / coarse as f64;
    let phi = golden_section_argmin(&var_at, best_phi - half, best_phi + half, 1e-12);
    let n3 = direction_in_plane(e1, e2, phi);
    let n2 = n3.cross(n1)?;
    Frame::new(n1, n2, n3)
}

// ---------------------------------------------------------------------------
// Quantum Fisher information
// ---------------------------------------------------------------------------

/// `F_Q = 4 (ΔJ·n)²` for a pure state.
pub fn qfi_pure(state: &DickeState, axis: Direction) -> f64 {
    let op = angular_momentum(state.spin(), axis);
    4.0 * state.variance(&op)
}

fn sld_cutoff(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    tol::SLD_CUTOFF_REL * max.max(f64::MIN_POSITIVE)
}

/// Hermitian solution `R` of `{R, ρ} = i [J·n, ρ]`.
///
/// In the eigenbasis `{λ_i, |i⟩}` of `ρ`:
/// `R_ik = i (λ_k - λ_i)/(λ_i + λ_k) ⟨i|J|k⟩` for `λ_i + λ_k` above the
/// cutoff, zero otherwise (null-space pairs carry no Fisher information).
pub fn sld_operator(rho: &DensityOperator, j_op: &CollectiveOperator) -> CMatrix {
    let eig = linalg::eigh(rho.matrix());
    let cutoff = sld_cutoff(&eig.values);
    let jt = eig.vectors.adjoint() * j_op.matrix() * &eig.vectors;
    let dim = eig.values.len();
    let mut r = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for k in 0..dim {
            let sum = eig.values[i] + eig.values[k];
            if sum > cutoff {
                let factor = (eig.values[k] - eig.values[i]) / sum;
                r[(i, k)] = C64::new(0.0, factor) * jt[(i, k)];
            }
        }
    }
    &eig.vectors * r * eig.vectors.adjoint()
}

/// Both mixed-state forms of `F_Q[ρ, J·n]`:
/// the eigenpair sum `2 Σ (λ_i-λ_k)²/(λ_i+λ_k) |⟨i|J|k⟩|²` and the
/// `R`-operator variance `4 (Tr[ρR²] - Tr[ρR]²)`.
pub fn qfi_mixed_both(rho: &DensityOperator, axis: Direction) -> (f64, f64) {
    let j_op = angular_momentum(rho.spin(), axis);
    let eig = linalg::eigh(rho.matrix());
    let cutoff = sld_cutoff(&eig.values);
    let jt = eig.vectors.adjoint() * j_op.matrix() * &eig.vectors;
    let dim = eig.values.len();

    let mut sum_form = 0.0;
    let mut r = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for k in 0..dim {
            let s = eig.values[i] + eig.values[k];
            if s > cutoff {
                let d = eig.values[i] - eig.values[k];
                sum_form += 2.0 * d * d / s * jt[(i, k)].norm_sqr();
                r[(i, k)] = C64::new(0.0, -d / s) * jt[(i, k)];
            }
        }
    }

    // Variance of R over ρ, evaluated in the same eigenbasis.
    let mut tr_rho_r2 = 0.0;
    let mut tr_rho_r = 0.0;
    for i in 0..dim {
        let mut row = 0.0;
        for k in 0..dim {
            row += r[(i, k)].norm_sqr();
        }
        tr_rho_r2 += eig.values[i].max(0.0) * row;
        tr_rho_r += eig.values[i].max(0.0) * r[(i, i)].re;
    }
    let variance_form = 4.0 * (tr_rho_r2 - tr_rho_r * tr_rho_r);
    (sum_form, variance_form)
}

/// `F_Q[ρ, J·n]` for a mixed state (eigenpair-sum form).
pub fn qfi_mixed(rho: &DensityOperator, axis: Direction) -> f64 {
    qfi_mixed_both(rho, axis).0
}

/// `F_Q` for either input kind. Densities that are pure to within
/// `Tr[ρ²] > 1 - 1e-10` are routed through the pure-state formula.
pub fn qfi<'a>(input: impl Into<WitnessInput<'a>>, axis: Direction) -> f64 {
    match input.into() {
        WitnessInput::Pure(state) => qfi_pure(state, axis),
        WitnessInput::Mixed(rho) => {
            if rho.purity() > tol::PURITY_PURE {
                let op = angular_momentum(rho.spin(), axis);
                4.0 * rho.variance(&op)
            } else {
                qfi_mixed(rho, axis)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The χ² and ξ² criteria
// ---------------------------------------------------------------------------

/// `χ² = N / F_Q[ρ, J·n]`; `+∞` when `F_Q` vanishes.
pub fn chi2<'a>(input: impl Into<WitnessInput<'a>>, axis: Direction) -> f64 {
    let input = input.into();
    let f_q = qfi(input, axis).max(0.0);
    if f_q == 0.0 {
        return f64::INFINITY;
    }
    f64::from(input.spin().particles()) / f_q
}

/// `ξ² = N Var(J_n3) / (⟨J_n1⟩² + ⟨J_n2⟩²)`; `+∞` when the mean spin has no
/// component in the `n1`-`n2` plane.
pub fn xi2<'a>(input: impl Into<WitnessInput<'a>>, frame: &Frame) -> f64 {
    let input = input.into();
    let spin = input.spin();
    let var3 = input.variance(&angular_momentum(spin, frame.n3()));
    let m1 = input.expect(&angular_momentum(spin, frame.n1()));
    let m2 = input.expect(&angular_momentum(spin, frame.n2()));
    let denom = m1 * m1 + m2 * m2;
    if denom == 0.0 {
        return f64::INFINITY;
    }
    f64::from(spin.particles()) * var3 / denom
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

/// Witness evaluation summary for one input state, axis, and frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    #[serde(rename = "N")]
    pub particles: u32,
    pub direction: [f64; 3],
    #[serde(rename = "F_Q")]
    pub f_q: f64,
    #[serde(with = "extended_real")]
    pub chi2: f64,
    #[serde(with = "extended_real")]
    pub xi2: f64,
    /// `Δθ_QCR = 1/√F_Q = χ/√N`, radians per shot.
    #[serde(with = "extended_real")]
    pub qcr_bound: f64,
    /// `υ_F = √F_Q`.
    pub statistical_speed: f64,
    /// `υ_cr = √N`, the separable ceiling.
    pub critical_speed: f64,
    /// `υ_max = N`.
    pub max_speed: f64,
    pub entangled_useful: bool,
    pub spin_squeezed: bool,
    /// "boundary" when χ² is within 1e-12 of 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Evaluates `F_Q` along `axis`, `ξ²` in `frame`, and every derived figure.
pub fn witness_report<'a>(
    input: impl Into<WitnessInput<'a>>,
    axis: Direction,
    frame: &Frame,
) -> WitnessReport {
    let input = input.into();
    let n = input.spin().particles();
    let n_f = f64::from(n);
    let f_q = qfi(input, axis).max(0.0);
    let chi2 = if f_q == 0.0 { f64::INFINITY } else { n_f / f_q };
    let xi2 = xi2(input, frame);
    let qcr_bound = if f_q == 0.0 {
        f64::INFINITY
    } else {
        1.0 / f_q.sqrt()
    };
    let boundary = (chi2 - 1.0).abs() <= tol::CHI2_BOUNDARY;
    WitnessReport {
        particles: n,
        direction: axis.components(),
        f_q,
        chi2,
        xi2,
        qcr_bound,
        statistical_speed: f_q.sqrt(),
        critical_speed: n_f.sqrt(),
        max_speed: n_f,
        entangled_useful: chi2 < 1.0 && !boundary,
        spin_squeezed: xi2 < 1.0,
        note: boundary.then(|| "boundary".to_string()),
    }
}

// ---------------------------------------------------------------------------
// Moment bounds on F_Q
// ---------------------------------------------------------------------------

/// Two-sided bound on `F_Q` from the moments of an arbitrary observable:
/// `(dM_k/dθ)² / M_2k ≤ F_Q ≤ 4 (ΔJ·n)²`, with `M_k(θ) = Tr[M^k ρ_out(θ)]`
/// and the derivative taken at `θ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct MomentBound {
    pub lower: f64,
    pub upper: f64,
    /// `dM_k/dθ` at `θ = 0` (5-point central difference, Richardson step).
    pub derivative: f64,
    /// Spread between the `h` and `h/2` derivative estimates.
    pub fd_spread: f64,
}

/// Evaluates the moment bound for observable `m` and moment order `k`,
/// differentiating at `θ = 0` with a 5-point stencil of step `dtheta`
/// (checked against the half-step estimate).
pub fn moment_bound(
    rho: &DensityOperator,
    axis: Direction,
    m: &CMatrix,
    k: u32,
    dtheta: f64,
) -> Result<MomentBound> {
    let dim = rho.spin().dim();
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::BadDimension {
            expected: dim,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let herm = linalg::hermitian_deviation(m);
    if herm > tol::STRUCTURAL {
        return Err(Error::NotHermitian { deviation: herm });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("moment order k must be >= 1".into()));
    }
    if !(dtheta > 0.0) || !dtheta.is_finite() {
        return Err(Error::InvalidParameter("dtheta must be positive".into()));
    }

    let gen = RotationGenerator::new(rho.spin(), axis);
    let m_k = linalg::matrix_power(m, k);
    let m_2k = linalg::matrix_power(m, 2 * k);
    // ρ_out(θ) = e^{+iθJ·n} ρ e^{-iθJ·n}
    let moment_at = |theta: f64| gen.apply_density(rho, -theta).expect_matrix(&m_k);
    let five_point = |h: f64| {
        (-moment_at(2.0 * h) + 8.0 * moment_at(h) - 8.0 * moment_at(-h) + moment_at(-2.0 * h))
            / (12.0 * h)
    };
    let d_full = five_point(dtheta);
    let d_half = five_point(dtheta / 2.0);
    let derivative = d_half;
    let fd_spread = (d_full - d_half).abs();

    let m_2k_0 = rho.expect_matrix(&m_2k);
    let lower = if m_2k_0 <= 0.0 {
        0.0
    } else {
        derivative * derivative / m_2k_0
    };
    let j_op = angular_momentum(rho.spin(), axis);
    let upper = 4.0 * rho.variance(&j_op);
    Ok(MomentBound {
        lower,
        upper,
        derivative,
        fd_spread,
    })
}

// ---------------------------------------------------------------------------
// Serde helper: finite numbers stay numbers, infinities become "inf".
// ---------------------------------------------------------------------------

pub(crate) mod extended_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{chi2_oat_analytic, twisted_coherent_state, xi2_oat_analytic};
    use crate::rng;
    use crate::spinspace::{
        coherent_spin_state, random_density, random_direction, random_separable_density,
    };
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn coherent_state_is_exactly_critical() {
        // CSS along x probed along z carries F_Q = N: χ² = 1, the
        // separable boundary.
        let spin = Spin::from_particles(8).unwrap();
        let css = coherent_spin_state(spin, Direction::X);
        let f = qfi_pure(&css, Direction::Z);
        assert_abs_diff_eq!(f, 8.0, epsilon = 1e-10);
        let report = witness_report(&css, Direction::Z, &Frame::xyz());
        assert!(!report.entangled_useful);
        assert_eq!(report.note.as_deref(), Some("boundary"));
    }

    #[test]
    fn cat_state_saturates_the_heisenberg_ceiling() {
        for n in [2u32, 5, 10] {
            let spin = Spin::from_particles(n).unwrap();
            let mut v = vec![C64::new(0.0, 0.0); spin.dim()];
            v[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            v[spin.dim() - 1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let cat = DickeState::new(spin, v).unwrap();
            // Var(Jz) on the cat is j², so F_Q = 4j² = N².
            let f = qfi_pure(&cat, Direction::Z);
            assert_relative_eq!(f, f64::from(n * n), max_relative = 1e-12);
            assert_relative_eq!(
                chi2(&cat, Direction::Z),
                1.0 / f64::from(n),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn eigenstate_has_zero_information() {
        let spin = Spin::from_particles(6).unwrap();
        let top = DickeState::basis_state(spin, 3.0).unwrap();
        assert_abs_diff_eq!(qfi_pure(&top, Direction::Z), 0.0, epsilon = 1e-12);
        assert_eq!(chi2(&top, Direction::Z), f64::INFINITY);
        let report = witness_report(&top, Direction::Z, &Frame::xyz());
        assert!(!report.entangled_useful);
        assert_eq!(report.qcr_bound, f64::INFINITY);
    }

    #[test]
    fn sld_vanishes_on_maximally_mixed() {
        let spin = Spin::from_particles(5).unwrap();
        let rho = DensityOperator::maximally_mixed(spin);
        let j_op = angular_momentum(spin, Direction::X);
        let r = sld_operator(&rho, &j_op);
        assert!(r.norm() < 1e-12);
        assert_abs_diff_eq!(qfi_mixed(&rho, Direction::X), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sld_defining_equation_residual_is_tiny() {
        for trial in 0..20u64 {
            let n = 2 + (trial % 7) as u32 * 2;
            let rho = random_density(n, 1000 + trial).unwrap();
            let mut rng = rng::stream(55, trial);
            let axis = random_direction(&mut rng);
            let j_op = angular_momentum(rho.spin(), axis);
            let r = sld_operator(&rho, &j_op);
            assert!(linalg::hermitian_deviation(&r) < 1e-10);
            let lhs = &r * rho.matrix() + rho.matrix() * &r;
            let rhs = (j_op.matrix() * rho.matrix() - rho.matrix() * j_op.matrix())
                * C64::new(0.0, 1.0);
            assert!(
                (lhs - rhs).norm() < 1e-9,
                "residual too large at N = {n}, trial {trial}"
            );
        }
    }

    #[test]
    fn mixed_qfi_forms_agree_and_match_pure_limit() {
        let mut rng = rng::stream(7, 0);
        for n in [2u32, 6, 11] {
            let spin = Spin::from_particles(n).unwrap();
            let axis = random_direction(&mut rng);
            // Pure density must reproduce the pure formula.
            let css = coherent_spin_state(spin, random_direction(&mut rng));
            let rho_pure = css.to_density();
            assert_relative_eq!(
                qfi_mixed(&rho_pure, axis),
                qfi_pure(&css, axis),
                epsilon = 1e-9,
                max_relative = 1e-9
            );
            // Mixed: the two forms agree.
            let rho = random_density(n, 31 + u64::from(n)).unwrap();
            let (sum_form, var_form) = qfi_mixed_both(&rho, axis);
            assert_relative_eq!(sum_form, var_form, epsilon = 1e-8, max_relative = 1e-8);
        }
    }

    #[test]
    fn qfi_is_convex_under_mixing() {
        let mut rng = rng::stream(13, 0);
        for trial in 0..12u64 {
            let n = 4u32;
            let spin = Spin::from_particles(n).unwrap();
            let axis = random_direction(&mut rng);
            let a = random_density(n, 100 + trial).unwrap();
            let b = random_separable_density(n, 3, 200 + trial).unwrap();
            let p = 0.3;
            let mix = DensityOperator::new(
                spin,
                a.matrix() * C64::new(p, 0.0) + b.matrix() * C64::new(1.0 - p, 0.0),
            )
            .unwrap();
            let lhs = qfi_mixed(&mix, axis);
            let rhs = p * qfi_mixed(&a, axis) + (1.0 - p) * qfi_mixed(&b, axis);
            assert!(lhs <= rhs + 1e-8, "convexity violated: {lhs} > {rhs}");
        }
    }

    #[test]
    fn separable_inputs_never_beat_the_critical_speed() {
        for (n, seed) in [(2u32, 1u64), (4, 2), (8, 3), (16, 4)] {
            for k in [1u32, 2, 5] {
                let rho = random_separable_density(n, k, seed * 10 + u64::from(k)).unwrap();
                let mut rng = rng::stream(seed, u64::from(k));
                let axis = random_direction(&mut rng);
                let f = qfi(&rho, axis);
                assert!(
                    f <= f64::from(n) + 1e-8,
                    "F_Q = {f} exceeds N = {n} on a separable input"
                );
                assert!(chi2(&rho, axis) >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn twisted_state_sits_on_the_plateau() {
        let n = 100u32;
        let tau = 0.5;
        let state = twisted_coherent_state(n, tau).unwrap();
        let c = chi2(&state, Direction::Y);
        assert_relative_eq!(c, chi2_oat_analytic(n, tau).unwrap(), max_relative = 1e-9);
        assert!((c - 0.02).abs() / 0.02 < 0.01);
        let report = witness_report(&state, Direction::Y, &Frame::xyz());
        assert!(report.entangled_useful);
        assert!(!report.spin_squeezed);
    }

    #[test]
    fn xi2_matches_closed_form_and_diverges_on_poles() {
        let spin = Spin::from_particles(10).unwrap();
        let css = coherent_spin_state(spin, Direction::X);
        assert_relative_eq!(xi2(&css, &Frame::xyz()), 1.0, max_relative = 1e-10);
        for (n, tau) in [(12u32, 0.2), (60, 0.07), (100, 0.31)] {
            let state = twisted_coherent_state(n, tau).unwrap();
            assert_relative_eq!(
                xi2(&state, &Frame::xyz()),
                xi2_oat_analytic(n, tau).unwrap(),
                max_relative = 1e-9
            );
        }
        let top = DickeState::basis_state(spin, 5.0).unwrap();
        assert_eq!(xi2(&top, &Frame::xyz()), f64::INFINITY);
    }

    #[test]
    fn chi_never_exceeds_xi() {
        // Random pure states in the squeezing-adapted frame (⟨J_n2⟩ = 0).
        let mut rng = rng::stream(99, 0);
        for n in [4u32, 8, 16] {
            let spin = Spin::from_particles(n).unwrap();
            for _ in 0..40 {
                let mut v: Vec<C64> = (0..spin.dim())
                    .map(|_| {
                        C64::new(
                            rand::Rng::gen_range(&mut rng, -1.0..1.0),
                            rand::Rng::gen_range(&mut rng, -1.0..1.0),
                        )
                    })
                    .collect();
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut v {
                    *z /= norm;
                }
                let state = DickeState::new(spin, v).unwrap();
                let Ok(frame) = squeezing_frame(&state) else {
                    continue; // vanishing mean spin: ξ² = ∞, trivially true
                };
                assert!(frame.is_right_handed());
                let c = chi2(&state, frame.n2());
                let x = xi2(&state, &frame);
                assert!(c <= x + 1e-9, "χ² = {c} > ξ² = {x} at N = {n}");
            }
        }
    }

    #[test]
    fn moment_bound_sandwiches_the_truth() {
        // Twisted pure state: M = J_z - ⟨J_z⟩, k = 1, rotation about y
        // (the ⟨J_n2⟩ = 0 frame) reproduces the N/ξ² lower bound, and the
        // upper bound is exactly F_Q.
        let n = 12u32;
        let tau = 0.18;
        let state = twisted_coherent_state(n, tau).unwrap();
        let rho = state.to_density();
        let spin = rho.spin();
        let jz = angular_momentum(spin, Direction::Z);
        let mean = rho.expect(&jz);
        let dim = spin.dim();
        let m = jz.matrix() - CMatrix::identity(dim, dim) * C64::new(mean, 0.0);
        let bound = moment_bound(&rho, Direction::Y, &m, 1, 1e-4).unwrap();
        let f_q = qfi(&state, Direction::Y);
        assert!(bound.lower <= f_q + 1e-6);
        assert!(f_q <= bound.upper + 1e-6);
        assert_relative_eq!(bound.upper, f_q, max_relative = 1e-10);
        let n_over_xi2 = f64::from(n) / xi2(&state, &Frame::xyz());
        assert_relative_eq!(bound.lower, n_over_xi2, max_relative = 1e-6);
        // Maximally mixed: no information, zero derivative.
        let mixed = DensityOperator::maximally_mixed(spin);
        let b = moment_bound(&mixed, Direction::Y, &m, 1, 1e-4).unwrap();
        assert_abs_diff_eq!(b.lower, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(qfi(&mixed, Direction::Y), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn report_identities_and_serialization() {
        let n = 20u32;
        let state = twisted_coherent_state(n, 0.3).unwrap();
        let report = witness_report(&state, Direction::Y, &Frame::xyz());
        // Eq.-(5) consistency: Δθ_QCR √N = χ.
        assert_relative_eq!(
            report.qcr_bound * f64::from(n).sqrt(),
            report.chi2.sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            report.statistical_speed.powi(2),
            report.f_q,
            max_relative = 1e-12
        );
        assert_eq!(
            report.entangled_useful,
            report.statistical_speed > report.critical_speed
        );
        assert!(report.f_q <= report.max_speed.powi(2) + 1e-6);

        // Infinite ξ² serializes as the literal "inf" and round-trips.
        let top = DickeState::basis_state(Spin::from_particles(4).unwrap(), 2.0).unwrap();
        let r2 = witness_report(&top, Direction::Z, &Frame::xyz());
        let json = serde_json::to_string(&r2).unwrap();
        assert!(json.contains("\"chi2\":\"inf\""));
        assert!(json.contains("\"xi2\":\"inf\""));
        let back: WitnessReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.chi2, f64::INFINITY);
        assert_eq!(back.xi2, f64::INFINITY);
    }

    #[test]
    fn frames_reject_non_orthogonal_axes() {
        let skew = Direction::new(1.0, 0.2, 0.0).unwrap();
        assert!(matches!(
            Frame::new(skew, Direction::Y, Direction::Z),
            Err(Error::NonOrthogonalFrame { .. })
        ));
    }
}
