//! Exact linear algebra on the symmetric (Dicke) subspace of `N` qubits.
//!
//! The subspace carries a single collective spin `j = N/2`; states are
//! `(2j+1)`-component complex vectors over the `|j, μ⟩` basis with `μ`
//! running from `+j` *down* to `-j`, so `Jz` is diagonal descending and the
//! ladder convention `J±|j,μ⟩ = √(j(j+1) - μ(μ±1)) |j,μ±1⟩` applies
//! unchanged. Spin-1/2 units throughout: `J = Σ_l σ^(l)/2`.

use rand::Rng;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::numeric::LogFactorials;
use crate::rng;
use crate::{tol, Error, Result};

// ---------------------------------------------------------------------------
// Spin
// ---------------------------------------------------------------------------

/// A half-integer spin quantum number, stored as `2j`.
///
/// For `N` spin-1/2 particles in the symmetric sector, `j = N/2`, so `2j`
/// doubles as the particle count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Spin of the symmetric sector of `n ≥ 1` qubits.
    pub fn from_particles(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParticleCount { n, min: 1 });
        }
        Ok(Self { two_j: n })
    }

    /// Validates that `2j` is a non-negative integer (within 1e-9).
    pub fn from_j(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !two_j.is_finite() || two_j < 0.0 || (two_j - two_j.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin { j });
        }
        Ok(Self {
            two_j: two_j.round() as u32,
        })
    }

    #[inline]
    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    #[inline]
    pub fn two_j(self) -> u32 {
        self.two_j
    }

    /// Hilbert-space dimension `2j + 1`.
    #[inline]
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Particle count `N = 2j`.
    #[inline]
    pub fn particles(self) -> u32 {
        self.two_j
    }

    /// `μ` value at amplitude index `i` (descending: `μ = j - i`).
    #[inline]
    pub fn projection(self, index: usize) -> f64 {
        self.j() - index as f64
    }

    /// All `μ` values, `+j` down to `-j`.
    pub fn projections(self) -> impl Iterator<Item = f64> {
        let j = self.j();
        (0..self.dim()).map(move |i| j - i as f64)
    }

    /// Amplitude index of a given `μ`, validating it sits on the lattice.
    pub fn index_of(self, mu: f64) -> Result<usize> {
        let idx = self.j() - mu;
        if !idx.is_finite() || (idx - idx.round()).abs() > 1e-9 {
            return Err(Error::MuOutOfRange { mu, j: self.j() });
        }
        let idx = idx.round();
        if idx < 0.0 || idx >= self.dim() as f64 {
            return Err(Error::MuOutOfRange { mu, j: self.j() });
        }
        Ok(idx as usize)
    }
}

// ---------------------------------------------------------------------------
// Direction
// ---------------------------------------------------------------------------

/// A unit 3-vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    pub const X: Direction = Direction { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Direction = Direction { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Direction = Direction { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes the given vector; rejects near-zero input.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::ZeroDirection { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Unit vector from polar angle (from +z) and azimuth (from +x).
    pub fn from_polar(polar: f64, azimuth: f64) -> Self {
        Self {
            x: polar.sin() * azimuth.cos(),
            y: polar.sin() * azimuth.sin(),
            z: polar.cos(),
        }
    }

    #[inline]
    pub fn components(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, other: Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Direction) -> Result<Direction> {
        Direction::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn negated(self) -> Direction {
        Direction { x: -self.x, y: -self.y, z: -self.z }
    }

    /// Some unit vector orthogonal to `self`.
    pub fn any_orthogonal(self) -> Direction {
        if self.z.abs() < 0.9 {
            self.cross(Direction::Z).expect("non-parallel")
        } else {
            self.cross(Direction::X).expect("non-parallel")
        }
    }
}

// ---------------------------------------------------------------------------
// Collective operator J·n
// ---------------------------------------------------------------------------

/// Matrix representation of `J·n` on the Dicke space, tagged with its
/// direction.
#[derive(Clone, Debug)]
pub struct CollectiveOperator {
    spin: Spin,
    direction: Direction,
    matrix: CMatrix,
}

impl CollectiveOperator {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Ladder coefficient `√(j(j+1) - μ(μ+1))` for the transition `μ → μ+1`.
#[inline]
fn raising_coefficient(j: f64, mu: f64) -> f64 {
    (j * (j + 1.0) - mu * (mu + 1.0)).max(0.0).sqrt()
}

/// Builds `J·n = n_x Jx + n_y Jy + n_z Jz`.
///
/// In the descending-μ basis the matrix is tridiagonal: the diagonal is
/// `n_z μ` and the entry coupling `μ` to `μ+1` (row index of `μ+1`) is
/// `(n_x - i n_y)/2 · √(j(j+1) - μ(μ+1))`.
pub fn angular_momentum(spin: Spin, axis: Direction) -> CollectiveOperator {
    let j = spin.j();
    let dim = spin.dim();
    let [nx, ny, nz] = axis.components();
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let mu = spin.projection(i);
        m[(i, i)] = C64::new(nz * mu, 0.0);
        if i > 0 {
            // row i-1 is μ+1: the raising half of Jx and Jy
            let c = raising_coefficient(j, mu);
            let entry = C64::new(nx / 2.0, -ny / 2.0) * c;
            m[(i - 1, i)] = entry;
            m[(i, i - 1)] = entry.conj();
        }
    }
    CollectiveOperator {
        spin,
        direction: axis,
        matrix: m,
    }
}

// ---------------------------------------------------------------------------
// Dicke state
// ---------------------------------------------------------------------------

/// A pure state of the symmetric sector: `2j+1` complex amplitudes over
/// `|j, μ⟩`, indexed `μ = +j` down to `-j`.
#[derive(Clone, Debug)]
pub struct DickeState {
    spin: Spin,
    amplitudes: CVector,
}

impl DickeState {
    /// Validates length and unit norm.
    pub fn new(spin: Spin, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::BadLength {
                expected: spin.dim(),
                got: amplitudes.len(),
            });
        }
        let amplitudes = CVector::from_vec(amplitudes);
        let dev = (amplitudes.norm_squared() - 1.0).abs();
        if !dev.is_finite() || dev > tol::NORMALIZATION {
            return Err(Error::NotNormalized { deviation: dev });
        }
        Ok(Self { spin, amplitudes })
    }

    pub(crate) fn from_vector_unchecked(spin: Spin, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), spin.dim());
        Self { spin, amplitudes }
    }

    /// Basis state `|j, μ⟩`.
    pub fn basis_state(spin: Spin, mu: f64) -> Result<Self> {
        let idx = spin.index_of(mu)?;
        let mut v = CVector::zeros(spin.dim());
        v[idx] = C64::new(1.0, 0.0);
        Ok(Self { spin, amplitudes: v })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn inner(&self, other: &DickeState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &DickeState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn expect_matrix(&self, m: &CMatrix) -> C64 {
        (m * &self.amplitudes).dotc(&self.amplitudes).conj()
    }

    /// `⟨J·n⟩` (real for Hermitian operators).
    pub fn expect(&self, op: &CollectiveOperator) -> f64 {
        self.expect_matrix(op.matrix()).re
    }

    /// `⟨(J·n)²⟩ - ⟨J·n⟩²`, via `|Mψ|²` so no matrix square is formed.
    pub fn variance(&self, op: &CollectiveOperator) -> f64 {
        let m_psi = op.matrix() * &self.amplitudes;
        let second = m_psi.norm_squared();
        let first = m_psi.dotc(&self.amplitudes).conj().re;
        second - first * first
    }

    /// `(⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩)`.
    pub fn mean_spin(&self) -> [f64; 3] {
        [
            self.expect(&angular_momentum(self.spin, Direction::X)),
            self.expect(&angular_momentum(self.spin, Direction::Y)),
            self.expect(&angular_momentum(self.spin, Direction::Z)),
        ]
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator {
            spin: self.spin,
            matrix: m,
        }
    }
}

// ---------------------------------------------------------------------------
// Coherent spin states
// ---------------------------------------------------------------------------

/// The maximal-weight eigenstate `|j, j⟩_n` of `J·n`, expressed in the `z`
/// basis.
///
/// With polar angle `ϑ = acos(n_z)` and azimuth `φ`, the amplitudes are
/// `c_μ = e^{-iμφ} √C(2j, j-μ) cos(ϑ/2)^{j+μ} sin(ϑ/2)^{j-μ}`; for `n = x`
/// this reduces to the real binomial expansion `2^{-j} √C(2j, j-μ)`. The
/// weights are evaluated in log space so `N = 10⁴` neither overflows nor
/// underflows prematurely.
pub fn coherent_spin_state(spin: Spin, axis: Direction) -> DickeState {
    let [nx, ny, nz] = axis.components();
    let polar = nz.clamp(-1.0, 1.0).acos();
    let azimuth = if nx.abs() < 1e-300 && ny.abs() < 1e-300 {
        0.0
    } else {
        ny.atan2(nx)
    };
    let two_j = spin.two_j() as usize;
    let lf = LogFactorials::up_to(two_j);
    let ln_cos_half = (polar / 2.0).cos().ln();
    let ln_sin_half = (polar / 2.0).sin().ln();
    let mut amplitudes = CVector::zeros(spin.dim());
    for i in 0..spin.dim() {
        let mu = spin.projection(i);
        let k_minus = i; // j - μ
        let k_plus = two_j - i; // j + μ
        let mut ln_mag = 0.5 * lf.ln_binomial(two_j, k_minus);
        // k·ln(0) would give 0·(-∞) = NaN; a zero exponent contributes 1.
        if k_plus > 0 {
            ln_mag += k_plus as f64 * ln_cos_half;
        }
        if k_minus > 0 {
            ln_mag += k_minus as f64 * ln_sin_half;
        }
        let phase = -mu * azimuth;
        amplitudes[i] = C64::from_polar(ln_mag.exp(), phase);
    }
    // The binomial weights sum to 1 exactly; renormalize away the last ulps.
    let norm = amplitudes.norm();
    amplitudes /= C64::new(norm, 0.0);
    DickeState { spin, amplitudes }
}

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

/// A mixed state on the Dicke space: Hermitian, PSD, unit-trace.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    spin: Spin,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace, and positive semi-definiteness
    /// (eigenvalues above the round-off floor).
    pub fn new(spin: Spin, matrix: CMatrix) -> Result<Self> {
        let dim = spin.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::BadDimension {
                expected: dim,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let herm_dev = linalg::hermitian_deviation(&matrix);
        if !herm_dev.is_finite() || herm_dev > tol::NORMALIZATION {
            return Err(Error::NotHermitian { deviation: herm_dev });
        }
        let tr = linalg::trace(&matrix);
        let tr_dev = (tr - C64::new(1.0, 0.0)).norm();
        if !tr_dev.is_finite() || tr_dev > tol::NORMALIZATION {
            return Err(Error::NotUnitTrace { deviation: tr_dev });
        }
        let eig = linalg::eigh(&matrix);
        let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
        if !min_eigenvalue.is_finite() || min_eigenvalue < tol::PSD_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { spin, matrix })
    }

    pub(crate) fn from_matrix_unchecked(spin: Spin, matrix: CMatrix) -> Self {
        Self { spin, matrix }
    }

    pub fn maximally_mixed(spin: Spin) -> Self {
        let dim = spin.dim();
        let m = CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
        Self { spin, matrix: m }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `Tr[ρ M]` (real part; the trace is real for Hermitian `M`).
    pub fn expect_matrix(&self, m: &CMatrix) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.matrix.nrows() {
            acc += (self.matrix.row(i) * m.column(i))[(0, 0)];
        }
        acc.re
    }

    pub fn expect(&self, op: &CollectiveOperator) -> f64 {
        self.expect_matrix(op.matrix())
    }

    pub fn variance(&self, op: &CollectiveOperator) -> f64 {
        let m2 = op.matrix() * op.matrix();
        self.expect_matrix(&m2) - self.expect(op).powi(2)
    }

    pub fn mean_spin(&self) -> [f64; 3] {
        [
            self.expect(&angular_momentum(self.spin, Direction::X)),
            self.expect(&angular_momentum(self.spin, Direction::Y)),
            self.expect(&angular_momentum(self.spin, Direction::Z)),
        ]
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.norm_squared()
    }
}

// ---------------------------------------------------------------------------
// Random product / separable inputs (test generators)
// ---------------------------------------------------------------------------

/// Description of `N` identically prepared qubits pointing along one axis;
/// its symmetric-sector reduction is the coherent spin state along that axis.
#[derive(Clone, Copy, Debug)]
pub struct ProductState {
    pub particles: u32,
    pub qubit_axis: Direction,
}

impl ProductState {
    pub fn symmetric_state(&self) -> DickeState {
        coherent_spin_state(Spin::from_two_j(self.particles), self.qubit_axis)
    }
}

/// Uniformly random direction on the sphere.
pub fn random_direction<R: Rng>(rng: &mut R) -> Direction {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Direction::new(r * phi.cos(), r * phi.sin(), z).expect("unit vector")
}

/// A random pure product state (all qubits along one uniformly random axis)
/// and its Dicke-space reduction. Reproducible from `seed`.
pub fn random_product_state(n: u32, seed: u64) -> Result<(ProductState, DickeState)> {
    let spin = Spin::from_particles(n)?;
    let mut rng = rng::stream(seed, 0);
    let axis = random_direction(&mut rng);
    let product = ProductState {
        particles: n,
        qubit_axis: axis,
    };
    Ok((product, coherent_spin_state(spin, axis)))
}

/// A random full-rank density: `ρ = G G† / Tr[G G†]` with Ginibre `G`
/// (i.i.d. complex normal entries). Reproducible from `seed`.
pub fn random_density(n: u32, seed: u64) -> Result<DensityOperator> {
    let spin = Spin::from_particles(n)?;
    let dim = spin.dim();
    let mut rng = rng::stream(seed, 1);
    let mut normal = || {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (-2.0 * u1.ln()).sqrt() * u2.cos()
    };
    let g = CMatrix::from_fn(dim, dim, |_, _| C64::new(normal(), normal()));
    let mut m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    m /= C64::new(tr, 0.0);
    // Symmetrize away the last ulps of round-off before validation.
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityOperator::new(spin, m)
}

/// A random separable density in the symmetric sector:
/// `ρ = Σ_k p_k |j,j⟩_{n_k}⟨j,j|_{n_k}` with `K` coherent-state terms along
/// uniformly random axes and weights uniform on the simplex.
pub fn random_separable_density(n: u32, k: u32, seed: u64) -> Result<DensityOperator> {
    let spin = Spin::from_particles(n)?;
    if k < 1 {
        return Err(Error::InvalidParameter("K must be >= 1".into()));
    }
    let mut rng = rng::stream(seed, 0);
    // Dirichlet(1,...,1) via normalized exponentials.
    let mut weights: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let dim = spin.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for &w in &weights {
        let axis = random_direction(&mut rng);
        let css = coherent_spin_state(spin, axis);
        m += (css.amplitudes() * css.amplitudes().adjoint()) * C64::new(w, 0.0);
    }
    DensityOperator::new(spin, m)
}
