//! Numerics for collective-spin metrology on the symmetric (Dicke) subspace
//! of `N` qubits.
//!
//! The crate covers four layers:
//!
//! * [`spinspace`] — exact linear algebra on the `(N+1)`-dimensional Dicke
//!   space: collective operators `J·n`, coherent spin states, rotations
//!   (Wigner d-matrix and spectral paths), and seeded generators for product
//!   and separable test states.
//! * [`dynamics`] — one-axis-twisting evolution `exp(-i τ Jz²)` together with
//!   the closed-form squeezing and Fisher-information curves it produces.
//! * [`witness`] — the quantum Fisher information (pure and mixed states via
//!   the symmetric logarithmic derivative), the `χ² = N/F_Q` usefulness
//!   criterion, the `ξ²` spin-squeezing parameter, the quantum Cramér-Rao
//!   bound, and the two-sided moment bound on `F_Q`.
//! * [`interferometer`] / [`bayes`] — the Mach-Zehnder likelihood
//!   `P(μ | j, θ, τ)` and a seeded Bayesian phase-estimation Monte Carlo with
//!   sensitivity sweeps over the number of measurements.
//!
//! Conventions, fixed everywhere:
//!
//! * spin-1/2 units, `J = Σ_l σ^(l) / 2`, so `j = N/2` and `N = 2j`;
//! * Dicke amplitudes are indexed by `μ = +j` down to `-j` (`Jz` is diagonal
//!   descending);
//! * rotations are active, `R(n, θ) = exp(-i θ J·n)`.

pub mod bayes;
pub mod dynamics;
pub mod interferometer;
pub mod io;
pub mod linalg;
pub mod numeric;
pub mod rng;
pub mod rotation;
pub mod spinspace;
pub mod tol;
pub mod witness;

mod error;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use spinspace::{
    angular_momentum, coherent_spin_state, random_product_state, random_separable_density,
    CollectiveOperator, DensityOperator, DickeState, Direction, Spin,
};
