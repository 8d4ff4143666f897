//! Complex matrix aliases and the Hermitian eigensolver wrapper used
//! throughout the crate.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Maximum entry-wise deviation of `m` from its own adjoint.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for k in i..n {
            let d = (m[(i, k)] - m[(k, i)].conj()).norm();
            if d > dev {
                dev = d;
            }
        }
    }
    dev
}

pub fn trace(m: &CMatrix) -> C64 {
    let mut t = C64::new(0.0, 0.0);
    for i in 0..m.nrows() {
        t += m[(i, i)];
    }
    t
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors as unitary columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// `m^k` for a small non-negative integer power.
pub fn matrix_power(m: &CMatrix, k: u32) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::identity(n, n);
    for _ in 0..k {
        out = &out * m;
    }
    out
}
