//! Serialization of states and density operators.
//!
//! Both formats are JSON objects with a fixed header — `"j"` (half-integer
//! as a plain number), `"basis": "z"`, `"order": "mu_descending"` — and the
//! payload as an array of `[re, im]` pairs, row-major for matrices:
//!
//! ```json
//! {"j": 1.5, "basis": "z", "order": "mu_descending",
//!  "amplitudes": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]}
//! ```
//!
//! Parsing is total: any malformed input, header mismatch, or violated
//! state/density invariant comes back as a typed [`Error`] naming the
//! failed check, never a panic. These parsers are fuzzed (see the `fuzz/`
//! directory).

use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, C64};
use crate::spinspace::{DensityOperator, DickeState, Spin};
use crate::{Error, Result};

const BASIS: &str = "z";
const ORDER: &str = "mu_descending";

/// Parsing refuses dimensions beyond this (2j bound): a header alone must
/// not drive allocations.
const MAX_TWO_J: u32 = 100_000;

#[derive(Serialize, Deserialize)]
struct RawState {
    j: f64,
    basis: String,
    order: String,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    j: f64,
    basis: String,
    order: String,
    /// Row-major `(2j+1)²` entries.
    matrix: Vec<[f64; 2]>,
}

fn check_header(j: f64, basis: &str, order: &str) -> Result<Spin> {
    if basis != BASIS {
        return Err(Error::Format(format!(
            "unsupported basis {basis:?} (expected {BASIS:?})"
        )));
    }
    if order != ORDER {
        return Err(Error::Format(format!(
            "unsupported ordering {order:?} (expected {ORDER:?})"
        )));
    }
    let spin = Spin::from_j(j)?;
    if spin.two_j() > MAX_TWO_J {
        return Err(Error::Format(format!(
            "refusing j = {j}: dimension above the {MAX_TWO_J} limit"
        )));
    }
    Ok(spin)
}

fn check_finite(pairs: &[[f64; 2]]) -> Result<()> {
    if pairs
        .iter()
        .any(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(Error::Format("non-finite entry in payload".into()));
    }
    Ok(())
}

/// Serializes a state to the canonical JSON format.
pub fn state_to_json(state: &DickeState) -> String {
    let raw = RawState {
        j: state.spin().j(),
        basis: BASIS.into(),
        order: ORDER.into(),
        amplitudes: state.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("state serialization cannot fail")
}

/// Parses and validates a state from JSON bytes.
pub fn state_from_json(bytes: &[u8]) -> Result<DickeState> {
    let raw: RawState = serde_json::from_slice(bytes)?;
    let spin = check_header(raw.j, &raw.basis, &raw.order)?;
    if raw.amplitudes.len() != spin.dim() {
        return Err(Error::BadLength {
            expected: spin.dim(),
            got: raw.amplitudes.len(),
        });
    }
    check_finite(&raw.amplitudes)?;
    let amplitudes: Vec<C64> = raw
        .amplitudes
        .iter()
        .map(|p| C64::new(p[0], p[1]))
        .collect();
    DickeState::new(spin, amplitudes)
}

/// Serializes a density operator to the canonical JSON format (row-major).
pub fn density_to_json(rho: &DensityOperator) -> String {
    let dim = rho.spin().dim();
    let mut matrix = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            let z = rho.matrix()[(r, c)];
            matrix.push([z.re, z.im]);
        }
    }
    let raw = RawDensity {
        j: rho.spin().j(),
        basis: BASIS.into(),
        order: ORDER.into(),
        matrix,
    };
    serde_json::to_string_pretty(&raw).expect("density serialization cannot fail")
}

/// Parses and validates a density operator from JSON bytes; failures name
/// the violated invariant (dimension, Hermiticity, trace, positivity).
pub fn density_from_json(bytes: &[u8]) -> Result<DensityOperator> {
    let raw: RawDensity = serde_json::from_slice(bytes)?;
    let spin = check_header(raw.j, &raw.basis, &raw.order)?;
    let dim = spin.dim();
    let expected = dim.checked_mul(dim).ok_or_else(|| {
        Error::Format("matrix dimension overflows".into())
    })?;
    if raw.matrix.len() != expected {
        return Err(Error::BadLength {
            expected,
            got: raw.matrix.len(),
        });
    }
    check_finite(&raw.matrix)?;
    let matrix = CMatrix::from_fn(dim, dim, |r, c| {
        let p = raw.matrix[r * dim + c];
        C64::new(p[0], p[1])
    });
    DensityOperator::new(spin, matrix)
}

pub fn write_state(path: &std::path::Path, state: &DickeState) -> Result<()> {
    std::fs::write(path, state_to_json(state))?;
    Ok(())
}

pub fn read_state(path: &std::path::Path) -> Result<DickeState> {
    state_from_json(&std::fs::read(path)?)
}

pub fn write_density(path: &std::path::Path, rho: &DensityOperator) -> Result<()> {
    std::fs::write(path, density_to_json(rho))?;
    Ok(())
}

pub fn read_density(path: &std::path::Path) -> Result<DensityOperator> {
    density_from_json(&std::fs::read(path)?)
}

/// 17-significant-digit float formatting used by every CSV emitter; `f64`
/// round-trips losslessly through it.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV cell for possibly-divergent quantities: the literal `inf` instead of
/// a sentinel number.
pub fn fmt_csv_value(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        fmt_g17(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinspace::{coherent_spin_state, random_separable_density, Direction};

    #[test]
    fn state_round_trip() {
        let spin = Spin::from_j(2.5).unwrap();
        let state = coherent_spin_state(spin, Direction::new(0.3, -0.2, 0.9).unwrap());
        let json = state_to_json(&state);
        assert!(json.contains("\"j\": 2.5"));
        assert!(json.contains("\"order\": \"mu_descending\""));
        let back = state_from_json(json.as_bytes()).unwrap();
        assert_eq!(back.spin(), spin);
        assert!((back.amplitudes() - state.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn density_round_trip() {
        let rho = random_separable_density(5, 3, 8).unwrap();
        let json = density_to_json(&rho);
        let back = density_from_json(json.as_bytes()).unwrap();
        assert!((back.matrix() - rho.matrix()).norm() < 1e-15);
    }

    #[test]
    fn malformed_inputs_name_the_violated_invariant() {
        // Wrong basis
        let bad = r#"{"j": 0.5, "basis": "x", "order": "mu_descending", "amplitudes": [[1,0],[0,0]]}"#;
        assert!(matches!(
            state_from_json(bad.as_bytes()),
            Err(Error::Format(_))
        ));
        // Length mismatch
        let bad = r#"{"j": 1.0, "basis": "z", "order": "mu_descending", "amplitudes": [[1,0],[0,0]]}"#;
        assert!(matches!(
            state_from_json(bad.as_bytes()),
            Err(Error::BadLength { expected: 3, .. })
        ));
        // Not normalized
        let bad = r#"{"j": 0.5, "basis": "z", "order": "mu_descending", "amplitudes": [[1,0],[1,0]]}"#;
        assert!(matches!(
            state_from_json(bad.as_bytes()),
            Err(Error::NotNormalized { .. })
        ));
        // Non-half-integer j
        let bad = r#"{"j": 0.7, "basis": "z", "order": "mu_descending", "amplitudes": [[1,0]]}"#;
        assert!(matches!(
            state_from_json(bad.as_bytes()),
            Err(Error::InvalidSpin { .. })
        ));
        // Trace violation (named)
        let bad = r#"{"j": 0.5, "basis": "z", "order": "mu_descending",
                      "matrix": [[2,0],[0,0],[0,0],[0,0]]}"#;
        let err = density_from_json(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
        // Hermiticity violation (named)
        let bad = r#"{"j": 0.5, "basis": "z", "order": "mu_descending",
                      "matrix": [[0.5,0],[0.3,0],[0,0],[0.5,0]]}"#;
        let err = density_from_json(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("Hermitian"), "{err}");
        // Negative eigenvalue (named)
        let bad = r#"{"j": 0.5, "basis": "z", "order": "mu_descending",
                      "matrix": [[1.5,0],[0,0],[0,0],[-0.5,0]]}"#;
        let err = density_from_json(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
        // Absurd j is refused before any allocation
        let bad = r#"{"j": 1e9, "basis": "z", "order": "mu_descending", "amplitudes": []}"#;
        assert!(state_from_json(bad.as_bytes()).is_err());
        // Garbage
        assert!(state_from_json(b"not json").is_err());
        assert!(density_from_json(&[0xff, 0xfe]).is_err());
    }

    #[test]
    fn g17_round_trips_and_inf_is_literal() {
        for x in [0.1, std::f64::consts::PI, 2.0 / 3.0, 1e-300, -4.56e17] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_csv_value(f64::INFINITY), "inf");
        assert_eq!(fmt_csv_value(f64::NEG_INFINITY), "-inf");
    }
}
