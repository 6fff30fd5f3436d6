//! JSON state files.
//!
//! ```text
//! {"dim": d, "kind": "pure" | "mixed", "data": [[re, im], ...]}
//! ```
//! Pure states list `d` amplitudes, mixed states list the `d^2` entries in
//! row-major order. Numbers are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, PureState};
use crate::C64;

/// A state read from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn dim(&self) -> usize {
        match self {
            StateInput::Pure(p) => p.dim(),
            StateInput::Mixed(m) => m.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            StateInput::Pure(p) => p.projector(),
            StateInput::Mixed(m) => m.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StateInput::Pure(_) => "pure",
            StateInput::Mixed(_) => "mixed",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    dim: usize,
    kind: String,
    data: Vec<[f64; 2]>,
}

pub fn parse_state(text: &str) -> Result<StateInput> {
    let raw: RawState = serde_json::from_str(text)?;
    let entries: Vec<C64> = raw.data.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    match raw.kind.as_str() {
        "pure" => {
            if entries.len() != raw.dim {
                return Err(Error::Format(format!(
                    "pure state of dim {} needs {} amplitudes, got {}",
                    raw.dim,
                    raw.dim,
                    entries.len()
                )));
            }
            Ok(StateInput::Pure(PureState::new(entries)?))
        }
        "mixed" => {
            if entries.len() != raw.dim * raw.dim {
                return Err(Error::Format(format!(
                    "mixed state of dim {} needs {} entries, got {}",
                    raw.dim,
                    raw.dim * raw.dim,
                    entries.len()
                )));
            }
            Ok(StateInput::Mixed(DensityMatrix::from_row_major(
                raw.dim, &entries,
            )?))
        }
        other => Err(Error::Format(format!(
            "kind must be \"pure\" or \"mixed\", got {other:?}"
        ))),
    }
}

pub fn read_state(path: impl AsRef<Path>) -> Result<StateInput> {
    parse_state(&read_text(path.as_ref())?)
}

/// File contents, with the path in any error.
pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

/// IEEE-754 double with 17 significant digits, as a JSON number.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_state(state: &StateInput) -> String {
    let entries: Vec<C64> = match state {
        StateInput::Pure(p) => p.amplitudes().to_vec(),
        StateInput::Mixed(m) => {
            let d = m.dim();
            (0..d * d).map(|n| m.entry(n / d, n % d)).collect()
        }
    };
    let mut out = format!(
        "{{\"dim\": {}, \"kind\": \"{}\", \"data\": [",
        state.dim(),
        state.kind()
    );
    for (n, z) in entries.iter().enumerate() {
        if n > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "[{}, {}]", format_f64(z.re), format_f64(z.im));
    }
    out.push_str("]}\n");
    out
}

pub fn write_state(path: impl AsRef<Path>, state: &StateInput) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_state(state))
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_mixed, random_pure};

    #[test]
    fn reads_pure_and_mixed() {
        let s = r#"{"dim": 2, "kind": "pure", "data": [[0.6, 0.0], [0.0, 0.8]]}"#;
        let StateInput::Pure(p) = parse_state(s).unwrap() else {
            panic!()
        };
        assert_eq!(p.amplitudes()[1], C64::new(0.0, 0.8));

        let s = r#"{"dim": 2, "kind": "mixed", "data": [[0.5, 0], [0.5, 0], [0.5, 0], [0.5, 0]]}"#;
        assert!(matches!(parse_state(s).unwrap(), StateInput::Mixed(_)));
    }

    #[test]
    fn rejects_bad_files() {
        for bad in [
            r#"{"dim": 2, "kind": "pure", "data": [[1.0, 0.0]]}"#,
            r#"{"dim": 2, "kind": "qutrit", "data": [[1.0, 0.0], [0.0, 0.0]]}"#,
            r#"{"dim": 2, "kind": "pure", "data": [[1.0, 0.0], [1.0, 0.0]]}"#,
            r#"{"dim": 2, "kind": "mixed", "data": [[0.9, 0], [0, 0], [0, 0], [0, 0]]}"#,
            r#"{"dim": 2, "kind": "pure"}"#,
            r#"not json"#,
        ] {
            assert!(parse_state(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    }

    proptest::proptest! {
        #[test]
        fn round_trip_is_bit_exact(seed in 0u64..1000, dim in 2usize..6, mixed in proptest::bool::ANY) {
            let state = if mixed {
                StateInput::Mixed(random_mixed(dim, 1 + seed as usize % dim, seed).unwrap())
            } else {
                StateInput::Pure(random_pure(dim, seed).unwrap())
            };
            let back = parse_state(&format_state(&state)).unwrap();
            proptest::prop_assert_eq!(back, state);
        }
    }
}
