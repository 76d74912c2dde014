//! JSON channel descriptions.
//!
//! ```json
//! {"kind": "depolarizing", "lambda": 0.6, "d": 2}
//! {"kind": "kraus", "operators": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}
//! {"kind": "choi", "matrix": [...], "in_dim": 2, "out_dim": 2}
//! {"kind": "measure_prepare", "povm": [...], "prepares": [...]}
//! ```
//!
//! Complex entries are `[re, im]` pairs and matrices are row-major nested
//! arrays. `in_dim`/`out_dim` may be omitted for a square Choi matrix.
//! `"extended": true` opens the depolarizing range below zero.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::{depolarizing, depolarizing_extended, measure_prepare_channel, Channel, MeasurePrepare};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DimsSpec, C64};
use crate::states::DensityOperator;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Kraus {
        operators: Vec<JsonMatrix>,
    },
    Choi {
        matrix: JsonMatrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        in_dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        out_dim: Option<usize>,
    },
    Depolarizing {
        lambda: f64,
        d: usize,
        #[serde(default)]
        extended: bool,
    },
    MeasurePrepare {
        povm: Vec<JsonMatrix>,
        prepares: Vec<JsonMatrix>,
    },
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    /// Builds and validates the channel.
    pub fn build(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Kraus { operators } => {
                let ops = operators
                    .iter()
                    .enumerate()
                    .map(|(j, m)| rect(m, &format!("Kraus operator {j}")))
                    .collect::<Result<Vec<_>>>()?;
                Channel::from_kraus(ops)
            }
            ChannelSpec::Choi {
                matrix,
                in_dim,
                out_dim,
            } => {
                let m = square(matrix, "Choi matrix")?;
                let n = m.dim();
                let (out_dim, in_dim) = match (out_dim, in_dim) {
                    (Some(o), Some(i)) => (*o, *i),
                    (Some(o), None) if *o > 0 && n % o == 0 => (*o, n / o),
                    (None, Some(i)) if *i > 0 && n % i == 0 => (n / i, *i),
                    (None, None) => {
                        let d = (n as f64).sqrt().round() as usize;
                        if d * d != n {
                            return Err(Error::Spec(format!(
                                "Choi matrix of size {n} is not d²×d², give in_dim/out_dim"
                            )));
                        }
                        (d, d)
                    }
                    _ => return Err(Error::Spec(format!("in_dim/out_dim do not divide Choi size {n}"))),
                };
                let dims = DimsSpec::new(vec![out_dim, in_dim])?;
                if dims.total() != n {
                    return Err(Error::DimensionMismatch {
                        expected: dims.total(),
                        found: n,
                    });
                }
                let omega =
                    DensityOperator::new(m, dims).map_err(|e| Error::NotAChannel(format!("Choi operator: {e}")))?;
                Channel::from_choi(omega)
            }
            ChannelSpec::Depolarizing { lambda, d, extended } => {
                if *extended {
                    depolarizing_extended(*lambda, *d)
                } else {
                    depolarizing(*lambda, *d)
                }
            }
            ChannelSpec::MeasurePrepare { povm, prepares } => {
                let povm = povm
                    .iter()
                    .enumerate()
                    .map(|(j, m)| square(m, &format!("POVM element {j}")))
                    .collect::<Result<Vec<_>>>()?;
                let prepares = prepares
                    .iter()
                    .enumerate()
                    .map(|(j, m)| {
                        let m = square(m, &format!("prepared state {j}"))?;
                        let dims = DimsSpec::new(vec![m.dim()])?;
                        DensityOperator::new(m, dims)
                            .map_err(|e| Error::NotAChannel(format!("prepared state {j}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                measure_prepare_channel(&MeasurePrepare::new(povm, prepares)?)
            }
        }
    }
}

/// Reads, parses and validates a channel spec file.
pub fn load_channel(path: impl AsRef<Path>) -> Result<Channel> {
    ChannelSpec::from_path(path)?.build()
}

pub fn matrix_to_json(m: &DMatrix<C64>) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rect(rows: &JsonMatrix, what: &str) -> Result<DMatrix<C64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Spec(format!("{what} is empty")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::Spec(format!(
            "{what}: row {i} has {} entries, expected {ncols}",
            rows[i].len()
        )));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Spec(format!("{what} has a non-finite entry")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn square(rows: &JsonMatrix, what: &str) -> Result<ComplexMatrix> {
    ComplexMatrix::new(rect(rows, what)?).map_err(|e| Error::Spec(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{choi_of, random_channel};

    #[test]
    fn depolarizing_round_trip() {
        let spec = ChannelSpec::from_json(r#"{"kind":"depolarizing","lambda":0.6,"d":2}"#).unwrap();
        let e = spec.build().unwrap();
        assert!(e.distance(&depolarizing(0.6, 2).unwrap()) < 1e-15);
        assert_eq!(ChannelSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn extended_flag() {
        let text = r#"{"kind":"depolarizing","lambda":-0.2,"d":2}"#;
        assert!(matches!(
            ChannelSpec::from_json(text).unwrap().build(),
            Err(Error::OutOfRange { .. })
        ));
        let text = r#"{"kind":"depolarizing","lambda":-0.2,"d":2,"extended":true}"#;
        assert!(ChannelSpec::from_json(text).unwrap().build().is_ok());
    }

    #[test]
    fn kraus_and_choi_agree() {
        let e = random_channel(2, 3, 2, 5).unwrap();
        let kraus = ChannelSpec::Kraus {
            operators: e.kraus().iter().map(matrix_to_json).collect(),
        };
        let choi = ChannelSpec::Choi {
            matrix: matrix_to_json(choi_of(&e).matrix().as_dmatrix()),
            in_dim: Some(2),
            out_dim: None,
        };
        let a = ChannelSpec::from_json(&kraus.to_json()).unwrap().build().unwrap();
        let b = ChannelSpec::from_json(&choi.to_json()).unwrap().build().unwrap();
        assert_eq!((a.in_dim(), a.out_dim()), (2, 3));
        assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn measure_prepare_spec() {
        let text = r#"{"kind":"measure_prepare",
            "povm":[[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]],
            "prepares":[[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]], [[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        let e = ChannelSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(e.in_dim(), 2);
    }

    #[test]
    fn invalid_specs_name_the_failure() {
        let non_tp = r#"{"kind":"kraus","operators":[[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#;
        let err = ChannelSpec::from_json(non_tp).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("trace preservation"), "{err}");

        let non_cp = r#"{"kind":"choi","matrix":[[[0.5,0],[0,0],[0,0],[0.6,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0.6,0],[0,0],[0,0],[0.5,0]]]}"#;
        let err = ChannelSpec::from_json(non_cp).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("not a valid channel"), "{err}");

        assert!(matches!(
            ChannelSpec::from_json(r#"{"kind":"banana"}"#),
            Err(Error::Spec(_))
        ));
        assert!(matches!(ChannelSpec::from_json("not json"), Err(Error::Spec(_))));
        let ragged = r#"{"kind":"kraus","operators":[[[[1,0],[0,0]],[[0,0]]]]}"#;
        assert!(matches!(
            ChannelSpec::from_json(ragged).unwrap().build(),
            Err(Error::Spec(_))
        ));
    }
}
