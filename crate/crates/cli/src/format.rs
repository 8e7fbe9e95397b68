//! Versioned JSON container shared by every file the CLI reads or writes.
//!
//! Numbers are stored as decimal strings (see [`Scalar::to_decimal`]), so
//! files are diffable and rewriting a file reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use twospectra::mass_spring::MassSpringChain;
use twospectra::{JacobiMatrix, SpectralMeasure};

use crate::decimal::Scalar;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Matrix,
    Chain,
    SpectraPair,
    Measure,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Matrix => "matrix",
            Kind::Chain => "chain",
            Kind::SpectraPair => "spectra_pair",
            Kind::Measure => "measure",
        })
    }
}

/// Two raw spectra. Ordering and lengths are checked on load; interlacing
/// is a mathematical gate and is left to the commands.
#[derive(Clone, Debug, PartialEq)]
pub struct RawPair<T> {
    pub lambdas: Vec<T>,
    pub mus: Vec<T>,
}

#[derive(Clone, Debug)]
pub enum Payload<T> {
    Matrix(JacobiMatrix<T>),
    Chain(MassSpringChain<T>),
    SpectraPair(RawPair<T>),
    Measure(SpectralMeasure<T>),
}

impl<T> Payload<T> {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::Matrix(_) => Kind::Matrix,
            Payload::Chain(_) => Kind::Chain,
            Payload::SpectraPair(_) => Kind::SpectraPair,
            Payload::Measure(_) => Kind::Measure,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemFile<T> {
    pub payload: Payload<T>,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug)]
pub enum FormatError {
    NotFound(String),
    Io(String, std::io::Error),
    Syntax(serde_json::Error),
    Field(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::NotFound(path) => write!(f, "file not found: {path}"),
            FormatError::Io(path, e) => write!(f, "{path}: {e}"),
            FormatError::Syntax(e) => write!(f, "malformed file at line {}, column {}: {e}", e.line(), e.column()),
            FormatError::Field(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for FormatError {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Container {
    schema_version: String,
    kind: Kind,
    payload: Map<String, Value>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

fn field_error(field: &str, msg: impl fmt::Display) -> FormatError {
    FormatError::Field(format!("payload.{field}: {msg}"))
}

fn numbers<T: Scalar>(payload: &Map<String, Value>, field: &str) -> Result<Vec<T>, FormatError> {
    let values = payload
        .get(field)
        .ok_or_else(|| field_error(field, "missing"))?
        .as_array()
        .ok_or_else(|| field_error(field, "expected an array of decimal strings"))?;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let text = v
                .as_str()
                .ok_or_else(|| field_error(&format!("{field}[{i}]"), "expected a decimal string"))?;
            T::parse_decimal(text)
                .ok_or_else(|| field_error(&format!("{field}[{i}]"), format!("not a finite number: {text:?}")))
        })
        .collect()
}

fn number<T: Scalar>(payload: &Map<String, Value>, field: &str) -> Result<T, FormatError> {
    let text = payload
        .get(field)
        .ok_or_else(|| field_error(field, "missing"))?
        .as_str()
        .ok_or_else(|| field_error(field, "expected a decimal string"))?;
    T::parse_decimal(text).ok_or_else(|| field_error(field, format!("not a finite number: {text:?}")))
}

fn ascending<T: Scalar>(values: &[T], field: &str) -> Result<(), FormatError> {
    match values.windows(2).position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        Some(i) => Err(field_error(&format!("{field}[{}]", i + 1), "values must be strictly increasing")),
        None => Ok(()),
    }
}

fn to_strings<T: Scalar>(values: &[T]) -> Value {
    Value::Array(values.iter().map(|v| Value::String(v.to_decimal())).collect())
}

impl<T: Scalar> ProblemFile<T> {
    pub fn new(payload: Payload<T>) -> Self {
        Self {
            payload,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn kind(&self) -> Kind {
        self.payload.kind()
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let raw: Container = serde_json::from_str(text).map_err(FormatError::Syntax)?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(FormatError::Field(format!(
                "schema_version: unsupported version {:?}, expected {SCHEMA_VERSION:?}",
                raw.schema_version
            )));
        }
        let p = &raw.payload;
        let invalid = |e: twospectra::Error| FormatError::Field(format!("payload: {e}"));
        let payload = match raw.kind {
            Kind::Matrix => Payload::Matrix(
                JacobiMatrix::new(numbers(p, "diagonal")?, numbers(p, "off_diagonal")?).map_err(invalid)?,
            ),
            Kind::Chain => Payload::Chain(
                MassSpringChain::new(numbers(p, "masses")?, numbers(p, "springs")?, number(p, "terminal_spring")?)
                    .map_err(invalid)?,
            ),
            Kind::SpectraPair => {
                let lambdas: Vec<T> = numbers(p, "lambdas")?;
                let mus: Vec<T> = numbers(p, "mus")?;
                if lambdas.is_empty() || lambdas.len() != mus.len() {
                    return Err(FormatError::Field(format!(
                        "payload: lambdas and mus must be non-empty and of equal length ({} vs {})",
                        lambdas.len(),
                        mus.len()
                    )));
                }
                ascending(&lambdas, "lambdas")?;
                ascending(&mus, "mus")?;
                Payload::SpectraPair(RawPair { lambdas, mus })
            }
            Kind::Measure => Payload::Measure(
                SpectralMeasure::new(numbers(p, "points")?, numbers(p, "weights")?).map_err(invalid)?,
            ),
        };
        Ok(Self {
            payload,
            metadata: raw.metadata,
        })
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => FormatError::NotFound(shown.clone()),
            _ => FormatError::Io(shown.clone(), e),
        })?;
        Self::parse(&text).map_err(|e| match e {
            FormatError::Syntax(_) | FormatError::Field(_) => FormatError::Field(format!("{shown}: {e}")),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut payload = Map::new();
        match &self.payload {
            Payload::Matrix(j) => {
                payload.insert("diagonal".into(), to_strings(j.diag()));
                payload.insert("off_diagonal".into(), to_strings(j.off()));
            }
            Payload::Chain(c) => {
                payload.insert("masses".into(), to_strings(c.masses()));
                payload.insert("springs".into(), to_strings(c.springs()));
                payload.insert("terminal_spring".into(), Value::String(c.terminal().to_decimal()));
            }
            Payload::SpectraPair(pair) => {
                payload.insert("lambdas".into(), to_strings(&pair.lambdas));
                payload.insert("mus".into(), to_strings(&pair.mus));
            }
            Payload::Measure(m) => {
                payload.insert("points".into(), to_strings(m.points()));
                payload.insert("weights".into(), to_strings(m.weights()));
            }
        }
        let container = Container {
            schema_version: SCHEMA_VERSION.into(),
            kind: self.kind(),
            payload,
            metadata: self.metadata.clone(),
        };
        let mut text = serde_json::to_string_pretty(&container).expect("container is always serializable");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::Mp;

    const MATRIX: &str = r#"{
  "schema_version": "1",
  "kind": "matrix",
  "payload": {
    "diagonal": [
      "0",
      "0"
    ],
    "off_diagonal": [
      "1"
    ]
  },
  "metadata": {
    "name": "two by two"
  }
}
"#;

    #[test]
    fn rewrite_is_byte_identical() {
        let f = ProblemFile::<f64>::parse(MATRIX).unwrap();
        assert_eq!(f.kind(), Kind::Matrix);
        assert_eq!(f.to_json(), MATRIX);
        let g = ProblemFile::<Mp<256>>::parse(MATRIX).unwrap();
        assert_eq!(g.to_json(), MATRIX);
    }

    #[test]
    fn reports_field_context() {
        let bad = MATRIX.replace("\"1\"\n    ]", "\"one\"\n    ]");
        let err = ProblemFile::<f64>::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("payload.off_diagonal[0]"), "{err}");

        let short = MATRIX.replace("\"0\",\n      \"0\"", "\"0\"");
        let err = ProblemFile::<f64>::parse(&short).unwrap_err().to_string();
        assert!(err.contains("invalid Jacobi matrix"), "{err}");

        let err = ProblemFile::<f64>::parse("{\n  \"kind\": 3").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");

        let err = ProblemFile::<f64>::parse(&MATRIX.replace("\"1\",\n  \"kind", "\"9\",\n  \"kind"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("schema_version"), "{err}");
    }

    #[test]
    fn every_kind_round_trips() {
        let third = Mp::<256>::from(1.0) / Mp::<256>::from(3.0);
        let two = Mp::<256>::from(2.0);
        let payloads = vec![
            Payload::Matrix(JacobiMatrix::new(vec![third.clone(), two.clone()], vec![third.clone()]).unwrap()),
            Payload::Chain(MassSpringChain::new(vec![third.clone()], vec![two.clone()], third.clone()).unwrap()),
            Payload::SpectraPair(RawPair {
                lambdas: vec![-two.clone(), third.clone()],
                mus: vec![-third.clone(), two.clone()],
            }),
            Payload::Measure(
                SpectralMeasure::new(vec![-two.clone(), two.clone()], vec![third.clone(), two.clone() * third.clone()])
                    .unwrap(),
            ),
        ];
        for payload in payloads {
            let file = ProblemFile::new(payload).with_meta("theta", "2");
            let text = file.to_json();
            let back = ProblemFile::<Mp<256>>::parse(&text).unwrap();
            assert_eq!(back.to_json(), text);
            assert_eq!(back.metadata["theta"], "2");
        }
    }

    #[test]
    fn pair_shape_is_checked_on_load() {
        let text = ProblemFile::new(Payload::SpectraPair(RawPair {
            lambdas: vec![1.0, 0.0],
            mus: vec![2.0, 3.0],
        }))
        .to_json();
        let err = ProblemFile::<f64>::parse(&text).unwrap_err().to_string();
        assert!(err.contains("payload.lambdas[1]"), "{err}");
    }
}
