//! The matrix document:
//! `{"algebra": "<designator>", "scalar": "rational"|"float", "matrix": [[..6..] x6]}`.
//!
//! Rows are row-major; column `c` is the image of the `c`-th basis vector
//! `e1, e2, e3, e1*, e2*, e3*`. Rational entries are `"p/q"` strings (integer
//! JSON numbers are also read); float entries are JSON numbers.

use serde::Serialize;
use serde_json::Value;

use crate::acs::Acs;
use crate::error::{Error, Result};
use crate::lie::Designator;
use crate::linalg::Matrix6;
use crate::scalar::{parse_rational, Rational, Scalar, ScalarMode};

/// An almost complex structure candidate in either scalar mode.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAcs {
    Rational(Acs<Rational>),
    Float(Acs<f64>),
}

impl AnyAcs {
    pub fn mode(&self) -> ScalarMode {
        match self {
            AnyAcs::Rational(_) => ScalarMode::Rational,
            AnyAcs::Float(_) => ScalarMode::Float,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub algebra: Designator,
    pub acs: AnyAcs,
}

#[derive(Serialize)]
struct Wire<'a> {
    algebra: String,
    scalar: &'a str,
    matrix: Vec<Vec<Value>>,
}

fn rows_json<T: Scalar>(m: &Matrix6<T>) -> Vec<Vec<Value>> {
    m.0.iter().map(|row| row.iter().map(Scalar::to_json).collect()).collect()
}

impl MatrixDocument {
    pub fn rational(algebra: Designator, acs: Acs<Rational>) -> Self {
        MatrixDocument { algebra, acs: AnyAcs::Rational(acs) }
    }

    pub fn float(algebra: Designator, acs: Acs<f64>) -> Self {
        MatrixDocument { algebra, acs: AnyAcs::Float(acs) }
    }

    pub fn to_value(&self) -> Value {
        let (scalar, matrix) = match &self.acs {
            AnyAcs::Rational(j) => ("rational", rows_json(j.matrix())),
            AnyAcs::Float(j) => ("float", rows_json(j.matrix())),
        };
        serde_json::to_value(Wire { algebra: self.algebra.to_string(), scalar, matrix }).expect("serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("serializable")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Parse("matrix document must be a JSON object".into()))?;
        let field = |name: &str| obj.get(name).ok_or_else(|| Error::Parse(format!("missing field `{name}`")));
        let algebra: Designator = field("algebra")?
            .as_str()
            .ok_or_else(|| Error::Parse("`algebra` must be a string".into()))?
            .parse()?;
        let mode: ScalarMode = field("scalar")?
            .as_str()
            .ok_or_else(|| Error::Parse("`scalar` must be a string".into()))?
            .parse()?;
        let rows = field("matrix")?
            .as_array()
            .filter(|rows| rows.len() == 6)
            .ok_or_else(|| Error::Parse("`matrix` must have 6 rows".into()))?;
        let mut cells: Vec<&Value> = Vec::with_capacity(36);
        for (r, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|row| row.len() == 6)
                .ok_or_else(|| Error::Parse(format!("matrix row {} must have 6 entries", r + 1)))?;
            cells.extend(row);
        }
        let acs = match mode {
            ScalarMode::Rational => {
                let entries = cells.iter().map(|v| rational_cell(v)).collect::<Result<Vec<_>>>()?;
                AnyAcs::Rational(Acs::new(Matrix6::from_fn(|r, c| entries[6 * r + c].clone())))
            }
            ScalarMode::Float => {
                let entries = cells.iter().map(|v| float_cell(v)).collect::<Result<Vec<_>>>()?;
                AnyAcs::Float(Acs::new(Matrix6::from_fn(|r, c| entries[6 * r + c])))
            }
        };
        Ok(MatrixDocument { algebra, acs })
    }
}

fn rational_cell(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        Value::Number(n) => Err(Error::ModeMismatch(format!(
            "float entry {n} in a rational document; write it as a \"p/q\" string"
        ))),
        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
    }
}

fn float_cell(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or(Error::NonFinite),
        Value::String(s) => Err(Error::ModeMismatch(format!("string entry \"{s}\" in a float document"))),
        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_document_round_trip() {
        let doc = MatrixDocument::rational("6:3/2".parse().unwrap(), Acs::standard());
        let v = doc.to_value();
        assert_eq!(v["scalar"], "rational");
        assert_eq!(v["algebra"], "6:3/2");
        assert_eq!(v["matrix"][0][3], "-1/1");
        assert_eq!(v["matrix"][0][0], "0/1");
        assert_eq!(MatrixDocument::from_value(&v).unwrap(), doc);
    }

    #[test]
    fn float_document_round_trip() {
        let mut m = Acs::<f64>::standard().into_matrix();
        m[(2, 2)] = 0.1;
        let doc = MatrixDocument::float("2".parse().unwrap(), Acs::new(m));
        let text = doc.to_json_string();
        assert!(text.contains("0.1"));
        assert_eq!(MatrixDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn mixed_modes_rejected() {
        let mut rows = vec![vec![Value::from("0/1"); 6]; 6];
        rows[1][2] = Value::from(0.5);
        let doc = serde_json::json!({"algebra": "1", "scalar": "rational", "matrix": rows});
        assert!(matches!(MatrixDocument::from_value(&doc), Err(Error::ModeMismatch(_))));
        let rows = vec![vec![Value::from("1/2"); 6]; 6];
        let doc = serde_json::json!({"algebra": "1", "scalar": "float", "matrix": rows});
        assert!(matches!(MatrixDocument::from_value(&doc), Err(Error::ModeMismatch(_))));
    }

    #[test]
    fn integers_accepted_in_rational_mode() {
        let rows = vec![vec![Value::from(0); 6]; 6];
        let doc = serde_json::json!({"algebra": "1", "scalar": "rational", "matrix": rows});
        let parsed = MatrixDocument::from_value(&doc).unwrap();
        assert_eq!(parsed.acs, AnyAcs::Rational(Acs::new(Matrix6::zero())));
    }

    #[test]
    fn malformed_documents() {
        for text in [
            r#"[]"#,
            r#"{"scalar": "rational", "matrix": []}"#,
            r#"{"algebra": "9", "scalar": "rational", "matrix": []}"#,
            r#"{"algebra": "1", "scalar": "complex", "matrix": []}"#,
            r#"{"algebra": "1", "scalar": "rational", "matrix": [[1,2,3]]}"#,
            r#"{"algebra": "4", "scalar": "rational", "matrix": []}"#,
        ] {
            assert!(MatrixDocument::parse(text).is_err(), "{text}");
        }
    }
}
