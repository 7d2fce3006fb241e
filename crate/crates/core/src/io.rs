//! JSON interchange for models: `{n, m, edges: [[x, y, w], …], kill}`.
//!
//! Weights are written as decimal strings using the shortest representation
//! that parses back to the same value, so a write/read cycle is exact. On
//! input, plain JSON numbers are accepted as well.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::forms::DiscreteModel;
use crate::scalar::Scalar;

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    n: usize,
    m: Vec<Value>,
    edges: Vec<(usize, usize, Value)>,
    kill: Vec<Value>,
}

fn parse_weight<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<T>()
            .map_err(|_| Error::Parse(format!("not a decimal weight: {s:?}"))),
        Value::Number(x) => x
            .as_f64()
            .map(T::lit)
            .ok_or_else(|| Error::Parse(format!("not a finite number: {x}"))),
        other => Err(Error::Parse(format!(
            "weight must be a string or number, got {other}"
        ))),
    }
}

fn parse_all<T: Scalar>(vs: &[Value]) -> Result<Vec<T>> {
    vs.iter().map(parse_weight).collect()
}

pub fn model_to_json<T: Scalar>(model: &DiscreteModel<T>) -> Value {
    let s = |x: &T| Value::String(x.to_string());
    let doc = ModelDoc {
        n: model.n_states(),
        m: model.measure().iter().map(s).collect(),
        edges: model
            .edges()
            .into_iter()
            .map(|(x, y, w)| (x, y, Value::String(w.to_string())))
            .collect(),
        kill: model.kill().iter().map(s).collect(),
    };
    serde_json::to_value(doc).expect("model document serializes")
}

pub fn model_to_string<T: Scalar>(model: &DiscreteModel<T>) -> String {
    serde_json::to_string_pretty(&model_to_json(model)).expect("model document serializes")
}

pub fn model_from_json<T: Scalar>(value: &Value) -> Result<DiscreteModel<T>> {
    let doc: ModelDoc =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.m.len() != doc.n {
        return Err(Error::DimensionMismatch {
            expected: doc.n,
            got: doc.m.len(),
        });
    }
    let m = parse_all(&doc.m)?;
    let kill = parse_all(&doc.kill)?;
    let edges = doc
        .edges
        .iter()
        .map(|(x, y, w)| parse_weight(w).map(|w| (*x, *y, w)))
        .collect::<Result<Vec<_>>>()?;
    DiscreteModel::from_edges(m, &edges, kill)
}

pub fn model_from_str<T: Scalar>(text: &str) -> Result<DiscreteModel<T>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    model_from_json(&value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let model = DiscreteModel::from_edges(
            vec![0.1, 1.0 / 3.0, 2.5e-17],
            &[(0, 1, std::f64::consts::PI), (1, 2, 1e300)],
            vec![0.0, 0.7, 1.0 / 7.0],
        )
        .unwrap();
        let text = model_to_string(&model);
        let back: DiscreteModel<f64> = model_from_str(&text).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn accepts_numbers_and_rejects_garbage() {
        let ok = r#"{"n":2,"m":[1,1],"edges":[[0,1,"2.5"]],"kill":[0,1]}"#;
        let model: DiscreteModel<f64> = model_from_str(ok).unwrap();
        assert_eq!(model.jump()[(1, 0)], 2.5);
        let bad = r#"{"n":2,"m":[1,1],"edges":[[0,1,"two"]],"kill":[0,1]}"#;
        assert!(matches!(model_from_str::<f64>(bad), Err(Error::Parse(_))));
        let short = r#"{"n":3,"m":[1,1],"edges":[[0,1,"1"]],"kill":[0,1]}"#;
        assert!(model_from_str::<f64>(short).is_err());
    }
}
