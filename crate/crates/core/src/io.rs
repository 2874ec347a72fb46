//! JSON formats for frames, magnitude files, vectors, and witnesses.
//!
//! Rationals are strings `"p/q"` (`q` omitted when 1); complex numbers are
//! `[re, im]` pairs of IEEE doubles, printed in shortest round-trip form.

use serde_json::{json, Map, Value};

use crate::complex::{ComplexFrame, PartitionWitness, SearchOutcome, C64};
use crate::error::{Error, Result};
use crate::frame::{Frame, MagnitudeVector};
use crate::nsp::{NspReport, NspViolation, PhaselessNspViolation};
use crate::phaseless::ArgminReport;
use crate::retrieval::{CollisionWitness, MeasurementBound, RetrievabilityReport, Verdict};
use crate::scalar::{parse_rational, Scalar};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum AnyFrame {
    Rational(Frame<Rational>),
    Complex(ComplexFrame),
}

impl AnyFrame {
    pub fn d(&self) -> usize {
        match self {
            AnyFrame::Rational(f) => f.d(),
            AnyFrame::Complex(f) => f.d(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            AnyFrame::Rational(f) => f.m(),
            AnyFrame::Complex(f) => f.m(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyFrame::Rational(f) => frame_to_json(f),
            AnyFrame::Complex(f) => complex_frame_to_json(f),
        }
    }
}

pub fn scalars_json<T: Scalar>(x: &[T]) -> Value {
    Value::Array(
        x.iter()
            .map(|v| Value::String(v.to_exact_string()))
            .collect(),
    )
}

pub fn complex_json(z: &C64) -> Value {
    json!([float_json(z.re), float_json(z.im)])
}

pub fn complex_vec_json(x: &[C64]) -> Value {
    Value::Array(x.iter().map(complex_json).collect())
}

/// Finite doubles as JSON numbers; non-finite values as strings.
pub fn float_json(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(v.to_string()))
}

pub fn frame_to_json<T: Scalar>(f: &Frame<T>) -> Value {
    json!({
        "field": "rational",
        "d": f.d(),
        "m": f.m(),
        "columns": f.columns().iter().map(|c| scalars_json(c)).collect::<Vec<_>>(),
    })
}

pub fn complex_frame_to_json(f: &ComplexFrame) -> Value {
    json!({
        "field": "complex64",
        "d": f.d(),
        "m": f.m(),
        "columns": f.columns().iter().map(|c| complex_vec_json(c)).collect::<Vec<_>>(),
    })
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Format(format!("missing key {key:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Format(format!("{what} must be an array")))
}

/// A rational from a JSON string (`"p/q"`, `"p"`, decimal) or number.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Format(format!("expected a rational, got {other}"))),
    }
}

fn rationals_from_json(v: &Value, what: &str) -> Result<Vec<Rational>> {
    as_array(v, what)?.iter().map(rational_from_json).collect()
}

fn float_from_json(v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Format(format!("expected a number, got {v}")))
}

fn complex_from_json(v: &Value) -> Result<C64> {
    match v {
        Value::Array(p) if p.len() == 2 => {
            Ok(C64::new(float_from_json(&p[0])?, float_from_json(&p[1])?))
        }
        Value::Number(_) => Ok(C64::new(float_from_json(v)?, 0.0)),
        other => Err(Error::Format(format!("expected [re, im], got {other}"))),
    }
}

fn check_size(obj: &Map<String, Value>, key: &str, actual: usize) -> Result<()> {
    if let Some(v) = obj.get(key) {
        let declared = v
            .as_u64()
            .ok_or_else(|| Error::Format(format!("{key} must be a nonnegative integer")))?;
        if declared as usize != actual {
            return Err(Error::Format(format!(
                "{key} = {declared} but the data has {actual}"
            )));
        }
    }
    Ok(())
}

pub fn parse_frame(text: &str) -> Result<AnyFrame> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    frame_from_json(&v)
}

pub fn frame_from_json(v: &Value) -> Result<AnyFrame> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Format("frame file must be a JSON object".into()))?;
    let kind = field(obj, "field")?
        .as_str()
        .ok_or_else(|| Error::Format("field must be a string".into()))?;
    let cols = as_array(field(obj, "columns")?, "columns")?;
    let frame = match kind {
        "rational" => {
            let columns = cols
                .iter()
                .map(|c| rationals_from_json(c, "column"))
                .collect::<Result<Vec<_>>>()?;
            let d = obj
                .get("d")
                .and_then(Value::as_u64)
                .map(|d| d as usize)
                .or_else(|| columns.first().map(Vec::len))
                .unwrap_or(0);
            AnyFrame::Rational(Frame::new(d, columns)?)
        }
        "complex64" => {
            let columns = cols
                .iter()
                .map(|c| {
                    as_array(c, "column")?
                        .iter()
                        .map(complex_from_json)
                        .collect()
                })
                .collect::<Result<Vec<Vec<C64>>>>()?;
            let d = obj
                .get("d")
                .and_then(Value::as_u64)
                .map(|d| d as usize)
                .or_else(|| columns.first().map(Vec::len))
                .unwrap_or(0);
            AnyFrame::Complex(ComplexFrame::new(d, columns)?)
        }
        other => return Err(Error::Format(format!("unknown field {other:?}"))),
    };
    check_size(obj, "d", frame.d())?;
    check_size(obj, "m", frame.m())?;
    Ok(frame)
}

/// `{"b": [...]}` or a bare array.
pub fn parse_magnitudes(text: &str) -> Result<MagnitudeVector<Rational>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let arr = match &v {
        Value::Object(o) => field(o, "b")?,
        other => other,
    };
    MagnitudeVector::new(rationals_from_json(arr, "b")?)
}

pub fn magnitudes_to_json<T: Scalar>(b: &MagnitudeVector<T>) -> Value {
    json!({ "b": scalars_json(b.as_slice()) })
}

/// A vector literal: a JSON array of numbers or rational strings, or a
/// comma-separated list such as `1, -1/2, 0`, optionally in brackets.
pub fn parse_rational_vector(text: &str) -> Result<Vec<Rational>> {
    let t = text.trim();
    if let Ok(v) = serde_json::from_str::<Value>(t) {
        if v.is_array() {
            return rationals_from_json(&v, "vector");
        }
    }
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(t);
    inner.split(',').map(parse_rational).collect()
}

pub fn collision_json<T: Scalar>(w: &CollisionWitness<T>) -> Value {
    json!({
        "kind": "collision",
        "x": scalars_json(&w.x),
        "y": scalars_json(&w.y),
        "k": w.sparsity_bound,
        "validated": true,
    })
}

pub fn retrievability_json<T: Scalar>(r: &RetrievabilityReport<T>) -> Value {
    json!({
        "verdict": match r.verdict {
            Verdict::Retrievable => "retrievable",
            Verdict::NotRetrievable => "not_retrievable",
        },
        "witness": r.witness.as_ref().map(collision_json),
        "failing_split": r.failing_split,
        "failing_supports": r.failing_supports.as_ref().map(|(i, j)| json!([i, j])),
        "trace": {
            "splits": r.trace.splits,
            "support_pairs": r.trace.support_pairs,
            "examined": r.trace.examined,
            "total": r.trace.total,
        },
    })
}

pub fn bound_json(b: &MeasurementBound) -> Value {
    json!({
        "k": b.k,
        "d": b.d,
        "field": match b.field {
            crate::retrieval::FieldKind::Real => "real",
            crate::retrieval::FieldKind::Complex => "complex",
        },
        "bound": b.bound,
        "status": b.status.tag(),
    })
}

pub fn argmin_json<T: Scalar>(r: &ArgminReport<T>) -> Value {
    json!({
        "optimal_value": r.optimal_value.as_ref().map_or(Value::String("infeasible".into()), |v| Value::String(v.to_exact_string())),
        "minimizers": r.minimizer_classes.iter().map(|c| scalars_json(c.as_slice())).collect::<Vec<_>>(),
        "nonpoint_faces": r.nonpoint_faces.iter().map(|f| json!({
            "eps": f.pattern.to_string(),
            "dimension": f.dimension,
            "vertex": scalars_json(&f.vertex),
        })).collect::<Vec<_>>(),
        "unique": r.is_unique(),
        "per_epsilon": r.per_epsilon.iter().map(|(e, v)| json!({
            "eps": e.to_string(),
            "value": v.as_ref().map_or(Value::String("infeasible".into()), |v| Value::String(v.to_exact_string())),
        })).collect::<Vec<_>>(),
    })
}

pub fn nsp_violation_json<T: Scalar>(w: &NspViolation<T>) -> Value {
    json!({
        "kind": "nsp",
        "T": w.support,
        "eta": scalars_json(&w.eta),
        "margin": w.margin.to_exact_string(),
    })
}

pub fn phaseless_violation_json<T: Scalar>(w: &PhaselessNspViolation<T>) -> Value {
    json!({
        "kind": "phaseless-nsp",
        "S": w.split,
        "T": w.support,
        "u": scalars_json(&w.u),
        "v": scalars_json(&w.v),
        "margin": w.margin.to_exact_string(),
        "policy": w.policy.scope.name(),
    })
}

pub fn nsp_report_json<V>(r: &NspReport<V>, witness: impl Fn(&V) -> Value) -> Value {
    json!({
        "verdict": if r.holds() { "holds" } else { "fails" },
        "witness": r.violation.as_ref().map(witness),
        "cells": { "examined": r.examined, "total": r.total },
    })
}

pub fn partition_witness_json(w: &PartitionWitness) -> Value {
    json!({
        "kind": "partition",
        "partition": w.partition,
        "c": complex_vec_json(&w.c),
        "eta1": complex_vec_json(&w.eta1),
        "y0": complex_vec_json(&w.y0),
        "margin": float_json(w.margin),
        "residual": float_json(w.residual),
        "inconclusive": false,
    })
}

pub fn search_json(o: &SearchOutcome) -> Value {
    json!({
        "verdict": if o.inconclusive() { "inconclusive" } else { "fails" },
        "inconclusive": o.inconclusive(),
        "witness": o.witness.as_ref().map(partition_witness_json),
        "stats": {
            "proposals": o.stats.proposals,
            "candidates": o.stats.candidates,
            "max_identity_discrepancy": float_json(o.stats.max_identity_discrepancy),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::random_complex_frame;
    use crate::frame::random_frame_scaled;

    #[test]
    fn rational_frame_round_trip() {
        let f: Frame<Rational> = random_frame_scaled(3, 4, 9, 1000, 7).unwrap();
        let text = serde_json::to_string(&frame_to_json(&f)).unwrap();
        assert_eq!(parse_frame(&text).unwrap(), AnyFrame::Rational(f));
    }

    #[test]
    fn complex_frame_round_trip() {
        let f = random_complex_frame(3, 5, 2).unwrap();
        let text = serde_json::to_string(&complex_frame_to_json(&f)).unwrap();
        assert_eq!(parse_frame(&text).unwrap(), AnyFrame::Complex(f));
    }

    #[test]
    fn frame_errors() {
        assert!(parse_frame("{}").is_err());
        assert!(parse_frame(r#"{"field":"rational","columns":[["1","2"],["3"]]}"#).is_err());
        assert!(parse_frame(r#"{"field":"rational","d":3,"columns":[["1","2"]]}"#).is_err());
        assert!(parse_frame(r#"{"field":"quaternion","columns":[["1"]]}"#).is_err());
        assert!(parse_frame(r#"{"field":"rational","columns":[]}"#).is_err());
        let ok = parse_frame(r#"{"field":"rational","columns":[[1, "1/2"]]}"#).unwrap();
        assert_eq!(ok.d(), 2);
    }

    #[test]
    fn literals() {
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(
            parse_rational_vector("[1, \"-1/2\", 0]").unwrap(),
            vec![Rational::from_int(1), -half.clone(), Rational::from_int(0)]
        );
        assert_eq!(
            parse_rational_vector("0.5,2").unwrap(),
            vec![half.clone(), Rational::from_int(2)]
        );
        assert!(parse_rational_vector("[1, true]").is_err());
        assert_eq!(
            parse_rational_vector("[1,-1/2]").unwrap(),
            vec![Rational::from_int(1), -half.clone()]
        );
        assert_eq!(parse_magnitudes(r#"{"b":["1","0"]}"#).unwrap().len(), 2);
        assert!(parse_magnitudes(r#"{"b":["-1"]}"#).is_err());
    }
}
