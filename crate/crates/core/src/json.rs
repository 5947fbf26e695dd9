//! JSON encodings for every artifact, shared with the command-line tool.
//!
//! All encodings are deterministic: objects serialize with sorted keys
//! (serde_json's default map is ordered), coefficients are little-endian
//! lists of plain integers, and re-encoding a decoded artifact is
//! byte-identical.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::condense::CondensationSetup;
use crate::dynamics::{CheckResult, LiftDatum, LiftDatumReport, StableNoninvertible};
use crate::formal_group::{FormalGroup, FrobeniusSeries, GroupAxiomReport};
use crate::semiconj::{SemiConjReport, SemiConjTriple};
use crate::series::{BiSeries, LogSeries, NewtonPolygon, Series};
use crate::zq::{Ring, ZqElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
    #[error("{path}: {message}")]
    Value { path: String, message: String },
}

impl JsonError {
    fn shape(path: &str, message: impl Into<String>) -> JsonError {
        JsonError::Shape {
            path: path.to_string(),
            message: message.into(),
        }
    }

    fn value(path: &str, message: impl Into<String>) -> JsonError {
        JsonError::Value {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// primitives
// ---------------------------------------------------------------------------

fn biguint_to_value(n: &BigUint) -> Value {
    let as_u128 = u128::try_from(n).expect("ring bounds coefficients to 127 bits");
    json!(as_u128)
}

fn value_to_bigint(v: &Value, path: &str) -> Result<BigInt, JsonError> {
    let n = v
        .as_number()
        .ok_or_else(|| JsonError::shape(path, "expected an integer"))?;
    let text = n.to_string();
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(JsonError::value(path, "expected an integer, got a float"));
    }
    text.parse::<BigInt>()
        .map_err(|e| JsonError::value(path, format!("bad integer: {e}")))
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v Value, JsonError> {
    obj.get(key)
        .ok_or_else(|| JsonError::shape(path, format!("missing field \"{key}\"")))
}

fn as_object<'v>(v: &'v Value, path: &str) -> Result<&'v Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or_else(|| JsonError::shape(path, "expected an object"))
}

fn as_array<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>, JsonError> {
    v.as_array()
        .ok_or_else(|| JsonError::shape(path, "expected an array"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, JsonError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| JsonError::shape(path, "expected a nonnegative integer"))
}

// ---------------------------------------------------------------------------
// rings and elements
// ---------------------------------------------------------------------------

fn ring_fields(ring: &Ring, obj: &mut Map<String, Value>) {
    obj.insert("p".into(), json!(ring.p()));
    obj.insert("f".into(), json!(ring.degree()));
    obj.insert("precN".into(), json!(ring.precision()));
    obj.insert(
        "modulus".into(),
        Value::Array(ring.modulus().iter().map(biguint_to_value).collect()),
    );
}

pub fn ring_to_value(ring: &Ring) -> Value {
    let mut obj = Map::new();
    ring_fields(ring, &mut obj);
    Value::Object(obj)
}

pub fn ring_from_value(v: &Value, path: &str) -> Result<Ring, JsonError> {
    let obj = as_object(v, path)?;
    let p = field(obj, "p", path)?
        .as_u64()
        .ok_or_else(|| JsonError::shape(path, "p must be an integer"))?;
    let f = as_usize(field(obj, "f", path)?, path)?;
    let prec = field(obj, "precN", path)?
        .as_u64()
        .ok_or_else(|| JsonError::shape(path, "precN must be an integer"))? as u32;
    let modulus_vals = as_array(field(obj, "modulus", path)?, path)?;
    let mut modulus = Vec::with_capacity(modulus_vals.len());
    for (i, m) in modulus_vals.iter().enumerate() {
        let big = value_to_bigint(m, &format!("{path}.modulus[{i}]"))?;
        let as_i64 = i64::try_from(&big)
            .map_err(|_| JsonError::value(path, "modulus coefficient out of range"))?;
        modulus.push(as_i64);
    }
    Ring::new(p, f, &modulus, prec).map_err(|e| JsonError::value(path, e.to_string()))
}

fn coeffs_to_value(x: &ZqElement) -> Value {
    Value::Array(x.coeffs().iter().map(biguint_to_value).collect())
}

fn coeffs_from_value(ring: &Ring, v: &Value, path: &str) -> Result<ZqElement, JsonError> {
    let arr = as_array(v, path)?;
    if arr.len() != ring.degree() {
        return Err(JsonError::value(
            path,
            format!("expected {} coefficients, got {}", ring.degree(), arr.len()),
        ));
    }
    let mut coeffs = Vec::with_capacity(arr.len());
    for (i, c) in arr.iter().enumerate() {
        let big = value_to_bigint(c, &format!("{path}[{i}]"))?;
        coeffs.push(reduce_bigint(ring, &big));
    }
    Ok(ring.element_from_biguints(&coeffs))
}

fn reduce_bigint(ring: &Ring, n: &BigInt) -> BigUint {
    let p_pow = BigInt::from_biguint(Sign::Plus, ring.p_pow().clone());
    let mut reduced = n % &p_pow;
    if reduced.sign() == Sign::Minus {
        reduced += &p_pow;
    }
    reduced.to_biguint().expect("nonnegative after reduction")
}

/// {"p":..,"f":..,"precN":..,"modulus":[..],"coeffs":[..]}
pub fn zq_to_value(x: &ZqElement) -> Value {
    let mut obj = Map::new();
    ring_fields(x.ring(), &mut obj);
    obj.insert("coeffs".into(), coeffs_to_value(x));
    Value::Object(obj)
}

pub fn zq_from_value(v: &Value, path: &str) -> Result<ZqElement, JsonError> {
    let obj = as_object(v, path)?;
    let ring = ring_from_value(v, path)?;
    coeffs_from_value(&ring, field(obj, "coeffs", path)?, &format!("{path}.coeffs"))
}

// ---------------------------------------------------------------------------
// series
// ---------------------------------------------------------------------------

/// {"ring":<RingSpec>,"precT":M,"coeffs":[[..],[..],..]}
pub fn series_to_value(s: &Series) -> Value {
    json!({
        "ring": ring_to_value(s.ring()),
        "precT": s.prec_t(),
        "coeffs": Value::Array(s.coeffs().iter().map(coeffs_to_value).collect::<Vec<_>>()),
    })
}

pub fn series_from_value(v: &Value, path: &str) -> Result<Series, JsonError> {
    let obj = as_object(v, path)?;
    let ring = ring_from_value(field(obj, "ring", path)?, &format!("{path}.ring"))?;
    series_from_parts(&ring, obj, path)
}

/// Series whose ring is supplied externally (payloads that share one ring).
pub fn series_from_value_in(ring: &Ring, v: &Value, path: &str) -> Result<Series, JsonError> {
    let obj = as_object(v, path)?;
    if let Some(ring_val) = obj.get("ring") {
        let declared = ring_from_value(ring_val, &format!("{path}.ring"))?;
        if &declared != ring {
            return Err(JsonError::value(
                path,
                "series declares a ring different from the ambient one",
            ));
        }
    }
    series_from_parts(ring, obj, path)
}

fn series_from_parts(
    ring: &Ring,
    obj: &Map<String, Value>,
    path: &str,
) -> Result<Series, JsonError> {
    let prec_t = as_usize(field(obj, "precT", path)?, path)?;
    let arr = as_array(field(obj, "coeffs", path)?, path)?;
    if arr.len() != prec_t {
        return Err(JsonError::value(
            path,
            format!("precT = {prec_t} but {} coefficients present", arr.len()),
        ));
    }
    if prec_t == 0 {
        return Err(JsonError::value(path, "precT must be at least 1"));
    }
    let mut coeffs = Vec::with_capacity(arr.len());
    for (k, c) in arr.iter().enumerate() {
        coeffs.push(coeffs_from_value(ring, c, &format!("{path}.coeffs[{k}]"))?);
    }
    Ok(Series::new(ring, coeffs))
}

/// {"ring":<RingSpec>,"precD":M,"triangle":[[row0],[row1],..]}
pub fn biseries_to_value(s: &BiSeries) -> Value {
    let triangle: Vec<Value> = (0..s.prec_d())
        .map(|d| Value::Array(s.row(d).iter().map(coeffs_to_value).collect()))
        .collect();
    json!({
        "ring": ring_to_value(s.ring()),
        "precD": s.prec_d(),
        "triangle": Value::Array(triangle),
    })
}

pub fn biseries_from_value(v: &Value, path: &str) -> Result<BiSeries, JsonError> {
    let obj = as_object(v, path)?;
    let ring = ring_from_value(field(obj, "ring", path)?, &format!("{path}.ring"))?;
    let prec_d = as_usize(field(obj, "precD", path)?, path)?;
    let triangle = as_array(field(obj, "triangle", path)?, path)?;
    if triangle.len() != prec_d || prec_d == 0 {
        return Err(JsonError::value(
            path,
            format!("precD = {prec_d} but {} rows present", triangle.len()),
        ));
    }
    let mut out = BiSeries::zero(&ring, prec_d);
    for (d, row_val) in triangle.iter().enumerate() {
        let row_path = format!("{path}.triangle[{d}]");
        let row = as_array(row_val, &row_path)?;
        if row.len() != d + 1 {
            return Err(JsonError::value(
                &row_path,
                format!("row {d} must have {} entries", d + 1),
            ));
        }
        for (i, c) in row.iter().enumerate() {
            let coeff = coeffs_from_value(&ring, c, &format!("{row_path}[{i}]"))?;
            out.set_coeff(i, d - i, coeff);
        }
    }
    Ok(out)
}

/// {"ring":..,"precT":..,"effPrec":..,"coeffs":[{"denomExp":..,"unit":[..]},..]}
pub fn logseries_to_value(s: &LogSeries, eff_prec: u32, stop_index: usize) -> Value {
    let coeffs: Vec<Value> = s
        .coeffs()
        .iter()
        .map(|c| {
            json!({
                "denomExp": c.denom_exp,
                "unit": coeffs_to_value(&c.unit),
            })
        })
        .collect();
    json!({
        "ring": ring_to_value(s.ring()),
        "precT": s.prec_t(),
        "effPrec": eff_prec,
        "stopIndex": stop_index,
        "coeffs": Value::Array(coeffs),
    })
}

pub fn polygon_to_value(p: &NewtonPolygon) -> Value {
    let vertices: Vec<Value> = p
        .vertices
        .iter()
        .map(|&(d, v)| json!([d, v]))
        .collect();
    let segments: Vec<Value> = p
        .segments
        .iter()
        .map(|s| {
            json!({
                "slope": [s.slope.num(), s.slope.den()],
                "length": s.length,
            })
        })
        .collect();
    json!({
        "vertices": Value::Array(vertices),
        "segments": Value::Array(segments),
        "provisional": p.provisional,
    })
}

// ---------------------------------------------------------------------------
// formal groups, lift data, condensations, semi-conjugacies
// ---------------------------------------------------------------------------

/// {"series":<Series>,"pi":[..],"q":..,"twist":..}
pub fn frobenius_to_value(f: &FrobeniusSeries) -> Value {
    json!({
        "series": series_to_value(f.series()),
        "pi": coeffs_to_value(f.pi()),
        "q": u128::try_from(f.q()).expect("q fits the coefficient bound"),
        "twist": f.twist(),
    })
}

pub fn frobenius_from_value(v: &Value, path: &str) -> Result<FrobeniusSeries, JsonError> {
    let obj = as_object(v, path)?;
    let series = series_from_value(field(obj, "series", path)?, &format!("{path}.series"))?;
    let twist = as_usize(field(obj, "twist", path)?, path)?;
    let frob = FrobeniusSeries::new(series, twist)
        .map_err(|e| JsonError::value(path, e.to_string()))?;
    if let Some(q) = obj.get("q") {
        let declared = value_to_bigint(q, &format!("{path}.q"))?;
        let actual = BigInt::from_biguint(Sign::Plus, frob.q().clone());
        if declared != actual {
            return Err(JsonError::value(path, "declared q disagrees with p^(f/twist)"));
        }
    }
    Ok(frob)
}

/// {"frob":..,"law":..,"endos":{label:<Series>}} with the currently
/// memoized endomorphisms.
pub fn formal_group_to_value(g: &FormalGroup, endos: &BTreeMap<String, Series>) -> Value {
    let endo_obj: Map<String, Value> = endos
        .iter()
        .map(|(k, s)| (k.clone(), series_to_value(s)))
        .collect();
    json!({
        "frob": frobenius_to_value(g.frobenius_series()),
        "law": biseries_to_value(g.law()),
        "endos": Value::Object(endo_obj),
    })
}

pub fn axiom_report_to_value(r: &GroupAxiomReport) -> Value {
    json!({
        "commutative": r.commutative,
        "associative": r.associative,
        "unital": r.unital,
        "residualValuations": {
            "commutative": r.commutative_residual_valuation,
            "associative": r.associative_residual_valuation,
            "unital": r.unital_residual_valuation,
        },
        "firstFailure": r.first_failure.as_ref().map(|(axiom, d, i)| json!([axiom, d, i])),
    })
}

/// {"P":<Series>,"members":{label:<Series>},"table":{"a,b":"c"}}
pub fn lift_datum_to_value(d: &LiftDatum) -> Value {
    let members: Map<String, Value> = d
        .members()
        .iter()
        .map(|(k, s)| (k.clone(), series_to_value(s)))
        .collect();
    let table: Map<String, Value> = d
        .table()
        .iter()
        .map(|((a, b), c)| (format!("{a},{b}"), json!(c)))
        .collect();
    json!({
        "P": series_to_value(d.p_series().series()),
        "members": Value::Object(members),
        "table": Value::Object(table),
    })
}

pub fn lift_datum_from_value(v: &Value, path: &str) -> Result<LiftDatum, JsonError> {
    let obj = as_object(v, path)?;
    let p_series = series_from_value(field(obj, "P", path)?, &format!("{path}.P"))?;
    let ring = p_series.ring().clone();
    let stable = StableNoninvertible::new(p_series)
        .map_err(|e| JsonError::value(&format!("{path}.P"), e.to_string()))?;
    let members_obj = as_object(field(obj, "members", path)?, &format!("{path}.members"))?;
    let mut members = BTreeMap::new();
    for (label, s) in members_obj {
        let member_path = format!("{path}.members.{label}");
        members.insert(
            label.clone(),
            series_from_value_in(&ring, s, &member_path)?,
        );
    }
    let mut table = BTreeMap::new();
    if let Some(table_val) = obj.get("table") {
        let table_obj = as_object(table_val, &format!("{path}.table"))?;
        for (pair, target) in table_obj {
            let entry_path = format!("{path}.table.{pair}");
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| JsonError::shape(&entry_path, "key must be \"a,b\""))?;
            let c = target
                .as_str()
                .ok_or_else(|| JsonError::shape(&entry_path, "value must be a label string"))?;
            table.insert((a.trim().to_string(), b.trim().to_string()), c.to_string());
        }
    }
    LiftDatum::new(stable, members, table).map_err(|e| JsonError::value(path, e.to_string()))
}

pub fn check_result_to_value(c: &CheckResult) -> Value {
    json!({
        "ok": c.ok,
        "firstFailingDegree": c.first_failing_degree,
    })
}

pub fn lift_report_to_value(r: &LiftDatumReport) -> Value {
    let commutes: Map<String, Value> = r
        .commutes_with_p
        .iter()
        .map(|(k, c)| (k.clone(), check_result_to_value(c)))
        .collect();
    let table: Map<String, Value> = r
        .table_respected
        .iter()
        .map(|((a, b), c)| (format!("{a},{b}"), check_result_to_value(c)))
        .collect();
    let eta: Map<String, Value> = r
        .eta
        .iter()
        .map(|(k, e)| (k.clone(), coeffs_to_value(e)))
        .collect();
    json!({
        "allOk": r.all_ok(),
        "commutesWithP": Value::Object(commutes),
        "tableRespected": Value::Object(table),
        "etaValues": Value::Object(eta),
    })
}

/// {"group":<FormalGroup>,"W":[[..],..],"R":<Series>,"gamma":{label:<Series>}}
pub fn condensation_to_value(
    setup: &CondensationSetup,
    gammas: &BTreeMap<String, Series>,
) -> Value {
    let w: Vec<Value> = setup.w_units().iter().map(coeffs_to_value).collect();
    let gamma_obj: Map<String, Value> = gammas
        .iter()
        .map(|(k, s)| (k.clone(), series_to_value(s)))
        .collect();
    json!({
        "group": formal_group_to_value(setup.group(), &BTreeMap::new()),
        "W": Value::Array(w),
        "R": series_to_value(setup.r_series()),
        "gamma": Value::Object(gamma_obj),
    })
}

/// {"F":<Series>,"G":<Series>,"h":<Series>,"twist":k}
pub fn semiconj_triple_to_value(t: &SemiConjTriple, twist: usize) -> Value {
    json!({
        "F": series_to_value(t.f()),
        "G": series_to_value(t.g()),
        "h": series_to_value(t.h()),
        "twist": twist,
    })
}

pub fn semiconj_triple_from_value(
    v: &Value,
    path: &str,
) -> Result<(SemiConjTriple, usize), JsonError> {
    let obj = as_object(v, path)?;
    let f = series_from_value(field(obj, "F", path)?, &format!("{path}.F"))?;
    let ring = f.ring().clone();
    let g = series_from_value_in(&ring, field(obj, "G", path)?, &format!("{path}.G"))?;
    let h = series_from_value_in(&ring, field(obj, "h", path)?, &format!("{path}.h"))?;
    let twist = match obj.get("twist") {
        Some(t) => as_usize(t, &format!("{path}.twist"))?,
        None => 0,
    };
    let triple =
        SemiConjTriple::new(f, g, h).map_err(|e| JsonError::value(path, e.to_string()))?;
    Ok((triple, twist))
}

pub fn semiconj_report_to_value(r: &SemiConjReport) -> Value {
    json!({
        "holds": r.holds,
        "firstFailingDegree": r.first_failing_degree,
        "wdegLhs": r.wdeg_lhs,
        "wdegRhs": r.wdeg_rhs,
    })
}

/// Render any value deterministically (sorted keys are the map default).
pub fn to_string_sorted(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("value serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zq_roundtrip_matches_spec_shape() {
        let ring = Ring::new(3, 2, &[1, 0, 1], 8).unwrap();
        let x = ring.element(&[4, 7]);
        let v = zq_to_value(&x);
        let expected: Value = serde_json::from_str(
            r#"{"p":3,"f":2,"precN":8,"modulus":[1,0,1],"coeffs":[4,7]}"#,
        )
        .unwrap();
        assert_eq!(v, expected);
        let back = zq_from_value(&v, "$").unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn series_roundtrip_is_byte_identical() {
        let ring = Ring::unramified(5, 1, 6).unwrap();
        let s = Series::from_integers(&ring, &[0, 2, 0, 7, 1], 8);
        let v = series_to_value(&s);
        let text = to_string_sorted(&v);
        let reparsed: Value = serde_json::from_str(&text).unwrap();
        let back = series_from_value(&reparsed, "$").unwrap();
        assert_eq!(back, s);
        assert_eq!(to_string_sorted(&series_to_value(&back)), text);
    }

    #[test]
    fn biseries_roundtrip() {
        let ring = Ring::unramified(3, 1, 5).unwrap();
        let mut s = BiSeries::x_plus_y(&ring, 5);
        s.set_coeff(1, 1, ring.integer(7));
        s.set_coeff(2, 1, ring.integer(4));
        let v = biseries_to_value(&s);
        let back = biseries_from_value(&v, "$").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn shape_errors_carry_paths() {
        let bad: Value = serde_json::from_str(r#"{"p":4,"f":1,"precN":3,"modulus":[0,1]}"#).unwrap();
        let err = ring_from_value(&bad, "$.ring").unwrap_err();
        assert!(err.to_string().contains("$.ring"));
        assert!(err.to_string().contains("not prime"));
    }

    #[test]
    fn ambient_ring_mismatch_is_rejected() {
        let ring = Ring::unramified(5, 1, 3).unwrap();
        let v: Value = serde_json::from_str(
            r#"{"ring":{"p":7,"f":1,"precN":3,"modulus":[0,1]},"precT":1,"coeffs":[[0]]}"#,
        )
        .unwrap();
        let err = series_from_value_in(&ring, &v, "$.members.g").unwrap_err();
        assert!(err.to_string().contains("$.members.g"));
        assert!(err.to_string().contains("different"));
    }

    #[test]
    fn negative_coefficients_reduce_into_the_ring() {
        let ring = Ring::unramified(5, 1, 3).unwrap();
        let v: Value = serde_json::from_str(
            r#"{"ring":{"p":5,"f":1,"precN":3,"modulus":[0,1]},"precT":2,"coeffs":[[0],[-1]]}"#,
        )
        .unwrap();
        let s = series_from_value(&v, "$").unwrap();
        assert_eq!(*s.coeff(1), ring.integer(-1));
        assert_eq!(s.coeff(1).coeffs()[0], BigUint::from(124u32));
    }
}
