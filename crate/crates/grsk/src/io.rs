//! JSON file formats.
//!
//! A matrix is an array of rows. Entries are JSON numbers or strings holding
//! an integer, a fraction `p/q` or a decimal; all are read as exact rationals.
//! Output entries are strings in lowest terms. A triangular array lists rows
//! `2..=n`, row `i` holding `w_i1 … w_{i,i-1}`. A pattern pair is
//! `{"p": rows, "q": rows}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use crate::error::{GrskError, Result};
use crate::exact_numerics::{format_rational, parse_rational, PosRational};
use crate::grsk_core::{PatternPair, WeightMatrix};
use crate::grsk_symmetric::SymmetricWeightMatrix;
use crate::grsk_triangular::TriangularArray;

/// Integer, `p/q`, or decimal with optional exponent, read exactly.
pub fn parse_exact(s: &str) -> Result<PosRational> {
    let s = s.trim();
    if !s.contains(['.', 'e', 'E']) {
        return parse_rational(s);
    }
    let bad = || GrskError::Parse(format!("not a number: {s:?}"));
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow::pow(ten, shift.unsigned_abs() as usize);
    let v = BigRational::from_integer(digits);
    Ok(if shift >= 0 { v * scale } else { v / scale })
}

fn entry(v: &Value) -> Result<PosRational> {
    match v {
        Value::Number(n) => parse_exact(&n.to_string()),
        Value::String(s) => parse_exact(s),
        _ => Err(GrskError::Parse(format!("matrix entry must be a number or string, got {v}"))),
    }
}

fn rows_of(v: &Value) -> Result<Vec<Vec<PosRational>>> {
    let rows = v.as_array().ok_or_else(|| GrskError::Parse("expected an array of rows".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| GrskError::Parse(format!("row must be an array, got {r}")))?
                .iter()
                .map(entry)
                .collect()
        })
        .collect()
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| GrskError::Parse(e.to_string()))
}

fn rows_json(rows: &[Vec<PosRational>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(format_rational(x))).collect()))
            .collect(),
    )
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn read_matrix(text: &str) -> Result<WeightMatrix<PosRational>> {
    let rows = rows_of(&parse_json(text)?)?;
    WeightMatrix::from_rows(rows).map_err(|e| GrskError::Parse(e.to_string()))
}

pub fn write_matrix(w: &WeightMatrix<PosRational>) -> String {
    render(&rows_json(&w.to_rows()))
}

/// A full square matrix; it must be symmetric.
pub fn read_symmetric(text: &str) -> Result<SymmetricWeightMatrix<PosRational>> {
    let w = read_matrix(text)?;
    if w.rows() != w.cols() || w != w.transpose() {
        return Err(GrskError::Parse("symmetric input must be a symmetric square matrix".into()));
    }
    SymmetricWeightMatrix::from_full_upper(&w)
}

pub fn write_symmetric(w: &SymmetricWeightMatrix<PosRational>) -> String {
    write_matrix(&w.to_full())
}

pub fn read_triangular(text: &str) -> Result<TriangularArray<PosRational>> {
    TriangularArray::from_rows(rows_of(&parse_json(text)?)?).map_err(|e| GrskError::Parse(e.to_string()))
}

pub fn write_triangular(w: &TriangularArray<PosRational>) -> String {
    render(&rows_json(w.rows()))
}

pub fn write_pattern_pair(pq: &PatternPair<PosRational>) -> String {
    let mut m = serde_json::Map::new();
    m.insert("p".into(), rows_json(pq.p.rows()));
    m.insert("q".into(), rows_json(pq.q.rows()));
    render(&Value::Object(m))
}
