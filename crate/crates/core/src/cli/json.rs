//! JSON forms of matrices, tower elements and certificates. Every number is
//! an exact rational written as a string.

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use super::parse::{parse_rational, parse_ratfunc, ParseError};
use crate::arith::{factor, Poly, RatFunc, Rational};
use crate::diff_field::{DerivationSpec, PowerProduct, SplittingFieldDescription};
use crate::linalg::Matrix;
use crate::splitting::{Construction, SplittingCertificate};
use crate::tower::{Generator, TowerElement, WPoly};

pub const SCHEMA: &str = "diffsplit/1";

fn doc(msg: impl Into<String>) -> ParseError {
    ParseError::Document(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, ParseError> {
    v.get(key).ok_or_else(|| doc(format!("missing field '{key}'")))
}

fn str_of<'a>(v: &'a Value, what: &str) -> Result<&'a str, ParseError> {
    v.as_str().ok_or_else(|| doc(format!("{what} must be a string")))
}

fn array_of<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, ParseError> {
    v.as_array().ok_or_else(|| doc(format!("{what} must be an array")))
}

fn integer_of(v: &Value, what: &str) -> Result<BigInt, ParseError> {
    let q = match v {
        Value::String(s) => parse_rational(s)?,
        Value::Number(n) if n.is_i64() => Rational::from_integer(n.as_i64().expect("checked").into()),
        _ => return Err(doc(format!("{what} must be an integer"))),
    };
    if !q.is_integer() {
        return Err(doc(format!("{what} must be an integer")));
    }
    Ok(q.to_integer())
}

pub fn matrix_to_json(p: &Matrix<RatFunc>) -> Value {
    let entries: Vec<Vec<String>> = p.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    json!({ "n": p.rows(), "entries": entries })
}

/// `{"n": n, "entries": [[...], ...]}`, entries in the scalar grammar.
pub fn matrix_from_json(v: &Value) -> Result<Matrix<RatFunc>, ParseError> {
    let n = field(v, "n")?.as_u64().ok_or_else(|| doc("'n' must be a non-negative integer"))? as usize;
    let rows = array_of(field(v, "entries")?, "'entries'")?;
    if rows.len() != n {
        return Err(ParseError::ShapeError(format!("expected {n} rows, found {}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = array_of(row, "each row")?;
        if row.len() != n {
            return Err(ParseError::ShapeError(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
        }
        for e in row {
            data.push(match e {
                Value::String(s) => parse_ratfunc(s)?,
                Value::Number(x) if x.is_i64() => RatFunc::constant(Rational::from_integer(x.as_i64().expect("checked").into())),
                _ => return Err(doc("entries must be strings in the scalar grammar")),
            });
        }
    }
    Matrix::new(n, n, data).map_err(|e| ParseError::ShapeError(e.to_string()))
}

pub fn matrix_from_text(text: &str) -> Result<Matrix<RatFunc>, ParseError> {
    let v: Value = serde_json::from_str(text).map_err(|e| doc(e.to_string()))?;
    matrix_from_json(&v)
}

fn monic_irreducible(src: &str) -> Result<Poly, ParseError> {
    let p = parse_ratfunc(src)?
        .as_poly()
        .cloned()
        .ok_or_else(|| doc(format!("radical base '{src}' must be a polynomial")))?;
    let ok = !p.is_constant() && p.is_monic() && factor(&p).is_ok_and(|f| f.is_irreducible());
    if !ok {
        return Err(doc(format!("radical base '{src}' must be monic irreducible")));
    }
    Ok(p)
}

pub fn tower_to_json(x: &TowerElement) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(m, c)| {
            let gens: Vec<Value> = m
                .exponents()
                .iter()
                .map(|(g, e)| match g {
                    Generator::Root(p) => json!({ "root": p.to_string(), "exp": e.to_string() }),
                    Generator::Exp(a) => json!({ "exp_gen": a.to_string(), "exp": e.to_string() }),
                })
                .collect();
            let coeff: Vec<String> = c.coeffs().iter().map(ToString::to_string).collect();
            json!({ "coeff": coeff, "monomial": gens })
        })
        .collect();
    Value::Array(terms)
}

/// Rebuilds a tower element; radical bases are re-checked for irreducibility.
pub fn tower_from_json(v: &Value) -> Result<TowerElement, ParseError> {
    let mut acc = TowerElement::zero();
    for term in array_of(v, "a tower element")? {
        let coeffs = array_of(field(term, "coeff")?, "'coeff'")?
            .iter()
            .map(|c| parse_ratfunc(str_of(c, "a coefficient")?))
            .collect::<Result<Vec<_>, _>>()?;
        let mut t = TowerElement::w_poly(WPoly::new(coeffs));
        for g in array_of(field(term, "monomial")?, "'monomial'")? {
            let e = parse_rational(str_of(field(g, "exp")?, "'exp'")?)?;
            let factor = if let Some(base) = g.get("root") {
                let p = monic_irreducible(str_of(base, "'root'")?)?;
                TowerElement::root_power(&p, e).map_err(|err| doc(err.to_string()))?
            } else if let Some(a) = g.get("exp_gen") {
                let a = parse_ratfunc(str_of(a, "'exp_gen'")?)?;
                TowerElement::exp_gen(&a, &e).map_err(|err| doc(err.to_string()))?
            } else {
                return Err(doc("generator needs 'root' or 'exp_gen'"));
            };
            t = &t * &factor;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

fn power_product_to_json(v: &PowerProduct) -> Value {
    Value::Array(v.factors.iter().map(|(p, e)| json!({ "base": p.to_string(), "exp": e.to_string() })).collect())
}

fn power_product_from_json(v: &Value) -> Result<PowerProduct, ParseError> {
    let factors = array_of(v, "a power product")?
        .iter()
        .map(|f| Ok((monic_irreducible(str_of(field(f, "base")?, "'base'")?)?, integer_of(field(f, "exp")?, "'exp'")?)))
        .collect::<Result<Vec<_>, ParseError>>()?;
    Ok(PowerProduct { factors })
}

pub fn field_to_json(f: &SplittingFieldDescription) -> Value {
    let radicals: Vec<Value> = f
        .radical_gens
        .iter()
        .map(|(v, n)| json!({ "value": power_product_to_json(v), "index": n.to_string() }))
        .collect();
    let exps: Vec<String> = f.exp_gens.iter().map(ToString::to_string).collect();
    json!({
        "radical_gens": radicals,
        "exp_gens": exps,
        "has_w": f.has_w,
        "trdeg": f.trdeg,
        "degree_bound": f.degree_bound.to_string(),
    })
}

pub fn field_from_json(v: &Value) -> Result<SplittingFieldDescription, ParseError> {
    let radical_gens = array_of(field(v, "radical_gens")?, "'radical_gens'")?
        .iter()
        .map(|r| Ok((power_product_from_json(field(r, "value")?)?, integer_of(field(r, "index")?, "'index'")?)))
        .collect::<Result<Vec<_>, ParseError>>()?;
    let exp_gens = array_of(field(v, "exp_gens")?, "'exp_gens'")?
        .iter()
        .map(|a| parse_ratfunc(str_of(a, "an exp generator")?))
        .collect::<Result<Vec<_>, _>>()?;
    let has_w = field(v, "has_w")?.as_bool().ok_or_else(|| doc("'has_w' must be a boolean"))?;
    let trdeg = field(v, "trdeg")?.as_u64().ok_or_else(|| doc("'trdeg' must be a non-negative integer"))? as usize;
    let degree_bound = integer_of(field(v, "degree_bound")?, "'degree_bound'")?;
    Ok(SplittingFieldDescription { radical_gens, exp_gens, has_w, trdeg, degree_bound })
}

pub fn spec_to_json(spec: &DerivationSpec) -> Value {
    json!({ "c": spec.c().to_string(), "m": spec.m().to_string() })
}

pub fn spec_from_json(v: &Value) -> Result<DerivationSpec, ParseError> {
    let c = parse_rational(str_of(field(v, "c")?, "'c'")?)?;
    let m = integer_of(field(v, "m")?, "'m'")?;
    let m = i64::try_from(m).map_err(|_| doc("'m' out of range"))?;
    DerivationSpec::new(c, m).map_err(|e| doc(e.to_string()))
}

fn construction_from_str(s: &str) -> Result<Construction, ParseError> {
    Ok(match s {
        "ConstantDiagonalizable" => Construction::ConstantDiagonalizable,
        "DiagonalInA" => Construction::DiagonalInA,
        "UpperTriangular" => Construction::UpperTriangular,
        "GeneralRationalJordan" => Construction::GeneralRationalJordan,
        other => return Err(doc(format!("unknown construction '{other}'"))),
    })
}

pub fn certificate_to_json(cert: &SplittingCertificate) -> Value {
    let z: Vec<Vec<Value>> = cert.z.to_rows().iter().map(|r| r.iter().map(tower_to_json).collect()).collect();
    json!({
        "schema": SCHEMA,
        "kind": "certificate",
        "derivation": spec_to_json(&cert.spec),
        "p": matrix_to_json(&cert.p),
        "construction": cert.construction.to_string(),
        "field": field_to_json(&cert.field),
        "z": z,
    })
}

pub fn certificate_from_json(v: &Value) -> Result<SplittingCertificate, ParseError> {
    check_schema(v)?;
    let p = matrix_from_json(field(v, "p")?)?;
    let rows = array_of(field(v, "z")?, "'z'")?;
    if rows.len() != p.rows() {
        return Err(ParseError::ShapeError(format!("Z has {} rows, P has {}", rows.len(), p.rows())));
    }
    let mut data = Vec::new();
    for row in rows {
        let row = array_of(row, "each row of Z")?;
        if row.len() != p.rows() {
            return Err(ParseError::ShapeError("Z must be square of the size of P".into()));
        }
        for e in row {
            data.push(tower_from_json(e)?);
        }
    }
    Ok(SplittingCertificate {
        spec: spec_from_json(field(v, "derivation")?)?,
        field: field_from_json(field(v, "field")?)?,
        construction: construction_from_str(str_of(field(v, "construction")?, "'construction'")?)?,
        z: Matrix::new(p.rows(), p.rows(), data).map_err(|e| ParseError::ShapeError(e.to_string()))?,
        p,
    })
}

fn check_schema(v: &Value) -> Result<(), ParseError> {
    match v.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => Ok(()),
        Some(other) => Err(doc(format!("unsupported schema '{other}'"))),
        None => Err(doc("missing schema tag")),
    }
}

/// Wraps a report body with the schema tag and command echo.
pub fn report(command: &str, body: Map<String, Value>) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("command".into(), json!(command));
    out.extend(body);
    Value::Object(out)
}
