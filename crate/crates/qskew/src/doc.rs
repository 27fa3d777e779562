//! Bit-exact JSON serialization for elements, torus elements,
//! presentations, derivation specifications, and decomposition results.
//!
//! Coefficients are stored as numerator/denominator Laurent polynomials
//! in `q`, each a list of `[q_exponent, "rational"]` pairs with the
//! rational as a decimal string; documents round-trip exactly.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::deriv::{Decomposition, DerivationSpec};
use crate::field::{LaurentPoly, QElem, Rat};
use crate::model::{AlgebraElement, Level, UqModel, ZPoly};
use crate::ore::{OrePresentation, OreRelation, PBWElement};
use crate::torus::{Exponent, TorusElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("malformed document at {path}: {msg}")]
    Malformed { path: String, msg: String },
}

fn bad(path: &str, msg: impl Into<String>) -> DocError {
    DocError::Malformed {
        path: path.to_string(),
        msg: msg.into(),
    }
}

// ---------------------------------------------------------------------
// saving

fn rat_to_string(r: &Rat) -> String {
    if r.denom() == &num::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn poly_to_value(p: &LaurentPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(k, c)| json!([k, rat_to_string(c)]))
            .collect(),
    )
}

fn coeff_fields(c: &QElem, out: &mut Map<String, Value>) {
    out.insert("num".to_string(), poly_to_value(c.numerator()));
    out.insert("den".to_string(), poly_to_value(c.denominator()));
}

fn term_to_value(exp: &[i64], c: &QElem) -> Value {
    let mut m = Map::new();
    m.insert(
        "exp".to_string(),
        Value::Array(exp.iter().map(|e| json!(e)).collect()),
    );
    coeff_fields(c, &mut m);
    Value::Object(m)
}

fn terms_to_value<'a>(terms: impl Iterator<Item = (&'a Exponent, &'a QElem)>) -> Value {
    Value::Array(terms.map(|(e, c)| term_to_value(e, c)).collect())
}

/// Serialize a tower element.
pub fn save_element(u: &AlgebraElement) -> Value {
    json!({
        "schema": 1,
        "kind": "element",
        "basis": u.level.symbol(),
        "terms": terms_to_value(u.pbw.terms()),
    })
}

/// Serialize a torus element.
pub fn save_torus(t: &TorusElement) -> Value {
    json!({
        "schema": 1,
        "kind": "torus",
        "basis": "torus",
        "terms": terms_to_value(t.terms()),
    })
}

/// Serialize a presentation. Commutation scalars must be powers of `q`.
pub fn save_presentation(p: &OrePresentation) -> Result<Value, DocError> {
    let n = p.size();
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            let rel = p.relation(i, j);
            let lam = rel.lambda.as_q_power().ok_or_else(|| {
                bad(
                    &format!("pairs[{i},{j}].lambda_qexp"),
                    "commutation scalar is not a power of q",
                )
            })?;
            if lam == 0 && rel.correction.is_empty() {
                continue;
            }
            pairs.push(json!({
                "i": i,
                "j": j,
                "lambda_qexp": lam,
                "correction": terms_to_value(rel.correction.iter()),
            }));
        }
    }
    Ok(json!({
        "schema": 1,
        "kind": "presentation",
        "name": p.name(),
        "symbol": p.symbol(),
        "n": n,
        "invertible": p.invertible_indices().collect::<Vec<_>>(),
        "pairs": pairs,
    }))
}

/// Serialize a derivation specification by its Chevalley images.
pub fn save_derivation(d: &DerivationSpec) -> Value {
    json!({
        "schema": 1,
        "kind": "derivation",
        "basis": "X",
        "images": d
            .images
            .iter()
            .map(|u| terms_to_value(u.pbw.terms()))
            .collect::<Vec<_>>(),
    })
}

fn zpoly_to_value(p: &ZPoly) -> Value {
    Value::Array(
        p.iter()
            .map(|(&(a, b), c)| {
                let mut m = Map::new();
                m.insert("exp".to_string(), json!([a, b]));
                coeff_fields(c, &mut m);
                Value::Object(m)
            })
            .collect(),
    )
}

/// Serialize a decomposition result: the inner part and the six central
/// multipliers as polynomials in `z1, z2`.
pub fn save_decomposition(d: &Decomposition) -> Value {
    json!({
        "schema": 1,
        "kind": "decomposition",
        "x": save_element(&d.x),
        "mu": d.mu.iter().map(zpoly_to_value).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------
// loading

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, DocError> {
    v.get(key)
        .ok_or_else(|| bad(path, format!("missing field `{key}`")))
}

fn as_i64(v: &Value, path: &str) -> Result<i64, DocError> {
    v.as_i64().ok_or_else(|| bad(path, "expected an integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, DocError> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, DocError> {
    v.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn check_header(v: &Value, kind: &str) -> Result<(), DocError> {
    let schema = as_i64(get(v, "schema", "$")?, "$.schema")?;
    if schema != 1 {
        return Err(bad("$.schema", format!("unsupported schema version {schema}")));
    }
    let k = as_str(get(v, "kind", "$")?, "$.kind")?;
    if k != kind {
        return Err(bad("$.kind", format!("expected kind `{kind}`, found `{k}`")));
    }
    Ok(())
}

fn parse_rat(s: &str) -> Option<Rat> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = num::BigInt::from_str(n).ok()?;
    let d = num::BigInt::from_str(d).ok()?;
    if d == num::BigInt::from(0) {
        return None;
    }
    Some(Rat::new(n, d))
}

fn poly_from_value(v: &Value, path: &str) -> Result<LaurentPoly, DocError> {
    let mut terms = Vec::new();
    for (idx, pair) in as_array(v, path)?.iter().enumerate() {
        let path = format!("{path}[{idx}]");
        let pair = as_array(pair, &path)?;
        if pair.len() != 2 {
            return Err(bad(&path, "expected an [exponent, rational] pair"));
        }
        let k = as_i64(&pair[0], &format!("{path}[0]"))?;
        let s = as_str(&pair[1], &format!("{path}[1]"))?;
        let r = parse_rat(s).ok_or_else(|| bad(&format!("{path}[1]"), "bad rational"))?;
        terms.push((k, r));
    }
    Ok(LaurentPoly::from_terms(terms))
}

fn coeff_from_value(v: &Value, path: &str) -> Result<QElem, DocError> {
    let num = poly_from_value(get(v, "num", path)?, &format!("{path}.num"))?;
    let den = poly_from_value(get(v, "den", path)?, &format!("{path}.den"))?;
    QElem::new(num, den).map_err(|e| bad(&format!("{path}.den"), e.to_string()))
}

fn exp_from_value(v: &Value, path: &str, n: usize) -> Result<Exponent, DocError> {
    let arr = as_array(v, path)?;
    if arr.len() != n {
        return Err(bad(path, format!("expected {n} exponents, found {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(k, e)| as_i64(e, &format!("{path}[{k}]")))
        .collect()
}

fn terms_from_value(
    v: &Value,
    path: &str,
    n: usize,
) -> Result<Vec<(Exponent, QElem)>, DocError> {
    let mut out = Vec::new();
    for (idx, term) in as_array(v, path)?.iter().enumerate() {
        let path = format!("{path}[{idx}]");
        let exp = exp_from_value(get(term, "exp", &path)?, &format!("{path}.exp"), n)?;
        let c = coeff_from_value(term, &path)?;
        out.push((exp, c));
    }
    Ok(out)
}

fn basis_level(v: &Value, path: &str) -> Result<Level, DocError> {
    let s = as_str(v, path)?;
    match s {
        "X" => Ok(Level::X),
        "Y" => Ok(Level::Y),
        "Z" => Ok(Level::Z),
        "T" => Ok(Level::T),
        other => Err(bad(path, format!("unknown basis `{other}`"))),
    }
}

/// Load a tower element.
pub fn load_element(model: &UqModel, v: &Value) -> Result<AlgebraElement, DocError> {
    check_header(v, "element")?;
    let level = basis_level(get(v, "basis", "$")?, "$.basis")?;
    let p = model.presentation(level);
    let terms = terms_from_value(get(v, "terms", "$")?, "$.terms", p.size())?;
    let pbw = PBWElement::from_terms(p, terms).map_err(|e| bad("$.terms", e.to_string()))?;
    Ok(AlgebraElement { level, pbw })
}

/// Load a torus element.
pub fn load_torus(v: &Value) -> Result<TorusElement, DocError> {
    check_header(v, "torus")?;
    let terms = terms_from_value(get(v, "terms", "$")?, "$.terms", 6)?;
    let mut out = TorusElement::zero();
    for (e, c) in terms {
        out.add_term(e, c);
    }
    Ok(out)
}

/// Load a presentation.
pub fn load_presentation(v: &Value) -> Result<Arc<OrePresentation>, DocError> {
    check_header(v, "presentation")?;
    let n = as_i64(get(v, "n", "$")?, "$.n")?;
    if n < 1 {
        return Err(bad("$.n", "generator count must be positive"));
    }
    let n = n as usize;
    let name = v.get("name").and_then(|s| s.as_str()).unwrap_or("custom");
    let symbol = v.get("symbol").and_then(|s| s.as_str()).unwrap_or("W");
    let invertible: Vec<usize> = as_array(get(v, "invertible", "$")?, "$.invertible")?
        .iter()
        .enumerate()
        .map(|(k, e)| as_i64(e, &format!("$.invertible[{k}]")).map(|i| i as usize))
        .collect::<Result<_, _>>()?;
    let mut pairs = Vec::new();
    for (idx, pair) in as_array(get(v, "pairs", "$")?, "$.pairs")?.iter().enumerate() {
        let path = format!("$.pairs[{idx}]");
        let i = as_i64(get(pair, "i", &path)?, &format!("{path}.i"))? as usize;
        let j = as_i64(get(pair, "j", &path)?, &format!("{path}.j"))? as usize;
        let lam = as_i64(
            get(pair, "lambda_qexp", &path)?,
            &format!("{path}.lambda_qexp"),
        )?;
        let correction = terms_from_value(
            get(pair, "correction", &path)?,
            &format!("{path}.correction"),
            n,
        )?;
        pairs.push((
            i,
            j,
            OreRelation {
                lambda: QElem::q_power(lam),
                correction: correction.into_iter().collect(),
            },
        ));
    }
    OrePresentation::new(name, symbol, n, invertible, pairs)
        .map_err(|e| bad("$.pairs", e.to_string()))
}

/// Load a derivation specification.
pub fn load_derivation(model: &UqModel, v: &Value) -> Result<DerivationSpec, DocError> {
    check_header(v, "derivation")?;
    let p = model.presentation(Level::X);
    let arr = as_array(get(v, "images", "$")?, "$.images")?;
    if arr.len() != 3 {
        return Err(bad("$.images", "expected exactly three images"));
    }
    let mut images = Vec::new();
    for (idx, img) in arr.iter().enumerate() {
        let path = format!("$.images[{idx}]");
        let terms = terms_from_value(img, &path, p.size())?;
        let pbw =
            PBWElement::from_terms(p, terms).map_err(|e| bad(&path, e.to_string()))?;
        images.push(AlgebraElement {
            level: Level::X,
            pbw,
        });
    }
    let images: [AlgebraElement; 3] = images.try_into().expect("length checked");
    Ok(DerivationSpec { images })
}

fn zpoly_from_value(v: &Value, path: &str) -> Result<ZPoly, DocError> {
    let mut out = ZPoly::new();
    for (idx, term) in as_array(v, path)?.iter().enumerate() {
        let path = format!("{path}[{idx}]");
        let exp = exp_from_value(get(term, "exp", &path)?, &format!("{path}.exp"), 2)?;
        let c = coeff_from_value(term, &path)?;
        if !c.is_zero() {
            out.insert((exp[0], exp[1]), c);
        }
    }
    Ok(out)
}

/// Load a decomposition result.
pub fn load_decomposition(model: &UqModel, v: &Value) -> Result<Decomposition, DocError> {
    check_header(v, "decomposition")?;
    let x = load_element(model, get(v, "x", "$")?)?;
    let arr = as_array(get(v, "mu", "$")?, "$.mu")?;
    if arr.len() != 6 {
        return Err(bad("$.mu", "expected exactly six multipliers"));
    }
    let mut mu: [ZPoly; 6] = std::array::from_fn(|_| BTreeMap::new());
    for (idx, p) in arr.iter().enumerate() {
        mu[idx] = zpoly_from_value(p, &format!("$.mu[{idx}]"))?;
    }
    Ok(Decomposition { x, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn m() -> &'static Arc<UqModel> {
        UqModel::shared()
    }

    #[test]
    fn element_round_trip() {
        let m = m();
        let x1 = m.generator(Level::X, 1).unwrap();
        let doc = save_element(&x1);
        assert_eq!(doc["terms"][0]["exp"], json!([1, 0, 0, 0, 0, 0]));
        assert_eq!(load_element(m, &doc).unwrap(), x1);

        let d2 = m.delta(2).unwrap();
        let doc = save_element(&d2);
        assert_eq!(as_array(&doc["terms"], "$").unwrap().len(), 2);
        assert_eq!(load_element(m, &doc).unwrap(), d2);

        // an element with fractional and q-dependent coefficients
        let u = d2
            .scale(&QElem::from_rat(rat(-7, 3)))
            .add(&m.z1().scale(&QElem::qhat().inv().unwrap()))
            .unwrap();
        let doc = save_element(&u);
        assert_eq!(load_element(m, &doc).unwrap(), u);
    }

    #[test]
    fn torus_round_trip() {
        let m = m();
        let t = m
            .embed(&m.delta(3).unwrap())
            .add(&TorusElement::monomial(
                vec![0, -2, 0, 0, 3, -1],
                QElem::q_int(5).neg(),
            ));
        let doc = save_torus(&t);
        assert_eq!(load_torus(&doc).unwrap(), t);
    }

    #[test]
    fn presentation_round_trip() {
        let m = m();
        for level in Level::ALL {
            let p = m.presentation(level);
            let doc = save_presentation(p).unwrap();
            let q = load_presentation(&doc).unwrap();
            assert_eq!(p.size(), q.size());
            for i in 1..=6 {
                assert_eq!(p.is_invertible(i), q.is_invertible(i));
                for j in (i + 1)..=6 {
                    assert_eq!(p.relation(i, j), q.relation(i, j), "{level:?} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn derivation_and_decomposition_round_trip() {
        let m = m();
        let spec = DerivationSpec::from_parts(
            m,
            &m.serre_generator(1).unwrap(),
            &ZPoly::from([((0, 1), QElem::q())]),
            &ZPoly::new(),
            &ZPoly::new(),
        )
        .unwrap();
        let doc = save_derivation(&spec);
        assert_eq!(load_derivation(m, &doc).unwrap(), spec);

        let dec = spec.decompose(m).unwrap();
        let doc = save_decomposition(&dec);
        assert_eq!(load_decomposition(m, &doc).unwrap(), dec);
    }

    #[test]
    fn malformed_documents_name_the_path() {
        let m = m();
        let cases = [
            (json!({"kind": "element"}), "$"),
            (json!({"schema": 2, "kind": "element"}), "$.schema"),
            (json!({"schema": 1, "kind": "torus"}), "$.kind"),
            (
                json!({"schema": 1, "kind": "element", "basis": "Q", "terms": []}),
                "$.basis",
            ),
            (
                json!({"schema": 1, "kind": "element", "basis": "X",
                       "terms": [{"exp": [1, 0, 0], "num": [[0, "1"]], "den": [[0, "1"]]}]}),
                "$.terms[0].exp",
            ),
            (
                json!({"schema": 1, "kind": "element", "basis": "X",
                       "terms": [{"exp": [1, 0, 0, 0, 0, 0], "num": [[0, "x"]], "den": [[0, "1"]]}]}),
                "$.terms[0].num[0][1]",
            ),
        ];
        for (doc, want) in cases {
            match load_element(m, &doc) {
                Err(DocError::Malformed { path, .. }) => {
                    assert_eq!(path, want, "doc {doc}");
                }
                other => panic!("expected malformed error for {doc}, got {other:?}"),
            }
        }
    }

    #[test]
    fn byte_identical_serialization() {
        let m = m();
        let u = m.delta(3).unwrap();
        let a = serde_json::to_string(&save_element(&u)).unwrap();
        let b = serde_json::to_string(&save_element(&u)).unwrap();
        assert_eq!(a, b);
    }
}
