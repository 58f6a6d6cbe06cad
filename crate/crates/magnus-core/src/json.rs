//! JSON schemas for tensor series and automorphisms.
//!
//! Series: `{"dim_h": n, "trunc": D, "mode": "exact"|"float",
//!           "components": {"m": [{"word": [i...], "num": a, "den": b}
//!                                | {"word": [...], "val": x}]}}`
//! with 1-based generator indices. Exact numerators/denominators that do not
//! fit a JSON integer are emitted as decimal strings and accepted back.
//!
//! Automorphisms: `{"n": n, "images": {"1": [...]}, "inverse_images": {...}}`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::free_group::{FreeAut, FreeEndo, FreeWord};
use crate::scalar::{Mode, Scalar};
use crate::tensor::TensorSeries;
use crate::{AlgebraError, Result};

fn bigint_value(b: &BigInt) -> Value {
    use num_traits::ToPrimitive;
    match b.to_i64() {
        Some(v) => json!(v),
        None => json!(b.to_string()),
    }
}

fn bigint_from_value(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(s) = v.as_str() {
        return BigInt::from_str(s).map_err(|e| AlgebraError::Json(e.to_string()));
    }
    Err(AlgebraError::Json(format!("expected integer, got {v}")))
}

pub fn series_to_json(s: &TensorSeries) -> Value {
    let mut comps = Map::new();
    for m in 0..=s.trunc() {
        let entries: Vec<Value> = s
            .component(m)
            .map(|(w, c)| {
                let word: Vec<u64> = w.iter().map(|&l| l as u64).collect();
                match c {
                    Scalar::Exact(r) => json!({
                        "word": word,
                        "num": bigint_value(r.numer()),
                        "den": bigint_value(r.denom()),
                    }),
                    Scalar::Float(x) => json!({"word": word, "val": x}),
                }
            })
            .collect();
        if !entries.is_empty() {
            comps.insert(m.to_string(), Value::Array(entries));
        }
    }
    json!({
        "dim_h": s.dim_h(),
        "trunc": s.trunc(),
        "mode": match s.mode() { Mode::Exact => "exact", Mode::Float => "float" },
        "components": Value::Object(comps),
    })
}

pub fn series_from_json(v: &Value) -> Result<TensorSeries> {
    let obj = v.as_object().ok_or_else(|| AlgebraError::Json("series: not an object".into()))?;
    let dim_h = obj
        .get("dim_h")
        .and_then(Value::as_u64)
        .ok_or_else(|| AlgebraError::Json("missing dim_h".into()))? as usize;
    let trunc = obj
        .get("trunc")
        .and_then(Value::as_u64)
        .ok_or_else(|| AlgebraError::Json("missing trunc".into()))? as usize;
    let mode = match obj.get("mode").and_then(Value::as_str) {
        Some("exact") => Mode::Exact,
        Some("float") => Mode::Float,
        other => return Err(AlgebraError::Json(format!("bad mode {other:?}"))),
    };
    let mut s = TensorSeries::zero(dim_h, trunc, mode);
    if let Some(comps) = obj.get("components").and_then(Value::as_object) {
        for (mstr, arr) in comps {
            let m: usize = mstr
                .parse()
                .map_err(|_| AlgebraError::Json(format!("bad degree key {mstr}")))?;
            let arr = arr
                .as_array()
                .ok_or_else(|| AlgebraError::Json("component: not an array".into()))?;
            for entry in arr {
                let word: Vec<u8> = entry
                    .get("word")
                    .and_then(Value::as_array)
                    .ok_or_else(|| AlgebraError::Json("missing word".into()))?
                    .iter()
                    .map(|x| x.as_u64().map(|v| v as u8))
                    .collect::<Option<Vec<u8>>>()
                    .ok_or_else(|| AlgebraError::Json("bad word letter".into()))?;
                if word.len() != m {
                    return Err(AlgebraError::Json(format!(
                        "word length {} under degree key {m}",
                        word.len()
                    )));
                }
                if word.iter().any(|&l| l == 0 || l as usize > dim_h) {
                    return Err(AlgebraError::Json("letter out of range".into()));
                }
                let c = match mode {
                    Mode::Exact => {
                        let num = bigint_from_value(
                            entry.get("num").ok_or_else(|| AlgebraError::Json("missing num".into()))?,
                        )?;
                        let den = bigint_from_value(
                            entry.get("den").ok_or_else(|| AlgebraError::Json("missing den".into()))?,
                        )?;
                        if den == BigInt::from(0) {
                            return Err(AlgebraError::Json("zero denominator".into()));
                        }
                        Scalar::Exact(BigRational::new(num, den))
                    }
                    Mode::Float => {
                        let x = entry
                            .get("val")
                            .and_then(Value::as_f64)
                            .ok_or_else(|| AlgebraError::Json("missing val".into()))?;
                        if !x.is_finite() {
                            return Err(AlgebraError::Json("non-finite val".into()));
                        }
                        Scalar::Float(x)
                    }
                };
                s.insert(word, c);
            }
        }
    }
    Ok(s)
}

fn word_to_json(w: &FreeWord) -> Value {
    json!(w.letters())
}

fn word_from_json(v: &Value) -> Result<FreeWord> {
    let arr = v
        .as_array()
        .ok_or_else(|| AlgebraError::Json("word: not an array".into()))?;
    let letters: Vec<i32> = arr
        .iter()
        .map(|x| x.as_i64().map(|v| v as i32))
        .collect::<Option<Vec<i32>>>()
        .ok_or_else(|| AlgebraError::Json("word: bad letter".into()))?;
    FreeWord::new(&letters)
}

pub fn aut_to_json(aut: &FreeAut) -> Value {
    let n = aut.n();
    let mut images = Map::new();
    let mut inv = Map::new();
    for i in 1..=n {
        images.insert(i.to_string(), word_to_json(aut.forward().image(i)));
        inv.insert(i.to_string(), word_to_json(aut.backward().image(i)));
    }
    json!({"n": n, "images": images, "inverse_images": inv})
}

pub fn aut_from_json(v: &Value) -> Result<FreeAut> {
    let obj = v.as_object().ok_or_else(|| AlgebraError::Json("aut: not an object".into()))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| AlgebraError::Json("missing n".into()))? as usize;
    let read = |key: &str| -> Result<FreeEndo> {
        let map = obj
            .get(key)
            .and_then(Value::as_object)
            .ok_or_else(|| AlgebraError::Json(format!("missing {key}")))?;
        let mut images = Vec::with_capacity(n);
        for i in 1..=n {
            let w = map
                .get(&i.to_string())
                .ok_or_else(|| AlgebraError::Json(format!("{key}: missing image of {i}")))?;
            images.push(word_from_json(w)?);
        }
        FreeEndo::new(n, images)
    };
    FreeAut::new(read("images")?, read("inverse_images")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_util::{random_series, seeded};

    #[test]
    fn series_round_trip_exact_and_float() {
        let mut rng = seeded(2);
        for mode in [Mode::Exact, Mode::Float] {
            let s = random_series(&mut rng, 3, 4, mode, 0, 4, 3);
            let v = series_to_json(&s);
            let back = series_from_json(&v).unwrap();
            assert_eq!(s, back);
        }
    }

    #[test]
    fn aut_round_trip() {
        let mut rng = seeded(3);
        let aut = crate::free_group::random_nielsen_aut(&mut rng, 3, 6);
        let v = aut_to_json(&aut);
        let back = aut_from_json(&v).unwrap();
        assert_eq!(aut, back);
    }

    #[test]
    fn malformed_series_rejected() {
        let v = json!({"dim_h": 2, "trunc": 3, "mode": "exact",
                       "components": {"2": [{"word": [1], "num": 1, "den": 1}]}});
        assert!(series_from_json(&v).is_err());
    }
}
