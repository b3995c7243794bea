//! Command-line weight syntax.
//!
//! A finite weight is either JSON (`{"basis":..,"coords":..}`), a bracketed
//! list of fundamental coordinates (`[2,0]`), or a sum of terms such as
//! `2w`, `w1 + w3`, `3w_{a} - a2`, `0`. `w` terms are fundamental weights and
//! `a` terms simple roots; the index is a vertex id, falling back to a
//! 1-based position, and may be omitted in rank one. Affine weights use the
//! affine fundamental weights of every vertex plus `d` for delta, e.g.
//! `w0 + w1 - 2d`.

use coulomb_core::affine::{AffineType, AffineWeight};
use coulomb_core::quiver::CartanMatrix;
use coulomb_core::weights::WeightVector;
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::json;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Letter {
    W,
    A,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Term {
    coeff: i64,
    letter: Option<Letter>,
    index: Option<String>,
}

fn split_terms(text: &str) -> Result<Vec<(i64, String)>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty weight expression"));
    }
    let mut out = Vec::new();
    let mut sign = 1;
    let mut current = String::new();
    let mut depth = 0;
    for (i, c) in compact.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if (c == '+' || c == '-') && depth == 0 {
            if !current.is_empty() {
                out.push((sign, std::mem::take(&mut current)));
            } else if i != 0 {
                return Err(bad(format!("dangling sign in `{text}`")));
            }
            sign = if c == '-' { -1 } else { 1 };
            continue;
        }
        current.push(c);
    }
    if current.is_empty() {
        return Err(bad(format!("expression `{text}` ends with a sign")));
    }
    out.push((sign, current));
    Ok(out)
}

fn parse_term(sign: i64, raw: &str) -> Result<Term> {
    let digits: String = raw.chars().take_while(|c| c.is_ascii_digit()).collect();
    let rest = raw[digits.len()..].trim_start_matches('*');
    let coeff = if digits.is_empty() {
        1
    } else {
        digits.parse::<i64>().map_err(|_| bad(format!("bad coefficient in `{raw}`")))?
    };
    if rest.is_empty() {
        if digits.is_empty() {
            return Err(bad(format!("bad term `{raw}`")));
        }
        return Ok(Term {
            coeff: sign * coeff,
            letter: None,
            index: None,
        });
    }
    let (letter, tail) = if let Some(t) = rest.strip_prefix("delta") {
        (Letter::Delta, t)
    } else if let Some(t) = rest.strip_prefix('d') {
        (Letter::Delta, t)
    } else if let Some(t) = rest.strip_prefix('w') {
        (Letter::W, t)
    } else if let Some(t) = rest.strip_prefix('a') {
        (Letter::A, t)
    } else {
        return Err(bad(format!("unknown symbol in `{raw}`; expected w, a or d")));
    };
    let index = if tail.is_empty() {
        None
    } else {
        let id = tail.strip_prefix('_').unwrap_or(tail);
        let id = id
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(id);
        if id.is_empty() {
            return Err(bad(format!("empty index in `{raw}`")));
        }
        Some(id.to_string())
    };
    if letter == Letter::Delta && index.is_some() {
        return Err(bad(format!("`d` takes no index in `{raw}`")));
    }
    Ok(Term {
        coeff: sign * coeff,
        letter: Some(letter),
        index,
    })
}

fn parse_terms(text: &str) -> Result<Vec<Term>> {
    split_terms(text)?
        .into_iter()
        .map(|(s, raw)| parse_term(s, &raw))
        .collect()
}

fn resolve(index: &Option<String>, ids: &[String]) -> Result<usize> {
    match index {
        None if ids.len() == 1 => Ok(0),
        None => Err(bad(format!("an index is needed in rank {}", ids.len()))),
        Some(id) => {
            if let Some(i) = ids.iter().position(|v| v == id) {
                return Ok(i);
            }
            match id.parse::<usize>() {
                Ok(p) if (1..=ids.len()).contains(&p) => Ok(p - 1),
                _ => Err(bad(format!("unknown vertex `{id}`"))),
            }
        }
    }
}

fn check_len(w: &WeightVector, rank: usize) -> Result<()> {
    if w.len() != rank {
        return Err(bad(format!("weight has {} coordinates, expected {rank}", w.len())));
    }
    Ok(())
}

/// Finite weight over the vertices `ids` with Cartan matrix `c`.
pub fn finite_weight(text: &str, ids: &[String], c: &CartanMatrix) -> Result<WeightVector> {
    let trimmed = text.trim();
    let w = if trimmed.starts_with('{') {
        json::parse_weight(&json::parse_text(trimmed, "weight")?)?
    } else if trimmed.starts_with('[') {
        WeightVector::Fundamental(int_list(trimmed)?)
    } else {
        let terms = parse_terms(trimmed)?;
        let n = ids.len();
        let mut fundamental = vec![0; n];
        let mut roots = vec![0; n];
        let mut any_w = false;
        let mut any_a = false;
        for t in terms {
            match t.letter {
                None if t.coeff == 0 => {}
                None => return Err(bad(format!("constant {} is not a weight", t.coeff))),
                Some(Letter::W) => {
                    fundamental[resolve(&t.index, ids)?] += t.coeff;
                    any_w = true;
                }
                Some(Letter::A) => {
                    roots[resolve(&t.index, ids)?] += t.coeff;
                    any_a = true;
                }
                Some(Letter::Delta) => return Err(bad("`d` only appears in affine weights")),
            }
        }
        if any_a && !any_w {
            WeightVector::Coroot(roots)
        } else {
            let shift = c.apply(&roots);
            WeightVector::Fundamental(fundamental.iter().zip(&shift).map(|(f, s)| f + s).collect())
        }
    };
    check_len(&w, ids.len())?;
    Ok(w)
}

/// Affine weight over all vertices `ids` of an affine diagram.
pub fn affine_weight(text: &str, ids: &[String], ty: &AffineType) -> Result<AffineWeight> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let w = json::parse_affine_weight(&json::parse_text(trimmed, "affine weight")?)?;
        check_len(&w.finite, ids.len() - 1)?;
        return Ok(w);
    }
    let mut coords = vec![0; ids.len()];
    let mut energy = 0;
    for t in parse_terms(trimmed)? {
        match t.letter {
            None if t.coeff == 0 => {}
            None => return Err(bad(format!("constant {} is not a weight", t.coeff))),
            Some(Letter::W) => coords[resolve(&t.index, ids)?] += t.coeff,
            Some(Letter::Delta) => energy += t.coeff,
            Some(Letter::A) => return Err(bad("affine weights are written with w and d terms; pass roots via --alpha")),
        }
    }
    Ok(ty.from_affine_fundamental(&coords, energy)?)
}

fn int_list(text: &str) -> Result<Vec<i64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let v = json::parse_text(trimmed, "integer list")?;
        return v
            .as_array()
            .ok_or_else(|| bad("expected an array of integers"))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| bad("expected an array of integers")))
            .collect();
    }
    trimmed
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| bad(format!("`{s}` is not an integer"))))
        .collect()
}

/// A vector indexed by the vertices: `1,0,2`, `[1,0,2]`, or a sum of simple
/// roots such as `a1 + 2a3`.
pub fn vertex_vector(text: &str, ids: &[String]) -> Result<Vec<i64>> {
    let trimmed = text.trim();
    let v = if trimmed.contains('a') {
        let mut out = vec![0; ids.len()];
        for t in parse_terms(trimmed)? {
            match t.letter {
                Some(Letter::A) => out[resolve(&t.index, ids)?] += t.coeff,
                None if t.coeff == 0 => {}
                _ => return Err(bad(format!("`{text}` must be a sum of simple roots"))),
            }
        }
        out
    } else {
        int_list(trimmed)?
    };
    if v.len() != ids.len() {
        return Err(bad(format!("vector has {} entries, expected {}", v.len(), ids.len())));
    }
    Ok(v)
}

/// A permutation of the vertices: a JSON object mapping ids to ids, or the
/// images of the vertices in order (JSON array or comma list).
pub fn automorphism(text: &str, ids: &[String]) -> Result<Vec<usize>> {
    let trimmed = text.trim();
    let lookup = |id: &str| {
        ids.iter()
            .position(|v| v == id)
            .ok_or_else(|| bad(format!("unknown vertex `{id}`")))
    };
    let images: Vec<String> = if trimmed.starts_with('{') {
        let v = json::parse_text(trimmed, "automorphism")?;
        let map = v.as_object().ok_or_else(|| bad("automorphism must be an object"))?;
        let mut out = ids.to_vec();
        for (from, to) in map {
            out[lookup(from)?] = json::vertex_id(to)?;
        }
        out
    } else if trimmed.starts_with('[') {
        let v = json::parse_text(trimmed, "automorphism")?;
        v.as_array()
            .ok_or_else(|| bad("automorphism must be an array"))?
            .iter()
            .map(json::vertex_id)
            .collect::<Result<_>>()?
    } else {
        trimmed.split(',').map(|s| s.trim().to_string()).collect()
    };
    if images.len() != ids.len() {
        return Err(bad(format!("automorphism lists {} images for {} vertices", images.len(), ids.len())));
    }
    images.iter().map(|id| lookup(id)).collect()
}

/// Reads `value` as JSON if it looks like JSON, for echoing arguments.
pub fn echo(text: &str) -> Value {
    let trimmed = text.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        if let Ok(v) = serde_json::from_str(trimmed) {
            return v;
        }
    }
    Value::String(trimmed.to_string())
}
