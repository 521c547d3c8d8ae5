//! Text and JSON forms of [`OperatorSum`].
//!
//! Text: one `coeff word` pair per line, `#` starts a comment.
//! JSON: `{"n": 2, "terms": [{"c": 0.5, "word": "ZZ"}]}`.
//! Both round-trip bit-exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{OperatorSum, PauliString};

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: f64,
    word: String,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    n: usize,
    terms: Vec<TermJson>,
}

/// `x` with 12 significant digits: plain decimals for moderate magnitudes,
/// scientific notation otherwise, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let plain = format!("{:.*}", (11 - exp).max(0) as usize, x);
    if plain.contains('.') {
        plain.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        plain
    }
}

pub fn to_text(op: &OperatorSum) -> String {
    let mut s = String::new();
    for (c, p) in op.terms() {
        s.push_str(&format!("{c:?} {}\n", p.word()));
    }
    s
}

/// Parses the text form. `n` is taken from the first word; an empty
/// document needs `default_n`.
pub fn from_text(text: &str, default_n: Option<usize>) -> Result<OperatorSum> {
    let mut op: Option<OperatorSum> = default_n.map(OperatorSum::zero);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(cs), Some(w), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse { line: i + 1, msg: "expected `coeff word`".into() });
        };
        let c: f64 = cs
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad coefficient `{cs}`") })?;
        let p = PauliString::from_word(w).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let target = op.get_or_insert_with(|| OperatorSum::zero(p.n()));
        if target.n() != p.n() {
            return Err(Error::Parse { line: i + 1, msg: format!("word length {} != {}", p.n(), target.n()) });
        }
        target.add_term(c, &p);
    }
    op.ok_or(Error::Parse { line: 0, msg: "empty operator with unknown qubit count".into() })
}

pub fn to_json(op: &OperatorSum) -> String {
    let doc = OperatorJson {
        n: op.n(),
        terms: op.terms().map(|(c, p)| TermJson { c, word: p.word() }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn from_json(text: &str) -> Result<OperatorSum> {
    let doc: OperatorJson =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    let mut op = OperatorSum::zero(doc.n);
    for t in doc.terms {
        let p = PauliString::from_word(&t.word)?;
        if p.n() != doc.n {
            return Err(Error::DimensionMismatch { expected: doc.n, got: p.n() });
        }
        op.add_term(t.c, &p);
    }
    Ok(op)
}
