//! Code and generator-matrix files.
//!
//! Code JSON: `{"n": 3, "words": ["000", "111"], "provenance": {...}}`, the
//! provenance block optional. Plain text: one word per line, an optional
//! leading `n=<int>` line, blank lines and `#` comments ignored.
//! Generator JSON: `{"n": 7, "k": 4, "rows": [...]}`, canonicalized on load.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linear::LinearCode;
use crate::metrics::Code;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq)]
pub struct CodeFile {
    pub code: Code,
    pub provenance: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeJson {
    n: u32,
    words: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    n: u32,
    k: u32,
    rows: Vec<String>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(
        format!("line {}, column {}", e.line(), e.column()),
        e.to_string(),
    )
}

/// Parses words with per-item locations, rejecting duplicates by position.
fn collect_words<'a>(n: u32, items: impl Iterator<Item = (String, &'a str)>) -> Result<Code> {
    let mut seen: HashMap<u32, String> = HashMap::new();
    let mut bits = Vec::new();
    for (loc, s) in items {
        let w = Word::parse_with_len(s, n).map_err(|e| Error::parse(&loc, e.to_string()))?;
        if let Some(first) = seen.insert(w.bits(), loc.clone()) {
            return Err(Error::parse(
                loc,
                format!("duplicate word {w} (first at {first})"),
            ));
        }
        bits.push(w.bits());
    }
    if bits.is_empty() {
        return Err(Error::parse("words", "a code needs at least one word"));
    }
    Code::from_bits(n, bits)
}

pub fn parse_code_json(text: &str) -> Result<CodeFile> {
    let raw: CodeJson = serde_json::from_str(text).map_err(json_error)?;
    let code = collect_words(
        raw.n,
        raw.words
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("words[{i}]"), s.as_str())),
    )?;
    Ok(CodeFile {
        code,
        provenance: raw.provenance,
    })
}

pub fn parse_code_text(text: &str) -> Result<CodeFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let declared = match lines.peek() {
        Some((no, l)) if l.starts_with("n=") => {
            let n = l[2..].trim().parse::<u32>().map_err(|e| {
                Error::parse(format!("line {no}"), format!("bad length header: {e}"))
            })?;
            lines.next();
            Some(n)
        }
        _ => None,
    };
    let items: Vec<(String, &str)> = lines.map(|(no, l)| (format!("line {no}"), l)).collect();
    let n = match (declared, items.first()) {
        (Some(n), _) => n,
        (None, Some((_, w))) => w.len() as u32,
        (None, None) => return Err(Error::parse("line 1", "no words")),
    };
    Ok(CodeFile {
        code: collect_words(n, items.into_iter())?,
        provenance: None,
    })
}

/// JSON when the first non-space character is `{`, plain text otherwise.
pub fn parse_code_auto(text: &str) -> Result<CodeFile> {
    if text.trim_start().starts_with('{') {
        parse_code_json(text)
    } else {
        parse_code_text(text)
    }
}

pub fn code_to_json(code: &Code, provenance: Option<Value>) -> String {
    let raw = CodeJson {
        n: code.len(),
        words: code.to_strings(),
        provenance,
    };
    serde_json::to_string_pretty(&raw).expect("code serializes")
}

pub fn code_to_text(code: &Code) -> String {
    let mut out = format!("n={}\n", code.len());
    for w in code.to_strings() {
        out.push_str(&w);
        out.push('\n');
    }
    out
}

pub fn parse_generator_json(text: &str) -> Result<LinearCode> {
    let raw: GeneratorJson = serde_json::from_str(text).map_err(json_error)?;
    if raw.rows.len() != raw.k as usize {
        return Err(Error::parse(
            "rows",
            format!("expected {} rows, found {}", raw.k, raw.rows.len()),
        ));
    }
    let rows = raw
        .rows
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Word::parse_with_len(s, raw.n)
                .map(|w| w.bits())
                .map_err(|e| Error::parse(format!("rows[{i}]"), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    LinearCode::from_generator(raw.n, rows).map_err(|e| Error::parse("rows", e.to_string()))
}

pub fn generator_to_json(code: &LinearCode) -> String {
    let raw = GeneratorJson {
        n: code.len(),
        k: code.dim(),
        rows: code.row_strings(),
    };
    serde_json::to_string_pretty(&raw).expect("generator serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let f = parse_code_json(r#"{"n": 3, "words": ["111", "000"]}"#).unwrap();
        assert_eq!(f.code.to_strings(), ["000", "111"]);
        let text = code_to_json(&f.code, Some(serde_json::json!({"method": "gv"})));
        let back = parse_code_auto(&text).unwrap();
        assert_eq!(back.code, f.code);
        assert_eq!(back.provenance.unwrap()["method"], "gv");
    }

    #[test]
    fn text_format() {
        let f = parse_code_text("n=3\n000\n\n# comment\n111\n").unwrap();
        assert_eq!(f.code.size(), 2);
        let f = parse_code_auto("0101\n1010\n").unwrap();
        assert_eq!(f.code.len(), 4);
        assert_eq!(
            parse_code_text(&code_to_text(&f.code)).unwrap().code,
            f.code
        );
    }

    #[test]
    fn diagnostics_name_the_line() {
        let e = parse_code_text("n=3\n000\n111\n000\n").unwrap_err();
        assert!(
            matches!(&e, Error::Parse { location, message } if location == "line 4" && message.contains("line 2"))
        );
        let e = parse_code_text("n=3\n000\n0a1\n").unwrap_err();
        assert!(matches!(&e, Error::Parse { location, .. } if location == "line 3"));
        let e = parse_code_text("000\n0000\n").unwrap_err();
        assert!(matches!(&e, Error::Parse { location, .. } if location == "line 2"));
        let e = parse_code_json(r#"{"n": 3, "words": ["000", "000"]}"#).unwrap_err();
        assert!(matches!(&e, Error::Parse { location, .. } if location == "words[1]"));
        assert!(parse_code_json(r#"{"n": 3, "words": []}"#).is_err());
        assert!(parse_code_json("{\"n\": 3,\n \"wurds\": []}").is_err());
    }

    #[test]
    fn generator_files() {
        let l = parse_generator_json(r#"{"n": 4, "k": 2, "rows": ["1100", "1111"]}"#).unwrap();
        assert_eq!(l.row_strings(), ["1100", "0011"]);
        assert_eq!(parse_generator_json(&generator_to_json(&l)).unwrap(), l);
        assert!(parse_generator_json(r#"{"n": 4, "k": 2, "rows": ["1100", "1100"]}"#).is_err());
        assert!(parse_generator_json(r#"{"n": 4, "k": 3, "rows": ["1100"]}"#).is_err());
    }
}
