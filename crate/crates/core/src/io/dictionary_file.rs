//! Line-oriented dictionary files.
//!
//! ```text
//! # innodict-dictionary 1
//! # model: fixed
//! # symbols: 1
//! # words: 2
//! # word_length: 3
//! # seed: 42
//! 0 0 0
//! 0 0 0
//! ```
//!
//! Header lines start with `# ` and hold `key: value` pairs; every other
//! non-empty line is one word as space-separated symbol ids. Dictionaries
//! built by hand carry `model: none`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::generators::{GeneratorParams, Model};
use crate::model::{Dictionary, Provenance, SymbolId, Word};

pub const MAGIC: &str = "# innodict-dictionary 1";

pub fn write_dictionary<W: Write>(dictionary: &Dictionary, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    let prov = dictionary.provenance();
    match &prov.params {
        Some(p) => {
            writeln!(out, "# model: {}", p.model.tag())?;
            writeln!(out, "# symbols: {}", dictionary.symbol_count())?;
            writeln!(out, "# words: {}", dictionary.word_count())?;
            if let Some(l) = p.model.word_length() {
                writeln!(out, "# word_length: {l}")?;
            }
            if let Some(f) = p.model.fork_probability() {
                writeln!(out, "# fork_probability: {f:?}")?;
            }
            writeln!(out, "# seed: {}", p.seed)?;
        }
        None => {
            writeln!(out, "# model: none")?;
            writeln!(out, "# symbols: {}", dictionary.symbol_count())?;
            writeln!(out, "# words: {}", dictionary.word_count())?;
        }
    }
    if let Some(a) = prov.initial_symbol {
        writeln!(out, "# initial_symbol: {a}")?;
    }
    let mut line = String::new();
    for w in dictionary.words() {
        line.clear();
        for (i, s) in w.symbols().iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&s.0.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn dictionary_to_string(dictionary: &Dictionary) -> String {
    let mut buf = Vec::new();
    write_dictionary(dictionary, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_value<T: std::str::FromStr>(
    header: &BTreeMap<String, (usize, String)>,
    key: &str,
) -> Result<Option<T>> {
    match header.get(key) {
        None => Ok(None),
        Some((line, v)) => v
            .parse()
            .map(Some)
            .map_err(|_| parse_err(*line, format!("bad value for {key}: '{v}'"))),
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| parse_err(0, format!("missing header field '{key}'")))
}

pub fn read_dictionary<R: BufRead>(input: R) -> Result<Dictionary> {
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut words = Vec::new();
    let mut saw_magic = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line.trim_end() != MAGIC {
                return Err(parse_err(1, "missing dictionary file header"));
            }
            saw_magic = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, "header lines must be 'key: value'"))?;
            header.insert(k.trim().to_string(), (lineno, v.trim().to_string()));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let ids = line
            .split_ascii_whitespace()
            .map(|t| t.parse::<u32>().map(SymbolId))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(lineno, format!("bad symbol id: {e}")))?;
        words.push(Word::new(ids).map_err(|e| parse_err(lineno, e.to_string()))?);
    }
    if !saw_magic {
        return Err(parse_err(1, "empty dictionary file"));
    }

    let symbols: usize = required(header_value(&header, "symbols")?, "symbols")?;
    let declared: usize = required(header_value(&header, "words")?, "words")?;
    if declared != words.len() {
        return Err(parse_err(
            0,
            format!(
                "header declares {declared} words but the file holds {}",
                words.len()
            ),
        ));
    }
    let model_tag: String = required(header_value(&header, "model")?, "model")?;
    let params = if model_tag == "none" {
        None
    } else {
        let model = match model_tag.as_str() {
            "fixed" => Model::Fixed {
                word_length: required(header_value(&header, "word_length")?, "word_length")?,
            },
            "extensible" => Model::Extensible,
            "chain" => Model::Chain {
                fork_probability: required(
                    header_value(&header, "fork_probability")?,
                    "fork_probability",
                )?,
            },
            "blinkered" => Model::Blinkered {
                fork_probability: required(
                    header_value(&header, "fork_probability")?,
                    "fork_probability",
                )?,
            },
            other => return Err(parse_err(0, format!("unknown model '{other}'"))),
        };
        Some(GeneratorParams::new(
            model,
            symbols,
            declared,
            required(header_value(&header, "seed")?, "seed")?,
        ))
    };
    let initial_symbol = header_value::<u32>(&header, "initial_symbol")?.map(SymbolId);
    Dictionary::new(
        words,
        symbols,
        Provenance {
            params,
            initial_symbol,
        },
    )
}
