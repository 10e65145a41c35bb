//! Reading real texts: plain files and FASTA.

use std::str::FromStr;

use crate::alphabet::{Alphabet, Text};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TextFormat {
    Plain,
    Fasta,
}

impl FromStr for TextFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(TextFormat::Plain),
            "fasta" => Ok(TextFormat::Fasta),
            _ => Err(Error::Input(format!("unknown text format {s:?}; expected plain or fasta"))),
        }
    }
}

fn project(alphabet: &Alphabet, chars: impl Iterator<Item = (usize, usize, char)>) -> Result<Text> {
    let mut out = Vec::new();
    for (line, col, c) in chars {
        match alphabet.symbol(c) {
            Some(x) => out.push(x),
            None => {
                return Err(Error::Input(format!(
                    "symbol {c:?} at line {line}, column {col} is not in the alphabet {alphabet}"
                )))
            }
        }
    }
    Ok(out)
}

fn fold(alphabet: &Alphabet, c: char) -> char {
    if alphabet.symbol(c).is_some() {
        return c;
    }
    c.to_lowercase()
        .chain(c.to_uppercase())
        .find(|&d| alphabet.symbol(d).is_some())
        .unwrap_or(c)
}

/// One symbol per character; line breaks are ignored.
pub fn read_plain(alphabet: &Alphabet, content: &str) -> Result<Text> {
    project(
        alphabet,
        content.lines().enumerate().flat_map(|(l, line)| {
            line.trim_end_matches('\r').chars().enumerate().map(move |(c, ch)| (l + 1, c + 1, ch))
        }),
    )
}

/// Concatenates every sequence, skipping `>` headers and `;` comments.
/// Letters are matched to the alphabet regardless of case.
pub fn read_fasta(alphabet: &Alphabet, content: &str) -> Result<Text> {
    project(
        alphabet,
        content
            .lines()
            .enumerate()
            .filter(|(_, line)| !line.starts_with('>') && !line.starts_with(';'))
            .flat_map(|(l, line)| {
                line.trim_end()
                    .chars()
                    .enumerate()
                    .filter(|(_, ch)| !ch.is_whitespace())
                    .map(move |(c, ch)| (l + 1, c + 1, fold(alphabet, ch)))
            }),
    )
}

pub fn read_text(alphabet: &Alphabet, content: &str, format: TextFormat) -> Result<Text> {
    match format {
        TextFormat::Plain => read_plain(alphabet, content),
        TextFormat::Fasta => read_fasta(alphabet, content),
    }
}
