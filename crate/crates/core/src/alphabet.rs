use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Symbol = u8;

/// A text is a sequence of symbol indices.
pub type Text = Vec<Symbol>;

/// Ordered set of single-character symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    chars: Vec<char>,
}

impl Alphabet {
    pub fn new(chars: impl IntoIterator<Item = char>) -> Result<Self> {
        let chars: Vec<char> = chars.into_iter().collect();
        if chars.is_empty() {
            return Err(Error::Input("alphabet must contain at least one symbol".into()));
        }
        if chars.len() > 255 {
            return Err(Error::Input("alphabet is limited to 255 symbols".into()));
        }
        for (i, c) in chars.iter().enumerate() {
            if chars[..i].contains(c) {
                return Err(Error::Input(format!("duplicate symbol '{c}' in alphabet")));
            }
        }
        Ok(Alphabet { chars })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.chars())
    }

    /// The alphabet {a, b}.
    pub fn binary() -> Self {
        Alphabet { chars: vec!['a', 'b'] }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn symbol(&self, c: char) -> Option<Symbol> {
        self.chars.iter().position(|&d| d == c).map(|i| i as Symbol)
    }

    pub fn char_of(&self, x: Symbol) -> char {
        self.chars[x as usize]
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        0..self.chars.len() as Symbol
    }

    /// Encodes a string, reporting the first unknown character with its position.
    pub fn encode(&self, s: &str) -> Result<Text> {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                self.symbol(c).ok_or_else(|| {
                    Error::Input(format!(
                        "symbol '{c}' at position {i} is not in alphabet \"{self}\""
                    ))
                })
            })
            .collect()
    }

    pub fn decode(&self, t: &[Symbol]) -> String {
        t.iter().map(|&x| self.char_of(x)).collect()
    }
}

impl std::fmt::Display for Alphabet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.chars {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Non-empty word over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    alphabet: Alphabet,
    symbols: Vec<Symbol>,
}

impl Pattern {
    pub fn new(alphabet: Alphabet, w: &str) -> Result<Self> {
        let symbols = alphabet.encode(w)?;
        Self::from_symbols(alphabet, symbols)
    }

    pub fn from_symbols(alphabet: Alphabet, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Input("pattern must be non-empty".into()));
        }
        if let Some(i) = symbols.iter().position(|&x| x as usize >= alphabet.len()) {
            return Err(Error::Input(format!("pattern symbol at position {i} out of alphabet")));
        }
        Ok(Pattern { alphabet, symbols })
    }

    /// Shorthand for a pattern over {a, b}.
    pub fn binary(w: &str) -> Result<Self> {
        Self::new(Alphabet::binary(), w)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn at(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.alphabet.decode(&self.symbols))
    }
}

/// All patterns of the given length, in lexicographic order of the alphabet.
pub fn all_patterns(alphabet: &Alphabet, len: usize) -> Vec<Pattern> {
    all_texts(alphabet.len(), len)
        .into_iter()
        .map(|s| Pattern { alphabet: alphabet.clone(), symbols: s })
        .collect()
}

/// Every word of length `len` over `a` symbols, lexicographic.
pub fn all_texts(a: usize, len: usize) -> Vec<Text> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut grown = Vec::with_capacity(out.len() * a);
        for t in &out {
            for x in 0..a {
                let mut u = t.clone();
                u.push(x as Symbol);
                grown.push(u);
            }
        }
        out = grown;
    }
    out
}

/// Every word of length at most `max_len`, shortest first.
pub fn all_texts_up_to(a: usize, max_len: usize) -> Vec<Text> {
    (0..=max_len).flat_map(|n| all_texts(a, n)).collect()
}
