//! Symbol sequences, alphabets and kernel parameters.

use std::collections::HashMap;

use crate::error::{Result, SskError};
use crate::hdr::HdrScalar;

/// A string encoded as symbol ids over an alphabet of known size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolSeq {
    symbols: Vec<u32>,
    alphabet_size: usize,
}

impl SymbolSeq {
    pub fn new(symbols: Vec<u32>, alphabet_size: usize) -> Result<Self> {
        if let Some(&symbol) = symbols.iter().find(|&&c| c as usize >= alphabet_size) {
            return Err(SskError::SymbolOutOfRange {
                symbol,
                alphabet_size,
            });
        }
        Ok(SymbolSeq {
            symbols,
            alphabet_size,
        })
    }

    pub fn empty(alphabet_size: usize) -> Self {
        SymbolSeq {
            symbols: Vec::new(),
            alphabet_size,
        }
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.symbols[i - 1]
    }

    /// The prefix `s(1:i)`.
    pub fn prefix(&self, i: usize) -> SymbolSeq {
        SymbolSeq {
            symbols: self.symbols[..i].to_vec(),
            alphabet_size: self.alphabet_size,
        }
    }
}

/// Tokenisation used when turning text into symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TokenMode {
    /// One symbol per Unicode scalar value, text taken verbatim.
    #[default]
    Character,
    /// Lowercased words split on whitespace, punctuation stripped.
    Word,
}

/// Bidirectional token <-> symbol-id table.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    ids: HashMap<String, u32>,
    tokens: Vec<String>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }
}

/// Splits text into tokens according to `mode`.
pub fn tokenize(text: &str, mode: TokenMode) -> Vec<String> {
    match mode {
        TokenMode::Character => text.chars().map(String::from).collect(),
        TokenMode::Word => text
            .split_whitespace()
            .map(|word| {
                word.chars()
                    .filter(|c| !c.is_ascii_punctuation() && !c.is_ascii_control())
                    .flat_map(char::to_lowercase)
                    .collect::<String>()
            })
            .filter(|word| !word.is_empty())
            .collect(),
    }
}

/// Encodes all texts over one shared alphabet.
pub fn encode_texts<S: AsRef<str>>(texts: &[S], mode: TokenMode) -> (Alphabet, Vec<SymbolSeq>) {
    let mut alphabet = Alphabet::new();
    let raw: Vec<Vec<u32>> = texts
        .iter()
        .map(|text| {
            tokenize(text.as_ref(), mode)
                .iter()
                .map(|token| alphabet.intern(token))
                .collect()
        })
        .collect();
    let size = alphabet.len();
    let seqs = raw
        .into_iter()
        .map(|symbols| SymbolSeq {
            symbols,
            alphabet_size: size,
        })
        .collect();
    (alphabet, seqs)
}

/// Character-encodes a pair of strings over their joint alphabet.
pub fn encode_pair(s: &str, t: &str) -> (SymbolSeq, SymbolSeq) {
    let (_, mut seqs) = encode_texts(&[s, t], TokenMode::Character);
    let t = seqs.pop().expect("two sequences");
    let s = seqs.pop().expect("two sequences");
    (s, t)
}

/// For every symbol, the ascending 1-based positions where it occurs.
pub fn build_occurrence_index(s: &SymbolSeq, alphabet_size: usize) -> Vec<Vec<u32>> {
    let mut index = vec![Vec::new(); alphabet_size];
    for (pos, &c) in s.symbols.iter().enumerate() {
        index[c as usize].push(pos as u32 + 1);
    }
    index
}

/// Subsequence length `p` and decay penalty `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    p: usize,
    lambda: f64,
}

impl KernelParams {
    pub fn new(p: usize, lambda: f64) -> Result<Self> {
        if p == 0 {
            return Err(SskError::InvalidLength);
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(SskError::InvalidLambda(lambda));
        }
        Ok(KernelParams { p, lambda })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `K_1(s,t) ..= K_p(s,t)` for one string pair.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    values: Vec<HdrScalar>,
}

impl KernelVector {
    pub fn zeros(p: usize) -> Self {
        KernelVector {
            values: vec![HdrScalar::ZERO; p],
        }
    }

    pub fn from_values(values: Vec<HdrScalar>) -> Self {
        KernelVector { values }
    }

    /// `K_q` for 1-based level `q`.
    pub fn level(&self, q: usize) -> HdrScalar {
        self.values[q - 1]
    }

    pub fn last(&self) -> HdrScalar {
        self.values.last().copied().unwrap_or(HdrScalar::ZERO)
    }

    pub fn values(&self) -> &[HdrScalar] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [HdrScalar] {
        &mut self.values
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    /// Largest relative deviation over all levels.
    pub fn max_relative_difference(&self, other: &KernelVector) -> f64 {
        assert_eq!(self.p(), other.p(), "kernel vectors of different length");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.relative_difference(*b))
            .fold(0.0, f64::max)
    }
}
