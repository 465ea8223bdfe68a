//! Finite binary words standing in for points of the one-sided full shift.
//!
//! Every "infinite" sequence in this crate is carried at a declared
//! truncation length. Comparisons that run out of symbols before the words
//! differ report [`WordOrder::EqualPrefix`] instead of guessing an order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite string over {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SymbolWord(Vec<u8>);

/// Outcome of a truncated lexicographic comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WordOrder {
    Less,
    /// The words agree on every index both of them carry.
    EqualPrefix,
    Greater,
}

impl WordOrder {
    pub fn is_less(self) -> bool {
        self == WordOrder::Less
    }

    pub fn reverse(self) -> WordOrder {
        match self {
            WordOrder::Less => WordOrder::Greater,
            WordOrder::Greater => WordOrder::Less,
            WordOrder::EqualPrefix => WordOrder::EqualPrefix,
        }
    }
}

impl SymbolWord {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidSymbol(char::from(b'0'.wrapping_add(bad))));
        }
        Ok(SymbolWord(symbols))
    }

    pub fn empty() -> Self {
        SymbolWord(Vec::new())
    }

    /// `0̄` truncated to `n` symbols.
    pub fn zeros(n: usize) -> Self {
        SymbolWord(vec![0; n])
    }

    /// `1̄` truncated to `n` symbols.
    pub fn ones(n: usize) -> Self {
        SymbolWord(vec![1; n])
    }

    /// `head` followed by `n - 1` copies of `tail`, e.g. `0 1̄|n` or `1 0̄|n`.
    pub fn head_then_constant(head: u8, tail: u8, n: usize) -> Self {
        assert!(head <= 1 && tail <= 1);
        let mut symbols = vec![tail; n];
        if let Some(first) = symbols.first_mut() {
            *first = head;
        }
        SymbolWord(symbols)
    }

    pub(crate) fn from_bits_unchecked(symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&s| s <= 1));
        SymbolWord(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    /// The first `n` symbols (the whole word if it is shorter).
    pub fn prefix(&self, n: usize) -> SymbolWord {
        SymbolWord(self.0[..n.min(self.len())].to_vec())
    }

    /// The `k`-fold shift as a borrowed slice, without allocating.
    pub fn suffix(&self, k: usize) -> &[u8] {
        &self.0[k.min(self.len())..]
    }

    pub fn shift(&self) -> Result<SymbolWord> {
        shift(self)
    }

    pub fn concat(&self, other: &SymbolWord) -> SymbolWord {
        let mut symbols = self.0.clone();
        symbols.extend_from_slice(&other.0);
        SymbolWord(symbols)
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: String = self.0.iter().map(|&s| if s == 0 { '0' } else { '1' }).collect();
        f.write_str(&text)
    }
}

impl fmt::Debug for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolWord({self})")
    }
}

impl FromStr for SymbolWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<u8>>>()
            .map(SymbolWord)
    }
}

impl Serialize for SymbolWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SymbolWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Lexicographic comparison of raw symbol slices, up to the shorter length.
pub fn compare_symbols(u: &[u8], v: &[u8]) -> WordOrder {
    match u.iter().zip(v).find(|(a, b)| a != b) {
        Some((a, b)) if a < b => WordOrder::Less,
        Some(_) => WordOrder::Greater,
        None => WordOrder::EqualPrefix,
    }
}

pub fn lex_compare(u: &SymbolWord, v: &SymbolWord) -> WordOrder {
    compare_symbols(&u.0, &v.0)
}

/// Index of the first differing symbol, if any.
pub fn first_difference(u: &SymbolWord, v: &SymbolWord) -> Option<usize> {
    u.0.iter().zip(&v.0).position(|(a, b)| a != b)
}

/// `d(u, v) = 2^{-k}` with `k` the first differing index (counted from 0),
/// and `0` for identical words.
pub fn metric_d(u: &SymbolWord, v: &SymbolWord) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    Ok(match first_difference(u, v) {
        None => 0.0,
        Some(k) => 2f64.powi(-(k as i32)),
    })
}

pub fn shift(u: &SymbolWord) -> Result<SymbolWord> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(SymbolWord(u.0[1..].to_vec()))
}

/// Value of a truncated word under the slope-`a` coding map, together with a
/// bound on the distance to the value of any infinite continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodedPoint {
    pub value: f64,
    pub tail_bound: f64,
}

pub(crate) fn check_slope(a: f64) -> Result<()> {
    if a.is_finite() && a > 1.0 && a < 2.0 {
        Ok(())
    } else {
        Err(Error::SlopeOutOfRange(a))
    }
}

/// Partial sum `(1 - 1/a) Σ_{k < len} u_k a^{-k}`.
///
/// Any infinite continuation of `u` codes a point in
/// `[value, value + a^{-len}]`; the reported bound is the looser
/// `a^{-(len - 1)}`.
pub fn coding_map(a: f64, u: &SymbolWord) -> Result<CodedPoint> {
    check_slope(a)?;
    let inv = a.recip();
    let mut weight = 1.0 - inv;
    let mut value = 0.0;
    for &s in &u.0 {
        if s == 1 {
            value += weight;
        }
        weight *= inv;
    }
    let tail_bound = a.powi(-(u.len() as i32 - 1).max(0));
    Ok(CodedPoint { value, tail_bound })
}

/// Centre of the cylinder coded by `u`: `g_{u_0} ∘ … ∘ g_{u_{len-1}}(1/2)`,
/// i.e. the partial sum plus `a^{-len} / 2`. The error against any infinite
/// continuation is at most `a^{-len} / 2`.
pub fn coding_map_cylinder_midpoint(a: f64, u: &SymbolWord) -> Result<CodedPoint> {
    check_slope(a)?;
    let inv = a.recip();
    let lift = 1.0 - inv;
    let value = u.0.iter().rev().fold(0.5, |x, &s| x * inv + if s == 1 { lift } else { 0.0 });
    Ok(CodedPoint { value, tail_bound: 0.5 * a.powi(-(u.len() as i32)) })
}
