//! Free-group words over named bases.
//!
//! Words are always stored freely reduced. The text format is a sequence of
//! whitespace-separated tokens `sym`, `sym^-1` or `sym^k` (`k` a nonzero
//! integer, expanded on parse). Only `sym` and `sym^-1` are ever emitted.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("duplicate symbol `{0}` in basis")]
    DuplicateSymbol(String),
    #[error("symbol `{symbol}` is not in basis {basis}")]
    NotInBasis { symbol: String, basis: String },
    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },
    #[error("image count {found} does not match domain rank {expected}")]
    ImageCount { expected: usize, found: usize },
    #[error("malformed automorphism line `{0}`")]
    MalformedLine(String),
}

/// A basis identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, WordError> {
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if valid {
            Ok(Symbol(Arc::from(name)))
        } else {
            Err(WordError::InvalidSymbol(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Symbol {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Symbol::new(s)
    }
}

/// A basis element or its inverse.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub symbol: Symbol,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: Symbol, inverse: bool) -> Self {
        Letter { symbol, inverse }
    }

    pub fn positive(symbol: Symbol) -> Self {
        Letter { symbol, inverse: false }
    }

    pub fn inverse(&self) -> Letter {
        Letter { symbol: self.symbol.clone(), inverse: !self.inverse }
    }

    pub fn sign(&self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.symbol)
        } else {
            write!(f, "{}", self.symbol)
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = parse_token(s)?;
        match letters.as_slice() {
            [l] => Ok(l.clone()),
            _ => Err(WordError::InvalidToken(s.to_string())),
        }
    }
}

fn parse_token(token: &str) -> Result<Vec<Letter>, WordError> {
    let (name, power) = match token.split_once('^') {
        Some((name, exp)) => {
            let k: i64 = exp.parse().map_err(|_| WordError::InvalidToken(token.to_string()))?;
            if k == 0 {
                return Err(WordError::InvalidToken(token.to_string()));
            }
            (name, k)
        }
        None => (token, 1),
    };
    let symbol = Symbol::new(name)?;
    let letter = Letter::new(symbol, power < 0);
    Ok(vec![letter; power.unsigned_abs() as usize])
}

/// An ordered list of distinct symbols.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    symbols: Vec<Symbol>,
}

impl Basis {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, WordError> {
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(WordError::DuplicateSymbol(s.to_string()));
            }
        }
        Ok(Basis { symbols })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let symbols = names.iter().map(|n| Symbol::new(n.as_ref())).collect::<Result<_, _>>()?;
        Basis::new(symbols)
    }

    /// Parses a comma- or whitespace-separated symbol list.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let names: Vec<&str> =
            text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        Basis::from_names(&names)
    }

    /// Generator names `prefix1, prefix2, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        let symbols = (1..=n).map(|i| Symbol::new(&format!("{prefix}{i}")).unwrap()).collect();
        Basis { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &Symbol {
        &self.symbols[index]
    }

    pub fn index_of(&self, symbol: &Symbol) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.index_of(symbol).is_some()
    }

    pub fn letter(&self, index: usize, inverse: bool) -> Letter {
        Letter::new(self.symbols[index].clone(), inverse)
    }

    pub fn check_word(&self, word: &Word) -> Result<(), WordError> {
        match word.letters().iter().find(|l| !self.contains(&l.symbol)) {
            Some(l) => Err(WordError::NotInBasis { symbol: l.symbol.to_string(), basis: self.to_string() }),
            None => Ok(()),
        }
    }

    /// The basis restricted to the given symbols, in basis order.
    pub fn restrict(&self, keep: impl Fn(&Symbol) -> bool) -> Basis {
        Basis { symbols: self.symbols.iter().filter(|s| keep(s)).cloned().collect() }
    }

    /// All letters of the basis, positive before negative for each symbol.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.symbols.iter().flat_map(|s| [Letter::new(s.clone(), false), Letter::new(s.clone(), true)])
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.symbols.iter().map(Symbol::as_str).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A freely reduced word.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            if letters.last().is_some_and(|last| last.symbol == l.symbol && last.inverse != l.inverse) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn symbol(s: &Symbol) -> Self {
        Word::letter(Letter::positive(s.clone()))
    }

    pub fn parse(text: &str) -> Result<Self, WordError> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(Word::identity());
        }
        let mut raw = Vec::new();
        for token in trimmed.split_whitespace() {
            raw.extend(parse_token(token)?);
        }
        Ok(Word::reduce(raw))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.letters.iter().chain(other.letters.iter()).cloned())
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inverse).collect() }
    }

    /// `self · inner · self^-1`.
    pub fn conjugate(&self, inner: &Word) -> Word {
        self.concat(inner).concat(&self.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Number of occurrences of `symbol` with either sign.
    pub fn occurrences(&self, symbol: &Symbol) -> usize {
        self.letters.iter().filter(|l| &l.symbol == symbol).count()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.letters.iter().map(|l| &l.symbol)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Word::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Symbol::new(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Basis {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.symbols.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let symbols = Vec::<Symbol>::deserialize(deserializer)?;
        Basis::new(symbols).map_err(serde::de::Error::custom)
    }
}

/// A homomorphism between free groups, given by the images of the domain basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    domain: Basis,
    codomain: Basis,
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(domain: Basis, codomain: Basis, images: Vec<Word>) -> Result<Self, WordError> {
        if images.len() != domain.len() {
            return Err(WordError::ImageCount { expected: domain.len(), found: images.len() });
        }
        for w in &images {
            codomain.check_word(w)?;
        }
        Ok(Endomorphism { domain, codomain, images })
    }

    pub fn identity(basis: &Basis) -> Self {
        let images = basis.symbols().iter().map(Word::symbol).collect();
        Endomorphism { domain: basis.clone(), codomain: basis.clone(), images }
    }

    pub fn domain(&self) -> &Basis {
        &self.domain
    }

    pub fn codomain(&self) -> &Basis {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, symbol: &Symbol) -> Option<&Word> {
        self.domain.index_of(symbol).map(|i| &self.images[i])
    }

    pub fn image_of_letter(&self, letter: &Letter) -> Option<Word> {
        self.image(&letter.symbol).map(|w| if letter.inverse { w.inverse() } else { w.clone() })
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self.images.iter().zip(self.domain.symbols()).all(|(w, s)| *w == Word::symbol(s))
    }

    pub fn apply(&self, word: &Word) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for l in word.letters() {
            let img = self.image_of_letter(l).ok_or_else(|| WordError::NotInBasis {
                symbol: l.symbol.to_string(),
                basis: self.domain.to_string(),
            })?;
            raw.extend(img.letters().iter().cloned());
        }
        Ok(Word::reduce(raw))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Endomorphism) -> Result<Endomorphism, WordError> {
        if inner.codomain != self.domain {
            return Err(WordError::BasisMismatch {
                expected: self.domain.to_string(),
                found: inner.codomain.to_string(),
            });
        }
        let images = inner.images.iter().map(|w| self.apply(w)).collect::<Result<_, _>>()?;
        Ok(Endomorphism { domain: inner.domain.clone(), codomain: self.codomain.clone(), images })
    }

    /// Parses `sym -> word` lines; blank lines and `#` comments are skipped.
    pub fn parse(domain: &Basis, codomain: &Basis, text: &str) -> Result<Self, WordError> {
        let mut images: Vec<Option<Word>> = vec![None; domain.len()];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| WordError::MalformedLine(line.to_string()))?;
            let sym = Symbol::new(lhs.trim())?;
            let idx = domain
                .index_of(&sym)
                .ok_or_else(|| WordError::NotInBasis { symbol: sym.to_string(), basis: domain.to_string() })?;
            images[idx] = Some(Word::parse(rhs)?);
        }
        let images = images
            .into_iter()
            .zip(domain.symbols())
            .map(|(w, s)| w.unwrap_or_else(|| Word::symbol(s)))
            .collect();
        Endomorphism::new(domain.clone(), codomain.clone(), images)
    }
}

/// Serialized as a map from domain symbols to image words, in basis order.
impl Serialize for Endomorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.images.len()))?;
        for (s, w) in self.domain.symbols().iter().zip(&self.images) {
            map.serialize_entry(s, w)?;
        }
        map.end()
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, w) in self.domain.symbols().iter().zip(&self.images) {
            writeln!(f, "{s} -> {w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.domain.symbols().iter().zip(&self.images).map(|(s, w)| format!("{s}↦{w}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("a a^-1"), Word::identity());
        assert_eq!(w("a b b^-1 a"), w("a a"));
        assert_eq!(w("b1^-2 b2^-2 b1^-2 b1^2 b2^2 b1^2 b2^2"), w("b2^2"));
    }

    #[test]
    fn concat_and_invert() {
        assert_eq!(w("a").concat(&w("a^-1")), Word::identity());
        assert_eq!(w("a b").concat(&w("b^-1 c")), w("a c"));
        assert_eq!(w("b1^2 b2^2").concat(&w("b2^-2")), w("b1^2"));
        assert_eq!(w("a b").inverse(), w("b^-1 a^-1"));
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w("b1^2 b2^2").inverse(), w("b2^-2 b1^-2"));
    }

    #[test]
    fn text_format() {
        assert_eq!(w("a^3 b^-2").to_string(), "a a a b^-1 b^-1");
        assert_eq!(Word::identity().to_string(), "");
        assert!(Word::parse("a^0").is_err());
        assert!(Word::parse("1a").is_err());
        assert!(Word::parse("a^x").is_err());
        assert_eq!(w("1"), Word::identity());
    }

    #[test]
    fn basis_rejects_duplicates() {
        assert!(Basis::parse("a,b,a").is_err());
        assert_eq!(Basis::parse("a, b c").unwrap().len(), 3);
    }

    #[test]
    fn apply_and_compose() {
        let basis = Basis::parse("a,b").unwrap();
        let alpha = Endomorphism::parse(&basis, &basis, "a -> a b^-1\nb -> b").unwrap();
        assert_eq!(alpha.apply(&w("a a b a^-1")).unwrap(), w("a b^-1 a b a^-1"));
        let beta = Endomorphism::parse(&basis, &basis, "a -> a b").unwrap();
        assert!(alpha.compose(&beta).unwrap().is_identity());
        let id = Endomorphism::identity(&basis);
        assert_eq!(id.compose(&alpha).unwrap(), alpha);
        assert!(alpha.apply(&w("c")).is_err());
        let other = Basis::parse("x").unwrap();
        assert!(alpha.compose(&Endomorphism::identity(&other)).is_err());
    }

    #[test]
    fn endomorphism_text_round_trip() {
        let basis = Basis::parse("a,b").unwrap();
        let alpha = Endomorphism::parse(&basis, &basis, "a -> a b^-1\n# comment\nb -> b a").unwrap();
        let again = Endomorphism::parse(&basis, &basis, &alpha.to_string()).unwrap();
        assert_eq!(alpha, again);
    }

    fn raw_letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..24).prop_map(|v| {
            let names = ["a", "b", "c"];
            v.into_iter().map(|(i, inv)| Letter::new(Symbol::new(names[i]).unwrap(), inv)).collect()
        })
    }

    // Naive reducer: cancel the leftmost or rightmost adjacent pair repeatedly.
    fn reduce_by_scanning(mut v: Vec<Letter>, from_right: bool) -> Vec<Letter> {
        loop {
            let pairs: Vec<usize> =
                (0..v.len().saturating_sub(1)).filter(|&i| v[i] == v[i + 1].inverse()).collect();
            let pick = if from_right { pairs.last() } else { pairs.first() };
            match pick {
                Some(&i) => {
                    v.drain(i..i + 2);
                }
                None => return v,
            }
        }
    }

    proptest! {
        #[test]
        fn reduction_is_confluent(raw in raw_letters()) {
            let r = Word::reduce(raw.clone());
            let left = reduce_by_scanning(raw.clone(), false);
            let right = reduce_by_scanning(raw, true);
            prop_assert_eq!(r.letters(), left.as_slice());
            prop_assert_eq!(r.letters(), right.as_slice());
            prop_assert_eq!(Word::reduce(r.letters().to_vec()), r);
        }

        #[test]
        fn inverse_cancels(raw in raw_letters()) {
            let u = Word::reduce(raw);
            prop_assert!(u.concat(&u.inverse()).is_identity());
            prop_assert_eq!(u.inverse().inverse(), u.clone());
            prop_assert_eq!(Word::parse(&u.to_string()).unwrap(), u);
        }
    }
}
