//! Words over an alphabet extended with the separator token.
//!
//! The separator is not an alphabet character: it is a distinct variant of
//! [`Symbol`], rendered as `1` in text. A word's rank is its separator count.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A single symbol of a separator-extended word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Sep,
    Letter(char),
}

impl Symbol {
    pub fn is_sep(self) -> bool {
        matches!(self, Symbol::Sep)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Sep => f.write_str("1"),
            Symbol::Letter(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("gap index {index} out of range for a word of rank {rank}")]
    IndexOutOfRank { index: usize, rank: usize },
    #[error("expected {expected} fillers, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// A word over `Σ ∪ {SEP}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SepWord(Vec<Symbol>);

impl SepWord {
    pub fn empty() -> Self {
        SepWord(Vec::new())
    }

    pub fn sep() -> Self {
        SepWord(vec![Symbol::Sep])
    }

    /// `n` consecutive separators.
    pub fn seps(n: usize) -> Self {
        SepWord(vec![Symbol::Sep; n])
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        SepWord(symbols)
    }

    /// A separator-free word spelling `letters`.
    pub fn from_letters(letters: &[char]) -> Self {
        SepWord(letters.iter().map(|&c| Symbol::Letter(c)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.0.iter().filter(|s| s.is_sep()).count()
    }

    /// Number of non-separator symbols.
    pub fn letter_count(&self) -> usize {
        self.0.len() - self.rank()
    }

    /// The letters of a separator-free word, `None` if a separator occurs.
    pub fn letters(&self) -> Option<Vec<char>> {
        self.0
            .iter()
            .map(|s| match s {
                Symbol::Letter(c) => Some(*c),
                Symbol::Sep => None,
            })
            .collect()
    }

    /// Renders letters verbatim with separators as `1`; the empty word is `""`.
    pub fn to_plain(&self) -> String {
        self.0.iter().map(|s| s.to_string()).collect()
    }

    pub fn concat(&self, other: &SepWord) -> SepWord {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        SepWord(out)
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.0.push(symbol);
    }

    pub fn extend(&mut self, other: &SepWord) {
        self.0.extend_from_slice(&other.0);
    }

    /// Position of the `j`-th separator (1-based).
    pub fn sep_position(&self, j: usize) -> Option<usize> {
        if j == 0 {
            return None;
        }
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_sep())
            .nth(j - 1)
            .map(|(i, _)| i)
    }

    /// Replaces the `j`-th separator of `self` by `filler`.
    pub fn intercalate(&self, j: usize, filler: &SepWord) -> Result<SepWord, WordError> {
        let pos = self.sep_position(j).ok_or(WordError::IndexOutOfRank {
            index: j,
            rank: self.rank(),
        })?;
        let mut out = Vec::with_capacity(self.len() + filler.len() - 1);
        out.extend_from_slice(&self.0[..pos]);
        out.extend_from_slice(&filler.0);
        out.extend_from_slice(&self.0[pos + 1..]);
        Ok(SepWord(out))
    }

    /// Replaces every separator simultaneously, the `i`-th by `fillers[i]`.
    pub fn wrap(&self, fillers: &[SepWord]) -> Result<SepWord, WordError> {
        let rank = self.rank();
        if fillers.len() != rank {
            return Err(WordError::ArityMismatch {
                expected: rank,
                got: fillers.len(),
            });
        }
        let mut out = Vec::with_capacity(self.len() + fillers.iter().map(SepWord::len).sum::<usize>());
        let mut next = fillers.iter();
        for &s in &self.0 {
            match s {
                Symbol::Sep => out.extend_from_slice(&next.next().expect("arity checked").0),
                letter => out.push(letter),
            }
        }
        Ok(SepWord(out))
    }

    /// Splits at every separator: a rank-`l` word yields `l + 1` separator-free pieces.
    pub fn segments(&self) -> Vec<SepWord> {
        self.0
            .split(|s| s.is_sep())
            .map(|piece| SepWord(piece.to_vec()))
            .collect()
    }

    /// Joins pieces with single separators; inverse of [`SepWord::segments`].
    pub fn join(pieces: &[SepWord]) -> SepWord {
        let mut out = SepWord::empty();
        for (i, p) in pieces.iter().enumerate() {
            if i > 0 {
                out.push(Symbol::Sep);
            }
            out.extend(p);
        }
        out
    }

    /// `self` repeated `p` times.
    pub fn power(&self, p: usize) -> SepWord {
        SepWord(self.0.repeat(p))
    }
}

/// Free-function form of [`SepWord::rank`].
pub fn rank(w: &SepWord) -> usize {
    w.rank()
}

/// Free-function form of [`SepWord::intercalate`].
pub fn word_intercalate(w1: &SepWord, j: usize, w2: &SepWord) -> Result<SepWord, WordError> {
    w1.intercalate(j, w2)
}

/// Free-function form of [`SepWord::wrap`].
pub fn word_wrap(w: &SepWord, fillers: &[SepWord]) -> Result<SepWord, WordError> {
    w.wrap(fillers)
}

impl fmt::Display for SepWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for SepWord {
    type Err = std::convert::Infallible;

    /// `1` is read as the separator, `eps` (or `""`) as the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "eps" {
            return Ok(SepWord::empty());
        }
        Ok(SepWord(
            s.chars()
                .map(|c| if c == '1' { Symbol::Sep } else { Symbol::Letter(c) })
                .collect(),
        ))
    }
}

impl From<&str> for SepWord {
    fn from(s: &str) -> Self {
        s.parse().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> SepWord {
        SepWord::from(s)
    }

    #[test]
    fn rank_counts_separators() {
        assert_eq!(rank(&w("a1b11d")), 3);
        assert_eq!(rank(&w("")), 0);
        assert_eq!(rank(&w("abc")), 0);
    }

    #[test]
    fn intercalation_examples() {
        assert_eq!(word_intercalate(&w("a1b11d"), 2, &w("c1c")).unwrap(), w("a1bc1c1d"));
        assert_eq!(word_intercalate(&w("a1b1c"), 2, &w("a1b")).unwrap(), w("a1ba1bc"));
        assert_eq!(word_intercalate(&w("1"), 1, &w("xy1z")).unwrap(), w("xy1z"));
    }

    #[test]
    fn intercalation_out_of_rank() {
        assert_eq!(
            word_intercalate(&w("a1b"), 2, &w("c")),
            Err(WordError::IndexOutOfRank { index: 2, rank: 1 })
        );
        assert!(word_intercalate(&w("a1b"), 0, &w("c")).is_err());
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(word_wrap(&w("a1b1c"), &[w("X"), w("Y")]).unwrap(), w("aXbYc"));
        assert_eq!(word_wrap(&w("ab"), &[]).unwrap(), w("ab"));
        assert_eq!(word_wrap(&w("1"), &[w("q1r")]).unwrap(), w("q1r"));
        assert_eq!(
            word_wrap(&w("a1"), &[]),
            Err(WordError::ArityMismatch { expected: 1, got: 0 })
        );
    }

    #[test]
    fn rendering() {
        assert_eq!(w("").to_string(), "eps");
        assert_eq!(w("eps"), SepWord::empty());
        assert_eq!(w("a1b").to_string(), "a1b");
        assert_eq!(w("").to_plain(), "");
    }

    #[test]
    fn segments_and_join() {
        let x = w("ab11c");
        assert_eq!(x.segments(), vec![w("ab"), w(""), w("c")]);
        assert_eq!(SepWord::join(&x.segments()), x);
    }

    fn arb_word() -> impl Strategy<Value = SepWord> {
        prop::collection::vec(prop_oneof![Just('a'), Just('b'), Just('1')], 0..8)
            .prop_map(|cs| cs.into_iter().collect::<String>().as_str().into())
    }

    proptest! {
        #[test]
        fn intercalation_rank_and_length(u in arb_word(), v in arb_word(), j in 1usize..6) {
            prop_assume!(j <= u.rank());
            let r = u.intercalate(j, &v).unwrap();
            prop_assert_eq!(r.rank(), u.rank() + v.rank() - 1);
            prop_assert_eq!(r.len(), u.len() + v.len() - 1);
            prop_assert_eq!(r.letter_count(), u.letter_count() + v.letter_count());
        }

        #[test]
        fn wrap_with_bare_separators_is_identity(u in arb_word()) {
            let fillers = vec![SepWord::sep(); u.rank()];
            prop_assert_eq!(u.wrap(&fillers).unwrap(), u);
        }
    }
}
