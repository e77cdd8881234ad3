//! The term algebra: words, separators, nonterminals and variables combined
//! with concatenation and `j`-intercalation.
//!
//! Ranks are computed when a term is built. An intercalation whose gap index
//! exceeds the rank of its left argument cannot be constructed.

use std::fmt;

use thiserror::Error;

use crate::word::{SepWord, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("intercalation gap {gap} needs a left argument of rank >= {gap}, found rank {rank}")]
    GapOutOfRank { gap: usize, rank: usize },
    #[error("term is not ground: nonterminal {0} occurs")]
    NotGround(String),
    #[error("variable x{0} has no value")]
    UnboundVariable(usize),
    #[error("substituted term has rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("no subterm at the given position")]
    BadPosition,
}

/// Child selector in a binary node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Path from the root to a subterm.
pub type Position = Vec<Side>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermNode {
    /// A separator-free word; the empty word is `Word(vec![])`.
    Word(Vec<char>),
    Sep,
    Nonterminal(String),
    Var(usize),
    Concat(Box<Term>, Box<Term>),
    Intercalate(usize, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    node: TermNode,
    rank: usize,
}

/// A term that may contain ranked variables. Variables are identified by
/// index, each occurring at most once.
pub type Multicontext = Term;

/// A leaf that [`Term::eval_with`] asks the caller to value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hole<'a> {
    Nonterminal(&'a str, usize),
    Var(usize, usize),
}

impl Term {
    pub fn word(letters: &str) -> Term {
        Term::letters(letters.chars().collect())
    }

    pub fn letters(letters: Vec<char>) -> Term {
        Term {
            node: TermNode::Word(letters),
            rank: 0,
        }
    }

    pub fn empty() -> Term {
        Term::letters(Vec::new())
    }

    pub fn sep() -> Term {
        Term {
            node: TermNode::Sep,
            rank: 1,
        }
    }

    pub fn nonterminal(name: impl Into<String>, rank: usize) -> Term {
        Term {
            node: TermNode::Nonterminal(name.into()),
            rank,
        }
    }

    pub fn var(index: usize, rank: usize) -> Term {
        Term {
            node: TermNode::Var(index),
            rank,
        }
    }

    pub fn concat(left: Term, right: Term) -> Term {
        let rank = left.rank + right.rank;
        Term {
            node: TermNode::Concat(Box::new(left), Box::new(right)),
            rank,
        }
    }

    pub fn intercalate(gap: usize, left: Term, right: Term) -> Result<Term, TermError> {
        if gap == 0 || gap > left.rank {
            return Err(TermError::GapOutOfRank {
                gap,
                rank: left.rank,
            });
        }
        let rank = left.rank + right.rank - 1;
        Ok(Term {
            node: TermNode::Intercalate(gap, Box::new(left), Box::new(right)),
            rank,
        })
    }

    /// Builds a term spelling a ground word, separators included.
    pub fn from_word(w: &SepWord) -> Term {
        let mut pieces = Vec::new();
        for (i, seg) in w.segments().into_iter().enumerate() {
            if i > 0 {
                pieces.push(Term::sep());
            }
            if !seg.is_empty() {
                pieces.push(Term::letters(seg.letters().expect("segments are separator-free")));
            }
        }
        pieces
            .into_iter()
            .reduce(Term::concat)
            .unwrap_or_else(Term::empty)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn node(&self) -> &TermNode {
        &self.node
    }

    pub fn children(&self) -> Option<(&Term, &Term)> {
        match &self.node {
            TermNode::Concat(l, r) | TermNode::Intercalate(_, l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_none()
    }

    /// True when no nonterminal occurs (variables are allowed).
    pub fn is_ground(&self) -> bool {
        match &self.node {
            TermNode::Nonterminal(_) => false,
            TermNode::Concat(l, r) | TermNode::Intercalate(_, l, r) => l.is_ground() && r.is_ground(),
            _ => true,
        }
    }

    pub fn depth(&self) -> usize {
        match self.children() {
            Some((l, r)) => 1 + l.depth().max(r.depth()),
            None => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self.children() {
            Some((l, r)) => 1 + l.size() + r.size(),
            None => 1,
        }
    }

    /// Variables with their ranks, in left-to-right order.
    pub fn vars(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |t| {
            if let TermNode::Var(i) = t.node {
                out.push((i, t.rank));
            }
        });
        out
    }

    /// Nonterminal leaves with their ranks, in left-to-right order.
    pub fn nonterminals(&self) -> Vec<(&str, usize)> {
        let mut out = Vec::new();
        self.collect_nonterminals(&mut out);
        out
    }

    fn collect_nonterminals<'a>(&'a self, out: &mut Vec<(&'a str, usize)>) {
        match &self.node {
            TermNode::Nonterminal(n) => out.push((n.as_str(), self.rank)),
            TermNode::Concat(l, r) | TermNode::Intercalate(_, l, r) => {
                l.collect_nonterminals(out);
                r.collect_nonterminals(out);
            }
            _ => {}
        }
    }

    fn visit_leaves(&self, f: &mut impl FnMut(&Term)) {
        match &self.node {
            TermNode::Concat(l, r) | TermNode::Intercalate(_, l, r) => {
                l.visit_leaves(f);
                r.visit_leaves(f);
            }
            _ => f(self),
        }
    }

    /// Every subterm with its position, in preorder.
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((pos, t)) = stack.pop() {
            if let Some((l, r)) = t.children() {
                let mut rp = pos.clone();
                rp.push(Side::Right);
                stack.push((rp, r));
                let mut lp = pos.clone();
                lp.push(Side::Left);
                stack.push((lp, l));
            }
            out.push((pos, t));
        }
        out
    }

    pub fn subterm(&self, pos: &[Side]) -> Option<&Term> {
        let mut t = self;
        for side in pos {
            let (l, r) = t.children()?;
            t = match side {
                Side::Left => l,
                Side::Right => r,
            };
        }
        Some(t)
    }

    /// Replaces the subterm at `pos` with `new`, which must have the same rank.
    pub fn replace_at(&self, pos: &[Side], new: Term) -> Result<Term, TermError> {
        let Some((side, rest)) = pos.split_first() else {
            if new.rank != self.rank {
                return Err(TermError::RankMismatch {
                    expected: self.rank,
                    found: new.rank,
                });
            }
            return Ok(new);
        };
        let rebuild = |l: Term, r: Term| -> Term {
            let node = match &self.node {
                TermNode::Concat(..) => TermNode::Concat(Box::new(l), Box::new(r)),
                TermNode::Intercalate(j, ..) => TermNode::Intercalate(*j, Box::new(l), Box::new(r)),
                _ => unreachable!(),
            };
            Term {
                node,
                rank: self.rank,
            }
        };
        let (l, r) = self.children().ok_or(TermError::BadPosition)?;
        Ok(match side {
            Side::Left => rebuild(l.replace_at(rest, new)?, r.clone()),
            Side::Right => rebuild(l.clone(), r.replace_at(rest, new)?),
        })
    }

    /// Replaces variables by terms of equal rank; unmapped variables stay.
    pub fn substitute(&self, f: &impl Fn(usize) -> Option<Term>) -> Result<Term, TermError> {
        Ok(match &self.node {
            TermNode::Var(i) => match f(*i) {
                Some(t) if t.rank != self.rank => {
                    return Err(TermError::RankMismatch {
                        expected: self.rank,
                        found: t.rank,
                    })
                }
                Some(t) => t,
                None => self.clone(),
            },
            TermNode::Concat(l, r) => Term::concat(l.substitute(f)?, r.substitute(f)?),
            TermNode::Intercalate(j, l, r) => Term::intercalate(*j, l.substitute(f)?, r.substitute(f)?)?,
            _ => self.clone(),
        })
    }

    /// The skeleton: nonterminal leaves replaced, left to right, by variables
    /// `x_0, x_1, …` of the same rank. Returns the replaced names in order.
    pub fn skeleton(&self) -> (Multicontext, Vec<String>) {
        fn go(t: &Term, names: &mut Vec<String>) -> Term {
            match &t.node {
                TermNode::Nonterminal(n) => {
                    names.push(n.clone());
                    Term::var(names.len() - 1, t.rank)
                }
                TermNode::Concat(l, r) => Term::concat(go(l, names), go(r, names)),
                TermNode::Intercalate(j, l, r) => Term {
                    node: TermNode::Intercalate(*j, Box::new(go(l, names)), Box::new(go(r, names))),
                    rank: t.rank,
                },
                _ => t.clone(),
            }
        }
        let mut names = Vec::new();
        let sk = go(self, &mut names);
        (sk, names)
    }

    /// Evaluates a ground, variable-free term.
    pub fn eval(&self) -> Result<SepWord, TermError> {
        self.eval_with(&mut |hole| match hole {
            Hole::Nonterminal(n, _) => Err(TermError::NotGround(n.to_string())),
            Hole::Var(i, _) => Err(TermError::UnboundVariable(i)),
        })
    }

    /// Evaluates with nonterminal and variable leaves valued by `value`.
    pub fn eval_with(
        &self,
        value: &mut impl FnMut(Hole<'_>) -> Result<SepWord, TermError>,
    ) -> Result<SepWord, TermError> {
        let mut out = SepWord::empty();
        self.eval_into(value, &mut out)?;
        Ok(out)
    }

    fn eval_into(
        &self,
        value: &mut impl FnMut(Hole<'_>) -> Result<SepWord, TermError>,
        out: &mut SepWord,
    ) -> Result<(), TermError> {
        match &self.node {
            TermNode::Word(cs) => {
                for &c in cs {
                    out.push(Symbol::Letter(c));
                }
            }
            TermNode::Sep => out.push(Symbol::Sep),
            TermNode::Nonterminal(n) => out.extend(&value(Hole::Nonterminal(n, self.rank))?),
            TermNode::Var(i) => out.extend(&value(Hole::Var(*i, self.rank))?),
            TermNode::Concat(l, r) => {
                l.eval_into(value, out)?;
                r.eval_into(value, out)?;
            }
            TermNode::Intercalate(j, l, r) => {
                let left = l.eval_with(value)?;
                let right = r.eval_with(value)?;
                let w = left.intercalate(*j, &right).expect("gap checked at construction");
                out.extend(&w);
            }
        }
        Ok(())
    }
}

/// True iff every subterm has rank at most `k` and every connective meets
/// its side conditions (`·`: rank sum `<= k`; `⊙_j`: `j <= k`, rank sum `<= k + 1`).
pub fn check_k_correct(t: &Term, k: usize) -> bool {
    if t.rank > k {
        return false;
    }
    match &t.node {
        TermNode::Concat(l, r) => {
            l.rank + r.rank <= k && check_k_correct(l, k) && check_k_correct(r, k)
        }
        TermNode::Intercalate(j, l, r) => {
            *j <= k && l.rank + r.rank <= k + 1 && check_k_correct(l, k) && check_k_correct(r, k)
        }
        _ => true,
    }
}

/// Free-function form of [`Term::eval`].
pub fn eval(t: &Term) -> Result<SepWord, TermError> {
    t.eval()
}

impl fmt::Display for Term {
    /// Fully parenthesized grammar-file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            TermNode::Word(cs) if cs.is_empty() => f.write_str("eps"),
            TermNode::Word(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            TermNode::Sep => f.write_str("1"),
            TermNode::Nonterminal(n) => f.write_str(n),
            TermNode::Var(i) => write!(f, "x{i}"),
            TermNode::Concat(l, r) => write!(f, "({l} {r})"),
            TermNode::Intercalate(j, l, r) => write!(f, "({l} @{j} {r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ic(j: usize, l: Term, r: Term) -> Term {
        Term::intercalate(j, l, r).unwrap()
    }

    fn cat(l: Term, r: Term) -> Term {
        Term::concat(l, r)
    }

    /// The ground term at the end of the `(aba)^3` derivation in G_2.
    pub(crate) fn example_aba_cubed() -> Term {
        let a = || Term::word("a");
        let b = || Term::word("b");
        let one_a = || cat(Term::sep(), Term::word("a"));
        let one_b = || cat(Term::sep(), Term::word("b"));
        let innermost = cat(Term::sep(), Term::sep());
        let t_a = ic(2, ic(1, cat(a(), innermost), one_a()), one_a());
        let t_b = ic(2, ic(1, cat(b(), t_a), one_b()), one_b());
        ic(1, ic(1, cat(a(), t_b), a()), a())
    }

    #[test]
    fn eval_example_derivation() {
        assert_eq!(example_aba_cubed().eval().unwrap(), SepWord::from("abaabaaba"));
    }

    #[test]
    fn eval_small() {
        let t = ic(1, cat(Term::word("a"), Term::sep()), Term::word("b"));
        assert_eq!(t.eval().unwrap(), SepWord::from("ab"));
        assert_eq!(Term::word("abc").eval().unwrap(), SepWord::from("abc"));
    }

    #[test]
    fn eval_rejects_nonground() {
        let t = cat(Term::word("a"), Term::nonterminal("A", 0));
        assert_eq!(t.eval(), Err(TermError::NotGround("A".into())));
    }

    #[test]
    fn ranks_are_cached() {
        let t = ic(2, cat(Term::sep(), cat(Term::sep(), Term::sep())), cat(Term::sep(), Term::sep()));
        assert_eq!(t.rank(), 4);
        assert_eq!(t.eval().unwrap().rank(), 4);
    }

    #[test]
    fn intercalation_gap_checked_eagerly() {
        assert_eq!(
            Term::intercalate(1, Term::word("a"), Term::word("b")),
            Err(TermError::GapOutOfRank { gap: 1, rank: 0 })
        );
        assert!(Term::intercalate(2, Term::sep(), Term::word("b")).is_err());
    }

    #[test]
    fn k_correctness() {
        let bad = ic(1, cat(Term::sep(), Term::sep()), Term::word("a"));
        assert!(!check_k_correct(&bad, 1));
        assert!(check_k_correct(&bad, 2));
        assert!(check_k_correct(&Term::sep(), 1));
        assert!(!check_k_correct(&Term::sep(), 0));
        assert!(check_k_correct(&example_aba_cubed(), 2));
        assert!(!check_k_correct(&example_aba_cubed(), 1));
    }

    #[test]
    fn replace_and_subterm() {
        let t = cat(Term::word("a"), ic(1, Term::sep(), Term::word("b")));
        let pos = [Side::Right, Side::Right];
        assert_eq!(t.subterm(&pos), Some(&Term::word("b")));
        let t2 = t.replace_at(&pos, Term::word("cc")).unwrap();
        assert_eq!(t2.eval().unwrap(), SepWord::from("acc"));
        assert!(t.replace_at(&pos, Term::sep()).is_err());
        assert_eq!(t.subterms().len(), t.size());
    }

    #[test]
    fn skeleton_numbers_nonterminals_left_to_right() {
        let t = ic(1, cat(Term::nonterminal("A", 1), Term::word("a")), Term::nonterminal("B", 0));
        let (sk, names) = t.skeleton();
        assert_eq!(names, vec!["A", "B"]);
        assert_eq!(sk.vars(), vec![(0, 1), (1, 0)]);
        assert!(sk.is_ground());
    }

    #[test]
    fn from_word_round_trips() {
        for s in ["", "1", "ab1", "1a11b", "abc"] {
            let w = SepWord::from(s);
            assert_eq!(Term::from_word(&w).eval().unwrap(), w);
        }
    }
}
