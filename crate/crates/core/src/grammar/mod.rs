//! Grammars over the term algebra: representation, validation, the text
//! file format and the bottom-up enumeration oracle.

mod enumerate;
mod format;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::term::{check_k_correct, Term, TermNode};

pub use enumerate::{derives, enumerate, language};
pub use format::{parse_term, FormatError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("unknown nonterminal {0}")]
    UnknownNonterminal(String),
    #[error("word has rank {word}, nonterminal {name} has rank {expected}")]
    RankMismatch {
        name: String,
        expected: usize,
        word: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Term,
    /// Source line when loaded from a file.
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    alphabet: BTreeSet<char>,
    k: usize,
    start: String,
    nonterminals: IndexMap<String, usize>,
    rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(alphabet: impl IntoIterator<Item = char>, k: usize, start: impl Into<String>) -> Self {
        Grammar {
            alphabet: alphabet.into_iter().collect(),
            k,
            start: start.into(),
            nonterminals: IndexMap::new(),
            rules: Vec::new(),
        }
    }

    /// Declares (or redeclares) a nonterminal.
    pub fn add_nonterminal(&mut self, name: impl Into<String>, rank: usize) -> &mut Self {
        self.nonterminals.insert(name.into(), rank);
        self
    }

    pub fn add_rule(&mut self, lhs: impl Into<String>, rhs: Term) -> &mut Self {
        self.rules.push(Rule {
            lhs: lhs.into(),
            rhs,
            line: None,
        });
        self
    }

    pub(crate) fn push_rule(&mut self, rule: Rule) {
        self.rules.push(rule);
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    /// Nonterminals with ranks, in declaration order.
    pub fn nonterminals(&self) -> &IndexMap<String, usize> {
        &self.nonterminals
    }

    pub fn rank_of(&self, name: &str) -> Option<usize> {
        self.nonterminals.get(name).copied()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rules_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    /// Every well-formedness problem, each tagged with the offending rule.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let global = |kind| Violation {
            rule: None,
            line: None,
            kind,
        };
        match self.rank_of(&self.start) {
            None => out.push(global(ViolationKind::UndefinedNonterminal(self.start.clone()))),
            Some(0) => {}
            Some(r) => out.push(global(ViolationKind::StartRank(r))),
        }
        for (name, &rank) in &self.nonterminals {
            if rank > self.k {
                out.push(global(ViolationKind::NonterminalRankExceedsK {
                    name: name.clone(),
                    rank,
                }));
            }
            let mut cs = name.chars();
            if let (Some(c), None) = (cs.next(), cs.next()) {
                if self.alphabet.contains(&c) {
                    out.push(global(ViolationKind::NameClash(name.clone())));
                }
            }
        }
        for (i, rule) in self.rules.iter().enumerate() {
            let mut push = |kind| {
                out.push(Violation {
                    rule: Some(i),
                    line: rule.line,
                    kind,
                })
            };
            match self.rank_of(&rule.lhs) {
                None => push(ViolationKind::UndefinedNonterminal(rule.lhs.clone())),
                Some(r) if r != rule.rhs.rank() => push(ViolationKind::RankMismatch {
                    lhs: rule.lhs.clone(),
                    lhs_rank: r,
                    rhs_rank: rule.rhs.rank(),
                }),
                Some(_) => {}
            }
            if !check_k_correct(&rule.rhs, self.k) {
                push(ViolationKind::NotKCorrect { k: self.k });
            }
            let mut undefined = BTreeSet::new();
            let mut letters = BTreeSet::new();
            for (_, sub) in rule.rhs.subterms() {
                match sub.node() {
                    TermNode::Nonterminal(n) => match self.rank_of(n) {
                        None => {
                            undefined.insert(n.clone());
                        }
                        Some(r) if r != sub.rank() => push(ViolationKind::LeafRankMismatch {
                            name: n.clone(),
                            declared: r,
                            used: sub.rank(),
                        }),
                        Some(_) => {}
                    },
                    TermNode::Word(cs) => {
                        letters.extend(cs.iter().filter(|c| !self.alphabet.contains(c)).copied())
                    }
                    TermNode::Var(i) => push(ViolationKind::VariableInRule(*i)),
                    _ => {}
                }
            }
            for n in undefined {
                push(ViolationKind::UndefinedNonterminal(n));
            }
            for c in letters {
                push(ViolationKind::UndefinedLetter(c));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    RankMismatch {
        lhs: String,
        lhs_rank: usize,
        rhs_rank: usize,
    },
    NotKCorrect {
        k: usize,
    },
    UndefinedNonterminal(String),
    UndefinedLetter(char),
    LeafRankMismatch {
        name: String,
        declared: usize,
        used: usize,
    },
    VariableInRule(usize),
    StartRank(usize),
    NonterminalRankExceedsK {
        name: String,
        rank: usize,
    },
    NameClash(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index into [`Grammar::rules`], `None` for grammar-level problems.
    pub rule: Option<usize>,
    pub line: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::RankMismatch {
                lhs,
                lhs_rank,
                rhs_rank,
            } => write!(f, "{lhs} has rank {lhs_rank} but the rule body has rank {rhs_rank}"),
            ViolationKind::NotKCorrect { k } => write!(f, "rule body is not {k}-correct"),
            ViolationKind::UndefinedNonterminal(n) => write!(f, "undefined nonterminal {n}"),
            ViolationKind::UndefinedLetter(c) => write!(f, "letter {c:?} is not in the alphabet"),
            ViolationKind::LeafRankMismatch {
                name,
                declared,
                used,
            } => write!(f, "{name} is declared with rank {declared} but used with rank {used}"),
            ViolationKind::VariableInRule(i) => write!(f, "variable x{i} in a rule body"),
            ViolationKind::StartRank(r) => write!(f, "start symbol has rank {r}, expected 0"),
            ViolationKind::NonterminalRankExceedsK { name, rank } => {
                write!(f, "{name} has rank {rank} above the grammar order")
            }
            ViolationKind::NameClash(n) => write!(f, "{n} is both a nonterminal and a letter"),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.rule) {
            (Some(line), _) => write!(f, "line {line}: {}", self.kind),
            (None, Some(rule)) => write!(f, "rule {rule}: {}", self.kind),
            (None, None) => write!(f, "{}", self.kind),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Grammar;

    pub const G1: &str = include_str!("../../../../grammars/g1.dcfg");
    pub const G2: &str = include_str!("../../../../grammars/g2.dcfg");

    pub fn g1() -> Grammar {
        G1.parse().unwrap()
    }

    pub fn g2() -> Grammar {
        G2.parse().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(g1().validate(), vec![]);
        assert_eq!(g2().validate(), vec![]);
    }

    #[test]
    fn g2_with_order_one_is_invalid() {
        let text = G2.replace("k 2", "k 1");
        let g: Grammar = text.parse().unwrap();
        let v = g.validate();
        assert!(v.iter().any(|v| matches!(v.kind, ViolationKind::NotKCorrect { k: 1 })));
        assert!(v
            .iter()
            .any(|v| matches!(v.kind, ViolationKind::NonterminalRankExceedsK { .. })));
    }

    #[test]
    fn rank_mismatch_reported() {
        let mut g = Grammar::new(['a'], 1, "S");
        g.add_nonterminal("S", 0).add_rule("S", Term::sep());
        assert_eq!(
            g.validate(),
            vec![Violation {
                rule: Some(0),
                line: None,
                kind: ViolationKind::RankMismatch {
                    lhs: "S".into(),
                    lhs_rank: 0,
                    rhs_rank: 1
                }
            }]
        );
    }

    #[test]
    fn undefined_symbols_reported() {
        let mut g = Grammar::new(['a'], 1, "S");
        g.add_nonterminal("S", 0)
            .add_rule("S", Term::concat(Term::word("b"), Term::nonterminal("X", 0)));
        let kinds: Vec<_> = g.validate().into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::UndefinedNonterminal("X".into())));
        assert!(kinds.contains(&ViolationKind::UndefinedLetter('b')));
    }

    #[test]
    fn start_must_have_rank_zero() {
        let mut g = Grammar::new(['a'], 1, "S");
        g.add_nonterminal("S", 1).add_rule("S", Term::sep());
        assert_eq!(g.validate()[0].kind, ViolationKind::StartRank(1));
    }
}
