//! Line-oriented grammar files.
//!
//! ```text
//! alphabet a b
//! k 1
//! start S
//! nonterm S 0
//! nonterm T 1
//! rule S -> (a T) @1 a | (b T) @1 b
//! rule T -> (a T) @1 (1 a) | (b T) @1 (1 b) | 1
//! ```
//!
//! Juxtaposition is concatenation and binds tighter than `@j`; both are
//! left-associative. `1` is the separator, `eps` the empty word. Names
//! starting with an uppercase letter are nonterminals; any other run of
//! characters spells letters and separators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Grammar, Rule};
use crate::term::{Term, TermNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

const RESERVED: &[char] = &['(', ')', '|', '@', '#'];

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Bar,
    At(usize),
    Name(String),
    Eps,
    Chunk(String),
}

fn tokenize(src: &str, line: usize) -> Result<Vec<Token>, FormatError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            '|' => {
                out.push(Token::Bar);
                i += 1;
            }
            '@' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let gap = digits
                    .parse()
                    .map_err(|_| err(line, "expected a gap number after '@'"))?;
                out.push(Token::At(gap));
            }
            c if c.is_uppercase() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            _ => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !chars[i].is_uppercase()
                    && !RESERVED.contains(&chars[i])
                {
                    i += 1;
                }
                let chunk: String = chars[start..i].iter().collect();
                out.push(if chunk == "eps" {
                    Token::Eps
                } else {
                    Token::Chunk(chunk)
                });
            }
        }
    }
    Ok(out)
}

struct TermParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    ranks: &'a HashMap<String, usize>,
    line: usize,
}

impl TermParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn intercalation(&mut self) -> Result<Term, FormatError> {
        let mut left = self.concatenation()?;
        while let Some(Token::At(gap)) = self.peek() {
            let gap = *gap;
            self.pos += 1;
            let right = self.concatenation()?;
            left = Term::intercalate(gap, left, right).map_err(|e| err(self.line, e.to_string()))?;
        }
        Ok(left)
    }

    fn concatenation(&mut self) -> Result<Term, FormatError> {
        let mut acc = self.atom()?;
        while matches!(
            self.peek(),
            Some(Token::Open | Token::Name(_) | Token::Eps | Token::Chunk(_))
        ) {
            acc = Term::concat(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, FormatError> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| err(self.line, "unexpected end of rule body"))?;
        self.pos += 1;
        match tok {
            Token::Open => {
                let t = self.intercalation()?;
                match self.peek() {
                    Some(Token::Close) => {
                        self.pos += 1;
                        Ok(t)
                    }
                    _ => Err(err(self.line, "expected ')'")),
                }
            }
            // Undeclared names get rank 0 here and are reported by validation.
            Token::Name(n) => Ok(Term::nonterminal(n.clone(), self.ranks.get(&n).copied().unwrap_or(0))),
            Token::Eps => Ok(Term::empty()),
            Token::Chunk(s) => Ok(chunk_term(&s)),
            other => Err(err(self.line, format!("unexpected {other:?}"))),
        }
    }
}

fn chunk_term(s: &str) -> Term {
    let mut parts = Vec::new();
    let mut letters = Vec::new();
    for c in s.chars() {
        if c == '1' {
            if !letters.is_empty() {
                parts.push(Term::letters(std::mem::take(&mut letters)));
            }
            parts.push(Term::sep());
        } else {
            letters.push(c);
        }
    }
    if !letters.is_empty() {
        parts.push(Term::letters(letters));
    }
    parts.into_iter().reduce(Term::concat).expect("chunks are non-empty")
}

fn parse_bodies(src: &str, ranks: &HashMap<String, usize>, line: usize) -> Result<Vec<Term>, FormatError> {
    let tokens = tokenize(src, line)?;
    let mut bodies = Vec::new();
    for alt in tokens.split(|t| *t == Token::Bar) {
        if alt.is_empty() {
            return Err(err(line, "empty alternative"));
        }
        let mut p = TermParser {
            tokens: alt,
            pos: 0,
            ranks,
            line,
        };
        let t = p.intercalation()?;
        if p.pos != alt.len() {
            return Err(err(line, format!("unexpected {:?}", alt[p.pos])));
        }
        bodies.push(t);
    }
    Ok(bodies)
}

/// Parses a single term with the given nonterminal ranks.
pub fn parse_term(src: &str, ranks: &HashMap<String, usize>) -> Result<Term, FormatError> {
    let mut bodies = parse_bodies(src, ranks, 1)?;
    if bodies.len() != 1 {
        return Err(err(1, "expected a single term"));
    }
    Ok(bodies.remove(0))
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_uppercase())
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl FromStr for Grammar {
    type Err = FormatError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut alphabet: Option<Vec<char>> = None;
        let mut k: Option<usize> = None;
        let mut start: Option<String> = None;
        let mut decls: Vec<(String, usize)> = Vec::new();
        let mut rule_lines: Vec<(usize, &str)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (keyword, rest) = trimmed
                .split_once(char::is_whitespace)
                .map(|(a, b)| (a, b.trim()))
                .unwrap_or((trimmed, ""));
            match keyword {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(err(line, "duplicate alphabet line"));
                    }
                    let mut letters = Vec::new();
                    for sym in rest.split_whitespace() {
                        let mut cs = sym.chars();
                        let (Some(c), None) = (cs.next(), cs.next()) else {
                            return Err(err(line, format!("alphabet symbol {sym:?} is not a single character")));
                        };
                        if c == '1' || c.is_uppercase() || RESERVED.contains(&c) {
                            return Err(err(line, format!("{c:?} cannot be an alphabet symbol")));
                        }
                        letters.push(c);
                    }
                    alphabet = Some(letters);
                }
                "k" => {
                    if k.is_some() {
                        return Err(err(line, "duplicate k line"));
                    }
                    k = Some(rest.parse().map_err(|_| err(line, format!("bad order {rest:?}")))?);
                }
                "start" => {
                    if start.is_some() {
                        return Err(err(line, "duplicate start line"));
                    }
                    if !is_name(rest) {
                        return Err(err(line, format!("bad start symbol {rest:?}")));
                    }
                    start = Some(rest.to_string());
                }
                "nonterm" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [name, rank] = parts[..] else {
                        return Err(err(line, "expected: nonterm NAME RANK"));
                    };
                    if !is_name(name) {
                        return Err(err(line, format!("bad nonterminal name {name:?}")));
                    }
                    if decls.iter().any(|(n, _)| n == name) {
                        return Err(err(line, format!("nonterminal {name} declared twice")));
                    }
                    let rank = rank.parse().map_err(|_| err(line, format!("bad rank {rank:?}")))?;
                    decls.push((name.to_string(), rank));
                }
                "rule" => rule_lines.push((line, rest)),
                other => return Err(err(line, format!("unknown directive {other:?}"))),
            }
        }

        let alphabet = alphabet.ok_or_else(|| err(0, "missing alphabet line"))?;
        let k = k.ok_or_else(|| err(0, "missing k line"))?;
        let start = start.ok_or_else(|| err(0, "missing start line"))?;
        let ranks: HashMap<String, usize> = decls.iter().cloned().collect();

        let mut g = Grammar::new(alphabet, k, start);
        for (name, rank) in decls {
            g.add_nonterminal(name, rank);
        }
        for (line, rest) in rule_lines {
            let (lhs, body) = rest
                .split_once("->")
                .ok_or_else(|| err(line, "expected: rule LHS -> BODY"))?;
            let lhs = lhs.trim();
            if !is_name(lhs) {
                return Err(err(line, format!("bad rule head {lhs:?}")));
            }
            for rhs in parse_bodies(body, &ranks, line)? {
                g.push_rule(Rule {
                    lhs: lhs.to_string(),
                    rhs,
                    line: Some(line),
                });
            }
        }
        Ok(g)
    }
}

struct FileTerm<'a>(&'a Term);

impl fmt::Display for FileTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.node() {
            TermNode::Word(cs) if cs.is_empty() => f.write_str("eps"),
            TermNode::Word(cs) => {
                let s: String = cs.iter().collect();
                if s == "eps" {
                    f.write_str("(e p s)")
                } else {
                    f.write_str(&s)
                }
            }
            TermNode::Concat(l, r) => write!(f, "{} {}", Wrapped(l, false), Wrapped(r, true)),
            TermNode::Intercalate(j, l, r) => {
                write!(f, "{} @{j} {}", Wrapped(l, false), Wrapped(r, true))
            }
            _ => write!(f, "{}", self.0),
        }
    }
}

/// Parenthesizes a child where precedence or associativity would misread it.
struct Wrapped<'a>(&'a Term, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Wrapped(t, right) = *self;
        let needs = match t.node() {
            TermNode::Intercalate(..) => true,
            TermNode::Concat(..) => right,
            _ => false,
        };
        if needs {
            write!(f, "({})", FileTerm(t))
        } else {
            write!(f, "{}", FileTerm(t))
        }
    }
}

impl fmt::Display for Grammar {
    /// Writes the grammar in the file format accepted by [`Grammar::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.alphabet.iter().map(|c| c.to_string()).collect();
        writeln!(f, "alphabet {}", letters.join(" "))?;
        writeln!(f, "k {}", self.k)?;
        writeln!(f, "start {}", self.start)?;
        for (name, rank) in &self.nonterminals {
            writeln!(f, "nonterm {name} {rank}")?;
        }
        for rule in &self.rules {
            writeln!(f, "rule {} -> {}", rule.lhs, FileTerm(&rule.rhs))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::fixtures::*;
    use crate::word::SepWord;

    fn ranks(pairs: &[(&str, usize)]) -> HashMap<String, usize> {
        pairs.iter().map(|(n, r)| (n.to_string(), *r)).collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let r = ranks(&[("T", 1)]);
        let t = parse_term("a T @1 a", &r).unwrap();
        let expected = Term::intercalate(
            1,
            Term::concat(Term::word("a"), Term::nonterminal("T", 1)),
            Term::word("a"),
        )
        .unwrap();
        assert_eq!(t, expected);
        let t = parse_term("aT@1a", &r).unwrap();
        assert_eq!(t, expected);
    }

    #[test]
    fn chunks_mix_letters_and_separators() {
        let t = parse_term("a1bc 11", &HashMap::new()).unwrap();
        assert_eq!(t.rank(), 3);
        assert_eq!(t.eval().unwrap(), SepWord::from("a1bc11"));
        assert_eq!(parse_term("eps", &HashMap::new()).unwrap(), Term::empty());
    }

    #[test]
    fn fixture_shapes() {
        let g = g1();
        assert_eq!(g.k(), 1);
        assert_eq!(g.rules().len(), 5);
        assert_eq!(g.rank_of("T"), Some(1));
        assert_eq!(g.rules()[4].rhs, Term::sep());
        assert_eq!(g.rules()[0].line, Some(8));
        let g = g2();
        assert_eq!(g.rules()[4].rhs.eval().unwrap(), SepWord::from("11"));
    }

    #[test]
    fn display_round_trips() {
        for g in [g1(), g2()] {
            let text = g.to_string();
            let back: Grammar = text.parse().unwrap();
            let strip = |g: &Grammar| g.rules().iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect::<Vec<_>>();
            assert_eq!(strip(&back), strip(&g));
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = "alphabet a\nk 1\nstart S\nnonterm S 0\nrule S -> (a\n".parse::<Grammar>().unwrap_err();
        assert_eq!(e.line, 5);
        let e = "alphabet a\nk 1\nstart S\nnonterm S 0\nrule S -> a @1 a\n".parse::<Grammar>().unwrap_err();
        assert_eq!(e.line, 5);
        let e = "alphabet a 1\n".parse::<Grammar>().unwrap_err();
        assert_eq!(e.line, 1);
        let e = "alphabet a\nstart S\n".parse::<Grammar>().unwrap_err();
        assert!(e.message.contains("missing k"));
        let e = "bogus\n".parse::<Grammar>().unwrap_err();
        assert_eq!(e.line, 1);
    }
}
