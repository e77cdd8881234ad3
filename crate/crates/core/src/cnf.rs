//! Chomsky normal form for `k`-DCFGs.
//!
//! Every rule of a [`CnfGrammar`] is `A → B · C`, `A → B ⊙_j C`, `A → a`,
//! `A → 1`, or `S → ε`, and the start symbol never occurs on a right-hand
//! side. [`to_cnf`] runs:
//!
//! 1. start hygiene: a fresh start symbol if the old one occurs in a body;
//! 2. binarization: one nonterminal per internal node of every body, with
//!    maximal ground subterms evaluated and spelled symbol by symbol;
//! 3. gap closing: for each nonterminal `B` of rank `l` and set `m` of its
//!    separators, a variant `B[m]` deriving the words of `B` with the
//!    separators in `m` erased. `B ⊙_j C` with `C ⇒ ε` is then `B[{j}]`;
//! 4. removal of ε-rules (only rank-0 nonterminals can derive ε);
//! 5. unit-rule elimination by transitive closure;
//! 6. removal of unproductive and unreachable nonterminals.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::grammar::{Grammar, Violation};
use crate::term::{Term, TermNode};
use crate::word::{SepWord, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("grammar is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("rule {rule} is not in normal form")]
    NotNormalForm { rule: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Concat,
    Intercalate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CnfRule {
    Binary {
        lhs: usize,
        op: Op,
        left: usize,
        right: usize,
    },
    Letter {
        lhs: usize,
        letter: char,
    },
    Sep {
        lhs: usize,
    },
    Empty {
        lhs: usize,
    },
}

impl CnfRule {
    pub fn lhs(&self) -> usize {
        match *self {
            CnfRule::Binary { lhs, .. }
            | CnfRule::Letter { lhs, .. }
            | CnfRule::Sep { lhs }
            | CnfRule::Empty { lhs } => lhs,
        }
    }
}

/// A grammar in normal form with nonterminals referred to by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfGrammar {
    alphabet: BTreeSet<char>,
    k: usize,
    names: Vec<String>,
    ranks: Vec<usize>,
    start: usize,
    rules: Vec<CnfRule>,
}

impl CnfGrammar {
    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn rules(&self) -> &[CnfRule] {
        &self.rules
    }

    pub fn nonterminal_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, nt: usize) -> &str {
        &self.names[nt]
    }

    pub fn rank(&self, nt: usize) -> usize {
        self.ranks[nt]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Whether `S → ε` is a rule.
    pub fn accepts_empty(&self) -> bool {
        self.rules
            .iter()
            .any(|r| matches!(r, CnfRule::Empty { lhs } if *lhs == self.start))
    }

    /// The same grammar as a general [`Grammar`].
    pub fn to_grammar(&self) -> Grammar {
        let mut g = Grammar::new(self.alphabet.iter().copied(), self.k, self.names[self.start].clone());
        for (n, r) in self.names.iter().zip(&self.ranks) {
            g.add_nonterminal(n.clone(), *r);
        }
        let nt = |i: usize| Term::nonterminal(self.names[i].clone(), self.ranks[i]);
        for rule in &self.rules {
            let rhs = match *rule {
                CnfRule::Binary {
                    op: Op::Concat,
                    left,
                    right,
                    ..
                } => Term::concat(nt(left), nt(right)),
                CnfRule::Binary {
                    op: Op::Intercalate(j),
                    left,
                    right,
                    ..
                } => Term::intercalate(j, nt(left), nt(right)).expect("normal-form rules are well ranked"),
                CnfRule::Letter { letter, .. } => Term::letters(vec![letter]),
                CnfRule::Sep { .. } => Term::sep(),
                CnfRule::Empty { .. } => Term::empty(),
            };
            g.add_rule(self.names[rule.lhs()].clone(), rhs);
        }
        g
    }

    /// Reads a grammar that is already in normal form, without converting it.
    pub fn from_normal_form(g: &Grammar) -> Result<CnfGrammar, CnfError> {
        let violations = g.validate();
        if !violations.is_empty() {
            return Err(CnfError::Invalid(violations));
        }
        let names: Vec<String> = g.nonterminals().keys().cloned().collect();
        let ranks: Vec<usize> = g.nonterminals().values().copied().collect();
        let idx = |n: &str| names.iter().position(|m| m == n).expect("validated");
        let start = idx(g.start());
        let mut rules = Vec::new();
        for (i, rule) in g.rules().iter().enumerate() {
            let lhs = idx(&rule.lhs);
            let bad = CnfError::NotNormalForm { rule: i };
            let child = |t: &Term| match t.node() {
                TermNode::Nonterminal(n) if idx(n) != start => Ok(idx(n)),
                _ => Err(bad.clone()),
            };
            let r = match rule.rhs.node() {
                TermNode::Concat(l, r) => CnfRule::Binary {
                    lhs,
                    op: Op::Concat,
                    left: child(l)?,
                    right: child(r)?,
                },
                TermNode::Intercalate(j, l, r) => CnfRule::Binary {
                    lhs,
                    op: Op::Intercalate(*j),
                    left: child(l)?,
                    right: child(r)?,
                },
                TermNode::Word(cs) if cs.len() == 1 => CnfRule::Letter { lhs, letter: cs[0] },
                TermNode::Word(cs) if cs.is_empty() && lhs == start => CnfRule::Empty { lhs },
                TermNode::Sep => CnfRule::Sep { lhs },
                _ => return Err(bad),
            };
            rules.push(r);
        }
        Ok(CnfGrammar {
            alphabet: g.alphabet().clone(),
            k: g.k(),
            names,
            ranks,
            start,
            rules,
        })
    }
}

impl fmt::Display for CnfGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_grammar())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Body {
    Binary(Op, usize, usize),
    Letter(char),
    Sep,
    Empty,
    Unit(usize),
}

/// A grammar under construction: nonterminals by index, rules deduplicated.
#[derive(Default)]
struct Work {
    names: Vec<String>,
    ranks: Vec<usize>,
    taken: HashSet<String>,
    rules: IndexSet<(usize, Body)>,
}

impl Work {
    fn add(&mut self, name: String, rank: usize) -> usize {
        self.taken.insert(name.clone());
        self.names.push(name);
        self.ranks.push(rank);
        self.names.len() - 1
    }

    fn fresh(&mut self, prefix: &str, rank: usize) -> usize {
        let name = (0..)
            .map(|i| format!("{prefix}{i}"))
            .find(|n| !self.taken.contains(n))
            .expect("infinitely many names");
        self.add(name, rank)
    }
}

struct Binarizer<'a> {
    work: Work,
    index: HashMap<&'a str, usize>,
    spelled: HashMap<SepWord, usize>,
    nodes: HashMap<Term, usize>,
}

impl<'a> Binarizer<'a> {
    fn emit(&mut self, lhs: usize, t: &'a Term) {
        let body = match t.node() {
            TermNode::Nonterminal(n) => Body::Unit(self.index[n.as_str()]),
            _ if t.is_ground() => {
                let w = t.eval().expect("ground, variable-free rule body");
                self.spell_body(&w)
            }
            TermNode::Concat(l, r) => Body::Binary(Op::Concat, self.node(l), self.node(r)),
            TermNode::Intercalate(j, l, r) => Body::Binary(Op::Intercalate(*j), self.node(l), self.node(r)),
            _ => unreachable!("leaves other than nonterminals are ground"),
        };
        self.work.rules.insert((lhs, body));
    }

    fn node(&mut self, t: &'a Term) -> usize {
        if let TermNode::Nonterminal(n) = t.node() {
            return self.index[n.as_str()];
        }
        if t.is_ground() {
            return self.spell(&t.eval().expect("ground"));
        }
        if let Some(&nt) = self.nodes.get(t) {
            return nt;
        }
        let nt = self.work.fresh("X", t.rank());
        self.nodes.insert(t.clone(), nt);
        self.emit(nt, t);
        nt
    }

    fn spell_body(&mut self, w: &SepWord) -> Body {
        match w.symbols() {
            [] => Body::Empty,
            [Symbol::Sep] => Body::Sep,
            [Symbol::Letter(c)] => Body::Letter(*c),
            [first, rest @ ..] => {
                let head = self.spell(&SepWord::from_symbols(vec![*first]));
                let tail = self.spell(&SepWord::from_symbols(rest.to_vec()));
                Body::Binary(Op::Concat, head, tail)
            }
        }
    }

    /// A nonterminal deriving exactly `w`.
    fn spell(&mut self, w: &SepWord) -> usize {
        if let Some(&nt) = self.spelled.get(w) {
            return nt;
        }
        let prefix = match w.symbols() {
            [] => "Eps".to_string(),
            [Symbol::Sep] => "Sep".to_string(),
            [Symbol::Letter(c)] if c.is_alphanumeric() => format!("L{c}_"),
            _ => "W".to_string(),
        };
        let nt = self.work.fresh(&prefix, w.rank());
        self.spelled.insert(w.clone(), nt);
        let body = self.spell_body(w);
        self.work.rules.insert((nt, body));
        nt
    }
}

/// Variants `B[m]`: `m` is a bitmask over the separators of `B` (bit `i`
/// for separator `i + 1`) that are erased.
struct Variants {
    index: HashMap<(usize, u32), usize>,
    base: Vec<(usize, u32)>,
}

impl Variants {
    fn get(&self, nt: usize, mask: u32) -> usize {
        self.index[&(nt, mask)]
    }

    /// Closes the `j`-th remaining gap of variant `v`.
    fn close(&self, v: usize, j: usize) -> usize {
        let (nt, mask) = self.base[v];
        let bit = (0..32)
            .filter(|b| mask & (1 << b) == 0)
            .nth(j - 1)
            .expect("gap within rank");
        self.get(nt, mask | (1 << bit))
    }
}

fn build_variants(src: &Work) -> (Work, Variants) {
    let mut work = Work::default();
    let mut variants = Variants {
        index: HashMap::new(),
        base: Vec::new(),
    };
    work.taken.extend(src.names.iter().cloned());
    for (nt, (name, &rank)) in src.names.iter().zip(&src.ranks).enumerate() {
        for mask in 0u32..(1 << rank) {
            let closed = mask.count_ones() as usize;
            let v = if mask == 0 {
                work.names.push(name.clone());
                work.ranks.push(rank);
                work.names.len() - 1
            } else {
                let gaps: Vec<String> = (0..rank).filter(|b| mask & (1 << b) != 0).map(|b| (b + 1).to_string()).collect();
                work.fresh(&format!("{name}_g{}_", gaps.join("_")), rank - closed)
            };
            variants.index.insert((nt, mask), v);
            variants.base.push((nt, mask));
        }
    }
    for &(lhs, body) in &src.rules {
        let rank = src.ranks[lhs];
        for mask in 0u32..(1 << rank) {
            let v = variants.get(lhs, mask);
            let derived = match body {
                Body::Letter(c) => Some(Body::Letter(c)),
                Body::Empty => Some(Body::Empty),
                Body::Sep => Some(if mask == 0 { Body::Sep } else { Body::Empty }),
                Body::Unit(b) => Some(Body::Unit(variants.get(b, mask))),
                Body::Binary(Op::Concat, b, c) => {
                    let rb = src.ranks[b];
                    let mb = mask & ((1 << rb) - 1);
                    let mc = mask >> rb;
                    Some(Body::Binary(Op::Concat, variants.get(b, mb), variants.get(c, mc)))
                }
                Body::Binary(Op::Intercalate(j), b, c) => {
                    // Result separators: b's 1..j-1, then c's, then b's j+1..
                    let (rb, rc) = (src.ranks[b], src.ranks[c]);
                    let mut mb = 0u32;
                    let mut mc = 0u32;
                    for p in 1..=rank {
                        if mask & (1 << (p - 1)) == 0 {
                            continue;
                        }
                        if p < j {
                            mb |= 1 << (p - 1);
                        } else if p < j + rc {
                            mc |= 1 << (p - j);
                        } else {
                            let q = p - rc + 1;
                            debug_assert!(q > j && q <= rb);
                            mb |= 1 << (q - 1);
                        }
                    }
                    let shifted = (mb & ((1 << (j - 1)) - 1)).count_ones() as usize;
                    Some(Body::Binary(
                        Op::Intercalate(j - shifted),
                        variants.get(b, mb),
                        variants.get(c, mc),
                    ))
                }
            };
            if let Some(d) = derived {
                work.rules.insert((v, d));
            }
        }
    }
    (work, variants)
}

fn remove_empty(work: &Work, variants: &Variants, start: usize) -> (IndexSet<(usize, Body)>, bool) {
    let mut nullable = vec![false; work.names.len()];
    loop {
        let mut changed = false;
        for &(lhs, body) in &work.rules {
            if nullable[lhs] {
                continue;
            }
            let now = match body {
                Body::Empty => true,
                Body::Unit(b) => nullable[b],
                Body::Binary(Op::Concat, b, c) => nullable[b] && nullable[c],
                Body::Binary(Op::Intercalate(j), b, c) => nullable[c] && nullable[variants.close(b, j)],
                _ => false,
            };
            if now {
                nullable[lhs] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = IndexSet::new();
    for &(lhs, body) in &work.rules {
        match body {
            Body::Empty => continue,
            Body::Binary(Op::Concat, b, c) => {
                if nullable[b] {
                    out.insert((lhs, Body::Unit(c)));
                }
                if nullable[c] {
                    out.insert((lhs, Body::Unit(b)));
                }
            }
            Body::Binary(Op::Intercalate(j), b, c)
                if nullable[c] => {
                    out.insert((lhs, Body::Unit(variants.close(b, j))));
                }
            _ => {}
        }
        out.insert((lhs, body));
    }
    (out, nullable[start])
}

fn remove_units(n: usize, rules: &IndexSet<(usize, Body)>) -> IndexSet<(usize, Body)> {
    let mut units: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(lhs, body) in rules {
        if let Body::Unit(b) = body {
            units[lhs].push(b);
        }
    }
    let mut by_lhs: Vec<Vec<Body>> = vec![Vec::new(); n];
    for &(lhs, body) in rules {
        if !matches!(body, Body::Unit(_)) {
            by_lhs[lhs].push(body);
        }
    }
    let mut out = IndexSet::new();
    for a in 0..n {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(x) = queue.pop_front() {
            for &body in &by_lhs[x] {
                out.insert((a, body));
            }
            for &y in &units[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    out
}

fn prune(n: usize, start: usize, rules: &IndexSet<(usize, Body)>) -> Vec<bool> {
    let mut productive = vec![false; n];
    loop {
        let mut changed = false;
        for &(lhs, body) in rules {
            if productive[lhs] {
                continue;
            }
            let now = match body {
                Body::Binary(_, b, c) => productive[b] && productive[c],
                Body::Unit(b) => productive[b],
                _ => true,
            };
            if now {
                productive[lhs] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut keep = vec![false; n];
    keep[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &(lhs, body) in rules {
            if lhs != x {
                continue;
            }
            if let Body::Binary(_, b, c) = body {
                if productive[b] && productive[c] {
                    for y in [b, c] {
                        if !keep[y] {
                            keep[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
        }
    }
    for (i, k) in keep.iter_mut().enumerate() {
        *k = *k && (productive[i] || i == start);
    }
    keep
}

/// Converts a valid grammar to an equivalent grammar in normal form.
pub fn to_cnf(g: &Grammar) -> Result<CnfGrammar, CnfError> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(CnfError::Invalid(violations));
    }

    let mut work = Work::default();
    let mut index = HashMap::new();
    for (name, &rank) in g.nonterminals() {
        index.insert(name.as_str(), work.add(name.clone(), rank));
    }
    let old_start = index[g.start()];
    let start_in_body = g
        .rules()
        .iter()
        .any(|r| r.rhs.nonterminals().iter().any(|(n, _)| *n == g.start()));
    let start = if start_in_body {
        work.fresh(&format!("{}_start", g.start()), 0)
    } else {
        old_start
    };

    let mut bin = Binarizer {
        work,
        index,
        spelled: HashMap::new(),
        nodes: HashMap::new(),
    };
    for rule in g.rules() {
        let lhs = bin.index[rule.lhs.as_str()];
        bin.emit(lhs, &rule.rhs);
        if start_in_body && lhs == old_start {
            bin.emit(start, &rule.rhs);
        }
    }
    let binarized = bin.work;

    let (variant_work, variants) = build_variants(&binarized);
    let start = variants.get(start, 0);
    let (rules, start_nullable) = remove_empty(&variant_work, &variants, start);
    let n = variant_work.names.len();
    let rules = remove_units(n, &rules);
    let keep = prune(n, start, &rules);

    let mut remap = vec![usize::MAX; n];
    let mut names = Vec::new();
    let mut ranks = Vec::new();
    for i in 0..n {
        if keep[i] {
            remap[i] = names.len();
            names.push(variant_work.names[i].clone());
            ranks.push(variant_work.ranks[i]);
        }
    }
    let mut out_rules = Vec::new();
    if start_nullable {
        out_rules.push(CnfRule::Empty { lhs: remap[start] });
    }
    for &(lhs, body) in &rules {
        if !keep[lhs] {
            continue;
        }
        let lhs = remap[lhs];
        let rule = match body {
            Body::Binary(op, b, c) => {
                if !keep[b] || !keep[c] {
                    continue;
                }
                CnfRule::Binary {
                    lhs,
                    op,
                    left: remap[b],
                    right: remap[c],
                }
            }
            Body::Letter(letter) => CnfRule::Letter { lhs, letter },
            Body::Sep => CnfRule::Sep { lhs },
            Body::Empty | Body::Unit(_) => unreachable!("removed above"),
        };
        out_rules.push(rule);
    }
    Ok(CnfGrammar {
        alphabet: g.alphabet().clone(),
        k: g.k(),
        names,
        ranks,
        start: remap[start],
        rules: out_rules,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::fixtures::*;
    use crate::grammar::language;

    fn assert_normal_form(c: &CnfGrammar) {
        for rule in c.rules() {
            match *rule {
                CnfRule::Binary { lhs, op, left, right } => {
                    assert_ne!(left, c.start());
                    assert_ne!(right, c.start());
                    let expected = match op {
                        Op::Concat => c.rank(left) + c.rank(right),
                        Op::Intercalate(j) => {
                            assert!(j >= 1 && j <= c.rank(left) && j <= c.k());
                            c.rank(left) + c.rank(right) - 1
                        }
                    };
                    assert_eq!(c.rank(lhs), expected);
                }
                CnfRule::Letter { lhs, .. } => assert_eq!(c.rank(lhs), 0),
                CnfRule::Sep { lhs } => assert_eq!(c.rank(lhs), 1),
                CnfRule::Empty { lhs } => assert_eq!(lhs, c.start()),
            }
        }
        assert!(c.to_grammar().is_valid());
    }

    #[test]
    fn fixtures_convert() {
        for g in [g1(), g2()] {
            let c = to_cnf(&g).unwrap();
            assert_normal_form(&c);
            assert_eq!(language(&g, 8), language(&c.to_grammar(), 8));
        }
    }

    #[test]
    fn empty_fillers_become_gap_closing_variants() {
        let g: Grammar = "alphabet a b\nk 1\nstart S\nnonterm S 0\nnonterm E 0\nnonterm T 1\n\
                          rule S -> T @1 E | a S b\nrule T -> a 1 b | a T b\nrule E -> eps | a\n"
            .parse()
            .unwrap();
        let c = to_cnf(&g).unwrap();
        assert_normal_form(&c);
        assert!(!c.accepts_empty());
        assert_eq!(language(&g, 8), language(&c.to_grammar(), 8));
    }

    #[test]
    fn empty_word_kept_at_start() {
        let g: Grammar = "alphabet a\nk 0\nstart S\nnonterm S 0\nrule S -> eps | a S a\n".parse().unwrap();
        let c = to_cnf(&g).unwrap();
        assert_normal_form(&c);
        assert!(c.accepts_empty());
        assert_eq!(language(&g, 6), language(&c.to_grammar(), 6));
    }

    #[test]
    fn separator_only_nonterminals() {
        // T -> 1 1 and U -> 1, closed by an empty filler through intercalation.
        let g: Grammar = "alphabet a\nk 2\nstart S\nnonterm S 0\nnonterm T 2\nnonterm U 1\nnonterm E 0\n\
                          rule S -> (T @1 a) @1 E | (U @1 E) a\nrule T -> 1 1 | U U\nrule U -> 1\nrule E -> eps\n"
            .parse()
            .unwrap();
        let c = to_cnf(&g).unwrap();
        assert_normal_form(&c);
        assert_eq!(language(&g, 4), language(&c.to_grammar(), 4));
    }

    #[test]
    fn already_normal_form_round_trip() {
        let text = include_str!("../../../grammars/wrap_cnf.dcfg");
        let g: Grammar = text.parse().unwrap();
        let direct = CnfGrammar::from_normal_form(&g).unwrap();
        let converted = to_cnf(&g).unwrap();
        assert_normal_form(&converted);
        assert_eq!(language(&direct.to_grammar(), 11), language(&converted.to_grammar(), 11));
        assert!(language(&g, 11).contains(&SepWord::from("aabbeccdd")));
        assert!(CnfGrammar::from_normal_form(&g1()).is_err());
    }

    #[test]
    fn invalid_grammar_rejected() {
        let mut g = Grammar::new(['a'], 1, "S");
        g.add_nonterminal("S", 0).add_rule("S", Term::sep());
        assert!(matches!(to_cnf(&g), Err(CnfError::Invalid(_))));
    }
}
