//! Agenda-driven chart parsing for normal-form grammars.
//!
//! An item `(A, [(i_0, j_0), …, (i_l, j_l)])` asserts that `A` derives
//! `input[i_0..j_0] 1 … 1 input[i_l..j_l]`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::cnf::{CnfGrammar, CnfRule, Op};
use crate::tree::{DerivationTree, NodeKind, Proto};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input contains a separator at position {0}")]
    SeparatorInInput(usize),
    #[error("word is not in the language")]
    NotMember,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// The `l + 1` ordered input spans of a rank-`l` constituent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RangeVector(SmallVec<[Span; 4]>);

impl RangeVector {
    pub fn from_spans(spans: impl IntoIterator<Item = Span>) -> Self {
        let rv = RangeVector(spans.into_iter().collect());
        debug_assert!(rv.0.windows(2).all(|w| w[0].end <= w[1].start));
        rv
    }

    pub fn spans(&self) -> &[Span] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len() - 1
    }

    pub fn first(&self) -> Span {
        self.0[0]
    }

    pub fn last(&self) -> Span {
        self.0[self.0.len() - 1]
    }
}

impl fmt::Display for RangeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| format!("({},{})", s.start, s.end)).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub type ItemId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backpointer {
    Axiom { rule: usize },
    Binary { rule: usize, left: ItemId, right: ItemId },
}

#[derive(Debug, Clone)]
pub struct ChartItem {
    pub nonterminal: usize,
    pub ranges: RangeVector,
    /// Every derivation found, the first one discovered first.
    pub backpointers: Vec<Backpointer>,
    /// Height of the tree built from first backpointers only.
    depth: usize,
}

/// A completed chart.
pub struct Chart<'g> {
    grammar: &'g CnfGrammar,
    input: Vec<char>,
    items: Vec<ChartItem>,
    lookup: HashMap<(usize, RangeVector), ItemId>,
}

#[derive(Default)]
struct Indexes {
    by_first_start: HashMap<(usize, usize), Vec<ItemId>>,
    by_last_end: HashMap<(usize, usize), Vec<ItemId>>,
    by_outer: HashMap<(usize, usize, usize), Vec<ItemId>>,
    by_gap: HashMap<(usize, usize, usize, usize), Vec<ItemId>>,
}

fn combine(op: Op, b: &RangeVector, c: &RangeVector) -> RangeVector {
    let (b, c) = (b.spans(), c.spans());
    let mut out: SmallVec<[Span; 4]> = SmallVec::new();
    let mut mid: SmallVec<[Span; 4]> = SmallVec::from_slice(c);
    let last = mid.len() - 1;
    match op {
        Op::Concat => {
            out.extend_from_slice(&b[..b.len() - 1]);
            mid[0].start = b[b.len() - 1].start;
            out.extend(mid);
        }
        Op::Intercalate(j) => {
            out.extend_from_slice(&b[..j - 1]);
            mid[0].start = b[j - 1].start;
            mid[last].end = b[j].end;
            out.extend(mid);
            out.extend_from_slice(&b[j + 1..]);
        }
    }
    RangeVector(out)
}

impl<'g> Chart<'g> {
    pub fn build(grammar: &'g CnfGrammar, input: &str) -> Result<Self, ParseError> {
        let input: Vec<char> = input.chars().collect();
        if let Some(p) = input.iter().position(|&c| c == '1') {
            return Err(ParseError::SeparatorInInput(p));
        }
        let n = input.len();
        let mut chart = Chart {
            grammar,
            input,
            items: Vec::new(),
            lookup: HashMap::new(),
        };
        let mut agenda = VecDeque::new();
        for (r, rule) in grammar.rules().iter().enumerate() {
            let ax = Backpointer::Axiom { rule: r };
            match *rule {
                CnfRule::Letter { lhs, letter } => {
                    let hits: Vec<usize> = (0..n).filter(|&i| chart.input[i] == letter).collect();
                    for i in hits {
                        chart.add(lhs, RangeVector::from_spans([Span::new(i, i + 1)]), ax, 1, &mut agenda);
                    }
                }
                CnfRule::Sep { lhs } => {
                    for i in 0..=n {
                        for j in i..=n {
                            let rv = RangeVector::from_spans([Span::new(i, i), Span::new(j, j)]);
                            chart.add(lhs, rv, ax, 1, &mut agenda);
                        }
                    }
                }
                CnfRule::Empty { lhs } if n == 0 => {
                    chart.add(lhs, RangeVector::from_spans([Span::new(0, 0)]), ax, 1, &mut agenda);
                }
                _ => {}
            }
        }

        let mut as_left: Vec<Vec<usize>> = vec![Vec::new(); grammar.nonterminal_count()];
        let mut as_right: Vec<Vec<usize>> = vec![Vec::new(); grammar.nonterminal_count()];
        for (r, rule) in grammar.rules().iter().enumerate() {
            if let CnfRule::Binary { left, right, .. } = *rule {
                as_left[left].push(r);
                as_right[right].push(r);
            }
        }

        let mut idx = Indexes::default();
        while let Some(x) = agenda.pop_front() {
            let nt = chart.items[x].nonterminal;
            let rv = chart.items[x].ranges.clone();
            let sp = rv.spans();
            idx.by_first_start.entry((nt, rv.first().start)).or_default().push(x);
            idx.by_last_end.entry((nt, rv.last().end)).or_default().push(x);
            idx.by_outer.entry((nt, rv.first().start, rv.last().end)).or_default().push(x);
            for j in 1..sp.len() {
                idx.by_gap.entry((nt, j, sp[j - 1].end, sp[j].start)).or_default().push(x);
            }

            let mut found: Vec<(usize, ItemId, ItemId)> = Vec::new();
            for &r in &as_left[nt] {
                let CnfRule::Binary { op, right, .. } = grammar.rules()[r] else { unreachable!() };
                let partners = match op {
                    Op::Concat => idx.by_first_start.get(&(right, rv.last().end)),
                    Op::Intercalate(j) => idx.by_outer.get(&(right, sp[j - 1].end, sp[j].start)),
                };
                found.extend(partners.into_iter().flatten().map(|&y| (r, x, y)));
            }
            for &r in &as_right[nt] {
                let CnfRule::Binary { op, left, .. } = grammar.rules()[r] else { unreachable!() };
                let partners = match op {
                    Op::Concat => idx.by_last_end.get(&(left, rv.first().start)),
                    Op::Intercalate(j) => idx.by_gap.get(&(left, j, rv.first().start, rv.last().end)),
                };
                // x paired with itself was already produced above.
                found.extend(partners.into_iter().flatten().filter(|&&y| y != x).map(|&y| (r, y, x)));
            }
            for (r, b, c) in found {
                let CnfRule::Binary { lhs, op, .. } = grammar.rules()[r] else { unreachable!() };
                let rv = combine(op, &chart.items[b].ranges, &chart.items[c].ranges);
                let depth = 1 + chart.items[b].depth.max(chart.items[c].depth);
                chart.add(lhs, rv, Backpointer::Binary { rule: r, left: b, right: c }, depth, &mut agenda);
            }
        }
        Ok(chart)
    }

    fn add(&mut self, nt: usize, rv: RangeVector, bp: Backpointer, depth: usize, agenda: &mut VecDeque<ItemId>) {
        if let Some(&id) = self.lookup.get(&(nt, rv.clone())) {
            self.items[id].backpointers.push(bp);
            return;
        }
        let id = self.items.len();
        self.lookup.insert((nt, rv.clone()), id);
        self.items.push(ChartItem {
            nonterminal: nt,
            ranges: rv,
            backpointers: vec![bp],
            depth,
        });
        agenda.push_back(id);
    }

    pub fn items(&self) -> &[ChartItem] {
        &self.items
    }

    pub fn input(&self) -> &[char] {
        &self.input
    }

    pub fn find(&self, nt: usize, rv: &RangeVector) -> Option<ItemId> {
        self.lookup.get(&(nt, rv.clone())).copied()
    }

    /// The item for the start symbol spanning the whole input.
    pub fn goal(&self) -> Option<ItemId> {
        let rv = RangeVector::from_spans([Span::new(0, self.input.len())]);
        self.find(self.grammar.start(), &rv)
    }

    fn proto(&self, item: ItemId, bp: Backpointer, children: Vec<Proto>) -> Proto {
        let g = self.grammar;
        let nt = self.items[item].nonterminal;
        let kind = match bp {
            Backpointer::Axiom { rule } => match g.rules()[rule] {
                CnfRule::Letter { letter, .. } => NodeKind::Letter(letter),
                CnfRule::Sep { .. } => NodeKind::Sep,
                CnfRule::Empty { .. } => NodeKind::Empty,
                CnfRule::Binary { .. } => unreachable!("axioms come from terminal rules"),
            },
            Backpointer::Binary { rule, .. } => match g.rules()[rule] {
                CnfRule::Binary { op: Op::Concat, .. } => NodeKind::Concat,
                CnfRule::Binary { op: Op::Intercalate(j), .. } => NodeKind::Intercalate(j),
                _ => unreachable!("binary backpointers come from binary rules"),
            },
        };
        Proto {
            label: g.name(nt).to_string(),
            nonterminal: nt,
            kind,
            children,
        }
    }

    /// The tree following first backpointers only.
    pub fn first_tree(&self, item: ItemId) -> DerivationTree {
        DerivationTree::from_proto(self.first_proto(item))
    }

    fn first_proto(&self, item: ItemId) -> Proto {
        let bp = self.items[item].backpointers[0];
        let children = match bp {
            Backpointer::Axiom { .. } => vec![],
            Backpointer::Binary { left, right, .. } => vec![self.first_proto(left), self.first_proto(right)],
        };
        self.proto(item, bp, children)
    }

    /// Up to `limit` distinct trees for `item`, in backpointer order.
    ///
    /// Trees are bounded in height by the first-backpointer height of `item`
    /// plus the nonterminal count, which cuts off cyclic derivations.
    pub fn trees(&self, item: ItemId, limit: usize) -> Vec<DerivationTree> {
        if limit == 0 {
            return Vec::new();
        }
        let budget = self.items[item].depth + self.grammar.nonterminal_count();
        let mut memo = HashMap::new();
        let sketches = self.sketches(item, budget, limit, &mut memo);
        sketches.iter().map(|s| DerivationTree::from_proto(self.realize(s))).collect()
    }

    fn sketches(
        &self,
        item: ItemId,
        budget: usize,
        limit: usize,
        memo: &mut HashMap<(ItemId, usize), Rc<Vec<Rc<Sketch>>>>,
    ) -> Rc<Vec<Rc<Sketch>>> {
        if let Some(s) = memo.get(&(item, budget)) {
            return s.clone();
        }
        let mut out = Vec::new();
        'bps: for (i, &bp) in self.items[item].backpointers.iter().enumerate() {
            match bp {
                Backpointer::Axiom { .. } => out.push(Rc::new(Sketch { item, bp: i, children: None })),
                Backpointer::Binary { left, right, .. } => {
                    if budget < 2 || self.items[left].depth >= budget || self.items[right].depth >= budget {
                        continue;
                    }
                    let ls = self.sketches(left, budget - 1, limit, memo);
                    let rs = self.sketches(right, budget - 1, limit, memo);
                    for l in ls.iter() {
                        for r in rs.iter() {
                            if out.len() == limit {
                                break 'bps;
                            }
                            out.push(Rc::new(Sketch {
                                item,
                                bp: i,
                                children: Some((l.clone(), r.clone())),
                            }));
                        }
                    }
                }
            }
            if out.len() == limit {
                break;
            }
        }
        let out = Rc::new(out);
        memo.insert((item, budget), out.clone());
        out
    }

    fn realize(&self, s: &Sketch) -> Proto {
        let bp = self.items[s.item].backpointers[s.bp];
        let children = match &s.children {
            None => vec![],
            Some((l, r)) => vec![self.realize(l), self.realize(r)],
        };
        self.proto(s.item, bp, children)
    }
}

struct Sketch {
    item: ItemId,
    bp: usize,
    children: Option<(Rc<Sketch>, Rc<Sketch>)>,
}

pub fn recognize(g: &CnfGrammar, input: &str) -> Result<bool, ParseError> {
    Ok(Chart::build(g, input)?.goal().is_some())
}

pub fn parse(g: &CnfGrammar, input: &str) -> Result<DerivationTree, ParseError> {
    let chart = Chart::build(g, input)?;
    let goal = chart.goal().ok_or(ParseError::NotMember)?;
    Ok(chart.first_tree(goal))
}

/// Up to `max_trees` distinct trees; empty for non-members.
pub fn parse_all(g: &CnfGrammar, input: &str, max_trees: usize) -> Result<Vec<DerivationTree>, ParseError> {
    let chart = Chart::build(g, input)?;
    Ok(match chart.goal() {
        Some(goal) => chart.trees(goal, max_trees),
        None => Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::to_cnf;
    use crate::grammar::fixtures::*;
    use crate::grammar::{derives, Grammar};
    use crate::word::SepWord;

    #[test]
    fn fixture_examples() {
        let c1 = to_cnf(&g1()).unwrap();
        let c2 = to_cnf(&g2()).unwrap();
        assert!(recognize(&c1, "abab").unwrap());
        assert!(recognize(&c2, "abaabaaba").unwrap());
        assert!(!recognize(&c1, "aba").unwrap());
        assert_eq!(recognize(&c1, "a1a"), Err(ParseError::SeparatorInInput(1)));
    }

    #[test]
    fn parse_yields_input() {
        let c1 = to_cnf(&g1()).unwrap();
        let c2 = to_cnf(&g2()).unwrap();
        assert_eq!(parse(&c1, "aa").unwrap().word().to_plain(), "aa");
        assert_eq!(parse(&c2, "abaabaaba").unwrap().word().to_plain(), "abaabaaba");
        assert_eq!(parse(&c1, "ab"), Err(ParseError::NotMember));
    }

    #[test]
    fn empty_word_tree() {
        let g: Grammar = "alphabet a\nk 0\nstart S\nnonterm S 0\nrule S -> eps | a S a\n".parse().unwrap();
        let c = to_cnf(&g).unwrap();
        let t = parse(&c, "").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.node(0).kind, NodeKind::Empty);
        assert!(recognize(&c, "aa").unwrap());
    }

    #[test]
    fn parse_all_trees_are_distinct() {
        let c1 = to_cnf(&g1()).unwrap();
        for w in ["abab", "aaaa"] {
            let trees = parse_all(&c1, w, 10).unwrap();
            assert!(!trees.is_empty());
            for (i, t) in trees.iter().enumerate() {
                assert_eq!(t.word().to_plain(), w);
                assert!(trees[..i].iter().all(|u| u != t));
            }
        }
        assert!(parse_all(&c1, "aba", 10).unwrap().is_empty());
    }

    #[test]
    fn tree_ranges_match_chart_items() {
        let c1 = to_cnf(&g1()).unwrap();
        let chart = Chart::build(&c1, "abbabb").unwrap();
        let t = chart.first_tree(chart.goal().unwrap());
        for node in t.nodes() {
            let rv = node.ranges.as_ref().unwrap();
            assert!(chart.find(node.nonterminal, rv).is_some(), "{} {rv}", node.label);
        }
    }

    #[test]
    fn items_are_sound() {
        let g = g1();
        let c1 = to_cnf(&g).unwrap();
        let cg = c1.to_grammar();
        for w in ["abab", "aabaab", "ab"] {
            let chart = Chart::build(&c1, w).unwrap();
            for item in chart.items() {
                let pieces: Vec<SepWord> = item
                    .ranges
                    .spans()
                    .iter()
                    .map(|s| SepWord::from_letters(&chart.input()[s.start..s.end]))
                    .collect();
                let word = SepWord::join(&pieces);
                assert!(derives(&cg, c1.name(item.nonterminal), &word).unwrap());
            }
        }
    }
}
