//! Pumps in derivation trees, their word decompositions, and certificate search.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::CnfGrammar;
use crate::parser::{parse_all, recognize, ParseError};
use crate::tree::{DerivationTree, NodeId, NodeKind};
use crate::word::SepWord;

pub const DEFAULT_MAX_TREES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PumpError {
    #[error("node {0} is not in the tree")]
    NodeNotInTree(NodeId),
    #[error("invalid pump: {0}")]
    InvalidPump(String),
    #[error("word is not in the language")]
    NotMember,
    #[error("position {0} is out of range")]
    PositionOutOfRange(usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A top node and a bottom node with equal labels, the bottom a direct
/// descendant of the top. `l` is the label rank plus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pump {
    pub top: NodeId,
    pub bottom: NodeId,
    pub l: usize,
}

/// `C[γ] = s1 (γ ⊗ fillers) s2` for the context `C` between two nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextFactorization {
    pub s1: SepWord,
    pub s2: SepWord,
    pub fillers: Vec<SepWord>,
}

impl ContextFactorization {
    pub fn apply(&self, gamma: &SepWord) -> Option<SepWord> {
        let inner = gamma.wrap(&self.fillers).ok()?;
        Some(self.s1.concat(&inner).concat(&self.s2))
    }

    /// Splits every filler `y 1 z` at its separator; `None` unless all fillers have rank 1.
    pub fn pairs(&self) -> Option<Vec<(SepWord, SepWord)>> {
        self.fillers
            .iter()
            .map(|f| match f.segments().as_slice() {
                [y, z] => Some((y.clone(), z.clone())),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PumpDecomposition {
    pub l: usize,
    pub s: Vec<String>,
    pub y: Vec<String>,
    pub u: Vec<String>,
    pub z: Vec<String>,
}

impl PumpDecomposition {
    /// `|y_1 z_1 … y_l z_l|`.
    pub fn pumped_len(&self) -> usize {
        self.y.iter().chain(&self.z).map(|w| w.chars().count()).sum()
    }

    /// `|y_1 u_1 z_1 … y_l u_l z_l|`.
    pub fn region_len(&self) -> usize {
        self.pumped_len() + self.u.iter().map(|w| w.chars().count()).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub decomposition: PumpDecomposition,
    pub selected_hit: Option<usize>,
    #[serde(skip)]
    pub tree: usize,
    #[serde(skip)]
    pub pump: Pump,
}

fn check_node(t: &DerivationTree, v: NodeId) -> Result<(), PumpError> {
    if v < t.len() {
        Ok(())
    } else {
        Err(PumpError::NodeNotInTree(v))
    }
}

pub fn is_direct_descendant(t: &DerivationTree, v: NodeId, w: NodeId) -> Result<bool, PumpError> {
    check_node(t, v)?;
    check_node(t, w)?;
    if !t.is_ancestor(v, w) {
        return Ok(false);
    }
    let rank = t.node(v).rank;
    Ok(t.ancestors(w).take_while(|&x| x != v).all(|x| t.node(x).rank == rank))
}

fn pumps_below(t: &DerivationTree, v: NodeId, out: &mut Vec<Pump>) {
    let top = t.node(v);
    if !top.is_internal() {
        return;
    }
    let mut stack: Vec<NodeId> = top.children.iter().rev().copied().collect();
    while let Some(x) = stack.pop() {
        let node = t.node(x);
        if node.rank != top.rank || !node.is_internal() {
            continue;
        }
        if node.nonterminal == top.nonterminal && node.label == top.label {
            out.push(Pump {
                top: v,
                bottom: x,
                l: top.rank + 1,
            });
        }
        stack.extend(node.children.iter().rev());
    }
}

/// All pumps, ordered by top node then bottom node in preorder.
pub fn find_pumps(t: &DerivationTree) -> Vec<Pump> {
    let mut out = Vec::new();
    for v in 0..t.len() {
        pumps_below(t, v, &mut out);
    }
    out
}

fn validate(t: &DerivationTree, p: Pump) -> Result<(), PumpError> {
    check_node(t, p.top)?;
    check_node(t, p.bottom)?;
    let (a, b) = (t.node(p.top), t.node(p.bottom));
    if p.top == p.bottom {
        return Err(PumpError::InvalidPump("top and bottom coincide".into()));
    }
    if !a.is_internal() || !b.is_internal() {
        return Err(PumpError::InvalidPump("pump nodes must be internal".into()));
    }
    if a.label != b.label {
        return Err(PumpError::InvalidPump("labels differ".into()));
    }
    if p.l != a.rank + 1 {
        return Err(PumpError::InvalidPump(format!("l = {} but label rank is {}", p.l, a.rank)));
    }
    if !is_direct_descendant(t, p.top, p.bottom)? {
        return Err(PumpError::InvalidPump("bottom is not a direct descendant of top".into()));
    }
    Ok(())
}

/// Factorization of the context between an ancestor `top` and `v`.
pub fn factorize_between(t: &DerivationTree, top: NodeId, v: NodeId) -> Result<ContextFactorization, PumpError> {
    check_node(t, top)?;
    check_node(t, v)?;
    if !t.is_ancestor(top, v) {
        return Err(PumpError::NodeNotInTree(v));
    }
    let mut f = ContextFactorization {
        s1: SepWord::empty(),
        s2: SepWord::empty(),
        fillers: vec![SepWord::sep(); t.node(v).rank],
    };
    let mut x = v;
    while x != top {
        let p = t.node(x).parent.expect("top is an ancestor");
        let parent = t.node(p);
        let is_left = parent.children[0] == x;
        let sibling = &t.node(parent.children[if is_left { 1 } else { 0 }]).word;
        match parent.kind {
            NodeKind::Concat if is_left => f.s2 = f.s2.concat(sibling),
            NodeKind::Concat => f.s1 = sibling.concat(&f.s1),
            NodeKind::Intercalate(j) if is_left => fill_sep(&mut f, j, sibling),
            NodeKind::Intercalate(j) => {
                let pos = sibling.sep_position(j).expect("well-ranked tree");
                let (a, b) = sibling.symbols().split_at(pos);
                f.s1 = SepWord::from_symbols(a.to_vec()).concat(&f.s1);
                f.s2 = f.s2.concat(&SepWord::from_symbols(b[1..].to_vec()));
            }
            _ => unreachable!("leaves have no children"),
        }
        x = p;
    }
    Ok(f)
}

/// Replaces the `j`-th separator of `s1 (γ ⊗ fillers) s2`, which never lies in `γ`.
fn fill_sep(f: &mut ContextFactorization, mut j: usize, w: &SepWord) {
    let slots = std::iter::once(&mut f.s1)
        .chain(f.fillers.iter_mut())
        .chain(std::iter::once(&mut f.s2));
    for slot in slots {
        let r = slot.rank();
        if j <= r {
            *slot = slot.intercalate(j, w).expect("j within rank");
            return;
        }
        j -= r;
    }
    unreachable!("gap index exceeds context rank");
}

/// Factorization of the context from the root to `v`.
pub fn factorize_context(t: &DerivationTree, v: NodeId) -> Result<ContextFactorization, PumpError> {
    factorize_between(t, t.root(), v)
}

fn plain(w: &SepWord) -> String {
    w.to_plain()
}

pub fn pump_decompose(t: &DerivationTree, p: Pump) -> Result<PumpDecomposition, PumpError> {
    validate(t, p)?;
    if t.word().rank() != 0 {
        return Err(PumpError::InvalidPump("tree does not derive a word".into()));
    }
    let outer = factorize_context(t, p.top)?;
    let inner = factorize_between(t, p.top, p.bottom)?;
    let pairs = inner
        .pairs()
        .ok_or_else(|| PumpError::InvalidPump("inner context is not gap preserving".into()))?;
    let l = p.l;
    let mut s = vec![plain(&outer.s1)];
    s.extend(outer.fillers.iter().map(plain));
    s.push(plain(&outer.s2));
    let mut y = vec![plain(&inner.s1)];
    let mut z = Vec::new();
    for (a, b) in &pairs {
        z.push(plain(a));
        y.push(plain(b));
    }
    z.push(plain(&inner.s2));
    let u = t.node(p.bottom).word.segments().iter().map(plain).collect();
    Ok(PumpDecomposition { l, s, y, u, z })
}

pub fn pump_word(d: &PumpDecomposition, p: usize) -> String {
    let mut out = d.s[0].clone();
    for i in 0..d.l {
        out.push_str(&d.y[i].repeat(p));
        out.push_str(&d.u[i]);
        out.push_str(&d.z[i].repeat(p));
        out.push_str(&d.s[i + 1]);
    }
    out
}

/// Input positions of the letters in the pump's scope, read off node ranges.
pub fn scope_positions(t: &DerivationTree, p: Pump) -> Result<Vec<usize>, PumpError> {
    validate(t, p)?;
    let (Some(top), Some(bottom)) = (&t.node(p.top).ranges, &t.node(p.bottom).ranges) else {
        return Err(PumpError::InvalidPump("tree has no ranges".into()));
    };
    let mut out = Vec::new();
    for (a, b) in top.spans().iter().zip(bottom.spans()) {
        out.extend(a.start..b.start);
        out.extend(b.end..a.end);
    }
    Ok(out)
}

/// Replaces the subtree at the top node by the one at the bottom node.
/// Also returns, for each node of the new tree, its id in `t`.
pub fn collapse_mapped(t: &DerivationTree, p: Pump) -> Result<(DerivationTree, Vec<NodeId>), PumpError> {
    validate(t, p)?;
    let mut order = Vec::with_capacity(t.len());
    let proto = t.proto_with(t.root(), Some((p.top, p.bottom)), &mut order);
    Ok((DerivationTree::from_proto(proto), order))
}

pub fn collapse(t: &DerivationTree, p: Pump) -> Result<DerivationTree, PumpError> {
    collapse_mapped(t, p).map(|(tree, _)| tree)
}

fn better(a: &Certificate, b: &Certificate) -> bool {
    (a.decomposition.region_len(), a.tree, a.pump.top, a.pump.bottom)
        < (b.decomposition.region_len(), b.tree, b.pump.top, b.pump.bottom)
}

/// Searches up to `max_trees` parse trees for a pump with `|y z| > 0`,
/// preferring the smallest pumped region.
pub fn pumping_certificate(g: &CnfGrammar, w: &str, max_trees: usize) -> Result<Option<Certificate>, PumpError> {
    let trees = parse_all(g, w, max_trees)?;
    if trees.is_empty() {
        return Err(PumpError::NotMember);
    }
    let mut best: Option<Certificate> = None;
    for (i, t) in trees.iter().enumerate() {
        for p in find_pumps(t) {
            let d = pump_decompose(t, p)?;
            if d.pumped_len() == 0 {
                continue;
            }
            let c = Certificate {
                decomposition: d,
                selected_hit: None,
                tree: i,
                pump: p,
            };
            if best.as_ref().is_none_or(|b| better(&c, b)) {
                best = Some(c);
            }
        }
    }
    Ok(best)
}

/// Searches for a pump whose `y`/`z` words cover a selected position of `w`.
///
/// Each parse tree is examined as follows: if some pump covers a selected
/// position, it is reported; otherwise the leftmost pump with `|y z| > 0`
/// is collapsed and the search repeats on the smaller tree. Pumps found
/// after collapsing are pulled back to the original tree, where they are
/// pumps as well, and decomposed there.
pub fn ogden_certificate(
    g: &CnfGrammar,
    w: &str,
    selected: &BTreeSet<usize>,
    max_trees: usize,
) -> Result<Option<Certificate>, PumpError> {
    let n = w.chars().count();
    if let Some(&p) = selected.iter().find(|&&p| p >= n) {
        return Err(PumpError::PositionOutOfRange(p));
    }
    if selected.is_empty() {
        return pumping_certificate(g, w, max_trees);
    }
    if !recognize(g, w)? {
        return Err(PumpError::NotMember);
    }
    let trees = parse_all(g, w, max_trees)?;
    for (i, original) in trees.iter().enumerate() {
        if let Some(c) = ogden_in_tree(original, selected)? {
            return Ok(Some(Certificate { tree: i, ..c }));
        }
    }
    Ok(None)
}

fn ogden_in_tree(original: &DerivationTree, selected: &BTreeSet<usize>) -> Result<Option<Certificate>, PumpError> {
    let position = |t: &DerivationTree, x: NodeId| t.node(x).ranges.as_ref().map(|r| r.first().start);
    let mut current = original.clone();
    let mut to_original: Vec<NodeId> = (0..original.len()).collect();
    // Collapsing strictly shrinks the word, so this bound is never reached.
    for _ in 0..=original.word().len() {
        let mut orig_pos = vec![0; current.word().len()];
        for (x, &o) in to_original.iter().enumerate() {
            if let NodeKind::Letter(_) = current.node(x).kind {
                let cur = position(&current, x).expect("rank-0 root");
                orig_pos[cur] = position(original, o).expect("rank-0 root");
            }
        }
        let pumps: Vec<Pump> = find_pumps(&current)
            .into_iter()
            .filter(|&p| scope_positions(&current, p).is_ok_and(|s| !s.is_empty()))
            .collect();
        let mut best: Option<Certificate> = None;
        for &p in &pumps {
            let hit = scope_positions(&current, p)?
                .into_iter()
                .map(|q| orig_pos[q])
                .filter(|q| selected.contains(q))
                .min();
            let Some(hit) = hit else { continue };
            let pulled = Pump {
                top: to_original[p.top],
                bottom: to_original[p.bottom],
                l: p.l,
            };
            let d = pump_decompose(original, pulled)?;
            debug_assert!(scope_positions(original, pulled)?.contains(&hit));
            let c = Certificate {
                decomposition: d,
                selected_hit: Some(hit),
                tree: 0,
                pump: pulled,
            };
            if best.as_ref().is_none_or(|b| better(&c, b)) {
                best = Some(c);
            }
        }
        if best.is_some() {
            return Ok(best);
        }
        let Some(&leftmost) = pumps.first() else {
            return Ok(None);
        };
        let (next, map) = collapse_mapped(&current, leftmost)?;
        to_original = map.into_iter().map(|x| to_original[x]).collect();
        current = next;
    }
    Ok(None)
}
