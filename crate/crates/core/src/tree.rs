//! Derivation trees of normal-form grammars.
//!
//! Nodes live in an arena in preorder, so the root is node 0 and every
//! subtree occupies a contiguous id range. Each node is labeled by the
//! nonterminal it expands and caches its yield. When the root has rank 0,
//! every node also carries the input spans of its constituent.

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::parser::{RangeVector, Span};
use crate::word::{SepWord, Symbol};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Concat,
    Intercalate(usize),
    Letter(char),
    Sep,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    pub nonterminal: usize,
    pub kind: NodeKind,
    pub rank: usize,
    pub word: SepWord,
    pub ranges: Option<RangeVector>,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub depth: usize,
    /// One past the last node of this subtree.
    pub end: NodeId,
}

impl Node {
    pub fn is_internal(&self) -> bool {
        !self.children.is_empty()
    }
}

/// A tree under construction, used to build arenas.
#[derive(Debug, Clone)]
pub(crate) struct Proto {
    pub label: String,
    pub nonterminal: usize,
    pub kind: NodeKind,
    pub children: Vec<Proto>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTree {
    nodes: Vec<Node>,
}

impl DerivationTree {
    pub(crate) fn from_proto(proto: Proto) -> Self {
        let mut nodes = Vec::new();
        push_proto(&mut nodes, proto, None, 0);
        for id in (0..nodes.len()).rev() {
            let word = match nodes[id].kind {
                NodeKind::Letter(c) => SepWord::from_symbols(vec![Symbol::Letter(c)]),
                NodeKind::Sep => SepWord::sep(),
                NodeKind::Empty => SepWord::empty(),
                NodeKind::Concat => {
                    let [l, r] = two(&nodes[id].children);
                    nodes[l].word.concat(&nodes[r].word)
                }
                NodeKind::Intercalate(j) => {
                    let [l, r] = two(&nodes[id].children);
                    nodes[l].word.intercalate(j, &nodes[r].word).expect("well-ranked tree")
                }
            };
            nodes[id].rank = word.rank();
            nodes[id].word = word;
        }
        let mut tree = DerivationTree { nodes };
        tree.assign_ranges();
        tree
    }

    /// Top-down span assignment from segment lengths of the cached yields.
    fn assign_ranges(&mut self) {
        if self.nodes[0].rank != 0 {
            return;
        }
        let n = self.nodes[0].word.len();
        self.nodes[0].ranges = Some(RangeVector::from_spans([Span::new(0, n)]));
        for id in 0..self.nodes.len() {
            let node = &self.nodes[id];
            let Some(ranges) = node.ranges.clone() else { continue };
            let kind = node.kind;
            if !node.is_internal() {
                continue;
            }
            let [l, r] = two(&node.children);
            let lens = |x: NodeId| -> Vec<usize> { self.nodes[x].word.segments().iter().map(SepWord::len).collect() };
            let (ll, rl) = (lens(l), lens(r));
            let nr = ranges.spans();
            let (left, right): (Vec<Span>, Vec<Span>) = match kind {
                NodeKind::Concat => {
                    let m = ll.len() - 1;
                    let cut = nr[m].start + ll[m];
                    let mut left = nr[..m].to_vec();
                    left.push(Span::new(nr[m].start, cut));
                    let mut right = vec![Span::new(cut, nr[m].end)];
                    right.extend_from_slice(&nr[m + 1..]);
                    (left, right)
                }
                NodeKind::Intercalate(j) => {
                    let rr = rl.len() - 1;
                    let (m1, m2) = (j - 1, j - 1 + rr);
                    let before = Span::new(nr[m1].start, nr[m1].start + ll[j - 1]);
                    let after = Span::new(nr[m2].end - ll[j], nr[m2].end);
                    let mut left = nr[..m1].to_vec();
                    left.push(before);
                    left.push(after);
                    left.extend_from_slice(&nr[m2 + 1..]);
                    let right = if rr == 0 {
                        vec![Span::new(before.end, after.start)]
                    } else {
                        let mut right = vec![Span::new(before.end, nr[m1].end)];
                        right.extend_from_slice(&nr[m1 + 1..m2]);
                        right.push(Span::new(nr[m2].start, after.start));
                        right
                    };
                    (left, right)
                }
                _ => unreachable!("leaves have no children"),
            };
            self.nodes[l].ranges = Some(RangeVector::from_spans(left));
            self.nodes[r].ranges = Some(RangeVector::from_spans(right));
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn get(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// The yield of the root.
    pub fn word(&self) -> &SepWord {
        &self.nodes[0].word
    }

    pub fn has_ranges(&self) -> bool {
        self.nodes[0].ranges.is_some()
    }

    /// Whether `b` lies in the subtree of `a` (including `a` itself).
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        a <= b && b < self.nodes[a].end
    }

    /// Nodes from `b` up to and including the root.
    pub fn ancestors(&self, b: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(Some(b), move |&x| self.nodes[x].parent)
    }

    /// Rebuilds the subtree at `id`, replacing the subtree at `cut` by the
    /// one at `graft`. Returns the prototype and the old ids in preorder.
    pub(crate) fn proto_with(&self, id: NodeId, swap: Option<(NodeId, NodeId)>, order: &mut Vec<NodeId>) -> Proto {
        let id = match swap {
            Some((cut, graft)) if cut == id => graft,
            _ => id,
        };
        order.push(id);
        let node = &self.nodes[id];
        Proto {
            label: node.label.clone(),
            nonterminal: node.nonterminal,
            kind: node.kind,
            children: node.children.iter().map(|&c| self.proto_with(c, swap, order)).collect(),
        }
    }

    /// The subtree at `id` as a tree of its own.
    pub fn subtree(&self, id: NodeId) -> DerivationTree {
        DerivationTree::from_proto(self.proto_with(id, None, &mut Vec::new()))
    }

    /// Writes the tree in bracketed form, one node per label.
    pub fn to_bracketed(&self) -> String {
        let mut out = String::new();
        self.bracket(0, &mut out);
        out
    }

    fn bracket(&self, id: NodeId, out: &mut String) {
        let node = &self.nodes[id];
        out.push('(');
        out.push_str(&node.label);
        match node.kind {
            NodeKind::Letter(c) => {
                out.push(' ');
                out.push(c);
            }
            NodeKind::Sep => out.push_str(" 1"),
            NodeKind::Empty => out.push_str(" eps"),
            NodeKind::Concat => {}
            NodeKind::Intercalate(j) => out.push_str(&format!(" @{j}")),
        }
        for &c in &node.children {
            out.push(' ');
            self.bracket(c, out);
        }
        out.push(')');
    }
}

fn two(children: &[NodeId]) -> [NodeId; 2] {
    [children[0], children[1]]
}

fn push_proto(nodes: &mut Vec<Node>, proto: Proto, parent: Option<NodeId>, depth: usize) -> NodeId {
    let id = nodes.len();
    nodes.push(Node {
        label: proto.label,
        nonterminal: proto.nonterminal,
        kind: proto.kind,
        rank: 0,
        word: SepWord::empty(),
        ranges: None,
        children: Vec::new(),
        parent,
        depth,
        end: id + 1,
    });
    let children: Vec<NodeId> = proto
        .children
        .into_iter()
        .map(|c| push_proto(nodes, c, Some(id), depth + 1))
        .collect();
    nodes[id].children = children;
    nodes[id].end = nodes.len();
    id
}

struct NodeRef<'a>(&'a DerivationTree, NodeId);

impl Serialize for NodeRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let node = self.0.node(self.1);
        let (kind, gap, letter) = match node.kind {
            NodeKind::Concat => ("concat", None, None),
            NodeKind::Intercalate(j) => ("intercalate", Some(j), None),
            NodeKind::Letter(c) => ("letter", None, Some(c.to_string())),
            NodeKind::Sep => ("sep", None, None),
            NodeKind::Empty => ("empty", None, None),
        };
        let mut st = s.serialize_struct("Node", 8)?;
        st.serialize_field("label", &node.label)?;
        st.serialize_field("kind", kind)?;
        if let Some(j) = gap {
            st.serialize_field("gap", &j)?;
        }
        if let Some(c) = letter {
            st.serialize_field("letter", &c)?;
        }
        st.serialize_field("rank", &node.rank)?;
        st.serialize_field("yield", &node.word.to_plain())?;
        if let Some(r) = &node.ranges {
            let pairs: Vec<[usize; 2]> = r.spans().iter().map(|s| [s.start, s.end]).collect();
            st.serialize_field("ranges", &pairs)?;
        }
        st.serialize_field("children", &Children(self.0, &node.children))?;
        st.end()
    }
}

struct Children<'a>(&'a DerivationTree, &'a [NodeId]);

impl Serialize for Children<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.1.len()))?;
        for &c in self.1 {
            seq.serialize_element(&NodeRef(self.0, c))?;
        }
        seq.end()
    }
}

/// Serializes as nested objects with `label`, `kind`, `rank`, `yield`,
/// `ranges` (when known) and `children`.
impl Serialize for DerivationTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NodeRef(self, 0).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(label: &str, kind: NodeKind) -> Proto {
        Proto {
            label: label.into(),
            nonterminal: 0,
            kind,
            children: vec![],
        }
    }

    fn node(label: &str, kind: NodeKind, l: Proto, r: Proto) -> Proto {
        Proto {
            label: label.into(),
            nonterminal: 0,
            kind,
            children: vec![l, r],
        }
    }

    // (a 1 b) @1 c as a tree: S -> X @1 C, X -> (A Y), Y -> (P B)
    fn sample() -> DerivationTree {
        let x = node(
            "X",
            NodeKind::Concat,
            leaf("A", NodeKind::Letter('a')),
            node("Y", NodeKind::Concat, leaf("P", NodeKind::Sep), leaf("B", NodeKind::Letter('b'))),
        );
        DerivationTree::from_proto(node("S", NodeKind::Intercalate(1), x, leaf("C", NodeKind::Letter('c'))))
    }

    #[test]
    fn yields_and_ranks() {
        let t = sample();
        assert_eq!(t.word().to_plain(), "acb");
        assert_eq!(t.len(), 7);
        assert_eq!(t.node(1).word.to_plain(), "a1b");
        assert_eq!(t.node(1).rank, 1);
        assert_eq!(t.node(0).end, 7);
        assert!(t.is_ancestor(1, 4));
        assert!(!t.is_ancestor(4, 1));
        assert_eq!(t.ancestors(4).collect::<Vec<_>>(), vec![4, 3, 1, 0]);
    }

    #[test]
    fn ranges_follow_constituents() {
        let t = sample();
        let spans = |id: NodeId| -> Vec<(usize, usize)> {
            t.node(id).ranges.as_ref().unwrap().spans().iter().map(|s| (s.start, s.end)).collect()
        };
        assert_eq!(spans(0), vec![(0, 3)]);
        assert_eq!(spans(1), vec![(0, 1), (2, 3)]);
        assert_eq!(spans(4), vec![(1, 1), (2, 2)]);
        assert_eq!(spans(6), vec![(1, 2)]);
    }

    #[test]
    fn nonzero_root_has_no_ranges() {
        let t = sample().subtree(1);
        assert!(!t.has_ranges());
        assert_eq!(t.word().to_plain(), "a1b");
    }

    #[test]
    fn bracketed_form() {
        assert_eq!(sample().to_bracketed(), "(S @1 (X (A a) (Y (P 1) (B b))) (C c))");
    }
}
