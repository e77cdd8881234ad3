//! Relative positions of rank-1 constituents and of 2-pumps (pumps whose
//! label has rank 1; some texts call them 4-pumps after their four segments).

use serde::Serialize;
use thiserror::Error;

use crate::pumping::{find_pumps, Pump};
use crate::tree::{DerivationTree, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("tree carries no input positions")]
    MissingRanges,
}

/// `(i1, j1, i2, j2)`: the two segments `[i1; j1]` and `[i2; j2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Constituent1(pub [usize; 4]);

/// `(i1, j1, k1, l1, i2, j2, k2, l2)`: top constituent `(i1, l1, i2, l2)`,
/// bottom constituent `(j1, k1, j2, k2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pump2(pub [usize; 8]);

impl Constituent1 {
    pub fn new(i1: usize, j1: usize, i2: usize, j2: usize) -> Self {
        Constituent1([i1, j1, i2, j2])
    }

    pub fn is_ascending(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }
}

impl Pump2 {
    pub fn new(top: Constituent1, bottom: Constituent1) -> Self {
        let [i1, l1, i2, l2] = top.0;
        let [j1, k1, j2, k2] = bottom.0;
        Pump2([i1, j1, k1, l1, i2, j2, k2, l2])
    }

    pub fn top(&self) -> Constituent1 {
        let [i1, _, _, l1, i2, _, _, l2] = self.0;
        Constituent1([i1, l1, i2, l2])
    }

    pub fn bottom(&self) -> Constituent1 {
        let [_, j1, k1, _, _, j2, k2, _] = self.0;
        Constituent1([j1, k1, j2, k2])
    }

    pub fn is_ascending(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn segments(&self) -> [(usize, usize); 4] {
        let [i1, j1, k1, l1, i2, j2, k2, l2] = self.0;
        [(i1, j1), (k1, l1), (i2, j2), (k2, l2)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Case { case: u8, swapped: bool },
    Unclassifiable,
}

impl Classification {
    pub fn case(&self) -> Option<u8> {
        match self {
            Classification::Case { case, .. } => Some(*case),
            Classification::Unclassifiable => None,
        }
    }
}

fn chain(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

fn constituent_case(case: u8, a: &Constituent1, b: &Constituent1) -> bool {
    let [i1, j1, i2, j2] = a.0;
    let [i1p, j1p, i2p, j2p] = b.0;
    match case {
        1 => j2 <= i1p,
        2 => chain(&[j1, i1p, j2p, i2]),
        3 => chain(&[i1, i1p, j2p, j1]) || chain(&[i2, i1p, j2p, j2]),
        4 => chain(&[i1, i1p, j1p, j1, i2, i2p, j2p, j2]),
        _ => false,
    }
}

fn pump_case(case: u8, a: &Pump2, b: &Pump2) -> bool {
    let [i1, j1, k1, l1, i2, j2, k2, l2] = a.0;
    let [i1p, j1p, k1p, l1p, i2p, j2p, k2p, l2p] = b.0;
    match case {
        1 => l2 <= i1p,
        2 => chain(&[i1, i1p, l2p, j1]) || chain(&[k2, i1p, l2p, l2]),
        3 => chain(&[i1, i1p, j1p, j1, k1, k1p, l1p, l1, i2, i2p, j2p, j2, k2, k2p, l2p, l2]),
        4 => chain(&[i1, i1p, j1p, k1p, j1, k1, l1p, l1, i2, i2p, j2, k2, j2p, k2p, l2p, l2]),
        5 => chain(&[i1, i1p, j1, k1, j1p, k1p, l1p, l1, i2, i2p, j2p, k2p, j2, k2, l2p, l2]),
        6 => chain(&[i1, i1p, j1, j1p, k1p, k1, l1p, l1, i2, i2p, j2, j2p, k2p, k2, l2p, l2]),
        7 => chain(&[k1, i1p, l1p, l1, i2, i2p, l2p, j2]),
        8 => chain(&[i1, i1p, l1p, j1, k2, i2p, l2p, l2]),
        9 => chain(&[k1, i1p, l2p, l1]) || chain(&[i2, i1p, l2p, j2]),
        10 => chain(&[j1, i1p, l1p, k1, j2, i2p, l2p, k2]),
        11 => chain(&[j1, i1p, l2p, k1]) || chain(&[j2, i1p, l2p, k2]),
        12 => chain(&[l1, i2p, l2p, i2]),
        _ => false,
    }
}

fn classify<T>(cases: u8, a: &T, b: &T, test: impl Fn(u8, &T, &T) -> bool) -> Classification {
    for case in 1..=cases {
        if test(case, a, b) {
            return Classification::Case { case, swapped: false };
        }
        if test(case, b, a) {
            return Classification::Case { case, swapped: true };
        }
    }
    Classification::Unclassifiable
}

/// The first of the four constituent cases that holds, in either argument order.
pub fn classify_constituents(c: &Constituent1, d: &Constituent1) -> Classification {
    classify(4, c, d, constituent_case)
}

/// The first of the twelve pump cases that holds, in either argument order.
pub fn classify_pumps(p: &Pump2, q: &Pump2) -> Classification {
    classify(12, p, q, pump_case)
}

pub fn is_linear(p: &Pump2, q: &Pump2) -> bool {
    p.0[7] <= q.0[0] || q.0[7] <= p.0[0]
}

/// `p` is outer for `q`: `i1 ≤ i1' ≤ l2' ≤ l2`.
pub fn is_outer(p: &Pump2, q: &Pump2) -> bool {
    chain(&[p.0[0], q.0[0], q.0[7], p.0[7]])
}

/// `p` is embracing for `q`: `l1 ≤ i1' ≤ l2' ≤ i2`.
pub fn is_embracing(p: &Pump2, q: &Pump2) -> bool {
    chain(&[p.0[3], q.0[0], q.0[7], p.0[4]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorollaryOutcome {
    SecondOuter,
    FirstEmbracing,
    NotApplicable,
    /// Neither alternative holds although the precondition does.
    Violation,
}

/// When a segment of `q` is a proper subset of `[l1; i2]` of `p`, either `q`
/// is outer for `p` or `p` is embracing for `q`. Segments are compared as
/// sets of input positions, and an empty segment never triggers the check.
pub fn corollary_check(p: &Pump2, q: &Pump2) -> CorollaryOutcome {
    let (l1, i2) = (p.0[3], p.0[4]);
    let applies = q
        .segments()
        .iter()
        .any(|&(a, b)| a < b && l1 <= a && b <= i2 && (a, b) != (l1, i2));
    if !applies {
        CorollaryOutcome::NotApplicable
    } else if is_outer(q, p) {
        CorollaryOutcome::SecondOuter
    } else if is_embracing(p, q) {
        CorollaryOutcome::FirstEmbracing
    } else {
        CorollaryOutcome::Violation
    }
}

fn constituent_of(t: &DerivationTree, v: NodeId) -> Result<Constituent1, GeometryError> {
    let rv = t.node(v).ranges.as_ref().ok_or(GeometryError::MissingRanges)?;
    let s = rv.spans();
    Ok(Constituent1([s[0].start, s[0].end, s[1].start, s[1].end]))
}

/// Every rank-1 node with its constituent, in preorder.
pub fn constituents_rank1(t: &DerivationTree) -> Result<Vec<(NodeId, Constituent1)>, GeometryError> {
    if !t.has_ranges() {
        return Err(GeometryError::MissingRanges);
    }
    (0..t.len())
        .filter(|&v| t.node(v).rank == 1)
        .map(|v| constituent_of(t, v).map(|c| (v, c)))
        .collect()
}

/// Every pump with a rank-1 label as an index tuple.
pub fn pumps_rank1(t: &DerivationTree) -> Result<Vec<(Pump, Pump2)>, GeometryError> {
    if !t.has_ranges() {
        return Err(GeometryError::MissingRanges);
    }
    find_pumps(t)
        .into_iter()
        .filter(|p| p.l == 2)
        .map(|p| Ok((p, Pump2::new(constituent_of(t, p.top)?, constituent_of(t, p.bottom)?))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow<T> {
    pub pair: [T; 2],
    pub case: Option<u8>,
    pub swapped: bool,
}

fn row<T: Copy>(a: T, b: T, c: Classification) -> TableRow<T> {
    match c {
        Classification::Case { case, swapped } => TableRow {
            pair: [a, b],
            case: Some(case),
            swapped,
        },
        Classification::Unclassifiable => TableRow {
            pair: [a, b],
            case: None,
            swapped: false,
        },
    }
}

/// All unordered pairs of distinct items, classified.
pub fn constituent_table(cs: &[Constituent1]) -> Vec<TableRow<Constituent1>> {
    let mut out = Vec::new();
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            out.push(row(*a, *b, classify_constituents(a, b)));
        }
    }
    out
}

pub fn pump_table(ps: &[Pump2]) -> Vec<TableRow<Pump2>> {
    let mut out = Vec::new();
    for (i, a) in ps.iter().enumerate() {
        for b in &ps[i + 1..] {
            out.push(row(*a, *b, classify_pumps(a, b)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: [usize; 4]) -> Constituent1 {
        Constituent1(x)
    }

    fn case_of(cl: Classification) -> u8 {
        cl.case().unwrap()
    }

    #[test]
    fn constituent_examples() {
        assert_eq!(case_of(classify_constituents(&c([0, 1, 2, 3]), &c([3, 4, 5, 6]))), 1);
        assert_eq!(case_of(classify_constituents(&c([0, 2, 4, 6]), &c([2, 3, 3, 4]))), 2);
        assert_eq!(case_of(classify_constituents(&c([0, 2, 5, 8]), &c([1, 2, 6, 7]))), 4);
        assert_eq!(
            classify_constituents(&c([3, 4, 5, 6]), &c([0, 1, 2, 3])),
            Classification::Case { case: 1, swapped: true }
        );
        // Interleaved segments correspond to no admissible embedding.
        assert_eq!(classify_constituents(&c([0, 2, 4, 6]), &c([1, 3, 5, 7])), Classification::Unclassifiable);
    }

    #[test]
    fn pump_from_constituents() {
        let p = Pump2::new(c([0, 5, 10, 15]), c([1, 4, 11, 14]));
        assert_eq!(p.0, [0, 1, 4, 5, 10, 11, 14, 15]);
        assert_eq!(p.top(), c([0, 5, 10, 15]));
        assert_eq!(p.bottom(), c([1, 4, 11, 14]));
    }

    #[test]
    fn pump_examples() {
        let p = Pump2([0, 1, 2, 3, 4, 5, 6, 7]);
        let q = Pump2([8, 9, 10, 11, 12, 13, 14, 15]);
        assert_eq!(case_of(classify_pumps(&p, &q)), 1);
        let outer = Pump2([0, 1, 2, 3, 8, 9, 10, 11]);
        let inner = Pump2([4, 5, 5, 6, 6, 7, 7, 8]);
        assert_eq!(case_of(classify_pumps(&outer, &inner)), 12);
        assert_eq!(case_of(classify_pumps(&outer, &outer)), 3);
        assert_eq!(corollary_check(&outer, &inner), CorollaryOutcome::FirstEmbracing);
    }

    #[test]
    fn predicates() {
        let p = Pump2([0, 1, 2, 3, 8, 9, 10, 11]);
        let inner = Pump2([4, 5, 5, 6, 6, 7, 7, 8]);
        assert!(is_outer(&p, &inner) && is_embracing(&p, &inner));
        assert!(!is_linear(&p, &inner));
        assert!(is_outer(&p, &p) && !is_linear(&p, &p));
        let wide = Pump2([0, 1, 4, 5, 6, 7, 10, 12]);
        let mid = Pump2([2, 2, 3, 3, 8, 9, 9, 11]);
        // A segment of `wide` sits inside [l1; i2] of `mid`, and `wide` spans it.
        assert_eq!(corollary_check(&mid, &wide), CorollaryOutcome::SecondOuter);
        assert_eq!(corollary_check(&p, &Pump2([20; 8])), CorollaryOutcome::NotApplicable);
    }

    fn ascending<const N: usize>() -> impl Strategy<Value = [usize; N]> {
        proptest::collection::vec(0usize..12, N).prop_map(|mut v| {
            v.sort();
            v.try_into().unwrap()
        })
    }

    proptest! {
        #[test]
        fn classification_symmetric(a in ascending::<8>(), b in ascending::<8>()) {
            let (p, q) = (Pump2(a), Pump2(b));
            prop_assert_eq!(classify_pumps(&p, &q).case(), classify_pumps(&q, &p).case());
            let (c, d) = (Constituent1(p.top().0), Constituent1(q.top().0));
            prop_assert_eq!(classify_constituents(&c, &d).case(), classify_constituents(&d, &c).case());
        }

        #[test]
        fn non_linear_pairs_have_an_outer(a in ascending::<8>(), b in ascending::<8>()) {
            let (p, q) = (Pump2(a), Pump2(b));
            // Only pairs whose top constituents are admissibly embedded occur in trees.
            if classify_constituents(&p.top(), &q.top()).case().is_some() && !is_linear(&p, &q) {
                prop_assert!(is_outer(&p, &q) || is_outer(&q, &p));
            }
        }

        #[test]
        fn embracing_implies_outer(a in ascending::<8>(), b in ascending::<8>()) {
            let (p, q) = (Pump2(a), Pump2(b));
            if is_embracing(&p, &q) {
                prop_assert!(is_outer(&p, &q));
            }
        }
    }
}
