//! Equivalence rewriting over terms and multicontexts, and normalization of
//! `k`-essential multicontexts into `k`-correct ones.
//!
//! The eight laws, numbered as usual (`r_i` is the rank of `x_i`):
//!
//! 1. `(x1 · x2) · x3 ∼ x1 · (x2 · x3)`
//! 2. `(x1 · x2) ⊙_j x3 ∼ (x1 ⊙_j x3) · x2` if `j <= r1`
//! 3. `(x1 · x2) ⊙_j x3 ∼ x1 · (x2 ⊙_{j-r1} x3)` if `r1 < j <= r1 + r2`
//! 4. `(x1 ⊙_l x2) ⊙_j x3 ∼ (x1 ⊙_j x3) ⊙_{l+r3-1} x2` if `j < l`
//! 5. `(x1 ⊙_l x2) ⊙_j x3 ∼ x1 ⊙_l (x2 ⊙_{j-l+1} x3)` if `l <= j < l + r2`
//! 6. `(x1 ⊙_l x2) ⊙_j x3 ∼ (x1 ⊙_{j-r2+1} x3) ⊙_l x2` if `j >= l + r2`
//! 7. `1 ⊙_1 x1 ∼ x1`
//! 8. `x1 ⊙_j 1 ∼ x1` for `j <= r1`

use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::term::{Hole, Multicontext, Side, Term, TermError, TermNode};
use crate::word::{SepWord, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("law {0} does not exist (laws are numbered 1..=8)")]
    UnknownLaw(u8),
    #[error("no subterm at the given position")]
    BadPosition,
    #[error("law {law} is not applicable: {reason}")]
    RuleNotApplicable { law: u8, reason: String },
    #[error("multicontext is not {k}-essential: {reason}")]
    NotEssential { k: usize, reason: String },
    #[error("multicontexts have different variables or nonterminals")]
    VariableMismatch,
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Left-hand side to right-hand side, as listed in the module docs.
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub law: u8,
    pub direction: Direction,
    /// Gap introduced by law 8 applied backward (`x1 → x1 ⊙_gap 1`).
    pub gap: usize,
}

impl RewriteRule {
    pub fn forward(law: u8) -> Self {
        RewriteRule {
            law,
            direction: Direction::Forward,
            gap: 1,
        }
    }

    pub fn backward(law: u8) -> Self {
        RewriteRule {
            law,
            direction: Direction::Backward,
            gap: 1,
        }
    }

    pub fn with_gap(mut self, gap: usize) -> Self {
        self.gap = gap;
        self
    }

    pub fn all() -> impl Iterator<Item = RewriteRule> {
        (1..=8).flat_map(|law| [RewriteRule::forward(law), RewriteRule::backward(law)])
    }
}

fn not_applicable(law: u8, reason: impl Into<String>) -> RewriteError {
    RewriteError::RuleNotApplicable {
        law,
        reason: reason.into(),
    }
}

fn ic(gap: usize, l: Term, r: Term) -> Result<Term, RewriteError> {
    Ok(Term::intercalate(gap, l, r)?)
}

/// Applies `rule` to the subterm of `t` at `pos`.
pub fn apply_rule(t: &Term, rule: RewriteRule, pos: &[Side]) -> Result<Term, RewriteError> {
    let sub = t.subterm(pos).ok_or(RewriteError::BadPosition)?;
    let replaced = rewrite_root(sub, rule)?;
    debug_assert_eq!(replaced.rank(), sub.rank());
    Ok(t.replace_at(pos, replaced)?)
}

fn rewrite_root(t: &Term, rule: RewriteRule) -> Result<Term, RewriteError> {
    let law = rule.law;
    if !(1..=8).contains(&law) {
        return Err(RewriteError::UnknownLaw(law));
    }
    match rule.direction {
        Direction::Forward => forward(t, law),
        Direction::Backward => backward(t, law, rule.gap),
    }
}

fn forward(t: &Term, law: u8) -> Result<Term, RewriteError> {
    use TermNode::*;
    match (law, t.node()) {
        (1, Concat(a, x3)) => match a.node() {
            Concat(x1, x2) => Ok(Term::concat(
                (**x1).clone(),
                Term::concat((**x2).clone(), (**x3).clone()),
            )),
            _ => Err(not_applicable(law, "left argument is not a concatenation")),
        },
        (2 | 3, Intercalate(j, a, x3)) => {
            let Concat(x1, x2) = a.node() else {
                return Err(not_applicable(law, "left argument is not a concatenation"));
            };
            let (j, r1, r2) = (*j, x1.rank(), x2.rank());
            if law == 2 {
                if j > r1 {
                    return Err(not_applicable(law, format!("needs j <= rk(x1), got j={j}, rk(x1)={r1}")));
                }
                Ok(Term::concat(ic(j, (**x1).clone(), (**x3).clone())?, (**x2).clone()))
            } else {
                if !(r1 < j && j <= r1 + r2) {
                    return Err(not_applicable(
                        law,
                        format!("needs rk(x1) < j <= rk(x1) + rk(x2), got j={j}, ranks {r1}, {r2}"),
                    ));
                }
                Ok(Term::concat((**x1).clone(), ic(j - r1, (**x2).clone(), (**x3).clone())?))
            }
        }
        (4..=6, Intercalate(j, a, x3)) => {
            let Intercalate(l, x1, x2) = a.node() else {
                return Err(not_applicable(law, "left argument is not an intercalation"));
            };
            let (j, l, r2, r3) = (*j, *l, x2.rank(), x3.rank());
            let (x1, x2, x3) = ((**x1).clone(), (**x2).clone(), (**x3).clone());
            match law {
                4 if j < l => ic(l + r3 - 1, ic(j, x1, x3)?, x2),
                4 => Err(not_applicable(law, format!("needs j < l, got j={j}, l={l}"))),
                5 if l <= j && j < l + r2 => ic(l, x1, ic(j - l + 1, x2, x3)?),
                5 => Err(not_applicable(law, format!("needs l <= j < l + rk(x2), got j={j}, l={l}, rk(x2)={r2}"))),
                6 if j >= l + r2 => ic(l, ic(j - r2 + 1, x1, x3)?, x2),
                _ => Err(not_applicable(law, format!("needs j >= l + rk(x2), got j={j}, l={l}, rk(x2)={r2}"))),
            }
        }
        (7, Intercalate(1, a, x1)) if matches!(a.node(), Sep) => Ok((**x1).clone()),
        (8, Intercalate(_, x1, b)) if matches!(b.node(), Sep) => Ok((**x1).clone()),
        (7, _) => Err(not_applicable(law, "not of the form 1 ⊙_1 x")),
        (8, _) => Err(not_applicable(law, "not of the form x ⊙_j 1")),
        (1, _) => Err(not_applicable(law, "not a concatenation")),
        _ => Err(not_applicable(law, "not an intercalation")),
    }
}

fn backward(t: &Term, law: u8, gap: usize) -> Result<Term, RewriteError> {
    use TermNode::*;
    match (law, t.node()) {
        (1, Concat(x1, b)) => match b.node() {
            Concat(x2, x3) => Ok(Term::concat(
                Term::concat((**x1).clone(), (**x2).clone()),
                (**x3).clone(),
            )),
            _ => Err(not_applicable(law, "right argument is not a concatenation")),
        },
        (2, Concat(a, x2)) => match a.node() {
            Intercalate(j, x1, x3) => ic(*j, Term::concat((**x1).clone(), (**x2).clone()), (**x3).clone()),
            _ => Err(not_applicable(law, "left argument is not an intercalation")),
        },
        (3, Concat(x1, b)) => match b.node() {
            Intercalate(m, x2, x3) => ic(
                m + x1.rank(),
                Term::concat((**x1).clone(), (**x2).clone()),
                (**x3).clone(),
            ),
            _ => Err(not_applicable(law, "right argument is not an intercalation")),
        },
        (4, Intercalate(m, a, x2)) => {
            let Intercalate(j, x1, x3) = a.node() else {
                return Err(not_applicable(law, "left argument is not an intercalation"));
            };
            // (x1 ⊙_j x3) ⊙_m x2 with m = l + r3 - 1
            let (m, j, r3) = (*m, *j, x3.rank());
            if m < r3 || m + 1 - r3 <= j {
                return Err(not_applicable(law, format!("needs j < m - rk(x3) + 1, got j={j}, m={m}, rk(x3)={r3}")));
            }
            let l = m + 1 - r3;
            ic(j, ic(l, (**x1).clone(), (**x2).clone())?, (**x3).clone())
        }
        (5, Intercalate(l, x1, b)) => match b.node() {
            Intercalate(m, x2, x3) => ic(
                m + l - 1,
                ic(*l, (**x1).clone(), (**x2).clone())?,
                (**x3).clone(),
            ),
            _ => Err(not_applicable(law, "right argument is not an intercalation")),
        },
        (6, Intercalate(l, a, x2)) => {
            let Intercalate(m, x1, x3) = a.node() else {
                return Err(not_applicable(law, "left argument is not an intercalation"));
            };
            if m <= l {
                return Err(not_applicable(law, format!("needs inner gap > outer gap, got {m} and {l}")));
            }
            ic(
                m + x2.rank() - 1,
                ic(*l, (**x1).clone(), (**x2).clone())?,
                (**x3).clone(),
            )
        }
        (7, _) => ic(1, Term::sep(), t.clone()),
        (8, _) => {
            if gap == 0 || gap > t.rank() {
                return Err(not_applicable(law, format!("gap {gap} exceeds rank {}", t.rank())));
            }
            ic(gap, t.clone(), Term::sep())
        }
        _ => Err(not_applicable(law, "shape mismatch")),
    }
}

/// Largest rank among internal (binary) nodes, 0 for a leaf.
fn max_internal_rank(t: &Term) -> usize {
    match t.children() {
        Some((l, r)) => t.rank().max(max_internal_rank(l)).max(max_internal_rank(r)),
        None => 0,
    }
}

/// Count of internal nodes of rank exactly `rank`.
fn heavy_count(t: &Term, rank: usize) -> usize {
    match t.children() {
        Some((l, r)) => usize::from(t.rank() == rank) + heavy_count(l, rank) + heavy_count(r, rank),
        None => 0,
    }
}

/// Shallowest internal node of rank `rank`, leftmost among equals.
fn shallowest_heavy(t: &Term, rank: usize) -> Option<Vec<Side>> {
    let mut queue = VecDeque::from([(Vec::new(), t)]);
    while let Some((pos, node)) = queue.pop_front() {
        if let Some((l, r)) = node.children() {
            if node.rank() == rank {
                return Some(pos);
            }
            let mut lp = pos.clone();
            lp.push(Side::Left);
            queue.push_back((lp, l));
            let mut rp = pos;
            rp.push(Side::Right);
            queue.push_back((rp, r));
        }
    }
    None
}

fn check_essential(c: &Multicontext, k: usize) -> Result<(), RewriteError> {
    if c.rank() > k {
        return Err(RewriteError::NotEssential {
            k,
            reason: format!("root has rank {}", c.rank()),
        });
    }
    for (_, sub) in c.subterms() {
        match sub.node() {
            TermNode::Var(i) if sub.rank() > k => {
                return Err(RewriteError::NotEssential {
                    k,
                    reason: format!("variable x{i} has rank {}", sub.rank()),
                })
            }
            TermNode::Nonterminal(n) if sub.rank() > k => {
                return Err(RewriteError::NotEssential {
                    k,
                    reason: format!("nonterminal {n} has rank {}", sub.rank()),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Rewrites a `k`-essential multicontext into an equivalent `k`-correct one.
///
/// Repeatedly takes the shallowest internal node of maximal rank `K > k`.
/// Its parent has smaller rank, so it is `C1 ⊙_j E` with `rk(E) = 0`, and
/// one of laws 2–6 pushes `E` below `C1`, removing one rank-`K` node without
/// creating another. For `k = 0` the remaining `1 ⊙_1 E` nodes are erased.
pub fn normalize_k_correct(c: &Multicontext, k: usize) -> Result<Multicontext, RewriteError> {
    check_essential(c, k)?;
    let mut t = c.clone();
    loop {
        let heavy_rank = max_internal_rank(&t);
        if heavy_rank <= k {
            break;
        }
        let heavy_pos = shallowest_heavy(&t, heavy_rank).expect("a heavy node exists");
        let (last, parent_pos) = heavy_pos
            .split_last()
            .expect("the root has rank <= k so it is never heavy");
        let parent = t.subterm(parent_pos).expect("parent exists");
        let TermNode::Intercalate(j, heavy, rest) = parent.node() else {
            unreachable!("a shallowest heavy node sits under an intercalation");
        };
        debug_assert_eq!(*last, Side::Left);
        debug_assert_eq!(rest.rank(), 0);
        let law = match heavy.node() {
            TermNode::Concat(c3, _) => {
                if *j <= c3.rank() {
                    2
                } else {
                    3
                }
            }
            TermNode::Intercalate(l, _, c4) => {
                if j < l {
                    4
                } else if *j < l + c4.rank() {
                    5
                } else {
                    6
                }
            }
            _ => unreachable!("heavy nodes are internal"),
        };
        let before = heavy_count(&t, heavy_rank);
        t = apply_rule(&t, RewriteRule::forward(law), parent_pos)?;
        debug_assert!(max_internal_rank(&t) < heavy_rank || heavy_count(&t, heavy_rank) < before);
    }
    if k == 0 {
        t = erase_unit_intercalations(&t);
    }
    Ok(t)
}

fn erase_unit_intercalations(t: &Term) -> Term {
    match t.node() {
        TermNode::Intercalate(1, l, r) if matches!(l.node(), TermNode::Sep) => erase_unit_intercalations(r),
        TermNode::Concat(l, r) => Term::concat(erase_unit_intercalations(l), erase_unit_intercalations(r)),
        TermNode::Intercalate(j, l, r) => {
            Term::intercalate(*j, erase_unit_intercalations(l), erase_unit_intercalations(r))
                .expect("erasure preserves ranks")
        }
        _ => t.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum HoleKey {
    Var(usize),
    Nonterminal(String),
}

fn holes(t: &Term) -> Vec<(HoleKey, usize)> {
    let mut out: Vec<(HoleKey, usize)> = t.vars().into_iter().map(|(i, r)| (HoleKey::Var(i), r)).collect();
    out.extend(
        t.nonterminals()
            .into_iter()
            .map(|(n, r)| (HoleKey::Nonterminal(n.to_string()), r)),
    );
    out.sort();
    out
}

fn letters_of(t: &Term, out: &mut HashSet<char>) {
    match t.node() {
        TermNode::Word(cs) => out.extend(cs.iter().copied()),
        TermNode::Concat(l, r) | TermNode::Intercalate(_, l, r) => {
            letters_of(l, out);
            letters_of(r, out);
        }
        _ => {}
    }
}

/// Decides equivalence of two multicontexts over the same variables.
///
/// Each variable of rank `l` is valued by a generic word `g_0 1 g_1 … 1 g_l`
/// of pairwise distinct fresh letters. Both connectives act letter-wise, so
/// equal values at this point imply equal values under every valuation.
/// Nonterminal leaves are valued by name.
pub fn equivalent(c1: &Multicontext, c2: &Multicontext) -> Result<bool, RewriteError> {
    let h1 = holes(c1);
    if h1 != holes(c2) {
        return Err(RewriteError::VariableMismatch);
    }
    if c1.rank() != c2.rank() {
        return Ok(false);
    }
    let mut used = HashSet::new();
    letters_of(c1, &mut used);
    letters_of(c2, &mut used);
    let mut fresh = (0xE000u32..).filter_map(char::from_u32).filter(|c| !used.contains(c));
    let mut generic: BTreeMap<HoleKey, SepWord> = BTreeMap::new();
    for (key, rank) in h1 {
        generic.entry(key).or_insert_with(|| {
            let mut w = SepWord::empty();
            for i in 0..=rank {
                if i > 0 {
                    w.push(Symbol::Sep);
                }
                w.push(Symbol::Letter(fresh.next().expect("fresh letters available")));
            }
            w
        });
    }
    let mut value = |hole: Hole<'_>| -> Result<SepWord, TermError> {
        let key = match hole {
            Hole::Var(i, _) => HoleKey::Var(i),
            Hole::Nonterminal(n, _) => HoleKey::Nonterminal(n.to_string()),
        };
        Ok(generic[&key].clone())
    };
    Ok(c1.eval_with(&mut value)? == c2.eval_with(&mut value)?)
}
