//! Exact bounded enumeration of derivable words.
//!
//! Intercalating the empty word shortens a word by one, so intermediate
//! values are pruned by letter count, which never decreases along a
//! derivation. Only the reported sets are cut at the full length bound.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{Grammar, GrammarError};
use crate::term::{Term, TermNode};
use crate::word::{SepWord, Symbol};

/// Words grouped by letter count.
#[derive(Default, Clone)]
struct Buckets {
    seen: HashSet<SepWord>,
    by_letters: Vec<Vec<SepWord>>,
}

impl Buckets {
    fn insert(&mut self, w: SepWord) -> bool {
        if self.seen.contains(&w) {
            return false;
        }
        let n = w.letter_count();
        if self.by_letters.len() <= n {
            self.by_letters.resize_with(n + 1, Vec::new);
        }
        self.by_letters[n].push(w.clone());
        self.seen.insert(w);
        true
    }

    fn up_to(&self, letters: usize) -> impl Iterator<Item = &SepWord> {
        self.by_letters.iter().take(letters + 1).flatten()
    }

    fn len(&self) -> usize {
        self.seen.len()
    }
}

fn eval_set(t: &Term, sets: &HashMap<&str, Buckets>, bound: usize) -> Buckets {
    let mut out = Buckets::default();
    match t.node() {
        TermNode::Word(cs) => {
            if cs.len() <= bound {
                out.insert(SepWord::from_letters(cs));
            }
        }
        TermNode::Sep => {
            out.insert(SepWord::sep());
        }
        TermNode::Nonterminal(n) => {
            if let Some(b) = sets.get(n.as_str()) {
                out = b.clone();
            }
        }
        TermNode::Var(_) => {}
        TermNode::Concat(l, r) => {
            let left = eval_set(l, sets, bound);
            let right = eval_set(r, sets, bound);
            for u in left.up_to(bound) {
                for v in right.up_to(bound - u.letter_count()) {
                    out.insert(u.concat(v));
                }
            }
        }
        TermNode::Intercalate(j, l, r) => {
            let left = eval_set(l, sets, bound);
            let right = eval_set(r, sets, bound);
            for u in left.up_to(bound) {
                for v in right.up_to(bound - u.letter_count()) {
                    out.insert(u.intercalate(*j, v).expect("ranks checked at construction"));
                }
            }
        }
    }
    out
}

/// For every nonterminal, the derivable words of length at most `max_len`
/// (separators count towards the length). Computed as a least fixpoint.
pub fn enumerate(g: &Grammar, max_len: usize) -> BTreeMap<String, BTreeSet<SepWord>> {
    let mut sets: HashMap<&str, Buckets> = g
        .nonterminals()
        .keys()
        .map(|n| (n.as_str(), Buckets::default()))
        .collect();
    loop {
        let mut changed = false;
        for rule in g.rules() {
            let produced = eval_set(&rule.rhs, &sets, max_len);
            let Some(target) = sets.get_mut(rule.lhs.as_str()) else {
                continue;
            };
            let before = target.len();
            for w in produced.seen {
                target.insert(w);
            }
            changed |= target.len() != before;
        }
        if !changed {
            break;
        }
    }
    sets.into_iter()
        .map(|(n, b)| {
            let words = b.seen.into_iter().filter(|w| w.len() <= max_len).collect();
            (n.to_string(), words)
        })
        .collect()
}

/// Members of `L(g)` of length at most `max_len`.
pub fn language(g: &Grammar, max_len: usize) -> BTreeSet<SepWord> {
    enumerate(g, max_len).remove(g.start()).unwrap_or_default()
}

/// Whether `nonterminal` derives `w` (which may contain separators).
pub fn derives(g: &Grammar, nonterminal: &str, w: &SepWord) -> Result<bool, GrammarError> {
    let rank = g
        .rank_of(nonterminal)
        .ok_or_else(|| GrammarError::UnknownNonterminal(nonterminal.to_string()))?;
    if rank != w.rank() {
        return Err(GrammarError::RankMismatch {
            name: nonterminal.to_string(),
            expected: rank,
            word: w.rank(),
        });
    }
    if w.symbols().iter().any(|s| matches!(s, Symbol::Letter(c) if !g.alphabet().contains(c))) {
        return Ok(false);
    }
    Ok(enumerate(g, w.len())
        .get(nonterminal)
        .is_some_and(|ws| ws.contains(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::fixtures::*;

    fn words(ws: &[&str]) -> BTreeSet<SepWord> {
        ws.iter().map(|w| SepWord::from(*w)).collect()
    }

    /// { w^2 | w ∈ {a,b}+, |w^2| <= n } written out from the closed form.
    fn squares_up_to(n: usize) -> BTreeSet<SepWord> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![String::new()];
        for _ in 0..n / 2 {
            frontier = frontier
                .iter()
                .flat_map(|w| [format!("{w}a"), format!("{w}b")])
                .collect();
            for w in &frontier {
                out.insert(SepWord::from(format!("{w}{w}").as_str()));
            }
        }
        out
    }

    #[test]
    fn g1_squares() {
        assert_eq!(language(&g1(), 4), words(&["aa", "bb", "aaaa", "abab", "baba", "bbbb"]));
        assert_eq!(language(&g1(), 8), squares_up_to(8));
    }

    #[test]
    fn g2_contains_example_word() {
        assert!(language(&g2(), 9).contains(&SepWord::from("abaabaaba")));
        assert_eq!(language(&g2(), 3), words(&["aaa", "bbb"]));
    }

    #[test]
    fn zero_bound() {
        assert!(language(&g1(), 0).is_empty());
        let g: Grammar = "alphabet a\nk 0\nstart S\nnonterm S 0\nrule S -> eps | a S\n".parse().unwrap();
        assert_eq!(language(&g, 0), words(&[""]));
    }

    #[test]
    fn empty_fillers_shorten_words() {
        // S -> (a 1 b) @1 E with E -> eps: the intermediate a1b is longer than the result.
        let g: Grammar = "alphabet a b\nk 1\nstart S\nnonterm S 0\nnonterm E 0\nrule S -> (a 1 b) @1 E\nrule E -> eps\n"
            .parse()
            .unwrap();
        assert_eq!(language(&g, 2), words(&["ab"]));
    }

    #[test]
    fn derives_checks() {
        let g = g1();
        assert!(derives(&g, "S", &"abab".into()).unwrap());
        assert!(!derives(&g, "S", &"aba".into()).unwrap());
        assert!(derives(&g, "T", &"ab1ab".into()).unwrap());
        assert!(matches!(derives(&g, "S", &"a1".into()), Err(GrammarError::RankMismatch { .. })));
        assert!(derives(&g2(), "T", &"11".into()).unwrap());
    }

    #[test]
    fn monotone_in_bound() {
        let g = g2();
        let small = enumerate(&g, 5);
        let big = enumerate(&g, 7);
        for (n, ws) in small {
            assert!(ws.is_subset(&big[&n]));
        }
    }
}
