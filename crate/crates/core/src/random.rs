//! Random terms, law instances, multicontexts and grammars for testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::grammar::Grammar;
use crate::term::{check_k_correct, Multicontext, Term};
use crate::word::{SepWord, Symbol};

/// A word of the given rank with up to `max_letters` letters.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, alphabet: &[char], rank: usize, max_letters: usize) -> SepWord {
    let letters = rng.gen_range(0..=max_letters);
    let mut symbols: Vec<Symbol> = (0..letters)
        .map(|_| Symbol::Letter(*alphabet.choose(rng).expect("non-empty alphabet")))
        .collect();
    for _ in 0..rank {
        let at = rng.gen_range(0..=symbols.len());
        symbols.insert(at, Symbol::Sep);
    }
    SepWord::from_symbols(symbols)
}

/// Splits `rank` into the ranks of two children under a random connective,
/// keeping both at most `k`.
fn split<R: Rng + ?Sized>(rng: &mut R, rank: usize, k: usize) -> Option<(Option<usize>, usize, usize)> {
    if rng.gen_bool(0.5) {
        let r1 = rng.gen_range(0..=rank);
        Some((None, r1, rank - r1))
    } else {
        let left = rng.gen_range(1..=k.min(rank + 1).max(1));
        if left > k || left == 0 {
            return None;
        }
        let right = rank + 1 - left;
        if right > k {
            return None;
        }
        Some((Some(rng.gen_range(1..=left)), left, right))
    }
}

/// A `k`-correct ground term of the given rank and depth at most `depth`.
pub fn random_ground_term<R: Rng + ?Sized>(rng: &mut R, alphabet: &[char], rank: usize, k: usize, depth: usize) -> Term {
    if depth > 0 && rng.gen_bool(0.7) {
        if let Some((gap, r1, r2)) = split(rng, rank, k) {
            let l = random_ground_term(rng, alphabet, r1, k, depth - 1);
            let r = random_ground_term(rng, alphabet, r2, k, depth - 1);
            return match gap {
                None => Term::concat(l, r),
                Some(j) => Term::intercalate(j, l, r).expect("gap within rank"),
            };
        }
    }
    Term::from_word(&random_word(rng, alphabet, rank, 2))
}

fn ic(j: usize, l: Term, r: Term) -> Option<Term> {
    Term::intercalate(j, l, r).ok()
}

/// Both sides of law `law` instantiated with random ground terms, or `None`
/// if the sampled ranks and gaps violate the law's side condition.
fn try_law_instance<R: Rng + ?Sized>(rng: &mut R, law: u8, k: usize, depth: usize) -> Option<(Term, Term)> {
    let alphabet = ['a', 'b', 'c'];
    let r: [usize; 3] = [rng.gen_range(0..=k), rng.gen_range(0..=k), rng.gen_range(0..=k)];
    let j = rng.gen_range(1..=2 * k.max(1));
    let l = rng.gen_range(1..=k.max(1));
    let [r1, r2, r3] = r;
    let admissible = match law {
        1 | 7 => true,
        2 | 8 => j <= r1,
        3 => r1 < j && j <= r1 + r2,
        4 => j < l && l <= r1,
        5 => l <= r1 && l <= j && j < l + r2,
        6 => l <= r1 && j >= l + r2 && j < r1 + r2,
        _ => false,
    };
    if !admissible {
        return None;
    }
    let sub = depth.saturating_sub(2);
    let x: Vec<Term> = r.iter().map(|&ri| random_ground_term(rng, &alphabet, ri, k, sub)).collect();
    let (x1, x2, x3) = (x[0].clone(), x[1].clone(), x[2].clone());
    let pair = match law {
        1 => (
            Term::concat(Term::concat(x1.clone(), x2.clone()), x3.clone()),
            Term::concat(x1, Term::concat(x2, x3)),
        ),
        2 => (
            ic(j, Term::concat(x1.clone(), x2.clone()), x3.clone())?,
            Term::concat(ic(j, x1, x3)?, x2),
        ),
        3 => (
            ic(j, Term::concat(x1.clone(), x2.clone()), x3.clone())?,
            Term::concat(x1, ic(j - r1, x2, x3)?),
        ),
        4 => (
            ic(j, ic(l, x1.clone(), x2.clone())?, x3.clone())?,
            ic(l + r3 - 1, ic(j, x1, x3)?, x2)?,
        ),
        5 => (
            ic(j, ic(l, x1.clone(), x2.clone())?, x3.clone())?,
            ic(l, x1, ic(j - l + 1, x2, x3)?)?,
        ),
        6 => (
            ic(j, ic(l, x1.clone(), x2.clone())?, x3.clone())?,
            ic(l, ic(j - r2 + 1, x1, x3)?, x2)?,
        ),
        7 => (ic(1, Term::sep(), x1.clone())?, x1),
        8 => (ic(j, x1.clone(), Term::sep())?, x1),
        _ => return None,
    };
    let fits = |t: &Term| check_k_correct(t, k) && t.depth() <= depth;
    (fits(&pair.0) && fits(&pair.1)).then_some(pair)
}

/// A random ground instance of law `law` (1..=8) whose sides are `k`-correct
/// and of depth at most `depth`.
/// Panics if `k` admits no instance (law 4 needs `k >= 2`).
pub fn law_instance<R: Rng + ?Sized>(rng: &mut R, law: u8, k: usize, depth: usize) -> (Term, Term) {
    for _ in 0..100_000 {
        if let Some(p) = try_law_instance(rng, law, k, depth) {
            return p;
        }
    }
    panic!("no instance of law {law} for k = {k}");
}

fn essential_node<R: Rng + ?Sized>(rng: &mut R, k: usize, depth: usize, next_var: &mut usize) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Term::sep(),
            1 => Term::from_word(&random_word(rng, &['a', 'b'], 0, 2)),
            _ => {
                *next_var += 1;
                Term::var(*next_var - 1, rng.gen_range(0..=k))
            }
        };
    }
    let l = essential_node(rng, k, depth - 1, next_var);
    let r = essential_node(rng, k, depth - 1, next_var);
    if l.rank() > 0 && rng.gen_bool(0.6) {
        let j = rng.gen_range(1..=l.rank());
        Term::intercalate(j, l, r).expect("gap within rank")
    } else {
        Term::concat(l, r)
    }
}

/// A `k`-essential multicontext: root and leaves have rank at most `k`,
/// internal nodes may exceed it. Variables are numbered from 0 left to right.
pub fn random_essential<R: Rng + ?Sized>(rng: &mut R, k: usize, depth: usize) -> Multicontext {
    loop {
        let mut next_var = 0;
        let t = essential_node(rng, k, depth, &mut next_var);
        if t.rank() <= k {
            return t;
        }
    }
}

fn body<R: Rng + ?Sized>(rng: &mut R, names: &[(String, usize)], alphabet: &[char], rank: usize, k: usize, depth: usize) -> Term {
    if depth > 0 && rng.gen_bool(0.6) {
        if let Some((gap, r1, r2)) = split(rng, rank, k) {
            let l = body(rng, names, alphabet, r1, k, depth - 1);
            let r = body(rng, names, alphabet, r2, k, depth - 1);
            return match gap {
                None => Term::concat(l, r),
                Some(j) => Term::intercalate(j, l, r).expect("gap within rank"),
            };
        }
    }
    let candidates: Vec<&(String, usize)> = names.iter().filter(|(_, r)| *r == rank).collect();
    if !candidates.is_empty() && rng.gen_bool(0.8) {
        let (n, r) = candidates.choose(rng).expect("non-empty");
        return Term::nonterminal(n.clone(), *r);
    }
    Term::from_word(&random_word(rng, alphabet, rank, 1))
}

/// A valid `k`-DCFG over `{a, b}` with between 1 and `max_nonterminals`
/// nonterminals. The first rule of every nonterminal has a ground body.
pub fn random_grammar<R: Rng + ?Sized>(rng: &mut R, k: usize, max_nonterminals: usize) -> Grammar {
    let alphabet = ['a', 'b'];
    let count = rng.gen_range(1..=max_nonterminals.max(1));
    let mut names = vec![("S".to_string(), 0)];
    for i in 1..count {
        names.push((format!("N{i}"), rng.gen_range(0..=k)));
    }
    let mut g = Grammar::new(alphabet, k, "S");
    for (n, r) in &names {
        g.add_nonterminal(n.clone(), *r);
    }
    for (n, r) in &names {
        let ground = random_ground_term(rng, &alphabet, *r, k, 2);
        g.add_rule(n.clone(), ground);
        for _ in 0..rng.gen_range(1..=3) {
            let t = body(rng, &names, &alphabet, *r, k, 3);
            g.add_rule(n.clone(), t);
        }
    }
    debug_assert!(g.is_valid(), "{:?}", g.validate());
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = random_ground_term(&mut rng, &['a'], 2, 3, 4);
            assert_eq!(t.rank(), 2);
            assert!(check_k_correct(&t, 3));
            let c = random_essential(&mut rng, 2, 4);
            assert!(c.rank() <= 2);
            for k in 0..=2 {
                assert!(random_grammar(&mut rng, k, 6).is_valid());
            }
        }
    }

    #[test]
    fn law_sides_have_equal_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for law in 1..=8 {
            for _ in 0..20 {
                let (lhs, rhs) = law_instance(&mut rng, law, 3, 6);
                assert_eq!(lhs.eval().unwrap(), rhs.eval().unwrap(), "law {law}: {lhs} vs {rhs}");
            }
        }
    }
}
