use std::collections::BTreeSet;

use dcfg::geometry::{corollary_check, pumps_rank1, CorollaryOutcome};
use dcfg::parser::{parse, parse_all, recognize, Chart};
use dcfg::pumping::{
    factorize_context, find_pumps, ogden_certificate, pump_decompose, pump_word, scope_positions, DEFAULT_MAX_TREES,
};
use dcfg::tree::NodeKind;
use dcfg::{derives, language, to_cnf, Grammar, SepWord};

fn g1() -> Grammar {
    include_str!("../../../grammars/g1.dcfg").parse().unwrap()
}

fn g2() -> Grammar {
    include_str!("../../../grammars/g2.dcfg").parse().unwrap()
}

fn words(g: &Grammar, max: usize) -> Vec<String> {
    language(g, max).into_iter().map(|w| w.to_plain()).collect()
}

#[test]
fn chart_items_derive_their_segments() {
    for g in [g1(), g2()] {
        let cnf = to_cnf(&g).unwrap();
        let as_grammar = cnf.to_grammar();
        for w in words(&g, 6) {
            let chart = Chart::build(&cnf, &w).unwrap();
            for item in chart.items() {
                let pieces: Vec<SepWord> = item
                    .ranges
                    .spans()
                    .iter()
                    .map(|s| SepWord::from_letters(&chart.input()[s.start..s.end]))
                    .collect();
                let name = cnf.name(item.nonterminal);
                assert!(derives(&as_grammar, name, &SepWord::join(&pieces)).unwrap(), "{w}: {name} {}", item.ranges);
            }
        }
    }
}

#[test]
fn every_context_factorization_reconstructs() {
    for g in [g1(), g2()] {
        let cnf = to_cnf(&g).unwrap();
        for w in words(&g, 6) {
            for t in parse_all(&cnf, &w, DEFAULT_MAX_TREES).unwrap() {
                for v in 0..t.len() {
                    let f = factorize_context(&t, v).unwrap();
                    assert_eq!(f.apply(&t.node(v).word).unwrap(), *t.word());
                    assert!(f.fillers.iter().all(|x| x.rank() == 0));
                }
            }
        }
    }
}

#[test]
fn decompositions_agree_with_positions() {
    for g in [g1(), g2()] {
        let cnf = to_cnf(&g).unwrap();
        for w in words(&g, 9) {
            let chars: Vec<char> = w.chars().collect();
            let t = parse(&cnf, &w).unwrap();
            for p in find_pumps(&t) {
                let d = pump_decompose(&t, p).unwrap();
                assert_eq!(d.l, t.node(p.top).rank + 1);
                assert_eq!(pump_word(&d, 1), w);
                let top = t.node(p.top).ranges.clone().unwrap();
                let bottom = t.node(p.bottom).ranges.clone().unwrap();
                for i in 0..d.l {
                    let (a, b) = (top.spans()[i], bottom.spans()[i]);
                    let slice = |x: usize, y: usize| chars[x..y].iter().collect::<String>();
                    assert_eq!(d.y[i], slice(a.start, b.start));
                    assert_eq!(d.u[i], slice(b.start, b.end));
                    assert_eq!(d.z[i], slice(b.end, a.end));
                }
                assert_eq!(scope_positions(&t, p).unwrap().len(), d.pumped_len());
            }
        }
    }
}

#[test]
fn rank_zero_pumps_are_classical() {
    let g: Grammar = "alphabet a b\nk 0\nstart S\nnonterm S 0\nnonterm A 0\nrule S -> A\nrule A -> a A b | a b\n"
        .parse()
        .unwrap();
    let cnf = to_cnf(&g).unwrap();
    let t = parse(&cnf, "aaabbb").unwrap();
    let pumps = find_pumps(&t);
    assert!(!pumps.is_empty());
    for p in pumps {
        let d = pump_decompose(&t, p).unwrap();
        assert_eq!((d.l, d.s.len(), d.y.len()), (1, 2, 1));
        assert!(recognize(&cnf, &pump_word(&d, 2)).unwrap());
    }
}

#[test]
fn matryoshka_chains_repeat_labels() {
    // A same-rank chain longer than the number of nonterminals of that rank repeats a label.
    let cnf = to_cnf(&g1()).unwrap();
    let rank1 = (0..cnf.nonterminal_count()).filter(|&n| cnf.rank(n) == 1).count();
    let t = parse(&cnf, &"ab".repeat(8)).unwrap();
    let deepest = (0..t.len()).max_by_key(|&v| t.node(v).depth).unwrap();
    let chain: Vec<usize> = t
        .ancestors(deepest)
        .filter(|&v| t.node(v).rank == 1 && t.node(v).is_internal())
        .collect();
    assert!(chain.len() > rank1);
    let labels: BTreeSet<&str> = chain.iter().map(|&v| t.node(v).label.as_str()).collect();
    assert!(labels.len() < chain.len());
    assert!(!find_pumps(&t).is_empty());
}

#[test]
fn corollary_never_violated_on_fixture_trees() {
    let cnf = to_cnf(&g1()).unwrap();
    let mut applicable = 0;
    for w in words(&g1(), 12) {
        for t in parse_all(&cnf, &w, DEFAULT_MAX_TREES).unwrap() {
            let ps = pumps_rank1(&t).unwrap();
            for (_, a) in &ps {
                assert!(a.is_ascending());
                for (_, b) in &ps {
                    let outcome = corollary_check(a, b);
                    assert_ne!(outcome, CorollaryOutcome::Violation, "{w}: {a:?} {b:?}");
                    applicable += usize::from(outcome != CorollaryOutcome::NotApplicable);
                }
            }
        }
    }
    assert!(applicable > 0);
}

#[test]
fn ogden_positions_keep_their_letters() {
    let cnf = to_cnf(&g1()).unwrap();
    let w = "abbaabbaabbaabba";
    let chars: Vec<char> = w.chars().collect();
    for i in 0..w.len() {
        if let Some(c) = ogden_certificate(&cnf, w, &BTreeSet::from([i]), DEFAULT_MAX_TREES).unwrap() {
            let hit = c.selected_hit.unwrap();
            assert_eq!(hit, i);
            let t = parse(&cnf, w).unwrap();
            let scope = scope_positions(&t, c.pump).unwrap();
            assert!(scope.contains(&hit));
            let letter_nodes = (0..t.len()).filter(|&x| t.node(x).kind == NodeKind::Letter(chars[hit]));
            assert!(letter_nodes.into_iter().any(|x| t.node(x).ranges.as_ref().unwrap().first().start == hit));
        }
    }
}

#[test]
fn parse_all_respects_bound() {
    // Ambiguous: every split of a^n.
    let g: Grammar = "alphabet a\nk 0\nstart S\nnonterm S 0\nnonterm A 0\nrule S -> A\nrule A -> A A | a\n"
        .parse()
        .unwrap();
    let cnf = to_cnf(&g).unwrap();
    let all = parse_all(&cnf, "aaaa", 100).unwrap();
    assert_eq!(all.len(), 5);
    assert_eq!(parse_all(&cnf, "aaaa", 3).unwrap().len(), 3);
    assert_eq!(parse_all(&cnf, "aaaa", 3).unwrap()[..], all[..3]);
}
