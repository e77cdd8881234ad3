use std::collections::HashSet;

use dcfg::parser::{parse, recognize};
use dcfg::pumping::{collapse, find_pumps, pump_decompose, pump_word};
use dcfg::random::{law_instance, random_essential, random_grammar};
use dcfg::rewrite::{apply_rule, equivalent, normalize_k_correct, RewriteRule};
use dcfg::{check_k_correct, language, to_cnf, CnfGrammar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_words(max: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for n in 1..=max {
        for bits in 0..(1u32 << n) {
            out.push((0..n).map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' }).collect());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_preserves_language(seed in any::<u64>(), k in 0usize..=2) {
        let g = random_grammar(&mut ChaCha8Rng::seed_from_u64(seed), k, 5);
        let cnf = to_cnf(&g).unwrap();
        prop_assert_eq!(CnfGrammar::from_normal_form(&cnf.to_grammar()).unwrap(), cnf.clone());
        prop_assert_eq!(language(&g, 6), language(&cnf.to_grammar(), 6));
    }

    #[test]
    fn parser_matches_enumeration(seed in any::<u64>(), k in 0usize..=2) {
        let g = random_grammar(&mut ChaCha8Rng::seed_from_u64(seed), k, 5);
        let cnf = to_cnf(&g).unwrap();
        let oracle: HashSet<String> = language(&g, 5).into_iter().map(|w| w.to_plain()).collect();
        for w in all_words(5) {
            let member = recognize(&cnf, &w).unwrap();
            prop_assert_eq!(member, oracle.contains(&w), "{:?}", w);
            if member {
                let t = parse(&cnf, &w).unwrap();
                prop_assert_eq!(t.word().to_plain(), w.clone());
                for p in find_pumps(&t) {
                    let d = pump_decompose(&t, p).unwrap();
                    prop_assert_eq!(pump_word(&d, 1), w.clone());
                    let c = collapse(&t, p).unwrap();
                    prop_assert_eq!(c.word().to_plain(), pump_word(&d, 0));
                }
            }
        }
    }

    #[test]
    fn law_instances_agree(seed in any::<u64>(), law in 1u8..=8, k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lhs, rhs) = law_instance(&mut rng, law, k, 6);
        prop_assert_eq!(lhs.eval().unwrap(), rhs.eval().unwrap());
        let rewritten = apply_rule(&lhs, RewriteRule::forward(law), &[]).unwrap();
        prop_assert_eq!(rewritten.eval().unwrap(), lhs.eval().unwrap());
    }

    #[test]
    fn normalization_is_k_correct(seed in any::<u64>(), k in 0usize..=3) {
        let c = random_essential(&mut ChaCha8Rng::seed_from_u64(seed), k, 5);
        let n = normalize_k_correct(&c, k).unwrap();
        prop_assert!(check_k_correct(&n, k));
        prop_assert!(equivalent(&c, &n).unwrap());
        let vars = |t: &dcfg::Term| t.vars().into_iter().collect::<std::collections::BTreeSet<_>>();
        prop_assert_eq!(vars(&c), vars(&n));
    }
}
