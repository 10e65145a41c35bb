mod common;

use common::*;
use proptest::prelude::*;
use wmatch::alphabet::Symbol;
use wmatch::run::{default_cap, occurrences_oracle};
use wmatch::serialize::{from_json, to_json};
use wmatch::{
    asymptotic_speed_hmm, asymptotic_speed_iid, build_classic, canonicalize, check_validity_standard, compact, expand,
    is_redundant, is_standard, run, run_generic, standardize, validate_bruteforce, Algorithm, Alphabet, IidModel, Pattern,
    Runner, Validity,
};

fn pattern() -> impl Strategy<Value = Pattern> {
    proptest::collection::vec(0u8..2, 1..=4).prop_map(|s| Pattern::from_symbols(Alphabet::binary(), s).unwrap())
}

fn text() -> impl Strategy<Value = Vec<Symbol>> {
    proptest::collection::vec(0u8..2, 0..60)
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    proptest::sample::select(Algorithm::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classic_machines_find_every_occurrence(w in pattern(), t in text(), alg in algorithm()) {
        let m = build_classic(alg, &w);
        let tr = run(&m, &t).unwrap();
        prop_assert!(!tr.truncated);
        let all = occurrences_oracle(&w, &t);
        prop_assert!(tr.occurrences.iter().all(|p| all.contains(p)));
        let limit = tr.stopped_at.unwrap_or(usize::MAX);
        prop_assert!(all.iter().filter(|&&p| p < limit).all(|p| tr.occurrences.contains(p)));
    }

    #[test]
    fn runs_are_well_formed(w in pattern(), seed in any::<u64>(), t in text()) {
        let m = random_machine(&mut rng(seed), &w, 5, 3);
        let cap = default_cap(&m, t.len());
        let tr = run_generic(&m, &t, cap).unwrap();
        prop_assert!(tr.tac <= cap);
        prop_assert!(tr.steps.windows(2).all(|s| s[0].position <= s[1].position));
        prop_assert!(tr.steps.iter().all(|s| s.index < t.len() && t[s.index] == s.symbol));
        prop_assert!(tr.occurrences.windows(2).all(|p| p[0] <= p[1]));
        let s = Runner::new(&m).count(&t, cap);
        prop_assert_eq!((s.tac, s.matches, s.truncated), (tr.tac, tr.occurrences.len(), tr.truncated));
    }

    #[test]
    fn json_round_trips(w in pattern(), seed in any::<u64>()) {
        let m = random_machine(&mut rng(seed), &w, 6, 3);
        prop_assert_eq!(from_json(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn standardize_keeps_behaviour(w in pattern(), alg in algorithm(), t in text()) {
        let m = build_classic(alg, &w);
        let s = standardize(&m);
        prop_assert!(is_standard(&s));
        prop_assert_eq!(compact(&s), s.clone());
        let (a, b) = (run(&m, &t).unwrap(), run(&s, &t).unwrap());
        prop_assert!(b.tac <= a.tac);
        prop_assert!(is_prefix(&b.occurrences, &occurrences_oracle(&w, &t)));
    }

    #[test]
    fn expansion_keeps_accessed_positions(w in pattern(), seed in any::<u64>(), t in text()) {
        let m = random_machine(&mut rng(seed), &w, 4, 2);
        let e = expand(&m);
        prop_assert!(is_standard(&e.machine));
        let cap = default_cap(&e.machine, t.len());
        let (a, b) = (run_generic(&m, &t, cap).unwrap(), run_generic(&e.machine, &t, cap).unwrap());
        prop_assert_eq!(a.accessed(), b.accessed());
        prop_assert_eq!(a.occurrences, b.occurrences);
    }

    #[test]
    fn generated_machines_are_valid(w in pattern(), seed in any::<u64>(), t in text()) {
        let mut r = rng(seed);
        let k = w.len() + r.gen_range(0..2);
        if let Some(m) = random_standard(&mut r, &w, k, 2) {
            prop_assert!(!is_redundant(&m));
            prop_assert_eq!(check_validity_standard(&m).unwrap(), Validity::Valid);
            let tr = run(&m, &t).unwrap();
            let all = occurrences_oracle(&w, &t);
            let limit = tr.stopped_at.unwrap_or(usize::MAX);
            prop_assert!(tr.occurrences.iter().all(|p| all.contains(p)));
            prop_assert!(all.iter().filter(|&&p| p < limit).all(|p| tr.occurrences.contains(p)));
        }
    }

    #[test]
    fn theorem_agrees_with_long_texts(w in pattern(), seed in any::<u64>()) {
        let mut r = rng(seed);
        if let Some(m) = random_standard(&mut r, &w, w.len(), 1) {
            let bad = mutate(&mut r, &m);
            let e = expand(&bad);
            let s = compact(&e.machine);
            if let Ok(v) = check_validity_standard(&s) {
                // a counterexample on some text rules out validity
                let brute = validate_bruteforce(&s, 8, 300, 40, seed).unwrap();
                if !brute.is_ok() {
                    prop_assert!(!v.is_valid(), "{:?}", brute);
                }
            }
        }
    }

    #[test]
    fn compaction_never_slows_down(w in pattern(), alg in algorithm(), p in 0.05f64..0.95) {
        let model = IidModel::binary(p).unwrap();
        let m = build_classic(alg, &w);
        let a = asymptotic_speed_iid(&m, &model).unwrap();
        let b = asymptotic_speed_iid(&standardize(&m), &model).unwrap();
        prop_assert!(b >= a - 1e-9);
        prop_assert!(a > 0.0 && a <= m.order() as f64 + 1.0 + 1e-9);
    }

    #[test]
    fn canonical_speed_dominates(w in pattern(), alg in algorithm(), p in 0.05f64..0.95) {
        let model = IidModel::binary(p).unwrap();
        let m = build_classic(alg, &w);
        if let Ok(c) = canonicalize(&m, &model) {
            let (a, b) = (asymptotic_speed_iid(&m, &model).unwrap(), asymptotic_speed_iid(&c, &model).unwrap());
            prop_assert!(b >= a - 1e-9);
            prop_assert!(b >= 1.0 - 1e-9);
            prop_assert!(!is_redundant(&c));
        } else {
            prop_assert_eq!(alg, Algorithm::Quicksearch);
        }
    }

    #[test]
    fn iid_speed_is_the_hmm_speed(w in pattern(), alg in algorithm(), p in 0.05f64..0.95) {
        let model = IidModel::binary(p).unwrap();
        let m = build_classic(alg, &w);
        let a = asymptotic_speed_iid(&m, &model).unwrap();
        let b = asymptotic_speed_hmm(&m, &model.to_hmm()).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }
}

use rand::Rng;
