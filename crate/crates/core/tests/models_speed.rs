mod common;

use common::*;
use num_rational::BigRational;
use wmatch::alphabet::{all_texts_up_to, Symbol};
use wmatch::chain::{ratio, StateChain};
use wmatch::models::{determinize_emission, HmmDoc, MarkovDoc};
use wmatch::speed::{asymptotic_speed_iid_exact, empirical_speed_text, state_chain_hmm, state_chain_iid, summarize, HMM_NODE_CAP};
use wmatch::*;

fn pat(s: &str) -> Pattern {
    Pattern::binary(s).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

fn sticky_markov() -> MarkovModel {
    // P(same symbol as before) = 0.8
    MarkovModel::new(Alphabet::binary(), 1, vec![0.5, 0.5], vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap()
}

fn order2_markov() -> MarkovModel {
    let trans = vec![vec![0.9, 0.1], vec![0.3, 0.7], vec![0.5, 0.5], vec![0.2, 0.8]];
    MarkovModel::new(Alphabet::binary(), 2, vec![0.1, 0.2, 0.3, 0.4], trans).unwrap()
}

fn noisy_hmm() -> Hmm {
    Hmm::new(
        Alphabet::binary(),
        vec![0.6, 0.4],
        vec![vec![0.7, 0.3], vec![0.4, 0.6]],
        vec![vec![0.9, 0.1], vec![0.25, 0.75]],
    )
    .unwrap()
}

fn alternating_hmm() -> Hmm {
    Hmm::new(
        Alphabet::binary(),
        vec![1.0, 0.0],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    )
    .unwrap()
}

#[test]
fn chain_of_two_state_machine() {
    let m = standardize(&build_naive(&pat("aa")));
    let c = state_chain_iid(&m, &IidModel::uniform(Alphabet::binary())).unwrap();
    assert_eq!(c.len(), 2);
    for i in 0..2 {
        assert!(close(c.row_sum(i), 1.0));
        assert!(c.rows[i].iter().all(|e| close(e.1, 0.5)));
    }
    let mut s = c.expected_shift.clone();
    s.sort_by(f64::total_cmp);
    assert!(close(s[0], 0.5) && close(s[1], 1.5), "{s:?}");
}

#[test]
fn naive_aa_exact_speed() {
    let half = ratio(1, 2);
    let v = asymptotic_speed_iid_exact(&build_naive(&pat("aa")), &[half.clone(), half]).unwrap();
    assert_eq!(v, ratio(2, 3));
    let f = asymptotic_speed_iid(&build_naive(&pat("aa")), &IidModel::uniform(Alphabet::binary())).unwrap();
    assert!(close(f, 2.0 / 3.0));
}

#[test]
fn exact_and_float_speeds_agree() {
    let probs = [ratio(1, 4), ratio(3, 4)];
    let model = IidModel::binary(0.25).unwrap();
    for w in binary_patterns(3) {
        for alg in Algorithm::ALL {
            let m = build_classic(alg, &w);
            let e: BigRational = asymptotic_speed_iid_exact(&m, &probs).unwrap();
            let f = asymptotic_speed_iid(&m, &model).unwrap();
            let e = num_traits::ToPrimitive::to_f64(&e).unwrap();
            assert!((e - f).abs() < 1e-9, "{alg} {w}: {e} {f}");
        }
    }
}

#[test]
fn canonical_forms_of_failure_machines_read_once() {
    for p in [0.1, 0.25, 0.5, 0.9] {
        let model = IidModel::binary(p).unwrap();
        for w in binary_patterns(3) {
            for alg in [Algorithm::Naive, Algorithm::MorrisPratt, Algorithm::KnuthMorrisPratt] {
                let c = canonicalize(&build_classic(alg, &w), &model).unwrap();
                assert!(close(asymptotic_speed_iid(&c, &model).unwrap(), 1.0), "{alg} {w} {p}");
                let v = asymptotic_speed(&c, &TextModel::Markov(sticky_markov())).unwrap();
                assert!(close(v, 1.0), "{alg} {w} markov {v}");
            }
        }
    }
}

#[test]
fn iid_model_as_hmm_gives_the_same_speed() {
    let model = IidModel::binary(0.3).unwrap();
    let hmm = model.to_hmm();
    for w in binary_patterns(3) {
        for alg in Algorithm::ALL {
            let m = build_classic(alg, &w);
            let a = asymptotic_speed_iid(&m, &model).unwrap();
            let b = asymptotic_speed_hmm(&m, &hmm).unwrap();
            assert!((a - b).abs() < 1e-9, "{alg} {w}: {a} {b}");
        }
    }
}

#[test]
fn period_two_text_is_read_once() {
    let m = standardize(&build_naive(&pat("ab")));
    assert!(close(asymptotic_speed_hmm(&m, &alternating_hmm()).unwrap(), 1.0));
    let t: Vec<Symbol> = (0..1000).map(|i| (i % 2) as Symbol).collect();
    assert!(close(empirical_speed_text(&m, &t).unwrap(), 1.0));
}

#[test]
fn hmm_speed_matches_simulation() {
    let model = TextModel::Hmm(noisy_hmm());
    for (alg, w) in [(Algorithm::Horspool, "abab"), (Algorithm::Naive, "aab"), (Algorithm::Quicksearch, "ba")] {
        let m = build_classic(alg, &pat(w));
        let a = asymptotic_speed(&m, &model).unwrap();
        let e = empirical_speed(&m, &model, 200_000, 10, 4).unwrap();
        assert!((a - e.mean).abs() < 0.01 * a, "{alg} {w}: {a} {e:?}");
    }
}

#[test]
fn markov_speed_matches_simulation() {
    for model in [TextModel::Markov(sticky_markov()), TextModel::Markov(order2_markov())] {
        for (alg, w) in [(Algorithm::Horspool, "aaab"), (Algorithm::KnuthMorrisPratt, "abb")] {
            let m = build_classic(alg, &pat(w));
            let a = asymptotic_speed(&m, &model).unwrap();
            let e = empirical_speed(&m, &model, 200_000, 10, 9).unwrap();
            assert!((a - e.mean).abs() < 0.01 * a, "{alg} {w}: {a} {e:?}");
        }
    }
}

#[test]
fn iid_speed_matches_simulation() {
    let model = IidModel::binary(0.25).unwrap();
    let m = build_classic(Algorithm::Horspool, &pat("aaaa"));
    let a = asymptotic_speed_iid(&m, &model).unwrap();
    let e = empirical_speed(&m, &TextModel::Iid(model), 100_000, 20, 1).unwrap();
    assert!((a - e.mean).abs() < 5.0 * e.std_error + 1e-3, "{a} {e:?}");
}

#[test]
fn determinize_keeps_text_probabilities() {
    let h = noisy_hmm();
    let d = determinize_emission(&h);
    assert!(d.is_deterministic());
    assert_eq!(d.hidden_states(), 4);
    for t in all_texts_up_to(2, 6) {
        assert!((h.probability(&t) - d.probability(&t)).abs() < 1e-12);
    }
    let a = alternating_hmm();
    assert_eq!(determinize_emission(&a), a);
}

#[test]
fn markov_as_hmm_keeps_text_probabilities() {
    for mk in [sticky_markov(), order2_markov()] {
        let h = mk.to_hmm();
        assert!(h.is_deterministic());
        for t in all_texts_up_to(2, 7) {
            assert!((mk.probability(&t) - h.probability(&t)).abs() < 1e-12, "{t:?}");
        }
    }
}

#[test]
fn text_probabilities_sum_to_one() {
    let models = [
        TextModel::Iid(IidModel::binary(0.3).unwrap()),
        TextModel::Markov(order2_markov()),
        TextModel::Hmm(noisy_hmm()),
    ];
    for model in &models {
        for n in 1..=6 {
            let s: f64 = all_texts_up_to(2, n)
                .iter()
                .filter(|t| t.len() == n)
                .map(|t| model.probability(t).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn sampled_frequencies_follow_the_model() {
    let model = TextModel::Markov(sticky_markov());
    let t = model.sample(200_000, &mut rng(3));
    let same = t.windows(2).filter(|w| w[0] == w[1]).count() as f64 / (t.len() - 1) as f64;
    assert!((same - 0.8).abs() < 0.01, "{same}");
    assert_eq!(model.sample(50, &mut rng(3)), model.sample(50, &mut rng(3)));
}

#[test]
fn fit_iid_counts() {
    let a = Alphabet::binary();
    let m = fit_iid(&a, &a.encode("aab").unwrap()).unwrap();
    assert!(close(m.prob(0), 2.0 / 3.0) && close(m.prob(1), 1.0 / 3.0));
    assert!(fit_iid(&a, &[]).is_err());
}

#[test]
fn iid_spec_parsing() {
    let a = Alphabet::parse("acgt").unwrap();
    let m = IidModel::parse(a.clone(), "a=0.4,c=0.2").unwrap();
    assert!(m.probs().iter().zip([0.4, 0.2, 0.2, 0.2]).all(|(a, b)| close(*a, b)));
    assert!(IidModel::parse(a.clone(), "a=0.7,c=0.7").is_err());
    assert!(IidModel::parse(a.clone(), "x=0.5").is_err());
    assert!(IidModel::parse(a.clone(), "a=0.5,a=0.1").is_err());
    assert!(IidModel::binary(1.2).is_err());
    let back = IidModel::parse(a, m.spec().trim_start_matches("iid:")).unwrap();
    assert_eq!(back, m);
}

#[test]
fn model_documents() {
    let doc: MarkovDoc = serde_json::from_str(
        r#"{"alphabet":"ab","order":1,"initial":{"a":0.5,"b":0.5},
            "transitions":{"a":{"a":0.8,"b":0.2},"b":{"a":0.2,"b":0.8}}}"#,
    )
    .unwrap();
    assert_eq!(doc.to_model().unwrap(), sticky_markov());
    let bad: MarkovDoc = serde_json::from_str(
        r#"{"alphabet":"ab","order":1,"initial":{"a":1.0},"transitions":{"a":{"a":1.0}}}"#,
    )
    .unwrap();
    assert!(bad.to_model().is_err());
    let doc: HmmDoc = serde_json::from_str(
        r#"{"alphabet":"ab","initial":[1,0],"transitions":[[0,1],[1,0]],"emissions":[{"a":1},{"b":1}]}"#,
    )
    .unwrap();
    assert_eq!(doc.to_model().unwrap(), alternating_hmm());
}

#[test]
fn absorption_into_two_classes() {
    // 0 -> 1 (0.3) or 2 (0.7); 1 and 2 loop with shifts 1 and 2
    let mut c = StateChain::new(
        vec![1.0, 0.0, 0.0],
        vec![vec![(1, 0.3), (2, 0.7)], vec![(1, 1.0)], vec![(2, 1.0)]],
        vec![5.0, 1.0, 2.0],
    );
    c.decompose().unwrap();
    assert_eq!(c.classes, vec![vec![1], vec![2]]);
    assert_eq!(c.transient, vec![0]);
    assert!(close(c.absorption[0], 0.3) && close(c.absorption[1], 0.7));
    assert!(close(c.speed().unwrap(), 1.7));
}

#[test]
fn absorption_through_transient_cycle() {
    // 0 <-> 1 transient, leaking into the closed cycle {2, 3}
    let mut c = StateChain::new(
        vec![1.0, 0.0, 0.0, 0.0],
        vec![vec![(1, 0.5), (2, 0.5)], vec![(0, 0.9), (3, 0.1)], vec![(3, 1.0)], vec![(2, 0.5), (3, 0.5)]],
        vec![0.0, 0.0, 3.0, 0.0],
    );
    c.decompose().unwrap();
    assert_eq!(c.classes, vec![vec![2, 3]]);
    assert!(close(c.absorption[0], 1.0));
    let alpha = c.stationary(&[2, 3]).unwrap();
    assert!(close(alpha[0], 1.0 / 3.0) && close(alpha[1], 2.0 / 3.0));
    assert!(close(c.speed().unwrap(), 1.0));
}

#[test]
fn hmm_chain_is_stochastic() {
    let det = determinize_emission(&noisy_hmm());
    for w in binary_patterns(3) {
        for alg in Algorithm::ALL {
            let c = state_chain_hmm(&build_classic(alg, &w), &det, HMM_NODE_CAP).unwrap();
            assert!((c.initial.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..c.len() {
                assert!((c.row_sum(i) - 1.0).abs() < 1e-12);
            }
        }
    }
    assert!(matches!(
        state_chain_hmm(&build_naive(&pat("aa")), &det, 3),
        Err(Error::Cap(_))
    ));
    assert!(matches!(
        state_chain_hmm(&build_naive(&pat("aa")), &noisy_hmm(), HMM_NODE_CAP),
        Err(Error::Domain(_))
    ));
}

#[test]
fn speed_bounds_for_valid_machines() {
    let model = IidModel::binary(0.4).unwrap();
    for w in binary_patterns(4) {
        for alg in Algorithm::ALL {
            let m = build_classic(alg, &w);
            let v = asymptotic_speed_iid(&m, &model).unwrap();
            assert!(v > 0.0 && v <= w.len() as f64 + 1.0 + 1e-9, "{alg} {w}: {v}");
        }
    }
}

#[test]
fn empirical_is_reproducible() {
    let m = build_classic(Algorithm::Horspool, &pat("abb"));
    let model = TextModel::Iid(IidModel::binary(0.3).unwrap());
    let a = empirical_speed(&m, &model, 5000, 5, 42).unwrap();
    assert_eq!(a, empirical_speed(&m, &model, 5000, 5, 42).unwrap());
    assert_ne!(a, empirical_speed(&m, &model, 5000, 5, 43).unwrap());
    assert!(empirical_speed(&m, &model, 2, 5, 42).is_err());
    assert!(empirical_speed(&m, &model, 100, 0, 42).is_err());
}

#[test]
fn summary_statistics() {
    let s = summarize(&[1.0, 2.0, 3.0]);
    assert!(close(s.mean, 2.0));
    assert!(close(s.std_error, (1.0f64 / 3.0).sqrt()));
    assert_eq!(summarize(&[4.0]).std_error, 0.0);
}

#[test]
fn alphabet_mismatch_is_an_input_error() {
    let m = build_naive(&pat("aa"));
    let model = IidModel::uniform(Alphabet::parse("acgt").unwrap());
    assert!(matches!(asymptotic_speed_iid(&m, &model), Err(Error::Input(_))));
}
