mod common;

use common::*;
use rand::Rng;
use wmatch::alphabet::{all_texts_up_to, Symbol};
use wmatch::expansion::{max_valid_shift, memory_of_standard};
use wmatch::*;

fn pat(s: &str) -> Pattern {
    Pattern::binary(s).unwrap()
}

fn mem(entries: &[(usize, Symbol)]) -> MemoryState {
    MemoryState::new(entries.to_vec()).unwrap()
}

const A: Symbol = 0;
const B: Symbol = 1;

/// The two-state machine obtained from naive("aa") by expansion and
/// compaction: A reads 0, B reads 1 and reports.
fn two_state_aa() -> Machine {
    Draft {
        pattern: pat("aa"),
        initial: 0,
        states: vec![
            DraftState { next: 0, prematch: false, out: vec![(Some(1), 0), (Some(0), 1)] },
            DraftState { next: 1, prematch: true, out: vec![(Some(1), 1), (Some(0), 2)] },
        ],
    }
    .finish()
    .unwrap()
}

#[test]
fn expand_naive_aa() {
    let n = build_naive(&pat("aa"));
    let e = expand(&n);
    assert_eq!(e.machine.len(), 4);
    let nodes: Vec<(StateId, MemoryState)> =
        e.machine.states().map(|q| (e.origin_of[q], e.memory_of[q].clone())).collect();
    for node in [(0, mem(&[])), (1, mem(&[(0, A)])), (0, mem(&[(0, A)])), (0, mem(&[(0, B)]))] {
        assert!(nodes.contains(&node), "{node:?} missing from {nodes:?}");
    }
    // (q1, {(0,a)}) reading b goes to (q0, {(0,b)}) with shift 1
    let q = nodes.iter().position(|n| *n == (1, mem(&[(0, A)]))).unwrap();
    let t = e.machine.transition(q, B);
    assert_eq!(nodes[t.target], (0, mem(&[(0, B)])));
    assert_eq!(t.shift, 1);
}

#[test]
fn expansion_of_standard_machine_keeps_its_size() {
    let m = two_state_aa();
    assert!(is_standard(&m));
    let e = expand(&m);
    assert_eq!(e.machine.len(), m.len());
    let mut mems: Vec<_> = e.memory_of[..e.machine.len()].to_vec();
    mems.sort();
    mems.dedup();
    assert_eq!(mems.len(), m.len());
}

#[test]
fn standardness() {
    assert!(!is_standard(&build_naive(&pat("aa"))));
    assert!(is_standard(&compact(&expand(&build_naive(&pat("aa"))).machine)));
    let mut r = rng(3);
    for w in binary_patterns(3) {
        for alg in Algorithm::ALL {
            assert!(is_standard(&expand(&build_classic(alg, &w)).machine));
        }
        let m = random_machine(&mut r, &w, 4, 2);
        assert!(is_standard(&expand(&m).machine));
    }
}

#[test]
fn memory_of_non_standard_is_domain_error() {
    assert!(matches!(memory_of_standard(&build_naive(&pat("aa"))), Err(Error::Domain(_))));
}

#[test]
fn redundancy() {
    assert!(is_redundant(&build_naive(&pat("aa"))));
    // MP re-reads the mismatching position after following a border
    assert!(is_redundant(&build_classic(Algorithm::MorrisPratt, &pat("aa"))));
    assert!(!is_redundant(&build_classic(Algorithm::KnuthMorrisPratt, &pat("aa"))));
    assert!(!is_redundant(&two_state_aa()));
}

#[test]
fn standard_compact_machines_are_not_redundant() {
    for w in binary_patterns(4) {
        for alg in [Algorithm::Naive, Algorithm::MorrisPratt, Algorithm::KnuthMorrisPratt, Algorithm::Horspool] {
            let s = standardize(&build_classic(alg, &w));
            assert!(is_standard(&s) && is_compact(&s));
            assert!(!is_redundant(&s), "{alg} {w}");
        }
    }
}

#[test]
fn validity_of_two_state_machine() {
    let m = compact(&expand(&build_naive(&pat("aa"))).machine);
    assert_eq!(check_validity_standard(&m).unwrap(), Validity::Valid);
    assert!(validate_bruteforce(&m, 8, 0, 0, 0).unwrap().is_ok());
}

#[test]
fn shift_beyond_bound_is_condition_two() {
    // A on 'b' may shift by 1 only: the next window may start with "a"
    let bad = two_state_aa().with_shift(0, B, 2);
    assert!(is_standard(&bad));
    match check_validity_standard(&bad) {
        Ok(Validity::Violation(v)) => assert_eq!(v.condition(), 2),
        other => panic!("{other:?}"),
    }
    match validate_bruteforce(&bad, 8, 0, 0, 0).unwrap() {
        BruteVerdict::Counterexample(c) => assert!(c.expected.iter().any(|p| !c.got.contains(p))),
        v => panic!("{v:?}"),
    }
}

#[test]
fn zero_shift_self_loop() {
    // a zero-shift self-loop re-reads its position, so the exact check
    // refuses it; the cycle search and the bounded check both see it
    let mut d = two_state_aa().to_draft();
    d.states[0].out[B as usize] = (Some(0), 0);
    let m = d.finish().unwrap();
    assert_eq!(wmatch::expansion::zero_shift_cycle(&m), Some(vec![0]));
    assert!(matches!(check_validity_standard(&m), Err(Error::Domain(_))));
    match validate_bruteforce(&m, 4, 0, 0, 0).unwrap() {
        BruteVerdict::Counterexample(c) => assert!(c.truncated),
        v => panic!("{v:?}"),
    }
}

#[test]
fn sink_transition_is_condition_three() {
    let mut d = two_state_aa().to_draft();
    d.states[1].out[B as usize] = (None, 2);
    let m = d.finish().unwrap();
    match check_validity_standard(&m) {
        Ok(Validity::Violation(v)) => assert_eq!(v.condition(), 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn redundant_input_is_domain_error() {
    assert!(matches!(check_validity_standard(&build_naive(&pat("aa"))), Err(Error::Domain(_))));
}

#[test]
fn max_valid_shift_examples() {
    assert_eq!(max_valid_shift(&mem(&[]), 0, B, false, &pat("ab")).unwrap(), 1);
    assert_eq!(max_valid_shift(&mem(&[]), 0, A, false, &pat("ab")).unwrap(), 0);
    assert_eq!(max_valid_shift(&mem(&[(0, A)]), 1, A, true, &pat("aa")).unwrap(), 1);
    assert!(matches!(max_valid_shift(&mem(&[(0, A)]), 0, B, false, &pat("aa")), Err(Error::Domain(_))));
}

#[test]
fn redirect_examples() {
    let n = build_naive(&pat("aab"));
    let r = redirect(&n, 0, 2).unwrap();
    assert!(r.len() < n.len());
    // b = initial: the new initial is a
    let r = redirect(&n, 1, 0).unwrap();
    assert_eq!(r.next(r.initial()), 1);
    assert!(redirect(&n, 1, 1).is_err());
    assert!(redirect(&n, 0, n.sink()).is_err());
}

#[test]
fn redirect_between_duplicates_keeps_standard_and_valid() {
    let mut r = rng(17);
    let mut tested = 0;
    for w in binary_patterns(3) {
        for _ in 0..40 {
            let Some(m) = random_standard(&mut r, &w, w.len(), 2) else { continue };
            for (a, b) in duplicate_pairs(&m).into_iter().take(2) {
                for (x, y) in [(a, b), (b, a)] {
                    let red = redirect(&m, x, y).unwrap();
                    assert!(is_standard(&red));
                    assert_eq!(check_validity_standard(&red).unwrap(), Validity::Valid);
                    tested += 1;
                }
            }
        }
    }
    assert!(tested > 50, "{tested}");
}

#[test]
fn compact_naive_aa() {
    let c = compact(&expand(&build_naive(&pat("aa"))).machine);
    assert_eq!(c, two_state_aa());
    assert_eq!(standardize(&build_naive(&pat("aa"))), two_state_aa());
}

#[test]
fn compact_is_a_fixpoint_and_standardize_idempotent() {
    for w in binary_patterns(4) {
        for alg in Algorithm::ALL {
            let s = standardize(&build_classic(alg, &w));
            assert_eq!(compact(&s), s);
            assert_eq!(standardize(&s), s, "{alg} {w}");
        }
    }
}

#[test]
fn standardized_horspool_is_valid() {
    let s = standardize(&build_classic(Algorithm::Horspool, &pat("ab")));
    assert_eq!(check_validity_standard(&s).unwrap(), Validity::Valid);
}

#[test]
fn compact_never_costs_accesses() {
    let mut r = rng(23);
    for w in binary_patterns(4) {
        for alg in Algorithm::ALL {
            let e = expand(&build_classic(alg, &w)).machine;
            let c = compact(&e);
            for _ in 0..200 {
                let t = random_text(&mut r, 2, 40);
                let (te, tc) = (run(&e, &t).unwrap(), run(&c, &t).unwrap());
                assert!(tc.tac <= te.tac);
                let limit = te.stopped_at.unwrap_or(usize::MAX).min(tc.stopped_at.unwrap_or(usize::MAX));
                let cut = |v: &[usize]| v.iter().copied().filter(|&p| p < limit).collect::<Vec<_>>();
                assert_eq!(cut(&tc.occurrences), cut(&te.occurrences), "{alg} {w}");
            }
        }
    }
}

#[test]
fn expansion_has_identical_access_sequences() {
    let mut r = rng(29);
    let texts = all_texts_up_to(2, 8);
    for w in binary_patterns(3) {
        for i in 0..6 {
            let m = if i < 5 { build_classic(Algorithm::ALL[i], &w) } else { random_machine(&mut r, &w, 5, 2) };
            let e = expand(&m).machine;
            for t in &texts {
                let cap = wmatch::run::default_cap(&e, t.len());
                let (a, b) = (run_generic(&m, t, cap).unwrap(), run_generic(&e, t, cap).unwrap());
                assert_eq!(a.accessed(), b.accessed());
                assert_eq!(a.occurrences, b.occurrences);
            }
        }
    }
}

#[test]
fn memory_matches_accessed_positions() {
    // at every step, the known positions shifted by the window start are
    // exactly the accessed indices at or after it
    let mut r = rng(31);
    for w in binary_patterns(3) {
        for alg in Algorithm::ALL {
            let e = expand(&build_classic(alg, &w));
            for _ in 0..100 {
                let t = random_text(&mut r, 2, 30);
                let tr = run(&e.machine, &t).unwrap();
                let mut seen: Vec<usize> = Vec::new();
                for s in &tr.steps {
                    let mut known: Vec<usize> = e.memory_of[s.state].positions().map(|i| i + s.position).collect();
                    known.sort();
                    let mut after: Vec<usize> = seen.iter().copied().filter(|&i| i >= s.position).collect();
                    after.sort();
                    after.dedup();
                    assert_eq!(known, after);
                    seen.push(s.index);
                }
            }
        }
    }
}

#[test]
fn same_target_means_same_shift_in_standard_valid_machines() {
    let mut r = rng(37);
    let mut machines: Vec<Machine> = binary_patterns(4)
        .iter()
        .flat_map(|w| [Algorithm::KnuthMorrisPratt, Algorithm::Horspool].map(|a| standardize(&build_classic(a, w))))
        .collect();
    for w in binary_patterns(3) {
        machines.extend((0..20).filter_map(|_| random_standard(&mut r, &w, w.len() + 1, 2)));
    }
    for m in &machines {
        for q in m.states() {
            for x in m.alphabet().symbols() {
                for y in m.alphabet().symbols() {
                    let (tx, ty) = (m.transition(q, x), m.transition(q, y));
                    if tx.target == ty.target && !m.is_sink(tx.target) {
                        assert_eq!(tx.shift, ty.shift);
                    }
                }
            }
        }
    }
}

#[test]
fn theorem_check_agrees_with_bruteforce() {
    let mut r = rng(41);
    let texts_len = 8;
    let (mut valid, mut invalid) = (0, 0);
    for w in binary_patterns(3) {
        for _ in 0..30 {
            let k = w.len() + r.gen_range(0..2);
            let Some(m) = random_standard(&mut r, &w, k, 1) else { continue };
            let m = if r.gen_bool(0.6) { mutate(&mut r, &m) } else { m };
            let e = expand(&m).machine;
            let Ok(v) = check_validity_standard(&e) else { continue };
            let b = validate_bruteforce(&m, texts_len, 300, 40, 7).unwrap();
            assert_eq!(v.is_valid(), b.is_ok(), "{w}: {v:?} vs {b:?}");
            if v.is_valid() {
                valid += 1;
            } else {
                invalid += 1;
            }
        }
    }
    assert!(valid > 20 && invalid > 20, "{valid} {invalid}");
}
