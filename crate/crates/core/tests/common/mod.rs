#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmatch::alphabet::{all_patterns, Symbol};
use wmatch::classic::{kmp_table, mp_table};
use wmatch::expansion::max_valid_shift;
use wmatch::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn binary_patterns(max_len: usize) -> Vec<Pattern> {
    (1..=max_len).flat_map(|l| all_patterns(&Alphabet::binary(), l)).collect()
}

pub fn random_text<R: Rng>(rng: &mut R, a: usize, len: usize) -> Vec<Symbol> {
    (0..len).map(|_| rng.gen_range(0..a) as Symbol).collect()
}

/// Textbook algorithms, coded against the text directly. Each returns the
/// accessed indices and reported positions. Windows start at most at
/// `n - m`, and a read past the end of the text stops the search.
pub struct Direct {
    pub accessed: Vec<usize>,
    pub reported: Vec<usize>,
}

pub fn naive_direct(w: &[Symbol], t: &[Symbol]) -> Direct {
    let (m, n) = (w.len(), t.len());
    let mut d = Direct { accessed: vec![], reported: vec![] };
    if n < m {
        return d;
    }
    for p in 0..=n - m {
        let mut i = 0;
        loop {
            d.accessed.push(p + i);
            if t[p + i] != w[i] {
                break;
            }
            if i == m - 1 {
                d.reported.push(p);
                break;
            }
            i += 1;
        }
    }
    d
}

fn failure_direct(w: &[Symbol], t: &[Symbol], table: &[isize]) -> Direct {
    let (m, n) = (w.len() as isize, t.len() as isize);
    let mut d = Direct { accessed: vec![], reported: vec![] };
    let (mut i, mut j) = (0isize, 0isize);
    while j - i <= n - m && j < n {
        d.accessed.push(j as usize);
        if t[j as usize] == w[i as usize] {
            i += 1;
            j += 1;
            if i == m {
                d.reported.push((j - m) as usize);
                i = table[m as usize];
            }
        } else {
            i = table[i as usize];
            if i == -1 {
                i = 0;
                j += 1;
            }
        }
    }
    d
}

pub fn mp_direct(w: &[Symbol], t: &[Symbol]) -> Direct {
    failure_direct(w, t, &mp_table(w))
}

pub fn kmp_direct(w: &[Symbol], t: &[Symbol]) -> Direct {
    failure_direct(w, t, &kmp_table(w))
}

pub fn horspool_direct(w: &[Symbol], t: &[Symbol], a: usize) -> Direct {
    let (m, n) = (w.len(), t.len());
    let mut shift = vec![m; a];
    for i in 0..m - 1 {
        shift[w[i] as usize] = m - 1 - i;
    }
    let mut d = Direct { accessed: vec![], reported: vec![] };
    let mut p = 0;
    while p + m <= n {
        let c = t[p + m - 1];
        d.accessed.push(p + m - 1);
        if c == w[m - 1] {
            let mut ok = true;
            for j in (0..m - 1).rev() {
                d.accessed.push(p + j);
                if t[p + j] != w[j] {
                    ok = false;
                    break;
                }
            }
            if ok {
                d.reported.push(p);
            }
        }
        p += shift[c as usize];
    }
    d
}

pub fn quicksearch_direct(w: &[Symbol], t: &[Symbol], a: usize) -> Direct {
    let (m, n) = (w.len(), t.len());
    let mut shift = vec![m + 1; a];
    for i in 0..m {
        shift[w[i] as usize] = m - i;
    }
    let mut d = Direct { accessed: vec![], reported: vec![] };
    let mut p = 0;
    while p + m <= n {
        let mut ok = true;
        for j in 0..m {
            d.accessed.push(p + j);
            if t[p + j] != w[j] {
                ok = false;
                break;
            }
        }
        if ok {
            d.reported.push(p);
        }
        if p + m >= n {
            break;
        }
        d.accessed.push(p + m);
        p += shift[t[p + m] as usize];
    }
    d
}

pub fn direct(alg: Algorithm, w: &[Symbol], t: &[Symbol], a: usize) -> Direct {
    match alg {
        Algorithm::Naive => naive_direct(w, t),
        Algorithm::MorrisPratt => mp_direct(w, t),
        Algorithm::KnuthMorrisPratt => kmp_direct(w, t),
        Algorithm::Horspool => horspool_direct(w, t, a),
        Algorithm::Quicksearch => quicksearch_direct(w, t, a),
    }
}

fn knows_pattern(h: &MemoryState, w: &Pattern) -> bool {
    (0..w.len()).all(|i| h.contains(i, w.at(i)))
}

fn is_prematch(h: &MemoryState, next: usize, w: &Pattern) -> bool {
    next < w.len() && (0..w.len()).filter(|&i| i != next).all(|i| h.contains(i, w.at(i)))
}

/// A random standard, non-redundant, valid machine of order at most `k`.
/// States are pairs (memory, copy) with `copies` copies per memory, so
/// several states may share a memory. Returns `None` when the random choices
/// lead to a dead end.
pub fn random_standard<R: Rng>(rng: &mut R, w: &Pattern, k: usize, copies: usize) -> Option<Machine> {
    let mut ids: HashMap<(MemoryState, usize), usize> = HashMap::new();
    let mut nodes = vec![(MemoryState::empty(), 0usize)];
    ids.insert(nodes[0].clone(), 0);
    let mut states = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        if nodes.len() > 200 {
            return None;
        }
        let (h, _) = nodes[i].clone();
        if knows_pattern(&h, w) {
            return None;
        }
        let reads: Vec<usize> = (0..=k).filter(|&j| h.get(j).is_none()).collect();
        let j = reads[rng.gen_range(0..reads.len())];
        let prematch = is_prematch(&h, j, w);
        let mut out = Vec::new();
        for x in w.alphabet().symbols() {
            let s = max_valid_shift(&h, j, x, prematch, w).ok()?;
            let node = (h.with(j, x).kshift(s), rng.gen_range(0..copies));
            let id = *ids.entry(node.clone()).or_insert_with(|| {
                nodes.push(node);
                nodes.len() - 1
            });
            out.push((Some(id), s));
        }
        states.push(DraftState { next: j, prematch, out });
        i += 1;
    }
    if !states.iter().any(|s| s.prematch) {
        return None;
    }
    Draft { pattern: w.clone(), states, initial: 0 }.finish().ok()
}

/// States with the same memory, in id order.
pub fn duplicate_pairs(m: &Machine) -> Vec<(StateId, StateId)> {
    let mem = wmatch::expansion::memory_of_standard(m).unwrap();
    let mut out = Vec::new();
    for a in m.states() {
        for b in a + 1..m.sink() {
            if mem[a] == mem[b] {
                out.push((a, b));
            }
        }
    }
    out
}

/// A small random change to one state or transition.
pub fn mutate<R: Rng>(rng: &mut R, m: &Machine) -> Machine {
    let q = rng.gen_range(0..m.len());
    let x = rng.gen_range(0..m.alphabet().len()) as Symbol;
    let mut d = m.to_draft();
    match rng.gen_range(0..5) {
        0 => d.states[q].out[x as usize].1 += 1,
        1 => {
            let s = &mut d.states[q].out[x as usize].1;
            *s = s.saturating_sub(1);
        }
        2 => d.states[q].out[x as usize].0 = Some(rng.gen_range(0..m.len())),
        3 => {
            let p = !d.states[q].prematch;
            if !p || d.states[q].next < m.pattern().len() {
                d.states[q].prematch = p;
            }
        }
        _ => d.states[q].out[x as usize] = (Some(q), 0),
    }
    d.finish_unpruned().unwrap()
}

/// Machine with arbitrary structure: random reads, shifts and targets.
pub fn random_machine<R: Rng>(rng: &mut R, w: &Pattern, states: usize, max_shift: usize) -> Machine {
    let a = w.alphabet().len();
    let order = w.len() + 1;
    let d = Draft {
        pattern: w.clone(),
        initial: 0,
        states: (0..states)
            .map(|_| {
                let next = rng.gen_range(0..=order);
                let prematch = next < w.len() && rng.gen_bool(0.4);
                let out = (0..a)
                    .map(|_| {
                        let t = if rng.gen_bool(0.05) { None } else { Some(rng.gen_range(0..states)) };
                        (t, rng.gen_range(0..=max_shift))
                    })
                    .collect();
                DraftState { next, prematch, out }
            })
            .collect(),
    };
    d.finish().unwrap()
}

/// `short` is a prefix of `long`.
pub fn is_prefix(short: &[usize], long: &[usize]) -> bool {
    short.len() <= long.len() && long[..short.len()] == *short
}
