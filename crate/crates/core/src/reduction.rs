//! Minimal shifts to a match, relevance, the posit transform and the
//! canonical form of a machine under an iid model.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::compact::{compact, redirect, standardize};
use crate::error::{Error, Result};
use crate::expansion::{expand, expanded_is_redundant, memory_of_standard, MemoryState};
use crate::machine::{Machine, StateId};
use crate::models::IidModel;
use crate::speed::asymptotic_speed_iid;

/// Minimal total shift from each state to a prematch state; `None` is
/// infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftProfile {
    pub mnshft: Vec<Option<usize>>,
}

impl ShiftProfile {
    pub fn get(&self, q: StateId) -> Option<usize> {
        self.mnshft[q]
    }
}

/// Shortest paths to the prematch states over reversed transitions.
pub fn compute_mnshft(m: &Machine) -> ShiftProfile {
    let n = m.state_count();
    let mut preds: Vec<Vec<(StateId, usize)>> = vec![Vec::new(); n];
    for q in 0..n {
        for x in m.alphabet().symbols() {
            let t = m.transition(q, x);
            preds[t.target].push((q, t.shift));
        }
    }
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for q in m.prematch_states() {
        dist[q] = Some(0);
        heap.push(Reverse((0usize, q)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v] != Some(d) {
            continue;
        }
        for &(u, w) in &preds[v] {
            if m.is_prematch(u) {
                continue;
            }
            let nd = d + w;
            if dist[u].map_or(true, |old| nd < old) {
                dist[u] = Some(nd);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    ShiftProfile { mnshft: dist }
}

pub fn relevant_states(m: &Machine) -> Vec<StateId> {
    let p = compute_mnshft(m);
    m.states().filter(|&q| p.get(q) == Some(0)).collect()
}

/// Memories each state takes in the full memory expansion.
pub fn memory_sets(m: &Machine) -> Vec<Vec<MemoryState>> {
    let e = expand(m);
    let mut sets = vec![Vec::new(); m.state_count()];
    for q in e.machine.states() {
        sets[e.origin_of[q]].push(e.memory_of[q].clone());
    }
    sets
}

/// `h2` has the positions of `h` and agrees with it from position `from` on.
fn covers(h: &MemoryState, h2: &MemoryState, from: Option<usize>) -> bool {
    h.same_positions(h2)
        && h.entries()
            .iter()
            .filter(|e| from.is_some_and(|f| e.0 >= f))
            .all(|&(i, x)| h2.contains(i, x))
}

fn consistent_in(sets: &[Vec<MemoryState>], p: &ShiftProfile, q: StateId) -> bool {
    let s = &sets[q];
    s.iter().all(|h| s.iter().all(|h2| covers(h, h2, p.get(q))))
}

pub fn is_consistent(m: &Machine, q: StateId) -> bool {
    consistent_in(&memory_sets(m), &compute_mnshft(m), q)
}

fn interchangeable_in(sets: &[Vec<MemoryState>], p: &ShiftProfile, a: StateId, b: StateId) -> bool {
    consistent_in(sets, p, a)
        && consistent_in(sets, p, b)
        && sets[a].iter().all(|h| {
            sets[b].iter().all(|h2| covers(h, h2, p.get(a)) && covers(h2, h, p.get(b)))
        })
}

pub fn are_interchangeable(m: &Machine, a: StateId, b: StateId) -> bool {
    interchangeable_in(&memory_sets(m), &compute_mnshft(m), a, b)
}

/// Re-anchors each state `mnshft(q)` positions further; the accessed text
/// positions are unchanged.
pub fn positify(m: &Machine, profile: &ShiftProfile) -> Result<Machine> {
    let reach = m.reachable();
    let mut d = m.to_draft();
    for q in m.states() {
        let mn = match profile.get(q) {
            Some(v) => v,
            None if reach[q] => {
                return Err(Error::Domain(format!("state {q} cannot reach a prematch state")));
            }
            None => continue,
        };
        if m.next(q) < mn {
            return Err(Error::Domain(format!(
                "state {q} has next {} below its minimal shift {mn}",
                m.next(q)
            )));
        }
        d.states[q].next -= mn;
        for e in &mut d.states[q].out {
            if let Some(t) = e.0 {
                let to = profile.get(t).ok_or_else(|| {
                    Error::Domain(format!("state {t} cannot reach a prematch state"))
                })?;
                e.1 = e.1 + to - mn;
            }
        }
    }
    d.finish_unpruned()
}

/// Keeps the faster of two machines; ties go to the first.
fn faster(first: Machine, second: Machine, model: &IidModel) -> Result<Machine> {
    let s1 = asymptotic_speed_iid(&first, model)?;
    let s2 = asymptotic_speed_iid(&second, model)?;
    Ok(if s2 > s1 { second } else { first })
}

/// Both redirects of a pair, the one keeping the lower id first.
fn best_redirect(m: &Machine, a: StateId, b: StateId, model: &IidModel) -> Result<Machine> {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    faster(redirect(m, lo, hi)?, redirect(m, hi, lo)?, model)
}

/// A state reading a position before its minimal shift whose targets differ.
fn disagreement(m: &Machine, p: &ShiftProfile) -> Option<(StateId, StateId, StateId)> {
    for q in m.states() {
        let Some(mn) = p.get(q) else { continue };
        if m.next(q) >= mn {
            continue;
        }
        let a = m.delta(q, 0);
        if let Some(y) = m.alphabet().symbols().find(|&y| m.delta(q, y) != a) {
            return Some((q, a, m.delta(q, y)));
        }
    }
    None
}

/// Merges the targets of states that read a position which cannot matter,
/// keeping at each step the faster of the two redirects.
pub fn equalize_irrelevant(m: &Machine, model: &IidModel) -> Result<Machine> {
    if expanded_is_redundant(&expand(m)) {
        return Err(Error::Domain("equalization needs a non-redundant machine".into()));
    }
    let mut cur = m.clone();
    loop {
        let p = compute_mnshft(&cur);
        let Some((_, a, b)) = disagreement(&cur, &p) else {
            return Ok(cur);
        };
        if cur.is_sink(a) || cur.is_sink(b) {
            return Err(Error::Invalid("a transition into the sink can be taken".into()));
        }
        let sets = memory_sets(&cur);
        if !interchangeable_in(&sets, &p, a, b) {
            return Err(Error::Domain(format!("states {a} and {b} are not interchangeable")));
        }
        cur = best_redirect(&cur, a, b, model)?;
    }
}

/// First pair of distinct states with the same memory.
fn duplicate_pair(m: &Machine) -> Result<Option<(StateId, StateId)>> {
    let mem = memory_of_standard(m)?;
    for a in m.states() {
        for b in a + 1..m.sink() {
            if mem[a] == mem[b] {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Merges duplicate-memory states of a standard machine until none is left.
pub fn merge_duplicates(m: &Machine, model: &IidModel) -> Result<Machine> {
    let mut cur = compact(m);
    while let Some((a, b)) = duplicate_pair(&cur)? {
        cur = compact(&best_redirect(&cur, a, b, model)?);
    }
    Ok(cur)
}

/// Standard, compact form with relevant states only and injective memory,
/// at least as fast as the input under the model.
pub fn canonicalize(m: &Machine, model: &IidModel) -> Result<Machine> {
    let a = standardize(m);
    let b = equalize_irrelevant(&a, model)?;
    let c = compact(&b);
    let d = positify(&c, &compute_mnshft(&c))?;
    let e = standardize(&d);
    merge_duplicates(&e, model)
}
