//! Redirection and compaction.

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::expansion::expand;
use crate::machine::{Draft, DraftTarget, Machine, StateId};

/// `M_{a←b}`: removes `b` and sends every transition into `b` to `a`.
pub fn redirect(m: &Machine, a: StateId, b: StateId) -> Result<Machine> {
    if a == b || m.is_sink(a) || m.is_sink(b) || a >= m.state_count() || b >= m.state_count() {
        return Err(Error::Input(format!("cannot redirect state {b} onto state {a}")));
    }
    // `a` keeps its own prematch flag: it reads its own position, so taking
    // over the flag of `b` would report on an unchecked window.
    let mut d = m.to_draft();
    if d.initial == b {
        d.initial = a;
    }
    for s in &mut d.states {
        for (t, _) in &mut s.out {
            if *t == Some(b) {
                *t = Some(a);
            }
        }
    }
    // b is now unreachable and is dropped by the pruning.
    d.finish()
}

/// How a state can be removed by compaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Removal {
    /// Every incoming transition is extended by this (target, shift).
    Plain(DraftTarget, usize),
    /// As `Plain`, and the predecessors take over the report.
    Report(DraftTarget, usize),
}

/// The state's only non-sink transition, if it has exactly one.
fn single_exit(d: &Draft, s: usize) -> Option<(Symbol, DraftTarget, usize)> {
    let mut exits = d.states[s].out.iter().enumerate().filter(|(_, (t, _))| t.is_some());
    let (x, &(t, sh)) = exits.next()?;
    if exits.next().is_some() {
        return None;
    }
    Some((x as Symbol, t, sh))
}

fn all_identical(d: &Draft, s: usize) -> bool {
    let out = &d.states[s].out;
    out.iter().all(|e| *e == out[0])
}

fn removal(d: &Draft, s: usize) -> Option<Removal> {
    let st = &d.states[s];
    let w = &d.pattern;
    let (x, target, shift) = if let Some(e) = single_exit(d, s) {
        e
    } else if all_identical(d, s) && !st.prematch {
        (0, st.out[0].0, st.out[0].1)
    } else {
        return None;
    };
    if target == Some(s) || target.is_none() {
        return None;
    }
    if s == d.initial && shift != 0 {
        return None;
    }
    if !st.prematch || x != w.at(st.next) {
        return Some(Removal::Plain(target, shift));
    }
    // A reporting state may only go when each predecessor reads, at the same
    // position, the symbol that completes the same occurrence.
    if s == d.initial {
        return None;
    }
    for (q, p) in d.states.iter().enumerate() {
        let into: Vec<usize> = (0..p.out.len()).filter(|&y| p.out[y].0 == Some(s)).collect();
        if into.is_empty() {
            continue;
        }
        if q == s || p.prematch || p.next >= w.len() || into.len() != 1 {
            return None;
        }
        let y = into[0];
        if p.out[y].1 != 0 || y as Symbol != w.at(p.next) {
            return None;
        }
    }
    Some(Removal::Report(target, shift))
}

fn remove(d: &mut Draft, s: usize, r: Removal) {
    let (target, shift, report) = match r {
        Removal::Plain(t, sh) => (t, sh, false),
        Removal::Report(t, sh) => (t, sh, true),
    };
    for q in 0..d.states.len() {
        let mut hit = false;
        for e in &mut d.states[q].out {
            if e.0 == Some(s) {
                *e = (target, e.1 + shift);
                hit = true;
            }
        }
        if hit && report {
            d.states[q].prematch = true;
        }
    }
    if d.initial == s {
        d.initial = target.expect("initial never moves to the sink");
    }
    d.states[s].out.iter_mut().for_each(|e| *e = (Some(s), 0));
}

fn first_removable(d: &Draft) -> Option<(usize, Removal)> {
    (0..d.states.len()).find_map(|s| removal(d, s).map(|r| (s, r)))
}

/// No state can be removed by compaction.
pub fn is_compact(m: &Machine) -> bool {
    first_removable(&m.to_draft()).is_none()
}

/// Removes states with a single useful exit, or with identical exits, until
/// none is left. States are scanned in id order after each removal.
pub fn compact(m: &Machine) -> Machine {
    let mut d = m.to_draft();
    let mut changed = false;
    while let Some((s, r)) = first_removable(&d) {
        remove(&mut d, s, r);
        d = d.finish().expect("compaction keeps machines well-formed").to_draft();
        changed = true;
    }
    if !changed {
        return m.clone();
    }
    d.finish().expect("compaction keeps machines well-formed")
}

/// Expansion followed by compaction.
pub fn standardize(m: &Machine) -> Machine {
    compact(&expand(m).machine)
}
