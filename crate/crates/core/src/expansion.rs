//! Full memory expansion and the predicates built on it.

use std::collections::{HashMap, VecDeque};

use crate::alphabet::{Pattern, Symbol};
use crate::error::{Error, Result};
use crate::machine::{Draft, DraftState, Machine, StateId};

/// Partial function from window offsets to symbols, sorted by offset.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemoryState(Vec<(usize, Symbol)>);

impl MemoryState {
    pub fn empty() -> Self {
        MemoryState(Vec::new())
    }

    pub fn new(mut entries: Vec<(usize, Symbol)>) -> Result<Self> {
        entries.sort_unstable();
        if entries.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::Input("memory has two entries for the same position".into()));
        }
        Ok(MemoryState(entries))
    }

    pub fn entries(&self) -> &[(usize, Symbol)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, pos: usize) -> Option<Symbol> {
        self.0.binary_search_by_key(&pos, |e| e.0).ok().map(|i| self.0[i].1)
    }

    pub fn contains(&self, pos: usize, x: Symbol) -> bool {
        self.get(pos) == Some(x)
    }

    /// Positions with a known symbol.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|e| e.0)
    }

    /// Adds `(pos, x)`; the position must be unknown.
    pub fn with(&self, pos: usize, x: Symbol) -> Self {
        match self.0.binary_search_by_key(&pos, |e| e.0) {
            Ok(_) => panic!("position {pos} already known"),
            Err(i) => {
                let mut v = self.0.clone();
                v.insert(i, (pos, x));
                MemoryState(v)
            }
        }
    }

    /// Drops positions below `s` and moves the others `s` to the left.
    pub fn kshift(&self, s: usize) -> Self {
        MemoryState(self.0.iter().filter(|e| e.0 >= s).map(|&(i, x)| (i - s, x)).collect())
    }

    pub fn same_positions(&self, other: &MemoryState) -> bool {
        self.positions().eq(other.positions())
    }
}

#[derive(Clone, Debug)]
pub struct ExpandedMachine {
    pub machine: Machine,
    /// Memory of each state of `machine`; the sink gets the empty memory.
    pub memory_of: Vec<MemoryState>,
    /// State of the original machine each state comes from.
    pub origin_of: Vec<StateId>,
}

pub fn expand(m: &Machine) -> ExpandedMachine {
    let a = m.alphabet().len() as Symbol;
    let mut ids: HashMap<(StateId, MemoryState), usize> = HashMap::new();
    let mut nodes = vec![(m.initial(), MemoryState::empty())];
    ids.insert(nodes[0].clone(), 0);
    let mut states = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (q, h) = nodes[i].clone();
        let j = m.next(q);
        let mut out = Vec::with_capacity(a as usize);
        for x in 0..a {
            let t = m.transition(q, x);
            let known = h.get(j);
            let target = match known {
                Some(y) if y != x => None,
                _ if m.is_sink(t.target) => None,
                Some(_) => Some((t.target, h.kshift(t.shift))),
                None => Some((t.target, h.with(j, x).kshift(t.shift))),
            };
            let id = target.map(|node| {
                *ids.entry(node.clone()).or_insert_with(|| {
                    nodes.push(node);
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                })
            });
            out.push((id, t.shift));
        }
        states.push(DraftState { next: j, prematch: m.is_prematch(q), out });
    }
    let machine = Draft { pattern: m.pattern().clone(), states, initial: 0 }
        .finish_unpruned()
        .expect("expansion is well-formed");
    let mut memory_of: Vec<MemoryState> = nodes.iter().map(|n| n.1.clone()).collect();
    let mut origin_of: Vec<StateId> = nodes.iter().map(|n| n.0).collect();
    memory_of.push(MemoryState::empty());
    origin_of.push(m.sink());
    ExpandedMachine { machine, memory_of, origin_of }
}

/// Each state of the machine is reachable and carries a single memory.
pub fn is_standard(m: &Machine) -> bool {
    let e = expand(m);
    let mut seen = vec![false; m.state_count()];
    for q in e.machine.states() {
        let o = e.origin_of[q];
        if seen[o] {
            return false;
        }
        seen[o] = true;
    }
    m.states().all(|q| seen[q])
}

pub fn memory_of_standard(m: &Machine) -> Result<Vec<MemoryState>> {
    let e = expand(m);
    let mut mem: Vec<Option<MemoryState>> = vec![None; m.state_count()];
    for q in e.machine.states() {
        let o = e.origin_of[q];
        if mem[o].is_some() {
            return Err(Error::Domain(format!("machine is not standard: state {o} has several memories")));
        }
        mem[o] = Some(e.memory_of[q].clone());
    }
    mem[m.sink()] = Some(MemoryState::empty());
    mem.into_iter()
        .enumerate()
        .map(|(q, h)| h.ok_or_else(|| Error::Domain(format!("machine is not standard: state {q} is unreachable"))))
        .collect()
}

/// Some execution reads a position it has already read.
pub fn is_redundant(m: &Machine) -> bool {
    expanded_is_redundant(&expand(m))
}

pub fn expanded_is_redundant(e: &ExpandedMachine) -> bool {
    e.machine.states().any(|q| e.memory_of[q].get(e.machine.next(q)).is_some())
}

/// Smallest alignment `k` (from 1 for prematch states, 0 otherwise) under
/// which every known symbol, plus the one being read, agrees with `w`.
pub fn max_valid_shift(memory: &MemoryState, next: usize, x: Symbol, prematch: bool, w: &Pattern) -> Result<usize> {
    let known: Vec<(usize, Symbol)> = match memory.get(next) {
        Some(y) if y != x => {
            return Err(Error::Domain(format!("position {next} is known to hold another symbol")))
        }
        Some(_) => memory.entries().to_vec(),
        None => memory.with(next, x).entries().to_vec(),
    };
    Ok(min_alignment(&known, if prematch { 1 } else { 0 }, w))
}

/// `known` sorted by position.
fn min_alignment(known: &[(usize, Symbol)], from: usize, w: &Pattern) -> usize {
    let ws = w.symbols();
    let top = known.last().map(|e| e.0).unwrap_or(0);
    let mut k = from;
    while k <= top {
        let fits = known
            .iter()
            .filter(|e| e.0 >= k && e.0 < k + ws.len())
            .all(|&(i, y)| ws[i - k] == y);
        if fits {
            return k;
        }
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Prematch flag disagrees with the memory.
    Prematch { state: StateId },
    /// Shift larger than the alignment bound.
    Shift { state: StateId, symbol: Symbol, shift: usize, bound: usize },
    /// A shift lands on a window already fully known to match, which can
    /// no longer be reported without a re-read.
    UnreportedOccurrence { state: StateId },
    /// Zero-shift cycle through the listed states.
    ZeroShiftCycle { states: Vec<StateId> },
    /// A transition into the sink.
    Sink { state: StateId, symbol: Symbol },
}

impl Violation {
    pub fn condition(&self) -> u8 {
        match self {
            Violation::Prematch { .. } | Violation::UnreportedOccurrence { .. } => 1,
            Violation::Shift { .. } => 2,
            Violation::ZeroShiftCycle { .. } | Violation::Sink { .. } => 3,
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Prematch { state } => write!(f, "condition 1: prematch flag of state {state} disagrees with its memory"),
            Violation::Shift { state, symbol, shift, bound } => write!(
                f,
                "condition 2: state {state} shifts {shift} on symbol {symbol}, bound is {bound}"
            ),
            Violation::UnreportedOccurrence { state } => {
                write!(f, "condition 1: state {state} is entered by a shift onto a fully known occurrence")
            }
            Violation::ZeroShiftCycle { states } => write!(f, "condition 3: zero-shift cycle through {states:?}"),
            Violation::Sink { state, symbol } => write!(f, "condition 3: state {state} falls into the sink on symbol {symbol}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Violation(Violation),
}

impl std::fmt::Display for Validity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Validity::Valid => f.write_str("valid"),
            Validity::Violation(v) => write!(f, "invalid ({v})"),
        }
    }
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Exact validity test for standard, non-redundant machines.
pub fn check_validity_standard(m: &Machine) -> Result<Validity> {
    let e = expand(m);
    if expanded_is_redundant(&e) {
        return Err(Error::Domain("machine is redundant; expand and compact it first".into()));
    }
    let mem = memory_of_standard(m).map_err(|e| Error::Domain(format!("{e}; expand and compact it first")))?;
    let w = m.pattern();
    for q in m.states() {
        let h = &mem[q];
        let j = m.next(q);
        let covers = j < w.len() && (0..w.len()).filter(|&i| i != j).all(|i| h.contains(i, w.at(i)));
        if covers != m.is_prematch(q) {
            return Ok(Validity::Violation(Violation::Prematch { state: q }));
        }
    }
    // A memory holding all of w at offset 0 was completed by a prematch
    // state at the same window; it stays reported only if no shift led here.
    let reported: Vec<bool> = m.states().map(|q| (0..w.len()).all(|i| mem[q].contains(i, w.at(i)))).collect();
    for q in m.states() {
        for x in m.alphabet().symbols() {
            let t = m.transition(q, x);
            if !m.is_sink(t.target) && reported[t.target] && t.shift > 0 {
                return Ok(Validity::Violation(Violation::UnreportedOccurrence { state: t.target }));
            }
        }
    }
    for q in m.states() {
        for x in m.alphabet().symbols() {
            let t = m.transition(q, x);
            if m.is_sink(t.target) {
                return Ok(Validity::Violation(Violation::Sink { state: q, symbol: x }));
            }
            let bound = max_valid_shift(&mem[q], m.next(q), x, m.is_prematch(q) || reported[q], w)?;
            if t.shift > bound {
                return Ok(Validity::Violation(Violation::Shift { state: q, symbol: x, shift: t.shift, bound }));
            }
        }
    }
    if let Some(states) = zero_shift_cycle(m) {
        return Ok(Validity::Violation(Violation::ZeroShiftCycle { states }));
    }
    Ok(Validity::Valid)
}

/// A cycle of the subgraph of zero-shift transitions between non-sink states.
pub fn zero_shift_cycle(m: &Machine) -> Option<Vec<StateId>> {
    let n = m.len();
    let mut color = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (q, ref mut i)) = stack.last_mut() {
            let syms = m.alphabet().len();
            if *i == syms {
                color[q] = 2;
                stack.pop();
                continue;
            }
            let x = *i as Symbol;
            *i += 1;
            let t = m.transition(q, x);
            if t.shift != 0 || m.is_sink(t.target) {
                continue;
            }
            match color[t.target] {
                0 => {
                    color[t.target] = 1;
                    parent[t.target] = q;
                    stack.push((t.target, 0));
                }
                1 => {
                    let mut cycle = vec![t.target];
                    let mut c = q;
                    while c != t.target {
                        cycle.push(c);
                        c = parent[c];
                    }
                    cycle.reverse();
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}
