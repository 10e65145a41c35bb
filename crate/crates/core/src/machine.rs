//! The w-matching machine: states with a next-position-to-check, a prematch
//! flag, and total transition/shift functions. The sink is always an explicit
//! state and always carries the largest id.

use std::collections::VecDeque;

use crate::alphabet::{Alphabet, Pattern, Symbol};
use crate::error::{Error, Result};

pub type StateId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub target: StateId,
    pub shift: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    pattern: Pattern,
    next: Vec<usize>,
    prematch: Vec<bool>,
    trans: Vec<Transition>,
    initial: StateId,
    sink: StateId,
}

/// Target of a draft transition; `None` is the sink.
pub type DraftTarget = Option<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DraftState {
    pub next: usize,
    pub prematch: bool,
    /// One entry per symbol: (target, shift).
    pub out: Vec<(DraftTarget, usize)>,
}

/// Mutable machine description without a materialized sink. Transformations
/// edit drafts and turn them back into machines with [`Draft::finish`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Draft {
    pub pattern: Pattern,
    pub states: Vec<DraftState>,
    pub initial: usize,
}

impl Draft {
    /// Keeps the states reachable from the initial state, numbered in
    /// breadth-first order (symbols visited in alphabet order).
    pub fn finish(self) -> Result<Machine> {
        let n = self.states.len();
        if self.initial >= n {
            return Err(Error::Input("initial state out of range".into()));
        }
        let mut order = Vec::new();
        let mut new_id = vec![usize::MAX; n];
        let mut queue = VecDeque::from([self.initial]);
        new_id[self.initial] = 0;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &(t, _) in &self.states[q].out {
                if let Some(t) = t {
                    if t >= n {
                        return Err(Error::Input(format!("transition to unknown state {t}")));
                    }
                    if new_id[t] == usize::MAX {
                        new_id[t] = order.len() + queue.len();
                        queue.push_back(t);
                    }
                }
            }
        }
        let states = order.iter().map(|&q| {
            let s = &self.states[q];
            DraftState {
                next: s.next,
                prematch: s.prematch,
                out: s.out.iter().map(|&(t, sh)| (t.map(|t| new_id[t]), sh)).collect(),
            }
        });
        Machine::assemble(self.pattern, states.collect(), 0)
    }

    /// Builds the machine keeping every state and its numbering.
    pub fn finish_unpruned(self) -> Result<Machine> {
        Machine::assemble(self.pattern, self.states, self.initial)
    }
}

impl Machine {
    fn assemble(pattern: Pattern, states: Vec<DraftState>, initial: usize) -> Result<Machine> {
        let a = pattern.alphabet().len();
        let n = states.len();
        if n == 0 {
            return Err(Error::Input("machine needs at least one non-sink state".into()));
        }
        let sink = n;
        let mut next = Vec::with_capacity(n + 1);
        let mut prematch = Vec::with_capacity(n + 1);
        let mut trans = Vec::with_capacity((n + 1) * a);
        for (q, s) in states.iter().enumerate() {
            if s.out.len() != a {
                return Err(Error::Input(format!(
                    "state {q} has {} transitions, alphabet has {a} symbols",
                    s.out.len()
                )));
            }
            if s.prematch && s.next >= pattern.len() {
                return Err(Error::Input(format!(
                    "prematch state {q} has next {} >= |w| = {}",
                    s.next,
                    pattern.len()
                )));
            }
            next.push(s.next);
            prematch.push(s.prematch);
            for &(t, shift) in &s.out {
                let target = match t {
                    Some(t) if t < n => t,
                    Some(t) => return Err(Error::Input(format!("transition to unknown state {t}"))),
                    None => sink,
                };
                trans.push(Transition { target, shift });
            }
        }
        next.push(0);
        prematch.push(false);
        trans.extend(std::iter::repeat(Transition { target: sink, shift: 0 }).take(a));
        Ok(Machine { pattern, next, prematch, trans, initial, sink })
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.pattern.alphabet()
    }

    /// Number of states including the sink.
    pub fn state_count(&self) -> usize {
        self.next.len()
    }

    /// Number of states excluding the sink.
    pub fn len(&self) -> usize {
        self.next.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn sink(&self) -> StateId {
        self.sink
    }

    pub fn is_sink(&self, q: StateId) -> bool {
        q == self.sink
    }

    pub fn next(&self, q: StateId) -> usize {
        self.next[q]
    }

    pub fn is_prematch(&self, q: StateId) -> bool {
        self.prematch[q]
    }

    pub fn transition(&self, q: StateId, x: Symbol) -> Transition {
        self.trans[q * self.alphabet().len() + x as usize]
    }

    pub fn delta(&self, q: StateId, x: Symbol) -> StateId {
        self.transition(q, x).target
    }

    pub fn sigma(&self, q: StateId, x: Symbol) -> usize {
        self.transition(q, x).shift
    }

    /// Non-sink state ids.
    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.sink
    }

    pub fn prematch_states(&self) -> Vec<StateId> {
        self.states().filter(|&q| self.prematch[q]).collect()
    }

    /// Greatest next-position-to-check over non-sink states.
    pub fn order(&self) -> usize {
        self.states().map(|q| self.next[q]).max().unwrap_or(0)
    }

    pub fn to_draft(&self) -> Draft {
        let a = self.alphabet().len() as Symbol;
        let states = self
            .states()
            .map(|q| DraftState {
                next: self.next[q],
                prematch: self.prematch[q],
                out: (0..a)
                    .map(|x| {
                        let t = self.transition(q, x);
                        (if t.target == self.sink { None } else { Some(t.target) }, t.shift)
                    })
                    .collect(),
            })
            .collect();
        Draft { pattern: self.pattern.clone(), states, initial: self.initial }
    }

    /// Renumbers reachable states in breadth-first order and drops the rest.
    pub fn pruned(&self) -> Machine {
        self.to_draft().finish().expect("pruning a well-formed machine")
    }

    /// States reachable from the initial state (sink excluded).
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for x in self.alphabet().symbols() {
                let t = self.delta(q, x);
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen[self.sink] = false;
        seen
    }

    pub fn with_shift(&self, q: StateId, x: Symbol, shift: usize) -> Machine {
        let mut m = self.clone();
        let a = m.alphabet().len();
        m.trans[q * a + x as usize].shift = shift;
        m
    }

    pub fn with_prematch(&self, q: StateId, prematch: bool) -> Result<Machine> {
        let mut d = self.to_draft();
        d.states[q].prematch = prematch;
        d.finish_unpruned()
    }
}

/// The machine associated with the naive algorithm.
pub fn build_naive(w: &Pattern) -> Machine {
    let m = w.len();
    let a = w.alphabet().len() as Symbol;
    let states = (0..m)
        .map(|i| DraftState {
            next: i,
            prematch: i == m - 1,
            out: (0..a)
                .map(|x| if i < m - 1 && x == w.at(i) { (Some(i + 1), 0) } else { (Some(0), 1) })
                .collect(),
        })
        .collect();
    Draft { pattern: w.clone(), states, initial: 0 }
        .finish_unpruned()
        .expect("naive machine is well-formed")
}
