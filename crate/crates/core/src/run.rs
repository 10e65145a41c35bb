//! The generic algorithm driving a machine over a text.

use crate::alphabet::{Pattern, Symbol};
use crate::error::{Error, Result};
use crate::machine::{Machine, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub state: StateId,
    pub position: usize,
    pub index: usize,
    pub symbol: Symbol,
    pub shift: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub steps: Vec<Step>,
    pub occurrences: Vec<usize>,
    pub tac: usize,
    /// The iteration cap was reached before the loop ended.
    pub truncated: bool,
    /// Position at which the machine wanted to read past the end of the text.
    pub stopped_at: Option<usize>,
}

impl ExecutionTrace {
    pub fn accessed(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.index).collect()
    }
}

/// Iteration cap one above the bound that every valid machine respects.
pub fn default_cap(m: &Machine, text_len: usize) -> usize {
    (text_len + 1).saturating_mul(m.state_count() + 1).saturating_add(1)
}

fn check_text(m: &Machine, text: &[Symbol]) -> Result<()> {
    let a = m.alphabet().len();
    match text.iter().position(|&x| x as usize >= a) {
        Some(i) => Err(Error::Input(format!("text symbol at position {i} is outside the alphabet"))),
        None => Ok(()),
    }
}

/// Runs the generic algorithm. A read past the end of the text ends the run
/// and is recorded in `stopped_at`.
pub fn run_generic(m: &Machine, text: &[Symbol], iteration_cap: usize) -> Result<ExecutionTrace> {
    if iteration_cap == 0 {
        return Err(Error::Input("iteration cap must be at least 1".into()));
    }
    check_text(m, text)?;
    let w = m.pattern();
    let mut tr = ExecutionTrace::default();
    if text.len() < w.len() {
        return Ok(tr);
    }
    let last = text.len() - w.len();
    let (mut q, mut p) = (m.initial(), 0usize);
    while p <= last {
        if tr.tac == iteration_cap {
            tr.truncated = true;
            break;
        }
        let index = p + m.next(q);
        if index >= text.len() {
            tr.stopped_at = Some(p);
            break;
        }
        let x = text[index];
        if m.is_prematch(q) && x == w.at(m.next(q)) {
            tr.occurrences.push(p);
        }
        let t = m.transition(q, x);
        tr.steps.push(Step { state: q, position: p, index, symbol: x, shift: t.shift });
        tr.tac += 1;
        q = t.target;
        p += t.shift;
    }
    Ok(tr)
}

pub fn run(m: &Machine, text: &[Symbol]) -> Result<ExecutionTrace> {
    run_generic(m, text, default_cap(m, text.len()))
}

/// Counts without recording steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub tac: usize,
    pub matches: usize,
    pub truncated: bool,
    pub stopped_at: Option<usize>,
}

/// Flat tables for fast repeated runs.
#[derive(Clone, Debug)]
pub struct Runner {
    a: usize,
    next: Vec<u32>,
    report: Vec<i16>,
    target: Vec<u32>,
    shift: Vec<u32>,
    initial: u32,
    m: usize,
    states: usize,
}

impl Runner {
    pub fn new(m: &Machine) -> Runner {
        let a = m.alphabet().len();
        let n = m.state_count();
        let mut r = Runner {
            a,
            next: Vec::with_capacity(n),
            report: Vec::with_capacity(n),
            target: Vec::with_capacity(n * a),
            shift: Vec::with_capacity(n * a),
            initial: m.initial() as u32,
            m: m.pattern().len(),
            states: n,
        };
        for q in 0..n {
            r.next.push(m.next(q) as u32);
            r.report.push(if m.is_prematch(q) { m.pattern().at(m.next(q)) as i16 } else { -1 });
            for x in m.alphabet().symbols() {
                let t = m.transition(q, x);
                r.target.push(t.target as u32);
                r.shift.push(t.shift as u32);
            }
        }
        r
    }

    pub fn default_cap(&self, text_len: usize) -> usize {
        (text_len + 1).saturating_mul(self.states + 1).saturating_add(1)
    }

    /// Same loop as [`run_generic`], assuming the text is over the alphabet.
    pub fn count(&self, text: &[Symbol], cap: usize) -> RunSummary {
        let mut s = RunSummary::default();
        if text.len() < self.m {
            return s;
        }
        let last = text.len() - self.m;
        let (mut q, mut p) = (self.initial as usize, 0usize);
        while p <= last {
            if s.tac == cap {
                s.truncated = true;
                break;
            }
            let index = p + self.next[q] as usize;
            let Some(&x) = text.get(index) else {
                s.stopped_at = Some(p);
                break;
            };
            if self.report[q] == x as i16 {
                s.matches += 1;
            }
            let i = q * self.a + x as usize;
            p += self.shift[i] as usize;
            q = self.target[i] as usize;
            s.tac += 1;
        }
        s
    }
}

/// Direct window comparison.
pub fn occurrences_oracle(w: &Pattern, text: &[Symbol]) -> Vec<usize> {
    let w = w.symbols();
    if text.len() < w.len() {
        return Vec::new();
    }
    (0..=text.len() - w.len()).filter(|&i| &text[i..i + w.len()] == w).collect()
}
