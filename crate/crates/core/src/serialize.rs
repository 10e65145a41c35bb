//! JSON machine documents and DOT export.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Pattern};
use crate::error::{Error, Result};
use crate::expansion::MemoryState;
use crate::machine::{Draft, DraftState, Machine};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: i64,
    pub next: i64,
    pub prematch: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<Vec<(i64, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDoc {
    pub pattern: String,
    pub alphabet: String,
    pub states: Vec<StateDoc>,
    pub initial: i64,
    #[serde(default)]
    pub sink: Option<i64>,
    pub delta: Vec<(i64, String, i64)>,
    pub sigma: Vec<(i64, String, i64)>,
}

impl MachineDoc {
    pub fn from_machine(m: &Machine) -> MachineDoc {
        let alpha = m.alphabet();
        let mut states = Vec::new();
        let mut delta = Vec::new();
        let mut sigma = Vec::new();
        for q in 0..m.state_count() {
            states.push(StateDoc {
                id: q as i64,
                next: m.next(q) as i64,
                prematch: m.is_prematch(q),
                memory: None,
            });
            for x in alpha.symbols() {
                let c = alpha.char_of(x).to_string();
                delta.push((q as i64, c.clone(), m.delta(q, x) as i64));
                sigma.push((q as i64, c, m.sigma(q, x) as i64));
            }
        }
        MachineDoc {
            pattern: m.pattern().to_string(),
            alphabet: alpha.to_string(),
            states,
            initial: m.initial() as i64,
            sink: Some(m.sink() as i64),
            delta,
            sigma,
        }
    }

    /// Adds a memory annotation to each non-sink state.
    pub fn with_memory(mut self, memory: &[MemoryState], alphabet: &Alphabet) -> MachineDoc {
        for (s, h) in self.states.iter_mut().zip(memory) {
            s.memory = Some(
                h.entries()
                    .iter()
                    .map(|&(i, x)| (i as i64, alphabet.char_of(x).to_string()))
                    .collect(),
            );
        }
        self
    }

    /// Loads the document. States keep their relative order; the sink is
    /// moved to the last id, and injected when the document has none.
    pub fn to_machine(&self) -> Result<Machine> {
        let bad = |s: String| Error::Document(s);
        let alphabet = Alphabet::parse(&self.alphabet).map_err(|e| bad(e.to_string()))?;
        let pattern = Pattern::new(alphabet.clone(), &self.pattern).map_err(|e| bad(e.to_string()))?;
        let a = alphabet.len();
        let sink = self.sink;
        let mut dense: HashMap<i64, usize> = HashMap::new();
        let mut order = Vec::new();
        for s in &self.states {
            if Some(s.id) == sink {
                if s.prematch {
                    return Err(bad("the sink cannot be a prematch state".into()));
                }
                continue;
            }
            if dense.insert(s.id, order.len()).is_some() {
                return Err(bad(format!("duplicate state id {}", s.id)));
            }
            if s.next < 0 {
                return Err(bad(format!("state {} has negative next", s.id)));
            }
            if s.prematch && s.next as usize >= pattern.len() {
                return Err(bad(format!(
                    "prematch state {} has next {} >= |w| = {}",
                    s.id,
                    s.next,
                    pattern.len()
                )));
            }
            order.push(s);
        }
        let symbol = |c: &str| -> Result<u8> {
            let mut it = c.chars();
            match (it.next(), it.next()) {
                (Some(ch), None) => alphabet.symbol(ch).ok_or_else(|| bad(format!("symbol '{c}' not in alphabet"))),
                _ => Err(bad(format!("'{c}' is not a single symbol"))),
            }
        };
        let resolve = |id: i64| -> Result<Option<usize>> {
            if Some(id) == sink {
                return Ok(None);
            }
            dense.get(&id).map(|&i| Some(i)).ok_or_else(|| bad(format!("unknown state id {id}")))
        };
        let mut targets: BTreeMap<(usize, u8), Option<usize>> = BTreeMap::new();
        let mut shifts: BTreeMap<(usize, u8), usize> = BTreeMap::new();
        for (q, c, t) in &self.delta {
            let x = symbol(c)?;
            let t = resolve(*t)?;
            match resolve(*q)? {
                None => {
                    if t.is_some() {
                        return Err(bad("the sink must loop on itself".into()));
                    }
                }
                Some(q) => {
                    if targets.insert((q, x), t).is_some() {
                        return Err(bad(format!("duplicate delta entry for state {q} on '{c}'")));
                    }
                }
            }
        }
        for (q, c, s) in &self.sigma {
            let x = symbol(c)?;
            if *s < 0 {
                return Err(bad(format!("negative shift on state {q}")));
            }
            match resolve(*q)? {
                None => {
                    if *s != 0 {
                        return Err(bad("the sink must have zero shifts".into()));
                    }
                }
                Some(q) => {
                    if shifts.insert((q, x), *s as usize).is_some() {
                        return Err(bad(format!("duplicate sigma entry for state {q} on '{c}'")));
                    }
                }
            }
        }
        let mut states = Vec::with_capacity(order.len());
        for (i, s) in order.iter().enumerate() {
            let mut out = Vec::with_capacity(a);
            for x in 0..a as u8 {
                let t = targets.get(&(i, x)).ok_or_else(|| bad(format!("delta missing for state {} on symbol {}", s.id, alphabet.char_of(x))))?;
                let sh = shifts.get(&(i, x)).ok_or_else(|| bad(format!("sigma missing for state {} on symbol {}", s.id, alphabet.char_of(x))))?;
                out.push((*t, *sh));
            }
            states.push(DraftState { next: s.next as usize, prematch: s.prematch, out });
        }
        let initial = resolve(self.initial)?.ok_or_else(|| bad("the initial state cannot be the sink".into()))?;
        Draft { pattern, states, initial }.finish_unpruned().map_err(|e| bad(e.to_string()))
    }
}

pub fn to_json(m: &Machine) -> String {
    serde_json::to_string_pretty(&MachineDoc::from_machine(m)).expect("machine documents serialize")
}

pub fn from_json(s: &str) -> Result<Machine> {
    let doc: MachineDoc = serde_json::from_str(s).map_err(|e| Error::Document(e.to_string()))?;
    doc.to_machine()
}

pub fn to_dot(m: &Machine) -> String {
    let alpha = m.alphabet();
    let mut s = String::new();
    let _ = writeln!(s, "digraph machine {{");
    let _ = writeln!(s, "  rankdir=LR;");
    let _ = writeln!(s, "  start [shape=point];");
    for q in 0..m.state_count() {
        if m.is_sink(q) {
            let _ = writeln!(s, "  q{q} [label=\"sink\", shape=circle, style=filled, fillcolor=grey];");
        } else {
            let shape = if m.is_prematch(q) { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  q{q} [label=\"{q}\\nnext={}\", shape={shape}];", m.next(q));
        }
    }
    let _ = writeln!(s, "  start -> q{};", m.initial());
    for q in m.states() {
        for x in alpha.symbols() {
            let t = m.transition(q, x);
            let _ = writeln!(s, "  q{q} -> q{} [label=\"{}/{}\"];", t.target, alpha.char_of(x), t.shift);
        }
    }
    s.push_str("}\n");
    s
}
