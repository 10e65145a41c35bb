//! Search for the fastest valid machine of a given order under an iid model.
//!
//! The search space is the set of standard machines whose states are
//! pattern-consistent memories. A machine is fixed by the position each
//! reachable memory reads; shifts are the largest valid ones, and the
//! prematch flag follows from the memory.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Pattern, Symbol};
use crate::chain::StateChain;
use crate::error::{Error, Result};
use crate::expansion::{max_valid_shift, MemoryState};
use crate::machine::{Draft, DraftState, Machine};
use crate::models::IidModel;

pub type CandidateState = MemoryState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftPolicy {
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub shift_policy: ShiftPolicy,
    pub restarts: usize,
    pub seed: u64,
    /// Maximum number of assemblies examined by the exhaustive search.
    pub assembly_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Exhaustive,
            shift_policy: ShiftPolicy::Maximal,
            restarts: 50,
            seed: 0,
            assembly_cap: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub w: String,
    pub k: usize,
    pub model: String,
    pub strategy: Strategy,
    pub shift_policy: ShiftPolicy,
    pub seed: Option<u64>,
    pub assemblies_examined: u64,
    pub speed: f64,
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub machine: Machine,
    pub speed: f64,
    /// Memory of each non-sink state of `machine`.
    pub memory: Vec<MemoryState>,
    pub provenance: Provenance,
}

fn check_order(w: &Pattern, k: usize) -> Result<()> {
    if k + 1 < w.len() {
        return Err(Error::Input(format!("order {k} is below |w| - 1 = {}", w.len() - 1)));
    }
    Ok(())
}

/// Every partial function on {0..k} agreeing with `w` below |w|.
pub fn candidate_states(w: &Pattern, k: usize) -> Result<Vec<CandidateState>> {
    check_order(w, k)?;
    let a = w.alphabet().len() as Symbol;
    let mut out = vec![Vec::new()];
    for i in 0..=k {
        let options: Vec<Option<Symbol>> = if i < w.len() {
            vec![None, Some(w.at(i))]
        } else {
            std::iter::once(None).chain((0..a).map(Some)).collect()
        };
        let mut grown = Vec::with_capacity(out.len() * options.len());
        for h in &out {
            for o in &options {
                let mut h2: Vec<(usize, Symbol)> = h.clone();
                if let Some(x) = o {
                    h2.push((i, *x));
                }
                grown.push(h2);
            }
        }
        out = grown;
    }
    out.into_iter().map(MemoryState::new).collect()
}

/// Prematch flag forced by the memory and the position read.
fn is_prematch(h: &MemoryState, next: usize, w: &Pattern) -> bool {
    next < w.len() && (0..w.len()).filter(|&i| i != next).all(|i| h.contains(i, w.at(i)))
}

/// The whole pattern is known at the current position: the occurrence can
/// only be reported by re-reading a position.
fn knows_pattern(h: &MemoryState, w: &Pattern) -> bool {
    (0..w.len()).all(|i| h.contains(i, w.at(i)))
}

/// Unknown positions a memory may read next.
pub fn legal_reads(h: &MemoryState, k: usize) -> Vec<usize> {
    (0..=k).filter(|&j| h.get(j).is_none()).collect()
}

/// Transitions of one state: (target memory, shift) per symbol.
fn successors(h: &MemoryState, next: usize, w: &Pattern) -> Vec<(MemoryState, usize)> {
    let prematch = is_prematch(h, next, w);
    w.alphabet()
        .symbols()
        .map(|x| {
            let s = max_valid_shift(h, next, x, prematch, w).expect("fresh reads are never contradictory");
            (h.with(next, x).kshift(s), s)
        })
        .collect()
}

/// Builds the machine reachable from the empty memory under `next_choice`.
pub fn assemble_machine(
    w: &Pattern,
    k: usize,
    next_choice: &HashMap<CandidateState, usize>,
) -> Result<(Machine, Vec<MemoryState>)> {
    check_order(w, k)?;
    let mut ids: HashMap<MemoryState, usize> = HashMap::new();
    let mut mems = vec![MemoryState::empty()];
    ids.insert(MemoryState::empty(), 0);
    let mut states = Vec::new();
    let mut i = 0;
    while i < mems.len() {
        let h = mems[i].clone();
        if knows_pattern(&h, w) {
            return Err(Error::Domain(format!(
                "memory {:?} holds a full occurrence that cannot be reported",
                h.entries()
            )));
        }
        let j = *next_choice
            .get(&h)
            .ok_or_else(|| Error::Domain(format!("no read position chosen for memory {:?}", h.entries())))?;
        if j > k || h.get(j).is_some() {
            return Err(Error::Domain(format!(
                "memory {:?} cannot read position {j}: it must be unknown and at most {k}",
                h.entries()
            )));
        }
        let out = successors(&h, j, w)
            .into_iter()
            .map(|(t, s)| {
                let id = *ids.entry(t.clone()).or_insert_with(|| {
                    mems.push(t);
                    mems.len() - 1
                });
                (Some(id), s)
            })
            .collect();
        states.push(DraftState { next: j, prematch: is_prematch(&h, j, w), out });
        i += 1;
    }
    if !states.iter().any(|s| s.prematch) {
        return Err(Error::Domain("no prematch state is reachable".into()));
    }
    let m = Draft { pattern: w.clone(), states, initial: 0 }.finish_unpruned()?;
    if let Some(c) = crate::expansion::zero_shift_cycle(&m) {
        return Err(Error::Domain(format!("zero-shift cycle through {c:?}")));
    }
    Ok((m, mems))
}

/// Speed of an assembly given its transitions; assemblies are non-redundant,
/// so the chain is read off directly.
fn assembly_speed(trans: &[Vec<(usize, usize)>], probs: &[f64]) -> Result<f64> {
    let n = trans.len();
    let rows = trans
        .iter()
        .map(|out| out.iter().zip(probs).filter(|(_, &p)| p > 0.0).map(|(&(t, _), &p)| (t, p)).collect())
        .collect();
    let shifts = trans
        .iter()
        .map(|out| out.iter().zip(probs).map(|(&(_, s), &p)| s as f64 * p).sum())
        .collect();
    let mut initial = vec![0.0; n];
    initial[0] = 1.0;
    let mut chain = StateChain::new(initial, rows, shifts);
    chain.decompose()?;
    chain.speed()
}

/// Lazy enumeration state: memories in discovery order, with the
/// transitions of those already assigned.
struct Enumeration<'a> {
    w: &'a Pattern,
    k: usize,
    probs: &'a [f64],
    mems: Vec<MemoryState>,
    ids: HashMap<MemoryState, usize>,
    choice: Vec<usize>,
    trans: Vec<Vec<(usize, usize)>>,
    examined: u64,
    cap: u64,
    best: Option<(f64, Vec<usize>)>,
}

const TIE: f64 = 1e-12;

impl Enumeration<'_> {
    fn dfs(&mut self, i: usize) -> Result<()> {
        if i == self.mems.len() {
            self.examined += 1;
            if self.examined > self.cap {
                return Err(Error::Cap(format!(
                    "more than {} assemblies; use the hill-climbing strategy",
                    self.cap
                )));
            }
            let s = assembly_speed(&self.trans, self.probs)?;
            if self.best.as_ref().map_or(true, |b| s > b.0 + TIE) {
                self.best = Some((s, self.choice.clone()));
            }
            return Ok(());
        }
        let h = self.mems[i].clone();
        if knows_pattern(&h, self.w) {
            return Ok(());
        }
        for j in legal_reads(&h, self.k) {
            let mark = self.mems.len();
            let mut out = Vec::new();
            for (t, s) in successors(&h, j, self.w) {
                let id = match self.ids.get(&t) {
                    Some(&id) => id,
                    None => {
                        self.ids.insert(t.clone(), self.mems.len());
                        self.mems.push(t);
                        self.mems.len() - 1
                    }
                };
                out.push((id, s));
            }
            self.choice.push(j);
            self.trans.push(out);
            self.dfs(i + 1)?;
            self.trans.pop();
            self.choice.pop();
            for t in self.mems.drain(mark..) {
                self.ids.remove(&t);
            }
        }
        Ok(())
    }
}

/// Maps the reads chosen in discovery order back to memories.
fn choice_map(w: &Pattern, choices: &[usize]) -> HashMap<CandidateState, usize> {
    let mut map = HashMap::new();
    let mut mems = vec![MemoryState::empty()];
    let mut ids: HashMap<MemoryState, usize> = HashMap::from([(MemoryState::empty(), 0)]);
    for (i, &j) in choices.iter().enumerate() {
        let h = mems[i].clone();
        map.insert(h.clone(), j);
        for (t, _) in successors(&h, j, w) {
            if !ids.contains_key(&t) {
                ids.insert(t.clone(), mems.len());
                mems.push(t);
            }
        }
    }
    map
}

fn check_model(w: &Pattern, model: &IidModel) -> Result<()> {
    if w.alphabet() != model.alphabet() {
        return Err(Error::Input("model and pattern alphabets differ".into()));
    }
    Ok(())
}

fn finish(w: &Pattern, k: usize, model: &IidModel, choice: &HashMap<CandidateState, usize>, provenance: Provenance) -> Result<Optimum> {
    let (machine, memory) = assemble_machine(w, k, choice)?;
    let speed = crate::speed::asymptotic_speed_iid(&machine, model)?;
    Ok(Optimum { machine, speed, memory, provenance: Provenance { speed, ..provenance } })
}

/// Enumerates every assembly, depth first over the states reachable given
/// the earlier choices. Ties keep the lexicographically least choice list.
pub fn optimize_exhaustive(w: &Pattern, k: usize, model: &IidModel, assembly_cap: u64) -> Result<Optimum> {
    check_order(w, k)?;
    check_model(w, model)?;
    let mut e = Enumeration {
        w,
        k,
        probs: model.probs(),
        mems: vec![MemoryState::empty()],
        ids: HashMap::from([(MemoryState::empty(), 0)]),
        choice: Vec::new(),
        trans: Vec::new(),
        examined: 0,
        cap: assembly_cap,
        best: None,
    };
    e.dfs(0)?;
    let (_, choices) = e.best.ok_or_else(|| Error::Domain("no assembly found".into()))?;
    let provenance = Provenance {
        w: w.to_string(),
        k,
        model: model.spec(),
        strategy: Strategy::Exhaustive,
        shift_policy: ShiftPolicy::Maximal,
        seed: None,
        assemblies_examined: e.examined,
        speed: 0.0,
    };
    finish(w, k, model, &choice_map(w, &choices), provenance)
}

/// Speed of the assembly defined by a full choice map.
fn map_speed(w: &Pattern, k: usize, model: &IidModel, choice: &HashMap<CandidateState, usize>) -> Result<(f64, Vec<MemoryState>)> {
    let (m, mems) = assemble_machine(w, k, choice)?;
    let trans: Vec<Vec<(usize, usize)>> = m
        .states()
        .map(|q| m.alphabet().symbols().map(|x| (m.delta(q, x), m.sigma(q, x))).collect())
        .collect();
    Ok((assembly_speed(&trans, model.probs())?, mems))
}

const START_ATTEMPTS: usize = 1000;

/// Random restarts of steepest ascent over single-state read changes.
pub fn optimize_hill_climb(w: &Pattern, k: usize, model: &IidModel, config: &SearchConfig) -> Result<Optimum> {
    check_model(w, model)?;
    let candidates = candidate_states(w, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(f64, HashMap<CandidateState, usize>)> = None;
    let mut examined = 0u64;
    for _ in 0..config.restarts.max(1) {
        let mut start = None;
        for _ in 0..START_ATTEMPTS {
            let mut choice: HashMap<CandidateState, usize> = HashMap::new();
            for h in &candidates {
                let reads = legal_reads(h, k);
                if !reads.is_empty() {
                    choice.insert(h.clone(), reads[rng.gen_range(0..reads.len())]);
                }
            }
            examined += 1;
            if let Ok((s, mems)) = map_speed(w, k, model, &choice) {
                start = Some((choice, s, mems));
                break;
            }
        }
        let Some((mut choice, mut speed, mut mems)) = start else { continue };
        loop {
            let mut improved: Option<(f64, CandidateState, usize)> = None;
            for h in &mems {
                let current = choice[h];
                for j in legal_reads(h, k) {
                    if j == current {
                        continue;
                    }
                    choice.insert(h.clone(), j);
                    examined += 1;
                    if let Ok((s, _)) = map_speed(w, k, model, &choice) {
                        let bar = improved.as_ref().map_or(speed, |b| b.0);
                        if s > bar + TIE {
                            improved = Some((s, h.clone(), j));
                        }
                    }
                }
                choice.insert(h.clone(), current);
            }
            match improved {
                Some((s, h, j)) => {
                    choice.insert(h, j);
                    speed = s;
                    mems = map_speed(w, k, model, &choice)?.1;
                }
                None => break,
            }
        }
        if best.as_ref().map_or(true, |b| speed > b.0 + TIE) {
            best = Some((speed, choice));
        }
    }
    let Some((_, choice)) = best else {
        return Err(Error::Domain(format!("no feasible assembly found in {} random draws", examined)));
    };
    let provenance = Provenance {
        w: w.to_string(),
        k,
        model: model.spec(),
        strategy: Strategy::HillClimb,
        shift_policy: ShiftPolicy::Maximal,
        seed: Some(config.seed),
        assemblies_examined: examined,
        speed: 0.0,
    };
    finish(w, k, model, &choice, provenance)
}

pub fn optimize(w: &Pattern, k: usize, model: &IidModel, config: &SearchConfig) -> Result<Optimum> {
    match config.strategy {
        Strategy::Exhaustive => optimize_exhaustive(w, k, model, config.assembly_cap),
        Strategy::HillClimb => optimize_hill_climb(w, k, model, config),
    }
}
