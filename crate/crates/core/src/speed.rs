//! Asymptotic speed: analytic (iid and hidden Markov text models) and
//! empirical.

use std::collections::{HashMap, VecDeque};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Symbol;
use crate::chain::{Field, StateChain};
use crate::error::{Error, Result};
use crate::expansion::{expand, expanded_is_redundant, ExpandedMachine};
use crate::machine::Machine;
use crate::models::{determinize_emission, Hmm, IidModel, TextModel};
use crate::run::Runner;

/// Per-state memories when the machine is standard.
fn standard_memories(m: &Machine, e: &ExpandedMachine) -> Option<Vec<Option<(usize, Symbol)>>> {
    let mut known: Vec<Option<Option<(usize, Symbol)>>> = vec![None; m.state_count()];
    for q in e.machine.states() {
        let o = e.origin_of[q];
        if known[o].is_some() {
            return None;
        }
        let j = m.next(o);
        known[o] = Some(e.memory_of[q].get(j).map(|x| (j, x)));
    }
    if m.states().any(|q| known[q].is_none()) {
        return None;
    }
    Some(known.into_iter().map(|k| k.flatten()).collect())
}

/// The chain followed by the states of a non-redundant or standard machine
/// on iid text. Fails on other machines and when a transition into the
/// sink can be taken.
pub fn state_chain_iid_with<F: Field>(m: &Machine, probs: &[F]) -> Result<StateChain<F>> {
    let e = expand(m);
    let known_reads = if !expanded_is_redundant(&e) {
        vec![None; m.state_count()]
    } else {
        standard_memories(m, &e).ok_or_else(|| {
            Error::Domain("the state chain needs a standard or non-redundant machine".into())
        })?
    };
    let n = m.len();
    let mut rows = Vec::with_capacity(n);
    let mut shifts = Vec::with_capacity(n);
    for q in m.states() {
        if let Some((_, x)) = known_reads[q] {
            let t = m.transition(q, x);
            if m.is_sink(t.target) {
                return Err(Error::Invalid(format!("state {q} falls into the sink on a known symbol")));
            }
            rows.push(vec![(t.target, F::one())]);
            shifts.push(ratio_from_usize::<F>(t.shift));
            continue;
        }
        let mut row = Vec::new();
        let mut mass = F::zero();
        let mut s = F::zero();
        for x in m.alphabet().symbols() {
            let p = &probs[x as usize];
            if p.is_zero() {
                continue;
            }
            let t = m.transition(q, x);
            if m.is_sink(t.target) {
                return Err(Error::Invalid(format!("state {q} falls into the sink on symbol {x}")));
            }
            row.push((t.target, p.clone()));
            mass = mass.add(p);
            s = s.add(&p.mul(&ratio_from_usize::<F>(t.shift)));
        }
        if mass.is_zero() {
            return Err(Error::Invalid(format!("state {q} has no transition of positive probability")));
        }
        let row = row.into_iter().map(|(t, p)| (t, p.div(&mass))).collect();
        rows.push(row);
        shifts.push(s.div(&mass));
    }
    let mut initial = vec![F::zero(); n];
    initial[m.initial()] = F::one();
    Ok(StateChain::new(initial, rows, shifts))
}

fn ratio_from_usize<F: Field>(k: usize) -> F {
    let mut acc = F::zero();
    let mut base = F::one();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.add(&base);
        }
        base = base.add(&base);
        k >>= 1;
    }
    acc
}

pub fn state_chain_iid(m: &Machine, model: &IidModel) -> Result<StateChain<f64>> {
    check_alphabet(m, model.alphabet())?;
    state_chain_iid_with(m, model.probs())
}

fn check_alphabet(m: &Machine, a: &crate::alphabet::Alphabet) -> Result<()> {
    if m.alphabet() != a {
        return Err(Error::Input(format!(
            "model alphabet \"{a}\" differs from machine alphabet \"{}\"",
            m.alphabet()
        )));
    }
    Ok(())
}

fn speed_iid_with<F: Field>(m: &Machine, probs: &[F]) -> Result<F> {
    let chain = match state_chain_iid_with(m, probs) {
        Ok(c) => c,
        Err(Error::Domain(_)) => state_chain_iid_with(&expand(m).machine, probs)?,
        Err(e) => return Err(e),
    };
    let mut chain = chain;
    chain.decompose()?;
    chain.speed()
}

/// Asymptotic speed under an iid model. Machines that are neither standard
/// nor non-redundant are measured through their full memory expansion.
pub fn asymptotic_speed_iid(m: &Machine, model: &IidModel) -> Result<f64> {
    check_alphabet(m, model.alphabet())?;
    speed_iid_with(m, model.probs())
}

/// Exact rational version of [`asymptotic_speed_iid`].
pub fn asymptotic_speed_iid_exact(m: &Machine, probs: &[BigRational]) -> Result<BigRational> {
    if probs.len() != m.alphabet().len() {
        return Err(Error::Input("one probability per symbol is required".into()));
    }
    speed_iid_with(m, probs)
}

pub const HMM_NODE_CAP: usize = 1_000_000;

/// The chain over (hidden block, machine state) pairs for a text following
/// a deterministic-emission HMM. The block covers the hidden states of the
/// positions p..=p+order(M).
pub fn state_chain_hmm(m: &Machine, hmm: &Hmm, node_cap: usize) -> Result<StateChain<f64>> {
    check_alphabet(m, hmm.alphabet())?;
    if !hmm.is_deterministic() {
        return Err(Error::Domain("the HMM must have deterministic emissions".into()));
    }
    let emitted: Vec<Symbol> = (0..hmm.hidden_states()).map(|h| hmm.emitted(h).unwrap()).collect();
    let len = m.order() + 1;
    let trans = hmm.trans();
    let mut powers = MatrixPowers::new(trans);

    let mut ids: HashMap<(Vec<u32>, usize), usize> = HashMap::new();
    let mut nodes: Vec<(Vec<u32>, usize)> = Vec::new();
    let mut initial = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: (Vec<u32>, usize), nodes: &mut Vec<(Vec<u32>, usize)>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = ids.get(&key) {
            return Ok(i);
        }
        if nodes.len() >= node_cap {
            return Err(Error::Cap(format!("the block chain exceeds {node_cap} nodes")));
        }
        ids.insert(key.clone(), nodes.len());
        nodes.push(key);
        queue.push_back(nodes.len() - 1);
        Ok(nodes.len() - 1)
    };

    let mut starts = Vec::new();
    extend_blocks(trans, &mut Vec::new(), 1.0, len, hmm.initial(), &mut starts);
    for (d, p) in starts {
        let i = intern((d, m.initial()), &mut nodes, &mut queue)?;
        initial.push((i, p));
    }

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut shifts: Vec<f64> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let (d, q) = nodes[i].clone();
        let x = emitted[d[m.next(q)] as usize];
        let t = m.transition(q, x);
        if m.is_sink(t.target) {
            return Err(Error::Invalid(format!("state {q} falls into the sink on symbol {x}")));
        }
        let s = t.shift;
        let mut row = Vec::new();
        if s == 0 {
            row.push((intern((d.clone(), t.target), &mut nodes, &mut queue)?, 1.0));
        } else {
            let mut blocks = Vec::new();
            if s < len {
                let mut prefix = d[s..].to_vec();
                extend_blocks(trans, &mut prefix, 1.0, len, &[], &mut blocks);
            } else {
                let pw = powers.get(s - len + 1);
                let last = *d.last().unwrap() as usize;
                let first: Vec<f64> = pw[last].clone();
                extend_blocks(trans, &mut Vec::new(), 1.0, len, &first, &mut blocks);
            }
            for (d2, p) in blocks {
                row.push((intern((d2, t.target), &mut nodes, &mut queue)?, p));
            }
        }
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
            shifts.resize(i + 1, 0.0);
        }
        rows[i] = row;
        shifts[i] = s as f64;
    }
    let n = nodes.len();
    rows.resize(n, Vec::new());
    shifts.resize(n, 0.0);
    let mut init = vec![0.0; n];
    for (i, p) in initial {
        init[i] += p;
    }
    Ok(StateChain::new(init, rows, shifts))
}

/// Completes `prefix` to blocks of length `len` along positive hidden
/// transitions. An empty prefix starts from the distribution `first`.
fn extend_blocks(
    trans: &[Vec<f64>],
    prefix: &mut Vec<u32>,
    p: f64,
    len: usize,
    first: &[f64],
    out: &mut Vec<(Vec<u32>, f64)>,
) {
    if prefix.len() == len {
        out.push((prefix.clone(), p));
        return;
    }
    match prefix.last() {
        None => {
            for (h, &ph) in first.iter().enumerate() {
                if ph > 0.0 {
                    prefix.push(h as u32);
                    extend_blocks(trans, prefix, p * ph, len, first, out);
                    prefix.pop();
                }
            }
        }
        Some(&last) => {
            for (h, &ph) in trans[last as usize].iter().enumerate() {
                if ph > 0.0 {
                    prefix.push(h as u32);
                    extend_blocks(trans, prefix, p * ph, len, first, out);
                    prefix.pop();
                }
            }
        }
    }
}

/// Powers of the hidden transition matrix by repeated squaring.
struct MatrixPowers {
    base: Vec<Vec<f64>>,
    cache: HashMap<usize, Vec<Vec<f64>>>,
}

impl MatrixPowers {
    fn new(base: &[Vec<f64>]) -> Self {
        MatrixPowers { base: base.to_vec(), cache: HashMap::new() }
    }

    fn get(&mut self, e: usize) -> &Vec<Vec<f64>> {
        if !self.cache.contains_key(&e) {
            let k = self.base.len();
            let mut result: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
            let mut sq = self.base.clone();
            let mut n = e;
            while n > 0 {
                if n & 1 == 1 {
                    result = matmul(&result, &sq);
                }
                sq = matmul(&sq, &sq);
                n >>= 1;
            }
            self.cache.insert(e, result);
        }
        &self.cache[&e]
    }
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = a.len();
    let mut c = vec![vec![0.0; k]; k];
    for i in 0..k {
        for l in 0..k {
            if a[i][l] == 0.0 {
                continue;
            }
            for j in 0..k {
                c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    c
}

/// Asymptotic speed when the text follows a hidden Markov model; the model
/// is made deterministic first.
pub fn asymptotic_speed_hmm(m: &Machine, hmm: &Hmm) -> Result<f64> {
    let det = determinize_emission(hmm);
    let mut chain = state_chain_hmm(m, &det, HMM_NODE_CAP)?;
    chain.decompose()?;
    chain.speed()
}

/// Dispatches on the model: iid models use the state chain directly, the
/// others go through their hidden Markov form.
pub fn asymptotic_speed(m: &Machine, model: &TextModel) -> Result<f64> {
    match model {
        TextModel::Iid(iid) => asymptotic_speed_iid(m, iid),
        other => asymptotic_speed_hmm(m, &other.to_hmm()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalSpeed {
    pub mean: f64,
    pub std_error: f64,
    pub reps: usize,
}

/// Mean and standard error of a list of per-text speeds.
pub fn summarize(samples: &[f64]) -> EmpiricalSpeed {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    EmpiricalSpeed { mean, std_error: (var / n as f64).sqrt(), reps: n }
}

/// |t| / tac on one text. Fails when the run hits the iteration cap or when
/// no access happens.
pub fn speed_on_text(runner: &Runner, text: &[Symbol]) -> Result<f64> {
    let s = runner.count(text, runner.default_cap(text.len()));
    if s.truncated {
        return Err(Error::Invalid("run truncated by the iteration cap".into()));
    }
    if s.tac == 0 {
        return Err(Error::Input("text too short: no access performed".into()));
    }
    Ok(text.len() as f64 / s.tac as f64)
}

/// Seed of each repetition, derived from the master seed.
pub fn repetition_seeds(seed: u64, reps: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..reps).map(|_| rng.gen()).collect()
}

pub fn empirical_speed(m: &Machine, model: &TextModel, text_len: usize, reps: usize, seed: u64) -> Result<EmpiricalSpeed> {
    check_alphabet(m, model.alphabet())?;
    if reps == 0 {
        return Err(Error::Input("at least one repetition is required".into()));
    }
    if text_len < m.pattern().len() {
        return Err(Error::Input("texts must be at least as long as the pattern".into()));
    }
    let runner = Runner::new(m);
    let mut samples = Vec::with_capacity(reps);
    for s in repetition_seeds(seed, reps) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let t = model.sample(text_len, &mut rng);
        samples.push(speed_on_text(&runner, &t)?);
    }
    Ok(summarize(&samples))
}

/// Speed on one given text, for real data.
pub fn empirical_speed_text(m: &Machine, text: &[Symbol]) -> Result<f64> {
    if text.iter().any(|&x| x as usize >= m.alphabet().len()) {
        return Err(Error::Input("text symbol outside the alphabet".into()));
    }
    speed_on_text(&Runner::new(m), text)
}
