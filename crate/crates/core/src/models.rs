//! Random text models: iid, order-n Markov and hidden Markov models.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol, Text};
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Input(format!("{what}: probabilities must be finite and non-negative")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::Input(format!("{what}: probabilities sum to {s}, not 1")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct IidModel {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl IidModel {
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::Input("one probability per symbol is required".into()));
        }
        check_distribution(&probs, "iid model")?;
        Ok(IidModel { alphabet, probs })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        IidModel { alphabet, probs: vec![1.0 / n as f64; n] }
    }

    /// iid model over {a, b} with P(a) = `p_a`.
    pub fn binary(p_a: f64) -> Result<Self> {
        Self::new(Alphabet::binary(), vec![p_a, 1.0 - p_a])
    }

    /// Parses `a=0.25,b=0.75`; unlisted symbols share the remaining mass.
    pub fn parse(alphabet: Alphabet, spec: &str) -> Result<Self> {
        let mut probs: Vec<Option<f64>> = vec![None; alphabet.len()];
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (sym, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected symbol=probability, got '{part}'")))?;
            let mut chars = sym.trim().chars();
            let c = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(Error::Input(format!("'{sym}' is not a single symbol"))),
            };
            let x = alphabet
                .symbol(c)
                .ok_or_else(|| Error::Input(format!("symbol '{c}' is not in alphabet \"{alphabet}\"")))?;
            let v: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("'{val}' is not a probability")))?;
            if probs[x as usize].replace(v).is_some() {
                return Err(Error::Input(format!("symbol '{c}' listed twice")));
            }
        }
        let listed: f64 = probs.iter().flatten().sum();
        let missing = probs.iter().filter(|p| p.is_none()).count();
        let rest = if missing > 0 { (1.0 - listed) / missing as f64 } else { 0.0 };
        if missing > 0 && rest < -SUM_TOL {
            return Err(Error::Input(format!("listed probabilities sum to {listed} > 1")));
        }
        let probs = probs.into_iter().map(|p| p.unwrap_or(rest.max(0.0))).collect();
        Self::new(alphabet, probs)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: Symbol) -> f64 {
        self.probs[x as usize]
    }

    pub fn spec(&self) -> String {
        let parts: Vec<String> = self
            .alphabet
            .symbols()
            .map(|x| format!("{}={}", self.alphabet.char_of(x), self.probs[x as usize]))
            .collect();
        format!("iid:{}", parts.join(","))
    }

    /// The same model as a one-state hidden Markov model.
    pub fn to_hmm(&self) -> Hmm {
        Hmm {
            alphabet: self.alphabet.clone(),
            initial: vec![1.0],
            trans: vec![vec![1.0]],
            emit: vec![self.probs.clone()],
        }
    }
}

/// Relative symbol frequencies of a text.
pub fn fit_iid(alphabet: &Alphabet, t: &[Symbol]) -> Result<IidModel> {
    if t.is_empty() {
        return Err(Error::Input("cannot fit a model on an empty text".into()));
    }
    let mut counts = vec![0usize; alphabet.len()];
    for &x in t {
        *counts
            .get_mut(x as usize)
            .ok_or_else(|| Error::Input("text symbol outside the alphabet".into()))? += 1;
    }
    let n = t.len() as f64;
    let mut probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    // Push rounding residue onto the most frequent symbol so the sum is exact.
    let s: f64 = probs.iter().sum();
    let top = (0..probs.len()).max_by(|&i, &j| probs[i].total_cmp(&probs[j])).unwrap_or(0);
    probs[top] += 1.0 - s;
    IidModel::new(alphabet.clone(), probs)
}

/// Markov model of order n: an initial distribution over words of length n
/// and, for each such word, a distribution of the following symbol. Words
/// are indexed in base |A| with the first symbol most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovModel {
    alphabet: Alphabet,
    order: usize,
    initial: Vec<f64>,
    trans: Vec<Vec<f64>>,
}

impl MarkovModel {
    pub fn new(alphabet: Alphabet, order: usize, initial: Vec<f64>, trans: Vec<Vec<f64>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Input("Markov order must be at least 1".into()));
        }
        let words = alphabet
            .len()
            .checked_pow(order as u32)
            .filter(|&w| w <= 1 << 20)
            .ok_or_else(|| Error::Input("Markov order too large".into()))?;
        if initial.len() != words || trans.len() != words {
            return Err(Error::Input(format!("expected {words} contexts")));
        }
        check_distribution(&initial, "Markov initial distribution")?;
        for (u, row) in trans.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::Input(format!("context {u}: one probability per symbol is required")));
            }
            check_distribution(row, "Markov transition row")?;
        }
        Ok(MarkovModel { alphabet, order, initial, trans })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn words(&self) -> usize {
        self.initial.len()
    }

    pub fn word_index(&self, u: &[Symbol]) -> usize {
        u.iter().fold(0, |acc, &x| acc * self.alphabet.len() + x as usize)
    }

    pub fn word(&self, mut i: usize) -> Vec<Symbol> {
        let a = self.alphabet.len();
        let mut u = vec![0; self.order];
        for k in (0..self.order).rev() {
            u[k] = (i % a) as Symbol;
            i /= a;
        }
        u
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn trans(&self, u: usize, x: Symbol) -> f64 {
        self.trans[u][x as usize]
    }

    pub fn probability(&self, t: &[Symbol]) -> f64 {
        let n = self.order;
        if t.len() < n {
            // Marginal of the initial distribution over words starting with t.
            let free = self.alphabet.len().pow((n - t.len()) as u32);
            let base = self.word_index(t) * free;
            return self.initial[base..base + free].iter().sum();
        }
        let mut p = self.initial[self.word_index(&t[..n])];
        for i in n..t.len() {
            p *= self.trans(self.word_index(&t[i - n..i]), t[i]);
        }
        p
    }

    /// Deterministic-emission HMM whose hidden state at position i is the
    /// word `t[i..i+n]`, emitting its first symbol.
    pub fn to_hmm(&self) -> Hmm {
        let a = self.alphabet.len();
        let words = self.words();
        let mut trans = vec![vec![0.0; words]; words];
        let mut emit = vec![vec![0.0; a]; words];
        for u in 0..words {
            let w = self.word(u);
            emit[u][w[0] as usize] = 1.0;
            for x in 0..a {
                let v = (u * a + x) % words;
                trans[u][v] += self.trans[u][x];
            }
        }
        Hmm { alphabet: self.alphabet.clone(), initial: self.initial.clone(), trans, emit }
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Text {
        let mut t = Vec::with_capacity(n.max(self.order));
        let init = WeightedIndex::new(&self.initial).expect("initial distribution is valid");
        t.extend(self.word(init.sample(rng)));
        let rows: Vec<Option<WeightedIndex<f64>>> =
            self.trans.iter().map(|r| WeightedIndex::new(r).ok()).collect();
        let a = self.alphabet.len();
        let words = self.words();
        let mut u = self.word_index(&t);
        while t.len() < n {
            let x = rows[u].as_ref().expect("transition rows are valid").sample(rng);
            t.push(x as Symbol);
            u = (u * a + x) % words;
        }
        t.truncate(n);
        t
    }
}

/// Hidden Markov model with dense transition and emission matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Hmm {
    alphabet: Alphabet,
    initial: Vec<f64>,
    trans: Vec<Vec<f64>>,
    emit: Vec<Vec<f64>>,
}

impl Hmm {
    pub fn new(alphabet: Alphabet, initial: Vec<f64>, trans: Vec<Vec<f64>>, emit: Vec<Vec<f64>>) -> Result<Self> {
        let k = initial.len();
        if k == 0 || trans.len() != k || emit.len() != k {
            return Err(Error::Input("HMM matrices disagree on the number of hidden states".into()));
        }
        check_distribution(&initial, "HMM initial distribution")?;
        for row in &trans {
            if row.len() != k {
                return Err(Error::Input("HMM transition matrix must be square".into()));
            }
            check_distribution(row, "HMM transition row")?;
        }
        for row in &emit {
            if row.len() != alphabet.len() {
                return Err(Error::Input("HMM emission rows need one entry per symbol".into()));
            }
            check_distribution(row, "HMM emission row")?;
        }
        Ok(Hmm { alphabet, initial, trans, emit })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn hidden_states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn trans(&self) -> &[Vec<f64>] {
        &self.trans
    }

    pub fn emit(&self) -> &[Vec<f64>] {
        &self.emit
    }

    /// The symbol a hidden state emits, when it emits only one.
    pub fn emitted(&self, h: usize) -> Option<Symbol> {
        let mut it = self.emit[h].iter().enumerate().filter(|(_, &p)| p > 0.0);
        match (it.next(), it.next()) {
            (Some((x, _)), None) => Some(x as Symbol),
            _ => None,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        (0..self.hidden_states()).all(|h| self.emitted(h).is_some())
    }

    /// Forward algorithm.
    pub fn probability(&self, t: &[Symbol]) -> f64 {
        if t.is_empty() {
            return 1.0;
        }
        let k = self.hidden_states();
        let mut f: Vec<f64> = (0..k).map(|h| self.initial[h] * self.emit[h][t[0] as usize]).collect();
        for &x in &t[1..] {
            let g: Vec<f64> = (0..k)
                .map(|h2| (0..k).map(|h| f[h] * self.trans[h][h2]).sum::<f64>() * self.emit[h2][x as usize])
                .collect();
            f = g;
        }
        f.iter().sum()
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Text {
        let init = WeightedIndex::new(&self.initial).expect("initial distribution is valid");
        let rows: Vec<WeightedIndex<f64>> =
            self.trans.iter().map(|r| WeightedIndex::new(r).expect("rows are valid")).collect();
        let emits: Vec<WeightedIndex<f64>> =
            self.emit.iter().map(|r| WeightedIndex::new(r).expect("rows are valid")).collect();
        let mut t = Vec::with_capacity(n);
        if n == 0 {
            return t;
        }
        let mut h = init.sample(rng);
        loop {
            t.push(emits[h].sample(rng) as Symbol);
            if t.len() == n {
                return t;
            }
            h = rows[h].sample(rng);
        }
    }
}

/// Splits hidden states by emitted symbol; deterministic inputs are
/// returned unchanged.
pub fn determinize_emission(hmm: &Hmm) -> Hmm {
    if hmm.is_deterministic() {
        return hmm.clone();
    }
    let k = hmm.hidden_states();
    let split: Vec<(usize, usize)> = (0..k)
        .flat_map(|h| (0..hmm.alphabet.len()).filter(move |&x| hmm.emit[h][x] > 0.0).map(move |x| (h, x)))
        .collect();
    let initial = split.iter().map(|&(h, x)| hmm.initial[h] * hmm.emit[h][x]).collect();
    let trans = split
        .iter()
        .map(|&(h, _)| split.iter().map(|&(h2, y)| hmm.trans[h][h2] * hmm.emit[h2][y]).collect())
        .collect();
    let emit = split
        .iter()
        .map(|&(_, x)| {
            let mut row = vec![0.0; hmm.alphabet.len()];
            row[x] = 1.0;
            row
        })
        .collect();
    Hmm { alphabet: hmm.alphabet.clone(), initial, trans, emit }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TextModel {
    Iid(IidModel),
    Markov(MarkovModel),
    Hmm(Hmm),
}

impl TextModel {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            TextModel::Iid(m) => m.alphabet(),
            TextModel::Markov(m) => m.alphabet(),
            TextModel::Hmm(m) => m.alphabet(),
        }
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Text {
        match self {
            TextModel::Iid(m) => {
                let d = WeightedIndex::new(m.probs()).expect("iid model is valid");
                (0..n).map(|_| d.sample(rng) as Symbol).collect()
            }
            TextModel::Markov(m) => m.sample(n, rng),
            TextModel::Hmm(m) => m.sample(n, rng),
        }
    }

    pub fn probability(&self, t: &[Symbol]) -> Result<f64> {
        if t.iter().any(|&x| x as usize >= self.alphabet().len()) {
            return Err(Error::Input("text symbol outside the alphabet".into()));
        }
        Ok(match self {
            TextModel::Iid(m) => t.iter().map(|&x| m.prob(x)).product(),
            TextModel::Markov(m) => m.probability(t),
            TextModel::Hmm(m) => m.probability(t),
        })
    }

    pub fn to_hmm(&self) -> Hmm {
        match self {
            TextModel::Iid(m) => m.to_hmm(),
            TextModel::Markov(m) => m.to_hmm(),
            TextModel::Hmm(m) => m.clone(),
        }
    }
}

pub fn sample_text<R: Rng>(model: &TextModel, n: usize, rng: &mut R) -> Text {
    model.sample(n, rng)
}

pub fn text_probability(model: &TextModel, t: &[Symbol]) -> Result<f64> {
    model.probability(t)
}

/// File format for Markov models; contexts and symbols are strings over the
/// alphabet.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovDoc {
    pub alphabet: String,
    pub order: usize,
    pub initial: BTreeMap<String, f64>,
    pub transitions: BTreeMap<String, BTreeMap<String, f64>>,
}

/// File format for hidden Markov models.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HmmDoc {
    pub alphabet: String,
    pub initial: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
    pub emissions: Vec<BTreeMap<String, f64>>,
}

fn symbol_of(alphabet: &Alphabet, s: &str) -> Result<Symbol> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => alphabet
            .symbol(c)
            .ok_or_else(|| Error::Document(format!("symbol '{c}' not in alphabet"))),
        _ => Err(Error::Document(format!("'{s}' is not a single symbol"))),
    }
}

impl MarkovDoc {
    pub fn to_model(&self) -> Result<MarkovModel> {
        let alphabet = Alphabet::parse(&self.alphabet)?;
        let a = alphabet.len();
        let words = a.checked_pow(self.order as u32).ok_or_else(|| Error::Document("order too large".into()))?;
        let idx = |u: &str| -> Result<usize> {
            let t = alphabet.encode(u)?;
            if t.len() != self.order {
                return Err(Error::Document(format!("context '{u}' must have length {}", self.order)));
            }
            Ok(t.iter().fold(0, |acc, &x| acc * a + x as usize))
        };
        let mut initial = vec![0.0; words];
        for (u, p) in &self.initial {
            initial[idx(u)?] = *p;
        }
        let mut trans = vec![vec![f64::NAN; a]; words];
        for (u, row) in &self.transitions {
            let i = idx(u)?;
            trans[i] = vec![0.0; a];
            for (x, p) in row {
                trans[i][symbol_of(&alphabet, x)? as usize] = *p;
            }
        }
        if trans.iter().any(|r| r.iter().any(|p| p.is_nan())) {
            return Err(Error::Document("every context needs a transition row".into()));
        }
        MarkovModel::new(alphabet, self.order, initial, trans)
    }
}

impl HmmDoc {
    pub fn to_model(&self) -> Result<Hmm> {
        let alphabet = Alphabet::parse(&self.alphabet)?;
        let mut emit = Vec::new();
        for row in &self.emissions {
            let mut r = vec![0.0; alphabet.len()];
            for (x, p) in row {
                r[symbol_of(&alphabet, x)? as usize] = *p;
            }
            emit.push(r);
        }
        Hmm::new(alphabet, self.initial.clone(), self.transitions.clone(), emit)
    }
}
