//! Machines reproducing the access sequences of classic search algorithms.
//!
//! Each algorithm is described by its own state variables; the machine is the
//! set of values reachable from the initial one.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::str::FromStr;

use crate::alphabet::{Pattern, Symbol};
use crate::error::{Error, Result};
use crate::machine::{build_naive, Draft, DraftState, Machine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Naive,
    MorrisPratt,
    KnuthMorrisPratt,
    Horspool,
    Quicksearch,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Naive,
        Algorithm::MorrisPratt,
        Algorithm::KnuthMorrisPratt,
        Algorithm::Horspool,
        Algorithm::Quicksearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::MorrisPratt => "morris_pratt",
            Algorithm::KnuthMorrisPratt => "knuth_morris_pratt",
            Algorithm::Horspool => "horspool",
            Algorithm::Quicksearch => "quicksearch",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::MorrisPratt => "mp",
            Algorithm::KnuthMorrisPratt => "kmp",
            Algorithm::Horspool => "horspool",
            Algorithm::Quicksearch => "quicksearch",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "naive" => Ok(Algorithm::Naive),
            "mp" | "morris_pratt" => Ok(Algorithm::MorrisPratt),
            "kmp" | "knuth_morris_pratt" => Ok(Algorithm::KnuthMorrisPratt),
            "horspool" | "bmh" => Ok(Algorithm::Horspool),
            "quicksearch" | "qs" | "quick_search" => Ok(Algorithm::Quicksearch),
            _ => Err(Error::Input(format!("unknown algorithm '{s}'"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn build_classic(alg: Algorithm, w: &Pattern) -> Machine {
    match alg {
        Algorithm::Naive => build_naive(w),
        Algorithm::MorrisPratt => materialize(w, &Failure::new(w, mp_table(w.symbols()))),
        Algorithm::KnuthMorrisPratt => materialize(w, &Failure::new(w, kmp_table(w.symbols()))),
        Algorithm::Horspool => materialize(w, &Horspool::new(w)),
        Algorithm::Quicksearch => materialize(w, &Quicksearch::new(w)),
    }
}

/// State variables of an algorithm, as a step function.
trait Scheme {
    type S: Clone + Eq + Hash;
    fn initial(&self) -> Self::S;
    fn next(&self, s: &Self::S) -> usize;
    fn prematch(&self, s: &Self::S) -> bool;
    fn step(&self, s: &Self::S, x: Symbol) -> (Self::S, usize);
}

fn materialize<C: Scheme>(w: &Pattern, scheme: &C) -> Machine {
    let a = w.alphabet().len() as Symbol;
    let mut ids: HashMap<C::S, usize> = HashMap::new();
    let mut values = vec![scheme.initial()];
    ids.insert(scheme.initial(), 0);
    let mut states = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = values[i].clone();
        let mut out = Vec::with_capacity(a as usize);
        for x in 0..a {
            let (t, shift) = scheme.step(&s, x);
            let id = *ids.entry(t.clone()).or_insert_with(|| {
                values.push(t);
                queue.push_back(values.len() - 1);
                values.len() - 1
            });
            out.push((Some(id), shift));
        }
        states.push(DraftState { next: scheme.next(&s), prematch: scheme.prematch(&s), out });
    }
    Draft { pattern: w.clone(), states, initial: 0 }
        .finish_unpruned()
        .expect("classic machine is well-formed")
}

/// Border table: `t[i]` is the length of the longest proper border of
/// `w[..i]`, with `t[0] = -1`.
pub fn mp_table(w: &[Symbol]) -> Vec<isize> {
    let m = w.len();
    let mut t = vec![0isize; m + 1];
    t[0] = -1;
    let mut j: isize = -1;
    for i in 0..m {
        while j > -1 && w[i] != w[j as usize] {
            j = t[j as usize];
        }
        j += 1;
        t[i + 1] = j;
    }
    t
}

/// Strong border table: borders whose following symbol differs.
pub fn kmp_table(w: &[Symbol]) -> Vec<isize> {
    let m = w.len();
    let mut t = vec![0isize; m + 1];
    t[0] = -1;
    let mut j: isize = -1;
    let mut i = 0;
    while i < m {
        while j > -1 && w[i] != w[j as usize] {
            j = t[j as usize];
        }
        i += 1;
        j += 1;
        t[i] = if i < m && w[i] == w[j as usize] { t[j as usize] } else { j };
    }
    t
}

/// Morris-Pratt and Knuth-Morris-Pratt: the state is the number of
/// symbols of the window already matched.
struct Failure {
    w: Vec<Symbol>,
    table: Vec<isize>,
}

impl Failure {
    fn new(w: &Pattern, table: Vec<isize>) -> Self {
        Failure { w: w.symbols().to_vec(), table }
    }
}

impl Scheme for Failure {
    type S = usize;

    fn initial(&self) -> usize {
        0
    }

    fn next(&self, &i: &usize) -> usize {
        i
    }

    fn prematch(&self, &i: &usize) -> bool {
        i == self.w.len() - 1
    }

    fn step(&self, &i: &usize, x: Symbol) -> (usize, usize) {
        let m = self.w.len();
        if x == self.w[i] {
            if i + 1 < m {
                return (i + 1, 0);
            }
            let b = self.table[m] as usize;
            return (b, m - b);
        }
        match self.table[i] {
            -1 => (0, i + 1),
            b => (b as usize, i - b as usize),
        }
    }
}

/// Horspool: the last window symbol is compared first, then the rest from
/// right to left. The state is the number of symbols matched so far.
struct Horspool {
    w: Vec<Symbol>,
    bm_bc: Vec<usize>,
}

impl Horspool {
    fn new(w: &Pattern) -> Self {
        let m = w.len();
        let mut bm_bc = vec![m; w.alphabet().len()];
        for i in 0..m - 1 {
            bm_bc[w.at(i) as usize] = m - 1 - i;
        }
        Horspool { w: w.symbols().to_vec(), bm_bc }
    }
}

impl Scheme for Horspool {
    type S = usize;

    fn initial(&self) -> usize {
        0
    }

    fn next(&self, &i: &usize) -> usize {
        self.w.len() - 1 - i
    }

    fn prematch(&self, &i: &usize) -> bool {
        i == self.w.len() - 1
    }

    fn step(&self, &i: &usize, x: Symbol) -> (usize, usize) {
        let m = self.w.len();
        if i + 1 < m && x == self.w[m - 1 - i] {
            return (i + 1, 0);
        }
        let last = if i == 0 { x } else { self.w[m - 1] };
        (0, self.bm_bc[last as usize])
    }
}

/// Quicksearch: phases `0..m` compare the window left to right, phase `m`
/// peeks at the symbol following the window to pick the shift.
struct Quicksearch {
    w: Vec<Symbol>,
    qs_bc: Vec<usize>,
}

impl Quicksearch {
    fn new(w: &Pattern) -> Self {
        let m = w.len();
        let mut qs_bc = vec![m + 1; w.alphabet().len()];
        for i in 0..m {
            qs_bc[w.at(i) as usize] = m - i;
        }
        Quicksearch { w: w.symbols().to_vec(), qs_bc }
    }
}

impl Scheme for Quicksearch {
    type S = usize;

    fn initial(&self) -> usize {
        0
    }

    fn next(&self, &i: &usize) -> usize {
        i
    }

    fn prematch(&self, &i: &usize) -> bool {
        i == self.w.len() - 1
    }

    fn step(&self, &i: &usize, x: Symbol) -> (usize, usize) {
        let m = self.w.len();
        if i == m {
            return (0, self.qs_bc[x as usize]);
        }
        if i + 1 < m && x == self.w[i] {
            (i + 1, 0)
        } else {
            (m, 0)
        }
    }
}
