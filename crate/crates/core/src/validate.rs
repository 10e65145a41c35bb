//! Bounded brute-force validity check against the occurrence oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{all_texts, Symbol, Text};
use crate::error::{Error, Result};
use crate::machine::Machine;
use crate::run::{occurrences_oracle, run};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteVerdict {
    NoCounterexample,
    Counterexample(Counterexample),
}

impl BruteVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, BruteVerdict::NoCounterexample)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub text: Text,
    pub expected: Vec<usize>,
    pub got: Vec<usize>,
    pub truncated: bool,
}

/// Compares the machine with the oracle on one text. Every report must be an
/// occurrence, and every occurrence before the position where the machine
/// ran off the end of the text must be reported; later ones could still be
/// found on a longer text.
pub fn check_text(m: &Machine, text: &[Symbol]) -> Result<Option<Counterexample>> {
    let tr = run(m, text)?;
    let limit = tr.stopped_at.unwrap_or(usize::MAX);
    let all = occurrences_oracle(m.pattern(), text);
    let sound = tr.occurrences.windows(2).all(|p| p[0] < p[1])
        && tr.occurrences.iter().all(|p| all.binary_search(p).is_ok());
    let complete = all.iter().filter(|&&i| i < limit).all(|p| tr.occurrences.binary_search(p).is_ok());
    if tr.truncated || !sound || !complete {
        let expected = all.into_iter().filter(|&i| i < limit || tr.occurrences.contains(&i)).collect();
        return Ok(Some(Counterexample {
            text: text.to_vec(),
            expected,
            got: tr.occurrences,
            truncated: tr.truncated,
        }));
    }
    Ok(None)
}

pub const ENUMERATION_GUARD: u128 = 10_000_000;

pub fn validate_bruteforce(
    m: &Machine,
    exhaustive_len: usize,
    random_trials: usize,
    random_len: usize,
    seed: u64,
) -> Result<BruteVerdict> {
    let a = m.alphabet().len() as u128;
    let total: u128 = (0..=exhaustive_len as u32)
        .map(|n| a.checked_pow(n).unwrap_or(u128::MAX))
        .fold(0u128, |s, x| s.saturating_add(x));
    if total > ENUMERATION_GUARD {
        return Err(Error::Cap(format!(
            "{total} texts up to length {exhaustive_len} exceed the enumeration guard {ENUMERATION_GUARD}"
        )));
    }
    for n in 0..=exhaustive_len {
        for t in all_texts(a as usize, n) {
            if let Some(c) = check_text(m, &t)? {
                return Ok(BruteVerdict::Counterexample(c));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_trials {
        let t: Text = (0..random_len).map(|_| rng.gen_range(0..a as usize) as Symbol).collect();
        if let Some(c) = check_text(m, &t)? {
            return Ok(BruteVerdict::Counterexample(c));
        }
    }
    Ok(BruteVerdict::NoCounterexample)
}
