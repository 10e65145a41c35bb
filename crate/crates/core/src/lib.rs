//! w-matching machines: finite-state pattern matchers driven by a generic
//! search loop, their transformations, validity checks and asymptotic speed
//! under iid, Markov and hidden Markov text models.

pub mod alphabet;
pub mod chain;
pub mod classic;
pub mod compact;
pub mod error;
pub mod expansion;
pub mod ingest;
pub mod machine;
pub mod models;
pub mod optimizer;
pub mod reduction;
pub mod run;
pub mod serialize;
pub mod speed;
pub mod table;
pub mod validate;

pub use alphabet::{Alphabet, Pattern, Symbol, Text};
pub use classic::{build_classic, Algorithm};
pub use compact::{compact, is_compact, redirect, standardize};
pub use error::{Error, Result};
pub use expansion::{check_validity_standard, expand, is_redundant, is_standard, ExpandedMachine, MemoryState, Validity, Violation};
pub use machine::{build_naive, Draft, DraftState, Machine, StateId, Transition};
pub use models::{fit_iid, Hmm, IidModel, MarkovModel, TextModel};
pub use optimizer::{optimize, optimize_exhaustive, optimize_hill_climb, Optimum, Provenance, SearchConfig, Strategy};
pub use reduction::{canonicalize, compute_mnshft, positify, ShiftProfile};
pub use run::{run, run_generic, ExecutionTrace, Runner};
pub use speed::{asymptotic_speed, asymptotic_speed_hmm, asymptotic_speed_iid, empirical_speed, EmpiricalSpeed};
pub use table::{speed_table, to_tsv, Cell, OptimalCell, TableRow, TableSpec};
pub use validate::{validate_bruteforce, BruteVerdict};
