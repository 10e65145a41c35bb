//! Speed tables: one row per pattern, one column per classic algorithm,
//! plus an optional column for the optimal machine of a given order.

use std::fmt::Write;

use crate::alphabet::Pattern;
use crate::classic::{build_classic, Algorithm};
use crate::compact::standardize;
use crate::error::{Error, Result};
use crate::models::IidModel;
use crate::optimizer::{optimize_exhaustive, optimize_hill_climb, SearchConfig, Strategy};
use crate::reduction::canonicalize;
use crate::speed::asymptotic_speed_iid;

#[derive(Clone, Debug)]
pub struct TableSpec {
    pub patterns: Vec<Pattern>,
    pub algorithms: Vec<Algorithm>,
    pub model: IidModel,
    /// Order of the optimal column, if wanted.
    pub optimal: Option<usize>,
    pub search: SearchConfig,
}

impl TableSpec {
    pub fn check(&self) -> Result<()> {
        if self.patterns.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Input("a table needs at least one pattern and one algorithm".into()));
        }
        if let Some(w) = self.patterns.iter().find(|w| w.alphabet() != self.model.alphabet()) {
            return Err(Error::Input(format!("pattern \"{w}\" is not over the model alphabet")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub speed: f64,
    /// The canonical form was not available and the standardized machine
    /// was measured instead.
    pub fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalCell {
    pub speed: f64,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub pattern: Pattern,
    pub cells: Vec<Cell>,
    pub optimal: Option<OptimalCell>,
}

/// Speed of the canonical form of a classic machine, or of its
/// standardized form when canonicalization is not possible.
pub fn classic_cell(alg: Algorithm, w: &Pattern, model: &IidModel) -> Result<Cell> {
    let m = build_classic(alg, w);
    match canonicalize(&m, model) {
        Ok(c) => Ok(Cell { speed: asymptotic_speed_iid(&c, model)?, fallback: false }),
        Err(Error::Domain(_)) => Ok(Cell { speed: asymptotic_speed_iid(&standardize(&m), model)?, fallback: true }),
        Err(e) => Err(e),
    }
}

/// Exhaustive search when it fits in the cap, hill climbing otherwise.
pub fn optimal_cell(w: &Pattern, k: usize, model: &IidModel, search: &SearchConfig) -> Result<OptimalCell> {
    match optimize_exhaustive(w, k, model, search.assembly_cap) {
        Ok(o) => Ok(OptimalCell { speed: o.speed, strategy: Strategy::Exhaustive }),
        Err(Error::Cap(_)) => {
            let o = optimize_hill_climb(w, k, model, search)?;
            Ok(OptimalCell { speed: o.speed, strategy: Strategy::HillClimb })
        }
        Err(e) => Err(e),
    }
}

pub fn table_row(spec: &TableSpec, w: &Pattern) -> Result<TableRow> {
    let cells = spec
        .algorithms
        .iter()
        .map(|&alg| classic_cell(alg, w, &spec.model))
        .collect::<Result<Vec<_>>>()?;
    let optimal = spec.optimal.map(|k| optimal_cell(w, k, &spec.model, &spec.search)).transpose()?;
    Ok(TableRow { pattern: w.clone(), cells, optimal })
}

pub fn speed_table(spec: &TableSpec) -> Result<Vec<TableRow>> {
    spec.check()?;
    spec.patterns.iter().map(|w| table_row(spec, w)).collect()
}

/// Tab-separated table. Each line of `comment` becomes a `#` header line;
/// cells measured on a standardized machine carry a `*`, optimal cells
/// found by hill climbing a `~`.
pub fn to_tsv(spec: &TableSpec, rows: &[TableRow], comment: &str) -> String {
    let mut out = String::new();
    for line in comment.lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# model {}", spec.model.spec());
    if rows.iter().any(|r| r.cells.iter().any(|c| c.fallback)) {
        let _ = writeln!(out, "# * no canonical form; speed of the standardized machine");
    }
    if rows.iter().any(|r| matches!(r.optimal, Some(o) if o.strategy == Strategy::HillClimb)) {
        let _ = writeln!(out, "# ~ optimal column found by hill climbing");
    }
    out.push_str("pattern");
    for alg in &spec.algorithms {
        let _ = write!(out, "\t{}", alg.name());
    }
    if let Some(k) = spec.optimal {
        let _ = write!(out, "\toptimal_k{k}");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&r.pattern.to_string());
        for c in &r.cells {
            let _ = write!(out, "\t{:.4}{}", c.speed, if c.fallback { "*" } else { "" });
        }
        if let Some(o) = r.optimal {
            let mark = if o.strategy == Strategy::HillClimb { "~" } else { "" };
            let _ = write!(out, "\t{:.4}{mark}", o.speed);
        }
        out.push('\n');
    }
    out
}
