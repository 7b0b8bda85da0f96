use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{a12_fullrank, build_matrix, generic_rank, mix, RowLabel, SymbolicMatrix};
use super::{AugmentedSystem, CandidateBasis, SearchConfig};
use crate::error::{Error, Result};
use crate::poly::Monomial;

/// One accepted removal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReductionStep {
    /// Column pruning triggered by `tested`.
    Columns {
        tested: Monomial,
        cols: Vec<Monomial>,
        rows: Vec<RowLabel>,
    },
    /// A single excess row.
    Row { row: RowLabel },
}

/// Audit log of a reduction; replaying it on the unreduced candidate
/// reproduces the reduced one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub removed_cols: Vec<Monomial>,
    pub removed_rows: Vec<RowLabel>,
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn push(&mut self, step: ReductionStep) {
        match &step {
            ReductionStep::Columns { cols, rows, .. } => {
                self.removed_cols.extend(cols.iter().cloned());
                self.removed_rows.extend(rows.iter().cloned());
            }
            ReductionStep::Row { row } => self.removed_rows.push(row.clone()),
        }
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: ReductionTrace) {
        for s in other.steps {
            self.push(s);
        }
    }

    /// Apply every step to `cand` in order.
    pub fn replay(&self, cand: &CandidateBasis) -> Result<CandidateBasis> {
        let mut cur = cand.clone();
        for step in &self.steps {
            let (cols, rows): (Vec<Monomial>, Vec<RowLabel>) = match step {
                ReductionStep::Columns { cols, rows, .. } => (cols.clone(), rows.clone()),
                ReductionStep::Row { row } => (vec![], vec![row.clone()]),
            };
            for c in &cols {
                if !cur.basis.contains(c) {
                    return Err(Error::InvariantViolation(format!("replay: column {c} absent")));
                }
            }
            for r in &rows {
                if !cur.multipliers.get(r.poly).is_some_and(|t| t.contains(&r.multiplier)) {
                    return Err(Error::InvariantViolation(format!(
                        "replay: row ({}, {}) absent",
                        r.poly, r.multiplier
                    )));
                }
            }
            cur = remove(&cur, &cols, &rows);
        }
        Ok(cur)
    }
}

fn remove(cand: &CandidateBasis, cols: &[Monomial], rows: &[RowLabel]) -> CandidateBasis {
    let cols: BTreeSet<&Monomial> = cols.iter().collect();
    let basis: Vec<Monomial> = cand.basis.iter().filter(|b| !cols.contains(b)).cloned().collect();
    let multipliers = cand
        .multipliers
        .iter()
        .enumerate()
        .map(|(j, tj)| {
            tj.iter()
                .filter(|t| {
                    !rows
                        .iter()
                        .any(|r| r.poly == j && &r.multiplier == *t)
                })
                .cloned()
                .collect()
        })
        .collect();
    CandidateBasis::new(cand.hidden_var, basis, multipliers, cand.formulation)
}

/// The three pruning conditions: nonempty `T_j`, `rows ≥ cols` with full
/// generic rank, and the block decomposition with `A12` of full column
/// rank. Returns the matrix when they hold.
fn admissible(cand: &CandidateBasis, aug: &AugmentedSystem, cfg: &SearchConfig) -> Option<SymbolicMatrix> {
    if cand.basis.is_empty() || cand.multipliers.iter().any(Vec::is_empty) {
        return None;
    }
    if cand.n_rows() < cand.n_cols() {
        return None;
    }
    let mat = build_matrix(cand, aug).ok()?;
    if generic_rank(&mat, cfg) != cand.n_cols() {
        return None;
    }
    mat.check_block_structure(cand.formulation).ok()?;
    if !a12_fullrank(cand, &mat, cfg) {
        return None;
    }
    Some(mat)
}

/// Assert the pruning conditions on a candidate.
pub fn check_conditions(cand: &CandidateBasis, aug: &AugmentedSystem, cfg: &SearchConfig) -> Result<SymbolicMatrix> {
    cand.check_invariants()?;
    admissible(cand, aug, cfg)
        .ok_or_else(|| Error::InvariantViolation("rank, block structure or A12 condition fails".into()))
}

/// Column pruning. Columns are tested in seeded random order; testing `c`
/// removes the rows touching `c` and every column appearing in them, plus
/// any remaining row that would reference a removed column. The removal
/// sticks when the pruning conditions still hold, and the scan then
/// restarts with a fresh order. Stops after a pass without removals.
pub fn reduce_columns(
    cand: &CandidateBasis,
    aug: &AugmentedSystem,
    cfg: &SearchConfig,
) -> Result<(CandidateBasis, SymbolicMatrix, ReductionTrace)> {
    let mut cur = cand.clone();
    let mut mat = check_conditions(&cur, aug, cfg)?;
    let mut trace = ReductionTrace::default();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0xC011));
    'scan: loop {
        let mut order: Vec<usize> = (0..mat.n_cols()).collect();
        order.shuffle(&mut rng);
        for c in order {
            let touching = mat.rows_touching(c);
            let mut cols: BTreeSet<usize> = BTreeSet::from([c]);
            for &r in &touching {
                cols.extend(mat.entries[r].iter().map(|(k, _)| *k));
            }
            let dropped: Vec<usize> = (0..mat.n_rows())
                .filter(|&r| mat.entries[r].iter().any(|(k, _)| cols.contains(k)))
                .collect();
            let col_labels: Vec<Monomial> = cols.iter().map(|&k| mat.cols[k].clone()).collect();
            let row_labels: Vec<RowLabel> = dropped.iter().map(|&r| mat.rows[r].clone()).collect();
            let next = remove(&cur, &col_labels, &row_labels);
            if let Some(next_mat) = admissible(&next, aug, cfg) {
                trace.push(ReductionStep::Columns {
                    tested: mat.cols[c].clone(),
                    cols: col_labels,
                    rows: row_labels,
                });
                cur = next;
                mat = next_mat;
                continue 'scan;
            }
        }
        break;
    }
    Ok((cur, mat, trace))
}

/// Excess-row removal until the matrix is square. Untried rows of the
/// `x_i − λ` block go first in seeded random order; after that a random
/// untried upper row. A removal sticks when every `T_j` stays nonempty,
/// the generic rank stays full and `A12` keeps full column rank.
pub fn remove_excess_rows(
    cand: &CandidateBasis,
    aug: &AugmentedSystem,
    cfg: &SearchConfig,
) -> Result<(CandidateBasis, SymbolicMatrix, ReductionTrace)> {
    let mut cur = cand.clone();
    let mut mat = check_conditions(&cur, aug, cfg)?;
    let mut trace = ReductionTrace::default();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0x5A3E));
    let lam = aug.lambda_index();
    let mut tried: BTreeSet<RowLabel> = BTreeSet::new();
    while cur.n_rows() > cur.n_cols() {
        let untried = |j_filter: &dyn Fn(usize) -> bool, tried: &BTreeSet<RowLabel>| -> Vec<RowLabel> {
            mat.rows
                .iter()
                .filter(|r| j_filter(r.poly) && !tried.contains(*r))
                .cloned()
                .collect()
        };
        let mut pool = untried(&|j| j == lam, &tried);
        if pool.is_empty() {
            pool = untried(&|j| j != lam, &tried);
        }
        let Some(row) = pool.choose(&mut rng).cloned() else {
            return Err(Error::CannotSquare(format!(
                "{} rows for {} columns and no removable row left",
                cur.n_rows(),
                cur.n_cols()
            )));
        };
        tried.insert(row.clone());
        let next = remove(&cur, &[], std::slice::from_ref(&row));
        if let Some(next_mat) = admissible(&next, aug, cfg) {
            trace.push(ReductionStep::Row { row });
            cur = next;
            mat = next_mat;
        }
    }
    Ok((cur, mat, trace))
}
