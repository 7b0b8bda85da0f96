use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AugmentedSystem, CandidateBasis, Formulation, SearchConfig};
use crate::error::{Error, Result};
use crate::modp;
use crate::poly::{Coefficient, Monomial};

/// Row `t · f_j`: polynomial index (`m` for `x_i − λ`) and multiplier `t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowLabel {
    pub poly: usize,
    pub multiplier: Monomial,
}

/// A symbolic matrix cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entry {
    Slot(usize),
    Const(f64),
    /// `scale · λ`
    Lambda(f64),
}

impl From<Coefficient> for Entry {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::Slot(s) => Entry::Slot(s),
            Coefficient::Const(v) => Entry::Const(v),
        }
    }
}

/// Coefficient matrix `M(λ)` with `M b = 0` at every root.
///
/// Columns are `[vec(B_λ), vec(B_c)]`; rows are the `T_1 … T_m` block
/// followed by the `T_{m+1}` block.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicMatrix {
    pub rows: Vec<RowLabel>,
    pub cols: Vec<Monomial>,
    /// Number of rows coming from `f_1 … f_m`.
    pub n_upper: usize,
    /// `|B_λ|`.
    pub n_lambda: usize,
    /// Row-major sparse entries, sorted by column.
    pub entries: Vec<Vec<(usize, Entry)>>,
}

impl SymbolicMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<Entry> {
        self.entries[row]
            .iter()
            .find(|(c, _)| *c == col)
            .map(|(_, e)| *e)
    }

    /// Rows holding a nonzero in `col`.
    pub fn rows_touching(&self, col: usize) -> Vec<usize> {
        (0..self.n_rows())
            .filter(|&r| self.entries[r].iter().any(|(c, _)| *c == col))
            .collect()
    }

    fn slot_count(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter_map(|(_, e)| match e {
                Entry::Slot(s) => Some(s + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Residues of the submatrix with slots and `λ` substituted.
    fn residues(&self, rows: &[usize], cols: &[usize], slots: &[u64], lambda: u64, p: u64) -> Vec<Vec<u64>> {
        let col_pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        rows.iter()
            .map(|&r| {
                let mut row = vec![0u64; cols.len()];
                for (c, e) in &self.entries[r] {
                    if let Some(&k) = col_pos.get(c) {
                        row[k] = match e {
                            Entry::Slot(s) => slots[*s],
                            Entry::Const(v) => modp::from_f64(*v, p),
                            Entry::Lambda(v) => modp::mul(modp::from_f64(*v, p), lambda, p),
                        };
                    }
                }
                row
            })
            .collect()
    }

    /// Generic rank of a submatrix: maximum over `rank_trials` random
    /// substitutions of nonzero residues for every slot and for `λ`.
    pub fn generic_rank_of(&self, rows: &[usize], cols: &[usize], cfg: &SearchConfig) -> usize {
        let p = cfg.rank_prime;
        let n_slots = self.slot_count();
        let cap = rows.len().min(cols.len());
        let mut best = 0;
        for trial in 0..cfg.rank_trials {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, trial as u64));
            let slots: Vec<u64> = (0..n_slots).map(|_| rng.random_range(1..p)).collect();
            let lambda = rng.random_range(1..p);
            let r = modp::rank(self.residues(rows, cols, &slots, lambda, p), p);
            best = best.max(r);
            if best == cap {
                break;
            }
        }
        best
    }

    /// Check the block shape of `M = M0 + λ M1`:
    /// upper rows are `λ`-free; standard: `B21 = −I`, `B22 = 0`;
    /// alternate: `A21 = I`, `A22 = 0`.
    pub fn check_block_structure(&self, formulation: Formulation) -> Result<(), String> {
        for r in 0..self.n_upper {
            if self.entries[r].iter().any(|(_, e)| matches!(e, Entry::Lambda(_))) {
                return Err(format!("upper row {r} depends on λ"));
            }
        }
        let n_lower = self.n_rows() - self.n_upper;
        if n_lower != self.n_lambda {
            return Err(format!("{n_lower} lower rows for |B_λ| = {}", self.n_lambda));
        }
        for k in 0..n_lower {
            let r = self.n_upper + k;
            for (c, e) in &self.entries[r] {
                match (formulation, e) {
                    (_, Entry::Slot(_)) => return Err(format!("lower row {r} holds a slot")),
                    (Formulation::Standard, Entry::Lambda(v)) => {
                        if *c != k || *v != -1.0 {
                            return Err(format!("B21/B22 entry at ({r},{c}) breaks −I / 0"));
                        }
                    }
                    (Formulation::Alternate, Entry::Const(v)) => {
                        if *c != k || *v != 1.0 {
                            return Err(format!("A21/A22 entry at ({r},{c}) breaks I / 0"));
                        }
                    }
                    _ => {}
                }
            }
            let diag = self.entry(r, k);
            let ok = match formulation {
                Formulation::Standard => diag == Some(Entry::Lambda(-1.0)),
                Formulation::Alternate => diag == Some(Entry::Const(1.0)),
            };
            if !ok {
                return Err(format!("missing diagonal entry in lower row {r}"));
            }
        }
        Ok(())
    }
}

pub(crate) fn mix(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Expand every `t · f_j` over the candidate's columns.
pub fn build_matrix(cand: &CandidateBasis, aug: &AugmentedSystem) -> Result<SymbolicMatrix> {
    let cols: Vec<Monomial> = cand.b_lambda.iter().chain(&cand.b_c).cloned().collect();
    let col_of: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let lookup = |m: &Monomial| -> Result<usize> {
        col_of.get(m).copied().ok_or_else(|| {
            Error::InvariantViolation(format!("monomial {m} missing from the basis"))
        })
    };
    let m = aug.lambda_index();
    let n = aug.system().n_vars();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (j, tj) in cand.multipliers.iter().enumerate().take(m) {
        let poly = &aug.system().polys()[j];
        for t in tj {
            let mut row: Vec<(usize, Entry)> = poly
                .live_terms()
                .map(|(a, c)| Ok((lookup(&t.add(a))?, Entry::from(*c))))
                .collect::<Result<_>>()?;
            row.sort_by_key(|(c, _)| *c);
            rows.push(RowLabel {
                poly: j,
                multiplier: t.clone(),
            });
            entries.push(row);
        }
    }
    let e_i = Monomial::unit(n, aug.hidden_var());
    for t in &cand.multipliers[m] {
        let mut row = vec![
            (lookup(&t.add(&e_i))?, Entry::Const(1.0)),
            (lookup(t)?, Entry::Lambda(-1.0)),
        ];
        row.sort_by_key(|(c, _)| *c);
        rows.push(RowLabel {
            poly: m,
            multiplier: t.clone(),
        });
        entries.push(row);
    }
    let n_upper = cand.multipliers[..m].iter().map(Vec::len).sum();
    Ok(SymbolicMatrix {
        rows,
        cols,
        n_upper,
        n_lambda: cand.b_lambda.len(),
        entries,
    })
}

/// Generic rank of the full `M(λ)`.
pub fn generic_rank(m: &SymbolicMatrix, cfg: &SearchConfig) -> usize {
    let rows: Vec<usize> = (0..m.n_rows()).collect();
    let cols: Vec<usize> = (0..m.n_cols()).collect();
    m.generic_rank_of(&rows, &cols, cfg)
}

/// Does the block `A12` (upper rows × `B_c` columns) have full column rank?
pub fn a12_fullrank(cand: &CandidateBasis, m: &SymbolicMatrix, cfg: &SearchConfig) -> bool {
    let n_c = cand.b_c.len();
    if n_c == 0 {
        return true;
    }
    if m.n_upper < n_c {
        return false;
    }
    let rows: Vec<usize> = (0..m.n_upper).collect();
    let cols: Vec<usize> = (m.n_lambda..m.n_cols()).collect();
    m.generic_rank_of(&rows, &cols, cfg) == n_c
}
