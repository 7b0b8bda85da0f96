//! Offline template generation: augment the system with `x_i − λ`, search
//! for a favourable monomial basis, reduce it and freeze a solver template.

mod finalize;
mod matrix;
mod reduce;
mod search;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::DEFAULT_PRIME;
use crate::poly::{Monomial, PolySystem};

pub use finalize::finalize;
pub use matrix::{a12_fullrank, build_matrix, generic_rank, Entry, RowLabel, SymbolicMatrix};
pub use reduce::{check_conditions, remove_excess_rows, reduce_columns, ReductionStep, ReductionTrace};
pub use search::{search, search_detailed, Rejection, SearchDiagnostic, SearchOrigin, SearchOutcome};

/// Which eigenvalue problem the block elimination produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `(A21 − A22 Â12⁻¹ A11) b1 = λ b1`
    Standard,
    /// `(B21 − B22 Â12⁻¹ A11) b1 = −(1/λ) b1`
    Alternate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulationPreference {
    Standard,
    Alternate,
    /// Standard first, alternate partition when `A12` is column-rank deficient.
    Auto,
}

impl std::str::FromStr for FormulationPreference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(Self::Standard),
            "alternate" => Ok(Self::Alternate),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown formulation '{other}'")),
        }
    }
}

/// Knobs of the basis search and of the genericity tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub max_subset_size: Option<usize>,
    pub rank_trials: u32,
    pub rank_prime: u64,
    pub formulation: FormulationPreference,
    /// Cap on bounding-box lattice points during enumeration.
    pub box_cap: u64,
    /// Largest accepted condition estimate of `Â12` at solve time.
    pub kappa_max: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon: 0.45,
            seed: 0,
            max_subset_size: None,
            rank_trials: 3,
            rank_prime: DEFAULT_PRIME,
            formulation: FormulationPreference::Auto,
            box_cap: crate::polytope::DEFAULT_BOX_CAP,
            kappa_max: 1e12,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} outside (0, 0.5)",
                self.epsilon
            )));
        }
        if self.rank_trials == 0 {
            return Err(Error::InvalidConfig("rank_trials must be >= 1".into()));
        }
        if !probably_prime(self.rank_prime) || self.rank_prime < 1 << 16 || self.rank_prime >= 1 << 62 {
            return Err(Error::InvalidConfig(format!(
                "rank_prime {} must be a prime in [2^16, 2^62)",
                self.rank_prime
            )));
        }
        if self.max_subset_size == Some(0) {
            return Err(Error::InvalidConfig("max_subset_size must be >= 1".into()));
        }
        Ok(())
    }
}

fn probably_prime(p: u64) -> bool {
    if p < 2 || p % 2 == 0 {
        return p == 2;
    }
    // Miller–Rabin with bases that are deterministic below 2^64
    let (mut d, mut s) = (p - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if a % p == 0 {
            continue;
        }
        let mut x = crate::modp::pow(a, d, p);
        if x == 1 || x == p - 1 {
            continue;
        }
        for _ in 1..s {
            x = crate::modp::mul(x, x, p);
            if x == p - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The input system together with the extra polynomial `x_i − λ`.
///
/// `λ` is not a monomial variable: the extra polynomial has x-support
/// `{e_i, 0}` and carries `−λ` on its constant term.
#[derive(Clone, Debug)]
pub struct AugmentedSystem {
    system: PolySystem,
    hidden_var: usize,
    supports: Vec<Vec<Monomial>>,
}

impl AugmentedSystem {
    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    /// Index `i` (0-based) of the variable tied to `λ`.
    pub fn hidden_var(&self) -> usize {
        self.hidden_var
    }

    /// `m + 1`.
    pub fn n_polys(&self) -> usize {
        self.supports.len()
    }

    /// Supports `A_1 … A_{m+1}`; the last one is `{e_i, 0}`.
    pub fn supports(&self) -> &[Vec<Monomial>] {
        &self.supports
    }

    pub fn lambda_index(&self) -> usize {
        self.supports.len() - 1
    }
}

/// Append `f_{m+1} = x_i − λ` (`i` is 0-based).
pub fn augment(sys: &PolySystem, i: usize) -> Result<AugmentedSystem> {
    let n = sys.n_vars();
    if i >= n {
        return Err(Error::VariableOutOfRange { index: i, n_vars: n });
    }
    let mut supports = sys.supports()?;
    supports.push(vec![Monomial::unit(n, i), Monomial::one(n)]);
    Ok(AugmentedSystem {
        system: sys.clone(),
        hidden_var: i,
        supports,
    })
}

/// `T_j = { t ∈ ℤⁿ | t + A_j ⊂ B }` for every support, each sorted.
pub fn multiplier_sets(basis: &[Monomial], supports: &[Vec<Monomial>]) -> Vec<Vec<Monomial>> {
    let set: BTreeSet<&Monomial> = basis.iter().collect();
    supports
        .iter()
        .map(|support| {
            let Some(anchor) = support.first() else {
                return Vec::new();
            };
            let mut out: Vec<Monomial> = basis
                .iter()
                .map(|b| b.sub(anchor))
                .filter(|t| support.iter().all(|a| set.contains(&t.add(a))))
                .collect();
            out.sort();
            out.dedup();
            out
        })
        .collect()
}

/// A monomial basis with its multiplier sets and column partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateBasis {
    pub hidden_var: usize,
    /// `B`, sorted.
    pub basis: Vec<Monomial>,
    /// `T_1 … T_{m+1}`, each sorted.
    pub multipliers: Vec<Vec<Monomial>>,
    /// Columns of the eigenvalue block, in lower-block row order.
    pub b_lambda: Vec<Monomial>,
    /// Remaining columns in basis order.
    pub b_c: Vec<Monomial>,
    pub formulation: Formulation,
}

impl CandidateBasis {
    /// Assemble a candidate and compute its partition.
    ///
    /// Standard: `B_λ = B ∩ T_{m+1}` ordered like `T_{m+1}`.
    /// Alternate: `B_λ` holds the shifted monomials `x_i·t, t ∈ T_{m+1}`,
    /// so the lower block reads `A21 = I`, `A22 = 0`.
    pub fn new(
        hidden_var: usize,
        basis: Vec<Monomial>,
        multipliers: Vec<Vec<Monomial>>,
        formulation: Formulation,
    ) -> Self {
        let n = basis.first().map_or(0, Monomial::n_vars);
        let t_lambda = multipliers.last().cloned().unwrap_or_default();
        let b_lambda: Vec<Monomial> = match formulation {
            Formulation::Standard => t_lambda,
            Formulation::Alternate => {
                let e = Monomial::unit(n, hidden_var);
                t_lambda.iter().map(|t| t.add(&e)).collect()
            }
        };
        let lam: BTreeSet<&Monomial> = b_lambda.iter().collect();
        let b_c = basis.iter().filter(|b| !lam.contains(b)).cloned().collect();
        CandidateBasis {
            hidden_var,
            basis,
            multipliers,
            b_lambda,
            b_c,
            formulation,
        }
    }

    pub fn with_formulation(&self, formulation: Formulation) -> Self {
        Self::new(
            self.hidden_var,
            self.basis.clone(),
            self.multipliers.clone(),
            formulation,
        )
    }

    pub fn n_rows(&self) -> usize {
        self.multipliers.iter().map(Vec::len).sum()
    }

    pub fn n_cols(&self) -> usize {
        self.basis.len()
    }

    /// `|B_λ|`: size of the eigenvalue problem.
    pub fn eigen_size(&self) -> usize {
        self.b_lambda.len()
    }

    /// `|B_c|`: size of the matrix inverted online.
    pub fn inversion_size(&self) -> usize {
        self.b_c.len()
    }

    /// `B_λ ⊔ B_c = B`, `Σ|T_j| ≥ |B|`, `min |T_j| > 0`.
    pub fn check_invariants(&self) -> Result<()> {
        let all: BTreeSet<&Monomial> = self.basis.iter().collect();
        let lam: BTreeSet<&Monomial> = self.b_lambda.iter().collect();
        let rest: BTreeSet<&Monomial> = self.b_c.iter().collect();
        if lam.len() != self.b_lambda.len() || !lam.is_disjoint(&rest) {
            return Err(Error::InvariantViolation("B_λ and B_c overlap".into()));
        }
        if lam.union(&rest).copied().collect::<BTreeSet<_>>() != all {
            return Err(Error::InvariantViolation("B_λ ⊔ B_c differs from B".into()));
        }
        if self.n_rows() < self.n_cols() {
            return Err(Error::InvariantViolation(format!(
                "{} rows for {} columns",
                self.n_rows(),
                self.n_cols()
            )));
        }
        if self.multipliers.iter().any(Vec::is_empty) {
            return Err(Error::InvariantViolation("empty multiplier set".into()));
        }
        Ok(())
    }
}
