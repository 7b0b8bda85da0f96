use super::matrix::{Entry, SymbolicMatrix};
use super::reduce::check_conditions;
use super::{AugmentedSystem, CandidateBasis, Formulation, FormulationPreference, SearchConfig};
use crate::error::{Error, Result};
use crate::poly::Monomial;
use crate::solver::{Fixed, Layout, Placement, RecoveryPlan, SolverTemplate};

/// Freeze a square, reduced candidate into a solver template. With the
/// `auto` preference the other formulation is attached as a fallback when
/// it satisfies the same conditions.
pub fn finalize(cand: &CandidateBasis, aug: &AugmentedSystem, cfg: &SearchConfig) -> Result<SolverTemplate> {
    if cand.n_rows() != cand.n_cols() {
        return Err(Error::InvariantViolation(format!(
            "template is {}×{}, not square",
            cand.n_rows(),
            cand.n_cols()
        )));
    }
    let mat = check_conditions(cand, aug, cfg)?;
    let primary = layout(cand, &mat);
    let fallback = if cfg.formulation == FormulationPreference::Auto {
        let other = match cand.formulation {
            Formulation::Standard => Formulation::Alternate,
            Formulation::Alternate => Formulation::Standard,
        };
        let alt = cand.with_formulation(other);
        check_conditions(&alt, aug, cfg).ok().map(|m| layout(&alt, &m))
    } else {
        None
    };
    let tpl = SolverTemplate {
        system: aug.system().clone(),
        hidden_var: cand.hidden_var,
        kappa_max: cfg.kappa_max,
        primary,
        fallback,
    };
    tpl.validate()?;
    Ok(tpl)
}

/// Placement maps and recovery plan of an admissible square matrix.
pub(crate) fn layout(cand: &CandidateBasis, mat: &SymbolicMatrix) -> Layout {
    let mut placements = Vec::new();
    let mut constants = Vec::new();
    let mut lambda = Vec::new();
    for (row, entries) in mat.entries.iter().enumerate() {
        for &(col, e) in entries {
            match e {
                Entry::Slot(slot) => placements.push(Placement {
                    slot,
                    row,
                    col,
                    scale: 1.0,
                }),
                Entry::Const(value) => constants.push(Fixed { row, col, value }),
                Entry::Lambda(value) => lambda.push(Fixed { row, col, value }),
            }
        }
    }
    Layout {
        formulation: cand.formulation,
        b_lambda: cand.b_lambda.clone(),
        b_c: cand.b_c.clone(),
        rows: mat.rows.clone(),
        placements,
        constants,
        lambda,
        recovery: recovery_plan(cand.hidden_var, &mat.cols, cand.b_lambda.len()),
    }
}

/// Ratio pairs `(m·x_j, m)` per variable, inside `B_λ` when possible and
/// across all columns otherwise.
fn recovery_plan(hidden: usize, cols: &[Monomial], n_lambda: usize) -> RecoveryPlan {
    let n = cols.first().map_or(0, Monomial::n_vars);
    let pairs_in = |j: usize, limit: usize| -> Vec<(usize, usize)> {
        let e = Monomial::unit(n, j);
        (0..limit)
            .filter_map(|den| {
                let target = cols[den].add(&e);
                cols[..limit].iter().position(|c| *c == target).map(|num| (num, den))
            })
            .collect()
    };
    let mut plan = RecoveryPlan {
        pairs: vec![Vec::new(); n],
        back_substitution: false,
        unrecoverable: Vec::new(),
    };
    for j in (0..n).filter(|&j| j != hidden) {
        let mut p = pairs_in(j, n_lambda);
        if p.is_empty() {
            p = pairs_in(j, cols.len());
            if p.is_empty() {
                plan.unrecoverable.push(j);
            } else {
                plan.back_substitution = true;
            }
        }
        plan.pairs[j] = p;
    }
    plan
}
