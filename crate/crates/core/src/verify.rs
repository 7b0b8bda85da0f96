//! Cross-checks of a generated template against its problem and the
//! independent oracles.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::artifact::TemplateFile;
use crate::bench::{instance_coeffs, NormalSampler};
use crate::error::{Error, Result};
use crate::gep::{gep_solve, gep_template};
use crate::oracle::{bkk_2d, companion_roots, match_roots, sylvester_roots};
use crate::poly::PolySystem;
use crate::solver::{solve, Layout, SolutionSet};
use crate::template::Formulation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub instances: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            instances: 20,
            seed: 0,
        }
    }
}

/// Literal block shape of the `x_i − λ` rows: standard `B21 = −I`,
/// `B22 = 0`; alternate `A21 = I`, `A22 = 0`; no slots in those rows.
pub fn check_layout_blocks(layout: &Layout) -> std::result::Result<(), String> {
    let nc = layout.inversion_size();
    let nl = layout.eigen_size();
    let lower = |r: usize| r >= nc;
    if layout.placements.iter().any(|p| lower(p.row)) {
        return Err("slot coefficient in the x_i − λ block".into());
    }
    if layout.lambda.iter().any(|f| !lower(f.row)) {
        return Err("λ in the upper block".into());
    }
    let (diag, name, value) = match layout.formulation {
        Formulation::Standard => (&layout.lambda, "B21/B22", -1.0),
        Formulation::Alternate => (
            &layout.constants,
            "A21/A22",
            1.0,
        ),
    };
    let lower_entries: Vec<_> = diag.iter().filter(|f| lower(f.row)).collect();
    if lower_entries.len() != nl {
        return Err(format!("{name}: {} entries for size {nl}", lower_entries.len()));
    }
    for f in lower_entries {
        if f.col != f.row - nc || f.value != value {
            return Err(format!("{name}: entry {} at ({}, {})", f.value, f.row, f.col));
        }
    }
    Ok(())
}

fn roots_of(s: &SolutionSet) -> Vec<Vec<Complex64>> {
    s.roots.iter().map(|r| r.x.clone()).collect()
}

/// Run every check. The template must have been generated for `problem`.
pub fn verify(problem: &PolySystem, file: &TemplateFile, opts: &VerifyOptions) -> Result<VerifyReport> {
    let tpl = &file.template;
    if &tpl.system != problem {
        return Err(Error::Mismatch("template was generated for a different problem".into()));
    }
    let mut rep = VerifyReport::default();

    let structure = tpl
        .validate()
        .map_err(|e| e.to_string())
        .and_then(|_| check_layout_blocks(&tpl.primary))
        .and_then(|_| tpl.fallback.as_ref().map_or(Ok(()), check_layout_blocks));
    rep.push(
        "block structure",
        structure.is_ok(),
        structure.err().unwrap_or_else(|| format!("{:?} primary", tpl.formulation())),
    );
    rep.push(
        "float rank",
        file.rank_check.rank == file.rank_check.size,
        format!("rank {} of {}", file.rank_check.rank, file.rank_check.size),
    );
    let replay = file.trace.replay(&file.unreduced);
    let replay_ok = replay
        .as_ref()
        .is_ok_and(|c| c.b_lambda == tpl.primary.b_lambda && c.b_c == tpl.primary.b_c);
    rep.push(
        "trace replay",
        replay_ok,
        format!("{} steps", file.trace.steps.len()),
    );

    let n = problem.n_vars();
    let mut solved = 0;
    let mut residual_fail = 0;
    let mut count_fail = 0;
    let mut eq12_fail = 0;
    let mut oracle_fail = 0;
    let mut oracle_skipped = 0;
    let mut oracle_err: f64 = 0.0;
    let mut form_fail = 0;
    let mut form_err: f64 = 0.0;
    let mut errors = Vec::new();
    let alt = tpl.with_fallback_as_primary();
    let gep = if n == 2 {
        (0..2).find_map(|h| gep_template(problem, h, &file.config).ok())
    } else {
        None
    };
    let mut gep_fail = 0;
    let mut gep_err: f64 = 0.0;

    for k in 0..opts.instances {
        let coeffs = instance_coeffs(&NormalSampler, tpl.n_slots(), opts.seed, k as u64);
        let sol = match solve(tpl, &coeffs) {
            Ok(s) => s,
            Err(e) => {
                errors.push(e.to_string());
                continue;
            }
        };
        solved += 1;
        if sol.roots.iter().any(|r| !(r.residual < 1e-6)) {
            residual_fail += 1;
        }
        if sol.roots.len() > tpl.eigen_size() {
            count_fail += 1;
        }
        if sol
            .roots
            .iter()
            .any(|r| !(r.eq12_residual < 1e-8 * r.eq12_scale + 1e-12))
        {
            eq12_fail += 1;
        }
        let mine = roots_of(&sol);
        let polys = problem.instantiate(&coeffs)?;
        let oracle: Option<(Vec<Vec<Complex64>>, usize)> = match n {
            1 => companion_roots(&polys[0])
                .ok()
                .map(|r| (r.into_iter().map(|z| vec![z]).collect(), polys[0].terms().len())),
            2 if polys.len() == 2 => sylvester_roots(&polys[0], &polys[1]).ok().map(|r| {
                let bkk = bkk_2d(&problem.polys()[0].support().unwrap_or_default(), &problem.polys()[1].support().unwrap_or_default());
                (r.into_iter().map(|z| z.to_vec()).collect(), bkk.max(0) as usize)
            }),
            _ => None,
        };
        match oracle {
            Some((want, bkk)) => {
                let mt = match_roots(&mine, &want, 1e-4);
                oracle_err = oracle_err.max(mt.max_error());
                let bkk_ok = n != 2 || (want.len() == bkk && mine.len() == bkk);
                if !mt.is_perfect() || mt.max_error() >= 1e-6 || !bkk_ok {
                    oracle_fail += 1;
                }
            }
            None => oracle_skipped += 1,
        }
        if let Some(alt) = &alt {
            match solve(alt, &coeffs) {
                Ok(s2) => {
                    let mt = match_roots(&mine, &roots_of(&s2), 1e-4);
                    form_err = form_err.max(mt.max_error());
                    if !mt.is_perfect() || mt.max_error() >= 1e-8 {
                        form_fail += 1;
                    }
                }
                Err(_) => form_fail += 1,
            }
        }
        if let Some(g) = &gep {
            match gep_solve(problem, g, &coeffs) {
                Ok(gs) => {
                    let theirs: Vec<Vec<Complex64>> = gs.roots.iter().map(|r| r.x.clone()).collect();
                    let mt = match_roots(&mine, &theirs, 1e-4);
                    gep_err = gep_err.max(mt.max_error());
                    if !mt.is_perfect() || mt.max_error() >= 1e-6 {
                        gep_fail += 1;
                    }
                }
                Err(_) => gep_fail += 1,
            }
        }
    }

    let total = opts.instances;
    // one bad draw in a hundred is tolerated, as in the stability criterion
    let allowance = total / 100;
    rep.push(
        "solver runs",
        errors.len() <= allowance,
        format!("{solved} of {total} solved{}", errors.first().map(|e| format!("; first error: {e}")).unwrap_or_default()),
    );
    rep.push(
        "root residuals < 1e-6",
        residual_fail <= allowance,
        format!("{residual_fail} of {solved} instances with a larger residual"),
    );
    rep.push(
        "root count ≤ |B_λ|",
        count_fail == 0,
        format!("eigenproblem size {}", tpl.eigen_size()),
    );
    rep.push(
        "back-substitution",
        eq12_fail <= allowance,
        format!("{eq12_fail} instances with ‖A11 b1 + Â12 b2‖ ≥ 1e-8·‖A11 b1‖"),
    );
    if n <= 2 {
        rep.push(
            "oracle agreement",
            oracle_fail <= allowance.max(total / 10) && oracle_skipped < total.max(1),
            format!(
                "{oracle_fail} mismatches, {oracle_skipped} oracle skips, max |Δ| {oracle_err:.2e}"
            ),
        );
    }
    if alt.is_some() {
        rep.push(
            "formulation equivalence",
            form_fail <= allowance,
            format!("{form_fail} mismatches, max |Δ| {form_err:.2e}"),
        );
    }
    if gep.is_some() {
        rep.push(
            "hidden-variable baseline",
            gep_fail <= allowance,
            format!("{gep_fail} mismatches, max |Δ| {gep_err:.2e}"),
        );
    }
    Ok(rep)
}
