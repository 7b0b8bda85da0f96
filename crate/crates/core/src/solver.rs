//! Online stage: fill a frozen template with numbers, eliminate the `B_c`
//! block, solve the small eigenproblem and read the roots off the
//! eigenvectors.

use faer::linalg::solvers::DenseSolveCore;
use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{normalized_residual, Monomial, NumPolynomial, PolySystem};
use crate::template::{Formulation, RowLabel};

/// Eigenvalues of the alternate form below this magnitude are roots at
/// infinity.
pub const INFINITE_MU: f64 = 1e-12;

/// Ratio denominators below this (relative to the largest eigenvector
/// entry) make a coordinate unrecoverable.
pub const MIN_DENOMINATOR: f64 = 1e-12;

/// A slot coefficient landing at `(row, col)` of `M0`, times `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub slot: usize,
    pub row: usize,
    pub col: usize,
    pub scale: f64,
}

/// A fixed number at `(row, col)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixed {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// How to read each variable off the vector `b = [b1, b2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryPlan {
    /// Per variable, column pairs `(num, den)` whose monomials differ by
    /// `e_j`, so `b[num] / b[den] = x_j`. Empty for the hidden variable.
    pub pairs: Vec<Vec<(usize, usize)>>,
    /// Some pair reaches into `B_c`, so `b2` must be reconstructed.
    pub back_substitution: bool,
    /// Variables with no usable pair at all.
    pub unrecoverable: Vec<usize>,
}

/// Square matrix layout for one formulation.
///
/// Rows: the `f_1 … f_m` block (`|B_c|` rows) then the `x_i − λ` block.
/// Columns: `B_λ` then `B_c`. `M(λ) = M0 + λ·M1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub formulation: Formulation,
    pub b_lambda: Vec<Monomial>,
    pub b_c: Vec<Monomial>,
    pub rows: Vec<RowLabel>,
    pub placements: Vec<Placement>,
    pub constants: Vec<Fixed>,
    /// Entries of `M1`.
    pub lambda: Vec<Fixed>,
    pub recovery: RecoveryPlan,
}

impl Layout {
    pub fn eigen_size(&self) -> usize {
        self.b_lambda.len()
    }

    pub fn inversion_size(&self) -> usize {
        self.b_c.len()
    }

    pub fn columns(&self) -> impl Iterator<Item = &Monomial> {
        self.b_lambda.iter().chain(&self.b_c)
    }
}

/// Everything the online solver needs, frozen offline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverTemplate {
    pub system: PolySystem,
    pub hidden_var: usize,
    pub kappa_max: f64,
    pub primary: Layout,
    /// Other formulation, tried when `Â12` of the primary is ill-conditioned.
    pub fallback: Option<Layout>,
}

impl SolverTemplate {
    pub fn n_vars(&self) -> usize {
        self.system.n_vars()
    }

    pub fn n_slots(&self) -> usize {
        self.system.n_slots()
    }

    pub fn formulation(&self) -> Formulation {
        self.primary.formulation
    }

    pub fn eigen_size(&self) -> usize {
        self.primary.eigen_size()
    }

    pub fn inversion_size(&self) -> usize {
        self.primary.inversion_size()
    }

    /// Same template restricted to its fallback layout, if any.
    pub fn with_fallback_as_primary(&self) -> Option<SolverTemplate> {
        self.fallback.as_ref().map(|f| SolverTemplate {
            primary: f.clone(),
            fallback: None,
            ..self.clone()
        })
    }

    /// Internal consistency of the placement maps and recovery plan.
    pub fn validate(&self) -> Result<()> {
        for layout in std::iter::once(&self.primary).chain(&self.fallback) {
            let size = layout.b_lambda.len() + layout.b_c.len();
            if layout.rows.len() != size {
                return Err(Error::InvariantViolation(format!(
                    "{} rows for {size} columns",
                    layout.rows.len()
                )));
            }
            let in_range = |r: usize, c: usize| r < size && c < size;
            if layout.placements.iter().any(|p| !in_range(p.row, p.col) || p.slot >= self.n_slots())
                || layout
                    .constants
                    .iter()
                    .chain(&layout.lambda)
                    .any(|f| !in_range(f.row, f.col))
            {
                return Err(Error::InvariantViolation("placement outside the matrix".into()));
            }
            if layout.recovery.pairs.len() != self.n_vars() {
                return Err(Error::InvariantViolation("recovery plan does not cover every variable".into()));
            }
            for (j, pairs) in layout.recovery.pairs.iter().enumerate() {
                if pairs.iter().any(|&(a, b)| a >= size || b >= size) {
                    return Err(Error::InvariantViolation("recovery pair outside the matrix".into()));
                }
                if j != self.hidden_var && pairs.is_empty() && !layout.recovery.unrecoverable.contains(&j) {
                    return Err(Error::InvariantViolation(format!("variable {j} has no recovery")));
                }
            }
        }
        if self.hidden_var >= self.n_vars() {
            return Err(Error::VariableOutOfRange {
                index: self.hidden_var,
                n_vars: self.n_vars(),
            });
        }
        Ok(())
    }
}

/// Numeric blocks of `M0` (`A`) and `M1` (`B`) for one instance.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub formulation: Formulation,
    pub a11: Mat<f64>,
    pub a12: Mat<f64>,
    pub a21: Mat<f64>,
    pub a22: Mat<f64>,
    pub b21: Mat<f64>,
    pub b22: Mat<f64>,
}

/// Dense `M0` and `M1` of a layout.
pub fn fill_dense(layout: &Layout, coeffs: &[f64]) -> Result<(Mat<f64>, Mat<f64>)> {
    if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let size = layout.rows.len();
    let mut m0 = Mat::<f64>::zeros(size, size);
    let mut m1 = Mat::<f64>::zeros(size, size);
    for p in &layout.placements {
        let c = coeffs.get(p.slot).ok_or(Error::LengthMismatch {
            expected: p.slot + 1,
            got: coeffs.len(),
        })?;
        m0[(p.row, p.col)] += p.scale * c;
    }
    for f in &layout.constants {
        m0[(f.row, f.col)] += f.value;
    }
    for f in &layout.lambda {
        m1[(f.row, f.col)] += f.value;
    }
    Ok((m0, m1))
}

/// Instantiate the template blocks.
pub fn fill(tpl: &SolverTemplate, layout: &Layout, coeffs: &[f64]) -> Result<Blocks> {
    if coeffs.len() != tpl.n_slots() {
        return Err(Error::LengthMismatch {
            expected: tpl.n_slots(),
            got: coeffs.len(),
        });
    }
    let (m0, m1) = fill_dense(layout, coeffs)?;
    let nc = layout.inversion_size();
    let nl = layout.eigen_size();
    let block = |m: &Mat<f64>, r0: usize, c0: usize, r: usize, c: usize| {
        Mat::<f64>::from_fn(r, c, |i, j| m[(r0 + i, c0 + j)])
    };
    Ok(Blocks {
        formulation: layout.formulation,
        a11: block(&m0, 0, 0, nc, nl),
        a12: block(&m0, 0, nl, nc, nc),
        a21: block(&m0, nc, 0, nl, nl),
        a22: block(&m0, nc, nl, nl, nc),
        b21: block(&m1, nc, 0, nl, nl),
        b22: block(&m1, nc, nl, nl, nc),
    })
}

/// Eigenproblem matrix together with the conditioning of `Â12`.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub x: Mat<f64>,
    pub condition: f64,
}

fn norm1(m: &Mat<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `κ₁(Â12) = ‖Â12‖₁·‖Â12⁻¹‖₁`; infinite when singular or non-finite.
pub fn condition_estimate(a12: &Mat<f64>) -> f64 {
    if a12.nrows() == 0 {
        return 1.0;
    }
    let norm = norm1(a12);
    if norm == 0.0 {
        return f64::INFINITY;
    }
    let inv = a12.partial_piv_lu().inverse();
    let k = norm * norm1(&inv);
    if k.is_finite() {
        k
    } else {
        f64::INFINITY
    }
}

/// `X = A21 − A22·Â12⁻¹A11` (standard) or `X = B21 − B22·Â12⁻¹A11`
/// (alternate), by a pivoted LU solve.
pub fn schur_reduce(blocks: &Blocks, kappa_max: f64) -> Result<Reduced> {
    let condition = condition_estimate(&blocks.a12);
    if !(condition <= kappa_max) {
        return Err(Error::IllConditioned {
            condition,
            max: kappa_max,
        });
    }
    let (head, tail) = match blocks.formulation {
        Formulation::Standard => (&blocks.a21, &blocks.a22),
        Formulation::Alternate => (&blocks.b21, &blocks.b22),
    };
    let x = if blocks.a12.nrows() == 0 {
        head.clone()
    } else {
        let s = blocks.a12.partial_piv_lu().solve(&blocks.a11);
        head - tail * &s
    };
    Ok(Reduced { x, condition })
}

/// One eigenpair, eigenvalue already mapped to `λ`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub vector: Vec<Complex64>,
}

/// All eigenpairs of `X`. For the alternate form `μ ↦ λ = −1/μ`; pairs
/// with `|μ| < 1e-12` are dropped and counted.
pub fn eigensolve(x: &Mat<f64>, formulation: Formulation) -> Result<(Vec<EigenPair>, usize)> {
    let n = x.nrows();
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    if (0..n).any(|i| (0..n).any(|j| !x[(i, j)].is_finite())) {
        return Err(Error::Eigen("non-finite matrix".into()));
    }
    let evd = x.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut out = Vec::with_capacity(n);
    let mut dropped = 0;
    for k in 0..n {
        let ev: Complex64 = s[k];
        let lambda = match formulation {
            Formulation::Standard => ev,
            Formulation::Alternate => {
                if ev.norm() < INFINITE_MU {
                    dropped += 1;
                    continue;
                }
                -ev.inv()
            }
        };
        let vector = (0..n).map(|r| u[(r, k)]).collect();
        out.push(EigenPair { lambda, vector });
    }
    Ok((out, dropped))
}

/// A recovered root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: Vec<Complex64>,
    /// Eigenvalue `λ = x_i`.
    pub lambda: Complex64,
    /// Normalized equation residual; infinite for partial roots.
    pub residual: f64,
    pub is_real: bool,
    /// Some coordinate could not be recovered (stored as NaN).
    pub partial: bool,
    /// `‖A11 b1 + Â12 b2‖` for unit `b1`, and `‖A11 b1‖`.
    pub eq12_residual: f64,
    pub eq12_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenDiagnostics {
    pub formulation: Formulation,
    /// `κ₁(Â12)`.
    pub condition: f64,
    pub eigenvalue_count: usize,
    /// Alternate form only: eigenvalues at infinity.
    pub dropped_infinite: usize,
    pub used_fallback: bool,
    pub back_substitution: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub roots: Vec<Root>,
    pub diagnostics: EigenDiagnostics,
}

impl SolutionSet {
    pub fn real_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.is_real)
    }

    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// A root is real when every `|Im x_j| ≤ real_tol·(1 + |Re x_j|)`.
    pub real_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { real_tol: 1e-8 }
    }
}

fn solve_real_lu(a12: &Mat<f64>, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = rhs.len();
    let mut r = Mat::<f64>::zeros(n, 2);
    for (k, v) in rhs.iter().enumerate() {
        r[(k, 0)] = v.re;
        r[(k, 1)] = v.im;
    }
    let s = a12.partial_piv_lu().solve(&r);
    (0..n).map(|k| Complex64::new(s[(k, 0)], s[(k, 1)])).collect()
}

fn mat_vec(m: &Mat<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| v[j] * m[(i, j)]).sum())
        .collect()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Turn eigenpairs into roots: `x_i = λ`, the other coordinates from
/// eigenvector ratios per the recovery plan.
pub fn extract_solutions(
    tpl: &SolverTemplate,
    layout: &Layout,
    blocks: &Blocks,
    polys: &[NumPolynomial],
    pairs: &[EigenPair],
    opts: &SolveOptions,
) -> Vec<Root> {
    let n = tpl.n_vars();
    let one = Monomial::one(n);
    let one_idx = layout.b_lambda.iter().position(|m| *m == one);
    let mut roots: Vec<Root> = pairs
        .iter()
        .map(|pair| {
            let mut b1 = pair.vector.clone();
            let scale = b1.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let base = match one_idx {
                Some(k) if b1[k].norm() > MIN_DENOMINATOR * scale => b1[k],
                _ => b1
                    .iter()
                    .copied()
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .unwrap_or(Complex64::new(1.0, 0.0)),
            };
            if base.norm() > 0.0 {
                for z in &mut b1 {
                    *z /= base;
                }
            }
            let a11b1 = mat_vec(&blocks.a11, &b1);
            let b2: Vec<Complex64> = if layout.b_c.is_empty() {
                Vec::new()
            } else {
                solve_real_lu(&blocks.a12, &a11b1).into_iter().map(|z| -z).collect()
            };
            let unit = norm2(&b1).max(f64::MIN_POSITIVE);
            let a12b2 = mat_vec(&blocks.a12, &b2);
            let r: Vec<Complex64> = a11b1.iter().zip(&a12b2).map(|(a, b)| a + b).collect();
            let eq12_residual = norm2(&r) / unit;
            let eq12_scale = norm2(&a11b1) / unit;

            let b: Vec<Complex64> = b1.iter().chain(&b2).copied().collect();
            let bmax = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mut x = vec![Complex64::new(f64::NAN, f64::NAN); n];
            let mut partial = false;
            for (j, xj) in x.iter_mut().enumerate() {
                if j == tpl.hidden_var {
                    *xj = pair.lambda;
                    continue;
                }
                let best = layout.recovery.pairs[j]
                    .iter()
                    .max_by(|p, q| b[p.1].norm().total_cmp(&b[q.1].norm()));
                match best {
                    Some(&(num, den)) if b[den].norm() > MIN_DENOMINATOR * bmax => {
                        *xj = b[num] / b[den];
                    }
                    _ => partial = true,
                }
            }
            let residual = if partial {
                f64::INFINITY
            } else {
                normalized_residual(polys, &x)
            };
            let is_real = !partial
                && x
                    .iter()
                    .all(|z| z.im.abs() <= opts.real_tol * (1.0 + z.re.abs()));
            Root {
                x,
                lambda: pair.lambda,
                residual,
                is_real,
                partial,
                eq12_residual,
                eq12_scale,
            }
        })
        .collect();
    roots.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    roots
}

fn solve_layout(tpl: &SolverTemplate, layout: &Layout, coeffs: &[f64], opts: &SolveOptions) -> Result<SolutionSet> {
    let polys = tpl.system.instantiate(coeffs)?;
    let blocks = fill(tpl, layout, coeffs)?;
    let reduced = schur_reduce(&blocks, tpl.kappa_max)?;
    let (pairs, dropped) = eigensolve(&reduced.x, layout.formulation)?;
    let roots = extract_solutions(tpl, layout, &blocks, &polys, &pairs, opts);
    Ok(SolutionSet {
        diagnostics: EigenDiagnostics {
            formulation: layout.formulation,
            condition: reduced.condition,
            eigenvalue_count: pairs.len(),
            dropped_infinite: dropped,
            used_fallback: false,
            back_substitution: layout.recovery.back_substitution,
        },
        roots,
    })
}

/// Solve one instance. An ill-conditioned `Â12` triggers the fallback
/// formulation when the template carries one.
pub fn solve(tpl: &SolverTemplate, coeffs: &[f64]) -> Result<SolutionSet> {
    solve_with(tpl, coeffs, &SolveOptions::default())
}

pub fn solve_with(tpl: &SolverTemplate, coeffs: &[f64], opts: &SolveOptions) -> Result<SolutionSet> {
    match solve_layout(tpl, &tpl.primary, coeffs, opts) {
        Err(Error::IllConditioned { condition, max }) => match &tpl.fallback {
            Some(fb) => {
                let mut out = solve_layout(tpl, fb, coeffs, opts)?;
                out.diagnostics.used_fallback = true;
                Ok(out)
            }
            None => Err(Error::IllConditioned { condition, max }),
        },
        other => other,
    }
}
