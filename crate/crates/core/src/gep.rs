//! Hidden-variable baseline: hide an input variable, build a square
//! resultant matrix `M(s) = Σ s^k M_k`, linearize it and solve the
//! generalized eigenproblem `A y = s B y`.

use std::collections::{BTreeMap, BTreeSet};

use faer::Mat;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp;
use crate::poly::{normalized_residual, Coefficient, Monomial, PolySystem};
use crate::polytope::{minkowski_sum, Displacement, Polytope};
use crate::template::{multiplier_sets, SearchConfig};

/// `|β| ≤ INFINITE_BETA·|α|` marks an eigenvalue at infinity.
pub const INFINITE_BETA: f64 = 1e-10;
/// Eigenpairs whose recovered root has a larger residual are spurious.
pub const SPURIOUS_RESIDUAL: f64 = 1e-6;

/// Square hidden-variable resultant matrix, symbolic in the slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GepTemplate {
    pub hidden: usize,
    /// Basis over the remaining `n − 1` variables.
    pub basis: Vec<Monomial>,
    /// `(poly, multiplier)` per row.
    pub rows: Vec<(usize, Monomial)>,
    /// Highest power of the hidden variable.
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GepRoot {
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub is_real: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GepSolution {
    /// Sorted by the first coordinate (real part, then imaginary part).
    pub roots: Vec<GepRoot>,
    /// Size of the linearized pencil.
    pub pencil_size: usize,
    /// Eigenvalues at infinity.
    pub infinite: usize,
    /// Finite eigenpairs whose root failed the residual test.
    pub spurious: usize,
}

impl GepSolution {
    /// Eigenvalues that correspond to no root.
    pub fn parasitic(&self) -> usize {
        self.infinite + self.spurious
    }
}

/// Terms of `f_j` split as `(x' exponent, hidden power, coefficient)`.
fn projected_terms(sys: &PolySystem, hidden: usize) -> Vec<Vec<(Monomial, usize, Coefficient)>> {
    sys.polys()
        .iter()
        .map(|p| {
            p.live_terms()
                .map(|(m, c)| (m.without(hidden), m.exponents()[hidden] as usize, *c))
                .collect()
        })
        .collect()
}

fn projected_supports(terms: &[Vec<(Monomial, usize, Coefficient)>]) -> Vec<Vec<Monomial>> {
    terms
        .iter()
        .map(|t| {
            let s: BTreeSet<Monomial> = t.iter().map(|(m, _, _)| m.clone()).collect();
            s.into_iter().collect()
        })
        .collect()
}

/// Rank mod `p` of the rows at random slots and a random hidden value.
fn rank_modp(
    terms: &[Vec<(Monomial, usize, Coefficient)>],
    basis: &[Monomial],
    rows: &[(usize, Monomial)],
    n_slots: usize,
    cfg: &SearchConfig,
) -> usize {
    let p = cfg.rank_prime;
    let col: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let mut best = 0;
    for trial in 0..cfg.rank_trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0x6E9 + trial as u64));
        let slots: Vec<u64> = (0..n_slots).map(|_| rng.random_range(1..p)).collect();
        let s = rng.random_range(1..p);
        let mat: Vec<Vec<u64>> = rows
            .iter()
            .map(|(j, t)| {
                let mut row = vec![0u64; basis.len()];
                for (a, k, c) in &terms[*j] {
                    let v = match c {
                        Coefficient::Slot(i) => slots[*i],
                        Coefficient::Const(v) => modp::from_f64(*v, p),
                    };
                    let v = modp::mul(v, modp::pow(s, *k as u64, p), p);
                    let idx = col[&t.add(a)];
                    row[idx] = (row[idx] + v) % p;
                }
                row
            })
            .collect();
        best = best.max(modp::rank(mat, p));
    }
    best
}

/// Find the smallest hidden-variable basis with full generic rank, then
/// drop rows in seeded random order until the matrix is square.
pub fn gep_template(sys: &PolySystem, hidden: usize, cfg: &SearchConfig) -> Result<GepTemplate> {
    cfg.validate()?;
    let n = sys.n_vars();
    if hidden >= n {
        return Err(Error::VariableOutOfRange { index: hidden, n_vars: n });
    }
    if n < 2 {
        return Err(Error::NoHiddenVariableTemplate("need at least two variables".into()));
    }
    let terms = projected_terms(sys, hidden);
    let supports = projected_supports(&terms);
    let mut polytopes = vec![Polytope::unit_simplex(n - 1)];
    for s in &supports {
        polytopes.push(Polytope::new(n - 1, s.clone())?);
    }
    let k = polytopes.len();
    let mut seen = BTreeSet::new();
    let mut best: Option<(Vec<Monomial>, Vec<(usize, Monomial)>)> = None;
    for mask in 1usize..(1 << k) {
        let chosen: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).collect();
        if cfg.max_subset_size.is_some_and(|c| chosen.len() > c) {
            continue;
        }
        let mut q = polytopes[chosen[0]].clone();
        for &c in &chosen[1..] {
            q = minkowski_sum(&q, &polytopes[c])?;
        }
        for d in Displacement::grid(n - 1, cfg.epsilon) {
            let Ok(basis) = q.lattice_points_capped(&d, cfg.box_cap) else {
                continue;
            };
            if basis.is_empty() || !seen.insert(basis.clone()) {
                continue;
            }
            if best.as_ref().is_some_and(|(b, _)| (b.len(), b) <= (basis.len(), &basis)) {
                continue;
            }
            let t = multiplier_sets(&basis, &supports);
            if t.iter().any(Vec::is_empty) {
                continue;
            }
            let rows: Vec<(usize, Monomial)> = t
                .iter()
                .enumerate()
                .flat_map(|(j, tj)| tj.iter().map(move |m| (j, m.clone())))
                .collect();
            if rows.len() < basis.len() {
                continue;
            }
            if rank_modp(&terms, &basis, &rows, sys.n_slots(), cfg) == basis.len() {
                best = Some((basis, rows));
            }
        }
    }
    let Some((basis, mut rows)) = best else {
        return Err(Error::NoHiddenVariableTemplate(format!(
            "no basis with full generic rank when hiding variable {hidden}"
        )));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6E95);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut rng);
    let mut removed = BTreeSet::new();
    for r in order {
        if rows.len() - removed.len() == basis.len() {
            break;
        }
        removed.insert(r);
        let kept: Vec<(usize, Monomial)> = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, r)| r.clone())
            .collect();
        if rank_modp(&terms, &basis, &kept, sys.n_slots(), cfg) < basis.len() {
            removed.remove(&r);
        }
    }
    rows = rows
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, r)| r)
        .collect();
    if rows.len() != basis.len() {
        return Err(Error::NoHiddenVariableTemplate("cannot square the matrix".into()));
    }
    let degree = rows
        .iter()
        .flat_map(|(j, _)| terms[*j].iter().map(|t| t.1))
        .max()
        .unwrap_or(0);
    if degree == 0 {
        return Err(Error::NoHiddenVariableTemplate("matrix does not depend on the hidden variable".into()));
    }
    Ok(GepTemplate {
        hidden,
        basis,
        rows,
        degree,
    })
}

/// Solve one instance with a hidden-variable template.
pub fn gep_solve(sys: &PolySystem, tpl: &GepTemplate, coeffs: &[f64]) -> Result<GepSolution> {
    let polys = sys.instantiate(coeffs)?;
    let n = sys.n_vars();
    let nb = tpl.basis.len();
    let d = tpl.degree;
    let col: BTreeMap<&Monomial, usize> = tpl.basis.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let terms = projected_terms(sys, tpl.hidden);
    let mut mk = vec![Mat::<f64>::zeros(nb, nb); d + 1];
    for (r, (j, t)) in tpl.rows.iter().enumerate() {
        for (a, k, c) in &terms[*j] {
            let v = match c {
                Coefficient::Slot(i) => coeffs[*i],
                Coefficient::Const(v) => *v,
            };
            let idx = *col
                .get(&t.add(a))
                .ok_or_else(|| Error::InvariantViolation("row leaves the basis".into()))?;
            mk[*k][(r, idx)] += v;
        }
    }
    // companion linearization: y = [b, s b, …, s^{d−1} b]
    let size = nb * d;
    let mut a = Mat::<f64>::zeros(size, size);
    let mut b = Mat::<f64>::zeros(size, size);
    for blk in 0..d - 1 {
        for i in 0..nb {
            a[(blk * nb + i, (blk + 1) * nb + i)] = 1.0;
            b[(blk * nb + i, blk * nb + i)] = 1.0;
        }
    }
    let last = (d - 1) * nb;
    for (k, m) in mk.iter().enumerate().take(d) {
        for i in 0..nb {
            for j in 0..nb {
                a[(last + i, k * nb + j)] = -m[(i, j)];
            }
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            b[(last + i, last + j)] = mk[d][(i, j)];
        }
    }
    let gevd = a
        .generalized_eigen(&b)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let (sa, sb, u) = (gevd.S_a(), gevd.S_b(), gevd.U());

    // ratio pairs inside the basis
    let pairs: Vec<Vec<(usize, usize)>> = (0..n - 1)
        .map(|v| {
            let e = Monomial::unit(n - 1, v);
            (0..nb)
                .filter_map(|den| col.get(&tpl.basis[den].add(&e)).map(|&num| (num, den)))
                .collect()
        })
        .collect();

    let mut out = GepSolution {
        roots: Vec::new(),
        pencil_size: size,
        infinite: 0,
        spurious: 0,
    };
    for k in 0..size {
        let (alpha, beta): (Complex64, Complex64) = (sa[k], sb[k]);
        if beta.norm() <= INFINITE_BETA * alpha.norm() || beta.norm() == 0.0 {
            out.infinite += 1;
            continue;
        }
        let s = alpha / beta;
        let y: Vec<Complex64> = (0..size).map(|r| u[(r, k)]).collect();
        let block = (0..d)
            .max_by(|p, q| {
                let norm = |blk: usize| y[blk * nb..(blk + 1) * nb].iter().map(|z| z.norm_sqr()).sum::<f64>();
                norm(*p).total_cmp(&norm(*q))
            })
            .unwrap_or(0);
        let bvec = &y[block * nb..(block + 1) * nb];
        let mut x = Vec::with_capacity(n);
        let mut ok = true;
        for v in 0..n {
            if v == tpl.hidden {
                x.push(s);
                continue;
            }
            let w = if v < tpl.hidden { v } else { v - 1 };
            match pairs[w]
                .iter()
                .max_by(|p, q| bvec[p.1].norm().total_cmp(&bvec[q.1].norm()))
            {
                Some(&(num, den)) if bvec[den].norm() > 0.0 => x.push(bvec[num] / bvec[den]),
                _ => {
                    ok = false;
                    x.push(Complex64::new(f64::NAN, f64::NAN));
                }
            }
        }
        let residual = if ok { normalized_residual(&polys, &x) } else { f64::INFINITY };
        if !(residual <= SPURIOUS_RESIDUAL) {
            out.spurious += 1;
            continue;
        }
        let is_real = x.iter().all(|z| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()));
        out.roots.push(GepRoot { x, residual, is_real });
    }
    out.roots.sort_by(|p, q| {
        p.x[0]
            .re
            .total_cmp(&q.x[0].re)
            .then(p.x[0].im.total_cmp(&q.x[0].im))
    });
    Ok(out)
}

/// Build a hidden-variable template and solve one instance with it.
pub fn gep_baseline(sys: &PolySystem, hidden: usize, coeffs: &[f64], cfg: &SearchConfig) -> Result<GepSolution> {
    let tpl = gep_template(sys, hidden, cfg)?;
    gep_solve(sys, &tpl, coeffs)
}
