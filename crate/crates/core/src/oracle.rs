//! Independent reference solvers: companion matrices, Sylvester
//! elimination, the 2-D BKK bound, and root-set matching.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{normalized_residual, Monomial, NumPolynomial};
use crate::polytope::twice_area_2d;

/// Residual gate for accepting an oracle root.
pub const ORACLE_RESIDUAL: f64 = 1e-8;
/// Oracle roots closer than this are merged.
pub const DEDUP_DISTANCE: f64 = 1e-6;
/// Default matching gate.
pub const MATCH_GATE: f64 = 1e-4;
/// Largest count for which the optimal assignment fallback runs.
pub const OPTIMAL_MATCH_LIMIT: usize = 12;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Roots of `Σ c_k t^k` (ascending coefficients) from the companion
/// matrix. Leading coefficients below `1e-12` are an error.
pub fn companion_roots_complex(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let Some(deg) = coeffs.len().checked_sub(1).filter(|&d| d >= 1) else {
        return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
    };
    let lead = coeffs[deg];
    if lead.norm() <= 1e-12 {
        return Err(Error::LeadingCoefficient);
    }
    // top row −c_{d−1}/c_d … −c_0/c_d, subdiagonal ones
    let c = Mat::<Complex64>::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coeffs[deg - 1 - j] / lead
        } else if i == j + 1 {
            cx(1.0)
        } else {
            cx(0.0)
        }
    });
    let evd = c.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    Ok((0..deg).map(|k| s[k]).collect())
}

/// All complex roots of a univariate polynomial.
pub fn companion_roots(p: &NumPolynomial) -> Result<Vec<Complex64>> {
    if p.n_vars() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: p.n_vars(),
        });
    }
    let deg = p
        .terms()
        .iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(m, _)| m.exponents()[0])
        .max()
        .unwrap_or(0);
    if p.terms().iter().any(|(m, _)| m.exponents()[0] < 0) {
        return Err(Error::InvalidPolynomial("negative exponent".into()));
    }
    let mut coeffs = vec![cx(0.0); deg as usize + 1];
    for (m, c) in p.terms() {
        coeffs[m.exponents()[0] as usize] += *c;
    }
    companion_roots_complex(&coeffs)
}

/// `f = Σ_k a_k(y) x^k`: coefficient lists (ascending in `y`) per power of `x`.
fn by_x_power(p: &NumPolynomial) -> Result<Vec<Vec<f64>>> {
    if p.n_vars() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: p.n_vars(),
        });
    }
    let mut dx = 0;
    let mut dy = 0;
    for (m, c) in p.terms() {
        let e = m.exponents();
        if e[0] < 0 || e[1] < 0 {
            return Err(Error::InvalidPolynomial("negative exponent".into()));
        }
        if *c != 0.0 {
            dx = dx.max(e[0] as usize);
            dy = dy.max(e[1] as usize);
        }
    }
    let mut out = vec![vec![0.0; dy + 1]; dx + 1];
    for (m, c) in p.terms() {
        let e = m.exponents();
        if *c != 0.0 {
            out[e[0] as usize][e[1] as usize] += c;
        }
    }
    Ok(out)
}

fn horner(c: &[f64], y: Complex64) -> Complex64 {
    c.iter().rev().fold(cx(0.0), |acc, &v| acc * y + v)
}

/// Sylvester matrix in `x` of two polynomials with the given `x`-coefficients.
fn sylvester(f: &[Complex64], g: &[Complex64]) -> Mat<Complex64> {
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let n = df + dg;
    Mat::from_fn(n, n, |i, j| {
        // rows 0..dg: shifts of f; rows dg..n: shifts of g; columns descending powers
        let (coeffs, shift, deg) = if i < dg { (f, i, df) } else { (g, i - dg, dg) };
        let k = j as isize - shift as isize;
        if k < 0 || k as usize > deg {
            cx(0.0)
        } else {
            coeffs[deg - k as usize]
        }
    })
}

fn derivative(p: &NumPolynomial, var: usize) -> NumPolynomial {
    let terms = p
        .terms()
        .iter()
        .filter(|(m, _)| m.exponents()[var] != 0)
        .map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            let k = e[var];
            e[var] -= 1;
            (Monomial::new(e), c * k as f64)
        })
        .collect();
    NumPolynomial::new(p.n_vars(), terms).expect("derivative keeps distinct monomials")
}

/// A few Newton steps on `(f, g)`; keeps the best iterate.
fn newton_polish(f: &NumPolynomial, g: &NumPolynomial, start: [Complex64; 2]) -> [Complex64; 2] {
    let jac = [
        [derivative(f, 0), derivative(f, 1)],
        [derivative(g, 0), derivative(g, 1)],
    ];
    let polys = [f.clone(), g.clone()];
    let mut z = start;
    let mut best = (normalized_residual(&polys, &z), z);
    for _ in 0..20 {
        let fv = f.evaluate(&z).unwrap_or(cx(f64::NAN));
        let gv = g.evaluate(&z).unwrap_or(cx(f64::NAN));
        let j = |r: usize, c: usize| jac[r][c].evaluate(&z).unwrap_or(cx(f64::NAN));
        let det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        if det.norm() == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (j(1, 1) * fv - j(0, 1) * gv) / det;
        let dy = (j(0, 0) * gv - j(1, 0) * fv) / det;
        z = [z[0] - dx, z[1] - dy];
        let r = normalized_residual(&polys, &z);
        if r < best.0 {
            best = (r, z);
        }
        if r < 1e-15 {
            break;
        }
    }
    best.1
}

/// Finite common roots of two bivariate polynomials by eliminating `x`.
///
/// The resultant `R(y)` is interpolated from `det Syl(f, g)` at roots of
/// unity, its roots give `y`, and `x` comes from the univariate factors
/// `f(·, y)` and `g(·, y)`. Candidates are Newton-polished, kept when the
/// normalized residual is below `1e-8` and merged within `1e-6`.
pub fn sylvester_roots(f: &NumPolynomial, g: &NumPolynomial) -> Result<Vec<[Complex64; 2]>> {
    let fc = by_x_power(f)?;
    let gc = by_x_power(g)?;
    let (df, dg) = (fc.len() - 1, gc.len() - 1);
    if df == 0 && dg == 0 {
        return Err(Error::NonGeneric("neither polynomial depends on x".into()));
    }
    let dyf = fc.iter().map(Vec::len).max().unwrap_or(1) - 1;
    let dyg = gc.iter().map(Vec::len).max().unwrap_or(1) - 1;
    let d = dg * dyf + df * dyg;
    let npts = d + 1;
    // Hadamard bound of each sample, to judge R ≡ 0 in floating point
    let mut bound = 0.0f64;
    let samples: Vec<Complex64> = (0..npts)
        .map(|k| {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / npts as f64);
            let fx: Vec<Complex64> = fc.iter().map(|c| horner(c, w)).collect();
            let gx: Vec<Complex64> = gc.iter().map(|c| horner(c, w)).collect();
            let s = sylvester(&fx, &gx);
            let h: f64 = (0..s.nrows())
                .map(|i| (0..s.ncols()).map(|j| s[(i, j)].norm_sqr()).sum::<f64>().sqrt())
                .product();
            bound = bound.max(h);
            s.determinant()
        })
        .collect();
    // inverse DFT
    let mut r: Vec<Complex64> = (0..npts)
        .map(|j| {
            samples
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    s * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / npts as f64)
                })
                .sum::<Complex64>()
                / npts as f64
        })
        .collect();
    let scale = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(scale > 1e-12 * bound) || !scale.is_finite() {
        return Err(Error::NonGeneric("resultant vanishes identically".into()));
    }
    while r.last().is_some_and(|c| c.norm() <= 1e-10 * scale) {
        r.pop();
    }
    if r.len() <= 1 {
        return Ok(Vec::new());
    }
    let ys = companion_roots_complex(&r)?;

    let polys = [f.clone(), g.clone()];
    let mut out: Vec<[Complex64; 2]> = Vec::new();
    for y in ys {
        let mut xs = Vec::new();
        for coeffs in [&fc, &gc] {
            let mut u: Vec<Complex64> = coeffs.iter().map(|c| horner(c, y)).collect();
            let s = u.iter().map(|c| c.norm()).fold(0.0, f64::max);
            while u.last().is_some_and(|c| c.norm() <= 1e-10 * s) {
                u.pop();
            }
            if u.len() >= 2 {
                xs.extend(companion_roots_complex(&u)?);
            }
        }
        for x in xs {
            let z = newton_polish(f, g, [x, y]);
            if normalized_residual(&polys, &z) >= ORACLE_RESIDUAL {
                continue;
            }
            if out.iter().all(|o| distance(o, &z) > DEDUP_DISTANCE) {
                out.push(z);
            }
        }
    }
    out.sort_by(|a, b| a[0].re.total_cmp(&b[0].re).then(a[0].im.total_cmp(&b[0].im)));
    Ok(out)
}

/// Mixed area of two lattice supports: `A(P+Q) − A(P) − A(Q)`.
pub fn bkk_2d(p: &[Monomial], q: &[Monomial]) -> i64 {
    let sum: Vec<Monomial> = p.iter().flat_map(|a| q.iter().map(move |b| a.add(b))).collect();
    (twice_area_2d(&sum) - twice_area_2d(p) - twice_area_2d(q)) / 2
}

/// Max per-coordinate modulus of the difference.
pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `(index in a, index in b, distance)`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

impl Matching {
    pub fn max_error(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }

    pub fn is_perfect(&self) -> bool {
        self.unmatched_a.is_empty() && self.unmatched_b.is_empty()
    }
}

/// Pair up two root sets: greedy nearest neighbour within `gate`, then an
/// optimal assignment (most pairs, then least total distance) when the
/// greedy pass leaves points unmatched and both sets have at most 12 roots.
pub fn match_roots<A: AsRef<[Complex64]>, B: AsRef<[Complex64]>>(a: &[A], b: &[B], gate: f64) -> Matching {
    let dist = |i: usize, j: usize| distance(a[i].as_ref(), b[j].as_ref());
    let mut cand: Vec<(f64, usize, usize)> = (0..a.len())
        .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
        .map(|(i, j)| (dist(i, j), i, j))
        .filter(|(d, _, _)| *d <= gate)
        .collect();
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in cand {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j, d));
        }
    }
    let complete = pairs.len() == a.len().min(b.len());
    if !complete && a.len() <= OPTIMAL_MATCH_LIMIT && b.len() <= OPTIMAL_MATCH_LIMIT {
        pairs = optimal_assignment(a.len(), b.len(), &dist, gate);
    }
    pairs.sort_by_key(|p| p.0);
    let unmatched_a = (0..a.len()).filter(|i| !pairs.iter().any(|p| p.0 == *i)).collect();
    let unmatched_b = (0..b.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)).collect();
    Matching {
        pairs,
        unmatched_a,
        unmatched_b,
    }
}

fn optimal_assignment(na: usize, nb: usize, dist: &dyn Fn(usize, usize) -> f64, gate: f64) -> Vec<(usize, usize, f64)> {
    // best[i][mask]: (pairs, −total) over a[i..] with b's in mask taken
    let full = 1usize << nb;
    let better = |x: (usize, f64), y: (usize, f64)| x.0 > y.0 || (x.0 == y.0 && x.1 < y.1);
    let mut best = vec![vec![(0usize, 0.0f64); full]; na + 1];
    let mut choice = vec![vec![None::<usize>; full]; na];
    for i in (0..na).rev() {
        for mask in 0..full {
            let mut cur = best[i + 1][mask];
            let mut pick = None;
            for j in 0..nb {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let d = dist(i, j);
                if d > gate {
                    continue;
                }
                let next = best[i + 1][mask | (1 << j)];
                let cand = (next.0 + 1, next.1 + d);
                if better(cand, cur) {
                    cur = cand;
                    pick = Some(j);
                }
            }
            best[i][mask] = cur;
            choice[i][mask] = pick;
        }
    }
    let mut out = Vec::new();
    let mut mask = 0;
    for (i, row) in choice.iter().enumerate() {
        if let Some(j) = row[mask] {
            out.push((i, j, dist(i, j)));
            mask |= 1 << j;
        }
    }
    out
}
