use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{a12_fullrank, build_matrix, generic_rank, mix};
use super::{augment, multiplier_sets, AugmentedSystem, CandidateBasis, Formulation, FormulationPreference, SearchConfig};
use crate::error::{Error, Result};
use crate::poly::{Monomial, PolySystem};
use crate::polytope::{minkowski_sum, newton_polytope, Displacement, Polytope};

/// Displacement grids larger than this are sampled instead of enumerated.
const MAX_DISPLACEMENTS: usize = 6561;

/// Where an accepted basis came from.
///
/// Polytope indices: `0` is the unit simplex, `j` in `1..=m` is `NP(f_j)`,
/// `m + 1` is `conv{e_i, 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOrigin {
    pub hidden_var: usize,
    pub subset: Vec<usize>,
    pub delta: Vec<f64>,
}

impl fmt::Display for SearchOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i={} subset={:?} δ={:?}",
            self.hidden_var, self.subset, self.delta
        )
    }
}

/// Why a candidate was turned down.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rejection {
    TooLarge { volume: u64 },
    EmptyBasis,
    TooFewRows { rows: usize, cols: usize },
    EmptyMultiplierSet { poly: usize },
    RankDeficient { rank: usize, cols: usize },
    A12Deficient,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::TooLarge { volume } => write!(f, "bounding box of {volume} points over the cap"),
            Rejection::EmptyBasis => write!(f, "no lattice points"),
            Rejection::TooFewRows { rows, cols } => write!(f, "{rows} rows < {cols} columns"),
            Rejection::EmptyMultiplierSet { poly } => write!(f, "T_{} empty", poly + 1),
            Rejection::RankDeficient { rank, cols } => write!(f, "rank {rank} < {cols}"),
            Rejection::A12Deficient => write!(f, "A12 column-rank deficient"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchDiagnostic {
    pub origin: SearchOrigin,
    pub basis_size: usize,
    pub rejection: Rejection,
}

impl fmt::Display for SearchDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |B|={}: {}", self.origin, self.basis_size, self.rejection)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub candidate: CandidateBasis,
    pub origin: SearchOrigin,
    /// Distinct `(i, B)` pairs tested.
    pub evaluated: usize,
    pub accepted: usize,
    pub diagnostics: Vec<SearchDiagnostic>,
}

/// Smallest favourable basis; see [`search_detailed`].
pub fn search(sys: &PolySystem, cfg: &SearchConfig) -> Result<CandidateBasis> {
    search_detailed(sys, cfg).map(|o| o.candidate)
}

/// Scan every hidden variable, polytope subset and displacement, keep the
/// accepted candidate with the smallest key
/// `(|B|, |B_λ|, B, i, formulation)`.
pub fn search_detailed(sys: &PolySystem, cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let (n, m) = (sys.n_vars(), sys.n_polys());
    if m < n {
        return Err(Error::Underdetermined { m, n });
    }

    let mut diagnostics = Vec::new();
    // (i, B) → first origin, in enumeration order
    let mut unique: BTreeMap<(usize, Vec<Monomial>), SearchOrigin> = BTreeMap::new();
    let mut order: Vec<(usize, Vec<Monomial>)> = Vec::new();
    let deltas = displacements(n, cfg);
    let mut augmented = Vec::with_capacity(n);

    for i in 0..n {
        let aug = augment(sys, i)?;
        let polytopes = polytopes(&aug)?;
        for subset in subsets(polytopes.len(), cfg.max_subset_size) {
            let mut q = polytopes[subset[0]].clone();
            for &k in &subset[1..] {
                q = minkowski_sum(&q, &polytopes[k])?;
            }
            for d in &deltas {
                let origin = SearchOrigin {
                    hidden_var: i,
                    subset: subset.clone(),
                    delta: d.delta.clone(),
                };
                let basis = match q.lattice_points_capped(d, cfg.box_cap) {
                    Ok(b) => b,
                    Err(Error::PolytopeTooLarge { volume, .. }) => {
                        diagnostics.push(SearchDiagnostic {
                            origin,
                            basis_size: 0,
                            rejection: Rejection::TooLarge {
                                volume: volume.min(u64::MAX as u128) as u64,
                            },
                        });
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                if basis.is_empty() {
                    diagnostics.push(SearchDiagnostic {
                        origin,
                        basis_size: 0,
                        rejection: Rejection::EmptyBasis,
                    });
                    continue;
                }
                let key = (i, basis);
                if !unique.contains_key(&key) {
                    order.push(key.clone());
                    unique.insert(key, origin);
                }
            }
        }
        augmented.push(aug);
    }

    let results: Vec<std::result::Result<CandidateBasis, Rejection>> = order
        .par_iter()
        .map(|(i, basis)| evaluate(&augmented[*i], basis, cfg))
        .collect();

    let mut best: Option<(CandidateBasis, &SearchOrigin)> = None;
    let mut accepted = 0;
    for (key, result) in order.iter().zip(results) {
        let origin = &unique[key];
        match result {
            Ok(cand) => {
                accepted += 1;
                let better = best
                    .as_ref()
                    .is_none_or(|(b, _)| rank_key(&cand) < rank_key(b));
                if better {
                    best = Some((cand, origin));
                }
            }
            Err(rejection) => diagnostics.push(SearchDiagnostic {
                origin: origin.clone(),
                basis_size: key.1.len(),
                rejection,
            }),
        }
    }

    match best {
        Some((candidate, origin)) => Ok(SearchOutcome {
            candidate,
            origin: origin.clone(),
            evaluated: order.len(),
            accepted,
            diagnostics,
        }),
        None => Err(Error::NoFavourableBasis { diagnostics }),
    }
}

fn rank_key(c: &CandidateBasis) -> (usize, usize, &[Monomial], usize, Formulation) {
    (c.basis.len(), c.b_lambda.len(), &c.basis, c.hidden_var, c.formulation)
}

/// `NP0 = unit simplex`, `NP(f_1) … NP(f_m)`, `NP(x_i − λ)`.
fn polytopes(aug: &AugmentedSystem) -> Result<Vec<Polytope>> {
    let n = aug.system().n_vars();
    let mut out = vec![Polytope::unit_simplex(n)];
    for p in aug.system().polys() {
        out.push(newton_polytope(p)?);
    }
    out.push(Polytope::new(n, aug.supports()[aug.lambda_index()].clone())?);
    Ok(out)
}

/// Nonempty subsets of `0..k` by increasing size, then lexicographically.
fn subsets(k: usize, max_size: Option<usize>) -> Vec<Vec<usize>> {
    let cap = max_size.unwrap_or(k).min(k);
    let mut out = Vec::new();
    for size in 1..=cap {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < k - size + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

fn displacements(n: usize, cfg: &SearchConfig) -> Vec<Displacement> {
    if n <= 8 {
        return Displacement::grid(n, cfg.epsilon);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0xD15B));
    let values = [0.0, -cfg.epsilon, cfg.epsilon];
    let mut out = vec![Displacement::zero(n)];
    out[0].epsilon = cfg.epsilon;
    while out.len() < MAX_DISPLACEMENTS {
        let delta = (0..n).map(|_| values[rng.random_range(0..3)]).collect();
        out.push(Displacement {
            delta,
            epsilon: cfg.epsilon,
        });
    }
    out
}

/// Acceptance tests on one basis; formulation chosen per preference.
fn evaluate(
    aug: &AugmentedSystem,
    basis: &[Monomial],
    cfg: &SearchConfig,
) -> std::result::Result<CandidateBasis, Rejection> {
    let t = multiplier_sets(basis, aug.supports());
    let rows: usize = t.iter().map(Vec::len).sum();
    if rows < basis.len() {
        return Err(Rejection::TooFewRows {
            rows,
            cols: basis.len(),
        });
    }
    if let Some(poly) = t.iter().position(Vec::is_empty) {
        return Err(Rejection::EmptyMultiplierSet { poly });
    }
    let first = match cfg.formulation {
        FormulationPreference::Alternate => Formulation::Alternate,
        _ => Formulation::Standard,
    };
    let cand = CandidateBasis::new(aug.hidden_var(), basis.to_vec(), t, first);
    let mat = build_matrix(&cand, aug).map_err(|_| Rejection::EmptyBasis)?;
    let rank = generic_rank(&mat, cfg);
    if rank < basis.len() {
        return Err(Rejection::RankDeficient {
            rank,
            cols: basis.len(),
        });
    }
    if a12_fullrank(&cand, &mat, cfg) {
        return Ok(cand);
    }
    if cfg.formulation == FormulationPreference::Auto {
        let alt = cand.with_formulation(Formulation::Alternate);
        if let Ok(alt_mat) = build_matrix(&alt, aug) {
            if a12_fullrank(&alt, &alt_mat, cfg) {
                return Ok(alt);
            }
        }
    }
    Err(Rejection::A12Deficient)
}
