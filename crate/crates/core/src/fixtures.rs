//! Reference problems used by tests, the CLI `verify` command and the
//! Python smoke test.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::oracle::bkk_2d;
use crate::poly::{Coefficient, Monomial, ParamPolynomial, PolySystem};

/// Canonical coefficients of [`s1`]: `x² + y² − 5`, `x·y − 2`.
pub const S1_COEFFS: [f64; 5] = [1.0, 1.0, -5.0, 1.0, -2.0];

/// Canonical coefficients of [`cubic`]: `x³ − 6x² + 11x − 6`.
pub const CUBIC_COEFFS: [f64; 4] = [1.0, -6.0, 11.0, -6.0];

fn slotted(n: usize, exps: &[&[i32]], first_slot: usize) -> ParamPolynomial {
    let terms = exps
        .iter()
        .enumerate()
        .map(|(k, e)| {
            debug_assert_eq!(e.len(), n);
            (Monomial::new(e.to_vec()), Coefficient::Slot(first_slot + k))
        })
        .collect();
    ParamPolynomial::new(n, terms).expect("fixture polynomial")
}

/// `s0·x² + s1·y² + s2 = 0`, `s3·x·y + s4 = 0`.
pub fn s1() -> PolySystem {
    let f1 = slotted(2, &[&[2, 0], &[0, 2], &[0, 0]], 0);
    let f2 = slotted(2, &[&[1, 1], &[0, 0]], 3);
    PolySystem::new(2, vec!["x".into(), "y".into()], vec![f1, f2]).expect("S1")
}

/// `s0·x³ + s1·x² + s2·x + s3 = 0`.
pub fn cubic() -> PolySystem {
    let f = slotted(1, &[&[3], &[2], &[1], &[0]], 0);
    PolySystem::new(1, vec!["x".into()], vec![f]).expect("cubic")
}

/// `s0·x² + s1 = 0`; with coefficients `(1, 1)` the roots are `±i`.
pub fn quadratic() -> PolySystem {
    let f = slotted(1, &[&[2], &[0]], 0);
    PolySystem::new(1, vec!["x".into()], vec![f]).expect("quadratic")
}

/// A seeded random sparse bivariate system: two polynomials, each with a
/// constant term plus two or three monomials of per-variable degree ≤ 3,
/// every coefficient a slot. Returns the system and a standard-normal
/// coefficient instance. Supports are redrawn until the BKK bound is
/// between 1 and 9.
pub fn random_sparse_bivariate(seed: u64) -> (PolySystem, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<[i32; 2]> = (0..=3)
        .flat_map(|a| (0..=3).map(move |b| [a, b]))
        .filter(|e| *e != [0, 0])
        .collect();
    loop {
        let mut supports: Vec<Vec<[i32; 2]>> = Vec::new();
        for _ in 0..2 {
            let k = rng.random_range(2..=3);
            let mut s: Vec<[i32; 2]> = pool.choose_multiple(&mut rng, k).copied().collect();
            s.push([0, 0]);
            supports.push(s);
        }
        let to_mono = |s: &Vec<[i32; 2]>| -> Vec<Monomial> {
            s.iter().map(|e| Monomial::new(e.to_vec())).collect()
        };
        let bkk = bkk_2d(&to_mono(&supports[0]), &to_mono(&supports[1]));
        if !(1..=9).contains(&bkk) {
            continue;
        }
        let mut slot = 0;
        let polys = supports
            .iter()
            .map(|s| {
                let exps: Vec<&[i32]> = s.iter().map(|e| e.as_slice()).collect();
                let p = slotted(2, &exps, slot);
                slot += s.len();
                p
            })
            .collect();
        let sys = PolySystem::new(2, vec!["x".into(), "y".into()], polys).expect("random");
        let coeffs = (0..sys.n_slots())
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        return (sys, coeffs);
    }
}
