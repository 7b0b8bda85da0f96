//! Dense phase-one simplex for tiny feasibility problems.

const PIVOT_TOL: f64 = 1e-12;

/// Minimal total infeasibility of `A w = b, w ≥ 0`.
///
/// Solves the phase-one problem `min Σ a_r` over `A w + a = b` (rows sign
/// flipped so `b ≥ 0`) with Bland's rule. The system is feasible exactly
/// when the returned value is zero; callers compare against a tolerance.
pub(crate) fn phase_one(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let rows = a.len();
    debug_assert_eq!(rows, b.len());
    if rows == 0 {
        return 0.0;
    }
    let cols = a[0].len();
    let width = cols + rows + 1;
    let rhs = width - 1;

    // tableau row r: [A_r | e_r | b_r]
    let mut t = vec![vec![0.0; width]; rows];
    for r in 0..rows {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..cols {
            t[r][c] = sign * a[r][c];
        }
        t[r][cols + r] = 1.0;
        t[r][rhs] = sign * b[r];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // reduced costs of min Σ artificials
    let mut cost = vec![0.0; width];
    for row in &t {
        for c in 0..cols {
            cost[c] -= row[c];
        }
        cost[rhs] -= row[rhs];
    }

    // Bland's rule terminates; the bound is a guard against float stalls.
    for _ in 0..10_000 {
        let Some(enter) = (0..cols + rows).find(|&c| cost[c] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..rows {
            let v = t[r][enter];
            if v > PIVOT_TOL {
                let ratio = t[r][rhs] / v;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - PIVOT_TOL
                            || (ratio <= best + PIVOT_TOL && basis[r] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(pr) = leave else {
            // unbounded direction cannot occur for a phase-one objective
            break;
        };
        let pv = t[pr][enter];
        for v in t[pr].iter_mut() {
            *v /= pv;
        }
        let pivot_row = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr {
                let f = row[enter];
                if f != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = cost[enter];
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        basis[pr] = enter;
    }
    (-cost[rhs]).max(0.0)
}
