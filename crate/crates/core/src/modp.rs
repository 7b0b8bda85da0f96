//! Arithmetic and rank over `ℤ/pℤ` for generic-rank tests.

/// `2³¹ − 1`.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

#[inline]
pub(crate) fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat; `p` must be prime and `a ≠ 0 mod p`.
pub(crate) fn inv(a: u64, p: u64) -> u64 {
    pow(a, p - 2, p)
}

pub(crate) fn neg(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// Exact residue of a finite double, read as the dyadic rational it
/// represents. `p` must be an odd prime.
pub(crate) fn from_f64(v: f64, p: u64) -> u64 {
    if v == 0.0 {
        return 0;
    }
    let bits = v.to_bits();
    let negative = bits >> 63 == 1;
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let mut r = mantissa % p;
    if exp >= 0 {
        r = mul(r, pow(2, exp as u64, p), p);
    } else {
        r = mul(r, pow(inv(2, p), (-exp) as u64, p), p);
    }
    if negative {
        neg(r, p)
    } else {
        r
    }
}

/// Rank of a dense matrix over `ℤ/pℤ` by Gaussian elimination.
pub(crate) fn rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let n_rows = rows.len();
    if n_rows == 0 {
        return 0;
    }
    let n_cols = rows[0].len();
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(piv) = (rank..n_rows).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let pinv = inv(rows[rank][col], p);
        for v in rows[rank][col..].iter_mut() {
            *v = mul(*v, pinv, p);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (v, q) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *v = (*v + p - mul(f, *q, p)) % p;
                }
            }
        }
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = DEFAULT_PRIME;

    #[test]
    fn dyadic_residues() {
        assert_eq!(from_f64(3.0, P), 3);
        assert_eq!(from_f64(-5.0, P), P - 5);
        // 0.5 · 2 = 1
        assert_eq!(mul(from_f64(0.5, P), 2, P), 1);
        assert_eq!(mul(from_f64(-0.75, P), 4, P), P - 3);
        assert_eq!(from_f64(0.0, P), 0);
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(vec![vec![0, 0], vec![0, 0]], P), 0);
        assert_eq!(rank(vec![vec![1, 2], vec![2, 4]], P), 1);
        assert_eq!(rank(vec![vec![1, 2], vec![3, 4], vec![1, 2]], P), 2);
        assert_eq!(rank(vec![], P), 0);
        // singular over ℚ: rows (1,2,3),(4,5,6),(7,8,9)
        assert_eq!(rank(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]], P), 2);
    }

    #[test]
    fn inverse_round_trip() {
        for a in [1u64, 2, 3, 12345, P - 1] {
            assert_eq!(mul(a, inv(a, P), P), 1);
        }
    }
}
