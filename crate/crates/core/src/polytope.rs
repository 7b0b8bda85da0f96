//! Newton polytopes, Minkowski sums and lattice points of displaced
//! polytopes.
//!
//! Polytopes are kept in V-representation. Membership is decided by the
//! feasibility of a convex-combination LP, so no facet enumeration is ever
//! needed and the code is dimension-agnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::poly::{Monomial, ParamPolynomial};

/// Feasibility tolerance for membership; boundary points are inside.
pub const CONTAINS_TOL: f64 = 1e-9;

/// Default cap on the number of lattice points in a bounding box.
pub const DEFAULT_BOX_CAP: u64 = 10_000_000;

/// Convex hull of a finite set of lattice points.
///
/// The generating set may contain non-vertex points.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    points: Vec<Monomial>,
}

impl Polytope {
    pub fn new(dim: usize, points: Vec<Monomial>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(p) = points.iter().find(|p| p.n_vars() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: p.n_vars(),
            });
        }
        Ok(Polytope { dim, points })
    }

    /// `conv{0, e_1, …, e_n}`.
    pub fn unit_simplex(n: usize) -> Self {
        let mut points = vec![Monomial::one(n)];
        points.extend((0..n).map(|i| Monomial::unit(n, i)));
        Polytope { dim: n, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Monomial] {
        &self.points
    }

    fn bounds(&self) -> (Vec<i32>, Vec<i32>) {
        let mut lo = vec![i32::MAX; self.dim];
        let mut hi = vec![i32::MIN; self.dim];
        for p in &self.points {
            for (k, &e) in p.exponents().iter().enumerate() {
                lo[k] = lo[k].min(e);
                hi[k] = hi[k].max(e);
            }
        }
        (lo, hi)
    }

    /// Is `x` a convex combination of the generating points (within
    /// [`CONTAINS_TOL`])?
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let (lo, hi) = self.bounds();
        for k in 0..self.dim {
            if x[k] < lo[k] as f64 - CONTAINS_TOL || x[k] > hi[k] as f64 + CONTAINS_TOL {
                return false;
            }
        }
        in_hull(&self.points, x)
    }

    /// Same polytope with duplicates and non-vertex points removed.
    pub fn pruned(&self) -> Polytope {
        let mut pts = self.points.clone();
        pts.sort();
        pts.dedup();
        let mut k = 0;
        while k < pts.len() {
            if pts.len() > 1 {
                let others: Vec<Monomial> = pts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, p)| p.clone())
                    .collect();
                if in_hull(&others, &pts[k].to_f64()) {
                    pts.remove(k);
                    continue;
                }
            }
            k += 1;
        }
        Polytope {
            dim: self.dim,
            points: pts,
        }
    }

    /// Vertex set after pruning, sorted.
    pub fn vertices(&self) -> Vec<Monomial> {
        self.pruned().points
    }

    /// `ℤⁿ ∩ (P + δ)`, sorted lexicographically.
    pub fn lattice_points(&self, d: &Displacement) -> Result<Vec<Monomial>> {
        self.lattice_points_capped(d, DEFAULT_BOX_CAP)
    }

    pub fn lattice_points_capped(&self, d: &Displacement, cap: u64) -> Result<Vec<Monomial>> {
        if d.delta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: d.delta.len(),
            });
        }
        let (lo, hi) = self.bounds();
        let lo: Vec<i32> = (0..self.dim)
            .map(|k| (lo[k] as f64 + d.delta[k] - CONTAINS_TOL).ceil() as i32)
            .collect();
        let hi: Vec<i32> = (0..self.dim)
            .map(|k| (hi[k] as f64 + d.delta[k] + CONTAINS_TOL).floor() as i32)
            .collect();
        let mut volume: u128 = 1;
        for k in 0..self.dim {
            if hi[k] < lo[k] {
                return Ok(Vec::new());
            }
            volume = volume.saturating_mul((hi[k] - lo[k] + 1) as u128);
        }
        if volume > cap as u128 {
            return Err(Error::PolytopeTooLarge { volume, cap });
        }
        let mut out = Vec::new();
        let mut z = lo.clone();
        loop {
            let shifted: Vec<f64> = z
                .iter()
                .zip(&d.delta)
                .map(|(&zi, &di)| zi as f64 - di)
                .collect();
            if in_hull(&self.points, &shifted) {
                out.push(Monomial::new(z.clone()));
            }
            // odometer, last coordinate fastest
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                if z[k] < hi[k] {
                    z[k] += 1;
                    break;
                }
                z[k] = lo[k];
            }
        }
    }
}

fn in_hull(points: &[Monomial], x: &[f64]) -> bool {
    let dim = x.len();
    // rows: each coordinate, then Σ w = 1
    let mut a = vec![vec![0.0; points.len()]; dim + 1];
    for (j, p) in points.iter().enumerate() {
        for (k, &e) in p.exponents().iter().enumerate() {
            a[k][j] = e as f64;
        }
        a[dim][j] = 1.0;
    }
    let mut b = x.to_vec();
    b.push(1.0);
    lp::phase_one(&a, &b) <= CONTAINS_TOL
}

/// `NP(f) = conv(supp f)`.
pub fn newton_polytope(p: &ParamPolynomial) -> Result<Polytope> {
    Polytope::new(p.n_vars(), p.support()?)
}

/// `P + Q`, generated by pairwise sums and pruned to its vertices.
pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            left: p.dim,
            right: q.dim,
        });
    }
    let mut points = Vec::with_capacity(p.points.len() * q.points.len());
    for a in &p.points {
        for b in &q.points {
            points.push(a.add(b));
        }
    }
    Ok(Polytope { dim: p.dim, points }.pruned())
}

/// Displacement vector with components in `{−ε, 0, ε}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub delta: Vec<f64>,
    pub epsilon: f64,
}

impl Displacement {
    pub fn new(delta: Vec<f64>, epsilon: f64) -> Result<Self> {
        if delta
            .iter()
            .any(|&d| d != 0.0 && d != epsilon && d != -epsilon)
        {
            return Err(Error::InvalidDisplacement(format!(
                "components must lie in {{-{epsilon}, 0, {epsilon}}}"
            )));
        }
        Ok(Displacement { delta, epsilon })
    }

    pub fn zero(n: usize) -> Self {
        Displacement {
            delta: vec![0.0; n],
            epsilon: 0.0,
        }
    }

    /// All `3ⁿ` displacements, zero first; component values cycle `0, −ε, +ε`.
    pub fn grid(n: usize, epsilon: f64) -> Vec<Displacement> {
        let values = [0.0, -epsilon, epsilon];
        let total = 3usize.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut delta = vec![0.0; n];
                for k in (0..n).rev() {
                    delta[k] = values[code % 3];
                    code /= 3;
                }
                Displacement { delta, epsilon }
            })
            .collect()
    }
}

/// Counter-clockwise convex hull of 2-D lattice points (collinear points
/// dropped). Degenerate inputs return the extreme points.
pub fn hull_2d(points: &[Monomial]) -> Vec<Monomial> {
    let mut pts: Vec<(i64, i64)> = points
        .iter()
        .map(|p| (p.exponents()[0] as i64, p.exponents()[1] as i64))
        .collect();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts
            .into_iter()
            .map(|(x, y)| Monomial::new(vec![x as i32, y as i32]))
            .collect();
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.into_iter()
        .map(|(x, y)| Monomial::new(vec![x as i32, y as i32]))
        .collect()
}

/// Twice the area of the convex hull of 2-D lattice points (shoelace).
pub fn twice_area_2d(points: &[Monomial]) -> i64 {
    let h = hull_2d(points);
    if h.len() < 3 {
        return 0;
    }
    let mut s = 0i64;
    for k in 0..h.len() {
        let a = h[k].exponents();
        let b = h[(k + 1) % h.len()].exponents();
        s += a[0] as i64 * b[1] as i64 - b[0] as i64 * a[1] as i64;
    }
    s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn m(e: &[i32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn set(v: &[Monomial]) -> BTreeSet<Monomial> {
        v.iter().cloned().collect()
    }

    fn pentagon() -> Polytope {
        Polytope::new(
            2,
            vec![m(&[0, 0]), m(&[2, 0]), m(&[3, 1]), m(&[1, 3]), m(&[0, 2])],
        )
        .unwrap()
    }

    /// Exact point-in-convex-polygon test on rationals `x/den`.
    fn exact_inside(hull: &[Monomial], x: (i64, i64), den: i64) -> bool {
        let n = hull.len();
        (0..n).all(|k| {
            let a = hull[k].exponents();
            let b = hull[(k + 1) % n].exponents();
            let (ax, ay) = (a[0] as i64 * den, a[1] as i64 * den);
            let (bx, by) = (b[0] as i64 * den, b[1] as i64 * den);
            (bx - ax) * (x.1 - ay) - (by - ay) * (x.0 - ax) >= 0
        })
    }

    #[test]
    fn newton_polytopes_of_s1() {
        let s1 = fixtures::s1();
        let p1 = newton_polytope(&s1.polys()[0]).unwrap();
        assert_eq!(set(p1.points()), set(&[m(&[2, 0]), m(&[0, 2]), m(&[0, 0])]));
        let p2 = newton_polytope(&s1.polys()[1]).unwrap();
        assert_eq!(set(p2.points()), set(&[m(&[1, 1]), m(&[0, 0])]));
        assert_eq!(
            set(Polytope::unit_simplex(2).points()),
            set(&[m(&[0, 0]), m(&[1, 0]), m(&[0, 1])])
        );
    }

    #[test]
    fn minkowski_examples() {
        let s = Polytope::unit_simplex(2);
        let ss = minkowski_sum(&s, &s).unwrap();
        for p in [[2, 0], [0, 2], [1, 1], [0, 0]] {
            assert!(ss.contains(&[p[0] as f64, p[1] as f64]));
        }
        assert_eq!(set(ss.points()), set(&[m(&[0, 0]), m(&[2, 0]), m(&[0, 2])]));

        let s1 = fixtures::s1();
        let p1 = newton_polytope(&s1.polys()[0]).unwrap();
        let p2 = newton_polytope(&s1.polys()[1]).unwrap();
        let q = minkowski_sum(&p1, &p2).unwrap();
        assert_eq!(set(q.points()), set(pentagon().points()));
        assert_eq!(twice_area_2d(q.points()), 12);

        let origin = Polytope::new(2, vec![m(&[0, 0])]).unwrap();
        assert_eq!(minkowski_sum(&p1, &origin).unwrap().vertices(), p1.vertices());

        let line = Polytope::unit_simplex(1);
        assert!(matches!(minkowski_sum(&p1, &line), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn contains_examples() {
        let s = Polytope::unit_simplex(2);
        assert!(s.contains(&[0.5, 0.5]));
        assert!(!s.contains(&[1.1, 0.0]));
        assert!(s.contains(&[1.0, 0.0]));
        assert!(pentagon().contains(&[1.0, 1.0]));
        assert!(!pentagon().contains(&[3.0, 3.0]));
    }

    #[test]
    fn lattice_point_examples() {
        let s = Polytope::unit_simplex(2);
        let two = minkowski_sum(&s, &s).unwrap();
        let pts = two.lattice_points(&Displacement::zero(2)).unwrap();
        assert_eq!(
            set(&pts),
            set(&[m(&[0, 0]), m(&[1, 0]), m(&[2, 0]), m(&[0, 1]), m(&[1, 1]), m(&[0, 2])])
        );
        let d = Displacement::new(vec![-0.45, -0.45], 0.45).unwrap();
        assert_eq!(s.lattice_points(&d).unwrap(), vec![m(&[0, 0])]);
        // 8 boundary points, 3 interior: Pick gives 6 = 3 + 8/2 − 1
        assert_eq!(pentagon().lattice_points(&Displacement::zero(2)).unwrap().len(), 11);
    }

    #[test]
    fn pentagon_count_matches_exact_scan() {
        let hull = hull_2d(pentagon().points());
        let mut exact = 0;
        for x in -1..=4 {
            for y in -1..=4 {
                if exact_inside(&hull, (x, y), 1) {
                    exact += 1;
                }
            }
        }
        assert_eq!(exact, 11);
    }

    #[test]
    fn box_cap_is_enforced() {
        let big = Polytope::new(2, vec![m(&[0, 0]), m(&[10_000, 10_000])]).unwrap();
        assert!(matches!(
            big.lattice_points(&Displacement::zero(2)),
            Err(Error::PolytopeTooLarge { .. })
        ));
    }

    #[test]
    fn displacement_validation_and_grid() {
        assert!(Displacement::new(vec![0.3, 0.0], 0.45).is_err());
        let g = Displacement::grid(2, 0.45);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], Displacement::zero(2).with_epsilon(0.45));
        let distinct: BTreeSet<String> = g.iter().map(|d| format!("{:?}", d.delta)).collect();
        assert_eq!(distinct.len(), 9);
    }

    impl Displacement {
        fn with_epsilon(mut self, e: f64) -> Self {
            self.epsilon = e;
            self
        }
    }

    #[test]
    fn zero_dimensional_polytope_has_one_lattice_point() {
        let p = Polytope::new(0, vec![Monomial::one(0)]).unwrap();
        assert_eq!(p.lattice_points(&Displacement::zero(0)).unwrap(), vec![Monomial::one(0)]);
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    fn arb_polygon() -> impl Strategy<Value = Vec<Monomial>> {
        proptest::collection::vec((0i32..7, 0i32..7), 3..=4)
            .prop_map(|v| v.into_iter().map(|(a, b)| m(&[a, b])).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn lattice_count_obeys_pick(pts in arb_polygon()) {
            let hull = hull_2d(&pts);
            prop_assume!(hull.len() >= 3);
            let a2 = twice_area_2d(&pts);
            let boundary: i64 = (0..hull.len()).map(|k| {
                let a = hull[k].exponents();
                let b = hull[(k + 1) % hull.len()].exponents();
                gcd((b[0] - a[0]) as i64, (b[1] - a[1]) as i64)
            }).sum();
            // Pick: A = I + B/2 − 1  ⇒  I + B = A + B/2 + 1
            let expected = (a2 + boundary) / 2 + 1;
            let poly = Polytope::new(2, pts).unwrap();
            let got = poly.lattice_points(&Displacement::zero(2)).unwrap().len() as i64;
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn contains_agrees_with_exact_orientation(pts in arb_polygon(), x in -10i64..80, y in -10i64..80) {
            let hull = hull_2d(&pts);
            prop_assume!(hull.len() >= 3);
            let poly = Polytope::new(2, pts).unwrap();
            let inside = poly.contains(&[x as f64 / 10.0, y as f64 / 10.0]);
            prop_assert_eq!(inside, exact_inside(&hull, (x, y), 10));
        }

        #[test]
        fn minkowski_commutative_associative(a in arb_polygon(), b in arb_polygon(), c in arb_polygon()) {
            let (pa, pb, pc) = (
                Polytope::new(2, a).unwrap(),
                Polytope::new(2, b).unwrap(),
                Polytope::new(2, c).unwrap(),
            );
            let ab = minkowski_sum(&pa, &pb).unwrap();
            let ba = minkowski_sum(&pb, &pa).unwrap();
            prop_assert_eq!(set(&ab.vertices()), set(&ba.vertices()));
            let ab_c = minkowski_sum(&ab, &pc).unwrap();
            let a_bc = minkowski_sum(&pa, &minkowski_sum(&pb, &pc).unwrap()).unwrap();
            prop_assert_eq!(set(&ab_c.vertices()), set(&a_bc.vertices()));
            prop_assert_eq!(set(&hull_2d(ab_c.points())), set(&ab_c.vertices()));
        }

        #[test]
        fn translation_shifts_lattice_points(pts in arb_polygon(), vx in -3i32..4, vy in -3i32..4) {
            let p = Polytope::new(2, pts).unwrap();
            let v = m(&[vx, vy]);
            let shifted = minkowski_sum(&p, &Polytope::new(2, vec![v.clone()]).unwrap()).unwrap();
            let base: BTreeSet<_> = p.lattice_points(&Displacement::zero(2)).unwrap()
                .into_iter().map(|z| z.add(&v)).collect();
            let moved = set(&shifted.lattice_points(&Displacement::zero(2)).unwrap());
            prop_assert_eq!(base, moved);
        }
    }
}
