//! Monomials, polynomials whose coefficients are symbolic slots, numeric
//! instantiation and evaluation.
//!
//! A [`PolySystem`] describes the *shape* of a family of polynomial systems:
//! every coefficient is either a slot, filled per instance from a flat
//! coefficient vector, or a fixed constant. The offline generator only ever
//! looks at the shape; the online solver instantiates it.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector `x^α`.
///
/// Polynomial terms always carry non-negative exponents. The same type is
/// used for lattice points and multipliers, which may be Laurent (negative)
/// when a polynomial has no constant term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<i32>);

/// Lattice points and monomials share a representation.
pub type LatticePoint = Monomial;

impl Monomial {
    pub fn new(exponents: Vec<i32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The monomial `x_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn add(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Drop coordinate `i`.
    pub fn without(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e.remove(i);
        Monomial(e)
    }

    /// `point^α` by repeated squaring; negative exponents invert.
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(point)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, &x)| acc * x.powi(e))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&e| e as f64).collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Graded reverse lexicographic comparison.
pub fn grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.0.iter().zip(&b.0).rev() {
        if x != y {
            // smaller exponent in the last differing variable is larger
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

/// Total orders on monomials of a fixed length.
#[derive(Clone, Debug)]
pub enum MonomialOrder {
    Grevlex,
    Lex,
    /// Monomials in `first` precede all others; grevlex inside each block.
    Block { first: BTreeSet<Monomial> },
}

impl MonomialOrder {
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::Block { first } => {
                let (fa, fb) = (first.contains(a), first.contains(b));
                match (fa, fb) {
                    (true, false) => Ordering::Less,
                    (false, true) => Ordering::Greater,
                    _ => grevlex(a, b),
                }
            }
        }
    }

    pub fn sort(&self, monomials: &mut [Monomial]) {
        monomials.sort_by(|a, b| self.compare(a, b));
    }
}

/// A coefficient of a parametric polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    /// Filled at solve time from `coeffs[slot_id]`.
    Slot(usize),
    Const(f64),
}

/// Where a slot lives inside a system.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSlot {
    pub poly_index: usize,
    pub monomial: Monomial,
    pub slot_id: usize,
}

/// A polynomial whose coefficients are slots or fixed constants.
///
/// Terms are kept sorted by descending grevlex.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPolynomial {
    n_vars: usize,
    terms: Vec<(Monomial, Coefficient)>,
}

impl ParamPolynomial {
    pub fn new(n_vars: usize, mut terms: Vec<(Monomial, Coefficient)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidPolynomial("polynomial has no terms".into()));
        }
        let mut seen = HashSet::new();
        for (m, c) in &terms {
            if m.n_vars() != n_vars {
                return Err(Error::InvalidPolynomial(format!(
                    "monomial {m} has {} exponents, expected {n_vars}",
                    m.n_vars()
                )));
            }
            if !m.is_nonnegative() {
                return Err(Error::InvalidPolynomial(format!("negative exponent in {m}")));
            }
            if !seen.insert(m.clone()) {
                return Err(Error::InvalidPolynomial(format!("duplicate monomial {m}")));
            }
            if let Coefficient::Const(v) = c {
                if !v.is_finite() {
                    return Err(Error::InvalidPolynomial(format!("non-finite constant at {m}")));
                }
            }
        }
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        Ok(ParamPolynomial { n_vars, terms })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[(Monomial, Coefficient)] {
        &self.terms
    }

    /// Terms that can be nonzero: every slot, and constants other than zero.
    pub fn live_terms(&self) -> impl Iterator<Item = &(Monomial, Coefficient)> {
        self.terms.iter().filter(|(_, c)| match c {
            Coefficient::Slot(_) => true,
            Coefficient::Const(v) => *v != 0.0,
        })
    }

    /// Exponent vectors of the live terms.
    pub fn support(&self) -> Result<Vec<Monomial>> {
        let s: Vec<Monomial> = self.live_terms().map(|(m, _)| m.clone()).collect();
        if s.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(s)
    }

    /// Largest exponent of variable `i`.
    pub fn degree_in(&self, i: usize) -> i32 {
        self.terms.iter().map(|(m, _)| m.exponents()[i]).max().unwrap_or(0)
    }
}

/// A family of polynomial systems `f_1 = … = f_m = 0` in `n` variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile", into = "ProblemFile")]
pub struct PolySystem {
    n_vars: usize,
    var_names: Vec<String>,
    polys: Vec<ParamPolynomial>,
    n_slots: usize,
}

impl PolySystem {
    pub fn new(n_vars: usize, var_names: Vec<String>, polys: Vec<ParamPolynomial>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidSystem("need at least one variable".into()));
        }
        if var_names.len() != n_vars {
            return Err(Error::InvalidSystem(format!(
                "{} variable names for {n_vars} variables",
                var_names.len()
            )));
        }
        if polys.is_empty() {
            return Err(Error::InvalidSystem("no polynomials".into()));
        }
        let mut slots = Vec::new();
        for p in &polys {
            if p.n_vars() != n_vars {
                return Err(Error::InvalidSystem("polynomial arity mismatch".into()));
            }
            for (_, c) in p.terms() {
                if let Coefficient::Slot(s) = c {
                    slots.push(*s);
                }
            }
        }
        slots.sort_unstable();
        for (k, s) in slots.iter().enumerate() {
            if *s != k {
                return Err(Error::InvalidSystem(format!(
                    "slot ids must be unique and contiguous from 0 (found {s} at position {k})"
                )));
            }
        }
        Ok(PolySystem {
            n_vars,
            var_names,
            polys,
            n_slots: slots.len(),
        })
    }

    /// Default variable names `x1..xn`.
    pub fn default_names(n_vars: usize) -> Vec<String> {
        (1..=n_vars).map(|i| format!("x{i}")).collect()
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_polys(&self) -> usize {
        self.polys.len()
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn polys(&self) -> &[ParamPolynomial] {
        &self.polys
    }

    pub fn slots(&self) -> Vec<CoefficientSlot> {
        let mut out = Vec::with_capacity(self.n_slots);
        for (i, p) in self.polys.iter().enumerate() {
            for (m, c) in p.terms() {
                if let Coefficient::Slot(s) = c {
                    out.push(CoefficientSlot {
                        poly_index: i,
                        monomial: m.clone(),
                        slot_id: *s,
                    });
                }
            }
        }
        out.sort_by_key(|s| s.slot_id);
        out
    }

    pub fn supports(&self) -> Result<Vec<Vec<Monomial>>> {
        self.polys.iter().map(|p| p.support()).collect()
    }

    /// Replace every slot by `coeffs[slot_id]`.
    pub fn instantiate(&self, coeffs: &[f64]) -> Result<Vec<NumPolynomial>> {
        if coeffs.len() != self.n_slots {
            return Err(Error::LengthMismatch {
                expected: self.n_slots,
                got: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(self
            .polys
            .iter()
            .map(|p| NumPolynomial {
                n_vars: self.n_vars,
                terms: p
                    .terms()
                    .iter()
                    .map(|(m, c)| {
                        let v = match c {
                            Coefficient::Slot(s) => coeffs[*s],
                            Coefficient::Const(v) => *v,
                        };
                        (m.clone(), v)
                    })
                    .collect(),
            })
            .collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        // Serialization of plain structs cannot fail.
        serde_json::to_string_pretty(self).expect("problem serialization") + "\n"
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// A polynomial with numeric coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NumPolynomial {
    n_vars: usize,
    terms: Vec<(Monomial, f64)>,
}

impl NumPolynomial {
    pub fn new(n_vars: usize, terms: Vec<(Monomial, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (m, _) in &terms {
            if m.n_vars() != n_vars {
                return Err(Error::InvalidPolynomial("monomial arity mismatch".into()));
            }
            if !seen.insert(m.clone()) {
                return Err(Error::InvalidPolynomial(format!("duplicate monomial {m}")));
            }
        }
        Ok(NumPolynomial { n_vars, terms })
    }

    /// Build from `(exponents, coefficient)` pairs.
    pub fn from_terms(n_vars: usize, terms: &[(&[i32], f64)]) -> Result<Self> {
        Self::new(
            n_vars,
            terms
                .iter()
                .map(|(e, c)| (Monomial::new(e.to_vec()), *c))
                .collect(),
        )
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[(Monomial, f64)] {
        &self.terms
    }

    pub fn support(&self) -> Result<Vec<Monomial>> {
        let s: Vec<Monomial> = self
            .terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(m, _)| m.clone())
            .collect();
        if s.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == 0.0)
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.n_vars {
            return Err(Error::LengthMismatch {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    fn eval_unchecked(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| m.eval(point) * *c)
            .sum()
    }

    /// `Σ |c_α · point^α|`.
    pub fn term_magnitude(&self, point: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| (m.eval(point) * *c).norm())
            .sum()
    }
}

/// Normalized equation residual: `max_k |f_k(x)| / (1 + Σ_α |c_α x^α|)`.
pub fn normalized_residual(polys: &[NumPolynomial], point: &[Complex64]) -> f64 {
    polys
        .iter()
        .map(|p| {
            let r = p.eval_unchecked(point).norm() / (1.0 + p.term_magnitude(point));
            if r.is_nan() {
                f64::INFINITY
            } else {
                r
            }
        })
        .fold(0.0, f64::max)
}

// JSON problem description:
// { "n_vars": 2, "var_names": ["x","y"],
//   "polys": [[{"exp":[2,0],"slot":0}, {"exp":[0,0],"const":-5.0}], ...] }

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    n_vars: usize,
    #[serde(default)]
    var_names: Vec<String>,
    polys: Vec<Vec<TermRepr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    exp: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot: Option<usize>,
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
}

impl TryFrom<ProblemFile> for PolySystem {
    type Error = Error;

    fn try_from(file: ProblemFile) -> Result<Self> {
        let names = if file.var_names.is_empty() {
            PolySystem::default_names(file.n_vars)
        } else {
            file.var_names
        };
        let polys = file
            .polys
            .into_iter()
            .map(|terms| {
                let terms = terms
                    .into_iter()
                    .map(|t| {
                        let c = match (t.slot, t.constant) {
                            (Some(s), None) => Coefficient::Slot(s),
                            (None, Some(v)) => Coefficient::Const(v),
                            _ => {
                                return Err(Error::Format(
                                    "each term needs exactly one of \"slot\" or \"const\"".into(),
                                ))
                            }
                        };
                        Ok((Monomial::new(t.exp), c))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ParamPolynomial::new(file.n_vars, terms)
            })
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(file.n_vars, names, polys)
    }
}

impl From<PolySystem> for ProblemFile {
    fn from(sys: PolySystem) -> Self {
        ProblemFile {
            n_vars: sys.n_vars,
            var_names: sys.var_names,
            polys: sys
                .polys
                .into_iter()
                .map(|p| {
                    p.terms
                        .into_iter()
                        .map(|(m, c)| {
                            let (slot, constant) = match c {
                                Coefficient::Slot(s) => (Some(s), None),
                                Coefficient::Const(v) => (None, Some(v)),
                            };
                            TermRepr {
                                exp: m.0,
                                slot,
                                constant,
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn m(e: &[i32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn support_reads_off_exponents() {
        let p = ParamPolynomial::new(
            2,
            vec![
                (m(&[2, 0]), Coefficient::Const(1.0)),
                (m(&[1, 1]), Coefficient::Const(2.0)),
                (m(&[0, 0]), Coefficient::Const(3.0)),
            ],
        )
        .unwrap();
        let s: BTreeSet<_> = p.support().unwrap().into_iter().collect();
        assert_eq!(s, [m(&[2, 0]), m(&[1, 1]), m(&[0, 0])].into_iter().collect());

        let k = ParamPolynomial::new(2, vec![(m(&[0, 0]), Coefficient::Const(5.0))]).unwrap();
        assert_eq!(k.support().unwrap(), vec![m(&[0, 0])]);

        let s1 = fixtures::s1();
        let f2 = &s1.polys()[1];
        let s: BTreeSet<_> = f2.support().unwrap().into_iter().collect();
        assert_eq!(s, [m(&[1, 1]), m(&[0, 0])].into_iter().collect());
    }

    #[test]
    fn zero_constant_polynomial_has_empty_support() {
        let p = ParamPolynomial::new(1, vec![(m(&[0]), Coefficient::Const(0.0))]).unwrap();
        assert!(matches!(p.support(), Err(Error::EmptySupport)));
        assert!(ParamPolynomial::new(1, vec![]).is_err());
    }

    #[test]
    fn duplicate_and_negative_monomials_rejected() {
        assert!(ParamPolynomial::new(
            1,
            vec![(m(&[1]), Coefficient::Slot(0)), (m(&[1]), Coefficient::Slot(1))]
        )
        .is_err());
        assert!(ParamPolynomial::new(1, vec![(m(&[-1]), Coefficient::Slot(0))]).is_err());
    }

    #[test]
    fn evaluate_known_values() {
        let s1 = fixtures::s1().instantiate(&fixtures::S1_COEFFS).unwrap();
        assert_eq!(s1[0].evaluate(&[c(1.0), c(2.0)]).unwrap(), c(0.0));
        assert_eq!(s1[1].evaluate(&[c(2.0), c(1.0)]).unwrap(), c(0.0));
        let cubic = fixtures::cubic().instantiate(&fixtures::CUBIC_COEFFS).unwrap();
        assert_eq!(cubic[0].evaluate(&[c(4.0)]).unwrap(), c(6.0));
        assert!(matches!(
            cubic[0].evaluate(&[c(1.0), c(2.0)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn instantiate_fills_slots() {
        let p = ParamPolynomial::new(
            1,
            vec![(m(&[1]), Coefficient::Slot(0)), (m(&[0]), Coefficient::Slot(1))],
        )
        .unwrap();
        let sys = PolySystem::new(1, vec!["x".into()], vec![p]).unwrap();
        let inst = sys.instantiate(&[1.0, -3.0]).unwrap();
        assert_eq!(inst[0].terms(), &[(m(&[1]), 1.0), (m(&[0]), -3.0)]);
        assert!(sys.instantiate(&[1.0]).is_err());
        assert!(matches!(
            sys.instantiate(&[1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        let zero = sys.instantiate(&[0.0, 0.0]).unwrap();
        assert!(zero[0].is_zero());
    }

    #[test]
    fn s1_canonical_instance() {
        let inst = fixtures::s1().instantiate(&fixtures::S1_COEFFS).unwrap();
        let expected0 = NumPolynomial::from_terms(
            2,
            &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -5.0)],
        )
        .unwrap();
        let set = |p: &NumPolynomial| -> BTreeSet<(Monomial, i64)> {
            p.terms().iter().map(|(m, c)| (m.clone(), *c as i64)).collect()
        };
        assert_eq!(set(&inst[0]), set(&expected0));
        let expected1 =
            NumPolynomial::from_terms(2, &[(&[1, 1], 1.0), (&[0, 0], -2.0)]).unwrap();
        assert_eq!(set(&inst[1]), set(&expected1));
    }

    #[test]
    fn slots_must_be_contiguous() {
        let p = ParamPolynomial::new(1, vec![(m(&[1]), Coefficient::Slot(1))]).unwrap();
        assert!(PolySystem::new(1, vec!["x".into()], vec![p]).is_err());
    }

    #[test]
    fn problem_json_round_trip_is_byte_stable() {
        for sys in [fixtures::s1(), fixtures::cubic()] {
            let text = sys.to_json();
            let back = PolySystem::from_json(&text).unwrap();
            assert_eq!(back, sys);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn problem_json_rejects_ambiguous_terms() {
        let bad = r#"{"n_vars":1,"var_names":["x"],"polys":[[{"exp":[1],"slot":0,"const":1.0}]]}"#;
        assert!(PolySystem::from_json(bad).is_err());
        let bad = r#"{"n_vars":1,"var_names":["x"],"polys":[[{"exp":[1]}]]}"#;
        assert!(PolySystem::from_json(bad).is_err());
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0i32..4, 3).prop_map(Monomial::new)
    }

    fn orders() -> Vec<MonomialOrder> {
        vec![
            MonomialOrder::Grevlex,
            MonomialOrder::Lex,
            MonomialOrder::Block {
                first: [m(&[1, 0, 0]), m(&[0, 1, 0]), m(&[2, 1, 0]), m(&[0, 0, 3])]
                    .into_iter()
                    .collect(),
            },
        ]
    }

    proptest! {
        #[test]
        fn monomial_orders_are_strict_total(a in arb_monomial(), b in arb_monomial(), c in arb_monomial()) {
            for ord in orders() {
                let ab = ord.compare(&a, &b);
                prop_assert_eq!(ab, ord.compare(&b, &a).reverse());
                prop_assert_eq!(ab == Ordering::Equal, a == b);
                if ab == Ordering::Less && ord.compare(&b, &c) == Ordering::Less {
                    prop_assert_eq!(ord.compare(&a, &c), Ordering::Less);
                }
            }
        }

        #[test]
        fn evaluation_is_linear_in_coefficients(
            c1 in proptest::collection::vec(-5.0f64..5.0, 5),
            c2 in proptest::collection::vec(-5.0f64..5.0, 5),
            x in -2.0f64..2.0, y in -2.0f64..2.0,
        ) {
            let sys = fixtures::s1();
            let pt = [Complex64::new(x, 0.3), Complex64::new(y, -0.1)];
            let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            for k in 0..2 {
                let a = sys.instantiate(&c1).unwrap()[k].evaluate(&pt).unwrap();
                let b = sys.instantiate(&c2).unwrap()[k].evaluate(&pt).unwrap();
                let s = sys.instantiate(&sum).unwrap()[k].evaluate(&pt).unwrap();
                prop_assert!((a + b - s).norm() < 1e-9 * (1.0 + s.norm()));
            }
        }

        #[test]
        fn instantiated_support_within_symbolic(coeffs in proptest::collection::vec(-3.0f64..3.0, 5)) {
            let sys = fixtures::s1();
            let inst = sys.instantiate(&coeffs).unwrap();
            for (p, q) in sys.polys().iter().zip(&inst) {
                let sym: BTreeSet<_> = p.support().unwrap().into_iter().collect();
                if let Ok(num) = q.support() {
                    prop_assert!(num.iter().all(|m| sym.contains(m)));
                    if coeffs.iter().all(|c| *c != 0.0) {
                        prop_assert_eq!(num.len(), sym.len());
                    }
                }
            }
        }
    }
}
