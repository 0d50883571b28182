//! Multivariate polynomials over Q with exact arithmetic.

use crate::error::{Error, Result};
use crate::order::MonomialOrder;
use crate::rat::{rat_one, Rat};
use crate::ring::{DegreeVector, Monomial, Ring, MAX_TOTAL_DEGREE};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of a multidegree query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multidegree {
    Zero,
    Homogeneous(DegreeVector),
    Inhomogeneous,
}

/// A polynomial: finitely many (monomial, nonzero coefficient) pairs.
///
/// Terms live in a `BTreeMap` keyed by the structural monomial order, so the
/// representation is canonical and deterministic independently of any
/// mathematical monomial order.
#[derive(Debug, Clone)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.terms == other.terms
    }
}
impl Eq for Polynomial {}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Polynomial {
    // structural order used only for deterministic generator sorting
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a: Vec<_> = self.terms.iter().collect();
        let b: Vec<_> = other.terms.iter().collect();
        a.cmp(&b)
    }
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> Self {
        Polynomial::constant(ring, rat_one())
    }

    pub fn constant(ring: &Ring, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(ring.num_vars()), c);
        }
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn var(ring: &Ring, idx: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(ring.num_vars(), idx), rat_one());
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Self> {
        let idx = ring
            .var_index(name)
            .ok_or_else(|| Error::UndeclaredVariable(name.into()))?;
        Ok(Polynomial::var(ring, idx))
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &Ring, pairs: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Polynomial::zero(ring);
        for (m, c) in pairs {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn same_ring(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self -= c * m * g`, in place. Reduction workhorse.
    pub(crate) fn sub_mul_term_in_place(&mut self, g: &Polynomial, m: &Monomial, c: &Rat) {
        for (gm, gc) in &g.terms {
            self.add_term(gm.mul(m), -(gc * c));
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert!(self.same_ring(other));
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        debug_assert!(self.same_ring(other));
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiply by a single term.
    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, cc)| (mm.mul(m), cc * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert!(self.same_ring(other));
        let mut out = Polynomial::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one(&self.ring);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Common multidegree of all terms, if any.
    pub fn multidegree(&self) -> Multidegree {
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Multidegree::Zero,
            Some(m) => self.ring.multidegree(m),
        };
        for m in it {
            if self.ring.multidegree(m) != first {
                return Multidegree::Inhomogeneous;
            }
        }
        Multidegree::Homogeneous(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        !matches!(self.multidegree(), Multidegree::Inhomogeneous)
    }

    /// Leading monomial under the given order.
    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.terms
            .keys()
            .max_by(|a, b| order.compare(a, b))
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rat)> {
        self.leading_monomial(order).map(|m| (m, &self.terms[m]))
    }

    /// Monic rescaling with respect to the given order.
    pub fn monic(&self, order: &MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = rat_one() / c.clone();
                self.scale(&inv)
            }
        }
    }

    /// Ring homomorphism: each source variable goes to `assignment[name]`
    /// (a polynomial in the target ring), or to the target variable of the
    /// same name when unassigned.
    pub fn substitute(
        &self,
        target: &Ring,
        assignment: &BTreeMap<String, Polynomial>,
    ) -> Result<Polynomial> {
        for p in assignment.values() {
            if p.ring() != target && !Arc::ptr_eq(p.ring(), target) {
                return Err(Error::RingMismatch(
                    "assignment polynomial outside the target ring".into(),
                ));
            }
        }
        // resolve images lazily: only variables that actually occur matter
        let mut images: Vec<Option<Polynomial>> = vec![None; self.ring.num_vars()];
        let image = |i: usize, images: &mut Vec<Option<Polynomial>>| -> Result<Polynomial> {
            if images[i].is_none() {
                let name = &self.ring.var_names()[i];
                let p = match assignment.get(name) {
                    Some(p) => p.clone(),
                    None => Polynomial::var_named(target, name)?,
                };
                images[i] = Some(p);
            }
            Ok(images[i].clone().unwrap())
        };
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&image(i, &mut images)?.pow(e as u32));
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn derivative(&self, idx: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exps()[idx];
            if e > 0 {
                let mut exps: smallvec::SmallVec<[u16; 16]> = m.exps().into();
                exps[idx] = e - 1;
                out.add_term(Monomial::new(exps), c * Rat::from_integer(e.into()));
            }
        }
        out
    }

    /// Exact division by `g`: returns `q` with `self = q*g`, or None when no
    /// such polynomial exists.
    pub fn exact_div(&self, g: &Polynomial) -> Option<Polynomial> {
        debug_assert!(self.same_ring(g));
        if g.is_zero() {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        let order = MonomialOrder::GrevLex;
        let (gm, gc) = g.leading_term(&order).unwrap();
        let gm = gm.clone();
        let gc = gc.clone();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.ring);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading_term(&order).unwrap();
            if !gm.divides(rm) {
                return None;
            }
            let m = gm.div(rm);
            let c = rc.clone() / gc.clone();
            quot.add_term(m.clone(), c.clone());
            rem = rem.sub(&g.mul_term(&m, &c));
        }
        Some(quot)
    }

    /// Deterministic text form: terms in descending grevlex, coefficients
    /// printed in the job grammar (so the CLI can round-trip it).
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut monos: Vec<&Monomial> = self.terms.keys().collect();
        monos.sort_by(|a, b| MonomialOrder::GrevLex.compare(b, a));
        let mut out = String::new();
        for (i, m) in monos.iter().enumerate() {
            let c = &self.terms[*m];
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push_str("- ");
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let cpart = crate::rat::format_rat(&abs);
            if m.is_one() {
                out.push_str(&cpart);
            } else if abs.is_one() {
                out.push_str(&m.render(&self.ring));
            } else {
                out.push_str(&format!("{}*{}", cpart, m.render(&self.ring)));
            }
        }
        out
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The arithmetic entry point with the full input contract: ring equality
/// and the total-degree cap are enforced here.
pub fn poly_arith(op: ArithOp, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    if !f.same_ring(g) {
        return Err(Error::RingMismatch("operands live in different rings".into()));
    }
    let out = match op {
        ArithOp::Add => f.add(g),
        ArithOp::Sub => f.sub(g),
        ArithOp::Mul => {
            let bound = f.total_degree() + g.total_degree();
            if bound > MAX_TOTAL_DEGREE && !f.is_zero() && !g.is_zero() {
                return Err(Error::DegreeCap { deg: bound, cap: MAX_TOTAL_DEGREE });
            }
            f.mul(g)
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};
    use crate::ring::RingSpec;

    fn xy() -> Ring {
        RingSpec::standard(&["x", "y"]).unwrap()
    }

    #[test]
    fn additive_inverse() {
        let r = xy();
        let x = Polynomial::var(&r, 0);
        assert!(x.add(&x.neg()).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let r = xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let lhs = poly_arith(ArithOp::Mul, &x.add(&y), &x.sub(&y)).unwrap();
        let rhs = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn binomial_cube() {
        // (x+y)^2 * (x+y) expands with coefficients 1,3,3,1
        let r = xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let s = x.add(&y);
        let cube = poly_arith(ArithOp::Mul, &s.pow(2), &s).unwrap();
        assert_eq!(cube.num_terms(), 4);
        let m = Monomial::new(smallvec::smallvec![2u16, 1]);
        assert_eq!(cube.coeff(&m), rat(3));
        assert_eq!(cube, s.pow(3));
    }

    #[test]
    fn multidegree_cases() {
        let r = RingSpec::bigraded(&["x0", "x1"], &["y0", "y1"]).unwrap();
        let x0 = Polynomial::var(&r, 0);
        let y1 = Polynomial::var(&r, 3);
        match x0.mul(&y1).multidegree() {
            Multidegree::Homogeneous(d) => assert_eq!(d.as_slice(), &[1, 1]),
            _ => panic!(),
        }
        assert_eq!(x0.add(&y1).multidegree(), Multidegree::Inhomogeneous);
        let std3 = RingSpec::standard(&["x0", "x1", "x2"]).unwrap();
        let p = Polynomial::var(&std3, 0)
            .pow(2)
            .mul(&Polynomial::var(&std3, 1));
        match p.multidegree() {
            Multidegree::Homogeneous(d) => assert_eq!(d.as_slice(), &[3]),
            _ => panic!(),
        }
    }

    #[test]
    fn substitution_examples() {
        // (x0*y0 + x1*y1)[y0:=1, y1:=0] = x0
        let big = RingSpec::standard(&["x0", "x1", "y0", "y1"]).unwrap();
        let small = RingSpec::standard(&["x0", "x1"]).unwrap();
        let p = Polynomial::var(&big, 0)
            .mul(&Polynomial::var(&big, 2))
            .add(&Polynomial::var(&big, 1).mul(&Polynomial::var(&big, 3)));
        let mut map = BTreeMap::new();
        map.insert("y0".to_string(), Polynomial::one(&small));
        map.insert("y1".to_string(), Polynomial::zero(&small));
        let q = p.substitute(&small, &map).unwrap();
        assert_eq!(q, Polynomial::var(&small, 0));

        // dehomogenize x0^2*x2 at x2 := 1
        let p3 = RingSpec::standard(&["x0", "x1", "x2"]).unwrap();
        let chart = RingSpec::affine(&["x0", "x1"]).unwrap();
        let f = Polynomial::var(&p3, 0).pow(2).mul(&Polynomial::var(&p3, 2));
        let mut map = BTreeMap::new();
        map.insert("x2".to_string(), Polynomial::one(&chart));
        assert_eq!(
            f.substitute(&chart, &map).unwrap(),
            Polynomial::var(&chart, 0).pow(2)
        );

        // undeclared target variable is an error
        let g = Polynomial::var(&p3, 1);
        let tiny = RingSpec::affine(&["x0"]).unwrap();
        let mut map = BTreeMap::new();
        map.insert("x2".to_string(), Polynomial::one(&tiny));
        assert!(g.substitute(&tiny, &map).is_err());
    }

    #[test]
    fn exact_division() {
        let r = xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let f = x.pow(2).sub(&y.pow(2));
        let q = f.exact_div(&x.add(&y)).unwrap();
        assert_eq!(q, x.sub(&y));
        assert!(f.exact_div(&x).is_none());
    }

    #[test]
    fn derivative_and_scale() {
        let r = xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let f = x.pow(3).mul(&y).scale(&ratio(1, 2));
        let fx = f.derivative(0);
        assert_eq!(fx, x.pow(2).mul(&y).scale(&ratio(3, 2)));
    }

    #[test]
    fn degree_cap_is_enforced() {
        let r = xy();
        let x = Polynomial::var(&r, 0);
        let f = x.pow(40);
        assert!(matches!(
            poly_arith(ArithOp::Mul, &f, &f),
            Err(Error::DegreeCap { .. })
        ));
    }

    #[test]
    fn render_is_grammar_compatible() {
        let r = xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let f = x.pow(2).scale(&rat(2)).sub(&y).add(&Polynomial::one(&r));
        assert_eq!(f.render(), "2*x^2 - y + 1");
    }
}
