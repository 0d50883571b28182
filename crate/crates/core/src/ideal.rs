//! Ideal calculus: sums, products, powers, intersections, quotients,
//! saturations, equality, projective emptiness and the Jacobian smoothness
//! check.
//!
//! Intersections and quotients go through the auxiliary-variable elimination
//! mechanism. Ideals generated entirely by monomials take a combinatorial
//! shortcut (pairwise lcms / exponent arithmetic) because large monomial
//! powers blow the pair budget through the generic route; the shortcut is
//! property-tested against the elimination path.

use crate::error::{BudgetKind, Error, Result};
use crate::groebner::{normal_form, reduced_groebner, Budget, GroebnerBasis};
use crate::order::MonomialOrder;
use crate::poly::Polynomial;
use crate::rat::rat_one;
use crate::ring::Ring;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

const AUX_VAR: &str = "w#";
const SATURATION_CAP: usize = 64;

/// A finitely generated ideal with cached reduced Groebner bases.
///
/// Generators are stored canonically (sorted, deduplicated, zeros dropped);
/// the zero ideal keeps a single zero generator. Clones share the basis
/// cache.
#[derive(Debug, Clone)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<Polynomial>,
    cache: Arc<Mutex<HashMap<MonomialOrder, Arc<GroebnerBasis>>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Singular,
    /// Presentation outside the supported class (not a complete
    /// intersection of the stated codimension).
    Inconclusive,
}

impl Ideal {
    pub fn new(ring: &Ring, gens: impl IntoIterator<Item = Polynomial>) -> Ideal {
        let mut gens: Vec<Polynomial> = gens
            .into_iter()
            .inspect(|g| {
                assert!(
                    g.ring() == ring,
                    "ideal generator outside the ambient ring"
                );
            })
            .filter(|g| !g.is_zero())
            .collect();
        gens.sort();
        gens.dedup();
        if gens.is_empty() {
            gens.push(Polynomial::zero(ring));
        }
        Ideal { ring: ring.clone(), gens, cache: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn zero(ring: &Ring) -> Ideal {
        Ideal::new(ring, [])
    }

    pub fn unit(ring: &Ring) -> Ideal {
        Ideal::new(ring, [Polynomial::one(ring)])
    }

    pub fn principal(f: Polynomial) -> Ideal {
        let ring = f.ring().clone();
        Ideal::new(&ring, [f])
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    /// Nonzero generators (empty exactly for the zero ideal).
    pub fn nonzero_generators(&self) -> Vec<&Polynomial> {
        self.gens.iter().filter(|g| !g.is_zero()).collect()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.iter().all(|g| g.is_zero())
    }

    /// Every generator is a single term.
    pub fn is_monomial_ideal(&self) -> bool {
        let nz = self.nonzero_generators();
        !nz.is_empty() && nz.iter().all(|g| g.is_monomial())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.gens.iter().all(|g| g.is_homogeneous())
    }

    pub fn max_generator_degree(&self) -> u32 {
        self.gens.iter().map(|g| g.total_degree()).max().unwrap_or(0)
    }

    /// Reduced Groebner basis, memoized per order. The memo is insert-if-
    /// absent: concurrent computations of the same key are idempotent.
    pub fn groebner(&self, order: &MonomialOrder, budget: &Budget) -> Result<Arc<GroebnerBasis>> {
        if let Some(gb) = self.cache.lock().unwrap().get(order) {
            return Ok(gb.clone());
        }
        let gb = Arc::new(reduced_groebner(&self.gens, order, budget)?);
        let mut cache = self.cache.lock().unwrap();
        Ok(cache.entry(order.clone()).or_insert(gb).clone())
    }

    fn grevlex(&self, budget: &Budget) -> Result<Arc<GroebnerBasis>> {
        self.groebner(&MonomialOrder::GrevLex, budget)
    }

    /// Membership test: true iff the normal form of `f` vanishes.
    pub fn contains(&self, f: &Polynomial, budget: &Budget) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let gb = self.grevlex(budget)?;
        Ok(normal_form(f, &gb)?.is_zero())
    }

    pub fn contains_ideal(&self, other: &Ideal, budget: &Budget) -> Result<bool> {
        for g in &other.gens {
            if !self.contains(g, budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Extensional equality via mutual membership.
    pub fn equals(&self, other: &Ideal, budget: &Budget) -> Result<bool> {
        Ok(self.contains_ideal(other, budget)? && other.contains_ideal(self, budget)?)
    }

    pub fn is_unit(&self, budget: &Budget) -> Result<bool> {
        Ok(self.grevlex(budget)?.is_unit())
    }

    /// Replaces the generators by the reduced grevlex basis.
    pub fn interreduced(&self, budget: &Budget) -> Result<Ideal> {
        let gb = self.grevlex(budget)?;
        let out = Ideal::new(&self.ring, gb.polys().to_vec());
        out.cache
            .lock()
            .unwrap()
            .insert(MonomialOrder::GrevLex, gb.clone());
        Ok(out)
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        assert!(self.ring == other.ring, "ideal sum across rings");
        Ideal::new(
            &self.ring,
            self.gens.iter().chain(other.gens.iter()).cloned(),
        )
    }

    pub fn product(&self, other: &Ideal, budget: &Budget) -> Result<Ideal> {
        assert!(self.ring == other.ring, "ideal product across rings");
        if self.is_zero_ideal() || other.is_zero_ideal() {
            return Ok(Ideal::zero(&self.ring));
        }
        let bound = self.max_generator_degree() + other.max_generator_degree();
        if bound > budget.max_degree {
            return Err(Error::Budget {
                kind: BudgetKind::Degree,
                limit: budget.max_degree as usize,
            });
        }
        let mut gens = Vec::new();
        for a in self.nonzero_generators() {
            for b in other.nonzero_generators() {
                gens.push(a.mul(b));
            }
        }
        Ideal::new(&self.ring, gens).interreduced(budget)
    }

    /// `self^m`, interreducing after every multiplication step.
    pub fn power(&self, m: u32, budget: &Budget) -> Result<Ideal> {
        let mut out = Ideal::unit(&self.ring);
        for _ in 0..m {
            out = out.product(self, budget)?;
        }
        Ok(out)
    }

    /// `[unit, self, self^2, ..., self^m]` for reuse across many queries.
    pub fn powers(&self, m: u32, budget: &Budget) -> Result<Vec<Ideal>> {
        let mut out = vec![Ideal::unit(&self.ring)];
        for k in 1..=m {
            let next = out[(k - 1) as usize].product(self, budget)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Intersection via a fresh auxiliary variable and a block-elimination
    /// order; monomial ideals use the pairwise-lcm shortcut.
    pub fn intersect(&self, other: &Ideal, budget: &Budget) -> Result<Ideal> {
        assert!(self.ring == other.ring, "ideal intersection across rings");
        if self.is_zero_ideal() || other.is_zero_ideal() {
            return Ok(Ideal::zero(&self.ring));
        }
        if self.is_monomial_ideal() && other.is_monomial_ideal() {
            let a = self.interreduced(budget)?;
            let b = other.interreduced(budget)?;
            let mut gens = Vec::new();
            for f in a.nonzero_generators() {
                let (mf, _) = f.terms().next().unwrap();
                for g in b.nonzero_generators() {
                    let (mg, _) = g.terms().next().unwrap();
                    gens.push(Polynomial::monomial(
                        &self.ring,
                        mf.lcm(mg),
                        rat_one(),
                    ));
                }
            }
            return Ideal::new(&self.ring, gens).interreduced(budget);
        }

        let ext = self.ring.extend(&[AUX_VAR], "aux")?;
        let w = Polynomial::var_named(&ext, AUX_VAR)?;
        let one_minus_w = Polynomial::one(&ext).sub(&w);
        let empty = std::collections::BTreeMap::new();
        let mut gens = Vec::new();
        for f in self.nonzero_generators() {
            gens.push(f.substitute(&ext, &empty)?.mul(&w));
        }
        for g in other.nonzero_generators() {
            gens.push(g.substitute(&ext, &empty)?.mul(&one_minus_w));
        }
        let widx = ext.var_index(AUX_VAR).unwrap();
        let order = MonomialOrder::eliminating(&[widx], ext.num_vars());
        let gb = reduced_groebner(&gens, &order, budget)?;
        let mut result = Vec::new();
        for p in gb.polys() {
            if p.terms().all(|(m, _)| m.exps()[widx] == 0) {
                let q = p.substitute(&self.ring, &empty)?;
                assert!(
                    q.num_terms() == p.num_terms(),
                    "auxiliary variable leaked into an intersection result"
                );
                result.push(q);
            }
        }
        Ideal::new(&self.ring, result).interreduced(budget)
    }

    /// Ideal quotient `(self : other)`, via intersections with principal
    /// quotients.
    pub fn quotient(&self, other: &Ideal, budget: &Budget) -> Result<Ideal> {
        assert!(self.ring == other.ring, "ideal quotient across rings");
        let divisors = other.nonzero_generators();
        if divisors.is_empty() {
            return Ok(Ideal::unit(&self.ring));
        }
        let mut out: Option<Ideal> = None;
        for g in divisors {
            let part = if g.is_constant() {
                self.clone()
            } else {
                let meet = self.intersect(&Ideal::principal((*g).clone()), budget)?;
                let mut gens = Vec::new();
                for f in meet.nonzero_generators() {
                    let q = f.exact_div(g).ok_or_else(|| {
                        Error::InternalInvariant(
                            "intersection with a principal ideal produced a non-multiple".into(),
                        )
                    })?;
                    gens.push(q);
                }
                Ideal::new(&self.ring, gens)
            };
            out = Some(match out {
                None => part,
                Some(acc) => acc.intersect(&part, budget)?,
            });
        }
        out.unwrap().interreduced(budget)
    }

    /// Saturation `(self : other^inf)` by iterating quotients; the
    /// ascending chain is detected through ideal equality.
    pub fn saturation(&self, other: &Ideal, budget: &Budget) -> Result<Ideal> {
        let mut current = self.interreduced(budget)?;
        for _ in 0..SATURATION_CAP {
            let next = current.quotient(other, budget)?;
            if next.equals(&current, budget)? {
                return Ok(current);
            }
            current = next;
        }
        Err(Error::Budget { kind: BudgetKind::Iterations, limit: SATURATION_CAP })
    }

    /// Irrelevant ideal of a named block: all its variables.
    pub fn irrelevant(ring: &Ring, block: &str) -> Result<Ideal> {
        let blk = ring
            .block(block)
            .ok_or_else(|| Error::InvalidInput(format!("no block named `{block}`")))?;
        Ok(Ideal::new(
            ring,
            blk.vars.iter().map(|&i| Polynomial::var(ring, i)),
        ))
    }

    /// Saturate with respect to the irrelevant ideals of the given blocks,
    /// one after another.
    pub fn saturate_irrelevant(&self, blocks: &[&str], budget: &Budget) -> Result<Ideal> {
        let mut out = self.clone();
        for b in blocks {
            let irr = Ideal::irrelevant(&self.ring, b)?;
            out = out.saturation(&irr, budget)?;
        }
        Ok(out)
    }

    /// True iff the subscheme cut out in the projective space of `block` is
    /// empty: the saturation by the block's irrelevant ideal is the unit
    /// ideal.
    pub fn is_projectively_empty(&self, block: &str, budget: &Budget) -> Result<bool> {
        if !self.is_homogeneous() {
            return Err(Error::InvalidInput(
                "projective emptiness needs a homogeneous ideal".into(),
            ));
        }
        let sat = self.saturate_irrelevant(&[block], budget)?;
        sat.is_unit(budget)
    }

    /// Smoothness of the complete intersection cut out by this ideal, by the
    /// Jacobian criterion: smooth iff the ideal plus all codim-sized minors
    /// of the Jacobian matrix cuts out nothing projectively.
    pub fn jacobian_smoothness(&self, expected_codim: u32, budget: &Budget) -> Result<Smoothness> {
        if self.is_zero_ideal() {
            return Ok(Smoothness::Smooth);
        }
        let gens = self.nonzero_generators();
        if gens.len() != expected_codim as usize {
            return Ok(Smoothness::Inconclusive);
        }
        let n = self.ring.num_vars();
        let c = expected_codim as usize;
        if c > n {
            return Ok(Smoothness::Inconclusive);
        }
        let jac: Vec<Vec<Polynomial>> = gens
            .iter()
            .map(|g| (0..n).map(|j| g.derivative(j)).collect())
            .collect();
        let mut minors = Vec::new();
        for cols in combinations(n, c) {
            let det = determinant(&jac, &cols, &self.ring);
            if !det.is_zero() {
                minors.push(det);
            }
        }
        let total = Ideal::new(
            &self.ring,
            self.gens.iter().cloned().chain(minors),
        );
        let block = self.ring.blocks().first().map(|b| b.name.clone()).ok_or_else(|| {
            Error::InvalidInput("smoothness check needs a ring with a named block".into())
        })?;
        if total.is_projectively_empty(&block, budget)? {
            Ok(Smoothness::Smooth)
        } else {
            Ok(Smoothness::Singular)
        }
    }

    /// Render generators deterministically.
    pub fn render(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.render()).collect()
    }
}

/// Monomial ideal generated by the leading terms of a reduced basis.
pub fn leading_ideal(gb: &GroebnerBasis) -> Result<Ideal> {
    if !gb.is_reduced() {
        return Err(Error::InvalidInput("leading ideal needs a reduced basis".into()));
    }
    let ring = gb.ring().clone();
    Ok(Ideal::new(
        &ring,
        gb.leading_monomials()
            .into_iter()
            .map(|m| Polynomial::monomial(&ring, m, rat_one())),
    ))
}

/// Membership `f in I` as a standalone operation.
pub fn ideal_member(f: &Polynomial, ideal: &Ideal, budget: &Budget) -> Result<bool> {
    ideal.contains(f, budget)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant of the square submatrix of `rows` given by `cols`, by Laplace
/// expansion along the first row. Fine for the small codimensions we meet.
fn determinant(rows: &[Vec<Polynomial>], cols: &[usize], ring: &Ring) -> Polynomial {
    fn rec(rows: &[Vec<Polynomial>], row: usize, cols: &[usize], ring: &Ring) -> Polynomial {
        if cols.is_empty() {
            return Polynomial::one(ring);
        }
        let mut acc = Polynomial::zero(ring);
        for (idx, &c) in cols.iter().enumerate() {
            let entry = &rows[row][c];
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter_map(|(j, &cc)| (j != idx).then_some(cc))
                .collect();
            let minor = rec(rows, row + 1, &rest, ring);
            let signed = if idx % 2 == 0 { entry.mul(&minor) } else { entry.mul(&minor).neg() };
            acc = acc.add(&signed);
        }
        acc
    }
    rec(rows, 0, cols, ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn b() -> Budget {
        Budget::default()
    }

    fn ring_xy() -> Ring {
        RingSpec::standard(&["x", "y"]).unwrap()
    }

    fn vp(r: &Ring, i: usize) -> Polynomial {
        Polynomial::var(r, i)
    }

    #[test]
    fn sums_products_powers() {
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        let ix = Ideal::principal(x.clone());
        let iy = Ideal::principal(y.clone());
        // (x) + (y) = (x, y)
        let s = ix.sum(&iy);
        assert!(s.equals(&Ideal::new(&r, [x.clone(), y.clone()]), &b()).unwrap());
        // (x)*(1) = (x)
        let p = ix.product(&Ideal::unit(&r), &b()).unwrap();
        assert!(p.equals(&ix, &b()).unwrap());
        // (x, y^2)^2 = (x^2, x*y^2, y^4)
        let i = Ideal::new(&r, [x.clone(), y.pow(2)]);
        let sq = i.power(2, &b()).unwrap();
        let want = Ideal::new(&r, [x.pow(2), x.mul(&y.pow(2)), y.pow(4)]);
        assert!(sq.equals(&want, &b()).unwrap());
    }

    #[test]
    fn intersections() {
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        // (x) cap (y) = (xy)
        let meet = Ideal::principal(x.clone())
            .intersect(&Ideal::principal(y.clone()), &b())
            .unwrap();
        assert!(meet.equals(&Ideal::principal(x.mul(&y)), &b()).unwrap());
        // (x, y^2)^2 cap (x) = x*(x, y^2)
        let i = Ideal::new(&r, [x.clone(), y.pow(2)]);
        let lhs = i
            .power(2, &b())
            .unwrap()
            .intersect(&Ideal::principal(x.clone()), &b())
            .unwrap();
        let rhs = Ideal::principal(x.clone()).product(&i, &b()).unwrap();
        assert!(lhs.equals(&rhs, &b()).unwrap());
        // I cap (1) = I
        let meet = i.intersect(&Ideal::unit(&r), &b()).unwrap();
        assert!(meet.equals(&i, &b()).unwrap());
    }

    #[test]
    fn intersection_monomial_path_matches_general() {
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        let a = Ideal::new(&r, [x.pow(2), x.mul(&y)]);
        let bb = Ideal::new(&r, [y.pow(2), x.pow(3)]);
        let fast = a.intersect(&bb, &b()).unwrap();
        // force the elimination path with a redundant binomial generator
        let a2 = Ideal::new(&r, [x.pow(2), x.mul(&y), x.pow(2).add(&x.mul(&y))]);
        let slow = a2.intersect(&bb, &b()).unwrap();
        assert!(fast.equals(&slow, &b()).unwrap());
    }

    #[test]
    fn quotients_and_saturation() {
        let r3 = RingSpec::standard(&["x0", "x1", "x2"]).unwrap();
        let x0 = vp(&r3, 0);
        let x1 = vp(&r3, 1);
        // ((x*y) : (x)) = (y)
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        let q = Ideal::principal(x.mul(&y))
            .quotient(&Ideal::principal(x.clone()), &b())
            .unwrap();
        assert!(q.equals(&Ideal::principal(y.clone()), &b()).unwrap());
        // saturation((x0^2, x0*x1), (x0, x1)) = (x0)
        let i = Ideal::new(&r3, [x0.pow(2), x0.mul(&x1)]);
        let j = Ideal::new(&r3, [x0.clone(), x1.clone()]);
        let sat = i.saturation(&j, &b()).unwrap();
        assert!(sat.equals(&Ideal::principal(x0.clone()), &b()).unwrap());
        // idempotent
        let sat2 = sat.saturation(&j, &b()).unwrap();
        assert!(sat2.equals(&sat, &b()).unwrap());
        // saturation(I, (1)) = I
        let sat = i.saturation(&Ideal::unit(&r3), &b()).unwrap();
        assert!(sat.equals(&i, &b()).unwrap());
    }

    #[test]
    fn equality_cases() {
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        let a = Ideal::new(&r, [x.clone(), y.clone()]);
        let c = Ideal::new(&r, [y.clone(), x.clone()]);
        assert!(a.equals(&c, &b()).unwrap());
        // (x^2, x*y^2) = x*(x, y^2)
        let lhs = Ideal::new(&r, [x.pow(2), x.mul(&y.pow(2))]);
        let rhs = Ideal::principal(x.clone())
            .product(&Ideal::new(&r, [x.clone(), y.pow(2)]), &b())
            .unwrap();
        assert!(lhs.equals(&rhs, &b()).unwrap());
        assert!(!Ideal::principal(x.clone())
            .equals(&Ideal::principal(x.pow(2)), &b())
            .unwrap());
    }

    #[test]
    fn membership_examples() {
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        let i = Ideal::new(&r, [x.clone(), y.pow(2)]);
        assert!(ideal_member(&y.pow(4), &i, &b()).unwrap());
        assert!(!ideal_member(&y, &i, &b()).unwrap());
        // xy lies outside (x^2*y, x*y^2): every member has degree >= 3
        let j = Ideal::new(&r, [x.pow(2).mul(&y), x.mul(&y.pow(2))]);
        assert!(!ideal_member(&x.mul(&y), &j, &b()).unwrap());
    }

    #[test]
    fn projective_emptiness() {
        let r3 = RingSpec::standard(&["x0", "x1", "x2"]).unwrap();
        let x0 = vp(&r3, 0);
        let x1 = vp(&r3, 1);
        let x2 = vp(&r3, 2);
        let irr = Ideal::new(&r3, [x0.clone(), x1.clone(), x2.clone()]);
        assert!(irr.is_projectively_empty("x", &b()).unwrap());
        assert!(!Ideal::principal(x0.clone())
            .is_projectively_empty("x", &b())
            .unwrap());
        // (x0^2, x1) cuts out a double point, so it is nonempty; the ideal
        // is already saturated (x2 is a nonzerodivisor on the quotient)
        let i = Ideal::new(&r3, [x0.pow(2), x1.clone()]);
        assert!(!i.is_projectively_empty("x", &b()).unwrap());
        let sat = i.saturate_irrelevant(&["x"], &b()).unwrap();
        assert!(sat.equals(&i, &b()).unwrap());
    }

    #[test]
    fn jacobian_smoothness_cases() {
        let r3 = RingSpec::standard(&["x0", "x1", "x2"]).unwrap();
        let x0 = vp(&r3, 0);
        let x1 = vp(&r3, 1);
        let x2 = vp(&r3, 2);
        // smooth quadric x0^2 + x1^2 + x2^2
        let f = x0.pow(2).add(&x1.pow(2)).add(&x2.pow(2));
        assert_eq!(
            Ideal::principal(f).jacobian_smoothness(1, &b()).unwrap(),
            Smoothness::Smooth
        );
        // x0*x1 is singular at (0:0:1)
        let g = x0.mul(&x1);
        assert_eq!(
            Ideal::principal(g).jacobian_smoothness(1, &b()).unwrap(),
            Smoothness::Singular
        );
        // the zero ideal is the whole space
        assert_eq!(
            Ideal::zero(&r3).jacobian_smoothness(1, &b()).unwrap(),
            Smoothness::Smooth
        );
        // wrong presentation class
        let two = Ideal::new(&r3, [x0.clone(), x1.clone()]);
        assert_eq!(two.jacobian_smoothness(1, &b()).unwrap(), Smoothness::Inconclusive);
    }

    #[test]
    fn leading_ideal_examples() {
        let r = ring_xy();
        let x = vp(&r, 0);
        let y = vp(&r, 1);
        let i = Ideal::new(&r, [x.pow(2).sub(&y)]);
        let gb = i.groebner(&MonomialOrder::GrevLex, &b()).unwrap();
        let li = leading_ideal(&gb).unwrap();
        assert!(li.equals(&Ideal::principal(x.pow(2)), &b()).unwrap());
    }
}
