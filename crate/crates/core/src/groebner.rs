//! Buchberger's algorithm, normal forms and reduced Groebner bases.
//!
//! Plain Buchberger with the coprime and chain pair-elimination criteria and
//! the normal selection strategy (minimal lcm degree, then the order on the
//! lcm). Computation is capped by an explicit budget; blowing the cap is a
//! reported error, never an open-ended run.

use crate::error::{BudgetKind, Error, Result};
use crate::order::MonomialOrder;
use crate::poly::Polynomial;
use crate::rat::Rat;
use crate::ring::{Monomial, Ring};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// Caps for a single basis computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Max number of S-pairs taken off the queue.
    pub max_pairs: usize,
    /// Max total degree of any intermediate polynomial.
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_pairs: 200_000, max_degree: 64 }
    }
}

/// A Groebner basis, tagged with its order. `reduced` means monic, pairwise
/// interreduced generators sorted ascending by leading term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    order: MonomialOrder,
    polys: Vec<Polynomial>,
    reduced: bool,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Leading monomials of the basis elements.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys
            .iter()
            .filter_map(|p| p.leading_monomial(&self.order).cloned())
            .collect()
    }

    /// Basis of the unit ideal?
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.polys.is_empty()
    }
}

/// Remainder of multivariate division of `f` by the basis.
///
/// No term of the result is divisible by any leading term of the basis, and
/// `f - result` lies in the ideal generated by the basis.
pub fn normal_form(f: &Polynomial, basis: &GroebnerBasis) -> Result<Polynomial> {
    if f.ring() != &basis.ring {
        return Err(Error::RingMismatch("polynomial outside the basis ring".into()));
    }
    Ok(reduce_full(f.clone(), &basis.polys, &basis.order))
}

/// Full reduction: every term of the output is a standard monomial.
fn reduce_full(f: Polynomial, divisors: &[Polynomial], order: &MonomialOrder) -> Polynomial {
    let lts: Vec<(Monomial, Rat)> = divisors
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term(order).expect("nonzero divisor");
            (m.clone(), c.clone())
        })
        .collect();
    let mut work = f;
    let mut out = Polynomial::zero(work.ring());
    'outer: while !work.is_zero() {
        let (wm, wc) = {
            let (m, c) = work.leading_term(order).unwrap();
            (m.clone(), c.clone())
        };
        for (i, (ltm, ltc)) in lts.iter().enumerate() {
            if ltm.divides(&wm) {
                let m = ltm.div(&wm);
                let c = wc.clone() / ltc.clone();
                work.sub_mul_term_in_place(&divisors[i], &m, &c);
                continue 'outer;
            }
        }
        // leading term is standard: move it to the output
        out.add_term(wm.clone(), wc.clone());
        work.add_term(wm, -wc);
    }
    out
}

/// Reduce only until the leading term is standard (top reduction), used in
/// the Buchberger loop. Returns None when the polynomial reduces to zero.
fn reduce_top(
    mut work: Polynomial,
    divisors: &[Polynomial],
    order: &MonomialOrder,
    budget: &Budget,
) -> Result<Option<Polynomial>> {
    let lts: Vec<(Monomial, Rat)> = divisors
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term(order).expect("nonzero divisor");
            (m.clone(), c.clone())
        })
        .collect();
    'outer: while !work.is_zero() {
        if work.total_degree() > budget.max_degree {
            return Err(Error::Budget {
                kind: BudgetKind::Degree,
                limit: budget.max_degree as usize,
            });
        }
        let (wm, wc) = {
            let (m, c) = work.leading_term(order).unwrap();
            (m.clone(), c.clone())
        };
        for (i, (ltm, ltc)) in lts.iter().enumerate() {
            if ltm.divides(&wm) {
                let m = ltm.div(&wm);
                let c = wc.clone() / ltc.clone();
                work.sub_mul_term_in_place(&divisors[i], &m, &c);
                continue 'outer;
            }
        }
        return Ok(Some(work));
    }
    Ok(None)
}

/// S-polynomial of `f` and `g`.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &MonomialOrder) -> Polynomial {
    let (fm, fc) = f.leading_term(order).expect("nonzero");
    let (gm, gc) = g.leading_term(order).expect("nonzero");
    let l = fm.lcm(gm);
    let a = f.mul_term(&fm.div(&l), &(Rat::from_integer(1.into()) / fc.clone()));
    let b = g.mul_term(&gm.div(&l), &(Rat::from_integer(1.into()) / gc.clone()));
    a.sub(&b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Pair {
    deg: u32,
    lcm: Monomial,
    i: usize,
    j: usize,
}

/// Reduced Groebner basis of the ideal generated by `gens`.
///
/// Deterministic: the same generators under the same order always produce
/// the identical sorted basis.
pub fn reduced_groebner(
    gens: &[Polynomial],
    order: &MonomialOrder,
    budget: &Budget,
) -> Result<GroebnerBasis> {
    let ring = match gens.first() {
        None => {
            return Err(Error::InvalidInput("empty generator list".into()));
        }
        Some(g) => g.ring().clone(),
    };
    for g in gens {
        if g.ring() != &ring {
            return Err(Error::RingMismatch("generators live in different rings".into()));
        }
    }
    let mut basis: Vec<Polynomial> = Vec::new();
    let mut seed: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    seed.sort();
    seed.dedup();
    for g in seed {
        if g.total_degree() > budget.max_degree {
            return Err(Error::Budget {
                kind: BudgetKind::Degree,
                limit: budget.max_degree as usize,
            });
        }
        basis.push(g);
    }
    if basis.is_empty() {
        return Ok(GroebnerBasis { ring, order: order.clone(), polys: vec![], reduced: true });
    }

    // monomial ideals need no pairing at all: the reduced basis is the
    // minimal generating set
    if basis.iter().all(|p| p.is_monomial()) {
        let polys = interreduce(basis, order);
        return Ok(GroebnerBasis { ring, order: order.clone(), polys, reduced: true });
    }

    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue: Vec<Pair> = Vec::new();
    let push_pair = |queue: &mut Vec<Pair>,
                         pending: &mut BTreeSet<(usize, usize)>,
                         basis: &[Polynomial],
                         i: usize,
                         j: usize| {
        let li = basis[i].leading_monomial(order).unwrap();
        let lj = basis[j].leading_monomial(order).unwrap();
        let lcm = li.lcm(lj);
        queue.push(Pair { deg: lcm.total_degree(), lcm, i, j });
        pending.insert((i, j));
    };
    for j in 1..basis.len() {
        for i in 0..j {
            push_pair(&mut queue, &mut pending, &basis, i, j);
        }
    }

    let mut processed = 0usize;
    while !queue.is_empty() {
        // normal strategy: minimal lcm degree, then the order on the lcm,
        // then index pair for full determinism
        let best = queue
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.deg
                    .cmp(&b.deg)
                    .then_with(|| order.compare(&a.lcm, &b.lcm))
                    .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
            })
            .map(|(idx, _)| idx)
            .unwrap();
        let pair = queue.swap_remove(best);
        pending.remove(&(pair.i, pair.j));

        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::Budget { kind: BudgetKind::Pairs, limit: budget.max_pairs });
        }
        if pair.deg > budget.max_degree {
            return Err(Error::Budget {
                kind: BudgetKind::Degree,
                limit: budget.max_degree as usize,
            });
        }

        // S-polynomials of two monomials vanish identically
        if basis[pair.i].is_monomial() && basis[pair.j].is_monomial() {
            continue;
        }
        let li = basis[pair.i].leading_monomial(order).unwrap();
        let lj = basis[pair.j].leading_monomial(order).unwrap();
        // coprime criterion
        if li.coprime(lj) {
            continue;
        }
        // chain criterion: some k with LT(k) | lcm(i,j) and both pairs
        // (i,k), (j,k) already handled
        let mut chained = false;
        for (k, g) in basis.iter().enumerate() {
            if k == pair.i || k == pair.j {
                continue;
            }
            let lk = g.leading_monomial(order).unwrap();
            if lk.divides(&pair.lcm) {
                let a = (pair.i.min(k), pair.i.max(k));
                let b = (pair.j.min(k), pair.j.max(k));
                if !pending.contains(&a) && !pending.contains(&b) {
                    chained = true;
                    break;
                }
            }
        }
        if chained {
            continue;
        }

        let s = s_polynomial(&basis[pair.i], &basis[pair.j], order);
        if let Some(h) = reduce_top(s, &basis, order, budget)? {
            let h = h.monic(order);
            let t = basis.len();
            basis.push(h);
            for i in 0..t {
                push_pair(&mut queue, &mut pending, &basis, i, t);
            }
        }
    }

    let polys = interreduce(basis, order);
    Ok(GroebnerBasis { ring, order: order.clone(), polys, reduced: true })
}

/// Minimalize and tail-reduce a basis; output sorted ascending by leading
/// term under the order.
fn interreduce(mut basis: Vec<Polynomial>, order: &MonomialOrder) -> Vec<Polynomial> {
    basis.retain(|p| !p.is_zero());
    for p in basis.iter_mut() {
        *p = p.monic(order);
    }
    // minimal generating set of the leading-term ideal
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let li = basis[i].leading_monomial(order).unwrap().clone();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let lj = basis[j].leading_monomial(order).unwrap();
            if li.divides(lj) && (lj != &li || i < j) {
                keep[j] = false;
            }
        }
    }
    let mut minimal: Vec<Polynomial> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    // monomials carry no tails: minimalization already reduced them
    if minimal.iter().all(|p| p.is_monomial()) {
        minimal.sort_by(|a, b| {
            let la = a.leading_monomial(order).unwrap();
            let lb = b.leading_monomial(order).unwrap();
            match order.compare(la, lb) {
                Ordering::Equal => a.cmp(b),
                ord => ord,
            }
        });
        return minimal;
    }
    // tail reduction against the others until stable
    loop {
        let mut changed = false;
        for i in 0..minimal.len() {
            let rest: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter_map(|(j, p)| (j != i).then(|| p.clone()))
                .collect();
            let red = reduce_full(minimal[i].clone(), &rest, order).monic(order);
            if red != minimal[i] {
                minimal[i] = red;
                changed = true;
            }
        }
        minimal.retain(|p| !p.is_zero());
        if !changed {
            break;
        }
    }
    minimal.sort_by(|a, b| {
        let la = a.leading_monomial(order).unwrap();
        let lb = b.leading_monomial(order).unwrap();
        match order.compare(la, lb) {
            Ordering::Equal => a.cmp(b),
            ord => ord,
        }
    });
    minimal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn ring_xy() -> Ring {
        RingSpec::standard(&["x", "y"]).unwrap()
    }

    fn gb(gens: &[Polynomial], order: MonomialOrder) -> GroebnerBasis {
        reduced_groebner(gens, &order, &Budget::default()).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let r = ring_xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let g = gb(&[x.clone()], MonomialOrder::GrevLex);
        // x^2 is a member
        assert!(normal_form(&x.pow(2), &g).unwrap().is_zero());
        // y is untouched
        assert_eq!(normal_form(&y, &g).unwrap(), y);
        // one division step: x^2 + y against x^2 - y leaves 2y
        let g2 = gb(&[x.pow(2).sub(&y)], MonomialOrder::GrevLex);
        let nf = normal_form(&x.pow(2).add(&y), &g2).unwrap();
        assert_eq!(nf, y.scale(&crate::rat::rat(2)));
    }

    #[test]
    fn principal_and_trivial_bases() {
        let r = ring_xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let g = gb(&[x.pow(2)], MonomialOrder::GrevLex);
        assert_eq!(g.polys(), &[x.pow(2)]);
        // already reduced; output sorted ascending by leading term (y < x)
        let g = gb(&[x.clone(), y.clone()], MonomialOrder::GrevLex);
        assert_eq!(g.polys(), &[y.clone(), x.clone()]);
    }

    #[test]
    fn elimination_finds_the_parabola() {
        // {x - t, y - t^2} eliminating t contains y - x^2
        let r = RingSpec::standard(&["t", "x", "y"]).unwrap();
        let t = Polynomial::var(&r, 0);
        let x = Polynomial::var(&r, 1);
        let y = Polynomial::var(&r, 2);
        let order = MonomialOrder::eliminating(&[0], 3);
        let g = gb(&[x.sub(&t), y.sub(&t.pow(2))], order);
        let want = y.sub(&x.pow(2));
        assert!(
            g.polys().iter().any(|p| p == &want || p == &want.neg()),
            "basis: {:?}",
            g.polys().iter().map(|p| p.render()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn leading_monomials_examples() {
        let r = RingSpec::standard(&["x", "y"]).unwrap();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let g = gb(&[x.pow(2).sub(&y)], MonomialOrder::GrevLex);
        assert_eq!(g.leading_monomials(), vec![x.pow(2).leading_monomial(&MonomialOrder::GrevLex).unwrap().clone()]);
        let g = gb(&[x.clone(), y.pow(2)], MonomialOrder::GrevLex);
        assert_eq!(g.leading_monomials().len(), 2);
    }

    #[test]
    fn s_polynomials_of_basis_reduce_to_zero() {
        let r = RingSpec::standard(&["x", "y", "z"]).unwrap();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let z = Polynomial::var(&r, 2);
        // x^2 - y*z, x*y - z^2
        let gens = vec![x.pow(2).sub(&y.mul(&z)), x.mul(&y).sub(&z.pow(2))];
        let g = gb(&gens, MonomialOrder::GrevLex);
        for (i, a) in g.polys().iter().enumerate() {
            for b in g.polys().iter().skip(i + 1) {
                let s = s_polynomial(a, b, g.order());
                assert!(normal_form(&s, &g).unwrap().is_zero());
            }
        }
        // original generators are members
        for f in &gens {
            assert!(normal_form(f, &g).unwrap().is_zero());
        }
    }

    #[test]
    fn budget_errors_are_reported() {
        let r = ring_xy();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let tight = Budget { max_pairs: 0, max_degree: 64 };
        let res = reduced_groebner(
            &[x.pow(2).sub(&y), x.mul(&y).sub(&Polynomial::one(&r))],
            &MonomialOrder::GrevLex,
            &tight,
        );
        assert!(matches!(res, Err(Error::Budget { kind: BudgetKind::Pairs, .. })));
    }
}
