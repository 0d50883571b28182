//! Independent cross-check routines.
//!
//! Each oracle here reaches its answer along a different computational path
//! than the module it checks: graded dimensions by dense linear algebra
//! instead of standard-monomial counting, tilde components by elimination
//! in an extended one-parameter ring instead of direct intersections, and
//! total weights by enumerating an eigenbasis instead of summing section
//! defects. They exist for tests and verification jobs.

use crate::error::{Error, Result};
use crate::groebner::Budget;
use crate::ideal::Ideal;
use crate::order::MonomialOrder;
use crate::poly::{Multidegree, Polynomial};
use crate::rat::{rat_one, Rat};
use crate::ring::{Monomial, Ring};
use num::Zero;
use std::collections::BTreeMap;

/// All monomials of the given multidegree, by direct recursive enumeration.
pub fn enumerate_monomials(ring: &Ring, deg: &[i64]) -> Result<Vec<Monomial>> {
    if deg.len() != ring.num_grading_rows() {
        return Err(Error::InvalidInput("degree vector length mismatch".into()));
    }
    let grading = ring.grading();
    for row in grading {
        if row.iter().any(|&g| g < 0) {
            return Err(Error::InvalidInput("enumeration needs a nonnegative grading".into()));
        }
    }
    for i in 0..ring.num_vars() {
        if grading.iter().all(|row| row[i] == 0) {
            return Err(Error::InvalidInput("enumeration needs positively graded variables".into()));
        }
    }
    let nvars = ring.num_vars();
    let mut out = Vec::new();
    let mut exps = vec![0u16; nvars];
    fn rec(
        var: usize,
        rem: &mut Vec<i64>,
        exps: &mut Vec<u16>,
        grading: &[Vec<i64>],
        nvars: usize,
        out: &mut Vec<Monomial>,
    ) {
        if var == nvars {
            if rem.iter().all(|&d| d == 0) {
                out.push(Monomial::new(
                    exps.iter().copied().collect::<smallvec::SmallVec<[u16; 16]>>(),
                ));
            }
            return;
        }
        let mut bound = i64::MAX;
        for (row, r) in grading.iter().zip(rem.iter()) {
            if row[var] > 0 {
                bound = bound.min(r / row[var]);
            }
        }
        for e in 0..=bound.max(0) {
            let mut ok = true;
            for (row, r) in grading.iter().zip(rem.iter()) {
                if r - row[var] * e < 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for (row, r) in grading.iter().zip(rem.iter_mut()) {
                *r -= row[var] * e;
            }
            exps[var] = e as u16;
            rec(var + 1, rem, exps, grading, nvars, out);
            exps[var] = 0;
            for (row, r) in grading.iter().zip(rem.iter_mut()) {
                *r += row[var] * e;
            }
        }
    }
    let mut rem = deg.to_vec();
    if rem.iter().any(|&d| d < 0) {
        return Ok(vec![]);
    }
    rec(0, &mut rem, &mut exps, grading, nvars, &mut out);
    Ok(out)
}

/// Graded dimension of `(S/I)_deg` by dense linear algebra: the rank of the
/// coefficient matrix of all degree-matching multiples of the generators.
/// Independent of any Groebner computation.
pub fn dense_graded_dimension(ideal: &Ideal, deg: &[i64]) -> Result<u64> {
    let ring = ideal.ring().clone();
    let monos = enumerate_monomials(&ring, deg)?;
    if monos.is_empty() {
        return Ok(0);
    }
    let index: BTreeMap<&Monomial, usize> =
        monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for g in ideal.nonzero_generators() {
        let gdeg = match g.multidegree() {
            Multidegree::Homogeneous(d) => d,
            Multidegree::Zero => continue,
            Multidegree::Inhomogeneous => {
                return Err(Error::InvalidInput(
                    "dense dimension oracle needs homogeneous generators".into(),
                ))
            }
        };
        let target: Vec<i64> = deg.iter().zip(gdeg.iter()).map(|(&a, &b)| a - b).collect();
        if target.iter().any(|&t| t < 0) {
            continue;
        }
        for m in enumerate_monomials(&ring, &target)? {
            let prod = g.mul_term(&m, &rat_one());
            let mut row = vec![Rat::zero(); monos.len()];
            for (mm, c) in prod.terms() {
                row[index[mm]] = c.clone();
            }
            rows.push(row);
        }
    }
    let rank = rational_rank(&mut rows);
    Ok((monos.len() - rank) as u64)
}

/// Rank over Q by straightforward Gaussian elimination.
fn rational_rank(rows: &mut [Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0usize;
    for col in 0..ncols {
        let pivot = (rank..rows.len()).find(|&r| !rows[r][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = rat_one() / rows[rank][col].clone();
        for c in col..ncols {
            rows[rank][c] = rows[rank][c].clone() * inv.clone();
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..ncols {
                    rows[r][c] = rows[r][c].clone() - f.clone() * rows[rank][c].clone();
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

const REES_T: &str = "t#";
const REES_Z: &str = "z#";

/// Tilde components through the extended one-parameter presentation: the
/// ideal of the degeneration is realized in `R[t, z]/(z t - h)`, saturated
/// in `t`, and the level-`j` component is recovered as
/// `h^j * ((. : z^j) meet R)`. A second, independent route to
/// `I meet (h)^j`.
pub fn rees_components_oracle(
    ideal: &Ideal,
    h: &Polynomial,
    j_max: usize,
    budget: &Budget,
) -> Result<Vec<Ideal>> {
    let ring = ideal.ring().clone();
    if h.is_zero() || h.is_constant() {
        return Err(Error::NonPrincipalCenter);
    }
    let ext = ring.extend(&[REES_T, REES_Z], "rees")?;
    let empty = BTreeMap::new();
    let t = Polynomial::var_named(&ext, REES_T)?;
    let z = Polynomial::var_named(&ext, REES_Z)?;
    let relation = z.mul(&t).sub(&h.substitute(&ext, &empty)?);

    let mut gens: Vec<Polynomial> = ideal
        .nonzero_generators()
        .into_iter()
        .map(|g| g.substitute(&ext, &empty))
        .collect::<Result<_>>()?;
    gens.push(relation);
    let presented = Ideal::new(&ext, gens);
    let tilde = presented.saturation(&Ideal::principal(t.clone()), budget)?;

    let tz: Vec<usize> = [REES_T, REES_Z]
        .iter()
        .map(|n| ext.var_index(n).unwrap())
        .collect();
    let order = MonomialOrder::eliminating(&tz, ext.num_vars());
    let mut out = Vec::new();
    for j in 0..=j_max {
        let quot = if j == 0 {
            tilde.clone()
        } else {
            tilde.quotient(&Ideal::principal(z.pow(j as u32)), budget)?
        };
        let gb = quot.groebner(&order, budget)?;
        let mut contracted = Vec::new();
        for p in gb.polys() {
            if p.terms().all(|(m, _)| tz.iter().all(|&i| m.exps()[i] == 0)) {
                contracted.push(p.substitute(&ring, &empty)?);
            }
        }
        let base_part = Ideal::new(&ring, contracted);
        let hj = Ideal::principal(h.pow(j as u32));
        out.push(hj.product(&base_part, budget)?);
    }
    Ok(out)
}

/// Total weight by direct eigenbasis enumeration on a projective space:
/// for each monomial section of degree `d*k`, the weight is
/// `min(ord_Z, c*k) - c*k` where `ord_Z` is the vanishing order along the
/// monomial subscheme ideal. Twisting conventions cancel out of the
/// Donaldson-Futaki combination, so this pins the same normalization as
/// the section-defect sum.
pub fn eigenweight_oracle(
    ring: &Ring,
    z_ideal: &Ideal,
    d: i64,
    ck: i64,
    k: i64,
    budget: &Budget,
) -> Result<i64> {
    if !z_ideal.is_monomial_ideal() {
        return Err(Error::InvalidInput("eigenweight oracle needs a monomial subscheme".into()));
    }
    let powers = z_ideal.powers(ck.max(0) as u32, budget)?;
    let power_monos: Vec<Vec<Monomial>> = powers
        .iter()
        .map(|p| {
            p.nonzero_generators()
                .into_iter()
                .map(|g| g.terms().next().unwrap().0.clone())
                .collect()
        })
        .collect();
    let sections = enumerate_monomials(ring, &[d * k])?;
    let mut total = 0i64;
    for s in &sections {
        let mut ord = 0i64;
        for j in 1..=ck {
            if power_monos[j as usize].iter().any(|g| g.divides(s)) {
                ord = j;
            } else {
                break;
            }
        }
        total += ord.min(ck) - ck;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::graded_dimension;
    use crate::ring::RingSpec;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn dense_oracle_agrees_on_textbook_ideals() {
        let r = RingSpec::standard(&["x", "y", "z"]).unwrap();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let z = Polynomial::var(&r, 2);
        let ideals = [
            Ideal::zero(&r),
            Ideal::new(&r, [x.pow(2).sub(&y.mul(&z)), x.mul(&y).sub(&z.pow(2))]),
            Ideal::new(&r, [x.clone(), y.pow(2)]),
            Ideal::new(&r, [x.pow(2), x.mul(&y), y.pow(3)]),
        ];
        for i in &ideals {
            for deg in 0..=8i64 {
                assert_eq!(
                    dense_graded_dimension(i, &[deg]).unwrap(),
                    graded_dimension(i, &[deg], &b()).unwrap(),
                    "degree {deg}"
                );
            }
        }
    }

    #[test]
    fn rees_oracle_matches_direct_intersections() {
        let r = RingSpec::standard(&["x", "u"]).unwrap();
        let x = Polynomial::var(&r, 0);
        let u = Polynomial::var(&r, 1);
        let i = Ideal::new(&r, [u.clone(), x.pow(2)]);
        let comps = rees_components_oracle(&i, &u, 3, &b()).unwrap();
        let center = Ideal::principal(u.clone());
        for (j, comp) in comps.iter().enumerate() {
            let direct = i
                .intersect(&center.power(j as u32, &b()).unwrap(), &b())
                .unwrap();
            assert!(comp.equals(&direct, &b()).unwrap(), "level {j}");
        }
    }

    #[test]
    fn eigenweights_match_section_defects_on_p1() {
        // point in P^1 at c = 1: w(k) = -k(k+1)/2
        let r = RingSpec::standard(&["x0", "x1"]).unwrap();
        let z = Ideal::principal(Polynomial::var(&r, 0));
        for k in [3i64, 5, 8] {
            let w = eigenweight_oracle(&r, &z, 1, k, k, &b()).unwrap();
            assert_eq!(w, -k * (k + 1) / 2);
        }
    }
}
