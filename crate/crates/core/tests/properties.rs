//! Cross-module property suites: algebraic laws on random inputs, oracle
//! agreement between independent computation paths, and the structural
//! invariants of the degeneration toolkit.

use proptest::prelude::*;
use slopecm::groebner::{normal_form, s_polynomial, Budget};
use slopecm::hilbert::graded_dimension;
use slopecm::ideal::Ideal;
use slopecm::oracle::{dense_graded_dimension, rees_components_oracle};
use slopecm::order::MonomialOrder;
use slopecm::poly::{Multidegree, Polynomial};
use slopecm::rat::{rat, ratio, Rat};
use slopecm::rees::{power_compat, tilde_components};
use slopecm::ring::{Monomial, Ring, RingSpec};
use std::cmp::Ordering;

fn budget() -> Budget {
    Budget::default()
}

fn ring3() -> Ring {
    RingSpec::standard(&["x", "y", "z"]).unwrap()
}

prop_compose! {
    fn arb_monomial(nvars: usize, maxdeg: u16)
        (exps in proptest::collection::vec(0..=maxdeg, nvars))
        -> Vec<u16> {
        exps
    }
}

prop_compose! {
    fn arb_poly(nvars: usize)
        (terms in proptest::collection::vec(
            (arb_monomial(nvars, 3), -4i64..=4), 0..5))
        -> Vec<(Vec<u16>, i64)> {
        terms
    }
}

fn build_poly(ring: &Ring, data: &[(Vec<u16>, i64)]) -> Polynomial {
    Polynomial::from_terms(
        ring,
        data.iter().map(|(e, c)| {
            (
                Monomial::new(e.iter().copied().collect::<smallvec::SmallVec<[u16; 16]>>()),
                rat(*c),
            )
        }),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributivity_and_absorption(fd in arb_poly(3), gd in arb_poly(3), hd in arb_poly(3)) {
        let r = ring3();
        let f = build_poly(&r, &fd);
        let g = build_poly(&r, &gd);
        let h = build_poly(&r, &hd);
        // (f+g)h = fh + gh
        prop_assert_eq!(f.add(&g).mul(&h), f.mul(&h).add(&g.mul(&h)));
        // f*0 = 0
        prop_assert!(f.mul(&Polynomial::zero(&r)).is_zero());
        // associativity and commutativity of both operations
        prop_assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
    }

    #[test]
    fn multidegree_is_additive(fd in arb_poly(3), gd in arb_poly(3)) {
        let r = ring3();
        let f = build_poly(&r, &fd);
        let g = build_poly(&r, &gd);
        // restrict to homogeneous parts: pick the leading-degree part
        let top = |p: &Polynomial| -> Polynomial {
            let d = p.total_degree();
            Polynomial::from_terms(
                &r,
                p.terms()
                    .filter(|(m, _)| m.total_degree() == d)
                    .map(|(m, c)| (m.clone(), c.clone())),
            )
        };
        let ft = top(&f);
        let gt = top(&g);
        if ft.is_zero() || gt.is_zero() {
            return Ok(());
        }
        match (ft.multidegree(), gt.multidegree(), ft.mul(&gt).multidegree()) {
            (
                Multidegree::Homogeneous(a),
                Multidegree::Homogeneous(bb),
                Multidegree::Homogeneous(c),
            ) => {
                let sum: Vec<i64> = a.iter().zip(bb.iter()).map(|(x, y)| x + y).collect();
                prop_assert_eq!(sum, c.to_vec());
            }
            _ => prop_assert!(false, "leading parts must be homogeneous"),
        }
    }

    #[test]
    fn monomial_orders_are_orders(
        a in arb_monomial(3, 6),
        bb in arb_monomial(3, 6),
        c in arb_monomial(3, 6),
    ) {
        let mk = |e: &Vec<u16>| Monomial::new(e.iter().copied().collect::<smallvec::SmallVec<[u16;16]>>());
        let (ma, mb, mc) = (mk(&a), mk(&bb), mk(&c));
        for order in [
            MonomialOrder::Lex,
            MonomialOrder::GrevLex,
            MonomialOrder::eliminating(&[0], 3),
            MonomialOrder::weighted(vec![2, 1, 1], MonomialOrder::GrevLex).unwrap(),
        ] {
            // antisymmetry
            let ab = order.compare(&ma, &mb);
            let ba = order.compare(&mb, &ma);
            prop_assert_eq!(ab, ba.reverse());
            prop_assert_eq!(ab == Ordering::Equal, ma == mb);
            // transitivity
            if ab != Ordering::Greater && order.compare(&mb, &mc) != Ordering::Greater {
                prop_assert_ne!(order.compare(&ma, &mc), Ordering::Greater);
            }
            // multiplicativity
            if ab == Ordering::Less {
                prop_assert_eq!(order.compare(&ma.mul(&mc), &mb.mul(&mc)), Ordering::Less);
            }
            // 1 is minimal
            let one = Monomial::one(3);
            prop_assert_ne!(order.compare(&ma, &one), Ordering::Less);
        }
    }

    #[test]
    fn groebner_s_polynomials_vanish(f1 in arb_poly(3), f2 in arb_poly(3)) {
        let r = ring3();
        let gens: Vec<Polynomial> = [&f1, &f2]
            .iter()
            .map(|d| build_poly(&r, d))
            .filter(|p| !p.is_zero())
            .collect();
        if gens.is_empty() {
            return Ok(());
        }
        let i = Ideal::new(&r, gens.clone());
        let gb = match i.groebner(&MonomialOrder::GrevLex, &budget()) {
            Ok(gb) => gb,
            Err(_) => return Ok(()), // budget blowups are not law violations
        };
        for (a, p) in gb.polys().iter().enumerate() {
            for q in gb.polys().iter().skip(a + 1) {
                let s = s_polynomial(p, q, gb.order());
                prop_assert!(normal_form(&s, &gb).unwrap().is_zero());
            }
        }
        // normal form is idempotent
        let f = build_poly(&r, &f1);
        let nf = normal_form(&f, &gb).unwrap();
        prop_assert_eq!(normal_form(&nf, &gb).unwrap(), nf);
        // original generators are members
        for g in &gens {
            prop_assert!(normal_form(g, &gb).unwrap().is_zero());
        }
    }
}

// -- randomized homogeneous ideals for the Hilbert oracle ------------------

fn random_homogeneous_ideal(seed: u64, ring: &Ring) -> Ideal {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ngens = rng.gen_range(1..=3);
    let mut gens = Vec::new();
    for _ in 0..ngens {
        let deg = rng.gen_range(1..=4u16);
        let monos = slopecm::oracle::enumerate_monomials(ring, &[deg as i64]).unwrap();
        let nterms = rng.gen_range(1..=3).min(monos.len());
        let mut p = Polynomial::zero(ring);
        for _ in 0..nterms {
            let m = monos[rng.gen_range(0..monos.len())].clone();
            let c = rat(rng.gen_range(-3..=3i64));
            p = p.add(&Polynomial::monomial(ring, m, c));
        }
        if !p.is_zero() {
            gens.push(p);
        }
    }
    Ideal::new(ring, gens)
}

#[test]
fn hilbert_dimensions_agree_with_dense_oracle() {
    // random homogeneous ideals in <= 3 variables, all degrees <= 8
    for nvars in 2..=3usize {
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ring = RingSpec::standard(&refs).unwrap();
        for seed in 0..25u64 {
            let ideal = random_homogeneous_ideal(seed * 31 + nvars as u64, &ring);
            for deg in 0..=8i64 {
                assert_eq!(
                    graded_dimension(&ideal, &[deg], &budget()).unwrap(),
                    dense_graded_dimension(&ideal, &[deg]).unwrap(),
                    "seed {seed}, {nvars} vars, degree {deg}"
                );
            }
        }
    }
}

// -- degeneration toolkit ---------------------------------------------------

fn random_ideal_containing_u(seed: u64, ring: &Ring) -> Ideal {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = Polynomial::var_named(ring, "u").unwrap();
    let mut gens = vec![u];
    let nextra = rng.gen_range(1..=2);
    for _ in 0..nextra {
        let mut p = Polynomial::zero(ring);
        let nterms = rng.gen_range(1..=3);
        for _ in 0..nterms {
            let exps: smallvec::SmallVec<[u16; 16]> = (0..ring.num_vars())
                .map(|_| rng.gen_range(0..=2u16))
                .collect();
            let c = rat(rng.gen_range(-2..=2i64));
            p = p.add(&Polynomial::monomial(ring, Monomial::new(exps), c));
        }
        if !p.is_zero() {
            gens.push(p);
        }
    }
    Ideal::new(ring, gens)
}

#[test]
fn tilde_components_match_elimination_oracle() {
    let ring = RingSpec::standard(&["x", "u"]).unwrap();
    let u = Polynomial::var_named(&ring, "u").unwrap();
    let center = Ideal::principal(u.clone());
    for seed in 0..20u64 {
        let ideal = random_ideal_containing_u(seed, &ring);
        let fam = tilde_components(&ideal, &center, 10, &budget()).unwrap();
        let depth = 3.min(fam.components().len() - 1);
        let oracle = rees_components_oracle(&ideal, &u, depth, &budget()).unwrap();
        for j in 0..=depth {
            assert!(
                fam.components()[j].equals(&oracle[j], &budget()).unwrap(),
                "seed {seed}, level {j}"
            );
        }
    }
}

#[test]
fn stabilization_margin_is_consistent() {
    let ring = RingSpec::standard(&["x", "y", "u"]).unwrap();
    let center = Ideal::principal(Polynomial::var_named(&ring, "u").unwrap());
    for seed in 0..20u64 {
        let ideal = random_ideal_containing_u(seed + 1000, &ring);
        let fam = tilde_components(&ideal, &center, 12, &budget()).unwrap();
        if let Some(js) = fam.stabilization_index() {
            // re-derive the multiplication rule two steps past detection
            for j in js..(js + 3).min(fam.components().len() - 1) {
                let pushed = center.product(&fam.components()[j], &budget()).unwrap();
                assert!(
                    fam.components()[j + 1].equals(&pushed, &budget()).unwrap(),
                    "seed {seed}, step {j}"
                );
            }
        }
    }
}

#[test]
fn power_compat_implies_convolution_powers() {
    // when the check passes, the tilde family of I^m is the m-fold
    // convolution of the tilde family of I
    let ring = RingSpec::standard(&["x", "u"]).unwrap();
    let x = Polynomial::var_named(&ring, "x").unwrap();
    let u = Polynomial::var_named(&ring, "u").unwrap();
    let center = Ideal::principal(u.clone());
    let ideal = Ideal::new(&ring, [u.clone(), x.pow(2)]);
    let rep = power_compat(&ideal, &center, 3, None, &budget()).unwrap();
    assert!(rep.passed());
    for m in 2..=3u32 {
        let im = ideal.power(m, &budget()).unwrap();
        let fam_m = tilde_components(&im, &center, 10, &budget()).unwrap();
        let fam_1 = tilde_components(&ideal, &center, 10, &budget()).unwrap();
        let levels = 3usize;
        for j in 0..=levels {
            // sum over compositions j1+...+jm = j of C_{j1}***C_{jm}
            let mut convolution = Ideal::zero(&ring);
            for comp in compositions(j, m as usize) {
                let mut prod = Ideal::unit(&ring);
                for &ji in &comp {
                    let cj = fam_1
                        .components()
                        .get(ji)
                        .cloned()
                        .unwrap_or_else(|| {
                            // beyond the computed range: C_j = center^(j-j*) C_{j*}
                            let js = fam_1.stabilization_index().unwrap();
                            let tail = center
                                .power((ji - js) as u32, &budget())
                                .unwrap();
                            tail.product(&fam_1.components()[js], &budget()).unwrap()
                        });
                    prod = prod.product(&cj, &budget()).unwrap();
                }
                convolution = convolution.sum(&prod);
            }
            let direct = fam_m
                .components()
                .get(j)
                .cloned()
                .unwrap_or_else(|| {
                    im.intersect(&center.power(j as u32, &budget()).unwrap(), &budget())
                        .unwrap()
                });
            assert!(
                convolution.equals(&direct, &budget()).unwrap(),
                "m = {m}, level {j}"
            );
        }
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

#[test]
fn init_specializes_to_the_image_of_the_ideal() {
    // setting the cone coordinate to zero recovers the image of I in the
    // central coordinate ring
    let ring = RingSpec::standard(&["x", "u"]).unwrap();
    let x = Polynomial::var_named(&ring, "x").unwrap();
    let u = Polynomial::var_named(&ring, "u").unwrap();
    let center = Ideal::principal(u.clone());
    let ideal = Ideal::new(&ring, [u.clone(), x.pow(2)]);
    let init = slopecm::rees::init_ideal(&ideal, &center, &budget()).unwrap();
    let ext = init.ring().clone();
    let mut kill_s = std::collections::BTreeMap::new();
    kill_s.insert(
        slopecm::rees::INIT_VAR.to_string(),
        Polynomial::zero(&ext),
    );
    let specialized: Vec<Polynomial> = init
        .generators()
        .generators()
        .iter()
        .map(|g| g.substitute(&ext, &kill_s).unwrap())
        .collect();
    let empty = std::collections::BTreeMap::new();
    let image: Vec<Polynomial> = ideal
        .generators()
        .iter()
        .map(|g| g.substitute(&ext, &empty).unwrap())
        .collect();
    let lhs = Ideal::new(&ext, specialized).sum(init.relations());
    let rhs = Ideal::new(&ext, image).sum(init.relations());
    assert!(lhs.equals(&rhs, &budget()).unwrap());
}

// -- ideal calculus laws ------------------------------------------------------

#[test]
fn ideal_containment_chain() {
    let r = ring3();
    for seed in 0..12u64 {
        let a = random_homogeneous_ideal(seed * 7 + 1, &r);
        let bb = random_homogeneous_ideal(seed * 7 + 5, &r);
        if a.is_zero_ideal() || bb.is_zero_ideal() {
            continue;
        }
        let prod = a.product(&bb, &budget()).unwrap();
        let meet = a.intersect(&bb, &budget()).unwrap();
        // I*J <= I meet J <= I, J
        assert!(meet.contains_ideal(&prod, &budget()).unwrap(), "seed {seed}");
        assert!(a.contains_ideal(&meet, &budget()).unwrap(), "seed {seed}");
        assert!(bb.contains_ideal(&meet, &budget()).unwrap(), "seed {seed}");
        // (I : J) * J <= I
        let quot = a.quotient(&bb, &budget()).unwrap();
        let back = quot.product(&bb, &budget()).unwrap();
        assert!(a.contains_ideal(&back, &budget()).unwrap(), "seed {seed}");
        // saturation is idempotent
        let sat = a.saturation(&bb, &budget()).unwrap();
        let sat2 = sat.saturation(&bb, &budget()).unwrap();
        assert!(sat.equals(&sat2, &budget()).unwrap(), "seed {seed}");
    }
}

#[test]
fn ideal_power_addition_law() {
    let r = ring3();
    for seed in 0..8u64 {
        let i = random_homogeneous_ideal(seed * 13 + 3, &r);
        if i.is_zero_ideal() {
            continue;
        }
        for (a, bb) in [(1u32, 2u32), (2, 2), (1, 3)] {
            let lhs = i.power(a + bb, &budget()).unwrap();
            let rhs = i
                .power(a, &budget())
                .unwrap()
                .product(&i.power(bb, &budget()).unwrap(), &budget())
                .unwrap();
            assert!(lhs.equals(&rhs, &budget()).unwrap(), "seed {seed}, {a}+{bb}");
        }
    }
}

// -- weight normalization against the eigenbasis oracle ----------------------

#[test]
fn weight_sums_match_eigenweight_enumeration() {
    use slopecm::oracle::eigenweight_oracle;
    use slopecm::stability::{total_weight, RationalParam, SubschemeSpec, VarietySpec};

    // point in P^1 at c = 1 and c = 1/2
    let v = VarietySpec::projective_space(1, 1, &budget()).unwrap();
    let x0 = Polynomial::var(v.ring(), 0);
    let z = SubschemeSpec::new(&v, [x0], &budget()).unwrap();
    let c1 = RationalParam::new(rat(1)).unwrap();
    let c2 = RationalParam::new(ratio(1, 2)).unwrap();
    for k in [4i64, 6, 8] {
        let w = total_weight(&v, &z, &c1, k, &budget()).unwrap();
        let o = eigenweight_oracle(v.ring(), z.ideal(), 1, k, k, &budget()).unwrap();
        assert_eq!(w, o, "c=1, k={k}");
        let w = total_weight(&v, &z, &c2, k, &budget()).unwrap();
        let o = eigenweight_oracle(v.ring(), z.ideal(), 1, k / 2, k, &budget()).unwrap();
        assert_eq!(w, o, "c=1/2, k={k}");
    }

    // point in P^2 at c = 1/2
    let v2 = VarietySpec::projective_space(2, 1, &budget()).unwrap();
    let x1 = Polynomial::var(v2.ring(), 1);
    let x2 = Polynomial::var(v2.ring(), 2);
    let z2 = SubschemeSpec::new(&v2, [x1, x2], &budget()).unwrap();
    for k in [4i64, 6] {
        let w = total_weight(&v2, &z2, &c2, k, &budget()).unwrap();
        let o = eigenweight_oracle(v2.ring(), z2.ideal(), 1, k / 2, k, &budget()).unwrap();
        assert_eq!(w, o, "P2 c=1/2, k={k}");
    }
}

// -- scaling covariance -------------------------------------------------------

#[test]
fn df_scaling_covariance() {
    use slopecm::stability::{
        df_normal_cone, slope_mu, slope_mu_c, RationalParam, SubschemeSpec, VarietySpec,
    };

    // replacing d by r*d and c by r*c rescales DF by r^(2n) and mu - mu_c
    // by 1/r; signs are invariant
    let v1 = VarietySpec::projective_space(1, 1, &budget()).unwrap();
    let x0 = Polynomial::var(v1.ring(), 0);
    let z1 = SubschemeSpec::new(&v1, [x0.clone()], &budget()).unwrap();
    let v2 = VarietySpec::projective_space(1, 2, &budget()).unwrap();
    let z2 = SubschemeSpec::new(&v2, [Polynomial::var(v2.ring(), 0)], &budget()).unwrap();

    let c = RationalParam::new(ratio(1, 2)).unwrap();
    let rc = RationalParam::new(rat(1)).unwrap(); // r = 2
    let df1 = df_normal_cone(&v1, &z1, &c, None, &budget()).unwrap().df;
    let df2 = df_normal_cone(&v2, &z2, &rc, None, &budget()).unwrap().df;
    // n = 1: r^(2n) = 4
    assert_eq!(df2, df1.clone() * rat(4));

    let gap1 = slope_mu(&v1).unwrap() - slope_mu_c(&v1, &z1, &c, &budget()).unwrap();
    let gap2 = slope_mu(&v2).unwrap() - slope_mu_c(&v2, &z2, &rc, &budget()).unwrap();
    assert_eq!(gap2, gap1.clone() / rat(2));
    assert_eq!(slopecm::rat::sign(&df1), slopecm::rat::sign(&gap1));
    assert_eq!(slopecm::rat::sign(&df2), slopecm::rat::sign(&gap2));
    let _unused: Rat = rat(0);
}
