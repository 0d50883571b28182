//! Stability invariants: slope, slope along a subscheme, total weights of
//! the induced one-parameter action, Donaldson-Futaki invariants of
//! deformation-to-the-normal-cone configurations, CM degrees of polarized
//! families over a rational base curve, the blow-up comparison identity and
//! the semistability scan.
//!
//! The Donaldson-Futaki value is always computed twice: once through the
//! weight sums on the central fiber and once through the Euler
//! characteristic of the compactified family. The two must agree to the
//! last bit; a mismatch is an internal error, never a tolerance.

use crate::error::{Error, Result};
use crate::groebner::Budget;
use crate::hilbert::{
    extract_coefficients, fit_polynomial, graded_dimension, interpolate_rat, section_row,
    HilbertPolynomial, SectionRow, SectionTable,
};
use crate::ideal::{Ideal, Smoothness};
use crate::poly::Polynomial;
use crate::rat::{rat, sign, Rat};
use crate::ring::{Ring, RingSpec};
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

/// Grid used when no explicit Seshadri-proxy grid is supplied.
pub fn default_proxy_grid() -> Vec<Rat> {
    (1..8).map(|i| Rat::new(i.into(), 8.into())).collect()
}

/// A polarized variety presented by a saturated homogeneous ideal and a
/// twist degree `d` (the polarization O(d)).
#[derive(Debug, Clone)]
pub struct VarietySpec {
    ring: Ring,
    ideal: Ideal,
    d: i64,
    dim: usize,
    a0: Rat,
    a1: Rat,
    hp: HilbertPolynomial,
    smoothness: Option<Smoothness>,
}

impl VarietySpec {
    pub fn new(
        ring: &Ring,
        gens: impl IntoIterator<Item = Polynomial>,
        d: i64,
        budget: &Budget,
    ) -> Result<VarietySpec> {
        if ring.num_grading_rows() != 1 {
            return Err(Error::InvalidInput(
                "a polarized variety lives in a single-graded ring".into(),
            ));
        }
        if d < 1 {
            return Err(Error::InvalidInput("polarization degree must be positive".into()));
        }
        let raw = Ideal::new(ring, gens);
        if !raw.is_homogeneous() {
            return Err(Error::InvalidInput("defining ideal must be homogeneous".into()));
        }
        let block = ring.blocks()[0].name.clone();
        let ideal = raw.saturate_irrelevant(&[&block], budget)?;
        if ideal.is_unit(budget)? {
            return Err(Error::InvalidInput("defining ideal cuts out the empty scheme".into()));
        }
        let cap = ring.num_vars() - 1;
        let bb = *budget;
        let sat = ideal.clone();
        let hp = fit_polynomial(
            move |k| graded_dimension(&sat, &[d * k], &bb).map(|v| rat(v as i64)),
            cap,
            4,
            1,
            3,
        )?;
        let dim = hp
            .degree()
            .ok_or_else(|| Error::InvalidInput("empty variety has no slope data".into()))?;
        let (a0, a1) = extract_coefficients(&hp, dim)?;
        Ok(VarietySpec { ring: ring.clone(), ideal, d, dim, a0, a1, hp, smoothness: None })
    }

    /// Projective space itself with polarization O(d).
    pub fn projective_space(n: usize, d: i64, budget: &Budget) -> Result<VarietySpec> {
        let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ring = RingSpec::standard(&refs)?;
        VarietySpec::new(&ring, [], d, budget)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn polarization_degree(&self) -> i64 {
        self.d
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn hilbert_polynomial(&self) -> &HilbertPolynomial {
        &self.hp
    }

    pub fn leading_coefficients(&self) -> (Rat, Rat) {
        (self.a0.clone(), self.a1.clone())
    }

    /// Runs and records the Jacobian criterion for the stated codimension.
    pub fn check_smoothness(&mut self, budget: &Budget) -> Result<Smoothness> {
        let codim = (self.ring.num_vars() - 1 - self.dim) as u32;
        let verdict = self.ideal.jacobian_smoothness(codim, budget)?;
        self.smoothness = Some(verdict);
        Ok(verdict)
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        self.smoothness
    }
}

/// A proper closed subscheme of a polarized variety.
#[derive(Debug, Clone)]
pub struct SubschemeSpec {
    ideal: Ideal,
}

impl SubschemeSpec {
    pub fn new(
        variety: &VarietySpec,
        gens: impl IntoIterator<Item = Polynomial>,
        budget: &Budget,
    ) -> Result<SubschemeSpec> {
        let raw = Ideal::new(variety.ring(), gens);
        if !raw.is_homogeneous() {
            return Err(Error::InvalidInput("subscheme ideal must be homogeneous".into()));
        }
        let block = variety.ring().blocks()[0].name.clone();
        let ideal = raw.sum(variety.ideal()).saturate_irrelevant(&[&block], budget)?;
        if !ideal.contains_ideal(variety.ideal(), budget)? {
            return Err(Error::InternalInvariant("saturation lost the ambient ideal".into()));
        }
        if ideal.equals(variety.ideal(), budget)? {
            return Err(Error::NotProperSubscheme("the subscheme equals the variety".into()));
        }
        if ideal.is_projectively_empty(&block, budget)? {
            return Err(Error::NotProperSubscheme("the subscheme is empty".into()));
        }
        Ok(SubschemeSpec { ideal })
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }
}

/// A positive rational parameter `c = p/q` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalParam {
    value: Rat,
}

impl RationalParam {
    pub fn new(value: Rat) -> Result<RationalParam> {
        if !value.is_positive() {
            return Err(Error::InvalidInput("the parameter c must be positive".into()));
        }
        Ok(RationalParam { value })
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    /// Denominator in lowest terms: the sampling stride.
    pub fn stride(&self) -> i64 {
        use num::ToPrimitive;
        self.value.denom().to_i64().expect("desk-scale denominator")
    }

    /// `c * k` as an integer; `k` must be a multiple of the stride.
    pub fn times(&self, k: i64) -> Result<i64> {
        use num::ToPrimitive;
        let v = self.value.clone() * rat(k);
        if !v.is_integer() {
            return Err(Error::InvalidInput(format!(
                "k = {k} is not a multiple of the stride {}",
                self.stride()
            )));
        }
        Ok(v.to_integer().to_i64().expect("desk-scale value"))
    }
}

/// Cached section counts of twisted fiber polarizations: saturations of
/// `I_V + I_Z^j` and their graded dimensions, reused across sample windows.
struct FiberSections<'a> {
    variety: &'a VarietySpec,
    z_ideal: &'a Ideal,
    block: String,
    z_powers: Vec<Ideal>,
    saturated: HashMap<u32, Ideal>,
    dims: HashMap<(u32, i64), i64>,
    budget: Budget,
}

impl<'a> FiberSections<'a> {
    fn new(variety: &'a VarietySpec, z_ideal: &'a Ideal, budget: &Budget) -> FiberSections<'a> {
        FiberSections {
            variety,
            z_ideal,
            block: variety.ring().blocks()[0].name.clone(),
            z_powers: vec![Ideal::unit(variety.ring())],
            saturated: HashMap::new(),
            dims: HashMap::new(),
            budget: *budget,
        }
    }

    fn z_power(&mut self, j: u32) -> Result<Ideal> {
        while self.z_powers.len() <= j as usize {
            let next = self
                .z_powers
                .last()
                .unwrap()
                .product(self.z_ideal, &self.budget)?;
            self.z_powers.push(next);
        }
        Ok(self.z_powers[j as usize].clone())
    }

    fn saturated_twist(&mut self, j: u32) -> Result<Ideal> {
        if let Some(i) = self.saturated.get(&j) {
            return Ok(i.clone());
        }
        let zp = self.z_power(j)?;
        let sum = self.variety.ideal().sum(&zp);
        let sat = sum.saturate_irrelevant(&[&self.block], &self.budget)?;
        self.saturated.insert(j, sat.clone());
        Ok(sat)
    }

    /// `h0(V, L^k)`.
    fn h0_structure(&mut self, k: i64) -> Result<i64> {
        let deg = self.variety.d * k;
        Ok(graded_dimension(self.variety.ideal(), &[deg], &self.budget)? as i64)
    }

    /// `h0(V, I_Z^j (x) L^k)`: sections vanishing along the j-th power,
    /// counted as h0 of the structure sheaf minus the length of the cut
    /// subscheme in that degree.
    fn h0_twisted(&mut self, j: u32, k: i64) -> Result<i64> {
        if j == 0 {
            return self.h0_structure(k);
        }
        let deg = self.variety.d * k;
        if let Some(&v) = self.dims.get(&(j, deg)) {
            return Ok(v);
        }
        let sat = self.saturated_twist(j)?;
        let cut = graded_dimension(&sat, &[deg], &self.budget)? as i64;
        let value = self.h0_structure(k)? - cut;
        self.dims.insert((j, deg), value);
        Ok(value)
    }
}

/// Slope of a polarized variety: subleading over leading Hilbert
/// coefficient.
pub fn slope_mu(variety: &VarietySpec) -> Result<Rat> {
    let (a0, a1) = variety.leading_coefficients();
    if a0.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    Ok(a1 / a0)
}

/// Leading coefficients of the twisted expansion at a fixed rational
/// twist `x`: the Hilbert data of sections vanishing to order `x*k` along
/// the subscheme.
pub fn ax_coefficients(
    variety: &VarietySpec,
    subscheme: &SubschemeSpec,
    x: &Rat,
    budget: &Budget,
) -> Result<(Rat, Rat)> {
    if x.is_negative() {
        return Err(Error::InvalidInput("the twist x must be nonnegative".into()));
    }
    if x.is_zero() {
        let (a0, a1) = variety.leading_coefficients();
        return Ok((a0, a1));
    }
    let param = RationalParam::new(x.clone())?;
    let stride = param.stride();
    let n = variety.dimension();
    let mut sections = FiberSections::new(variety, subscheme.ideal(), budget);
    let hp = fit_polynomial(
        move |k| {
            let j = param.times(k)? as u32;
            sections.h0_twisted(j, k).map(rat)
        },
        n,
        4 * stride,
        stride,
        3,
    )?;
    extract_coefficients(&hp, n)
}

/// Exact polynomials `a0(x)`, `a1(x)` (descending coefficients in `x`),
/// reconstructed from samples inside `(0, c]` and verified on two extra
/// samples plus the untwisted value at `x = 0`.
pub fn ax_polynomials(
    variety: &VarietySpec,
    subscheme: &SubschemeSpec,
    c: &RationalParam,
    budget: &Budget,
) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let n = variety.dimension();
    let count = n + 3;
    let xs: Vec<Rat> = (1..=count)
        .map(|i| c.value().clone() * Rat::new(i.into(), (count as i64).into()))
        .collect();
    let mut v0 = Vec::new();
    let mut v1 = Vec::new();
    for x in &xs {
        let (a0x, a1x) = ax_coefficients(variety, subscheme, x, budget)?;
        v0.push(a0x);
        v1.push(a1x);
    }
    let fit = |values: &[Rat]| -> Vec<Rat> {
        interpolate_rat(&xs[..=n], &values[..=n])
    };
    let a0_poly = fit(&v0);
    let a1_poly = fit(&v1);
    // verification samples: the two extra twists and x = 0
    for (i, x) in xs.iter().enumerate().skip(n + 1) {
        if eval_poly(&a0_poly, x) != v0[i] || eval_poly(&a1_poly, x) != v1[i] {
            return Err(Error::InconsistentXFit);
        }
    }
    let (a0, a1) = variety.leading_coefficients();
    if eval_poly(&a0_poly, &Rat::zero()) != a0 || eval_poly(&a1_poly, &Rat::zero()) != a1 {
        return Err(Error::InconsistentXFit);
    }
    Ok((a0_poly, a1_poly))
}

fn eval_poly(coeffs_desc: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs_desc {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

fn derivative_poly(coeffs_desc: &[Rat]) -> Vec<Rat> {
    let deg = coeffs_desc.len().saturating_sub(1);
    coeffs_desc
        .iter()
        .take(deg)
        .enumerate()
        .map(|(i, c)| c.clone() * rat((deg - i) as i64))
        .collect()
}

/// Integral of the polynomial over `[0, c]`, exactly.
fn integrate_poly(coeffs_desc: &[Rat], c: &Rat) -> Rat {
    let deg = coeffs_desc.len().saturating_sub(1);
    let mut acc = Rat::zero();
    for (i, coeff) in coeffs_desc.iter().enumerate() {
        let p = (deg - i) as i64;
        let term = coeff.clone() * pow_rat(c, p + 1) / rat(p + 1);
        acc += term;
    }
    acc
}

fn pow_rat(x: &Rat, p: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..p {
        acc *= x.clone();
    }
    acc
}

/// Slope along the subscheme: the Seshadri-twisted average of the
/// subleading data over `(0, c]`, from exact closed-form integration of
/// the fitted twist polynomials.
pub fn slope_mu_c(
    variety: &VarietySpec,
    subscheme: &SubschemeSpec,
    c: &RationalParam,
    budget: &Budget,
) -> Result<Rat> {
    let (a0_poly, a1_poly) = ax_polynomials(variety, subscheme, c, budget)?;
    let a0_deriv = derivative_poly(&a0_poly);
    let half = Rat::new(1.into(), 2.into());
    let numerator_poly: Vec<Rat> = add_polys(&a1_poly, &scale_poly(&a0_deriv, &half));
    let num = integrate_poly(&numerator_poly, c.value());
    let den = integrate_poly(&a0_poly, c.value());
    if den.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    Ok(num / den)
}

fn scale_poly(coeffs: &[Rat], s: &Rat) -> Vec<Rat> {
    coeffs.iter().map(|c| c.clone() * s.clone()).collect()
}

fn add_polys(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, c) in a.iter().rev().enumerate() {
        out[n - 1 - i] += c.clone();
    }
    for (i, c) in b.iter().rev().enumerate() {
        out[n - 1 - i] += c.clone();
    }
    while out.first().map(|c| c.is_zero()).unwrap_or(false) {
        out.remove(0);
    }
    out
}

/// Upper-bound proxy for the Seshadri constant: the largest grid value
/// whose leading twist coefficient stays positive while decreasing
/// strictly along the grid. Positivity of the leading coefficient is
/// necessary, not sufficient, for ampleness, hence "proxy".
pub fn seshadri_proxy(
    variety: &VarietySpec,
    subscheme: &SubschemeSpec,
    grid: &[Rat],
    budget: &Budget,
) -> Result<Option<Rat>> {
    let mut prev = variety.leading_coefficients().0;
    let mut best: Option<Rat> = None;
    let mut last_x = Rat::zero();
    for x in grid {
        if *x <= last_x {
            return Err(Error::InvalidInput("proxy grid must be strictly increasing".into()));
        }
        last_x = x.clone();
        let a0x = match ax_coefficients(variety, subscheme, x, budget) {
            Ok((a0x, _)) => a0x,
            // beyond the polynomial range nothing further can be certified
            Err(Error::Stabilization(_)) | Err(Error::DegreeExceedsExpectation { .. }) => break,
            Err(e) => return Err(e),
        };
        if a0x.is_positive() && a0x < prev {
            best = Some(x.clone());
            prev = a0x;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Total weight of the induced action at polarization power `k`: the sum
/// over twist levels `1..=ck` of the defect `h0(I_Z^j L^k) - h0(L^k)`.
pub fn total_weight(
    variety: &VarietySpec,
    subscheme: &SubschemeSpec,
    c: &RationalParam,
    k: i64,
    budget: &Budget,
) -> Result<i64> {
    let mut sections = FiberSections::new(variety, subscheme.ideal(), budget);
    weight_with_cache(&mut sections, c, k)
}

fn weight_with_cache(sections: &mut FiberSections<'_>, c: &RationalParam, k: i64) -> Result<i64> {
    let ck = c.times(k)?;
    if ck <= 0 {
        return Ok(0);
    }
    let h0 = sections.h0_structure(k)?;
    let mut w = 0i64;
    for j in 1..=ck {
        w += sections.h0_twisted(j as u32, k)? - h0;
    }
    Ok(w)
}

/// A polarized family over the rational base curve, presented bigraded
/// with the base block named `y` carrying exactly two variables; the fiber
/// over `(1:0)` is the distinguished one.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    ring: Ring,
    ideal: Ideal,
    d: i64,
    fiber: VarietySpec,
    fiber_ring: Ring,
    fiber_over_zero: Ideal,
    center: Ideal,
}

impl FamilySpec {
    pub fn new(
        ring: &Ring,
        gens: impl IntoIterator<Item = Polynomial>,
        d: i64,
        budget: &Budget,
    ) -> Result<FamilySpec> {
        if ring.num_grading_rows() != 2 {
            return Err(Error::InvalidInput("a family ring carries two grading rows".into()));
        }
        let yblock = ring
            .block("y")
            .ok_or_else(|| Error::InvalidInput("family ring needs a `y` block".into()))?
            .clone();
        if yblock.vars.len() != 2 {
            return Err(Error::InvalidInput("the base block carries exactly two variables".into()));
        }
        let xblock = ring
            .block("x")
            .ok_or_else(|| Error::InvalidInput("family ring needs an `x` block".into()))?
            .clone();
        let raw = Ideal::new(ring, gens);
        if !raw.is_homogeneous() {
            return Err(Error::InvalidInput("family ideal must be bihomogeneous".into()));
        }
        let ideal = raw.saturate_irrelevant(&["x", "y"], budget)?;

        let xnames: Vec<String> = xblock
            .vars
            .iter()
            .map(|&i| ring.var_names()[i].clone())
            .collect();
        let xrefs: Vec<&str> = xnames.iter().map(|s| s.as_str()).collect();
        let fiber_ring = RingSpec::standard(&xrefs)?;

        let y0 = ring.var_names()[yblock.vars[0]].clone();
        let y1 = ring.var_names()[yblock.vars[1]].clone();
        let fiber_at = |a: i64, bv: i64| -> Result<Vec<Polynomial>> {
            let mut map = BTreeMap::new();
            map.insert(y0.clone(), Polynomial::constant(&fiber_ring, rat(a)));
            map.insert(y1.clone(), Polynomial::constant(&fiber_ring, rat(bv)));
            ideal
                .generators()
                .iter()
                .map(|g| g.substitute(&fiber_ring, &map))
                .collect()
        };

        // flatness spot check: fibers over (1:0), (0:1) and (1:1) carry the
        // same Hilbert polynomial
        let mut specs = Vec::new();
        for (a, bv) in [(1, 0), (0, 1), (1, 1)] {
            let gens = fiber_at(a, bv)?;
            let v = VarietySpec::new(&fiber_ring, gens, d, budget)?;
            specs.push(v);
        }
        if specs[0].hilbert_polynomial().coefficients != specs[1].hilbert_polynomial().coefficients
            || specs[1].hilbert_polynomial().coefficients
                != specs[2].hilbert_polynomial().coefficients
        {
            return Err(Error::FlatnessCheck(
                "fibers over (1:0), (0:1), (1:1) have different Hilbert polynomials".into(),
            ));
        }
        let fiber_over_zero = specs[0].ideal().clone();
        let fiber = specs.pop().unwrap();

        let y1_poly = Polynomial::var_named(ring, &y1)?;
        let center = ideal
            .sum(&Ideal::principal(y1_poly))
            .saturate_irrelevant(&["x", "y"], budget)?;

        Ok(FamilySpec { ring: ring.clone(), ideal, d, fiber, fiber_ring, fiber_over_zero, center })
    }

    /// Product family `V x P^1` with the pulled-back polarization.
    pub fn product(variety: &VarietySpec, budget: &Budget) -> Result<FamilySpec> {
        let (ring, gens) = product_ring_of(variety)?;
        FamilySpec::new(&ring, gens, variety.polarization_degree(), budget)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn fiber(&self) -> &VarietySpec {
        &self.fiber
    }

    pub fn fiber_ring(&self) -> &Ring {
        &self.fiber_ring
    }

    /// Saturated ideal of the fiber over `(1:0)` inside the fiber ring.
    pub fn fiber_over_zero(&self) -> &Ideal {
        &self.fiber_over_zero
    }

    /// Saturated ideal of the distinguished fiber inside the family ring.
    pub fn center(&self) -> &Ideal {
        &self.center
    }

    pub fn polarization_degree(&self) -> i64 {
        self.d
    }

    fn y_names(&self) -> (String, String) {
        let yblock = self.ring.block("y").unwrap();
        (
            self.ring.var_names()[yblock.vars[0]].clone(),
            self.ring.var_names()[yblock.vars[1]].clone(),
        )
    }
}

/// Bigraded product ring of a variety with a fresh rational base, plus the
/// extended defining ideal generators.
fn product_ring_of(variety: &VarietySpec) -> Result<(Ring, Vec<Polynomial>)> {
    let xnames: Vec<String> = variety.ring().var_names().to_vec();
    let mut y0 = "y0".to_string();
    let mut y1 = "y1".to_string();
    while xnames.iter().any(|n| *n == y0 || *n == y1) {
        y0.push('_');
        y1.push('_');
    }
    let xrefs: Vec<&str> = xnames.iter().map(|s| s.as_str()).collect();
    let ring = RingSpec::bigraded(&xrefs, &[&y0, &y1])?;
    let empty = BTreeMap::new();
    let gens: Result<Vec<Polynomial>> = variety
        .ideal()
        .generators()
        .iter()
        .map(|g| g.substitute(&ring, &empty))
        .collect();
    Ok((ring, gens?))
}

/// CM-degree report for one polarized family (optionally twisted by a
/// blow-up of an ideal supported in the distinguished fiber).
#[derive(Debug, Clone)]
pub struct CmReport {
    pub cm: Rat,
    pub a0: Rat,
    pub a1: Rat,
    pub b0: Rat,
    pub b1: Rat,
    pub table: SectionTable,
}

/// CM degree over a genus-zero base: `a1 b0 - a0 b1 + a0^2`, with the
/// `b`-data read from the eventual-linear section table and the `a`-data
/// from the fiber.
pub fn cm_degree(
    family: &FamilySpec,
    twist: Option<(&Ideal, &RationalParam)>,
    budget: &Budget,
) -> Result<CmReport> {
    let (a0, a1) = family.fiber.leading_coefficients();
    let n = family.fiber.dimension();
    let (_, y1_name) = family.y_names();

    if let Some((j_ideal, _)) = twist {
        if j_ideal.ring() != family.ring() {
            return Err(Error::RingMismatch("twist ideal outside the family ring".into()));
        }
        if !j_ideal.contains_ideal(&family.ideal, budget)? {
            return Err(Error::SupportNotInFiber(
                "twist ideal does not contain the family ideal".into(),
            ));
        }
        let y1 = Polynomial::var_named(family.ring(), &y1_name)?;
        let sat = j_ideal.saturation(&Ideal::principal(y1), budget)?;
        if !sat.is_unit(budget)? {
            return Err(Error::SupportNotInFiber(
                "twist ideal is not set-theoretically supported in the fiber over (1:0)".into(),
            ));
        }
    }

    let stride = twist.map(|(_, c)| c.stride()).unwrap_or(1);
    let cap = n + 1;
    let budget_copy = *budget;
    let structure = family.ideal.clone();
    let d = family.d;
    let mut twist_cache: HashMap<i64, Ideal> = HashMap::new();
    let mut rows: BTreeMap<i64, SectionRow> = BTreeMap::new();
    let mut entries: BTreeMap<(i64, i64), u64> = BTreeMap::new();

    let mut chi = |k: i64| -> Result<Rat> {
        let twisted = match twist {
            None => None,
            Some((j_ideal, c)) => {
                let q = c.times(k)?;
                if q <= 0 {
                    None
                } else {
                    let t = match twist_cache.get(&q) {
                        Some(t) => t.clone(),
                        None => {
                            let powered = j_ideal.power(q as u32, &budget_copy)?;
                            let sat = structure
                                .sum(&powered)
                                .saturate_irrelevant(&["x", "y"], &budget_copy)?;
                            twist_cache.insert(q, sat.clone());
                            sat
                        }
                    };
                    Some(t)
                }
            }
        };
        let q_for_cap = twist
            .map(|(_, c)| c.times(k))
            .transpose()?
            .unwrap_or(0)
            .max(0);
        let m_cap = 32 + 4 * q_for_cap + 2 * d * k;
        let (row, row_entries) =
            section_row(&structure, twisted.as_ref(), d, k, m_cap, &budget_copy)?;
        let value = rat(row.euler_characteristic());
        rows.insert(k, row);
        entries.extend(row_entries);
        Ok(value)
    };

    let bpoly = fit_polynomial(&mut chi, cap, 4 * stride, stride, 3)?;
    let (b0, b1) = extract_coefficients(&bpoly, n + 1)?;
    let cm = a1.clone() * b0.clone() - a0.clone() * b1.clone() + a0.clone() * a0.clone();
    Ok(CmReport {
        cm,
        a0,
        a1,
        b0,
        b1,
        table: SectionTable { entries, rows, saturated: true },
    })
}

/// Both routes to the Donaldson-Futaki invariant of the deformation to the
/// normal cone, which must agree exactly.
#[derive(Debug, Clone)]
pub struct DfReport {
    pub df: Rat,
    pub w0: Rat,
    pub w1: Rat,
    pub a0: Rat,
    pub a1: Rat,
    pub b0: Rat,
    pub b1: Rat,
    pub cm: Rat,
    /// Set when a proxy hint was supplied and `c` lies beyond it.
    pub beyond_proxy: bool,
}

/// Donaldson-Futaki invariant `a1 w0 - a0 w1` of the deformation to the
/// normal cone of the subscheme, cross-checked against the CM degree of
/// the compactified configuration through `w0 = b0`, `w1 = b1 - a0`.
pub fn df_normal_cone(
    variety: &VarietySpec,
    subscheme: &SubschemeSpec,
    c: &RationalParam,
    proxy_hint: Option<&Rat>,
    budget: &Budget,
) -> Result<DfReport> {
    let n = variety.dimension();
    let stride = c.stride();
    let (a0, a1) = variety.leading_coefficients();

    // weight route
    let mut sections = FiberSections::new(variety, subscheme.ideal(), budget);
    let c_clone = c.clone();
    let wpoly = fit_polynomial(
        move |k| weight_with_cache(&mut sections, &c_clone, k).map(rat),
        n + 1,
        4 * stride,
        stride,
        3,
    )?;
    let (w0, w1) = extract_coefficients(&wpoly, n + 1)?;

    // euler-characteristic route through the compactified configuration
    let family = FamilySpec::product(variety, budget)?;
    let (_, y1_name) = family.y_names();
    let empty = BTreeMap::new();
    let mut twist_gens: Vec<Polynomial> = subscheme
        .ideal()
        .generators()
        .iter()
        .map(|g| g.substitute(family.ring(), &empty))
        .collect::<Result<_>>()?;
    twist_gens.push(Polynomial::var_named(family.ring(), &y1_name)?);
    let j_ideal = Ideal::new(family.ring(), twist_gens).saturate_irrelevant(&["x", "y"], budget)?;
    let cm_report = cm_degree(&family, Some((&j_ideal, c)), budget)?;

    if w0 != cm_report.b0 || w1 != cm_report.b1.clone() - a0.clone() {
        return Err(Error::InternalInvariant(format!(
            "weight and euler routes disagree: w0 = {w0}, b0 = {}, w1 = {w1}, b1 - a0 = {}",
            cm_report.b0,
            cm_report.b1.clone() - a0.clone()
        )));
    }
    let df = a1.clone() * w0.clone() - a0.clone() * w1.clone();
    if df != cm_report.cm {
        return Err(Error::InternalInvariant(
            "Donaldson-Futaki value differs from the CM degree of the compactification".into(),
        ));
    }
    let beyond_proxy = proxy_hint.map(|p| c.value() > p).unwrap_or(false);
    Ok(DfReport {
        df,
        w0,
        w1,
        a0,
        a1,
        b0: cm_report.b0,
        b1: cm_report.b1,
        cm: cm_report.cm,
        beyond_proxy,
    })
}

/// Result of the blow-up comparison identity check.
#[derive(Debug, Clone)]
pub struct Prop33Report {
    pub power_compat: crate::rees::PowerCompatReport,
    pub cm_configuration: Option<Rat>,
    pub cm_blowup: Option<Rat>,
    pub cm_family: Option<Rat>,
    pub identity_holds: Option<bool>,
}

/// Checks the comparison identity: the CM degree of the compactified
/// normal-cone configuration of `Z` inside the distinguished fiber equals
/// the CM-degree change of blowing up `Z` in the family. The identity is
/// asserted only after the power-compatibility certificate passes on the
/// affine chart containing the support of `Z`.
pub fn prop33_check(
    family: &FamilySpec,
    z_gens: &[Polynomial],
    c: &RationalParam,
    m_max: u32,
    budget: &Budget,
) -> Result<Prop33Report> {
    let ring = family.ring().clone();
    let z_raw = Ideal::new(&ring, z_gens.to_vec());
    if !z_raw.is_homogeneous() {
        return Err(Error::InvalidInput("subscheme ideal must be bihomogeneous".into()));
    }
    let z_ideal = z_raw.saturate_irrelevant(&["x", "y"], budget)?;
    if !z_ideal.contains_ideal(family.center(), budget)? {
        return Err(Error::SupportNotInFiber(
            "the subscheme is not scheme-theoretically supported in the distinguished fiber"
                .into(),
        ));
    }

    // fiber-side data of Z
    let fiber_ring = family.fiber_ring().clone();
    let (y0_name, y1_name) = family.y_names();
    let mut to_fiber = BTreeMap::new();
    to_fiber.insert(y0_name.clone(), Polynomial::one(&fiber_ring));
    to_fiber.insert(y1_name.clone(), Polynomial::zero(&fiber_ring));
    let z_fiber_gens: Vec<Polynomial> = z_ideal
        .generators()
        .iter()
        .map(|g| g.substitute(&fiber_ring, &to_fiber))
        .collect::<Result<_>>()?;
    let z_fiber = Ideal::new(&fiber_ring, z_fiber_gens).saturate_irrelevant(&["x"], budget)?;

    // affine chart containing the support of Z
    let mut chart_var: Option<usize> = None;
    for i in 0..fiber_ring.num_vars() {
        let xi = Polynomial::var(&fiber_ring, i);
        let sum = z_fiber.sum(&Ideal::principal(xi));
        if sum.is_projectively_empty("x", budget)? {
            chart_var = Some(i);
            break;
        }
    }
    let chart_var = chart_var.ok_or(Error::NoChart)?;

    let chart_names: Vec<String> = ring
        .var_names()
        .iter()
        .enumerate()
        .filter_map(|(_i, name)| {
            let is_chart_x = fiber_ring.var_index(name) == Some(chart_var);
            let is_y0 = *name == y0_name;
            (!is_chart_x && !is_y0).then(|| name.clone())
        })
        .collect();
    let chart_refs: Vec<&str> = chart_names.iter().map(|s| s.as_str()).collect();
    let chart_ring = RingSpec::affine(&chart_refs)?;
    let mut to_chart = BTreeMap::new();
    to_chart.insert(
        fiber_ring.var_names()[chart_var].clone(),
        Polynomial::one(&chart_ring),
    );
    to_chart.insert(y0_name.clone(), Polynomial::one(&chart_ring));
    let dehom = |i: &Ideal| -> Result<Ideal> {
        let gens: Vec<Polynomial> = i
            .generators()
            .iter()
            .map(|g| g.substitute(&chart_ring, &to_chart))
            .collect::<Result<_>>()?;
        Ok(Ideal::new(&chart_ring, gens))
    };
    let z_aff = dehom(&z_ideal)?;
    let center_aff = dehom(family.center())?;
    let family_aff = dehom(&family.ideal)?;

    let compat = crate::rees::power_compat(&z_aff, &center_aff, m_max, Some(&family_aff), budget)?;
    if !compat.passed() {
        return Ok(Prop33Report {
            power_compat: compat,
            cm_configuration: None,
            cm_blowup: None,
            cm_family: None,
            identity_holds: None,
        });
    }

    let cm_family = cm_degree(family, None, budget)?.cm;
    let cm_blowup = cm_degree(family, Some((&z_ideal, c)), budget)?.cm;

    // configuration side: deformation of the distinguished fiber to the
    // normal cone of Z, computed through both routes
    let v0 = VarietySpec::new(
        &fiber_ring,
        family.fiber_over_zero().generators().to_vec(),
        family.polarization_degree(),
        budget,
    )?;
    let z0 = SubschemeSpec::new(&v0, z_fiber.generators().to_vec(), budget)?;
    let df = df_normal_cone(&v0, &z0, c, None, budget)?;
    let cm_configuration = df.cm;

    let identity = cm_configuration.clone() == cm_blowup.clone() - cm_family.clone();
    Ok(Prop33Report {
        power_compat: compat,
        cm_configuration: Some(cm_configuration),
        cm_blowup: Some(cm_blowup),
        cm_family: Some(cm_family),
        identity_holds: Some(identity),
    })
}

/// One scanned cell of the semistability table.
#[derive(Debug, Clone)]
pub struct ScanCell {
    pub subscheme_index: usize,
    pub c: Rat,
    pub mu_c: Rat,
    /// `mu - mu_c`; slope semistability demands this be nonnegative.
    pub gap: Rat,
    pub within_proxy: bool,
}

/// Scan result: per-cell slope gaps. The verdict is only ever about the
/// supplied scan, never an unconditional semistability claim.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub mu: Rat,
    pub proxies: Vec<Option<Rat>>,
    pub cells: Vec<ScanCell>,
    pub violation_found: bool,
}

pub fn slope_semistable_scan(
    variety: &VarietySpec,
    subschemes: &[SubschemeSpec],
    c_grid: &[Rat],
    budget: &Budget,
) -> Result<ScanReport> {
    let mu = slope_mu(variety)?;
    let mut proxies = Vec::new();
    let mut cells = Vec::new();
    let mut violation = false;
    for (zi, z) in subschemes.iter().enumerate() {
        let proxy = seshadri_proxy(variety, z, &default_proxy_grid(), budget)?;
        for cval in c_grid {
            let c = RationalParam::new(cval.clone())?;
            let mu_c = slope_mu_c(variety, z, &c, budget)?;
            let gap = mu.clone() - mu_c.clone();
            let within = proxy.as_ref().map(|p| cval <= p).unwrap_or(false);
            if within && gap.is_negative() {
                violation = true;
            }
            cells.push(ScanCell {
                subscheme_index: zi,
                c: cval.clone(),
                mu_c,
                gap,
                within_proxy: within,
            });
        }
        proxies.push(proxy);
    }
    Ok(ScanReport { mu, proxies, cells, violation_found: violation })
}

/// Signs agree (and vanish together): the coherence demanded between the
/// Donaldson-Futaki invariant and the slope gap.
pub fn signs_agree(df: &Rat, gap: &Rat) -> bool {
    sign(df) == sign(gap)
}
