//! Exact Hilbert data: graded dimensions via standard-monomial counting,
//! Hilbert polynomials by exact interpolation with stabilization detection,
//! bigraded section tables and relative Euler characteristics over a
//! genus-zero base.

use crate::error::{BudgetKind, Error, Result};
use crate::groebner::Budget;
use crate::ideal::Ideal;
use crate::order::MonomialOrder;
use crate::rat::{rat, Rat};
use crate::ring::{DegreeVector, Monomial, Ring, RingSpec};
use num::Zero;
use smallvec::SmallVec;
use std::collections::{BTreeMap, HashMap};

const ENUMERATION_NODE_CAP: u64 = 50_000_000;

/// Dimension of the multigraded piece `(S/I)_deg`, counted as the standard
/// monomials of the leading ideal (which preserves the Hilbert function).
pub fn graded_dimension(ideal: &Ideal, deg: &[i64], budget: &Budget) -> Result<u64> {
    if !ideal.is_homogeneous() {
        return Err(Error::InvalidInput(
            "graded dimension needs a homogeneous ideal".into(),
        ));
    }
    let ring = ideal.ring().clone();
    if deg.len() != ring.num_grading_rows() {
        return Err(Error::InvalidInput(format!(
            "degree vector has {} entries for {} grading rows",
            deg.len(),
            ring.num_grading_rows()
        )));
    }
    if ideal.is_zero_ideal() {
        return count_standard_monomials(&ring, &[], deg);
    }
    let gb = ideal.groebner(&MonomialOrder::GrevLex, budget)?;
    if gb.is_unit() {
        return Ok(0);
    }
    let lts = gb.leading_monomials();
    count_standard_monomials(&ring, &lts, deg)
}

/// Dimension of the full graded piece `S_deg`.
pub fn ambient_dimension(ring: &Ring, deg: &[i64]) -> Result<u64> {
    count_standard_monomials(ring, &[], deg)
}

/// Counts monomials of the given multidegree outside the monomial ideal
/// generated by `lts`, by a pruned enumeration: subtrees free of potential
/// divisors are counted in closed form through a memoized recursion.
fn count_standard_monomials(ring: &Ring, lts: &[Monomial], deg: &[i64]) -> Result<u64> {
    validate_grading_for_counting(ring)?;
    let grading = ring.grading();
    let nvars = ring.num_vars();
    let cols: Vec<Vec<i64>> = (0..nvars)
        .map(|i| grading.iter().map(|row| row[i]).collect())
        .collect();
    let mut counter = Counter {
        cols,
        nvars,
        lts,
        free_memo: HashMap::new(),
        nodes: 0,
    };
    let target: DegreeVector = deg.iter().copied().collect();
    if target.iter().any(|&d| d < 0) {
        return Ok(0);
    }
    let active: Vec<usize> = (0..lts.len()).collect();
    counter.count(0, target, &active)
}

struct Counter<'a> {
    cols: Vec<Vec<i64>>,
    nvars: usize,
    lts: &'a [Monomial],
    free_memo: HashMap<(usize, SmallVec<[i64; 2]>), u64>,
    nodes: u64,
}

impl Counter<'_> {
    fn count(&mut self, var: usize, rem: DegreeVector, active: &[usize]) -> Result<u64> {
        self.nodes += 1;
        if self.nodes > ENUMERATION_NODE_CAP {
            return Err(Error::Budget {
                kind: BudgetKind::Enumeration,
                limit: ENUMERATION_NODE_CAP as usize,
            });
        }
        // a generator fully matched by the chosen prefix divides every
        // completion: nothing below this node is standard
        for &g in active {
            match self.lts[g].last_support() {
                None => return Ok(0),
                Some(last) if last < var => return Ok(0),
                _ => {}
            }
        }
        if active.is_empty() {
            return self.free(var, rem);
        }
        if var == self.nvars {
            return Ok(u64::from(rem.iter().all(|&d| d == 0)));
        }
        let bound = self.exponent_bound(var, &rem);
        let mut total = 0u64;
        for e in 0..=bound {
            let mut next: DegreeVector = rem.clone();
            let mut ok = true;
            for (r, c) in next.iter_mut().zip(&self.cols[var]) {
                *r -= c * e;
                if *r < 0 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let next_active: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&g| i64::from(self.lts[g].exps()[var]) <= e)
                .collect();
            total += self.count(var + 1, next, &next_active)?;
        }
        Ok(total)
    }

    /// Completions with no divisibility constraint left, memoized.
    fn free(&mut self, var: usize, rem: DegreeVector) -> Result<u64> {
        if rem.iter().any(|&d| d < 0) {
            return Ok(0);
        }
        if var == self.nvars {
            return Ok(u64::from(rem.iter().all(|&d| d == 0)));
        }
        let key = (var, rem.clone());
        if let Some(&v) = self.free_memo.get(&key) {
            return Ok(v);
        }
        let bound = self.exponent_bound(var, &rem);
        let mut total = 0u64;
        for e in 0..=bound {
            let mut next: DegreeVector = rem.clone();
            let mut ok = true;
            for (r, c) in next.iter_mut().zip(&self.cols[var]) {
                *r -= c * e;
                if *r < 0 {
                    ok = false;
                }
            }
            if ok {
                total += self.free(var + 1, next)?;
            }
        }
        self.free_memo.insert(key, total);
        Ok(total)
    }

    fn exponent_bound(&self, var: usize, rem: &DegreeVector) -> i64 {
        let mut bound = i64::MAX;
        for (r, c) in rem.iter().zip(&self.cols[var]) {
            if *c > 0 {
                bound = bound.min(r / c);
            }
        }
        debug_assert!(bound < i64::MAX, "validated grading guarantees a bound");
        bound.max(0)
    }
}

fn validate_grading_for_counting(ring: &RingSpec) -> Result<()> {
    if ring.num_grading_rows() == 0 {
        return Err(Error::InvalidInput(
            "dimension counting needs at least one grading row".into(),
        ));
    }
    for row in ring.grading() {
        if row.iter().any(|&g| g < 0) {
            return Err(Error::InvalidInput(
                "dimension counting needs a nonnegative grading".into(),
            ));
        }
    }
    for i in 0..ring.num_vars() {
        if ring.grading().iter().all(|row| row[i] == 0) {
            return Err(Error::InvalidInput(format!(
                "variable `{}` has degree zero in every grading row",
                ring.var_names()[i]
            )));
        }
    }
    Ok(())
}

/// An exactly interpolated polynomial in one variable `k`, valid on the
/// arithmetic progression `k0 + stride * N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertPolynomial {
    /// Coefficients in descending powers of `k`; leading coefficient
    /// nonzero unless the polynomial is zero.
    pub coefficients: Vec<Rat>,
    /// Smallest sample point used by the accepted fit.
    pub k0: i64,
    /// Sampling stride.
    pub stride: i64,
}

impl HilbertPolynomial {
    pub fn degree(&self) -> Option<usize> {
        if self.coefficients.is_empty() {
            None
        } else {
            Some(self.coefficients.len() - 1)
        }
    }

    pub fn evaluate(&self, k: i64) -> Rat {
        let kk = rat(k);
        let mut acc = Rat::zero();
        for c in &self.coefficients {
            acc = acc * kk.clone() + c.clone();
        }
        acc
    }

    /// Coefficient of `k^p`, zero when absent.
    pub fn coefficient(&self, p: usize) -> Rat {
        let n = self.coefficients.len();
        if p >= n {
            Rat::zero()
        } else {
            self.coefficients[n - 1 - p].clone()
        }
    }

    pub fn render(&self) -> String {
        if self.coefficients.is_empty() {
            return "0".into();
        }
        let deg = self.coefficients.len() - 1;
        let mut parts = Vec::new();
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = deg - i;
            let cs = crate::rat::format_rat(c);
            let part = match p {
                0 => cs,
                1 => format!("{cs}*k"),
                _ => format!("{cs}*k^{p}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

/// Exact interpolation through `(points[i], values[i])` by Newton divided
/// differences; returns descending coefficients with leading zeros trimmed.
pub fn interpolate(points: &[i64], values: &[Rat]) -> Vec<Rat> {
    let pts: Vec<Rat> = points.iter().map(|&p| rat(p)).collect();
    interpolate_rat(&pts, values)
}

/// Interpolation through rational sample points.
pub fn interpolate_rat(points: &[Rat], values: &[Rat]) -> Vec<Rat> {
    assert_eq!(points.len(), values.len());
    let n = points.len();
    // divided-difference coefficients
    let mut dd: Vec<Rat> = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let denom = points[i].clone() - points[i - level].clone();
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / denom;
        }
    }
    // expand Newton form into monomial coefficients (ascending)
    let mut coeffs: Vec<Rat> = vec![Rat::zero(); n];
    let mut basis: Vec<Rat> = vec![Rat::zero(); n + 1];
    basis[0] = rat(1);
    let mut basis_len = 1usize;
    for (i, d) in dd.iter().enumerate() {
        for (j, b) in basis.iter().take(basis_len).enumerate() {
            coeffs[j] = coeffs[j].clone() + d.clone() * b.clone();
        }
        // basis *= (k - points[i])
        if i + 1 < n {
            let p = points[i].clone();
            let mut next = vec![Rat::zero(); basis_len + 1];
            for (j, b) in basis.iter().take(basis_len).enumerate() {
                next[j + 1] = next[j + 1].clone() + b.clone();
                next[j] = next[j].clone() - p.clone() * b.clone();
            }
            basis_len += 1;
            basis[..basis_len].clone_from_slice(&next[..basis_len]);
        }
    }
    let mut desc: Vec<Rat> = coeffs.into_iter().rev().collect();
    while desc.first().map(|c| c.is_zero()).unwrap_or(false) {
        desc.remove(0);
    }
    desc
}

/// Fits an exact polynomial of degree at most `degree_cap` to `f` on the
/// progression `k0 + stride*i`. Stabilization is certified by fitting two
/// overlapping windows and demanding identical coefficients; on
/// disagreement the window is pushed out and the fit retried.
pub fn fit_polynomial<F>(
    mut f: F,
    degree_cap: usize,
    mut k0: i64,
    stride: i64,
    retries: usize,
) -> Result<HilbertPolynomial>
where
    F: FnMut(i64) -> Result<Rat>,
{
    assert!(stride >= 1);
    let d = degree_cap;
    for _ in 0..=retries {
        let points: Vec<i64> = (0..=(d as i64) + 2).map(|i| k0 + stride * i).collect();
        let values: Result<Vec<Rat>> = points.iter().map(|&k| f(k)).collect();
        let values = values?;
        let fit1 = interpolate(&points[..=d], &values[..=d]);
        let fit2 = interpolate(&points[2..=d + 2], &values[2..=d + 2]);
        if fit1 == fit2 {
            return Ok(HilbertPolynomial { coefficients: fit1, k0, stride });
        }
        k0 += stride * (d as i64 + 3);
    }
    Err(Error::Stabilization(format!(
        "window fits disagree up to k0 = {k0}"
    )))
}

/// The Hilbert polynomial of `S/I` along the single grading row, optionally
/// after saturating by the irrelevant ideal of `block` (section semantics).
pub fn hilbert_polynomial(
    ideal: &Ideal,
    stride: i64,
    start: Option<i64>,
    saturate_block: Option<&str>,
    budget: &Budget,
) -> Result<HilbertPolynomial> {
    let ring = ideal.ring().clone();
    if ring.num_grading_rows() != 1 {
        return Err(Error::InvalidInput(
            "hilbert polynomial needs a single grading row; families go through section tables"
                .into(),
        ));
    }
    let work = match saturate_block {
        Some(b) => ideal.saturate_irrelevant(&[b], budget)?,
        None => ideal.clone(),
    };
    let cap = ring.num_vars() - 1;
    let k0 = start.unwrap_or(stride * 4);
    let budget = *budget;
    fit_polynomial(
        move |k| graded_dimension(&work, &[k], &budget).map(|d| rat(d as i64)),
        cap,
        k0,
        stride,
        3,
    )
}

/// Leading and subleading coefficients `(k^n, k^(n-1))` of a Hilbert-type
/// polynomial expected to have degree at most `n`, zero-padded when the
/// degree is lower. A higher degree flags an input or flatness problem.
pub fn extract_coefficients(hp: &HilbertPolynomial, n: usize) -> Result<(Rat, Rat)> {
    match hp.degree() {
        None => Ok((Rat::zero(), Rat::zero())),
        Some(d) if d > n => Err(Error::DegreeExceedsExpectation { got: d, expected: n }),
        Some(_) => {
            let lead = hp.coefficient(n);
            let sub = if n == 0 { Rat::zero() } else { hp.coefficient(n - 1) };
            Ok((lead, sub))
        }
    }
}

/// One row of a section table: the large-twist behaviour of
/// `m -> H(k, m)` for a fixed polarization power `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionRow {
    pub k: i64,
    /// Detected slope: the rank of the pushforward.
    pub rank: i64,
    /// `H(k, m) - rank*(m+1)` on the linear range: the degree of the
    /// pushforward.
    pub degree: i64,
    /// First twist where linearity was detected.
    pub m_linear: i64,
}

impl SectionRow {
    /// Euler characteristic `deg + rank` extracted from the linear range.
    pub fn euler_characteristic(&self) -> i64 {
        self.degree + self.rank
    }
}

/// Exact bidegree section-dimension table of a polarized family, stored
/// with its per-`k` linear summaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionTable {
    pub entries: BTreeMap<(i64, i64), u64>,
    pub rows: BTreeMap<i64, SectionRow>,
    /// Saturation applied to the defining data before counting.
    pub saturated: bool,
}

impl SectionTable {
    pub fn row(&self, k: i64) -> Option<&SectionRow> {
        self.rows.get(&k)
    }
}

/// Computes `H(k, m)` for one `k` across base twists `m` until the values
/// are exactly linear for five consecutive differences. `H(k, m)` is the
/// dimension of sections of the twisted sheaf: the graded piece of the
/// structure data minus the graded piece cut out by the twist.
///
/// `structure` is the saturated family ideal; `twisted` the saturated sum
/// with the twist power (pass the unit ideal complement `None` for an
/// untwisted family).
pub fn section_row(
    structure: &Ideal,
    twisted: Option<&Ideal>,
    fiber_degree: i64,
    k: i64,
    m_cap: i64,
    budget: &Budget,
) -> Result<(SectionRow, Vec<((i64, i64), u64)>)> {
    let dk = fiber_degree * k;
    let mut entries = Vec::new();
    let mut values: Vec<i64> = Vec::new();
    let mut m = 0i64;
    let mut detected: Option<(i64, i64)> = None; // (m_linear, rank)
    while m <= m_cap {
        let base = graded_dimension(structure, &[dk, m], budget)? as i64;
        let h = match twisted {
            None => base,
            Some(t) => base - graded_dimension(t, &[dk, m], budget)? as i64,
        };
        entries.push(((k, m), h as u64));
        values.push(h);
        let n = values.len();
        if n >= 6 {
            let diffs: Vec<i64> = (n - 5..n).map(|i| values[i] - values[i - 1]).collect();
            if diffs.iter().all(|&d| d == diffs[0]) {
                let rank = diffs[0];
                let m_linear = m - 4;
                if rank < 0 {
                    return Err(Error::InternalInvariant(
                        "section dimensions decreasing in the base twist".into(),
                    ));
                }
                detected = Some((m_linear, rank));
                break;
            }
        }
        m += 1;
    }
    let (m_linear, rank) = detected.ok_or(Error::MRangeNotLinear)?;
    let h_at = values[m_linear as usize];
    let degree = h_at - rank * (m_linear + 1);
    Ok((SectionRow { k, rank, degree, m_linear }, entries))
}

/// Relative Euler characteristic over a genus-zero base for one `k`:
/// `rank + degree` of the pushforward, read off the linear range of the
/// table row.
pub fn relative_euler_characteristic(table: &SectionTable, k: i64) -> Result<i64> {
    table
        .row(k)
        .map(SectionRow::euler_characteristic)
        .ok_or(Error::MRangeNotLinear)
}
