//! Multigraded polynomial ring descriptions and monomials.

use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::sync::Arc;

/// Hard cap on the number of ring variables.
pub const MAX_VARIABLES: usize = 16;
/// Hard cap on the total degree of any constructed polynomial term.
pub const MAX_TOTAL_DEGREE: u32 = 64;

/// A multidegree: one integer per grading component.
pub type DegreeVector = SmallVec<[i64; 2]>;

/// Named group of variables inside a ring (ambient block, base block, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    /// Indices into the ring's variable list.
    pub vars: Vec<usize>,
}

/// A polynomial ring over Q: ordered variables, a grading matrix
/// (rows = grading components, columns = variables) and a partition of the
/// variables into named blocks.
#[derive(Debug, PartialEq, Eq)]
pub struct RingSpec {
    vars: Vec<String>,
    grading: Vec<Vec<i64>>,
    blocks: Vec<Block>,
}

pub type Ring = Arc<RingSpec>;

impl RingSpec {
    pub fn new(vars: Vec<String>, grading: Vec<Vec<i64>>, blocks: Vec<Block>) -> Result<Ring> {
        if vars.len() > MAX_VARIABLES {
            return Err(Error::TooManyVariables {
                got: vars.len(),
                max: MAX_VARIABLES,
            });
        }
        if vars.is_empty() {
            return Err(Error::InvalidRing("a ring needs at least one variable".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidRing(format!("duplicate variable `{v}`")));
            }
        }
        for row in &grading {
            if row.len() != vars.len() {
                return Err(Error::InvalidRing(format!(
                    "grading row has {} entries for {} variables",
                    row.len(),
                    vars.len()
                )));
            }
        }
        let mut covered = vec![false; vars.len()];
        for b in &blocks {
            for &i in &b.vars {
                if i >= vars.len() {
                    return Err(Error::InvalidRing(format!(
                        "block `{}` references variable #{i}",
                        b.name
                    )));
                }
                if covered[i] {
                    return Err(Error::InvalidRing(format!(
                        "variable `{}` appears in two blocks",
                        vars[i]
                    )));
                }
                covered[i] = true;
            }
        }
        Ok(Arc::new(RingSpec { vars, grading, blocks }))
    }

    /// Standard graded ring Q[names] with every variable of degree 1, one
    /// block covering everything.
    pub fn standard(names: &[&str]) -> Result<Ring> {
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let n = vars.len();
        RingSpec::new(
            vars,
            vec![vec![1; n]],
            vec![Block { name: "x".into(), vars: (0..n).collect() }],
        )
    }

    /// Bigraded ring for a product of two projective spaces: the first block
    /// carries grading row 0, the second grading row 1.
    pub fn bigraded(x_names: &[&str], y_names: &[&str]) -> Result<Ring> {
        let mut vars: Vec<String> = x_names.iter().map(|s| s.to_string()).collect();
        vars.extend(y_names.iter().map(|s| s.to_string()));
        let nx = x_names.len();
        let n = vars.len();
        let mut row0 = vec![0i64; n];
        let mut row1 = vec![0i64; n];
        for (i, r) in row0.iter_mut().enumerate().take(nx) {
            let _ = i;
            *r = 1;
        }
        for r in row1.iter_mut().take(n).skip(nx) {
            *r = 1;
        }
        RingSpec::new(
            vars,
            vec![row0, row1],
            vec![
                Block { name: "x".into(), vars: (0..nx).collect() },
                Block { name: "y".into(), vars: (nx..n).collect() },
            ],
        )
    }

    /// Ungraded ring (affine chart): no grading rows, one block.
    pub fn affine(names: &[&str]) -> Result<Ring> {
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let n = vars.len();
        RingSpec::new(
            vars,
            vec![],
            vec![Block { name: "x".into(), vars: (0..n).collect() }],
        )
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn grading(&self) -> &[Vec<i64>] {
        &self.grading
    }

    pub fn num_grading_rows(&self) -> usize {
        self.grading.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// Multidegree of a monomial under this ring's grading.
    pub fn multidegree(&self, m: &Monomial) -> DegreeVector {
        self.grading
            .iter()
            .map(|row| {
                row.iter()
                    .zip(m.exps())
                    .map(|(&g, &e)| g * e as i64)
                    .sum()
            })
            .collect()
    }

    /// Appends fresh variables (zero grading column, own block) and returns
    /// the extended ring. Used by elimination-based ideal operations.
    pub fn extend(&self, fresh: &[&str], block_name: &str) -> Result<Ring> {
        let mut vars = self.vars.clone();
        for f in fresh {
            if self.var_index(f).is_some() {
                return Err(Error::InvalidRing(format!("variable `{f}` already exists")));
            }
            vars.push(f.to_string());
        }
        let grading = self
            .grading
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.extend(std::iter::repeat(0).take(fresh.len()));
                r
            })
            .collect();
        let mut blocks = self.blocks.clone();
        blocks.push(Block {
            name: block_name.into(),
            vars: (self.vars.len()..vars.len()).collect(),
        });
        RingSpec::new(vars, grading, blocks)
    }
}

/// A monomial: exponent vector aligned with the ring's variable list.
///
/// The structural `Ord` below is storage order only; mathematical comparisons
/// go through `MonomialOrder`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: SmallVec<[u16; 16]>,
}

impl Monomial {
    pub fn new(exps: impl Into<SmallVec<[u16; 16]>>) -> Self {
        Monomial { exps: exps.into() }
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial { exps: SmallVec::from_elem(0, num_vars) }
    }

    pub fn var(num_vars: usize, idx: usize) -> Self {
        let mut m = Monomial::one(num_vars);
        m.exps[idx] = 1;
        m
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn pow(&self, n: u16) -> Monomial {
        Monomial { exps: self.exps.iter().map(|&e| e * n).collect() }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        self.exps.iter().zip(other.exps.iter()).all(|(&a, &b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(self.exps.iter())
                .map(|(&b, &a)| b - a)
                .collect(),
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(&a, &b)| a.max(b))
                .collect(),
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(&a, &b)| a.min(b))
                .collect(),
        }
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(other.exps.iter())
            .all(|(&a, &b)| a == 0 || b == 0)
    }

    /// Largest variable index with nonzero exponent, if any.
    pub fn last_support(&self) -> Option<usize> {
        self.exps.iter().rposition(|&e| e > 0)
    }

    pub fn render(&self, ring: &RingSpec) -> String {
        if self.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 1 {
                parts.push(ring.var_names()[i].clone());
            } else if e > 1 {
                parts.push(format!("{}^{}", ring.var_names()[i], e));
            }
        }
        parts.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_validation() {
        assert!(RingSpec::standard(&["x", "y"]).is_ok());
        assert!(RingSpec::new(
            vec!["x".into(), "x".into()],
            vec![vec![1, 1]],
            vec![]
        )
        .is_err());
        let many: Vec<String> = (0..17).map(|i| format!("v{i}")).collect();
        assert!(RingSpec::new(many, vec![], vec![]).is_err());
    }

    #[test]
    fn multidegree_bigraded() {
        let r = RingSpec::bigraded(&["x0", "x1"], &["y0", "y1"]).unwrap();
        let m = Monomial::new(smallvec::smallvec![2u16, 0, 0, 3]);
        assert_eq!(r.multidegree(&m).as_slice(), &[2, 3]);
    }

    #[test]
    fn monomial_ops() {
        let a = Monomial::new(smallvec::smallvec![2u16, 1]);
        let b = Monomial::new(smallvec::smallvec![1u16, 3]);
        assert_eq!(a.lcm(&b).exps(), &[2, 3]);
        assert_eq!(a.gcd(&b).exps(), &[1, 1]);
        assert!(!a.divides(&b));
        assert!(a.gcd(&b).divides(&a));
        assert_eq!(a.mul(&b).total_degree(), 7);
    }
}
