//! Monomial orders: lex, graded reverse lex, block elimination, weighted.

use crate::ring::Monomial;
use std::cmp::Ordering;

/// A global monomial order. All variants are well-orders with 1 minimal as
/// long as weighted orders carry nonnegative weights, which the constructor
/// enforces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Earlier blocks are eliminated first (their variables dominate);
    /// inside each block the comparison is grevlex. Variables not listed in
    /// any block form an implicit trailing block.
    BlockElim(Vec<Vec<usize>>),
    /// Weight vector first, tie broken by the inner order.
    Weighted { weights: Vec<i64>, tie: Box<MonomialOrder> },
}

impl MonomialOrder {
    pub fn weighted(weights: Vec<i64>, tie: MonomialOrder) -> Option<MonomialOrder> {
        if weights.iter().any(|&w| w < 0) {
            return None;
        }
        Some(MonomialOrder::Weighted { weights, tie: Box::new(tie) })
    }

    /// Block order that eliminates exactly the given variables.
    pub fn eliminating(vars: &[usize], num_vars: usize) -> MonomialOrder {
        let rest: Vec<usize> = (0..num_vars).filter(|i| !vars.contains(i)).collect();
        MonomialOrder::BlockElim(vec![vars.to_vec(), rest])
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.num_vars(), b.num_vars());
        match self {
            MonomialOrder::Lex => lex_cmp(a.exps(), b.exps()),
            MonomialOrder::GrevLex => grevlex_cmp(a.exps(), b.exps()),
            MonomialOrder::BlockElim(blocks) => {
                let mut listed = vec![false; a.num_vars()];
                for blk in blocks {
                    let ea: Vec<u16> = blk.iter().map(|&i| a.exps()[i]).collect();
                    let eb: Vec<u16> = blk.iter().map(|&i| b.exps()[i]).collect();
                    for &i in blk {
                        listed[i] = true;
                    }
                    match grevlex_cmp(&ea, &eb) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                let tail: Vec<usize> =
                    (0..a.num_vars()).filter(|&i| !listed[i]).collect();
                let ea: Vec<u16> = tail.iter().map(|&i| a.exps()[i]).collect();
                let eb: Vec<u16> = tail.iter().map(|&i| b.exps()[i]).collect();
                grevlex_cmp(&ea, &eb)
            }
            MonomialOrder::Weighted { weights, tie } => {
                let wa: i64 = weights
                    .iter()
                    .zip(a.exps())
                    .map(|(&w, &e)| w * e as i64)
                    .sum();
                let wb: i64 = weights
                    .iter()
                    .zip(b.exps())
                    .map(|(&w, &e)| w * e as i64)
                    .sum();
                wa.cmp(&wb).then_with(|| tie.compare(a, b))
            }
        }
    }

    pub fn max<'m>(&self, a: &'m Monomial, b: &'m Monomial) -> &'m Monomial {
        if self.compare(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

fn lex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    for (&x, &y) in a.iter().zip(b) {
        match x.cmp(&y) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

fn grevlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    // tie: the monomial with the larger exponent at the last differing
    // variable is the smaller one
    for (&x, &y) in a.iter().zip(b).rev() {
        match x.cmp(&y) {
            Ordering::Equal => continue,
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}
