//! Term orders for Groebner computations.
//!
//! The canonical storage order of `Polynomial` is always grevlex; these
//! orders only steer division and basis computations. The block order gives
//! elimination: any monomial touching the eliminated block beats any
//! monomial that does not.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::monomial::Monomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseOrder {
    Lex,
    GrevLex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Eliminated variables compare first (greater block), the rest break
    /// ties; each block uses its own inner order.
    Block {
        eliminated: Vec<usize>,
        elim_order: BaseOrder,
        kept_order: BaseOrder,
    },
}

impl MonomialOrder {
    /// Standard elimination order for the given variables.
    pub fn eliminating(eliminated: Vec<usize>) -> Self {
        let mut eliminated = eliminated;
        eliminated.sort_unstable();
        eliminated.dedup();
        MonomialOrder::Block {
            eliminated,
            elim_order: BaseOrder::GrevLex,
            kept_order: BaseOrder::GrevLex,
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.nvars(), b.nvars());
        match self {
            MonomialOrder::Lex => cmp_lex(a, b, None),
            MonomialOrder::GrevLex => cmp_grevlex(a, b, None),
            MonomialOrder::Block { eliminated, elim_order, kept_order } => {
                let nvars = a.nvars();
                let mut in_elim = vec![false; nvars];
                for &v in eliminated {
                    if v < nvars {
                        in_elim[v] = true;
                    }
                }
                let elim_idx: Vec<usize> = (0..nvars).filter(|&i| in_elim[i]).collect();
                let kept_idx: Vec<usize> = (0..nvars).filter(|&i| !in_elim[i]).collect();
                let first = cmp_base(*elim_order, a, b, &elim_idx);
                if first != Ordering::Equal {
                    return first;
                }
                cmp_base(*kept_order, a, b, &kept_idx)
            }
        }
    }
}

fn cmp_base(order: BaseOrder, a: &Monomial, b: &Monomial, idx: &[usize]) -> Ordering {
    match order {
        BaseOrder::Lex => cmp_lex(a, b, Some(idx)),
        BaseOrder::GrevLex => cmp_grevlex(a, b, Some(idx)),
    }
}

fn cmp_lex(a: &Monomial, b: &Monomial, idx: Option<&[usize]>) -> Ordering {
    let full: Vec<usize>;
    let idx = match idx {
        Some(i) => i,
        None => {
            full = (0..a.nvars()).collect();
            &full
        }
    };
    for &i in idx {
        match a.exp(i).cmp(&b.exp(i)) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    Ordering::Equal
}

fn cmp_grevlex(a: &Monomial, b: &Monomial, idx: Option<&[usize]>) -> Ordering {
    let full: Vec<usize>;
    let idx = match idx {
        Some(i) => i,
        None => {
            full = (0..a.nvars()).collect();
            &full
        }
    };
    let da: u64 = idx.iter().map(|&i| a.exp(i) as u64).sum();
    let db: u64 = idx.iter().map(|&i| b.exp(i) as u64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for &i in idx.iter().rev() {
        match a.exp(i).cmp(&b.exp(i)) {
            Ordering::Equal => {}
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}
