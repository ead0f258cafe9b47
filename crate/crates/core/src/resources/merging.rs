use num_rational::BigRational;
use num_traits::Signed;

use super::atom::{Dir, ResourceAtom};
use super::expr::ResourceExpr;
use crate::error::{domain, Result};

/// Entropies `H(A), H(B), H(AB)` of a pure state on `RAB`; `H(R) = H(AB)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergingEntropies {
    pub h_a: BigRational,
    pub h_b: BigRational,
    pub h_ab: BigRational,
}

impl MergingEntropies {
    /// Checks nonnegativity, subadditivity and the triangle inequality.
    pub fn new(h_a: BigRational, h_b: BigRational, h_ab: BigRational) -> Result<Self> {
        if h_a.is_negative() || h_b.is_negative() || h_ab.is_negative() {
            return domain("entropies must be nonnegative");
        }
        if h_ab > &h_a + &h_b {
            return domain("H(AB) > H(A) + H(B) violates subadditivity");
        }
        // with H(R) = H(AB), subadditivity on RA and RB is the triangle inequality
        if (&h_a - &h_b).abs() > h_ab {
            return domain("|H(A) - H(B)| > H(AB) is impossible for a pure state on RAB");
        }
        Ok(MergingEntropies { h_a, h_b, h_ab })
    }

    /// Converts float entropies exactly (every finite `f64` is a dyadic rational).
    pub fn from_f64(h_a: f64, h_b: f64, h_ab: f64) -> Result<Self> {
        let conv = |x: f64| BigRational::from_float(x).ok_or(crate::Error::Domain(format!("non-finite entropy {x}")));
        Self::new(conv(h_a)?, conv(h_b)?, conv(h_ab)?)
    }

    /// `I(R;A) = H(R) + H(A) - H(RA)` with `H(RA) = H(B)`.
    pub fn i_ra(&self) -> BigRational {
        &self.h_ab + &self.h_a - &self.h_b
    }

    pub fn i_rb(&self) -> BigRational {
        &self.h_ab + &self.h_b - &self.h_a
    }

    /// Coherent information `I(A>B) = H(B) - H(AB)`.
    pub fn coherent_a_to_b(&self) -> BigRational {
        &self.h_b - &self.h_ab
    }

    pub fn coherent_b_to_a(&self) -> BigRational {
        &self.h_a - &self.h_ab
    }
}

/// State-merging cost `I(R;A)[qq->q] - I(A>B)[qq]`.
pub fn merging_cost_expr(h: &MergingEntropies) -> ResourceExpr {
    let mut e = ResourceExpr::zero();
    e.add_term(h.i_ra(), ResourceAtom::Cocobit(Dir::AtoB));
    e.add_term(-h.coherent_a_to_b(), ResourceAtom::Ebit);
    e
}

/// Feedback cost `I(R;B)[q->qq] + I(B>A)[qq]`.
pub fn feedback_cost_expr(h: &MergingEntropies) -> ResourceExpr {
    let mut e = ResourceExpr::zero();
    e.add_term(h.i_rb(), ResourceAtom::Cobit(Dir::AtoB));
    e.add_term(h.coherent_b_to_a(), ResourceAtom::Ebit);
    e
}

/// Merging plus feedback, which canonicalizes to `H(R)[q->q]`.
pub fn total_cost_expr(h: &MergingEntropies) -> ResourceExpr {
    merging_cost_expr(h) + feedback_cost_expr(h)
}
