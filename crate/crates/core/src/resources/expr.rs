use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::{Dir, ResourceAtom};
use crate::error::{Error, Result};

/// Exact rational linear combination of resource atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResourceExpr {
    terms: BTreeMap<ResourceAtom, BigRational>,
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ResourceExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn atom(a: ResourceAtom) -> Self {
        Self::term(BigRational::one(), a)
    }

    pub fn term(coef: BigRational, a: ResourceAtom) -> Self {
        let mut e = Self::zero();
        e.add_term(coef, a);
        e
    }

    pub fn add_term(&mut self, coef: BigRational, a: ResourceAtom) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(a.clone()).or_insert_with(BigRational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn coef(&self, a: &ResourceAtom) -> BigRational {
        self.terms.get(a).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ResourceAtom, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            out.add_term(c * k, a.clone());
        }
        out
    }

    /// Swap the roles of Alice and Bob.
    pub fn exchange(&self) -> Self {
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            out.add_term(c.clone(), a.exchange());
        }
        out
    }

    /// Run every resource backwards in time; undefined if any cbit is present.
    pub fn reverse(&self) -> Result<Self> {
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            let (sign, r) = a.reverse().ok_or(Error::ReverseUndefined)?;
            out.add_term(c * int(sign as i64), r);
        }
        Ok(out)
    }

    /// Rewrites cobits and co-cobits in terms of qubits and ebits.
    pub fn canonicalize(&self) -> Self {
        use ResourceAtom::*;
        let half = ratio(1, 2);
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            let h = c * &half;
            match a {
                Cobit(d) => {
                    out.add_term(h.clone(), Qubit(*d));
                    out.add_term(h, Ebit);
                }
                Cocobit(d) => {
                    out.add_term(h.clone(), Qubit(*d));
                    out.add_term(-h, Ebit);
                }
                other => out.add_term(c.clone(), other.clone()),
            }
        }
        out
    }

    /// Ebit coefficient as an `f64`.
    pub fn ebits_f64(&self) -> f64 {
        to_f64(&self.coef(&ResourceAtom::Ebit))
    }

    /// Net qubits sent in direction `d` after canonicalization.
    pub fn canonical_qubits(&self, d: Dir) -> BigRational {
        self.canonicalize().coef(&ResourceAtom::Qubit(d))
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// True iff both sides canonicalize to the same expression.
pub fn expr_equal(a: &ResourceExpr, b: &ResourceExpr) -> bool {
    a.canonicalize() == b.canonicalize()
}

impl Add for ResourceExpr {
    type Output = ResourceExpr;
    fn add(mut self, rhs: ResourceExpr) -> ResourceExpr {
        for (a, c) in rhs.terms {
            self.add_term(c, a);
        }
        self
    }
}

impl Sub for ResourceExpr {
    type Output = ResourceExpr;
    fn sub(self, rhs: ResourceExpr) -> ResourceExpr {
        self + (-rhs)
    }
}

impl Neg for ResourceExpr {
    type Output = ResourceExpr;
    fn neg(self) -> ResourceExpr {
        self.scale(&-BigRational::one())
    }
}

impl Mul<ResourceExpr> for BigRational {
    type Output = ResourceExpr;
    fn mul(self, rhs: ResourceExpr) -> ResourceExpr {
        rhs.scale(&self)
    }
}

impl Mul<ResourceExpr> for i64 {
    type Output = ResourceExpr;
    fn mul(self, rhs: ResourceExpr) -> ResourceExpr {
        rhs.scale(&int(self))
    }
}

impl fmt::Display for ResourceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (a, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if !mag.is_one() {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::atom::GateRef;
    use ResourceAtom::*;

    fn e(a: ResourceAtom) -> ResourceExpr {
        ResourceExpr::atom(a)
    }

    #[test]
    fn exchange_rows() {
        assert_eq!(e(Cobit(Dir::AtoB)).exchange(), e(Cobit(Dir::BtoA)));
        assert_eq!(e(Ebit).exchange(), e(Ebit));
        assert_eq!(e(Cocobit(Dir::BtoA)).exchange(), e(Cocobit(Dir::AtoB)));
        let g = e(Gate(GateRef::new("v_m:2"))).exchange();
        assert_eq!(g.to_string(), "<GATE:F*v_m:2*F>");
    }

    #[test]
    fn reverse_rows() {
        assert_eq!(e(Cobit(Dir::AtoB)).reverse().unwrap(), e(Cocobit(Dir::BtoA)));
        assert_eq!(e(Cocobit(Dir::BtoA)).reverse().unwrap(), e(Cobit(Dir::AtoB)));
        assert_eq!(e(Ebit).reverse().unwrap(), -e(Ebit));
        let x = 3 * e(Ebit) - 2 * e(Qubit(Dir::AtoB));
        assert_eq!(x.reverse().unwrap(), -3 * e(Ebit) - 2 * e(Qubit(Dir::BtoA)));
        assert_eq!(e(Cbit(Dir::AtoB)).reverse(), Err(Error::ReverseUndefined));
        let g = e(Gate(GateRef::new("u"))).reverse().unwrap();
        assert_eq!(g.to_string(), "<GATE:u^dag>");
    }

    #[test]
    fn canonical_identities() {
        let split = e(Cobit(Dir::AtoB)) + e(Cocobit(Dir::AtoB));
        assert_eq!(split.canonicalize(), e(Qubit(Dir::AtoB)));
        let two = 2 * e(Cocobit(Dir::BtoA));
        assert_eq!(two.canonicalize(), e(Qubit(Dir::BtoA)) - e(Ebit));
        assert!(expr_equal(&(e(Qubit(Dir::AtoB)) + e(Ebit)), &(2 * e(Cobit(Dir::AtoB)))));
        assert!(expr_equal(&(2 * e(Cobit(Dir::BtoA)) - e(Ebit)), &e(Qubit(Dir::BtoA))));
        assert!(!expr_equal(&e(Qubit(Dir::AtoB)), &e(Qubit(Dir::BtoA))));
    }

    #[test]
    fn printing() {
        assert_eq!(ResourceExpr::zero().to_string(), "0");
        let x = ratio(1, 2) * e(Qubit(Dir::AtoB)) + ratio(1, 2) * e(Ebit);
        assert_eq!(x.to_string(), "1/2[q->q] + 1/2[qq]");
        assert_eq!((-e(Ebit)).to_string(), "-[qq]");
        assert_eq!((e(Cbit(Dir::AtoB)) - ratio(3, 4) * e(Ebit)).to_string(), "[c->c] - 3/4[qq]");
    }
}
