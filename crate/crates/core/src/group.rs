//! Multiplicative group elements for the weight group.
//!
//! A [`GroupElement`] is a positive rational stored as a sparse
//! prime-exponent vector, so multiplication is exponent addition,
//! inversion is negation, and equality is exact. The weight group
//! generated by a set of edge weights is the exponent lattice spanned by
//! their vectors; [`detect_base`] reports the generator of that lattice
//! when it is cyclic (canonicalised to the value in `(0,1)`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupElement {
    /// prime -> exponent, without zero entries.
    exps: BTreeMap<BigUint, i64>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement::default()
    }

    pub fn is_identity(&self) -> bool {
        self.exps.is_empty()
    }

    /// Factorises a positive rational into its exponent vector.
    pub fn from_ratio(r: &Ratio) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveGroupElement(r.to_string()));
        }
        let mut exps = BTreeMap::new();
        for (p, e) in factorize(&r.numer().magnitude().clone()) {
            *exps.entry(p).or_insert(0) += e;
        }
        for (p, e) in factorize(&r.denom().magnitude().clone()) {
            *exps.entry(p).or_insert(0) -= e;
        }
        exps.retain(|_, e| *e != 0);
        Ok(GroupElement { exps })
    }

    /// Exact reconstruction of the rational value.
    pub fn value(&self) -> Ratio {
        let mut numer = BigInt::one();
        let mut denom = BigInt::one();
        for (p, &e) in &self.exps {
            let p = BigInt::from(p.clone());
            let pe = num_traits::pow(p, e.unsigned_abs() as usize);
            if e > 0 {
                numer *= pe;
            } else {
                denom *= pe;
            }
        }
        Ratio::from_bigints(numer, denom).expect("denominator is a product of primes")
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let mut exps = self.exps.clone();
        for (p, e) in &other.exps {
            *exps.entry(p.clone()).or_insert(0) += e;
        }
        exps.retain(|_, e| *e != 0);
        GroupElement { exps }
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement {
            exps: self.exps.iter().map(|(p, e)| (p.clone(), -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        if k == 0 {
            return GroupElement::identity();
        }
        GroupElement {
            exps: self.exps.iter().map(|(p, e)| (p.clone(), e * k)).collect(),
        }
    }

    /// `self.value()^k` as a rational, exact for any integer `k`.
    pub fn value_pow(&self, k: i64) -> Ratio {
        self.pow(k).value()
    }

    /// The `k` with `self == base^k`, if any. The identity base grades
    /// only the identity element (as 0).
    pub fn grade_in(&self, base: &GroupElement) -> Option<i64> {
        if base.is_identity() {
            return self.is_identity().then_some(0);
        }
        if self.is_identity() {
            return Some(0);
        }
        let (p0, &e0) = base.exps.iter().next().unwrap();
        let s0 = *self.exps.get(p0)?;
        if s0 % e0 != 0 {
            return None;
        }
        let k = s0 / e0;
        (base.pow(k) == *self).then_some(k)
    }

    /// Compare the underlying value against 1.
    pub fn cmp_one(&self) -> Ordering {
        self.value().cmp_one()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Canonical representative of a cyclic group generator: the value in
/// `(0,1)` among `{r, 1/r}`.
pub fn canonical_base(r: &Ratio) -> Result<Ratio> {
    if !r.is_positive() || r.is_one() {
        return Err(Error::BadQParam(r.to_string()));
    }
    if r.cmp_one() == Ordering::Greater {
        r.recip()
    } else {
        Ok(r.clone())
    }
}

/// Detects whether the group generated by `generators` is cyclic and
/// nontrivial; returns its canonical base in `(0,1)` if so.
///
/// Generators equal to 1 are ignored. `None` means either the trivial
/// group (all generators 1) or a group of rank >= 2; callers that need
/// to distinguish can test the generators themselves.
pub fn detect_base(generators: &[Ratio]) -> Result<Option<Ratio>> {
    let mut vecs = Vec::new();
    for g in generators {
        let e = GroupElement::from_ratio(g)?;
        if !e.is_identity() {
            vecs.push(e);
        }
    }
    let Some(first) = vecs.first() else {
        return Ok(None); // trivial group
    };

    // primitive direction of the first vector
    let content = first.exps.values().fold(0i64, |acc, e| acc.gcd(e));
    let dir = GroupElement {
        exps: first
            .exps
            .iter()
            .map(|(p, e)| (p.clone(), e / content))
            .collect(),
    };

    // every vector must be an integer multiple of the direction
    let (p0, &d0) = dir.exps.iter().next().unwrap();
    let mut multiplier_gcd = 0i64;
    for v in &vecs {
        let Some(&v0) = v.exps.get(p0) else {
            return Ok(None);
        };
        if v0 % d0 != 0 {
            return Ok(None);
        }
        let k = v0 / d0;
        if dir.pow(k) != *v {
            return Ok(None);
        }
        multiplier_gcd = multiplier_gcd.gcd(&k);
    }

    let base = dir.pow(multiplier_gcd.abs());
    Ok(Some(canonical_base(&base.value())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    fn g(s: &str) -> GroupElement {
        GroupElement::from_ratio(&r(s)).unwrap()
    }

    #[test]
    fn round_trips_through_value() {
        for s in ["1", "2", "1/2", "9/4", "125/8", "6"] {
            assert_eq!(g(s).value(), r(s));
        }
    }

    #[test]
    fn group_laws() {
        let a = g("4/9");
        let b = g("3/2");
        assert_eq!(a.mul(&b).value(), r("2/3"));
        assert_eq!(a.mul(&a.inv()), GroupElement::identity());
        assert_eq!(a.mul(&GroupElement::identity()), a);
        assert_eq!(a.pow(-2).value(), r("81/16"));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(GroupElement::from_ratio(&r("0")).is_err());
        assert!(GroupElement::from_ratio(&r("-2/3")).is_err());
    }

    #[test]
    fn grading() {
        let base = g("1/2");
        assert_eq!(g("8").grade_in(&base), Some(-3));
        assert_eq!(g("1/4").grade_in(&base), Some(2));
        assert_eq!(g("1").grade_in(&base), Some(0));
        assert_eq!(g("3").grade_in(&base), None);
        assert_eq!(g("1").grade_in(&GroupElement::identity()), Some(0));
        assert_eq!(g("2").grade_in(&GroupElement::identity()), None);
    }

    #[test]
    fn base_detection() {
        assert_eq!(detect_base(&[r("1")]).unwrap(), None);
        assert_eq!(detect_base(&[]).unwrap(), None);
        assert_eq!(detect_base(&[r("2"), r("1/2"), r("1")]).unwrap(), Some(r("1/2")));
        // 4 and 8 generate 2^Z even though neither equals 2
        assert_eq!(detect_base(&[r("4"), r("8")]).unwrap(), Some(r("1/2")));
        // a single generator spans only its own powers
        assert_eq!(detect_base(&[r("9/4")]).unwrap(), Some(r("4/9")));
        assert_eq!(detect_base(&[r("2/3"), r("9/4")]).unwrap(), Some(r("2/3")));
        // rank 2 is not cyclic
        assert_eq!(detect_base(&[r("2"), r("3")]).unwrap(), None);
        assert_eq!(detect_base(&[r("2"), r("6")]).unwrap(), None);
    }

    #[test]
    fn canonicalisation() {
        assert_eq!(canonical_base(&r("3")).unwrap(), r("1/3"));
        assert_eq!(canonical_base(&r("2/3")).unwrap(), r("2/3"));
        assert!(canonical_base(&r("1")).is_err());
    }
}
