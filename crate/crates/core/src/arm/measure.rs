//! Exact support and lift.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::itemset::ItemSet;
use super::transactions::TransactionSet;
use crate::error::{Error, Result};

/// `count / total` kept as integers so comparisons are exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Support {
    pub count: u64,
    pub total: u64,
}

impl Support {
    pub fn value(self) -> f64 {
        self.count as f64 / self.total as f64
    }

    pub fn to_ratio(self) -> BigRational {
        BigRational::new(self.count.into(), self.total.into())
    }
}

impl Ord for Support {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.count as u128 * other.total as u128).cmp(&(other.count as u128 * self.total as u128))
    }
}

impl PartialOrd for Support {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.count, self.total)
    }
}

/// `σ(X∪Y) / (σ(X)·σ(Y))` as `joint·total / (count_x·count_y)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lift {
    pub numer: u128,
    pub denom: u128,
}

impl Lift {
    pub fn new(joint: Support, x: Support, y: Support) -> Result<Lift> {
        if x.count == 0 || y.count == 0 {
            return Err(Error::ZeroMarginalSupport);
        }
        debug_assert!(joint.total == x.total && x.total == y.total);
        Ok(Lift {
            numer: joint.count as u128 * joint.total as u128,
            denom: x.count as u128 * y.count as u128,
        })
    }

    pub fn value(self) -> f64 {
        self.to_ratio().to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_ratio(self) -> BigRational {
        BigRational::new(self.numer.into(), self.denom.into())
    }

    pub fn at_least(self, threshold: &BigRational) -> bool {
        self.to_ratio() >= *threshold
    }
}

impl Ord for Lift {
    fn cmp(&self, other: &Self) -> Ordering {
        // Operands are bounded by count^2 * total^2, far inside u128 for realistic cohorts,
        // but go through BigInt to stay exact regardless.
        (BigInt::from(self.numer) * BigInt::from(other.denom))
            .cmp(&(BigInt::from(other.numer) * BigInt::from(self.denom)))
    }
}

impl PartialOrd for Lift {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Lift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// Fraction of transactions containing every item of `items`.
pub fn support(items: ItemSet, ts: &TransactionSet) -> Result<Support> {
    if ts.is_empty() {
        return Err(Error::EmptyTransactionSet);
    }
    if items.is_empty() {
        return Err(Error::InvalidParameter("support of an empty itemset".into()));
    }
    Ok(Support {
        count: ts.count_containing(items),
        total: ts.len() as u64,
    })
}

pub fn lift(x: ItemSet, y: ItemSet, ts: &TransactionSet) -> Result<Lift> {
    if !x.is_disjoint(y) {
        return Err(Error::OverlappingRule);
    }
    let sx = support(x, ts)?;
    let sy = support(y, ts)?;
    let joint = support(x.union(y), ts)?;
    Lift::new(joint, sx, sy)
}

/// Exact rational for a user-supplied real threshold.
pub(crate) fn exact_threshold(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}

/// Smallest count `c` with `c / total >= min_support`.
pub(crate) fn min_count(min_support: &BigRational, total: u64) -> u64 {
    let needed = min_support * BigRational::from_integer(total.into());
    let c = needed.ceil().to_integer();
    if c <= BigInt::zero() {
        0
    } else {
        c.to_u64().unwrap_or(u64::MAX)
    }
}

pub(crate) fn validate_min_support(min_support: f64) -> Result<BigRational> {
    let exact = exact_threshold(min_support)
        .filter(|r| *r > BigRational::zero() && *r <= BigRational::one())
        .ok_or_else(|| Error::InvalidParameter(format!("min_support {min_support} must be in (0, 1]")))?;
    Ok(exact)
}

pub(crate) fn validate_min_lift(min_lift: f64) -> Result<BigRational> {
    exact_threshold(min_lift)
        .filter(|r| *r > BigRational::zero())
        .ok_or_else(|| Error::InvalidParameter(format!("min_lift {min_lift} must be positive and finite")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_order_is_exact() {
        let a = Support { count: 1, total: 3 };
        let b = Support { count: 2, total: 6 };
        assert_eq!(a.cmp(&b), Ordering::Equal);
        assert!(Support { count: 333_333, total: 1_000_000 } < a);
    }

    #[test]
    fn min_count_rounds_up_exactly() {
        let half = exact_threshold(0.5).unwrap();
        assert_eq!(min_count(&half, 3), 2);
        assert_eq!(min_count(&half, 4), 2);
        // 0.3 as f64 is slightly below 3/10, so 3 of 10 qualifies.
        assert_eq!(min_count(&exact_threshold(0.3).unwrap(), 10), 3);
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(min_count(&third, 3), 1);
    }

    #[test]
    fn threshold_validation() {
        assert!(validate_min_support(0.0).is_err());
        assert!(validate_min_support(1.5).is_err());
        assert!(validate_min_support(f64::NAN).is_err());
        assert!(validate_min_support(1.0).is_ok());
        assert!(validate_min_lift(0.0).is_err());
        assert!(validate_min_lift(f64::INFINITY).is_err());
    }
}
