//! The value group `{ e^{2 pi i r} q_F^a : r in Q/Z, a in Q }`.

use std::cmp::Ordering;
use std::fmt;

use num::rational::Ratio;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

/// Reduce a rational into `[0, 1)`.
pub fn frac(r: Q) -> Q {
    r - r.floor()
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => n.trim().parse::<i64>().ok().zip(d.trim().parse::<i64>().ok()),
        None => s.parse::<i64>().ok().map(|n| (n, 1)),
    };
    match parsed {
        Some((_, 0)) | None => Err(Error::Parse(format!("bad rational `{s}`"))),
        Some((n, d)) => Ok(Q::new(n, d)),
    }
}

pub fn fmt_q(r: &Q) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `e^{2 pi i zeta} * q_F^{qexp}`; the group law is componentwise addition.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactValue {
    zeta: Q,
    qexp: Q,
}

impl ExactValue {
    pub const ONE: ExactValue = ExactValue { zeta: Ratio::new_raw(0, 1), qexp: Ratio::new_raw(0, 1) };

    pub fn new(zeta: Q, qexp: Q) -> Self {
        ExactValue { zeta: frac(zeta), qexp }
    }

    pub fn root_of_unity(zeta: Q) -> Self {
        Self::new(zeta, Q::zero())
    }

    /// `q_F^a`
    pub fn q_power(a: Q) -> Self {
        Self::new(Q::zero(), a)
    }

    pub fn zeta(&self) -> Q {
        self.zeta
    }

    pub fn qexp(&self) -> Q {
        self.qexp
    }

    pub fn is_one(&self) -> bool {
        self.zeta.is_zero() && self.qexp.is_zero()
    }

    pub fn mul(&self, other: &ExactValue) -> Self {
        Self::new(self.zeta + other.zeta, self.qexp + other.qexp)
    }

    pub fn inv(&self) -> Self {
        Self::new(-self.zeta, -self.qexp)
    }

    pub fn div(&self, other: &ExactValue) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.zeta * k, self.qexp * k)
    }

    /// The principal `f`-th root: both components divided by `f`.
    pub fn principal_root(&self, f: u32) -> Self {
        let f = f as i64;
        Self::new(self.zeta / f, self.qexp / f)
    }

    /// All `f` roots, principal root first.
    pub fn roots(&self, f: u32) -> Vec<ExactValue> {
        let r = self.principal_root(f);
        (0..f as i64).map(|k| r.mul(&Self::root_of_unity(Q::new(k, f as i64)))).collect()
    }
}

impl Default for ExactValue {
    fn default() -> Self {
        Self::ONE
    }
}

impl Ord for ExactValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.qexp, self.zeta).cmp(&(other.qexp, other.zeta))
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_q(&self.zeta), fmt_q(&self.qexp))
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.zeta == Q::new(1, 2) {
            parts.push("-1".to_string());
        } else if !self.zeta.is_zero() {
            parts.push(format!("e(2pi i {})", self.zeta));
        }
        if !self.qexp.is_zero() {
            parts.push(format!("q^{}", if self.qexp.is_integer() { self.qexp.to_string() } else { format!("({})", self.qexp) }));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Wire form: `{"zeta": "k/m", "qexp": "a/b"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValueJson {
    pub zeta: String,
    pub qexp: String,
}

impl From<&ExactValue> for ExactValueJson {
    fn from(v: &ExactValue) -> Self {
        ExactValueJson { zeta: fmt_q(&v.zeta), qexp: fmt_q(&v.qexp) }
    }
}

impl TryFrom<&ExactValueJson> for ExactValue {
    type Error = Error;
    fn try_from(j: &ExactValueJson) -> Result<Self> {
        Ok(ExactValue::new(parse_q(&j.zeta)?, parse_q(&j.qexp)?))
    }
}

impl One for ExactValue {
    fn one() -> Self {
        Self::ONE
    }
}

impl std::ops::Mul for ExactValue {
    type Output = ExactValue;
    fn mul(self, rhs: Self) -> Self {
        ExactValue::mul(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let a = ExactValue::new(Q::new(5, 4), Q::new(2, 4));
        assert_eq!(a.zeta(), Q::new(1, 4));
        assert_eq!(a.qexp(), Q::new(1, 2));
        assert_eq!(ExactValue::new(Q::new(-1, 3), Q::zero()).zeta(), Q::new(2, 3));
    }

    #[test]
    fn root_fibers() {
        let v = ExactValue::new(Q::new(1, 2), Q::new(-1, 1));
        let r = v.roots(4);
        assert_eq!(r.len(), 4);
        for x in &r {
            assert_eq!(x.pow(4), v);
        }
        let mut s = r.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 4);
        assert_eq!(r[0], ExactValue::new(Q::new(1, 8), Q::new(-1, 4)));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("3/6").unwrap(), Q::new(1, 2));
        assert_eq!(parse_q("-2").unwrap(), Q::from_integer(-2));
        assert!(parse_q("1/0").is_err());
        let j = ExactValueJson::from(&ExactValue::ONE);
        assert_eq!(j, ExactValueJson { zeta: "0/1".into(), qexp: "0/1".into() });
    }
}
