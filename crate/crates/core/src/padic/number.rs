//! Capped-relative-precision elements of `Q_p`.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute precision attached to zeros that are known exactly.
pub const EXACT: i64 = 1 << 40;

/// Global arithmetic context: the prime and the working relative precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    precision: u32,
}

impl PrimeContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {p} must be an odd prime")));
        }
        if precision < 2 {
            return Err(Error::InvalidContext(format!(
                "precision {precision} must be at least 2"
            )));
        }
        // residues are multiplied in u128, so p^N has to stay below 2^63
        let mut m: u128 = 1;
        for _ in 0..precision {
            m *= p as u128;
            if m >= 1u128 << 63 {
                return Err(Error::InvalidContext(format!(
                    "p^{precision} does not fit the 63-bit residue width"
                )));
            }
        }
        Ok(PrimeContext { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn int(&self, n: i64) -> Padic {
        Padic::from_i64(n, self.p, self.precision)
    }

    pub fn ratio(&self, num: i64, den: i64) -> Result<Padic> {
        let n = self.int(num);
        let d = self.int(den);
        Ok(n.mul(&d.inv()?))
    }

    /// Least positive integer that is a quadratic non-residue mod p.
    pub fn least_nonresidue(&self) -> u64 {
        (2..self.p)
            .find(|&a| pow_mod(a, (self.p - 1) / 2, self.p) == self.p - 1)
            .expect("odd prime has a non-residue")
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut r: u128 = 1 % m as u128;
    let mut b128 = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m as u128;
        }
        b128 = b128 * b128 % m as u128;
        e >>= 1;
    }
    r as u64
}

fn pow_u(p: u64, k: u32) -> u64 {
    p.pow(k)
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Lower-bound-aware valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValBound {
    Exact(i64),
    AtLeast(i64),
}

impl ValBound {
    pub fn affine(self, scale: i64, shift: i64) -> ValBound {
        match self {
            ValBound::Exact(v) => ValBound::Exact(sat(v * scale + shift)),
            ValBound::AtLeast(v) => ValBound::AtLeast(sat(v.saturating_mul(scale) + shift)),
        }
    }

    /// Minimum of two bounds where equal exact values cannot cancel.
    pub fn min_no_cancel(self, other: ValBound) -> ValBound {
        use ValBound::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (Exact(a), AtLeast(b)) | (AtLeast(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    AtLeast(b)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }
}

fn sat(v: i64) -> i64 {
    v.clamp(-EXACT, EXACT)
}

/// An element of `Q_p` known to finite relative precision.
///
/// Nonzero values are `p^val * unit` with `unit` known modulo `p^rel`;
/// zeros carry the absolute precision to which they are known.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u64,
    repr: Repr,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Zero { abs: i64 },
    Val { val: i64, unit: u64, rel: u32 },
}

impl Padic {
    pub fn zero(p: u64) -> Self {
        Padic { p, repr: Repr::Zero { abs: EXACT } }
    }

    pub fn from_i64(n: i64, p: u64, prec: u32) -> Self {
        if n == 0 {
            return Padic::zero(p);
        }
        let mut m = n.unsigned_abs();
        let mut v = 0;
        while m.is_multiple_of(p) {
            m /= p;
            v += 1;
        }
        let modulus = pow_u(p, prec);
        let mut unit = m % modulus;
        if n < 0 {
            unit = (modulus - unit) % modulus;
        }
        Padic { p, repr: Repr::Val { val: v, unit, rel: prec } }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn valuation(&self) -> ValBound {
        match self.repr {
            Repr::Zero { abs } => ValBound::AtLeast(abs),
            Repr::Val { val, .. } => ValBound::Exact(val),
        }
    }

    /// Absolute precision: the value is known modulo `p^abs`.
    pub fn abs_precision(&self) -> i64 {
        match self.repr {
            Repr::Zero { abs } => abs,
            Repr::Val { val, rel, .. } => val + rel as i64,
        }
    }

    pub fn neg(&self) -> Self {
        match self.repr {
            Repr::Zero { .. } => *self,
            Repr::Val { val, unit, rel } => {
                let m = pow_u(self.p, rel);
                Padic { p: self.p, repr: Repr::Val { val, unit: (m - unit) % m, rel } }
            }
        }
    }

    pub fn add(&self, other: &Padic) -> Self {
        let p = self.p;
        match (self.repr, other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                Padic { p, repr: Repr::Zero { abs: a.min(b) } }
            }
            (Repr::Zero { abs }, _) => other.truncate_abs(abs),
            (_, Repr::Zero { abs }) => self.truncate_abs(abs),
            (
                Repr::Val { val: vx, unit: ux, rel: rx },
                Repr::Val { val: vy, unit: uy, rel: ry },
            ) => {
                let v0 = vx.min(vy);
                let abs = (vx + rx as i64).min(vy + ry as i64);
                let width = (abs - v0) as u32;
                let m = pow_u(p, width) as u128;
                let term = |u: u64, v: i64| -> u128 {
                    let shift = (v - v0) as u32;
                    if shift >= width {
                        0
                    } else {
                        (u as u128 % m) * pow_u(p, shift) as u128 % m
                    }
                };
                let s = (term(ux, vx) + term(uy, vy)) % m;
                Padic::normalize(p, v0, s as u64, width)
            }
        }
    }

    pub fn sub(&self, other: &Padic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic) -> Self {
        let p = self.p;
        match (self.repr, other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                Padic { p, repr: Repr::Zero { abs: sat(a.saturating_add(b)) } }
            }
            (Repr::Zero { abs }, Repr::Val { val, .. }) | (Repr::Val { val, .. }, Repr::Zero { abs }) => {
                Padic { p, repr: Repr::Zero { abs: sat(abs.saturating_add(val)) } }
            }
            (
                Repr::Val { val: vx, unit: ux, rel: rx },
                Repr::Val { val: vy, unit: uy, rel: ry },
            ) => {
                let rel = rx.min(ry);
                let m = pow_u(p, rel) as u128;
                let u = (ux as u128 % m) * (uy as u128 % m) % m;
                Padic { p, repr: Repr::Val { val: vx + vy, unit: u as u64, rel } }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.repr {
            Repr::Zero { abs } if abs >= EXACT => Err(Error::DivisionByZero),
            Repr::Zero { abs } => Err(Error::PrecisionExhausted(format!(
                "inverting an element indistinguishable from 0 mod p^{abs}"
            ))),
            Repr::Val { val, unit, rel } => {
                let m = pow_u(self.p, rel);
                let u = inv_mod(unit, m).expect("unit part is invertible");
                Ok(Padic { p: self.p, repr: Repr::Val { val: -val, unit: u, rel } })
            }
        }
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match self.repr {
            Repr::Zero { abs } => Padic { p: self.p, repr: Repr::Zero { abs: sat(abs + k) } },
            Repr::Val { val, unit, rel } => {
                Padic { p: self.p, repr: Repr::Val { val: val + k, unit, rel } }
            }
        }
    }

    /// Residue modulo `p^k` of an integral element.
    pub fn residue(&self, k: u32) -> Result<u64> {
        if k == 0 {
            return Ok(0);
        }
        match self.repr {
            Repr::Zero { abs } => {
                if abs >= k as i64 {
                    Ok(0)
                } else {
                    Err(Error::PrecisionExhausted(format!("coordinate known only mod p^{abs}")))
                }
            }
            Repr::Val { val, unit, rel } => {
                if val < 0 {
                    return Err(Error::PrecisionExhausted(format!(
                        "coordinate of valuation {val} is not integral"
                    )));
                }
                if val >= k as i64 {
                    return Ok(0);
                }
                if val + (rel as i64) < k as i64 {
                    return Err(Error::PrecisionExhausted(format!(
                        "coordinate known only mod p^{}",
                        val + rel as i64
                    )));
                }
                let m = pow_u(self.p, k) as u128;
                Ok(((unit as u128 % m) * pow_u(self.p, val as u32) as u128 % m) as u64)
            }
        }
    }

    pub fn unit_digits(&self) -> Option<(i64, u64, u32)> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Val { val, unit, rel } => Some((val, unit, rel)),
        }
    }

    fn truncate_abs(&self, abs: i64) -> Self {
        match self.repr {
            Repr::Zero { abs: a } => Padic { p: self.p, repr: Repr::Zero { abs: a.min(abs) } },
            Repr::Val { val, unit, rel } => {
                if val >= abs {
                    Padic { p: self.p, repr: Repr::Zero { abs } }
                } else {
                    let r = (rel as i64).min(abs - val) as u32;
                    let m = pow_u(self.p, r);
                    Padic { p: self.p, repr: Repr::Val { val, unit: unit % m, rel: r } }
                }
            }
        }
    }

    fn normalize(p: u64, v0: i64, s: u64, width: u32) -> Self {
        if s == 0 {
            return Padic { p, repr: Repr::Zero { abs: v0 + width as i64 } };
        }
        let mut s = s;
        let mut k = 0;
        while s.is_multiple_of(p) {
            s /= p;
            k += 1;
        }
        Padic { p, repr: Repr::Val { val: v0 + k as i64, unit: s, rel: width - k } }
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Zero { abs } if abs >= EXACT => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O({}^{abs})", self.p),
            Repr::Val { val, unit, rel } => {
                write!(f, "{unit}*{}^{val} + O({}^{})", self.p, self.p, val + rel as i64)
            }
        }
    }
}
