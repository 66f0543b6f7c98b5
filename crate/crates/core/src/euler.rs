//! Euler factors `1/P(X)`, `X = q_F^{-s}`, `P(0) = 1`, stored as the
//! multiset of inverse roots of `P`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::charalg::value::{ExactValue, ExactValueJson, Q};
use crate::charalg::SmoothChar;
use crate::error::Result;

#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct EulerFactor {
    roots: Vec<ExactValue>,
}

impl EulerFactor {
    /// The constant factor 1.
    pub fn one() -> Self {
        EulerFactor::default()
    }

    pub fn from_roots(mut roots: Vec<ExactValue>) -> Self {
        roots.sort();
        EulerFactor { roots }
    }

    /// `1/(1 - alpha X)`
    pub fn linear(alpha: ExactValue) -> Self {
        EulerFactor { roots: vec![alpha] }
    }

    pub fn inverse_roots(&self) -> &[ExactValue] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn is_one(&self) -> bool {
        self.roots.is_empty()
    }

    fn counts(&self) -> BTreeMap<ExactValue, usize> {
        let mut m = BTreeMap::new();
        for r in &self.roots {
            *m.entry(*r).or_insert(0) += 1;
        }
        m
    }

    fn from_counts(m: BTreeMap<ExactValue, usize>) -> Self {
        let roots = m.into_iter().flat_map(|(r, k)| std::iter::repeat_n(r, k)).collect();
        EulerFactor { roots }
    }

    pub fn mul(&self, other: &EulerFactor) -> Self {
        let mut roots = self.roots.clone();
        roots.extend_from_slice(&other.roots);
        Self::from_roots(roots)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `self` divides `other`: the polynomial of `self` divides that of `other`.
    pub fn divides(&self, other: &EulerFactor) -> bool {
        let theirs = other.counts();
        self.counts().iter().all(|(r, k)| theirs.get(r).copied().unwrap_or(0) >= *k)
    }

    /// `L_P v L_Q`, from the lcm of the polynomials.
    pub fn lcm(&self, other: &EulerFactor) -> Self {
        let mut m = self.counts();
        for (r, k) in other.counts() {
            let e = m.entry(r).or_insert(0);
            *e = (*e).max(k);
        }
        Self::from_counts(m)
    }

    /// `L_P ^ L_Q`, from the gcd of the polynomials.
    pub fn gcd(&self, other: &EulerFactor) -> Self {
        let theirs = other.counts();
        let m = self
            .counts()
            .into_iter()
            .filter_map(|(r, k)| {
                let j = k.min(theirs.get(&r).copied().unwrap_or(0));
                (j > 0).then_some((r, j))
            })
            .collect();
        Self::from_counts(m)
    }

    /// Pole classes `q_F^{s_0}` with multiplicity.
    pub fn poles(&self) -> Vec<(ExactValue, usize)> {
        self.counts().into_iter().collect()
    }

    pub fn has_simple_poles(&self) -> bool {
        self.counts().values().all(|&k| k == 1)
    }

    pub fn to_json(&self) -> Vec<ExactValueJson> {
        self.roots.iter().map(ExactValueJson::from).collect()
    }

    pub fn from_json(v: &[ExactValueJson]) -> Result<Self> {
        Ok(Self::from_roots(v.iter().map(ExactValue::try_from).collect::<Result<_>>()?))
    }
}

impl fmt::Display for EulerFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.roots.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (r, m) in self.poles() {
            let term = if r.zeta() == Q::new(1, 2) {
                // a minus sign folds into the binomial
                let abs = ExactValue::q_power(r.qexp());
                if abs.is_one() { "(1 + X)".to_string() } else { format!("(1 + {abs}*X)") }
            } else if r.is_one() {
                "(1 - X)".to_string()
            } else {
                format!("(1 - {r}*X)")
            };
            parts.push(if m > 1 { format!("{term}^{m}") } else { term });
        }
        write!(f, "1/({})", parts.join(""))
    }
}

impl fmt::Debug for EulerFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EulerFactor{:?}", self.roots)
    }
}

/// Serde adapter for the canonical JSON list.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub struct EulerFactorJson(pub Vec<ExactValueJson>);

/// `L(chi, s + shift)` for a character of a field `E` in the tower over `F`,
/// expanded in `X = q_F^{-s}`.
pub fn tate_lfactor(chi: &SmoothChar, shift: Q) -> EulerFactor {
    let Some(v) = chi.unramified_value() else {
        return EulerFactor::one();
    };
    let f = chi.field().f();
    // chi(pi_E) q_E^{-shift}, q_E = q_F^f
    let a = v.mul(&ExactValue::q_power(-shift * f as i64));
    EulerFactor::from_roots(a.roots(f))
}
