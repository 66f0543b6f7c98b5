//! Enumerated finite unit groups `(R_E / P_E^n)^*`.

use std::collections::HashMap;

use super::field::{decode_key, FieldElement, LocalField};
use crate::error::{Error, Result};

/// A complete enumeration of `(R_E/P_E^n)^*` together with a basis:
/// every element is written `prod g_i^{e_i}` with `0 <= e_i < m_i`, where
/// `m_i` is the order of `g_i` modulo the subgroup generated by
/// `g_1, ..., g_{i-1}`.
#[derive(Debug)]
pub struct UnitGroup {
    field: LocalField,
    level: u32,
    elements: Vec<FieldElement>,
    index: HashMap<u64, usize>,
    basis: Vec<BasisElement>,
    exponents: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct BasisElement {
    /// index of the generator in the enumeration
    pub element: usize,
    /// relative order
    pub order: u32,
    /// exponent vector of `g^order` over the earlier generators
    pub relation: Vec<u32>,
}

impl UnitGroup {
    pub(crate) fn enumerate(field: &LocalField, level: u32, budget: u64) -> Result<Self> {
        let q = field.q() as u128;
        let card = if level == 0 { 1 } else { q.pow(level - 1) * (q - 1) };
        if card > budget as u128 {
            return Err(Error::BudgetExceeded {
                cardinality: card.min(u64::MAX as u128) as u64,
                budget,
            });
        }
        let mut elements = Vec::with_capacity(card as usize);
        let mut index = HashMap::with_capacity(card as usize);
        if level == 0 {
            elements.push(field.one());
            index.insert(0, 0);
        } else {
            let ring = q.pow(level) as u64;
            for key in 0..ring {
                let x = decode_key(field, level, key);
                if x.valuation_bound() == super::number::ValBound::Exact(0) {
                    index.insert(key, elements.len());
                    elements.push(x);
                }
            }
        }
        debug_assert_eq!(elements.len() as u128, card);
        let mut g = UnitGroup {
            field: field.clone(),
            level,
            elements,
            index,
            basis: Vec::new(),
            exponents: Vec::new(),
        };
        g.build_basis()?;
        Ok(g)
    }

    fn build_basis(&mut self) -> Result<()> {
        let n = self.elements.len();
        let mut exps: Vec<Option<Vec<u32>>> = vec![None; n];
        exps[0] = Some(Vec::new()); // element 0 is the identity in both enumerations
        debug_assert!(self.elements[0].approx_eq(&self.field.one()));
        let mut members = vec![0usize];
        let mut basis: Vec<BasisElement> = Vec::new();
        while members.len() < n {
            let g = exps.iter().position(Option::is_none).expect("a non-member exists");
            let i = basis.len();
            // relative order and the relation
            let mut powers = vec![0usize];
            let mut cur = g;
            let mut m = 1u32;
            while exps[cur].is_none() {
                powers.push(cur);
                cur = self.mul_index(cur, g)?;
                m += 1;
            }
            let mut relation = exps[cur].clone().expect("member");
            relation.resize(i, 0);
            let old = members.clone();
            for (j, &pw) in powers.iter().enumerate().skip(1) {
                for &h in &old {
                    let x = self.mul_index(pw, h)?;
                    let mut ev = exps[h].clone().expect("member");
                    ev.resize(i, 0);
                    ev.push(j as u32);
                    if exps[x].is_some() {
                        return Err(Error::NotHomomorphism("unit group basis collision".into()));
                    }
                    exps[x] = Some(ev);
                    members.push(x);
                }
            }
            basis.push(BasisElement { element: g, order: m, relation });
        }
        let k = basis.len();
        self.exponents = exps
            .into_iter()
            .map(|e| {
                let mut e = e.expect("all enumerated");
                e.resize(k, 0);
                e
            })
            .collect();
        self.basis = basis;
        Ok(())
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    /// Exponent vector of an element over [`Self::basis`].
    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    /// Index of the class of a unit of the field.
    pub fn index_of(&self, u: &FieldElement) -> Result<usize> {
        if self.level == 0 {
            return Ok(0);
        }
        let key = u.residue_key(self.level)?;
        self.index.get(&key).copied().ok_or_else(|| {
            Error::PrecisionExhausted(format!("element {u:?} is not a unit at level {}", self.level))
        })
    }

    pub fn mul_index(&self, i: usize, j: usize) -> Result<usize> {
        self.index_of(&self.elements[i].mul(&self.elements[j]))
    }

    /// Whether element `i` is congruent to 1 modulo `P^m`.
    pub fn is_one_mod(&self, i: usize, m: u32) -> Result<bool> {
        if m == 0 {
            return Ok(true);
        }
        let d = self.elements[i].sub(&self.field.one());
        Ok(d.residue_key(m)? == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::number::PrimeContext;

    #[test]
    fn cardinalities() {
        let f = LocalField::base(PrimeContext::new(3, 10).unwrap());
        assert_eq!(f.unit_group(1).unwrap().len(), 2);
        assert_eq!(f.unit_group(2).unwrap().len(), 6);
        let k = f.make_extension(&f.int(2)).unwrap();
        assert_eq!(k.unit_group(2).unwrap().len(), 72);
        let r = f.make_extension(&f.int(3)).unwrap();
        assert_eq!(r.unit_group(3).unwrap().len(), 18);
    }

    #[test]
    fn basis_orders_multiply_to_cardinality() {
        let f = LocalField::base(PrimeContext::new(5, 10).unwrap());
        let k = f.make_extension(&f.int(5)).unwrap();
        for level in 0..4 {
            let g = k.unit_group(level).unwrap();
            let prod: u64 = g.basis().iter().map(|b| b.order as u64).product();
            assert_eq!(prod as usize, g.len());
        }
    }

    #[test]
    fn exponent_vectors_reconstruct_elements() {
        let f = LocalField::base(PrimeContext::new(3, 10).unwrap());
        let k = f.make_extension(&f.int(2)).unwrap();
        let g = k.unit_group(2).unwrap();
        for i in 0..g.len() {
            let mut acc = k.one();
            for (b, &e) in g.basis().iter().zip(g.exponents(i)) {
                acc = acc.mul(&g.elements()[b.element].pow(e as i64).unwrap());
            }
            assert_eq!(g.index_of(&acc).unwrap(), i);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = LocalField::base(PrimeContext::new(7, 10).unwrap());
        let err = LocalField::base(f.ctx());
        let k = err.make_extension(&err.int(3)).unwrap();
        match k.unit_group(5) {
            Err(Error::BudgetExceeded { cardinality, .. }) => assert_eq!(cardinality, 49u64.pow(4) * 48),
            other => panic!("{other:?}"),
        }
    }
}
