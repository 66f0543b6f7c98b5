//! Smooth multiplicative characters of local fields at finite level.

pub mod value;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{
    hilbert_symbol, norm_to, square_class, Embedding, FieldElement, GaloisElement, LocalField, UnitGroup,
};
pub use value::{frac, ExactValue, Q};

/// A character `E^* -> C^*` trivial on `1 + P^level`.
///
/// Values on units are stored as a table of roots of unity indexed by the
/// enumeration of `(R/P^level)^*`; the value on the fixed uniformizer is an
/// arbitrary [`ExactValue`]. Characters are kept at minimal level.
#[derive(Clone)]
pub struct SmoothChar {
    field: LocalField,
    group: Arc<UnitGroup>,
    table: Arc<Vec<Q>>,
    uniformizer_value: ExactValue,
}

impl PartialEq for SmoothChar {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.level() == other.level()
            && self.uniformizer_value == other.uniformizer_value
            && self.table == other.table
    }
}
impl Eq for SmoothChar {}

impl fmt::Debug for SmoothChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SmoothChar({:?}, level {}, pi -> {:?})",
            self.field,
            self.level(),
            self.uniformizer_value
        )
    }
}

impl SmoothChar {
    pub fn trivial(field: &LocalField) -> Result<Self> {
        Self::unramified(field, ExactValue::ONE)
    }

    pub fn unramified(field: &LocalField, uniformizer_value: ExactValue) -> Result<Self> {
        Ok(SmoothChar {
            field: field.clone(),
            group: field.unit_group(0)?,
            table: Arc::new(vec![Q::zero()]),
            uniformizer_value,
        })
    }

    /// `|.|_E^a`, normalized so that `|pi_E|_E = q_F^{-f_E}`.
    pub fn absvalue(field: &LocalField, a: Q) -> Result<Self> {
        let f = field.f() as i64;
        Self::unramified(field, ExactValue::q_power(-a * f))
    }

    /// Build from a full unit table; checks it against the group basis.
    pub fn from_table(field: &LocalField, level: u32, table: Vec<Q>, uniformizer_value: ExactValue) -> Result<Self> {
        let group = field.unit_group(level)?;
        if table.len() != group.len() {
            return Err(Error::NotHomomorphism("table size does not match the unit group".into()));
        }
        let table: Vec<Q> = table.into_iter().map(frac).collect();
        let basis_vals: Vec<Q> = group.basis().iter().map(|b| table[b.element]).collect();
        for (b, &c) in group.basis().iter().zip(&basis_vals) {
            let rel: Q = b.relation.iter().zip(&basis_vals).map(|(&e, &v)| v * e as i64).sum();
            if frac(c * b.order as i64 - rel) != Q::zero() {
                return Err(Error::NotHomomorphism("basis relation violated".into()));
            }
        }
        for (i, &t) in table.iter().enumerate() {
            let expect: Q = group.exponents(i).iter().zip(&basis_vals).map(|(&e, &v)| v * e as i64).sum();
            if frac(expect) != t {
                return Err(Error::NotHomomorphism(format!("table entry {i} is not multiplicative")));
            }
        }
        SmoothChar { field: field.clone(), group, table: Arc::new(table), uniformizer_value }.minimized()
    }

    /// Build from generator images; a breadth-first closure checks that the
    /// generators generate and that the assignment is multiplicative.
    pub fn from_generators(
        field: &LocalField,
        level: u32,
        generators: &[(FieldElement, Q)],
        uniformizer_value: ExactValue,
    ) -> Result<Self> {
        let group = field.unit_group(level)?;
        let gens: Vec<(usize, Q)> = generators
            .iter()
            .map(|(g, v)| Ok((group.index_of(g)?, frac(*v))))
            .collect::<Result<_>>()?;
        let mut table: Vec<Option<Q>> = vec![None; group.len()];
        table[0] = Some(Q::zero());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let vx = table[x].expect("visited");
            for &(g, vg) in &gens {
                let y = group.mul_index(x, g)?;
                let vy = frac(vx + vg);
                match table[y] {
                    Some(old) if old != vy => {
                        return Err(Error::NotHomomorphism(format!(
                            "generator images are inconsistent on {:?}",
                            group.elements()[y]
                        )))
                    }
                    Some(_) => {}
                    None => {
                        table[y] = Some(vy);
                        queue.push_back(y);
                    }
                }
            }
        }
        let table: Option<Vec<Q>> = table.into_iter().collect();
        let table = table.ok_or_else(|| {
            Error::NotHomomorphism(format!("generators do not generate the level-{level} unit group"))
        })?;
        SmoothChar { field: field.clone(), group, table: Arc::new(table), uniformizer_value }.minimized()
    }

    /// Character determined by choices `k_i in [0, m_i)` along the group basis.
    pub fn from_basis_choices(field: &LocalField, level: u32, choices: &[u32], uniformizer_value: ExactValue) -> Result<Self> {
        let group = field.unit_group(level)?;
        let mut vals: Vec<Q> = Vec::with_capacity(group.basis().len());
        for (i, b) in group.basis().iter().enumerate() {
            let rel: Q = b.relation.iter().zip(&vals).map(|(&e, &v)| v * e as i64).sum();
            let k = *choices.get(i).unwrap_or(&0) as i64 % b.order as i64;
            vals.push(frac((rel + Q::from_integer(k)) / b.order as i64));
        }
        let table = (0..group.len())
            .map(|i| frac(group.exponents(i).iter().zip(&vals).map(|(&e, &v)| v * e as i64).sum()))
            .collect();
        SmoothChar { field: field.clone(), group, table: Arc::new(table), uniformizer_value }.minimized()
    }

    pub fn random<R: Rng>(field: &LocalField, level: u32, uniformizer_value: ExactValue, rng: &mut R) -> Result<Self> {
        let group = field.unit_group(level)?;
        let choices: Vec<u32> = group.basis().iter().map(|b| rng.gen_range(0..b.order)).collect();
        Self::from_basis_choices(field, level, &choices, uniformizer_value)
    }

    /// Tabulate `x -> self(map(x))` on a field `target`, at `level`.
    pub fn pullback<F>(&self, target: &LocalField, level: u32, map: F) -> Result<Self>
    where
        F: Fn(&FieldElement) -> Result<FieldElement>,
    {
        let group = target.unit_group(level)?;
        let mut table = Vec::with_capacity(group.len());
        for u in group.elements() {
            let v = self.eval(&map(u)?)?;
            if !v.qexp().is_zero() {
                return Err(Error::NotHomomorphism("pulled-back map does not preserve units".into()));
            }
            table.push(v.zeta());
        }
        let uniformizer_value = self.eval(&map(&target.uniformizer())?)?;
        SmoothChar { field: target.clone(), group, table: Arc::new(table), uniformizer_value }.minimized()
    }

    fn minimized(self) -> Result<Self> {
        let n = self.level();
        for m in 0..n {
            let mut trivial = true;
            for i in 0..self.group.len() {
                if !self.table[i].is_zero() && self.group.is_one_mod(i, m)? {
                    trivial = false;
                    break;
                }
            }
            if trivial {
                return self.at_level(m);
            }
        }
        Ok(self)
    }

    /// Re-tabulate on `(R/P^m)^*`; only valid when the character is trivial
    /// on `1 + P^m` (or `m` is at least the current level).
    fn at_level(&self, m: u32) -> Result<Self> {
        let group = self.field.unit_group(m)?;
        let table = group
            .elements()
            .iter()
            .map(|u| Ok(self.table[self.group.index_of(u)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(SmoothChar { field: self.field.clone(), group, table: Arc::new(table), uniformizer_value: self.uniformizer_value })
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.group.level()
    }

    pub fn uniformizer_value(&self) -> ExactValue {
        self.uniformizer_value
    }

    pub fn unit_table(&self) -> &[Q] {
        &self.table
    }

    pub fn unit_group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn eval(&self, x: &FieldElement) -> Result<ExactValue> {
        if x.field() != &self.field {
            return Err(Error::FieldMismatch(format!(
                "character of {:?} evaluated on {:?}",
                self.field,
                x.field()
            )));
        }
        let v = x.valuation()?;
        let u = x.mul(&self.field.uniformizer_inv().pow(v)?);
        let i = self.group.index_of(&u)?;
        Ok(self.uniformizer_value.pow(v).mul(&ExactValue::root_of_unity(self.table[i])))
    }

    fn check_same_field(&self, other: &SmoothChar) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{:?} vs {:?}", self.field, other.field)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &SmoothChar) -> Result<Self> {
        self.check_same_field(other)?;
        let n = self.level().max(other.level());
        let a = self.at_level(n)?;
        let b = other.at_level(n)?;
        let table = a.table.iter().zip(b.table.iter()).map(|(x, y)| frac(x + y)).collect();
        SmoothChar {
            field: self.field.clone(),
            group: a.group,
            table: Arc::new(table),
            uniformizer_value: self.uniformizer_value.mul(&other.uniformizer_value),
        }
        .minimized()
    }

    pub fn inv(&self) -> Self {
        SmoothChar {
            field: self.field.clone(),
            group: self.group.clone(),
            table: Arc::new(self.table.iter().map(|x| frac(-x)).collect()),
            uniformizer_value: self.uniformizer_value.inv(),
        }
    }

    pub fn div(&self, other: &SmoothChar) -> Result<Self> {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        SmoothChar {
            field: self.field.clone(),
            group: self.group.clone(),
            table: Arc::new(self.table.iter().map(|x| frac(x * k)).collect()),
            uniformizer_value: self.uniformizer_value.pow(k),
        }
        .minimized()
    }

    pub fn is_trivial(&self) -> bool {
        self.level() == 0 && self.uniformizer_value.is_one()
    }

    /// Restriction to an ancestor field in the tower.
    pub fn restrict(&self, sub: &LocalField) -> Result<Self> {
        let e = self.field.e_over(sub)?;
        let sup = self.field.clone();
        self.pullback(sub, self.level().div_ceil(e), |x| x.embed_into(&sup))
    }

    /// Restriction along an arbitrary embedding into this character's field.
    pub fn restrict_along(&self, emb: &Embedding) -> Result<Self> {
        if emb.sup() != &self.field {
            return Err(Error::NotInTower("embedding does not land in the character's field".into()));
        }
        let e = self.field.e() / emb.sub().e();
        self.pullback(emb.sub(), self.level().div_ceil(e), |x| emb.apply(x))
    }

    /// `self o N_{sup/E}` for an extension `sup` above this character's field.
    pub fn compose_norm(&self, sup: &LocalField) -> Result<Self> {
        let e = sup.e_over(&self.field)?;
        let sub = self.field.clone();
        self.pullback(sup, self.level() * e, |x| norm_to(x, &sub))
    }

    /// `self o g`.
    pub fn conj(&self, g: &GaloisElement) -> Result<Self> {
        if g.field() != &self.field {
            return Err(Error::NotInTower("automorphism of a different field".into()));
        }
        self.pullback(&self.field, self.level(), |x| g.apply(x))
    }

    pub fn is_unramified(&self) -> bool {
        self.level() == 0
    }

    /// `chi(pi_E)` when the character is unramified.
    pub fn unramified_value(&self) -> Option<ExactValue> {
        self.is_unramified().then_some(self.uniformizer_value)
    }

    /// Regular with respect to an involution: `chi != chi o sigma`.
    pub fn is_regular(&self, sigma: &GaloisElement) -> Result<bool> {
        Ok(self.conj(sigma)? != *self)
    }

    /// The quadratic character `x -> (x, d)` of `E`, i.e. `eta` of `E(sqrt d)/E`.
    pub fn eta_for(field: &LocalField, d: &FieldElement) -> Result<Self> {
        let ramified = square_class(d)?.parity == 1;
        let level = u32::from(ramified);
        let group = field.unit_group(level)?;
        let to_q = |s: i32| if s == 1 { Q::zero() } else { Q::new(1, 2) };
        let table = group
            .elements()
            .iter()
            .map(|u| Ok(to_q(hilbert_symbol(u, d)?)))
            .collect::<Result<Vec<_>>>()?;
        let uv = ExactValue::root_of_unity(to_q(hilbert_symbol(&field.uniformizer(), d)?));
        SmoothChar { field: field.clone(), group, table: Arc::new(table), uniformizer_value: uv }.minimized()
    }

    /// `eta_{E'/E}` for `E'` a quadratic layer over `E`.
    pub fn eta_char(ext: &LocalField) -> Result<Self> {
        let d = ext
            .generator_square()
            .ok_or_else(|| Error::NotInTower("the base field has no eta character".into()))?;
        Self::eta_for(d.field(), &d)
    }

    /// Find `mu` on `B` with `mu o N_{M/B} = self`, where `emb: B -> M` and
    /// `sigma` generates `Gal(M/B)`. Returns both extensions (they differ by
    /// `eta_{M/B}`) or `None` when `self` is nontrivial on `ker N_{M/B}`.
    pub fn descend_through_norm(&self, emb: &Embedding, sigma: &GaloisElement) -> Result<Option<[SmoothChar; 2]>> {
        let m_field = self.field.clone();
        let b_field = emb.sub().clone();
        if emb.sup() != &m_field || sigma.field() != &m_field {
            return Err(Error::NotInTower("descent data does not match the character".into()));
        }
        // ker N = { x / sigma(x) } by Hilbert 90
        if self.conj(sigma)? != *self {
            return Ok(None);
        }
        let n = self.level();
        let ramified = m_field.e() != b_field.e();
        // U_M^k maps into U_B^m and every class of U_B/U_B^m in the image
        // of the norm is hit by a level-k representative
        let (m, k) = if ramified {
            let m = n.div_ceil(2).max(1);
            (m, n.max(2 * m - 1))
        } else {
            (n, n)
        };
        let gb = b_field.unit_group(m)?;
        let src = self.at_level(k)?;
        let mut table: Vec<Option<Q>> = vec![None; gb.len()];
        for (y, &val) in src.group.elements().iter().zip(src.table.iter()) {
            let nb = emb.project(&sigma.norm(y)?)?;
            let i = gb.index_of(&nb)?;
            match table[i] {
                Some(old) if old != val => {
                    return Err(Error::NotHomomorphism("norm descent is inconsistent".into()));
                }
                _ => table[i] = Some(val),
            }
        }
        let unif_norm = emb.project(&sigma.norm(&m_field.uniformizer())?)?;
        let chi_pi = self.uniformizer_value;
        let mut out = Vec::with_capacity(2);
        if ramified {
            // units hit form an index-2 subgroup; extend through a non-norm g
            let g = table.iter().position(Option::is_none).unwrap_or(0);
            let g2 = gb.mul_index(g, g)?;
            let half = table[g2].ok_or_else(|| Error::NotHomomorphism("g^2 is not a norm".into()))? / 2;
            for k in 0..2 {
                let mut t = table.clone();
                if t[g].is_none() {
                    let vg = frac(half + Q::new(k, 2));
                    for h in 0..gb.len() {
                        if let Some(vh) = table[h] {
                            t[gb.mul_index(g, h)?] = Some(frac(vg + vh));
                        }
                    }
                }
                let t: Vec<Q> = t.into_iter().map(|x| x.expect("covered")).collect();
                // N(pi_M) = pi_B * w
                let w = unif_norm.mul(&b_field.uniformizer_inv());
                let vw = t[gb.index_of(&w)?];
                let mu_pi = chi_pi.div(&ExactValue::root_of_unity(vw));
                out.push(SmoothChar::from_table(&b_field, m, t, mu_pi)?);
            }
            if out[0] == out[1] {
                return Err(Error::NotHomomorphism("both norm descents coincide".into()));
            }
        } else {
            let t: Vec<Q> = table
                .into_iter()
                .map(|x| x.ok_or_else(|| Error::NotHomomorphism("unit not a norm in unramified step".into())))
                .collect::<Result<_>>()?;
            // N(pi_M) = pi_B^2 * w
            let w = unif_norm.mul(&b_field.uniformizer_inv().pow(2)?);
            let vw = t[gb.index_of(&w)?];
            let sq = chi_pi.div(&ExactValue::root_of_unity(vw));
            for r in sq.roots(2) {
                out.push(SmoothChar::from_table(&b_field, m, t.clone(), r)?);
            }
        }
        let b = out.pop().expect("two");
        let a = out.pop().expect("two");
        Ok(Some([a, b]))
    }
}

#[cfg(test)]
mod tests;
