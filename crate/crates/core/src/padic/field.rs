//! Towers of quadratic extensions of `Q_p` and their elements.
//!
//! A field of depth `k` has basis the `2^k` monomials in the layer
//! generators `sqrt(d_1), ..., sqrt(d_k)`; coordinate `i` multiplies the
//! monomial whose bit set is `i`. Each generator square `d_j` lives in the
//! layer below and is normalized to valuation 0 (unramified step) or 1
//! (ramified step), so `{1, sqrt(d_j)}` is always an integral basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::number::{Padic, PrimeContext, ValBound};
use super::units::UnitGroup;
use crate::error::{Error, Result};

static NEXT_FIELD_ID: AtomicU64 = AtomicU64::new(0);

/// Default cap on the size of enumerated unit groups.
pub const DEFAULT_BUDGET: u64 = 400_000;

#[derive(Clone)]
pub struct LocalField(Arc<FieldData>);

struct FieldData {
    id: u64,
    ctx: PrimeContext,
    label: String,
    parent: Option<LocalField>,
    /// generator square, coordinates in the parent
    d: Vec<Padic>,
    /// `c` in the parent with `d = d_given * c^2`
    d_scale: Vec<Padic>,
    ramified_step: bool,
    depth: u32,
    e: u32,
    f: u32,
    q: u64,
    uniformizer: Vec<Padic>,
    uniformizer_inv: Vec<Padic>,
    budget: u64,
    units: Mutex<HashMap<u32, Arc<UnitGroup>>>,
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for LocalField {}

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[e={}, f={}, q={}]", self.0.label, self.0.e, self.0.f, self.0.q)
    }
}

impl LocalField {
    /// The base field `Q_p`.
    pub fn base(ctx: PrimeContext) -> Self {
        let p = ctx.p();
        LocalField(Arc::new(FieldData {
            id: NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed),
            ctx,
            label: format!("Q{p}"),
            parent: None,
            d: Vec::new(),
            d_scale: Vec::new(),
            ramified_step: false,
            depth: 0,
            e: 1,
            f: 1,
            q: p,
            uniformizer: vec![ctx.int(p as i64)],
            uniformizer_inv: vec![ctx.ratio(1, p as i64).expect("p invertible")],
            budget: DEFAULT_BUDGET,
            units: Mutex::new(HashMap::new()),
        }))
    }

    /// The base field with an explicit unit-group enumeration cap, inherited
    /// by every extension built on top of it.
    pub fn base_with_budget(ctx: PrimeContext, budget: u64) -> Self {
        let f = Self::base(ctx);
        let mut data = Arc::try_unwrap(f.0).unwrap_or_else(|_| unreachable!("fresh field"));
        data.budget = budget;
        LocalField(Arc::new(data))
    }

    /// Adjoin a square root of `d` (an element of `self`).
    pub fn make_extension(&self, d: &FieldElement) -> Result<LocalField> {
        self.make_extension_labeled(d, None)
    }

    pub fn make_extension_labeled(&self, d: &FieldElement, label: Option<&str>) -> Result<LocalField> {
        if &d.field != self {
            return Err(Error::FieldMismatch(format!(
                "adjoining an element of {:?} to {:?}",
                d.field, self
            )));
        }
        let v = d.valuation()?;
        let k = v.div_euclid(2);
        // d' = d * pi^{-2k}, so the scale is pi^{-k}
        let scale = self.uniformizer().pow(-k)?;
        let dn = d.mul(&scale).mul(&scale);
        let ramified = v.rem_euclid(2) == 1;
        if !ramified && dn.legendre_unit()? == 1 {
            return Err(Error::IsSquare(format!("{d:?} is a square in {self:?}")));
        }
        let data = &self.0;
        let (e, f) = if ramified { (data.e * 2, data.f) } else { (data.e, data.f * 2) };
        let q = data.ctx.p().pow(f);
        let n = 1usize << data.depth;
        let zero = Padic::zero(data.ctx.p());
        let pad = |c: &[Padic]| {
            let mut v = c.to_vec();
            v.resize(2 * n, zero);
            v
        };
        let (uniformizer, uniformizer_inv) = if ramified {
            // pi = sqrt(d'), pi^{-1} = sqrt(d') / d'
            let mut u = vec![zero; 2 * n];
            u[n] = data.ctx.int(1);
            let dinv = dn.inv()?;
            let mut ui = vec![zero; 2 * n];
            ui[n..].copy_from_slice(&dinv.coords);
            (u, ui)
        } else {
            (pad(&data.uniformizer), pad(&data.uniformizer_inv))
        };
        let label = label.map(str::to_string).unwrap_or_else(|| {
            format!("{}(sqrt{})", data.label, if ramified { "[ram]" } else { "[unr]" })
        });
        Ok(LocalField(Arc::new(FieldData {
            id: NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed),
            ctx: data.ctx,
            label,
            parent: Some(self.clone()),
            d: dn.coords,
            d_scale: scale.coords,
            ramified_step: ramified,
            depth: data.depth + 1,
            e,
            f,
            q,
            uniformizer,
            uniformizer_inv,
            budget: data.budget,
            units: Mutex::new(HashMap::new()),
        })))
    }

    pub fn ctx(&self) -> PrimeContext {
        self.0.ctx
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn parent(&self) -> Option<&LocalField> {
        self.0.parent.as_ref()
    }

    pub fn is_base(&self) -> bool {
        self.0.parent.is_none()
    }

    /// The base field `Q_p` at the root of the tower.
    pub fn root(&self) -> LocalField {
        let mut f = self.clone();
        while let Some(p) = f.parent().cloned() {
            f = p;
        }
        f
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    pub fn degree(&self) -> usize {
        1 << self.0.depth
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn f(&self) -> u32 {
        self.0.f
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn budget(&self) -> u64 {
        self.0.budget
    }

    pub fn is_ramified_step(&self) -> bool {
        self.0.ramified_step
    }

    /// Generator square `d` as an element of the parent.
    pub fn generator_square(&self) -> Option<FieldElement> {
        self.parent().map(|par| FieldElement { field: par.clone(), coords: self.0.d.clone() })
    }

    /// The factor `c` with `generator_square = d_given * c^2`.
    pub fn generator_scale(&self) -> Option<FieldElement> {
        self.parent().map(|par| FieldElement { field: par.clone(), coords: self.0.d_scale.clone() })
    }

    /// `sqrt(d)` for the top layer.
    pub fn generator(&self) -> FieldElement {
        let n = self.degree();
        let mut c = vec![self.zero_coord(); n];
        if self.0.depth == 0 {
            c[0] = self.0.ctx.int(1);
        } else {
            c[n / 2] = self.0.ctx.int(1);
        }
        FieldElement { field: self.clone(), coords: c }
    }

    pub fn uniformizer(&self) -> FieldElement {
        FieldElement { field: self.clone(), coords: self.0.uniformizer.clone() }
    }

    pub fn uniformizer_inv(&self) -> FieldElement {
        FieldElement { field: self.clone(), coords: self.0.uniformizer_inv.clone() }
    }

    fn zero_coord(&self) -> Padic {
        Padic::zero(self.0.ctx.p())
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), coords: vec![self.zero_coord(); self.degree()] }
    }

    pub fn int(&self, n: i64) -> FieldElement {
        self.scalar(self.0.ctx.int(n))
    }

    pub fn one(&self) -> FieldElement {
        self.int(1)
    }

    pub fn scalar(&self, a: Padic) -> FieldElement {
        let mut c = vec![self.zero_coord(); self.degree()];
        c[0] = a;
        FieldElement { field: self.clone(), coords: c }
    }

    pub fn element(&self, coords: Vec<Padic>) -> Result<FieldElement> {
        if coords.len() != self.degree() {
            return Err(Error::FieldMismatch(format!(
                "{} coordinates given for a field of degree {}",
                coords.len(),
                self.degree()
            )));
        }
        Ok(FieldElement { field: self.clone(), coords })
    }

    pub fn element_from_ints(&self, coords: &[i64]) -> Result<FieldElement> {
        self.element(coords.iter().map(|&c| self.0.ctx.int(c)).collect())
    }

    /// Whether `sub` is `self` or one of its ancestors.
    pub fn has_ancestor(&self, sub: &LocalField) -> bool {
        let mut f = self.clone();
        loop {
            if &f == sub {
                return true;
            }
            match f.parent().cloned() {
                Some(p) => f = p,
                None => return false,
            }
        }
    }

    /// Ramification index of `self` over the ancestor `sub`.
    pub fn e_over(&self, sub: &LocalField) -> Result<u32> {
        self.check_ancestor(sub)?;
        Ok(self.e() / sub.e())
    }

    pub fn f_over(&self, sub: &LocalField) -> Result<u32> {
        self.check_ancestor(sub)?;
        Ok(self.f() / sub.f())
    }

    pub(crate) fn check_ancestor(&self, sub: &LocalField) -> Result<()> {
        if self.has_ancestor(sub) {
            Ok(())
        } else {
            Err(Error::NotInTower(format!("{sub:?} is not below {self:?}")))
        }
    }

    /// Exponents `k_i` such that the level-`n` residue of an integral
    /// element is its base coordinates taken mod `p^{k_i}`.
    pub fn digit_exponents(&self, n: u32) -> Vec<u32> {
        match self.parent() {
            None => vec![n],
            Some(par) => {
                let (lo, hi) = if self.0.ramified_step { (n.div_ceil(2), n / 2) } else { (n, n) };
                let mut v = par.digit_exponents(lo);
                v.extend(par.digit_exponents(hi));
                v
            }
        }
    }

    /// The group `(R/P^n)^*`, enumerated once and cached.
    pub fn unit_group(&self, level: u32) -> Result<Arc<UnitGroup>> {
        if let Some(g) = self.0.units.lock().expect("unit cache").get(&level) {
            return Ok(g.clone());
        }
        let g = Arc::new(UnitGroup::enumerate(self, level, self.0.budget)?);
        self.0
            .units
            .lock()
            .expect("unit cache")
            .entry(level)
            .or_insert_with(|| g.clone());
        Ok(g)
    }

    /// Units of level 1 in residue order, i.e. representatives of `k^*`.
    pub fn residue_units(&self) -> Result<Vec<FieldElement>> {
        Ok(self.unit_group(1)?.elements().to_vec())
    }

    /// A fixed nonsquare unit: the first nonsquare in residue order.
    pub fn nonsquare_unit(&self) -> Result<FieldElement> {
        for u in self.residue_units()? {
            if u.legendre_unit()? == -1 {
                return Ok(u);
            }
        }
        unreachable!("residue field of odd characteristic has nonsquares")
    }

    /// Representatives `1, u, pi, u*pi` of `E^*/E^{*2}` in that order.
    pub fn square_class_reps(&self) -> Result<[FieldElement; 4]> {
        let u = self.nonsquare_unit()?;
        let pi = self.uniformizer();
        let upi = u.mul(&pi);
        Ok([self.one(), u, pi, upi])
    }

    pub(crate) fn mul_raw(&self, x: &[Padic], y: &[Padic]) -> Vec<Padic> {
        match self.parent() {
            None => vec![x[0].mul(&y[0])],
            Some(par) => {
                let h = x.len() / 2;
                let (x0, x1) = x.split_at(h);
                let (y0, y1) = y.split_at(h);
                let a = par.mul_raw(x0, y0);
                let b = par.mul_raw(x1, y1);
                let bd = par.mul_raw(&b, &self.0.d);
                let c0 = add_raw(&a, &bd);
                let c1 = add_raw(&par.mul_raw(x0, y1), &par.mul_raw(x1, y0));
                let mut out = c0;
                out.extend(c1);
                out
            }
        }
    }

    pub(crate) fn inv_raw(&self, x: &[Padic]) -> Result<Vec<Padic>> {
        match self.parent() {
            None => Ok(vec![x[0].inv()?]),
            Some(par) => {
                let h = x.len() / 2;
                let (x0, x1) = x.split_at(h);
                let n0 = par.mul_raw(x0, x0);
                let n1 = par.mul_raw(&par.mul_raw(x1, x1), &self.0.d);
                let norm = sub_raw(&n0, &n1);
                let ninv = par.inv_raw(&norm)?;
                let mut out = par.mul_raw(x0, &ninv);
                out.extend(neg_raw(&par.mul_raw(x1, &ninv)));
                Ok(out)
            }
        }
    }

    pub(crate) fn val_raw(&self, x: &[Padic]) -> ValBound {
        match self.parent() {
            None => x[0].valuation(),
            Some(par) => {
                let h = x.len() / 2;
                let a = par.val_raw(&x[..h]);
                let b = par.val_raw(&x[h..]);
                if self.0.ramified_step {
                    a.affine(2, 0).min_no_cancel(b.affine(2, 1))
                } else {
                    a.min_no_cancel(b)
                }
            }
        }
    }
}

pub(crate) fn add_raw(x: &[Padic], y: &[Padic]) -> Vec<Padic> {
    x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
}

pub(crate) fn sub_raw(x: &[Padic], y: &[Padic]) -> Vec<Padic> {
    x.iter().zip(y).map(|(a, b)| a.sub(b)).collect()
}

pub(crate) fn neg_raw(x: &[Padic]) -> Vec<Padic> {
    x.iter().map(Padic::neg).collect()
}

/// An element of a [`LocalField`] in the monomial basis over `Q_p`.
#[derive(Clone)]
pub struct FieldElement {
    pub(crate) field: LocalField,
    pub(crate) coords: Vec<Padic>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl FieldElement {
    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn coords(&self) -> &[Padic] {
        &self.coords
    }

    fn same_field(&self, other: &FieldElement) {
        assert!(
            self.field == other.field,
            "arithmetic across fields {:?} and {:?}",
            self.field,
            other.field
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.same_field(other);
        FieldElement { field: self.field.clone(), coords: add_raw(&self.coords, &other.coords) }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.same_field(other);
        FieldElement { field: self.field.clone(), coords: sub_raw(&self.coords, &other.coords) }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: neg_raw(&self.coords) }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.same_field(other);
        FieldElement { field: self.field.clone(), coords: self.field.mul_raw(&self.coords, &other.coords) }
    }

    pub fn scale(&self, a: &Padic) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c.mul(a)).collect() }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(FieldElement { field: self.field.clone(), coords: self.field.inv_raw(&self.coords)? })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        let mut base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// True when every coordinate is indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Padic::is_zero)
    }

    pub fn approx_eq(&self, other: &FieldElement) -> bool {
        self.field == other.field && self.sub(other).is_zero()
    }

    pub fn valuation_bound(&self) -> ValBound {
        self.field.val_raw(&self.coords)
    }

    /// Normalized valuation in the element's own field.
    pub fn valuation(&self) -> Result<i64> {
        match self.valuation_bound() {
            ValBound::Exact(v) => Ok(v),
            ValBound::AtLeast(v) => Err(Error::PrecisionExhausted(format!(
                "element is indistinguishable from 0 (valuation at least {v})"
            ))),
        }
    }

    /// `x * pi^{-v(x)}`.
    pub fn unit_part(&self) -> Result<FieldElement> {
        let v = self.valuation()?;
        Ok(self.mul(&self.field.uniformizer().pow(-v)?))
    }

    /// Legendre symbol of the residue of a unit: `u^{(q-1)/2} mod P`.
    pub fn legendre_unit(&self) -> Result<i32> {
        let q = self.field.q();
        let w = self.pow(((q - 1) / 2) as i64)?;
        let one = self.field.one();
        if w.sub(&one).valuation_bound_at_least(1) {
            Ok(1)
        } else if w.add(&one).valuation_bound_at_least(1) {
            Ok(-1)
        } else {
            Err(Error::PrecisionExhausted("Legendre exponentiation did not reach +-1".into()))
        }
    }

    fn valuation_bound_at_least(&self, k: i64) -> bool {
        match self.valuation_bound() {
            ValBound::Exact(v) | ValBound::AtLeast(v) => v >= k,
        }
    }

    /// Zero-pad the coordinates into an extension higher in the tower.
    pub fn embed_into(&self, sup: &LocalField) -> Result<FieldElement> {
        sup.check_ancestor(&self.field)?;
        let mut c = self.coords.clone();
        c.resize(sup.degree(), Padic::zero(sup.ctx().p()));
        Ok(FieldElement { field: sup.clone(), coords: c })
    }

    /// Drop to an ancestor field; fails unless the upper coordinates vanish.
    pub fn descend_to(&self, sub: &LocalField) -> Result<FieldElement> {
        self.field.check_ancestor(sub)?;
        let n = sub.degree();
        if !self.coords[n..].iter().all(Padic::is_zero) {
            return Err(Error::NotInTower(format!("element does not lie in {sub:?}")));
        }
        Ok(FieldElement { field: sub.clone(), coords: self.coords[..n].to_vec() })
    }

    /// Residue key of an integral element modulo `P^n`, as a mixed-radix
    /// integer over the digit exponents.
    pub fn residue_key(&self, n: u32) -> Result<u64> {
        let p = self.field.ctx().p();
        let exps = self.field.digit_exponents(n);
        let mut key: u64 = 0;
        for (c, &k) in self.coords.iter().zip(&exps).rev() {
            let digit = c.residue(k)?;
            key = key * p.pow(k) + digit;
        }
        Ok(key)
    }

    /// Apply the sign automorphism flipping the generators in `mask`.
    pub(crate) fn sign_flip(&self, mask: u32) -> FieldElement {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| if (i as u32 & mask).count_ones() % 2 == 1 { c.neg() } else { *c })
            .collect();
        FieldElement { field: self.field.clone(), coords }
    }

    /// Square root, if one exists, by residue search and Newton iteration.
    pub fn sqrt(&self) -> Result<Option<FieldElement>> {
        let v = self.valuation()?;
        if v.rem_euclid(2) != 0 {
            return Ok(None);
        }
        let u = self.unit_part()?;
        let mut y = None;
        for r in self.field.residue_units()? {
            if r.mul(&r).sub(&u).valuation_bound_at_least(1) {
                y = Some(r);
                break;
            }
        }
        let Some(mut y) = y else { return Ok(None) };
        let half = self.field.scalar(self.field.ctx().ratio(1, 2)?);
        // iterate until the residual vanishes at the tracked precision or
        // the iteration stalls at the precision cap
        for _ in 0..64 {
            if y.mul(&y).sub(&u).is_zero() {
                break;
            }
            let next = y.add(&u.div(&y)?).mul(&half);
            if next.approx_eq(&y) {
                break;
            }
            y = next;
        }
        let root = y.mul(&self.field.uniformizer().pow(v / 2)?);
        Ok(Some(root))
    }
}

/// Mixed-radix decoding matching [`FieldElement::residue_key`].
pub(crate) fn decode_key(field: &LocalField, n: u32, mut key: u64) -> FieldElement {
    let p = field.ctx().p();
    let ctx = field.ctx();
    let coords = field
        .digit_exponents(n)
        .iter()
        .map(|&k| {
            let m = p.pow(k);
            let d = key % m;
            key /= m;
            ctx.int(d as i64)
        })
        .collect();
    FieldElement { field: field.clone(), coords }
}
