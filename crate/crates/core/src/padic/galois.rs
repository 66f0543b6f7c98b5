//! Sign automorphisms and subfield embeddings.

use super::field::{FieldElement, LocalField};
use super::number::Padic;
use crate::error::{Error, Result};

/// An automorphism acting on the monomial basis by signs: generator `j`
/// is negated when bit `j` of the mask is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisElement {
    field: LocalField,
    mask: u32,
}

impl GaloisElement {
    /// Validates that every generator square is fixed by the action of
    /// the mask on the layers below it.
    pub fn new(field: &LocalField, mask: u32) -> Result<Self> {
        if mask >> field.depth() != 0 {
            return Err(Error::NotInTower(format!("mask {mask:#b} exceeds the depth of {field:?}")));
        }
        let mut layer = field.clone();
        while let Some(par) = layer.parent().cloned() {
            let lower = mask & ((1u32 << par.depth()) - 1);
            let d = layer.generator_square().expect("non-base layer");
            if !d.sign_flip(lower).approx_eq(&d) {
                return Err(Error::NotInTower(format!(
                    "mask {mask:#b} does not extend to an automorphism of {field:?}"
                )));
            }
            layer = par;
        }
        Ok(GaloisElement { field: field.clone(), mask })
    }

    pub fn identity(field: &LocalField) -> Self {
        GaloisElement { field: field.clone(), mask: 0 }
    }

    /// The nontrivial automorphism of a field over its parent.
    pub fn top(field: &LocalField) -> Result<Self> {
        if field.is_base() {
            return Err(Error::NotInTower("the base field has no top automorphism".into()));
        }
        GaloisElement::new(field, 1 << (field.depth() - 1))
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn order(&self) -> u32 {
        if self.mask == 0 {
            1
        } else {
            2
        }
    }

    pub fn compose(&self, other: &GaloisElement) -> Result<GaloisElement> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("composing automorphisms of different fields".into()));
        }
        Ok(GaloisElement { field: self.field.clone(), mask: self.mask ^ other.mask })
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.field {
            return Err(Error::NotInTower(format!(
                "automorphism of {:?} applied to an element of {:?}",
                self.field,
                x.field()
            )));
        }
        Ok(x.sign_flip(self.mask))
    }

    /// `x * g(x)`, the norm to the fixed field of an involution.
    pub fn norm(&self, x: &FieldElement) -> Result<FieldElement> {
        Ok(x.mul(&self.apply(x)?))
    }
}

/// Norm from the field of `x` down to an ancestor `sub` in its tower.
pub fn norm_to(x: &FieldElement, sub: &LocalField) -> Result<FieldElement> {
    x.field().check_ancestor(sub)?;
    let mut y = x.clone();
    while y.field() != sub {
        let f = y.field().clone();
        let g = GaloisElement::top(&f)?;
        let par = f.parent().expect("non-base").clone();
        y = g.norm(&y)?.descend_to(&par)?;
    }
    Ok(y)
}

/// Trace from the field of `x` down to an ancestor.
pub fn trace_to(x: &FieldElement, sub: &LocalField) -> Result<FieldElement> {
    x.field().check_ancestor(sub)?;
    let mut y = x.clone();
    while y.field() != sub {
        let f = y.field().clone();
        let par = f.parent().expect("non-base").clone();
        y = y.add(&y.sign_flip(1 << (f.depth() - 1))).descend_to(&par)?;
    }
    Ok(y)
}

/// A `Q_p`-algebra embedding `sub -> sup`, fixed by the images of the
/// layer generators of `sub`.
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: LocalField,
    sup: LocalField,
    monomials: Vec<FieldElement>,
}

impl Embedding {
    /// `generator_images[j]` is the image of the generator of layer `j+1`.
    pub fn new(sub: &LocalField, sup: &LocalField, generator_images: &[FieldElement]) -> Result<Self> {
        if sub.root() != sup.root() {
            return Err(Error::NotInTower("embedding between different towers".into()));
        }
        if generator_images.len() != sub.depth() as usize {
            return Err(Error::NotInTower("one image per generator is required".into()));
        }
        let mut monomials = vec![sup.one()];
        let mut chain = Vec::new();
        let mut layer = sub.clone();
        while let Some(par) = layer.parent().cloned() {
            chain.push(layer.clone());
            layer = par;
        }
        chain.reverse();
        for (j, (t, lay)) in generator_images.iter().zip(&chain).enumerate() {
            if t.field() != sup {
                return Err(Error::FieldMismatch("generator image outside the target".into()));
            }
            // the image must square to the image of the generator square
            let d = lay.generator_square().expect("layer");
            let partial = Embedding { sub: lay.parent().unwrap().clone(), sup: sup.clone(), monomials: monomials.clone() };
            let dd = partial.apply(&d)?;
            if !t.mul(t).approx_eq(&dd) {
                return Err(Error::NotInTower(format!("generator image {j} does not square correctly")));
            }
            let upper: Vec<_> = monomials.iter().map(|m| m.mul(t)).collect();
            monomials.extend(upper);
        }
        Ok(Embedding { sub: sub.clone(), sup: sup.clone(), monomials })
    }

    /// The inclusion of an ancestor.
    pub fn chain(sub: &LocalField, sup: &LocalField) -> Result<Self> {
        sup.check_ancestor(sub)?;
        let n = sub.degree();
        let zero = Padic::zero(sup.ctx().p());
        let monomials = (0..n)
            .map(|i| {
                let mut c = vec![zero; sup.degree()];
                c[i] = sup.ctx().int(1);
                FieldElement { field: sup.clone(), coords: c }
            })
            .collect();
        Ok(Embedding { sub: sub.clone(), sup: sup.clone(), monomials })
    }

    pub fn sub(&self) -> &LocalField {
        &self.sub
    }

    pub fn sup(&self) -> &LocalField {
        &self.sup
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.sub {
            return Err(Error::FieldMismatch("embedding applied outside its source".into()));
        }
        let mut acc = self.sup.zero();
        for (c, m) in x.coords().iter().zip(&self.monomials) {
            if !c.is_zero() || c.abs_precision() < super::number::EXACT {
                acc = acc.add(&m.scale(c));
            }
        }
        Ok(acc)
    }

    /// Inverse on the image, for embeddings sending monomials to scaled
    /// monomials.
    pub fn project(&self, y: &FieldElement) -> Result<FieldElement> {
        if y.field() != &self.sup {
            return Err(Error::FieldMismatch("projection applied outside the target".into()));
        }
        let p = self.sup.ctx().p();
        let mut coords = vec![Padic::zero(p); self.sub.degree()];
        let mut used = vec![false; self.sup.degree()];
        for (s, m) in self.monomials.iter().enumerate() {
            let nz: Vec<usize> = (0..m.coords().len()).filter(|&i| !m.coords()[i].is_zero()).collect();
            if nz.len() != 1 {
                return Err(Error::NotInTower("embedding is not monomial".into()));
            }
            let i = nz[0];
            used[i] = true;
            coords[s] = y.coords()[i].mul(&m.coords()[i].inv()?);
        }
        for (i, c) in y.coords().iter().enumerate() {
            if !used[i] && !c.is_zero() {
                return Err(Error::NotInTower(format!("element does not lie in {:?}", self.sub)));
            }
        }
        self.sub.element(coords)
    }
}
