//! Quartic towers `L ⊃ K ⊃ F`: classification by square classes, the
//! biquadratic lattice of a Galois-biquadratic tower, and the dihedral
//! closure of a non-Galois one.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{square_class, Embedding, FieldElement, GaloisElement, LocalField, SquareClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TowerClass {
    Biquadratic,
    Cyclic4,
    NonGaloisDihedral8,
}

impl fmt::Display for TowerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TowerClass::Biquadratic => "Biquadratic",
            TowerClass::Cyclic4 => "Cyclic4",
            TowerClass::NonGaloisDihedral8 => "NonGaloisDihedral8",
        };
        f.write_str(s)
    }
}

/// The fields of a tower `L = K(sqrt delta)`, `K = F(sqrt d1)`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub f: LocalField,
    pub k: LocalField,
    pub l: LocalField,
    /// normalized generator square of `L/K`
    pub delta: FieldElement,
}

impl Tower {
    pub fn of(l: &LocalField) -> Result<Tower> {
        let k = l.parent().cloned().ok_or_else(|| Error::NotInTower("L must be quadratic over K".into()))?;
        let f = k.parent().cloned().ok_or_else(|| Error::NotInTower("K must be quadratic over F".into()))?;
        let delta = l.generator_square().expect("non-base");
        Ok(Tower { f, k, l: l.clone(), delta })
    }

    /// `sigma_{K/F}`.
    pub fn sigma_k(&self) -> Result<GaloisElement> {
        GaloisElement::top(&self.k)
    }

    /// The square classes in `K` of the representatives `1, u, pi, u pi` of `F`.
    pub fn f_classes_in_k(&self) -> Result<[SquareClass; 4]> {
        let reps = self.f.square_class_reps()?;
        let mut out = [SquareClass::TRIVIAL; 4];
        for (o, r) in out.iter_mut().zip(&reps) {
            *o = square_class(&r.embed_into(&self.k)?)?;
        }
        Ok(out)
    }

    /// Least representative `a in {1, u, pi, u pi}` of `F` with
    /// `a delta in K^{*2}`, if any.
    fn f_rep_for(&self, x: &FieldElement) -> Result<Option<FieldElement>> {
        let target = square_class(x)?;
        let reps = self.f.square_class_reps()?;
        for (r, c) in reps.iter().zip(self.f_classes_in_k()?) {
            if c == target {
                return Ok(Some(r.clone()));
            }
        }
        Ok(None)
    }
}

/// Classify `L/K/F` using square-class data only.
pub fn classify_tower(l: &LocalField) -> Result<TowerClass> {
    let t = Tower::of(l)?;
    let cls = square_class(&t.delta)?;
    if cls.is_trivial() {
        return Err(Error::IsSquare("delta is a square in K".into()));
    }
    if t.f_classes_in_k()?.contains(&cls) {
        return Ok(TowerClass::Biquadratic);
    }
    let s = t.sigma_k()?;
    let ratio = s.apply(&t.delta)?.div(&t.delta)?;
    if square_class(&ratio)?.is_trivial() {
        Ok(TowerClass::Cyclic4)
    } else {
        Ok(TowerClass::NonGaloisDihedral8)
    }
}

/// Monomial images of the generators of the layers of `sub` inside `sup`
/// for the first `depth` layers (an ancestor chain shared by both).
fn chain_images(depth: u32, sup: &LocalField) -> Vec<FieldElement> {
    (0..depth).map(|j| monomial(sup, 1 << j)).collect()
}

fn monomial(field: &LocalField, bits: usize) -> FieldElement {
    let mut x = field.zero();
    x.coords[bits] = field.ctx().int(1);
    x
}

/// Figure 1: `B = K(sqrt a) = K'K''` with `a in F`, `K' = F(sqrt a)`,
/// `K'' = F(sqrt(a d1))`.
#[derive(Clone, Debug)]
pub struct BiquadraticLattice {
    pub f: LocalField,
    pub k: LocalField,
    pub kp: LocalField,
    pub kpp: LocalField,
    pub b: LocalField,
    /// generator square of `K'` (an element of `F`)
    pub a: FieldElement,
    /// `sqrt(a)` as an element of `B`
    pub sqrt_a: FieldElement,
    pub emb_kp: Embedding,
    pub emb_kpp: Embedding,
    pub sigma_k: GaloisElement,
    pub sigma_kp: GaloisElement,
    pub sigma_kpp: GaloisElement,
    /// isomorphism `B -> L` when the input `L` was presented differently
    pub transport: Option<Embedding>,
}

impl BiquadraticLattice {
    /// Lattice with `B = K(sqrt a)` for `a` in `F` (of valuation 0 or 1).
    pub fn from_f_element(k: &LocalField, a: &FieldElement) -> Result<Self> {
        if k.is_base() {
            return Err(Error::NotInTower("K must have a parent".into()));
        }
        let b = k.make_extension_labeled(&a.embed_into(k)?, Some(&format!("{}(sqrt a)", k.label())))?;
        Self::on(&b, a, None)
    }

    fn on(b: &LocalField, a: &FieldElement, transport: Option<Embedding>) -> Result<Self> {
        let k = b.parent().cloned().expect("B over K");
        let f = k.parent().cloned().expect("K over F");
        let df = f.depth();
        let d1 = k.generator_square().expect("K over F");
        let kp = f.make_extension_labeled(a, Some(&format!("{}(sqrt a)", f.label())))?;
        let kpp = f.make_extension_labeled(&a.mul(&d1), Some(&format!("{}(sqrt a.d1)", f.label())))?;
        // the generator of B is sqrt(a) times the normalization scale (in K)
        let sqrt_a = b.generator().mul(&b.generator_scale().expect("B over K").inv()?.embed_into(b)?);
        let mut imgs = chain_images(df, b);
        imgs.push(sqrt_a.clone());
        let emb_kp = Embedding::new(&kp, b, &imgs)?;
        let scale = kpp.generator_scale().expect("K'' over F").embed_into(b)?;
        let mut imgs = chain_images(df, b);
        imgs.push(sqrt_a.mul(&monomial(b, 1 << df)).mul(&scale));
        let emb_kpp = Embedding::new(&kpp, b, &imgs)?;
        // the conjugation fixing E' is the nontrivial sign flip over F fixing its generator
        let fixing = |t: &FieldElement| -> Result<GaloisElement> {
            for mask in [1u32 << df, (1 << df) | (1 << (df + 1))] {
                if t.sign_flip(mask).approx_eq(t) {
                    return GaloisElement::new(b, mask);
                }
            }
            Err(Error::NotInTower("no conjugation fixes the subfield".into()))
        };
        let sigma_kp = fixing(&emb_kp.apply(&kp.generator())?)?;
        let sigma_kpp = fixing(&emb_kpp.apply(&kpp.generator())?)?;
        Ok(BiquadraticLattice {
            f,
            k,
            kp,
            kpp,
            b: b.clone(),
            a: a.clone(),
            sqrt_a,
            emb_kp,
            emb_kpp,
            sigma_k: GaloisElement::new(b, 1 << (df + 1))?,
            sigma_kp,
            sigma_kpp,
            transport,
        })
    }

    /// The conjugation of `B` with fixed field `E` among `K, K', K''`.
    pub fn sigma_fixing(&self, e: &LocalField) -> Option<&GaloisElement> {
        if e == &self.k {
            Some(&self.sigma_k)
        } else if e == &self.kp {
            Some(&self.sigma_kp)
        } else if e == &self.kpp {
            Some(&self.sigma_kpp)
        } else {
            None
        }
    }
}

/// Build the lattice of a tower classified `Biquadratic`.
pub fn biquadratic_lattice(l: &LocalField) -> Result<BiquadraticLattice> {
    if classify_tower(l)? != TowerClass::Biquadratic {
        return Err(Error::WrongClass(format!("{l:?} is not biquadratic over F")));
    }
    let t = Tower::of(l)?;
    let df = t.f.depth();
    // already of the form K(sqrt a), a in F
    if let Ok(a) = t.delta.descend_to(&t.f) {
        return BiquadraticLattice::on(l, &a, None);
    }
    let a = t.f_rep_for(&t.delta)?.expect("biquadratic class");
    let b = t.k.make_extension_labeled(&a.embed_into(&t.k)?, Some(&format!("{}(sqrt a)", t.k.label())))?;
    // sqrt a -> c^{-1} sqrt delta with c^2 = delta / a
    let c = t
        .delta
        .div(&a.embed_into(&t.k)?)?
        .sqrt()?
        .ok_or_else(|| Error::WrongClass("delta / a is not a square".into()))?;
    // generator of B = s_B sqrt(a) -> s_B c^{-1} sqrt(delta)
    let s_b = b.generator_scale().expect("B over K");
    let mut imgs = chain_images(df + 1, l);
    imgs.push(l.generator().mul(&s_b.div(&c)?.embed_into(l)?));
    let transport = Embedding::new(&b, l, &imgs)?;
    BiquadraticLattice::on(&b, &a, Some(transport))
}

/// Figure 2: the Galois closure `M = B(sqrt delta)` of a non-Galois `L`,
/// with `B = K(sqrt a)`, `a in F` in the class of `N_{K/F}(delta)`.
#[derive(Clone, Debug)]
pub struct DihedralClosure {
    pub tower: Tower,
    pub m: LocalField,
    pub lattice: BiquadraticLattice,
    /// `L -> M`, monomial
    pub emb_l: Embedding,
    /// `L' = K(sqrt sigma(delta))` and its embedding
    pub lp: LocalField,
    pub emb_lp: Embedding,
    /// `K' = F(sqrt(d1 N delta))` with `M/K'` cyclic of degree 4
    pub kp_cyclic: LocalField,
    pub emb_kp_cyclic: Embedding,
    pub sigma_m_l: GaloisElement,
    pub sigma_m_lp: GaloisElement,
    pub sigma_m_b: GaloisElement,
}

pub fn galois_closure(l: &LocalField) -> Result<DihedralClosure> {
    if classify_tower(l)? != TowerClass::NonGaloisDihedral8 {
        return Err(Error::WrongClass(format!("{l:?} is Galois over F")));
    }
    let t = Tower::of(l)?;
    let df = t.f.depth();
    let s = t.sigma_k()?;
    let sdelta = s.apply(&t.delta)?;
    let ndelta = t.delta.mul(&sdelta);
    let a = t.f_rep_for(&ndelta)?.ok_or_else(|| Error::WrongClass("N(delta) is not in the F-image".into()))?;
    let lattice = BiquadraticLattice::from_f_element(&t.k, &a)?;
    let b = lattice.b.clone();
    let m = b.make_extension_labeled(&t.delta.embed_into(&b)?, Some(&format!("{}(sqrt delta)", b.label())))?;
    let top = 1usize << (df + 2);
    let scale_m = m.generator_scale().expect("M over B");
    // L -> M: sqrt delta -> sqrt(delta) = generator / scale
    let mut imgs = chain_images(df + 1, &m);
    imgs.push(monomial(&m, top).mul(&scale_m.inv()?.embed_into(&m)?));
    let emb_l = Embedding::new(l, &m, &imgs)?;
    // sqrt(N delta) = c sqrt a with c in K
    let c = ndelta
        .div(&a.embed_into(&t.k)?)?
        .sqrt()?
        .ok_or_else(|| Error::WrongClass("N(delta)/a is not a square in K".into()))?;
    let sqrt_ndelta = c.embed_into(&m)?.mul(&lattice.sqrt_a.embed_into(&m)?);
    let sqrt_delta = emb_l.apply(&l.generator())?;
    let lp = t.k.make_extension_labeled(&sdelta, Some(&format!("{}(sqrt sigma delta)", t.k.label())))?;
    let lp_scale = lp.generator_scale().expect("L' over K").embed_into(&m)?;
    // sqrt(sigma delta) = sqrt(N delta) / sqrt(delta)
    let mut imgs = chain_images(df + 1, &m);
    imgs.push(sqrt_ndelta.div(&sqrt_delta)?.mul(&lp_scale));
    let emb_lp = Embedding::new(&lp, &m, &imgs)?;
    let d1 = t.k.generator_square().expect("K over F");
    let ndelta_f = ndelta.descend_to(&t.f)?;
    let kp_cyclic = t.f.make_extension_labeled(&d1.mul(&ndelta_f), Some(&format!("{}(sqrt d1.Ndelta)", t.f.label())))?;
    let kc_scale = kp_cyclic.generator_scale().expect("K' over F").embed_into(&m)?;
    let mut imgs = chain_images(df, &m);
    imgs.push(monomial(&m, 1 << df).mul(&sqrt_ndelta).mul(&kc_scale));
    let emb_kp_cyclic = Embedding::new(&kp_cyclic, &m, &imgs)?;
    Ok(DihedralClosure {
        sigma_m_l: GaloisElement::new(&m, 1 << (df + 1))?,
        sigma_m_lp: GaloisElement::new(&m, (1 << (df + 1)) | (1 << (df + 2)))?,
        sigma_m_b: GaloisElement::top(&m)?,
        tower: t,
        m,
        lattice,
        emb_l,
        lp,
        emb_lp,
        kp_cyclic,
        emb_kp_cyclic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;

    fn base(p: u64) -> LocalField {
        LocalField::base(PrimeContext::new(p, 8).unwrap())
    }

    #[test]
    fn spec_examples_over_q3() {
        let f = base(3);
        let u = f.nonsquare_unit().unwrap();
        let k = f.make_extension(&u).unwrap();
        let l = k.make_extension(&k.int(3)).unwrap();
        assert_eq!(classify_tower(&l).unwrap(), TowerClass::Biquadratic);
        let w = k.nonsquare_unit().unwrap();
        let quartic = k.make_extension(&w).unwrap();
        assert_eq!(classify_tower(&quartic).unwrap(), TowerClass::Cyclic4);
        let r = f.make_extension(&f.int(3)).unwrap();
        let ng = r.make_extension(&r.uniformizer()).unwrap();
        assert_eq!(classify_tower(&ng).unwrap(), TowerClass::NonGaloisDihedral8);
    }

    #[test]
    fn lattice_example() {
        let f = base(3);
        let u = f.nonsquare_unit().unwrap();
        let k = f.make_extension(&u).unwrap();
        let b = k.make_extension(&k.int(3)).unwrap();
        let lat = biquadratic_lattice(&b).unwrap();
        assert!(lat.transport.is_none());
        assert!(lat.kp.generator_square().unwrap().approx_eq(&f.int(3)));
        // K'' = F(sqrt(3u)), normalized
        assert!(lat.kpp.generator_square().unwrap().approx_eq(&f.int(3).mul(&u)));
        // each conjugation fixes its field pointwise
        for (e, emb, s) in [(&lat.kp, &lat.emb_kp, &lat.sigma_kp), (&lat.kpp, &lat.emb_kpp, &lat.sigma_kpp)] {
            let x = e.element_from_ints(&[5, 7]).unwrap();
            let y = emb.apply(&x).unwrap();
            assert!(s.apply(&y).unwrap().approx_eq(&y));
            // and sigma_{B/K} acts as sigma_{E/F}
            let sx = GaloisElement::top(e).unwrap().apply(&x).unwrap();
            assert!(lat.sigma_k.apply(&y).unwrap().approx_eq(&emb.apply(&sx).unwrap()));
        }
    }

    #[test]
    fn transported_lattice() {
        let f = base(5);
        let u = f.nonsquare_unit().unwrap();
        let k = f.make_extension(&u).unwrap();
        // delta = 5 * (1 + sqrt u)^2 is in the class of 5
        let s = k.element_from_ints(&[1, 1]).unwrap();
        let delta = s.mul(&s).mul(&k.int(5));
        let l = k.make_extension(&delta).unwrap();
        let lat = biquadratic_lattice(&l).unwrap();
        let tr = lat.transport.as_ref().unwrap();
        assert_eq!(tr.sup(), &l);
        assert!(lat.a.approx_eq(&f.int(5)));
    }

    #[test]
    fn closure_structure() {
        for p in [3, 7] {
            let f = base(p);
            let r = f.make_extension(&f.int(p as i64)).unwrap();
            let l = r.make_extension(&r.uniformizer()).unwrap();
            let cl = galois_closure(&l).unwrap();
            assert_eq!(cl.m.degree(), 8);
            assert_eq!(cl.m.degree() / l.degree(), 2);
            let x = l.element_from_ints(&[1, 2, 3, 4]).unwrap();
            let y = cl.emb_l.apply(&x).unwrap();
            assert!(cl.sigma_m_l.apply(&y).unwrap().approx_eq(&y));
            let xp = cl.lp.element_from_ints(&[1, 2, 3, 4]).unwrap();
            let yp = cl.emb_lp.apply(&xp).unwrap();
            assert!(cl.sigma_m_lp.apply(&yp).unwrap().approx_eq(&yp));
            assert!(!cl.sigma_m_l.apply(&yp).unwrap().approx_eq(&yp));
            for s in [&cl.sigma_m_l, &cl.sigma_m_lp] {
                assert_eq!(s.order(), 2);
                let z = s.apply(&s.apply(&y).unwrap()).unwrap();
                assert!(z.approx_eq(&y));
            }
        }
    }
}
