//! Brute-force verifiers at finite level. These use only the p-adic layer
//! and raw character evaluation, never the classification or L-factor
//! pipeline they check.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charalg::SmoothChar;
use crate::error::{Error, Result};
use crate::padic::{
    hilbert_symbol, norm_to, Embedding, FieldElement, GaloisElement, LocalField, PrimeContext, UnitGroup,
};
use crate::towers::{BiquadraticLattice, TowerClass};

/// The image of a quadratic norm map `E^* -> E'^*` modulo `1 + P_{E'}^n`:
/// `N(E^*) = <pi_{E'}^f w> x H` with `H` the image of the units.
#[derive(Debug)]
pub struct NormImage {
    pub group: std::sync::Arc<UnitGroup>,
    /// indices (into `group`) of the unit classes hit by norms of units
    pub units: HashSet<usize>,
    /// `v(N(pi_E))`
    pub f: i64,
    /// unit part of `N(pi_E)`
    pub w: FieldElement,
}

impl NormImage {
    /// Whether `x in E'^*` lies in the norm group (at the enumeration level).
    pub fn contains(&self, x: &FieldElement) -> Result<bool> {
        let e = self.group.field();
        let v = x.valuation()?;
        if v.rem_euclid(self.f) != 0 {
            return Ok(false);
        }
        let j = v / self.f;
        let u = x.mul(&e.uniformizer().pow(-v)?).mul(&self.w.pow(-j)?);
        Ok(self.units.contains(&self.group.index_of(&u)?))
    }

    /// Index of the norm group in `E'^* / (1 + P^n)`.
    pub fn index(&self) -> u64 {
        self.f as u64 * (self.group.len() / self.units.len()) as u64
    }
}

/// Norm image of a quadratic map given by `norm` from `sup` (of which
/// `ram` tells whether it is ramified over the target) into `sub`.
fn norm_image_with<N>(sup: &LocalField, sub: &LocalField, level: u32, norm: N) -> Result<NormImage>
where
    N: Fn(&FieldElement) -> Result<FieldElement>,
{
    let group = sub.unit_group(level)?;
    let e = sup.e() / sub.e();
    // N(1 + P_E^{e n - e + 1}) lies in 1 + P^n
    let k = if level == 0 { 0 } else { e * level - (e - 1) };
    let src = sup.unit_group(k)?;
    let mut units = HashSet::new();
    for y in src.elements() {
        units.insert(group.index_of(&norm(y)?)?);
    }
    let npi = norm(&sup.uniformizer())?;
    let f = npi.valuation()?;
    let w = npi.mul(&sub.uniformizer().pow(-f)?);
    Ok(NormImage { group, units, f, w })
}

/// Exact image of `N_{E/E'}` at level `n`, for `E'` the parent of `E`.
pub fn norm_image_enum(e: &LocalField, level: u32) -> Result<NormImage> {
    let sub = e.parent().cloned().ok_or_else(|| Error::NotInTower("E must be quadratic over E'".into()))?;
    norm_image_with(e, &sub, level, |y| norm_to(y, &sub))
}

/// Image of `N_{sup/sub}` for a quadratic `sup ⊃ emb(sub)` with `sigma` generating
/// `Gal(sup/emb(sub))`.
pub fn norm_image_via(emb: &Embedding, sigma: &GaloisElement, level: u32) -> Result<NormImage> {
    norm_image_with(emb.sup(), emb.sub(), level, |y| emb.project(&sigma.norm(y)?))
}

/// Lemma "normbiquad": `F^* ⊆ N_{B/K}(B^*)`, checked on every class of
/// `F^*/(1 + P^n)` (units and uniformizer), and re-derived as
/// `F^* = N_{K'/F}(K'^*) · N_{K''/F}(K''^*)`.
pub fn verify_normbiquad(lat: &BiquadraticLattice, level: u32) -> Result<bool> {
    let img = norm_image_enum(&lat.b, level.max(1))?;
    let fu = lat.f.unit_group(level)?;
    let mut gens: Vec<FieldElement> = fu.elements().to_vec();
    gens.push(lat.f.uniformizer());
    for x in &gens {
        if !img.contains(&x.embed_into(&lat.k)?)? {
            return Ok(false);
        }
    }
    // the two norm groups from K' and K'' generate F^*
    let n1 = norm_image_enum(&lat.kp, level)?;
    let n2 = norm_image_enum(&lat.kpp, level)?;
    let (a, b) = if n1.f == 1 { (&n1, &n2) } else if n2.f == 1 { (&n2, &n1) } else { return Ok(false) };
    // N(pi_b) * N(pi_a)^{-f_b} is a unit in the generated group
    let extra = b.w.mul(&a.w.pow(-b.f)?);
    let mut gen_idx: Vec<usize> = a.units.iter().chain(b.units.iter()).copied().collect();
    gen_idx.push(fu.index_of(&extra)?);
    Ok(subgroup_size(&fu, &gen_idx)? == fu.len())
}

fn subgroup_size(g: &UnitGroup, gens: &[usize]) -> Result<usize> {
    let mut seen = HashSet::from([0usize]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &h in gens {
            let y = g.mul_index(x, h)?;
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen.len())
}

/// Lemma "Ker": every `u` in the kernel of `N_{B/K}` (at level `n`) equals
/// `N_{B/K'}(x) / N_{B/K''}(sigma_{B/K} x)` for the Hilbert-90 witness
/// `x = c + u sigma(c)`. Returns the number of kernel classes witnessed, or
/// an error naming the first failure.
pub fn verify_ker_lemma(lat: &BiquadraticLattice, level: u32) -> Result<usize> {
    let b = &lat.b;
    let group = b.unit_group(level)?;
    let e = b.e() / lat.k.e();
    let m = level.div_ceil(e);
    let s = &lat.sigma_k;
    let mut witnessed = 0;
    let candidates: Vec<FieldElement> = {
        let mut v = vec![b.one()];
        v.extend(b.residue_units()?.into_iter().skip(1));
        v.push(b.generator());
        v
    };
    for (i, u) in group.elements().iter().enumerate() {
        let nu = norm_to(u, &lat.k)?;
        if !nu.sub(&lat.k.one()).residue_key(m).map(|k| k == 0).unwrap_or(false) {
            continue;
        }
        let mut ok = false;
        for c in &candidates {
            let x = c.add(&u.mul(&s.apply(c)?));
            // x/sigma(x) - u = (1 - N u) c / sigma(x): keep the error in P^n
            match x.valuation() {
                Ok(v) if v <= c.valuation()? => {}
                _ => continue,
            }
            let sx = s.apply(&x)?;
            let lhs = lat.sigma_kp.norm(&x)?.div(&lat.sigma_kpp.norm(&sx)?)?;
            let r = lhs.div(u)?;
            if r.sub(&b.one()).residue_key(level)? == 0 {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NotHomomorphism(format!("kernel class {i} has no Hilbert-90 witness")));
        }
        witnessed += 1;
    }
    Ok(witnessed)
}

/// Whether `omega` (a character of `B`) is trivial on the image of `E^*`,
/// by enumerating units of `E` at `level` and its uniformizer.
pub fn trivial_on_subfield(omega: &SmoothChar, emb: &Embedding, level: u32) -> Result<bool> {
    let e = emb.sub();
    let mut xs: Vec<FieldElement> = e.unit_group(level)?.elements().to_vec();
    xs.push(e.uniformizer());
    for x in &xs {
        if !omega.eval(&emb.apply(x)?)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `omega` restricted to `E` is `x -> (x, d)_E`.
pub fn equals_hilbert_on_subfield(omega: &SmoothChar, emb: &Embedding, d: &FieldElement, level: u32) -> Result<bool> {
    let e = emb.sub();
    let mut xs: Vec<FieldElement> = e.unit_group(level.max(1))?.elements().to_vec();
    xs.push(e.uniformizer());
    for x in &xs {
        let expect = if hilbert_symbol(x, d)? == 1 { num::Zero::zero() } else { crate::charalg::Q::new(1, 2) };
        let v = omega.eval(&emb.apply(x)?)?;
        if v != crate::charalg::ExactValue::root_of_unity(expect) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Theorem "distcusp" by raw enumeration: `(distinguished, eta-distinguished)`.
pub fn independent_distinguished(lat: &BiquadraticLattice, omega_b: &SmoothChar) -> Result<(bool, bool)> {
    let level = omega_b.level();
    let dist = trivial_on_subfield(omega_b, &lat.emb_kp, level)? || trivial_on_subfield(omega_b, &lat.emb_kpp, level)?;
    let d1 = lat.k.generator_square().expect("K over F");
    let eta = equals_hilbert_on_subfield(omega_b, &lat.emb_kp, &d1.embed_into(&lat.kp)?, level)?
        || equals_hilbert_on_subfield(omega_b, &lat.emb_kpp, &d1.embed_into(&lat.kpp)?, level)?;
    Ok((dist, eta))
}

/// Tower classification by Hensel square-root tests, independent of the
/// square-class pipeline.
pub fn classify_tower_oracle(l: &LocalField) -> Result<TowerClass> {
    let k = l.parent().cloned().ok_or_else(|| Error::NotInTower("L over K".into()))?;
    let f = k.parent().cloned().ok_or_else(|| Error::NotInTower("K over F".into()))?;
    let delta = l.generator_square().expect("L over K");
    if delta.sqrt()?.is_some() {
        return Err(Error::IsSquare("delta is a square in K".into()));
    }
    let ctx = f.ctx();
    // F^*/F^{*2} from first principles: 1, least nonresidue, p, nonresidue * p
    let n = ctx.least_nonresidue() as i64;
    let p = ctx.p() as i64;
    for r in [1, n, p, n * p] {
        if delta.mul(&k.int(r)).sqrt()?.is_some() {
            return Ok(TowerClass::Biquadratic);
        }
    }
    let s = GaloisElement::top(&k)?;
    if s.apply(&delta)?.div(&delta)?.sqrt()?.is_some() {
        Ok(TowerClass::Cyclic4)
    } else {
        Ok(TowerClass::NonGaloisDihedral8)
    }
}

/// Compare `hilbert_symbol(a, b) = +1` with membership of `a` in the norm
/// group of `E(sqrt b)` on `samples` random pairs over `E` ranging over
/// `Q_p` and its quadratic extensions. Returns `(agreements, disagreements)`.
pub fn hilbert_vs_norm_sample(p: u64, samples: usize, seed: u64) -> Result<(usize, usize)> {
    let f = LocalField::base(PrimeContext::new(p, 8)?);
    let [_, u, pi, upi] = f.square_class_reps()?;
    let mut fields = vec![f.clone()];
    for d in [&u, &pi, &upi] {
        fields.push(f.make_extension(d)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // norm images keyed by (field index, square class of b); the symbol is
    // tame, so level 1 determines the norm group
    let mut cache: HashMap<(usize, usize), NormImage> = HashMap::new();
    let (mut agree, mut disagree) = (0, 0);
    while agree + disagree < samples {
        let fi = rng.gen_range(0..fields.len());
        let e = &fields[fi];
        let a = random_nonzero(e, &mut rng);
        let b = random_nonzero(e, &mut rng);
        let reps = e.square_class_reps()?;
        let ci = (0..4)
            .find(|&i| b.div(&reps[i]).ok().and_then(|r| r.sqrt().ok().flatten()).is_some())
            .ok_or_else(|| Error::PrecisionExhausted("square class of b not found".into()))?;
        let member = if ci == 0 {
            true
        } else {
            if let Entry::Vacant(slot) = cache.entry((fi, ci)) {
                slot.insert(norm_image_enum(&e.make_extension(&reps[ci])?, 1)?);
            }
            cache[&(fi, ci)].contains(&a)?
        };
        if member == (hilbert_symbol(&a, &b)? == 1) {
            agree += 1;
        } else {
            disagree += 1;
        }
    }
    Ok((agree, disagree))
}

/// A random nonzero element with valuation spread over a few uniformizer powers.
pub fn random_nonzero<R: Rng>(e: &LocalField, rng: &mut R) -> FieldElement {
    loop {
        let coords: Vec<i64> = (0..e.degree()).map(|_| rng.gen_range(-400..400)).collect();
        let x = e.element_from_ints(&coords).expect("degree matches");
        if x.valuation().is_ok() {
            return x.mul(&e.uniformizer().pow(rng.gen_range(-3..4)).expect("uniformizer invertible"));
        }
    }
}

/// All biquadratic lattices `B = K(sqrt a)`, `a in F` a square-class
/// representative, over the three quadratic `K` of `Q_p`.
pub fn all_biquadratic_lattices(p: u64, precision: u32) -> Result<Vec<BiquadraticLattice>> {
    let f = LocalField::base(PrimeContext::new(p, precision)?);
    let reps = f.square_class_reps()?;
    let mut out = Vec::new();
    for d in &reps[1..] {
        let k = f.make_extension(d)?;
        for a in &reps[1..] {
            match BiquadraticLattice::from_f_element(&k, a) {
                Ok(lat) => out.push(lat),
                Err(Error::IsSquare(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
