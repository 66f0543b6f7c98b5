//! The two routes to the Asai L-factor of an ordinary representation of
//! `GL(2, K)`: the Galois side `L_W` of the multiplicative induction, and
//! the Rankin–Selberg side `L_As = L_1 · L_rad(ex)` driven by the
//! distinguishing twists.

use std::collections::BTreeSet;

use num::Zero;
use serde::Serialize;

use crate::charalg::{ExactValue, SmoothChar, Q};
use crate::error::{Error, Result};
use crate::euler::{tate_lfactor, EulerFactor};
use crate::padic::{Embedding, GaloisElement, LocalField};
use crate::towers::{biquadratic_lattice, classify_tower, galois_closure, BiquadraticLattice, TowerClass};

/// Choices made and ambiguities met while evaluating a representation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub choices: Vec<String>,
    pub ambiguities: Vec<String>,
}

impl Metadata {
    pub fn merge(&mut self, other: Metadata) {
        for c in other.choices {
            if !self.choices.contains(&c) {
                self.choices.push(c);
            }
        }
        for a in other.ambiguities {
            if !self.ambiguities.contains(&a) {
                self.ambiguities.push(a);
            }
        }
    }
}

/// The ordinary representations of `GL(2, K)` covered by the computation.
#[derive(Clone, Debug)]
pub enum GL2Rep {
    /// `pi(omega)` for a character `omega` of a quadratic extension `L/K`,
    /// regular with respect to `Gal(L/K)`.
    DihedralSupercuspidal { l: LocalField, omega: SmoothChar, class: TowerClass },
    /// `sigma(chi)`, the Steinberg representation twisted by `chi`.
    TwistedSteinberg { chi: SmoothChar },
    /// `pi(lambda, mu)`.
    PrincipalSeries { lambda: SmoothChar, mu: SmoothChar },
}

/// The Weil–Deligne parameter of a [`GL2Rep`].
#[derive(Clone, Debug)]
pub enum WDRep2 {
    Induced { l: LocalField, omega: SmoothChar, class: TowerClass },
    SpecialTwist { chi: SmoothChar },
    CharSum { lambda: SmoothChar, mu: SmoothChar },
}

/// A summand of the multiplicative induction of a [`WDRep2`].
#[derive(Clone, Debug)]
pub enum InductionSummand {
    /// `chi_F ⊗ sp(sp_dim)`
    CharOnF { chi: SmoothChar, sp_dim: u32 },
    /// `Ind_{W_E}^{W_F} nu`
    InducedFromQuadratic { field: LocalField, nu: SmoothChar },
}

#[derive(Clone, Debug)]
pub enum Decomposition {
    Summands(Vec<InductionSummand>),
    /// no summand has inertia invariants: `L_W = 1`
    Irreducible,
}

fn k_and_f(chi: &SmoothChar) -> Result<(LocalField, LocalField)> {
    let k = chi.field().clone();
    let f = k
        .parent()
        .cloned()
        .ok_or_else(|| Error::Inadmissible("characters must live on a quadratic extension K/F".into()))?;
    Ok((k, f))
}

impl GL2Rep {
    /// `pi(omega)`; rejects non-regular `omega`.
    pub fn dihedral(omega: SmoothChar) -> Result<Self> {
        let l = omega.field().clone();
        let class = classify_tower(&l)?;
        let s = GaloisElement::top(&l)?;
        if !omega.is_regular(&s)? {
            return Err(Error::Inadmissible("omega factors through N_{L/K}: not supercuspidal".into()));
        }
        Ok(GL2Rep::DihedralSupercuspidal { l, omega, class })
    }

    pub fn steinberg(chi: SmoothChar) -> Result<Self> {
        k_and_f(&chi)?;
        Ok(GL2Rep::TwistedSteinberg { chi })
    }

    /// `pi(lambda, mu)`; rejects `lambda mu^{-1} = |.|^{±1}`.
    pub fn principal(lambda: SmoothChar, mu: SmoothChar) -> Result<Self> {
        let (k, _) = k_and_f(&lambda)?;
        if mu.field() != &k {
            return Err(Error::FieldMismatch("lambda and mu live on different fields".into()));
        }
        let ratio = lambda.div(&mu)?;
        for a in [1, -1] {
            if ratio == SmoothChar::absvalue(&k, Q::from_integer(a))? {
                return Err(Error::Inadmissible("lambda mu^{-1} = |.|^{±1}: reducible".into()));
            }
        }
        Ok(GL2Rep::PrincipalSeries { lambda, mu })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GL2Rep::DihedralSupercuspidal { .. } => "dihedral",
            GL2Rep::TwistedSteinberg { .. } => "steinberg",
            GL2Rep::PrincipalSeries { .. } => "principal",
        }
    }

    pub fn is_supercuspidal(&self) -> bool {
        matches!(self, GL2Rep::DihedralSupercuspidal { .. })
    }

    /// The field `K`.
    pub fn k(&self) -> LocalField {
        match self {
            GL2Rep::DihedralSupercuspidal { l, .. } => l.parent().expect("L over K").clone(),
            GL2Rep::TwistedSteinberg { chi } => chi.field().clone(),
            GL2Rep::PrincipalSeries { lambda, .. } => lambda.field().clone(),
        }
    }

    /// The field `F`.
    pub fn f(&self) -> LocalField {
        self.k().parent().expect("K over F").clone()
    }

    pub fn parameter(&self) -> WDRep2 {
        match self.clone() {
            GL2Rep::DihedralSupercuspidal { l, omega, class } => WDRep2::Induced { l, omega, class },
            GL2Rep::TwistedSteinberg { chi } => WDRep2::SpecialTwist { chi },
            GL2Rep::PrincipalSeries { lambda, mu } => WDRep2::CharSum { lambda, mu },
        }
    }
}

impl WDRep2 {
    pub fn to_rep(&self) -> Result<GL2Rep> {
        match self.clone() {
            WDRep2::Induced { omega, .. } => GL2Rep::dihedral(omega),
            WDRep2::SpecialTwist { chi } => GL2Rep::steinberg(chi),
            WDRep2::CharSum { lambda, mu } => GL2Rep::principal(lambda, mu),
        }
    }
}

/// Central character of `pi` as a character of `K`.
pub fn central_char(pi: &GL2Rep) -> Result<SmoothChar> {
    match pi {
        GL2Rep::DihedralSupercuspidal { l, omega, .. } => {
            let k = l.parent().expect("L over K");
            SmoothChar::eta_char(l)?.mul(&omega.restrict(k)?)
        }
        GL2Rep::TwistedSteinberg { chi } => chi.pow(2),
        GL2Rep::PrincipalSeries { lambda, mu } => lambda.mul(mu),
    }
}

/// A dihedral representation rewritten on a biquadratic lattice:
/// `pi(omega) = pi(omega_b)` with `omega_b` a character of `B`.
#[derive(Clone, Debug)]
pub struct BiquadraticModel {
    pub lattice: BiquadraticLattice,
    pub omega_b: SmoothChar,
}

impl BiquadraticModel {
    pub fn omega_kp(&self) -> Result<SmoothChar> {
        self.omega_b.restrict_along(&self.lattice.emb_kp)
    }

    pub fn omega_kpp(&self) -> Result<SmoothChar> {
        self.omega_b.restrict_along(&self.lattice.emb_kpp)
    }
}

/// Outcome of reducing a dihedral representation to a biquadratic model.
#[derive(Clone, Debug)]
pub enum DihedralModel {
    /// one model, or the two norm descents `mu`, `mu eta` in the
    /// non-Galois case
    Biquadratic(Vec<BiquadraticModel>),
    /// cyclic tower, or non-Galois tower whose reduction fails
    Irreducible,
}

/// Rewrite `pi(omega)` over a biquadratic lattice where possible.
pub fn dihedral_model(l: &LocalField, omega: &SmoothChar, class: TowerClass) -> Result<(DihedralModel, Metadata)> {
    let mut meta = Metadata::default();
    match class {
        TowerClass::Biquadratic => {
            let lattice = biquadratic_lattice(l)?;
            let omega_b = match &lattice.transport {
                Some(tr) => {
                    meta.choices.push("L transported to B = K(sqrt a) with a in F".into());
                    omega.restrict_along(tr)?
                }
                None => omega.clone(),
            };
            Ok((DihedralModel::Biquadratic(vec![BiquadraticModel { lattice, omega_b }]), meta))
        }
        TowerClass::Cyclic4 => Ok((DihedralModel::Irreducible, meta)),
        TowerClass::NonGaloisDihedral8 => {
            let cl = galois_closure(l)?;
            meta.choices.push(
                "closure M = B(sqrt delta), B = K(sqrt a) with a ~ N(delta); M/K' cyclic for K' = F(sqrt(d1 N delta))"
                    .into(),
            );
            // chi = omega o N_{M/L}
            let e = cl.m.e() / l.e();
            let emb_l = cl.emb_l.clone();
            let s_ml = cl.sigma_m_l.clone();
            let chi = omega.pullback(&cl.m, omega.level() * e, |x| emb_l.project(&s_ml.norm(x)?))?;
            let emb_b = Embedding::chain(&cl.lattice.b, &cl.m)?;
            match chi.descend_through_norm(&emb_b, &cl.sigma_m_b)? {
                Some(mus) => {
                    meta.choices.push("omega o N_{M/L} = mu o N_{M/B}; both extensions mu, mu.eta_{M/B} evaluated".into());
                    let models = mus
                        .into_iter()
                        .map(|mu| BiquadraticModel { lattice: cl.lattice.clone(), omega_b: mu })
                        .collect();
                    Ok((DihedralModel::Biquadratic(models), meta))
                }
                None => {
                    meta.ambiguities.push(
                        "non-Galois reduction failed: omega o N_{M/L} is nontrivial on ker N_{M/B}; L_W = L_As = 1 relies on the dichotomy of the reduction"
                            .into(),
                    );
                    Ok((DihedralModel::Irreducible, meta))
                }
            }
        }
    }
}

/// Galois side: the summands of the multiplicative induction.
pub fn induction_decompose(rho: &WDRep2) -> Result<(Decomposition, Metadata)> {
    match rho {
        WDRep2::Induced { l, omega, class } => {
            let (model, mut meta) = dihedral_model(l, omega, *class)?;
            match model {
                DihedralModel::Irreducible => Ok((Decomposition::Irreducible, meta)),
                DihedralModel::Biquadratic(models) => {
                    let mut out: Option<Vec<InductionSummand>> = None;
                    for m in &models {
                        let summands = vec![
                            InductionSummand::InducedFromQuadratic { field: m.lattice.kp.clone(), nu: m.omega_kp()? },
                            InductionSummand::InducedFromQuadratic { field: m.lattice.kpp.clone(), nu: m.omega_kpp()? },
                        ];
                        match &out {
                            None => out = Some(summands),
                            Some(first) => {
                                if summands_lfactor(first) != summands_lfactor(&summands) {
                                    meta.ambiguities.push("L_W depends on the norm-descent extension".into());
                                }
                            }
                        }
                    }
                    Ok((Decomposition::Summands(out.expect("at least one model")), meta))
                }
            }
        }
        WDRep2::SpecialTwist { chi } => {
            let (k, f) = k_and_f(chi)?;
            let chi_f = chi.restrict(&f)?;
            let eta = SmoothChar::eta_char(&k)?;
            Ok((
                Decomposition::Summands(vec![
                    InductionSummand::CharOnF { chi: chi_f.mul(&eta)?, sp_dim: 1 },
                    InductionSummand::CharOnF { chi: chi_f, sp_dim: 3 },
                ]),
                Metadata::default(),
            ))
        }
        WDRep2::CharSum { lambda, mu } => {
            let (k, f) = k_and_f(lambda)?;
            let s = GaloisElement::top(&k)?;
            Ok((
                Decomposition::Summands(vec![
                    InductionSummand::CharOnF { chi: lambda.restrict(&f)?, sp_dim: 1 },
                    InductionSummand::CharOnF { chi: mu.restrict(&f)?, sp_dim: 1 },
                    InductionSummand::InducedFromQuadratic { field: k, nu: lambda.mul(&mu.conj(&s)?)? },
                ]),
                Metadata::default(),
            ))
        }
    }
}

fn summands_lfactor(summands: &[InductionSummand]) -> EulerFactor {
    summands.iter().fold(EulerFactor::one(), |acc, s| {
        let l = match s {
            InductionSummand::CharOnF { chi, sp_dim: 1 } => tate_lfactor(chi, Q::zero()),
            InductionSummand::CharOnF { chi, .. } => tate_lfactor(chi, Q::from_integer(1)),
            InductionSummand::InducedFromQuadratic { nu, .. } => tate_lfactor(nu, Q::zero()),
        };
        acc.mul(&l)
    })
}

/// `L(M(rho), s)`.
pub fn lw_factor(rho: &WDRep2) -> Result<(EulerFactor, Metadata)> {
    let (d, meta) = induction_decompose(rho)?;
    let l = match d {
        Decomposition::Irreducible => EulerFactor::one(),
        Decomposition::Summands(s) => summands_lfactor(&s),
    };
    Ok((l, meta))
}

/// `L_1(pi, s)` from the Kirillov model.
pub fn l1_factor(pi: &GL2Rep) -> Result<EulerFactor> {
    match pi {
        GL2Rep::DihedralSupercuspidal { .. } => Ok(EulerFactor::one()),
        GL2Rep::TwistedSteinberg { chi } => {
            let (_, f) = k_and_f(chi)?;
            Ok(tate_lfactor(&chi.restrict(&f)?, Q::from_integer(1)))
        }
        GL2Rep::PrincipalSeries { lambda, mu } => {
            let (_, f) = k_and_f(lambda)?;
            let a = tate_lfactor(&lambda.restrict(&f)?, Q::zero());
            if lambda == mu {
                Ok(a.pow(2))
            } else {
                Ok(a.lcm(&tate_lfactor(&mu.restrict(&f)?, Q::zero())))
            }
        }
    }
}

/// The values `alpha = q_F^{s_0}` for which `pi` is `|.|_F^{-s_0}`-distinguished.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwistSet {
    pub values: BTreeSet<ExactValue>,
    /// values produced by more than one criterion (merged)
    pub overlaps: Vec<ExactValue>,
}

impl TwistSet {
    fn insert_all(&mut self, vals: impl IntoIterator<Item = ExactValue>) {
        for v in vals {
            if !self.values.insert(v) {
                self.overlaps.push(v);
            }
        }
    }

    pub fn contains_one(&self) -> bool {
        self.values.contains(&ExactValue::ONE)
    }

    pub fn to_vec(&self) -> Vec<ExactValue> {
        self.values.iter().copied().collect()
    }
}

/// `alpha` with `alpha^{f_E} = nu(pi_E)` when `nu` is unramified.
fn twist_fiber(nu: &SmoothChar) -> Vec<ExactValue> {
    match nu.unramified_value() {
        Some(beta) => beta.roots(nu.field().f()),
        None => Vec::new(),
    }
}

/// The distinguishing twists of `pi`, by the distinguishedness criteria.
pub fn distinguishing_twists(pi: &GL2Rep) -> Result<(TwistSet, Metadata)> {
    let mut out = TwistSet::default();
    let mut meta = Metadata::default();
    match pi {
        GL2Rep::DihedralSupercuspidal { l, omega, class } => {
            let (model, m) = dihedral_model(l, omega, *class)?;
            meta.merge(m);
            if let DihedralModel::Biquadratic(models) = model {
                let mut first: Option<TwistSet> = None;
                for md in &models {
                    let mut t = TwistSet::default();
                    t.insert_all(twist_fiber(&md.omega_kp()?));
                    t.insert_all(twist_fiber(&md.omega_kpp()?));
                    match &first {
                        None => first = Some(t),
                        Some(f0) if f0.values != t.values => {
                            meta.ambiguities.push("twist set depends on the norm-descent extension".into())
                        }
                        Some(_) => {}
                    }
                }
                out = first.expect("at least one model");
            }
        }
        GL2Rep::TwistedSteinberg { chi } => {
            let (k, f) = k_and_f(chi)?;
            let nu = chi.restrict(&f)?.mul(&SmoothChar::eta_char(&k)?)?;
            out.insert_all(nu.unramified_value());
        }
        GL2Rep::PrincipalSeries { lambda, mu } => {
            let (k, f) = k_and_f(lambda)?;
            let s = GaloisElement::top(&k)?;
            out.insert_all(twist_fiber(&lambda.mul(&mu.conj(&s)?)?));
            let (lf, mf) = (lambda.restrict(&f)?, mu.restrict(&f)?);
            if lf == mf {
                out.insert_all(lf.unramified_value());
            }
        }
    }
    if !out.overlaps.is_empty() {
        meta.ambiguities.push(format!("criteria produced a common pole at {:?}", out.overlaps));
    }
    Ok((out, meta))
}

/// `L_rad(ex)(pi, s) = prod 1/(1 - alpha X)` over the twists.
pub fn lradex_factor(pi: &GL2Rep) -> Result<EulerFactor> {
    let (t, _) = distinguishing_twists(pi)?;
    Ok(EulerFactor::from_roots(t.to_vec()))
}

/// `L_As = L_1 · L_rad(ex)`.
pub fn las_factor(pi: &GL2Rep) -> Result<EulerFactor> {
    Ok(l1_factor(pi)?.mul(&lradex_factor(pi)?))
}

pub fn is_distinguished(pi: &GL2Rep) -> Result<bool> {
    Ok(distinguishing_twists(pi)?.0.contains_one())
}

/// `eta_{K/F}`-distinguishedness, for dihedral representations on a
/// biquadratic model: `omega|K' = eta_{B/K'}` or `omega|K'' = eta_{B/K''}`.
pub fn is_eta_distinguished(pi: &GL2Rep) -> Result<Option<bool>> {
    let GL2Rep::DihedralSupercuspidal { l, omega, class } = pi else {
        return Ok(None);
    };
    let (model, _) = dihedral_model(l, omega, *class)?;
    let DihedralModel::Biquadratic(models) = model else {
        return Ok(Some(false));
    };
    let md = &models[0];
    let d1 = md.lattice.k.generator_square().expect("K over F");
    let mut hit = false;
    for (e, nu) in [(&md.lattice.kp, md.omega_kp()?), (&md.lattice.kpp, md.omega_kpp()?)] {
        let eta = SmoothChar::eta_for(e, &d1.embed_into(e)?)?;
        hit |= nu == eta;
    }
    Ok(Some(hit))
}

/// Result of comparing the two routes.
#[derive(Clone, Debug)]
pub struct EgalReport {
    pub lw: EulerFactor,
    pub las: EulerFactor,
    pub l1: EulerFactor,
    pub twists: TwistSet,
    pub equal: bool,
    pub metadata: Metadata,
}

pub fn check_egal(pi: &GL2Rep) -> Result<EgalReport> {
    let (lw, mut metadata) = lw_factor(&pi.parameter())?;
    let l1 = l1_factor(pi)?;
    let (twists, m) = distinguishing_twists(pi)?;
    metadata.merge(m);
    let las = l1.mul(&EulerFactor::from_roots(twists.to_vec()));
    Ok(EgalReport { equal: lw == las, lw, las, l1, twists, metadata })
}

/// Remark "simplepoles": the twist set is empty when the central character
/// is ramified on `F`, and every twist satisfies `alpha^2 = c(pi_F)` otherwise.
pub fn check_central_relation(pi: &GL2Rep, twists: &TwistSet) -> Result<bool> {
    let c = central_char(pi)?.restrict(&pi.f())?;
    Ok(match c.unramified_value() {
        None => twists.values.is_empty(),
        Some(cv) => twists.values.iter().all(|a| a.pow(2) == cv),
    })
}
