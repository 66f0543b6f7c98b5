//! Seeded generation and evaluation of the representation corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asai::{
    central_char, check_central_relation, check_egal, dihedral_model, is_eta_distinguished, DihedralModel, GL2Rep,
    Metadata,
};
use crate::charalg::value::ExactValueJson;
use crate::charalg::{ExactValue, SmoothChar, Q};
use crate::error::Result;
use crate::oracle::independent_distinguished;
use crate::padic::{GaloisElement, LocalField, PrimeContext};
use crate::par::{par_map, seq_map};
use crate::towers::{biquadratic_lattice, classify_tower, TowerClass};

/// Parameters of a corpus sweep.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub primes: Vec<u64>,
    pub precision: u32,
    pub max_level: u32,
    /// random instances per `(p, K)` and kind; dihedral counts are per `L`
    pub steinberg: usize,
    pub principal: usize,
    pub dihedral: usize,
    /// cap on unit-group sizes used for random characters
    pub char_budget: u64,
    /// cap on any unit-group enumeration (fields inherit it)
    pub budget: u64,
    /// include non-Galois towers, whose reduction runs over degree 8
    pub degree8: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0,
            primes: vec![3, 5, 7],
            precision: 8,
            max_level: 2,
            steinberg: 12,
            principal: 16,
            dihedral: 10,
            char_budget: 5_000,
            budget: crate::padic::DEFAULT_BUDGET,
            degree8: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub name: String,
    pub p: u64,
    pub rep: GL2Rep,
}

/// One evaluated corpus instance.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusRecord {
    pub name: String,
    pub p: u64,
    pub kind: String,
    pub k: String,
    pub tower: Option<TowerClass>,
    pub lw: Vec<ExactValueJson>,
    pub las: Vec<ExactValueJson>,
    pub l1: Vec<ExactValueJson>,
    pub twists: Vec<ExactValueJson>,
    pub equal: bool,
    pub distinguished: bool,
    pub eta_distinguished: Option<bool>,
    pub central_ramified_on_f: bool,
    pub central_relation: bool,
    pub simple_poles: bool,
    pub l1_divides_las: bool,
    pub oracle_agrees: Option<bool>,
    pub metadata: Metadata,
    pub error: Option<String>,
}

impl CorpusRecord {
    /// Every per-instance property holds.
    pub fn passed(&self) -> bool {
        let cusp_ok = self.kind != "dihedral" || (self.l1.is_empty() && self.simple_poles && self.las == self.twists);
        self.error.is_none()
            && self.equal
            && self.central_relation
            && self.l1_divides_las
            && cusp_ok
            && self.oracle_agrees != Some(false)
            && !(self.distinguished && self.eta_distinguished == Some(true))
            && !self.metadata.ambiguities.iter().any(|a| a.contains("depends"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub by_kind: Vec<(String, usize)>,
    pub by_tower: Vec<(String, usize)>,
    pub distinguished: usize,
    pub eta_distinguished: usize,
    pub reduction_failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub config: CorpusConfig,
    pub summary: CorpusSummary,
    pub records: Vec<CorpusRecord>,
}

fn random_value(rng: &mut ChaCha8Rng) -> ExactValue {
    ExactValue::new(Q::new(rng.gen_range(0..8), 8), Q::new(rng.gen_range(-2..=2), 2))
}

/// Highest level `<= max` whose unit group fits the budget.
fn level_cap(e: &LocalField, max: u32, budget: u64) -> u32 {
    let q = e.q() as u128;
    (0..=max).rev().find(|&n| n == 0 || q.pow(n - 1) * (q - 1) <= budget as u128).unwrap_or(0)
}

fn random_char(e: &LocalField, cfg: &CorpusConfig, rng: &mut ChaCha8Rng) -> Result<SmoothChar> {
    random_char_min(e, 0, cfg, rng)
}

fn random_char_min(e: &LocalField, min_level: u32, cfg: &CorpusConfig, rng: &mut ChaCha8Rng) -> Result<SmoothChar> {
    let cap = level_cap(e, cfg.max_level, cfg.char_budget).max(min_level);
    let level = rng.gen_range(min_level..=cap);
    let v = random_value(rng);
    SmoothChar::random(e, level, v, rng)
}

/// Generate the corpus deterministically from the seed.
pub fn generate(cfg: &CorpusConfig) -> Result<Vec<CorpusItem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut items = Vec::new();
    for &p in &cfg.primes {
        let f = LocalField::base_with_budget(PrimeContext::new(p, cfg.precision)?, cfg.budget);
        let [_, u, pi, upi] = f.square_class_reps()?;
        for (kname, d) in [("u", &u), ("p", &pi), ("up", &upi)] {
            let k = f.make_extension_labeled(d, Some(&format!("Q{p}(sqrt {kname})")))?;
            let kl = k.label().to_string();
            let one = SmoothChar::trivial(&k)?;
            // the boxed instances
            items.push(CorpusItem { name: format!("{kl}/steinberg/1"), p, rep: GL2Rep::steinberg(one.clone())? });
            items.push(CorpusItem {
                name: format!("{kl}/principal/1,1"),
                p,
                rep: GL2Rep::principal(one.clone(), one.clone())?,
            });
            for i in 0..cfg.steinberg {
                let chi = random_char(&k, cfg, &mut rng)?;
                items.push(CorpusItem { name: format!("{kl}/steinberg/{i}"), p, rep: GL2Rep::steinberg(chi)? });
            }
            let s = GaloisElement::top(&k)?;
            for i in 0..cfg.principal {
                let lambda = random_char(&k, cfg, &mut rng)?;
                let mu = match i % 4 {
                    // lambda = mu: the squared L_1
                    0 => lambda.clone(),
                    // mu = lambda^sigma times an unramified twist
                    1 => lambda.conj(&s)?.mul(&SmoothChar::unramified(&k, random_value(&mut rng))?)?,
                    _ => random_char(&k, cfg, &mut rng)?,
                };
                if let Ok(rep) = GL2Rep::principal(lambda, mu) {
                    items.push(CorpusItem { name: format!("{kl}/principal/{i}"), p, rep });
                }
            }
            let [_, ku, kpi, kupi] = k.square_class_reps()?;
            for (lname, delta) in [("u", &ku), ("pi", &kpi), ("u.pi", &kupi)] {
                let l = k.make_extension_labeled(delta, Some(&format!("{kl}(sqrt {lname})")))?;
                if !cfg.degree8 && classify_tower(&l)? == TowerClass::NonGaloisDihedral8 {
                    continue;
                }
                let mut made = 0;
                let mut tries = 0;
                while made < cfg.dihedral && tries < cfg.dihedral * 4 {
                    tries += 1;
                    let structured = if made % 3 == 2 { structured_dihedral(&l, cfg, &mut rng)? } else { None };
                    // unramified characters of L are Galois-invariant, never regular
                    let omega = match structured {
                        Some(w) => w,
                        None => random_char_min(&l, 1, cfg, &mut rng)?,
                    };
                    if let Ok(rep) = GL2Rep::dihedral(omega) {
                        items.push(CorpusItem { name: format!("{}/dihedral/{made}", l.label()), p, rep });
                        made += 1;
                    }
                }
            }
        }
    }
    Ok(items)
}

/// On a biquadratic tower, `rho / rho^{sigma_{B/K'}}` is trivial on `K'`
/// (so `pi` is distinguished when regular); multiplied by `nu o N_{B/K'}`
/// with `nu^2 = eta_{B/K'}` it restricts to `eta` instead.
fn structured_dihedral(l: &LocalField, cfg: &CorpusConfig, rng: &mut ChaCha8Rng) -> Result<Option<SmoothChar>> {
    let Ok(lat) = biquadratic_lattice(l) else { return Ok(None) };
    if lat.transport.is_some() {
        return Ok(None);
    }
    let (emb, sigma) = if rng.gen_bool(0.5) { (&lat.emb_kp, &lat.sigma_kp) } else { (&lat.emb_kpp, &lat.sigma_kpp) };
    let rho = random_char(&lat.b, cfg, rng)?;
    let mut omega = rho.div(&rho.conj(sigma)?)?;
    let e = emb.sub();
    let d1 = lat.k.generator_square().expect("K over F").embed_into(e)?;
    let eta = SmoothChar::eta_for(e, &d1)?;
    if rng.gen_bool(0.5) && eta.is_unramified() {
        // nu unramified with nu(pi)^{2 f(B/E)} matching eta on pi_E
        let nu = SmoothChar::unramified(e, ExactValue::root_of_unity(Q::new(1, 4)))?;
        let lifted = nu.pullback(&lat.b, 0, |x| emb.project(&sigma.norm(x)?))?;
        omega = omega.mul(&lifted)?;
    }
    Ok(Some(omega))
}

fn json(v: &[ExactValue]) -> Vec<ExactValueJson> {
    v.iter().map(ExactValueJson::from).collect()
}

/// Evaluate one instance through both routes plus the oracles.
pub fn evaluate(item: &CorpusItem) -> CorpusRecord {
    let pi = &item.rep;
    let (tower, k) = match pi {
        GL2Rep::DihedralSupercuspidal { class, .. } => (Some(*class), pi.k()),
        _ => (None, pi.k()),
    };
    let mut rec = CorpusRecord {
        name: item.name.clone(),
        p: item.p,
        kind: pi.kind().to_string(),
        k: k.label().to_string(),
        tower,
        lw: Vec::new(),
        las: Vec::new(),
        l1: Vec::new(),
        twists: Vec::new(),
        equal: false,
        distinguished: false,
        eta_distinguished: None,
        central_ramified_on_f: false,
        central_relation: false,
        simple_poles: false,
        l1_divides_las: false,
        oracle_agrees: None,
        metadata: Metadata::default(),
        error: None,
    };
    if let Err(e) = fill(pi, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill(pi: &GL2Rep, rec: &mut CorpusRecord) -> Result<()> {
    let r = check_egal(pi)?;
    rec.lw = r.lw.to_json();
    rec.las = r.las.to_json();
    rec.l1 = r.l1.to_json();
    rec.twists = json(&r.twists.to_vec());
    rec.equal = r.equal;
    rec.distinguished = r.twists.contains_one();
    rec.simple_poles = crate::euler::EulerFactor::from_roots(r.twists.to_vec()).has_simple_poles()
        && (!pi.is_supercuspidal() || r.las.has_simple_poles());
    rec.l1_divides_las = r.l1.divides(&r.las);
    rec.central_ramified_on_f = !central_char(pi)?.restrict(&pi.f())?.is_unramified();
    rec.central_relation = check_central_relation(pi, &r.twists)?;
    rec.eta_distinguished = is_eta_distinguished(pi)?;
    rec.metadata = r.metadata;
    if let GL2Rep::DihedralSupercuspidal { l, omega, class } = pi {
        let (model, _) = dihedral_model(l, omega, *class)?;
        if let DihedralModel::Biquadratic(models) = model {
            let (dist, eta) = independent_distinguished(&models[0].lattice, &models[0].omega_b)?;
            rec.oracle_agrees = Some(dist == rec.distinguished && Some(eta) == rec.eta_distinguished);
        }
    }
    Ok(())
}

fn summarize(records: &[CorpusRecord]) -> CorpusSummary {
    let count = |f: &dyn Fn(&CorpusRecord) -> bool| records.iter().filter(|r| f(r)).count();
    let mut by_kind = Vec::new();
    for k in ["dihedral", "steinberg", "principal"] {
        by_kind.push((k.to_string(), count(&|r| r.kind == k)));
    }
    let mut by_tower = Vec::new();
    for t in [TowerClass::Biquadratic, TowerClass::Cyclic4, TowerClass::NonGaloisDihedral8] {
        by_tower.push((t.to_string(), count(&|r| r.tower == Some(t))));
    }
    let passed = count(&|r| r.passed());
    CorpusSummary {
        total: records.len(),
        passed,
        failed: records.len() - passed,
        by_kind,
        by_tower,
        distinguished: count(&|r| r.distinguished),
        eta_distinguished: count(&|r| r.eta_distinguished == Some(true)),
        reduction_failures: count(&|r| r.metadata.ambiguities.iter().any(|a| a.contains("reduction failed"))),
    }
}

/// Generate and evaluate, using rayon when the `parallel` feature is on.
pub fn run(cfg: &CorpusConfig) -> Result<CorpusReport> {
    let items = generate(cfg)?;
    let records = par_map(&items, evaluate);
    Ok(CorpusReport { config: cfg.clone(), summary: summarize(&records), records })
}

/// Generate and evaluate on the calling thread only.
pub fn run_sequential(cfg: &CorpusConfig) -> Result<CorpusReport> {
    let items = generate(cfg)?;
    let records = seq_map(&items, evaluate);
    Ok(CorpusReport { config: cfg.clone(), summary: summarize(&records), records })
}
