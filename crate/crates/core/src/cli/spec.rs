//! Run specifications: a JSON document naming fields, characters and
//! representations, resolved into live objects.

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use crate::asai::GL2Rep;
use crate::charalg::value::{parse_q, ExactValueJson};
use crate::charalg::{ExactValue, SmoothChar};
use crate::padic::{FieldElement, LocalField, PrimeContext, DEFAULT_BUDGET};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub p: u64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub characters: Vec<CharSpec>,
    #[serde(default)]
    pub representations: Vec<RepSpec>,
    /// restricts which objects commands act on; empty means all
    #[serde(default)]
    pub objects: Vec<String>,
}

fn default_precision() -> u32 {
    8
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub d: Option<ElementSpec>,
}

/// An element of a named field: integer coordinates in the monomial basis,
/// or one of the symbols `1`, `-1`, `u` (non-square unit), `pi`, `u*pi`,
/// `gen` (the adjoined root), optionally as a list of symbols to multiply.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Coords(Vec<i64>),
    Symbol(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub element: ElementSpec,
    pub value: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSpec {
    pub name: String,
    pub field: String,
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default)]
    pub level: u32,
    #[serde(default)]
    pub uniformizer: Option<ExactValueJson>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub choices: Vec<u32>,
    /// exponent for `abs`
    #[serde(default)]
    pub a: Option<String>,
    /// the quadratic extension for `eta`
    #[serde(default)]
    pub ext: Option<String>,
    /// source character for `restrict`, `norm`, `conj`
    #[serde(default)]
    pub of: Option<String>,
    /// factors for `product`
    #[serde(default)]
    pub factors: Vec<String>,
}

fn default_kind() -> String {
    "generators".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub omega: Option<String>,
    #[serde(default)]
    pub chi: Option<String>,
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default)]
    pub mu: Option<String>,
}

/// Resolved objects, in spec order.
pub struct Built {
    pub p: u64,
    pub precision: u32,
    pub fields: Vec<(String, LocalField)>,
    pub chars: Vec<(String, SmoothChar)>,
    pub reps: Vec<(String, GL2Rep)>,
    pub objects: Vec<String>,
}

impl Built {
    pub fn field(&self, name: &str) -> anyhow::Result<&LocalField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f).ok_or_else(|| anyhow!("unknown field '{name}'"))
    }

    pub fn char(&self, name: &str) -> anyhow::Result<&SmoothChar> {
        self.chars.iter().find(|(n, _)| n == name).map(|(_, c)| c).ok_or_else(|| anyhow!("unknown character '{name}'"))
    }

    /// Whether commands should act on the named object.
    pub fn selected(&self, name: &str) -> bool {
        self.objects.is_empty() || self.objects.iter().any(|o| o == name)
    }
}

/// Line of the first `"name": "<name>"` in the source, for error messages.
fn locate(src: &str, name: &str) -> String {
    let needle = format!("\"{name}\"");
    src.lines()
        .position(|l| l.contains("\"name\"") && l.contains(&needle))
        .map(|i| format!(" (line {})", i + 1))
        .unwrap_or_default()
}

pub fn parse(src: &str) -> anyhow::Result<RunSpec> {
    serde_json::from_str(src).map_err(|e| anyhow!("spec parse error at line {} column {}: {e}", e.line(), e.column()))
}

pub fn element(f: &LocalField, spec: &ElementSpec) -> anyhow::Result<FieldElement> {
    match spec {
        ElementSpec::Coords(c) => Ok(f.element_from_ints(c)?),
        ElementSpec::Symbol(s) => {
            let mut x = f.one();
            for part in s.split('*').map(str::trim) {
                let y = match part {
                    "1" => f.one(),
                    "-1" => f.int(-1),
                    "u" => f.nonsquare_unit()?,
                    "pi" => f.uniformizer(),
                    "gen" => f.generator(),
                    n => f.int(n.parse::<i64>().map_err(|_| anyhow!("unknown element symbol '{n}'"))?),
                };
                x = x.mul(&y);
            }
            Ok(x)
        }
    }
}

fn value(v: &Option<ExactValueJson>) -> anyhow::Result<ExactValue> {
    Ok(v.as_ref().map(ExactValue::try_from).transpose()?.unwrap_or_else(|| ExactValue::root_of_unity(0.into())))
}

fn need<'a>(v: &'a Option<String>, what: &str) -> anyhow::Result<&'a str> {
    v.as_deref().ok_or_else(|| anyhow!("missing '{what}'"))
}

fn build_char(b: &Built, c: &CharSpec) -> anyhow::Result<SmoothChar> {
    let f = b.field(&c.field)?;
    let u = value(&c.uniformizer)?;
    Ok(match c.kind.as_str() {
        "trivial" => SmoothChar::trivial(f)?,
        "unramified" => SmoothChar::unramified(f, u)?,
        "abs" => SmoothChar::absvalue(f, parse_q(need(&c.a, "a")?)?)?,
        "eta" => SmoothChar::eta_char(b.field(need(&c.ext, "ext")?)?)?,
        "choices" => SmoothChar::from_basis_choices(f, c.level, &c.choices, u)?,
        "generators" => {
            let gens = c
                .generators
                .iter()
                .map(|g| Ok((element(f, &g.element)?, parse_q(&g.value)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            SmoothChar::from_generators(f, c.level, &gens, u)?
        }
        "restrict" => b.char(need(&c.of, "of")?)?.restrict(f)?,
        "norm" => b.char(need(&c.of, "of")?)?.compose_norm(f)?,
        "conj" => {
            let g = crate::padic::GaloisElement::top(f)?;
            b.char(need(&c.of, "of")?)?.conj(&g)?
        }
        "product" => {
            let mut acc = SmoothChar::trivial(f)?;
            for n in &c.factors {
                acc = acc.mul(b.char(n)?)?;
            }
            acc
        }
        k => bail!("unknown character kind '{k}'"),
    })
}

fn build_rep(b: &Built, r: &RepSpec) -> anyhow::Result<GL2Rep> {
    let get = |v: &Option<String>, what: &str| -> anyhow::Result<SmoothChar> { Ok(b.char(need(v, what)?)?.clone()) };
    Ok(match r.kind.as_str() {
        "dihedral" => GL2Rep::dihedral(get(&r.omega, "omega")?)?,
        "steinberg" => GL2Rep::steinberg(get(&r.chi, "chi")?)?,
        "principal" => GL2Rep::principal(get(&r.lambda, "lambda")?, get(&r.mu, "mu")?)?,
        k => bail!("unknown representation kind '{k}'"),
    })
}

/// Resolve a spec; `budget` applies unless the spec sets its own.
pub fn build(spec: &RunSpec, src: &str, budget: Option<u64>) -> anyhow::Result<Built> {
    let ctx = PrimeContext::new(spec.p, spec.precision)?;
    let budget = spec.budget.or(budget).unwrap_or(DEFAULT_BUDGET);
    let mut b = Built {
        p: spec.p,
        precision: spec.precision,
        fields: Vec::new(),
        chars: Vec::new(),
        reps: Vec::new(),
        objects: spec.objects.clone(),
    };
    for fs in &spec.fields {
        let f = (|| -> anyhow::Result<LocalField> {
            match &fs.parent {
                None => Ok(LocalField::base_with_budget(ctx, budget)),
                Some(parent) => {
                    let parent = b.field(parent)?;
                    let d = element(parent, fs.d.as_ref().ok_or_else(|| anyhow!("missing 'd'"))?)?;
                    Ok(parent.make_extension_labeled(&d, Some(&fs.name))?)
                }
            }
        })()
        .with_context(|| format!("field '{}'{}", fs.name, locate(src, &fs.name)))?;
        b.fields.push((fs.name.clone(), f));
    }
    for cs in &spec.characters {
        let c = build_char(&b, cs).with_context(|| format!("character '{}'{}", cs.name, locate(src, &cs.name)))?;
        b.chars.push((cs.name.clone(), c));
    }
    for rs in &spec.representations {
        let r = build_rep(&b, rs).with_context(|| format!("representation '{}'{}", rs.name, locate(src, &rs.name)))?;
        b.reps.push((rs.name.clone(), r));
    }
    Ok(b)
}
