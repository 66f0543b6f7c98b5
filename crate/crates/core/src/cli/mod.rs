//! Batch front end: `asailab <command> --spec <file> [--json] [--seed S] [--budget N]`.

pub mod spec;

use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asai::{
    check_central_relation, check_egal, distinguishing_twists, dihedral_model, is_eta_distinguished, l1_factor,
    las_factor, lw_factor, DihedralModel, GL2Rep, Metadata,
};
use crate::charalg::value::ExactValueJson;
use crate::corpus::{self, CorpusConfig};
use crate::euler::EulerFactor;
use crate::oracle::{
    all_biquadratic_lattices, classify_tower_oracle, hilbert_vs_norm_sample, independent_distinguished,
    verify_ker_lemma, verify_normbiquad,
};
use crate::par::par_map;
use crate::towers::classify_tower;
use spec::Built;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Classify,
    Lw,
    Las,
    L1,
    Twists,
    CheckEgal,
    Distinguished,
    Verify,
    Corpus,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    All,
    Normbiquad,
    Ker,
    Hilbert,
    Classify,
    Reps,
}

#[derive(Debug, Parser)]
#[command(name = "asailab", about = "Asai L-factors of GL(2) representations over quadratic extensions of Q_p")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// what `verify` checks
    #[arg(value_enum, default_value = "all")]
    pub target: VerifyTarget,
    /// run specification (JSON); optional for `corpus`
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// emit canonical JSON
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// cap on unit-group enumeration
    #[arg(long)]
    pub budget: Option<u64>,
    /// highest character level in `corpus`
    #[arg(long, default_value_t = 2)]
    pub max_level: u32,
    /// leave out non-Galois towers (degree-8 arithmetic) in `corpus`
    #[arg(long)]
    pub no_degree8: bool,
    /// comma-separated primes for `corpus`
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// level for the finite-level lemma checks in `verify`
    #[arg(long, default_value_t = 2)]
    pub level: u32,
    /// sampled pairs for the Hilbert-symbol check in `verify`
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// evaluate on the calling thread only
    #[arg(long)]
    pub sequential: bool,
}

/// One line of output, in the canonical schema.
#[derive(Debug, Serialize)]
pub struct Record {
    pub object: String,
    pub command: String,
    pub result: Value,
    pub factors: Vec<ExactValueJson>,
    pub metadata: Metadata,
    #[serde(skip)]
    pub pass: bool,
    #[serde(skip)]
    pub text: String,
}

impl Record {
    fn new(object: &str, command: Command, result: Value, text: String) -> Self {
        Record {
            object: object.to_string(),
            command: command_name(command).to_string(),
            result,
            factors: Vec::new(),
            metadata: Metadata::default(),
            pass: true,
            text,
        }
    }

    fn factor(mut self, l: &EulerFactor) -> Self {
        self.factors = l.to_json();
        self
    }

    fn meta(mut self, m: Metadata) -> Self {
        self.metadata = m;
        self
    }

    fn pass(mut self, ok: bool) -> Self {
        self.pass = ok;
        self
    }

    fn error(object: &str, command: Command, e: &anyhow::Error) -> Self {
        let msg = format!("{object}: {e:#}");
        Record::new(object, command, json!({ "error": msg }), format!("error: {msg}")).pass(false)
    }
}

pub fn command_name(c: Command) -> &'static str {
    match c {
        Command::Classify => "classify",
        Command::Lw => "lw",
        Command::Las => "las",
        Command::L1 => "l1",
        Command::Twists => "twists",
        Command::CheckEgal => "check-egal",
        Command::Distinguished => "distinguished",
        Command::Verify => "verify",
        Command::Corpus => "corpus",
    }
}

fn rep_command(c: Command, name: &str, pi: &GL2Rep) -> anyhow::Result<Record> {
    Ok(match c {
        Command::Lw => {
            let (l, m) = lw_factor(&pi.parameter())?;
            Record::new(name, c, json!(l.to_string()), format!("L_W = {l}")).factor(&l).meta(m)
        }
        Command::Las => {
            let l = las_factor(pi)?;
            let (_, m) = distinguishing_twists(pi)?;
            Record::new(name, c, json!(l.to_string()), format!("L_As = {l}")).factor(&l).meta(m)
        }
        Command::L1 => {
            let l = l1_factor(pi)?;
            Record::new(name, c, json!(l.to_string()), format!("L_1 = {l}")).factor(&l)
        }
        Command::Twists => {
            let (t, m) = distinguishing_twists(pi)?;
            let l = EulerFactor::from_roots(t.to_vec());
            let vals: Vec<String> = t.to_vec().iter().map(|v| v.to_string()).collect();
            Record::new(name, c, json!(vals), format!("twists = {{{}}}", vals.join(", "))).factor(&l).meta(m)
        }
        Command::CheckEgal => {
            let r = check_egal(pi)?;
            let text = format!("equal: {}\n  L_W  = {}\n  L_As = {}", r.equal, r.lw, r.las);
            Record::new(name, c, json!({ "equal": r.equal, "lw": r.lw.to_json(), "las": r.las.to_json() }), text)
                .factor(&r.las)
                .meta(r.metadata)
                .pass(r.equal)
        }
        Command::Distinguished => {
            let (t, m) = distinguishing_twists(pi)?;
            let dist = t.contains_one();
            let eta = is_eta_distinguished(pi)?;
            let exclusive = !(dist && eta == Some(true));
            let eta_text = eta.map(|b| b.to_string()).unwrap_or_else(|| "n/a".into());
            Record::new(
                name,
                c,
                json!({ "distinguished": dist, "eta_distinguished": eta, "exclusive": exclusive }),
                format!("distinguished: {dist}, eta-distinguished: {eta_text}"),
            )
            .meta(m)
            .pass(exclusive)
        }
        Command::Verify => {
            let r = check_egal(pi)?;
            let central = check_central_relation(pi, &r.twists)?;
            let cusp = !pi.is_supercuspidal()
                || (r.l1.is_one() && r.las.has_simple_poles() && r.las.inverse_roots() == r.twists.to_vec().as_slice());
            let mut oracle = Value::Null;
            let mut oracle_ok = true;
            if let GL2Rep::DihedralSupercuspidal { l, omega, class } = pi {
                if let (DihedralModel::Biquadratic(models), _) = dihedral_model(l, omega, *class)? {
                    let (d, e) = independent_distinguished(&models[0].lattice, &models[0].omega_b)?;
                    oracle_ok = d == r.twists.contains_one() && Some(e) == is_eta_distinguished(pi)?;
                    oracle = json!({ "distinguished": d, "eta_distinguished": e, "agrees": oracle_ok });
                }
            }
            let ok = r.equal && central && cusp && oracle_ok;
            Record::new(
                name,
                c,
                json!({ "equal": r.equal, "central_relation": central, "cuspidal_properties": cusp, "oracle": oracle }),
                format!("equal: {}, central relation: {central}, cuspidal properties: {cusp}, oracle agrees: {oracle_ok}", r.equal),
            )
            .factor(&r.las)
            .meta(r.metadata)
            .pass(ok)
        }
        _ => unreachable!("not a representation command"),
    })
}

fn classify_records(b: &Built, with_oracle: bool) -> Vec<Record> {
    let c = if with_oracle { Command::Verify } else { Command::Classify };
    b.fields
        .iter()
        .filter(|(n, f)| f.depth() == 2 && b.selected(n))
        .map(|(n, l)| {
            let run = || -> anyhow::Result<Record> {
                let class = classify_tower(l)?;
                if !with_oracle {
                    return Ok(Record::new(n, c, json!(class), class.to_string()));
                }
                let oracle = classify_tower_oracle(l)?;
                let ok = class == oracle;
                Ok(Record::new(n, c, json!({ "classify": class, "oracle": oracle, "agrees": ok }), format!("classify {class}, oracle {oracle}"))
                    .pass(ok))
            };
            run().unwrap_or_else(|e| Record::error(n, c, &e))
        })
        .collect()
}

fn lattice_records(b: &Built, cli: &Cli, normbiquad: bool, ker: bool) -> Vec<Record> {
    let c = Command::Verify;
    let lats = match all_biquadratic_lattices(b.p, b.precision) {
        Ok(l) => l,
        Err(e) => return vec![Record::error("lattices", c, &e.into())],
    };
    let level = cli.level;
    let run = |i: usize| -> Vec<Record> {
        let lat = &lats[i];
        let name = format!("lattice[{i}] {} in {}", lat.k.label(), lat.b.label());
        let mut out = Vec::new();
        if normbiquad {
            out.push(match verify_normbiquad(lat, level) {
                Ok(ok) => Record::new(&name, c, json!({ "normbiquad": ok, "level": level }), format!("normbiquad level {level}: {}", verdict(ok))).pass(ok),
                Err(e) => Record::error(&name, c, &e.into()),
            });
        }
        if ker {
            out.push(match verify_ker_lemma(lat, level) {
                Ok(n) => Record::new(&name, c, json!({ "ker_lemma": true, "level": level, "checked": n }), format!("ker lemma level {level}: pass ({n} units)")),
                Err(e) => Record::error(&name, c, &e.into()),
            });
        }
        out
    };
    let idx: Vec<usize> = (0..lats.len()).collect();
    let per = if cli.sequential { idx.iter().map(|&i| run(i)).collect() } else { par_map(&idx, |&i| run(i)) };
    per.into_iter().flatten().collect()
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn hilbert_record(b: &Built, cli: &Cli) -> Record {
    let c = Command::Verify;
    match hilbert_vs_norm_sample(b.p, cli.samples, cli.seed) {
        Ok((agree, disagree)) => Record::new(
            "hilbert",
            c,
            json!({ "agree": agree, "disagree": disagree, "seed": cli.seed }),
            format!("hilbert vs norm images: {agree} agree, {disagree} disagree"),
        )
        .pass(disagree == 0),
        Err(e) => Record::error("hilbert", c, &e.into()),
    }
}

fn corpus_record(cli: &Cli, base: Option<&Built>) -> anyhow::Result<Record> {
    let mut cfg = CorpusConfig { seed: cli.seed, max_level: cli.max_level, degree8: !cli.no_degree8, ..Default::default() };
    if let Some(b) = cli.budget {
        cfg.budget = b;
    }
    if let Some(p) = &cli.primes {
        cfg.primes = p.clone();
    } else if let Some(b) = base {
        cfg.primes = vec![b.p];
        cfg.precision = b.precision;
    }
    let report = if cli.sequential { corpus::run_sequential(&cfg)? } else { corpus::run(&cfg)? };
    let s = &report.summary;
    let mut text = format!("corpus seed {}: {} instances, {} passed, {} failed", cfg.seed, s.total, s.passed, s.failed);
    for r in report.records.iter().filter(|r| !r.passed()) {
        text.push_str(&format!("\n  FAIL {}", r.name));
    }
    let ok = s.failed == 0;
    Ok(Record::new("corpus", Command::Corpus, serde_json::to_value(&report)?, text).pass(ok))
}

/// Execute the command; returns the records in deterministic order.
pub fn execute(cli: &Cli) -> anyhow::Result<Vec<Record>> {
    let built = match &cli.spec {
        Some(path) => {
            let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let rs = spec::parse(&src)?;
            Some(spec::build(&rs, &src, cli.budget)?)
        }
        None if cli.command == Command::Corpus => None,
        None => return Err(anyhow!("--spec is required for `{}`", command_name(cli.command))),
    };
    if cli.command == Command::Corpus {
        return Ok(vec![corpus_record(cli, built.as_ref())?]);
    }
    let b = built.expect("spec present");
    let reps: Vec<&(String, GL2Rep)> = b.reps.iter().filter(|(n, _)| b.selected(n)).collect();
    let eval_reps = |c: Command| -> Vec<Record> {
        let f = |r: &&(String, GL2Rep)| rep_command(c, &r.0, &r.1).unwrap_or_else(|e| Record::error(&r.0, c, &e));
        if cli.sequential {
            reps.iter().map(f).collect()
        } else {
            par_map(&reps, f)
        }
    };
    Ok(match cli.command {
        Command::Classify => classify_records(&b, false),
        Command::Verify => {
            let t = cli.target;
            let mut out = Vec::new();
            if matches!(t, VerifyTarget::All | VerifyTarget::Classify) {
                out.extend(classify_records(&b, true));
            }
            if matches!(t, VerifyTarget::All | VerifyTarget::Normbiquad | VerifyTarget::Ker) {
                let all = t == VerifyTarget::All;
                out.extend(lattice_records(&b, cli, all || t == VerifyTarget::Normbiquad, all || t == VerifyTarget::Ker));
            }
            if matches!(t, VerifyTarget::All | VerifyTarget::Hilbert) {
                out.push(hilbert_record(&b, cli));
            }
            if matches!(t, VerifyTarget::All | VerifyTarget::Reps) {
                out.extend(eval_reps(Command::Verify));
            }
            out
        }
        c => eval_reps(c),
    })
}

/// Render records as canonical JSON or text.
pub fn render(records: &[Record], as_json: bool) -> String {
    if as_json {
        let mut s = serde_json::to_string_pretty(records).expect("records serialize");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for r in records {
            s.push_str(&format!("[{}] {}: {}\n", r.command, r.object, r.text));
            for a in &r.metadata.ambiguities {
                s.push_str(&format!("  note: {a}\n"));
            }
        }
        s
    }
}

/// Full run: output text and exit code (0 all pass, 1 a check failed, 2 error).
pub fn run(cli: &Cli) -> (String, i32) {
    match execute(cli) {
        Ok(records) => {
            let code = if records.iter().all(|r| r.pass) { 0 } else { 1 };
            (render(&records, cli.json), code)
        }
        Err(e) => (format!("error: {e:#}\n"), 2),
    }
}
