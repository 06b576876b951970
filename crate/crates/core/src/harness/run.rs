//! Dispatch of one experiment to its module, report emission and manifests.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, Kind, LoadedConfig, WalkMode};
use crate::bohr::{banach_density_estimate, SetSource, Window};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, TorusPoint};
use crate::matgroup::{irreducibility_certificate, GeneratorSystem};
use crate::pattern::{
    bohr_surjectivity_check, char_poly, companion, format_poly, galois_label, galois_translate_check, lift_f,
    twisted_pattern_search, PsiValue,
};
use crate::recurrence::{correspondence_crosscheck, twisted_recurrence_search, Region, TwistConfig};
use crate::walks::{bq_limit_predict, exact_cesaro_series, mc_cesaro, DEFAULT_ORBIT_CAP};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How a reported number was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    PrecisionTracked { bound: f64 },
    MonteCarlo { stderr: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ProvenanceEntry {
    pub quantity: String,
    #[serde(flatten)]
    pub provenance: Provenance,
}

fn prov(quantity: impl Into<String>, provenance: Provenance) -> ProvenanceEntry {
    ProvenanceEntry { quantity: quantity.into(), provenance }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    /// A bounded search ended without a witness; consistent with the theory.
    Inconclusive,
    InvariantViolated,
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVARIANT_VIOLATED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BUDGET: i32 = 3;
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Ok | RunStatus::Inconclusive => exit::OK,
            RunStatus::InvariantViolated => exit::INVARIANT_VIOLATED,
        }
    }
}

/// Exit code for a run that failed before producing a report.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::AtomCapExceeded { .. } | Error::OrbitCapExceeded { .. } | Error::Undecidable(_) => exit::BUDGET,
        _ => exit::CONFIG,
    }
}

/// Command-line overrides of the config file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub precision_bits: Option<u32>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub kind: Kind,
    pub seed: Option<u64>,
    pub precision_bits: u32,
    pub workers: Option<usize>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub status: RunStatus,
    pub provenance: Vec<ProvenanceEntry>,
    pub outputs: Vec<String>,
}

/// A CSV table: header plus rows of already-formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Deterministic report payload (no timestamps).
    pub report: Value,
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    pub manifest: RunManifest,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn hash_inputs(texts: &[String], seed: Option<u64>, prec: u32) -> String {
    let mut h = Sha256::new();
    for t in texts {
        h.update((t.len() as u64).to_le_bytes());
        h.update(t.as_bytes());
    }
    h.update(format!("seed={seed:?};prec={prec}").as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct Payload {
    status: RunStatus,
    report: Value,
    tables: Vec<Table>,
    summary: Vec<String>,
    provenance: Vec<ProvenanceEntry>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::invalid(e.to_string()))
}

/// Runs one experiment. Files are written only through [`write_outputs`].
pub fn run(loaded: &LoadedConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let started = now_ms();
    let mut cfg = loaded.clone();
    if opts.seed.is_some() {
        cfg.config.seed = opts.seed;
    }
    if opts.precision_bits.is_some() {
        cfg.config.precision_bits = opts.precision_bits;
    }
    if cfg.config.is_stochastic() && cfg.config.seed.is_none() {
        return Err(Error::Config {
            file: loaded.path.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            message: format!("kind {} is stochastic and needs a seed", cfg.config.kind.name()),
        });
    }
    let mut deps = vec![cfg.source_text.clone()];
    let payload = dispatch(&cfg, &mut deps)?;
    let manifest = RunManifest {
        config_hash: hash_inputs(&deps, cfg.config.seed, cfg.precision()),
        tool_version: TOOL_VERSION.into(),
        kind: cfg.config.kind,
        seed: cfg.config.seed,
        precision_bits: cfg.precision(),
        workers: opts.workers,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        status: payload.status,
        provenance: payload.provenance,
        outputs: std::iter::once("report.json".to_string())
            .chain(payload.tables.iter().map(|t| format!("{}.csv", t.name)))
            .chain(std::iter::once("manifest.json".to_string()))
            .collect(),
    };
    Ok(RunOutcome { status: payload.status, report: payload.report, tables: payload.tables, summary: payload.summary, manifest })
}

/// Output directory: override, then the config's `out`, then `out/<kind>`.
pub fn output_dir(loaded: &LoadedConfig, opts: &RunOptions) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| loaded.config.out.as_ref().map(|o| loaded.base.join(o)))
        .unwrap_or_else(|| PathBuf::from("out").join(loaded.config.kind.name()))
}

pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json values serialize");
    std::fs::write(dir.join("report.json"), pretty(&outcome.report) + "\n")?;
    for t in &outcome.tables {
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name))).map_err(csv_err)?;
        w.write_record(&t.header).map_err(csv_err)?;
        for r in &t.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
    }
    let manifest = to_value(&outcome.manifest)?;
    std::fs::write(dir.join("manifest.json"), pretty(&manifest) + "\n")?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn dispatch(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    match c.kind {
        Kind::Equidistribution => equidistribution(cfg, deps),
        Kind::Irreducibility => irreducibility(cfg, deps),
        Kind::BohrDensity => density(cfg, deps),
        Kind::Pattern => pattern(cfg, deps),
        Kind::Surjectivity => surjectivity(cfg, deps),
        Kind::Recurrence => recurrence(cfg, deps),
        Kind::Galois => galois(cfg, deps),
    }
}

fn section<'a, T>(s: &'a Option<T>, kind: Kind) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| Error::Parse(format!("missing [{}] table", kind.name())))
}

fn equidistribution(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.equidistribution, c.kind)?;
    let prec = cfg.precision();
    let (gens, mu, conv, file_mode) = cfg.walk(&s.walk, deps)?;
    let x = TorusPoint::parse(&s.chi, prec)?;
    let mode = s.mode.or(file_mode).unwrap_or(WalkMode::Exact);
    let estimates = match mode {
        WalkMode::Exact => exact_cesaro_series(&x, &s.a, &mu, &gens, s.n, &conv, prec)?,
        WalkMode::MonteCarlo => {
            let seed = c.seed.expect("checked by run");
            let samples = s.samples.unwrap_or(10_000);
            let points = s.checkpoints.clone().unwrap_or_else(|| vec![s.n]);
            points
                .iter()
                .map(|&n| mc_cesaro(&x, &s.a, &mu, &gens, n, samples, seed, prec))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let prediction = bq_limit_predict(&x, &s.a, &gens, s.orbit_cap.unwrap_or(DEFAULT_ORBIT_CAP))?;
    let mut violated = false;
    let rows = estimates
        .iter()
        .map(|e| {
            if e.value.norm() > 1.0 + e.error_bound + 1e-12 || !(0.0..=1.0 + 1e-12).contains(&e.dropped_mass) {
                violated = true;
            }
            vec![e.n.to_string(), e.value.re.to_string(), e.value.im.to_string(), e.stderr().to_string(), e.dropped_mass.to_string()]
        })
        .collect();
    let last = estimates.last().ok_or_else(|| Error::invalid("no estimates requested"))?;
    let limit = prediction.value();
    let summary = vec![
        format!("S_{} = {:.6} {:+.6}i (stderr {:.2e}, dropped {:.2e})", last.n, last.value.re, last.value.im, last.stderr(), last.dropped_mass),
        format!("predicted limit: {:.6} {:+.6}i", limit.re, limit.im),
    ];
    let provenance = vec![
        match mode {
            WalkMode::Exact => prov("cesaro", Provenance::PrecisionTracked { bound: last.error_bound }),
            WalkMode::MonteCarlo => prov("cesaro", Provenance::MonteCarlo { stderr: last.stderr() }),
        },
        prov("predicted_limit", Provenance::Exact),
    ];
    Ok(Payload {
        status: if violated { RunStatus::InvariantViolated } else { RunStatus::Ok },
        report: json!({ "estimates": to_value(&estimates)?, "prediction": to_value(&prediction)? }),
        tables: vec![Table { name: "cesaro".into(), header: vec!["n", "re", "im", "stderr", "dropped_mass"], rows }],
        summary,
        provenance,
    })
}

fn irreducibility(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.irreducibility, c.kind)?;
    let gens = cfg.group(&s.group, deps)?;
    let r = irreducibility_certificate(&s.representation, &gens, s.trials, c.seed.expect("checked by run"))?;
    let rows = r
        .trials
        .iter()
        .enumerate()
        .map(|(i, t)| vec![i.to_string(), format!("{:?}", t.vector), t.dimension.to_string(), r.full_dimension.to_string()])
        .collect();
    Ok(Payload {
        status: if r.certified_on_samples { RunStatus::Ok } else { RunStatus::Inconclusive },
        summary: vec![format!(
            "{:?} over {}: {}/{} trials reach dimension {}",
            r.representation,
            r.group,
            r.trials.iter().filter(|t| t.dimension == r.full_dimension).count(),
            r.trials.len(),
            r.full_dimension
        )],
        report: to_value(&r)?,
        tables: vec![Table { name: "trials".into(), header: vec!["trial", "vector", "span_dimension", "full_dimension"], rows }],
        provenance: vec![prov("span_dimension", Provenance::Exact)],
    })
}

fn density(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.bohr_density, c.kind)?;
    let source = SetSource::Bohr(cfg.bohr(&s.bohr, deps)?);
    let mut reports = Vec::new();
    let mut violated = false;
    for &n in &s.n {
        let r = banach_density_estimate(&source, n, &s.offsets)?;
        if u128::from(r.count + r.boundary) > r.window_size {
            violated = true;
        }
        reports.push(r);
    }
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                format!("{:?}", r.best_offset),
                r.count.to_string(),
                r.boundary.to_string(),
                r.window_size.to_string(),
                r.ratio_f64().to_string(),
                r.limit_claim.as_ref().map(format_rational).unwrap_or_default(),
                r.deviation().and_then(|d| d.to_f64()).map(|d| d.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let summary = reports
        .iter()
        .map(|r| format!("n = {}: ratio {:.6} ({} / {})", r.n, r.ratio_f64(), r.count, r.window_size))
        .collect();
    Ok(Payload {
        status: if violated { RunStatus::InvariantViolated } else { RunStatus::Ok },
        report: to_value(&reports)?,
        tables: vec![Table {
            name: "density".into(),
            header: vec!["n", "best_offset", "count", "boundary", "window_size", "ratio", "limit", "deviation"],
            rows,
        }],
        summary,
        provenance: vec![prov("count", Provenance::Exact), prov("limit", Provenance::Exact)],
    })
}

fn witness_rows(targets: impl Iterator<Item = (String, Option<Vec<i64>>, String)>) -> Vec<Vec<String>> {
    targets
        .map(|(t, w, extra)| vec![t, w.map(|v| format!("{v:?}")).unwrap_or_default(), extra])
        .collect()
}

fn pattern(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.pattern, c.kind)?;
    let source = cfg.source(&s.source, deps)?;
    let f: Vec<Vec<i64>> = match (&s.f, &s.lift) {
        (Some(f), None) => f.clone(),
        (None, Some(l)) => {
            if s.psi.domain_rank() != 3 {
                return Err(Error::invalid("lift needs a rank-3 quadratic form"));
            }
            lift_f(l).into_iter().map(|p| p.to_vec()).collect()
        }
        _ => return Err(Error::Parse("give exactly one of f and lift".into())),
    };
    let n = s.psi.domain_rank();
    let origin = vec![0; n];
    let r = twisted_pattern_search(&s.psi, &source, &f, s.k_max, &Window::cube(&origin, s.b_radius), &Window::cube(&origin, s.e_radius))?;
    let verified = r.verify(&source)?;
    let rows = witness_rows(r.witnesses.iter().map(|w| (format!("{:?}", w.f), w.e.clone(), w.target.to_string())));
    Ok(Payload {
        status: if !verified {
            RunStatus::InvariantViolated
        } else if r.success {
            RunStatus::Ok
        } else {
            RunStatus::Inconclusive
        },
        summary: vec![format!(
            "k = {}, b = {:?}: {}/{} pattern points matched ({})",
            r.k,
            r.b,
            r.covered(),
            r.witnesses.len(),
            if r.success { "complete" } else { "incomplete at budget" }
        )],
        report: to_value(&r)?,
        tables: vec![Table { name: "witnesses".into(), header: vec!["f", "e", "target"], rows }],
        provenance: vec![prov("witnesses", Provenance::Exact)],
    })
}

fn surjectivity(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.surjectivity, c.kind)?;
    let source = SetSource::Bohr(cfg.bohr(&s.bohr, deps)?);
    let [lo, hi] = s.targets;
    let targets: Vec<PsiValue> = (lo..=hi).map(|t| PsiValue::Int(BigInt::from(t))).collect();
    let r = bohr_surjectivity_check(&s.psi, &source, &targets, s.r0, s.doublings, s.spectrum_bound)?;
    let verified = r.verify(&source)?;
    let rows = r
        .rows
        .iter()
        .map(|t| {
            vec![
                t.target.to_string(),
                t.witness.as_ref().map(|v| format!("{v:?}")).unwrap_or_default(),
                t.radius.map(|x| x.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let unresolved = r.unresolved().len();
    Ok(Payload {
        status: if !verified {
            RunStatus::InvariantViolated
        } else if unresolved == 0 {
            RunStatus::Ok
        } else {
            RunStatus::Inconclusive
        },
        summary: vec![format!("{}/{} targets have witnesses in E^N", r.rows.len() - unresolved, r.rows.len())],
        report: to_value(&r)?,
        tables: vec![Table { name: "witnesses".into(), header: vec!["target", "witness", "radius"], rows }],
        provenance: vec![prov("witnesses", Provenance::Exact)],
    })
}

fn recurrence(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.recurrence, c.kind)?;
    let spec = cfg.bohr(&s.bohr, deps)?;
    let gens = cfg.group(&s.group, deps)?;
    let u = Region::from_arcs(spec.arcs())?;
    let mut tc = TwistConfig::new(s.a_list.clone(), gens, s.max_length, parse_rational(&s.epsilon)?)?;
    if let Some(cap) = s.ball_cap {
        tc.ball_cap = cap;
    }
    let r = twisted_recurrence_search(spec.system(), &u, &tc)?;
    let verified = r.verify(spec.system(), &u)?;
    let cross = s.n.map(|n| correspondence_crosscheck(&spec, &r.shifts, n)).transpose()?;
    let mut summary = vec![r.summary(), format!("words: {:?}", r.words)];
    let mut provenance = vec![prov("measure", Provenance::PrecisionTracked { bound: r.measure_error })];
    let mut violated = !verified;
    if let Some(x) = &cross {
        summary.push(format!(
            "window ratio at n = {}: {:.6} vs exact {:.6} (slack {})",
            x.n,
            x.ratio,
            x.exact_measure.to_f64().unwrap_or(f64::NAN),
            x.slack
        ));
        if let Some(w) = &x.warning {
            summary.push(format!("warning: {w}"));
        }
        provenance.push(prov("window_count", Provenance::Exact));
        violated |= !x.lower_bound_holds;
    }
    let rows = r
        .per_length
        .iter()
        .map(|row| {
            let approx = row.best.to_f64().unwrap_or(f64::NAN);
            vec![row.length.to_string(), format_rational(&row.measure), format_rational(&row.best), approx.to_string()]
        })
        .collect();
    Ok(Payload {
        status: if violated {
            RunStatus::InvariantViolated
        } else if r.success {
            RunStatus::Ok
        } else {
            RunStatus::Inconclusive
        },
        report: json!({ "search": to_value(&r)?, "crosscheck": to_value(&cross)? }),
        tables: vec![Table { name: "recurrence".into(), header: vec!["length", "measure", "best", "best_f64"], rows }],
        summary,
        provenance,
    })
}

/// Random words in the shipped `SL_d(Z)` generators.
fn sl_generators(d: usize) -> Result<GeneratorSystem> {
    match d {
        2 => Ok(GeneratorSystem::sl2z()),
        3 => Ok(GeneratorSystem::sl_elementary(3)),
        _ => Err(Error::invalid("Galois labels only for d = 2, 3")),
    }
}

fn galois(cfg: &LoadedConfig, deps: &mut Vec<String>) -> Result<Payload> {
    let c = &cfg.config;
    let s = section(&c.galois, c.kind)?;
    let gens = sl_generators(s.d)?;
    let mut rng = s.conjugations.gt(&0).then(|| ChaCha8Rng::seed_from_u64(c.seed.expect("checked by run")));
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut violated = false;
    for p in &s.polys {
        if p.len() != s.d + 1 {
            return Err(Error::invalid(format!("polynomial {p:?} is not of degree {}", s.d)));
        }
        let m = companion(p)?;
        let big: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        let label = galois_label(&big)?;
        let mut agree = 0;
        if let Some(rng) = rng.as_mut() {
            for _ in 0..s.conjugations {
                let w = gens.random_word(s.word_length, rng);
                let g = gens.evaluate(&w);
                let conj = g.mul(&m).mul(&g.inverse()?);
                if galois_label(&char_poly(&conj))? == label {
                    agree += 1;
                } else {
                    violated = true;
                }
            }
        }
        rows.push(vec![format_poly(&big), label.group().to_string(), label.to_string(), format!("{agree}/{}", s.conjugations)]);
        labels.push(json!({ "poly": format_poly(&big), "label": label.to_string(), "group": label.group(), "conjugations_agreeing": agree }));
    }
    let mut summary: Vec<String> = rows.iter().map(|r| format!("{}: {}", r[0], r[2])).collect();
    let translates = match &s.source {
        Some(spec) => {
            let source = cfg.source(spec, deps)?;
            let n = s.d * s.d - 1;
            let origin = vec![0; n];
            let r = galois_translate_check(s.d, &source, &Window::cube(&origin, s.b_radius), &Window::cube(&origin, s.e_radius))?;
            summary.push(format!("translate b = {:?}: {} of {} labels realized", r.b, r.found.len(), r.expected.len()));
            Some(r)
        }
        None => None,
    };
    let complete = translates.as_ref().is_none_or(|r| r.complete);
    Ok(Payload {
        status: if violated {
            RunStatus::InvariantViolated
        } else if complete {
            RunStatus::Ok
        } else {
            RunStatus::Inconclusive
        },
        report: json!({ "labels": labels, "translates": to_value(&translates)? }),
        tables: vec![Table { name: "labels".into(), header: vec!["poly", "group", "label", "conjugations_agreeing"], rows }],
        summary,
        provenance: vec![prov("labels", Provenance::Exact)],
    })
}

impl ExperimentConfig {
    /// Serializes back to TOML; handy for writing example configs.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid(e.to_string()))
    }
}
