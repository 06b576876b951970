//! The acceptance suite, runnable from the command line.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::two_frequency_arc;
use crate::bohr::{banach_density_estimate, BohrSetSpec, SetSource};
use crate::error::{Error, Result};
use crate::exact::{rat, Coord, TorusPoint, DEFAULT_PRECISION};
use crate::matgroup::{
    character_stabilizer_index, irreducibility_certificate, orbit_bfs, GeneratorSystem, OrbitOutcome, RationalPoint,
    RepresentationSpec,
};
use crate::pattern::{
    bohr_surjectivity_check, char_poly, companion, eval_psi, galois_label, psi_invariance_check, q3, represent_q3,
    GaloisLabelValue, InvariantMap, PsiValue,
};
use crate::recurrence::{correspondence_crosscheck, twisted_recurrence_search, Region, TwistConfig};
use crate::walks::{bq_limit_predict, exact_cesaro, mc_cesaro, ConvolutionOptions, Prediction, WalkMeasure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Smoke,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const SEED: u64 = 20_240_601;

/// Shared by the rational and irrational orbit explorations.
const ORBIT_CAP: usize = 10_000;

type Check = fn(Level) -> Result<(bool, String)>;

const CRITERIA: [(&str, Check); 11] = [
    ("equidistribution-irrational", irrational_walk),
    ("equidistribution-rational", rational_walk),
    ("stabilizer-dichotomy", stabilizer_dichotomy),
    ("q3-representation", q3_representation),
    ("bohr-surjectivity", bohr_surjectivity),
    ("density-convergence", density_convergence),
    ("twisted-recurrence", twisted_recurrence),
    ("correspondence", correspondence),
    ("invariance-scaling", invariance_scaling),
    ("galois-labels", galois_labels),
    ("irreducibility", irreducibility),
];

/// Runs every criterion, calling `each` as results come in.
pub fn verify_suite(level: Level, mut each: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let t = Instant::now();
            let (passed, detail) = check(level).unwrap_or_else(|e| (false, format!("error: {e}")));
            let r = CriterionResult { id: i + 1, name, passed, detail, seconds: t.elapsed().as_secs_f64() };
            each(&r);
            r
        })
        .collect()
}

fn sl2_walk() -> (GeneratorSystem, WalkMeasure) {
    let g = GeneratorSystem::sl2z();
    let mu = WalkMeasure::uniform(&g);
    (g, mu)
}

fn irrational_walk(level: Level) -> Result<(bool, String)> {
    let (g, mu) = sl2_walk();
    let x = TorusPoint::new(vec![Coord::sqrt(2), Coord::sqrt(3)]);
    let samples = if level == Level::Full { 10_000 } else { 2_000 };
    let e = mc_cesaro(&x, &[1, 0], &mu, &g, 200, samples, SEED, DEFAULT_PRECISION)?;
    let ok = e.value.norm() <= 0.1;
    Ok((ok, format!("|S_200| = {:.4} <= 0.1 (stderr {:.4}, {samples} samples)", e.value.norm(), e.stderr())))
}

fn rational_walk(_: Level) -> Result<(bool, String)> {
    let (g, mu) = sl2_walk();
    let x = TorusPoint::from_rationals(&[rat(1, 2), rat(0, 1)]);
    let pred = bq_limit_predict(&x, &[1, 0], &g, 1000)?;
    let third = Complex64::new(-1.0 / 3.0, 0.0);
    let pred_ok = matches!(pred, Prediction::OrbitAverage { index: 3, value } if (value - third).norm() < 1e-12);
    let e = exact_cesaro(&x, &[1, 0], &mu, &g, 30, &ConvolutionOptions::default(), DEFAULT_PRECISION)?;
    let dev = (e.value - third).norm();
    Ok((pred_ok && dev <= 0.05, format!("predicted {:.6} (orbit size 3), |S_30 + 1/3| = {dev:.4} <= 0.05", pred.value().re)))
}

fn stabilizer_dichotomy(_: Level) -> Result<(bool, String)> {
    let g = GeneratorSystem::sl2z();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut largest = 0;
    for _ in 0..20 {
        let q = rng.gen_range(1..=12i64);
        let chi = RationalPoint::new(vec![rat(rng.gen_range(0..q), q), rat(rng.gen_range(0..q), q)]);
        let t = character_stabilizer_index(&g, &chi, ORBIT_CAP)?;
        if !t.is_closed(&g)? {
            return Ok((false, format!("orbit of {chi:?} not closed")));
        }
        largest = largest.max(t.index);
    }
    let irr = TorusPoint::new(vec![Coord::sqrt(2), Coord::sqrt(3)]);
    let open = matches!(orbit_bfs(&g, &irr, ORBIT_CAP)?, OrbitOutcome::CapHit { .. });
    Ok((open, format!("20 rational orbits closed (largest {largest}); irrational orbit open at cap {ORBIT_CAP}")))
}

fn q3_representation(level: Level) -> Result<(bool, String)> {
    let r: i64 = if level == Level::Full { 100_000 } else { 10_000 };
    let bad = (-r..=r).find(|&n| q3(&represent_q3(n)) != n as i128);
    Ok((bad.is_none(), match bad {
        None => format!("Q(witness) = n for all |n| <= {r}"),
        Some(n) => format!("fails at n = {n}"),
    }))
}

fn bohr_surjectivity(level: Level) -> Result<(bool, String)> {
    let (rq, rd) = if level == Level::Full { (50, 25) } else { (10, 5) };
    let src = SetSource::Bohr(BohrSetSpec::golden_cube());
    let mut parts = Vec::new();
    let mut ok = true;
    for (psi, r) in [(InvariantMap::q3(), rq), (InvariantMap::Determinant { d: 2 }, rd)] {
        let targets: Vec<PsiValue> = (-r..=r).map(|n| PsiValue::Int(BigInt::from(n))).collect();
        let rep = bohr_surjectivity_check(&psi, &src, &targets, 8, 8, Some(50))?;
        let good = rep.all_resolved() && rep.verify(&src)?;
        ok &= good;
        let radius = rep.rows.iter().filter_map(|t| t.radius).max().unwrap_or(0);
        parts.push(format!("{} on [-{r}, {r}]: {} unresolved, max radius {radius}", psi_name(&psi), rep.unresolved().len()));
    }
    Ok((ok, parts.join("; ")))
}

fn psi_name(psi: &InvariantMap) -> &'static str {
    match psi {
        InvariantMap::QuadraticForm { .. } => "u^2+v^2-w^2",
        InvariantMap::Determinant { .. } => "xy-z^2",
        InvariantMap::CharPoly { .. } => "charpoly",
        InvariantMap::GaloisLabel { .. } => "galois",
    }
}

fn density_convergence(_: Level) -> Result<(bool, String)> {
    let r = banach_density_estimate(&SetSource::Bohr(BohrSetSpec::golden_arc()), 10_000, &[])?;
    let dev = (r.ratio_f64() - 0.3).abs();
    Ok((dev <= 0.02, format!("ratio {:.6} at n = 10^4, |ratio - 0.3| = {dev:.2e} <= 0.02", r.ratio_f64())))
}

fn demo() -> Result<(BohrSetSpec, Region, crate::recurrence::RecurrenceReport)> {
    let spec = two_frequency_arc();
    let u = Region::from_arcs(spec.arcs())?;
    let cfg = TwistConfig::new(vec![vec![1, 0], vec![0, 1]], GeneratorSystem::sl2z(), 12, rat(1, 100))?;
    let r = twisted_recurrence_search(spec.system(), &u, &cfg)?;
    Ok((spec, u, r))
}

fn twisted_recurrence(_: Level) -> Result<(bool, String)> {
    let (spec, u, r) = demo()?;
    let verified = r.verify(spec.system(), &u)?;
    let ok = r.success && verified && r.measure >= rat(8, 100);
    Ok((ok, format!("{}; words {:?}; recomputation {}", r.summary(), r.words, if verified { "matches" } else { "differs" })))
}

fn correspondence(level: Level) -> Result<(bool, String)> {
    let (spec, _, r) = demo()?;
    let n = if level == Level::Full { 10_000 } else { 2_000 };
    let x = correspondence_crosscheck(&spec, &r.shifts, n)?;
    let tol = if level == Level::Full { 0.02 } else { x.slack };
    let dev = x.deviation();
    Ok((dev <= tol, format!("n = {n}: ratio {:.6} vs exact {:.6}, deviation {dev:.2e} <= {tol}", x.ratio, x.exact_measure.to_f64().unwrap_or(f64::NAN))))
}

fn invariance_scaling(_: Level) -> Result<(bool, String)> {
    let sl3 = GeneratorSystem::sl_elementary(3);
    let sl2 = GeneratorSystem::sl2z();
    let pairs: [(InvariantMap, &GeneratorSystem); 5] = [
        (InvariantMap::q3(), &GeneratorSystem::berggren()),
        (InvariantMap::CharPoly { d: 2 }, &sl2),
        (InvariantMap::CharPoly { d: 3 }, &sl3),
        (InvariantMap::Determinant { d: 2 }, &sl2),
        (InvariantMap::Determinant { d: 3 }, &sl3),
    ];
    let mut checks = 0;
    for (psi, gens) in &pairs {
        let rep = psi_invariance_check(psi, gens, &psi.representation(), 100, 10, SEED)?;
        if !rep.holds() {
            return Ok((false, format!("{psi:?}: {} violations", rep.violations.len())));
        }
        checks += rep.checks;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for (psi, _) in &pairs {
        for _ in 0..100 {
            let v: Vec<BigInt> = (0..psi.domain_rank()).map(|_| BigInt::from(rng.gen_range(-20i64..=20))).collect();
            let k = BigInt::from(rng.gen_range(-6i64..=6));
            let kv: Vec<BigInt> = v.iter().map(|x| x * &k).collect();
            if eval_psi(psi, &kv)? != psi.scale_value(&eval_psi(psi, &v)?, &k)? {
                return Ok((false, format!("{psi:?}: scaling fails at {v:?}, k = {k}")));
            }
            checks += 1;
        }
    }
    Ok((true, format!("{checks} exact checks over 5 pairings")))
}

fn galois_labels(_: Level) -> Result<(bool, String)> {
    let expect = [
        (vec![1i64, 0, -3, 1], "C3"),
        (vec![1, 0, 0, -2], "S3"),
        (vec![1, 0, -1], "reducible"),
        (vec![1, 0, -2], "C2"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut conj = 0;
    for (p, want) in &expect {
        let big: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        let label = galois_label(&big)?;
        let got = match &label {
            GaloisLabelValue::Reducible { .. } => "reducible".to_string(),
            l => l.group().to_string(),
        };
        if got != *want {
            return Ok((false, format!("{p:?} labelled {label}, expected {want}")));
        }
        let gens = if p.len() == 4 { GeneratorSystem::sl_elementary(3) } else { GeneratorSystem::sl2z() };
        let m = companion(p)?;
        for _ in 0..50 {
            let len = rng.gen_range(1..=12);
            let g = gens.evaluate(&gens.random_word(len, &mut rng));
            let c = g.mul(&m).mul(&g.inverse()?);
            if galois_label(&char_poly(&c))? != label {
                return Ok((false, format!("label of {p:?} changed under conjugation")));
            }
            conj += 1;
        }
    }
    Ok((true, format!("t^3-3t+1 C3, t^3-2 S3, t^2-1 reducible, t^2-2 C2; {conj} conjugations agree")))
}

fn irreducibility(_: Level) -> Result<(bool, String)> {
    let sl2 = GeneratorSystem::sl2z();
    let sl3 = GeneratorSystem::sl_elementary(3);
    let cases = [
        (RepresentationSpec::Adjoint { d: 2 }, &sl2),
        (RepresentationSpec::Adjoint { d: 3 }, &sl3),
        (RepresentationSpec::SymSquare { d: 2 }, &sl2),
        (RepresentationSpec::SymSquare { d: 3 }, &sl3),
        (RepresentationSpec::Standard { n: 3 }, &GeneratorSystem::berggren()),
    ];
    for (rep, gens) in &cases {
        let r = irreducibility_certificate(rep, gens, 20, SEED)?;
        if !r.certified_on_samples {
            return Ok((false, format!("{rep:?} over {}: a trial stayed below dimension {}", r.group, r.full_dimension)));
        }
    }
    Ok((true, "5 representations reach full span dimension on 20 trials each".into()))
}

/// Whether every criterion passed.
pub fn all_passed(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.passed)
}

impl From<Level> for &'static str {
    fn from(l: Level) -> &'static str {
        match l {
            Level::Smoke => "smoke",
            Level::Full => "full",
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Level::Smoke),
            "full" => Ok(Level::Full),
            _ => Err(Error::Parse(format!("unknown level {s:?}; use smoke or full"))),
        }
    }
}
