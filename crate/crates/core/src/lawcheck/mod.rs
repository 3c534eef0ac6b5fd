//! Randomized law checking: seeded instance generation, suites of
//! commuting-diagram checks, replay and counterexample shrinking.
//!
//! An [`Instance`] is plain data (spaces as preorders, maps as assignments,
//! valuations as point weights) so that a failure can be serialized,
//! replayed and shrunk independently of the generator that produced it.

pub mod gen;
pub mod mutation;
mod suites;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::{ExtNonneg, Scalar};
use crate::space::{ContinuousMap, FiniteSpace};
use crate::valuation::{Kernel, LowerSemiFn, SimpleSecondOrder, SimpleThirdOrder, Valuation};

pub use gen::{generate_spaces, GenConfig};
pub use mutation::{run_mutation_harness, MutationOutcome};

type Q = ExtNonneg<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LawError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("instance passes; nothing to shrink")]
    NotAFailure,
    #[error("could not build the worker pool: {0}")]
    Pool(String),
}

/// A space given by its points and the strict part of its specialization
/// preorder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub names: Vec<String>,
    pub below: Vec<(usize, usize)>,
}

impl SpaceSpec {
    pub fn of(space: &FiniteSpace) -> Self {
        SpaceSpec {
            names: space.names().to_vec(),
            below: space.specialization().into_iter().filter(|(x, y)| x != y).collect(),
        }
    }

    pub fn build(&self) -> Option<FiniteSpace> {
        FiniteSpace::from_order_fn(self.names.clone(), |a, b| a == b || self.below.contains(&(a, b))).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub from: usize,
    pub to: usize,
    pub assignment: Vec<usize>,
}

/// One value per point of `space`: point weights of a valuation or the
/// values of a lower semicontinuous function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointValues {
    pub space: usize,
    pub values: Vec<Q>,
}

/// A kernel `from → V(to)`, one row of point weights per source point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub from: usize,
    pub to: usize,
    pub rows: Vec<Vec<Q>>,
}

/// Coefficient and point weights of each atom of a mixture.
pub type MixtureAtoms = Vec<(Q, Vec<Q>)>;

/// `Σⱼ cⱼ·δ_{νⱼ}` with each `νⱼ` given by point weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub space: usize,
    pub atoms: MixtureAtoms,
}

/// `Σₖ cₖ·δ_{ξₖ}` with each `ξₖ` a mixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub space: usize,
    pub atoms: Vec<(Q, MixtureAtoms)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub spaces: Vec<SpaceSpec>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub valuations: Vec<PointValues>,
    #[serde(default)]
    pub functions: Vec<PointValues>,
    #[serde(default)]
    pub kernels: Vec<KernelSpec>,
    #[serde(default)]
    pub mixtures: Vec<MixtureSpec>,
    #[serde(default)]
    pub towers: Vec<TowerSpec>,
    #[serde(default)]
    pub scalars: Vec<Q>,
    /// Seed for samples drawn inside the check itself.
    pub seed: u64,
}

impl Instance {
    pub fn total_points(&self) -> usize {
        self.spaces.iter().map(|s| s.names.len()).sum()
    }

    fn value_slots(&mut self) -> Vec<&mut Q> {
        let mut out: Vec<&mut Q> = Vec::new();
        for v in self.valuations.iter_mut().chain(self.functions.iter_mut()) {
            out.extend(v.values.iter_mut());
        }
        for k in &mut self.kernels {
            out.extend(k.rows.iter_mut().flatten());
        }
        for m in &mut self.mixtures {
            for (c, w) in &mut m.atoms {
                out.push(c);
                out.extend(w.iter_mut());
            }
        }
        for t in &mut self.towers {
            for (c, xi) in &mut t.atoms {
                out.push(c);
                for (d, w) in xi {
                    out.push(d);
                    out.extend(w.iter_mut());
                }
            }
        }
        out.extend(self.scalars.iter_mut());
        out
    }

    /// Sum of the representation sizes of every value, with `∞` counted
    /// above every finite value.
    pub fn value_complexity(&mut self) -> u64 {
        self.value_slots()
            .into_iter()
            .map(|v| match v {
                Q::Infinite => 1 << 20,
                Q::Finite(q) => q.complexity(),
            })
            .sum()
    }

    /// The instance restricted to the subspace without point `p` of space
    /// `s`. `None` when a map sends something to `p`.
    pub fn without_point(&self, s: usize, p: usize) -> Option<Instance> {
        let spec = self.spaces.get(s)?;
        if p >= spec.names.len() {
            return None;
        }
        let renumber = |x: usize| if x > p { x - 1 } else { x };
        let mut out = self.clone();
        let mut names = spec.names.clone();
        names.remove(p);
        let below =
            spec.below.iter().filter(|(a, b)| *a != p && *b != p).map(|&(a, b)| (renumber(a), renumber(b))).collect();
        out.spaces[s] = SpaceSpec { names, below };
        for m in &mut out.maps {
            if m.to == s {
                if m.assignment.contains(&p) {
                    return None;
                }
                m.assignment.iter_mut().for_each(|y| *y = renumber(*y));
            }
            if m.from == s {
                m.assignment.remove(p);
            }
        }
        for v in out.valuations.iter_mut().chain(out.functions.iter_mut()) {
            if v.space == s {
                v.values.remove(p);
            }
        }
        for k in &mut out.kernels {
            if k.from == s {
                k.rows.remove(p);
            }
            if k.to == s {
                k.rows.iter_mut().for_each(|r| {
                    r.remove(p);
                });
            }
        }
        for m in &mut out.mixtures {
            if m.space == s {
                m.atoms.iter_mut().for_each(|(_, w)| {
                    w.remove(p);
                });
            }
        }
        for t in &mut out.towers {
            if t.space == s {
                for (_, xi) in &mut t.atoms {
                    xi.iter_mut().for_each(|(_, w)| {
                        w.remove(p);
                    });
                }
            }
        }
        Some(out)
    }
}

/// Instance data turned into library values.
pub struct Built {
    pub spaces: Vec<FiniteSpace>,
    pub maps: Vec<ContinuousMap>,
    pub valuations: Vec<Valuation<BigRational>>,
    pub functions: Vec<LowerSemiFn<BigRational>>,
    pub kernels: Vec<Kernel<BigRational>>,
    pub mixtures: Vec<SimpleSecondOrder<BigRational>>,
    pub towers: Vec<SimpleThirdOrder<BigRational>>,
    pub scalars: Vec<Q>,
    pub rng: ChaCha8Rng,
}

/// Why an instance did not pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckError {
    /// The instance is outside the suite's preconditions.
    Skip(String),
    /// A law failed or an operation errored on valid input.
    Fail(String),
}

impl<E: std::fmt::Display> From<E> for CheckError {
    fn from(e: E) -> Self {
        CheckError::Fail(e.to_string())
    }
}

pub type CheckResult = Result<(), CheckError>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::lawcheck::CheckError::Fail(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;

fn skip<T, E: std::fmt::Display>(what: &str, r: Result<T, E>) -> Result<T, CheckError> {
    r.map_err(|e| CheckError::Skip(format!("{what}: {e}")))
}

impl Instance {
    /// Builds every component. Malformed components make the instance a skip.
    pub fn build(&self) -> Result<Built, CheckError> {
        let spaces: Vec<FiniteSpace> = self
            .spaces
            .iter()
            .map(|s| s.build().ok_or_else(|| CheckError::Skip("space is not a preorder".into())))
            .collect::<Result<_, _>>()?;
        let space = |i: usize| spaces.get(i).cloned().ok_or_else(|| CheckError::Skip(format!("no space {i}")));
        let mut maps = Vec::new();
        for m in &self.maps {
            maps.push(skip("map", ContinuousMap::new(space(m.from)?, space(m.to)?, m.assignment.clone()))?);
        }
        let mut valuations = Vec::new();
        for v in &self.valuations {
            valuations.push(skip("valuation", Valuation::from_weights(&space(v.space)?, &v.values))?);
        }
        let mut functions = Vec::new();
        for f in &self.functions {
            functions.push(skip("function", LowerSemiFn::new(&space(f.space)?, f.values.clone()))?);
        }
        let mut kernels = Vec::new();
        for k in &self.kernels {
            let (src, tgt) = (space(k.from)?, space(k.to)?);
            let rows = k.rows.iter().map(|r| Valuation::from_weights(&tgt, r)).collect::<Result<Vec<_>, _>>();
            kernels.push(skip("kernel", Kernel::new(&src, &tgt, skip("kernel row", rows)?))?);
        }
        let mixture = |space: &FiniteSpace, atoms: &[(Q, Vec<Q>)]| {
            let atoms = atoms
                .iter()
                .map(|(c, w)| Ok((c.clone(), Valuation::from_weights(space, w)?)))
                .collect::<Result<Vec<_>, crate::valuation::ValuationError>>()?;
            SimpleSecondOrder::new(space, atoms)
        };
        let mut mixtures = Vec::new();
        for m in &self.mixtures {
            mixtures.push(skip("mixture", mixture(&space(m.space)?, &m.atoms))?);
        }
        let mut towers = Vec::new();
        for t in &self.towers {
            let s = space(t.space)?;
            let atoms = t
                .atoms
                .iter()
                .map(|(c, xi)| Ok((c.clone(), mixture(&s, xi)?)))
                .collect::<Result<Vec<_>, crate::valuation::ValuationError>>();
            towers.push(skip("tower", SimpleThirdOrder::new(&s, skip("tower", atoms)?))?);
        }
        Ok(Built {
            spaces,
            maps,
            valuations,
            functions,
            kernels,
            mixtures,
            towers,
            scalars: self.scalars.clone(),
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        })
    }
}

/// A named suite: an instance generator and a check.
pub struct SuiteDef {
    pub name: &'static str,
    pub generate: fn(&mut gen::Gen) -> Instance,
    pub check: fn(&Instance) -> CheckResult,
}

pub fn suites() -> &'static [SuiteDef] {
    suites::ALL
}

pub fn suite_names() -> Vec<&'static str> {
    suites::ALL.iter().map(|s| s.name).collect()
}

fn find_suite(name: &str) -> Result<(usize, &'static SuiteDef), LawError> {
    suites::ALL.iter().enumerate().find(|(_, s)| s.name == name).ok_or_else(|| LawError::UnknownSuite(name.to_owned()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Skip(String),
    Fail(String),
}

/// Runs one check, turning panics into failures.
pub fn evaluate(check: fn(&Instance) -> CheckResult, instance: &Instance) -> Outcome {
    match catch_unwind(AssertUnwindSafe(|| check(instance))) {
        Ok(Ok(())) => Outcome::Pass,
        Ok(Err(CheckError::Skip(m))) => Outcome::Skip(m),
        Ok(Err(CheckError::Fail(m))) => Outcome::Fail(m),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "non-string panic".into());
            Outcome::Fail(format!("panic: {msg}"))
        }
    }
}

pub fn replay(suite: &str, instance: &Instance) -> Result<Outcome, LawError> {
    let (_, def) = find_suite(suite)?;
    Ok(evaluate(def.check, instance))
}

/// The instance a suite generates at position `index` of its stream.
pub fn generate_instance(suite: &str, cfg: &GenConfig, index: usize) -> Result<Instance, LawError> {
    let (i, def) = find_suite(suite)?;
    Ok(generate_at(i, def, cfg, index))
}

/// As [`generate_instance`], with `space` as the suite's primary space.
pub fn generate_instance_on(
    suite: &str,
    cfg: &GenConfig,
    index: usize,
    space: &FiniteSpace,
) -> Result<Instance, LawError> {
    let (i, def) = find_suite(suite)?;
    let mut g = gen::Gen { rng: cfg.rng_for(i as u64, index as u64), cfg, index, primary: Some(space.clone()) };
    Ok((def.generate)(&mut g))
}

fn generate_at(suite_index: usize, def: &SuiteDef, cfg: &GenConfig, index: usize) -> Instance {
    let mut g = gen::Gen { rng: cfg.rng_for(suite_index as u64, index as u64), cfg, index, primary: None };
    (def.generate)(&mut g)
}

/// Greedy minimization: drop points, drop mixture atoms, zero values, then
/// simplify values, keeping each step only while the check still fails.
pub fn shrink(suite: &str, instance: &Instance) -> Result<Instance, LawError> {
    let (_, def) = find_suite(suite)?;
    shrink_with(def.check, instance)
}

fn fails(check: fn(&Instance) -> CheckResult, instance: &Instance) -> bool {
    matches!(evaluate(check, instance), Outcome::Fail(_))
}

fn shrink_with(check: fn(&Instance) -> CheckResult, instance: &Instance) -> Result<Instance, LawError> {
    if !fails(check, instance) {
        return Err(LawError::NotAFailure);
    }
    let mut current = instance.clone();
    'outer: loop {
        for candidate in candidates(&current) {
            if fails(check, &candidate) {
                current = candidate;
                continue 'outer;
            }
        }
        return Ok(current);
    }
}

fn candidates(inst: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    for (s, spec) in inst.spaces.iter().enumerate() {
        for p in (0..spec.names.len()).rev() {
            out.extend(inst.without_point(s, p));
        }
    }
    for (i, m) in inst.mixtures.iter().enumerate() {
        if m.atoms.len() > 1 {
            for j in 0..m.atoms.len() {
                let mut c = inst.clone();
                c.mixtures[i].atoms.remove(j);
                out.push(c);
            }
        }
    }
    for (i, t) in inst.towers.iter().enumerate() {
        if t.atoms.len() > 1 {
            for j in 0..t.atoms.len() {
                let mut c = inst.clone();
                c.towers[i].atoms.remove(j);
                out.push(c);
            }
        }
    }
    let slots = inst.clone().value_slots().len();
    for k in 0..slots {
        let mut c = inst.clone();
        let slot = c.value_slots().swap_remove(k);
        if slot.is_zero() {
            continue;
        }
        *slot = Q::zero();
        out.push(c);
    }
    for k in 0..slots {
        let mut probe = inst.clone();
        let replacements: Vec<Q> = match &*probe.value_slots().swap_remove(k) {
            Q::Infinite => vec![Q::one()],
            Q::Finite(q) => q.simplifications().into_iter().filter(|s| !s.is_negative_value()).map(Q::Finite).collect(),
        };
        for r in replacements {
            let mut c = inst.clone();
            *c.value_slots().swap_remove(k) = r;
            out.push(c);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub message: String,
    pub instance: Instance,
    pub shrunk: Instance,
    pub shrunk_message: String,
    /// Command line that regenerates and re-runs this instance.
    pub replay: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: GenConfig,
    pub instances: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reports are kept per failure; at most this many are shrunk per suite.
const SHRINK_LIMIT: usize = 3;

fn replay_command(suite: &str, cfg: &GenConfig, index: usize) -> String {
    format!("powerdomain laws {suite} --seed {} --max-points {} --only {index}", cfg.seed, cfg.max_points)
}

/// Runs `count` instances of one suite. `jobs > 1` spreads instances over a
/// worker pool; the report does not depend on `jobs` except for wall time.
pub fn run_suite(name: &str, cfg: &GenConfig) -> Result<SuiteReport, LawError> {
    run_suite_jobs(name, cfg, 1)
}

pub fn run_suite_jobs(name: &str, cfg: &GenConfig, jobs: usize) -> Result<SuiteReport, LawError> {
    let (i, def) = find_suite(name)?;
    if jobs <= 1 {
        return Ok(run_indices(i, def, cfg, 0..cfg.instance_count, false));
    }
    let pool = pool(jobs)?;
    Ok(pool.install(|| run_indices(i, def, cfg, 0..cfg.instance_count, true)))
}

/// Runs only instance `index`, as printed in a failure's replay line.
pub fn run_single(name: &str, cfg: &GenConfig, index: usize) -> Result<SuiteReport, LawError> {
    let (i, def) = find_suite(name)?;
    Ok(run_indices(i, def, cfg, index..index + 1, false))
}

/// Runs several suites, in the given order.
pub fn run_suites(names: &[&str], cfg: &GenConfig, jobs: usize) -> Result<Vec<SuiteReport>, LawError> {
    let defs = names.iter().map(|n| find_suite(n)).collect::<Result<Vec<_>, _>>()?;
    if jobs <= 1 {
        return Ok(defs.into_iter().map(|(i, d)| run_indices(i, d, cfg, 0..cfg.instance_count, false)).collect());
    }
    let pool = pool(jobs)?;
    Ok(pool
        .install(|| defs.into_par_iter().map(|(i, d)| run_indices(i, d, cfg, 0..cfg.instance_count, true)).collect()))
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, LawError> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| LawError::Pool(e.to_string()))
}

fn run_indices(
    suite_index: usize,
    def: &SuiteDef,
    cfg: &GenConfig,
    indices: std::ops::Range<usize>,
    parallel: bool,
) -> SuiteReport {
    let start = Instant::now();
    let one = |index: usize| {
        let instance = generate_at(suite_index, def, cfg, index);
        let outcome = evaluate(def.check, &instance);
        (index, instance, outcome)
    };
    let results: Vec<(usize, Instance, Outcome)> =
        if parallel { indices.clone().into_par_iter().map(one).collect() } else { indices.clone().map(one).collect() };
    let mut skipped = 0;
    let mut failures = Vec::new();
    for (index, instance, outcome) in results {
        match outcome {
            Outcome::Pass => {}
            Outcome::Skip(_) => skipped += 1,
            Outcome::Fail(message) => {
                let (shrunk, shrunk_message) = if failures.len() < SHRINK_LIMIT {
                    let s = shrink_with(def.check, &instance).unwrap_or_else(|_| instance.clone());
                    let m = match evaluate(def.check, &s) {
                        Outcome::Fail(m) => m,
                        _ => message.clone(),
                    };
                    (s, m)
                } else {
                    (instance.clone(), message.clone())
                };
                failures.push(Failure {
                    index,
                    message,
                    instance,
                    shrunk,
                    shrunk_message,
                    replay: replay_command(def.name, cfg, index),
                });
            }
        }
    }
    SuiteReport {
        suite: def.name.to_owned(),
        config: cfg.clone(),
        instances: indices.len(),
        skipped,
        failures,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(run_suite("bogus", &GenConfig::default()), Err(LawError::UnknownSuite("bogus".into())));
    }

    #[test]
    fn nineteen_suites() {
        assert_eq!(suite_names().len(), 19);
    }

    #[test]
    fn instances_round_trip_through_json() {
        let cfg = GenConfig { seed: 11, ..GenConfig::default() };
        for name in suite_names() {
            for index in [0, 9, 40] {
                let inst = generate_instance(name, &cfg, index).unwrap();
                let text = serde_json::to_string(&inst).unwrap();
                let back: Instance = serde_json::from_str(&text).unwrap();
                assert_eq!(back, inst, "{name} #{index}");
            }
        }
    }

    #[test]
    fn reports_are_deterministic_across_jobs() {
        let cfg = GenConfig { seed: 5, instance_count: 30, ..GenConfig::default() };
        for name in ["v-fubini", "supp-mult", "h-monad"] {
            let mut a = run_suite(name, &cfg).unwrap();
            let mut b = run_suite_jobs(name, &cfg, 3).unwrap();
            a.wall_time_ms = 0;
            b.wall_time_ms = 0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dropping_a_point_restricts_everything() {
        let w = FiniteSpace::lattice_w();
        let inst = Instance {
            spaces: vec![SpaceSpec::of(&w), SpaceSpec::of(&FiniteSpace::sierpinski())],
            maps: vec![MapSpec { from: 1, to: 0, assignment: vec![0, 3] }],
            valuations: vec![PointValues { space: 0, values: vec![Q::one(), Q::zero(), Q::ratio(1, 2), Q::Infinite] }],
            ..Instance::default()
        };
        assert!(inst.without_point(0, 0).is_none());
        let smaller = inst.without_point(0, 1).unwrap();
        let b = smaller.build().unwrap();
        assert_eq!(b.spaces[0].len(), 3);
        assert_eq!(smaller.maps[0].assignment, vec![0, 2]);
        assert_eq!(smaller.valuations[0].values, vec![Q::one(), Q::ratio(1, 2), Q::Infinite]);
    }
}
