//! Seeded law suites shared by the command line and the test suites.
//!
//! Every random law draws trial `i` from its own stream, so a report does not
//! depend on how trials are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{
    associativity_sides, closing_target, compose_arrows, epsilon_naturality, is_mp_unc_map,
    is_ug_map, is_unc_map, monad_counterexample, mu, second_order_pushforward, substitution_check,
    LevelArrow, UgCheck,
};
use crate::choquet::choquet_integral;
use crate::ellsberg::{build_sequence, UrnParams, Variant};
use crate::error::{Error, Result};
use crate::hierarchy::{Level, USequence};
use crate::random::{
    random_act, random_additive, random_capacity, random_comonotonic_pair, random_map,
    random_nonnegative, random_space, random_value, trial_rng, TrialRng,
};
use crate::scalar::{Backend, Rational, Scalar, DEFAULT_TOL, INVARIANT_TOL};
use crate::space::{Act, Capacity, FiniteSpace, PointMap};
use crate::tower::{
    build_tower, projective_consistency, GridTower, ProjectiveVector, TowerElement,
};
use crate::uncertainty::{GTransform, UncertaintySpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Choquet,
    Dirac,
    Monad,
    Substitution,
    Retraction,
    UgMap,
    UncMaps,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Choquet,
        Suite::Dirac,
        Suite::Monad,
        Suite::Substitution,
        Suite::Retraction,
        Suite::UgMap,
        Suite::UncMaps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Choquet => "choquet",
            Suite::Dirac => "dirac",
            Suite::Monad => "monad",
            Suite::Substitution => "substitution",
            Suite::Retraction => "retraction",
            Suite::UgMap => "ug-map",
            Suite::UncMaps => "unc-maps",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown law suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawConfig {
    pub seed: u64,
    pub trials: usize,
    pub grid: u32,
    pub depth: usize,
    pub space_size: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 500,
            grid: 2,
            depth: 3,
            space_size: 2,
        }
    }
}

impl LawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.space_size == 0 {
            return Err(Error::InvalidParams("space size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub trials: usize,
    pub failures: usize,
    pub first_counterexample: Option<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub suite: Suite,
    pub backend: Backend,
    pub passed: bool,
    pub laws: Vec<LawOutcome>,
    pub notes: Vec<String>,
}

impl LawReport {
    fn new(suite: Suite, backend: Backend, laws: Vec<LawOutcome>, notes: Vec<String>) -> Self {
        Self {
            suite,
            backend,
            passed: laws.iter().all(LawOutcome::passed),
            laws,
            notes,
        }
    }

    pub fn law(&self, name: &str) -> Option<&LawOutcome> {
        self.laws.iter().find(|l| l.law == name)
    }
}

/// A single check: `None` when it holds, otherwise a description.
type Check = Result<Option<String>>;

fn tally(law: &str, results: Vec<Check>) -> Result<LawOutcome> {
    let trials = results.len();
    let mut failures = 0;
    let mut first = None;
    for r in results {
        if let Some(desc) = r? {
            failures += 1;
            first.get_or_insert(desc);
        }
    }
    Ok(LawOutcome {
        law: law.to_string(),
        trials,
        failures,
        first_counterexample: first,
    })
}

/// Runs `check` on `trials` independent streams, keeping trial order.
fn seeded(
    law: &str,
    stream: u64,
    cfg: &LawConfig,
    check: impl Fn(&mut TrialRng) -> Check + Sync + Send,
) -> Result<LawOutcome> {
    let results = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| check(&mut trial_rng(cfg.seed, (stream << 32) | i)))
        .collect();
    tally(law, results)
}

fn exhaustive<I: Send>(
    law: &str,
    cases: Vec<I>,
    check: impl Fn(I) -> Check + Sync + Send,
) -> Result<LawOutcome> {
    tally(law, cases.into_par_iter().map(check).collect())
}

fn tolerance<T: Scalar>() -> f64 {
    match T::BACKEND {
        Backend::Rational => 0.0,
        Backend::Float => DEFAULT_TOL,
    }
}

fn show<T: Scalar>(values: &[T]) -> String {
    let parts: Vec<String> = values.iter().map(Scalar::render).collect();
    format!("({})", parts.join(", "))
}

fn mismatch<T: Scalar>(what: String, lhs: &T, rhs: &T) -> Option<String> {
    (!lhs.near(rhs, tolerance::<T>()))
        .then(|| format!("{what}: {} vs {}", lhs.render(), rhs.render()))
}

pub fn run_suite<T: Scalar>(suite: Suite, cfg: &LawConfig) -> Result<LawReport> {
    cfg.validate()?;
    match suite {
        Suite::Choquet => choquet_suite::<T>(cfg),
        Suite::Dirac => dirac_suite::<T>(cfg),
        Suite::Monad => monad_suite::<T>(cfg),
        Suite::Substitution => substitution_suite::<T>(cfg),
        Suite::Retraction => retraction_suite(cfg),
        Suite::UgMap => ug_map_suite::<T>(cfg),
        Suite::UncMaps => unc_maps_suite::<T>(cfg),
    }
}

const MAX_RANDOM_SPACE: usize = 6;

fn choquet_suite<T: Scalar>(cfg: &LawConfig) -> Result<LawReport> {
    let tol = tolerance::<T>();
    let monotone = seeded("monotonicity", 0, cfg, |rng| {
        let x = random_space(rng, 1, MAX_RANDOM_SPACE);
        let u = random_capacity::<T>(rng, &x);
        let f = random_act::<T>(rng, &x);
        let gap: Vec<T> = (0..x.len()).map(|_| random_nonnegative(rng, 3)).collect();
        let g = f.zip_with(&Act::new(&x, gap)?, |a, b| a.clone() - b.clone())?;
        let (i_f, i_g) = (choquet_integral(&u, &f)?, choquet_integral(&u, &g)?);
        let holds = i_f >= i_g || i_f.near(&i_g, tol);
        Ok((!holds).then(|| {
            format!(
                "f = {}, g = {}: I(f) = {} < I(g) = {}",
                show(f.values()),
                show(g.values()),
                i_f.render(),
                i_g.render()
            )
        }))
    })?;
    let comonotone = seeded("comonotonic additivity", 1, cfg, |rng| {
        let x = random_space(rng, 1, MAX_RANDOM_SPACE);
        let u = random_capacity::<T>(rng, &x);
        let (f, g) = random_comonotonic_pair::<T>(rng, &x);
        let lhs = choquet_integral(&u, &f.plus(&g)?)?;
        let rhs = choquet_integral(&u, &f)? + choquet_integral(&u, &g)?;
        Ok(mismatch(
            format!("f = {}, g = {}", show(f.values()), show(g.values())),
            &lhs,
            &rhs,
        ))
    })?;
    let homogeneous = seeded("positive homogeneity", 2, cfg, |rng| {
        let x = random_space(rng, 1, MAX_RANDOM_SPACE);
        let u = random_capacity::<T>(rng, &x);
        let f = random_act::<T>(rng, &x);
        let lambda = T::ratio(rng.gen_range(1..=40), rng.gen_range(1..=8));
        let lhs = choquet_integral(&u, &f.scaled(&lambda))?;
        let rhs = lambda.clone() * choquet_integral(&u, &f)?;
        Ok(mismatch(
            format!("λ = {}, f = {}", lambda.render(), show(f.values())),
            &lhs,
            &rhs,
        ))
    })?;
    let linear = seeded("additive linearity", 3, cfg, |rng| {
        let x = random_space(rng, 1, MAX_RANDOM_SPACE);
        let u = random_additive::<T>(rng, &x);
        let f = random_act::<T>(rng, &x);
        let g = random_act::<T>(rng, &x);
        let a: T = random_value(rng, 3);
        let b: T = random_value(rng, 3);
        let i_f = choquet_integral(&u, &f)?;
        let expectation = f
            .values()
            .iter()
            .zip(u.singletons())
            .fold(T::zero(), |acc, (v, m)| acc + v.clone() * m);
        if let Some(bad) = mismatch(
            format!("expectation of {}", show(f.values())),
            &i_f,
            &expectation,
        ) {
            return Ok(Some(bad));
        }
        let combo = f.scaled(&a).plus(&g.scaled(&b))?;
        let lhs = choquet_integral(&u, &combo)?;
        let rhs = a.clone() * i_f + b.clone() * choquet_integral(&u, &g)?;
        Ok(mismatch(
            format!("a = {}, b = {}", a.render(), b.render()),
            &lhs,
            &rhs,
        ))
    })?;
    Ok(LawReport::new(
        Suite::Choquet,
        T::BACKEND,
        vec![monotone, comonotone, homogeneous, linear],
        vec![format!("random spaces of 1 to {MAX_RANDOM_SPACE} points")],
    ))
}

const DIRAC_MAX: usize = 5;

fn dirac_suite<T: Scalar>(cfg: &LawConfig) -> Result<LawReport> {
    let mut cases = Vec::new();
    for n in 1..=DIRAC_MAX {
        for x in 0..n {
            cases.push((n, x));
        }
    }
    let indicator = exhaustive("dirac value is the indicator", cases, |(n, x)| {
        let space = FiniteSpace::numbered("x", n)?;
        let eta = Capacity::<T>::dirac(&space, x)?;
        for a in 0..space.subset_count() {
            let expected = if a >> x & 1 == 1 { T::one() } else { T::zero() };
            if eta.value(a) != expected {
                return Ok(Some(format!(
                    "|X| = {n}, x = {x}, A = {}",
                    space.mask_to_bits(a)
                )));
            }
        }
        Ok(None)
    })?;
    let evaluation = seeded("dirac integral is evaluation", 10, cfg, |rng| {
        let space = random_space(rng, 1, DIRAC_MAX);
        let x = rng.gen_range(0..space.len());
        let f = random_act::<T>(rng, &space);
        let value = choquet_integral(&Capacity::dirac(&space, x)?, &f)?;
        Ok(mismatch(
            format!("x = {x}, f = {}", show(f.values())),
            &value,
            f.value(x),
        ))
    })?;
    let natural = seeded("dirac naturality", 11, cfg, |rng| {
        let domain = random_space(rng, 1, DIRAC_MAX);
        let codomain = random_space(rng, 1, DIRAC_MAX);
        let h = random_map(rng, &domain, &codomain);
        for x in 0..domain.len() {
            let pushed = Capacity::<T>::dirac(&domain, x)?.pushforward(&h)?;
            if pushed != Capacity::dirac(&codomain, h.apply(x))? {
                return Ok(Some(format!("h = {:?}, x = {x}", h.image())));
            }
        }
        Ok(None)
    })?;
    Ok(LawReport::new(
        Suite::Dirac,
        T::BACKEND,
        vec![indicator, evaluation, natural],
        vec![format!(
            "indicator law checked on every point and subset of spaces up to {DIRAC_MAX} points"
        )],
    ))
}

fn tower_for(cfg: &LawConfig, min_depth: usize) -> Result<GridTower> {
    let base = FiniteSpace::numbered("x", cfg.space_size)?;
    build_tower(&base, cfg.grid, cfg.depth.max(min_depth))
}

fn show_element(e: &TowerElement) -> String {
    format!("level {} {}", e.level, show(&e.masses))
}

fn all_points(t: &GridTower, levels: std::ops::RangeInclusive<usize>) -> Result<Vec<TowerElement>> {
    let mut out = Vec::new();
    for n in levels {
        out.extend(t.points(n)?);
    }
    Ok(out)
}

/// Associativity of `μ` for additive `W` over level 2, computed twice: by the
/// tower's mass formula and through uncertainty spaces built from the levels.
fn associativity_check(
    t: &GridTower,
    x: &UncertaintySpace<Rational>,
    y: &UncertaintySpace<Rational>,
    rng: &mut TrialRng,
) -> Check {
    let w = random_additive::<Rational>(rng, y.capacity_space());
    let (left, right) = associativity_sides(x, y, &w)?;
    let element = TowerElement {
        level: 3,
        masses: w.singletons(),
    };
    let by_tower = t.capacity(&t.mu(&t.mu(&element)?)?)?;
    let by_images =
        (0..y.len()).try_fold(vec![Rational::from_int(0); x.base().len()], |mut acc, j| {
            let inner = t.mu(&TowerElement {
                level: 2,
                masses: y.capacity(j).singletons(),
            })?;
            for (a, m) in acc.iter_mut().zip(&inner.masses) {
                *a += element.masses[j].clone() * m;
            }
            Ok::<_, Error>(acc)
        })?;
    let by_images = Capacity::from_singletons(x.base(), by_images)?;
    Ok(
        (left != right || right != by_tower || left != by_images).then(|| {
            format!(
                "W = {}: μ∘𝔖μ = {}, μ∘μ = {}",
                show(&element.masses),
                show(&left.singletons()),
                show(&right.singletons())
            )
        }),
    )
}

fn monad_suite<T: Scalar>(cfg: &LawConfig) -> Result<LawReport> {
    let t = tower_for(cfg, 3)?;
    let depth = t.depth();
    let unit_left = exhaustive(
        "unit law μ∘η = id",
        all_points(&t, 1..=depth - 1)?,
        |e| {
            let back = t.mu(&t.eta(&e)?)?;
            Ok((back != e).then(|| show_element(&e)))
        },
    )?;
    let unit_right = exhaustive(
        "unit law μ∘𝔖η = id",
        all_points(&t, 1..=depth)?,
        |e| {
            let back = t.mu(&t.push_eta(&e)?)?;
            Ok((back != e).then(|| show_element(&e)))
        },
    )?;
    let x = t.uncertainty_space(1)?;
    let y = t.uncertainty_space(2)?;
    let assoc = seeded("associativity on additive capacities", 20, cfg, |rng| {
        associativity_check(&t, &x, &y, rng)
    })?;

    let mut notes = vec![format!(
        "grid tower over {} points, grid 1/{}, depth {depth}; tower laws are exact",
        cfg.space_size, cfg.grid
    )];
    let expected = [(1.0, T::zero()), (2.0, T::ratio(4, 9))];
    let mut rows = Vec::new();
    for (beta, want) in expected {
        let ce = monad_counterexample::<T>(beta)?;
        let got = T::parse_str(&ce.formula_difference)?;
        let ok = ce.agrees && got.near(&want, tolerance::<T>());
        notes.push(format!(
            "non-additive counterexample at β = {beta}: difference {}, normalized-count difference {}",
            ce.formula_difference, ce.normalized.difference
        ));
        rows.push(Ok((!ok).then(|| {
            format!(
                "β = {beta}: difference {} (expected {})",
                ce.formula_difference,
                want.render()
            )
        })));
    }
    let counterexample = tally("non-additive counterexample reproduced", rows)?;
    Ok(LawReport::new(
        Suite::Monad,
        T::BACKEND,
        vec![unit_left, unit_right, assoc, counterexample],
        notes,
    ))
}

fn substitution_suite<T: Scalar>(cfg: &LawConfig) -> Result<LawReport> {
    let x = FiniteSpace::numbered("x", 4)?;
    let y = FiniteSpace::numbered("y", 3)?;
    let law = seeded("substitution", 30, cfg, |rng| {
        let u = random_capacity::<T>(rng, &x);
        let h = random_map(rng, &x, &y);
        let f = random_act::<T>(rng, &y);
        let out = substitution_check(&u, &h, &f)?;
        let exact = T::parse_str(&out.lhs)?.near(&T::parse_str(&out.rhs)?, tolerance::<T>());
        Ok((!(out.holds && exact)).then(|| {
            format!(
                "h = {:?}, f = {}: {} vs {}",
                h.image(),
                show(f.values()),
                out.lhs,
                out.rhs
            )
        }))
    })?;
    Ok(LawReport::new(
        Suite::Substitution,
        T::BACKEND,
        vec![law],
        vec!["|X| = 4, |Y| = 3, non-additive u".into()],
    ))
}

fn retraction_suite(cfg: &LawConfig) -> Result<LawReport> {
    let t = tower_for(cfg, 2)?;
    let depth = t.depth();
    let mut pairs = Vec::new();
    for n in 1..=depth {
        for m in n..=depth {
            for i in 0..t.level_size(n)? {
                pairs.push((n, m, i));
            }
        }
    }
    let retraction = exhaustive("retraction ι^{m,n}∘ι^{n,m} = id", pairs, |(n, m, i)| {
        let e = t.point(n, i)?;
        let back = t.iota(m, n, &t.iota(n, m, &e)?)?;
        Ok((back != e).then(|| format!("n = {n}, m = {m}, {}", show_element(&e))))
    })?;
    let mut chains = Vec::new();
    for l in 1..=depth {
        for m in 1..=depth {
            for n in 1..=depth {
                if (l >= m && m >= n) || (l <= m && m <= n) {
                    for i in 0..t.level_size(l)? {
                        chains.push((l, m, n, i));
                    }
                }
            }
        }
    }
    let composition =
        exhaustive("composition on monotone chains", chains, |(l, m, n, i)| {
            let e = t.point(l, i)?;
            let two_step = t.iota(m, n, &t.iota(l, m, &e)?)?;
            let direct = t.iota(l, n, &e)?;
            Ok((two_step != direct)
                .then(|| format!("ℓ = {l}, m = {m}, n = {n}, {}", show_element(&e))))
        })?;
    let consistent = exhaustive("η chains are projectively consistent", t.points(1)?, |e| {
        let v = ProjectiveVector::from_eta_chain(&t, &e)?;
        let c = projective_consistency(&t, &v)?;
        Ok((!c.consistent).then(|| show_element(&e)))
    })?;
    let perturbed = exhaustive("perturbed chains are flagged", t.points(1)?, |e| {
        let mut v = ProjectiveVector::from_eta_chain(&t, &e)?;
        let last = v.0.len() - 1;
        let entry = &mut v.0[last];
        let from = entry
            .masses
            .iter()
            .position(|m| *m > Rational::from_int(0))
            .expect("a probability");
        let to = (from + 1) % entry.masses.len();
        let step = Rational::ratio(1, t.grid() as i64);
        entry.masses[from] -= step.clone();
        entry.masses[to] += step;
        let c = projective_consistency(&t, &v)?;
        Ok((c.first_failure != Some(last))
            .then(|| format!("{}: flagged at {:?}", show_element(&e), c.first_failure)))
    })?;
    let note = format!(
        "grid tower over {} points, grid 1/{}, depth {depth}; level sizes {:?}",
        cfg.space_size,
        cfg.grid,
        (0..=depth)
            .map(|n| t.level_size(n))
            .collect::<Result<Vec<_>>>()?
    );
    Ok(LawReport::new(
        Suite::Retraction,
        Backend::Rational,
        vec![retraction, composition, consistent, perturbed],
        vec![note],
    ))
}

fn urn_levels<T: Scalar>(y: &USequence<T>) -> Result<(UncertaintySpace<T>, UncertaintySpace<T>)> {
    match (y.level(0)?, y.level(1)?) {
        (Level::Space(a), Level::Space(b)) => Ok((a.clone(), b.clone())),
        _ => Err(Error::InvalidSequence(
            "urn sequence without two finite levels".into(),
        )),
    }
}

fn ug_map_suite<T: Scalar>(cfg: &LawConfig) -> Result<LawReport> {
    let params = UrnParams::new(2, 2.0, T::ratio(3, 5))?;
    let y = build_sequence(Variant::Y, &params)?;
    let z = build_sequence(Variant::Z, &params)?;
    let (l0, l1) = urn_levels(&y)?;
    let x0 = l0.base().clone();
    let x1 = l1.base().clone();
    let identity = vec![
        LevelArrow::identity(&x0),
        LevelArrow::identity(&x1),
        LevelArrow::identity(l1.capacity_space()),
    ];
    let inclusion = vec![
        LevelArrow::identity(&x0),
        LevelArrow::identity(&x1),
        LevelArrow::IntoFamily {
            domain: l1.capacity_space().clone(),
            params: vec![T::ratio(1, 2)],
        },
    ];
    let swap = vec![
        LevelArrow::Points(PointMap::from_labels(
            x0.clone(),
            x0.clone(),
            &["R", "Y", "B"],
        )?),
        LevelArrow::Points(PointMap::new(
            x1.clone(),
            x1.clone(),
            (0..x1.len()).rev().collect(),
        )?),
        LevelArrow::identity(l1.capacity_space()),
    ];
    let composed = compose_arrows(&swap, &inclusion)?;
    let mut wrong = inclusion.clone();
    wrong[2] = LevelArrow::IntoFamily {
        domain: l1.capacity_space().clone(),
        params: vec![T::ratio(1, 3)],
    };

    let mut transforms = vec![
        GTransform::linear(T::one())?,
        GTransform::linear(T::ratio(5, 2))?,
    ];
    if T::BACKEND == Backend::Float {
        transforms.push(GTransform::entropic(1.0)?);
    }
    let check = UgCheck {
        depth: 3,
        random_acts: cfg.trials,
        seed: cfg.seed,
    };
    type Case<'a, T> = (&'a str, &'a Vec<LevelArrow<T>>, &'a USequence<T>, bool);
    let cases: [Case<T>; 5] = [
        ("identity", &identity, &y, true),
        ("inclusion at the midpoint member", &inclusion, &z, true),
        ("colour swap automorphism", &swap, &y, true),
        ("composition of passing maps", &composed, &z, true),
        ("wrong family member is rejected", &wrong, &z, false),
    ];
    let mut laws = Vec::new();
    for (name, phi, target, expected) in cases {
        let rows = transforms
            .iter()
            .map(|g| {
                let w = is_ug_map(phi, &y, target, g, &check)?;
                Ok((w.verdict != expected)
                    .then(|| format!("G = {g:?}: verdict {} ({:?})", w.verdict, w.failure)))
            })
            .collect();
        laws.push(tally(name, rows)?);
    }
    Ok(LawReport::new(
        Suite::UgMap,
        T::BACKEND,
        laws,
        vec![format!(
            "each map is tested on every indicator act plus {} seeded random acts; exhaustive only for additive capacities",
            cfg.trials
        )],
    ))
}

/// A random uncertainty space on `base` with distinct capacities, some of
/// them non-additive.
fn random_uncertainty<T: Scalar>(
    rng: &mut TrialRng,
    base: &FiniteSpace,
    max_count: usize,
) -> Result<UncertaintySpace<T>> {
    let wanted = rng.gen_range(1..=max_count);
    let mut list: Vec<Capacity<T>> = Vec::new();
    for _ in 0..wanted {
        let c = if rng.gen_bool(0.5) {
            random_additive(rng, base)
        } else {
            random_capacity(rng, base)
        };
        if !list.iter().any(|d| d.near(&c, INVARIANT_TOL)) {
            list.push(c);
        }
    }
    let entries = list
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("u{i}"), c))
        .collect();
    UncertaintySpace::new(base, entries)
}

const UNC_MAX_SPACE: usize = 4;

fn unc_maps_suite<T: Scalar>(cfg: &LawConfig) -> Result<LawReport> {
    let draw = |rng: &mut TrialRng| -> Result<(UncertaintySpace<T>, PointMap)> {
        let bx = random_space(rng, 1, UNC_MAX_SPACE);
        let by = random_space(rng, 1, UNC_MAX_SPACE);
        let x = random_uncertainty::<T>(rng, &bx, 3)?;
        Ok((x, random_map(rng, &bx, &by)))
    };
    let implies = seeded("mpUnc maps are Unc maps", 40, cfg, |rng| {
        let (x, h) = draw(rng)?;
        let y = if rng.gen_bool(0.5) {
            closing_target(rng, &h, &x, 2)?
        } else {
            random_uncertainty(rng, h.codomain(), 3)?
        };
        let mp = is_mp_unc_map(&h, &x, &y)?.verdict;
        Ok((mp && !is_unc_map(&h, &x, &y)?.verdict).then(|| format!("h = {:?}", h.image())))
    })?;
    let closed = seeded("composition closure", 41, cfg, |rng| {
        let (x, h) = draw(rng)?;
        let bz = random_space(rng, 1, UNC_MAX_SPACE);
        let j = random_map(rng, h.codomain(), &bz);
        let jh = h.then(&j)?;
        let y = closing_target(rng, &h, &x, 1)?;
        let z = closing_target(rng, &j, &y, 1)?;
        if !is_mp_unc_map(&jh, &x, &z)?.verdict {
            return Ok(Some(format!(
                "mpUnc: h = {:?}, j = {:?}",
                h.image(),
                j.image()
            )));
        }
        let y2 = random_uncertainty(rng, h.codomain(), 3)?;
        let z2 = random_uncertainty(rng, &bz, 3)?;
        let both = is_unc_map(&h, &x, &y2)?.verdict && is_unc_map(&j, &y2, &z2)?.verdict;
        Ok((both && !is_unc_map(&jh, &x, &z2)?.verdict)
            .then(|| format!("Unc: h = {:?}, j = {:?}", h.image(), j.image())))
    })?;
    let epsilon = seeded("ε naturality", 42, cfg, |rng| {
        let (x, h) = draw(rng)?;
        let y = closing_target(rng, &h, &x, 2)?;
        Ok((!epsilon_naturality(&h, &x, &y)?).then(|| format!("h = {:?}", h.image())))
    })?;
    let averaging = seeded("μ naturality", 43, cfg, |rng| {
        let (x, h) = draw(rng)?;
        let y = closing_target(rng, &h, &x, 2)?;
        let v = random_capacity::<T>(rng, x.capacity_space());
        let lhs = mu(&x, &v)?.pushforward(&h)?;
        let rhs = mu(&y, &second_order_pushforward(&h, &x, &y, &v)?)?;
        Ok((!lhs.near(&rhs, tolerance::<T>())).then(|| format!("h = {:?}", h.image())))
    })?;
    Ok(LawReport::new(
        Suite::UncMaps,
        T::BACKEND,
        vec![implies, closed, epsilon, averaging],
        vec![format!(
            "random spaces of 1 to {UNC_MAX_SPACE} points with up to three capacities"
        )],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LawConfig {
        LawConfig {
            trials: 40,
            ..LawConfig::default()
        }
    }

    #[test]
    fn every_suite_passes_exactly() {
        for suite in Suite::ALL {
            let report = run_suite::<Rational>(suite, &small()).unwrap();
            assert!(report.passed, "{suite}: {report:?}");
        }
    }

    #[test]
    fn float_suites_pass() {
        for suite in [
            Suite::Choquet,
            Suite::Substitution,
            Suite::UgMap,
            Suite::UncMaps,
        ] {
            assert!(run_suite::<f64>(suite, &small()).unwrap().passed, "{suite}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite::<Rational>(Suite::Choquet, &small()).unwrap();
        let b = run_suite::<Rational>(Suite::Choquet, &small()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
