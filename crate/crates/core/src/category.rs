//! Arrows between uncertainty spaces, the Dirac unit `η`, the averaging map
//! `μ`, and finite checks of the monad and U^G-map laws.

use rand::Rng;
use serde::Serialize;

use crate::choquet::{choquet_integral, choquet_with};
use crate::error::{Error, Result};
use crate::hierarchy::{Level, USequence};
use crate::random::{random_act, trial_rng};
use crate::scalar::{Backend, Scalar, DEFAULT_TOL, INVARIANT_TOL};
use crate::space::{full_mask, Act, Capacity, FiniteSpace, PointMap};
use crate::uncertainty::{GTransform, UncertaintySpace};

/// A capacity over the capacity names of an uncertainty space.
pub type SecondOrderCapacity<T> = Capacity<T>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MapFailure {
    /// No target capacity dominates source capacity `source`.
    /// `killers[j]` is a set `C` with `v_j(C) = 0 < u(h⁻¹(C))`.
    NotDominated { source: usize, killers: Vec<u64> },
    /// The pushforward of source capacity `source` is not in the target list.
    NoMatch { source: usize },
    /// `I^u(G∘f∘φ_n) ≠ I^{φ_{n+1}(u)}(G∘f)`.
    UgLaw {
        level: usize,
        source: usize,
        act: Vec<String>,
        lhs: String,
        rhs: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapWitness {
    pub verdict: bool,
    /// For a success, the index of a matching or dominating target capacity
    /// per source capacity.
    pub chosen: Vec<usize>,
    pub failure: Option<MapFailure>,
}

impl MapWitness {
    fn success(chosen: Vec<usize>) -> Self {
        Self {
            verdict: true,
            chosen,
            failure: None,
        }
    }

    fn failed(failure: MapFailure) -> Self {
        Self {
            verdict: false,
            chosen: Vec::new(),
            failure: Some(failure),
        }
    }

    /// Re-evaluates a reported Unc failure against the spaces.
    pub fn confirms_unc_failure<T: Scalar>(
        &self,
        h: &PointMap,
        x: &UncertaintySpace<T>,
        y: &UncertaintySpace<T>,
    ) -> bool {
        let Some(MapFailure::NotDominated { source, killers }) = &self.failure else {
            return false;
        };
        let u = x.capacity(*source);
        killers.len() == y.len()
            && killers.iter().zip(y.capacities()).all(|(&c, v)| {
                v.value(c).is_negligible() && !u.value(h.preimage(c)).is_negligible()
            })
    }
}

fn check_arrow<T: Scalar>(
    h: &PointMap,
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
) -> Result<()> {
    if h.domain() != x.base() || h.codomain() != y.base() {
        return Err(Error::SpaceMismatch(
            "map does not connect the two base spaces",
        ));
    }
    x.base().check_masks()?;
    y.base().check_masks()
}

/// The first `C ⊆ Y` with `v(C) = 0` and `u(h⁻¹(C)) > 0`.
fn killer<T: Scalar>(h: &PointMap, u: &Capacity<T>, v: &Capacity<T>) -> Option<u64> {
    let kills = |c: u64| v.value(c).is_negligible() && !u.value(h.preimage(c)).is_negligible();
    match v.masses() {
        Some(masses) => {
            let null = masses
                .iter()
                .enumerate()
                .filter(|(_, m)| m.is_negligible())
                .fold(0u64, |acc, (i, _)| acc | (1 << i));
            kills(null).then_some(null)
        }
        None => (1..=full_mask(v.space().len())).find(|&c| kills(c)),
    }
}

/// Whether every `u ∈ U_X` has some `v ∈ U_Y` with `u ∘ h⁻¹ ≪ v`.
pub fn is_unc_map<T: Scalar>(
    h: &PointMap,
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
) -> Result<MapWitness> {
    check_arrow(h, x, y)?;
    let mut chosen = Vec::with_capacity(x.len());
    for (source, u) in x.capacities().iter().enumerate() {
        let killers: Vec<Option<u64>> = y.capacities().iter().map(|v| killer(h, u, v)).collect();
        match killers.iter().position(Option::is_none) {
            Some(j) => chosen.push(j),
            None => {
                return Ok(MapWitness::failed(MapFailure::NotDominated {
                    source,
                    killers: killers.into_iter().flatten().collect(),
                }))
            }
        }
    }
    Ok(MapWitness::success(chosen))
}

/// Whether every pushforward `u ∘ h⁻¹` is itself a member of `U_Y`.
pub fn is_mp_unc_map<T: Scalar>(
    h: &PointMap,
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
) -> Result<MapWitness> {
    check_arrow(h, x, y)?;
    let mut chosen = Vec::with_capacity(x.len());
    for (source, u) in x.capacities().iter().enumerate() {
        let pushed = u.pushforward(h)?;
        match y
            .capacities()
            .iter()
            .position(|v| v.near(&pushed, INVARIANT_TOL))
        {
            Some(j) => chosen.push(j),
            None => return Ok(MapWitness::failed(MapFailure::NoMatch { source })),
        }
    }
    Ok(MapWitness::success(chosen))
}

/// `𝔖h : U_X → U_Y`, `u ↦ u ∘ h⁻¹`, defined when `h` is an mpUnc-map.
pub fn induced_map<T: Scalar>(
    h: &PointMap,
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
) -> Result<PointMap> {
    let witness = is_mp_unc_map(h, x, y)?;
    if !witness.verdict {
        return Err(Error::InvalidParams(
            "pushforwards leave the target capacity list".into(),
        ));
    }
    PointMap::new(
        x.capacity_space().clone(),
        y.capacity_space().clone(),
        witness.chosen,
    )
}

/// `η(x)`, the Dirac capacity at point `x`.
pub fn dirac<T: Scalar>(space: &FiniteSpace, x: &str) -> Result<Capacity<T>> {
    Capacity::dirac(space, space.index_of(x)?)
}

/// Whether every Dirac capacity on the base belongs to `U_X`.
pub fn embedding_condition<T: Scalar>(x: &UncertaintySpace<T>) -> Result<bool> {
    for i in 0..x.base().len() {
        let d = Capacity::dirac(x.base(), i)?;
        if !x.capacities().iter().any(|u| u.near(&d, INVARIANT_TOL)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionFailure {
    pub target: String,
    pub subset: u64,
    /// 1: `v({w : w(A) ∈ {0,1}}) > 0`; 2: `u(X∖A) > 0 ⟹ v({w : w(A) = 0}) > 0`;
    /// 3: `u(A) > 0 ⟹ v({w : w(A) = 1}) > 0`.
    pub condition: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbDiracRow {
    pub capacity: String,
    /// Names of the `v ∈ U_Y` meeting all three conditions for every `A`.
    pub satisfied_by: Vec<String>,
    /// First failure for each `v` that misses.
    pub failures: Vec<ConditionFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbDiracReport {
    pub rows: Vec<EmbDiracRow>,
    pub all_hold: bool,
}

/// The three conditions on a second-order space `𝔜` over `U_X`.
pub fn emb_dirac_conditions<T: Scalar>(
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
) -> Result<EmbDiracReport> {
    if y.base().labels() != x.capacity_space().labels() {
        return Err(Error::SpaceMismatch(
            "second-order space must sit over the capacity list",
        ));
    }
    if !embedding_condition(x)? {
        return Err(Error::InvalidParams("the embedding condition fails".into()));
    }
    x.base().check_masks()?;
    y.base().check_masks()?;
    let full = x.base().full_mask();
    let ws = x.capacities();
    let with = |a: u64, pred: &dyn Fn(&T) -> bool| -> u64 {
        ws.iter()
            .enumerate()
            .filter(|(_, w)| pred(&w.value(a)))
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    };
    let is_zero = |t: &T| t.is_negligible();
    let is_one = |t: &T| t.near(&T::one(), INVARIANT_TOL);
    let positive = |t: &T| !t.is_negligible();
    let mut rows = Vec::with_capacity(x.len());
    for (ui, u) in ws.iter().enumerate() {
        let mut satisfied_by = Vec::new();
        let mut failures = Vec::new();
        for (vi, v) in y.capacities().iter().enumerate() {
            let first = (0..=full).find_map(|a| {
                let zero = with(a, &is_zero);
                let one = with(a, &is_one);
                if !positive(&v.value(zero | one)) {
                    Some((a, 1))
                } else if positive(&u.value(full & !a)) && !positive(&v.value(zero)) {
                    Some((a, 2))
                } else if positive(&u.value(a)) && !positive(&v.value(one)) {
                    Some((a, 3))
                } else {
                    None
                }
            });
            match first {
                None => satisfied_by.push(y.capacity_space().label(vi).to_string()),
                Some((subset, condition)) => failures.push(ConditionFailure {
                    target: y.capacity_space().label(vi).to_string(),
                    subset,
                    condition,
                }),
            }
        }
        rows.push(EmbDiracRow {
            capacity: x.capacity_space().label(ui).to_string(),
            satisfied_by,
            failures,
        });
    }
    let all_hold = rows.iter().all(|r| !r.satisfied_by.is_empty());
    Ok(EmbDiracReport { rows, all_hold })
}

/// `μ(v)(A) = I^v(ε(A))`.
pub fn mu<T: Scalar>(x: &UncertaintySpace<T>, v: &SecondOrderCapacity<T>) -> Result<Capacity<T>> {
    if v.space().labels() != x.capacity_space().labels() {
        return Err(Error::SpaceMismatch(
            "second-order capacity over another capacity list",
        ));
    }
    let base = x.base();
    if let Some(weights) = v.masses() {
        let mut masses = vec![T::zero(); base.len()];
        let mut additive = true;
        for (w, u) in weights.iter().zip(x.capacities()) {
            let Some(inner) = u.masses() else {
                additive = false;
                break;
            };
            for (m, s) in masses.iter_mut().zip(inner) {
                *m = m.clone() + w.clone() * s.clone();
            }
        }
        if additive {
            return Capacity::from_singletons(base, masses);
        }
    }
    base.check_dense()?;
    let names = v.space();
    let table = (0..base.subset_count())
        .map(|a| {
            let eps = Act::new(names, x.capacities().iter().map(|u| u.value(a)).collect())?;
            choquet_integral(v, &eps)
        })
        .collect::<Result<Vec<T>>>()?;
    Capacity::from_table(base, table)
}

/// `η_{𝔖X}(u)`: the Dirac over the capacity list at `u`.
pub fn unit<T: Scalar>(x: &UncertaintySpace<T>, index: usize) -> Result<SecondOrderCapacity<T>> {
    Capacity::dirac(x.capacity_space(), index)
}

/// Both sides of `μ ∘ 𝔖μ = μ ∘ μ𝔖` for `w` over the capacities of `y`,
/// where `y` sits over the capacity list of `x`.
///
/// Returns `(μ(𝔖μ(w)), μ(μ(w)))`.
pub fn associativity_sides<T: Scalar>(
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
    w: &Capacity<T>,
) -> Result<(Capacity<T>, Capacity<T>)> {
    let inner = mu(y, w)?;
    let right = mu(x, &inner)?;
    let images = y
        .capacities()
        .iter()
        .map(|v| mu(x, v))
        .collect::<Result<Vec<_>>>()?;
    let mut distinct: Vec<Capacity<T>> = Vec::new();
    let mut image = Vec::with_capacity(images.len());
    for c in images {
        match distinct.iter().position(|d| d.near(&c, INVARIANT_TOL)) {
            Some(j) => image.push(j),
            None => {
                image.push(distinct.len());
                distinct.push(c);
            }
        }
    }
    let entries = distinct
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("m{i}"), c))
        .collect();
    let averaged = UncertaintySpace::new(x.base(), entries)?;
    let along = PointMap::new(
        y.capacity_space().clone(),
        averaged.capacity_space().clone(),
        image,
    )?;
    let pushed = w.relabel(y.capacity_space())?.pushforward(&along)?;
    let left = mu(&averaged, &pushed)?;
    Ok((left, right))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubstitutionOutcome {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// `I_X^u(f ∘ h) = I_Y^{u ∘ h⁻¹}(f)`.
pub fn substitution_check<T: Scalar>(
    u: &Capacity<T>,
    h: &PointMap,
    f: &Act<T>,
) -> Result<SubstitutionOutcome> {
    let lhs = choquet_integral(u, &f.precompose(h)?)?;
    let rhs = choquet_integral(&u.pushforward(h)?, f)?;
    Ok(SubstitutionOutcome {
        holds: lhs.near(&rhs, DEFAULT_TOL),
        lhs: lhs.render(),
        rhs: rhs.render(),
    })
}

/// The two integrals and their difference `I^v(ξ(f)) − I^{μ(v)}(f)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonadSides {
    pub mu_side: String,
    pub xi_side: String,
    pub difference: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonadCounterexample {
    pub beta: f64,
    pub backend: Backend,
    /// First principles with `v(A) = (#A / 3)^β`, the count used in the
    /// printed closed forms.
    pub printed_count: MonadSides,
    /// The printed closed forms evaluated directly.
    pub closed_form: MonadSides,
    /// `(2^β − 3^β + 5^β − 2·6^β + 8^β) / (3·3^β)`.
    pub formula_difference: String,
    /// First principles with the true count `#U = 10`, so `v` is normalized.
    pub normalized: MonadSides,
    /// Printed-count first principles, closed forms and formula all agree.
    pub agrees: bool,
}

const CE_N: i64 = 3;
const CE_A: i64 = 2;
const CE_B: i64 = 1;

fn pow_beta<T: Scalar>(base: T, beta: f64) -> Result<T> {
    if beta.fract() == 0.0 && beta <= u32::MAX as f64 {
        return Ok(base.pow_u32(beta as u32));
    }
    if T::BACKEND == Backend::Rational {
        return Err(Error::Backend(format!("power {beta}")));
    }
    let v = base.as_f64().powf(beta);
    T::from_f64(v).ok_or_else(|| Error::Overflow(v.to_string()))
}

fn first_principles<T: Scalar>(count: i64, beta: f64) -> Result<MonadSides> {
    let x = FiniteSpace::new(["R", "B", "Y"])?;
    let mut entries = Vec::new();
    for i in 0..=CE_N {
        for j in 0..=(CE_N - i) {
            let masses = vec![
                T::ratio(i, CE_N),
                T::ratio(j, CE_N),
                T::ratio(CE_N - i - j, CE_N),
            ];
            entries.push((format!("u{i}{j}"), Capacity::from_singletons(&x, masses)?));
        }
    }
    let space = UncertaintySpace::new(&x, entries)?;
    let size = space.len();
    let powers = (0..=size)
        .map(|k| pow_beta(T::ratio(k as i64, count), beta))
        .collect::<Result<Vec<T>>>()?;
    let v = |mask: u64| powers[mask.count_ones() as usize].clone();
    let f = Act::new(
        &x,
        vec![T::from_int(CE_A + CE_B), T::from_int(CE_B), T::zero()],
    )?;

    let mu_table = (0..x.subset_count())
        .map(|a| choquet_with(v, &space.epsilon(&x.subset(a)?)?))
        .collect::<Result<Vec<T>>>()?;
    let mu_side = choquet_with(|a| mu_table[a as usize].clone(), &f)?;
    let xi_side = choquet_with(v, &space.xi(&f)?)?;
    Ok(MonadSides {
        difference: (xi_side.clone() - mu_side.clone()).render(),
        mu_side: mu_side.render(),
        xi_side: xi_side.render(),
    })
}

/// The non-additive `v` over ten additive capacities on `{R, B, Y}` for
/// which `μ` is not associative, with `f = (3, 1, 0)`.
pub fn monad_counterexample<T: Scalar>(beta: f64) -> Result<MonadCounterexample> {
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "beta must be >= 1, got {beta}"
        )));
    }
    let p = |k: i64| pow_beta(T::from_int(k), beta);
    let scale = T::one() / (T::from_int(3) * p(3)?);
    let mu_cf = scale.clone() * (T::from_int(2) * (p(6)? + p(3)? + p(1)?) + p(9)? + p(7)? + p(4)?);
    let xi_cf = scale.clone()
        * (T::from_int(2) * p(1)? + p(2)? + p(3)? + p(4)? + p(5)? + p(7)? + p(8)? + p(9)?);
    let formula = scale * (p(2)? - p(3)? + p(5)? - T::from_int(2) * p(6)? + p(8)?);
    let closed_form = MonadSides {
        difference: (xi_cf.clone() - mu_cf.clone()).render(),
        mu_side: mu_cf.render(),
        xi_side: xi_cf.render(),
    };
    let printed_count = first_principles::<T>(CE_N * (CE_N - 1) / 2, beta)?;
    let normalized = first_principles::<T>((CE_N + 1) * (CE_N + 2) / 2, beta)?;
    let same = |a: &str, b: &str| -> Result<bool> {
        Ok(T::parse_str(a)?.near(&T::parse_str(b)?, DEFAULT_TOL))
    };
    let agrees = same(&printed_count.mu_side, &closed_form.mu_side)?
        && same(&printed_count.xi_side, &closed_form.xi_side)?
        && same(&printed_count.difference, &formula.render())?
        && same(&closed_form.difference, &formula.render())?;
    Ok(MonadCounterexample {
        beta,
        backend: T::BACKEND,
        printed_count,
        closed_form,
        formula_difference: formula.render(),
        normalized,
        agrees,
    })
}

/// One component `φ_n : X_n → Y_n` of a map between U-sequences.
#[derive(Clone, Debug)]
pub enum LevelArrow<T> {
    Points(PointMap),
    /// Sends point `i` of `domain` to the family member `v_{params[i]}`.
    IntoFamily {
        domain: FiniteSpace,
        params: Vec<T>,
    },
}

impl<T: Scalar> LevelArrow<T> {
    pub fn identity(space: &FiniteSpace) -> Self {
        LevelArrow::Points(PointMap::identity(space))
    }
}

/// Level-wise `second ∘ first`.
pub fn compose_arrows<T: Scalar>(
    first: &[LevelArrow<T>],
    second: &[LevelArrow<T>],
) -> Result<Vec<LevelArrow<T>>> {
    if first.len() != second.len() {
        return Err(Error::Length {
            expected: first.len(),
            found: second.len(),
        });
    }
    first
        .iter()
        .zip(second)
        .map(|(a, b)| match (a, b) {
            (LevelArrow::Points(f), LevelArrow::Points(g)) => Ok(LevelArrow::Points(f.then(g)?)),
            (LevelArrow::Points(f), LevelArrow::IntoFamily { domain, params }) => {
                if f.codomain() != domain {
                    return Err(Error::SpaceMismatch("arrow composition"));
                }
                Ok(LevelArrow::IntoFamily {
                    domain: f.domain().clone(),
                    params: f.image().iter().map(|&j| params[j].clone()).collect(),
                })
            }
            (LevelArrow::IntoFamily { .. }, _) => Err(Error::InvalidParams(
                "cannot compose after a map into a family level".into(),
            )),
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct UgCheck {
    pub depth: usize,
    pub random_acts: usize,
    pub seed: u64,
}

impl Default for UgCheck {
    fn default() -> Self {
        Self {
            depth: 3,
            random_acts: 50,
            seed: 0,
        }
    }
}

const INDICATOR_LIMIT: usize = 12;

/// Checks `I^u(G ∘ f ∘ φ_n) = I^{φ_{n+1}(u)}(G ∘ f)` for `n < depth − 1`,
/// every `u ∈ U_{X_n}`, and `f` ranging over all indicators of `Y_n` plus
/// seeded random acts. Exhaustive only for additive capacities.
pub fn is_ug_map<T: Scalar>(
    phi: &[LevelArrow<T>],
    xs: &USequence<T>,
    ys: &USequence<T>,
    g: &GTransform<T>,
    check: &UgCheck,
) -> Result<MapWitness> {
    if phi.len() != check.depth {
        return Err(Error::Length {
            expected: check.depth,
            found: phi.len(),
        });
    }
    let tol = match T::BACKEND {
        Backend::Rational => 0.0,
        Backend::Float => DEFAULT_TOL,
    };
    for n in 0..check.depth.saturating_sub(1) {
        let Level::Space(source) = xs.level(n)? else {
            return Err(Error::InvalidParams(format!(
                "level {n} of the source must be an uncertainty space"
            )));
        };
        let target_base = match ys.level(n)? {
            Level::Space(t) => t.base().clone(),
            Level::Family(fam) => fam.base().clone(),
            _ => {
                return Err(Error::InvalidParams(format!(
                    "level {n} of the target has no finite points"
                )))
            }
        };
        let LevelArrow::Points(here) = &phi[n] else {
            return Err(Error::InvalidParams(format!("φ_{n} must be a point map")));
        };
        if here.domain() != source.base() || here.codomain() != &target_base {
            return Err(Error::SpaceMismatch("φ_n does not connect level n"));
        }
        let images = (0..source.len())
            .map(|i| arrow_image(&phi[n + 1], source, ys.level(n)?, i))
            .collect::<Result<Vec<_>>>()?;

        let mut acts: Vec<Act<T>> = Vec::new();
        if target_base.len() <= INDICATOR_LIMIT {
            for mask in 0..target_base.subset_count() {
                acts.push(Act::indicator(&target_base.subset(mask)?));
            }
        } else {
            for i in 0..target_base.len() {
                acts.push(Act::indicator(&target_base.singleton(i)));
            }
        }
        let mut rng = trial_rng(check.seed, n as u64);
        acts.extend((0..check.random_acts).map(|_| random_act(&mut rng, &target_base)));

        for f in &acts {
            let gf = f.try_map(|t| g.forward(t))?;
            let pulled = gf.precompose(here)?;
            for (i, (u, image)) in source.capacities().iter().zip(&images).enumerate() {
                let lhs = choquet_integral(u, &pulled)?;
                let rhs = choquet_integral(image, &gf)?;
                if !lhs.near(&rhs, tol) {
                    return Ok(MapWitness::failed(MapFailure::UgLaw {
                        level: n,
                        source: i,
                        act: f.values().iter().map(Scalar::render).collect(),
                        lhs: lhs.render(),
                        rhs: rhs.render(),
                    }));
                }
            }
        }
    }
    Ok(MapWitness::success(Vec::new()))
}

/// `φ_{n+1}(u_i)` as a capacity on `Y_n`.
fn arrow_image<T: Scalar>(
    arrow: &LevelArrow<T>,
    source: &UncertaintySpace<T>,
    target: &Level<T>,
    i: usize,
) -> Result<Capacity<T>> {
    match (arrow, target) {
        (LevelArrow::Points(map), Level::Space(t)) => {
            if map.domain() != source.capacity_space() || map.codomain() != t.capacity_space() {
                return Err(Error::SpaceMismatch(
                    "φ_{n+1} does not connect the capacity lists",
                ));
            }
            Ok(t.capacity(map.apply(i)).clone())
        }
        (LevelArrow::IntoFamily { domain, params }, Level::Family(fam)) => {
            if domain != source.capacity_space() || params.len() != domain.len() {
                return Err(Error::SpaceMismatch(
                    "φ_{n+1} does not start at the capacity list",
                ));
            }
            fam.family_at(&params[i])
        }
        _ => Err(Error::InvalidParams(
            "φ_{n+1} does not match the target level".into(),
        )),
    }
}

/// Seeded Choquet integral check of `ε(B) ∘ 𝔖h = ε(h⁻¹(B))` for every `B`.
pub fn epsilon_naturality<T: Scalar>(
    h: &PointMap,
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
) -> Result<bool> {
    let induced = induced_map(h, x, y)?;
    for b in 0..y.base().subset_count() {
        let subset = y.base().subset(b)?;
        let lhs = y.epsilon(&subset)?.precompose(&induced)?;
        let rhs = x.epsilon(&h.preimage_of(&subset)?)?;
        if !lhs.near(&rhs, INVARIANT_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pushforward of `v` along `𝔖h`, as a capacity over `U_Y`.
pub fn second_order_pushforward<T: Scalar>(
    h: &PointMap,
    x: &UncertaintySpace<T>,
    y: &UncertaintySpace<T>,
    v: &SecondOrderCapacity<T>,
) -> Result<SecondOrderCapacity<T>> {
    v.pushforward(&induced_map(h, x, y)?)
}

/// Random draw helper shared by the law suites: a target space whose list
/// contains every pushforward of `x` along `h`, so `h` is an mpUnc-map.
pub fn closing_target<T: Scalar>(
    rng: &mut impl Rng,
    h: &PointMap,
    x: &UncertaintySpace<T>,
    extra: usize,
) -> Result<UncertaintySpace<T>> {
    let mut list: Vec<Capacity<T>> = Vec::new();
    let mut push = |c: Capacity<T>| {
        if !list.iter().any(|d| d.near(&c, INVARIANT_TOL)) {
            list.push(c);
        }
    };
    for u in x.capacities() {
        push(u.pushforward(h)?);
    }
    for _ in 0..extra {
        push(crate::random::random_additive(rng, h.codomain()));
    }
    let entries = list
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("v{i}"), c))
        .collect();
    UncertaintySpace::new(h.codomain(), entries)
}
