//! U-sequences of uncertainty spaces, iterated expectations `ξ^{m,n}`,
//! value functions and integration over parameterized capacity families.

use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;

use crate::choquet::choquet_integral;
use crate::error::{Error, Result};
use crate::scalar::{binomial_scalar, Scalar, DEFAULT_TOL, INVARIANT_TOL};
use crate::space::{Act, Capacity, FiniteSpace, Subset};
use crate::uncertainty::UncertaintySpace;

pub const TERMINAL_POINT: &str = "*";

/// One point `*` carrying the single capacity `\bar{*}`.
pub fn terminal_space<T: Scalar>() -> UncertaintySpace<T> {
    let base = FiniteSpace::new([TERMINAL_POINT]).expect("one label");
    let star = Capacity::dirac(&base, 0).expect("one point");
    UncertaintySpace::new(&base, vec![(TERMINAL_POINT, star)]).expect("one capacity")
}

/// `(A; f, g)`: `f` on `A`, `g` elsewhere.
pub fn conditional_act<T: Scalar>(a: &Subset, f: &Act<T>, g: &Act<T>) -> Result<Act<T>> {
    if f.space() != a.space() || g.space() != a.space() {
        return Err(Error::SpaceMismatch("conditional act operands"));
    }
    let values = (0..f.len())
        .map(|i| {
            if a.contains(i) {
                f.value(i).clone()
            } else {
                g.value(i).clone()
            }
        })
        .collect();
    Act::new(a.space(), values)
}

#[derive(Clone, Debug, PartialEq)]
pub enum UtilityFunction<T> {
    /// `𝔲(x) = 1 − e^{−x}`.
    Exp1,
    /// `𝔲(x) = u1·x`, so `𝔲(0) = 0` and `𝔲(1) = u1`.
    Anchored(T),
}

impl<T: Scalar> UtilityFunction<T> {
    pub fn anchored(u1: T) -> Result<Self> {
        if u1 <= T::zero() || u1 >= T::one() {
            return Err(Error::InvalidParams(format!(
                "utility anchor must lie in (0, 1), got {}",
                u1.render()
            )));
        }
        Ok(UtilityFunction::Anchored(u1))
    }

    pub fn apply(&self, x: &T) -> Result<T> {
        match self {
            UtilityFunction::Exp1 => {
                let v = 1.0 - (-x.as_f64()).exp();
                T::from_f64(v).ok_or_else(|| Error::Overflow(format!("1 - exp(-{})", x.render())))
            }
            UtilityFunction::Anchored(u1) => Ok(u1.clone() * x.clone()),
        }
    }

    pub fn u1(&self) -> T {
        self.apply(&T::one()).expect("finite at 1")
    }
}

type MassFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum FamilyKind {
    /// `v_p({k}) = C(n,k) p^k (1−p)^{n−k}` over `n + 1` points.
    Binomial { trials: u32 },
    /// Singleton masses as a function of `p`, renormalized to sum to one.
    Generic { label: String, masses: MassFn },
}

impl fmt::Debug for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Binomial { trials } => write!(f, "Binomial({trials})"),
            FamilyKind::Generic { label, .. } => write!(f, "Generic({label})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weight<T> {
    /// Lebesgue measure on `[0, 1]`.
    Lebesgue,
    /// Finitely many `(p, mass)` atoms.
    Discrete(Vec<(T, T)>),
}

/// A family `p ↦ v_p` of additive capacities on the previous level's
/// capacity names, integrated against a weight on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct FamilyLevel<T> {
    base: FiniteSpace,
    kind: FamilyKind,
    weight: Weight<T>,
    weight_space: FiniteSpace,
}

const FAMILY_SAMPLES: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];
const GENERIC_NODES: usize = 24;

impl<T: Scalar> FamilyLevel<T> {
    pub fn binomial(base: &FiniteSpace, weight_name: &str) -> Result<Self> {
        let trials = u32::try_from(base.len() - 1)
            .map_err(|_| Error::InvalidParams("binomial family too large".into()))?;
        Self::build(base, FamilyKind::Binomial { trials }, weight_name)
    }

    pub fn generic(
        base: &FiniteSpace,
        label: impl Into<String>,
        masses: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        weight_name: &str,
    ) -> Result<Self> {
        let kind = FamilyKind::Generic {
            label: label.into(),
            masses: Arc::new(masses),
        };
        Self::build(base, kind, weight_name)
    }

    fn build(base: &FiniteSpace, kind: FamilyKind, weight_name: &str) -> Result<Self> {
        let level = Self {
            base: base.clone(),
            kind,
            weight: Weight::Lebesgue,
            weight_space: FiniteSpace::new([weight_name])?,
        };
        for (n, d) in FAMILY_SAMPLES {
            level.family_at(&T::ratio(n, d))?;
        }
        Ok(level)
    }

    /// Replaces the Lebesgue weight by finitely many atoms.
    pub fn with_discrete_weight(mut self, atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParams(
                "discrete weight needs at least one atom".into(),
            ));
        }
        let mut total = T::zero();
        for (p, m) in &atoms {
            if *p < T::zero() || *p > T::one() || *m < T::zero() {
                return Err(Error::InvalidParams(format!(
                    "bad atom ({}, {})",
                    p.render(),
                    m.render()
                )));
            }
            total = total + m.clone();
        }
        if !total.near(&T::one(), INVARIANT_TOL) {
            return Err(Error::InvalidParams(format!(
                "weight masses sum to {}",
                total.render()
            )));
        }
        self.weight = Weight::Discrete(atoms);
        Ok(self)
    }

    pub fn base(&self) -> &FiniteSpace {
        &self.base
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn weight(&self) -> &Weight<T> {
        &self.weight
    }

    /// One point naming the weight measure.
    pub fn weight_space(&self) -> &FiniteSpace {
        &self.weight_space
    }

    pub fn family_at(&self, p: &T) -> Result<Capacity<T>> {
        if *p < T::zero() || *p > T::one() {
            return Err(Error::InvalidParams(format!(
                "family parameter {} outside [0, 1]",
                p.render()
            )));
        }
        match &self.kind {
            FamilyKind::Binomial { trials } => {
                let n = *trials;
                let q = T::one() - p.clone();
                let masses = (0..=n)
                    .map(|k| binomial_scalar::<T>(n, k) * p.pow_u32(k) * q.pow_u32(n - k))
                    .collect();
                Capacity::from_singletons(&self.base, masses)
            }
            FamilyKind::Generic { masses, .. } => {
                let raw = masses(p.as_f64());
                let raw = raw
                    .into_iter()
                    .map(|m| T::from_f64(m).ok_or_else(|| Error::NonFinite(m.to_string())))
                    .collect::<Result<Vec<T>>>()?;
                let total = raw.iter().cloned().fold(T::zero(), |a, b| a + b);
                if total <= T::zero() {
                    return Err(Error::InvalidParams("family masses sum to zero".into()));
                }
                Capacity::from_singletons(
                    &self.base,
                    raw.into_iter().map(|m| m / total.clone()).collect(),
                )
            }
        }
    }

    /// Same family evaluated directly in floating point.
    pub fn family_at_f64(&self, p: f64) -> Result<Capacity<f64>> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "family parameter {p} outside [0, 1]"
            )));
        }
        let raw = match &self.kind {
            FamilyKind::Binomial { trials } => {
                let n = *trials;
                (0..=n)
                    .map(|k| {
                        binomial_scalar::<f64>(n, k)
                            * p.powi(k as i32)
                            * (1.0 - p).powi((n - k) as i32)
                    })
                    .collect::<Vec<_>>()
            }
            FamilyKind::Generic { masses, .. } => masses(p),
        };
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidParams(
                "family masses do not sum to a positive number".into(),
            ));
        }
        Capacity::from_singletons(&self.base, raw.into_iter().map(|m| m / total).collect())
    }

    fn base_nodes(&self) -> usize {
        match self.kind {
            FamilyKind::Binomial { trials } => (trials as usize + 2).div_ceil(2).max(4),
            FamilyKind::Generic { .. } => GENERIC_NODES,
        }
    }
}

/// What to integrate over a family level.
pub enum FamilyIntegrand<'a, T> {
    /// `p ↦ I^{v_p}(g)`.
    Choquet(&'a Act<T>),
    Function(&'a (dyn Fn(&Capacity<f64>) -> f64 + Sync)),
}

/// `∫ φ(v_p) dw(p)`: exact for Choquet integrands of binomial families and
/// for discrete weights, Gauss–Legendre with a refinement check otherwise.
pub fn integrate_family<T: Scalar>(
    level: &FamilyLevel<T>,
    integrand: FamilyIntegrand<'_, T>,
) -> Result<T> {
    if let FamilyIntegrand::Choquet(g) = &integrand {
        if g.space() != level.base() {
            return Err(Error::SpaceMismatch("integrand act on another space"));
        }
    }
    match (&level.weight, &level.kind, &integrand) {
        (Weight::Discrete(atoms), _, FamilyIntegrand::Choquet(g)) => {
            let mut acc = T::zero();
            for (p, m) in atoms {
                acc = acc + m.clone() * choquet_integral(&level.family_at(p)?, g)?;
            }
            Ok(acc)
        }
        (Weight::Discrete(atoms), _, FamilyIntegrand::Function(phi)) => {
            let mut acc = 0.0;
            for (p, m) in atoms {
                acc += m.as_f64() * phi(&level.family_at_f64(p.as_f64())?);
            }
            from_real(acc)
        }
        (Weight::Lebesgue, FamilyKind::Binomial { trials }, FamilyIntegrand::Choquet(g)) => {
            let total = g.values().iter().cloned().fold(T::zero(), |a, b| a + b);
            Ok(total / T::from_int(*trials as i64 + 1))
        }
        (Weight::Lebesgue, _, _) => from_real(integrate_family_quadrature(level, integrand)?),
    }
}

/// Gauss–Legendre evaluation of `∫₀¹ φ(v_p) dp`, ignoring any fast path.
/// Fails when doubling the node count moves the result by more than 1e-9.
pub fn integrate_family_quadrature<T: Scalar>(
    level: &FamilyLevel<T>,
    integrand: FamilyIntegrand<'_, T>,
) -> Result<f64> {
    let g64 = match &integrand {
        FamilyIntegrand::Choquet(g) => Some(Act::new(
            g.space(),
            g.values().iter().map(Scalar::as_f64).collect(),
        )?),
        FamilyIntegrand::Function(_) => None,
    };
    let phi = |p: f64| -> Result<f64> {
        let v = level.family_at_f64(p.clamp(0.0, 1.0))?;
        match (&integrand, &g64) {
            (FamilyIntegrand::Function(phi), _) => Ok(phi(&v)),
            (FamilyIntegrand::Choquet(_), Some(g)) => choquet_integral(&v, g),
            _ => unreachable!("choquet integrand always converted"),
        }
    };
    let nodes = level.base_nodes();
    let coarse = gauss_legendre(nodes, &phi)?;
    let fine = gauss_legendre(2 * nodes, &phi)?;
    if !(coarse - fine).abs().le(&DEFAULT_TOL) {
        return Err(Error::Quadrature { coarse, fine });
    }
    Ok(fine)
}

fn gauss_legendre(nodes: usize, phi: &impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("positive node count"));
    let mut failure = None;
    let value = rule.integrate(0.0, 1.0, |p| match phi(p) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

fn from_real<T: Scalar>(v: f64) -> Result<T> {
    T::from_f64(v).ok_or_else(|| Error::NonFinite(v.to_string()))
}

#[derive(Clone, Debug)]
pub enum Level<T> {
    Space(UncertaintySpace<T>),
    /// The family `{v_p}` over the previous level's capacity names.
    Family(Arc<FamilyLevel<T>>),
    /// The single weight measure on the family parameter.
    FamilyWeight(Arc<FamilyLevel<T>>),
    Terminal,
}

impl<T: Scalar> Level<T> {
    /// Number of capacities carried by this level, `None` for a continuum.
    pub fn capacity_count(&self) -> Option<usize> {
        match self {
            Level::Space(s) => Some(s.len()),
            Level::Family(_) => None,
            Level::FamilyWeight(_) | Level::Terminal => Some(1),
        }
    }
}

/// A function on the points of some level.
#[derive(Clone, Debug)]
pub enum LevelAct<T> {
    Points(Act<T>),
    /// The value at `v_p` is `I^{v_p}(coefficients)`.
    OverFamily {
        family: Arc<FamilyLevel<T>>,
        coefficients: Act<T>,
    },
}

impl<T: Scalar> LevelAct<T> {
    pub fn as_points(&self) -> Option<&Act<T>> {
        match self {
            LevelAct::Points(a) => Some(a),
            LevelAct::OverFamily { .. } => None,
        }
    }

    pub fn into_points(self) -> Result<Act<T>> {
        match self {
            LevelAct::Points(a) => Ok(a),
            LevelAct::OverFamily { .. } => Err(Error::InvalidSequence(
                "value lives on a family level".into(),
            )),
        }
    }

    /// Value at the family member `v_p`.
    pub fn evaluate_at(&self, p: &T) -> Result<T> {
        match self {
            LevelAct::OverFamily {
                family,
                coefficients,
            } => choquet_integral(&family.family_at(p)?, coefficients),
            LevelAct::Points(_) => Err(Error::InvalidSequence(
                "value is not indexed by a family".into(),
            )),
        }
    }

    pub fn near(&self, other: &LevelAct<T>, tol: f64) -> bool {
        match (self, other) {
            (LevelAct::Points(a), LevelAct::Points(b)) => a.near(b, tol),
            (
                LevelAct::OverFamily {
                    family: fa,
                    coefficients: a,
                },
                LevelAct::OverFamily {
                    family: fb,
                    coefficients: b,
                },
            ) => fa.base() == fb.base() && a.near(b, tol),
            _ => false,
        }
    }
}

/// Levels `𝔛_0, 𝔛_1, …` where each level's base points are the previous
/// level's capacity names. A trailing `Terminal` repeats forever.
#[derive(Clone, Debug)]
pub struct USequence<T> {
    levels: Vec<Level<T>>,
}

impl<T: Scalar> USequence<T> {
    pub fn new(first: UncertaintySpace<T>) -> Self {
        Self {
            levels: vec![Level::Space(first)],
        }
    }

    pub fn push_space(&mut self, space: UncertaintySpace<T>) -> Result<()> {
        let index = self.levels.len();
        let names = match self.last() {
            Level::Space(prev) => prev.capacity_space(),
            Level::FamilyWeight(fam) => fam.weight_space(),
            Level::Family(_) => {
                return Err(Error::InvalidSequence(
                    "a family level must be followed by its weight".into(),
                ))
            }
            Level::Terminal => {
                return Err(Error::InvalidSequence(
                    "only terminal levels may follow a terminal level".into(),
                ))
            }
        };
        if names.labels() != space.base().labels() {
            return Err(Error::Linkage(index));
        }
        self.levels.push(Level::Space(space));
        Ok(())
    }

    /// Appends the family level and the level holding its weight.
    pub fn push_family(&mut self, family: FamilyLevel<T>) -> Result<()> {
        let index = self.levels.len();
        match self.last() {
            Level::Space(prev) if prev.capacity_space().labels() == family.base().labels() => {}
            Level::Space(_) => return Err(Error::Linkage(index)),
            _ => {
                return Err(Error::InvalidSequence(
                    "a family level must follow an uncertainty space".into(),
                ))
            }
        }
        let family = Arc::new(family);
        self.levels.push(Level::Family(family.clone()));
        self.levels.push(Level::FamilyWeight(family));
        Ok(())
    }

    /// Closes the sequence; the previous level must carry exactly one capacity.
    pub fn push_terminal(&mut self) -> Result<()> {
        if self.last().capacity_count() != Some(1) {
            return Err(Error::InvalidSequence(
                "the terminal space can only follow a level with a single capacity".into(),
            ));
        }
        self.levels.push(Level::Terminal);
        Ok(())
    }

    fn last(&self) -> &Level<T> {
        self.levels.last().expect("never empty")
    }

    /// Number of stored levels.
    pub fn stored_len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.last(), Level::Terminal)
    }

    pub fn level(&self, n: usize) -> Result<&Level<T>> {
        match self.levels.get(n) {
            Some(level) => Ok(level),
            None if self.is_closed() => Ok(self.last()),
            None => Err(Error::LevelOutOfRange {
                level: n,
                len: self.levels.len(),
            }),
        }
    }

    pub fn first(&self) -> &UncertaintySpace<T> {
        match &self.levels[0] {
            Level::Space(s) => s,
            _ => unreachable!("first level is always a space"),
        }
    }
}

/// `ξ_{𝔛_n}` applied to a function on level `n`'s points.
pub fn xi_step<T: Scalar>(level: &Level<T>, f: LevelAct<T>) -> Result<LevelAct<T>> {
    match (level, f) {
        (Level::Space(s), LevelAct::Points(f)) => Ok(LevelAct::Points(s.xi(&f)?)),
        (Level::Family(fam), LevelAct::Points(f)) => {
            if f.space() != fam.base() {
                return Err(Error::SpaceMismatch("act on another level"));
            }
            Ok(LevelAct::OverFamily {
                family: fam.clone(),
                coefficients: f,
            })
        }
        (
            Level::FamilyWeight(fam),
            LevelAct::OverFamily {
                family,
                coefficients,
            },
        ) => {
            if family.base() != fam.base() {
                return Err(Error::SpaceMismatch("family value from another level"));
            }
            let v = integrate_family(fam, FamilyIntegrand::Choquet(&coefficients))?;
            Ok(LevelAct::Points(Act::new(fam.weight_space(), vec![v])?))
        }
        (Level::Terminal, LevelAct::Points(f)) if f.len() == 1 => Ok(LevelAct::Points(f)),
        _ => Err(Error::SpaceMismatch("function does not live on this level")),
    }
}

/// `ξ^{m,n}`: the identity for `m = n`, otherwise `ξ_{𝔛_{n−1}} ∘ ξ^{m,n−1}`.
pub fn xi_chain<T: Scalar>(
    seq: &USequence<T>,
    f: LevelAct<T>,
    m: usize,
    n: usize,
) -> Result<LevelAct<T>> {
    if m > n {
        return Err(Error::InvalidParams(format!("ξ^{{{m},{n}}} needs m <= n")));
    }
    if !seq.is_closed() && n >= seq.stored_len() {
        return Err(Error::LevelOutOfRange {
            level: n,
            len: seq.stored_len(),
        });
    }
    (m..n).try_fold(f, |acc, k| xi_step(seq.level(k)?, acc))
}

/// `V_n(f) = ξ^{0,n}(𝔲 ∘ f)`.
pub fn value_function<T: Scalar>(
    seq: &USequence<T>,
    f: &Act<T>,
    n: usize,
    utility: &UtilityFunction<T>,
) -> Result<LevelAct<T>> {
    let lifted = f.try_map(|x| utility.apply(x))?;
    xi_chain(seq, LevelAct::Points(lifted), 0, n)
}

/// `V_0 = 𝔲 ∘ f`, `V_{n+1} = ξ_{𝔛_n}(V_n)`.
pub fn value_function_recursive<T: Scalar>(
    seq: &USequence<T>,
    f: &Act<T>,
    n: usize,
    utility: &UtilityFunction<T>,
) -> Result<LevelAct<T>> {
    if n == 0 {
        return Ok(LevelAct::Points(f.try_map(|x| utility.apply(x))?));
    }
    if !seq.is_closed() && n >= seq.stored_len() {
        return Err(Error::LevelOutOfRange {
            level: n,
            len: seq.stored_len(),
        });
    }
    let previous = value_function_recursive(seq, f, n - 1, utility)?;
    xi_step(seq.level(n - 1)?, previous)
}
