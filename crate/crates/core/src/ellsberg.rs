//! The single-urn Ellsberg experiment: urn capacities, the three
//! U-sequences built over them, and value reports for the four acts.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{
    conditional_act, integrate_family_quadrature, value_function, value_function_recursive,
    FamilyIntegrand, FamilyLevel, Level, LevelAct, USequence, UtilityFunction,
};
use crate::scalar::{binomial_scalar, Backend, Scalar, DEFAULT_TOL, INVARIANT_TOL};
use crate::space::{Act, Capacity, FiniteSpace};
use crate::uncertainty::UncertaintySpace;

pub const COLORS: [&str; 3] = ["R", "B", "Y"];
pub const ACT_NAMES: [&str; 4] = ["f1", "f2", "f3", "f4"];
const WEIGHT_NAME: &str = "lambda";
const FAMILY_SAMPLES: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    X,
    Y,
    Z,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::X => "X",
            Variant::Y => "Y",
            Variant::Z => "Z",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(Variant::X),
            "Y" | "y" => Ok(Variant::Y),
            "Z" | "z" => Ok(Variant::Z),
            other => Err(Error::InvalidParams(format!("unknown variant `{other}`"))),
        }
    }
}

impl Variant {
    pub fn max_layer(self) -> usize {
        match self {
            Variant::X | Variant::Y => 2,
            Variant::Z => 3,
        }
    }
}

/// `3N` balls, distortion exponent `alpha`, utility anchor `u1 = 𝔲(1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UrnParams<T> {
    pub big_n: u32,
    pub alpha: f64,
    pub u1: T,
}

impl<T: Scalar> UrnParams<T> {
    pub fn new(big_n: u32, alpha: f64, u1: T) -> Result<Self> {
        if big_n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be a finite number >= 1, got {alpha}"
            )));
        }
        if u1 <= T::zero() || u1 >= T::one() {
            return Err(Error::InvalidParams(format!(
                "u1 must lie in (0, 1), got {}",
                u1.render()
            )));
        }
        if T::BACKEND == Backend::Rational && integer_alpha(alpha).is_none() {
            return Err(Error::Backend(format!(
                "alpha = {alpha} exactly; use the float backend"
            )));
        }
        Ok(Self { big_n, alpha, u1 })
    }

    pub fn utility(&self) -> UtilityFunction<T> {
        UtilityFunction::Anchored(self.u1.clone())
    }

    fn two_n(&self) -> u32 {
        2 * self.big_n
    }

    /// `(k / 2N)^α`.
    pub fn power_ratio(&self, k: u32) -> Result<T> {
        power_ratio(k, self.two_n(), self.alpha)
    }
}

fn integer_alpha(alpha: f64) -> Option<u32> {
    (alpha.fract() == 0.0 && alpha <= u32::MAX as f64).then_some(alpha as u32)
}

fn power_ratio<T: Scalar>(k: u32, m: u32, alpha: f64) -> Result<T> {
    match integer_alpha(alpha) {
        Some(a) => Ok(T::ratio(k as i64, m as i64).pow_u32(a)),
        None if T::BACKEND == Backend::Float => {
            let v = (k as f64 / m as f64).powf(alpha);
            T::from_f64(v).ok_or_else(|| Error::NonFinite(v.to_string()))
        }
        None => Err(Error::Backend(format!("({k}/{m})^{alpha}"))),
    }
}

pub fn urn_points() -> FiniteSpace {
    FiniteSpace::new(COLORS).expect("three labels")
}

/// `U_{X_0} = {u_0, …, u_{2N}}` on `{R, B, Y}`.
pub fn build_urn_space<T: Scalar>(params: &UrnParams<T>) -> Result<UncertaintySpace<T>> {
    let x = urn_points();
    let third = T::ratio(1, 3);
    let two_thirds = T::ratio(2, 3);
    let two_n = params.two_n();
    let mut entries = Vec::with_capacity(two_n as usize + 1);
    for k in 0..=two_n {
        let b = two_thirds.clone() * params.power_ratio(k)?;
        let y = two_thirds.clone() * params.power_ratio(two_n - k)?;
        let table = vec![
            T::zero(),
            third.clone(),
            b.clone(),
            third.clone() + b,
            y.clone(),
            third.clone() + y,
            two_thirds.clone(),
            T::one(),
        ];
        entries.push((
            format!("u{k}"),
            Capacity::from_table(&x, table)?.compacted(),
        ));
    }
    UncertaintySpace::new(&x, entries)
}

/// `f1..f4` = indicators of `{R}`, `{B}`, `{B,Y}`, `{R,Y}`.
pub fn ellsberg_acts<T: Scalar>() -> [Act<T>; 4] {
    let x = urn_points();
    let ind = |labels: &[&str]| Act::indicator(&x.subset_of(labels).expect("urn colors"));
    [ind(&["R"]), ind(&["B"]), ind(&["B", "Y"]), ind(&["R", "Y"])]
}

pub fn build_sequence<T: Scalar>(variant: Variant, params: &UrnParams<T>) -> Result<USequence<T>> {
    let urn = build_urn_space(params)?;
    let names = urn.capacity_space().clone();
    let mut seq = USequence::new(urn);
    match variant {
        Variant::X => {
            let v = Capacity::uniform(&names)?;
            seq.push_space(UncertaintySpace::new(&names, vec![("v^u", v)])?)?;
        }
        Variant::Y => {
            let two_n = params.two_n();
            let scale = T::from_int(2).pow_u32(two_n);
            let masses = (0..=two_n)
                .map(|k| binomial_scalar::<T>(two_n, k) / scale.clone())
                .collect();
            let v = Capacity::from_singletons(&names, masses)?;
            seq.push_space(UncertaintySpace::new(&names, vec![("v^b", v)])?)?;
        }
        Variant::Z => seq.push_family(FamilyLevel::binomial(&names, WEIGHT_NAME)?)?,
    }
    seq.push_terminal()?;
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = "<")]
    Less,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Greater => ">",
            Order::Equal => "=",
            Order::Less => "<",
        })
    }
}

fn compare<T: Scalar>(a: &T, b: &T) -> Order {
    if a.near(b, INVARIANT_TOL) {
        return Order::Equal;
    }
    match a.partial_cmp(b) {
        Some(Ordering::Greater) => Order::Greater,
        _ => Order::Less,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `V(f1) = V(f2)` and `V(f3) = V(f4)` at every point.
    Equalities,
    /// `V(f1) > V(f2)` and `V(f3) > V(f4)` at every point.
    ModalPreference,
    Mixed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equalities => "equalities",
            Verdict::ModalPreference => "modal-preference",
            Verdict::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReportRow<T> {
    pub point: String,
    pub values: [T; 4],
    pub closed_form: [T; 4],
    pub order_12: Order,
    pub order_34: Order,
}

#[derive(Clone, Debug)]
pub struct EllsbergReport<T> {
    pub variant: Variant,
    pub layer: usize,
    pub params: UrnParams<T>,
    pub rows: Vec<ReportRow<T>>,
    pub verdict: Verdict,
    /// The verdict the α-dichotomy predicts, where it applies.
    pub expected_verdict: Option<Verdict>,
    pub closed_form_agrees: bool,
    pub recursion_agrees: bool,
    /// Largest gap between the exact family integral and Gauss–Legendre.
    pub quadrature_gap: Option<f64>,
}

impl<T: Scalar> EllsbergReport<T> {
    pub fn consistent(&self) -> bool {
        self.closed_form_agrees
            && self.recursion_agrees
            && self.quadrature_gap.is_none_or(|g| g <= DEFAULT_TOL)
            && self.expected_verdict.is_none_or(|e| e == self.verdict)
    }

    pub fn rendered(&self) -> RenderedReport {
        RenderedReport {
            variant: self.variant,
            layer: self.layer,
            big_n: self.params.big_n,
            alpha: self.params.alpha,
            u1: self.params.u1.render(),
            backend: T::BACKEND,
            rows: self
                .rows
                .iter()
                .map(|r| RenderedRow {
                    point: r.point.clone(),
                    f1: r.values[0].render(),
                    f2: r.values[1].render(),
                    f3: r.values[2].render(),
                    f4: r.values[3].render(),
                    order_12: r.order_12,
                    order_34: r.order_34,
                })
                .collect(),
            verdict: self.verdict,
            expected_verdict: self.expected_verdict,
            closed_form_agrees: self.closed_form_agrees,
            recursion_agrees: self.recursion_agrees,
            quadrature_gap: self.quadrature_gap,
            consistent: self.consistent(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RenderedRow {
    pub point: String,
    pub f1: String,
    pub f2: String,
    pub f3: String,
    pub f4: String,
    pub order_12: Order,
    pub order_34: Order,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenderedReport {
    pub variant: Variant,
    pub layer: usize,
    pub big_n: u32,
    pub alpha: f64,
    pub u1: String,
    pub backend: Backend,
    pub rows: Vec<RenderedRow>,
    pub verdict: Verdict,
    pub expected_verdict: Option<Verdict>,
    pub closed_form_agrees: bool,
    pub recursion_agrees: bool,
    pub quadrature_gap: Option<f64>,
    pub consistent: bool,
}

/// `V_n(f_i)` for the four acts, computed through the U-sequence and
/// recomputed from closed forms.
pub fn ellsberg_report<T: Scalar>(
    variant: Variant,
    params: &UrnParams<T>,
    layer: usize,
) -> Result<EllsbergReport<T>> {
    if layer == 0 || layer > variant.max_layer() {
        return Err(Error::InvalidParams(format!(
            "variant {variant} reports layers 1..={}, got {layer}",
            variant.max_layer()
        )));
    }
    let seq = build_sequence(variant, params)?;
    let utility = params.utility();
    let acts = ellsberg_acts::<T>();
    let mut by_act = Vec::with_capacity(4);
    let mut recursion_agrees = true;
    for f in &acts {
        let v = value_function(&seq, f, layer, &utility)?;
        let r = value_function_recursive(&seq, f, layer, &utility)?;
        recursion_agrees &= v.near(&r, 0.0);
        by_act.push(v);
    }

    let (points, values): (Vec<String>, Vec<[T; 4]>) = match &by_act[0] {
        LevelAct::Points(first) => {
            let labels = first.space().labels().to_vec();
            let cols = by_act
                .iter()
                .map(|v| v.as_points().map(|a| a.values().to_vec()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InvalidSequence("mixed value shapes".into()))?;
            let rows = (0..labels.len())
                .map(|i| [0, 1, 2, 3].map(|j| cols[j][i].clone()))
                .collect();
            (labels, rows)
        }
        LevelAct::OverFamily { .. } => {
            let mut labels = Vec::new();
            let mut rows = Vec::new();
            for (n, d) in FAMILY_SAMPLES {
                let p = T::ratio(n, d);
                labels.push(format!("p={}", p.render()));
                let cells = by_act
                    .iter()
                    .map(|v| v.evaluate_at(&p))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(<[T; 4]>::try_from(cells).expect("four acts"));
            }
            (labels, rows)
        }
    };

    let closed = closed_forms(variant, params, layer)?;
    let tol = match T::BACKEND {
        Backend::Rational => 0.0,
        Backend::Float => DEFAULT_TOL,
    };
    let closed_form_agrees = closed.len() == values.len()
        && closed
            .iter()
            .zip(&values)
            .all(|(c, v)| c.iter().zip(v).all(|(a, b)| a.near(b, tol)));

    let quadrature_gap = match (variant, layer) {
        (Variant::Z, 3) => Some(quadrature_gap(&seq, &acts, &utility, &values[0])?),
        _ => None,
    };

    let rows: Vec<ReportRow<T>> = points
        .into_iter()
        .zip(values)
        .zip(closed)
        .map(|((point, values), closed_form)| ReportRow {
            point,
            order_12: compare(&values[0], &values[1]),
            order_34: compare(&values[2], &values[3]),
            values,
            closed_form,
        })
        .collect();
    let verdict = if rows
        .iter()
        .all(|r| r.order_12 == Order::Equal && r.order_34 == Order::Equal)
    {
        Verdict::Equalities
    } else if rows
        .iter()
        .all(|r| r.order_12 == Order::Greater && r.order_34 == Order::Greater)
    {
        Verdict::ModalPreference
    } else {
        Verdict::Mixed
    };
    let anchored = layer == variant.max_layer();
    let expected_verdict = anchored.then_some(if params.alpha == 1.0 {
        Verdict::Equalities
    } else {
        Verdict::ModalPreference
    });
    Ok(EllsbergReport {
        variant,
        layer,
        params: params.clone(),
        rows,
        verdict,
        expected_verdict,
        closed_form_agrees,
        recursion_agrees,
        quadrature_gap,
    })
}

fn quadrature_gap<T: Scalar>(
    seq: &USequence<T>,
    acts: &[Act<T>; 4],
    utility: &UtilityFunction<T>,
    exact: &[T; 4],
) -> Result<f64> {
    let Level::Family(family) = seq.level(1)? else {
        return Err(Error::InvalidSequence(
            "variant Z has a family at level 1".into(),
        ));
    };
    let mut gap = 0.0f64;
    for (f, e) in acts.iter().zip(exact) {
        let LevelAct::Points(v1) = value_function(seq, f, 1, utility)? else {
            return Err(Error::InvalidSequence("first layer is finite".into()));
        };
        let q = integrate_family_quadrature(family, FamilyIntegrand::Choquet(&v1))?;
        gap = gap.max((q - e.as_f64()).abs());
    }
    Ok(gap)
}

/// Closed forms, one row per reported point, written directly in terms of
/// `(k/2N)^α` and the level-1 weights.
fn closed_forms<T: Scalar>(
    variant: Variant,
    params: &UrnParams<T>,
    layer: usize,
) -> Result<Vec<[T; 4]>> {
    let two_n = params.two_n();
    let u1 = params.u1.clone();
    let third = T::ratio(1, 3);
    let two_thirds = T::ratio(2, 3);
    let blue = (0..=two_n)
        .map(|k| power_ratio::<T>(k, two_n, params.alpha))
        .collect::<Result<Vec<_>>>()?;
    let yellow = (0..=two_n)
        .map(|k| power_ratio::<T>(two_n - k, two_n, params.alpha))
        .collect::<Result<Vec<_>>>()?;
    let f1 = third.clone() * u1.clone();
    let f3 = two_thirds.clone() * u1.clone();
    let row = |b_sum: T, y_sum: T| -> [T; 4] {
        [
            f1.clone(),
            two_thirds.clone() * u1.clone() * b_sum,
            f3.clone(),
            u1.clone() * (third.clone() + two_thirds.clone() * y_sum),
        ]
    };
    let weighted = |w: &[T], v: &[T]| {
        w.iter()
            .zip(v)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    };
    let sum = |v: &[T]| v.iter().cloned().fold(T::zero(), |a, b| a + b);
    let count = T::from_int(two_n as i64 + 1);

    Ok(match (variant, layer) {
        (_, 1) => (0..=two_n as usize)
            .map(|k| row(blue[k].clone(), yellow[k].clone()))
            .collect(),
        (Variant::X, 2) => {
            let s = sum(&blue) / count;
            vec![row(s.clone(), s)]
        }
        (Variant::Y, 2) => {
            let scale = T::from_int(2).pow_u32(two_n);
            let w: Vec<T> = (0..=two_n)
                .map(|k| binomial_scalar::<T>(two_n, k) / scale.clone())
                .collect();
            vec![row(weighted(&w, &blue), weighted(&w, &blue))]
        }
        (Variant::Z, 2) => FAMILY_SAMPLES
            .iter()
            .map(|&(n, d)| {
                let p = T::ratio(n, d);
                let q = T::one() - p.clone();
                let w: Vec<T> = (0..=two_n)
                    .map(|k| binomial_scalar::<T>(two_n, k) * p.pow_u32(k) * q.pow_u32(two_n - k))
                    .collect();
                row(weighted(&w, &blue), weighted(&w, &yellow))
            })
            .collect(),
        (Variant::Z, 3) => vec![row(sum(&blue) / count.clone(), sum(&yellow) / count)],
        _ => {
            return Err(Error::InvalidParams(format!(
                "no closed form for {variant} at layer {layer}"
            )))
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParadoxOutcome {
    ParadoxNotRepresentable,
    ModalPreferenceRepresented,
    Inconclusive,
}

impl fmt::Display for ParadoxOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParadoxOutcome::ParadoxNotRepresentable => "paradox not representable",
            ParadoxOutcome::ModalPreferenceRepresented => "modal preference represented",
            ParadoxOutcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParadoxDemo {
    pub identities: Vec<IdentityCheck>,
    /// Sure-thing equivalence forced by the identities.
    pub p2_equivalence: String,
    /// The modal preference `f1 ≻ f2`, `f3 ≻ f4` contradicts that equivalence.
    pub modal_preference_contradicts_p2: bool,
    pub second_layer: RenderedReport,
    pub outcome: ParadoxOutcome,
}

pub fn paradox_demo<T: Scalar>(params: &UrnParams<T>) -> Result<ParadoxDemo> {
    let x = urn_points();
    let rb = x.subset_of(&["R", "B"])?;
    let [f1, f2, f3, f4] = ellsberg_acts::<T>();
    let zero = Act::constant(&x, T::zero());
    let one = Act::constant(&x, T::one());
    let checks = [
        (
            "({R,B}; f1, 0) = f1",
            conditional_act(&rb, &f1, &zero)? == f1,
        ),
        (
            "({R,B}; f2, 0) = f2",
            conditional_act(&rb, &f2, &zero)? == f2,
        ),
        (
            "({R,B}; f1, 1) = f4",
            conditional_act(&rb, &f1, &one)? == f4,
        ),
        (
            "({R,B}; f2, 1) = f3",
            conditional_act(&rb, &f2, &one)? == f3,
        ),
    ];
    let identities: Vec<IdentityCheck> = checks
        .iter()
        .map(|(identity, holds)| IdentityCheck {
            identity: identity.to_string(),
            holds: *holds,
        })
        .collect();
    let all_hold = identities.iter().all(|c| c.holds);
    let report = ellsberg_report(Variant::X, params, 2)?;
    let outcome = match report.verdict {
        Verdict::Equalities => ParadoxOutcome::ParadoxNotRepresentable,
        Verdict::ModalPreference => ParadoxOutcome::ModalPreferenceRepresented,
        Verdict::Mixed => ParadoxOutcome::Inconclusive,
    };
    Ok(ParadoxDemo {
        identities,
        p2_equivalence: "f1 >= f2 iff f4 >= f3".into(),
        modal_preference_contradicts_p2: all_hold,
        second_layer: report.rendered(),
        outcome,
    })
}
