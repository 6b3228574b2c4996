//! Uncertainty spaces: a base space together with a finite list of named
//! capacities, and the maps ε, ξ and ξ^G into acts over that list.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use serde::Serialize;

use crate::choquet::{are_comonotonic, choquet_integral};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_TOL, INVARIANT_TOL};
use crate::space::{Act, Capacity, FiniteSpace, Subset};

#[derive(Clone, Debug)]
pub struct UncertaintySpace<T> {
    base: FiniteSpace,
    names: FiniteSpace,
    capacities: Vec<Capacity<T>>,
}

impl<T: Scalar> UncertaintySpace<T> {
    /// Rejects an empty list, foreign capacities and duplicate tables.
    pub fn new<S: Into<String>>(
        base: &FiniteSpace,
        entries: Vec<(S, Capacity<T>)>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyCapacityList);
        }
        let (names, capacities): (Vec<String>, Vec<Capacity<T>>) =
            entries.into_iter().map(|(n, c)| (n.into(), c)).unzip();
        if capacities.iter().any(|c| c.space() != base) {
            return Err(Error::SpaceMismatch(
                "capacity defined on another base space",
            ));
        }
        let names = FiniteSpace::new(names)?;
        if let Some((i, j)) = duplicate_pair(&capacities) {
            return Err(Error::DuplicateCapacity(
                names.label(i).to_string(),
                names.label(j).to_string(),
            ));
        }
        Ok(Self {
            base: base.clone(),
            names,
            capacities,
        })
    }

    pub fn base(&self) -> &FiniteSpace {
        &self.base
    }

    /// The capacity list viewed as a finite space of names.
    pub fn capacity_space(&self) -> &FiniteSpace {
        &self.names
    }

    pub fn capacities(&self) -> &[Capacity<T>] {
        &self.capacities
    }

    pub fn capacity(&self, i: usize) -> &Capacity<T> {
        &self.capacities[i]
    }

    pub fn capacity_named(&self, name: &str) -> Result<(usize, &Capacity<T>)> {
        let i = self
            .names
            .index_of(name)
            .map_err(|_| Error::UnknownName(name.to_string()))?;
        Ok((i, &self.capacities[i]))
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    /// `ε(A)(u) = u(A)`.
    pub fn epsilon(&self, subset: &Subset) -> Result<Act<T>> {
        if subset.space() != &self.base {
            return Err(Error::SpaceMismatch("subset of another base space"));
        }
        let values = self
            .capacities
            .iter()
            .map(|u| u.value(subset.mask()))
            .collect();
        Act::new(&self.names, values)
    }

    /// `ξ(f)(u) = I^u(f)`.
    pub fn xi(&self, f: &Act<T>) -> Result<Act<T>> {
        if f.space() != &self.base {
            return Err(Error::SpaceMismatch("act on another base space"));
        }
        let values = self
            .capacities
            .par_iter()
            .map(|u| choquet_integral(u, f))
            .collect::<Result<Vec<_>>>()?;
        Act::new(&self.names, values)
    }

    /// `ξ^G(f) = G⁻¹ ∘ ξ(G ∘ f)`.
    pub fn xi_g(&self, f: &Act<T>, g: &GTransform<T>) -> Result<Act<T>> {
        let lifted = f.try_map(|t| g.forward(t))?;
        self.xi(&lifted)?.try_map(|s| g.inverse(s))
    }

    /// Same capacities evaluated in `f64`.
    pub fn to_f64(&self) -> UncertaintySpace<f64> {
        UncertaintySpace {
            base: self.base.clone(),
            names: self.names.clone(),
            capacities: self.capacities.iter().map(Capacity::to_f64).collect(),
        }
    }
}

fn duplicate_pair<T: Scalar>(capacities: &[Capacity<T>]) -> Option<(usize, usize)> {
    (0..capacities.len()).find_map(|j| {
        (0..j)
            .find(|&i| capacities[i].near(&capacities[j], INVARIANT_TOL))
            .map(|i| (i, j))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub separated: bool,
    /// First pair of indices with identical tables.
    pub witness: Option<(usize, usize)>,
}

/// Whether the listed capacities are pairwise distinct.
pub fn check_separated<T: Scalar>(capacities: &[Capacity<T>]) -> Separation {
    let witness = duplicate_pair(capacities);
    Separation {
        separated: witness.is_none(),
        witness,
    }
}

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A strictly increasing continuous `G` with its inverse.
#[derive(Clone)]
pub enum GTransform<T> {
    /// `G(t) = c·t` with `c > 0`, evaluated exactly.
    Linear(T),
    /// `G(t) = exp(λt)` with `λ > 0`, evaluated in floating point.
    Entropic(f64),
    Custom {
        label: String,
        forward: RealMap,
        inverse: RealMap,
    },
}

impl<T: Scalar> fmt::Debug for GTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GTransform::Linear(c) => write!(f, "Linear({})", c.render()),
            GTransform::Entropic(l) => write!(f, "Entropic({l})"),
            GTransform::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

const SAMPLES: [f64; 9] = [-3.0, -1.5, -1.0, -0.25, 0.0, 0.25, 1.0, 1.5, 3.0];
const EXP_LIMIT: f64 = 700.0;

impl<T: Scalar> GTransform<T> {
    pub fn linear(c: T) -> Result<Self> {
        if c <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "linear G needs c > 0, got {}",
                c.render()
            )));
        }
        Ok(GTransform::Linear(c))
    }

    pub fn entropic(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "entropic G needs λ > 0, got {lambda}"
            )));
        }
        Ok(GTransform::Entropic(lambda))
    }

    pub fn custom(
        label: impl Into<String>,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let g = GTransform::Custom {
            label: label.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks round trips and strict increase on a fixed sample grid.
    pub fn validate(&self) -> Result<()> {
        let mut previous: Option<f64> = None;
        for &t in &SAMPLES {
            let x = T::from_f64(t).ok_or_else(|| Error::NonFinite(t.to_string()))?;
            let y = self.forward(&x)?;
            let back = self.inverse(&y)?.as_f64();
            if (back - t).abs() > DEFAULT_TOL {
                return Err(Error::InvalidParams(format!(
                    "{self:?}: inverse(forward({t})) = {back}"
                )));
            }
            let y = y.as_f64();
            if previous.is_some_and(|p| y <= p) {
                return Err(Error::InvalidParams(format!(
                    "{self:?} is not strictly increasing near {t}"
                )));
            }
            previous = Some(y);
        }
        Ok(())
    }

    pub fn forward(&self, t: &T) -> Result<T> {
        match self {
            GTransform::Linear(c) => Ok(c.clone() * t.clone()),
            GTransform::Entropic(lambda) => {
                let exponent = lambda * t.as_f64();
                if exponent > EXP_LIMIT {
                    return Err(Error::Overflow(format!("exp({exponent})")));
                }
                from_real(exponent.exp())
            }
            GTransform::Custom { forward, .. } => from_real(forward(t.as_f64())),
        }
    }

    pub fn inverse(&self, s: &T) -> Result<T> {
        match self {
            GTransform::Linear(c) => Ok(s.clone() / c.clone()),
            GTransform::Entropic(lambda) => {
                let v = s.as_f64();
                if v <= 0.0 {
                    return Err(Error::Overflow(format!("log of non-positive value {v}")));
                }
                from_real(v.ln() / lambda)
            }
            GTransform::Custom { inverse, .. } => from_real(inverse(s.as_f64())),
        }
    }
}

/// Two comonotonic acts whose images under `ξ` are not comonotonic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComonotoneCounterexample {
    pub f: Vec<String>,
    pub g: Vec<String>,
    pub xi_f: Vec<String>,
    pub xi_g: Vec<String>,
    /// `ξ(f)(u1) − ξ(f)(u2)`.
    pub difference_f: String,
    pub difference_g: String,
    pub product: String,
    pub inputs_comonotonic: bool,
    pub images_comonotonic: bool,
}

/// Three equally likely states under `u1`, masses `(1/2, 1/8, 3/8)` under
/// `u2`, `f = (11, 1, 0)` and `g = (11, 10, 0)`.
pub fn comonotone_counterexample<T: Scalar>() -> Result<ComonotoneCounterexample> {
    let x = FiniteSpace::new(["A1", "A2", "A3"])?;
    let u1 = Capacity::from_singletons(&x, vec![T::ratio(1, 3); 3])?;
    let u2 = Capacity::from_singletons(&x, vec![T::ratio(1, 2), T::ratio(1, 8), T::ratio(3, 8)])?;
    let space = UncertaintySpace::new(&x, vec![("u1", u1), ("u2", u2)])?;
    let f = Act::new(&x, vec![T::from_int(11), T::from_int(1), T::zero()])?;
    let g = Act::new(&x, vec![T::from_int(11), T::from_int(10), T::zero()])?;
    let xf = space.xi(&f)?;
    let xg = space.xi(&g)?;
    let df = xf.value(0).clone() - xf.value(1).clone();
    let dg = xg.value(0).clone() - xg.value(1).clone();
    let render = |a: &Act<T>| a.values().iter().map(Scalar::render).collect::<Vec<_>>();
    Ok(ComonotoneCounterexample {
        f: render(&f),
        g: render(&g),
        xi_f: render(&xf),
        xi_g: render(&xg),
        difference_f: df.render(),
        difference_g: dg.render(),
        product: (df * dg).render(),
        inputs_comonotonic: are_comonotonic(&f, &g)?,
        images_comonotonic: are_comonotonic(&xf, &xg)?,
    })
}

fn from_real<T: Scalar>(v: f64) -> Result<T> {
    T::from_f64(v).ok_or_else(|| Error::Overflow(v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn abc() -> FiniteSpace {
        FiniteSpace::new(["a1", "a2", "a3"]).unwrap()
    }

    fn comonotone_example() -> (UncertaintySpace<Rational>, Act<Rational>, Act<Rational>) {
        let x = abc();
        let u1 = Capacity::from_singletons(&x, vec![q(1, 3), q(1, 3), q(1, 3)]).unwrap();
        let u2 = Capacity::from_singletons(&x, vec![q(1, 2), q(1, 8), q(3, 8)]).unwrap();
        let space = UncertaintySpace::new(&x, vec![("u1", u1), ("u2", u2)]).unwrap();
        let f = Act::new(&x, vec![q(11, 1), q(1, 1), q(0, 1)]).unwrap();
        let g = Act::new(&x, vec![q(11, 1), q(10, 1), q(0, 1)]).unwrap();
        (space, f, g)
    }

    #[test]
    fn epsilon_on_full_and_empty() {
        let (space, _, _) = comonotone_example();
        let one = space.epsilon(&abc().full()).unwrap();
        let zero = space.epsilon(&abc().empty()).unwrap();
        assert!(one.values().iter().all(|v| *v == q(1, 1)));
        assert!(zero.values().iter().all(|v| *v == q(0, 1)));
    }

    #[test]
    fn xi_of_indicator_is_epsilon() {
        let (space, _, _) = comonotone_example();
        for mask in 0..8 {
            let a = abc().subset(mask).unwrap();
            assert_eq!(
                space.xi(&Act::indicator(&a)).unwrap(),
                space.epsilon(&a).unwrap()
            );
        }
    }

    #[test]
    fn xi_breaks_comonotonicity() {
        let (space, f, g) = comonotone_example();
        assert!(are_comonotonic(&f, &g).unwrap());
        let xf = space.xi(&f).unwrap();
        let xg = space.xi(&g).unwrap();
        assert_eq!(xf.values(), &[q(4, 1), q(45, 8)]);
        let df = xf.value(0).clone() - xf.value(1).clone();
        let dg = xg.value(0).clone() - xg.value(1).clone();
        assert_eq!(df, q(-13, 8));
        assert_eq!(dg, q(1, 4));
        assert_eq!(df * dg, q(-13, 32));
        assert!(!are_comonotonic(&xf, &xg).unwrap());
    }

    #[test]
    fn public_counterexample_matches() {
        let ce = comonotone_counterexample::<Rational>().unwrap();
        assert_eq!(ce.xi_f, vec!["4", "45/8"]);
        assert_eq!(
            (ce.difference_f.as_str(), ce.difference_g.as_str()),
            ("-13/8", "1/4")
        );
        assert_eq!(ce.product, "-13/32");
        assert!(ce.inputs_comonotonic && !ce.images_comonotonic);
        let float = comonotone_counterexample::<f64>().unwrap();
        assert_eq!(float.product, "-0.40625");
    }

    #[test]
    fn dirac_evaluates_pointwise() {
        let x = abc();
        let diracs = (0..3)
            .map(|i| (format!("d{i}"), Capacity::dirac(&x, i).unwrap()))
            .collect();
        let space = UncertaintySpace::new(&x, diracs).unwrap();
        let f = Act::new(&x, vec![q(5, 2), q(-1, 1), q(7, 3)]).unwrap();
        assert_eq!(space.xi(&f).unwrap().values(), f.values());
    }

    #[test]
    fn rejects_empty_and_duplicates() {
        let x = abc();
        assert_eq!(
            UncertaintySpace::<Rational>::new::<String>(&x, vec![]).unwrap_err(),
            Error::EmptyCapacityList
        );
        let u = Capacity::<Rational>::uniform(&x).unwrap();
        let dense = Capacity::from_table(&x, u.table().unwrap()).unwrap();
        let err =
            UncertaintySpace::new(&x, vec![("p", u.clone()), ("q", dense.clone())]).unwrap_err();
        assert_eq!(err, Error::DuplicateCapacity("p".into(), "q".into()));
        let sep = check_separated(&[u.clone(), Capacity::dirac(&x, 0).unwrap(), dense]);
        assert_eq!(sep.witness, Some((0, 2)));
        assert!(!sep.separated);
        assert!(check_separated(&[u]).separated);
    }

    #[test]
    fn foreign_subset_is_rejected() {
        let (space, _, _) = comonotone_example();
        let other = FiniteSpace::new(["z"]).unwrap();
        assert!(matches!(
            space.epsilon(&other.full()),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn linear_g_matches_xi() {
        let (space, f, _) = comonotone_example();
        let g = GTransform::linear(q(7, 3)).unwrap();
        assert_eq!(space.xi_g(&f, &g).unwrap(), space.xi(&f).unwrap());
        assert!(GTransform::linear(q(0, 1)).is_err());
    }

    #[test]
    fn entropic_two_point_example() {
        let x = FiniteSpace::new(["a", "b"]).unwrap();
        let u = Capacity::from_table(&x, vec![0.0, 0.2, 0.1, 1.0]).unwrap();
        let space = UncertaintySpace::new(&x, vec![("u", u)]).unwrap();
        let f = Act::new(&x, vec![0.0, 1.0]).unwrap();
        let g = GTransform::entropic(1.0).unwrap();
        let v = *space.xi_g(&f, &g).unwrap().value(0);
        let oracle = (0.1 * (std::f64::consts::E - 1.0) + 1.0).ln();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.1586).abs() < 5e-5);
    }

    #[test]
    fn entropic_constant_act_is_fixed() {
        let (space, _, _) = comonotone_example();
        let space = space.to_f64();
        let c = Act::constant(space.base(), 1.75);
        let g = GTransform::entropic(2.5).unwrap();
        assert!(space
            .xi_g(&c, &g)
            .unwrap()
            .values()
            .iter()
            .all(|v| (v - 1.75).abs() < 1e-12));
    }

    #[test]
    fn entropic_overflow_is_reported() {
        let (space, _, _) = comonotone_example();
        let space = space.to_f64();
        let f = Act::new(space.base(), vec![1000.0, 0.0, 0.0]).unwrap();
        let g = GTransform::entropic(1.0).unwrap();
        assert!(matches!(space.xi_g(&f, &g), Err(Error::Overflow(_))));
    }

    #[test]
    fn custom_transform_validation() {
        let cube = GTransform::<f64>::custom("cube", |t| t * t * t, f64::cbrt);
        assert!(cube.is_ok());
        let square = GTransform::<f64>::custom("square", |t| t * t, f64::sqrt);
        assert!(square.is_err());
    }
}
