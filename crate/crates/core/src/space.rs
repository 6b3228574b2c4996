//! Finite measurable spaces with the powerset σ-algebra, acts, point maps and
//! capacities.
//!
//! Subsets are `u64` bitmasks over point indices: bit `i` is point `i`, so
//! subset operations need at most [`MAX_MASK_POINTS`] points. Dense capacity
//! tables cover the whole powerset and are capped at [`MAX_DENSE_POINTS`];
//! additive capacities and acts work on spaces of any size up to
//! [`MAX_POINTS`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, INVARIANT_TOL};

pub const MAX_POINTS: usize = 1 << 16;
pub const MAX_MASK_POINTS: usize = 63;
pub const MAX_DENSE_POINTS: usize = 20;

/// Labeled finite point set. Cheap to clone; equality is by label list.
#[derive(Clone)]
pub struct FiniteSpace {
    labels: Arc<[String]>,
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

impl FiniteSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        if labels.len() > MAX_POINTS {
            return Err(Error::TooManyPoints {
                count: labels.len(),
                max: MAX_POINTS,
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    /// Points labeled `prefix0, prefix1, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.len())
    }

    /// `2^n`; only meaningful for mask-addressable spaces.
    pub fn subset_count(&self) -> u64 {
        1u64.checked_shl(self.len() as u32).unwrap_or(0)
    }

    pub fn subset(&self, mask: u64) -> Result<Subset> {
        self.check_masks()?;
        if mask & !self.full_mask() != 0 {
            return Err(Error::MaskOutOfRange {
                mask,
                len: self.len(),
            });
        }
        Ok(Subset {
            space: self.clone(),
            mask,
        })
    }

    pub fn subset_of(&self, labels: &[&str]) -> Result<Subset> {
        let mut mask = 0;
        for l in labels {
            mask |= 1 << self.index_of(l)?;
        }
        self.subset(mask)
    }

    pub fn full(&self) -> Subset {
        assert!(self.supports_masks(), "subset masks need at most 63 points");
        Subset {
            space: self.clone(),
            mask: self.full_mask(),
        }
    }

    pub fn empty(&self) -> Subset {
        Subset {
            space: self.clone(),
            mask: 0,
        }
    }

    pub fn singleton(&self, i: usize) -> Subset {
        assert!(
            i < self.len() && self.supports_masks(),
            "point index out of range"
        );
        Subset {
            space: self.clone(),
            mask: 1 << i,
        }
    }

    /// Bitstring with the first point leftmost, e.g. `"101"` for `{p0, p2}`.
    pub fn mask_to_bits(&self, mask: u64) -> String {
        (0..self.len())
            .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn bits_to_mask(&self, bits: &str) -> Result<u64> {
        if bits.len() != self.len() {
            return Err(Error::Length {
                expected: self.len(),
                found: bits.len(),
            });
        }
        let mut mask = 0;
        for (i, c) in bits.chars().enumerate() {
            match c {
                '1' => mask |= 1 << i,
                '0' => {}
                _ => return Err(Error::Parse(bits.to_string())),
            }
        }
        Ok(mask)
    }

    pub fn supports_masks(&self) -> bool {
        self.len() <= MAX_MASK_POINTS
    }

    pub(crate) fn check_masks(&self) -> Result<()> {
        if !self.supports_masks() {
            return Err(Error::TooManyPoints {
                count: self.len(),
                max: MAX_MASK_POINTS,
            });
        }
        Ok(())
    }

    pub(crate) fn check_dense(&self) -> Result<()> {
        if self.len() > MAX_DENSE_POINTS {
            return Err(Error::TooManyPoints {
                count: self.len(),
                max: MAX_DENSE_POINTS,
            });
        }
        Ok(())
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Indices of the set bits of `mask`, ascending.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    space: FiniteSpace,
    mask: u64,
}

impl Subset {
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn complement(&self) -> Subset {
        Subset {
            space: self.space.clone(),
            mask: !self.mask & self.space.full_mask(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        bits(self.mask)
    }
}

/// A total map between finite point sets, stored as an index table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    domain: FiniteSpace,
    codomain: FiniteSpace,
    image: Vec<usize>,
}

impl PointMap {
    pub fn new(domain: FiniteSpace, codomain: FiniteSpace, image: Vec<usize>) -> Result<Self> {
        if image.len() != domain.len() {
            return Err(Error::Length {
                expected: domain.len(),
                found: image.len(),
            });
        }
        if let Some((point, &target)) = image.iter().enumerate().find(|(_, &t)| t >= codomain.len())
        {
            return Err(Error::MapOutOfRange {
                point,
                target,
                len: codomain.len(),
            });
        }
        Ok(Self {
            domain,
            codomain,
            image,
        })
    }

    /// Map given by labels: `pairs[i]` is the codomain label of domain point `i`.
    pub fn from_labels(
        domain: FiniteSpace,
        codomain: FiniteSpace,
        targets: &[&str],
    ) -> Result<Self> {
        let image = targets
            .iter()
            .map(|t| codomain.index_of(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, codomain, image)
    }

    pub fn identity(space: &FiniteSpace) -> Self {
        Self {
            domain: space.clone(),
            codomain: space.clone(),
            image: (0..space.len()).collect(),
        }
    }

    pub fn constant(domain: &FiniteSpace, codomain: &FiniteSpace, target: usize) -> Result<Self> {
        Self::new(domain.clone(), codomain.clone(), vec![target; domain.len()])
    }

    pub fn domain(&self) -> &FiniteSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSpace {
        &self.codomain
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PointMap) -> Result<PointMap> {
        if self.codomain != next.domain {
            return Err(Error::SpaceMismatch("map composition"));
        }
        Ok(PointMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            image: self.image.iter().map(|&y| next.image[y]).collect(),
        })
    }

    /// `h⁻¹(B)` as a domain mask.
    pub fn preimage(&self, mask: u64) -> u64 {
        self.image
            .iter()
            .enumerate()
            .filter(|(_, &y)| mask >> y & 1 == 1)
            .fold(0, |acc, (x, _)| acc | 1 << x)
    }

    pub fn preimage_of(&self, subset: &Subset) -> Result<Subset> {
        if subset.space != self.codomain {
            return Err(Error::SpaceMismatch("preimage of a foreign subset"));
        }
        self.domain.subset(self.preimage(subset.mask))
    }
}

/// A real-valued function on the points of a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Act<T> {
    space: FiniteSpace,
    values: Vec<T>,
}

impl<T: Scalar> Act<T> {
    pub fn new(space: &FiniteSpace, values: Vec<T>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Length {
                expected: space.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{v:?}")));
        }
        Ok(Self {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &FiniteSpace, c: T) -> Self {
        Self {
            space: space.clone(),
            values: vec![c; space.len()],
        }
    }

    /// `𝟙(A)`: one on `A`, zero elsewhere.
    pub fn indicator(subset: &Subset) -> Self {
        Self {
            space: subset.space.clone(),
            values: (0..subset.space.len())
                .map(|i| {
                    if subset.contains(i) {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect(),
        }
    }

    pub fn indicator_on(space: &FiniteSpace, subset: &Subset) -> Result<Self> {
        if subset.space() != space {
            return Err(Error::SpaceMismatch("indicator of a foreign subset"));
        }
        Ok(Self::indicator(subset))
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .map(Scalar::abs_val)
            .fold(T::zero(), T::max_of)
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .cloned()
            .reduce(T::max_of)
            .expect("non-empty act")
    }

    pub fn min_value(&self) -> T {
        self.values
            .iter()
            .cloned()
            .reduce(T::min_of)
            .expect("non-empty act")
    }

    /// Mask of `{x : f(x) >= r}`.
    pub fn upper_set(&self, r: &T) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| *v >= r)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Mask of `{x : f(x) = r}`.
    pub fn level_set(&self, r: &T) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| *v == r)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Result<Self> {
        Self::new(&self.space, self.values.iter().map(f).collect())
    }

    pub fn try_map(&self, f: impl Fn(&T) -> Result<T>) -> Result<Self> {
        let values = self.values.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(&self.space, values)
    }

    pub fn zip_with(&self, other: &Act<T>, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch("pointwise operation"));
        }
        Self::new(
            &self.space,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    pub fn plus(&self, other: &Act<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn scaled(&self, c: &T) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn shifted(&self, c: &T) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.clone() + c.clone()).collect(),
        }
    }

    /// `f ∘ h` for `f` on `h`'s codomain.
    pub fn precompose(&self, h: &PointMap) -> Result<Act<T>> {
        if h.codomain() != &self.space {
            return Err(Error::SpaceMismatch("precomposition"));
        }
        Ok(Act {
            space: h.domain().clone(),
            values: h.image().iter().map(|&y| self.values[y].clone()).collect(),
        })
    }

    /// Pointwise `f >= g`.
    pub fn dominates(&self, other: &Act<T>) -> bool {
        self.space == other.space && self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }

    pub fn near(&self, other: &Act<T>, tol: f64) -> bool {
        self.space == other.space
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.near(b, tol))
    }
}

/// A monotone set function with `u(∅) = 0` and `u(X) = 1`.
///
/// Held either as a dense table over every subset mask (at most
/// [`MAX_DENSE_POINTS`] points) or, for additive capacities, as singleton
/// masses on spaces of any size.
#[derive(Clone, Debug)]
pub struct Capacity<T> {
    space: FiniteSpace,
    repr: Repr<T>,
}

#[derive(Clone, Debug)]
enum Repr<T> {
    Dense(Vec<T>),
    Additive(Vec<T>),
}

impl<T: Scalar> Capacity<T> {
    /// Validates normalization and monotonicity.
    pub fn from_table(space: &FiniteSpace, table: Vec<T>) -> Result<Self> {
        space.check_dense()?;
        if table.len() as u64 != space.subset_count() {
            return Err(Error::Length {
                expected: space.subset_count() as usize,
                found: table.len(),
            });
        }
        if let Some(v) = table.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{v:?}")));
        }
        let full = space.full_mask() as usize;
        if !table[0].near(&T::zero(), INVARIANT_TOL) || !table[full].near(&T::one(), INVARIANT_TOL)
        {
            return Err(Error::Normalization {
                empty: table[0].render(),
                full: table[full].render(),
            });
        }
        if let Some((a, b)) = monotonicity_violation(space.len(), &table) {
            return Err(Error::Monotonicity {
                smaller: a,
                larger: b,
                smaller_value: table[a as usize].render(),
                larger_value: table[b as usize].render(),
            });
        }
        Ok(Self {
            space: space.clone(),
            repr: Repr::Dense(table),
        })
    }

    pub fn from_fn(space: &FiniteSpace, f: impl Fn(u64) -> T) -> Result<Self> {
        space.check_dense()?;
        Self::from_table(space, (0..space.subset_count()).map(f).collect())
    }

    /// Additive capacity completed from singleton values by subset sums.
    pub fn from_singletons(space: &FiniteSpace, masses: Vec<T>) -> Result<Self> {
        if masses.len() != space.len() {
            return Err(Error::Length {
                expected: space.len(),
                found: masses.len(),
            });
        }
        if let Some(v) = masses.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{v:?}")));
        }
        if let Some(i) = masses
            .iter()
            .position(|m| *m < T::zero() && !m.is_negligible())
        {
            return Err(Error::Monotonicity {
                smaller: 0,
                larger: 1u64.checked_shl(i as u32).unwrap_or(0),
                smaller_value: "0".into(),
                larger_value: masses[i].render(),
            });
        }
        let total = masses.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !total.near(&T::one(), INVARIANT_TOL) {
            return Err(Error::Normalization {
                empty: "0".into(),
                full: total.render(),
            });
        }
        Ok(Self {
            space: space.clone(),
            repr: Repr::Additive(masses),
        })
    }

    pub fn uniform(space: &FiniteSpace) -> Result<Self> {
        let n = space.len() as i64;
        Self::from_singletons(space, vec![T::ratio(1, n); space.len()])
    }

    /// The Dirac capacity at point `x`: `η(x)(A) = 𝟙_A(x)`.
    pub fn dirac(space: &FiniteSpace, x: usize) -> Result<Self> {
        if x >= space.len() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        let mut masses = vec![T::zero(); space.len()];
        masses[x] = T::one();
        Self::from_singletons(space, masses)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    /// `u(A)` for a subset mask.
    pub fn value(&self, mask: u64) -> T {
        match &self.repr {
            Repr::Dense(table) => table[mask as usize].clone(),
            Repr::Additive(masses) => bits(mask).fold(T::zero(), |acc, i| acc + masses[i].clone()),
        }
    }

    pub fn value_of(&self, subset: &Subset) -> Result<T> {
        if subset.space() != &self.space {
            return Err(Error::SpaceMismatch("capacity of a foreign subset"));
        }
        Ok(self.value(subset.mask()))
    }

    /// `u` of the set of listed points.
    pub fn measure_points(&self, points: impl IntoIterator<Item = usize>) -> T {
        match &self.repr {
            Repr::Dense(table) => table[points.into_iter().fold(0usize, |m, i| m | 1 << i)].clone(),
            Repr::Additive(masses) => points
                .into_iter()
                .fold(T::zero(), |acc, i| acc + masses[i].clone()),
        }
    }

    /// `u(S₁), u(S₂), …` for the cumulative unions `Sᵢ = B₁ ∪ … ∪ Bᵢ`.
    pub fn prefix_measures(&self, blocks: &[Vec<usize>]) -> Vec<T> {
        match &self.repr {
            Repr::Dense(table) => {
                let mut mask = 0usize;
                blocks
                    .iter()
                    .map(|b| {
                        mask |= b.iter().fold(0, |m, i| m | 1 << i);
                        table[mask].clone()
                    })
                    .collect()
            }
            Repr::Additive(masses) => {
                let mut acc = T::zero();
                blocks
                    .iter()
                    .map(|b| {
                        for &i in b {
                            acc = acc.clone() + masses[i].clone();
                        }
                        acc.clone()
                    })
                    .collect()
            }
        }
    }

    /// Dense table indexed by subset mask.
    pub fn table(&self) -> Result<Vec<T>> {
        match &self.repr {
            Repr::Dense(table) => Ok(table.clone()),
            Repr::Additive(_) => {
                self.space.check_dense()?;
                Ok((0..self.space.subset_count())
                    .map(|m| self.value(m))
                    .collect())
            }
        }
    }

    pub fn singletons(&self) -> Vec<T> {
        match &self.repr {
            Repr::Dense(table) => (0..self.space.len())
                .map(|i| table[1 << i].clone())
                .collect(),
            Repr::Additive(masses) => masses.clone(),
        }
    }

    /// Singleton masses when the capacity is held in additive form.
    pub fn masses(&self) -> Option<&[T]> {
        match &self.repr {
            Repr::Additive(m) => Some(m),
            Repr::Dense(_) => None,
        }
    }

    /// `u(A ∪ B) = u(A) + u(B)` for all disjoint `A, B`; exact on rationals,
    /// within 1e-12 on floats.
    pub fn is_additive(&self) -> bool {
        match &self.repr {
            Repr::Additive(_) => true,
            Repr::Dense(table) => (1..self.space.subset_count()).all(|mask| {
                let sum = bits(mask).fold(T::zero(), |acc, i| acc + table[1 << i].clone());
                sum.near(&table[mask as usize], INVARIANT_TOL)
            }),
        }
    }

    /// Additive form if the capacity is additive, otherwise itself.
    pub fn compacted(&self) -> Self {
        match &self.repr {
            Repr::Dense(_) if self.is_additive() => Self {
                space: self.space.clone(),
                repr: Repr::Additive(self.singletons()),
            },
            _ => self.clone(),
        }
    }

    /// `h ∘ u` for a nondecreasing `h` fixing 0 and 1. Monotonicity of `h` is
    /// checked on the values the capacity attains.
    pub fn distort(&self, h: impl Fn(&T) -> T) -> Result<Self> {
        let at_zero = h(&T::zero());
        let at_one = h(&T::one());
        if !at_zero.near(&T::zero(), INVARIANT_TOL) || !at_one.near(&T::one(), INVARIANT_TOL) {
            return Err(Error::DistortionEndpoint {
                at_zero: at_zero.render(),
                at_one: at_one.render(),
            });
        }
        let table = self.table()?;
        let mut attained = table.clone();
        attained.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        attained.dedup();
        let images: Vec<T> = attained.iter().map(&h).collect();
        for (i, pair) in images.windows(2).enumerate() {
            if pair[1] < pair[0] {
                return Err(Error::DistortionNotMonotone {
                    lower: attained[i].render(),
                    upper: attained[i + 1].render(),
                });
            }
        }
        Self::from_table(&self.space, table.iter().map(h).collect())
    }

    /// `u ∘ h⁻¹` on `h`'s codomain. Additive inputs stay additive.
    pub fn pushforward(&self, h: &PointMap) -> Result<Self> {
        if h.domain() != &self.space {
            return Err(Error::SpaceMismatch(
                "pushforward along a map from another space",
            ));
        }
        let target = h.codomain();
        match &self.repr {
            Repr::Additive(masses) => {
                let mut pushed = vec![T::zero(); target.len()];
                for (x, m) in masses.iter().enumerate() {
                    let y = h.apply(x);
                    pushed[y] = pushed[y].clone() + m.clone();
                }
                Ok(Self {
                    space: target.clone(),
                    repr: Repr::Additive(pushed),
                })
            }
            Repr::Dense(table) => {
                target.check_dense()?;
                let pushed = (0..target.subset_count())
                    .map(|mask| table[h.preimage(mask) as usize].clone())
                    .collect();
                Self::from_table(target, pushed)
            }
        }
    }

    /// Semantic equality: exact on rationals, within `tol` on floats.
    pub fn near(&self, other: &Capacity<T>, tol: f64) -> bool {
        if self.space != other.space {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Additive(a), Repr::Additive(b)) => a.iter().zip(b).all(|(x, y)| x.near(y, tol)),
            _ => match (self.table(), other.table()) {
                (Ok(a), Ok(b)) => a.iter().zip(&b).all(|(x, y)| x.near(y, tol)),
                _ => false,
            },
        }
    }

    pub fn to_f64(&self) -> Capacity<f64> {
        let convert = |v: &Vec<T>| v.iter().map(Scalar::as_f64).collect();
        Capacity {
            space: self.space.clone(),
            repr: match &self.repr {
                Repr::Dense(t) => Repr::Dense(convert(t)),
                Repr::Additive(m) => Repr::Additive(convert(m)),
            },
        }
    }

    /// Same set function on a relabeled space of equal size.
    pub fn relabel(&self, space: &FiniteSpace) -> Result<Self> {
        if space.len() != self.space.len() {
            return Err(Error::SpaceMismatch(
                "relabeling onto a space of another size",
            ));
        }
        Ok(Self {
            space: space.clone(),
            repr: self.repr.clone(),
        })
    }
}

impl<T: Scalar> PartialEq for Capacity<T> {
    fn eq(&self, other: &Self) -> bool {
        self.near(other, 0.0)
    }
}

/// Lexicographically smallest `(A, B)` with `A ⊊ B` and `u(A) > u(B)`.
fn monotonicity_violation<T: Scalar>(n: usize, table: &[T]) -> Option<(u64, u64)> {
    let size = table.len();
    let full = full_mask(n);
    let exceeds = |a: &T, b: &T| match T::BACKEND {
        crate::scalar::Backend::Rational => a > b,
        crate::scalar::Backend::Float => a.as_f64() > b.as_f64() + INVARIANT_TOL,
    };
    // min over all supersets (inclusive), by descending sweep
    let mut sup_min: Vec<T> = table.to_vec();
    for mask in (0..size as u64).rev() {
        for i in bits(!mask & full) {
            let cand = &sup_min[(mask | 1 << i) as usize];
            if *cand < sup_min[mask as usize] {
                sup_min[mask as usize] = cand.clone();
            }
        }
    }
    for a in 0..size as u64 {
        let va = &table[a as usize];
        let strict_min = bits(!a & full)
            .map(|i| &sup_min[(a | 1 << i) as usize])
            .reduce(|x, y| if y < x { y } else { x });
        match strict_min {
            Some(m) if exceeds(va, m) => {}
            _ => continue,
        }
        let comp = !a & full;
        let mut s: u64 = 0;
        loop {
            s = (s | !comp).wrapping_add(1) & comp;
            if s == 0 {
                break;
            }
            let b = a | s;
            if exceeds(va, &table[b as usize]) {
                return Some((a, b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn rby() -> FiniteSpace {
        FiniteSpace::new(["R", "B", "Y"]).unwrap()
    }

    #[test]
    fn make_space_examples() {
        assert_eq!(rby().subset_count(), 8);
        assert_eq!(
            FiniteSpace::new(Vec::<String>::new()),
            Err(Error::EmptySpace)
        );
        assert_eq!(
            FiniteSpace::new(["a", "a"]),
            Err(Error::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            FiniteSpace::numbered("p", MAX_POINTS + 1),
            Err(Error::TooManyPoints { .. })
        ));
        assert_eq!(
            FiniteSpace::numbered("p", 63).unwrap().full_mask(),
            u64::MAX >> 1
        );
        let wide = FiniteSpace::numbered("p", 101).unwrap();
        assert!(matches!(
            wide.subset(1),
            Err(Error::TooManyPoints { max: 63, .. })
        ));
    }

    #[test]
    fn subsets_reject_stray_bits() {
        let x = rby();
        assert!(x.subset(0b111).is_ok());
        assert!(matches!(
            x.subset(0b1000),
            Err(Error::MaskOutOfRange { .. })
        ));
        assert_eq!(x.mask_to_bits(0b101), "101");
        assert_eq!(x.bits_to_mask("011").unwrap(), 0b110);
    }

    #[test]
    fn indicator_examples() {
        let x = rby();
        let zero: Act<Rational> = Act::indicator(&x.empty());
        assert!(zero.values().iter().all(|v| *v == q(0, 1)));
        let one: Act<Rational> = Act::indicator(&x.full());
        assert!(one.values().iter().all(|v| *v == q(1, 1)));
        let r: Act<Rational> = Act::indicator(&x.subset_of(&["R"]).unwrap());
        assert_eq!(r.value(1), &q(0, 1));
        let other = FiniteSpace::new(["a", "b", "c"]).unwrap();
        assert!(Act::<Rational>::indicator_on(&other, &x.full()).is_err());
    }

    #[test]
    fn precompose_examples() {
        let x = rby();
        let y = FiniteSpace::new(["p", "q"]).unwrap();
        let f = Act::new(&y, vec![q(3, 1), q(-1, 2)]).unwrap();
        let id = PointMap::identity(&y);
        assert_eq!(f.precompose(&id).unwrap(), f);
        let c = PointMap::constant(&x, &y, 1).unwrap();
        assert_eq!(f.precompose(&c).unwrap(), Act::constant(&x, q(-1, 2)));
        let h = PointMap::from_labels(x.clone(), y.clone(), &["p", "q", "p"]).unwrap();
        let b = y.subset_of(&["p"]).unwrap();
        let lhs: Act<Rational> = Act::indicator(&b).precompose(&h).unwrap();
        assert_eq!(lhs, Act::indicator(&h.preimage_of(&b).unwrap()));
        assert!(f.precompose(&h).unwrap().sup_norm() <= f.sup_norm());
        assert!(matches!(
            PointMap::new(x.clone(), y.clone(), vec![0, 2, 1]),
            Err(Error::MapOutOfRange {
                point: 1,
                target: 2,
                ..
            })
        ));
    }

    #[test]
    fn validate_capacity_examples() {
        let x = rby();
        let u1 = Capacity::from_singletons(&x, vec![q(1, 3); 3]).unwrap();
        assert!(u1.is_additive());
        assert_eq!(u1.value(0b011), q(2, 3));

        let mut table = vec![q(0, 1); 8];
        table.iter_mut().skip(1).for_each(|v| *v = q(9, 10));
        assert!(matches!(
            Capacity::from_table(&x, table),
            Err(Error::Normalization { .. })
        ));

        let abc = FiniteSpace::new(["a", "b", "c"]).unwrap();
        let mut t = vec![
            q(0, 1),
            q(6, 10),
            q(0, 1),
            q(5, 10),
            q(0, 1),
            q(6, 10),
            q(0, 1),
            q(1, 1),
        ];
        t[0b110] = q(7, 10);
        let err = Capacity::from_table(&abc, t).unwrap_err();
        assert_eq!(
            err,
            Error::Monotonicity {
                smaller: 0b001,
                larger: 0b011,
                smaller_value: "3/5".into(),
                larger_value: "1/2".into(),
            }
        );
    }

    #[test]
    fn monotonicity_witness_is_lexicographically_smallest() {
        let s = FiniteSpace::numbered("p", 3).unwrap();
        // u({p1}) = 0.8 exceeds u({p0,p1}) = 0.5 and u({p1,p2}) = 0.7;
        // u({p0}) = 0.6 exceeds u({p0,p1}) too, and (1, 3) is smaller than (2, 3).
        let t: Vec<f64> = vec![0.0, 0.6, 0.8, 0.5, 0.1, 0.9, 0.7, 1.0];
        match Capacity::from_table(&s, t).unwrap_err() {
            Error::Monotonicity {
                smaller, larger, ..
            } => assert_eq!((smaller, larger), (0b001, 0b011)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn distort_examples() {
        let ab = FiniteSpace::new(["a", "b"]).unwrap();
        let u = Capacity::<Rational>::uniform(&ab).unwrap();
        assert_eq!(u.distort(|t| t.clone()).unwrap(), u);
        let sq = u.distort(|t| t.clone() * t.clone()).unwrap();
        assert_eq!(sq.value(0b01), q(1, 4));
        assert!(matches!(
            u.distort(|t| t.clone() * q(9, 10) + q(1, 10)),
            Err(Error::DistortionEndpoint { .. })
        ));
        let wobbly = |t: &Rational| {
            if *t == q(1, 3) {
                q(1, 2)
            } else if *t == q(2, 3) {
                q(1, 4)
            } else {
                t.clone()
            }
        };
        assert!(
            u.distort(wobbly).is_ok(),
            "thirds are not attained on two points"
        );
        let abc = FiniteSpace::new(["a", "b", "c"]).unwrap();
        let third = Capacity::<Rational>::uniform(&abc).unwrap();
        assert!(matches!(
            third.distort(wobbly),
            Err(Error::DistortionNotMonotone { .. })
        ));
    }

    #[test]
    fn squared_uniform_is_not_additive() {
        let x = rby();
        let p = Capacity::<Rational>::uniform(&x).unwrap();
        assert!(p.is_additive());
        let d = p.distort(|t| t.clone() * t.clone()).unwrap();
        assert!(!d.is_additive());
    }

    #[test]
    fn pushforward_examples() {
        let abc = FiniteSpace::new(["a", "b", "c"]).unwrap();
        let u = Capacity::from_singletons(&abc, vec![q(2, 10), q(3, 10), q(5, 10)]).unwrap();
        assert_eq!(u.pushforward(&PointMap::identity(&abc)).unwrap(), u);

        let star = FiniteSpace::new(["*"]).unwrap();
        let bang = PointMap::constant(&abc, &star, 0).unwrap();
        let t = u.pushforward(&bang).unwrap();
        assert_eq!(t.table().unwrap(), vec![q(0, 1), q(1, 1)]);

        let pq = FiniteSpace::new(["p", "q"]).unwrap();
        let h = PointMap::from_labels(abc.clone(), pq.clone(), &["p", "p", "q"]).unwrap();
        let pushed = u.pushforward(&h).unwrap();
        assert_eq!(pushed.value(0b01), q(1, 2));
        assert!(pushed.is_additive());
    }

    #[test]
    fn is_additive_examples() {
        let ab = FiniteSpace::new(["a", "b"]).unwrap();
        let w = Capacity::from_table(&ab, vec![q(0, 1), q(1, 10), q(1, 10), q(1, 1)]).unwrap();
        assert!(!w.is_additive());
        let d = Capacity::<Rational>::dirac(&ab, 1).unwrap();
        assert!(d.is_additive());
        assert!(Capacity::<Rational>::uniform(&rby()).unwrap().is_additive());
    }

    #[test]
    fn float_capacity_tolerates_rounding() {
        let x = rby();
        let u = Capacity::<f64>::from_singletons(&x, vec![0.1, 0.2, 0.7]).unwrap();
        assert!(u.is_additive());
        assert!(Capacity::<f64>::from_table(
            &x,
            vec![0.0, 0.1, 0.2, 0.3, 0.7, 0.8, 0.9, 1.0 + 1e-13]
        )
        .is_ok());
    }

    #[test]
    fn dense_tables_are_capped() {
        let big = FiniteSpace::numbered("p", 21).unwrap();
        assert!(matches!(
            Capacity::<f64>::from_fn(&big, |m| if m == big.full_mask() { 1.0 } else { 0.0 }),
            Err(Error::TooManyPoints {
                max: MAX_DENSE_POINTS,
                ..
            })
        ));
        let wide = FiniteSpace::numbered("u", 101).unwrap();
        let u = Capacity::<Rational>::uniform(&wide).unwrap();
        assert_eq!(u.measure_points(0..50), q(50, 101));
        assert!(u.table().is_err());
    }

    #[test]
    fn additive_and_dense_forms_compare_semantically() {
        let x = rby();
        let additive = Capacity::from_singletons(&x, vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        let dense = Capacity::from_table(&x, additive.table().unwrap()).unwrap();
        assert!(dense.masses().is_none());
        assert_eq!(additive, dense);
        assert_eq!(
            dense.compacted().masses().unwrap(),
            additive.masses().unwrap()
        );
        assert!(matches!(
            Capacity::from_singletons(&x, vec![q(1, 2), q(1, 4), q(1, 5)]),
            Err(Error::Normalization { .. })
        ));
        assert!(matches!(
            Capacity::from_singletons(&x, vec![q(3, 2), q(-1, 4), q(-1, 4)]),
            Err(Error::Monotonicity {
                smaller: 0,
                larger: 0b010,
                ..
            })
        ));
    }
}
