//! A finite truncation of the tower `𝔖ⁿX`: level `n + 1` holds every
//! probability on level `n` whose masses lie on the grid `{0, 1/m, …, 1}`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{binomial, Rational, Scalar};
use crate::space::{Capacity, FiniteSpace};
use crate::uncertainty::UncertaintySpace;

pub const MAX_BASE: usize = 3;
pub const MAX_GRID: u32 = 4;
pub const MAX_DEPTH: usize = 4;
pub const MAX_LEVEL_SIZE: usize = 5000;

#[derive(Clone, Debug)]
struct TowerLevel {
    space: FiniteSpace,
    /// Grid numerators of each point's masses over the previous level.
    points: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

#[derive(Clone, Debug)]
pub struct GridTower {
    grid: u32,
    levels: Vec<TowerLevel>,
}

/// An element of `𝔖ⁿX`: an additive capacity on level `n − 1`, given by its
/// singleton masses. It need not lie on the grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerElement {
    pub level: usize,
    pub masses: Vec<Rational>,
}

/// All compositions of `total` into `parts` non-negative parts, in
/// lexicographic order.
fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(parts: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            go(parts - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(parts, total, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Number of grid probabilities with denominator `grid` on `points` points.
pub fn grid_level_size(points: usize, grid: u32) -> Option<usize> {
    let n = u32::try_from(points + grid as usize - 1).ok()?;
    num_traits::ToPrimitive::to_usize(&binomial(n, grid))
}

pub fn build_tower(base: &FiniteSpace, grid: u32, depth: usize) -> Result<GridTower> {
    if base.len() > MAX_BASE {
        return Err(Error::SizeGuard(format!(
            "base has {} points, at most {MAX_BASE}",
            base.len()
        )));
    }
    if grid == 0 || grid > MAX_GRID {
        return Err(Error::InvalidParams(format!(
            "grid must be in 1..={MAX_GRID}, got {grid}"
        )));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::InvalidParams(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    let mut levels = vec![TowerLevel {
        space: base.clone(),
        points: Vec::new(),
        index: HashMap::new(),
    }];
    for n in 1..=depth {
        let below = levels[n - 1].space.len();
        let size = grid_level_size(below, grid).unwrap_or(usize::MAX);
        if size > MAX_LEVEL_SIZE {
            return Err(Error::SizeGuard(format!(
                "level {n} would have {size} points, at most {MAX_LEVEL_SIZE}"
            )));
        }
        let points = compositions(below, grid);
        debug_assert_eq!(points.len(), size);
        let space = FiniteSpace::numbered(&format!("l{n}_"), points.len())?;
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        levels.push(TowerLevel {
            space,
            points,
            index,
        });
    }
    Ok(GridTower { grid, levels })
}

impl GridTower {
    pub fn grid(&self) -> u32 {
        self.grid
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn base(&self) -> &FiniteSpace {
        &self.levels[0].space
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: n,
                len: self.depth() + 1,
            });
        }
        Ok(())
    }

    pub fn level_space(&self, n: usize) -> Result<&FiniteSpace> {
        self.check_level(n)?;
        Ok(&self.levels[n].space)
    }

    pub fn level_size(&self, n: usize) -> Result<usize> {
        Ok(self.level_space(n)?.len())
    }

    pub fn numerators(&self, n: usize, i: usize) -> Result<&[u32]> {
        self.check_level(n)?;
        self.levels[n]
            .points
            .get(i)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownPoint(format!("level {n} point #{i}")))
    }

    /// Point `i` of level `n ≥ 1` as an element of `𝔖ⁿX`.
    pub fn point(&self, n: usize, i: usize) -> Result<TowerElement> {
        if n == 0 {
            return Err(Error::InvalidParams(
                "base points are not capacities".into(),
            ));
        }
        let m = self.grid as i64;
        let masses = self
            .numerators(n, i)?
            .iter()
            .map(|&k| Rational::ratio(k as i64, m))
            .collect();
        Ok(TowerElement { level: n, masses })
    }

    pub fn points(&self, n: usize) -> Result<Vec<TowerElement>> {
        (0..self.level_size(n)?).map(|i| self.point(n, i)).collect()
    }

    fn check_element(&self, e: &TowerElement) -> Result<()> {
        if e.level == 0 {
            return Err(Error::InvalidParams(
                "tower elements live at level 1 or above".into(),
            ));
        }
        let below = self.level_size(e.level - 1)?;
        if e.masses.len() != below {
            return Err(Error::Length {
                expected: below,
                found: e.masses.len(),
            });
        }
        Ok(())
    }

    /// Index of `e` among the enumerated points of its level, if on the grid.
    pub fn grid_index(&self, e: &TowerElement) -> Result<Option<usize>> {
        self.check_element(e)?;
        if e.level > self.depth() {
            return Ok(None);
        }
        let m = Rational::from_int(self.grid as i64);
        let mut key = Vec::with_capacity(e.masses.len());
        for mass in &e.masses {
            let scaled = mass * &m;
            if !scaled.is_integer() || scaled < Rational::zero() {
                return Ok(None);
            }
            let Ok(k) = u32::try_from(scaled.to_integer()) else {
                return Ok(None);
            };
            key.push(k);
        }
        Ok(self.levels[e.level].index.get(&key).copied())
    }

    pub fn capacity(&self, e: &TowerElement) -> Result<Capacity<Rational>> {
        self.check_element(e)?;
        Capacity::from_singletons(self.level_space(e.level - 1)?, e.masses.clone())
    }

    /// `η`: the Dirac at `e` over level `e.level`, an element one level up.
    pub fn eta(&self, e: &TowerElement) -> Result<TowerElement> {
        let i = self.grid_index(e)?.ok_or(Error::OffGrid(e.level))?;
        let mut masses = vec![Rational::zero(); self.level_size(e.level)?];
        masses[i] = Rational::one();
        Ok(TowerElement {
            level: e.level + 1,
            masses,
        })
    }

    /// `μ(W)({x}) = Σ_w W({w})·w({x})` for `W` at level `n ≥ 2`.
    pub fn mu(&self, e: &TowerElement) -> Result<TowerElement> {
        self.check_element(e)?;
        if e.level < 2 {
            return Err(Error::InvalidParams(
                "μ needs an element of level 2 or above".into(),
            ));
        }
        let inner = e.level - 1;
        let m = Rational::from_int(self.grid as i64);
        let mut masses = vec![Rational::zero(); self.level_size(inner - 1)?];
        for (w, weight) in self.levels[inner].points.iter().zip(&e.masses) {
            if weight.is_zero() {
                continue;
            }
            for (acc, &k) in masses.iter_mut().zip(w) {
                *acc += weight * Rational::from_int(k as i64) / &m;
            }
        }
        Ok(TowerElement {
            level: inner,
            masses,
        })
    }

    /// `𝔖η(e)`: the pushforward of `e` along `η`, one level up.
    pub fn push_eta(&self, e: &TowerElement) -> Result<TowerElement> {
        self.check_element(e)?;
        let here = e.level;
        if here > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: here,
                len: self.depth() + 1,
            });
        }
        let below = here - 1;
        let size = self.level_size(below)?;
        let mut masses = vec![Rational::zero(); self.level_size(here)?];
        for (i, mass) in e.masses.iter().enumerate() {
            let dirac = if below == 0 {
                let mut d = vec![Rational::zero(); size];
                d[i] = Rational::one();
                TowerElement {
                    level: 1,
                    masses: d,
                }
            } else {
                self.eta(&self.point(below, i)?)?
            };
            let j = self.grid_index(&dirac)?.ok_or(Error::OffGrid(here))?;
            masses[j] += mass;
        }
        Ok(TowerElement {
            level: here + 1,
            masses,
        })
    }

    /// `ι^{from,to}`: identity, iterated `μ` downwards, iterated `η` upwards.
    pub fn iota(&self, from: usize, to: usize, e: &TowerElement) -> Result<TowerElement> {
        for n in [from, to] {
            if n == 0 || n > self.depth() {
                return Err(Error::LevelOutOfRange {
                    level: n,
                    len: self.depth() + 1,
                });
            }
        }
        if e.level != from {
            return Err(Error::InvalidParams(format!(
                "element is at level {}, not {from}",
                e.level
            )));
        }
        let mut current = e.clone();
        while current.level > to {
            current = self.mu(&current)?;
        }
        while current.level < to {
            current = self.eta(&current)?;
        }
        Ok(current)
    }

    /// Level `n ≥ 1` as an uncertainty space over level `n − 1`.
    pub fn uncertainty_space(&self, n: usize) -> Result<UncertaintySpace<Rational>> {
        let names = self.level_space(n)?.clone();
        let entries = self
            .points(n)?
            .iter()
            .enumerate()
            .map(|(i, e)| Ok((names.label(i).to_string(), self.capacity(e)?)))
            .collect::<Result<Vec<_>>>()?;
        UncertaintySpace::new(self.level_space(n - 1)?, entries)
    }
}

/// `(u₁, u₂, …)` with `u_n` an element of level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveVector(pub Vec<TowerElement>);

impl ProjectiveVector {
    /// `u₁ = e`, `u_{n+1} = η(u_n)` up to the tower depth.
    pub fn from_eta_chain(tower: &GridTower, e: &TowerElement) -> Result<Self> {
        if e.level != 1 {
            return Err(Error::InvalidParams("chains start at level 1".into()));
        }
        let mut entries = vec![e.clone()];
        while entries.len() < tower.depth() {
            let next = tower.eta(entries.last().expect("non-empty"))?;
            entries.push(next);
        }
        Ok(Self(entries))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Consistency {
    pub consistent: bool,
    /// Smallest `n` with `u_n ≠ μ(u_{n+1})`.
    pub first_failure: Option<usize>,
}

pub fn projective_consistency(tower: &GridTower, vector: &ProjectiveVector) -> Result<Consistency> {
    for (i, e) in vector.0.iter().enumerate() {
        if e.level != i + 1 {
            return Err(Error::InvalidParams(format!(
                "entry {} sits at level {}",
                i + 1,
                e.level
            )));
        }
        tower.check_element(e)?;
    }
    for (i, pair) in vector.0.windows(2).enumerate() {
        if tower.mu(&pair[1])? != pair[0] {
            return Ok(Consistency {
                consistent: false,
                first_failure: Some(i + 1),
            });
        }
    }
    Ok(Consistency {
        consistent: true,
        first_failure: None,
    })
}
