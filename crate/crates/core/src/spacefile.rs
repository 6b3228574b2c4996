//! JSON description of a finite space with named capacities and acts.
//!
//! ```json
//! { "points": ["R", "B", "Y"],
//!   "capacities": { "u1": { "mode": "singletons-additive", "values": { "R": "1/3", "B": "1/3", "Y": "1/3" } } },
//!   "acts": { "f": ["11", "1", "0"] } }
//! ```
//!
//! In `full` mode the keys are bitstrings whose leftmost character is the
//! first point. The empty and full sets may be omitted.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{Act, Capacity, FiniteSpace};
use crate::uncertainty::UncertaintySpace;

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberText {
    Text(String),
    Number(serde_json::Number),
}

impl NumberText {
    fn parse<T: Scalar>(&self) -> Result<T> {
        match self {
            NumberText::Text(s) => T::parse_str(s),
            NumberText::Number(n) => T::parse_str(&n.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    SingletonsAdditive,
    Full,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCapacity {
    mode: Mode,
    values: BTreeMap<String, NumberText>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    points: Vec<String>,
    #[serde(default)]
    capacities: BTreeMap<String, RawCapacity>,
    #[serde(default)]
    acts: BTreeMap<String, Vec<NumberText>>,
}

#[derive(Clone, Debug)]
pub struct SpaceFile<T> {
    pub space: FiniteSpace,
    /// Sorted by name.
    pub capacities: Vec<(String, Capacity<T>)>,
    /// Sorted by name.
    pub acts: Vec<(String, Act<T>)>,
}

fn context(what: &str, name: &str, err: Error) -> Error {
    Error::SpaceFile(format!("{what} `{name}`: {err}"))
}

fn build_capacity<T: Scalar>(space: &FiniteSpace, raw: &RawCapacity) -> Result<Capacity<T>> {
    match raw.mode {
        Mode::SingletonsAdditive => {
            let mut masses = vec![T::zero(); space.len()];
            for (label, v) in &raw.values {
                masses[space.index_of(label)?] = v.parse()?;
            }
            Capacity::from_singletons(space, masses)
        }
        Mode::Full => {
            space.check_dense()?;
            let mut table: Vec<Option<T>> = vec![None; space.subset_count() as usize];
            table[0] = Some(T::zero());
            table[space.full_mask() as usize] = Some(T::one());
            for (bits, v) in &raw.values {
                table[space.bits_to_mask(bits)? as usize] = Some(v.parse()?);
            }
            let table = table
                .into_iter()
                .enumerate()
                .map(|(mask, v)| {
                    v.ok_or_else(|| {
                        Error::SpaceFile(format!(
                            "missing subset {}",
                            space.mask_to_bits(mask as u64)
                        ))
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            Capacity::from_table(space, table)
        }
    }
}

impl<T: Scalar> SpaceFile<T> {
    pub fn parse(json: &str) -> Result<Self> {
        let raw: RawFile =
            serde_json::from_str(json).map_err(|e| Error::SpaceFile(e.to_string()))?;
        let space = FiniteSpace::new(raw.points)?;
        let capacities = raw
            .capacities
            .iter()
            .map(|(name, c)| {
                build_capacity(&space, c)
                    .map(|cap| (name.clone(), cap))
                    .map_err(|e| context("capacity", name, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let acts = raw
            .acts
            .iter()
            .map(|(name, values)| {
                values
                    .iter()
                    .map(NumberText::parse)
                    .collect::<Result<Vec<T>>>()
                    .and_then(|v| Act::new(&space, v))
                    .map(|act| (name.clone(), act))
                    .map_err(|e| context("act", name, e))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space,
            capacities,
            acts,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::SpaceFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn capacity(&self, name: &str) -> Result<&Capacity<T>> {
        self.capacities
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn act(&self, name: &str) -> Result<&Act<T>> {
        self.acts
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| a)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn uncertainty_space(&self) -> Result<UncertaintySpace<T>> {
        UncertaintySpace::new(&self.space, self.capacities.clone())
    }
}
