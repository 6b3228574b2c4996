//! Seeded generators for random spaces, capacities, acts and maps.
//!
//! Every value is a small rational `p/q`, so the same draw is exact on the
//! rational backend and well conditioned on `f64`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;
use crate::space::{bits, Act, Capacity, FiniteSpace, PointMap};

pub type TrialRng = ChaCha8Rng;

/// Independent stream for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_space(rng: &mut impl Rng, min: usize, max: usize) -> FiniteSpace {
    let n = rng.gen_range(min..=max);
    FiniteSpace::numbered("x", n).expect("small space")
}

pub fn random_value<T: Scalar>(rng: &mut impl Rng, bound: i64) -> T {
    let den = rng.gen_range(1..=4);
    T::ratio(rng.gen_range(-bound * den..=bound * den), den)
}

pub fn random_nonnegative<T: Scalar>(rng: &mut impl Rng, bound: i64) -> T {
    let den = rng.gen_range(1..=4);
    T::ratio(rng.gen_range(0..=bound * den), den)
}

pub fn random_act<T: Scalar>(rng: &mut impl Rng, space: &FiniteSpace) -> Act<T> {
    let values = (0..space.len()).map(|_| random_value(rng, 6)).collect();
    Act::new(space, values).expect("finite values")
}

/// Monotone by construction: each subset's value is the largest value among
/// its immediate subsets plus a random increment, then normalized.
pub fn random_capacity<T: Scalar>(rng: &mut impl Rng, space: &FiniteSpace) -> Capacity<T> {
    let n = space.len();
    let size = 1usize << n;
    let mut raw = vec![0i64; size];
    let mut order: Vec<usize> = (1..size).collect();
    order.sort_by_key(|m| m.count_ones());
    for mask in order {
        let below = bits(mask as u64)
            .map(|i| raw[mask & !(1 << i)])
            .max()
            .unwrap_or(0);
        let bump = if mask.count_ones() == 1 {
            rng.gen_range(0..=4)
        } else {
            rng.gen_range(0..=3)
        };
        raw[mask] = below + bump;
    }
    if raw[size - 1] == 0 {
        raw.iter_mut().skip(1).for_each(|v| *v = 1);
    }
    let total = raw[size - 1];
    let table = raw.into_iter().map(|v| T::ratio(v, total)).collect();
    Capacity::from_table(space, table).expect("monotone by construction")
}

/// Random singleton masses, some of them possibly zero.
pub fn random_additive<T: Scalar>(rng: &mut impl Rng, space: &FiniteSpace) -> Capacity<T> {
    let mut raw: Vec<i64> = (0..space.len()).map(|_| rng.gen_range(0..=5)).collect();
    if raw.iter().all(|&w| w == 0) {
        let i = rng.gen_range(0..raw.len());
        raw[i] = 1;
    }
    let total: i64 = raw.iter().sum();
    Capacity::from_singletons(space, raw.into_iter().map(|w| T::ratio(w, total)).collect())
        .expect("normalized")
}

pub fn random_map(rng: &mut impl Rng, domain: &FiniteSpace, codomain: &FiniteSpace) -> PointMap {
    let image = (0..domain.len())
        .map(|_| rng.gen_range(0..codomain.len()))
        .collect();
    PointMap::new(domain.clone(), codomain.clone(), image).expect("in range")
}

fn sorted_along<T: Scalar>(rng: &mut impl Rng, space: &FiniteSpace, perm: &[usize]) -> Act<T> {
    let mut values: Vec<T> = (0..space.len()).map(|_| random_value(rng, 6)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut placed = vec![T::zero(); space.len()];
    for (rank, &point) in perm.iter().enumerate() {
        placed[point] = values[rank].clone();
    }
    Act::new(space, placed).expect("finite values")
}

/// Two acts sorted along one random chain of the points, hence comonotonic.
pub fn random_comonotonic_pair<T: Scalar>(
    rng: &mut impl Rng,
    space: &FiniteSpace,
) -> (Act<T>, Act<T>) {
    let mut perm: Vec<usize> = (0..space.len()).collect();
    perm.shuffle(rng);
    let f = sorted_along(rng, space, &perm);
    let g = sorted_along(rng, space, &perm);
    (f, g)
}
