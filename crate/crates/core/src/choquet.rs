//! Choquet integration and comonotonicity on finite spaces.
//!
//! Every act on a finite space is a step function, so the integral is the
//! sorted sum `Σ (aᵢ − aᵢ₊₁)·u(A₁ ∪ … ∪ Aᵢ)` with `aₙ₊₁ = 0`. The sentinel
//! takes care of negative values: the last term is `aₙ·u(X) = aₙ`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{Act, Capacity, FiniteSpace};

/// Disjoint blocks (point index lists) with non-increasing level values.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainDecomposition<T> {
    space: FiniteSpace,
    blocks: Vec<Vec<usize>>,
    levels: Vec<T>,
}

impl<T: Scalar> ChainDecomposition<T> {
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// Block masks; the space must be mask-addressable.
    pub fn block_masks(&self) -> Result<Vec<u64>> {
        self.space.check_masks()?;
        Ok(self
            .blocks
            .iter()
            .map(|b| b.iter().fold(0u64, |m, i| m | 1 << i))
            .collect())
    }

    /// Masks of `A₁ ∪ … ∪ Aᵢ` for each `i`.
    pub fn cumulative_masks(&self) -> Result<Vec<u64>> {
        Ok(self
            .block_masks()?
            .into_iter()
            .scan(0u64, |acc, b| {
                *acc |= b;
                Some(*acc)
            })
            .collect())
    }

    /// `Σ aᵢ·𝟙(Aᵢ)`.
    pub fn reconstruct(&self) -> Act<T> {
        let mut values = vec![T::zero(); self.space.len()];
        for (block, level) in self.blocks.iter().zip(&self.levels) {
            for &i in block {
                values[i] = level.clone();
            }
        }
        Act::new(&self.space, values).expect("levels are finite")
    }

    /// The sorted sum given `u(S₁), …, u(Sₙ)` for the cumulative unions.
    pub fn sorted_sum(&self, prefix_measures: &[T]) -> T {
        let mut total = T::zero();
        for (i, level) in self.levels.iter().enumerate() {
            let next = self.levels.get(i + 1).cloned().unwrap_or_else(T::zero);
            let step = level.clone() - next;
            if !step.is_zero() {
                total = total + step * prefix_measures[i].clone();
            }
        }
        total
    }

    /// Sorted-sum integral against a capacity on the same space.
    pub fn integrate(&self, u: &Capacity<T>) -> Result<T> {
        if u.space() != &self.space {
            return Err(Error::SpaceMismatch("capacity and decomposition"));
        }
        Ok(self.sorted_sum(&u.prefix_measures(&self.blocks)))
    }

    /// Sorted-sum integral against an arbitrary set function on masks.
    pub fn integrate_with(&self, measure: impl Fn(u64) -> T) -> Result<T> {
        let prefix: Vec<T> = self.cumulative_masks()?.into_iter().map(measure).collect();
        Ok(self.sorted_sum(&prefix))
    }
}

/// Groups equal values into blocks, sorted by value descending.
pub fn decompose<T: Scalar>(f: &Act<T>) -> ChainDecomposition<T> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f.value(b).partial_cmp(f.value(a)).expect("finite values"));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut levels: Vec<T> = Vec::new();
    for i in order {
        let v = f.value(i);
        match levels.last() {
            Some(last) if last == v => blocks.last_mut().expect("paired with levels").push(i),
            _ => {
                blocks.push(vec![i]);
                levels.push(v.clone());
            }
        }
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    ChainDecomposition {
        space: f.space().clone(),
        blocks,
        levels,
    }
}

/// `u({f ≥ r})` for `r ≥ 0`, `u({f ≥ r}) − 1` otherwise.
pub fn upper_level_distribution<T: Scalar>(u: &Capacity<T>, f: &Act<T>, r: &T) -> Result<T> {
    same_space(u, f)?;
    let upper = (0..f.len()).filter(|&i| f.value(i) >= r);
    let v = u.measure_points(upper);
    Ok(if *r >= T::zero() { v } else { v - T::one() })
}

pub fn choquet_integral<T: Scalar>(u: &Capacity<T>, f: &Act<T>) -> Result<T> {
    same_space(u, f)?;
    decompose(f).integrate(u)
}

/// Choquet sum against a set function that need not be normalized.
pub fn choquet_with<T: Scalar>(measure: impl Fn(u64) -> T, f: &Act<T>) -> Result<T> {
    decompose(f).integrate_with(measure)
}

/// First pair `(x, y)` with `(f(x) − f(y))(g(x) − g(y)) < 0`, if any.
pub fn comonotonicity_violation<T: Scalar>(
    f: &Act<T>,
    g: &Act<T>,
) -> Result<Option<(usize, usize)>> {
    if f.space() != g.space() {
        return Err(Error::SpaceMismatch("comonotonicity"));
    }
    for x in 0..f.len() {
        for y in x + 1..f.len() {
            let df = f.value(x).clone() - f.value(y).clone();
            let dg = g.value(x).clone() - g.value(y).clone();
            if df * dg < T::zero() {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

pub fn are_comonotonic<T: Scalar>(f: &Act<T>, g: &Act<T>) -> Result<bool> {
    Ok(comonotonicity_violation(f, g)?.is_none())
}

/// One block list on which both acts are non-increasing in lockstep.
pub fn common_chain<T: Scalar>(
    f: &Act<T>,
    g: &Act<T>,
) -> Result<(ChainDecomposition<T>, ChainDecomposition<T>)> {
    if let Some((x, y)) = comonotonicity_violation(f, g)? {
        return Err(Error::NotComonotonic(x, y));
    }
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| {
        f.value(b)
            .partial_cmp(f.value(a))
            .expect("finite values")
            .then_with(|| g.value(b).partial_cmp(g.value(a)).expect("finite values"))
    });
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut f_levels: Vec<T> = Vec::new();
    let mut g_levels: Vec<T> = Vec::new();
    for i in order {
        let (fv, gv) = (f.value(i), g.value(i));
        match (f_levels.last(), g_levels.last()) {
            (Some(lf), Some(lg)) if lf == fv && lg == gv => {
                blocks.last_mut().expect("paired with levels").push(i)
            }
            _ => {
                blocks.push(vec![i]);
                f_levels.push(fv.clone());
                g_levels.push(gv.clone());
            }
        }
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    let space = f.space().clone();
    Ok((
        ChainDecomposition {
            space: space.clone(),
            blocks: blocks.clone(),
            levels: f_levels,
        },
        ChainDecomposition {
            space,
            blocks,
            levels: g_levels,
        },
    ))
}

fn same_space<T: Scalar>(u: &Capacity<T>, f: &Act<T>) -> Result<()> {
    if u.space() != f.space() {
        return Err(Error::SpaceMismatch("capacity and act"));
    }
    Ok(())
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

    fn act(space: &FiniteSpace, v: &[i64]) -> Act<Rational> {
        Act::new(space, v.iter().map(|&x| q(x, 1)).collect()).unwrap()
    }

    fn thirds() -> Capacity<Rational> {
        Capacity::from_singletons(&rby(), vec![q(1, 3); 3]).unwrap()
    }

    /// Improper-integral definition evaluated on a midpoint grid.
    fn riemann_oracle(u: &Capacity<f64>, f: &Act<f64>, steps: usize) -> f64 {
        let lo = f.min_value().min(0.0);
        let hi = f.max_value().max(0.0);
        let h = (hi - lo) / steps as f64;
        (0..steps)
            .map(|i| {
                let r = lo + (i as f64 + 0.5) * h;
                upper_level_distribution(u, f, &r).unwrap() * h
            })
            .sum()
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&act(&rby(), &[11, 1, 0]));
        assert_eq!(d.block_masks().unwrap(), vec![0b001, 0b010, 0b100]);
        assert_eq!(d.levels(), &[q(11, 1), q(1, 1), q(0, 1)]);

        let c = decompose(&Act::constant(&rby(), q(4, 1)));
        assert_eq!(c.block_masks().unwrap(), vec![0b111]);

        let p = FiniteSpace::numbered("p", 3).unwrap();
        let d = decompose(&act(&p, &[5, 5, 2]));
        assert_eq!(d.blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(d.reconstruct(), act(&p, &[5, 5, 2]));
    }

    #[test]
    fn upper_level_distribution_examples() {
        let u = thirds();
        let f = act(&rby(), &[11, 1, 0]);
        assert_eq!(
            upper_level_distribution(&u, &f, &q(12, 1)).unwrap(),
            q(0, 1)
        );
        assert_eq!(
            upper_level_distribution(&u, &f, &q(-1, 1)).unwrap(),
            q(0, 1)
        );
        assert_eq!(upper_level_distribution(&u, &f, &q(2, 1)).unwrap(), q(1, 3));
    }

    #[test]
    fn choquet_examples() {
        let x = rby();
        let w = Capacity::from_table(
            &x,
            vec![
                q(0, 1),
                q(1, 10),
                q(1, 5),
                q(1, 2),
                q(1, 10),
                q(1, 5),
                q(1, 4),
                q(1, 1),
            ],
        )
        .unwrap();
        for mask in 0..8 {
            let ind: Act<Rational> = Act::indicator(&x.subset(mask).unwrap());
            assert_eq!(choquet_integral(&w, &ind).unwrap(), w.value(mask));
        }
        assert_eq!(
            choquet_integral(&w, &Act::constant(&x, q(-7, 3))).unwrap(),
            q(-7, 3)
        );
        assert_eq!(
            choquet_integral(&thirds(), &act(&x, &[11, 1, 0])).unwrap(),
            q(4, 1)
        );

        let one = FiniteSpace::new(["*"]).unwrap();
        let star = Capacity::<Rational>::dirac(&one, 0).unwrap();
        assert_eq!(
            choquet_integral(&star, &act(&one, &[-2])).unwrap(),
            q(-2, 1)
        );
    }

    #[test]
    fn additive_capacity_gives_weighted_sum() {
        let x = rby();
        let u = Capacity::from_singletons(&x, vec![q(1, 5), q(3, 10), q(1, 2)]).unwrap();
        let f = act(&x, &[-3, 7, 2]);
        let weighted = q(-3, 5) + q(21, 10) + q(1, 1);
        assert_eq!(choquet_integral(&u, &f).unwrap(), weighted);
    }

    #[test]
    fn non_additive_nonlinearity_witness() {
        let ab = FiniteSpace::new(["a", "b"]).unwrap();
        let u = Capacity::from_table(&ab, vec![q(0, 1), q(1, 10), q(1, 10), q(1, 1)]).unwrap();
        let ia = act(&ab, &[1, 0]);
        let ib = act(&ab, &[0, 1]);
        let separate = choquet_integral(&u, &ia).unwrap() + choquet_integral(&u, &ib).unwrap();
        let joint = choquet_integral(&u, &ia.plus(&ib).unwrap()).unwrap();
        assert_eq!(separate, q(1, 5));
        assert_eq!(joint, q(1, 1));
        assert!(!are_comonotonic(&ia, &ib).unwrap());
    }

    #[test]
    fn comonotonic_examples() {
        let x = rby();
        let f = act(&x, &[11, 1, 0]);
        let g = act(&x, &[11, 10, 0]);
        assert!(are_comonotonic(&f, &Act::constant(&x, q(3, 1))).unwrap());
        assert!(are_comonotonic(&f, &g).unwrap());
        let ab = FiniteSpace::new(["a", "b"]).unwrap();
        assert!(!are_comonotonic(&act(&ab, &[1, 0]), &act(&ab, &[0, 1])).unwrap());
    }

    #[test]
    fn common_chain_examples() {
        let x = rby();
        let f = act(&x, &[11, 1, 0]);
        let g = act(&x, &[11, 10, 0]);
        let (cf, cg) = common_chain(&f, &g).unwrap();
        assert_eq!(cf.block_masks().unwrap(), vec![0b001, 0b010, 0b100]);
        assert_eq!(cf.blocks(), cg.blocks());
        assert_eq!(cg.levels(), &[q(11, 1), q(10, 1), q(0, 1)]);
        assert_eq!(cf.reconstruct(), f);
        assert_eq!(cg.reconstruct(), g);

        let (a, b) = common_chain(&f, &f).unwrap();
        assert_eq!(a, b);

        let ab = FiniteSpace::new(["a", "b"]).unwrap();
        assert_eq!(
            common_chain(&act(&ab, &[1, 0]), &act(&ab, &[0, 1])),
            Err(Error::NotComonotonic(0, 1))
        );
    }

    #[test]
    fn common_chain_splits_blocks_where_only_one_act_ties() {
        let p = FiniteSpace::numbered("p", 3).unwrap();
        let f = act(&p, &[2, 2, 0]);
        let g = act(&p, &[5, 3, 0]);
        let (cf, cg) = common_chain(&f, &g).unwrap();
        assert_eq!(cf.block_masks().unwrap(), vec![0b001, 0b010, 0b100]);
        assert_eq!(cf.levels(), &[q(2, 1), q(2, 1), q(0, 1)]);
        assert_eq!(cg.levels(), &[q(5, 1), q(3, 1), q(0, 1)]);
    }

    #[test]
    fn riemann_oracle_agrees_on_float_examples() {
        let p = FiniteSpace::numbered("p", 4).unwrap();
        let u = Capacity::<f64>::from_fn(&p, |m| (m.count_ones() as f64 / 4.0).powf(1.7)).unwrap();
        for values in [
            vec![0.3, -1.2, 2.5, 0.0],
            vec![-0.7, -0.2, -1.9, -0.4],
            vec![1.25, 1.25, 0.5, 3.0],
        ] {
            let f = Act::new(&p, values).unwrap();
            let exact = choquet_integral(&u, &f).unwrap();
            let oracle = riemann_oracle(&u, &f, 2_000_000);
            assert!((exact - oracle).abs() < 1e-6, "{exact} vs {oracle}");
        }
    }

    #[test]
    fn mixed_sign_integral_by_hand() {
        let ab = FiniteSpace::new(["a", "b"]).unwrap();
        let u = Capacity::from_table(&ab, vec![q(0, 1), q(1, 4), q(1, 2), q(1, 1)]).unwrap();
        // ∫₀² u({a}) dr + ∫₋₁⁰ (u({a}) − 1) dr = 1/2 − 3/4
        let f = act(&ab, &[2, -1]);
        assert_eq!(choquet_integral(&u, &f).unwrap(), q(-1, 4));
    }
}
