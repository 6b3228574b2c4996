//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::num::NonZeroUsize;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gauss_quad::GaussLegendre;

use choquet_tower::category::monad_counterexample;
use choquet_tower::ellsberg::{
    ellsberg_acts, ellsberg_report, paradox_demo, urn_points, EllsbergReport, ParadoxOutcome,
    UrnParams, Variant, Verdict,
};
use choquet_tower::hierarchy::conditional_act;
use choquet_tower::laws::{run_suite, LawConfig, LawReport, Suite};
use choquet_tower::space::Act;
use choquet_tower::{comonotone_counterexample, Rational, Scalar};

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report<T: Scalar>(
    variant: Variant,
    big_n: u32,
    alpha: f64,
    u1: T,
    layer: usize,
) -> Result<EllsbergReport<T>, String> {
    let params = UrnParams::new(big_n, alpha, u1).map_err(|e| e.to_string())?;
    ellsberg_report(variant, &params, layer).map_err(|e| e.to_string())
}

/// First-layer values `u1 · u_k(A_i)` of the four acts, from the urn formulas.
fn first_layer(big_n: u32, alpha: f64, u1: f64) -> Vec<[f64; 4]> {
    let two_n = 2 * big_n;
    (0..=two_n)
        .map(|k| {
            let t = k as f64 / two_n as f64;
            let b = 2.0 / 3.0 * t.powf(alpha);
            let y = 2.0 / 3.0 * (1.0 - t).powf(alpha);
            [u1 / 3.0, u1 * b, u1 * 2.0 / 3.0, u1 * (1.0 / 3.0 + y)]
        })
        .collect()
}

/// `∫₀¹ Σ_k C(2N,k) p^k (1−p)^{2N−k} V_k dp` by Gauss–Legendre.
fn beta_mixture(values: &[[f64; 4]]) -> [f64; 4] {
    let n = values.len() - 1;
    let rule = GaussLegendre::new(NonZeroUsize::new(n + 8).expect("positive"));
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = rule.integrate(0.0, 1.0, |p: f64| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let c = (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64);
                    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32) * v[i]
                })
                .sum()
        });
    }
    out
}

fn passed(r: &LawReport, expected: &[(&str, usize)]) -> Result<String, String> {
    for (law, trials) in expected {
        let outcome = r.law(law).ok_or_else(|| format!("law `{law}` missing"))?;
        ensure(outcome.trials >= *trials, || {
            format!("{law}: only {} trials", outcome.trials)
        })?;
        ensure(outcome.passed(), || {
            format!("{law}: {:?}", outcome.first_counterexample)
        })?;
    }
    ensure(r.passed, || format!("{:?}", r.laws))?;
    Ok(r.laws
        .iter()
        .map(|l| format!("{} {}/{}", l.law, l.trials - l.failures, l.trials))
        .collect::<Vec<_>>()
        .join("; "))
}

fn c1() -> Outcome {
    let u1 = q(3, 5);
    for variant in [Variant::X, Variant::Y] {
        for big_n in [1, 10, 50] {
            let r = report(variant, big_n, 1.0, u1.clone(), 2)?;
            let want = [
                u1.clone() / q(3, 1),
                u1.clone() / q(3, 1),
                q(2, 1) * &u1 / q(3, 1),
                q(2, 1) * &u1 / q(3, 1),
            ];
            for row in &r.rows {
                ensure(row.values == want, || {
                    format!("{variant} N={big_n}: {:?}", row.values)
                })?;
            }
        }
    }
    Ok("V2 = (1/5, 1/5, 2/5, 2/5) for X, Y and N in {1, 10, 50}".into())
}

fn c2() -> Outcome {
    let sum: Rational = (0..=20).map(|k| q(k, 20) * q(k, 20)).sum();
    let oracle = q(2, 3) * q(3, 5) * q(1, 21) * sum;
    ensure(oracle == q(2, 5) * q(2870, 8400), || {
        "closed form arithmetic".into()
    })?;
    for variant in [Variant::X, Variant::Y] {
        let r = report(variant, 10, 2.0, q(3, 5), 2)?;
        let v = &r.rows[0].values;
        ensure(v[0] > v[1] && v[2] > v[3], || format!("{variant}: {v:?}"))?;
        if variant == Variant::X {
            ensure(v[1] == oracle, || format!("V2(f2) = {} vs {oracle}", v[1]))?;
        }
    }
    Ok(format!("strict in X and Y; V2(f2)(v^u) = {oracle}"))
}

fn c3() -> Outcome {
    let u1 = q(3, 5);
    for big_n in [1, 5, 20] {
        let flat = report(Variant::Z, big_n, 1.0, u1.clone(), 3)?;
        let v = &flat.rows[0].values;
        ensure(
            v[1] == u1.clone() / q(3, 1) && v[3] == q(2, 1) * &u1 / q(3, 1),
            || format!("N={big_n}: {v:?}"),
        )?;
        let gap = flat.quadrature_gap.ok_or("no quadrature cross-check")?;
        ensure(gap <= 1e-9, || format!("N={big_n}: quadrature gap {gap:e}"))?;
        let strict = report(Variant::Z, big_n, 2.0, u1.clone(), 3)?;
        let v = &strict.rows[0].values;
        ensure(v[0] > v[1] && v[2] > v[3], || {
            format!("α=2 N={big_n}: {v:?}")
        })?;
        ensure(strict.verdict == Verdict::ModalPreference, || {
            "verdict".into()
        })?;
    }
    Ok("α=1 gives u(1)/3 and 2u(1)/3; α=2 strict; N in {1, 5, 20}".into())
}

fn c4() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 1.5, 2.0] {
        for big_n in [1, 5] {
            let oracle = beta_mixture(&first_layer(big_n, alpha, 0.6));
            let z = report(Variant::Z, big_n, alpha, 0.6f64, 3)?;
            let x = report(Variant::X, big_n, alpha, 0.6f64, 2)?;
            for (i, &expected) in oracle.iter().enumerate() {
                let (zv, xv) = (z.rows[0].values[i], x.rows[0].values[i]);
                worst = worst.max((zv - expected).abs()).max((xv - expected).abs());
                ensure((zv - xv).abs() <= 1e-9, || {
                    format!("α={alpha} N={big_n} f{}: {zv} vs {xv}", i + 1)
                })?;
                ensure((zv - expected).abs() <= 1e-9, || {
                    format!("α={alpha} N={big_n} f{}: oracle {}", i + 1, expected)
                })?;
            }
            if alpha.fract() == 0.0 {
                let zr = report(Variant::Z, big_n, alpha, q(3, 5), 3)?;
                let xr = report(Variant::X, big_n, alpha, q(3, 5), 2)?;
                ensure(zr.rows[0].values == xr.rows[0].values, || {
                    format!("exact α={alpha} N={big_n}")
                })?;
            }
        }
    }
    Ok(format!(
        "largest deviation from the quadrature oracle {worst:.1e}"
    ))
}

fn c5() -> Outcome {
    let cfg = LawConfig {
        seed: 5,
        trials: 500,
        ..LawConfig::default()
    };
    let r = run_suite::<Rational>(Suite::Choquet, &cfg).map_err(|e| e.to_string())?;
    passed(
        &r,
        &[
            ("monotonicity", 500),
            ("comonotonic additivity", 500),
            ("positive homogeneity", 500),
            ("additive linearity", 500),
        ],
    )
}

fn c6() -> Outcome {
    let cfg = LawConfig {
        seed: 6,
        trials: 200,
        ..LawConfig::default()
    };
    let r = run_suite::<Rational>(Suite::Dirac, &cfg).map_err(|e| e.to_string())?;
    passed(
        &r,
        &[
            ("dirac value is the indicator", 15),
            ("dirac integral is evaluation", 200),
            ("dirac naturality", 100),
        ],
    )
}

fn c7() -> Outcome {
    let ce = comonotone_counterexample::<Rational>().map_err(|e| e.to_string())?;
    let masses = [[q(1, 3), q(1, 3), q(1, 3)], [q(1, 2), q(1, 8), q(3, 8)]];
    let expect = |f: [i64; 3]| -> Vec<Rational> {
        masses
            .iter()
            .map(|m| m.iter().zip(f).map(|(w, v)| w * q(v, 1)).sum())
            .collect()
    };
    let (xf, xg) = (expect([11, 1, 0]), expect([11, 10, 0]));
    let df = xf[0].clone() - &xf[1];
    let dg = xg[0].clone() - &xg[1];
    ensure(
        df == q(-13, 8) && dg == q(1, 4) && df.clone() * &dg == q(-13, 32),
        || "oracle arithmetic".into(),
    )?;
    ensure(ce.difference_f == df.to_string(), || {
        ce.difference_f.clone()
    })?;
    ensure(ce.difference_g == dg.to_string(), || {
        ce.difference_g.clone()
    })?;
    ensure(ce.product == (df * dg).to_string(), || ce.product.clone())?;
    ensure(ce.inputs_comonotonic && !ce.images_comonotonic, || {
        "comonotonicity flags".into()
    })?;
    Ok(format!(
        "differences {} and {}, product {}",
        ce.difference_f, ce.difference_g, ce.product
    ))
}

fn c8() -> Outcome {
    let cfg = LawConfig {
        seed: 8,
        trials: 200,
        grid: 2,
        depth: 3,
        space_size: 2,
    };
    let r = run_suite::<Rational>(Suite::Monad, &cfg).map_err(|e| e.to_string())?;
    let summary = passed(
        &r,
        &[
            ("unit law μ∘η = id", 9),
            ("unit law μ∘𝔖η = id", 30),
            ("associativity on additive capacities", 200),
        ],
    )?;
    for (beta, exp) in [(1u32, [2i64, 3, 5, 6, 8]), (2, [2, 3, 5, 6, 8])] {
        let p = |k: i64| q(k, 1).pow_u32(beta);
        let oracle = (p(exp[0]) - p(exp[1]) + p(exp[2]) - q(2, 1) * p(exp[3]) + p(exp[4]))
            / (q(3, 1) * p(3));
        let ce = monad_counterexample::<Rational>(beta as f64).map_err(|e| e.to_string())?;
        ensure(
            ce.formula_difference == oracle.to_string() && ce.agrees,
            || format!("β={beta}: {}", ce.formula_difference),
        )?;
        let want = if beta == 1 { q(0, 1) } else { q(4, 9) };
        ensure(oracle == want, || format!("β={beta}: oracle {oracle}"))?;
    }
    Ok(format!("{summary}; counterexample differences 0 and 4/9"))
}

fn c9() -> Outcome {
    let cfg = LawConfig {
        seed: 9,
        trials: 500,
        ..LawConfig::default()
    };
    let r = run_suite::<Rational>(Suite::Substitution, &cfg).map_err(|e| e.to_string())?;
    passed(&r, &[("substitution", 500)])
}

fn c10() -> Outcome {
    let cfg = LawConfig {
        seed: 10,
        trials: 1,
        grid: 2,
        depth: 3,
        space_size: 2,
    };
    let r = run_suite::<Rational>(Suite::Retraction, &cfg).map_err(|e| e.to_string())?;
    // (n ≤ m) pairs over levels of sizes 3, 6, 21.
    let pairs = 3 * 3 + 6 * 2 + 21;
    passed(
        &r,
        &[
            ("retraction ι^{m,n}∘ι^{n,m} = id", pairs),
            ("composition on monotone chains", 1),
            ("η chains are projectively consistent", 3),
            ("perturbed chains are flagged", 3),
        ],
    )
}

fn c11() -> Outcome {
    let x = urn_points();
    let rb = x.subset_of(&["R", "B"]).map_err(|e| e.to_string())?;
    let [f1, f2, f3, f4] = ellsberg_acts::<Rational>();
    let one = Act::constant(&x, q(1, 1));
    for (f, target) in [(&f1, &f4), (&f2, &f3)] {
        let spliced: Vec<Rational> = (0..3)
            .map(|i| {
                if rb.contains(i) {
                    f.value(i).clone()
                } else {
                    q(1, 1)
                }
            })
            .collect();
        ensure(spliced == target.values(), || {
            format!("pointwise splice {spliced:?}")
        })?;
        let built = conditional_act(&rb, f, &one).map_err(|e| e.to_string())?;
        ensure(&built == target, || "conditional act".into())?;
    }
    let flat = paradox_demo(&UrnParams::new(10, 1.0, q(3, 5)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let strict = paradox_demo(&UrnParams::new(10, 2.0, q(3, 5)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(flat.identities.iter().all(|c| c.holds), || {
        "identities".into()
    })?;
    ensure(
        flat.outcome == ParadoxOutcome::ParadoxNotRepresentable,
        || flat.outcome.to_string(),
    )?;
    ensure(
        strict.outcome == ParadoxOutcome::ModalPreferenceRepresented,
        || strict.outcome.to_string(),
    )?;
    Ok(format!("α=1: {}; α=2: {}", flat.outcome, strict.outcome))
}

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            title: "Ellsberg α=1 collapse",
            budget: secs(1),
            run: c1,
        },
        Criterion {
            id: 2,
            title: "Ellsberg α>1 strictness",
            budget: secs(1),
            run: c2,
        },
        Criterion {
            id: 3,
            title: "third layer",
            budget: secs(2),
            run: c3,
        },
        Criterion {
            id: 4,
            title: "beta-collapse identity",
            budget: None,
            run: c4,
        },
        Criterion {
            id: 5,
            title: "Choquet law suite",
            budget: secs(5),
            run: c5,
        },
        Criterion {
            id: 6,
            title: "Dirac identities",
            budget: None,
            run: c6,
        },
        Criterion {
            id: 7,
            title: "comonotonicity counterexample",
            budget: None,
            run: c7,
        },
        Criterion {
            id: 8,
            title: "monad laws",
            budget: secs(10),
            run: c8,
        },
        Criterion {
            id: 9,
            title: "substitution lemma",
            budget: None,
            run: c9,
        },
        Criterion {
            id: 10,
            title: "projection tower",
            budget: secs(10),
            run: c10,
        },
        Criterion {
            id: 11,
            title: "paradox demo",
            budget: None,
            run: c11,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(budget)) if elapsed > budget => {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            }
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => {
                failures += 1;
                ("FAIL", e.clone())
            }
        };
        println!(
            "criterion {:>2} {tag} {} [{elapsed:.2?}] {detail}",
            c.id, c.title
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
