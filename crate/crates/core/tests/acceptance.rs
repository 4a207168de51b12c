//! Acceptance suite: one PASS/FAIL line per criterion, run sequentially so
//! that each time budget is measured on its own.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use khoma::cube::{apply_edge, CubeComplex};
use khoma::invariants::{diagonal_profile, graded_euler, kauffman_bracket};
use khoma::verify::{check_les_with, CheckReport, Verdict, Verifier};
use khoma::zalgebra::{snf_dense, snf_sparse, SparseMat};
use khoma::{homology, normalize, parse_word, torus_word, HomologyOptions, Word};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expect_pass(r: &CheckReport) -> Result<(), String> {
    ensure(r.verdict == Verdict::Pass, || format!("{} {} -> {:?}: {}", r.claim, r.params, r.verdict, r.witness))
}

fn verifier() -> Verifier {
    Verifier::new(16)
}

fn engine_table(w: &Word) -> Result<common::Table, String> {
    Ok(homology(w, HomologyOptions::default())
        .map_err(|e| e.to_string())?
        .groups
        .into_iter()
        .map(|(k, g)| (k, (g.free_rank, g.torsion)))
        .collect())
}

fn trefoil() -> Outcome {
    let want: common::Table = [
        ((0, 1), (1, vec![])),
        ((0, 3), (1, vec![])),
        ((2, 5), (1, vec![])),
        ((3, 7), (0, vec![2])),
        ((3, 9), (1, vec![])),
    ]
    .into_iter()
    .collect();
    let oracle = common::homology(&common::Diagram::torus(2, 3));
    ensure(oracle == want, || format!("oracle disagrees with the golden table: {oracle:?}"))?;
    let got = engine_table(&torus_word(2, 3))?;
    ensure(got == want, || format!("engine: {got:?}"))?;
    Ok("5 groups incl. Z_2 at (3,7), engine = oracle".into())
}

fn t1_anchors() -> Outcome {
    let v = verifier();
    for (p, q, j) in [(3, 3, 9), (3, 4, 11)] {
        let start = Instant::now();
        let r = v.check_t1(p, q).map_err(|e| e.to_string())?;
        expect_pass(&r)?;
        ensure(r.witness["j"] == j && r.witness["group"]["rank"] == 1, || format!("T({p},{q}): {}", r.witness))?;
        ensure(start.elapsed() < Duration::from_secs(10), || format!("T({p},{q}) took {:?}", start.elapsed()))?;
    }
    Ok("rank 1 at (4,9) for T(3,3) and (4,11) for T(3,4)".into())
}

fn low_degree_tables() -> Outcome {
    let v = verifier();
    for (p, q) in [(3, 4), (3, 5)] {
        expect_pass(&v.check_low_degree_table(p, q).map_err(|e| e.to_string())?)?;
    }
    Ok("(3,4) and (3,5): seven groups match, rest of i <= 4 trivial".into())
}

fn f1_three_strands() -> Outcome {
    let v = verifier();
    let mut parts = Vec::new();
    for q in 5..=7 {
        let r = v.check_f1(3, q).map_err(|e| e.to_string())?;
        expect_pass(&r)?;
        parts.push(format!("D(3,{q})~D(3,{}) i<{}", q - 1, r.witness["below"]));
    }
    Ok(parts.join(", "))
}

fn f3_three() -> Outcome {
    let r = verifier().check_f3(3).map_err(|e| e.to_string())?;
    expect_pass(&r)?;
    Ok(format!("H(D(3,3)) = H(D(2,3)){{1}} for i < {}", r.witness["below"]))
}

fn e_vanishing() -> Outcome {
    let v = verifier();
    for (p, q, k) in [(3, 4, 1), (3, 4, 2), (3, 3, 1)] {
        expect_pass(&v.check_e_vanishing(p, q, k).map_err(|e| e.to_string())?)?;
    }
    Ok("E^1, E^2 of (3,4) below 4; E^1 of (3,3) below 3".into())
}

fn les_exactness() -> Outcome {
    let mut spots = 0;
    let t23 = torus_word(2, 3);
    let d34 = torus_word(3, 4);
    let c21 = d34.flat_index_of(2, 1).map_err(|e| e.to_string())?;
    let cases: Vec<(&Word, usize)> = (0..3).map(|c| (&t23, c)).chain([(&d34, c21)]).collect();
    for (w, c) in cases {
        let r = check_les_with(w, c, 16).map_err(|e| e.to_string())?;
        expect_pass(&r)?;
        spots += r.witness["spots"].as_u64().unwrap_or(0);
    }
    Ok(format!("{spots} spots exact, Euler relation holds"))
}

fn euler_jones() -> Outcome {
    let mut negative = 0;
    for &(s, text) in common::CORPUS {
        let w = parse_word(text, Some(s)).map_err(|e| e.to_string())?;
        ensure(w.crossing_count() <= 12, || format!("{text} is too large"))?;
        negative += usize::from(w.n_minus() > 0);
        let h = homology(&w, HomologyOptions::default()).map_err(|e| e.to_string())?;
        let (np, nm) = (w.n_plus() as i64, w.n_minus() as i64);
        let b = kauffman_bracket(&w, 16).map_err(|e| e.to_string())?;
        let want = b.shift(np - 2 * nm).scale(if nm % 2 == 0 { 1 } else { -1 });
        let got = graded_euler(&h);
        ensure(got == want, || format!("{text}: euler {got} vs bracket {want}"))?;
    }
    ensure(common::CORPUS.len() >= 20, || "corpus too small".into())?;
    Ok(format!("{} words ({negative} with negative crossings)", common::CORPUS.len()))
}

fn markov() -> Outcome {
    let base = engine_table(&parse_word("1 1 1", Some(2)).map_err(|e| e.to_string())?)?;
    for (s, text) in [(3, "1 1 1 2"), (3, "-2 1 1 1 2 2"), (3, "2 1 1 1 -2 -2 2 2")] {
        let t = engine_table(&parse_word(text, Some(s)).map_err(|e| e.to_string())?)?;
        ensure(t == base, || format!("{text}: {t:?}"))?;
    }
    Ok("stabilization and conjugation preserve the table".into())
}

fn conjecture_p3() -> Outcome {
    let v = verifier();
    let t = v.table(&torus_word(3, 4), None).map_err(|e| e.to_string())?;
    ensure(t.free_rank(4, 3) == 1, || format!("rank H^(4,3)(D(3,4)) = {}", t.free_rank(4, 3)))?;
    let width = diagonal_profile(&normalize(&t).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.width;
    ensure(width == 3, || format!("width {width}"))?;
    expect_pass(&v.check_conjecture1(3).map_err(|e| e.to_string())?)?;
    // stretch case, 15 crossings
    let start = Instant::now();
    let r4 = v.check_conjecture1(4).map_err(|e| e.to_string())?;
    let stretch = match r4.verdict {
        Verdict::Pass => {
            format!("p=4 Pass ({:.1} s, width >= {})", start.elapsed().as_secs_f64(), r4.witness["width_lower_bound"])
        }
        Verdict::Skipped => "p=4 Skipped".into(),
        Verdict::Fail => return Err(format!("p=4: {}", r4.witness)),
    };
    Ok(format!("rank H^(4,3)(D(3,4)) = 1, width 3; {stretch}"))
}

fn stable_polynomial() -> Outcome {
    let (sp, r) = verifier().stable_poly(3, 6).map_err(|e| e.to_string())?;
    expect_pass(&r)?;
    ensure(sp.n_checked == [4, 5, 6], || format!("checked {:?}", sp.n_checked))?;
    Ok(format!("n = 4..6 agree; stable part {}", sp.truncated))
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    (2usize..=4).prop_flat_map(move |s| {
        let letter = (1..s as i64, any::<bool>()).prop_map(|(g, pos)| if pos { g } else { -g });
        prop::collection::vec(letter, 0..=max_len).prop_map(move |w| Word::from_signed(s, &w).unwrap())
    })
}

fn matrix_strategy(max: usize, range: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(-range..=range, c), r))
}

fn big(a: &[Vec<i64>]) -> SparseMat<BigInt> {
    SparseMat::from_dense(&a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>())
}

fn property_suites() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 300, failure_persistence: None, ..Config::default() });
    let mut counts = Vec::new();

    runner
        .run(&matrix_strategy(6, 7), |a| {
            let m = big(&a);
            let r = snf_dense(&m);
            let (u, v) = r.transforms.clone().unwrap();
            let d = u.mul(&m).mul(&v);
            prop_assert!(d.iter().all(|(i, j, x)| i == j && *x == r.invariant_factors[i]));
            prop_assert_eq!(d.nnz(), r.rank);
            for w in r.invariant_factors.windows(2) {
                prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
            }
            prop_assert_eq!(&snf_sparse(&m).invariant_factors, &r.invariant_factors);
            Ok(())
        })
        .map_err(|e| format!("SNF identities: {e}"))?;
    counts.push("SNF");

    runner
        .run(&prop::collection::vec(prop::collection::vec(-5i64..=5, 4), 4), |a| {
            let f = snf_sparse(&big(&a)).invariant_factors;
            let mut prod = BigInt::from(1);
            for k in 1..=4 {
                let g = BigInt::from(common::minors_gcd(&a, k));
                if k <= f.len() {
                    prod *= &f[k - 1];
                    prop_assert_eq!(g, prod.clone());
                } else {
                    prop_assert_eq!(g, BigInt::from(0));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("minor gcds: {e}"))?;
    counts.push("minor-gcd");

    let mut cube_runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    cube_runner
        .run(&word_strategy(8), |w| {
            let c = CubeComplex::build(&w, 16).unwrap();
            for i in 0..c.crossing_count() {
                let Some((lo, hi)) = c.q_range(i) else { continue };
                for j in lo..=hi {
                    let d0 = c.differential_matrix(i as i64, j);
                    let d1 = c.differential_matrix(i as i64 + 1, j);
                    prop_assert!(d1.mul(&d0).is_zero());
                }
                for v in c.vertices_at(i) {
                    for e in c.edges_from(v.eps) {
                        let target = c.vertex(e.target);
                        prop_assert_eq!((target.circle_count() as i64 - v.circle_count() as i64).abs(), 1);
                        for mask in 0..1u64 << v.circle_count() {
                            for (t, _) in apply_edge(&e, mask) {
                                prop_assert_eq!(target.q_degree(t), v.q_degree(mask));
                            }
                        }
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| format!("cube properties: {e}"))?;
    counts.push("d²=0, ±1 per edge, q-degree");
    Ok(format!("randomized corpora: {}", counts.join(", ")))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "trefoil golden table", budget: Some(Duration::from_secs(1)), run: trefoil },
        Criterion { id: 2, name: "degree-4 anchors", budget: Some(Duration::from_secs(20)), run: t1_anchors },
        Criterion { id: 3, name: "low-degree tables", budget: Some(Duration::from_secs(120)), run: low_degree_tables },
        Criterion {
            id: 4,
            name: "stability f1, three strands",
            budget: Some(Duration::from_secs(900)),
            run: f1_three_strands,
        },
        Criterion { id: 5, name: "stability f3, p = 3", budget: Some(Duration::from_secs(10)), run: f3_three },
        Criterion { id: 6, name: "E-vanishing", budget: Some(Duration::from_secs(30)), run: e_vanishing },
        Criterion { id: 7, name: "long exact sequence", budget: Some(Duration::from_secs(60)), run: les_exactness },
        Criterion { id: 8, name: "Euler characteristic = Jones", budget: None, run: euler_jones },
        Criterion { id: 9, name: "Markov invariance", budget: None, run: markov },
        Criterion {
            id: 10,
            name: "width lower bound, p = 3",
            budget: Some(Duration::from_secs(3600)),
            run: conjecture_p3,
        },
        Criterion { id: 11, name: "stable polynomial, m = 3", budget: None, run: stable_polynomial },
        Criterion { id: 12, name: "property suites", budget: None, run: property_suites },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("over budget: {elapsed:.2?} > {b:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        failed += usize::from(outcome.is_err());
        println!("{tag} [{:>2}] {:<32} {:>8.2}s  {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
