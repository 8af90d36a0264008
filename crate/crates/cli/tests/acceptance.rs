//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use outlift::graph_of_groups::{
    covering_graph, enumerate_graphs, torsion_free_quotients, Filter, GraphOfGroups,
};
use outlift::integer_reps::{build_graph_realization, standard_representative};
use outlift::surface_toolkit::{
    block_subgroup_order, block_symplectic, hurwitz_bound, lefschetz_obstruction, max_order_tables,
    sl2_torsion, symplectic_order, wiman_bound, ExceptionalOrder, ObstructionWitness,
};
use outlift::{
    conjugation_witness, decomposition_type, extension_abelianization, lift_decision, matrix_order,
    phi_target, replay, smith_normal_form, verify_phi_nonlift, Certificate, DecompositionType,
    FreeWord, IntMatrix, LiftDecision, MatrixOrder, SearchConfig, Verdict,
};
use outlift_cli::{run, EXIT_OK};

/// Wall-clock budget for one rank of the non-lift search.
const RANK_TIME_LIMIT: Duration = Duration::from_secs(600);
/// Every numeric comparison below is exact.
const EXACT_TOLERANCE: i64 = 0;
const SNF_SAMPLES: usize = 500;
const SNF_MAX_DIM: usize = 6;
const SNF_MAX_ENTRY: i64 = 50;
const NONLIFT_RANKS: [usize; 4] = [3, 4, 5, 6];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_eq(a: &BigInt, b: &BigInt) -> bool {
    (a - b).abs() <= BigInt::from(EXACT_TOLERANCE)
}

fn cli(args: &[&str]) -> Result<(i32, String), String> {
    let mut out = Vec::new();
    let argv = std::iter::once("outlift").chain(args.iter().copied());
    let code = run(argv, &mut out).map_err(|e| format!("{args:?}: {e:#}"))?;
    Ok((code, String::from_utf8_lossy(&out).into_owned()))
}

fn phi_run(dir: &Path, n: usize, workers: usize, tag: &str) -> Result<(Vec<u8>, Duration), String> {
    let path = dir.join(format!("phi{n}-{tag}.json"));
    let started = Instant::now();
    let rank = n.to_string();
    let w = workers.to_string();
    let path_str = path.to_string_lossy().into_owned();
    let (code, _) = cli(&[
        "phi-nonlift",
        "--rank",
        &rank,
        "--workers",
        &w,
        "--cert",
        &path_str,
    ])?;
    let elapsed = started.elapsed();
    ensure(code == EXIT_OK, || format!("rank {n}: exit code {code}"))?;
    let bytes = fs::read(&path).map_err(|e| e.to_string())?;
    Ok((bytes, elapsed))
}

fn loop_orders(g: &GraphOfGroups) -> Option<Vec<u64>> {
    if g.vertices() != [6] {
        return None;
    }
    let mut orders: Vec<u64> = g.edges().iter().map(|e| e.order).collect();
    orders.sort_unstable();
    Some(orders)
}

fn criterion_1(dir: &Path) -> Outcome {
    let mut detail = Vec::new();
    for n in NONLIFT_RANKS {
        let (bytes, elapsed) = phi_run(dir, n, rayon::current_num_threads(), "default")?;
        ensure(elapsed <= RANK_TIME_LIMIT, || {
            format!("rank {n} took {elapsed:?}")
        })?;
        let cert =
            Certificate::from_json(&String::from_utf8_lossy(&bytes)).map_err(|e| e.to_string())?;
        ensure(
            cert.verdict == Verdict::NonLifting && cert.survivors.is_empty(),
            || format!("rank {n}: {} survivors", cert.survivors.len()),
        )?;
        let issues = replay(&cert).map_err(|e| e.to_string())?;
        ensure(issues.is_empty(), || format!("rank {n} replay: {issues:?}"))?;
        detail.push(format!(
            "n={n} {} candidates {:.2?}",
            cert.candidates.len(),
            elapsed
        ));
        if n == 5 {
            for shape in [vec![2u64, 6, 6], vec![3, 3, 6]] {
                let hits: Vec<_> = cert
                    .candidates
                    .iter()
                    .filter(|c| loop_orders(&c.graph).as_deref() == Some(&shape[..]))
                    .collect();
                ensure(!hits.is_empty(), || {
                    format!("shape {shape:?} missing from trace")
                })?;
                let effective_rejections = hits
                    .iter()
                    .filter(|c| {
                        c.quotient_maps > 0 && c.rejected_by.contains(&Filter::Effectiveness)
                    })
                    .count();
                ensure(effective_rejections > 0, || {
                    format!("shape {shape:?} never rejected by effectiveness")
                })?;
                ensure(hits.iter().all(|c| !c.rejected_by.is_empty()), || {
                    format!("shape {shape:?} has an unrejected variant")
                })?;
            }
            detail.push("n=5 shapes 2+6+6, 3+3+6 rejected by effectiveness".to_string());
        }
    }
    Ok(detail.join("; "))
}

fn all_types(p: u64, max_rank: usize) -> Vec<DecompositionType> {
    let pu = p as usize;
    let mut out = Vec::new();
    for c in 0..=max_rank / pu {
        for b in 0..=(max_rank - c * pu) / (pu - 1) {
            for a in 0..=max_rank - c * pu - b * (pu - 1) {
                if a + b + c > 0 {
                    out.push(DecompositionType::new(p, a, b, c).expect("prime"));
                }
            }
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for p in [2u64, 3, 5, 7] {
        for d in all_types(p, 12) {
            let g = build_graph_realization(&d).map_err(|e| e.to_string())?;
            let m = g.induced_h1_action().map_err(|e| e.to_string())?;
            let back = decomposition_type(&m, p).map_err(|e| e.to_string())?;
            ensure(back == d, || format!("round trip {d} at p={p} gave {back}"))?;
            if d.is_trivial_action() {
                continue;
            }
            ensure(
                matrix_order(&m).ok() == Some(MatrixOrder::Finite(p)),
                || format!("{d} at p={p}: induced order is not {p}"),
            )?;
            let target = standard_representative(&d);
            match lift_decision(&target, p).map_err(|e| e.to_string())? {
                LiftDecision::Lifts { automorphism, .. } => {
                    let w = automorphism.abelianize();
                    ensure(
                        decomposition_type(&w, p).ok() == Some(d)
                            && matrix_order(&w).ok() == Some(MatrixOrder::Finite(p))
                            && automorphism
                                .power(p)
                                .is_inner(&FreeWord::identity(d.rank()))
                                .unwrap_or(false),
                        || format!("{d} at p={p}: witness does not verify"),
                    )?;
                }
                LiftDecision::Unknown { .. } => return Err(format!("{d} at p={p}: Unknown")),
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} nontrivial types lifted with verified witnesses"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..SNF_SAMPLES {
        let rows = rng.gen_range(1..=SNF_MAX_DIM);
        let cols = rng.gen_range(1..=SNF_MAX_DIM);
        let e: Vec<i64> = (0..rows * cols)
            .map(|_| rng.gen_range(-SNF_MAX_ENTRY..=SNF_MAX_ENTRY))
            .collect();
        let m = IntMatrix::from_i64(rows, cols, &e).map_err(|e| e.to_string())?;
        let s = smith_normal_form(&m);
        ensure(&(&s.u * &m) * &s.v == s.d, || {
            format!("sample {k}: U·M·V ≠ D")
        })?;
        let unimodular = |x: &IntMatrix| x.determinant().map(|d| d.abs().is_one()).unwrap_or(false);
        ensure(unimodular(&s.u) && unimodular(&s.v), || {
            format!("sample {k}: not unimodular")
        })?;
        let diag = s.diagonal();
        let chain = diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        });
        ensure(chain, || format!("sample {k}: divisibility chain broken"))?;
    }
    Ok(format!(
        "{SNF_SAMPLES} random matrices, dims <= {SNF_MAX_DIM}, |entries| <= {SNF_MAX_ENTRY}"
    ))
}

fn criterion_4() -> Outcome {
    for n in 2..=8usize {
        let ext = extension_abelianization(&phi_target(n), 6, &vec![BigInt::zero(); n])
            .map_err(|e| e.to_string())?;
        ensure(
            ext.free_rank() == n - 2 && ext.torsion() == [BigInt::from(6)],
            || format!("n={n}: split extension gives {ext}"),
        )?;
    }
    let expected: BTreeSet<Vec<BigInt>> = [vec![], vec![2], vec![3], vec![6]]
        .into_iter()
        .map(|v: Vec<i64>| v.into_iter().map(BigInt::from).collect())
        .collect();
    for n in 3..=6usize {
        let mut seen = BTreeSet::new();
        // Cocycles are fixed vectors; the fixed lattice is spanned by e_3, …, e_n.
        let k = n - 2;
        for code in 0..6u64.pow(k as u32) {
            let mut a = vec![BigInt::zero(); n];
            let mut c = code;
            for slot in a.iter_mut().skip(2) {
                *slot = BigInt::from(c % 6);
                c /= 6;
            }
            let ext = extension_abelianization(&phi_target(n), 6, &a).map_err(|e| e.to_string())?;
            ensure(ext.free_rank() == n - 2, || {
                format!("n={n}: free rank of {ext}")
            })?;
            seen.insert(ext.torsion().to_vec());
        }
        ensure(seen == expected, || {
            format!("n={n}: torsion forms {seen:?}")
        })?;
    }
    Ok(
        "split Z_6 + Z^(n-2) for n=2..8; cocycle torsion exactly {1, Z_2, Z_3, Z_6} for n=3..6"
            .into(),
    )
}

fn criterion_5() -> Outcome {
    for m in 2..=6u64 {
        let psi = conjugation_witness(m).map_err(|e| e.to_string())?;
        let rank = psi.rank();
        let z = FreeWord::generator(rank, rank);
        ensure(psi.power(m).is_inner(&z).unwrap_or(false), || {
            format!("m={m}: ψ^m not inner by z")
        })?;
        ensure(
            matrix_order(&psi.abelianize()).ok() == Some(MatrixOrder::Finite(m)),
            || format!("m={m}: abelianized order wrong"),
        )?;
    }
    Ok("psi^m = conjugation by z and order m for m=2..6".into())
}

fn criterion_6() -> Outcome {
    let mut graphs = 0;
    let mut maps = 0;
    for n in 1..=5usize {
        for g in enumerate_graphs(n, 6, SearchConfig::exhaustive()) {
            let chi6 = g.euler_char() * Rational64::from_integer(6);
            for f in torsion_free_quotients(&g, 6) {
                let cover = covering_graph(&g, &f).map_err(|e| e.to_string())?;
                let chi = Rational64::from_integer(cover.euler_characteristic());
                ensure(chi == chi6, || {
                    format!("{g}: χ(cover) = {chi}, 6χ = {chi6}")
                })?;
                ensure(cover.first_betti() as i64 == 1 - chi6.to_integer(), || {
                    format!("{g}: betti {} vs 1 - 6χ", cover.first_betti())
                })?;
                maps += 1;
            }
            graphs += 1;
        }
    }
    Ok(format!("{graphs} candidates, {maps} covers checked"))
}

fn criterion_7() -> Outcome {
    let m = block_symplectic(&[
        sl2_torsion(3).map_err(|e| e.to_string())?,
        sl2_torsion(4).map_err(|e| e.to_string())?,
    ])
    .map_err(|e| e.to_string())?;
    let order = symplectic_order(&m).map_err(|e| e.to_string())?;
    let wiman = wiman_bound(2).map_err(|e| e.to_string())?;
    ensure(order == Some(12) && wiman == 10 && 12 > wiman, || {
        format!("order {order:?}, wiman {wiman}")
    })?;
    for g in 2..=10usize {
        let mut blocks = vec![sl2_torsion(6).map_err(|e| e.to_string())?];
        blocks.extend((1..g).map(|_| IntMatrix::identity(2)));
        let report =
            lefschetz_obstruction(&block_symplectic(&blocks).map_err(|e| e.to_string())?, 6)
                .map_err(|e| e.to_string())?;
        let expected = BigInt::from(3 - 2 * g as i64);
        let ok = report.is_obstructed()
            && matches!(&report.witnesses[0], ObstructionWitness::Lefschetz { power: 1, number } if exact_eq(number, &expected));
        ensure(ok, || format!("g={g}: {:?}", report.witnesses.first()))?;
    }
    for g in 2..=12u64 {
        let h = hurwitz_bound(g).map_err(|e| e.to_string())?;
        ensure(block_subgroup_order(g) > BigInt::from(h), || {
            format!("g={g}: 12^g g! <= 84(g-1)")
        })?;
    }
    Ok("order 12 > 10; L1 = 3-2g for g=2..10; 12^g g! > 84(g-1) for g=2..12".into())
}

fn criterion_8() -> Outcome {
    for n in 3..=8u64 {
        let t = max_order_tables(n).map_err(|e| e.to_string())?;
        let expected = (1..=n).fold(BigInt::one(), |acc, k| acc * 2 * k);
        ensure(
            t.out_fn.as_ref().is_some_and(|v| exact_eq(v, &expected)),
            || format!("n={n}: out_fn {:?}", t.out_fn),
        )?;
    }
    let printed: [(u64, u64); 5] = [(2, 12), (4, 1152), (6, 51840), (7, 2903040), (8, 696729600)];
    for (n, order) in printed {
        let t = max_order_tables(n).map_err(|e| e.to_string())?;
        ensure(
            t.gl_exceptional == ExceptionalOrder::Known(BigInt::from(order)),
            || format!("n={n}: {:?}", t.gl_exceptional),
        )?;
    }
    for n in [3u64, 5] {
        let t = max_order_tables(n).map_err(|e| e.to_string())?;
        ensure(t.gl_exceptional == ExceptionalOrder::None, || {
            format!("n={n} has an entry")
        })?;
    }
    Ok("2^n n! for n=3..8; exceptional orders 12, 1152, 51840, 2903040, 696729600".into())
}

fn criterion_9() -> Outcome {
    let mut detail = Vec::new();
    for n in 3..=5usize {
        let pruned = verify_phi_nonlift(n, SearchConfig::pruned()).map_err(|e| e.to_string())?;
        let full = verify_phi_nonlift(n, SearchConfig::exhaustive()).map_err(|e| e.to_string())?;
        let key = |c: &Certificate| -> BTreeSet<String> {
            c.survivors
                .iter()
                .map(|s| format!("{} {}", s.graph, s.map))
                .collect()
        };
        ensure(
            key(&pruned) == key(&full) && pruned.verdict == full.verdict,
            || {
                format!(
                    "n={n}: pruned {:?} vs exhaustive {:?}",
                    key(&pruned),
                    key(&full)
                )
            },
        )?;
        detail.push(format!(
            "n={n} {}/{} candidates",
            pruned.candidates.len(),
            full.candidates.len()
        ));
    }
    Ok(format!("identical survivor sets ({})", detail.join(", ")))
}

fn criterion_10(dir: &Path) -> Outcome {
    for n in NONLIFT_RANKS {
        let (one, _) = phi_run(dir, n, 1, "w1")?;
        let (eight, _) = phi_run(dir, n, 8, "w8")?;
        ensure(one == eight, || format!("rank {n}: certificates differ"))?;
    }
    Ok("certificates byte-identical for workers 1 and 8, ranks 3..6".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "non-lift theorem, ranks 3-6",
            Box::new(|| criterion_1(dir.path())),
        ),
        ("prime-order round trip and lifts", Box::new(criterion_2)),
        ("smith normal form contract", Box::new(criterion_3)),
        ("extension abelianizations", Box::new(criterion_4)),
        ("free-by-cyclic witness", Box::new(criterion_5)),
        ("covering multiplicativity", Box::new(criterion_6)),
        ("symplectic non-lifts", Box::new(criterion_7)),
        ("maximal order tables", Box::new(criterion_8)),
        ("pruning soundness", Box::new(criterion_9)),
        (
            "worker-count determinism",
            Box::new(|| criterion_10(dir.path())),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {p:?}")));
        let elapsed = started.elapsed();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS [{name}] {detail} ({elapsed:.2?})",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{name}] {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
