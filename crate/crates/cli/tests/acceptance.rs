//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultragreedoid::generate::{random_family, random_monotone_table, random_triple, TripleParams};
use ultragreedoid::greedoid::{
    check_greedoid_axioms, check_prefix_theorem, max_perimeter_sets, FAMILY_CAP,
};
use ultragreedoid::greedy::{
    all_greedy_orders, distinct_signatures, exchange_element, exchange_element_ordered,
    increment_signature, proj_point, proj_seq, step_gain, TiePolicy,
};
use ultragreedoid::oracle::{
    brute_all_permutation_perimeters, brute_max_perimeter, brute_max_perimeters,
};
use ultragreedoid::padic::{
    legendre_nu_factorial, nu_p, padic_triple, realize_profile, witness_point, PadicSpec,
};
use ultragreedoid::perimeter::{dist_f, dist_r, per_r_set, profile, MonotoneFamily};
use ultragreedoid::property_s::{
    check_s1, check_s2, reconstruct_f, verify_reconstruction, FamilyDist,
};
use ultragreedoid::{MonotoneTable, Point, PointSet, Rat, UltraTriple};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn triple(rng: &mut ChaCha8Rng, n: usize) -> UltraTriple {
    let denominator = *[1, 2, 3].choose(rng).unwrap();
    random_triple(
        rng,
        &TripleParams {
            n,
            height_range: (-5, 4),
            denominator,
            tie_percent: 25,
            weight_range: (-2, 2),
        },
    )
}

/// Few distinct heights, frequent repeats and near-constant weights.
fn tied_triple(rng: &mut ChaCha8Rng, n: usize) -> UltraTriple {
    random_triple(
        rng,
        &TripleParams {
            n,
            height_range: (-2, 1),
            denominator: 1,
            tie_percent: 60,
            weight_range: (0, 1),
        },
    )
}

fn all_subsets(t: &UltraTriple) -> impl Iterator<Item = PointSet> {
    let g = t.ground();
    (0..=g.len()).flat_map(move |k| g.subsets_of_size(k))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn permutation_invariance() -> Outcome {
    let mut rng = rng(1);
    let mut subsets = 0usize;
    for i in 0..200 {
        let n = rng.gen_range(1..=6);
        let t = triple(&mut rng, n);
        for r in 0..=3 {
            for a in all_subsets(&t) {
                let values = brute_all_permutation_perimeters(&t, a, r).map_err(e)?;
                ensure!(
                    values.len() == 1,
                    "instance {i}, r = {r}: {} distinct perimeters",
                    values.len()
                );
                subsets += 1;
            }
        }
    }
    Ok(format!(
        "200 triples, {subsets} (subset, r) cases, every ordering agrees"
    ))
}

fn greedy_optimality() -> Outcome {
    let mut rng = rng(2);
    let mut traces = 0usize;
    for i in 0..200 {
        let n = rng.gen_range(1..=7);
        let t = triple(&mut rng, n);
        for r in 0..=3 {
            let best: Vec<Rat> = (0..=n)
                .map(|k| brute_max_perimeter(&t, k, r).map(|o| o.value))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            for tr in all_greedy_orders(&t, t.ground(), n, r).map_err(e)? {
                for (k, b) in best.iter().enumerate() {
                    ensure!(
                        tr.prefix_perimeter(k) == *b,
                        "instance {i}, r = {r}, k = {k}: greedy {} vs brute {b}",
                        tr.prefix_perimeter(k)
                    );
                }
                traces += 1;
            }
        }
    }
    Ok(format!(
        "200 triples, {traces} greedy orderings, every prefix optimal"
    ))
}

fn tied_instances() -> Vec<UltraTriple> {
    let mut rng = rng(3);
    (0..100)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            tied_triple(&mut rng, n)
        })
        .collect()
}

fn increment_invariance() -> Outcome {
    let mut branching = 0usize;
    let mut orders = 0usize;
    for (i, t) in tied_instances().iter().enumerate() {
        for r in 0..=3 {
            let all = all_greedy_orders(t, t.ground(), t.len(), r).map_err(e)?;
            ensure!(
                distinct_signatures(&all).len() == 1,
                "instance {i}, r = {r}: {} different increment lists",
                distinct_signatures(&all).len()
            );
            orders += all.len();
            if all.len() > 1 {
                branching += 1;
            }
        }
    }
    Ok(format!(
        "400 runs ({branching} with ties), {orders} orderings, one increment list each"
    ))
}

fn prefix_theorem() -> Outcome {
    let mut checked = 0usize;
    for (i, t) in tied_instances().iter().enumerate() {
        let g = t.ground();
        for r in 0..=3 {
            let fam = max_perimeter_sets(t, r, t.len(), FAMILY_CAP).map_err(e)?;
            for a in fam.family.members() {
                let tr = check_prefix_theorem(t, g, a, r)
                    .map_err(|err| format!("instance {i}, r = {r}: {err}"))?;
                ensure!(tr.prefix_set(a.len()) == a, "instance {i}: prefix is not A");
                ensure!(tr.len() == t.len(), "instance {i}: trace too short");
                let mut chosen = PointSet::empty();
                for &p in &tr.perm {
                    let gain = step_gain(t, chosen, p, r).map_err(e)?;
                    for x in g.difference(chosen) {
                        ensure!(
                            step_gain(t, chosen, x, r).map_err(e)? <= gain,
                            "instance {i}: non-greedy step"
                        );
                    }
                    chosen.insert(p);
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} maximum-perimeter sets, each a greedy prefix"
    ))
}

fn strong_greedoid() -> Outcome {
    let mut rng = rng(5);
    for i in 0..100 {
        let n = rng.gen_range(1..=7);
        let t = triple(&mut rng, n);
        for r in 0..=2 {
            let fam = max_perimeter_sets(&t, r, n, FAMILY_CAP).map_err(e)?;
            let rep = check_greedoid_axioms(&fam.family);
            ensure!(
                rep.all_hold(),
                "instance {i}, r = {r}: {:?}",
                rep.counterexample
            );
        }
    }
    for i in 0..1000 {
        let n = rng.gen_range(2..=7);
        let t = triple(&mut rng, n);
        let r = rng.gen_range(0..=2);
        let mut pts: Vec<Point> = t.points().collect();
        pts.shuffle(&mut rng);
        let k = rng.gen_range(0..n);
        let b: PointSet = pts[..k].iter().collect();
        pts.shuffle(&mut rng);
        let a: PointSet = pts[..k + 1].iter().collect();
        let per = |s: PointSet| per_r_set(&t, s, r).map_err(e);
        let mut shuffled = b.to_vec();
        shuffled.shuffle(&mut rng);
        for u in [
            exchange_element(&t, a, b, r).map_err(e)?,
            exchange_element_ordered(&t, a, &shuffled).map_err(e)?,
        ] {
            ensure!(
                a.contains(u) && !b.contains(u),
                "pair {i}: u outside A \\ B"
            );
            let lhs = per(a.without(u))? + per(b.with(u))?;
            let rhs = per(a)? + per(b)?;
            ensure!(lhs >= rhs, "pair {i}, r = {r}: {lhs} < {rhs}");
        }
    }
    Ok("300 families satisfy (i)-(iv); 1000 random pairs satisfy the exchange inequality".into())
}

fn factorial_cross_check() -> Outcome {
    for p in [2u64, 3, 5] {
        let t = padic_triple(&PadicSpec::new(p, 0, (0..64).collect())).map_err(e)?;
        let sig = increment_signature(&t, t.ground(), 64, 0).map_err(e)?;
        for (k, inc) in sig.iter().enumerate() {
            let expected = -(legendre_nu_factorial(k as u64, p) as i64);
            ensure!(
                *inc == Rat::from_int(expected),
                "p = {p}, k = {k}: {inc} vs {expected}"
            );
        }
        let t = padic_triple(&PadicSpec::new(p, 0, (0..21).collect())).map_err(e)?;
        for r in 1..=2 {
            let sig = increment_signature(&t, t.ground(), 21, r).map_err(e)?;
            let best = brute_max_perimeters(&t, r, 21).map_err(e)?;
            for (k, inc) in sig.iter().enumerate() {
                let diff = &best[k + 1].value - &best[k].value;
                ensure!(
                    *inc == diff,
                    "p = {p}, r = {r}, k = {k}: {inc} vs brute {diff}"
                );
            }
        }
    }
    Ok(
        "p in {2, 3, 5}: 64 increments match Legendre; r in {1, 2} on 21 points match brute force"
            .into(),
    )
}

fn property_s_for_families() -> Outcome {
    let mut rng = rng(7);
    let mut cases = 0usize;
    for i in 0..100 {
        let n = rng.gen_range(2..=6);
        let t = triple(&mut rng, n);
        let f = random_family(&mut rng, &t, 5, 2).map_err(e)?;
        let dist = FamilyDist(f);
        let s1 = check_s1(&t, &dist, 4).map_err(e)?;
        let s2 = check_s2(&t, &dist, 4).map_err(e)?;
        ensure!(
            s1.is_empty() && s2.is_empty(),
            "instance {i}: S1 {s1:?}, S2 {s2:?}"
        );

        let domain: Vec<Rat> = t.table().occurring_values().into_iter().collect();
        let g = random_monotone_table(&mut rng, &domain, 3);
        let r = rng.gen_range(0..=3);
        let step = MonotoneFamily::step(&g, r, n).map_err(e)?;
        let moved = t.transform_distance(&g).map_err(e)?;
        for c in all_subsets(&t) {
            for v in t.ground().difference(c) {
                let lhs = dist_f(&t, c, v, &step).map_err(e)?;
                let rhs = dist_r(&moved, c, v, r).map_err(e)?;
                ensure!(
                    lhs == rhs,
                    "instance {i}, r = {r}: step family {lhs} vs transformed {rhs}"
                );
                cases += 1;
            }
        }
    }
    Ok(format!(
        "100 families: S1 and S2 hold up to |C| = 4; step identity on {cases} cases"
    ))
}

fn reconstruction_round_trip() -> Outcome {
    let mut rng = rng(8);
    for i in 0..50 {
        let p = if i % 2 == 0 { 3 } else { 5 };
        let mut pool: Vec<i64> = (-4..=0).collect();
        pool.shuffle(&mut rng);
        let size = rng.gen_range(1..=5);
        let mut domain = pool[..size].to_vec();
        domain.sort();
        let m_max = rng.gen_range(1..=4);
        let keys: Vec<Rat> = domain.iter().map(|&d| Rat::from_int(d)).collect();
        let tables: Vec<MonotoneTable> = (0..m_max)
            .map(|_| random_monotone_table(&mut rng, &keys, 3))
            .collect();
        let f = MonotoneFamily::new(tables).map_err(e)?;
        let g = FamilyDist(f.clone());
        let fam = reconstruct_f(&g, p, m_max, &domain).map_err(e)?;
        ensure!(fam.monotone, "instance {i}: reconstruction not monotone");
        for (m, table) in fam.tables.iter().enumerate() {
            for (d, v) in table {
                let want = f.level(m + 1).eval(&Rat::from_int(*d)).map_err(e)?;
                ensure!(
                    *v == want,
                    "instance {i}: f_{}({d}) = {v}, expected {want}",
                    m + 1
                );
            }
        }
        let mismatch = verify_reconstruction(&g, &fam, p, m_max, &domain).map_err(e)?;
        ensure!(mismatch.is_none(), "instance {i}: {mismatch:?}");
    }
    Ok("50 families recovered exactly and verified to full depth".into())
}

fn check_projections(t: &UltraTriple) -> Result<usize, String> {
    let g = t.ground();
    let mut count = 0usize;
    for a in all_subsets(t).filter(|a| !a.is_empty()) {
        for c in t.points() {
            for b in proj_point(t, a, c).map_err(e)? {
                for x in a.without(b) {
                    ensure!(
                        t.d(b, x) <= t.d(c, x),
                        "contraction fails for c = {c}, b = {b}, x = {x}"
                    );
                }
            }
        }
        let mut seqs: Vec<Vec<Point>> = vec![Vec::new()];
        for _ in 0..a.len() {
            let mut next = Vec::new();
            for s in &seqs {
                for x in g.iter().filter(|x| !s.contains(x)) {
                    let mut longer = s.clone();
                    longer.push(x);
                    next.push(longer);
                }
            }
            for cseq in &next {
                for v in proj_seq(t, cseq, a, TiePolicy::All).map_err(e)? {
                    for j in 1..=cseq.len() {
                        let left = a.difference(v[..j].iter().collect());
                        let cs: PointSet = cseq[..j].iter().collect();
                        ensure!(
                            left.intersection(cs).is_empty(),
                            "disjointness fails for {cseq:?} -> {v:?}"
                        );
                    }
                    let image: PointSet = v.iter().collect();
                    let cset: PointSet = cseq.iter().collect();
                    for u in a.difference(image) {
                        for r in 0..=cseq.len() {
                            let lhs = dist_r(t, image, u, r).map_err(e)?;
                            let rhs = dist_r(t, cset, u, r).map_err(e)?;
                            ensure!(
                                lhs <= rhs,
                                "domination fails for {cseq:?} -> {v:?}, u = {u}, r = {r}"
                            );
                        }
                    }
                    count += 1;
                }
            }
            seqs = next;
        }
    }
    Ok(count)
}

fn construction_postconditions() -> Outcome {
    let mut rng = rng(9);
    let mut projections = 0usize;
    let mut spaces: Vec<UltraTriple> = (0..6).map(|_| tied_triple(&mut rng, 6)).collect();
    spaces.push(triple(&mut rng, 6));
    for p in [2, 3] {
        spaces.push(padic_triple(&PadicSpec::new(p, 0, (0..6).collect())).map_err(e)?);
    }
    for t in &spaces {
        projections += check_projections(t)?;
    }

    let mut profiles = 0usize;
    for p in [3u64, 5] {
        for len in 1..=6 {
            for prof in ultragreedoid::property_s::sorted_tuples(&[-3, -2, -1, 0], len) {
                if prof.len() != len {
                    continue;
                }
                check_realization(p, &prof)?;
                profiles += 1;
            }
        }
    }

    for i in 0..1000 {
        let p = *[3u64, 5, 7].choose(&mut rng).unwrap();
        let a = rng.gen_range(-300..=300i64);
        let mut b = rng.gen_range(-300..=300i64);
        if b == a {
            b += 1;
        }
        let nu = nu_p((a - b) as i128, p).map_err(e)? as i64;
        let ell = -(nu + rng.gen_range(0..=2));
        let c = witness_point(p, a, b, ell).map_err(|err| format!("witness {i}: {err}"))?;
        ensure!(c != a && c != b, "witness {i}: c coincides with a or b");
        ensure!(
            nu_p((a - c) as i128, p).map_err(e)? as i64 == -ell,
            "witness {i}: wrong nu(a - c)"
        );
        ensure!(
            nu_p((b - c) as i128, p).map_err(e)? as i64 == nu,
            "witness {i}: wrong nu(b - c)"
        );
        ensure!(
            witness_point(p, a, b, -nu + 1).is_err(),
            "witness {i}: accepted l above d(a, b)"
        );

        let len = rng.gen_range(1..=6);
        let mut prof: Vec<i64> = (0..len).map(|_| rng.gen_range(-4..=0)).collect();
        prof.sort();
        check_realization(p, &prof)?;
    }
    Ok(format!(
        "{projections} projections on {} spaces, {profiles} exhaustive profiles, 1000 random witnesses and realizations",
        spaces.len()
    ))
}

fn check_realization(p: u64, prof: &[i64]) -> Result<(), String> {
    let real = realize_profile(p, prof).map_err(e)?;
    let mut elements = vec![real.x];
    elements.extend(&real.points);
    let t =
        padic_triple(&PadicSpec::new(p, 0, elements)).map_err(|err| format!("{prof:?}: {err}"))?;
    let c: PointSet = (1..t.len()).map(Point).collect();
    let got = profile(&t, c, Point(0)).map_err(e)?;
    let want: Vec<Rat> = prof.iter().map(|&d| Rat::from_int(d)).collect();
    ensure!(
        got.values() == want.as_slice(),
        "realized {prof:?} as {:?}",
        got.values()
    );
    let anchor = Point(t.len() - 1);
    let top = Rat::from_int(*prof.last().unwrap());
    for q in c.without(anchor) {
        ensure!(
            *t.d(q, anchor) == top,
            "{prof:?}: point {q} is not at d_n from the anchor"
        );
    }
    Ok(())
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ultragreedoid");
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let input = data.join("neg_nu2.json").display().to_string();
    let family = data.join("family.json").display().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--input", &input],
        vec![
            "dist", "--input", &input, "--set", "0,1,2", "--point", "4", "--r", "1",
        ],
        vec![
            "perimeter",
            "--input",
            &input,
            "--set",
            "0,1,2,3",
            "--r",
            "0",
        ],
        vec![
            "perimeter",
            "--input",
            &input,
            "--set",
            "3,1,0",
            "--r",
            "1",
            "--ordered",
        ],
        vec![
            "order", "--input", &input, "--r", "0", "--m", "5", "--ties", "first",
        ],
        vec!["order", "--input", &input, "--r", "1", "--ties", "all"],
        vec!["signature", "--input", &input, "--r", "1"],
        vec!["maxsets", "--input", &input, "--r", "0", "--kmax", "3"],
        vec!["greedoid", "--input", &input, "--r", "1", "--kmax", "4"],
        vec![
            "prefix-check",
            "--input",
            &input,
            "--set",
            "1,4",
            "--r",
            "0",
        ],
        vec!["props", "--input", &input, "--dist", "r", "--r", "1"],
        vec![
            "props",
            "--input",
            &input,
            "--dist",
            "family",
            "--family",
            &family,
            "--size-cap",
            "2",
        ],
        vec![
            "reconstruct",
            "--dist",
            "family",
            "--family",
            &family,
            "--p",
            "3",
            "--mmax",
            "3",
        ],
    ];
    let mut reports = 0usize;
    for args in &runs {
        for verify in [false, true] {
            let mut argv = args.clone();
            if verify {
                argv.push("--verify");
            }
            let once = Command::new(bin).args(&argv).output().map_err(e)?;
            let twice = Command::new(bin).args(&argv).output().map_err(e)?;
            ensure!(
                once.stdout == twice.stdout,
                "{argv:?}: reports differ between runs"
            );
            ensure!(
                once.status.code() == Some(0),
                "{argv:?}: exit {:?}",
                once.status.code()
            );
            ensure!(
                twice.status.code() == Some(0),
                "{argv:?}: exit {:?}",
                twice.status.code()
            );
            reports += 1;
        }
    }
    Ok(format!(
        "{} subcommand runs, {reports} byte-identical report pairs, no exit 2",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("permutation invariance", permutation_invariance),
        ("greedy optimality", greedy_optimality),
        ("increment invariance", increment_invariance),
        ("prefix theorem", prefix_theorem),
        ("strong greedoid", strong_greedoid),
        ("factorial cross-check", factorial_cross_check),
        ("property S for dist_f", property_s_for_families),
        ("reconstruction round trip", reconstruction_round_trip),
        ("construction postconditions", construction_postconditions),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {ms} ms)", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} {name}: FAIL ({why}; {ms} ms)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
