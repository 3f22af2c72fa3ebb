//! Runs every acceptance criterion and prints one PASS/FAIL line for each.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fivehole::analytics::{random_rational_set, MinHolesOptions};
use fivehole::chirotope::is_convex_subset;
use fivehole::constructions::carrot_certificate;
use fivehole::partition::{partition_is_valid, IslandCredit};
use fivehole::{
    admissible_patterns, construct_carrot, construct_horton, enumerate_k_holes, garcia_audit, is_k_hole, lower_bound_account,
    min_holes_signatures, run_lemma, signature_k_holes, signature_of, DividedSet, HoleIndex, LemmaSpec, PointSet, RunOptions, Verdict,
};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() <= limit, format!("took {:.1} s, limit {} s", start.elapsed().as_secs_f64(), limit.as_secs()))
}

fn verified(spec: LemmaSpec, opts: &RunOptions) -> Result<fivehole::VerificationReport, String> {
    let r = run_lemma(&spec, opts).map_err(|e| e.to_string())?;
    ensure(
        r.verdict == Verdict::Verified,
        format!("{}: {:?} with {} counterexamples", r.lemma, r.verdict, r.counterexample_count),
    )?;
    Ok(r)
}

fn min_holes() -> Result<String, String> {
    let start = Instant::now();
    let opts = MinHolesOptions::default();
    let mut notes = Vec::new();
    for (n, want) in [(9, 0), (10, 1)] {
        let r = min_holes_signatures(n, 5, &opts).map_err(|e| e.to_string())?;
        ensure(r.count == want, format!("n={n}: minimum {} instead of {want}", r.count))?;
        let text = r.witness.ok_or(format!("n={n}: no witness"))?;
        let set = PointSet::parse(&text).map_err(|e| e.to_string())?;
        ensure(set.len() == n, "witness size")?;
        let h5 = enumerate_k_holes(&set, 5).len() as u64;
        ensure(h5 == want, format!("n={n}: witness has {h5} 5-holes"))?;
        notes.push(format!("n={n}: {want} ({} leaves)", r.visited));
    }
    within(start, Duration::from_secs(2 * 3600))?;
    Ok(notes.join(", "))
}

fn computer_assisted_small() -> Result<String, String> {
    let mut notes = Vec::new();
    for spec in [LemmaSpec::lemma10(4), LemmaSpec::lemma10(5), LemmaSpec::lemma12(5)] {
        let start = Instant::now();
        let r = verified(spec, &RunOptions::default())?;
        within(start, Duration::from_secs(30 * 60))?;
        notes.push(format!("{} ({} leaves)", r.lemma, r.visited));
    }
    Ok(notes.join(", "))
}

fn computer_assisted_sharded() -> Result<String, String> {
    let start = Instant::now();
    let (shards, shard) = (1024, 517);
    let sharded = |max_jobs, checkpoint| RunOptions {
        shards,
        shard,
        checkpoint,
        batch: 4,
        max_jobs,
        ..Default::default()
    };
    let mut notes = Vec::new();
    for spec in [LemmaSpec::lemma9(), LemmaSpec::lemma11()] {
        ensure(spec.n() == 11, "n = 11")?;
        let whole = verified(spec.clone(), &sharded(None, None))?;
        // interrupted every 3 jobs and resumed from the checkpoint
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let path = dir.path().join("checkpoint.json");
        let mut calls = 0;
        let resumed = loop {
            let r = run_lemma(&spec, &sharded(Some(3), Some(path.clone()))).map_err(|e| e.to_string())?;
            calls += 1;
            if r.complete {
                break r;
            }
        };
        ensure(calls > 1, "run was not interrupted")?;
        ensure(whole.same_outcome(&resumed), "resumed run differs")?;
        notes.push(format!("{} shard {shard}/{shards}: {} leaves, resumed over {calls} calls", whole.lemma, whole.visited));
    }
    within(start, Duration::from_secs(3600))?;
    Ok(notes.join(", "))
}

fn garcia() -> Result<String, String> {
    let a = garcia_audit(1000, 10..=14, 2024).map_err(|e| e.to_string())?;
    ensure(a.instances == 1000, "instance count")?;
    ensure(a.failures == 0, format!("{} failures", a.failures))?;
    Ok("1000 sets, n = 10..14, 0 failures".into())
}

fn carrots() -> Result<String, String> {
    let start = Instant::now();
    for n in 5..=40 {
        let d = construct_carrot(n).map_err(|e| format!("n={n}: {e}"))?;
        ensure(d.size_a() == 4 && d.size_b() == n, format!("n={n}: sizes {}/{}", d.size_a(), d.size_b()))?;
        let (critical, divided) = carrot_certificate(&d);
        ensure(critical, format!("n={n}: not critical"))?;
        ensure(divided == 0, format!("n={n}: {divided} divided 5-holes"))?;
        if n <= 12 {
            let brute = enumerate_k_holes(d.base(), 5).iter().filter(|h| h.indices[0] < 4 && h.indices[4] >= 4).count();
            ensure(brute == 0, format!("n={n}: oracle finds {brute} divided 5-holes"))?;
        }
    }
    within(start, Duration::from_secs(5 * 60))?;
    Ok("n = 5..40 critical, no divided 5-hole".into())
}

fn horton() -> Result<String, String> {
    let start = Instant::now();
    for n in 7..=20 {
        let h = construct_horton(n).map_err(|e| e.to_string())?;
        ensure(h.len() == n, "size")?;
        let c = HoleIndex::new(&h).count(7);
        ensure(c == 0, format!("n={n}: {c} 7-holes"))?;
        if n <= 13 {
            ensure(enumerate_k_holes(&h, 7).is_empty(), format!("n={n}: oracle finds a 7-hole"))?;
        }
    }
    within(start, Duration::from_secs(10 * 60))?;
    Ok("n = 7..20 without 7-holes".into())
}

fn oracle_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let n = rng.gen_range(3..=10);
        let set = random_rational_set(&mut rng, n);
        let sig = signature_of(&set);
        for k in 3..=5 {
            let a = signature_k_holes(&sig, k, None);
            let b = enumerate_k_holes(&set, k).len() as u64;
            ensure(a == b, format!("trial {trial}, n={n}, k={k}: {a} vs {b}"))?;
        }
    }
    Ok("1000 sets, k = 3, 4, 5, no mismatch".into())
}

fn statement_harness() -> Result<String, String> {
    let opts = RunOptions::default();
    let l6 = verified(LemmaSpec::lemma6(5, 5), &opts)?;
    let c8 = verified(LemmaSpec::corollary8(5, 5, 6), &opts)?;
    let c8_relaxed = verified(LemmaSpec::corollary8(5, 5, 5), &opts)?;
    let c8_eleven = verified(LemmaSpec::corollary8(5, 6, 6), &opts)?;
    ensure(c8_relaxed.hypothesis_held > 0, "relaxed corollary is vacuous")?;
    let inverted = run_lemma(
        &LemmaSpec::corollary8(5, 5, 5).inverted(),
        &RunOptions {
            stop_after_first: true,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(inverted.verdict == Verdict::Refuted, "inverted conclusion not refuted")?;
    for dump in &inverted.counterexamples {
        let sig: fivehole::Signature = dump.parse().map_err(|e: fivehole::Error| e.to_string())?;
        ensure(sig.is_consistent(), "inconsistent counterexample")?;
    }
    Ok(format!(
        "lemma6 5/5 ({} held), corollary8 5/5 ({} held, {} with |B|>=5), corollary8 5/6 ({} held), inverted: {} counterexamples",
        l6.hypothesis_held, c8.hypothesis_held, c8_relaxed.hypothesis_held, c8_eleven.hypothesis_held, inverted.counterexample_count
    ))
}

fn cross(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128
}

fn four_point_patterns() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = BTreeSet::new();
    let mut samples = 0;
    while samples < 100_000 {
        let mut p: Vec<(i64, i64)> = (0..4).map(|_| (rng.gen_range(-1000..1000), rng.gen_range(-1000..1000))).collect();
        p.sort_unstable();
        let Ok(set) = PointSet::from_ints(&p) else { continue };
        samples += 1;
        let pattern = [cross(p[0], p[1], p[2]) > 0, cross(p[0], p[1], p[3]) > 0, cross(p[0], p[2], p[3]) > 0, cross(p[1], p[2], p[3]) > 0];
        ensure(signature_of(&set).pattern(0, 1, 2, 3) == pattern, format!("pattern mismatch at {p:?}"))?;
        seen.insert(pattern);
    }
    let expected: BTreeSet<_> = admissible_patterns().into_iter().collect();
    ensure(expected.len() == 8, "eight admissible patterns")?;
    ensure(seen == expected, format!("{} patterns seen", seen.len()))?;
    Ok("100000 samples, 8 patterns".into())
}

fn random_divided(rng: &mut ChaCha8Rng, n: usize) -> DividedSet {
    loop {
        let pts: Vec<(i64, i64)> = (0..n).map(|_| (rng.gen_range(0..1_000_000), rng.gen_range(0..1_000_000))).collect();
        if let Ok(s) = PointSet::from_ints(&pts) {
            return DividedSet::new(s, n / 2).unwrap();
        }
    }
}

fn pipeline() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut found, mut convex) = (0, 0);
    for trial in 0..50 {
        let d = random_divided(&mut rng, 200);
        let acc = lower_bound_account(&d, 5).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(partition_is_valid(&d, &acc.partition), format!("trial {trial}: invalid partition"))?;
        let h5 = HoleIndex::new(d.base()).count(5);
        ensure(acc.total <= h5, format!("trial {trial}: account {} above h5 {h5}", acc.total))?;
        for (island, credit) in acc.partition.islands.iter().zip(&acc.credits) {
            let (a, b): (Vec<usize>, Vec<usize>) = island.iter().partition(|&&i| i < d.split());
            let convex_part = is_convex_subset(d.base(), &a) || is_convex_subset(d.base(), &b);
            match credit {
                IslandCredit::DividedHole { hole } => {
                    ensure(!convex_part, "hole search on a convex island")?;
                    ensure(hole.iter().all(|v| island.contains(v)), "hole outside its island")?;
                    ensure(is_k_hole(d.base(), hole), format!("trial {trial}: {hole:?} is not a 5-hole"))?;
                    ensure(hole[0] < d.split() && hole[4] >= d.split(), "hole not divided")?;
                    found += 1;
                }
                IslandCredit::ConvexPart { .. } => {
                    ensure(convex_part, "convex credit on a non-convex island")?;
                    convex += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(20 * 60))?;
    Ok(format!("50 sets of 200 points, {found} divided 5-holes found, {convex} convex islands"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("min-holes n=9,10 k=5", min_holes),
        ("lemma10 |B|=4,5 and lemma12 |A|=5", computer_assisted_small),
        ("lemma9 and lemma11 n=11, one shard, resumable", computer_assisted_sharded),
        ("3-hole and 4-hole identities", garcia),
        ("carrot certificates", carrots),
        ("Horton sets", horton),
        ("signature counts against the oracle", oracle_equivalence),
        ("lemma6 and corollary8 at n=10", statement_harness),
        ("4-point sign patterns", four_point_patterns),
        ("island pipeline on 200 points", pipeline),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note} [{secs:.1} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
