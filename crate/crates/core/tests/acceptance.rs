//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use level_ancestor::block_table::{encode_pattern, PatternTable};
use level_ancestor::far::Plan;
use level_ancestor::random::{path_tree, uniform_attachment_tree, unit_walk};
use level_ancestor::{
    ancestor_oracle, choose_block_size, fs_oracle, iter_log, level_ancestor, BasicIndex, EulerTour,
    FindSmaller, FsIndex, FsInstance, IndexArtifact, LocalKind, MultiIndex, Probe, RootedTree,
    Strategy, TwoLevelIndex,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reads per query allowed for the basic index.
const BASIC_MAX_READS: usize = 2;
/// Reads per query allowed for either two-level variant.
const TWO_LEVEL_MAX_READS: usize = 8;
/// Multi-level reads are bounded by `MULTI_READS_PER_LEVEL * depth`.
const MULTI_READS_PER_LEVEL: usize = 5;
/// Table-variant cells per array element, all tables included.
const TABLE_SPACE_PER_ELEMENT: f64 = 16.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Block size for deep multi-level recursion: largest power of two not
/// above `sqrt(n)`.
fn sqrt_blocks(n: usize) -> usize {
    (1usize << (n.max(4).ilog2() / 2)).max(2)
}

/// Every index variant, labelled.
fn all_indexes(inst: &FsInstance) -> Vec<(String, FsIndex)> {
    let mut out = vec![
        (
            "basic".to_string(),
            FsIndex::build(Strategy::Basic, inst.clone(), 1).unwrap(),
        ),
        (
            "two/basic".to_string(),
            FsIndex::build(Strategy::Two, inst.clone(), 2).unwrap(),
        ),
        (
            "two/table".to_string(),
            FsIndex::build(Strategy::Table, inst.clone(), 2).unwrap(),
        ),
    ];
    for depth in 1..=4 {
        out.push((
            format!("multi r={depth}"),
            FsIndex::build(Strategy::Multi, inst.clone(), depth).unwrap(),
        ));
    }
    for depth in 2..=4 {
        let index = MultiIndex::build_with(inst.clone(), depth, &sqrt_blocks).unwrap();
        out.push((
            format!("multi r={depth} sqrt-blocks"),
            FsIndex::Multi { depth, index },
        ));
    }
    out
}

fn value_range(inst: &FsInstance) -> std::ops::RangeInclusive<i64> {
    inst.global_min() - 1..=inst.values().iter().copied().max().unwrap() + 1
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut queries = 0u64;
    for array in 0..1000 {
        let n = rng.gen_range(1..=512);
        let start = rng.gen_range(-3..=3);
        let inst = FsInstance::new(unit_walk(n, start, &mut rng)).unwrap();
        let indexes = all_indexes(&inst);
        for i in 1..=n {
            for x in value_range(&inst) {
                let expect = fs_oracle(&inst, i, x).unwrap();
                for (name, idx) in &indexes {
                    queries += 1;
                    let got = idx.find_smaller(i, x).unwrap();
                    ensure(got == expect, || {
                        format!("array {array} (n={n}) {name}: FS({i},{x}) = {got:?}, oracle {expect:?}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "1000 arrays, {queries} index answers, 0 mismatches"
    ))
}

fn random_trees(seed: u64, count: usize, max_n: usize) -> Vec<RootedTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            uniform_attachment_tree(n, &mut rng)
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let mut checks = 0u64;
    for (t, tree) in random_trees(202, 1000, 512).iter().enumerate() {
        let tour = EulerTour::build(tree);
        let inst = FsInstance::new(tour.levels().to_vec()).unwrap();
        let indexes = all_indexes(&inst);
        for v in 0..tree.node_count() {
            for hops in 0..=tour.node_level(v) as i64 {
                let expect = ancestor_oracle(tree, v, hops).unwrap();
                for (name, idx) in &indexes {
                    checks += 1;
                    let got = level_ancestor(idx, &tour, v, hops).unwrap();
                    ensure(got == expect, || {
                        format!("tree {t}: {name} LA({v},{hops}) = {got}, oracle {expect}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "1000 trees, {checks} ancestor answers, 0 mismatches"
    ))
}

/// Level arrays of roughly `len` entries from deep and shallow trees, and
/// a plain unit walk.
fn families(len: usize, rng: &mut ChaCha8Rng) -> Vec<(&'static str, FsInstance)> {
    let nodes = len / 2;
    let path = EulerTour::build(&path_tree(nodes)).levels().to_vec();
    let random = EulerTour::build(&uniform_attachment_tree(nodes, rng))
        .levels()
        .to_vec();
    vec![
        ("path", FsInstance::new(path).unwrap()),
        ("random-tree", FsInstance::new(random).unwrap()),
        ("walk", FsInstance::new(unit_walk(len, 0, rng)).unwrap()),
    ]
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut ratios = Vec::new();
    for e in (4..=16).step_by(2) {
        for (family, inst) in families(1 << e, &mut rng) {
            let n = inst.len();
            let idx = BasicIndex::build(inst).unwrap();
            let bound = 3 * n * ((n + 1).next_power_of_two().trailing_zeros() as usize + 2);
            let entries = idx.total_entries();
            ensure(entries <= bound, || {
                format!("{family} n={n}: {entries} entries exceed 3n(ceil(log2(n+1))+2) = {bound}")
            })?;
            if family == "path" && e >= 10 {
                let ratio = entries as f64 / (n as f64 * (n as f64).log2());
                ensure((0.5..=3.5).contains(&ratio), || {
                    format!("path n={n}: entries/(n log2 n) = {ratio:.3} outside [0.5, 3.5]")
                })?;
                ratios.push(format!("{ratio:.3}"));
            }
        }
    }
    Ok(format!(
        "all families within 3n(ceil(log2(n+1))+2); path entries/(n log2 n) for n>=2^10: {}",
        ratios.join(", ")
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for e in 10..=16 {
        for (family, inst) in families(1 << e, &mut rng) {
            let n = inst.len();
            let k = choose_block_size(n);
            for kind in [LocalKind::Basic, LocalKind::Table] {
                let idx = TwoLevelIndex::build(inst.clone(), k, kind).unwrap();
                let near = idx.near().entry_count();
                ensure(near <= n + k, || {
                    format!("{family} n={n}: near {near} > n + k = {}", n + k)
                })?;
            }
            if family == "walk" {
                continue;
            }
            let table = FsIndex::build(Strategy::Table, inst, 2).unwrap();
            let per = table.stats().total() as f64 / n as f64;
            worst = worst.max(per);
            ensure(per <= TABLE_SPACE_PER_ELEMENT, || {
                format!("{family} n={n}: table variant uses {per:.2} cells per element")
            })?;
        }
    }
    for k in 2..=16 {
        let count = PatternTable::build(k).unwrap().entry_count();
        let formula = (1usize << (k - 1)) * k * (k - 1);
        ensure(count == formula, || {
            format!("k={k}: {count} pattern cells, formula {formula}")
        })?;
    }
    Ok(format!(
        "near <= n+k everywhere; table cells/element max {worst:.2} <= {TABLE_SPACE_PER_ELEMENT}; pattern counts exact for k=2..16"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut summary = Vec::new();
    for e in [10, 14] {
        let tree = uniform_attachment_tree(1 << (e - 1), &mut rng);
        let inst = FsInstance::new(EulerTour::build(&tree).levels().to_vec()).unwrap();
        let n = inst.len();
        let queries: Vec<(usize, i64)> = (0..100_000)
            .map(|_| {
                let i = rng.gen_range(1..=n);
                (i, rng.gen_range(inst.global_min() - 1..=inst.get(i)))
            })
            .collect();
        let mut limits: Vec<(String, FsIndex, usize)> = Vec::new();
        for (name, idx) in all_indexes(&inst) {
            let limit = match idx.strategy() {
                Strategy::Basic => BASIC_MAX_READS,
                Strategy::Two | Strategy::Table => TWO_LEVEL_MAX_READS,
                Strategy::Multi => MULTI_READS_PER_LEVEL * idx.depth(),
            };
            limits.push((name, idx, limit));
        }
        for (name, idx, limit) in &limits {
            let mut max = 0;
            for &(i, x) in &queries {
                let mut probe = Probe::default();
                idx.find_smaller_probed(i, x, &mut probe).unwrap();
                max = max.max(probe.reads);
            }
            ensure(max <= *limit, || {
                format!("n={n} {name}: {max} reads > {limit}")
            })?;
            summary.push(format!("{name}@2^{e}:{max}"));
        }
    }
    Ok(format!("max reads {}", summary.join(" ")))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut sampled = 0;
    let mut table_reads = 0;
    while sampled < 100_000 {
        let n = rng.gen_range(2..=4096);
        let inst = FsInstance::new(unit_walk(n, 0, &mut rng)).unwrap();
        let idx = BasicIndex::build(inst.clone()).unwrap();
        for _ in 0..1000 {
            let i = rng.gen_range(1..=n);
            let x = rng.gen_range(inst.global_min()..=inst.get(i));
            sampled += 1;
            if let Plan::Table { anchor, column } = idx.plan(i, x).unwrap() {
                table_reads += 1;
                if let Some(t) = (anchor..=i).find(|&t| inst.get(t) <= x) {
                    return Err(format!(
                        "FS({i},{x}): position {t} in [{anchor},{i}] has value <= x"
                    ));
                }
                ensure(column <= idx.capacity(anchor), || {
                    format!("FS({i},{x}): column {column} beyond capacity of row {anchor}")
                })?;
            }
        }
    }
    Ok(format!(
        "{sampled} queries ({table_reads} table lookups), 0 violations"
    ))
}

fn criterion_7() -> Outcome {
    let mut trees = random_trees(202, 1000, 512);
    trees.extend(random_trees(707, 200, 4096));
    trees.push(path_tree(2000));
    for (t, tree) in trees.iter().enumerate() {
        let tour = EulerTour::build(tree);
        let n = tree.node_count();
        let a = tour.levels();
        ensure(tour.len() == 2 * n - 1, || {
            format!("tree {t}: tour length {}", tour.len())
        })?;
        ensure(a.windows(2).all(|w| w[0].abs_diff(w[1]) == 1), || {
            format!("tree {t}: adjacent levels differ by other than 1")
        })?;
        ensure(
            tour.node_at(1) == tree.root() && tour.node_at(tour.len()) == tree.root(),
            || format!("tree {t}: tour endpoints are not the root"),
        )?;
    }
    Ok(format!("{} trees", trees.len()))
}

fn criterion_8() -> Outcome {
    let v = iter_log(1e75, 3);
    ensure(v <= 3.0, || format!("iter_log(1e75, 3) = {v}"))?;
    Ok(format!("iter_log(1e75, 3) = {v:.4}"))
}

fn criterion_9() -> Outcome {
    let mut cells = 0;
    for k in 2..=8 {
        let table = PatternTable::build(k).unwrap();
        for pattern in 0..1u32 << (k - 1) {
            let mut values = vec![0i64];
            for b in 0..k - 1 {
                values.push(values[b] + if pattern >> b & 1 == 1 { 1 } else { -1 });
            }
            ensure(encode_pattern(&values, k) == Ok(pattern), || {
                format!("k={k}: encoding of {pattern}")
            })?;
            for start in 1..=k {
                for gap in 1..k as i64 {
                    cells += 1;
                    let threshold = values[start - 1] - gap;
                    let scan = (start..=k).find(|&o| values[o - 1] <= threshold);
                    let got = table.query(pattern, start, gap).unwrap();
                    ensure(got == scan, || {
                        format!("k={k} pattern {pattern:b} start {start} gap {gap}: {got:?} vs {scan:?}")
                    })?;
                }
            }
        }
    }
    Ok(format!("{cells} cells for k=2..8"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut compared = 0u64;
    for a in 0..100 {
        let nodes = rng.gen_range(1..=128);
        let tree = uniform_attachment_tree(nodes, &mut rng);
        let strategy = Strategy::ALL[a % 4];
        let depth = rng.gen_range(1..=4);
        let original = IndexArtifact::from_tree(tree.clone(), strategy, depth).unwrap();
        let restored =
            IndexArtifact::from_bytes(&original.to_bytes()).map_err(|e| e.to_string())?;
        let (oi, ri) = (&original.index, &restored.index);
        let inst = oi.instance();
        for i in 1..=inst.len() {
            for x in value_range(inst) {
                compared += 1;
                ensure(oi.find_smaller(i, x) == ri.find_smaller(i, x), || {
                    format!("artifact {a} ({strategy}): FS({i},{x}) differs after round trip")
                })?;
            }
        }
        let (ot, rt) = (
            &original.tree.as_ref().unwrap().tour,
            &restored.tree.as_ref().unwrap().tour,
        );
        for v in 0..nodes {
            for hops in 0..=ot.node_level(v) as i64 {
                compared += 1;
                ensure(
                    level_ancestor(oi, ot, v, hops) == level_ancestor(ri, rt, v, hops),
                    || format!("artifact {a}: LA({v},{hops}) differs after round trip"),
                )?;
            }
        }
    }
    Ok(format!("100 artifacts, {compared} answers identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("FS oracle equivalence, all strategies", criterion_1),
        ("LA oracle equivalence, all strategies", criterion_2),
        ("basic FAR entry count", criterion_3),
        ("two-level and table space", criterion_4),
        ("constant table reads per query", criterion_5),
        ("alignment safety of basic queries", criterion_6),
        ("Euler tour invariants", criterion_7),
        ("iterated logarithm below 10^75", criterion_8),
        ("exhaustive pattern table", criterion_9),
        ("artifact round trip", criterion_10),
    ];
    let mut failed = 0;
    let started = Instant::now();
    for (no, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", no + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", no + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
