//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines are always
//! printed.

#[path = "../../core/tests/common/mod.rs"]
mod oracles;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use coinvest_core::community::louvain;
use coinvest_core::graph::{
    build_bipartite, cosine_similarity, degree_sequence, project, CapitalAllocation, InvestorEdge,
    InvestorNetwork, InvestorNode, ProjectionConfig,
};
use coinvest_core::ingest::{FilterSpec, MacroAreaMap, Ownership, SubsidiaryRecord};
use coinvest_core::nullmodel::{configuration_rewire, RewireConfig};
use coinvest_core::pipeline::{analyze_network, analyze_records, build_network, PipelineConfig};
use coinvest_core::seed::{derive_seed, rng_for};
use coinvest_core::stats::{chi_square_stat, mc_pvalue, ContingencyTable, Verdict};
use coinvest_core::synth::{generate, power_curve, PlantSpec};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pipeline(seed: u64) -> PipelineConfig {
    PipelineConfig {
        runs: 200,
        mc_samples: 9999,
        seed,
        ..Default::default()
    }
}

fn planted_detection() -> Outcome {
    let areas = MacroAreaMap::seeded();
    let mut hits = 0;
    let mut slowest = Duration::ZERO;
    let mut worst_p: f64 = 0.0;
    for seed in 0..20 {
        let start = Instant::now();
        let (records, memberships) = generate(&PlantSpec {
            seed,
            ..Default::default()
        })
        .expect("default spec is valid");
        let (_, a) = analyze_records(
            &records,
            &memberships,
            &areas,
            &FilterSpec::default(),
            &ProjectionConfig::default(),
            &pipeline(seed),
        )
        .expect("planted data is analysable");
        slowest = slowest.max(start.elapsed());
        worst_p = worst_p.max(a.result.p_value);
        if a.result.p_value < 0.01 {
            hits += 1;
        }
    }
    outcome(
        hits >= 19 && slowest < Duration::from_secs(60),
        format!(
            "{hits}/20 seeds with p < 0.01 (max p {worst_p:.6}); slowest seed {:.2}s",
            slowest.as_secs_f64()
        ),
    )
}

fn null_collapse() -> Outcome {
    let (records, memberships) = generate(&PlantSpec::default()).expect("default spec is valid");
    let built = build_network(
        &records,
        &memberships,
        &MacroAreaMap::seeded(),
        &FilterSpec::default(),
        &ProjectionConfig::default(),
    )
    .expect("network builds");
    let mut ps = Vec::new();
    let mut kept = 0;
    for replica in 0..20u64 {
        let rewired = configuration_rewire(
            &built.network,
            &RewireConfig {
                swaps_per_edge: 20,
                seed: derive_seed(1, "rewire", replica),
                allow_multiedges: false,
            },
        )
        .expect("rewiring succeeds");
        let a = analyze_network(
            &rewired.network,
            &memberships,
            &pipeline(derive_seed(1, "replica", replica)),
        )
        .expect("rewired network is analysable");
        if a.result.verdict == Verdict::NotRejected {
            kept += 1;
        }
        ps.push(a.result.p_value);
    }
    ps.sort_by(f64::total_cmp);
    let median = (ps[9] + ps[10]) / 2.0;
    outcome(
        median >= 0.5 && kept >= 16,
        format!(
            "median p {median:.4}, {kept}/20 replicas not rejected (min p {:.4})",
            ps[0]
        ),
    )
}

fn random_small_graph(rng: &mut impl Rng) -> (usize, InvestorNetwork, Vec<(usize, usize, f64)>) {
    loop {
        let n = rng.random_range(2..=8);
        let density = rng.random_range(0.2..0.8);
        let weighted = rng.random_bool(0.5);
        let mut raw = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(density) {
                    let w = if weighted {
                        rng.random_range(0.05..=1.0)
                    } else {
                        1.0
                    };
                    raw.push((a, b, w));
                }
            }
        }
        if raw.is_empty() {
            continue;
        }
        let nodes = (0..n).map(|i| InvestorNode::new(format!("v{i}"))).collect();
        let edges = raw
            .iter()
            .map(|&(a, b, w)| InvestorEdge::new(a, b, 1, w))
            .collect();
        return (
            n,
            InvestorNetwork::new(nodes, edges).expect("valid graph"),
            raw,
        );
    }
}

fn louvain_quality() -> Outcome {
    let mut rng = rng_for(3, "acceptance-louvain", 0);
    let mut worst_gap: f64 = 0.0;
    let mut within = 0;
    for trial in 0..100 {
        let (n, net, raw) = random_small_graph(&mut rng);
        let best = oracles::optimal_modularity(n, &raw);
        let p = louvain(&net, trial).expect("graph has edges");
        let q = oracles::dense_modularity(n, &raw, p.assignment());
        worst_gap = worst_gap.max(best - q);
        if q >= best - 0.05 {
            within += 1;
        }
    }
    let triangles =
        InvestorNetwork::from_pairs(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
            .expect("valid graph");
    let tp = louvain(&triangles, 0).expect("graph has edges");
    let tq = tp.modularity().unwrap_or(f64::NAN);
    let raw: Vec<(usize, usize, f64)> = triangles.edges().iter().map(|e| (e.a, e.b, 1.0)).collect();
    let t_opt = oracles::optimal_modularity(6, &raw);
    outcome(
        within == 100 && (tq - 0.5).abs() < 1e-12 && (t_opt - 0.5).abs() < 1e-12,
        format!(
            "{within}/100 within 0.05 of optimum (largest gap {worst_gap:.4}); two triangles Q = {tq} (optimum {t_opt})"
        ),
    )
}

fn chi_square_oracle() -> Outcome {
    let mut rng = rng_for(4, "acceptance-chi", 0);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 1000 {
        let (r, c) = (rng.random_range(1..=10), rng.random_range(1..=10));
        let cells: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.random_range(0..50) as f64).collect())
            .collect();
        let Ok(chi) = chi_square_stat(&ContingencyTable::from_cells(cells.clone())) else {
            continue;
        };
        worst = worst.max((chi - oracles::direct_chi_square(&cells)).abs());
        checked += 1;
    }
    let fixed = chi_square_stat(&ContingencyTable::from_cells(vec![
        vec![15.0, 5.0],
        vec![5.0, 15.0],
    ]));
    outcome(
        worst <= 1e-9 && fixed == Ok(10.0),
        format!("1000 tables, max |diff| {worst:.3e}; [[15,5],[5,15]] -> {fixed:?}"),
    )
}

fn mc_calibration() -> Outcome {
    let mut rng = rng_for(5, "acceptance-mc", 0);
    let mut worst: f64 = 0.0;
    let mut tables = 0;
    while tables < 20 {
        let t = [
            [rng.random_range(0..9u64), rng.random_range(0..9u64)],
            [rng.random_range(0..9u64), rng.random_range(0..9u64)],
        ];
        let total: u64 = t.iter().flatten().sum();
        let cells: Vec<Vec<f64>> = t
            .iter()
            .map(|r| r.iter().map(|&x| x as f64).collect())
            .collect();
        if total > 30 || chi_square_stat(&ContingencyTable::from_cells(cells.clone())).is_err() {
            continue;
        }
        let mc = mc_pvalue(&ContingencyTable::from_cells(cells), 99_999, tables)
            .expect("non-degenerate table")
            .p_value;
        worst = worst.max((mc - oracles::exact_2x2_pvalue(t)).abs());
        tables += 1;
    }

    let mut ps = Vec::new();
    for k in 0..500u64 {
        let (r, c) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let pr: Vec<f64> = (0..r).map(|_| rng.random_range(0.5..1.5)).collect();
        let pc: Vec<f64> = (0..c).map(|_| rng.random_range(0.5..1.5)).collect();
        let (sr, sc): (f64, f64) = (pr.iter().sum(), pc.iter().sum());
        let probs: Vec<f64> = pr
            .iter()
            .flat_map(|a| pc.iter().map(move |b| a * b / (sr * sc)))
            .collect();
        let n = rng.random_range(80..200);
        let cell = WeightedIndex::new(&probs).expect("valid probabilities");
        let mut counts = vec![0.0; r * c];
        for _ in 0..n {
            counts[cell.sample(&mut rng)] += 1.0;
        }
        let cells: Vec<Vec<f64>> = counts.chunks(c).map(<[f64]>::to_vec).collect();
        if let Ok(res) = mc_pvalue(&ContingencyTable::from_cells(cells), 1999, k) {
            ps.push(res.p_value);
        }
    }
    let d = oracles::ks_uniform_distance(&ps);
    let critical = 1.628 / (ps.len() as f64).sqrt();
    outcome(
        worst <= 0.01 && d < critical && ps.len() >= 490,
        format!(
            "20 2x2 tables, max |mc - exact| {worst:.4}; KS D = {d:.4} < {critical:.4} over {} null tables",
            ps.len()
        ),
    )
}

fn degree_preservation() -> Outcome {
    let mut rng = rng_for(6, "acceptance-rewire", 0);
    let mut ok = 0;
    let mut trials = 0;
    while trials < 1000 {
        let n = rng.random_range(4..40);
        let density = rng.random_range(0.05..0.6);
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(density) {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.len() < 2 {
            continue;
        }
        trials += 1;
        let net = InvestorNetwork::from_pairs(n, &pairs).expect("valid graph");
        let out = configuration_rewire(
            &net,
            &RewireConfig {
                seed: trials,
                ..Default::default()
            },
        )
        .expect("two or more edges");
        let clean =
            out.network.edges().iter().all(|e| e.a != e.b) && !out.network.has_duplicate_edges();
        if clean && degree_sequence(&out.network) == degree_sequence(&net) {
            ok += 1;
        }
    }
    outcome(
        ok == 1000,
        format!("{ok}/1000 trials kept degrees with no self-loops or multi-edges"),
    )
}

fn cosine() -> Outcome {
    let mut rng = rng_for(7, "acceptance-cosine", 0);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let dim = rng.random_range(1..12);
        let mut draw = || -> Vec<f64> {
            loop {
                let v: Vec<f64> = (0..dim)
                    .map(|_| {
                        if rng.random_bool(0.4) {
                            0.0
                        } else {
                            rng.random_range(0.0..1e5)
                        }
                    })
                    .collect();
                if v.iter().any(|x| *x > 0.0) {
                    return v;
                }
            }
        };
        let (a, b) = (draw(), draw());
        let scale = rng.random_range(1e-3..1e3);
        let alloc = |v: &[f64], s: f64| {
            CapitalAllocation::from_pairs(v.iter().enumerate().map(|(i, x)| (i, x * s)))
                .expect("non-negative")
        };
        let ab = cosine_similarity(&alloc(&a, 1.0), &alloc(&b, 1.0)).expect("non-zero");
        let ba = cosine_similarity(&alloc(&b, 1.0), &alloc(&a, 1.0)).expect("non-zero");
        let scaled = cosine_similarity(&alloc(&a, scale), &alloc(&b, 1.0)).expect("non-zero");
        let dense = oracles::dense_cosine(&a, &b);
        worst = worst.max((ab - dense).abs());
        if !(0.0..=1.0).contains(&ab)
            || ab != ba
            || (ab - scaled).abs() > 1e-12
            || (ab - dense).abs() > 1e-12
        {
            failures += 1;
        }
    }
    let fixed = cosine_similarity(
        &CapitalAllocation::from_pairs([(0, 100.0)]).expect("valid"),
        &CapitalAllocation::from_pairs([(0, 100.0), (1, 100.0)]).expect("valid"),
    )
    .expect("non-zero");
    let fixed_ok = (fixed - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-9
        && format!("{fixed:.8}") == "0.70710678";
    outcome(
        failures == 0 && fixed_ok,
        format!("{failures}/10000 property failures (max |diff| vs dense {worst:.2e}); (100,0)·(100,100) -> {fixed:.10}"),
    )
}

fn record(id: usize, owners: &[usize]) -> SubsidiaryRecord {
    SubsidiaryRecord {
        subsidiary_id: format!("s{id:03}"),
        name: String::new(),
        country: "Thailand".into(),
        sector_code: 1100,
        paidup_capital: Some(1000.0),
        num_employees: None,
        year_established: None,
        owners: owners
            .iter()
            .map(|i| Ownership {
                investor_id: format!("i{i:02}"),
                share: 1.0 / owners.len() as f64,
            })
            .collect(),
        local_share: 0.0,
    }
}

fn projection_oracle() -> Outcome {
    let mut rng = rng_for(8, "acceptance-projection", 0);
    let mut mismatches = 0;
    let mut non_monotone = 0;
    for _ in 0..500 {
        let investors = rng.random_range(2..=12);
        let subs = rng.random_range(1..=20);
        let mut lists = Vec::new();
        let mut records = Vec::new();
        for s in 0..subs {
            let k = rng.random_range(1..=investors.min(5));
            let mut list: Vec<usize> = Vec::new();
            while list.len() < k {
                let i = rng.random_range(0..investors);
                if !list.contains(&i) {
                    list.push(i);
                }
            }
            records.push(record(s, &list));
            lists.push(list);
        }
        let bg = build_bipartite(&records);
        let mut previous: Option<Vec<(usize, usize)>> = None;
        for n in 1..=3 {
            let net = project(
                &bg,
                &ProjectionConfig {
                    min_shared: n,
                    ..Default::default()
                },
            )
            .expect("valid");
            let got: std::collections::BTreeMap<(usize, usize), u32> = net
                .edges()
                .iter()
                .map(|e| {
                    let a: usize = net.nodes()[e.a].id[1..].parse().expect("numeric id");
                    let b: usize = net.nodes()[e.b].id[1..].parse().expect("numeric id");
                    ((a.min(b), a.max(b)), e.shared_count)
                })
                .collect();
            if got != oracles::naive_shared_counts(investors, &lists, n) {
                mismatches += 1;
            }
            let keys: Vec<(usize, usize)> = got.keys().copied().collect();
            if let Some(prev) = &previous {
                if !keys.iter().all(|k| prev.contains(k)) {
                    non_monotone += 1;
                }
            }
            previous = Some(keys);
        }
    }
    outcome(
        mismatches == 0 && non_monotone == 0,
        format!("500 graphs x N in {{1,2,3}}: {mismatches} mismatches, {non_monotone} monotonicity violations"),
    )
}

fn power() -> Outcome {
    let rows = power_curve(&PlantSpec::default(), &[1.0 / 6.0, 0.9], 50, &pipeline(9))
        .expect("power curve runs");
    let (null, strong) = (rows[0].rejection_rate(), rows[1].rejection_rate());
    outcome(
        (0.0..=0.15).contains(&null) && strong >= 0.95,
        format!(
            "rejection rate {null:.3} at p_in = 1/6, {strong:.3} at p_in = 0.9 (50 replicas each)"
        ),
    )
}

fn analyze_reproducible() -> Outcome {
    let tmp = tempfile::tempdir().expect("temp dir");
    let bin = env!("CARGO_BIN_EXE_coinvest");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env("RUST_LOG", "error")
            .stdout(std::process::Stdio::null())
            .status()
            .map(|s| s.success())
            .unwrap_or(false)
    };
    let data = tmp.path().join("data");
    if !run(&["generate", "--seed", "42", "--out", data.to_str().unwrap()]) {
        return outcome(false, "generate failed");
    }
    let analyze = |name: &str| {
        let out = tmp.path().join(name);
        let ok = run(&[
            "analyze",
            "--data",
            data.to_str().unwrap(),
            "--seed",
            "2024",
            "--out",
            out.to_str().unwrap(),
        ]);
        (ok, out)
    };
    let ((ok_a, a), (ok_b, b)) = (analyze("a"), analyze("b"));
    if !(ok_a && ok_b) {
        return outcome(false, "analyze failed");
    }
    let read = |dir: &Path, f: &str| std::fs::read(dir.join(f)).unwrap_or_default();
    let mut files: Vec<String> = std::fs::read_dir(&a)
        .map(|d| {
            d.filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .collect()
        })
        .unwrap_or_default();
    files.retain(|f| f.ends_with(".csv"));
    files.sort();
    let differing: Vec<&String> = files
        .iter()
        .filter(|f| read(&a, f) != read(&b, f))
        .collect();
    outcome(
        files.len() >= 4 && differing.is_empty(),
        format!(
            "{} CSV outputs compared, {} differ {differing:?}",
            files.len(),
            differing.len()
        ),
    )
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("planted structure detected", planted_detection),
        ("null model collapses", null_collapse),
        ("louvain near exhaustive optimum", louvain_quality),
        ("chi-square matches direct formula", chi_square_oracle),
        ("monte-carlo p calibrated", mc_calibration),
        ("rewiring preserves degrees", degree_preservation),
        ("cosine similarity properties", cosine),
        ("projection matches pairwise oracle", projection_oracle),
        ("power curve sane", power),
        ("analyze byte-reproducible", analyze_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "acceptance {:>2} {status} {name}: {} [{:.1}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
