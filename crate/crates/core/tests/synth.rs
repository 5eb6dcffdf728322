use std::path::Path;

use coinvest_core::graph::{build_bipartite, project, InvestorNetwork, ProjectionConfig};
use coinvest_core::ingest::{
    parse_memberships, parse_subsidiaries, write_macroareas, write_memberships, write_subsidiaries,
    MacroAreaMap,
};
use coinvest_core::pipeline::PipelineConfig;
use coinvest_core::synth::{generate, power_curve, same_group_fraction, PlantSpec};

fn fixture(name: &str) -> Vec<u8> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/synth_seed42")
        .join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn golden_fixture_is_reproduced() {
    let (records, memberships) = generate(&PlantSpec {
        seed: 42,
        ..Default::default()
    })
    .unwrap();
    let mut subs = Vec::new();
    write_subsidiaries(&records, &mut subs).unwrap();
    let mut members = Vec::new();
    write_memberships(&memberships, &mut members).unwrap();
    let mut areas = Vec::new();
    write_macroareas(&MacroAreaMap::seeded(), &mut areas).unwrap();
    assert!(
        subs == fixture("subsidiaries.csv"),
        "subsidiaries.csv drifted"
    );
    assert!(
        members == fixture("memberships.csv"),
        "memberships.csv drifted"
    );
    assert!(areas == fixture("macroareas.csv"), "macroareas.csv drifted");
}

#[test]
fn golden_fixture_parses_back() {
    let records = parse_subsidiaries(fixture("subsidiaries.csv").as_slice()).unwrap();
    let memberships = parse_memberships(fixture("memberships.csv").as_slice()).unwrap();
    assert_eq!(records.len(), 2000);
    assert_eq!(memberships.len(), 300);
}

#[test]
fn realized_same_group_share_tracks_p_in() {
    let mean: f64 = (0..10)
        .map(|seed| {
            let (records, memberships) = generate(&PlantSpec {
                seed,
                ..Default::default()
            })
            .unwrap();
            same_group_fraction(&records, &memberships).unwrap()
        })
        .sum::<f64>()
        / 10.0;
    assert!((mean - 0.8).abs() <= 0.05, "{mean}");
}

fn component_count(net: &InvestorNetwork) -> usize {
    let mut parent: Vec<usize> = (0..net.node_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in net.edges() {
        let (a, b) = (find(&mut parent, e.a), find(&mut parent, e.b));
        parent[a] = b;
    }
    (0..net.node_count())
        .filter(|&x| find(&mut parent, x) == x)
        .count()
}

#[test]
fn full_planting_splits_network_by_group() {
    let spec = PlantSpec {
        p_in: 1.0,
        owner_weights: vec![0.0, 1.0, 1.0, 1.0, 1.0],
        seed: 3,
        ..Default::default()
    };
    let (records, memberships) = generate(&spec).unwrap();
    let net = project(&build_bipartite(&records), &ProjectionConfig::default()).unwrap();
    assert!(component_count(&net) >= spec.groups);
    for e in net.edges() {
        assert_eq!(
            memberships.groups_of(&net.nodes()[e.a].id),
            memberships.groups_of(&net.nodes()[e.b].id)
        );
    }
}

#[test]
fn power_curve_single_value_gives_one_row() {
    let spec = PlantSpec {
        investors_per_group: 10,
        subsidiaries: 200,
        ..Default::default()
    };
    let cfg = PipelineConfig {
        runs: 5,
        mc_samples: 200,
        ..Default::default()
    };
    let rows = power_curve(&spec, &[0.9], 10, &cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].replicas, 10);
}
