use std::path::{Path, PathBuf};

use coinvest_core::community::{align_runs, RunEnsemble};
use coinvest_core::graph::{bipartite_to_dot, network_to_dot, network_to_graphml, InvestorNetwork};
use coinvest_core::ingest::{
    country_frequencies, descriptive_stats, parse_macroareas, parse_memberships,
    parse_subsidiaries, size_stats, write_macroareas, write_memberships, write_subsidiaries,
    CoinvestorRow, GroupBy, IngestError, MacroAreaMap, Memberships, SubsidiaryRecord,
};
use coinvest_core::nullmodel::{null_battery, NullModelError};
use coinvest_core::pipeline::{analyze_network, build_network, PipelineError};
use coinvest_core::stats::{test_battery, BatteryOutcome, BatteryRow};
use coinvest_core::synth::{generate, power_curve, PlantSpec, SynthError};
use log::info;

use crate::args::{
    AnalyzeCmd, BatteryCmd, Command, Common, GenerateCmd, GroupByArg, Inputs, NullCmd, PlantArgs,
    PowerCmd, StatsCmd,
};
use crate::config::{FileConfig, RunConfig};
use crate::manifest::{InputDigest, RunManifest};
use crate::output::{write_file, Table};
use crate::{battery, CliError};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Stats(c) => stats(c),
        Command::Analyze(c) => analyze(c),
        Command::Null(c) => null(c),
        Command::Battery(c) => battery_cmd(c),
        Command::Generate(c) => generate_cmd(c),
        Command::Power(c) => power(c),
    }
}

fn file_config(common: &Common) -> Result<FileConfig, CliError> {
    match &common.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

/// Runs `f` on a pool capped at `threads` workers (0: rayon's default).
fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn pipeline_error(e: PipelineError) -> CliError {
    match e {
        PipelineError::NoData => CliError::Degenerate("the filter selects no subsidiaries".into()),
        PipelineError::Insufficient(m) => CliError::Degenerate(m),
        PipelineError::Graph(g) => CliError::Degenerate(g.to_string()),
        PipelineError::Config(m) => CliError::Config(m),
    }
}

struct Data {
    records: Vec<SubsidiaryRecord>,
    memberships: Memberships,
    areas: MacroAreaMap,
}

fn read_input<T>(
    manifest: &mut RunManifest,
    key: &str,
    path: &Path,
    parse: impl FnOnce(&[u8]) -> Result<T, IngestError>,
) -> Result<T, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    manifest
        .inputs
        .insert(key.into(), InputDigest::of(path, &bytes));
    parse(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn input_path(
    explicit: &Option<PathBuf>,
    data: &Option<PathBuf>,
    file: &str,
    flag: &str,
) -> Result<PathBuf, CliError> {
    explicit
        .clone()
        .or_else(|| data.as_ref().map(|d| d.join(file)))
        .ok_or_else(|| CliError::Input(format!("no {file} given (use --data or --{flag})")))
}

/// Reads and parses the inputs, recording digests and load time.
fn load(inputs: &Inputs, memberships: bool, manifest: &mut RunManifest) -> Result<Data, CliError> {
    let start = std::time::Instant::now();
    let subs = input_path(
        &inputs.subsidiaries,
        &inputs.data,
        "subsidiaries.csv",
        "subsidiaries",
    )?;
    let records = read_input(manifest, "subsidiaries", &subs, |b| parse_subsidiaries(b))?;
    let memberships = if memberships {
        let path = input_path(
            &inputs.memberships,
            &inputs.data,
            "memberships.csv",
            "memberships",
        )?;
        read_input(manifest, "memberships", &path, |b| parse_memberships(b))?
    } else {
        Memberships::default()
    };
    let areas_path = inputs.macroareas.clone().or_else(|| {
        inputs
            .data
            .as_ref()
            .map(|d| d.join("macroareas.csv"))
            .filter(|p| p.is_file())
    });
    let areas = match areas_path {
        Some(path) => read_input(manifest, "macroareas", &path, |b| parse_macroareas(b))?,
        None => MacroAreaMap::seeded(),
    };
    manifest
        .timing_ms
        .insert("load".into(), start.elapsed().as_millis());
    Ok(Data {
        records,
        memberships,
        areas,
    })
}

fn finish(
    manifest: &mut RunManifest,
    dir: &Path,
    files: Vec<(&str, Vec<u8>)>,
) -> Result<(), CliError> {
    for (name, bytes) in &files {
        write_file(dir, name, bytes)?;
        manifest.outputs.push(name.to_string());
    }
    manifest.write(dir)?;
    info!("wrote {} file(s) to {}", files.len() + 1, dir.display());
    Ok(())
}

fn stats(cmd: StatsCmd) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        &file_config(&cmd.common)?,
        Some(&cmd.filter),
        None,
        None,
        cmd.common.threads,
    )?;
    let mut manifest = RunManifest::new("stats", &cfg);
    let data = load(&cmd.inputs, false, &mut manifest)?;
    let filter = cfg.filter()?;
    let records = coinvest_core::ingest::apply_filter(&data.records, &filter, &data.areas).records;
    let by = match cmd.group_by {
        GroupByArg::Macroarea => GroupBy::Macroarea,
        GroupByArg::Sector => GroupBy::Sector,
    };

    let mut coinvestors = Table::new(CoinvestorRow::HEADER);
    for row in descriptive_stats(&records, by, &data.areas) {
        coinvestors.row(row.csv_fields());
    }
    let mut sizes = Table::new(["group", "n", "mean_employees", "mean_capital"]);
    for row in size_stats(&records, by, &data.areas) {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_default();
        sizes.row([
            row.group,
            row.records.to_string(),
            fmt(row.mean_employees),
            fmt(row.mean_capital),
        ]);
    }
    let mut countries = Table::new(["country", "macroarea", "n"]);
    for (country, n) in country_frequencies(&records) {
        let area = data.areas.area_of(&country).name();
        countries.row([country, area.to_string(), n.to_string()]);
    }
    manifest.note("records", records.len());
    finish(
        &mut manifest,
        &cmd.common.out,
        vec![
            ("coinvestors.csv", coinvestors.into_bytes()),
            ("sizes.csv", sizes.into_bytes()),
            ("countries.csv", countries.into_bytes()),
        ],
    )
}

/// Majority aligned label per node and the share of runs that agree with it.
fn consensus_with_agreement(ensemble: &RunEnsemble) -> Vec<(usize, f64)> {
    let aligned = align_runs(&ensemble.runs);
    let k = aligned.iter().flatten().max().map_or(0, |m| m + 1);
    let n = aligned.first().map_or(0, Vec::len);
    let mut votes = vec![0usize; k];
    (0..n)
        .map(|v| {
            votes.iter_mut().for_each(|x| *x = 0);
            for run in &aligned {
                votes[run[v]] += 1;
            }
            let mut best = 0;
            for (c, &count) in votes.iter().enumerate() {
                if count > votes[best] {
                    best = c;
                }
            }
            (best, votes[best] as f64 / aligned.len() as f64)
        })
        .collect()
}

fn partition_csv(net: &InvestorNetwork, ensemble: &RunEnsemble) -> Vec<u8> {
    let mut t = Table::new(["investor_id", "keiretsu", "community", "agreement"]);
    for (node, (c, share)) in net.nodes().iter().zip(consensus_with_agreement(ensemble)) {
        t.row([
            node.id.clone(),
            node.label(),
            format!("C{c}"),
            format!("{share:.4}"),
        ]);
    }
    t.into_bytes()
}

fn ensemble_csv(ensemble: &RunEnsemble) -> Vec<u8> {
    let mut t = Table::new(["run", "seed", "modularity", "communities"]);
    for (i, p) in ensemble.runs.iter().enumerate() {
        t.row([
            i.to_string(),
            RunEnsemble::run_seed(ensemble.seed, i).to_string(),
            p.modularity()
                .map(|q| format!("{q:.10}"))
                .unwrap_or_default(),
            p.community_count().to_string(),
        ]);
    }
    t.into_bytes()
}

fn analyze(cmd: AnalyzeCmd) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        &file_config(&cmd.common)?,
        Some(&cmd.filter),
        Some(&cmd.analysis),
        None,
        cmd.common.threads,
    )?;
    let mut manifest = RunManifest::new("analyze", &cfg);
    let data = load(&cmd.inputs, true, &mut manifest)?;
    let filter = cfg.filter()?;
    let projection = cfg.projection();
    let built = manifest
        .time("project", || {
            build_network(
                &data.records,
                &data.memberships,
                &data.areas,
                &filter,
                &projection,
            )
        })
        .map_err(pipeline_error)?;
    let pipeline = cfg.pipeline();
    let analysis = manifest
        .time("analyze", || {
            with_threads(cfg.threads, || {
                analyze_network(&built.network, &data.memberships, &pipeline)
            })
        })?
        .map_err(pipeline_error)?;

    let row = BatteryRow {
        label: cfg.label(),
        weighting: projection.weighting,
        outcome: BatteryOutcome::Tested(analysis.result.clone()),
    };
    let mut results = Table::new(BatteryRow::HEADER);
    results.row(row.csv_fields());
    let mut contingency = Vec::new();
    analysis
        .table
        .write_csv(&mut contingency)
        .map_err(|e| CliError::Output(e.to_string()))?;

    let r = &analysis.result;
    manifest.note("records", built.records.len());
    manifest.note("investors", built.network.node_count());
    manifest.note("links", built.network.edge_count());
    manifest.note("chi_square", format!("{:.6}", r.chi_square));
    manifest.note("p_value", format!("{:.6}", r.p_value));
    manifest.note("verdict", r.verdict);
    manifest.note("test", &r.dof_note);
    println!(
        "{}: chi2 = {:.4}, p = {:.6} {} ({})",
        row.label,
        r.chi_square,
        r.p_value,
        r.verdict.stars(),
        r.verdict
    );
    finish(
        &mut manifest,
        &cmd.common.out,
        vec![
            ("results.csv", results.into_bytes()),
            ("contingency.csv", contingency),
            (
                "partition.csv",
                partition_csv(&built.network, &analysis.ensemble),
            ),
            ("ensemble.csv", ensemble_csv(&analysis.ensemble)),
            (
                "network.graphml",
                network_to_graphml(&built.network).into_bytes(),
            ),
            ("network.dot", network_to_dot(&built.network).into_bytes()),
            (
                "bipartite.dot",
                bipartite_to_dot(&built.bipartite).into_bytes(),
            ),
        ],
    )
}

fn null(cmd: NullCmd) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        &file_config(&cmd.common)?,
        Some(&cmd.filter),
        Some(&cmd.analysis),
        Some(&cmd.null),
        cmd.common.threads,
    )?;
    let mut manifest = RunManifest::new("null", &cfg);
    let data = load(&cmd.inputs, true, &mut manifest)?;
    let built = build_network(
        &data.records,
        &data.memberships,
        &data.areas,
        &cfg.filter()?,
        &cfg.projection(),
    )
    .map_err(pipeline_error)?;
    let pipeline = cfg.pipeline();
    let rewire = cfg.rewire();
    let replicas = manifest
        .time("replicas", || {
            with_threads(cfg.threads, || {
                null_battery(
                    &built.network,
                    &data.memberships,
                    cfg.replicas,
                    cfg.seed,
                    &rewire,
                    &pipeline,
                )
            })
        })?
        .map_err(|e| match e {
            NullModelError::TooFewEdges(_) => CliError::Degenerate(e.to_string()),
            NullModelError::Replica { source, .. } => pipeline_error(source),
            other => CliError::Config(other.to_string()),
        })?;

    let mut t = Table::new([
        "replica",
        "weighting",
        "mrh_rejected",
        "chi_square",
        "p_value",
        "stars",
        "accepted_swaps",
        "degenerate",
    ]);
    for r in &replicas {
        let [rej, chi, p, stars] = r.result.csv_fields();
        t.row([
            r.replica.to_string(),
            cfg.projection().weighting.name().to_string(),
            rej,
            chi,
            p,
            stars,
            r.accepted_swaps.to_string(),
            r.degenerate.to_string(),
        ]);
    }
    let mut ps: Vec<f64> = replicas.iter().map(|r| r.result.p_value).collect();
    ps.sort_by(f64::total_cmp);
    let median = if ps.len() % 2 == 1 {
        ps[ps.len() / 2]
    } else {
        (ps[ps.len() / 2 - 1] + ps[ps.len() / 2]) / 2.0
    };
    let kept = replicas
        .iter()
        .filter(|r| !r.result.verdict.rejected())
        .count();
    manifest.note("median_p", format!("{median:.6}"));
    manifest.note("not_rejected", format!("{kept}/{}", replicas.len()));
    println!(
        "{} replicas: median p = {median:.4}, {kept} not rejected at .05",
        replicas.len()
    );
    finish(
        &mut manifest,
        &cmd.common.out,
        vec![("null.csv", t.into_bytes())],
    )
}

fn battery_cmd(cmd: BatteryCmd) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        &file_config(&cmd.common)?,
        None,
        Some(&cmd.analysis),
        None,
        cmd.common.threads,
    )?;
    let mut manifest = RunManifest::new("battery", &cfg);
    let (bytes, entries) = battery::load(&cmd.battery, cfg.min_shared)?;
    manifest
        .inputs
        .insert("battery".into(), InputDigest::of(&cmd.battery, &bytes));
    let data = load(&cmd.inputs, true, &mut manifest)?;
    let pipeline = cfg.pipeline();
    let rows = manifest.time("battery", || {
        with_threads(cfg.threads, || {
            test_battery(
                &data.records,
                &data.memberships,
                &data.areas,
                &entries,
                &pipeline,
            )
        })
    })?;
    let mut long = Table::new(BatteryRow::HEADER);
    for r in &rows {
        long.row(r.csv_fields());
        println!("{}", r.csv_fields().join(","));
    }
    finish(
        &mut manifest,
        &cmd.common.out,
        vec![
            ("battery.csv", long.into_bytes()),
            ("table4.csv", battery::wide_table(&rows)),
        ],
    )
}

fn plant_spec(plant: &PlantArgs, p_in: f64, seed: u64) -> PlantSpec {
    PlantSpec {
        groups: plant.groups,
        investors_per_group: plant.investors_per_group,
        unaffiliated_investors: plant.unaffiliated,
        subsidiaries: plant.subsidiaries,
        p_in,
        seed,
        ..Default::default()
    }
}

fn synth_error(e: SynthError) -> CliError {
    match e {
        SynthError::Pipeline { source, .. } => pipeline_error(source),
        other => CliError::Config(other.to_string()),
    }
}

fn generate_cmd(cmd: GenerateCmd) -> Result<(), CliError> {
    let file = file_config(&cmd.common)?;
    let analysis = crate::args::AnalysisArgs {
        seed: cmd.seed,
        ..Default::default()
    };
    let cfg = RunConfig::resolve(&file, None, Some(&analysis), None, cmd.common.threads)?;
    let mut manifest = RunManifest::new("generate", &cfg);
    let spec = plant_spec(&cmd.plant, cmd.p_in, cfg.seed);
    let (records, memberships) = manifest
        .time("generate", || generate(&spec))
        .map_err(synth_error)?;
    let io = |e: IngestError| CliError::Output(e.to_string());
    let mut subs = Vec::new();
    write_subsidiaries(&records, &mut subs).map_err(io)?;
    let mut members = Vec::new();
    write_memberships(&memberships, &mut members).map_err(io)?;
    let mut areas = Vec::new();
    write_macroareas(&MacroAreaMap::seeded(), &mut areas).map_err(io)?;
    manifest.note("p_in", spec.p_in);
    manifest.note("groups", spec.groups);
    manifest.note("investors_per_group", spec.investors_per_group);
    manifest.note("unaffiliated_investors", spec.unaffiliated_investors);
    manifest.note("subsidiaries", spec.subsidiaries);
    finish(
        &mut manifest,
        &cmd.common.out,
        vec![
            ("subsidiaries.csv", subs),
            ("memberships.csv", members),
            ("macroareas.csv", areas),
        ],
    )
}

fn power(cmd: PowerCmd) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        &file_config(&cmd.common)?,
        None,
        Some(&cmd.analysis),
        None,
        cmd.common.threads,
    )?;
    let mut manifest = RunManifest::new("power", &cfg);
    let spec = plant_spec(&cmd.plant, PlantSpec::default().p_in, cfg.seed);
    let pipeline = cfg.pipeline();
    let rows = manifest
        .time("power", || {
            with_threads(cfg.threads, || {
                power_curve(&spec, &cmd.p_in, cmd.replicas, &pipeline)
            })
        })?
        .map_err(synth_error)?;
    let mut t = Table::new(["p_in", "replicas", "rejections", "rejection_rate"]);
    for r in &rows {
        t.row([
            r.p_in.to_string(),
            r.replicas.to_string(),
            r.rejections.to_string(),
            format!("{:.4}", r.rejection_rate()),
        ]);
        println!(
            "p_in = {:.4}: rejection rate {:.3}",
            r.p_in,
            r.rejection_rate()
        );
    }
    finish(
        &mut manifest,
        &cmd.common.out,
        vec![("power.csv", t.into_bytes())],
    )
}
