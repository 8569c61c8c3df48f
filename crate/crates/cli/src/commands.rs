use std::path::Path;

use congrec::classifier::{format_evaluation_table, loo_evaluate, EvaluationReport};
use congrec::data::{
    aggregate_ema, builtin_correlation, generate_synthetic, join_cohort, Dataset, Taxonomy, UnknownItemPolicy,
    CORRELATION_FILE, EMA_FILE, PARTICIPANTS_FILE, TAXONOMY_FILE,
};
use congrec::model::{ActivityDistribution, PersonalityVector};
use congrec::recommender::format_range_table;
use congrec::validation::format_validation_table;
use congrec::{
    recommend, train_artifact, validate_cohort, FeatureSetKind, ModelArtifact, RangeReport, UserRecord,
    ValidationConfig,
};
use congrec_service::{AppState, ServiceConfig, ServiceState};
use serde::Serialize;

use crate::args::{
    Command, CommonArgs, EvaluateArgs, RecommendArgs, ServeArgs, SimulateArgs, TrainArgs, ValidateArgs,
};
use crate::config::{read_config, RunConfig};
use crate::error::CliError;
use crate::manifest::RunOutputs;

pub fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Train(args) => train(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Recommend(args) => recommend_cmd(args),
        Command::Validate(args) => validate(args),
        Command::Serve(args) => serve(args),
    }
}

fn base_config(common: &CommonArgs, outputs: Option<&mut RunOutputs>) -> anyhow::Result<RunConfig> {
    let Some(path) = &common.config else {
        return Ok(RunConfig::default());
    };
    if !path.exists() {
        return Err(CliError::new("config_not_found", format!("{} does not exist", path.display())).into());
    }
    let (config, bytes) = read_config(path)?;
    if let Some(out) = outputs {
        let name = path.file_name().map_or_else(|| "config".into(), |n| n.to_string_lossy().into_owned());
        out.record_input(name, &bytes);
    }
    Ok(config)
}

fn to_pretty_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

struct LoadedData {
    dataset: Dataset,
    cohort: Vec<UserRecord>,
}

fn load_data(dir: &Path, policy: UnknownItemPolicy, outputs: &mut RunOutputs) -> anyhow::Result<LoadedData> {
    for required in [PARTICIPANTS_FILE, EMA_FILE] {
        if !dir.join(required).exists() {
            return Err(CliError::new(
                "data_not_found",
                format!("{} has no {required}", dir.display()),
            )
            .into());
        }
    }
    let dataset = Dataset::load_dir(dir)?;
    for name in [PARTICIPANTS_FILE, EMA_FILE, TAXONOMY_FILE, CORRELATION_FILE] {
        outputs.record_input_file(&dir.join(name))?;
    }
    let agg = aggregate_ema(&dataset.events, &dataset.taxonomy, policy)?;
    if agg.total_skipped() > 0 {
        eprintln!("warning: skipped {} EMA reports with items outside the taxonomy", agg.total_skipped());
    }
    let cohort = join_cohort(&dataset.participants, &agg, dataset.taxonomy.len())?;
    Ok(LoadedData { dataset, cohort })
}

fn load_model(path: &Path, outputs: Option<&mut RunOutputs>) -> anyhow::Result<ModelArtifact> {
    if !path.exists() {
        return Err(CliError::new("model_not_found", format!("{} does not exist", path.display())).into());
    }
    if let Some(out) = outputs {
        out.record_input_file(path)?;
    }
    Ok(ModelArtifact::load(path)?)
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mut out = RunOutputs::create(&args.out)?;
    let mut cfg = base_config(&args.common, Some(&mut out))?;
    cfg.apply_common(&args.common);
    cfg.apply_statistic(args.statistic.as_deref())?;
    let syn = &mut cfg.synthetic;
    if let Some(n) = args.users {
        syn.cohort_size = n;
    }
    if let Some(d) = args.days {
        syn.days = d;
    }
    if let Some(p) = args.prompts_per_day {
        syn.prompts_per_day = p;
    }
    if let Some(a) = args.effect_strength {
        syn.effect_strength = a;
    }
    if let Some(s) = args.noise_sigma {
        syn.noise_sigma = s;
    }

    let taxonomy = Taxonomy::builtin();
    let correlation = builtin_correlation(&taxonomy)?;
    let pop = generate_synthetic(&cfg.synthetic, &correlation, &taxonomy)?;
    let dataset = Dataset {
        taxonomy,
        correlation,
        participants: pop.participants,
        events: pop.events,
    };
    dataset.write_dir(out.dir())?;
    for name in [TAXONOMY_FILE, CORRELATION_FILE, PARTICIPANTS_FILE, EMA_FILE] {
        out.mark_written(name);
    }
    println!(
        "simulated {} participants and {} EMA reports (seed {}) into {}",
        dataset.participants.len(),
        dataset.events.len(),
        cfg.seed,
        args.out.display()
    );
    out.finish("simulate", &cfg)
}

fn train(args: TrainArgs) -> anyhow::Result<()> {
    let mut out = RunOutputs::create(&args.out)?;
    let mut cfg = base_config(&args.common, Some(&mut out))?;
    cfg.apply_common(&args.common);
    cfg.apply_svm(&args.svm)?;
    cfg.apply_unknown_items(args.data.unknown_items.as_deref())?;
    let features = args.features.or(cfg.features.take()).unwrap_or_else(|| "congruence".into());
    let kind: FeatureSetKind = parse_feature(&features)?;
    cfg.features = Some(features);

    let data = load_data(&args.data.data, cfg.unknown_items, &mut out)?;
    let ds = &data.dataset;
    let artifact = train_artifact(&data.cohort, kind, &ds.taxonomy, &ds.correlation, &cfg.svm, cfg.median_anchor)?;
    out.write("model.json", artifact.to_json())?;
    println!(
        "trained {} model on {} users; model hash {}",
        kind.title(),
        data.cohort.len(),
        artifact.hash()
    );
    out.finish("train", &cfg)
}

fn parse_feature(name: &str) -> anyhow::Result<FeatureSetKind> {
    if name == "all" {
        return Err(CliError::usage("--features all is only valid for evaluate").into());
    }
    name.parse().map_err(|_| CliError::usage(format!("--features: unknown value {name:?}")).into())
}

#[derive(Serialize)]
struct EvaluationOutput<'a> {
    users: usize,
    threshold: f64,
    reports: &'a [EvaluationReport],
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let mut out = RunOutputs::create(&args.out)?;
    let mut cfg = base_config(&args.common, Some(&mut out))?;
    cfg.apply_common(&args.common);
    cfg.apply_svm(&args.svm)?;
    cfg.apply_unknown_items(args.data.unknown_items.as_deref())?;
    if let Some(c) = &args.classifier {
        cfg.classifier = c.parse().map_err(|_| CliError::usage(format!("--classifier: unknown value {c:?}")))?;
    }
    let features = args.features.or(cfg.features.take()).unwrap_or_else(|| "all".into());
    let kinds = if features == "all" {
        FeatureSetKind::ALL.to_vec()
    } else {
        vec![parse_feature(&features)?]
    };
    cfg.features = Some(features);

    let data = load_data(&args.data.data, cfg.unknown_items, &mut out)?;
    let eval = cfg.evaluation();
    let reports = kinds
        .iter()
        .map(|&kind| loo_evaluate(&data.cohort, kind, &data.dataset.correlation, &eval))
        .collect::<congrec::Result<Vec<_>>>()?;
    let output = EvaluationOutput {
        users: data.cohort.len(),
        threshold: reports[0].threshold,
        reports: &reports,
    };
    let table = format_evaluation_table(&reports);
    out.write("evaluation.json", to_pretty_json(&output)?)?;
    out.write("evaluation.txt", &table)?;
    print!("{table}");
    out.finish("evaluate", &cfg)
}

#[derive(Serialize)]
struct UserRanges {
    user_id: String,
    report: RangeReport,
}

fn recommend_cmd(args: RecommendArgs) -> anyhow::Result<()> {
    let mut out = RunOutputs::create(&args.out)?;
    let mut cfg = base_config(&args.common, Some(&mut out))?;
    cfg.apply_common(&args.common);
    cfg.apply_recommender(&args.recommender);
    cfg.apply_unknown_items(args.unknown_items.as_deref())?;

    let artifact = load_model(&args.model, Some(&mut out))?;
    artifact.require_congruence()?;
    let (taxonomy, correlation, cohort) = match &args.data {
        Some(dir) => {
            let data = load_data(dir, cfg.unknown_items, &mut out)?;
            (data.dataset.taxonomy, data.dataset.correlation, data.cohort)
        }
        None if args.personality.is_some() && args.users.is_empty() => {
            let taxonomy = Taxonomy::builtin();
            let correlation = builtin_correlation(&taxonomy)?;
            (taxonomy, correlation, Vec::new())
        }
        None => return Err(CliError::usage("--data is required unless only --personality is given").into()),
    };
    artifact.check_inputs(&taxonomy, &correlation)?;

    let mut targets: Vec<(String, PersonalityVector, Option<&ActivityDistribution>)> = Vec::new();
    if let Some(values) = &args.personality {
        let scores = values.as_slice().try_into().map_err(|_| {
            CliError::usage(format!("--personality needs 5 scores, got {}", values.len()))
        })?;
        let p = PersonalityVector(scores);
        p.validate_reported()?;
        targets.push(("adhoc".into(), p, None));
    }
    for id in &args.users {
        let user = cohort
            .iter()
            .find(|u| &u.user_id == id)
            .ok_or_else(|| congrec::Error::UnknownUser(id.clone()))?;
        targets.push((user.user_id.clone(), user.personality, Some(&user.activity)));
    }
    if targets.is_empty() {
        targets.extend(cohort.iter().map(|u| (u.user_id.clone(), u.personality, Some(&u.activity))));
    }

    let results = targets
        .into_iter()
        .map(|(user_id, p, activity)| {
            recommend(&artifact, &taxonomy, &correlation, &p, activity, &cfg.recommender, cfg.workers.max(1))
                .map(|report| UserRanges { user_id, report })
        })
        .collect::<congrec::Result<Vec<_>>>()?;

    let mut text = String::new();
    for r in &results {
        text.push_str(&format!("user {}\n{}\n", r.user_id, format_range_table(&r.report)));
    }
    out.write("recommendations.json", to_pretty_json(&results)?)?;
    out.write("recommendations.txt", &text)?;
    print!("{text}");
    out.finish("recommend", &cfg)
}

fn validate(args: ValidateArgs) -> anyhow::Result<()> {
    let mut out = RunOutputs::create(&args.out)?;
    let mut cfg = base_config(&args.common, Some(&mut out))?;
    cfg.apply_common(&args.common);
    cfg.apply_recommender(&args.recommender);
    cfg.apply_unknown_items(args.data.unknown_items.as_deref())?;
    if args.k.is_some() {
        cfg.k = args.k;
    }

    let artifact = load_model(&args.model, Some(&mut out))?;
    let data = load_data(&args.data.data, cfg.unknown_items, &mut out)?;
    artifact.check_inputs(&data.dataset.taxonomy, &data.dataset.correlation)?;
    let config = ValidationConfig {
        recommender: cfg.recommender,
        k: cfg.k,
        selection: None,
        workers: cfg.workers.max(1),
    };
    let report = validate_cohort(&data.cohort, &artifact, &data.dataset.correlation, &config)?;
    let table = format_validation_table(&report);
    out.write("validation.json", to_pretty_json(&report)?)?;
    out.write("validation.txt", &table)?;
    print!("{table}");
    out.finish("validate", &cfg)
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let mut cfg = base_config(&args.common, None)?;
    cfg.apply_common(&args.common);
    cfg.apply_recommender(&args.recommender);
    if let Some(cap) = args.grid_cap {
        cfg.grid_cap = cap;
    }
    if !args.cors_origins.is_empty() {
        cfg.cors_origins = args.cors_origins.clone();
    }
    if !args.model.exists() {
        return Err(CliError::new("model_not_found", format!("{} does not exist", args.model.display())).into());
    }
    let existing = |name: &str| args.data.as_ref().map(|d| d.join(name)).filter(|p| p.exists());
    let taxonomy = existing(TAXONOMY_FILE);
    let correlation = existing(CORRELATION_FILE);
    let service_config = ServiceConfig {
        recommender: cfg.recommender,
        grid_cap: cfg.grid_cap,
        workers: cfg.workers.max(1),
        cors_origins: cfg.cors_origins.clone(),
    };
    let addr: std::net::SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .map_err(|e| CliError::usage(format!("bad listen address: {e}")))?;

    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let app = AppState::empty();
        let server = tokio::spawn(congrec_service::serve(addr, app.clone(), service_config.cors_origins.clone()));
        eprintln!("listening on http://{addr}");
        let model = args.model.clone();
        let state = tokio::task::spawn_blocking(move || {
            ServiceState::load(&model, taxonomy.as_deref(), correlation.as_deref(), service_config)
        })
        .await??;
        eprintln!("loaded model {}", state.model_hash());
        app.install(state);
        server.await??;
        Ok(())
    })
}
