use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use esdgait::experiment::{
    build_report, featurize_batch, load_manifest, read_features, score_detection, synthesize, train_and_evaluate,
    write_dataset, write_features, write_report, ExperimentConfig, FeatureMeta, FeatureTable,
};
use esdgait::forest::{accuracy, cohens_kappa, cross_validate, load_model, save_model, Dataset};
use esdgait::io::{parse_samples, read_to_string, write_json};
use esdgait::legshake::{Detector, DetectorConfig};
use esdgait::Error;
use log::info;

use crate::{Cli, Command};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate => simulate(cli),
        Command::Featurize { manifest } => featurize(cli, manifest.as_deref()),
        Command::Train { features } => train(cli, features.as_deref()),
        Command::Eval { features, model } => eval(cli, features.as_deref(), model.as_deref()),
        Command::Report { features, no_sweep } => report(cli, features.as_deref(), !no_sweep),
        Command::Detect { input, manifest, chunk } => detect(cli, input.as_deref(), manifest.as_deref(), *chunk),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("this command needs --config".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn or_out(cli: &Cli, given: Option<&Path>, name: &str) -> PathBuf {
    given.map_or_else(|| cli.out.join(name), Path::to_path_buf)
}

fn simulate(cli: &Cli) -> Result<()> {
    let config = load_config(cli)?;
    let records = synthesize(&config)?;
    let manifest = write_dataset(&cli.out, &records)?;
    println!("wrote {} records to {}", records.len(), manifest.display());
    Ok(())
}

fn featurize(cli: &Cli, manifest: Option<&Path>) -> Result<()> {
    let config = load_config(cli)?;
    let manifest = or_out(cli, manifest, "dataset.json");
    let records = load_manifest(&manifest)?;
    let (table, meta) = featurize_batch(records, &config)?;
    let files = write_features(&cli.out, &table, &meta)?;
    println!(
        "wrote {} rows x {} features to {} ({} rejected)",
        table.rows.len(),
        table.feature_names.len(),
        files.csv.display(),
        meta.rejects.len()
    );
    Ok(())
}

fn load_dataset(cli: &Cli, config: &ExperimentConfig, features: Option<&Path>) -> Result<(Dataset, FeatureMeta)> {
    let path = or_out(cli, features, "features.csv");
    let (table, meta): (FeatureTable, FeatureMeta) = read_features(&path)?;
    if meta.task != config.task {
        return Err(Error::Config(format!(
            "{} was built for task {:?} but the config says {:?}",
            path.display(),
            meta.task,
            config.task
        ))
        .into());
    }
    if meta.mfcc_fingerprint != config.mfcc.fingerprint() {
        return Err(Error::ModelMismatch(format!(
            "{} was built with a different MFCC config than {}",
            path.display(),
            cli.config.as_deref().unwrap_or(Path::new("the config")).display()
        ))
        .into());
    }
    let data = table.to_dataset()?;
    info!(
        "{}: {} rows, {} features, classes {:?}",
        path.display(),
        data.n_samples(),
        data.n_features(),
        data.class_names
    );
    Ok((data, meta))
}

fn train(cli: &Cli, features: Option<&Path>) -> Result<()> {
    let config = load_config(cli)?;
    let (data, meta) = load_dataset(cli, &config, features)?;
    let outcome = train_and_evaluate(&data, &config)?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    if let Some(search) = &outcome.search {
        write_json(&cli.out.join("search.json"), search)?;
    }
    if let Some(holdout) = &outcome.holdout {
        write_json(&cli.out.join("holdout.json"), holdout)?;
    }
    write_json(&cli.out.join("eval.json"), &outcome.report)?;
    save_model(&cli.out.join("model.rfj"), &outcome.model, Some(&meta.mfcc_fingerprint))?;
    print_summary(&outcome.report);
    Ok(())
}

fn print_summary(report: &esdgait::forest::EvalReport) {
    println!(
        "{}-fold CV on {} samples: accuracy {:.4}, kappa {:.4}, auroc {:.4}",
        report.k_folds, report.n_samples, report.accuracy, report.cohens_kappa, report.auroc
    );
}

fn eval(cli: &Cli, features: Option<&Path>, model: Option<&Path>) -> Result<()> {
    let config = load_config(cli)?;
    let (data, meta) = load_dataset(cli, &config, features)?;
    let report = cross_validate(&data, &config.forest_params(), config.evaluation.k_folds, config.seed)?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    write_json(&cli.out.join("eval.json"), &report)?;
    print_summary(&report);
    if let Some(path) = model {
        let (model, _) = load_model(path, Some(&meta.mfcc_fingerprint))?;
        if model.feature_names != data.feature_names || model.class_names != data.class_names {
            return Err(Error::ModelMismatch("model features or classes differ from the feature file".into()).into());
        }
        let pred = data.rows().map(|r| model.predict(r)).collect::<esdgait::Result<Vec<_>>>()?;
        println!(
            "saved model on these rows: accuracy {:.4}, kappa {:.4}",
            accuracy(&pred, data.labels())?,
            cohens_kappa(&pred, data.labels())?
        );
    }
    Ok(())
}

fn report(cli: &Cli, features: Option<&Path>, sweep: bool) -> Result<()> {
    let config = load_config(cli)?;
    let (data, _) = load_dataset(cli, &config, features)?;
    if data.n_classes() < 2 {
        return Err(Error::Validation("report needs at least 2 classes".into()).into());
    }
    let bundle = build_report(&data, &config, sweep)?;
    write_report(&cli.out, &bundle)?;
    print_summary(&bundle.eval);
    if let Some(rows) = &bundle.accuracy_vs_k {
        for r in rows {
            println!("k={} forest {:.4} baseline {:.4}", r.k, r.forest_accuracy, r.baseline_accuracy);
        }
    }
    Ok(())
}

fn detector_config(cli: &Cli) -> Result<DetectorConfig> {
    match &cli.config {
        Some(_) => Ok(load_config(cli)?.detector),
        None => Ok(DetectorConfig::default()),
    }
}

fn detect(cli: &Cli, input: Option<&Path>, manifest: Option<&Path>, chunk: usize) -> Result<()> {
    if chunk == 0 {
        return Err(Error::Validation("--chunk must be >= 1".into()).into());
    }
    let config = detector_config(cli)?;
    if let Some(manifest) = manifest {
        let tolerance = match &cli.config {
            Some(_) => load_config(cli)?.legshake.onset_tolerance,
            None => 0.25,
        };
        let records: Vec<_> = load_manifest(manifest)?.into_iter().map(|(_, r)| r).collect();
        let score = score_detection(&records, &config, tolerance)?;
        std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
        write_json(&cli.out.join("detection.json"), &score)?;
        println!(
            "{} shake / {} other records: precision {:.3}, recall {:.3}, f1 {:.3}, {} events on other records",
            score.shake_records, score.other_records, score.precision, score.recall, score.f1, score.events_on_other_records
        );
        return Ok(());
    }

    let mut detector = Detector::new(&config)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut count = 0usize;
    let mut emit = |updates: Vec<esdgait::legshake::DetectorUpdate>, out: &mut BufWriter<_>| -> Result<()> {
        for u in updates {
            if matches!(u, esdgait::legshake::DetectorUpdate::Open(_)) {
                count += 1;
            }
            writeln!(out, "{}", u.to_json_line())?;
            out.flush()?;
        }
        Ok(())
    };
    match input.filter(|p| p.as_os_str() != "-") {
        Some(path) => {
            let samples = parse_samples(&read_to_string(path)?, path)?;
            for c in samples.chunks(chunk) {
                emit(detector.push(c)?, &mut out)?;
            }
        }
        None => {
            let origin = Path::new("<stdin>");
            let mut buf = Vec::with_capacity(chunk);
            for (i, line) in std::io::stdin().lock().lines().enumerate() {
                let line = line.context("reading standard input")?;
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let v: f64 = line
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::format(origin, format!("line {}: not a finite number: {line:?}", i + 1)))?;
                buf.push(v);
                if buf.len() == chunk {
                    emit(detector.push(&buf)?, &mut out)?;
                    buf.clear();
                }
            }
            emit(detector.push(&buf)?, &mut out)?;
        }
    }
    drop(out);
    if !cli.quiet {
        eprintln!("{count} event(s) detected");
    }
    Ok(())
}
