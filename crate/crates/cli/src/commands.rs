use std::path::{Path, PathBuf};

use specmap_core::dataset::{
    self, read_dataset, read_predictions, sniff, write_dataset, write_predictions, FileKind,
};
use specmap_core::pipeline::{evaluate, generate_dataset, reconstruct_dataset, rows_to_csv, Method};
use specmap_core::render::render_layer;
use specmap_core::{Error, ExperimentConfig, FrequencyMode, MaskPolicy, Result};

use crate::args::{CubeArg, EvalArgs, GenerateArgs, MaskArg, MethodArg, ReconstructArgs, RenderArgs};

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::from_file(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn print_manifest(subcommand: &str, entries: &[(&str, String)]) {
    println!("# run manifest");
    println!("subcommand = {subcommand}");
    for (key, value) in entries {
        println!("{key} = {value}");
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if args.broadband {
        config.scene.frequency_mode = FrequencyMode::Broadband;
    }
    config.validate()?;
    if !(args.density > 0.0 && args.density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "--density must be in (0, 1], got {}",
            args.density
        )));
    }
    let mut manifest = vec![
        ("scenes", args.scenes.to_string()),
        ("density", args.density.to_string()),
        ("master_seed", args.seed.to_string()),
        ("config", args.config.as_deref().map_or("(defaults)".into(), display)),
        ("out", display(&args.out)),
    ];
    manifest.extend(config.to_pairs());
    print_manifest("generate", &manifest);

    let records = generate_dataset(&config, args.seed, args.scenes, args.density)?;
    let written = write_dataset(&records, &args.out)?;
    println!("records_written = {written}");
    Ok(())
}

pub fn reconstruct(args: ReconstructArgs) -> Result<()> {
    let config = load_config(args.config.as_deref())?;
    let side_meters = args.side_meters.unwrap_or(config.scene.side_meters);
    let method = match args.method {
        MethodArg::Idw => Method::Idw { power: args.power },
        MethodArg::Knn => Method::Knn { k: args.k },
        MethodArg::Kriging => Method::Kriging { neighborhood: args.neighbors },
    };
    let mut manifest = vec![
        ("method", method.name().to_string()),
        ("in", display(&args.input)),
        ("out", display(&args.out)),
        ("side_meters", side_meters.to_string()),
    ];
    match method {
        Method::Idw { power } => manifest.push(("power", power.to_string())),
        Method::Knn { k } => manifest.push(("k", k.to_string())),
        Method::Kriging { neighborhood } => {
            manifest.push(("neighbors", neighborhood.to_string()));
            manifest.push(("variogram", "exponential".into()));
        }
    }
    print_manifest("reconstruct", &manifest);

    let records = read_dataset(&args.input)?;
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidArgument("dataset holds no records".into()))?;
    let (n, layers) = (first.side(), first.layer_count());
    let results = reconstruct_dataset(&records, side_meters, method)?;
    let fallback: usize = results.iter().map(|(_, notes)| notes.fallback_variograms).sum();
    let degenerate: usize = results.iter().map(|(_, notes)| notes.degenerate_variograms).sum();
    let jittered: usize = results.iter().map(|(_, notes)| notes.jittered_cells).sum();
    let predictions: Vec<_> = results.into_iter().map(|(p, _)| p).collect();
    let written = write_predictions(&predictions, n, layers, &args.out)?;
    println!("records_written = {written}");
    if method.name() == "kriging" {
        println!("variogram_fallbacks = {fallback}");
        println!("variogram_degenerate = {degenerate}");
        println!("jittered_cells = {jittered}");
    }
    Ok(())
}

fn parse_prediction_arg(arg: &str) -> (String, PathBuf) {
    match arg.split_once('=') {
        Some((label, path)) if !label.is_empty() => (label.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(arg);
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| arg.to_string());
            (label, path)
        }
    }
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let mask = match args.mask {
        MaskArg::AllCells => MaskPolicy::AllCells,
        MaskArg::ExcludeBuildings => MaskPolicy::ExcludeBuildings,
    };
    let inputs: Vec<(String, PathBuf)> = args.predictions.iter().map(|p| parse_prediction_arg(p)).collect();
    let mut manifest = vec![
        ("truth", display(&args.truth)),
        ("csv", display(&args.csv)),
        ("mask", mask.as_str().to_string()),
    ];
    for (label, path) in &inputs {
        manifest.push(("pred", format!("{label}={}", display(path))));
    }
    print_manifest("eval", &manifest);

    let truth = read_dataset(&args.truth)?;
    let mut predictions = Vec::with_capacity(inputs.len());
    for (label, path) in inputs {
        if predictions.iter().any(|(l, _)| *l == label) {
            return Err(Error::InvalidArgument(format!("prediction label {label:?} given twice")));
        }
        predictions.push((label, read_predictions(&path)?));
    }
    let evaluation = evaluate(&truth, &predictions, mask)?;
    dataset::write_bytes_atomically(&args.csv, rows_to_csv(&evaluation.rows).as_bytes())?;
    for (density, method, report) in &evaluation.aggregates {
        println!(
            "aggregate density={density} method={method} scenes={} rmse_db={}",
            report.scene_count,
            report.overall_rmse()
        );
    }
    Ok(())
}

pub fn render(args: RenderArgs) -> Result<()> {
    print_manifest(
        "render",
        &[
            ("in", display(&args.input)),
            ("scene", args.scene.to_string()),
            ("freq_mhz", args.freq.to_string()),
            ("out", display(&args.out)),
            ("lo", args.lo.to_string()),
            ("hi", args.hi.to_string()),
        ],
    );
    let (frequencies, cube) = match sniff(&args.input)? {
        FileKind::Dataset => {
            let record = read_dataset(&args.input)?
                .into_iter()
                .find(|r| r.scene_id == args.scene)
                .ok_or_else(|| Error::InvalidArgument(format!("scene {} not in {}", args.scene, display(&args.input))))?;
            let cube = match args.cube {
                CubeArg::Truth => record.truth,
                CubeArg::Incomplete => record.incomplete,
            };
            (record.frequencies_mhz, cube)
        }
        FileKind::Predictions => {
            let record = read_predictions(&args.input)?
                .into_iter()
                .find(|r| r.scene_id == args.scene)
                .ok_or_else(|| Error::InvalidArgument(format!("scene {} not in {}", args.scene, display(&args.input))))?;
            if args.frequencies.len() != record.estimate.layer_count() {
                return Err(Error::InvalidArgument(format!(
                    "--frequencies lists {} values but the predictions have {} layers",
                    args.frequencies.len(),
                    record.estimate.layer_count()
                )));
            }
            (args.frequencies.clone(), record.estimate)
        }
    };
    // on-disk frequencies are f32
    let layer = frequencies
        .iter()
        .position(|&f| f as f32 == args.freq as f32)
        .ok_or_else(|| {
            let list: Vec<String> = frequencies.iter().map(|f| f.to_string()).collect();
            Error::InvalidArgument(format!(
                "frequency {} MHz not found; available: {}",
                args.freq,
                list.join(", ")
            ))
        })?;
    let bytes = render_layer(&cube.layer_map(layer), args.lo, args.hi)?;
    dataset::write_bytes_atomically(&args.out, &bytes)?;
    println!("bytes_written = {}", bytes.len());
    Ok(())
}
