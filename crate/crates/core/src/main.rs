use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use thermal_odometry::dataset::{
    import_csv, load_dataset, save_dataset, split_folds, synth_dataset, DatasetSynthConfig,
    Environment, SampleSet, MANIFEST_FILE,
};
use thermal_odometry::eval::{
    ablate, read_results_csv, stats_from_results, write_results_csv, write_stats_csv,
    AblationConfig, AblationParam, BoxStats, DEGPS_PER_UNIT,
};
use thermal_odometry::io::write_atomic;
use thermal_odometry::model::{build_model, load_checkpoint, param_count, save_checkpoint, CnnConfig};
use thermal_odometry::train::{evaluate_mse, train, LossKind, TrainConfig};
use thermal_odometry::Rng;

/// Rotational odometry from 24x32 thermal camera frames.
///
/// Speeds are in deg/s. "norm" MSE values are in label units of speed/200;
/// "degps" values are (deg/s)^2.
#[derive(Debug, Parser)]
#[command(name = "thermod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset: 4 Laboratory, 4 DiningPlace, 4 Kitchen and 6 Garden acquisitions.
    Synth(SynthArgs),
    /// Import a CSV recording (768 pixel columns in °C, then the speed label in deg/s) into a dataset.
    Import(ImportArgs),
    /// Train one model and write a checkpoint plus a per-epoch history CSV.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset.
    Eval(EvalArgs),
    /// Run the 6-fold leave-one-Garden-acquisition-out protocol for each value of N_f or N_r.
    Ablate(AblateArgs),
    /// Compute box-plot statistics from a results CSV.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// Master seed for scenes and sensor noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frames per acquisition.
    #[arg(long, default_value_t = 600)]
    frames: usize,
    /// Horizontal field of view of the virtual camera, degrees.
    #[arg(long, default_value_t = 110.0)]
    fov: f64,
    /// Frame rate, frames per second.
    #[arg(long, default_value_t = 8.0)]
    fps: f64,
    /// Multiplier on each environment's sensor noise (°C std).
    #[arg(long, default_value_t = 1.0)]
    noise_scale: f64,
}

#[derive(Debug, Args)]
struct ImportArgs {
    /// CSV file, one frame per row, no header.
    #[arg(long)]
    csv: PathBuf,
    /// Environment tag: Laboratory, DiningPlace, Kitchen, Garden or Synthetic-<name>.
    #[arg(long)]
    env: Environment,
    /// Acquisition id (default: CSV file stem).
    #[arg(long)]
    id: Option<String>,
    /// Frame rate, frames per second.
    #[arg(long, default_value_t = 8.0)]
    fps: f32,
    /// Dataset directory to add the acquisition to (created if missing).
    #[arg(long, env = "THERMOD_DATA")]
    data: PathBuf,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Consecutive frames per sample (N_f).
    #[arg(long, default_value_t = 3)]
    nf: usize,
    /// Resolution subsampling factor (N_r): 1, 2 or 3.
    #[arg(long, default_value_t = 1)]
    nr: usize,
}

#[derive(Debug, Args)]
struct OptimArgs {
    /// Training epochs.
    #[arg(long, default_value_t = 40)]
    epochs: usize,
    /// Adam learning rate.
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    /// Mini-batch size.
    #[arg(long, default_value_t = 32)]
    batch: usize,
    /// Training loss.
    #[arg(long, value_enum, default_value_t = LossArg::Berhu)]
    loss: LossArg,
    /// Seed for weight initialization and shuffling (master seed for ablations).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LossArg {
    Berhu,
    Mse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UnitArg {
    /// Normalized label units (speed / 200).
    Norm,
    /// (deg/s)^2.
    Degps,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Dataset directory or manifest.
    #[arg(long, env = "THERMOD_DATA")]
    data: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    optim: OptimArgs,
    /// Hold out Garden acquisition K (0-5) as the test set; without it all data is used for training.
    #[arg(long)]
    fold: Option<usize>,
    /// Checkpoint output path.
    #[arg(long)]
    out: PathBuf,
    /// History CSV path (default: checkpoint path with extension .history.csv).
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Dataset directory or manifest.
    #[arg(long, env = "THERMOD_DATA")]
    data: PathBuf,
    /// Checkpoint to evaluate.
    #[arg(long)]
    model: PathBuf,
    /// Evaluate only on the held-out Garden acquisition of fold K (0-5).
    #[arg(long)]
    fold: Option<usize>,
    /// Per-acquisition CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AblateArgs {
    /// Parameter to sweep.
    #[arg(long)]
    param: AblationParam,
    /// Comma-separated values (default: nf 2..7, nr 1,2,3).
    #[arg(long, value_delimiter = ',')]
    values: Vec<usize>,
    /// Dataset directory or manifest.
    #[arg(long, env = "THERMOD_DATA")]
    data: PathBuf,
    /// N_f kept fixed while sweeping nr.
    #[arg(long, default_value_t = 3)]
    nf: usize,
    /// N_r kept fixed while sweeping nf.
    #[arg(long, default_value_t = 1)]
    nr: usize,
    #[command(flatten)]
    optim: OptimArgs,
    /// Concurrent fold runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Results CSV output (one row per value and fold).
    #[arg(long)]
    out: PathBuf,
    /// Box-stats CSV output.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Unit of the box stats.
    #[arg(long, value_enum, default_value_t = UnitArg::Norm)]
    unit: UnitArg,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Results CSV written by `ablate`.
    #[arg(long)]
    results: PathBuf,
    /// Box-stats CSV output.
    #[arg(long)]
    out: PathBuf,
    /// Unit of the box stats.
    #[arg(long, value_enum, default_value_t = UnitArg::Norm)]
    unit: UnitArg,
}

impl OptimArgs {
    fn config(&self) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            lr: self.lr,
            batch_size: self.batch,
            epochs: self.epochs,
            loss: match self.loss {
                LossArg::Berhu => LossKind::Berhu,
                LossArg::Mse => LossKind::Mse,
            },
            seed: self.seed,
            ..TrainConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load(path: &Path) -> Result<Vec<thermal_odometry::dataset::Acquisition>> {
    load_dataset(path).with_context(|| format!("loading dataset {}", path.display()))
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let cfg = DatasetSynthConfig {
        seed: a.seed,
        frames_per_acquisition: a.frames,
        fov_deg: a.fov,
        fps: a.fps,
        noise_scale: a.noise_scale,
    };
    let acqs = synth_dataset(&cfg)?;
    save_dataset(&a.out, &acqs)?;
    let frames: usize = acqs.iter().map(|x| x.len()).sum();
    println!(
        "wrote {} acquisitions, {} frames to {}",
        acqs.len(),
        frames,
        a.out.display()
    );
    Ok(())
}

fn cmd_import(a: ImportArgs) -> Result<()> {
    let id = match a.id {
        Some(id) => id,
        None => a
            .csv
            .file_stem()
            .and_then(|s| s.to_str())
            .context("cannot derive an id from the CSV file name; pass --id")?
            .to_string(),
    };
    let acq = import_csv(&a.csv, a.env, a.fps, &id)
        .with_context(|| format!("importing {}", a.csv.display()))?;
    let mut acqs = if a.data.join(MANIFEST_FILE).exists() {
        load(&a.data)?
    } else {
        Vec::new()
    };
    if acqs.iter().any(|x| x.id == acq.id) {
        bail!("dataset already contains an acquisition with id {:?}", acq.id);
    }
    println!(
        "imported {} ({}): {} frames, {} segments",
        acq.id,
        acq.env,
        acq.len(),
        acq.segments().len()
    );
    acqs.push(acq);
    save_dataset(&a.data, &acqs)?;
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let ccfg = CnnConfig::new(a.model.nf, a.model.nr)?;
    let tcfg = a.optim.config()?;
    let history_path = a
        .history
        .clone()
        .unwrap_or_else(|| a.out.with_extension("history.csv"));
    let acqs = load(&a.data)?;

    let (train_set, test_set) = match a.fold {
        Some(k) => {
            let splits = split_folds(&acqs)?;
            let split = splits
                .get(k)
                .with_context(|| format!("fold must be in 0..{}, got {k}", splits.len()))?;
            (
                SampleSet::from_acquisitions(split.train.iter().copied(), &ccfg)?,
                Some(SampleSet::from_acquisitions([split.test], &ccfg)?),
            )
        }
        None => (SampleSet::from_acquisitions(&acqs, &ccfg)?, None),
    };
    eprintln!(
        "training N_f={} N_r={} ({} parameters) on {} samples for {} epochs",
        ccfg.n_frames,
        ccfg.subsample,
        param_count(&ccfg),
        train_set.len(),
        tcfg.epochs
    );
    let init = build_model(ccfg, &mut Rng::new(tcfg.seed))?;
    let (params, history) = train(init, &train_set, test_set.as_ref(), &tcfg)?;
    save_checkpoint(&a.out, &params)?;
    history.save_csv(&history_path)?;
    if let Some(last) = history.last() {
        match last.test_mse_norm {
            Some(m) => println!(
                "final train loss {:.6}, test mse {:.6} norm, {:.3} (deg/s)^2",
                last.train_loss,
                m,
                m * DEGPS_PER_UNIT * DEGPS_PER_UNIT
            ),
            None => println!("final train loss {:.6}", last.train_loss),
        }
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let params = load_checkpoint(&a.model)
        .with_context(|| format!("loading checkpoint {}", a.model.display()))?;
    let acqs = load(&a.data)?;
    let targets: Vec<&thermal_odometry::dataset::Acquisition> = match a.fold {
        Some(k) => {
            let splits = split_folds(&acqs)?;
            vec![splits
                .get(k)
                .with_context(|| format!("fold must be in 0..{}, got {k}", splits.len()))?
                .test]
        }
        None => acqs.iter().collect(),
    };
    let mut csv = String::from("acquisition,env,n_samples,mse_norm,mse_degps,rmse_degps\n");
    let (mut sum, mut count) = (0.0, 0usize);
    for acq in targets {
        let set = SampleSet::from_acquisitions([acq], &params.cfg)?;
        if set.is_empty() {
            eprintln!("skipping {}: no windows", acq.id);
            continue;
        }
        let mse = evaluate_mse(&params, &set)?;
        let degps = mse * DEGPS_PER_UNIT * DEGPS_PER_UNIT;
        println!(
            "{:<16} {:<12} n={:<6} mse_norm={:.6} mse_degps={:.3} rmse_degps={:.3}",
            acq.id,
            acq.env.to_string(),
            set.len(),
            mse,
            degps,
            degps.sqrt()
        );
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            acq.id,
            acq.env,
            set.len(),
            mse,
            degps,
            degps.sqrt()
        ));
        sum += mse * set.len() as f64;
        count += set.len();
    }
    if count == 0 {
        bail!("no samples to evaluate");
    }
    let mse = sum / count as f64;
    println!(
        "overall n={count} mse_norm={mse:.6} mse_degps={:.3}",
        mse * DEGPS_PER_UNIT * DEGPS_PER_UNIT
    );
    if let Some(out) = a.out {
        write_atomic(&out, |w| Ok(w.write_all(csv.as_bytes())?))?;
    }
    Ok(())
}

fn print_stats_table(title: &str, rows: &[(usize, BoxStats)]) {
    println!("{title}");
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>4}",
        "value", "median", "q1", "q3", "whisk_lo", "whisk_hi", "out"
    );
    for (v, s) in rows {
        println!(
            "{:>6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>4}",
            v,
            s.median,
            s.q1,
            s.q3,
            s.whisker_lo,
            s.whisker_hi,
            s.outliers.len()
        );
    }
}

fn cmd_ablate(a: AblateArgs) -> Result<()> {
    let values = if a.values.is_empty() {
        a.param.default_values()
    } else {
        a.values.clone()
    };
    a.param.validate_values(&values)?;
    CnnConfig::new(a.nf, a.nr)?;
    let cfg = AblationConfig {
        fixed_nf: a.nf,
        fixed_nr: a.nr,
        train: a.optim.config()?,
        jobs: a.jobs.max(1),
    };
    let acqs = load(&a.data)?;
    split_folds(&acqs)?;
    let param = a.param;
    eprintln!(
        "ablating {param} over {:?}: {} runs of {} epochs",
        values,
        values.len() * 6,
        cfg.train.epochs
    );
    let points = ablate(param, &values, &acqs, &cfg, &|v, r| {
        eprintln!(
            "  {param}={v} fold {} mse_norm={:.6} rmse_degps={:.3}",
            r.fold, r.mse_norm, r.rmse_degps
        )
    })?;
    write_atomic(&a.out, |w| write_results_csv(w, &param.to_string(), &points))?;

    let rows: Vec<(usize, BoxStats)> = points
        .iter()
        .map(|p| {
            let s = match a.unit {
                UnitArg::Norm => p.stats.clone(),
                UnitArg::Degps => p.stats_degps(),
            };
            (p.value, s)
        })
        .collect();
    print_stats_table(
        &format!("{param} sweep, test MSE ({:?})", a.unit).to_lowercase(),
        &rows,
    );
    if let Some(path) = a.stats {
        write_atomic(&path, |w| write_stats_csv(w, rows.iter().map(|(v, s)| (*v, s))))?;
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let rows = read_results_csv(&a.results)?;
    if rows.is_empty() {
        bail!("{} has no result rows", a.results.display());
    }
    let stats = stats_from_results(&rows, matches!(a.unit, UnitArg::Degps))?;
    print_stats_table(&format!("test MSE ({:?})", a.unit).to_lowercase(), &stats);
    write_atomic(&a.out, |w| write_stats_csv(w, stats.iter().map(|(v, s)| (*v, s))))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Import(a) => cmd_import(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                e.exit();
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("thermod: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thermod: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
