use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cellmend::classify::{train_svm, CostMatrix, Solver, SvmHyperparams, SvmModel};
use cellmend::config::KeyValues;
use cellmend::dataio::{apply_scaler, fit_scaler, load_csv, save_csv, stratified_split};
use cellmend::evaluate::{confusion, f_measure, g_mean, pr_curve, pr_to_csv, roc, total_cost};
use cellmend::experiments::{self, parse_seeds, ExperimentId, ExperimentSpec};
use cellmend::resample::{self, ResampleConfig, SmoteMode};
use cellmend::simulate::{default_scenario, generate_dataset};
use cellmend::{Error, Execution, Label, Result};

#[derive(Parser)]
#[command(name = "cellmend", version, about = "Cost-sensitive fault detection from imbalanced KPI data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone)]
struct Seeds(Vec<u64>);

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Over,
    Under,
    Combined,
    Smote,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled KPI dataset.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the effective simulator configuration here.
        #[arg(long)]
        config_out: Option<PathBuf>,
    },
    /// Stratified train/test split.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
    /// Rebalance a dataset.
    Resample {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value = "paper")]
        mode: SmoteMode,
        /// Combined method only: 0 = pure oversampling, 1 = pure undersampling.
        #[arg(long, default_value_t = 0.5)]
        midpoint: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Standardize and train a cost-sensitive linear SVM.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        c01: f64,
        #[arg(long, default_value_t = 1.0)]
        c10: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 10_000_000)]
        max_iter: usize,
        /// `interior_smo` (default) or `smo`.
        #[arg(long, default_value = "interior_smo")]
        solver: Solver,
        #[arg(long)]
        model_out: PathBuf,
    },
    /// Score a dataset with a trained model and write ROC/PR curves and metrics.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        threshold: f64,
        /// Cost of a missed fault; defaults to the model's c01.
        #[arg(long)]
        c01: Option<f64>,
        #[arg(long)]
        c10: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate one of the experiments.
    Experiment {
        #[arg(value_parser = |s: &str| s.parse::<ExperimentId>())]
        id: ExperimentId,
        /// Inclusive range `a..b` or a comma-separated list.
        #[arg(long, default_value = "1..10", value_parser = |s: &str| parse_seeds(s).map(Seeds))]
        seeds: Seeds,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Disable data parallelism.
        #[arg(long)]
        sequential: bool,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, seed, out, config_out } => {
            let mut sim = default_scenario();
            if let Some(path) = config {
                let mut kv = KeyValues::load(&path)?;
                sim.apply_key_values(&mut kv)?;
                kv.finish()?;
            }
            if let Some(seed) = seed {
                sim.seed = seed;
            }
            let data = generate_dataset(&sim)?;
            save_csv(&data, &out)?;
            if let Some(path) = config_out {
                std::fs::write(&path, sim.to_key_values()).map_err(|e| Error::Io { path, source: e })?;
            }
            eprintln!("wrote {} samples ({} fault) to {}", data.len(), data.count(Label::Fault), out.display());
        }
        Command::Split { input, test_fraction, seed, train_out, test_out } => {
            let data = load_csv(&input)?;
            let (train, test) = stratified_split(&data, test_fraction, seed)?;
            save_csv(&train, &train_out)?;
            save_csv(&test, &test_out)?;
        }
        Command::Resample { method, ratio, k, mode, midpoint, seed, input, out } => {
            let data = load_csv(&input)?;
            let cfg = ResampleConfig { target_ratio: ratio, k, mode, seed };
            let result = match method {
                Method::Over => resample::random_oversample(&data, &cfg)?,
                Method::Under => resample::random_undersample(&data, &cfg)?,
                Method::Combined => resample::combined_resample(&data, &cfg, midpoint)?,
                Method::Smote => resample::smote(&data, &cfg)?.dataset,
            };
            save_csv(&result, &out)?;
            eprintln!(
                "{} fault / {} fault-free -> {} / {}",
                data.count(Label::Fault),
                data.count(Label::FaultFree),
                result.count(Label::Fault),
                result.count(Label::FaultFree)
            );
        }
        Command::Train { input, c, c01, c10, tol, max_iter, solver, model_out } => {
            let data = load_csv(&input)?;
            let scaler = fit_scaler(&data)?;
            let hp = SvmHyperparams {
                c,
                tolerance: tol,
                max_iterations: max_iter,
                cost: CostMatrix::new(0.0, c01, c10, 0.0)?,
                solver,
            };
            let mut model = train_svm(&apply_scaler(&scaler, &data), &hp)?;
            model.scaler = Some(scaler);
            model.save(&model_out)?;
            eprintln!(
                "trained in {} iterations, KKT violation {:e}, duality gap {:e}",
                model.info.iterations, model.info.kkt_violation, model.info.duality_gap
            );
        }
        Command::Evaluate { model, input, threshold, c01, c10, out } => {
            let model = SvmModel::load(&model)?;
            let data = load_csv(&input)?;
            evaluate(&model, &data, threshold, c01, c10, &out)?;
        }
        Command::Experiment { id, seeds, out, config, sequential } => {
            let mut spec = ExperimentSpec::new(id, out);
            if let Some(path) = config {
                spec.apply_key_values(KeyValues::load(&path)?)?;
            }
            spec.seeds = seeds.0;
            if sequential {
                spec.exec = Execution::Sequential;
            }
            experiments::run(&spec)?;
            eprintln!("wrote {}", spec.out_dir.join("manifest.txt").display());
        }
    }
    Ok(())
}

fn evaluate(
    model: &SvmModel,
    data: &cellmend::Dataset,
    threshold: f64,
    c01: Option<f64>,
    c10: Option<f64>,
    out: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.to_path_buf(), source: e })?;
    let truth = data.labels();
    let scores: Vec<f64> = data.samples.iter().map(|s| model.score_raw(s)).collect();
    let predicted: Vec<Label> = scores.iter().map(|&s| cellmend::classify::label_at(s, threshold)).collect();
    let cm = confusion(&truth, &predicted)?;
    let mut cost = model.hyperparams.cost;
    if let Some(v) = c01 {
        cost.c01 = v;
    }
    if let Some(v) = c10 {
        cost.c10 = v;
    }
    cost.validate()?;
    let curve = roc(&truth, &scores)?;
    let pr = pr_curve(&truth, &scores)?;
    let write = |name: &str, text: String| {
        let path = out.join(name);
        std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
    };
    write("roc.csv", curve.to_csv())?;
    write("pr.csv", pr_to_csv(&pr))?;
    let f1 = f_measure(&cm, 1.0);
    let gm = g_mean(&cm)?;
    let summary = format!(
        "auc={}\ntotal_cost={}\nf1={}\ng_mean={}\nprecision={}\nrecall={}\ntp={}\nfp={}\ntn={}\nfn={}\nthreshold={}\n",
        curve.auc,
        total_cost(&cm, &cost),
        f1.value,
        gm,
        cm.precision().value,
        cm.tpr().value,
        cm.tp,
        cm.fp,
        cm.tn,
        cm.fn_,
        threshold
    );
    print!("{summary}");
    write("metrics.txt", summary)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
