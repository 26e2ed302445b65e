//! End-to-end experiment harness.
//!
//! Every run follows the same per-seed pipeline:
//! generate -> stratified split -> fit scaler on train -> scale both ->
//! resample the scaled train -> train -> score the test partition.
//! Seeds (and seed x cost-ratio pairs) are independent and may run in
//! parallel; all files are written afterwards by the calling thread.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::classify::{train_svm, CostMatrix, SvmHyperparams, SvmModel};
use crate::config::KeyValues;
use crate::dataio::{apply_scaler, fit_scaler, stratified_split, Dataset, Label};
use crate::error::{Error, Result};
use crate::evaluate::{confusion, mean_roc, roc, spearman, total_cost, ConfusionMatrix, RocCurve};
use crate::par::{try_map_indexed, Execution};
use crate::plot::{emit_svg, Series};
use crate::resample::{random_oversample, smote_with, ResampleConfig, SmoteMode};
use crate::simulate::{default_scenario, generate_dataset_with, SimConfig};

/// FPR grid size used for averaged ROC curves.
pub const MEAN_ROC_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Fig3,
    Fig4,
    Fig5,
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig3" => Ok(ExperimentId::Fig3),
            "fig4" => Ok(ExperimentId::Fig4),
            "fig5" => Ok(ExperimentId::Fig5),
            _ => Err(format!("unknown experiment `{s}` (expected fig3|fig4|fig5)")),
        }
    }
}

impl std::fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Fig5 => "fig5",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub seeds: Vec<u64>,
    pub cost_ratios: Vec<f64>,
    /// Simulator settings; its `seed` is replaced per run.
    pub scenario: SimConfig,
    pub test_fraction: f64,
    /// Base SVM settings; the cost matrix is set per method.
    pub svm: SvmHyperparams,
    /// Resampling settings; the seed is derived per run.
    pub resample: ResampleConfig,
    pub out_dir: PathBuf,
    pub exec: Execution,
}

pub fn default_seeds() -> Vec<u64> {
    (1..=10).collect()
}

pub fn default_cost_ratios(id: ExperimentId) -> Vec<f64> {
    match id {
        ExperimentId::Fig3 => vec![1.0],
        ExperimentId::Fig4 => (1..=30).map(f64::from).collect(),
        ExperimentId::Fig5 => vec![1.0, 5.0, 10.0, 20.0, 30.0],
    }
}

impl ExperimentSpec {
    pub fn new(id: ExperimentId, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            id,
            seeds: default_seeds(),
            cost_ratios: default_cost_ratios(id),
            scenario: default_scenario(),
            test_fraction: 0.2,
            svm: SvmHyperparams::default(),
            resample: ResampleConfig::default(),
            out_dir: out_dir.into(),
            exec: Execution::default(),
        }
    }

    /// Apply `experiment.*`, `svm.*`, `resample.*`, `smote.*` and simulator
    /// keys. Unknown keys are an error.
    pub fn apply_key_values(&mut self, mut kv: KeyValues) -> Result<()> {
        self.scenario.apply_key_values(&mut kv)?;
        if let Some(v) = kv.take_list("experiment.seeds")? {
            self.seeds = v;
        }
        if let Some(v) = kv.take_list("experiment.cost_ratios")? {
            self.cost_ratios = v;
        }
        if let Some(v) = kv.take("experiment.test_fraction")? {
            self.test_fraction = v;
        }
        if let Some(v) = kv.take("svm.c")? {
            self.svm.c = v;
        }
        if let Some(v) = kv.take("svm.tolerance")? {
            self.svm.tolerance = v;
        }
        if let Some(v) = kv.take("svm.max_iterations")? {
            self.svm.max_iterations = v;
        }
        if let Some(v) = kv.take("resample.ratio")? {
            self.resample.target_ratio = v;
        }
        if let Some(v) = kv.take("smote.k")? {
            self.resample.k = v;
        }
        if let Some(v) = kv.take::<SmoteMode>("smote.mode")? {
            self.resample.mode = v;
        }
        kv.finish()
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("at least one seed is required".into()));
        }
        if self.cost_ratios.is_empty() || self.cost_ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidConfig("cost ratios must be a non-empty list of positive values".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::InvalidConfig("duplicate seeds".into()));
        }
        self.scenario.validate()?;
        self.resample.validate()?;
        SvmHyperparams { cost: CostMatrix::default(), ..self.svm }.validate()
    }

    fn hyperparams(&self, cost: CostMatrix) -> SvmHyperparams {
        SvmHyperparams { cost, ..self.svm }
    }

    fn manifest(&self, files: &[String]) -> String {
        let mut out = String::new();
        writeln!(out, "# cellmend {} experiment manifest", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "experiment.id = {}", self.id).unwrap();
        writeln!(out, "experiment.seeds = {}", join(&self.seeds)).unwrap();
        writeln!(out, "experiment.cost_ratios = {}", join(&self.cost_ratios)).unwrap();
        writeln!(out, "experiment.test_fraction = {:?}", self.test_fraction).unwrap();
        writeln!(out, "experiment.pipeline = generate,split,scale(train fit),resample(train),train,score(test)").unwrap();
        writeln!(out, "svm.c = {:?}", self.svm.c).unwrap();
        writeln!(out, "svm.tolerance = {:?}", self.svm.tolerance).unwrap();
        writeln!(out, "svm.max_iterations = {}", self.svm.max_iterations).unwrap();
        writeln!(out, "resample.ratio = {:?}", self.resample.target_ratio).unwrap();
        writeln!(out, "smote.k = {}", self.resample.k).unwrap();
        writeln!(out, "smote.mode = {}", self.resample.mode).unwrap();
        let mut scenario = self.scenario.clone();
        scenario.seed = 0;
        for line in scenario.to_key_values().lines().filter(|l| !l.starts_with("sim.seed")) {
            writeln!(out, "{line}").unwrap();
        }
        for f in files {
            writeln!(out, "output.file = {f}").unwrap();
        }
        out
    }
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Independent sub-seed for one pipeline stage of one run.
pub fn derive_seed(seed: u64, stage: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed
        .wrapping_add(stage.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STAGE_SIM: u64 = 0;
const STAGE_SPLIT: u64 = 1;
const STAGE_RESAMPLE: u64 = 2;

/// Scaled train/test partitions of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub seed: u64,
    pub train: Dataset,
    pub test: Dataset,
}

pub fn prepare(spec: &ExperimentSpec, seed: u64) -> Result<Prepared> {
    let sim = SimConfig { seed: derive_seed(seed, STAGE_SIM), ..spec.scenario.clone() };
    let data = generate_dataset_with(&sim, Execution::Sequential)?;
    let (train, test) = stratified_split(&data, spec.test_fraction, derive_seed(seed, STAGE_SPLIT))?;
    let scaler = fit_scaler(&train)?;
    Ok(Prepared { seed, train: apply_scaler(&scaler, &train), test: apply_scaler(&scaler, &test) })
}

fn resample_config(spec: &ExperimentSpec, seed: u64) -> ResampleConfig {
    ResampleConfig { seed: derive_seed(seed, STAGE_RESAMPLE), ..spec.resample }
}

fn smote_train(spec: &ExperimentSpec, p: &Prepared) -> Result<Dataset> {
    Ok(smote_with(&p.train, &resample_config(spec, p.seed), Execution::Sequential)?.dataset)
}

fn evaluate_at_zero(model: &SvmModel, test: &Dataset) -> ConfusionMatrix {
    let truth = test.labels();
    let predicted: Vec<Label> = test.samples.iter().map(|s| model.predict(s, 0.0)).collect();
    confusion(&truth, &predicted).expect("test partition is non-empty")
}

fn test_roc(model: &SvmModel, test: &Dataset) -> Result<RocCurve> {
    roc(&test.labels(), &model.scores(test))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Collects output files so the manifest can list them.
struct Writer {
    root: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn new(root: &Path) -> Result<Self> {
        ensure_dir(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    fn text(&mut self, rel: &str, text: &str) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            ensure_dir(parent)?;
        }
        write(&path, text)?;
        self.files.push(rel.to_string());
        Ok(())
    }

    fn svg(&mut self, rel: &str, series: &[Series], title: &str, x: &str, y: &str) -> Result<()> {
        emit_svg(series, title, x, y, &self.root.join(rel))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    fn finish(mut self, spec: &ExperimentSpec) -> Result<()> {
        self.files.sort();
        write(&self.root.join("manifest.txt"), &spec.manifest(&self.files))
    }
}

// ---------------------------------------------------------------- fig3

/// Classifiers compared on imbalanced data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig3Method {
    Svm,
    OversampleSvm,
    SmoteSvm,
}

impl Fig3Method {
    pub const ALL: [Fig3Method; 3] = [Fig3Method::Svm, Fig3Method::OversampleSvm, Fig3Method::SmoteSvm];

    pub fn name(self) -> &'static str {
        match self {
            Fig3Method::Svm => "svm",
            Fig3Method::OversampleSvm => "oversample_svm",
            Fig3Method::SmoteSvm => "smote_svm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Result {
    pub seeds: Vec<u64>,
    /// `curves[s][m]` for seed index `s`, method in [`Fig3Method::ALL`] order.
    pub curves: Vec<[RocCurve; 3]>,
}

impl Fig3Result {
    pub fn auc(&self, seed_idx: usize, method: Fig3Method) -> f64 {
        self.curves[seed_idx][method as usize].auc
    }

    pub fn mean_auc(&self, method: Fig3Method) -> f64 {
        self.curves.iter().map(|c| c[method as usize].auc).sum::<f64>() / self.curves.len() as f64
    }
}

pub fn compute_fig3(spec: &ExperimentSpec) -> Result<Fig3Result> {
    spec.validate()?;
    let hp = spec.hyperparams(CostMatrix::default());
    let curves = try_map_indexed(spec.exec, spec.seeds.len(), |k| {
        let p = prepare(spec, spec.seeds[k])?;
        let over = random_oversample(&p.train, &resample_config(spec, p.seed))?;
        let smoted = smote_train(spec, &p)?;
        let plain = test_roc(&train_svm(&p.train, &hp)?, &p.test)?;
        let over = test_roc(&train_svm(&over, &hp)?, &p.test)?;
        let smote = test_roc(&train_svm(&smoted, &hp)?, &p.test)?;
        Ok::<_, Error>([plain, over, smote])
    })?;
    Ok(Fig3Result { seeds: spec.seeds.clone(), curves })
}

/// Per-seed ROC files, an AUC table, an SVG of the mean ROC per method and
/// the manifest.
pub fn run_fig3(spec: &ExperimentSpec) -> Result<Fig3Result> {
    let result = compute_fig3(spec)?;
    let mut w = Writer::new(&spec.out_dir)?;
    let mut table = String::from("seed,svm,oversample_svm,smote_svm\n");
    for (seed, curves) in result.seeds.iter().zip(&result.curves) {
        for m in Fig3Method::ALL {
            w.text(&format!("roc/seed{seed}_{}.csv", m.name()), &curves[m as usize].to_csv())?;
        }
        writeln!(table, "{seed},{},{},{}", curves[0].auc, curves[1].auc, curves[2].auc).unwrap();
    }
    writeln!(
        table,
        "mean,{},{},{}",
        result.mean_auc(Fig3Method::Svm),
        result.mean_auc(Fig3Method::OversampleSvm),
        result.mean_auc(Fig3Method::SmoteSvm)
    )
    .unwrap();
    w.text("auc.csv", &table)?;
    let series: Vec<Series> = Fig3Method::ALL
        .iter()
        .map(|&m| {
            let curves: Vec<RocCurve> = result.curves.iter().map(|c| c[m as usize].clone()).collect();
            Series::new(
                format!("{} (AUC {:.4})", m.name(), result.mean_auc(m)),
                mean_roc(&curves, MEAN_ROC_GRID),
            )
        })
        .collect();
    w.svg("fig3.svg", &series, "Mean ROC of fault detection methods", "false positive rate", "true positive rate")?;
    w.finish(spec)?;
    Ok(result)
}

// ---------------------------------------------------------------- fig4

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig4Method {
    Svm,
    CsSvm,
    SmoteCsSvm,
}

impl Fig4Method {
    pub const ALL: [Fig4Method; 3] = [Fig4Method::Svm, Fig4Method::CsSvm, Fig4Method::SmoteCsSvm];

    pub fn name(self) -> &'static str {
        match self {
            Fig4Method::Svm => "svm",
            Fig4Method::CsSvm => "cs_svm",
            Fig4Method::SmoteCsSvm => "smote_cs_svm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostRow {
    pub seed: u64,
    pub ratio: f64,
    pub method: Fig4Method,
    pub confusion: ConfusionMatrix,
    pub total_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Result {
    pub seeds: Vec<u64>,
    pub ratios: Vec<f64>,
    /// Seed-major, then ratio, then method in [`Fig4Method::ALL`] order.
    pub rows: Vec<CostRow>,
}

impl Fig4Result {
    pub fn row(&self, seed_idx: usize, ratio_idx: usize, method: Fig4Method) -> &CostRow {
        &self.rows[(seed_idx * self.ratios.len() + ratio_idx) * 3 + method as usize]
    }

    pub fn mean_cost(&self, ratio_idx: usize, method: Fig4Method) -> f64 {
        (0..self.seeds.len()).map(|s| self.row(s, ratio_idx, method).total_cost).sum::<f64>()
            / self.seeds.len() as f64
    }

    pub fn ratio_index(&self, ratio: f64) -> Option<usize> {
        self.ratios.iter().position(|&r| r == ratio)
    }
}

pub fn compute_fig4(spec: &ExperimentSpec) -> Result<Fig4Result> {
    spec.validate()?;
    struct SeedData {
        prepared: Prepared,
        smoted: Dataset,
        plain: ConfusionMatrix,
    }
    let per_seed = try_map_indexed(spec.exec, spec.seeds.len(), |k| {
        let prepared = prepare(spec, spec.seeds[k])?;
        let smoted = smote_train(spec, &prepared)?;
        // cost-independent: trained once and reused for every ratio
        let plain = train_svm(&prepared.train, &spec.hyperparams(CostMatrix::default()))?;
        let plain = evaluate_at_zero(&plain, &prepared.test);
        Ok::<_, Error>(SeedData { prepared, smoted, plain })
    })?;
    let n_r = spec.cost_ratios.len();
    let cells = try_map_indexed(spec.exec, spec.seeds.len() * n_r, |cell| {
        let (s, r) = (cell / n_r, cell % n_r);
        let data = &per_seed[s];
        let cost = CostMatrix::with_ratio(spec.cost_ratios[r]);
        let hp = spec.hyperparams(cost);
        let cs = evaluate_at_zero(&train_svm(&data.prepared.train, &hp)?, &data.prepared.test);
        let smote_cs = evaluate_at_zero(&train_svm(&data.smoted, &hp)?, &data.prepared.test);
        let seed = spec.seeds[s];
        let ratio = spec.cost_ratios[r];
        Ok::<_, Error>([
            (Fig4Method::Svm, data.plain),
            (Fig4Method::CsSvm, cs),
            (Fig4Method::SmoteCsSvm, smote_cs),
        ]
        .map(|(method, cm)| CostRow { seed, ratio, method, confusion: cm, total_cost: total_cost(&cm, &cost) }))
    })?;
    Ok(Fig4Result {
        seeds: spec.seeds.clone(),
        ratios: spec.cost_ratios.clone(),
        rows: cells.into_iter().flatten().collect(),
    })
}

/// Cost table (seed, ratio, method), an SVG of mean total cost against the
/// cost ratio, and the manifest.
pub fn run_fig4(spec: &ExperimentSpec) -> Result<Fig4Result> {
    let result = compute_fig4(spec)?;
    let mut w = Writer::new(&spec.out_dir)?;
    let mut table = String::from("seed,ratio,method,total_cost,tp,fp,tn,fn\n");
    for r in &result.rows {
        let cm = &r.confusion;
        writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.ratio,
            r.method.name(),
            r.total_cost,
            cm.tp,
            cm.fp,
            cm.tn,
            cm.fn_
        )
        .unwrap();
    }
    w.text("costs.csv", &table)?;
    let mut mean = String::from("ratio,svm,cs_svm,smote_cs_svm\n");
    for (i, ratio) in result.ratios.iter().enumerate() {
        writeln!(
            mean,
            "{ratio},{},{},{}",
            result.mean_cost(i, Fig4Method::Svm),
            result.mean_cost(i, Fig4Method::CsSvm),
            result.mean_cost(i, Fig4Method::SmoteCsSvm)
        )
        .unwrap();
    }
    w.text("mean_costs.csv", &mean)?;
    if result.ratios.len() >= 2 {
        let series: Vec<Series> = Fig4Method::ALL
            .iter()
            .map(|&m| {
                Series::new(
                    m.name(),
                    result.ratios.iter().enumerate().map(|(i, &r)| (r, result.mean_cost(i, m))).collect(),
                )
            })
            .collect();
        w.svg("fig4.svg", &series, "Mean total misclassification cost", "cost ratio C01/C10", "total cost")?;
    }
    w.finish(spec)?;
    Ok(result)
}

// ---------------------------------------------------------------- fig5

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5Result {
    pub seeds: Vec<u64>,
    pub ratios: Vec<f64>,
    /// `curves[s][r]`.
    pub curves: Vec<Vec<RocCurve>>,
    /// Fault recall at threshold 0, `recall[s][r]`.
    pub recall: Vec<Vec<f64>>,
}

impl Fig5Result {
    /// Spearman correlation of recall with cost ratio for one seed.
    pub fn recall_rank_correlation(&self, seed_idx: usize) -> Option<f64> {
        spearman(&self.ratios, &self.recall[seed_idx])
    }
}

pub fn compute_fig5(spec: &ExperimentSpec) -> Result<Fig5Result> {
    spec.validate()?;
    let prepared = try_map_indexed(spec.exec, spec.seeds.len(), |k| prepare(spec, spec.seeds[k]))?;
    let n_r = spec.cost_ratios.len();
    let cells = try_map_indexed(spec.exec, spec.seeds.len() * n_r, |cell| {
        let p = &prepared[cell / n_r];
        let cost = CostMatrix::with_ratio(spec.cost_ratios[cell % n_r]);
        let model = train_svm(&p.train, &spec.hyperparams(cost))?;
        let recall = evaluate_at_zero(&model, &p.test).tpr().value;
        Ok::<_, Error>((test_roc(&model, &p.test)?, recall))
    })?;
    let mut curves = Vec::new();
    let mut recall = Vec::new();
    for chunk in cells.chunks(n_r) {
        curves.push(chunk.iter().map(|c| c.0.clone()).collect());
        recall.push(chunk.iter().map(|c| c.1).collect());
    }
    Ok(Fig5Result { seeds: spec.seeds.clone(), ratios: spec.cost_ratios.clone(), curves, recall })
}

/// One ROC file per (seed, ratio), a recall table, an SVG of the mean ROC per
/// ratio, and the manifest.
pub fn run_fig5(spec: &ExperimentSpec) -> Result<Fig5Result> {
    let result = compute_fig5(spec)?;
    let mut w = Writer::new(&spec.out_dir)?;
    let mut table = String::from("seed,ratio,recall_at_0,auc\n");
    for (s, seed) in result.seeds.iter().enumerate() {
        for (r, ratio) in result.ratios.iter().enumerate() {
            let c = &result.curves[s][r];
            w.text(&format!("roc/seed{seed}_ratio{ratio}.csv"), &c.to_csv())?;
            writeln!(table, "{seed},{ratio},{},{}", result.recall[s][r], c.auc).unwrap();
        }
    }
    w.text("recall.csv", &table)?;
    let series: Vec<Series> = result
        .ratios
        .iter()
        .enumerate()
        .map(|(r, ratio)| {
            let curves: Vec<RocCurve> = result.curves.iter().map(|c| c[r].clone()).collect();
            Series::new(format!("cost ratio {ratio}"), mean_roc(&curves, MEAN_ROC_GRID))
        })
        .collect();
    w.svg("fig5.svg", &series, "Mean ROC of CS-SVM under cost ratios", "false positive rate", "true positive rate")?;
    w.finish(spec)?;
    Ok(result)
}

/// Run the experiment named by `spec.id`, writing into `spec.out_dir`.
pub fn run(spec: &ExperimentSpec) -> Result<()> {
    match spec.id {
        ExperimentId::Fig3 => run_fig3(spec).map(drop),
        ExperimentId::Fig4 => run_fig4(spec).map(drop),
        ExperimentId::Fig5 => run_fig5(spec).map(drop),
    }
}

/// Parse `a..b` (inclusive) or a comma-separated list.
pub fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad seed range start: {e}"))?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("bad seed range end: {e}"))?;
        if a > b {
            return Err(format!("empty seed range {a}..{b}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse::<u64>().map_err(|e| format!("bad seed `{v}`: {e}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seeds("1..10").unwrap(), (1..=10).collect::<Vec<_>>());
        assert_eq!(parse_seeds("3,1,2").unwrap(), vec![3, 1, 2]);
        assert!(parse_seeds("5..1").is_err());
        assert!(parse_seeds("a").is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(7, 2), derive_seed(7, 2));
    }

    #[test]
    fn spec_validation() {
        let mut s = ExperimentSpec::new(ExperimentId::Fig4, "/tmp/x");
        assert_eq!(s.cost_ratios.len(), 30);
        s.validate().unwrap();
        s.seeds.clear();
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::new(ExperimentId::Fig5, "/tmp/x");
        s.cost_ratios.push(-1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn prepare_keeps_test_identical_across_methods() {
        let spec = ExperimentSpec::new(ExperimentId::Fig3, "/tmp/x");
        let a = prepare(&spec, 4).unwrap();
        let b = prepare(&spec, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.test.len(), 696);
        assert_eq!(a.train.len(), 2784);
    }
}
