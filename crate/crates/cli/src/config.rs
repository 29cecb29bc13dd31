//! Experiment configuration (TOML).
//!
//! ```toml
//! runs_per_combination = 100
//! base_seed = 7
//! learners = ["gaussian_nb", "knn_classifier"]
//!
//! [efold]
//! e_max = 10
//!
//! [[datasets]]
//! source = "bundled"
//! name = "iris"
//!
//! [[datasets]]
//! source = "manifest"
//! path = "students.toml"
//!
//! [[datasets]]
//! source = "synthetic"
//! name = "blobs"
//! spec = { kind = "gaussian_blobs", classes = 3, per_class = 60, dims = 4, spread = 2.0, seed = 1 }
//! ```
//!
//! Combinations are numbered datasets-major in config order: combination
//! `c = dataset_index * learners.len() + learner_index`. Run `r` of
//! combination `c` uses seed `derive_seed(base_seed, &[c, r])`.

use std::path::{Path, PathBuf};

use efold::ingestion::{bundled, generate, load_csv};
use efold::rng::derive_seed;
use efold::{CiOptions, Dataset64, DatasetManifest, EfoldConfig, LearnerKind, LearnerSpec, RunMode, SyntheticSpec};
use serde::{Deserialize, Serialize};

pub const OUTPUT_DIR_ENV: &str = "EFOLD_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetEntry {
    Bundled { name: String },
    /// A manifest file; its CSV path is relative to the manifest.
    Manifest { path: PathBuf },
    /// A manifest written inline; its CSV path is relative to the config.
    Csv { manifest: DatasetManifest },
    Synthetic { name: Option<String>, spec: SyntheticSpec },
}

impl DatasetEntry {
    pub fn label(&self) -> String {
        match self {
            DatasetEntry::Bundled { name } => format!("bundled `{name}`"),
            DatasetEntry::Manifest { path } => format!("manifest {}", path.display()),
            DatasetEntry::Csv { manifest } => format!("csv `{}`", manifest.name),
            DatasetEntry::Synthetic { name, spec } => {
                format!("synthetic `{}`", name.as_deref().unwrap_or(spec.default_name()))
            }
        }
    }

    /// Loads the dataset; relative paths resolve against `base_dir`.
    pub fn load(&self, base_dir: &Path) -> efold::Result<Dataset64> {
        match self {
            DatasetEntry::Bundled { name } => bundled::load(name),
            DatasetEntry::Manifest { path } => {
                let m = DatasetManifest::from_file(&base_dir.join(path))?;
                load_csv(&m)
            }
            DatasetEntry::Csv { manifest } => {
                let mut m = manifest.clone();
                m.resolve_relative_to(base_dir);
                load_csv(&m)
            }
            DatasetEntry::Synthetic { name, spec } => {
                let d: Dataset64 = generate(spec)?;
                Ok(match name {
                    Some(n) => d.with_name(n.clone()),
                    None => d,
                })
            }
        }
    }
}

fn default_runs() -> usize {
    100
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("efold-output")
}

fn default_true() -> bool {
    true
}

fn default_level() -> f64 {
    0.95
}

fn default_mode() -> RunMode {
    RunMode::Simulate
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetEntry>,
    pub learners: Vec<LearnerKind>,
    #[serde(default = "default_runs")]
    pub runs_per_combination: usize,
    #[serde(default)]
    pub efold: EfoldConfig,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_mode")]
    pub mode: RunMode,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub ci_uses_standard_error: bool,
    #[serde(default = "default_level")]
    pub ci_level: f64,
    /// Directory that relative dataset paths resolve against; set on load.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A config problem tied to the field that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> FieldError {
    FieldError {
        field: field.into(),
        message: message.into(),
    }
}

/// Seed of run `run` in combination `combination`.
pub fn run_seed(base_seed: u64, combination: usize, run: usize) -> u64 {
    derive_seed(base_seed, &[combination as u64, run as u64])
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, FieldError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .and_then(|s| text.get(..s.start))
                .map(|before| format!("line {}", before.lines().count().max(1)))
                .unwrap_or_else(|| "config".into());
            field_error(field, e.message().trim())
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, FieldError> {
        let text = std::fs::read_to_string(path).map_err(|e| field_error(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn ci_options(&self) -> CiOptions {
        CiOptions {
            level: self.ci_level,
            standard_error: self.ci_uses_standard_error,
        }
    }

    /// Output directory after applying the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }

    pub fn combination_count(&self) -> usize {
        self.datasets.len() * self.learners.len()
    }

    /// Checks the fields that need no dataset loading.
    pub fn check_fields(&self) -> Vec<FieldError> {
        let mut out = Vec::new();
        if self.datasets.is_empty() {
            out.push(field_error("datasets", "at least one dataset is required"));
        }
        if self.learners.is_empty() {
            out.push(field_error("learners", "at least one learner is required"));
        }
        if self.runs_per_combination == 0 {
            out.push(field_error("runs_per_combination", "must be at least 1"));
        }
        if self.workers == 0 {
            out.push(field_error("workers", "must be at least 1"));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            out.push(field_error("ci_level", "must lie in (0, 1)"));
        }
        if let Err(e) = self.efold.validate() {
            out.push(field_error("efold", e.to_string()));
        }
        for (i, l) in self.learners.iter().enumerate() {
            if self.learners[..i].contains(l) {
                out.push(field_error(format!("learners[{i}]"), format!("`{l}` listed twice")));
            }
        }
        for (i, d) in self.datasets.iter().enumerate() {
            if let DatasetEntry::Synthetic { spec, .. } = d {
                if let Err(e) = spec.validate() {
                    out.push(field_error(format!("datasets[{i}]"), e.to_string()));
                }
            }
        }
        out
    }

    /// Loads every dataset and checks names, validity and learner
    /// compatibility. Returns the datasets in config order when clean.
    pub fn load_datasets(&self) -> Result<Vec<Dataset64>, Vec<FieldError>> {
        let mut out = Vec::new();
        let mut errors = Vec::new();
        for (i, entry) in self.datasets.iter().enumerate() {
            let field = format!("datasets[{i}] ({})", entry.label());
            let d = match entry.load(&self.base_dir) {
                Ok(d) => d,
                Err(e) => {
                    errors.push(field_error(field, e.to_string()));
                    continue;
                }
            };
            if let Err(vs) = efold::validate_dataset(&d, self.efold.e_max) {
                for v in vs {
                    errors.push(field_error(field.clone(), v.to_string()));
                }
            }
            if out.iter().any(|o: &Dataset64| o.name() == d.name()) {
                errors.push(field_error(field.clone(), format!("duplicate dataset name `{}`", d.name())));
            }
            for (j, l) in self.learners.iter().enumerate() {
                if !l.supports(d.task()) {
                    errors.push(field_error(
                        format!("learners[{j}]"),
                        format!("`{l}` cannot run on {} dataset `{}`", d.task(), d.name()),
                    ));
                }
            }
            out.push(d);
        }
        if errors.is_empty() {
            Ok(out)
        } else {
            Err(errors)
        }
    }

    pub fn learner_specs(&self) -> Vec<LearnerSpec> {
        self.learners.iter().map(|&k| LearnerSpec::new(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        learners = ["gaussian_nb"]
        [[datasets]]
        source = "bundled"
        name = "iris"
    "#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml_str(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(c.runs_per_combination, 100);
        assert_eq!(c.mode, RunMode::Simulate);
        assert!(c.ci_uses_standard_error);
        assert_eq!(c.efold, EfoldConfig::default());
        assert!(c.check_fields().is_empty());
        assert_eq!(c.load_datasets().unwrap().len(), 1);
    }

    #[test]
    fn unknown_field_is_named() {
        let err = ExperimentConfig::from_toml_str("learnerz = []", Path::new(".")).unwrap_err();
        assert!(err.message.contains("learnerz"), "{err}");
    }

    #[test]
    fn field_errors() {
        let text = format!("runs_per_combination = 0\nworkers = 0\n{MINIMAL}\n[efold]\ne_max = 3\n");
        let c = ExperimentConfig::from_toml_str(&text, Path::new(".")).unwrap();
        let fields: Vec<String> = c.check_fields().into_iter().map(|e| e.field).collect();
        assert_eq!(fields, ["runs_per_combination", "workers", "efold"]);
    }

    #[test]
    fn incompatible_pair_named() {
        let c = ExperimentConfig::from_toml_str(&MINIMAL.replace("gaussian_nb", "ridge"), Path::new(".")).unwrap();
        let errs = c.load_datasets().unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].to_string().contains("ridge"), "{}", errs[0]);
    }

    #[test]
    fn dangling_path_named() {
        let text = r#"
            learners = ["gaussian_nb"]
            [[datasets]]
            source = "manifest"
            path = "nope/students.toml"
        "#;
        let c = ExperimentConfig::from_toml_str(text, Path::new("/tmp")).unwrap();
        let errs = c.load_datasets().unwrap_err();
        assert!(errs[0].field.contains("nope/students.toml"), "{}", errs[0]);
    }

    #[test]
    fn seeds_depend_on_combination_and_run() {
        let a = run_seed(1, 0, 0);
        assert_ne!(a, run_seed(1, 0, 1));
        assert_ne!(a, run_seed(1, 1, 0));
        assert_ne!(a, run_seed(2, 0, 0));
        assert_eq!(a, run_seed(1, 0, 0));
    }

    #[test]
    fn learner_names_match_display() {
        let all: Vec<LearnerKind> = LearnerKind::CLASSIFIERS.into_iter().chain(LearnerKind::REGRESSORS).collect();
        let list: Vec<String> = all.iter().map(|k| format!("\"{k}\"")).collect();
        let text = format!("learners = [{}]\ndatasets = []", list.join(", "));
        let c = ExperimentConfig::from_toml_str(&text, Path::new(".")).unwrap();
        assert_eq!(c.learners, all);
    }

    #[test]
    fn synthetic_entry_renamed() {
        let text = r#"
            learners = ["ridge"]
            [[datasets]]
            source = "synthetic"
            name = "lin"
            spec = { kind = "linear_regression", n = 50, dims = 2, noise_std = 0.1, seed = 3 }
        "#;
        let c = ExperimentConfig::from_toml_str(text, Path::new(".")).unwrap();
        assert_eq!(c.load_datasets().unwrap()[0].name(), "lin");
    }
}
