use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use paramine::crawler::CrawlBudget;
use paramine::filter::TrainConfig;
use paramine::sentalign::AlignParams;
use paramine::BeadKind;
use serde::Deserialize;

use crate::error::CliError;

pub const CONFIG_ENV: &str = "PARAMINE_CONFIG";

/// Pipeline configuration. Relative paths resolve against the config file's directory.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub work_dir: PathBuf,
    /// Seeds every random choice in the run.
    pub seed: u64,
    pub inputs: Inputs,
    pub langid: LangIdSection,
    pub rank: RankSection,
    pub crawl: CrawlSection,
    pub ingest: IngestSection,
    pub extract: ExtractSection,
    pub docalign: DocAlignSection,
    pub align: AlignSection,
    pub filter: FilterSection,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Inputs {
    /// Crawl-like archives used to rank candidate domains.
    pub rank_archives: Vec<PathBuf>,
    pub lexicon: PathBuf,
    /// Trusted parallel pairs (corpus TSV): filter positives and language-ID samples.
    pub seed_corpus: PathBuf,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LangIdSection {
    pub ngram_order: usize,
    pub other_threshold: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RankSection {
    pub top_k: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CrawlSection {
    /// Serve sites from `root/<host>/<path>` instead of the network.
    pub site_root: Option<PathBuf>,
    pub user_agent: String,
    pub max_duration_secs: f64,
    pub max_pages: Option<usize>,
    pub politeness_delay_secs: f64,
    pub max_depth: usize,
    pub timeout_secs: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IngestSection {
    pub min_domain_bytes: u64,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractSection {
    /// Replaces the built-in English abbreviation list when set.
    pub abbreviations: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DocAlignSection {
    pub min_score: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AlignSection {
    /// Keyed by bead shape: "1:1", "1:0", "0:1", "2:1", "1:2", "2:2".
    pub bead_priors: BTreeMap<String, f64>,
    pub length_ratio: Option<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub length_var: f64,
    pub lex_weight: f64,
    pub skip_penalty: f64,
    pub min_align_score: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FilterSection {
    pub threshold: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            work_dir: PathBuf::from("work"),
            seed: 0,
            inputs: Inputs::default(),
            langid: LangIdSection::default(),
            rank: RankSection::default(),
            crawl: CrawlSection::default(),
            ingest: IngestSection::default(),
            extract: ExtractSection::default(),
            docalign: DocAlignSection::default(),
            align: AlignSection::default(),
            filter: FilterSection::default(),
        }
    }
}

impl Default for LangIdSection {
    fn default() -> Self {
        LangIdSection {
            ngram_order: paramine::langstat::DEFAULT_NGRAM_ORDER,
            other_threshold: paramine::langstat::DEFAULT_OTHER_THRESHOLD,
        }
    }
}

impl Default for RankSection {
    fn default() -> Self {
        RankSection { top_k: 100_000 }
    }
}

impl Default for CrawlSection {
    fn default() -> Self {
        let budget = CrawlBudget::default();
        CrawlSection {
            site_root: None,
            user_agent: paramine::crawler::DEFAULT_USER_AGENT.to_owned(),
            max_duration_secs: budget.max_duration.as_secs_f64(),
            max_pages: budget.max_pages,
            politeness_delay_secs: budget.politeness_delay.as_secs_f64(),
            max_depth: budget.max_depth,
            timeout_secs: paramine::crawler::DEFAULT_TIMEOUT.as_secs_f64(),
        }
    }
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection { min_domain_bytes: paramine::ingest::DEFAULT_MIN_DOMAIN_BYTES }
    }
}

impl Default for DocAlignSection {
    fn default() -> Self {
        DocAlignSection { min_score: paramine::docalign::DEFAULT_MIN_DOC_SCORE }
    }
}

impl Default for AlignSection {
    fn default() -> Self {
        let p = AlignParams::default();
        AlignSection {
            bead_priors: p.bead_priors.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            length_ratio: p.length_ratio,
            ratio_min: p.ratio_bounds.0,
            ratio_max: p.ratio_bounds.1,
            length_var: p.length_var,
            lex_weight: p.lex_weight,
            skip_penalty: p.skip_penalty,
            min_align_score: paramine::sentalign::DEFAULT_MIN_ALIGN_SCORE,
        }
    }
}

impl Default for FilterSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        FilterSection {
            threshold: paramine::filter::DEFAULT_FILTER_THRESHOLD,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            l2: t.l2,
        }
    }
}

fn seconds(key: &str, v: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(v).map_err(|_| CliError::Invalid(format!("{key} must be a non-negative number of seconds")))
}

impl Config {
    /// Parses `text`, applies `key.path=value` overrides, and resolves
    /// relative paths against `base_dir`.
    pub fn from_toml(text: &str, overrides: &[String], base_dir: &Path) -> Result<Config, CliError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Invalid(format!("config: {}", e.message())))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let mut config: Config = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Invalid(format!("config: {}", e.message())))?;
        config.resolve_paths(base_dir);
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::MissingInput(path.to_owned()),
            _ => CliError::Io { path: path.to_owned(), source: e },
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Config::from_toml(&text, overrides, &base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.work_dir);
        fix(&mut self.inputs.lexicon);
        fix(&mut self.inputs.seed_corpus);
        self.inputs.rank_archives.iter_mut().for_each(fix);
        if let Some(root) = self.crawl.site_root.as_mut() {
            fix(root);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.align_params()?.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        self.crawl_budget()?.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        if self.rank.top_k == 0 {
            return Err(CliError::Invalid("rank.top_k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.filter.threshold) {
            return Err(CliError::Invalid("filter.threshold must lie in [0, 1]".into()));
        }
        if self.langid.ngram_order == 0 {
            return Err(CliError::Invalid("langid.ngram_order must be positive".into()));
        }
        Ok(())
    }

    pub fn align_params(&self) -> Result<AlignParams, CliError> {
        // Kinds left out of the table keep their default prior.
        let mut priors = AlignParams::default().bead_priors;
        for (key, p) in &self.align.bead_priors {
            let kind = parse_bead_kind(key)
                .ok_or_else(|| CliError::Invalid(format!("align.bead_priors: unknown bead {key:?}")))?;
            priors.insert(kind, *p);
        }
        Ok(AlignParams {
            bead_priors: priors,
            length_ratio: self.align.length_ratio,
            ratio_bounds: (self.align.ratio_min, self.align.ratio_max),
            length_var: self.align.length_var,
            lex_weight: self.align.lex_weight,
            skip_penalty: self.align.skip_penalty,
        })
    }

    pub fn crawl_budget(&self) -> Result<CrawlBudget, CliError> {
        Ok(CrawlBudget {
            max_duration: seconds("crawl.max_duration_secs", self.crawl.max_duration_secs)?,
            max_pages: self.crawl.max_pages,
            politeness_delay: seconds("crawl.politeness_delay_secs", self.crawl.politeness_delay_secs)?,
            max_depth: self.crawl.max_depth,
        })
    }

    pub fn crawl_timeout(&self) -> Result<Duration, CliError> {
        seconds("crawl.timeout_secs", self.crawl.timeout_secs)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            epochs: self.filter.epochs,
            learning_rate: self.filter.learning_rate,
            l2: self.filter.l2,
        }
    }
}

fn parse_bead_kind(key: &str) -> Option<BeadKind> {
    let (a, b) = key.split_once(':')?;
    BeadKind::from_shape(a.trim().parse().ok()?, b.trim().parse().ok()?)
}

/// `a.b.c=value`; the value is read as a TOML literal, falling back to a bare string.
fn apply_override(table: &mut toml::Table, ov: &str) -> Result<(), CliError> {
    let (key, raw) = ov
        .split_once('=')
        .ok_or_else(|| CliError::Invalid(format!("override {ov:?} is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()));
    // Bead kinds contain ':' and need quoting as keys: align.bead_priors."2:2"=0
    let parts = split_key(key.trim());
    let (last, parents) = parts
        .split_last()
        .ok_or_else(|| CliError::Invalid(format!("override {ov:?} has an empty key")))?;
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Invalid(format!("override {ov:?}: {p} is not a section")))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

fn split_key(key: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in key.chars() {
        match c {
            '"' => quoted = !quoted,
            '.' if !quoted => parts.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}
