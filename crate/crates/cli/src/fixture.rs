//! `gen-fixture`: the synthetic two-domain site set plus a config that runs it offline.

use std::path::Path;

use paramine::synth::{self, SynthConfig};

use crate::error::CliError;

pub const CONFIG_FILE: &str = "config.toml";

/// Compressed archive floor for the fixture. The bilingual sites land well
/// above it and the one-page site well below.
pub const FIXTURE_MIN_DOMAIN_BYTES: u64 = 8192;

pub fn fixture_config(seed: u64) -> String {
    format!(
        r#"# Offline run over the synthetic fixture. Paths are relative to this file.
work_dir = "work"
seed = {seed}

[inputs]
rank_archives = ["{cc}"]
lexicon = "{lexicon}"
seed_corpus = "{seed_corpus}"

[langid]
ngram_order = 3
other_threshold = 0.5

[rank]
top_k = 3

[crawl]
site_root = "{sites}"
max_duration_secs = 600.0
politeness_delay_secs = 0.001
max_depth = 10
timeout_secs = 30.0

[ingest]
min_domain_bytes = {min_bytes}

[docalign]
min_score = 0.3

[align]
length_var = 6.8
lex_weight = 3.0
skip_penalty = 2.0
ratio_min = 0.3
ratio_max = 3.0
min_align_score = 0.1

[align.bead_priors]
"1:1" = 0.89
"1:0" = 0.00495
"0:1" = 0.00495
"2:1" = 0.0445
"1:2" = 0.0445
"2:2" = 0.011

[filter]
threshold = 0.5
epochs = 200
learning_rate = 0.1
l2 = 0.0001
"#,
        cc = synth::CC_ARCHIVE,
        lexicon = synth::LEXICON_FILE,
        seed_corpus = synth::SEED_CORPUS_FILE,
        sites = synth::SITES_DIR,
        min_bytes = FIXTURE_MIN_DOMAIN_BYTES,
    )
}

/// Writes the fixture files and `config.toml` under `root`.
pub fn write_fixture(root: &Path, seed: u64) -> Result<(), CliError> {
    let fixture = synth::generate(&SynthConfig { seed, ..SynthConfig::default() })
        .map_err(|e| CliError::Io { path: root.to_owned(), source: e })?;
    fixture.write_to(root).map_err(|e| CliError::Io { path: root.to_owned(), source: e })?;
    let path = root.join(CONFIG_FILE);
    std::fs::write(&path, fixture_config(seed)).map_err(|e| CliError::Io { path, source: e })
}
