use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use pathmine::grounding::DEFAULT_MAX_NGRAM;
use pathmine::tree::DEFAULT_MAX_CHILDREN;
use pathmine::{BuildConfig, ExtractorConfig, Grounder, Stopwords};
use serde::{Deserialize, Serialize};

/// Settings shared by all subcommands. Loaded from a JSON file; command-line
/// flags override individual fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub lang: String,
    pub max_ngram: usize,
    pub max_children_per_node: usize,
    pub max_total_paths: Option<usize>,
    pub seed: u64,
    /// One stopword per line. Defaults to the bundled English list for `en`
    /// and to no stopwords otherwise.
    pub stopword_path: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            lang: "en".into(),
            max_ngram: DEFAULT_MAX_NGRAM,
            max_children_per_node: DEFAULT_MAX_CHILDREN,
            max_total_paths: None,
            seed: 0,
            stopword_path: None,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let config: Config = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Config::from_json(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.lang.is_empty() || !self.lang.bytes().all(|b| b.is_ascii_lowercase() || b == b'-') {
            bail!("lang must be a lowercase language code, got {:?}", self.lang);
        }
        if self.max_ngram == 0 {
            bail!("max_ngram must be at least 1");
        }
        if self.max_children_per_node < 2 {
            bail!("max_children_per_node must be at least 2");
        }
        if self.max_total_paths == Some(0) {
            bail!("max_total_paths must be at least 1 when set");
        }
        Ok(())
    }

    pub fn extractor_config(&self) -> ExtractorConfig {
        ExtractorConfig {
            build: BuildConfig {
                max_children_per_node: self.max_children_per_node,
                max_ngram: self.max_ngram,
                rng_seed: self.seed,
            },
            max_total_paths: self.max_total_paths,
        }
    }

    pub fn grounder(&self) -> anyhow::Result<Grounder> {
        let stopwords = match &self.stopword_path {
            Some(path) => {
                Stopwords::from_path(path).with_context(|| format!("reading stopwords {}", path.display()))?
            }
            None if self.lang == "en" => Stopwords::english(),
            None => Stopwords::none(),
        };
        Ok(Grounder::new(stopwords, self.max_ngram)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let c = Config::from_json(r#"{"seed": 7, "max_total_paths": 4}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.max_total_paths, Some(4));
        assert_eq!(c.lang, "en");
        assert_eq!(c.max_children_per_node, DEFAULT_MAX_CHILDREN);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::from_json(r#"{"max_ngram": 0}"#).is_err());
        assert!(Config::from_json(r#"{"max_children_per_node": 1}"#).is_err());
        assert!(Config::from_json(r#"{"max_total_paths": 0}"#).is_err());
        assert!(Config::from_json(r#"{"lang": "EN"}"#).is_err());
        assert!(Config::from_json(r#"{"colour": "blue"}"#).is_err());
    }

    #[test]
    fn maps_onto_core_config() {
        let c = Config {
            seed: 3,
            max_children_per_node: 5,
            ..Config::default()
        };
        let e = c.extractor_config();
        assert_eq!(e.build.rng_seed, 3);
        assert_eq!(e.build.max_children_per_node, 5);
        assert_eq!(e.max_total_paths, None);
    }
}
