//! Closed-world tabular models and their text file format.
//!
//! ```text
//! pragma-tabular v1
//! source:
//! A
//! B
//! target:
//! u
//! x
//! given A | :
//!   u 0.6
//!   x 0.4
//! given A | u:
//!   </s> 1
//! ```
//!
//! EOS is implicit in both vocabularies and takes the id after the last listed
//! word. Tokens missing from a block have probability zero. Blank lines and
//! lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::ConditionalSequenceModel;
use crate::dist::{LogDistribution, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::vocab::{Sentence, TokenId, Vocabulary, EOS_SURFACE};

pub const TABULAR_HEADER: &str = "pragma-tabular v1";

type TableKey = (Vec<TokenId>, Vec<TokenId>);

/// Exact finite model defined by explicit next-token tables.
#[derive(Debug, Clone)]
pub struct TabularModel {
    source: Vocabulary,
    target: Vocabulary,
    /// Dense probabilities over the target vocabulary, keyed by
    /// (source tokens, prefix tokens).
    tables: HashMap<TableKey, Vec<f64>>,
    order: Vec<TableKey>,
    tag: String,
}

impl ConditionalSequenceModel for TabularModel {
    fn source_vocab(&self) -> &Vocabulary {
        &self.source
    }

    fn target_vocab(&self) -> &Vocabulary {
        &self.target
    }

    fn identity_tag(&self) -> &str {
        &self.tag
    }

    fn next_token_dist(&self, source: &Sentence, prefix: &Sentence) -> Result<LogDistribution> {
        let key = (source.tokens().to_vec(), prefix.tokens().to_vec());
        let probs = self.tables.get(&key).ok_or_else(|| Error::MissingEntry {
            source_text: self.source.render(source).unwrap_or_default(),
            prefix: self.target.render(prefix).unwrap_or_default(),
        })?;
        LogDistribution::from_normalized(probs.iter().enumerate().map(|(i, p)| (TokenId(i as u32), p.ln())))
    }
}

impl TabularModel {
    pub fn builder<S: Into<String>, T: Into<String>>(
        source_words: impl IntoIterator<Item = S>,
        target_words: impl IntoIterator<Item = T>,
    ) -> Result<TabularModelBuilder> {
        Ok(TabularModelBuilder {
            source: Vocabulary::new(source_words)?,
            target: Vocabulary::new(target_words)?,
            tables: HashMap::new(),
            order: Vec::new(),
            tag: None,
        })
    }

    /// Number of (source, prefix) tables.
    pub fn table_count(&self) -> usize {
        self.order.len()
    }

    /// Source sentences that have a table at the empty prefix, in file order.
    pub fn sources(&self) -> Vec<Sentence> {
        self.order
            .iter()
            .filter(|(_, prefix)| prefix.is_empty())
            .map(|(source, _)| Sentence::complete(source.clone()))
            .collect()
    }

    /// Same tables under a different identity tag.
    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// Serializes to the tabular text format. Probabilities are written in
    /// shortest round-trip form so reloading is bit-exact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(TABULAR_HEADER);
        out.push('\n');
        out.push_str("source:\n");
        for w in self.source.words() {
            let _ = writeln!(out, "{w}");
        }
        out.push_str("target:\n");
        for w in self.target.words() {
            let _ = writeln!(out, "{w}");
        }
        for key in &self.order {
            let probs = &self.tables[key];
            let _ = writeln!(out, "given {} | {}:", join(&self.source, &key.0), join(&self.target, &key.1));
            for (i, p) in probs.iter().enumerate() {
                if *p > 0.0 {
                    let _ = writeln!(out, "  {} {}", self.target.surfaces()[i], p);
                }
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn join(vocab: &Vocabulary, ids: &[TokenId]) -> String {
    ids.iter().map(|&t| vocab.surfaces()[t.index()].as_str()).collect::<Vec<_>>().join(" ")
}

fn content_tag(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("tabular:{hex}")
}

pub struct TabularModelBuilder {
    source: Vocabulary,
    target: Vocabulary,
    tables: HashMap<TableKey, Vec<f64>>,
    order: Vec<TableKey>,
    tag: Option<String>,
}

impl TabularModelBuilder {
    /// Adds the table for `source | prefix`, both given as space-separated
    /// surface forms. Probabilities are validated in [`Self::build`].
    pub fn entry(mut self, source: &str, prefix: &str, probs: &[(&str, f64)]) -> Result<Self> {
        let src = ids(&self.source, source)?;
        let pre = ids(&self.target, prefix)?;
        let mut dense = vec![0.0; self.target.len()];
        for (surface, p) in probs {
            dense[self.target.id(surface)?.index()] += p;
        }
        self.insert((src, pre), dense, 0)?;
        Ok(self)
    }

    /// Adds a table from raw ids and dense probabilities.
    pub fn entry_ids(mut self, source: Vec<TokenId>, prefix: Vec<TokenId>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.target.len() {
            return Err(Error::InvalidConfig("table width differs from target vocabulary".into()));
        }
        for &t in &source {
            self.source.check(t)?;
        }
        for &t in &prefix {
            self.target.check(t)?;
        }
        self.insert((source, prefix), probs, 0)?;
        Ok(self)
    }

    pub fn tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    fn insert(&mut self, key: TableKey, probs: Vec<f64>, line: usize) -> Result<()> {
        if self.tables.contains_key(&key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate table for {} | {}", join(&self.source, &key.0), join(&self.target, &key.1)),
            });
        }
        self.order.push(key.clone());
        self.tables.insert(key, probs);
        Ok(())
    }

    pub fn build(self) -> Result<TabularModel> {
        for key in &self.order {
            let probs = &self.tables[key];
            let name = || format!("given {} | {}", join(&self.source, &key.0), join(&self.target, &key.1));
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Normalization { table: name(), sum: probs.iter().sum() });
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::Normalization { table: name(), sum });
            }
        }
        let mut model = TabularModel {
            source: self.source,
            target: self.target,
            tables: self.tables,
            order: self.order,
            tag: String::new(),
        };
        model.tag = match self.tag {
            Some(t) => t,
            None => content_tag(&model.to_text()),
        };
        Ok(model)
    }
}

fn ids(vocab: &Vocabulary, text: &str) -> Result<Vec<TokenId>> {
    text.split_whitespace()
        .map(|w| {
            let id = vocab.id(w)?;
            if id == vocab.eos() {
                Err(Error::InvalidSentence("EOS inside a table key".into()))
            } else {
                Ok(id)
            }
        })
        .collect()
}

enum Section {
    Header,
    Source,
    Target,
    Entries,
}

/// Parses the tabular text format. The identity tag is a hash of the
/// canonical serialization, so formatting differences do not change it.
pub fn parse_tabular(text: &str) -> Result<TabularModel> {
    let err = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
    let mut section = Section::Header;
    let mut source_words: Vec<String> = Vec::new();
    let mut target_words: Vec<String> = Vec::new();
    let mut builder: Option<TabularModelBuilder> = None;
    let mut current: Option<(TableKey, Vec<f64>, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match section {
            Section::Header => {
                if trimmed != TABULAR_HEADER {
                    return Err(err(lineno, &format!("expected header {TABULAR_HEADER:?}")));
                }
                section = Section::Source;
                continue;
            }
            Section::Source if trimmed == "source:" && source_words.is_empty() => continue,
            Section::Source if trimmed == "target:" => {
                section = Section::Target;
                continue;
            }
            Section::Source => {
                if trimmed.split_whitespace().count() != 1 || trimmed == EOS_SURFACE {
                    return Err(err(lineno, "vocabulary lines hold one surface form"));
                }
                source_words.push(trimmed.to_string());
                continue;
            }
            Section::Target if !trimmed.starts_with("given ") && trimmed != "given" => {
                if trimmed.split_whitespace().count() != 1 || trimmed == EOS_SURFACE {
                    return Err(err(lineno, "vocabulary lines hold one surface form"));
                }
                target_words.push(trimmed.to_string());
                continue;
            }
            Section::Target => {
                let b = TabularModel::builder(source_words.clone(), target_words.clone())
                    .map_err(|e| err(lineno, &e.to_string()))?;
                builder = Some(b);
                section = Section::Entries;
            }
            Section::Entries => {}
        }

        let b = builder.as_mut().expect("builder exists in entry section");
        if let Some(rest) = trimmed.strip_prefix("given") {
            if let Some((key, probs, at)) = current.take() {
                b.insert(key, probs, at)?;
            }
            let body = rest.strip_suffix(':').ok_or_else(|| err(lineno, "block header must end with ':'"))?;
            let (src, pre) =
                body.split_once('|').ok_or_else(|| err(lineno, "block header needs '<source> | <prefix>'"))?;
            let src = ids(&b.source, src).map_err(|e| err(lineno, &e.to_string()))?;
            if src.is_empty() {
                return Err(err(lineno, "empty source sentence"));
            }
            let pre = ids(&b.target, pre).map_err(|e| err(lineno, &e.to_string()))?;
            current = Some(((src, pre), vec![0.0; b.target.len()], lineno));
        } else {
            if !line.starts_with(char::is_whitespace) {
                return Err(err(lineno, "probability lines must be indented"));
            }
            let (_, probs, _) = current.as_mut().ok_or_else(|| err(lineno, "probability line outside a block"))?;
            let mut parts = trimmed.split_whitespace();
            let (Some(tok), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(lineno, "expected '<token> <probability>'"));
            };
            let id = b.target.id(tok).map_err(|e| err(lineno, &e.to_string()))?;
            let p: f64 = p.parse().map_err(|_| err(lineno, &format!("bad probability {p:?}")))?;
            if !p.is_finite() {
                return Err(err(lineno, &format!("bad probability {p}")));
            }
            if probs[id.index()] != 0.0 {
                return Err(err(lineno, &format!("token {tok:?} listed twice")));
            }
            probs[id.index()] = p;
        }
    }

    let mut b = match (section, builder) {
        (Section::Entries, Some(b)) => b,
        (Section::Header, _) => return Err(err(text.lines().count().max(1), "missing header")),
        _ => return Err(err(text.lines().count().max(1), "no entry blocks")),
    };
    if let Some((key, probs, at)) = current.take() {
        b.insert(key, probs, at)?;
    }
    b.build()
}

pub fn load_tabular(path: impl AsRef<Path>) -> Result<TabularModel> {
    let text = std::fs::read_to_string(path)?;
    parse_tabular(&text)
}
