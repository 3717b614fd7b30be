use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Surface form reserved for the end-of-sentence token.
pub const EOS_SURFACE: &str = "</s>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub surface: String,
}

/// Bijection between token ids and surface forms, always containing EOS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    surfaces: Vec<String>,
    index: HashMap<String, TokenId>,
    eos: TokenId,
}

impl Vocabulary {
    /// Builds a vocabulary from surface forms in id order and appends EOS as
    /// the final id.
    pub fn new<I, S>(surfaces: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list: Vec<String> = surfaces.into_iter().map(Into::into).collect();
        let eos = TokenId(list.len() as u32);
        list.push(EOS_SURFACE.to_string());
        Self::with_eos(list, eos)
    }

    /// Builds a vocabulary whose EOS token sits at an explicit id.
    pub fn with_eos(surfaces: Vec<String>, eos: TokenId) -> Result<Self> {
        if eos.index() >= surfaces.len() {
            return Err(Error::UnknownToken { id: eos.0, size: surfaces.len() });
        }
        let mut index = HashMap::with_capacity(surfaces.len());
        for (i, s) in surfaces.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidSentence(format!("invalid surface form {s:?}")));
            }
            if index.insert(s.clone(), TokenId(i as u32)).is_some() {
                return Err(Error::InvalidSentence(format!("duplicate surface form {s:?}")));
            }
        }
        Ok(Self { surfaces, index, eos })
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn eos(&self) -> TokenId {
        self.eos
    }

    pub fn ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        (0..self.surfaces.len() as u32).map(TokenId)
    }

    pub fn surfaces(&self) -> &[String] {
        &self.surfaces
    }

    /// Surface forms excluding EOS, in id order.
    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.surfaces.iter().enumerate().filter(|(i, _)| *i != self.eos.index()).map(|(_, s)| s.as_str())
    }

    pub fn token(&self, id: TokenId) -> Result<Token> {
        Ok(Token { id, surface: self.surface(id)?.to_string() })
    }

    pub fn surface(&self, id: TokenId) -> Result<&str> {
        self.surfaces
            .get(id.index())
            .map(String::as_str)
            .ok_or(Error::UnknownToken { id: id.0, size: self.surfaces.len() })
    }

    pub fn id(&self, surface: &str) -> Result<TokenId> {
        self.index.get(surface).copied().ok_or_else(|| Error::UnknownSurface(surface.to_string()))
    }

    pub fn check(&self, id: TokenId) -> Result<()> {
        if id.index() < self.surfaces.len() {
            Ok(())
        } else {
            Err(Error::UnknownToken { id: id.0, size: self.surfaces.len() })
        }
    }

    /// Parses whitespace-separated surface forms into a terminated sentence.
    /// A trailing EOS surface is accepted and ignored.
    pub fn parse_sentence(&self, text: &str) -> Result<Sentence> {
        let mut words: Vec<&str> = text.split_whitespace().collect();
        if words.last() == Some(&EOS_SURFACE) {
            words.pop();
        }
        let tokens = words
            .into_iter()
            .map(|w| {
                let id = self.id(w)?;
                if id == self.eos {
                    Err(Error::InvalidSentence("EOS in the middle of a sentence".into()))
                } else {
                    Ok(id)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sentence::complete(tokens))
    }

    /// Space-joined surface forms, EOS omitted.
    pub fn render(&self, sentence: &Sentence) -> Result<String> {
        let words = sentence.tokens().iter().map(|&t| self.surface(t)).collect::<Result<Vec<_>>>()?;
        Ok(words.join(" "))
    }

    /// Like [`Vocabulary::render`] but shows the EOS marker of terminated
    /// sentences.
    pub fn render_with_eos(&self, sentence: &Sentence) -> Result<String> {
        let mut out = self.render(sentence)?;
        if sentence.is_terminated() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(self.surface(self.eos)?);
        }
        Ok(out)
    }

    pub fn check_sentence(&self, sentence: &Sentence) -> Result<()> {
        for &t in sentence.tokens() {
            self.check(t)?;
            if t == self.eos {
                return Err(Error::InvalidSentence("EOS stored as an ordinary token".into()));
            }
        }
        Ok(())
    }
}

/// A token sequence, optionally closed by EOS.
///
/// EOS is not stored among `tokens`; `terminated` records that it follows the
/// last token. A prefix is an unterminated sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Sentence {
    tokens: Vec<TokenId>,
    terminated: bool,
}

impl Sentence {
    pub fn complete(tokens: Vec<TokenId>) -> Self {
        Self { tokens, terminated: true }
    }

    pub fn prefix(tokens: Vec<TokenId>) -> Self {
        Self { tokens, terminated: false }
    }

    pub fn empty_prefix() -> Self {
        Self::default()
    }

    /// Builds a sentence from raw ids where EOS may appear only as the last id.
    pub fn from_ids(ids: &[TokenId], eos: TokenId) -> Result<Self> {
        match ids.iter().position(|&t| t == eos) {
            None => Ok(Self::prefix(ids.to_vec())),
            Some(p) if p + 1 == ids.len() => Ok(Self::complete(ids[..p].to_vec())),
            Some(_) => Err(Error::InvalidSentence("EOS before the final position".into())),
        }
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// Number of emitted tokens, counting EOS when present.
    pub fn len(&self) -> usize {
        self.tokens.len() + usize::from(self.terminated)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends `token`, terminating the sentence if it is `eos`.
    pub fn extended(&self, token: TokenId, eos: TokenId) -> Result<Self> {
        if self.terminated {
            return Err(Error::InvalidSentence("cannot extend a terminated sentence".into()));
        }
        let mut next = self.clone();
        if token == eos {
            next.terminated = true;
        } else {
            next.tokens.push(token);
        }
        Ok(next)
    }

    /// The unterminated prefix of the first `n` emitted tokens.
    pub fn truncated(&self, n: usize) -> Self {
        Self::prefix(self.tokens[..n.min(self.tokens.len())].to_vec())
    }

    /// Ids in emission order, EOS included when terminated.
    pub fn ids_with_eos(&self, eos: TokenId) -> Vec<TokenId> {
        let mut ids = self.tokens.clone();
        if self.terminated {
            ids.push(eos);
        }
        ids
    }

    /// The same tokens marked as terminated.
    pub fn terminate(mut self) -> Self {
        self.terminated = true;
        self
    }
}
