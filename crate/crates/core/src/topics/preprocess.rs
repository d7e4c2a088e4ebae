use std::collections::{BTreeSet, HashSet};
use std::sync::LazyLock;

const STOPWORDS: &str = include_str!("../data/stopwords.txt");
const NON_NOUNS: &str = include_str!("../data/non_nouns.txt");
const NOUNS: &str = include_str!("../data/nouns.txt");

static NON_NOUN_SET: LazyLock<HashSet<&'static str>> =
    LazyLock::new(|| NON_NOUNS.split_whitespace().collect());
static NOUN_SET: LazyLock<HashSet<&'static str>> =
    LazyLock::new(|| NOUNS.split_whitespace().collect());

// inflections and derivations that rarely end a noun
const NON_NOUN_SUFFIXES: &[&str] = &[
    "ing", "ed", "ly", "ize", "ous", "ful", "ive", "able", "ible",
];

/// The bundled 175-word English stopword list.
pub fn default_stopwords() -> BTreeSet<String> {
    STOPWORDS.split_whitespace().map(str::to_owned).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessOptions {
    /// Removed regardless of case.
    pub drop_terms: BTreeSet<String>,
    pub keep_nouns_only: bool,
    pub stopwords: BTreeSet<String>,
    /// Split on anything that is not a letter (digits included). When false,
    /// digits are kept inside tokens.
    pub strip_nonalpha: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            drop_terms: BTreeSet::from(["java".to_owned()]),
            keep_nouns_only: false,
            stopwords: default_stopwords(),
            strip_nonalpha: true,
        }
    }
}

impl PreprocessOptions {
    pub fn nouns_only(mut self) -> Self {
        self.keep_nouns_only = true;
        self
    }
}

/// Lowercases, splits on non-letters, and removes stopwords, dropped terms
/// and (optionally) tokens that do not look like nouns.
pub fn preprocess_text(text: &str, opts: &PreprocessOptions) -> Vec<String> {
    let lower = text.to_lowercase();
    let keep_char = |c: char| {
        if opts.strip_nonalpha {
            c.is_alphabetic()
        } else {
            c.is_alphanumeric()
        }
    };
    let drop: HashSet<String> = opts.drop_terms.iter().map(|t| t.to_lowercase()).collect();
    lower
        .split(|c: char| !keep_char(c))
        .filter(|t| !t.is_empty())
        .filter(|t| !opts.stopwords.contains(*t) && !drop.contains(*t))
        .filter(|t| !opts.keep_nouns_only || is_probable_noun(t))
        .map(str::to_owned)
        .collect()
}

/// Lexicon-and-suffix noun test. Tokens listed as nouns always pass; tokens
/// listed as verbs or adjectives (or a plural/third-person form of one) and
/// long tokens with a verb or adjective suffix fail.
pub fn is_probable_noun(token: &str) -> bool {
    if NOUN_SET.contains(token) {
        return true;
    }
    if NON_NOUN_SET.contains(token) {
        return false;
    }
    for stem in [token.strip_suffix("es"), token.strip_suffix('s')]
        .into_iter()
        .flatten()
    {
        if NON_NOUN_SET.contains(stem) && !NOUN_SET.contains(stem) {
            return false;
        }
    }
    !NON_NOUN_SUFFIXES
        .iter()
        .any(|s| token.len() >= s.len() + 3 && token.ends_with(s))
}
