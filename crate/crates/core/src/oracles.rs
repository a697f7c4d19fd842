//! Direct string deciders for the witness languages. No automata here:
//! membership is computed by splitting and counting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::LanguageError;
use crate::turing::{invalc_oracle, TmDoc, TuringMachine};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LanguageSpec {
    /// `a^n b^{in}`
    Multiple { i: usize },
    /// Union of `Multiple { i }` for `i` in `1..=k+1`.
    Union { k: usize },
    /// `(a*#)* b^n` with `n` the length of some a-block.
    Block,
    /// `Block` restricted to exactly `k + 1` blocks.
    BlockK { k: usize },
    /// `(0+1)* 1 (0+1)^{n-1}`
    Ln { n: usize },
    /// `(0+1)^{<n} (1 (0+1)^{n-1})*`
    ModN { n: usize },
    /// `a^n b^{in} c^{jn}` for `(i, j)` in `table[n]`.
    Ls {
        #[serde(with = "numeric_keys")]
        table: BTreeMap<usize, BTreeSet<(usize, usize)>>,
    },
    /// `u b^i c^{|j-i|}` for `(i, j)` in `table[u]`.
    BlockS { table: BTreeMap<String, BTreeSet<(usize, usize)>> },
    Invalc {
        #[serde(with = "tm_serde")]
        tm: TuringMachine,
    },
}

mod tm_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(tm: &TuringMachine, s: S) -> Result<S::Ok, S::Error> {
        tm.to_doc().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<TuringMachine, D::Error> {
        let doc = TmDoc::deserialize(d)?;
        TuringMachine::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

// Integer map keys do not survive the buffering done for tagged enums, so
// they travel as strings.
mod numeric_keys {
    use super::*;
    use serde::{Deserializer, Serializer};

    type Table = BTreeMap<usize, BTreeSet<(usize, usize)>>;

    pub fn serialize<S: Serializer>(t: &Table, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, &BTreeSet<(usize, usize)>> = t.iter().map(|(k, v)| (k.to_string(), v)).collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Table, D::Error> {
        let m = BTreeMap::<String, BTreeSet<(usize, usize)>>::deserialize(d)?;
        m.into_iter()
            .map(|(k, v)| k.parse::<usize>().map(|k| (k, v)).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl LanguageSpec {
    pub fn alphabet(&self) -> Vec<char> {
        match self {
            LanguageSpec::Multiple { .. } | LanguageSpec::Union { .. } => vec!['a', 'b'],
            LanguageSpec::Block | LanguageSpec::BlockK { .. } => vec!['a', '#', 'b'],
            LanguageSpec::Ln { .. } | LanguageSpec::ModN { .. } => vec!['0', '1'],
            LanguageSpec::Ls { .. } => vec!['a', 'b', 'c'],
            LanguageSpec::BlockS { .. } => vec!['a', '#', 'b', 'c'],
            LanguageSpec::Invalc { tm } => tm.encoding_alphabet(),
        }
    }

    pub fn decide(&self, w: &[char]) -> Result<bool, LanguageError> {
        let alphabet = self.alphabet();
        if let Some(&c) = w.iter().find(|c| !alphabet.contains(c)) {
            return Err(LanguageError::AlphabetMismatch(c));
        }
        Ok(match self {
            LanguageSpec::Multiple { i } => in_multiple(*i, w),
            LanguageSpec::Union { k } => (1..=k + 1).any(|i| in_multiple(i, w)),
            LanguageSpec::Block => block_parts(w).is_some_and(|(blocks, b)| blocks.contains(&b)),
            LanguageSpec::BlockK { k } => {
                block_parts(w).is_some_and(|(blocks, b)| blocks.len() == k + 1 && blocks.contains(&b))
            }
            LanguageSpec::Ln { n } => *n >= 1 && w.len() >= *n && w[w.len() - n] == '1',
            LanguageSpec::ModN { n } => {
                *n >= 1 && (w.len() % n..w.len()).step_by(*n).all(|p| w[p] == '1')
            }
            LanguageSpec::Ls { table } => {
                let n = run_length(w, 'a');
                let p = run_length(&w[n..], 'b');
                let q = run_length(&w[n + p..], 'c');
                n + p + q == w.len()
                    && table.get(&n).is_some_and(|s| s.iter().any(|&(i, j)| p == i * n && q == j * n))
            }
            LanguageSpec::BlockS { table } => table.iter().any(|(u, pairs)| {
                let u: Vec<char> = u.chars().collect();
                if !w.starts_with(&u) {
                    return false;
                }
                let rest = &w[u.len()..];
                let p = run_length(rest, 'b');
                let q = run_length(&rest[p..], 'c');
                p + q == rest.len() && pairs.iter().any(|&(i, j)| p == i && q == i.abs_diff(j))
            }),
            LanguageSpec::Invalc { tm } => invalc_oracle(tm, &w.iter().collect::<String>()),
        })
    }

    /// Members of length at most `max_len`, in length-lexicographic order
    /// with respect to [`LanguageSpec::alphabet`].
    pub fn enumerate(&self, max_len: usize) -> Vec<String> {
        all_words(&self.alphabet(), max_len)
            .into_iter()
            .filter(|w| self.decide(w).expect("words over the alphabet"))
            .map(|w| w.into_iter().collect())
            .collect()
    }
}

pub fn decide(spec: &LanguageSpec, w: &[char]) -> Result<bool, LanguageError> {
    spec.decide(w)
}

fn run_length(w: &[char], c: char) -> usize {
    w.iter().take_while(|&&x| x == c).count()
}

fn in_multiple(i: usize, w: &[char]) -> bool {
    let n = run_length(w, 'a');
    w.len() == n + i * n && w[n..].iter().all(|&c| c == 'b')
}

/// Block lengths and the b-count of a word in `(a*#)+ b*`.
fn block_parts(w: &[char]) -> Option<(Vec<usize>, usize)> {
    let last = w.iter().rposition(|&c| c == '#')?;
    let tail = &w[last + 1..];
    if tail.iter().any(|&c| c != 'b') {
        return None;
    }
    let mut blocks = Vec::new();
    for part in w[..last].split(|&c| c == '#') {
        if part.iter().any(|&c| c != 'a') {
            return None;
        }
        blocks.push(part.len());
    }
    Some((blocks, tail.len()))
}

/// All words over `alphabet` up to `max_len`, shortest first, then in
/// alphabet order.
pub fn all_words(alphabet: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<char>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &a in alphabet {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
