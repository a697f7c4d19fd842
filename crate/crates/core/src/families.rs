//! Construction families by name, each paired with its witness language.

use crate::constructions::{block_pda, mod_pda, multiple_dpda, suffix_one_pda, union_pda};
use crate::dfa::{block_regular_dfa, product_with_dfa_trimmed};
use crate::error::ConstructionError;
use crate::invalc::invalc_pda;
use crate::oracles::LanguageSpec;
use crate::pda::Pda;
use crate::turing::{demo_tm, TuringMachine};

pub trait Family {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Name of the integer parameter, if the family has one.
    fn parameter(&self) -> Option<&'static str>;
    fn build(&self, n: usize, tm: Option<&TuringMachine>) -> Result<Pda, ConstructionError>;
    fn language(&self, n: usize, tm: Option<&TuringMachine>) -> LanguageSpec;
}

struct Multiple;
struct Union;
struct Block;
struct BlockK;
struct SuffixOne;
struct ModN;
struct Invalc;

impl Family for Multiple {
    fn name(&self) -> &'static str {
        "multiple"
    }
    fn summary(&self) -> &'static str {
        "deterministic PDA for a^n b^(i*n)"
    }
    fn parameter(&self) -> Option<&'static str> {
        Some("i")
    }
    fn build(&self, i: usize, _: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        multiple_dpda(i)
    }
    fn language(&self, i: usize, _: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::Multiple { i }
    }
}

impl Family for Union {
    fn name(&self) -> &'static str {
        "union"
    }
    fn summary(&self) -> &'static str {
        "k+1 deterministic branches behind an ε-choice"
    }
    fn parameter(&self) -> Option<&'static str> {
        Some("k")
    }
    fn build(&self, k: usize, _: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        union_pda(k)
    }
    fn language(&self, k: usize, _: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::Union { k }
    }
}

impl Family for Block {
    fn name(&self) -> &'static str {
        "block"
    }
    fn summary(&self) -> &'static str {
        "guesses the a-block whose length the b-suffix repeats"
    }
    fn parameter(&self) -> Option<&'static str> {
        None
    }
    fn build(&self, _: usize, _: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        Ok(block_pda())
    }
    fn language(&self, _: usize, _: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::Block
    }
}

impl Family for BlockK {
    fn name(&self) -> &'static str {
        "block_k"
    }
    fn summary(&self) -> &'static str {
        "block automaton restricted to exactly k+1 blocks"
    }
    fn parameter(&self) -> Option<&'static str> {
        Some("k")
    }
    fn build(&self, k: usize, _: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        product_with_dfa_trimmed(&block_pda(), &block_regular_dfa(k))
    }
    fn language(&self, k: usize, _: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::BlockK { k }
    }
}

impl Family for SuffixOne {
    fn name(&self) -> &'static str {
        "suffix_one"
    }
    fn summary(&self) -> &'static str {
        "n-th letter from the end is 1, with a binary stack counter"
    }
    fn parameter(&self) -> Option<&'static str> {
        Some("n")
    }
    fn build(&self, n: usize, _: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        suffix_one_pda(n)
    }
    fn language(&self, n: usize, _: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::Ln { n }
    }
}

impl Family for ModN {
    fn name(&self) -> &'static str {
        "mod_n"
    }
    fn summary(&self) -> &'static str {
        "every n-th letter counted back from the end is 1"
    }
    fn parameter(&self) -> Option<&'static str> {
        Some("n")
    }
    fn build(&self, n: usize, _: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        mod_pda(n)
    }
    fn language(&self, n: usize, _: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::ModN { n }
    }
}

impl Family for Invalc {
    fn name(&self) -> &'static str {
        "invalc"
    }
    fn summary(&self) -> &'static str {
        "strings that are not valid halting computations of a Turing machine"
    }
    fn parameter(&self) -> Option<&'static str> {
        None
    }
    fn build(&self, _: usize, tm: Option<&TuringMachine>) -> Result<Pda, ConstructionError> {
        match tm {
            Some(tm) => invalc_pda(tm),
            None => invalc_pda(&demo_tm()),
        }
    }
    fn language(&self, _: usize, tm: Option<&TuringMachine>) -> LanguageSpec {
        LanguageSpec::Invalc { tm: tm.cloned().unwrap_or_else(demo_tm) }
    }
}

pub fn families() -> Vec<Box<dyn Family>> {
    vec![
        Box::new(Multiple),
        Box::new(Union),
        Box::new(Block),
        Box::new(BlockK),
        Box::new(SuffixOne),
        Box::new(ModN),
        Box::new(Invalc),
    ]
}

pub fn family(name: &str) -> Result<Box<dyn Family>, ConstructionError> {
    families()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| ConstructionError::UnknownFamily(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::exact_accepts;
    use crate::oracles::all_words;

    #[test]
    fn names_are_unique_and_resolve() {
        let names: Vec<&str> = families().iter().map(|f| f.name()).collect();
        for n in &names {
            assert_eq!(family(n).unwrap().name(), *n);
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert!(matches!(family("nope"), Err(ConstructionError::UnknownFamily(_))));
    }

    #[test]
    fn built_automata_match_their_languages() {
        for f in families().iter().filter(|f| f.name() != "invalc") {
            let n = 2;
            let pda = f.build(n, None).unwrap();
            let lang = f.language(n, None);
            for w in all_words(&lang.alphabet(), 5) {
                assert_eq!(exact_accepts(&pda, &w), lang.decide(&w).unwrap(), "{} on {w:?}", f.name());
            }
        }
    }
}
