#![allow(dead_code)]

use std::collections::BTreeSet;

use explorable::constructions::{block_pda, mod_pda, multiple_dpda, suffix_one_pda, union_pda};
use explorable::dfa::{block_regular_dfa, product_with_dfa_trimmed};
use explorable::grammar::exact_accepts;
use explorable::invalc::{invalc_branches, invalc_pda};
use explorable::pda::{Pda, PdaBuilder};
use explorable::run::enumerate_runs;
use explorable::turing::demo_tm;

pub fn w(s: &str) -> Vec<char> {
    s.chars().collect()
}

pub struct Entry {
    pub name: String,
    pub pda: Pda,
    /// Largest horizon the coherence sweep uses.
    pub horizon: usize,
}

fn entry(name: impl Into<String>, pda: Pda, horizon: usize) -> Entry {
    Entry { name: name.into(), pda, horizon }
}

/// Every construction at desk scale.
pub fn corpus() -> Vec<Entry> {
    let mut v = Vec::new();
    for i in 1..=2 {
        v.push(entry(format!("multiple({i})"), multiple_dpda(i).unwrap(), 8));
    }
    for k in 1..=2 {
        v.push(entry(format!("union({k})"), union_pda(k).unwrap(), 8));
    }
    v.push(entry("block", block_pda(), 6));
    v.push(entry("block_k(1)", product_with_dfa_trimmed(&block_pda(), &block_regular_dfa(1)).unwrap(), 6));
    for n in 1..=3 {
        v.push(entry(format!("suffix_one({n})"), suffix_one_pda(n).unwrap(), 8));
        v.push(entry(format!("mod_n({n})"), mod_pda(n).unwrap(), 8));
    }
    let tm = demo_tm();
    let (b, c) = invalc_branches(&tm).unwrap();
    v.push(entry("invalc", invalc_pda(&tm).unwrap(), 3));
    v.push(entry("invalc-branch-b", b, 3));
    v.push(entry("invalc-branch-c", c, 3));
    v.push(entry("binary", binary_branching(), 6));
    v
}

/// ε-free, two states, every letter may move to either state: `2^n` runs
/// on every word of length `n`.
pub fn binary_branching() -> Pda {
    let mut b = PdaBuilder::new(&['a', 'b'], "p", "Z");
    b.accept("q");
    for from in ["p", "q"] {
        for to in ["p", "q"] {
            for x in ['a', 'b'] {
                b.add(from, Some(x), "Z", to, &["Z"]);
            }
        }
    }
    b.build()
}

/// Accepts `a^n b^m` for `m >= n`; after the count the automaton keeps
/// leaving and re-entering its accepting state through ε-steps.
pub fn revisiting() -> Pda {
    let mut b = PdaBuilder::new(&['a', 'b'], "q", "Z");
    b.accept("f");
    b.add("q", Some('a'), "Z", "q", &["X", "Z"]);
    b.add("q", Some('a'), "X", "q", &["X", "X"]);
    b.add("q", Some('b'), "X", "p", &[]);
    b.add("p", Some('b'), "X", "p", &[]);
    b.add("p", None, "Z", "f", &["Z"]);
    b.add("f", Some('b'), "Z", "g", &["Z"]);
    b.add("g", None, "Z", "f", &["Z"]);
    b.build()
}

/// Prefix lengths a run accepts: positions where it has read exactly that
/// many letters and sits in an accepting state.
pub fn accepted_lengths(pda: &Pda, run: &explorable::run::Run) -> BTreeSet<usize> {
    let mut read = 0;
    let mut out = BTreeSet::new();
    for (s, c) in run.configs.iter().enumerate() {
        if s > 0 && run.labels[s - 1].is_some() {
            read += 1;
        }
        if pda.is_accepting(c.state) {
            out.insert(read);
        }
    }
    out
}

/// Can `k` tokens accept every member prefix of `word`, knowing the word in
/// advance? A token's play is a run over some prefix of the word.
pub fn survivable(pda: &Pda, k: usize, word: &[char], eps_budget: usize) -> bool {
    let members: BTreeSet<usize> = (0..=word.len()).filter(|&m| exact_accepts(pda, &word[..m])).collect();
    let mut covers: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for m in 0..=word.len() {
        for run in enumerate_runs(pda, &word[..m], eps_budget).runs {
            let c: BTreeSet<usize> = accepted_lengths(pda, &run).intersection(&members).copied().collect();
            covers.insert(c);
        }
    }
    let covers: Vec<BTreeSet<usize>> = covers.into_iter().collect();
    fn pick(covers: &[BTreeSet<usize>], left: usize, need: &BTreeSet<usize>) -> bool {
        if need.is_empty() {
            return true;
        }
        if left == 0 {
            return false;
        }
        covers.iter().any(|c| {
            let rest: BTreeSet<usize> = need.difference(c).copied().collect();
            rest.len() < need.len() && pick(covers, left - 1, &rest)
        })
    }
    pick(&covers, k, &members)
}
