//! Automaton families: `a^n b^{in}` and unions of them, the block language,
//! the suffix and modulo counters, and the copy-and-relabel transform.

use crate::error::ConstructionError;
use crate::pda::{Pda, PdaBuilder, Transition};

pub const BOTTOM: &str = "⊥";

fn multiple_into(b: &mut PdaBuilder, i: usize, p: &str) {
    let s = |x: &str| format!("{p}{x}");
    let read = s("read");
    let chain: Vec<String> = (1..i).map(|m| s(&format!("c{m}"))).collect();
    let after_a = chain.first().cloned().unwrap_or_else(|| read.clone());
    b.accept(&s("start")).accept(&s("acc"));
    b.add(&s("start"), Some('a'), "Z", &after_a, &["A", "Z"]);
    b.add(&read, Some('a'), "A", &after_a, &["A", "A"]);
    for (m, c) in chain.iter().enumerate() {
        let next = chain.get(m + 1).unwrap_or(&read);
        b.add(c, None, "A", next, &["A", "A"]);
    }
    b.add(&read, Some('b'), "A", &s("pop"), &[]);
    b.add(&s("pop"), Some('b'), "A", &s("pop"), &[]);
    b.add(&s("pop"), None, "Z", &s("acc"), &["Z"]);
}

/// Deterministic PDA for `a^n b^{in}`.
pub fn multiple_dpda(i: usize) -> Result<Pda, ConstructionError> {
    if i == 0 {
        return Err(ConstructionError::BadParameter("i must be at least 1".into()));
    }
    let mut b = PdaBuilder::new(&['a', 'b'], "start", "Z");
    multiple_into(&mut b, i, "");
    Ok(b.build())
}

/// ε-choice among `multiple_dpda(i)` for `i` in `1..=k+1`; branch states
/// are prefixed `d{i}_`.
pub fn union_pda(k: usize) -> Result<Pda, ConstructionError> {
    if k == 0 {
        return Err(ConstructionError::BadParameter("k must be at least 1".into()));
    }
    let mut b = PdaBuilder::new(&['a', 'b'], "u0", "Z");
    b.symbol("A");
    for i in 1..=k + 1 {
        let p = format!("d{i}_");
        b.add("u0", None, "Z", &format!("{p}start"), &["Z"]);
        multiple_into(&mut b, i, &p);
    }
    Ok(b.build())
}

/// Guesses one a-block, stores its length, and compares it with the b-tail.
pub fn block_pda() -> Pda {
    let mut b = PdaBuilder::new(&['a', '#', 'b'], "start", "Z");
    b.accept("zero").accept("acc");
    // between blocks, nothing chosen yet
    b.add("start", Some('a'), "Z", "skip", &["Z"]);
    b.add("start", Some('a'), "Z", "count", &["A", "Z"]);
    b.add("start", Some('#'), "Z", "start", &["Z"]);
    b.add("start", Some('#'), "Z", "zero", &["Z"]);
    b.add("skip", Some('a'), "Z", "skip", &["Z"]);
    b.add("skip", Some('#'), "Z", "start", &["Z"]);
    // chosen block, counting
    b.add("count", Some('a'), "A", "count", &["A", "A"]);
    b.add("count", Some('#'), "A", "gap", &["A"]);
    // later blocks are ignored
    b.add("gap", Some('a'), "A", "gap_in", &["A"]);
    b.add("gap", Some('#'), "A", "gap", &["A"]);
    b.add("gap_in", Some('a'), "A", "gap_in", &["A"]);
    b.add("gap_in", Some('#'), "A", "gap", &["A"]);
    b.add("gap", Some('b'), "A", "pop", &[]);
    b.add("pop", Some('b'), "A", "pop", &[]);
    b.add("pop", None, "Z", "acc", &["Z"]);
    // chosen block of length zero: accept with no b at all
    b.add("zero", Some('a'), "Z", "zero_in", &["Z"]);
    b.add("zero", Some('#'), "Z", "zero", &["Z"]);
    b.add("zero_in", Some('a'), "Z", "zero_in", &["Z"]);
    b.add("zero_in", Some('#'), "Z", "zero", &["Z"]);
    b.build()
}

/// Primed copy of the state space reachable from accepting states by an
/// ε-transfer; inside the copy `b` is read as `c`. Only copies accept.
pub fn relabel_extension(pda: &Pda, b: char, c: char) -> Result<Pda, ConstructionError> {
    if pda.input_alphabet().contains(&c) {
        return Err(ConstructionError::LetterClash(c));
    }
    if !pda.input_alphabet().contains(&b) {
        return Err(ConstructionError::BadParameter(format!("letter `{b}` is not in the input alphabet")));
    }
    let nq = pda.states().len();
    let mut states = pda.states().to_vec();
    for q in pda.states() {
        let mut name = format!("{q}'");
        while states.contains(&name) {
            name.push('\'');
        }
        states.push(name);
    }
    let mut alphabet = pda.input_alphabet().to_vec();
    alphabet.push(c);
    let mut transitions = pda.transitions().to_vec();
    for &f in pda.accepting() {
        for x in 0..pda.stack_alphabet().len() {
            transitions.push(Transition { from: f, input: None, pop: x, to: f + nq, push: vec![x] });
        }
    }
    for t in pda.transitions() {
        let input = match t.input {
            None => None,
            Some(x) if x == b => Some(c),
            Some(_) => continue,
        };
        transitions.push(Transition { from: t.from + nq, input, pop: t.pop, to: t.to + nq, push: t.push.clone() });
    }
    Ok(Pda::from_parts(
        states,
        alphabet,
        pda.stack_alphabet().to_vec(),
        pda.initial_state(),
        pda.initial_stack_symbol(),
        pda.accepting().iter().map(|f| f + nq).collect(),
        transitions,
    ))
}

/// Binary digits of `v`, most significant first; empty for zero.
fn bits(v: usize) -> Vec<&'static str> {
    if v == 0 {
        return vec![];
    }
    let width = usize::BITS - v.leading_zeros();
    (0..width).rev().map(|k| if v >> k & 1 == 1 { "1" } else { "0" }).collect()
}

/// Emits an ε-chain that loads `v` onto a `⊥`-bottomed stack (least
/// significant bit on top), entered by `entry` (a letter or ε) from `from`.
fn load_counter(b: &mut PdaBuilder, from: &str, entry: Option<char>, v: usize, to: &str, tag: &str) {
    let digits = bits(v);
    if digits.is_empty() {
        b.add(from, entry, BOTTOM, to, &[BOTTOM]);
        return;
    }
    let step = |j: usize| if j + 1 == digits.len() { to.to_string() } else { format!("{tag}load{}", j + 1) };
    b.add(from, entry, BOTTOM, &step(0), &[digits[0], BOTTOM]);
    for j in 1..digits.len() {
        let here = format!("{tag}load{j}");
        for top in ["0", "1"] {
            b.add(&here, None, top, &step(j), &[digits[j], top]);
        }
    }
}

/// Letter-driven decrement in state `cnt`: each letter lowers the counter;
/// a letter read while the counter is zero moves to `done` (or, with
/// `done = None`, is not readable). `width` bounds the number of bits.
fn decrement_gadget(b: &mut PdaBuilder, cnt: &str, letters: &[char], width: usize, done: Option<&str>, tag: &str) {
    for &x in letters {
        b.add(cnt, Some(x), "1", cnt, &["0"]);
        if width > 0 {
            b.add(cnt, Some(x), "0", &format!("{tag}z1"), &[]);
        }
        if let Some(d) = done {
            b.add(cnt, Some(x), BOTTOM, d, &[BOTTOM]);
        }
    }
    let r = |k: usize| if k == 0 { cnt.to_string() } else { format!("{tag}r{k}") };
    for m in 1..=width {
        let z = format!("{tag}z{m}");
        if m < width {
            b.add(&z, None, "0", &format!("{tag}z{}", m + 1), &[]);
            b.add(&z, None, "1", &r(m), &["0"]);
        }
        if let Some(d) = done {
            b.add(&z, None, BOTTOM, d, &[BOTTOM]);
        }
    }
    // r_k pushes k ones back
    for k in 1..width {
        for top in ["0", "1"] {
            b.add(&r(k), None, top, &r(k - 1), &["1", top]);
        }
    }
}

fn counter_width(n: usize) -> usize {
    bits(n).len()
}

/// Explorable PDA for `(0+1)* 1 (0+1)^{n-1}` with a binary counter on the
/// stack over `{0, 1, ⊥}`.
pub fn suffix_one_pda(n: usize) -> Result<Pda, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::BadParameter("n must be at least 1".into()));
    }
    let mut b = PdaBuilder::new(&['0', '1'], "init", BOTTOM);
    b.symbol("0");
    b.symbol("1");
    b.accept("final");
    b.state("dummy");
    let width = counter_width(n.saturating_sub(2));
    for x in ['0', '1'] {
        b.add("init", Some(x), BOTTOM, "init", &[BOTTOM]);
    }
    for (g, end) in [('1', "final"), ('0', "dummy")] {
        if n == 1 {
            b.add("init", Some(g), BOTTOM, end, &[BOTTOM]);
            continue;
        }
        let tag = format!("g{g}_");
        let cnt = format!("{tag}cnt");
        load_counter(&mut b, "init", Some(g), n - 2, &cnt, &tag);
        decrement_gadget(&mut b, &cnt, &['0', '1'], width, Some(end), &tag);
    }
    b.add("final", None, BOTTOM, "init", &[BOTTOM]);
    b.add("dummy", None, BOTTOM, "init", &[BOTTOM]);
    Ok(b.build())
}

/// Explorable PDA for `(0+1)^{<n} (1 (0+1)^{n-1})*`: a bounded prefix in
/// `pre`, then blocks that start with `1`, each measured by the counter.
pub fn mod_pda(n: usize) -> Result<Pda, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::BadParameter("n must be at least 1".into()));
    }
    let mut b = PdaBuilder::new(&['0', '1'], "init", BOTTOM);
    b.symbol("0");
    b.symbol("1");
    b.accept("pre").accept("bend");
    b.state("blk");
    // prefix of at most n-1 letters
    load_counter(&mut b, "init", None, n - 1, "pre", "p_");
    decrement_gadget(&mut b, "pre", &['0', '1'], counter_width(n - 1), None, "p_");
    for top in ["0", "1"] {
        b.add("pre", None, top, "clr", &[]);
        b.add("clr", None, top, "clr", &[]);
    }
    b.add("clr", None, BOTTOM, "blk", &[BOTTOM]);
    b.add("pre", None, BOTTOM, "blk", &[BOTTOM]);
    // blocks
    if n == 1 {
        b.add("blk", Some('1'), BOTTOM, "bend", &[BOTTOM]);
    } else {
        load_counter(&mut b, "blk", Some('1'), n - 2, "b_cnt", "b_");
        decrement_gadget(&mut b, "b_cnt", &['0', '1'], counter_width(n - 2), Some("bend"), "b_");
    }
    b.add("bend", None, BOTTOM, "blk", &[BOTTOM]);
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::exact_accepts;
    use crate::oracles::{all_words, LanguageSpec};

    fn agree(pda: &Pda, spec: &LanguageSpec, max: usize) {
        assert!(pda.validate().is_well_formed(), "{:?}", pda.validate().violations);
        for w in all_words(&spec.alphabet(), max) {
            assert_eq!(exact_accepts(pda, &w), spec.decide(&w).unwrap(), "{spec:?} on {:?}", String::from_iter(&w));
        }
    }

    #[test]
    fn multiple_matches_oracle() {
        for i in 1..=3 {
            let p = multiple_dpda(i).unwrap();
            assert!(p.validate().deterministic);
            agree(&p, &LanguageSpec::Multiple { i }, 8);
        }
    }

    #[test]
    fn union_matches_oracle() {
        let p = union_pda(1).unwrap();
        let r = p.validate();
        assert!(!r.deterministic && !r.epsilon_free);
        agree(&p, &LanguageSpec::Union { k: 1 }, 8);
    }

    #[test]
    fn block_matches_oracle() {
        agree(&block_pda(), &LanguageSpec::Block, 7);
    }

    #[test]
    fn suffix_one_matches_oracle() {
        for n in 1..=4 {
            agree(&suffix_one_pda(n).unwrap(), &LanguageSpec::Ln { n }, n + 3);
        }
    }

    #[test]
    fn mod_matches_oracle() {
        for n in 1..=3 {
            agree(&mod_pda(n).unwrap(), &LanguageSpec::ModN { n }, 8);
        }
    }

    #[test]
    fn counter_load_for_eight() {
        let p = suffix_one_pda(8).unwrap();
        // follow the ε-chain entered by guessing a 1
        let mut c = p.initial_configuration();
        let init = p.state_id("init").unwrap();
        let first = p
            .enabled(&c)
            .iter()
            .copied()
            .find(|&t| p.transition(t).input == Some('1') && p.transition(t).to != init)
            .unwrap();
        c = c.apply(p.transition(first));
        while let [t] = p.enabled(&c).iter().copied().filter(|&t| p.transition(t).input.is_none()).collect::<Vec<_>>()[..] {
            c = c.apply(p.transition(t));
        }
        let word: Vec<&str> = c.stack_word().into_iter().map(|x| p.symbol_name(x)).collect();
        assert_eq!(word, ["0", "1", "1", BOTTOM]);
    }

    #[test]
    fn relabel_counts() {
        let p = union_pda(1).unwrap();
        let r = relabel_extension(&p, 'b', 'c').unwrap();
        assert_eq!(r.states().len(), 2 * p.states().len());
        assert_eq!(r.stack_alphabet(), p.stack_alphabet());
        assert_eq!(relabel_extension(&p, 'b', 'a'), Err(ConstructionError::LetterClash('a')));
    }
}
