//! Single-tape Turing machines and their computation encodings.
//!
//! An ID is written `left · state · head · right`. The tape window starts
//! at cell 0 and grows by one blank when the head moves past its right end;
//! it never shrinks. Moving left at cell 0 keeps the head in place.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::FormatError;

/// Separator between IDs in computation strings.
pub const SEPARATOR: char = '#';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TuringMachine {
    states: Vec<char>,
    input_alphabet: Vec<char>,
    tape_alphabet: Vec<char>,
    blank: char,
    delta: BTreeMap<(char, char), (char, char, Move)>,
    start: char,
    accept: char,
    reject: char,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TmConfiguration {
    pub left: Vec<char>,
    pub state: char,
    pub head: char,
    pub right: Vec<char>,
}

impl TmConfiguration {
    pub fn symbols(&self) -> Vec<char> {
        let mut v = self.left.clone();
        v.push(self.state);
        v.push(self.head);
        v.extend(&self.right);
        v
    }

    pub fn encode(&self) -> String {
        self.symbols().into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Next(TmConfiguration),
    Halted,
}

impl TuringMachine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        states: Vec<char>,
        input_alphabet: Vec<char>,
        tape_alphabet: Vec<char>,
        blank: char,
        delta: BTreeMap<(char, char), (char, char, Move)>,
        start: char,
        accept: char,
        reject: char,
    ) -> Result<TuringMachine, FormatError> {
        let tm = TuringMachine { states, input_alphabet, tape_alphabet, blank, delta, start, accept, reject };
        let problems = tm.violations();
        if problems.is_empty() {
            Ok(tm)
        } else {
            Err(FormatError::invalid(problems.join("; ")))
        }
    }

    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let q: BTreeSet<char> = self.states.iter().copied().collect();
        let g: BTreeSet<char> = self.tape_alphabet.iter().copied().collect();
        if self.accept == self.reject {
            v.push("accept and reject states coincide".to_string());
        }
        for s in [self.start, self.accept, self.reject] {
            if !q.contains(&s) {
                v.push(format!("state `{s}` is not declared"));
            }
        }
        if !g.contains(&self.blank) {
            v.push("blank is not a tape symbol".to_string());
        }
        if self.input_alphabet.contains(&self.blank) {
            v.push("blank belongs to the input alphabet".to_string());
        }
        for a in &self.input_alphabet {
            if !g.contains(a) {
                v.push(format!("input letter `{a}` is not a tape symbol"));
            }
        }
        if let Some(c) = q.intersection(&g).next() {
            v.push(format!("`{c}` is both a state and a tape symbol"));
        }
        for &s in &self.states {
            if s == self.accept || s == self.reject {
                continue;
            }
            for &x in &self.tape_alphabet {
                if !self.delta.contains_key(&(s, x)) {
                    v.push(format!("δ undefined on ({s}, {x})"));
                }
            }
        }
        for (&(s, x), &(n, w, _)) in &self.delta {
            if !q.contains(&s) || !q.contains(&n) || !g.contains(&x) || !g.contains(&w) {
                v.push(format!("δ entry ({s}, {x}) uses undeclared symbols"));
            }
        }
        v
    }

    pub fn states(&self) -> &[char] {
        &self.states
    }
    pub fn input_alphabet(&self) -> &[char] {
        &self.input_alphabet
    }
    pub fn tape_alphabet(&self) -> &[char] {
        &self.tape_alphabet
    }
    pub fn blank(&self) -> char {
        self.blank
    }
    pub fn start(&self) -> char {
        self.start
    }
    pub fn accept(&self) -> char {
        self.accept
    }
    pub fn reject(&self) -> char {
        self.reject
    }
    pub fn rule(&self, state: char, read: char) -> Option<(char, char, Move)> {
        self.delta.get(&(state, read)).copied()
    }
    pub fn rules(&self) -> &BTreeMap<(char, char), (char, char, Move)> {
        &self.delta
    }

    pub fn is_halting(&self, state: char) -> bool {
        state == self.accept || state == self.reject
    }

    pub fn is_state(&self, c: char) -> bool {
        self.states.contains(&c)
    }

    /// `#`, then the tape alphabet, then the states.
    pub fn encoding_alphabet(&self) -> Vec<char> {
        let mut v = vec![SEPARATOR];
        v.extend(&self.tape_alphabet);
        v.extend(&self.states);
        v
    }

    pub fn initial_configuration(&self, x: &[char]) -> TmConfiguration {
        match x.split_first() {
            Some((&h, rest)) => TmConfiguration { left: vec![], state: self.start, head: h, right: rest.to_vec() },
            None => TmConfiguration { left: vec![], state: self.start, head: self.blank, right: vec![] },
        }
    }

    pub fn step(&self, c: &TmConfiguration) -> StepResult {
        if self.is_halting(c.state) {
            return StepResult::Halted;
        }
        let Some((next, write, mv)) = self.rule(c.state, c.head) else {
            return StepResult::Halted;
        };
        let mut cells = c.left.clone();
        cells.push(write);
        cells.extend(&c.right);
        let h = c.left.len();
        let h = match mv {
            Move::R => {
                if h + 1 == cells.len() {
                    cells.push(self.blank);
                }
                h + 1
            }
            Move::L => h.saturating_sub(1),
        };
        StepResult::Next(TmConfiguration {
            left: cells[..h].to_vec(),
            state: next,
            head: cells[h],
            right: cells[h + 1..].to_vec(),
        })
    }

    /// IDs `ID_0 … ID_N` up to halting, or `None` when `max_steps` runs out.
    pub fn computation(&self, x: &[char], max_steps: usize) -> Option<Vec<TmConfiguration>> {
        let mut ids = vec![self.initial_configuration(x)];
        loop {
            let last = ids.last().expect("non-empty");
            if self.is_halting(last.state) {
                return Some(ids);
            }
            if ids.len() > max_steps {
                return None;
            }
            match self.step(last) {
                StepResult::Next(c) => ids.push(c),
                StepResult::Halted => return None,
            }
        }
    }

    pub fn to_doc(&self) -> TmDoc {
        TmDoc {
            states: self.states.iter().map(|c| c.to_string()).collect(),
            input_alphabet: self.input_alphabet.iter().map(|c| c.to_string()).collect(),
            tape_alphabet: self.tape_alphabet.iter().map(|c| c.to_string()).collect(),
            blank: self.blank.to_string(),
            delta: self
                .delta
                .iter()
                .map(|(&(s, r), &(n, w, m))| TmRuleDoc {
                    state: s.to_string(),
                    read: r.to_string(),
                    next: n.to_string(),
                    write: w.to_string(),
                    r#move: m,
                })
                .collect(),
            start: self.start.to_string(),
            accept: self.accept.to_string(),
            reject: self.reject.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("TM documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<TuringMachine, FormatError> {
        let doc: TmDoc = serde_json::from_str(text).map_err(FormatError::from_json)?;
        TuringMachine::from_doc(&doc)
    }

    pub fn from_doc(doc: &TmDoc) -> Result<TuringMachine, FormatError> {
        fn ch(s: &str) -> Result<char, FormatError> {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(FormatError::invalid(format!("`{s}` must be a single character"))),
            }
        }
        let many = |v: &[String]| v.iter().map(|s| ch(s)).collect::<Result<Vec<_>, _>>();
        let mut delta = BTreeMap::new();
        for r in &doc.delta {
            delta.insert((ch(&r.state)?, ch(&r.read)?), (ch(&r.next)?, ch(&r.write)?, r.r#move));
        }
        TuringMachine::new(
            many(&doc.states)?,
            many(&doc.input_alphabet)?,
            many(&doc.tape_alphabet)?,
            ch(&doc.blank)?,
            delta,
            ch(&doc.start)?,
            ch(&doc.accept)?,
            ch(&doc.reject)?,
        )
    }
}

pub fn tm_step(tm: &TuringMachine, c: &TmConfiguration) -> StepResult {
    tm.step(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmRuleDoc {
    pub state: String,
    pub read: String,
    pub next: String,
    pub write: String,
    #[serde(rename = "move")]
    pub r#move: Move,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmDoc {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub tape_alphabet: Vec<String>,
    pub blank: String,
    pub delta: Vec<TmRuleDoc>,
    pub start: String,
    pub accept: String,
    pub reject: String,
}

/// Two working states `p`, `q`; halts after four steps on ε and on `1`,
/// after two steps on `11`.
pub fn demo_tm() -> TuringMachine {
    let delta = BTreeMap::from([
        (('p', '_'), ('q', '1', Move::R)),
        (('q', '_'), ('p', '1', Move::L)),
        (('p', '1'), ('q', '_', Move::R)),
        (('q', '1'), ('A', '1', Move::R)),
    ]);
    TuringMachine::new(vec!['p', 'q', 'A', 'R'], vec!['1'], vec!['1', '_'], '_', delta, 'p', 'A', 'R')
        .expect("demo machine is well-formed")
}

fn reversed(c: &TmConfiguration) -> String {
    c.symbols().into_iter().rev().collect()
}

/// `#ID_0#ID_1^r#ID_2#…#ID_N#` for a computation halting at an even index
/// `N ≥ 4`; `None` otherwise.
pub fn valc_string(tm: &TuringMachine, x: &[char], max_steps: usize) -> Option<String> {
    let ids = tm.computation(x, max_steps)?;
    let n = ids.len() - 1;
    if n % 2 != 0 || n < 4 {
        return None;
    }
    let mut s = String::from(SEPARATOR);
    for (i, c) in ids.iter().enumerate() {
        if i % 2 == 1 {
            s.push_str(&reversed(c));
        } else {
            s.push_str(&c.encode());
        }
        s.push(SEPARATOR);
    }
    Some(s)
}

fn parse_id(tm: &TuringMachine, block: &[char]) -> Option<TmConfiguration> {
    let positions: Vec<usize> = (0..block.len()).filter(|&i| tm.is_state(block[i])).collect();
    let [p] = positions.as_slice() else { return None };
    if *p + 1 >= block.len() || block.iter().any(|c| *c != block[*p] && !tm.tape_alphabet.contains(c)) {
        return None;
    }
    Some(TmConfiguration {
        left: block[..*p].to_vec(),
        state: block[*p],
        head: block[p + 1],
        right: block[p + 2..].to_vec(),
    })
}

/// The IDs of `s` when it is a valid computation string, else `None`.
pub fn parse_valc(tm: &TuringMachine, s: &str) -> Option<Vec<TmConfiguration>> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() < 2 || chars[0] != SEPARATOR || *chars.last()? != SEPARATOR {
        return None;
    }
    let blocks: Vec<&[char]> = chars[1..chars.len() - 1].split(|&c| c == SEPARATOR).collect();
    let n = blocks.len().checked_sub(1)?;
    if n % 2 != 0 || n < 4 {
        return None;
    }
    let mut ids = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let block: Vec<char> = if i % 2 == 1 { b.iter().rev().copied().collect() } else { b.to_vec() };
        ids.push(parse_id(tm, &block)?);
    }
    let c0 = &ids[0];
    let x: Vec<char> = if c0.head == tm.blank && c0.right.is_empty() {
        vec![]
    } else {
        let mut x = vec![c0.head];
        x.extend(&c0.right);
        x
    };
    if x.iter().any(|a| !tm.input_alphabet.contains(a)) || *c0 != tm.initial_configuration(&x) {
        return None;
    }
    for w in ids.windows(2) {
        if tm.step(&w[0]) != StepResult::Next(w[1].clone()) {
            return None;
        }
    }
    if !tm.is_halting(ids[n].state) {
        return None;
    }
    Some(ids)
}

/// Whether `s` is an invalid computation of `tm`.
pub fn invalc_oracle(tm: &TuringMachine, s: &str) -> bool {
    parse_valc(tm, s).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn demo_first_step() {
        let tm = demo_tm();
        let c0 = tm.initial_configuration(&[]);
        assert_eq!(c0.encode(), "p_");
        let StepResult::Next(c1) = tm.step(&c0) else { panic!() };
        assert_eq!(c1.encode(), "1q_");
    }

    #[test]
    fn halting_configuration_halts() {
        let tm = demo_tm();
        let c = TmConfiguration { left: vec![], state: 'A', head: '1', right: vec![] };
        assert_eq!(tm.step(&c), StepResult::Halted);
    }

    #[test]
    fn left_edge_keeps_head() {
        let tm = demo_tm();
        // (q, _) moves left; at cell 0 the head stays
        let c = TmConfiguration { left: vec![], state: 'q', head: '_', right: vec![] };
        let StepResult::Next(n) = tm.step(&c) else { panic!() };
        assert_eq!(n.encode(), "p1");
    }

    #[test]
    fn valc_of_empty_input() {
        let tm = demo_tm();
        assert_eq!(valc_string(&tm, &[], 20).as_deref(), Some("#p_#_q1#p11#1q_#_1A_#"));
        assert_eq!(valc_string(&tm, &w("1"), 20).as_deref(), Some("#p1#_q_#p_1#1q1#11A_#"));
        assert_eq!(valc_string(&tm, &w("11"), 20), None);
        assert_eq!(valc_string(&tm, &[], 3), None);
    }

    #[test]
    fn valc_strings_are_not_invalid() {
        let tm = demo_tm();
        for x in [w(""), w("1")] {
            let s = valc_string(&tm, &x, 20).unwrap();
            assert!(!invalc_oracle(&tm, &s));
        }
        assert!(invalc_oracle(&tm, "#"));
        assert!(invalc_oracle(&tm, ""));
        assert!(invalc_oracle(&tm, "#pq_#_q1#p11#1q_#_1A_#"));
    }

    #[test]
    fn json_round_trip() {
        let tm = demo_tm();
        assert_eq!(TuringMachine::from_json(&tm.to_json()).unwrap(), tm);
    }

    #[test]
    fn blank_in_input_rejected() {
        let r = TuringMachine::new(vec!['p', 'A', 'R'], vec!['_'], vec!['_'], '_', BTreeMap::new(), 'p', 'A', 'R');
        assert!(r.is_err());
    }
}
