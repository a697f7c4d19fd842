//! PDA for the invalid computations of a Turing machine.
//!
//! Two deterministic branches, entered by an initial ε-choice. Each branch
//! runs a successor checker next to a DFA for the regular conditions
//! (shape, one state per ID, initial ID, halting last ID, block count) and
//! accepts when the DFA rejects or the checker finds a mismatch.
//! Branch `b` checks pairs `(C_2i, C_2i+1)`, branch `c` pairs
//! `(C_2i+1, C_2i+2)`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::constructions::BOTTOM;
use crate::dfa::Dfa;
use crate::error::ConstructionError;
use crate::pda::{Pda, PdaBuilder, Transition};
use crate::turing::{Move, TuringMachine, SEPARATOR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum C0 {
    Start,
    Q0,
    Blank,
    Input,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Block {
    nonempty: bool,
    states: u8,
    first_state: bool,
    last_state: bool,
    halting: bool,
}

const EMPTY_BLOCK: Block = Block { nonempty: false, states: 0, first_state: false, last_state: false, halting: false };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Content {
    First(C0),
    Later(Block),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum D {
    Init,
    Dead,
    // idx: 0..=3 exact block index, 4 even index ≥ 4, 5 odd index ≥ 5
    In { idx: u8, content: Content, halted: bool },
}

fn next_idx(idx: u8) -> u8 {
    match idx {
        5 => 4,
        i => i + 1,
    }
}

fn d_step(tm: &TuringMachine, d: D, a: char) -> D {
    match d {
        D::Dead => D::Dead,
        D::Init => {
            if a == SEPARATOR {
                D::In { idx: 0, content: Content::First(C0::Start), halted: false }
            } else {
                D::Dead
            }
        }
        D::In { idx, content, halted } => {
            if a == SEPARATOR {
                let (valid, halting) = match content {
                    Content::First(c) => (matches!(c, C0::Blank | C0::Input), tm.is_halting(tm.start())),
                    Content::Later(b) => {
                        let placed = if idx % 2 == 0 { !b.last_state } else { !b.first_state };
                        (b.nonempty && b.states == 1 && placed, b.halting)
                    }
                };
                if !valid || halted {
                    return D::Dead;
                }
                return D::In { idx: next_idx(idx), content: Content::Later(EMPTY_BLOCK), halted: halting };
            }
            let content = match content {
                Content::First(c) => {
                    let n = match c {
                        C0::Start if a == tm.start() => Some(C0::Q0),
                        C0::Q0 if a == tm.blank() => Some(C0::Blank),
                        C0::Q0 | C0::Input if tm.input_alphabet().contains(&a) => Some(C0::Input),
                        _ => None,
                    };
                    match n {
                        Some(n) => Content::First(n),
                        None => return D::Dead,
                    }
                }
                Content::Later(mut b) => {
                    if tm.is_state(a) {
                        if b.states == 1 {
                            return D::Dead;
                        }
                        b.states = 1;
                        b.first_state = !b.nonempty;
                        b.last_state = true;
                        b.halting = tm.is_halting(a);
                    } else {
                        b.last_state = false;
                    }
                    b.nonempty = true;
                    Content::Later(b)
                }
            };
            D::In { idx, content, halted }
        }
    }
}

fn d_accepting(d: D) -> bool {
    matches!(d, D::In { idx: 5, content: Content::Later(EMPTY_BLOCK), halted: true })
}

/// DFA for the strings meeting every condition except successor validity.
pub fn invalc_regular_dfa(tm: &TuringMachine) -> Dfa {
    regular_dfa_states(tm).1
}

fn regular_dfa_states(tm: &TuringMachine) -> (Vec<D>, Dfa) {
    let alphabet = tm.encoding_alphabet();
    let mut ids: HashMap<D, usize> = HashMap::new();
    let mut states = vec![D::Init];
    ids.insert(D::Init, 0);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let d = states[i];
        let mut row = Vec::with_capacity(alphabet.len());
        for &a in &alphabet {
            let n = d_step(tm, d, a);
            let id = *ids.entry(n).or_insert_with(|| {
                states.push(n);
                states.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    let names = states.iter().enumerate().map(|(i, d)| format!("r{i}:{d:?}").replace(' ', "")).collect();
    let accepting = (0..states.len()).filter(|&i| d_accepting(states[i])).collect();
    let dfa = Dfa::new(names, alphabet, 0, accepting, delta).expect("complete by construction");
    (states, dfa)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Ck {
    Start,
    Skip,
    // forward successor transducer (reads C, pushes succ(C) first to last)
    F0,
    F1(char),
    FQ(char, Option<char>),
    Copy0,
    Copy,
    // reverse transducer (reads C reversed, pushes succ(C) last to first)
    B0,
    B1(char, bool),
    RL(char),
    Hold,
    Cmp,
    Fin,
    Garbage,
    Viol,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Branch {
    B,
    C,
}

impl Branch {
    fn push_start(self) -> Ck {
        match self {
            Branch::B => Ck::F0,
            Branch::C => Ck::B0,
        }
    }
}

fn ck_name(s: Ck) -> String {
    match s {
        Ck::F1(x) => format!("F1[{x}]"),
        Ck::FQ(q, Some(x)) => format!("FQ[{q}{x}]"),
        Ck::FQ(q, None) => format!("FQ[{q}]"),
        Ck::B1(x, any) => format!("B1[{x}{}]", if any { "+" } else { "" }),
        Ck::RL(q) => format!("RL[{q}]"),
        other => format!("{other:?}"),
    }
}

/// Letter step of the finite part of the checker. `Cmp` is stack-driven and
/// handled separately.
fn ck_step(tm: &TuringMachine, br: Branch, s: Ck, a: char) -> (Ck, Vec<char>) {
    let tape = a != SEPARATOR && !tm.is_state(a);
    let state = tm.is_state(a);
    let hash = a == SEPARATOR;
    let blank = tm.blank();
    match s {
        Ck::Start if hash => (if br == Branch::B { Ck::F0 } else { Ck::Skip }, vec![]),
        Ck::Start => (Ck::Garbage, vec![]),
        Ck::Skip if hash => (Ck::B0, vec![]),
        Ck::Skip => (Ck::Skip, vec![]),
        Ck::F0 if tape => (Ck::F1(a), vec![]),
        Ck::F0 if state => (Ck::FQ(a, None), vec![]),
        Ck::F1(x) if tape => (Ck::F1(a), vec![x]),
        Ck::F1(x) if state => (Ck::FQ(a, Some(x)), vec![]),
        Ck::FQ(q, xo) if tape => {
            if tm.is_halting(q) {
                return (Ck::Hold, vec![]);
            }
            let (q2, w, mv) = tm.rule(q, a).expect("δ is total on working states");
            match (mv, xo) {
                (Move::R, _) => {
                    let mut out: Vec<char> = xo.into_iter().collect();
                    out.extend([w, q2]);
                    (Ck::Copy0, out)
                }
                (Move::L, Some(x)) => (Ck::Copy, vec![q2, x, w]),
                (Move::L, None) => (Ck::Copy, vec![q2, w]),
            }
        }
        Ck::Copy0 if tape => (Ck::Copy, vec![a]),
        Ck::Copy0 if hash => (Ck::Cmp, vec![blank]),
        Ck::Copy if tape => (Ck::Copy, vec![a]),
        Ck::Copy if hash => (Ck::Cmp, vec![]),
        Ck::B0 if tape => (Ck::B1(a, false), vec![]),
        Ck::B1(x, _) if tape => (Ck::B1(a, true), vec![x]),
        Ck::B1(h, any) if state => {
            if tm.is_halting(a) {
                return (Ck::Hold, vec![]);
            }
            let (q2, w, mv) = tm.rule(a, h).expect("δ is total on working states");
            match mv {
                Move::R => {
                    let mut out = if any { vec![] } else { vec![blank] };
                    out.extend([q2, w]);
                    (Ck::Copy, out)
                }
                Move::L => (Ck::RL(q2), vec![w]),
            }
        }
        Ck::RL(q2) if tape => (Ck::Copy, vec![a, q2]),
        Ck::RL(q2) if hash => (Ck::Cmp, vec![q2]),
        Ck::Hold if hash => (Ck::Fin, vec![]),
        Ck::Hold => (Ck::Hold, vec![]),
        Ck::Fin | Ck::Viol => (Ck::Viol, vec![]),
        Ck::Cmp => unreachable!("stack-driven"),
        _ => (Ck::Garbage, vec![]),
    }
}

struct ProductBuilder<'a> {
    tm: &'a TuringMachine,
    br: Branch,
    dfa_states: Vec<D>,
    dfa: Dfa,
    b: PdaBuilder,
    gamma: Vec<String>,
    chains: HashMap<(Vec<char>, String), String>,
    seen: HashMap<(Ck, usize), String>,
    queue: VecDeque<(Ck, usize)>,
}

const SINK: &str = "sink";

impl<'a> ProductBuilder<'a> {
    fn node(&mut self, s: Ck, d: usize) -> String {
        if s == Ck::Viol || self.dfa_states[d] == D::Dead {
            return SINK.to_string();
        }
        if let Some(n) = self.seen.get(&(s, d)) {
            return n.clone();
        }
        let name = format!("{}|{}", ck_name(s), d);
        if !self.dfa.is_accepting(d) {
            self.b.accept(&name);
        }
        self.b.state(&name);
        self.seen.insert((s, d), name.clone());
        self.queue.push_back((s, d));
        name
    }

    /// ε-chain pushing `rest` (first element lowest) before entering `to`.
    fn chain(&mut self, rest: &[char], to: &str) -> String {
        if rest.is_empty() {
            return to.to_string();
        }
        let key = (rest.to_vec(), to.to_string());
        if let Some(n) = self.chains.get(&key) {
            return n.clone();
        }
        let name = format!("{to}<{}", rest.iter().collect::<String>());
        self.b.state(&name);
        self.chains.insert(key, name.clone());
        let next = self.chain(&rest[1..], to);
        let sym = rest[0].to_string();
        for y in self.gamma.clone() {
            self.b.add(&name, None, &y, &next, &[&sym, &y]);
        }
        name
    }

    fn emit(&mut self, from: &str, a: char, to: &str, out: &[char]) {
        let gamma = self.gamma.clone();
        if out.is_empty() {
            for x in &gamma {
                self.b.add(from, Some(a), x, to, &[x]);
            }
            return;
        }
        let target = self.chain(&out[1..], to);
        let first = out[0].to_string();
        for x in &gamma {
            self.b.add(from, Some(a), x, &target, &[&first, x]);
        }
    }

    fn build(mut self) -> Pda {
        let alphabet = self.tm.encoding_alphabet();
        let d0 = self.dfa.initial();
        self.node(Ck::Start, d0);
        while let Some((s, d)) = self.queue.pop_front() {
            let from = self.seen[&(s, d)].clone();
            for &a in &alphabet {
                let d2 = self.dfa.step(d, a).expect("letter in alphabet");
                if s == Ck::Cmp {
                    let ok_to = if a == SEPARATOR { self.node(self.br.push_start(), d2) } else { self.node(Ck::Cmp, d2) };
                    let viol = self.node(Ck::Viol, d2);
                    for x in self.gamma.clone() {
                        let matches = if a == SEPARATOR { x == BOTTOM } else { x == a.to_string() };
                        if !matches {
                            self.b.add(&from, Some(a), &x, &viol, &[&x]);
                        } else if a == SEPARATOR {
                            self.b.add(&from, Some(a), &x, &ok_to, &[&x]);
                        } else {
                            self.b.add(&from, Some(a), &x, &ok_to, &[]);
                        }
                    }
                    continue;
                }
                let (s2, out) = ck_step(self.tm, self.br, s, a);
                let to = self.node(s2, d2);
                self.emit(&from, a, &to, &out);
            }
        }
        // the sink reads everything
        for &a in &alphabet {
            for x in self.gamma.clone() {
                self.b.add(SINK, Some(a), &x, SINK, &[&x]);
            }
        }
        self.b.build()
    }
}

fn check_encoding(tm: &TuringMachine) -> Result<(), ConstructionError> {
    if tm.tape_alphabet().contains(&SEPARATOR) || tm.states().contains(&SEPARATOR) {
        return Err(ConstructionError::EncodingOverflow(format!("`{SEPARATOR}` is a machine symbol")));
    }
    if tm.encoding_alphabet().iter().any(|c| c.to_string() == BOTTOM) {
        return Err(ConstructionError::EncodingOverflow(format!("`{BOTTOM}` is a machine symbol")));
    }
    Ok(())
}

fn branch(tm: &TuringMachine, br: Branch) -> Pda {
    let (dfa_states, dfa) = regular_dfa_states(tm);
    let start = format!("{}|{}", ck_name(Ck::Start), dfa.initial());
    let mut b = PdaBuilder::new(&tm.encoding_alphabet(), &start, BOTTOM);
    let mut gamma = vec![BOTTOM.to_string()];
    for c in tm.tape_alphabet().iter().chain(tm.states()) {
        gamma.push(c.to_string());
        b.symbol(&c.to_string());
    }
    b.accept(SINK);
    let pb = ProductBuilder {
        tm,
        br,
        dfa_states,
        dfa,
        b,
        gamma,
        chains: HashMap::new(),
        seen: HashMap::new(),
        queue: VecDeque::new(),
    };
    pb.build()
}

/// The two deterministic branches, successor checks on even→odd and on
/// odd→even pairs.
pub fn invalc_branches(tm: &TuringMachine) -> Result<(Pda, Pda), ConstructionError> {
    check_encoding(tm)?;
    Ok((branch(tm, Branch::B), branch(tm, Branch::C)))
}

/// Union of the two branches behind an initial ε-choice.
pub fn invalc_pda(tm: &TuringMachine) -> Result<Pda, ConstructionError> {
    let (pb, pc) = invalc_branches(tm)?;
    let mut states = vec!["choose".to_string()];
    let mut accepting = BTreeSet::new();
    let mut transitions = Vec::new();
    let symbols = pb.stack_alphabet().to_vec();
    debug_assert_eq!(symbols, pc.stack_alphabet());
    let bottom = pb.initial_stack_symbol();
    for (tag, p) in [("b", &pb), ("c", &pc)] {
        let off = states.len();
        states.extend(p.states().iter().map(|s| format!("{tag}.{s}")));
        accepting.extend(p.accepting().iter().map(|f| f + off));
        transitions.push(Transition { from: 0, input: None, pop: bottom, to: p.initial_state() + off, push: vec![bottom] });
        transitions.extend(p.transitions().iter().map(|t| Transition {
            from: t.from + off,
            input: t.input,
            pop: t.pop,
            to: t.to + off,
            push: t.push.clone(),
        }));
    }
    Ok(Pda::from_parts(states, pb.input_alphabet().to_vec(), symbols, 0, bottom, accepting, transitions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::{demo_tm, invalc_oracle, valc_string};

    #[test]
    fn regular_dfa_accepts_valid_computations() {
        let tm = demo_tm();
        let dfa = invalc_regular_dfa(&tm);
        for x in ["", "1"] {
            let s = valc_string(&tm, &x.chars().collect::<Vec<_>>(), 20).unwrap();
            assert!(dfa.accepts(&s.chars().collect::<Vec<_>>()), "{s}");
        }
        assert!(!dfa.accepts(&['#']));
    }

    #[test]
    fn branches_are_deterministic() {
        let (b, c) = invalc_branches(&demo_tm()).unwrap();
        for p in [&b, &c] {
            let r = p.validate();
            assert!(r.is_well_formed(), "{:?}", r.violations);
            assert!(r.deterministic);
        }
    }

    #[test]
    fn valc_strings_rejected_mutants_accepted() {
        let tm = demo_tm();
        let p = invalc_pda(&tm).unwrap();
        let s = valc_string(&tm, &[], 20).unwrap();
        let w: Vec<char> = s.chars().collect();
        assert!(!crate::grammar::exact_accepts(&p, &w));
        let mut m = w.clone();
        m[2] = '1';
        assert!(invalc_oracle(&tm, &m.iter().collect::<String>()));
        assert!(crate::grammar::exact_accepts(&p, &m));
        assert!(crate::grammar::exact_accepts(&p, &['#']));
    }
}
