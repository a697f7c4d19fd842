//! Complete deterministic finite automata and the PDA × DFA product.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{ConstructionError, FormatError};
use crate::pda::{Pda, Transition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    states: Vec<String>,
    alphabet: Vec<char>,
    initial: usize,
    accepting: BTreeSet<usize>,
    // delta[state][letter index]
    delta: Vec<Vec<usize>>,
}

impl Dfa {
    /// `delta[q][i]` is the successor of `q` on `alphabet[i]`.
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<char>,
        initial: usize,
        accepting: BTreeSet<usize>,
        delta: Vec<Vec<usize>>,
    ) -> Result<Dfa, FormatError> {
        let n = states.len();
        if initial >= n {
            return Err(FormatError::invalid("initial state out of range"));
        }
        if accepting.iter().any(|&f| f >= n) {
            return Err(FormatError::invalid("accepting state out of range"));
        }
        if delta.len() != n || delta.iter().any(|row| row.len() != alphabet.len() || row.iter().any(|&t| t >= n)) {
            return Err(FormatError::invalid("transition map is not total"));
        }
        Ok(Dfa { states, alphabet, initial, accepting, delta })
    }

    /// One state, accepting everything.
    pub fn universal(alphabet: &[char]) -> Dfa {
        Dfa::new(vec!["all".into()], alphabet.to_vec(), 0, BTreeSet::from([0]), vec![vec![0; alphabet.len()]])
            .expect("well-formed")
    }

    /// One state, accepting nothing.
    pub fn empty(alphabet: &[char]) -> Dfa {
        Dfa::new(vec!["none".into()], alphabet.to_vec(), 0, BTreeSet::new(), vec![vec![0; alphabet.len()]])
            .expect("well-formed")
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn step(&self, q: usize, a: char) -> Option<usize> {
        let i = self.alphabet.iter().position(|&x| x == a)?;
        Some(self.delta[q][i])
    }

    pub fn accepts(&self, word: &[char]) -> bool {
        let mut q = self.initial;
        for &a in word {
            match self.step(q, a) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.is_accepting(q)
    }

    pub fn to_doc(&self) -> DfaDoc {
        let mut transitions = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (i, &t) in row.iter().enumerate() {
                transitions.push(DfaTransitionDoc {
                    from: self.states[q].clone(),
                    input: self.alphabet[i].to_string(),
                    to: self.states[t].clone(),
                });
            }
        }
        DfaDoc {
            states: self.states.clone(),
            input_alphabet: self.alphabet.iter().map(|c| c.to_string()).collect(),
            initial_state: self.states[self.initial].clone(),
            accepting: self.accepting.iter().map(|&f| self.states[f].clone()).collect(),
            transitions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("DFA documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Dfa, FormatError> {
        let doc: DfaDoc = serde_json::from_str(text).map_err(FormatError::from_json)?;
        let state = |s: &str| {
            doc.states.iter().position(|x| x == s).ok_or_else(|| FormatError::invalid(format!("unknown state `{s}`")))
        };
        let mut alphabet = Vec::new();
        for s in &doc.input_alphabet {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => alphabet.push(c),
                _ => return Err(FormatError::invalid(format!("letter `{s}` must be a single character"))),
            }
        }
        let mut delta = vec![vec![usize::MAX; alphabet.len()]; doc.states.len()];
        for t in &doc.transitions {
            let i = alphabet
                .iter()
                .position(|c| t.input.chars().eq(std::iter::once(*c)))
                .ok_or_else(|| FormatError::invalid(format!("letter `{}` not in the alphabet", t.input)))?;
            delta[state(&t.from)?][i] = state(&t.to)?;
        }
        let accepting = doc.accepting.iter().map(|f| state(f)).collect::<Result<_, _>>()?;
        Dfa::new(doc.states.clone(), alphabet, state(&doc.initial_state)?, accepting, delta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaTransitionDoc {
    pub from: String,
    pub input: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaDoc {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub initial_state: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<DfaTransitionDoc>,
}

fn same_alphabet(pda: &Pda, dfa: &Dfa) -> bool {
    let a: BTreeSet<char> = pda.input_alphabet().iter().copied().collect();
    let b: BTreeSet<char> = dfa.alphabet().iter().copied().collect();
    a == b
}

/// Full product: every pair `(q, d)` becomes a state named `q|d`.
pub fn product_with_dfa(pda: &Pda, dfa: &Dfa) -> Result<Pda, ConstructionError> {
    product(pda, dfa, false)
}

/// Product restricted to pairs reachable in the control graph (stack ignored).
/// Recognizes the same language with fewer states.
pub fn product_with_dfa_trimmed(pda: &Pda, dfa: &Dfa) -> Result<Pda, ConstructionError> {
    product(pda, dfa, true)
}

fn product(pda: &Pda, dfa: &Dfa, trim: bool) -> Result<Pda, ConstructionError> {
    if !same_alphabet(pda, dfa) {
        return Err(ConstructionError::AlphabetMismatch);
    }
    let nd = dfa.states().len();
    let pair = |q: usize, d: usize| q * nd + d;
    let nq = pda.states().len();

    let mut keep = vec![!trim; nq * nd];
    if trim {
        let start = pair(pda.initial_state(), dfa.initial());
        keep[start] = true;
        let mut queue = VecDeque::from([(pda.initial_state(), dfa.initial())]);
        while let Some((q, d)) = queue.pop_front() {
            for t in pda.transitions().iter().filter(|t| t.from == q) {
                let d2 = match t.input {
                    None => d,
                    Some(a) => dfa.step(d, a).expect("alphabets match"),
                };
                if !keep[pair(t.to, d2)] {
                    keep[pair(t.to, d2)] = true;
                    queue.push_back((t.to, d2));
                }
            }
        }
    }
    let mut ids = vec![usize::MAX; nq * nd];
    let mut states = Vec::new();
    for q in 0..nq {
        for d in 0..nd {
            if keep[pair(q, d)] {
                ids[pair(q, d)] = states.len();
                states.push(format!("{}|{}", pda.state_name(q), dfa.states()[d]));
            }
        }
    }
    let mut accepting = BTreeSet::new();
    for &f in pda.accepting() {
        for d in 0..nd {
            if dfa.is_accepting(d) && keep[pair(f, d)] {
                accepting.insert(ids[pair(f, d)]);
            }
        }
    }
    let mut transitions = Vec::new();
    for t in pda.transitions() {
        for d in 0..nd {
            if !keep[pair(t.from, d)] {
                continue;
            }
            let d2 = match t.input {
                None => d,
                Some(a) => dfa.step(d, a).expect("alphabets match"),
            };
            transitions.push(Transition {
                from: ids[pair(t.from, d)],
                input: t.input,
                pop: t.pop,
                to: ids[pair(t.to, d2)],
                push: t.push.clone(),
            });
        }
    }
    Ok(Pda::from_parts(
        states,
        pda.input_alphabet().to_vec(),
        pda.stack_alphabet().to_vec(),
        ids[pair(pda.initial_state(), dfa.initial())],
        pda.initial_stack_symbol(),
        accepting,
        transitions,
    ))
}

/// DFA over `{a, #, b}` for `(a*#)^{k+1} b*`.
pub fn block_regular_dfa(k: usize) -> Dfa {
    // states 0..=k+1 count completed blocks; k+2 is the b-tail; k+3 is the sink
    let alphabet = vec!['a', '#', 'b'];
    let tail = k + 2;
    let sink = k + 3;
    let mut states: Vec<String> = (0..=k + 1).map(|i| format!("blocks{i}")).collect();
    states.push("tail".into());
    states.push("sink".into());
    let mut delta = Vec::new();
    for i in 0..=k + 1 {
        let on_hash = if i <= k { i + 1 } else { sink };
        let on_a = if i <= k { i } else { sink };
        let on_b = if i == k + 1 { tail } else { sink };
        delta.push(vec![on_a, on_hash, on_b]);
    }
    delta.push(vec![sink, sink, tail]);
    delta.push(vec![sink, sink, sink]);
    Dfa::new(states, alphabet, 0, BTreeSet::from([k + 1, tail]), delta).expect("well-formed")
}
