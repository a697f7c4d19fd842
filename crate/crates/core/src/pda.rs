//! Pushdown automata: data model, validation, size, and the JSON file format.
//!
//! States, letters and stack symbols are interned; transitions refer to them
//! by index. A stack word is written top-first: `push = [X, Y]` leaves `X` on
//! top of `Y`. Internally a [`Configuration`] keeps its stack bottom-first so
//! pushes and pops happen at the end of the vector.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;

pub type StateId = usize;
pub type SymbolId = usize;

/// One element of the transition relation. `input == None` is an ε-move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub input: Option<char>,
    pub pop: SymbolId,
    pub to: StateId,
    /// Pushed word, top-first.
    pub push: Vec<SymbolId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pda {
    states: Vec<String>,
    input_alphabet: Vec<char>,
    stack_alphabet: Vec<String>,
    initial_state: StateId,
    initial_stack: SymbolId,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Transition>,
    // transitions enabled at each mode, indexed by state * |Γ| + symbol
    by_mode: Vec<Vec<usize>>,
}

/// `(state, top-of-stack)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub state: StateId,
    pub top: SymbolId,
}

/// A mode together with the input position modulo a period `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedMode {
    pub mode: Mode,
    pub residue: usize,
}

impl IndexedMode {
    pub fn new(mode: Mode, position: usize, period: usize) -> Self {
        assert!(period > 0, "period must be positive");
        IndexedMode { mode, residue: position % period }
    }
}

/// A control state plus stack contents. The stack is stored bottom-first;
/// an empty stack is the exhausted configuration, which enables nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub stack: Vec<SymbolId>,
}

impl Configuration {
    pub fn top(&self) -> Option<SymbolId> {
        self.stack.last().copied()
    }

    pub fn mode(&self) -> Option<Mode> {
        self.top().map(|top| Mode { state: self.state, top })
    }

    pub fn is_exhausted(&self) -> bool {
        self.stack.is_empty()
    }

    /// Stack height `|γ| - 1`; the exhausted configuration has height -1.
    pub fn height(&self) -> isize {
        self.stack.len() as isize - 1
    }

    /// The stack word, top-first.
    pub fn stack_word(&self) -> Vec<SymbolId> {
        self.stack.iter().rev().copied().collect()
    }

    /// Applies `t` assuming it is enabled.
    pub fn apply(&self, t: &Transition) -> Configuration {
        let mut stack = self.stack.clone();
        stack.pop();
        stack.extend(t.push.iter().rev());
        Configuration { state: t.to, stack }
    }

    pub fn enables(&self, t: &Transition) -> bool {
        self.state == t.from && self.top() == Some(t.pop)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub deterministic: bool,
    pub epsilon_free: bool,
}

impl ValidationReport {
    pub fn is_well_formed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Pda {
    /// Assembles a PDA from its parts. Never fails: malformed input is
    /// reported by [`Pda::validate`] and invalid transitions are left out
    /// of the mode index.
    pub fn from_parts(
        states: Vec<String>,
        input_alphabet: Vec<char>,
        stack_alphabet: Vec<String>,
        initial_state: StateId,
        initial_stack: SymbolId,
        accepting: BTreeSet<StateId>,
        transitions: Vec<Transition>,
    ) -> Pda {
        let mut pda = Pda {
            states,
            input_alphabet,
            stack_alphabet,
            initial_state,
            initial_stack,
            accepting,
            transitions,
            by_mode: Vec::new(),
        };
        pda.reindex();
        pda
    }

    fn reindex(&mut self) {
        let width = self.stack_alphabet.len();
        let mut by_mode = vec![Vec::new(); self.states.len() * width];
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from < self.states.len() && t.pop < width && t.to < self.states.len() {
                by_mode[t.from * width + t.pop].push(i);
            }
        }
        self.by_mode = by_mode;
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn input_alphabet(&self) -> &[char] {
        &self.input_alphabet
    }
    pub fn stack_alphabet(&self) -> &[String] {
        &self.stack_alphabet
    }
    pub fn initial_state(&self) -> StateId {
        self.initial_state
    }
    pub fn initial_stack_symbol(&self) -> SymbolId {
        self.initial_stack
    }
    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }
    pub fn transition(&self, id: usize) -> &Transition {
        &self.transitions[id]
    }
    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting.contains(&state)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }
    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.stack_alphabet.iter().position(|s| s == name)
    }
    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id]
    }
    pub fn symbol_name(&self, id: SymbolId) -> &str {
        &self.stack_alphabet[id]
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration { state: self.initial_state, stack: vec![self.initial_stack] }
    }

    /// Transition ids enabled at a mode, in declaration order.
    pub fn enabled_at(&self, mode: Mode) -> &[usize] {
        let width = self.stack_alphabet.len();
        if mode.state >= self.states.len() || mode.top >= width {
            return &[];
        }
        &self.by_mode[mode.state * width + mode.top]
    }

    pub fn enabled(&self, c: &Configuration) -> &[usize] {
        match c.mode() {
            Some(m) => self.enabled_at(m),
            None => &[],
        }
    }

    /// `|Q| · |Γ|`, counting every declared stack symbol including the bottom.
    pub fn size(&self) -> usize {
        self.states.len() * self.stack_alphabet.len()
    }

    pub fn is_epsilon_free(&self) -> bool {
        self.transitions.iter().all(|t| t.input.is_some())
    }

    /// Maximum number of transitions enabled at a single (mode, letter) pair.
    pub fn max_out_degree(&self) -> usize {
        let mut counts: HashMap<(StateId, SymbolId, Option<char>), usize> = HashMap::new();
        for t in &self.transitions {
            *counts.entry((t.from, t.pop, t.input)).or_default() += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    /// Whether mode `m` satisfies the determinism condition: at most one
    /// transition per letter (or ε), and no letter moves beside an ε-move.
    pub fn mode_is_deterministic(&self, m: Mode) -> bool {
        let ids = self.enabled_at(m);
        let mut seen: BTreeSet<Option<char>> = BTreeSet::new();
        for &id in ids {
            if !seen.insert(self.transitions[id].input) {
                return false;
            }
        }
        !(seen.contains(&None) && seen.len() > 1)
    }

    pub fn is_deterministic(&self) -> bool {
        (0..self.states.len())
            .all(|q| (0..self.stack_alphabet.len()).all(|x| self.mode_is_deterministic(Mode { state: q, top: x })))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let nq = self.states.len();
        let ng = self.stack_alphabet.len();
        if self.initial_state >= nq {
            violations.push("initial state is not a declared state".to_string());
        }
        if self.initial_stack >= ng {
            violations.push("initial stack symbol is not in the stack alphabet".to_string());
        }
        for &f in &self.accepting {
            if f >= nq {
                violations.push(format!("accepting state #{f} is not a declared state"));
            }
        }
        let mut names = BTreeSet::new();
        for s in &self.states {
            if !names.insert(s) {
                violations.push(format!("duplicate state `{s}`"));
            }
        }
        let mut syms = BTreeSet::new();
        for s in &self.stack_alphabet {
            if !syms.insert(s) {
                violations.push(format!("duplicate stack symbol `{s}`"));
            }
        }
        let mut letters = BTreeSet::new();
        for &a in &self.input_alphabet {
            if !letters.insert(a) {
                violations.push(format!("duplicate letter `{a}`"));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from >= nq || t.to >= nq {
                violations.push(format!("transition {i}: undeclared state"));
            }
            if t.pop >= ng || t.push.iter().any(|&x| x >= ng) {
                violations.push(format!("transition {i}: undeclared stack symbol"));
            }
            if let Some(a) = t.input {
                if !letters.contains(&a) {
                    violations.push(format!("transition {i}: letter `{a}` not in the input alphabet"));
                }
            }
            if t.push.len() > 2 {
                violations.push(format!("transition {i}: push length > 2"));
            }
        }
        ValidationReport {
            violations,
            deterministic: self.is_deterministic(),
            epsilon_free: self.is_epsilon_free(),
        }
    }

    pub fn format_configuration(&self, c: &Configuration) -> String {
        let stack: Vec<&str> = c.stack_word().into_iter().map(|x| self.symbol_name(x)).collect();
        format!("({}, {})", self.state_name(c.state), stack.join(" "))
    }

    pub fn format_transition(&self, t: &Transition) -> String {
        let push: Vec<&str> = t.push.iter().map(|&x| self.symbol_name(x)).collect();
        format!(
            "{} -{},{}/{}-> {}",
            self.state_name(t.from),
            t.input.map(String::from).unwrap_or_else(|| "ε".to_string()),
            self.symbol_name(t.pop),
            push.join(""),
            self.state_name(t.to)
        )
    }

    pub fn to_doc(&self) -> PdaDoc {
        PdaDoc {
            states: self.states.clone(),
            input_alphabet: self.input_alphabet.iter().map(|c| c.to_string()).collect(),
            stack_alphabet: self.stack_alphabet.clone(),
            initial_state: self.states.get(self.initial_state).cloned().unwrap_or_default(),
            initial_stack_symbol: self.stack_alphabet.get(self.initial_stack).cloned().unwrap_or_default(),
            accepting: self.accepting.iter().map(|&f| self.states[f].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: self.states[t.from].clone(),
                    input: t.input.map(String::from),
                    pop: self.stack_alphabet[t.pop].clone(),
                    to: self.states[t.to].clone(),
                    push: t.push.iter().map(|&x| self.stack_alphabet[x].clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("PDA documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Pda, FormatError> {
        let doc: PdaDoc = serde_json::from_str(text).map_err(FormatError::from_json)?;
        Pda::from_doc(&doc)
    }

    pub fn from_doc(doc: &PdaDoc) -> Result<Pda, FormatError> {
        let letter = |s: &str| -> Result<char, FormatError> {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(FormatError::invalid(format!("letter `{s}` must be a single character"))),
            }
        };
        let state = |s: &str| {
            doc.states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| FormatError::invalid(format!("unknown state `{s}`")))
        };
        let symbol = |s: &str| {
            doc.stack_alphabet
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| FormatError::invalid(format!("unknown stack symbol `{s}`")))
        };
        let input_alphabet = doc.input_alphabet.iter().map(|s| letter(s)).collect::<Result<Vec<_>, _>>()?;
        let mut accepting = BTreeSet::new();
        for f in &doc.accepting {
            accepting.insert(state(f)?);
        }
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for t in &doc.transitions {
            transitions.push(Transition {
                from: state(&t.from)?,
                input: t.input.as_deref().map(letter).transpose()?,
                pop: symbol(&t.pop)?,
                to: state(&t.to)?,
                push: t.push.iter().map(|s| symbol(s)).collect::<Result<_, _>>()?,
            });
        }
        Ok(Pda::from_parts(
            doc.states.clone(),
            input_alphabet,
            doc.stack_alphabet.clone(),
            state(&doc.initial_state)?,
            symbol(&doc.initial_stack_symbol)?,
            accepting,
            transitions,
        ))
    }
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PDA with {} states, {} stack symbols", self.states.len(), self.stack_alphabet.len())?;
        for t in &self.transitions {
            writeln!(f, "  {}", self.format_transition(t))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: String,
    pub input: Option<String>,
    pub pop: String,
    pub to: String,
    pub push: Vec<String>,
}

/// On-disk PDA document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdaDoc {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub stack_alphabet: Vec<String>,
    pub initial_state: String,
    pub initial_stack_symbol: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
}

/// Name-based incremental construction. States and stack symbols are
/// created on first mention; pushes longer than two symbols are compiled
/// into ε-chains through fresh states.
#[derive(Clone, Debug)]
pub struct PdaBuilder {
    states: Vec<String>,
    state_ix: HashMap<String, StateId>,
    symbols: Vec<String>,
    symbol_ix: HashMap<String, SymbolId>,
    alphabet: Vec<char>,
    initial_state: StateId,
    initial_stack: SymbolId,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Transition>,
    fresh: usize,
}

impl PdaBuilder {
    pub fn new(alphabet: &[char], initial_state: &str, initial_stack: &str) -> Self {
        let mut b = PdaBuilder {
            states: Vec::new(),
            state_ix: HashMap::new(),
            symbols: Vec::new(),
            symbol_ix: HashMap::new(),
            alphabet: alphabet.to_vec(),
            initial_state: 0,
            initial_stack: 0,
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
            fresh: 0,
        };
        b.initial_state = b.state(initial_state);
        b.initial_stack = b.symbol(initial_stack);
        b
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.state_ix.get(name) {
            return id;
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.state_ix.insert(name.to_string(), id);
        id
    }

    pub fn symbol(&mut self, name: &str) -> SymbolId {
        if let Some(&id) = self.symbol_ix.get(name) {
            return id;
        }
        let id = self.symbols.len();
        self.symbols.push(name.to_string());
        self.symbol_ix.insert(name.to_string(), id);
        id
    }

    pub fn symbols(&self) -> Vec<String> {
        self.symbols.clone()
    }

    pub fn accept(&mut self, state: &str) -> &mut Self {
        let id = self.state(state);
        self.accepting.insert(id);
        self
    }

    /// Adds `from --input, pop / push--> to`; `push` is top-first.
    pub fn add(&mut self, from: &str, input: Option<char>, pop: &str, to: &str, push: &[&str]) -> &mut Self {
        let from = self.state(from);
        let to = self.state(to);
        let pop = self.symbol(pop);
        let push: Vec<SymbolId> = push.iter().map(|s| self.symbol(s)).collect();
        self.add_ids(from, input, pop, to, push);
        self
    }

    /// Index-level variant of [`PdaBuilder::add`], with push words of any
    /// length compiled into ε-chains.
    pub fn add_ids(&mut self, from: StateId, input: Option<char>, pop: SymbolId, to: StateId, push: Vec<SymbolId>) {
        if push.len() <= 2 {
            self.transitions.push(Transition { from, input, pop, to, push });
            return;
        }
        // Push the bottom part first: the first step replaces `pop` by the
        // two lowest new symbols, each chain step adds one more on top.
        let n = push.len();
        let mut cur_from = from;
        let mut cur_input = input;
        let mut cur_pop = pop;
        let mut cur_push = vec![push[n - 2], push[n - 1]];
        for k in (0..n - 2).rev() {
            let mid = self.fresh_state("push");
            self.transitions.push(Transition { from: cur_from, input: cur_input, pop: cur_pop, to: mid, push: cur_push });
            cur_from = mid;
            cur_input = None;
            cur_pop = push[k + 1];
            cur_push = vec![push[k], push[k + 1]];
        }
        self.transitions.push(Transition { from: cur_from, input: cur_input, pop: cur_pop, to, push: cur_push });
    }

    pub fn fresh_state(&mut self, hint: &str) -> StateId {
        loop {
            let name = format!("{hint}#{}", self.fresh);
            self.fresh += 1;
            if !self.state_ix.contains_key(&name) {
                return self.state(&name);
            }
        }
    }

    pub fn build(self) -> Pda {
        Pda::from_parts(
            self.states,
            self.alphabet,
            self.symbols,
            self.initial_state,
            self.initial_stack,
            self.accepting,
            self.transitions,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> Pda {
        let mut b = PdaBuilder::new(&['a', 'b'], "q0", "Z");
        b.accept("q0").accept("acc");
        b.add("q0", Some('a'), "Z", "q0", &["X", "Z"]);
        b.add("q0", Some('a'), "X", "q0", &["X", "X"]);
        b.add("q0", Some('b'), "X", "p", &[]);
        b.add("p", Some('b'), "X", "p", &[]);
        b.add("p", None, "Z", "acc", &["Z"]);
        b.build()
    }

    #[test]
    fn well_formed_deterministic() {
        let r = d1().validate();
        assert!(r.is_well_formed(), "{:?}", r.violations);
        assert!(r.deterministic);
        assert!(!r.epsilon_free);
    }

    #[test]
    fn push_length_three_is_reported() {
        let mut pda = d1();
        let z = pda.symbol_id("Z").unwrap();
        pda.transitions.push(Transition { from: 0, input: Some('a'), pop: z, to: 0, push: vec![z, z, z] });
        pda.reindex();
        let r = pda.validate();
        assert!(r.violations.iter().any(|v| v.contains("push length > 2")));
    }

    #[test]
    fn epsilon_beside_letter_is_nondeterministic() {
        let mut b = PdaBuilder::new(&['a'], "q", "Z");
        b.add("q", None, "Z", "q", &["Z"]);
        b.add("q", Some('a'), "Z", "q", &["Z"]);
        assert!(!b.build().validate().deterministic);
    }

    #[test]
    fn size_is_states_times_symbols() {
        let mut b = PdaBuilder::new(&['a'], "q0", "Z");
        b.add("q0", Some('a'), "Z", "q1", &["Y"]);
        b.state("q2");
        let pda = b.build();
        assert_eq!(pda.size(), 6);
    }

    #[test]
    fn long_push_is_compiled_to_chain() {
        let mut b = PdaBuilder::new(&['a'], "q", "Z");
        b.add("q", Some('a'), "Z", "r", &["A", "B", "C", "Z"]);
        let pda = b.build();
        assert!(pda.validate().is_well_formed());
        let mut c = pda.initial_configuration();
        let mut steps = 0;
        while let Some(&id) = pda.enabled(&c).first() {
            c = c.apply(pda.transition(id));
            steps += 1;
            if pda.state_name(c.state) == "r" {
                break;
            }
        }
        assert_eq!(steps, 3);
        let word: Vec<&str> = c.stack_word().into_iter().map(|x| pda.symbol_name(x)).collect();
        assert_eq!(word, ["A", "B", "C", "Z"]);
    }

    #[test]
    fn json_round_trip() {
        let pda = d1();
        let text = pda.to_json();
        let back = Pda::from_json(&text).unwrap();
        assert_eq!(back, pda);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_unknown_state_is_an_error() {
        let text = r#"{"states":["q"],"input_alphabet":["a"],"stack_alphabet":["Z"],
            "initial_state":"q","initial_stack_symbol":"Z","accepting":["r"],"transitions":[]}"#;
        assert!(Pda::from_json(text).is_err());
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = Pda::from_json("{\n  \"states\": [").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn indexed_mode_residue() {
        let m = Mode { state: 1, top: 0 };
        assert_eq!(IndexedMode::new(m, 7, 3).residue, 1);
    }
}
