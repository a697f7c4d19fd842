//! Exact membership: final-state PDA → empty-stack PDA → triple grammar →
//! Chomsky normal form → CYK.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::OracleError;
use crate::pda::{Pda, StateId, SymbolId, Transition};

/// Default cap on the number of grammar nonterminals.
pub const DEFAULT_NONTERMINAL_CAP: usize = 2_000_000;

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.iter().any(|s| s == &name) {
        name.push('\'');
    }
    name
}

/// Converts acceptance by final state into acceptance by empty stack.
pub fn to_empty_stack(pda: &Pda) -> Pda {
    let mut states = pda.states().to_vec();
    let mut symbols = pda.stack_alphabet().to_vec();
    let start_name = fresh_name(&states, "<start>");
    states.push(start_name);
    let drain_name = fresh_name(&states, "<drain>");
    states.push(drain_name);
    let bottom_name = fresh_name(&symbols, "<bottom>");
    symbols.push(bottom_name);
    let start = states.len() - 2;
    let drain = states.len() - 1;
    let bottom = symbols.len() - 1;

    let mut transitions = pda.transitions().to_vec();
    transitions.push(Transition {
        from: start,
        input: None,
        pop: bottom,
        to: pda.initial_state(),
        push: vec![pda.initial_stack_symbol(), bottom],
    });
    for &f in pda.accepting() {
        for x in 0..symbols.len() {
            transitions.push(Transition { from: f, input: None, pop: x, to: drain, push: vec![] });
        }
    }
    for x in 0..symbols.len() {
        transitions.push(Transition { from: drain, input: None, pop: x, to: drain, push: vec![] });
    }
    Pda::from_parts(
        states,
        pda.input_alphabet().to_vec(),
        symbols,
        start,
        bottom,
        BTreeSet::new(),
        transitions,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(char),
    N(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub head: usize,
    pub body: Vec<Symbol>,
}

#[derive(Clone, Debug)]
pub struct Grammar {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<char>,
    pub start: usize,
    pub productions: Vec<Production>,
}

impl Grammar {
    /// Line-based dump, one `Head -> s1 s2` per production.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.productions {
            let body: Vec<String> = p
                .body
                .iter()
                .map(|s| match s {
                    Symbol::T(c) => format!("'{c}'"),
                    Symbol::N(n) => self.nonterminals[*n].clone(),
                })
                .collect();
            let body = if body.is_empty() { "ε".to_string() } else { body.join(" ") };
            let _ = writeln!(out, "{} -> {}", self.nonterminals[p.head], body);
        }
        out
    }

    /// Keeps only productive nonterminals reachable from the start symbol.
    /// Nonterminals are renumbered; the start symbol stays (possibly with no
    /// productions).
    pub fn remove_useless(&self) -> Grammar {
        let n = self.nonterminals.len();
        let mut productive = vec![false; n];
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !productive[p.head]
                    && p.body.iter().all(|s| match s {
                        Symbol::T(_) => true,
                        Symbol::N(x) => productive[*x],
                    })
                {
                    productive[p.head] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let useful: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| productive[p.head] && p.body.iter().all(|s| !matches!(s, Symbol::N(x) if !productive[*x])))
            .collect();
        let mut by_head: Vec<Vec<&Production>> = vec![Vec::new(); n];
        for p in &useful {
            by_head[p.head].push(p);
        }
        let mut reach = vec![false; n];
        reach[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(a) = queue.pop_front() {
            for p in &by_head[a] {
                for s in &p.body {
                    if let Symbol::N(x) = s {
                        if !reach[*x] {
                            reach[*x] = true;
                            queue.push_back(*x);
                        }
                    }
                }
            }
        }
        let mut ids = vec![usize::MAX; n];
        let mut names = Vec::new();
        for a in 0..n {
            if reach[a] {
                ids[a] = names.len();
                names.push(self.nonterminals[a].clone());
            }
        }
        let productions = useful
            .into_iter()
            .filter(|p| reach[p.head])
            .map(|p| Production {
                head: ids[p.head],
                body: p
                    .body
                    .iter()
                    .map(|s| match s {
                        Symbol::N(x) => Symbol::N(ids[*x]),
                        t => *t,
                    })
                    .collect(),
            })
            .collect();
        Grammar { nonterminals: names, terminals: self.terminals.clone(), start: ids[self.start], productions }
    }
}

/// Triple construction for a PDA that accepts by empty stack. Only
/// productive triples `[p X q]` are materialized.
pub fn to_cfg(pda: &Pda) -> Result<Grammar, OracleError> {
    to_cfg_capped(pda, DEFAULT_NONTERMINAL_CAP)
}

pub fn to_cfg_capped(pda: &Pda, cap: usize) -> Result<Grammar, OracleError> {
    type Triple = (StateId, SymbolId, StateId);
    let ts = pda.transitions();
    let mut by_target1: HashMap<(StateId, SymbolId), Vec<usize>> = HashMap::new();
    let mut by_first: HashMap<(StateId, SymbolId), Vec<usize>> = HashMap::new();
    let mut by_second: HashMap<SymbolId, Vec<usize>> = HashMap::new();
    for (i, t) in ts.iter().enumerate() {
        match t.push.len() {
            1 => by_target1.entry((t.to, t.push[0])).or_default().push(i),
            2 => {
                by_first.entry((t.to, t.push[0])).or_default().push(i);
                by_second.entry(t.push[1]).or_default().push(i);
            }
            _ => {}
        }
    }

    let mut index: HashMap<Triple, usize> = HashMap::new();
    let mut triples: Vec<Triple> = Vec::new();
    let mut ends: HashMap<(StateId, SymbolId), Vec<StateId>> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    // (head triple, letter, body triples)
    let mut raw: HashSet<(usize, Option<char>, Vec<usize>)> = HashSet::new();

    let add = |tr: Triple,
                   index: &mut HashMap<Triple, usize>,
                   triples: &mut Vec<Triple>,
                   ends: &mut HashMap<(StateId, SymbolId), Vec<StateId>>,
                   queue: &mut VecDeque<usize>|
     -> Result<usize, OracleError> {
        if let Some(&i) = index.get(&tr) {
            return Ok(i);
        }
        if triples.len() + 1 >= cap {
            return Err(OracleError::GrammarTooLarge { cap, reached: triples.len() + 1 });
        }
        let i = triples.len();
        triples.push(tr);
        index.insert(tr, i);
        ends.entry((tr.0, tr.1)).or_default().push(tr.2);
        queue.push_back(i);
        Ok(i)
    };

    for t in ts.iter().filter(|t| t.push.is_empty()) {
        let h = add((t.from, t.pop, t.to), &mut index, &mut triples, &mut ends, &mut queue)?;
        raw.insert((h, t.input, vec![]));
    }
    while let Some(i) = queue.pop_front() {
        let (r, y, q) = triples[i];
        if let Some(list) = by_target1.get(&(r, y)) {
            for &ti in list {
                let t = &ts[ti];
                let h = add((t.from, t.pop, q), &mut index, &mut triples, &mut ends, &mut queue)?;
                raw.insert((h, t.input, vec![i]));
            }
        }
        if let Some(list) = by_first.get(&(r, y)) {
            for &ti in list {
                let t = &ts[ti];
                let seconds: Vec<StateId> = ends.get(&(q, t.push[1])).cloned().unwrap_or_default();
                for q2 in seconds {
                    let second = index[&(q, t.push[1], q2)];
                    let h = add((t.from, t.pop, q2), &mut index, &mut triples, &mut ends, &mut queue)?;
                    raw.insert((h, t.input, vec![i, second]));
                }
            }
        }
        if let Some(list) = by_second.get(&y) {
            for &ti in list {
                let t = &ts[ti];
                if let Some(&first) = index.get(&(t.to, t.push[0], r)) {
                    let h = add((t.from, t.pop, q), &mut index, &mut triples, &mut ends, &mut queue)?;
                    raw.insert((h, t.input, vec![first, i]));
                }
            }
        }
    }

    let mut nonterminals = vec!["S".to_string()];
    for &(p, x, q) in &triples {
        nonterminals.push(format!("[{} {} {}]", pda.state_name(p), pda.symbol_name(x), pda.state_name(q)));
    }
    let mut productions: Vec<Production> = raw
        .into_iter()
        .map(|(h, a, body)| {
            let mut b: Vec<Symbol> = a.into_iter().map(Symbol::T).collect();
            b.extend(body.into_iter().map(|x| Symbol::N(x + 1)));
            Production { head: h + 1, body: b }
        })
        .collect();
    for q in 0..pda.states().len() {
        if let Some(&i) = index.get(&(pda.initial_state(), pda.initial_stack_symbol(), q)) {
            productions.push(Production { head: 0, body: vec![Symbol::N(i + 1)] });
        }
    }
    productions.sort();
    let g = Grammar { nonterminals, terminals: pda.input_alphabet().to_vec(), start: 0, productions };
    Ok(g.remove_useless())
}

/// Grammar in Chomsky normal form plus an optional `S -> ε`.
#[derive(Clone, Debug)]
pub struct Cnf {
    pub num_nonterminals: usize,
    pub start: usize,
    pub has_empty: bool,
    /// Heads of `A -> a`, per terminal.
    pub terminal_rules: HashMap<char, Vec<usize>>,
    /// `(A, B, C)` for `A -> B C`.
    pub binary_rules: Vec<(usize, usize, usize)>,
}

pub fn normalize(g: &Grammar) -> Cnf {
    let n = g.nonterminals.len();
    // 1. ε-removal
    let mut nullable = vec![false; n];
    loop {
        let mut changed = false;
        for p in &g.productions {
            if !nullable[p.head] && p.body.iter().all(|s| matches!(s, Symbol::N(x) if nullable[*x])) {
                nullable[p.head] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let has_empty = nullable[g.start];
    let mut prods: BTreeSet<Production> = BTreeSet::new();
    for p in &g.productions {
        let opt: Vec<usize> =
            (0..p.body.len()).filter(|&i| matches!(p.body[i], Symbol::N(x) if nullable[x])).collect();
        for mask in 0u32..(1 << opt.len()) {
            let body: Vec<Symbol> = p
                .body
                .iter()
                .enumerate()
                .filter(|(i, _)| match opt.iter().position(|o| o == i) {
                    Some(k) => mask & (1 << k) == 0,
                    None => true,
                })
                .map(|(_, s)| *s)
                .collect();
            if !body.is_empty() {
                prods.insert(Production { head: p.head, body });
            }
        }
    }
    // 2. unit removal
    let mut unit: Vec<BTreeSet<usize>> = (0..n).map(|a| BTreeSet::from([a])).collect();
    let unit_edges: Vec<(usize, usize)> = prods
        .iter()
        .filter_map(|p| match p.body.as_slice() {
            [Symbol::N(b)] => Some((p.head, *b)),
            _ => None,
        })
        .collect();
    loop {
        let mut changed = false;
        for &(a, b) in &unit_edges {
            let add: Vec<usize> = unit[b].iter().copied().filter(|x| !unit[a].contains(x)).collect();
            if !add.is_empty() {
                unit[a].extend(add);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut by_head: Vec<Vec<&Production>> = vec![Vec::new(); n];
    for p in &prods {
        if !matches!(p.body.as_slice(), [Symbol::N(_)]) {
            by_head[p.head].push(p);
        }
    }
    let mut no_unit: BTreeSet<Production> = BTreeSet::new();
    for a in 0..n {
        for &b in &unit[a] {
            for p in &by_head[b] {
                no_unit.insert(Production { head: a, body: p.body.clone() });
            }
        }
    }
    // 3. useless symbols
    let g2 = Grammar {
        nonterminals: g.nonterminals.clone(),
        terminals: g.terminals.clone(),
        start: g.start,
        productions: no_unit.into_iter().collect(),
    }
    .remove_useless();
    // 4. terminal split and binarization
    let mut count = g2.nonterminals.len();
    let mut term_nt: HashMap<char, usize> = HashMap::new();
    let mut terminal_rules: HashMap<char, Vec<usize>> = HashMap::new();
    let mut binary_rules = Vec::new();
    for p in &g2.productions {
        if let [Symbol::T(a)] = p.body.as_slice() {
            terminal_rules.entry(*a).or_default().push(p.head);
            continue;
        }
        let mut body: Vec<usize> = p
            .body
            .iter()
            .map(|s| match s {
                Symbol::N(x) => *x,
                Symbol::T(a) => *term_nt.entry(*a).or_insert_with(|| {
                    let id = count;
                    count += 1;
                    terminal_rules.entry(*a).or_default().push(id);
                    id
                }),
            })
            .collect();
        let mut head = p.head;
        while body.len() > 2 {
            let rest = count;
            count += 1;
            binary_rules.push((head, body[0], rest));
            body.remove(0);
            head = rest;
        }
        binary_rules.push((head, body[0], body[1]));
    }
    for v in terminal_rules.values_mut() {
        v.sort_unstable();
        v.dedup();
    }
    binary_rules.sort_unstable();
    binary_rules.dedup();
    Cnf { num_nonterminals: count, start: g2.start, has_empty, terminal_rules, binary_rules }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1u64 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

impl Cnf {
    /// CYK over bit-set cells, binary rules indexed by left child.
    pub fn accepts(&self, word: &[char]) -> bool {
        if word.is_empty() {
            return self.has_empty;
        }
        let n = word.len();
        let nt = self.num_nonterminals;
        let mut by_left: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nt];
        for &(a, b, c) in &self.binary_rules {
            by_left[b].push((c, a));
        }
        // cell[i][l-1]: nonterminals deriving word[i..i+l]
        let mut cell: Vec<Vec<BitSet>> = (0..n).map(|i| vec![BitSet::new(nt); n - i]).collect();
        for (i, a) in word.iter().enumerate() {
            if let Some(heads) = self.terminal_rules.get(a) {
                for &h in heads {
                    cell[i][0].set(h);
                }
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                let mut acc = BitSet::new(nt);
                for k in 1..len {
                    let (left, right) = (&cell[i][k - 1], &cell[i + k][len - k - 1]);
                    for b in left.ones() {
                        for &(c, a) in &by_left[b] {
                            if right.get(c) {
                                acc.set(a);
                            }
                        }
                    }
                }
                cell[i][len - 1] = acc;
            }
        }
        cell[0][n - 1].get(self.start)
    }
}

/// Compiled membership oracle for one PDA.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    cnf: Arc<Cnf>,
}

fn cache() -> &'static RwLock<HashMap<Pda, Arc<Cnf>>> {
    static CACHE: OnceLock<RwLock<HashMap<Pda, Arc<Cnf>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl MembershipOracle {
    pub fn new(pda: &Pda) -> Result<Self, OracleError> {
        Self::with_cap(pda, DEFAULT_NONTERMINAL_CAP)
    }

    pub fn with_cap(pda: &Pda, cap: usize) -> Result<Self, OracleError> {
        if let Some(c) = cache().read().expect("cache lock").get(pda) {
            return Ok(MembershipOracle { cnf: Arc::clone(c) });
        }
        let g = to_cfg_capped(&to_empty_stack(pda), cap)?;
        let cnf = Arc::new(normalize(&g));
        let mut w = cache().write().expect("cache lock");
        let entry = w.entry(pda.clone()).or_insert(cnf);
        Ok(MembershipOracle { cnf: Arc::clone(entry) })
    }

    pub fn accepts(&self, word: &[char]) -> bool {
        self.cnf.accepts(word)
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }
}

pub fn try_exact_accepts(pda: &Pda, word: &[char]) -> Result<bool, OracleError> {
    Ok(MembershipOracle::new(pda)?.accepts(word))
}

/// Exact membership. Panics only if the grammar exceeds
/// [`DEFAULT_NONTERMINAL_CAP`]; use [`try_exact_accepts`] to handle that.
pub fn exact_accepts(pda: &Pda, word: &[char]) -> bool {
    try_exact_accepts(pda, word).expect("grammar within the default cap")
}
