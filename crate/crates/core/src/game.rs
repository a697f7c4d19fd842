//! Finite-horizon k-explorability game: Spoiler plays letters, Determiner
//! moves k tokens, every prefix in the language must be accepted by some
//! token.
//!
//! A token is `Some(configuration)` or `None` once it has stopped reading
//! (retired). Retiring is always legal; it certifies the current prefix when
//! the token's ε-closure reaches an accepting state.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, GameError};
use crate::grammar::MembershipOracle;
use crate::pda::{Configuration, Mode, Pda};
use crate::run::{closure_accepts, letter_successors, read_letter_with, AcceptConvention};

pub type Token = Option<Configuration>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveOption {
    pub target: Token,
    /// Whether this move certifies the prefix read before the letter.
    pub certifies: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub eps_budget: usize,
    pub convention: AcceptConvention,
    /// Abort with `Unknown` after this many solver nodes.
    pub node_limit: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { eps_budget: 64, convention: AcceptConvention::EpsilonSegment, node_limit: 20_000_000 }
    }
}

impl GameConfig {
    pub fn with_budget(eps_budget: usize) -> Self {
        GameConfig { eps_budget, ..Default::default() }
    }
}

/// Configurations reachable after a prefix (post-letter), interned by id.
#[derive(Clone, Debug)]
pub struct Reach {
    pub set: BTreeSet<Configuration>,
    pub truncated: bool,
    pub id: usize,
}

/// Move generation and caches shared by the solver and the strategy checker.
pub struct Arena<'a> {
    pub pda: &'a Pda,
    pub cfg: GameConfig,
    oracle: MembershipOracle,
    member: RefCell<HashMap<Vec<char>, bool>>,
    reach: RefCell<HashMap<Vec<char>, Rc<Reach>>>,
    interned: RefCell<HashMap<BTreeSet<Configuration>, usize>>,
    moves: RefCell<HashMap<(Configuration, char), Rc<(Vec<MoveOption>, bool)>>>,
    closure: RefCell<HashMap<Configuration, (bool, bool)>>,
    safe: Vec<bool>,
}

impl<'a> Arena<'a> {
    pub fn new(pda: &'a Pda, cfg: GameConfig) -> Result<Self, GameError> {
        let oracle = MembershipOracle::new(pda)?;
        Ok(Arena {
            pda,
            cfg,
            oracle,
            member: RefCell::default(),
            reach: RefCell::default(),
            interned: RefCell::default(),
            moves: RefCell::default(),
            closure: RefCell::default(),
            safe: safe_modes(pda),
        })
    }

    pub fn alphabet(&self) -> &[char] {
        self.pda.input_alphabet()
    }

    pub fn initial_tokens(&self, k: usize) -> Vec<Token> {
        vec![Some(self.pda.initial_configuration()); k]
    }

    pub fn member(&self, w: &[char]) -> bool {
        if let Some(&b) = self.member.borrow().get(w) {
            return b;
        }
        let b = self.oracle.accepts(w);
        self.member.borrow_mut().insert(w.to_vec(), b);
        b
    }

    pub fn reach(&self, w: &[char]) -> Rc<Reach> {
        if let Some(r) = self.reach.borrow().get(w) {
            return Rc::clone(r);
        }
        let (set, truncated) = match w.split_last() {
            None => (BTreeSet::from([self.pda.initial_configuration()]), false),
            Some((&a, rest)) => {
                let prev = self.reach(rest);
                let (set, tr) = letter_successors(self.pda, &prev.set, a, self.cfg.eps_budget);
                (set, tr || prev.truncated)
            }
        };
        let id = {
            let mut interned = self.interned.borrow_mut();
            let n = interned.len();
            *interned.entry(set.clone()).or_insert(n)
        };
        let r = Rc::new(Reach { set, truncated, id });
        self.reach.borrow_mut().insert(w.to_vec(), Rc::clone(&r));
        r
    }

    /// Does the token accept the prefix it has just read, without reading
    /// further? Returns `(accepts, truncated)`.
    pub fn accepts_now(&self, t: &Token) -> (bool, bool) {
        let Some(c) = t else { return (false, false) };
        match self.cfg.convention {
            AcceptConvention::StrictCheckpoint => (self.pda.is_accepting(c.state), false),
            AcceptConvention::EpsilonSegment => {
                if let Some(&r) = self.closure.borrow().get(c) {
                    return r;
                }
                let r = closure_accepts(self.pda, c, self.cfg.eps_budget);
                self.closure.borrow_mut().insert(c.clone(), r);
                r
            }
        }
    }

    fn letter_moves(&self, c: &Configuration, a: char) -> Rc<(Vec<MoveOption>, bool)> {
        let key = (c.clone(), a);
        if let Some(m) = self.moves.borrow().get(&key) {
            return Rc::clone(m);
        }
        let lm = read_letter_with(self.pda, c, a, self.cfg.eps_budget, self.cfg.convention);
        let opts = lm.moves.into_iter().map(|m| MoveOption { target: Some(m.target), certifies: m.certifies }).collect();
        let r = Rc::new((opts, lm.truncated));
        self.moves.borrow_mut().insert(key, Rc::clone(&r));
        r
    }

    /// Every legal move for one token: all letter moves, then retiring.
    pub fn legal(&self, t: &Token, a: char) -> Vec<MoveOption> {
        let Some(c) = t else { return vec![MoveOption { target: None, certifies: false }] };
        let lm = self.letter_moves(c, a);
        let mut v = lm.0.clone();
        v.push(MoveOption { target: None, certifies: self.accepts_now(t).0 });
        v
    }

    /// Legal moves minus dominated ones: a live token is never worse than a
    /// retired one, so retiring is kept only when it certifies and no
    /// letter move does, or when no letter move exists.
    pub fn options(&self, t: &Token, a: char) -> (Vec<MoveOption>, bool) {
        let Some(c) = t else { return (vec![MoveOption { target: None, certifies: false }], false) };
        let lm = self.letter_moves(c, a);
        let (mut v, mut truncated) = (lm.0.clone(), lm.1);
        let any_cert = v.iter().any(|m| m.certifies);
        if !any_cert {
            let (acc, tr) = self.accepts_now(t);
            truncated |= tr;
            if acc || v.is_empty() {
                v.push(MoveOption { target: None, certifies: acc });
            }
        }
        // certifying moves first, then by target
        v.sort_by(|x, y| y.certifies.cmp(&x.certifies).then_with(|| x.target.cmp(&y.target)));
        (v, truncated)
    }

    fn config_safe(&self, c: &Configuration) -> bool {
        match c.mode() {
            None => true,
            Some(m) => self.safe[mode_index(self.pda, m)],
        }
    }

    /// Determiner has already won from here: the tokens cover every
    /// configuration reachable on `w` and only deterministic modes are
    /// reachable from them, so each later member is accepted by the unique
    /// continuation of some token. Only sound under the ε-segment convention.
    pub fn covered(&self, tokens: &[Token], w: &[char]) -> bool {
        if self.cfg.convention != AcceptConvention::EpsilonSegment {
            return false;
        }
        let r = self.reach(w);
        if r.truncated {
            return false;
        }
        let live: HashSet<&Configuration> = tokens.iter().flatten().collect();
        r.set.iter().all(|c| live.contains(c) && self.config_safe(c))
    }
}

fn mode_index(pda: &Pda, m: Mode) -> usize {
    m.state * pda.stack_alphabet().len() + m.top
}

/// Modes from which no nondeterministic mode is reachable in the control
/// graph (pops may expose any symbol).
fn safe_modes(pda: &Pda) -> Vec<bool> {
    let ng = pda.stack_alphabet().len();
    let n = pda.states().len() * ng;
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in pda.transitions() {
        let from = t.from * ng + t.pop;
        match t.push.first() {
            Some(&y) => rev[t.to * ng + y].push(from),
            None => {
                for y in 0..ng {
                    rev[t.to * ng + y].push(from);
                }
            }
        }
    }
    let mut unsafe_ = vec![false; n];
    let mut stack = Vec::new();
    for q in 0..pda.states().len() {
        for x in 0..ng {
            if !pda.mode_is_deterministic(Mode { state: q, top: x }) {
                unsafe_[q * ng + x] = true;
                stack.push(q * ng + x);
            }
        }
    }
    while let Some(m) = stack.pop() {
        for &p in &rev[m] {
            if !unsafe_[p] {
                unsafe_[p] = true;
                stack.push(p);
            }
        }
    }
    unsafe_.into_iter().map(|u| !u).collect()
}

/// Joint moves of all tokens on one letter: identical tokens are expanded
/// as multisets, and results are deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointMove {
    /// Chosen move per token, aligned with the input tokens.
    pub choices: Vec<MoveOption>,
    /// Resulting tokens, sorted.
    pub result: Vec<Token>,
    pub certifies: bool,
}

pub fn joint_moves(arena: &Arena, tokens: &[Token], a: char) -> (Vec<JointMove>, bool) {
    let mut truncated = false;
    // groups of equal tokens (tokens are sorted)
    let mut groups: Vec<(usize, usize, Vec<MoveOption>)> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut j = i + 1;
        while j < tokens.len() && tokens[j] == tokens[i] {
            j += 1;
        }
        let (opts, tr) = arena.options(&tokens[i], a);
        truncated |= tr;
        groups.push((i, j - i, opts));
        i = j;
    }
    let mut out = Vec::new();
    let mut seen: HashSet<(Vec<Token>, bool)> = HashSet::new();
    let mut choices: Vec<MoveOption> = Vec::with_capacity(tokens.len());
    expand(&groups, 0, &mut choices, &mut out, &mut seen);
    // certifying first, then the most spread out
    out.sort_by_cached_key(|m: &JointMove| (!m.certifies, std::cmp::Reverse(distinct_live(&m.result)), m.result.clone()));
    (out, truncated)
}

fn distinct_live(tokens: &[Token]) -> usize {
    let mut live: Vec<&Configuration> = tokens.iter().flatten().collect();
    live.dedup();
    live.len()
}

fn expand(
    groups: &[(usize, usize, Vec<MoveOption>)],
    g: usize,
    choices: &mut Vec<MoveOption>,
    out: &mut Vec<JointMove>,
    seen: &mut HashSet<(Vec<Token>, bool)>,
) {
    if g == groups.len() {
        let mut result: Vec<Token> = choices.iter().map(|m| m.target.clone()).collect();
        result.sort();
        let certifies = choices.iter().any(|m| m.certifies);
        if seen.insert((result.clone(), certifies)) {
            out.push(JointMove { choices: choices.clone(), result, certifies });
        }
        return;
    }
    let (_, count, opts) = &groups[g];
    // nondecreasing index sequences of length `count`
    let mut idx = vec![0usize; *count];
    loop {
        let before = choices.len();
        choices.extend(idx.iter().map(|&i| opts[i].clone()));
        expand(groups, g + 1, choices, out, seen);
        choices.truncate(before);
        // next multiset
        let mut p = *count;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] + 1 < opts.len() {
                let v = idx[p] + 1;
                for x in idx.iter_mut().skip(p) {
                    *x = v;
                }
                break;
            }
        }
        if *count == 0 {
            return;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum GameVerdict {
    DeterminerWins { horizon: usize },
    SpoilerWins {
        /// Letters played.
        witness: String,
        /// A prefix of the witness in the language that no token accepts.
        losing_prefix: String,
        /// False when the witness defeats every Determiner strategy as a
        /// fixed word; true when it is one line of an adaptive Spoiler win.
        adaptive: bool,
    },
    Unknown { diagnostics: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes: usize,
    pub memo_entries: usize,
}

#[derive(Clone, Debug)]
pub struct GameOutcome {
    pub verdict: GameVerdict,
    pub tokens: usize,
    pub horizon: usize,
    /// Announced length for parameterized games.
    pub announced: Option<usize>,
    pub strategy: Option<StrategyTable>,
    pub stats: SolveStats,
}

impl GameOutcome {
    pub fn determiner_wins(&self) -> bool {
        matches!(self.verdict, GameVerdict::DeterminerWins { .. })
    }
    pub fn spoiler_wins(&self) -> bool {
        matches!(self.verdict, GameVerdict::SpoilerWins { .. })
    }
    pub fn verdict_label(&self) -> &'static str {
        match self.verdict {
            GameVerdict::DeterminerWins { .. } => "determiner",
            GameVerdict::SpoilerWins { .. } => "spoiler",
            GameVerdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum V3 {
    Win,
    Lose,
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum ReachKey {
    Set(usize),
    Prefix(Vec<char>),
}

struct Solver<'s, 'a> {
    arena: &'s Arena<'a>,
    horizon: usize,
    memo: HashMap<(Vec<Token>, ReachKey, usize), V3>,
    nodes: usize,
    limit_hit: bool,
}

impl Solver<'_, '_> {
    fn key(&self, tokens: &[Token], w: &[char]) -> (Vec<Token>, ReachKey, usize) {
        let r = self.arena.reach(w);
        let rk = if r.truncated { ReachKey::Prefix(w.to_vec()) } else { ReachKey::Set(r.id) };
        (tokens.to_vec(), rk, self.horizon - w.len())
    }

    fn end_value(&self, tokens: &[Token], w: &[char]) -> V3 {
        if !self.arena.member(w) {
            return V3::Win;
        }
        let mut truncated = false;
        for t in tokens {
            let (acc, tr) = self.arena.accepts_now(t);
            if acc {
                return V3::Win;
            }
            truncated |= tr;
        }
        if truncated {
            V3::Unknown
        } else {
            V3::Lose
        }
    }

    fn value(&mut self, tokens: &[Token], w: &mut Vec<char>) -> V3 {
        if self.arena.covered(tokens, w) {
            return V3::Win;
        }
        if w.len() == self.horizon {
            return self.end_value(tokens, w);
        }
        let key = self.key(tokens, w);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        self.nodes += 1;
        if self.nodes > self.arena.cfg.node_limit {
            self.limit_hit = true;
            return V3::Unknown;
        }
        let need = self.arena.member(w);
        let mut result = V3::Win;
        for &a in self.arena.alphabet() {
            let (moves, truncated) = joint_moves(self.arena, tokens, a);
            let mut best = V3::Lose;
            w.push(a);
            let covering = moves.iter().any(|m| (!need || m.certifies) && self.arena.covered(&m.result, w));
            w.pop();
            if covering {
                continue;
            }
            for m in moves.iter().filter(|m| !need || m.certifies) {
                w.push(a);
                let v = self.value(&m.result, w);
                w.pop();
                match v {
                    V3::Win => {
                        best = V3::Win;
                        break;
                    }
                    V3::Unknown => best = V3::Unknown,
                    V3::Lose => {}
                }
            }
            if best == V3::Lose && (truncated || self.arena.reach(w).truncated) {
                best = V3::Unknown;
            }
            match best {
                V3::Lose => {
                    result = V3::Lose;
                    break;
                }
                V3::Unknown => result = V3::Unknown,
                V3::Win => {}
            }
        }
        if !self.limit_hit {
            self.memo.insert(key, result);
        }
        result
    }

    fn extract(&mut self, tokens: &[Token], w: &mut Vec<char>, table: &mut StrategyTable) {
        let prefix: String = w.iter().collect();
        if self.arena.covered(tokens, w) {
            table.forced.insert(prefix);
            return;
        }
        if w.len() == self.horizon {
            return;
        }
        let need = self.arena.member(w);
        let mut node = StrategyNode { tokens: tokens.to_vec(), moves: BTreeMap::new() };
        let mut children = Vec::new();
        for &a in self.arena.alphabet() {
            let (moves, _) = joint_moves(self.arena, tokens, a);
            let mut admissible: Vec<JointMove> = moves.into_iter().filter(|m| !need || m.certifies).collect();
            w.push(a);
            admissible.sort_by_cached_key(|m| !self.arena.covered(&m.result, w));
            w.pop();
            for m in admissible {
                w.push(a);
                let v = self.value(&m.result, w);
                w.pop();
                if v == V3::Win {
                    node.moves.insert(a, m.choices.clone());
                    children.push((a, m.result));
                    break;
                }
            }
        }
        table.nodes.insert(prefix, node);
        for (a, result) in children {
            w.push(a);
            self.extract(&result, w, table);
            w.pop();
        }
    }

    /// One losing line: Spoiler picks a letter on which every response
    /// loses, Determiner answers with the first admissible move.
    fn principal_variation(&mut self, tokens: &[Token], w: &mut Vec<char>) -> (String, String) {
        let word = |w: &Vec<char>| w.iter().collect::<String>();
        if w.len() == self.horizon {
            return (word(w), word(w));
        }
        let need = self.arena.member(w);
        for &a in self.arena.alphabet() {
            let (moves, _) = joint_moves(self.arena, tokens, a);
            let admissible: Vec<JointMove> = moves.into_iter().filter(|m| !need || m.certifies).collect();
            let mut all_lose = true;
            for m in &admissible {
                w.push(a);
                let v = self.value(&m.result, w);
                w.pop();
                if v != V3::Lose {
                    all_lose = false;
                    break;
                }
            }
            if !all_lose {
                continue;
            }
            let Some(m) = admissible.first() else {
                let losing = word(w);
                w.push(a);
                let played = word(w);
                w.pop();
                return (played, losing);
            };
            w.push(a);
            let r = self.principal_variation(&m.result.clone(), w);
            w.pop();
            return r;
        }
        // the horizon check failed here
        (word(w), word(w))
    }
}

/// Shortest word (then smallest in alphabet order) of length at most
/// `horizon` that no Determiner survives even knowing the word in advance.
/// Returns `(word, losing_prefix)`.
fn non_adaptive_witness(arena: &Arena, k: usize, horizon: usize, work_limit: usize) -> Option<(String, String)> {
    let mut level: Vec<(Vec<char>, BTreeSet<Vec<Token>>)> = vec![(vec![], BTreeSet::from([arena.initial_tokens(k)]))];
    let mut work = 0usize;
    for len in 0..=horizon {
        // end obligations at this length, in order
        for (w, sets) in &level {
            if arena.member(w) && !sets.iter().any(|s| s.iter().any(|t| arena.accepts_now(t).0)) {
                let s: String = w.iter().collect();
                return Some((s.clone(), s));
            }
        }
        if len == horizon {
            break;
        }
        let mut next = Vec::new();
        for (w, sets) in &level {
            let need = arena.member(w);
            for &a in arena.alphabet() {
                let mut out: BTreeSet<Vec<Token>> = BTreeSet::new();
                for s in sets {
                    let (moves, _) = joint_moves(arena, s, a);
                    work += moves.len();
                    out.extend(moves.into_iter().filter(|m| !need || m.certifies).map(|m| m.result));
                }
                let mut w2 = w.clone();
                w2.push(a);
                if out.is_empty() {
                    return Some((w2.iter().collect(), w.iter().collect()));
                }
                next.push((w2, out));
            }
            if work > work_limit {
                return None;
            }
        }
        level = next;
    }
    None
}

pub fn solve(pda: &Pda, k: usize, horizon: usize, eps_budget: usize) -> Result<GameOutcome, GameError> {
    solve_with(pda, k, horizon, &GameConfig::with_budget(eps_budget))
}

pub fn solve_with(pda: &Pda, k: usize, horizon: usize, cfg: &GameConfig) -> Result<GameOutcome, GameError> {
    if k == 0 {
        return Err(GameError::BadParameter("at least one token is required".into()));
    }
    let arena = Arena::new(pda, cfg.clone())?;
    solve_in(&arena, k, horizon)
}

pub fn solve_in(arena: &Arena, k: usize, horizon: usize) -> Result<GameOutcome, GameError> {
    let mut solver = Solver { arena, horizon, memo: HashMap::new(), nodes: 0, limit_hit: false };
    let root = arena.initial_tokens(k);
    let mut w = Vec::new();
    let v = solver.value(&root, &mut w);
    let (verdict, strategy) = match v {
        V3::Win => {
            let mut table = StrategyTable { tokens: k, horizon, ..Default::default() };
            solver.extract(&root, &mut w, &mut table);
            (GameVerdict::DeterminerWins { horizon }, Some(table))
        }
        V3::Lose => {
            let (witness, losing_prefix, adaptive) = match non_adaptive_witness(arena, k, horizon, 5_000_000) {
                Some((wd, lp)) => (wd, lp, false),
                None => {
                    let (wd, lp) = solver.principal_variation(&root, &mut w);
                    (wd, lp, true)
                }
            };
            (GameVerdict::SpoilerWins { witness, losing_prefix, adaptive }, None)
        }
        V3::Unknown => {
            let diagnostics = if solver.limit_hit {
                format!("node limit {} reached", arena.cfg.node_limit)
            } else {
                format!("ε-budget {} truncated a move or reach set on a deciding branch", arena.cfg.eps_budget)
            };
            (GameVerdict::Unknown { diagnostics }, None)
        }
    };
    Ok(GameOutcome {
        verdict,
        tokens: k,
        horizon,
        announced: None,
        strategy,
        stats: SolveStats { nodes: solver.nodes, memo_entries: solver.memo.len() },
    })
}

/// Token budget as a function of the announced length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenBudget {
    Constant(usize),
    Linear,
    /// `m^n` with `m` the base.
    Exponential(usize),
}

impl TokenBudget {
    pub fn tokens(&self, n: usize) -> usize {
        match *self {
            TokenBudget::Constant(c) => c,
            TokenBudget::Linear => n.max(1),
            TokenBudget::Exponential(m) => m.max(1).saturating_pow(n as u32).max(1),
        }
    }

    /// `const:3`, `linear`, `exp` (base = maximum out-degree) or `exp:2`.
    pub fn parse(s: &str, pda: &Pda) -> Result<TokenBudget, GameError> {
        match s.split_once(':') {
            None if s == "linear" => Ok(TokenBudget::Linear),
            None if s == "exp" => Ok(TokenBudget::Exponential(pda.max_out_degree().max(1))),
            Some(("const", c)) => c
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .map(TokenBudget::Constant)
                .ok_or_else(|| GameError::BadParameter(format!("bad constant `{c}`"))),
            Some(("exp", m)) => m
                .parse()
                .ok()
                .filter(|&m| m >= 1)
                .map(TokenBudget::Exponential)
                .ok_or_else(|| GameError::BadParameter(format!("bad base `{m}`"))),
            _ => Err(GameError::BadParameter(format!("unknown token function `{s}`"))),
        }
    }
}

/// The game with `budget.tokens(n)` tokens and horizon `n`.
pub fn solve_parameterized(pda: &Pda, budget: TokenBudget, n: usize, eps_budget: usize) -> Result<GameOutcome, GameError> {
    let mut out = solve(pda, budget.tokens(n), n, eps_budget)?;
    out.announced = Some(n);
    Ok(out)
}

/// A Determiner strategy found by the solver: per prefix, the token tuple
/// and the move of every token for each letter. Prefixes in `forced` are
/// won by letting every token follow its unique continuation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyTable {
    pub tokens: usize,
    pub horizon: usize,
    pub nodes: BTreeMap<String, StrategyNode>,
    pub forced: BTreeSet<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyNode {
    pub tokens: Vec<Token>,
    pub moves: BTreeMap<char, Vec<MoveOption>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub state: String,
    /// Top-first.
    pub stack: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDoc {
    pub target: Option<ConfigDoc>,
    pub certifies: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub prefix: String,
    pub tokens: Vec<Option<ConfigDoc>>,
    pub moves: BTreeMap<String, Vec<MoveDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDoc {
    pub tokens: usize,
    pub horizon: usize,
    pub nodes: Vec<NodeDoc>,
    pub forced: Vec<String>,
}

pub fn config_doc(pda: &Pda, c: &Configuration) -> ConfigDoc {
    ConfigDoc {
        state: pda.state_name(c.state).to_string(),
        stack: c.stack_word().into_iter().map(|x| pda.symbol_name(x).to_string()).collect(),
    }
}

pub fn config_from_doc(pda: &Pda, d: &ConfigDoc) -> Result<Configuration, FormatError> {
    let state = pda.state_id(&d.state).ok_or_else(|| FormatError::invalid(format!("unknown state `{}`", d.state)))?;
    let mut stack = Vec::with_capacity(d.stack.len());
    for s in d.stack.iter().rev() {
        stack.push(pda.symbol_id(s).ok_or_else(|| FormatError::invalid(format!("unknown stack symbol `{s}`")))?);
    }
    Ok(Configuration { state, stack })
}

impl StrategyTable {
    pub fn to_doc(&self, pda: &Pda) -> StrategyDoc {
        let tok = |t: &Token| t.as_ref().map(|c| config_doc(pda, c));
        StrategyDoc {
            tokens: self.tokens,
            horizon: self.horizon,
            nodes: self
                .nodes
                .iter()
                .map(|(p, n)| NodeDoc {
                    prefix: p.clone(),
                    tokens: n.tokens.iter().map(tok).collect(),
                    moves: n
                        .moves
                        .iter()
                        .map(|(a, ms)| {
                            (a.to_string(), ms.iter().map(|m| MoveDoc { target: tok(&m.target), certifies: m.certifies }).collect())
                        })
                        .collect(),
                })
                .collect(),
            forced: self.forced.iter().cloned().collect(),
        }
    }

    pub fn to_json(&self, pda: &Pda) -> String {
        serde_json::to_string_pretty(&self.to_doc(pda)).expect("strategy documents always serialize")
    }

    pub fn from_json(pda: &Pda, text: &str) -> Result<StrategyTable, FormatError> {
        let doc: StrategyDoc = serde_json::from_str(text).map_err(FormatError::from_json)?;
        let tok = |t: &Option<ConfigDoc>| t.as_ref().map(|c| config_from_doc(pda, c)).transpose();
        let mut nodes = BTreeMap::new();
        for n in &doc.nodes {
            let tokens = n.tokens.iter().map(tok).collect::<Result<Vec<_>, _>>()?;
            let mut moves = BTreeMap::new();
            for (a, ms) in &n.moves {
                let letter = a.chars().next().ok_or_else(|| FormatError::invalid("empty letter"))?;
                let opts = ms
                    .iter()
                    .map(|m| Ok(MoveOption { target: tok(&m.target)?, certifies: m.certifies }))
                    .collect::<Result<Vec<_>, FormatError>>()?;
                moves.insert(letter, opts);
            }
            nodes.insert(n.prefix.clone(), StrategyNode { tokens, moves });
        }
        Ok(StrategyTable { tokens: doc.tokens, horizon: doc.horizon, nodes, forced: doc.forced.into_iter().collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{multiple_dpda, union_pda};
    use crate::grammar::exact_accepts;

    #[test]
    fn union_one_token_loses_at_abb() {
        let p = union_pda(1).unwrap();
        let out = solve(&p, 1, 3, 16).unwrap();
        match &out.verdict {
            GameVerdict::SpoilerWins { witness, losing_prefix, adaptive } => {
                assert_eq!(witness, "abb");
                assert_eq!(losing_prefix, "abb");
                assert!(!adaptive);
                assert!(exact_accepts(&p, &losing_prefix.chars().collect::<Vec<_>>()));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn union_two_tokens_win() {
        let p = union_pda(1).unwrap();
        let out = solve(&p, 2, 8, 16).unwrap();
        assert_eq!(out.verdict, GameVerdict::DeterminerWins { horizon: 8 });
        let t = out.strategy.unwrap();
        assert!(!t.forced.is_empty());
    }

    #[test]
    fn horizon_zero_without_empty_word() {
        let p = crate::constructions::block_pda();
        assert!(solve(&p, 1, 0, 16).unwrap().determiner_wins());
    }

    #[test]
    fn deterministic_single_token() {
        let p = multiple_dpda(2).unwrap();
        assert!(solve(&p, 1, 7, 16).unwrap().determiner_wins());
    }

    #[test]
    fn joint_moves_are_multisets() {
        let p = union_pda(1).unwrap();
        let arena = Arena::new(&p, GameConfig::default()).unwrap();
        let toks = arena.initial_tokens(2);
        let (moves, _) = joint_moves(&arena, &toks, 'a');
        // two branch targets for each of two identical tokens: {11, 12, 22}
        assert_eq!(moves.len(), 3);
    }

    #[test]
    fn strategy_table_round_trips() {
        let p = union_pda(1).unwrap();
        let t = solve(&p, 2, 4, 16).unwrap().strategy.unwrap();
        assert_eq!(StrategyTable::from_json(&p, &t.to_json(&p)).unwrap(), t);
    }

    #[test]
    fn token_budget_parse() {
        let p = union_pda(1).unwrap();
        assert_eq!(TokenBudget::parse("linear", &p).unwrap().tokens(6), 6);
        assert_eq!(TokenBudget::parse("const:2", &p).unwrap().tokens(6), 2);
        assert_eq!(TokenBudget::parse("exp:2", &p).unwrap().tokens(3), 8);
        assert!(TokenBudget::parse("quadratic", &p).is_err());
    }
}
