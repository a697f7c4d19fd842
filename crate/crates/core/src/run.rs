//! Run semantics: one-letter moves with ε-prefixes, run enumeration,
//! bounded acceptance, steps, splicing and accepting-run extensions.
//!
//! Every operation that follows ε-transitions takes a per-segment budget
//! and reports truncation instead of looping.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::RunError;
use crate::pda::{Configuration, Pda};

/// When does a token or run count as accepting a prefix `w'`?
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum AcceptConvention {
    /// An accepting state at the configuration reached after `w'`, or
    /// anywhere in the following ε-segment before the next letter.
    #[default]
    EpsilonSegment,
    /// Only the configuration reached right after the last letter of `w'`.
    StrictCheckpoint,
}

/// One way to read a letter: ε-steps followed by exactly one letter step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterMove {
    pub target: Configuration,
    /// Transition ids; the last one reads the letter.
    pub path: Vec<usize>,
    /// Whether the move certifies the prefix read before it.
    pub certifies: bool,
}

#[derive(Clone, Debug, Default)]
pub struct LetterMoves {
    /// Sorted by target, one entry per target configuration.
    pub moves: Vec<LetterMove>,
    pub truncated: bool,
}

pub fn read_letter(pda: &Pda, c: &Configuration, a: char, eps_budget: usize) -> LetterMoves {
    read_letter_with(pda, c, a, eps_budget, AcceptConvention::EpsilonSegment)
}

pub fn read_letter_with(
    pda: &Pda,
    c: &Configuration,
    a: char,
    eps_budget: usize,
    convention: AcceptConvention,
) -> LetterMoves {
    struct Node {
        conf: Configuration,
        flag: bool,
        parent: Option<(usize, usize)>,
        depth: usize,
    }
    let source_acc = pda.is_accepting(c.state);
    let mut nodes = vec![Node { conf: c.clone(), flag: source_acc, parent: None, depth: 0 }];
    let mut seen: HashMap<Configuration, bool> = HashMap::new();
    seen.insert(c.clone(), source_acc);
    let mut queue = VecDeque::from([0usize]);
    let mut best: BTreeMap<Configuration, (bool, usize, usize)> = BTreeMap::new();
    let mut truncated = false;

    while let Some(ix) = queue.pop_front() {
        let (conf, flag, depth) = (nodes[ix].conf.clone(), nodes[ix].flag, nodes[ix].depth);
        for &tid in pda.enabled(&conf) {
            let t = pda.transition(tid);
            let next = conf.apply(t);
            match t.input {
                Some(x) if x == a => {
                    let better = match best.get(&next) {
                        None => true,
                        Some(&(f, _, _)) => flag && !f,
                    };
                    if better {
                        best.insert(next, (flag, ix, tid));
                    }
                }
                Some(_) => {}
                None => {
                    let nflag = match convention {
                        AcceptConvention::EpsilonSegment => flag || pda.is_accepting(next.state),
                        AcceptConvention::StrictCheckpoint => flag,
                    };
                    match seen.get(&next) {
                        Some(&f) if f || !nflag => continue,
                        _ => {}
                    }
                    if depth >= eps_budget {
                        truncated = true;
                        continue;
                    }
                    seen.insert(next.clone(), nflag);
                    nodes.push(Node { conf: next, flag: nflag, parent: Some((ix, tid)), depth: depth + 1 });
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
    }

    let path_to = |mut ix: usize| {
        let mut path = Vec::new();
        while let Some((p, tid)) = nodes[ix].parent {
            path.push(tid);
            ix = p;
        }
        path.reverse();
        path
    };
    let moves = best
        .into_iter()
        .map(|(target, (flag, ix, tid))| {
            let mut path = path_to(ix);
            path.push(tid);
            LetterMove { target, path, certifies: flag }
        })
        .collect();
    LetterMoves { moves, truncated }
}

/// Configurations reachable from `from` with at most `eps_budget` ε-steps
/// (breadth-first distance from the nearest source).
pub fn epsilon_closure(pda: &Pda, from: &BTreeSet<Configuration>, eps_budget: usize) -> (BTreeSet<Configuration>, bool) {
    let mut seen: BTreeSet<Configuration> = from.clone();
    let mut frontier: Vec<Configuration> = from.iter().cloned().collect();
    let mut truncated = false;
    for depth in 0..=eps_budget {
        let mut next_frontier = Vec::new();
        for c in &frontier {
            for &tid in pda.enabled(c) {
                let t = pda.transition(tid);
                if t.input.is_some() {
                    continue;
                }
                let n = c.apply(t);
                if seen.contains(&n) {
                    continue;
                }
                if depth == eps_budget {
                    truncated = true;
                    continue;
                }
                seen.insert(n.clone());
                next_frontier.push(n);
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    (seen, truncated)
}

/// Does some configuration within the ε-closure of `c` accept?
pub fn closure_accepts(pda: &Pda, c: &Configuration, eps_budget: usize) -> (bool, bool) {
    let (set, truncated) = epsilon_closure(pda, &BTreeSet::from([c.clone()]), eps_budget);
    (set.iter().any(|x| pda.is_accepting(x.state)), truncated)
}

/// All configurations reached from `set` by ε-steps then one `a`-step.
pub fn letter_successors(
    pda: &Pda,
    set: &BTreeSet<Configuration>,
    a: char,
    eps_budget: usize,
) -> (BTreeSet<Configuration>, bool) {
    let (closed, truncated) = epsilon_closure(pda, set, eps_budget);
    let mut out = BTreeSet::new();
    for c in &closed {
        for &tid in pda.enabled(c) {
            let t = pda.transition(tid);
            if t.input == Some(a) {
                out.insert(c.apply(t));
            }
        }
    }
    (out, truncated)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Accept,
    Reject,
    Unknown,
}

pub fn bounded_accepts(pda: &Pda, word: &[char], eps_budget: usize) -> Verdict {
    bounded_accepts_with(pda, word, eps_budget, AcceptConvention::EpsilonSegment)
}

pub fn bounded_accepts_with(pda: &Pda, word: &[char], eps_budget: usize, convention: AcceptConvention) -> Verdict {
    let mut set = BTreeSet::from([pda.initial_configuration()]);
    let mut truncated = false;
    for &a in word {
        let (next, tr) = letter_successors(pda, &set, a, eps_budget);
        truncated |= tr;
        set = next;
        if set.is_empty() {
            break;
        }
    }
    let accepted = match convention {
        AcceptConvention::StrictCheckpoint => set.iter().any(|c| pda.is_accepting(c.state)),
        AcceptConvention::EpsilonSegment => {
            let (closed, tr) = epsilon_closure(pda, &set, eps_budget);
            truncated |= tr;
            closed.iter().any(|c| pda.is_accepting(c.state))
        }
    };
    if accepted {
        Verdict::Accept
    } else if truncated {
        Verdict::Unknown
    } else {
        Verdict::Reject
    }
}

/// A run `c0 τ0 c1 … cm` starting in the initial configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub word: Vec<char>,
    pub configs: Vec<Configuration>,
    pub transitions: Vec<usize>,
    /// Letter (or ε) consumed by each transition.
    pub labels: Vec<Option<char>>,
}

impl Run {
    pub fn empty(pda: &Pda) -> Run {
        Run { word: Vec::new(), configs: vec![pda.initial_configuration()], transitions: Vec::new(), labels: Vec::new() }
    }

    /// Replays transition ids from the initial configuration.
    pub fn replay(pda: &Pda, transitions: &[usize]) -> Result<Run, RunError> {
        let mut run = Run::empty(pda);
        for (i, &tid) in transitions.iter().enumerate() {
            if tid >= pda.transitions().len() {
                return Err(RunError::NotEnabled(i));
            }
            let t = pda.transition(tid);
            let cur = run.configs.last().expect("runs are non-empty");
            if !cur.enables(t) {
                return Err(RunError::NotEnabled(i));
            }
            let next = cur.apply(t);
            run.configs.push(next);
            run.transitions.push(tid);
            run.labels.push(t.input);
            if let Some(a) = t.input {
                run.word.push(a);
            }
        }
        Ok(run)
    }

    pub fn validate(&self, pda: &Pda) -> Result<(), RunError> {
        if self.configs.len() != self.transitions.len() + 1 || self.labels.len() != self.transitions.len() {
            return Err(RunError::Shape);
        }
        if self.configs[0] != pda.initial_configuration() {
            return Err(RunError::BadStart);
        }
        for (i, &tid) in self.transitions.iter().enumerate() {
            if tid >= pda.transitions().len() {
                return Err(RunError::NotEnabled(i));
            }
            let t = pda.transition(tid);
            if !self.configs[i].enables(t) || self.labels[i] != t.input {
                return Err(RunError::NotEnabled(i));
            }
            if self.configs[i].apply(t) != self.configs[i + 1] {
                return Err(RunError::ConfigMismatch(i));
            }
        }
        let spelled: Vec<char> = self.labels.iter().flatten().copied().collect();
        if spelled != self.word {
            return Err(RunError::WordMismatch);
        }
        Ok(())
    }

    pub fn last(&self) -> &Configuration {
        self.configs.last().expect("runs are non-empty")
    }

    pub fn is_accepting(&self, pda: &Pda) -> bool {
        pda.is_accepting(self.last().state)
    }

    pub fn heights(&self) -> Vec<isize> {
        self.configs.iter().map(Configuration::height).collect()
    }

    /// Number of letters consumed before position `s`.
    pub fn consumed_at(&self, s: usize) -> usize {
        self.labels[..s].iter().filter(|l| l.is_some()).count()
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunSet {
    pub runs: Vec<Run>,
    pub truncated: bool,
}

/// All runs over `word` whose ε-segments (before each letter and after the
/// last) have at most `eps_budget` steps.
pub fn enumerate_runs(pda: &Pda, word: &[char], eps_budget: usize) -> RunSet {
    let mut out = RunSet::default();
    let mut path = Vec::new();
    let start = pda.initial_configuration();
    enumerate_from(pda, word, eps_budget, &start, 0, 0, &mut path, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_from(
    pda: &Pda,
    word: &[char],
    eps_budget: usize,
    conf: &Configuration,
    pos: usize,
    eps_used: usize,
    path: &mut Vec<usize>,
    out: &mut RunSet,
) {
    if pos == word.len() {
        out.runs.push(Run::replay(pda, path).expect("enumerated paths are valid"));
    }
    for &tid in pda.enabled(conf) {
        let t = pda.transition(tid);
        match t.input {
            None => {
                if eps_used >= eps_budget {
                    out.truncated = true;
                    continue;
                }
                path.push(tid);
                enumerate_from(pda, word, eps_budget, &conf.apply(t), pos, eps_used + 1, path, out);
                path.pop();
            }
            Some(a) if pos < word.len() && a == word[pos] => {
                path.push(tid);
                enumerate_from(pda, word, eps_budget, &conf.apply(t), pos + 1, 0, path, out);
                path.pop();
            }
            Some(_) => {}
        }
    }
}

/// Positions `s` with `sh(c_s') >= sh(c_s)` for every later `s'`.
pub fn steps_of_run(run: &Run) -> Vec<usize> {
    let h = run.heights();
    let mut suffix_min = vec![isize::MAX; h.len()];
    let mut m = isize::MAX;
    for i in (0..h.len()).rev() {
        m = m.min(h[i]);
        suffix_min[i] = m;
    }
    (0..h.len()).filter(|&i| h[i] <= suffix_min[i]).collect()
}

fn is_step(run: &Run, s: usize) -> bool {
    let h = run.configs[s].height();
    run.configs[s..].iter().all(|c| c.height() >= h)
}

/// Keeps `run2` up to position `s1` and continues with the transitions of
/// `run1` after position `s0`. Both positions must be steps with equal modes.
pub fn splice(pda: &Pda, run1: &Run, s0: usize, run2: &Run, s1: usize) -> Result<Run, RunError> {
    if s0 >= run1.configs.len() {
        return Err(RunError::OutOfRange(s0));
    }
    if s1 >= run2.configs.len() {
        return Err(RunError::OutOfRange(s1));
    }
    if !is_step(run1, s0) {
        return Err(RunError::NotAStep(s0));
    }
    if !is_step(run2, s1) {
        return Err(RunError::NotAStep(s1));
    }
    if run1.configs[s0].mode() != run2.configs[s1].mode() || run1.configs[s0].state != run2.configs[s1].state {
        return Err(RunError::ModeMismatch);
    }
    let mut transitions = run2.transitions[..s1].to_vec();
    transitions.extend_from_slice(&run1.transitions[s0..]);
    Run::replay(pda, &transitions)
}

/// A run over `w·fill^j` that accepts at its end, together with the
/// position at which its prefix over `w·fill^i` was already accepting.
#[derive(Clone, Debug)]
pub struct RunPair {
    pub run: Run,
    pub prefix_position: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ExtensionTable {
    pub base: Vec<char>,
    pub fill: char,
    pub pairs: BTreeMap<(usize, usize), RunPair>,
    pub truncated: bool,
}

impl ExtensionTable {
    pub fn pair_set(&self) -> BTreeSet<(usize, usize)> {
        self.pairs.keys().copied().collect()
    }
}

/// Pairs `i < j` such that a single run accepts `w·fill^j` and, on the way,
/// accepts `w·fill^i` (under the ε-segment convention).
pub fn accepting_run_extensions(
    pda: &Pda,
    w: &[char],
    fill: char,
    max_i: usize,
    max_j: usize,
    eps_budget: usize,
) -> ExtensionTable {
    assert!(max_j < 64, "extension lengths are tracked in a 64-bit mask");
    #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
    struct Key {
        conf: Configuration,
        flag: bool,
        mask: u64,
    }
    let word: Vec<char> = w.iter().copied().chain(std::iter::repeat(fill).take(max_j)).collect();
    let base_len = w.len();
    let mut table = ExtensionTable { base: w.to_vec(), fill, ..Default::default() };

    let boundary = |pos: usize| pos.checked_sub(base_len);
    let start = pda.initial_configuration();
    let start_flag = boundary(0).is_some() && pda.is_accepting(start.state);
    let mut entries: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
    entries.insert(Key { conf: start, flag: start_flag, mask: 0 }, Vec::new());

    for pos in 0..=word.len() {
        let j = boundary(pos);
        // ε-closure of this segment; node flag records an accepting visit
        let mut seen: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
        let mut frontier: Vec<(Key, Vec<usize>)> = Vec::new();
        for (k, p) in std::mem::take(&mut entries) {
            seen.insert(k.clone(), p.clone());
            frontier.push((k, p));
        }
        let record = |key: &Key, path: &Vec<usize>, table: &mut ExtensionTable| {
            if let Some(j) = j {
                if pda.is_accepting(key.conf.state) {
                    for i in 0..j.min(max_i + 1) {
                        if key.mask & (1 << i) != 0 && !table.pairs.contains_key(&(i, j)) {
                            let run = Run::replay(pda, path).expect("valid path");
                            let prefix_position = prefix_acceptance_position(pda, &run, base_len + i)
                                .expect("mask bit implies an accepting prefix");
                            table.pairs.insert((i, j), RunPair { run, prefix_position });
                        }
                    }
                }
            }
        };
        for (k, p) in &frontier {
            record(k, p, &mut table);
        }
        for depth in 0..=eps_budget {
            let mut next = Vec::new();
            for (k, p) in &frontier {
                for &tid in pda.enabled(&k.conf) {
                    let t = pda.transition(tid);
                    if t.input.is_some() {
                        continue;
                    }
                    let conf = k.conf.apply(t);
                    let flag = k.flag || (j.is_some() && pda.is_accepting(conf.state));
                    let nk = Key { conf, flag, mask: k.mask };
                    if seen.contains_key(&nk) {
                        continue;
                    }
                    if depth == eps_budget {
                        table.truncated = true;
                        continue;
                    }
                    let mut np = p.clone();
                    np.push(tid);
                    record(&nk, &np, &mut table);
                    seen.insert(nk.clone(), np.clone());
                    next.push((nk, np));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        if pos == word.len() {
            break;
        }
        let a = word[pos];
        for (k, p) in seen {
            let mask = match j {
                Some(j) if k.flag && j <= max_i => k.mask | (1 << j),
                _ => k.mask,
            };
            for &tid in pda.enabled(&k.conf) {
                let t = pda.transition(tid);
                if t.input != Some(a) {
                    continue;
                }
                let conf = k.conf.apply(t);
                let flag = boundary(pos + 1).is_some() && pda.is_accepting(conf.state);
                let nk = Key { conf, flag, mask };
                if !entries.contains_key(&nk) {
                    let mut np = p.clone();
                    np.push(tid);
                    entries.insert(nk, np);
                }
            }
        }
    }
    table
}

/// First position in `run` where exactly `consumed` letters have been read
/// and the state is accepting, before the next letter is consumed.
pub fn prefix_acceptance_position(pda: &Pda, run: &Run, consumed: usize) -> Option<usize> {
    let mut read = 0;
    for (s, c) in run.configs.iter().enumerate() {
        if s > 0 && run.labels[s - 1].is_some() {
            read += 1;
        }
        if read == consumed && pda.is_accepting(c.state) {
            return Some(s);
        }
        if read > consumed {
            break;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pda::PdaBuilder;

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

    fn pumping() -> Pda {
        let mut b = PdaBuilder::new(&['a'], "q", "Z");
        b.accept("f");
        b.add("q", None, "Z", "q", &["Z", "Z"]);
        b.add("q", Some('a'), "Z", "f", &["Z"]);
        b.build()
    }

    #[test]
    fn read_letter_deterministic() {
        let pda = d1();
        let m = read_letter(&pda, &pda.initial_configuration(), 'a', 8);
        assert_eq!(m.moves.len(), 1);
        assert!(m.moves[0].path.len() == 1);
        assert_eq!(pda.format_configuration(&m.moves[0].target), "(q0, X Z)");
        assert!(m.moves[0].certifies);
    }

    #[test]
    fn read_letter_disabled_is_empty() {
        let pda = d1();
        let m = read_letter(&pda, &pda.initial_configuration(), 'b', 8);
        assert!(m.moves.is_empty());
        assert!(!m.truncated);
    }

    #[test]
    fn epsilon_pumping_truncates() {
        let pda = pumping();
        let m = read_letter(&pda, &pda.initial_configuration(), 'a', 3);
        assert!(m.truncated);
        assert_eq!(m.moves.len(), 4);
        assert_eq!(bounded_accepts(&pda, &[], 2), Verdict::Unknown);
        assert_eq!(bounded_accepts(&pda, &['a'], 2), Verdict::Accept);
    }

    #[test]
    fn bounded_accepts_d1() {
        let pda = d1();
        assert_eq!(bounded_accepts(&pda, &['a', 'b'], 4), Verdict::Accept);
        assert_eq!(bounded_accepts(&pda, &['a', 'b', 'b'], 4), Verdict::Reject);
        assert_eq!(bounded_accepts(&pda, &[], 4), Verdict::Accept);
        assert_eq!(bounded_accepts_with(&pda, &['a', 'b'], 4, AcceptConvention::StrictCheckpoint), Verdict::Reject);
    }

    #[test]
    fn empty_word_runs() {
        let pda = d1();
        let rs = enumerate_runs(&pda, &[], 4);
        assert_eq!(rs.runs.len(), 1);
        assert!(rs.runs[0].transitions.is_empty());
    }

    #[test]
    fn run_replay_validates() {
        let pda = d1();
        let rs = enumerate_runs(&pda, &['a', 'a', 'b', 'b'], 4);
        assert_eq!(rs.runs.len(), 2);
        for r in &rs.runs {
            r.validate(&pda).unwrap();
        }
        assert_eq!(rs.runs.iter().filter(|r| r.is_accepting(&pda)).count(), 1);
    }

    #[test]
    fn tampered_run_fails_validation() {
        let pda = d1();
        let mut r = enumerate_runs(&pda, &['a', 'b'], 4).runs.remove(0);
        r.word.push('b');
        assert_eq!(r.validate(&pda), Err(RunError::WordMismatch));
    }

    #[test]
    fn steps_examples() {
        let pda = d1();
        // heights 0,1,2,3,4 for a^4
        let r = enumerate_runs(&pda, &['a'; 4], 0).runs.remove(0);
        assert_eq!(steps_of_run(&r), vec![0, 1, 2, 3, 4]);
        // heights 0,1,2,1
        let r = enumerate_runs(&pda, &['a', 'a', 'b'], 0).runs.remove(0);
        assert_eq!(r.heights(), vec![0, 1, 2, 1]);
        assert_eq!(steps_of_run(&r), vec![0, 1, 3]);
    }

    #[test]
    fn identity_splice() {
        let pda = d1();
        let r = enumerate_runs(&pda, &['a', 'a', 'b', 'b'], 4).runs.into_iter().find(|r| r.is_accepting(&pda)).unwrap();
        for s in steps_of_run(&r) {
            assert_eq!(splice(&pda, &r, s, &r, s).unwrap(), r);
        }
    }

    #[test]
    fn splice_mode_mismatch() {
        let pda = d1();
        let r1 = enumerate_runs(&pda, &['a'], 0).runs.remove(0);
        let r0 = Run::empty(&pda);
        // r1 at 1 has mode (q0, X); r0 at 0 has (q0, Z)
        assert_eq!(splice(&pda, &r1, 1, &r0, 0), Err(RunError::ModeMismatch));
        let r2 = enumerate_runs(&pda, &['a', 'a', 'b'], 0).runs.remove(0);
        assert_eq!(splice(&pda, &r2, 2, &r1, 1), Err(RunError::NotAStep(2)));
    }

    #[test]
    fn extensions_of_accepting_loop() {
        let mut b = PdaBuilder::new(&['b'], "q", "Z");
        b.accept("q");
        b.add("q", Some('b'), "Z", "q", &["Z"]);
        let pda = b.build();
        let t = accepting_run_extensions(&pda, &[], 'b', 4, 4, 4);
        let expected: BTreeSet<_> = (0..=4).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        assert_eq!(t.pair_set(), expected);
        for ((i, j), rp) in &t.pairs {
            rp.run.validate(&pda).unwrap();
            assert_eq!(rp.run.word.len(), *j);
            assert_eq!(rp.run.consumed_at(rp.prefix_position), *i);
        }
    }
}
