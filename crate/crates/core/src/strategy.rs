//! Determiner strategies behind one trait, looked up by name, and an
//! exhaustive checker that plays a strategy against every Spoiler word.

use crate::error::GameError;
use crate::game::{Arena, GameConfig, MoveOption, StrategyTable, Token};
use crate::pda::Pda;

/// What a strategy sees before moving its tokens on one letter.
pub struct MoveContext<'c> {
    pub pda: &'c Pda,
    /// Letters read so far.
    pub prefix: &'c [char],
    pub letter: char,
    pub tokens: &'c [Token],
    /// Every legal move of each token, aligned with `tokens`. Retiring
    /// (`target: None`) is always among them.
    pub options: &'c [Vec<MoveOption>],
}

pub trait DeterminerStrategy {
    fn name(&self) -> &str;

    /// New position of every token, aligned with `ctx.tokens`.
    fn choose(&mut self, ctx: &MoveContext) -> Result<Vec<Token>, GameError>;

    /// The strategy lets every token follow its unique continuation from
    /// this prefix on.
    fn forced_from(&self, _prefix: &[char]) -> bool {
        false
    }
}

/// Certifying first, then live, then the smallest target.
pub fn best_move(options: &[MoveOption]) -> Token {
    options
        .iter()
        .min_by(|x, y| {
            y.certifies
                .cmp(&x.certifies)
                .then_with(|| y.target.is_some().cmp(&x.target.is_some()))
                .then_with(|| x.target.cmp(&y.target))
        })
        .and_then(|m| m.target.clone())
}

pub struct Greedy;

impl DeterminerStrategy for Greedy {
    fn name(&self) -> &str {
        "greedy"
    }
    fn choose(&mut self, ctx: &MoveContext) -> Result<Vec<Token>, GameError> {
        Ok(ctx.options.iter().map(|o| best_move(o)).collect())
    }
}

/// At the first letter token `i` takes the `i`-th distinct live move (in
/// target order); afterwards every token plays greedily.
pub struct BranchPerToken;

impl DeterminerStrategy for BranchPerToken {
    fn name(&self) -> &str {
        "branch-per-token"
    }
    fn choose(&mut self, ctx: &MoveContext) -> Result<Vec<Token>, GameError> {
        if !ctx.prefix.is_empty() {
            return Greedy.choose(ctx);
        }
        let mut out = Vec::with_capacity(ctx.tokens.len());
        for (i, opts) in ctx.options.iter().enumerate() {
            let mut live: Vec<&Token> = opts.iter().map(|m| &m.target).filter(|t| t.is_some()).collect();
            live.sort();
            live.dedup();
            out.push(if live.is_empty() { best_move(opts) } else { live[i % live.len()].clone() });
        }
        Ok(out)
    }
}

/// Token `i` idles while fewer than `i` letters have been read, then
/// leaves the idle gadget at the first chance and never returns.
/// Idle states are `init`, `pre` and the `p_*` states of the prefix counter.
pub struct RoundRobin;

fn idle(pda: &Pda, t: &Token) -> bool {
    t.as_ref().is_some_and(|c| {
        let name = pda.state_name(c.state);
        name == "init" || name == "pre" || name.starts_with("p_")
    })
}

impl DeterminerStrategy for RoundRobin {
    fn name(&self) -> &str {
        "round-robin"
    }
    fn choose(&mut self, ctx: &MoveContext) -> Result<Vec<Token>, GameError> {
        if ctx.pda.state_id("init").is_none() {
            return Err(GameError::IllegalMove {
                strategy: self.name().into(),
                prefix: ctx.prefix.iter().collect(),
                detail: "the automaton has no `init` gadget".into(),
            });
        }
        let p = ctx.prefix.len();
        Ok(ctx
            .options
            .iter()
            .enumerate()
            .map(|(i, opts)| {
                let want_idle = p < i;
                opts.iter()
                    .filter(|m| m.target.is_some() && idle(ctx.pda, &m.target) == want_idle)
                    .min_by(|x, y| y.certifies.cmp(&x.certifies).then_with(|| x.target.cmp(&y.target)))
                    .and_then(|m| m.target.clone())
            })
            .collect())
    }
}

/// Plays a solver table. Tokens are matched to table rows by position, so
/// the order the checker keeps them in does not matter.
pub struct Solved {
    pub table: StrategyTable,
}

impl DeterminerStrategy for Solved {
    fn name(&self) -> &str {
        "solved"
    }

    fn choose(&mut self, ctx: &MoveContext) -> Result<Vec<Token>, GameError> {
        let prefix: String = ctx.prefix.iter().collect();
        let Some(node) = self.table.nodes.get(&prefix) else {
            return Greedy.choose(ctx);
        };
        let illegal = |detail: String| GameError::IllegalMove { strategy: "solved".into(), prefix: prefix.clone(), detail };
        let moves = node.moves.get(&ctx.letter).ok_or_else(|| illegal(format!("no entry for `{}`", ctx.letter)))?;
        let mut pool: Vec<Option<(&Token, &MoveOption)>> = node.tokens.iter().zip(moves).map(Some).collect();
        let mut out = Vec::with_capacity(ctx.tokens.len());
        for t in ctx.tokens {
            let slot = pool
                .iter_mut()
                .find(|s| s.is_some_and(|(u, _)| u == t))
                .ok_or_else(|| illegal("token positions differ from the table".into()))?;
            out.push(slot.take().expect("slot is occupied").1.target.clone());
        }
        Ok(out)
    }

    fn forced_from(&self, prefix: &[char]) -> bool {
        self.table.forced.contains(&prefix.iter().collect::<String>())
    }
}

/// Names accepted by [`strategy_by_name`].
pub const STRATEGY_NAMES: [&str; 4] = ["round-robin", "branch-per-token", "greedy", "solved"];

/// `solved` needs a table; the other strategies ignore it.
pub fn strategy_by_name(name: &str, table: Option<StrategyTable>) -> Result<Box<dyn DeterminerStrategy>, GameError> {
    match name {
        "round-robin" => Ok(Box::new(RoundRobin)),
        "branch-per-token" => Ok(Box::new(BranchPerToken)),
        "greedy" => Ok(Box::new(Greedy)),
        "solved" => table
            .map(|table| Box::new(Solved { table }) as Box<dyn DeterminerStrategy>)
            .ok_or_else(|| GameError::BadParameter("the solved strategy needs a strategy table".into())),
        other => Err(GameError::BadParameter(format!("unknown strategy `{other}` (known: {})", STRATEGY_NAMES.join(", ")))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailingPlay {
    /// Letters Spoiler played.
    pub word: String,
    /// The member prefix no token accepted.
    pub losing_prefix: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub failing_play: Option<FailingPlay>,
    pub plays: usize,
}

impl CheckReport {
    pub fn survives(&self) -> bool {
        self.failing_play.is_none()
    }
}

pub fn check_strategy(
    pda: &Pda,
    k: usize,
    strategy: &mut dyn DeterminerStrategy,
    horizon: usize,
    eps_budget: usize,
) -> Result<CheckReport, GameError> {
    check_strategy_with(pda, k, strategy, horizon, &GameConfig::with_budget(eps_budget))
}

/// Plays `strategy` against every Spoiler word of length at most
/// `horizon`. Stops at the first play where a member prefix goes unaccepted.
pub fn check_strategy_with(
    pda: &Pda,
    k: usize,
    strategy: &mut dyn DeterminerStrategy,
    horizon: usize,
    cfg: &GameConfig,
) -> Result<CheckReport, GameError> {
    if k == 0 {
        return Err(GameError::BadParameter("at least one token is required".into()));
    }
    let arena = Arena::new(pda, cfg.clone())?;
    let mut checker = Checker { arena: &arena, strategy, horizon, plays: 0 };
    let mut w = Vec::new();
    let failing_play = checker.visit(&arena.initial_tokens(k), &mut w)?;
    Ok(CheckReport { failing_play, plays: checker.plays })
}

struct Checker<'s, 'a> {
    arena: &'s Arena<'a>,
    strategy: &'s mut dyn DeterminerStrategy,
    horizon: usize,
    plays: usize,
}

impl Checker<'_, '_> {
    fn visit(&mut self, tokens: &[Token], w: &mut Vec<char>) -> Result<Option<FailingPlay>, GameError> {
        let word = |w: &[char]| w.iter().collect::<String>();
        if self.strategy.forced_from(w) && self.arena.covered(tokens, w) {
            self.plays += 1;
            return Ok(None);
        }
        let need = self.arena.member(w);
        if w.len() == self.horizon {
            self.plays += 1;
            if need && !tokens.iter().any(|t| self.arena.accepts_now(t).0) {
                return Ok(Some(FailingPlay { word: word(w), losing_prefix: word(w) }));
            }
            return Ok(None);
        }
        for &a in self.arena.alphabet() {
            let options: Vec<Vec<MoveOption>> = tokens.iter().map(|t| self.arena.legal(t, a)).collect();
            let ctx = MoveContext { pda: self.arena.pda, prefix: w, letter: a, tokens, options: &options };
            let chosen = self.strategy.choose(&ctx)?;
            if chosen.len() != tokens.len() {
                return Err(GameError::IllegalMove {
                    strategy: self.strategy.name().into(),
                    prefix: word(w),
                    detail: format!("moved {} tokens instead of {}", chosen.len(), tokens.len()),
                });
            }
            let mut certified = false;
            for (i, t) in chosen.iter().enumerate() {
                let m = options[i].iter().find(|m| &m.target == t).ok_or_else(|| GameError::IllegalMove {
                    strategy: self.strategy.name().into(),
                    prefix: word(w),
                    detail: format!("token {i} cannot reach {} on `{a}`", describe(self.arena.pda, t)),
                })?;
                certified |= m.certifies;
            }
            if need && !certified {
                let losing = word(w);
                w.push(a);
                let played = word(w);
                w.pop();
                self.plays += 1;
                return Ok(Some(FailingPlay { word: played, losing_prefix: losing }));
            }
            w.push(a);
            let r = self.visit(&chosen, w)?;
            w.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
}

pub fn describe(pda: &Pda, t: &Token) -> String {
    match t {
        Some(c) => pda.format_configuration(c),
        None => "retired".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{mod_pda, multiple_dpda, suffix_one_pda, union_pda};
    use crate::game::solve;

    #[test]
    fn any_single_token_strategy_fails_on_union() {
        let p = union_pda(1).unwrap();
        for name in ["greedy", "branch-per-token"] {
            let mut s = strategy_by_name(name, None).unwrap();
            let r = check_strategy(&p, 1, s.as_mut(), 3, 16).unwrap();
            let f = r.failing_play.unwrap();
            assert!(f.word.len() <= 3, "{name}: {f:?}");
        }
    }

    #[test]
    fn branch_per_token_covers_union() {
        for k in 1..=3 {
            let p = union_pda(k).unwrap();
            let r = check_strategy(&p, k + 1, &mut BranchPerToken, 2 * k + 3, 16).unwrap();
            assert!(r.survives(), "k={k}: {:?}", r.failing_play);
        }
    }

    #[test]
    fn round_robin_on_counters() {
        for n in 1..=3 {
            let mut rr = RoundRobin;
            assert!(check_strategy(&suffix_one_pda(n).unwrap(), n, &mut rr, 2 * n + 2, 64).unwrap().survives());
            assert!(check_strategy(&mod_pda(n).unwrap(), n, &mut rr, 2 * n + 2, 64).unwrap().survives());
        }
    }

    #[test]
    fn round_robin_needs_gadget() {
        let p = multiple_dpda(1).unwrap();
        assert!(matches!(
            check_strategy(&p, 1, &mut RoundRobin, 2, 16),
            Err(GameError::IllegalMove { .. })
        ));
    }

    #[test]
    fn solved_table_survives() {
        let p = union_pda(2).unwrap();
        let t = solve(&p, 3, 7, 16).unwrap().strategy.unwrap();
        let mut s = strategy_by_name("solved", Some(t)).unwrap();
        assert!(check_strategy(&p, 3, s.as_mut(), 7, 16).unwrap().survives());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(strategy_by_name("oracle", None), Err(GameError::BadParameter(_))));
    }
}
