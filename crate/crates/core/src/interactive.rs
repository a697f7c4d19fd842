//! Text-mode play against the solver. Input and output are generic so a
//! session can be scripted.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, GameError};
use crate::game::{config_doc, config_from_doc, solve_in, Arena, ConfigDoc, GameConfig, GameVerdict, Token};
use crate::pda::Pda;
use crate::strategy::{describe, strategy_by_name, DeterminerStrategy, MoveContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Spoiler,
    Determiner,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptStep {
    pub letter: char,
    /// Token positions after the letter; `None` for retired tokens.
    pub tokens: Vec<Option<ConfigDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SessionEnd {
    Quit,
    DeterminerLost { losing_prefix: String },
    HorizonReached,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub human: Role,
    pub tokens: usize,
    pub steps: Vec<TranscriptStep>,
    pub end: SessionEnd,
}

impl Transcript {
    pub fn word(&self) -> String {
        self.steps.iter().map(|s| s.letter).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }

    pub fn from_json(text: &str) -> Result<Transcript, FormatError> {
        serde_json::from_str(text).map_err(FormatError::from_json)
    }
}

/// Replays a transcript, checking that every recorded move is legal.
/// Returns the first member prefix no token accepted, if any.
pub fn replay_transcript(pda: &Pda, t: &Transcript, cfg: &GameConfig) -> Result<Option<String>, GameError> {
    let arena = Arena::new(pda, cfg.clone())?;
    let mut tokens = arena.initial_tokens(t.tokens);
    let mut w: Vec<char> = Vec::new();
    for step in &t.steps {
        let bad = |detail: String| GameError::IllegalMove { strategy: "transcript".into(), prefix: w.iter().collect(), detail };
        if step.tokens.len() != tokens.len() {
            return Err(bad("token count changed".into()));
        }
        let mut certified = false;
        let mut next = Vec::with_capacity(tokens.len());
        for (old, new) in tokens.iter().zip(&step.tokens) {
            let new: Token = new.as_ref().map(|d| config_from_doc(pda, d)).transpose().map_err(|e| bad(e.to_string()))?;
            let m = arena
                .legal(old, step.letter)
                .into_iter()
                .find(|m| m.target == new)
                .ok_or_else(|| bad(format!("{} is not reachable on `{}`", describe(pda, &new), step.letter)))?;
            certified |= m.certifies;
            next.push(new);
        }
        if arena.member(&w) && !certified {
            return Ok(Some(w.iter().collect()));
        }
        tokens = next;
        w.push(step.letter);
    }
    if arena.member(&w) && !tokens.iter().any(|t| arena.accepts_now(t).0) {
        return Ok(Some(w.iter().collect()));
    }
    Ok(None)
}

/// Runs one session. The machine plays from a solver table for `horizon`
/// when one exists, greedily otherwise. End of input counts as `quit`.
pub fn play_interactive<R: BufRead, W: Write>(
    pda: &Pda,
    k: usize,
    human: Role,
    horizon: usize,
    cfg: &GameConfig,
    input: &mut R,
    output: &mut W,
) -> Result<Transcript, GameError> {
    let arena = Arena::new(pda, cfg.clone())?;
    let outcome = solve_in(&arena, k, horizon)?;
    let mut session = Session { arena: &arena, tokens: arena.initial_tokens(k), word: Vec::new(), steps: Vec::new() };
    let end = match human {
        Role::Spoiler => {
            let mut machine = strategy_by_name(if outcome.strategy.is_some() { "solved" } else { "greedy" }, outcome.strategy)?;
            session.human_spoiler(machine.as_mut(), input, output)?
        }
        Role::Determiner => {
            let script: Vec<char> = match &outcome.verdict {
                GameVerdict::SpoilerWins { witness, .. } => witness.chars().collect(),
                _ => Vec::new(),
            };
            session.human_determiner(&script, horizon, input, output)?
        }
    };
    let transcript = Transcript { human, tokens: k, steps: session.steps, end };
    say(output, &format!("transcript: {}", serde_json::to_string(&transcript).expect("transcripts always serialize")));
    Ok(transcript)
}

fn say<W: Write>(out: &mut W, line: &str) {
    // a closed output must not abort the session
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn read_line<R: BufRead>(input: &mut R) -> Option<String> {
    let mut s = String::new();
    match input.read_line(&mut s) {
        Ok(0) | Err(_) => None,
        Ok(_) => Some(s.trim().to_string()),
    }
}

struct Session<'s, 'a> {
    arena: &'s Arena<'a>,
    tokens: Vec<Token>,
    word: Vec<char>,
    steps: Vec<TranscriptStep>,
}

impl Session<'_, '_> {
    fn prefix(&self) -> String {
        self.word.iter().collect()
    }

    fn show_tokens<W: Write>(&self, out: &mut W) {
        for (i, t) in self.tokens.iter().enumerate() {
            say(out, &format!("  token {i}: {}", describe(self.arena.pda, t)));
        }
    }

    /// Applies a joint move; returns the losing prefix if Determiner lost.
    fn apply(&mut self, letter: char, next: Vec<Token>, certified: bool) -> Option<String> {
        let lost_before = self.arena.member(&self.word) && !certified;
        let before = self.prefix();
        self.steps.push(TranscriptStep {
            letter,
            tokens: next.iter().map(|t| t.as_ref().map(|c| config_doc(self.arena.pda, c))).collect(),
        });
        self.tokens = next;
        self.word.push(letter);
        if lost_before {
            return Some(before);
        }
        // no later move can accept a member prefix no token can accept now
        if self.arena.member(&self.word) && !self.tokens.iter().any(|t| self.arena.accepts_now(t).0) {
            return Some(self.prefix());
        }
        None
    }

    fn human_spoiler<R: BufRead, W: Write>(
        &mut self,
        machine: &mut dyn DeterminerStrategy,
        input: &mut R,
        out: &mut W,
    ) -> Result<SessionEnd, GameError> {
        let alphabet: String = self.arena.alphabet().iter().collect();
        say(out, &format!("you are Spoiler; letters: {alphabet}; type `quit` to stop"));
        self.show_tokens(out);
        loop {
            say(out, &format!("[{}] letter>", self.prefix()));
            let Some(line) = read_line(input) else { return Ok(SessionEnd::Quit) };
            if line == "quit" {
                return Ok(SessionEnd::Quit);
            }
            let mut chars = line.chars();
            let (Some(a), None) = (chars.next(), chars.next()) else {
                say(out, "enter exactly one letter");
                continue;
            };
            if !self.arena.alphabet().contains(&a) {
                say(out, &format!("`{a}` is not in the alphabet {alphabet}"));
                continue;
            }
            let options: Vec<_> = self.tokens.iter().map(|t| self.arena.legal(t, a)).collect();
            let ctx = MoveContext { pda: self.arena.pda, prefix: &self.word, letter: a, tokens: &self.tokens, options: &options };
            let next = machine.choose(&ctx)?;
            let mut certified = false;
            for (opts, t) in options.iter().zip(&next) {
                let m = opts.iter().find(|m| &m.target == t).ok_or_else(|| GameError::IllegalMove {
                    strategy: machine.name().into(),
                    prefix: self.prefix(),
                    detail: format!("{} is not reachable on `{a}`", describe(self.arena.pda, t)),
                })?;
                certified |= m.certifies;
            }
            let lost = self.apply(a, next, certified);
            self.show_tokens(out);
            if let Some(p) = lost {
                say(out, &format!("Determiner loses: \"{p}\" is in the language and no token accepts it"));
                return Ok(SessionEnd::DeterminerLost { losing_prefix: p });
            }
        }
    }

    fn human_determiner<R: BufRead, W: Write>(
        &mut self,
        script: &[char],
        horizon: usize,
        input: &mut R,
        out: &mut W,
    ) -> Result<SessionEnd, GameError> {
        say(out, &format!("you are Determiner with {} tokens; type `quit` to stop", self.tokens.len()));
        if self.arena.member(&self.word) && !self.tokens.iter().any(|t| self.arena.accepts_now(t).0) {
            say(out, "Determiner loses: the empty word is in the language and no token accepts it");
            return Ok(SessionEnd::DeterminerLost { losing_prefix: String::new() });
        }
        while self.word.len() < horizon {
            let a = script.get(self.word.len()).copied().unwrap_or(self.arena.alphabet()[0]);
            say(out, &format!("[{}] Spoiler plays `{a}`", self.prefix()));
            let options: Vec<_> = self.tokens.iter().map(|t| self.arena.legal(t, a)).collect();
            for (i, opts) in options.iter().enumerate() {
                say(out, &format!("  token {i} at {}:", describe(self.arena.pda, &self.tokens[i])));
                for (j, m) in opts.iter().enumerate() {
                    let mark = if m.certifies { " (accepts)" } else { "" };
                    say(out, &format!("    {j}: {}{mark}", describe(self.arena.pda, &m.target)));
                }
            }
            let chosen = loop {
                say(out, &format!("choose {} option numbers>", options.len()));
                let Some(line) = read_line(input) else { return Ok(SessionEnd::Quit) };
                if line == "quit" {
                    return Ok(SessionEnd::Quit);
                }
                let picks: Option<Vec<usize>> = line.split_whitespace().map(|s| s.parse().ok()).collect();
                match picks {
                    Some(p) if p.len() == options.len() && p.iter().zip(&options).all(|(&j, o)| j < o.len()) => break p,
                    _ => say(out, "expected one valid option number per token"),
                }
            };
            let certified = chosen.iter().zip(&options).any(|(&j, o)| o[j].certifies);
            let next = chosen.iter().zip(&options).map(|(&j, o)| o[j].target.clone()).collect();
            if let Some(p) = self.apply(a, next, certified) {
                say(out, &format!("Determiner loses: \"{p}\" is in the language and no token accepts it"));
                return Ok(SessionEnd::DeterminerLost { losing_prefix: p });
            }
        }
        say(out, &format!("Determiner survived to horizon {horizon}"));
        Ok(SessionEnd::HorizonReached)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::union_pda;
    use std::io::Cursor;

    fn run(pda: &Pda, k: usize, role: Role, script: &str) -> (Transcript, String) {
        let mut out = Vec::new();
        let t = play_interactive(pda, k, role, 4, &GameConfig::default(), &mut Cursor::new(script), &mut out).unwrap();
        (t, String::from_utf8(out).unwrap())
    }

    #[test]
    fn machine_loses_at_abb() {
        let p = union_pda(1).unwrap();
        let (t, text) = run(&p, 1, Role::Spoiler, "a\nb\nb\n");
        assert_eq!(t.end, SessionEnd::DeterminerLost { losing_prefix: "abb".into() });
        assert!(text.contains("Determiner loses"));
        assert_eq!(replay_transcript(&p, &t, &GameConfig::default()).unwrap(), Some("abb".into()));
    }

    #[test]
    fn bad_letter_reprompts() {
        let p = union_pda(1).unwrap();
        let (t, text) = run(&p, 2, Role::Spoiler, "z\na\nquit\n");
        assert!(text.contains("not in the alphabet"));
        assert_eq!(t.word(), "a");
        assert_eq!(t.end, SessionEnd::Quit);
        assert_eq!(Transcript::from_json(&t.to_json()).unwrap(), t);
        assert_eq!(replay_transcript(&p, &t, &GameConfig::default()).unwrap(), None);
    }

    #[test]
    fn human_determiner_gets_witness_letters() {
        let p = union_pda(1).unwrap();
        let (t, text) = run(&p, 1, Role::Determiner, "x\n0\n0\n0\n0\n");
        assert!(text.contains("expected one valid option number"));
        assert!(matches!(t.end, SessionEnd::DeterminerLost { .. }));
        assert!(t.word().starts_with("ab"));
    }
}
