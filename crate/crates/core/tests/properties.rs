mod common;

use proptest::prelude::*;

use common::survivable;
use explorable::game::{solve, GameVerdict};
use explorable::grammar::exact_accepts;
use explorable::oracles::all_words;
use explorable::pda::{Pda, PdaBuilder};
use explorable::run::{bounded_accepts, enumerate_runs, read_letter, Verdict};
use explorable::strategy::{check_strategy, strategy_by_name};

const STATES: [&str; 3] = ["q0", "q1", "q2"];
const SYMBOLS: [&str; 2] = ["Z", "X"];

type Edge = (usize, Option<usize>, usize, usize, Vec<usize>);

fn edge() -> impl Strategy<Value = Edge> {
    (0..3usize, proptest::option::of(0..2usize), 0..2usize, 0..3usize, proptest::collection::vec(0..2usize, 0..=2))
        // ε-moves never grow the stack, so every ε-closure is finite
        .prop_map(|(f, i, p, t, mut push)| {
            if i.is_none() {
                push.truncate(1);
            }
            (f, i, p, t, push)
        })
}

fn build(edges: &[Edge], accepting: &[bool]) -> Pda {
    let mut b = PdaBuilder::new(&['a', 'b'], "q0", "Z");
    for x in SYMBOLS {
        b.symbol(x);
    }
    for s in STATES {
        b.state(s);
    }
    for (q, &acc) in accepting.iter().enumerate() {
        if acc {
            b.accept(STATES[q]);
        }
    }
    for (f, i, p, t, push) in edges {
        let push: Vec<&str> = push.iter().map(|&x| SYMBOLS[x]).collect();
        b.add(STATES[*f], i.map(|x| ['a', 'b'][x]), SYMBOLS[*p], STATES[*t], &push);
    }
    b.build()
}

fn pda() -> impl Strategy<Value = Pda> {
    (proptest::collection::vec(edge(), 1..9), proptest::collection::vec(any::<bool>(), 3)).prop_map(|(e, a)| build(&e, &a))
}

/// ε-moves only go to later states, so ε-paths have at most two steps and
/// the path-enumerating run oracle stays small.
fn pda_without_eps_cycles() -> impl Strategy<Value = Pda> {
    (proptest::collection::vec(edge(), 1..9), proptest::collection::vec(any::<bool>(), 3)).prop_map(|(mut e, a)| {
        for (f, i, _, t, _) in e.iter_mut() {
            if i.is_none() && *t <= *f {
                *i = Some(0);
            }
        }
        build(&e, &a)
    })
}

fn pda_without_eps() -> impl Strategy<Value = Pda> {
    (proptest::collection::vec(edge(), 1..9), proptest::collection::vec(any::<bool>(), 3)).prop_map(|(mut e, a)| {
        for (_, i, _, _, _) in e.iter_mut() {
            i.get_or_insert(0);
        }
        build(&e, &a)
    })
}

fn word() -> impl Strategy<Value = Vec<char>> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b')], 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, max_global_rejects: 1 << 16, ..ProptestConfig::default() })]

    #[test]
    fn bounded_simulation_agrees_with_exact_membership(p in pda(), w in word()) {
        let exact = exact_accepts(&p, &w);
        match bounded_accepts(&p, &w, 64) {
            Verdict::Accept => prop_assert!(exact),
            Verdict::Reject => prop_assert!(!exact),
            Verdict::Unknown => {}
        }
    }

    #[test]
    fn json_round_trip(p in pda()) {
        prop_assert_eq!(Pda::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn deterministic_modes_give_at_most_one_move(p in pda(), w in word()) {
        prop_assume!(p.validate().deterministic);
        // the runs on a word are the prefixes of a single run
        let mut runs: Vec<Vec<usize>> = enumerate_runs(&p, &w, 64).runs.into_iter().map(|r| r.transitions).collect();
        runs.sort_by_key(Vec::len);
        prop_assert!(runs.windows(2).all(|x| x[1].starts_with(&x[0])));
        let c = p.initial_configuration();
        for a in ['a', 'b'] {
            prop_assert!(read_letter(&p, &c, a, 64).moves.len() <= 1);
        }
    }

    #[test]
    fn game_is_monotone_and_sound(p in pda_without_eps_cycles()) {
        let mut wins = [[false; 4]; 3];
        for k in 1..=2 {
            for h in 0..=3 {
                let out = solve(&p, k, h, 64).unwrap();
                match &out.verdict {
                    GameVerdict::DeterminerWins { .. } => {
                        let mut s = strategy_by_name("solved", out.strategy.clone()).unwrap();
                        prop_assert!(check_strategy(&p, k, s.as_mut(), h, 64).unwrap().survives());
                        wins[k][h] = true;
                    }
                    GameVerdict::SpoilerWins { witness, losing_prefix, adaptive } => {
                        let chars: Vec<char> = losing_prefix.chars().collect();
                        prop_assert!(exact_accepts(&p, &chars));
                        if !adaptive {
                            prop_assert!(!survivable(&p, k, &witness.chars().collect::<Vec<_>>(), 64));
                        }
                    }
                    GameVerdict::Unknown { .. } => return Err(TestCaseError::reject("truncated")),
                }
            }
        }
        for h in 0..=3 {
            prop_assert!(!wins[1][h] || wins[2][h]);
        }
        for k in 1..=2 {
            for h in 0..3 {
                prop_assert!(wins[k][h] || !wins[k][h + 1]);
            }
        }
    }

    #[test]
    fn run_count_bound_when_epsilon_free(p in pda_without_eps()) {
        prop_assert!(p.is_epsilon_free());
        let m = p.max_out_degree();
        for w in all_words(&['a', 'b'], 4) {
            prop_assert!(enumerate_runs(&p, &w, 64).runs.len() <= m.pow(w.len() as u32));
        }
    }
}
