use explorable::grammar::MembershipOracle;
use explorable::invalc::{invalc_branches, invalc_pda};
use explorable::oracles::all_words;
use explorable::turing::{demo_tm, invalc_oracle, valc_string};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sizes_are_reported() {
    let tm = demo_tm();
    let p = invalc_pda(&tm).unwrap();
    let (b, c) = invalc_branches(&tm).unwrap();
    eprintln!("invalc: {} states, {} symbols, branches {} / {}", p.states().len(), p.stack_alphabet().len(), b.states().len(), c.states().len());
    assert!(p.validate().is_well_formed());
}

#[test]
fn exhaustive_short_strings() {
    let tm = demo_tm();
    let oracle = MembershipOracle::new(&invalc_pda(&tm).unwrap()).unwrap();
    for w in all_words(&tm.encoding_alphabet(), 5) {
        let s: String = w.iter().collect();
        assert_eq!(oracle.accepts(&w), invalc_oracle(&tm, &s), "{s}");
    }
}

#[test]
fn random_strings_and_mutations() {
    let tm = demo_tm();
    let oracle = MembershipOracle::new(&invalc_pda(&tm).unwrap()).unwrap();
    let alphabet = tm.encoding_alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3000 {
        let len = rng.gen_range(0..=10);
        let w: Vec<char> = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let s: String = w.iter().collect();
        assert_eq!(oracle.accepts(&w), invalc_oracle(&tm, &s), "{s}");
    }
    for x in [vec![], vec!['1']] {
        let v: Vec<char> = valc_string(&tm, &x, 50).unwrap().chars().collect();
        assert!(!oracle.accepts(&v));
        for i in 0..v.len() {
            for &a in &alphabet {
                let mut m = v.clone();
                m[i] = a;
                let s: String = m.iter().collect();
                assert_eq!(oracle.accepts(&m), invalc_oracle(&tm, &s), "{s}");
            }
        }
    }
}
