mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use sigma2::decider::{decide, decide_fragment, Caps, DecideError, Truth};
use sigma2::formula::{parse_sentence, QfFormula, Sigma2Sentence, Term};
use sigma2::usl::{canonicalize, enumerate_end_extensions, enumerate_generated};

const EXIST: [&str; 2] = ["x", "u"];
const UNIV: [&str; 2] = ["y", "w"];

fn sentence() -> impl Strategy<Value = Sigma2Sentence> {
    (0..=2usize, 0..=2usize).prop_flat_map(|(e, a)| {
        let vars: Vec<&'static str> = EXIST[..e].iter().chain(&UNIV[..a]).copied().collect();
        let leaf = if vars.is_empty() {
            Just(Term::Zero).boxed()
        } else {
            prop_oneof![Just(Term::Zero), prop::sample::select(vars).prop_map(Term::var)].boxed()
        };
        let term = leaf.prop_recursive(2, 4, 2, |t| (t.clone(), t).prop_map(|(a, b)| Term::join(a, b)));
        let atom = (term.clone(), term).prop_map(|(a, b)| QfFormula::Leq(a, b));
        let body = atom.prop_recursive(3, 10, 3, |f| {
            prop_oneof![
                f.clone().prop_map(QfFormula::negate),
                prop::collection::vec(f.clone(), 2..4).prop_map(QfFormula::And),
                prop::collection::vec(f, 2..4).prop_map(QfFormula::Or),
            ]
        });
        body.prop_map(move |b| {
            let ev = EXIST[..e].iter().map(|v| v.to_string()).collect();
            let av = UNIV[..a].iter().map(|v| v.to_string()).collect();
            Sigma2Sentence::new(ev, av, b).unwrap()
        })
    })
}

fn truth(text: &str) -> Truth {
    decide(&parse_sentence(text).unwrap(), Caps::default()).unwrap().truth
}

#[test]
fn fragment_examples() {
    let fragment = |t: &str| decide_fragment(&parse_sentence(t).unwrap(), Caps::default()).unwrap().truth;
    assert_eq!(fragment("A y. 0 <= y"), Truth::True);
    assert_eq!(fragment("A x y. x <= x + y"), Truth::True);
    assert_eq!(fragment("E x. !(x <= 0)"), Truth::True);
    assert_eq!(fragment("A x y. x <= y | y <= x"), Truth::False);
    assert_eq!(fragment("0 <= 0"), Truth::True);
    assert_eq!(fragment("!(0 = 0)"), Truth::False);
    let mixed = parse_sentence("E x. A y. y <= x").unwrap();
    assert_eq!(decide_fragment(&mixed, Caps::default()), Err(DecideError::NotAFragment));
}

#[test]
fn sigma2_examples() {
    assert_eq!(truth("E x y. !(x <= y) & !(y <= x)"), Truth::True);
    assert_eq!(truth("E x. A y. y <= x"), Truth::False);
    assert_eq!(truth("E x. A y. x <= y"), Truth::True);
    // the rewrite of y <= x -> y = x | y = 0
    assert_eq!(truth("E x. !(x <= 0) & A y. (!(y <= x) | y = x | y <= 0)"), Truth::True);
    assert_eq!(truth("E x. A y. !(x <= 0) & (x <= y | y <= x)"), Truth::False);
    // an exact pair: x, u incomparable and everything below both is 0
    assert_eq!(truth("E x u. !(x <= u) & !(u <= x) & A y. (!(y <= x) | !(y <= u) | y <= 0)"), Truth::True);
}

#[test]
fn caps_bound_the_search() {
    let s = parse_sentence("E x u. A y w. x <= y | w <= u").unwrap();
    let tight = decide(&s, Caps { max_vars: 3, max_size: 33 }).unwrap();
    assert_eq!(tight.truth, Truth::UndecidedAtCap);
    assert!(tight.caps_used.truncated);
    let small = decide(&parse_sentence("E x u. !(x <= u) & !(u <= x)").unwrap(), Caps { max_vars: 5, max_size: 3 });
    assert_eq!(small.unwrap().truth, Truth::UndecidedAtCap);
}

#[test]
fn unbound_variables_are_rejected() {
    let s = Sigma2Sentence {
        exist_vars: vec!["x".into()],
        univ_vars: vec![],
        body: QfFormula::Leq(Term::var("x"), Term::var("q")),
    };
    assert_eq!(decide(&s, Caps::default()).unwrap_err(), DecideError::Unbound("q".into()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn renaming_does_not_matter(s in sentence()) {
        let renamed = s.renamed(&|v| format!("{v}_{}", v.len()));
        let a = decide(&s, Caps::default()).unwrap();
        let b = decide(&renamed, Caps::default()).unwrap();
        prop_assert_eq!(a.truth, b.truth);
        prop_assert_eq!(a.counterexamples.len(), b.counterexamples.len());
    }

    #[test]
    fn larger_caps_agree(s in sentence()) {
        let small = decide(&s, Caps { max_vars: 5, max_size: 5 }).unwrap();
        let big = decide(&s, Caps::default()).unwrap();
        prop_assert_ne!(big.truth, Truth::UndecidedAtCap);
        if small.truth != Truth::UndecidedAtCap {
            prop_assert_eq!(small.truth, big.truth);
        }
    }

    #[test]
    fn verdicts_come_with_evidence(s in sentence()) {
        let v = decide(&s, Caps::default()).unwrap();
        match v.truth {
            Truth::True => {
                let w = v.witness.unwrap();
                prop_assert!(w.valuation.generates(&w.usl));
                let ext = enumerate_end_extensions(&w.usl, &w.valuation, &s.univ_vars, 64).unwrap();
                for n in &ext.items {
                    prop_assert!(is_end_extension(&w.usl, &w.valuation, &n.usl, &n.valuation));
                    prop_assert!(holds(&s.body, &n.usl, &env_of(&n.valuation)));
                }
            }
            Truth::False => {
                let all = enumerate_generated(s.exist_vars.len(), 64).unwrap();
                prop_assert_eq!(v.counterexamples.len(), all.items.len());
                let mut seen = BTreeSet::new();
                for c in &v.counterexamples {
                    let (m, n) = (&c.candidate, &c.extension);
                    prop_assert!(is_end_extension(&m.usl, &m.valuation, &n.usl, &n.valuation));
                    prop_assert!(!holds(&s.body, &n.usl, &env_of(&n.valuation)));
                    seen.insert(canonicalize(&m.usl, Some(&m.valuation)).unwrap());
                }
                prop_assert_eq!(seen.len(), all.items.len());
            }
            Truth::UndecidedAtCap => prop_assert!(false, "small sentence left undecided"),
        }
    }
}
