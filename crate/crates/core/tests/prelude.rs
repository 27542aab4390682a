use proptest::prelude::*;

use qlam_core::prelude::{self, church_nat, decode_list_value, decode_nat_value, eval_nat, APPEND_NAIVE};
use qlam_core::reducer::{self, reduce_to_normal, Outcome};
use qlam_core::{check_well_formed, parse, Calculus, RegisterState, Term};

fn q(src: &str) -> Term {
    parse(src).unwrap()
}

fn value(src: &str) -> Term {
    match reduce_to_normal(&q(src), 200_000) {
        Outcome::Normal(s) if s.len() == 1 => s.first().unwrap().clone(),
        other => panic!("{src}: {other:?}"),
    }
}

const TALLY: &str = "fix !(\\!f.\\n. case n of (0n -> empty, suc m -> 1 : f m))";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Counting through `case` inside the calculus agrees with the encoder.
    #[test]
    fn numerals_unfold_by_case(n in 0u64..=32) {
        let tally = value(&format!("({TALLY}) {n}n"));
        let bits = decode_list_value(&tally).unwrap();
        prop_assert_eq!(bits.len() as u64, n);
        prop_assert!(bits.iter().all(|b| b.as_bit() == Some(1)));
        prop_assert_eq!(decode_nat_value(&church_nat(n)), Some(n));
    }

    #[test]
    fn addition(m in 0u64..8, n in 0u64..8) {
        prop_assert_eq!(eval_nat(&q(&format!("add {m}n {n}n"))), Some(m + n));
        prop_assert_eq!(eval_nat(&q(&format!("add_rec {m}n {n}n"))), Some(m + n));
    }
}

#[test]
fn predecessor() {
    assert_eq!(value("pred 0n"), church_nat(0));
    assert_eq!(value("pred 5n"), church_nat(4));
}

#[test]
fn tuples_and_let() {
    assert_eq!(value("let (x, y) = [2n, 3n] in add x y"), church_nat(5));
    assert_eq!(value("[1, 0]"), q("#[1, 0]"));
    assert_eq!(value("let h:t = [1, 0, 1] in t"), q("#[0, 1]"));
}

#[test]
fn list_functions() {
    assert_eq!(value("append [0, 1] [1]"), q("#[0, 1, 1]"));
    assert_eq!(value("append [] [1]"), q("#[1]"));
    assert_eq!(value("reverse [1, 1, 0]"), q("#[0, 1, 1]"));
    assert_eq!(value("reverse []"), q("#[]"));
}

#[test]
fn definitions_are_well_formed() {
    for name in prelude::names() {
        let t = prelude::get(name);
        assert!(t.is_closed(), "{name}");
        assert!(check_well_formed(&t).is_ok(), "{name}: {:?}", check_well_formed(&t));
    }
    assert!(check_well_formed(&q(APPEND_NAIVE)).is_err());
}

#[test]
fn embedded_classical_terms() {
    let run = |src: &str| {
        let r = reducer::reduce(RegisterState::single(q(src)), Calculus::Intermediate, 100);
        r.outcome.state().first().unwrap().clone()
    };
    assert_eq!(run("id apple"), Term::free("apple"));
    assert_eq!(run("(\\x.\\y.x) apple banana"), Term::free("apple"));
    assert_eq!(run("apply (\\x. x) banana"), Term::free("banana"));
}
