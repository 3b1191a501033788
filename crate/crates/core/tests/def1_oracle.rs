//! Exhaustive check that abstract evaluation agrees with concrete
//! evaluation under every assignment of the allocator variables.

mod common;

use common::{oracle_cases, run_oracle_case};

fn check_program(name: &str) {
    let cases: Vec<_> = oracle_cases()
        .into_iter()
        .filter(|c| c.program == name)
        .collect();
    assert!(!cases.is_empty());
    for c in &cases {
        if let Err(e) = run_oracle_case(c) {
            panic!("{e}");
        }
    }
}

#[test]
fn and2() {
    check_program("and2");
}

#[test]
fn maybe() {
    check_program("maybe");
}

#[test]
fn double() {
    check_program("double");
}

#[test]
fn list_append_and_reverse() {
    check_program("lists");
}

#[test]
fn equal_term() {
    check_program("terms");
}

#[test]
fn subword() {
    check_program("subword");
}
