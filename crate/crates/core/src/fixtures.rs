//! Small reference systems used across the test suites and the
//! documentation. They cover the four structural situations the
//! analysis commands distinguish: a loop with no exit, a loop with an
//! exit, a period-two permutation, and a finite sink.

use crate::dynamics::{Action, Gbds};
use crate::lattice::Algebra;

/// One atom `v`, one letter `a`, θ_a(v) = {v}: a loop with no exit.
pub fn f1() -> Gbds {
    let alg = Algebra::new(vec!["v".into()]).unwrap();
    let act = Action::new(&alg, vec![alg.singleton(0)]).unwrap();
    Gbds::new(
        alg.clone(),
        vec!["a".into()],
        vec![act],
        vec![alg.singleton(0)],
    )
    .unwrap()
}

/// One atom `v`, letters `a`, `b`, both fixing `v`: a loop with an exit.
pub fn f2() -> Gbds {
    let alg = Algebra::new(vec!["v".into()]).unwrap();
    let act_a = Action::new(&alg, vec![alg.singleton(0)]).unwrap();
    let act_b = Action::new(&alg, vec![alg.singleton(0)]).unwrap();
    Gbds::new(
        alg.clone(),
        vec!["a".into(), "b".into()],
        vec![act_a, act_b],
        vec![alg.singleton(0), alg.singleton(0)],
    )
    .unwrap()
}

/// Atoms `1`, `2`, one letter `a` swapping them: a period-two cycle.
pub fn f3() -> Gbds {
    let alg = Algebra::new(vec!["1".into(), "2".into()]).unwrap();
    let act = Action::new(&alg, vec![alg.singleton(1), alg.singleton(0)]).unwrap();
    Gbds::new(alg.clone(), vec!["a".into()], vec![act], vec![alg.top()]).unwrap()
}

/// Atoms `1`, `2`, one letter `a` with 1 ↦ {2}, 2 ↦ ∅: a finite sink.
pub fn f4() -> Gbds {
    let alg = Algebra::new(vec!["1".into(), "2".into()]).unwrap();
    let act = Action::new(&alg, vec![alg.singleton(1), alg.empty()]).unwrap();
    Gbds::new(alg.clone(), vec!["a".into()], vec![act], vec![alg.top()]).unwrap()
}

pub fn all() -> Vec<Gbds> {
    vec![f1(), f2(), f3(), f4()]
}

pub fn named() -> Vec<(&'static str, Gbds)> {
    vec![("f1", f1()), ("f2", f2()), ("f3", f3()), ("f4", f4())]
}
