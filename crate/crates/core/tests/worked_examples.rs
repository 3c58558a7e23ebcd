use std::collections::BTreeMap;

use coherent_core::closure::Rules;
use coherent_core::oracle::{self, DEFAULT_CAP};
use coherent_core::scenarios::{
    gen_dated_rewards, gen_homothetic_grid, gen_koopmans, gen_koopmans_core, gen_two_track,
};
use coherent_core::solver::{EliminationReason, UnsatCertificate};
use coherent_core::*;

fn id(s: &Scenario, label: &str) -> ElementId {
    s.find(label)
        .unwrap_or_else(|| panic!("no element {label}"))
}

#[test]
fn two_track_document_loads() {
    let doc = gen_two_track(2).unwrap().to_json();
    let s = load_scenario(&doc).unwrap();
    assert_eq!(s.len(), 10);
    assert_eq!(s.generators().len(), 1);
    assert!(s.is_commutative());
    assert!(check_commutativity(&s).is_empty());
}

#[test]
fn shift_word_moves_along_the_track() {
    let s = gen_two_track(2).unwrap();
    let mut exps = BTreeMap::new();
    exps.insert("m".to_owned(), 2);
    let m2 = Word::from_exponents(&s, &exps).unwrap();
    assert_eq!(apply_word(&s, &m2, id(&s, "(a,0)")), Some(id(&s, "(a,2)")));
    assert_eq!(apply_word(&s, &m2, id(&s, "(a,1)")), None);
    assert_eq!(apply_word(&s, &Word::identity(), 3), Some(3));
}

#[test]
fn two_track_seed_and_closure() {
    let s = gen_two_track(5).unwrap();
    let st = seed(&s);
    for z in -5..5 {
        let (a, b) = (
            id(&s, &format!("(a,{z})")),
            id(&s, &format!("(b,{})", z + 1)),
        );
        assert!(st.strict(a, b) && st.weak(a, b));
        let (a, b) = (
            id(&s, &format!("(a,{})", z + 1)),
            id(&s, &format!("(b,{z})")),
        );
        assert!(st.strict(a, b));
    }
    let closed = saturate(&st, &s, true);
    assert!(is_consistent(&closed));
    let (a0, b0) = (id(&s, "(a,0)"), id(&s, "(b,0)"));
    assert!(!closed.weak(a0, b0) && !closed.weak(b0, a0));
}

#[test]
fn two_track_pair_is_forced_locally() {
    let s = gen_two_track(5).unwrap();
    let solver = Solver::for_scenario(&s);
    let base = solver.base_state();
    let (a0, b0) = (id(&s, "(a,0)"), id(&s, "(b,0)"));
    let v = solver.classify_pair(&base, a0, b0).unwrap();
    assert_eq!(
        v.status,
        PairStatus::ForcedStrict {
            above: a0,
            below: b0
        }
    );
    let gone: Vec<_> = v.eliminated.iter().map(|e| e.option).collect();
    assert_eq!(gone, vec![PairOption::Below, PairOption::Indifferent]);
    assert!(v
        .eliminated
        .iter()
        .all(|e| matches!(e.reason, EliminationReason::Cycle { .. })));
    let mirrored = solver.classify_pair(&base, b0, a0).unwrap();
    assert_eq!(mirrored.status, v.status);
    assert_eq!(mirrored.surviving, v.surviving.mirrored());
}

#[test]
fn two_track_small_window_already_forces() {
    let s = gen_two_track(1).unwrap();
    let solver = Solver::for_scenario(&s);
    let (a0, b0) = (id(&s, "(a,0)"), id(&s, "(b,0)"));
    let v = solver.classify_pair(&solver.base_state(), a0, b0).unwrap();
    assert_eq!(
        v.status,
        PairStatus::ForcedStrict {
            above: a0,
            below: b0
        }
    );
}

#[test]
fn two_track_extension_and_forcing() {
    let s = gen_two_track(5).unwrap();
    let ExtensionResult::Sat(e) = complete_extension(&s) else {
        panic!("two-track must extend");
    };
    assert!(verify_extension(&s, &e).all_passed());
    let (a0, b0) = (id(&s, "(a,0)"), id(&s, "(b,0)"));
    assert!(e.strict(a0, b0));

    let forced = forced_set_exact(&s).unwrap();
    for z in -5..=5 {
        let (a, b) = (id(&s, &format!("(a,{z})")), id(&s, &format!("(b,{z})")));
        assert_eq!(
            forced[&(a.min(b), a.max(b))].status,
            PairStatus::ForcedStrict { above: a, below: b },
            "z={z}"
        );
    }
    let full = forced_relation(s.len(), &forced);
    let novel = novel_pairs(&full, &s, true);
    assert!(novel.contains(&Fact::strict(a0, b0)));
    // neither partial closure reaches it
    let t = coherent_core::closure::saturate_with(&seed(&s), &s, Rules::transitivity_only());
    let c = coherent_core::closure::saturate_with(&seed(&s), &s, Rules::coherency_only(true));
    assert!(!t.weak(a0, b0) && !c.weak(a0, b0));
}

#[test]
fn two_track_oracle_agrees() {
    let s = gen_two_track(1).unwrap();
    let survivors = oracle_extensions(&s, DEFAULT_CAP).unwrap();
    assert!(!survivors.is_empty());
    let (a0, b0) = (id(&s, "(a,0)"), id(&s, "(b,0)"));
    assert!(survivors.iter().all(|o| o.strict(a0, b0)));
    for o in &survivors {
        assert!(verify_extension(&s, &o.to_state()).all_passed());
    }
    let exact = forced_set_exact(&s).unwrap();
    let brute = oracle_forced_set(&s, DEFAULT_CAP).unwrap();
    for (pair, v) in &exact {
        assert_eq!(v.surviving, brute[pair].surviving, "{pair:?}");
    }
}

#[test]
fn koopmans_pair_is_locally_unextendable() {
    let s = gen_koopmans(1).unwrap();
    let (sx, sy) = (id(&s, "σx"), id(&s, "σy"));
    let solver = Solver::for_scenario(&s);
    assert!(!solver.is_strong());
    let base = solver.base_state();
    assert!(base.is_consistent());
    let v = solver.classify_pair(&base, sx, sy).unwrap();
    assert_eq!(v.status, PairStatus::LocallyUnextendable);
    assert_eq!(v.eliminated.len(), 3);

    match complete_extension(&s) {
        ExtensionResult::Unsat(UnsatCertificate {
            seed_cycle,
            dead_pairs,
        }) => {
            assert_eq!(seed_cycle, None);
            assert_eq!(dead_pairs, vec![(sx, sy)]);
        }
        ExtensionResult::Sat(_) => panic!("Koopmans window must not extend"),
    }
    assert!(matches!(forced_set_exact(&s), Err(Error::Unsatisfiable)));
}

#[test]
fn koopmans_core_window_is_unsat_for_solver_and_oracle() {
    let s = gen_koopmans_core(1).unwrap();
    assert_eq!(s.len(), 10);
    assert!(!complete_extension(&s).is_sat());
    assert!(matches!(
        oracle_extensions(&s, DEFAULT_CAP),
        Err(Error::CapExceeded { n: 10, cap: 7 })
    ));
    assert!(oracle_extensions(&s, 10).unwrap().is_empty());
}

#[test]
fn only_half_of_the_blocking_relations_is_satisfiable() {
    // dropping the primed relations leaves σx ≻ σy as the forced verdict
    let full = gen_koopmans_core(1).unwrap();
    let keep: Vec<_> = full.base_strict()[..2].to_vec();
    let s = Scenario::new(
        "half",
        "",
        false,
        full.elements().to_vec(),
        full.generators().to_vec(),
        vec![],
        keep,
    )
    .unwrap();
    let forced = forced_set_exact(&s).unwrap();
    assert_eq!(
        forced[&(0, 1)].status,
        PairStatus::ForcedStrict { above: 0, below: 1 }
    );
}

#[test]
fn homothetic_forward_and_backward_instances() {
    let grid = gen_homothetic_grid(1, 2).unwrap();
    let (one, two, four) = (id(&grid, "(1)"), id(&grid, "(2)"), id(&grid, "(4)"));

    let s = grid.with_pairs([(one, two)], []).unwrap();
    let closed = saturate(&seed(&s), &s, false);
    assert!(closed.weak(two, four));

    let s = grid.with_pairs([], [(two, four)]).unwrap();
    assert!(!saturate(&seed(&s), &s, false).strict(one, two));
    assert!(saturate(&seed(&s), &s, true).strict(one, two));
    let survivors = oracle_extensions(&s, DEFAULT_CAP).unwrap();
    assert!(!survivors.is_empty());
    assert!(survivors.iter().all(|o| o.strict(one, two)));
}

#[test]
fn dated_rewards_stationarity_instance() {
    let base = gen_dated_rewards(&["y", "y'"], 2).unwrap();
    let s = base
        .with_pairs([], [(id(&base, "(y,0)"), id(&base, "(y',1)"))])
        .unwrap();
    let closed = saturate(&seed(&s), &s, true);
    assert!(closed.strict(id(&s, "(y,1)"), id(&s, "(y',2)")));
    assert!(complete_extension(&s).is_sat());
}

#[test]
fn novel_pairs_ignore_single_rule_consequences() {
    let grid = gen_dated_rewards(&["p", "q"], 1).unwrap();
    let s = grid
        .with_pairs([(id(&grid, "(p,0)"), id(&grid, "(q,0)"))], [])
        .unwrap();
    let forced = forced_relation(s.len(), &forced_set_exact(&s).unwrap());
    assert!(forced.weak(id(&s, "(p,1)"), id(&s, "(q,1)")));
    assert!(novel_pairs(&forced, &s, true).is_empty());
}

#[test]
fn grid_shifts_commute_exhaustively() {
    // 3×3 grid, right and down shifts
    use coherent_core::model::{Element, Generator};
    let n = 9;
    let right = Generator::from_fn("r", n, |x| (x % 3 < 2).then_some(x + 1));
    let down = Generator::from_fn("d", n, |x| (x + 3 < n).then_some(x + 3));
    let elements = (0..n).map(|i| Element::new(i, format!("p{i}"))).collect();
    let s = Scenario::new(
        "grid",
        "",
        true,
        elements,
        vec![right, down],
        vec![],
        vec![],
    )
    .unwrap();
    assert!(check_commutativity(&s).is_empty());
    let rd = Word::from_names(&s, &["r", "d"]).unwrap();
    let dr = Word::from_names(&s, &["d", "r"]).unwrap();
    for x in 0..n {
        assert_eq!(apply_word(&s, &rd, x), apply_word(&s, &dr, x));
    }
    assert_eq!(apply_word(&s, &rd, 0), Some(4));
}

#[test]
fn swap_cycle_has_no_coherent_extension() {
    use coherent_core::model::{Element, Generator};
    let g = Generator::from_pairs("g", 2, [(0, 1), (1, 0)]).unwrap();
    let s = Scenario::new(
        "swap",
        "",
        true,
        vec![Element::new(0, "x"), Element::new(1, "y")],
        vec![g],
        vec![],
        vec![(0, 1)],
    )
    .unwrap();
    assert!(!is_consistent(&saturate(&seed(&s), &s, false)));
    assert!(oracle_extensions(&s, DEFAULT_CAP).unwrap().is_empty());
    assert!(matches!(
        complete_extension(&s),
        ExtensionResult::Unsat(UnsatCertificate {
            seed_cycle: Some(_),
            ..
        })
    ));
}

#[test]
fn empty_seed_on_two_elements_keeps_every_order() {
    let s = gen_dated_rewards(&["p", "q"], 1)
        .map(|d| {
            Scenario::new(
                "plain",
                "",
                true,
                d.elements()[..2].to_vec(),
                vec![],
                vec![],
                vec![],
            )
            .unwrap()
        })
        .unwrap();
    assert_eq!(oracle_extensions(&s, DEFAULT_CAP).unwrap().len(), 3);
    assert_eq!(
        oracle_forced_set(&s, DEFAULT_CAP).unwrap()[&(0, 1)].status,
        PairStatus::Free
    );
    assert_eq!(oracle::ordered_bell(2), 3);
}
