//! Pair classification, backtracking completion and exact forcing.
//!
//! The completion search is a finite stand-in for a maximality argument:
//! it walks undecided pairs in lexicographic `(min, max)` order, tries the
//! options `w ≻ z`, `z ≻ w`, `w ∼ z` (with `w` the smaller id) in that
//! order, re-saturates after every assignment and backtracks by dropping the
//! child snapshot. A pair whose three options all close a strict cycle is a
//! dead end and is recorded in the UNSAT certificate.
//!
//! A pair is *decided* once it is strictly ordered or forced indifferent.
//! Pairs known only as `x ≽ y` are still branched on (`x ≻ y` versus
//! `x ∼ y`), so a completed state's strict layer is exactly the asymmetric
//! part of its weak layer and strict coherency carries over.
//!
//! Verdicts are window-relative: an eliminated option is eliminated for the
//! unbounded problem too, but a surviving option only means some completion
//! exists on the window.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::closure::{Closure, Fact, RelationState, Rules};
use crate::error::{Error, Result};
use crate::model::{ElementId, Scenario};

/// One way of rendering a pair `(first, second)` comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOption {
    /// `first ≻ second`
    Above,
    /// `second ≻ first`
    Below,
    /// `first ∼ second`
    Indifferent,
}

impl PairOption {
    pub const ALL: [PairOption; 3] = [
        PairOption::Above,
        PairOption::Below,
        PairOption::Indifferent,
    ];

    pub fn facts(self, first: ElementId, second: ElementId) -> Vec<Fact> {
        match self {
            PairOption::Above => vec![Fact::strict(first, second)],
            PairOption::Below => vec![Fact::strict(second, first)],
            PairOption::Indifferent => vec![Fact::weak(first, second), Fact::weak(second, first)],
        }
    }

    /// The same option seen from `(second, first)`.
    pub fn mirrored(self) -> Self {
        match self {
            PairOption::Above => PairOption::Below,
            PairOption::Below => PairOption::Above,
            PairOption::Indifferent => PairOption::Indifferent,
        }
    }

    /// The option a complete state realizes on `(first, second)`.
    pub fn realized(state: &RelationState, first: ElementId, second: ElementId) -> Option<Self> {
        match (state.weak(first, second), state.weak(second, first)) {
            (true, true) => Some(PairOption::Indifferent),
            (true, false) => Some(PairOption::Above),
            (false, true) => Some(PairOption::Below),
            (false, false) => None,
        }
    }

    fn bit(self) -> u8 {
        match self {
            PairOption::Above => 1,
            PairOption::Below => 2,
            PairOption::Indifferent => 4,
        }
    }
}

/// Subset of the three pair options.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OptionSet(u8);

impl OptionSet {
    pub fn empty() -> Self {
        OptionSet(0)
    }

    pub fn all() -> Self {
        OptionSet(7)
    }

    pub fn insert(&mut self, o: PairOption) {
        self.0 |= o.bit();
    }

    pub fn contains(self, o: PairOption) -> bool {
        self.0 & o.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = PairOption> {
        PairOption::ALL
            .into_iter()
            .filter(move |o| self.contains(*o))
    }

    pub fn mirrored(self) -> Self {
        self.iter().map(PairOption::mirrored).collect()
    }
}

impl FromIterator<PairOption> for OptionSet {
    fn from_iter<I: IntoIterator<Item = PairOption>>(iter: I) -> Self {
        let mut s = OptionSet::empty();
        for o in iter {
            s.insert(o);
        }
        s
    }
}

impl fmt::Debug for OptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for OptionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PairStatus {
    ForcedStrict {
        above: ElementId,
        below: ElementId,
    },
    ForcedIndifferent,
    /// Free within the window only.
    Free,
    LocallyUnextendable,
}

impl PairStatus {
    pub fn from_survivors(first: ElementId, second: ElementId, surviving: OptionSet) -> Self {
        match surviving.len() {
            0 => PairStatus::LocallyUnextendable,
            1 => match surviving.iter().next().unwrap() {
                PairOption::Above => PairStatus::ForcedStrict {
                    above: first,
                    below: second,
                },
                PairOption::Below => PairStatus::ForcedStrict {
                    above: second,
                    below: first,
                },
                PairOption::Indifferent => PairStatus::ForcedIndifferent,
            },
            _ => PairStatus::Free,
        }
    }

    pub fn is_forced(self) -> bool {
        matches!(
            self,
            PairStatus::ForcedStrict { .. } | PairStatus::ForcedIndifferent
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EliminationReason {
    /// Saturating the option derived `witness ≻ witness`.
    Cycle { witness: ElementId },
    /// The option saturates consistently but no completion exists.
    NoCompletion,
    /// No enumerated weak order realizes the option.
    NoCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Elimination {
    pub option: PairOption,
    pub reason: EliminationReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub first: ElementId,
    pub second: ElementId,
    pub surviving: OptionSet,
    pub eliminated: Vec<Elimination>,
    pub status: PairStatus,
}

impl PairVerdict {
    pub fn new(
        first: ElementId,
        second: ElementId,
        surviving: OptionSet,
        eliminated: Vec<Elimination>,
    ) -> Self {
        PairVerdict {
            first,
            second,
            surviving,
            eliminated,
            status: PairStatus::from_survivors(first, second, surviving),
        }
    }
}

/// Verdict per unordered pair, keyed by `(min, max)`.
pub type ForcedMap = BTreeMap<(ElementId, ElementId), PairVerdict>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnsatCertificate {
    /// Set when the seed's own closure is already cyclic.
    pub seed_cycle: Option<ElementId>,
    /// Pairs at which every option failed on some branch.
    pub dead_pairs: Vec<(ElementId, ElementId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionResult {
    Sat(RelationState),
    Unsat(UnsatCertificate),
}

impl ExtensionResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, ExtensionResult::Sat(_))
    }

    pub fn extension(&self) -> Option<&RelationState> {
        match self {
            ExtensionResult::Sat(e) => Some(e),
            ExtensionResult::Unsat(_) => None,
        }
    }
}

/// Propagate-and-backtrack solver over one scenario.
#[derive(Debug, Clone)]
pub struct Solver<'s> {
    closure: Closure<'s>,
}

impl<'s> Solver<'s> {
    /// Strong mode iff the scenario is declared (and validated) commutative.
    pub fn for_scenario(s: &'s Scenario) -> Self {
        Solver {
            closure: Closure::new(s, Rules::full(s.is_commutative())),
        }
    }

    pub fn new(s: &'s Scenario, strong: bool) -> Result<Self> {
        if strong && !s.is_commutative() {
            return Err(Error::StrongNotAdmissible);
        }
        Ok(Solver {
            closure: Closure::new(s, Rules::full(strong)),
        })
    }

    pub fn is_strong(&self) -> bool {
        self.closure.rules().backward
    }

    pub fn scenario(&self) -> &'s Scenario {
        self.closure.scenario()
    }

    pub fn closure(&self) -> &Closure<'s> {
        &self.closure
    }

    /// Saturated seed.
    pub fn base_state(&self) -> RelationState {
        let mut st = crate::closure::seed(self.scenario());
        self.closure.saturate(&mut st);
        st
    }

    /// Asserts one option into a copy of a closed state and re-closes it.
    pub fn try_option(
        &self,
        state: &RelationState,
        first: ElementId,
        second: ElementId,
        option: PairOption,
    ) -> std::result::Result<RelationState, ElementId> {
        let mut next = state.clone();
        match self
            .closure
            .extend(&mut next, &option.facts(first, second), true)
        {
            Some(witness) => Err(witness),
            None => Ok(next),
        }
    }

    fn local_options(
        &self,
        state: &RelationState,
        first: ElementId,
        second: ElementId,
    ) -> (Vec<(PairOption, RelationState)>, Vec<Elimination>) {
        let mut alive = Vec::new();
        let mut dead = Vec::new();
        for option in PairOption::ALL {
            match self.try_option(state, first, second, option) {
                Ok(st) => alive.push((option, st)),
                Err(witness) => dead.push(Elimination {
                    option,
                    reason: EliminationReason::Cycle { witness },
                }),
            }
        }
        (alive, dead)
    }

    /// Three-way local test on an incomparable pair of a closed state.
    pub fn classify_pair(
        &self,
        state: &RelationState,
        first: ElementId,
        second: ElementId,
    ) -> Result<PairVerdict> {
        if first == second || state.weak(first, second) || state.weak(second, first) {
            let relation = match (state.weak(first, second), state.weak(second, first)) {
                (true, true) => "indifferent",
                (true, false) if state.strict(first, second) => "first strictly above",
                (true, false) => "first weakly above",
                (false, true) if state.strict(second, first) => "second strictly above",
                _ => "second weakly above",
            };
            return Err(Error::PairRelated {
                first,
                second,
                relation: relation.to_owned(),
            });
        }
        let (alive, dead) = self.local_options(state, first, second);
        let surviving = alive.iter().map(|(o, _)| *o).collect();
        Ok(PairVerdict::new(first, second, surviving, dead))
    }

    /// Completion of the saturated seed.
    pub fn complete(&self) -> ExtensionResult {
        let base = self.base_state();
        if let Some(w) = base.cycle_witness() {
            return ExtensionResult::Unsat(UnsatCertificate {
                seed_cycle: Some(w),
                dead_pairs: Vec::new(),
            });
        }
        self.complete_from(base)
    }

    /// Completion of an arbitrary closed, consistent state.
    pub fn complete_from(&self, root: RelationState) -> ExtensionResult {
        struct Frame {
            state: RelationState,
            pair: (ElementId, ElementId),
            next: usize,
            any_consistent: bool,
        }

        let mut dead = BTreeSet::new();
        let Some(pair) = next_undecided(&root, (0, 0)) else {
            return ExtensionResult::Sat(root);
        };
        let mut stack = vec![Frame {
            state: root,
            pair,
            next: 0,
            any_consistent: false,
        }];
        while let Some(frame) = stack.last_mut() {
            if frame.next == PairOption::ALL.len() {
                if !frame.any_consistent {
                    dead.insert(frame.pair);
                }
                stack.pop();
                continue;
            }
            let option = PairOption::ALL[frame.next];
            frame.next += 1;
            let (w, z) = frame.pair;
            let Ok(child) = self.try_option(&frame.state, w, z, option) else {
                continue;
            };
            frame.any_consistent = true;
            match next_undecided(&child, frame.pair) {
                None => return ExtensionResult::Sat(child),
                Some(pair) => stack.push(Frame {
                    state: child,
                    pair,
                    next: 0,
                    any_consistent: false,
                }),
            }
        }
        ExtensionResult::Unsat(UnsatCertificate {
            seed_cycle: None,
            dead_pairs: dead.into_iter().collect(),
        })
    }

    /// Globally surviving options for every unordered pair.
    pub fn forced_set(&self) -> Result<ForcedMap> {
        let n = self.scenario().len();
        let base = self.base_state();
        if !base.is_consistent() {
            return Err(Error::Unsatisfiable);
        }
        let ExtensionResult::Sat(first_ext) = self.complete_from(base.clone()) else {
            return Err(Error::Unsatisfiable);
        };
        // options already realized by some found completion
        let mut witnessed = vec![OptionSet::empty(); n * n];
        let record = |ext: &RelationState, witnessed: &mut Vec<OptionSet>| {
            for i in 0..n {
                for j in i + 1..n {
                    if let Some(o) = PairOption::realized(ext, i, j) {
                        witnessed[i * n + j].insert(o);
                    }
                }
            }
        };
        record(&first_ext, &mut witnessed);

        let mut out = ForcedMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let (alive, mut eliminated) = self.local_options(&base, i, j);
                let mut surviving = OptionSet::empty();
                for (option, state) in alive {
                    if witnessed[i * n + j].contains(option) {
                        surviving.insert(option);
                        continue;
                    }
                    match self.complete_from(state) {
                        ExtensionResult::Sat(ext) => {
                            record(&ext, &mut witnessed);
                            surviving.insert(option);
                        }
                        ExtensionResult::Unsat(_) => eliminated.push(Elimination {
                            option,
                            reason: EliminationReason::NoCompletion,
                        }),
                    }
                }
                eliminated.sort_by_key(|e| e.option);
                out.insert((i, j), PairVerdict::new(i, j, surviving, eliminated));
            }
        }
        Ok(out)
    }
}

/// First undecided pair strictly after `after` in `(min, max)` order.
fn next_undecided(
    state: &RelationState,
    after: (ElementId, ElementId),
) -> Option<(ElementId, ElementId)> {
    let n = state.len();
    let (i0, j0) = after;
    for i in i0..n {
        let start = if i == i0 { (j0 + 1).max(i + 1) } else { i + 1 };
        for j in start..n {
            if !state.is_decided(i, j) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Local three-option classification of an incomparable pair.
pub fn classify_pair(
    state: &RelationState,
    s: &Scenario,
    first: ElementId,
    second: ElementId,
) -> Result<PairVerdict> {
    Solver::for_scenario(s).classify_pair(state, first, second)
}

pub fn complete_extension(s: &Scenario) -> ExtensionResult {
    Solver::for_scenario(s).complete()
}

pub fn forced_set_exact(s: &Scenario) -> Result<ForcedMap> {
    Solver::for_scenario(s).forced_set()
}

/// The relation every completion agrees on, read off a verdict map:
/// `W(x,y)` unless `y ≻ x` survives, `D(x,y)` when `x ≻ y` is the only
/// survivor.
pub fn forced_relation(n: usize, forced: &ForcedMap) -> RelationState {
    let mut st = RelationState::new(n);
    for (&(i, j), v) in forced {
        let s = v.surviving;
        if !s.contains(PairOption::Below) {
            st.insert(Fact::weak(i, j));
        }
        if !s.contains(PairOption::Above) {
            st.insert(Fact::weak(j, i));
        }
        if let PairStatus::ForcedStrict { above, below } = v.status {
            st.insert(Fact::strict(above, below));
        }
    }
    st
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Audits a candidate extension. Each property is reported separately with
/// the first counterexample found.
pub fn verify_extension(s: &Scenario, e: &RelationState) -> VerificationReport {
    let n = s.len();
    let lbl = |x: ElementId| s.label(x);
    let mut checks = Vec::new();
    let mut push = |name, detail: Option<String>| {
        checks.push(Check {
            name,
            passed: detail.is_none(),
            detail,
        })
    };

    if e.len() != n {
        push(
            "window",
            Some(format!("relation has {} elements, scenario {n}", e.len())),
        );
        return VerificationReport { checks };
    }

    push(
        "reflexive",
        (0..n)
            .find(|&x| !e.weak(x, x))
            .map(|x| format!("{} ≽ {} missing", lbl(x), lbl(x))),
    );

    push(
        "complete",
        pairs(n)
            .find(|&(x, y)| !e.weak(x, y) && !e.weak(y, x))
            .map(|(x, y)| format!("{} and {} are incomparable", lbl(x), lbl(y))),
    );

    let mut transitive = None;
    'outer: for x in 0..n {
        for y in e.weak_layer().row_ones(x) {
            for z in e.weak_layer().row_ones(y) {
                if !e.weak(x, z) {
                    transitive = Some(format!(
                        "{} ≽ {} ≽ {} but not {} ≽ {}",
                        lbl(x),
                        lbl(y),
                        lbl(z),
                        lbl(x),
                        lbl(z)
                    ));
                    break 'outer;
                }
            }
        }
    }
    push("transitive", transitive);

    let asym_mismatch = ordered_pairs(n).find(|&(x, y)| {
        let asym = e.weak(x, y) && !e.weak(y, x);
        e.strict(x, y) != asym
    });
    push(
        "strict_is_asymmetric_part",
        asym_mismatch.map(|(x, y)| {
            format!(
                "strict layer disagrees with the asymmetric part at ({}, {})",
                lbl(x),
                lbl(y)
            )
        }),
    );

    let weak_miss = s.base_weak().iter().find(|&&(x, y)| !e.weak(x, y));
    let strict_miss = s.base_strict().iter().find(|&&(x, y)| !e.strict(x, y));
    push(
        "extends_seed",
        weak_miss
            .map(|&(x, y)| format!("seed {} ≽ {} lost", lbl(x), lbl(y)))
            .or(strict_miss.map(|&(x, y)| format!("seed {} ≻ {} lost", lbl(x), lbl(y)))),
    );

    let mut forward = None;
    let mut backward = None;
    for g in s.generators() {
        for (x, y) in ordered_pairs(n).chain((0..n).map(|x| (x, x))) {
            let (Some(gx), Some(gy)) = (g.apply(x), g.apply(y)) else {
                continue;
            };
            for (strict, rel) in [(false, "≽"), (true, "≻")] {
                let holds = |a, b| if strict { e.strict(a, b) } else { e.weak(a, b) };
                if forward.is_none() && holds(x, y) && !holds(gx, gy) {
                    forward = Some(format!(
                        "{} {rel} {} but not {}({}) {rel} {}({})",
                        lbl(x),
                        lbl(y),
                        g.name(),
                        lbl(x),
                        g.name(),
                        lbl(y)
                    ));
                }
                if backward.is_none() && holds(gx, gy) && !holds(x, y) {
                    backward = Some(format!(
                        "{}({}) {rel} {}({}) but not {} {rel} {}",
                        g.name(),
                        lbl(x),
                        g.name(),
                        lbl(y),
                        lbl(x),
                        lbl(y)
                    ));
                }
            }
        }
    }
    push("coherent", forward);
    push("strongly_coherent", backward);

    let cycle = e
        .cycle_witness()
        .map(|x| format!("{} ≻ {}", lbl(x), lbl(x)))
        .or_else(|| {
            ordered_pairs(n)
                .find(|&(x, y)| e.strict(x, y) && e.weak(y, x))
                .map(|(x, y)| format!("{} ≻ {} yet {} ≽ {}", lbl(x), lbl(y), lbl(y), lbl(x)))
        });
    push("consistent", cycle);

    VerificationReport { checks }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (x + 1..n).map(move |y| (x, y)))
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmatrix::BitMatrix;
    use crate::model::Element;

    fn empty(n: usize) -> Scenario {
        let elements = (0..n).map(|i| Element::new(i, format!("e{i}"))).collect();
        Scenario::new("empty", "", true, elements, vec![], vec![], vec![]).unwrap()
    }

    #[test]
    fn empty_pair_is_free() {
        let s = empty(3);
        let solver = Solver::for_scenario(&s);
        let v = solver.classify_pair(&solver.base_state(), 0, 2).unwrap();
        assert_eq!(v.status, PairStatus::Free);
        assert_eq!(v.surviving, OptionSet::all());
        assert!(v.eliminated.is_empty());
    }

    #[test]
    fn related_pair_is_a_precondition_error() {
        let s = empty(2).with_pairs([], [(0, 1)]).unwrap();
        let solver = Solver::for_scenario(&s);
        let err = solver
            .classify_pair(&solver.base_state(), 1, 0)
            .unwrap_err();
        assert!(err.to_string().contains("second strictly above"), "{err}");
    }

    #[test]
    fn empty_relation_completes_to_lexicographic_strict_order() {
        let s = empty(3);
        let ExtensionResult::Sat(e) = complete_extension(&s) else {
            panic!("empty relation must extend");
        };
        assert!(e.strict(0, 1) && e.strict(1, 2) && e.strict(0, 2));
        assert!(verify_extension(&s, &e).all_passed());
        assert_eq!(complete_extension(&s), ExtensionResult::Sat(e));
    }

    #[test]
    fn weak_only_pairs_are_still_branched() {
        // 0 ≽ 1 known; completion must pick 0 ≻ 1 and mark it strict
        let s = empty(2).with_pairs([(0, 1)], []).unwrap();
        let e = complete_extension(&s).extension().cloned().unwrap();
        assert!(e.strict(0, 1));
        let forced = forced_set_exact(&s).unwrap();
        let v = &forced[&(0, 1)];
        assert_eq!(v.status, PairStatus::Free);
        assert!(!v.surviving.contains(PairOption::Below));
        let rel = forced_relation(2, &forced);
        assert!(rel.weak(0, 1) && !rel.weak(1, 0) && !rel.strict(0, 1));
    }

    #[test]
    fn two_element_empty_scenario_has_a_free_pair() {
        let forced = forced_set_exact(&empty(2)).unwrap();
        assert_eq!(forced.len(), 1);
        assert_eq!(forced[&(0, 1)].status, PairStatus::Free);
    }

    #[test]
    fn identity_relation_fails_completeness_only() {
        let s = empty(2);
        let r = verify_extension(&s, &RelationState::new(2));
        assert!(!r.check("complete").unwrap().passed);
        assert!(r.check("transitive").unwrap().passed);
        assert!(r.check("consistent").unwrap().passed);
    }

    #[test]
    fn order_dropping_a_seeded_strict_pair_fails_containment() {
        let s = empty(2).with_pairs([], [(0, 1)]).unwrap();
        let mut w = BitMatrix::identity(2);
        w.set(1, 0);
        let mut d = BitMatrix::new(2);
        d.set(1, 0);
        let r = verify_extension(&s, &RelationState::from_layers(w, d));
        assert!(!r.check("extends_seed").unwrap().passed);
        assert!(r.check("complete").unwrap().passed);
    }

    #[test]
    fn option_set_mirrors() {
        let s: OptionSet = [PairOption::Above, PairOption::Indifferent]
            .into_iter()
            .collect();
        assert_eq!(
            s.mirrored(),
            [PairOption::Below, PairOption::Indifferent]
                .into_iter()
                .collect()
        );
        assert_eq!(format!("{s:?}"), "{Above, Indifferent}");
    }
}
