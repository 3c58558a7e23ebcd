//! Least forcing relations closed under transitivity and coherency.
//!
//! A [`RelationState`] carries two layers over the window: `W(x,y)` records
//! that `x ≽ y` holds in every admissible extension and `D(x,y)` that
//! `x ≻ y` does. Both layers only ever grow, so saturation is a monotone
//! fixpoint computed by a worklist over newly derived pairs:
//!
//! * `T1`: `W(x,y) ∧ W(y,z) ⟹ W(x,z)`
//! * `T2`: `D(x,y) ∧ W(y,z) ⟹ D(x,z)` and `W(x,y) ∧ D(y,z) ⟹ D(x,z)`
//! * `C1`: `W(x,y) ⟹ W(g x, g y)`, likewise for `D`, where both images exist
//! * `C2`: `W(g x, g y) ⟹ W(x,y)`, likewise for `D` (strong mode only)
//!
//! `D ⊆ W` is maintained on insertion. The state is inconsistent exactly
//! when some `D(x,x)` is derived.

use std::collections::VecDeque;

use serde::Serialize;

use crate::bitmatrix::BitMatrix;
use crate::model::{ElementId, Scenario};

/// A single ordered fact: `x ≻ y` when `strict`, otherwise `x ≽ y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Fact {
    pub x: ElementId,
    pub y: ElementId,
    pub strict: bool,
}

impl Fact {
    pub fn weak(x: ElementId, y: ElementId) -> Self {
        Fact {
            x,
            y,
            strict: false,
        }
    }

    pub fn strict(x: ElementId, y: ElementId) -> Self {
        Fact { x, y, strict: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationState {
    weak: BitMatrix,
    strict: BitMatrix,
}

impl RelationState {
    /// Reflexive diagonal only.
    pub fn new(n: usize) -> Self {
        RelationState {
            weak: BitMatrix::identity(n),
            strict: BitMatrix::new(n),
        }
    }

    /// Wraps raw layers. The weak layer is made reflexive and `D ⊆ W` is
    /// enforced.
    pub fn from_layers(mut weak: BitMatrix, strict: BitMatrix) -> Self {
        assert_eq!(weak.size(), strict.size());
        for i in 0..weak.size() {
            weak.set(i, i);
        }
        weak.union_with(&strict);
        RelationState { weak, strict }
    }

    pub fn len(&self) -> usize {
        self.weak.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn weak(&self, x: ElementId, y: ElementId) -> bool {
        self.weak.get(x, y)
    }

    #[inline]
    pub fn strict(&self, x: ElementId, y: ElementId) -> bool {
        self.strict.get(x, y)
    }

    pub fn holds(&self, f: Fact) -> bool {
        if f.strict {
            self.strict(f.x, f.y)
        } else {
            self.weak(f.x, f.y)
        }
    }

    pub fn weak_layer(&self) -> &BitMatrix {
        &self.weak
    }

    pub fn strict_layer(&self) -> &BitMatrix {
        &self.strict
    }

    /// Inserts a fact without closing; returns true if it was new.
    pub fn insert(&mut self, f: Fact) -> bool {
        let mut fresh = self.weak.set(f.x, f.y);
        if f.strict {
            fresh |= self.strict.set(f.x, f.y);
        }
        fresh
    }

    /// First element carrying a forced strict self-loop, if any.
    pub fn cycle_witness(&self) -> Option<ElementId> {
        (0..self.len()).find(|&x| self.strict(x, x))
    }

    pub fn is_consistent(&self) -> bool {
        self.cycle_witness().is_none()
    }

    /// `W(x,y) ∨ W(y,x)` for every pair.
    pub fn is_complete(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| (x + 1..n).all(|y| self.weak(x, y) || self.weak(y, x)))
    }

    /// Containment on both layers.
    pub fn is_subset(&self, other: &RelationState) -> bool {
        self.weak.is_subset(&other.weak) && self.strict.is_subset(&other.strict)
    }

    /// A pair is decided once it is strictly ordered or forced indifferent.
    pub fn is_decided(&self, x: ElementId, y: ElementId) -> bool {
        self.strict(x, y) || self.strict(y, x) || (self.weak(x, y) && self.weak(y, x))
    }

    /// Off-diagonal facts, strict facts reported once as strict.
    pub fn facts(&self) -> Vec<Fact> {
        let mut out = Vec::new();
        for (x, y) in self.weak.iter_ones() {
            if x == y {
                continue;
            }
            out.push(Fact {
                x,
                y,
                strict: self.strict(x, y),
            });
        }
        out
    }
}

/// Which rule families a saturation may fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rules {
    pub transitive: bool,
    pub forward: bool,
    pub backward: bool,
}

impl Rules {
    /// T + C1, plus C2 when `strong`.
    pub fn full(strong: bool) -> Self {
        Rules {
            transitive: true,
            forward: true,
            backward: strong,
        }
    }

    pub fn transitivity_only() -> Self {
        Rules {
            transitive: true,
            forward: false,
            backward: false,
        }
    }

    pub fn coherency_only(strong: bool) -> Self {
        Rules {
            transitive: false,
            forward: true,
            backward: strong,
        }
    }
}

/// Saturation engine bound to one scenario's generator tables.
#[derive(Debug, Clone)]
pub struct Closure<'s> {
    scenario: &'s Scenario,
    rules: Rules,
    /// `preimages[g][y]` lists every `x` with `g(x) = y`.
    preimages: Vec<Vec<Vec<ElementId>>>,
}

impl<'s> Closure<'s> {
    pub fn new(scenario: &'s Scenario, rules: Rules) -> Self {
        let n = scenario.len();
        let preimages = scenario
            .generators()
            .iter()
            .map(|g| {
                let mut pre = vec![Vec::new(); n];
                for (x, y) in g.pairs() {
                    pre[y].push(x);
                }
                pre
            })
            .collect();
        Closure {
            scenario,
            rules,
            preimages,
        }
    }

    pub fn rules(&self) -> Rules {
        self.rules
    }

    pub fn scenario(&self) -> &'s Scenario {
        self.scenario
    }

    /// Closes `state` to the least fixpoint containing it.
    pub fn saturate(&self, state: &mut RelationState) {
        let queue = state
            .weak
            .iter_ones()
            .map(|(x, y)| Fact::weak(x, y))
            .chain(state.strict.iter_ones().map(|(x, y)| Fact::strict(x, y)))
            .collect();
        Worker::new(self, state, queue).run(false);
    }

    /// Adds `facts` to an already closed `state` and re-closes it. With
    /// `stop_on_conflict` the run aborts at the first strict self-loop and
    /// the state is left partially closed; the witness is returned.
    pub fn extend(
        &self,
        state: &mut RelationState,
        facts: &[Fact],
        stop_on_conflict: bool,
    ) -> Option<ElementId> {
        let mut worker = Worker::new(self, state, VecDeque::new());
        for &f in facts {
            worker.add(f);
        }
        worker.run(stop_on_conflict)
    }
}

struct Worker<'a, 's> {
    closure: &'a Closure<'s>,
    state: &'a mut RelationState,
    weak_t: BitMatrix,
    strict_t: BitMatrix,
    queue: VecDeque<Fact>,
    conflict: Option<ElementId>,
    scratch: Vec<ElementId>,
}

impl<'a, 's> Worker<'a, 's> {
    fn new(closure: &'a Closure<'s>, state: &'a mut RelationState, queue: VecDeque<Fact>) -> Self {
        let weak_t = state.weak.transpose();
        let strict_t = state.strict.transpose();
        let conflict = state.cycle_witness();
        Worker {
            closure,
            state,
            weak_t,
            strict_t,
            queue,
            conflict,
            scratch: Vec::new(),
        }
    }

    fn add_weak(&mut self, x: ElementId, y: ElementId) {
        if self.state.weak.set(x, y) {
            self.weak_t.set(y, x);
            self.queue.push_back(Fact::weak(x, y));
        }
    }

    fn add_strict(&mut self, x: ElementId, y: ElementId) {
        if self.state.strict.set(x, y) {
            self.strict_t.set(y, x);
            self.queue.push_back(Fact::strict(x, y));
            if x == y && self.conflict.is_none() {
                self.conflict = Some(x);
            }
        }
        self.add_weak(x, y);
    }

    fn add(&mut self, f: Fact) {
        if f.strict {
            self.add_strict(f.x, f.y)
        } else {
            self.add_weak(f.x, f.y)
        }
    }

    fn run(mut self, stop_on_conflict: bool) -> Option<ElementId> {
        let rules = self.closure.rules;
        while let Some(fact) = self.queue.pop_front() {
            if stop_on_conflict && self.conflict.is_some() {
                break;
            }
            let Fact { x, y, strict } = fact;
            if rules.transitive {
                self.transitive(x, y, strict);
            }
            if rules.forward {
                for g in self.closure.scenario.generators() {
                    if let (Some(gx), Some(gy)) = (g.apply(x), g.apply(y)) {
                        self.add(Fact {
                            x: gx,
                            y: gy,
                            strict,
                        });
                    }
                }
            }
            if rules.backward {
                let closure = self.closure;
                for pre in &closure.preimages {
                    for &px in &pre[x] {
                        for &py in &pre[y] {
                            self.add(Fact {
                                x: px,
                                y: py,
                                strict,
                            });
                        }
                    }
                }
            }
        }
        self.conflict
    }

    fn transitive(&mut self, x: ElementId, y: ElementId, strict: bool) {
        let mut buf = std::mem::take(&mut self.scratch);

        // predecessors a with W(a,x): a ≽ x ⋄ y
        buf.clear();
        buf.extend(self.weak_t.row_ones(x));
        for &a in &buf {
            if strict {
                self.add_strict(a, y);
            } else {
                self.add_weak(a, y);
            }
        }
        // successors b with W(y,b): x ⋄ y ≽ b
        buf.clear();
        buf.extend(self.state.weak.row_ones(y));
        for &b in &buf {
            if strict {
                self.add_strict(x, b);
            } else {
                self.add_weak(x, b);
            }
        }
        if !strict {
            // a ≻ x ≽ y and x ≽ y ≻ b
            buf.clear();
            buf.extend(self.strict_t.row_ones(x));
            for &a in &buf {
                self.add_strict(a, y);
            }
            buf.clear();
            buf.extend(self.state.strict.row_ones(y));
            for &b in &buf {
                self.add_strict(x, b);
            }
        }
        self.scratch = buf;
    }
}

/// Reflexive diagonal, base weak pairs and base strict pairs.
pub fn seed(s: &Scenario) -> RelationState {
    let mut state = RelationState::new(s.len());
    for &(x, y) in s.base_weak() {
        state.insert(Fact::weak(x, y));
    }
    for &(x, y) in s.base_strict() {
        state.insert(Fact::strict(x, y));
    }
    state
}

/// Least fixpoint of T, C1 and (when `strong`) C2 containing `state`.
pub fn saturate(state: &RelationState, s: &Scenario, strong: bool) -> RelationState {
    saturate_with(state, s, Rules::full(strong))
}

pub fn saturate_with(state: &RelationState, s: &Scenario, rules: Rules) -> RelationState {
    let mut out = state.clone();
    Closure::new(s, rules).saturate(&mut out);
    out
}

pub fn is_consistent(state: &RelationState) -> bool {
    state.is_consistent()
}

/// Facts of `forced` that neither transitivity alone nor coherency alone
/// derives from the seed. A strict fact counts as novel when the strict
/// layer of both partial closures misses it, a weak one when both weak
/// layers miss it.
pub fn novel_pairs(forced: &RelationState, s: &Scenario, strong: bool) -> Vec<Fact> {
    let base = seed(s);
    let trans = saturate_with(&base, s, Rules::transitivity_only());
    let coh = saturate_with(&base, s, Rules::coherency_only(strong));
    let mut out = Vec::new();
    for (x, y) in forced.weak_layer().iter_ones() {
        if x == y {
            continue;
        }
        if forced.strict(x, y) && !trans.strict(x, y) && !coh.strict(x, y) {
            out.push(Fact::strict(x, y));
        } else if !trans.weak(x, y) && !coh.weak(x, y) {
            out.push(Fact::weak(x, y));
        }
    }
    out
}
