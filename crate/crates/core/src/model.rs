//! Ground window, generator tables, words and scenario validation.
//!
//! A scenario is a finite window of a possibly infinite ground set together
//! with a family of transformations restricted to that window. Restriction
//! makes every generator a *partial* map: an image that would leave the
//! window is simply undefined, and nothing downstream is allowed to infer a
//! fact through an undefined image.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an element inside its scenario's window.
pub type ElementId = usize;

/// Structured label used by the scenario generators, e.g. `a` with `[3]`
/// for the element `(a,3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coords {
    pub base: String,
    pub vector: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub id: ElementId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Coords>,
}

impl Element {
    pub fn new(id: ElementId, label: impl Into<String>) -> Self {
        Element {
            id,
            label: label.into(),
            coords: None,
        }
    }

    pub fn with_coords(mut self, base: impl Into<String>, vector: Vec<i64>) -> Self {
        self.coords = Some(Coords {
            base: base.into(),
            vector,
        });
        self
    }
}

/// A transformation restricted to the window. `table[x]` is the image of
/// `x`, or `None` where the image falls outside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    name: String,
    table: Vec<Option<ElementId>>,
}

impl Generator {
    /// Builds a generator over a window of `n` elements from `(source, image)`
    /// pairs. Pairs must form a function; ids are checked by
    /// [`Scenario::new`].
    pub fn from_pairs(
        name: impl Into<String>,
        n: usize,
        pairs: impl IntoIterator<Item = (ElementId, ElementId)>,
    ) -> Result<Self> {
        let name = name.into();
        let mut table = vec![None; n];
        for (src, dst) in pairs {
            let slot = table.get_mut(src).ok_or_else(|| Error::DanglingId {
                context: format!("generator {name:?}"),
                id: src,
            })?;
            if slot.is_some() {
                return Err(Error::GeneratorNotFunction {
                    generator: name,
                    source_id: src,
                });
            }
            *slot = Some(dst);
        }
        Ok(Generator { name, table })
    }

    /// Builds a generator by evaluating `f` at every element of the window.
    pub fn from_fn(
        name: impl Into<String>,
        n: usize,
        f: impl FnMut(ElementId) -> Option<ElementId>,
    ) -> Self {
        Generator {
            name: name.into(),
            table: (0..n).map(f).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn apply(&self, x: ElementId) -> Option<ElementId> {
        self.table.get(x).copied().flatten()
    }

    pub fn table(&self) -> &[Option<ElementId>] {
        &self.table
    }

    /// True when every element of the window has an image.
    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    /// Number of elements at which the generator is defined.
    pub fn domain_len(&self) -> usize {
        self.table.iter().filter(|t| t.is_some()).count()
    }

    /// `(source, image)` pairs in ascending source order.
    pub fn pairs(&self) -> impl Iterator<Item = (ElementId, ElementId)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(src, dst)| dst.map(|d| (src, d)))
    }
}

/// A formal composition of generators.
///
/// Letters are stored in composition order: the word `[g, h]` denotes
/// `g ∘ h`, so `h` acts first. Concatenation is composition and the empty
/// word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(generator: usize) -> Self {
        Word {
            letters: vec![generator],
        }
    }

    pub fn from_indices(letters: Vec<usize>) -> Self {
        Word { letters }
    }

    /// Parses generator names in composition order.
    pub fn from_names<S: AsRef<str>>(scenario: &Scenario, names: &[S]) -> Result<Self> {
        names
            .iter()
            .map(|n| {
                scenario
                    .generator_index(n.as_ref())
                    .ok_or_else(|| Error::UnknownGenerator(n.as_ref().to_owned()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::from_indices)
    }

    /// Builds the word `g₀^e₀ ∘ g₁^e₁ ∘ …` from an exponent vector keyed by
    /// generator name. In a commutative scenario every arrangement of these
    /// letters acts identically wherever all of them are defined.
    pub fn from_exponents(scenario: &Scenario, exponents: &BTreeMap<String, u32>) -> Result<Self> {
        let mut letters = Vec::new();
        for (name, &count) in exponents {
            let g = scenario
                .generator_index(name)
                .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
            letters.extend(std::iter::repeat_n(g, count as usize));
        }
        Ok(Word { letters })
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Exponent of each generator, indexed by generator position.
    pub fn exponents(&self, generator_count: usize) -> Vec<u32> {
        let mut exps = vec![0; generator_count];
        for &g in &self.letters {
            exps[g] += 1;
        }
        exps
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }
}

/// One witnessed failure of pointwise commutativity:
/// `first(second(element)) = left` but `second(first(element)) = right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutativityViolation {
    pub first: usize,
    pub second: usize,
    pub element: ElementId,
    pub left: ElementId,
    pub right: ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    name: String,
    description: String,
    commutative: bool,
    elements: Vec<Element>,
    generators: Vec<Generator>,
    base_weak: Vec<(ElementId, ElementId)>,
    base_strict: Vec<(ElementId, ElementId)>,
}

impl Scenario {
    /// Assembles and validates a scenario.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        commutative: bool,
        elements: Vec<Element>,
        generators: Vec<Generator>,
        base_weak: Vec<(ElementId, ElementId)>,
        base_strict: Vec<(ElementId, ElementId)>,
    ) -> Result<Self> {
        let scenario = Scenario {
            name: name.into(),
            description: description.into(),
            commutative,
            elements,
            generators,
            base_weak,
            base_strict,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        let n = self.elements.len();
        let mut labels = HashSet::new();
        for (position, e) in self.elements.iter().enumerate() {
            if e.id != position {
                return Err(Error::NonContiguousId { position, id: e.id });
            }
            if !labels.insert(e.label.as_str()) {
                return Err(Error::DuplicateLabel(e.label.clone()));
            }
        }

        let mut names = HashSet::new();
        for g in &self.generators {
            if !names.insert(g.name.as_str()) {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
            if g.table.len() != n {
                return Err(Error::DanglingId {
                    context: format!("generator {:?}", g.name),
                    id: g.table.len().max(n),
                });
            }
            if let Some(id) = g.table.iter().flatten().find(|&&d| d >= n) {
                return Err(Error::DanglingId {
                    context: format!("generator {:?}", g.name),
                    id: *id,
                });
            }
        }

        for (kind, pairs) in [
            ("weak pair", &self.base_weak),
            ("strict pair", &self.base_strict),
        ] {
            for &(x, y) in pairs {
                for id in [x, y] {
                    if id >= n {
                        return Err(Error::DanglingId {
                            context: format!("{kind} [{x},{y}]"),
                            id,
                        });
                    }
                }
            }
        }

        let strict: HashSet<_> = self.base_strict.iter().copied().collect();
        for &(x, y) in &self.base_strict {
            if strict.contains(&(y, x)) {
                return Err(Error::ContradictoryStrict {
                    x: self.label(x).to_owned(),
                    y: self.label(y).to_owned(),
                });
            }
        }

        if self.commutative {
            if let Some(v) = check_commutativity(self).into_iter().next() {
                return Err(Error::NotCommutative {
                    first: self.generators[v.first].name.clone(),
                    second: self.generators[v.second].name.clone(),
                    element: self.label(v.element).to_owned(),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn base_weak(&self) -> &[(ElementId, ElementId)] {
        &self.base_weak
    }

    pub fn base_strict(&self) -> &[(ElementId, ElementId)] {
        &self.base_strict
    }

    pub fn label(&self, id: ElementId) -> &str {
        &self.elements[id].label
    }

    pub fn find(&self, label: &str) -> Option<ElementId> {
        self.elements.iter().position(|e| e.label == label)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// True when every generator is defined on the whole window.
    pub fn is_total(&self) -> bool {
        self.generators.iter().all(Generator::is_total)
    }

    /// Returns a copy with extra base pairs appended, re-validated.
    pub fn with_pairs(
        &self,
        weak: impl IntoIterator<Item = (ElementId, ElementId)>,
        strict: impl IntoIterator<Item = (ElementId, ElementId)>,
    ) -> Result<Self> {
        let mut s = self.clone();
        s.base_weak.extend(weak);
        s.base_strict.extend(strict);
        s.validate()?;
        Ok(s)
    }

    pub fn to_document(&self) -> ScenarioDocument {
        ScenarioDocument {
            name: self.name.clone(),
            description: self.description.clone(),
            commutative: self.commutative,
            elements: self.elements.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorDocument {
                    name: g.name.clone(),
                    map: g.pairs().map(|(s, d)| [s, d]).collect(),
                })
                .collect(),
            weak: self.base_weak.iter().map(|&(x, y)| [x, y]).collect(),
            strict: self.base_strict.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("scenario serializes")
    }
}

/// On-disk scenario layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub description: String,
    pub commutative: bool,
    pub elements: Vec<Element>,
    pub generators: Vec<GeneratorDocument>,
    pub weak: Vec<[ElementId; 2]>,
    pub strict: Vec<[ElementId; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDocument {
    pub name: String,
    pub map: Vec<[ElementId; 2]>,
}

impl TryFrom<ScenarioDocument> for Scenario {
    type Error = Error;

    fn try_from(doc: ScenarioDocument) -> Result<Self> {
        let n = doc.elements.len();
        let generators = doc
            .generators
            .into_iter()
            .map(|g| Generator::from_pairs(g.name, n, g.map.into_iter().map(|[s, d]| (s, d))))
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(
            doc.name,
            doc.description,
            doc.commutative,
            doc.elements,
            generators,
            doc.weak.into_iter().map(|[x, y]| (x, y)).collect(),
            doc.strict.into_iter().map(|[x, y]| (x, y)).collect(),
        )
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(source: &str) -> Result<Scenario> {
    let doc: ScenarioDocument = serde_json::from_str(source)?;
    Scenario::try_from(doc)
}

/// Every `(g, h, x)` at which both `g(h(x))` and `h(g(x))` are defined and
/// differ. Only distinct generator pairs are examined, each once.
pub fn check_commutativity(s: &Scenario) -> Vec<CommutativityViolation> {
    let gens = s.generators();
    let mut out = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let (g, h) = (&gens[i], &gens[j]);
            for x in 0..s.len() {
                let left = h.apply(x).and_then(|y| g.apply(y));
                let right = g.apply(x).and_then(|y| h.apply(y));
                if let (Some(left), Some(right)) = (left, right) {
                    if left != right {
                        out.push(CommutativityViolation {
                            first: i,
                            second: j,
                            element: x,
                            left,
                            right,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Image of `x` under the composed partial map; `None` as soon as an
/// intermediate image leaves the window.
pub fn apply_word(s: &Scenario, w: &Word, x: ElementId) -> Option<ElementId> {
    w.letters
        .iter()
        .rev()
        .try_fold(x, |acc, &g| s.generators[g].apply(acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> Scenario {
        let g = Generator::from_pairs("g", 2, [(0, 1), (1, 0)]).unwrap();
        Scenario::new(
            "swap",
            "",
            true,
            vec![Element::new(0, "x"), Element::new(1, "y")],
            vec![g],
            vec![],
            vec![(0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn minimal_scenario_is_valid() {
        let s = load_scenario(
            r#"{"name":"one","description":"","commutative":true,
                "elements":[{"id":0,"label":"x"}],"generators":[],"weak":[],"strict":[]}"#,
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.generators().is_empty());
    }

    #[test]
    fn contradictory_strict_pair_is_rejected() {
        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":0,"label":"x"},{"id":1,"label":"y"}],
                "generators":[],"weak":[],"strict":[[0,1],[1,0]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContradictoryStrict { .. }), "{err}");
        assert!(err.to_string().contains('x'));
    }

    #[test]
    fn strict_self_pair_is_rejected() {
        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":0,"label":"x"}],"generators":[],"weak":[],"strict":[[0,0]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContradictoryStrict { .. }));
    }

    #[test]
    fn dangling_and_duplicate_entities_are_named() {
        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":0,"label":"x"}],"generators":[],"weak":[[0,3]],"strict":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DanglingId { id: 3, .. }), "{err}");

        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":0,"label":"x"},{"id":1,"label":"x"}],
                "generators":[],"weak":[],"strict":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(ref l) if l == "x"));

        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":1,"label":"x"}],"generators":[],"weak":[],"strict":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonContiguousId { .. }));

        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":0,"label":"x"}],
                "generators":[{"name":"g","map":[[0,0],[0,0]]}],"weak":[],"strict":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::GeneratorNotFunction { .. }));

        let err = load_scenario(
            r#"{"name":"bad","description":"","commutative":false,
                "elements":[{"id":0,"label":"x"}],
                "generators":[{"name":"g","map":[[0,4]]}],"weak":[],"strict":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DanglingId { id: 4, .. }));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = load_scenario(
            r#"{"name":"x","description":"","commutative":false,"elements":[],
                "generators":[],"weak":[],"strict":[],"extra":1}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn declared_commutative_with_violation_is_rejected() {
        // g: 0->1, h: 0->2, 1->2, 2->0 ; g(h(0)) = g(2) undefined ... use total tables
        let g = Generator::from_pairs("g", 3, [(0, 1), (1, 0), (2, 2)]).unwrap();
        let h = Generator::from_pairs("h", 3, [(0, 0), (1, 2), (2, 1)]).unwrap();
        let elements = (0..3)
            .map(|i| Element::new(i, format!("e{i}")))
            .collect::<Vec<_>>();
        let err = Scenario::new(
            "c",
            "",
            true,
            elements.clone(),
            vec![g.clone(), h.clone()],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotCommutative { .. }));
        let s = Scenario::new("c", "", false, elements, vec![g, h], vec![], vec![]).unwrap();
        let report = check_commutativity(&s);
        // g(h(0)) = 1, h(g(0)) = 2
        assert!(report.contains(&CommutativityViolation {
            first: 0,
            second: 1,
            element: 0,
            left: 1,
            right: 2
        }));
        assert_eq!(report.len(), 3);
    }

    #[test]
    fn words_compose_right_to_left() {
        let s = two_cycle();
        assert_eq!(apply_word(&s, &Word::identity(), 1), Some(1));
        assert_eq!(apply_word(&s, &Word::letter(0), 0), Some(1));
        assert_eq!(apply_word(&s, &Word::from_indices(vec![0, 0]), 0), Some(0));
        let mut exps = BTreeMap::new();
        exps.insert("g".to_string(), 3);
        let w = Word::from_exponents(&s, &exps).unwrap();
        assert_eq!(w.exponents(1), vec![3]);
        assert_eq!(apply_word(&s, &w, 0), Some(1));
        assert!(Word::from_names(&s, &["nope"]).is_err());
    }

    #[test]
    fn document_round_trip() {
        let s = two_cycle();
        let back = load_scenario(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
