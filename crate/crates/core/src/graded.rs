//! Finite sorted sets, arities, profiles and the elementary colimits used
//! throughout the crate.
//!
//! Elements of a [`GradedSet`] are interned names with a fixed per-sort order;
//! the index of an element inside its sort is its canonical position and all
//! outputs (quotients, products, enumerations) are produced in that order.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Index of a sort inside a [`SortSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(pub usize);

/// The ordered, non-empty set of sort names a construction is graded by.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SortSet {
    names: Vec<String>,
}

impl SortSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(invalid("a sort set needs at least one sort"));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(invalid("sort names must be non-empty"));
            }
            if names[..i].contains(n) {
                return Err(invalid(format!("duplicate sort name `{n}`")));
            }
        }
        Ok(Self { names })
    }

    /// The one-sorted case, with the sort called `*`.
    pub fn single() -> Self {
        Self {
            names: vec!["*".to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_single(&self) -> bool {
        self.names.len() == 1
    }

    pub fn name(&self, s: Sort) -> &str {
        &self.names[s.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sort(&self, name: &str) -> Result<Sort> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(Sort)
            .ok_or_else(|| invalid(format!("unknown sort `{name}`")))
    }

    pub fn sorts(&self) -> impl Iterator<Item = Sort> + '_ {
        (0..self.names.len()).map(Sort)
    }

    /// All arities of length at most `max_len`, shortest first and
    /// lexicographic within a length.
    pub fn arities_up_to(&self, max_len: usize) -> Vec<Arity> {
        let mut out = vec![Arity::empty()];
        let mut frontier = vec![Arity::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for a in &frontier {
                for s in self.sorts() {
                    let mut w = a.0.clone();
                    w.push(s);
                    next.push(Arity(w));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    pub(crate) fn check(&self, s: Sort) -> Result<()> {
        if s.0 < self.names.len() {
            Ok(())
        } else {
            Err(invalid(format!("sort index {} out of range", s.0)))
        }
    }
}

/// A finite word of sorts: the input shape of an operation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arity(pub Vec<Sort>);

impl Arity {
    pub fn empty() -> Self {
        Arity(Vec::new())
    }

    /// The word `s s ... s` of length `n`.
    pub fn uniform(s: Sort, n: usize) -> Self {
        Arity(vec![s; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.0
    }

    pub fn concat(&self, other: &Arity) -> Arity {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        Arity(w)
    }

    /// Number of positions carrying sort `s`.
    pub fn count(&self, s: Sort) -> usize {
        self.0.iter().filter(|&&t| t == s).count()
    }

    pub fn validate(&self, sorts: &SortSet) -> Result<()> {
        self.0.iter().try_for_each(|&s| sorts.check(s))
    }

    pub fn display(&self, sorts: &SortSet) -> String {
        let parts: Vec<&str> = self.0.iter().map(|&s| sorts.name(s)).collect();
        format!("({})", parts.join(","))
    }

    pub fn parse(text: &str, sorts: &SortSet) -> Result<Arity> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(Arity::empty());
        }
        t.split(',')
            .map(|n| sorts.sort(n.trim()))
            .collect::<Result<Vec<_>>>()
            .map(Arity)
    }
}

/// An output sort together with an input arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile {
    pub output: Sort,
    pub inputs: Arity,
}

impl Profile {
    pub fn new(output: Sort, inputs: Arity) -> Self {
        Self { output, inputs }
    }

    pub fn validate(&self, sorts: &SortSet) -> Result<()> {
        sorts.check(self.output)?;
        self.inputs.validate(sorts)
    }

    pub fn display(&self, sorts: &SortSet) -> String {
        format!("{}<-{}", sorts.name(self.output), self.inputs.display(sorts))
    }

    /// Parses `out<-(a,b,...)` or `out;a,b`.
    pub fn parse(text: &str, sorts: &SortSet) -> Result<Profile> {
        let (out, ins) = text
            .split_once("<-")
            .or_else(|| text.split_once(';'))
            .ok_or_else(|| Error::Parse(format!("profile `{text}` must look like `out<-(in,...)`")))?;
        Ok(Profile::new(sorts.sort(out.trim())?, Arity::parse(ins, sorts)?))
    }

    /// All profiles with at most `max_len` inputs, output-major.
    pub fn all_up_to(sorts: &SortSet, max_len: usize) -> Vec<Profile> {
        let ar = sorts.arities_up_to(max_len);
        sorts
            .sorts()
            .flat_map(|o| ar.iter().map(move |w| Profile::new(o, w.clone())))
            .collect()
    }
}

/// A sort-preserving map of positions between two arities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArityMorphism {
    pub domain: Arity,
    pub codomain: Arity,
    pub map: Vec<usize>,
}

impl ArityMorphism {
    pub fn new(domain: Arity, codomain: Arity, map: Vec<usize>) -> Result<Self> {
        if map.len() != domain.len() {
            return Err(invalid("arity morphism has the wrong number of positions"));
        }
        for (k, &m) in map.iter().enumerate() {
            if m >= codomain.len() || codomain.0[m] != domain.0[k] {
                return Err(invalid(format!("position {k} is not sent to a position of the same sort")));
            }
        }
        Ok(Self { domain, codomain, map })
    }

    pub fn identity(a: &Arity) -> Self {
        Self {
            domain: a.clone(),
            codomain: a.clone(),
            map: (0..a.len()).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ArityMorphism) -> Result<Self> {
        if self.codomain != other.domain {
            return Err(invalid("arity morphisms are not composable"));
        }
        Ok(Self {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            map: self.map.iter().map(|&m| other.map[m]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.map.iter().enumerate().all(|(k, &m)| k == m)
    }
}

/// All sort-compatible position maps `a → b`, in lexicographic order of the
/// image word.
pub fn enumerate_arity_morphisms(a: &Arity, b: &Arity) -> Vec<ArityMorphism> {
    let choices: Vec<Vec<usize>> = a
        .0
        .iter()
        .map(|&s| (0..b.len()).filter(|&m| b.0[m] == s).collect())
        .collect();
    let radices: Vec<usize> = choices.iter().map(Vec::len).collect();
    tuples(&radices)
        .map(|t| ArityMorphism {
            domain: a.clone(),
            codomain: b.clone(),
            map: t.iter().enumerate().map(|(k, &c)| choices[k][c]).collect(),
        })
        .collect()
}

/// Iterates all tuples `t` with `t[k] < radices[k]`, last coordinate fastest.
/// The empty radix list yields exactly one (empty) tuple.
pub fn tuples(radices: &[usize]) -> Tuples {
    let done = radices.contains(&0);
    Tuples {
        radices: radices.to_vec(),
        current: vec![0; radices.len()],
        done,
    }
}

pub struct Tuples {
    radices: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut k = self.radices.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.current[k] += 1;
            if self.current[k] < self.radices[k] {
                break;
            }
            self.current[k] = 0;
        }
        Some(out)
    }
}

/// Mixed-radix rank of a tuple, consistent with the order of [`tuples`].
pub fn tuple_rank(t: &[usize], radices: &[usize]) -> usize {
    t.iter().zip(radices).fold(0, |acc, (&x, &r)| acc * r + x)
}

/// A finite graded set: one ordered list of distinct element names per sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSet {
    sorts: SortSet,
    elements: Vec<Vec<String>>,
}

impl GradedSet {
    pub fn new(sorts: SortSet, elements: Vec<Vec<String>>) -> Result<Self> {
        if elements.len() != sorts.len() {
            return Err(invalid("one element list per sort is required"));
        }
        for (s, list) in elements.iter().enumerate() {
            for (i, e) in list.iter().enumerate() {
                if list[..i].contains(e) {
                    return Err(invalid(format!(
                        "duplicate element `{e}` in sort `{}`",
                        sorts.name(Sort(s))
                    )));
                }
            }
        }
        Ok(Self { sorts, elements })
    }

    pub fn empty(sorts: &SortSet) -> Self {
        Self {
            sorts: sorts.clone(),
            elements: vec![Vec::new(); sorts.len()],
        }
    }

    /// Single-sorted set with elements named by the given strings.
    pub fn from_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(SortSet::single(), vec![names.into_iter().map(Into::into).collect()])
    }

    /// Sorted set with the given sizes; elements are named `<sort><index>`.
    pub fn with_sizes(sorts: &SortSet, sizes: &[usize]) -> Self {
        let elements = sorts
            .sorts()
            .map(|s| {
                let n = sizes.get(s.0).copied().unwrap_or(0);
                let stem = if sorts.is_single() { "x" } else { sorts.name(s) };
                (0..n).map(|i| format!("{stem}{i}")).collect()
            })
            .collect();
        Self {
            sorts: sorts.clone(),
            elements,
        }
    }

    /// The graded set represented by an arity: one element `x<k+1>` per position.
    pub fn representable(sorts: &SortSet, w: &Arity) -> Self {
        let mut elements = vec![Vec::new(); sorts.len()];
        for (k, s) in w.0.iter().enumerate() {
            elements[s.0].push(format!("x{}", k + 1));
        }
        Self {
            sorts: sorts.clone(),
            elements,
        }
    }

    pub fn sorts(&self) -> &SortSet {
        &self.sorts
    }

    pub fn len(&self, s: Sort) -> usize {
        self.elements[s.0].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.elements.iter().map(Vec::len).collect()
    }

    pub fn total_len(&self) -> usize {
        self.elements.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_len() == 0
    }

    pub fn name(&self, s: Sort, i: usize) -> &str {
        &self.elements[s.0][i]
    }

    pub fn names(&self, s: Sort) -> &[String] {
        &self.elements[s.0]
    }

    pub fn index_of(&self, s: Sort, name: &str) -> Option<usize> {
        self.elements[s.0].iter().position(|e| e == name)
    }

    /// All elements as `(sort, index)` pairs in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = (Sort, usize)> + '_ {
        self.sorts
            .sorts()
            .flat_map(move |s| (0..self.len(s)).map(move |i| (s, i)))
    }

    /// The arity listing every element once, sort-major. Position `k` of the
    /// result is the `k`-th element of [`GradedSet::elements`].
    pub fn as_arity(&self) -> Arity {
        Arity(self.elements().map(|(s, _)| s).collect())
    }

    /// Position of an element inside [`GradedSet::as_arity`].
    pub fn position(&self, s: Sort, i: usize) -> usize {
        self.elements[..s.0].iter().map(Vec::len).sum::<usize>() + i
    }

    /// Inverse of [`GradedSet::position`].
    pub fn at_position(&self, mut k: usize) -> (Sort, usize) {
        for (s, list) in self.elements.iter().enumerate() {
            if k < list.len() {
                return (Sort(s), k);
            }
            k -= list.len();
        }
        panic!("position out of range")
    }

    /// The product `X^w = ∏ X_{w(k)}` as a list of index tuples, lexicographic.
    pub fn product(&self, w: &Arity) -> Vec<Vec<usize>> {
        tuples(&self.product_radices(w)).collect()
    }

    pub fn product_radices(&self, w: &Arity) -> Vec<usize> {
        w.0.iter().map(|&s| self.len(s)).collect()
    }

    pub fn product_size(&self, w: &Arity) -> usize {
        w.0.iter().map(|&s| self.len(s)).product()
    }

    /// Disjoint union with the elements of `other` after those of `self` in
    /// every sort. Colliding names get a `'` suffix.
    pub fn coproduct(&self, other: &GradedSet) -> Result<GradedSet> {
        if self.sorts != other.sorts {
            return Err(invalid("coproduct of graded sets over different sorts"));
        }
        let mut elements = self.elements.clone();
        for (s, list) in other.elements.iter().enumerate() {
            for e in list {
                let mut name = e.clone();
                while elements[s].contains(&name) {
                    name.push('\'');
                }
                elements[s].push(name);
            }
        }
        GradedSet::new(self.sorts.clone(), elements)
    }

    /// Cartesian product with a single-sorted set, sortwise.
    pub fn times(&self, other: &[String]) -> GradedSet {
        let elements = self
            .elements
            .iter()
            .map(|list| {
                list.iter()
                    .flat_map(|a| other.iter().map(move |b| format!("({a},{b})")))
                    .collect()
            })
            .collect();
        GradedSet {
            sorts: self.sorts.clone(),
            elements,
        }
    }

    pub fn to_doc(&self) -> GradedSetDoc {
        GradedSetDoc {
            sorts: self.sorts.names.clone(),
            elements: self
                .sorts
                .sorts()
                .map(|s| (self.sorts.name(s).to_string(), self.elements[s.0].clone()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &GradedSetDoc) -> Result<Self> {
        let sorts = SortSet::new(doc.sorts.iter().cloned())?;
        let mut elements = vec![Vec::new(); sorts.len()];
        for (name, list) in &doc.elements {
            elements[sorts.sort(name)?.0] = list.clone();
        }
        GradedSet::new(sorts, elements)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("graded set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GradedSetDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

impl fmt::Display for GradedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sorts
            .sorts()
            .map(|s| format!("{}: {{{}}}", self.sorts.name(s), self.elements[s.0].join(", ")))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Serialized form of a graded set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSetDoc {
    pub sorts: Vec<String>,
    pub elements: IndexMap<String, Vec<String>>,
}

/// Serialized form of a profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub output: String,
    pub inputs: Vec<String>,
}

impl ProfileDoc {
    pub fn from_profile(p: &Profile, sorts: &SortSet) -> Self {
        Self {
            output: sorts.name(p.output).to_string(),
            inputs: p.inputs.0.iter().map(|&s| sorts.name(s).to_string()).collect(),
        }
    }

    pub fn to_profile(&self, sorts: &SortSet) -> Result<Profile> {
        Ok(Profile::new(
            sorts.sort(&self.output)?,
            Arity(self.inputs.iter().map(|n| sorts.sort(n)).collect::<Result<_>>()?),
        ))
    }
}

/// A total sort-preserving map between finite graded sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    domain: GradedSet,
    codomain: GradedSet,
    maps: Vec<Vec<usize>>,
}

impl GradedMap {
    pub fn new(domain: GradedSet, codomain: GradedSet, maps: Vec<Vec<usize>>) -> Result<Self> {
        if domain.sorts != codomain.sorts {
            return Err(invalid("graded map between sets over different sorts"));
        }
        if maps.len() != domain.sorts.len() {
            return Err(invalid("graded map needs one function per sort"));
        }
        for s in domain.sorts.sorts() {
            let m = &maps[s.0];
            if m.len() != domain.len(s) {
                return Err(invalid("graded map is not total"));
            }
            if m.iter().any(|&y| y >= codomain.len(s)) {
                return Err(invalid("graded map lands outside its codomain"));
            }
        }
        Ok(Self { domain, codomain, maps })
    }

    pub fn identity(x: &GradedSet) -> Self {
        Self {
            domain: x.clone(),
            codomain: x.clone(),
            maps: x.sorts.sorts().map(|s| (0..x.len(s)).collect()).collect(),
        }
    }

    /// Builds a map from a function on `(sort, index)`.
    pub fn from_fn(domain: &GradedSet, codomain: &GradedSet, f: impl Fn(Sort, usize) -> usize) -> Result<Self> {
        let maps = domain
            .sorts
            .sorts()
            .map(|s| (0..domain.len(s)).map(|i| f(s, i)).collect())
            .collect();
        Self::new(domain.clone(), codomain.clone(), maps)
    }

    pub fn domain(&self) -> &GradedSet {
        &self.domain
    }

    pub fn codomain(&self) -> &GradedSet {
        &self.codomain
    }

    pub fn apply(&self, s: Sort, i: usize) -> usize {
        self.maps[s.0][i]
    }

    pub fn table(&self, s: Sort) -> &[usize] {
        &self.maps[s.0]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.codomain != other.domain {
            return Err(invalid("graded maps are not composable"));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(s, m)| m.iter().map(|&y| other.maps[s][y]).collect())
            .collect();
        Ok(GradedMap {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            maps,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self
                .maps
                .iter()
                .all(|m| m.iter().enumerate().all(|(i, &y)| i == y))
    }

    pub fn is_injective(&self) -> bool {
        self.maps.iter().all(|m| {
            let mut seen = std::collections::HashSet::new();
            m.iter().all(|y| seen.insert(*y))
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.maps.iter().enumerate().all(|(s, m)| {
            let mut hit = vec![false; self.codomain.len(Sort(s))];
            m.iter().for_each(|&y| hit[y] = true);
            hit.into_iter().all(|h| h)
        })
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// Union-find with the least index as representative of every class.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`; returns whether they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Class index of every element, classes numbered by increasing
    /// representative; also returns the representatives.
    pub fn classes(&mut self) -> (Vec<usize>, Vec<usize>) {
        let n = self.parent.len();
        let mut class_of_root = vec![usize::MAX; n];
        let mut reps = Vec::new();
        let mut class = vec![0; n];
        for x in 0..n {
            let r = self.find(x);
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = reps.len();
                reps.push(r);
            }
            class[x] = class_of_root[r];
        }
        (class, reps)
    }
}

/// Quotient of `Y` by the equivalence relation generated by `f(x) ~ g(x)`,
/// for a reflexive pair `f, g: X → Y` with common section `s: Y → X`.
///
/// Each class is named after its least element and classes are listed by
/// increasing representative. Returns the quotient and the projection.
pub fn reflexive_coequalizer(f: &GradedMap, g: &GradedMap, s: &GradedMap) -> Result<(GradedSet, GradedMap)> {
    if f.domain != g.domain || f.codomain != g.codomain {
        return Err(invalid("coequalizer of maps with different endpoints"));
    }
    if s.domain != f.codomain || s.codomain != f.domain {
        return Err(invalid("the reflection must go from the codomain to the domain"));
    }
    if !s.then(f)?.is_identity() || !s.then(g)?.is_identity() {
        return Err(invalid("reflection law violated: f∘s and g∘s must be the identity"));
    }
    Ok(coequalizer(f, g))
}

/// Set-level coequalizer of an arbitrary parallel pair (no reflexivity check).
pub fn coequalizer(f: &GradedMap, g: &GradedMap) -> (GradedSet, GradedMap) {
    let y = &f.codomain;
    let sorts = y.sorts.clone();
    let mut elements = Vec::with_capacity(sorts.len());
    let mut maps = Vec::with_capacity(sorts.len());
    for s in sorts.sorts() {
        let mut uf = UnionFind::new(y.len(s));
        for x in 0..f.domain.len(s) {
            uf.union(f.apply(s, x), g.apply(s, x));
        }
        let (class, reps) = uf.classes();
        elements.push(reps.iter().map(|&r| y.name(s, r).to_string()).collect());
        maps.push(class);
    }
    let quotient = GradedSet { sorts, elements };
    let proj = GradedMap {
        domain: y.clone(),
        codomain: quotient.clone(),
        maps,
    };
    (quotient, proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> GradedSet {
        GradedSet::from_names(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn identity_coequalizer_is_identity() {
        let y = abc();
        let id = GradedMap::identity(&y);
        let (q, p) = reflexive_coequalizer(&id, &id, &id).unwrap();
        assert_eq!(q, y);
        assert!(p.is_identity());
    }

    #[test]
    fn reflection_law_is_checked() {
        let y = abc();
        let x = GradedSet::from_names(["x"]).unwrap();
        let f = GradedMap::new(x.clone(), y.clone(), vec![vec![0]]).unwrap();
        let g = GradedMap::new(x.clone(), y.clone(), vec![vec![1]]).unwrap();
        let s = GradedMap::new(y, x, vec![vec![0, 0, 0]]).unwrap();
        assert!(matches!(reflexive_coequalizer(&f, &g, &s), Err(Error::Invalid(_))));
    }

    #[test]
    fn glue_two_points() {
        let y = abc();
        let x = GradedSet::from_names(["a", "b", "c", "p"]).unwrap();
        let f = GradedMap::new(x.clone(), y.clone(), vec![vec![0, 1, 2, 0]]).unwrap();
        let g = GradedMap::new(x.clone(), y.clone(), vec![vec![0, 1, 2, 1]]).unwrap();
        let s = GradedMap::new(y, x, vec![vec![0, 1, 2]]).unwrap();
        let (q, p) = reflexive_coequalizer(&f, &g, &s).unwrap();
        assert_eq!(q.total_len(), 2);
        assert_eq!(q.names(Sort(0)), &["a".to_string(), "c".to_string()]);
        assert_eq!(p.table(Sort(0)), &[0, 0, 1]);
    }

    #[test]
    fn products() {
        let x = abc();
        assert_eq!(x.product(&Arity::empty()), vec![Vec::<usize>::new()]);
        assert_eq!(x.product(&Arity::uniform(Sort(0), 2)).len(), 9);
        let sorts = SortSet::new(["v", "e"]).unwrap();
        let ve = GradedSet::with_sizes(&sorts, &[2, 3]);
        let w = Arity(vec![Sort(0), Sort(1), Sort(0)]);
        assert_eq!(ve.product(&w).len(), 12);
        assert_eq!(ve.product(&w)[1], vec![0, 0, 1]);
    }

    #[test]
    fn arity_morphism_counts() {
        let s = Sort(0);
        for n in 0..4 {
            assert_eq!(enumerate_arity_morphisms(&Arity::uniform(s, 1), &Arity::uniform(s, n)).len(), n);
        }
        assert_eq!(
            enumerate_arity_morphisms(&Arity::uniform(s, 2), &Arity::uniform(s, 2)).len(),
            4
        );
        let a = Arity(vec![Sort(0)]);
        let b = Arity(vec![Sort(1), Sort(1)]);
        assert!(enumerate_arity_morphisms(&a, &b).is_empty());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let sorts = SortSet::new(["v", "e"]).unwrap();
        let x = GradedSet::with_sizes(&sorts, &[2, 1]);
        let text = x.to_json();
        let back = GradedSet::from_json(&text).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn profile_parse_display() {
        let sorts = SortSet::new(["v", "e"]).unwrap();
        let p = Profile::parse("e<-(v,v)", &sorts).unwrap();
        assert_eq!(p.display(&sorts), "e<-(v,v)");
        assert_eq!(Profile::parse("v;e", &sorts).unwrap().inputs.len(), 1);
        assert_eq!(Profile::parse("v<-()", &sorts).unwrap().inputs.len(), 0);
    }

    #[test]
    fn positions_round_trip() {
        let sorts = SortSet::new(["v", "e"]).unwrap();
        let x = GradedSet::with_sizes(&sorts, &[2, 3]);
        for (k, (s, i)) in x.elements().enumerate() {
            assert_eq!(x.position(s, i), k);
            assert_eq!(x.at_position(k), (s, i));
        }
    }
}
