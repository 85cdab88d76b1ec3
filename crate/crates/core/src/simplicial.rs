//! Degeneracy diagrams: functors on monotone surjections, truncated at a
//! finite level. Freeness certificates, closed subdiagrams, the standard
//! resolution of an algebra and s-freeness.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{coproduct_with_free, free_algebra, Algebra, Presented};
use crate::error::{invalid, Error, Result};
use crate::graded::{GradedMap, GradedSet, GradedSetDoc, Sort, SortSet, UnionFind};
use crate::series::LawReport;
use crate::theory::Theory;

/// A weakly monotone surjection `[n] ↠ [m]`, stored as its values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Surjection(pub Vec<usize>);

impl Surjection {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.first() != Some(&0) || map.windows(2).any(|p| p[1] != p[0] && p[1] != p[0] + 1) {
            return Err(invalid("not a monotone surjection"));
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..=n).collect())
    }

    /// The elementary degeneracy `σ^j: [n+1] ↠ [n]` hitting `j` twice.
    pub fn elementary(n: usize, j: usize) -> Self {
        Self((0..=n + 1).map(|i| if i <= j { i } else { i - 1 }).collect())
    }

    pub fn source(&self) -> usize {
        self.0.len() - 1
    }

    pub fn target(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    pub fn is_identity(&self) -> bool {
        self.source() == self.target()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Surjection) -> Surjection {
        Surjection(self.0.iter().map(|&i| other.0[i]).collect())
    }

    /// The lowest `j` with `self = rest ∘ σ^j`; `None` for identities.
    fn first_step(&self) -> Option<(usize, Surjection)> {
        let j = self.0.windows(2).position(|p| p[0] == p[1])?;
        let mut rest = self.0.clone();
        rest.remove(j + 1);
        Some((j, Surjection(rest)))
    }
}

impl std::fmt::Display for Surjection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// All monotone surjections `[n] ↠ [m]`, lexicographic.
pub fn enumerate_surjections(n: usize, m: usize) -> Vec<Surjection> {
    if m > n {
        return Vec::new();
    }
    // A surjection is fixed by the `m` positions where the value steps up.
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(m);
    fn go(start: usize, n: usize, m: usize, steps: &mut Vec<usize>, out: &mut Vec<Surjection>) {
        if steps.len() == m {
            let mut map = vec![0; n + 1];
            for (i, v) in map.iter_mut().enumerate() {
                *v = steps.iter().filter(|&&s| s <= i).count();
            }
            out.push(Surjection(map));
            return;
        }
        for s in start..=n {
            steps.push(s);
            go(s + 1, n, m, steps, out);
            steps.pop();
        }
    }
    go(1, n, m, &mut steps, &mut out);
    out.sort();
    out
}

/// A degeneracy diagram truncated at level `N`, given by its elementary
/// degeneracies `s_j: X_n → X_{n+1}` for `n < N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyDiagram {
    levels: Vec<GradedSet>,
    degeneracies: Vec<Vec<GradedMap>>,
}

impl DegeneracyDiagram {
    pub fn new(levels: Vec<GradedSet>, degeneracies: Vec<Vec<GradedMap>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("a diagram needs level 0"));
        }
        if degeneracies.len() + 1 != levels.len() {
            return Err(invalid("degeneracies are needed below the truncation level"));
        }
        for (n, ds) in degeneracies.iter().enumerate() {
            if ds.len() != n + 1 {
                return Err(invalid(format!("level {n} needs {} degeneracies", n + 1)));
            }
            for d in ds {
                if d.domain() != &levels[n] || d.codomain() != &levels[n + 1] {
                    return Err(invalid(format!("degeneracy on level {n} has the wrong ends")));
                }
            }
        }
        Ok(Self { levels, degeneracies })
    }

    /// The diagram with the same set at every level and identity operators.
    pub fn constant(x: &GradedSet, truncation: usize) -> Self {
        let id = GradedMap::identity(x);
        Self {
            levels: vec![x.clone(); truncation + 1],
            degeneracies: (0..truncation).map(|n| vec![id.clone(); n + 1]).collect(),
        }
    }

    /// The diagram `[n] ↦ Δ([n], [k])` of monotone maps into `[k]`, acting by
    /// precomposition.
    pub fn standard_simplex(k: usize, truncation: usize) -> Self {
        let maps: Vec<Vec<Vec<usize>>> = (0..=truncation).map(|n| monotone_maps(n, k, false)).collect();
        simplex_like(&maps)
    }

    /// The diagram `[n] ↦ Δ₀([n], [k])`: monotone maps fixing 0.
    pub fn pointed_simplex(k: usize, truncation: usize) -> Self {
        let maps: Vec<Vec<Vec<usize>>> = (0..=truncation).map(|n| monotone_maps(n, k, true)).collect();
        simplex_like(&maps)
    }

    /// The free diagram on generators `L_m`: level `n` is the disjoint union
    /// of copies of `L_m` indexed by surjections `[n] ↠ [m]`.
    pub fn free(generators: &[GradedSet]) -> Result<Self> {
        let sorts = generators.first().ok_or_else(|| invalid("no generator levels"))?.sorts().clone();
        let top = generators.len() - 1;
        let index = |n: usize| -> Vec<(usize, Surjection)> {
            (0..=n)
                .rev()
                .flat_map(|m| enumerate_surjections(n, m).into_iter().map(move |s| (m, s)))
                .collect()
        };
        let mut levels = Vec::new();
        for n in 0..=top {
            let mut names = vec![Vec::new(); sorts.len()];
            for (m, s) in index(n) {
                for (sort, i) in generators[m].elements() {
                    let base = generators[m].name(sort, i);
                    names[sort.0].push(if s.is_identity() { base.to_string() } else { format!("{base}{s}") });
                }
            }
            levels.push(GradedSet::new(sorts.clone(), names)?);
        }
        let locate = |n: usize, m: usize, s: &Surjection, sort: Sort, i: usize| -> usize {
            let mut pos = 0;
            for (mm, ss) in index(n) {
                if mm == m && &ss == s {
                    return pos + i;
                }
                pos += generators[mm].len(sort);
            }
            unreachable!("surjection listed")
        };
        let mut degeneracies = Vec::new();
        for n in 0..top {
            let mut row = Vec::new();
            for j in 0..=n {
                let sj = Surjection::elementary(n, j);
                let mut maps: Vec<Vec<usize>> = vec![Vec::new(); sorts.len()];
                for (m, s) in index(n) {
                    let t = sj.then(&s);
                    for sort in sorts.sorts() {
                        for i in 0..generators[m].len(sort) {
                            maps[sort.0].push(locate(n + 1, m, &t, sort, i));
                        }
                    }
                }
                row.push(GradedMap::new(levels[n].clone(), levels[n + 1].clone(), maps)?);
            }
            degeneracies.push(row);
        }
        Self::new(levels, degeneracies)
    }

    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn sorts(&self) -> &SortSet {
        self.levels[0].sorts()
    }

    pub fn level(&self, n: usize) -> &GradedSet {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[GradedSet] {
        &self.levels
    }

    pub fn degeneracy(&self, n: usize, j: usize) -> &GradedMap {
        &self.degeneracies[n][j]
    }

    /// `x·σ` for `x ∈ X_m` and `σ: [n] ↠ [m]`.
    pub fn act(&self, sigma: &Surjection, sort: Sort, x: usize) -> usize {
        match sigma.first_step() {
            None => x,
            Some((j, rest)) => {
                let y = self.act(&rest, sort, x);
                self.degeneracies[rest.source()][j].apply(sort, y)
            }
        }
    }

    /// The operator of `σ` as a map `X_m → X_n`.
    pub fn operator(&self, sigma: &Surjection) -> GradedMap {
        let (n, m) = (sigma.source(), sigma.target());
        GradedMap::from_fn(&self.levels[m], &self.levels[n], |s, i| self.act(sigma, s, i)).expect("operator stays in range")
    }

    /// The degeneracy relations `s_{j+1} s_i = s_i s_j` (for `i ≤ j`, maps
    /// applied right to left) on every level within the truncation.
    pub fn check_functoriality(&self) -> LawReport {
        let mut r = LawReport::default();
        for n in 0..self.truncation().saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    let lhs = self.degeneracies[n][i].then(&self.degeneracies[n + 1][j + 1]);
                    let rhs = self.degeneracies[n][j].then(&self.degeneracies[n + 1][i]);
                    let ok = matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b);
                    r.record(ok, || format!("degeneracy relation for i={i}, j={j} fails on level {n}"));
                }
            }
        }
        r
    }

    /// Elements not of the form `y·σ` for a non-identity surjection.
    pub fn nondegenerate(&self, n: usize) -> Vec<Vec<usize>> {
        let mut hit: Vec<Vec<bool>> = self.sorts().sorts().map(|s| vec![false; self.levels[n].len(s)]).collect();
        if n > 0 {
            for d in self.degeneracies[n - 1].iter() {
                for (s, i) in self.levels[n - 1].elements() {
                    hit[s.0][d.apply(s, i)] = true;
                }
            }
        }
        hit.iter()
            .map(|h| h.iter().enumerate().filter(|(_, &b)| !b).map(|(i, _)| i).collect())
            .collect()
    }

    /// The subdiagram on the elements selected by `mask`, which must be
    /// closed under the operators.
    pub fn subdiagram(&self, mask: &[Vec<Vec<bool>>]) -> Result<(Self, Vec<GradedMap>)> {
        let mut levels = Vec::new();
        let mut inclusions = Vec::new();
        let mut renumber: Vec<Vec<HashMap<usize, usize>>> = Vec::new();
        for (n, x) in self.levels.iter().enumerate() {
            let mut names = Vec::new();
            let mut maps = Vec::new();
            let mut re = Vec::new();
            for s in x.sorts().sorts() {
                let kept: Vec<usize> = (0..x.len(s)).filter(|&i| mask[n][s.0][i]).collect();
                names.push(kept.iter().map(|&i| x.name(s, i).to_string()).collect());
                re.push(kept.iter().enumerate().map(|(k, &i)| (i, k)).collect());
                maps.push(kept);
            }
            let y = GradedSet::new(x.sorts().clone(), names)?;
            inclusions.push(GradedMap::new(y.clone(), x.clone(), maps)?);
            levels.push(y);
            renumber.push(re);
        }
        let mut degeneracies = Vec::new();
        for n in 0..self.truncation() {
            let mut row = Vec::new();
            for d in &self.degeneracies[n] {
                let mut maps = Vec::new();
                for s in self.sorts().sorts() {
                    let mut table = Vec::new();
                    for &i in inclusions[n].table(s) {
                        let j = d.apply(s, i);
                        table.push(*renumber[n + 1][s.0].get(&j).ok_or_else(|| {
                            invalid(format!("subset is not closed under degeneracies at {}", self.levels[n + 1].name(s, j)))
                        })?);
                    }
                    maps.push(table);
                }
                row.push(GradedMap::new(levels[n].clone(), levels[n + 1].clone(), maps)?);
            }
            degeneracies.push(row);
        }
        Ok((Self::new(levels, degeneracies)?, inclusions))
    }

    /// The quotient by the smallest operator-stable equivalence relation
    /// identifying the given pairs `(level, sort, a, b)`.
    pub fn glue(&self, pairs: &[(usize, Sort, usize, usize)]) -> Result<Self> {
        let sorts = self.sorts().clone();
        let offsets: Vec<Vec<usize>> = self
            .levels
            .iter()
            .map(|x| sorts.sorts().map(|s| x.position(s, 0)).collect())
            .collect();
        let base: Vec<usize> = self
            .levels
            .iter()
            .scan(0, |acc, x| {
                let b = *acc;
                *acc += x.total_len();
                Some(b)
            })
            .collect();
        let id = |n: usize, s: Sort, i: usize| base[n] + offsets[n][s.0] + i;
        let total = base.last().copied().unwrap_or(0) + self.levels.last().map_or(0, |x| x.total_len());
        let mut uf = UnionFind::new(total);
        for &(n, s, a, b) in pairs {
            uf.union(id(n, s, a), id(n, s, b));
        }
        loop {
            let mut changed = false;
            for n in 0..self.truncation() {
                for d in &self.degeneracies[n] {
                    for (s, i) in self.levels[n].elements() {
                        for (t, j) in self.levels[n].elements() {
                            if s == t && i < j && uf.find(id(n, s, i)) == uf.find(id(n, s, j)) {
                                changed |= uf.union(id(n + 1, s, d.apply(s, i)), id(n + 1, s, d.apply(s, j)));
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut levels = Vec::new();
        let mut classes: Vec<Vec<Vec<usize>>> = Vec::new();
        for (n, x) in self.levels.iter().enumerate() {
            let mut names = Vec::new();
            let mut cls = Vec::new();
            for s in sorts.sorts() {
                let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
                let mut nm = Vec::new();
                let mut c = Vec::new();
                for i in 0..x.len(s) {
                    let r = uf.find(id(n, s, i));
                    let k = *roots.entry(r).or_insert_with(|| {
                        nm.push(x.name(s, i).to_string());
                        nm.len() - 1
                    });
                    c.push(k);
                }
                names.push(nm);
                cls.push(c);
            }
            levels.push(GradedSet::new(sorts.clone(), names)?);
            classes.push(cls);
        }
        let mut degeneracies = Vec::new();
        for n in 0..self.truncation() {
            let mut row = Vec::new();
            for d in &self.degeneracies[n] {
                let mut maps = Vec::new();
                for s in sorts.sorts() {
                    let mut table = vec![0; levels[n].len(s)];
                    for i in 0..self.levels[n].len(s) {
                        table[classes[n][s.0][i]] = classes[n + 1][s.0][d.apply(s, i)];
                    }
                    maps.push(table);
                }
                row.push(GradedMap::new(levels[n].clone(), levels[n + 1].clone(), maps)?);
            }
            degeneracies.push(row);
        }
        Self::new(levels, degeneracies)
    }

    pub fn to_doc(&self) -> DiagramDoc {
        DiagramDoc {
            levels: self.levels.iter().map(GradedSet::to_doc).collect(),
            degeneracies: self
                .degeneracies
                .iter()
                .enumerate()
                .flat_map(|(n, row)| {
                    row.iter().enumerate().map(move |(j, d)| DegeneracyDoc {
                        level: n,
                        index: j,
                        table: self.levels[n]
                            .elements()
                            .map(|(s, i)| self.levels[n + 1].name(s, d.apply(s, i)).to_string())
                            .collect(),
                    })
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &DiagramDoc) -> Result<Self> {
        let levels = doc.levels.iter().map(GradedSet::from_doc).collect::<Result<Vec<_>>>()?;
        let mut degeneracies: Vec<Vec<Option<GradedMap>>> = (0..levels.len().saturating_sub(1)).map(|n| vec![None; n + 1]).collect();
        for d in &doc.degeneracies {
            let slot = degeneracies
                .get_mut(d.level)
                .and_then(|r| r.get_mut(d.index))
                .ok_or_else(|| Error::Parse(format!("degeneracy s_{} on level {} is out of range", d.index, d.level)))?;
            let (x, y) = (&levels[d.level], &levels[d.level + 1]);
            if d.table.len() != x.total_len() {
                return Err(Error::Parse("degeneracy table has the wrong length".into()));
            }
            let mut maps = vec![Vec::new(); x.sorts().len()];
            for ((s, _), name) in x.elements().zip(&d.table) {
                maps[s.0].push(y.index_of(s, name).ok_or_else(|| Error::Parse(format!("unknown element `{name}`")))?);
            }
            *slot = Some(GradedMap::new(x.clone(), y.clone(), maps)?);
        }
        let degeneracies = degeneracies
            .into_iter()
            .map(|r| r.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse("missing degeneracy".into()))?;
        Self::new(levels, degeneracies)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DiagramDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

/// Level-by-level file schema; degeneracy tables list images in sort-major
/// element order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub levels: Vec<GradedSetDoc>,
    pub degeneracies: Vec<DegeneracyDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyDoc {
    pub level: usize,
    pub index: usize,
    pub table: Vec<String>,
}

/// Weakly monotone maps `[n] → [k]`, optionally only those fixing 0.
pub fn monotone_maps(n: usize, k: usize, pointed: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(cur: &mut Vec<usize>, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n + 1 {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().copied().unwrap_or(0);
        for v in lo..=k {
            cur.push(v);
            go(cur, n, k, out);
            cur.pop();
        }
    }
    if pointed {
        go(&mut vec![0], n, k, &mut out);
    } else {
        go(&mut Vec::new(), n, k, &mut out);
    }
    out
}

fn simplex_like(maps: &[Vec<Vec<usize>>]) -> DegeneracyDiagram {
    let sorts = SortSet::single();
    let levels: Vec<GradedSet> = maps
        .iter()
        .map(|ms| {
            let names = ms.iter().map(|m| m.iter().map(usize::to_string).collect::<String>()).collect();
            GradedSet::new(sorts.clone(), vec![names]).expect("distinct maps")
        })
        .collect();
    let degeneracies = (0..maps.len() - 1)
        .map(|n| {
            (0..=n)
                .map(|j| {
                    let sj = Surjection::elementary(n, j);
                    let table = maps[n]
                        .iter()
                        .map(|m| {
                            let composed: Vec<usize> = sj.0.iter().map(|&i| m[i]).collect();
                            maps[n + 1].iter().position(|x| *x == composed).expect("closed under precomposition")
                        })
                        .collect();
                    GradedMap::new(levels[n].clone(), levels[n + 1].clone(), vec![table]).expect("valid table")
                })
                .collect()
        })
        .collect();
    DegeneracyDiagram { levels, degeneracies }
}

/// One element written as `generator·σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub level: usize,
    pub generator: usize,
    pub surjection: Surjection,
}

/// Generators `L_n ⊆ X_n` and the decomposition of every element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCertificate {
    /// `generators[n][sort]`: indices in `X_n`.
    pub generators: Vec<Vec<Vec<usize>>>,
    /// `decomposition[n][sort][i]` for every `i ∈ X_n`.
    pub decomposition: Vec<Vec<Vec<Decomposition>>>,
}

impl FreenessCertificate {
    pub fn generator_counts(&self) -> Vec<usize> {
        self.generators.iter().map(|l| l.iter().map(Vec::len).sum()).collect()
    }

    /// Rebuilds `⊔_σ L_m` and the comparison map into `X`, level by level.
    pub fn rebuild(&self, x: &DegeneracyDiagram) -> Result<(DegeneracyDiagram, Vec<GradedMap>)> {
        let gens: Vec<GradedSet> = self
            .generators
            .iter()
            .enumerate()
            .map(|(n, l)| {
                let names = l
                    .iter()
                    .enumerate()
                    .map(|(s, is)| is.iter().map(|&i| x.level(n).name(Sort(s), i).to_string()).collect())
                    .collect();
                GradedSet::new(x.sorts().clone(), names)
            })
            .collect::<Result<_>>()?;
        let free = DegeneracyDiagram::free(&gens)?;
        let mut comparison = Vec::new();
        for n in 0..=x.truncation() {
            let mut maps = vec![Vec::new(); x.sorts().len()];
            for m in (0..=n).rev() {
                for s in enumerate_surjections(n, m) {
                    for sort in x.sorts().sorts() {
                        for &g in &self.generators[m][sort.0] {
                            maps[sort.0].push(x.act(&s, sort, g));
                        }
                    }
                }
            }
            comparison.push(GradedMap::new(free.level(n).clone(), x.level(n).clone(), maps)?);
        }
        Ok((free, comparison))
    }
}

/// Why a diagram is not free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessFailure {
    pub level: usize,
    pub element: String,
    pub reason: String,
}

/// Computes nondegenerate elements and checks that `(x, σ) ↦ x·σ` is a
/// bijection `⊔_σ L_m → X_n` on every level.
pub fn free_generators(x: &DegeneracyDiagram) -> Result<std::result::Result<FreenessCertificate, FreenessFailure>> {
    let f = x.check_functoriality();
    if !f.passed() {
        return Err(invalid(format!("not a degeneracy diagram: {}", f.failures.join("; "))));
    }
    let generators: Vec<Vec<Vec<usize>>> = (0..=x.truncation()).map(|n| x.nondegenerate(n)).collect();
    let mut decomposition = Vec::new();
    for n in 0..=x.truncation() {
        let mut found: Vec<Vec<Option<Decomposition>>> = x.sorts().sorts().map(|s| vec![None; x.level(n).len(s)]).collect();
        for m in (0..=n).rev() {
            for sigma in enumerate_surjections(n, m) {
                for sort in x.sorts().sorts() {
                    for &g in &generators[m][sort.0] {
                        let y = x.act(&sigma, sort, g);
                        let d = Decomposition {
                            level: m,
                            generator: g,
                            surjection: sigma.clone(),
                        };
                        if let Some(prev) = &found[sort.0][y] {
                            let name = |d: &Decomposition| format!("{}{}", x.level(d.level).name(sort, d.generator), d.surjection);
                            return Ok(Err(FreenessFailure {
                                level: n,
                                element: x.level(n).name(sort, y).to_string(),
                                reason: format!("equals both {} and {}", name(prev), name(&d)),
                            }));
                        }
                        found[sort.0][y] = Some(d);
                    }
                }
            }
        }
        let mut level = Vec::new();
        for sort in x.sorts().sorts() {
            let mut row = Vec::new();
            for (i, d) in found[sort.0].iter().enumerate() {
                match d {
                    Some(d) => row.push(d.clone()),
                    None => {
                        return Ok(Err(FreenessFailure {
                            level: n,
                            element: x.level(n).name(sort, i).to_string(),
                            reason: "not a degeneracy of a nondegenerate element".into(),
                        }))
                    }
                }
            }
            level.push(row);
        }
        decomposition.push(level);
    }
    Ok(Ok(FreenessCertificate { generators, decomposition }))
}

/// Verdict of the closure criterion for `Y ⊆ X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureVerdict {
    pub subdiagram: bool,
    pub closed: bool,
    pub witness: Option<String>,
}

/// `Y ⊆ X` (given by masks) is closed when `x·σ ∈ Y` forces `x ∈ Y`.
pub fn is_closed_subdiagram(x: &DegeneracyDiagram, mask: &[Vec<Vec<bool>>]) -> ClosureVerdict {
    let mut subdiagram = true;
    let mut closed = true;
    let mut witness = None;
    for n in 0..=x.truncation() {
        for m in n..=x.truncation() {
            for sigma in enumerate_surjections(m, n) {
                for (s, i) in x.level(n).elements() {
                    let y = x.act(&sigma, s, i);
                    let (inside_x, inside_y) = (mask[n][s.0][i], mask[m][s.0][y]);
                    if inside_x && !inside_y && subdiagram {
                        subdiagram = false;
                        witness.get_or_insert_with(|| {
                            format!("{} is in Y but {}{sigma} is not", x.level(n).name(s, i), x.level(n).name(s, i))
                        });
                    }
                    if inside_y && !inside_x && closed {
                        closed = false;
                        witness.get_or_insert_with(|| {
                            format!("{}{sigma} is in Y but {} is not", x.level(n).name(s, i), x.level(n).name(s, i))
                        });
                    }
                }
            }
        }
    }
    ClosureVerdict {
        subdiagram,
        closed,
        witness,
    }
}

/// The subdiagram generated by the given elements `(level, sort, index)`.
pub fn generated_mask(x: &DegeneracyDiagram, elements: &[(usize, Sort, usize)]) -> Vec<Vec<Vec<bool>>> {
    let mut mask: Vec<Vec<Vec<bool>>> = x
        .levels()
        .iter()
        .map(|l| l.sorts().sorts().map(|s| vec![false; l.len(s)]).collect())
        .collect();
    for &(n, s, i) in elements {
        for m in n..=x.truncation() {
            for sigma in enumerate_surjections(m, n) {
                mask[m][s.0][x.act(&sigma, s, i)] = true;
            }
        }
    }
    mask
}

/// A degeneracy diagram with the extra operators of `Δ₀`: faces `d_i` for
/// `1 ≤ i ≤ n` on each level `n ≥ 1`, alongside the degeneracies.
#[derive(Clone, Debug)]
pub struct Delta0Diagram {
    pub diagram: DegeneracyDiagram,
    /// `faces[n - 1][i - 1] = d_i: X_n → X_{n-1}`.
    pub faces: Vec<Vec<GradedMap>>,
}

impl Delta0Diagram {
    pub fn new(diagram: DegeneracyDiagram, faces: Vec<Vec<GradedMap>>) -> Result<Self> {
        if faces.len() != diagram.truncation() || faces.iter().enumerate().any(|(k, f)| f.len() != k + 1) {
            return Err(invalid("each level n ≥ 1 needs faces d_1 … d_n"));
        }
        Ok(Self { diagram, faces })
    }

    /// `[n] ↦ Δ₀([n], [k])` with faces and degeneracies by precomposition.
    pub fn pointed_simplex(k: usize, truncation: usize) -> Self {
        Self::simplex(k, truncation, true)
    }

    /// `[n] ↦ Δ([n], [k])`, a simplicial set and so also a `Δ₀` diagram.
    pub fn standard_simplex(k: usize, truncation: usize) -> Self {
        Self::simplex(k, truncation, false)
    }

    fn simplex(k: usize, truncation: usize, pointed: bool) -> Self {
        let maps: Vec<Vec<Vec<usize>>> = (0..=truncation).map(|n| monotone_maps(n, k, pointed)).collect();
        let diagram = simplex_like(&maps);
        let faces = (1..=truncation)
            .map(|n| {
                (1..=n)
                    .map(|i| {
                        let table = maps[n]
                            .iter()
                            .map(|m| {
                                let composed: Vec<usize> = (0..n).map(|a| m[if a < i { a } else { a + 1 }]).collect();
                                maps[n - 1].iter().position(|x| *x == composed).expect("closed under precomposition")
                            })
                            .collect();
                        GradedMap::new(diagram.level(n).clone(), diagram.level(n - 1).clone(), vec![table])
                            .expect("valid table")
                    })
                    .collect()
            })
            .collect();
        Self { diagram, faces }
    }

    pub fn face(&self, n: usize, i: usize) -> &GradedMap {
        &self.faces[n - 1][i - 1]
    }

    /// Every pair of composable elementary operators with equal composite
    /// in `Δ₀` acts the same way.
    pub fn check_identities(&self) -> LawReport {
        let top = self.diagram.truncation();
        // Elementary arrows [a] → [b] of Δ₀ with their contravariant action X_b → X_a.
        let mut arrows: Vec<(usize, usize, Vec<usize>, GradedMap)> = Vec::new();
        for n in 1..=top {
            for i in 1..=n {
                let coface: Vec<usize> = (0..n).map(|a| if a < i { a } else { a + 1 }).collect();
                arrows.push((n - 1, n, coface, self.face(n, i).clone()));
            }
        }
        for n in 0..top {
            for j in 0..=n {
                arrows.push((n + 1, n, Surjection::elementary(n, j).0, self.diagram.degeneracy(n, j).clone()));
            }
        }
        let mut groups: BTreeMap<(usize, usize, Vec<usize>), Vec<(String, GradedMap)>> = BTreeMap::new();
        for (a, b, f, xf) in &arrows {
            for (b2, c, g, xg) in &arrows {
                if b != b2 {
                    continue;
                }
                let composite: Vec<usize> = f.iter().map(|&i| g[i]).collect();
                let action = xg.then(xf).expect("composable");
                groups
                    .entry((*a, *c, composite))
                    .or_default()
                    .push((format!("{f:?} then {g:?}"), action));
            }
        }
        let mut r = LawReport::default();
        for ((a, c, _), list) in &groups {
            for (name, m) in &list[1..] {
                r.record(*m == list[0].1, || format!("{name} disagrees with {} on [{a}] → [{c}]", list[0].0));
            }
        }
        r
    }
}

/// The functor `T` on finite graded sets with its unit and multiplication,
/// iterated on a fixed algebra `X`: `levels[n] = T^n X`.
pub struct Resolution {
    pub algebra: Algebra,
    presentations: Vec<Presented>,
    levels: Vec<GradedSet>,
}

impl Resolution {
    pub fn new(x: &Algebra, truncation: usize) -> Result<Self> {
        let theory = x.theory().clone();
        if !theory.is_finite() {
            return Err(Error::Capability(format!("{} has infinite values", theory.name())));
        }
        let mut levels = vec![x.carrier().clone()];
        let mut presentations = Vec::new();
        for n in 0..=truncation {
            let p = free_algebra(&theory, &levels[n])?;
            levels.push(p.algebra.carrier().clone());
            presentations.push(p);
        }
        Ok(Self {
            algebra: x.clone(),
            presentations,
            levels,
        })
    }

    pub fn theory(&self) -> &Arc<dyn Theory> {
        self.algebra.theory()
    }

    /// `T^n X`.
    pub fn level(&self, n: usize) -> &GradedSet {
        &self.levels[n]
    }

    /// `T^{n+1} X` as the free algebra on `T^n X`.
    pub fn free(&self, n: usize) -> &Presented {
        &self.presentations[n]
    }

    /// `T(f): T^{a+1} X → T^{b+1} X` for `f: T^a X → T^b X`.
    fn lift(&self, a: usize, b: usize, f: &GradedMap) -> Result<GradedMap> {
        let target = &self.presentations[b];
        self.presentations[a].induced(&target.algebra, &f.then(&target.unit()?)?)
    }

    fn lift_times(&self, k: usize, a: usize, b: usize, mut f: GradedMap) -> Result<GradedMap> {
        for step in 0..k {
            f = self.lift(a + step, b + step, &f)?;
        }
        Ok(f)
    }

    /// `s_j = T^j η T^{n-j}: T^n X → T^{n+1} X`.
    pub fn degeneracy(&self, n: usize, j: usize) -> Result<GradedMap> {
        let eta = self.presentations[n - j].unit()?;
        self.lift_times(j, n - j, n - j + 1, eta)
    }

    /// `d_i = T^{i-1} μ T^{n-i-1}` for `i < n` and `d_n = T^{n-1} ψ`.
    pub fn face(&self, n: usize, i: usize) -> Result<GradedMap> {
        if i == 0 || i > n {
            return Err(invalid("faces of the resolution are d_1 … d_n"));
        }
        let inner = if i == n {
            self.presentations[0].induced(&self.algebra, &GradedMap::identity(self.algebra.carrier()))?
        } else {
            let k = n - i - 1;
            self.presentations[k + 1].induced(&self.presentations[k].algebra, &GradedMap::identity(&self.levels[k + 1]))?
        };
        let (a, b) = if i == n { (1, 0) } else { (n - i + 1, n - i) };
        self.lift_times(i - 1, a, b, inner)
    }

    /// The degeneracy diagram `[n] ↦ T^n X`.
    pub fn diagram(&self, truncation: usize) -> Result<DegeneracyDiagram> {
        let degeneracies = (0..truncation)
            .map(|n| (0..=n).map(|j| self.degeneracy(n, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        DegeneracyDiagram::new(self.levels[..=truncation].to_vec(), degeneracies)
    }

    /// The same diagram with its faces.
    pub fn delta0(&self, truncation: usize) -> Result<Delta0Diagram> {
        let faces = (1..=truncation)
            .map(|n| (1..=n).map(|i| self.face(n, i)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Delta0Diagram::new(self.diagram(truncation)?, faces)
    }
}

/// The degeneracy diagram `[n] ↦ T^n X` of the standard resolution.
pub fn standard_resolution_levels(x: &Algebra, truncation: usize) -> Result<DegeneracyDiagram> {
    Resolution::new(x, truncation)?.diagram(truncation)
}

/// A map of levelwise algebras `f_n: X_n → Y_n` with degeneracies on the
/// targets.
#[derive(Clone, Debug)]
pub struct LevelwiseMap {
    pub source: Vec<Algebra>,
    pub target: Vec<Algebra>,
    pub maps: Vec<GradedMap>,
    pub target_diagram: DegeneracyDiagram,
}

/// Generators `K_n ⊆ Y_n`, as element lists `generators[n][sort]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<Vec<Vec<usize>>>,
}

/// Verdict of the s-freeness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SFreeVerdict {
    pub homomorphisms: bool,
    pub coproduct: bool,
    pub closed: bool,
    pub free: bool,
    pub witness: Option<String>,
}

impl SFreeVerdict {
    pub fn passed(&self) -> bool {
        self.homomorphisms && self.coproduct && self.closed && self.free
    }
}

/// Checks that each `Y_n ≅ X_n ⊔ T(K_n)` through `f_n` and the inclusion of
/// `K_n`, and that the `K_n` form a free degeneracy subdiagram.
pub fn check_sfree(f: &LevelwiseMap, presentation: Option<&Presentation>) -> Result<SFreeVerdict> {
    let p = presentation.ok_or_else(|| Error::Capability("s-freeness needs the generators K_n as input".into()))?;
    let top = f.target_diagram.truncation();
    if f.source.len() <= top || f.target.len() <= top || f.maps.len() <= top || p.generators.len() <= top {
        return Err(invalid("levelwise data is shorter than the truncation"));
    }
    let mut v = SFreeVerdict {
        homomorphisms: true,
        coproduct: true,
        closed: true,
        free: true,
        witness: None,
    };
    for n in 0..=top {
        if !f.source[n].is_homomorphism(&f.target[n], &f.maps[n]) {
            v.homomorphisms = false;
            v.witness.get_or_insert(format!("f_{n} is not a homomorphism"));
        }
        let y = f.target[n].carrier();
        let k_names = y
            .sorts()
            .sorts()
            .map(|s| p.generators[n][s.0].iter().map(|&i| y.name(s, i).to_string()).collect())
            .collect();
        let k = GradedSet::new(y.sorts().clone(), k_names)?;
        let inc = GradedMap::new(k.clone(), y.clone(), p.generators[n].clone())?;
        let c = coproduct_with_free(&f.source[n], &k)?;
        let free = free_algebra(f.target[n].theory(), &k)?;
        let h = free.induced(&f.target[n], &inc)?;
        let m = c.induced(&f.target[n], &[f.maps[n].clone(), h])?;
        if !m.is_bijective() {
            v.coproduct = false;
            v.witness.get_or_insert(format!("level {n} is not X_{n} ⊔ T(K_{n})"));
        }
    }
    let mask: Vec<Vec<Vec<bool>>> = (0..=top)
        .map(|n| {
            let y = f.target_diagram.level(n);
            y.sorts()
                .sorts()
                .map(|s| (0..y.len(s)).map(|i| p.generators[n][s.0].contains(&i)).collect())
                .collect()
        })
        .collect();
    match f.target_diagram.subdiagram(&mask) {
        Err(e) => {
            v.closed = false;
            v.free = false;
            v.witness.get_or_insert(e.to_string());
        }
        Ok((k, _)) => {
            if let Err(fail) = free_generators(&k)? {
                v.free = false;
                v.witness.get_or_insert(format!("K is not free at level {}: {} {}", fail.level, fail.element, fail.reason));
            }
        }
    }
    Ok(v)
}

/// The standard resolution `Y_n = T^{n+1} X` as an s-free object: the
/// initial algebra maps in, and `K_n = η(T^n X)`.
pub fn resolution_presentation(x: &Algebra, truncation: usize) -> Result<(LevelwiseMap, Presentation)> {
    let r = Resolution::new(x, truncation + 1)?;
    let theory = x.theory().clone();
    let empty = GradedSet::empty(theory.sorts());
    let initial = free_algebra(&theory, &empty)?.algebra;
    let mut source = Vec::new();
    let mut target = Vec::new();
    let mut maps = Vec::new();
    let mut generators = Vec::new();
    for n in 0..=truncation {
        let y = r.free(n).algebra.clone();
        let f = crate::algebra::homomorphisms(&initial, &y)
            .into_iter()
            .next()
            .ok_or_else(|| invalid("no map from the initial algebra"))?;
        let eta = r.free(n).unit()?;
        generators.push(eta.domain().sorts().sorts().map(|s| eta.table(s).to_vec()).collect());
        source.push(initial.clone());
        target.push(y);
        maps.push(f);
    }
    let degeneracies = (0..truncation)
        .map(|n| (0..=n).map(|j| r.degeneracy(n + 1, j + 1)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let target_diagram = DegeneracyDiagram::new((1..=truncation + 1).map(|n| r.level(n).clone()).collect(), degeneracies)?;
    Ok((
        LevelwiseMap {
            source,
            target,
            maps,
            target_diagram,
        },
        Presentation { generators },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;
    use crate::theory::FreeTheory;

    fn pointed_pair() -> Algebra {
        let t: Arc<dyn Theory> = Arc::new(FreeTheory::new(&Signature::single_sorted(&[("c", 0)]), 4, 2));
        Algebra::from_fn(t, GradedSet::from_names(["a", "b"]).unwrap(), |_, _| 0).unwrap()
    }

    #[test]
    fn surjection_counts() {
        assert_eq!(enumerate_surjections(2, 1).len(), 2);
        assert_eq!(enumerate_surjections(3, 1).len(), 3);
        assert_eq!(enumerate_surjections(4, 4), vec![Surjection::identity(4)]);
        assert!(enumerate_surjections(1, 2).is_empty());
    }

    #[test]
    fn simplex_is_free() {
        let d = DegeneracyDiagram::standard_simplex(1, 3);
        assert_eq!(d.levels().iter().map(GradedSet::total_len).collect::<Vec<_>>(), vec![2, 3, 4, 5]);
        let cert = free_generators(&d).unwrap().unwrap();
        assert_eq!(cert.generator_counts(), vec![2, 1, 0, 0]);
        let (_, cmp) = cert.rebuild(&d).unwrap();
        assert!(cmp.iter().all(GradedMap::is_bijective));
    }

    #[test]
    fn glued_degeneracies_are_not_free() {
        let d = DegeneracyDiagram::standard_simplex(1, 3);
        let a = d.level(2).index_of(Sort(0), "001").unwrap();
        let b = d.level(2).index_of(Sort(0), "011").unwrap();
        let g = d.glue(&[(2, Sort(0), a, b)]).unwrap();
        assert!(g.check_functoriality().passed());
        assert!(free_generators(&g).unwrap().is_err());
    }

    #[test]
    fn closure_criterion() {
        let d = DegeneracyDiagram::standard_simplex(1, 3);
        let all: Vec<Vec<Vec<bool>>> = d.levels().iter().map(|l| vec![vec![true; l.total_len()]]).collect();
        assert!(is_closed_subdiagram(&d, &all).closed);
        let one = generated_mask(&d, &[(0, Sort(0), 0)]);
        assert!(is_closed_subdiagram(&d, &one).closed);
        let (sub, _) = d.subdiagram(&one).unwrap();
        assert!(free_generators(&sub).unwrap().is_ok());
        let mut bad = one.clone();
        let e = d.level(1).index_of(Sort(0), "11").unwrap();
        bad[1][0][e] = true;
        let v = is_closed_subdiagram(&d, &bad);
        assert!(!v.closed && v.witness.is_some());
    }

    #[test]
    fn pointed_simplex_identities() {
        let d = Delta0Diagram::pointed_simplex(2, 3);
        assert!(d.check_identities().passed());
        assert!(free_generators(&d.diagram).unwrap().is_ok());
    }

    #[test]
    fn resolution_of_pointed_pair() {
        let r = Resolution::new(&pointed_pair(), 3).unwrap();
        let d = r.delta0(3).unwrap();
        let sizes: Vec<usize> = d.diagram.levels().iter().map(GradedSet::total_len).collect();
        assert_eq!(sizes, vec![2, 3, 4, 5]);
        let report = d.check_identities();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(free_generators(&d.diagram).unwrap().is_ok());
        assert_eq!(standard_resolution_levels(&pointed_pair(), 0).unwrap().levels().len(), 1);
    }

    #[test]
    fn sfree_checks() {
        let (f, p) = resolution_presentation(&pointed_pair(), 2).unwrap();
        assert!(check_sfree(&f, Some(&p)).unwrap().passed());
        assert!(matches!(check_sfree(&f, None), Err(Error::Capability(_))));
    }

    #[test]
    fn diagram_json_round_trip() {
        let d = DegeneracyDiagram::standard_simplex(2, 2);
        assert_eq!(DegeneracyDiagram::from_json(&d.to_json()).unwrap(), d);
    }
}
