//! Finitary functors between graded-set categories ("series"), evaluated as
//! left Kan extensions, together with the composition product and the `*`
//! product of generator objects.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, truncation, Error, Result};
use crate::graded::{
    enumerate_arity_morphisms, tuple_rank, tuples, Arity, ArityMorphism, GradedMap, GradedSet, Profile, Sort,
    SortSet, UnionFind,
};
use crate::signature::{OpId, Operation, Signature};

/// A functor from finite `I`-graded sets (arities) to `J`-graded sets,
/// described by its values on arities and its action on arity morphisms.
pub trait Series {
    /// The sorts `I` of the arities.
    fn domain(&self) -> &SortSet;
    /// The sorts `J` of the values.
    fn codomain(&self) -> &SortSet;
    /// `|A(out, w)|`.
    fn size(&self, out: Sort, w: &Arity) -> Result<usize>;
    /// Display label of element `a` of `A(out, w)`.
    fn label(&self, out: Sort, w: &Arity, a: usize) -> String;
    /// `A(u)(a)` for an arity morphism `u: w → w'`.
    fn act(&self, out: Sort, u: &ArityMorphism, a: usize) -> Result<usize>;

    /// The Kan extension `A(X)`, by default through the reflexive coequalizer
    /// over all arities of length at most `|X|`.
    fn evaluate(&self, x: &GradedSet) -> Result<Evaluation> {
        evaluate_by_coequalizer(self, x)
    }

    /// Class in `ev` of the pair `(a, x)` with `a ∈ A(out, w)` and `x ∈ X^w`.
    fn class_in(&self, ev: &Evaluation, out: Sort, w: &Arity, a: usize, x: &[usize]) -> Result<usize> {
        let key = (out, w.clone(), a, x.to_vec());
        if let Some(&c) = ev.lookup.get(&key) {
            return Ok(c);
        }
        // Factor x through its image, then look the injective form up.
        let (e, image) = image_factorization(w, x);
        let a2 = self.act(out, &e, a)?;
        ev.lookup
            .get(&(out, e.codomain.clone(), a2, image))
            .copied()
            .ok_or_else(|| invalid("element is not covered by this evaluation"))
    }
}

/// Splits `x: w → X` as `w ↠ im ↪ X`, the image listed in order of first
/// occurrence. Returns the surjection and the injective tuple.
pub fn image_factorization(w: &Arity, x: &[usize]) -> (ArityMorphism, Vec<usize>) {
    let mut seen: Vec<(Sort, usize)> = Vec::new();
    let mut map = Vec::with_capacity(x.len());
    for (k, &xi) in x.iter().enumerate() {
        let key = (w.0[k], xi);
        let pos = match seen.iter().position(|&p| p == key) {
            Some(p) => p,
            None => {
                seen.push(key);
                seen.len() - 1
            }
        };
        map.push(pos);
    }
    let im = Arity(seen.iter().map(|&(s, _)| s).collect());
    let tuple = seen.iter().map(|&(_, i)| i).collect();
    (
        ArityMorphism {
            domain: w.clone(),
            codomain: im,
            map,
        },
        tuple,
    )
}

/// Representative `(a, x)` of an element of `A(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rep {
    pub arity: Arity,
    pub element: usize,
    pub tuple: Vec<usize>,
}

/// The value `A(X)` with a representative for every element.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub set: GradedSet,
    reps: Vec<Vec<Rep>>,
    lookup: HashMap<(Sort, Arity, usize, Vec<usize>), usize>,
}

impl Evaluation {
    pub fn rep(&self, out: Sort, class: usize) -> &Rep {
        &self.reps[out.0][class]
    }
}

fn unique_names(raw: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(raw.len());
    for r in raw {
        let mut name = r.clone();
        let mut k = 1;
        while out.contains(&name) {
            name = format!("{r}#{k}");
            k += 1;
        }
        out.push(name);
    }
    out
}

fn element_label<S: Series + ?Sized>(a: &S, x: &GradedSet, out: Sort, w: &Arity, e: usize, t: &[usize]) -> String {
    let args: Vec<&str> = t.iter().enumerate().map(|(k, &i)| x.name(w.0[k], i)).collect();
    format!("{}[{}]", a.label(out, w, e), args.join(","))
}

/// `A(X)` as the quotient of `⊔_w A(w) × X^w` (over `|w| ≤ |X|`) by the
/// relations `(a, x∘u) ~ (A(u)a, x)` for all arity morphisms `u`.
pub fn evaluate_by_coequalizer<S: Series + ?Sized>(a: &S, x: &GradedSet) -> Result<Evaluation> {
    if a.domain() != x.sorts() {
        return Err(invalid("evaluation at a graded set over the wrong sorts"));
    }
    let n = x.total_len();
    let arities = a.domain().arities_up_to(n);
    let mut sets = Vec::new();
    let mut reps_all = Vec::new();
    let mut lookup = HashMap::new();
    for out in a.codomain().sorts() {
        // Enumerate the disjoint union, remembering block offsets.
        let mut offsets: HashMap<&Arity, usize> = HashMap::new();
        let mut elems: Vec<Rep> = Vec::new();
        for w in &arities {
            offsets.insert(w, elems.len());
            let size = a.size(out, w)?;
            let xs = x.product(w);
            for e in 0..size {
                for t in &xs {
                    elems.push(Rep {
                        arity: w.clone(),
                        element: e,
                        tuple: t.clone(),
                    });
                }
            }
        }
        let index = |w: &Arity, e: usize, t: &[usize]| -> usize {
            offsets[w] + e * x.product_size(w) + tuple_rank(t, &x.product_radices(w))
        };
        let mut uf = UnionFind::new(elems.len());
        for p in &arities {
            let size = a.size(out, p)?;
            if size == 0 {
                continue;
            }
            for q in &arities {
                // Every arity morphism is a surjection followed by an
                // injection, so these generate the same relation.
                let morphisms: Vec<ArityMorphism> = enumerate_arity_morphisms(p, q)
                    .into_iter()
                    .filter(|u| is_injective(u) || is_surjective(u))
                    .collect();
                if morphisms.is_empty() {
                    continue;
                }
                let xs = x.product(q);
                for u in &morphisms {
                    for e in 0..size {
                        let moved = a.act(out, u, e)?;
                        for t in &xs {
                            let pulled: Vec<usize> = u.map.iter().map(|&m| t[m]).collect();
                            uf.union(index(p, e, &pulled), index(q, moved, t));
                        }
                    }
                }
            }
        }
        let (class, reps) = uf.classes();
        for (i, r) in elems.iter().enumerate() {
            lookup.insert((out, r.arity.clone(), r.element, r.tuple.clone()), class[i]);
        }
        let reps: Vec<Rep> = reps.iter().map(|&r| elems[r].clone()).collect();
        sets.push(unique_names(
            reps.iter()
                .map(|r| element_label(a, x, out, &r.arity, r.element, &r.tuple))
                .collect(),
        ));
        reps_all.push(reps);
    }
    Ok(Evaluation {
        set: GradedSet::new(a.codomain().clone(), sets)?,
        reps: reps_all,
        lookup,
    })
}

fn is_injective(u: &ArityMorphism) -> bool {
    let mut seen = vec![false; u.codomain.len()];
    u.map.iter().all(|&m| !std::mem::replace(&mut seen[m], true))
}

fn is_surjective(u: &ArityMorphism) -> bool {
    let mut seen = vec![false; u.codomain.len()];
    for &m in &u.map {
        seen[m] = true;
    }
    seen.into_iter().all(|b| b)
}

/// The identity series: `I(i, w)` is the set of positions of `w` of sort `i`.
#[derive(Clone, Debug)]
pub struct UnitSeries {
    sorts: SortSet,
}

impl UnitSeries {
    pub fn new(sorts: &SortSet) -> Self {
        Self { sorts: sorts.clone() }
    }

    fn positions(w: &Arity, s: Sort) -> Vec<usize> {
        (0..w.len()).filter(|&k| w.0[k] == s).collect()
    }
}

impl Series for UnitSeries {
    fn domain(&self) -> &SortSet {
        &self.sorts
    }

    fn codomain(&self) -> &SortSet {
        &self.sorts
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        Ok(w.count(out))
    }

    fn label(&self, out: Sort, w: &Arity, a: usize) -> String {
        format!("x{}", Self::positions(w, out)[a] + 1)
    }

    fn act(&self, out: Sort, u: &ArityMorphism, a: usize) -> Result<usize> {
        let p = Self::positions(&u.domain, out)[a];
        let target = u.map[p];
        Ok(Self::positions(&u.codomain, out)
            .iter()
            .position(|&q| q == target)
            .expect("arity morphisms preserve sorts"))
    }

    fn evaluate(&self, x: &GradedSet) -> Result<Evaluation> {
        if &self.sorts != x.sorts() {
            return Err(invalid("evaluation at a graded set over the wrong sorts"));
        }
        let mut lookup = HashMap::new();
        let reps = self
            .sorts
            .sorts()
            .map(|s| {
                (0..x.len(s))
                    .map(|i| {
                        lookup.insert((s, Arity(vec![s]), 0, vec![i]), i);
                        Rep {
                            arity: Arity(vec![s]),
                            element: 0,
                            tuple: vec![i],
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Evaluation {
            set: x.clone(),
            reps,
            lookup,
        })
    }

    fn class_in(&self, _ev: &Evaluation, out: Sort, w: &Arity, a: usize, x: &[usize]) -> Result<usize> {
        Ok(x[Self::positions(w, out)[a]])
    }
}

/// The free series `S A` on a generator object: `S A(j, w) = ⊔_{a: j<-v} hom(v, w)`.
#[derive(Clone, Debug)]
pub struct FreeSeries {
    sig: Signature,
}

impl FreeSeries {
    pub fn new(sig: &Signature) -> Self {
        Self { sig: sig.clone() }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn choices(v: &Arity, w: &Arity) -> Vec<Vec<usize>> {
        v.0.iter()
            .map(|&s| (0..w.len()).filter(|&m| w.0[m] == s).collect())
            .collect()
    }

    /// Element `a` of `S A(out, w)` as an operation and a position map.
    pub fn decode(&self, out: Sort, w: &Arity, mut a: usize) -> (OpId, Vec<usize>) {
        for op in self.sig.with_output(out) {
            let v = &self.sig.op(op).profile.inputs;
            let ch = Self::choices(v, w);
            let radices: Vec<usize> = ch.iter().map(Vec::len).collect();
            let count: usize = radices.iter().product();
            if a < count {
                let mut digits = vec![0; radices.len()];
                for k in (0..radices.len()).rev() {
                    digits[k] = a % radices[k];
                    a /= radices[k];
                }
                return (op, digits.iter().enumerate().map(|(k, &d)| ch[k][d]).collect());
            }
            a -= count;
        }
        panic!("element index out of range")
    }

    /// Inverse of [`FreeSeries::decode`].
    pub fn encode(&self, out: Sort, w: &Arity, op: OpId, map: &[usize]) -> usize {
        let mut offset = 0;
        for o in self.sig.with_output(out) {
            let v = &self.sig.op(o).profile.inputs;
            let ch = Self::choices(v, w);
            let radices: Vec<usize> = ch.iter().map(Vec::len).collect();
            if o == op {
                let digits: Vec<usize> = map
                    .iter()
                    .enumerate()
                    .map(|(k, m)| ch[k].iter().position(|c| c == m).expect("sort-compatible map"))
                    .collect();
                return offset + tuple_rank(&digits, &radices);
            }
            offset += radices.iter().product::<usize>();
        }
        panic!("operation does not have this output sort")
    }
}

impl Series for FreeSeries {
    fn domain(&self) -> &SortSet {
        self.sig.sorts()
    }

    fn codomain(&self) -> &SortSet {
        self.sig.sorts()
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        Ok(self
            .sig
            .with_output(out)
            .map(|op| {
                self.sig
                    .op(op)
                    .profile
                    .inputs
                    .0
                    .iter()
                    .map(|&s| w.count(s))
                    .product::<usize>()
            })
            .sum())
    }

    fn label(&self, out: Sort, w: &Arity, a: usize) -> String {
        let (op, map) = self.decode(out, w, a);
        let args: Vec<String> = map.iter().map(|m| format!("x{}", m + 1)).collect();
        format!("{}({})", self.sig.op(op).name, args.join(","))
    }

    fn act(&self, out: Sort, u: &ArityMorphism, a: usize) -> Result<usize> {
        let (op, map) = self.decode(out, &u.domain, a);
        let moved: Vec<usize> = map.iter().map(|&m| u.map[m]).collect();
        Ok(self.encode(out, &u.codomain, op, &moved))
    }

    /// Closed formula `⊔_a X^{inputs(a)}`; no coequalizer needed.
    fn evaluate(&self, x: &GradedSet) -> Result<Evaluation> {
        if self.sig.sorts() != x.sorts() {
            return Err(invalid("evaluation at a graded set over the wrong sorts"));
        }
        let mut sets = Vec::new();
        let mut reps_all = Vec::new();
        let mut lookup = HashMap::new();
        for out in self.sig.sorts().sorts() {
            let mut names = Vec::new();
            let mut reps = Vec::new();
            for op in self.sig.with_output(out) {
                let v = &self.sig.op(op).profile.inputs;
                let id: Vec<usize> = (0..v.len()).collect();
                let a = self.encode(out, v, op, &id);
                for t in x.product(v) {
                    let args: Vec<&str> = t.iter().enumerate().map(|(k, &i)| x.name(v.0[k], i)).collect();
                    names.push(format!("{}({})", self.sig.op(op).name, args.join(",")));
                    lookup.insert((out, v.clone(), a, t.clone()), reps.len());
                    reps.push(Rep {
                        arity: v.clone(),
                        element: a,
                        tuple: t,
                    });
                }
            }
            sets.push(unique_names(names));
            reps_all.push(reps);
        }
        Ok(Evaluation {
            set: GradedSet::new(x.sorts().clone(), sets)?,
            reps: reps_all,
            lookup,
        })
    }

    fn class_in(&self, ev: &Evaluation, out: Sort, w: &Arity, a: usize, x: &[usize]) -> Result<usize> {
        let (op, map) = self.decode(out, w, a);
        let v = &self.sig.op(op).profile.inputs;
        let id: Vec<usize> = (0..v.len()).collect();
        let canon = self.encode(out, v, op, &id);
        let t: Vec<usize> = map.iter().map(|&m| x[m]).collect();
        ev.lookup
            .get(&(out, v.clone(), canon, t))
            .copied()
            .ok_or_else(|| invalid("tuple is outside the evaluated set"))
    }
}

/// A series stored as explicit tables for every profile with at most `bound`
/// inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulatedSeries {
    domain: SortSet,
    codomain: SortSet,
    bound: usize,
    values: BTreeMap<(Sort, Arity), Vec<String>>,
    actions: BTreeMap<(Sort, ArityMorphism), Vec<usize>>,
}

impl TabulatedSeries {
    /// Tabulates any series up to `bound` inputs.
    pub fn from_series<S: Series + ?Sized>(a: &S, bound: usize) -> Result<Self> {
        let arities = a.domain().arities_up_to(bound);
        let mut values = BTreeMap::new();
        let mut actions = BTreeMap::new();
        for out in a.codomain().sorts() {
            for w in &arities {
                let n = a.size(out, w)?;
                values.insert((out, w.clone()), (0..n).map(|e| a.label(out, w, e)).collect());
            }
            for p in &arities {
                let n = a.size(out, p)?;
                for q in &arities {
                    for u in enumerate_arity_morphisms(p, q) {
                        let table = (0..n).map(|e| a.act(out, &u, e)).collect::<Result<Vec<_>>>()?;
                        actions.insert((out, u), table);
                    }
                }
            }
        }
        Ok(Self {
            domain: a.domain().clone(),
            codomain: a.codomain().clone(),
            bound,
            values,
            actions,
        })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn values(&self) -> impl Iterator<Item = (&(Sort, Arity), &Vec<String>)> {
        self.values.iter()
    }

    /// Overwrites one action entry; used to build negative controls.
    pub fn set_action(&mut self, out: Sort, u: &ArityMorphism, a: usize, image: usize) -> Result<()> {
        let table = self
            .actions
            .get_mut(&(out, u.clone()))
            .ok_or_else(|| invalid("no such action entry"))?;
        *table.get_mut(a).ok_or_else(|| invalid("no such element"))? = image;
        Ok(())
    }

    pub fn to_doc(&self) -> TabulatedSeriesDoc {
        let dn = |w: &Arity| w.0.iter().map(|&s| self.domain.name(s).to_string()).collect::<Vec<_>>();
        TabulatedSeriesDoc {
            domain: self.domain.names().to_vec(),
            codomain: self.codomain.names().to_vec(),
            bound: self.bound,
            values: self
                .values
                .iter()
                .map(|((o, w), els)| ValueDoc {
                    output: self.codomain.name(*o).to_string(),
                    inputs: dn(w),
                    elements: els.clone(),
                })
                .collect(),
            actions: self
                .actions
                .iter()
                .map(|((o, u), t)| ActionDoc {
                    output: self.codomain.name(*o).to_string(),
                    from: dn(&u.domain),
                    to: dn(&u.codomain),
                    map: u.map.clone(),
                    table: t.clone(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &TabulatedSeriesDoc) -> Result<Self> {
        let domain = SortSet::new(doc.domain.iter().cloned())?;
        let codomain = SortSet::new(doc.codomain.iter().cloned())?;
        let ar = |names: &[String]| -> Result<Arity> {
            Ok(Arity(names.iter().map(|n| domain.sort(n)).collect::<Result<_>>()?))
        };
        let mut values = BTreeMap::new();
        for v in &doc.values {
            values.insert((codomain.sort(&v.output)?, ar(&v.inputs)?), v.elements.clone());
        }
        let mut actions = BTreeMap::new();
        for a in &doc.actions {
            let u = ArityMorphism::new(ar(&a.from)?, ar(&a.to)?, a.map.clone())?;
            actions.insert((codomain.sort(&a.output)?, u), a.table.clone());
        }
        Ok(Self {
            domain,
            codomain,
            bound: doc.bound,
            values,
            actions,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TabulatedSeriesDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

impl Series for TabulatedSeries {
    fn domain(&self) -> &SortSet {
        &self.domain
    }

    fn codomain(&self) -> &SortSet {
        &self.codomain
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        if w.len() > self.bound {
            return Err(truncation("tabulated series value", w.len(), self.bound));
        }
        self.values
            .get(&(out, w.clone()))
            .map(Vec::len)
            .ok_or_else(|| invalid("missing value table"))
    }

    fn label(&self, out: Sort, w: &Arity, a: usize) -> String {
        self.values[&(out, w.clone())][a].clone()
    }

    fn act(&self, out: Sort, u: &ArityMorphism, a: usize) -> Result<usize> {
        let needed = u.domain.len().max(u.codomain.len());
        if needed > self.bound {
            return Err(truncation("tabulated series action", needed, self.bound));
        }
        self.actions
            .get(&(out, u.clone()))
            .and_then(|t| t.get(a).copied())
            .ok_or_else(|| invalid("missing action entry"))
    }

    fn evaluate(&self, x: &GradedSet) -> Result<Evaluation> {
        if x.total_len() > self.bound {
            return Err(truncation("evaluation of a tabulated series", x.total_len(), self.bound));
        }
        evaluate_by_coequalizer(self, x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabulatedSeriesDoc {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub bound: usize,
    pub values: Vec<ValueDoc>,
    pub actions: Vec<ActionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueDoc {
    pub output: String,
    pub inputs: Vec<String>,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub output: String,
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub map: Vec<usize>,
    pub table: Vec<usize>,
}

/// `B(w)` as a graded set over the codomain of `B`.
pub fn value_set<S: Series + ?Sized>(b: &S, w: &Arity) -> Result<GradedSet> {
    let lists = b
        .codomain()
        .sorts()
        .map(|j| Ok(unique_names((0..b.size(j, w)?).map(|e| b.label(j, w, e)).collect())))
        .collect::<Result<Vec<_>>>()?;
    GradedSet::new(b.codomain().clone(), lists)
}

/// `B(u): B(w) → B(w')` as a graded map.
pub fn value_map<S: Series + ?Sized>(b: &S, u: &ArityMorphism) -> Result<GradedMap> {
    let from = value_set(b, &u.domain)?;
    let to = value_set(b, &u.codomain)?;
    let maps = b
        .codomain()
        .sorts()
        .map(|j| (0..from.len(j)).map(|e| b.act(j, u, e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    GradedMap::new(from, to, maps)
}

/// `A ∘ B` tabulated up to `bound` inputs: `(A∘B)(k, w) = A(B(w))_k`.
pub fn compose<A: Series + ?Sized, B: Series + ?Sized>(a: &A, b: &B, bound: usize) -> Result<TabulatedSeries> {
    if a.domain() != b.codomain() {
        return Err(invalid("composition of series with mismatched sorts"));
    }
    let arities = b.domain().arities_up_to(bound);
    let mut evals: BTreeMap<Arity, (GradedSet, Evaluation)> = BTreeMap::new();
    for w in &arities {
        let y = value_set(b, w)?;
        let ev = a.evaluate(&y)?;
        evals.insert(w.clone(), (y, ev));
    }
    let mut values = BTreeMap::new();
    let mut actions = BTreeMap::new();
    for out in a.codomain().sorts() {
        for w in &arities {
            values.insert((out, w.clone()), evals[w].1.set.names(out).to_vec());
        }
        for p in &arities {
            let (_, ev_p) = &evals[p];
            for q in &arities {
                let (_, ev_q) = &evals[q];
                for u in enumerate_arity_morphisms(p, q) {
                    let bu = value_map(b, &u)?;
                    let mut table = Vec::with_capacity(ev_p.set.len(out));
                    for c in 0..ev_p.set.len(out) {
                        let r = ev_p.rep(out, c);
                        let moved: Vec<usize> = r
                            .tuple
                            .iter()
                            .enumerate()
                            .map(|(k, &y)| bu.apply(r.arity.0[k], y))
                            .collect();
                        table.push(a.class_in(ev_q, out, &r.arity, r.element, &moved)?);
                    }
                    actions.insert((out, u), table);
                }
            }
        }
    }
    Ok(TabulatedSeries {
        domain: b.domain().clone(),
        codomain: a.codomain().clone(),
        bound,
        values,
        actions,
    })
}

/// Outcome of a law check by enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 16 {
            self.failures.push(what());
        }
    }
}

/// Checks `A(id) = id` and `A(v∘u) = A(v)∘A(u)` on all arities up to `bound`.
pub fn check_functoriality<S: Series + ?Sized>(a: &S, bound: usize) -> Result<LawReport> {
    let mut report = LawReport::default();
    let arities = a.domain().arities_up_to(bound);
    for out in a.codomain().sorts() {
        for w in &arities {
            let id = ArityMorphism::identity(w);
            for e in 0..a.size(out, w)? {
                let img = a.act(out, &id, e)?;
                report.record(img == e, || format!("identity on {w:?} moves element {e}"));
            }
        }
        for p in &arities {
            let n = a.size(out, p)?;
            for q in &arities {
                let us = enumerate_arity_morphisms(p, q);
                if us.is_empty() {
                    continue;
                }
                for r in &arities {
                    for v in enumerate_arity_morphisms(q, r) {
                        for u in &us {
                            let vu = u.then(&v)?;
                            for e in 0..n {
                                let lhs = a.act(out, &vu, e)?;
                                let rhs = a.act(out, &v, a.act(out, u, e)?)?;
                                report.record(lhs == rhs, || {
                                    format!("composition law fails for {:?} then {:?} at {e}", u.map, v.map)
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The unit generator object: one operation `id` of profile `i <- (i)` per sort.
pub fn delta(sorts: &SortSet) -> Signature {
    let ops = sorts
        .sorts()
        .map(|s| Operation {
            name: if sorts.is_single() {
                "id".to_string()
            } else {
                format!("id_{}", sorts.name(s))
            },
            profile: Profile::new(s, Arity(vec![s])),
        })
        .collect();
    Signature::new(sorts.clone(), ops).expect("delta is a valid signature")
}

/// An element of `(A*B)(i, f)`: an outer operation `a: i <- g`, a weakly
/// monotone `h: |f| → |g|` and one inner operation per position of `g`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StarElement {
    pub outer: OpId,
    pub h: Vec<usize>,
    pub inner: Vec<OpId>,
}

/// All weakly monotone maps `n → m`, lexicographic.
pub fn weakly_monotone_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in lo..m {
            cur.push(v);
            go(n, m, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// The fiber `h^{-1}(k)` as positions in increasing order.
pub fn fiber(h: &[usize], k: usize) -> Vec<usize> {
    (0..h.len()).filter(|&i| h[i] == k).collect()
}

/// `(A*B)(i, f)` enumerated by the defining coproduct formula.
pub fn star_elements(a: &Signature, b: &Signature, p: &Profile) -> Result<Vec<StarElement>> {
    if a.sorts() != b.sorts() {
        return Err(invalid("star product of generator objects over different sorts"));
    }
    let f = &p.inputs;
    let mut out = Vec::new();
    for op in a.with_output(p.output) {
        let g = &a.op(op).profile.inputs;
        for h in weakly_monotone_maps(f.len(), g.len()) {
            let choices: Vec<Vec<OpId>> = (0..g.len())
                .map(|k| {
                    let restricted = Arity(fiber(&h, k).iter().map(|&i| f.0[i]).collect());
                    b.at(&Profile::new(g.0[k], restricted))
                })
                .collect();
            let radices: Vec<usize> = choices.iter().map(Vec::len).collect();
            for t in tuples(&radices) {
                out.push(StarElement {
                    outer: op,
                    h: h.clone(),
                    inner: t.iter().enumerate().map(|(k, &c)| choices[k][c]).collect(),
                });
            }
        }
    }
    Ok(out)
}

/// Profiles on which `A*B` can be non-empty: outputs of `A`, inputs obtained
/// by concatenating inputs of `B`-operations along an `A`-operation.
fn star_support(a: &Signature, b: &Signature) -> Vec<Profile> {
    let mut found = std::collections::BTreeSet::new();
    for op in a.ops() {
        let mut words = vec![Arity::empty()];
        for &s in &op.profile.inputs.0 {
            let mut next = Vec::new();
            for w in &words {
                for bop in b.with_output(s) {
                    next.push(w.concat(&b.op(bop).profile.inputs));
                }
            }
            words = next;
        }
        for w in words {
            found.insert(Profile::new(op.profile.output, w));
        }
    }
    found.into_iter().collect()
}

/// `A*B` as a generator object, with the structured element behind every
/// operation. Operations are ordered by profile, then by the formula order.
pub fn star_product_with_elements(a: &Signature, b: &Signature) -> Result<(Signature, Vec<StarElement>)> {
    let mut ops = Vec::new();
    let mut elements = Vec::new();
    for p in star_support(a, b) {
        for e in star_elements(a, b, &p)? {
            let inner: Vec<&str> = e.inner.iter().map(|&i| b.op(i).name.as_str()).collect();
            let name = if inner.is_empty() {
                a.op(e.outer).name.clone()
            } else {
                format!("{}({})", a.op(e.outer).name, inner.join(","))
            };
            ops.push(Operation {
                name,
                profile: p.clone(),
            });
            elements.push(e);
        }
    }
    Ok((Signature::new(a.sorts().clone(), ops)?, elements))
}

pub fn star_product(a: &Signature, b: &Signature) -> Result<Signature> {
    star_product_with_elements(a, b).map(|(s, _)| s)
}

/// A generator object given only by weight-graded counts: `count(p)[v]` is
/// the number of elements of profile `p` and weight `v`.
pub trait GradedCounts {
    fn sorts(&self) -> &SortSet;
    /// Profiles with at least one element.
    fn support(&self) -> Vec<Profile>;
    fn count(&self, p: &Profile) -> Vec<u64>;
}

fn add_into(acc: &mut Vec<u64>, v: &[u64]) {
    if acc.len() < v.len() {
        acc.resize(v.len(), 0);
    }
    for (i, x) in v.iter().enumerate() {
        acc[i] += x;
    }
}

fn convolve(a: &[u64], b: &[u64], cap: usize) -> Vec<u64> {
    let mut out = vec![0; (a.len() + b.len()).saturating_sub(1).min(cap + 1)];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= cap && *x != 0 && *y != 0 {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Weight-graded `|(A*B)(p)|` by the star formula; weights add, and weights
/// above `cap` are dropped.
pub fn star_count(a: &dyn GradedCounts, b: &dyn GradedCounts, p: &Profile, cap: usize) -> Vec<u64> {
    let f = &p.inputs;
    let mut total = Vec::new();
    for g in a.support().into_iter().filter(|g| g.output == p.output) {
        let outer = a.count(&g);
        let mut inner_sum: Vec<u64> = Vec::new();
        for h in weakly_monotone_maps(f.len(), g.inputs.len()) {
            let mut acc = vec![1u64];
            for k in 0..g.inputs.len() {
                let restricted = Arity(fiber(&h, k).iter().map(|&i| f.0[i]).collect());
                acc = convolve(&acc, &b.count(&Profile::new(g.inputs.0[k], restricted)), cap);
                if acc.iter().all(|&x| x == 0) {
                    break;
                }
            }
            add_into(&mut inner_sum, &acc);
        }
        add_into(&mut total, &convolve(&outer, &inner_sum, cap));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_sort() -> SortSet {
        SortSet::single()
    }

    fn n_ary(n: usize) -> Arity {
        Arity::uniform(Sort(0), n)
    }

    #[test]
    fn unit_evaluates_to_identity() {
        let x = GradedSet::from_names(["a", "b", "c"]).unwrap();
        let ev = UnitSeries::new(&one_sort()).evaluate(&x).unwrap();
        assert_eq!(ev.set.total_len(), 3);
    }

    #[test]
    fn free_binary_at_three_points() {
        let sig = Signature::single_sorted(&[("m", 2)]);
        let x = GradedSet::from_names(["a", "b", "c"]).unwrap();
        let free = FreeSeries::new(&sig);
        let ev = free.evaluate(&x).unwrap();
        assert_eq!(ev.set.total_len(), 9);
        // The closed formula agrees with the general coequalizer.
        let slow = evaluate_by_coequalizer(&free, &x).unwrap();
        assert_eq!(slow.set.total_len(), 9);
    }

    #[test]
    fn weakly_monotone_counts() {
        // C(n+m-1, n)
        assert_eq!(weakly_monotone_maps(2, 2).len(), 3);
        assert_eq!(weakly_monotone_maps(3, 2).len(), 4);
        assert_eq!(weakly_monotone_maps(0, 3).len(), 1);
        assert_eq!(weakly_monotone_maps(2, 0).len(), 0);
        assert_eq!(weakly_monotone_maps(2, 2)[1], vec![0, 1]);
    }

    #[test]
    fn binary_star_binary() {
        let m = Signature::single_sorted(&[("m", 2)]);
        let s = star_product(&m, &m).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.op(0).profile.inputs.len(), 4);
        assert_eq!(s.op(0).name, "m(m,m)");
        for n in 0..6 {
            let p = Profile::new(Sort(0), n_ary(n));
            assert_eq!(star_elements(&m, &m, &p).unwrap().len(), usize::from(n == 4));
        }
    }

    #[test]
    fn unary_star_nullary_plus_unary() {
        let a = Signature::single_sorted(&[("u", 1)]);
        let b = Signature::single_sorted(&[("c", 0), ("v", 1)]);
        let count = |n| star_elements(&a, &b, &Profile::new(Sort(0), n_ary(n))).unwrap().len();
        assert_eq!((count(0), count(1), count(2), count(3)), (1, 1, 0, 0));
    }

    #[test]
    fn delta_values() {
        let d = delta(&one_sort());
        assert_eq!(d.len(), 1);
        let two = SortSet::new(["v", "e"]).unwrap();
        let d2 = delta(&two);
        assert_eq!(d2.at(&Profile::new(Sort(0), Arity(vec![Sort(0)]))).len(), 1);
        assert_eq!(d2.at(&Profile::new(Sort(0), Arity(vec![Sort(1)]))).len(), 0);
    }

    #[test]
    fn tabulated_round_trip_and_bound() {
        let sig = Signature::single_sorted(&[("m", 2)]);
        let t = TabulatedSeries::from_series(&FreeSeries::new(&sig), 2).unwrap();
        let text = t.to_json();
        let back = TabulatedSeries::from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), text);
        assert!(matches!(t.size(Sort(0), &n_ary(3)), Err(Error::Truncation { .. })));
        let x = GradedSet::from_names(["a", "b", "c"]).unwrap();
        assert!(matches!(t.evaluate(&x), Err(Error::Truncation { .. })));
    }

    #[test]
    fn functoriality_negative_control() {
        let sig = Signature::single_sorted(&[("m", 2)]);
        let mut t = TabulatedSeries::from_series(&FreeSeries::new(&sig), 2).unwrap();
        assert!(check_functoriality(&t, 2).unwrap().passed());
        assert!(check_functoriality(&UnitSeries::new(&one_sort()), 3).unwrap().passed());
        let id = ArityMorphism::identity(&n_ary(2));
        t.set_action(Sort(0), &id, 0, 1).unwrap();
        assert!(!check_functoriality(&t, 2).unwrap().passed());
    }

    #[test]
    fn composition_with_unit() {
        let sig = Signature::single_sorted(&[("m", 2), ("c", 0)]);
        let free = FreeSeries::new(&sig);
        let unit = UnitSeries::new(&one_sort());
        let direct = TabulatedSeries::from_series(&free, 2).unwrap();
        let left = compose(&unit, &free, 2).unwrap();
        let right = compose(&free, &unit, 2).unwrap();
        for ((o, w), els) in direct.values() {
            assert_eq!(left.size(*o, w).unwrap(), els.len());
            assert_eq!(right.size(*o, w).unwrap(), els.len());
        }
        assert!(check_functoriality(&left, 2).unwrap().passed());
        assert!(check_functoriality(&right, 2).unwrap().passed());
    }
}
