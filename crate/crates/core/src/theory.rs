//! Theories as abstract clones: values per arity, projections and
//! substitution. Free theories are windows of terms; finite theories are
//! tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, truncation, Error, Result};
use crate::graded::{enumerate_arity_morphisms, tuple_rank, tuples, Arity, ArityMorphism, GradedMap, GradedSet, Sort, SortSet};
use crate::series::{LawReport, Series};
use crate::signature::Signature;
use crate::trees::{enumerate_by_vertices, Tree};

/// A term: variables are positions of an arity, applications are labelled by
/// an operation (for free theories) or a generator index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn substitute(&self, args: &[Term]) -> Term {
        match self {
            Term::Var(k) => args[*k].clone(),
            Term::App(op, cs) => Term::App(*op, cs.iter().map(|c| c.substitute(args)).collect()),
        }
    }

    pub fn vertices(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, cs) => 1 + cs.iter().map(Term::vertices).sum::<usize>(),
        }
    }

    /// The underlying tree and the leaf-to-variable map.
    pub fn to_tree(&self, w: &Arity) -> (Tree, Vec<usize>) {
        fn go(t: &Term, w: &Arity, vars: &mut Vec<usize>) -> Tree {
            match t {
                Term::Var(k) => {
                    vars.push(*k);
                    Tree::Leaf(w.0[*k])
                }
                Term::App(op, cs) => Tree::Node {
                    op: *op,
                    children: cs.iter().map(|c| go(c, w, vars)).collect(),
                },
            }
        }
        let mut vars = Vec::new();
        let t = go(self, w, &mut vars);
        (t, vars)
    }

    pub fn from_tree(t: &Tree, vars: &[usize]) -> Term {
        fn go(t: &Tree, vars: &[usize], next: &mut usize) -> Term {
            match t {
                Tree::Leaf(_) => {
                    *next += 1;
                    Term::Var(vars[*next - 1])
                }
                Tree::Node { op, children } => Term::App(*op, children.iter().map(|c| go(c, vars, next)).collect()),
            }
        }
        go(t, vars, &mut 0)
    }

    pub fn display(&self, name: &dyn Fn(usize) -> String) -> String {
        match self {
            Term::Var(k) => format!("x{}", k + 1),
            Term::App(op, cs) if cs.is_empty() => name(*op),
            Term::App(op, cs) => {
                let args: Vec<String> = cs.iter().map(|c| c.display(name)).collect();
                format!("{}({})", name(*op), args.join(","))
            }
        }
    }
}

/// A distinguished element from which every element is built by substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub output: Sort,
    pub inputs: Arity,
    pub element: usize,
}

/// An abstract clone. Elements of `T(out, w)` are indices.
pub trait Theory: Send + Sync {
    fn sorts(&self) -> &SortSet;
    fn name(&self) -> String;
    /// Largest arity used by searches and law checks.
    fn arity_bound(&self) -> usize;
    fn size(&self, out: Sort, w: &Arity) -> Result<usize>;
    fn element_name(&self, out: Sort, w: &Arity, t: usize) -> String;
    /// `π_k ∈ T(w_k, w)`.
    fn projection(&self, w: &Arity, k: usize) -> Result<usize>;
    /// `t[args]` for `t ∈ T(out, w)` and `args[k] ∈ T(w_k, v)`.
    fn substitute(&self, out: Sort, w: &Arity, t: usize, v: &Arity, args: &[usize]) -> Result<usize>;
    fn generators(&self) -> Vec<Generator>;
    /// `t` as a term over the generators.
    fn decompose(&self, out: Sort, w: &Arity, t: usize) -> Result<Term>;
    /// True when the theory has no relations beyond its generators.
    fn is_free(&self) -> bool {
        false
    }
    /// True when every value is finite and fully stored.
    fn is_finite(&self) -> bool;
}

impl fmt::Debug for dyn Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory({})", self.name())
    }
}

/// Element names of `T(out, w)`.
pub fn value_names(t: &dyn Theory, out: Sort, w: &Arity) -> Result<Vec<String>> {
    Ok((0..t.size(out, w)?).map(|e| t.element_name(out, w, e)).collect())
}

/// `T(u)(t)` for an arity morphism: substitute projections.
pub fn reindex(t: &dyn Theory, out: Sort, u: &ArityMorphism, e: usize) -> Result<usize> {
    let args = u
        .map
        .iter()
        .map(|&m| t.projection(&u.codomain, m))
        .collect::<Result<Vec<_>>>()?;
    t.substitute(out, &u.domain, e, &u.codomain, &args)
}

/// Evaluates a term over the generators of `source` inside the clone `target`,
/// given the images of the generators.
pub fn interpret(
    source_gens: &[Generator],
    target: &dyn Theory,
    images: &[usize],
    term: &Term,
    out: Sort,
    w: &Arity,
) -> Result<usize> {
    match term {
        Term::Var(k) => target.projection(w, *k),
        Term::App(g, cs) => {
            let gen = &source_gens[*g];
            let args = cs
                .iter()
                .zip(&gen.inputs.0)
                .map(|(c, &s)| interpret(source_gens, target, images, c, s, w))
                .collect::<Result<Vec<_>>>()?;
            let _ = out;
            target.substitute(gen.output, &gen.inputs, images[*g], w, &args)
        }
    }
}

/// A theory viewed as a series.
pub struct TheorySeries<'a> {
    theory: &'a dyn Theory,
}

impl<'a> TheorySeries<'a> {
    pub fn new(theory: &'a dyn Theory) -> Self {
        Self { theory }
    }
}

impl Series for TheorySeries<'_> {
    fn domain(&self) -> &SortSet {
        self.theory.sorts()
    }

    fn codomain(&self) -> &SortSet {
        self.theory.sorts()
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        self.theory.size(out, w)
    }

    fn label(&self, out: Sort, w: &Arity, a: usize) -> String {
        self.theory.element_name(out, w, a)
    }

    fn act(&self, out: Sort, u: &ArityMorphism, a: usize) -> Result<usize> {
        reindex(self.theory, out, u, a)
    }
}

/// Checks the clone laws on all arities up to `bound`: the projection law
/// `π_k[args] = args_k`, the unit law `t[π] = t`, and associativity of
/// substitution. Substitutions leaving a term window are skipped.
pub fn check_clone_laws(t: &dyn Theory, bound: usize) -> Result<LawReport> {
    let mut report = LawReport::default();
    let arities = t.sorts().arities_up_to(bound);
    let values = |s: Sort, w: &Arity| t.size(s, w);
    for w in &arities {
        let projs = (0..w.len()).map(|k| t.projection(w, k)).collect::<Result<Vec<_>>>()?;
        for out in t.sorts().sorts() {
            for e in 0..values(out, w)? {
                let back = t.substitute(out, w, e, w, &projs)?;
                report.record(back == e, || format!("unit law fails for {} at {:?}", t.element_name(out, w, e), w));
            }
        }
        for v in &arities {
            let radices = w.0.iter().map(|&s| values(s, v)).collect::<Result<Vec<_>>>()?;
            for args in tuples(&radices) {
                for k in 0..w.len() {
                    let r = t.substitute(w.0[k], w, projs[k], v, &args)?;
                    report.record(r == args[k], || format!("projection law fails at {:?} position {k}", w));
                }
                for u in &arities {
                    let radices_u = v.0.iter().map(|&s| values(s, u)).collect::<Result<Vec<_>>>()?;
                    for inner in tuples(&radices_u) {
                        let composed = args
                            .iter()
                            .zip(&w.0)
                            .map(|(&a, &s)| t.substitute(s, v, a, u, &inner))
                            .collect::<Result<Vec<_>>>();
                        let Ok(composed) = composed else { continue };
                        for out in t.sorts().sorts() {
                            for e in 0..values(out, w)? {
                                let (Ok(lhs), Ok(mid)) = (
                                    t.substitute(out, w, e, u, &composed),
                                    t.substitute(out, w, e, v, &args),
                                ) else {
                                    continue;
                                };
                                let Ok(rhs) = t.substitute(out, v, mid, u, &inner) else { continue };
                                report.record(lhs == rhs, || format!("associativity fails for {}", t.element_name(out, w, e)));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

struct Window {
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
}

/// The free theory on a signature, restricted to terms with at most
/// `max_vertices` vertices. Substitutions leaving the window raise a
/// truncation error.
pub struct FreeTheory {
    sig: Signature,
    arity_bound: usize,
    max_vertices: usize,
    shapes: Vec<Vec<Tree>>,
    windows: Mutex<HashMap<(Sort, Arity), Arc<Window>>>,
}

impl FreeTheory {
    pub fn new(sig: &Signature, arity_bound: usize, max_vertices: usize) -> Self {
        let shapes = sig
            .sorts()
            .sorts()
            .map(|s| enumerate_by_vertices(sig, s, max_vertices))
            .collect();
        Self {
            sig: sig.clone(),
            arity_bound,
            max_vertices,
            shapes,
            windows: Mutex::new(HashMap::new()),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn max_vertices(&self) -> usize {
        self.max_vertices
    }

    fn window(&self, out: Sort, w: &Arity) -> Arc<Window> {
        if let Some(win) = self.windows.lock().expect("window cache").get(&(out, w.clone())) {
            return win.clone();
        }
        // Terms are trees together with a map from leaves to variables.
        let mut terms = Vec::new();
        for t in &self.shapes[out.0] {
            for u in enumerate_arity_morphisms(&t.leaves(), w) {
                terms.push(Term::from_tree(t, &u.map));
            }
        }
        terms.sort();
        let index = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let win = Arc::new(Window { terms, index });
        self.windows
            .lock()
            .expect("window cache")
            .insert((out, w.clone()), win.clone());
        win
    }

    pub fn term(&self, out: Sort, w: &Arity, t: usize) -> Term {
        self.window(out, w).terms[t].clone()
    }

    pub fn index_of(&self, out: Sort, w: &Arity, term: &Term) -> Result<usize> {
        self.window(out, w)
            .index
            .get(term)
            .copied()
            .ok_or_else(|| truncation("free theory term", term.vertices(), self.max_vertices))
    }

    /// Enumeration of the values of a free theory as `S(Q A)`: a tree plus a
    /// leaf-to-variable map, following the series formula.
    pub fn value_via_trees(&self, out: Sort, w: &Arity) -> Vec<(Tree, Vec<usize>)> {
        let mut out_list = Vec::new();
        for t in &self.shapes[out.0] {
            for u in enumerate_arity_morphisms(&t.leaves(), w) {
                out_list.push((t.clone(), u.map));
            }
        }
        out_list
    }
}

impl Theory for FreeTheory {
    fn sorts(&self) -> &SortSet {
        self.sig.sorts()
    }

    fn name(&self) -> String {
        let ops: Vec<&str> = self.sig.ops().iter().map(|o| o.name.as_str()).collect();
        format!("free theory on {{{}}}", ops.join(","))
    }

    fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        Ok(self.window(out, w).terms.len())
    }

    fn element_name(&self, out: Sort, w: &Arity, t: usize) -> String {
        self.term(out, w, t).display(&|op| self.sig.op(op).name.clone())
    }

    fn projection(&self, w: &Arity, k: usize) -> Result<usize> {
        if k >= w.len() {
            return Err(invalid("projection index out of range"));
        }
        self.index_of(w.0[k], w, &Term::Var(k))
    }

    fn substitute(&self, out: Sort, w: &Arity, t: usize, v: &Arity, args: &[usize]) -> Result<usize> {
        if args.len() != w.len() {
            return Err(invalid("substitution needs one argument per input"));
        }
        let terms: Vec<Term> = args.iter().enumerate().map(|(k, &a)| self.term(w.0[k], v, a)).collect();
        self.index_of(out, v, &self.term(out, w, t).substitute(&terms))
    }

    fn generators(&self) -> Vec<Generator> {
        self.sig
            .ops()
            .iter()
            .enumerate()
            .map(|(i, op)| {
                let vars = (0..op.profile.inputs.len()).map(Term::Var).collect();
                Generator {
                    name: op.name.clone(),
                    output: op.profile.output,
                    inputs: op.profile.inputs.clone(),
                    element: self
                        .index_of(op.profile.output, &op.profile.inputs, &Term::App(i, vars))
                        .unwrap_or(usize::MAX),
                }
            })
            .collect()
    }

    fn decompose(&self, out: Sort, w: &Arity, t: usize) -> Result<Term> {
        Ok(self.term(out, w, t))
    }

    fn is_free(&self) -> bool {
        true
    }

    fn is_finite(&self) -> bool {
        self.sig.is_nullary() && self.max_vertices >= 1
    }
}

type SubstKey = (Sort, Arity, usize, Arity, Vec<usize>);

/// A theory stored as explicit clone tables for all arities up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTheory {
    name: String,
    sorts: SortSet,
    bound: usize,
    values: BTreeMap<(Sort, Arity), Vec<String>>,
    projections: BTreeMap<(Arity, usize), usize>,
    subst: HashMap<SubstKey, usize>,
    gens: Vec<Generator>,
    gen_index: HashMap<(Sort, Arity, usize), usize>,
}

impl FiniteTheory {
    fn index_generators(mut self) -> Self {
        let mut gens = Vec::new();
        for ((out, w), els) in &self.values {
            for (e, name) in els.iter().enumerate() {
                let is_proj = (0..w.len()).any(|k| w.0[k] == *out && self.projections.get(&(w.clone(), k)) == Some(&e));
                if !is_proj {
                    gens.push(Generator {
                        name: name.clone(),
                        output: *out,
                        inputs: w.clone(),
                        element: e,
                    });
                }
            }
        }
        self.gen_index = gens
            .iter()
            .enumerate()
            .map(|(i, g)| ((g.output, g.inputs.clone(), g.element), i))
            .collect();
        self.gens = gens;
        self
    }

    /// Tabulates every value, projection and substitution up to `bound`.
    pub fn tabulate(t: &dyn Theory, bound: usize) -> Result<Self> {
        let arities = t.sorts().arities_up_to(bound);
        let mut values = BTreeMap::new();
        let mut projections = BTreeMap::new();
        let mut subst = HashMap::new();
        for w in &arities {
            for out in t.sorts().sorts() {
                values.insert((out, w.clone()), value_names(t, out, w)?);
            }
            for k in 0..w.len() {
                projections.insert((w.clone(), k), t.projection(w, k)?);
            }
        }
        for w in &arities {
            for v in &arities {
                let radices: Vec<usize> = w.0.iter().map(|&s| values[&(s, v.clone())].len()).collect();
                for args in tuples(&radices) {
                    for out in t.sorts().sorts() {
                        for e in 0..values[&(out, w.clone())].len() {
                            let r = t.substitute(out, w, e, v, &args)?;
                            subst.insert((out, w.clone(), e, v.clone(), args.clone()), r);
                        }
                    }
                }
            }
        }
        Ok(Self {
            name: t.name(),
            sorts: t.sorts().clone(),
            bound,
            values,
            projections,
            subst,
            gens: Vec::new(),
            gen_index: HashMap::new(),
        }
        .index_generators())
    }

    /// The single-sorted theory with `T(0) = ∅` and `T(n) = *` for `n > 0`.
    pub fn improper(bound: usize) -> Self {
        Self::tabulate(&Constant::new("improper theory", false), bound).expect("constant theory tabulates")
    }

    /// The terminal single-sorted theory: `T(n) = *` for all `n`.
    pub fn terminal(bound: usize) -> Self {
        Self::tabulate(&Constant::new("terminal theory", true), bound).expect("constant theory tabulates")
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    fn check_bound(&self, n: usize) -> Result<()> {
        if n > self.bound {
            Err(truncation("finite theory arity", n, self.bound))
        } else {
            Ok(())
        }
    }

    pub fn to_doc(&self) -> FiniteTheoryDoc {
        let word = |w: &Arity| w.0.iter().map(|&s| self.sorts.name(s).to_string()).collect::<Vec<_>>();
        let mut substitution: Vec<SubstDoc> = self
            .subst
            .iter()
            .map(|((out, w, e, v, args), r)| SubstDoc {
                output: self.sorts.name(*out).to_string(),
                inputs: word(w),
                element: *e,
                at: word(v),
                args: args.clone(),
                result: *r,
            })
            .collect();
        substitution.sort_by(|a, b| {
            (&a.output, a.inputs.len(), &a.inputs, a.element, a.at.len(), &a.at, &a.args).cmp(&(
                &b.output,
                b.inputs.len(),
                &b.inputs,
                b.element,
                b.at.len(),
                &b.at,
                &b.args,
            ))
        });
        FiniteTheoryDoc {
            name: self.name.clone(),
            sorts: self.sorts.names().to_vec(),
            bound: self.bound,
            values: self
                .values
                .iter()
                .map(|((o, w), els)| crate::series::ValueDoc {
                    output: self.sorts.name(*o).to_string(),
                    inputs: word(w),
                    elements: els.clone(),
                })
                .collect(),
            projections: self
                .projections
                .iter()
                .map(|((w, k), e)| ProjectionDoc {
                    inputs: word(w),
                    position: *k,
                    element: *e,
                })
                .collect(),
            substitution,
        }
    }

    pub fn from_doc(doc: &FiniteTheoryDoc) -> Result<Self> {
        let sorts = SortSet::new(doc.sorts.iter().cloned())?;
        let ar = |names: &[String]| -> Result<Arity> { Ok(Arity(names.iter().map(|n| sorts.sort(n)).collect::<Result<_>>()?)) };
        let mut values = BTreeMap::new();
        for v in &doc.values {
            values.insert((sorts.sort(&v.output)?, ar(&v.inputs)?), v.elements.clone());
        }
        let mut projections = BTreeMap::new();
        for p in &doc.projections {
            projections.insert((ar(&p.inputs)?, p.position), p.element);
        }
        let mut subst = HashMap::new();
        for s in &doc.substitution {
            subst.insert((sorts.sort(&s.output)?, ar(&s.inputs)?, s.element, ar(&s.at)?, s.args.clone()), s.result);
        }
        let t = Self {
            name: doc.name.clone(),
            sorts,
            bound: doc.bound,
            values,
            projections,
            subst,
            gens: Vec::new(),
            gen_index: HashMap::new(),
        }
        .index_generators();
        // Every table entry must be present.
        for w in t.sorts.arities_up_to(t.bound) {
            for out in t.sorts.sorts() {
                if !t.values.contains_key(&(out, w.clone())) {
                    return Err(Error::Parse(format!("missing value table at {}", w.display(&t.sorts))));
                }
            }
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("theory serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FiniteTheoryDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

impl Theory for FiniteTheory {
    fn sorts(&self) -> &SortSet {
        &self.sorts
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn arity_bound(&self) -> usize {
        self.bound
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        self.check_bound(w.len())?;
        Ok(self.values[&(out, w.clone())].len())
    }

    fn element_name(&self, out: Sort, w: &Arity, t: usize) -> String {
        self.values[&(out, w.clone())][t].clone()
    }

    fn projection(&self, w: &Arity, k: usize) -> Result<usize> {
        self.check_bound(w.len())?;
        self.projections
            .get(&(w.clone(), k))
            .copied()
            .ok_or_else(|| invalid("projection index out of range"))
    }

    fn substitute(&self, out: Sort, w: &Arity, t: usize, v: &Arity, args: &[usize]) -> Result<usize> {
        self.check_bound(w.len().max(v.len()))?;
        self.subst
            .get(&(out, w.clone(), t, v.clone(), args.to_vec()))
            .copied()
            .ok_or_else(|| invalid("substitution arguments out of range"))
    }

    /// Every element that is not a projection, up to the bound.
    fn generators(&self) -> Vec<Generator> {
        self.gens.clone()
    }

    fn decompose(&self, out: Sort, w: &Arity, t: usize) -> Result<Term> {
        for k in 0..w.len() {
            if w.0[k] == out && self.projection(w, k)? == t {
                return Ok(Term::Var(k));
            }
        }
        let g = *self
            .gen_index
            .get(&(out, w.clone(), t))
            .ok_or_else(|| invalid("element outside the stored tables"))?;
        Ok(Term::App(g, (0..w.len()).map(Term::Var).collect()))
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Single-sorted theory whose values are all singletons, except possibly
/// `T(0)`. Only used to build tables.
struct Constant {
    name: &'static str,
    sorts: SortSet,
    nullary: bool,
}

impl Constant {
    fn new(name: &'static str, nullary: bool) -> Self {
        Self {
            name,
            sorts: SortSet::single(),
            nullary,
        }
    }
}

impl Theory for Constant {
    fn sorts(&self) -> &SortSet {
        &self.sorts
    }

    fn name(&self) -> String {
        self.name.to_string()
    }

    fn arity_bound(&self) -> usize {
        usize::MAX
    }

    fn size(&self, _: Sort, w: &Arity) -> Result<usize> {
        Ok(usize::from(self.nullary || !w.is_empty()))
    }

    fn element_name(&self, _: Sort, _: &Arity, _: usize) -> String {
        "*".to_string()
    }

    fn projection(&self, _: &Arity, _: usize) -> Result<usize> {
        Ok(0)
    }

    fn substitute(&self, _: Sort, _: &Arity, _: usize, _: &Arity, _: &[usize]) -> Result<usize> {
        Ok(0)
    }

    fn generators(&self) -> Vec<Generator> {
        Vec::new()
    }

    fn decompose(&self, _: Sort, _: &Arity, _: usize) -> Result<Term> {
        Err(Error::Capability("constant theories are only tabulated".into()))
    }

    fn is_finite(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTheoryDoc {
    pub name: String,
    pub sorts: Vec<String>,
    pub bound: usize,
    pub values: Vec<crate::series::ValueDoc>,
    pub projections: Vec<ProjectionDoc>,
    pub substitution: Vec<SubstDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionDoc {
    pub inputs: Vec<String>,
    pub position: usize,
    pub element: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstDoc {
    pub output: String,
    pub inputs: Vec<String>,
    pub element: usize,
    pub at: Vec<String>,
    pub args: Vec<usize>,
    pub result: usize,
}

/// `End(X)(j, w) = hom(X^w, X_j)`, elements indexed by their value tables.
pub struct EndomorphismTheory {
    x: GradedSet,
    bound: usize,
}

impl EndomorphismTheory {
    pub fn new(x: &GradedSet, bound: usize) -> Self {
        Self { x: x.clone(), bound }
    }

    pub fn carrier(&self) -> &GradedSet {
        &self.x
    }

    /// The value table of element `t`, indexed by tuple rank in `X^w`.
    pub fn table(&self, out: Sort, w: &Arity, mut t: usize) -> Vec<usize> {
        let n = self.x.product_size(w);
        let base = self.x.len(out);
        let mut table = vec![0; n];
        for r in (0..n).rev() {
            table[r] = t % base;
            t /= base;
        }
        table
    }

    pub fn element(&self, out: Sort, table: &[usize]) -> usize {
        tuple_rank(table, &vec![self.x.len(out); table.len()])
    }

    /// Applies element `t` to a tuple.
    pub fn apply(&self, out: Sort, w: &Arity, t: usize, x: &[usize]) -> usize {
        let r = tuple_rank(x, &self.x.product_radices(w));
        self.table(out, w, t)[r]
    }

    fn check_bound(&self, n: usize) -> Result<()> {
        if n > self.bound {
            Err(truncation("endomorphism theory arity", n, self.bound))
        } else {
            Ok(())
        }
    }
}

impl Theory for EndomorphismTheory {
    fn sorts(&self) -> &SortSet {
        self.x.sorts()
    }

    fn name(&self) -> String {
        format!("End({})", self.x)
    }

    fn arity_bound(&self) -> usize {
        self.bound
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        self.check_bound(w.len())?;
        let n = self.x.product_size(w) as u32;
        self.x
            .len(out)
            .checked_pow(n)
            .ok_or_else(|| truncation("endomorphism theory value size", usize::MAX, usize::MAX))
    }

    fn element_name(&self, out: Sort, w: &Arity, t: usize) -> String {
        let names: Vec<&str> = self.table(out, w, t).iter().map(|&i| self.x.name(out, i)).collect();
        format!("[{}]", names.join(","))
    }

    fn projection(&self, w: &Arity, k: usize) -> Result<usize> {
        self.check_bound(w.len())?;
        let table: Vec<usize> = self.x.product(w).iter().map(|t| t[k]).collect();
        Ok(self.element(w.0[k], &table))
    }

    fn substitute(&self, out: Sort, w: &Arity, t: usize, v: &Arity, args: &[usize]) -> Result<usize> {
        self.check_bound(w.len().max(v.len()))?;
        let outer = self.table(out, w, t);
        let inner: Vec<Vec<usize>> = args.iter().enumerate().map(|(k, &a)| self.table(w.0[k], v, a)).collect();
        let radices = self.x.product_radices(w);
        let table: Vec<usize> = (0..self.x.product_size(v))
            .map(|r| {
                let point: Vec<usize> = inner.iter().map(|f| f[r]).collect();
                outer[tuple_rank(&point, &radices)]
            })
            .collect();
        Ok(self.element(out, &table))
    }

    fn generators(&self) -> Vec<Generator> {
        let mut gens = Vec::new();
        for w in self.sorts().arities_up_to(self.bound) {
            for out in self.sorts().sorts() {
                let projs: Vec<usize> = (0..w.len())
                    .filter(|&k| w.0[k] == out)
                    .filter_map(|k| self.projection(&w, k).ok())
                    .collect();
                for e in 0..self.size(out, &w).unwrap_or(0) {
                    if !projs.contains(&e) {
                        gens.push(Generator {
                            name: self.element_name(out, &w, e),
                            output: out,
                            inputs: w.clone(),
                            element: e,
                        });
                    }
                }
            }
        }
        gens
    }

    fn decompose(&self, out: Sort, w: &Arity, t: usize) -> Result<Term> {
        for k in 0..w.len() {
            if w.0[k] == out && self.projection(w, k)? == t {
                return Ok(Term::Var(k));
            }
        }
        let g = self
            .generators()
            .iter()
            .position(|g| g.output == out && &g.inputs == w && g.element == t)
            .ok_or_else(|| invalid("element outside the bound"))?;
        Ok(Term::App(g, (0..w.len()).map(Term::Var).collect()))
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// The endomorphism theory of a map `g: X → Y`: pairs of operations
/// `(f: X^w → X_j, f': Y^w → Y_j)` with `g ∘ f = f' ∘ g^w`.
pub fn endomorphism_theory_of_map(g: &GradedMap, bound: usize) -> Result<FiniteTheory> {
    let ex = EndomorphismTheory::new(g.domain(), bound);
    let ey = EndomorphismTheory::new(g.codomain(), bound);
    let sorts = g.domain().sorts().clone();
    let arities = sorts.arities_up_to(bound);
    let mut elems: BTreeMap<(Sort, Arity), Vec<(usize, usize)>> = BTreeMap::new();
    for w in &arities {
        let xs = g.domain().product(w);
        for out in sorts.sorts() {
            let mut list = Vec::new();
            for f in 0..ex.size(out, w)? {
                for f2 in 0..ey.size(out, w)? {
                    let ok = xs.iter().all(|x| {
                        let gx: Vec<usize> = x.iter().enumerate().map(|(k, &i)| g.apply(w.0[k], i)).collect();
                        g.apply(out, ex.apply(out, w, f, x)) == ey.apply(out, w, f2, &gx)
                    });
                    if ok {
                        list.push((f, f2));
                    }
                }
            }
            elems.insert((out, w.clone()), list);
        }
    }
    let pair = PairTheory { sorts, bound, ex, ey, elems };
    FiniteTheory::tabulate(&pair, bound).map(|t| t.with_name("End(g)"))
}

struct PairTheory {
    sorts: SortSet,
    bound: usize,
    ex: EndomorphismTheory,
    ey: EndomorphismTheory,
    elems: BTreeMap<(Sort, Arity), Vec<(usize, usize)>>,
}

impl Theory for PairTheory {
    fn sorts(&self) -> &SortSet {
        &self.sorts
    }

    fn name(&self) -> String {
        "End(g)".into()
    }

    fn arity_bound(&self) -> usize {
        self.bound
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        Ok(self.elems[&(out, w.clone())].len())
    }

    fn element_name(&self, out: Sort, w: &Arity, t: usize) -> String {
        let (a, b) = self.elems[&(out, w.clone())][t];
        format!("({},{})", self.ex.element_name(out, w, a), self.ey.element_name(out, w, b))
    }

    fn projection(&self, w: &Arity, k: usize) -> Result<usize> {
        let p = (self.ex.projection(w, k)?, self.ey.projection(w, k)?);
        self.elems[&(w.0[k], w.clone())]
            .iter()
            .position(|&e| e == p)
            .ok_or_else(|| invalid("projection missing"))
    }

    fn substitute(&self, out: Sort, w: &Arity, t: usize, v: &Arity, args: &[usize]) -> Result<usize> {
        let (a, b) = self.elems[&(out, w.clone())][t];
        let (xa, ya): (Vec<usize>, Vec<usize>) = args
            .iter()
            .enumerate()
            .map(|(k, &i)| self.elems[&(w.0[k], v.clone())][i])
            .unzip();
        let p = (self.ex.substitute(out, w, a, v, &xa)?, self.ey.substitute(out, w, b, v, &ya)?);
        self.elems[&(out, v.clone())]
            .iter()
            .position(|&e| e == p)
            .ok_or_else(|| invalid("substitution leaves the fiber product"))
    }

    fn generators(&self) -> Vec<Generator> {
        Vec::new()
    }

    fn decompose(&self, _: Sort, _: &Arity, _: usize) -> Result<Term> {
        Err(Error::Capability("only tabulated".into()))
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// A morphism of theories, determined by the images of the source generators.
#[derive(Clone)]
pub struct TheoryMorphism {
    pub source: Arc<dyn Theory>,
    pub target: Arc<dyn Theory>,
    pub images: Vec<usize>,
}

impl TheoryMorphism {
    pub fn new(source: Arc<dyn Theory>, target: Arc<dyn Theory>, images: Vec<usize>) -> Result<Self> {
        if source.sorts() != target.sorts() {
            return Err(invalid("theory morphism between different sort sets"));
        }
        let gens = source.generators();
        if gens.len() != images.len() {
            return Err(invalid("one image per generator is required"));
        }
        for (g, &i) in gens.iter().zip(&images) {
            if i >= target.size(g.output, &g.inputs)? {
                return Err(invalid(format!("image of `{}` is out of range", g.name)));
            }
        }
        Ok(Self { source, target, images })
    }

    pub fn identity(t: Arc<dyn Theory>) -> Result<Self> {
        let images = t.generators().iter().map(|g| g.element).collect();
        Self::new(t.clone(), t, images)
    }

    /// `φ(t)` for `t ∈ S(out, w)`.
    pub fn apply(&self, out: Sort, w: &Arity, t: usize) -> Result<usize> {
        let term = self.source.decompose(out, w, t)?;
        interpret(&self.source.generators(), self.target.as_ref(), &self.images, &term, out, w)
    }

    /// Projections and substitution are preserved on all arities up to `bound`.
    pub fn check(&self, bound: usize) -> Result<LawReport> {
        let mut report = LawReport::default();
        let s = self.source.as_ref();
        let t = self.target.as_ref();
        let arities = s.sorts().arities_up_to(bound);
        for w in &arities {
            for k in 0..w.len() {
                let img = self.apply(w.0[k], w, s.projection(w, k)?)?;
                report.record(img == t.projection(w, k)?, || format!("projection {k} of {:?} not preserved", w));
            }
            for v in &arities {
                let radices = w.0.iter().map(|&x| s.size(x, v)).collect::<Result<Vec<_>>>()?;
                for args in tuples(&radices) {
                    let mapped = args
                        .iter()
                        .enumerate()
                        .map(|(k, &a)| self.apply(w.0[k], v, a))
                        .collect::<Result<Vec<_>>>()?;
                    for out in s.sorts().sorts() {
                        for e in 0..s.size(out, w)? {
                            let Ok(r) = s.substitute(out, w, e, v, &args) else { continue };
                            let lhs = self.apply(out, v, r)?;
                            let rhs = t.substitute(out, w, self.apply(out, w, e)?, v, &mapped)?;
                            report.record(lhs == rhs, || {
                                format!("substitution into {} not preserved", s.element_name(out, w, e))
                            });
                        }
                    }
                }
            }
        }
        Ok(report)
    }
}

/// One constraint `φ(t[args]) = φ(t)[φ(args)]`, stored by elements.
struct Constraint {
    out: Sort,
    w: Arity,
    t: usize,
    v: Arity,
    args: Vec<usize>,
    result: usize,
    trigger: usize,
}

fn generators_in(term: &Term, acc: &mut Vec<usize>) {
    if let Term::App(g, cs) = term {
        acc.push(*g);
        cs.iter().for_each(|c| generators_in(c, acc));
    }
}

/// All theory morphisms `source → target`, found by backtracking over the
/// generator images. Relations of `source` are checked on every substitution
/// with arities up to `bound` as soon as all generators involved are fixed.
pub fn morphisms(source: &dyn Theory, target: &dyn Theory, bound: usize) -> Result<Vec<Vec<usize>>> {
    if source.sorts() != target.sorts() {
        return Err(invalid("theories over different sort sets"));
    }
    let gens = source.generators();
    let domains = gens
        .iter()
        .map(|g| target.size(g.output, &g.inputs))
        .collect::<Result<Vec<_>>>()?;
    // Constraints must reach every generator, or high-arity images go unchecked.
    let bound = gens.iter().map(|g| g.inputs.len()).fold(bound, usize::max);
    let arities = source.sorts().arities_up_to(bound);
    let mut upfront = Vec::new();
    let mut watch: Vec<Vec<Constraint>> = (0..gens.len()).map(|_| Vec::new()).collect();
    // Projections must go to projections.
    for w in &arities {
        for k in 0..w.len() {
            let term = source.decompose(w.0[k], w, source.projection(w, k)?)?;
            if term != Term::Var(k) {
                upfront.push((w.clone(), k, term));
            }
        }
    }
    if !source.is_free() {
        for w in &arities {
            for v in &arities {
                let radices = w.0.iter().map(|&s| source.size(s, v)).collect::<Result<Vec<_>>>()?;
                for args in tuples(&radices) {
                    for out in source.sorts().sorts() {
                        for e in 0..source.size(out, w)? {
                            let Ok(result) = source.substitute(out, w, e, v, &args) else { continue };
                            let mut involved = Vec::new();
                            generators_in(&source.decompose(out, w, e)?, &mut involved);
                            generators_in(&source.decompose(out, v, result)?, &mut involved);
                            for (k, &a) in args.iter().enumerate() {
                                generators_in(&source.decompose(w.0[k], v, a)?, &mut involved);
                            }
                            let c = Constraint {
                                out,
                                w: w.clone(),
                                t: e,
                                v: v.clone(),
                                args: args.clone(),
                                result,
                                trigger: involved.iter().copied().max().unwrap_or(0),
                            };
                            if involved.is_empty() {
                                if !holds(source, target, &gens, &[], &c)? {
                                    return Ok(Vec::new());
                                }
                            } else {
                                watch[c.trigger].push(c);
                            }
                        }
                    }
                }
            }
        }
    }
    for (w, k, term) in &upfront {
        let img = interpret(&gens, target, &vec![0; gens.len()], term, w.0[*k], w);
        // A non-variable decomposition of a projection can only be consistent
        // when it involves generators; those are checked through `watch`.
        let mut inv = Vec::new();
        generators_in(term, &mut inv);
        if inv.is_empty() && img? != target.projection(w, *k)? {
            return Ok(Vec::new());
        }
    }
    let mut found = Vec::new();
    let mut images = Vec::with_capacity(gens.len());
    search(source, target, &gens, &domains, &watch, &mut images, &mut found)?;
    Ok(found)
}

fn holds(source: &dyn Theory, target: &dyn Theory, gens: &[Generator], images: &[usize], c: &Constraint) -> Result<bool> {
    let img = |out: Sort, w: &Arity, e: usize| -> Result<usize> {
        interpret(gens, target, images, &source.decompose(out, w, e)?, out, w)
    };
    let mapped = c
        .args
        .iter()
        .enumerate()
        .map(|(k, &a)| img(c.w.0[k], &c.v, a))
        .collect::<Result<Vec<_>>>()?;
    let rhs = target.substitute(c.out, &c.w, img(c.out, &c.w, c.t)?, &c.v, &mapped)?;
    Ok(img(c.out, &c.v, c.result)? == rhs)
}

fn search(
    source: &dyn Theory,
    target: &dyn Theory,
    gens: &[Generator],
    domains: &[usize],
    watch: &[Vec<Constraint>],
    images: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let i = images.len();
    if i == gens.len() {
        found.push(images.clone());
        return Ok(());
    }
    for candidate in 0..domains[i] {
        images.push(candidate);
        let mut ok = true;
        for c in &watch[i] {
            if !holds(source, target, gens, images, c)? {
                ok = false;
                break;
            }
        }
        if ok {
            search(source, target, gens, domains, watch, images, found)?;
        }
        images.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: usize) -> Arity {
        Arity::uniform(Sort(0), k)
    }

    #[test]
    fn pointed_sets_values() {
        let t = FreeTheory::new(&Signature::single_sorted(&[("c", 0)]), 3, 4);
        for k in 0..4 {
            assert_eq!(t.size(Sort(0), &n(k)).unwrap(), k + 1);
        }
        assert!(t.is_finite());
        assert_eq!(t.element_name(Sort(0), &n(2), 2), "c");
        assert!(check_clone_laws(&t, 2).unwrap().passed());
    }

    #[test]
    fn morphisms_constrain_every_generator() {
        let free = FreeTheory::new(&Signature::single_sorted(&[("c", 0)]), 3, 2);
        let t = FiniteTheory::tabulate(&free, 3).unwrap();
        // Only the identity, even when asked for a smaller bound.
        assert_eq!(morphisms(&t, &t, 2).unwrap().len(), 1);
    }

    #[test]
    fn projection_law_for_free_terms() {
        let t = FreeTheory::new(&Signature::single_sorted(&[("m", 2)]), 3, 3);
        let w = n(3);
        let args: Vec<usize> = (0..3).map(|k| t.projection(&n(2), k % 2).unwrap()).collect();
        let p = t.projection(&w, 1).unwrap();
        assert_eq!(t.substitute(Sort(0), &w, p, &n(2), &args).unwrap(), args[1]);
    }

    #[test]
    fn improper_theory_tables() {
        let t = FiniteTheory::improper(3);
        assert_eq!(t.size(Sort(0), &n(0)).unwrap(), 0);
        for k in 1..=3 {
            assert_eq!(t.size(Sort(0), &n(k)).unwrap(), 1);
        }
        assert_eq!(t.projection(&n(2), 0).unwrap(), t.projection(&n(2), 1).unwrap());
        assert!(check_clone_laws(&t, 3).unwrap().passed());
        assert!(matches!(t.size(Sort(0), &n(4)), Err(Error::Truncation { .. })));
        let text = t.to_json();
        assert_eq!(FiniteTheory::from_json(&text).unwrap(), t);
    }

    #[test]
    fn endomorphism_sizes() {
        let x = GradedSet::from_names(["a", "b"]).unwrap();
        let e = EndomorphismTheory::new(&x, 2);
        assert_eq!(e.size(Sort(0), &n(1)).unwrap(), 4);
        assert_eq!(e.size(Sort(0), &n(2)).unwrap(), 16);
        assert!(check_clone_laws(&e, 2).unwrap().passed());
        let one = EndomorphismTheory::new(&GradedSet::from_names(["a"]).unwrap(), 2);
        assert!((0..3).all(|k| one.size(Sort(0), &n(k)).unwrap() == 1));
    }

    #[test]
    fn classification_counts() {
        let x = GradedSet::from_names(["a", "b"]).unwrap();
        let end = EndomorphismTheory::new(&x, 2);
        let pointed = FreeTheory::new(&Signature::single_sorted(&[("c", 0)]), 2, 2);
        assert_eq!(morphisms(&pointed, &end, 2).unwrap().len(), 2);
        let improper = FiniteTheory::improper(2);
        assert_eq!(morphisms(&improper, &end, 2).unwrap().len(), 0);
        let one = EndomorphismTheory::new(&GradedSet::from_names(["a"]).unwrap(), 2);
        assert_eq!(morphisms(&improper, &one, 2).unwrap().len(), 1);
        let empty = EndomorphismTheory::new(&GradedSet::from_names(Vec::<String>::new()).unwrap(), 2);
        assert_eq!(morphisms(&improper, &empty, 2).unwrap().len(), 1);
    }

    #[test]
    fn map_endomorphisms_and_morphism_checks() {
        let x = GradedSet::from_names(["a"]).unwrap();
        let y = GradedSet::from_names(["p", "q"]).unwrap();
        let g = GradedMap::new(x, y, vec![vec![0]]).unwrap();
        let t = endomorphism_theory_of_map(&g, 2).unwrap();
        // Unary pairs: f on X is forced, f' must fix p.
        assert_eq!(t.size(Sort(0), &n(1)).unwrap(), 2);
        assert!(check_clone_laws(&t, 2).unwrap().passed());
        let src: Arc<dyn Theory> = Arc::new(FreeTheory::new(&Signature::single_sorted(&[("c", 0)]), 2, 2));
        let id = TheoryMorphism::identity(src).unwrap();
        assert!(id.check(2).unwrap().passed());
    }
}
