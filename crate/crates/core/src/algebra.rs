//! Algebras over theories, free algebras and their quotients, colimits,
//! restriction and induction, relative composition, effective monomorphisms,
//! the two-sided bar construction and undercategory theories.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graded::{coequalizer, tuple_rank, tuples, Arity, GradedMap, GradedSet, GradedSetDoc, Sort, SortSet, UnionFind};
use crate::series::LawReport;
use crate::signature::Signature;
use crate::theory::{FiniteTheory, FreeTheory, Generator, Term, Theory, TheoryMorphism};

/// A carrier with one operation table per generator of the theory. Tables
/// are indexed by tuple rank in `X^inputs`.
#[derive(Clone)]
pub struct Algebra {
    theory: Arc<dyn Theory>,
    gens: Arc<Vec<Generator>>,
    gen_index: Arc<HashMap<(Sort, Arity, usize), usize>>,
    carrier: GradedSet,
    tables: Vec<Vec<usize>>,
}

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algebra")
            .field("theory", &self.theory.name())
            .field("carrier", &self.carrier)
            .field("tables", &self.tables)
            .finish()
    }
}

fn generator_index(gens: &[Generator]) -> HashMap<(Sort, Arity, usize), usize> {
    gens.iter()
        .enumerate()
        .map(|(i, g)| ((g.output, g.inputs.clone(), g.element), i))
        .collect()
}

fn unique(raw: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(raw.len());
    for r in raw {
        let mut name = r.clone();
        while out.contains(&name) {
            name.push('\'');
        }
        out.push(name);
    }
    out
}

impl Algebra {
    pub fn new(theory: Arc<dyn Theory>, carrier: GradedSet, tables: Vec<Vec<usize>>) -> Result<Self> {
        if theory.sorts() != carrier.sorts() {
            return Err(invalid("carrier and theory have different sorts"));
        }
        let gens = theory.generators();
        if tables.len() != gens.len() {
            return Err(invalid("one operation table per generator is required"));
        }
        for (g, t) in gens.iter().zip(&tables) {
            if t.len() != carrier.product_size(&g.inputs) {
                return Err(invalid(format!("table of `{}` has the wrong length", g.name)));
            }
            if t.iter().any(|&v| v >= carrier.len(g.output)) {
                return Err(invalid(format!("table of `{}` leaves the carrier", g.name)));
            }
        }
        let gen_index = Arc::new(generator_index(&gens));
        Ok(Self {
            theory,
            gens: Arc::new(gens),
            gen_index,
            carrier,
            tables,
        })
    }

    /// Builds the tables from a function on generators and argument tuples.
    pub fn from_fn(theory: Arc<dyn Theory>, carrier: GradedSet, f: impl Fn(usize, &[usize]) -> usize) -> Result<Self> {
        let tables = theory
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| carrier.product(&g.inputs).iter().map(|x| f(i, x)).collect())
            .collect();
        Self::new(theory, carrier, tables)
    }

    pub fn theory(&self) -> &Arc<dyn Theory> {
        &self.theory
    }

    pub fn carrier(&self) -> &GradedSet {
        &self.carrier
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn table(&self, g: usize) -> &[usize] {
        &self.tables[g]
    }

    pub fn apply_generator(&self, g: usize, x: &[usize]) -> usize {
        let radices = self.carrier.product_radices(&self.gens[g].inputs);
        self.tables[g][tuple_rank(x, &radices)]
    }

    /// Value of a term over the generators at a tuple of elements.
    pub fn eval_term(&self, term: &Term, x: &[usize]) -> usize {
        match term {
            Term::Var(k) => x[*k],
            Term::App(g, cs) => {
                let args: Vec<usize> = cs.iter().map(|c| self.eval_term(c, x)).collect();
                self.apply_generator(*g, &args)
            }
        }
    }

    /// Value of `t ∈ T(out, w)` at `x ∈ X^w`.
    pub fn eval(&self, out: Sort, w: &Arity, t: usize, x: &[usize]) -> Result<usize> {
        if let Some(&g) = self.gen_index.get(&(out, w.clone(), t)) {
            return Ok(self.apply_generator(g, x));
        }
        Ok(self.eval_term(&self.theory.decompose(out, w, t)?, x))
    }

    /// The structure map on `T(out, w_X)`, with `w_X` the carrier as an arity.
    pub fn psi(&self, out: Sort, t: usize) -> Result<usize> {
        let w = self.carrier.as_arity();
        let id: Vec<usize> = self.carrier.elements().map(|(_, i)| i).collect();
        self.eval(out, &w, t, &id)
    }

    /// Unit law on all arities up to `bound`; homomorphism law of every
    /// generator against substitutions with arities up to `bound`.
    pub fn check_laws(&self, bound: usize) -> Result<LawReport> {
        let mut report = LawReport::default();
        let t = self.theory.as_ref();
        let arities = t.sorts().arities_up_to(bound);
        for w in &arities {
            let xs = self.carrier.product(w);
            for k in 0..w.len() {
                let p = t.projection(w, k)?;
                for x in &xs {
                    let v = self.eval(w.0[k], w, p, x)?;
                    report.record(v == x[k], || format!("projection {k} of {} is not a projection", w.display(t.sorts())));
                }
            }
        }
        if t.is_free() {
            return Ok(report);
        }
        for (gi, g) in self.gens.iter().enumerate() {
            for w in &arities {
                let radices = g.inputs.0.iter().map(|&s| t.size(s, w)).collect::<Result<Vec<_>>>()?;
                let xs = self.carrier.product(w);
                for args in tuples(&radices) {
                    let Ok(r) = t.substitute(g.output, &g.inputs, g.element, w, &args) else { continue };
                    for x in &xs {
                        let inner = args
                            .iter()
                            .enumerate()
                            .map(|(k, &a)| self.eval(g.inputs.0[k], w, a, x))
                            .collect::<Result<Vec<_>>>()?;
                        let lhs = self.eval(g.output, w, r, x)?;
                        report.record(lhs == self.apply_generator(gi, &inner), || {
                            format!("`{}` is not compatible with substitution", g.name)
                        });
                    }
                }
            }
        }
        Ok(report)
    }

    pub fn is_homomorphism(&self, target: &Algebra, f: &GradedMap) -> bool {
        self.gens.iter().enumerate().all(|(gi, g)| {
            self.carrier.product(&g.inputs).iter().all(|x| {
                let fx: Vec<usize> = x.iter().enumerate().map(|(k, &i)| f.apply(g.inputs.0[k], i)).collect();
                f.apply(g.output, self.apply_generator(gi, x)) == target.apply_generator(gi, &fx)
            })
        })
    }

    /// Isomorphism-invariant key: the least relabelled table list over all
    /// sortwise permutations of the carrier.
    pub fn canonical_key(&self) -> Vec<Vec<usize>> {
        let sizes = self.carrier.sizes();
        let perms: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&n| permutations(n)).collect();
        let radices: Vec<usize> = perms.iter().map(Vec::len).collect();
        let mut best: Option<Vec<Vec<usize>>> = None;
        for choice in tuples(&radices) {
            let sigma: Vec<&Vec<usize>> = choice.iter().enumerate().map(|(s, &c)| &perms[s][c]).collect();
            let key: Vec<Vec<usize>> = self
                .gens
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    let radices = self.carrier.product_radices(&g.inputs);
                    let mut table = vec![0; self.tables[gi].len()];
                    for x in self.carrier.product(&g.inputs) {
                        let sx: Vec<usize> = x.iter().enumerate().map(|(k, &i)| sigma[g.inputs.0[k].0][i]).collect();
                        table[tuple_rank(&sx, &radices)] = sigma[g.output.0][self.apply_generator(gi, &x)];
                    }
                    table
                })
                .collect();
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        best.unwrap_or_default()
    }

    pub fn to_doc(&self) -> AlgebraDoc {
        AlgebraDoc {
            theory: self.theory.name(),
            carrier: self.carrier.to_doc(),
            operations: self
                .gens
                .iter()
                .enumerate()
                .map(|(gi, g)| OperationTableDoc {
                    name: g.name.clone(),
                    output: self.carrier.sorts().name(g.output).to_string(),
                    inputs: g.inputs.0.iter().map(|&s| self.carrier.sorts().name(s).to_string()).collect(),
                    table: self.tables[gi]
                        .iter()
                        .map(|&v| self.carrier.name(g.output, v).to_string())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(theory: Arc<dyn Theory>, doc: &AlgebraDoc) -> Result<Self> {
        let carrier = GradedSet::from_doc(&doc.carrier)?;
        let gens = theory.generators();
        let mut tables = Vec::with_capacity(gens.len());
        for g in &gens {
            let op = doc
                .operations
                .iter()
                .find(|o| o.name == g.name)
                .ok_or_else(|| Error::Parse(format!("missing table for `{}`", g.name)))?;
            let table = op
                .table
                .iter()
                .map(|n| {
                    carrier
                        .index_of(g.output, n)
                        .ok_or_else(|| Error::Parse(format!("unknown element `{n}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            tables.push(table);
        }
        Self::new(theory, carrier, tables)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("algebra serializes")
    }

    pub fn from_json(theory: Arc<dyn Theory>, text: &str) -> Result<Self> {
        let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(theory, &doc)
    }
}

/// Algebra file schema: carrier plus one table per operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub theory: String,
    pub carrier: GradedSetDoc,
    pub operations: Vec<OperationTableDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationTableDoc {
    pub name: String,
    pub output: String,
    pub inputs: Vec<String>,
    pub table: Vec<String>,
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All graded maps `X → Y`, lexicographic by table.
pub fn all_maps(x: &GradedSet, y: &GradedSet) -> Vec<GradedMap> {
    let radices: Vec<usize> = x.elements().map(|(s, _)| y.len(s)).collect();
    tuples(&radices)
        .map(|t| GradedMap::from_fn(x, y, |s, i| t[x.position(s, i)]).expect("tuple respects sorts"))
        .collect()
}

/// All algebra homomorphisms `X → Y`.
pub fn homomorphisms(x: &Algebra, y: &Algebra) -> Vec<GradedMap> {
    all_maps(x.carrier(), y.carrier())
        .into_iter()
        .filter(|f| x.is_homomorphism(y, f))
        .collect()
}

/// A quotient of the free algebra `T(w_S)` on a basis `S`, remembering a
/// representative element of `T(w_S)` for every class.
#[derive(Clone, Debug)]
pub struct Presented {
    pub algebra: Algebra,
    pub basis: GradedSet,
    class_of: Vec<Vec<usize>>,
    reps: Vec<Vec<usize>>,
}

impl Presented {
    /// Class of an element of `T(out, w_S)`.
    pub fn class(&self, out: Sort, e: usize) -> usize {
        self.class_of[out.0][e]
    }

    pub fn rep(&self, out: Sort, c: usize) -> usize {
        self.reps[out.0][c]
    }

    /// The map `S → carrier` sending a basis element to its class.
    pub fn unit(&self) -> Result<GradedMap> {
        let w = self.basis.as_arity();
        let t = self.algebra.theory();
        let maps = self
            .basis
            .sorts()
            .sorts()
            .map(|s| {
                (0..self.basis.len(s))
                    .map(|i| Ok(self.class(s, t.projection(&w, self.basis.position(s, i))?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GradedMap::new(self.basis.clone(), self.algebra.carrier().clone(), maps)
    }

    /// The homomorphism to `target` determined by the images of the basis,
    /// computed on representatives. The caller guarantees it respects the
    /// relations; [`Algebra::is_homomorphism`] can confirm.
    pub fn induced(&self, target: &Algebra, assign: &GradedMap) -> Result<GradedMap> {
        let w = self.basis.as_arity();
        let x: Vec<usize> = self.basis.elements().map(|(s, i)| assign.apply(s, i)).collect();
        let maps = self
            .basis
            .sorts()
            .sorts()
            .map(|s| {
                self.reps[s.0]
                    .iter()
                    .map(|&e| target.eval(s, &w, e, &x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GradedMap::new(self.algebra.carrier().clone(), target.carrier().clone(), maps)
    }
}

fn require_finite(t: &dyn Theory) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Capability(format!(
            "{} has infinite values; use the symbolic free algebra instead",
            t.name()
        )))
    }
}

/// Names of the elements of `T(out, w_S)`, with variables replaced by basis
/// names where possible.
fn element_label(t: &dyn Theory, basis: &GradedSet, out: Sort, w: &Arity, e: usize) -> String {
    let gens = t.generators();
    match t.decompose(out, w, e) {
        Ok(term) => {
            let var = |k: usize| {
                let (s, i) = basis.at_position(k);
                basis.name(s, i).to_string()
            };
            render(&term, &|g| gens[g].name.clone(), &var)
        }
        Err(_) => t.element_name(out, w, e),
    }
}

fn render(term: &Term, name: &dyn Fn(usize) -> String, var: &dyn Fn(usize) -> String) -> String {
    match term {
        Term::Var(k) => var(*k),
        Term::App(g, cs) if cs.is_empty() => name(*g),
        Term::App(g, cs) => {
            let args: Vec<String> = cs.iter().map(|c| render(c, name, var)).collect();
            format!("{}({})", name(*g), args.join(","))
        }
    }
}

/// The quotient of `T(w_S)` by the congruence generated by `relations`
/// (pairs of elements `(sort, index)` of `T(w_S)`).
pub fn quotient(theory: &Arc<dyn Theory>, basis: &GradedSet, relations: &[((Sort, usize), (Sort, usize))]) -> Result<Presented> {
    require_finite(theory.as_ref())?;
    let t = theory.as_ref();
    let w = basis.as_arity();
    let sorts = t.sorts().clone();
    let sizes = sorts.sorts().map(|s| t.size(s, &w)).collect::<Result<Vec<_>>>()?;
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect();
    let mut uf = UnionFind::new(sizes.iter().sum());
    for &((s1, a), (s2, b)) in relations {
        if s1 != s2 {
            return Err(invalid("relation between elements of different sorts"));
        }
        uf.union(offsets[s1.0] + a, offsets[s2.0] + b);
    }
    // Close under the generators until nothing changes.
    let gens = t.generators();
    let mut images: Vec<Vec<(Vec<usize>, usize)>> = Vec::with_capacity(gens.len());
    for g in &gens {
        let radices: Vec<usize> = g.inputs.0.iter().map(|s| sizes[s.0]).collect();
        let rows = tuples(&radices)
            .map(|args| {
                let r = t.substitute(g.output, &g.inputs, g.element, &w, &args)?;
                Ok((args, r))
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(rows);
    }
    loop {
        let mut changed = false;
        for (g, rows) in gens.iter().zip(&images) {
            let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
            for (args, r) in rows {
                let key: Vec<usize> = args
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| uf.find(offsets[g.inputs.0[k].0] + a))
                    .collect();
                let here = offsets[g.output.0] + r;
                match seen.get(&key) {
                    Some(&there) => changed |= uf.union(there, here),
                    None => {
                        seen.insert(key, here);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut class_of = Vec::new();
    let mut reps = Vec::new();
    let mut names = Vec::new();
    for s in sorts.sorts() {
        let mut root_class: HashMap<usize, usize> = HashMap::new();
        let mut cls = Vec::with_capacity(sizes[s.0]);
        let mut rs = Vec::new();
        for e in 0..sizes[s.0] {
            let root = uf.find(offsets[s.0] + e);
            let c = *root_class.entry(root).or_insert_with(|| {
                rs.push(e);
                rs.len() - 1
            });
            cls.push(c);
        }
        names.push(unique(rs.iter().map(|&e| element_label(t, basis, s, &w, e)).collect()));
        class_of.push(cls);
        reps.push(rs);
    }
    let carrier = GradedSet::new(sorts, names)?;
    let algebra = Algebra::from_fn(theory.clone(), carrier, |gi, x| {
        let g = &gens[gi];
        let args: Vec<usize> = x.iter().enumerate().map(|(k, &c)| reps[g.inputs.0[k].0][c]).collect();
        let r = t
            .substitute(g.output, &g.inputs, g.element, &w, &args)
            .expect("substitution inside a finite theory");
        class_of[g.output.0][r]
    })?;
    Ok(Presented {
        algebra,
        basis: basis.clone(),
        class_of,
        reps,
    })
}

/// The free algebra `T(K)`, carried by `T(w_K)`.
pub fn free_algebra(theory: &Arc<dyn Theory>, k: &GradedSet) -> Result<Presented> {
    quotient(theory, k, &[])
}

/// A colimit of algebras presented as a quotient of the free algebra on the
/// disjoint union of the carriers.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub presented: Presented,
    pub injections: Vec<GradedMap>,
    offsets: Vec<Vec<usize>>,
}

impl Colimit {
    pub fn algebra(&self) -> &Algebra {
        &self.presented.algebra
    }

    /// The map out of the coproduct determined by one homomorphism per summand.
    pub fn induced(&self, target: &Algebra, maps: &[GradedMap]) -> Result<GradedMap> {
        if maps.len() != self.offsets.len() {
            return Err(invalid("one map per summand is required"));
        }
        let basis = &self.presented.basis;
        let assign = GradedMap::from_fn(basis, target.carrier(), |s, i| {
            let part = (0..self.offsets.len())
                .rev()
                .find(|&p| self.offsets[p][s.0] <= i)
                .expect("offsets start at zero");
            maps[part].apply(s, i - self.offsets[part][s.0])
        })?;
        self.presented.induced(target, &assign)
    }
}

/// Colimit of `algebras` with extra identifications `(summand, sort, element)`.
pub fn colimit(algebras: &[&Algebra], extra: &[((usize, Sort, usize), (usize, usize))]) -> Result<Colimit> {
    let first = algebras.first().ok_or_else(|| invalid("colimit of no algebras"))?;
    let theory = first.theory().clone();
    let sorts = theory.sorts().clone();
    let mut basis = GradedSet::empty(&sorts);
    let mut offsets = Vec::new();
    for a in algebras {
        if !Arc::ptr_eq(a.theory(), &theory) && a.theory().name() != theory.name() {
            return Err(invalid("colimit of algebras over different theories"));
        }
        offsets.push(basis.sizes());
        basis = basis.coproduct(a.carrier())?;
    }
    let w = basis.as_arity();
    let t = theory.as_ref();
    let pos = |part: usize, s: Sort, i: usize| basis.position(s, offsets[part][s.0] + i);
    let mut relations = Vec::new();
    for (part, a) in algebras.iter().enumerate() {
        for (gi, g) in a.generators().iter().enumerate() {
            for x in a.carrier().product(&g.inputs) {
                let args = x
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| t.projection(&w, pos(part, g.inputs.0[k], i)))
                    .collect::<Result<Vec<_>>>()?;
                let lhs = t.substitute(g.output, &g.inputs, g.element, &w, &args)?;
                let rhs = t.projection(&w, pos(part, g.output, a.apply_generator(gi, &x)))?;
                relations.push(((g.output, lhs), (g.output, rhs)));
            }
        }
    }
    for &((p1, s, i1), (p2, i2)) in extra {
        relations.push(((s, t.projection(&w, pos(p1, s, i1))?), (s, t.projection(&w, pos(p2, s, i2))?)));
    }
    let presented = quotient(&theory, &basis, &relations)?;
    let injections = algebras
        .iter()
        .enumerate()
        .map(|(part, a)| {
            GradedMap::from_fn(a.carrier(), presented.algebra.carrier(), |s, i| {
                presented.class(s, t.projection(&w, pos(part, s, i)).expect("position in range"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Colimit {
        presented,
        injections,
        offsets,
    })
}

pub fn coproduct(algebras: &[&Algebra]) -> Result<Colimit> {
    colimit(algebras, &[])
}

/// `X ⊔_U V` for homomorphisms `f: U → X` and `g: U → V`.
pub fn pushout(x: &Algebra, v: &Algebra, u: &Algebra, f: &GradedMap, g: &GradedMap) -> Result<Colimit> {
    let extra: Vec<_> = u
        .carrier()
        .elements()
        .map(|(s, i)| ((0, s, f.apply(s, i)), (1, g.apply(s, i))))
        .collect();
    colimit(&[x, v], &extra)
}

/// `X ⊔ T(K)`.
pub fn coproduct_with_free(x: &Algebra, k: &GradedSet) -> Result<Colimit> {
    let free = free_algebra(x.theory(), k)?;
    coproduct(&[x, &free.algebra])
}

/// Every algebra structure on a fixed carrier, found by searching the
/// structure map `T(w_X) → X` subject to the unit law and compatibility with
/// substitution into every generator.
pub fn structures_on(theory: &Arc<dyn Theory>, carrier: &GradedSet) -> Result<Vec<Algebra>> {
    require_finite(theory.as_ref())?;
    let t = theory.as_ref();
    let w = carrier.as_arity();
    let sorts: Vec<Sort> = t.sorts().sorts().collect();
    let sizes = sorts.iter().map(|&s| t.size(s, &w)).collect::<Result<Vec<_>>>()?;
    let mut psi: Vec<Vec<Option<usize>>> = sizes.iter().map(|&n| vec![None; n]).collect();
    for p in 0..w.len() {
        let (s, i) = carrier.at_position(p);
        let e = t.projection(&w, p)?;
        match psi[s.0][e] {
            Some(j) if j != i => return Ok(Vec::new()),
            _ => psi[s.0][e] = Some(i),
        }
    }
    let unknowns: Vec<(Sort, usize)> = sorts
        .iter()
        .flat_map(|&s| (0..sizes[s.0]).map(move |e| (s, e)))
        .filter(|&(s, e)| psi[s.0][e].is_none())
        .collect();
    let gens = t.generators();
    let mut constraints = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        let radices: Vec<usize> = g.inputs.0.iter().map(|s| sizes[s.0]).collect();
        for args in tuples(&radices) {
            let lhs = t.substitute(g.output, &g.inputs, g.element, &w, &args)?;
            constraints.push((gi, args, lhs));
        }
    }
    let proj = (0..w.len()).map(|p| t.projection(&w, p)).collect::<Result<Vec<_>>>()?;
    // Ok(Some(false)) = violated, Ok(None) = not yet decidable.
    let check = |psi: &[Vec<Option<usize>>], (gi, args, lhs): &(usize, Vec<usize>, usize)| -> Result<Option<bool>> {
        let g = &gens[*gi];
        let mut vals = Vec::with_capacity(args.len());
        for (k, &a) in args.iter().enumerate() {
            match psi[g.inputs.0[k].0][a] {
                Some(v) => vals.push(v),
                None => return Ok(None),
            }
        }
        let Some(l) = psi[g.output.0][*lhs] else { return Ok(None) };
        let moved: Vec<usize> = vals
            .iter()
            .enumerate()
            .map(|(k, &v)| proj[carrier.position(g.inputs.0[k], v)])
            .collect();
        let rhs = t.substitute(g.output, &g.inputs, g.element, &w, &moved)?;
        Ok(psi[g.output.0][rhs].map(|r| r == l))
    };
    for c in &constraints {
        if check(&psi, c)? == Some(false) {
            return Ok(Vec::new());
        }
    }
    let mut found = Vec::new();
    fn dfs(
        i: usize,
        unknowns: &[(Sort, usize)],
        carrier: &GradedSet,
        psi: &mut Vec<Vec<Option<usize>>>,
        constraints: &[(usize, Vec<usize>, usize)],
        check: &dyn Fn(&[Vec<Option<usize>>], &(usize, Vec<usize>, usize)) -> Result<Option<bool>>,
        found: &mut Vec<Vec<Vec<usize>>>,
    ) -> Result<()> {
        if i == unknowns.len() {
            for c in constraints {
                if check(psi, c)? != Some(true) {
                    return Ok(());
                }
            }
            found.push(psi.iter().map(|v| v.iter().map(|x| x.expect("assigned")).collect()).collect());
            return Ok(());
        }
        let (s, e) = unknowns[i];
        for value in 0..carrier.len(s) {
            psi[s.0][e] = Some(value);
            let mut ok = true;
            for c in constraints {
                if check(psi, c)? == Some(false) {
                    ok = false;
                    break;
                }
            }
            if ok {
                dfs(i + 1, unknowns, carrier, psi, constraints, check, found)?;
            }
        }
        psi[s.0][e] = None;
        Ok(())
    }
    let mut table = Vec::new();
    dfs(0, &unknowns, carrier, &mut psi, &constraints, &check, &mut table)?;
    for psi in table {
        let alg = Algebra::from_fn(theory.clone(), carrier.clone(), |gi, x| {
            let g = &gens[gi];
            let args: Vec<usize> = x
                .iter()
                .enumerate()
                .map(|(k, &i)| proj[carrier.position(g.inputs.0[k], i)])
                .collect();
            let e = t
                .substitute(g.output, &g.inputs, g.element, &w, &args)
                .expect("substitution inside a finite theory");
            psi[g.output.0][e]
        })?;
        found.push(alg);
    }
    Ok(found)
}

/// Size vectors with total at most `max`.
fn size_vectors(sorts: usize, max: usize) -> Vec<Vec<usize>> {
    tuples(&vec![max + 1; sorts])
        .filter(|v| v.iter().sum::<usize>() <= max)
        .collect()
}

/// Algebras with at most `max_carrier` elements in total, up to isomorphism,
/// together with the number of structures found before reduction.
pub fn enumerate_algebras(theory: &Arc<dyn Theory>, max_carrier: usize) -> Result<(Vec<Algebra>, usize)> {
    let mut kept = Vec::new();
    let mut keys = BTreeSet::new();
    let mut raw = 0;
    for sizes in size_vectors(theory.sorts().len(), max_carrier) {
        let carrier = GradedSet::with_sizes(theory.sorts(), &sizes);
        for a in structures_on(theory, &carrier)? {
            raw += 1;
            if keys.insert((sizes.clone(), a.canonical_key())) {
                kept.push(a);
            }
        }
    }
    Ok((kept, raw))
}

/// `φ^* Y`: the same carrier with operations pulled back along `φ`.
pub fn restrict(phi: &TheoryMorphism, y: &Algebra) -> Result<Algebra> {
    let gens = phi.source.generators();
    let tables = gens
        .iter()
        .zip(&phi.images)
        .map(|(g, &img)| {
            y.carrier()
                .product(&g.inputs)
                .iter()
                .map(|x| y.eval(g.output, &g.inputs, img, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Algebra::new(phi.source.clone(), y.carrier().clone(), tables)
}

/// `φ_* X`: the quotient of `T(X)` by `φ(g)(x) ~ g_X(x)` for every generator
/// `g` of the source.
pub fn induct(phi: &TheoryMorphism, x: &Algebra) -> Result<Presented> {
    let t = phi.target.as_ref();
    let w = x.carrier().as_arity();
    let mut relations = Vec::new();
    for (gi, g) in x.generators().iter().enumerate() {
        for args in x.carrier().product(&g.inputs) {
            let projs = args
                .iter()
                .enumerate()
                .map(|(k, &i)| t.projection(&w, x.carrier().position(g.inputs.0[k], i)))
                .collect::<Result<Vec<_>>>()?;
            let lhs = t.substitute(g.output, &g.inputs, phi.images[gi], &w, &projs)?;
            let rhs = t.projection(&w, x.carrier().position(g.output, x.apply_generator(gi, &args)))?;
            relations.push(((g.output, lhs), (g.output, rhs)));
        }
    }
    quotient(&phi.target, x.carrier(), &relations)
}

/// A theory `T` regarded as a `(T, S)`-bimodule through `φ: S → T`; the left
/// action is substitution in `T`, the right action substitution of `φ`-images.
#[derive(Clone)]
pub struct Bimodule {
    pub morphism: TheoryMorphism,
}

impl Bimodule {
    pub fn new(morphism: TheoryMorphism) -> Self {
        Self { morphism }
    }

    /// `S` as an `(S, S)`-bimodule.
    pub fn regular(s: Arc<dyn Theory>) -> Result<Self> {
        Ok(Self::new(TheoryMorphism::identity(s)?))
    }

    pub fn left(&self) -> &Arc<dyn Theory> {
        &self.morphism.target
    }

    pub fn right(&self) -> &Arc<dyn Theory> {
        &self.morphism.source
    }

    /// Associativity, unit and commutation of the two actions up to `bound`:
    /// both reduce to the clone laws of `T` and `φ` being a morphism.
    pub fn check_actions(&self, bound: usize) -> Result<LawReport> {
        let mut report = crate::theory::check_clone_laws(self.left().as_ref(), bound)?;
        let m = self.morphism.check(bound)?;
        report.checked += m.checked;
        report.failures.extend(m.failures);
        Ok(report)
    }
}

/// `M ∘_S X`: the coequalizer of `M(S X) ⇉ M(X)`. Both maps are determined
/// on the generators `η(s)` of `M(S X)`, so the quotient of `M(X) = T(w_X)`
/// by `φ(s) ~ ψ_X(s)` for all `s ∈ S(w_X)` is taken.
pub fn relative_composition(m: &Bimodule, x: &Algebra) -> Result<Presented> {
    let s = m.right().as_ref();
    let t = m.left().as_ref();
    require_finite(s)?;
    let w = x.carrier().as_arity();
    let mut relations = Vec::new();
    for j in s.sorts().sorts() {
        for e in 0..s.size(j, &w)? {
            let lhs = m.morphism.apply(j, &w, e)?;
            let rhs = t.projection(&w, x.carrier().position(j, x.psi(j, e)?))?;
            relations.push(((j, lhs), (j, rhs)));
        }
    }
    quotient(m.left(), x.carrier(), &relations)
}

/// Verdict of the effective-monomorphism check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoVerdict {
    pub mono: bool,
    pub effective: bool,
    pub equalizer_size: usize,
    pub image_size: usize,
    pub witness: Option<String>,
}

/// Whether `f: X → Y` is injective and whether `X → Y ⇉ Y ⊔_X Y` is an
/// equalizer.
pub fn effective_mono(x: &Algebra, y: &Algebra, f: &GradedMap) -> Result<MonoVerdict> {
    let mono = f.is_injective();
    let p = pushout(y, y, x, f, f)?;
    let mut equalizer = Vec::new();
    for (s, i) in y.carrier().elements() {
        if p.injections[0].apply(s, i) == p.injections[1].apply(s, i) {
            equalizer.push((s, i));
        }
    }
    let image: BTreeSet<(Sort, usize)> = x.carrier().elements().map(|(s, i)| (s, f.apply(s, i))).collect();
    let extra = equalizer.iter().find(|e| !image.contains(e));
    let witness = if !mono {
        let pair = x
            .carrier()
            .elements()
            .flat_map(|a| x.carrier().elements().map(move |b| (a, b)))
            .find(|&((s, i), (t, j))| s == t && i < j && f.apply(s, i) == f.apply(t, j));
        pair.map(|((s, i), (_, j))| {
            format!("{} and {} have the same image", x.carrier().name(s, i), x.carrier().name(s, j))
        })
    } else {
        extra.map(|&(s, i)| format!("{} is equalized but not in the image", y.carrier().name(s, i)))
    };
    Ok(MonoVerdict {
        mono,
        effective: mono && extra.is_none(),
        equalizer_size: equalizer.len(),
        image_size: image.len(),
        witness,
    })
}

/// The two-sided bar construction `B_n = X ⊔ U^{⊔n} ⊔ V` for `f: U → X`
/// and `g: U → V`. Faces: `d_0` absorbs the first `U` into `X` through `f`,
/// `d_n` absorbs the last into `V` through `g`, inner faces fold neighbouring
/// copies. Degeneracy `s_j` inserts a new copy at position `j + 1` through the
/// map from the initial algebra.
pub struct Bar {
    pub x: Algebra,
    pub u: Algebra,
    pub v: Algebra,
    pub f: GradedMap,
    pub g: GradedMap,
    levels: std::sync::Mutex<HashMap<usize, Arc<Colimit>>>,
}

impl Bar {
    pub fn new(x: Algebra, u: Algebra, v: Algebra, f: GradedMap, g: GradedMap) -> Result<Self> {
        if !u.is_homomorphism(&x, &f) || !u.is_homomorphism(&v, &g) {
            return Err(invalid("bar construction needs homomorphisms U → X and U → V"));
        }
        Ok(Self {
            x,
            u,
            v,
            f,
            g,
            levels: std::sync::Mutex::new(HashMap::new()),
        })
    }

    pub fn level(&self, n: usize) -> Result<Arc<Colimit>> {
        if let Some(l) = self.levels.lock().expect("level cache").get(&n) {
            return Ok(l.clone());
        }
        let mut parts: Vec<&Algebra> = vec![&self.x];
        parts.extend(std::iter::repeat_n(&self.u, n));
        parts.push(&self.v);
        let l = Arc::new(coproduct(&parts)?);
        self.levels.lock().expect("level cache").insert(n, l.clone());
        Ok(l)
    }

    /// `d_i: B_n → B_{n-1}`.
    pub fn face(&self, n: usize, i: usize) -> Result<GradedMap> {
        if n == 0 || i > n {
            return Err(invalid("face index out of range"));
        }
        let src = self.level(n)?;
        let dst = self.level(n - 1)?;
        let inj = &dst.injections;
        let mut maps = vec![inj[0].clone()];
        for k in 1..=n {
            let m = if i == 0 && k == 1 {
                self.f.then(&inj[0])?
            } else if i == n && k == n {
                self.g.then(&inj[n])?
            } else if k <= i {
                inj[k].clone()
            } else {
                inj[k - 1].clone()
            };
            maps.push(m);
        }
        maps.push(inj[n].clone());
        src.induced(dst.algebra(), &maps)
    }

    /// `s_j: B_n → B_{n+1}`.
    pub fn degeneracy(&self, n: usize, j: usize) -> Result<GradedMap> {
        if j > n {
            return Err(invalid("degeneracy index out of range"));
        }
        let src = self.level(n)?;
        let dst = self.level(n + 1)?;
        let inj = &dst.injections;
        let mut maps = vec![inj[0].clone()];
        for k in 1..=n {
            maps.push(if k <= j { inj[k].clone() } else { inj[k + 1].clone() });
        }
        maps.push(inj[n + 2].clone());
        src.induced(dst.algebra(), &maps)
    }

    /// All simplicial identities among faces and degeneracies with source
    /// level at most `max_level`, plus the homomorphism property of each map.
    pub fn check_identities(&self, max_level: usize) -> Result<LawReport> {
        let mut r = LawReport::default();
        let same = |a: &GradedMap, b: &GradedMap| a == b;
        for n in 0..=max_level {
            let here = self.level(n)?;
            if n >= 1 {
                for i in 0..=n {
                    let d = self.face(n, i)?;
                    r.record(here.algebra().is_homomorphism(self.level(n - 1)?.algebra(), &d), || {
                        format!("d_{i} on level {n} is not a homomorphism")
                    });
                }
            }
            if n >= 2 {
                for j in 0..=n {
                    for i in 0..j {
                        let lhs = self.face(n, j)?.then(&self.face(n - 1, i)?)?;
                        let rhs = self.face(n, i)?.then(&self.face(n - 1, j - 1)?)?;
                        r.record(same(&lhs, &rhs), || format!("d_{i} d_{j} = d_{} d_{i} fails on level {n}", j - 1));
                    }
                }
            }
            if n < max_level {
                for j in 0..=n {
                    let s = self.degeneracy(n, j)?;
                    r.record(here.algebra().is_homomorphism(self.level(n + 1)?.algebra(), &s), || {
                        format!("s_{j} on level {n} is not a homomorphism")
                    });
                    for i in 0..=n + 1 {
                        let lhs = s.then(&self.face(n + 1, i)?)?;
                        let ok = if i == j || i == j + 1 {
                            lhs.is_identity()
                        } else if i < j {
                            same(&lhs, &self.face(n, i)?.then(&self.degeneracy(n - 1, j - 1)?)?)
                        } else {
                            same(&lhs, &self.face(n, i - 1)?.then(&self.degeneracy(n - 1, j)?)?)
                        };
                        r.record(ok, || format!("d_{i} s_{j} identity fails on level {n}"));
                    }
                    if n + 1 < max_level {
                        for i in 0..=j {
                            let lhs = s.then(&self.degeneracy(n + 1, i)?)?;
                            let rhs = self.degeneracy(n, i)?.then(&self.degeneracy(n + 1, j + 1)?)?;
                            r.record(same(&lhs, &rhs), || format!("s_{i} s_{j} identity fails on level {n}"));
                        }
                    }
                }
            }
        }
        Ok(r)
    }

    /// Compares the set-level coequalizer of `d_0, d_1: B_1 ⇉ B_0` with the
    /// pushout `X ⊔_U V`. Returns the two sizes and whether the comparison
    /// map is a bijection.
    pub fn augmentation(&self) -> Result<(usize, usize, bool)> {
        let (q, proj) = coequalizer(&self.face(1, 0)?, &self.face(1, 1)?);
        let p = pushout(&self.x, &self.v, &self.u, &self.f, &self.g)?;
        let b0 = self.level(0)?;
        let to_p = b0.induced(p.algebra(), &p.injections)?;
        let mut map: Vec<Vec<Option<usize>>> = q.sorts().sorts().map(|s| vec![None; q.len(s)]).collect();
        let mut ok = true;
        for (s, i) in b0.algebra().carrier().elements() {
            let c = proj.apply(s, i);
            let target = to_p.apply(s, i);
            match map[s.0][c] {
                Some(t) if t != target => ok = false,
                _ => map[s.0][c] = Some(target),
            }
        }
        if ok {
            let m = GradedMap::from_fn(&q, p.algebra().carrier(), |s, c| map[s.0][c].unwrap_or(0))?;
            ok = m.is_bijective();
        }
        Ok((q.total_len(), p.algebra().carrier().total_len(), ok))
    }
}

struct UnderTheory {
    x: Algebra,
    bound: usize,
    values: HashMap<Arity, (Colimit, Presented)>,
}

impl UnderTheory {
    fn value(&self, w: &Arity) -> Result<&(Colimit, Presented)> {
        self.values
            .get(w)
            .ok_or_else(|| crate::error::truncation("undercategory theory arity", w.len(), self.bound))
    }
}

impl Theory for UnderTheory {
    fn sorts(&self) -> &SortSet {
        self.x.theory().sorts()
    }

    fn name(&self) -> String {
        format!("{} under {}", self.x.theory().name(), self.x.carrier())
    }

    fn arity_bound(&self) -> usize {
        self.bound
    }

    fn size(&self, out: Sort, w: &Arity) -> Result<usize> {
        Ok(self.value(w)?.0.algebra().carrier().len(out))
    }

    fn element_name(&self, out: Sort, w: &Arity, t: usize) -> String {
        self.value(w)
            .map(|v| v.0.algebra().carrier().name(out, t).to_string())
            .unwrap_or_default()
    }

    fn projection(&self, w: &Arity, k: usize) -> Result<usize> {
        let (c, free) = self.value(w)?;
        let s = w.0[k];
        let i = w.0[..k].iter().filter(|&&t| t == s).count();
        Ok(c.injections[1].apply(s, free.unit()?.apply(s, i)))
    }

    /// `t[args]` is the image of `t` under the map `X ⊔ T(w) → X ⊔ T(v)`
    /// that is the coprojection on `X` and sends the `k`-th variable to
    /// `args[k]`.
    fn substitute(&self, out: Sort, w: &Arity, t: usize, v: &Arity, args: &[usize]) -> Result<usize> {
        let (cw, free_w) = self.value(w)?;
        let (cv, _) = self.value(v)?;
        let mut maps: Vec<Vec<usize>> = vec![Vec::new(); w.0.len().max(self.sorts().len())];
        maps.truncate(self.sorts().len());
        for (k, s) in w.0.iter().enumerate() {
            maps[s.0].push(args[k]);
        }
        let assign = GradedMap::new(free_w.basis.clone(), cv.algebra().carrier().clone(), maps)?;
        let h = free_w.induced(cv.algebra(), &assign)?;
        let m = cw.induced(cv.algebra(), &[cv.injections[0].clone(), h])?;
        Ok(m.apply(out, t))
    }

    fn generators(&self) -> Vec<Generator> {
        Vec::new()
    }

    fn decompose(&self, _: Sort, _: &Arity, _: usize) -> Result<Term> {
        Err(Error::Capability("undercategory theories are tabulated first".into()))
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// The theory `T_X` with `T_X(K) = X ⊔ T(K)`, tabulated up to `bound`.
pub fn undercategory_theory(x: &Algebra, bound: usize) -> Result<FiniteTheory> {
    let sorts = x.theory().sorts().clone();
    let mut values = HashMap::new();
    for w in sorts.arities_up_to(bound) {
        let basis = GradedSet::representable(&sorts, &w);
        let free = free_algebra(x.theory(), &basis)?;
        let c = coproduct(&[x, &free.algebra])?;
        values.insert(w, (c, free));
    }
    let under = UnderTheory {
        x: x.clone(),
        bound,
        values,
    };
    let t = FiniteTheory::tabulate(&under, bound)?;
    Ok(t.with_name(&under.name()))
}

/// A free algebra over a free theory, kept symbolic: elements are terms over
/// the basis, enumerated up to a vertex bound.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    sig: Signature,
    basis: GradedSet,
}

impl FreeAlgebra {
    pub fn new(sig: &Signature, basis: &GradedSet) -> Result<Self> {
        if sig.sorts() != basis.sorts() {
            return Err(invalid("basis and signature have different sorts"));
        }
        Ok(Self {
            sig: sig.clone(),
            basis: basis.clone(),
        })
    }

    pub fn basis(&self) -> &GradedSet {
        &self.basis
    }

    /// Terms of sort `out` with at most `max_vertices` vertices.
    pub fn elements(&self, out: Sort, max_vertices: usize) -> Vec<Term> {
        let t = FreeTheory::new(&self.sig, 0, max_vertices);
        let w = self.basis.as_arity();
        (0..t.size(out, &w).unwrap_or(0)).map(|e| t.term(out, &w, e)).collect()
    }

    /// Element counts graded by vertex count.
    pub fn count_by_vertices(&self, out: Sort, max_vertices: usize) -> Vec<u64> {
        let mut counts = vec![0u64; max_vertices + 1];
        for e in self.elements(out, max_vertices) {
            counts[e.vertices()] += 1;
        }
        counts
    }

    /// `T(K) ⊔ T(L) = T(K ⊔ L)`.
    pub fn coproduct(&self, other: &FreeAlgebra) -> Result<FreeAlgebra> {
        if self.sig != other.sig {
            return Err(invalid("free algebras over different signatures"));
        }
        FreeAlgebra::new(&self.sig, &self.basis.coproduct(&other.basis)?)
    }

    pub fn coproduct_with_free(&self, k: &GradedSet) -> Result<FreeAlgebra> {
        FreeAlgebra::new(&self.sig, &self.basis.coproduct(k)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointed() -> Arc<dyn Theory> {
        Arc::new(FreeTheory::new(&Signature::single_sorted(&[("c", 0)]), 4, 2))
    }

    fn pointed_set(names: &[&str], base: usize) -> Algebra {
        Algebra::from_fn(pointed(), GradedSet::from_names(names.iter().copied()).unwrap(), |_, _| base).unwrap()
    }

    #[test]
    fn free_pointed_algebra() {
        let k = GradedSet::from_names(["a", "b", "c1"]).unwrap();
        let f = free_algebra(&pointed(), &k).unwrap();
        assert_eq!(f.algebra.carrier().total_len(), 4);
        assert!(f.algebra.check_laws(2).unwrap().passed());
        assert!(f.unit().unwrap().is_injective());
    }

    #[test]
    fn wedge_sizes() {
        let x = pointed_set(&["p", "q", "r"], 0);
        let y = pointed_set(&["s", "t"], 1);
        let c = coproduct(&[&x, &y]).unwrap();
        assert_eq!(c.algebra().carrier().total_len(), 4);
        assert!(c.injections.iter().zip([&x, &y]).all(|(i, a)| a.is_homomorphism(c.algebra(), i)));
        let k = GradedSet::from_names(["k"]).unwrap();
        assert_eq!(coproduct_with_free(&x, &k).unwrap().algebra().carrier().total_len(), 4);
        let none = GradedSet::from_names(Vec::<String>::new()).unwrap();
        assert_eq!(coproduct_with_free(&x, &none).unwrap().algebra().carrier().total_len(), 3);
    }

    #[test]
    fn improper_algebras_and_effective_mono() {
        let t: Arc<dyn Theory> = Arc::new(FiniteTheory::improper(6));
        let (algs, raw) = enumerate_algebras(&t, 3).unwrap();
        assert_eq!(algs.len(), 2);
        assert_eq!(raw, 2);
        let empty = algs.iter().find(|a| a.carrier().is_empty()).unwrap();
        let point = algs.iter().find(|a| a.carrier().total_len() == 1).unwrap();
        let f = GradedMap::new(empty.carrier().clone(), point.carrier().clone(), vec![vec![]]).unwrap();
        let v = effective_mono(empty, point, &f).unwrap();
        assert!(v.mono);
        assert!(!v.effective);
        assert!(v.witness.is_some());
        let id = GradedMap::identity(point.carrier());
        assert!(effective_mono(point, point, &id).unwrap().effective);
    }

    #[test]
    fn pointed_structures_on_two_points() {
        let carrier = GradedSet::from_names(["a", "b"]).unwrap();
        assert_eq!(structures_on(&pointed(), &carrier).unwrap().len(), 2);
        let (algs, _) = enumerate_algebras(&pointed(), 2).unwrap();
        // Empty carriers have no basepoint.
        assert_eq!(algs.len(), 2);
    }

    #[test]
    fn bar_identities_and_augmentation() {
        let x = pointed_set(&["x0", "x1"], 0);
        let u = pointed_set(&["u0", "u1"], 0);
        let v = pointed_set(&["v0", "v1", "v2"], 0);
        let f = GradedMap::new(u.carrier().clone(), x.carrier().clone(), vec![vec![0, 1]]).unwrap();
        let g = GradedMap::new(u.carrier().clone(), v.carrier().clone(), vec![vec![0, 2]]).unwrap();
        let bar = Bar::new(x, u, v, f, g).unwrap();
        assert_eq!(bar.level(0).unwrap().algebra().carrier().total_len(), 4);
        assert_eq!(bar.level(1).unwrap().algebra().carrier().total_len(), 5);
        let r = bar.check_identities(3).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let (q, p, ok) = bar.augmentation().unwrap();
        assert_eq!((q, p, ok), (3, 3, true));
    }

    #[test]
    fn undercategory_of_pointed_sets() {
        let x = pointed_set(&["p", "q"], 0);
        let t = undercategory_theory(&x, 3).unwrap();
        for n in 0..=3 {
            assert_eq!(t.size(Sort(0), &Arity::uniform(Sort(0), n)).unwrap(), n + 2);
        }
        assert!(crate::theory::check_clone_laws(&t, 2).unwrap().passed());
    }
}
