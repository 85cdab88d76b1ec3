//! Totally ordered labelled trees (linear terms), grafting, enumeration and
//! essential subtrees.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graded::{Arity, Profile, Sort, SortSet};
use crate::series::{weakly_monotone_maps, GradedCounts};
use crate::signature::{OpId, Signature};

/// A tree labelled by the operations of a signature. Leaves carry their sort;
/// the leaf word read left to right is the input arity of the tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf(Sort),
    Node { op: OpId, children: Vec<Tree> },
}

impl Tree {
    pub fn corolla(sig: &Signature, op: OpId) -> Tree {
        Tree::Node {
            op,
            children: sig.op(op).profile.inputs.0.iter().map(|&s| Tree::Leaf(s)).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Tree::Leaf(_))
    }

    pub fn output(&self, sig: &Signature) -> Sort {
        match self {
            Tree::Leaf(s) => *s,
            Tree::Node { op, .. } => sig.op(*op).profile.output,
        }
    }

    pub fn leaves(&self) -> Arity {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        Arity(out)
    }

    fn collect_leaves(&self, out: &mut Vec<Sort>) {
        match self {
            Tree::Leaf(s) => out.push(*s),
            Tree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node { children, .. } => children.iter().map(Tree::leaf_count).sum(),
        }
    }

    pub fn vertices(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::vertices).sum::<usize>(),
        }
    }

    pub fn profile(&self, sig: &Signature) -> Profile {
        Profile::new(self.output(sig), self.leaves())
    }

    /// Checks sort-correctness at every vertex.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        match self {
            Tree::Leaf(s) => sig.sorts().check(*s),
            Tree::Node { op, children } => {
                if *op >= sig.len() {
                    return Err(invalid(format!("unknown operation index {op}")));
                }
                let inputs = &sig.op(*op).profile.inputs;
                if inputs.len() != children.len() {
                    return Err(invalid(format!("`{}` expects {} children", sig.op(*op).name, inputs.len())));
                }
                for (c, &s) in children.iter().zip(&inputs.0) {
                    c.validate(sig)?;
                    if c.output(sig) != s {
                        return Err(invalid(format!("child of `{}` has the wrong sort", sig.op(*op).name)));
                    }
                }
                Ok(())
            }
        }
    }

    /// Every vertex label passed through `f`.
    pub fn relabel(&self, f: &dyn Fn(OpId) -> OpId) -> Tree {
        match self {
            Tree::Leaf(s) => Tree::Leaf(*s),
            Tree::Node { op, children } => Tree::Node {
                op: f(*op),
                children: children.iter().map(|c| c.relabel(f)).collect(),
            },
        }
    }

    pub fn labels(&self) -> Vec<OpId> {
        let mut out = Vec::new();
        self.visit_labels(&mut |op| out.push(op));
        out
    }

    fn visit_labels(&self, f: &mut dyn FnMut(OpId)) {
        if let Tree::Node { op, children } = self {
            f(*op);
            children.iter().for_each(|c| c.visit_labels(f));
        }
    }

    /// Term notation with leaves numbered `x1, x2, ...` left to right.
    pub fn display(&self, sig: &Signature) -> String {
        let mut out = String::new();
        let mut next = 0;
        self.write_term(sig, &mut out, &mut next);
        out
    }

    fn write_term(&self, sig: &Signature, out: &mut String, next: &mut usize) {
        match self {
            Tree::Leaf(_) => {
                *next += 1;
                let _ = write!(out, "x{next}");
            }
            Tree::Node { op, children } => {
                out.push_str(&sig.op(*op).name);
                if !children.is_empty() {
                    out.push('(');
                    for (k, c) in children.iter().enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        c.write_term(sig, out, next);
                    }
                    out.push(')');
                }
            }
        }
    }

    pub fn to_value(&self, sig: &Signature) -> Value {
        match self {
            Tree::Leaf(s) => json!({ "leaf": sig.sorts().name(*s) }),
            Tree::Node { op, children } => json!({
                "op": sig.op(*op).name,
                "children": children.iter().map(|c| c.to_value(sig)).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_value(v: &Value, sig: &Signature) -> Result<Tree> {
        let bad = || Error::Parse(format!("not a tree: {v}"));
        if let Some(s) = v.get("leaf") {
            return Ok(Tree::Leaf(sig.sorts().sort(s.as_str().ok_or_else(bad)?)?));
        }
        let name = v.get("op").and_then(Value::as_str).ok_or_else(bad)?;
        let op = sig.find(name).ok_or_else(|| Error::Parse(format!("unknown operation `{name}`")))?;
        let children = v
            .get("children")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| Tree::from_value(c, sig))
            .collect::<Result<Vec<_>>>()?;
        let t = Tree::Node { op, children };
        t.validate(sig)?;
        Ok(t)
    }

    /// Graph description: one node per vertex and leaf in preorder, edges in
    /// input order.
    pub fn to_dot(&self, sig: &Signature) -> String {
        let mut out = String::from("digraph tree {\n");
        let mut next = 0;
        self.write_dot(sig, &mut out, &mut next);
        out.push_str("}\n");
        out
    }

    fn write_dot(&self, sig: &Signature, out: &mut String, next: &mut usize) -> usize {
        let me = *next;
        *next += 1;
        match self {
            Tree::Leaf(s) => {
                let _ = writeln!(out, "  n{me} [shape=point, sort=\"{}\"];", sig.sorts().name(*s));
            }
            Tree::Node { op, children } => {
                let _ = writeln!(out, "  n{me} [label=\"{}\"];", sig.op(*op).name);
                for (k, c) in children.iter().enumerate() {
                    let child = c.write_dot(sig, out, next);
                    let _ = writeln!(out, "  n{me} -> n{child} [input={}];", k + 1);
                }
            }
        }
        me
    }

    /// Parses the output of [`Tree::to_dot`].
    pub fn from_dot(text: &str, sig: &Signature) -> Result<Tree> {
        enum Entry {
            Leaf(Sort),
            Op(OpId),
        }
        let perr = |m: &str| Error::Parse(format!("graph description: {m}"));
        let quoted = |line: &str, key: &str| -> Option<String> {
            let start = line.find(&format!("{key}=\""))? + key.len() + 2;
            let end = start + line[start..].find('"')?;
            Some(line[start..end].to_string())
        };
        let mut nodes: BTreeMap<usize, Entry> = BTreeMap::new();
        let mut edges: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("digraph tree {") {
            return Err(perr("missing header"));
        }
        let id = |s: &str| -> Result<usize> {
            s.trim()
                .strip_prefix('n')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| perr("bad node id"))
        };
        for line in lines {
            if line == "}" {
                break;
            }
            let line = line.strip_suffix(';').ok_or_else(|| perr("missing `;`"))?;
            if let Some((from, rest)) = line.split_once("->") {
                let (to, attrs) = rest.split_once('[').ok_or_else(|| perr("edge without attributes"))?;
                let k: usize = attrs
                    .trim_end_matches(']')
                    .strip_prefix("input=")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| perr("edge without input index"))?;
                edges.entry(id(from)?).or_default().push((k, id(to)?));
            } else {
                let (node, _) = line.split_once('[').ok_or_else(|| perr("node without attributes"))?;
                let entry = if let Some(s) = quoted(line, "sort") {
                    Entry::Leaf(sig.sorts().sort(&s)?)
                } else {
                    let name = quoted(line, "label").ok_or_else(|| perr("node without label"))?;
                    Entry::Op(sig.find(&name).ok_or_else(|| perr("unknown operation"))?)
                };
                nodes.insert(id(node)?, entry);
            }
        }
        fn build(n: usize, nodes: &BTreeMap<usize, Entry>, edges: &BTreeMap<usize, Vec<(usize, usize)>>) -> Result<Tree> {
            match nodes.get(&n) {
                Some(Entry::Leaf(s)) => Ok(Tree::Leaf(*s)),
                Some(Entry::Op(op)) => {
                    let mut es = edges.get(&n).cloned().unwrap_or_default();
                    es.sort();
                    let children = es
                        .iter()
                        .map(|&(_, c)| build(c, nodes, edges))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Tree::Node { op: *op, children })
                }
                None => Err(Error::Parse(format!("graph description: missing node n{n}"))),
            }
        }
        let t = build(0, &nodes, &edges)?;
        t.validate(sig)?;
        Ok(t)
    }
}

/// Substitutes `subs[k]` into the `k`-th leaf of `root`.
pub fn graft(sig: &Signature, root: &Tree, subs: &[Tree]) -> Result<Tree> {
    let leaves = root.leaves();
    if leaves.len() != subs.len() {
        return Err(invalid(format!(
            "grafting needs {} trees, got {}",
            leaves.len(),
            subs.len()
        )));
    }
    for (k, t) in subs.iter().enumerate() {
        if t.output(sig) != leaves.0[k] {
            return Err(invalid(format!("tree grafted at leaf {} has the wrong sort", k + 1)));
        }
    }
    fn go(t: &Tree, subs: &[Tree], next: &mut usize) -> Tree {
        match t {
            Tree::Leaf(_) => {
                *next += 1;
                subs[*next - 1].clone()
            }
            Tree::Node { op, children } => Tree::Node {
                op: *op,
                children: children.iter().map(|c| go(c, subs, next)).collect(),
            },
        }
    }
    Ok(go(root, subs, &mut 0))
}

/// Trees of one profile up to a vertex bound, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub trees: Vec<Tree>,
    /// Set when some tree of this profile has more vertices than the bound.
    pub truncated: bool,
}

/// All ways of cutting `n` positions into `m` contiguous, possibly empty,
/// segments, as boundary lists of length `m + 1`.
fn segmentations(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if n == 0 { vec![vec![0]] } else { Vec::new() };
    }
    weakly_monotone_maps(m - 1, n + 1)
        .into_iter()
        .map(|cuts| {
            let mut b = Vec::with_capacity(m + 1);
            b.push(0);
            b.extend(cuts);
            b.push(n);
            b
        })
        .collect()
}

struct ProfileEnumerator<'a> {
    sig: &'a Signature,
    memo: HashMap<(Sort, Vec<Sort>, usize), Vec<Tree>>,
}

impl ProfileEnumerator<'_> {
    /// Trees with output `s`, leaf word `w` and exactly `v` vertices.
    fn exact(&mut self, s: Sort, w: &[Sort], v: usize) -> Vec<Tree> {
        let key = (s, w.to_vec(), v);
        if let Some(t) = self.memo.get(&key) {
            return t.clone();
        }
        let mut out = Vec::new();
        if v == 0 {
            if w == [s] {
                out.push(Tree::Leaf(s));
            }
        } else {
            let sig = self.sig;
            for op in sig.with_output(s) {
                let g = sig.op(op).profile.inputs.0.clone();
                for seg in segmentations(w.len(), g.len()) {
                    self.children(op, &g, w, &seg, 0, v - 1, &mut Vec::new(), &mut out);
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn children(
        &mut self,
        op: OpId,
        g: &[Sort],
        w: &[Sort],
        seg: &[usize],
        k: usize,
        budget: usize,
        acc: &mut Vec<Tree>,
        out: &mut Vec<Tree>,
    ) {
        if k == g.len() {
            if budget == 0 {
                out.push(Tree::Node {
                    op,
                    children: acc.clone(),
                });
            }
            return;
        }
        let piece = &w[seg[k]..seg[k + 1]];
        for v in 0..=budget {
            for t in self.exact(g[k], piece, v) {
                acc.push(t);
                self.children(op, g, w, seg, k + 1, budget - v, acc, out);
                acc.pop();
            }
        }
    }
}

/// Largest vertex count of a tree with output `s` and leaf word `w`, capped
/// at `cap`; `None` when there is no such tree. Computed as a least fixpoint
/// over all contiguous segments of `w`.
fn capped_max_vertices(sig: &Signature, s: Sort, w: &Arity, cap: usize) -> Option<usize> {
    let n = w.len();
    let sorts: Vec<Sort> = sig.sorts().sorts().collect();
    let mut best: HashMap<(Sort, usize, usize), usize> = HashMap::new();
    loop {
        let mut changed = false;
        for len in 0..=n {
            for i in 0..=n - len {
                let j = i + len;
                for &t in &sorts {
                    let mut value: Option<usize> = (len == 1 && w.0[i] == t).then_some(0);
                    for op in sig.with_output(t) {
                        let g = &sig.op(op).profile.inputs.0;
                        for seg in segmentations(len, g.len()) {
                            let mut total = Some(1usize);
                            for k in 0..g.len() {
                                total = match (total, best.get(&(g[k], i + seg[k], i + seg[k + 1]))) {
                                    (Some(a), Some(b)) => Some(a + b),
                                    _ => None,
                                };
                            }
                            if let Some(c) = total {
                                value = Some(value.map_or(c, |v| v.max(c)));
                            }
                        }
                    }
                    if let Some(v) = value {
                        let v = v.min(cap);
                        if best.get(&(t, i, j)).is_none_or(|&old| v > old) {
                            best.insert((t, i, j), v);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    best.get(&(s, 0, n)).copied()
}

/// All trees of profile `p` with at most `max_vertices` vertices.
pub fn enumerate_trees(sig: &Signature, p: &Profile, max_vertices: usize) -> Result<Enumeration> {
    p.validate(sig.sorts())?;
    let mut en = ProfileEnumerator {
        sig,
        memo: HashMap::new(),
    };
    let mut trees = Vec::new();
    for v in 0..=max_vertices {
        trees.extend(en.exact(p.output, &p.inputs.0, v));
    }
    trees.sort();
    let truncated = capped_max_vertices(sig, p.output, &p.inputs, max_vertices + 1)
        .is_some_and(|m| m > max_vertices);
    Ok(Enumeration { trees, truncated })
}

/// All trees with the given output sort and at most `max_vertices` vertices,
/// of any leaf word, in canonical order.
pub fn enumerate_by_vertices(sig: &Signature, out: Sort, max_vertices: usize) -> Vec<Tree> {
    fn exact(sig: &Signature, s: Sort, v: usize, memo: &mut HashMap<(Sort, usize), Vec<Tree>>) -> Vec<Tree> {
        if let Some(t) = memo.get(&(s, v)) {
            return t.clone();
        }
        let mut out = Vec::new();
        if v == 0 {
            out.push(Tree::Leaf(s));
        } else {
            for op in sig.with_output(s) {
                let g = sig.op(op).profile.inputs.0.clone();
                let mut partial: Vec<(Vec<Tree>, usize)> = vec![(Vec::new(), v - 1)];
                for &gs in &g {
                    let mut next = Vec::new();
                    for (acc, budget) in &partial {
                        for u in 0..=*budget {
                            for t in exact(sig, gs, u, memo) {
                                let mut a = acc.clone();
                                a.push(t);
                                next.push((a, budget - u));
                            }
                        }
                    }
                    partial = next;
                }
                out.extend(
                    partial
                        .into_iter()
                        .filter(|(_, b)| *b == 0)
                        .map(|(children, _)| Tree::Node { op, children }),
                );
            }
        }
        memo.insert((s, v), out.clone());
        out
    }
    let mut memo = HashMap::new();
    let mut all: Vec<Tree> = (0..=max_vertices).flat_map(|v| exact(sig, out, v, &mut memo)).collect();
    all.sort();
    all
}

/// The coproduct `A ⊔ B` of generator objects, with the `B`-membership of
/// every operation of the result.
pub fn coproduct_signature(a: &Signature, b: &Signature) -> Result<(Signature, Vec<bool>)> {
    let sig = a.disjoint_union(b)?;
    let in_b = (0..sig.len()).map(|i| i >= a.len()).collect();
    Ok((sig, in_b))
}

fn mark(t: &Tree, in_b: &[bool]) -> bool {
    match t {
        Tree::Leaf(_) => false,
        Tree::Node { op, children } => in_b[*op] | children.iter().fold(false, |acc, c| acc | mark(c, in_b)),
    }
}

/// `e_B(t)`: the minimal rooted subtree containing every `B`-labelled vertex,
/// with every cut branch replaced by a leaf.
pub fn essential_subtree(sig: &Signature, t: &Tree, in_b: &[bool]) -> Tree {
    split_essential(sig, t, in_b).0
}

/// Writes `t` uniquely as `graft(e, forest)` with `e` essential and the
/// forest labelled by `A` only.
pub fn split_essential(sig: &Signature, t: &Tree, in_b: &[bool]) -> (Tree, Vec<Tree>) {
    fn go(sig: &Signature, t: &Tree, in_b: &[bool], forest: &mut Vec<Tree>) -> Tree {
        if !mark(t, in_b) {
            forest.push(t.clone());
            return Tree::Leaf(t.output(sig));
        }
        match t {
            Tree::Node { op, children } => Tree::Node {
                op: *op,
                children: children.iter().map(|c| go(sig, c, in_b, forest)).collect(),
            },
            Tree::Leaf(_) => unreachable!("leaves are never marked"),
        }
    }
    let mut forest = Vec::new();
    let e = go(sig, t, in_b, &mut forest);
    (e, forest)
}

pub fn is_essential(sig: &Signature, t: &Tree, in_b: &[bool]) -> bool {
    &essential_subtree(sig, t, in_b) == t
}

/// `Q_e(A, B)(p)`: the essential trees over `A ⊔ B` of profile `p`.
pub fn enumerate_essential(sig: &Signature, in_b: &[bool], p: &Profile, max_vertices: usize) -> Result<Enumeration> {
    let mut en = enumerate_trees(sig, p, max_vertices)?;
    en.trees.retain(|t| is_essential(sig, t, in_b));
    Ok(en)
}

/// Vertex-graded profile counts of a finite family of trees.
#[derive(Clone, Debug)]
pub struct TreeCounts {
    sorts: SortSet,
    table: BTreeMap<Profile, Vec<u64>>,
}

impl TreeCounts {
    pub fn new<'a>(sig: &Signature, trees: impl IntoIterator<Item = &'a Tree>) -> Self {
        let mut table: BTreeMap<Profile, Vec<u64>> = BTreeMap::new();
        for t in trees {
            let row = table.entry(t.profile(sig)).or_default();
            let v = t.vertices();
            if row.len() <= v {
                row.resize(v + 1, 0);
            }
            row[v] += 1;
        }
        Self {
            sorts: sig.sorts().clone(),
            table,
        }
    }
}

impl GradedCounts for TreeCounts {
    fn sorts(&self) -> &SortSet {
        &self.sorts
    }

    fn support(&self) -> Vec<Profile> {
        self.table.keys().cloned().collect()
    }

    fn count(&self, p: &Profile) -> Vec<u64> {
        self.table.get(p).cloned().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> Signature {
        Signature::single_sorted(&[("m", 2)])
    }

    fn prof(n: usize) -> Profile {
        Profile::new(Sort(0), Arity::uniform(Sort(0), n))
    }

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (2..=6)
            .map(|n| enumerate_trees(&binary(), &prof(n), 10).unwrap().trees.len())
            .collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42]);
        assert!(!enumerate_trees(&binary(), &prof(4), 3).unwrap().truncated);
        assert!(enumerate_trees(&binary(), &prof(4), 2).unwrap().truncated);
    }

    #[test]
    fn unary_chains_are_truncated() {
        let sig = Signature::single_sorted(&[("u", 1)]);
        let en = enumerate_trees(&sig, &prof(1), 3).unwrap();
        assert_eq!(en.trees.len(), 4);
        assert!(en.truncated);
    }

    #[test]
    fn empty_signature_has_only_trivial_trees() {
        let sig = Signature::empty(&SortSet::single());
        let en = enumerate_trees(&sig, &prof(1), 5).unwrap();
        assert_eq!(en.trees, vec![Tree::Leaf(Sort(0))]);
        assert!(!en.truncated);
        assert!(enumerate_trees(&sig, &prof(2), 5).unwrap().trees.is_empty());
    }

    #[test]
    fn graft_example() {
        let sig = binary();
        let m = Tree::corolla(&sig, 0);
        let g = graft(&sig, &m, &[m.clone(), Tree::Leaf(Sort(0))]).unwrap();
        assert_eq!(g.display(&sig), "m(m(x1,x2),x3)");
        assert_eq!(graft(&sig, &Tree::Leaf(Sort(0)), std::slice::from_ref(&g)).unwrap(), g);
        assert!(graft(&sig, &m, std::slice::from_ref(&m)).is_err());
    }

    #[test]
    fn essential_examples() {
        let (sig, in_b) = coproduct_signature(&Signature::single_sorted(&[("a", 2)]), &Signature::single_sorted(&[("b", 2)])).unwrap();
        let a = Tree::corolla(&sig, 0);
        let b = Tree::corolla(&sig, 1);
        let x = Tree::Leaf(Sort(0));
        assert!(essential_subtree(&sig, &a, &in_b).is_trivial());
        assert_eq!(essential_subtree(&sig, &b, &in_b), b);
        let t = graft(&sig, &a, &[b.clone(), x.clone()]).unwrap();
        assert_eq!(essential_subtree(&sig, &t, &in_b), t);
        let (e, forest) = split_essential(&sig, &a, &in_b);
        assert_eq!((e, forest), (x.clone(), vec![a.clone()]));
        let counts: Vec<usize> = (1..=3)
            .map(|n| enumerate_essential(&sig, &in_b, &prof(n), 6).unwrap().trees.len())
            .collect();
        assert_eq!(counts, vec![1, 1, 4]);
    }

    #[test]
    fn dot_and_json_round_trip() {
        let sorts = SortSet::new(["v", "e"]).unwrap();
        let sig = Signature::parse(&sorts, &[("edge", "e<-(v,v)"), ("src", "v<-(e)"), ("pt", "v<-()")]).unwrap();
        let t = Tree::Node {
            op: 0,
            children: vec![
                Tree::Node {
                    op: 1,
                    children: vec![Tree::Leaf(Sort(1))],
                },
                Tree::Node { op: 2, children: vec![] },
            ],
        };
        t.validate(&sig).unwrap();
        let dot = t.to_dot(&sig);
        assert_eq!(Tree::from_dot(&dot, &sig).unwrap(), t);
        assert_eq!(Tree::from_dot(&dot, &sig).unwrap().to_dot(&sig), dot);
        let v = t.to_value(&sig);
        assert_eq!(Tree::from_value(&v, &sig).unwrap(), t);
    }

    #[test]
    fn by_vertices_agrees_with_profile_enumeration() {
        let sig = Signature::single_sorted(&[("m", 2), ("c", 0), ("u", 1)]);
        let all = enumerate_by_vertices(&sig, Sort(0), 4);
        for n in 0..=5 {
            let direct = enumerate_trees(&sig, &prof(n), 4).unwrap().trees;
            let bucket: Vec<Tree> = all.iter().filter(|t| t.leaf_count() == n).cloned().collect();
            assert_eq!(direct, bucket);
        }
    }
}
