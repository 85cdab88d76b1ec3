//! Brute-force reference computations for the harness. Inputs are plain
//! data (sizes, index tables, operation shapes) and nothing here calls into
//! the rest of the crate.

use std::collections::{HashMap, VecDeque};

/// An operation shape: output sort and input sorts, all as indices.
pub type Shape = (usize, Vec<usize>);

/// Catalan numbers by the convolution recurrence.
pub fn catalan(n: usize) -> u64 {
    let mut c = vec![1u64; n + 1];
    for m in 1..=n {
        c[m] = (0..m).map(|i| c[i] * c[m - 1 - i]).sum();
    }
    c[n]
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Classes of `0..n` under the equivalence generated by `pairs`, by breadth
/// first search. Classes are numbered in order of their least element.
pub fn components(n: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if class[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        class[start] = next;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if class[u] == usize::MAX {
                    class[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    class
}

pub fn class_count(classes: &[usize]) -> usize {
    classes.iter().copied().max().map_or(0, |m| m + 1)
}

/// Counts of trees over `ops` by exact vertex number: `count(out, word, v)`.
pub struct TreeCounter<'a> {
    ops: &'a [Shape],
    b_ops: Option<&'a [bool]>,
    memo: HashMap<(usize, Vec<usize>, usize, bool), u64>,
}

impl<'a> TreeCounter<'a> {
    pub fn new(ops: &'a [Shape]) -> Self {
        Self {
            ops,
            b_ops: None,
            memo: HashMap::new(),
        }
    }

    /// Counts essential trees instead: every vertex is `B`-labelled or lies
    /// on a path from the root to one.
    pub fn essential(ops: &'a [Shape], in_b: &'a [bool]) -> Self {
        Self {
            ops,
            b_ops: Some(in_b),
            memo: HashMap::new(),
        }
    }

    /// Trees with output `out`, leaf word `word` and exactly `v` vertices.
    pub fn exact(&mut self, out: usize, word: &[usize], v: usize) -> u64 {
        if v == 0 {
            return u64::from(word == [out]);
        }
        self.nodes(out, word, v, self.b_ops.is_some())
    }

    pub fn up_to(&mut self, out: usize, word: &[usize], max_v: usize) -> Vec<u64> {
        (0..=max_v).map(|v| self.exact(out, word, v)).collect()
    }

    /// Non-trivial trees; with `marked`, only those whose vertices are all
    /// marked.
    fn nodes(&mut self, out: usize, word: &[usize], v: usize, marked: bool) -> u64 {
        let key = (out, word.to_vec(), v, marked);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let mut total = 0;
        for (i, (o, inputs)) in self.ops.iter().enumerate() {
            if *o != out {
                continue;
            }
            let all = self.children(inputs, word, v - 1, marked, false);
            let need_b = marked && !self.b_ops.is_some_and(|b| b[i]);
            // With a root outside B, at least one child must be a marked node.
            let only_leaves = if need_b { self.children(inputs, word, v - 1, marked, true) } else { 0 };
            total += all - only_leaves;
        }
        self.memo.insert(key, total);
        total
    }

    /// Ways to fill `inputs` with consecutive segments of `word` using
    /// `budget` vertices; `leaves_only` forces every child to be a leaf.
    fn children(&mut self, inputs: &[usize], word: &[usize], budget: usize, marked: bool, leaves_only: bool) -> u64 {
        if inputs.is_empty() {
            return u64::from(word.is_empty() && budget == 0);
        }
        let (first, rest) = (inputs[0], &inputs[1..]);
        let mut total = 0;
        for cut in 0..=word.len() {
            let (head, tail) = word.split_at(cut);
            for b in 0..=budget {
                let here = if b == 0 {
                    u64::from(head == [first])
                } else if leaves_only {
                    0
                } else {
                    self.nodes(first, head, b, marked)
                };
                if here == 0 {
                    continue;
                }
                total += here * self.children(rest, tail, budget - b, marked, leaves_only);
            }
        }
        total
    }
}

/// `|S A (X)|` per output sort for a free series on `ops`, by the closed
/// formula `Σ_a ∏_k |X_{g_k}|`.
pub fn free_series_sizes(ops: &[Shape], out_sorts: usize, sizes: &[usize]) -> Vec<u64> {
    let mut r = vec![0u64; out_sorts];
    for (o, inputs) in ops {
        r[*o] += inputs.iter().map(|&s| sizes[s] as u64).product::<u64>();
    }
    r
}

/// Set-level pushout size of `X ← U → V`, given the two maps as index tables.
pub fn pushout_size(x: usize, v: usize, f: &[usize], g: &[usize]) -> usize {
    let pairs: Vec<(usize, usize)> = f.iter().zip(g).map(|(&a, &b)| (a, x + b)).collect();
    class_count(&components(x + v, &pairs))
}

/// All functions `{0..n} → {0..m}` as tables.
pub fn functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..m).map(move |v| {
                    let mut g = f.clone();
                    g.push(v);
                    g
                })
            })
            .collect();
    }
    out
}

/// An algebra for a signature given by raw operation tables over a
/// single-sorted carrier: `tables[k]` lists values in lexicographic order of
/// argument tuples.
#[derive(Clone, Debug)]
pub struct RawAlgebra {
    pub size: usize,
    pub arities: Vec<usize>,
    pub tables: Vec<Vec<usize>>,
}

impl RawAlgebra {
    fn apply(&self, op: usize, args: &[usize]) -> usize {
        let rank = args.iter().fold(0, |acc, &a| acc * self.size + a);
        self.tables[op][rank]
    }
}

/// All argument tuples of length `n` over `size` elements, lexicographic.
fn argument_tuples(size: usize, n: usize) -> Vec<Vec<usize>> {
    functions(n, size)
}

pub fn is_hom(a: &RawAlgebra, b: &RawAlgebra, f: &[usize]) -> bool {
    (0..a.arities.len()).all(|op| {
        argument_tuples(a.size, a.arities[op]).iter().all(|args| {
            let mapped: Vec<usize> = args.iter().map(|&x| f[x]).collect();
            f[a.apply(op, args)] == b.apply(op, &mapped)
        })
    })
}

pub fn homs(a: &RawAlgebra, b: &RawAlgebra) -> Vec<Vec<usize>> {
    functions(a.size, b.size).into_iter().filter(|f| is_hom(a, b, f)).collect()
}

/// Elements of `Y` on which every pair of homomorphisms out of `Y` that
/// agree on the image of `f` also agree, tested against every algebra in
/// `tests`. When `tests` contains the pushout `Y ⊔_X Y` this is the
/// equalizer of the two coprojections.
pub fn equalized_elements(y: &RawAlgebra, f: &[usize], tests: &[RawAlgebra]) -> Vec<usize> {
    let mut keep = vec![true; y.size];
    for z in tests {
        let hs = homs(y, z);
        for g in &hs {
            for h in &hs {
                if f.iter().all(|&x| g[x] == h[x]) {
                    for (e, k) in keep.iter_mut().enumerate() {
                        if g[e] != h[e] {
                            *k = false;
                        }
                    }
                }
            }
        }
    }
    (0..y.size).filter(|&e| keep[e]).collect()
}

/// Every algebra structure for operations of the given arities on a carrier
/// of `size` elements satisfying `law`.
pub fn all_structures(size: usize, arities: &[usize], law: &dyn Fn(&RawAlgebra) -> bool) -> Vec<RawAlgebra> {
    let mut out = vec![Vec::new()];
    for &n in arities {
        let cells = size.pow(n as u32);
        out = out
            .into_iter()
            .flat_map(|ts: Vec<Vec<usize>>| {
                functions(cells, size).into_iter().map(move |t| {
                    let mut ts = ts.clone();
                    ts.push(t);
                    ts
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|tables| RawAlgebra {
            size,
            arities: arities.to_vec(),
            tables,
        })
        .filter(|a| law(a))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!((0..7).map(catalan).collect::<Vec<_>>(), vec![1, 1, 2, 5, 14, 42, 132]);
        assert_eq!(binomial(3, 1), 3);
        assert_eq!(class_count(&components(4, &[(0, 2), (2, 3)])), 2);
        assert_eq!(pushout_size(2, 3, &[0, 1], &[0, 2]), 3);
    }

    #[test]
    fn tree_counter_matches_hand_counts() {
        let binary = vec![(0, vec![0, 0])];
        let mut c = TreeCounter::new(&binary);
        assert_eq!(c.exact(0, &[0, 0, 0], 2), 2);
        let two = vec![(0, vec![0, 0]), (0, vec![0, 0])];
        let in_b = vec![false, true];
        let mut e = TreeCounter::essential(&two, &in_b);
        assert_eq!(e.exact(0, &[0, 0], 1), 1);
        assert_eq!(e.exact(0, &[0, 0, 0], 2), 4);
        assert_eq!(e.exact(0, &[0], 0), 1);
    }
}
