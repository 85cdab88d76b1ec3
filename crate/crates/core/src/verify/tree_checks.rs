use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fixtures::{self, binary, graph_signature, two_sorted};
use super::oracles::{catalan, Shape, TreeCounter};
use super::{Config, Tally};
use crate::error::Result;
use crate::graded::{Arity, Profile, Sort, SortSet};
use crate::series::{star_count, GradedCounts};
use crate::signature::{Operation, Signature};
use crate::theory::{morphisms, FreeTheory, Theory, TheoryMorphism};
use crate::trees::{
    coproduct_signature, enumerate_by_vertices, enumerate_trees, graft, is_essential, split_essential, Tree, TreeCounts,
};

pub(crate) fn shapes(sig: &Signature) -> Vec<Shape> {
    sig.ops()
        .iter()
        .map(|op| (op.profile.output.0, op.profile.inputs.0.iter().map(|s| s.0).collect()))
        .collect()
}

fn word(w: &Arity) -> Vec<usize> {
    w.0.iter().map(|s| s.0).collect()
}

fn padded(mut v: Vec<u64>, len: usize) -> Vec<u64> {
    v.resize(len, 0);
    v
}

fn by_vertices(trees: &[Tree], max_v: usize) -> Vec<u64> {
    let mut c = vec![0; max_v + 1];
    for t in trees {
        c[t.vertices()] += 1;
    }
    c
}

/// Single-sorted fixtures used by several checks.
fn single_sorted_fixtures() -> Vec<(&'static str, Signature)> {
    vec![
        ("binary", binary()),
        ("unary", Signature::single_sorted(&[("u", 1)])),
        ("pointed-binary", Signature::single_sorted(&[("c", 0), ("m", 2)])),
        ("ternary-unary", Signature::single_sorted(&[("t", 3), ("u", 1)])),
    ]
}

pub(crate) fn tree_counts(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let s = Sort(0);
    let mut seen = Vec::new();
    for n in 2..=8usize {
        let en = enumerate_trees(&binary(), &Profile::new(s, Arity::uniform(s, n)), n - 1)?;
        t.eq(format!("binary trees with {n} leaves"), en.trees.len() as u64, catalan(n - 1));
        t.check(!en.truncated, || format!("binary profile with {n} leaves reported truncated"));
        seen.push(en.trees.len().to_string());
    }
    t.note(format!("binary, 2..8 leaves: {}", seen.join(",")));

    for sorts in [SortSet::single(), two_sorted()] {
        let empty = Signature::empty(&sorts);
        for p in Profile::all_up_to(&sorts, 3) {
            let en = enumerate_trees(&empty, &p, cfg.max_vertices)?;
            let want = u64::from(p.inputs.0 == [p.output]);
            t.eq(format!("empty signature at {}", p.display(&sorts)), en.trees.len() as u64, want);
        }
    }
    t.note("empty signature: one trivial tree per sort");

    let unary = Signature::single_sorted(&[("u", 1)]);
    let chain = enumerate_trees(&unary, &Profile::new(s, Arity::uniform(s, 1)), 3)?;
    t.eq("unary chains up to 3 vertices", chain.trees.len(), 4);
    t.check(chain.truncated, || "unary chains not reported truncated".into());

    let mut fixtures = single_sorted_fixtures();
    fixtures.push(("graph", graph_signature()));
    let v = cfg.max_vertices;
    for (name, sig) in &fixtures {
        let ops = shapes(sig);
        let mut oracle = TreeCounter::new(&ops);
        let max_len = if sig.sorts().is_single() { cfg.max_arity } else { 3 };
        let mut profiles = 0;
        for p in Profile::all_up_to(sig.sorts(), max_len) {
            let en = enumerate_trees(sig, &p, v)?;
            t.eq(
                format!("{name} at {} by vertices", p.display(sig.sorts())),
                by_vertices(&en.trees, v),
                oracle.up_to(p.output.0, &word(&p.inputs), v),
            );
            profiles += 1;
        }
        t.note(format!("{name}: {profiles} profiles agree with the segment DP up to {v} vertices"));
    }
    Ok(t)
}

/// Restriction of counts to the profiles with a given number of inputs.
struct ArityFilter<'a> {
    inner: &'a dyn GradedCounts,
    arity: usize,
}

impl GradedCounts for ArityFilter<'_> {
    fn sorts(&self) -> &SortSet {
        self.inner.sorts()
    }

    fn support(&self) -> Vec<Profile> {
        self.inner.support().into_iter().filter(|p| p.inputs.len() == self.arity).collect()
    }

    fn count(&self, p: &Profile) -> Vec<u64> {
        if p.inputs.len() == self.arity {
            self.inner.count(p)
        } else {
            Vec::new()
        }
    }
}

struct PairData {
    sig: Signature,
    in_b: Vec<bool>,
    trees: Vec<Tree>,
}

fn pair_data(a: &Signature, b: &Signature, v: usize) -> Result<PairData> {
    let (sig, in_b) = coproduct_signature(a, b)?;
    let trees = sig.sorts().sorts().flat_map(|s| enumerate_by_vertices(&sig, s, v)).collect();
    Ok(PairData { sig, in_b, trees })
}

fn decomposition_pair(a: &Signature, b: &Signature, cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let v = cfg.max_vertices;
    let PairData { sig, in_b, trees } = pair_data(a, b, v)?;
    let label = format!("A={:?} B={:?}", names(a), names(b));
    let mut essential = Vec::new();
    for tree in &trees {
        let (e, forest) = split_essential(&sig, tree, &in_b);
        let regraft = graft(&sig, &e, &forest)?;
        let ok = regraft == *tree
            && is_essential(&sig, &e, &in_b)
            && forest.iter().all(|f| f.labels().iter().all(|&op| !in_b[op]));
        t.check(ok, || format!("{label}: split/regraft fails on {}", tree.display(&sig)));
        if is_essential(&sig, tree, &in_b) {
            essential.push(tree.clone());
        }
    }
    let a_trees: Vec<Tree> = a.sorts().sorts().flat_map(|s| enumerate_by_vertices(a, s, v)).collect();
    let full = TreeCounts::new(&sig, &trees);
    let ess = TreeCounts::new(&sig, &essential);
    let qa = TreeCounts::new(a, &a_trees);
    let ops = shapes(&sig);
    let mut oracle = TreeCounter::new(&ops);
    let mut ess_oracle = TreeCounter::essential(&ops, &in_b);
    for p in Profile::all_up_to(sig.sorts(), cfg.max_arity) {
        let here = padded(full.count(&p), v + 1);
        let at = p.display(sig.sorts());
        t.eq(
            format!("{label} at {at}: |Q(A+B)| vs Q_e * Q A"),
            here.clone(),
            padded(star_count(&ess, &qa, &p, v), v + 1),
        );
        t.eq(
            format!("{label} at {at}: |Q(A+B)| vs DP"),
            here,
            oracle.up_to(p.output.0, &word(&p.inputs), v),
        );
        t.eq(
            format!("{label} at {at}: |Q_e| vs DP"),
            padded(ess.count(&p), v + 1),
            ess_oracle.up_to(p.output.0, &word(&p.inputs), v),
        );
    }
    Ok(t)
}

fn names(sig: &Signature) -> Vec<String> {
    sig.ops().iter().map(|o| format!("{}:{}", o.name, o.profile.display(sig.sorts()))).collect()
}

fn signature_pairs() -> Vec<(Signature, Signature)> {
    let mut pairs = Vec::new();
    for (a, b) in [
        (fixtures::small_single_sorted("a"), fixtures::small_single_sorted("b")),
        (fixtures::small_two_sorted("a"), fixtures::small_two_sorted("b")),
    ] {
        for x in &a {
            for y in &b {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    pairs
}

pub(crate) fn coproduct_decomposition(cfg: &Config) -> Result<Tally> {
    let pairs = signature_pairs();
    let tallies: Vec<Result<Tally>> = pairs.par_iter().map(|(a, b)| decomposition_pair(a, b, cfg)).collect();
    let mut t = Tally::default();
    for r in tallies {
        t.absorb(r?);
    }
    t.note(format!(
        "{} signature pairs, profiles up to {} leaves, up to {} vertices",
        pairs.len(),
        cfg.max_arity,
        cfg.max_vertices
    ));

    // Worked instance: A = B = one binary operation, three leaves.
    let a = Signature::single_sorted(&[("a", 2)]);
    let b = Signature::single_sorted(&[("b", 2)]);
    let PairData { sig, in_b, trees } = pair_data(&a, &b, 2)?;
    let s = Sort(0);
    let p = Profile::new(s, Arity::uniform(s, 3));
    let lhs = trees.iter().filter(|x| x.profile(&sig) == p).count() as u64;
    let essential: Vec<Tree> = trees.iter().filter(|x| is_essential(&sig, x, &in_b)).cloned().collect();
    let ess = TreeCounts::new(&sig, &essential);
    let a_trees = enumerate_by_vertices(&a, s, 2);
    let qa = TreeCounts::new(&a, &a_trees);
    let ledger: Vec<u64> = (1..=3)
        .map(|m| {
            let part = ArityFilter { inner: &ess, arity: m };
            star_count(&part, &qa, &p, 2).iter().sum()
        })
        .collect();
    let rhs: u64 = ledger.iter().sum();
    t.eq("binary/binary at 3 leaves", lhs, 8);
    t.eq("star side at 3 leaves", rhs, 8);
    t.eq("ledger by essential arity", ledger.clone(), vec![2, 2, 4]);
    t.note(format!(
        "binary/binary at 3 leaves: {lhs} = {rhs} = {}",
        ledger.iter().map(u64::to_string).collect::<Vec<_>>().join("+")
    ));
    Ok(t)
}

/// `B` with every operation renamed, to form `A ⊔ B ⊔ B`.
fn primed(b: &Signature) -> Result<Signature> {
    let ops = b
        .ops()
        .iter()
        .map(|o| Operation {
            name: format!("{}'", o.name),
            profile: o.profile.clone(),
        })
        .collect();
    Signature::new(b.sorts().clone(), ops)
}

/// Compares the two doubling relabelings on every essential tree. With
/// `broken`, both sides use the first copy of `B`.
fn doubling(a: &Signature, b: &Signature, cfg: &Config, broken: bool) -> Result<Tally> {
    let mut t = Tally::default();
    let PairData { sig, in_b, trees } = pair_data(a, b, cfg.max_vertices)?;
    let doubled = sig.disjoint_union(&primed(b)?)?;
    let shift = b.len();
    let left = |op: usize| op;
    let right = |op: usize| if in_b[op] && !broken { op + shift } else { op };
    let label = format!("A={:?} B={:?}", names(a), names(b));
    let mut fixed_per_sort = vec![0usize; sig.sorts().len()];
    for tree in trees.iter().filter(|x| is_essential(&sig, x, &in_b)) {
        let (l, r) = (tree.relabel(&left), tree.relabel(&right));
        t.check(l.validate(&doubled).is_ok() && r.validate(&doubled).is_ok(), || {
            format!("{label}: relabeling of {} is not a tree", tree.display(&sig))
        });
        let fixed = l == r;
        t.check(fixed == tree.is_trivial(), || {
            format!("{label}: {} fixed={fixed}, trivial={}", tree.display(&sig), tree.is_trivial())
        });
        if fixed {
            fixed_per_sort[tree.output(&sig).0] += 1;
        }
    }
    t.eq(format!("{label}: fixed trees per sort"), fixed_per_sort, vec![1; sig.sorts().len()]);
    Ok(t)
}

pub(crate) fn essential_equalizer(cfg: &Config) -> Result<Tally> {
    let pairs = signature_pairs();
    let tallies: Vec<Result<Tally>> = pairs.par_iter().map(|(a, b)| doubling(a, b, cfg, false)).collect();
    let mut t = Tally::default();
    for r in tallies {
        t.absorb(r?);
    }
    t.note(format!("{} signature pairs: fixed points are exactly the trivial trees", pairs.len()));
    let empty = Signature::empty(&SortSet::single());
    t.absorb(doubling(&binary(), &empty, cfg, false)?);
    t.note("empty B: every essential tree is trivial");
    let b = Signature::single_sorted(&[("b", 2)]);
    let control = doubling(&Signature::single_sorted(&[("a", 2)]), &b, cfg, true)?;
    t.check(!control.passed(), || "broken relabeling was not detected".into());
    t.note("broken relabeling detected");
    Ok(t)
}

/// All words over `sorts` of length at most `max_len`.
fn words(sorts: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .into_iter()
            .flat_map(|w: Vec<usize>| {
                (0..sorts).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// `|F A(out, w)|` within a vertex window: trees of leaf word `u` times the
/// sort-preserving maps `u → w`.
fn free_theory_size(sig: &Signature, out: usize, w: &[usize], max_v: usize) -> u64 {
    let ops = shapes(sig);
    let mut counter = TreeCounter::new(&ops);
    let max_in = ops.iter().map(|(_, i)| i.len()).max().unwrap_or(0);
    let max_leaves = 1 + max_v * max_in.saturating_sub(1);
    let mut total = 0;
    for u in words(sig.sorts().len(), max_leaves) {
        let maps: u64 = u.iter().map(|&s| w.iter().filter(|&&x| x == s).count() as u64).product();
        if maps == 0 {
            continue;
        }
        total += counter.up_to(out, &u, max_v).iter().sum::<u64>() * maps;
    }
    total
}

pub(crate) fn free_theory(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let v = cfg.max_vertices;

    for sorts in [SortSet::single(), two_sorted()] {
        let f = FreeTheory::new(&Signature::empty(&sorts), 3, v);
        for out in sorts.sorts() {
            for w in sorts.arities_up_to(3) {
                t.eq(format!("empty signature at {}", w.display(&sorts)), f.size(out, &w)?, w.count(out));
            }
        }
    }
    t.note("empty signature: the unit theory");

    let pointed = FreeTheory::new(&fixtures::pointed_signature(), 4, v);
    for n in 0..=4 {
        t.eq(format!("pointed sets at arity {n}"), pointed.size(Sort(0), &Arity::uniform(Sort(0), n))?, n + 1);
    }
    t.note("pointed sets: |T(n)| = n + 1");

    let mut fixtures = single_sorted_fixtures();
    fixtures.push(("graph", graph_signature()));
    for (name, sig) in &fixtures {
        let f = FreeTheory::new(sig, 2, v);
        for out in sig.sorts().sorts() {
            for w in sig.sorts().arities_up_to(2) {
                t.eq(
                    format!("{name} at {}<-{}", sig.sorts().name(out), w.display(sig.sorts())),
                    f.size(out, &w)? as u64,
                    free_theory_size(sig, out.0, &word(&w), v),
                );
            }
        }
    }
    t.note(format!("free theory sizes match tree counts up to {v} vertices"));

    // Grafting laws on seeded samples.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (name, sig) in &fixtures {
        let pools: Vec<Vec<Tree>> = sig.sorts().sorts().map(|s| enumerate_by_vertices(sig, s, 2)).collect();
        let pick = |rng: &mut ChaCha8Rng, s: Sort| pools[s.0].choose(rng).expect("trivial tree exists").clone();
        for _ in 0..cfg.instances {
            let s = Sort(rng.gen_range(0..sig.sorts().len()));
            let root = pick(&mut rng, s);
            let leaves: Vec<Tree> = root.leaves().0.iter().map(|&l| Tree::Leaf(l)).collect();
            t.eq(format!("{name}: right unit"), graft(sig, &root, &leaves)?, root.clone());
            t.eq(format!("{name}: left unit"), graft(sig, &Tree::Leaf(s), std::slice::from_ref(&root))?, root.clone());
            let us: Vec<Tree> = root.leaves().0.iter().map(|&l| pick(&mut rng, l)).collect();
            let mid = graft(sig, &root, &us)?;
            let vs: Vec<Tree> = mid.leaves().0.iter().map(|&l| pick(&mut rng, l)).collect();
            let lhs = graft(sig, &mid, &vs)?;
            let mut rest = vs.as_slice();
            let mut inner = Vec::new();
            for u in &us {
                let (head, tail) = rest.split_at(u.leaf_count());
                inner.push(graft(sig, u, head)?);
                rest = tail;
            }
            let rhs = graft(sig, &root, &inner)?;
            t.check(lhs == rhs, || format!("{name}: grafting not associative at {}", root.display(sig)));
        }
    }
    t.note(format!("grafting unit and associativity on {} samples per fixture", cfg.instances));

    // Universal property against small finite theories.
    let targets: Vec<(&str, Arc<dyn Theory>)> = vec![
        ("improper", fixtures::improper(2)),
        ("terminal", fixtures::terminal(2)),
        (
            "End(2)",
            Arc::new(crate::theory::EndomorphismTheory::new(
                &crate::graded::GradedSet::with_sizes(&SortSet::single(), &[2]),
                2,
            )),
        ),
    ];
    let sources: Vec<(&str, Signature)> = vec![
        ("empty", Signature::empty(&SortSet::single())),
        ("pointed", fixtures::pointed_signature()),
        ("binary", binary()),
        ("unary", Signature::single_sorted(&[("u", 1)])),
        ("pointed-binary", Signature::single_sorted(&[("c", 0), ("m", 2)])),
    ];
    let mut line = Vec::new();
    for (tn, target) in &targets {
        for (sn, sig) in &sources {
            let source: Arc<dyn Theory> = Arc::new(FreeTheory::new(sig, 2, 2));
            let found = morphisms(source.as_ref(), target.as_ref(), 2)?;
            let placements: usize = sig
                .ops()
                .iter()
                .map(|o| target.size(o.profile.output, &o.profile.inputs))
                .product::<Result<usize>>()?;
            t.eq(format!("hom(F {sn}, {tn})"), found.len(), placements);
            for images in found {
                let m = TheoryMorphism::new(source.clone(), target.clone(), images)?;
                t.law(format!("morphism F {sn} -> {tn}"), &m.check(2)?);
            }
            line.push(format!("{sn}->{tn}:{placements}"));
        }
    }
    t.note(format!("hom counts equal generator placements: {}", line.join(" ")));
    Ok(t)
}
