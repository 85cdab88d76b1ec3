use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixtures::{self, binary, graph_signature, two_sorted};
use super::oracles::{class_count, components, free_series_sizes};
use super::tree_checks::shapes;
use super::{Config, Tally};
use crate::error::Result;
use crate::graded::{reflexive_coequalizer, Arity, ArityMorphism, GradedMap, GradedSet, Sort, SortSet};
use crate::series::{
    check_functoriality, compose, delta, evaluate_by_coequalizer, fiber, star_product_with_elements, Evaluation,
    FreeSeries, Series, StarElement, TabulatedSeries, UnitSeries,
};
use crate::signature::{Operation, Signature};
use crate::theory::TheorySeries;
use crate::trees::Tree;

fn renamed(sig: &Signature, prefix: &str) -> Signature {
    let ops = sig
        .ops()
        .iter()
        .enumerate()
        .map(|(i, o)| Operation {
            name: format!("{prefix}{}", i + 1),
            profile: o.profile.clone(),
        })
        .collect();
    Signature::new(sig.sorts().clone(), ops).expect("renaming keeps names distinct")
}

fn corolla_with(op: usize, children: Vec<Tree>) -> Tree {
    Tree::Node { op, children }
}

fn leaves_of(sig: &Signature, op: usize) -> Vec<Tree> {
    sig.op(op).profile.inputs.0.iter().map(|&s| Tree::Leaf(s)).collect()
}

/// `(A*B)*C` and `A*(B*C)` as sets of three-level trees over `A ⊔ B ⊔ C`.
fn associativity(a: &Signature, b: &Signature, c: &Signature, t: &mut Tally) -> Result<usize> {
    let abc = a.disjoint_union(b)?.disjoint_union(c)?;
    let (ob, oc) = (a.len(), a.len() + b.len());
    let (ab, ab_el) = star_product_with_elements(a, b)?;
    let (_, left_el) = star_product_with_elements(&ab, c)?;
    let (bc, bc_el) = star_product_with_elements(b, c)?;
    let (_, right_el) = star_product_with_elements(a, &bc)?;
    let c_tree = |k: usize| corolla_with(oc + k, leaves_of(c, k));

    let mut left = Vec::new();
    for StarElement { outer, inner, .. } in &left_el {
        let StarElement { outer: a_op, inner: bs, .. } = &ab_el[*outer];
        let mut cs = inner.iter();
        let children = bs
            .iter()
            .map(|&bo| corolla_with(ob + bo, cs.by_ref().take(b.op(bo).profile.inputs.len()).map(|&k| c_tree(k)).collect()))
            .collect();
        left.push(corolla_with(*a_op, children));
    }
    let mut right = Vec::new();
    for StarElement { outer, inner, .. } in &right_el {
        let children = inner
            .iter()
            .map(|&bco| {
                let StarElement { outer: bo, inner: cs, .. } = &bc_el[bco];
                corolla_with(ob + bo, cs.iter().map(|&k| c_tree(k)).collect())
            })
            .collect();
        right.push(corolla_with(*outer, children));
    }
    for tree in left.iter().chain(&right) {
        t.check(tree.validate(&abc).is_ok(), || format!("ill-formed triple tree {tree:?}"));
    }
    let (ls, rs): (BTreeSet<_>, BTreeSet<_>) = (left.iter().cloned().collect(), right.iter().cloned().collect());
    t.eq("(A*B)*C injective", ls.len(), left.len());
    t.eq("A*(B*C) injective", rs.len(), right.len());
    t.check(ls == rs, || {
        let odd = ls.symmetric_difference(&rs).next().expect("sets differ");
        format!("associativity: {} appears on one side only", odd.display(&abc))
    });
    Ok(left.iter().map(Tree::leaf_count).max().unwrap_or(0))
}

fn units(a: &Signature, t: &mut Tally) -> Result<()> {
    let d = delta(a.sorts());
    let (right, right_el) = star_product_with_elements(a, &d)?;
    let (left, left_el) = star_product_with_elements(&d, a)?;
    for (sig, els, from_outer) in [(&right, &right_el, true), (&left, &left_el, false)] {
        let images: Vec<usize> = els.iter().map(|e| if from_outer { e.outer } else { e.inner[0] }).collect();
        let distinct: BTreeSet<usize> = images.iter().copied().collect();
        t.eq("unit map is bijective", (images.len(), distinct.len()), (a.len(), a.len()));
        for (op, &img) in images.iter().enumerate() {
            t.eq("unit map keeps profiles", &sig.op(op).profile, &a.op(img).profile);
        }
    }
    Ok(())
}

fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// The comparison `S(A*B)(X) → S A(S B(X))`, checked to be a bijection.
fn composite_evaluation(a: &Signature, b: &Signature, x: &GradedSet, t: &mut Tally) -> Result<()> {
    let (ab, elements) = star_product_with_elements(a, b)?;
    let (sab, sa, sb) = (FreeSeries::new(&ab), FreeSeries::new(a), FreeSeries::new(b));
    let ev = sab.evaluate(x)?;
    let ev_b = sb.evaluate(x)?;
    let ev_a = sa.evaluate(&ev_b.set)?;
    let sizes = x.sizes();
    let inner = free_series_sizes(&shapes(b), sizes.len(), &sizes);
    let inner: Vec<usize> = inner.iter().map(|&n| n as usize).collect();
    let want = free_series_sizes(&shapes(a), sizes.len(), &inner);
    let got: Vec<u64> = ev.set.sizes().iter().map(|&n| n as u64).collect();
    t.eq(format!("|S(A*B)(X)| at X={sizes:?}"), got, want.clone());
    let got_a: Vec<u64> = ev_a.set.sizes().iter().map(|&n| n as u64).collect();
    t.eq(format!("|S A(S B(X))| at X={sizes:?}"), got_a, want);
    for out in x.sorts().sorts() {
        let mut seen = BTreeSet::new();
        for class in 0..ev.set.len(out) {
            let rep = ev.rep(out, class);
            let (op, _) = sab.decode(out, &rep.arity, rep.element);
            let e = &elements[op];
            let g = &a.op(e.outer).profile.inputs;
            let mut classes = Vec::with_capacity(g.len());
            for (k, &bo) in e.inner.iter().enumerate() {
                let positions = fiber(&e.h, k);
                let w = &b.op(bo).profile.inputs;
                let xs: Vec<usize> = positions.iter().map(|&i| rep.tuple[i]).collect();
                let elem = sb.encode(g.0[k], w, bo, &identity_map(w.len()));
                classes.push(sb.class_in(&ev_b, g.0[k], w, elem, &xs)?);
            }
            let elem = sa.encode(out, g, e.outer, &identity_map(g.len()));
            seen.insert(sa.class_in(&ev_a, out, g, elem, &classes)?);
        }
        t.eq(
            format!("comparison injective at sort {} of X={sizes:?}", out.0),
            seen.len(),
            ev.set.len(out),
        );
    }
    Ok(())
}

fn small_sets(sorts: &SortSet) -> Vec<GradedSet> {
    let sizes: Vec<Vec<usize>> = if sorts.is_single() {
        (0..=3).map(|n| vec![n]).collect()
    } else {
        vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 1], vec![1, 2], vec![0, 3]]
    };
    sizes.iter().map(|s| GradedSet::with_sizes(sorts, s)).collect()
}

pub(crate) fn star_monoid(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let single = fixtures::small_single_sorted("s");
    let two = fixtures::small_two_sorted("s");
    let mut triples = vec![(binary(), binary(), binary())];
    for (fam, step) in [(&single, 3usize), (&two, 5usize)] {
        for i in 0..fam.len() {
            triples.push((fam[i].clone(), fam[(i + step) % fam.len()].clone(), fam[(i + 2 * step + 1) % fam.len()].clone()));
        }
    }
    let mut widest = 0;
    for (a, b, c) in &triples {
        let (a, b, c) = (renamed(a, "a"), renamed(b, "b"), renamed(c, "c"));
        widest = widest.max(associativity(&a, &b, &c, &mut t)?);
        units(&a, &mut t)?;
    }
    t.note(format!("unit and associativity bijections on {} triples, arities up to {widest}", triples.len()));

    let mut pairs = 0;
    for fam in [&single, &two] {
        for (i, a) in fam.iter().enumerate() {
            for b in fam.iter().skip(i % 3).step_by(3) {
                let (a, b) = (renamed(a, "a"), renamed(b, "b"));
                let prod = star_product_with_elements(&a, &b)?.0;
                if prod.max_arity() > cfg.max_arity {
                    continue;
                }
                for x in small_sets(a.sorts()) {
                    composite_evaluation(&a, &b, &x, &mut t)?;
                }
                pairs += 1;
            }
        }
    }
    t.note(format!("S(A*B)(X) = S A(S B(X)) by explicit bijection on {pairs} pairs, |X| <= 3"));
    Ok(t)
}

/// The identity tuple of a representable: position `k` goes to its
/// occurrence index among the positions of the same sort.
fn identity_tuple(w: &Arity) -> Vec<usize> {
    (0..w.len()).map(|k| w.0[..k].iter().filter(|&&s| s == w.0[k]).count()).collect()
}

fn bijective_classes<S: Series + ?Sized>(a: &S, ev: &Evaluation, out: Sort, w: &Arity) -> Result<bool> {
    let id = identity_tuple(w);
    let n = a.size(out, w)?;
    let classes: BTreeSet<usize> = (0..n).map(|e| a.class_in(ev, out, w, e, &id)).collect::<Result<_>>()?;
    Ok(classes.len() == n && n == ev.set.len(out))
}

pub(crate) fn kan_evaluation(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    for sorts in [SortSet::single(), two_sorted()] {
        let unit = UnitSeries::new(&sorts);
        let tab = TabulatedSeries::from_series(&unit, 3)?;
        for x in small_sets(&sorts) {
            for (how, ev) in [("closed form", unit.evaluate(&x)?), ("coequalizer", tab.evaluate(&x)?)] {
                t.eq(format!("|Unit(X)| by {how}"), ev.set.sizes(), x.sizes());
                for s in sorts.sorts() {
                    let w = Arity(vec![s]);
                    let img: BTreeSet<usize> = if how == "closed form" {
                        (0..x.len(s)).map(|i| unit.class_in(&ev, s, &w, 0, &[i])).collect::<Result<_>>()?
                    } else {
                        (0..x.len(s)).map(|i| tab.class_in(&ev, s, &w, 0, &[i])).collect::<Result<_>>()?
                    };
                    t.eq(format!("X -> Unit(X) by {how} injective"), img.len(), x.len(s));
                }
            }
        }
    }
    t.note("Unit(X) = X by closed form and by coequalizer");

    let single = SortSet::single();
    let improper = fixtures::improper(3);
    let mut series: Vec<(&str, Box<dyn Series>)> = vec![
        ("free binary", Box::new(FreeSeries::new(&binary()))),
        ("free graph", Box::new(FreeSeries::new(&graph_signature()))),
        (
            "tabulated pointed-binary",
            Box::new(TabulatedSeries::from_series(
                &FreeSeries::new(&Signature::single_sorted(&[("c", 0), ("m", 2)])),
                3,
            )?),
        ),
        ("improper values", Box::new(TabulatedSeries::from_series(&TheorySeries::new(improper.as_ref()), 3)?)),
        (
            "composite",
            Box::new(compose(&FreeSeries::new(&binary()), &FreeSeries::new(&Signature::single_sorted(&[("u", 1)])), 3)?),
        ),
    ];
    series.push(("unit", Box::new(TabulatedSeries::from_series(&UnitSeries::new(&single), 3)?)));
    for (name, a) in &series {
        let max = if a.domain().is_single() { 3 } else { 2 };
        for w in a.domain().arities_up_to(max) {
            let x = GradedSet::representable(a.domain(), &w);
            let ev = a.evaluate(&x)?;
            let coeq = evaluate_by_coequalizer(a.as_ref(), &x)?;
            t.eq(format!("{name}: evaluation vs coequalizer sizes"), ev.set.sizes(), coeq.set.sizes());
            for out in a.codomain().sorts() {
                let ok = bijective_classes(a.as_ref(), &ev, out, &w)?;
                t.check(ok, || format!("{name}: A(X_w) != A(w) at w={}", w.display(a.domain())));
            }
        }
    }
    t.note(format!("{} series agree with their tables on representables", series.len()));

    let ev = TabulatedSeries::from_series(&TheorySeries::new(improper.as_ref()), 3)?;
    let sizes: Vec<usize> = (0..=3)
        .map(|n| ev.evaluate(&GradedSet::with_sizes(&single, &[n])).map(|e| e.set.total_len()))
        .collect::<Result<_>>()?;
    t.eq("improper values at 0..3 points", sizes, vec![0, 1, 1, 1]);

    for sig in [binary(), graph_signature(), Signature::single_sorted(&[("c", 0), ("m", 2)])] {
        let free = FreeSeries::new(&sig);
        for x in small_sets(sig.sorts()) {
            let closed = free.evaluate(&x)?;
            let coeq = evaluate_by_coequalizer(&free, &x)?;
            let oracle: Vec<usize> = free_series_sizes(&shapes(&sig), sig.sorts().len(), &x.sizes())
                .into_iter()
                .map(|n| n as usize)
                .collect();
            t.eq("free series: closed form vs oracle", closed.set.sizes(), oracle.clone());
            t.eq("free series: coequalizer vs oracle", coeq.set.sizes(), oracle);
        }
    }
    t.note("free series: closed form = coequalizer = sum of powers");

    let pairs = [
        (binary(), binary()),
        (Signature::single_sorted(&[("c", 0), ("m", 2)]), Signature::single_sorted(&[("u", 1)])),
    ];
    for (a, b) in &pairs {
        let (sa, sb) = (FreeSeries::new(a), FreeSeries::new(b));
        let comp = compose(&sa, &sb, 3)?;
        for x in small_sets(a.sorts()) {
            let nested = sa.evaluate(&sb.evaluate(&x)?.set)?;
            t.eq("evaluate(A.B) vs A(B(X))", comp.evaluate(&x)?.set.sizes(), nested.set.sizes());
        }
    }
    let g = FreeSeries::new(&graph_signature());
    let comp = compose(&g, &g, 2)?;
    for x in small_sets(&two_sorted()).into_iter().filter(|x| x.total_len() <= 2) {
        let nested = g.evaluate(&g.evaluate(&x)?.set)?;
        t.eq("graph: evaluate(A.B) vs A(B(X))", comp.evaluate(&x)?.set.sizes(), nested.set.sizes());
    }
    t.note("composites evaluate to nested evaluations");
    let _ = cfg;
    Ok(t)
}

/// Random reflexive pair `f, g: X ⇉ Y` with section `s`: `X = Y ⊔ E`,
/// both maps the identity on `Y`.
struct Instance {
    f: GradedMap,
    g: GradedMap,
    s: GradedMap,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let sorts = if rng.gen_bool(0.5) { SortSet::single() } else { two_sorted() };
    let ny: Vec<usize> = sorts.sorts().map(|_| rng.gen_range(1..=5 / sorts.len())).collect();
    let ne: Vec<usize> = sorts.sorts().map(|_| rng.gen_range(0..=3)).collect();
    let y = GradedSet::with_sizes(&sorts, &ny);
    let xs: Vec<usize> = ny.iter().zip(&ne).map(|(a, b)| a + b).collect();
    let x = GradedSet::with_sizes(&sorts, &xs);
    let mut tables = [Vec::new(), Vec::new()];
    for table in &mut tables {
        *table = sorts
            .sorts()
            .map(|s| (0..xs[s.0]).map(|i| if i < ny[s.0] { i } else { rng.gen_range(0..ny[s.0]) }).collect())
            .collect();
    }
    let [tf, tg] = tables;
    Instance {
        f: GradedMap::new(x.clone(), y.clone(), tf).expect("valid"),
        g: GradedMap::new(x.clone(), y.clone(), tg).expect("valid"),
        s: GradedMap::from_fn(&y, &x, |_, i| i).expect("valid"),
    }
}

/// `m × Z` for a finite set `Z` of `nz` elements, pairs ordered `(a, z)`.
fn times(m: &GradedMap, z: &[String]) -> GradedMap {
    let nz = z.len();
    let (d, c) = (m.domain().times(z), m.codomain().times(z));
    GradedMap::from_fn(&d, &c, |s, i| m.apply(s, i / nz) * nz + i % nz).expect("valid")
}

/// Checks `coeq(f×Z, g×Z) ≅ coeq(f, g) × Z` by the comparison map, which
/// must be well defined, bijective and natural. `corrupt` swaps two values
/// of the comparison.
fn coeq_instance(inst: &Instance, nz: usize, corrupt: bool) -> Result<Tally> {
    let mut t = Tally::default();
    let z: Vec<String> = (0..nz).map(|i| format!("z{i}")).collect();
    let (q, p) = reflexive_coequalizer(&inst.f, &inst.g, &inst.s)?;
    let (qz, pz) = reflexive_coequalizer(&times(&inst.f, &z), &times(&inst.g, &z), &times(&inst.s, &z))?;
    let y = inst.f.codomain();
    for s in y.sorts().sorts() {
        let pairs: Vec<(usize, usize)> = inst.f.table(s).iter().zip(inst.g.table(s)).map(|(&a, &b)| (a, b)).collect();
        let oracle = components(y.len(s), &pairs);
        t.eq("coequalizer size vs components", q.len(s), class_count(&oracle));
        t.eq("coequalizer of products size", qz.len(s), class_count(&oracle) * nz);
        for a in 0..y.len(s) {
            for b in 0..y.len(s) {
                t.check((p.apply(s, a) == p.apply(s, b)) == (oracle[a] == oracle[b]), || {
                    format!("partition differs at {a},{b}")
                });
            }
        }
        // phi: coeq(f×Z, g×Z) → coeq(f,g) × Z, read off from representatives.
        let mut phi = vec![usize::MAX; qz.len(s)];
        for e in 0..y.len(s) * nz {
            let c = pz.apply(s, e);
            if phi[c] == usize::MAX {
                phi[c] = p.apply(s, e / nz) * nz + e % nz;
            }
        }
        if corrupt && phi.len() >= 2 {
            phi.swap(0, 1);
        }
        let distinct: BTreeSet<usize> = phi.iter().copied().collect();
        t.check(distinct.len() == phi.len() && phi.len() == q.len(s) * nz, || "comparison not bijective".into());
        for e in 0..y.len(s) * nz {
            let want = p.apply(s, e / nz) * nz + e % nz;
            t.check(phi[pz.apply(s, e)] == want, || format!("comparison not natural at element {e}"));
        }
    }
    Ok(t)
}

pub(crate) fn coeq_products(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let single = SortSet::single();
    let y = GradedSet::with_sizes(&single, &[3]);
    let id = GradedMap::identity(&y);
    let trivial = Instance {
        f: id.clone(),
        g: id.clone(),
        s: id,
    };
    t.absorb(coeq_instance(&trivial, 2, false)?);
    t.note("identity instance");

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut control = None;
    for _ in 0..cfg.instances {
        let inst = random_instance(&mut rng);
        let nz = rng.gen_range(1..=3);
        t.absorb(coeq_instance(&inst, nz, false)?);
        if control.is_none() && nz >= 2 {
            control = Some((inst, nz));
        }
    }
    t.note(format!("{} seeded instances, |Y| <= 5, |Z| <= 3", cfg.instances));
    if let Some((inst, nz)) = control {
        let bad = coeq_instance(&inst, nz, true)?;
        t.check(!bad.passed(), || "corrupted comparison was accepted".into());
        t.note("corrupted comparison rejected");
    }
    Ok(t)
}

pub(crate) fn functoriality(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let single = SortSet::single();
    let improper = fixtures::improper(3);
    let bound = cfg.truncation.min(3);
    t.law("unit", &check_functoriality(&UnitSeries::new(&single), bound)?);
    t.law("unit two-sorted", &check_functoriality(&UnitSeries::new(&two_sorted()), 2)?);
    t.law("free binary", &check_functoriality(&FreeSeries::new(&binary()), bound)?);
    t.law("free graph", &check_functoriality(&FreeSeries::new(&graph_signature()), 2)?);
    t.law("improper values", &check_functoriality(&TheorySeries::new(improper.as_ref()), bound)?);
    let comp = compose(&FreeSeries::new(&binary()), &FreeSeries::new(&binary()), 2)?;
    t.law("binary . binary", &check_functoriality(&comp, 2)?);
    t.note("unit, free, theory and composite series are functors");

    let mut broken = TabulatedSeries::from_series(&FreeSeries::new(&binary()), 2)?;
    let w = Arity::uniform(Sort(0), 2);
    broken.set_action(Sort(0), &ArityMorphism::identity(&w), 0, 1)?;
    let r = check_functoriality(&broken, 2)?;
    t.check(!r.passed(), || "corrupted identity action was accepted".into());
    t.note("corrupted table rejected");
    Ok(t)
}
