use std::collections::HashMap;

use super::fixtures::{self, pointed_set};
use super::oracles::binomial;
use super::{Config, Tally};
use crate::algebra::{coproduct_with_free, free_algebra, homomorphisms, Algebra, Presented};
use crate::error::Result;
use crate::graded::{GradedMap, GradedSet, Sort};
use crate::signature::Signature;
use crate::simplicial::{
    check_sfree, enumerate_surjections, free_generators, generated_mask, is_closed_subdiagram, resolution_presentation,
    DegeneracyDiagram, Delta0Diagram, LevelwiseMap, Presentation, Resolution,
};
use crate::trees::{enumerate_by_vertices, is_essential, Tree};

fn total(v: &[Vec<usize>]) -> usize {
    v.iter().map(Vec::len).sum()
}

/// Certificate, rebuild and generator counts for a diagram expected free.
fn expect_free(t: &mut Tally, label: &str, d: &DegeneracyDiagram, counts: Option<Vec<usize>>) -> Result<()> {
    match free_generators(d)? {
        Ok(cert) => {
            let (_, cmp) = cert.rebuild(d)?;
            t.check(cmp.iter().all(GradedMap::is_bijective), || format!("{label}: rebuild is not bijective"));
            if let Some(want) = counts {
                t.eq(format!("{label}: generators per level"), cert.generator_counts(), want);
            }
        }
        Err(fail) => {
            t.check(false, || format!("{label}: not free at level {}: {} {}", fail.level, fail.element, fail.reason));
        }
    }
    Ok(())
}

fn full_mask(d: &DegeneracyDiagram) -> Vec<Vec<Vec<bool>>> {
    d.levels().iter().map(|l| l.sorts().sorts().map(|s| vec![true; l.len(s)]).collect()).collect()
}

/// `Y_n = T(K_n)` with degeneracies extended from `K`, under the initial
/// algebra.
fn free_levelwise(theory: &std::sync::Arc<dyn crate::theory::Theory>, k: &DegeneracyDiagram) -> Result<(LevelwiseMap, Presentation)> {
    let top = k.truncation();
    let frees: Vec<Presented> = k.levels().iter().map(|l| free_algebra(theory, l)).collect::<Result<_>>()?;
    let units: Vec<GradedMap> = frees.iter().map(Presented::unit).collect::<Result<_>>()?;
    let initial = free_algebra(theory, &GradedSet::empty(theory.sorts()))?.algebra;
    let mut degeneracies = Vec::new();
    for n in 0..top {
        let mut row = Vec::new();
        for j in 0..=n {
            let assign = k.degeneracy(n, j).then(&units[n + 1])?;
            row.push(frees[n].induced(&frees[n + 1].algebra, &assign)?);
        }
        degeneracies.push(row);
    }
    let target: Vec<Algebra> = frees.iter().map(|f| f.algebra.clone()).collect();
    let maps = target
        .iter()
        .map(|y| homomorphisms(&initial, y).into_iter().next().ok_or_else(|| crate::error::Error::Invalid("no map from the initial algebra".into())))
        .collect::<Result<Vec<_>>>()?;
    let target_diagram = DegeneracyDiagram::new(target.iter().map(|a| a.carrier().clone()).collect(), degeneracies)?;
    let generators = units.iter().map(|u| u.domain().sorts().sorts().map(|s| u.table(s).to_vec()).collect()).collect();
    Ok((
        LevelwiseMap {
            source: vec![initial; top + 1],
            target,
            maps,
            target_diagram,
        },
        Presentation { generators },
    ))
}

/// Trees over `A_n ⊔ B` with `A_n` one binary operation per element of
/// `Δ[1]_n` and `B` one binary operation, as a degeneracy diagram acting on
/// labels. Returns the diagram and the mask of essential trees.
fn labelled_trees(truncation: usize, max_leaves: usize) -> Result<(DegeneracyDiagram, Vec<Vec<Vec<bool>>>)> {
    let simplex = DegeneracyDiagram::standard_simplex(1, truncation);
    let s = Sort(0);
    let mut sigs = Vec::new();
    let mut trees = Vec::new();
    let mut index = Vec::new();
    for n in 0..=truncation {
        let names: Vec<String> = simplex.level(n).names(s).iter().map(|x| format!("a{x}")).collect();
        let mut ops: Vec<(&str, usize)> = names.iter().map(|x| (x.as_str(), 2)).collect();
        ops.push(("b", 2));
        let sig = Signature::single_sorted(&ops);
        let list = enumerate_by_vertices(&sig, s, max_leaves.saturating_sub(1));
        let lookup: HashMap<Tree, usize> = list.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        sigs.push(sig);
        trees.push(list);
        index.push(lookup);
    }
    let levels: Vec<GradedSet> = (0..=truncation)
        .map(|n| GradedSet::from_names(trees[n].iter().map(|t| t.display(&sigs[n]))))
        .collect::<Result<_>>()?;
    let mut degeneracies = Vec::new();
    for n in 0..truncation {
        let mut row = Vec::new();
        for j in 0..=n {
            let d = simplex.degeneracy(n, j);
            let b_here = simplex.level(n).len(s);
            let b_next = simplex.level(n + 1).len(s);
            let relabel = |op: usize| if op == b_here { b_next } else { d.apply(s, op) };
            let table = trees[n].iter().map(|t| index[n + 1][&t.relabel(&relabel)]).collect();
            row.push(GradedMap::new(levels[n].clone(), levels[n + 1].clone(), vec![table])?);
        }
        degeneracies.push(row);
    }
    let mask = (0..=truncation)
        .map(|n| {
            let in_b: Vec<bool> = (0..sigs[n].len()).map(|op| op + 1 == sigs[n].len()).collect();
            vec![trees[n].iter().map(|t| is_essential(&sigs[n], t, &in_b)).collect()]
        })
        .collect();
    Ok((DegeneracyDiagram::new(levels, degeneracies)?, mask))
}

pub(crate) fn degeneracy_freeness(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let top = cfg.truncation;
    let deep = top.max(4);

    for n in 0..=deep {
        for m in 0..=n {
            t.eq(format!("surjections [{n}]->[{m}]"), enumerate_surjections(n, m).len() as u64, binomial(n, m));
        }
    }

    for k in 0..=2 {
        for pointed in [false, true] {
            let d0 = if pointed {
                Delta0Diagram::pointed_simplex(k, deep)
            } else {
                Delta0Diagram::standard_simplex(k, deep)
            };
            let label = format!("{}[{k}]", if pointed { "pointed simplex" } else { "simplex" });
            t.law(format!("{label}: identities"), &d0.check_identities());
            let counts: Vec<usize> = (0..=deep)
                .map(|n| if pointed { binomial(k, n) } else { binomial(k + 1, n + 1) } as usize)
                .collect();
            let nondeg: Vec<usize> = (0..=deep).map(|n| total(&d0.diagram.nondegenerate(n))).collect();
            t.eq(format!("{label}: nondegenerate counts"), nondeg, counts.clone());
            expect_free(&mut t, &label, &d0.diagram, Some(counts))?;
        }
    }
    t.note(format!("simplices and pointed simplices [k], k <= 2: identities and freeness up to level {deep}"));

    let pair = pointed_set(&fixtures::pointed(2), &["a", "b"], 0);
    let r = Resolution::new(&pair, top)?;
    let d0 = r.delta0(top)?;
    let sizes: Vec<usize> = d0.diagram.levels().iter().map(GradedSet::total_len).collect();
    t.eq("resolution level sizes", sizes.clone(), (0..=top).map(|n| n + 2).collect());
    t.law("resolution: identities", &d0.check_identities());
    expect_free(&mut t, "resolution", &d0.diagram, None)?;
    t.note(format!("standard resolution of a pointed pair: sizes {sizes:?}, free at truncation {top}"));

    // Closure criterion.
    let simplex = DegeneracyDiagram::standard_simplex(2, top);
    t.check(is_closed_subdiagram(&simplex, &full_mask(&simplex)).closed, || "whole diagram not closed".into());
    let mut generated = 0;
    for n in 0..=top {
        for &i in &simplex.nondegenerate(n)[0] {
            let mask = generated_mask(&simplex, &[(n, Sort(0), i)]);
            let v = is_closed_subdiagram(&simplex, &mask);
            t.check(v.subdiagram && v.closed, || format!("generated by {} is not closed", simplex.level(n).name(Sort(0), i)));
            let (sub, _) = simplex.subdiagram(&mask)?;
            expect_free(&mut t, "generated subdiagram", &sub, None)?;
            generated += 1;
        }
    }
    // Gluing happens at level 2, so the line needs at least that much.
    let line = DegeneracyDiagram::standard_simplex(1, top.max(2));
    let mut bad = generated_mask(&line, &[(0, Sort(0), 0)]);
    let e = line.level(1).index_of(Sort(0), "11").expect("degenerate edge");
    bad[1][0][e] = true;
    let v = is_closed_subdiagram(&line, &bad);
    t.check(!v.closed && v.witness.is_some(), || "degenerate edge without its vertex accepted".into());
    t.note(format!("closure: {generated} generated subdiagrams accepted, one negative control rejected"));

    let a = line.level(2).index_of(Sort(0), "001").expect("element");
    let b = line.level(2).index_of(Sort(0), "011").expect("element");
    let glued = line.glue(&[(2, Sort(0), a, b)])?;
    t.law("glued diagram: functoriality", &glued.check_functoriality());
    t.check(free_generators(&glued)?.is_err(), || "glued diagram reported free".into());
    t.note("glued degeneracies are not free");

    // s-free maps.
    let (f, p) = resolution_presentation(&pair, top)?;
    let v = check_sfree(&f, Some(&p))?;
    t.check(v.passed(), || format!("resolution is not s-free: {:?}", v.witness));

    let k = GradedSet::from_names(["k"])?;
    let c = coproduct_with_free(&pair, &k)?;
    let free_k = free_algebra(pair.theory(), &k)?;
    let gen = c.injections[1].apply(Sort(0), free_k.unit()?.apply(Sort(0), 0));
    let y = c.algebra().clone();
    let constant = LevelwiseMap {
        source: vec![pair.clone(); top + 1],
        target: vec![y.clone(); top + 1],
        maps: vec![c.injections[0].clone(); top + 1],
        target_diagram: DegeneracyDiagram::constant(y.carrier(), top),
    };
    let v = check_sfree(&constant, Some(&Presentation { generators: vec![vec![vec![gen]]; top + 1] }))?;
    t.check(v.passed(), || format!("constant X + T(K) is not s-free: {:?}", v.witness));

    let theory = fixtures::pointed(2);
    let (f, p) = free_levelwise(&theory, &line)?;
    let v = check_sfree(&f, Some(&p))?;
    t.check(v.passed(), || format!("T(simplex[1]) is not s-free: {:?}", v.witness));
    let (f, p) = free_levelwise(&theory, &glued)?;
    let v = check_sfree(&f, Some(&p))?;
    t.check(!v.passed() && !v.free, || "T(glued) accepted as s-free".into());
    t.note("s-free: resolution, constant and T(simplex[1]) accepted; T(glued) rejected");

    // Essential trees over A_n + B form a closed, free subdiagram.
    let (q, mask) = labelled_trees(top, cfg.max_arity)?;
    t.law("labelled trees: functoriality", &q.check_functoriality());
    expect_free(&mut t, "labelled trees", &q, None)?;
    let v = is_closed_subdiagram(&q, &mask);
    t.check(v.subdiagram && v.closed, || format!("essential trees not closed: {:?}", v.witness));
    let (sub, _) = q.subdiagram(&mask)?;
    expect_free(&mut t, "essential trees", &sub, None)?;
    let sizes: Vec<usize> = sub.levels().iter().map(GradedSet::total_len).collect();
    t.note(format!("essential trees over A_n + B: closed and free, level sizes {sizes:?}"));
    Ok(t)
}
