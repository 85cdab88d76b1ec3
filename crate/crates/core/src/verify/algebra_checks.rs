use std::collections::BTreeSet;
use std::sync::Arc;

use super::fixtures::{self, map, pointed_set};
use super::oracles::{all_structures, equalized_elements, functions, pushout_size, RawAlgebra};
use super::{Config, Tally};
use crate::algebra::{
    coproduct, effective_mono, enumerate_algebras, free_algebra, homomorphisms, induct, relative_composition, restrict,
    structures_on, undercategory_theory, Algebra, Bar, Bimodule,
};
use crate::error::Result;
use crate::graded::{Arity, GradedMap, GradedSet, Sort, SortSet};
use crate::theory::{
    check_clone_laws, endomorphism_theory_of_map, morphisms, EndomorphismTheory, FiniteTheory, FreeTheory, Theory,
    TheoryMorphism,
};

/// A single-sorted algebra as raw tables for the oracle.
fn raw(a: &Algebra) -> RawAlgebra {
    RawAlgebra {
        size: a.carrier().total_len(),
        arities: a.generators().iter().map(|g| g.inputs.len()).collect(),
        tables: (0..a.generators().len()).map(|g| a.table(g).to_vec()).collect(),
    }
}

fn set(n: usize) -> GradedSet {
    GradedSet::with_sizes(&SortSet::single(), &[n])
}

/// Effectiveness by unfolding the definition: the elements equalized by all
/// pairs of homomorphisms agreeing on the image are exactly the image.
fn oracle_effective(y: &RawAlgebra, f: &[usize], tests: &[RawAlgebra]) -> bool {
    let injective = f.iter().collect::<BTreeSet<_>>().len() == f.len();
    let image: BTreeSet<usize> = f.iter().copied().collect();
    let equalized: BTreeSet<usize> = equalized_elements(y, f, tests).into_iter().collect();
    injective && equalized == image
}

fn pointed_tests(max: usize) -> Vec<RawAlgebra> {
    (1..=max).flat_map(|n| all_structures(n, &[0], &|_| true)).collect()
}

pub(crate) fn improper_example(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let theory = fixtures::improper(cfg.max_carrier.max(3));
    let (algs, raw_count) = enumerate_algebras(&theory, 3)?;
    t.eq("algebras on carriers <= 3", algs.len(), 2);
    t.eq("structures before iso reduction", raw_count, 2);
    let mut carriers: Vec<usize> = algs.iter().map(|a| a.carrier().total_len()).collect();
    carriers.sort();
    t.eq("carrier sizes", carriers, vec![0, 1]);

    // Unit law by hand: T(0) is empty, T(n) is one element equal to every
    // projection, so a structure map must send it to every point at once.
    let oracle: usize = (0..=3usize)
        .map(|n| {
            let values = usize::from(n > 0);
            functions(values, n).iter().filter(|psi| psi.iter().all(|&v| (0..n).all(|k| v == k))).count()
        })
        .sum();
    t.eq("structures by unit-law unfolding", raw_count, oracle);
    t.note(format!("exactly {} algebras: the empty set and the point", algs.len()));

    for (n, want) in [(0, 0), (1, 1), (2, 1)] {
        let free = free_algebra(&theory, &set(n))?;
        t.eq(format!("free algebra on {n} points"), free.algebra.carrier().total_len(), want);
    }
    let empty = algs.iter().find(|a| a.carrier().is_empty()).expect("empty algebra").clone();
    let point = algs.iter().find(|a| a.carrier().total_len() == 1).expect("point algebra").clone();
    t.eq("* + *", coproduct(&[&point, &point])?.algebra().carrier().total_len(), 1);

    let f = GradedMap::new(empty.carrier().clone(), point.carrier().clone(), vec![vec![]])?;
    let v = effective_mono(&empty, &point, &f)?;
    t.check(v.mono, || "empty map is not injective".into());
    t.check(!v.effective, || "empty map reported effective".into());
    t.check(v.witness.is_some(), || "no witness for the non-effective mono".into());
    let tests = [raw(&empty), raw(&point)];
    t.eq("oracle verdict for the empty map", oracle_effective(&raw(&point), &[], &tests), v.effective);
    t.note(format!(
        "empty -> point: mono, not effective ({})",
        v.witness.clone().unwrap_or_default()
    ));
    let id = GradedMap::identity(point.carrier());
    let vi = effective_mono(&point, &point, &id)?;
    t.check(vi.effective, || "identity of the point is not effective".into());
    t.eq("oracle verdict for the identity", oracle_effective(&raw(&point), &[0], &tests), vi.effective);

    // Pointed sets: T(K) -> T(K + L) is effective.
    let pointed = fixtures::pointed(2);
    let k = GradedSet::from_names(["k"])?;
    let kl = GradedSet::from_names(["k", "l"])?;
    let tk = free_algebra(&pointed, &k)?;
    let tkl = free_algebra(&pointed, &kl)?;
    let unit = tkl.unit()?;
    let assign = GradedMap::new(k.clone(), tkl.algebra.carrier().clone(), vec![vec![unit.apply(Sort(0), 0)]])?;
    let inc = tk.induced(&tkl.algebra, &assign)?;
    let vp = effective_mono(&tk.algebra, &tkl.algebra, &inc)?;
    t.check(vp.effective, || "T(K) -> T(K+L) not effective for pointed sets".into());
    let oracle = oracle_effective(&raw(&tkl.algebra), inc.table(Sort(0)), &pointed_tests(4));
    t.eq("oracle verdict for T(K) -> T(K+L)", oracle, vp.effective);
    t.note("pointed sets: T(K) -> T(K+L) is effective");
    Ok(t)
}

pub(crate) fn effective_mono_check(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let pointed = fixtures::pointed(2);
    let max = cfg.max_carrier.min(3);
    let mut cases = 0;
    for nx in 1..=max {
        for ny in 1..=max {
            let x = pointed_set(&pointed, &names("x", nx), 0);
            let y = pointed_set(&pointed, &names("y", ny), 0);
            let tests = pointed_tests(2 * ny);
            for f in homomorphisms(&x, &y) {
                let v = effective_mono(&x, &y, &f)?;
                let oracle = oracle_effective(&raw(&y), f.table(Sort(0)), &tests);
                t.eq(format!("pointed {nx} -> {ny} via {:?}", f.table(Sort(0))), v.effective, oracle);
                t.eq("mono iff injective", v.mono, f.is_injective());
                cases += 1;
            }
        }
    }
    t.note(format!("{cases} pointed-set maps agree with the equalizer oracle"));

    let theory = fixtures::improper(3);
    let algs = [
        Algebra::from_fn(theory.clone(), set(0), |_, _| 0)?,
        Algebra::from_fn(theory.clone(), set(1), |_, _| 0)?,
    ];
    let tests: Vec<RawAlgebra> = algs.iter().map(raw).collect();
    for x in &algs {
        for y in &algs {
            for f in homomorphisms(x, y) {
                let v = effective_mono(x, y, &f)?;
                t.eq("improper verdict", v.effective, oracle_effective(&raw(y), f.table(Sort(0)), &tests));
            }
        }
    }
    t.note("improper theory: all maps agree");
    Ok(t)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub(crate) fn bar_construction(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let pointed = fixtures::pointed(2);
    let fixtures: [(usize, usize, usize, Vec<usize>, Vec<usize>); 3] = [
        (2, 2, 3, vec![0, 1], vec![0, 2]),
        (1, 2, 2, vec![0, 0], vec![0, 1]),
        (3, 1, 2, vec![0], vec![0]),
    ];
    for (nx, nu, nv, f, g) in fixtures {
        let (xn, un, vn) = (names("x", nx), names("u", nu), names("v", nv));
        let x = pointed_set(&pointed, &xn, 0);
        let u = pointed_set(&pointed, &un, 0);
        let v = pointed_set(&pointed, &vn, 0);
        let (fm, gm) = (map(&u, &x, &f), map(&u, &v, &g));
        let bar = Bar::new(x, u, v, fm, gm)?;
        let label = format!("X={nx} U={nu} V={nv} f={f:?} g={g:?}");
        let mut sizes = Vec::new();
        for n in 0..=cfg.truncation {
            let size = bar.level(n)?.algebra().carrier().total_len();
            t.eq(format!("{label}: |B_{n}|"), size, nx + nv + n * nu - (n + 1));
            sizes.push(size);
        }
        t.law(format!("{label}: simplicial identities"), &bar.check_identities(cfg.truncation)?);
        let (q, p, ok) = bar.augmentation()?;
        let oracle = pushout_size(nx, nv, &f, &g);
        t.eq(format!("{label}: coequalizer of d0,d1"), q, oracle);
        t.eq(format!("{label}: pushout"), p, oracle);
        t.check(ok, || format!("{label}: comparison with the pushout is not bijective"));
        t.note(format!("{label}: level sizes {sizes:?}, augmentation {q} = {p}"));
    }
    Ok(t)
}

/// Finite theories tabulated one arity above the carrier bound, so that
/// free algebras on carriers of that size (one extra basepoint) fit.
fn finite_theories(max: usize) -> Result<Vec<(&'static str, Arc<dyn Theory>)>> {
    let bound = max + 1;
    let pointed = FreeTheory::new(&fixtures::pointed_signature(), bound, 2);
    Ok(vec![
        ("pointed", Arc::new(FiniteTheory::tabulate(&pointed, bound)?.with_name("pointed")) as Arc<dyn Theory>),
        ("improper", fixtures::improper(bound)),
        ("terminal", fixtures::terminal(bound)),
    ])
}

fn algebras_up_to(theory: &Arc<dyn Theory>, max: usize) -> Result<Vec<Algebra>> {
    let mut out = Vec::new();
    for n in 0..=max {
        out.extend(structures_on(theory, &set(n))?);
    }
    Ok(out)
}

pub(crate) fn adjunction(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let max = cfg.max_carrier.min(2);
    let bound = max + 1;
    let theories = finite_theories(max)?;

    let mut classified = Vec::new();
    let free_pointed: Arc<dyn Theory> = Arc::new(FreeTheory::new(&fixtures::pointed_signature(), 2, 2));
    let expected = [("pointed", vec![0, 1, 2]), ("improper", vec![1, 1, 0]), ("terminal", vec![0, 1, 0])];
    let mut all: Vec<(&str, Arc<dyn Theory>)> = vec![("free pointed", free_pointed)];
    all.extend(theories.iter().cloned());
    for (name, theory) in &all {
        let mut counts = Vec::new();
        for n in 0..=max {
            let end = EndomorphismTheory::new(&set(n), bound);
            let homs = morphisms(theory.as_ref(), &end, bound)?.len();
            let structures = structures_on(theory, &set(n))?.len();
            t.eq(format!("{name}: hom(T, End({n})) vs structures"), homs, structures);
            counts.push(homs);
        }
        let key = name.trim_start_matches("free ");
        if let Some((_, want)) = expected.iter().find(|(k, _)| *k == key) {
            t.eq(format!("{name}: structures on 0..2 points"), counts.clone(), want[..=max].to_vec());
        }
        let (_, raw) = enumerate_algebras(theory, max)?;
        t.eq(format!("{name}: labelled structures"), raw, counts.iter().sum::<usize>());
        classified.push(format!("{name}:{counts:?}"));
    }
    t.note(format!("End classifies structures: {}", classified.join(" ")));

    let mut morphism_count = 0;
    let mut pairs_checked = 0;
    for (sn, s) in &theories {
        let xs = algebras_up_to(s, max)?;
        for (tn, target) in &theories {
            let ys = algebras_up_to(target, max)?;
            for images in morphisms(s.as_ref(), target.as_ref(), bound)? {
                let phi = TheoryMorphism::new(s.clone(), target.clone(), images)?;
                morphism_count += 1;
                for x in &xs {
                    let induced = induct(&phi, x)?;
                    let unit = induced.unit()?;
                    for y in &ys {
                        let restricted = restrict(&phi, y)?;
                        let lhs = homomorphisms(&induced.algebra, y);
                        let rhs = homomorphisms(x, &restricted);
                        let label = format!("{sn}->{tn} |X|={} |Y|={}", x.carrier().total_len(), y.carrier().total_len());
                        t.eq(format!("{label}: hom counts"), lhs.len(), rhs.len());
                        let transposed: BTreeSet<Vec<usize>> = lhs
                            .iter()
                            .map(|h| unit.then(h).map(|m| m.table(Sort(0)).to_vec()))
                            .collect::<Result<_>>()?;
                        let ok = transposed.len() == lhs.len()
                            && transposed.iter().all(|m| {
                                let m = GradedMap::new(x.carrier().clone(), y.carrier().clone(), vec![m.clone()]);
                                m.is_ok_and(|m| x.is_homomorphism(&restricted, &m))
                            });
                        t.check(ok, || format!("{label}: transposition is not a bijection"));
                        pairs_checked += 1;
                    }
                }
                for n in 0..=max {
                    let sk = free_algebra(s, &set(n))?;
                    let via = induct(&phi, &sk.algebra)?.algebra.carrier().total_len();
                    let direct = free_algebra(target, &set(n))?.algebra.carrier().total_len();
                    t.eq(format!("{sn}->{tn}: induced free algebra on {n}"), via, direct);
                }
            }
        }
        let id = TheoryMorphism::identity(s.clone())?;
        for y in &xs {
            let r = restrict(&id, y)?;
            t.eq(format!("{sn}: restriction along the identity"), r.canonical_key(), y.canonical_key());
        }
    }
    t.note(format!(
        "{morphism_count} theory morphisms, {pairs_checked} algebra pairs: |hom(phi_* X, Y)| = |hom(X, phi^* Y)|"
    ));
    Ok(t)
}

pub(crate) fn relative_composition_check(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let max = cfg.max_carrier.min(2);
    let bound = max + 1;
    let theories = finite_theories(max)?;
    for (sn, s) in &theories {
        let regular = Bimodule::regular(s.clone())?;
        t.law(format!("{sn}: bimodule actions"), &regular.check_actions(bound)?);
        for x in algebras_up_to(s, max)? {
            let p = relative_composition(&regular, &x)?;
            let unit = p.unit()?;
            let label = format!("{sn} with |X|={}", x.carrier().total_len());
            t.eq(format!("{label}: |S o_S X|"), p.algebra.carrier().total_len(), x.carrier().total_len());
            t.check(unit.is_bijective() && x.is_homomorphism(&p.algebra, &unit), || {
                format!("{label}: X -> S o_S X is not an isomorphism")
            });
        }
        for (tn, target) in &theories {
            for images in morphisms(s.as_ref(), target.as_ref(), bound)? {
                let m = Bimodule::new(TheoryMorphism::new(s.clone(), target.clone(), images)?);
                for x in algebras_up_to(s, max)? {
                    let rel = relative_composition(&m, &x)?.algebra.carrier().total_len();
                    let ind = induct(&m.morphism, &x)?.algebra.carrier().total_len();
                    t.eq(format!("{sn}->{tn}: M o_S X vs induction"), rel, ind);
                }
                for n in 0..=max {
                    let sk = free_algebra(s, &set(n))?;
                    let rel = relative_composition(&m, &sk.algebra)?.algebra.carrier().total_len();
                    let want = target.size(Sort(0), &Arity::uniform(Sort(0), n))?;
                    t.eq(format!("{sn}->{tn}: M o_S S({n}) vs M({n})"), rel, want);
                }
            }
        }
    }
    let improper = fixtures::improper(2);
    let point = Algebra::from_fn(improper.clone(), set(1), |_, _| 0)?;
    let p = relative_composition(&Bimodule::regular(improper)?, &point)?;
    t.eq("improper: S o_S * ", p.algebra.carrier().total_len(), 1);
    t.note("S o_S X = X; M o_S S(K) = M(K); agrees with induction");
    Ok(t)
}

pub(crate) fn clone_laws(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    let b = cfg.truncation.min(3);
    let two = GradedSet::with_sizes(&SortSet::single(), &[2]);
    let swap = GradedMap::new(two.clone(), two.clone(), vec![vec![1, 0]])?;
    let pointed = Arc::new(FreeTheory::new(&fixtures::pointed_signature(), 3, 2));
    let theories: Vec<(&str, Arc<dyn Theory>, usize)> = vec![
        ("improper", fixtures::improper(3), b),
        ("terminal", fixtures::terminal(3), b),
        ("pointed", pointed.clone(), b),
        ("binary", Arc::new(FreeTheory::new(&fixtures::binary(), 2, 2)), 2),
        ("End(2)", Arc::new(EndomorphismTheory::new(&two, 2)), 2),
        (
            "End(1,1)",
            Arc::new(EndomorphismTheory::new(&GradedSet::with_sizes(&fixtures::two_sorted(), &[1, 1]), 2)),
            2,
        ),
        ("End(swap)", Arc::new(endomorphism_theory_of_map(&swap, 2)?), 2),
    ];
    for (name, theory, bound) in &theories {
        t.law(format!("{name}: clone laws"), &check_clone_laws(theory.as_ref(), *bound)?);
    }
    t.note(format!("{} theories satisfy the clone laws", theories.len()));

    let tab = FiniteTheory::tabulate(pointed.as_ref(), 3)?;
    let back = FiniteTheory::from_json(&tab.to_json())?;
    t.check(back == tab, || "finite theory JSON round trip differs".into());

    let theory: Arc<dyn Theory> = pointed;
    let pair = pointed_set(&theory, &["p", "q"], 0);
    let initial = pointed_set(&theory, &["c"], 0);
    for (label, x, extra) in [("pair", &pair, 2), ("initial", &initial, 1)] {
        let under = undercategory_theory(x, 3)?;
        t.law(format!("under {label}: clone laws"), &check_clone_laws(&under, 2)?);
        let sizes: Vec<usize> = (0..=3)
            .map(|n| under.size(Sort(0), &Arity::uniform(Sort(0), n)))
            .collect::<Result<_>>()?;
        t.eq(format!("under {label}: value sizes"), sizes, (0..=3).map(|n| n + extra).collect());
    }
    t.note("undercategory theories: |T_X(n)| = n + |X|");
    Ok(t)
}
