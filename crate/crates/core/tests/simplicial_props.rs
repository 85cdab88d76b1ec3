use proptest::prelude::*;
use proptest::sample::Index;
use theoria_core::graded::{GradedMap, GradedSet, Sort};
use theoria_core::simplicial::{free_generators, generated_mask, is_closed_subdiagram, DegeneracyDiagram};

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #[test]
    fn simplices_are_free_with_binomial_generators(k in 0usize..3, top in 0usize..4) {
        let d = DegeneracyDiagram::standard_simplex(k, top);
        let cert = free_generators(&d).unwrap().expect("a simplex is free");
        let want: Vec<usize> = (0..=top).map(|n| binomial(k + 1, n + 1)).collect();
        prop_assert_eq!(cert.generator_counts(), want);
        let (_, cmp) = cert.rebuild(&d).unwrap();
        prop_assert!(cmp.iter().all(GradedMap::is_bijective));
        let sizes: Vec<usize> = d.levels().iter().map(GradedSet::total_len).collect();
        prop_assert_eq!(sizes, (0..=top).map(|n| binomial(n + k + 1, k)).collect::<Vec<_>>());
    }

    /// The subdiagram generated by nondegenerate elements is closed, hence
    /// free.
    #[test]
    fn generated_subdiagrams_are_closed_and_free(k in 1usize..3, picks in prop::collection::vec((0usize..4, any::<Index>()), 1..4)) {
        let top = 3;
        let d = DegeneracyDiagram::standard_simplex(k, top);
        let elements: Vec<(usize, Sort, usize)> = picks
            .iter()
            .filter_map(|(n, i)| {
                let nondeg = &d.nondegenerate(*n)[0];
                (!nondeg.is_empty()).then(|| (*n, Sort(0), nondeg[i.index(nondeg.len())]))
            })
            .collect();
        let mask = generated_mask(&d, &elements);
        let v = is_closed_subdiagram(&d, &mask);
        prop_assert!(v.subdiagram && v.closed);
        let (sub, _) = d.subdiagram(&mask).unwrap();
        prop_assert!(sub.check_functoriality().passed());
        prop_assert!(free_generators(&sub).unwrap().is_ok());
    }

    /// A degenerate element alone generates a subdiagram missing the element
    /// it degenerates from.
    #[test]
    fn degenerate_generators_are_not_closed(k in 0usize..3, n in 1usize..4, i in any::<Index>()) {
        let d = DegeneracyDiagram::standard_simplex(k, 3);
        let nondeg = &d.nondegenerate(n)[0];
        let degenerate: Vec<usize> = (0..d.level(n).len(Sort(0))).filter(|e| !nondeg.contains(e)).collect();
        let e = degenerate[i.index(degenerate.len())];
        let v = is_closed_subdiagram(&d, &generated_mask(&d, &[(n, Sort(0), e)]));
        prop_assert!(v.subdiagram && !v.closed);
    }
}
