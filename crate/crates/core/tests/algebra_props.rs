use proptest::prelude::*;
use theoria_core::algebra::{effective_mono, homomorphisms, induct, relative_composition, restrict, Algebra, Bimodule};
use theoria_core::graded::{GradedMap, Sort};
use theoria_core::theory::{check_clone_laws, FiniteTheory, FreeTheory, Theory, TheoryMorphism};
use theoria_core::verify::fixtures;

fn pointed_set(size: usize, base: usize) -> Algebra {
    let names: Vec<String> = (0..size).map(|i| format!("p{i}")).collect();
    fixtures::pointed_set(&fixtures::pointed(2), &names, base % size)
}

/// A basepoint-preserving map from an arbitrary table.
fn pointed_map(x: &Algebra, y: &Algebra, table: &[usize]) -> GradedMap {
    let (bx, by) = (x.apply_generator(0, &[]), y.apply_generator(0, &[]));
    let t = (0..x.carrier().total_len())
        .map(|i| if i == bx { by } else { table[i] % y.carrier().total_len() })
        .collect();
    GradedMap::new(x.carrier().clone(), y.carrier().clone(), vec![t]).unwrap()
}

proptest! {
    #[test]
    fn pointed_sets_satisfy_the_laws(size in 1usize..5, base in 0usize..5) {
        prop_assert!(pointed_set(size, base).check_laws(2).unwrap().passed());
    }

    /// In pointed sets the effective monomorphisms are the injective maps.
    #[test]
    fn effective_monos_of_pointed_sets(sx in 1usize..4, sy in 1usize..5, bx in 0usize..4, by in 0usize..5, table in prop::collection::vec(0usize..5, 4)) {
        let (x, y) = (pointed_set(sx, bx), pointed_set(sy, by));
        let f = pointed_map(&x, &y, &table);
        let v = effective_mono(&x, &y, &f).unwrap();
        prop_assert_eq!(v.mono, f.is_injective());
        prop_assert_eq!(v.effective, f.is_injective());
    }

    /// Along the identity, induction and restriction do nothing up to
    /// isomorphism, and the hom counts agree.
    #[test]
    fn adjunction_along_the_identity(sx in 1usize..4, sy in 1usize..4, bx in 0usize..4, by in 0usize..4) {
        let (x, y) = (pointed_set(sx, bx), pointed_set(sy, by));
        let id = TheoryMorphism::identity(x.theory().clone()).unwrap();
        let induced = induct(&id, &x).unwrap();
        prop_assert_eq!(induced.algebra.carrier().total_len(), sx);
        let restricted = restrict(&id, &y).unwrap();
        prop_assert_eq!(homomorphisms(&induced.algebra, &y).len(), homomorphisms(&x, &restricted).len());
        // Pointed maps fix the basepoint and are otherwise free.
        prop_assert_eq!(homomorphisms(&x, &y).len(), sy.pow(sx as u32 - 1));
    }

    #[test]
    fn regular_bimodule_is_neutral(size in 1usize..4, base in 0usize..4) {
        let s = FiniteTheory::tabulate(&FreeTheory::new(&fixtures::pointed_signature(), 4, 2), 4).unwrap();
        let s: std::sync::Arc<dyn Theory> = std::sync::Arc::new(s);
        let names: Vec<String> = (0..size).map(|i| format!("p{i}")).collect();
        let x = fixtures::pointed_set(&s, &names, base % size);
        let p = relative_composition(&Bimodule::regular(s).unwrap(), &x).unwrap();
        prop_assert_eq!(p.algebra.carrier().total_len(), size);
        prop_assert!(p.unit().unwrap().is_bijective());
    }

    /// Theories of `k` constants tabulate to finite clones.
    #[test]
    fn tabulated_constant_theories_are_clones(k in 0usize..3, bound in 1usize..4) {
        let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let ops: Vec<(&str, usize)> = names.iter().map(|n| (n.as_str(), 0)).collect();
        let sig = theoria_core::signature::Signature::single_sorted(&ops);
        let t = FiniteTheory::tabulate(&FreeTheory::new(&sig, bound, 1), bound).unwrap();
        for m in 0..=bound {
            prop_assert_eq!(t.size(Sort(0), &theoria_core::graded::Arity::uniform(Sort(0), m)).unwrap(), m + k);
        }
        prop_assert!(check_clone_laws(&t, bound).unwrap().passed());
    }
}
