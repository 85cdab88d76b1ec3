use proptest::prelude::*;
use theoria_core::graded::{Arity, GradedSet, Sort, SortSet};
use theoria_core::series::{compose, star_product, FreeSeries, Series, TabulatedSeries, UnitSeries};
use theoria_core::signature::Signature;

/// Single-sorted signatures with one or two operations of arity at most 2.
fn signature(prefix: &'static str) -> impl Strategy<Value = Signature> {
    prop::collection::vec(0usize..3, 1..3).prop_map(move |arities| {
        let names: Vec<String> = (0..arities.len()).map(|i| format!("{prefix}{i}")).collect();
        let ops: Vec<(&str, usize)> = names.iter().map(String::as_str).zip(arities).collect();
        Signature::single_sorted(&ops)
    })
}

fn n(k: usize) -> Arity {
    Arity::uniform(Sort(0), k)
}

fn set(k: usize) -> GradedSet {
    GradedSet::with_sizes(&SortSet::single(), &[k])
}

proptest! {
    #[test]
    fn free_series_of_star_is_composite(a in signature("a"), b in signature("b")) {
        let ab = FreeSeries::new(&star_product(&a, &b).unwrap());
        let c = compose(&FreeSeries::new(&a), &FreeSeries::new(&b), 3).unwrap();
        for k in 0..=3 {
            prop_assert_eq!(ab.size(Sort(0), &n(k)).unwrap(), c.size(Sort(0), &n(k)).unwrap());
        }
    }

    #[test]
    fn evaluation_of_composite_is_nested(a in signature("a"), b in signature("b"), k in 0usize..4) {
        let (sa, sb) = (FreeSeries::new(&a), FreeSeries::new(&b));
        let c = compose(&sa, &sb, 3).unwrap();
        let nested = sa.evaluate(&sb.evaluate(&set(k)).unwrap().set).unwrap();
        prop_assert_eq!(c.evaluate(&set(k)).unwrap().set.total_len(), nested.set.total_len());
    }

    #[test]
    fn unit_is_neutral_for_composition(a in signature("a")) {
        let sa = FreeSeries::new(&a);
        let unit = UnitSeries::new(&SortSet::single());
        let left = compose(&unit, &sa, 3).unwrap();
        let right = compose(&sa, &unit, 3).unwrap();
        for k in 0..=3 {
            let want = sa.size(Sort(0), &n(k)).unwrap();
            prop_assert_eq!(left.size(Sort(0), &n(k)).unwrap(), want);
            prop_assert_eq!(right.size(Sort(0), &n(k)).unwrap(), want);
        }
    }

    /// Representable inputs: evaluating at `{1..k}` gives back `A(k)`.
    #[test]
    fn evaluation_at_representables(a in signature("a"), k in 0usize..4) {
        let sa = FreeSeries::new(&a);
        let t = TabulatedSeries::from_series(&sa, 3).unwrap();
        prop_assert_eq!(t.evaluate(&set(k)).unwrap().set.total_len(), sa.size(Sort(0), &n(k)).unwrap());
    }

    #[test]
    fn star_product_is_associative_on_counts(a in signature("a"), b in signature("b"), c in signature("c")) {
        let left = star_product(&star_product(&a, &b).unwrap(), &c).unwrap();
        let right = star_product(&a, &star_product(&b, &c).unwrap()).unwrap();
        let (l, r) = (FreeSeries::new(&left), FreeSeries::new(&right));
        for k in 0..=3 {
            prop_assert_eq!(l.size(Sort(0), &n(k)).unwrap(), r.size(Sort(0), &n(k)).unwrap());
        }
    }
}
