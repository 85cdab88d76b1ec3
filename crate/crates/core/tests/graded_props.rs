use proptest::prelude::*;
use theoria_core::graded::{coequalizer, enumerate_arity_morphisms, reflexive_coequalizer, Arity, GradedMap, GradedSet, Sort, SortSet};

fn set(n: usize) -> GradedSet {
    GradedSet::with_sizes(&SortSet::single(), &[n])
}

fn two_sorted() -> SortSet {
    SortSet::new(["v", "e"]).unwrap()
}

proptest! {
    #[test]
    fn product_size_is_product_of_sizes(v in 0usize..4, e in 0usize..4, word in prop::collection::vec(0usize..2, 0..5)) {
        let x = GradedSet::with_sizes(&two_sorted(), &[v, e]);
        let w = Arity(word.iter().map(|&s| Sort(s)).collect());
        let want: usize = word.iter().map(|&s| [v, e][s]).product();
        prop_assert_eq!(x.product(&w).len(), want);
        prop_assert_eq!(x.product_size(&w), want);
    }

    #[test]
    fn arity_morphism_count(p in 0usize..5, q in 0usize..5) {
        let (a, b) = (Arity::uniform(Sort(0), p), Arity::uniform(Sort(0), q));
        prop_assert_eq!(enumerate_arity_morphisms(&a, &b).len(), q.pow(p as u32));
    }

    /// A reflexive pair `X = Y + R ⇉ Y` identifying the pairs in `R`, times a
    /// set `Z`, against the quotient times `Z`.
    #[test]
    fn reflexive_coequalizers_commute_with_products(
        n in 1usize..6,
        pairs in prop::collection::vec((0usize..6, 0usize..6), 0..5),
        m in 0usize..4,
    ) {
        let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let (y, x) = (set(n), set(n + pairs.len()));
        let f: Vec<usize> = (0..n).chain(pairs.iter().map(|p| p.0)).collect();
        let g: Vec<usize> = (0..n).chain(pairs.iter().map(|p| p.1)).collect();
        let s: Vec<usize> = (0..n).collect();
        let fm = GradedMap::new(x.clone(), y.clone(), vec![f.clone()]).unwrap();
        let gm = GradedMap::new(x.clone(), y.clone(), vec![g.clone()]).unwrap();
        let sm = GradedMap::new(y.clone(), x.clone(), vec![s.clone()]).unwrap();
        let (q, proj) = reflexive_coequalizer(&fm, &gm, &sm).unwrap();

        let z: Vec<String> = (0..m).map(|i| format!("z{i}")).collect();
        let (xz, yz) = (x.times(&z), y.times(&z));
        let lift = |t: &[usize]| -> Vec<usize> { (0..t.len() * m).map(|i| t[i / m] * m + i % m).collect() };
        let fz = GradedMap::new(xz.clone(), yz.clone(), vec![lift(&f)]).unwrap();
        let gz = GradedMap::new(xz, yz.clone(), vec![lift(&g)]).unwrap();
        let (qz, proj_z) = coequalizer(&fz, &gz);
        prop_assert_eq!(qz.total_len(), q.total_len() * m);

        // (y, z) ↦ ([y], z) is well defined and bijective on classes.
        let mut image = vec![None; qz.total_len()];
        for i in 0..yz.total_len() {
            let target = proj.apply(Sort(0), i / m) * m + i % m;
            let c = proj_z.apply(Sort(0), i);
            prop_assert!(image[c].is_none_or(|t| t == target));
            image[c] = Some(target);
        }
        let mut seen: Vec<usize> = image.into_iter().map(Option::unwrap).collect();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), qz.total_len());
    }
}
