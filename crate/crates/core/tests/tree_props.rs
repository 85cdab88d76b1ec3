use proptest::prelude::*;
use proptest::sample::Index;
use theoria_core::graded::Sort;
use theoria_core::signature::Signature;
use theoria_core::trees::{coproduct_signature, enumerate_by_vertices, essential_subtree, graft, is_essential, split_essential, Tree};
use theoria_core::verify::fixtures;

fn signatures() -> Vec<Signature> {
    vec![
        Signature::single_sorted(&[("m", 2), ("u", 1), ("c", 0)]),
        Signature::single_sorted(&[("t", 3), ("c", 0)]),
        fixtures::graph_signature(),
    ]
}

/// Trees by output sort, at most `v` vertices.
fn pool(sig: &Signature, v: usize) -> Vec<Vec<Tree>> {
    sig.sorts().sorts().map(|s| enumerate_by_vertices(sig, s, v)).collect()
}

fn pick(pool: &[Vec<Tree>], s: Sort, ix: &mut impl Iterator<Item = Index>) -> Tree {
    let list = &pool[s.0];
    list[ix.next().unwrap().index(list.len())].clone()
}

fn forest(pool: &[Vec<Tree>], root: &Tree, ix: &mut impl Iterator<Item = Index>) -> Vec<Tree> {
    root.leaves().0.iter().map(|&s| pick(pool, s, ix)).collect()
}

proptest! {
    #[test]
    fn grafting_is_associative(which in 0usize..3, ix in prop::collection::vec(any::<Index>(), 64)) {
        let sig = &signatures()[which];
        let pool = pool(sig, 2);
        let mut ix = ix.into_iter().cycle();
        let s = Sort(ix.next().unwrap().index(sig.sorts().len()));
        let t = pick(&pool, s, &mut ix);
        let subs = forest(&pool, &t, &mut ix);
        let subsubs: Vec<Vec<Tree>> = subs.iter().map(|u| forest(&pool, u, &mut ix)).collect();
        let left = graft(sig, &graft(sig, &t, &subs).unwrap(), &subsubs.concat()).unwrap();
        let inner: Vec<Tree> = subs.iter().zip(&subsubs).map(|(u, f)| graft(sig, u, f).unwrap()).collect();
        let right = graft(sig, &t, &inner).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn grafting_is_unital(which in 0usize..3, ix in prop::collection::vec(any::<Index>(), 4)) {
        let sig = &signatures()[which];
        let pool = pool(sig, 3);
        let mut ix = ix.into_iter().cycle();
        let s = Sort(ix.next().unwrap().index(sig.sorts().len()));
        let t = pick(&pool, s, &mut ix);
        let leaves: Vec<Tree> = t.leaves().0.iter().map(|&s| Tree::Leaf(s)).collect();
        prop_assert_eq!(&graft(sig, &t, &leaves).unwrap(), &t);
        prop_assert_eq!(graft(sig, &Tree::Leaf(s), std::slice::from_ref(&t)).unwrap(), t);
    }

    #[test]
    fn split_then_regraft_is_identity(ix in prop::collection::vec(any::<Index>(), 2)) {
        let a = Signature::single_sorted(&[("a1", 2), ("a2", 1)]);
        let b = Signature::single_sorted(&[("b1", 2), ("b2", 0)]);
        let (sig, in_b) = coproduct_signature(&a, &b).unwrap();
        let pool = pool(&sig, 4);
        let mut ix = ix.into_iter();
        let t = pick(&pool, Sort(0), &mut ix);
        let (e, forest) = split_essential(&sig, &t, &in_b);
        prop_assert!(is_essential(&sig, &e, &in_b));
        prop_assert!(forest.iter().all(|f| f.labels().iter().all(|&op| !in_b[op])));
        prop_assert_eq!(graft(&sig, &e, &forest).unwrap(), t);
    }

    /// Relabelings that keep profiles and the A/B partition commute with
    /// taking the essential subtree.
    #[test]
    fn relabeling_commutes_with_essential_subtree(choice in prop::collection::vec(0usize..2, 6), ix in any::<Index>()) {
        let a = Signature::single_sorted(&[("a1", 2), ("a2", 2), ("a3", 1)]);
        let b = Signature::single_sorted(&[("b1", 2), ("b2", 2), ("b3", 0)]);
        let (sig, in_b) = coproduct_signature(&a, &b).unwrap();
        // ops 0,1 and 3,4 are interchangeable binary ops on each side.
        let table: Vec<usize> = (0..6)
            .map(|op| match op {
                0 | 1 => choice[op],
                3 | 4 => 3 + choice[op],
                other => other,
            })
            .collect();
        let f = |op: usize| table[op];
        let pool = pool(&sig, 4);
        let t = &pool[0][ix.index(pool[0].len())];
        prop_assert_eq!(
            essential_subtree(&sig, &t.relabel(&f), &in_b),
            essential_subtree(&sig, t, &in_b).relabel(&f)
        );
    }
}
