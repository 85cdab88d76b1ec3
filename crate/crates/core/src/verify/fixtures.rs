//! Shipped fixtures: small signatures, theories and algebras.

use std::sync::Arc;

use crate::algebra::Algebra;
use crate::graded::{GradedMap, GradedSet, SortSet};
use crate::signature::Signature;
use crate::theory::{FiniteTheory, FreeTheory, Theory};

pub fn binary() -> Signature {
    Signature::single_sorted(&[("m", 2)])
}

pub fn pointed_signature() -> Signature {
    Signature::single_sorted(&[("c", 0)])
}

pub fn two_sorted() -> SortSet {
    SortSet::new(["v", "e"]).expect("distinct sorts")
}

/// The multi-sorted fixture with operations `e <- (v,v)` and `v <- (e)`.
pub fn graph_signature() -> Signature {
    Signature::parse(&two_sorted(), &[("ends", "e<-(v,v)"), ("mid", "v<-(e)")]).expect("valid signature")
}

/// Every single-sorted signature with at most two operations of arity at
/// most two, operations named by prefix.
pub fn small_single_sorted(prefix: &str) -> Vec<Signature> {
    let mut out = Vec::new();
    for a in 0..=3usize {
        for b in a..=3usize {
            // 3 stands for "no operation".
            let arities: Vec<usize> = [a, b].into_iter().filter(|&x| x < 3).collect();
            let ops: Vec<(String, usize)> = arities
                .iter()
                .enumerate()
                .map(|(i, &n)| (format!("{prefix}{}", i + 1), n))
                .collect();
            let refs: Vec<(&str, usize)> = ops.iter().map(|(s, n)| (s.as_str(), *n)).collect();
            out.push(Signature::single_sorted(&refs));
        }
    }
    out
}

/// Two-sorted signatures with at most two operations drawn from a fixed
/// list of shapes of arity at most two.
pub fn small_two_sorted(prefix: &str) -> Vec<Signature> {
    let shapes = ["v<-()", "e<-(v,v)", "v<-(e)", "e<-(e)", "v<-(v,e)"];
    let sorts = two_sorted();
    let mut out = vec![Signature::empty(&sorts)];
    for i in 0..shapes.len() {
        out.push(Signature::parse(&sorts, &[(&format!("{prefix}1"), shapes[i])]).expect("valid"));
        for j in i..shapes.len() {
            let (n1, n2) = (format!("{prefix}1"), format!("{prefix}2"));
            out.push(Signature::parse(&sorts, &[(&n1, shapes[i]), (&n2, shapes[j])]).expect("valid"));
        }
    }
    out
}

/// The theory of pointed sets.
pub fn pointed(max_vertices: usize) -> Arc<dyn Theory> {
    Arc::new(FreeTheory::new(&pointed_signature(), 4, max_vertices.max(1)))
}

/// `T(0) = ∅`, `T(n) = *` otherwise.
pub fn improper(bound: usize) -> Arc<dyn Theory> {
    Arc::new(FiniteTheory::improper(bound))
}

pub fn terminal(bound: usize) -> Arc<dyn Theory> {
    Arc::new(FiniteTheory::terminal(bound))
}

/// A pointed set with the given element names and basepoint.
pub fn pointed_set<S: AsRef<str>>(theory: &Arc<dyn Theory>, names: &[S], base: usize) -> Algebra {
    let carrier = GradedSet::from_names(names.iter().map(|n| n.as_ref().to_string())).expect("distinct names");
    Algebra::from_fn(theory.clone(), carrier, |_, _| base).expect("valid pointed set")
}

/// A map of single-sorted sets from an image table.
pub fn map(from: &Algebra, to: &Algebra, table: &[usize]) -> GradedMap {
    GradedMap::new(from.carrier().clone(), to.carrier().clone(), vec![table.to_vec()]).expect("valid map")
}
