//! Order ideals and prefix pomsets.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::error::{BoundExceeded, Budget};
use crate::pomset::Pomset;

/// Every downward-closed event set of `r`, including the empty set and
/// `r` itself. Fails once more than `bound` ideals have been produced.
pub fn order_ideals(r: &Pomset, bound: usize) -> Result<Vec<FixedBitSet>, BoundExceeded> {
    let order = r.topological_order();
    let mut out = Vec::new();
    let mut budget = Budget::new("order ideals", bound);
    let mut current = FixedBitSet::with_capacity(r.len());
    walk(r, &order, 0, &mut current, &mut out, &mut budget)?;
    Ok(out)
}

fn walk(
    r: &Pomset,
    order: &[usize],
    k: usize,
    current: &mut FixedBitSet,
    out: &mut Vec<FixedBitSet>,
    budget: &mut Budget,
) -> Result<(), BoundExceeded> {
    if k == order.len() {
        budget.spend()?;
        out.push(current.clone());
        return Ok(());
    }
    let e = order[k];
    walk(r, order, k + 1, current, out, budget)?;
    // include e only when all of its predecessors are already in
    if r.below(e).is_subset(current) {
        current.insert(e);
        walk(r, order, k + 1, current, out, budget)?;
        current.set(e, false);
    }
    Ok(())
}

pub fn is_ideal(r: &Pomset, set: &FixedBitSet) -> bool {
    set.ones().all(|e| r.below(e).is_subset(set))
}

/// All prefixes of `r`, one per isomorphism class, in canonical order.
pub fn prefixes(r: &Pomset, bound: usize) -> Result<Vec<Pomset>, BoundExceeded> {
    let set: BTreeSet<Pomset> = order_ideals(r, bound)?
        .iter()
        .map(|ideal| r.restrict(ideal))
        .collect();
    Ok(set.into_iter().collect())
}

/// True iff `p` is isomorphic to the restriction of `r` to some order ideal.
pub fn is_prefix(p: &Pomset, r: &Pomset, bound: usize) -> Result<bool, BoundExceeded> {
    if p.len() > r.len() {
        return Ok(false);
    }
    let want = p.label_multiset();
    for ideal in order_ideals(r, bound)? {
        if ideal.count_ones(..) != p.len() {
            continue;
        }
        let cand = r.restrict(&ideal);
        if cand.label_multiset() == want && cand.is_isomorphic(p) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::CommLabel;

    fn l(s: &str) -> CommLabel {
        s.parse().unwrap()
    }

    #[test]
    fn chain_and_antichain_counts() {
        let chain = Pomset::new([("a", l("AB!x")), ("b", l("AB?x"))], [("a", "b")]).unwrap();
        assert_eq!(order_ideals(&chain, 100).unwrap().len(), 3);
        assert_eq!(prefixes(&chain, 100).unwrap().len(), 3);
        let anti =
            Pomset::new([("a", l("AB!x")), ("b", l("CD!y"))], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(prefixes(&anti, 100).unwrap().len(), 4);
    }

    #[test]
    fn duplicate_ideals_collapse() {
        let anti =
            Pomset::new([("a", l("AB!x")), ("b", l("AB!x"))], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(order_ideals(&anti, 100).unwrap().len(), 4);
        assert_eq!(prefixes(&anti, 100).unwrap().len(), 3);
    }

    #[test]
    fn prefix_membership() {
        let chain = Pomset::new([("a", l("AB!x")), ("b", l("AB?x"))], [("a", "b")]).unwrap();
        assert!(is_prefix(&chain, &chain, 100).unwrap());
        let top = Pomset::new([("b", l("AB?x"))], Vec::<(&str, &str)>::new()).unwrap();
        assert!(!is_prefix(&top, &chain, 100).unwrap());
        let bottom = Pomset::new([("a", l("AB!x"))], Vec::<(&str, &str)>::new()).unwrap();
        assert!(is_prefix(&bottom, &chain, 100).unwrap());
        assert!(is_prefix(&Pomset::empty(), &chain, 100).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let anti = Pomset::new(
            [("a", l("AB!x")), ("b", l("CD!y")), ("c", l("EF!z"))],
            Vec::<(&str, &str)>::new(),
        )
        .unwrap();
        assert_eq!(
            order_ideals(&anti, 7).unwrap_err(),
            BoundExceeded::new("order ideals", 7)
        );
        assert_eq!(order_ideals(&anti, 8).unwrap().len(), 8);
    }
}
