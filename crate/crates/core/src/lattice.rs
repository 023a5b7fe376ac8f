//! Concept enumeration (NextClosure) and lattice construction.

use std::collections::HashMap;

use crate::bitset::{AttributeSet, ConceptSet, ObjectSet};
use crate::context::FormalContext;
use crate::error::{Error, Result};

/// A formal concept: a closed pair (extent, intent) with extent' = intent and
/// intent' = extent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalConcept {
    pub extent: ObjectSet,
    pub intent: AttributeSet,
}

/// All concepts of a context in lectic order of intents, plus the covering
/// relation of the lattice order (extent inclusion).
#[derive(Debug, Clone)]
pub struct ConceptLattice {
    concepts: Vec<FormalConcept>,
    covers: Vec<(u32, u32)>,
    intent_index: HashMap<AttributeSet, u32>,
    top: u32,
    bottom: u32,
}

/// The lectically next context-closed attribute set after `current`, or
/// `None` once enumeration is complete. `current` must itself be closed.
pub fn next_closure(
    ctx: &FormalContext,
    current: &AttributeSet,
) -> Result<Option<AttributeSet>> {
    if ctx.close_attributes(current)? != *current {
        return Err(Error::NotClosed);
    }
    let m = ctx.attribute_count();
    let mut work = current.clone();
    for i in (0..m).rev() {
        if work.contains(i) {
            work.remove(i);
        } else {
            let mut candidate = work.clone();
            candidate.insert(i);
            let closed = ctx.close_attributes(&candidate)?;
            if !closed.differs_below(&work, i) {
                return Ok(Some(closed));
            }
        }
    }
    Ok(None)
}

/// Iterator over all closed intents of a context in lectic order.
pub struct ClosedIntents<'a> {
    ctx: &'a FormalContext,
    next: Option<AttributeSet>,
}

impl<'a> ClosedIntents<'a> {
    pub fn new(ctx: &'a FormalContext) -> Result<Self> {
        let start = ctx.close_attributes(&ctx.empty_attribute_set())?;
        Ok(ClosedIntents {
            ctx,
            next: Some(start),
        })
    }
}

impl Iterator for ClosedIntents<'_> {
    type Item = AttributeSet;

    fn next(&mut self) -> Option<AttributeSet> {
        let current = self.next.take()?;
        // current is closed by construction, so next_closure cannot fail
        self.next = next_closure(self.ctx, &current).expect("enumeration state is closed");
        Some(current)
    }
}

/// Enumerates every concept and computes the Hasse diagram.
pub fn build_lattice(ctx: &FormalContext) -> Result<ConceptLattice> {
    if ctx.object_count() == 0 {
        return Err(Error::EmptyContext("object"));
    }
    if ctx.attribute_count() == 0 {
        return Err(Error::EmptyContext("attribute"));
    }
    let mut concepts = Vec::new();
    for intent in ClosedIntents::new(ctx)? {
        let extent = ctx.derive_attributes(&intent)?;
        concepts.push(FormalConcept { extent, intent });
    }
    let covers = hasse_covers(&concepts);
    let intent_index = concepts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.intent.clone(), i as u32))
        .collect();
    // lectic-first intent is the closure of the empty set (top concept);
    // lectic-last is the full attribute set (bottom concept)
    let top = 0;
    let bottom = (concepts.len() - 1) as u32;
    debug_assert_eq!(concepts[top as usize].extent.len(), ctx.object_count());
    debug_assert_eq!(
        concepts[bottom as usize].intent.len(),
        ctx.attribute_count()
    );
    Ok(ConceptLattice {
        concepts,
        covers,
        intent_index,
        top,
        bottom,
    })
}

/// Covering edges (child, parent) of the extent-inclusion order: all strict
/// containments with nothing strictly between.
pub fn hasse_covers(concepts: &[FormalConcept]) -> Vec<(u32, u32)> {
    let n = concepts.len();
    let mut above: Vec<ConceptSet> = (0..n).map(|_| ConceptSet::empty(n)).collect();
    let mut below: Vec<ConceptSet> = (0..n).map(|_| ConceptSet::empty(n)).collect();
    // sort indices by extent size so strict subset tests run one way only
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| concepts[i].extent.len());
    for (rank, &i) in order.iter().enumerate() {
        for &j in &order[rank + 1..] {
            if concepts[i].extent.len() == concepts[j].extent.len() {
                continue;
            }
            if concepts[i].extent.is_subset(&concepts[j].extent) {
                above[i].insert(j);
                below[j].insert(i);
            }
        }
    }
    let mut covers = Vec::new();
    for child in 0..n {
        for parent in above[child].iter() {
            // parent covers child iff nothing lies strictly between
            if !above[child].intersects(&below[parent]) {
                covers.push((child as u32, parent as u32));
            }
        }
    }
    covers.sort_unstable();
    covers
}

impl ConceptLattice {
    pub fn concepts(&self) -> &[FormalConcept] {
        &self.concepts
    }

    pub fn covers(&self) -> &[(u32, u32)] {
        &self.covers
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn top(&self) -> usize {
        self.top as usize
    }

    pub fn bottom(&self) -> usize {
        self.bottom as usize
    }

    pub fn concept(&self, index: usize) -> Result<&FormalConcept> {
        self.concepts.get(index).ok_or(Error::ForeignConcept(index))
    }

    pub fn index_of_intent(&self, intent: &AttributeSet) -> Option<usize> {
        self.intent_index.get(intent).map(|&i| i as usize)
    }

    /// Greatest lower bound: the concept whose intent is the closure of the
    /// union of both intents.
    pub fn meet(&self, ctx: &FormalContext, a: usize, b: usize) -> Result<usize> {
        let (ca, cb) = (self.concept(a)?, self.concept(b)?);
        let mut intent = ca.intent.clone();
        intent.union_with(&cb.intent);
        let closed = ctx.close_attributes(&intent)?;
        self.index_of_intent(&closed)
            .ok_or(Error::ForeignConcept(a.max(b)))
    }

    /// Least upper bound: dual of `meet` on extents.
    pub fn join(&self, ctx: &FormalContext, a: usize, b: usize) -> Result<usize> {
        let (ca, cb) = (self.concept(a)?, self.concept(b)?);
        let mut extent = ca.extent.clone();
        extent.union_with(&cb.extent);
        let closed_extent = ctx.close_objects(&extent)?;
        let intent = ctx.derive_objects(&closed_extent)?;
        self.index_of_intent(&intent)
            .ok_or(Error::ForeignConcept(a.max(b)))
    }
}

/// γ(o): the smallest concept whose extent contains object `o`.
pub fn object_concept(ctx: &FormalContext, o: usize) -> Result<FormalConcept> {
    let singleton = ctx.object_set_from(&[o])?;
    let intent = ctx.derive_objects(&singleton)?;
    let extent = ctx.derive_attributes(&intent)?;
    Ok(FormalConcept { extent, intent })
}

/// μ(a): the largest concept whose intent contains attribute `a`.
pub fn attribute_concept(ctx: &FormalContext, a: usize) -> Result<FormalConcept> {
    let singleton = ctx.attribute_set_from(&[a])?;
    let extent = ctx.derive_attributes(&singleton)?;
    let intent = ctx.derive_objects(&extent)?;
    Ok(FormalConcept { extent, intent })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::fish_fixture;

    fn identity_context(n: usize) -> FormalContext {
        let obj_names: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
        let attr_names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let obj_refs: Vec<&str> = obj_names.iter().map(String::as_str).collect();
        let attr_refs: Vec<&str> = attr_names.iter().map(String::as_str).collect();
        let row_refs: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
        FormalContext::from_rows(&obj_refs, &attr_refs, &row_refs).unwrap()
    }

    #[test]
    fn identity_2x2_has_four_concepts_in_a_diamond() {
        let ctx = identity_context(2);
        let lattice = build_lattice(&ctx).unwrap();
        assert_eq!(lattice.len(), 4);
        // diamond: top and bottom plus two incomparable middles, 4 cover edges
        assert_eq!(lattice.covers().len(), 4);
        let degrees: Vec<usize> = (0..4)
            .map(|i| {
                lattice
                    .covers()
                    .iter()
                    .filter(|&&(c, p)| c as usize == i || p as usize == i)
                    .count()
            })
            .collect();
        assert_eq!(degrees, vec![2, 2, 2, 2]);
    }

    #[test]
    fn one_by_one_full_context_enumerates_single_closed_set() {
        let ctx = FormalContext::from_rows(&["o"], &["a"], &[&[0]]).unwrap();
        let intents: Vec<_> = ClosedIntents::new(&ctx).unwrap().collect();
        // {a} is the closure of the empty set; it is also the full set
        assert_eq!(intents.len(), 1);
        assert_eq!(intents[0].to_indices(), vec![0]);
    }

    #[test]
    fn full_relation_context_collapses_to_one_concept() {
        let ctx =
            FormalContext::from_rows(&["x", "y"], &["p", "q"], &[&[0, 1], &[0, 1]]).unwrap();
        let lattice = build_lattice(&ctx).unwrap();
        assert_eq!(lattice.len(), 1);
        assert_eq!(lattice.top(), lattice.bottom());
    }

    #[test]
    fn next_closure_rejects_unclosed_input() {
        let ctx = fish_fixture();
        // {Coast} is not closed: every coast fish lives in the sea too
        let coast = ctx.attribute_set_from(&[0]).unwrap();
        assert!(matches!(next_closure(&ctx, &coast), Err(Error::NotClosed)));
    }

    #[test]
    fn fish_lattice_contains_eel_bottom_concept() {
        let ctx = fish_fixture();
        let lattice = build_lattice(&ctx).unwrap();
        let eel = ctx.object_id("eel").unwrap();
        let bottom = &lattice.concepts()[lattice.bottom()];
        assert_eq!(bottom.extent.to_indices(), vec![eel]);
        assert_eq!(bottom.intent.to_indices(), vec![0, 1, 2]);
    }

    #[test]
    fn fish_closed_set_count_matches_brute_force() {
        let ctx = fish_fixture();
        let enumerated = ClosedIntents::new(&ctx).unwrap().count();
        assert_eq!(enumerated, oracle::closed_pairs(&ctx).len());
    }

    #[test]
    fn enumeration_matches_brute_force_on_random_contexts() {
        for seed in 0..20 {
            let ctx = oracle::random_context(4, 4, seed);
            let lattice = build_lattice(&ctx).unwrap();
            let got: Vec<(Vec<usize>, Vec<usize>)> = lattice
                .concepts()
                .iter()
                .map(|c| (c.extent.to_indices(), c.intent.to_indices()))
                .collect();
            let mut sorted = got.clone();
            sorted.sort();
            assert_eq!(sorted, oracle::closed_pairs(&ctx), "seed {seed}");
            // enumeration must be strictly lectic-ascending
            for pair in lattice.concepts().windows(2) {
                assert_eq!(
                    pair[0].intent.lectic_cmp(&pair[1].intent),
                    std::cmp::Ordering::Less
                );
            }
        }
    }

    #[test]
    fn concepts_satisfy_concept_equations() {
        let ctx = fish_fixture();
        for c in build_lattice(&ctx).unwrap().concepts() {
            assert_eq!(ctx.derive_objects(&c.extent).unwrap(), c.intent);
            assert_eq!(ctx.derive_attributes(&c.intent).unwrap(), c.extent);
        }
    }

    #[test]
    fn object_and_attribute_concepts_on_fixtures() {
        let ctx = fish_fixture();
        let eel = ctx.object_id("eel").unwrap();
        let gamma = object_concept(&ctx, eel).unwrap();
        assert_eq!(gamma.extent.to_indices(), vec![eel]);
        assert_eq!(gamma.intent.to_indices(), vec![0, 1, 2]);

        let full = FormalContext::from_rows(&["x", "y"], &["p"], &[&[0], &[0]]).unwrap();
        let g = object_concept(&full, 0).unwrap();
        assert_eq!(g.extent.len(), 2);
        assert_eq!(g.intent.len(), 1);

        for seed in 100..105 {
            let rnd = oracle::random_context(4, 4, seed);
            for o in 0..4 {
                let g = object_concept(&rnd, o).unwrap();
                let brute_intent = oracle::brute_derive_objects(&rnd, &[o]);
                let brute_extent = oracle::brute_derive_attributes(&rnd, &brute_intent);
                assert_eq!(g.intent.to_indices(), brute_intent);
                assert_eq!(g.extent.to_indices(), brute_extent);
            }
            for a in 0..4 {
                let m = attribute_concept(&rnd, a).unwrap();
                let brute_extent = oracle::brute_derive_attributes(&rnd, &[a]);
                let brute_intent = oracle::brute_derive_objects(&rnd, &brute_extent);
                assert_eq!(m.extent.to_indices(), brute_extent);
                assert_eq!(m.intent.to_indices(), brute_intent);
            }
        }
    }

    #[test]
    fn meet_with_top_and_join_idempotence() {
        let ctx = fish_fixture();
        let lattice = build_lattice(&ctx).unwrap();
        for i in 0..lattice.len() {
            assert_eq!(lattice.meet(&ctx, i, lattice.top()).unwrap(), i);
            assert_eq!(lattice.join(&ctx, i, i).unwrap(), i);
        }
    }

    #[test]
    fn meet_join_match_brute_force_order_infimum_supremum() {
        for seed in 40..48 {
            let ctx = oracle::random_context(4, 4, seed);
            let lattice = build_lattice(&ctx).unwrap();
            let n = lattice.len();
            let ext: Vec<Vec<usize>> = lattice
                .concepts()
                .iter()
                .map(|c| c.extent.to_indices())
                .collect();
            let leq = |i: usize, j: usize| ext[i].iter().all(|o| ext[j].contains(o));
            for i in 0..n {
                for j in 0..n {
                    // infimum: the unique maximal concept below both
                    let mut lower: Vec<usize> =
                        (0..n).filter(|&k| leq(k, i) && leq(k, j)).collect();
                    lower.retain(|&k| lower.iter().all(|&l| !leq(k, l) || k == l));
                    assert_eq!(lower.len(), 1, "meet not unique");
                    assert_eq!(lattice.meet(&ctx, i, j).unwrap(), lower[0]);

                    let mut upper: Vec<usize> =
                        (0..n).filter(|&k| leq(i, k) && leq(j, k)).collect();
                    upper.retain(|&k| upper.iter().all(|&l| !leq(l, k) || k == l));
                    assert_eq!(upper.len(), 1, "join not unique");
                    assert_eq!(lattice.join(&ctx, i, j).unwrap(), upper[0]);
                }
            }
        }
    }

    #[test]
    fn covers_equal_transitive_reduction_by_brute_force() {
        for seed in 7..12 {
            let ctx = oracle::random_context(5, 5, seed);
            let lattice = build_lattice(&ctx).unwrap();
            let n = lattice.len();
            let ext: Vec<Vec<usize>> = lattice
                .concepts()
                .iter()
                .map(|c| c.extent.to_indices())
                .collect();
            let lt = |i: usize, j: usize| {
                ext[i].len() < ext[j].len() && ext[i].iter().all(|o| ext[j].contains(o))
            };
            let mut expected = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                        expected.push((i as u32, j as u32));
                    }
                }
            }
            expected.sort_unstable();
            assert_eq!(lattice.covers(), &expected[..], "seed {seed}");
        }
    }

    #[test]
    fn empty_context_is_rejected() {
        let no_objects = FormalContext::from_rows(&[], &["a"], &[]).unwrap();
        assert!(matches!(
            build_lattice(&no_objects),
            Err(Error::EmptyContext("object"))
        ));
        let no_attrs = FormalContext::from_rows(&["o"], &[], &[&[]]).unwrap();
        assert!(matches!(
            build_lattice(&no_attrs),
            Err(Error::EmptyContext("attribute"))
        ));
    }
}
