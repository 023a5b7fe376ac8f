//! Attribute implications: the Duquenne–Guigues (stem) basis and
//! implication-closure machinery.

use std::io::Write;

use crate::bitset::AttributeSet;
use crate::context::FormalContext;
use crate::error::{Error, Result};

/// An implication premise → conclusion between attribute sets. The conclusion
/// is stored disjoint from the premise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implication {
    premise: AttributeSet,
    conclusion: AttributeSet,
}

impl Implication {
    pub fn new(premise: AttributeSet, mut conclusion: AttributeSet) -> Self {
        conclusion.difference_with(&premise);
        Implication { premise, conclusion }
    }

    pub fn premise(&self) -> &AttributeSet {
        &self.premise
    }

    pub fn conclusion(&self) -> &AttributeSet {
        &self.conclusion
    }
}

/// Implications in lectic premise order; premises of a stem basis are exactly
/// the pseudo-intents of the source context.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImplicationBasis {
    implications: Vec<Implication>,
}

impl ImplicationBasis {
    pub fn new(implications: Vec<Implication>) -> Self {
        ImplicationBasis { implications }
    }

    pub fn implications(&self) -> &[Implication] {
        &self.implications
    }

    pub fn len(&self) -> usize {
        self.implications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.implications.is_empty()
    }

    /// Least superset of `start` closed under every implication
    /// (semi-naive iteration to a fixpoint).
    pub fn closure(&self, start: &AttributeSet) -> AttributeSet {
        let mut acc = start.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for imp in &self.implications {
                if imp.premise.is_subset(&acc) && !imp.conclusion.is_subset(&acc) {
                    acc.union_with(&imp.conclusion);
                    changed = true;
                }
            }
        }
        acc
    }

    /// One implication per line: `a1,a2 -> b1,b2` using attribute names.
    pub fn write_text<W: Write>(&self, ctx: &FormalContext, mut out: W) -> Result<()> {
        for imp in &self.implications {
            let side = |set: &AttributeSet| -> Result<String> {
                let names: Result<Vec<&str>> =
                    set.iter().map(|a| ctx.attribute_name(a)).collect();
                Ok(names?.join(","))
            };
            let line = format!("{} -> {}", side(&imp.premise)?, side(&imp.conclusion)?);
            writeln!(out, "{line}").map_err(|e| Error::io("<implications>", e))?;
        }
        Ok(())
    }
}

/// True iff the implication holds in the context:
/// every object with the premise also has the conclusion.
pub fn implication_holds(ctx: &FormalContext, imp: &Implication) -> Result<bool> {
    let closed = ctx.close_attributes(imp.premise())?;
    Ok(imp.conclusion().is_subset(&closed))
}

/// Computes the stem basis: pseudo-intents are visited in lectic order using
/// NextClosure over the closure operator of the implications found so far.
pub fn stem_basis(ctx: &FormalContext) -> Result<ImplicationBasis> {
    if ctx.object_count() == 0 {
        return Err(Error::EmptyContext("object"));
    }
    let m = ctx.attribute_count();
    if m == 0 {
        return Err(Error::EmptyContext("attribute"));
    }
    let mut basis = ImplicationBasis::default();
    let full = AttributeSet::full(m);
    let mut current = basis.closure(&ctx.empty_attribute_set());
    loop {
        let closed = ctx.close_attributes(&current)?;
        if current != closed {
            basis
                .implications
                .push(Implication::new(current.clone(), closed));
        }
        if current == full {
            return Ok(basis);
        }
        let mut advanced = false;
        let mut work = current.clone();
        for i in (0..m).rev() {
            if work.contains(i) {
                work.remove(i);
            } else {
                let mut candidate = work.clone();
                candidate.insert(i);
                let next = basis.closure(&candidate);
                if !next.differs_below(&work, i) {
                    current = next;
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            return Ok(basis);
        }
    }
}
