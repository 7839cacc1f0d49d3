//! Formulas generated from a pool of atoms, deduplicated by extension on a
//! fixed model. Two formulas with the same extension are interchangeable in
//! any substitution instance evaluated on that model, so sweeping one
//! representative per extension is exact.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use crate::formula::PropFormula;
use crate::kripke::{KripkeError, Model};

pub const MAX_POOL: usize = 8;
pub const MAX_DEPTH: usize = 3;
pub const MAX_EXTENSIONS: usize = 4096;

#[derive(Clone, Debug)]
pub(crate) struct PoolEntry {
    pub formula: PropFormula,
    pub ext: FixedBitSet,
}

/// Representatives of every extension obtainable from `pool` by at most
/// `depth` nested applications of `~ [] <> & | ->`, lowest depth first.
pub(crate) fn pool_closure(
    m: &Model,
    pool: &[PropFormula],
    depth: usize,
) -> Result<Vec<PoolEntry>, KripkeError> {
    if pool.len() > MAX_POOL {
        return Err(KripkeError::CapExceeded {
            what: "pool size",
            got: pool.len(),
            cap: MAX_POOL,
        });
    }
    if depth > MAX_DEPTH {
        return Err(KripkeError::CapExceeded {
            what: "depth",
            got: depth,
            cap: MAX_DEPTH,
        });
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    let mut push = |formula: PropFormula, ext: FixedBitSet, entries: &mut Vec<PoolEntry>| {
        if seen.insert(ext.clone()) {
            entries.push(PoolEntry { formula, ext });
        }
    };
    for f in pool {
        push(f.clone(), m.extension(f), &mut entries);
    }
    let fr = m.frame();
    let mut level_start = 0;
    for _ in 0..depth {
        let current = entries.clone();
        let fresh = level_start..current.len();
        level_start = current.len();
        for (i, e) in current.iter().enumerate() {
            if !fresh.contains(&i) {
                continue;
            }
            let mut neg = e.ext.clone();
            neg.toggle_range(..);
            push(PropFormula::not(e.formula.clone()), neg, &mut entries);
            push(
                PropFormula::necessarily(e.formula.clone()),
                fr.box_of(&e.ext),
                &mut entries,
            );
            push(
                PropFormula::diamond(e.formula.clone()),
                fr.diamond_of(&e.ext),
                &mut entries,
            );
        }
        for (i, a) in current.iter().enumerate() {
            for (j, b) in current.iter().enumerate() {
                // at least one operand must be new at this level
                if !fresh.contains(&i) && !fresh.contains(&j) {
                    continue;
                }
                let mut and = a.ext.clone();
                and.intersect_with(&b.ext);
                push(
                    PropFormula::and(a.formula.clone(), b.formula.clone()),
                    and,
                    &mut entries,
                );
                let mut or = a.ext.clone();
                or.union_with(&b.ext);
                push(
                    PropFormula::or(a.formula.clone(), b.formula.clone()),
                    or,
                    &mut entries,
                );
                let mut imp = a.ext.clone();
                imp.toggle_range(..);
                imp.union_with(&b.ext);
                push(
                    PropFormula::implies(a.formula.clone(), b.formula.clone()),
                    imp,
                    &mut entries,
                );
            }
            if entries.len() > MAX_EXTENSIONS {
                return Err(KripkeError::CapExceeded {
                    what: "distinct pool extensions",
                    got: entries.len(),
                    cap: MAX_EXTENSIONS,
                });
            }
        }
    }
    Ok(entries)
}
