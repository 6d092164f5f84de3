//! Disjunctive representation (one skeleton, many species outputs) and the
//! unifier that stays within it.
//!
//! Unifying two representations merges the skeletons root-to-root by
//! congruence closure and keeps, at each merged state, the set of type
//! requirements contributed by its members. No type joins are computed; the
//! requirements are discharged by the resolvant search.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::fstruct::{FeatureStructure, Skeleton, StateId};
use crate::resolve::{self, ResolvantSet};
use crate::signature::{AttrId, Signature, TypeId};

/// A skeleton whose states each carry a nonempty set of type requirements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedSkeleton {
    skeleton: Skeleton,
    constraints: Vec<BTreeSet<TypeId>>,
}

impl ConstrainedSkeleton {
    pub fn new(skeleton: Skeleton, constraints: Vec<BTreeSet<TypeId>>) -> Result<Self> {
        if constraints.len() != skeleton.len() {
            return Err(Error::Malformed(format!(
                "{} constraint sets for {} states",
                constraints.len(),
                skeleton.len()
            )));
        }
        if let Some(i) = constraints.iter().position(BTreeSet::is_empty) {
            return Err(Error::Malformed(format!(
                "state `{}` has no type constraint",
                skeleton.name(StateId::new(i))
            )));
        }
        Ok(ConstrainedSkeleton {
            skeleton,
            constraints,
        })
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn constraints(&self) -> &[BTreeSet<TypeId>] {
        &self.constraints
    }

    pub fn constraint(&self, s: StateId) -> &BTreeSet<TypeId> {
        &self.constraints[s.index()]
    }

    /// Every feature structure obtained by picking one requirement per state.
    pub fn choices(&self) -> Vec<FeatureStructure> {
        let mut out = vec![Vec::new()];
        for set in &self.constraints {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<TypeId>| {
                    set.iter().map(move |&t| {
                        let mut p = prefix.clone();
                        p.push(t);
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|theta| FeatureStructure::new(self.skeleton.clone(), theta).unwrap())
            .collect()
    }
}

impl From<&FeatureStructure> for ConstrainedSkeleton {
    fn from(f: &FeatureStructure) -> Self {
        ConstrainedSkeleton {
            skeleton: f.skeleton().clone(),
            constraints: f.theta().iter().map(|&t| BTreeSet::from([t])).collect(),
        }
    }
}

/// Root-to-root merge of two constrained skeletons: the quotient of their
/// disjoint union under the least congruence identifying the roots.
///
/// Merged states are named `q0, q1, ...` in breadth-first order from the root.
pub fn merge(left: &ConstrainedSkeleton, right: &ConstrainedSkeleton) -> ConstrainedSkeleton {
    let offset = left.skeleton.len();
    let total = offset + right.skeleton.len();

    let mut out: Vec<BTreeMap<AttrId, usize>> = Vec::with_capacity(total);
    for (sk, shift) in [(&left.skeleton, 0), (&right.skeleton, offset)] {
        for s in sk.states() {
            out.push(
                sk.out_edges(s)
                    .map(|(a, t)| (a, t.index() + shift))
                    .collect(),
            );
        }
    }

    let mut classes = UnionFind::<usize>::new(total);
    let mut pending = vec![(
        left.skeleton.root().index(),
        right.skeleton.root().index() + offset,
    )];
    while let Some((x, y)) = pending.pop() {
        let (rx, ry) = (classes.find(x), classes.find(y));
        if rx == ry {
            continue;
        }
        classes.union(rx, ry);
        let rep = classes.find(rx);
        let absorbed = if rep == rx { ry } else { rx };
        let moved = std::mem::take(&mut out[absorbed]);
        for (a, t) in moved {
            match out[rep].get(&a) {
                Some(&existing) => pending.push((existing, t)),
                None => {
                    out[rep].insert(a, t);
                }
            }
        }
    }

    // Number the classes breadth-first from the merged root.
    let root = classes.find(left.skeleton.root().index());
    let mut number: BTreeMap<usize, usize> = BTreeMap::from([(root, 0)]);
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        let targets: Vec<usize> = out[c].values().map(|&t| classes.find(t)).collect();
        for t in targets {
            if let std::collections::btree_map::Entry::Vacant(slot) = number.entry(t) {
                slot.insert(order.len());
                order.push(t);
                queue.push_back(t);
            }
        }
    }

    let mut constraints = vec![BTreeSet::new(); order.len()];
    for (member, theta) in left
        .constraints
        .iter()
        .chain(right.constraints.iter())
        .enumerate()
    {
        let class = number[&classes.find(member)];
        constraints[class].extend(theta.iter().copied());
    }

    let names = (0..order.len()).map(|i| format!("q{i}")).collect();
    let edges = order.iter().enumerate().flat_map(|(i, &c)| {
        out[c]
            .iter()
            .map(|(&a, &t)| (StateId::new(i), a, StateId::new(number[&classes.find(t)])))
            .collect::<Vec<_>>()
    });
    let skeleton = Skeleton::new(names, StateId::new(0), edges)
        .expect("quotient of connected deterministic machines is connected and deterministic");
    ConstrainedSkeleton {
        skeleton,
        constraints,
    }
}

pub fn merge_skeletons(f1: &FeatureStructure, f2: &FeatureStructure) -> ConstrainedSkeleton {
    merge(
        &ConstrainedSkeleton::from(f1),
        &ConstrainedSkeleton::from(f2),
    )
}

/// All well-typed species assignments meeting every requirement at every
/// state, in lexicographic order.
pub fn resolve_constrained(cs: &ConstrainedSkeleton, sig: &Signature) -> ResolvantSet {
    ResolvantSet::new(cs.clone(), resolve::enumerate_all(cs, sig), sig)
}

/// Unifies two resolvant sets computed over `sig`.
pub fn unify_representations(
    r1: &ResolvantSet,
    r2: &ResolvantSet,
    sig: &Signature,
) -> Result<ResolvantSet> {
    if r1.signature_fingerprint() != sig.fingerprint()
        || r2.signature_fingerprint() != sig.fingerprint()
    {
        return Err(Error::SignatureMismatch);
    }
    Ok(resolve_constrained(
        &merge(r1.skeleton(), r2.skeleton()),
        sig,
    ))
}
