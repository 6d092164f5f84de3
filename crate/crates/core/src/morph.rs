//! Morphs, represented by their finite quotient machines.
//!
//! A [`MorphAutomaton`] is a connected machine with species outputs that is
//! totally well-typed: a node has an edge for attribute `α` exactly when
//! `approp(λ(node), α)` is defined, and the target's species refines it. The
//! defined paths, the pairs of paths reaching a common node, and the species
//! at the reached node form the path-level morph the machine stands for.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::fstruct::{self, FeatureStructure, ResolvedFeatureStructure, Skeleton, StateId};
use crate::interp::FiniteInterpretation;
use crate::signature::{Signature, TypeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphAutomaton {
    skeleton: Skeleton,
    lambda: Vec<TypeId>,
}

impl MorphAutomaton {
    /// Structural construction only; [`check_morph`] decides whether the
    /// machine really is a morph.
    pub fn new(skeleton: Skeleton, lambda: Vec<TypeId>) -> Result<Self> {
        if lambda.len() != skeleton.len() {
            return Err(Error::Malformed(format!(
                "{} species labels for {} nodes",
                lambda.len(),
                skeleton.len()
            )));
        }
        Ok(MorphAutomaton { skeleton, lambda })
    }

    pub fn parse(src: &str, sig: &Signature) -> Result<Self> {
        let (skeleton, lambda) = fstruct::parse_machine(src, sig)?;
        Self::new(skeleton, lambda)
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn lambda(&self) -> &[TypeId] {
        &self.lambda
    }

    pub fn species_of(&self, node: StateId) -> TypeId {
        self.lambda[node.index()]
    }

    pub fn as_feature_structure(&self) -> FeatureStructure {
        FeatureStructure::new(self.skeleton.clone(), self.lambda.clone())
            .expect("label count matches")
    }

    pub fn render(&self, sig: &Signature) -> String {
        fstruct::render_machine(&self.skeleton, &self.lambda, sig)
    }

    /// Isomorphic as labelled rooted machines (names ignored).
    pub fn is_isomorphic(&self, other: &MorphAutomaton) -> bool {
        match self.skeleton.isomorphism(&other.skeleton) {
            Some(map) => self
                .skeleton
                .states()
                .all(|s| self.lambda[s.index()] == other.lambda[map[s.index()].index()]),
            None => false,
        }
    }
}

/// Whether `m` is totally well-typed with species outputs.
pub fn check_morph(m: &MorphAutomaton, sig: &Signature) -> bool {
    morph_violation(m, sig).is_none()
}

/// A description of the first node or edge breaking the morph conditions.
pub fn morph_violation(m: &MorphAutomaton, sig: &Signature) -> Option<String> {
    let sk = &m.skeleton;
    for node in sk.states() {
        let species = m.lambda[node.index()];
        if !sig.is_species(species) {
            return Some(format!(
                "node `{}` is labelled `{}`, which is not a species",
                sk.name(node),
                sig.type_name(species)
            ));
        }
    }
    for node in sk.states() {
        let species = m.lambda[node.index()];
        for a in sig.attrs() {
            match (sig.app(species, a), sk.step(node, a)) {
                (None, None) => {}
                (Some(_), None) => {
                    return Some(format!(
                        "node `{}` ({}) lacks an edge for appropriate attribute `{}`",
                        sk.name(node),
                        sig.type_name(species),
                        sig.attr_name(a)
                    ))
                }
                (None, Some(_)) => {
                    return Some(format!(
                        "node `{}` ({}) has an edge for inappropriate attribute `{}`",
                        sk.name(node),
                        sig.type_name(species),
                        sig.attr_name(a)
                    ))
                }
                (Some(v), Some(target)) => {
                    let ts = m.lambda[target.index()];
                    if !sig.sub(v, ts) {
                        return Some(format!(
                            "edge {} --{}--> {}: {} does not subsume {}",
                            sk.name(node),
                            sig.attr_name(a),
                            sk.name(target),
                            sig.type_name(v),
                            sig.type_name(ts)
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Closes a resolved feature structure into a morph it approximates.
///
/// Every node missing an edge for an appropriate attribute gets one to a
/// shared canonical node for the first species (in declaration order)
/// refining the appropriate value. Canonical nodes are created at most once
/// per species and closed under the same rule.
pub fn witness(r: &ResolvedFeatureStructure, sig: &Signature) -> MorphAutomaton {
    let sk = r.skeleton();
    let mut names: Vec<String> = sk.names().to_vec();
    let mut taken: HashSet<String> = names.iter().cloned().collect();
    let mut lambda: Vec<TypeId> = r.rho().to_vec();
    let mut edges: Vec<_> = sk.edges().collect();
    let mut canonical: Vec<Option<StateId>> = vec![None; sig.species().len()];

    let mut node = 0;
    while node < names.len() {
        let id = StateId::new(node);
        for a in sig.attrs() {
            let Some(value) = sig.app(lambda[node], a) else {
                continue;
            };
            if node < sk.len() && sk.step(id, a).is_some() {
                continue;
            }
            let target_species = sig
                .least_species_at_least(value)
                .expect("finite signatures are rational");
            let rank = sig.species_rank(target_species).unwrap();
            let target = match canonical[rank] {
                Some(t) => t,
                None => {
                    let t = StateId::new(names.len());
                    let mut name = format!("sp_{}", sig.type_name(target_species));
                    while taken.contains(&name) {
                        name.push('_');
                    }
                    taken.insert(name.clone());
                    names.push(name);
                    lambda.push(target_species);
                    canonical[rank] = Some(t);
                    t
                }
            };
            edges.push((id, a, target));
        }
        node += 1;
    }

    let skeleton = Skeleton::new(names, sk.root(), edges).expect("witness stays connected");
    MorphAutomaton { skeleton, lambda }
}

/// The unique root-preserving homomorphism from `f` into `m` that respects
/// transitions and has `θ(q) ⪯ λ(h(q))`, if there is one.
pub fn homomorphism(
    f: &FeatureStructure,
    m: &MorphAutomaton,
    sig: &Signature,
) -> Option<Vec<StateId>> {
    let fs = f.skeleton();
    let mut h: Vec<Option<StateId>> = vec![None; fs.len()];
    h[fs.root().index()] = Some(m.skeleton.root());
    let mut queue = VecDeque::from([fs.root()]);
    while let Some(q) = queue.pop_front() {
        let image = h[q.index()].unwrap();
        if !sig.sub(f.type_of(q), m.lambda[image.index()]) {
            return None;
        }
        for (a, next) in fs.out_edges(q) {
            let target = m.skeleton.step(image, a)?;
            match h[next.index()] {
                Some(existing) if existing != target => return None,
                Some(_) => {}
                None => {
                    h[next.index()] = Some(target);
                    queue.push_back(next);
                }
            }
        }
    }
    h.into_iter().collect()
}

/// Whether `f` approximates the morph `m`.
pub fn approximates(f: &FeatureStructure, m: &MorphAutomaton, sig: &Signature) -> bool {
    homomorphism(f, m, sig).is_some()
}

/// Reads the morph's nodes as objects: species from `λ`, attribute values
/// from the transitions. The root node is the designated object and comes
/// first in the universe.
pub fn morph_to_interpretation(
    m: &MorphAutomaton,
    sig: &Signature,
) -> Result<FiniteInterpretation> {
    FiniteInterpretation::new(
        m.skeleton.names().to_vec(),
        m.lambda.clone(),
        m.skeleton
            .edges()
            .map(|(s, a, t)| (s.index(), a, t.index())),
        sig,
    )
}
