#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfs_core::random::{self, SignatureShape};
use tfs_core::{
    is_resolvant_of, Assignment, FeatureStructure, MorphAutomaton, Path, ResolvedFeatureStructure,
    Signature, Skeleton, StateId, TypeId,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// |types| <= 8, |species| <= 4, |attrs| <= 3, |states| <= 6.
pub fn small_instance(rng: &mut ChaCha8Rng) -> (Signature, FeatureStructure) {
    let sig = random::signature(rng, &SignatureShape::default());
    let states = rng.gen_range(1..=6);
    let density = rng.gen_range(0.0..0.5);
    let f = random::feature_structure(rng, &sig, states, density);
    (sig, f)
}

/// Every total species assignment that is a resolvant, checked one by one
/// against the definition.
pub fn brute_resolvants(f: &FeatureStructure, sig: &Signature) -> Vec<Assignment> {
    all_assignments(f.skeleton().len(), sig)
        .into_iter()
        .filter(|rho| {
            let r = ResolvedFeatureStructure::unchecked(f.skeleton().clone(), rho.clone()).unwrap();
            is_resolvant_of(&r, f, sig)
        })
        .collect()
}

/// All assignments in lexicographic order, built by repeated extension.
pub fn all_assignments(states: usize, sig: &Signature) -> Vec<Assignment> {
    let mut out: Vec<Assignment> = vec![Vec::new()];
    for _ in 0..states {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                sig.species().iter().map(move |&s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect();
    }
    out
}

/// Maps each state of `from` to the state of `onto` reached by its access
/// path; defined when `onto` is a root-to-root quotient of `from`.
pub fn path_map(from: &Skeleton, onto: &Skeleton) -> Vec<StateId> {
    from.access_paths()
        .iter()
        .map(|p| onto.run(p).expect("quotient preserves paths"))
        .collect()
}

/// Path-level view of a morph machine up to `depth`: for every defined path,
/// its species and the index of the first path it is equivalent to.
pub fn path_triples(
    m: &MorphAutomaton,
    sig: &Signature,
    depth: usize,
) -> Vec<(Path, TypeId, usize)> {
    let mut paths = vec![Path::empty()];
    let mut frontier = vec![Path::empty()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for a in sig.attrs() {
                let q = p.pushed(a);
                if m.skeleton().run(&q).is_some() {
                    next.push(q);
                }
            }
        }
        paths.extend(next.iter().cloned());
        frontier = next;
    }
    paths.sort();
    let nodes: Vec<StateId> = paths.iter().map(|p| m.skeleton().run(p).unwrap()).collect();
    paths
        .iter()
        .zip(&nodes)
        .map(|(p, &n)| {
            let first = nodes.iter().position(|&x| x == n).unwrap();
            (p.clone(), m.species_of(n), first)
        })
        .collect()
}
