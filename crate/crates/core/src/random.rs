//! Random instance generators for property tests, differential tests and
//! benchmarks.
//!
//! All generators are driven by a caller-supplied RNG, so seeded runs are
//! reproducible.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fstruct::{FeatureStructure, ResolvedFeatureStructure, Skeleton, StateId};
use crate::interp::FiniteInterpretation;
use crate::morph;
use crate::signature::{Signature, SignatureBuilder, TypeId};

#[derive(Debug, Clone)]
pub struct SignatureShape {
    pub types: std::ops::RangeInclusive<usize>,
    pub species: std::ops::RangeInclusive<usize>,
    pub attrs: std::ops::RangeInclusive<usize>,
    /// Chance that an extra earlier type becomes a supertype.
    pub extra_parent: f64,
    /// Chance that an unconstrained (type, attr) slot gets a value.
    pub approp_density: f64,
}

impl Default for SignatureShape {
    fn default() -> Self {
        SignatureShape {
            types: 1..=8,
            species: 1..=4,
            attrs: 0..=3,
            extra_parent: 0.25,
            approp_density: 0.35,
        }
    }
}

/// A valid signature of the requested shape. Types are named `t0, t1, ...`
/// and attributes `f0, f1, ...`; every type after `t0` refines at least one
/// earlier type, so `t0` is the unique most general type.
pub fn signature<R: Rng + ?Sized>(rng: &mut R, shape: &SignatureShape) -> Signature {
    loop {
        if let Some(sig) = try_signature(rng, shape) {
            return sig;
        }
    }
}

fn try_signature<R: Rng + ?Sized>(rng: &mut R, shape: &SignatureShape) -> Option<Signature> {
    let type_count = rng.gen_range(shape.types.clone());
    let attr_count = rng.gen_range(shape.attrs.clone());

    let mut parents: Vec<Vec<usize>> = vec![Vec::new()];
    for t in 1..type_count {
        let mut ps = vec![rng.gen_range(0..t)];
        for p in 0..t {
            if !ps.contains(&p) && rng.gen_bool(shape.extra_parent) {
                ps.push(p);
            }
        }
        parents.push(ps);
    }

    let hierarchy_builder = |with_attrs: bool| {
        let mut b = SignatureBuilder::new();
        for (t, ps) in parents.iter().enumerate() {
            let id = b.add_type(&format!("t{t}")).unwrap();
            for &p in ps {
                let parent = b.type_id(&format!("t{p}")).unwrap();
                b.add_refinement(id, parent);
            }
        }
        if with_attrs {
            for a in 0..attr_count {
                b.add_attr(&format!("f{a}")).unwrap();
            }
        }
        b
    };
    let hierarchy = hierarchy_builder(true).build().ok()?;
    if !shape.species.contains(&hierarchy.species().len()) {
        return None;
    }

    let types: Vec<TypeId> = hierarchy.types().collect();
    let mut builder = hierarchy_builder(true);
    let mut table: Vec<Vec<Option<TypeId>>> = vec![vec![None; attr_count]; type_count];
    // Declaration order is topological, so every strict ancestor's entry is
    // settled before its descendants are visited.
    for (t, &tid) in types.iter().enumerate() {
        for (a, attr) in hierarchy.attrs().enumerate() {
            let lower: Vec<TypeId> = types[..t]
                .iter()
                .filter(|&&anc| hierarchy.sub(anc, tid))
                .filter_map(|anc| table[anc.index()][a])
                .collect();
            let value = if lower.is_empty() {
                if rng.gen_bool(shape.approp_density) {
                    Some(*types.choose(rng).unwrap())
                } else {
                    None
                }
            } else {
                let candidates: Vec<TypeId> = types
                    .iter()
                    .copied()
                    .filter(|&v| lower.iter().all(|&l| hierarchy.sub(l, v)))
                    .collect();
                Some(*candidates.choose(rng)?)
            };
            if let Some(v) = value {
                table[t][a] = Some(v);
                builder.set_approp(tid, attr, v).unwrap();
            }
        }
    }
    builder.build().ok()
}

/// A connected feature structure with `states` states over `sig`.
///
/// A random spanning tree keeps the machine connected; extra edges are added
/// with probability `extra_edges` per free (state, attr) slot. Edges use
/// attributes appropriate for the state's type when possible, and types are
/// drawn to keep a fair share of instances satisfiable.
pub fn feature_structure<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Signature,
    states: usize,
    extra_edges: f64,
) -> FeatureStructure {
    let states = if sig.attr_count() == 0 {
        1
    } else {
        states.max(1)
    };
    let attrs: Vec<_> = sig.attrs().collect();
    let types: Vec<TypeId> = sig.types().collect();

    let mut edges = Vec::new();
    let mut used = vec![vec![false; attrs.len()]; states];
    for s in 1..states {
        let (src, a) = loop {
            let src = rng.gen_range(0..s);
            let a = rng.gen_range(0..attrs.len());
            if !used[src][a] {
                break (src, a);
            }
        };
        used[src][a] = true;
        edges.push((StateId::new(src), attrs[a], StateId::new(s)));
    }
    for (src, slots) in used.iter_mut().enumerate() {
        for (a, slot) in slots.iter_mut().enumerate() {
            if !*slot && rng.gen_bool(extra_edges) {
                *slot = true;
                let dst = rng.gen_range(0..states);
                edges.push((StateId::new(src), attrs[a], StateId::new(dst)));
            }
        }
    }

    let mut theta = Vec::with_capacity(states);
    for s in 0..states {
        let out: Vec<_> = edges
            .iter()
            .filter(|(src, _, _)| src.index() == s)
            .map(|&(_, a, _)| a)
            .collect();
        // Prefer types on which the outgoing attributes are appropriate.
        let fitting: Vec<TypeId> = types
            .iter()
            .copied()
            .filter(|&t| out.iter().all(|&a| sig.app(t, a).is_some()))
            .collect();
        let pool = if !fitting.is_empty() && rng.gen_bool(0.5) {
            &fitting
        } else {
            &types
        };
        // The most general type is also common, as it only constrains via edges.
        let t = if rng.gen_bool(0.3) {
            types[0]
        } else {
            *pool.choose(rng).unwrap()
        };
        theta.push(t);
    }

    let names = (0..states).map(|i| format!("q{i}")).collect();
    let skeleton = Skeleton::new(names, StateId::new(0), edges).expect("spanning tree connects");
    FeatureStructure::new(skeleton, theta).unwrap()
}

/// A valid interpretation with at most `max_objects` objects (at least
/// `sig.species().len() + 1` are always allowed, enough for a canonical model
/// of any single species).
pub fn interpretation<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Signature,
    max_objects: usize,
) -> FiniteInterpretation {
    let max_objects = max_objects.max(1);
    for _ in 0..64 {
        if let Some(i) = try_interpretation(rng, sig, max_objects) {
            return i;
        }
    }
    canonical_model(rng, sig)
}

fn try_interpretation<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Signature,
    max_objects: usize,
) -> Option<FiniteInterpretation> {
    let n = rng.gen_range(1..=max_objects);
    let species: Vec<TypeId> = (0..n)
        .map(|_| *sig.species().choose(rng).unwrap())
        .collect();
    let mut values = Vec::new();
    for (u, &s) in species.iter().enumerate() {
        for a in sig.attrs() {
            if let Some(v) = sig.app(s, a) {
                let targets: Vec<usize> = (0..n).filter(|&w| sig.sub(v, species[w])).collect();
                values.push((u, a, *targets.choose(rng)?));
            }
        }
    }
    let names = (0..n).map(|i| format!("u{i}")).collect();
    FiniteInterpretation::new(names, species, values, sig).ok()
}

fn canonical_model<R: Rng + ?Sized>(rng: &mut R, sig: &Signature) -> FiniteInterpretation {
    let species = *sig.species().choose(rng).unwrap();
    let skeleton = Skeleton::new(vec!["u0".into()], StateId::new(0), []).unwrap();
    let single = ResolvedFeatureStructure::new(skeleton, vec![species], sig).unwrap();
    morph::morph_to_interpretation(&morph::witness(&single, sig), sig).expect("witness is a morph")
}
