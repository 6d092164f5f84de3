//! Resolvant enumeration and the satisfiability decision.
//!
//! Two routes compute the same list: [`res_naive`] generates every total
//! species assignment and filters it through [`test1`] and [`test2`];
//! [`res_refined`] prunes per-state species domains with arc consistency over
//! the transition edges and backtracks in lexicographic order. Both return
//! assignments in ascending lexicographic order (state declaration order, then
//! species declaration order).

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::fstruct::{self, FeatureStructure, ResolvedFeatureStructure, Skeleton};
use crate::signature::{AttrId, Signature, TypeId};
use crate::unify::ConstrainedSkeleton;

/// One species per state, indexed by state.
pub type Assignment = Vec<TypeId>;

/// Candidate bound for [`res_naive`].
pub const DEFAULT_NAIVE_BOUND: u128 = 10_000_000;

/// A skeleton and the sorted, duplicate-free list of species assignments that
/// resolve it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvantSet {
    skeleton: ConstrainedSkeleton,
    assignments: Vec<Assignment>,
    fingerprint: u64,
}

impl ResolvantSet {
    pub(crate) fn new(
        skeleton: ConstrainedSkeleton,
        assignments: Vec<Assignment>,
        sig: &Signature,
    ) -> Self {
        debug_assert!(assignments.windows(2).all(|w| w[0] < w[1]));
        ResolvantSet {
            skeleton,
            assignments,
            fingerprint: sig.fingerprint(),
        }
    }

    pub fn skeleton(&self) -> &ConstrainedSkeleton {
        &self.skeleton
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Fingerprint of the signature the set was computed over.
    pub fn signature_fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn resolvants(&self) -> impl Iterator<Item = ResolvedFeatureStructure> + '_ {
        self.assignments.iter().map(|rho| {
            ResolvedFeatureStructure::unchecked(self.skeleton.skeleton().clone(), rho.clone())
                .expect("assignment length matches skeleton")
        })
    }

    pub fn first(&self) -> Option<ResolvedFeatureStructure> {
        self.resolvants().next()
    }

    /// Each resolvant in the machine grammar followed by a `---` line, then a
    /// `resolvants: N` count line.
    pub fn render(&self, sig: &Signature) -> String {
        let mut out = String::new();
        for rho in &self.assignments {
            out.push_str(&fstruct::render_machine(self.skeleton.skeleton(), rho, sig));
            out.push_str("---\n");
        }
        out.push_str(&format!("resolvants: {}\n", self.assignments.len()));
        out
    }
}

/// GEN: every total function from `state_count` states to species, in
/// lexicographic order (first state most significant).
pub fn gen(state_count: usize, sig: &Signature) -> Gen<'_> {
    let species = sig.species();
    let current = (state_count > 0 && !species.is_empty()).then(|| vec![0; state_count]);
    Gen { species, current }
}

pub struct Gen<'a> {
    species: &'a [TypeId],
    current: Option<Vec<usize>>,
}

impl Iterator for Gen<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let ranks = self.current.as_mut()?;
        let out = ranks.iter().map(|&r| self.species[r]).collect();
        let mut i = ranks.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            ranks[i] += 1;
            if ranks[i] < self.species.len() {
                break;
            }
            ranks[i] = 0;
        }
        Some(out)
    }
}

/// `species_count ^ state_count`, saturating.
pub fn candidate_count(state_count: usize, species_count: usize) -> u128 {
    (0..state_count).fold(1u128, |acc, _| acc.saturating_mul(species_count as u128))
}

/// TEST1: every edge `(q, α)` has `approp(ρ(q), α)` defined and subsuming
/// `ρ(δ(q, α))`.
pub fn test1(skeleton: &Skeleton, rho: &[TypeId], sig: &Signature) -> bool {
    fstruct::ill_typed_edge(skeleton, rho, sig).is_none()
}

/// TEST2: `θ(q) ⪯ ρ(q)` at every state.
pub fn test2(theta: &[TypeId], rho: &[TypeId], sig: &Signature) -> bool {
    theta.len() == rho.len() && theta.iter().zip(rho).all(|(&t, &r)| sig.sub(t, r))
}

pub fn res_naive(f: &FeatureStructure, sig: &Signature) -> Result<ResolvantSet> {
    res_naive_bounded(f, sig, DEFAULT_NAIVE_BOUND)
}

/// Generate-and-test over [`gen`]; refuses to start when the candidate count
/// exceeds `bound`.
pub fn res_naive_bounded(
    f: &FeatureStructure,
    sig: &Signature,
    bound: u128,
) -> Result<ResolvantSet> {
    let skeleton = f.skeleton();
    let candidates = candidate_count(skeleton.len(), sig.species().len());
    if candidates > bound {
        return Err(Error::TooManyCandidates { candidates, bound });
    }
    let assignments = gen(skeleton.len(), sig)
        .filter(|rho| test1(skeleton, rho, sig) && test2(f.theta(), rho, sig))
        .collect();
    Ok(ResolvantSet::new(
        ConstrainedSkeleton::from(f),
        assignments,
        sig,
    ))
}

pub fn res_refined(f: &FeatureStructure, sig: &Signature) -> ResolvantSet {
    crate::unify::resolve_constrained(&ConstrainedSkeleton::from(f), sig)
}

/// SAT: whether `f` has at least one resolvant. Stops at the first one found.
pub fn sat(f: &FeatureStructure, sig: &Signature) -> bool {
    let cs = ConstrainedSkeleton::from(f);
    let mut found = false;
    let _ = enumerate(&cs, sig, &mut |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

pub(crate) fn enumerate_all(cs: &ConstrainedSkeleton, sig: &Signature) -> Vec<Assignment> {
    let mut out = Vec::new();
    let _ = enumerate(cs, sig, &mut |rho| {
        out.push(rho.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Visits every species assignment satisfying well-typing and all state
/// constraints, in lexicographic order.
pub(crate) fn enumerate(
    cs: &ConstrainedSkeleton,
    sig: &Signature,
    visit: &mut dyn FnMut(&[TypeId]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let search = Search::new(cs, sig);
    let Some(domains) = search.initial_domains() else {
        return ControlFlow::Continue(());
    };
    let mut scratch = vec![sig.species()[0]; cs.skeleton().len()];
    search.descend(0, domains, &mut scratch, visit)
}

struct Search<'a> {
    sig: &'a Signature,
    cs: &'a ConstrainedSkeleton,
    edges: Vec<(usize, AttrId, usize)>,
    incident: Vec<Vec<usize>>,
    /// `support[species_rank][attr]`: species ranks a target may take.
    support: Vec<Vec<Option<FixedBitSet>>>,
}

type Domains = Vec<FixedBitSet>;

impl<'a> Search<'a> {
    fn new(cs: &'a ConstrainedSkeleton, sig: &'a Signature) -> Self {
        let skeleton = cs.skeleton();
        let edges: Vec<_> = skeleton
            .edges()
            .map(|(s, a, t)| (s.index(), a, t.index()))
            .collect();
        let mut incident = vec![Vec::new(); skeleton.len()];
        for (i, &(s, _, t)) in edges.iter().enumerate() {
            incident[s].push(i);
            if t != s {
                incident[t].push(i);
            }
        }
        let n = sig.species().len();
        let support = sig
            .species()
            .iter()
            .map(|&s| {
                sig.attrs()
                    .map(|a| {
                        sig.app(s, a).map(|v| {
                            let mut set = FixedBitSet::with_capacity(n);
                            for (r, &target) in sig.species().iter().enumerate() {
                                if sig.sub(v, target) {
                                    set.insert(r);
                                }
                            }
                            set
                        })
                    })
                    .collect()
            })
            .collect();
        Search {
            sig,
            cs,
            edges,
            incident,
            support,
        }
    }

    fn support(&self, rank: usize, a: AttrId) -> Option<&FixedBitSet> {
        self.support[rank][a.index()].as_ref()
    }

    /// Species allowed by the state constraints and self loops, then made arc
    /// consistent.
    fn initial_domains(&self) -> Option<Domains> {
        let species = self.sig.species();
        let mut domains: Domains = self
            .cs
            .skeleton()
            .states()
            .map(|q| {
                let mut d = FixedBitSet::with_capacity(species.len());
                for (r, &s) in species.iter().enumerate() {
                    if self.cs.constraint(q).iter().all(|&c| self.sig.sub(c, s)) {
                        d.insert(r);
                    }
                }
                d
            })
            .collect();
        for &(s, a, t) in &self.edges {
            if s == t {
                let keep: Vec<usize> = domains[s]
                    .ones()
                    .filter(|&r| self.support(r, a).is_some_and(|sup| sup.contains(r)))
                    .collect();
                domains[s] = bitset(species.len(), keep);
            }
        }
        if domains.iter().any(|d| d.is_clear()) {
            return None;
        }
        let all: Vec<usize> = (0..self.edges.len()).collect();
        self.propagate(&mut domains, all).then_some(domains)
    }

    /// AC-3 over the edge constraints. Returns false on a wipe-out.
    fn propagate(&self, domains: &mut Domains, initial: Vec<usize>) -> bool {
        let species_count = self.sig.species().len();
        let mut queued = vec![false; self.edges.len()];
        let mut queue = std::collections::VecDeque::with_capacity(initial.len());
        for e in initial {
            if !queued[e] {
                queued[e] = true;
                queue.push_back(e);
            }
        }
        while let Some(e) = queue.pop_front() {
            queued[e] = false;
            let (x, a, y) = self.edges[e];
            if x == y {
                continue;
            }
            let before_x = domains[x].count_ones(..);
            let keep_x: Vec<usize> = domains[x]
                .ones()
                .filter(|&r| {
                    self.support(r, a)
                        .is_some_and(|sup| !sup.is_disjoint(&domains[y]))
                })
                .collect();
            let mut reachable = FixedBitSet::with_capacity(species_count);
            for &r in &keep_x {
                reachable.union_with(self.support(r, a).unwrap());
            }
            let changed_x = keep_x.len() != before_x;
            domains[x] = bitset(species_count, keep_x);
            let before_y = domains[y].count_ones(..);
            domains[y].intersect_with(&reachable);
            let changed_y = domains[y].count_ones(..) != before_y;

            if domains[x].is_clear() || domains[y].is_clear() {
                return false;
            }
            for (changed, state) in [(changed_x, x), (changed_y, y)] {
                if changed {
                    for &other in &self.incident[state] {
                        if other != e && !queued[other] {
                            queued[other] = true;
                            queue.push_back(other);
                        }
                    }
                }
            }
        }
        true
    }

    fn descend(
        &self,
        state: usize,
        domains: Domains,
        scratch: &mut Vec<TypeId>,
        visit: &mut dyn FnMut(&[TypeId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if state == domains.len() {
            return visit(scratch);
        }
        let species = self.sig.species();
        for r in domains[state].ones() {
            let mut next = domains.clone();
            next[state] = bitset(species.len(), [r]);
            if self.propagate(&mut next, self.incident[state].clone()) {
                scratch[state] = species[r];
                self.descend(state + 1, next, scratch, visit)?;
            }
        }
        ControlFlow::Continue(())
    }
}

fn bitset(len: usize, ones: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(len);
    set.extend(ones);
    set
}
