//! Finite signatures: types ordered by subsumption, the derived species,
//! attributes and the appropriateness table.
//!
//! Subsumption is read in the "more general" direction: `sub(t1, t2)` holds
//! when `t1` is at least as general as `t2`, so every object of type `t2` is
//! also of type `t1`. Species are the maximal (most specific) types.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::text::{self, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrId(u32);

impl AttrId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(index: usize) -> Self {
        AttrId(index as u32)
    }
}

/// An immutable, validated signature.
///
/// Type and species order is declaration order. The species order doubles as
/// the fixed enumeration used whenever "the least species above `t`" is
/// needed.
#[derive(Debug, Clone)]
pub struct Signature {
    type_names: Vec<String>,
    type_index: HashMap<String, TypeId>,
    attr_names: Vec<String>,
    attr_index: HashMap<String, AttrId>,
    /// Declared refinement edges, `parents[child]`.
    parents: Vec<Vec<TypeId>>,
    /// `above[t]` holds every `t2` with `t ⪯ t2` (reflexive-transitive).
    above: Vec<FixedBitSet>,
    species: Vec<TypeId>,
    species_rank: Vec<Option<usize>>,
    /// Row-major `type × attr`.
    approp: Vec<Option<TypeId>>,
    fingerprint: u64,
}

impl Signature {
    /// Parses the line-based signature grammar.
    pub fn parse(src: &str) -> Result<Signature> {
        let mut builder = SignatureBuilder::new();
        let mut approps: Vec<[Token<'_>; 3]> = Vec::new();

        for tokens in text::lines(src) {
            let keyword = tokens[0];
            match keyword.text {
                "type" => {
                    if tokens.len() < 2 || (tokens.len() > 2 && tokens[2].text != "refines") {
                        return Err(keyword
                            .error("expected `type <name>` or `type <name> refines <name> ...`"));
                    }
                    if tokens.len() == 3 {
                        return Err(tokens[2].error("`refines` needs at least one supertype"));
                    }
                    let name = tokens[1].ident()?;
                    let mut parents = Vec::new();
                    for parent in &tokens[3.min(tokens.len())..] {
                        let id = builder.type_id(parent.ident()?).map_err(|_| {
                            parent.error(format!(
                                "unknown type `{}` (supertypes must be declared first)",
                                parent.text
                            ))
                        })?;
                        parents.push(id);
                    }
                    let child = builder
                        .add_type(name)
                        .map_err(|e| tokens[1].error(e.to_string()))?;
                    for parent in parents {
                        builder.add_refinement(child, parent);
                    }
                }
                "attr" => {
                    text::expect_arity(&tokens, 2, "attr <name>")?;
                    builder
                        .add_attr(tokens[1].ident()?)
                        .map_err(|e| tokens[1].error(e.to_string()))?;
                }
                "approp" => {
                    text::expect_arity(&tokens, 4, "approp <type> <attr> <type>")?;
                    approps.push([tokens[1], tokens[2], tokens[3]]);
                }
                other => {
                    return Err(keyword.error(format!("unknown declaration `{other}`")));
                }
            }
        }

        for [ty, attr, value] in approps {
            let t = builder
                .type_id(ty.ident()?)
                .map_err(|e| ty.error(e.to_string()))?;
            let a = builder
                .attr_id(attr.ident()?)
                .map_err(|e| attr.error(e.to_string()))?;
            let v = builder
                .type_id(value.ident()?)
                .map_err(|e| value.error(e.to_string()))?;
            builder
                .set_approp(t, a, v)
                .map_err(|e| ty.error(e.to_string()))?;
        }

        builder.build()
    }

    pub fn type_count(&self) -> usize {
        self.type_names.len()
    }

    pub fn attr_count(&self) -> usize {
        self.attr_names.len()
    }

    pub fn types(&self) -> impl ExactSizeIterator<Item = TypeId> + '_ {
        (0..self.type_names.len() as u32).map(TypeId)
    }

    pub fn attrs(&self) -> impl ExactSizeIterator<Item = AttrId> + '_ {
        (0..self.attr_names.len() as u32).map(AttrId)
    }

    /// Species in declaration order.
    pub fn species(&self) -> &[TypeId] {
        &self.species
    }

    pub fn is_species(&self, t: TypeId) -> bool {
        self.species_rank[t.index()].is_some()
    }

    /// Position of `t` in the species order, if it is a species.
    pub fn species_rank(&self, t: TypeId) -> Option<usize> {
        self.species_rank[t.index()]
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.type_names[t.index()]
    }

    pub fn attr_name(&self, a: AttrId) -> &str {
        &self.attr_names[a.index()]
    }

    pub fn type_id(&self, name: &str) -> Result<TypeId> {
        self.type_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "type",
                name: name.to_string(),
            })
    }

    pub fn attr_id(&self, name: &str) -> Result<AttrId> {
        self.attr_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "attribute",
                name: name.to_string(),
            })
    }

    /// Declared (unclosed) supertypes of `t`.
    pub fn parents(&self, t: TypeId) -> &[TypeId] {
        &self.parents[t.index()]
    }

    /// SUB: `t1 ⪯ t2`, i.e. `t1` is at least as general as `t2`.
    pub fn sub(&self, t1: TypeId, t2: TypeId) -> bool {
        self.above[t1.index()].contains(t2.index())
    }

    /// APP: the appropriate value type of `a` on `t`, `None` when undefined.
    pub fn app(&self, t: TypeId, a: AttrId) -> Option<TypeId> {
        self.approp[t.index() * self.attr_names.len() + a.index()]
    }

    /// All species refining `t`, in species order.
    pub fn species_at_least(&self, t: TypeId) -> Vec<TypeId> {
        self.species
            .iter()
            .copied()
            .filter(|&s| self.sub(t, s))
            .collect()
    }

    /// The first species (in declaration order) refining `t`.
    pub fn least_species_at_least(&self, t: TypeId) -> Option<TypeId> {
        self.species.iter().copied().find(|&s| self.sub(t, s))
    }

    /// Scans every defined `approp(σ, α)` on a species and checks that some
    /// species refines it.
    pub fn check_rational(&self) -> bool {
        self.rationality_violation().is_none()
    }

    pub fn rationality_violation(&self) -> Option<Error> {
        for &s in &self.species {
            for a in self.attrs() {
                if let Some(v) = self.app(s, a) {
                    if self.least_species_at_least(v).is_none() {
                        return Some(Error::Irrational {
                            species: self.type_name(s).to_string(),
                            attr: self.attr_name(a).to_string(),
                            value: self.type_name(v).to_string(),
                        });
                    }
                }
            }
        }
        None
    }

    /// Content hash, used to tell apart results computed over different
    /// signatures.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Entries of the appropriateness table in (type, attribute) order.
    pub fn approp_entries(&self) -> impl Iterator<Item = (TypeId, AttrId, TypeId)> + '_ {
        self.types()
            .flat_map(move |t| self.attrs().map(move |a| (t, a)))
            .filter_map(move |(t, a)| self.app(t, a).map(|v| (t, a, v)))
    }
}

/// Renders the signature back into the file grammar.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.types() {
            write!(f, "type {}", self.type_name(t))?;
            let parents = self.parents(t);
            if !parents.is_empty() {
                write!(f, " refines")?;
                for &p in parents {
                    write!(f, " {}", self.type_name(p))?;
                }
            }
            writeln!(f)?;
        }
        for a in self.attrs() {
            writeln!(f, "attr {}", self.attr_name(a))?;
        }
        for (t, a, v) in self.approp_entries() {
            writeln!(
                f,
                "approp {} {} {}",
                self.type_name(t),
                self.attr_name(a),
                self.type_name(v)
            )?;
        }
        Ok(())
    }
}

/// Incremental construction of a [`Signature`]; all invariants are checked in
/// [`SignatureBuilder::build`].
#[derive(Debug, Default, Clone)]
pub struct SignatureBuilder {
    type_names: Vec<String>,
    type_index: HashMap<String, TypeId>,
    attr_names: Vec<String>,
    attr_index: HashMap<String, AttrId>,
    parents: Vec<Vec<TypeId>>,
    approp: HashMap<(TypeId, AttrId), TypeId>,
}

impl SignatureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_type(&mut self, name: &str) -> Result<TypeId> {
        if !text::is_ident(name) {
            return Err(Error::Malformed(format!(
                "`{name}` is not a valid identifier"
            )));
        }
        if self.type_index.contains_key(name) {
            return Err(Error::Duplicate {
                kind: "type",
                name: name.to_string(),
            });
        }
        let id = TypeId(self.type_names.len() as u32);
        self.type_names.push(name.to_string());
        self.type_index.insert(name.to_string(), id);
        self.parents.push(Vec::new());
        Ok(id)
    }

    /// Declares `child` to refine `parent` (so `parent ⪯ child`).
    pub fn add_refinement(&mut self, child: TypeId, parent: TypeId) {
        let ps = &mut self.parents[child.index()];
        if !ps.contains(&parent) {
            ps.push(parent);
        }
    }

    pub fn add_attr(&mut self, name: &str) -> Result<AttrId> {
        if !text::is_ident(name) {
            return Err(Error::Malformed(format!(
                "`{name}` is not a valid identifier"
            )));
        }
        if self.attr_index.contains_key(name) {
            return Err(Error::Duplicate {
                kind: "attribute",
                name: name.to_string(),
            });
        }
        let id = AttrId(self.attr_names.len() as u32);
        self.attr_names.push(name.to_string());
        self.attr_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn set_approp(&mut self, t: TypeId, a: AttrId, value: TypeId) -> Result<()> {
        if self.approp.insert((t, a), value).is_some() {
            return Err(Error::Duplicate {
                kind: "appropriateness entry",
                name: format!(
                    "{} {}",
                    self.type_names[t.index()],
                    self.attr_names[a.index()]
                ),
            });
        }
        Ok(())
    }

    pub fn type_id(&self, name: &str) -> Result<TypeId> {
        self.type_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "type",
                name: name.to_string(),
            })
    }

    pub fn attr_id(&self, name: &str) -> Result<AttrId> {
        self.attr_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Unknown {
                kind: "attribute",
                name: name.to_string(),
            })
    }

    pub fn build(self) -> Result<Signature> {
        let n = self.type_names.len();
        let attr_count = self.attr_names.len();

        let mut above: Vec<FixedBitSet> = (0..n)
            .map(|t| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert(t);
                row
            })
            .collect();
        for (child, ps) in self.parents.iter().enumerate() {
            for p in ps {
                above[p.index()].insert(child);
            }
        }
        close_transitively(&mut above);

        for t in 0..n {
            for u in above[t].ones() {
                if u != t && above[u].contains(t) {
                    return Err(Error::Cycle(self.type_names[t].clone()));
                }
            }
        }

        let mut species = Vec::new();
        let mut species_rank = vec![None; n];
        for t in 0..n {
            if above[t].count_ones(..) == 1 {
                species_rank[t] = Some(species.len());
                species.push(TypeId(t as u32));
            }
        }

        let mut approp = vec![None; n * attr_count];
        for (&(t, a), &v) in &self.approp {
            approp[t.index() * attr_count + a.index()] = Some(v);
        }

        let mut sig = Signature {
            type_names: self.type_names,
            type_index: self.type_index,
            attr_names: self.attr_names,
            attr_index: self.attr_index,
            parents: self.parents,
            above,
            species,
            species_rank,
            approp,
            fingerprint: 0,
        };

        if let Some(err) = monotonicity_violation(&sig) {
            return Err(err);
        }
        if let Some(err) = sig.rationality_violation() {
            return Err(err);
        }

        let mut hasher = DefaultHasher::new();
        sig.to_string().hash(&mut hasher);
        sig.fingerprint = hasher.finish();
        Ok(sig)
    }
}

/// Warshall-style closure over bitset rows: `rows[i]` gains `rows[k]`
/// whenever it contains `k`.
fn close_transitively(rows: &mut [FixedBitSet]) {
    for k in 0..rows.len() {
        let row_k = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
}

fn monotonicity_violation(sig: &Signature) -> Option<Error> {
    for t in sig.types() {
        for a in sig.attrs() {
            let Some(v) = sig.app(t, a) else { continue };
            for specific in sig.above[t.index()].ones().map(|u| TypeId(u as u32)) {
                if specific == t {
                    continue;
                }
                let detail = match sig.app(specific, a) {
                    None => format!(
                        "approp({}, {}) is undefined",
                        sig.type_name(specific),
                        sig.attr_name(a)
                    ),
                    Some(w) if !sig.sub(v, w) => format!(
                        "approp({}, {}) = {} does not refine {}",
                        sig.type_name(specific),
                        sig.attr_name(a),
                        sig.type_name(w),
                        sig.type_name(v)
                    ),
                    Some(_) => continue,
                };
                return Some(Error::Monotonicity {
                    general: sig.type_name(t).to_string(),
                    specific: sig.type_name(specific).to_string(),
                    attr: sig.attr_name(a).to_string(),
                    detail,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::SIG_A;

    fn ids(sig: &Signature, names: &[&str]) -> Vec<TypeId> {
        names.iter().map(|n| sig.type_id(n).unwrap()).collect()
    }

    #[test]
    fn species_are_the_unrefined_types() {
        let sig = Signature::parse("type top\ntype a refines top\ntype b refines top\n").unwrap();
        assert_eq!(sig.species(), ids(&sig, &["a", "b"]).as_slice());
    }

    #[test]
    fn missing_inherited_approp_is_a_monotonicity_error() {
        let err = Signature::parse("type top\ntype a refines top\nattr F\napprop top F top\n")
            .unwrap_err();
        match err {
            Error::Monotonicity {
                general,
                specific,
                attr,
                ..
            } => assert_eq!(
                (general.as_str(), specific.as_str(), attr.as_str()),
                ("top", "a", "F")
            ),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sig_a_closure_matches_exhaustive_check() {
        let sig = Signature::parse(SIG_A).unwrap();
        let [top, t, a, b] = ids(&sig, &["top", "t", "a", "b"])[..] else {
            unreachable!()
        };
        // Expected order written out by hand over all 16 pairs.
        let expected = [
            (top, top),
            (top, t),
            (top, a),
            (top, b),
            (t, t),
            (t, a),
            (t, b),
            (a, a),
            (b, b),
        ];
        for x in [top, t, a, b] {
            for y in [top, t, a, b] {
                assert_eq!(sig.sub(x, y), expected.contains(&(x, y)), "{x:?} {y:?}");
            }
        }
        assert_eq!(sig.species(), &[a, b]);
        let f = sig.attr_id("f").unwrap();
        assert_eq!(sig.app(a, f), Some(a));
        assert_eq!(sig.app(b, f), None);
        assert_eq!(sig.app(t, f), None);
        assert_eq!(sig.species_at_least(t), vec![a, b]);
        assert_eq!(sig.species_at_least(a), vec![a]);
        assert_eq!(sig.species_at_least(top), vec![a, b]);
        assert!(sig.check_rational());
    }

    #[test]
    fn single_type_signature_is_rational() {
        let sig = Signature::parse("type only\n").unwrap();
        assert!(sig.check_rational());
        assert_eq!(sig.species().len(), 1);
    }

    #[test]
    fn forward_reference_is_rejected_with_position() {
        let err = Signature::parse("type a refines b\ntype b\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Syntax {
                    line: 1,
                    column: 16,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(Signature::parse("type a\ntype a\n").is_err());
        assert!(Signature::parse("type a\nattr f\nattr f\n").is_err());
        assert!(Signature::parse("type a\nattr f\napprop a f a\napprop a f a\n").is_err());
    }

    #[test]
    fn unknown_names_in_approp() {
        let err = Signature::parse("type a\napprop a f a\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Syntax {
                    line: 2,
                    column: 10,
                    ..
                }
            ),
            "{err:?}"
        );
        assert!(matches!(
            Signature::parse("type a\nattr f\napprop a f z\n").unwrap_err(),
            Error::Syntax { .. }
        ));
        assert!(Signature::parse("sort a\n").is_err());
        assert!(Signature::parse("type a refines\n").is_err());
        assert!(Signature::parse("type a.b\n").is_err());
    }

    #[test]
    fn builder_rejects_cycles() {
        let mut b = SignatureBuilder::new();
        let x = b.add_type("x").unwrap();
        let y = b.add_type("y").unwrap();
        b.add_refinement(x, y);
        b.add_refinement(y, x);
        assert!(matches!(b.build(), Err(Error::Cycle(_))));
    }

    #[test]
    fn non_refining_value_is_a_monotonicity_error() {
        let src = "type top\ntype a refines top\ntype b refines top\nattr f\napprop top f a\napprop a f b\n";
        match Signature::parse(src).unwrap_err() {
            Error::Monotonicity {
                general, specific, ..
            } => {
                assert_eq!((general.as_str(), specific.as_str()), ("top", "a"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        let sig = Signature::parse(SIG_A).unwrap();
        let again = Signature::parse(&sig.to_string()).unwrap();
        assert_eq!(sig.to_string(), again.to_string());
        assert_eq!(sig.fingerprint(), again.fingerprint());
    }
}
