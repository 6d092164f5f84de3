//! Finite interpretations: objects with species and partial attribute
//! functions respecting appropriateness in both directions.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fstruct::{FeatureStructure, Path, Skeleton, StateId};
use crate::morph::{self, MorphAutomaton};
use crate::signature::{AttrId, Signature, TypeId};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(u32);

impl ObjectId {
    pub fn new(index: usize) -> Self {
        ObjectId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInterpretation {
    names: Vec<String>,
    index: HashMap<String, ObjectId>,
    species_of: Vec<TypeId>,
    /// `values[attr][object]`
    values: Vec<Vec<Option<ObjectId>>>,
}

impl FiniteInterpretation {
    /// Builds and validates an interpretation. `values` lists
    /// `(object, attr, object)` triples by object index.
    pub fn new(
        names: Vec<String>,
        species_of: Vec<TypeId>,
        values: impl IntoIterator<Item = (usize, AttrId, usize)>,
        sig: &Signature,
    ) -> Result<Self> {
        if species_of.len() != names.len() {
            return Err(Error::Malformed(format!(
                "{} species for {} objects",
                species_of.len(),
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !text::is_ident(name) {
                return Err(Error::Malformed(format!(
                    "`{name}` is not a valid identifier"
                )));
            }
            if index.insert(name.clone(), ObjectId::new(i)).is_some() {
                return Err(Error::Duplicate {
                    kind: "object",
                    name: name.clone(),
                });
            }
        }
        let mut table = vec![vec![None; names.len()]; sig.attr_count()];
        for (u, a, v) in values {
            if u >= names.len() || v >= names.len() {
                return Err(Error::Malformed("attribute value out of range".into()));
            }
            if table[a.index()][u].replace(ObjectId::new(v)).is_some() {
                return Err(Error::Duplicate {
                    kind: "value for object",
                    name: format!("{} {}", names[u], sig.attr_name(a)),
                });
            }
        }
        let interp = FiniteInterpretation {
            names,
            index,
            species_of,
            values: table,
        };
        interp.validate(sig)?;
        Ok(interp)
    }

    /// Parses `obj <id> <species>` and `val <obj> <attr> <obj>` lines.
    pub fn parse(src: &str, sig: &Signature) -> Result<Self> {
        let mut names = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut species = Vec::new();
        let mut vals = Vec::new();
        for tokens in text::lines(src) {
            let kw = tokens[0];
            match kw.text {
                "obj" => {
                    text::expect_arity(&tokens, 3, "obj <id> <species>")?;
                    let name = tokens[1].ident()?;
                    let ty = sig
                        .type_id(tokens[2].ident()?)
                        .map_err(|e| tokens[2].error(e.to_string()))?;
                    if index.insert(name, names.len()).is_some() {
                        return Err(tokens[1].error(format!("duplicate object `{name}`")));
                    }
                    names.push(name.to_string());
                    species.push(ty);
                }
                "val" => {
                    text::expect_arity(&tokens, 4, "val <obj> <attr> <obj>")?;
                    tokens[1].ident()?;
                    tokens[3].ident()?;
                    let attr = sig
                        .attr_id(tokens[2].ident()?)
                        .map_err(|e| tokens[2].error(e.to_string()))?;
                    vals.push((tokens[1], attr, tokens[3]));
                }
                other => return Err(kw.error(format!("unknown declaration `{other}`"))),
            }
        }
        let mut resolved = Vec::with_capacity(vals.len());
        for (u, a, v) in vals {
            let lookup = |tok: text::Token<'_>| {
                index
                    .get(tok.text)
                    .copied()
                    .ok_or_else(|| tok.error(format!("unknown object `{}`", tok.text)))
            };
            resolved.push((lookup(u)?, a, lookup(v)?));
        }
        Self::new(names, species, resolved, sig)
    }

    fn validate(&self, sig: &Signature) -> Result<()> {
        for u in self.objects() {
            let s = self.species_of(u);
            if !sig.is_species(s) {
                return Err(Error::NotSpecies {
                    name: self.name(u).to_string(),
                    ty: sig.type_name(s).to_string(),
                });
            }
        }
        for u in self.objects() {
            let s = self.species_of(u);
            for a in sig.attrs() {
                match (sig.app(s, a), self.value(a, u)) {
                    (None, None) => {}
                    (Some(_), None) => {
                        return Err(Error::MissingValue {
                            object: self.name(u).to_string(),
                            species: sig.type_name(s).to_string(),
                            attr: sig.attr_name(a).to_string(),
                        })
                    }
                    (None, Some(v)) => {
                        return Err(Error::IllTyped {
                            state: self.name(u).to_string(),
                            attr: sig.attr_name(a).to_string(),
                            target: self.name(v).to_string(),
                            detail: format!(
                                "approp({}, {}) is undefined",
                                sig.type_name(s),
                                sig.attr_name(a)
                            ),
                        })
                    }
                    (Some(required), Some(v)) => {
                        if !sig.sub(required, self.species_of(v)) {
                            return Err(Error::IllTyped {
                                state: self.name(u).to_string(),
                                attr: sig.attr_name(a).to_string(),
                                target: self.name(v).to_string(),
                                detail: format!(
                                    "{} does not subsume {}",
                                    sig.type_name(required),
                                    sig.type_name(self.species_of(v))
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Objects in file order.
    pub fn objects(&self) -> impl ExactSizeIterator<Item = ObjectId> {
        (0..self.names.len()).map(ObjectId::new)
    }

    pub fn name(&self, u: ObjectId) -> &str {
        &self.names[u.index()]
    }

    pub fn object_id(&self, name: &str) -> Result<ObjectId> {
        self.index.get(name).copied().ok_or_else(|| Error::Unknown {
            kind: "object",
            name: name.to_string(),
        })
    }

    pub fn species_of(&self, u: ObjectId) -> TypeId {
        self.species_of[u.index()]
    }

    pub fn value(&self, a: AttrId, u: ObjectId) -> Option<ObjectId> {
        self.values[a.index()][u.index()]
    }

    /// Applies the path's attribute functions left to right.
    pub fn path_eval(&self, u: ObjectId, path: &Path) -> Option<ObjectId> {
        path.attrs()
            .iter()
            .try_fold(u, |obj, &a| self.value(a, obj))
    }

    pub fn render(&self, sig: &Signature) -> String {
        let mut out = String::new();
        for u in self.objects() {
            writeln!(
                out,
                "obj {} {}",
                self.name(u),
                sig.type_name(self.species_of(u))
            )
            .unwrap();
        }
        for u in self.objects() {
            for a in sig.attrs() {
                if let Some(v) = self.value(a, u) {
                    writeln!(
                        out,
                        "val {} {} {}",
                        self.name(u),
                        sig.attr_name(a),
                        self.name(v)
                    )
                    .unwrap();
                }
            }
        }
        out
    }
}

/// The part of `i` reachable from `u`, as a morph machine rooted at `u`.
/// Nodes are named after objects and listed breadth-first.
pub fn abstraction(i: &FiniteInterpretation, u: ObjectId) -> MorphAutomaton {
    let attr_count = i.values.len();
    let mut node_of: HashMap<ObjectId, StateId> = HashMap::from([(u, StateId::new(0))]);
    let mut order = vec![u];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([u]);
    while let Some(obj) = queue.pop_front() {
        let src = node_of[&obj];
        for a in 0..attr_count {
            let Some(target) = i.values[a][obj.index()] else {
                continue;
            };
            let dst = *node_of.entry(target).or_insert_with(|| {
                order.push(target);
                queue.push_back(target);
                StateId::new(order.len() - 1)
            });
            edges.push((src, AttrId::from_index(a), dst));
        }
    }
    let names = order.iter().map(|&o| i.name(o).to_string()).collect();
    let lambda = order.iter().map(|&o| i.species_of(o)).collect();
    let skeleton =
        Skeleton::new(names, StateId::new(0), edges).expect("reachable part is connected");
    MorphAutomaton::new(skeleton, lambda).expect("label count matches")
}

/// `f` is true of `u` under `i`: decided as `f` approximating the abstraction
/// of `u`.
pub fn truth_of(
    f: &FeatureStructure,
    i: &FiniteInterpretation,
    u: ObjectId,
    sig: &Signature,
) -> bool {
    morph::approximates(f, &abstraction(i, u), sig)
}

/// Checks the truth conditions directly over every path of length at most
/// `depth` that runs in `f`: all paths running to a common state must be
/// defined on `u`, land on one object, and that object's species must refine
/// the state's type.
///
/// Exact once `depth >= |states| * |universe|`.
pub fn truth_bounded(
    f: &FeatureStructure,
    i: &FiniteInterpretation,
    u: ObjectId,
    depth: usize,
    sig: &Signature,
) -> bool {
    let sk = f.skeleton();
    let mut landed: Vec<Option<ObjectId>> = vec![None; sk.len()];
    // Depth-first over (state, object, path length).
    let mut stack = vec![(sk.root(), Some(u), 0usize)];
    while let Some((q, obj, len)) = stack.pop() {
        let Some(obj) = obj else { return false };
        match landed[q.index()] {
            Some(prev) if prev != obj => return false,
            _ => landed[q.index()] = Some(obj),
        }
        if !sig.sub(f.type_of(q), i.species_of(obj)) {
            return false;
        }
        if len < depth {
            for (a, next) in sk.out_edges(q) {
                stack.push((next, i.value(a, obj), len + 1));
            }
        }
    }
    true
}
