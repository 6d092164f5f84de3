//! Feature structures as rooted, connected, deterministic machines with type
//! outputs, and their resolved (species-output) counterparts.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::signature::{AttrId, Signature, TypeId};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(u32);

impl StateId {
    pub fn new(index: usize) -> Self {
        StateId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite sequence of attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<AttrId>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    /// Parses a whitespace- or dot-separated attribute list.
    pub fn parse(src: &str, sig: &Signature) -> Result<Path> {
        src.split(|c: char| c == '.' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|name| sig.attr_id(name))
            .collect::<Result<Vec<_>>>()
            .map(Path)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn attrs(&self) -> &[AttrId] {
        &self.0
    }

    pub fn pushed(&self, a: AttrId) -> Path {
        let mut p = self.0.clone();
        p.push(a);
        Path(p)
    }
}

/// The transition structure shared by feature structures, resolvants and
/// morph automata: named states, a root, and a partial transition function.
///
/// Every state is reachable from the root. State order is declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    root: StateId,
    delta: Vec<BTreeMap<AttrId, StateId>>,
}

impl Skeleton {
    /// Builds a skeleton from named states, the root index and edges given as
    /// `(source, attr, target)` indices into `names`.
    pub fn new(
        names: Vec<String>,
        root: StateId,
        edges: impl IntoIterator<Item = (StateId, AttrId, StateId)>,
    ) -> Result<Skeleton> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !text::is_ident(name) {
                return Err(Error::Malformed(format!(
                    "`{name}` is not a valid identifier"
                )));
            }
            if index.insert(name.clone(), StateId::new(i)).is_some() {
                return Err(Error::Duplicate {
                    kind: "state",
                    name: name.clone(),
                });
            }
        }
        if root.index() >= names.len() {
            return Err(Error::MissingRoot);
        }
        let mut delta = vec![BTreeMap::new(); names.len()];
        for (src, attr, dst) in edges {
            if src.index() >= names.len() || dst.index() >= names.len() {
                return Err(Error::Malformed("edge endpoint out of range".into()));
            }
            if delta[src.index()].insert(attr, dst).is_some() {
                return Err(Error::Duplicate {
                    kind: "edge from state",
                    name: names[src.index()].clone(),
                });
            }
        }
        let skeleton = Skeleton {
            names,
            index,
            root,
            delta,
        };
        let order = skeleton.bfs_order();
        if order.len() != skeleton.len() {
            let mut seen = vec![false; skeleton.len()];
            for s in &order {
                seen[s.index()] = true;
            }
            let first = seen.iter().position(|&v| !v).unwrap();
            return Err(Error::Unreachable(skeleton.names[first].clone()));
        }
        Ok(skeleton)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> {
        (0..self.names.len()).map(StateId::new)
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.index.get(name).copied().ok_or_else(|| Error::Unknown {
            kind: "state",
            name: name.to_string(),
        })
    }

    pub fn step(&self, s: StateId, a: AttrId) -> Option<StateId> {
        self.delta[s.index()].get(&a).copied()
    }

    /// Outgoing edges of `s` in attribute order.
    pub fn out_edges(&self, s: StateId) -> impl Iterator<Item = (AttrId, StateId)> + '_ {
        self.delta[s.index()].iter().map(|(&a, &t)| (a, t))
    }

    /// All edges, by source state then attribute.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, AttrId, StateId)> + '_ {
        self.states()
            .flat_map(move |s| self.out_edges(s).map(move |(a, t)| (s, a, t)))
    }

    pub fn edge_count(&self) -> usize {
        self.delta.iter().map(BTreeMap::len).sum()
    }

    /// The state `path` runs to from the root, if every step is defined.
    pub fn run(&self, path: &Path) -> Option<StateId> {
        self.run_from(self.root, path)
    }

    pub fn run_from(&self, start: StateId, path: &Path) -> Option<StateId> {
        path.attrs().iter().try_fold(start, |s, &a| self.step(s, a))
    }

    /// Reachable states in breadth-first order from the root, exploring
    /// attributes in declaration order.
    pub fn bfs_order(&self) -> Vec<StateId> {
        self.bfs_tree().into_iter().map(|(s, _)| s).collect()
    }

    /// A shortest access path for every state, indexed by state.
    pub fn access_paths(&self) -> Vec<Path> {
        let mut paths = vec![Path::empty(); self.len()];
        for (s, p) in self.bfs_tree() {
            paths[s.index()] = p;
        }
        paths
    }

    fn bfs_tree(&self) -> Vec<(StateId, Path)> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::with_capacity(self.len());
        let mut queue = VecDeque::new();
        seen[self.root.index()] = true;
        queue.push_back((self.root, Path::empty()));
        while let Some((s, p)) = queue.pop_front() {
            for (a, t) in self.out_edges(s) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    queue.push_back((t, p.pushed(a)));
                }
            }
            out.push((s, p));
        }
        out
    }

    /// The unique root-preserving bijection onto `other` that commutes with
    /// the transition functions, if the two skeletons are isomorphic.
    /// `result[s]` is the image of `s`.
    pub fn isomorphism(&self, other: &Skeleton) -> Option<Vec<StateId>> {
        if self.len() != other.len() || self.edge_count() != other.edge_count() {
            return None;
        }
        let mut map: Vec<Option<StateId>> = vec![None; self.len()];
        let mut used = vec![false; other.len()];
        map[self.root.index()] = Some(other.root);
        used[other.root.index()] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(s) = queue.pop_front() {
            let image = map[s.index()]?;
            if self.delta[s.index()].len() != other.delta[image.index()].len() {
                return None;
            }
            for (a, t) in self.out_edges(s) {
                let u = other.step(image, a)?;
                match map[t.index()] {
                    Some(prev) if prev != u => return None,
                    Some(_) => {}
                    None => {
                        if used[u.index()] {
                            return None;
                        }
                        used[u.index()] = true;
                        map[t.index()] = Some(u);
                        queue.push_back(t);
                    }
                }
            }
        }
        map.into_iter().collect()
    }
}

/// A skeleton paired with one output type per state, as read from the
/// machine file grammar (`root`, `node`, `edge` lines).
pub(crate) fn parse_machine(src: &str, sig: &Signature) -> Result<(Skeleton, Vec<TypeId>)> {
    let mut root = None;
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<&str, StateId> = HashMap::new();
    let mut outputs = Vec::new();
    let mut edges = Vec::new();

    for tokens in text::lines(src) {
        let kw = tokens[0];
        match kw.text {
            "root" => {
                text::expect_arity(&tokens, 2, "root <state>")?;
                if root.is_some() {
                    return Err(kw.error("`root` declared more than once"));
                }
                root = Some(tokens[1]);
            }
            "node" => {
                text::expect_arity(&tokens, 3, "node <state> <type>")?;
                let name = tokens[1].ident()?;
                let ty = sig
                    .type_id(tokens[2].ident()?)
                    .map_err(|e| tokens[2].error(e.to_string()))?;
                if index.insert(name, StateId::new(names.len())).is_some() {
                    return Err(tokens[1].error(format!("duplicate node `{name}`")));
                }
                names.push(name.to_string());
                outputs.push(ty);
            }
            "edge" => {
                text::expect_arity(&tokens, 4, "edge <state> <attr> <state>")?;
                tokens[1].ident()?;
                tokens[3].ident()?;
                let attr = sig
                    .attr_id(tokens[2].ident()?)
                    .map_err(|e| tokens[2].error(e.to_string()))?;
                edges.push((tokens[1], attr, tokens[3]));
            }
            other => return Err(kw.error(format!("unknown declaration `{other}`"))),
        }
    }

    let root_tok = root.ok_or(Error::MissingRoot)?;
    let root = *index
        .get(root_tok.text)
        .ok_or_else(|| root_tok.error(format!("root `{}` has no node line", root_tok.text)))?;

    let mut resolved = Vec::with_capacity(edges.len());
    let mut seen = HashMap::new();
    for (src_tok, attr, dst_tok) in edges {
        let lookup = |tok: text::Token<'_>| {
            index
                .get(tok.text)
                .copied()
                .ok_or_else(|| tok.error(format!("unknown state `{}`", tok.text)))
        };
        let src = lookup(src_tok)?;
        let dst = lookup(dst_tok)?;
        if seen.insert((src, attr), ()).is_some() {
            return Err(src_tok.error(format!(
                "duplicate edge for ({}, {})",
                src_tok.text,
                sig.attr_name(attr)
            )));
        }
        resolved.push((src, attr, dst));
    }

    let skeleton = Skeleton::new(names, root, resolved)?;
    Ok((skeleton, outputs))
}

pub(crate) fn render_machine(skeleton: &Skeleton, outputs: &[TypeId], sig: &Signature) -> String {
    let mut out = String::new();
    writeln!(out, "root {}", skeleton.name(skeleton.root())).unwrap();
    for s in skeleton.states() {
        writeln!(
            out,
            "node {} {}",
            skeleton.name(s),
            sig.type_name(outputs[s.index()])
        )
        .unwrap();
    }
    for (s, a, t) in skeleton.edges() {
        writeln!(
            out,
            "edge {} {} {}",
            skeleton.name(s),
            sig.attr_name(a),
            skeleton.name(t)
        )
        .unwrap();
    }
    out
}

/// The first edge violating well-typing under `outputs`: `approp(out(q), α)`
/// must be defined and subsume `out(δ(q, α))`.
pub(crate) fn ill_typed_edge(
    skeleton: &Skeleton,
    outputs: &[TypeId],
    sig: &Signature,
) -> Option<(StateId, AttrId, StateId)> {
    skeleton
        .edges()
        .find(|&(s, a, t)| match sig.app(outputs[s.index()], a) {
            Some(v) => !sig.sub(v, outputs[t.index()]),
            None => true,
        })
}

pub(crate) fn ill_typed_error(
    skeleton: &Skeleton,
    outputs: &[TypeId],
    sig: &Signature,
    (s, a, t): (StateId, AttrId, StateId),
) -> Error {
    let src_ty = outputs[s.index()];
    let detail = match sig.app(src_ty, a) {
        None => format!(
            "approp({}, {}) is undefined",
            sig.type_name(src_ty),
            sig.attr_name(a)
        ),
        Some(v) => format!(
            "approp({}, {}) = {} does not subsume {}",
            sig.type_name(src_ty),
            sig.attr_name(a),
            sig.type_name(v),
            sig.type_name(outputs[t.index()])
        ),
    };
    Error::IllTyped {
        state: skeleton.name(s).to_string(),
        attr: sig.attr_name(a).to_string(),
        target: skeleton.name(t).to_string(),
        detail,
    }
}

/// A feature structure: a connected deterministic machine whose states are
/// labelled with arbitrary types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureStructure {
    skeleton: Skeleton,
    theta: Vec<TypeId>,
}

impl FeatureStructure {
    pub fn new(skeleton: Skeleton, theta: Vec<TypeId>) -> Result<Self> {
        if theta.len() != skeleton.len() {
            return Err(Error::Malformed(format!(
                "{} type labels for {} states",
                theta.len(),
                skeleton.len()
            )));
        }
        Ok(FeatureStructure { skeleton, theta })
    }

    pub fn parse(src: &str, sig: &Signature) -> Result<Self> {
        let (skeleton, theta) = parse_machine(src, sig)?;
        Self::new(skeleton, theta)
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn theta(&self) -> &[TypeId] {
        &self.theta
    }

    pub fn type_of(&self, s: StateId) -> TypeId {
        self.theta[s.index()]
    }

    pub fn run(&self, path: &Path) -> Option<StateId> {
        self.skeleton.run(path)
    }

    pub fn render(&self, sig: &Signature) -> String {
        render_machine(&self.skeleton, &self.theta, sig)
    }
}

/// A feature structure whose outputs are species. Construction through
/// [`ResolvedFeatureStructure::new`] checks well-typing; candidates that may be
/// ill-typed go through [`ResolvedFeatureStructure::unchecked`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedFeatureStructure {
    skeleton: Skeleton,
    rho: Vec<TypeId>,
}

impl ResolvedFeatureStructure {
    pub fn new(skeleton: Skeleton, rho: Vec<TypeId>, sig: &Signature) -> Result<Self> {
        let r = Self::unchecked(skeleton, rho)?;
        r.validate(sig)?;
        Ok(r)
    }

    /// Pairs a skeleton with a candidate species assignment without checking
    /// species membership or well-typing.
    pub fn unchecked(skeleton: Skeleton, rho: Vec<TypeId>) -> Result<Self> {
        if rho.len() != skeleton.len() {
            return Err(Error::Malformed(format!(
                "{} species labels for {} states",
                rho.len(),
                skeleton.len()
            )));
        }
        Ok(ResolvedFeatureStructure { skeleton, rho })
    }

    pub fn parse(src: &str, sig: &Signature) -> Result<Self> {
        let (skeleton, rho) = parse_machine(src, sig)?;
        Self::new(skeleton, rho, sig)
    }

    pub fn validate(&self, sig: &Signature) -> Result<()> {
        for s in self.skeleton.states() {
            let ty = self.rho[s.index()];
            if !sig.is_species(ty) {
                return Err(Error::NotSpecies {
                    name: self.skeleton.name(s).to_string(),
                    ty: sig.type_name(ty).to_string(),
                });
            }
        }
        match ill_typed_edge(&self.skeleton, &self.rho, sig) {
            Some(edge) => Err(ill_typed_error(&self.skeleton, &self.rho, sig, edge)),
            None => Ok(()),
        }
    }

    pub fn is_well_typed(&self, sig: &Signature) -> bool {
        self.validate(sig).is_ok()
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn rho(&self) -> &[TypeId] {
        &self.rho
    }

    pub fn species_of(&self, s: StateId) -> TypeId {
        self.rho[s.index()]
    }

    /// The same machine read as a plain feature structure.
    pub fn forget(&self) -> FeatureStructure {
        FeatureStructure {
            skeleton: self.skeleton.clone(),
            theta: self.rho.clone(),
        }
    }

    pub fn render(&self, sig: &Signature) -> String {
        render_machine(&self.skeleton, &self.rho, sig)
    }
}

/// `r` is a resolvant of `f`: same skeleton, species outputs refining `f`'s
/// types pointwise, and well-typed.
pub fn is_resolvant_of(
    r: &ResolvedFeatureStructure,
    f: &FeatureStructure,
    sig: &Signature,
) -> bool {
    r.skeleton == f.skeleton
        && r.rho
            .iter()
            .zip(&f.theta)
            .all(|(&rho, &theta)| sig.sub(theta, rho))
        && r.is_well_typed(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::*;

    #[test]
    fn parses_the_small_structures() {
        let sig = sig_a();
        let f1 = f1(&sig);
        assert_eq!(f1.skeleton().len(), 1);
        assert_eq!(f1.skeleton().edge_count(), 0);
        assert_eq!(f1.type_of(f1.skeleton().root()), sig.type_id("t").unwrap());
        let f2 = f2(&sig);
        let q0 = f2.skeleton().root();
        assert_eq!(f2.skeleton().step(q0, sig.attr_id("f").unwrap()), Some(q0));
    }

    #[test]
    fn unreachable_state_is_named() {
        let sig = sig_a();
        let err = FeatureStructure::parse("root q0\nnode q0 t\nnode q1 a\n", &sig).unwrap_err();
        assert_eq!(err, Error::Unreachable("q1".into()));
    }

    #[test]
    fn structural_errors() {
        let sig = sig_a();
        let cases = [
            "node q0 t\n",
            "root q0\nroot q0\nnode q0 t\n",
            "root q1\nnode q0 t\n",
            "root q0\nnode q0 zz\n",
            "root q0\nnode q0 t\nedge q0 g q0\n",
            "root q0\nnode q0 t\nedge q0 f q0\nedge q0 f q0\n",
            "root q0\nnode q0 t\nnode q0 a\n",
            "root q0\nnode q0 t\nedge q0 f q9\n",
            "root q0 q1\nnode q0 t\n",
        ];
        for src in cases {
            assert!(
                FeatureStructure::parse(src, &sig).is_err(),
                "{src:?} should fail"
            );
        }
        assert_eq!(
            FeatureStructure::parse("node q0 t\n", &sig).unwrap_err(),
            Error::MissingRoot
        );
    }

    #[test]
    fn runs() {
        let sig = sig_a();
        let f = sig.attr_id("f").unwrap();
        let f1 = f1(&sig);
        let f2 = f2(&sig);
        let q0 = f2.skeleton().root();
        assert_eq!(f2.run(&Path::empty()), Some(q0));
        assert_eq!(f2.run(&Path(vec![f, f, f])), Some(q0));
        assert_eq!(f1.run(&Path(vec![f])), None);
        assert!(Path::parse("f.g", &sig).is_err());
        assert_eq!(Path::parse("f f", &sig).unwrap(), Path(vec![f, f]));
    }

    #[test]
    fn resolvant_of_examples() {
        let sig = sig_a();
        let a = sig.type_id("a").unwrap();
        let b = sig.type_id("b").unwrap();
        let f1 = f1(&sig);
        let f2 = f2(&sig);

        let ra = ResolvedFeatureStructure::new(f2.skeleton().clone(), vec![a], &sig).unwrap();
        assert!(is_resolvant_of(&ra, &f2, &sig));

        let rb = ResolvedFeatureStructure::unchecked(f2.skeleton().clone(), vec![b]).unwrap();
        assert!(!rb.is_well_typed(&sig));
        assert!(!is_resolvant_of(&rb, &f2, &sig));
        assert!(matches!(
            ResolvedFeatureStructure::new(f2.skeleton().clone(), vec![b], &sig),
            Err(Error::IllTyped { .. })
        ));

        let r1 = ResolvedFeatureStructure::new(f1.skeleton().clone(), vec![a], &sig).unwrap();
        assert!(!is_resolvant_of(&r1, &f2, &sig));
        assert!(is_resolvant_of(&r1, &r1.forget(), &sig));
    }

    #[test]
    fn isomorphism_follows_renaming() {
        let sig = sig_a();
        let x =
            FeatureStructure::parse("root p\nnode p t\nnode r t\nedge p f r\nedge r f p\n", &sig)
                .unwrap();
        let y =
            FeatureStructure::parse("root u\nnode v t\nnode u t\nedge v f u\nedge u f v\n", &sig)
                .unwrap();
        let iso = x.skeleton().isomorphism(y.skeleton()).unwrap();
        assert_eq!(iso, vec![StateId::new(1), StateId::new(0)]);
        assert!(f2(&sig).skeleton().isomorphism(x.skeleton()).is_none());
    }

    #[test]
    fn render_round_trips() {
        let sig = sig_a();
        let src = "root q0\nnode q0 t\nnode q1 a\nedge q0 f q1\nedge q1 f q1\n";
        let fs = FeatureStructure::parse(src, &sig).unwrap();
        assert_eq!(fs.render(&sig), src);
    }
}
