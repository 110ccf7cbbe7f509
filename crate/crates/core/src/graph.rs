//! Graded branching graphs and their finite truncations.
//!
//! A branching graph has one vertex at level 0 (the root) and edges only
//! between consecutive levels, weighted by a multiplicity `m >= 1`.
//! Level sets may be infinite; what makes the graph computable is that
//! every vertex has finitely many parents, so the downward closure of a
//! finite seed set is finite. [`truncate`] materialises that closure as
//! a [`Truncation`] with eagerly computed exact dimensions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::report::{Report, Status};

/// Ordered token identifying a vertex within its level.
///
/// Built-in graphs use integer tuples (signatures, Pascal coordinates);
/// explicit JSON graphs may use free-form strings. Tuples order
/// lexicographically by entries, which is what level iteration uses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKey {
    Tuple(Vec<i64>),
    Text(String),
}

impl VertexKey {
    pub fn tuple<I: Into<Vec<i64>>>(parts: I) -> Self {
        VertexKey::Tuple(parts.into())
    }

    /// Parses `"(a,b,...)"` as a tuple (including `"()"`); anything not
    /// starting with `(` is taken as literal text.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('(') {
            let body = body
                .strip_suffix(')')
                .ok_or_else(|| Error::Schema(format!("unterminated tuple key {s:?}")))?;
            let body = body.trim();
            if body.is_empty() {
                return Ok(VertexKey::Tuple(Vec::new()));
            }
            let parts = body
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Schema(format!("malformed tuple key {s:?}")))
                })
                .collect::<Result<Vec<i64>>>()?;
            Ok(VertexKey::Tuple(parts))
        } else if s.is_empty() {
            Err(Error::Schema("empty vertex key".into()))
        } else {
            Ok(VertexKey::Text(s.to_string()))
        }
    }
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKey::Tuple(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            VertexKey::Text(s) => write!(f, "{s}"),
        }
    }
}

/// A vertex: its level plus its key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub level: usize,
    pub key: VertexKey,
}

impl VertexId {
    pub fn new(level: usize, key: VertexKey) -> Self {
        VertexId { level, key }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key)
    }
}

/// What a provider can say about one of its level sets.
pub enum LevelSeed<'a> {
    /// The whole (finite) level, in key order.
    Finite(Vec<VertexId>),
    /// A lazy enumeration of an infinite level.
    Unbounded(Box<dyn Iterator<Item = VertexId> + 'a>),
}

/// A graded branching graph presented through its parent relation.
pub trait GraphProvider {
    /// The unique level-0 vertex.
    fn root(&self) -> VertexId;

    /// Parents of `v` (one level down) with multiplicities, in key order.
    /// Finite and nonempty for every vertex of level >= 1.
    fn parents(&self, v: &VertexId) -> Result<Vec<(VertexId, BigUint)>>;

    /// Enumerator for a level set; unbounded levels stream lazily.
    fn level_seed(&self, level: usize) -> LevelSeed<'_>;
}

/// Pascal's triangle as a branching graph: vertex `(n,k)` at level `n`
/// covers `(n-1,k-1)` and `(n-1,k)`, all multiplicities 1, so
/// `dim(n,k) = C(n,k)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PascalGraph;

impl PascalGraph {
    pub fn vertex(n: usize, k: usize) -> VertexId {
        VertexId::new(n, VertexKey::tuple(vec![n as i64, k as i64]))
    }

    fn coords(v: &VertexId) -> Result<(i64, i64)> {
        if let VertexKey::Tuple(parts) = &v.key {
            if let [n, k] = parts[..] {
                if n as usize == v.level && 0 <= k && k <= n {
                    return Ok((n, k));
                }
            }
        }
        Err(Error::UnknownVertex(v.to_string()))
    }
}

impl GraphProvider for PascalGraph {
    fn root(&self) -> VertexId {
        Self::vertex(0, 0)
    }

    fn parents(&self, v: &VertexId) -> Result<Vec<(VertexId, BigUint)>> {
        let (n, k) = Self::coords(v)?;
        if n == 0 {
            return Err(Error::RootHasNoParents);
        }
        let mut out = Vec::new();
        if k >= 1 {
            out.push((Self::vertex((n - 1) as usize, (k - 1) as usize), BigUint::one()));
        }
        if k < n {
            out.push((Self::vertex((n - 1) as usize, k as usize), BigUint::one()));
        }
        Ok(out)
    }

    fn level_seed(&self, level: usize) -> LevelSeed<'_> {
        LevelSeed::Finite((0..=level).map(|k| Self::vertex(level, k)).collect())
    }
}

/// An explicit finite branching graph, typically loaded from JSON.
///
/// Keys must be unique across the whole graph so that edges can name
/// vertices without levels.
#[derive(Debug, Clone)]
pub struct ExplicitGraph {
    levels: Vec<Vec<VertexId>>,
    parents: BTreeMap<VertexId, Vec<(VertexId, BigUint)>>,
}

impl ExplicitGraph {
    pub fn new(
        level_keys: Vec<Vec<VertexKey>>,
        edges: Vec<(VertexKey, VertexKey, BigUint)>,
    ) -> Result<Self> {
        if level_keys.is_empty() || level_keys[0].len() != 1 {
            return Err(Error::Schema(
                "level 0 must contain exactly the root vertex".into(),
            ));
        }
        let mut by_key: BTreeMap<VertexKey, VertexId> = BTreeMap::new();
        let mut levels = Vec::new();
        for (n, keys) in level_keys.into_iter().enumerate() {
            if keys.is_empty() {
                return Err(Error::Schema(format!("level {n} is empty")));
            }
            let mut level = Vec::new();
            for key in keys {
                let v = VertexId::new(n, key.clone());
                if by_key.insert(key.clone(), v.clone()).is_some() {
                    return Err(Error::Schema(format!("duplicate vertex key {key}")));
                }
                level.push(v);
            }
            level.sort();
            levels.push(level);
        }

        let mut parents: BTreeMap<VertexId, Vec<(VertexId, BigUint)>> = BTreeMap::new();
        for (child_key, parent_key, m) in edges {
            let child = by_key
                .get(&child_key)
                .ok_or_else(|| Error::Schema(format!("edge child {child_key} not a vertex")))?;
            let parent = by_key
                .get(&parent_key)
                .ok_or_else(|| Error::Schema(format!("edge parent {parent_key} not a vertex")))?;
            if child.level != parent.level + 1 {
                return Err(Error::Schema(format!(
                    "edge {child_key} -> {parent_key} does not span consecutive levels"
                )));
            }
            if m.is_zero() {
                return Err(Error::Schema(format!(
                    "edge {child_key} -> {parent_key} has multiplicity 0"
                )));
            }
            let row = parents.entry(child.clone()).or_default();
            if row.iter().any(|(p, _)| p == parent) {
                return Err(Error::Schema(format!(
                    "duplicate edge {child_key} -> {parent_key}"
                )));
            }
            row.push((parent.clone(), m));
        }
        for row in parents.values_mut() {
            row.sort_by(|a, b| a.0.cmp(&b.0));
        }
        for level in levels.iter().skip(1) {
            for v in level {
                if !parents.contains_key(v) {
                    return Err(Error::Schema(format!("vertex {v} has no parent edge")));
                }
            }
        }
        Ok(ExplicitGraph { levels, parents })
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }
}

impl GraphProvider for ExplicitGraph {
    fn root(&self) -> VertexId {
        self.levels[0][0].clone()
    }

    fn parents(&self, v: &VertexId) -> Result<Vec<(VertexId, BigUint)>> {
        if v.level == 0 && *v == self.root() {
            return Err(Error::RootHasNoParents);
        }
        self.parents
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    fn level_seed(&self, level: usize) -> LevelSeed<'_> {
        LevelSeed::Finite(self.levels.get(level).cloned().unwrap_or_default())
    }
}

/// Finite downward cone of a branching graph.
///
/// Immutable after construction; dimensions are precomputed, so sharing
/// across threads is free.
#[derive(Debug, Clone)]
pub struct Truncation {
    levels: Vec<Vec<VertexId>>,
    edges: BTreeMap<(VertexId, VertexId), BigUint>,
    parents_of: BTreeMap<VertexId, Vec<(VertexId, BigUint)>>,
    children_of: BTreeMap<VertexId, Vec<VertexId>>,
    dims: BTreeMap<VertexId, BigUint>,
    cover_complete: BTreeSet<VertexId>,
}

/// Downward closure of `seeds` under the parent relation.
pub fn truncate(g: &dyn GraphProvider, seeds: &[VertexId]) -> Result<Truncation> {
    if seeds.is_empty() {
        return Err(Error::NoSeeds);
    }
    let top = seeds[0].level;
    if seeds.iter().any(|s| s.level != top) {
        return Err(Error::MixedSeedLevels);
    }

    let mut levels: Vec<Vec<VertexId>> = vec![Vec::new(); top + 1];
    let mut frontier: BTreeSet<VertexId> = seeds.iter().cloned().collect();
    let mut edges = BTreeMap::new();
    let mut parents_of: BTreeMap<VertexId, Vec<(VertexId, BigUint)>> = BTreeMap::new();

    for n in (0..=top).rev() {
        levels[n] = frontier.iter().cloned().collect();
        let mut next: BTreeSet<VertexId> = BTreeSet::new();
        if n > 0 {
            for v in &levels[n] {
                let ps = g.parents(v)?;
                for (p, m) in &ps {
                    edges.insert((v.clone(), p.clone()), m.clone());
                    next.insert(p.clone());
                }
                parents_of.insert(v.clone(), ps);
            }
        }
        frontier = next;
    }
    debug_assert_eq!(levels[0].len(), 1, "closure must end at the single root");

    let mut children_of: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (child, parent) in edges.keys() {
        children_of
            .entry(parent.clone())
            .or_default()
            .push(child.clone());
    }
    for row in children_of.values_mut() {
        row.sort();
    }

    // exact dimensions, bottom-up
    let mut dims: BTreeMap<VertexId, BigUint> = BTreeMap::new();
    dims.insert(levels[0][0].clone(), BigUint::one());
    for level in levels.iter().skip(1) {
        for v in level {
            let mut d = BigUint::zero();
            for (p, m) in &parents_of[v] {
                d += m * &dims[p];
            }
            dims.insert(v.clone(), d);
        }
    }

    // a vertex is cover-complete when all its children in the full graph
    // lie inside the cone; only decidable for finite provider levels
    let mut cover_complete = BTreeSet::new();
    for n in 0..top {
        if let LevelSeed::Finite(full) = g.level_seed(n + 1) {
            let inside: BTreeSet<&VertexId> = levels[n + 1].iter().collect();
            let mut missing_child_of: BTreeSet<VertexId> = BTreeSet::new();
            for w in &full {
                if inside.contains(w) {
                    continue;
                }
                for (p, _) in g.parents(w)? {
                    missing_child_of.insert(p);
                }
            }
            for v in &levels[n] {
                if !missing_child_of.contains(v) {
                    cover_complete.insert(v.clone());
                }
            }
        }
    }

    Ok(Truncation {
        levels,
        edges,
        parents_of,
        children_of,
        dims,
        cover_complete,
    })
}

impl Truncation {
    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> &VertexId {
        &self.levels[0][0]
    }

    /// Vertices of one level, in key order.
    pub fn level(&self, n: usize) -> &[VertexId] {
        &self.levels[n]
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.dims.contains_key(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.levels.iter().flatten()
    }

    /// All `(child, parent) -> m` edges.
    pub fn edges(&self) -> impl Iterator<Item = (&(VertexId, VertexId), &BigUint)> {
        self.edges.iter()
    }

    pub fn edge_multiplicity(&self, child: &VertexId, parent: &VertexId) -> Option<&BigUint> {
        self.edges.get(&(child.clone(), parent.clone()))
    }

    /// Parents within the truncation (always all graph parents).
    pub fn parents(&self, v: &VertexId) -> Result<&[(VertexId, BigUint)]> {
        if v == self.root() {
            return Err(Error::RootHasNoParents);
        }
        self.parents_of
            .get(v)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::NotInTruncation(v.to_string()))
    }

    /// Children within the truncation (may miss graph children).
    pub fn children(&self, v: &VertexId) -> &[VertexId] {
        self.children_of.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Multiplicity-weighted path count from `v` down to the root.
    pub fn dim(&self, v: &VertexId) -> Result<&BigUint> {
        self.dims
            .get(v)
            .ok_or_else(|| Error::NotInTruncation(v.to_string()))
    }

    pub fn is_cover_complete(&self, v: &VertexId) -> bool {
        self.cover_complete.contains(v)
    }

    /// True when every edge has multiplicity 1 (required by link ops).
    pub fn is_multiplicity_free(&self) -> bool {
        self.edges.values().all(|m| m.is_one())
    }

    /// Structural report: (a) parent closure, (b) child coverage where
    /// decidable. (b) violations are warnings since cones legitimately
    /// cut children away.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        let mut orphans = 0usize;
        for level in self.levels.iter().skip(1) {
            for v in level {
                let ok = self
                    .parents_of
                    .get(v)
                    .map(|ps| !ps.is_empty())
                    .unwrap_or(false);
                if !ok {
                    orphans += 1;
                    report.fail_at("parent-closure", v.to_string(), "vertex has no parent edge");
                }
            }
        }
        if orphans == 0 {
            report.pass(
                "parent-closure",
                format!("all {} non-root vertices have parents", self.dims.len() - 1),
            );
        }

        let top = self.top_level();
        let mut covered = 0usize;
        for n in 0..top {
            for v in &self.levels[n] {
                if self.is_cover_complete(v) {
                    if self.children(v).is_empty() {
                        report.push(
                            "child-coverage",
                            Status::Warn,
                            Some(v.to_string()),
                            "cover-complete vertex has no children".into(),
                        );
                    } else {
                        covered += 1;
                    }
                } else {
                    report.push(
                        "child-coverage",
                        Status::NotCheckable,
                        Some(v.to_string()),
                        "vertex is not cover-complete; children may lie outside the cone".into(),
                    );
                }
            }
        }
        report.pass(
            "child-coverage",
            format!("{covered} cover-complete vertices have children inside"),
        );
        report
    }
}

/// A truncation is itself a (finite) branching graph.
impl GraphProvider for Truncation {
    fn root(&self) -> VertexId {
        self.levels[0][0].clone()
    }

    fn parents(&self, v: &VertexId) -> Result<Vec<(VertexId, BigUint)>> {
        Truncation::parents(self, v).map(|ps| ps.to_vec())
    }

    fn level_seed(&self, level: usize) -> LevelSeed<'_> {
        LevelSeed::Finite(self.levels.get(level).cloned().unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_full(depth: usize) -> Truncation {
        let g = PascalGraph;
        let LevelSeed::Finite(seeds) = g.level_seed(depth) else {
            unreachable!()
        };
        truncate(&g, &seeds).unwrap()
    }

    #[test]
    fn pascal_parents() {
        let g = PascalGraph;
        let ps = g.parents(&PascalGraph::vertex(2, 1)).unwrap();
        assert_eq!(
            ps,
            vec![
                (PascalGraph::vertex(1, 0), BigUint::one()),
                (PascalGraph::vertex(1, 1), BigUint::one()),
            ]
        );
        let ps = g.parents(&PascalGraph::vertex(1, 0)).unwrap();
        assert_eq!(ps, vec![(PascalGraph::vertex(0, 0), BigUint::one())]);
    }

    #[test]
    fn root_and_unknown_vertices_are_rejected() {
        let g = PascalGraph;
        assert!(matches!(
            g.parents(&g.root()),
            Err(Error::RootHasNoParents)
        ));
        let bogus = VertexId::new(3, VertexKey::tuple(vec![2, 1]));
        assert!(matches!(g.parents(&bogus), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn truncate_pascal_level_sizes() {
        let t = pascal_full(3);
        let sizes: Vec<usize> = (0..=3).map(|n| t.level(n).len()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn truncate_root_only() {
        let g = PascalGraph;
        let t = truncate(&g, &[g.root()]).unwrap();
        assert_eq!(t.top_level(), 0);
        assert_eq!(t.level(0), &[g.root()]);
    }

    #[test]
    fn truncate_errors() {
        let g = PascalGraph;
        assert!(matches!(truncate(&g, &[]), Err(Error::NoSeeds)));
        let mixed = [PascalGraph::vertex(2, 0), PascalGraph::vertex(1, 0)];
        assert!(matches!(
            truncate(&g, &mixed),
            Err(Error::MixedSeedLevels)
        ));
    }

    #[test]
    fn truncate_is_idempotent() {
        let t = pascal_full(4);
        let seeds: Vec<VertexId> = t.level(4).to_vec();
        let t2 = truncate(&t, &seeds).unwrap();
        assert_eq!(t.levels, t2.levels);
        assert_eq!(t.edges, t2.edges);
        assert_eq!(t.dims, t2.dims);
    }

    #[test]
    fn dims_are_binomials() {
        let t = pascal_full(6);
        assert_eq!(t.dim(&PascalGraph::vertex(3, 1)).unwrap(), &BigUint::from(3u32));
        assert_eq!(t.dim(&PascalGraph::vertex(6, 3)).unwrap(), &BigUint::from(20u32));
        assert_eq!(t.dim(t.root()).unwrap(), &BigUint::one());
    }

    /// Independent oracle: count paths by explicit enumeration.
    fn path_count(t: &Truncation, v: &VertexId) -> BigUint {
        if v == t.root() {
            return BigUint::one();
        }
        let mut total = BigUint::zero();
        for (p, m) in t.parents(v).unwrap() {
            total += m * path_count(t, p);
        }
        total
    }

    #[test]
    fn dim_matches_path_enumeration() {
        let t = pascal_full(6);
        for v in t.vertices() {
            assert_eq!(t.dim(v).unwrap(), &path_count(&t, v), "at {v}");
        }
    }

    #[test]
    fn validation_of_full_pascal_cone() {
        let t = pascal_full(3);
        let report = t.validate();
        assert!(report.ok());
        // full levels are cover-complete below the top
        for n in 0..3 {
            for v in t.level(n) {
                assert!(t.is_cover_complete(v), "{v} at level {n}");
            }
        }
    }

    #[test]
    fn partial_cone_is_not_cover_complete() {
        let g = PascalGraph;
        let t = truncate(&g, &[PascalGraph::vertex(3, 1)]).unwrap();
        // (2,0) is missing its child (3,0)
        assert!(!t.is_cover_complete(&PascalGraph::vertex(2, 0)));
        let report = t.validate();
        assert!(report.ok()); // only not-checkable items, no failures
        assert!(report
            .items
            .iter()
            .any(|i| i.status == Status::NotCheckable));
    }

    #[test]
    fn explicit_graph_construction_and_errors() {
        let levels = vec![
            vec![VertexKey::Text("r".into())],
            vec![VertexKey::Text("a".into()), VertexKey::Text("b".into())],
        ];
        let edges = vec![
            (VertexKey::Text("a".into()), VertexKey::Text("r".into()), BigUint::one()),
            (VertexKey::Text("b".into()), VertexKey::Text("r".into()), BigUint::from(2u32)),
        ];
        let g = ExplicitGraph::new(levels.clone(), edges.clone()).unwrap();
        let t = truncate(&g, &[VertexId::new(1, VertexKey::Text("b".into()))]).unwrap();
        assert_eq!(t.dim(&VertexId::new(1, VertexKey::Text("b".into()))).unwrap(), &BigUint::from(2u32));

        // orphan vertex
        let bad = ExplicitGraph::new(levels, edges[..1].to_vec());
        assert!(bad.is_err());
    }

    #[test]
    fn key_parsing() {
        assert_eq!(VertexKey::parse("(1,0)").unwrap(), VertexKey::tuple(vec![1, 0]));
        assert_eq!(VertexKey::parse("()").unwrap(), VertexKey::tuple(vec![]));
        assert_eq!(VertexKey::parse("abc").unwrap(), VertexKey::Text("abc".into()));
        assert!(VertexKey::parse("(1,").is_err());
        assert!(VertexKey::parse("(x)").is_err());
        assert_eq!(VertexKey::tuple(vec![1, 0]).to_string(), "(1,0)");
        assert_eq!(VertexKey::tuple(vec![]).to_string(), "()");
    }
}
