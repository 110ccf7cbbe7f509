//! The weight-extended branching graph and its translation action.
//!
//! Vertices are pairs `(z, gamma)` of a base vertex and a weight-group
//! element; `(z, gamma)` covers `(z', gamma')` exactly when `(z, z')` is
//! a base edge and `gamma' = gamma * rho(z,z')`, always with
//! multiplicity 1. Level sets are infinite even over finite base levels,
//! so only downward cones of explicit seeds are materialised. The group
//! acts by translation in the second coordinate and preserves both the
//! edge set and the standard link of the extension.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{Truncation, VertexId};
use crate::group::GroupElement;
use crate::link::WeightSystem;
use crate::ratio::Ratio;

/// A vertex of the weight-extended graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtVertex {
    pub z: VertexId,
    pub gamma: GroupElement,
}

impl ExtVertex {
    pub fn new(z: VertexId, gamma: GroupElement) -> Self {
        ExtVertex { z, gamma }
    }

    pub fn level(&self) -> usize {
        self.z.level
    }

    /// Translation `T_gamma(z, gamma') = (z, gamma * gamma')`.
    pub fn translate(&self, gamma: &GroupElement) -> ExtVertex {
        ExtVertex {
            z: self.z.clone(),
            gamma: gamma.mul(&self.gamma),
        }
    }
}

impl fmt::Display for ExtVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.z, self.gamma)
    }
}

pub type ExtEdge = (ExtVertex, ExtVertex);

/// Translates both endpoints of an edge.
pub fn translate_edge(edge: &ExtEdge, gamma: &GroupElement) -> ExtEdge {
    (edge.0.translate(gamma), edge.1.translate(gamma))
}

/// Parents of an extended vertex: one per base parent, with the group
/// coordinate shifted by the edge weight.
pub fn ext_parents(t: &Truncation, ws: &WeightSystem, v: &ExtVertex) -> Result<Vec<ExtVertex>> {
    if v.level() == 0 {
        return Err(Error::RootHasNoParents);
    }
    let mut out = Vec::new();
    for (p, _) in t.parents(&v.z)? {
        let rho = ws.rho(&v.z, p).ok_or_else(|| {
            Error::Validation(format!("weight system has no weight on {} -> {p}", v.z))
        })?;
        let shift = GroupElement::from_ratio(rho)?;
        out.push(ExtVertex::new(p.clone(), v.gamma.mul(&shift)));
    }
    out.sort();
    Ok(out)
}

/// Finite downward cone of the weight-extended graph.
#[derive(Debug, Clone)]
pub struct ExtTruncation {
    base: Truncation,
    ws: WeightSystem,
    levels: Vec<Vec<ExtVertex>>,
    edges: BTreeSet<ExtEdge>,
    ext_dims: BTreeMap<ExtVertex, BigUint>,
}

/// Downward closure of extended seeds under [`ext_parents`].
pub fn extend(t: &Truncation, ws: &WeightSystem, seeds: &[ExtVertex]) -> Result<ExtTruncation> {
    if seeds.is_empty() {
        return Err(Error::NoSeeds);
    }
    let top = seeds[0].level();
    if seeds.iter().any(|s| s.level() != top) {
        return Err(Error::MixedSeedLevels);
    }
    for s in seeds {
        if !t.contains(&s.z) {
            return Err(Error::NotInTruncation(s.z.to_string()));
        }
    }

    let mut levels: Vec<Vec<ExtVertex>> = vec![Vec::new(); top + 1];
    let mut frontier: BTreeSet<ExtVertex> = seeds.iter().cloned().collect();
    let mut edges: BTreeSet<ExtEdge> = BTreeSet::new();
    for n in (0..=top).rev() {
        levels[n] = frontier.iter().cloned().collect();
        let mut next = BTreeSet::new();
        if n > 0 {
            for v in &levels[n] {
                for p in ext_parents(t, ws, v)? {
                    edges.insert((v.clone(), p.clone()));
                    next.insert(p);
                }
            }
        }
        frontier = next;
    }

    // dimensions of the extension: path counts down to level 0 of the cone
    let mut ext_dims: BTreeMap<ExtVertex, BigUint> = BTreeMap::new();
    for v in &levels[0] {
        ext_dims.insert(v.clone(), BigUint::one());
    }
    for level in levels.iter().skip(1) {
        for v in level {
            let mut d = BigUint::zero();
            for p in ext_parents(t, ws, v)? {
                d += &ext_dims[&p];
            }
            ext_dims.insert(v.clone(), d);
        }
    }

    Ok(ExtTruncation {
        base: t.clone(),
        ws: ws.clone(),
        levels,
        edges,
        ext_dims,
    })
}

impl ExtTruncation {
    pub fn base(&self) -> &Truncation {
        &self.base
    }

    pub fn weight_system(&self) -> &WeightSystem {
        &self.ws
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[ExtVertex] {
        &self.levels[n]
    }

    pub fn contains(&self, v: &ExtVertex) -> bool {
        self.ext_dims.contains_key(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &ExtVertex> {
        self.levels.iter().flatten()
    }

    pub fn edges(&self) -> impl Iterator<Item = &ExtEdge> {
        self.edges.iter()
    }

    pub fn has_edge(&self, child: &ExtVertex, parent: &ExtVertex) -> bool {
        self.edges.contains(&(child.clone(), parent.clone()))
    }

    /// Parents inside the cone (all extended parents, by closure).
    pub fn parents(&self, v: &ExtVertex) -> Result<Vec<ExtVertex>> {
        if !self.contains(v) {
            return Err(Error::NotInTruncation(v.to_string()));
        }
        ext_parents(&self.base, &self.ws, v)
    }

    /// Number of paths from `v` down to level 0 of the cone. Equal to
    /// `dim(z)` for every `(z, gamma)`.
    pub fn ext_dim(&self, v: &ExtVertex) -> Result<&BigUint> {
        self.ext_dims
            .get(v)
            .ok_or_else(|| Error::NotInTruncation(v.to_string()))
    }

    /// The standard link of the extension: `dim(z')/dim(z)` on edges,
    /// 0 elsewhere.
    pub fn mu_tilde(&self, child: &ExtVertex, parent: &ExtVertex) -> Ratio {
        if !self.has_edge(child, parent) {
            return Ratio::zero();
        }
        mu_tilde_value(&self.base, child, parent)
    }

    /// Translates the whole cone by `gamma`.
    pub fn translate(&self, gamma: &GroupElement) -> ExtTruncation {
        ExtTruncation {
            base: self.base.clone(),
            ws: self.ws.clone(),
            levels: self
                .levels
                .iter()
                .map(|lv| {
                    let mut lv: Vec<ExtVertex> = lv.iter().map(|v| v.translate(gamma)).collect();
                    lv.sort();
                    lv
                })
                .collect(),
            edges: self.edges.iter().map(|e| translate_edge(e, gamma)).collect(),
            ext_dims: self
                .ext_dims
                .iter()
                .map(|(v, d)| (v.translate(gamma), d.clone()))
                .collect(),
        }
    }
}

/// `dim(z')/dim(z)` for a pair of base vertices of an edge; callers
/// check edge membership themselves when needed.
pub fn mu_tilde_value(t: &Truncation, child: &ExtVertex, parent: &ExtVertex) -> Ratio {
    let dz = Ratio::from_biguint(t.dim(&child.z).expect("child in base"));
    let dp = Ratio::from_biguint(t.dim(&parent.z).expect("parent in base"));
    &dp / &dz
}
