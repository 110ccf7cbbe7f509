//! The Gelfand-Tsetlin graph with q-geometric edge weights.
//!
//! Vertices at level `n` are signatures (weakly decreasing tuples of
//! non-negative integers of length `n`); edges are interlacing pairs,
//! always with multiplicity 1. The edge weight from `lambda` down to
//! `lambda'` is `q^(n|lambda| - (n+1)|lambda'|)` with `n` the length of
//! `lambda'`, which makes the weight group the cyclic group generated
//! by `q`. Kappa-dimensions then coincide with principal
//! specialisations of Schur polynomials, for which this module carries
//! an independent pattern-summing oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{truncate, GraphProvider, LevelSeed, Truncation, VertexId, VertexKey};
use crate::group::{canonical_base, GroupElement};
use crate::link::{weight_system_from_rho, Edge, Link, WeightSystem};
use crate::ratio::Ratio;

/// Weakly decreasing tuple of non-negative integers; its length is its
/// level in the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    parts: Vec<u64>,
}

impl Signature {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Schema(format!(
                "signature parts must be weakly decreasing, got {parts:?}"
            )));
        }
        Ok(Signature { parts })
    }

    pub fn empty() -> Self {
        Signature { parts: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// `|lambda|`, the sum of the parts.
    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn to_vertex(&self) -> VertexId {
        VertexId::new(
            self.len(),
            VertexKey::tuple(self.parts.iter().map(|&p| p as i64).collect::<Vec<i64>>()),
        )
    }

    pub fn from_vertex(v: &VertexId) -> Result<Self> {
        let VertexKey::Tuple(parts) = &v.key else {
            return Err(Error::UnknownVertex(v.to_string()));
        };
        if parts.len() != v.level || parts.iter().any(|&p| p < 0) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Signature::new(parts.iter().map(|&p| p as u64).collect())
            .map_err(|_| Error::UnknownVertex(v.to_string()))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_vertex().key)
    }
}

/// The deformation parameter: a positive rational different from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QParam {
    q: Ratio,
}

impl QParam {
    pub fn new(q: Ratio) -> Result<Self> {
        if !q.is_positive() || q.is_one() {
            return Err(Error::BadQParam(q.to_string()));
        }
        Ok(QParam { q })
    }

    pub fn value(&self) -> &Ratio {
        &self.q
    }

    /// The representative of `q^Z` in `(0,1)`.
    pub fn canonical(&self) -> Ratio {
        canonical_base(&self.q).expect("validated at construction")
    }
}

/// The interlacing relation `lambda' < lambda`:
/// `lambda_1 >= lambda'_1 >= lambda_2 >= ... >= lambda'_n >= lambda_{n+1}`.
pub fn interlaces(lower: &Signature, upper: &Signature) -> Result<bool> {
    if upper.len() != lower.len() + 1 {
        return Err(Error::SignatureLengthMismatch(lower.len(), upper.len()));
    }
    let u = upper.parts();
    let l = lower.parts();
    for i in 0..l.len() {
        if !(u[i] >= l[i] && l[i] >= u[i + 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All signatures interlacing below `upper`, in ascending tuple order.
pub fn interlacing_parents(upper: &Signature) -> Vec<Signature> {
    let n = upper.len();
    debug_assert!(n >= 1);
    let u = upper.parts();
    let mut out = Vec::new();
    let mut current = vec![0u64; n - 1];
    fn rec(u: &[u64], current: &mut Vec<u64>, i: usize, out: &mut Vec<Signature>) {
        if i == current.len() {
            out.push(Signature { parts: current.clone() });
            return;
        }
        for part in u[i + 1]..=u[i] {
            current[i] = part;
            rec(u, current, i + 1, out);
        }
    }
    rec(u, &mut current, 0, &mut out);
    out.sort();
    out
}

fn gt_dim_recursive(lambda: &Signature, cache: &mut BTreeMap<Signature, BigUint>) -> BigUint {
    if lambda.len() <= 1 {
        return BigUint::one();
    }
    if let Some(d) = cache.get(lambda) {
        return d.clone();
    }
    let mut total = BigUint::zero();
    for parent in interlacing_parents(lambda) {
        total += gt_dim_recursive(&parent, cache);
    }
    cache.insert(lambda.clone(), total.clone());
    total
}

fn gt_dim_weyl(lambda: &Signature) -> BigUint {
    let parts = lambda.parts();
    let n = parts.len();
    let mut value = Ratio::one();
    for i in 0..n {
        for j in (i + 1)..n {
            let numer = parts[i] as i64 - parts[j] as i64 + (j as i64 - i as i64);
            let denom = j as i64 - i as i64;
            value = value * Ratio::new(numer, denom);
        }
    }
    assert!(value.is_integer() && value.is_positive() || lambda.len() <= 1);
    value.numer().magnitude().clone()
}

/// Number of Gelfand-Tsetlin patterns with top row `lambda`, computed
/// both by the interlacing recursion and by the hook-style product
/// formula, which must agree.
pub fn gt_dim(lambda: &Signature) -> BigUint {
    let recursive = gt_dim_recursive(lambda, &mut BTreeMap::new());
    let product = gt_dim_weyl(lambda);
    assert_eq!(recursive, product, "dimension formulas disagree at {lambda}");
    recursive
}

/// Exponent of the edge weight: `n|lambda| - (n+1)|lambda'|` with
/// `n = len(lambda')`.
pub fn q_weight_exponent(upper: &Signature, lower: &Signature) -> Result<i64> {
    if !interlaces(lower, upper)? {
        return Err(Error::NotInterlacing(lower.to_string(), upper.to_string()));
    }
    let n = lower.len() as i64;
    Ok(n * upper.size() as i64 - (n + 1) * lower.size() as i64)
}

/// The edge weight `rho(lambda, lambda') = q^(n|lambda| - (n+1)|lambda'|)`.
pub fn q_weight(upper: &Signature, lower: &Signature, q: &QParam) -> Result<Ratio> {
    Ok(q.value().pow(q_weight_exponent(upper, lower)?))
}

/// Principal specialisation `s_lambda(q^(n-1), q^(n-3), ..., q^(1-n))`,
/// evaluated literally as the sum over all Gelfand-Tsetlin patterns of
/// `q` to the pattern weight `sum_i (n+1-2i) * d_i`, where `d_i` is the
/// difference of consecutive row sums. Independent of the weight
/// recursion; serves as its oracle.
pub fn q_schur_principal(lambda: &Signature, q: &QParam) -> Ratio {
    fn walk(row: &Signature, n: i64, exponent: i64, q: &Ratio, total: &mut Ratio) {
        let i = row.len() as i64;
        if i == 0 {
            *total = total.clone() + q.pow(exponent);
            return;
        }
        for lower in interlacing_parents(row) {
            let d = row.size() as i64 - lower.size() as i64;
            walk(&lower, n, exponent + (n + 1 - 2 * i) * d, q, total);
        }
    }
    let mut total = Ratio::zero();
    walk(lambda, lambda.len() as i64, 0, q.value(), &mut total);
    total
}

/// All signatures of the given length with `|lambda| <= max_size`,
/// ascending.
pub fn signatures(len: usize, max_size: u64) -> Vec<Signature> {
    let mut out = Vec::new();
    let mut current = vec![0u64; len];
    fn rec(current: &mut Vec<u64>, i: usize, budget: u64, cap: u64, out: &mut Vec<Signature>) {
        if i == current.len() {
            out.push(Signature { parts: current.clone() });
            return;
        }
        for part in 0..=budget.min(cap) {
            current[i] = part;
            rec(current, i + 1, budget - part, part, out);
        }
    }
    rec(&mut current, 0, max_size, max_size, &mut out);
    out.sort();
    out
}

/// The Gelfand-Tsetlin graph as a provider. Level sets of positive
/// level are infinite and stream in order of size, then tuple order.
#[derive(Debug, Clone, Copy, Default)]
pub struct UqGraph;

impl GraphProvider for UqGraph {
    fn root(&self) -> VertexId {
        Signature::empty().to_vertex()
    }

    fn parents(&self, v: &VertexId) -> Result<Vec<(VertexId, BigUint)>> {
        let sig = Signature::from_vertex(v)?;
        if sig.is_empty() {
            return Err(Error::RootHasNoParents);
        }
        Ok(interlacing_parents(&sig)
            .into_iter()
            .map(|p| (p.to_vertex(), BigUint::one()))
            .collect())
    }

    fn level_seed(&self, level: usize) -> LevelSeed<'_> {
        if level == 0 {
            return LevelSeed::Finite(vec![self.root()]);
        }
        let iter = (0u64..).flat_map(move |size| {
            let mut of_size: Vec<Signature> = signatures(level, size)
                .into_iter()
                .filter(|s| s.size() == size)
                .collect();
            of_size.sort();
            of_size.into_iter().map(|s| s.to_vertex())
        });
        LevelSeed::Unbounded(Box::new(iter))
    }
}

/// Builds the truncation over the given seed signatures together with
/// the q-weight system and the reconstructed link. The link is
/// validated; the detected weight-group base, when the window carries a
/// nontrivial weight at all, must be `q` up to canonicalisation.
pub fn build_uq(
    q: &QParam,
    seeds: &[Signature],
) -> Result<(Truncation, Link, WeightSystem)> {
    if seeds.is_empty() {
        return Err(Error::NoSeeds);
    }
    let seed_vertices: Vec<VertexId> = seeds.iter().map(Signature::to_vertex).collect();
    let t = truncate(&UqGraph, &seed_vertices)?;

    let mut rho: BTreeMap<Edge, Ratio> = BTreeMap::new();
    for ((child, parent), _) in t.edges() {
        let upper = Signature::from_vertex(child)?;
        let lower = Signature::from_vertex(parent)?;
        rho.insert((child.clone(), parent.clone()), q_weight(&upper, &lower, q)?);
    }
    let (link, ws) = weight_system_from_rho(&t, rho)?;

    if let Some(base) = ws.base() {
        // small windows may only see a subgroup of q^Z, e.g. q^2Z over
        // a single even-weight seed, so require a power of q rather
        // than q itself
        let base_elem = GroupElement::from_ratio(base)?;
        let q_elem = GroupElement::from_ratio(q.value())?;
        if base_elem.grade_in(&q_elem).is_none() {
            return Err(Error::Validation(format!(
                "weight-group base {base} is not a power of q = {}",
                q.value()
            )));
        }
    }
    Ok((t, link, ws))
}
