//! Links (backward Markov kernels) on truncations and their weight data.
//!
//! A link assigns an exact positive rational to every edge of a
//! truncation, with rows summing to 1 over the parents of each vertex.
//! From a link we compute kappa-dimensions (square roots of weighted
//! path sums), edge weights `rho(z,z') = kdim(z) * kappa(z,z') / kdim(z')`,
//! and the multiplicative group generated by the weights. All link
//! operations require multiplicity-free truncations; general
//! multiplicities participate only in dimensions.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{Truncation, VertexId};
use crate::group::detect_base;
use crate::ratio::Ratio;
use crate::report::Report;

pub type Edge = (VertexId, VertexId);

/// Exact kernel on the edges of a truncation, child -> parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    kernel: BTreeMap<Edge, Ratio>,
}

impl Link {
    pub fn new(kernel: BTreeMap<Edge, Ratio>) -> Self {
        Link { kernel }
    }

    pub fn value(&self, child: &VertexId, parent: &VertexId) -> Option<&Ratio> {
        self.kernel.get(&(child.clone(), parent.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Edge, &Ratio)> {
        self.kernel.iter()
    }
}

/// Per-vertex kappa-dimension data and per-edge weights for one link.
///
/// `kdim_sq` is always total; `kdim` holds the exact square root where
/// one exists and is absent elsewhere. Weight data (`rho`, generators,
/// base) is only populated once `kdim` is total.
#[derive(Debug, Clone, Default)]
pub struct WeightSystem {
    kdim_sq: BTreeMap<VertexId, Ratio>,
    kdim: BTreeMap<VertexId, Ratio>,
    rho: BTreeMap<Edge, Ratio>,
    gamma_generators: Vec<Ratio>,
    base: Option<Ratio>,
}

impl WeightSystem {
    pub fn kdim_sq(&self, v: &VertexId) -> Option<&Ratio> {
        self.kdim_sq.get(v)
    }

    pub fn kdim(&self, v: &VertexId) -> Option<&Ratio> {
        self.kdim.get(v)
    }

    /// kdim or a loud failure naming the first vertex where it is absent.
    pub fn require_kdim(&self, v: &VertexId) -> Result<&Ratio> {
        self.kdim
            .get(v)
            .ok_or_else(|| Error::IrrationalKappaDim(v.to_string()))
    }

    pub fn rho(&self, child: &VertexId, parent: &VertexId) -> Option<&Ratio> {
        self.rho.get(&(child.clone(), parent.clone()))
    }

    pub fn rho_entries(&self) -> impl Iterator<Item = (&Edge, &Ratio)> {
        self.rho.iter()
    }

    pub fn kdim_entries(&self) -> impl Iterator<Item = (&VertexId, &Ratio)> {
        self.kdim.iter()
    }

    pub fn kdim_sq_entries(&self) -> impl Iterator<Item = (&VertexId, &Ratio)> {
        self.kdim_sq.iter()
    }

    /// Distinct weight values, ascending.
    pub fn generators(&self) -> &[Ratio] {
        &self.gamma_generators
    }

    /// Canonical cyclic base of the weight group in `(0,1)`, when the
    /// group is cyclic and nontrivial.
    pub fn base(&self) -> Option<&Ratio> {
        self.base.as_ref()
    }

    /// The weight group is trivial when every weight equals 1.
    pub fn is_trivial_group(&self) -> bool {
        self.gamma_generators.iter().all(Ratio::is_one)
    }
}

/// The standard link `m(z,z') * dim(z') / dim(z)`, defined for any
/// multiplicities.
pub fn standard_link(t: &Truncation) -> Link {
    let mut kernel = BTreeMap::new();
    for ((child, parent), m) in t.edges() {
        let value = Ratio::from_biguint(m) * Ratio::from_biguint(t.dim(parent).unwrap())
            / Ratio::from_biguint(t.dim(child).unwrap());
        kernel.insert((child.clone(), parent.clone()), value);
    }
    Link { kernel }
}

/// Checks row-stochasticity, support, positivity, and the
/// multiplicity-free requirement, exactly.
pub fn validate_link(t: &Truncation, k: &Link) -> Report {
    let mut report = Report::new();

    let mut mult_ok = true;
    for ((child, parent), m) in t.edges() {
        if !m.is_one() {
            mult_ok = false;
            report.fail_at(
                "multiplicity",
                format!("{child} -> {parent}"),
                format!("multiplicity {m} > 1; link operations need m in {{0,1}}"),
            );
        }
    }
    if mult_ok {
        report.pass("multiplicity", "all edges have multiplicity 1".to_string());
    }

    let edge_set: BTreeSet<&Edge> = t.edges().map(|(e, _)| e).collect();
    let mut support_ok = true;
    for (edge, value) in k.entries() {
        if !edge_set.contains(edge) {
            support_ok = false;
            report.fail_at(
                "support",
                format!("{} -> {}", edge.0, edge.1),
                "kernel value on a non-edge".to_string(),
            );
        } else if !value.is_positive() {
            support_ok = false;
            report.fail_at(
                "support",
                format!("{} -> {}", edge.0, edge.1),
                format!("support mismatch: kernel value {value} is not positive on an edge"),
            );
        }
    }
    for edge in &edge_set {
        if k.value(&edge.0, &edge.1).is_none() {
            support_ok = false;
            report.fail_at(
                "support",
                format!("{} -> {}", edge.0, edge.1),
                "support mismatch: edge has no kernel value".to_string(),
            );
        }
    }
    if support_ok {
        report.pass("support", format!("kernel support equals the {} edges", edge_set.len()));
    }

    let mut rows_ok = true;
    for n in 1..=t.top_level() {
        for v in t.level(n) {
            let mut sum = Ratio::zero();
            for (p, _) in t.parents(v).unwrap() {
                if let Some(val) = k.value(v, p) {
                    sum = sum + val.clone();
                }
            }
            if !sum.is_one() {
                rows_ok = false;
                report.fail_at("row-sum", v.to_string(), format!("row sum {sum} != 1"));
            }
        }
    }
    if rows_ok {
        report.pass("row-sum", "all rows sum to 1".to_string());
    }

    report
}

fn require_valid(t: &Truncation, k: &Link) -> Result<()> {
    let report = validate_link(t, k);
    if let Some(item) = report.first_failure() {
        return Err(Error::InvalidLink(format!(
            "{} at {}: {}",
            item.check,
            item.location.as_deref().unwrap_or("-"),
            item.detail
        )));
    }
    Ok(())
}

/// Kappa-dimensions of a valid link: the exact recursion
/// `S(root) = 1`, `S(z) = sum over parents of S(z') / kappa(z,z')`,
/// with `kdim(z) = sqrt(S(z))` populated wherever `S(z)` is a perfect
/// square of a rational.
pub fn kappa_dim(t: &Truncation, k: &Link) -> Result<WeightSystem> {
    require_valid(t, k)?;
    let mut kdim_sq = BTreeMap::new();
    let mut kdim = BTreeMap::new();
    kdim_sq.insert(t.root().clone(), Ratio::one());
    kdim.insert(t.root().clone(), Ratio::one());
    for n in 1..=t.top_level() {
        for v in t.level(n) {
            let mut s = Ratio::zero();
            for (p, _) in t.parents(v)? {
                let kappa = k.value(v, p).expect("validated support");
                let parent_sq: &Ratio = &kdim_sq[p];
                s = s + (parent_sq / kappa);
            }
            if let Some(root) = s.sqrt_exact() {
                kdim.insert(v.clone(), root);
            }
            kdim_sq.insert(v.clone(), s);
        }
    }
    Ok(WeightSystem {
        kdim_sq,
        kdim,
        ..WeightSystem::default()
    })
}

/// Completes a weight system with edge weights, generators, and the
/// cyclic base test. Requires kdim at every vertex of the truncation.
pub fn weights(t: &Truncation, k: &Link, mut ws: WeightSystem) -> Result<WeightSystem> {
    for v in t.vertices() {
        ws.require_kdim(v)?;
    }
    let mut rho = BTreeMap::new();
    let mut gens: BTreeSet<Ratio> = BTreeSet::new();
    for (edge, kappa) in k.entries() {
        let (child, parent) = edge;
        let value = &(ws.kdim[child].clone() * kappa.clone()) / &ws.kdim[parent];
        gens.insert(value.clone());
        rho.insert(edge.clone(), value);
    }
    let gamma_generators: Vec<Ratio> = gens.into_iter().collect();
    let base = detect_base(&gamma_generators)?;
    ws.rho = rho;
    ws.gamma_generators = gamma_generators;
    ws.base = base;
    Ok(ws)
}

/// Inverts the weight definition: `kappa(z,z') = rho(z,z') * kdim(z') / kdim(z)`.
///
/// Row sums are not automatic; callers must run [`validate_link`], which
/// effectively enforces that `kdim` satisfies the weight recursion.
pub fn link_from_weights(
    t: &Truncation,
    rho: &BTreeMap<Edge, Ratio>,
    kdim: &BTreeMap<VertexId, Ratio>,
) -> Result<Link> {
    for v in t.vertices() {
        let d = kdim
            .get(v)
            .ok_or_else(|| Error::IrrationalKappaDim(v.to_string()))?;
        if !d.is_positive() {
            return Err(Error::Validation(format!("kdim at {v} must be positive")));
        }
    }
    let mut kernel = BTreeMap::new();
    for ((child, parent), _) in t.edges() {
        let r = rho.get(&(child.clone(), parent.clone())).ok_or_else(|| {
            Error::Validation(format!("no weight on edge {child} -> {parent}"))
        })?;
        if !r.is_positive() {
            return Err(Error::Validation(format!(
                "weight on edge {child} -> {parent} must be positive"
            )));
        }
        let value = &(r.clone() * kdim[parent].clone()) / &kdim[child];
        kernel.insert((child.clone(), parent.clone()), value);
    }
    Ok(Link { kernel })
}

/// Builds the weight system of a graph whose edge weights are given
/// directly, via the recursion `kdim(z) = sum over parents of
/// rho(z,z') * kdim(z')`, then reconstructs the link and validates it.
pub fn weight_system_from_rho(
    t: &Truncation,
    rho: BTreeMap<Edge, Ratio>,
) -> Result<(Link, WeightSystem)> {
    let mut kdim: BTreeMap<VertexId, Ratio> = BTreeMap::new();
    kdim.insert(t.root().clone(), Ratio::one());
    for n in 1..=t.top_level() {
        for v in t.level(n) {
            let mut s = Ratio::zero();
            for (p, _) in t.parents(v)? {
                let r = rho.get(&(v.clone(), p.clone())).ok_or_else(|| {
                    Error::Validation(format!("no weight on edge {v} -> {p}"))
                })?;
                s = s + (r.clone() * kdim[p].clone());
            }
            kdim.insert(v.clone(), s);
        }
    }
    let link = link_from_weights(t, &rho, &kdim)?;
    require_valid(t, &link)?;

    let kdim_sq: BTreeMap<VertexId, Ratio> =
        kdim.iter().map(|(v, d)| (v.clone(), d * d)).collect();
    let gens: BTreeSet<Ratio> = rho.values().cloned().collect();
    let gamma_generators: Vec<Ratio> = gens.into_iter().collect();
    let base = detect_base(&gamma_generators)?;
    let ws = WeightSystem {
        kdim_sq,
        kdim,
        rho,
        gamma_generators,
        base,
    };

    // cross-check against the kappa-path recursion
    let recomputed = kappa_dim(t, &link)?;
    for v in t.vertices() {
        if recomputed.kdim_sq(v) != ws.kdim_sq(v) {
            return Err(Error::Validation(format!(
                "weight recursion and kappa recursion disagree at {v}"
            )));
        }
    }
    Ok((link, ws))
}

/// Brute-force oracle for the squared kappa-dimension: enumerates every
/// root-to-`v` path and sums the reciprocal kernel products, with no
/// sharing between paths.
pub fn kappa_dim_oracle(t: &Truncation, k: &Link, v: &VertexId) -> Result<Ratio> {
    if !t.contains(v) {
        return Err(Error::NotInTruncation(v.to_string()));
    }
    fn walk(t: &Truncation, k: &Link, v: &VertexId, product: Ratio, total: &mut Ratio) {
        if v == t.root() {
            *total = total.clone() + product.recip().expect("kernel values are positive");
            return;
        }
        for (p, _) in t.parents(v).unwrap() {
            let kappa = k.value(v, p).expect("kernel defined on edges");
            walk(t, k, p, product.clone() * kappa.clone(), total);
        }
    }
    let mut total = Ratio::zero();
    walk(t, k, v, Ratio::one(), &mut total);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{truncate, ExplicitGraph, GraphProvider, LevelSeed, PascalGraph, VertexKey};
    use num_bigint::BigUint;

    fn r(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    fn pascal_full(depth: usize) -> Truncation {
        let g = PascalGraph;
        let LevelSeed::Finite(seeds) = g.level_seed(depth) else {
            unreachable!()
        };
        truncate(&g, &seeds).unwrap()
    }

    fn v(n: usize, k: usize) -> VertexId {
        PascalGraph::vertex(n, k)
    }

    /// The level-2 cone of the q-deformed Gelfand-Tsetlin graph over
    /// (1,0), built by hand so link tests are independent of the uq
    /// module.
    fn gt_cone_q_half() -> (Truncation, Link) {
        let key = |s: &str| VertexKey::parse(s).unwrap();
        let levels = vec![
            vec![key("()")],
            vec![key("(0)"), key("(1)")],
            vec![key("(1,0)")],
        ];
        let one = BigUint::one();
        let edges = vec![
            (key("(0)"), key("()"), one.clone()),
            (key("(1)"), key("()"), one.clone()),
            (key("(1,0)"), key("(0)"), one.clone()),
            (key("(1,0)"), key("(1)"), one),
        ];
        let g = ExplicitGraph::new(levels, edges).unwrap();
        let top = VertexId::new(2, key("(1,0)"));
        let t = truncate(&g, std::slice::from_ref(&top)).unwrap();
        let mut kernel = BTreeMap::new();
        kernel.insert((VertexId::new(1, key("(0)")), VertexId::new(0, key("()"))), r("1"));
        kernel.insert((VertexId::new(1, key("(1)")), VertexId::new(0, key("()"))), r("1"));
        kernel.insert((top.clone(), VertexId::new(1, key("(0)"))), r("1/5"));
        kernel.insert((top, VertexId::new(1, key("(1)"))), r("4/5"));
        (t, Link::new(kernel))
    }

    #[test]
    fn standard_link_values() {
        let t = pascal_full(3);
        let k = standard_link(&t);
        assert_eq!(k.value(&v(2, 1), &v(1, 0)).unwrap(), &r("1/2"));
        assert_eq!(k.value(&v(2, 0), &v(1, 0)).unwrap(), &r("1"));
        assert_eq!(k.value(&v(1, 0), &v(0, 0)).unwrap(), &r("1"));
        assert!(validate_link(&t, &k).ok());
    }

    #[test]
    fn validate_detects_row_sum_failure() {
        let t = pascal_full(2);
        let mut kernel = standard_link(&t).kernel;
        kernel.insert((v(2, 0), v(1, 0)), r("1/2"));
        let report = validate_link(&t, &Link::new(kernel));
        assert!(!report.ok());
        let failure = report.first_failure().unwrap();
        assert_eq!(failure.check, "row-sum");
        assert_eq!(failure.location.as_deref(), Some("(2,0)"));
    }

    #[test]
    fn validate_detects_support_mismatch() {
        let t = pascal_full(2);
        let mut kernel = standard_link(&t).kernel;
        kernel.insert((v(2, 1), v(1, 0)), r("0"));
        let report = validate_link(&t, &Link::new(kernel));
        assert!(!report.ok());
        assert!(report
            .items
            .iter()
            .any(|i| i.check == "support" && i.detail.contains("support mismatch")));
    }

    #[test]
    fn validate_rejects_multiplicity_above_one() {
        let key = |s: &str| VertexKey::Text(s.into());
        let levels = vec![vec![key("r")], vec![key("a")]];
        let edges = vec![(key("a"), key("r"), BigUint::from(2u32))];
        let g = ExplicitGraph::new(levels, edges).unwrap();
        let t = truncate(&g, &[VertexId::new(1, key("a"))]).unwrap();
        let k = standard_link(&t);
        let report = validate_link(&t, &k);
        assert!(!report.ok());
        assert_eq!(report.first_failure().unwrap().check, "multiplicity");
        assert!(kappa_dim(&t, &k).is_err());
    }

    #[test]
    fn kappa_dim_of_standard_link_is_dim() {
        let t = pascal_full(5);
        let ws = kappa_dim(&t, &standard_link(&t)).unwrap();
        for vx in t.vertices() {
            let d = Ratio::from_biguint(t.dim(vx).unwrap());
            assert_eq!(ws.kdim(vx).unwrap(), &d, "at {vx}");
            assert_eq!(ws.kdim_sq(vx).unwrap(), &(&d * &d), "at {vx}");
        }
        assert_eq!(ws.kdim(t.root()).unwrap(), &Ratio::one());
    }

    #[test]
    fn kappa_dim_on_gt_cone() {
        let (t, k) = gt_cone_q_half();
        let ws = kappa_dim(&t, &k).unwrap();
        let top = VertexId::new(2, VertexKey::parse("(1,0)").unwrap());
        assert_eq!(ws.kdim_sq(&top).unwrap(), &r("25/4"));
        assert_eq!(ws.kdim(&top).unwrap(), &r("5/2"));
    }

    #[test]
    fn weights_on_standard_link_collapse() {
        let t = pascal_full(4);
        let k = standard_link(&t);
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        assert!(ws.rho_entries().all(|(_, val)| val.is_one()));
        assert_eq!(ws.generators(), &[Ratio::one()]);
        assert!(ws.is_trivial_group());
        assert_eq!(ws.base(), None);
    }

    #[test]
    fn weights_on_gt_cone() {
        let (t, k) = gt_cone_q_half();
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        let key = |s: &str| VertexKey::parse(s).unwrap();
        let top = VertexId::new(2, key("(1,0)"));
        assert_eq!(ws.rho(&top, &VertexId::new(1, key("(1)"))).unwrap(), &r("2"));
        assert_eq!(ws.rho(&top, &VertexId::new(1, key("(0)"))).unwrap(), &r("1/2"));
        // level-1 vertices have kdim 1 and weight 1 into the root
        assert_eq!(
            ws.rho(&VertexId::new(1, key("(1)")), &VertexId::new(0, key("()"))).unwrap(),
            &r("1")
        );
        assert_eq!(ws.base(), Some(&r("1/2")));
        assert_eq!(ws.generators(), &[r("1/2"), r("1"), r("2")]);
    }

    #[test]
    fn irrational_kdim_is_reported_per_vertex() {
        // two level-1 vertices, one child with kernel (1/3, 2/3):
        // S = 3 + 3/2 = 9/2, not a perfect square
        let key = |s: &str| VertexKey::Text(s.into());
        let levels = vec![vec![key("r")], vec![key("a"), key("b")], vec![key("c")]];
        let one = BigUint::one();
        let edges = vec![
            (key("a"), key("r"), one.clone()),
            (key("b"), key("r"), one.clone()),
            (key("c"), key("a"), one.clone()),
            (key("c"), key("b"), one),
        ];
        let g = ExplicitGraph::new(levels, edges).unwrap();
        let t = truncate(&g, &[VertexId::new(2, key("c"))]).unwrap();
        let mut kernel = BTreeMap::new();
        kernel.insert((VertexId::new(1, key("a")), VertexId::new(0, key("r"))), r("1"));
        kernel.insert((VertexId::new(1, key("b")), VertexId::new(0, key("r"))), r("1"));
        kernel.insert((VertexId::new(2, key("c")), VertexId::new(1, key("a"))), r("1/3"));
        kernel.insert((VertexId::new(2, key("c")), VertexId::new(1, key("b"))), r("2/3"));
        let k = Link::new(kernel);
        let ws = kappa_dim(&t, &k).unwrap();
        assert_eq!(ws.kdim_sq(&VertexId::new(2, key("c"))).unwrap(), &r("9/2"));
        assert_eq!(ws.kdim(&VertexId::new(2, key("c"))), None);
        let err = weights(&t, &k, ws).unwrap_err();
        assert!(err.to_string().contains("kappa-dimension irrational at c"));
    }

    #[test]
    fn link_from_weights_round_trip() {
        let (t, k) = gt_cone_q_half();
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        let rho: BTreeMap<Edge, Ratio> =
            ws.rho_entries().map(|(e, val)| (e.clone(), val.clone())).collect();
        let kdim: BTreeMap<VertexId, Ratio> =
            ws.kdim_entries().map(|(vx, d)| (vx.clone(), d.clone())).collect();
        let rebuilt = link_from_weights(&t, &rho, &kdim).unwrap();
        assert_eq!(rebuilt, k);
        assert!(validate_link(&t, &rebuilt).ok());

        // constant weights with kdim = dim reproduce the standard link
        let tp = pascal_full(3);
        let rho: BTreeMap<Edge, Ratio> =
            tp.edges().map(|(e, _)| (e.clone(), Ratio::one())).collect();
        let kdim: BTreeMap<VertexId, Ratio> = tp
            .vertices()
            .map(|vx| (vx.clone(), Ratio::from_biguint(tp.dim(vx).unwrap())))
            .collect();
        let rebuilt = link_from_weights(&tp, &rho, &kdim).unwrap();
        assert_eq!(rebuilt, standard_link(&tp));
    }

    #[test]
    fn link_from_weights_with_bad_kdim_fails_validation() {
        let tp = pascal_full(2);
        let rho: BTreeMap<Edge, Ratio> =
            tp.edges().map(|(e, _)| (e.clone(), Ratio::one())).collect();
        // kdim == 1 everywhere does not satisfy the recursion
        let kdim: BTreeMap<VertexId, Ratio> =
            tp.vertices().map(|vx| (vx.clone(), Ratio::one())).collect();
        let k = link_from_weights(&tp, &rho, &kdim).unwrap();
        assert!(!validate_link(&tp, &k).ok());
    }

    #[test]
    fn oracle_matches_examples() {
        let t = pascal_full(2);
        let k = standard_link(&t);
        assert_eq!(kappa_dim_oracle(&t, &k, &v(2, 1)).unwrap(), r("4"));
        assert_eq!(kappa_dim_oracle(&t, &k, t.root()).unwrap(), r("1"));

        let (t, k) = gt_cone_q_half();
        let top = VertexId::new(2, VertexKey::parse("(1,0)").unwrap());
        assert_eq!(kappa_dim_oracle(&t, &k, &top).unwrap(), r("25/4"));
    }

    /// Independent path sums over weights, for the triple agreement law.
    fn rho_path_sums(t: &Truncation, ws: &WeightSystem, v: &VertexId) -> (Ratio, Ratio) {
        fn walk(
            t: &Truncation,
            ws: &WeightSystem,
            v: &VertexId,
            product: Ratio,
            direct: &mut Ratio,
            reciprocal: &mut Ratio,
        ) {
            if v == t.root() {
                *direct = direct.clone() + product.clone();
                *reciprocal = reciprocal.clone() + product.recip().unwrap();
                return;
            }
            for (p, _) in t.parents(v).unwrap() {
                let r = ws.rho(v, p).unwrap();
                walk(t, ws, p, product.clone() * r.clone(), direct, reciprocal);
            }
        }
        let mut direct = Ratio::zero();
        let mut reciprocal = Ratio::zero();
        walk(t, ws, v, Ratio::one(), &mut direct, &mut reciprocal);
        (direct, reciprocal)
    }

    #[test]
    fn triple_agreement_on_both_cones() {
        let t = pascal_full(4);
        let k = standard_link(&t);
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        let (tg, kg) = gt_cone_q_half();
        let wsg = weights(&tg, &kg, kappa_dim(&tg, &kg).unwrap()).unwrap();
        for (t, k, ws) in [(&t, &k, &ws), (&tg, &kg, &wsg)] {
            for vx in t.vertices() {
                let kd = ws.kdim(vx).unwrap();
                if vx != t.root() {
                    let (direct, reciprocal) = rho_path_sums(t, ws, vx);
                    assert_eq!(&direct, kd, "direct path sum at {vx}");
                    assert_eq!(&reciprocal, kd, "reciprocal path sum at {vx}");
                    // recursion form: kdim(z) = sum rho * kdim(z')
                    let mut s = Ratio::zero();
                    for (p, _) in t.parents(vx).unwrap() {
                        s = s + (ws.rho(vx, p).unwrap().clone() * ws.kdim(p).unwrap().clone());
                    }
                    assert_eq!(&s, kd, "recursion at {vx}");
                }
                let oracle = kappa_dim_oracle(t, k, vx).unwrap();
                assert_eq!(&oracle, ws.kdim_sq(vx).unwrap(), "oracle at {vx}");
            }
        }
    }

    #[test]
    fn telescoping_along_paths() {
        // product of kappa over a path equals product of rho / kdim(top)
        let (t, k) = gt_cone_q_half();
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        fn walk(
            t: &Truncation,
            k: &Link,
            ws: &WeightSystem,
            v: &VertexId,
            kappa_prod: Ratio,
            rho_prod: Ratio,
            top: &VertexId,
        ) {
            if v == t.root() {
                let expected = &rho_prod / ws.kdim(top).unwrap();
                assert_eq!(kappa_prod, expected);
                return;
            }
            for (p, _) in t.parents(v).unwrap() {
                walk(
                    t,
                    k,
                    ws,
                    p,
                    kappa_prod.clone() * k.value(v, p).unwrap().clone(),
                    rho_prod.clone() * ws.rho(v, p).unwrap().clone(),
                    top,
                );
            }
        }
        for vx in t.vertices() {
            walk(&t, &k, &ws, vx, Ratio::one(), Ratio::one(), vx);
        }
    }
}
