//! Coherent systems and power-scaling harmonic functions.
//!
//! A depth-N coherent system is a nonnegative function on the levels of
//! a truncation with `nu(root) = 1` that is harmonic for a link:
//! `nu(z') = sum_z nu(z) * kappa(z,z')`. Its counterpart on the
//! weight-extended graph scales by a group power along the second
//! coordinate: `nu~(z,gamma) = gamma^beta * nu~(z,1)`. The two are in
//! exact affine bijection via
//! `kdim(z) * nu~(z,gamma) = dim(z) * nu(z) * gamma^beta`,
//! realised here by [`to_extended`] and [`from_extended`] (the
//! harmonicity of the transform is the `beta = -1` correspondence).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::extension::{extend, ExtTruncation, ExtVertex};
use crate::graph::{Truncation, VertexId};
use crate::group::GroupElement;
use crate::link::{Link, WeightSystem};
use crate::ratio::Ratio;
use crate::report::Report;

/// Finitely supported nonnegative level functions `nu` with
/// `nu(root) = 1`, harmonic for a link. Absent vertices carry 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentSystem {
    levels: Vec<BTreeMap<VertexId, Ratio>>,
}

impl CoherentSystem {
    /// Shapes the data; zero entries are dropped. Harmonicity is the
    /// business of [`check_harmonic`].
    pub fn new(levels: Vec<BTreeMap<VertexId, Ratio>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidHarmonic("no levels".into()));
        }
        for (n, level) in levels.iter().enumerate() {
            for (v, value) in level {
                if v.level != n {
                    return Err(Error::InvalidHarmonic(format!(
                        "vertex {v} stored at level {n} but has level {}",
                        v.level
                    )));
                }
                if value.is_negative() {
                    return Err(Error::InvalidHarmonic(format!(
                        "negative value {value} at {v}"
                    )));
                }
            }
        }
        let levels = levels
            .into_iter()
            .map(|level| level.into_iter().filter(|(_, val)| !val.is_zero()).collect())
            .collect();
        Ok(CoherentSystem { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn value(&self, v: &VertexId) -> Ratio {
        self.levels
            .get(v.level)
            .and_then(|lv| lv.get(v))
            .cloned()
            .unwrap_or_else(Ratio::zero)
    }

    pub fn level_support(&self, n: usize) -> &BTreeMap<VertexId, Ratio> {
        &self.levels[n]
    }

    /// `lambda * a + (1 - lambda) * b` for rational `lambda` in `[0,1]`.
    pub fn affine_combination(lambda: &Ratio, a: &Self, b: &Self) -> Result<Self> {
        if a.depth() != b.depth() {
            return Err(Error::InvalidHarmonic("depth mismatch".into()));
        }
        if lambda.is_negative() || (Ratio::one() - lambda.clone()).is_negative() {
            return Err(Error::InvalidHarmonic(format!(
                "affine coefficient {lambda} outside [0,1]"
            )));
        }
        let complement = Ratio::one() - lambda.clone();
        let mut levels = Vec::with_capacity(a.levels.len());
        for n in 0..a.levels.len() {
            let mut level: BTreeMap<VertexId, Ratio> = BTreeMap::new();
            for (v, val) in &a.levels[n] {
                level.insert(v.clone(), lambda * val);
            }
            for (v, val) in &b.levels[n] {
                let entry = level.entry(v.clone()).or_insert_with(Ratio::zero);
                *entry = entry.clone() + (&complement * val);
            }
            levels.push(level);
        }
        CoherentSystem::new(levels)
    }
}

/// Transports a probability distribution on the top level down through
/// the link: `nu_n(z') = sum_z nu_{n+1}(z) * kappa(z,z')`.
pub fn pullback(
    t: &Truncation,
    k: &Link,
    top: &BTreeMap<VertexId, Ratio>,
) -> Result<CoherentSystem> {
    let depth = t.top_level();
    let mut sum = Ratio::zero();
    for (v, value) in top {
        if !t.contains(v) || v.level != depth {
            return Err(Error::NotAProbability(format!(
                "support vertex {v} is not on level {depth} of the truncation"
            )));
        }
        if value.is_negative() {
            return Err(Error::NotAProbability(format!("negative mass {value} at {v}")));
        }
        sum = sum + value.clone();
    }
    if !sum.is_one() {
        return Err(Error::NotAProbability(format!("total mass {sum} != 1")));
    }

    let mut levels: Vec<BTreeMap<VertexId, Ratio>> = vec![BTreeMap::new(); depth + 1];
    levels[depth] = top
        .iter()
        .filter(|(_, val)| !val.is_zero())
        .map(|(v, val)| (v.clone(), val.clone()))
        .collect();
    for n in (0..depth).rev() {
        let mut next: BTreeMap<VertexId, Ratio> = BTreeMap::new();
        for (z, mass) in &levels[n + 1] {
            for (p, _) in t.parents(z)? {
                let kappa = k.value(z, p).ok_or_else(|| {
                    Error::InvalidLink(format!("no kernel value on edge {z} -> {p}"))
                })?;
                let entry = next.entry(p.clone()).or_insert_with(Ratio::zero);
                *entry = entry.clone() + (mass * kappa);
            }
        }
        next.retain(|_, val| !val.is_zero());
        levels[n] = next;
    }
    CoherentSystem::new(levels)
}

/// Verifies normalisation, harmonicity, and unit level sums, exactly.
pub fn check_harmonic(t: &Truncation, k: &Link, nu: &CoherentSystem) -> Report {
    let mut report = Report::new();
    let depth = nu.depth().min(t.top_level());
    if nu.depth() != t.top_level() {
        report.fail_at(
            "depth",
            format!("depth {}", nu.depth()),
            format!("system depth differs from truncation top level {}", t.top_level()),
        );
    }

    if nu.value(t.root()).is_one() {
        report.pass("normalization", "nu(root) = 1".to_string());
    } else {
        report.fail_at(
            "normalization",
            t.root().to_string(),
            format!("nu(root) = {} != 1", nu.value(t.root())),
        );
    }

    let mut harmonic_ok = true;
    for n in 0..depth {
        let mut pushed: BTreeMap<VertexId, Ratio> = BTreeMap::new();
        for (z, mass) in nu.level_support(n + 1) {
            for (p, _) in t.parents(z).unwrap() {
                if let Some(kappa) = k.value(z, p) {
                    let entry = pushed.entry(p.clone()).or_insert_with(Ratio::zero);
                    *entry = entry.clone() + (mass * kappa);
                }
            }
        }
        for v in t.level(n) {
            let expected = pushed.remove(v).unwrap_or_else(Ratio::zero);
            let stored = nu.value(v);
            if expected != stored {
                harmonic_ok = false;
                report.fail_at(
                    "harmonicity",
                    v.to_string(),
                    format!("stored {stored}, pushed {expected}"),
                );
            }
        }
    }
    if harmonic_ok {
        report.pass("harmonicity", format!("levels 0..{depth} are harmonic"));
    }

    let mut sums_ok = true;
    for n in 0..=depth {
        let sum: Ratio = nu.level_support(n).values().cloned().sum();
        if !sum.is_one() {
            sums_ok = false;
            report.fail_at("level-sum", format!("level {n}"), format!("sum {sum} != 1"));
        }
    }
    if sums_ok {
        report.pass("level-sum", "every level sums to 1".to_string());
    }

    report
}

/// Finitely supported function on extended vertices with the power
/// scaling law `nu~(z,gamma) = gamma^beta * nu~(z,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedHarmonic {
    beta: i64,
    levels: Vec<BTreeMap<ExtVertex, Ratio>>,
}

impl ExtendedHarmonic {
    pub fn new(beta: i64, levels: Vec<BTreeMap<ExtVertex, Ratio>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidHarmonic("no levels".into()));
        }
        for (n, level) in levels.iter().enumerate() {
            for (v, value) in level {
                if v.level() != n {
                    return Err(Error::InvalidHarmonic(format!(
                        "extended vertex {v} stored at level {n}"
                    )));
                }
                if value.is_negative() {
                    return Err(Error::InvalidHarmonic(format!(
                        "negative value {value} at {v}"
                    )));
                }
            }
        }
        Ok(ExtendedHarmonic { beta, levels })
    }

    pub fn beta(&self) -> i64 {
        self.beta
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn value(&self, v: &ExtVertex) -> Ratio {
        self.levels
            .get(v.level())
            .and_then(|lv| lv.get(v))
            .cloned()
            .unwrap_or_else(Ratio::zero)
    }

    pub fn level_support(&self, n: usize) -> &BTreeMap<ExtVertex, Ratio> {
        &self.levels[n]
    }

    /// The grade-1 value `nu~(z,1)` derived from any stored grade of
    /// `z` through the scaling law; `None` when `z` is unstored at its
    /// level (meaning `nu~(z, .) = 0`).
    pub fn base_value(&self, z: &VertexId) -> Option<Ratio> {
        let level = self.levels.get(z.level)?;
        level
            .iter()
            .find(|(v, _)| &v.z == z)
            .map(|(v, value)| value * &v.gamma.value_pow(-self.beta))
    }

    /// Evaluates at any grade via the scaling law.
    pub fn value_at(&self, v: &ExtVertex) -> Ratio {
        match self.base_value(&v.z) {
            Some(c) => c * v.gamma.value_pow(self.beta),
            None => Ratio::zero(),
        }
    }

    /// Pointwise affine combination of the functions the two windows
    /// represent, materialised on the union of the stored supports.
    /// Values are taken through the scaling law: the windows may store
    /// the same vertex at different grades.
    pub fn affine_combination(lambda: &Ratio, a: &Self, b: &Self) -> Result<Self> {
        if a.depth() != b.depth() || a.beta != b.beta {
            return Err(Error::InvalidHarmonic("depth or beta mismatch".into()));
        }
        let complement = Ratio::one() - lambda.clone();
        let mut levels = Vec::with_capacity(a.levels.len());
        for n in 0..a.levels.len() {
            let mut level: BTreeMap<ExtVertex, Ratio> = BTreeMap::new();
            for v in a.levels[n].keys().chain(b.levels[n].keys()) {
                let value = &(lambda * &a.value_at(v)) + &(&complement * &b.value_at(v));
                level.insert(v.clone(), value);
            }
            levels.push(level);
        }
        ExtendedHarmonic::new(a.beta, levels)
    }
}

/// The extension cone over the support of a coherent system, seeded at
/// the identity grade. This is the window on which [`to_extended`]
/// materialises its output.
pub fn extension_cone_over(
    t: &Truncation,
    ws: &WeightSystem,
    nu: &CoherentSystem,
) -> Result<ExtTruncation> {
    let seeds: Vec<ExtVertex> = nu
        .level_support(nu.depth())
        .keys()
        .map(|z| ExtVertex::new(z.clone(), GroupElement::identity()))
        .collect();
    extend(t, ws, &seeds)
}

/// Transports a coherent system to the extension:
/// `nu~(z,gamma) = (dim(z)/kdim(z)) * nu(z) * gamma^beta`,
/// materialised on the extension cone over the support of `nu`.
pub fn to_extended(
    t: &Truncation,
    ws: &WeightSystem,
    nu: &CoherentSystem,
    beta: i64,
) -> Result<ExtendedHarmonic> {
    if nu.depth() != t.top_level() {
        return Err(Error::InvalidHarmonic(format!(
            "system depth {} differs from truncation top level {}",
            nu.depth(),
            t.top_level()
        )));
    }
    let cone = extension_cone_over(t, ws, nu)?;
    let mut levels: Vec<BTreeMap<ExtVertex, Ratio>> = vec![BTreeMap::new(); nu.depth() + 1];
    for (n, level) in levels.iter_mut().enumerate() {
        for v in cone.level(n) {
            let kdim = ws.require_kdim(&v.z)?;
            let dim = Ratio::from_biguint(t.dim(&v.z)?);
            let value = &(&dim / kdim) * &nu.value(&v.z) * v.gamma.value_pow(beta);
            level.insert(v.clone(), value);
        }
    }
    ExtendedHarmonic::new(beta, levels)
}

/// Inverse transport: `nu(z) = (kdim(z)/dim(z)) * nu~(z,1)`. Fails when
/// the stored grades of some vertex violate the scaling law, or when
/// the result is not normalised at the root.
pub fn from_extended(
    t: &Truncation,
    ws: &WeightSystem,
    ext: &ExtendedHarmonic,
) -> Result<CoherentSystem> {
    let mut levels: Vec<BTreeMap<VertexId, Ratio>> = vec![BTreeMap::new(); ext.depth() + 1];
    for (n, level) in levels.iter_mut().enumerate() {
        let mut grade_one: BTreeMap<VertexId, Ratio> = BTreeMap::new();
        for (v, value) in ext.level_support(n) {
            let c = value * &v.gamma.value_pow(-ext.beta());
            match grade_one.get(&v.z) {
                Some(existing) if existing != &c => {
                    return Err(Error::InvalidHarmonic(format!(
                        "scaling law fails at {v}: grades disagree on nu~({},1)",
                        v.z
                    )));
                }
                _ => {
                    grade_one.insert(v.z.clone(), c);
                }
            }
        }
        for (z, c) in grade_one {
            let kdim = ws.require_kdim(&z)?;
            let dim = Ratio::from_biguint(t.dim(&z)?);
            level.insert(z, &(kdim / &dim) * &c);
        }
    }
    let nu = CoherentSystem::new(levels)?;
    if !nu.value(t.root()).is_one() {
        return Err(Error::InvalidHarmonic(format!(
            "normalization failure at root: nu(root) = {}",
            nu.value(t.root())
        )));
    }
    Ok(nu)
}

/// Verifies the three harmonic-function laws on stored data, plus the
/// per-level normalisation identity
/// `sum_z (kdim(z)/dim(z)) * nu~(z,1) = 1`.
pub fn check_extended(x: &ExtTruncation, ext: &ExtendedHarmonic) -> Report {
    let mut report = Report::new();
    let t = x.base();
    let ws = x.weight_system();
    let depth = ext.depth().min(x.top_level());
    if ext.depth() != x.top_level() {
        report.fail_at(
            "depth",
            format!("depth {}", ext.depth()),
            format!("stored depth differs from cone top level {}", x.top_level()),
        );
    }

    // (i) harmonicity for the extension link. The sum at (z',gamma')
    // ranges over extended children whose grades need not be stored
    // (the cone is closed under parents, not children), so children are
    // evaluated through the scaling law. Children of z' outside the
    // base truncation carry no mass by finite support.
    let mut harmonic_ok = true;
    for n in 0..depth {
        let mut targets: std::collections::BTreeSet<ExtVertex> =
            x.level(n).iter().cloned().collect();
        targets.extend(ext.level_support(n).keys().cloned());
        for v in targets {
            let mut pushed = Ratio::zero();
            for child in t.children(&v.z) {
                let Some(rho) = ws.rho(child, &v.z) else {
                    continue;
                };
                let shift = GroupElement::from_ratio(rho).expect("weights are positive");
                let child_vertex = ExtVertex::new(child.clone(), v.gamma.mul(&shift.inv()));
                let mass = ext.value_at(&child_vertex);
                if !mass.is_zero() {
                    let mu = &Ratio::from_biguint(t.dim(&v.z).expect("in base"))
                        / &Ratio::from_biguint(t.dim(child).expect("in base"));
                    pushed = pushed + (mass * mu);
                }
            }
            let stored = ext.value_at(&v);
            if pushed != stored {
                harmonic_ok = false;
                report.fail_at(
                    "harmonicity",
                    v.to_string(),
                    format!("value {stored}, pushed {pushed}"),
                );
            }
        }
    }
    if harmonic_ok {
        report.pass("harmonicity", format!("levels 0..{depth} are mu~-harmonic"));
    }

    // (ii) power scaling: all stored grades of one vertex must agree
    let mut scaling_ok = true;
    for n in 0..=depth {
        let mut grade_one: BTreeMap<VertexId, Ratio> = BTreeMap::new();
        for (v, value) in ext.level_support(n) {
            let c = value * &v.gamma.value_pow(-ext.beta());
            if let Some(existing) = grade_one.get(&v.z) {
                if existing != &c {
                    scaling_ok = false;
                    report.fail_at(
                        "power-scaling",
                        v.to_string(),
                        format!("implies nu~({},1) = {c}, other grades give {existing}", v.z),
                    );
                }
            } else {
                grade_one.insert(v.z.clone(), c);
            }
        }
    }
    if scaling_ok {
        report.pass("power-scaling", "stored grades are consistent".to_string());
    }

    // (iii) normalisation at the root
    match ext.base_value(t.root()) {
        Some(c) if c.is_one() => report.pass("root-normalization", "nu~(root,1) = 1".to_string()),
        Some(c) => report.fail_at(
            "root-normalization",
            t.root().to_string(),
            format!("nu~(root,1) = {c} != 1"),
        ),
        None => report.fail_at(
            "root-normalization",
            t.root().to_string(),
            "root level is unstored".to_string(),
        ),
    }

    // per-level normalisation identity
    let mut norm_ok = true;
    for n in 0..=depth {
        let mut seen: BTreeMap<VertexId, Ratio> = BTreeMap::new();
        for (v, value) in ext.level_support(n) {
            let c = value * &v.gamma.value_pow(-ext.beta());
            seen.entry(v.z.clone()).or_insert(c);
        }
        let mut sum = Ratio::zero();
        for (z, c) in seen {
            let Some(kdim) = ws.kdim(&z) else {
                norm_ok = false;
                report.fail_at("level-normalization", z.to_string(), "kdim unavailable");
                continue;
            };
            let dim = Ratio::from_biguint(t.dim(&z).expect("stored vertex in base"));
            sum = sum + (&(kdim / &dim) * &c);
        }
        if !sum.is_one() {
            norm_ok = false;
            report.fail_at(
                "level-normalization",
                format!("level {n}"),
                format!("sum (kdim/dim) * nu~(.,1) = {sum} != 1"),
            );
        }
    }
    if norm_ok {
        report.pass(
            "level-normalization",
            "sum (kdim/dim) * nu~(.,1) = 1 on every level".to_string(),
        );
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{truncate, GraphProvider, LevelSeed, PascalGraph};
    use crate::link::{kappa_dim, standard_link, weights};
    use crate::uq::{build_uq, QParam, Signature};

    fn r(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    fn pascal_setup(depth: usize) -> (Truncation, Link, WeightSystem) {
        let g = PascalGraph;
        let LevelSeed::Finite(seeds) = g.level_seed(depth) else {
            unreachable!()
        };
        let t = truncate(&g, &seeds).unwrap();
        let k = standard_link(&t);
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        (t, k, ws)
    }

    fn uq_setup() -> (Truncation, Link, WeightSystem) {
        let q = QParam::new(r("1/2")).unwrap();
        build_uq(&q, &[Signature::new(vec![1, 0]).unwrap()]).unwrap()
    }

    fn binomial_system(t: &Truncation, p: &Ratio) -> CoherentSystem {
        let complement = Ratio::one() - p.clone();
        let mut levels = Vec::new();
        for n in 0..=t.top_level() {
            let mut level = BTreeMap::new();
            for v in t.level(n) {
                let d = Ratio::from_biguint(t.dim(v).unwrap());
                let crate::graph::VertexKey::Tuple(parts) = &v.key else {
                    unreachable!()
                };
                let k = parts[1];
                let value = &(&d * &p.pow(k)) * &complement.pow(n as i64 - k);
                level.insert(v.clone(), value);
            }
            levels.push(level);
        }
        CoherentSystem::new(levels).unwrap()
    }

    #[test]
    fn pullback_on_pascal() {
        let (t, k, _) = pascal_setup(2);
        let mut top = BTreeMap::new();
        top.insert(PascalGraph::vertex(2, 0), r("1/4"));
        top.insert(PascalGraph::vertex(2, 1), r("1/2"));
        top.insert(PascalGraph::vertex(2, 2), r("1/4"));
        let nu = pullback(&t, &k, &top).unwrap();
        assert_eq!(nu.value(&PascalGraph::vertex(1, 0)), r("1/2"));
        assert_eq!(nu.value(t.root()), r("1"));
        assert!(check_harmonic(&t, &k, &nu).ok());
    }

    #[test]
    fn pullback_of_delta_gives_cotransition_masses() {
        let (t, k, _) = uq_setup();
        let top_sig = Signature::new(vec![1, 0]).unwrap();
        let mut top = BTreeMap::new();
        top.insert(top_sig.to_vertex(), r("1"));
        let nu = pullback(&t, &k, &top).unwrap();
        assert_eq!(nu.value(&Signature::new(vec![1]).unwrap().to_vertex()), r("4/5"));
        assert_eq!(nu.value(&Signature::new(vec![0]).unwrap().to_vertex()), r("1/5"));
        assert!(check_harmonic(&t, &k, &nu).ok());
    }

    #[test]
    fn pullback_rejects_bad_tops() {
        let (t, k, _) = pascal_setup(2);
        let mut top = BTreeMap::new();
        top.insert(PascalGraph::vertex(2, 0), r("1/2"));
        assert!(matches!(
            pullback(&t, &k, &top),
            Err(Error::NotAProbability(_))
        ));
        let mut top = BTreeMap::new();
        top.insert(PascalGraph::vertex(1, 0), r("1"));
        assert!(pullback(&t, &k, &top).is_err());
    }

    #[test]
    fn binomial_coherence_passes_and_perturbation_is_located() {
        let (t, k, _) = pascal_setup(6);
        let nu = binomial_system(&t, &r("1/3"));
        assert!(check_harmonic(&t, &k, &nu).ok());

        let mut levels: Vec<BTreeMap<VertexId, Ratio>> = (0..=6)
            .map(|n| nu.level_support(n).clone())
            .collect();
        let target = PascalGraph::vertex(3, 1);
        let old = levels[3][&target].clone();
        levels[3].insert(target.clone(), old + r("1/1000"));
        let broken = CoherentSystem::new(levels).unwrap();
        let report = check_harmonic(&t, &k, &broken);
        assert!(!report.ok());
        // the perturbation at (3,1) surfaces at its parents and at itself
        let locations: Vec<&str> = report
            .items
            .iter()
            .filter(|i| i.status == crate::report::Status::Fail && i.check == "harmonicity")
            .filter_map(|i| i.location.as_deref())
            .collect();
        assert!(locations.iter().any(|l| *l == "(2,0)" || *l == "(2,1)"));
        assert!(locations.contains(&"(3,1)"));
    }

    #[test]
    fn transform_on_trivial_group_is_identity() {
        let (t, k, ws) = pascal_setup(3);
        let mut top = BTreeMap::new();
        top.insert(PascalGraph::vertex(3, 0), r("1/2"));
        top.insert(PascalGraph::vertex(3, 2), r("1/2"));
        let nu = pullback(&t, &k, &top).unwrap();
        let ext = to_extended(&t, &ws, &nu, -1).unwrap();
        for n in 0..=3 {
            for (v, value) in ext.level_support(n) {
                assert!(v.gamma.is_identity());
                assert_eq!(value, &nu.value(&v.z));
            }
        }
        let back = from_extended(&t, &ws, &ext).unwrap();
        assert_eq!(back, nu);
    }

    #[test]
    fn transform_on_uq_matches_formula() {
        let (t, k, ws) = uq_setup();
        let top_vertex = Signature::new(vec![1, 0]).unwrap().to_vertex();
        let mut top = BTreeMap::new();
        top.insert(top_vertex.clone(), r("1"));
        let nu = pullback(&t, &k, &top).unwrap();
        let ext = to_extended(&t, &ws, &nu, -1).unwrap();

        // nu~((1,0), q^k) = (4/5) * nu((1,0)) * 2^k at q = 1/2, beta = -1
        let v0 = ExtVertex::new(top_vertex.clone(), GroupElement::identity());
        assert_eq!(ext.value(&v0), r("4/5"));
        let v2 = ExtVertex::new(
            top_vertex.clone(),
            GroupElement::from_ratio(&r("1/4")).unwrap(), // q^2
        );
        assert_eq!(ext.value_at(&v2), r("16/5"));

        assert_eq!(ext.base_value(t.root()), Some(Ratio::one()));

        let cone = extension_cone_over(&t, &ws, &nu).unwrap();
        assert!(check_extended(&cone, &ext).ok());

        let back = from_extended(&t, &ws, &ext).unwrap();
        assert_eq!(back, nu);
    }

    #[test]
    fn check_extended_locates_scaling_violation() {
        let (t, k, ws) = uq_setup();
        let mut top = BTreeMap::new();
        top.insert(Signature::new(vec![1, 0]).unwrap().to_vertex(), r("1"));
        let nu = pullback(&t, &k, &top).unwrap();
        let ext = to_extended(&t, &ws, &nu, -1).unwrap();
        let cone = extension_cone_over(&t, &ws, &nu).unwrap();

        let mut levels: Vec<BTreeMap<ExtVertex, Ratio>> =
            (0..=2).map(|n| ext.level_support(n).clone()).collect();
        let (victim, old) = levels[0].iter().next().map(|(v, x)| (v.clone(), x.clone())).unwrap();
        levels[0].insert(victim, old + r("1/7"));
        let broken = ExtendedHarmonic::new(-1, levels).unwrap();
        let report = check_extended(&cone, &broken);
        assert!(!report.ok());
        assert!(report
            .items
            .iter()
            .any(|i| i.check == "power-scaling" && i.status == crate::report::Status::Fail));

        assert!(from_extended(&t, &ws, &broken).is_err());
    }

    #[test]
    fn zero_data_is_rejected_at_the_root() {
        let (t, _, ws) = uq_setup();
        let root = ExtVertex::new(t.root().clone(), GroupElement::identity());
        let levels = vec![
            BTreeMap::from([(root, Ratio::zero())]),
            BTreeMap::new(),
            BTreeMap::new(),
        ];
        let zero = ExtendedHarmonic::new(-1, levels).unwrap();
        let err = from_extended(&t, &ws, &zero).unwrap_err();
        assert!(err.to_string().contains("normalization failure at root"));
    }

    #[test]
    fn transform_is_affine() {
        let (t, k, _) = pascal_setup(4);
        let (_, _, ws) = pascal_setup(4);
        let mut top1 = BTreeMap::new();
        top1.insert(PascalGraph::vertex(4, 0), r("1"));
        let mut top2 = BTreeMap::new();
        top2.insert(PascalGraph::vertex(4, 2), r("1/3"));
        top2.insert(PascalGraph::vertex(4, 4), r("2/3"));
        let nu1 = pullback(&t, &k, &top1).unwrap();
        let nu2 = pullback(&t, &k, &top2).unwrap();
        let lambda = r("1/3");
        let mixed = CoherentSystem::affine_combination(&lambda, &nu1, &nu2).unwrap();
        let lhs = to_extended(&t, &ws, &mixed, -1).unwrap();
        let rhs = ExtendedHarmonic::affine_combination(
            &lambda,
            &to_extended(&t, &ws, &nu1, -1).unwrap(),
            &to_extended(&t, &ws, &nu2, -1).unwrap(),
        )
        .unwrap();
        for n in 0..=4 {
            let mut keys: std::collections::BTreeSet<ExtVertex> =
                lhs.level_support(n).keys().cloned().collect();
            keys.extend(rhs.level_support(n).keys().cloned());
            for v in keys {
                assert_eq!(lhs.value(&v), rhs.value(&v), "at {v}");
            }
        }
    }
}
