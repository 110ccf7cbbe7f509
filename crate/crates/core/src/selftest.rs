//! The machine-checkable invariant suite.
//!
//! Every suite re-derives its expected values independently (path
//! enumeration, oracle specialisations, exhaustive scans) and compares
//! exactly. Results carry no timing data, so two runs of the suite
//! produce byte-identical JSON.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::extension::{extend, translate_edge, ExtTruncation, ExtVertex};
use crate::graph::{truncate, GraphProvider, LevelSeed, Truncation, VertexId};
use crate::group::GroupElement;
use crate::harmonic::{
    check_extended, check_harmonic, extension_cone_over, pullback, to_extended, from_extended,
    CoherentSystem, ExtendedHarmonic,
};
use crate::io;
use crate::k0::{embed_m_integer, embed_mu, K0Element, K0Functional};
use crate::link::{kappa_dim, kappa_dim_oracle, standard_link, weights, Link, WeightSystem};
use crate::ratio::Ratio;
use crate::sample::random_layered_graph;
use crate::uq::{build_uq, q_schur_principal, q_weight_exponent, signatures, QParam, Signature};

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Suite = std::result::Result<String, String>;

fn run(name: &str, suite: impl FnOnce() -> Suite) -> SuiteResult {
    match suite() {
        Ok(detail) => SuiteResult {
            name: name.to_string(),
            passed: true,
            detail,
        },
        Err(detail) => SuiteResult {
            name: name.to_string(),
            passed: false,
            detail,
        },
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn lib<E: std::fmt::Display>(e: E) -> String {
    format!("library error: {e}")
}

fn full_pascal(depth: usize) -> Truncation {
    let g = crate::graph::PascalGraph;
    let LevelSeed::Finite(seeds) = g.level_seed(depth) else {
        unreachable!()
    };
    truncate(&g, &seeds).expect("pascal cone")
}

fn standard_setup(t: &Truncation) -> std::result::Result<(Link, WeightSystem), String> {
    let k = standard_link(t);
    let ws = weights(t, &k, kappa_dim(t, &k).map_err(lib)?).map_err(lib)?;
    Ok((k, ws))
}

fn identity_seeds(t: &Truncation) -> Vec<ExtVertex> {
    t.level(t.top_level())
        .iter()
        .map(|z| ExtVertex::new(z.clone(), GroupElement::identity()))
        .collect()
}

/// Exhaustive path sums over the weights: `sum prod rho` and
/// `sum 1/prod rho`, independent of any recursion.
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
            *reciprocal = reciprocal.clone() + product.recip().expect("weights are positive");
            return;
        }
        for (p, _) in t.parents(v).unwrap() {
            let rho = ws.rho(v, p).expect("weights on all edges");
            walk(t, ws, p, product.clone() * rho.clone(), direct, reciprocal);
        }
    }
    let mut direct = Ratio::zero();
    let mut reciprocal = Ratio::zero();
    walk(t, ws, v, Ratio::one(), &mut direct, &mut reciprocal);
    (direct, reciprocal)
}

/// Suite 1: on standard links the whole weight structure collapses and
/// the extension is a copy of the base.
pub fn suite_standard_collapse() -> SuiteResult {
    run("standard-link-collapse", || {
        let mut checked = 0usize;
        let mut cones = Vec::new();
        cones.push(full_pascal(8));
        for (seed, sizes) in [(11u64, vec![1usize, 3, 4, 5, 4]), (23, vec![1, 2, 5, 3, 6])] {
            let g = random_layered_graph(seed, &sizes);
            let LevelSeed::Finite(top) = g.level_seed(sizes.len() - 1) else {
                unreachable!()
            };
            let t = truncate(&g, &top).map_err(lib)?;
            // push the graph through its JSON schema
            let doc = io::truncation_to_json(&t);
            let parsed = io::graph_from_json(&doc).map_err(lib)?;
            let LevelSeed::Finite(top) = parsed.level_seed(sizes.len() - 1) else {
                unreachable!()
            };
            let t = truncate(&parsed, &top).map_err(lib)?;
            ensure!(
                io::truncation_to_json(&t) == doc,
                "JSON round trip altered the graph (seed {seed})"
            );
            cones.push(t);
        }

        for t in &cones {
            let (_, ws) = standard_setup(t)?;
            for v in t.vertices() {
                let dim = Ratio::from_biguint(t.dim(v).map_err(lib)?);
                ensure!(
                    ws.kdim(v) == Some(&dim),
                    "kdim != dim at {v} on a standard link"
                );
                checked += 1;
            }
            ensure!(
                ws.rho_entries().all(|(_, r)| r.is_one()),
                "some weight differs from 1 on a standard link"
            );
            ensure!(
                ws.generators() == [Ratio::one()],
                "generator set is not {{1}}"
            );
            ensure!(ws.base().is_none(), "trivial group reported a base");

            let x = extend(t, &ws, &identity_seeds(t)).map_err(lib)?;
            for n in 0..=t.top_level() {
                ensure!(
                    x.level(n).len() == t.level(n).len(),
                    "extension level {n} has different size"
                );
                for (xv, zv) in x.level(n).iter().zip(t.level(n)) {
                    ensure!(
                        xv.gamma.is_identity() && &xv.z == zv,
                        "extension vertex {xv} does not mirror {zv}"
                    );
                }
            }
            ensure!(
                x.edges().count() == t.edges().count(),
                "extension edge count differs from base"
            );
            for ((child, parent), _) in t.edges() {
                let c = ExtVertex::new(child.clone(), GroupElement::identity());
                let p = ExtVertex::new(parent.clone(), GroupElement::identity());
                ensure!(x.has_edge(&c, &p), "base edge {child} -> {parent} missing");
            }
        }
        Ok(format!(
            "kdim = dim, rho = 1, trivial group, isomorphic extension on {} graphs ({} vertices)",
            cones.len(),
            checked
        ))
    })
}

fn uq_lambda_range() -> Vec<Signature> {
    let mut out = Vec::new();
    for n in 0..=3usize {
        out.extend(signatures(n, 4));
    }
    out
}

fn q_params() -> Vec<QParam> {
    ["1/2", "2/3", "3"]
        .iter()
        .map(|s| QParam::new(s.parse().unwrap()).unwrap())
        .collect()
}

/// Suite 2: the three path formulas for the kappa-dimension agree, and
/// all equal the principal Schur specialisation.
pub fn suite_triple_agreement() -> SuiteResult {
    run("kappa-dim-triple-agreement", || {
        let mut checked = 0usize;
        for q in q_params() {
            for lambda in uq_lambda_range() {
                let (t, link, ws) = build_uq(&q, std::slice::from_ref(&lambda)).map_err(lib)?;
                let v = lambda.to_vertex();
                let kdim = ws.kdim(&v).ok_or_else(|| format!("no kdim at {lambda}"))?;

                let (direct, reciprocal) = rho_path_sums(&t, &ws, &v);
                ensure!(&direct == kdim, "sum prod rho != kdim at {lambda}");
                ensure!(&reciprocal == kdim, "sum 1/prod rho != kdim at {lambda}");

                let sq = kappa_dim_oracle(&t, &link, &v).map_err(lib)?;
                let sqrt = sq
                    .sqrt_exact()
                    .ok_or_else(|| format!("path sum not a perfect square at {lambda}"))?;
                ensure!(&sqrt == kdim, "sqrt of kappa path sum != kdim at {lambda}");

                let schur = q_schur_principal(&lambda, &q);
                ensure!(&schur == kdim, "schur oracle != kdim at {lambda}");
                checked += 1;
            }
        }
        Ok(format!(
            "4 independent formulas agree at {checked} (q, lambda) pairs"
        ))
    })
}

/// Suite 3: `ext_dim(z, gamma) = dim(z)` on every cone suite 1 and 2 touch.
pub fn suite_extension_dimension() -> SuiteResult {
    run("extension-dimension", || {
        let mut cones: Vec<ExtTruncation> = Vec::new();
        let t = full_pascal(6);
        let (_, ws) = standard_setup(&t)?;
        cones.push(extend(&t, &ws, &identity_seeds(&t)).map_err(lib)?);
        for q in q_params() {
            for lambda in uq_lambda_range() {
                let (t, _, ws) = build_uq(&q, std::slice::from_ref(&lambda)).map_err(lib)?;
                let seed = ExtVertex::new(lambda.to_vertex(), GroupElement::identity());
                cones.push(extend(&t, &ws, &[seed]).map_err(lib)?);
            }
        }
        let mut checked = 0usize;
        for x in &cones {
            for v in x.vertices() {
                ensure!(
                    x.ext_dim(v).map_err(lib)? == x.base().dim(&v.z).map_err(lib)?,
                    "ext_dim != dim at {v}"
                );
                checked += 1;
            }
        }
        Ok(format!(
            "ext_dim = dim on {} extended vertices across {} cones",
            checked,
            cones.len()
        ))
    })
}

fn sample_gammas(ws: &WeightSystem) -> Vec<GroupElement> {
    match ws.base() {
        Some(base) => {
            let b = GroupElement::from_ratio(base).expect("base is positive");
            [-2i64, -1, 1, 2, 3].iter().map(|&k| b.pow(k)).collect()
        }
        None => vec![GroupElement::identity(); 5],
    }
}

/// Suite 4: the multiplicity function and the extension link are
/// invariant under five sampled translations per cone.
pub fn suite_translation_invariance() -> SuiteResult {
    run("translation-invariance", || {
        let mut cones: Vec<ExtTruncation> = Vec::new();
        let t = full_pascal(5);
        let (_, ws) = standard_setup(&t)?;
        cones.push(extend(&t, &ws, &identity_seeds(&t)).map_err(lib)?);
        for (q, max_len) in [("1/2", 2usize), ("3", 3)] {
            let q = QParam::new(q.parse().unwrap()).unwrap();
            let seeds = signatures(max_len, 3);
            let (t, _, ws) = build_uq(&q, &seeds).map_err(lib)?;
            cones.push(extend(&t, &ws, &identity_seeds(&t)).map_err(lib)?);
        }
        let mut checked = 0usize;
        for x in &cones {
            for gamma in sample_gammas(x.weight_system()) {
                let y = x.translate(&gamma);
                ensure!(
                    x.edges().count() == y.edges().count(),
                    "translation changed the edge count"
                );
                for edge in x.edges() {
                    let moved = translate_edge(edge, &gamma);
                    ensure!(
                        y.has_edge(&moved.0, &moved.1),
                        "translated edge missing at {} -> {}",
                        moved.0,
                        moved.1
                    );
                    ensure!(
                        x.mu_tilde(&edge.0, &edge.1) == y.mu_tilde(&moved.0, &moved.1),
                        "mu~ not preserved at {} -> {}",
                        edge.0,
                        edge.1
                    );
                    checked += 1;
                }
            }
        }
        Ok(format!(
            "m~ and mu~ invariant under 5 translations on {} cones ({checked} edge checks)",
            cones.len()
        ))
    })
}

/// Suite 5: extended edges obey the exponent law of the q-graph, and
/// the detected weight-group base generates the same group as q.
pub fn suite_grade_law() -> SuiteResult {
    run("uq-grade-law", || {
        let mut edges_checked = 0usize;
        for q in q_params() {
            let seeds = signatures(3, 4);
            let (t, _, ws) = build_uq(&q, &seeds).map_err(lib)?;
            let canonical = q.canonical();
            ensure!(
                ws.base() == Some(&canonical),
                "base {:?} differs from canonical q {canonical}",
                ws.base()
            );
            let q_elem = GroupElement::from_ratio(q.value()).map_err(lib)?;
            let x = extend(&t, &ws, &identity_seeds(&t)).map_err(lib)?;
            for (child, parent) in x.edges() {
                let upper = Signature::from_vertex(&child.z).map_err(lib)?;
                let lower = Signature::from_vertex(&parent.z).map_err(lib)?;
                let expected = q_weight_exponent(&upper, &lower).map_err(lib)?;
                let k = child
                    .gamma
                    .grade_in(&q_elem)
                    .ok_or_else(|| format!("grade of {child} is not a power of q"))?;
                let l = parent
                    .gamma
                    .grade_in(&q_elem)
                    .ok_or_else(|| format!("grade of {parent} is not a power of q"))?;
                ensure!(
                    l - k == expected,
                    "grade law fails on {child} -> {parent}: {l} - {k} != {expected}"
                );
                edges_checked += 1;
            }
        }
        Ok(format!(
            "exponent law holds on {edges_checked} extended edges; base = q for 3 parameters"
        ))
    })
}

fn random_top(rng: &mut ChaCha8Rng, level: &[VertexId]) -> BTreeMap<VertexId, Ratio> {
    loop {
        let masses: Vec<u32> = level.iter().map(|_| rng.gen_range(0..5)).collect();
        let total: u32 = masses.iter().sum();
        if total == 0 {
            continue;
        }
        return level
            .iter()
            .zip(masses)
            .filter(|(_, m)| *m > 0)
            .map(|(v, m)| {
                (
                    v.clone(),
                    Ratio::from_int(m as i64) / Ratio::from_int(total as i64),
                )
            })
            .collect();
    }
}

fn correspondence_round_trip(
    t: &Truncation,
    k: &Link,
    ws: &WeightSystem,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> std::result::Result<usize, String> {
    let mut systems = Vec::new();
    for _ in 0..count {
        let top = random_top(rng, t.level(t.top_level()));
        let nu = pullback(t, k, &top).map_err(lib)?;
        let report = check_harmonic(t, k, &nu);
        ensure!(report.ok(), "pullback failed harmonicity: {report}");

        let ext = to_extended(t, ws, &nu, -1).map_err(lib)?;
        let cone = extension_cone_over(t, ws, &nu).map_err(lib)?;
        let report = check_extended(&cone, &ext);
        ensure!(report.ok(), "extended laws fail: {report}");

        let back = from_extended(t, ws, &ext).map_err(lib)?;
        ensure!(back == nu, "round trip is not the identity");
        systems.push((nu, ext));
    }

    // affinity at lambda = 1/3 between consecutive samples
    let lambda: Ratio = "1/3".parse().unwrap();
    for pair in systems.windows(2) {
        let (nu1, ext1) = &pair[0];
        let (nu2, ext2) = &pair[1];
        let mixed = CoherentSystem::affine_combination(&lambda, nu1, nu2).map_err(lib)?;
        let lhs = to_extended(t, ws, &mixed, -1).map_err(lib)?;
        let rhs = ExtendedHarmonic::affine_combination(&lambda, ext1, ext2).map_err(lib)?;
        for n in 0..=lhs.depth() {
            let mut keys: std::collections::BTreeSet<ExtVertex> =
                lhs.level_support(n).keys().cloned().collect();
            keys.extend(rhs.level_support(n).keys().cloned());
            for v in keys {
                ensure!(
                    lhs.value_at(&v) == rhs.value_at(&v),
                    "affinity fails at {v}"
                );
            }
        }
    }
    Ok(systems.len())
}

/// Suite 6: the affine correspondence between coherent systems and
/// power-scaling harmonic functions, on random pullback systems.
pub fn suite_harmonic_correspondence() -> SuiteResult {
    run("harmonic-correspondence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1415);
        let t = full_pascal(5);
        let (k, ws) = standard_setup(&t)?;
        let pascal_count = correspondence_round_trip(&t, &k, &ws, &mut rng, 10)?;

        let q = QParam::new("1/2".parse().unwrap()).unwrap();
        let seeds = signatures(5, 2);
        let (t, k, ws) = build_uq(&q, &seeds).map_err(lib)?;
        let uq_count = correspondence_round_trip(&t, &k, &ws, &mut rng, 10)?;

        Ok(format!(
            "transform laws, round trips, and 1/3-affinity hold on {pascal_count} Pascal and {uq_count} q-graph systems"
        ))
    })
}

/// Suite 7: the binomial family with p = 1/3 is coherent for the
/// standard Pascal link through depth 8.
pub fn suite_binomial_coherence() -> SuiteResult {
    run("binomial-coherence", || {
        let t = full_pascal(8);
        let k = standard_link(&t);
        let p: Ratio = "1/3".parse().unwrap();
        let complement = Ratio::one() - p.clone();
        let mut levels = Vec::new();
        for n in 0..=8usize {
            let mut level = BTreeMap::new();
            for v in t.level(n) {
                let crate::graph::VertexKey::Tuple(parts) = &v.key else {
                    unreachable!()
                };
                let kk = parts[1];
                let value = &(&Ratio::from_biguint(t.dim(v).map_err(lib)?) * &p.pow(kk))
                    * &complement.pow(n as i64 - kk);
                level.insert(v.clone(), value);
            }
            levels.push(level);
        }
        let nu = CoherentSystem::new(levels).map_err(lib)?;
        let report = check_harmonic(&t, &k, &nu);
        ensure!(report.ok(), "binomial system rejected: {report}");
        Ok("binomial(1/3) coherent through depth 8".to_string())
    })
}

/// Suite 8: dimension-group laws on q-graph windows through level 3.
pub fn suite_k0() -> SuiteResult {
    run("k0-suite", || {
        let mut rng = ChaCha8Rng::seed_from_u64(9265);
        let q = QParam::new("1/2".parse().unwrap()).unwrap();
        let seeds = signatures(3, 4);
        let (t, k, ws) = build_uq(&q, &seeds).map_err(lib)?;

        let top: BTreeMap<VertexId, Ratio> = {
            let level = t.level(3);
            let n = level.len() as i64;
            level
                .iter()
                .map(|v| (v.clone(), Ratio::one() / Ratio::from_int(n)))
                .collect()
        };
        let nu = pullback(&t, &k, &top).map_err(lib)?;
        let psi = K0Functional::from_state(&t, &ws, &nu, -1).map_err(lib)?;
        let ext = psi.harmonic().clone();

        // generators: the first extended vertices of each stored level
        let mut generators: Vec<ExtVertex> = Vec::new();
        for n in 0..=2usize {
            generators.extend(ext.level_support(n).keys().cloned());
        }
        ensure!(generators.len() >= 20, "window too small for 20 generators");
        generators.truncate(20);

        // psi(delta_(root,1)) = 1
        let root_delta = K0Element::delta(
            ExtVertex::new(t.root().clone(), GroupElement::identity()),
            &t,
        )
        .map_err(lib)?;
        ensure!(
            psi.eval(&root_delta).map_err(lib)? == Ratio::one(),
            "psi at the root generator is not 1"
        );

        // beta-power scaling on 20 generators
        let q_elem = GroupElement::from_ratio(q.value()).map_err(lib)?;
        for (i, v) in generators.iter().enumerate() {
            let f = K0Element::delta(v.clone(), &t).map_err(lib)?;
            let gamma = q_elem.pow((i as i64 % 5) - 2);
            let lhs = psi.eval(&f.gamma_action(&gamma)).map_err(lib)?;
            let rhs = gamma.value_pow(-1) * psi.eval(&f).map_err(lib)?;
            ensure!(lhs == rhs, "psi scaling fails at generator {v}");
        }

        // embedding laws on random cone elements supported in supp(nu~)
        let mut checked_points = 0usize;
        for trial in 0..10 {
            let level = 1 + (trial % 2);
            let support: Vec<ExtVertex> = ext.level_support(level).keys().cloned().collect();
            let mut values = BTreeMap::new();
            for v in &support {
                let numer = rng.gen_range(0..4i64);
                if numer > 0 {
                    let dim = Ratio::from_biguint(t.dim(&v.z).map_err(lib)?);
                    values.insert(v.clone(), Ratio::from_int(numer) / dim);
                }
            }
            let f = K0Element::new(level, values, &t).map_err(lib)?;
            ensure!(f.in_positive_cone(), "random element left the cone");

            let image = embed_mu(&f, &t, &ws);
            let h = f.scale_by_dim(&t).map_err(lib)?;
            let m_image = embed_m_integer(&h, &t, &ws).map_err(lib)?;
            let window = image.support_window().map_err(lib)?;
            let materialized = image.materialize(&window).map_err(lib)?;
            ensure!(
                materialized.in_positive_cone(),
                "embedding left the positive cone"
            );
            let gamma = q_elem.pow(2);
            let moved_image = embed_mu(&f, &t, &ws);
            let f_moved = f.gamma_action(&gamma);
            let image_of_moved = embed_mu(&f_moved, &t, &ws);
            for v in &window {
                let scaled = Ratio::from_biguint(t.dim(&v.z).map_err(lib)?)
                    * image.eval(v).map_err(lib)?;
                let integral = Ratio::from_bigint(m_image.eval(v).map_err(lib)?);
                ensure!(scaled == integral, "dim-scaling identity fails at {v}");

                let lhs = moved_image.eval(v).map_err(lib)?;
                let rhs = image_of_moved.eval(&v.translate(&gamma)).map_err(lib)?;
                ensure!(lhs == rhs, "embedding does not commute with the action at {v}");
                checked_points += 1;
            }

            // psi is invariant under embedding: the image has finitely
            // many nonzero entries, weighted through the scaling law
            let psi_f = psi.eval(&f).map_err(lib)?;
            let mut pushed = Ratio::zero();
            for v in &window {
                let weight = ext.value_at(v);
                if !weight.is_zero() {
                    pushed = pushed + (weight * image.eval(v).map_err(lib)?);
                }
            }
            ensure!(
                psi_f == pushed,
                "psi(f) != psi(embedded f) on trial {trial}"
            );
        }

        Ok(format!(
            "embedding, cone, action, and functional laws hold ({checked_points} window points, 10 random elements, 20 generators)"
        ))
    })
}

/// Runs every suite in order.
pub fn run_all() -> Vec<SuiteResult> {
    vec![
        suite_standard_collapse(),
        suite_triple_agreement(),
        suite_extension_dimension(),
        suite_translation_invariance(),
        suite_grade_law(),
        suite_harmonic_correspondence(),
        suite_binomial_coherence(),
        suite_k0(),
    ]
}

/// Stable JSON summary (no timings, no environment data).
pub fn summary_json(results: &[SuiteResult]) -> Value {
    let suites: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
            })
        })
        .collect();
    json!({
        "ok": results.iter().all(|r| r.passed),
        "suites": suites,
    })
}
