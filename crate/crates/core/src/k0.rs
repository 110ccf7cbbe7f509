//! Finite windows of the dimension-group data of the extension.
//!
//! A level-n element is a finitely supported function on extended
//! vertices whose value at `(z,gamma)` lies in `Z/dim(z)`. One-step
//! embeddings act by the extension link matrix (or, on the
//! integer-scaled picture, by the 0/1 multiplicity matrix); both are
//! column-finite but not row-finite, so images are exposed as
//! query-evaluable maps plus explicit window materialisation. The group
//! acts by translating supports, and harmonic functions induce the
//! additive scaling functionals `psi(f) = sum nu~(z,gamma) f(z,gamma)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::extension::ExtVertex;
use crate::graph::Truncation;
use crate::group::GroupElement;
use crate::harmonic::{to_extended, CoherentSystem, ExtendedHarmonic};
use crate::link::WeightSystem;
use crate::ratio::Ratio;

/// Finitely supported level-n vector with `dim(z) * f(z,gamma)` integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Element {
    level: usize,
    values: BTreeMap<ExtVertex, Ratio>,
}

impl K0Element {
    /// Validates levels, membership in the base truncation, and the
    /// denominator constraint; zero entries are dropped.
    pub fn new(
        level: usize,
        values: BTreeMap<ExtVertex, Ratio>,
        t: &Truncation,
    ) -> Result<Self> {
        for (v, value) in &values {
            if v.level() != level {
                return Err(Error::Validation(format!(
                    "support vertex {v} is not on level {level}"
                )));
            }
            let dim = Ratio::from_biguint(t.dim(&v.z)?);
            if !(&dim * value).is_integer() {
                return Err(Error::DenominatorConstraint {
                    vertex: v.to_string(),
                    detail: format!("{value} * dim {dim} is not an integer"),
                });
            }
        }
        let values = values.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        Ok(K0Element { level, values })
    }

    pub fn zero(level: usize) -> Self {
        K0Element {
            level,
            values: BTreeMap::new(),
        }
    }

    /// The indicator of a single extended vertex.
    pub fn delta(v: ExtVertex, t: &Truncation) -> Result<Self> {
        let level = v.level();
        K0Element::new(level, BTreeMap::from([(v, Ratio::one())]), t)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn value(&self, v: &ExtVertex) -> Ratio {
        self.values.get(v).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&ExtVertex, &Ratio)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn add(&self, other: &K0Element) -> Result<K0Element> {
        if self.level != other.level {
            return Err(Error::Validation("level mismatch in addition".into()));
        }
        let mut values = self.values.clone();
        for (v, x) in &other.values {
            let entry = values.entry(v.clone()).or_insert_with(Ratio::zero);
            *entry = entry.clone() + x.clone();
        }
        values.retain(|_, x| !x.is_zero());
        Ok(K0Element {
            level: self.level,
            values,
        })
    }

    /// All values `>= 0` (the denominator constraint is an invariant).
    pub fn in_positive_cone(&self) -> bool {
        self.values.values().all(|x| !x.is_negative())
    }

    /// The integer-scaled picture `h(z,gamma) = dim(z) * f(z,gamma)`.
    pub fn scale_by_dim(&self, t: &Truncation) -> Result<K0Element> {
        let mut values = BTreeMap::new();
        for (v, x) in &self.values {
            values.insert(v.clone(), Ratio::from_biguint(t.dim(&v.z)?) * x.clone());
        }
        K0Element::new(self.level, values, t)
    }

    pub fn is_integer_valued(&self) -> bool {
        self.values.values().all(Ratio::is_integer)
    }

    /// The translation action `(gamma . f)(z, gamma') = f(z, gamma^-1 gamma')`,
    /// i.e. the support moves by `T_gamma`.
    pub fn gamma_action(&self, gamma: &GroupElement) -> K0Element {
        K0Element {
            level: self.level,
            values: self
                .values
                .iter()
                .map(|(v, x)| (v.translate(gamma), x.clone()))
                .collect(),
        }
    }
}

/// Lazily evaluable image of a level-n element under the one-step
/// embedding by the extension link matrix.
pub struct EmbedImage<'a> {
    f: &'a K0Element,
    t: &'a Truncation,
    ws: &'a WeightSystem,
}

/// `iota(f)(z,gamma) = sum over parents z' of
/// mu~((z,gamma),(z',gamma*rho(z,z'))) * f(z', gamma*rho(z,z'))`.
pub fn embed_mu<'a>(f: &'a K0Element, t: &'a Truncation, ws: &'a WeightSystem) -> EmbedImage<'a> {
    EmbedImage { f, t, ws }
}

impl EmbedImage<'_> {
    fn parent_grades(&self, v: &ExtVertex) -> Result<Vec<(ExtVertex, Ratio)>> {
        if v.level() != self.f.level() + 1 {
            return Err(Error::Validation(format!(
                "query level {} is not one above the element level {}",
                v.level(),
                self.f.level()
            )));
        }
        if !self.t.contains(&v.z) {
            return Err(Error::UnknownVertex(v.z.to_string()));
        }
        let dim_child = Ratio::from_biguint(self.t.dim(&v.z)?);
        let mut out = Vec::new();
        for (p, _) in self.t.parents(&v.z)? {
            let rho = self.ws.rho(&v.z, p).ok_or_else(|| {
                Error::Validation(format!("weight system has no weight on {} -> {p}", v.z))
            })?;
            let parent = ExtVertex::new(p.clone(), v.gamma.mul(&GroupElement::from_ratio(rho)?));
            let mu = &Ratio::from_biguint(self.t.dim(p)?) / &dim_child;
            out.push((parent, mu));
        }
        Ok(out)
    }

    /// Value of the image at one extended vertex of level n+1.
    pub fn eval(&self, v: &ExtVertex) -> Result<Ratio> {
        let mut total = Ratio::zero();
        for (parent, mu) in self.parent_grades(v)? {
            let x = self.f.value(&parent);
            if !x.is_zero() {
                total = total + (mu * x);
            }
        }
        Ok(total)
    }

    /// Every level-(n+1) extended vertex inside the truncation where the
    /// image can be nonzero: the extended children of the support.
    pub fn support_window(&self) -> Result<Vec<ExtVertex>> {
        let mut out = std::collections::BTreeSet::new();
        for (v, _) in self.f.support() {
            for child in self.t.children(&v.z) {
                let rho = self.ws.rho(child, &v.z).ok_or_else(|| {
                    Error::Validation(format!("weight system has no weight on {child} -> {}", v.z))
                })?;
                let shift = GroupElement::from_ratio(rho)?;
                out.insert(ExtVertex::new(child.clone(), v.gamma.mul(&shift.inv())));
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Materialises the image on a finite window, re-checking the
    /// denominator constraint.
    pub fn materialize(&self, window: &[ExtVertex]) -> Result<K0Element> {
        let mut values = BTreeMap::new();
        for v in window {
            values.insert(v.clone(), self.eval(v)?);
        }
        K0Element::new(self.f.level() + 1, values, self.t)
    }
}

/// Lazily evaluable image under the 0/1 multiplicity matrix of the
/// extension, acting on integer-valued (dim-scaled) elements.
pub struct MEmbedImage<'a> {
    h: &'a K0Element,
    t: &'a Truncation,
    ws: &'a WeightSystem,
}

pub fn embed_m_integer<'a>(
    h: &'a K0Element,
    t: &'a Truncation,
    ws: &'a WeightSystem,
) -> Result<MEmbedImage<'a>> {
    if !h.is_integer_valued() {
        return Err(Error::Validation(
            "multiplicity embedding needs an integer-valued element".into(),
        ));
    }
    Ok(MEmbedImage { h, t, ws })
}

impl MEmbedImage<'_> {
    /// `(m~ h)(z,gamma) = sum over extended parents of h`, an integer.
    pub fn eval(&self, v: &ExtVertex) -> Result<BigInt> {
        if v.level() != self.h.level() + 1 {
            return Err(Error::Validation(format!(
                "query level {} is not one above the element level {}",
                v.level(),
                self.h.level()
            )));
        }
        if !self.t.contains(&v.z) {
            return Err(Error::UnknownVertex(v.z.to_string()));
        }
        let mut total = Ratio::zero();
        for (p, _) in self.t.parents(&v.z)? {
            let rho = self.ws.rho(&v.z, p).ok_or_else(|| {
                Error::Validation(format!("weight system has no weight on {} -> {p}", v.z))
            })?;
            let parent = ExtVertex::new(p.clone(), v.gamma.mul(&GroupElement::from_ratio(rho)?));
            total = total + self.h.value(&parent);
        }
        debug_assert!(total.is_integer());
        Ok(total.numer().clone())
    }
}

/// Outcome of a bounded equality test in the inductive limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitComparison {
    /// The embedded images coincide at this level, hence at every later
    /// one: the elements are equal in the limit.
    Equal { at_level: usize },
    /// The images differ on every inspected level. Equality beyond the
    /// inspected depth is undecided from finite data.
    DifferentThrough { depth: usize },
}

/// Compares two same-level elements by embedding both step by step and
/// matching the materialised images on the union of their windows.
/// Agreement at any level decides equality; disagreement is only
/// reported through the inspected depth.
pub fn equal_through(
    f: &K0Element,
    g: &K0Element,
    t: &Truncation,
    ws: &WeightSystem,
    steps: usize,
) -> Result<LimitComparison> {
    if f.level() != g.level() {
        return Err(Error::Validation(
            "limit comparison needs elements of one level".into(),
        ));
    }
    let mut a = f.clone();
    let mut b = g.clone();
    for _ in 0..=steps {
        if a == b {
            return Ok(LimitComparison::Equal { at_level: a.level() });
        }
        if a.level() >= t.top_level() {
            break; // the window is exhausted
        }
        let image_a = embed_mu(&a, t, ws);
        let image_b = embed_mu(&b, t, ws);
        let mut window = image_a.support_window()?;
        window.extend(image_b.support_window()?);
        window.sort();
        window.dedup();
        a = image_a.materialize(&window)?;
        b = image_b.materialize(&window)?;
    }
    Ok(LimitComparison::DifferentThrough {
        depth: a.level() - f.level(),
    })
}

/// The additive scaling functional attached to an extended harmonic
/// function: `psi(f) = sum nu~(z,gamma) * f(z,gamma)`, evaluated through
/// the scaling law at any grade.
#[derive(Debug, Clone)]
pub struct K0Functional {
    nu: ExtendedHarmonic,
}

impl K0Functional {
    pub fn new(nu: ExtendedHarmonic) -> Self {
        K0Functional { nu }
    }

    /// Builds the functional of a coherent system:
    /// `psi(delta_(z,gamma)) = (dim(z)/kdim(z)) * nu(z) * gamma^beta`.
    pub fn from_state(
        t: &Truncation,
        ws: &WeightSystem,
        nu: &CoherentSystem,
        beta: i64,
    ) -> Result<Self> {
        Ok(K0Functional {
            nu: to_extended(t, ws, nu, beta)?,
        })
    }

    pub fn harmonic(&self) -> &ExtendedHarmonic {
        &self.nu
    }

    pub fn beta(&self) -> i64 {
        self.nu.beta()
    }

    pub fn eval(&self, f: &K0Element) -> Result<Ratio> {
        if f.level() > self.nu.depth() {
            return Err(Error::LevelBeyondDepth {
                level: f.level(),
                depth: self.nu.depth(),
            });
        }
        let mut total = Ratio::zero();
        for (v, x) in f.support() {
            let weight = self.nu.value_at(v);
            if !weight.is_zero() {
                total = total + (weight * x.clone());
            }
        }
        Ok(total)
    }
}
