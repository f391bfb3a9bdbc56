//! Symmetric generator multisets and their serialization.
//!
//! A [`GeneratorSet`] is an *ordered list* of group elements together with an
//! involution on indices pairing each generator with its inverse. Keeping the
//! pairing explicit (rather than recovering it from the elements) is what
//! makes Cayley/Schreier constructions well-defined multigraphs even when
//! generators repeat or are involutions.

use super::{MatrixSl2, PglMatrix, PrimeModulus};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The operations Cayley-style constructions need from a group element.
///
/// `compose`/`inverse` must not fail: implementations may assume both
/// operands share the modulus (generator sets enforce this at build time).
pub trait GroupElement: Clone + Eq + std::hash::Hash + std::fmt::Debug {
    fn compose(&self, rhs: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn identity_like(&self) -> Self;
    /// Entries of the stored representative, for serialization.
    fn entries(&self) -> [u64; 4];
    fn modulus_value(&self) -> u64;
    /// Rebuilds an element from serialized entries, validating.
    fn from_entries(m: PrimeModulus, e: [u64; 4]) -> Result<Self>;
}

impl GroupElement for MatrixSl2 {
    fn compose(&self, rhs: &Self) -> Self {
        self.mul(rhs).expect("moduli agree")
    }
    fn inverse(&self) -> Self {
        self.inv()
    }
    fn identity_like(&self) -> Self {
        MatrixSl2::identity(self.modulus())
    }
    fn entries(&self) -> [u64; 4] {
        MatrixSl2::entries(self)
    }
    fn modulus_value(&self) -> u64 {
        self.modulus().get()
    }
    fn from_entries(m: PrimeModulus, e: [u64; 4]) -> Result<Self> {
        MatrixSl2::new(m, e[0], e[1], e[2], e[3])
    }
}

impl GroupElement for PglMatrix {
    fn compose(&self, rhs: &Self) -> Self {
        self.mul(rhs).expect("moduli agree")
    }
    fn inverse(&self) -> Self {
        self.inv()
    }
    fn identity_like(&self) -> Self {
        PglMatrix::new(self.modulus(), 1, 0, 0, 1).expect("identity")
    }
    fn entries(&self) -> [u64; 4] {
        PglMatrix::entries(self)
    }
    fn modulus_value(&self) -> u64 {
        self.modulus().get()
    }
    fn from_entries(m: PrimeModulus, e: [u64; 4]) -> Result<Self> {
        PglMatrix::new(m, e[0], e[1], e[2], e[3])
    }
}

/// An ordered, inverse-closed generator multiset over `F_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet<M: GroupElement> {
    t: u64,
    label: String,
    elements: Vec<M>,
    inverse_pairing: Vec<usize>,
}

impl<M: GroupElement> GeneratorSet<M> {
    /// Validates that the pairing is an involution on indices matching
    /// elements to their inverses, and that all moduli equal `t`.
    pub fn new(
        t: u64,
        label: impl Into<String>,
        elements: Vec<M>,
        inverse_pairing: Vec<usize>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::BadGeneratorSet("empty generator list".into()));
        }
        if inverse_pairing.len() != elements.len() {
            return Err(Error::BadGeneratorSet(format!(
                "pairing length {} != element count {}",
                inverse_pairing.len(),
                elements.len()
            )));
        }
        for (i, &j) in inverse_pairing.iter().enumerate() {
            if j >= elements.len() || inverse_pairing[j] != i {
                return Err(Error::BadGeneratorSet(format!(
                    "pairing is not an involution at index {i}"
                )));
            }
            if elements[j] != elements[i].inverse() {
                return Err(Error::BadGeneratorSet(format!(
                    "element {j} is not the inverse of element {i}"
                )));
            }
        }
        for g in &elements {
            if g.modulus_value() != t {
                return Err(Error::ModulusMismatch(t, g.modulus_value()));
            }
        }
        Ok(GeneratorSet { t, label: label.into(), elements, inverse_pairing })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of generators = degree of the resulting graphs.
    pub fn degree(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[M] {
        &self.elements
    }

    pub fn inverse_pairing(&self) -> &[usize] {
        &self.inverse_pairing
    }

    pub fn element(&self, i: usize) -> &M {
        &self.elements[i]
    }

    /// Index of the inverse of generator i.
    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse_pairing[i]
    }

    /// Generator index i is an involution slot if it is paired with itself.
    pub fn is_involution_slot(&self, i: usize) -> bool {
        self.inverse_pairing[i] == i
    }

    pub fn to_json(&self) -> GeneratorSetFile {
        GeneratorSetFile {
            t: self.t,
            label: self.label.clone(),
            elements: self.elements.iter().map(|g| g.entries()).collect(),
            inverse_pairing: self.inverse_pairing.clone(),
        }
    }

    pub fn from_json(file: &GeneratorSetFile) -> Result<Self> {
        let m = PrimeModulus::new(file.t)?;
        let elements: Result<Vec<M>> =
            file.elements.iter().map(|&e| M::from_entries(m, e)).collect();
        GeneratorSet::new(file.t, file.label.clone(), elements?, file.inverse_pairing.clone())
    }
}

/// On-disk JSON shape of a generator set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSetFile {
    pub t: u64,
    pub label: String,
    pub elements: Vec<[u64; 4]>,
    pub inverse_pairing: Vec<usize>,
}

/// `l` uniform elements of `SL2(F_t)` together with their inverses;
/// element i is paired with element i + l.
///
/// Sampling is exact (no rejection): the first column is drawn uniformly
/// from the t^2 - 1 nonzero vectors by indexing, and the second column
/// uniformly from the t completions of determinant 1, parametrized as
/// (b0 + s a, d0 + s c) for a particular solution (b0, d0).
pub fn random_generator_set(t: u64, l: usize, seed: u64) -> Result<GeneratorSet<MatrixSl2>> {
    let m = PrimeModulus::new(t)?;
    if l == 0 {
        return Err(Error::BadGeneratorSet("need at least one generator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens = Vec::with_capacity(2 * l);
    for _ in 0..l {
        let u = rng.random_range(1..t * t); // nonzero (a, c) by index
        let (a, c) = (u / t, u % t);
        let (b0, d0) = if a != 0 {
            (0, m.inv(a).expect("a nonzero"))
        } else {
            (m.neg(m.inv(c).expect("c nonzero when a = 0")), 0)
        };
        let s = rng.random_range(0..t);
        let g = MatrixSl2::new(m, a, m.add(b0, m.mul(s, a)), c, m.add(d0, m.mul(s, c)))
            .expect("construction has determinant 1");
        gens.push(g);
    }
    let inverses: Vec<MatrixSl2> = gens.iter().map(|g| g.inv()).collect();
    gens.extend(inverses);
    let pairing: Vec<usize> = (0..2 * l).map(|i| (i + l) % (2 * l)).collect();
    GeneratorSet::new(t, format!("random(t={t},l={l},seed={seed})"), gens, pairing)
}

/// Named 4-element sets {U^m, U^-m, L^m, L^-m} of upper/lower shears
/// (1, +-m; 0, 1), (1, 0; +-m, 1) reduced mod t.
///
/// `pm1`, `pm2`, `pm3` use m = 1, 2, 3. The pairing swaps each shear with
/// its opposite sign: [1, 0, 3, 2].
pub fn preset_generators(name: &str, t: u64) -> Result<GeneratorSet<MatrixSl2>> {
    let m = PrimeModulus::new(t)?;
    let step: i64 = match name {
        "pm1" => 1,
        "pm2" => 2,
        "pm3" => 3,
        _ => return Err(Error::UnknownPreset(name.into())),
    };
    let gens = vec![
        MatrixSl2::from_i64(m, 1, step, 0, 1).expect("shear"),
        MatrixSl2::from_i64(m, 1, -step, 0, 1).expect("shear"),
        MatrixSl2::from_i64(m, 1, 0, step, 1).expect("shear"),
        MatrixSl2::from_i64(m, 1, 0, -step, 1).expect("shear"),
    ];
    GeneratorSet::new(t, format!("{name}(t={t})"), gens, vec![1, 0, 3, 2])
}
