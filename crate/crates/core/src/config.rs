//! Declarative experiment configuration.
//!
//! A JSON config pins everything a run needs — the graph family and its
//! parameters, the seed, the requested analyses, budgets and tolerances —
//! and [`ExperimentConfig::config_hash`] digests the canonical form so
//! every report can embed the exact configuration that produced it.

use crate::error::{Error, Result};
use crate::graph::{cayley_graph, preset_graph, random_regular, schreier_graph, RegularMultigraph};
use crate::groups::{
    lps_generator_set, preset_generators, random_generator_set, sl2_elements, GeneratorSet,
    MatrixSl2, PrimeModulus,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Graph families a config can construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Cayley graph of SL2(F_t) on l random generator pairs (seeded) or a
    /// named preset generator set.
    CayleySl2,
    /// Schreier graph of the same generators acting on P^1(F_t).
    SchreierP1,
    /// Configuration-model random (q+1)-regular multigraph.
    RandomRegular,
    /// A named small graph (`complete_k4`, `petersen`, `cycle_<n>`, ...).
    Preset,
    /// Schreier graph on P^1(F_t) of the quaternion generator set with
    /// parameter q (the explicit Ramanujan family).
    Lps,
}

/// Analyses a run may request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Spectrum,
    Density,
    Paths,
    Zeta,
    Walk,
    Geometry,
    Bs,
    Equivalence,
    Quotient,
}

impl Analysis {
    pub const ALL: [Analysis; 9] = [
        Analysis::Spectrum,
        Analysis::Density,
        Analysis::Paths,
        Analysis::Zeta,
        Analysis::Walk,
        Analysis::Geometry,
        Analysis::Bs,
        Analysis::Equivalence,
        Analysis::Quotient,
    ];

    /// Whether the analysis requires a dense eigensolve of the vertex
    /// operator (and is therefore gated by `dense_limit`).
    pub fn needs_eigensolve(self) -> bool {
        matches!(
            self,
            Analysis::Spectrum
                | Analysis::Density
                | Analysis::Zeta
                | Analysis::Bs
                | Analysis::Equivalence
        )
    }

    /// Stable lowercase name (file stem of the analysis report).
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Spectrum => "spectrum",
            Analysis::Density => "density",
            Analysis::Paths => "paths",
            Analysis::Zeta => "zeta",
            Analysis::Walk => "walk",
            Analysis::Geometry => "geometry",
            Analysis::Bs => "bs",
            Analysis::Equivalence => "equivalence",
            Analysis::Quotient => "quotient",
        }
    }
}

/// Family-specific parameters; unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Odd prime field size for SL2/P^1 families.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    /// Number of random generator pairs (degree = 2l).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Named generator preset (e.g. `pm1`, `pm2`) instead of random ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// The q of the quaternion (lps) family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Preset graph name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Vertex count for random_regular.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Degree (q+1) for random_regular.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

/// Enumeration and dense-solve gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Hard cap on (q+1) q^(k-1) per enumeration source.
    pub path_budget: u64,
    /// Largest operator dimension eigensolves may materialize.
    pub dense_limit: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { path_budget: 10_000_000, dense_limit: 6000 }
    }
}

/// Numeric knobs shared by the analyses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative tolerance for spectral-vs-combinatorial identities.
    pub relative: f64,
    /// The eps of almost-diameter thresholds and witness scalings.
    pub eps: f64,
    /// Density-window parameter A.
    pub a: f64,
    /// Eps grid for witness-constant reports.
    pub eps_grid: Vec<f64>,
    /// Walk profile horizon; `None` lets each analysis pick its own.
    pub k_max: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relative: 1e-6,
            eps: 0.25,
            a: 1.0,
            eps_grid: vec![0.0, 0.25, 0.5],
            k_max: None,
        }
    }
}

/// The whole declarative run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical serialization: struct field order is fixed, `None` params
    /// are skipped, so equal configs serialize identically.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical form; embedded in every report.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn require<T: Copy>(&self, field: Option<T>, what: &str) -> Result<T> {
        field.ok_or_else(|| {
            Error::Config(format!("family {:?} requires params.{what}", self.family))
        })
    }

    /// Whether the construction consumes randomness (and therefore must
    /// carry a seed to be reproducible).
    pub fn is_randomized(&self) -> bool {
        match self.family {
            Family::RandomRegular => true,
            Family::CayleySl2 | Family::SchreierP1 => self.params.label.is_none(),
            Family::Preset | Family::Lps => false,
        }
    }

    /// Upper bound on the vertex count, for gate checks before building.
    pub fn estimated_n(&self) -> Result<usize> {
        Ok(match self.family {
            Family::Preset => {
                let name =
                    self.params.name.as_deref().ok_or_else(|| {
                        Error::Config("family preset requires params.name".into())
                    })?;
                preset_graph(name)?.n()
            }
            Family::RandomRegular => self.require(self.params.n, "n")?,
            Family::SchreierP1 | Family::Lps => self.require(self.params.t, "t")? as usize + 1,
            Family::CayleySl2 => {
                let t = self.require(self.params.t, "t")? as usize;
                t * (t * t - 1)
            }
        })
    }

    /// Structural validation: family parameters complete, seed present for
    /// randomized families, eigensolve analyses within the dense gate.
    pub fn validate(&self) -> Result<()> {
        if self.is_randomized() && self.seed.is_none() {
            return Err(Error::Config(format!(
                "family {:?} is randomized: a seed is mandatory",
                self.family
            )));
        }
        match self.family {
            Family::Preset => {
                if self.params.name.is_none() {
                    return Err(Error::Config("family preset requires params.name".into()));
                }
            }
            Family::RandomRegular => {
                self.require(self.params.n, "n")?;
                self.require(self.params.degree, "degree")?;
            }
            Family::CayleySl2 | Family::SchreierP1 => {
                self.require(self.params.t, "t")?;
                if self.params.label.is_none() && self.params.l.is_none() {
                    return Err(Error::Config(
                        "sl2 families need either params.label or params.l".into(),
                    ));
                }
            }
            Family::Lps => {
                self.require(self.params.t, "t")?;
                self.require(self.params.q, "q")?;
            }
        }
        if self.analyses.contains(&Analysis::Quotient)
            && !matches!(self.family, Family::CayleySl2 | Family::SchreierP1)
        {
            return Err(Error::Config(
                "quotient analysis requires an sl2 Cayley/Schreier family".into(),
            ));
        }
        let n = self.estimated_n()?;
        for a in &self.analyses {
            if a.needs_eigensolve() && n > self.budgets.dense_limit {
                return Err(Error::DenseLimit { n, limit: self.budgets.dense_limit });
            }
        }
        Ok(())
    }

    /// The SL2 generator set the config describes, when the family has one.
    pub fn build_generators(&self) -> Result<Option<GeneratorSet<MatrixSl2>>> {
        match self.family {
            Family::CayleySl2 | Family::SchreierP1 => {
                let t = self.require(self.params.t, "t")?;
                let gens = match &self.params.label {
                    Some(label) => preset_generators(label, t)?,
                    None => {
                        let l = self.require(self.params.l, "l")?;
                        let seed = self.require(self.seed, "seed")?;
                        random_generator_set(t, l, seed)?
                    }
                };
                Ok(Some(gens))
            }
            _ => Ok(None),
        }
    }

    /// Builds the configured graph, embedding the seed in its metadata.
    pub fn build_graph(&self) -> Result<RegularMultigraph> {
        self.validate()?;
        let mut g = match self.family {
            Family::Preset => preset_graph(self.params.name.as_deref().expect("validated"))?,
            Family::RandomRegular => random_regular(
                self.params.n.expect("validated"),
                self.params.degree.expect("validated"),
                self.seed.expect("validated"),
            )?,
            Family::SchreierP1 => {
                schreier_graph(&self.build_generators()?.expect("sl2 family"))?
            }
            Family::CayleySl2 => {
                let gens = self.build_generators()?.expect("sl2 family");
                let m = PrimeModulus::new(gens.t())?;
                cayley_graph(&sl2_elements(m), &gens, "cayley_sl2")?
            }
            Family::Lps => {
                let q = self.params.q.expect("validated");
                let t = self.params.t.expect("validated");
                schreier_graph(&lps_generator_set(q, t)?)?
            }
        };
        if g.meta().seed.is_none() {
            g.meta_mut().seed = self.seed;
        }
        Ok(g)
    }
}
