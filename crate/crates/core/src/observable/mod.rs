//! The parafermionic observable F(z) = Σ τʲ H_j(z) for three boundary marks,
//! its exact and Monte Carlo evaluation, and the identities it satisfies.

mod checks;
mod exact;
pub(crate) use checks::{boundary_report, CrossingCounts};
pub(crate) use exact::exact_field;

/// Largest domain for exact fields: H-values have denominator 2^{#F} and
/// products of two of them must stay inside i64.
pub const EXACT_FACE_LIMIT: usize = 30;
mod mc;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eisenstein::{format_rational, parse_rational, ratio_to_f64, Eisenstein, Rational};
use crate::error::{Error, Result};
use crate::hexlattice::{DomainFile, MarkedDomain, MidEdgeId};
use crate::registry::{Named, Registry};
use crate::stats::wilson_interval;

pub use checks::{
    boundary_values_check, discrete_contour_integral, elementary_contour, holomorphicity_residual,
    holomorphicity_residual_approx, holomorphicity_sweep, simple_face_cycles, BoundaryReport,
    BoundaryValueRow, HolomorphicityReport,
};
pub use exact::{observable_exact, observable_exact_at, ObservableEngine};
pub use mc::{observable_mc, observable_mc_naive, BoundarySweep};

/// H₁, H₂, H₃ at one mid-edge: exact rationals or sample counts.
#[derive(Clone, Debug, PartialEq)]
pub enum HValue {
    Exact([Rational; 3]),
    Sampled { counts: [u64; 3], trials: u64 },
}

impl HValue {
    pub fn exact(&self) -> Option<&[Rational; 3]> {
        match self {
            HValue::Exact(h) => Some(h),
            HValue::Sampled { .. } => None,
        }
    }

    pub fn h(&self) -> [f64; 3] {
        match self {
            HValue::Exact(h) => h.each_ref().map(ratio_to_f64),
            HValue::Sampled { counts, trials } => counts.map(|c| c as f64 / *trials as f64),
        }
    }

    /// 95% Wilson intervals; degenerate for exact values.
    pub fn ci(&self) -> [(f64, f64); 3] {
        match self {
            HValue::Exact(_) => self.h().map(|x| (x, x)),
            HValue::Sampled { counts, trials } => counts.map(|c| wilson_interval(c, *trials)),
        }
    }

    pub fn sigma(&self) -> [f64; 3] {
        match self {
            HValue::Exact(_) => [0.0; 3],
            HValue::Sampled { counts, trials } => {
                counts.map(|c| crate::stats::wilson_sigma(c, *trials))
            }
        }
    }

    /// F = τH₁ + τ²H₂ + τ³H₃, exact.
    pub fn f_exact(&self) -> Option<Eisenstein> {
        self.exact().map(|h| {
            (0..3).fold(Eisenstein::zero(), |acc, j| {
                acc + Eisenstein::tau_pow(j as i64 + 1).scale(h[j])
            })
        })
    }

    /// F as a complex number.
    pub fn f_complex(&self) -> (f64, f64) {
        let h = self.h();
        (0..3).fold((0.0, 0.0), |(re, im), j| {
            let (tr, ti) = Eisenstein::tau_pow(j as i64 + 1).to_complex();
            (re + h[j] * tr, im + h[j] * ti)
        })
    }
}

/// H-values for a set of mid-edges of a domain with marks u₁, u₂, u₃.
#[derive(Clone, Debug)]
pub struct ObservableField {
    md: MarkedDomain,
    backend: String,
    values: Vec<Option<HValue>>,
}

impl ObservableField {
    pub fn new(md: MarkedDomain, backend: &str) -> Result<Self> {
        md.expect_marks(3)?;
        let n = md.domain().num_mid_edges();
        Ok(Self {
            md,
            backend: backend.to_string(),
            values: vec![None; n],
        })
    }

    pub fn marked_domain(&self) -> &MarkedDomain {
        &self.md
    }

    pub fn backend(&self) -> &str {
        &self.backend
    }

    pub fn insert(&mut self, z: MidEdgeId, value: HValue) -> Result<()> {
        check_z(&self.md, z)?;
        self.values[z] = Some(value);
        Ok(())
    }

    pub fn get(&self, z: MidEdgeId) -> Result<&HValue> {
        check_z(&self.md, z)?;
        self.values[z]
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter(format!("mid-edge {z} was not evaluated")))
    }

    pub fn f_exact(&self, z: MidEdgeId) -> Result<Eisenstein> {
        self.get(z)?
            .f_exact()
            .ok_or_else(|| Error::InvalidParameter("field is not exact".into()))
    }

    pub fn is_exact(&self) -> bool {
        self.entries().all(|(_, v)| v.exact().is_some())
    }

    pub fn entries(&self) -> impl Iterator<Item = (MidEdgeId, &HValue)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(z, v)| v.as_ref().map(|v| (z, v)))
    }

    pub fn to_file(&self) -> FieldFile {
        FieldFile {
            domain: DomainFile::from_marked(&self.md),
            backend: self.backend.clone(),
            entries: self
                .entries()
                .map(|(z, v)| match v {
                    HValue::Exact(h) => FieldEntry {
                        z,
                        h: h.iter().map(format_rational).collect(),
                        counts: None,
                        trials: None,
                    },
                    HValue::Sampled { counts, trials } => FieldEntry {
                        z,
                        h: v.h().iter().map(|x| x.to_string()).collect(),
                        counts: Some(*counts),
                        trials: Some(*trials),
                    },
                })
                .collect(),
        }
    }

    pub fn from_file(file: &FieldFile) -> Result<Self> {
        let md = file.domain.build_marked()?;
        let mut field = Self::new(md, &file.backend)?;
        for e in &file.entries {
            let value = match (e.counts, e.trials) {
                (Some(counts), Some(trials)) => HValue::Sampled { counts, trials },
                _ => {
                    if e.h.len() != 3 {
                        return Err(Error::Parse(format!("entry {} needs three H values", e.z)));
                    }
                    let parse = |s: &String| {
                        parse_rational(s).ok_or_else(|| Error::Parse(format!("bad fraction `{s}`")))
                    };
                    HValue::Exact([parse(&e.h[0])?, parse(&e.h[1])?, parse(&e.h[2])?])
                }
            };
            field.insert(e.z, value)?;
        }
        Ok(field)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_file())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file: FieldFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_file(&file)
    }
}

/// On-disk form of a field. Exact H values are fraction strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldFile {
    pub domain: DomainFile,
    pub backend: String,
    pub entries: Vec<FieldEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldEntry {
    pub z: MidEdgeId,
    pub h: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<[u64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

fn check_z(md: &MarkedDomain, z: MidEdgeId) -> Result<()> {
    if z >= md.domain().num_mid_edges() {
        return Err(Error::InvalidParameter(format!(
            "mid-edge {z} does not exist"
        )));
    }
    if md.marks().contains(&z) {
        return Err(Error::NotDefined(z));
    }
    Ok(())
}

/// Every mid-edge except the marks.
pub fn field_mid_edges(md: &MarkedDomain) -> Vec<MidEdgeId> {
    (0..md.domain().num_mid_edges())
        .filter(|z| !md.marks().contains(z))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct BackendParams {
    pub trials: u64,
    pub seed: u64,
    pub cap: usize,
}

impl Default for BackendParams {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            cap: crate::loops::DEFAULT_ENUMERATION_CAP,
        }
    }
}

pub trait ObservableBackend: Named + Send + Sync {
    fn evaluate(
        &self,
        md: &MarkedDomain,
        zs: &[MidEdgeId],
        params: &BackendParams,
    ) -> Result<ObservableField>;
}

/// Exhaustive enumeration of W_Ω(u₁, u₂, u₃, z).
pub struct ExactBackend;

/// Boundary z from one cluster labelling per sample; interior z traced.
pub struct McBackend;

/// One independent traced sample set per z.
pub struct McNaiveBackend;

impl Named for ExactBackend {
    fn name(&self) -> &'static str {
        "exact"
    }
}

impl Named for McBackend {
    fn name(&self) -> &'static str {
        "mc"
    }
}

impl Named for McNaiveBackend {
    fn name(&self) -> &'static str {
        "mc-naive"
    }
}

impl ObservableBackend for ExactBackend {
    fn evaluate(
        &self,
        md: &MarkedDomain,
        zs: &[MidEdgeId],
        params: &BackendParams,
    ) -> Result<ObservableField> {
        observable_exact_at(md, zs, params.cap)
    }
}

impl ObservableBackend for McBackend {
    fn evaluate(
        &self,
        md: &MarkedDomain,
        zs: &[MidEdgeId],
        params: &BackendParams,
    ) -> Result<ObservableField> {
        observable_mc(md, zs, params.trials, params.seed)
    }
}

impl ObservableBackend for McNaiveBackend {
    fn evaluate(
        &self,
        md: &MarkedDomain,
        zs: &[MidEdgeId],
        params: &BackendParams,
    ) -> Result<ObservableField> {
        observable_mc_naive(md, zs, params.trials, params.seed)
    }
}

pub fn observable_backends() -> Registry<dyn ObservableBackend> {
    let mut r: Registry<dyn ObservableBackend> = Registry::new("observable backend");
    r.register(Box::new(ExactBackend));
    r.register(Box::new(McBackend));
    r.register(Box::new(McNaiveBackend));
    r
}
