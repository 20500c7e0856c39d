//! The `nilpr/1` analysis report.

use std::sync::Arc;

use anyhow::Result;
use nilpr::frame::{
    full_spark, orbit_frame, p0_exact, pr_decide, verify_witness, Certificate, OrbitFrame, PRStatus, PRVerdict,
    SparkResult,
};
use nilpr::group::sylow_decomposition;
use nilpr::kirillov::{criterion_check, ChainLayer, ChainRecord, CriterionVerdict};
use nilpr::numerics::SearchBudget;
use nilpr::rep::{ambiguity_nonvanishing, vector_to_pairs};
use nilpr::{CVec, TolerancePolicy};
use num_rational::Ratio;
use serde::Serialize;

use crate::resolve::{ResolvedGroup, ResolvedRep};

pub const SCHEMA: &str = "nilpr/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub numerator: i64,
    pub denominator: i64,
}

impl From<Ratio<i64>> for Rational {
    fn from(r: Ratio<i64>) -> Self {
        Rational { numerator: *r.numer(), denominator: *r.denom() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSection {
    pub spec: String,
    pub hash: String,
    pub order: usize,
    pub exponent: usize,
    pub abelian: bool,
    pub nilpotency_class: Option<usize>,
    pub center_order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SylowFactor {
    pub prime: u64,
    pub order: usize,
}

impl GroupSection {
    pub fn new(g: &ResolvedGroup) -> Self {
        let t = &g.table;
        GroupSection {
            spec: g.descriptor.clone(),
            hash: format!("{:016x}", t.table_hash()),
            order: t.order(),
            exponent: t.exponent(),
            abelian: t.is_abelian(),
            nilpotency_class: t.nilpotency_class(),
            center_order: t.center().order(),
        }
    }
}

pub fn sylow_summary(g: &ResolvedGroup) -> Result<Vec<SylowFactor>> {
    if g.table.order() == 1 {
        return Ok(Vec::new());
    }
    let syl = sylow_decomposition(&g.table)?;
    Ok(syl.primes.iter().zip(&syl.factors).map(|(&prime, f)| SylowFactor { prime, order: f.order() }).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub tolerances: TolerancePolicy,
    pub seed: u64,
    pub window: String,
    pub search: SearchBudget,
    pub budget_spark: u64,
    pub budget_p0: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionSection {
    pub sum: Rational,
    pub all_split: bool,
    pub verdict: CriterionVerdict,
    pub small_exponent_shortcut: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub p: u64,
    pub k: usize,
    pub exponents: Vec<u32>,
    pub split: Vec<bool>,
    pub layers: Vec<ChainLayer>,
    pub base_order: usize,
    pub modulus: u64,
    pub base_character: Vec<u64>,
    pub reductions: Vec<usize>,
    /// `log_p` of the order of the group the chain was built on.
    pub log_order: u32,
    pub length_bound_respected: bool,
    pub criterion: CriterionSection,
}

impl ChainSummary {
    pub fn new(c: &ChainRecord) -> Self {
        let crit = criterion_check(c);
        let mut log_order = 0;
        let mut m = c.rep.group().order() as u64;
        while m > 1 && m % c.p == 0 {
            m /= c.p;
            log_order += 1;
        }
        ChainSummary {
            p: c.p,
            k: c.k,
            exponents: c.exponents(),
            split: c.layers.iter().map(|l| l.split).collect(),
            layers: c.layers.clone(),
            base_order: c.base_order,
            modulus: c.modulus,
            base_character: c.base_character.clone(),
            reductions: c.reductions.clone(),
            log_order,
            length_bound_respected: c.k == 0 || 1 + c.k as u32 <= log_order,
            criterion: CriterionSection {
                sum: crit.sum.into(),
                all_split: crit.all_split,
                verdict: crit.verdict,
                small_exponent_shortcut: crit.small_exponent_shortcut,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSection {
    pub f: Vec<[f64; 2]>,
    pub g: Vec<[f64; 2]>,
    pub magnitude_deviation: f64,
    pub phase_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrSection {
    pub status: PRStatus,
    pub certificate: Option<Certificate>,
    pub kernel_dim: usize,
    pub restarts_used: usize,
    pub witness: Option<WitnessSection>,
}

impl PrSection {
    pub fn new(frame: &OrbitFrame, v: &PRVerdict) -> Self {
        let witness = v.witness.as_ref().map(|(f, g)| {
            let check = verify_witness(frame, f, g);
            WitnessSection {
                f: vector_to_pairs(f),
                g: vector_to_pairs(g),
                magnitude_deviation: check.magnitude_deviation,
                phase_distance: check.phase_distance,
            }
        });
        PrSection {
            status: v.status,
            certificate: v.certificate,
            kernel_dim: v.kernel_dim,
            restarts_used: v.restarts_used,
            witness,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AmbiguitySection {
    pub nonvanishing: bool,
    pub zeros: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct P0Section {
    /// Zeros over the projective-kernel transversal.
    pub value: Rational,
    pub value_full_group: Rational,
    pub zeros: usize,
    pub frame_len: usize,
    /// `(d−1)/|W|`, attained exactly by full-spark frames.
    pub floor: Rational,
    pub exact: bool,
    pub lower_bound_only: bool,
    pub subsets_examined: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepSection {
    pub kind: String,
    pub dim: usize,
    pub fingerprint: String,
    pub irreducible: bool,
    pub kernel_order: usize,
    pub projective_kernel_order: usize,
    pub frame_len: usize,
    pub window: Vec<[f64; 2]>,
    pub chains: Vec<ChainSummary>,
    pub phase_retrieval: PrSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambiguity: Option<AmbiguitySection>,
    pub p0: P0Section,
    pub spark: SparkResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub group: GroupSection,
    pub sylow: Vec<SylowFactor>,
    pub settings: Settings,
    pub representations: Vec<RepSection>,
}

/// Compact output of the `pr` command.
#[derive(Clone, Debug, Serialize)]
pub struct PrReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub group: GroupSection,
    pub settings: Settings,
    pub representation: String,
    pub dim: usize,
    pub frame_len: usize,
    pub phase_retrieval: PrSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambiguity: Option<AmbiguitySection>,
}

pub struct Decision {
    pub frame: OrbitFrame,
    pub verdict: PRVerdict,
    pub ambiguity: Option<AmbiguitySection>,
}

/// Builds the frame and decides phase retrieval; a nonvanishing ambiguity
/// function settles the Schrödinger case when the lifted test does not.
pub fn decide(r: &ResolvedRep, window: CVec, s: &Settings) -> Result<Decision> {
    let frame = orbit_frame(Arc::clone(&r.rep), window, &s.tolerances)?;
    let mut verdict = pr_decide(&frame, s.search, s.seed);
    let ambiguity = match r.schrodinger_n {
        Some(n) => {
            let (nonvanishing, zeros) = ambiguity_nonvanishing(n, &frame.window, &s.tolerances)?;
            if nonvanishing && verdict.status == PRStatus::Undecided {
                verdict.status = PRStatus::Holds;
                verdict.certificate = Some(Certificate::AmbiguityNonvanishing);
            }
            Some(AmbiguitySection { nonvanishing, zeros })
        }
        None => None,
    };
    Ok(Decision { frame, verdict, ambiguity })
}

pub fn analyze(g: &ResolvedGroup, r: &ResolvedRep, window: CVec, s: Settings) -> Result<AnalysisReport> {
    let Decision { frame, verdict, ambiguity } = decide(r, window, &s)?;
    let p0 = p0_exact(&frame, s.budget_p0);
    let spark = full_spark(&frame, s.budget_spark);
    let (ker, pker) = r.rep.kernels(&s.tolerances);
    let (character, irreducible) = r.rep.character_and_irreducibility();
    let d = frame.dim() as i64;
    let section = RepSection {
        kind: r.kind.clone(),
        dim: r.rep.dim(),
        fingerprint: character.fingerprint(),
        irreducible,
        kernel_order: ker.order(),
        projective_kernel_order: pker.order(),
        frame_len: frame.len(),
        window: vector_to_pairs(&frame.window),
        chains: r.chains.iter().map(ChainSummary::new).collect(),
        phase_retrieval: PrSection::new(&frame, &verdict),
        ambiguity,
        p0: P0Section {
            value: p0.value.into(),
            value_full_group: p0.value_full_group.into(),
            zeros: p0.zeros,
            frame_len: p0.frame_len,
            floor: Ratio::new(d - 1, frame.len() as i64).into(),
            exact: p0.exact,
            lower_bound_only: p0.lower_bound_only,
            subsets_examined: p0.subsets_examined,
        },
        spark,
    };
    Ok(AnalysisReport {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        group: GroupSection::new(g),
        sylow: sylow_summary(g)?,
        settings: s,
        representations: vec![section],
    })
}

pub fn pr_only(g: &ResolvedGroup, r: &ResolvedRep, window: CVec, s: Settings) -> Result<PrReport> {
    let Decision { frame, verdict, ambiguity } = decide(r, window, &s)?;
    Ok(PrReport {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        group: GroupSection::new(g),
        representation: r.kind.clone(),
        dim: frame.dim(),
        frame_len: frame.len(),
        phase_retrieval: PrSection::new(&frame, &verdict),
        ambiguity,
        settings: s,
    })
}

/// One-line summary used by `--format text`.
pub fn summary_line(status: PRStatus, certificate: Option<Certificate>) -> String {
    match certificate {
        Some(c) => format!("{status:?} ({})", serde_json::to_value(c).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()),
        None => format!("{status:?}"),
    }
}
