//! Property testers built on the Gowers circuits.
//!
//! Every tester runs a circuit of some order `k`, whose zero outcome has
//! probability `||f||_{U^k}^{2^{k+1}}`, draws `m` shots and accepts iff the
//! empirical zero frequency reaches the threshold. Shot counts come from
//! two-sided Hoeffding: `m = ceil((2 / gap^2) ln(2 / eta))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gowers_circuit::run_ud_sampled;
use crate::harmonic::FunctionTable;
use crate::poly::FarnessCertificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapProvenance {
    /// `1 - eps^4` from the `U^2` bound for functions far from linear.
    LinearLemma,
    UserSupplied,
    /// Markov slack on the Haar expectation.
    ExactVsRandom,
    /// `eps1^8 - eps2^4` for the two-sided character test.
    CharacterCorrelation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPlan {
    /// Degree under test.
    pub d: usize,
    /// Circuit order `k`; the readout is `||f||_{U^k}^{readout_power}`.
    pub order: usize,
    pub readout_power: u64,
    pub gap: f64,
    pub threshold: f64,
    pub m: usize,
    pub eta: f64,
    pub gap_provenance: GapProvenance,
}

/// Shot count and midpoint threshold for a gap `gap` and failure budget `eta`.
pub fn plan_samples(gap: f64, eta: f64) -> Result<TestPlan> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::param(format!("gap must lie in (0, 1], got {gap}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param(format!("eta must lie in (0, 1), got {eta}")));
    }
    let m = ((2.0 / (gap * gap)) * (2.0 / eta).ln()).ceil() as usize;
    Ok(TestPlan {
        d: 0,
        order: 0,
        readout_power: 0,
        gap,
        threshold: 1.0 - gap / 2.0,
        m: m.max(1),
        eta,
        gap_provenance: GapProvenance::UserSupplied,
    })
}

impl TestPlan {
    fn at_order(mut self, d: usize, order: usize, provenance: GapProvenance) -> Self {
        self.d = d;
        self.order = order;
        self.readout_power = 1u64 << (order + 1);
        self.gap_provenance = provenance;
        self
    }
}

/// Exhaustive (or sampled) farness evidence attached in harness mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub far: bool,
    pub max_correlation: f64,
    pub degree: u32,
    pub eps: f64,
    pub exhaustive: bool,
    pub witness: String,
}

impl From<&FarnessCertificate> for GroundTruth {
    fn from(c: &FarnessCertificate) -> Self {
        Self {
            far: c.far,
            max_correlation: c.max_correlation,
            degree: c.degree,
            eps: c.eps,
            exhaustive: c.exhaustive,
            witness: c.witness.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: String,
    pub p: u32,
    pub n: usize,
    pub params: TestPlan,
    pub accept: bool,
    pub p_hat: f64,
    pub m: usize,
    pub seed: u64,
    /// Exact zero-outcome probability, read from the statevector.
    pub zero_probability: f64,
    pub query_count: usize,
    pub qft_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl Verdict {
    pub fn with_ground_truth(mut self, cert: &FarnessCertificate) -> Self {
        self.ground_truth = Some(cert.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serialization is infallible")
    }
}

fn run_plan(kind: &str, f: &FunctionTable, plan: TestPlan, seed: u64) -> Result<Verdict> {
    let run = run_ud_sampled(f, plan.order, plan.m, seed)?;
    let p_hat = run.p_hat.expect("sampled run records p_hat");
    Ok(Verdict {
        kind: kind.to_string(),
        p: f.params().p(),
        n: f.params().n(),
        accept: p_hat >= plan.threshold,
        p_hat,
        m: plan.m,
        seed,
        zero_probability: run.zero_probability,
        query_count: run.query_count,
        qft_count: run.qft_count,
        params: plan,
        ground_truth: None,
        warnings: Vec::new(),
    })
}

/// Gap separating degree-`d` phases (probability 1) from Haar-random
/// functions: `1 - max(1/2, 4/p^n)`, Markov with slack 4 on the Haar mean.
pub fn exact_vs_random_gap(p: u32, n: usize) -> f64 {
    let size = (p as f64).powi(n as i32);
    1.0 - (4.0 / size).max(0.5)
}

/// Degree-`d` phase polynomial versus Haar-random function, with an order
/// `d + 1` circuit.
pub fn test_degree_d_exact_vs_random(f: &FunctionTable, d: usize, eta: f64, seed: u64) -> Result<Verdict> {
    let g = f.params();
    g.product_size(d + 2, "exact-vs-random circuit")?;
    let gap = exact_vs_random_gap(g.p(), g.n());
    if gap <= 0.0 {
        return Err(Error::param(format!(
            "group of size {} is too small for a positive gap (gap = {gap})",
            g.order()
        )));
    }
    let plan = plan_samples(gap, eta)?.at_order(d, d + 1, GapProvenance::ExactVsRandom);
    run_plan("exact_vs_random", f, plan, seed)
}

/// Linear phase versus `eps`-far from every linear phase: order-2 circuit,
/// gap `1 - eps^4`.
pub fn test_linear(f: &FunctionTable, eps: f64, eta: f64, seed: u64) -> Result<Verdict> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1), got {eps}")));
    }
    let plan = plan_samples(1.0 - eps.powi(4), eta)?.at_order(1, 2, GapProvenance::LinearLemma);
    run_plan("linear", f, plan, seed)
}

/// Some character correlates above `eps1` versus none above `eps2`.
/// The zero probability is at least `eps1^8` on the first side and at most
/// `eps2^4` on the second; the threshold sits at the midpoint.
pub fn test_character_two_sided(f: &FunctionTable, eps1: f64, eps2: f64, eta: f64, seed: u64) -> Result<Verdict> {
    if !(eps1 > 0.0 && eps1 <= 1.0 && eps2 > 0.0 && eps2 < 1.0) {
        return Err(Error::param("eps1 must lie in (0, 1] and eps2 in (0, 1)"));
    }
    if eps1 <= eps2.sqrt() {
        return Err(Error::param(format!(
            "need eps1 > sqrt(eps2): {eps1} <= {}",
            eps2.sqrt()
        )));
    }
    let (hi, lo) = (eps1.powi(8), eps2.powi(4));
    let mut plan = plan_samples(hi - lo, eta)?.at_order(1, 2, GapProvenance::CharacterCorrelation);
    plan.threshold = (hi + lo) / 2.0;
    run_plan("character_two_sided", f, plan, seed)
}

/// Whether `(p, d)` is covered by a known inverse theorem.
pub fn in_regime(p: u32, d: usize) -> bool {
    match d {
        1..=3 => true,
        4 | 5 => p == 2,
        _ => false,
    }
}

/// Degree-`d` phase versus far from all of them, with a caller-supplied gap
/// (the inverse-theorem constants are not explicit).
pub fn test_degree_d_far(
    f: &FunctionTable,
    d: usize,
    gap: f64,
    eta: f64,
    seed: u64,
    allow_out_of_regime: bool,
) -> Result<Verdict> {
    if d == 0 {
        return Err(Error::param("degree must be at least 1"));
    }
    let p = f.params().p();
    let mut warnings = Vec::new();
    if !in_regime(p, d) {
        let msg = format!("degree {d} over F_{p} is outside the supported regime table");
        if !allow_out_of_regime {
            return Err(Error::param(msg));
        }
        warnings.push(msg);
    }
    let plan = plan_samples(gap, eta)?.at_order(d, d + 1, GapProvenance::UserSupplied);
    let mut verdict = run_plan("degree_d_far", f, plan, seed)?;
    verdict.warnings = warnings;
    Ok(verdict)
}
