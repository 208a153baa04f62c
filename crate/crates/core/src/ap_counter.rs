//! Counting 3-term progressions `x, x+y, x+2y` in a set `S`: exactly, through
//! the `T3` phase circuit on `g = (-1)^{1_S}`, and through `U^2` bounds.
//!
//! For `p >= 3` each pair among `(x, x+y, x+2y)` is uniform on `G^2`, so
//! expanding `g = 1 - 2f` in `T(g)` leaves only `T(f)`, the density `alpha`
//! and `alpha^2` cross terms:
//! `T(f) = (1 - 6 alpha + 12 alpha^2 - T(g)) / 8`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gowers_circuit::{run_t3_hadamard, run_t3_hadamard_sampled, run_ud};
use crate::group::GroupParams;
use crate::harmonic::{count_3aps_exact, gowers_norm_bruteforce, indicator_bits, indicator_table, t3, FunctionTable};
use crate::rng::{rng_for, Stream};

/// Tolerance used when flagging the lower `U^2` bound as violated.
const BOUND_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SetInstance {
    indicator: FunctionTable,
    phase: FunctionTable,
    alpha: f64,
    size: usize,
}

impl SetInstance {
    pub fn new(indicator: FunctionTable) -> Result<Self> {
        let bits = indicator_bits(&indicator)?;
        let size = bits.iter().filter(|&&b| b).count();
        let phase = FunctionTable::from_fn(indicator.params(), |x| {
            Complex64::new(if bits[x] { -1.0 } else { 1.0 }, 0.0)
        })?;
        Ok(Self {
            alpha: size as f64 / bits.len() as f64,
            indicator,
            phase,
            size,
        })
    }

    pub fn from_members(params: &GroupParams, members: &[usize]) -> Result<Self> {
        Self::new(indicator_table(params, members)?)
    }

    /// Each element joins independently with probability `density`.
    pub fn random(params: &GroupParams, density: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::param(format!("density must lie in [0, 1], got {density}")));
        }
        let mut rng = rng_for(seed, Stream::Subset);
        let members: Vec<usize> = (0..params.order()).filter(|_| rng.gen::<f64>() < density).collect();
        Self::from_members(params, &members)
    }

    pub fn indicator(&self) -> &FunctionTable {
        &self.indicator
    }

    /// `1 - 2 * indicator`.
    pub fn phase(&self) -> &FunctionTable {
        &self.phase
    }

    pub fn density(&self) -> f64 {
        self.alpha
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn params(&self) -> &GroupParams {
        self.indicator.params()
    }

    fn require_odd(&self) -> Result<()> {
        if self.params().p() == 2 {
            Err(Error::domain("3-AP counting needs p >= 3"))
        } else {
            Ok(())
        }
    }

    fn n_squared(&self) -> f64 {
        let n = self.params().order() as f64;
        n * n
    }
}

/// `(1 - 6 alpha + 12 alpha^2 - T(g)) / 8`.
pub fn t_from_phase(alpha: f64, t_g: f64) -> f64 {
    (1.0 - 6.0 * alpha + 12.0 * alpha * alpha - t_g) / 8.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    QuantumT3,
    U2Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Readout {
    Exact,
    Sampled { m: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub alpha: f64,
    pub set_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u2_indicator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u2_phase: Option<f64>,
    /// `||1_S||_{U^2}^5`, the lower bound claimed for `|T|`; reported only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound_claimed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound_violated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nontrivial_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApEstimate {
    pub method: Method,
    /// Point estimate of `T(f)`; for bounds, the interval midpoint.
    pub t_f: f64,
    /// `N^2 * t_f`.
    pub count: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_interval: Option<[f64; 2]>,
    pub diagnostics: Diagnostics,
}

impl ApEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serialization is infallible")
    }

    pub fn contains(&self, t: f64, tol: f64) -> bool {
        match self.t_interval {
            Some([lo, hi]) => t >= lo - tol && t <= hi + tol,
            None => (t - self.t_f).abs() <= tol,
        }
    }
}

fn diagnostics(s: &SetInstance) -> Diagnostics {
    Diagnostics {
        alpha: s.alpha,
        set_size: s.size,
        ..Default::default()
    }
}

pub fn estimate_exact(s: &SetInstance) -> Result<ApEstimate> {
    s.require_odd()?;
    let c = count_3aps_exact(&s.indicator)?;
    let mut diag = diagnostics(s);
    diag.nontrivial_count = Some(c.nontrivial);
    Ok(ApEstimate {
        method: Method::Exact,
        t_f: c.t,
        count: c.count as f64,
        t_interval: None,
        count_interval: None,
        diagnostics: diag,
    })
}

/// `T(g)` from the Hadamard-test circuit, converted back to `T(f)`. In
/// sampled mode the interval has radius `r / 4`, with `r` the Hoeffding
/// radius on the ancilla frequency.
pub fn estimate_quantum_t3(s: &SetInstance, readout: Readout) -> Result<ApEstimate> {
    s.require_odd()?;
    let mut diag = diagnostics(s);
    let (t_g, interval) = match readout {
        Readout::Exact => {
            let h = run_t3_hadamard(&s.phase)?;
            diag.query_count = Some(h.query_count);
            (h.real_part, None)
        }
        Readout::Sampled { m, seed } => {
            let h = run_t3_hadamard_sampled(&s.phase, m, seed)?;
            let rec = h.sampled.expect("sampled run records shots");
            diag.query_count = Some(h.query_count);
            diag.m = Some(m);
            diag.seed = Some(seed);
            (rec.real_part_hat, Some(rec.radius / 4.0))
        }
    };
    diag.t_g = Some(t_g);
    let t_f = t_from_phase(s.alpha, t_g);
    let n2 = s.n_squared();
    let t_interval = interval.map(|r| [t_f - r, t_f + r]);
    Ok(ApEstimate {
        method: Method::QuantumT3,
        t_f,
        count: n2 * t_f,
        t_interval,
        count_interval: t_interval.map(|[lo, hi]| [lo * n2, hi * n2]),
        diagnostics: diag,
    })
}

/// `0 <= T(f) <= ||1_S||_{U^2}^2`. The stronger lower bound
/// `||1_S||_{U^2}^5` is reported with a violation flag but never enters the
/// interval.
pub fn u2_bounds(s: &SetInstance) -> Result<ApEstimate> {
    s.require_odd()?;
    let u2 = gowers_norm_bruteforce(&s.indicator, 2)?;
    let u2_phase = run_ud(&s.phase, 2)?.zero_probability.powf(1.0 / 8.0);
    let t_exact = t3(&s.indicator, &s.indicator, &s.indicator, false)?.re;
    let lower = u2.powi(5);
    let mut diag = diagnostics(s);
    diag.u2_indicator = Some(u2);
    diag.u2_phase = Some(u2_phase);
    diag.lower_bound_claimed = Some(lower);
    diag.lower_bound_violated = Some(t_exact.abs() < lower - BOUND_TOL);
    let hi = u2 * u2;
    let n2 = s.n_squared();
    Ok(ApEstimate {
        method: Method::U2Bounds,
        t_f: hi / 2.0,
        count: n2 * hi / 2.0,
        t_interval: Some([0.0, hi]),
        count_interval: Some([0.0, n2 * hi]),
        diagnostics: diag,
    })
}

/// Dominant query-cost terms of the two counting routes, evaluated on the
/// instance. `None` marks a diverging term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub eps: f64,
    pub group_size: usize,
    /// Progressions counted, `d = 0` included.
    pub solutions: u64,
    pub t_f: f64,
    pub u2: f64,
    /// `1 / (eps^2 ||f||_{U^2}^10)`.
    pub gowers_term: Option<f64>,
    /// `1 / (eps^2 T(f)^5)`.
    pub gowers_t_term: Option<f64>,
    /// `sqrt(N^2 / M) / eps`.
    pub grover_term: Option<f64>,
    pub diverges: bool,
}

pub fn query_cost_report(s: &SetInstance, eps: f64) -> Result<CostReport> {
    s.require_odd()?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1), got {eps}")));
    }
    let c = count_3aps_exact(&s.indicator)?;
    let u2 = gowers_norm_bruteforce(&s.indicator, 2)?;
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    let e2 = eps * eps;
    let gowers_term = finite(1.0 / (e2 * u2.powi(10)));
    let gowers_t_term = finite(1.0 / (e2 * c.t.powi(5)));
    let grover_term = finite((s.n_squared() / c.count as f64).sqrt() / eps);
    Ok(CostReport {
        eps,
        group_size: s.params().order(),
        solutions: c.count,
        t_f: c.t,
        u2,
        diverges: gowers_term.is_none() || gowers_t_term.is_none() || grover_term.is_none(),
        gowers_term,
        gowers_t_term,
        grover_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    #[test]
    fn full_and_empty_sets() {
        let g = params(3, 2);
        let full = SetInstance::from_members(&g, &(0..9).collect::<Vec<_>>()).unwrap();
        let q = estimate_quantum_t3(&full, Readout::Exact).unwrap();
        assert!((q.diagnostics.t_g.unwrap() + 1.0).abs() <= 1e-12);
        assert!((q.t_f - 1.0).abs() <= 1e-12);
        assert_eq!(estimate_exact(&full).unwrap().count, 81.0);

        let empty = SetInstance::from_members(&g, &[]).unwrap();
        let q = estimate_quantum_t3(&empty, Readout::Exact).unwrap();
        assert!(q.t_f.abs() <= 1e-12);
        assert_eq!(estimate_exact(&empty).unwrap().count, 0.0);

        let b = u2_bounds(&full).unwrap();
        assert!((b.diagnostics.u2_indicator.unwrap() - 1.0).abs() <= 1e-12);
        assert!(b.contains(1.0, 1e-12));
    }

    #[test]
    fn conversion_identity_by_bruteforce() {
        for (p, n) in [(3u64, 1usize), (3, 2), (5, 1), (5, 2)] {
            let g = params(p, n);
            for seed in 0..10 {
                let s = SetInstance::random(&g, 0.4, seed).unwrap();
                let tf = t3(s.indicator(), s.indicator(), s.indicator(), false).unwrap().re;
                let tg = t3(s.phase(), s.phase(), s.phase(), false).unwrap().re;
                assert!((t_from_phase(s.density(), tg) - tf).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn quantum_matches_exact() {
        let g = params(3, 2);
        for seed in 0..50 {
            let s = SetInstance::random(&g, 0.5, seed).unwrap();
            let e = estimate_exact(&s).unwrap();
            let q = estimate_quantum_t3(&s, Readout::Exact).unwrap();
            assert!((e.t_f - q.t_f).abs() <= 1e-10, "seed {seed}");
            assert_eq!(q.diagnostics.query_count, Some(3));
        }
    }

    #[test]
    fn sampled_interval() {
        let g = params(5, 1);
        let s = SetInstance::from_members(&g, &[0, 1, 3]).unwrap();
        let exact = estimate_exact(&s).unwrap().t_f;
        let q = estimate_quantum_t3(&s, Readout::Sampled { m: 4000, seed: 12 }).unwrap();
        let [lo, hi] = q.t_interval.unwrap();
        assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
        assert_eq!(q, estimate_quantum_t3(&s, Readout::Sampled { m: 4000, seed: 12 }).unwrap());
    }

    #[test]
    fn bounds() {
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let g = params(p, n);
            for seed in 0..20 {
                let s = SetInstance::random(&g, 0.5, seed).unwrap();
                let t = estimate_exact(&s).unwrap().t_f;
                let b = u2_bounds(&s).unwrap();
                let u2 = b.diagnostics.u2_indicator.unwrap();
                assert!(t.abs() <= u2 * u2 + 1e-10);
                assert!(u2 >= t.abs().sqrt() - 1e-10);
                assert!(b.contains(t, 1e-10));
                let brute_phase = gowers_norm_bruteforce(s.phase(), 2).unwrap();
                assert!((b.diagnostics.u2_phase.unwrap() - brute_phase).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn cost_report() {
        let g = params(3, 2);
        let full = SetInstance::from_members(&g, &(0..9).collect::<Vec<_>>()).unwrap();
        let r = query_cost_report(&full, 0.1).unwrap();
        assert!((r.gowers_term.unwrap() - 100.0).abs() <= 1e-9);
        assert!((r.grover_term.unwrap() - 10.0).abs() <= 1e-9);
        assert!(!r.diverges);

        let empty = SetInstance::from_members(&g, &[]).unwrap();
        let r = query_cost_report(&empty, 0.1).unwrap();
        assert!(r.diverges);
        assert_eq!(r.gowers_t_term, None);

        let dense = SetInstance::random(&params(5, 2), 0.6, 4).unwrap();
        let r = query_cost_report(&dense, 0.1).unwrap();
        assert!(r.gowers_term.unwrap() >= r.grover_term.unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let g2 = params(2, 3);
        let s = SetInstance::from_members(&g2, &[1]).unwrap();
        assert!(matches!(estimate_exact(&s), Err(Error::Domain(_))));
        assert!(matches!(estimate_quantum_t3(&s, Readout::Exact), Err(Error::Domain(_))));
        assert!(matches!(u2_bounds(&s), Err(Error::Domain(_))));
        let g = params(3, 1);
        let half = FunctionTable::constant(&g, Complex64::new(0.5, 0.0)).unwrap();
        assert!(matches!(SetInstance::new(half), Err(Error::Domain(_))));
        assert!(SetInstance::random(&g, 1.5, 0).is_err());
    }
}
