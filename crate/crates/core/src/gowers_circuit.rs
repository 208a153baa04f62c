//! Gowers-norm circuits: plans built from phase oracles, controlled
//! additions and QFTs, and runners that execute them on a [`StateVector`].
//!
//! Registers: 0 holds `x` and doubles as the accumulator, `1..=d` hold
//! `h_1..h_d`. Vertex `w` of `{0,1}^d` is visited with register 0 holding
//! `x + w.h`, where bit `j` of `w` selects `h_{j+1}`. Starting from the
//! uniform state, the amplitude of `|0...0>` after the final QFTs is the
//! Gowers expectation itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{checked_power, Error, Result};
use crate::group::GroupVector;
use crate::harmonic::FunctionTable;
use crate::qsim::{RegisterLayout, StateVector};

/// Confidence level used for the sampled-mode interval.
pub const SAMPLED_CONFIDENCE_DELTA: f64 = 0.01;

/// Largest order accepted by the plan builders.
pub const MAX_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Phase oracle for vertex `vertex` on `register`.
    Oracle {
        register: usize,
        conjugate: bool,
        vertex: usize,
    },
    Cadd { src: usize, dst: usize, sign: i8 },
    Qft { register: usize, inverse: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitPlan {
    /// Number of shift registers; the plan acts on `d + 1` registers.
    pub d: usize,
    pub schedule: Vec<Step>,
    pub query_count: usize,
    pub qft_count: usize,
    /// Which vertices carry an oracle; `None` means all of them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_selection: Option<Vec<bool>>,
}

impl CircuitPlan {
    fn from_schedule(d: usize, schedule: Vec<Step>, oracle_selection: Option<Vec<bool>>) -> Self {
        let query_count = schedule.iter().filter(|s| matches!(s, Step::Oracle { .. })).count();
        let qft_count = schedule.iter().filter(|s| matches!(s, Step::Qft { .. })).count();
        Self {
            d,
            schedule,
            query_count,
            qft_count,
            oracle_selection,
        }
    }

    pub fn registers(&self) -> usize {
        self.d + 1
    }

    pub fn cadd_count(&self) -> usize {
        self.schedule.iter().filter(|s| matches!(s, Step::Cadd { .. })).count()
    }

    /// Whether the CADD steps compose to the identity. Tracks each register
    /// as an integer combination of the initial contents.
    pub fn restores_registers(&self) -> bool {
        let r = self.registers();
        let mut rows: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| (i == j) as i64).collect())
            .collect();
        for step in &self.schedule {
            if let Step::Cadd { src, dst, sign } = *step {
                let add: Vec<i64> = rows[src].iter().map(|v| v * sign as i64).collect();
                for (a, b) in rows[dst].iter_mut().zip(add) {
                    *a += b;
                }
            }
        }
        rows.iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == (i == j) as i64))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serialization is infallible")
    }
}

fn check_order(d: usize) -> Result<usize> {
    if d == 0 || d > MAX_ORDER {
        return Err(Error::param(format!("order d must lie in 1..={MAX_ORDER}, got {d}")));
    }
    Ok(checked_power(2, d).expect("bounded order"))
}

/// The full `U^d` plan: every vertex carries an oracle.
pub fn build_ud_plan(d: usize) -> Result<CircuitPlan> {
    build_selected_plan(d, None)
}

/// Gray-code walk over `{0,1}^d` with one CADD toggle per transition, an
/// oracle (conjugated on odd-weight vertices) at each selected vertex, a
/// restore of the accumulator, and a QFT on every register.
pub fn build_selected_plan(d: usize, selection: Option<Vec<bool>>) -> Result<CircuitPlan> {
    let vertices = check_order(d)?;
    if let Some(sel) = &selection {
        if sel.len() != vertices {
            return Err(Error::param(format!(
                "vertex selection has {} entries, expected {vertices}",
                sel.len()
            )));
        }
    }
    let selected = |w: usize| selection.as_ref().is_none_or(|s| s[w]);
    let oracle = |w: usize| Step::Oracle {
        register: 0,
        conjugate: w.count_ones() % 2 == 1,
        vertex: w,
    };

    let mut schedule = Vec::with_capacity(vertices * 2 + 2 * d);
    let mut current = 0usize;
    if selected(0) {
        schedule.push(oracle(0));
    }
    for t in 1..vertices {
        let next = t ^ (t >> 1);
        let j = (next ^ current).trailing_zeros() as usize;
        let sign = if next & (1 << j) != 0 { 1 } else { -1 };
        schedule.push(Step::Cadd { src: j + 1, dst: 0, sign });
        current = next;
        if selected(current) {
            schedule.push(oracle(current));
        }
    }
    for j in 0..d {
        if current & (1 << j) != 0 {
            schedule.push(Step::Cadd { src: j + 1, dst: 0, sign: -1 });
        }
    }
    for register in 0..=d {
        schedule.push(Step::Qft { register, inverse: false });
    }
    Ok(CircuitPlan::from_schedule(d, schedule, selection))
}

/// `E_{x,y} g(x) g(x+y) g(x+2y)` on registers `(x, y)`: `x + 2y` is reached
/// with two stacked CADDs, which are then undone before the final QFTs.
pub fn build_t3_plan() -> CircuitPlan {
    let oracle = |vertex| Step::Oracle {
        register: 0,
        conjugate: false,
        vertex,
    };
    let add = |sign| Step::Cadd { src: 1, dst: 0, sign };
    let schedule = vec![
        oracle(0),
        add(1),
        oracle(1),
        add(1),
        oracle(2),
        add(-1),
        add(-1),
        Step::Qft { register: 0, inverse: false },
        Step::Qft { register: 1, inverse: false },
    ];
    CircuitPlan::from_schedule(1, schedule, None)
}

/// Applies `plan` to `state`; oracle steps take their table from
/// `table(vertex)`. With `controlled`, oracles act only on the ancilla's 1
/// branch and QFT steps are skipped.
pub fn execute_plan<'a>(
    plan: &CircuitPlan,
    state: &mut StateVector,
    table: impl Fn(usize) -> &'a FunctionTable,
    controlled: bool,
) -> Result<()> {
    if state.layout().registers() != plan.registers() {
        return Err(Error::param(format!(
            "plan needs {} registers, state has {}",
            plan.registers(),
            state.layout().registers()
        )));
    }
    for step in &plan.schedule {
        match *step {
            Step::Oracle {
                register,
                conjugate,
                vertex,
            } => {
                if controlled {
                    state.controlled_phase_oracle(register, table(vertex), conjugate)?
                } else {
                    state.apply_phase_oracle(register, table(vertex), conjugate)?
                }
            }
            Step::Cadd { src, dst, sign } => state.apply_cadd(src, dst, sign)?,
            Step::Qft { register, inverse } => {
                if !controlled {
                    state.apply_qft(register, inverse)?
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Probability at `peak` (the all-zero outcome unless shifted).
    pub zero_probability: f64,
    /// Real part of the amplitude at `peak`.
    pub exact_expectation: f64,
    /// The full amplitude at `peak`, `[re, im]`.
    pub amplitude: [f64; 2],
    /// Per-register linear indices of the readout location.
    pub peak: Vec<usize>,
    /// Oracle applications made by the circuit.
    pub query_count: usize,
    /// QFTs in the circuit proper (state preparation excluded).
    pub qft_count: usize,
    pub m: Option<usize>,
    pub p_hat: Option<f64>,
    pub ci: Option<[f64; 2]>,
    pub seed: Option<u64>,
}

impl RunResult {
    fn from_state(state: &StateVector, peak_index: usize, queries: usize, qfts: usize) -> Self {
        let amp = state.amplitude(peak_index);
        let (peak, _) = state.layout().split_index(peak_index);
        Self {
            zero_probability: amp.norm_sqr(),
            exact_expectation: amp.re,
            amplitude: [amp.re, amp.im],
            peak,
            query_count: queries,
            qft_count: qfts,
            m: None,
            p_hat: None,
            ci: None,
            seed: None,
        }
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.amplitude[0], self.amplitude[1])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization is infallible")
    }

    /// Draws `m` shots from `state`, records the frequency of the peak and a
    /// two-sided Hoeffding interval at confidence `1 - SAMPLED_CONFIDENCE_DELTA`.
    fn attach_samples(&mut self, state: &StateVector, peak_index: usize, m: usize, seed: u64) -> Result<()> {
        let shots = state.sample(m, seed)?;
        let hits = shots.iter().filter(|&&i| i == peak_index).count();
        let p_hat = hits as f64 / m as f64;
        let r = confidence_radius(m);
        self.m = Some(m);
        self.p_hat = Some(p_hat);
        self.ci = Some([(p_hat - r).max(0.0), (p_hat + r).min(1.0)]);
        self.seed = Some(seed);
        Ok(())
    }
}

/// `sqrt(ln(2/delta) / (2m))` with `delta = SAMPLED_CONFIDENCE_DELTA`.
pub fn confidence_radius(m: usize) -> f64 {
    ((2.0 / SAMPLED_CONFIDENCE_DELTA).ln() / (2.0 * m as f64)).sqrt()
}

fn check_counts(plan: &CircuitPlan, state: &StateVector, prep_qfts: usize) -> Result<(usize, usize)> {
    let c = state.counts();
    let qfts = c.qft - prep_qfts;
    if c.oracle != plan.query_count || qfts != plan.qft_count {
        return Err(Error::Internal(format!(
            "instrumented {} queries / {qfts} QFTs, plan declares {} / {}",
            c.oracle, plan.query_count, plan.qft_count
        )));
    }
    Ok((c.oracle, qfts))
}

fn ud_state(f: &FunctionTable, d: usize) -> Result<(StateVector, CircuitPlan)> {
    let plan = build_ud_plan(d)?;
    f.ensure_unimodular()?;
    let layout = RegisterLayout::new(f.params(), d + 1, false)?;
    let mut state = StateVector::init_uniform(&layout);
    execute_plan(&plan, &mut state, |_| f, false)?;
    Ok((state, plan))
}

/// Runs the `U^d` circuit; the zero-outcome probability is
/// `||f||_{U^d}^{2^{d+1}}`.
pub fn run_ud(f: &FunctionTable, d: usize) -> Result<RunResult> {
    let (state, plan) = ud_state(f, d)?;
    let (q, t) = check_counts(&plan, &state, 0)?;
    Ok(RunResult::from_state(&state, 0, q, t))
}

/// [`run_ud`] plus `m` measurement shots.
pub fn run_ud_sampled(f: &FunctionTable, d: usize, m: usize, seed: u64) -> Result<RunResult> {
    if m == 0 {
        return Err(Error::precondition("sampled runs need m >= 1"));
    }
    let (state, plan) = ud_state(f, d)?;
    let (q, t) = check_counts(&plan, &state, 0)?;
    let mut result = RunResult::from_state(&state, 0, q, t);
    result.attach_samples(&state, 0, m, seed)?;
    Ok(result)
}

/// Vertex-selective circuit: `fs[w] = None` stands for the constant 1 and
/// that vertex's oracle is skipped. The zero amplitude is the Gowers inner
/// product of the tables.
pub fn run_inner_product(fs: &[Option<FunctionTable>], d: usize) -> Result<RunResult> {
    let vertices = check_order(d)?;
    if fs.len() != vertices {
        return Err(Error::param(format!(
            "order {d} takes {vertices} vertex tables, got {}",
            fs.len()
        )));
    }
    let present: Vec<&FunctionTable> = fs.iter().flatten().collect();
    let params = match present.first() {
        Some(f) => f.params().clone(),
        None => return Err(Error::param("at least one vertex needs a table to fix the group")),
    };
    for f in &present {
        params.ensure_same(f.params())?;
        f.ensure_unimodular()?;
    }
    let plan = build_selected_plan(d, Some(fs.iter().map(Option::is_some).collect()))?;
    let layout = RegisterLayout::new(&params, d + 1, false)?;
    let mut state = StateVector::init_uniform(&layout);
    execute_plan(
        &plan,
        &mut state,
        |w| fs[w].as_ref().expect("plan only visits selected vertices"),
        false,
    )?;
    let (q, t) = check_counts(&plan, &state, 0)?;
    Ok(RunResult::from_state(&state, 0, q, t))
}

/// Starts from `|shifts>` Fourier-transformed register by register, then
/// runs the `U^d` plan. The peak moves to `-shifts` with unchanged height.
pub fn run_shifted(f: &FunctionTable, d: usize, shifts: &[GroupVector]) -> Result<RunResult> {
    let plan = build_ud_plan(d)?;
    f.ensure_unimodular()?;
    let layout = RegisterLayout::new(f.params(), d + 1, false)?;
    let mut state = StateVector::init_basis(&layout, shifts)?;
    for k in 0..=d {
        state.apply_qft(k, false)?;
    }
    execute_plan(&plan, &mut state, |_| f, false)?;
    let (q, t) = check_counts(&plan, &state, d + 1)?;
    let negated: Vec<GroupVector> = shifts.iter().map(GroupVector::neg).collect();
    let peak = layout.composite_index(&negated)?;
    Ok(RunResult::from_state(&state, peak, q, t))
}

fn t3_domain(g: &FunctionTable) -> Result<()> {
    if g.params().p() == 2 {
        return Err(Error::domain("3-AP circuits need p >= 3"));
    }
    g.ensure_unimodular()
}

fn t3_state(g: &FunctionTable) -> Result<(StateVector, CircuitPlan)> {
    t3_domain(g)?;
    let plan = build_t3_plan();
    let layout = RegisterLayout::new(g.params(), 2, false)?;
    let mut state = StateVector::init_uniform(&layout);
    execute_plan(&plan, &mut state, |_| g, false)?;
    Ok((state, plan))
}

/// Zero amplitude `T(g)`; only `|T(g)|^2` is observable as a probability.
pub fn run_t3_circuit(g: &FunctionTable) -> Result<RunResult> {
    let (state, plan) = t3_state(g)?;
    let (q, t) = check_counts(&plan, &state, 0)?;
    Ok(RunResult::from_state(&state, 0, q, t))
}

pub fn run_t3_sampled(g: &FunctionTable, m: usize, seed: u64) -> Result<RunResult> {
    if m == 0 {
        return Err(Error::precondition("sampled runs need m >= 1"));
    }
    let (state, plan) = t3_state(g)?;
    let (q, t) = check_counts(&plan, &state, 0)?;
    let mut result = RunResult::from_state(&state, 0, q, t);
    result.attach_samples(&state, 0, m, seed)?;
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HadamardResult {
    /// `2 P(ancilla = 0) - 1`.
    pub real_part: f64,
    pub ancilla_zero_probability: f64,
    pub query_count: usize,
    pub qft_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<HadamardSamples>,
}

/// Shot record of a sampled Hadamard test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HadamardSamples {
    pub m: usize,
    pub seed: u64,
    /// Empirical frequency of ancilla outcome 0.
    pub p0_hat: f64,
    /// `2 p0_hat - 1`.
    pub real_part_hat: f64,
    /// Hoeffding radius on `p0_hat`; the radius on `real_part_hat` is twice this.
    pub radius: f64,
}

fn t3_hadamard_state(g: &FunctionTable) -> Result<StateVector> {
    t3_domain(g)?;
    let plan = build_t3_plan();
    let layout = RegisterLayout::new(g.params(), 2, true)?;
    let mut state = StateVector::init_uniform(&layout);
    state.apply_ancilla_hadamard()?;
    execute_plan(&plan, &mut state, |_| g, true)?;
    state.apply_ancilla_hadamard()?;
    if state.counts().oracle != plan.query_count {
        return Err(Error::Internal("Hadamard test made an unexpected number of queries".into()));
    }
    Ok(state)
}

fn hadamard_result(state: &StateVector) -> Result<HadamardResult> {
    let p0 = state.ancilla_probability(0)?;
    let c = state.counts();
    Ok(HadamardResult {
        real_part: 2.0 * p0 - 1.0,
        ancilla_zero_probability: p0,
        query_count: c.oracle,
        qft_count: c.qft,
        sampled: None,
    })
}

/// Hadamard test on the T3 phase schedule: ancilla in `|+>`, controlled
/// oracles, uncontrolled CADDs (they cancel on both branches), final
/// Hadamard. Reads `Re T(g)` with its sign.
pub fn run_t3_hadamard(g: &FunctionTable) -> Result<HadamardResult> {
    hadamard_result(&t3_hadamard_state(g)?)
}

/// [`run_t3_hadamard`] plus `m` shots, of which only the ancilla is read.
pub fn run_t3_hadamard_sampled(g: &FunctionTable, m: usize, seed: u64) -> Result<HadamardResult> {
    if m == 0 {
        return Err(Error::precondition("sampled runs need m >= 1"));
    }
    let state = t3_hadamard_state(g)?;
    let space = state.layout().register_space();
    let zeros = state.sample(m, seed)?.iter().filter(|&&i| i < space).count();
    let p0_hat = zeros as f64 / m as f64;
    let mut result = hadamard_result(&state)?;
    result.sampled = Some(HadamardSamples {
        m,
        seed,
        p0_hat,
        real_part_hat: 2.0 * p0_hat - 1.0,
        radius: confidence_radius(m),
    });
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;
    use crate::harmonic::{gowers_inner_product, gowers_norm_power, t3};
    use crate::poly::{haar_random_function, phase_function, PolynomialSpec};

    fn params(p: u64, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    #[test]
    fn plan_shapes() {
        let p1 = build_ud_plan(1).unwrap();
        assert_eq!(
            p1.schedule,
            vec![
                Step::Oracle { register: 0, conjugate: false, vertex: 0 },
                Step::Cadd { src: 1, dst: 0, sign: 1 },
                Step::Oracle { register: 0, conjugate: true, vertex: 1 },
                Step::Cadd { src: 1, dst: 0, sign: -1 },
                Step::Qft { register: 0, inverse: false },
                Step::Qft { register: 1, inverse: false },
            ]
        );
        for d in 1..=6 {
            let plan = build_ud_plan(d).unwrap();
            assert_eq!(plan.query_count, 1 << d);
            assert_eq!(plan.qft_count, d + 1);
            assert_eq!(plan.cadd_count(), (1 << d) - 1 + 1);
            assert!(plan.restores_registers());
            let mut seen = vec![false; 1 << d];
            for s in &plan.schedule {
                if let Step::Oracle { vertex, conjugate, .. } = s {
                    assert!(!seen[*vertex]);
                    seen[*vertex] = true;
                    assert_eq!(*conjugate, vertex.count_ones() % 2 == 1);
                }
            }
            assert!(seen.iter().all(|&v| v));
        }
        assert!(build_ud_plan(0).is_err());
        let t3 = build_t3_plan();
        assert_eq!((t3.query_count, t3.qft_count), (3, 2));
        assert!(t3.restores_registers());
    }

    #[test]
    fn plan_json() {
        let text = build_ud_plan(1).unwrap().to_json();
        assert!(text.starts_with(r#"{"d":1,"schedule":[{"op":"oracle","register":0,"conjugate":false,"vertex":0},{"op":"cadd","src":1,"dst":0,"sign":1}"#));
        let back: CircuitPlan = serde_json::from_str(&text).unwrap();
        assert_eq!(back, build_ud_plan(1).unwrap());
    }

    #[test]
    fn ud_matches_bruteforce() {
        let g = params(3, 1);
        for seed in 0..5 {
            let f = haar_random_function(&g, seed).unwrap();
            let run = run_ud(&f, 2).unwrap();
            let brute = gowers_norm_power(&f, 2).unwrap();
            assert!((run.zero_probability - brute * brute).abs() <= 1e-9);
            assert!((run.zero_probability - run.exact_expectation.powi(2)).abs() <= 1e-12);
            assert_eq!((run.query_count, run.qft_count), (4, 3));
        }
        let one = FunctionTable::constant(&g, Complex64::new(1.0, 0.0)).unwrap();
        assert!((run_ud(&one, 2).unwrap().zero_probability - 1.0).abs() <= 1e-12);
        let quad = phase_function(&PolynomialSpec::parse(&g, "x0^2").unwrap()).unwrap();
        assert!((run_ud(&quad, 3).unwrap().zero_probability - 1.0).abs() <= 1e-9);
        let bad = FunctionTable::constant(&g, Complex64::new(0.5, 0.0)).unwrap();
        assert!(matches!(run_ud(&bad, 2), Err(Error::Domain(_))));
        let capped = FunctionTable::constant(&params(2, 4).with_cap(1 << 10), Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(run_ud(&capped, 2), Err(Error::Size { .. })));
    }

    #[test]
    fn sampled_runs() {
        let g = params(2, 3);
        let lin = phase_function(&PolynomialSpec::linear(&g, &[1, 0, 1]).unwrap()).unwrap();
        let r = run_ud_sampled(&lin, 1, 37, 4).unwrap();
        // the constant-free linear phase has mean zero, so U^1 vanishes
        assert_eq!(r.p_hat, Some(0.0));
        let r = run_ud_sampled(&lin, 2, 37, 4).unwrap();
        assert_eq!(r.p_hat, Some(1.0));

        let f = haar_random_function(&g, 5).unwrap();
        let m = 10_000;
        let r = run_ud_sampled(&f, 1, m, 8).unwrap();
        let exact = run_ud(&f, 1).unwrap().zero_probability;
        assert!((r.p_hat.unwrap() - exact).abs() <= confidence_radius(m));
        assert_eq!(r, run_ud_sampled(&f, 1, m, 8).unwrap());
        assert!(matches!(run_ud_sampled(&f, 1, 0, 8), Err(Error::Precondition(_))));
    }

    #[test]
    fn inner_product_runs() {
        let g = params(3, 1);
        let f = haar_random_function(&g, 2).unwrap();
        let all: Vec<Option<FunctionTable>> = vec![Some(f.clone()); 4];
        let a = run_inner_product(&all, 2).unwrap();
        let b = run_ud(&f, 2).unwrap();
        assert!((a.zero_probability - b.zero_probability).abs() <= 1e-15);

        let mut only_one = vec![None; 4];
        only_one[2] = Some(FunctionTable::constant(&g, Complex64::new(1.0, 0.0)).unwrap());
        let r = run_inner_product(&only_one, 2).unwrap();
        assert!((r.zero_probability - 1.0).abs() <= 1e-12);
        assert_eq!(r.query_count, 1);

        let h = haar_random_function(&g, 3).unwrap();
        let one = FunctionTable::constant(&g, Complex64::new(1.0, 0.0)).unwrap();
        let sel = vec![Some(h.clone()), None, None, Some(h.clone())];
        let tables = vec![h.clone(), one.clone(), one, h];
        let r = run_inner_product(&sel, 2).unwrap();
        let brute = gowers_inner_product(&tables, 2).unwrap();
        assert!((r.zero_probability.sqrt() - brute.norm()).abs() <= 1e-9);
        assert_eq!(r.query_count, 2);
        assert!(run_inner_product(&[None, None], 1).is_err());
    }

    #[test]
    fn shifted_runs() {
        let g = params(3, 1);
        let f = haar_random_function(&g, 6).unwrap();
        let base = run_ud(&f, 2).unwrap();
        let zeros = vec![g.zero(); 3];
        let same = run_shifted(&f, 2, &zeros).unwrap();
        assert!((same.zero_probability - base.zero_probability).abs() <= 1e-12);

        let shifts: Vec<GroupVector> = [1, 2, 0].iter().map(|&v| g.vector(&[v]).unwrap()).collect();
        let r = run_shifted(&f, 2, &shifts).unwrap();
        assert_eq!(r.peak, vec![2, 1, 0]);
        assert!((r.zero_probability - base.zero_probability).abs() <= 1e-12);
        assert_eq!((r.query_count, r.qft_count), (4, 3));

        let lin = phase_function(&PolynomialSpec::parse(&g, "x0").unwrap()).unwrap();
        let r = run_shifted(&lin, 2, &shifts).unwrap();
        assert!((r.zero_probability - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn t3_runs() {
        let g = params(3, 1);
        let one = FunctionTable::constant(&g, Complex64::new(1.0, 0.0)).unwrap();
        assert!((run_t3_circuit(&one).unwrap().zero_probability - 1.0).abs() <= 1e-12);
        let chi = FunctionTable::character(&g, 1).unwrap();
        assert!((run_t3_circuit(&chi).unwrap().zero_probability.sqrt() - 1.0).abs() <= 1e-10);

        let g5 = params(5, 1);
        for mask in [0b00000u32, 0b10110, 0b01001, 0b11111] {
            let tab = FunctionTable::from_fn(&g5, |x| {
                Complex64::new(if mask >> x & 1 == 1 { -1.0 } else { 1.0 }, 0.0)
            })
            .unwrap();
            let exact = t3(&tab, &tab, &tab, true).unwrap();
            let c = run_t3_circuit(&tab).unwrap();
            assert!((c.zero_probability.sqrt() - exact.norm()).abs() <= 1e-10);
            assert_eq!((c.query_count, c.qft_count), (3, 2));
            let h = run_t3_hadamard(&tab).unwrap();
            assert!((h.real_part - exact.re).abs() <= 1e-9);
            assert_eq!((h.query_count, h.qft_count), (3, 0));
        }
        let neg = FunctionTable::constant(&g5, Complex64::new(-1.0, 0.0)).unwrap();
        let s = run_t3_hadamard_sampled(&neg, 2000, 3).unwrap().sampled.unwrap();
        // T(-1) = -1: the ancilla always reads 1
        assert_eq!(s.p0_hat, 0.0);
        assert_eq!(s.real_part_hat, -1.0);
        let two = FunctionTable::constant(&params(2, 2), Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(run_t3_circuit(&two), Err(Error::Domain(_))));
        assert!(matches!(run_t3_hadamard(&two), Err(Error::Domain(_))));
    }
}
