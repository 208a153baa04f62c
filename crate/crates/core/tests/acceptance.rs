//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so every line is printed even when an
//! earlier criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gowers_core::ap_counter::{estimate_exact, estimate_quantum_t3, t_from_phase, u2_bounds, Readout, SetInstance};
use gowers_core::gowers_circuit::{build_t3_plan, execute_plan, build_ud_plan, run_shifted, run_t3_circuit, run_ud};
use gowers_core::harmonic::{fourier, gowers_norm_power, gowers_u3_via_fourier, t3, FunctionTable};
use gowers_core::poly::{certify_farness, haar_random_function, phase_function, random_polynomial, PolynomialSpec, DEFAULT_ENUMERATION_CAP};
use gowers_core::testers::{plan_samples, test_character_two_sided, test_linear, Verdict};
use gowers_core::{GroupParams, GroupVector, RegisterLayout, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Query/QFT tallies of every circuit run, checked by criterion 9.
#[derive(Default)]
struct Ledger {
    runs: usize,
    mismatches: Vec<String>,
}

impl Ledger {
    fn record(&mut self, what: &str, got: (usize, usize), want: (usize, usize)) {
        self.runs += 1;
        if got != want && self.mismatches.len() < 5 {
            self.mismatches.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    }

    fn verdict(&mut self, what: &str, v: &Verdict) {
        let order = v.params.order;
        self.record(what, (v.query_count, v.qft_count), (1 << order, order + 1));
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const GRID: [(u64, usize, std::ops::RangeInclusive<usize>); 6] = [
    (2, 1, 1..=4),
    (2, 2, 1..=4),
    (2, 3, 1..=3),
    (3, 1, 1..=3),
    (3, 2, 1..=2),
    (5, 1, 1..=2),
];

fn grid() -> impl Iterator<Item = (GroupParams, usize)> {
    GRID.into_iter()
        .flat_map(|(p, n, ds)| ds.map(move |d| (GroupParams::new(p, n).unwrap(), d)))
}

fn circuit_vs_bruteforce(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let (mut worst, mut runs) = (0.0f64, 0);
    for (g, d) in grid() {
        for seed in 0..20 {
            let f = haar_random_function(&g, 1_000 + seed).unwrap();
            let run = run_ud(&f, d).unwrap();
            ledger.record("U^d run", (run.query_count, run.qft_count), (1 << d, d + 1));
            let brute = gowers_norm_power(&f, d).unwrap();
            worst = worst.max((run.zero_probability - brute * brute).abs());
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed <= Duration::from_secs(120),
        format!("{runs} runs, max |zero_probability - brute^2| = {worst:.2e}"),
    )
}

fn phase_polynomials_have_norm_one(ledger: &mut Ledger) -> Outcome {
    let (mut worst, mut runs) = (0.0f64, 0);
    for (g, d) in grid() {
        let degree = ((d - 1) as u32).min(3).min(g.n() as u32 * (g.p() - 1));
        for seed in 0..50 {
            let poly = random_polynomial(&g, degree, 2_000 + seed).unwrap();
            let run = run_ud(&phase_function(&poly).unwrap(), d).unwrap();
            ledger.record("U^d run", (run.query_count, run.qft_count), (1 << d, d + 1));
            worst = worst.max((run.zero_probability - 1.0).abs());
            runs += 1;
        }
    }
    outcome(worst <= 1e-9, format!("{runs} phase polynomials, max |zero_probability - 1| = {worst:.2e}"))
}

fn random_table(g: &GroupParams, rng: &mut ChaCha8Rng) -> FunctionTable {
    FunctionTable::from_fn(g, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
}

fn fourier_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u2_groups = [(2u64, 1usize), (2, 3), (2, 6), (3, 2), (3, 4), (5, 2), (7, 2), (3, 3)];
    let u3_groups = [(2u64, 2usize), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (13, 1), (2, 3)];
    let (mut u2_err, mut u3_err) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let (p, n) = u2_groups[i % u2_groups.len()];
        let f = random_table(&GroupParams::new(p, n).unwrap(), &mut rng);
        let quartic: f64 = fourier(&f).unwrap().coeffs().iter().map(|c| c.norm_sqr().powi(2)).sum();
        u2_err = u2_err.max((gowers_norm_power(&f, 2).unwrap() - quartic).abs());

        let (p, n) = u3_groups[i % u3_groups.len()];
        let f = random_table(&GroupParams::new(p, n).unwrap(), &mut rng);
        let brute = gowers_norm_power(&f, 3).unwrap();
        u3_err = u3_err.max((brute - gowers_u3_via_fourier(&f).unwrap().powi(8)).abs());
    }
    outcome(
        u2_err <= 1e-10 && u3_err <= 1e-9,
        format!("U^2 max error {u2_err:.2e} (100 tables, N <= 81); U^3 max error {u3_err:.2e} (100 tables, N <= 16)"),
    )
}

fn haar_baseline(ledger: &mut Ledger) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (p, n) in [(2u64, 4usize), (3, 2)] {
        let g = GroupParams::new(p, n).unwrap();
        let bound = 2.0 / g.order() as f64;
        let (mut circuit, mut fourth) = (0.0, 0.0);
        for seed in 0..200 {
            let f = haar_random_function(&g, 4_000 + seed).unwrap();
            let run = run_ud(&f, 2).unwrap();
            ledger.record("U^2 run", (run.query_count, run.qft_count), (4, 3));
            circuit += run.zero_probability;
            fourth += run.zero_probability.sqrt();
        }
        let (circuit, fourth) = (circuit / 200.0, fourth / 200.0);
        pass &= circuit <= bound;
        parts.push(format!(
            "F_{p}^{n}: mean circuit probability {circuit:.4} <= {bound:.4} (mean ||f||_U2^4 = {fourth:.4})"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn linearity_tester(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let eps = 0.9;
    let eta = 0.05;
    let mut accepted = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let groups = [(2u64, 3usize), (3, 2), (5, 1), (2, 4), (7, 1)];
    for i in 0..50 {
        let (p, n) = groups[i % groups.len()];
        let g = GroupParams::new(p, n).unwrap();
        let coeffs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..g.p())).collect();
        let mut lin = PolynomialSpec::linear(&g, &coeffs).unwrap();
        let c = rng.gen_range(0..g.p()) as u64;
        lin = lin.add(&PolynomialSpec::new(&g, [(vec![0; n], c)]).unwrap()).unwrap();
        let v = test_linear(&phase_function(&lin).unwrap(), eps, eta, i as u64).unwrap();
        ledger.verdict("linear tester", &v);
        accepted += v.accept as usize;
    }

    let g = GroupParams::new(2, 3).unwrap();
    let (mut tested, mut rejected, mut seed) = (0, 0, 50_000u64);
    let mut m = 0;
    while tested < 200 {
        let f = haar_random_function(&g, seed).unwrap();
        seed += 1;
        if !certify_farness(&f, 1, eps, DEFAULT_ENUMERATION_CAP).unwrap().far {
            continue;
        }
        tested += 1;
        let v = test_linear(&f, eps, eta, seed).unwrap();
        ledger.verdict("linear tester", &v);
        m = v.m;
        rejected += !v.accept as usize;
    }
    let rate = rejected as f64 / 200.0;
    let elapsed = start.elapsed();
    outcome(
        accepted == 50 && rate >= 0.95 && elapsed <= Duration::from_secs(300) && m == plan_samples(1.0 - eps.powi(4), eta).unwrap().m,
        format!("completeness {accepted}/50; soundness {rejected}/200 rejected (rate {rate:.3}, m = {m})"),
    )
}

fn max_fourier(f: &FunctionTable) -> f64 {
    fourier(f).unwrap().max_modulus().1
}

fn two_sided_tester(ledger: &mut Ledger) -> Outcome {
    let (eps1, eps2, eta) = (0.9, 0.2, 0.05);
    let g = GroupParams::new(2, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let mut yes_errors = 0;
    let mut yes = 0;
    while yes < 100 {
        let gamma = rng.gen_range(0..g.order());
        let mut f = FunctionTable::character(&g, gamma).unwrap();
        for _ in 0..rng.gen_range(0..=3) {
            let x = rng.gen_range(0..g.order());
            let v = f.get(x);
            f.set(x, -v);
        }
        if max_fourier(&f) <= eps1 {
            continue;
        }
        yes += 1;
        let v = test_character_two_sided(&f, eps1, eps2, eta, 100 + yes as u64).unwrap();
        ledger.verdict("character tester", &v);
        yes_errors += !v.accept as usize;
    }

    let (mut no, mut no_errors, mut seed) = (0, 0, 0u64);
    while no < 100 {
        let f = phase_function(&random_polynomial(&g, 2, 7_000 + seed).unwrap()).unwrap();
        seed += 1;
        if max_fourier(&f) >= eps2 {
            continue;
        }
        no += 1;
        let v = test_character_two_sided(&f, eps1, eps2, eta, 200 + no as u64).unwrap();
        ledger.verdict("character tester", &v);
        no_errors += v.accept as usize;
    }
    let (ry, rn) = (yes_errors as f64 / 100.0, no_errors as f64 / 100.0);
    outcome(
        ry <= eta && rn <= eta,
        format!("F_2^6: YES error rate {ry:.2} ({yes_errors}/100), NO error rate {rn:.2} ({no_errors}/100)"),
    )
}

fn ap_pipeline(ledger: &mut Ledger) -> Outcome {
    let g = GroupParams::new(3, 2).unwrap();
    let n2 = 81.0;
    let mut sets = vec![
        SetInstance::from_members(&g, &[]).unwrap(),
        SetInstance::from_members(&g, &(0..9).collect::<Vec<_>>()).unwrap(),
    ];
    sets.extend((0..100).map(|seed| SetInstance::random(&g, 0.5, 9_000 + seed).unwrap()));
    let (mut count_err, mut identity_err, mut bound_fail, mut lower_violations) = (0.0f64, 0.0f64, 0, 0);
    let t3_plan = build_t3_plan();
    for s in &sets {
        let exact = estimate_exact(s).unwrap();
        let q = estimate_quantum_t3(s, Readout::Exact).unwrap();
        // the Hadamard test has no QFTs; only its oracle calls are compared
        ledger.record("T3 Hadamard test", (q.diagnostics.query_count.unwrap(), 0), (t3_plan.query_count, 0));
        count_err = count_err.max((q.count - exact.count).abs());

        let tf = t3(s.indicator(), s.indicator(), s.indicator(), false).unwrap().re;
        let tg = t3(s.phase(), s.phase(), s.phase(), false).unwrap().re;
        identity_err = identity_err.max((t_from_phase(s.density(), tg) - tf).abs());

        let c = run_t3_circuit(s.phase()).unwrap();
        ledger.record("T3 circuit", (c.query_count, c.qft_count), (t3_plan.query_count, t3_plan.qft_count));

        let b = u2_bounds(s).unwrap();
        let u2 = b.diagnostics.u2_indicator.unwrap();
        if tf.abs() > u2 * u2 + 1e-10 {
            bound_fail += 1;
        }
        lower_violations += b.diagnostics.lower_bound_violated.unwrap() as usize;
    }
    outcome(
        count_err <= 1e-9 * n2 && identity_err <= 1e-10 && bound_fail == 0,
        format!(
            "{} sets over F_3^2: max count error {count_err:.2e}, identity residual {identity_err:.2e}, \
             |T| <= ||f||_U2^2 failures {bound_fail} (lower-bound flags raised: {lower_violations})",
            sets.len()
        ),
    )
}

fn noise_invariance(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst, mut misplaced, mut runs) = (0.0f64, 0, 0);
    let d = 2;
    for (p, n) in [(3u64, 1usize), (2, 2)] {
        let g = GroupParams::new(p, n).unwrap();
        let layout = RegisterLayout::new(&g, d + 1, false).unwrap();
        for seed in 0..50 {
            let f = haar_random_function(&g, 11_000 + seed).unwrap();
            let shifts: Vec<GroupVector> =
                (0..=d).map(|_| g.vector_from_index(rng.gen_range(0..g.order())).unwrap()).collect();
            let base = run_ud(&f, d).unwrap();
            let r = run_shifted(&f, d, &shifts).unwrap();
            ledger.record("shifted run", (r.query_count, r.qft_count), (1 << d, d + 1));
            worst = worst.max((r.zero_probability - base.zero_probability).abs());

            let mut s = StateVector::init_basis(&layout, &shifts).unwrap();
            for k in 0..=d {
                s.apply_qft(k, false).unwrap();
            }
            execute_plan(&build_ud_plan(d).unwrap(), &mut s, |_| &f, false).unwrap();
            let max = s.distribution().into_iter().fold(0.0, f64::max);
            let expected: Vec<usize> = shifts.iter().map(|v| v.neg().linear_index()).collect();
            if r.peak != expected || (max - r.zero_probability).abs() > 1e-12 {
                misplaced += 1;
            }
            runs += 1;
        }
    }
    outcome(
        worst <= 1e-12 && misplaced == 0,
        format!("{runs} shifted runs: peak off the negated shifts {misplaced}, max |peak - unshifted| = {worst:.2e}"),
    )
}

type Criterion = fn(&mut Ledger) -> Outcome;

fn main() -> ExitCode {
    let mut ledger = Ledger::default();
    let criteria: [(&str, Criterion); 8] = [
        ("circuit-oracle equivalence", circuit_vs_bruteforce),
        ("phase polynomials have norm 1", phase_polynomials_have_norm_one),
        ("U^2 / U^3 Fourier identities", |_| fourier_identities()),
        ("Haar baseline", haar_baseline),
        ("linearity tester", linearity_tester),
        ("two-sided character tester", two_sided_tester),
        ("3-AP pipeline", ap_pipeline),
        ("noise invariance", noise_invariance),
    ];
    let mut failed = 0;
    let mut report = |i: usize, name: &str, o: Outcome, elapsed: Duration| {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {i} [{name}]: {status} — {} ({:.1} s)", o.detail, elapsed.as_secs_f64());
        failed += !o.pass as usize;
    };
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = run(&mut ledger);
        report(i + 1, name, o, start.elapsed());
    }
    let accounting = outcome(
        ledger.mismatches.is_empty(),
        if ledger.mismatches.is_empty() {
            format!("{} circuit runs, every counter matches its plan", ledger.runs)
        } else {
            ledger.mismatches.join("; ")
        },
    );
    report(9, "query accounting", accounting, Duration::ZERO);

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
