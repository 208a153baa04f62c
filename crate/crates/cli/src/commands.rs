use std::time::Instant;

use gowers_core::ap_counter::{
    estimate_exact, estimate_quantum_t3, query_cost_report, t_from_phase, u2_bounds, Readout, SetInstance,
};
use gowers_core::gowers_circuit::{build_ud_plan, execute_plan, run_shifted, run_ud, run_ud_sampled};
use gowers_core::harmonic::{gowers_norm_bruteforce, gowers_norm_power, t3};
use gowers_core::poly::{certify_farness, certify_farness_sampled, FarnessCertificate, DEFAULT_ENUMERATION_CAP};
use gowers_core::testers::{test_character_two_sided, test_degree_d_exact_vs_random, test_degree_d_far, test_linear, Verdict};
use gowers_core::{FunctionTable, RegisterLayout, StateVector};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{
    self, parse_shifts, parse_sweep, resolve_instance, resolve_set, usage, BenchArgs, Cli, CliError, Command,
    CountArgs, ExperimentConfig, InstanceArgs, MethodArg, NoiseArgs, NormArgs, Resolved, TestCharArgs,
    TestLinearArgs, TestPolyArgs,
};

/// Polynomials tried when exhaustive certification would exceed its cap.
const CERTIFY_SAMPLES: usize = 4096;
/// Slack on the inequalities between zero probability and correlation.
const BOUND_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            passed: value >= bound,
        }
    }

    fn equal(name: &str, value: usize, expected: usize) -> Self {
        Self {
            name: name.into(),
            value: value as f64,
            bound: expected as f64,
            passed: value == expected,
        }
    }
}

/// Everything a subcommand produced, before formatting.
pub struct Report {
    pub config: ExperimentConfig,
    pub lines: Vec<Map<String, Value>>,
    pub checks: Vec<Check>,
    pub accept: Option<bool>,
    /// Column order for CSV; empty when the report has no tabular form.
    pub columns: Vec<&'static str>,
}

impl Report {
    fn single(config: ExperimentConfig, line: Value) -> Self {
        Self {
            config,
            lines: vec![object(line)],
            checks: Vec::new(),
            accept: None,
            columns: Vec::new(),
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => unreachable!("report lines are objects, got {other}"),
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Norm(a) => norm(cli, a),
        Command::TestLinear(a) => test_linear_cmd(cli, a),
        Command::TestPoly(a) => test_poly_cmd(cli, a),
        Command::TestChar(a) => test_char_cmd(cli, a),
        Command::Count3ap(a) => count_3ap(cli, a),
        Command::NoiseDemo(a) => noise_demo(cli, a),
        Command::Bench(a) => bench(cli, a),
    }
}

fn norm(cli: &Cli, a: &NormArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let inst = resolve_instance(&a.instance, &g)?;
    let mut cfg = ExperimentConfig::new(cli, "norm", &a.group);
    cfg.d = Some(a.d);
    cfg.instance = Some(inst.label.clone());
    let f = &inst.table;
    let run = match a.m {
        Some(m) => {
            cfg.m = Some(m);
            cfg.seed = Some(a.seed);
            run_ud_sampled(f, a.d, m, a.seed)?
        }
        None => run_ud(f, a.d)?,
    };
    let brute_power = gowers_norm_power(f, a.d)?;
    let brute_probability = brute_power * brute_power;
    let brute = gowers_norm_bruteforce(f, a.d)?;
    let circuit = run.zero_probability.powf(1.0 / (1u64 << (a.d + 1)) as f64);
    let probability_diff = (run.zero_probability - brute_probability).abs();
    let mut line = json!({
        "kind": "norm",
        "d": a.d,
        "circuit": circuit,
        "brute": brute,
        "diff": (circuit - brute).abs(),
        "probability": run.zero_probability,
        "brute_probability": brute_probability,
        "probability_diff": probability_diff,
        "query_count": run.query_count,
        "qft_count": run.qft_count,
    });
    if let (Some(m), Some(p_hat), Some(ci)) = (run.m, run.p_hat, run.ci) {
        line["sampled"] = json!({ "m": m, "p_hat": p_hat, "ci": ci, "seed": a.seed });
    }
    let mut report = Report::single(cfg, line);
    if cli.check {
        report.checks = vec![
            Check::at_most("probability_diff", probability_diff, 1e-9),
            Check::equal("query_count", run.query_count, 1 << a.d),
            Check::equal("qft_count", run.qft_count, a.d + 1),
        ];
    }
    Ok(report)
}

/// Exhaustive certificate, or a flagged sampled one when enumeration is
/// over its cap.
fn certify(f: &FunctionTable, d: u32, eps: f64, seed: u64) -> Result<(FarnessCertificate, Option<String>), CliError> {
    match certify_farness(f, d, eps, DEFAULT_ENUMERATION_CAP) {
        Ok(c) => Ok((c, None)),
        Err(gowers_core::Error::Size { .. }) => {
            let c = certify_farness_sampled(f, d, eps, CERTIFY_SAMPLES, seed)?;
            let note = format!("ground truth checked {CERTIFY_SAMPLES} sampled polynomials only; 'far' is heuristic");
            Ok((c, Some(note)))
        }
        Err(e) => Err(e.into()),
    }
}

fn attach_truth(verdict: Verdict, truth: Option<(FarnessCertificate, Option<String>)>) -> Verdict {
    match truth {
        None => verdict,
        Some((cert, note)) => {
            let mut v = verdict.with_ground_truth(&cert);
            v.warnings.extend(note);
            v
        }
    }
}

/// Cross-checks shared by all testers: gate counts, certain acceptance of
/// low-degree phases, and the sandwich between zero probability and the
/// best polynomial correlation.
fn tester_checks(v: &Verdict, inst: &Resolved, accept_degree: u32) -> Vec<Check> {
    let order = v.params.order;
    let mut checks = vec![
        Check::equal("query_count", v.query_count, 1 << order),
        Check::equal("qft_count", v.qft_count, order + 1),
    ];
    if inst.poly.as_ref().is_some_and(|p| p.degree() <= accept_degree) {
        checks.push(Check::at_least("phase_zero_probability", v.zero_probability, 1.0 - 1e-9));
        checks.push(Check::at_least("phase_accepted", v.accept as u8 as f64, 1.0));
    }
    if let Some(gt) = &v.ground_truth {
        if (gt.degree as usize) < order {
            let lower = gt.max_correlation.powf(v.params.readout_power as f64);
            checks.push(Check::at_least("correlation_lower_bound", v.zero_probability, lower - BOUND_TOL));
        }
        // At order 2 the zero probability is (sum |f^|^4)^2 <= max |f^|^4.
        if order == 2 && gt.degree == 1 && gt.exhaustive {
            let upper = gt.max_correlation.powi(4);
            checks.push(Check::at_most("fourier_upper_bound", v.zero_probability, upper + BOUND_TOL));
        }
    }
    checks
}

fn verdict_report(cli: &Cli, cfg: ExperimentConfig, v: Verdict, inst: &Resolved, accept_degree: u32) -> Result<Report, CliError> {
    let checks = if cli.check { tester_checks(&v, inst, accept_degree) } else { Vec::new() };
    let mut report = Report::single(cfg, serde_json::to_value(&v)?);
    report.accept = Some(v.accept);
    report.checks = checks;
    Ok(report)
}

fn tester_config(cli: &Cli, name: &str, a: &config::GroupArgs, inst: &Resolved, eta: f64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(cli, name, a);
    cfg.instance = Some(inst.label.clone());
    cfg.eta = Some(eta);
    cfg.seed = Some(seed);
    cfg
}

fn test_linear_cmd(cli: &Cli, a: &TestLinearArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let inst = resolve_instance(&a.instance, &g)?;
    let mut cfg = tester_config(cli, "test-linear", &a.group, &inst, a.eta, a.seed);
    cfg.eps = Some(a.eps);
    cfg.certify = a.certify;
    let v = test_linear(&inst.table, a.eps, a.eta, a.seed)?;
    let truth = if a.certify { Some(certify(&inst.table, 1, a.eps, a.seed)?) } else { None };
    verdict_report(cli, cfg, attach_truth(v, truth), &inst, 1)
}

fn test_poly_cmd(cli: &Cli, a: &TestPolyArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let inst = resolve_instance(&a.instance, &g)?;
    let mut cfg = tester_config(cli, "test-poly", &a.group, &inst, a.eta, a.seed);
    cfg.d = Some(a.d);
    cfg.gap = a.gap;
    cfg.eps = a.eps;
    cfg.certify = a.certify;
    cfg.allow_out_of_regime = a.allow_out_of_regime;
    let v = match a.gap {
        Some(gap) => test_degree_d_far(&inst.table, a.d, gap, a.eta, a.seed, a.allow_out_of_regime)?,
        None => test_degree_d_exact_vs_random(&inst.table, a.d, a.eta, a.seed)?,
    };
    let truth = if a.certify {
        let eps = a.eps.ok_or_else(|| usage("--certify on test-poly needs --eps"))?;
        let d = u32::try_from(a.d).map_err(|_| usage("degree too large"))?;
        Some(certify(&inst.table, d, eps, a.seed)?)
    } else {
        None
    };
    verdict_report(cli, cfg, attach_truth(v, truth), &inst, a.d as u32)
}

fn test_char_cmd(cli: &Cli, a: &TestCharArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let inst = resolve_instance(&a.instance, &g)?;
    let mut cfg = tester_config(cli, "test-char", &a.group, &inst, a.eta, a.seed);
    cfg.eps1 = Some(a.eps1);
    cfg.eps2 = Some(a.eps2);
    cfg.certify = a.certify;
    let v = test_character_two_sided(&inst.table, a.eps1, a.eps2, a.eta, a.seed)?;
    let truth = if a.certify { Some(certify(&inst.table, 1, a.eps2, a.seed)?) } else { None };
    verdict_report(cli, cfg, attach_truth(v, truth), &inst, 1)
}

fn count_3ap(cli: &Cli, a: &CountArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let (s, label) = resolve_set(&a.set, &g)?;
    let mut cfg = ExperimentConfig::new(cli, "count-3ap", &a.group);
    cfg.set = Some(label);
    cfg.method = Some(a.method.name().to_string());
    cfg.eps = a.eps;
    let est = match a.method {
        MethodArg::Exact => estimate_exact(&s)?,
        MethodArg::Bounds => u2_bounds(&s)?,
        MethodArg::Quantum => {
            let readout = match a.m {
                Some(m) => {
                    cfg.m = Some(m);
                    cfg.seed = Some(a.seed);
                    Readout::Sampled { m, seed: a.seed }
                }
                None => Readout::Exact,
            };
            estimate_quantum_t3(&s, readout)?
        }
    };
    let mut line = serde_json::to_value(&est)?;
    line["kind"] = json!("count_3ap");
    line["count_nontrivial"] = json!(est.count - s.size() as f64);
    if let Some(eps) = a.eps {
        line["cost"] = serde_json::to_value(query_cost_report(&s, eps)?)?;
    }
    let mut report = Report::single(cfg, line);
    if cli.check {
        report.checks = count_checks(&s, a.method, &est)?;
    }
    Ok(report)
}

fn count_checks(
    s: &SetInstance,
    method: MethodArg,
    est: &gowers_core::ap_counter::ApEstimate,
) -> Result<Vec<Check>, CliError> {
    let exact = estimate_exact(s)?;
    let n2 = (s.params().order() as f64).powi(2);
    // The sampled path is statistical; its deterministic twin is checked instead.
    let quantum = estimate_quantum_t3(s, Readout::Exact)?;
    let t_g = t3(s.phase(), s.phase(), s.phase(), false)?.re;
    let u2 = gowers_norm_bruteforce(s.indicator(), 2)?;
    let mut checks = vec![
        Check::at_most("quantum_count_diff", (quantum.count - exact.count).abs(), 1e-6 * n2),
        Check::at_most("conversion_residual", (t_from_phase(s.density(), t_g) - exact.t_f).abs(), 1e-10),
        Check::at_most("u2_bound", exact.t_f.abs(), u2 * u2 + 1e-10),
    ];
    if method == MethodArg::Bounds {
        checks.push(Check::at_least("interval_contains_exact", est.contains(exact.t_f, 1e-10) as u8 as f64, 1.0));
    }
    Ok(checks)
}

fn noise_demo(cli: &Cli, a: &NoiseArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let inst = resolve_instance(&a.instance, &g)?;
    let shifts = parse_shifts(&a.shifts, &g)?;
    if shifts.len() != a.d + 1 {
        return Err(usage(format!("--shifts needs d + 1 = {} entries, got {}", a.d + 1, shifts.len())));
    }
    let mut cfg = ExperimentConfig::new(cli, "noise-demo", &a.group);
    cfg.d = Some(a.d);
    cfg.instance = Some(inst.label.clone());
    cfg.shifts = Some(shifts.iter().map(|s| s.linear_index()).collect());
    cfg.top = Some(a.top);

    let f = &inst.table;
    let shifted = run_shifted(f, a.d, &shifts)?;
    let base = run_ud(f, a.d)?;

    let layout = RegisterLayout::new(&g, a.d + 1, false)?;
    let mut state = StateVector::init_basis(&layout, &shifts)?;
    for k in 0..=a.d {
        state.apply_qft(k, false)?;
    }
    execute_plan(&build_ud_plan(a.d)?, &mut state, |_| f, false)?;
    let dist = state.distribution();
    let mut ranked: Vec<usize> = (0..dist.len()).collect();
    ranked.sort_by(|&x, &y| dist[y].total_cmp(&dist[x]).then(x.cmp(&y)));
    let peaks: Vec<Value> = ranked
        .iter()
        .take(a.top)
        .map(|&i| {
            let (regs, _) = layout.split_index(i);
            let coords: Vec<String> = regs
                .iter()
                .map(|&r| g.vector_from_index(r).map(|v| v.to_string()))
                .collect::<Result<_, _>>()
                .expect("split indices lie in the group");
            json!({
                "registers": regs,
                "coords": coords,
                "probability": dist[i],
                "expected": regs == shifted.peak,
            })
        })
        .collect();
    let max = dist.iter().copied().fold(0.0, f64::max);
    let line = json!({
        "kind": "noise_demo",
        "d": a.d,
        "expected_peak": shifted.peak,
        "peak_probability": shifted.zero_probability,
        "unshifted_probability": base.zero_probability,
        "max_probability": max,
        "peaks": peaks,
        "query_count": shifted.query_count,
        "qft_count": shifted.qft_count,
    });
    let mut report = Report::single(cfg, line);
    if cli.check {
        report.checks = vec![
            Check::at_most(
                "peak_vs_unshifted",
                (shifted.zero_probability - base.zero_probability).abs(),
                1e-12,
            ),
            Check::equal("query_count", shifted.query_count, 1 << a.d),
            Check::equal("qft_count", shifted.qft_count, a.d + 1),
        ];
        // For d >= 2 the relocated peak is also the global maximum.
        if a.d >= 2 {
            report.checks.push(Check::at_most("peak_is_maximum", max - shifted.zero_probability, 1e-12));
        }
    }
    Ok(report)
}

fn has_instance(a: &InstanceArgs) -> bool {
    a.poly.is_some() || a.table.is_some() || a.random.is_some()
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<Report, CliError> {
    let g = config::group(cli, &a.group)?;
    let [lo, hi] = parse_sweep(&a.sweep)?;
    let (f, label) = if has_instance(&a.instance) {
        let inst = resolve_instance(&a.instance, &g)?;
        (inst.table, inst.label)
    } else {
        (FunctionTable::constant(&g, Complex64::new(1.0, 0.0))?, "constant:1".to_string())
    };
    let mut cfg = ExperimentConfig::new(cli, "bench", &a.group);
    cfg.instance = Some(label);
    cfg.sweep = Some([lo, hi]);
    let mut lines = Vec::new();
    let mut checks = Vec::new();
    for d in lo..=hi {
        let amplitudes = g.product_size(d + 1, "bench state")?;
        let start = Instant::now();
        let run = run_ud(&f, d)?;
        let wall_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
        lines.push(object(json!({
            "d": d,
            "amplitudes": amplitudes,
            "wall_ms": wall_ms,
            "queries": run.query_count,
        })));
        if cli.check {
            checks.push(Check::equal(&format!("query_count_d{d}"), run.query_count, 1 << d));
            checks.push(Check::equal(&format!("qft_count_d{d}"), run.qft_count, d + 1));
        }
    }
    Ok(Report {
        config: cfg,
        lines,
        checks,
        accept: None,
        columns: vec!["d", "amplitudes", "wall_ms", "queries"],
    })
}
