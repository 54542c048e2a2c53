//! Scenario runners: the library's applications at desk scale, each emitting
//! a machine-readable [`ScenarioReport`].
//!
//! All randomness flows from a single seed; reports are byte-stable for a
//! fixed seed and version. The `negative_control` flag mutates the claim
//! under test (unattainably tight tolerances, or a non-convergent operator
//! sequence), so the verification machinery must fail and the exit-code
//! contract kicks in.

use std::sync::Arc;

use num::rational::Rational64;
use rand::Rng as _;

use crate::convergence::{lattice_cauchy_gap, un_distance};
use crate::diagonal::{
    certified_tail_values, run_diagonal_with_chain, EpsPlan, VerifyPlan,
};
use crate::element::Element;
use crate::error::Result;
use crate::extractors::{
    norm2, sup_distance, BallTailExtractor, CoordinateExtractor, Extractor, FunctionalExtractor,
    Matrix, MetricFn, Observable, OperatorImageExtractor,
};
use crate::directed::{naturals, ProductDirectedSet};
use crate::nets::{Net, ValueSpace};
use crate::oracle::{oracle_sweep, OracleConfig};
use crate::report::{CheckResult, OracleReport, ScenarioReport};
use crate::rng;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const SQRT2_FRAC: f64 = 0.414_213_562_373_095_1;

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn nat_of(e: &Element) -> u64 {
    e.as_nat().unwrap_or(0)
}

/// Verification knobs shared by the demo scenarios.
#[derive(Clone, Copy, Debug)]
pub struct DemoOptions {
    pub seed: u64,
    pub samples: usize,
    pub budget: usize,
    pub negative_control: bool,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            seed: 0,
            samples: 1000,
            budget: crate::extractors::DEFAULT_BUDGET,
            negative_control: false,
        }
    }
}

// ---------------------------------------------------------------------------
// product compactness
// ---------------------------------------------------------------------------

/// Net in `[0,1]^N` over ℕ x ℕ whose coordinates never converge: coordinate
/// `k` follows the golden rotation of `t = m + n`, phase-shifted per `k`.
/// One scalar orbit drives every coordinate, which keeps deep joint tails
/// findable by budgeted search.
fn product_demo_net(coords: usize) -> Net<Vec<f64>> {
    let index = ProductDirectedSet::new(vec![naturals(), naturals()]);
    Net::new(index, ValueSpace::Metric, move |e| {
        let parts = e.as_tuple().unwrap();
        let t = (nat_of(&parts[0]) + nat_of(&parts[1])) as f64;
        Ok((1..=coords)
            .map(|k| frac(GOLDEN * t + 0.37 * k as f64))
            .collect())
    })
}

/// Coordinate extraction on the first `coords` coordinates of an adversarial
/// net in the countable product of unit intervals.
pub fn product_compactness(
    coords: usize,
    m_max: usize,
    eps: f64,
    opts: &DemoOptions,
) -> ScenarioReport {
    let mut report = ScenarioReport::new("product-compactness", opts.seed);
    report.param("coords", coords);
    report.param("m_max", m_max);
    report.param("eps", eps);
    report.param("negative_control", opts.negative_control);

    let net = product_demo_net(coords);
    // every stage roughly halves the index density of the joint tail, so
    // deeper searches get proportionally larger budgets
    let extractors: Vec<Arc<dyn Extractor<Vec<f64>>>> = (1..=coords)
        .map(|k| {
            let obs: Observable<Vec<f64>> = Arc::new(move |v: &Vec<f64>| v[k - 1]);
            let budget = opts.budget.saturating_mul(1 << (k - 1).min(12));
            Arc::new(
                CoordinateExtractor::new(&format!("coordinate {k}"), obs, 0.0, 1.0, m_max)
                    .with_budget(budget),
            ) as Arc<dyn Extractor<Vec<f64>>>
        })
        .collect();

    let mut plan = VerifyPlan::fixed(vec![eps], opts.samples, opts.seed);
    if opts.negative_control {
        plan.tighten = 1e-6;
    }
    let (diag, _) = run_diagonal_with_chain(&net, extractors, coords, &plan);
    report.diagonal = Some(diag);
    report.finalize();
    report
}

// ---------------------------------------------------------------------------
// metric compactness
// ---------------------------------------------------------------------------

fn sup_metric() -> MetricFn<Vec<f64>> {
    Arc::new(|a: &Vec<f64>, b: &Vec<f64>| sup_distance(a, b))
}

/// Sup-metric cover of the unit square by balls of the given radius.
fn square_cover(radius: f64) -> Vec<Vec<f64>> {
    let cells = (1.0 / (2.0 * radius)).ceil().max(1.0) as usize;
    let mut centers = Vec::with_capacity(cells * cells);
    for i in 0..cells {
        for j in 0..cells {
            centers.push(vec![
                ((2 * i + 1) as f64 * radius).min(1.0),
                ((2 * j + 1) as f64 * radius).min(1.0),
            ]);
        }
    }
    centers
}

/// Totally bounded + complete at desk scale: a dense orbit in the unit
/// square squeezed through ball tails of radius 1/k for k = 1..=k_max; the
/// diagonal tail beyond the stage-k anchor is Cauchy with gap <= 2/k.
pub fn metric_compactness(k_max: usize, opts: &DemoOptions) -> ScenarioReport {
    let mut report = ScenarioReport::new("metric-compactness", opts.seed);
    report.param("k_max", k_max);
    report.param("negative_control", opts.negative_control);

    let net = Net::new(naturals(), ValueSpace::Metric, |e| {
        let n = nat_of(e) as f64;
        Ok(vec![frac(n * GOLDEN), frac(n * SQRT2_FRAC)])
    });

    let extractors: Vec<Arc<dyn Extractor<Vec<f64>>>> = (1..=k_max)
        .map(|k| {
            let radius = 1.0 / k as f64;
            Arc::new(
                BallTailExtractor::new(
                    &format!("ball tail radius 1/{k}"),
                    sup_metric(),
                    square_cover(radius),
                    radius,
                )
                .with_budget(opts.budget),
            ) as Arc<dyn Extractor<Vec<f64>>>
        })
        .collect();

    let grids: Vec<Vec<f64>> = (1..=k_max).map(|k| vec![1.0 / k as f64]).collect();
    let mut plan = VerifyPlan {
        eps: EpsPlan::PerLevel(grids),
        samples_per_eps: opts.samples,
        seed: opts.seed,
        tighten: 1.0,
    };
    if opts.negative_control {
        plan.tighten = 1e-6;
    }
    let (diag, chain) = run_diagonal_with_chain(&net, extractors, k_max, &plan);

    // Cauchy gap: sampled pairs in the stage-k certified tail stay within
    // 2/k of each other.
    if let Some(chain) = &chain {
        for k in 1..=k_max {
            let eps = 1.0 / k as f64;
            match certified_tail_values(chain, k, eps, 2 * (opts.samples / 10).max(10), opts.seed)
            {
                Ok(values) => {
                    let worst = values
                        .chunks(2)
                        .filter(|c| c.len() == 2)
                        .map(|c| sup_distance(&c[0], &c[1]))
                        .fold(0.0f64, f64::max);
                    report.checks.push(CheckResult::le(
                        &format!("cauchy-gap-stage-{k}"),
                        format!("pairwise gap beyond the stage-{k} anchor <= 2/{k}"),
                        worst,
                        2.0 / k as f64,
                    ));
                }
                Err(e) => report.checks.push(CheckResult::flag(
                    &format!("cauchy-gap-stage-{k}"),
                    format!("tail sampling failed: {e}"),
                    false,
                )),
            }
        }
    }
    report.diagonal = Some(diag);
    report.finalize();
    report
}

// ---------------------------------------------------------------------------
// Banach-Alaoglu
// ---------------------------------------------------------------------------

/// Deterministic dense points with varied norms.
fn dense_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|j| {
            let scale = 0.5 + 0.5 * frac(GOLDEN * (j as f64 + 1.0));
            (0..dim)
                .map(|i| {
                    let raw = frac(0.71 * (j as f64 + 1.0) + 0.29 * i as f64) - 0.5;
                    scale * (raw + if i == j % dim { 0.8 } else { 0.0 })
                })
                .collect()
        })
        .collect()
}

/// Net of unit-sphere functionals on ℝ^d (d >= 2): a rotating orbit, dense
/// on a great circle.
fn functional_net(dim: usize) -> Net<Vec<f64>> {
    Net::new(naturals(), ValueSpace::Functional, move |e| {
        let theta = nat_of(e) as f64 * GOLDEN * std::f64::consts::TAU;
        let mut y = vec![0.0; dim];
        y[0] = theta.cos();
        y[1] = theta.sin();
        Ok(y)
    })
}

/// Weak* compactness of the dual unit ball at desk scale: extract pointwise
/// convergence on finitely many dense points and check that the limit
/// functional stays inside the ball.
pub fn alaoglu(dim: usize, dense: usize, m_max: usize, opts: &DemoOptions) -> ScenarioReport {
    let mut report = ScenarioReport::new("alaoglu", opts.seed);
    report.param("dim", dim);
    report.param("dense", dense);
    report.param("m_max", m_max);
    report.param("negative_control", opts.negative_control);
    if dim < 2 {
        report.checks.push(CheckResult::flag(
            "dimension",
            "functional net needs dim >= 2".into(),
            false,
        ));
        report.finalize();
        return report;
    }

    let net = functional_net(dim);
    let points = dense_points(dim, dense);
    let extractors: Vec<Arc<dyn Extractor<Vec<f64>>>> = points
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let budget = opts.budget.saturating_mul(1 << j.min(12));
            Arc::new(FunctionalExtractor::new(x.clone(), j + 1, m_max).with_budget(budget))
                as Arc<dyn Extractor<Vec<f64>>>
        })
        .collect();

    let mut plan = VerifyPlan::fixed(vec![1e-2], opts.samples, opts.seed);
    if opts.negative_control {
        plan.tighten = 1e-6;
    }
    let (diag, chain) = run_diagonal_with_chain(&net, extractors, dense, &plan);

    // |y*(x)| <= ||x|| at every dense point: the limit stays in the ball
    if let Some(chain) = &chain {
        for (j, x) in points.iter().enumerate() {
            let level = j + 1;
            if let Ok(stage) = chain.stage(level) {
                if let Some(cert) = stage.certificate {
                    if let Some(&limit) = cert.limit_values.first() {
                        report.checks.push(CheckResult::le(
                            &format!("ball-bound-point-{level}"),
                            format!("|limit evaluation at dense point {level}| <= norm"),
                            limit.abs(),
                            norm2(x) + 1e-9,
                        ));
                    }
                }
            }
        }
    }
    report.diagonal = Some(diag);
    report.finalize();
    report
}

// ---------------------------------------------------------------------------
// un-closedness
// ---------------------------------------------------------------------------

pub struct UnClosednessParams {
    pub dim: usize,
    pub ops: usize,
    pub eps: f64,
    pub m_max: usize,
}

impl Default for UnClosednessParams {
    fn default() -> Self {
        UnClosednessParams {
            dim: 3,
            ops: 6,
            eps: 1e-3,
            m_max: 16,
        }
    }
}

/// The closedness argument for un-compact operators at desk scale:
/// operators `T_n = T + 2^{-n} S` on ℝ^d, a bounded net, one image
/// extraction per operator; then the Cauchy estimate on the stage limits
/// `z_n`, the limsup bound, and convergence of `T y` to the final limit.
pub fn un_closedness(params: &UnClosednessParams, opts: &DemoOptions) -> ScenarioReport {
    let mut report = ScenarioReport::new("un-closedness", opts.seed);
    report.param("dim", params.dim);
    report.param("ops", params.ops);
    report.param("eps", params.eps);
    report.param("m_max", params.m_max);
    report.param("negative_control", opts.negative_control);

    let d = params.dim;
    let n_ops = params.ops;

    // deterministic T with operator norm 1 and a small diagonal S
    let mut trng = rng::rng_at(opts.seed, 0x7);
    let mut rows: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| trng.gen_range(-0.5..0.5)).collect())
        .collect();
    let norm: f64 = rows
        .iter()
        .map(|r| r.iter().map(|x: &f64| x.abs()).sum())
        .fold(f64::MIN, f64::max);
    for r in &mut rows {
        for x in r.iter_mut() {
            *x /= norm;
        }
    }
    let t = Matrix::new(rows);
    let s_scale = 0.02;
    let s = {
        let mut rows = vec![vec![0.0; d]; d];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = if i == 0 { s_scale } else { s_scale / 2.0 };
        }
        Matrix::new(rows)
    };

    // T_n = T + c_n S; the negative control makes the sequence non-convergent
    let coeff = |n: usize| -> f64 {
        if opts.negative_control {
            if n % 2 == 0 {
                2.5
            } else {
                -2.5
            }
        } else {
            0.5f64.powi(n as i32)
        }
    };
    let t_n: Vec<Matrix> = (1..=n_ops).map(|n| t.add_scaled(&s, coeff(n))).collect();

    // bounded net converging to y_star, with a norm-1 value at the base point
    let y_star: Vec<f64> = (0..d)
        .map(|i| [0.5, 0.9, -0.7][i % 3] * if i >= 3 { 0.5 } else { 1.0 })
        .collect();
    let spike: Vec<f64> = (0..d).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    let ys = y_star.clone();
    let sp = spike.clone();
    let net = Net::new(naturals(), ValueSpace::LatticeRd, move |e| {
        let n = nat_of(e);
        if n == 0 {
            return Ok(sp.clone());
        }
        let decay = 0.5f64.powf((n as f64).min(60.0));
        Ok(ys
            .iter()
            .zip(&sp)
            .map(|(a, b)| a + decay * (b - a))
            .collect())
    });

    // M = sup of sampled value norms; the base point is always included
    let mut m_bound = sup_norm_of(&net, &Element::nat(0));
    let mut mrng = rng::rng_at(opts.seed, 0x51);
    for _ in 0..opts.samples {
        if let Ok(e) = net.index.sample(&mut mrng) {
            m_bound = m_bound.max(sup_norm_of(&net, &e));
        }
    }
    report.param("value_bound", crate::report::fmt_f64(m_bound));

    let truncation = vec![1.0; d];
    let extractors: Vec<Arc<dyn Extractor<Vec<f64>>>> = t_n
        .iter()
        .enumerate()
        .map(|(i, tn)| {
            Arc::new(OperatorImageExtractor::new(
                &format!("operator {}", i + 1),
                tn.clone(),
                truncation.clone(),
                m_bound,
                params.m_max,
            )) as Arc<dyn Extractor<Vec<f64>>>
        })
        .collect();
    let resolution =
        OperatorImageExtractor::new("r", t.clone(), truncation.clone(), m_bound, params.m_max)
            .resolution();
    report.param("resolution", crate::report::fmt_f64(resolution));

    let plan = VerifyPlan::fixed(vec![1e-1, 1e-2], opts.samples, opts.seed);
    let (diag, chain) = run_diagonal_with_chain(&net, extractors, n_ops, &plan);

    // stage limits z_n from the certificates
    let z: Vec<Option<Vec<f64>>> = match &chain {
        Some(chain) => (1..=n_ops)
            .map(|k| {
                chain
                    .stage(k)
                    .ok()
                    .and_then(|s| s.certificate)
                    .map(|c| c.limit_values.clone())
                    .filter(|v| v.len() == d)
            })
            .collect(),
        None => vec![None; n_ops],
    };

    // (a) Cauchy estimate: ||z_p - z_q|| <= ||T_p - T_q|| * M + 1e-9
    for p in 0..n_ops {
        for q in (p + 1)..n_ops {
            if let (Some(zp), Some(zq)) = (&z[p], &z[q]) {
                let gap = sup_distance(zp, zq);
                let bound = t_n[p].sub(&t_n[q]).op_norm() * m_bound + 1e-9;
                report.checks.push(CheckResult::le(
                    &format!("cauchy-estimate-{}-{}", p + 1, q + 1),
                    format!(
                        "||z_{} - z_{}|| <= ||T_{} - T_{}|| M",
                        p + 1,
                        q + 1,
                        p + 1,
                        q + 1
                    ),
                    gap,
                    bound,
                ));
            }
        }
    }

    if let (Some(chain), Some(Some(z_last))) = (&chain, z.last().cloned()) {
        // (b) limsup bound at each n against the deepest limit z_N; the
        // stage resolution enters because the inner term is certified only
        // down to it
        for n in 1..=n_ops {
            if z[n - 1].is_none() {
                continue;
            }
            let tail = certified_tail_values(chain, n, 1e-2, (opts.samples / 5).max(20), opts.seed);
            match tail {
                Ok(values) => {
                    let worst = values
                        .iter()
                        .map(|v| {
                            un_distance(&t.mul_vec(v), &z_last, &truncation)
                                .unwrap_or(f64::INFINITY)
                        })
                        .fold(0.0f64, f64::max);
                    let bound = t.sub(&t_n[n - 1]).op_norm() * m_bound
                        + sup_distance(z[n - 1].as_ref().unwrap(), &z_last)
                        + resolution
                        + 1e-9;
                    report.checks.push(CheckResult::le(
                        &format!("limsup-bound-{n}"),
                        format!(
                            "max || |T y - z| /\\ u || over the stage-{n} tail <= ||T - T_{n}|| M + ||z_{n} - z|| + resolution"
                        ),
                        worst,
                        bound,
                    ));
                }
                Err(e) => report.checks.push(CheckResult::flag(
                    &format!("limsup-bound-{n}"),
                    format!("tail sampling failed: {e}"),
                    false,
                )),
            }
        }

        // (c) T y converges to z within eps at the deepest certified tail
        match certified_tail_values(chain, n_ops, 1e-2, opts.samples, opts.seed) {
            Ok(values) => {
                let worst = values
                    .iter()
                    .map(|v| {
                        un_distance(&t.mul_vec(v), &z_last, &truncation).unwrap_or(f64::INFINITY)
                    })
                    .fold(0.0f64, f64::max);
                report.checks.push(CheckResult::le(
                    "limit-convergence",
                    format!(
                        "|| |T y - z| /\\ u || <= {} at the deepest certified tail",
                        params.eps
                    ),
                    worst,
                    params.eps,
                ));
            }
            Err(e) => report.checks.push(CheckResult::flag(
                "limit-convergence",
                format!("tail sampling failed: {e}"),
                false,
            )),
        }
    } else {
        report.checks.push(CheckResult::flag(
            "limit-convergence",
            "deepest stage limit unavailable".into(),
            false,
        ));
    }

    // exact truncation identity over random rational pairs
    let identity_trials = 10_000;
    let mut idrng = rng::rng_at(opts.seed, 0x1d);
    let mut identity_ok = 0usize;
    for _ in 0..identity_trials {
        let zp: Vec<Rational64> = (0..d)
            .map(|_| Rational64::new(idrng.gen_range(-1000..1000), idrng.gen_range(1..100)))
            .collect();
        let zq: Vec<Rational64> = (0..d)
            .map(|_| Rational64::new(idrng.gen_range(-1000..1000), idrng.gen_range(1..100)))
            .collect();
        if lattice_cauchy_gap(&zp, &zq).is_ok() {
            identity_ok += 1;
        }
    }
    report.checks.push(CheckResult::flag(
        "rational-truncation-identity",
        format!("exact on {identity_ok}/{identity_trials} random rational pairs"),
        identity_ok == identity_trials,
    ));

    report.diagonal = Some(diag);
    report.finalize();
    report
}

fn sup_norm_of(net: &Net<Vec<f64>>, e: &Element) -> f64 {
    net.eval(e)
        .map(|v| v.iter().fold(0.0f64, |a, x| a.max(x.abs())))
        .unwrap_or(0.0)
}

// ---------------------------------------------------------------------------
// remark counterexample
// ---------------------------------------------------------------------------

/// The negative demo: for `x_n = 1/sqrt(n)` and the properties
/// `P_k: |y_n| <= k^{-n}`, plain subsequence-preservation is not enough.
/// Every tested subsequence admits an explicit violated `(k, n)`, while each
/// `P_k` is preserved under subsequence re-indexing and broken by a shifted
/// eventual subsequence.
pub fn counterexample_remark(opts: &DemoOptions) -> ScenarioReport {
    let mut report = ScenarioReport::new("counterexample-remark", opts.seed);
    report.expected_failure = true;
    let horizon: u64 = 40;
    let k_cap: u64 = 1 << 20;
    report.param("horizon", horizon);

    let x = |n: u64| 1.0 / (n as f64).sqrt();

    // (a) P_k is preserved under subsequence re-indexing: y_n = 0.9 k^{-n}
    // satisfies P_k, and so does y o s for strictly increasing s
    let mut preserved = true;
    for k in [2u64, 3, 5] {
        let y = |n: u64| 0.9 * (k as f64).powi(-(n as i32));
        let subs: [fn(u64) -> u64; 3] = [|n| n, |n| 2 * n, |n| n * n + 1];
        for s in subs {
            for n in 1..=20u64 {
                if y(s(n)) > (k as f64).powi(-(n as i32)) {
                    preserved = false;
                }
            }
        }
    }
    report.checks.push(CheckResult::flag(
        "subsequence-preservation",
        "P_k holds for y and for y o s on tested instances".into(),
        preserved,
    ));

    // (b) a shifted eventual subsequence breaks P_k: z_n = y_{n-1}
    let k = 2u64;
    let y_exact = |n: u64| (k as f64).powi(-(n as i32));
    let mut shifted_violation = None;
    for n in 2..=20u64 {
        if y_exact(n - 1) > y_exact(n) {
            shifted_violation = Some(n);
            break;
        }
    }
    report.checks.push(CheckResult::flag(
        "shifted-eventual-subsequence-breaks",
        format!(
            "z_n = y_(n-1) violates P_2 at n = {}",
            shifted_violation.map_or("none".to_string(), |n| n.to_string())
        ),
        shifted_violation.is_some(),
    ));

    // (c) every tested subsequence of x admits a violated (k, n)
    let mut srng = rng::rng_at(opts.seed, 0x5e);
    let mut subsequences: Vec<(String, Vec<u64>)> = vec![
        ("identity".into(), (1..=horizon).collect()),
        ("doubling".into(), (1..=horizon).map(|n| 2 * n).collect()),
        ("squares".into(), (1..=horizon).map(|n| n * n).collect()),
        (
            "fast".into(),
            (1..=horizon)
                .map(|n| n.saturating_mul(n).saturating_mul(n) + 5)
                .collect(),
        ),
    ];
    for inst in 0..3 {
        let mut s = Vec::with_capacity(horizon as usize);
        let mut cur = srng.gen_range(1..10u64);
        for _ in 0..horizon {
            s.push(cur);
            cur += srng.gen_range(1..6u64);
        }
        subsequences.push((format!("random-{inst}"), s));
    }

    for (name, s) in &subsequences {
        let mut found: Option<(u64, u64)> = None;
        'search: for k in 2..=k_cap {
            for (i, &sn) in s.iter().enumerate() {
                let n = i as u64 + 1;
                if x(sn) > (k as f64).powi(-(n as i32)) {
                    found = Some((k, n));
                    break 'search;
                }
            }
        }
        report.checks.push(CheckResult::flag(
            &format!("violation-{name}"),
            match found {
                Some((k, n)) => format!("x(s({n})) > {k}^-{n}"),
                None => "no violation found".into(),
            },
            found.is_some(),
        ));
    }

    // the identity subsequence violates P_2 first at n = 1
    let identity_first = subsequences[0]
        .1
        .iter()
        .enumerate()
        .find(|(i, &sn)| x(sn) > 2f64.powi(-((*i as i32) + 1)))
        .map(|(i, _)| i as u64 + 1);
    report.checks.push(CheckResult::flag(
        "identity-first-violation-at-1",
        format!("first n with 1/sqrt(n) > 2^-n is {identity_first:?}"),
        identity_first == Some(1),
    ));

    report.finalize();
    report
}

// ---------------------------------------------------------------------------
// oracle runner
// ---------------------------------------------------------------------------

pub fn oracle(max_size: usize, max_depth: usize) -> Result<OracleReport> {
    oracle_sweep(&OracleConfig {
        max_stage_size: max_size,
        max_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remark_scenario_reports_expected_failure_with_witnesses() {
        let report = counterexample_remark(&DemoOptions::default());
        assert!(report.expected_failure);
        assert!(report.pass, "{report:?}");
        // every tested subsequence has a violation witness
        assert!(report
            .checks
            .iter()
            .filter(|c| c.name.starts_with("violation-"))
            .all(|c| c.pass));
    }

    #[test]
    fn remark_scenario_is_byte_stable() {
        let a = counterexample_remark(&DemoOptions::default()).to_json();
        let b = counterexample_remark(&DemoOptions::default()).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn product_scenario_small_passes() {
        let opts = DemoOptions {
            samples: 60,
            budget: 4000,
            ..DemoOptions::default()
        };
        let report = product_compactness(2, 6, 0.05, &opts);
        assert!(report.pass, "{}", report.to_json());
    }

    #[test]
    fn product_negative_control_fails() {
        let opts = DemoOptions {
            samples: 40,
            budget: 4000,
            negative_control: true,
            ..DemoOptions::default()
        };
        let report = product_compactness(2, 6, 0.05, &opts);
        assert!(!report.pass);
    }
}
