//! Concrete extractors: each one, applied to any subnet, produces a further
//! stage whose subnet satisfies one target property, together with a
//! convergence certificate for it.
//!
//! All four extractors funnel into the same machinery: scalar observables of
//! the value, a nested halving search that pins each observable into a cell,
//! and a single frequently-in-a-set stage at the deepest cell. Cell
//! tie-break is lowest index among cells with frequent evidence found within
//! budget, so extraction is deterministic given (net, seed).

use std::sync::Arc;

use serde::Serialize;

use crate::convergence::{sup_norm, un_distance, Certificate, Mode};
use crate::error::{Error, Result};
use crate::nets::{find_member_above, frequent_subnet_auto, CofinalMap, Net};
use crate::rng;

/// Supplies the hypothesis of the diagonal principle: a builder that turns a
/// net into a further stage (index set + cofinal map + optional certificate).
pub trait Extractor<V>: Send + Sync {
    fn label(&self) -> String;
    fn build(&self, net: &Net<V>, seed: u64) -> Result<Extraction<V>>;
}

pub struct Extraction<V> {
    pub stage: crate::directed::DirectedSet,
    pub map: CofinalMap,
    pub certificate: Option<Certificate<V>>,
}

/// Stage equal to the input index with the identity map; satisfies any
/// property the input already has.
pub struct IdentityExtractor {
    label: String,
}

impl IdentityExtractor {
    pub fn new(label: &str) -> Self {
        IdentityExtractor {
            label: label.to_string(),
        }
    }
}

impl<V> Extractor<V> for IdentityExtractor {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn build(&self, net: &Net<V>, _seed: u64) -> Result<Extraction<V>> {
        Ok(Extraction {
            stage: net.index.clone(),
            map: CofinalMap::identity(&net.index),
            certificate: None,
        })
    }
}

/// Wraps an extractor and attaches a fixed certificate to its output.
pub struct WithCertificate<V> {
    pub inner: Arc<dyn Extractor<V>>,
    pub certificate: Certificate<V>,
}

impl<V: Clone + Send + Sync + 'static> Extractor<V> for WithCertificate<V> {
    fn label(&self) -> String {
        self.inner.label()
    }

    fn build(&self, net: &Net<V>, seed: u64) -> Result<Extraction<V>> {
        let mut ex = self.inner.build(net, seed)?;
        ex.certificate = Some(self.certificate.clone());
        Ok(ex)
    }
}

pub type Observable<V> = Arc<dyn Fn(&V) -> f64 + Send + Sync>;

pub const DEFAULT_BUDGET: usize = 10_000;
const PROBES: usize = 3;

/// One step of the refinement record: joint centers and the cell radius.
#[derive(Clone, Debug, Serialize)]
pub struct RefineStep {
    pub centers: Vec<f64>,
    pub radius: f64,
}

/// Check that a candidate cell has frequent evidence: the budgeted search
/// must succeed above the base point and above a few escalated anchors
/// (escalation keeps a one-off value at a low index from faking evidence).
fn has_evidence<V: Clone + Send + Sync + 'static>(
    net: &Net<V>,
    pred: &dyn Fn(&V) -> bool,
    budget: usize,
    seed: u64,
) -> bool {
    let mut rng = rng::rng_at(seed, 0xeu64);
    let mut anchors = vec![net.index.base_point()];
    for _ in 1..PROBES {
        let mut a = net.index.base_point();
        for _ in 0..3 {
            match net.index.sample_above(&a, &mut rng) {
                Ok(next) => a = next,
                Err(_) => return false,
            }
        }
        anchors.push(a);
    }
    anchors.iter().all(|a| {
        let mut search_rng = rng::rng_at(seed, rng::hash_str(&a.encode()));
        find_member_above(net, a, pred, budget, seed, &mut search_rng).is_ok()
    })
}

/// Nested halving over a tuple of observables: start from the full
/// intervals, halve the radius each round, and pick the lowest-index cover
/// cell with frequent evidence. Each round's cover is seeded at a witnessed
/// value (cell 0 is centered on a point the net actually visits, grid cells
/// follow), so the surviving tail never collapses to a boundary sliver and
/// witness searches at every depth stay within budget. Verifies the nesting
/// bound `|c_m - c_{m-1}| <= r_m + r_{m-1}` per observable each round.
fn refine_cells<V: Clone + Send + Sync + 'static>(
    net: &Net<V>,
    obs: &[Observable<V>],
    ranges: &[(f64, f64)],
    m_max: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<RefineStep>> {
    let dims = obs.len();
    let mut centers: Vec<f64> = ranges.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let width = ranges
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0f64, f64::max);
    // the m = 1 cell is the whole interval: radius (hi-lo)/2 around the
    // midpoint; refinement rounds run m = 2..=m_max
    let mut radius = width / 2.0;
    let mut steps = vec![RefineStep {
        centers: centers.clone(),
        radius,
    }];

    for m in 2..=m_max {
        let r_next = width / f64::powi(2.0, m as i32);

        // witness a point inside the current cells to seed the next cover
        let cc = centers.clone();
        let r_cur = radius;
        let obs_owned: Vec<Observable<V>> = obs.to_vec();
        let in_current = move |v: &V| {
            obs_owned
                .iter()
                .zip(&cc)
                .all(|(o, c)| (o(v) - c).abs() <= r_cur)
        };
        let mut wrng = rng::rng_at(seed, 0x5eed ^ (m as u64));
        let seed_values: Option<Vec<f64>> =
            find_member_above(net, &net.index.base_point(), &in_current, budget, seed, &mut wrng)
                .ok()
                .and_then(|e| net.eval(&e).ok())
                .map(|v| obs.iter().map(|o| o(&v)).collect());

        // candidate centers per observable: the witnessed value first, then
        // the halving grid around the current center
        let mut per_dim: Vec<Vec<f64>> = Vec::with_capacity(dims);
        for j in 0..dims {
            let (lo, hi) = ranges[j];
            let mut cands = Vec::new();
            if let Some(sv) = &seed_values {
                cands.push(sv[j].clamp(lo, hi));
            }
            for off in -2i32..=2 {
                let c = (centers[j] + off as f64 * r_next).clamp(lo, hi);
                if !cands.iter().any(|&p| p == c) {
                    cands.push(c);
                }
            }
            per_dim.push(cands);
        }

        // lexicographic walk over the joint candidate list
        let mut pick: Option<Vec<f64>> = None;
        let mut cursor = vec![0usize; dims];
        'grid: loop {
            let cand: Vec<f64> = cursor
                .iter()
                .enumerate()
                .map(|(j, &i)| per_dim[j][i])
                .collect();
            let cc = cand.clone();
            let obs_owned: Vec<Observable<V>> = obs.to_vec();
            let pred = move |v: &V| {
                obs_owned
                    .iter()
                    .zip(&cc)
                    .all(|(o, c)| (o(v) - c).abs() <= r_next)
            };
            let cell_seed = rng::mix(seed, (m as u64) << 32 | grid_index(&cursor, &per_dim));
            if has_evidence(net, &pred, budget, cell_seed) {
                pick = Some(cand);
                break 'grid;
            }
            // advance cursor
            let mut j = dims;
            loop {
                if j == 0 {
                    break 'grid;
                }
                j -= 1;
                cursor[j] += 1;
                if cursor[j] < per_dim[j].len() {
                    break;
                }
                cursor[j] = 0;
            }
            if cursor.iter().all(|&c| c == 0) {
                break 'grid;
            }
        }
        let new_centers = pick.ok_or(Error::WitnessSearchExhausted {
            context: format!("no cell with frequent evidence at halving step {m}"),
            budget,
        })?;
        for (j, (&c_new, &c_old)) in new_centers.iter().zip(&centers).enumerate() {
            if (c_new - c_old).abs() > radius + r_next + 1e-12 {
                return Err(Error::Internal(format!(
                    "nesting violated at step {m}, observable {j}"
                )));
            }
        }
        centers = new_centers;
        radius = r_next;
        steps.push(RefineStep {
            centers: centers.clone(),
            radius,
        });
    }
    Ok(steps)
}

fn grid_index(cursor: &[usize], per_dim: &[Vec<f64>]) -> u64 {
    let mut idx = 0u64;
    for (c, d) in cursor.iter().zip(per_dim) {
        idx = idx * d.len() as u64 + *c as u64;
    }
    idx
}

/// Shared tail: build the frequent stage at the deepest cell and wrap a
/// certificate whose tail witness answers any tolerance down to the final
/// radius.
#[allow(clippy::too_many_arguments)]
fn stage_at_cells<V: Clone + Send + Sync + 'static>(
    net: &Net<V>,
    obs: Vec<Observable<V>>,
    steps: &[RefineStep],
    label: String,
    mode: Mode,
    residual: Arc<dyn Fn(&V) -> f64 + Send + Sync>,
    budget: usize,
    seed: u64,
) -> Result<Extraction<V>> {
    let last = steps.last().expect("refinement has at least one step");
    let centers = last.centers.clone();
    let r_final = last.radius;
    let cc = centers.clone();
    let pred = move |v: &V| {
        obs.iter()
            .zip(&cc)
            .all(|(o, c)| (o(v) - c).abs() <= r_final)
    };
    let (stage, map) = frequent_subnet_auto(net, &label, pred, budget, seed)?;

    let anchor = stage.base_point();
    let limit_label = centers
        .iter()
        .map(|c| format!("{c}"))
        .collect::<Vec<_>>()
        .join(",");
    let cert = Certificate::new(
        mode,
        label,
        limit_label,
        move |v: &V| residual(v),
        move |eps: f64| {
            if eps + 1e-12 >= r_final {
                Ok(anchor.clone())
            } else {
                Err(Error::TailUnavailable { eps })
            }
        },
    )
    .with_limit_values(centers)
    .with_resolution(r_final);

    Ok(Extraction {
        stage,
        map,
        certificate: Some(cert),
    })
}

// ---------------------------------------------------------------------------
// Ball tail extractor (totally bounded metric space with explicit covers)
// ---------------------------------------------------------------------------

pub type MetricFn<V> = Arc<dyn Fn(&V, &V) -> f64 + Send + Sync>;

/// Finds a cover cell the net visits frequently (lowest-index cell wins) and
/// restricts to it; the certificate pins every tail value within the cell
/// radius of its center.
pub struct BallTailExtractor<V> {
    pub label: String,
    metric: MetricFn<V>,
    centers: Vec<V>,
    radius: f64,
    budget: usize,
}

impl<V: Clone + Send + Sync + 'static> BallTailExtractor<V> {
    pub fn new(label: &str, metric: MetricFn<V>, centers: Vec<V>, radius: f64) -> Self {
        BallTailExtractor {
            label: label.to_string(),
            metric,
            centers,
            radius,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Index of the chosen cover cell for the given net and seed.
    pub fn choose_cell(&self, net: &Net<V>, seed: u64) -> Result<usize> {
        for (i, c) in self.centers.iter().enumerate() {
            let metric = self.metric.clone();
            let center = c.clone();
            let r = self.radius;
            let pred = move |v: &V| metric(v, &center) <= r;
            if has_evidence(net, &pred, self.budget, rng::mix(seed, i as u64)) {
                return Ok(i);
            }
        }
        Err(Error::WitnessSearchExhausted {
            context: format!("{}: no cover cell with frequent evidence", self.label),
            budget: self.budget,
        })
    }
}

impl<V: Clone + Send + Sync + 'static> Extractor<V> for BallTailExtractor<V> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn build(&self, net: &Net<V>, seed: u64) -> Result<Extraction<V>> {
        let cell = self.choose_cell(net, seed)?;
        let center = self.centers[cell].clone();
        let metric = self.metric.clone();
        let r = self.radius;
        let c2 = center.clone();
        let m2 = metric.clone();
        let pred = move |v: &V| m2(v, &c2) <= r;
        let label = format!("{} [cell {cell}]", self.label);
        let (stage, map) = frequent_subnet_auto(net, &label, pred, self.budget, seed)?;
        let anchor = stage.base_point();
        let cert = Certificate::new(
            Mode::Metric,
            label,
            format!("cell {cell}"),
            move |v: &V| metric(v, &center),
            move |eps| {
                if eps + 1e-12 >= r {
                    Ok(anchor.clone())
                } else {
                    Err(Error::TailUnavailable { eps })
                }
            },
        )
        .with_resolution(r);
        Ok(Extraction {
            stage,
            map,
            certificate: Some(cert),
        })
    }
}

// ---------------------------------------------------------------------------
// Coordinate extractor (nested halving on one observable)
// ---------------------------------------------------------------------------

/// Makes one scalar observable of the net converge by iterated halving of a
/// compact interval; the certificate limit is the deepest cell center.
pub struct CoordinateExtractor<V> {
    pub label: String,
    obs: Observable<V>,
    lo: f64,
    hi: f64,
    m_max: usize,
    budget: usize,
}

impl<V: Clone + Send + Sync + 'static> CoordinateExtractor<V> {
    pub fn new(label: &str, obs: Observable<V>, lo: f64, hi: f64, m_max: usize) -> Self {
        CoordinateExtractor {
            label: label.to_string(),
            obs,
            lo,
            hi,
            m_max,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn resolution(&self) -> f64 {
        (self.hi - self.lo) / f64::powi(2.0, self.m_max as i32)
    }

    /// The refinement trace (centers and radii per halving step).
    pub fn refine(&self, net: &Net<V>, seed: u64) -> Result<Vec<RefineStep>> {
        refine_cells(
            net,
            &[self.obs.clone()],
            &[(self.lo, self.hi)],
            self.m_max,
            self.budget,
            seed,
        )
    }
}

impl<V: Clone + Send + Sync + 'static> Extractor<V> for CoordinateExtractor<V> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn build(&self, net: &Net<V>, seed: u64) -> Result<Extraction<V>> {
        let steps = self.refine(net, seed)?;
        let c = steps.last().unwrap().centers[0];
        let obs = self.obs.clone();
        let residual = Arc::new(move |v: &V| (obs(v) - c).abs());
        stage_at_cells(
            net,
            vec![self.obs.clone()],
            &steps,
            format!("{} -> {c}", self.label),
            Mode::Metric,
            residual,
            self.budget,
            seed,
        )
    }
}

// ---------------------------------------------------------------------------
// Functional extractor (weak* coordinate at one dense point)
// ---------------------------------------------------------------------------

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// For nets of unit-ball functionals on ℝ^d (represented as vectors),
/// extracts convergence of the evaluation at one dense point; evaluations
/// live in `[-|x|, |x|]`.
pub struct FunctionalExtractor {
    pub point: Vec<f64>,
    pub point_index: usize,
    m_max: usize,
    budget: usize,
}

impl FunctionalExtractor {
    pub fn new(point: Vec<f64>, point_index: usize, m_max: usize) -> Self {
        FunctionalExtractor {
            point,
            point_index,
            m_max,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn coordinate(&self) -> CoordinateExtractor<Vec<f64>> {
        let x = self.point.clone();
        let bound = norm2(&x);
        let obs: Observable<Vec<f64>> = Arc::new(move |y: &Vec<f64>| dot(y, &x));
        CoordinateExtractor::new(
            &format!("evaluation at dense point {}", self.point_index),
            obs,
            -bound,
            bound,
            self.m_max,
        )
        .with_budget(self.budget)
    }
}

impl Extractor<Vec<f64>> for FunctionalExtractor {
    fn label(&self) -> String {
        format!("evaluation at dense point {}", self.point_index)
    }

    fn build(&self, net: &Net<Vec<f64>>, seed: u64) -> Result<Extraction<Vec<f64>>> {
        self.coordinate().build(net, seed)
    }
}

// ---------------------------------------------------------------------------
// Operator image extractor (un-convergence of T y)
// ---------------------------------------------------------------------------

/// Dense d x d matrix with the sup-norm induced operator norm.
#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: Vec<Vec<f64>>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "matrix must be square");
        Matrix { rows }
    }

    pub fn identity(d: usize) -> Self {
        let rows = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Matrix { rows }
    }

    pub fn zero(d: usize) -> Self {
        Matrix {
            rows: vec![vec![0.0; d]; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(r, v)).collect()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Matrix { rows }
    }

    pub fn add_scaled(&self, other: &Matrix, c: f64) -> Matrix {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + c * y).collect())
            .collect();
        Matrix { rows }
    }

    /// Operator norm induced by the sup-norm: max absolute row sum.
    pub fn op_norm(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum())
            .fold(0.0, f64::max)
    }
}

/// Makes the image net `T y` un-convergent: joint nested halving on every
/// image coordinate; the certificate is in un mode with the given truncation.
pub struct OperatorImageExtractor {
    pub label: String,
    t: Matrix,
    truncation: Vec<f64>,
    value_bound: f64,
    m_max: usize,
    budget: usize,
}

impl OperatorImageExtractor {
    pub fn new(label: &str, t: Matrix, truncation: Vec<f64>, value_bound: f64, m_max: usize) -> Self {
        OperatorImageExtractor {
            label: label.to_string(),
            t,
            truncation,
            value_bound,
            m_max,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn resolution(&self) -> f64 {
        2.0 * self.t.op_norm().max(1e-12) * self.value_bound / f64::powi(2.0, self.m_max as i32)
    }
}

impl Extractor<Vec<f64>> for OperatorImageExtractor {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn build(&self, net: &Net<Vec<f64>>, seed: u64) -> Result<Extraction<Vec<f64>>> {
        let d = self.t.dim();
        let bound = self.t.op_norm().max(1e-12) * self.value_bound;
        let obs: Vec<Observable<Vec<f64>>> = (0..d)
            .map(|j| {
                let row = self.t.rows[j].clone();
                let o: Observable<Vec<f64>> = Arc::new(move |v: &Vec<f64>| dot(&row, v));
                o
            })
            .collect();
        let ranges = vec![(-bound, bound); d];
        let steps = refine_cells(net, &obs, &ranges, self.m_max, self.budget, seed)?;
        let z = steps.last().unwrap().centers.clone();
        let t = self.t.clone();
        let u = self.truncation.clone();
        let zc = z.clone();
        let residual = Arc::new(move |v: &Vec<f64>| {
            un_distance(&t.mul_vec(v), &zc, &u).unwrap_or(f64::INFINITY)
        });
        let mut ex = stage_at_cells(
            net,
            obs,
            &steps,
            format!("{} un-limit", self.label),
            Mode::Un,
            residual,
            self.budget,
            seed,
        )?;
        if let Some(c) = ex.certificate.as_mut() {
            c.limit_values = z;
        }
        Ok(ex)
    }
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    sup_norm(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::check_certificate;
    use crate::directed::naturals;
    use crate::nets::{check_cofinal_law, subnet, ValueSpace};

    fn sup_metric() -> MetricFn<Vec<f64>> {
        Arc::new(|a: &Vec<f64>, b: &Vec<f64>| sup_distance(a, b))
    }

    fn inverse_sqrt_net() -> Net<f64> {
        Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap().max(1);
            Ok(1.0 / (n as f64).sqrt())
        })
    }

    #[test]
    fn ball_extractor_picks_lowest_frequent_cell() {
        // x_n = 1/sqrt(n) on [0,1], cover {0, 1/2, 1} with radius 1/2:
        // the cell centered at 0 is frequent and has the lowest index.
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap().max(1);
            Ok(vec![1.0 / (n as f64).sqrt()])
        });
        let ex = BallTailExtractor::new(
            "radius 1/2 cover",
            sup_metric(),
            vec![vec![0.0], vec![0.5], vec![1.0]],
            0.5,
        );
        assert_eq!(ex.choose_cell(&net, 0).unwrap(), 0);
        let extraction = ex.build(&net, 0).unwrap();
        let sub = subnet(&net, &extraction.map).unwrap();
        let mut rng = crate::rng::rng_from(1);
        for _ in 0..50 {
            let e = extraction.stage.sample(&mut rng).unwrap();
            let v = sub.eval(&e).unwrap();
            // tail within 2/k of the chosen center (k = 2)
            assert!(v[0] <= 1.0, "value {v:?} escapes the cell");
            assert!(sup_distance(&v, &[0.0]) <= 1.0);
        }
    }

    #[test]
    fn ball_extractor_constant_net_keeps_value() {
        let net = Net::new(naturals(), ValueSpace::Metric, |_| Ok(vec![0.4, 0.6]));
        let ex = BallTailExtractor::new(
            "radius 1/3 cover",
            sup_metric(),
            vec![vec![0.1, 0.1], vec![0.5, 0.5], vec![0.9, 0.9]],
            1.0 / 3.0,
        );
        let extraction = ex.build(&net, 0).unwrap();
        let sub = subnet(&net, &extraction.map).unwrap();
        let mut rng = crate::rng::rng_from(3);
        for _ in 0..20 {
            let e = extraction.stage.sample(&mut rng).unwrap();
            assert_eq!(sub.eval(&e).unwrap(), vec![0.4, 0.6]);
        }
    }

    #[test]
    fn ball_extractor_alternating_net_tie_break_is_deterministic() {
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(vec![if n % 2 == 0 { 0.0 } else { 1.0 }])
        });
        let ex = BallTailExtractor::new(
            "radius 1/3 cover",
            sup_metric(),
            vec![vec![1.0 / 6.0], vec![0.5], vec![5.0 / 6.0]],
            1.0 / 3.0,
        );
        // both cell 0 (value 0) and cell 2 (value 1) are frequent; the
        // tie-break takes the lowest index
        assert_eq!(ex.choose_cell(&net, 0).unwrap(), 0);
        assert_eq!(ex.choose_cell(&net, 99).unwrap(), 0);
    }

    #[test]
    fn coordinate_extractor_on_alternating_sign_picks_low_side() {
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(vec![if n % 2 == 0 { 1.0 } else { -1.0 }])
        });
        let obs: Observable<Vec<f64>> = Arc::new(|v: &Vec<f64>| v[0]);
        let ex = CoordinateExtractor::new("coordinate 0", obs, -1.0, 1.0, 8);
        let extraction = ex.build(&net, 0).unwrap();
        let cert = extraction.certificate.unwrap();
        // cells are scanned in ascending order, so the -1 side wins
        let c = cert.limit_values[0];
        assert!(
            (c + 1.0).abs() <= ex.resolution(),
            "limit {c} is not near -1"
        );
        let sub = subnet(&net, &extraction.map).unwrap();
        let mut rng = crate::rng::rng_from(5);
        for _ in 0..50 {
            let e = extraction.stage.sample(&mut rng).unwrap();
            assert_eq!(sub.eval(&e).unwrap()[0], -1.0);
        }
    }

    #[test]
    fn coordinate_extractor_constant_limit_within_resolution() {
        let c0 = 0.337;
        let net = Net::new(naturals(), ValueSpace::Metric, move |_| Ok(vec![c0]));
        let obs: Observable<Vec<f64>> = Arc::new(|v: &Vec<f64>| v[0]);
        let ex = CoordinateExtractor::new("coordinate 0", obs, 0.0, 1.0, 10);
        let extraction = ex.build(&net, 0).unwrap();
        let cert = extraction.certificate.unwrap();
        assert!((cert.limit_values[0] - c0).abs() <= ex.resolution());
    }

    #[test]
    fn coordinate_extractor_convergent_net_limit_near_true_limit() {
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap().max(1) as f64;
            Ok(vec![0.25 + 1.0 / (10.0 * n)])
        });
        let obs: Observable<Vec<f64>> = Arc::new(|v: &Vec<f64>| v[0]);
        let ex = CoordinateExtractor::new("coordinate 0", obs, 0.0, 1.0, 10);
        let extraction = ex.build(&net, 0).unwrap();
        let cert = extraction.certificate.unwrap();
        // every cell must contain cluster values, so the final center is
        // within (resolution + spread) of the true limit 0.25
        assert!((cert.limit_values[0] - 0.25).abs() <= 2.0 * ex.resolution() + 0.1);
    }

    #[test]
    fn extractor_output_passes_map_law_and_certificate() {
        let net = inverse_sqrt_net();
        let obs: Observable<f64> = Arc::new(|v: &f64| *v);
        let ex = CoordinateExtractor::new("value", obs, 0.0, 1.0, 8);
        let extraction = ex.build(&net, 7).unwrap();
        let law = check_cofinal_law(&extraction.map, 500, 1);
        assert!(law.pass(), "{law:?}");

        let sub = subnet(&net, &extraction.map).unwrap();
        let cert = extraction.certificate.unwrap();
        let grid: Vec<f64> = (1..=8).map(|m| 1.0 / f64::powi(2.0, m)).collect();
        let report = check_certificate(&sub, &cert, &grid, 100, 2).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn extraction_is_deterministic_for_fixed_seed() {
        let net = inverse_sqrt_net();
        let obs: Observable<f64> = Arc::new(|v: &f64| *v);
        let ex = CoordinateExtractor::new("value", obs, 0.0, 1.0, 8);
        let s1 = ex.refine(&net, 42).unwrap();
        let s2 = ex.refine(&net, 42).unwrap();
        let trace = |s: &[RefineStep]| {
            s.iter()
                .map(|st| format!("{:?}@{}", st.centers, st.radius))
                .collect::<Vec<_>>()
                .join(";")
        };
        assert_eq!(trace(&s1), trace(&s2));
        let e1 = ex.build(&net, 42).unwrap();
        let e2 = ex.build(&net, 42).unwrap();
        assert_eq!(
            rng::hash_str(&e1.stage.base_point().encode()),
            rng::hash_str(&e2.stage.base_point().encode())
        );
        assert_eq!(e1.stage.descriptor(), e2.stage.descriptor());
    }

    #[test]
    fn nested_cells_shrink_and_stay_close() {
        let net = inverse_sqrt_net();
        let obs: Observable<f64> = Arc::new(|v: &f64| *v);
        let ex = CoordinateExtractor::new("value", obs, 0.0, 1.0, 10);
        let steps = ex.refine(&net, 0).unwrap();
        for w in steps.windows(2) {
            assert!(w[1].radius <= w[0].radius / 2.0 + 1e-15);
            assert!((w[1].centers[0] - w[0].centers[0]).abs() <= w[0].radius + w[1].radius);
        }
    }

    #[test]
    fn operator_extractor_zero_matrix_trivial_certificate() {
        let net = Net::new(naturals(), ValueSpace::LatticeRd, |e| {
            let n = e.as_nat().unwrap() as f64;
            Ok(vec![(n * 0.7).sin(), (n * 1.3).cos()])
        });
        let ex = OperatorImageExtractor::new(
            "T = 0",
            Matrix::zero(2),
            vec![1.0, 1.0],
            1.0,
            6,
        );
        let extraction = ex.build(&net, 0).unwrap();
        let cert = extraction.certificate.unwrap();
        // image net is constantly 0, so the centers sit at 0
        for c in &cert.limit_values {
            assert!(c.abs() <= ex.resolution() + 1e-12);
        }
        let sub = subnet(&net, &extraction.map).unwrap();
        let mut rng = crate::rng::rng_from(8);
        for _ in 0..20 {
            let e = extraction.stage.sample(&mut rng).unwrap();
            assert!(cert.residual(&sub.eval(&e).unwrap()) <= ex.resolution());
        }
    }

    #[test]
    fn operator_extractor_identity_matches_subnet_limit() {
        // net converging to a point: identity image extraction must certify
        // a limit within the final resolution of that point
        let target = vec![0.3, -0.2];
        let t2 = target.clone();
        let net = Net::new(naturals(), ValueSpace::LatticeRd, move |e| {
            let n = e.as_nat().unwrap() as f64;
            let decay = 0.5f64.powf(n.min(40.0));
            Ok(vec![t2[0] + decay, t2[1] - decay])
        });
        let m_max = 12;
        let ex = OperatorImageExtractor::new(
            "T = I",
            Matrix::identity(2),
            vec![1.0, 1.0],
            1.0,
            m_max,
        );
        let extraction = ex.build(&net, 0).unwrap();
        let cert = extraction.certificate.unwrap();
        assert!(sup_distance(&cert.limit_values, &target) <= ex.resolution());
    }
}
