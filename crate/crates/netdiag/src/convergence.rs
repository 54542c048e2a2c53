//! Desk-scale value spaces and convergence structures.
//!
//! Vector-lattice operations on d-tuples (componentwise, exact in rational
//! mode), a finite atomic measure space for convergence in measure, and the
//! testable form of "converges": a [`Certificate`] pairing a limit with a
//! computable `eps -> tail anchor` witness.
//!
//! On ℝ^d the norm is fixed to the sup-norm and order convergence is realized
//! with dominating nets of the form `eps * (1,..,1)`, so order, unbounded-norm
//! and norm convergence coincide there; the distinct behaviours live on
//! [`AtomicMeasureSpace`].

use std::fmt;
use std::sync::Arc;

use num::rational::Rational64;
use num::Signed;
use serde::Serialize;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::nets::Net;
use crate::par;
use crate::rng;

/// Scalar admissible as a lattice-vector coordinate: f64 (float mode) or
/// `Rational64` (exact mode).
pub trait LatticeScalar:
    Clone + PartialOrd + Signed + Send + Sync + fmt::Debug + 'static
{
}

impl LatticeScalar for f64 {}
impl LatticeScalar for Rational64 {}

fn check_dims<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        })
    }
}

fn scalar_min<T: LatticeScalar>(a: &T, b: &T) -> T {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn scalar_max<T: LatticeScalar>(a: &T, b: &T) -> T {
    if a <= b {
        b.clone()
    } else {
        a.clone()
    }
}

/// Componentwise minimum.
pub fn meet<T: LatticeScalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dims(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| scalar_min(x, y)).collect())
}

/// Componentwise maximum.
pub fn join<T: LatticeScalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dims(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| scalar_max(x, y)).collect())
}

/// Componentwise absolute value.
pub fn abs_vec<T: LatticeScalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| x.abs()).collect()
}

pub fn sub_vec<T: LatticeScalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dims(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect())
}

pub fn add_vec<T: LatticeScalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dims(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect())
}

/// Sup-norm: max of componentwise absolute values.
pub fn sup_norm<T: LatticeScalar>(a: &[T]) -> T {
    a.iter()
        .map(|x| x.abs())
        .fold(T::zero(), |acc, x| scalar_max(&acc, &x))
}

/// Truncated distance `|| |f-g| /\ u ||_inf`, the quantity whose vanishing
/// for every positive `u` defines unbounded-norm convergence.
pub fn un_distance(f: &[f64], g: &[f64], u: &[f64]) -> Result<f64> {
    if u.iter().any(|&x| x < 0.0) {
        return Err(Error::Contract("truncation u must be >= 0".into()));
    }
    check_dims(f, g)?;
    check_dims(f, u)?;
    let diff = abs_vec(&sub_vec(f, g)?);
    Ok(sup_norm(&meet(&diff, u)?))
}

/// Returns `||z_p - z_q||_inf` after asserting the truncation identity
/// `|| |z_p - z_q| /\ (|z_p| + |z_q|) || = ||z_p - z_q||`, which holds because
/// `|a - b| <= |a| + |b|` componentwise (exact in rational mode).
pub fn lattice_cauchy_gap<T: LatticeScalar>(zp: &[T], zq: &[T]) -> Result<T> {
    let diff = abs_vec(&sub_vec(zp, zq)?);
    let u = add_vec(&abs_vec(zp), &abs_vec(zq))?;
    let truncated = sup_norm(&meet(&diff, &u)?);
    let gap = sup_norm(&diff);
    if truncated != gap {
        return Err(Error::Internal(format!(
            "truncation identity violated: {truncated:?} != {gap:?}"
        )));
    }
    Ok(gap)
}

// ---------------------------------------------------------------------------
// Atomic measure space
// ---------------------------------------------------------------------------

/// Finite measure space on `N` atoms; functions are `N`-vectors.
#[derive(Clone, Debug)]
pub struct AtomicMeasureSpace {
    weights: Vec<f64>,
}

impl AtomicMeasureSpace {
    pub fn uniform(n: usize) -> Self {
        AtomicMeasureSpace {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::Contract("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!("weights sum to {total}, not 1")));
        }
        Ok(AtomicMeasureSpace { weights })
    }

    pub fn atoms(&self) -> usize {
        self.weights.len()
    }

    /// Total weight of atoms where `|f - g| > eps`.
    pub fn exceedance_measure(&self, f: &[f64], g: &[f64], eps: f64) -> Result<f64> {
        if eps <= 0.0 {
            return Err(Error::Contract("eps must be positive".into()));
        }
        check_dims(f, g)?;
        check_dims(f, &self.weights)?;
        Ok(f.iter()
            .zip(g)
            .zip(&self.weights)
            .filter(|((x, y), _)| (*x - *y).abs() > eps)
            .map(|(_, w)| w)
            .sum())
    }

    /// Ky Fan distance `inf { eps >= 0 : mu(|f-g| > eps) <= eps }`; metrizes
    /// convergence in measure and is exactly computable on atoms.
    pub fn ky_fan(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        check_dims(f, g)?;
        check_dims(f, &self.weights)?;
        // distinct positive deviation levels, descending, with their masses
        let mut devs: Vec<(f64, f64)> = f
            .iter()
            .zip(g)
            .zip(&self.weights)
            .filter(|((x, y), _)| *x != *y)
            .map(|((x, y), w)| ((x - y).abs(), *w))
            .collect();
        if devs.is_empty() {
            return Ok(0.0);
        }
        devs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for (d, w) in devs {
            match levels.last_mut() {
                Some((ld, lw)) if *ld == d => *lw += w,
                _ => levels.push((d, w)),
            }
        }
        // The exceedance mass G(eps) = mu(|f-g| > eps) is a decreasing step
        // function, constant M_k on (v_{k+1}, v_k); minimize max(lower, M_k)
        // over intervals where G can dip below eps.
        let m = levels.len();
        let mut best = levels[0].0; // on [v_1, inf) the mass is 0
        let mut mass = 0.0;
        for k in 0..m {
            mass += levels[k].1;
            let upper = levels[k].0;
            let lower = if k + 1 < m { levels[k + 1].0 } else { 0.0 };
            if mass < upper {
                best = best.min(scalar_max(&lower, &mass));
            }
        }
        Ok(best)
    }
}

/// Convergence mode of a certificate; fixes how "distance to the limit" is
/// measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Metric,
    Order,
    Un,
    Measure,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Metric => "metric",
            Mode::Order => "order",
            Mode::Un => "un",
            Mode::Measure => "measure",
        };
        f.write_str(s)
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// Limit candidate plus a tail-witness function: the testable form of
/// "converges". Invariant: for every tested `eps` and every sampled index
/// `b >= tail_witness(eps)`, `residual(value(b)) <= eps` in the mode's
/// distance.
pub struct Certificate<V> {
    pub mode: Mode,
    /// Property description, e.g. `coordinate 2 -> 0.49951171875`.
    pub label: String,
    /// Printable limit.
    pub limit_label: String,
    /// Numeric limit when the limit lives in ℝ^d (empty otherwise).
    pub limit_values: Vec<f64>,
    /// Distance guaranteed on the whole certified stage (0 when unknown).
    pub resolution: f64,
    residual: Arc<dyn Fn(&V) -> f64 + Send + Sync>,
    tail_witness: Arc<dyn Fn(f64) -> Result<Element> + Send + Sync>,
}

impl<V> Clone for Certificate<V> {
    fn clone(&self) -> Self {
        Certificate {
            mode: self.mode,
            label: self.label.clone(),
            limit_label: self.limit_label.clone(),
            limit_values: self.limit_values.clone(),
            resolution: self.resolution,
            residual: self.residual.clone(),
            tail_witness: self.tail_witness.clone(),
        }
    }
}

impl<V> Certificate<V> {
    pub fn new<R, W>(mode: Mode, label: String, limit_label: String, residual: R, tail_witness: W) -> Self
    where
        R: Fn(&V) -> f64 + Send + Sync + 'static,
        W: Fn(f64) -> Result<Element> + Send + Sync + 'static,
    {
        Certificate {
            mode,
            label,
            limit_label,
            limit_values: Vec::new(),
            resolution: 0.0,
            residual: Arc::new(residual),
            tail_witness: Arc::new(tail_witness),
        }
    }

    pub fn with_limit_values(mut self, values: Vec<f64>) -> Self {
        self.limit_values = values;
        self
    }

    pub fn with_resolution(mut self, r: f64) -> Self {
        self.resolution = r;
        self
    }

    pub fn residual(&self, v: &V) -> f64 {
        (self.residual)(v)
    }

    pub fn tail_witness(&self, eps: f64) -> Result<Element> {
        (self.tail_witness)(eps)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertEntry {
    pub eps: f64,
    pub anchor: Option<String>,
    pub checked: usize,
    pub max_residual: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    pub label: String,
    pub mode: Mode,
    pub entries: Vec<CertEntry>,
    pub pass: bool,
}

/// Check a certificate against a net: for each `eps` anchor the tail at
/// `tail_witness(eps)`, sample indices at or above it, and compare the worst
/// residual against `eps`. Witness failures are recorded per `eps`, not
/// raised.
pub fn check_certificate<V: Clone + Send + Sync + 'static>(
    net: &Net<V>,
    cert: &Certificate<V>,
    eps_grid: &[f64],
    samples_per_eps: usize,
    seed: u64,
) -> Result<CertReport> {
    if eps_grid.is_empty() || eps_grid.iter().any(|&e| e <= 0.0) {
        return Err(Error::Contract("eps grid must be positive".into()));
    }
    if eps_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Contract("eps grid must be strictly decreasing".into()));
    }

    let mut entries = Vec::with_capacity(eps_grid.len());
    for (k, &eps) in eps_grid.iter().enumerate() {
        let anchor = match cert.tail_witness(eps) {
            Ok(a) => a,
            Err(e) => {
                entries.push(CertEntry {
                    eps,
                    anchor: None,
                    checked: 0,
                    max_residual: f64::NAN,
                    pass: false,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        let results = par::map_indexed(samples_per_eps, |i| {
            let mut rng = rng::rng_at(seed, (k as u64) << 32 | i as u64);
            let idx = net.index.sample_above(&anchor, &mut rng)?;
            let v = net.eval(&idx)?;
            Ok::<(f64, String), Error>((cert.residual(&v), idx.encode()))
        });
        let mut max_residual: f64 = 0.0;
        let mut checked = 0;
        let mut error = None;
        let mut worst_idx = String::new();
        for r in results {
            match r {
                Ok((res, idx)) => {
                    checked += 1;
                    if res >= max_residual {
                        max_residual = res;
                        worst_idx = idx;
                    }
                }
                Err(e) => {
                    if error.is_none() {
                        error = Some(e.to_string());
                    }
                }
            }
        }
        let pass = error.is_none() && checked == samples_per_eps && max_residual <= eps;
        let _ = worst_idx;
        entries.push(CertEntry {
            eps,
            anchor: Some(anchor.encode()),
            checked,
            max_residual,
            pass,
            error,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(CertReport {
        label: cert.label.clone(),
        mode: cert.mode,
        entries,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::naturals;
    use crate::nets::ValueSpace;
    use proptest::prelude::*;

    #[test]
    fn lattice_op_examples() {
        assert_eq!(meet(&[1.0, 5.0], &[3.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(join(&[1.0, 5.0], &[3.0, 2.0]).unwrap(), vec![3.0, 5.0]);
        assert_eq!(abs_vec(&[-1.0, 2.0]), vec![1.0, 2.0]);
        let a = vec![0.5, -0.25];
        assert_eq!(meet(&a, &a).unwrap(), a);
        assert!(matches!(
            meet(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn un_distance_examples() {
        assert_eq!(
            un_distance(&[0.0, 10.0], &[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            1.0
        );
        assert_eq!(
            un_distance(&[3.0, -4.0], &[1.0, 2.0], &[0.0, 0.0]).unwrap(),
            0.0
        );
        // u dominating |f-g| makes truncation inactive: plain sup distance
        let f = [0.25, -0.5];
        let g = [0.0, 0.5];
        assert_eq!(
            un_distance(&f, &g, &[100.0, 100.0]).unwrap(),
            1.0
        );
        assert!(un_distance(&f, &g, &[-1.0, 0.0]).is_err());
    }

    #[test]
    fn exceedance_examples() {
        let sp = AtomicMeasureSpace::uniform(4);
        let f = [0.5, 0.0, 2.0, 0.0];
        let g = [0.0; 4];
        assert_eq!(sp.exceedance_measure(&f, &g, 1.0).unwrap(), 0.25);
        assert_eq!(sp.exceedance_measure(&g, &g, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn un_and_measure_smallness_agree() {
        // on L^p over atoms: un-convergence (u = 1-vector) iff in measure
        let sp = AtomicMeasureSpace::uniform(8);
        let ones = vec![1.0; 8];
        let mut rng = crate::rng::rng_from(42);
        use rand::Rng as _;
        for _ in 0..1000 {
            let f: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let g: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
            for eps in [0.5, 0.25, 0.125] {
                let un = un_distance(&f, &g, &ones).unwrap();
                let exceed = sp.exceedance_measure(&f, &g, eps).unwrap();
                // sup|f-g| <= eps  <=>  nothing exceeds eps
                assert_eq!(un <= eps, exceed == 0.0, "eps={eps} un={un} ex={exceed}");
            }
        }
    }

    #[test]
    fn cauchy_gap_examples() {
        let zp = [1.0, -2.0];
        let zq = [3.0, 1.0];
        assert_eq!(lattice_cauchy_gap(&zp, &zq).unwrap(), 3.0);
        assert_eq!(lattice_cauchy_gap(&zp, &zp).unwrap(), 0.0);
    }

    fn arb_rational() -> impl Strategy<Value = Rational64> {
        (-1000i64..1000, 1i64..100).prop_map(|(n, d)| Rational64::new(n, d))
    }

    proptest! {
        #[test]
        fn truncation_identity_exact_in_rational_mode(
            zp in proptest::collection::vec(arb_rational(), 1..5),
            zq_raw in proptest::collection::vec(arb_rational(), 1..5),
        ) {
            let d = zp.len().min(zq_raw.len());
            let (zp, zq) = (&zp[..d], &zq_raw[..d]);
            prop_assert!(lattice_cauchy_gap(zp, zq).is_ok());
        }

        #[test]
        fn abs_diff_below_abs_sum(
            a in proptest::collection::vec(-1e6f64..1e6, 1..6),
            b_raw in proptest::collection::vec(-1e6f64..1e6, 1..6),
        ) {
            let d = a.len().min(b_raw.len());
            let (a, b) = (&a[..d], &b_raw[..d]);
            let diff = abs_vec(&sub_vec(a, b).unwrap());
            let sum = add_vec(&abs_vec(a), &abs_vec(b)).unwrap();
            for (x, y) in diff.iter().zip(&sum) {
                prop_assert!(x <= y);
            }
        }

        #[test]
        fn lattice_axioms_exact_in_rational_mode(
            a in proptest::collection::vec(arb_rational(), 3),
            b in proptest::collection::vec(arb_rational(), 3),
            c in proptest::collection::vec(arb_rational(), 3),
        ) {
            // commutativity
            prop_assert_eq!(meet(&a, &b).unwrap(), meet(&b, &a).unwrap());
            prop_assert_eq!(join(&a, &b).unwrap(), join(&b, &a).unwrap());
            // associativity
            prop_assert_eq!(
                meet(&meet(&a, &b).unwrap(), &c).unwrap(),
                meet(&a, &meet(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                join(&join(&a, &b).unwrap(), &c).unwrap(),
                join(&a, &join(&b, &c).unwrap()).unwrap()
            );
            // absorption
            prop_assert_eq!(meet(&a, &join(&a, &b).unwrap()).unwrap(), a.clone());
            prop_assert_eq!(join(&a, &meet(&a, &b).unwrap()).unwrap(), a.clone());
        }
    }

    #[test]
    fn certificate_on_reciprocal_sequence() {
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(if n == 0 { 1.0 } else { 1.0 / n as f64 })
        });
        let cert = Certificate::new(
            Mode::Metric,
            "1/n -> 0".into(),
            "0".into(),
            |v: &f64| v.abs(),
            |eps| Ok(Element::nat((1.0 / eps).ceil() as u64)),
        );
        let report =
            check_certificate(&net, &cert, &[0.5, 0.1, 0.01], 200, 0).unwrap();
        assert!(report.pass, "{report:?}");

        // constant net with its constant as limit passes every eps
        let cnet = Net::new(naturals(), ValueSpace::Metric, |_| Ok(0.75f64));
        let ccert = Certificate::new(
            Mode::Metric,
            "const".into(),
            "0.75".into(),
            |v: &f64| (v - 0.75).abs(),
            |_| Ok(Element::nat(0)),
        );
        let creport = check_certificate(&cnet, &ccert, &[0.1, 0.001], 100, 0).unwrap();
        assert!(creport.pass);
        assert!(creport.entries.iter().all(|e| e.max_residual == 0.0));
    }

    #[test]
    fn broken_certificate_fails_at_small_eps() {
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(if n == 0 { 1.0 } else { 1.0 / n as f64 })
        });
        // wrong limit
        let cert = Certificate::new(
            Mode::Metric,
            "1/n -> 0.5 (wrong)".into(),
            "0.5".into(),
            |v: &f64| (v - 0.5).abs(),
            |eps| Ok(Element::nat((1.0 / eps).ceil() as u64)),
        );
        let report = check_certificate(&net, &cert, &[0.5, 0.01], 100, 0).unwrap();
        assert!(!report.pass);
        let last = report.entries.last().unwrap();
        assert!(!last.pass && last.max_residual > 0.01);
    }

    #[test]
    fn grid_must_be_positive_decreasing() {
        let net = Net::new(naturals(), ValueSpace::Metric, |_| Ok(0.0f64));
        let cert = Certificate::new(
            Mode::Metric,
            "zero".into(),
            "0".into(),
            |v: &f64| v.abs(),
            |_| Ok(Element::nat(0)),
        );
        assert!(check_certificate(&net, &cert, &[0.1, 0.5], 10, 0).is_err());
        assert!(check_certificate(&net, &cert, &[-0.1], 10, 0).is_err());
    }
}
