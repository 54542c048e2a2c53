//! Directed sets as executable contracts.
//!
//! Infinite index sets are never enumerated; a [`DirectedSet`] carries
//! comparison, upper-bound and sampling oracles, and all global laws are
//! verified by budgeted sampling (plus the exhaustive finite-model oracle in
//! [`crate::oracle`]). Preorders only: antisymmetry is never assumed.

use std::any::Any;
use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::par;
use crate::rng;

/// Object-safe contract backing a [`DirectedSet`] handle.
///
/// `leq` must be a preorder (reflexive, transitive), `upper_bound` must
/// dominate both arguments (not necessarily least), and `sample_above(a)`
/// must return some `c` with `a <= c`, reaching arbitrarily high under
/// repeated calls.
pub trait DirectedSetOps: Send + Sync {
    fn descriptor(&self) -> String;
    fn contains(&self, e: &Element) -> bool;
    fn leq(&self, a: &Element, b: &Element) -> Result<bool>;
    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element>;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element>;
    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element>;
    /// Canonical element used as a deterministic starting point for
    /// sampling, probing and report anchors.
    fn base_point(&self) -> Element;
    fn as_any(&self) -> &dyn Any;
}

/// Shared, immutable handle to a directed set. Cloning is cheap; all
/// operations are pure, so handles are safe to share across threads.
#[derive(Clone)]
pub struct DirectedSet {
    inner: Arc<dyn DirectedSetOps>,
}

impl DirectedSet {
    pub fn new<O: DirectedSetOps + 'static>(ops: O) -> Self {
        DirectedSet {
            inner: Arc::new(ops),
        }
    }

    pub fn descriptor(&self) -> String {
        self.inner.descriptor()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.inner.contains(e)
    }

    pub fn check_element(&self, e: &Element) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::MalformedElement {
                set: self.descriptor(),
                element: e.encode(),
            })
        }
    }

    pub fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        self.check_element(a)?;
        self.check_element(b)?;
        self.inner.leq(a, b)
    }

    pub fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_element(a)?;
        self.check_element(b)?;
        self.inner.upper_bound(a, b)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        self.inner.sample(rng)
    }

    pub fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        self.check_element(a)?;
        self.inner.sample_above(a, rng)
    }

    pub fn base_point(&self) -> Element {
        self.inner.base_point()
    }

    /// Structural identity used for contract checks between nets and maps.
    pub fn same_as(&self, other: &DirectedSet) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.descriptor() == other.descriptor()
    }

    pub fn ops(&self) -> &dyn DirectedSetOps {
        &*self.inner
    }
}

impl std::fmt::Debug for DirectedSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DirectedSet({})", self.descriptor())
    }
}

// ---------------------------------------------------------------------------
// Shipped instances
// ---------------------------------------------------------------------------

/// Heavy-tailed natural number: reaches arbitrarily high with positive
/// probability while keeping values small enough for exact f64 arithmetic.
fn heavy_nat(rng: &mut ChaCha8Rng) -> u64 {
    let bits = rng.gen_range(0..=16);
    rng.gen_range(0..(1u64 << bits))
}

struct Naturals;

impl DirectedSetOps for Naturals {
    fn descriptor(&self) -> String {
        "naturals".to_string()
    }

    fn contains(&self, e: &Element) -> bool {
        e.as_nat().is_some()
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        Ok(nat(a)? <= nat(b)?)
    }

    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        Ok(Element::nat(nat(a)?.max(nat(b)?)))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        Ok(Element::nat(heavy_nat(rng)))
    }

    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        Ok(Element::nat(nat(a)? + heavy_nat(rng)))
    }

    fn base_point(&self) -> Element {
        Element::nat(0)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn nat(e: &Element) -> Result<u64> {
    e.as_nat().ok_or_else(|| Error::MalformedElement {
        set: "naturals".into(),
        element: e.encode(),
    })
}

/// ℕ with its usual order; `upper_bound` is `max`.
pub fn naturals() -> DirectedSet {
    DirectedSet::new(Naturals)
}

/// Product of directed sets, ordered componentwise.
pub struct ProductDirectedSet {
    factors: Vec<DirectedSet>,
}

impl ProductDirectedSet {
    pub fn new(factors: Vec<DirectedSet>) -> DirectedSet {
        assert!(!factors.is_empty(), "product needs at least one factor");
        DirectedSet::new(ProductDirectedSet { factors })
    }

    fn parts<'e>(&self, e: &'e Element) -> Result<&'e [Element]> {
        match e.as_tuple() {
            Some(items) if items.len() == self.factors.len() => Ok(items),
            _ => Err(Error::MalformedElement {
                set: self.descriptor(),
                element: e.encode(),
            }),
        }
    }
}

impl DirectedSetOps for ProductDirectedSet {
    fn descriptor(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|f| f.descriptor()).collect();
        format!("product({})", names.join(","))
    }

    fn contains(&self, e: &Element) -> bool {
        match e.as_tuple() {
            Some(items) if items.len() == self.factors.len() => items
                .iter()
                .zip(&self.factors)
                .all(|(x, f)| f.contains(x)),
            _ => false,
        }
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        let (xs, ys) = (self.parts(a)?, self.parts(b)?);
        for ((x, y), f) in xs.iter().zip(ys).zip(&self.factors) {
            if !f.leq(x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        let (xs, ys) = (self.parts(a)?, self.parts(b)?);
        let items = xs
            .iter()
            .zip(ys)
            .zip(&self.factors)
            .map(|((x, y), f)| f.upper_bound(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Element::tuple(items))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        let items = self
            .factors
            .iter()
            .map(|f| f.sample(rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Element::tuple(items))
    }

    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        let xs = self.parts(a)?;
        let items = xs
            .iter()
            .zip(&self.factors)
            .map(|(x, f)| f.sample_above(x, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Element::tuple(items))
    }

    fn base_point(&self) -> Element {
        Element::tuple(self.factors.iter().map(|f| f.base_point()).collect())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

struct FiniteSubsets;

impl DirectedSetOps for FiniteSubsets {
    fn descriptor(&self) -> String {
        "finite-subsets-of-naturals".to_string()
    }

    fn contains(&self, e: &Element) -> bool {
        e.as_set().is_some()
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        let (x, y) = (set(a)?, set(b)?);
        Ok(x.is_subset(y))
    }

    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        let (x, y) = (set(a)?, set(b)?);
        Ok(Element::Set(x.union(y).copied().collect()))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        let bound = heavy_nat(rng) % 64;
        let mut s = BTreeSet::new();
        for n in 0..=bound {
            if rng.gen_bool(0.3) {
                s.insert(n);
            }
        }
        Ok(Element::Set(s))
    }

    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        let mut s = set(a)?.clone();
        if let Some(Element::Set(extra)) = self.sample(rng).ok() {
            s.extend(extra);
        }
        Ok(Element::Set(s))
    }

    fn base_point(&self) -> Element {
        Element::Set(BTreeSet::new())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn set(e: &Element) -> Result<&BTreeSet<u64>> {
    e.as_set().ok_or_else(|| Error::MalformedElement {
        set: "finite-subsets-of-naturals".into(),
        element: e.encode(),
    })
}

/// Finite subsets of ℕ ordered by inclusion; `upper_bound` is union.
pub fn finite_subsets() -> DirectedSet {
    DirectedSet::new(FiniteSubsets)
}

/// Explicit finite directed preorder on `n` labelled points, elements
/// `Nat(0)..Nat(n-1)`. The relation matrix is checked exhaustively at
/// construction: reflexive, transitive, every pair bounded above.
#[derive(Clone)]
pub struct FiniteDirectedSet {
    n: usize,
    rel: Vec<bool>, // rel[a*n + b] == (a <= b)
}

impl FiniteDirectedSet {
    pub fn new(n: usize, rel: Vec<bool>) -> Result<Self> {
        if rel.len() != n * n || n == 0 {
            return Err(Error::Contract(format!(
                "relation matrix must be {n}x{n} and nonempty"
            )));
        }
        let d = FiniteDirectedSet { n, rel };
        for a in 0..n {
            if !d.le(a, a) {
                return Err(Error::Contract(format!("not reflexive at {a}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if d.le(a, b) && d.le(b, c) && !d.le(a, c) {
                        return Err(Error::Contract(format!(
                            "not transitive at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if d.join(a, b).is_none() {
                    return Err(Error::Contract(format!(
                        "pair ({a},{b}) has no upper bound"
                    )));
                }
            }
        }
        Ok(d)
    }

    /// Total order 0 <= 1 <= ... <= n-1.
    pub fn chain(n: usize) -> Self {
        let mut rel = vec![false; n * n];
        for a in 0..n {
            for b in a..n {
                rel[a * n + b] = true;
            }
        }
        FiniteDirectedSet::new(n, rel).expect("chain is directed")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.rel[a * self.n + b]
    }

    /// Lowest-index common upper bound; `None` only for non-directed input
    /// (which the constructor rejects).
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.n).find(|&c| self.le(a, c) && self.le(b, c))
    }

    pub fn handle(&self) -> DirectedSet {
        DirectedSet::new(self.clone())
    }

    fn idx(&self, e: &Element) -> Result<usize> {
        match e.as_nat() {
            Some(i) if (i as usize) < self.n => Ok(i as usize),
            _ => Err(Error::MalformedElement {
                set: self.descriptor(),
                element: e.encode(),
            }),
        }
    }

    pub fn bits(&self) -> String {
        self.rel
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

impl DirectedSetOps for FiniteDirectedSet {
    fn descriptor(&self) -> String {
        format!("finite[{}:{}]", self.n, self.bits())
    }

    fn contains(&self, e: &Element) -> bool {
        matches!(e.as_nat(), Some(i) if (i as usize) < self.n)
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        Ok(self.le(self.idx(a)?, self.idx(b)?))
    }

    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        let c = self
            .join(self.idx(a)?, self.idx(b)?)
            .ok_or_else(|| Error::Internal("finite set lost directedness".into()))?;
        Ok(Element::nat(c as u64))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        Ok(Element::nat(rng.gen_range(0..self.n as u64)))
    }

    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        let i = self.idx(a)?;
        let ups: Vec<usize> = (0..self.n).filter(|&c| self.le(i, c)).collect();
        let pick = ups[rng.gen_range(0..ups.len())];
        Ok(Element::nat(pick as u64))
    }

    fn base_point(&self) -> Element {
        Element::nat(0)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------------------
// Sampled law checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct LawResult {
    pub law: String,
    pub checked: usize,
    pub violations: usize,
    pub counterexample: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub set: String,
    pub budget: usize,
    pub laws: Vec<LawResult>,
    pub pass: bool,
}

impl LawReport {
    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.law == name)
    }
}

#[derive(Default, Clone)]
struct Tally {
    checked: usize,
    violations: usize,
    counterexample: Option<Vec<String>>,
}

impl Tally {
    fn record(&mut self, ok: bool, ce: impl FnOnce() -> Vec<String>) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(ce());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.violations += other.violations;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self
    }

    fn into_result(self, law: &str) -> LawResult {
        LawResult {
            law: law.to_string(),
            checked: self.checked,
            violations: self.violations,
            counterexample: self.counterexample,
        }
    }
}

/// Sampled verification of the directed-set laws: reflexivity, transitivity,
/// dominance of `upper_bound`, the `sample_above` contract, and the element
/// codec. Failures are report content, never errors.
pub fn check_laws(d: &DirectedSet, budget: usize, seed: u64) -> LawReport {
    const LAWS: usize = 5;
    let tallies = par::map_indexed(budget, |i| {
        let mut rng = rng::rng_at(seed, i as u64);
        let mut t = vec![Tally::default(); LAWS];
        let enc = |e: &Element| e.encode();

        let a = match d.sample(&mut rng) {
            Ok(a) => a,
            Err(e) => {
                t[0].record(false, || vec![format!("sample failed: {e}")]);
                return t;
            }
        };

        // reflexivity
        let refl = d.leq(&a, &a).unwrap_or(false);
        t[0].record(refl, || vec![enc(&a)]);

        // sample_above contract, then transitivity along a sampled chain
        match d.sample_above(&a, &mut rng) {
            Ok(b) => {
                let above = d.leq(&a, &b).unwrap_or(false);
                t[3].record(above, || vec![enc(&a), enc(&b)]);
                if let Ok(c) = d.sample_above(&b, &mut rng) {
                    let trans = d.leq(&a, &c).unwrap_or(false);
                    t[1].record(trans, || vec![enc(&a), enc(&b), enc(&c)]);
                }
            }
            Err(e) => t[3].record(false, || vec![enc(&a), format!("error: {e}")]),
        }

        // dominance of upper_bound
        if let Ok(b) = d.sample(&mut rng) {
            match d.upper_bound(&a, &b) {
                Ok(ub) => {
                    let dom = d.leq(&a, &ub).unwrap_or(false) && d.leq(&b, &ub).unwrap_or(false);
                    t[2].record(dom, || vec![enc(&a), enc(&b), enc(&ub)]);
                }
                Err(e) => t[2].record(false, || vec![enc(&a), enc(&b), format!("error: {e}")]),
            }
        }

        // encode/decode identity
        let codec = Element::decode(&a.encode()).map(|back| back == a).unwrap_or(false);
        t[4].record(codec, || vec![enc(&a)]);

        t
    });

    let mut merged = vec![Tally::default(); LAWS];
    for row in tallies {
        for (m, t) in merged.iter_mut().zip(row) {
            *m = std::mem::take(m).merge(t);
        }
    }
    let names = [
        "reflexivity",
        "transitivity",
        "dominance",
        "sample_above",
        "codec",
    ];
    let laws: Vec<LawResult> = merged
        .into_iter()
        .zip(names)
        .map(|(t, n)| t.into_result(n))
        .collect();
    let pass = laws.iter().all(|l| l.violations == 0);
    LawReport {
        set: d.descriptor(),
        budget,
        laws,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naturals_order_and_bounds() {
        let d = naturals();
        assert!(d.leq(&Element::nat(3), &Element::nat(5)).unwrap());
        assert!(!d.leq(&Element::nat(5), &Element::nat(3)).unwrap());
        assert_eq!(
            d.upper_bound(&Element::nat(3), &Element::nat(5)).unwrap(),
            Element::nat(5)
        );
        let mut rng = rng::rng_from(0);
        for _ in 0..100 {
            let c = d.sample_above(&Element::nat(7), &mut rng).unwrap();
            assert!(c.as_nat().unwrap() >= 7);
        }
    }

    #[test]
    fn product_order_is_componentwise() {
        let d = ProductDirectedSet::new(vec![naturals(), naturals()]);
        let a = Element::pair(Element::nat(2), Element::nat(7));
        let b = Element::pair(Element::nat(3), Element::nat(5));
        assert!(!d.leq(&a, &b).unwrap());
        assert_eq!(
            d.upper_bound(&a, &b).unwrap(),
            Element::pair(Element::nat(3), Element::nat(7))
        );
    }

    #[test]
    fn subsets_order_by_inclusion() {
        let d = finite_subsets();
        assert!(d.leq(&Element::set([1]), &Element::set([1, 2])).unwrap());
        assert_eq!(
            d.upper_bound(&Element::set([1]), &Element::set([2])).unwrap(),
            Element::set([1, 2])
        );
    }

    #[test]
    fn malformed_elements_are_rejected() {
        let d = naturals();
        let bad = Element::pair(Element::nat(1), Element::nat(2));
        assert!(matches!(
            d.leq(&bad, &Element::nat(0)),
            Err(Error::MalformedElement { .. })
        ));
    }

    #[test]
    fn finite_set_with_top_always_dominates() {
        let d = FiniteDirectedSet::chain(4);
        let h = d.handle();
        let mut rng = rng::rng_from(1);
        for _ in 0..50 {
            let a = h.sample(&mut rng).unwrap();
            let c = h.sample_above(&a, &mut rng).unwrap();
            assert!(h.leq(&a, &c).unwrap());
            // top element is always a valid upper bound
            assert!(h.leq(&a, &Element::nat(3)).unwrap());
        }
    }

    #[test]
    fn finite_constructor_rejects_non_directed() {
        // two-point antichain: reflexive, transitive, but no common bound
        let rel = vec![true, false, false, true];
        assert!(FiniteDirectedSet::new(2, rel).is_err());
    }

    #[test]
    fn laws_pass_on_naturals() {
        let report = check_laws(&naturals(), 1000, 0);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn broken_instance_reports_reflexivity_counterexample() {
        struct Broken;
        impl DirectedSetOps for Broken {
            fn descriptor(&self) -> String {
                "broken".into()
            }
            fn contains(&self, e: &Element) -> bool {
                e.as_nat().is_some()
            }
            fn leq(&self, _: &Element, _: &Element) -> Result<bool> {
                Ok(false)
            }
            fn upper_bound(&self, a: &Element, _: &Element) -> Result<Element> {
                Ok(a.clone())
            }
            fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
                Ok(Element::nat(heavy_nat(rng)))
            }
            fn sample_above(&self, a: &Element, _: &mut ChaCha8Rng) -> Result<Element> {
                Ok(a.clone())
            }
            fn base_point(&self) -> Element {
                Element::nat(0)
            }
            fn as_any(&self) -> &dyn Any {
                self
            }
        }
        let report = check_laws(&DirectedSet::new(Broken), 100, 0);
        assert!(!report.pass);
        let refl = report.law("reflexivity").unwrap();
        assert!(refl.violations > 0);
        assert!(refl.counterexample.is_some());
    }
}
