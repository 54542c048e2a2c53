//! Nets, cofinal maps with executable witnesses, tail restrictions, and the
//! frequently-in-a-set subnet construction.
//!
//! A subnet here is a cofinal map: `phi: B -> A` such that for every `a0`
//! there is a witness `w` with `b >= w  =>  phi(b) >= a0`. Witnesses are
//! data, not searches: every [`CofinalMap`] carries its witness function, and
//! the law is checked by sampling with zero tolerance.

use std::any::Any;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::directed::{DirectedSet, DirectedSetOps};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::par;
use crate::rng;

pub type EvalFn<V> = dyn Fn(&Element) -> Result<V> + Send + Sync;
pub type ElemFn = dyn Fn(&Element) -> Result<Element> + Send + Sync;
pub type Pred<V> = dyn Fn(&V) -> bool + Send + Sync;

/// Tag describing what kind of space a net's values live in. Informational;
/// it flows into report labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueSpace {
    Metric,
    LatticeRd,
    AtomicMeasure,
    Functional,
}

/// A net: a deterministic total map from a directed index set into a value
/// space.
pub struct Net<V> {
    pub index: DirectedSet,
    pub space: ValueSpace,
    eval: Arc<EvalFn<V>>,
}

impl<V> Clone for Net<V> {
    fn clone(&self) -> Self {
        Net {
            index: self.index.clone(),
            space: self.space,
            eval: self.eval.clone(),
        }
    }
}

impl<V> Net<V> {
    pub fn new<F>(index: DirectedSet, space: ValueSpace, eval: F) -> Self
    where
        F: Fn(&Element) -> Result<V> + Send + Sync + 'static,
    {
        Net {
            index,
            space,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, e: &Element) -> Result<V> {
        (self.eval)(e)
    }
}

/// Index map between directed sets carrying an executable cofinality witness.
///
/// Law: for all `a0` and all `b` with `witness(a0) <= b` in the source,
/// `a0 <= apply(b)` in the target.
pub struct CofinalMap {
    pub source: DirectedSet,
    pub target: DirectedSet,
    apply: Arc<ElemFn>,
    witness: Arc<ElemFn>,
}

impl Clone for CofinalMap {
    fn clone(&self) -> Self {
        CofinalMap {
            source: self.source.clone(),
            target: self.target.clone(),
            apply: self.apply.clone(),
            witness: self.witness.clone(),
        }
    }
}

impl CofinalMap {
    pub fn new<A, W>(source: DirectedSet, target: DirectedSet, apply: A, witness: W) -> Self
    where
        A: Fn(&Element) -> Result<Element> + Send + Sync + 'static,
        W: Fn(&Element) -> Result<Element> + Send + Sync + 'static,
    {
        CofinalMap {
            source,
            target,
            apply: Arc::new(apply),
            witness: Arc::new(witness),
        }
    }

    pub fn identity(d: &DirectedSet) -> Self {
        CofinalMap::new(
            d.clone(),
            d.clone(),
            |e| Ok(e.clone()),
            |e| Ok(e.clone()),
        )
    }

    pub fn apply(&self, b: &Element) -> Result<Element> {
        (self.apply)(b)
    }

    pub fn witness(&self, a0: &Element) -> Result<Element> {
        (self.witness)(a0)
    }
}

/// Subnet along a cofinal map: same values, reindexed by `m.source`.
pub fn subnet<V: 'static>(x: &Net<V>, m: &CofinalMap) -> Result<Net<V>> {
    if !m.target.same_as(&x.index) {
        return Err(Error::IndexMismatch {
            expected: x.index.descriptor(),
            found: m.target.descriptor(),
        });
    }
    let apply = m.apply.clone();
    let eval = x.eval.clone();
    Ok(Net {
        index: m.source.clone(),
        space: x.space,
        eval: Arc::new(move |e| eval(&apply(e)?)),
    })
}

/// Composition of extractions: `m1: B -> A` after `m2: C -> B` gives `C -> A`
/// with the composite witness `m2.witness . m1.witness`.
pub fn compose_cofinal(m1: &CofinalMap, m2: &CofinalMap) -> Result<CofinalMap> {
    if !m2.target.same_as(&m1.source) {
        return Err(Error::IndexMismatch {
            expected: m1.source.descriptor(),
            found: m2.target.descriptor(),
        });
    }
    let (a1, a2) = (m1.apply.clone(), m2.apply.clone());
    let (w1, w2) = (m1.witness.clone(), m2.witness.clone());
    Ok(CofinalMap {
        source: m2.source.clone(),
        target: m1.target.clone(),
        apply: Arc::new(move |c| a1(&a2(c)?)),
        witness: Arc::new(move |a0| w2(&w1(a0)?)),
    })
}

/// Cofinal map on ℕ from a monotone index function; the witness is built by
/// bounded search and fails loudly when the budget is exhausted.
pub fn nat_cofinal_map<F>(d: &DirectedSet, f: F, budget: u64) -> CofinalMap
where
    F: Fn(u64) -> u64 + Send + Sync + 'static,
{
    let f = Arc::new(f);
    let fw = f.clone();
    CofinalMap::new(
        d.clone(),
        d.clone(),
        move |e| {
            let n = e.as_nat().ok_or_else(|| Error::MalformedElement {
                set: "naturals".into(),
                element: e.encode(),
            })?;
            Ok(Element::nat(f(n)))
        },
        move |a0| {
            let target = a0.as_nat().ok_or_else(|| Error::MalformedElement {
                set: "naturals".into(),
                element: a0.encode(),
            })?;
            (0..=budget)
                .find(|&g| fw(g) >= target)
                .map(Element::nat)
                .ok_or_else(|| Error::WitnessSearchExhausted {
                    context: format!("nat witness for target {target}"),
                    budget: budget as usize,
                })
        },
    )
}

// ---------------------------------------------------------------------------
// Tail restriction
// ---------------------------------------------------------------------------

struct TailRestriction {
    parent: DirectedSet,
    anchor: Element,
}

impl DirectedSetOps for TailRestriction {
    fn descriptor(&self) -> String {
        format!("tail({};{})", self.parent.descriptor(), self.anchor.encode())
    }

    fn contains(&self, e: &Element) -> bool {
        self.parent.contains(e) && self.parent.leq(&self.anchor, e).unwrap_or(false)
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        self.parent.leq(a, b)
    }

    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        // both arguments dominate the anchor, hence so does their bound
        self.parent.upper_bound(a, b)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        self.parent.sample_above(&self.anchor, rng)
    }

    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        self.parent.sample_above(a, rng)
    }

    fn base_point(&self) -> Element {
        self.anchor.clone()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// The sub-directed-set `{ b : anchor <= b }` with the inherited order.
pub fn tail_restrict(d: &DirectedSet, anchor: &Element) -> Result<DirectedSet> {
    d.check_element(anchor)?;
    Ok(DirectedSet::new(TailRestriction {
        parent: d.clone(),
        anchor: anchor.clone(),
    }))
}

// ---------------------------------------------------------------------------
// Frequent subnet
// ---------------------------------------------------------------------------

/// Stage of the frequently-in-a-set construction: pairs `(a, b)` of parent
/// indices with `a <= b` and `value(b) in S`, ordered by first coordinate.
pub struct FrequentStage<V> {
    parent: DirectedSet,
    parent_net: Net<V>,
    pred: Arc<Pred<V>>,
    witness: Arc<ElemFn>,
    label: String,
    budget: usize,
    seed: u64,
    base: Element,
}

fn pair_parts(e: &Element) -> Result<(&Element, &Element)> {
    match e.as_tuple() {
        Some([a, b]) => Ok((a, b)),
        _ => Err(Error::Parse(e.encode())),
    }
}

impl<V: Clone + Send + Sync + 'static> FrequentStage<V> {
    fn value_in_s(&self, b: &Element) -> bool {
        self.parent_net
            .eval(b)
            .map(|v| (self.pred)(&v))
            .unwrap_or(false)
    }

    /// Run the witness for `a` and verify its contract: the result must
    /// dominate `a` and carry a value in `S`.
    fn checked_witness(&self, a: &Element) -> Result<Element> {
        let w = (self.witness)(a)?;
        if !self.parent.leq(a, &w)? {
            return Err(Error::BrokenWitness(format!(
                "{}: witness {} does not dominate {}",
                self.label,
                w.encode(),
                a.encode()
            )));
        }
        if !self.value_in_s(&w) {
            return Err(Error::BrokenWitness(format!(
                "{}: value at witness {} is outside S",
                self.label,
                w.encode()
            )));
        }
        Ok(w)
    }

    fn make_pair(&self, a: &Element) -> Result<Element> {
        let w = self.checked_witness(a)?;
        Ok(Element::pair(a.clone(), w))
    }

    /// Find a stage member at or above `anchor` whose value additionally
    /// satisfies `extra`. Walks the tower of frequent stages down to a single
    /// budgeted search at the base, so the cost does not multiply with depth.
    /// The caller's budget rules the bottoming walk; deep conjunctions are
    /// thinner than any one stage's predicate.
    pub fn find_above(
        &self,
        anchor: &Element,
        extra: &dyn Fn(&V) -> bool,
        budget: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Element> {
        let (a, b) = pair_parts(anchor)?;
        let x = self.parent.upper_bound(a, b)?;
        let pred = self.pred.clone();
        let combined = move |v: &V| pred(v) && extra(v);
        let y = find_member_above(
            &self.parent_net,
            &x,
            &combined,
            budget.max(self.budget),
            self.seed,
            rng,
        )?;
        Ok(Element::pair(x, y))
    }
}

impl<V: Clone + Send + Sync + 'static> DirectedSetOps for FrequentStage<V> {
    fn descriptor(&self) -> String {
        format!("frequent({};{})", self.parent.descriptor(), self.label)
    }

    fn contains(&self, e: &Element) -> bool {
        match pair_parts(e) {
            Ok((a, b)) => {
                self.parent.contains(a)
                    && self.parent.contains(b)
                    && self.parent.leq(a, b).unwrap_or(false)
                    && self.value_in_s(b)
            }
            Err(_) => false,
        }
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        let (a1, _) = pair_parts(a)?;
        let (a2, _) = pair_parts(b)?;
        self.parent.leq(a1, a2)
    }

    fn upper_bound(&self, p1: &Element, p2: &Element) -> Result<Element> {
        let (a1, b1) = pair_parts(p1)?;
        let (a2, b2) = pair_parts(p2)?;
        let ua = self.parent.upper_bound(a1, a2)?;
        let ub = self.parent.upper_bound(b1, b2)?;
        let a = self.parent.upper_bound(&ua, &ub)?;
        self.make_pair(&a)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        let a = self.parent.sample(rng)?;
        self.make_pair(&a)
    }

    fn sample_above(&self, e: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        let (alpha, beta) = pair_parts(e)?;
        let floor = self.parent.upper_bound(alpha, beta)?;
        let a = self.parent.sample_above(&floor, rng)?;
        self.make_pair(&a)
    }

    fn base_point(&self) -> Element {
        self.base.clone()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Find an element of `net.index` at or above `anchor` whose value satisfies
/// `pred`. On a tower of frequent stages this reduces to one budgeted search
/// against the base net with the conjunction of all stage predicates.
pub fn find_member_above<V: Clone + Send + Sync + 'static>(
    net: &Net<V>,
    anchor: &Element,
    pred: &dyn Fn(&V) -> bool,
    budget: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Element> {
    if let Some(fs) = net.index.ops().as_any().downcast_ref::<FrequentStage<V>>() {
        return fs.find_above(anchor, pred, budget, rng);
    }
    if let Ok(v) = net.eval(anchor) {
        if pred(&v) {
            return Ok(anchor.clone());
        }
    }
    // escalating walk: each candidate dominates the previous one, so nearly
    // every draw is a fresh index (independent draws above a fixed anchor
    // would pile onto the same few small offsets)
    let mut cur = anchor.clone();
    for _ in 0..budget {
        cur = net.index.sample_above(&cur, rng)?;
        if let Ok(v) = net.eval(&cur) {
            if pred(&v) {
                return Ok(cur);
            }
        }
    }
    let _ = seed;
    Err(Error::WitnessSearchExhausted {
        context: format!("frequent search above {}", anchor.encode()),
        budget,
    })
}

/// The frequently-in-a-set subnet construction with a caller-supplied
/// witness: `freq_witness(a)` must return `b >= a` with `value(b) in S`.
/// Returns the new stage and the cofinal map `(a, b) -> b` into the parent.
pub fn frequent_subnet<V, P, W>(
    x: &Net<V>,
    label: &str,
    pred: P,
    freq_witness: W,
) -> Result<(DirectedSet, CofinalMap)>
where
    V: Clone + Send + Sync + 'static,
    P: Fn(&V) -> bool + Send + Sync + 'static,
    W: Fn(&Element) -> Result<Element> + Send + Sync + 'static,
{
    frequent_subnet_inner(x, label, Arc::new(pred), Arc::new(freq_witness), 0, 0)
}

/// [`frequent_subnet`] with an automatic witness: budgeted search through the
/// tower of stages beneath `x`, seeded deterministically per anchor.
pub fn frequent_subnet_auto<V, P>(
    x: &Net<V>,
    label: &str,
    pred: P,
    budget: usize,
    seed: u64,
) -> Result<(DirectedSet, CofinalMap)>
where
    V: Clone + Send + Sync + 'static,
    P: Fn(&V) -> bool + Send + Sync + 'static,
{
    let pred: Arc<Pred<V>> = Arc::new(pred);
    let net = x.clone();
    let p = pred.clone();
    let witness = move |a: &Element| {
        let mut rng = rng::rng_at(seed, rng::hash_str(&a.encode()));
        find_member_above(&net, a, &*p, budget, seed, &mut rng)
    };
    frequent_subnet_inner(x, label, pred, Arc::new(witness), budget, seed)
}

fn frequent_subnet_inner<V: Clone + Send + Sync + 'static>(
    x: &Net<V>,
    label: &str,
    pred: Arc<Pred<V>>,
    witness: Arc<ElemFn>,
    budget: usize,
    seed: u64,
) -> Result<(DirectedSet, CofinalMap)> {
    let budget = if budget == 0 { 10_000 } else { budget };
    let mut stage = FrequentStage {
        parent: x.index.clone(),
        parent_net: x.clone(),
        pred,
        witness,
        label: label.to_string(),
        budget,
        seed,
        base: Element::nat(0), // placeholder until the base pair is built
    };
    stage.base = stage.make_pair(&x.index.base_point())?;
    let handle = DirectedSet::new(stage);

    let source = handle.clone();
    let target = x.index.clone();
    let map_target = target.clone();
    let map_source = source.clone();
    let apply = move |e: &Element| {
        let (_, b) = pair_parts(e)?;
        Ok(b.clone())
    };
    let wit_handle = source.clone();
    let witness_fn = move |a0: &Element| -> Result<Element> {
        let fs: &FrequentStage<V> = wit_handle
            .ops()
            .as_any()
            .downcast_ref()
            .ok_or_else(|| Error::Internal("frequent stage type mismatch".into()))?;
        fs.make_pair(a0)
    };
    let map = CofinalMap::new(map_source, map_target, apply, witness_fn);
    Ok((source, map))
}

// ---------------------------------------------------------------------------
// Sampled cofinality law
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CofinalLawCheck {
    pub checked: usize,
    pub violations: usize,
    pub errors: usize,
    pub counterexample: Option<Vec<String>>,
}

impl CofinalLawCheck {
    pub fn pass(&self) -> bool {
        self.violations == 0 && self.errors == 0
    }
}

/// Sample the cofinal-map law with zero tolerance: draw `a0` from the target,
/// then `b >= witness(a0)` from the source, and require `apply(b) >= a0`.
pub fn check_cofinal_law(m: &CofinalMap, samples: usize, seed: u64) -> CofinalLawCheck {
    let outcomes = par::map_indexed(samples, |i| -> std::result::Result<(), (bool, Vec<String>)> {
        let mut rng = rng::rng_at(seed, i as u64);
        let a0 = m
            .target
            .sample(&mut rng)
            .map_err(|e| (true, vec![format!("target sample failed: {e}")]))?;
        let w = m
            .witness(&a0)
            .map_err(|e| (true, vec![a0.encode(), format!("witness failed: {e}")]))?;
        let b = m
            .source
            .sample_above(&w, &mut rng)
            .map_err(|e| (true, vec![a0.encode(), w.encode(), format!("sample failed: {e}")]))?;
        let fb = m
            .apply(&b)
            .map_err(|e| (true, vec![b.encode(), format!("apply failed: {e}")]))?;
        let ok = m.target.leq(&a0, &fb).unwrap_or(false);
        if ok {
            Ok(())
        } else {
            Err((false, vec![a0.encode(), w.encode(), b.encode(), fb.encode()]))
        }
    });

    let mut check = CofinalLawCheck {
        checked: samples,
        violations: 0,
        errors: 0,
        counterexample: None,
    };
    for o in outcomes {
        if let Err((is_error, ce)) = o {
            if is_error {
                check.errors += 1;
            } else {
                check.violations += 1;
            }
            if check.counterexample.is_none() {
                check.counterexample = Some(ce);
            }
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{naturals, ProductDirectedSet};

    fn reciprocal_net() -> Net<f64> {
        Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(if n == 0 { 1.0 } else { 1.0 / n as f64 })
        })
    }

    #[test]
    fn subnet_along_identity_is_same_net() {
        let x = reciprocal_net();
        let m = CofinalMap::identity(&x.index);
        let y = subnet(&x, &m).unwrap();
        for n in [1u64, 2, 17] {
            assert_eq!(
                x.eval(&Element::nat(n)).unwrap(),
                y.eval(&Element::nat(n)).unwrap()
            );
        }
    }

    #[test]
    fn subnet_along_doubling_reindexes() {
        let x = reciprocal_net();
        let m = nat_cofinal_map(&x.index, |n| 2 * n, 1 << 24);
        let y = subnet(&x, &m).unwrap();
        assert_eq!(y.eval(&Element::nat(3)).unwrap(), 1.0 / 6.0);
    }

    #[test]
    fn subnet_rejects_index_mismatch() {
        let x = reciprocal_net();
        let other = ProductDirectedSet::new(vec![naturals(), naturals()]);
        let m = CofinalMap::identity(&other);
        assert!(matches!(subnet(&x, &m), Err(Error::IndexMismatch { .. })));
    }

    #[test]
    fn chained_subnets_equal_subnet_of_composition() {
        let x = reciprocal_net();
        let m1 = nat_cofinal_map(&x.index, |n| 2 * n, 1 << 24);
        let m2 = nat_cofinal_map(&x.index, |n| n + 1, 1 << 24);
        let direct = subnet(&subnet(&x, &m1).unwrap(), &m2).unwrap();
        let composed = subnet(&x, &compose_cofinal(&m1, &m2).unwrap()).unwrap();
        let mut rng = rng::rng_from(7);
        for _ in 0..100 {
            let e = x.index.sample(&mut rng).unwrap();
            assert_eq!(direct.eval(&e).unwrap(), composed.eval(&e).unwrap());
        }
    }

    #[test]
    fn composition_formula() {
        let d = naturals();
        // phi(n) = 2n after psi(n) = n+1: n -> 2n+2
        let phi = nat_cofinal_map(&d, |n| 2 * n, 1 << 24);
        let psi = nat_cofinal_map(&d, |n| n + 1, 1 << 24);
        let comp = compose_cofinal(&phi, &psi).unwrap();
        assert_eq!(comp.apply(&Element::nat(3)).unwrap(), Element::nat(8));

        let id = CofinalMap::identity(&d);
        let same = compose_cofinal(&id, &phi).unwrap();
        assert_eq!(same.apply(&Element::nat(5)).unwrap(), Element::nat(10));
    }

    #[test]
    fn composite_witness_law_holds() {
        let d = naturals();
        let phi = nat_cofinal_map(&d, |n| 2 * n, 1 << 24);
        let psi = nat_cofinal_map(&d, |n| n + 3, 1 << 24);
        let comp = compose_cofinal(&phi, &psi).unwrap();
        let check = check_cofinal_law(&comp, 1000, 3);
        assert!(check.pass(), "{check:?}");
    }

    #[test]
    fn tail_restriction_membership_and_sampling() {
        let d = naturals();
        let tail = tail_restrict(&d, &Element::nat(5)).unwrap();
        assert!(tail.contains(&Element::nat(5)));
        assert!(tail.contains(&Element::nat(9)));
        assert!(!tail.contains(&Element::nat(4)));

        let prod = ProductDirectedSet::new(vec![naturals(), naturals()]);
        let anchor = Element::pair(Element::nat(2), Element::nat(3));
        let quad = tail_restrict(&prod, &anchor).unwrap();
        assert!(quad.contains(&Element::pair(Element::nat(2), Element::nat(7))));
        assert!(!quad.contains(&Element::pair(Element::nat(1), Element::nat(7))));
    }

    #[test]
    fn tail_restriction_is_directed_on_samples() {
        let d = naturals();
        let tail = tail_restrict(&d, &Element::nat(5)).unwrap();
        let mut rng = rng::rng_from(11);
        for _ in 0..500 {
            let a = tail.sample(&mut rng).unwrap();
            let b = tail.sample(&mut rng).unwrap();
            let ub = tail.upper_bound(&a, &b).unwrap();
            assert!(tail.contains(&ub));
            assert!(tail.leq(&a, &ub).unwrap() && tail.leq(&b, &ub).unwrap());
        }
    }

    fn alternating_net() -> Net<f64> {
        Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(if n % 2 == 0 { 1.0 } else { -1.0 })
        })
    }

    #[test]
    fn frequent_subnet_of_alternating_net_is_constant() {
        let x = alternating_net();
        let (stage, map) = frequent_subnet(
            &x,
            "value=1",
            |v: &f64| *v == 1.0,
            |a: &Element| {
                let n = a.as_nat().unwrap();
                Ok(Element::nat(if n % 2 == 0 { n } else { n + 1 }))
            },
        )
        .unwrap();
        let sub = subnet(&x, &map).unwrap();
        // enumerate pairs up to index 50 and check every member value is 1
        let mut members = 0;
        for a in 0..=50u64 {
            for b in a..=50u64 {
                let pair = Element::pair(Element::nat(a), Element::nat(b));
                if stage.contains(&pair) {
                    members += 1;
                    assert_eq!(sub.eval(&pair).unwrap(), 1.0);
                }
            }
        }
        assert!(members > 0);
    }

    #[test]
    fn frequent_subnet_of_constant_net_reindexes() {
        let x = Net::new(naturals(), ValueSpace::Metric, |_| Ok(2.5f64));
        let (stage, map) =
            frequent_subnet(&x, "const", |v: &f64| *v == 2.5, |a: &Element| Ok(a.clone()))
                .unwrap();
        let sub = subnet(&x, &map).unwrap();
        let mut rng = rng::rng_from(0);
        for _ in 0..100 {
            let e = stage.sample(&mut rng).unwrap();
            assert_eq!(sub.eval(&e).unwrap(), 2.5);
        }
    }

    #[test]
    fn frequent_subnet_map_is_cofinal() {
        let x = alternating_net();
        let (_, map) = frequent_subnet(
            &x,
            "value=1",
            |v: &f64| *v == 1.0,
            |a: &Element| {
                let n = a.as_nat().unwrap();
                Ok(Element::nat(if n % 2 == 0 { n } else { n + 1 }))
            },
        )
        .unwrap();
        let check = check_cofinal_law(&map, 1000, 5);
        assert!(check.pass(), "{check:?}");
    }

    #[test]
    fn broken_witness_is_detected() {
        let x = alternating_net();
        // witness ignores S and returns its argument, which may have value -1
        let (_, map) = frequent_subnet(
            &x,
            "value=1",
            |v: &f64| *v == 1.0,
            |a: &Element| Ok(a.clone()),
        )
        .unwrap();
        // anchoring the map at an odd index runs the witness there
        assert!(matches!(
            map.witness(&Element::nat(3)),
            Err(Error::BrokenWitness(_))
        ));
    }

    #[test]
    fn auto_witness_finds_members() {
        let x = alternating_net();
        let (stage, map) = frequent_subnet_auto(&x, "value=1", |v: &f64| *v == 1.0, 1000, 9).unwrap();
        let mut rng = rng::rng_from(2);
        for _ in 0..50 {
            let e = stage.sample(&mut rng).unwrap();
            assert!(stage.contains(&e));
        }
        let check = check_cofinal_law(&map, 300, 6);
        assert!(check.pass(), "{check:?}");
    }
}
