//! The diagonal construction: the sequence diagonal and, for nets, the index
//! set `B` of compatible tuples with its order, join recipe, root cofinal map
//! and per-level (eventual-subnet) maps.
//!
//! `B` consists of tuples `(b_0, ..., b_k)` with `b_{i-1} = phi_i(b_i)`
//! (compatibility is canonical-encoding equality), ordered lengthwise and
//! componentwise. Its join executes the directedness argument literally:
//! bound the roots, pull witnesses up level by level, then push the top back
//! down through the maps. Every law this module claims is checked by the
//! sampling harnesses here and exhaustively by [`crate::oracle`].

use std::sync::{Arc, Mutex};

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convergence::Certificate;
use crate::directed::{DirectedSet, DirectedSetOps};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extractors::{Extraction, Extractor, IdentityExtractor};
use crate::nets::{subnet, tail_restrict, CofinalMap, Net};
use crate::par;
use crate::report::{DiagonalReport, LevelOutcome, TailEntry};
use crate::rng;

// ---------------------------------------------------------------------------
// Sequence diagonal
// ---------------------------------------------------------------------------

/// Strictly increasing index map ℕ -> ℕ (1-based domain).
pub struct Selector {
    f: Box<dyn Fn(u64) -> u64 + Send + Sync>,
}

impl Selector {
    pub fn new<F: Fn(u64) -> u64 + Send + Sync + 'static>(f: F) -> Self {
        Selector { f: Box::new(f) }
    }

    pub fn identity() -> Self {
        Selector::new(|n| n)
    }

    /// Evaluate at `m`, verifying strict growth on the consulted step.
    fn eval_checked(&self, m: u64) -> Result<u64> {
        let v = (self.f)(m);
        if m >= 2 && (self.f)(m - 1) >= v {
            return Err(Error::Contract(format!(
                "selector not strictly increasing at {m}"
            )));
        }
        Ok(v)
    }
}

/// The stage-`k` re-index of the diagonal sequence:
/// `phi_{k+1} o ... o phi_n (n)`. With `k = 0` this is the diagonal index
/// itself. Lazy: only selectors `k+1 ..= n` are consulted.
pub fn stage_reindex(selectors: &[Selector], k: usize, n: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::Contract("n must be >= 1".into()));
    }
    if (selectors.len() as u64) < n {
        return Err(Error::Contract(format!(
            "need selectors 1..={n}, have {}",
            selectors.len()
        )));
    }
    let mut m = n;
    let mut j = n;
    while j > k as u64 {
        m = selectors[(j - 1) as usize].eval_checked(m)?;
        j -= 1;
    }
    Ok(m)
}

/// `phi_1 o ... o phi_n (n)`: the n-th index of the diagonal sequence.
pub fn diagonal_subsequence(selectors: &[Selector], n: u64) -> Result<u64> {
    stage_reindex(selectors, 0, n)
}

// ---------------------------------------------------------------------------
// Extraction chains
// ---------------------------------------------------------------------------

/// One materialized stage of a chain: the index set `A_k`, the cofinal map
/// `phi_k : A_k -> A_{k-1}`, the property certificate (when the extractor
/// produced one), and the stage subnet `x^k`.
pub struct StageView<V> {
    pub index: DirectedSet,
    pub map: CofinalMap,
    pub certificate: Option<Certificate<V>>,
    pub net: Net<V>,
}

impl<V> Clone for StageView<V> {
    fn clone(&self) -> Self {
        StageView {
            index: self.index.clone(),
            map: self.map.clone(),
            certificate: self.certificate.clone(),
            net: self.net.clone(),
        }
    }
}

enum StageSource<V> {
    Extractors(Vec<Arc<dyn Extractor<V>>>),
    Fixed,
}

struct ChainInner<V> {
    base: Net<V>,
    seed: u64,
    depth: usize,
    source: StageSource<V>,
    stages: Mutex<Vec<StageView<V>>>,
}

/// Chain of subnet extractions `A_0 <- A_1 <- ...` with memoized, lazily
/// produced stages. Stage production is deterministic given (net,
/// extractors, seed), so the cache behaves as if purely functional.
pub struct Chain<V> {
    inner: Arc<ChainInner<V>>,
}

impl<V> Clone for Chain<V> {
    fn clone(&self) -> Self {
        Chain {
            inner: self.inner.clone(),
        }
    }
}

impl<V: Clone + Send + Sync + 'static> Chain<V> {
    /// Lazy chain driven by extractors; stage `k` is produced by applying
    /// extractor `k` to the stage-`k-1` subnet with a level-derived seed.
    pub fn build(
        base: Net<V>,
        extractors: Vec<Arc<dyn Extractor<V>>>,
        depth: usize,
        seed: u64,
    ) -> Result<Chain<V>> {
        if depth > extractors.len() {
            return Err(Error::Contract(format!(
                "depth {depth} exceeds the {} supplied extractors",
                extractors.len()
            )));
        }
        Ok(Chain {
            inner: Arc::new(ChainInner {
                base,
                seed,
                depth,
                source: StageSource::Extractors(extractors),
                stages: Mutex::new(Vec::new()),
            }),
        })
    }

    /// Chain from explicit stages (used by hand-built instances and the
    /// finite-model oracle). Maps must link: `maps[k].target = A_{k-1}`.
    pub fn from_stages(
        base: Net<V>,
        stages: Vec<(DirectedSet, CofinalMap, Option<Certificate<V>>)>,
    ) -> Result<Chain<V>> {
        let mut views: Vec<StageView<V>> = Vec::with_capacity(stages.len());
        let mut prev_index = base.index.clone();
        let mut prev_net = base.clone();
        for (k, (index, map, certificate)) in stages.into_iter().enumerate() {
            if !map.target.same_as(&prev_index) {
                return Err(Error::IndexMismatch {
                    expected: prev_index.descriptor(),
                    found: map.target.descriptor(),
                }
                .at_level(k + 1));
            }
            if !map.source.same_as(&index) {
                return Err(Error::IndexMismatch {
                    expected: index.descriptor(),
                    found: map.source.descriptor(),
                }
                .at_level(k + 1));
            }
            let net = subnet(&prev_net, &map)?;
            prev_index = index.clone();
            prev_net = net.clone();
            views.push(StageView {
                index,
                map,
                certificate,
                net,
            });
        }
        let depth = views.len();
        Ok(Chain {
            inner: Arc::new(ChainInner {
                base,
                seed: 0,
                depth,
                source: StageSource::Fixed,
                stages: Mutex::new(views),
            }),
        })
    }

    pub fn depth(&self) -> usize {
        self.inner.depth
    }

    pub fn seed(&self) -> u64 {
        self.inner.seed
    }

    pub fn base(&self) -> Net<V> {
        self.inner.base.clone()
    }

    fn ensure(&self, k: usize) -> Result<()> {
        if k > self.inner.depth {
            return Err(Error::Contract(format!(
                "stage {k} exceeds chain depth {}",
                self.inner.depth
            )));
        }
        let mut stages = self.inner.stages.lock().unwrap();
        while stages.len() < k {
            let level = stages.len() + 1;
            let prev_net = if level == 1 {
                self.inner.base.clone()
            } else {
                stages[level - 2].net.clone()
            };
            let extractor = match &self.inner.source {
                StageSource::Extractors(list) => &list[level - 1],
                StageSource::Fixed => {
                    return Err(Error::Internal("fixed chain missing stages".into()))
                }
            };
            let Extraction {
                stage,
                map,
                certificate,
            } = extractor
                .build(&prev_net, rng::mix(self.inner.seed, level as u64))
                .map_err(|e| e.at_level(level))?;
            if !map.target.same_as(&prev_net.index) {
                return Err(Error::IndexMismatch {
                    expected: prev_net.index.descriptor(),
                    found: map.target.descriptor(),
                }
                .at_level(level));
            }
            let net = subnet(&prev_net, &map).map_err(|e| e.at_level(level))?;
            stages.push(StageView {
                index: stage,
                map,
                certificate,
                net,
            });
        }
        Ok(())
    }

    /// Stage `k` (1-based).
    pub fn stage(&self, k: usize) -> Result<StageView<V>> {
        if k == 0 {
            return Err(Error::Contract("stage index is 1-based".into()));
        }
        self.ensure(k)?;
        Ok(self.inner.stages.lock().unwrap()[k - 1].clone())
    }

    /// Index set `A_k`, with `A_0` the base index.
    pub fn index_at(&self, k: usize) -> Result<DirectedSet> {
        if k == 0 {
            Ok(self.inner.base.index.clone())
        } else {
            Ok(self.stage(k)?.index)
        }
    }

    /// Subnet `x^k`, with `x^0` the base net.
    pub fn net_at(&self, k: usize) -> Result<Net<V>> {
        if k == 0 {
            Ok(self.inner.base.clone())
        } else {
            Ok(self.stage(k)?.net)
        }
    }
}

// ---------------------------------------------------------------------------
// The diagonal index set B
// ---------------------------------------------------------------------------

fn tuple_levels(e: &Element) -> Result<&[Element]> {
    match e.as_tuple() {
        Some(levels) if !levels.is_empty() => Ok(levels),
        _ => Err(Error::Parse(e.encode())),
    }
}

/// Membership in `B`: every level belongs to its stage and consecutive
/// levels are compatible under the stage maps (encoding equality). Levels
/// beyond materialized depth trigger lazy stage builds; build failures
/// propagate.
pub fn diag_member<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    e: &Element,
) -> Result<bool> {
    let levels = match e.as_tuple() {
        Some(levels) if !levels.is_empty() => levels,
        _ => return Ok(false),
    };
    if levels.len() > chain.depth() + 1 {
        return Ok(false);
    }
    for (i, x) in levels.iter().enumerate() {
        if !chain.index_at(i)?.contains(x) {
            return Ok(false);
        }
    }
    for i in 1..levels.len() {
        let projected = chain.stage(i)?.map.apply(&levels[i])?;
        if projected != levels[i - 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The order on `B`: `(b_0..b_p) <= (g_0..g_q)` iff `p <= q` and
/// `b_i <= g_i` in `A_i` for `0 <= i <= p`.
pub fn diag_leq<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    beta: &Element,
    gamma: &Element,
) -> Result<bool> {
    let (bs, gs) = (tuple_levels(beta)?, tuple_levels(gamma)?);
    if bs.len() > gs.len() {
        return Ok(false);
    }
    for i in 0..bs.len() {
        if !chain.index_at(i)?.leq(&bs[i], &gs[i])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which join recipe to run; `SkipWitness` omits the cofinality-witness step
/// of the directedness argument and exists as a mutation hook for the
/// finite-model oracle's negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinVariant {
    Proof,
    SkipWitness,
}

/// The join recipe, executed literally. With `p <= q` (swap otherwise):
/// `t_0 = ub(b_0, g_0)`; for `i = 1..q` take `w_i = witness_i(t_{i-1})` and
/// `t_i = ub(ub(w_i, b_i), g_i)` (missing levels of the shorter tuple borrow
/// the longer one's entries); finally `a_q = t_q` and `a_{i-1} =
/// phi_i(a_i)` downward. The output is a member of `B` dominating both
/// inputs — the specific tuple the argument produces, not a minimal bound.
pub fn diag_join_with<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    beta: &Element,
    gamma: &Element,
    variant: JoinVariant,
) -> Result<Element> {
    let (mut bs, mut gs) = (tuple_levels(beta)?, tuple_levels(gamma)?);
    if bs.len() > gs.len() {
        std::mem::swap(&mut bs, &mut gs);
    }
    let p = bs.len() - 1;
    let q = gs.len() - 1;

    let mut theta: Vec<Element> = Vec::with_capacity(q + 1);
    theta.push(chain.index_at(0)?.upper_bound(&bs[0], &gs[0])?);
    for i in 1..=q {
        let stage = chain.stage(i)?;
        let borrowed = if i <= p { &bs[i] } else { &gs[i] };
        let t = match variant {
            JoinVariant::Proof => {
                let w = stage.map.witness(&theta[i - 1])?;
                let wb = stage.index.upper_bound(&w, borrowed)?;
                stage.index.upper_bound(&wb, &gs[i])?
            }
            JoinVariant::SkipWitness => stage.index.upper_bound(borrowed, &gs[i])?,
        };
        theta.push(t);
    }

    let mut alpha = theta;
    for i in (1..=q).rev() {
        alpha[i - 1] = chain.stage(i)?.map.apply(&alpha[i])?;
    }
    Ok(Element::tuple(alpha))
}

/// `B`'s upper bound: the proof recipe.
pub fn diag_join<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    beta: &Element,
    gamma: &Element,
) -> Result<Element> {
    diag_join_with(chain, beta, gamma, JoinVariant::Proof)
}

struct DiagonalSetOps<V> {
    chain: Chain<V>,
}

impl<V: Clone + Send + Sync + 'static> DiagonalSetOps<V> {
    fn sample_member(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        use rand::Rng as _;
        let k = rng.gen_range(0..=self.chain.depth());
        let top = self.chain.index_at(k)?.sample(rng)?;
        let mut levels = vec![top; k + 1];
        for i in (1..=k).rev() {
            levels[i - 1] = self.chain.stage(i)?.map.apply(&levels[i])?;
        }
        Ok(Element::tuple(levels))
    }
}

impl<V: Clone + Send + Sync + 'static> DirectedSetOps for DiagonalSetOps<V> {
    fn descriptor(&self) -> String {
        format!(
            "diagonal({};depth={};seed={})",
            self.chain.base().index.descriptor(),
            self.chain.depth(),
            self.chain.seed()
        )
    }

    fn contains(&self, e: &Element) -> bool {
        diag_member(&self.chain, e).unwrap_or(false)
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        diag_leq(&self.chain, a, b)
    }

    fn upper_bound(&self, a: &Element, b: &Element) -> Result<Element> {
        diag_join(&self.chain, a, b)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        self.sample_member(rng)
    }

    fn sample_above(&self, a: &Element, rng: &mut ChaCha8Rng) -> Result<Element> {
        let other = self.sample_member(rng)?;
        diag_join(&self.chain, a, &other)
    }

    fn base_point(&self) -> Element {
        Element::tuple(vec![self.chain.base().index.base_point()])
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// `B` as a directed set handle.
pub fn diagonal_set<V: Clone + Send + Sync + 'static>(chain: &Chain<V>) -> DirectedSet {
    DirectedSet::new(DiagonalSetOps {
        chain: chain.clone(),
    })
}

/// The diagonal net `y_b = x_{b_0}` over `B`.
pub fn diagonal_net<V: Clone + Send + Sync + 'static>(chain: &Chain<V>) -> Net<V> {
    let base = chain.base();
    let eval_base = base.clone();
    Net::new(diagonal_set(chain), base.space, move |e| {
        let levels = tuple_levels(e)?;
        eval_base.eval(&levels[0])
    })
}

/// The root map `B -> A_0`, `b -> b_0`, with witness
/// `a_0 -> (phi_1(g_1), g_1)` for `g_1 = witness_1(a_0)`.
pub fn diag_root_map<V: Clone + Send + Sync + 'static>(chain: &Chain<V>) -> Result<CofinalMap> {
    if chain.depth() < 1 {
        return Err(Error::Contract("root map needs chain depth >= 1".into()));
    }
    let source = diagonal_set(chain);
    let target = chain.base().index;
    let wchain = chain.clone();
    Ok(CofinalMap::new(
        source,
        target,
        |e| Ok(tuple_levels(e)?[0].clone()),
        move |a0| {
            let stage = wchain.stage(1)?;
            let g1 = stage.map.witness(a0)?;
            let g0 = stage.map.apply(&g1)?;
            Ok(Element::tuple(vec![g0, g1]))
        },
    ))
}

/// The level-`n` map realizing "the diagonal is an eventual subnet of
/// `x^n`": from the tail of `B` above `anchor` (length >= n+2) into `A_n`,
/// `b -> b_n`, witnessed through `witness_{n+1}` and the join with the
/// anchor.
pub fn diag_level_map<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    n: usize,
    anchor: &Element,
) -> Result<CofinalMap> {
    let levels = tuple_levels(anchor)?;
    if levels.len() < n + 2 {
        return Err(Error::AnchorTooShort {
            needed: n + 2,
            got: levels.len(),
        });
    }
    if !diag_member(chain, anchor)? {
        return Err(Error::MalformedElement {
            set: "diagonal index set".into(),
            element: anchor.encode(),
        });
    }
    let dset = diagonal_set(chain);
    let source = tail_restrict(&dset, anchor)?;
    let target = chain.index_at(n)?;
    let wchain = chain.clone();
    let wanchor = anchor.clone();
    Ok(CofinalMap::new(
        source,
        target,
        move |e| {
            let levels = tuple_levels(e)?;
            levels.get(n).cloned().ok_or(Error::AnchorTooShort {
                needed: n + 1,
                got: levels.len(),
            })
        },
        move |a_n| {
            let mut g = vec![a_n.clone(); n + 2];
            g[n + 1] = wchain.stage(n + 1)?.map.witness(a_n)?;
            for i in (1..=n + 1).rev() {
                g[i - 1] = wchain.stage(i)?.map.apply(&g[i])?;
            }
            let gamma = Element::tuple(g);
            diag_join(&wchain, &wanchor, &gamma)
        },
    ))
}

/// Deterministic member of `B` of the given length: base points extended
/// downward from stage `len-1`.
pub fn canonical_member<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    len: usize,
) -> Result<Element> {
    if len == 0 || len > chain.depth() + 1 {
        return Err(Error::Contract(format!(
            "member length {len} outside 1..={}",
            chain.depth() + 1
        )));
    }
    let top = chain.index_at(len - 1)?.base_point();
    let mut levels = vec![top; len];
    for i in (1..len).rev() {
        levels[i - 1] = chain.stage(i)?.map.apply(&levels[i])?;
    }
    Ok(Element::tuple(levels))
}

// ---------------------------------------------------------------------------
// run_diagonal
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum EpsPlan {
    Fixed(Vec<f64>),
    PerLevel(Vec<Vec<f64>>),
}

impl EpsPlan {
    fn grid_for(&self, level: usize) -> Vec<f64> {
        match self {
            EpsPlan::Fixed(g) => g.clone(),
            EpsPlan::PerLevel(gs) => gs.get(level - 1).cloned().unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyPlan {
    pub eps: EpsPlan,
    pub samples_per_eps: usize,
    pub seed: u64,
    /// Negative-control hook: claimed tolerances are multiplied by this
    /// factor before checking. 1.0 verifies the honest claims.
    pub tighten: f64,
}

impl VerifyPlan {
    pub fn fixed(eps: Vec<f64>, samples_per_eps: usize, seed: u64) -> Self {
        VerifyPlan {
            eps: EpsPlan::Fixed(eps),
            samples_per_eps,
            seed,
            tighten: 1.0,
        }
    }
}

/// Build the chain, the diagonal net and the root map, then re-check each
/// level's certificate against the diagonal net restricted to the tail above
/// a canonical length-(k+2) anchor. A trailing identity stage supplies the
/// `A_{K+1}` needed by the level-`K` eventual-subnet witness. Extraction and
/// witness failures are recorded per level; the report is still emitted.
pub fn run_diagonal<V: Clone + Send + Sync + 'static>(
    base: &Net<V>,
    extractors: Vec<Arc<dyn Extractor<V>>>,
    depth: usize,
    plan: &VerifyPlan,
) -> DiagonalReport {
    run_diagonal_with_chain(base, extractors, depth, plan).0
}

/// [`run_diagonal`], additionally handing back the built chain for
/// scenario-level follow-up checks on the same tails.
pub fn run_diagonal_with_chain<V: Clone + Send + Sync + 'static>(
    base: &Net<V>,
    extractors: Vec<Arc<dyn Extractor<V>>>,
    depth: usize,
    plan: &VerifyPlan,
) -> (DiagonalReport, Option<Chain<V>>) {
    let mut report = DiagonalReport {
        depth,
        seed: plan.seed,
        root_law_checked: 0,
        root_law_violations: 0,
        levels: Vec::new(),
        errors: Vec::new(),
        pass: false,
    };

    let mut all: Vec<Arc<dyn Extractor<V>>> = extractors;
    all.truncate(depth);
    all.push(Arc::new(IdentityExtractor::new("tail stage")));
    let chain = match Chain::build(base.clone(), all, depth + 1, plan.seed) {
        Ok(c) => c,
        Err(e) => {
            report.errors.push(e.to_string());
            return (report, None);
        }
    };

    let mut built = 0usize;
    for k in 1..=depth + 1 {
        match chain.stage(k) {
            Ok(_) => built = k,
            Err(e) => {
                report.errors.push(e.to_string());
                break;
            }
        }
    }

    // root-map cofinality, sampled
    if built >= 1 {
        match diag_root_map(&chain) {
            Ok(root) => {
                let check = crate::nets::check_cofinal_law(&root, plan.samples_per_eps, plan.seed);
                report.root_law_checked = check.checked;
                report.root_law_violations = check.violations + check.errors;
            }
            Err(e) => report.errors.push(e.to_string()),
        }
    }

    let dnet = diagonal_net(&chain);
    let checkable = built.saturating_sub(1).min(depth);
    for k in 1..=checkable {
        let stage = match chain.stage(k) {
            Ok(s) => s,
            Err(_) => break,
        };
        let Some(cert) = stage.certificate else {
            report.levels.push(LevelOutcome {
                level: k,
                label: "no certificate".into(),
                mode: None,
                limit: String::new(),
                entries: Vec::new(),
                pass: true,
            });
            continue;
        };
        let mut outcome = LevelOutcome {
            level: k,
            label: cert.label.clone(),
            mode: Some(cert.mode),
            limit: cert.limit_label.clone(),
            entries: Vec::new(),
            pass: true,
        };
        let transport = canonical_member(&chain, k + 2)
            .and_then(|anchor| diag_level_map(&chain, k, &anchor));
        let level_map = match transport {
            Ok(m) => m,
            Err(e) => {
                report
                    .errors
                    .push(format!("level {k} transport failed: {e}"));
                outcome.pass = false;
                report.levels.push(outcome);
                continue;
            }
        };
        for eps in plan.eps.grid_for(k) {
            let claimed = eps * plan.tighten;
            let entry = check_level_tail(
                &dnet, &level_map, &cert, eps, claimed, plan.samples_per_eps, plan.seed, k,
            );
            outcome.pass &= entry.pass;
            outcome.entries.push(entry);
        }
        report.levels.push(outcome);
    }

    report.pass = report.errors.is_empty()
        && report.levels.iter().all(|l| l.pass)
        && report.root_law_violations == 0
        && checkable == depth;
    (report, Some(chain))
}

/// Values of the diagonal net over the stage-`level` certified tail at
/// tolerance `eps`: anchor the certificate, transport through the level map,
/// and sample the tail above the transported witness.
pub fn certified_tail_values<V: Clone + Send + Sync + 'static>(
    chain: &Chain<V>,
    level: usize,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<V>> {
    let stage = chain.stage(level)?;
    let cert = stage
        .certificate
        .ok_or_else(|| Error::Contract(format!("stage {level} has no certificate")))?;
    let a_eps = cert.tail_witness(eps)?;
    let anchor = canonical_member(chain, level + 2)?;
    let map = diag_level_map(chain, level, &anchor)?;
    let theta = map.witness(&a_eps)?;
    let dnet = diagonal_net(chain);
    par::map_indexed(samples, |i| {
        let mut rng = rng::rng_at(seed, 0x7a11 ^ ((level as u64) << 32) ^ i as u64);
        let idx = map.source.sample_above(&theta, &mut rng)?;
        dnet.eval(&idx)
    })
    .into_iter()
    .collect()
}

#[allow(clippy::too_many_arguments)]
fn check_level_tail<V: Clone + Send + Sync + 'static>(
    dnet: &Net<V>,
    level_map: &CofinalMap,
    cert: &Certificate<V>,
    eps: f64,
    claimed: f64,
    samples: usize,
    seed: u64,
    level: usize,
) -> TailEntry {
    let mut entry = TailEntry {
        eps: claimed,
        anchor: None,
        theta: None,
        checked: 0,
        max_residual: f64::NAN,
        law_violations: 0,
        pass: false,
        error: None,
    };
    let a_eps = match cert.tail_witness(eps) {
        Ok(a) => a,
        Err(e) => {
            entry.error = Some(e.to_string());
            return entry;
        }
    };
    entry.anchor = Some(a_eps.encode());
    let theta = match level_map.witness(&a_eps) {
        Ok(t) => t,
        Err(e) => {
            entry.error = Some(e.to_string());
            return entry;
        }
    };
    entry.theta = Some(theta.encode());

    let results = par::map_indexed(samples, |i| {
        let mut rng = rng::rng_at(seed, (level as u64) << 40 | (i as u64));
        let idx = level_map.source.sample_above(&theta, &mut rng)?;
        let value = dnet.eval(&idx)?;
        let residual = cert.residual(&value);
        let projected = level_map.apply(&idx)?;
        let law_ok = level_map.target.leq(&a_eps, &projected)?;
        Ok::<(f64, bool), Error>((residual, law_ok))
    });
    let mut max_residual: f64 = 0.0;
    for r in results {
        match r {
            Ok((res, law_ok)) => {
                entry.checked += 1;
                max_residual = max_residual.max(res);
                if !law_ok {
                    entry.law_violations += 1;
                }
            }
            Err(e) => {
                if entry.error.is_none() {
                    entry.error = Some(e.to_string());
                }
            }
        }
    }
    entry.max_residual = max_residual;
    entry.pass = entry.error.is_none()
        && entry.checked == samples
        && entry.law_violations == 0
        && max_residual <= claimed;
    entry
}

// ---------------------------------------------------------------------------
// Hand-built infinite chains (law-suite instances)
// ---------------------------------------------------------------------------

/// Named chain instances over infinite index sets used by the law suites.
pub mod instances {
    use super::*;
    use crate::directed::{naturals, ProductDirectedSet};
    use crate::nets::ValueSpace;

    fn nat_net() -> Net<f64> {
        Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(if n == 0 { 1.0 } else { 1.0 / n as f64 })
        })
    }

    fn product_net() -> Net<f64> {
        let index = ProductDirectedSet::new(vec![naturals(), naturals()]);
        Net::new(index, ValueSpace::Metric, |e| {
            let parts = e.as_tuple().unwrap();
            let t = parts[0].as_nat().unwrap() + parts[1].as_nat().unwrap();
            Ok(1.0 / (1.0 + t as f64))
        })
    }

    /// All stages equal ℕ with identity maps.
    pub fn identity_chain(depth: usize) -> Chain<f64> {
        let net = nat_net();
        let stages = (0..depth)
            .map(|_| (net.index.clone(), CofinalMap::identity(&net.index), None))
            .collect();
        Chain::from_stages(net, stages).expect("identity chain links")
    }

    /// Every map doubles: `phi_i(n) = 2n`, witness `ceil(a/2)`.
    pub fn doubling_chain(depth: usize) -> Chain<f64> {
        let net = nat_net();
        let d = net.index.clone();
        let stages = (0..depth)
            .map(|_| {
                let map = CofinalMap::new(
                    d.clone(),
                    d.clone(),
                    |e| Ok(Element::nat(2 * e.as_nat().unwrap())),
                    |a| Ok(Element::nat(a.as_nat().unwrap().div_ceil(2))),
                );
                (d.clone(), map, None)
            })
            .collect();
        Chain::from_stages(net, stages).expect("doubling chain links")
    }

    /// Stages over ℕ x ℕ, maps doubling the first coordinate and shifting
    /// the second.
    pub fn product_chain(depth: usize) -> Chain<f64> {
        let net = product_net();
        let d = net.index.clone();
        let stages = (0..depth)
            .map(|_| {
                let map = CofinalMap::new(
                    d.clone(),
                    d.clone(),
                    |e| {
                        let p = e.as_tuple().unwrap();
                        Ok(Element::pair(
                            Element::nat(2 * p[0].as_nat().unwrap()),
                            Element::nat(p[1].as_nat().unwrap() + 1),
                        ))
                    },
                    |a| {
                        let p = a.as_tuple().unwrap();
                        Ok(Element::pair(
                            Element::nat(p[0].as_nat().unwrap().div_ceil(2)),
                            Element::nat(p[1].as_nat().unwrap().saturating_sub(1)),
                        ))
                    },
                );
                (d.clone(), map, None)
            })
            .collect();
        Chain::from_stages(net, stages).expect("product chain links")
    }

    /// Heterogeneous stages: ℕ <- ℕ (doubling) <- ℕ x ℕ (sum map).
    pub fn mixed_chain() -> Chain<f64> {
        let net = nat_net();
        let nats = net.index.clone();
        let prod = ProductDirectedSet::new(vec![naturals(), naturals()]);
        let double = CofinalMap::new(
            nats.clone(),
            nats.clone(),
            |e| Ok(Element::nat(2 * e.as_nat().unwrap())),
            |a| Ok(Element::nat(a.as_nat().unwrap().div_ceil(2))),
        );
        let sum = CofinalMap::new(
            prod.clone(),
            nats.clone(),
            |e| {
                let p = e.as_tuple().unwrap();
                Ok(Element::nat(
                    p[0].as_nat().unwrap() + p[1].as_nat().unwrap(),
                ))
            },
            |a| Ok(Element::pair(a.clone(), Element::nat(0))),
        );
        Chain::from_stages(
            net,
            vec![
                (nats.clone(), double, None),
                (prod, sum, None),
            ],
        )
        .expect("mixed chain links")
    }

    /// Shift maps `phi_i(n) = n + i`.
    pub fn shift_chain(depth: usize) -> Chain<f64> {
        let net = nat_net();
        let d = net.index.clone();
        let stages = (1..=depth as u64)
            .map(|i| {
                let map = CofinalMap::new(
                    d.clone(),
                    d.clone(),
                    move |e: &Element| Ok(Element::nat(e.as_nat().unwrap() + i)),
                    move |a: &Element| Ok(Element::nat(a.as_nat().unwrap().saturating_sub(i))),
                );
                (d.clone(), map, None)
            })
            .collect();
        Chain::from_stages(net, stages).expect("shift chain links")
    }

    /// The five law-suite instances.
    pub fn all() -> Vec<(&'static str, Chain<f64>)> {
        vec![
            ("identity", identity_chain(3)),
            ("doubling", doubling_chain(3)),
            ("product", product_chain(3)),
            ("mixed", mixed_chain()),
            ("shift", shift_chain(3)),
        ]
    }
}

/// Sampled law suite for one chain: join membership + dominance, root-map
/// cofinality, level-map cofinality. Zero tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct DiagLawReport {
    pub chain: String,
    pub join_checked: usize,
    pub join_violations: usize,
    pub root_checked: usize,
    pub root_violations: usize,
    pub level_checked: usize,
    pub level_violations: usize,
    pub counterexample: Option<String>,
}

impl DiagLawReport {
    pub fn pass(&self) -> bool {
        self.join_violations == 0 && self.root_violations == 0 && self.level_violations == 0
    }
}

pub fn check_diag_laws<V: Clone + Send + Sync + 'static>(
    name: &str,
    chain: &Chain<V>,
    samples: usize,
    seed: u64,
) -> DiagLawReport {
    let dset = diagonal_set(chain);

    // join membership + dominance over sampled pairs
    let join_outcomes = par::map_indexed(samples, |i| -> std::result::Result<(), String> {
        let mut rng = rng::rng_at(seed, i as u64);
        let a = dset.sample(&mut rng).map_err(|e| e.to_string())?;
        let b = dset.sample(&mut rng).map_err(|e| e.to_string())?;
        let j = diag_join(chain, &a, &b).map_err(|e| e.to_string())?;
        let member = diag_member(chain, &j).map_err(|e| e.to_string())?;
        let dom_a = diag_leq(chain, &a, &j).map_err(|e| e.to_string())?;
        let dom_b = diag_leq(chain, &b, &j).map_err(|e| e.to_string())?;
        if member && dom_a && dom_b {
            Ok(())
        } else {
            Err(format!(
                "join({},{}) = {} member={member} dom_a={dom_a} dom_b={dom_b}",
                a.encode(),
                b.encode(),
                j.encode()
            ))
        }
    });

    let root = diag_root_map(chain);
    let root_check = match &root {
        Ok(m) => crate::nets::check_cofinal_law(m, samples, rng::mix(seed, 1)),
        Err(e) => crate::nets::CofinalLawCheck {
            checked: 0,
            violations: 1,
            errors: 1,
            counterexample: Some(vec![e.to_string()]),
        },
    };

    // level-map law at every checkable level, splitting the sample budget
    let max_level = chain.depth().saturating_sub(1);
    let mut level_checked = 0;
    let mut level_violations = 0;
    let mut counterexample: Option<String> = None;
    for n in 0..max_level {
        let per = samples / max_level.max(1);
        let map = canonical_member(chain, n + 2).and_then(|a| diag_level_map(chain, n, &a));
        match map {
            Ok(m) => {
                let c = crate::nets::check_cofinal_law(&m, per, rng::mix(seed, 100 + n as u64));
                level_checked += c.checked;
                level_violations += c.violations + c.errors;
                if counterexample.is_none() {
                    counterexample = c.counterexample.map(|v| v.join(" | "));
                }
            }
            Err(e) => {
                level_violations += 1;
                if counterexample.is_none() {
                    counterexample = Some(e.to_string());
                }
            }
        }
    }

    let mut join_violations = 0;
    for o in &join_outcomes {
        if let Err(ce) = o {
            join_violations += 1;
            if counterexample.is_none() {
                counterexample = Some(ce.clone());
            }
        }
    }
    if counterexample.is_none() {
        counterexample = root_check.counterexample.clone().map(|v| v.join(" | "));
    }

    DiagLawReport {
        chain: name.to_string(),
        join_checked: join_outcomes.len(),
        join_violations,
        root_checked: root_check.checked,
        root_violations: root_check.violations + root_check.errors,
        level_checked,
        level_violations,
        counterexample,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::naturals;
    use crate::nets::ValueSpace;

    #[test]
    fn sequence_diagonal_examples() {
        let id: Vec<Selector> = (0..7).map(|_| Selector::identity()).collect();
        assert_eq!(diagonal_subsequence(&id, 7).unwrap(), 7);

        let dbl: Vec<Selector> = (0..3).map(|_| Selector::new(|m| 2 * m)).collect();
        assert_eq!(diagonal_subsequence(&dbl, 3).unwrap(), 24);

        let mixed = vec![Selector::new(|m| m + 1), Selector::new(|m| 2 * m)];
        assert_eq!(diagonal_subsequence(&mixed, 2).unwrap(), 5);
    }

    #[test]
    fn sequence_diagonal_rejects_bad_selector() {
        let selectors = vec![Selector::identity(), Selector::new(|_| 3)];
        assert!(matches!(
            diagonal_subsequence(&selectors, 2),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn stage_reindex_is_lazy() {
        // selector 3 panics if consulted; with n = 2 it must not be
        let selectors = vec![
            Selector::identity(),
            Selector::new(|m| m + 1),
            Selector::new(|_| panic!("selector 3 consulted")),
        ];
        assert_eq!(diagonal_subsequence(&selectors, 2).unwrap(), 3);
    }

    #[test]
    fn member_examples_on_doubling_chain() {
        let chain = instances::doubling_chain(1);
        let ok = Element::tuple(vec![Element::nat(6), Element::nat(3)]);
        let bad = Element::tuple(vec![Element::nat(5), Element::nat(3)]);
        let single = Element::tuple(vec![Element::nat(5)]);
        assert!(diag_member(&chain, &ok).unwrap());
        assert!(!diag_member(&chain, &bad).unwrap());
        assert!(diag_member(&chain, &single).unwrap());
    }

    #[test]
    fn leq_examples_on_identity_chain() {
        let chain = instances::identity_chain(2);
        let t = |v: &[u64]| Element::tuple(v.iter().map(|&n| Element::nat(n)).collect());
        assert!(diag_leq(&chain, &t(&[3]), &t(&[5, 5])).unwrap());
        assert!(!diag_leq(&chain, &t(&[5]), &t(&[3, 3])).unwrap());
        assert!(!diag_leq(&chain, &t(&[2, 2]), &t(&[3])).unwrap());
    }

    #[test]
    fn join_examples_frozen_from_proof_steps() {
        let t = |v: &[u64]| Element::tuple(v.iter().map(|&n| Element::nat(n)).collect());

        // identity chain: join((3),(5,5)) walks to (5,5)
        let chain = instances::identity_chain(2);
        assert_eq!(diag_join(&chain, &t(&[3]), &t(&[5, 5])).unwrap(), t(&[5, 5]));

        // doubling chain: theta_0 = 6, w_1 = 3, theta_1 = 3, alpha = (6,3)
        let chain = instances::doubling_chain(1);
        assert_eq!(
            diag_join(&chain, &t(&[4, 2]), &t(&[6, 3])).unwrap(),
            t(&[6, 3])
        );

        // join(b, b) dominates b and stays in B
        let b = t(&[4, 2]);
        let j = diag_join(&chain, &b, &b).unwrap();
        assert!(diag_member(&chain, &j).unwrap());
        assert!(diag_leq(&chain, &b, &j).unwrap());
    }

    #[test]
    fn diagonal_net_evaluates_at_root() {
        let chain = instances::doubling_chain(1);
        let dnet = diagonal_net(&chain);
        let e = Element::tuple(vec![Element::nat(6), Element::nat(3)]);
        assert_eq!(dnet.eval(&e).unwrap(), 1.0 / 6.0);
    }

    #[test]
    fn diagonal_net_agrees_with_root_subnet() {
        let chain = instances::doubling_chain(2);
        let dnet = diagonal_net(&chain);
        let root = diag_root_map(&chain).unwrap();
        let via_subnet = subnet(&chain.base(), &root).unwrap();
        let dset = diagonal_set(&chain);
        let mut rng = rng::rng_from(13);
        for _ in 0..1000 {
            let e = dset.sample(&mut rng).unwrap();
            assert_eq!(dnet.eval(&e).unwrap(), via_subnet.eval(&e).unwrap());
        }
    }

    #[test]
    fn root_witness_examples() {
        let chain = instances::doubling_chain(1);
        let root = diag_root_map(&chain).unwrap();
        assert_eq!(
            root.witness(&Element::nat(10)).unwrap(),
            Element::tuple(vec![Element::nat(10), Element::nat(5)])
        );

        let chain = instances::identity_chain(1);
        let root = diag_root_map(&chain).unwrap();
        assert_eq!(
            root.witness(&Element::nat(4)).unwrap(),
            Element::tuple(vec![Element::nat(4), Element::nat(4)])
        );
    }

    #[test]
    fn root_law_sampled() {
        let chain = instances::doubling_chain(2);
        let root = diag_root_map(&chain).unwrap();
        let check = crate::nets::check_cofinal_law(&root, 1000, 3);
        assert!(check.pass(), "{check:?}");
    }

    #[test]
    fn level_map_identity_chain_frozen_example() {
        let chain = instances::identity_chain(2);
        let anchor = Element::tuple(vec![Element::nat(1), Element::nat(1)]);
        let m = diag_level_map(&chain, 0, &anchor).unwrap();
        let theta = m.witness(&Element::nat(7)).unwrap();
        // theta dominates both the anchor and (7,7)
        assert!(diag_leq(&chain, &anchor, &theta).unwrap());
        assert!(diag_leq(
            &chain,
            &Element::tuple(vec![Element::nat(7), Element::nat(7)]),
            &theta
        )
        .unwrap());
        // any sampled member above theta projects to >= 7 at level 0
        let mut rng = rng::rng_from(0);
        for _ in 0..200 {
            let b = m.source.sample_above(&theta, &mut rng).unwrap();
            let b0 = m.apply(&b).unwrap();
            assert!(b0.as_nat().unwrap() >= 7);
        }
    }

    #[test]
    fn level_map_rejects_short_anchor() {
        let chain = instances::identity_chain(2);
        let anchor = Element::tuple(vec![Element::nat(1)]);
        assert!(matches!(
            diag_level_map(&chain, 0, &anchor),
            Err(Error::AnchorTooShort { .. })
        ));
    }

    #[test]
    fn level_map_law_on_doubling_chain() {
        let chain = instances::doubling_chain(3);
        let anchor = canonical_member(&chain, 3).unwrap();
        let m = diag_level_map(&chain, 1, &anchor).unwrap();
        let check = crate::nets::check_cofinal_law(&m, 1000, 17);
        assert!(check.pass(), "{check:?}");
    }

    #[test]
    fn diag_laws_pass_on_all_instances() {
        for (name, chain) in instances::all() {
            let report = check_diag_laws(name, &chain, 500, 23);
            assert!(report.pass(), "{report:?}");
        }
    }

    #[test]
    fn diag_order_is_reflexive_and_transitive_on_samples() {
        let chain = instances::mixed_chain();
        let dset = diagonal_set(&chain);
        let mut rng = rng::rng_from(29);
        for _ in 0..300 {
            let a = dset.sample(&mut rng).unwrap();
            assert!(diag_leq(&chain, &a, &a).unwrap());
            let b = dset.sample_above(&a, &mut rng).unwrap();
            let c = dset.sample_above(&b, &mut rng).unwrap();
            assert!(diag_leq(&chain, &a, &c).unwrap());
        }
    }

    #[test]
    fn run_diagonal_identity_extractors_pass() {
        let net = Net::new(naturals(), ValueSpace::Metric, |e| {
            let n = e.as_nat().unwrap();
            Ok(if n == 0 { 1.0 } else { 1.0 / n as f64 })
        });
        let extractors: Vec<Arc<dyn Extractor<f64>>> = vec![
            Arc::new(IdentityExtractor::new("stage 1")),
            Arc::new(IdentityExtractor::new("stage 2")),
            Arc::new(IdentityExtractor::new("stage 3")),
        ];
        let plan = VerifyPlan::fixed(vec![0.5, 0.1], 50, 0);
        let report = run_diagonal(&net, extractors, 3, &plan);
        assert!(report.pass, "{report:?}");
        assert_eq!(report.levels.len(), 3);
    }
}
