//! Exhaustive finite-model checker: the ground truth for the diagonal
//! construction's laws.
//!
//! Enumerates every directed preorder on up to [`OracleConfig::max_stage_size`]
//! labelled points, every cofinal map between stages, and every chain up to
//! [`OracleConfig::max_depth`]; then materializes all of `B` and verifies —
//! with no sampling — directedness, the join recipe's output, root- and
//! level-map cofinality, and the eventual-subnet property. A deliberately
//! mutated join must be caught.

use serde::Serialize;

use crate::diagonal::{
    diag_join_with, diag_leq, diag_member, diag_root_map, Chain, JoinVariant,
};
use crate::directed::FiniteDirectedSet;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::nets::{CofinalMap, Net, ValueSpace};
use crate::par;
use crate::report::{OracleReport, OracleViolation, SCHEMA_VERSION};

/// Size caps for exhaustive enumeration; `|B|` grows multiplicatively with
/// depth, so these stay small by design.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleConfig {
    pub max_stage_size: usize,
    pub max_depth: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_stage_size: 4,
            max_depth: 3,
        }
    }
}

pub const ENUM_SIZE_CAP: usize = 4;

/// All reflexive, transitive, upward-directed relations on `n` labelled
/// points. `n` is capped at [`ENUM_SIZE_CAP`].
pub fn enum_directed_preorders(n: usize) -> Result<Vec<FiniteDirectedSet>> {
    if n == 0 || n > ENUM_SIZE_CAP {
        return Err(Error::Budget(format!(
            "preorder enumeration supports 1..={ENUM_SIZE_CAP} points, got {n}"
        )));
    }
    let off_diag: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b)
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << off_diag.len()) {
        let mut rel = vec![false; n * n];
        for a in 0..n {
            rel[a * n + a] = true;
        }
        for (bit, &(a, b)) in off_diag.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                rel[a * n + b] = true;
            }
        }
        if let Ok(d) = FiniteDirectedSet::new(n, rel) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Function table of a cofinal map between finite stages, with the witness
/// table chosen as the lowest-index valid witness per target element.
#[derive(Clone, Debug)]
pub struct CofinalTable {
    pub map: Vec<usize>,
    pub witness: Vec<usize>,
}

impl CofinalTable {
    pub fn identity(n: usize) -> Self {
        CofinalTable {
            map: (0..n).collect(),
            witness: (0..n).collect(),
        }
    }
}

/// All functions `B -> A` satisfying the cofinality law, each with a valid
/// witness table.
pub fn enum_cofinal_maps(b: &FiniteDirectedSet, a: &FiniteDirectedSet) -> Vec<CofinalTable> {
    let (nb, na) = (b.size(), a.size());
    let total = na.pow(nb as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut f = Vec::with_capacity(nb);
        let mut c = code;
        for _ in 0..nb {
            f.push(c % na);
            c /= na;
        }
        // witness(a0) = lowest g in B whose whole up-set maps at or above a0
        let mut witness = Vec::with_capacity(na);
        let mut cofinal = true;
        for a0 in 0..na {
            let w = (0..nb).find(|&g| (0..nb).all(|beta| !b.le(g, beta) || a.le(a0, f[beta])));
            match w {
                Some(g) => witness.push(g),
                None => {
                    cofinal = false;
                    break;
                }
            }
        }
        if cofinal {
            out.push(CofinalTable { map: f, witness });
        }
    }
    out
}

/// A finite chain: stages plus explicit cofinal-map tables. Cofinality of
/// every map is verified exhaustively at construction.
#[derive(Clone)]
pub struct FiniteChain {
    pub stages: Vec<FiniteDirectedSet>,
    pub maps: Vec<CofinalTable>,
}

impl FiniteChain {
    pub fn new(stages: Vec<FiniteDirectedSet>, maps: Vec<CofinalTable>) -> Result<Self> {
        if stages.is_empty() || maps.len() + 1 != stages.len() {
            return Err(Error::Contract(
                "need stages A_0..A_k and one map per step".into(),
            ));
        }
        for (i, m) in maps.iter().enumerate() {
            let (b, a) = (&stages[i + 1], &stages[i]);
            if m.map.len() != b.size() || m.witness.len() != a.size() {
                return Err(Error::Contract(format!("map {i} has wrong arity")));
            }
            for a0 in 0..a.size() {
                let g = m.witness[a0];
                for beta in 0..b.size() {
                    if b.le(g, beta) && !a.le(a0, m.map[beta]) {
                        return Err(Error::Contract(format!(
                            "map {} is not cofinal at target {a0}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(FiniteChain { stages, maps })
    }

    pub fn depth(&self) -> usize {
        self.maps.len()
    }

    pub fn descriptor(&self) -> String {
        let stages: Vec<String> = self
            .stages
            .iter()
            .map(|s| format!("{}:{}", s.size(), s.bits()))
            .collect();
        let maps: Vec<String> = self
            .maps
            .iter()
            .map(|m| {
                m.map
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        format!("stages[{}] maps[{}]", stages.join(";"), maps.join(";"))
    }

    /// Bridge into the production chain machinery: the oracle exercises the
    /// same `diag_*` code paths the infinite instances use.
    pub fn to_chain(&self) -> Chain<f64> {
        let base = Net::new(self.stages[0].handle(), ValueSpace::Metric, |e| {
            Ok(e.as_nat().unwrap_or(0) as f64)
        });
        let stages = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, table)| {
                let src = self.stages[i + 1].handle();
                let tgt = self.stages[i].handle();
                let map_table = table.map.clone();
                let wit_table = table.witness.clone();
                let src_desc = src.descriptor();
                let tgt_desc = tgt.descriptor();
                let map = CofinalMap::new(
                    src.clone(),
                    tgt,
                    move |e| {
                        let i = e.as_nat().ok_or_else(|| Error::MalformedElement {
                            set: src_desc.clone(),
                            element: e.encode(),
                        })? as usize;
                        map_table
                            .get(i)
                            .map(|&x| Element::nat(x as u64))
                            .ok_or_else(|| Error::MalformedElement {
                                set: src_desc.clone(),
                                element: e.encode(),
                            })
                    },
                    move |a0| {
                        let i = a0.as_nat().ok_or_else(|| Error::MalformedElement {
                            set: tgt_desc.clone(),
                            element: a0.encode(),
                        })? as usize;
                        wit_table
                            .get(i)
                            .map(|&x| Element::nat(x as u64))
                            .ok_or_else(|| Error::MalformedElement {
                                set: tgt_desc.clone(),
                                element: a0.encode(),
                            })
                    },
                );
                (src, map, None)
            })
            .collect();
        Chain::from_stages(base, stages).expect("finite chain links")
    }

    /// Every member of `B`: each top element of each stage determines the
    /// lower levels through the maps.
    pub fn all_members(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for k in 0..=self.depth() {
            for top in 0..self.stages[k].size() {
                let mut levels = vec![0usize; k + 1];
                levels[k] = top;
                for i in (1..=k).rev() {
                    levels[i - 1] = self.maps[i - 1].map[levels[i]];
                }
                out.push(Element::tuple(
                    levels.into_iter().map(|x| Element::nat(x as u64)).collect(),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub chain: String,
    pub members: usize,
    pub violations: Vec<OracleViolation>,
}

impl OracleCheck {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn violation(chain: &FiniteChain, kind: &str, detail: String) -> OracleViolation {
    OracleViolation {
        chain: chain.descriptor(),
        kind: kind.to_string(),
        detail,
    }
}

/// Materialize all of `B` and verify the construction exhaustively:
///
/// - directedness of `B` (an upper bound exists, found independently by
///   brute search) and validity of the join recipe's output;
/// - root-map cofinality for every target element;
/// - level-map cofinality for every level and every valid anchor;
/// - the eventual-subnet property: above each anchor, the tail of `B` maps
///   cofinally into `A_n`, witnessed by some element found by brute search.
pub fn brute_check_diagonal(fc: &FiniteChain, variant: JoinVariant) -> OracleCheck {
    let chain = fc.to_chain();
    let members = fc.all_members();
    let mut violations = Vec::new();

    let leq = |x: &Element, y: &Element| diag_leq(&chain, x, y).unwrap_or(false);

    // directedness + join validity over all pairs
    for x in &members {
        for y in &members {
            let brute = members.iter().any(|c| leq(x, c) && leq(y, c));
            if !brute {
                violations.push(violation(
                    fc,
                    "directedness",
                    format!("no upper bound for {} and {}", x.encode(), y.encode()),
                ));
            }
            match diag_join_with(&chain, x, y, variant) {
                Ok(j) => {
                    if !diag_member(&chain, &j).unwrap_or(false) {
                        violations.push(violation(
                            fc,
                            "join-membership",
                            format!("join({},{}) = {} not in B", x.encode(), y.encode(), j.encode()),
                        ));
                    } else if !(leq(x, &j) && leq(y, &j)) {
                        violations.push(violation(
                            fc,
                            "join-dominance",
                            format!(
                                "join({},{}) = {} does not dominate both",
                                x.encode(),
                                y.encode(),
                                j.encode()
                            ),
                        ));
                    }
                }
                Err(e) => violations.push(violation(
                    fc,
                    "join-error",
                    format!("join({},{}): {e}", x.encode(), y.encode()),
                )),
            }
        }
    }

    // root-map cofinality for every a0
    if fc.depth() >= 1 {
        match diag_root_map(&chain) {
            Ok(root) => {
                for a0 in 0..fc.stages[0].size() {
                    let a0e = Element::nat(a0 as u64);
                    match root.witness(&a0e) {
                        Ok(w) => {
                            if !diag_member(&chain, &w).unwrap_or(false) {
                                violations.push(violation(
                                    fc,
                                    "root-witness",
                                    format!("witness {} not in B", w.encode()),
                                ));
                                continue;
                            }
                            for b in &members {
                                if leq(&w, b) {
                                    let b0 = &b.as_tuple().unwrap()[0];
                                    if !fc.stages[0]
                                        .handle()
                                        .leq(&a0e, b0)
                                        .unwrap_or(false)
                                    {
                                        violations.push(violation(
                                            fc,
                                            "root-cofinality",
                                            format!(
                                                "a0={a0} witness={} beta={} projects below",
                                                w.encode(),
                                                b.encode()
                                            ),
                                        ));
                                    }
                                }
                            }
                        }
                        Err(e) => violations.push(violation(
                            fc,
                            "root-witness",
                            format!("witness failed at {a0}: {e}"),
                        )),
                    }
                }
            }
            Err(e) => violations.push(violation(fc, "root-map", e.to_string())),
        }
    }

    // level maps and the eventual-subnet property
    for n in 0..fc.depth() {
        let an = &fc.stages[n];
        for anchor in members.iter().filter(|m| m.as_tuple().unwrap().len() >= n + 2) {
            let lm = match crate::diagonal::diag_level_map(&chain, n, anchor) {
                Ok(m) => m,
                Err(e) => {
                    violations.push(violation(
                        fc,
                        "level-map",
                        format!("level {n} anchor {}: {e}", anchor.encode()),
                    ));
                    continue;
                }
            };
            let tail: Vec<&Element> = members.iter().filter(|b| leq(anchor, b)).collect();
            for alpha in 0..an.size() {
                let alpha_e = Element::nat(alpha as u64);
                match lm.witness(&alpha_e) {
                    Ok(theta) => {
                        if !diag_member(&chain, &theta).unwrap_or(false)
                            || !leq(anchor, &theta)
                        {
                            violations.push(violation(
                                fc,
                                "level-witness",
                                format!(
                                    "level {n} anchor {} alpha {alpha}: theta {} invalid",
                                    anchor.encode(),
                                    theta.encode()
                                ),
                            ));
                            continue;
                        }
                        for b in &tail {
                            if leq(&theta, b) {
                                let bn = &b.as_tuple().unwrap()[n];
                                if !an.handle().leq(&alpha_e, bn).unwrap_or(false) {
                                    violations.push(violation(
                                        fc,
                                        "level-cofinality",
                                        format!(
                                            "level {n} anchor {} alpha {alpha} beta {}",
                                            anchor.encode(),
                                            b.encode()
                                        ),
                                    ));
                                }
                            }
                        }
                    }
                    Err(e) => violations.push(violation(
                        fc,
                        "level-witness",
                        format!("level {n} anchor {} alpha {alpha}: {e}", anchor.encode()),
                    )),
                }
            }

            // independent route: some tail element must witness cofinality,
            // found by brute search rather than the construction
            for alpha in 0..an.size() {
                let alpha_e = Element::nat(alpha as u64);
                let witnessed = tail.iter().any(|theta| {
                    tail.iter().all(|b| {
                        if leq(theta, b) {
                            let bn = &b.as_tuple().unwrap()[n];
                            an.handle().leq(&alpha_e, bn).unwrap_or(false)
                        } else {
                            true
                        }
                    })
                });
                if !witnessed {
                    violations.push(violation(
                        fc,
                        "eventual-subnet",
                        format!(
                            "level {n} anchor {}: tail not cofinal above alpha {alpha}",
                            anchor.encode()
                        ),
                    ));
                }
            }
        }
    }

    OracleCheck {
        chain: fc.descriptor(),
        members: members.len(),
        violations,
    }
}

/// The canonical mutation-control instance: a 2-chain under a 3-chain with
/// the map 0->1, 1->0, 2->1. Its join needs the witness step, so the
/// skip-witness mutant loses dominance on it.
pub fn witness_sensitive_chain() -> FiniteChain {
    let a0 = FiniteDirectedSet::chain(2);
    let a1 = FiniteDirectedSet::chain(3);
    let table = enum_cofinal_maps(&a1, &a0)
        .into_iter()
        .find(|m| m.map == vec![1, 0, 1])
        .expect("map 0->1,1->0,2->1 is cofinal");
    FiniteChain::new(vec![a0, a1], vec![table]).expect("chain links")
}

/// Chain prefix as indices into the enumerated stage list; cheap to clone
/// while sweeping.
#[derive(Clone)]
struct ChainSpec {
    stage_ids: Vec<usize>,
    maps: Vec<CofinalTable>,
}

impl ChainSpec {
    fn realize(&self, sets: &[FiniteDirectedSet]) -> FiniteChain {
        FiniteChain {
            stages: self.stage_ids.iter().map(|&i| sets[i].clone()).collect(),
            maps: self.maps.clone(),
        }
    }
}

/// Exhaustive sweep over all finite chains with stage sizes up to the cap
/// and depth up to the cap, followed by a mutation control: the skip-witness
/// join must produce at least one violation.
pub fn oracle_sweep(config: &OracleConfig) -> Result<OracleReport> {
    let mut sets: Vec<FiniteDirectedSet> = Vec::new();
    for n in 1..=config.max_stage_size {
        sets.extend(enum_directed_preorders(n)?);
    }
    let m = sets.len();
    // maps_from_into[i][j]: all cofinal tables from sets[i] into sets[j]
    let maps_from_into: Vec<Vec<Vec<CofinalTable>>> = (0..m)
        .map(|i| (0..m).map(|j| enum_cofinal_maps(&sets[i], &sets[j])).collect())
        .collect();
    let maps_enumerated: usize = maps_from_into
        .iter()
        .flat_map(|row| row.iter().map(|v| v.len()))
        .sum();

    let depth0: Vec<ChainSpec> = (0..m)
        .map(|i| ChainSpec {
            stage_ids: vec![i],
            maps: Vec::new(),
        })
        .collect();

    let mut chains_checked = depth0.len();
    let mut violations: Vec<OracleViolation> = Vec::new();
    for spec in &depth0 {
        violations.extend(brute_check_diagonal(&spec.realize(&sets), JoinVariant::Proof).violations);
    }

    // Per-prefix extension keeps memory flat: the deepest level is checked
    // inside the parallel map and never stored.
    let mut frontier = depth0;
    for depth in 1..=config.max_depth {
        let is_last = depth == config.max_depth;
        let results = par::map_items(frontier, |spec| {
            let last = *spec.stage_ids.last().unwrap();
            let mut count = 0usize;
            let mut viols: Vec<OracleViolation> = Vec::new();
            let mut next: Vec<ChainSpec> = Vec::new();
            for (next_id, tables) in maps_from_into.iter().map(|row| &row[last]).enumerate() {
                for table in tables {
                    let mut stage_ids = spec.stage_ids.clone();
                    let mut maps = spec.maps.clone();
                    stage_ids.push(next_id);
                    maps.push(table.clone());
                    let child = ChainSpec { stage_ids, maps };
                    count += 1;
                    viols.extend(
                        brute_check_diagonal(&child.realize(&sets), JoinVariant::Proof).violations,
                    );
                    if !is_last {
                        next.push(child);
                    }
                }
            }
            (count, viols, next)
        });
        frontier = Vec::new();
        for (count, viols, next) in results {
            chains_checked += count;
            violations.extend(viols);
            frontier.extend(next);
        }
    }

    // negative control: the canonical sensitive chain plus a slice of the
    // depth-1 chains, rerun with the mutated join
    let mut mutation_targets = vec![witness_sensitive_chain()];
    for i in 0..m {
        for j in 0..m {
            for table in maps_from_into[i][j].iter().take(3) {
                mutation_targets.push(FiniteChain {
                    stages: vec![sets[j].clone(), sets[i].clone()],
                    maps: vec![table.clone()],
                });
            }
        }
    }
    let mutated = par::map_items(mutation_targets, |c| {
        brute_check_diagonal(&c, JoinVariant::SkipWitness)
            .violations
            .len()
    });
    let mutation_violations: usize = mutated.into_iter().sum();
    let mutation_caught = mutation_violations > 0;

    let pass = violations.is_empty() && mutation_caught;
    Ok(OracleReport {
        schema: SCHEMA_VERSION,
        scenario: "oracle".into(),
        max_stage_size: config.max_stage_size,
        max_depth: config.max_depth,
        sets_enumerated: m,
        maps_enumerated,
        chains_checked,
        violations,
        mutation_violations,
        mutation_caught,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::check_diag_laws;

    #[test]
    fn preorder_counts_small() {
        assert_eq!(enum_directed_preorders(1).unwrap().len(), 1);
        // two total orders plus the two-element equivalence; the antichain
        // fails upward directedness
        assert_eq!(enum_directed_preorders(2).unwrap().len(), 3);
        assert!(enum_directed_preorders(5).is_err());
    }

    #[test]
    fn every_enumerated_preorder_passes_laws() {
        for n in 1..=3 {
            for d in enum_directed_preorders(n).unwrap() {
                let report = crate::directed::check_laws(&d.handle(), 200, 0);
                assert!(report.pass, "{report:?}");
            }
        }
    }

    #[test]
    fn cofinal_maps_one_point() {
        let one = FiniteDirectedSet::chain(1);
        let maps = enum_cofinal_maps(&one, &one);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].map, vec![0]);
    }

    #[test]
    fn cofinal_maps_two_chain() {
        let two = FiniteDirectedSet::chain(2);
        let maps = enum_cofinal_maps(&two, &two);
        // identity is cofinal; constant-to-bottom is not
        assert!(maps.iter().any(|m| m.map == vec![0, 1]));
        assert!(!maps.iter().any(|m| m.map == vec![0, 0]));
    }

    #[test]
    fn cofinal_maps_closed_under_composition() {
        for a in enum_directed_preorders(2).unwrap() {
            for b in enum_directed_preorders(2).unwrap() {
                for c in enum_directed_preorders(2).unwrap() {
                    let f_ba = enum_cofinal_maps(&b, &a);
                    let f_cb = enum_cofinal_maps(&c, &b);
                    let f_ca = enum_cofinal_maps(&c, &a);
                    for f in &f_ba {
                        for g in &f_cb {
                            let comp: Vec<usize> =
                                (0..c.size()).map(|x| f.map[g.map[x]]).collect();
                            assert!(
                                f_ca.iter().any(|h| h.map == comp),
                                "composite not cofinal"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn depth_zero_chain_trivially_passes() {
        let d = FiniteDirectedSet::chain(3);
        let fc = FiniteChain::new(vec![d], vec![]).unwrap();
        let check = brute_check_diagonal(&fc, JoinVariant::Proof);
        assert!(check.pass(), "{:?}", check.violations);
        assert_eq!(check.members, 3);
    }

    #[test]
    fn mutated_join_is_caught() {
        let fc = witness_sensitive_chain();
        let honest = brute_check_diagonal(&fc, JoinVariant::Proof);
        assert!(honest.pass(), "{:?}", honest.violations);
        let mutated = brute_check_diagonal(&fc, JoinVariant::SkipWitness);
        assert!(
            mutated
                .violations
                .iter()
                .any(|v| v.kind.starts_with("join")),
            "mutation not caught: {:?}",
            mutated.violations
        );
    }

    #[test]
    fn sampled_harness_agrees_with_oracle_on_finite_chains() {
        let fc = witness_sensitive_chain();
        let oracle = brute_check_diagonal(&fc, JoinVariant::Proof);
        let sampled = check_diag_laws("finite", &fc.to_chain(), 300, 0);
        assert_eq!(oracle.pass(), sampled.pass(), "{sampled:?}");
    }

    #[test]
    fn small_sweep_is_clean() {
        let config = OracleConfig {
            max_stage_size: 2,
            max_depth: 1,
        };
        let report = oracle_sweep(&config).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(report.chains_checked > 0);
    }
}
