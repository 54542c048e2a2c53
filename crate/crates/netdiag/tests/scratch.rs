use netdiag::directed::{naturals, ProductDirectedSet};
use netdiag::element::Element;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn frac(x: f64) -> f64 {
    x - x.floor()
}

#[test]
#[ignore]
fn probe_walk_hit_rate() {
    let index = ProductDirectedSet::new(vec![naturals(), naturals()]);
    // S1: coord1 = frac(GOLDEN * t + 0.37) in [0, 9.77e-4]
    let r = 0.0009765625f64;
    for (name, anchor) in [
        ("failing", Element::pair(Element::nat(7_730_468), Element::nat(8_301_195))),
        ("origin", Element::pair(Element::nat(0), Element::nat(0))),
    ] {
        for seed in [0u64, 1, 2] {
            let mut rng = netdiag::rng::rng_at(seed, netdiag::rng::hash_str(&anchor.encode()));
            let mut cur = anchor.clone();
            let mut hits = 0usize;
            let mut distinct = std::collections::HashSet::new();
            let mut min_c = f64::MAX;
            let steps = 10_000usize;
            for _ in 0..steps {
                cur = index.sample_above(&cur, &mut rng).unwrap();
                let parts = cur.as_tuple().unwrap();
                let t = parts[0].as_nat().unwrap() + parts[1].as_nat().unwrap();
                distinct.insert(t);
                let c1 = frac(GOLDEN * t as f64 + 0.37);
                min_c = min_c.min(c1);
                if c1 <= r {
                    hits += 1;
                }
            }
            let final_t = {
                let parts = cur.as_tuple().unwrap();
                parts[0].as_nat().unwrap() + parts[1].as_nat().unwrap()
            };
            println!(
                "{name} seed {seed}: hits {hits}/{steps}, distinct t {}, min coord1 {min_c:.2e}, final t {final_t}",
                distinct.len()
            );
        }
    }
}
