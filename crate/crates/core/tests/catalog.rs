use std::sync::Arc;

use surfchar::repvar::{character_distance, trace_coordinates};
use surfchar::rng::stream;
use surfchar::twist::{catalog, validate_splitting, walk_entries};
use surfchar::{BoundaryCondition, FiberSampler, SurfacePresentation};

const SURFACES: [(u32, u32); 4] = [(0, 3), (0, 4), (1, 1), (1, 2)];

#[test]
fn every_splitting_validates() {
    let mut rng = stream(7, 0);
    for (g, n) in SURFACES {
        let pres = SurfacePresentation::new(g, n).unwrap();
        for e in catalog(g, n).unwrap() {
            if let Some(d) = e.datum() {
                let r = validate_splitting(&pres, d, 100, &mut rng).unwrap();
                assert!(r.passed(), "{}:\n{r}", e.label());
            }
        }
    }
}

#[test]
fn disjoint_lists_are_symmetric() {
    for (g, n) in SURFACES {
        let c = catalog(g, n).unwrap();
        for e in &c {
            for other in &e.disjoint {
                let back = c.iter().find(|x| &x.index == other).unwrap();
                assert!(back.disjoint.contains(&e.index), "{} / {}", e.label(), back.label());
            }
        }
    }
}

// Flows along disjoint curves commute; along intersecting ones they do not.
#[test]
fn disjoint_lists_match_commuting_flows() {
    let mut rng = stream(8, 0);
    for (g, n) in SURFACES {
        let pres = Arc::new(SurfacePresentation::new(g, n).unwrap());
        let b = BoundaryCondition::uniform(n as usize, 0.47).unwrap();
        let mut sampler = FiberSampler::new(pres, b, 1e-2).unwrap();
        let entries = walk_entries(g, n).unwrap();
        let points: Vec<_> = (0..5).map(|_| sampler.sample(&mut rng).unwrap()).collect();
        for (i, x) in entries.iter().enumerate() {
            for y in &entries[i + 1..] {
                let mut gap = 0.0f64;
                for rho in &points {
                    let xy = x.twist_flow(&y.twist_flow(rho, 0.9).unwrap(), 1.3).unwrap();
                    let yx = y.twist_flow(&x.twist_flow(rho, 1.3).unwrap(), 0.9).unwrap();
                    gap = gap.max(character_distance(&trace_coordinates(&xy), &trace_coordinates(&yx)).unwrap());
                }
                if x.disjoint.contains(&y.index) {
                    assert!(gap < 1e-9, "{} and {} should commute: {gap:e}", x.label(), y.label());
                } else {
                    assert!(gap > 1e-3, "{} and {} commute: {gap:e}", x.label(), y.label());
                }
            }
        }
    }
}
