use mallows_core::matching::crossing_profiles;
use mallows_core::samplers::{sample_tame, MatchOptions, TameSampleConfig};
use mallows_core::stats::{median, slope};
use mallows_core::wild::*;
use mallows_core::{Compatibility, EdgeOracle, Individual, Interval};

#[test]
fn every_variant_is_auditable() {
    for p in [0.3, 0.5, 0.7] {
        for seed in 0..10 {
            let o = EdgeOracle::new(p, seed).unwrap();
            for v in [WildVariant::NotPerfect, WildVariant::NotLocallyFinite, WildVariant::LocallyFiniteWild] {
                let w = build_wild(&WildConfig::new(v, 12), &o).unwrap();
                assert!(audit_stability(&w, &o).is_empty(), "{v:?} p {p} seed {seed}");
                assert_eq!(replay_trace(&w, &o), 0);
                for &(i, j) in &w.edges() {
                    assert!(o.is_compatible(i, j));
                }
            }
        }
    }
}

#[test]
fn negative_females_pair_with_nonnegative_males() {
    for seed in 0..20 {
        let o = EdgeOracle::new(0.5, seed).unwrap();
        let w = build_wild(&WildConfig::new(WildVariant::NotLocallyFinite, 14), &o).unwrap();
        for s in &w.steps {
            if let Individual::Female(j) = s.individual {
                if j < 0 {
                    let partner = w.matching.sigma_inv(j).expect("processed female is matched");
                    assert!(partner >= 0, "seed {seed}: ({j},F) with male {partner}");
                }
            }
        }
    }
}

#[test]
fn distinct_sequences_diverge_where_they_differ() {
    let o = EdgeOracle::new(0.4, 9).unwrap();
    let mut a = WildConfig::new(WildVariant::LocallyFiniteWild, 8);
    a.a_seq = vec![1, 1, 1, 1];
    let mut b = a.clone();
    b.a_seq = vec![1, 1, 3, 1];
    let wa = build_wild(&a, &o).unwrap();
    let wb = build_wild(&b, &o).unwrap();
    let (sa, sb) = (&wa.steps, &wb.steps);
    let first_diff = sa.iter().zip(sb).position(|(x, y)| x.partner != y.partner);
    let matched_before = |steps: &[WildStep], k: usize| steps[..k].iter().filter(|s| s.partner.is_some()).count();
    let k = first_diff.expect("sequences must differ");
    // the third edge is the first one chosen with a different rank
    assert_eq!(matched_before(sa, k), 2);
    assert_ne!(wa.edges(), wb.edges());
}

#[test]
fn sharp_construction_slope_and_frontier() {
    let q: f64 = 0.5;
    let target = 2.0 * (1.0 / q).ln();
    let mut slopes = Vec::new();
    for seed in 0..200 {
        let o = EdgeOracle::new(1.0 - q, seed).unwrap();
        let w = build_wild_sharp(&WildSharpConfig::new(16), &o).unwrap();
        assert!(w.h_trace.windows(2).all(|p| p[0] <= p[1]));
        for (n, s) in w.steps.iter().enumerate() {
            if s.partner.is_some() {
                let n = n as u64 + 1;
                assert!(s.constraints >= (n - 1) / 2 && s.constraints <= n - 1, "step {n}: {}", s.constraints);
            }
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = w
            .h_trace
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .map(|(n, &h)| (n as f64, (h as f64).ln()))
            .unzip();
        if xs.len() >= 2 {
            slopes.push(slope(&xs, &ys));
        }
    }
    let m = median(&slopes);
    assert!(m >= 0.3 * target && m <= 1.5 * target, "median slope {m}");
}

#[test]
fn growth_diagnostics_separate_tame_and_sharp() {
    let o = EdgeOracle::new(0.5, 1).unwrap();
    let w = Interval::new(-2000, 2000).unwrap();
    let t = sample_tame(&TameSampleConfig::new(0, w, 1e-6), &o, MatchOptions::default()).unwrap();
    let profiles = crossing_profiles(&t.matching, Interval::new(-2000, 1999).unwrap()).unwrap();
    assert_eq!(growth_diagnostics(&profiles).class, GrowthClass::TameConsistent);

    let mut wild = 0;
    for seed in 0..20 {
        let o = EdgeOracle::new(0.5, seed).unwrap();
        let s = build_wild_sharp(&WildSharpConfig::new(16), &o).unwrap();
        let win = s.matching.window();
        let profiles = crossing_profiles(&s.matching, Interval::new(win.lo, win.hi - 1).unwrap()).unwrap();
        if growth_diagnostics(&profiles).class == GrowthClass::WildConsistent {
            wild += 1;
        }
    }
    assert!(wild >= 18, "{wild} of 20 classed wild-consistent");
}
