use num_rational::Ratio;
use unitfrob::catalog::{global_dual_of_sheaf, SheafSpec};
use unitfrob::global::{etale_chi, global_minimal_root, splitting_type};

fn shriek() -> SheafSpec {
    SheafSpec::Shriek { rank: 2, punctures: vec!["0".into(), "inf".into()] }
}

#[test]
fn shriek_rank_two() {
    for p in [5, 7] {
        let gm = global_dual_of_sheaf(&shriek(), p, 1, 1).unwrap();
        let rb = global_minimal_root(&gm).unwrap();
        assert_eq!(rb.degree, 4);
        assert!(rb.indices.iter().all(|(_, v)| v.ratio() == Ratio::from_integer(2)));
        assert_eq!(splitting_type(&gm, &rb).unwrap(), vec![2, 2]);
        let r = etale_chi(&gm).unwrap();
        assert_eq!((r.h0, r.h1, r.chi), (0, 2, -2));
        assert_eq!(r.bound.ratio(), Ratio::from_integer(-2));
        assert!(r.equality);
    }
}

#[test]
fn quadratic_cover() {
    for p in [5, 7] {
        let gm = global_dual_of_sheaf(&SheafSpec::tame_cover("x"), p, 1, 1).unwrap();
        let r = etale_chi(&gm).unwrap();
        assert_eq!(r.local_indices.len(), 2);
        assert!(r.local_indices.iter().all(|i| (i.num, i.den) == (1, 2)));
        assert_eq!(r.degree_root, 1);
        assert_eq!(r.splitting, vec![1, 0]);
        assert_eq!((r.chi, r.bound_ceil), (1, 1));
        assert!(r.equality);
    }
}

#[test]
fn elliptic_covers() {
    for (p, f, chi) in [(5, "x^3 + 1", 1), (5, "x^3 + x", 0), (7, "x^3 + 1", 0)] {
        let gm = global_dual_of_sheaf(&SheafSpec::tame_cover(f), p, 1, 1).unwrap();
        let r = etale_chi(&gm).unwrap();
        assert_eq!(r.local_indices.len(), 4, "{p} {f}");
        assert_eq!(r.bound.ratio(), Ratio::from_integer(0));
        assert_eq!(r.splitting, vec![2, 0]);
        assert_eq!(r.chi, chi, "{p} {f}: {r:?}");
        assert_eq!(r.equality, chi == 0);
    }
}
