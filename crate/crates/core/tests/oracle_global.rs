use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unitfrob::arith::FieldCtx;
use unitfrob::catalog::random::{random_cover_poly, random_direct_sum};
use unitfrob::catalog::{global_dual_of_sheaf, poly_label, SheafSpec};
use unitfrob::global::{cohomology_semilinear, etale_chi, etale_chi_with_root, global_minimal_root, RootBundle};
use unitfrob::local::{is_root, Frame, RootOptions};
use unitfrob::oracle::{chi_topological, hasse_witt_genus1};

#[test]
fn h1_block_matches_hasse_witt() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (p, r) in [(5, 1), (7, 1), (11, 1), (13, 1), (5, 2)] {
        let base = FieldCtx::new(p, r, 1).unwrap();
        for deg in [3, 4, 3, 4] {
            let f = random_cover_poly(&base, &mut rng, deg);
            let rep = etale_chi(&global_dual_of_sheaf(&SheafSpec::tame_cover(&poly_label(&f)), p, r, 1).unwrap()).unwrap();
            let pr = hasse_witt_genus1(&f).unwrap().p_rank() as usize;
            assert_eq!(rep.ss1, pr, "p = {p}, r = {r}, f = {f}");
            assert_eq!(rep.h1 + rep.nil1, 1);
            assert_eq!(rep.chi, 1 - pr as i64);
            assert_eq!(rep.equality, pr == 1);
        }
    }
}

#[test]
fn chi_does_not_depend_on_the_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut specs = vec![
        SheafSpec::Shriek { rank: 2, punctures: vec!["0".into(), "inf".into()] },
        SheafSpec::tame_cover("x^3 + 1"),
        SheafSpec::tame_cover("x^3 + x"),
    ];
    specs.extend((0..4).map(|_| random_direct_sum(5, 1, &mut rng)));
    for spec in specs {
        let gm = global_dual_of_sheaf(&spec, 5, 1, 1).unwrap();
        let min = global_minimal_root(&gm).unwrap();
        let bigger: Vec<_> = gm.places().iter().map(|d| Frame::new(&d.module).unwrap().start_root().unwrap()).collect();
        for (d, l) in gm.places().iter().zip(&bigger) {
            assert!(is_root(&d.module, l, RootOptions::default()).unwrap().is_root());
        }
        let rb = RootBundle::from_lattices(&gm, bigger).unwrap();
        assert!(rb.degree >= min.degree);
        let a = etale_chi_with_root(&gm, &min).unwrap();
        let b = etale_chi_with_root(&gm, &rb).unwrap();
        assert_eq!((a.chi, a.ss0, a.ss1), (b.chi, b.ss0, b.ss1), "{spec:?}");
    }
}

#[test]
fn h1_action_is_independent_of_representatives() {
    // phi must map E(A^1) and the sections at infinity into themselves
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..8 {
        let spec = random_direct_sum(7, 1, &mut rng);
        let gm = global_dual_of_sheaf(&spec, 7, 1, 1).unwrap();
        let coh = cohomology_semilinear(&gm, &global_minimal_root(&gm).unwrap()).unwrap();
        let d = &coh.dual.degrees;
        for i in 0..gm.n() {
            for k in 0..gm.n() {
                if let Some(deg) = coh.action.get(i, k).deg() {
                    assert!(deg as i64 <= d[i] - 7 * d[k]);
                }
            }
        }
    }
}

#[test]
fn topological_oracle_matches_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 10 {
        let spec = random_direct_sum(5, 1, &mut rng);
        let Ok(o) = chi_topological(&spec, 5, 1) else { continue };
        let rep = etale_chi(&global_dual_of_sheaf(&spec, 5, 1, 1).unwrap()).unwrap();
        assert_eq!(o.chi_top, rep.chi, "{spec:?}");
        checked += 1;
    }
}
