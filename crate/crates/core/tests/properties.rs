//! Property tests over randomized fields and parameters.

use proptest::prelude::*;

use hallmhd::littlewood_paley::{random_covered_field, DyadicProfile, ShellDecomposition};
use hallmhd::operators::leray_project;
use hallmhd::{Grid, SpectralField};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transform_round_trip_and_parseval(seed in 0u64..1_000_000, kmax in 2u32..6) {
        let grid = Grid::new(16).unwrap();
        let f = SpectralField::random_band(grid, 1.0, kmax as f64, seed);
        prop_assume!(f.l2_norm() > 0.0);
        let phys = f.to_physical();
        let back = SpectralField::from_physical(&phys).unwrap();
        let rel = back.difference(&f).l2_norm() / f.l2_norm();
        prop_assert!(rel < 1e-12, "round trip {rel}");
        let parseval = (f.l2_norm() - phys.l2_norm()).abs() / f.l2_norm();
        prop_assert!(parseval < 1e-12, "Parseval {parseval}");
    }

    #[test]
    fn leray_is_idempotent_projection(seed in 0u64..1_000_000) {
        let grid = Grid::new(16).unwrap();
        let f = SpectralField::random_band(grid, 1.0, 4.0, seed);
        prop_assume!(f.l2_norm() > 0.0);
        let p = leray_project(&f);
        prop_assert!(p.is_divergence_free(1e-12));
        let pp = leray_project(&p);
        prop_assert!(pp.difference(&p).l2_norm() / f.l2_norm() < 1e-12);
        // projection never increases the L² norm
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn shell_blocks_reconstruct_and_stay_hermitian(seed in 0u64..1_000_000) {
        let grid = Grid::new(32).unwrap();
        let profile = DyadicProfile::new(grid);
        let u = random_covered_field(&profile, seed);
        prop_assume!(u.l2_norm() > 0.0);
        let dec = ShellDecomposition::new(&profile, &u);
        let rel = dec.reconstruct().difference(&u).l2_norm() / u.l2_norm();
        prop_assert!(rel < 1e-12, "reconstruction {rel}");
        for block in &dec.blocks {
            prop_assert!(block.hermitian_defect() < 1e-13);
        }
    }
}
