use collide::landscape::{
    basin_of, eps_c_table, estimate_eps_c, eval_h_eps, integrate_flow, m_eps, minimize_h_eps,
    sphere_infimum, ConvexPair, Direction, Landscape, BASIN_STEP, FLOW_HORIZON,
};
use collide::noise::inverse_normal_cdf;
use collide::potentials::{EffectivePotential, InteractionSpec, Potential, PotentialSpec};
use statrs::distribution::{ContinuousCDF, Normal};

fn sym_1d() -> Landscape {
    Landscape::new(
        PotentialSpec::symmetric_double_well(0.2, 1).unwrap(),
        InteractionSpec { alpha: 0.3 },
        (vec![-1.4], vec![1.4]),
    )
    .unwrap()
}

fn sym_2d() -> Landscape {
    Landscape::new(
        PotentialSpec::symmetric_double_well(0.5, 2).unwrap(),
        InteractionSpec { alpha: 1.2 },
        (vec![-1.2, 0.1], vec![1.1, -0.2]),
    )
    .unwrap()
}

fn circle_min(psi: &dyn Potential, well: &[f64], center: &[f64], eps: f64) -> f64 {
    let n = 10_000;
    (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            let x = [center[0] + eps * a.cos(), center[1] + eps * a.sin()];
            psi.value(&x) - psi.value(well)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn sphere_infimum_matches_circle_grid() {
    let l = sym_2d();
    let pair = l.pair();
    let centers = [[0.0, 0.0], [0.3, -0.4], [-0.8, 0.2], [1.0, 1.0]];
    for c in centers {
        for eps in [0.05, 0.2, 0.5] {
            for (psi, well) in [(&pair.psi1, &pair.well1), (&pair.psi2, &pair.well2)] {
                let got = sphere_infimum(psi, well, &c, eps).unwrap();
                let oracle = circle_min(psi, well, &c, eps);
                assert!(
                    (got.value - oracle).abs() <= 1e-6,
                    "c={c:?} eps={eps}: {} vs {oracle}",
                    got.value
                );
                assert!(((got.argmin[0] - c[0]).hypot(got.argmin[1] - c[1]) - eps).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn sphere_infimum_in_one_dimension_compares_endpoints() {
    let l = sym_1d();
    let pair = l.pair();
    for c in [-0.7, 0.0, 0.2, 1.3] {
        let eps = 0.15;
        let v = |x: f64| pair.psi1.value(&[x]) - pair.psi1.value(&pair.well1);
        let got = sphere_infimum(&pair.psi1, &pair.well1, &[c], eps).unwrap();
        assert_eq!(got.value, v(c - eps).min(v(c + eps)));
    }
}

#[test]
fn nothing_on_a_grid_beats_the_collision_cost() {
    let a = Landscape::new(
        PotentialSpec::asymmetric_double_well(),
        InteractionSpec { alpha: 1.5 },
        (vec![-2.0], vec![1.0]),
    )
    .unwrap();
    let (lo, hi) = (a.wells.0[0] - 1.0, a.wells.1[0] + 1.0);
    let n = ((hi - lo) / 1e-4).round() as usize;
    let scan = (0..=n).map(|i| a.eval_h0(&[lo + (hi - lo) * i as f64 / n as f64]));
    assert!(scan.fold(f64::INFINITY, f64::min) >= a.hbar0 - 1e-8);

    let b = sym_2d();
    for i in 0..=200 {
        for j in 0..=200 {
            let l = [-2.0 + 0.02 * i as f64, -2.0 + 0.02 * j as f64];
            assert!(b.eval_h0(&l) >= b.hbar0 - 1e-8);
        }
    }
}

#[test]
fn descending_flow_from_a_small_sphere_stays_inside() {
    let l = sym_2d();
    let r = 0.5;
    for w in [&l.wells.0, &l.wells.1] {
        for i in 0..64 {
            let a = std::f64::consts::TAU * i as f64 / 64.0;
            let x = [w[0] + r * a.cos(), w[1] + r * a.sin()];
            let path = integrate_flow(&l.potential, &x, Direction::Descending, 50.0, 1e-2).unwrap();
            assert!(path
                .states
                .iter()
                .all(|s| (s[0] - w[0]).hypot(s[1] - w[1]) <= r + 1e-9));
            assert!((path.last()[0] - w[0]).hypot(path.last()[1] - w[1]) <= 1e-3);
        }
    }
}

#[test]
fn flow_membership_matches_the_wells() {
    let l = sym_2d();
    let wells = [&l.wells.0[..], &l.wells.1[..]];
    for (which, w) in wells.iter().enumerate() {
        for i in 0..16 {
            let a = std::f64::consts::TAU * i as f64 / 16.0;
            let x = [w[0] + 0.3 * a.cos(), w[1] + 0.3 * a.sin()];
            assert_eq!(
                basin_of(&l.potential, &x, &wells, FLOW_HORIZON, BASIN_STEP).unwrap(),
                Some(which)
            );
        }
    }
}

fn grid_h_eps(pair: &ConvexPair, eps: f64) -> f64 {
    let (a, b) = (pair.well1[0], pair.well2[0]);
    let term = |psi: &EffectivePotential, w: &[f64], l: f64| {
        psi.value(&[l - eps]).min(psi.value(&[l + eps])) - psi.value(w)
    };
    (0..=100_000)
        .map(|i| {
            let l = a + (b - a) * i as f64 / 100_000.0;
            term(&pair.psi1, &pair.well1, l) + term(&pair.psi2, &pair.well2, l)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn minimizer_search_matches_grid_scan() {
    let pair = sym_1d().pair();
    for eps in [0.025, 0.1, 0.3] {
        let set = minimize_h_eps(&pair, eps, 8, 0).unwrap();
        assert!(
            (set.value - grid_h_eps(&pair, eps)).abs() <= 1e-6,
            "eps={eps}"
        );
        for p in &set.points {
            assert!((eval_h_eps(&pair, p, eps).unwrap() - set.value).abs() <= 1e-8);
        }
    }
}

#[test]
fn exit_cost_converges_within_the_lipschitz_bound() {
    let l = sym_1d();
    let pair = l.pair();
    let (lo, hi) = (l.wells.0[0] - 0.5, l.wells.1[0] + 0.5);
    let lip = (0..=3000)
        .map(|i| {
            let x = [lo + (hi - lo) * i as f64 / 3000.0];
            pair.psi1.grad(&x)[0].abs() + pair.psi2.grad(&x)[0].abs()
        })
        .fold(0.0, f64::max);
    let mut last = f64::INFINITY;
    for eps in [0.3, 0.2, 0.1, 0.05, 0.025, 0.0125] {
        let gap = (minimize_h_eps(&pair, eps, 8, 0).unwrap().value - l.hbar0).abs();
        assert!(gap <= last);
        assert!(gap <= lip * eps, "eps={eps}: gap {gap} bound {}", lip * eps);
        last = gap;
    }
}

#[test]
fn ball_reduction_matches_brute_force() {
    let pair = sym_1d().pair();
    for eps in [0.05, 0.2, 0.4] {
        let (w1, w2) = (pair.well1[0], pair.well2[0]);
        let brute = (0..=20_000)
            .map(|i| {
                let l = w1 - eps + 2.0 * eps * i as f64 / 20_000.0;
                pair.psi2.value(&[l - eps]).min(pair.psi2.value(&[l + eps]))
            })
            .fold(f64::INFINITY, f64::min)
            - pair.psi2.value(&[w2]);
        assert!(
            (m_eps(&pair, 1, eps).unwrap() - brute).abs() <= 1e-9,
            "eps={eps}"
        );
    }
}

#[test]
fn certified_radius_is_a_prefix_of_the_grid() {
    let pair = sym_1d().pair();
    let grid = [0.025, 0.05, 0.1, 0.2, 0.4, 0.8];
    let table = eps_c_table(&pair, &grid).unwrap();
    let eps_c = estimate_eps_c(&pair, &grid).unwrap();
    let prefix = table.iter().take_while(|r| r.certified).count();
    assert_eq!(eps_c, if prefix == 0 { 0.0 } else { grid[prefix - 1] });
    assert!(eps_c_table(&pair, &[0.1, 0.05]).is_err());
    assert!(eps_c_table(&pair, &[]).is_err());
}

#[test]
fn inverse_normal_cdf_agrees_with_statrs() {
    let n = Normal::standard();
    for i in 1..100_000 {
        let p = i as f64 / 100_000.0;
        let want = n.inverse_cdf(p);
        assert!(
            (inverse_normal_cdf(p) - want).abs() <= 1e-12 * (1.0 + want.abs()),
            "p={p}"
        );
    }
    for p in [1e-300, 1e-100, 1e-20, 1e-10] {
        let want = n.inverse_cdf(p);
        assert!(
            (inverse_normal_cdf(p) - want).abs() <= 1e-9 * want.abs(),
            "p={p}"
        );
    }
}
