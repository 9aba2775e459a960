use collide::landscape::{upsilon_n, upsilon_n_pairwise};
use collide::potentials::{
    estimate_theta, find_wells, min_eigenvalue, EffectivePotential, Potential, PotentialKind,
    PotentialSpec, SearchBox,
};
use proptest::prelude::*;

fn kinds() -> Vec<PotentialSpec> {
    vec![
        PotentialSpec::quadratic(1.5, vec![0.3, -0.2]).unwrap(),
        PotentialSpec::symmetric_double_well(0.7, 3).unwrap(),
        PotentialSpec::asymmetric_double_well(),
        PotentialSpec::new(
            PotentialKind::Polynomial {
                coefficients: vec![vec![0.1, -0.3, -0.5, 0.2, 0.25], vec![0.0, 0.0, 1.0]],
            },
            2,
        )
        .unwrap(),
    ]
}

fn probe(p: &PotentialSpec, raw: &[f64]) -> Vec<f64> {
    raw[..p.dimension].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_matches_central_differences(raw in prop::collection::vec(-2.0f64..2.0, 3)) {
        let h = 1e-5;
        for p in kinds() {
            let x = probe(&p, &raw);
            let g = p.gradient(&x).unwrap();
            for k in 0..x.len() {
                let mut up = x.clone();
                let mut dn = x.clone();
                up[k] += h;
                dn[k] -= h;
                let fd = (p.value(&up) - p.value(&dn)) / (2.0 * h);
                prop_assert!((fd - g[k]).abs() <= 1e-6 * (1.0 + g[k].abs()), "{:?} k={k}", p.kind);
            }
        }
    }

    #[test]
    fn hessian_matches_gradient_differences(raw in prop::collection::vec(-2.0f64..2.0, 3)) {
        let h = 1e-5;
        for p in kinds() {
            let x = probe(&p, &raw);
            let hs = p.hessian(&x).unwrap();
            prop_assert_eq!(&hs, &hs.transpose());
            for k in 0..x.len() {
                let mut up = x.clone();
                let mut dn = x.clone();
                up[k] += h;
                dn[k] -= h;
                let (gu, gd) = (p.grad(&up), p.grad(&dn));
                for j in 0..x.len() {
                    let fd = (gu[j] - gd[j]) / (2.0 * h);
                    prop_assert!((fd - hs[(j, k)]).abs() <= 1e-5 * (1.0 + hs[(j, k)].abs()));
                }
            }
        }
    }

    #[test]
    fn effective_potential_is_uniformly_convex(
        beta in 0.1f64..2.0,
        alpha in 1.1f64..3.0,
        raw in prop::collection::vec(-2.5f64..2.5, 2),
    ) {
        let v = PotentialSpec::symmetric_double_well(beta, 2).unwrap();
        let theta = estimate_theta(&v, &SearchBox::cube(2, 3.0), 41).unwrap();
        let psi = EffectivePotential::new(v, alpha, vec![0.4, -0.1]).unwrap();
        let lam = min_eigenvalue(&psi.hess(&raw));
        prop_assert!(lam >= alpha + theta - 1e-8, "lam={lam} alpha+theta={}", alpha + theta);
    }

    #[test]
    fn theta_of_a_quadratic_is_its_curvature(gamma in 0.0f64..5.0, c in -1.0f64..1.0) {
        let p = PotentialSpec::quadratic(gamma, vec![c, -c]).unwrap();
        let theta = estimate_theta(&p, &SearchBox::cube(2, 2.0), 21).unwrap();
        prop_assert!((theta - gamma).abs() <= 1e-12);
    }

    #[test]
    fn well_search_ignores_seed_order_and_repeats(perm in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle()) {
        let p = PotentialSpec::asymmetric_double_well();
        let base: Vec<Vec<f64>> = [-2.0, -1.2, -0.4, 0.3, 0.9, 1.6, 2.2].iter().map(|v| vec![*v]).collect();
        let reference = find_wells(&p, &base).unwrap();
        let mut seeds: Vec<Vec<f64>> = perm.iter().map(|&i| base[i].clone()).collect();
        seeds.extend(seeds.clone());
        let got = find_wells(&p, &seeds).unwrap();
        prop_assert!((got.0[0] - reference.0[0]).abs() <= 1e-9);
        prop_assert!((got.1[0] - reference.1[0]).abs() <= 1e-9);
    }

    #[test]
    fn aggregate_potential_forms_agree(
        n in 2usize..9,
        flat in prop::collection::vec(-2.0f64..2.0, 16),
        alpha in 0.0f64..3.0,
    ) {
        let v = PotentialSpec::symmetric_double_well(0.5, 2).unwrap();
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![flat[2 * i], flat[2 * i + 1]]).collect();
        let a = upsilon_n(&pts, &v, alpha).unwrap();
        let b = upsilon_n_pairwise(&pts, &v, alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }
}

#[test]
fn polynomial_growth_is_enforced() {
    let odd = PotentialKind::Polynomial {
        coefficients: vec![vec![0.0, 1.0, 0.0, 1.0]],
    };
    let negative = PotentialKind::Polynomial {
        coefficients: vec![vec![0.0, 0.0, -1.0]],
    };
    assert!(PotentialSpec::new(odd, 1).is_err());
    assert!(PotentialSpec::new(negative, 1).is_err());
}

#[test]
fn dimension_mismatch_is_a_config_error() {
    let p = PotentialSpec::symmetric_double_well(1.0, 2).unwrap();
    let e = p.eval(&[0.0]).unwrap_err();
    assert_eq!(e.kind(), "config");
}
