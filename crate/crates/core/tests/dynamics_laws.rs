use collide::dynamics::{
    run_until, Engine, Noise, PathState, SimConfig, SystemSpec, SystemVariant,
};
use collide::error::Error;
use collide::noise::ReplicateKey;
use collide::potentials::{EffectivePotential, PotentialSpec};
use collide::stopping::{StoppingKind, StoppingRule};

fn cfg(dt: f64, t_max: f64, sigma: f64) -> SimConfig {
    SimConfig {
        dt,
        t_max,
        sigma,
        seed: 0,
        dimension: 1,
    }
}

fn ou_pair(gamma: f64) -> SystemSpec {
    SystemSpec {
        variant: SystemVariant::LinearPair {
            psi1: EffectivePotential::quadratic(gamma, vec![-0.5]).unwrap(),
            psi2: EffectivePotential::quadratic(gamma, vec![0.5]).unwrap(),
        },
        x_init: (vec![-0.5], vec![0.5]),
    }
}

fn mean_field(n: usize, cohort: bool) -> SystemSpec {
    let potential = PotentialSpec::symmetric_double_well(0.2, 1).unwrap();
    SystemSpec {
        variant: if cohort {
            SystemVariant::CohortPair {
                potential,
                alpha: 0.3,
                n_cohort: n,
            }
        } else {
            SystemVariant::ParticlePair {
                potential,
                alpha: 0.3,
                n,
            }
        },
        x_init: (vec![-1.4], vec![1.4]),
    }
}

fn simulate(
    spec: &SystemSpec,
    c: &SimConfig,
    noise: Noise,
    steps: u64,
    mut visit: impl FnMut(&PathState),
) -> PathState {
    let mut cur = PathState::initial(spec);
    let mut next = cur.clone();
    let mut engine = Engine::new(spec, c, noise);
    for _ in 0..steps {
        engine.advance(&cur, &mut next).unwrap();
        visit(&next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

#[test]
fn stationary_variance_of_the_linear_diffusion() {
    let (gamma, sigma) = (1.0, 0.3);
    let spec = ou_pair(gamma);
    let c = cfg(1e-3, 100.0, sigma);
    let mut per_path = Vec::new();
    for r in 0..24 {
        let mut acc = 0.0;
        let mut count = 0.0;
        simulate(&spec, &c, Noise::new(c.key(0, r), 1), 100_000, |s| {
            if s.step > 50_000 {
                acc += (s.x[0] + 0.5).powi(2) + (s.y[0] - 0.5).powi(2);
                count += 2.0;
            }
        });
        per_path.push(acc / count);
    }
    let n = per_path.len() as f64;
    let mean = per_path.iter().sum::<f64>() / n;
    let se = (per_path.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    let target = sigma * sigma / (2.0 * gamma);
    assert!(
        (mean - target).abs() <= 3.0 * se,
        "mean={mean} target={target} se={se}"
    );
}

#[test]
fn permuting_noise_streams_permutes_particles() {
    let spec = mean_field(5, false);
    let c = cfg(1e-3, 1.0, 0.5);
    let key = ReplicateKey::new(3, 1, 4);
    let perm = [3usize, 0, 4, 1, 2];
    let streams = |side: u32| perm.iter().map(|&p| key.gaussian(side, p as u32)).collect();
    let a = simulate(&spec, &c, Noise::new(key, 5), 1000, |_| {});
    let b = simulate(
        &spec,
        &c,
        Noise::from_streams(streams(0), streams(1)),
        1000,
        |_| {},
    );
    for side in 0..2 {
        for (p, &q) in perm.iter().enumerate() {
            assert!((b.particle(side, p)[0] - a.particle(side, q)[0]).abs() <= 1e-12);
        }
    }
}

#[test]
fn cohort_mean_fluctuations_shrink_with_cohort_size() {
    let c = cfg(1e-3, 2.0, 0.4);
    let mut spreads = Vec::new();
    for n in [32, 64, 128] {
        let spec = mean_field(n, true);
        let means: Vec<f64> = (0..60)
            .map(|r| {
                simulate(&spec, &c, Noise::new(c.key(0, r), n + 1), 2000, |_| {}).side_mean(0, 1)[0]
            })
            .collect();
        let m = means.iter().sum::<f64>() / 60.0;
        spreads.push((means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 59.0).sqrt());
    }
    assert!(
        spreads[0] > spreads[1] && spreads[1] > spreads[2],
        "{spreads:?}"
    );
    assert!(spreads[0] / spreads[2] > 1.4, "{spreads:?}");
}

#[test]
fn tagged_particle_does_not_feed_the_cohort() {
    let spec = mean_field(16, true);
    let c = cfg(1e-3, 1.0, 0.5);
    let key = ReplicateKey::new(9, 0, 0);
    let swap_tag = |side: u32| {
        (0..17u32)
            .map(|p| {
                if p == 0 {
                    ReplicateKey::new(10, 0, 0).gaussian(side, 0)
                } else {
                    key.gaussian(side, p)
                }
            })
            .collect()
    };
    let a = simulate(&spec, &c, Noise::new(key, 17), 500, |_| {});
    let b = simulate(
        &spec,
        &c,
        Noise::from_streams(swap_tag(0), swap_tag(1)),
        500,
        |_| {},
    );
    assert_eq!(a.x[1..], b.x[1..]);
    assert_eq!(a.y[1..], b.y[1..]);
    assert_ne!(a.x[0], b.x[0]);
}

#[test]
fn stopping_times_are_ordered_along_a_path() {
    let spec = ou_pair(1.0);
    let c = cfg(1e-3, 400.0, 0.55);
    let time = |kind: StoppingKind, r: u64| {
        run_until(&spec, &c, &StoppingRule::single(kind), c.key(1, r), 0)
            .unwrap()
            .0
            .time
    };
    for r in 0..100 {
        let eps: Vec<f64> = [0.02, 0.1, 0.3]
            .iter()
            .map(|&eps| time(StoppingKind::EpsCollision { eps }, r))
            .collect();
        assert!(
            eps[0] >= eps[1] && eps[1] >= eps[2],
            "replicate {r}: {eps:?}"
        );
        let exact = time(StoppingKind::ExactCollision1D, r);
        assert!(exact >= eps[0] - c.dt);
        let boxed = time(StoppingKind::BoxExit { z1: 0.0, z2: 0.0 }, r);
        assert!(boxed >= exact && boxed >= eps[0] - c.dt);
        let ball = time(
            StoppingKind::BallEntry {
                center: vec![0.0],
                eps: 0.1,
                both_sides: true,
            },
            r,
        );
        assert!(ball >= eps[1]);
    }
}

#[test]
fn first_of_rule_reports_the_earliest_trigger() {
    let spec = ou_pair(1.0);
    let c = cfg(1e-3, 400.0, 0.55);
    let rule = StoppingRule {
        kinds: vec![
            StoppingKind::ExactCollision1D,
            StoppingKind::EpsCollision { eps: 0.3 },
        ],
    };
    for r in 0..20 {
        let (rec, _) = run_until(&spec, &c, &rule, c.key(2, r), 0).unwrap();
        let (eps_only, _) = run_until(
            &spec,
            &c,
            &StoppingRule::single(StoppingKind::EpsCollision { eps: 0.3 }),
            c.key(2, r),
            0,
        )
        .unwrap();
        assert!(rec.time <= eps_only.time);
        assert_eq!(rec.rule, "eps_collision");
    }
}

#[test]
fn euler_error_is_first_order_without_noise() {
    let v = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
    let exact = collide::landscape::integrate_flow(
        &v,
        &[-1.7],
        collide::landscape::Direction::Descending,
        1.0,
        1e-4,
    )
    .unwrap()
    .last()[0];
    let err = |dt: f64| {
        let spec = SystemSpec {
            variant: SystemVariant::LinearizedPair {
                potential: v.clone(),
                alpha: 0.0,
                anchors: (vec![0.0], vec![0.0]),
            },
            x_init: (vec![-1.7], vec![1.7]),
        };
        let c = cfg(dt, 1.0, 0.0);
        let s = simulate(
            &spec,
            &c,
            Noise::new(c.key(0, 0), 1),
            (1.0 / dt).round() as u64,
            |_| {},
        );
        (s.x[0] - exact).abs()
    };
    let ratio = err(1e-2) / err(1e-3);
    assert!((8.0..=12.5).contains(&ratio), "ratio={ratio}");
}

#[test]
fn exploding_paths_raise_blow_up() {
    let spec = SystemSpec {
        variant: SystemVariant::LinearizedPair {
            potential: PotentialSpec::symmetric_double_well(1.0, 1).unwrap(),
            alpha: 0.0,
            anchors: (vec![0.0], vec![0.0]),
        },
        x_init: (vec![-3.0], vec![3.0]),
    };
    let c = cfg(1.0, 100.0, 0.1);
    let err = run_until(
        &spec,
        &c,
        &StoppingRule::single(StoppingKind::EpsCollision { eps: 0.01 }),
        c.key(0, 0),
        0,
    )
    .unwrap_err();
    assert!(matches!(err, Error::BlowUp { .. }), "{err:?}");
}

#[test]
fn censored_paths_carry_no_location() {
    let spec = ou_pair(4.0);
    let c = cfg(1e-3, 0.5, 0.05);
    let (rec, summary) = run_until(
        &spec,
        &c,
        &StoppingRule::single(StoppingKind::ExactCollision1D),
        c.key(0, 0),
        100,
    )
    .unwrap();
    assert!(rec.censored);
    assert_eq!(rec.time, 0.5);
    assert!(rec.x_loc.is_none() && rec.midpoint.is_none());
    assert_eq!(summary.steps, 500);
    assert_eq!(summary.trajectory.len(), 2 * 6);
}
