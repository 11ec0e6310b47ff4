//! Arm-tool-ball causal structure and rarity.

use curio_core::envs::{atb, ArmToolBall, ArmToolBallConfig, Environment};
use curio_core::metrics::displaced;
use curio_core::rng::seeded_rng;
use curio_core::ActionParams;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn random_action(dim: usize, rng: &mut impl Rng) -> ActionParams {
    ActionParams::clamped((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

#[test]
fn distractor_is_independent_of_actions() {
    let cfg = ArmToolBallConfig::default();
    let mut env = ArmToolBall::new(cfg.clone(), seeded_rng(21, "env")).unwrap();
    let mut rng = seeded_rng(21, "actions");
    let dim = env.spec().action_dim;
    let bins = 4;
    let mut table = vec![[0f64; 4]; bins];
    let n = 20_000;
    for _ in 0..n {
        let a = random_action(dim, &mut rng);
        let o = env.execute(&a).unwrap();
        let row = (((a.as_slice()[0] + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
        let x = o.get(&atb::DISTRACTOR.into()).unwrap()[0];
        let col = (((x - cfg.workspace[0]) / (cfg.workspace[1] - cfg.workspace[0]) * 4.0) as usize).min(3);
        table[row][col] += 1.0;
    }
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..4).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    let mut stat = 0.0;
    for (r, row) in table.iter().enumerate() {
        for (c, &obs) in row.iter().enumerate() {
            let e = rows[r] * cols[c] / n as f64;
            stat += (obs - e).powi(2) / e;
        }
    }
    let p = ChiSquared::new(((bins - 1) * 3) as f64).unwrap().sf(stat);
    assert!(p > 0.01, "chi-square {stat}, p = {p}");
}

#[test]
fn effects_only_travel_down_the_chain() {
    let cfg = ArmToolBallConfig::default();
    let mut env = ArmToolBall::new(cfg.clone(), seeded_rng(4, "env")).unwrap();
    let rest = env.spec().rest.clone();
    let mut rng = seeded_rng(4, "actions");
    let dim = env.spec().action_dim;
    let moved =
        |o: &curio_core::Outcome, e: &str| displaced(o.get(&e.into()).unwrap(), rest.get(&e.into()).unwrap(), 1e-12);
    let mut tilted_runs = 0;
    for _ in 0..50_000 {
        let (o, trace) = env.simulate(&random_action(dim, &mut rng)).unwrap();
        if trace.tilted {
            tilted_runs += 1;
            assert!(trace.gripped);
        }
        if moved(&o, atb::TOOL) {
            assert!(trace.tilted);
        }
        if moved(&o, atb::BALL) {
            assert!(trace.magnet_contact);
        }
        if trace.magnet_contact {
            assert!(trace.tilted);
        }
    }
    assert!(tilted_runs > 0);
}

#[test]
fn ball_is_unreachable_without_the_tool() {
    // tool parked far from the ball: nothing the arm does can move it
    let cfg = ArmToolBallConfig { tool_start: [-1.9, -1.9], ..ArmToolBallConfig::default() };
    let mut env = ArmToolBall::new(cfg.clone(), seeded_rng(8, "env")).unwrap();
    let mut rng = seeded_rng(8, "actions");
    let dim = env.spec().action_dim;
    for _ in 0..20_000 {
        let o = env.execute(&random_action(dim, &mut rng)).unwrap();
        assert_eq!(o.get(&atb::BALL.into()).unwrap(), &cfg.ball_start[..]);
    }
}

#[test]
fn same_seed_same_outcomes() {
    let cfg = ArmToolBallConfig::default();
    let mut a = ArmToolBall::new(cfg.clone(), seeded_rng(2, "env")).unwrap();
    let mut b = ArmToolBall::new(cfg.clone(), seeded_rng(2, "env")).unwrap();
    let mut c = ArmToolBall::new(cfg, seeded_rng(3, "env")).unwrap();
    let mut rng = seeded_rng(2, "actions");
    let act = random_action(a.spec().action_dim, &mut rng);
    let (oa, ob, oc) = (a.execute(&act).unwrap(), b.execute(&act).unwrap(), c.execute(&act).unwrap());
    assert_eq!(oa, ob);
    assert_ne!(oa.get(&atb::DISTRACTOR.into()), oc.get(&atb::DISTRACTOR.into()));
    assert_eq!(oa.get(&atb::HAND.into()), oc.get(&atb::HAND.into()));
}
