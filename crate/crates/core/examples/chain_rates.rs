//! Monte-Carlo rates of each chain link under uniform random actions.
//!
//! cargo run --release -p curio-core --example chain_rates -- [rollouts] [seed]

use curio_core::envs::{atb, ArmToolBall, ArmToolBallConfig, Environment};
use curio_core::metrics::displaced;
use curio_core::rng::seeded_rng;
use curio_core::ActionParams;
use rand::Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(100_000, |s| s.parse().expect("rollouts must be an integer"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed must be an integer"));

    let cfg = ArmToolBallConfig::default();
    let delta = 0.05;
    let mut env = ArmToolBall::new(cfg, seeded_rng(seed, "env")).expect("default config is valid");
    let rest = env.spec().rest.clone();
    let dim = env.spec().action_dim;
    let mut rng = seeded_rng(seed, "explorer");
    let (mut gripped, mut joystick, mut tool, mut ball) = (0u64, 0u64, 0u64, 0u64);
    for _ in 0..n {
        let a = ActionParams::clamped((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect());
        let (o, trace) = env.simulate(&a).expect("action has the right length");
        let moved = |e: &str| displaced(o.get(&e.into()).unwrap(), rest.get(&e.into()).unwrap(), delta);
        gripped += u64::from(trace.gripped);
        joystick += u64::from(moved(atb::JOYSTICK));
        tool += u64::from(moved(atb::TOOL));
        ball += u64::from(moved(atb::BALL));
    }
    let rate = |k: u64| k as f64 / n as f64;
    println!("rollouts {n} seed {seed} delta {delta}");
    println!("gripped  {gripped:>8}  {:.6}", rate(gripped));
    println!("joystick {joystick:>8}  {:.6}", rate(joystick));
    println!("tool     {tool:>8}  {:.6}", rate(tool));
    println!("ball     {ball:>8}  {:.6}", rate(ball));
}
