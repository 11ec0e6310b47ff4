//! Planar arm, joystick, tool and ball.
//!
//! A three-link arm follows a piecewise-linear joint trajectory through `T`
//! waypoints. When the hand is inside the joystick's grip radius the joystick
//! tilts toward it; otherwise the tilt relaxes toward zero. The tilt drives a
//! tool across the workspace and the tool drags the ball once it comes within
//! the magnet radius. The ball sits outside the arm's reach, so it can only be
//! moved through the whole chain. A distractor is resampled uniformly on every
//! rollout regardless of the action.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{ActionParams, EntitySpec, Outcome, OutcomeSchema};

pub const HAND: &str = "hand";
pub const JOYSTICK: &str = "joystick";
pub const TOOL: &str = "tool";
pub const BALL: &str = "ball";
pub const DISTRACTOR: &str = "distractor";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArmToolBallConfig {
    pub link_lengths: [f64; 3],
    /// Waypoints per rollout (T); the action has `3·T` components.
    pub waypoints: usize,
    /// Simulation substeps per rollout (S), spread evenly over the trajectory.
    pub substeps: usize,
    pub joystick_pos: [f64; 2],
    pub grip_radius: f64,
    /// Tool displacement per substep at full tilt.
    pub gain: f64,
    /// Fraction of the tilt kept per substep once the hand lets go.
    pub tilt_decay: f64,
    pub tool_start: [f64; 2],
    pub ball_start: [f64; 2],
    pub magnet_radius: f64,
    /// Square workspace `[lo, hi]²` for tool, ball and distractor.
    pub workspace: [f64; 2],
}

impl Default for ArmToolBallConfig {
    fn default() -> Self {
        ArmToolBallConfig {
            link_lengths: [0.5, 0.3, 0.2],
            waypoints: 5,
            substeps: 50,
            joystick_pos: [0.6, 0.6],
            grip_radius: 0.1,
            gain: 0.01,
            tilt_decay: 0.5,
            tool_start: [1.66, 1.66],
            ball_start: [1.5, 1.5],
            magnet_radius: 0.15,
            workspace: [-2.0, 2.0],
        }
    }
}

impl ArmToolBallConfig {
    pub fn reach(&self) -> f64 {
        self.link_lengths.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::domain(format!("arm-tool-ball config: {msg}")));
        if self.link_lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return bad("link lengths must be positive");
        }
        if self.waypoints == 0 || self.substeps == 0 {
            return bad("waypoints and substeps must be >= 1");
        }
        let [lo, hi] = self.workspace;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return bad("workspace must satisfy lo < hi");
        }
        if !(self.grip_radius > 0.0 && self.magnet_radius > 0.0 && self.gain > 0.0) {
            return bad("grip radius, magnet radius and gain must be positive");
        }
        if !(0.0..1.0).contains(&self.tilt_decay) {
            return bad("tilt decay must lie in [0, 1)");
        }
        let in_ws = |p: [f64; 2]| p.iter().all(|v| (lo..=hi).contains(v));
        if !in_ws(self.tool_start) || !in_ws(self.ball_start) {
            return bad("tool and ball must start inside the workspace");
        }
        if norm(self.ball_start) <= self.reach() {
            return bad("ball must start beyond the arm's reach");
        }
        if norm(self.joystick_pos) >= self.reach() {
            return bad("joystick must be within the arm's reach");
        }
        Ok(())
    }
}

fn norm(p: [f64; 2]) -> f64 {
    libm::hypot(p[0], p[1])
}

/// Hand position of a planar chain with the given joint angles (radians).
pub fn forward_kinematics(angles: &[f64; 3], links: &[f64; 3]) -> [f64; 2] {
    let mut heading = 0.0;
    let mut pos = [0.0, 0.0];
    for (theta, len) in angles.iter().zip(links) {
        heading += theta;
        pos[0] += len * libm::cos(heading);
        pos[1] += len * libm::sin(heading);
    }
    pos
}

/// Which links of the causal chain fired during a rollout.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainTrace {
    /// The hand was inside the grip radius on some substep.
    pub gripped: bool,
    /// The joystick tilt was nonzero on some substep.
    pub tilted: bool,
    /// The tool was within the magnet radius of the ball on some substep.
    pub magnet_contact: bool,
}

#[derive(Clone, Debug)]
pub struct ArmToolBall {
    cfg: ArmToolBallConfig,
    spec: EnvSpec,
    rng: RngStream,
}

impl ArmToolBall {
    pub fn new(cfg: ArmToolBallConfig, rng: RngStream) -> Result<Self> {
        cfg.validate()?;
        let r = cfg.reach();
        let ws = (cfg.workspace[0], cfg.workspace[1]);
        let schema = OutcomeSchema::new(vec![
            EntitySpec::new(HAND, vec![(-r, r); 2]),
            EntitySpec::new(JOYSTICK, vec![(-1.0, 1.0); 2]),
            EntitySpec::new(TOOL, vec![ws; 2]),
            EntitySpec::new(BALL, vec![ws; 2]),
            EntitySpec::new(DISTRACTOR, vec![ws; 2]),
        ])?;
        let center = 0.5 * (ws.0 + ws.1);
        let rest = Outcome::new()
            .with(HAND, forward_kinematics(&[0.0; 3], &cfg.link_lengths).to_vec())
            .with(JOYSTICK, vec![0.0, 0.0])
            .with(TOOL, cfg.tool_start.to_vec())
            .with(BALL, cfg.ball_start.to_vec())
            .with(DISTRACTOR, vec![center, center]);
        let spec = EnvSpec { name: "atb".into(), action_dim: 3 * cfg.waypoints, schema, rest };
        Ok(ArmToolBall { cfg, spec, rng })
    }

    pub fn config(&self) -> &ArmToolBallConfig {
        &self.cfg
    }

    /// Runs one rollout and also reports which parts of the chain fired.
    pub fn simulate(&mut self, action: &ActionParams) -> Result<(Outcome, ChainTrace)> {
        let cfg = &self.cfg;
        if action.dim() != 3 * cfg.waypoints {
            return Err(Error::schema(format!(
                "arm-tool-ball expects {} action components, got {}",
                3 * cfg.waypoints,
                action.dim()
            )));
        }
        let [lo, hi] = cfg.workspace;
        let distractor = [self.rng.random_range(lo..hi), self.rng.random_range(lo..hi)];

        // keyframes: rest pose, then the T waypoints
        let mut keyframes: Vec<[f64; 3]> = Vec::with_capacity(cfg.waypoints + 1);
        keyframes.push([0.0; 3]);
        for w in action.as_slice().chunks_exact(3) {
            keyframes.push([w[0] * PI, w[1] * PI, w[2] * PI]);
        }

        let mut trace = ChainTrace::default();
        let mut hand = forward_kinematics(&keyframes[0], &cfg.link_lengths);
        let mut tilt = [0.0f64; 2];
        let mut tool = cfg.tool_start;
        let mut ball = cfg.ball_start;
        let segments = cfg.waypoints as f64;
        for step in 1..=cfg.substeps {
            let u = step as f64 * segments / cfg.substeps as f64;
            let seg = (libm::floor(u) as usize).min(cfg.waypoints - 1);
            let frac = u - seg as f64;
            let (a, b) = (keyframes[seg], keyframes[seg + 1]);
            let angles = [0, 1, 2].map(|j| a[j] + (b[j] - a[j]) * frac);
            hand = forward_kinematics(&angles, &cfg.link_lengths);

            let offset = [hand[0] - cfg.joystick_pos[0], hand[1] - cfg.joystick_pos[1]];
            if norm(offset) < cfg.grip_radius {
                trace.gripped = true;
                tilt = offset.map(|o| (o / cfg.grip_radius).clamp(-1.0, 1.0));
            } else {
                tilt = tilt.map(|t| t * cfg.tilt_decay);
            }
            if tilt != [0.0, 0.0] {
                trace.tilted = true;
            }
            tool = [0, 1].map(|j| (tool[j] + cfg.gain * tilt[j]).clamp(lo, hi));
            if norm([tool[0] - ball[0], tool[1] - ball[1]]) < cfg.magnet_radius {
                trace.magnet_contact = true;
                ball = tool;
            }
        }
        let outcome = Outcome::new()
            .with(HAND, hand.to_vec())
            .with(JOYSTICK, tilt.to_vec())
            .with(TOOL, tool.to_vec())
            .with(BALL, ball.to_vec())
            .with(DISTRACTOR, distractor.to_vec());
        Ok((outcome, trace))
    }
}

impl Environment for ArmToolBall {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn execute(&mut self, action: &ActionParams) -> Result<Outcome> {
        self.simulate(action).map(|(o, _)| o)
    }
}
