//! Sequential-deployment trial engine.
//!
//! One robot moves at a time. When it enters an impassable cell (or leaves
//! the grid) it freezes, becomes a field source of strength `c`, and the next
//! robot is placed at the start facing the goal. The trial ends when a robot
//! comes within `goal_tolerance` of the goal, when the time budget would be
//! exceeded, or when the last permitted robot gets stuck.

mod trace;

pub use trace::{
    quantize, EventKind, EventRecord, MicReadings, Record, SimTrace, TickRecord, TRACE_FORMAT,
    TRACE_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::agent::{self, AgentParams, AgentState, NoiseConfig, SideRule, Status};
use crate::error::{Error, Result};
use crate::field::{FieldSet, FieldSource};
use crate::geom::Vec2;
use crate::seed::rng_from_seed;
use crate::terrain::GridTerrain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Control period, seconds.
    pub dt: f64,
    /// Total simulated seconds per trial.
    pub time_budget: f64,
    pub goal_tolerance: f64,
    pub max_robots: usize,
    /// Circumferential radius; the threshold is `c / epsilon²`.
    pub epsilon: f64,
    pub c: f64,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub side_rule: SideRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            time_budget: 10_000.0,
            goal_tolerance: 1.0,
            max_robots: 100,
            epsilon: 1.0,
            c: 1.0,
            noise: NoiseConfig::off(),
            seed: 0,
            side_rule: SideRule::Latched,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.dt) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !pos(self.time_budget) {
            return Err(Error::InvalidConfig("time_budget must be positive".into()));
        }
        if !pos(self.goal_tolerance) {
            return Err(Error::InvalidConfig(
                "goal_tolerance must be positive".into(),
            ));
        }
        if self.max_robots < 1 {
            return Err(Error::InvalidConfig("max_robots must be at least 1".into()));
        }
        if !pos(self.c) {
            return Err(Error::InvalidConfig("c must be positive".into()));
        }
        self.noise.validate()?;
        self.agent_params()?.validate()
    }

    pub fn agent_params(&self) -> Result<AgentParams> {
        let mut p = AgentParams::for_epsilon(self.epsilon, self.c)?;
        p.side_rule = self.side_rule;
        Ok(p)
    }

    pub fn g_th(&self) -> f64 {
        self.c / (self.epsilon * self.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Reached,
    Timeout,
    RobotsExhausted,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Reached => "Reached",
            Outcome::Timeout => "Timeout",
            Outcome::RobotsExhausted => "RobotsExhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub success: bool,
    pub robots_deployed: usize,
    pub robots_stuck: usize,
    /// Simulated seconds, exactly `ticks × dt`.
    pub elapsed: f64,
    pub ticks: u64,
    pub reason: Outcome,
    /// Where each stuck robot froze, in order.
    pub stuck_positions: Vec<Vec2>,
}

/// True iff the cell containing `p` is impassable or `p` is off the grid.
pub fn is_stuck(t: &GridTerrain, p: Vec2) -> bool {
    t.is_blocked_at(p)
}

/// Closed-ball arrival test.
pub fn is_goal_reached(p: Vec2, goal: Vec2, tol: f64) -> bool {
    p.distance(goal) <= tol
}

/// How much of a run to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceLevel {
    /// Every tick and every event.
    Full,
    /// Events only; sweeps use this.
    Events,
}

pub fn run_trial(t: &GridTerrain, cfg: &SimConfig) -> Result<(SimResult, SimTrace)> {
    run_trial_with(t, cfg, TraceLevel::Full)
}

pub fn run_trial_with(
    t: &GridTerrain,
    cfg: &SimConfig,
    level: TraceLevel,
) -> Result<(SimResult, SimTrace)> {
    t.validate()?;
    cfg.validate()?;
    let params = cfg.agent_params()?;
    let start = t.start();
    let goal = t.goal();
    let mut rng = rng_from_seed(cfg.seed);
    let mut fields = FieldSet::new();
    let mut trace = SimTrace::new(serde_json::to_value(cfg).expect("config serializes"));
    let mut stuck_positions = Vec::new();

    let mut ticks: u64 = 0;
    let mut robot = 0usize;
    let mut agent = AgentState::deploy(start, goal);
    trace.push_event(EventRecord::new(0.0, EventKind::Deployed, robot, start));

    let reason = loop {
        if (ticks + 1) as f64 * cfg.dt > cfg.time_budget {
            let now = ticks as f64 * cfg.dt;
            trace.push_event(EventRecord::new(
                now,
                EventKind::Timeout,
                robot,
                agent.position,
            ));
            break Outcome::Timeout;
        }

        let s = agent::sense(
            agent.position,
            agent.heading,
            &fields,
            goal,
            &cfg.noise,
            &mut rng,
        );
        let target = agent::decide(&mut agent, &s, &params);
        agent = agent::step(&agent, target, &params, cfg.dt);
        ticks += 1;
        let now = ticks as f64 * cfg.dt;

        if level == TraceLevel::Full {
            trace.push_tick(TickRecord::new(
                now,
                robot,
                agent.position,
                agent.heading,
                agent.mode,
                s.g,
                s.grad_dir,
                None,
            ));
        }

        if is_stuck(t, agent.position) {
            agent.status = Status::Stuck;
            trace.push_event(EventRecord::new(
                now,
                EventKind::Stuck,
                robot,
                agent.position,
            ));
            fields.push(FieldSource::new(agent.position, cfg.c));
            stuck_positions.push(agent.position);
            if robot + 1 >= cfg.max_robots {
                trace.push_event(EventRecord::new(
                    now,
                    EventKind::Exhausted,
                    robot,
                    agent.position,
                ));
                break Outcome::RobotsExhausted;
            }
            robot += 1;
            agent = AgentState::deploy(start, goal);
            trace.push_event(EventRecord::new(now, EventKind::Deployed, robot, start));
        } else if is_goal_reached(agent.position, goal, cfg.goal_tolerance) {
            agent.status = Status::Reached;
            trace.push_event(EventRecord::new(
                now,
                EventKind::Reached,
                robot,
                agent.position,
            ));
            break Outcome::Reached;
        }
    };

    let result = SimResult {
        success: reason == Outcome::Reached,
        robots_deployed: robot + 1,
        robots_stuck: stuck_positions.len(),
        elapsed: ticks as f64 * cfg.dt,
        ticks,
        reason,
        stuck_positions,
    };
    Ok((result, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{DEFAULT_GOAL, DEFAULT_START};

    #[test]
    fn stuck_predicate() {
        let mut t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        t.set_blocked(30, 30, true);
        assert!(!is_stuck(&t, Vec2::new(29.5, 30.5)));
        assert!(is_stuck(&t, Vec2::new(30.5, 30.5)));
        assert!(is_stuck(&t, Vec2::new(30.0, 30.0)));
        assert!(!is_stuck(&t, Vec2::new(29.999, 30.5)));
        assert!(is_stuck(&t, Vec2::new(-0.1, 30.5)));
        assert!(is_stuck(&t, Vec2::new(12.0, 60.0)));
    }

    #[test]
    fn goal_predicate_is_closed() {
        let g = Vec2::new(44.5, 44.5);
        assert!(is_goal_reached(g, g, 1.0));
        assert!(is_goal_reached(Vec2::new(45.5, 44.5), g, 1.0));
        assert!(!is_goal_reached(Vec2::new(45.5 + 1e-9, 44.5), g, 1.0));
    }

    #[test]
    fn open_terrain_single_robot() {
        let t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        for eps in [1.0, 3.0, 5.0] {
            let cfg = SimConfig {
                epsilon: eps,
                ..Default::default()
            };
            let (res, trace) = run_trial(&t, &cfg).unwrap();
            assert!(res.success);
            assert_eq!(res.robots_deployed, 1);
            assert_eq!(res.robots_stuck, 0);
            let straight = DEFAULT_START.distance(DEFAULT_GOAL) - cfg.goal_tolerance;
            assert!(
                (res.elapsed - straight).abs() <= cfg.dt + 1e-9,
                "elapsed {}",
                res.elapsed
            );
            assert_eq!(trace.ticks().count() as u64, res.ticks);
        }
    }

    #[test]
    fn timeout_respects_budget() {
        let t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        let cfg = SimConfig {
            time_budget: 5.0,
            ..Default::default()
        };
        let (res, trace) = run_trial(&t, &cfg).unwrap();
        assert_eq!(res.reason, Outcome::Timeout);
        assert_eq!(res.ticks, 50);
        assert!(res.elapsed <= cfg.time_budget);
        assert_eq!(trace.events().last().unwrap().kind, EventKind::Timeout);
    }

    #[test]
    fn invalid_config_rejected() {
        let t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        for bad in [
            SimConfig {
                dt: 0.0,
                ..Default::default()
            },
            SimConfig {
                max_robots: 0,
                ..Default::default()
            },
            SimConfig {
                epsilon: -1.0,
                ..Default::default()
            },
            SimConfig {
                goal_tolerance: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(run_trial(&t, &bad), Err(Error::InvalidConfig(_))));
        }
    }
}
