//! The two-mode robot controller.
//!
//! A robot seeks the goal in a straight line until the sensed field reaches
//! its threshold with the field gradient pointing goal-ward; it then moves
//! perpendicular to the gradient on the goal-closer side until the goal is
//! ahead and the field is behind it. By default the side is picked once, on
//! entry, and held for the rest of that circumnavigation.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{epsilon_to_threshold, FieldSet};
use crate::geom::{angle_between, wrap_angle, Vec2};

/// Gradient magnitudes below this leave the sensed direction undefined.
pub const GRADIENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    GoalSeek,
    Circumnavigate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::GoalSeek => "GoalSeek",
            Mode::Circumnavigate => "Circumnavigate",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "GoalSeek" => Some(Mode::GoalSeek),
            "Circumnavigate" => Some(Mode::Circumnavigate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Active,
    Stuck,
    Reached,
}

/// Which perpendicular of the gradient a circling robot follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Gradient direction + π/2.
    Ccw,
    /// Gradient direction − π/2.
    Cw,
}

impl Side {
    pub fn offset(self) -> f64 {
        match self {
            Side::Ccw => FRAC_PI_2,
            Side::Cw => -FRAC_PI_2,
        }
    }
}

/// When the circling side is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideRule {
    /// Re-pick the goal-closer perpendicular every control period.
    PerTick,
    /// Pick the goal-closer perpendicular on entering circumnavigation and
    /// keep it until the robot returns to goal seeking.
    Latched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
    /// Radians in (−π, π].
    pub heading: f64,
    pub mode: Mode,
    pub status: Status,
    /// Circling side while circumnavigating.
    pub side: Option<Side>,
}

impl AgentState {
    /// A fresh robot at `position` facing `goal`.
    pub fn deploy(position: Vec2, goal: Vec2) -> Self {
        Self {
            position,
            heading: (goal - position).angle(),
            mode: Mode::GoalSeek,
            status: Status::Active,
            side: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    /// Grid units per second.
    pub speed: f64,
    /// Radians per second while turning in place.
    pub turn_rate: f64,
    /// Headings within this of the target count as aligned.
    pub heading_deadband: f64,
    pub g_th: f64,
    pub epsilon: f64,
    pub side_rule: SideRule,
}

impl AgentParams {
    pub fn for_epsilon(epsilon: f64, c: f64) -> Result<Self> {
        Ok(Self {
            speed: 1.0,
            turn_rate: PI / 6.0,
            heading_deadband: PI / 36.0,
            g_th: epsilon_to_threshold(epsilon, c)?,
            epsilon,
            side_rule: SideRule::Latched,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.speed,
            self.turn_rate,
            self.heading_deadband,
            self.g_th,
            self.epsilon,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite());
        if !positive {
            return Err(Error::InvalidConfig(
                "agent parameters must be positive".into(),
            ));
        }
        if self.heading_deadband >= FRAC_PI_2 {
            return Err(Error::InvalidConfig(
                "heading deadband must be below pi/2".into(),
            ));
        }
        Ok(())
    }
}

/// Multiplicative strength noise and additive direction noise, both uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub enabled: bool,
    pub strength_factor_range: (f64, f64),
    pub grad_angle_range: (f64, f64),
}

impl NoiseConfig {
    pub fn off() -> Self {
        Self {
            enabled: false,
            ..Self::standard()
        }
    }

    /// Strength ×U[0.8, 1.2], direction +U[−π/6, π/6].
    pub fn standard() -> Self {
        Self {
            enabled: true,
            strength_factor_range: (0.8, 1.2),
            grad_angle_range: (-PI / 6.0, PI / 6.0),
        }
    }

    /// Enabled, but with both ranges collapsed to the identity.
    pub fn degenerate() -> Self {
        Self {
            enabled: true,
            strength_factor_range: (1.0, 1.0),
            grad_angle_range: (0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.strength_factor_range;
        let (c, d) = self.grad_angle_range;
        if !(a <= b && c <= d && a >= 0.0 && [a, b, c, d].iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidConfig("malformed noise ranges".into()));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(range: (f64, f64), rng: &mut R) -> f64 {
        rng.gen_range(range.0..=range.1)
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::off()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SenseSample {
    pub g: f64,
    /// Direction of increasing field; `None` when the gradient vanishes.
    pub grad_dir: Option<f64>,
    pub goal_bearing: f64,
    /// Angle between goal bearing and gradient direction, in [0, π].
    pub theta_fg: Option<f64>,
    /// Angle between heading and goal bearing, in [0, π].
    pub theta_rg: f64,
}

impl SenseSample {
    pub fn new(g: f64, grad_dir: Option<f64>, goal_bearing: f64, heading: f64) -> Self {
        Self {
            g,
            grad_dir,
            goal_bearing,
            theta_fg: grad_dir.map(|d| angle_between(goal_bearing, d)),
            theta_rg: angle_between(heading, goal_bearing),
        }
    }
}

/// Reads the field and the goal bearing at the robot's pose. Noise, when
/// enabled, scales the strength and rotates the gradient direction; the
/// goal bearing is exact.
pub fn sense<R: Rng + ?Sized>(
    pos: Vec2,
    heading: f64,
    fs: &FieldSet,
    goal: Vec2,
    noise: &NoiseConfig,
    rng: &mut R,
) -> SenseSample {
    let mut g = fs.strength_at(pos);
    let grad = fs.gradient_at(pos).unwrap_or(Vec2::ZERO);
    let mut grad_dir = (grad.norm() >= GRADIENT_FLOOR).then(|| grad.angle());
    if noise.enabled {
        g *= NoiseConfig::draw(noise.strength_factor_range, rng);
        let delta = NoiseConfig::draw(noise.grad_angle_range, rng);
        grad_dir = grad_dir.map(|d| wrap_angle(d + delta));
    }
    SenseSample::new(g, grad_dir, (goal - pos).angle(), heading)
}

/// Applies the mode transition predicates; otherwise keeps `mode`.
pub fn update_mode(mode: Mode, s: &SenseSample, g_th: f64) -> Mode {
    let Some(theta_fg) = s.theta_fg else {
        return mode;
    };
    match mode {
        Mode::GoalSeek if s.g >= g_th && theta_fg <= FRAC_PI_2 => Mode::Circumnavigate,
        Mode::Circumnavigate if s.theta_rg < FRAC_PI_2 && theta_fg > FRAC_PI_2 => Mode::GoalSeek,
        m => m,
    }
}

/// The side whose perpendicular to `grad_dir` is closer to `goal_bearing`;
/// exact ties resolve counterclockwise.
pub fn choose_side(grad_dir: f64, goal_bearing: f64) -> Side {
    let ccw = wrap_angle(grad_dir + FRAC_PI_2);
    let cw = wrap_angle(grad_dir - FRAC_PI_2);
    if angle_between(cw, goal_bearing) < angle_between(ccw, goal_bearing) {
        Side::Cw
    } else {
        Side::Ccw
    }
}

pub fn circumnavigation_heading(grad_dir: f64, goal_bearing: f64) -> f64 {
    wrap_angle(grad_dir + choose_side(grad_dir, goal_bearing).offset())
}

pub fn target_heading(mode: Mode, s: &SenseSample) -> Result<f64> {
    match mode {
        Mode::GoalSeek => Ok(s.goal_bearing),
        Mode::Circumnavigate => s
            .grad_dir
            .map(|d| circumnavigation_heading(d, s.goal_bearing))
            .ok_or(Error::MissingGradient),
    }
}

/// Mode update and heading selection for one control period.
///
/// Updates `st.mode` and `st.side` and returns the target heading. With no
/// sensed gradient while circumnavigating, the current heading is held.
pub fn decide(st: &mut AgentState, s: &SenseSample, params: &AgentParams) -> f64 {
    st.mode = update_mode(st.mode, s, params.g_th);
    match (st.mode, s.grad_dir) {
        (Mode::GoalSeek, _) => {
            st.side = None;
            s.goal_bearing
        }
        (Mode::Circumnavigate, None) => st.heading,
        (Mode::Circumnavigate, Some(d)) => {
            let side = match (params.side_rule, st.side) {
                (SideRule::Latched, Some(side)) => side,
                _ => choose_side(d, s.goal_bearing),
            };
            st.side = Some(side);
            wrap_angle(d + side.offset())
        }
    }
}

/// One control period: translate along the heading when aligned with the
/// target, otherwise turn in place toward it without overshooting.
pub fn step(st: &AgentState, target: f64, params: &AgentParams, dt: f64) -> AgentState {
    let diff = wrap_angle(target - st.heading);
    let mut next = *st;
    if diff.abs() <= params.heading_deadband {
        next.position = st.position + Vec2::from_angle(st.heading) * (params.speed * dt);
    } else {
        let turn = (params.turn_rate * dt).min(diff.abs());
        next.heading = wrap_angle(st.heading + turn.copysign(diff));
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSource;
    use crate::seed::rng_from_seed;

    fn sample(g: f64, theta_fg: f64, theta_rg: f64) -> SenseSample {
        // Goal along +x; gradient at theta_fg from it; heading at theta_rg.
        SenseSample::new(g, Some(theta_fg), 0.0, theta_rg)
    }

    #[test]
    fn mode_transitions() {
        assert_eq!(
            update_mode(Mode::GoalSeek, &sample(1.2, PI / 4.0, 0.0), 1.0),
            Mode::Circumnavigate
        );
        assert_eq!(
            update_mode(
                Mode::Circumnavigate,
                &sample(1.2, 2.0 * PI / 3.0, PI / 3.0),
                1.0
            ),
            Mode::GoalSeek
        );
        assert_eq!(
            update_mode(Mode::GoalSeek, &sample(0.5, 0.0, 0.0), 1.0),
            Mode::GoalSeek
        );
        // Field behind the robot: keep seeking the goal.
        assert_eq!(
            update_mode(Mode::GoalSeek, &sample(5.0, 2.0, 0.0), 1.0),
            Mode::GoalSeek
        );
    }

    #[test]
    fn no_gradient_never_enters_circumnavigation() {
        let s = SenseSample::new(10.0, None, 0.0, 0.0);
        assert_eq!(update_mode(Mode::GoalSeek, &s, 1.0), Mode::GoalSeek);
        assert_eq!(
            update_mode(Mode::Circumnavigate, &s, 1.0),
            Mode::Circumnavigate
        );
    }

    #[test]
    fn target_headings() {
        let s = SenseSample::new(0.0, None, 0.7, 0.0);
        assert_eq!(target_heading(Mode::GoalSeek, &s).unwrap(), 0.7);
        assert!(matches!(
            target_heading(Mode::Circumnavigate, &s),
            Err(Error::MissingGradient)
        ));

        let s = SenseSample::new(1.0, Some(0.0), PI / 3.0, 0.0);
        assert_eq!(target_heading(Mode::Circumnavigate, &s).unwrap(), FRAC_PI_2);
        let s = SenseSample::new(1.0, Some(0.0), -PI / 3.0, 0.0);
        assert_eq!(
            target_heading(Mode::Circumnavigate, &s).unwrap(),
            -FRAC_PI_2
        );
        // Tie: both perpendiculars are π/2 from the goal.
        let s = SenseSample::new(1.0, Some(0.0), 0.0, 0.0);
        assert_eq!(target_heading(Mode::Circumnavigate, &s).unwrap(), FRAC_PI_2);
    }

    fn params() -> AgentParams {
        AgentParams::for_epsilon(1.0, 1.0).unwrap()
    }

    #[test]
    fn aligned_step_translates() {
        let st = AgentState::deploy(Vec2::ZERO, Vec2::new(3.0, 4.0));
        let next = step(&st, st.heading, &params(), 0.1);
        assert!((next.position.distance(st.position) - 0.1).abs() < 1e-15);
        assert_eq!(next.heading, st.heading);
    }

    #[test]
    fn misaligned_step_turns_in_place() {
        let st = AgentState {
            position: Vec2::new(1.0, 1.0),
            heading: FRAC_PI_2,
            mode: Mode::GoalSeek,
            status: Status::Active,
            side: None,
        };
        let next = step(&st, 0.0, &params(), 0.1);
        assert_eq!(next.position, st.position);
        assert!((next.heading - (FRAC_PI_2 - PI / 60.0)).abs() < 1e-15);
    }

    #[test]
    fn turning_never_overshoots() {
        let st = AgentState {
            position: Vec2::ZERO,
            heading: 0.0,
            mode: Mode::GoalSeek,
            status: Status::Active,
            side: None,
        };
        let next = step(&st, 0.1, &params(), 1.0);
        assert!((next.heading - 0.1).abs() < 1e-15);
    }

    #[test]
    fn turning_crosses_the_branch_cut() {
        let st = AgentState {
            position: Vec2::ZERO,
            heading: PI - 0.01,
            mode: Mode::GoalSeek,
            status: Status::Active,
            side: None,
        };
        // Shortest way to -π + 0.5 is counterclockwise through π.
        let next = step(&st, -PI + 0.5, &params(), 0.1);
        assert!((next.heading - wrap_angle(PI - 0.01 + PI / 60.0)).abs() < 1e-12);
        assert!(next.heading <= PI && next.heading > -PI);
    }

    #[test]
    fn sense_without_sources() {
        let mut rng = rng_from_seed(0);
        let s = sense(
            Vec2::ZERO,
            0.0,
            &FieldSet::new(),
            Vec2::new(1.0, 1.0),
            &NoiseConfig::standard(),
            &mut rng,
        );
        assert_eq!(s.g, 0.0);
        assert!(s.grad_dir.is_none() && s.theta_fg.is_none());
        assert_eq!(s.goal_bearing, PI / 4.0);
    }

    #[test]
    fn sense_noise_off_is_exact() {
        let fs: FieldSet = [FieldSource::new(Vec2::new(2.0, 1.0), 1.0)]
            .into_iter()
            .collect();
        let p = Vec2::new(0.5, 0.25);
        let mut rng = rng_from_seed(0);
        let s = sense(
            p,
            0.0,
            &fs,
            Vec2::new(9.0, 9.0),
            &NoiseConfig::off(),
            &mut rng,
        );
        assert_eq!(s.g, fs.strength_at(p));
        assert_eq!(s.grad_dir.unwrap(), fs.gradient_at(p).unwrap().angle());
    }

    #[test]
    fn degenerate_noise_is_identity() {
        let fs: FieldSet = [FieldSource::new(Vec2::new(2.0, 1.0), 1.0)]
            .into_iter()
            .collect();
        let p = Vec2::new(0.5, 0.25);
        let mut rng = rng_from_seed(0);
        let clean = sense(
            p,
            0.3,
            &fs,
            Vec2::new(9.0, 9.0),
            &NoiseConfig::off(),
            &mut rng,
        );
        let noisy = sense(
            p,
            0.3,
            &fs,
            Vec2::new(9.0, 9.0),
            &NoiseConfig::degenerate(),
            &mut rng,
        );
        assert_eq!(clean, noisy);
    }

    #[test]
    fn params_validation() {
        let mut p = params();
        assert!(p.validate().is_ok());
        p.heading_deadband = FRAC_PI_2;
        assert!(p.validate().is_err());
        p.heading_deadband = 0.1;
        p.speed = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn latched_side_survives_a_swing_of_the_gradient() {
        let mut p = params();
        p.g_th = 1.0;
        let mut st = AgentState::deploy(Vec2::ZERO, Vec2::new(10.0, 0.0));
        // Gradient slightly left of the goal: the clockwise perpendicular is closer.
        let first = SenseSample::new(2.0, Some(0.2), 0.0, st.heading);
        let h = decide(&mut st, &first, &p);
        assert_eq!(st.mode, Mode::Circumnavigate);
        assert_eq!(st.side, Some(Side::Cw));
        assert!((h - (0.2 - FRAC_PI_2)).abs() < 1e-12);
        // The gradient swings to the other side of the goal bearing.
        let second = SenseSample::new(2.0, Some(-0.2), 0.0, st.heading);
        let h = decide(&mut st, &second, &p);
        assert_eq!(st.side, Some(Side::Cw));
        assert!((h - (-0.2 - FRAC_PI_2)).abs() < 1e-12);

        p.side_rule = SideRule::PerTick;
        let h = decide(&mut st, &second, &p);
        assert_eq!(st.side, Some(Side::Ccw));
        assert!((h - (-0.2 + FRAC_PI_2)).abs() < 1e-12);
    }

    #[test]
    fn side_clears_on_return_to_goal_seek() {
        let p = params();
        let mut st = AgentState::deploy(Vec2::ZERO, Vec2::new(10.0, 0.0));
        st.mode = Mode::Circumnavigate;
        st.side = Some(Side::Ccw);
        let s = SenseSample::new(0.1, Some(PI), 0.0, 0.1);
        assert_eq!(decide(&mut st, &s, &p), 0.0);
        assert_eq!(st.mode, Mode::GoalSeek);
        assert_eq!(st.side, None);
    }

    #[test]
    fn missing_gradient_holds_heading() {
        let p = params();
        let mut st = AgentState::deploy(Vec2::ZERO, Vec2::new(10.0, 0.0));
        st.mode = Mode::Circumnavigate;
        st.heading = 1.0;
        let s = SenseSample::new(0.0, None, 0.0, st.heading);
        assert_eq!(decide(&mut st, &s, &p), 1.0);
        assert_eq!(st.mode, Mode::Circumnavigate);
    }
}
