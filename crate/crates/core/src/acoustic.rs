//! Continuous-space model of the microphone-array robot.
//!
//! Each robot carries six microphones on a circle and hears only the other
//! robots' emissions. The array mean approximates the local field strength;
//! the readings weighted by microphone offset approximate its gradient. A
//! proportional controller drives a differential-drive base through the same
//! two modes as the grid agent.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{choose_side, Mode, NoiseConfig, Side, SideRule};
use crate::error::{Error, Result};
use crate::field::{FieldSet, FieldSource};
use crate::geom::{angle_between, wrap_angle, Vec2};
use crate::seed::rng_from_seed;
use crate::sim::{EventKind, EventRecord, MicReadings, SimTrace, TickRecord};

pub const MIC_COUNT: usize = 6;

/// Readings are clamped as if no microphone were closer than this to a source.
pub const MIN_MIC_DISTANCE: f64 = 1e-3;

/// Gradient estimates shorter than this carry no direction.
pub const GRADIENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicArray {
    /// Meters.
    pub radius: f64,
}

impl Default for MicArray {
    fn default() -> Self {
        Self { radius: 0.1 }
    }
}

impl MicArray {
    /// Offset of microphone `n` in the robot frame; microphone 0 sits on +x.
    pub fn offset(&self, n: usize) -> Vec2 {
        Vec2::from_angle(2.0 * PI * n as f64 / MIC_COUNT as f64) * self.radius
    }

    pub fn offsets(&self) -> [Vec2; MIC_COUNT] {
        std::array::from_fn(|n| self.offset(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticRobotState {
    pub position: Vec2,
    pub heading: f64,
    pub mode: Mode,
    pub side: Option<Side>,
    pub source_gain: f64,
    /// Emission channel in Hz.
    pub frequency_tag: u32,
}

impl AcousticRobotState {
    pub fn new(position: Vec2, heading: f64, source_gain: f64, frequency_tag: u32) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
            mode: Mode::GoalSeek,
            side: None,
            source_gain,
            frequency_tag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticParams {
    pub k_p: f64,
    /// Weight of the strength error in Mode 2, rad per reading unit.
    pub alpha: f64,
    pub v_target: f64,
    pub v_min: f64,
    /// Motor reference voltage.
    pub v_m: f64,
    /// Forward speed per volt, m/s.
    pub k_v: f64,
    /// Angular rate per volt of left/right difference, rad/s.
    pub k_omega: f64,
    pub dt: f64,
    pub side_rule: SideRule,
}

impl Default for AcousticParams {
    fn default() -> Self {
        Self {
            k_p: 100.0,
            alpha: 1e-4,
            v_target: 22_000.0,
            v_min: 15_000.0,
            v_m: 50.0,
            k_v: 0.002,
            k_omega: 0.01,
            dt: 0.1,
            side_rule: SideRule::Latched,
        }
    }
}

impl AcousticParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.k_p,
            self.alpha,
            self.v_target,
            self.v_min,
            self.v_m,
            self.k_v,
            self.k_omega,
            self.dt,
        ];
        if !all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidConfig(
                "acoustic parameters must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn forward_speed(&self) -> f64 {
        self.k_v * self.v_m
    }

    /// Emission gain that makes a lone source read `v_target` at `epsilon`.
    pub fn gain_for_radius(&self, epsilon: f64) -> f64 {
        self.v_target * epsilon * epsilon
    }

    /// Turning radius under a constant control input `u`.
    pub fn turning_radius(&self, u: f64) -> f64 {
        self.forward_speed() / (2.0 * self.k_omega * u.abs())
    }
}

/// World positions of the microphones for a robot at `position` facing `heading`.
pub fn mic_positions(position: Vec2, heading: f64, array: &MicArray) -> [Vec2; MIC_COUNT] {
    array.offsets().map(|m| position + m.rotate(heading))
}

/// Per-microphone intensity from every source in `others`.
pub fn mic_readings(
    position: Vec2,
    heading: f64,
    array: &MicArray,
    others: &FieldSet,
) -> [f64; MIC_COUNT] {
    mic_positions(position, heading, array).map(|p| {
        others
            .sources()
            .iter()
            .map(|s| {
                s.strength_c
                    / (p - s.position)
                        .norm_sq()
                        .max(MIN_MIC_DISTANCE * MIN_MIC_DISTANCE)
            })
            .sum()
    })
}

pub fn estimate_average(v: &[f64; MIC_COUNT]) -> f64 {
    v.iter().sum::<f64>() / MIC_COUNT as f64
}

/// Σ (V_n − V_ave) m_n, rotated into the world frame.
pub fn estimate_gradient(v: &[f64; MIC_COUNT], array: &MicArray, heading: f64) -> Vec2 {
    let ave = estimate_average(v);
    let local = array
        .offsets()
        .iter()
        .zip(v)
        .fold(Vec2::ZERO, |acc, (m, vn)| acc + *m * (vn - ave));
    local.rotate(heading)
}

pub fn gradient_direction(grad: Vec2) -> Option<f64> {
    (grad.norm() >= GRADIENT_FLOOR).then(|| grad.angle())
}

/// Proportional steering input; positive turns clockwise.
///
/// `theta` is the heading minus the target direction. In circumnavigation
/// the strength error is signed by `side` so that reading too much always
/// steers away from the source.
pub fn control_input(
    mode: Mode,
    theta: f64,
    v_ave: f64,
    side: Side,
    params: &AcousticParams,
) -> f64 {
    match mode {
        Mode::GoalSeek => params.k_p * theta,
        Mode::Circumnavigate => {
            let v_e = v_ave - params.v_target;
            let away = -side.offset().signum();
            params.k_p * (theta + away * params.alpha * v_e)
        }
    }
}

/// Left motor at `v_m + u`, right at `v_m − u`; one Euler step.
pub fn motor_step(
    st: &AcousticRobotState,
    u: f64,
    params: &AcousticParams,
    dt: f64,
) -> AcousticRobotState {
    let left = params.v_m + u;
    let right = params.v_m - u;
    let omega = params.k_omega * (right - left);
    let mut next = *st;
    next.position = st.position + Vec2::from_angle(st.heading) * (params.forward_speed() * dt);
    next.heading = wrap_angle(st.heading + omega * dt);
    next
}

pub fn acoustic_mode_switch(
    mode: Mode,
    v_ave: f64,
    grad_dir: Option<f64>,
    goal_bearing: f64,
    heading: f64,
    params: &AcousticParams,
) -> Mode {
    let theta_fg = grad_dir.map(|d| angle_between(goal_bearing, d));
    match mode {
        Mode::GoalSeek => match theta_fg {
            Some(fg) if v_ave > params.v_target && fg < FRAC_PI_2 => Mode::Circumnavigate,
            _ => Mode::GoalSeek,
        },
        Mode::Circumnavigate => {
            let clear = theta_fg.is_some_and(|fg| fg > FRAC_PI_2)
                && angle_between(heading, goal_bearing) < FRAC_PI_2;
            if v_ave < params.v_min || clear {
                Mode::GoalSeek
            } else {
                Mode::Circumnavigate
            }
        }
    }
}

/// Where a robot gets its field estimate from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sensing {
    /// Mean and weighted-offset estimates from the six microphones.
    MicArray,
    /// The analytic strength and gradient at the robot center.
    Exact,
}

/// One robot crossing an open room past stuck, emitting robots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticScenario {
    pub start: Vec2,
    pub goal: Vec2,
    pub emitters: Vec<Vec2>,
    /// Meters; sets the emitter gain.
    pub epsilon: f64,
    pub goal_tolerance: f64,
    /// Simulated seconds.
    pub time_budget: f64,
    pub array: MicArray,
    pub params: AcousticParams,
    pub noise: NoiseConfig,
    pub seed: u64,
}

impl Default for AcousticScenario {
    fn default() -> Self {
        Self {
            start: Vec2::new(0.0, 0.0),
            goal: Vec2::new(3.0, 0.0),
            emitters: vec![Vec2::new(1.5, 0.1)],
            epsilon: 0.5,
            goal_tolerance: 0.1,
            time_budget: 300.0,
            array: MicArray::default(),
            params: AcousticParams::default(),
            noise: NoiseConfig::off(),
            seed: 0,
        }
    }
}

impl AcousticScenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.noise.validate()?;
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(pos(self.epsilon)
            && pos(self.goal_tolerance)
            && pos(self.time_budget)
            && pos(self.array.radius))
        {
            return Err(Error::InvalidConfig(
                "scenario lengths and budget must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSet {
        let gain = self.params.gain_for_radius(self.epsilon);
        self.emitters
            .iter()
            .map(|p| FieldSource::new(*p, gain))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticRun {
    pub reached: bool,
    pub elapsed: f64,
    pub path: Vec<Vec2>,
    pub trace: SimTrace,
}

/// Drives one robot from start to goal.
pub fn run_acoustic(scn: &AcousticScenario, sensing: Sensing) -> Result<AcousticRun> {
    scn.validate()?;
    let p = &scn.params;
    let field = scn.field();
    let mut rng = rng_from_seed(scn.seed);
    let config = serde_json::json!({ "scenario": scn, "sensing": sensing });
    let mut trace = SimTrace::new(config);

    let heading = (scn.goal - scn.start).angle();
    let mut st = AcousticRobotState::new(scn.start, heading, p.gain_for_radius(scn.epsilon), 0);
    let mut path = vec![st.position];
    trace.push_event(EventRecord::new(0.0, EventKind::Deployed, 0, st.position));

    let mut ticks: u64 = 0;
    let reached = loop {
        if (ticks + 1) as f64 * p.dt > scn.time_budget {
            trace.push_event(EventRecord::new(
                ticks as f64 * p.dt,
                EventKind::Timeout,
                0,
                st.position,
            ));
            break false;
        }

        let mut v = mic_readings(st.position, st.heading, &scn.array, &field);
        if scn.noise.enabled {
            let (lo, hi) = scn.noise.strength_factor_range;
            for vn in &mut v {
                *vn *= rng.gen_range(lo..=hi);
            }
        }
        let (v_ave, grad_dir) = match sensing {
            Sensing::MicArray => (
                estimate_average(&v),
                gradient_direction(estimate_gradient(&v, &scn.array, st.heading)),
            ),
            Sensing::Exact => {
                let g = field.gradient_at(st.position).unwrap_or(Vec2::ZERO);
                (field.strength_at(st.position), gradient_direction(g))
            }
        };

        let bearing = (scn.goal - st.position).angle();
        let next_mode = acoustic_mode_switch(st.mode, v_ave, grad_dir, bearing, st.heading, p);
        if next_mode == Mode::GoalSeek {
            st.side = None;
        }
        st.mode = next_mode;
        let (target, side) = match (st.mode, grad_dir) {
            (Mode::Circumnavigate, Some(d)) => {
                let side = match (p.side_rule, st.side) {
                    (SideRule::Latched, Some(s)) => s,
                    _ => choose_side(d, bearing),
                };
                st.side = Some(side);
                (wrap_angle(d + side.offset()), side)
            }
            (Mode::Circumnavigate, None) => (st.heading, st.side.unwrap_or(Side::Ccw)),
            (Mode::GoalSeek, _) => (bearing, Side::Ccw),
        };
        let u = control_input(st.mode, wrap_angle(st.heading - target), v_ave, side, p);
        st = motor_step(&st, u, p, p.dt);
        ticks += 1;
        let now = ticks as f64 * p.dt;
        path.push(st.position);
        trace.push_tick(TickRecord::new(
            now,
            0,
            st.position,
            st.heading,
            st.mode,
            v_ave,
            grad_dir,
            Some(MicReadings {
                v,
                v_ave: estimate_average(&v),
            }),
        ));

        if st.position.distance(scn.goal) <= scn.goal_tolerance {
            trace.push_event(EventRecord::new(now, EventKind::Reached, 0, st.position));
            break true;
        }
    };

    Ok(AcousticRun {
        reached,
        elapsed: ticks as f64 * p.dt,
        path,
        trace,
    })
}

/// Largest distance from a point of `path` to the polyline `reference`.
pub fn cross_track_deviation(path: &[Vec2], reference: &[Vec2]) -> f64 {
    path.iter()
        .map(|p| distance_to_polyline(*p, reference))
        .fold(0.0, f64::max)
}

fn distance_to_polyline(p: Vec2, line: &[Vec2]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => p.distance(*only),
        _ => line
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let ab = b - a;
                let len2 = ab.norm_sq();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
                };
                p.distance(a + ab * t)
            })
            .fold(f64::INFINITY, f64::min),
    }
}
