//! Monte-Carlo harness: width-binned terrain corpora, radius sweeps, noise
//! comparisons and heatmap export.
//!
//! All randomness is derived up front from the master seed, so results do
//! not depend on how many worker threads execute the trials.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::NoiseConfig;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::seed::{derive_seed, rng_from_seed};
use crate::sim::{run_trial_with, Outcome, SimConfig, TraceLevel};
use crate::terrain::{
    generate_terrain, min_path_width, path_exists, GridTerrain, PerlinConfig, DEFAULT_GOAL,
    DEFAULT_SIZE, DEFAULT_START,
};

const TERRAIN_STREAM: u64 = 0x7465_7272;
const TRIAL_STREAM: u64 = 0x7472_6961;

/// Candidates evaluated per parallel batch during rejection sampling.
const BATCH: u64 = 64;

/// 1, 1.5, …, 5.
pub fn half_steps() -> Vec<f64> {
    (2..=10).map(|k| k as f64 * 0.5).collect()
}

/// How candidate terrains are produced and accepted into width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub size: usize,
    pub lattice_cell_size: f64,
    pub start: Vec2,
    pub goal: Vec2,
    /// A terrain belongs to a bin when its width is within this of the bin.
    pub width_tolerance: f64,
    /// Consecutive rejections tolerated before a bin is declared unreachable.
    pub rejection_budget: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            size: DEFAULT_SIZE,
            lattice_cell_size: 10.0,
            start: DEFAULT_START,
            goal: DEFAULT_GOAL,
            width_tolerance: 0.3,
            rejection_budget: 100_000,
        }
    }
}

/// A corpus member with the seeds that reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusTerrain {
    pub candidate_index: u64,
    pub terrain_seed: u64,
    pub width: f64,
    pub terrain: GridTerrain,
}

fn candidate(master_seed: u64, index: u64, spec: &CorpusSpec) -> Result<(u64, GridTerrain)> {
    let seed = derive_seed(master_seed, &[TERRAIN_STREAM, index]);
    let cfg = PerlinConfig {
        seed,
        lattice_cell_size: spec.lattice_cell_size,
        threshold_a: None,
    };
    let mut rng = rng_from_seed(derive_seed(seed, &[1]));
    let t = generate_terrain(&cfg, spec.size, spec.size, spec.start, spec.goal, &mut rng)?;
    Ok((seed, t))
}

/// Candidate index, generated terrain with its seed, and measured width.
type Candidate = (u64, Result<(u64, GridTerrain)>, f64);

/// Rejection-samples `count` terrains per bin from one shared candidate
/// stream. Each bin receives the first `count` candidates (in stream order)
/// whose width lies within tolerance, so the corpus of a bin does not depend
/// on which other bins are collected alongside it.
pub fn collect_corpora(
    width_bins: &[f64],
    count: usize,
    master_seed: u64,
    spec: &CorpusSpec,
) -> Result<Vec<Vec<CorpusTerrain>>> {
    if count == 0 {
        return Err(Error::InvalidConfig(
            "terrain count must be at least 1".into(),
        ));
    }
    let mut corpora: Vec<Vec<CorpusTerrain>> = vec![Vec::with_capacity(count); width_bins.len()];
    let mut since_accept = vec![0u64; width_bins.len()];
    let mut next = 0u64;

    while corpora.iter().any(|c| c.len() < count) {
        let batch: Vec<Candidate> = (next..next + BATCH)
            .into_par_iter()
            .map(|i| match candidate(master_seed, i, spec) {
                Ok((seed, t)) => {
                    let w = if path_exists(&t) {
                        min_path_width(&t)
                    } else {
                        0.0
                    };
                    (i, Ok((seed, t)), w)
                }
                Err(e) => (i, Err(e), 0.0),
            })
            .collect();
        next += BATCH;

        for (i, made, width) in batch {
            let (seed, terrain) = made?;
            for (b, &bin) in width_bins.iter().enumerate() {
                if corpora[b].len() >= count {
                    continue;
                }
                if width > 0.0 && (width - bin).abs() <= spec.width_tolerance {
                    corpora[b].push(CorpusTerrain {
                        candidate_index: i,
                        terrain_seed: seed,
                        width,
                        terrain: terrain.clone(),
                    });
                    since_accept[b] = 0;
                } else {
                    since_accept[b] += 1;
                    if since_accept[b] > spec.rejection_budget {
                        return Err(Error::BinUnreachable {
                            width: bin,
                            attempts: since_accept[b],
                        });
                    }
                }
            }
        }
    }
    Ok(corpora)
}

/// `count` terrains whose minimum path width is within tolerance of
/// `width_bin`, deterministic in `master_seed`.
pub fn collect_terrains(
    width_bin: f64,
    count: usize,
    master_seed: u64,
) -> Result<Vec<GridTerrain>> {
    let mut c = collect_corpora(&[width_bin], count, master_seed, &CorpusSpec::default())?;
    Ok(c.pop()
        .unwrap_or_default()
        .into_iter()
        .map(|t| t.terrain)
        .collect())
}

/// Acceptance counts per bin over the first `candidates` of the stream.
pub fn bin_diagnostics(
    width_bins: &[f64],
    candidates: u64,
    master_seed: u64,
    spec: &CorpusSpec,
) -> Result<Vec<usize>> {
    let widths: Vec<f64> = (0..candidates)
        .into_par_iter()
        .map(|i| {
            let (_, t) = candidate(master_seed, i, spec)?;
            Ok(if path_exists(&t) {
                min_path_width(&t)
            } else {
                0.0
            })
        })
        .collect::<Result<_>>()?;
    Ok(width_bins
        .iter()
        .map(|&b| {
            widths
                .iter()
                .filter(|&&w| w > 0.0 && (w - b).abs() <= spec.width_tolerance)
                .count()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub epsilons: Vec<f64>,
    pub width_bins: Vec<f64>,
    pub trials_per_cell: usize,
    pub master_seed: u64,
    pub noise: NoiseConfig,
    /// Base trial configuration; `epsilon`, `noise` and `seed` are replaced
    /// per trial.
    pub sim: SimConfig,
    pub corpus: CorpusSpec,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            epsilons: half_steps(),
            width_bins: half_steps(),
            trials_per_cell: 100,
            master_seed: 0,
            noise: NoiseConfig::off(),
            sim: SimConfig::default(),
            corpus: CorpusSpec::default(),
            threads: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.width_bins.is_empty() {
            return Err(Error::InvalidConfig(
                "epsilon and width lists must be nonempty".into(),
            ));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::InvalidConfig(
                "trials_per_cell must be at least 1".into(),
            ));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidConfig("epsilons must be positive".into()));
        }
        self.noise.validate()?;
        self.sim.validate()
    }

    pub fn trial_seed(&self, eps_index: usize, bin_index: usize, trial: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[
                TRIAL_STREAM,
                eps_index as u64,
                bin_index as u64,
                trial as u64,
            ],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub eps_index: usize,
    pub bin_index: usize,
    pub trial: usize,
    pub terrain_seed: u64,
    pub sim_seed: u64,
    pub measured_width: f64,
    pub outcome: Outcome,
    pub robots_used: usize,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub epsilon: f64,
    pub width: f64,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub epsilons: Vec<f64>,
    pub width_bins: Vec<f64>,
    /// Epsilon-major: cell `(e, b)` is at `e * width_bins.len() + b`.
    pub cells: Vec<CellResult>,
    pub trials: Vec<TrialRecord>,
}

impl SweepResult {
    pub fn cell(&self, eps_index: usize, bin_index: usize) -> &CellResult {
        &self.cells[eps_index * self.width_bins.len() + bin_index]
    }

    /// Rebuilds the matrix from per-trial records.
    pub fn aggregate(epsilons: Vec<f64>, width_bins: Vec<f64>, trials: Vec<TrialRecord>) -> Self {
        let nb = width_bins.len();
        let mut cells: Vec<CellResult> = epsilons
            .iter()
            .flat_map(|&epsilon| {
                width_bins.iter().map(move |&width| CellResult {
                    epsilon,
                    width,
                    trials: 0,
                    successes: 0,
                    rate: 0.0,
                })
            })
            .collect();
        for r in &trials {
            let c = &mut cells[r.eps_index * nb + r.bin_index];
            c.trials += 1;
            c.successes += usize::from(r.outcome == Outcome::Reached);
        }
        for c in &mut cells {
            c.rate = if c.trials > 0 {
                c.successes as f64 / c.trials as f64
            } else {
                0.0
            };
        }
        Self {
            epsilons,
            width_bins,
            cells,
            trials,
        }
    }

    /// `epsilon,width,trials,successes,rate`, widest bin first, then by
    /// increasing epsilon.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<&CellResult> = self.cells.iter().collect();
        rows.sort_by(|a, b| {
            b.width
                .total_cmp(&a.width)
                .then(a.epsilon.total_cmp(&b.epsilon))
        });
        let mut out = String::from("epsilon,width,trials,successes,rate\n");
        for c in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.epsilon, c.width, c.trials, c.successes, c.rate
            );
        }
        out
    }

    /// Heatmap with epsilon on the horizontal axis and width on the vertical
    /// axis (widest at the top), one labelled square per cell.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 48;
        const LEFT: usize = 56;
        const TOP: usize = 16;
        const BOTTOM: usize = 48;
        let ne = self.epsilons.len();
        let nb = self.width_bins.len();
        let w = LEFT + ne * CELL + 16;
        let h = TOP + nb * CELL + BOTTOM;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        for (e, &eps) in self.epsilons.iter().enumerate() {
            for (b, &width) in self.width_bins.iter().enumerate() {
                let c = self.cell(e, b);
                let x = LEFT + e * CELL;
                let y = TOP + (nb - 1 - b) * CELL;
                let shade = (255.0 * (1.0 - c.rate)).round() as u8;
                let _ = writeln!(
                    s,
                    r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="rgb({shade},{shade},255)" stroke="#888"><title>epsilon {eps}, width {width}</title></rect>"##
                );
                let ink = if c.rate > 0.5 { "white" } else { "black" };
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="middle" fill="{ink}">{:.2}</text>"#,
                    x + CELL / 2,
                    y + CELL / 2 + 4,
                    c.rate
                );
            }
        }
        for (e, &eps) in self.epsilons.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">{eps}</text>"#,
                LEFT + e * CELL + CELL / 2,
                TOP + nb * CELL + 16
            );
        }
        for (b, &width) in self.width_bins.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{width}</text>"#,
                LEFT - 8,
                TOP + (nb - 1 - b) * CELL + CELL / 2 + 4
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">circumferential radius</text>"#,
            LEFT + ne * CELL / 2,
            TOP + nb * CELL + 38
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">minimum path width</text>"#,
            TOP + nb * CELL / 2,
            TOP + nb * CELL / 2
        );
        s.push_str("</svg>\n");
        s
    }
}

/// Writes `<stem>.csv` and `<stem>.svg`.
pub fn export_heatmap(result: &SweepResult, stem: impl AsRef<Path>) -> Result<()> {
    let stem = stem.as_ref();
    std::fs::write(stem.with_extension("csv"), result.to_csv())?;
    std::fs::write(stem.with_extension("svg"), result.to_svg())?;
    Ok(())
}

/// Spec, master seed and crate version, enough to rerun a sweep.
pub fn write_manifest(spec: &SweepSpec, path: impl AsRef<Path>) -> Result<()> {
    let manifest = serde_json::json!({
        "tool": "bycoms",
        "version": env!("CARGO_PKG_VERSION"),
        "master_seed": spec.master_seed,
        "spec": spec,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every (epsilon, width bin, trial) combination on a shared corpus.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    in_pool(spec.threads, || {
        let corpora = collect_corpora(
            &spec.width_bins,
            spec.trials_per_cell,
            spec.master_seed,
            &spec.corpus,
        )?;
        sweep_on(spec, &corpora)
    })?
}

fn sweep_on(spec: &SweepSpec, corpora: &[Vec<CorpusTerrain>]) -> Result<SweepResult> {
    let work: Vec<(usize, usize, usize)> = (0..spec.epsilons.len())
        .flat_map(|e| {
            (0..spec.width_bins.len())
                .flat_map(move |b| (0..spec.trials_per_cell).map(move |k| (e, b, k)))
        })
        .collect();
    let trials = work
        .par_iter()
        .map(|&(e, b, k)| {
            let entry = &corpora[b][k];
            let sim_seed = spec.trial_seed(e, b, k);
            let cfg = SimConfig {
                epsilon: spec.epsilons[e],
                noise: spec.noise,
                seed: sim_seed,
                ..spec.sim
            };
            let (res, _) = run_trial_with(&entry.terrain, &cfg, TraceLevel::Events)?;
            Ok(TrialRecord {
                eps_index: e,
                bin_index: b,
                trial: k,
                terrain_seed: entry.terrain_seed,
                sim_seed,
                measured_width: entry.width,
                outcome: res.reason,
                robots_used: res.robots_deployed,
                elapsed: res.elapsed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::aggregate(
        spec.epsilons.clone(),
        spec.width_bins.clone(),
        trials,
    ))
}

/// Runs the same sweep twice, with noise off and with `spec.noise`, on one
/// corpus and one seed derivation.
pub fn run_noise_comparison(spec: &SweepSpec) -> Result<(SweepResult, SweepResult)> {
    spec.validate()?;
    in_pool(spec.threads, || {
        let corpora = collect_corpora(
            &spec.width_bins,
            spec.trials_per_cell,
            spec.master_seed,
            &spec.corpus,
        )?;
        let clean = SweepSpec {
            noise: NoiseConfig::off(),
            ..spec.clone()
        };
        let noisy = SweepSpec {
            noise: NoiseConfig {
                enabled: true,
                ..spec.noise
            },
            ..spec.clone()
        };
        Ok((sweep_on(&clean, &corpora)?, sweep_on(&noisy, &corpora)?))
    })?
}

/// Runs a sweep on caller-supplied terrains (one list per width bin, each
/// at least `trials_per_cell` long); the bin labels are taken from the spec.
pub fn run_sweep_on_terrains(
    spec: &SweepSpec,
    terrains: &[Vec<GridTerrain>],
) -> Result<SweepResult> {
    spec.validate()?;
    if terrains.len() != spec.width_bins.len()
        || terrains.iter().any(|t| t.len() < spec.trials_per_cell)
    {
        return Err(Error::InvalidConfig(
            "one terrain list per width bin with trials_per_cell entries is required".into(),
        ));
    }
    let corpora: Vec<Vec<CorpusTerrain>> = terrains
        .iter()
        .map(|list| {
            list.iter()
                .map(|t| CorpusTerrain {
                    candidate_index: 0,
                    terrain_seed: 0,
                    width: min_path_width(t),
                    terrain: t.clone(),
                })
                .collect()
        })
        .collect();
    in_pool(spec.threads, || sweep_on(spec, &corpora))?
}

/// Per-cell absolute rate difference, epsilon-major.
pub fn rate_differences(a: &SweepResult, b: &SweepResult) -> Vec<f64> {
    a.cells
        .iter()
        .zip(&b.cells)
        .map(|(x, y)| (x.rate - y.rate).abs())
        .collect()
}
