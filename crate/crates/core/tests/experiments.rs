use bycoms::agent::NoiseConfig;
use bycoms::experiments::{
    collect_corpora, collect_terrains, export_heatmap, run_noise_comparison, run_sweep_on_terrains,
    write_manifest, CorpusSpec, SweepResult, SweepSpec, TrialRecord,
};
use bycoms::sim::{Outcome, SimConfig};
use bycoms::terrain::crafted::{corridor, CorridorShape};
use bycoms::terrain::{min_path_width, GridTerrain, DEFAULT_GOAL, DEFAULT_START};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn fixed_result() -> SweepResult {
    let outcomes = [
        Outcome::Reached,
        Outcome::Timeout,
        Outcome::Reached,
        Outcome::Reached,
        Outcome::RobotsExhausted,
        Outcome::Reached,
    ];
    let trials = outcomes
        .iter()
        .enumerate()
        .map(|(i, &outcome)| TrialRecord {
            eps_index: i / 3 % 2,
            bin_index: i % 3 % 2,
            trial: i,
            terrain_seed: i as u64,
            sim_seed: 100 + i as u64,
            measured_width: 2.0,
            outcome,
            robots_used: 1 + i,
            elapsed: 10.0 * i as f64,
        })
        .collect();
    SweepResult::aggregate(vec![1.0, 2.5], vec![2.0, 4.5], trials)
}

#[test]
fn heatmap_svg_matches_recorded_file() {
    let svg = fixed_result().to_svg();
    let path = data("heatmap_small.svg");
    if std::env::var_os("BYCOMS_BLESS").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    assert_eq!(svg, std::fs::read_to_string(path).unwrap());
}

#[test]
fn aggregation_recomputes_stored_rates() {
    let r = fixed_result();
    let again = SweepResult::aggregate(r.epsilons.clone(), r.width_bins.clone(), r.trials.clone());
    assert_eq!(again, r);
    for c in &r.cells {
        let s = r
            .trials
            .iter()
            .filter(|t| {
                r.epsilons[t.eps_index] == c.epsilon && r.width_bins[t.bin_index] == c.width
            })
            .collect::<Vec<_>>();
        assert_eq!(c.trials, s.len());
        assert_eq!(
            c.successes,
            s.iter().filter(|t| t.outcome == Outcome::Reached).count()
        );
    }
}

#[test]
fn export_writes_csv_svg_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let r = fixed_result();
    export_heatmap(&r, dir.path().join("m")).unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.path().join("m.csv")).unwrap(),
        r.to_csv()
    );
    assert!(dir.path().join("m.svg").exists());
    let spec = SweepSpec {
        master_seed: 77,
        ..SweepSpec::default()
    };
    let mp = dir.path().join("manifest.json");
    write_manifest(&spec, &mp).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(mp).unwrap()).unwrap();
    assert_eq!(v["master_seed"], 77);
    assert_eq!(v["spec"]["trials_per_cell"], 100);
}

#[test]
fn collected_terrains_fit_their_bin_and_repeat() {
    let a = collect_terrains(3.0, 1, 5).unwrap();
    assert_eq!(a.len(), 1);
    let w = min_path_width(&a[0]);
    assert!(
        (w - 3.0).abs() <= CorpusSpec::default().width_tolerance,
        "width {w}"
    );
    assert!(a[0].safe_zones_clear());
    assert_eq!(collect_terrains(3.0, 1, 5).unwrap(), a);
}

#[test]
fn bins_draw_from_one_stream_independently() {
    let spec = CorpusSpec::default();
    let both = collect_corpora(&[2.0, 4.0], 2, 8, &spec).unwrap();
    let only = collect_corpora(&[4.0], 2, 8, &spec).unwrap();
    assert_eq!(both[1], only[0]);
}

#[test]
fn open_terrain_always_succeeds() {
    let open = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
    let spec = SweepSpec {
        epsilons: vec![1.0, 5.0],
        width_bins: vec![60.0],
        trials_per_cell: 1,
        ..SweepSpec::default()
    };
    let r = run_sweep_on_terrains(&spec, &[vec![open]]).unwrap();
    assert!(r.cells.iter().all(|c| c.rate == 1.0));
}

#[test]
fn wide_radius_fails_in_unit_corridors() {
    let corridors = vec![
        corridor(CorridorShape::Horizontal, 1.0).unwrap(),
        corridor(CorridorShape::L, 1.0).unwrap(),
    ];
    let spec = SweepSpec {
        epsilons: vec![5.0],
        width_bins: vec![1.0],
        trials_per_cell: 2,
        sim: SimConfig {
            time_budget: 2000.0,
            ..SimConfig::default()
        },
        ..SweepSpec::default()
    };
    let r = run_sweep_on_terrains(&spec, &[corridors]).unwrap();
    assert_eq!(r.cells[0].rate, 0.0);
}

#[test]
fn degenerate_noise_matches_noiseless_arm() {
    let spec = SweepSpec {
        epsilons: vec![1.5, 3.0],
        width_bins: vec![2.0, 3.5],
        trials_per_cell: 3,
        master_seed: 12,
        noise: NoiseConfig::degenerate(),
        ..SweepSpec::default()
    };
    let (clean, noisy) = run_noise_comparison(&spec).unwrap();
    assert_eq!(clean.to_csv(), noisy.to_csv());
    for (a, b) in clean.trials.iter().zip(&noisy.trials) {
        assert_eq!(a.terrain_seed, b.terrain_seed);
        assert_eq!(a.sim_seed, b.sim_seed);
        assert_eq!(a.outcome, b.outcome);
    }
}

#[test]
fn trial_seeds_are_distinct_within_a_sweep() {
    let spec = SweepSpec {
        epsilons: vec![1.0, 2.0, 3.0],
        width_bins: vec![1.0, 2.0],
        trials_per_cell: 500,
        ..SweepSpec::default()
    };
    let mut seen = std::collections::HashSet::new();
    for e in 0..3 {
        for b in 0..2 {
            for k in 0..500 {
                assert!(seen.insert(spec.trial_seed(e, b, k)));
            }
        }
    }
}
