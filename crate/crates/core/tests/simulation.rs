use d2d_hopping::{
    drop_ues, run, FpPoly, FrameStructure, LinkMode, PatternSpec, Prime, SimConfig, Simulation,
};

fn small(spec: PatternSpec, ues: u32) -> SimConfig {
    let mut cfg = SimConfig::with_pattern(spec);
    cfg.cells = 1;
    cfg.ues_per_cell = ues;
    cfg.frames = 30;
    cfg
}

fn specs() -> Vec<PatternSpec> {
    let frame = FrameStructure::new(10, 5).unwrap();
    let f = FpPoly::parse(Prime::new(5).unwrap(), "x^2+x+2").unwrap();
    vec![
        PatternSpec::qc(frame, 1),
        PatternSpec::new_pattern(frame, 2, f).unwrap(),
        PatternSpec::random(frame, 5),
    ]
}

#[test]
fn ideal_discovery_equals_first_separation() {
    // single cell, unlimited range: u is heard by r exactly when their
    // subframes differed at least once
    for spec in specs() {
        let cfg = small(spec, 20);
        let mut sim = Simulation::new(cfg.clone()).unwrap();
        sim.run_frames(cfg.frames);
        let ues = sim.ues().to_vec();
        for a in &ues {
            for b in &ues {
                if a.id == b.id {
                    continue;
                }
                let separated = (0..cfg.frames as i64).any(|t| {
                    sim.pattern().coords(a.resource, t).j != sim.pattern().coords(b.resource, t).j
                });
                assert_eq!(
                    sim.is_discovered(a.id, b.id),
                    separated,
                    "{} -> {}",
                    b.id,
                    a.id
                );
            }
        }
    }
}

#[test]
fn half_duplex_is_respected() {
    for spec in specs() {
        let mut cfg = small(spec, 25);
        cfg.mode = LinkMode::Sinr;
        cfg.cells = 3;
        cfg.grid_cols = 3;
        cfg.ues_per_cell = 12;
        let mut sim = Simulation::new(cfg).unwrap();
        for t in 0..20 {
            for (r, u) in sim.step_frame(t) {
                let (ra, ua) = (sim.ues()[r].resource, sim.ues()[u].resource);
                assert_ne!(sim.pattern().coords(ra, t).j, sim.pattern().coords(ua, t).j);
                assert_ne!(r, u);
            }
        }
    }
}

#[test]
fn curves_are_consistent() {
    for spec in specs() {
        for mode in [LinkMode::Ideal, LinkMode::Sinr] {
            let mut cfg = small(spec.clone(), 10);
            cfg.cells = 4;
            cfg.grid_cols = 2;
            cfg.mode = mode;
            cfg.radius = 400.0;
            let result = run(&cfg).unwrap();
            assert_eq!(result.new_pairs.len(), cfg.frames as usize);
            assert!(result.cumulative_pairs.windows(2).all(|w| w[0] <= w[1]));
            let total: u64 = result.new_pairs.iter().sum();
            assert_eq!(*result.cumulative_pairs.last().unwrap(), total);
            let per_ue: u64 = result.final_discovered.iter().map(|&d| d as u64).sum();
            assert_eq!(per_ue, total);
            let n = result.ue_count as f64;
            assert!((result.cum_mean(cfg.frames as usize - 1) - total as f64 / n).abs() < 1e-9);
        }
    }
}

#[test]
fn drops_are_reproducible_and_use_distinct_resources() {
    let spec = specs().remove(0);
    let mut cfg = small(spec, 8);
    cfg.cells = 5;
    cfg.grid_cols = 3;
    let a = drop_ues(&cfg).unwrap();
    assert_eq!(a, drop_ues(&cfg).unwrap());
    let mut resources: Vec<usize> = a.iter().map(|u| u.resource.index()).collect();
    resources.sort_unstable();
    resources.dedup();
    assert_eq!(resources.len(), 40);
    cfg.seed += 1;
    assert_ne!(a, drop_ues(&cfg).unwrap());
}

#[test]
fn sinr_needs_no_more_frames_than_the_column_period() {
    // no fading: once the collision partitions repeat nothing new is heard
    let frame = FrameStructure::new(10, 5).unwrap();
    let f = FpPoly::parse(Prime::new(5).unwrap(), "x^2+x+2").unwrap();
    let mut cfg = small(PatternSpec::new_pattern(frame, 0, f).unwrap(), 12);
    cfg.cells = 4;
    cfg.grid_cols = 2;
    cfg.mode = LinkMode::Sinr;
    cfg.frames = 75;
    let result = run(&cfg).unwrap();
    assert!(result.new_pairs[25..].iter().all(|&v| v == 0));
}
