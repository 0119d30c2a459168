use sonoplane_core::bot::{run_headless, run_headless_session, BotParams};
use sonoplane_core::game::{Game, GameConfig, TouchEvent, TouchOutcome};
use sonoplane_core::session::Session;

#[test]
fn target_stays_inside_over_a_million_steps() {
    let config = GameConfig {
        rng_seed: 9,
        base_speed: 0.6,
        ..GameConfig::default()
    };
    let mut game = Game::new(config).unwrap();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1_000_000 {
        game.step(0.02).unwrap();
        let p = game.state().target();
        assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y), "{p:?}");
        lo = lo.min(p.x.min(p.y));
        hi = hi.max(p.x.max(p.y));
    }
    assert!(lo < 0.01 && hi > 0.99, "walls never reached: [{lo}, {hi}]");
}

#[test]
fn rate_limited_touch_leaves_state_unchanged() {
    let mut game = Game::new(GameConfig::default()).unwrap();
    game.step(0.05).unwrap();
    let p = game.state().target();
    let first = game.register_touch(TouchEvent { x: p.x, y: p.y, t: game.state().t() }).unwrap();
    assert!(matches!(first, TouchOutcome::Hit { .. }));
    for _ in 0..20 {
        game.step(0.02).unwrap();
    }
    let before = game.state().clone();
    let p = before.target();
    let second = game.register_touch(TouchEvent { x: p.x, y: p.y, t: before.t() }).unwrap();
    assert_eq!(second, TouchOutcome::RateLimited);
    assert_eq!(game.state(), &before);
}

#[test]
fn half_second_session_registers_at_most_one_touch() {
    for seed in 0..20 {
        let report = run_headless_session(&GameConfig::default(), &BotParams::default(), 0.5, seed).unwrap();
        assert!(report.hits + report.misses <= 1, "seed {seed}: {report:?}");
    }
}

// Replays the bot's own trace through a fresh session.
#[test]
fn recorded_trace_replays_to_the_same_report() {
    let config = GameConfig::default();
    let run = run_headless(&config, Some(&BotParams::default()), 30.0, 21).unwrap();
    let mut session = Session::new(GameConfig { rng_seed: 21, ..config }, 30.0).unwrap();
    let mut pending = run.touches.iter().peekable();
    while let Some(frame) = session.begin_tick() {
        while let Some(t) = pending.next_if(|t| t.t <= frame.t + 1e-9) {
            session.submit_touch(*t).unwrap();
        }
        session.end_tick().unwrap();
    }
    assert_eq!(session.report(), run.report);
}

struct Ablation {
    semitones: Option<f64>,
    hits: u32,
    mean_error: f64,
}

#[test]
fn pitch_quantization_degrades_the_bot_monotonically() {
    let config = GameConfig::default();
    let seeds = 1..=6u64;
    let rows: Vec<Ablation> = [None, Some(1.0), Some(2.0), Some(4.0), Some(8.0), Some(12.0)]
        .into_iter()
        .map(|semitones| {
            let params = BotParams {
                pitch_quantization_semitones: semitones,
                ..BotParams::default()
            };
            let (mut hits, mut err) = (0, 0.0);
            for seed in seeds.clone() {
                let r = run_headless_session(&config, &params, 60.0, seed).unwrap();
                hits += r.hits;
                err += r.localization_error.map_or(0.0, |e| e.mean);
            }
            Ablation {
                semitones,
                hits,
                mean_error: err / seeds.clone().count() as f64,
            }
        })
        .collect();
    for w in rows.windows(2) {
        assert!(
            w[1].mean_error > w[0].mean_error,
            "error did not grow from {:?} to {:?}: {} -> {}",
            w[0].semitones,
            w[1].semitones,
            w[0].mean_error,
            w[1].mean_error
        );
        assert!(
            w[1].hits <= w[0].hits,
            "hits rose from {:?} to {:?}: {} -> {}",
            w[0].semitones,
            w[1].semitones,
            w[0].hits,
            w[1].hits
        );
    }
    assert!(rows[rows.len() - 1].hits < rows[0].hits);
}
