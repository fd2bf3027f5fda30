//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use glasshouse::config::EnvDocument;
use glasshouse_core::clock::unix_midnight;
use glasshouse_core::control::rule_based::rule_based_action;
use glasshouse_core::control::ControlContext;
use glasshouse_core::env::randomize::sample_into;
use glasshouse_core::env::reward::{max_harvest_per_step, raw_penalty, reward_epi, reward_penalty, EpiScale};
use glasshouse_core::integrator::{convergence_order, step, OrderEstimate};
use glasshouse_core::model::clamp_controls;
use glasshouse_core::model::convert::{co2_ppm_to_mgm3, vapor_pressure};
use glasshouse_core::{
    Controls, Disturbance, Env, EnvConfig, IntegratorConfig, Method, Param, ParamValues, ParameterSet,
    RuleBasedConfig, SimClock, State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glasshouse"))
}

fn glasshouse(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = bin().args(args).output().map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "glasshouse {args:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn throughput() -> Outcome {
    let t0 = Instant::now();
    let out = glasshouse(&["speed", "--steps", "100000", "--threads", "1"])?;
    let wall = t0.elapsed().as_secs_f64();
    let report: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let sps = report["single"]["steps_per_sec"].as_f64().ok_or("no steps_per_sec")?;
    let steps = report["single"]["steps"].as_u64().ok_or("no steps")?;
    ensure!(steps == 100_000, "measured {steps} steps");
    ensure!(sps >= 1800.0, "{sps:.0} steps/s < 1800");
    ensure!(wall < 60.0, "took {wall:.1} s");
    Ok(format!("{sps:.0} steps/s single-core, {wall:.1} s wall"))
}

fn randomization() -> Outcome {
    let delta = 0.3;
    let set = ParameterSet::new(ParamValues::nominal(), &Param::ALL, delta).map_err(|e| e.to_string())?;
    let nominal = ParamValues::nominal();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut values = ParamValues::nominal();
    let mut m = vec![0.0; Param::ALL.len()];
    let mut sums = [0.0f64; Param::ALL.len()];
    let n = 100_000;
    for _ in 0..n {
        sample_into(&set, &mut rng, &mut values, &mut m);
        for (i, &p) in Param::ALL.iter().enumerate() {
            let (v, mu) = (values[p], nominal[p]);
            let (lo, hi) = ((1.0 - delta) * mu, (1.0 + delta) * mu);
            ensure!(v >= lo && v <= hi, "{} = {v} outside [{lo}, {hi}]", p.name());
            sums[i] += v;
        }
    }
    let mut worst = 0.0f64;
    for (i, &p) in Param::ALL.iter().enumerate() {
        let rel = (sums[i] / f64::from(n) / nominal[p] - 1.0).abs();
        ensure!(rel < 0.005, "{} mean off by {:.3}%", p.name(), rel * 100.0);
        worst = worst.max(rel);
    }
    Ok(format!(
        "{} parameters x {n} samples in bounds, worst mean error {:.3}%",
        Param::ALL.len(),
        worst * 100.0
    ))
}

fn reward_algebra() -> Outcome {
    let cfg = EnvConfig::default();
    let scale = EpiScale::from_config(&cfg).map_err(|e| e.to_string())?;
    let b = cfg.constraints;
    let hmax = max_harvest_per_step(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10_000;
    for k in 0..n {
        let y = [
            rng.random_range(-10.0..50.0),
            rng.random_range(0.0..4000.0),
            rng.random_range(0.0..100.0),
        ];
        let mut raw = [0.0; 6];
        for (r, hi) in raw.iter_mut().zip(Controls::MAX) {
            *r = rng.random_range(0.0..=hi);
        }
        let u = clamp_controls(&raw).map_err(|e| e.to_string())?;
        let harvest = rng.random_range(0.0..=hmax);
        let epi_scaled = scale.scale(reward_epi(harvest, &u, &cfg.prices, cfg.dt()));
        let p = reward_penalty(&y, &b, &cfg.penalty_scale);
        let total = glasshouse_core::env::reward::combined_reward(epi_scaled, &p);
        ensure!(
            total.to_bits() == (epi_scaled - (p[0] + p[1] + p[2])).to_bits(),
            "sample {k}: combined {total} != epi - sum"
        );
        ensure!((0.0..=1.0).contains(&epi_scaled), "sample {k}: epi_scaled {epi_scaled}");
        for i in 0..3 {
            let oracle = if y[i] > b.upper[i] {
                y[i] - b.upper[i]
            } else if y[i] < b.lower[i] {
                b.lower[i] - y[i]
            } else {
                0.0
            };
            ensure!(raw_penalty(y[i], b.lower[i], b.upper[i]) == oracle, "sample {k}: raw penalty {i}");
            ensure!(p[i] == (oracle / cfg.penalty_scale[i]).min(1.0), "sample {k}: scaled penalty {i}");
            ensure!((0.0..=1.0).contains(&p[i]), "sample {k}: penalty {i} = {}", p[i]);
        }
    }

    // The same identities on rewards produced by the environment.
    let doc = EnvDocument::from_yaml_str("episode_days: 1\nuncertainty: {delta: 0.3}\n").unwrap();
    let mut env = doc.build_env(Path::new(".")).map_err(|e| e.to_string())?;
    env.reset(9).map_err(|e| e.to_string())?;
    let mut steps = 0;
    while !env.is_done() {
        let mut a = [0.0; 6];
        for (x, hi) in a.iter_mut().zip(Controls::MAX) {
            *x = rng.random_range(0.0..=hi);
        }
        let r = env.step(&a).map_err(|e| e.to_string())?;
        let rb = r.info.reward;
        let x = r.info.state;
        let want = reward_penalty(&[x.t_air, x.co2_ppm(), x.rh()], &b, &cfg.penalty_scale);
        ensure!(rb.penalties == want, "env step {steps}: penalties {:?} vs {want:?}", rb.penalties);
        ensure!(rb.total.to_bits() == (rb.epi_scaled - rb.penalty_sum()).to_bits(), "env step {steps}");
        ensure!(r.reward.to_bits() == rb.total.to_bits(), "env step {steps}: reward field");
        ensure!((0.0..=1.0).contains(&rb.epi_scaled), "env step {steps}: epi_scaled");
        steps += 1;
    }
    Ok(format!("{n} random (y, u) plus {steps} environment steps"))
}

struct Ctx {
    minutes: i64,
    t_air: f64,
    co2_ppm: f64,
    rh: f64,
    i_glob: f64,
    t_out: f64,
    daily: f64,
    previous: Controls,
}

impl Default for Ctx {
    fn default() -> Self {
        Self {
            minutes: 12 * 60,
            t_air: 19.5,
            co2_ppm: 800.0,
            rh: 70.0,
            i_glob: 200.0,
            t_out: 12.0,
            daily: 5.0,
            previous: Controls::default(),
        }
    }
}

impl Ctx {
    fn act(&self) -> Controls {
        let ctx = ControlContext {
            observation: &[],
            t_air: self.t_air,
            co2_ppm: self.co2_ppm,
            rh: self.rh,
            disturbance: Disturbance {
                i_glob: self.i_glob,
                t_out: self.t_out,
                rh_out: 80.0,
                co2_out: 410.0,
                wind: 2.0,
            },
            clock: SimClock::new(unix_midnight(2010, 3, 1) + self.minutes * 60, 300.0),
            daily_radiation: self.daily,
            previous: self.previous,
        };
        rule_based_action(&ctx, &RuleBasedConfig::default())
    }
}

/// Solar-dark context at night with the lamps off.
fn night() -> Ctx {
    Ctx {
        minutes: 20 * 60,
        i_glob: 0.0,
        ..Ctx::default()
    }
}

fn rule_truth_table() -> Outcome {
    let mut checks = 0;
    let mut check = |name: &str, ok: bool| -> Result<(), String> {
        checks += 1;
        if ok {
            Ok(())
        } else {
            Err(format!("rule: {name}"))
        }
    };
    for minutes in [17 * 60 + 59, 18 * 60] {
        for i_glob in [399.0, 401.0] {
            for daily in [9.9, 10.1] {
                let want = minutes < 18 * 60 && i_glob <= 400.0 && daily <= 10.0;
                let u = Ctx {
                    minutes,
                    i_glob,
                    daily,
                    ..Ctx::default()
                }
                .act();
                let on = if want { Controls::MAX[4] } else { 0.0 };
                check(&format!("lamp {minutes} min, {i_glob} W m-2, {daily} MJ m-2"), u.u_lamp == on)?;
            }
        }
    }
    let lamp = Controls {
        u_lamp: Controls::MAX[4],
        ..Controls::default()
    };

    // Heating: proportional below the dark setpoint 16.5 over a 2 K band.
    check("heating below setpoint", Ctx { t_air: 15.5, ..night() }.act().u_boil == 65.0)?;
    check("heating saturates", Ctx { t_air: 10.0, ..night() }.act().u_boil == 130.0)?;
    check("no heating at setpoint", Ctx { t_air: 16.5, ..night() }.act().u_boil == 0.0)?;

    // CO₂: dosing towards 800 ppm only in the light period.
    check("co2 dosing in light", Ctx { co2_ppm: 750.0, ..Ctx::default() }.act().u_co2 == 2.5)?;
    check("co2 off at setpoint", Ctx { co2_ppm: 800.0, ..Ctx::default() }.act().u_co2 == 0.0)?;
    check("co2 off in dark", Ctx { co2_ppm: 500.0, ..night() }.act().u_co2 == 0.0)?;

    // Vents open above setpoint + 5 K or above 85 % RH; close below setpoint - 1 K.
    check("vent opens when hot", Ctx { t_air: 25.5, ..Ctx::default() }.act().u_vent == 0.5)?;
    check("vent opens when humid", Ctx { rh: 90.0, ..Ctx::default() }.act().u_vent == 1.0)?;
    let open = Controls {
        u_vent: 0.8,
        ..Controls::default()
    };
    check(
        "vent closes when cold",
        Ctx {
            t_air: 17.5,
            previous: open,
            ..Ctx::default()
        }
        .act()
        .u_vent
            == 0.5,
    )?;
    check(
        "vent holds inside the band",
        Ctx {
            t_air: 21.0,
            previous: open,
            ..Ctx::default()
        }
        .act()
        .u_vent
            == 0.8,
    )?;

    // Thermal screen closes when cold outside and opens when hot or humid inside.
    check("thermal screen closes", Ctx { t_out: 6.0, ..night() }.act().u_thscr == 1.0)?;
    check("thermal screen stays open when mild", Ctx { t_out: 12.0, ..night() }.act().u_thscr == 0.0)?;
    check(
        "thermal screen opens when hot",
        Ctx {
            t_out: 6.0,
            t_air: 22.5,
            ..night()
        }
        .act()
        .u_thscr
            == 0.0,
    )?;
    check(
        "thermal screen opens when humid",
        Ctx {
            t_out: 6.0,
            rh: 95.0,
            ..night()
        }
        .act()
        .u_thscr
            == 0.0,
    )?;

    // Blackout screen closes only while lamps burn in solar darkness.
    let dark_lit = Ctx {
        minutes: 2 * 60,
        i_glob: 0.0,
        previous: lamp,
        ..Ctx::default()
    };
    check("blackout with lamps at night", dark_lit.act().u_blscr == 1.0)?;
    check(
        "no blackout in daylight",
        Ctx {
            i_glob: 100.0,
            previous: lamp,
            ..Ctx::default()
        }
        .act()
        .u_blscr
            == 0.0,
    )?;
    check("no blackout with lamps off", night().act().u_blscr == 0.0)?;
    Ok(format!("{checks} assertions"))
}

fn integrator() -> Outcome {
    let x = State::from_array([21.0, 45.0, 1200.0, 1800.0, 19.0, 120.0, 0.3, 0.01]);
    let u = Controls::from_array([60.0, 2.5, 0.3, 0.2, 116.0, 0.0]);
    let d = Disturbance::from_array([350.0, 9.0, 75.0, 410.0, 3.5]);
    let p = ParamValues::nominal();
    let order = |m| match convergence_order(&x, &u, &d, &p, 300.0, m) {
        Ok(OrderEstimate::Order(q)) => Ok(q),
        Ok(OrderEstimate::Exact) => Err("no measurable error".to_string()),
        Err(e) => Err(e.to_string()),
    };
    let (q4, q1) = (order(Method::Rk4)?, order(Method::Euler)?);
    ensure!((3.5..=4.5).contains(&q4), "rk4 order {q4}");
    ensure!((0.7..=1.3).contains(&q1), "euler order {q1}");

    let mut pp = ParamValues::nominal();
    pp[Param::CAir] = 1e30;
    let (t_air, t_pipe0, u_boil) = (18.0, 50.0, 40.0);
    let dd = Disturbance::from_array([0.0, t_air, 80.0, 410.0, 0.0]);
    let mut s = State {
        t_air,
        t_pipe: t_pipe0,
        co2_air: co2_ppm_to_mgm3(410.0, t_air),
        vp_air: vapor_pressure(80.0, t_air),
        t_can24: t_air,
        ..State::initial()
    };
    let uu = Controls {
        u_boil,
        ..Controls::default()
    };
    let (k, c) = (pp[Param::KPipe], pp[Param::CPipe]);
    let t_inf = t_air + u_boil / k;
    let mut worst = 0.0f64;
    for n in 1..=12 {
        s = step(&s, &uu, &dd, &pp, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
        let want = t_inf + (t_pipe0 - t_inf) * (-k * 300.0 * f64::from(n) / c).exp();
        worst = worst.max(((s.t_pipe - want) / want).abs());
    }
    ensure!(worst < 1e-8, "pipe relaxation error {worst:e}");

    let mut pe = ParamValues::nominal();
    pe[Param::MResp] = 0.0;
    let de = Disturbance::from_array([0.0, 12.0, 80.0, 410.0, 3.0]);
    let x0 = State {
        t_air: 12.0,
        t_pipe: 12.0,
        co2_air: co2_ppm_to_mgm3(410.0, 12.0),
        vp_air: vapor_pressure(80.0, 12.0),
        t_can24: 12.0,
        t_can_sum: 0.0,
        w_fruit: 0.2,
        w_harvest: 0.0,
    };
    let mut xe = x0;
    for _ in 0..50 {
        xe = step(&xe, &Controls::default(), &de, &pe, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
    }
    let (a, b) = (x0.to_array(), xe.to_array());
    for i in [0, 1, 2, 3, 4, 6, 7] {
        ensure!(a[i].to_bits() == b[i].to_bits(), "equilibrium drift in {}", State::FIELD_NAMES[i]);
    }
    Ok(format!(
        "rk4 order {q4:.2}, euler order {q1:.2}, pipe error {worst:.1e}, equilibrium exact"
    ))
}

fn determinism(dir: &Path) -> Outcome {
    let cfg = write(
        dir,
        "det.yaml",
        "episode_days: 1\nuncertainty: {delta: 0.3, resample: per_step}\n",
    );
    let a = dir.join("a.jsonl");
    let b = dir.join("b.jsonl");
    for out in [&a, &b] {
        glasshouse(&["--config", s(&cfg), "--seed", "42", "--out", s(out), "rollout"])?;
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ensure!(ta == tb, "trajectories differ");
    let text = String::from_utf8(ta).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let second: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    ensure!(
        first["multipliers"] != second["multipliers"],
        "per-step draws missing from the trajectory"
    );
    Ok(format!("{} bytes identical, draws included", text.len()))
}

fn mean_column(path: &Path, controller: &str, delta: f64, col: usize) -> Result<f64, String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if &rec[0] == controller && rec[1].parse::<f64>().ok() == Some(delta) {
            return rec[col].parse().map_err(|e: std::num::ParseFloatError| e.to_string());
        }
    }
    Err(format!("no aggregate row for {controller} at {delta}"))
}

fn controller_ordering(dir: &Path) -> Outcome {
    let cfg = repo().join("configs/spring-3day.yaml");
    let cem = repo().join("configs/cem-desk.yaml");
    let policy = dir.join("cem.json");
    let runs = dir.join("ordering.csv");
    let t0 = Instant::now();
    glasshouse(&["--config", s(&cfg), "--out", s(&policy), "train", "--cem", s(&cem)])?;
    let train_s = t0.elapsed().as_secs_f64();
    let policy_spec = format!("policy:{}", s(&policy));
    glasshouse(&[
        "--config",
        s(&cfg),
        "--seed",
        "1000",
        "--out",
        s(&runs),
        "sweep",
        "--deltas",
        "0,0.15,0.3",
        "--runs",
        "10",
        "--controller",
        "rule_based",
        "--controller",
        &policy_spec,
    ])?;
    let total_s = t0.elapsed().as_secs_f64();
    let agg = dir.join("ordering_aggregate.csv");
    let mut parts = Vec::new();
    for delta in [0.0, 0.15, 0.3] {
        let rb = mean_column(&agg, "rule_based", delta, 3)?;
        let pol = mean_column(&agg, &policy_spec, delta, 3)?;
        let rb_pen = mean_column(&agg, "rule_based", delta, 7)?;
        let pol_pen = mean_column(&agg, &policy_spec, delta, 7)?;
        ensure!(pol >= rb, "delta {delta}: CEM reward {pol:.2} < rule-based {rb:.2}");
        ensure!(rb_pen >= pol_pen, "delta {delta}: rule-based penalty {rb_pen:.2} < CEM {pol_pen:.2}");
        parts.push(format!("d={delta}: reward {pol:.1} vs {rb:.1}, penalty {pol_pen:.1} vs {rb_pen:.1}"));
    }
    ensure!(total_s < 900.0, "training + evaluation took {total_s:.0} s");
    Ok(format!(
        "{}; train {train_s:.0} s, total {total_s:.0} s",
        parts.join("; ")
    ))
}

fn episode_arithmetic(dir: &Path) -> Outcome {
    let doc = EnvDocument::default();
    ensure!(doc.episode_days == 60, "default episode is {} days", doc.episode_days);
    let mut env: Env = doc.build_env(Path::new(".")).map_err(|e| e.to_string())?;
    env.reset(0).map_err(|e| e.to_string())?;
    let mut steps = 0;
    loop {
        let r = env.step(&[0.0; 6]).map_err(|e| e.to_string())?;
        steps += 1;
        if r.truncated {
            break;
        }
        ensure!(steps < 17_280, "step {steps} not truncated");
    }
    ensure!(steps == 17_280, "{steps} steps");
    ensure!(env.step(&[0.0; 6]).is_err(), "stepping past the end succeeded");

    let cfg = write(dir, "arith.yaml", "episode_days: 1\n");
    let runs = dir.join("arith.csv");
    glasshouse(&[
        "--config",
        s(&cfg),
        "--out",
        s(&runs),
        "sweep",
        "--runs",
        "30",
        "--controller",
        "rule_based",
        "--controller",
        "constant:0,0,0,0,0,0",
    ])?;
    let mut rdr = csv::Reader::from_path(&runs).map_err(|e| e.to_string())?;
    let mut per = std::collections::BTreeMap::<String, (usize, std::collections::BTreeSet<String>)>::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let e = per.entry(rec[0].to_string()).or_default();
        e.0 += 1;
        e.1.insert(rec[1].to_string());
    }
    ensure!(per.len() == 2, "{} controllers in output", per.len());
    for (name, (rows, deltas)) in &per {
        ensure!(*rows == 210, "{name}: {rows} rows");
        ensure!(deltas.len() == 7, "{name}: {} deltas", deltas.len());
    }
    Ok("60 days = 17280 steps, last truncated; 7 x 30 sweep = 210 rows per controller".into())
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<Criterion<'_>> = vec![
        ("throughput floor", Box::new(throughput)),
        ("randomization statistics", Box::new(randomization)),
        ("reward algebra", Box::new(reward_algebra)),
        ("rule-based truth table", Box::new(rule_truth_table)),
        ("integrator", Box::new(integrator)),
        ("determinism", Box::new(|| determinism(d))),
        ("controller ordering", Box::new(|| controller_ordering(d))),
        ("episode arithmetic", Box::new(|| episode_arithmetic(d))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let t0 = Instant::now();
        match f() {
            Ok(detail) => println!("PASS {name}: {detail} [{:.1} s]", t0.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if cores < 4 {
        println!("note: {cores} core(s) available; parallel scaling check needs 4 and was not run");
    } else {
        match parallel_scaling() {
            Ok(detail) => println!("note: parallel scaling {detail}"),
            Err(why) => println!("note: parallel scaling below 2x: {why}"),
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn parallel_scaling() -> Outcome {
    let out = glasshouse(&["speed", "--steps", "100000", "--threads", "4"])?;
    let report: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let one = report["single"]["steps_per_sec"].as_f64().ok_or("no single")?;
    let four = report["parallel"]["steps_per_sec"].as_f64().ok_or("no parallel")?;
    ensure!(four >= 2.0 * one, "{four:.0} vs {one:.0} steps/s");
    Ok(format!("{:.1}x with 4 threads", four / one))
}

