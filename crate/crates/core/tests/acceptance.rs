//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sensilab_core::analysis::{
    divergence_profile, pigeonhole_recurrence, sensitivity_set, Budget, Dynamics, MorseShift, NeighborhoodSpec,
    Rotation, SignedWindow, SkewProduct,
};
use sensilab_core::families::{longest_block, max_block_length, WindowSet};
use sensilab_core::systems::{
    circle_metric, morse_symbol, rotation_iterate, skew_iterate_closed, skew_step_in_place, CircleCoord, Precision,
    SymbolicPoint, TorusPoint,
};
use sensilab_core::{run_all, run_experiment, Dyadic, MetricValue, Report, Verdict};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn passing_report(name: &str) -> Result<Report, String> {
    let r = run_experiment(name, BTreeMap::new(), 0).map_err(|e| e.to_string())?;
    let failed: Vec<_> = r
        .observations
        .iter()
        .filter(|o| o.value == "violated")
        .map(|o| o.label.clone())
        .collect();
    ensure(r.verdict == Verdict::Pass, format!("{name} verdict {} ({failed:?})", r.verdict))?;
    Ok(r)
}

fn morse_prefix() -> Check {
    let prefix: String = (0..16).map(|n| char::from(b'0' + morse_symbol(n))).collect();
    ensure(prefix == "0110100110010110", format!("prefix {prefix}"))?;
    for n in 0..(1i64 << 20) {
        ensure(morse_symbol(2 * n) == morse_symbol(n), format!("even recurrence at {n}"))?;
        ensure(morse_symbol(2 * n + 1) == 1 - morse_symbol(n), format!("odd recurrence at {n}"))?;
    }
    Ok(format!("prefix {prefix}, recurrences hold for n < 2^20"))
}

fn morse_strong_ft() -> Check {
    let (s, window) = (64u64, 4096u64);
    let sys = MorseShift::new(64);
    let x = SymbolicPoint::MorseOmega.flip().shifted(-(s as i64)).map_err(|e| e.to_string())?;
    let y = SymbolicPoint::Eta.shifted(-(s as i64)).map_err(|e| e.to_string())?;
    let profile = divergence_profile(&sys, &x, &y, Dyadic::pow2_neg(1), SignedWindow::forward(window), &Budget::default())
        .map_err(|e| e.to_string())?;
    for (m, d) in profile.distances.iter().enumerate() {
        let m = m as u64;
        let expected = if m < s {
            MetricValue::Exact(Dyadic::pow2_neg((s - m) as u32))
        } else {
            MetricValue::Exact(Dyadic::ONE)
        };
        ensure(*d == expected, format!("distance at m={m} is {d}, expected {expected}"))?;
    }
    let tail = WindowSet::new(window, (s..window).collect()).map_err(|e| e.to_string())?;
    ensure(profile.exceeds == tail, "divergence set is not [64, 4096)")?;
    let block = longest_block(&profile.exceeds);
    ensure(block == Some((64, 4032)), format!("block {block:?}"))?;
    let r = passing_report("morse-strong-ft")?;
    ensure(r.observation("block_length") == Some("4032"), "report block length")?;
    Ok("divergence set [64, 4096), block witness of length 4032".into())
}

fn rotation_equicontinuous() -> Check {
    let prec = Precision::W64;
    let alpha = CircleCoord::sqrt2_minus_1(prec);
    ensure(alpha.raw() >> 32 == 0x6a09e667, "alpha truncation")?;
    let sys = Rotation::new(alpha);
    let radius = Dyadic::pow2_neg(6);
    let delta = Dyadic::pow2_neg(5);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..8 {
        let u = NeighborhoodSpec::ball(CircleCoord::from_raw(rng.random::<u64>() as u128, prec), radius);
        let set = sensitivity_set(&sys, &u, delta, 2000, 32, &Budget::default()).map_err(|e| e.to_string())?;
        ensure(set.is_empty(), "sensitivity set not empty")?;
    }
    let eps = Dyadic::pow2_neg(5);
    let k = pigeonhole_recurrence(alpha, CircleCoord::zero(prec), eps, &[]).map_err(|e| e.to_string())?.k;
    let mut ok = 0;
    for _ in 0..1000 {
        let x0 = CircleCoord::from_raw(rng.random::<u64>() as u128, prec);
        let mut s = Vec::new();
        while s.len() < k as usize + 1 {
            let t: i64 = rng.random_range(-1_000_000_000..=1_000_000_000);
            if !s.contains(&t) {
                s.push(t);
            }
        }
        let out = pigeonhole_recurrence(alpha, x0, eps, &s).map_err(|e| e.to_string())?;
        if let Some((u, v)) = out.pair {
            let landed = rotation_iterate(x0, alpha, u - v);
            if u > v && circle_metric(x0, landed).map_err(|e| e.to_string())? < eps {
                ok += 1;
            }
        }
    }
    ensure(ok == 1000, format!("pigeonhole succeeded {ok}/1000"))?;
    let r = passing_report("rotation-equicontinuous")?;
    ensure(r.observation("pigeonhole_verified") == Some("1000/1000"), "report success count")?;
    Ok(format!("sensitivity sets empty, pigeonhole 1000/1000 with k = {k}"))
}

fn skew_closed_form() -> Check {
    let checkpoints = [1u64, 2, 4097, 1_000_000];
    let prec = Precision::W64;
    let mismatches: usize = [2usize, 3, 4, 5]
        .iter()
        .flat_map(|&d| (0..100u64).map(move |i| (d, i)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(d, i)| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64 + i);
            let alpha = CircleCoord::from_raw(rng.random::<u64>() as u128, prec);
            let theta = TorusPoint::from_raw((0..d).map(|_| rng.random::<u64>() as u128).collect(), prec).unwrap();
            let mut p = theta.clone();
            let mut bad = 0;
            let mut n = 0u64;
            for &target in &checkpoints {
                while n < target {
                    skew_step_in_place(&mut p, alpha.raw());
                    n += 1;
                }
                if skew_iterate_closed(&theta, alpha, target, 8).unwrap() != p {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    Ok("1600 closed-form iterates equal stepping bit for bit".into())
}

fn skew_ft_sensitive() -> Check {
    let prec = Precision::W64;
    let sys = SkewProduct::new(CircleCoord::sqrt2_minus_1(prec), 2).map_err(|e| e.to_string())?;
    let u = NeighborhoodSpec::ball(TorusPoint::zero(2, prec), Dyadic::pow2_neg(7));
    let samples = sys.samples(&u, 8, &Budget::default()).map_err(|e| e.to_string())?;
    ensure(samples.len() == 65, format!("{} samples", samples.len()))?;
    let set = sensitivity_set(&sys, &u, Dyadic::pow2_neg(2), 100_000, 8, &Budget::default()).map_err(|e| e.to_string())?;
    let block = max_block_length(&set);
    ensure(block >= 100, format!("longest block {block}"))?;
    passing_report("skew-ft-sensitive")?;
    Ok(format!("longest block {block}"))
}

fn orbit_set_containments() -> Check {
    let r = passing_report("skew-example-522")?;
    for check in ["f2_subset_f3", "f1_f2_disjoint", "f1_f3_partition", "closed_form_matches_stepping", "orbit_decomposition"] {
        ensure(r.observation(&format!("check.{check}")) == Some("ok"), check)?;
    }
    ensure(r.params["samples"] == "20" && r.params["window"] == "10000" && r.params["d"] == "3", "parameters")?;
    Ok("F2 within F3 and F1 disjoint from F2 for 20 samples".into())
}

fn families_oracle() -> Check {
    let r = passing_report("families-oracle")?;
    ensure(r.observation("subsets") == Some("65536"), "subset count")?;
    ensure(r.observation("ip_disagreements") == Some("0"), "ip disagreements")?;
    ensure(r.observation("difference_disagreements") == Some("0"), "difference disagreements")?;
    Ok("0 disagreements over 65536 subsets".into())
}

fn gillis() -> Check {
    let r = passing_report("gillis")?;
    ensure(r.observation("check.bounds_verified_exactly") == Some("ok"), "bounds")?;
    ensure(r.observation("check.absences_reconfirmed") == Some("ok"), "absences")?;
    Ok(format!("found {}", r.observation("found").unwrap_or("?")))
}

fn determinism() -> Check {
    let a = serde_json::to_string(&run_all(0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let b = serde_json::to_string(&run_all(0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(a == b, "reports differ between runs")?;
    Ok(format!("{} bytes identical", a.len()))
}

type Criterion = (u32, &'static str, u64, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "Morse prefix and recurrences", 1, morse_prefix),
        (2, "Morse strong thick witness", 5, morse_strong_ft),
        (3, "rotation equicontinuity and pigeonhole recurrence", 10, rotation_equicontinuous),
        (4, "skew closed form equals stepping", 30, skew_closed_form),
        (5, "skew sensitivity block", 30, skew_ft_sensitive),
        (6, "skew orbit set containments", 20, orbit_set_containments),
        (7, "families oracle equivalence", 60, families_oracle),
        (8, "Gillis selection verification", 30, gillis),
        (9, "report determinism", 120, determinism),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit} s"))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {id}: PASS {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failures += 1;
                println!("criterion {id}: FAIL {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
