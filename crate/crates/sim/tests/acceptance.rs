//! Acceptance gate. Each criterion prints one PASS/FAIL line; any failure
//! makes the process exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clmm_jit_core::jit::{
    enumerate_ranges, insufficiency_check, optimal_strategy, optimize_liquidity, utility,
    utility_value,
};
use clmm_jit_core::valuation::{absolute_price_impact, classify_move, threshold_sign};
use clmm_jit_core::{
    Archetype, Direction, GridPosition, ImpactSign, JitConfig, MarketPrices, MoveClass, PoolState,
    Strategy, SwapParams, TickGrid, TickRange,
};
use clmm_jit_sim::oracle::{compare_swap, compare_utility, liquidity_cap, DEFAULT_STEPS};
use clmm_jit_sim::output::write_sweep_csv;
use clmm_jit_sim::replay::{event_budget, par_map, replay, run_sandwich, ReplayConfig};
use clmm_jit_sim::sweep::budget_sweep;
use clmm_jit_sim::synth::{synthetic_corpus, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Largest X input before the price runs off the bottom tick.
fn capacity_down(pool: &PoolState) -> f64 {
    let g = pool.grid();
    let Some(start) = g.interval_below(pool.price()) else {
        return 0.0;
    };
    let mut entry = pool.price();
    let mut total = 0.0;
    for m in (0..=start).rev() {
        let lower = g.price(m);
        total += pool.liquidity_at(m) * (1.0 / lower.sqrt() - 1.0 / entry.sqrt());
        entry = lower;
    }
    total
}

fn capacity(pool: &PoolState, dir: Direction) -> f64 {
    match dir {
        Direction::XIn => capacity_down(pool),
        Direction::YIn => capacity_down(&pool.mirrored()),
    }
}

fn random_pool(rng: &mut ChaCha8Rng) -> PoolState {
    let spacing = [1u32, 10, 60, 200][rng.random_range(0..4)];
    let n = rng.random_range(3..80usize);
    let grid = TickGrid::new(spacing, rng.random_range(0..n as i64), n).unwrap();
    let liq: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                log_uniform(rng, 1.0, 1e6)
            }
        })
        .collect();
    let at = rng.random_range(0..n);
    let w: f64 = rng.random_range(0.02..0.98);
    let price = grid.price(at).powf(1.0 - w) * grid.price(at + 1).powf(w);
    let fee = [0.0001, 0.0005, 0.003, 0.01][rng.random_range(0..4)];
    PoolState::new(grid, liq, price, fee).unwrap()
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    if rng.random_bool(0.5) {
        Direction::XIn
    } else {
        Direction::YIn
    }
}

/// A swap that stays on the grid, with market prices near the pool's.
fn random_swap(rng: &mut ChaCha8Rng) -> Option<SwapParams> {
    let pool = random_pool(rng);
    let dir = random_direction(rng);
    let cap = capacity(&pool, dir);
    if !(cap > 0.0) {
        return None;
    }
    let amount = cap * log_uniform(rng, 1e-3, 0.95);
    let r = pool.price() * rng.random_range(0.95..1.05);
    let py = log_uniform(rng, 0.1, 10.0);
    SwapParams::new(pool, amount, dir, MarketPrices::new(r * py, py).unwrap()).ok()
}

fn uniform_pool(liquidity: f64, spacing: u32, intervals: usize, price: f64, fee: f64) -> PoolState {
    let step = spacing as f64 * 1.0001f64.ln();
    let offset = (intervals / 2) as i64 - (price.ln() / step).floor() as i64;
    let grid = TickGrid::new(spacing, offset, intervals).unwrap();
    PoolState::new(grid, vec![liquidity; intervals], price, fee).unwrap()
}

fn example_one() -> Check {
    // e^{+-9.2} around the price: a full range for a trade of this size
    let grid = TickGrid::new(1000, 92, 184).unwrap();
    // amounts are fee-exclusive, so the fee rate does not enter the price paid
    let pool = PoolState::new(grid, vec![1000.0; 184], 100.0, 0.003).unwrap();
    let start = Instant::now();
    let r = pool
        .swap_exact_out(10.0, Direction::YIn, None)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let slippage_pct = 100.0 * r.slippage();
    ensure((r.amount_in - 1111.11).abs() <= 0.01, || {
        format!("paid {}", r.amount_in)
    })?;
    ensure((slippage_pct - 11.11).abs() <= 0.01, || {
        format!("slippage {slippage_pct}%")
    })?;
    ensure(elapsed < Duration::from_millis(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "paid {:.4} Y, slippage {:.4}%, {:?}",
        r.amount_in, slippage_pct, elapsed
    ))
}

fn swap_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = Vec::new();
    while cases.len() < 1000 {
        let pool = random_pool(&mut rng);
        let dir = random_direction(&mut rng);
        let cap = capacity(&pool, dir);
        if cap > 0.0 {
            let amount = cap * log_uniform(&mut rng, 1e-4, 0.98);
            cases.push((pool, amount, dir));
        }
    }
    let results = par_map(&cases, None, |(pool, amount, dir)| {
        let fast = pool.swap(*amount, *dir, None).ok().map(|s| s.fills.len());
        (compare_swap(pool, *amount, *dir, DEFAULT_STEPS), fast)
    });
    let mut worst = 0.0f64;
    let mut multi = 0;
    for (i, (cmp, fills)) in results.iter().enumerate() {
        let cmp = cmp
            .as_ref()
            .ok_or_else(|| format!("case {i}: a swap failed"))?;
        worst = worst.max(cmp.max_rel_dev());
        if fills.unwrap_or(0) > 1 {
            multi += 1;
        }
    }
    ensure(worst <= 1e-6, || {
        format!("max relative deviation {worst:e}")
    })?;
    Ok(format!(
        "1000 swaps ({multi} crossing ticks), max relative deviation {worst:.3e}"
    ))
}

// x and y of a position, written out from the clamped price
fn direct_value(l: f64, a: f64, b: f64, q: f64, px: f64, py: f64) -> f64 {
    let qh = q.max(a).min(b);
    let x = l * (1.0 / qh.sqrt() - 1.0 / b.sqrt());
    let y = l * (qh.sqrt() - a.sqrt());
    px * x + py * y
}

fn threshold_sign_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut cases = 0;
    let mut wrong = Vec::new();
    while cases < 10_000 {
        let q = log_uniform(&mut rng, 0.05, 20.0);
        let q_after = log_uniform(&mut rng, 0.05, 20.0);
        let a = log_uniform(&mut rng, 0.02, 10.0);
        let b = a * log_uniform(&mut rng, 1.001, 50.0);
        let (px, py) = (
            log_uniform(&mut rng, 0.1, 10.0),
            log_uniform(&mut rng, 0.1, 10.0),
        );
        if q.max(a).min(b) == q_after.max(a).min(b) {
            continue;
        }
        cases += 1;
        let l = log_uniform(&mut rng, 0.1, 1e3);
        let c = direct_value(l, a, b, q, px, py) - direct_value(l, a, b, q_after, px, py);
        let prices = MarketPrices::new(px, py).unwrap();
        let claimed = threshold_sign(q, q_after, a, b, &prices);
        let ok = c.abs() <= 1e-12
            || match claimed {
                ImpactSign::NonPositive => c <= 0.0,
                ImpactSign::Positive => c > 0.0,
                ImpactSign::Zero => false,
            };
        if !ok {
            wrong.push((q, q_after, a, b, px, py, c));
        }
    }
    ensure(wrong.is_empty(), || {
        format!("{} mismatches, first {:?}", wrong.len(), wrong[0])
    })?;
    Ok(format!("{cases} cases, 0 mismatches"))
}

fn move_class_partition() -> Check {
    let prices = MarketPrices::new(1.0, 1.0).unwrap();
    let n = 200;
    let axis: Vec<f64> = (0..n)
        .map(|i| -2.5 + 5.0 * i as f64 / (n - 1) as f64)
        .collect();
    let mut seen = [0usize; 8];
    let mut skipped = 0;
    let mut wrong = Vec::new();
    for &u in &axis {
        for &v in &axis {
            let band = 1e-9;
            if u.abs() < band || v.abs() < band || (v - u).abs() < band || (v + u).abs() < band {
                skipped += 1;
                continue;
            }
            // the four lines q = 1, q' = 1, q' = q, q' = 1/q cut the
            // log-log plane into eight wedges, numbered counterclockwise
            let theta = v.atan2(u).rem_euclid(std::f64::consts::TAU);
            let wedge = (theta / std::f64::consts::FRAC_PI_4) as usize;
            let expected = match wedge % 4 {
                0 => MoveClass::ConvergingLoss,
                1 => MoveClass::DivergingGain,
                2 => MoveClass::Crossing {
                    boundary: ImpactSign::NonPositive,
                },
                _ => MoveClass::Crossing {
                    boundary: ImpactSign::Positive,
                },
            };
            let (q, q_after) = (u.exp(), v.exp());
            let got = classify_move(q, q_after, &prices);
            let c = direct_value(1.0, 0.0, f64::INFINITY, q, 1.0, 1.0)
                - direct_value(1.0, 0.0, f64::INFINITY, q_after, 1.0, 1.0);
            let gain_expected = matches!(
                expected,
                MoveClass::DivergingGain
                    | MoveClass::Crossing {
                        boundary: ImpactSign::NonPositive
                    }
            );
            if got != expected || (c <= 0.0) != gain_expected {
                wrong.push((q, q_after, got, expected));
            }
            seen[wedge.min(7)] += 1;
        }
    }
    ensure(wrong.is_empty(), || {
        format!("{} misclassified, first {:?}", wrong.len(), wrong[0])
    })?;
    ensure(seen.iter().all(|&c| c > 0), || {
        format!("empty region: {seen:?}")
    })?;
    Ok(format!(
        "{} cells in 8 regions {seen:?}, {skipped} boundary cells",
        n * n - skipped
    ))
}

fn limiting_behaviour() -> Check {
    let pool = uniform_pool(1e4, 10, 200, 1.0, 0.003);
    let prices = MarketPrices::new(0.8, 1.0).unwrap();
    let dx = 50.0;
    let params = SwapParams::new(pool.clone(), dx, Direction::XIn, prices).unwrap();
    let m = pool.grid().interval_below(1.0).unwrap();
    let range = TickRange::new(m - 20, m + 1).unwrap();
    let err = |e: clmm_jit_core::Error| e.to_string();

    let q = pool.price();
    let limit = dx * (prices.py * q - prices.px);
    let big = utility(&params, 1e12, range, 0.0).map_err(err)?;
    let pos = GridPosition {
        liquidity: 1e12,
        range,
    };
    let after = pool
        .swap(dx, Direction::XIn, Some(&pos))
        .map_err(err)?
        .final_price;
    let direct = absolute_price_impact(&pos.to_position(pool.grid()), q, after, &prices);
    for (name, c) in [("per-tick", big.impact), ("value", direct)] {
        let rel = (c - limit).abs() / limit.abs();
        ensure(rel <= 1e-3, || {
            format!("{name} C(1e12) = {c}, limit {limit}, rel {rel:e}")
        })?;
    }

    let tiny = utility(&params, 1e-9, range, 0.0).map_err(err)?;
    ensure(tiny.impact.abs() <= 1e-6, || {
        format!("C(1e-9) = {:e}", tiny.impact)
    })?;

    let mut prev = f64::NEG_INFINITY;
    for k in 0..=80 {
        let l = 10f64.powf(2.0 + k as f64 / 10.0);
        let pos = GridPosition {
            liquidity: l,
            range,
        };
        let qp = pool
            .swap(dx, Direction::XIn, Some(&pos))
            .map_err(err)?
            .final_price;
        ensure(qp > prev, || {
            format!("q'(L) not increasing at L = {l:e}: {qp} <= {prev}")
        })?;
        prev = qp;
    }
    Ok(format!(
        "C(1e12) = {:.6} vs limit {limit:.6}, C(1e-9) = {:.2e}, q'(L) strictly increasing over L in [1e2, 1e10]",
        big.impact, tiny.impact
    ))
}

fn fee_bound_and_conservation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut cases = 0;
    let mut worst_ulps = 0.0f64;
    let mut worst_over = f64::NEG_INFINITY;
    while cases < 2000 {
        let Some(params) = random_swap(&mut rng) else {
            continue;
        };
        let n = params.pool.grid().interval_count();
        let lower = rng.random_range(0..n);
        let upper = rng.random_range(lower + 1..=n);
        let jit = GridPosition {
            liquidity: log_uniform(&mut rng, 1e-3, 1e8),
            range: TickRange { lower, upper },
        };
        let s = run_sandwich(&params, Some(&jit)).map_err(|e| e.to_string())?;
        let p_in = match params.direction {
            Direction::XIn => params.prices.px,
            Direction::YIn => params.prices.py,
        };
        let ticks = s.swap.fills.len().max(1) as f64;
        // per-tick sums may round up by an ulp each
        let bound = params.pool.fee_rate() * params.amount_in * p_in;
        let over = (s.fee_jit - bound) / (f64::EPSILON * bound);
        ensure(over <= ticks, || {
            format!("fee_jit {} > bound {bound} by {over} ulp", s.fee_jit)
        })?;
        worst_over = worst_over.max(over);
        let gap = (s.fee_jit + s.passive_fees - s.total_fees).abs();
        let ulps = gap / (f64::EPSILON * s.total_fees.abs().max(f64::MIN_POSITIVE));
        ensure(ulps <= ticks, || {
            format!("fee split off by {ulps} ulp over {ticks} ticks")
        })?;
        worst_ulps = worst_ulps.max(ulps / ticks);
        cases += 1;
    }
    Ok(format!(
        "{cases} sandwiches, fee_jit at most {:.2} ulp over the bound, worst split error {worst_ulps:.2} ulp per tick",
        worst_over.max(0.0)
    ))
}

fn optimizer_dominance() -> Check {
    let events = synthetic_corpus(&SynthConfig::new(200, 41));
    let base = JitConfig::new(0.0, 0.0);
    let results = par_map(&events, None, |e| {
        let cfg = JitConfig {
            budget: event_budget(e, &base),
            ..base
        };
        let params = e.params();
        let decision = optimal_strategy(&params, &cfg)?;
        let cmp = compare_utility(&params, &cfg, &decision, 10_000)?;
        Ok::<_, clmm_jit_core::Error>((decision.archetype, cmp))
    });
    let mut counts = [0usize; 3];
    let mut worst = f64::INFINITY;
    for (e, r) in events.iter().zip(results) {
        let (archetype, cmp) = r.map_err(|err| format!("{}: {err}", e.event_id))?;
        match archetype {
            Some(Archetype::Overpriced) => counts[0] += 1,
            Some(Archetype::Arbitrageur) => counts[1] += 1,
            Some(Archetype::Overshoot) => counts[2] += 1,
            None => {}
        }
        ensure(cmp.margin >= -1e-9, || {
            format!(
                "{}: optimizer {} < grid {}",
                e.event_id, cmp.optimizer_utility, cmp.grid_utility
            )
        })?;
        worst = worst.min(cmp.margin);
    }
    ensure(counts.iter().all(|&c| c > 0), || {
        format!("archetype counts {counts:?}")
    })?;
    Ok(format!(
        "200 swaps (overpriced/arbitrageur/overshoot {counts:?}), smallest margin over the grid {worst:.3e}"
    ))
}

fn l_grid(cap: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| cap * i as f64 / n as f64)
}

fn archetype_behavior() -> Check {
    let err = |e: clmm_jit_core::Error| e.to_string();
    let pool = uniform_pool(1e5, 10, 200, 1.0, 0.003);
    let dx = 2000.0;
    let q = pool.price();
    let q_star = pool.final_price_no_jit(dx, Direction::XIn).map_err(err)?;
    let cfg = JitConfig::new(1e6, 0.0);
    let make = |r: f64| {
        SwapParams::new(
            pool.clone(),
            dx,
            Direction::XIn,
            MarketPrices::new(r, 1.0).unwrap(),
        )
        .unwrap()
    };
    let mut notes = Vec::new();

    // arbitrage: the market sits below where the trade leaves the pool
    let arb = make(q_star * 0.995);
    let d = optimal_strategy(&arb, &cfg).map_err(err)?;
    ensure(d.archetype == Some(Archetype::Arbitrageur), || {
        format!("arbitrage instance is {:?}", d.archetype)
    })?;
    ensure(d.strategy.is_bottom(), || {
        format!("arbitrage picked {:?}", d.strategy)
    })?;
    let ranges = enumerate_ranges(&arb, q_star);
    for &range in &ranges {
        let cap = liquidity_cap(&arb, range, &cfg);
        for l in l_grid(cap, 200) {
            let u = utility_value(&arb, l, range, 0.0).map_err(err)?;
            ensure(u < 0.0, || {
                format!("arbitrage range {range:?} has U({l}) = {u}")
            })?;
        }
    }
    notes.push(format!(
        "arbitrage BOTTOM, {} ranges all negative",
        ranges.len()
    ));

    // overpriced: the market sits above the pool price
    let over = make(q * 1.01);
    let d = optimal_strategy(&over, &cfg).map_err(err)?;
    ensure(d.archetype == Some(Archetype::Overpriced), || {
        format!("overpriced instance is {:?}", d.archetype)
    })?;
    let ranges = enumerate_ranges(&over, q_star);
    for &range in &ranges {
        let cap = liquidity_cap(&over, range, &cfg);
        for l in l_grid(cap, 200) {
            let u = utility_value(&over, l, range, 0.0).map_err(err)?;
            ensure(u > 0.0, || {
                format!("overpriced range {range:?} has U({l}) = {u}")
            })?;
        }
    }
    ensure(d.breakdown.utility > 0.0, || {
        "overpriced instance stays out".into()
    })?;
    notes.push(format!("overpriced U > 0 on all {} ranges", ranges.len()));

    // overshoot: the trade carries the price through the market price
    let r = (q * q_star).sqrt();
    let shoot = make(r);
    let d = optimal_strategy(&shoot, &cfg).map_err(err)?;
    ensure(d.archetype == Some(Archetype::Overshoot), || {
        format!("overshoot instance is {:?}", d.archetype)
    })?;
    let Strategy::Participate {
        liquidity,
        range,
        lower_price,
        upper_price,
    } = d.strategy
    else {
        return Err("overshoot instance stays out".into());
    };
    let m_r = pool.grid().interval_below(r).unwrap();
    ensure(range.upper <= m_r + 1 && lower_price < r, || {
        format!("range [{lower_price}, {upper_price}] is not beyond the crossing at {r}")
    })?;
    let (l_star, best) = optimize_liquidity(&shoot, range, &cfg).map_err(err)?;
    let cap = liquidity_cap(&shoot, range, &cfg);
    let mut grid_best = f64::NEG_INFINITY;
    for l in l_grid(cap, 1000) {
        grid_best = grid_best.max(utility_value(&shoot, l, range, 0.0).map_err(err)?);
    }
    ensure(best.utility >= grid_best - 1e-9, || {
        format!("L* utility {} below grid {grid_best}", best.utility)
    })?;
    let place = if l_star < cap * (1.0 - 1e-9) {
        "interior"
    } else {
        "boundary"
    };
    notes.push(format!(
        "overshoot range [{lower_price:.5}, {upper_price:.5}] beyond r = {r:.5}, {place} L* = {liquidity:.4e} of cap {cap:.4e}"
    ));
    Ok(notes.join("; "))
}

fn insufficiency_soundness() -> Check {
    let err = |e: clmm_jit_core::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut instances = 0;
    let mut tried = 0;
    while instances < 100 {
        tried += 1;
        if tried > 100_000 {
            return Err(format!("only {instances} instances found"));
        }
        let Some(params) = random_swap(&mut rng) else {
            continue;
        };
        let Ok(q_star) = params
            .pool
            .final_price_no_jit(params.amount_in, params.direction)
        else {
            continue;
        };
        let ranges = enumerate_ranges(&params, q_star);
        let mut flagged = Vec::new();
        for &r in &ranges {
            if insufficiency_check(&params, r).map_err(err)? {
                flagged.push(r);
            }
        }
        if flagged.is_empty() {
            continue;
        }
        let range = flagged[rng.random_range(0..flagged.len())];
        let mean: f64 = (range.lower..range.upper)
            .map(|m| params.pool.liquidity_at(m))
            .sum::<f64>()
            / range.width() as f64;
        let scale = mean.max(1.0);
        for k in 0..1000 {
            let l = scale * 10f64.powf(-6.0 + 10.0 * k as f64 / 999.0);
            let u = utility_value(&params, l, range, 0.0).map_err(err)?;
            ensure(u < 0.0, || {
                format!("flagged range {range:?} has U({l}) = {u}")
            })?;
        }
        instances += 1;
    }
    Ok(format!(
        "{instances} flagged ranges (from {tried} swaps), U < 0 at all 1000 L each"
    ))
}

fn corpus() -> Vec<clmm_jit_sim::SwapEvent> {
    synthetic_corpus(&SynthConfig::new(500, 61))
}

fn budget_sweep_shape(out: &PathBuf) -> Check {
    let events = corpus();
    let multipliers: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    let cfg = ReplayConfig::new(JitConfig::new(0.0, 0.0));
    let points = budget_sweep(&events, &multipliers, &cfg).map_err(|e| e.to_string())?;
    write_sweep_csv(out, &points).map_err(|e| e.to_string())?;
    let fee: Vec<f64> = points.iter().map(|p| p.passive_fee_pct).collect();
    let slip: Vec<f64> = points.iter().map(|p| p.trader_slippage_pct).collect();
    ensure((fee[0] - 100.0).abs() < 1e-9, || {
        format!("passive fees start at {}", fee[0])
    })?;
    let show = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.5}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let rises = |v: &[f64]| -> Vec<String> {
        v.windows(2)
            .zip(&multipliers)
            .filter(|(w, _)| w[1] > w[0])
            .map(|(w, k)| format!("+{:.2e} after {k}", w[1] - w[0]))
            .collect()
    };
    let (fee_up, slip_up) = (rises(&fee), rises(&slip));
    ensure(fee_up.is_empty() && slip_up.is_empty(), || {
        format!(
            "passive fee % [{}] rises {fee_up:?}; slippage % [{}] rises {slip_up:?}",
            show(&fee),
            show(&slip)
        )
    })?;
    Ok(format!(
        "passive fee % [{}], slippage % [{}], written to {}",
        show(&fee),
        show(&slip),
        out.display()
    ))
}

fn never_lose() -> Check {
    let events = corpus();
    let cfg = ReplayConfig::new(JitConfig {
        utility_floor: 0.0,
        ..JitConfig::new(0.0, 0.0)
    });
    let records = replay(&events, &cfg);
    let mut total = 0.0;
    let mut compared = 0;
    let mut worst = f64::INFINITY;
    let mut residual = 0.0f64;
    for rec in &records {
        let m = rec
            .metrics
            .as_ref()
            .ok_or_else(|| format!("{}: {:?}", rec.event_id, rec.error))?;
        total += m.optimized_utility;
        residual = residual.max(m.conservation_residual.abs());
        if let Some(real) = m.real.as_ref().filter(|r| r.in_search_space) {
            compared += 1;
            let margin = m.optimized_utility - real.utility;
            worst = worst.min(margin);
            ensure(margin >= -1e-9, || {
                format!(
                    "{}: optimized {} < real {}",
                    rec.event_id, m.optimized_utility, real.utility
                )
            })?;
        }
    }
    ensure(total >= 0.0, || format!("total optimized utility {total}"))?;
    Ok(format!(
        "sum optimized {total:.2}, {compared} events compared, smallest margin {worst:.3e}, max conservation residual {residual:.2e}"
    ))
}

fn main() -> ExitCode {
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&out_dir).expect("create output dir");
    let sweep_csv = out_dir.join("sweep.csv");

    let criteria: Vec<(&str, Option<Duration>, Box<dyn FnOnce() -> Check>)> = vec![
        ("example-1 reproduction", None, Box::new(example_one)),
        (
            "swap oracle equivalence",
            Some(Duration::from_secs(120)),
            Box::new(swap_oracle),
        ),
        (
            "threshold sign equivalence",
            Some(Duration::from_secs(10)),
            Box::new(threshold_sign_equivalence),
        ),
        ("move-class partition", None, Box::new(move_class_partition)),
        (
            "limiting behaviour of impact",
            None,
            Box::new(limiting_behaviour),
        ),
        (
            "fee bound and conservation",
            None,
            Box::new(fee_bound_and_conservation),
        ),
        (
            "optimizer dominance",
            Some(Duration::from_secs(300)),
            Box::new(optimizer_dominance),
        ),
        ("archetype behaviour", None, Box::new(archetype_behavior)),
        (
            "insufficiency soundness",
            None,
            Box::new(insufficiency_soundness),
        ),
        (
            "budget sweep shape",
            Some(Duration::from_secs(600)),
            Box::new(move || budget_sweep_shape(&sweep_csv)),
        ),
        ("never-lose replay", None, Box::new(never_lose)),
    ];

    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let mut result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, limit) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(detail) => println!("PASS {name} [{elapsed:.2?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{elapsed:.2?}]: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    }
}
