//! Budget sweeps: every event re-optimized with its budget scaled by a
//! multiplier, averaged into passive-fee and slippage curves.

use clmm_jit_core::JitConfig;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::ingest::SwapEvent;
use crate::replay::{decide, event_budget, income_slippage, par_map, run_sandwich, ReplayConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub budget_multiplier: f64,
    /// Mean over events of passive fees as a percentage of the no-JIT fees.
    pub passive_fee_pct: f64,
    /// Mean trader slippage in percent, average-price convention.
    pub trader_slippage_pct: f64,
    /// Mean trader slippage in percent measured on output.
    pub trader_slippage_income_pct: f64,
    pub events: usize,
}

struct EventCurve {
    fee_pct: Vec<f64>,
    slippage: Vec<f64>,
    slippage_income: Vec<f64>,
}

fn event_curve(event: &SwapEvent, multipliers: &[f64], jit: &JitConfig) -> Result<EventCurve> {
    let wrap = |source| SimError::Event {
        event_id: event.event_id.clone(),
        source,
    };
    let params = event.params();
    let budget = event_budget(event, jit);
    let baseline = run_sandwich(&params, None).map_err(wrap)?;
    let mut curve = EventCurve {
        fee_pct: vec![],
        slippage: vec![],
        slippage_income: vec![],
    };
    for &k in multipliers {
        let cfg = JitConfig {
            budget: k * budget,
            ..*jit
        };
        let decision = decide(&params, &cfg).map_err(wrap)?;
        let position = match decision.strategy {
            clmm_jit_core::Strategy::Participate {
                liquidity, range, ..
            } => Some(clmm_jit_core::GridPosition { liquidity, range }),
            clmm_jit_core::Strategy::Bottom => None,
        };
        let s = run_sandwich(&params, position.as_ref()).map_err(wrap)?;
        curve
            .fee_pct
            .push(100.0 * s.passive_fees / baseline.passive_fees);
        curve.slippage.push(100.0 * s.swap.slippage());
        curve.slippage_income.push(100.0 * income_slippage(&s.swap));
    }
    Ok(curve)
}

/// One point per multiplier, in the order given. A multiplier of 0 keeps
/// every event out and reproduces the baseline.
pub fn budget_sweep(
    events: &[SwapEvent],
    multipliers: &[f64],
    config: &ReplayConfig,
) -> Result<Vec<SweepPoint>> {
    if let Some(k) = multipliers.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        return Err(SimError::InvalidInput(format!(
            "budget multiplier must be non-negative, got {k}"
        )));
    }
    let curves: Vec<EventCurve> = par_map(events, config.threads, |e| {
        event_curve(e, multipliers, &config.jit)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let n = curves.len();
    let mean = |pick: &dyn Fn(&EventCurve) -> f64| {
        if n == 0 {
            0.0
        } else {
            curves.iter().map(pick).sum::<f64>() / n as f64
        }
    };
    Ok(multipliers
        .iter()
        .enumerate()
        .map(|(i, &k)| SweepPoint {
            budget_multiplier: k,
            passive_fee_pct: mean(&|c| c.fee_pct[i]),
            trader_slippage_pct: mean(&|c| c.slippage[i]),
            trader_slippage_income_pct: mean(&|c| c.slippage_income[i]),
            events: n,
        })
        .collect())
}
