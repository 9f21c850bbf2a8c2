//! Simplified SSP-MMC: value iteration over a discretized
//! (difficulty, half-life) grid, minimizing the expected number of reviews
//! until the half-life reaches a learned horizon. Choosing a recall target
//! r schedules the review at the dt where exp(-dt/h) = r, so the success
//! probability of that review is exactly r; success multiplies the
//! half-life by growth(d), failure halves it.

use std::collections::BTreeMap;

use crate::error::{LectorError, Result};
use crate::schedulers::constants::SspmmcConstants;
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{LearnerProfile, LearningState};

/// Solved policy: per (difficulty bin, half-life bin) the optimal recall
/// target plus the value (expected reviews to the horizon).
#[derive(Debug, Clone)]
pub struct PolicyTable {
    consts: SspmmcConstants,
    h_values: Vec<f64>,
    d_values: Vec<f64>,
    values: Vec<f64>,
    actions: Vec<f64>,
    pub sweeps: usize,
    pub residual: f64,
}

/// The dt at which exp(-dt/h) decays to the recall target.
pub fn interval_for(half_life: f64, target: f64) -> f64 {
    -half_life * target.ln()
}

pub fn sspmmc_policy(consts: &SspmmcConstants) -> Result<PolicyTable> {
    if consts.h_bins < 2 || consts.d_bins < 2 {
        return Err(LectorError::Config(
            "sspmmc grid needs at least 2 half-life bins and 2 difficulty bins".into(),
        ));
    }
    if consts.targets.is_empty() || consts.targets.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(LectorError::Config(
            "sspmmc recall targets must be non-empty and lie in (0, 1]".into(),
        ));
    }
    if !(consts.horizon > 1.0) {
        return Err(LectorError::Config("sspmmc horizon must exceed 1 day".into()));
    }

    let h_bins = consts.h_bins;
    let d_bins = consts.d_bins;
    let log_max = consts.horizon.ln();
    let h_values: Vec<f64> = (0..h_bins)
        .map(|k| (log_max * k as f64 / (h_bins - 1) as f64).exp())
        .collect();
    let d_values: Vec<f64> = (0..d_bins)
        .map(|k| k as f64 / (d_bins - 1) as f64)
        .collect();

    let step = log_max / (h_bins - 1) as f64;
    let snap = |h: f64| -> usize {
        let idx = (h.ln() / step).round();
        idx.clamp(0.0, (h_bins - 1) as f64) as usize
    };
    let idx = |di: usize, hi: usize| di * h_bins + hi;

    let mut values = vec![0.0f64; d_bins * h_bins];
    let mut residual = f64::INFINITY;
    let mut converged_at = None;
    for sweep in 0..consts.max_sweeps {
        let mut delta = 0.0f64;
        let mut next = values.clone();
        for di in 0..d_bins {
            let growth = consts.growth_base - consts.growth_difficulty * d_values[di];
            for hi in 0..h_bins - 1 {
                let h = h_values[hi];
                let up = idx(di, snap(h * growth));
                let down = idx(di, snap(h * consts.shrink));
                let mut best = f64::INFINITY;
                for &r in &consts.targets {
                    let v = 1.0 + r * values[up] + (1.0 - r) * values[down];
                    if v < best {
                        best = v;
                    }
                }
                delta = delta.max((best - values[idx(di, hi)]).abs());
                next[idx(di, hi)] = best;
            }
        }
        values = next;
        residual = delta;
        if delta < consts.tolerance {
            converged_at = Some(sweep + 1);
            break;
        }
    }
    let sweeps = converged_at.ok_or(LectorError::NonConvergence {
        residual,
        sweeps: consts.max_sweeps,
    })?;

    // Greedy actions; absorbing states take the smallest target, i.e. the
    // longest interval -- the scheduler stops pushing.
    let min_target = consts
        .targets
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut actions = vec![min_target; d_bins * h_bins];
    for di in 0..d_bins {
        let growth = consts.growth_base - consts.growth_difficulty * d_values[di];
        for hi in 0..h_bins - 1 {
            let h = h_values[hi];
            let up = idx(di, snap(h * growth));
            let down = idx(di, snap(h * consts.shrink));
            let mut best = f64::INFINITY;
            let mut best_r = min_target;
            for &r in &consts.targets {
                let v = 1.0 + r * values[up] + (1.0 - r) * values[down];
                if v < best {
                    best = v;
                    best_r = r;
                }
            }
            actions[idx(di, hi)] = best_r;
        }
    }

    Ok(PolicyTable {
        consts: consts.clone(),
        h_values,
        d_values,
        values,
        actions,
        sweeps,
        residual,
    })
}

impl PolicyTable {
    pub fn h_bins(&self) -> usize {
        self.consts.h_bins
    }

    pub fn d_bins(&self) -> usize {
        self.consts.d_bins
    }

    pub fn h_floor(&self) -> f64 {
        self.h_values[0]
    }

    fn h_index(&self, h: f64) -> usize {
        let step = self.consts.horizon.ln() / (self.consts.h_bins - 1) as f64;
        let idx = (h.max(self.h_values[0]).ln() / step).round();
        idx.clamp(0.0, (self.consts.h_bins - 1) as f64) as usize
    }

    fn d_index(&self, d: f64) -> usize {
        let span = (self.consts.d_bins - 1) as f64;
        (d.clamp(0.0, 1.0) * span).round() as usize
    }

    pub fn value_at(&self, d_idx: usize, h_idx: usize) -> f64 {
        self.values[d_idx * self.consts.h_bins + h_idx]
    }

    pub fn action_at(&self, d_idx: usize, h_idx: usize) -> f64 {
        self.actions[d_idx * self.consts.h_bins + h_idx]
    }

    /// Optimal recall target for the bin containing (d, h).
    pub fn target_for(&self, d: f64, h: f64) -> f64 {
        self.action_at(self.d_index(d), self.h_index(h))
    }

    /// One extra Bellman backup over the converged table.
    pub fn bellman_residual(&self) -> f64 {
        let c = &self.consts;
        let step = c.horizon.ln() / (c.h_bins - 1) as f64;
        let snap = |h: f64| -> usize {
            (h.ln() / step).round().clamp(0.0, (c.h_bins - 1) as f64) as usize
        };
        let idx = |di: usize, hi: usize| di * c.h_bins + hi;
        let mut delta = 0.0f64;
        for di in 0..c.d_bins {
            let growth = c.growth_base - c.growth_difficulty * self.d_values[di];
            for hi in 0..c.h_bins - 1 {
                let h = self.h_values[hi];
                let up = idx(di, snap(h * growth));
                let down = idx(di, snap(h * c.shrink));
                let best = c
                    .targets
                    .iter()
                    .map(|&r| 1.0 + r * self.values[up] + (1.0 - r) * self.values[down])
                    .fold(f64::INFINITY, f64::min);
                delta = delta.max((best - self.values[idx(di, hi)]).abs());
            }
        }
        delta
    }

    /// Evaluates the stored greedy policy by fixed-point iteration.
    pub fn evaluate_policy(&self) -> Vec<f64> {
        let c = &self.consts;
        let step = c.horizon.ln() / (c.h_bins - 1) as f64;
        let snap = |h: f64| -> usize {
            (h.ln() / step).round().clamp(0.0, (c.h_bins - 1) as f64) as usize
        };
        let idx = |di: usize, hi: usize| di * c.h_bins + hi;
        let mut v = vec![0.0f64; c.d_bins * c.h_bins];
        for _ in 0..200_000 {
            let mut delta = 0.0f64;
            let mut next = v.clone();
            for di in 0..c.d_bins {
                let growth = c.growth_base - c.growth_difficulty * self.d_values[di];
                for hi in 0..c.h_bins - 1 {
                    let h = self.h_values[hi];
                    let r = self.actions[idx(di, hi)];
                    let up = idx(di, snap(h * growth));
                    let down = idx(di, snap(h * c.shrink));
                    let val = 1.0 + r * v[up] + (1.0 - r) * v[down];
                    delta = delta.max((val - v[idx(di, hi)]).abs());
                    next[idx(di, hi)] = val;
                }
            }
            v = next;
            if delta < 1e-13 {
                break;
            }
        }
        v
    }
}

pub fn sspmmc_update(
    state: &LearningState,
    profile: &LearnerProfile,
    outcome: bool,
    policy: &PolicyTable,
    bounds: &SchedulingBounds,
    day: u32,
) -> SchedulerDecision {
    let consts = &policy.consts;
    let growth = consts.growth_base - consts.growth_difficulty * state.difficulty;
    let half_life = if outcome {
        state.half_life * growth
    } else {
        (state.half_life * consts.shrink).max(policy.h_floor())
    };
    let target = policy.target_for(state.difficulty, half_life);
    let raw = interval_for(half_life, target);
    let next_interval = clamp_interval(raw, bounds);

    let mut next = *state;
    next.half_life = half_life;
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("half_life".to_owned(), half_life);
    diagnostics.insert("recall_target".to_owned(), target);
    diagnostics.insert("raw_interval".to_owned(), raw);

    SchedulerDecision {
        next_interval,
        updated_state: next,
        updated_profile: *profile,
        diagnostics,
    }
}
