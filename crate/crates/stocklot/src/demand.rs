//! Demand-rate estimation and consumption diagnostics.
//!
//! Lot-sizing models assume a roughly constant consumption rate, so before
//! applying one we measure it: annual demand and daily rate from exit
//! movements, a consumption curve compared against a straight reference
//! line, a normalized sup-gap metric of how far the curve strays from that
//! line, movement-pattern detection (stable / pathological / just-in-time),
//! and sliding-window lead-time demand statistics for reorder points.

use crate::ledger::{
    average_inventory, integrated_stock_area, DateRange, Direction, MovementLedger, StockTimeline,
    UnitBasis,
};
use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DemandError {
    #[error("item {item_id:?} has no movements in {year}")]
    NoMovements { item_id: String, year: i32 },
    #[error("constancy metric undefined: consumption curve starts at zero")]
    UndefinedMetric,
    #[error("constancy metric needs at least two curve points")]
    TooFewPoints,
    #[error("window of {window_days} days does not fit in a {span_days}-day year")]
    InsufficientSpan { window_days: u32, span_days: i64 },
}

/// Annual demand of an item and the daily rate derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandStats {
    pub item_id: String,
    pub annual_demand: f64,
    pub daily_rate: f64,
    /// Divisor used for the daily rate (365 by convention, leap or not).
    pub period_days: u32,
    pub basis: UnitBasis,
}

/// Demand is what production took out: the sum of absolute exit
/// quantities in the year. `rate_days` is the daily-rate divisor
/// (conventionally 365 regardless of leap years). Items without exits
/// yield zero demand rather than an error.
pub fn demand_stats(
    ledger: &MovementLedger,
    item_id: &str,
    year: i32,
    basis: UnitBasis,
    rate_days: u32,
) -> DemandStats {
    let range = DateRange::year(year);
    let annual_demand: f64 = ledger
        .movements_for(item_id)
        .filter(|m| m.direction == Direction::Exit && range.contains(m.date))
        .map(|m| m.signed_qty(basis).abs())
        .sum();
    DemandStats {
        item_id: item_id.to_string(),
        annual_demand,
        daily_rate: annual_demand / rate_days as f64,
        period_days: rate_days,
        basis,
    }
}

/// One step of a consumption curve: stock remaining at end of `date`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub date: NaiveDate,
    pub remaining: f64,
}

/// Cumulative consumption of one item over a year.
///
/// The curve starts at the year's total entries and subtracts each exit
/// chronologically, paired with a reference line falling from
/// `(line_start, start_total)` to `(line_end, 0)`. A perfectly constant
/// consumer tracks the line exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionCurve {
    pub item_id: String,
    pub points: Vec<CurvePoint>,
    pub start_total: f64,
    pub line_end: NaiveDate,
}

impl ConsumptionCurve {
    pub fn line_start(&self) -> NaiveDate {
        self.points[0].date
    }

    /// Reference-line value at `date`, clamped to the line's span.
    pub fn line_value(&self, date: NaiveDate) -> f64 {
        let span = (self.line_end - self.line_start()).num_days().max(1);
        let left = (self.line_end - date).num_days().clamp(0, span);
        self.start_total * left as f64 / span as f64
    }

    /// Stock remaining at end of `date` (step function).
    pub fn remaining_at(&self, date: NaiveDate) -> f64 {
        let mut remaining = self.start_total;
        for p in &self.points {
            if p.date > date {
                break;
            }
            remaining = p.remaining;
        }
        remaining
    }

    /// Total consumption recorded by the curve.
    pub fn total_consumed(&self) -> f64 {
        self.start_total
            - self
                .points
                .last()
                .map(|p| p.remaining)
                .unwrap_or(self.start_total)
    }
}

/// Build the consumption curve of `item_id` over `year`.
///
/// The anchor point carries the year's summed entries; it sits on the
/// first entry date when entries precede all exits, otherwise on the day
/// before the first exit so the initial condition is never mixed with
/// consumption. The reference line always ends at December 31.
pub fn consumption_curve(
    ledger: &MovementLedger,
    item_id: &str,
    year: i32,
    basis: UnitBasis,
) -> Result<ConsumptionCurve, DemandError> {
    let range = DateRange::year(year);
    let mut start_total = 0.0;
    let mut first_entry: Option<NaiveDate> = None;
    let mut exits: Vec<(NaiveDate, f64)> = Vec::new();
    for m in ledger.movements_for(item_id) {
        if !range.contains(m.date) {
            continue;
        }
        match m.direction {
            Direction::Entry => {
                start_total += m.signed_qty(basis).abs();
                first_entry = Some(first_entry.map_or(m.date, |d| d.min(m.date)));
            }
            Direction::Exit => exits.push((m.date, m.signed_qty(basis).abs())),
        }
    }
    if first_entry.is_none() && exits.is_empty() {
        return Err(DemandError::NoMovements {
            item_id: item_id.to_string(),
            year,
        });
    }
    exits.sort_by_key(|(d, _)| *d);

    let anchor = match (first_entry, exits.first()) {
        (Some(e), Some((x, _))) if e < *x => e,
        (Some(e), None) => e,
        (_, Some((x, _))) => *x - Duration::days(1),
        (None, None) => unreachable!(),
    };

    let mut points = vec![CurvePoint {
        date: anchor,
        remaining: start_total,
    }];
    let mut remaining = start_total;
    let mut i = 0;
    while i < exits.len() {
        let date = exits[i].0;
        while i < exits.len() && exits[i].0 == date {
            remaining -= exits[i].1;
            i += 1;
        }
        points.push(CurvePoint { date, remaining });
    }

    Ok(ConsumptionCurve {
        item_id: item_id.to_string(),
        points,
        start_total,
        line_end: range.end,
    })
}

/// Plot series for the curve: `(date, remaining, reference line)` rows.
pub fn curve_series(curve: &ConsumptionCurve) -> Vec<(NaiveDate, f64, f64)> {
    curve
        .points
        .iter()
        .map(|p| (p.date, p.remaining, curve.line_value(p.date)))
        .collect()
}

/// Curve export as `date,remaining,reference` CSV.
pub fn curve_to_csv(curve: &ConsumptionCurve) -> String {
    let mut out = String::from("date,remaining,reference\n");
    for (date, remaining, reference) in curve_series(curve) {
        out.push_str(&format!(
            "{},{},{}\n",
            date,
            crate::ledger::format_decimal(remaining),
            crate::ledger::format_decimal(reference)
        ));
    }
    out
}

/// Normalized sup-gap between the curve and its reference line:
/// `max |remaining(t) − line(t)| / start_total`, zero for a perfectly
/// linear consumer, approaching one for a single early burst.
///
/// The step function is right-continuous, so the supremum over continuous
/// time is attained either at an event date or just before one; evaluating
/// at every event date, every event date minus one day, and both line
/// endpoints covers all candidates at day granularity.
pub fn constancy_metric(curve: &ConsumptionCurve) -> Result<f64, DemandError> {
    if curve.points.len() < 2 {
        return Err(DemandError::TooFewPoints);
    }
    if curve.start_total <= 0.0 || curve.start_total.is_nan() {
        return Err(DemandError::UndefinedMetric);
    }
    let start = curve.line_start();
    let mut candidates: Vec<NaiveDate> = vec![start, curve.line_end];
    for p in &curve.points {
        candidates.push(p.date);
        candidates.push(p.date - Duration::days(1));
    }
    let mut max_gap = 0.0f64;
    for t in candidates {
        if t < start || t > curve.line_end {
            continue;
        }
        let gap = (curve.remaining_at(t) - curve.line_value(t)).abs();
        max_gap = max_gap.max(gap);
    }
    Ok(max_gap / curve.start_total)
}

/// Mean and population variance of demand summed over a sliding window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadTimeDemand {
    pub window_days: u32,
    /// Mean demand over a window (μ*).
    pub mean_demand: f64,
    /// Population variance of window demand (σ²*).
    pub demand_variance: f64,
}

/// Slide a `window_days`-day window across the calendar year in one-day
/// steps; each window's demand is the sum of absolute exits inside it.
/// Returns the mean and population variance of those window sums.
pub fn lead_time_demand(
    ledger: &MovementLedger,
    item_id: &str,
    year: i32,
    window_days: u32,
    basis: UnitBasis,
) -> Result<LeadTimeDemand, DemandError> {
    let range = DateRange::year(year);
    let span_days = range.days();
    if window_days < 1 || window_days as i64 > span_days {
        return Err(DemandError::InsufficientSpan {
            window_days,
            span_days,
        });
    }
    let daily = daily_exit_totals(ledger, item_id, year, basis);

    // Prefix sums; window k covers days [k, k + w).
    let mut prefix = vec![0.0; daily.len() + 1];
    for (i, v) in daily.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    let w = window_days as usize;
    let n_windows = daily.len() - w + 1;
    let sums: Vec<f64> = (0..n_windows).map(|k| prefix[k + w] - prefix[k]).collect();

    let mean = sums.iter().sum::<f64>() / n_windows as f64;
    let variance = sums.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n_windows as f64;

    Ok(LeadTimeDemand {
        window_days,
        mean_demand: mean,
        demand_variance: variance,
    })
}

/// Absolute exit totals per calendar day of `year`, zero-filled.
pub(crate) fn daily_exit_totals(
    ledger: &MovementLedger,
    item_id: &str,
    year: i32,
    basis: UnitBasis,
) -> Vec<f64> {
    let range = DateRange::year(year);
    let mut daily = vec![0.0; range.days() as usize];
    for m in ledger.movements_for(item_id) {
        if m.direction == Direction::Exit && range.contains(m.date) {
            let idx = (m.date - range.start).num_days() as usize;
            daily[idx] += m.signed_qty(basis).abs();
        }
    }
    daily
}

/// Coarse movement-pattern classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    /// Homogeneous periodic fluctuations; lot-sizing models apply.
    Stable,
    /// Standing balance well above any single purchase lot: over-buying.
    Pathological,
    /// Stock bought and consumed almost immediately; already efficient.
    JustInTime,
}

/// Thresholds for [`detect_pattern`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternConfig {
    /// Mean dwell (stock area / total exits) below this many days is
    /// just-in-time.
    pub jit_dwell_days: f64,
    /// Average inventory above `factor × (largest single entry / 2)` is
    /// pathological.
    pub pathology_factor: f64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            jit_dwell_days: 3.0,
            pathology_factor: 2.0,
        }
    }
}

/// Classify an item's movement pattern from its timeline and consumption
/// curve. Degenerate inputs (no exits, no entries) fall back to `Stable`.
pub fn detect_pattern(
    timeline: &StockTimeline,
    curve: &ConsumptionCurve,
    config: &PatternConfig,
) -> Pattern {
    let (Ok(area), Ok(avg)) = (integrated_stock_area(timeline), average_inventory(timeline)) else {
        return Pattern::Stable;
    };

    let total_exits = curve.total_consumed();
    if total_exits > 0.0 && area / total_exits < config.jit_dwell_days {
        return Pattern::JustInTime;
    }

    let max_entry = timeline
        .points
        .windows(2)
        .map(|w| w[1].level - w[0].level)
        .fold(0.0f64, f64::max);
    if max_entry > 0.0 && avg > config.pathology_factor * (max_entry / 2.0) {
        return Pattern::Pathological;
    }

    Pattern::Stable
}
