//! Monetary-value ranking and A/B/C banding of stock items.
//!
//! Each item's yearly monetary value is its annual demand times its unit
//! price. Items are ranked by that value in descending order, annotated
//! with relative and cumulative shares of the total, and split into the
//! classic priority bands: A up to the first cut (default 80% of value),
//! B up to the second (default 95%), C for the rest.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AbcError {
    /// Every item had zero monetary value, so no ranking exists.
    #[error("empty ranking: no item has positive monetary value")]
    EmptyRanking,
    /// Negative demand or price.
    #[error("invalid item {item_id:?}: demand and price must be nonnegative")]
    InvalidItem { item_id: String },
    /// Input to classification violated the ranking contract.
    #[error("ranking contract violated: {0}")]
    ContractViolation(String),
}

/// An item's yearly monetary footprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemValue {
    pub item_id: String,
    pub annual_demand: f64,
    pub unit_price: f64,
    pub monetary_value: f64,
}

impl ItemValue {
    pub fn new(
        item_id: impl Into<String>,
        annual_demand: f64,
        unit_price: f64,
    ) -> Result<Self, AbcError> {
        let item_id = item_id.into();
        let nonnegative = |v: f64| v >= 0.0 && v.is_finite();
        if !nonnegative(annual_demand) || !nonnegative(unit_price) {
            return Err(AbcError::InvalidItem { item_id });
        }
        Ok(ItemValue {
            monetary_value: annual_demand * unit_price,
            item_id,
            annual_demand,
            unit_price,
        })
    }
}

/// Priority band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbcClass {
    A,
    B,
    C,
}

/// One ranked row: the item plus its share of total value. `class_band`
/// is `None` until [`classify_abc`] assigns it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcEntry {
    pub item: ItemValue,
    pub relative_pct: f64,
    pub cumulative_pct: f64,
    pub class_band: Option<AbcClass>,
}

/// Cumulative-share cut points for the A/B/C bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcThresholds {
    pub a_cut: f64,
    pub b_cut: f64,
}

impl AbcThresholds {
    pub fn new(a_cut: f64, b_cut: f64) -> Result<Self, AbcError> {
        let ordered = 0.0 < a_cut && a_cut < b_cut && b_cut <= 1.0;
        if !ordered {
            return Err(AbcError::ContractViolation(format!(
                "thresholds must satisfy 0 < a_cut < b_cut <= 1, got {a_cut}/{b_cut}"
            )));
        }
        Ok(AbcThresholds { a_cut, b_cut })
    }
}

impl Default for AbcThresholds {
    fn default() -> Self {
        AbcThresholds {
            a_cut: 0.80,
            b_cut: 0.95,
        }
    }
}

/// A classified ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcReport {
    pub entries: Vec<AbcEntry>,
    pub thresholds: AbcThresholds,
    pub total_value: f64,
}

impl AbcReport {
    /// Items per band, in A, B, C order.
    pub fn band_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for e in &self.entries {
            match e.class_band {
                Some(AbcClass::A) => counts.0 += 1,
                Some(AbcClass::B) => counts.1 += 1,
                Some(AbcClass::C) | None => counts.2 += 1,
            }
        }
        counts
    }
}

/// Rank items by monetary value, descending, with ties broken by item id
/// for reproducible reports. Relative and cumulative shares are computed
/// from running value sums so the last entry lands exactly on 1.
pub fn monetary_ranking(items: Vec<ItemValue>) -> Result<Vec<AbcEntry>, AbcError> {
    let total: f64 = items.iter().map(|i| i.monetary_value).sum();
    if total <= 0.0 || total.is_nan() {
        return Err(AbcError::EmptyRanking);
    }
    let mut items = items;
    items.sort_by(|a, b| {
        b.monetary_value
            .partial_cmp(&a.monetary_value)
            .expect("monetary values are finite")
            .then_with(|| a.item_id.cmp(&b.item_id))
    });

    let mut running = 0.0;
    let entries = items
        .into_iter()
        .map(|item| {
            running += item.monetary_value;
            AbcEntry {
                relative_pct: item.monetary_value / total,
                cumulative_pct: running / total,
                item,
                class_band: None,
            }
        })
        .collect();
    Ok(entries)
}

/// Assign bands down a ranking.
///
/// An item belongs to A when the cumulative share *before* it is still
/// below `a_cut`; this puts the item that straddles the cut in the lower
/// band and guarantees A is nonempty. Same rule at the B/C border.
/// Zero-value items are always C.
pub fn classify_abc(
    ranking: Vec<AbcEntry>,
    thresholds: AbcThresholds,
) -> Result<AbcReport, AbcError> {
    if ranking.is_empty() {
        return Err(AbcError::EmptyRanking);
    }
    for pair in ranking.windows(2) {
        if pair[0].item.monetary_value < pair[1].item.monetary_value {
            return Err(AbcError::ContractViolation(
                "entries not sorted by monetary value descending".into(),
            ));
        }
        if pair[0].cumulative_pct > pair[1].cumulative_pct {
            return Err(AbcError::ContractViolation(
                "cumulative percentages not nondecreasing".into(),
            ));
        }
    }
    let last = ranking.last().expect("nonempty");
    if (last.cumulative_pct - 1.0).abs() > 1e-9 {
        return Err(AbcError::ContractViolation(format!(
            "final cumulative share is {}, expected 1",
            last.cumulative_pct
        )));
    }

    let total_value: f64 = ranking.iter().map(|e| e.item.monetary_value).sum();
    let mut prev_cum = 0.0;
    let entries = ranking
        .into_iter()
        .map(|mut e| {
            let band = if e.item.monetary_value <= 0.0 {
                AbcClass::C
            } else if prev_cum < thresholds.a_cut {
                AbcClass::A
            } else if prev_cum < thresholds.b_cut {
                AbcClass::B
            } else {
                AbcClass::C
            };
            e.class_band = Some(band);
            prev_cum = e.cumulative_pct;
            e
        })
        .collect();

    Ok(AbcReport {
        entries,
        thresholds,
        total_value,
    })
}

/// Points of the cumulative-value curve: rank fraction on the x axis,
/// cumulative share on the y axis, from (0,0) to (1,1). Concave because
/// the ranking is sorted descending.
pub fn abc_curve_points(ranking: &[AbcEntry]) -> Vec<(f64, f64)> {
    let n = ranking.len() as f64;
    let mut points = Vec::with_capacity(ranking.len() + 1);
    points.push((0.0, 0.0));
    for (i, e) in ranking.iter().enumerate() {
        points.push(((i + 1) as f64 / n, e.cumulative_pct));
    }
    points
}

/// CSV mirroring the ranking-table layout; shares rendered as percentages
/// with two decimals.
pub fn report_to_csv(report: &AbcReport) -> String {
    let mut out = String::from(
        "item_id,annual_demand,unit_price,monetary_value,relative_pct,cumulative_pct,class\n",
    );
    for e in &report.entries {
        out.push_str(&format!(
            "{},{},{},{},{:.2}%,{:.2}%,{}\n",
            e.item.item_id,
            crate::ledger::format_decimal(e.item.annual_demand),
            crate::ledger::format_decimal(e.item.unit_price),
            crate::ledger::format_decimal(e.item.monetary_value),
            e.relative_pct * 100.0,
            e.cumulative_pct * 100.0,
            match e.class_band {
                Some(AbcClass::A) => "A",
                Some(AbcClass::B) => "B",
                Some(AbcClass::C) => "C",
                None => "",
            }
        ));
    }
    out
}

/// Curve export as `rank_fraction,cumulative_pct` pairs.
pub fn curve_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("rank_fraction,cumulative_pct\n");
    for (x, y) in points {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}
