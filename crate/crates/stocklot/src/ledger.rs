//! Movement-ledger ingestion and per-item stock timelines.
//!
//! A ledger is a flat list of dated entry/exit movements per item. From it
//! this module reconstructs the on-hand level of an item over time as a
//! right-continuous step function at day granularity, and computes the
//! aggregates downstream modules need: time-weighted average inventory,
//! integrated stock area (unit·days) and replenishment-order counts.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors produced while parsing or querying a ledger.
#[derive(Debug, Error)]
pub enum LedgerError {
    /// Input contained no movement rows at all.
    #[error("empty ledger: input contains no movement rows")]
    EmptyLedger,
    /// A single row could not be parsed; `line` is 1-based.
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    /// The requested item has no movements in the period and no initial
    /// level was supplied.
    #[error("item not found: no movements for {item_id:?} in the requested period")]
    ItemNotFound { item_id: String },
    /// A period with zero or negative day count was used where a positive
    /// span is required.
    #[error("degenerate period: span must cover at least one day")]
    DegeneratePeriod,
}

impl LedgerError {
    fn row(line: usize, message: impl Into<String>) -> Self {
        LedgerError::Row {
            line,
            message: message.into(),
        }
    }
}

/// Whether a movement brings stock in or takes it out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Entry,
    Exit,
}

impl Direction {
    /// Single-letter movement code used by the ledger file format.
    pub fn code(self) -> &'static str {
        match self {
            Direction::Entry => "E",
            Direction::Exit => "S",
        }
    }
}

/// Which quantity column drives a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitBasis {
    Units,
    Kg,
}

/// One ledger row: a dated, signed stock movement of a single item.
///
/// Sign convention: entries carry positive quantities, exits negative.
/// The kilogram column is auxiliary data; it is never cross-validated
/// against the unit column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Movement {
    pub item_id: String,
    pub direction: Direction,
    pub date: NaiveDate,
    pub qty_units: i64,
    pub qty_kg: Option<f64>,
}

impl Movement {
    /// Signed quantity on the requested basis. A missing kg value counts
    /// as zero on the kg basis.
    pub fn signed_qty(&self, basis: UnitBasis) -> f64 {
        match basis {
            UnitBasis::Units => self.qty_units as f64,
            UnitBasis::Kg => self.qty_kg.unwrap_or(0.0),
        }
    }
}

/// Inclusive calendar-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        DateRange { start, end }
    }

    /// Whole calendar year as a range.
    pub fn year(year: i32) -> Self {
        DateRange {
            start: NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year"),
            end: NaiveDate::from_ymd_opt(year, 12, 31).expect("valid year"),
        }
    }

    /// Number of days covered, counting both endpoints. Non-positive when
    /// `end` precedes `start`.
    pub fn days(&self) -> i64 {
        (self.end - self.start).num_days() + 1
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        date >= self.start && date <= self.end
    }
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// A parsed ledger: movements stably sorted by `(item_id, date)` with the
/// original input order preserved among ties, plus the period they span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovementLedger {
    pub movements: Vec<Movement>,
    pub period: DateRange,
}

impl MovementLedger {
    /// Distinct item ids in ledger order (sorted, deduplicated).
    pub fn item_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.movements.iter().map(|m| m.item_id.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Movements of one item, in (date, input-order) order.
    pub fn movements_for<'a>(&'a self, item_id: &'a str) -> impl Iterator<Item = &'a Movement> {
        self.movements.iter().filter(move |m| m.item_id == item_id)
    }
}

/// A non-fatal observation recorded while parsing (e.g. a repaired sign).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

/// Result of [`parse_ledger`]: the ledger plus any repair warnings.
#[derive(Debug, Clone, Serialize)]
pub struct ParsedLedger {
    pub ledger: MovementLedger,
    pub warnings: Vec<ParseWarning>,
}

/// Header handling for ledger files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Treat the first row as a header when its date column does not parse.
    #[default]
    Auto,
    Present,
    Absent,
}

/// Shape of the delimiter-separated ledger file.
///
/// The default matches the source layout: `;`-separated columns
/// (item, movement code `E`/`S`, date `DD/MM/YYYY`, units, kilograms)
/// with comma decimal separators.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatConfig {
    pub delimiter: char,
    /// chrono-style date pattern, e.g. `%d/%m/%Y`.
    pub date_format: String,
    /// Accept `,` as the decimal separator in the kg column.
    pub decimal_comma: bool,
    pub header: HeaderMode,
}

impl Default for FormatConfig {
    fn default() -> Self {
        FormatConfig {
            delimiter: ';',
            date_format: "%d/%m/%Y".to_string(),
            decimal_comma: true,
            header: HeaderMode::Auto,
        }
    }
}

impl FormatConfig {
    /// Layout produced by [`ledger_to_csv`]: comma-separated, ISO-8601
    /// dates, dot decimals.
    pub fn normalized() -> Self {
        FormatConfig {
            delimiter: ',',
            date_format: "%Y-%m-%d".to_string(),
            decimal_comma: false,
            header: HeaderMode::Present,
        }
    }
}

/// Parse a delimiter-separated movement ledger.
///
/// Rows whose quantity sign contradicts the movement code are repaired to
/// the code's sign and reported in the warnings list. Malformed rows abort
/// the parse with the offending 1-based line number.
pub fn parse_ledger(text: &str, config: &FormatConfig) -> Result<ParsedLedger, LedgerError> {
    let mut movements = Vec::new();
    let mut warnings = Vec::new();
    let mut first_data_row = true;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if first_data_row {
            let skip = match config.header {
                HeaderMode::Present => true,
                HeaderMode::Absent => false,
                HeaderMode::Auto => looks_like_header(line, config),
            };
            first_data_row = false;
            if skip {
                continue;
            }
        }
        let mut mv = parse_row(line, line_no, config)?;
        if let Some(msg) = repair_signs(&mut mv) {
            warnings.push(ParseWarning {
                line: line_no,
                message: msg,
            });
        }
        movements.push(mv);
    }

    if movements.is_empty() {
        return Err(LedgerError::EmptyLedger);
    }

    let start = movements.iter().map(|m| m.date).min().expect("nonempty");
    let end = movements.iter().map(|m| m.date).max().expect("nonempty");
    // Stable sort keeps same-date rows in input order.
    movements.sort_by(|a, b| a.item_id.cmp(&b.item_id).then(a.date.cmp(&b.date)));

    Ok(ParsedLedger {
        ledger: MovementLedger {
            movements,
            period: DateRange::new(start, end),
        },
        warnings,
    })
}

fn looks_like_header(line: &str, config: &FormatConfig) -> bool {
    let fields: Vec<&str> = line.split(config.delimiter).collect();
    match fields.get(2) {
        Some(f) => NaiveDate::parse_from_str(f.trim(), &config.date_format).is_err(),
        None => true,
    }
}

fn parse_row(line: &str, line_no: usize, config: &FormatConfig) -> Result<Movement, LedgerError> {
    let fields: Vec<&str> = line.split(config.delimiter).map(str::trim).collect();
    if fields.len() < 4 || fields.len() > 5 {
        return Err(LedgerError::row(
            line_no,
            format!("expected 4 or 5 fields, found {}", fields.len()),
        ));
    }

    let item_id = fields[0].to_string();
    if item_id.is_empty() {
        return Err(LedgerError::row(line_no, "empty item name"));
    }

    let direction = match fields[1] {
        "E" | "e" => Direction::Entry,
        "S" | "s" => Direction::Exit,
        other => {
            return Err(LedgerError::row(
                line_no,
                format!("unknown movement code {other:?} (expected E or S)"),
            ))
        }
    };

    let date = NaiveDate::parse_from_str(fields[2], &config.date_format).map_err(|_| {
        LedgerError::row(
            line_no,
            format!(
                "malformed date {:?} (expected {})",
                fields[2], config.date_format
            ),
        )
    })?;

    let qty_units: i64 = fields[3]
        .parse()
        .map_err(|_| LedgerError::row(line_no, format!("non-numeric quantity {:?}", fields[3])))?;
    if qty_units == 0 {
        return Err(LedgerError::row(line_no, "zero quantity"));
    }

    let qty_kg =
        match fields.get(4) {
            None => None,
            Some(&"") => None,
            Some(f) => {
                let normalized = if config.decimal_comma {
                    f.replace(',', ".")
                } else {
                    (*f).to_string()
                };
                Some(normalized.parse::<f64>().map_err(|_| {
                    LedgerError::row(line_no, format!("non-numeric kg quantity {f:?}"))
                })?)
            }
        };

    Ok(Movement {
        item_id,
        direction,
        date,
        qty_units,
        qty_kg,
    })
}

/// The movement code is authoritative: flip quantities whose sign
/// disagrees with it. Returns a warning message when a repair happened.
fn repair_signs(mv: &mut Movement) -> Option<String> {
    let want_positive = mv.direction == Direction::Entry;
    let mut repaired = false;
    if (mv.qty_units > 0) != want_positive {
        mv.qty_units = -mv.qty_units;
        repaired = true;
    }
    if let Some(kg) = mv.qty_kg {
        if kg != 0.0 && (kg > 0.0) != want_positive {
            mv.qty_kg = Some(-kg);
            repaired = true;
        }
    }
    repaired.then(|| {
        format!(
            "quantity sign repaired to match movement code {}",
            mv.direction.code()
        )
    })
}

/// One step of a stock timeline: the on-hand level at end of `date`,
/// held until the next point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub date: NaiveDate,
    pub level: f64,
}

/// On-hand stock of one item over a period, as a right-continuous step
/// function at day granularity. Levels may go negative (physical/book
/// mismatches happen in real ledgers); [`StockTimeline::has_negative_level`]
/// flags that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockTimeline {
    pub item_id: String,
    pub points: Vec<TimelinePoint>,
    pub period: DateRange,
    pub unit_basis: UnitBasis,
}

impl StockTimeline {
    /// Level in effect at end of `date` (the last point at or before it).
    pub fn level_at(&self, date: NaiveDate) -> f64 {
        let mut level = self.points[0].level;
        for p in &self.points {
            if p.date > date {
                break;
            }
            level = p.level;
        }
        level
    }

    pub fn final_level(&self) -> f64 {
        self.points.last().map(|p| p.level).unwrap_or(0.0)
    }

    /// True when any segment of the step function dips below zero.
    pub fn has_negative_level(&self) -> bool {
        self.points.iter().any(|p| p.level < 0.0)
    }
}

/// Reconstruct the stock timeline of one item over `period`.
///
/// The level at any date is `initial_level` plus all signed movement
/// quantities dated at or before it. Same-date movements are netted, so
/// end-of-day levels do not depend on intraday order. When the item has no
/// movement in the period, an explicit `initial_level` is required and the
/// timeline is constant.
pub fn stock_timeline(
    ledger: &MovementLedger,
    item_id: &str,
    period: DateRange,
    initial_level: Option<f64>,
    unit_basis: UnitBasis,
) -> Result<StockTimeline, LedgerError> {
    let mut by_date: BTreeMap<NaiveDate, f64> = BTreeMap::new();
    for mv in ledger.movements_for(item_id) {
        if period.contains(mv.date) {
            *by_date.entry(mv.date).or_insert(0.0) += mv.signed_qty(unit_basis);
        }
    }
    if by_date.is_empty() && initial_level.is_none() {
        return Err(LedgerError::ItemNotFound {
            item_id: item_id.to_string(),
        });
    }

    let initial = initial_level.unwrap_or(0.0);
    let mut points = Vec::with_capacity(by_date.len() + 1);
    if by_date.keys().next() != Some(&period.start) {
        points.push(TimelinePoint {
            date: period.start,
            level: initial,
        });
    }
    let mut level = initial;
    for (date, net) in by_date {
        level += net;
        points.push(TimelinePoint { date, level });
    }

    Ok(StockTimeline {
        item_id: item_id.to_string(),
        points,
        period,
        unit_basis,
    })
}

/// Time-weighted mean of the step function over its period.
pub fn average_inventory(timeline: &StockTimeline) -> Result<f64, LedgerError> {
    let days = timeline.period.days();
    if days <= 0 {
        return Err(LedgerError::DegeneratePeriod);
    }
    Ok(integrated_stock_area(timeline)? / days as f64)
}

/// Area under the step function in unit·days: each constant segment
/// contributes `level × day count`. Negative segments contribute
/// negatively; callers can check [`StockTimeline::has_negative_level`].
pub fn integrated_stock_area(timeline: &StockTimeline) -> Result<f64, LedgerError> {
    if timeline.period.days() <= 0 {
        return Err(LedgerError::DegeneratePeriod);
    }
    let mut area = 0.0;
    for (i, p) in timeline.points.iter().enumerate() {
        let seg_days = match timeline.points.get(i + 1) {
            Some(next) => (next.date - p.date).num_days(),
            None => (timeline.period.end - p.date).num_days() + 1,
        };
        area += p.level * seg_days as f64;
    }
    Ok(area)
}

/// Number of entry movements of `item_id` inside `period`; each entry row
/// counts as one replenishment order. Absent items yield zero.
pub fn order_count(ledger: &MovementLedger, item_id: &str, period: DateRange) -> usize {
    ledger
        .movements_for(item_id)
        .filter(|m| m.direction == Direction::Entry && period.contains(m.date))
        .count()
}

/// Normalized CSV export: comma-separated, ISO-8601 dates, dot decimals.
/// Round-trips through [`parse_ledger`] with [`FormatConfig::normalized`].
pub fn ledger_to_csv(ledger: &MovementLedger) -> String {
    let mut out = String::from("item_id,direction,date,qty_units,qty_kg\n");
    for m in &ledger.movements {
        let kg = m.qty_kg.map(format_decimal).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            m.item_id,
            m.direction.code(),
            m.date,
            m.qty_units,
            kg
        ));
    }
    out
}

/// Timeline export as `date,level` pairs (ISO dates, dot decimals).
pub fn timeline_to_csv(timeline: &StockTimeline) -> String {
    let mut out = String::from("date,level\n");
    for p in &timeline.points {
        out.push_str(&format!("{},{}\n", p.date, format_decimal(p.level)));
    }
    out
}

/// Shortest decimal form that round-trips, without scientific notation
/// for the magnitudes a ledger produces.
pub(crate) fn format_decimal(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}
