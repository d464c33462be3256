//! The six subcommands. Each one computes every report in memory and
//! returns `(file name, contents)` pairs; nothing touches the disk until
//! the whole command has succeeded, so failed runs leave no partial files.

use crate::config::Config;
use crate::CliError;
use serde::Serialize;
use stocklot::abc::{
    abc_curve_points, classify_abc, curve_to_csv, monetary_ranking, report_to_csv, AbcThresholds,
    ItemValue,
};
use stocklot::demand::{
    constancy_metric, consumption_curve, curve_to_csv as consumption_csv, demand_stats,
    detect_pattern, lead_time_demand, DemandError, DemandStats, LeadTimeDemand, Pattern,
    PatternConfig,
};
use stocklot::ledger::{
    average_inventory, integrated_stock_area, ledger_to_csv, order_count, stock_timeline,
    timeline_to_csv, DateRange, MovementLedger, UnitBasis,
};
use stocklot::policy::{
    compare_policies, cost_curve, cost_curve_to_csv, eoq, historical_cost, lec_policy, qr_policy,
    render_comparison_table, round_lot, unit_costs, AggregateExpenses, CostParams,
    PolicyComparison, PolicyResult, REORDER_MODEL_NOTE,
};
use stocklot::simulate::{
    extract_daily_demand, replay_traced, trace_to_csv, PolicySpec, SimulationReport,
};

/// Everything a command needs: the parsed ledger, the run configuration
/// and the resolved output options.
pub struct Ctx {
    pub ledger: MovementLedger,
    pub year: i32,
    pub config: Config,
    pub basis: UnitBasis,
    /// Daily-rate divisor (default 365, leap years included).
    pub year_days: u32,
    /// Display rounding for lot sizes; 0 disables.
    pub round_to: u32,
    pub emit_json: bool,
    pub emit_csv: bool,
}

pub type Outputs = Vec<(String, String)>;

impl Ctx {
    fn year_range(&self) -> DateRange {
        DateRange::year(self.year)
    }

    fn initial_level(&self, item: &str) -> Result<f64, CliError> {
        Ok(self.config.item_f64("initial_level", item)?.unwrap_or(0.0))
    }

    fn demand(&self, item: &str) -> DemandStats {
        demand_stats(&self.ledger, item, self.year, self.basis, self.year_days)
    }

    fn require_item_in_year(&self, item: &str) -> Result<(), CliError> {
        let range = self.year_range();
        if self
            .ledger
            .movements_for(item)
            .any(|m| range.contains(m.date))
        {
            Ok(())
        } else {
            Err(CliError::missing_data(format!(
                "item {item:?} has no movements in {}",
                self.year
            )))
        }
    }

    /// Stock areas and order events summed over every item, for deriving
    /// unit costs from aggregate expenses.
    fn ledger_aggregates(&self) -> Result<(f64, u64), CliError> {
        let range = self.year_range();
        let mut area_total = 0.0;
        let mut events = 0u64;
        for item in self.ledger.item_ids() {
            let initial = self.initial_level(&item)?;
            if let Ok(tl) = stock_timeline(&self.ledger, &item, range, Some(initial), self.basis) {
                area_total += integrated_stock_area(&tl)?;
            }
            events += order_count(&self.ledger, &item, range) as u64;
        }
        Ok((area_total, events))
    }

    /// Resolve the cost parameters of one item: explicit config values
    /// first (item-scoped, then global), otherwise derived from aggregate
    /// yearly expenses and the ledger's stock areas and order counts.
    fn resolve_costs(&self, item: &str) -> Result<CostParams, CliError> {
        let params = self.resolve_costs_any_demand(item)?;
        if params.annual_demand <= 0.0 {
            return Err(CliError::missing_data(format!(
                "item {item:?} has no exit movements in {}; demand is zero",
                self.year
            )));
        }
        Ok(params)
    }

    /// Like [`Ctx::resolve_costs`] but tolerates zero demand, for replays
    /// with an explicitly given policy.
    fn resolve_costs_any_demand(&self, item: &str) -> Result<CostParams, CliError> {
        let stats = self.demand(item);

        let mut holding = self.config.item_f64("cm", item)?;
        let mut ordering = self.config.item_f64("cp", item)?;
        if holding.is_none() || ordering.is_none() {
            let storage_total = self.config.f64("cm_total")?;
            let ordering_total = self.config.f64("cp_total")?;
            if storage_total.is_some() || ordering_total.is_some() {
                let (ledger_area, ledger_events) = self.ledger_aggregates()?;
                let expenses = AggregateExpenses {
                    storage_total: storage_total.unwrap_or(0.0),
                    ordering_total: ordering_total.unwrap_or(0.0),
                    stock_area_unit_days: self.config.f64("a_t")?.unwrap_or(ledger_area),
                    order_events: self
                        .config
                        .f64("e_t")?
                        .map(|v| v as u64)
                        .unwrap_or(ledger_events),
                };
                let derived = unit_costs(&expenses)?;
                if holding.is_none() && storage_total.is_some() {
                    holding = Some(derived.holding_per_unit_year);
                }
                if ordering.is_none() && ordering_total.is_some() {
                    ordering = Some(derived.ordering_per_order);
                }
            }
        }
        let holding = holding.ok_or_else(|| {
            CliError::missing_data(format!(
                "no holding cost for {item:?}: set `cm` (or `cm.{item}`) or `cm_total` in the config"
            ))
        })?;
        let ordering = ordering.ok_or_else(|| {
            CliError::missing_data(format!(
                "no ordering cost for {item:?}: set `cp` (or `cp.{item}`) or `cp_total` in the config"
            ))
        })?;
        let lead_time_days = self
            .config
            .item_u32("lead_time_days", item)?
            .ok_or_else(|| {
                CliError::missing_data(format!(
                    "no lead time for {item:?}: set `lead_time_days` in the config"
                ))
            })?;

        Ok(CostParams {
            annual_demand: stats.annual_demand,
            unit_price: self.config.item_f64("price", item)?.unwrap_or(0.0),
            holding_cost: holding,
            ordering_cost: ordering,
            shortage_cost: self.config.item_f64("cf", item)?,
            lead_time_days,
        })
    }

    fn measured_lead_time_demand(
        &self,
        item: &str,
        window_days: u32,
    ) -> Result<LeadTimeDemand, CliError> {
        Ok(lead_time_demand(
            &self.ledger,
            item,
            self.year,
            window_days,
            self.basis,
        )?)
    }

    fn pattern_config(&self) -> Result<PatternConfig, CliError> {
        Ok(PatternConfig {
            jit_dwell_days: self.config.f64_or("jit_dwell_days", 3.0)?,
            pathology_factor: self.config.f64_or("pathology_factor", 2.0)?,
        })
    }
}

/// File-name-safe form of an item id.
fn slug(item: &str) -> String {
    item.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::internal(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------------------
// abc
// ---------------------------------------------------------------------------

pub fn cmd_abc(ctx: &Ctx, thresholds: AbcThresholds) -> Result<Outputs, CliError> {
    let mut items = Vec::new();
    let mut missing_prices = Vec::new();
    for item_id in ctx.ledger.item_ids() {
        let demand = ctx.demand(&item_id).annual_demand;
        let price = ctx.config.item_f64("price", &item_id)?;
        match price {
            Some(p) => items.push(ItemValue::new(item_id, demand, p)?),
            None if demand > 0.0 => missing_prices.push(item_id),
            None => items.push(ItemValue::new(item_id, demand, 0.0)?),
        }
    }
    if !missing_prices.is_empty() {
        return Err(CliError::missing_data(format!(
            "no unit price configured for items with demand: {}",
            missing_prices.join(", ")
        )));
    }

    let ranking = monetary_ranking(items)?;
    let curve = abc_curve_points(&ranking);
    let report = classify_abc(ranking, thresholds)?;

    let mut out = Outputs::new();
    if ctx.emit_csv {
        out.push(("abc_report.csv".into(), report_to_csv(&report)));
        out.push(("abc_curve.csv".into(), curve_to_csv(&curve)));
    }
    if ctx.emit_json {
        out.push(("abc_report.json".into(), to_json(&report)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Diagnostics {
    item_id: String,
    year: i32,
    demand: DemandStats,
    constancy_metric: Option<f64>,
    pattern: Pattern,
    lead_time_demand: Option<LeadTimeDemand>,
    warnings: Vec<String>,
}

pub fn cmd_analyze(ctx: &Ctx, item: &str) -> Result<Outputs, CliError> {
    ctx.require_item_in_year(item)?;
    let mut warnings = Vec::new();

    let stats = ctx.demand(item);
    if stats.annual_demand <= 0.0 {
        warnings.push(format!("zero demand: no exit movements in {}", ctx.year));
    }

    let initial = ctx.initial_level(item)?;
    let timeline = stock_timeline(
        &ctx.ledger,
        item,
        ctx.year_range(),
        Some(initial),
        ctx.basis,
    )?;
    if timeline.has_negative_level() {
        warnings.push("stock level goes negative; physical and book stock disagree".into());
    }

    let curve = consumption_curve(&ctx.ledger, item, ctx.year, ctx.basis)?;
    let metric = match constancy_metric(&curve) {
        Ok(m) => Some(m),
        Err(e @ (DemandError::UndefinedMetric | DemandError::TooFewPoints)) => {
            warnings.push(format!("constancy metric unavailable: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };

    let pattern = detect_pattern(&timeline, &curve, &ctx.pattern_config()?);

    let ltd = match ctx.config.item_u32("lead_time_days", item)? {
        Some(w) if w >= 1 => match ctx.measured_lead_time_demand(item, w) {
            Ok(ltd) => Some(ltd),
            Err(e) => {
                warnings.push(format!("lead-time demand unavailable: {}", e.message));
                None
            }
        },
        _ => {
            warnings.push("lead_time_days not configured; lead-time demand skipped".into());
            None
        }
    };

    let diagnostics = Diagnostics {
        item_id: item.to_string(),
        year: ctx.year,
        demand: stats,
        constancy_metric: metric,
        pattern,
        lead_time_demand: ltd,
        warnings,
    };

    let s = slug(item);
    let mut out = Outputs::new();
    if ctx.emit_csv {
        out.push((format!("{s}_timeline.csv"), timeline_to_csv(&timeline)));
        out.push((format!("{s}_consumption.csv"), consumption_csv(&curve)));
    }
    if ctx.emit_json {
        out.push((format!("{s}_timeline.json"), to_json(&timeline)?));
        out.push((format!("{s}_diagnostics.json"), to_json(&diagnostics)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// eoq / qr / compare
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PolicyReport {
    item_id: String,
    year: i32,
    params: CostParams,
    daily_rate: f64,
    policy: PolicyResult,
    /// Lot size rounded for display (`round_to` config, `--no-round` off).
    display_lot_size: f64,
    lead_time_demand: Option<LeadTimeDemand>,
    notes: Vec<String>,
}

fn cost_curve_csv_for(params: &CostParams) -> Result<String, CliError> {
    let q_star = eoq(params)?;
    let points = cost_curve(params, (q_star * 0.2).max(1.0), q_star * 3.0, 121)?;
    Ok(cost_curve_to_csv(&points))
}

pub fn cmd_eoq(ctx: &Ctx, item: &str) -> Result<Outputs, CliError> {
    let params = ctx.resolve_costs(item)?;
    let stats = ctx.demand(item);
    let policy = lec_policy(&params, stats.daily_rate)?;
    let report = PolicyReport {
        item_id: item.to_string(),
        year: ctx.year,
        daily_rate: stats.daily_rate,
        display_lot_size: round_lot(policy.lot_size, ctx.round_to),
        policy,
        params: params.clone(),
        lead_time_demand: None,
        notes: Vec::new(),
    };

    let s = slug(item);
    let mut out = Outputs::new();
    if ctx.emit_json {
        out.push((format!("{s}_eoq.json"), to_json(&report)?));
    }
    if ctx.emit_csv {
        out.push((format!("{s}_cost_curve.csv"), cost_curve_csv_for(&params)?));
    }
    Ok(out)
}

pub fn cmd_qr(ctx: &Ctx, item: &str, service_level: f64) -> Result<Outputs, CliError> {
    let params = ctx.resolve_costs(item)?;
    if params.shortage_cost.is_none() {
        return Err(CliError::missing_data(format!(
            "no shortage cost for {item:?}: the (Q,R) model needs `cf` (or `cf.{item}`) in the config"
        )));
    }
    let ltd = ctx.measured_lead_time_demand(item, params.lead_time_days.max(1))?;
    let policy = qr_policy(&params, &ltd, service_level)?;
    let report = PolicyReport {
        item_id: item.to_string(),
        year: ctx.year,
        daily_rate: ctx.demand(item).daily_rate,
        display_lot_size: round_lot(policy.lot_size, ctx.round_to),
        policy,
        params: params.clone(),
        lead_time_demand: Some(ltd),
        notes: vec![REORDER_MODEL_NOTE.to_string()],
    };

    let s = slug(item);
    let mut out = Outputs::new();
    if ctx.emit_json {
        out.push((format!("{s}_qr.json"), to_json(&report)?));
    }
    if ctx.emit_csv {
        out.push((format!("{s}_cost_curve.csv"), cost_curve_csv_for(&params)?));
    }
    Ok(out)
}

#[derive(Serialize)]
struct DisplayLot {
    model: &'static str,
    lot_size: f64,
}

#[derive(Serialize)]
struct ComparisonReport {
    item_id: String,
    year: i32,
    params: CostParams,
    avg_inventory: f64,
    orders: usize,
    comparison: PolicyComparison,
    display_lots: Vec<DisplayLot>,
}

pub fn cmd_compare(ctx: &Ctx, item: &str, service_level: f64) -> Result<Outputs, CliError> {
    let params = ctx.resolve_costs(item)?;
    if params.shortage_cost.is_none() {
        return Err(CliError::missing_data(format!(
            "no shortage cost for {item:?}: the comparison needs `cf` (or `cf.{item}`) in the config"
        )));
    }
    let stats = ctx.demand(item);
    let lec = lec_policy(&params, stats.daily_rate)?;
    let ltd = ctx.measured_lead_time_demand(item, params.lead_time_days.max(1))?;
    let qr = qr_policy(&params, &ltd, service_level)?;

    let initial = ctx.initial_level(item)?;
    let timeline = stock_timeline(
        &ctx.ledger,
        item,
        ctx.year_range(),
        Some(initial),
        ctx.basis,
    )?;
    let avg = average_inventory(&timeline)?;
    let orders = order_count(&ctx.ledger, item, ctx.year_range());
    let historical = historical_cost(avg, orders, params.holding_cost, params.ordering_cost);

    let comparison = compare_policies(&lec, Some(&qr), historical);
    let table = render_comparison_table(&comparison, ctx.round_to);
    let report = ComparisonReport {
        item_id: item.to_string(),
        year: ctx.year,
        avg_inventory: avg,
        orders,
        display_lots: vec![
            DisplayLot {
                model: "LEC",
                lot_size: round_lot(lec.lot_size, ctx.round_to),
            },
            DisplayLot {
                model: "QR",
                lot_size: round_lot(qr.lot_size, ctx.round_to),
            },
        ],
        comparison,
        params: params.clone(),
    };

    let s = slug(item);
    let mut out = Outputs::new();
    if ctx.emit_json {
        out.push((format!("{s}_comparison.json"), to_json(&report)?));
    }
    out.push((format!("{s}_comparison.txt"), table));
    if ctx.emit_csv {
        out.push((format!("{s}_cost_curve.csv"), cost_curve_csv_for(&params)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyChoice {
    Lec,
    Qr,
}

#[derive(Serialize)]
struct SimulationEnvelope {
    item_id: String,
    year: i32,
    spec: PolicySpec,
    initial_level: f64,
    report: SimulationReport,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    ctx: &Ctx,
    item: &str,
    choice: PolicyChoice,
    lot_override: Option<f64>,
    reorder_override: Option<f64>,
    service_level: f64,
    trace: bool,
) -> Result<Outputs, CliError> {
    ctx.require_item_in_year(item)?;
    // A fully explicit policy needs no demand and no lot-sizing math,
    // so zero-demand items still produce a (trivial) report.
    let spec = match (lot_override, reorder_override) {
        (Some(lot_size), Some(reorder_point)) => {
            let params = ctx.resolve_costs_any_demand(item)?;
            PolicySpec {
                lot_size,
                reorder_point,
                lead_time_days: params.lead_time_days,
            }
        }
        _ => {
            let params = ctx.resolve_costs(item)?;
            let stats = ctx.demand(item);
            let policy = match choice {
                PolicyChoice::Lec => lec_policy(&params, stats.daily_rate)?,
                PolicyChoice::Qr => {
                    if params.shortage_cost.is_none() {
                        return Err(CliError::missing_data(format!(
                            "no shortage cost for {item:?}: simulating the (Q,R) policy needs `cf` in the config"
                        )));
                    }
                    let ltd = ctx.measured_lead_time_demand(item, params.lead_time_days.max(1))?;
                    qr_policy(&params, &ltd, service_level)?
                }
            };
            PolicySpec {
                lot_size: lot_override.unwrap_or(policy.lot_size),
                reorder_point: reorder_override.unwrap_or(policy.reorder_point),
                lead_time_days: params.lead_time_days,
            }
        }
    };
    let params = ctx.resolve_costs_any_demand(item)?;

    let daily = extract_daily_demand(&ctx.ledger, item, ctx.year, ctx.basis);
    let initial = ctx.initial_level(item)?;
    let (report, day_trace) = replay_traced(&daily, &spec, &params, initial);

    let envelope = SimulationEnvelope {
        item_id: item.to_string(),
        year: ctx.year,
        spec,
        initial_level: initial,
        report,
    };

    let s = slug(item);
    let mut out = Outputs::new();
    if ctx.emit_json {
        out.push((format!("{s}_simulation.json"), to_json(&envelope)?));
    }
    if trace && ctx.emit_csv {
        out.push((format!("{s}_trace.csv"), trace_to_csv(&day_trace)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// export (normalized ledger)
// ---------------------------------------------------------------------------

pub fn cmd_export(ctx: &Ctx) -> Result<Outputs, CliError> {
    let mut out = Outputs::new();
    if ctx.emit_csv {
        out.push(("ledger.csv".into(), ledger_to_csv(&ctx.ledger)));
    }
    if ctx.emit_json {
        out.push(("ledger.json".into(), to_json(&ctx.ledger)?));
    }
    Ok(out)
}
