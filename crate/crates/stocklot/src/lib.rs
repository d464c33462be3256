//! Inventory policy analysis toolkit.
//!
//! The crate ingests stock-movement ledgers and answers the three classic
//! stock-control questions: how much to order, when to order, and what the
//! policy costs. It is organized around five building blocks:
//!
//! - [`ledger`] — movement parsing, per-item stock timelines, and the
//!   time-weighted aggregates (average inventory, stock area, order counts)
//!   every other module consumes.
//! - [`abc`] — monetary-value ranking and A/B/C banding of items.
//! - [`demand`] — demand-rate estimation, consumption-curve linearity
//!   checks, movement-pattern detection, and lead-time demand statistics.
//! - [`policy`] — the cost model, economic order quantity, (Q,R) lot and
//!   service-level reorder point, unit-cost derivation, and historical
//!   comparison.
//! - [`simulate`] — replay of a (Q,R)-style policy against historical daily
//!   demand to measure realized cost and service.
//!
//! All types are plain immutable data and all operations are pure functions,
//! so everything here is safe to share across threads.

pub mod abc;
pub mod demand;
pub mod ledger;
pub mod policy;
pub mod simulate;
