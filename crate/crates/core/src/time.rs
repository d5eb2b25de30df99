//! Simulation time as integer ticks.
//!
//! One time unit is 10^9 ticks, so arrival and holding times round-trip
//! exactly through the trace file format (decimal fixed point with nine
//! fractional digits) and event ordering never depends on float comparison.

/// Simulation timestamp or duration, in ticks.
pub type SimTime = u64;

/// Ticks per workload time unit.
pub const TICKS_PER_UNIT: u64 = 1_000_000_000;

/// Converts a non-negative duration in time units to ticks, rounding to nearest.
pub fn units_to_ticks(units: f64) -> SimTime {
    debug_assert!(units >= 0.0 && units.is_finite());
    (units * TICKS_PER_UNIT as f64).round() as SimTime
}

/// Ticks as fractional time units. Lossy; for statistics and display only.
pub fn ticks_to_units(ticks: SimTime) -> f64 {
    ticks as f64 / TICKS_PER_UNIT as f64
}

/// Formats ticks as fixed-point decimal with nine fractional digits.
pub fn format_time(ticks: SimTime) -> String {
    format!("{}.{:09}", ticks / TICKS_PER_UNIT, ticks % TICKS_PER_UNIT)
}

/// Parses the fixed-point representation produced by [`format_time`].
///
/// A bare integer is accepted and taken as whole time units.
pub fn parse_time(text: &str) -> Option<SimTime> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() || frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let units: u64 = whole.parse().ok()?;
    let mut sub = 0u64;
    if !frac.is_empty() {
        sub = frac.parse().ok()?;
        sub *= 10u64.pow(9 - frac.len() as u32);
    }
    units.checked_mul(TICKS_PER_UNIT)?.checked_add(sub)
}
