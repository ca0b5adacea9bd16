//! Daily and cumulative ban counts for the engine and the official source.

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BanCycleRow {
    pub date: NaiveDate,
    pub engine_daily: u64,
    pub engine_cumulative: u64,
    pub official_daily: u64,
    pub official_cumulative: u64,
}

/// One row per UTC day from the first to the last event, inclusive.
pub fn ban_cycle_report(engine: &[DateTime<Utc>], official: &[DateTime<Utc>]) -> Vec<BanCycleRow> {
    let days = |v: &[DateTime<Utc>]| v.iter().map(|d| d.date_naive()).collect::<Vec<_>>();
    let e = days(engine);
    let o = days(official);
    let Some(first) = e.iter().chain(&o).min().copied() else {
        return Vec::new();
    };
    let last = e.iter().chain(&o).max().copied().unwrap_or(first);
    let mut rows = Vec::new();
    let (mut ec, mut oc) = (0, 0);
    let mut day = first;
    while day <= last {
        let ed = e.iter().filter(|d| **d == day).count() as u64;
        let od = o.iter().filter(|d| **d == day).count() as u64;
        ec += ed;
        oc += od;
        rows.push(BanCycleRow {
            date: day,
            engine_daily: ed,
            engine_cumulative: ec,
            official_daily: od,
            official_cumulative: oc,
        });
        day = day.succ_opt().unwrap_or(day);
        if day == last && rows.last().map(|r| r.date) == Some(last) {
            break;
        }
    }
    rows
}

pub fn ban_cycle_csv(rows: &[BanCycleRow]) -> String {
    let mut out = String::from("date,engineDaily,engineCumulative,officialDaily,officialCumulative\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.date, r.engine_daily, r.engine_cumulative, r.official_daily, r.official_cumulative
        ));
    }
    out
}
