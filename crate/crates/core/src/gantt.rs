//! Plain-text Gantt charts.

use crate::model::{Schedule, ScheduleEval};

const LABEL: usize = 5;

/// One row per machine carrying operations, one column per time unit. A bar
/// starts with the job id and is filled with `=`; idle time is `.`. The
/// header holds the time units modulo 10.
///
/// ```text
/// time 01234567
/// M1   1=3=2=4=
/// ```
pub fn render_gantt(schedule: &Schedule, eval: &ScheduleEval) -> String {
    let horizon = eval.ops.iter().map(|t| t.completion).max().unwrap_or(0).max(0) as usize;
    let mut header = format!("{:<LABEL$}", "time");
    header.extend((0..horizon).map(|t| char::from_digit((t % 10) as u32, 10).expect("digit")));
    let mut out = format!("{}\n", header.trim_end());

    for (machine, order) in schedule.machine_orders() {
        if order.is_empty() {
            continue;
        }
        let mut row = vec!['.'; horizon];
        for t in order.iter().filter_map(|&op| eval.timing(op)) {
            let (s, c) = (t.start.max(0) as usize, t.completion.max(0) as usize);
            let id = t.op.job.0.to_string();
            for (slot, ch) in row[s..c].iter_mut().zip(id.chars().chain(std::iter::repeat('='))) {
                *slot = ch;
            }
        }
        out.push_str(&format!("{:<LABEL$}", format!("M{}", machine.number())));
        out.extend(row);
        out.push('\n');
    }
    out
}
