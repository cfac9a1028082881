//! ASCII Gantt charts. Presentation only.

use crate::instance::{BathKind, Instance};
use crate::schedule::Schedule;

fn label(job: usize) -> char {
    const LABELS: &[u8] = b"123456789abcdefghijklmnopqrstuvwxyz";
    LABELS.get(job - 1).map_or('*', |&c| c as char)
}

/// One row per bath, one column per time unit from 1 to the last busy unit.
/// Cells show the occupying job, `.` when idle and `#` when jobs collide.
pub fn render(inst: &Instance, s: &Schedule) -> String {
    let horizon = (1..=inst.num_jobs())
        .flat_map(|j| (1..=inst.num_baths()).map(move |b| (j, b)))
        .map(|(j, b)| s.finish(inst, j, b))
        .max()
        .unwrap_or(1)
        .saturating_sub(1) as usize;
    let prefix = 8;
    let mut out = String::new();
    let ruler = |f: &dyn Fn(usize) -> char| -> String { (1..=horizon).map(f).collect() };
    out.push_str(&format!("{:<prefix$}{}\n", "", ruler(&|t| if t % 10 == 0 {
        char::from_digit(((t / 10) % 10) as u32, 10).unwrap_or(' ')
    } else {
        ' '
    })));
    out.push_str(&format!(
        "{:<prefix$}{}\n",
        "t",
        ruler(&|t| char::from_digit((t % 10) as u32, 10).unwrap_or(' '))
    ));
    for b in 1..=inst.num_baths() {
        let mut cells = vec!['.'; horizon];
        for j in 1..=inst.num_jobs() {
            let (t0, t1) = (s.start(j, b) as usize, s.finish(inst, j, b) as usize);
            for t in t0..t1 {
                if let Some(c) = cells.get_mut(t - 1) {
                    *c = if *c == '.' { label(j) } else { '#' };
                }
            }
        }
        let head = format!("B{b} ({})", BathKind::of(b));
        out.push_str(&format!("{head:<prefix$}{}\n", cells.into_iter().collect::<String>()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_chart() {
        let inst = Instance::new(vec![vec![2, 2], vec![2, 2]], 10).unwrap();
        let s = Schedule::from_rows(&inst, &[vec![1, 3], vec![3, 5]]).unwrap();
        let chart = render(&inst, &s);
        let lines: Vec<&str> = chart.lines().collect();
        assert_eq!(lines[1], "t       123456");
        assert_eq!(lines[2], "B1 (C)  1122..");
        assert_eq!(lines[3], "B2 (W)  ..1122");
    }

    #[test]
    fn collisions_are_marked() {
        let inst = Instance::new(vec![vec![3], vec![3]], 10).unwrap();
        let s = Schedule::from_rows(&inst, &[vec![1], vec![2]]).unwrap();
        assert!(render(&inst, &s).contains("B1 (C)  1##2"));
    }
}
