//! Enumeration of story-to-reasoning timeline mappings.

/// All strictly increasing maps from story steps `0..len` into reasoning
/// steps `0..=horizon` that put each `(s, s+1)` pair in `next` on
/// consecutive steps, in lexicographic order.
pub fn enumerate_mappings(len: usize, next: &[(usize, usize)], horizon: usize) -> Mappings {
    let forced: Vec<bool> = (0..len).map(|s| s > 0 && next.contains(&(s - 1, s))).collect();
    let cur = if len == 0 || len - 1 <= horizon { Some((0..len).collect()) } else { None };
    // a pair that is not adjacent in story order can never be satisfied
    let satisfiable = next.iter().all(|&(s, s1)| s1 == s + 1 && s1 < len);
    Mappings { forced, horizon, cur: if satisfiable { cur } else { None } }
}

/// Lazy iterator behind [`enumerate_mappings`].
#[derive(Debug, Clone)]
pub struct Mappings {
    forced: Vec<bool>,
    horizon: usize,
    cur: Option<Vec<usize>>,
}

impl Iterator for Mappings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.take()?;
        let len = out.len();
        let mut succ = out.clone();
        let mut found = false;
        for s in (0..len).rev() {
            if self.forced[s] {
                continue;
            }
            // room for s and every later step after incrementing
            if succ[s] + 1 + (len - 1 - s) <= self.horizon {
                succ[s] += 1;
                for t in s + 1..len {
                    succ[t] = succ[t - 1] + 1;
                }
                found = true;
                break;
            }
        }
        if found {
            self.cur = Some(succ);
        }
        Some(out)
    }
}
