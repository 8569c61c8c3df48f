//! Integer compositions: every way to split `units` into `parts` ordered
//! nonnegative integers.

/// Number of compositions of `units` into `parts` nonnegative parts.
pub fn composition_count(parts: usize, units: u32) -> u128 {
    if parts == 0 {
        return u128::from(units == 0);
    }
    // C(units + parts − 1, parts − 1), built so every intermediate is integral.
    let k = (parts - 1) as u128;
    let top = units as u128 + k;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (top - k + i) / i;
    }
    acc
}

/// Advances `c` to the next composition in lexicographic order. Returns
/// `false` once `c` was the last one, leaving it unchanged.
pub fn next_composition(c: &mut [u32]) -> bool {
    let m = c.len();
    if m < 2 {
        return false;
    }
    let mut suffix = c[m - 1];
    for i in (0..m - 1).rev() {
        if suffix > 0 {
            c[i] += 1;
            for v in &mut c[i + 1..m - 1] {
                *v = 0;
            }
            c[m - 1] = suffix - 1;
            return true;
        }
        suffix += c[i];
    }
    false
}

/// Lexicographic stream of compositions, starting from `(0, …, 0, units)`.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Vec<u32>,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, units: u32) -> Self {
        let mut current = vec![0; parts];
        if let Some(last) = current.last_mut() {
            *last = units;
        }
        Compositions {
            done: parts == 0 && units > 0,
            current,
        }
    }

    /// Compositions whose first part equals `first`.
    pub fn with_prefix(parts: usize, units: u32, first: u32) -> impl Iterator<Item = Vec<u32>> {
        assert!(parts >= 1 && first <= units);
        let rest = if parts == 1 {
            Compositions {
                current: Vec::new(),
                done: first != units,
            }
        } else {
            Compositions::new(parts - 1, units - first)
        };
        rest.map(move |tail| {
            let mut c = Vec::with_capacity(parts);
            c.push(first);
            c.extend(tail);
            c
        })
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_composition(&mut self.current);
        Some(out)
    }
}
