//! Reflected mixed-radix Gray sequences with random access.
//!
//! The exact norm searches walk every digit tuple `(g_0, …, g_{G-1})` with
//! `g_i < radix_i`, changing exactly one digit by ±1 per step, so incremental
//! state updates cost one row operation. Random access (`digits_at`) lets
//! chunked parallel walks start mid-sequence; combined with state refreshes
//! pinned to absolute step indices, results are identical for any chunking.

/// Plain binary Gray code of `i`.
#[inline]
pub fn binary_gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Position of the bit that changes between `binary_gray(i)` and
/// `binary_gray(i + 1)`.
#[inline]
pub fn binary_flip_position(i: u64) -> u32 {
    (i + 1).trailing_zeros()
}

/// A reflected Gray walk over mixed-radix digit tuples.
#[derive(Debug, Clone)]
pub struct MixedRadixGray {
    radices: Vec<u32>,
    /// Odometer digits of the current step index (plain mixed-radix).
    odo: Vec<u32>,
    /// Gray digits of the current tuple.
    gray: Vec<u32>,
    /// suffix_parity[i] = parity of gray[i] + gray[i+1] + …; reflection of a
    /// digit depends on the Gray digits above it, not the odometer digits.
    /// One extra always-false slot simplifies the lookup at the top digit.
    suffix_parity: Vec<bool>,
    index: u64,
    total: u64,
}

/// One step of the walk: Gray digit `digit` moved by `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayStep {
    pub digit: usize,
    pub delta: i8,
}

impl MixedRadixGray {
    /// Total tuple count `Π radices`, or `None` on overflow / trivial input.
    pub fn cardinality(radices: &[u32]) -> Option<u64> {
        let mut total: u64 = 1;
        for &r in radices {
            if r == 0 {
                return None;
            }
            total = total.checked_mul(u64::from(r))?;
        }
        Some(total)
    }

    /// Start a walk positioned at step `start`.
    pub fn starting_at(radices: Vec<u32>, start: u64) -> Self {
        let total = Self::cardinality(&radices).expect("radix product fits in u64");
        assert!(start < total || (start == 0 && total > 0));
        let odo = odometer_digits(&radices, start);
        let gray = Self::digits_at(&radices, start);
        let mut suffix_parity = vec![false; radices.len() + 1];
        for i in (0..radices.len()).rev() {
            suffix_parity[i] = suffix_parity[i + 1] ^ (gray[i] % 2 == 1);
        }
        MixedRadixGray {
            radices,
            odo,
            gray,
            suffix_parity,
            index: start,
            total,
        }
    }

    /// Gray digits of the tuple at absolute step `index`.
    pub fn digits_at(radices: &[u32], index: u64) -> Vec<u32> {
        let odo = odometer_digits(radices, index);
        let mut digits = vec![0u32; radices.len()];
        let mut parity_above = false;
        for i in (0..radices.len()).rev() {
            digits[i] = if parity_above {
                radices[i] - 1 - odo[i]
            } else {
                odo[i]
            };
            parity_above ^= digits[i] % 2 == 1;
        }
        digits
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Gray digits of the current tuple.
    pub fn digits(&self) -> &[u32] {
        &self.gray
    }

    /// Advance one step, reporting which Gray digit moved and in which
    /// direction. Returns `None` after the last tuple.
    pub fn step(&mut self) -> Option<GrayStep> {
        if self.index + 1 >= self.total {
            return None;
        }
        // Lowest odometer digit that can still increment.
        let mut t = 0usize;
        while self.odo[t] == self.radices[t] - 1 {
            t += 1;
        }
        // Gray digits above t are untouched, so their parity decides the
        // direction of the move.
        let delta = if self.suffix_parity[t + 1] { -1 } else { 1 };
        for digit in self.odo.iter_mut().take(t) {
            *digit = 0;
        }
        self.odo[t] += 1;
        self.gray[t] = (self.gray[t] as i64 + i64::from(delta)) as u32;
        // gray[t] changed parity; lower Gray digits did not change, so every
        // suffix parity at or below t flips.
        for p in self.suffix_parity.iter_mut().take(t + 1) {
            *p = !*p;
        }
        self.index += 1;
        Some(GrayStep { digit: t, delta })
    }
}

fn odometer_digits(radices: &[u32], mut index: u64) -> Vec<u32> {
    let mut odo = vec![0u32; radices.len()];
    for (d, &r) in odo.iter_mut().zip(radices) {
        *d = (index % u64::from(r)) as u32;
        index /= u64::from(r);
    }
    debug_assert_eq!(index, 0, "index out of range");
    odo
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference generator: the sequence over digits 0..k+1 repeats the
    /// sequence over digits 0..k forwards and backwards while digit k
    /// counts up, which is the definition of reflected Gray order with
    /// digit 0 varying fastest.
    fn reference(radices: &[u32]) -> Vec<Vec<u32>> {
        let mut seq: Vec<Vec<u32>> = vec![vec![]];
        for &r in radices {
            let mut next = Vec::new();
            for v in 0..r {
                let mut block = seq.clone();
                if v % 2 == 1 {
                    block.reverse();
                }
                for mut t in block {
                    t.push(v);
                    next.push(t);
                }
            }
            seq = next;
        }
        seq
    }

    #[test]
    fn binary_case_matches_xor_formula() {
        let radices = vec![2u32; 10];
        let mut walk = MixedRadixGray::starting_at(radices.clone(), 0);
        let mut digits = MixedRadixGray::digits_at(&radices, 0);
        for i in 0..(1u64 << 10) - 1 {
            let mask: u64 = digits
                .iter()
                .enumerate()
                .map(|(b, &d)| u64::from(d) << b)
                .sum();
            assert_eq!(mask, binary_gray(i), "at step {i}");
            let s = walk.step().unwrap();
            assert_eq!(s.digit as u32, binary_flip_position(i));
            digits[s.digit] = (digits[s.digit] as i32 + s.delta as i32) as u32;
        }
        assert!(walk.step().is_none());
    }

    #[test]
    fn walk_visits_every_tuple_once_and_matches_reference() {
        for radices in [
            vec![3u32, 2, 4],
            vec![2, 2, 2, 2],
            vec![5, 3],
            vec![4],
            vec![3, 3, 3],
        ] {
            let total = MixedRadixGray::cardinality(&radices).unwrap();
            let reference = reference(&radices);
            assert_eq!(reference.len() as u64, total);

            let mut walk = MixedRadixGray::starting_at(radices.clone(), 0);
            let mut digits = MixedRadixGray::digits_at(&radices, 0);
            assert_eq!(digits, reference[0]);
            for step_index in 1..total {
                let s = walk.step().unwrap();
                let d = &mut digits[s.digit];
                *d = (*d as i32 + s.delta as i32) as u32;
                assert!(*d < radices[s.digit]);
                assert_eq!(
                    digits, reference[step_index as usize],
                    "radices {radices:?} step {step_index}"
                );
            }
            assert!(walk.step().is_none());
        }
    }

    #[test]
    fn digits_at_agrees_with_sequential_walk() {
        let radices = vec![3u32, 2, 3, 4];
        let total = MixedRadixGray::cardinality(&radices).unwrap();
        let mut digits = MixedRadixGray::digits_at(&radices, 0);
        let mut walk = MixedRadixGray::starting_at(radices.clone(), 0);
        for i in 0..total {
            assert_eq!(MixedRadixGray::digits_at(&radices, i), digits, "i={i}");
            if i + 1 < total {
                let s = walk.step().unwrap();
                let d = &mut digits[s.digit];
                *d = (*d as i32 + s.delta as i32) as u32;
            }
        }
    }

    #[test]
    fn mid_sequence_start_continues_correctly() {
        let radices = vec![3u32, 3, 2, 2];
        let total = MixedRadixGray::cardinality(&radices).unwrap();
        for start in [1u64, 7, 16, total - 2] {
            let mut walk = MixedRadixGray::starting_at(radices.clone(), start);
            let mut digits = MixedRadixGray::digits_at(&radices, start);
            for i in start..total - 1 {
                let s = walk.step().unwrap();
                let d = &mut digits[s.digit];
                *d = (*d as i32 + s.delta as i32) as u32;
                assert_eq!(digits, MixedRadixGray::digits_at(&radices, i + 1));
            }
            assert!(walk.step().is_none());
        }
    }
}
