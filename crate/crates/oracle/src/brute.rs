// SPDX-License-Identifier: Apache-2.0

//! Exhaustive satisfiability for small CNFs, 64 assignments per word.

pub const MAX_VARS: u32 = 24;

/// Is some assignment of variables `1..=num_vars` satisfying every clause?
pub fn satisfiable(num_vars: u32, clauses: &[Vec<i32>]) -> bool {
    assert!(num_vars <= MAX_VARS, "too many variables for enumeration");
    let total: u64 = 1 << num_vars;
    let words = total.div_ceil(64);
    let valid_last = if total.is_multiple_of(64) { u64::MAX } else { (1u64 << (total % 64)) - 1 };
    for w in 0..words {
        // Bit j of the word stands for assignment index w * 64 + j; variable
        // v (1-based) takes bit v - 1 of that index.
        let var_word = |v: u32| -> u64 {
            let bit = v - 1;
            if bit < 6 {
                (0..64).fold(0u64, |acc, j| acc | ((((j as u64) >> bit) & 1) << j))
            } else if (w >> (bit - 6)) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        };
        let mut sat = if w + 1 == words { valid_last } else { u64::MAX };
        for c in clauses {
            let cw = c.iter().fold(0u64, |acc, &l| {
                let x = var_word(l.unsigned_abs());
                acc | if l > 0 { x } else { !x }
            });
            sat &= cw;
            if sat == 0 {
                break;
            }
        }
        if sat != 0 {
            return true;
        }
    }
    false
}

/// Does `model` (indexed by variable, slot 0 unused) satisfy every clause?
pub fn check_model(model: &[bool], clauses: &[Vec<i32>]) -> bool {
    clauses.iter().all(|c| c.iter().any(|&l| model.get(l.unsigned_abs() as usize).is_some_and(|&v| v == (l > 0))))
}
