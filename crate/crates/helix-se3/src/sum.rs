//! Outward shell summation for infinite-chain lattice sums.

/// Shells are added in increasing offset until `patience` consecutive shells
/// each fall below `tolerance` relative to the running total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRule {
    pub tolerance: f64,
    pub patience: usize,
    pub max_shells: usize,
}

impl Default for SumRule {
    fn default() -> Self {
        SumRule { tolerance: 1e-14, patience: 20, max_shells: 1_000_000 }
    }
}

impl SumRule {
    /// Exactly `shells` shells, no early exit.
    pub fn fixed(shells: usize) -> Self {
        SumRule { tolerance: -1.0, patience: usize::MAX, max_shells: shells }
    }

    pub fn is_fixed(&self) -> bool {
        self.tolerance < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellSum {
    pub value: f64,
    pub shells: usize,
    pub converged: bool,
}

/// Sums `shell(1) + shell(2) + …` under `rule`, comparing each shell with the running total.
pub fn shell_sum(rule: &SumRule, mut shell: impl FnMut(usize) -> f64) -> ShellSum {
    let mut acc = 0.0;
    let mut quiet = 0;
    for s in 1..=rule.max_shells {
        let t = shell(s);
        acc += t;
        if !t.is_finite() {
            return ShellSum { value: acc, shells: s, converged: false };
        }
        if t.abs() <= rule.tolerance * acc.abs() {
            quiet += 1;
            if quiet >= rule.patience {
                return ShellSum { value: acc, shells: s, converged: true };
            }
        } else {
            quiet = 0;
        }
    }
    ShellSum { value: acc, shells: rule.max_shells, converged: rule.is_fixed() }
}
