//! Depth-first Schnorr-Euchner tree search over `f64` Gram-Schmidt data.
//!
//! Levels are 0-based: level `j` fixes coefficient `v[j]`, and a node at
//! level `j` has partial squared norm `rho[j] = |pi_j(v - t)|^2`. The bound at
//! level `j` is the pruning radius of the `m - j` dimensional projection.
//! Centers are computed from cached partial sums `sigma[i][j]`, refreshed
//! lazily from the highest index whose coefficient changed.

use std::time::Instant;

/// Relative slack on every bound test, in favour of acceptance.
pub(crate) const BOUND_SLACK: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SearchMode {
    /// All points of the pruned set around the target.
    Bdd { dedup_first: bool },
    /// Nonzero points around the origin with a shrinking radius.
    Svp,
}

#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    pub coeffs: Vec<i64>,
    pub rho: Vec<f64>,
}

pub(crate) struct Engine {
    m: usize,
    mode: SearchMode,
    mu: Vec<Vec<f64>>,
    bstar: Vec<f64>,
    target: Vec<f64>,
    /// Squared pruning radii by projection dimension: `radii_sq[d - 1]`.
    radii_sq: Vec<f64>,
    /// Current scale on `radii_sq` (shrinks in SVP mode).
    scale: f64,
    sigma: Vec<Vec<f64>>,
    stale: Vec<usize>,
    center: Vec<f64>,
    v: Vec<i64>,
    step: Vec<i64>,
    rho: Vec<f64>,
    level: usize,
    started: bool,
    pub finished: bool,
    pub nodes: u64,
    node_cap: Option<u64>,
    deadline: Option<Instant>,
    pub capped: bool,
}

impl Engine {
    pub fn new(
        mu: Vec<Vec<f64>>,
        bstar: Vec<f64>,
        target: Vec<f64>,
        outside_sq: f64,
        radii_sq: Vec<f64>,
        mode: SearchMode,
    ) -> Self {
        let m = bstar.len();
        assert_eq!(mu.len(), m);
        assert_eq!(target.len(), m);
        assert_eq!(radii_sq.len(), m);
        let mut rho = vec![0.0; m + 1];
        rho[m] = outside_sq;
        Engine {
            m,
            mode,
            mu,
            bstar,
            target,
            radii_sq,
            scale: 1.0,
            sigma: vec![vec![0.0; m]; m + 1],
            stale: vec![m.saturating_sub(1); m],
            center: vec![0.0; m],
            v: vec![0; m],
            step: vec![1; m],
            rho,
            level: 0,
            started: false,
            finished: m == 0,
            nodes: 0,
            node_cap: None,
            deadline: None,
            capped: false,
        }
    }

    pub fn with_limits(mut self, node_cap: Option<u64>, deadline: Option<Instant>) -> Self {
        self.node_cap = node_cap;
        self.deadline = deadline;
        self
    }

    /// Shrink every bound so the full-dimensional radius becomes `sqrt(r2)`.
    pub fn shrink_to(&mut self, r2: f64) {
        let full = self.radii_sq[self.m - 1];
        if full > 0.0 {
            self.scale = self.scale.min(r2 / full);
        }
    }

    #[inline]
    fn bound(&self, level: usize) -> f64 {
        self.radii_sq[self.m - 1 - level] * self.scale * (1.0 + BOUND_SLACK)
    }

    #[inline]
    fn round_center(&self, level: usize) -> i64 {
        let c = self.center[level];
        let r = c.round();
        if level == 0
            && matches!(self.mode, SearchMode::Bdd { dedup_first: true })
            && (c - c.floor() - 0.5).abs() == 0.0
        {
            // exact tie: the smaller coefficient
            return c.floor() as i64;
        }
        r as i64
    }

    /// Whether all coefficients above `level` are zero (SVP symmetry).
    fn top_zero(&self, level: usize) -> bool {
        matches!(self.mode, SearchMode::Svp) && self.v[level + 1..].iter().all(|&x| x == 0)
    }

    fn refresh_center(&mut self, level: usize) {
        let hi = self.stale[level];
        for i in (level + 1..=hi.min(self.m - 1)).rev() {
            self.sigma[i][level] =
                self.sigma[i + 1][level] + (self.target[i] - self.v[i] as f64) * self.mu[i][level];
        }
        self.stale[level] = level;
        self.center[level] = self.target[level] + self.sigma[level + 1][level];
    }

    /// Next coefficient at `level` in zig-zag order around the center.
    fn zigzag(&mut self, level: usize) {
        if self.top_zero(level) {
            self.v[level] += 1;
            return;
        }
        if (self.v[level] as f64) > self.center[level] {
            self.v[level] -= self.step[level];
        } else {
            self.v[level] += self.step[level];
        }
        self.step[level] += 1;
    }

    /// Move up one level and advance its coefficient. False when the tree is exhausted.
    fn go_up(&mut self) -> bool {
        self.level += 1;
        if self.level == self.m {
            self.finished = true;
            return false;
        }
        let up = self.level;
        let below = up - 1;
        self.stale[below] = self.stale[below].max(up);
        self.zigzag(up);
        true
    }

    fn over_limits(&mut self) -> bool {
        if let Some(cap) = self.node_cap {
            if self.nodes >= cap {
                self.capped = true;
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if self.nodes & 0xffff == 0 && Instant::now() >= deadline {
                self.capped = true;
                return true;
            }
        }
        false
    }

    /// Runs the search until the next leaf inside the bounds.
    pub fn next_leaf(&mut self) -> Option<Leaf> {
        if self.finished || self.capped {
            return None;
        }
        if !self.started {
            self.started = true;
            let top = self.m - 1;
            self.level = top;
            self.refresh_center(top);
            self.v[top] = self.round_center(top);
            self.step[top] = 1;
        }
        loop {
            if self.over_limits() {
                return None;
            }
            self.nodes += 1;
            let level = self.level;
            let d = self.center[level] - self.v[level] as f64;
            self.rho[level] = self.rho[level + 1] + d * d * self.bstar[level];
            if self.rho[level] <= self.bound(level) {
                if level == 0 {
                    let leaf = Leaf {
                        coeffs: self.v.clone(),
                        rho: self.rho.clone(),
                    };
                    let is_zero = matches!(self.mode, SearchMode::Svp) && self.v.iter().all(|&x| x == 0);
                    match self.mode {
                        SearchMode::Bdd { dedup_first: true } => {
                            self.go_up();
                        }
                        _ => self.zigzag(0),
                    }
                    if is_zero {
                        if self.finished {
                            return None;
                        }
                        continue;
                    }
                    return Some(leaf);
                }
                // going down
                let down = level - 1;
                self.level = down;
                self.stale[down.saturating_sub(1)] =
                    self.stale[down.saturating_sub(1)].max(self.stale[down]);
                self.refresh_center(down);
                self.v[down] = self.round_center(down);
                self.step[down] = 1;
            } else if !self.go_up() {
                return None;
            }
        }
    }
}
