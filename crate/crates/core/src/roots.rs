//! Bracketing scan with safeguarded Newton-bisection refinement, plus the
//! branch bookkeeping used when a fixed-point equation has several solutions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Number of uniform brackets over the search interval.
    pub brackets: usize,
    /// Residual target, relative to `max(1, scale)`.
    pub tolerance: f64,
    /// Residual level (relative) under which a sign-preserving dip is reported as a double root.
    pub tangency: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            brackets: 400,
            tolerance: 1e-12,
            tangency: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub tangent: bool,
}

/// Refines a sign change of `g` on `[a, b]`. `g` returns the value and the derivative.
pub fn newton_bisect(g: &dyn Fn(f64) -> (f64, f64), mut a: f64, mut b: f64, tol: f64) -> f64 {
    let (mut ga, _) = g(a);
    if ga == 0.0 {
        return a;
    }
    let (gb, _) = g(b);
    if gb == 0.0 {
        return b;
    }
    debug_assert!(ga * gb < 0.0, "bracket without sign change");
    let mut x = 0.5 * (a + b);
    let mut best = (f64::INFINITY, x);
    for _ in 0..200 {
        let (gx, dx) = g(x);
        if gx.abs() < best.0 {
            best = (gx.abs(), x);
        }
        if gx.abs() <= tol {
            return x;
        }
        if (gx < 0.0) == (ga < 0.0) {
            a = x;
            ga = gx;
        } else {
            b = x;
        }
        if b - a <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let newton = x - gx / dx;
        x = if dx.is_finite() && dx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    best.1
}

fn golden_min_abs(g: &dyn Fn(f64) -> (f64, f64), mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = g(c).0.abs();
    let mut fd = g(d).0.abs();
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c).0.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d).0.abs();
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// All roots of `g` on `[lo, hi]` found by a uniform scan. `scale` sets the
/// residual tolerance `tolerance * max(1, scale)`.
pub fn scan_roots(
    g: &dyn Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    scale: f64,
    opts: &ScanOptions,
) -> Vec<Root> {
    let tol = opts.tolerance * scale.max(1.0);
    let dip = opts.tangency * scale.max(1.0);
    if hi <= lo {
        return if g(lo).0.abs() <= tol {
            vec![Root {
                value: lo,
                tangent: false,
            }]
        } else {
            vec![]
        };
    }
    let k = opts.brackets.max(1);
    let xs: Vec<f64> = (0..=k)
        .map(|i| lo + (hi - lo) * i as f64 / k as f64)
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x).0).collect();
    let mut roots: Vec<Root> = Vec::new();
    let push = |r: Root, roots: &mut Vec<Root>| {
        if roots.last().is_none_or(|last| r.value > last.value) {
            roots.push(r);
        }
    };
    for i in 0..=k {
        if gs[i] == 0.0 {
            push(
                Root {
                    value: xs[i],
                    tangent: false,
                },
                &mut roots,
            );
            continue;
        }
        if i < k && gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0) {
            let r = newton_bisect(g, xs[i], xs[i + 1], tol);
            push(
                Root {
                    value: r,
                    tangent: false,
                },
                &mut roots,
            );
            continue;
        }
        // sign-preserving local dip in |g|
        if i > 0 && i < k {
            let same_sign =
                (gs[i - 1] < 0.0) == (gs[i] < 0.0) && (gs[i + 1] < 0.0) == (gs[i] < 0.0);
            if same_sign && gs[i].abs() <= gs[i - 1].abs() && gs[i].abs() <= gs[i + 1].abs() {
                let (x, v) = golden_min_abs(g, xs[i - 1], xs[i + 1]);
                if v <= dip {
                    push(
                        Root {
                            value: x,
                            tangent: true,
                        },
                        &mut roots,
                    );
                }
            }
        }
    }
    roots
}

/// How a branch is chosen among several roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// Closest to the previous value, ties to the smaller root.
    #[default]
    Nearest,
    Lowest,
    Highest,
    /// 1-based index into the ascending root list, used at the initial time.
    FixedIndex(usize),
}

/// Index of the root nearest to `previous`, ties to the smaller root.
pub fn nearest_index(roots: &[f64], previous: f64) -> usize {
    let mut best = 0;
    for (i, r) in roots.iter().enumerate() {
        if (r - previous).abs() < (roots[best] - previous).abs() {
            best = i;
        }
    }
    best
}

/// Applies `policy` to an ascending root list.
pub fn select_branch(roots: &[f64], previous: f64, policy: BranchPolicy) -> Result<usize> {
    if roots.is_empty() {
        return Err(Error::invalid("no roots to select from"));
    }
    match policy {
        BranchPolicy::Nearest => Ok(nearest_index(roots, previous)),
        BranchPolicy::Lowest => Ok(0),
        BranchPolicy::Highest => Ok(roots.len() - 1),
        BranchPolicy::FixedIndex(k) => {
            if k == 0 || k > roots.len() {
                Err(Error::invalid(format!(
                    "branch index {k} out of range: {} root(s) available",
                    roots.len()
                )))
            } else {
                Ok(k - 1)
            }
        }
    }
}

/// Result of one root solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub roots: Vec<f64>,
    pub psi: Vec<f64>,
    pub tangent: Vec<bool>,
    pub selected: usize,
    pub jump_event: bool,
}

impl RootReport {
    pub fn value(&self) -> f64 {
        self.roots[self.selected]
    }

    pub fn selected_psi(&self) -> f64 {
        self.psi[self.selected]
    }
}

/// Follows one root through successive ascending root lists.
///
/// When the number of roots is unchanged the tracked index is kept. When two
/// adjacent roots merge and vanish, the pair is located by the cheapest
/// matching of the remaining roots; if the tracked root was one of them the
/// branch has ended and the tracker jumps to the nearest survivor. Inserted
/// pairs shift the index. Any other change falls back to nearest-by-value.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTracker {
    roots: Vec<f64>,
    index: usize,
}

/// Outcome of a tracker update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackStep {
    pub index: usize,
    pub jumped: bool,
}

fn matching_cost(short: &[f64], long: &[f64], gap: usize) -> f64 {
    let rest = long[..gap].iter().chain(long[gap + 2..].iter());
    short.iter().zip(rest).map(|(a, b)| (a - b).abs()).sum()
}

fn cheapest_gap(short: &[f64], long: &[f64]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for gap in 0..long.len() - 1 {
        let c = matching_cost(short, long, gap);
        if c < best.0 {
            best = (c, gap);
        }
    }
    best.1
}

impl BranchTracker {
    pub fn new(roots: Vec<f64>, index: usize) -> Self {
        Self { roots, index }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn value(&self) -> f64 {
        self.roots[self.index]
    }

    pub fn advance(&mut self, new: Vec<f64>) -> TrackStep {
        let prev_value = self.value();
        let (old_len, new_len) = (self.roots.len(), new.len());
        let step = if new_len == old_len {
            TrackStep {
                index: self.index,
                jumped: false,
            }
        } else if new_len + 2 == old_len {
            let gap = cheapest_gap(&new, &self.roots);
            if self.index == gap || self.index == gap + 1 {
                let index = nearest_index(&new, prev_value);
                TrackStep {
                    index,
                    jumped: true,
                }
            } else if self.index < gap {
                TrackStep {
                    index: self.index,
                    jumped: false,
                }
            } else {
                TrackStep {
                    index: self.index - 2,
                    jumped: false,
                }
            }
        } else if new_len == old_len + 2 {
            let gap = cheapest_gap(&self.roots, &new);
            let index = if self.index < gap {
                self.index
            } else {
                self.index + 2
            };
            TrackStep {
                index,
                jumped: false,
            }
        } else {
            TrackStep {
                index: nearest_index(&new, prev_value),
                jumped: false,
            }
        };
        self.roots = new;
        self.index = step.index;
        step
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> (f64, f64) {
        move |x| (f(x), f64::NAN)
    }

    #[test]
    fn finds_single_root() {
        let g = plain(|x| x - 0.5);
        let r = scan_roots(&g, 0.0, 1.0, 1.0, &ScanOptions::default());
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn finds_three_roots_with_newton() {
        let g = |x: f64| {
            (
                (x - 0.1) * (x - 0.45) * (x - 0.8),
                3.0 * x * x - 2.7 * x + 0.485,
            )
        };
        let r = scan_roots(&g, 0.0, 1.0, 1.0, &ScanOptions::default());
        let v: Vec<f64> = r.iter().map(|r| r.value).collect();
        assert_eq!(v.len(), 3);
        for (a, b) in v.iter().zip([0.1, 0.45, 0.8]) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn tangent_root_is_flagged() {
        let g = plain(|x| (x - 0.30123).powi(2));
        let r = scan_roots(&g, 0.0, 1.0, 1.0, &ScanOptions::default());
        assert_eq!(r.len(), 1);
        assert!(r[0].tangent);
        assert!((r[0].value - 0.30123).abs() < 1e-4);
    }

    #[test]
    fn selection_rules() {
        let roots = [0.1, 0.9];
        assert_eq!(
            select_branch(&roots, 0.15, BranchPolicy::Nearest).unwrap(),
            0
        );
        assert_eq!(
            select_branch(&roots, 0.5, BranchPolicy::Nearest).unwrap(),
            0
        );
        assert_eq!(
            select_branch(&roots, 0.0, BranchPolicy::Highest).unwrap(),
            1
        );
        assert_eq!(
            select_branch(&[0.1, 0.4, 0.9], 0.0, BranchPolicy::FixedIndex(2)).unwrap(),
            1
        );
        assert!(select_branch(&roots, 0.0, BranchPolicy::FixedIndex(3)).is_err());
        assert!(select_branch(&roots, 0.0, BranchPolicy::FixedIndex(0)).is_err());
    }

    #[test]
    fn tracker_follows_through_fold() {
        let mut t = BranchTracker::new(vec![0.1, 0.5, 0.9], 2);
        assert_eq!(
            t.advance(vec![0.12, 0.52, 0.88]),
            TrackStep {
                index: 2,
                jumped: false
            }
        );
        // upper pair merges and disappears
        let s = t.advance(vec![0.15]);
        assert!(s.jumped);
        assert_eq!(s.index, 0);
        // lower pair vanishing does not affect a tracked upper root
        let mut t = BranchTracker::new(vec![0.1, 0.2, 0.9], 2);
        assert_eq!(
            t.advance(vec![0.91]),
            TrackStep {
                index: 0,
                jumped: false
            }
        );
        // pair appears below
        let mut t = BranchTracker::new(vec![0.9], 0);
        assert_eq!(
            t.advance(vec![0.1, 0.12, 0.9]),
            TrackStep {
                index: 2,
                jumped: false
            }
        );
    }
}
