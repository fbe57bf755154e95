//! Weighted pair counting on the circle `R / Z`.
//!
//! Given weighted points `(c_i, w_i)` on the unit circle, [`CircularWindow`]
//! computes `sum_i w_i * sum_{j : d(c_i, c_j) <= W} w_j` where `d` is the
//! circular distance. Narrow windows over spread-out points go through a
//! grid of buckets at least as wide as the window, so only neighbouring
//! buckets are compared. Otherwise the points are bucket-sorted (expected
//! linear time for near-uniform positions, `O(n log n)` in the worst case)
//! and every window sum is read off a prefix-sum table with two monotone
//! pointers over three unrolled copies of the circle.

use alloc::vec::Vec;

/// Whether points at distance exactly `W` belong to the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Closed,
    Open,
}

/// Grid cells holding more points than this send the sum to the sorted path.
const MAX_CELL: usize = 32;

/// Reusable scratch space for circular window sums.
#[derive(Debug, Default, Clone)]
pub struct CircularWindow {
    points: Vec<(f64, f64)>,
    sorted: Vec<(f64, f64)>,
    starts: Vec<usize>,
    fill: Vec<usize>,
    cell_of: Vec<usize>,
    unrolled: Vec<f64>,
    prefix: Vec<f64>,
}

impl CircularWindow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.points.clear();
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds a point. `position` must lie in `[-1/2, 1/2]`; both ends denote
    /// the same point of the circle.
    pub fn push(&mut self, position: f64, weight: f64) {
        debug_assert!((-0.5..=0.5).contains(&position), "position {position}");
        self.points.push((position, weight));
    }

    /// Weighted count of ordered pairs (diagonal included) at circular
    /// distance within `half_width`.
    pub fn pair_mass(&mut self, half_width: f64, boundary: Boundary) -> f64 {
        let n = self.points.len();
        if n == 0 {
            return 0.0;
        }
        let total: f64 = self.points.iter().map(|&(_, w)| w).sum();
        if half_width >= 0.5 {
            // every pair is within distance 1/2
            return total * total;
        }
        let cells = (0.9 / half_width).min(n as f64) as usize;
        if cells >= 3 && self.scatter(cells) <= MAX_CELL {
            return self.grid_mass(cells, half_width, boundary);
        }
        self.sort();

        // three unrolled copies of the circle: positions shifted by -1, 0, +1
        // and the matching cumulative weights
        self.unrolled.clear();
        self.unrolled.reserve(3 * n);
        self.prefix.clear();
        self.prefix.reserve(3 * n + 1);
        self.prefix.push(0.0);
        let mut acc = 0.0;
        for shift in [-1.0, 0.0, 1.0] {
            for &(c, w) in &self.sorted {
                self.unrolled.push(c + shift);
                acc += w;
                self.prefix.push(acc);
            }
        }
        let unrolled = &self.unrolled;
        let prefix = &self.prefix;

        let m = unrolled.len();
        let mut mass = 0.0;
        let (mut lo, mut hi) = (0usize, 0usize);
        for &(c, w) in self.sorted.iter() {
            match boundary {
                Boundary::Closed => {
                    while lo < m && unrolled[lo] - c < -half_width {
                        lo += 1;
                    }
                    while hi < m && unrolled[hi] - c <= half_width {
                        hi += 1;
                    }
                }
                Boundary::Open => {
                    while lo < m && unrolled[lo] - c <= -half_width {
                        lo += 1;
                    }
                    while hi < m && unrolled[hi] - c < half_width {
                        hi += 1;
                    }
                }
            }
            // an open window of width zero is empty: hi stops below lo
            if hi > lo {
                mass += w * (prefix[hi] - prefix[lo]);
            }
        }
        mass
    }

    /// Sum over the grid left by [`Self::scatter`]: each cell against itself
    /// and its right neighbour.
    fn grid_mass(&self, cells: usize, half_width: f64, boundary: Boundary) -> f64 {
        match boundary {
            Boundary::Closed => self.grid_mass_by(cells, |d| d <= half_width),
            Boundary::Open => self.grid_mass_by(cells, |d| d < half_width),
        }
    }

    #[inline(always)]
    fn grid_mass_by(&self, cells: usize, inside: impl Fn(f64) -> bool) -> f64 {
        let within = |a: f64, b: f64| {
            let d = (a - b).abs();
            inside(if d > 0.5 { 1.0 - d } else { d })
        };
        let cell = |b: usize| &self.sorted[self.starts[b]..self.starts[b + 1]];
        let mut mass = 0.0;
        for b in 0..cells {
            let (here, next) = (cell(b), cell((b + 1) % cells));
            for &(c, w) in here {
                let mut row = 0.0;
                for &(c2, w2) in here {
                    if within(c, c2) {
                        row += w2;
                    }
                }
                let mut cross = 0.0;
                for &(c2, w2) in next {
                    if within(c, c2) {
                        cross += w2;
                    }
                }
                mass += w * (row + 2.0 * cross);
            }
        }
        mass
    }

    /// Distributes the points over `cells` equal arcs; returns the largest
    /// occupancy.
    fn scatter(&mut self, cells: usize) -> usize {
        let n = self.points.len();
        let bucket = |c: f64| (((c + 0.5) * cells as f64) as usize).min(cells - 1);

        self.starts.clear();
        self.starts.resize(cells + 1, 0);
        self.cell_of.clear();
        self.cell_of.extend(self.points.iter().map(|&(c, _)| bucket(c)));
        for &b in &self.cell_of {
            self.starts[b + 1] += 1;
        }
        let mut widest = 0;
        for b in 0..cells {
            widest = widest.max(self.starts[b + 1]);
            self.starts[b + 1] += self.starts[b];
        }
        self.sorted.clear();
        self.sorted.resize(n, (0.0, 0.0));
        self.fill.clear();
        self.fill.extend_from_slice(&self.starts);
        for (&pt, &b) in self.points.iter().zip(&self.cell_of) {
            self.sorted[self.fill[b]] = pt;
            self.fill[b] += 1;
        }
        widest
    }

    fn sort(&mut self) {
        let cells = self.points.len();
        self.scatter(cells);
        for b in 0..cells {
            let run = &mut self.sorted[self.starts[b]..self.starts[b + 1]];
            if run.len() > 16 {
                run.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
            } else {
                insertion_sort(run);
            }
        }
    }
}

/// Buckets hold a handful of points, where this beats the general sort.
fn insertion_sort(run: &mut [(f64, f64)]) {
    for i in 1..run.len() {
        let mut j = i;
        while j > 0 && run[j - 1].0.total_cmp(&run[j].0).is_gt() {
            run.swap(j - 1, j);
            j -= 1;
        }
    }
}
