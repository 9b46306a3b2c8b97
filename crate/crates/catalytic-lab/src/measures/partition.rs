//! Exact minimum partition of a set into subcubes.
//!
//! The partition measure of `A ⊆ {0,1}^m` is the smallest number of
//! pairwise-disjoint subcubes whose union is exactly `A`. The solver is
//! exact: it returns both the value and a witness partition, verified
//! before it is handed back.
//!
//! Strategy. Any subcube is connected under single-bit flips and the
//! smallest cube enclosing two points of a piece lies inside that piece, so
//! the problem decomposes over edge-connected components, points with no
//! uncovered neighbour are forced singletons, and any pairwise set of
//! points whose enclosing cubes leave `A` gives a lower bound. Upper bounds
//! come from a greedy cover and from an optimal *guillotine* partition
//! (recursively fixing one coordinate), computed by memoised recursion.
//! What remains is closed by branch-and-bound on the pieces through a
//! most-constrained uncovered point.

use std::collections::HashMap;

use super::pointset::{BitVectorSet, MeasureError, Subcube};

/// Hard cap: the solver state is quadratic-ish in `2^m`.
pub const MAX_PARTITION_DIMENSION: usize = 14;

/// Guillotine refinement is memoised over all subcubes (`3^m` of them), so
/// it is only attempted below this dimension.
const MAX_GUILLOTINE_DIMENSION: usize = 12;

#[derive(Debug, Clone)]
pub struct PartitionOutcome {
    /// Minimum number of disjoint subcubes partitioning the set.
    pub value: usize,
    /// A witness partition attaining the value.
    pub witness: Vec<Subcube>,
    /// Branch-and-bound nodes explored (diagnostic).
    pub nodes: u64,
}

impl PartitionOutcome {
    /// Witness pieces as pattern strings (`*` on free coordinates), sorted.
    pub fn witness_patterns(&self) -> Vec<String> {
        let mut v: Vec<String> = self.witness.iter().map(Subcube::pattern).collect();
        v.sort();
        v
    }
}

/// Checks that `pieces` are pairwise disjoint, lie inside `set`, and cover it.
pub fn is_valid_partition(set: &BitVectorSet, pieces: &[Subcube]) -> bool {
    let mut covered = BitVectorSet::empty(set.m());
    let mut total = 0usize;
    for piece in pieces {
        for p in piece.points() {
            if !set.contains(p) || covered.contains(p) {
                return false;
            }
            covered.insert(p);
            total += 1;
        }
    }
    total == set.len()
}

/// Exact partition measure. Fails above [`MAX_PARTITION_DIMENSION`].
pub fn partition_measure(set: &BitVectorSet) -> Result<PartitionOutcome, MeasureError> {
    let m = set.m();
    if m > MAX_PARTITION_DIMENSION {
        return Err(MeasureError::TooLarge {
            m,
            what: "exact partition solver",
            limit: MAX_PARTITION_DIMENSION,
        });
    }
    let mut witness = Vec::new();
    let mut nodes = 0u64;
    for comp in edge_components(set) {
        let mut solver = ComponentSolver::new(m, comp);
        let pieces = solver.solve();
        nodes += solver.nodes;
        witness.extend(pieces);
    }
    debug_assert!(is_valid_partition(set, &witness));
    Ok(PartitionOutcome {
        value: witness.len(),
        witness,
        nodes,
    })
}

/// Splits a set into its connected components under single-bit flips.
fn edge_components(set: &BitVectorSet) -> Vec<BitVectorSet> {
    let m = set.m();
    let mut seen = BitVectorSet::empty(m);
    let mut out = Vec::new();
    for start in set.points() {
        if seen.contains(start) {
            continue;
        }
        let mut comp = BitVectorSet::empty(m);
        let mut queue = vec![start];
        seen.insert(start);
        comp.insert(start);
        while let Some(p) = queue.pop() {
            for j in 0..m {
                let q = p ^ (1 << j);
                if set.contains(q) && !seen.contains(q) {
                    seen.insert(q);
                    comp.insert(q);
                    queue.push(q);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// All subcubes of `u` containing `p`, as free-coordinate masks (the empty
/// mask, i.e. the singleton, is always present). The family of valid masks
/// is closed under subsets, so a depth-first walk that only ever adds
/// higher-indexed directions visits each exactly once.
fn cubes_containing(u: &BitVectorSet, p: usize, m: usize) -> Vec<u32> {
    let dirs: Vec<usize> = (0..m).filter(|&j| u.contains(p ^ (1 << j))).collect();
    let mut masks = vec![0u32];
    fn grow(u: &BitVectorSet, p: usize, dirs: &[usize], start: usize, mask: u32, out: &mut Vec<u32>) {
        for (di, &j) in dirs.iter().enumerate().skip(start) {
            if extends(u, p, mask, j) {
                let next = mask | (1 << j);
                out.push(next);
                grow(u, p, dirs, di + 1, next, out);
            }
        }
    }
    grow(u, p, &dirs, 0, 0, &mut masks);
    masks
}

/// Whether doubling the cube `(p, mask)` along direction `j` stays inside `u`:
/// every current point's `j`-neighbour must be present.
fn extends(u: &BitVectorSet, p: usize, mask: u32, j: usize) -> bool {
    let bit = 1usize << j;
    let mut sub: u32 = 0;
    loop {
        if !u.contains(p ^ sub as usize ^ bit) {
            return false;
        }
        if sub == mask {
            return true;
        }
        sub = sub.wrapping_sub(mask) & mask;
    }
}

/// Whether two points could lie in one piece: the smallest cube enclosing
/// them must sit inside `u`.
fn can_share(u: &BitVectorSet, p: usize, q: usize) -> bool {
    if !u.contains(p | q) || !u.contains(p & q) {
        return false;
    }
    let free = (p ^ q) as u32;
    let base = p & q;
    let mut sub: u32 = 0;
    loop {
        if !u.contains(base | sub as usize) {
            return false;
        }
        if sub == free {
            return true;
        }
        sub = sub.wrapping_sub(free) & free;
    }
}

struct ComponentSolver {
    m: usize,
    set: BitVectorSet,
    best: Vec<Subcube>,
    nodes: u64,
}

impl ComponentSolver {
    fn new(m: usize, set: BitVectorSet) -> Self {
        ComponentSolver {
            m,
            set,
            best: Vec::new(),
            nodes: 0,
        }
    }

    fn solve(&mut self) -> Vec<Subcube> {
        let set = self.set.clone();
        if let Some(p) = set.first_point() {
            if set.len() == 1 {
                return vec![Subcube::point(self.m, p)];
            }
        } else {
            return Vec::new();
        }

        self.best = greedy_cover(&set, self.m);
        let lb = self.lower_bound(&set);
        if lb < self.best.len() && self.m <= MAX_GUILLOTINE_DIMENSION {
            let (count, pieces) = guillotine(&set, self.m);
            if count < self.best.len() {
                self.best = pieces;
            }
        }
        if lb < self.best.len() {
            let mut current = Vec::new();
            self.search(set, &mut current);
        }
        std::mem::take(&mut self.best)
    }

    fn search(&mut self, mut u: BitVectorSet, current: &mut Vec<Subcube>) {
        self.nodes += 1;
        // Points with no uncovered neighbour can only ever be singletons.
        let mut pushed = 0usize;
        loop {
            let isolated: Vec<usize> = u
                .points()
                .into_iter()
                .filter(|&p| (0..self.m).all(|j| !u.contains(p ^ (1 << j))))
                .collect();
            if isolated.is_empty() {
                break;
            }
            for p in isolated {
                current.push(Subcube::point(self.m, p));
                u.remove(p);
                pushed += 1;
            }
        }

        if u.is_empty() {
            if current.len() < self.best.len() {
                self.best = current.clone();
            }
        } else if current.len() + self.lower_bound(&u) < self.best.len() {
            // Branch on an uncovered point with the fewest open directions.
            let points = u.points();
            let branch = *points
                .iter()
                .min_by_key(|&&p| (0..self.m).filter(|&j| u.contains(p ^ (1 << j))).count())
                .unwrap();
            let mut cands = cubes_containing(&u, branch, self.m);
            cands.sort_by_key(|mask| std::cmp::Reverse(mask.count_ones()));
            for mask in cands {
                let cube = Subcube::new(self.m, mask, branch as u32 & !mask);
                let mut next = u.clone();
                next.remove_subcube(&cube);
                current.push(cube);
                self.search(next, current);
                current.pop();
                if current.len() + 1 >= self.best.len() {
                    break; // Even a one-piece finish cannot beat the incumbent.
                }
            }
        }

        for _ in 0..pushed {
            current.pop();
        }
    }

    /// Max of two valid lower bounds: a greedy pairwise-incompatible point
    /// set (two points that cannot share a piece need distinct pieces), and
    /// a volume bound `ceil(|u| / 2^D)` where `D` caps any piece's dimension
    /// by the best open degree of its points.
    fn lower_bound(&self, u: &BitVectorSet) -> usize {
        let points = u.points();
        if points.is_empty() {
            return 0;
        }
        let mut max_deg = 0usize;
        for &p in &points {
            let deg = (0..self.m).filter(|&j| u.contains(p ^ (1 << j))).count();
            max_deg = max_deg.max(deg);
        }
        let volume_lb = points.len().div_ceil(1 << max_deg.min(MAX_PARTITION_DIMENSION));

        let ascending = greedy_incompatible(u, points.iter().copied());
        let mut by_weight = points.clone();
        by_weight.sort_by_key(|&p| std::cmp::Reverse(p.count_ones()));
        let descending = greedy_incompatible(u, by_weight.into_iter());

        volume_lb.max(ascending).max(descending)
    }
}

fn greedy_incompatible(u: &BitVectorSet, order: impl Iterator<Item = usize>) -> usize {
    let mut chosen: Vec<usize> = Vec::new();
    for q in order {
        if chosen.iter().all(|&p| !can_share(u, p, q)) {
            chosen.push(q);
        }
    }
    chosen.len()
}

/// Cover greedily with the largest cube through the first uncovered point.
/// Cubes through a fixed point are disjoint from nothing by construction,
/// but removal keeps the running family disjoint, so this is a valid (not
/// necessarily optimal) partition.
fn greedy_cover(set: &BitVectorSet, m: usize) -> Vec<Subcube> {
    let mut u = set.clone();
    let mut pieces = Vec::new();
    while let Some(p) = u.first_point() {
        let mut best_mask = 0u32;
        for mask in cubes_containing(&u, p, m) {
            if mask.count_ones() > best_mask.count_ones() {
                best_mask = mask;
            }
        }
        let cube = Subcube::new(m, best_mask, p as u32 & !best_mask);
        u.remove_subcube(&cube);
        pieces.push(cube);
    }
    pieces
}

/// Optimal partition among those obtained by recursively fixing one
/// coordinate (an upper bound for the unrestricted problem). Memoised over
/// subcubes.
fn guillotine(set: &BitVectorSet, m: usize) -> (usize, Vec<Subcube>) {
    #[derive(Clone, Copy)]
    enum Action {
        Empty,
        Leaf,
        Split(u8),
    }
    type Memo = HashMap<(u32, u32), (u32, Action)>;

    fn go(set: &BitVectorSet, cube: Subcube, memo: &mut Memo) -> u32 {
        let key = (cube.free_mask(), cube.fixed_bits());
        if let Some(&(count, _)) = memo.get(&key) {
            return count;
        }
        let mut any_in = false;
        let mut any_out = false;
        for p in cube.points() {
            if set.contains(p) {
                any_in = true;
            } else {
                any_out = true;
            }
            if any_in && any_out {
                break;
            }
        }
        let entry = if !any_in {
            (0, Action::Empty)
        } else if !any_out {
            (1, Action::Leaf)
        } else {
            let mut best = (u32::MAX, Action::Empty);
            for j in 0..cube.m() {
                if cube.free_mask() >> j & 1 == 0 {
                    continue;
                }
                let count = go(set, cube.split(j, 0), memo) + go(set, cube.split(j, 1), memo);
                if count < best.0 {
                    best = (count, Action::Split(j as u8));
                }
            }
            best
        };
        memo.insert(key, entry);
        entry.0
    }

    fn collect(set: &BitVectorSet, cube: Subcube, memo: &Memo, out: &mut Vec<Subcube>) {
        match memo[&(cube.free_mask(), cube.fixed_bits())].1 {
            Action::Empty => {}
            Action::Leaf => out.push(cube),
            Action::Split(j) => {
                collect(set, cube.split(j as usize, 0), memo, out);
                collect(set, cube.split(j as usize, 1), memo, out);
            }
        }
    }

    let mut memo = Memo::new();
    let root = Subcube::whole(m);
    let count = go(set, root, &mut memo) as usize;
    let mut pieces = Vec::new();
    collect(set, root, &memo, &mut pieces);
    (count, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::pointset::{ball, ball_union, parity_set};

    #[test]
    fn partition_validity_checker_rejects_bad_witnesses() {
        let set = BitVectorSet::from_indices(2, [0, 1, 2]);
        let good = vec![Subcube::new(2, 0b01, 0), Subcube::point(2, 2)];
        assert!(is_valid_partition(&set, &good));
        // Overlapping pieces.
        let overlap = vec![Subcube::new(2, 0b01, 0), Subcube::new(2, 0b10, 0)];
        assert!(!is_valid_partition(&set, &overlap));
        // A piece escaping the set.
        let escape = vec![Subcube::whole(2)];
        assert!(!is_valid_partition(&set, &escape));
        // Not covering.
        let short = vec![Subcube::point(2, 0)];
        assert!(!is_valid_partition(&set, &short));
    }

    #[test]
    fn parity_needs_one_piece_per_point() {
        for m in 2..=5 {
            let set = parity_set(m, true);
            let out = partition_measure(&set).unwrap();
            assert_eq!(out.value, 1 << (m - 1), "m={m}");
            assert!(out.witness.iter().all(|c| c.dim() == 0));
            assert!(is_valid_partition(&set, &out.witness));
        }
    }

    #[test]
    fn cube_shapes_close_in_one_piece() {
        let out = partition_measure(&BitVectorSet::full(4)).unwrap();
        assert_eq!(out.value, 1);
        // A prefix-pinned subcube is itself a single piece.
        let set = BitVectorSet::from_fn(6, |idx| idx & 0b11 == 0);
        let out = partition_measure(&set).unwrap();
        assert_eq!(out.value, 1);
        assert_eq!(out.witness[0].pattern(), "00****");
        assert_eq!(partition_measure(&BitVectorSet::empty(3)).unwrap().value, 0);
    }

    #[test]
    fn balls_partition_into_binomially_many_pieces() {
        for (m, k, expect) in [(2, 1, 2), (3, 1, 3), (4, 1, 4), (5, 2, 10), (6, 2, 15)] {
            let set = ball(m, 0, k);
            let out = partition_measure(&set).unwrap();
            assert_eq!(out.value, expect, "m={m} k={k}");
            assert!(is_valid_partition(&set, &out.witness));
        }
    }

    #[test]
    fn distant_ball_pair_is_additive() {
        let centers = vec![vec![0, 0, 0, 0, 0, 0], vec![1, 1, 1, 1, 0, 0]];
        let union = ball_union(6, &centers, 1).unwrap();
        assert_eq!(union.len(), 14);
        let out = partition_measure(&union).unwrap();
        assert_eq!(out.value, 12);
    }

    #[test]
    fn spread_codeword_style_sets_are_all_singletons() {
        // Points pairwise at distance >= 2 admit no larger piece.
        let set = BitVectorSet::from_fn(5, |idx| idx.count_ones() % 2 == 0 && idx % 3 == 0);
        let out = partition_measure(&set).unwrap();
        assert_eq!(out.value, set.len());
    }

    #[test]
    fn value_is_invariant_under_xor_shift() {
        for seed in 0..10u64 {
            let set = BitVectorSet::from_fn(5, |idx| {
                let mut h = (idx as u64 + 1).wrapping_mul(0x517c_c1b7_2722_0a95) ^ (seed << 7);
                h ^= h >> 29;
                h % 4 == 0
            });
            let z = BitVectorSet::word_of_index(5, (seed as usize * 11 + 3) % 32);
            let shifted = set.xor_shift(&z).unwrap();
            let a = partition_measure(&set).unwrap();
            let b = partition_measure(&shifted).unwrap();
            assert_eq!(a.value, b.value, "seed={seed}");
            assert!(is_valid_partition(&shifted, &b.witness));
        }
    }

    #[test]
    fn guillotine_bound_is_exact_on_balls() {
        let set = ball(6, 0, 2);
        let (count, pieces) = guillotine(&set, 6);
        assert_eq!(count, 15);
        assert!(is_valid_partition(&set, &pieces));
    }
}
