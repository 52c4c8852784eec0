//! Adaptive partition of the search box into subdomains: density tracking,
//! branching-scheme adaptation from archive clusters, and subdomain
//! selection for further decomposition.

use std::collections::{BTreeMap, BTreeSet};

use log::debug;

use crate::interval::{normalized_volume, Interval};
use crate::numeric::KahanSum;

/// One box of the partition.
#[derive(Debug, Clone)]
pub struct Subdomain {
    pub boxed: Vec<Interval>,
    /// Samples assigned to this box. Real-valued: a split redistributes the
    /// parent count over the children proportionally to volume so densities
    /// stay continuous across branchings.
    pub sample_count: f64,
    /// Samples per normalized volume.
    pub density: f64,
    pub depth: usize,
    /// Times the ancestry was branched without improvement.
    pub parent_no_improve: usize,
    pub contains_front_member: bool,
    improved: bool,
}

impl Subdomain {
    fn contains(&self, point: &[f64]) -> bool {
        self.boxed
            .iter()
            .zip(point)
            .all(|(iv, &x)| iv.contains(x))
    }

    fn lex_key(&self) -> Vec<(f64, f64)> {
        self.boxed.iter().map(|iv| (iv.lo, iv.hi)).collect()
    }
}

/// Which coordinates to split and where.
#[derive(Debug, Clone, Default)]
pub struct BranchingScheme {
    pub split_indices: BTreeSet<usize>,
    pub cut_points: BTreeMap<usize, f64>,
    cut_history: Vec<usize>,
}

impl BranchingScheme {
    /// Initial scheme: user-chosen split coordinates, cuts at domain
    /// midpoints.
    pub fn new(domain: &[Interval], split_indices: impl IntoIterator<Item = usize>) -> Self {
        let split_indices: BTreeSet<usize> = split_indices.into_iter().collect();
        let cut_points = domain
            .iter()
            .enumerate()
            .map(|(i, iv)| (i, iv.midpoint()))
            .collect();
        Self {
            split_indices,
            cut_points,
            cut_history: vec![0; domain.len()],
        }
    }

    pub fn cuts_applied(&self, coordinate: usize) -> usize {
        self.cut_history.get(coordinate).copied().unwrap_or(0)
    }
}

/// Archive member handed to the branching logic: decision coordinates plus
/// a scalar fitness (lower is better).
#[derive(Debug, Clone)]
pub struct FrontMember {
    pub decision: Vec<f64>,
    pub fitness: f64,
}

/// Subdomain selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Least-sampled subdomain among those containing front members.
    #[serde(rename = "front")]
    FrontGuided,
    /// Merit score `(1 - nu) * density + nu * best_fitness`, both
    /// min-max normalized over the partition.
    Merit,
}

#[derive(Debug, Clone)]
pub struct BranchReport {
    pub branched_box: Vec<Interval>,
    pub children: usize,
}

/// The partition of the search domain.
#[derive(Debug, Clone)]
pub struct Partition {
    domain: Vec<Interval>,
    subdomains: Vec<Subdomain>,
    max_depth: usize,
}

impl Partition {
    pub fn new(domain: Vec<Interval>, max_depth: usize) -> Self {
        let root = Subdomain {
            boxed: domain.clone(),
            sample_count: 0.0,
            density: 0.0,
            depth: 0,
            parent_no_improve: 0,
            contains_front_member: false,
            improved: false,
        };
        Self {
            domain,
            subdomains: vec![root],
            max_depth,
        }
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Index of the subdomain owning `point`; boundary points go to the
    /// lexicographically lowest containing box.
    pub fn owner_of(&self, point: &[f64]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, sub) in self.subdomains.iter().enumerate() {
            if sub.contains(point) {
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if self.subdomains[i].lex_key() < self.subdomains[b].lex_key() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        best
    }

    /// Adds samples to the census and refreshes densities.
    pub fn record_samples(&mut self, samples: &[Vec<f64>]) {
        for sample in samples {
            if let Some(i) = self.owner_of(sample) {
                self.subdomains[i].sample_count += 1.0;
            }
        }
        self.refresh_densities();
    }

    fn refresh_densities(&mut self) {
        for sub in &mut self.subdomains {
            let volume = normalized_volume(&sub.boxed, &self.domain);
            sub.density = if volume > 0.0 {
                sub.sample_count / volume
            } else {
                sub.sample_count
            };
        }
    }

    /// Minimum-density subdomain; ties broken by larger volume, then by
    /// lexicographic box order.
    pub fn lowest_density_subdomain(&self) -> &Subdomain {
        let mut best = 0usize;
        for i in 1..self.subdomains.len() {
            let a = &self.subdomains[i];
            let b = &self.subdomains[best];
            let va = normalized_volume(&a.boxed, &self.domain);
            let vb = normalized_volume(&b.boxed, &self.domain);
            let better = if a.density != b.density {
                a.density < b.density
            } else if va != vb {
                va > vb
            } else {
                a.lex_key() < b.lex_key()
            };
            if better {
                best = i;
            }
        }
        &self.subdomains[best]
    }

    /// Marks the subdomain containing a fresh nondominated decision: it now
    /// holds a front member and counts as improved for branching.
    pub fn mark_improvement(&mut self, decision: &[f64]) {
        if let Some(i) = self.owner_of(decision) {
            self.subdomains[i].improved = true;
            self.subdomains[i].contains_front_member = true;
        }
    }

    /// Refreshes front membership flags from the current archive decisions.
    pub fn refresh_front_membership(&mut self, front_decisions: &[Vec<f64>]) {
        for sub in &mut self.subdomains {
            sub.contains_front_member = false;
        }
        for decision in front_decisions {
            if let Some(i) = self.owner_of(decision) {
                self.subdomains[i].contains_front_member = true;
            }
        }
    }

    /// Total normalized volume; one within 1e-12 by the tiling invariant.
    pub fn total_normalized_volume(&self) -> f64 {
        let mut acc = KahanSum::new();
        for sub in &self.subdomains {
            acc.add(normalized_volume(&sub.boxed, &self.domain));
        }
        acc.value()
    }

    /// Selects a subdomain and splits it along the scheme's coordinates.
    /// Returns `None` (logged) when no candidate qualifies.
    pub fn select_and_branch(
        &mut self,
        scheme: &mut BranchingScheme,
        front_members: &[FrontMember],
        mode: SelectionMode,
        nu: f64,
        no_improve_threshold: usize,
    ) -> Option<BranchReport> {
        self.refresh_front_membership(
            &front_members
                .iter()
                .map(|m| m.decision.clone())
                .collect::<Vec<_>>(),
        );
        let chosen = match mode {
            SelectionMode::FrontGuided => self.pick_front_guided(no_improve_threshold),
            SelectionMode::Merit => self.pick_merit(front_members, nu),
        };
        let Some(index) = chosen else {
            debug!("branching skipped: no eligible subdomain");
            return None;
        };
        self.split(index, scheme)
    }

    fn pick_front_guided(&self, no_improve_threshold: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, sub) in self.subdomains.iter().enumerate() {
            if !sub.contains_front_member
                || sub.parent_no_improve > no_improve_threshold
                || sub.depth >= self.max_depth
            {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    let cur = &self.subdomains[b];
                    if sub.sample_count < cur.sample_count
                        || (sub.sample_count == cur.sample_count && sub.lex_key() < cur.lex_key())
                    {
                        Some(i)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    fn pick_merit(&self, front_members: &[FrontMember], nu: f64) -> Option<usize> {
        let n = self.subdomains.len();
        let mut best_fitness = vec![f64::INFINITY; n];
        for member in front_members {
            if let Some(i) = self.owner_of(&member.decision) {
                best_fitness[i] = best_fitness[i].min(member.fitness);
            }
        }
        let (dmin, dmax) = self
            .subdomains
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.density), hi.max(s.density))
            });
        let finite: Vec<f64> = best_fitness.iter().copied().filter(|v| v.is_finite()).collect();
        let (fmin, fmax) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let mut best: Option<(usize, f64)> = None;
        for (i, sub) in self.subdomains.iter().enumerate() {
            if sub.depth >= self.max_depth {
                continue;
            }
            let density_norm = if dmax > dmin {
                (sub.density - dmin) / (dmax - dmin)
            } else {
                0.0
            };
            let fitness_norm = if best_fitness[i].is_finite() && fmax > fmin {
                (best_fitness[i] - fmin) / (fmax - fmin)
            } else if best_fitness[i].is_finite() {
                0.0
            } else {
                1.0
            };
            let merit = (1.0 - nu) * density_norm + nu * fitness_norm;
            let better = match best {
                None => true,
                Some((b, m)) => {
                    merit < m
                        || (merit == m && sub.lex_key() < self.subdomains[b].lex_key())
                }
            };
            if better {
                best = Some((i, merit));
            }
        }
        best.map(|(i, _)| i)
    }

    fn split(&mut self, index: usize, scheme: &mut BranchingScheme) -> Option<BranchReport> {
        let parent = self.subdomains[index].clone();
        // Only coordinates whose cut falls strictly inside this box apply;
        // one event splits at most MAX_SPLIT_COORDS of them.
        let cuts: Vec<(usize, f64)> = scheme
            .split_indices
            .iter()
            .filter_map(|&coord| {
                let cut = *scheme.cut_points.get(&coord)?;
                let iv = parent.boxed.get(coord)?;
                (iv.lo < cut && cut < iv.hi).then_some((coord, cut))
            })
            .take(MAX_SPLIT_COORDS)
            .collect();
        if cuts.is_empty() {
            debug!("branching skipped: no cut point inside the selected box");
            return None;
        }
        let parent_volume = normalized_volume(&parent.boxed, &self.domain);
        let child_no_improve = if parent.improved {
            0
        } else {
            parent.parent_no_improve + 1
        };
        let mut children: Vec<Vec<Interval>> = vec![parent.boxed.clone()];
        for &(coord, cut) in &cuts {
            let mut next = Vec::with_capacity(children.len() * 2);
            for child in &children {
                let mut left = child.clone();
                let mut right = child.clone();
                // Children share the cut value bitwise: no tiling gaps.
                left[coord] = Interval { lo: child[coord].lo, hi: cut };
                right[coord] = Interval { lo: cut, hi: child[coord].hi };
                next.push(left);
                next.push(right);
            }
            children = next;
            scheme.cut_history[coord] += 1;
        }
        let report = BranchReport {
            branched_box: parent.boxed.clone(),
            children: children.len(),
        };
        self.subdomains.swap_remove(index);
        for boxed in children {
            let volume = normalized_volume(&boxed, &self.domain);
            let share = if parent_volume > 0.0 {
                volume / parent_volume
            } else {
                0.0
            };
            self.subdomains.push(Subdomain {
                sample_count: parent.sample_count * share,
                density: 0.0,
                depth: parent.depth + 1,
                parent_no_improve: child_no_improve,
                contains_front_member: false,
                improved: false,
                boxed,
            });
        }
        self.refresh_densities();
        Some(report)
    }

    /// JSON dump of the partition for post-run inspection.
    pub fn to_json(&self) -> String {
        use serde_json::json;
        let subdomains: Vec<_> = self
            .subdomains
            .iter()
            .map(|s| {
                json!({
                    "box": s.boxed.iter().map(|iv| [iv.lo, iv.hi]).collect::<Vec<_>>(),
                    "density": s.density,
                    "samples": s.sample_count,
                    "depth": s.depth,
                    "parent_no_improve": s.parent_no_improve,
                    "contains_front_member": s.contains_front_member,
                })
            })
            .collect();
        serde_json::to_string_pretty(&json!({
            "domain": self.domain.iter().map(|iv| [iv.lo, iv.hi]).collect::<Vec<_>>(),
            "subdomains": subdomains,
        }))
        .expect("partition serializes")
    }
}

/// Single-linkage 1-D clustering: sorted values split where consecutive
/// gaps exceed `gap`. Returns clusters as index lists into `values`.
fn cluster_1d(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut clusters = vec![vec![order[0]]];
    for pair in order.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        if values[next] - values[prev] > gap {
            clusters.push(Vec::new());
        }
        clusters.last_mut().unwrap().push(next);
    }
    clusters
}

/// Relative gap threshold for the archive-cluster detection.
pub const CLUSTER_GAP_FRACTION: f64 = 0.1;

/// Coordinates split by a single branching event; bounds the children at
/// `2^MAX_SPLIT_COORDS` per event.
pub const MAX_SPLIT_COORDS: usize = 3;

/// Adapts the branching scheme from the archive: coordinates whose cluster
/// count exceeds their historical cut count join the split set; cut points
/// move to the midpoint between the best-fitness and worst-fitness cluster
/// centroids (or the farther domain boundary when only one cluster exists).
pub fn adapt_scheme(
    scheme: &mut BranchingScheme,
    domain: &[Interval],
    members: &[FrontMember],
) {
    if members.is_empty() {
        return;
    }
    for (coord, iv) in domain.iter().enumerate() {
        let values: Vec<f64> = members.iter().map(|m| m.decision[coord]).collect();
        let gap = CLUSTER_GAP_FRACTION * iv.width();
        let clusters = cluster_1d(&values, gap);
        // A single cluster is not a "high number": without it every
        // coordinate would join on the first adaptation and one branching
        // would shatter the box 2^n ways.
        if clusters.len() > scheme.cuts_applied(coord).max(1) {
            scheme.split_indices.insert(coord);
        }
        if !scheme.split_indices.contains(&coord) {
            continue;
        }
        let centroid = |cluster: &[usize]| -> f64 {
            cluster.iter().map(|&i| values[i]).sum::<f64>() / cluster.len() as f64
        };
        let fitness_of = |cluster: &[usize]| -> (f64, f64) {
            let lo = cluster
                .iter()
                .map(|&i| members[i].fitness)
                .fold(f64::INFINITY, f64::min);
            let hi = cluster
                .iter()
                .map(|&i| members[i].fitness)
                .fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        };
        let cut = if clusters.len() == 1 {
            let c = centroid(&clusters[0]);
            // The farther boundary stands in for the missing cluster.
            let far = if (c - iv.lo).abs() >= (iv.hi - c).abs() {
                iv.lo
            } else {
                iv.hi
            };
            0.5 * (c + far)
        } else {
            let best = clusters
                .iter()
                .min_by(|a, b| fitness_of(a).0.partial_cmp(&fitness_of(b).0).unwrap())
                .unwrap();
            let worst = clusters
                .iter()
                .max_by(|a, b| fitness_of(a).1.partial_cmp(&fitness_of(b).1).unwrap())
                .unwrap();
            0.5 * (centroid(best) + centroid(worst))
        };
        if iv.lo < cut && cut < iv.hi {
            scheme.cut_points.insert(coord, cut);
        }
    }
}
