//! Dominance machinery, the global nondominated archive and front quality
//! metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParetoError {
    #[error("objective vectors have different lengths: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("objective vector contains a non-finite entry: {value}")]
    NonFinite { value: f64 },
}

/// Vector of objective values, all minimized. Maximization objectives are
/// negated at problem-definition time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ParetoError> {
        if let Some(&value) = values.iter().find(|v| !v.is_finite()) {
            return Err(ParetoError::NonFinite { value });
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// True iff `a` is no worse than `b` in every component and strictly
/// better in at least one. Panics on length mismatch; see
/// [`try_dominates`] for the checked variant.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors must have equal length");
    let mut strict = false;
    for (&x, &y) in a.0.iter().zip(&b.0) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Checked dominance test.
pub fn try_dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    Ok(dominates(a, b))
}

/// For each member, the number of population members dominating it.
/// Members with index zero form the nondominated set.
pub fn dominance_index(population: &[ObjectiveVector]) -> Vec<usize> {
    let n = population.len();
    let mut counts = vec![0usize; n];
    for j in 0..n {
        for i in 0..n {
            if i != j && dominates(&population[i], &population[j]) {
                counts[j] += 1;
            }
        }
    }
    counts
}

/// Provenance of an archive entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    AgentBest,
    Perceived,
    Converged,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Origin::AgentBest => "agent_best",
            Origin::Perceived => "perceived",
            Origin::Converged => "converged",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub decision: Vec<f64>,
    pub objectives: ObjectiveVector,
    pub crowding: f64,
    pub origin: Origin,
}

impl ArchiveEntry {
    pub fn new(decision: Vec<f64>, objectives: ObjectiveVector, origin: Origin) -> Self {
        Self {
            decision,
            objectives,
            crowding: 0.0,
            origin,
        }
    }
}

/// Distance floor for coincident objective vectors in crowding sums.
pub const CROWDING_DISTANCE_FLOOR: f64 = 1e-12;

/// Global archive of nondominated entries with inverse-distance crowding.
#[derive(Debug, Clone)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    capacity: usize,
    /// Pairwise comparisons spent on archive management; instrumentation
    /// for the complexity contract.
    pub pairwise_ops: u64,
}

impl ParetoArchive {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: Vec::new(),
            capacity,
            pairwise_ops: 0,
        }
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.objectives.clone()).collect()
    }

    /// Inserts candidates, keeping the nondominated union, then recomputes
    /// crowding and prunes to capacity (most crowded removed first, the
    /// extreme entries of every objective kept unconditionally).
    pub fn update(&mut self, candidates: Vec<ArchiveEntry>) {
        'candidates: for candidate in candidates {
            // Decision-space duplicates are dropped before insertion.
            for entry in &self.entries {
                self.pairwise_ops += 1;
                if entry.decision == candidate.decision {
                    continue 'candidates;
                }
            }
            for entry in &self.entries {
                self.pairwise_ops += 1;
                if dominates(&entry.objectives, &candidate.objectives) {
                    continue 'candidates;
                }
            }
            let mut ops = 0u64;
            self.entries.retain(|entry| {
                ops += 1;
                !dominates(&candidate.objectives, &entry.objectives)
            });
            self.pairwise_ops += ops;
            self.entries.push(candidate);
        }
        self.refresh_crowding();
        self.prune();
    }

    fn refresh_crowding(&mut self) {
        let crowding = crowding_factors(&self.entries);
        self.pairwise_ops += (self.entries.len() * self.entries.len()) as u64;
        for (entry, c) in self.entries.iter_mut().zip(crowding) {
            entry.crowding = c;
        }
    }

    fn prune(&mut self) {
        if self.entries.len() <= self.capacity {
            return;
        }
        let m = self.entries[0].objectives.len();
        let mut protected = vec![false; self.entries.len()];
        for obj in 0..m {
            let mut lo = 0usize;
            let mut hi = 0usize;
            for (i, entry) in self.entries.iter().enumerate() {
                if entry.objectives.0[obj] < self.entries[lo].objectives.0[obj] {
                    lo = i;
                }
                if entry.objectives.0[obj] > self.entries[hi].objectives.0[obj] {
                    hi = i;
                }
            }
            protected[lo] = true;
            protected[hi] = true;
        }
        let excess = self.entries.len() - self.capacity;
        let mut removable: Vec<usize> = (0..self.entries.len())
            .filter(|&i| !protected[i])
            .collect();
        removable.sort_by(|&a, &b| {
            self.entries[b]
                .crowding
                .partial_cmp(&self.entries[a].crowding)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut remove = vec![false; self.entries.len()];
        for &i in removable.iter().take(excess) {
            remove[i] = true;
        }
        let mut keep_iter = remove.iter();
        self.entries.retain(|_| !keep_iter.next().unwrap());
        self.refresh_crowding();
    }

    /// Entries ordered most isolated first (ascending crowding); the
    /// communication order of the engine.
    pub fn isolation_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| {
            self.entries[a]
                .crowding
                .partial_cmp(&self.entries[b].crowding)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        order
    }
}

/// Inverse-distance crowding per entry: `(1/N) * sum_j 1/d(i, j)` over the
/// other entries, with distances in objective space normalized
/// per-objective to the archive's bounding box. Isolated entries score low.
pub fn crowding_factors(entries: &[ArchiveEntry]) -> Vec<f64> {
    let objectives: Vec<ObjectiveVector> = entries.iter().map(|e| e.objectives.clone()).collect();
    crowding_values(&objectives)
}

/// Crowding over bare objective vectors; shared by the archive and the
/// engine's population ranking.
pub fn crowding_values(objectives: &[ObjectiveVector]) -> Vec<f64> {
    let n = objectives.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![0.0];
    }
    let m = objectives[0].len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for obj in objectives {
        for (k, &v) in obj.0.iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let range: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(&l, &h)| if h > l { h - l } else { 1.0 })
        .collect();
    let mut factors = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d2 = 0.0;
            for k in 0..m {
                let d = (objectives[i].0[k] - objectives[j].0[k]) / range[k];
                d2 += d * d;
            }
            let d = d2.sqrt().max(CROWDING_DISTANCE_FLOOR);
            let contribution = 1.0 / d / n as f64;
            factors[i] += contribution;
            factors[j] += contribution;
        }
    }
    factors
}

/// Mean over reference points of the Euclidean distance to the nearest
/// front point.
pub fn distance_metric(front: &[ObjectiveVector], reference: &[ObjectiveVector]) -> f64 {
    assert!(!front.is_empty() && !reference.is_empty());
    let mut total = 0.0;
    for r in reference {
        let mut best = f64::INFINITY;
        for f in front {
            let d2: f64 = r
                .0
                .iter()
                .zip(&f.0)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            best = best.min(d2);
        }
        total += best.sqrt();
    }
    total / reference.len() as f64
}

/// Run metadata embedded in every export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveMeta {
    pub seed: u64,
    pub evaluations: u64,
    pub version: String,
    pub manifest_hash: String,
}

/// Archive as CSV text: a comment header row with the run metadata, then
/// `decision_0..n, objective_0..m, crowding, origin` per entry.
pub fn archive_to_csv(archive: &ParetoArchive, meta: &ArchiveMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# seed={} version={} manifest_hash={}\n",
        meta.seed, meta.version, meta.manifest_hash
    ));
    let (n, m) = match archive.entries().first() {
        Some(e) => (e.decision.len(), e.objectives.len()),
        None => (0, 0),
    };
    let mut header: Vec<String> = (0..n).map(|i| format!("decision_{i}")).collect();
    header.extend((0..m).map(|i| format!("objective_{i}")));
    header.push("crowding".into());
    header.push("origin".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for entry in archive.entries() {
        let mut row: Vec<String> = entry.decision.iter().map(|v| format!("{v}")).collect();
        row.extend(entry.objectives.0.iter().map(|v| format!("{v}")));
        row.push(format!("{}", entry.crowding));
        row.push(entry.origin.to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON mirror of the archive with run metadata.
pub fn archive_to_json(archive: &ParetoArchive, meta: &ArchiveMeta) -> String {
    #[derive(Serialize)]
    struct Mirror<'a> {
        meta: &'a ArchiveMeta,
        entries: &'a [ArchiveEntry],
    }
    serde_json::to_string_pretty(&Mirror {
        meta,
        entries: archive.entries(),
    })
    .expect("archive serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(values: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(values.to_vec()).unwrap()
    }

    fn entry(decision: &[f64], objectives: &[f64]) -> ArchiveEntry {
        ArchiveEntry::new(decision.to_vec(), ov(objectives), Origin::AgentBest)
    }

    #[test]
    fn dominance_basics() {
        assert!(dominates(&ov(&[1.0, 2.0]), &ov(&[2.0, 3.0])));
        assert!(!dominates(&ov(&[1.0, 2.0]), &ov(&[1.0, 2.0])));
        assert!(!dominates(&ov(&[1.0, 3.0]), &ov(&[2.0, 2.0])));
        assert!(!dominates(&ov(&[2.0, 2.0]), &ov(&[1.0, 3.0])));
    }

    #[test]
    fn checked_dominance_rejects_mismatch() {
        let r = try_dominates(&ov(&[1.0]), &ov(&[1.0, 2.0]));
        assert!(matches!(r, Err(ParetoError::LengthMismatch { .. })));
    }

    #[test]
    fn dominance_index_counts_dominators() {
        let pop = vec![ov(&[1.0, 2.0]), ov(&[2.0, 1.0]), ov(&[3.0, 3.0])];
        assert_eq!(dominance_index(&pop), vec![0, 0, 2]);
        assert_eq!(dominance_index(&[ov(&[5.0])]), vec![0]);
        let dup = vec![ov(&[1.0, 1.0]); 3];
        assert_eq!(dominance_index(&dup), vec![0, 0, 0]);
    }

    #[test]
    fn archive_update_examples() {
        let mut archive = ParetoArchive::new(100);
        archive.update(vec![entry(&[0.0], &[1.0, 1.0])]);
        assert_eq!(archive.len(), 1);

        let mut archive = ParetoArchive::new(100);
        archive.update(vec![entry(&[0.0], &[1.0, 2.0]), entry(&[1.0], &[2.0, 1.0])]);
        archive.update(vec![entry(&[2.0], &[0.0, 0.0])]);
        assert_eq!(archive.len(), 1);
        assert_eq!(archive.entries()[0].objectives.0, vec![0.0, 0.0]);

        let mut archive = ParetoArchive::new(100);
        archive.update(vec![entry(&[0.0], &[1.0, 2.0]), entry(&[1.0], &[2.0, 1.0])]);
        archive.update(vec![entry(&[2.0], &[1.5, 1.5])]);
        assert_eq!(archive.len(), 3);
    }

    #[test]
    fn archive_never_holds_dominated_pairs() {
        let mut archive = ParetoArchive::new(50);
        // Insert a lattice of points; only the antidiagonal survives.
        let mut candidates = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                candidates.push(entry(&[i as f64, j as f64], &[i as f64, j as f64]));
            }
        }
        archive.update(candidates);
        for a in archive.entries() {
            for b in archive.entries() {
                assert!(
                    !dominates(&a.objectives, &b.objectives),
                    "{:?} dominates {:?}",
                    a.objectives,
                    b.objectives
                );
            }
        }
    }

    #[test]
    fn update_is_idempotent() {
        let candidates = vec![
            entry(&[0.0], &[1.0, 2.0]),
            entry(&[1.0], &[2.0, 1.0]),
            entry(&[2.0], &[1.5, 1.5]),
        ];
        let mut archive = ParetoArchive::new(100);
        archive.update(candidates.clone());
        let snapshot: Vec<Vec<f64>> = archive
            .entries()
            .iter()
            .map(|e| e.decision.clone())
            .collect();
        archive.update(candidates);
        let again: Vec<Vec<f64>> = archive
            .entries()
            .iter()
            .map(|e| e.decision.clone())
            .collect();
        assert_eq!(snapshot, again);
    }

    #[test]
    fn crowding_examples() {
        let single = vec![entry(&[0.0], &[1.0, 1.0])];
        assert_eq!(crowding_factors(&single), vec![0.0]);

        // Two entries: normalized distance is sqrt(2) across the unit box
        // diagonal... the per-objective normalization maps both spans to
        // [0,1], so d = sqrt(2) and crowding = (1/2)(1/sqrt(2)).
        let two = vec![entry(&[0.0], &[0.0, 1.0]), entry(&[1.0], &[1.0, 0.0])];
        let c = crowding_factors(&two);
        let expected = 0.5 / 2f64.sqrt();
        assert!((c[0] - expected).abs() < 1e-12);
        assert!((c[1] - expected).abs() < 1e-12);

        // A two-point archive separated along one objective only has
        // normalized distance exactly 1.
        let pair = vec![entry(&[0.0], &[0.0, 5.0]), entry(&[1.0], &[1.0, 5.0])];
        let c = crowding_factors(&pair);
        assert!((c[0] - 0.5).abs() < 1e-12, "crowding {c:?}");

        // Middle of three collinear equally spaced entries is most crowded.
        let three = vec![
            entry(&[0.0], &[0.0, 2.0]),
            entry(&[1.0], &[1.0, 1.0]),
            entry(&[2.0], &[2.0, 0.0]),
        ];
        let c = crowding_factors(&three);
        assert!(c[1] > c[0] && c[1] > c[2], "crowding {c:?}");
    }

    #[test]
    fn capacity_pruning_keeps_extremes() {
        let mut archive = ParetoArchive::new(5);
        let candidates: Vec<ArchiveEntry> = (0..50)
            .map(|i| {
                let t = i as f64 / 49.0;
                entry(&[t], &[t, 1.0 - t])
            })
            .collect();
        archive.update(candidates);
        assert_eq!(archive.len(), 5);
        let f0: Vec<f64> = archive
            .entries()
            .iter()
            .map(|e| e.objectives.0[0])
            .collect();
        assert!(f0.iter().any(|&v| v == 0.0), "min extreme kept: {f0:?}");
        assert!(f0.iter().any(|&v| v == 1.0), "max extreme kept: {f0:?}");
    }

    #[test]
    fn positive_scaling_leaves_membership_unchanged() {
        let base = vec![
            ov(&[1.0, 4.0]),
            ov(&[2.0, 3.0]),
            ov(&[3.0, 3.5]),
            ov(&[0.5, 6.0]),
        ];
        let scaled: Vec<ObjectiveVector> =
            base.iter().map(|v| ov(&v.0.iter().map(|x| x * 7.5).collect::<Vec<_>>())).collect();
        assert_eq!(dominance_index(&base), dominance_index(&scaled));
    }

    #[test]
    fn distance_metric_examples() {
        let front = vec![ov(&[0.0, 1.0]), ov(&[0.5, 0.5]), ov(&[1.0, 0.0])];
        assert_eq!(distance_metric(&front, &front), 0.0);
        let shifted: Vec<ObjectiveVector> = front
            .iter()
            .map(|v| ov(&[v.0[0], v.0[1] + 0.01]))
            .collect();
        let d = distance_metric(&front, &shifted);
        assert!((d - 0.01).abs() < 1e-12, "d = {d}");
    }

    #[test]
    fn csv_export_schema() {
        let mut archive = ParetoArchive::new(10);
        archive.update(vec![entry(&[0.25, 0.5], &[1.0, 2.0])]);
        let meta = ArchiveMeta {
            seed: 42,
            evaluations: 100,
            version: "0.1.0".into(),
            manifest_hash: "abc".into(),
        };
        let csv = archive_to_csv(&archive, &meta);
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# seed=42"));
        assert_eq!(
            lines.next().unwrap(),
            "decision_0,decision_1,objective_0,objective_1,crowding,origin"
        );
        assert_eq!(lines.next().unwrap(), "0.25,0.5,1,2,0,agent_best");
    }
}
