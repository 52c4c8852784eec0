//! Interval-valued basic probability assignments and the Belief and
//! Plausibility of threshold events on response functions.
//!
//! A guess about an uncertain parameter is a set of (possibly overlapping)
//! intervals, each carrying a positive mass, with masses summing to one.
//! The joint focal elements of several parameters are the Cartesian-product
//! boxes with multiplied masses. Belief of an event sums the masses of
//! boxes entirely inside the event; Plausibility those that intersect it.

mod load;
mod robust;

pub use load::{load_bpa_file, parse_bpa_json, BpaFileError};
pub use robust::{
    BeliefValues, EventSpec, MarginBinding, RobustProblem, ThresholdSource,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::interval::{Interval, IntervalError};
use crate::numeric::KahanSum;
use crate::sampling::latin_hypercube;

/// Masses must reach one within this defect.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Corner enumeration refuses boxes with more dimensions than this.
pub const DEFAULT_CORNER_DIM_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum EvidenceError {
    #[error("parameter '{parameter}' has no focal elements")]
    EmptyBpa { parameter: String },
    #[error("parameter '{parameter}' masses sum to {sum} (defect {defect:.3e})")]
    MassNotNormalized {
        parameter: String,
        sum: f64,
        defect: f64,
    },
    #[error("parameter '{parameter}' carries a non-positive or non-finite mass {mass}")]
    BadMass { parameter: String, mass: f64 },
    #[error("uncertain space has no dimensions")]
    EmptySpace,
    #[error("margin value {value} for slot {slot} is outside [0, 1]")]
    MarginOutOfRange { slot: usize, value: f64 },
    #[error("margin slot {slot} referenced by dimension {dim} is missing from the margin vector of length {provided}")]
    MarginSlotMissing {
        dim: usize,
        slot: usize,
        provided: usize,
    },
    #[error("corner enumeration over {dims} dimensions exceeds the limit of {max}; use CornersPlusSampling or GridOracle")]
    DimensionTooLarge { dims: usize, max: usize },
    #[error("response produced a non-finite value at {point:?} inside box {boxed:?}")]
    ResponseFailure {
        point: Vec<f64>,
        boxed: Vec<Interval>,
    },
    #[error("event references response output {index} but only {outputs} outputs exist")]
    ResponseIndexOutOfRange { index: usize, outputs: usize },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// One interval with its basic probability mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalElement {
    pub interval: Interval,
    pub mass: f64,
}

/// Evidence structure for one uncertain parameter. Intervals may overlap;
/// masses are positive and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BpaStructure {
    pub parameter_name: String,
    elements: Vec<FocalElement>,
}

impl BpaStructure {
    pub fn new(
        parameter_name: impl Into<String>,
        elements: Vec<(Interval, f64)>,
    ) -> Result<Self, EvidenceError> {
        let parameter_name = parameter_name.into();
        if elements.is_empty() {
            return Err(EvidenceError::EmptyBpa {
                parameter: parameter_name,
            });
        }
        let mut sum = KahanSum::new();
        for &(_, mass) in &elements {
            if !(mass.is_finite() && mass > 0.0 && mass <= 1.0) {
                return Err(EvidenceError::BadMass {
                    parameter: parameter_name,
                    mass,
                });
            }
            sum.add(mass);
        }
        let total = sum.value();
        let defect = (total - 1.0).abs();
        if defect > MASS_TOLERANCE {
            return Err(EvidenceError::MassNotNormalized {
                parameter: parameter_name,
                sum: total,
                defect,
            });
        }
        Ok(Self {
            parameter_name,
            elements: elements
                .into_iter()
                .map(|(interval, mass)| FocalElement { interval, mass })
                .collect(),
        })
    }

    /// Convenience constructor from `(lo, hi, mass)` rows.
    pub fn from_rows(
        parameter_name: impl Into<String>,
        rows: &[(f64, f64, f64)],
    ) -> Result<Self, EvidenceError> {
        let elements = rows
            .iter()
            .map(|&(lo, hi, mass)| Ok((Interval::new(lo, hi)?, mass)))
            .collect::<Result<Vec<_>, EvidenceError>>()?;
        Self::new(parameter_name, elements)
    }

    /// Single interval with full mass and a residual catch-all element.
    /// The stated interval keeps `mass`; the remaining `1 - mass` spans the
    /// stated interval widened by `widen` about its midpoint.
    pub fn with_catch_all(
        parameter_name: impl Into<String>,
        interval: Interval,
        mass: f64,
        widen: f64,
    ) -> Result<Self, EvidenceError> {
        let residual = 1.0 - mass;
        let wide = interval.scale_about_midpoint(widen);
        Self::new(
            parameter_name,
            vec![(interval, mass), (wide, residual)],
        )
    }

    pub fn elements(&self) -> &[FocalElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Cartesian-product focal element over all uncertain dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFocalElement {
    pub boxed: Vec<Interval>,
    pub mass: f64,
}

/// The product space of all uncertain parameters. Dimensions listed in
/// `margin_indices` have their intervals rescaled about the midpoint by the
/// margin value in the corresponding slot of the margin vector.
#[derive(Debug, Clone)]
pub struct UncertainSpace {
    pub dims: Vec<BpaStructure>,
    pub margin_indices: BTreeMap<usize, usize>,
}

impl UncertainSpace {
    pub fn new(dims: Vec<BpaStructure>) -> Result<Self, EvidenceError> {
        if dims.is_empty() {
            return Err(EvidenceError::EmptySpace);
        }
        Ok(Self {
            dims,
            margin_indices: BTreeMap::new(),
        })
    }

    pub fn with_margins(
        dims: Vec<BpaStructure>,
        margin_indices: BTreeMap<usize, usize>,
    ) -> Result<Self, EvidenceError> {
        let mut space = Self::new(dims)?;
        space.margin_indices = margin_indices;
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Number of joint focal elements (product of per-dimension counts).
    pub fn joint_count(&self) -> usize {
        self.dims.iter().map(BpaStructure::len).product()
    }

    /// Per-dimension focal elements after margin scaling.
    fn scaled_dims(&self, margin_values: &[f64]) -> Result<Vec<Vec<FocalElement>>, EvidenceError> {
        for (&dim, &slot) in &self.margin_indices {
            match margin_values.get(slot) {
                None => {
                    return Err(EvidenceError::MarginSlotMissing {
                        dim,
                        slot,
                        provided: margin_values.len(),
                    })
                }
                Some(&value) if !(0.0..=1.0).contains(&value) || !value.is_finite() => {
                    return Err(EvidenceError::MarginOutOfRange { slot, value });
                }
                Some(_) => {}
            }
        }
        Ok(self
            .dims
            .iter()
            .enumerate()
            .map(|(d, bpa)| {
                let factor = self
                    .margin_indices
                    .get(&d)
                    .map(|&slot| margin_values[slot]);
                bpa.elements
                    .iter()
                    .map(|fe| FocalElement {
                        interval: match factor {
                            Some(f) => fe.interval.scale_about_midpoint(f),
                            None => fe.interval,
                        },
                        mass: fe.mass,
                    })
                    .collect()
            })
            .collect())
    }

    /// Lazily enumerates all joint focal elements in lexicographic
    /// dimension order (first dimension slowest).
    pub fn joint_elements_iter(
        &self,
        margin_values: &[f64],
    ) -> Result<JointElementIter, EvidenceError> {
        if self.dims.is_empty() {
            return Err(EvidenceError::EmptySpace);
        }
        for bpa in &self.dims {
            if bpa.is_empty() {
                return Err(EvidenceError::EmptyBpa {
                    parameter: bpa.parameter_name.clone(),
                });
            }
        }
        let scaled = self.scaled_dims(margin_values)?;
        Ok(JointElementIter {
            dims: scaled,
            odometer: None,
        })
    }
}

/// Odometer over the per-dimension element lists.
pub struct JointElementIter {
    dims: Vec<Vec<FocalElement>>,
    odometer: Option<Vec<usize>>,
}

impl Iterator for JointElementIter {
    type Item = JointFocalElement;

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.odometer {
            None => self.odometer = Some(vec![0; self.dims.len()]),
            Some(idx) => {
                // Advance with the last dimension fastest.
                let mut d = self.dims.len();
                loop {
                    if d == 0 {
                        return None;
                    }
                    d -= 1;
                    idx[d] += 1;
                    if idx[d] < self.dims[d].len() {
                        break;
                    }
                    idx[d] = 0;
                }
            }
        }
        let idx = self.odometer.as_ref().unwrap();
        let mut boxed = Vec::with_capacity(self.dims.len());
        let mut mass = 1.0;
        for (d, &i) in idx.iter().enumerate() {
            let fe = &self.dims[d][i];
            boxed.push(fe.interval);
            mass *= fe.mass;
        }
        Some(JointFocalElement { boxed, mass })
    }
}

/// Computes all joint focal elements with margin-scaled boxes.
pub fn joint_elements(
    space: &UncertainSpace,
    margin_values: &[f64],
) -> Result<Vec<JointFocalElement>, EvidenceError> {
    Ok(space.joint_elements_iter(margin_values)?.collect())
}

/// Direction of a threshold event on a response output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    /// The event `{ g <= v }`.
    Leq,
    /// The event `{ g >= v }`.
    Geq,
}

/// Threshold event on one output of a response function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEvent {
    pub response_index: usize,
    pub threshold: f64,
    pub direction: EventDirection,
}

impl ThresholdEvent {
    pub fn leq(response_index: usize, threshold: f64) -> Self {
        Self {
            response_index,
            threshold,
            direction: EventDirection::Leq,
        }
    }

    pub fn geq(response_index: usize, threshold: f64) -> Self {
        Self {
            response_index,
            threshold,
            direction: EventDirection::Geq,
        }
    }

    /// Box entirely inside the event.
    fn contains_box(&self, ext: &BoxExtremum) -> bool {
        match self.direction {
            EventDirection::Leq => ext.max_value <= self.threshold,
            EventDirection::Geq => ext.min_value >= self.threshold,
        }
    }

    /// Box intersecting the event.
    fn intersects_box(&self, ext: &BoxExtremum) -> bool {
        match self.direction {
            EventDirection::Leq => ext.min_value <= self.threshold,
            EventDirection::Geq => ext.max_value >= self.threshold,
        }
    }
}

/// How a response is bounded over a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumMethod {
    /// All `2^d` vertices. Exact for monotone responses.
    Corners,
    /// Vertices plus Latin-hypercube interior samples (`None` means
    /// `50 * d`). Reports the running min/max over every evaluated point,
    /// so the max is an inner estimate for non-monotone responses: adding
    /// samples pushes Belief of upper-threshold events toward the safe
    /// (smaller) side.
    CornersPlusSampling { samples: Option<usize>, seed: u64 },
    /// Regular grid of the given resolution per dimension. Test oracle.
    GridOracle { points_per_dim: usize },
}

/// Min/max of a response over a box together with the method that
/// produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxExtremum {
    pub min_value: f64,
    pub max_value: f64,
    pub method: ExtremumMethod,
}

/// Vector-valued response handle: maps a point of the uncertain space to
/// one or more scalar outputs.
pub type Response<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

fn box_hash(boxed: &[Interval]) -> u64 {
    // FNV-1a over the raw bit patterns; keeps interior sampling
    // deterministic regardless of evaluation order.
    let mut h: u64 = 0xcbf29ce484222325;
    for iv in boxed {
        for bits in [iv.lo.to_bits(), iv.hi.to_bits()] {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

fn sample_points(boxed: &[Interval], method: ExtremumMethod) -> Result<Vec<Vec<f64>>, EvidenceError> {
    sample_points_limited(boxed, method, DEFAULT_CORNER_DIM_LIMIT)
}

fn sample_points_limited(
    boxed: &[Interval],
    method: ExtremumMethod,
    corner_dim_limit: usize,
) -> Result<Vec<Vec<f64>>, EvidenceError> {
    let d = boxed.len();
    match method {
        ExtremumMethod::Corners | ExtremumMethod::CornersPlusSampling { .. } => {
            if matches!(method, ExtremumMethod::Corners) && d > corner_dim_limit {
                return Err(EvidenceError::DimensionTooLarge {
                    dims: d,
                    max: corner_dim_limit,
                });
            }
            // Degenerate dimensions contribute one endpoint, not two.
            let endpoints: Vec<Vec<f64>> = boxed
                .iter()
                .map(|iv| {
                    if iv.lo == iv.hi {
                        vec![iv.lo]
                    } else {
                        vec![iv.lo, iv.hi]
                    }
                })
                .collect();
            let mut points = vec![vec![]];
            for dim_eps in &endpoints {
                let mut next = Vec::with_capacity(points.len() * dim_eps.len());
                for p in &points {
                    for &e in dim_eps {
                        let mut q = p.clone();
                        q.push(e);
                        next.push(q);
                    }
                }
                points = next;
            }
            if let ExtremumMethod::CornersPlusSampling { samples, seed } = method {
                use rand::SeedableRng;
                let count = samples.unwrap_or(50 * d);
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ box_hash(boxed));
                points.extend(latin_hypercube(boxed, count, &mut rng));
            }
            Ok(points)
        }
        ExtremumMethod::GridOracle { points_per_dim } => {
            let m = points_per_dim.max(2);
            let axes: Vec<Vec<f64>> = boxed
                .iter()
                .map(|iv| {
                    if iv.lo == iv.hi {
                        vec![iv.lo]
                    } else {
                        (0..m)
                            .map(|i| iv.lo + iv.width() * i as f64 / (m - 1) as f64)
                            .collect()
                    }
                })
                .collect();
            let mut points = vec![vec![]];
            for axis in &axes {
                let mut next = Vec::with_capacity(points.len() * axis.len());
                for p in &points {
                    for &x in axis {
                        let mut q = p.clone();
                        q.push(x);
                        next.push(q);
                    }
                }
                points = next;
            }
            Ok(points)
        }
    }
}

/// Bounds every output of `response` over `boxed` with shared evaluation
/// points.
pub fn box_extrema_multi(
    response: Response<'_>,
    boxed: &[Interval],
    method: ExtremumMethod,
    outputs: usize,
) -> Result<Vec<BoxExtremum>, EvidenceError> {
    let points = sample_points(boxed, method)?;
    let mut extrema = vec![
        BoxExtremum {
            min_value: f64::INFINITY,
            max_value: f64::NEG_INFINITY,
            method,
        };
        outputs
    ];
    for point in &points {
        let values = response(point);
        if values.len() < outputs {
            return Err(EvidenceError::ResponseIndexOutOfRange {
                index: outputs - 1,
                outputs: values.len(),
            });
        }
        for (o, &v) in values.iter().take(outputs).enumerate() {
            if v.is_nan() {
                return Err(EvidenceError::ResponseFailure {
                    point: point.clone(),
                    boxed: boxed.to_vec(),
                });
            }
            if v < extrema[o].min_value {
                extrema[o].min_value = v;
            }
            if v > extrema[o].max_value {
                extrema[o].max_value = v;
            }
        }
    }
    Ok(extrema)
}

/// Bounds a scalar response over a box.
pub fn box_extremum(
    response: &dyn Fn(&[f64]) -> f64,
    boxed: &[Interval],
    method: ExtremumMethod,
) -> Result<BoxExtremum, EvidenceError> {
    let vectorized = |p: &[f64]| vec![response(p)];
    Ok(box_extrema_multi(&vectorized, boxed, method, 1)?[0])
}

fn check_event_indices(events: &[ThresholdEvent], outputs: usize) -> Result<(), EvidenceError> {
    for ev in events {
        if ev.response_index >= outputs {
            return Err(EvidenceError::ResponseIndexOutOfRange {
                index: ev.response_index,
                outputs,
            });
        }
    }
    Ok(())
}

/// Belief and Plausibility of several events over the same response in one
/// sweep through the joint focal elements. Returns `(belief, plausibility)`
/// per event.
pub fn belief_plausibility_batch(
    space: &UncertainSpace,
    margin_values: &[f64],
    response: Response<'_>,
    events: &[ThresholdEvent],
    method: ExtremumMethod,
) -> Result<Vec<(f64, f64)>, EvidenceError> {
    let outputs = events
        .iter()
        .map(|e| e.response_index + 1)
        .max()
        .unwrap_or(1);
    check_event_indices(events, outputs)?;
    let mut bel = vec![KahanSum::new(); events.len()];
    let mut pl = vec![KahanSum::new(); events.len()];
    for element in space.joint_elements_iter(margin_values)? {
        let extrema = box_extrema_multi(response, &element.boxed, method, outputs)?;
        for (e, event) in events.iter().enumerate() {
            let ext = &extrema[event.response_index];
            if event.contains_box(ext) {
                bel[e].add(element.mass);
            }
            if event.intersects_box(ext) {
                pl[e].add(element.mass);
            }
        }
    }
    Ok(bel
        .iter()
        .zip(&pl)
        .map(|(b, p)| (b.value().clamp(0.0, 1.0), p.value().clamp(0.0, 1.0)))
        .collect())
}

/// Belief of a threshold event: total mass of joint focal elements whose
/// box lies entirely inside the event.
pub fn belief(
    space: &UncertainSpace,
    margin_values: &[f64],
    response: Response<'_>,
    event: &ThresholdEvent,
    method: ExtremumMethod,
) -> Result<f64, EvidenceError> {
    Ok(belief_plausibility_batch(space, margin_values, response, &[*event], method)?[0].0)
}

/// Plausibility of a threshold event: total mass of joint focal elements
/// whose box intersects the event.
pub fn plausibility(
    space: &UncertainSpace,
    margin_values: &[f64],
    response: Response<'_>,
    event: &ThresholdEvent,
    method: ExtremumMethod,
) -> Result<f64, EvidenceError> {
    Ok(belief_plausibility_batch(space, margin_values, response, &[*event], method)?[0].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_dim_space() -> UncertainSpace {
        let x1 = BpaStructure::from_rows("x1", &[(0.0, 1.0, 0.6), (1.0, 2.0, 0.4)]).unwrap();
        let x2 = BpaStructure::from_rows("x2", &[(0.0, 1.0, 1.0)]).unwrap();
        UncertainSpace::new(vec![x1, x2]).unwrap()
    }

    #[test]
    fn joint_products_by_hand() {
        let elements = joint_elements(&two_dim_space(), &[]).unwrap();
        assert_eq!(elements.len(), 2);
        assert!((elements[0].mass - 0.6).abs() < 1e-15);
        assert!((elements[1].mass - 0.4).abs() < 1e-15);
        let total: f64 = elements.iter().map(|e| e.mass).sum();
        assert!((total - 1.0).abs() < MASS_TOLERANCE);
    }

    #[test]
    fn unit_margin_is_identity() {
        let bpa = BpaStructure::from_rows("p", &[(2.0, 6.0, 1.0)]).unwrap();
        let mut margins = BTreeMap::new();
        margins.insert(0usize, 0usize);
        let space = UncertainSpace::with_margins(vec![bpa], margins).unwrap();
        let full = joint_elements(&space, &[1.0]).unwrap();
        assert_eq!(full[0].boxed[0], Interval::new(2.0, 6.0).unwrap());
        let half = joint_elements(&space, &[0.5]).unwrap();
        assert_eq!(half[0].boxed[0], Interval::new(3.0, 5.0).unwrap());
        assert!((half[0].mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn margin_outside_unit_interval_rejected() {
        let bpa = BpaStructure::from_rows("p", &[(2.0, 6.0, 1.0)]).unwrap();
        let mut margins = BTreeMap::new();
        margins.insert(0usize, 0usize);
        let space = UncertainSpace::with_margins(vec![bpa], margins).unwrap();
        assert!(matches!(
            joint_elements(&space, &[1.5]),
            Err(EvidenceError::MarginOutOfRange { .. })
        ));
    }

    #[test]
    fn corners_bound_affine_sum() {
        let boxed = [
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
        ];
        let f = |p: &[f64]| p[0] + p[1];
        let ext = box_extremum(&f, &boxed, ExtremumMethod::Corners).unwrap();
        assert_eq!(ext.min_value, 0.0);
        assert_eq!(ext.max_value, 2.0);
    }

    #[test]
    fn constant_response_collapses() {
        let boxed = [Interval::new(-3.0, 5.0).unwrap()];
        let f = |_: &[f64]| 4.25;
        let ext = box_extremum(&f, &boxed, ExtremumMethod::Corners).unwrap();
        assert_eq!(ext.min_value, 4.25);
        assert_eq!(ext.max_value, 4.25);
    }

    #[test]
    fn corners_miss_interior_minimum_grid_finds_it() {
        // x^2 on [-1, 1]: both corners report 1; the interior minimum 0
        // needs denser probing.
        let boxed = [Interval::new(-1.0, 1.0).unwrap()];
        let f = |p: &[f64]| p[0] * p[0];
        let corners = box_extremum(&f, &boxed, ExtremumMethod::Corners).unwrap();
        assert_eq!(corners.min_value, 1.0);
        let grid = box_extremum(&f, &boxed, ExtremumMethod::GridOracle { points_per_dim: 101 })
            .unwrap();
        assert_eq!(grid.min_value, 0.0);
    }

    #[test]
    fn corner_dimension_limit() {
        let boxed = vec![Interval::new(0.0, 1.0).unwrap(); 13];
        let f = |p: &[f64]| p.iter().sum::<f64>();
        assert!(matches!(
            box_extremum(&f, &boxed, ExtremumMethod::Corners),
            Err(EvidenceError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn belief_of_two_dim_example() {
        let space = two_dim_space();
        let response = |p: &[f64]| vec![p[0] + p[1]];
        let bel = belief(
            &space,
            &[],
            &response,
            &ThresholdEvent::leq(0, 2.0),
            ExtremumMethod::Corners,
        )
        .unwrap();
        assert!((bel - 0.6).abs() < 1e-15, "bel = {bel}");
        let pl = plausibility(
            &space,
            &[],
            &response,
            &ThresholdEvent::leq(0, 2.0),
            ExtremumMethod::Corners,
        )
        .unwrap();
        assert!((pl - 1.0).abs() < 1e-15, "pl = {pl}");
    }

    #[test]
    fn whole_support_and_empty_events() {
        let x = BpaStructure::from_rows("x", &[(0.0, 1.0, 1.0)]).unwrap();
        let space = UncertainSpace::new(vec![x]).unwrap();
        let response = |p: &[f64]| vec![p[0]];
        let inside = belief(
            &space,
            &[],
            &response,
            &ThresholdEvent::leq(0, 2.0),
            ExtremumMethod::Corners,
        )
        .unwrap();
        assert_eq!(inside, 1.0);
        let empty = belief(
            &space,
            &[],
            &response,
            &ThresholdEvent::leq(0, -1.0),
            ExtremumMethod::Corners,
        )
        .unwrap();
        assert_eq!(empty, 0.0);
        let pl_empty = plausibility(
            &space,
            &[],
            &response,
            &ThresholdEvent::leq(0, -1.0),
            ExtremumMethod::Corners,
        )
        .unwrap();
        assert_eq!(pl_empty, 0.0);
    }

    #[test]
    fn nan_response_reports_offending_box() {
        let x = BpaStructure::from_rows("x", &[(0.0, 1.0, 1.0)]).unwrap();
        let space = UncertainSpace::new(vec![x]).unwrap();
        let response = |_: &[f64]| vec![f64::NAN];
        let err = belief(
            &space,
            &[],
            &response,
            &ThresholdEvent::leq(0, 0.0),
            ExtremumMethod::Corners,
        )
        .unwrap_err();
        assert!(matches!(err, EvidenceError::ResponseFailure { .. }));
    }

    #[test]
    fn overlapping_intervals_accepted_verbatim() {
        let h = BpaStructure::from_rows(
            "H",
            &[(5.0, 7.0, 0.1), (7.0, 12.0, 0.4), (8.0, 10.0, 0.5)],
        )
        .unwrap();
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn catch_all_completes_the_mass() {
        let bpa = BpaStructure::with_catch_all(
            "dv",
            Interval::new(-1.0, 1.0).unwrap(),
            0.99,
            10.0,
        )
        .unwrap();
        assert_eq!(bpa.len(), 2);
        assert_eq!(bpa.elements()[1].interval, Interval::new(-10.0, 10.0).unwrap());
        let total: f64 = bpa.elements().iter().map(|e| e.mass).sum();
        assert!((total - 1.0).abs() < MASS_TOLERANCE);
    }
}
