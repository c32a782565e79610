//! Schedule vectors, retiming directions and spatial constraints.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cdg::{is_causal, IterationBounds};
use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};
use crate::retiming::Retiming;

/// Default search radius for schedule vectors (in `|s.x| + |s.y|`).
pub const DEFAULT_SEARCH_RADIUS: i64 = 8;

/// Environment variable overriding [`DEFAULT_SEARCH_RADIUS`].
pub const SEARCH_RADIUS_ENV: &str = "MDRETIME_SEARCH_RADIUS";

pub fn search_radius() -> i64 {
    std::env::var(SEARCH_RADIUS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&r: &i64| r >= 1)
        .unwrap_or(DEFAULT_SEARCH_RADIUS)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Nonzero integer vector with coprime components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ScheduleVector(Vec<i64>);

impl ScheduleVector {
    /// Normalizes by the gcd of the components; rejects the zero vector.
    pub fn new(components: Vec<i64>) -> Result<Self> {
        let g = components.iter().fold(0, |acc, &c| gcd(acc, c));
        if g == 0 {
            return Err(Error::IllegalRetiming {
                schedule: components,
                reason: "schedule vector is zero".into(),
            });
        }
        Ok(ScheduleVector(components.into_iter().map(|c| c / g).collect()))
    }

    /// `(1, 0, ..., 0)`: plain nested-loop order.
    pub fn row_major(dim: usize) -> Self {
        let mut v = vec![0; dim];
        v[0] = 1;
        ScheduleVector(v)
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn is_row_major(&self) -> bool {
        *self == Self::row_major(self.dim())
    }
}

impl TryFrom<Vec<i64>> for ScheduleVector {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        ScheduleVector::new(v)
    }
}

impl From<ScheduleVector> for Vec<i64> {
    fn from(s: ScheduleVector) -> Vec<i64> {
        s.0
    }
}

impl fmt::Display for ScheduleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        DelayVector(self.0.clone()).fmt(f)
    }
}

/// Coprime 2-D candidates with `|x| + |y| = radius`, ordered by `x`
/// descending then `y` descending.
pub fn candidates_at(radius: i64) -> Vec<ScheduleVector> {
    let mut out = Vec::new();
    for x in (-radius..=radius).rev() {
        let rest = radius - x.abs();
        let ys: &[i64] = if rest == 0 { &[0] } else { &[rest, -rest] };
        for &y in ys {
            if gcd(x, y) == 1 {
                out.push(ScheduleVector(vec![x, y]));
            }
        }
    }
    out
}

fn require_2d(g: &Mdfg) -> Result<()> {
    if g.dimension() != 2 {
        return Err(Error::UnsupportedDimension(g.dimension()));
    }
    Ok(())
}

/// `s . d(e) > 0` for every nonzero delay (and so `>= 0` for every edge).
pub fn strictly_positive(schedule: &ScheduleVector, g: &Mdfg) -> bool {
    g.edges()
        .iter()
        .filter(|e| !e.delay.is_zero())
        .all(|e| e.delay.dot(schedule.components()) > 0)
}

/// Strictly positive schedule vector of minimal `|s.x| + |s.y|`, searching
/// up to [`search_radius`].
pub fn find_schedule_vector(g: &Mdfg) -> Result<ScheduleVector> {
    find_schedule_vector_within(g, search_radius())
}

pub fn find_schedule_vector_within(g: &Mdfg, radius: i64) -> Result<ScheduleVector> {
    require_2d(g)?;
    (1..=radius)
        .flat_map(candidates_at)
        .find(|s| strictly_positive(s, g))
        .ok_or(Error::NoSchedule { radius })
}

/// Retiming direction orthogonal to `schedule`. Of the two unit candidates
/// `±(s.y, -s.x)` it picks the one that is causal when it lands on a
/// zero-delay edge.
pub fn orthogonal_retiming(schedule: &ScheduleVector, g: &Mdfg) -> Result<DelayVector> {
    require_2d(g)?;
    if schedule.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: schedule.dim(),
        });
    }
    if !strictly_positive(schedule, g) {
        return Err(Error::IllegalRetiming {
            schedule: schedule.components().to_vec(),
            reason: "schedule is not strictly positive on the graph".into(),
        });
    }
    let s = schedule.components();
    let first = DelayVector(vec![s[1], -s[0]]);
    if is_causal(&first, s) {
        return Ok(first);
    }
    let second = -&first;
    if is_causal(&second, s) {
        return Ok(second);
    }
    Err(Error::NoRetimingVector(s.to_vec()))
}

/// Schedule selection of the SPINE technique: `(1,0)`, `(0,1)`, `(1,1)` in
/// that order when strictly positive, otherwise the minimal search.
pub fn spine_schedule_choice(g: &Mdfg) -> Result<ScheduleVector> {
    require_2d(g)?;
    for pref in [[1, 0], [0, 1], [1, 1]] {
        let s = ScheduleVector(pref.to_vec());
        if strictly_positive(&s, g) {
            return Ok(s);
        }
    }
    find_schedule_vector(g)
}

/// Per-dimension iteration counts of a loop nest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialConstraint {
    pub sizes: Vec<i64>,
}

pub fn spatial_constraint(bounds: &IterationBounds) -> SpatialConstraint {
    SpatialConstraint {
        sizes: (0..bounds.dim()).map(|k| bounds.extent(k)).collect(),
    }
}

/// `|r(u)[j]| < sizes[j]` for every node and dimension.
pub fn check_spatial_feasibility(retiming: &Retiming, sc: &SpatialConstraint) -> bool {
    spatial_violation(retiming, sc).is_none()
}

/// First node/dimension that breaks the spatial constraint, if any.
pub fn spatial_violation(retiming: &Retiming, sc: &SpatialConstraint) -> Option<Error> {
    for (node, r) in retiming.iter() {
        for (dim, (&c, &size)) in r.components().iter().zip(&sc.sizes).enumerate() {
            if c.abs() >= size {
                return Some(Error::SpatialInfeasible {
                    node: node.to_string(),
                    dim,
                    magnitude: c.abs(),
                    size,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn sv(v: [i64; 2]) -> ScheduleVector {
        ScheduleVector::new(v.to_vec()).unwrap()
    }

    fn graph_with_delays(delays: &[[i64; 2]]) -> Mdfg {
        let mut g = Mdfg::new(2);
        g.add_node("U", 1);
        g.add_node("V", 1);
        for d in delays {
            g.add_edge("U", "V", *d).unwrap();
        }
        g
    }

    #[test]
    fn candidate_order() {
        assert_eq!(candidates_at(1), vec![sv([1, 0]), sv([0, 1]), sv([0, -1]), sv([-1, 0])]);
        assert_eq!(
            candidates_at(2),
            vec![sv([1, 1]), sv([1, -1]), sv([-1, 1]), sv([-1, -1])]
        );
    }

    #[test]
    fn normalization() {
        assert_eq!(ScheduleVector::new(vec![2, 4]).unwrap().components(), &[1, 2]);
        assert!(ScheduleVector::new(vec![0, 0]).is_err());
    }

    #[test]
    fn find_schedule_examples() {
        assert_eq!(find_schedule_vector(&fixtures::wdf()).unwrap(), sv([1, 0]));
        // (1,1) is orthogonal to (1,-1), so it is not strictly positive;
        // the first strictly positive candidate is (2,1).
        let g = graph_with_delays(&[[1, -1], [0, 1]]);
        assert_eq!(find_schedule_vector(&g).unwrap(), sv([2, 1]));
        let mut edgeless = Mdfg::new(2);
        edgeless.add_node("X", 1);
        assert_eq!(find_schedule_vector(&edgeless).unwrap(), sv([1, 0]));
    }

    #[test]
    fn no_schedule_within_radius() {
        let g = graph_with_delays(&[[0, 1], [0, -1]]);
        assert_eq!(find_schedule_vector_within(&g, 4), Err(Error::NoSchedule { radius: 4 }));
        let g3 = Mdfg::new(3);
        assert_eq!(find_schedule_vector(&g3), Err(Error::UnsupportedDimension(3)));
    }

    #[test]
    fn strictly_positive_examples() {
        let g = fixtures::wdf();
        assert!(strictly_positive(&sv([1, 0]), &g));
        assert!(!strictly_positive(&sv([0, 1]), &g));
        let mut edgeless = Mdfg::new(2);
        edgeless.add_node("X", 1);
        assert!(strictly_positive(&sv([-3, 1]), &edgeless));
    }

    #[test]
    fn orthogonal_retiming_examples() {
        let wdf = fixtures::wdf();
        assert_eq!(orthogonal_retiming(&sv([1, 0]), &wdf).unwrap(), DelayVector::from([0, 1]));
        let mut edgeless = Mdfg::new(2);
        edgeless.add_node("X", 1);
        assert_eq!(
            orthogonal_retiming(&sv([1, 1]), &edgeless).unwrap(),
            DelayVector::from([1, -1])
        );
        assert_eq!(
            orthogonal_retiming(&sv([0, 1]), &edgeless).unwrap(),
            DelayVector::from([1, 0])
        );
        assert!(orthogonal_retiming(&sv([0, 1]), &wdf).is_err());
    }

    #[test]
    fn spine_choice_examples() {
        assert_eq!(spine_schedule_choice(&fixtures::wdf()).unwrap(), sv([1, 0]));
        let g = graph_with_delays(&[[0, 2], [0, 1]]);
        assert_eq!(spine_schedule_choice(&g).unwrap(), sv([0, 1]));
        let mut edgeless = Mdfg::new(2);
        edgeless.add_node("X", 1);
        assert_eq!(spine_schedule_choice(&edgeless).unwrap(), sv([1, 0]));
    }

    #[test]
    fn spatial_examples() {
        let b = IterationBounds::new(vec![0, 0], vec![9, 9]).unwrap();
        assert_eq!(spatial_constraint(&b).sizes, vec![10, 10]);
        let b = IterationBounds::new(vec![1, 1], vec![1, 1]).unwrap();
        assert_eq!(spatial_constraint(&b).sizes, vec![1, 1]);
        let b = IterationBounds::new(vec![0, 5], vec![2, 7]).unwrap();
        assert_eq!(spatial_constraint(&b).sizes, vec![3, 3]);

        let mut r = Retiming::new(2);
        r.set("D", [0, 2].into());
        r.set("A", [0, 1].into());
        assert!(check_spatial_feasibility(&r, &SpatialConstraint { sizes: vec![10, 10] }));
        let mut r = Retiming::new(2);
        r.set("D", [0, 3].into());
        assert!(!check_spatial_feasibility(&r, &SpatialConstraint { sizes: vec![10, 3] }));
        assert!(check_spatial_feasibility(&Retiming::new(2), &SpatialConstraint { sizes: vec![1, 1] }));
    }
}
