//! Reflecting two-dimensional random walks on a rectangular lattice.
//!
//! Cell `(x, y)` with `x < width`, `y < height` is state `y * width + x`.
//! A step picks an axis with probability 1/2 and moves along it: right with
//! probability `px`, up with probability `py`. A move that would leave the
//! grid bounces back to the opposite neighbour on the same axis; on an axis
//! of length 1 it stays put.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    #[serde(default = "half")]
    pub px: f64,
    #[serde(default = "half")]
    pub py: f64,
    pub alpha: f64,
    pub default_payoff: f64,
    /// `(x, y, payoff)`.
    #[serde(default)]
    pub anchors: Vec<(usize, usize, f64)>,
}

impl GridSpec {
    /// 21 x 21 grid with a peak at (5,5) and two zero cells, 20 steps per
    /// 0.98 of discount.
    pub fn toy() -> Self {
        Self {
            width: 21,
            height: 21,
            px: 0.5,
            py: 0.5,
            alpha: 0.98f64.powf(1.0 / 20.0),
            default_payoff: 5.0,
            anchors: vec![(5, 5, 10.0), (5, 15, 0.0), (15, 15, 0.0)],
        }
    }

    /// The toy landscape at ten times the resolution.
    pub fn large() -> Self {
        Self {
            alpha: 0.9999,
            ..scale_grid(&Self::toy(), 10)
        }
    }

    pub fn n_states(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, z: usize) -> (usize, usize) {
        (z % self.width, z / self.width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
        }
        for (name, p) in [("px", self.px), ("py", self.py)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} outside (0, 1]", self.alpha)));
        }
        if !self.default_payoff.is_finite() {
            return Err(Error::InvalidParameter("default payoff is not finite".into()));
        }
        for &(x, y, v) in &self.anchors {
            if x >= self.width || y >= self.height {
                return Err(Error::AnchorOutOfGrid {
                    x,
                    y,
                    width: self.width,
                    height: self.height,
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("anchor ({x},{y}) payoff is not finite")));
            }
        }
        Ok(())
    }

    pub fn payoffs(&self) -> Vec<f64> {
        let mut g = vec![self.default_payoff; self.n_states()];
        for &(x, y, v) in &self.anchors {
            g[self.index(x, y)] = v;
        }
        g
    }
}

/// Moves along one axis of length `len` from `pos`: `(target, probability)`.
fn axis_moves(pos: usize, len: usize, forward: f64, backward: f64) -> [(usize, f64); 2] {
    if len == 1 {
        return [(pos, forward), (pos, backward)];
    }
    let fwd = if pos + 1 < len { pos + 1 } else { pos - 1 };
    let bwd = if pos > 0 { pos - 1 } else { pos + 1 };
    [(fwd, forward), (bwd, backward)]
}

pub fn build_grid(spec: &GridSpec) -> Result<Model> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut triplets = Vec::with_capacity(4 * w * h);
    for y in 0..h {
        for x in 0..w {
            let z = spec.index(x, y);
            for (nx, p) in axis_moves(x, w, 0.5 * spec.px, 0.5 * (1.0 - spec.px)) {
                triplets.push((z, spec.index(nx, y), p));
            }
            for (ny, p) in axis_moves(y, h, 0.5 * spec.py, 0.5 * (1.0 - spec.py)) {
                triplets.push((z, spec.index(x, ny), p));
            }
        }
    }
    let labels = (0..w * h)
        .map(|z| {
            let (x, y) = spec.coords(z);
            format!("({x},{y})")
        })
        .collect();
    Model::from_triplets(w * h, &triplets, vec![spec.alpha; w * h], spec.payoffs())?.with_labels(labels)
}

/// Refines the lattice: `width - 1`, `height - 1` and anchor coordinates
/// are multiplied by `factor`. The discount is left for the caller to set.
pub fn scale_grid(spec: &GridSpec, factor: usize) -> GridSpec {
    assert!(factor >= 1, "scale factor must be positive");
    GridSpec {
        width: (spec.width - 1) * factor + 1,
        height: (spec.height - 1) * factor + 1,
        anchors: spec
            .anchors
            .iter()
            .map(|&(x, y, v)| (x * factor, y * factor, v))
            .collect(),
        ..spec.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_absorbing() {
        let spec = GridSpec {
            width: 1,
            height: 1,
            anchors: vec![],
            ..GridSpec::toy()
        };
        let m = build_grid(&spec).unwrap();
        assert_eq!(m.n_states(), 1);
        assert_eq!(m.transitions().get(0, 0), 1.0);
    }

    #[test]
    fn toy_grid_rows_and_payoffs() {
        let spec = GridSpec::toy();
        let m = build_grid(&spec).unwrap();
        assert_eq!(m.n_states(), 441);
        for s in m.transitions().row_sums() {
            assert!((s - 1.0).abs() <= 1e-12);
        }
        assert_eq!(m.payoff()[spec.index(5, 5)], 10.0);
        assert_eq!(m.payoff()[spec.index(15, 15)], 0.0);
        assert_eq!(m.payoff()[spec.index(10, 3)], 5.0);
        assert_eq!(m.label(spec.index(3, 7)), "(3,7)");
        assert!((m.alpha()[0].powi(20) - 0.98).abs() < 1e-14);
    }

    #[test]
    fn corner_bounces_back() {
        let spec = GridSpec {
            px: 0.8,
            py: 0.3,
            ..GridSpec::toy()
        };
        let m = build_grid(&spec).unwrap();
        let t = m.transitions();
        // (0,0): left bounces to the right, down bounces to up.
        assert!((t.get(0, spec.index(1, 0)) - 0.5).abs() < 1e-15);
        assert!((t.get(0, spec.index(0, 1)) - 0.5).abs() < 1e-15);
        let z = spec.index(7, 9);
        assert!((t.get(z, spec.index(8, 9)) - 0.4).abs() < 1e-15);
        assert!((t.get(z, spec.index(6, 9)) - 0.1).abs() < 1e-15);
        assert!((t.get(z, spec.index(7, 10)) - 0.15).abs() < 1e-15);
        assert!((t.get(z, spec.index(7, 8)) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn anchors_outside_are_rejected() {
        let spec = GridSpec {
            anchors: vec![(21, 0, 1.0)],
            ..GridSpec::toy()
        };
        assert!(matches!(build_grid(&spec), Err(Error::AnchorOutOfGrid { x: 21, .. })));
    }

    #[test]
    fn scaling() {
        let toy = GridSpec::toy();
        assert_eq!(scale_grid(&toy, 1), toy);
        let two = scale_grid(&toy, 2);
        assert_eq!((two.width, two.height), (41, 41));
        assert_eq!(two.anchors[0], (10, 10, 10.0));
        let large = GridSpec::large();
        assert_eq!((large.width, large.height), (201, 201));
        assert_eq!(large.anchors, vec![(50, 50, 10.0), (50, 150, 0.0), (150, 150, 0.0)]);
        assert_eq!(large.alpha, 0.9999);
    }

    #[test]
    fn json_defaults() {
        let spec: GridSpec =
            serde_json::from_str(r#"{"width":3,"height":2,"alpha":0.9,"default_payoff":1,"anchors":[[2,1,4]]}"#)
                .unwrap();
        assert_eq!((spec.px, spec.py), (0.5, 0.5));
        assert_eq!(build_grid(&spec).unwrap().payoff()[5], 4.0);
    }
}
