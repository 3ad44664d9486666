use serde::{Deserialize, Serialize};

use crate::error::{MeshError, Result};

/// Every tolerance used by the repair pipeline. Distances are in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepairConfig {
    /// Maximum vertex-to-plane distance for a virtual triangle to count as
    /// lying on an incident face.
    pub eps_distance: f64,
    /// Minimum overlap ratio (overlap area / face area) for an intersection.
    pub eps_area_ratio: f64,
    /// Radius under which two vertices are considered duplicates.
    pub eps_duplicate: f64,
    /// Plane tolerance used when completing rings across non-manifold edges.
    pub coplanarity_tolerance: f64,
    /// Upper bound on ring-completion rounds per strategy.
    pub max_completion_iterations: usize,
    /// Triangles with area at or below this (m²) are degenerate.
    pub degenerate_area: f64,
    /// Length tolerance for exact-geometry tests (point on edge, on plane).
    pub geometric_tolerance: f64,
}

impl Default for RepairConfig {
    fn default() -> Self {
        Self {
            eps_distance: 0.1,
            eps_area_ratio: 0.01,
            eps_duplicate: 1e-3,
            coplanarity_tolerance: 1e-3,
            max_completion_iterations: 64,
            degenerate_area: 1e-12,
            geometric_tolerance: 1e-9,
        }
    }
}

impl RepairConfig {
    /// Builds a config from the three user-facing thresholds. The
    /// coplanarity tolerance follows the duplicate radius.
    pub fn with_thresholds(eps_distance: f64, eps_area_ratio: f64, eps_duplicate: f64) -> Result<Self> {
        let cfg = Self {
            eps_distance,
            eps_area_ratio,
            eps_duplicate,
            coplanarity_tolerance: eps_duplicate,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps_distance", self.eps_distance),
            ("eps_area_ratio", self.eps_area_ratio),
            ("eps_duplicate", self.eps_duplicate),
            ("coplanarity_tolerance", self.coplanarity_tolerance),
            ("degenerate_area", self.degenerate_area),
            ("geometric_tolerance", self.geometric_tolerance),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(MeshError::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if self.max_completion_iterations == 0 {
            return Err(MeshError::Config("max_completion_iterations must be positive".into()));
        }
        if self.eps_duplicate >= self.eps_distance {
            return Err(MeshError::Config(format!(
                "eps_duplicate ({}) must be smaller than eps_distance ({})",
                self.eps_duplicate, self.eps_distance
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RepairConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_duplicate_radius_above_distance_threshold() {
        assert!(RepairConfig::with_thresholds(0.1, 0.01, 0.2).is_err());
        assert!(RepairConfig::with_thresholds(0.1, -0.01, 0.001).is_err());
    }
}
