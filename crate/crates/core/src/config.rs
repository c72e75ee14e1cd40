//! Layout, bundling and color parameters.
//!
//! All keys are optional in the JSON config file; missing keys take the
//! defaults below.

use serde::{Deserialize, Serialize};

use crate::scene::Rgb;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutParams {
    /// Z distance between consecutive version layers.
    pub layer_gap: f64,
    /// Disk area at normalized centrality 0.
    pub area_min: f64,
    /// Disk area at normalized centrality 1.
    pub area_max: f64,
    /// Fraction of the enclosing radius added around packed children.
    pub padding: f64,
    /// Angular step of the placement spiral, radians.
    pub spiral_step: f64,
    /// Radial growth per radian, in units of the largest sibling radius.
    pub spiral_growth: f64,
    pub thickness_min: f64,
    pub thickness_max: f64,
    pub fdeb: FdebParams,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            layer_gap: 3.0,
            area_min: 1.0,
            area_max: 10.0,
            padding: 0.05,
            spiral_step: 0.3,
            spiral_growth: 0.05,
            thickness_min: 0.05,
            thickness_max: 0.5,
            fdeb: FdebParams::default(),
        }
    }
}

/// Force-directed edge bundling schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdebParams {
    pub cycles: usize,
    /// Control points per edge in the first cycle; doubles every cycle.
    pub initial_subdivisions: usize,
    /// Iterations in the first cycle; scaled by `iteration_rate` per cycle.
    pub initial_iterations: usize,
    pub iteration_rate: f64,
    /// Step size in the first cycle; halves every cycle.
    pub initial_step: f64,
    pub compatibility_threshold: f64,
    /// Global spring constant.
    pub spring_constant: f64,
}

impl Default for FdebParams {
    fn default() -> Self {
        Self {
            cycles: 6,
            initial_subdivisions: 1,
            initial_iterations: 50,
            iteration_rate: 2.0 / 3.0,
            initial_step: 0.04,
            compatibility_threshold: 0.6,
            spring_constant: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColorParams {
    pub rank_low: Rgb,
    pub rank_high: Rgb,
    pub neutral: Rgb,
}

impl Default for ColorParams {
    fn default() -> Self {
        Self {
            rank_low: Rgb(0, 200, 0),
            rank_high: Rgb(200, 0, 0),
            neutral: Rgb(150, 150, 150),
        }
    }
}

/// Everything tunable about a pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    pub layout: LayoutParams,
    pub colors: ColorParams,
}

impl PipelineParams {
    /// Every problem with the parameters, empty when they are usable.
    pub fn problems(&self) -> Vec<String> {
        let l = &self.layout;
        let f = &l.fdeb;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let mut out = Vec::new();
        let mut need = |ok: bool, what: &str| {
            if !ok {
                out.push(what.to_string());
            }
        };
        need(positive(l.layer_gap), "layout.layer_gap must be positive");
        need(positive(l.area_min), "layout.area_min must be positive");
        need(
            l.area_max.is_finite() && l.area_max >= l.area_min,
            "layout.area_max must be at least area_min",
        );
        need(
            l.padding >= 0.0 && l.padding.is_finite(),
            "layout.padding must be non-negative",
        );
        need(positive(l.spiral_step), "layout.spiral_step must be positive");
        need(positive(l.spiral_growth), "layout.spiral_growth must be positive");
        need(
            l.thickness_min >= 0.0 && l.thickness_min.is_finite(),
            "layout.thickness_min must be non-negative",
        );
        need(
            l.thickness_max.is_finite() && l.thickness_max >= l.thickness_min,
            "layout.thickness_max must be at least thickness_min",
        );
        need(
            f.initial_subdivisions >= 1,
            "layout.fdeb.initial_subdivisions must be at least 1",
        );
        need(f.cycles <= 12, "layout.fdeb.cycles must be at most 12");
        need(
            positive(f.iteration_rate),
            "layout.fdeb.iteration_rate must be positive",
        );
        need(positive(f.initial_step), "layout.fdeb.initial_step must be positive");
        need(
            (0.0..=1.0).contains(&f.compatibility_threshold),
            "layout.fdeb.compatibility_threshold must lie in [0, 1]",
        );
        need(
            f.spring_constant >= 0.0 && f.spring_constant.is_finite(),
            "layout.fdeb.spring_constant must be non-negative",
        );
        out
    }
}
