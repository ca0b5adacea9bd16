use serde::{Deserialize, Serialize};

/// Tunables for stream extraction and the structured features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct FeatureConfig {
    /// Field-of-view half angle in degrees, applied to yaw and pitch separately.
    pub fov_half_angle: f64,
    /// A smoke blocks sight when its center lies this close to the sight line.
    pub smoke_radius: f64,
    /// Seconds without sight, fire or damage before an engagement closes.
    pub engagement_reset_secs: f64,
    /// Minimum tick distance between kept movement rows.
    pub movement_stride: u32,
    /// Inertial-shot window after a kill, seconds.
    pub isp_window_secs: f64,
    /// Inter-fire gap that starts a new fire round, seconds.
    pub fire_round_gap_secs: f64,
    /// Allowed time between a fire and the matching damage event, seconds
    /// (one tick at 128 Hz by default).
    pub fhp_tolerance_secs: f64,
    /// Multiplier from event `distance` to the units of the special-hit bands.
    pub distance_scale: f64,
    /// Longest accepted time-to-kill, seconds.
    pub ttk_window_secs: f64,
    /// Maximum props a player may carry per round.
    pub props_per_round: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            fov_half_angle: 45.0,
            smoke_radius: 144.0,
            engagement_reset_secs: 10.0,
            movement_stride: 16,
            isp_window_secs: 0.15,
            fire_round_gap_secs: 5.0,
            fhp_tolerance_secs: 1.0 / 128.0,
            distance_scale: 1.0,
            ttk_window_secs: 10.0,
            props_per_round: 5.0,
        }
    }
}
