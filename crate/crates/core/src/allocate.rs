//! Rounding of the fractional LP solution to a binary allocation: the
//! threshold rule with parameter `b`, its closed-form optimal value, and the
//! 1/2-rounding baseline.

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Side};
use crate::lp::FractionalSolution;

/// Rounding parameter `b >= 2`, or the `m = k` limit where the thresholds
/// collapse to exactly 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RoundingParams {
    Finite(f64),
    Infinite,
}

impl RoundingParams {
    pub fn finite(b: f64) -> Result<RoundingParams> {
        if b.is_finite() && b >= 2.0 {
            Ok(RoundingParams::Finite(b))
        } else {
            Err(Error::InvalidParams(format!("b must be >= 2, got {b}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            RoundingParams::Finite(b) => b,
            RoundingParams::Infinite => f64::INFINITY,
        }
    }
}

impl serde::Serialize for RoundingParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RoundingParams::Finite(b) => s.serialize_f64(*b),
            RoundingParams::Infinite => s.serialize_str("inf"),
        }
    }
}

impl std::fmt::Display for RoundingParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RoundingParams::Finite(b) => write!(f, "{b}"),
            RoundingParams::Infinite => write!(f, "inf"),
        }
    }
}

/// The ratio-minimizing choice `b = 1 + sqrt((2 - k/m) / (1 - k/m))`,
/// which exceeds `1 + sqrt(2)` for every finite `m > k`. At `m = k` the
/// denominator vanishes and the limit is represented explicitly.
pub fn optimal_b(m: u32, k: u32) -> RoundingParams {
    debug_assert!(m >= k && k >= 1);
    if m == k {
        return RoundingParams::Infinite;
    }
    let r = k as f64 / m as f64;
    RoundingParams::Finite(1.0 + ((2.0 - r) / (1.0 - r)).sqrt())
}

/// Rounds one task. Rules apply in order: (i) `x >= 1 - 1/b` takes the CPU
/// side, (ii) `x <= 1/b` the GPU side, then the middle band takes the
/// fastest side with ties (`cpu >= gpu`) going to the GPU.
///
/// With `b` infinite `1/b` is treated as exactly 0: only `x = 1` matches
/// rule (i), only `x = 0` matches rule (ii).
pub fn round_side(x: f64, cpu_time: f64, gpu_time: f64, params: RoundingParams) -> Side {
    let inv_b = match params {
        RoundingParams::Finite(b) => 1.0 / b,
        RoundingParams::Infinite => 0.0,
    };
    if x >= 1.0 - inv_b {
        Side::Cpu
    } else if x <= inv_b {
        Side::Gpu
    } else if cpu_time >= gpu_time {
        Side::Gpu
    } else {
        Side::Cpu
    }
}

/// HLP-b threshold rounding of a fractional solution.
pub fn round_hlpb(
    fractional: &FractionalSolution,
    instance: &Instance,
    params: RoundingParams,
) -> Allocation {
    let sides = fractional
        .x
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let cpu = instance.cpu_time(j).finite().expect("finite times required");
            let gpu = instance.gpu_time(j).finite().expect("finite times required");
            round_side(x, cpu, gpu, params)
        })
        .collect();
    Allocation::new(sides)
}

/// Prior-work baseline: GPU if `x < 1/2`, CPU otherwise.
pub fn round_half(fractional: &FractionalSolution) -> Allocation {
    let sides = fractional
        .x
        .iter()
        .map(|&x| if x < 0.5 { Side::Gpu } else { Side::Cpu })
        .collect();
    Allocation::new(sides)
}
