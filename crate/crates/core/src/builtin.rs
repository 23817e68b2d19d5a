//! Library of named fans: projective spaces, the hexagon, and one smooth
//! complete surface for every finite subgroup class of `GL(2, Z)`.
//!
//! Surface fans are stored by their cyclic `a` sequence. Rays are rebuilt
//! from `(1,0), (0,1)` through `r_{i+1} = a_i r_i - r_{i-1}`.

use thiserror::Error;

use crate::aut::Gl2Label;
use crate::fan::{Fan, FanError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("unknown builtin fan {0:?}")]
    UnknownName(String),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// A named fan together with the automorphism class it is expected to have.
#[derive(Debug, Clone)]
pub struct BuiltinFan {
    pub name: String,
    pub fan: Fan,
    pub expected_label: Option<Gl2Label>,
    /// Whether the fan is expected to be complete.
    pub complete: bool,
}

/// Cyclic `a` sequence of the builtin surface with the given label.
pub fn surface_sequence(label: Gl2Label) -> Vec<i64> {
    let (period, reps): (&[i64], usize) = match label {
        Gl2Label::D12 => (&[1], 6),
        Gl2Label::D6 => (&[5, 1, 2, 3, 2, 1], 3),
        Gl2Label::D6p => (&[2, 1, 2], 3),
        Gl2Label::C6 => (&[4, 2, 1], 6),
        Gl2Label::C3 => (&[1, 2, 3, 1, 4], 3),
        Gl2Label::D8 => (&[0], 4),
        Gl2Label::D4 => (&[4, 1, 2, 2, 2, 1], 2),
        Gl2Label::D4p => (&[3, 1, 2, 2, 1], 2),
        Gl2Label::C4 => (&[3, 2, 1], 4),
        Gl2Label::C2 => (&[4, 2, 1, 3, 2, 2, 1], 2),
        Gl2Label::D2 => (&[1, 1, 2, 1, 1, 0], 1),
        Gl2Label::D2p => (&[2, 1, 2, 1, 1, 1, 1], 1),
        Gl2Label::C1 => (&[3, 1, 2, 2, 1, 1, 1, 1], 1),
    };
    period.repeat(reps)
}

/// Smooth complete rank-2 fan with the given cyclic `a` sequence, or `None`
/// if the recurrence does not close up after one turn.
pub fn fan_from_a_sequence(a: &[i64]) -> Option<Fan> {
    let m = a.len();
    if m < 3 {
        return None;
    }
    let mut rays: Vec<[i64; 2]> = vec![[1, 0], [0, 1]];
    for i in 1..m - 1 {
        let (u, v) = (rays[i - 1], rays[i]);
        rays.push([a[i] * v[0] - u[0], a[i] * v[1] - u[1]]);
    }
    let (u, v) = (rays[m - 2], rays[m - 1]);
    let closes = [a[m - 1] * v[0] - u[0], a[m - 1] * v[1] - u[1]] == rays[0]
        && [a[0] * rays[0][0] - v[0], a[0] * rays[0][1] - v[1]] == rays[1];
    if !closes {
        return None;
    }
    let fan = Fan::rank2_cycle(rays).ok()?;
    // The sequence can close while winding around the origin more than once.
    fan.is_smooth_complete_rank2().then_some(fan)
}

/// Fan of `P^n`: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`, maximal cones
/// omitting one ray each.
pub fn projective_fan(n: usize) -> Result<Fan, FanError> {
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    rays.push(vec![-1; n]);
    let cones: Vec<Vec<usize>> = (0..=n)
        .rev()
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    Fan::validate(n, rays, cones)
}

/// The fixed builtin names: the hexagon and the thirteen surfaces.
pub fn builtin_names() -> Vec<String> {
    std::iter::once("hexagon".to_string())
        .chain(Gl2Label::ALL.iter().map(|l| format!("surface:{}", l.ascii())))
        .collect()
}

pub fn builtin(name: &str) -> Result<BuiltinFan, BuiltinError> {
    let unknown = || BuiltinError::UnknownName(name.to_string());
    if let Some(n) = name.strip_prefix("projective:") {
        let n: usize = n.parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        return Ok(BuiltinFan {
            name: name.to_string(),
            fan: projective_fan(n)?,
            expected_label: None,
            complete: true,
        });
    }
    let label = if name == "hexagon" {
        Gl2Label::D12
    } else {
        let suffix = name.strip_prefix("surface:").ok_or_else(unknown)?;
        // Accept only the ASCII spelling used in the name list.
        Gl2Label::ALL
            .into_iter()
            .find(|l| l.ascii() == suffix)
            .ok_or_else(unknown)?
    };
    let fan = fan_from_a_sequence(&surface_sequence(label))
        .expect("builtin sequences describe smooth complete fans");
    Ok(BuiltinFan {
        name: name.to_string(),
        fan,
        expected_label: Some(label),
        complete: true,
    })
}

pub fn builtin_fan(name: &str) -> Result<Fan, BuiltinError> {
    builtin(name).map(|b| b.fan)
}
