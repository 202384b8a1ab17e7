use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::human::SyntheticHuman;

pub const DEFAULT_DECAY: f64 = 0.02;

/// One message as seen by its receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Incoming {
    /// Valence the sender expressed.
    pub expressed: f64,
    /// Channel strength sender -> receiver.
    pub gamma: f64,
}

fn check(incoming: &[Vec<Incoming>], n: usize, dt: f64, decay: f64) -> Result<()> {
    if incoming.len() != n {
        return Err(Error::InvalidArgument(format!("{} incoming lists for {n} receivers", incoming.len())));
    }
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(Error::InvalidArgument(format!("timestep {dt} outside (0,1]")));
    }
    if !(0.0..=1.0).contains(&decay) {
        return Err(Error::InvalidArgument(format!("decay {decay} outside [0,1]")));
    }
    for m in incoming.iter().flatten() {
        if !(0.0..=1.0).contains(&m.gamma) {
            return Err(Error::InvalidArgument(format!("channel strength {} outside [0,1]", m.gamma)));
        }
        if !(-1.0..=1.0).contains(&m.expressed) {
            return Err(Error::InvalidArgument(format!("expressed valence {} outside [-1,1]", m.expressed)));
        }
    }
    Ok(())
}

/// One synchronous contagion update over bare valences.
pub fn step_valences(valences: &[f64], incoming: &[Vec<Incoming>], dt: f64, decay: f64) -> Result<Vec<f64>> {
    check(incoming, valences.len(), dt, decay)?;
    Ok(valences
        .iter()
        .zip(incoming)
        .map(|(&q, msgs)| {
            if msgs.is_empty() {
                return q * (1.0 - decay);
            }
            let pull: f64 = msgs.iter().map(|m| m.gamma * (m.expressed - q)).sum();
            (q + dt / msgs.len() as f64 * pull).clamp(-1.0, 1.0)
        })
        .collect())
}

pub fn step_contagion(
    humans: &[SyntheticHuman],
    incoming: &[Vec<Incoming>],
    dt: f64,
    decay: f64,
) -> Result<Vec<SyntheticHuman>> {
    let q: Vec<f64> = humans.iter().map(|h| h.valence).collect();
    let next = step_valences(&q, incoming, dt, decay)?;
    Ok(humans
        .iter()
        .zip(next)
        .map(|(h, valence)| SyntheticHuman { valence, ..h.clone() })
        .collect())
}
