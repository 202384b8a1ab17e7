use crate::error::{Error, Result};

/// Change in mean group valence over the horizon following an intervention.
pub fn compute_reward(history: &[f64], t_intervention: usize, horizon: usize) -> Result<f64> {
    let end = t_intervention + horizon;
    if end >= history.len() {
        return Err(Error::InsufficientHistory {
            needed: end,
            len: history.len(),
        });
    }
    Ok(history[end] - history[t_intervention])
}
