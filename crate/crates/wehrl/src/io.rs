//! JSON input handling. Commands accept either representation of a state:
//! an amplitude file (object with "amps") or a point file (object with
//! "points"); conversion in both directions happens on demand.

use crate::majorana::{analyze, decompose_points, synthesize, MajoranaDecomposition, PointSet};
use crate::spin::SpinState;
use crate::WehrlError;

/// A parsed input file in whichever representation it used.
#[derive(Clone, Debug)]
pub enum StateInput {
    State(SpinState),
    Points(PointSet),
}

/// Parses a state-or-points JSON document. Syntax errors keep serde_json's
/// line/column context; schema errors name the offending field.
pub fn parse_state_or_points(text: &str) -> Result<StateInput, WehrlError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| WehrlError::InvalidArgument(format!("invalid JSON: {e}")))?;
    let Some(obj) = value.as_object() else {
        return Err(WehrlError::InvalidArgument(
            "expected a JSON object with \"amps\" or \"points\"".into(),
        ));
    };
    if obj.contains_key("amps") {
        let state: SpinState = serde_json::from_value(value)
            .map_err(|e| WehrlError::InvalidArgument(format!("invalid state: {e}")))?;
        Ok(StateInput::State(state))
    } else if obj.contains_key("points") {
        let points: PointSet = serde_json::from_value(value)
            .map_err(|e| WehrlError::InvalidArgument(format!("invalid point set: {e}")))?;
        Ok(StateInput::Points(points))
    } else {
        Err(WehrlError::InvalidArgument(
            "expected a JSON object with \"amps\" or \"points\"".into(),
        ))
    }
}

/// Converts to amplitude form; returns the synthesis normalization when the
/// input was a point file.
pub fn to_state(input: &StateInput) -> Result<(SpinState, Option<f64>), WehrlError> {
    match input {
        StateInput::State(s) => Ok((s.clone(), None)),
        StateInput::Points(ps) => {
            let (state, c) = synthesize(ps.j(), ps.points())?;
            Ok((state, Some(c)))
        }
    }
}

/// Converts to point form (analyzing amplitude inputs).
pub fn to_decomposition(input: &StateInput) -> Result<MajoranaDecomposition, WehrlError> {
    match input {
        StateInput::State(s) => analyze(s),
        StateInput::Points(ps) => decompose_points(ps),
    }
}
