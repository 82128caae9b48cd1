use blockers_core::blocker_model::flag_positions;
use blockers_core::{FlagSpec, PositionSet};

use crate::args::SetArgs;
use crate::CliError;

/// JSON when the first non-blank byte is '{', otherwise a '.'/'X' grid.
pub fn parse_position_set(text: &str) -> Result<PositionSet, CliError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid position set JSON: {e}")))
    } else {
        Ok(PositionSet::from_grid(text)?)
    }
}

pub fn load_set(args: &SetArgs) -> Result<PositionSet, CliError> {
    if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let set = parse_position_set(&text)?;
        if let Some(n) = args.n {
            if n != set.n() {
                return Err(CliError::Input(format!(
                    "--n {n} disagrees with the file's order {}",
                    set.n()
                )));
            }
        }
        return Ok(set);
    }
    match (args.n, args.m, args.t) {
        (Some(n), Some(m), Some(t)) => Ok(flag_positions(FlagSpec::new(n, m, t)?)),
        _ => Err(CliError::Input("give --file, or --n with --m and --t".into())),
    }
}
