//! Dumping built-in scenarios as plain dataset CSV files.

use std::path::Path;

use exnrule::dataset::write_csv;
use exnrule::synthgen::{generate, spec_for};
use exnrule::{RngStream, ScenarioId};

use crate::error::Result;

/// Writes one draw of a scenario (stream `(seed, 0)`) as a loadable CSV:
/// header plus 100 rows, features then a final `class` column, no metadata
/// lines.
pub fn dump_scenario(id: ScenarioId, seed: u64, path: impl AsRef<Path>) -> Result<()> {
    let mut rng = RngStream::new(seed, 0);
    let data = generate(&spec_for(id), &mut rng)?;
    write_csv(&data, path)?;
    Ok(())
}
