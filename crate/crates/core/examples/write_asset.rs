//! Regenerates the built-in synthetic system and its oracle file.
//!
//! ```text
//! cargo run -p cbol-core --example write_asset -- crates/core/assets
//! ```

use std::path::PathBuf;

use cbol_core::reporting::oracle::{run_oracle, DEFAULT_RESOLUTION};
use cbol_core::system::{SyntheticConstants, SYSTEM_SEED};
use cbol_core::{BoundsBox, Objective, SyntheticSystem, Weights};

fn main() -> cbol_core::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/assets".into()),
    );
    let constants = SyntheticConstants::generate(SYSTEM_SEED)?;
    std::fs::write(dir.join("synthetic_v1.json"), constants.to_asset_json()?)?;

    let system = SyntheticSystem::new(constants)?;
    let objective = Objective::new(Weights::step(), system.reference_intensity())?;
    let oracle = run_oracle(
        &system,
        &objective,
        &BoundsBox::unit_latent(),
        DEFAULT_RESOLUTION,
    )?;
    std::fs::write(dir.join("oracle_v1.json"), oracle.to_json()?)?;
    println!("wrote {}", dir.display());
    Ok(())
}
