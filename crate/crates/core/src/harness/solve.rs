use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::Result;
use crate::game::{extend_with_seat_chance, BaseGame, GameDescriptor, GameTree, PlayerId};
use crate::partitions::{build_h_partition, PaSpec};
use crate::solver::{exact_values, mccfr_train, SolveReport};
use crate::strategy::Profile;

#[derive(Debug, Clone)]
pub struct SolveFiles {
    pub strategy: PathBuf,
    /// Values learned while sampling.
    pub values: PathBuf,
    /// Exact self-play values of the average strategy.
    pub values_exact: PathBuf,
}

/// Solves `game`, writing the average strategy and both value tables
/// (known players chance and x, seat-extended keys) into `out`.
pub fn solve(game: BaseGame, iterations: u64, seed: u64, out: &Path) -> Result<(SolveReport, SolveFiles)> {
    let output = mccfr_train(game, iterations, seed)?;
    std::fs::create_dir_all(out)?;
    let files = SolveFiles {
        strategy: out.join("strategy.txt"),
        values: out.join("values.txt"),
        values_exact: out.join("values_exact.txt"),
    };
    let r = &output.report;
    let header = format!(
        "# game={game} iterations={} seed={} exploitability={:.9}\n",
        r.iterations, r.seed, r.exploitability
    );
    std::fs::write(&files.strategy, header + &output.strategy.to_text())?;
    std::fs::write(&files.values, output.values.to_text())?;

    let ext = GameTree::build(extend_with_seat_chance(GameDescriptor {
        base: game,
        seat_extended: false,
    }));
    let profile = ext.resolve(&Profile::self_play(Arc::new(output.strategy)))?;
    let hp = build_h_partition(&ext, PaSpec::CX);
    let exact = exact_values(&ext, &profile, &hp, PlayerId::X)?;
    std::fs::write(&files.values_exact, exact.values.to_text())?;
    Ok((output.report, files))
}
