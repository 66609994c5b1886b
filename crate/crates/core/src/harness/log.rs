use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::Episode;
use crate::game::BaseGame;

const MAGIC: &str = "# aivat-episodes v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogHeader {
    pub game: BaseGame,
    pub seed: u64,
    pub x: String,
    pub y: String,
}

/// Self-describing, line-oriented record of simulated games.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub episodes: Vec<Episode>,
}

impl EpisodeLog {
    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = format!("{MAGIC}\n# game={} seed={} x={} y={}\n", h.game, h.seed, h.x, h.y);
        for ep in &self.episodes {
            let _ = writeln!(out, "{ep}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(MAGIC) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `{MAGIC}`"),
            });
        }
        let header = lines.next().and_then(parse_header).ok_or_else(|| Error::Parse {
            line: 2,
            msg: "expected `# game=<g> seed=<n> x=<agent> y=<agent>`".into(),
        })?;
        let episodes = lines
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|(i, l)| Episode::parse_line(l, i + 3))
            .collect::<Result<Vec<_>>>()?;
        Ok(EpisodeLog { header, episodes })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read log `{}`: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn parse_header(line: &str) -> Option<LogHeader> {
    let rest = line.strip_prefix('#')?;
    let (mut game, mut seed, mut x, mut y) = (None, None, None, None);
    for field in rest.split_whitespace() {
        match field.split_once('=')? {
            ("game", v) => game = v.parse().ok(),
            ("seed", v) => seed = v.parse().ok(),
            ("x", v) => x = Some(v.to_string()),
            ("y", v) => y = Some(v.to_string()),
            _ => {}
        }
    }
    Some(LogHeader {
        game: game?,
        seed: seed?,
        x: x?,
        y: y?,
    })
}
