//! Extensive-form poker games: Kuhn poker, Leduc hold'em and the
//! seat-alternation wrapper used for head-to-head evaluation.
//!
//! A game is described by a [`GameDescriptor`]. States are histories
//! ([`GameState`]) and transitions are pure. For the small games here the
//! whole tree can be materialised with [`GameTree`], which is what every
//! exact computation in the crate walks.

mod state;
mod tree;

pub use state::{GameState, StateInfo};
pub use tree::{reach_vector, GameTree, InfoSet, Node, NodeId, NodeKind, ReachVector, ResolvedProfile};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A non-chance player. In a base game the id is the seat; in a
/// seat-extended game id 0 is agent `x` and id 1 is agent `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(pub u8);

impl PlayerId {
    pub const X: PlayerId = PlayerId(0);
    pub const Y: PlayerId = PlayerId(1);
    pub const BOTH: [PlayerId; 2] = [PlayerId::X, PlayerId::Y];

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn opponent(self) -> PlayerId {
        PlayerId(1 - self.0)
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "x"),
            _ => write!(f, "y"),
        }
    }
}

/// Who moves at a non-terminal state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Actor {
    Chance,
    Player(PlayerId),
}

/// A playing card. Ranks are J < Q < K, suits are spades and hearts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card(u8);

const RANK_CHARS: [char; 3] = ['J', 'Q', 'K'];
const SUIT_CHARS: [char; 2] = ['s', 'h'];

impl Card {
    pub fn new(rank: u8, suit: u8) -> Card {
        debug_assert!(rank < 3 && suit < 2);
        Card(rank * 2 + suit)
    }

    pub fn rank(self) -> u8 {
        self.0 / 2
    }

    pub fn suit(self) -> u8 {
        self.0 % 2
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            RANK_CHARS[self.rank() as usize],
            SUIT_CHARS[self.suit() as usize]
        )
    }
}

impl FromStr for Card {
    type Err = Error;

    fn from_str(s: &str) -> Result<Card> {
        let mut chars = s.chars();
        let (Some(r), Some(su), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(Error::usage(format!("bad card `{s}`")));
        };
        let rank = RANK_CHARS.iter().position(|&c| c == r);
        let suit = SUIT_CHARS.iter().position(|&c| c == su);
        match (rank, suit) {
            (Some(rank), Some(suit)) => Ok(Card::new(rank as u8, suit as u8)),
            _ => Err(Error::usage(format!("bad card `{s}`"))),
        }
    }
}

/// Player decisions and chance outcomes share one action type so that
/// chance nodes can be partitioned exactly like decision nodes.
///
/// The derived ordering is the canonical one: fold < call/check < raise,
/// then chance outcomes in deck order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Fold,
    /// Check when no bet is faced, call otherwise.
    Call,
    /// Bet when no bet is faced, raise otherwise.
    Raise,
    /// A single card: a Leduc private card or the public board card.
    Deal(Card),
    /// Kuhn's joint private deal: (seat 1 card, seat 2 card).
    DealPair(Card, Card),
    /// Seat assignment of agent `x` in the seat-extended game (0 or 1).
    Seat(u8),
}

impl Action {
    pub fn is_chance(self) -> bool {
        matches!(self, Action::Deal(_) | Action::DealPair(..) | Action::Seat(_))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Fold => write!(f, "f"),
            Action::Call => write!(f, "c"),
            Action::Raise => write!(f, "r"),
            Action::Deal(c) => write!(f, "{c}"),
            Action::DealPair(a, b) => write!(f, "{a}{b}"),
            Action::Seat(s) => write!(f, "x{}", s + 1),
        }
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Action> {
        match s {
            "f" => return Ok(Action::Fold),
            "c" | "k" => return Ok(Action::Call),
            "r" => return Ok(Action::Raise),
            "x1" => return Ok(Action::Seat(0)),
            "x2" => return Ok(Action::Seat(1)),
            _ => {}
        }
        match s.len() {
            2 => Ok(Action::Deal(s.parse()?)),
            4 if s.is_ascii() => Ok(Action::DealPair(s[..2].parse()?, s[2..].parse()?)),
            _ => Err(Error::usage(format!("bad action token `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseGame {
    Kuhn,
    Leduc,
}

/// Chip stakes and deck of a base game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stakes {
    pub ante: u32,
    /// Fixed bet size per betting round.
    pub bets: &'static [u32],
    /// Maximum number of bets/raises in one round.
    pub raise_cap: u8,
}

impl BaseGame {
    pub fn stakes(self) -> Stakes {
        match self {
            BaseGame::Kuhn => Stakes {
                ante: 1,
                bets: &[1],
                raise_cap: 1,
            },
            BaseGame::Leduc => Stakes {
                ante: 1,
                bets: &[2, 4],
                raise_cap: 2,
            },
        }
    }

    pub fn deck(self) -> Vec<Card> {
        match self {
            BaseGame::Kuhn => (0..3).map(|r| Card::new(r, 0)).collect(),
            BaseGame::Leduc => (0..3).flat_map(|r| (0..2).map(move |s| Card::new(r, s))).collect(),
        }
    }

    pub fn rounds(self) -> usize {
        self.stakes().bets.len()
    }

    /// Largest amount a single player can win or lose.
    pub fn max_pot(self) -> f64 {
        let st = self.stakes();
        let per_round: u32 = st.bets.iter().map(|b| b * st.raise_cap as u32).sum();
        (st.ante + per_round) as f64
    }
}

impl fmt::Display for BaseGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseGame::Kuhn => write!(f, "kuhn"),
            BaseGame::Leduc => write!(f, "leduc"),
        }
    }
}

impl FromStr for BaseGame {
    type Err = Error;

    fn from_str(s: &str) -> Result<BaseGame> {
        match s {
            "kuhn" => Ok(BaseGame::Kuhn),
            "leduc" => Ok(BaseGame::Leduc),
            _ => Err(Error::usage(format!("unknown game `{s}` (expected kuhn or leduc)"))),
        }
    }
}

/// Selects a game. With `seat_extended` the root is a 50/50 chance node
/// placing agent `x` in seat 1 or seat 2, and utilities are reported per
/// agent rather than per seat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameDescriptor {
    pub base: BaseGame,
    pub seat_extended: bool,
}

impl GameDescriptor {
    pub fn kuhn() -> Self {
        GameDescriptor {
            base: BaseGame::Kuhn,
            seat_extended: false,
        }
    }

    pub fn leduc() -> Self {
        GameDescriptor {
            base: BaseGame::Leduc,
            seat_extended: false,
        }
    }

    pub fn stakes(&self) -> Stakes {
        self.base.stakes()
    }

    pub fn players(&self) -> [PlayerId; 2] {
        PlayerId::BOTH
    }

    pub fn initial_state(&self) -> GameState {
        GameState::root(*self)
    }
}

/// Wraps a two-player game in the seat-assignment chance event.
pub fn extend_with_seat_chance(game: GameDescriptor) -> GameDescriptor {
    GameDescriptor {
        base: game.base,
        seat_extended: true,
    }
}

impl fmt::Display for GameDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.seat_extended {
            write!(f, "seat_extended({})", self.base)
        } else {
            write!(f, "{}", self.base)
        }
    }
}
