use std::fmt;

use super::{Action, Actor, BaseGame, Card, GameDescriptor, PlayerId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Phase {
    SeatAssign,
    DealPrivate,
    Betting,
    DealBoard,
    Folded(usize),
    Showdown,
}

/// A game state, identified by its action history from the root.
///
/// Transitions never mutate: [`GameState::apply`] returns a new state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    game: GameDescriptor,
    history: Vec<Action>,
    phase: Phase,
    /// Seat of agent `x` once assigned (always seat 0 in a base game).
    x_seat: Option<usize>,
    hole: [Option<Card>; 2],
    board: Option<Card>,
    round: usize,
    betting: [String; 2],
    committed: [u32; 2],
    raises: u8,
    to_act: usize,
}

/// Summary of a state as seen by the evaluation code.
#[derive(Debug, Clone, PartialEq)]
pub struct StateInfo {
    pub is_terminal: bool,
    pub acting: Option<Actor>,
    /// Net chips per player id; only for terminal states.
    pub utility: Option<[f64; 2]>,
    /// Information-set key of the acting player; only at decisions.
    pub infoset_key: Option<String>,
}

impl GameState {
    pub(crate) fn root(game: GameDescriptor) -> GameState {
        let ante = game.stakes().ante;
        GameState {
            game,
            history: Vec::new(),
            phase: if game.seat_extended {
                Phase::SeatAssign
            } else {
                Phase::DealPrivate
            },
            x_seat: if game.seat_extended { None } else { Some(0) },
            hole: [None, None],
            board: None,
            round: 0,
            betting: [String::new(), String::new()],
            committed: [ante, ante],
            raises: 0,
            to_act: 0,
        }
    }

    pub fn game(&self) -> GameDescriptor {
        self.game
    }

    pub fn history(&self) -> &[Action] {
        &self.history
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.phase, Phase::Folded(_) | Phase::Showdown)
    }

    /// Chips each seat has put in the pot.
    pub fn committed(&self) -> [u32; 2] {
        self.committed
    }

    pub fn pot(&self) -> u32 {
        self.committed[0] + self.committed[1]
    }

    pub fn x_seat(&self) -> Option<usize> {
        self.x_seat
    }

    pub fn hole_cards(&self) -> [Option<Card>; 2] {
        self.hole
    }

    pub fn board(&self) -> Option<Card> {
        self.board
    }

    /// Player id sitting in `seat`, once seats are assigned.
    pub fn player_at_seat(&self, seat: usize) -> Option<PlayerId> {
        self.x_seat.map(|xs| if seat == xs { PlayerId::X } else { PlayerId::Y })
    }

    pub fn seat_of(&self, player: PlayerId) -> Option<usize> {
        self.x_seat.map(|xs| if player == PlayerId::X { xs } else { 1 - xs })
    }

    pub fn actor(&self) -> Option<Actor> {
        match self.phase {
            Phase::SeatAssign | Phase::DealPrivate | Phase::DealBoard => Some(Actor::Chance),
            Phase::Betting => self.player_at_seat(self.to_act).map(Actor::Player),
            Phase::Folded(_) | Phase::Showdown => None,
        }
    }

    fn facing_bet(&self) -> bool {
        self.committed[self.to_act] < self.committed[1 - self.to_act]
    }

    fn dealt(&self) -> Vec<Card> {
        self.hole.iter().flatten().chain(self.board.iter()).copied().collect()
    }

    fn remaining_deck(&self) -> Vec<Card> {
        let dealt = self.dealt();
        self.game
            .base
            .deck()
            .into_iter()
            .filter(|c| !dealt.contains(c))
            .collect()
    }

    /// Legal actions in canonical order.
    pub fn legal_actions(&self) -> Result<Vec<Action>> {
        let actions = match self.phase {
            Phase::SeatAssign => vec![Action::Seat(0), Action::Seat(1)],
            Phase::DealPrivate => match self.game.base {
                BaseGame::Kuhn => {
                    let deck = self.game.base.deck();
                    let mut out = Vec::with_capacity(6);
                    for &a in &deck {
                        for &b in &deck {
                            if a != b {
                                out.push(Action::DealPair(a, b));
                            }
                        }
                    }
                    out
                }
                BaseGame::Leduc => self.remaining_deck().into_iter().map(Action::Deal).collect(),
            },
            Phase::DealBoard => self.remaining_deck().into_iter().map(Action::Deal).collect(),
            Phase::Betting => {
                let mut out = Vec::with_capacity(3);
                if self.facing_bet() {
                    out.push(Action::Fold);
                }
                out.push(Action::Call);
                if self.raises < self.game.stakes().raise_cap {
                    out.push(Action::Raise);
                }
                out
            }
            Phase::Folded(_) | Phase::Showdown => {
                return Err(Error::usage(format!("no legal actions at terminal state `{self}`")))
            }
        };
        Ok(actions)
    }

    /// Chance outcome distribution, aligned with [`GameState::legal_actions`].
    pub fn chance_distribution(&self) -> Result<Vec<(Action, f64)>> {
        if self.actor() != Some(Actor::Chance) {
            return Err(Error::usage(format!("state `{self}` is not a chance node")));
        }
        let actions = self.legal_actions()?;
        let p = 1.0 / actions.len() as f64;
        Ok(actions.into_iter().map(|a| (a, p)).collect())
    }

    /// Successor state `self · action`.
    pub fn apply(&self, action: Action) -> Result<GameState> {
        let legal = match self.legal_actions() {
            Ok(l) => l,
            Err(_) => {
                return Err(Error::IllegalAction {
                    state: self.to_string(),
                    action: action.to_string(),
                })
            }
        };
        if !legal.contains(&action) {
            return Err(Error::IllegalAction {
                state: self.to_string(),
                action: action.to_string(),
            });
        }
        let mut next = self.clone();
        next.history.push(action);
        match (self.phase, action) {
            (Phase::SeatAssign, Action::Seat(s)) => {
                next.x_seat = Some(s as usize);
                next.phase = Phase::DealPrivate;
            }
            (Phase::DealPrivate, Action::DealPair(a, b)) => {
                next.hole = [Some(a), Some(b)];
                next.phase = Phase::Betting;
            }
            (Phase::DealPrivate, Action::Deal(c)) => {
                let seat = if self.hole[0].is_none() { 0 } else { 1 };
                next.hole[seat] = Some(c);
                if seat == 1 {
                    next.phase = Phase::Betting;
                }
            }
            (Phase::DealBoard, Action::Deal(c)) => {
                next.board = Some(c);
                next.round = 1;
                next.raises = 0;
                next.to_act = 0;
                next.phase = Phase::Betting;
            }
            (Phase::Betting, bet) => next.apply_bet(bet),
            _ => unreachable!("legal action matched an impossible phase"),
        }
        Ok(next)
    }

    fn apply_bet(&mut self, action: Action) {
        let seat = self.to_act;
        let other = 1 - seat;
        let facing = self.facing_bet();
        let round_started = !self.betting[self.round].is_empty();
        match action {
            Action::Fold => {
                self.betting[self.round].push('f');
                self.phase = Phase::Folded(seat);
            }
            Action::Call => {
                self.betting[self.round].push(if facing { 'c' } else { 'k' });
                self.committed[seat] = self.committed[other];
                if facing || round_started {
                    self.end_round();
                } else {
                    self.to_act = other;
                }
            }
            Action::Raise => {
                self.betting[self.round].push('r');
                let bet = self.game.stakes().bets[self.round];
                self.committed[seat] = self.committed[other] + bet;
                self.raises += 1;
                self.to_act = other;
            }
            _ => unreachable!("chance action in betting phase"),
        }
    }

    fn end_round(&mut self) {
        if self.round + 1 < self.game.base.rounds() {
            self.phase = Phase::DealBoard;
        } else {
            self.phase = Phase::Showdown;
        }
    }

    fn hand_strength(&self, seat: usize) -> u8 {
        let card = self.hole[seat].expect("showdown without private card");
        match self.board {
            Some(b) if b.rank() == card.rank() => 10 + card.rank(),
            _ => card.rank(),
        }
    }

    /// Net chips won by each seat at a terminal state.
    pub fn seat_utility(&self) -> Option<[f64; 2]> {
        match self.phase {
            Phase::Folded(seat) => {
                let lost = self.committed[seat] as f64;
                let mut u = [lost, lost];
                u[seat] = -lost;
                Some(u)
            }
            Phase::Showdown => {
                let (s0, s1) = (self.hand_strength(0), self.hand_strength(1));
                let stake = self.committed[0] as f64;
                Some(match s0.cmp(&s1) {
                    std::cmp::Ordering::Greater => [stake, -stake],
                    std::cmp::Ordering::Less => [-stake, stake],
                    std::cmp::Ordering::Equal => [0.0, 0.0],
                })
            }
            _ => None,
        }
    }

    /// Net chips won by each player id at a terminal state.
    pub fn utility(&self) -> Option<[f64; 2]> {
        let by_seat = self.seat_utility()?;
        let xs = self.x_seat.expect("terminal state without seat assignment");
        Some([by_seat[xs], by_seat[1 - xs]])
    }

    /// Betting history: `k`heck, `c`all, `r`aise/bet, `f`old, rounds
    /// separated by `.` once the board card is out.
    pub fn betting_string(&self) -> String {
        if self.board.is_some() {
            format!("{}.{}", self.betting[0], self.betting[1])
        } else {
            self.betting[0].clone()
        }
    }

    /// `<seat>|<private card>|<board>|<betting>` from the acting seat's view.
    pub fn infoset_key(&self) -> Option<String> {
        if self.phase != Phase::Betting {
            return None;
        }
        let seat = self.to_act;
        let own = self.hole[seat].map(|c| c.to_string()).unwrap_or_default();
        let board = self.board.map(|c| c.to_string()).unwrap_or_default();
        Some(format!("{}|{}|{}|{}", seat + 1, own, board, self.betting_string()))
    }

    /// Key describing the state as seen by an observer who knows everything
    /// public plus the private cards of the seats not in `hidden`.
    ///
    /// Grammar: `<xseat>|<private cards>|<board>|<betting>`, where `xseat`
    /// is `*` in a base game, `-` before seat assignment and `1`/`2`
    /// otherwise, and each dealt private card appears in seat order either
    /// as itself or as `??` when hidden. Hidden cards keep their
    /// placeholder so that states before and after a private deal never
    /// share a key.
    pub fn view_key(&self, hidden: [bool; 2]) -> String {
        let seat_field = match (self.game.seat_extended, self.x_seat) {
            (false, _) => "*".to_string(),
            (true, None) => "-".to_string(),
            (true, Some(s)) => (s + 1).to_string(),
        };
        let mut privates = String::new();
        for (card, hide) in self.hole.iter().zip(hidden) {
            if let Some(c) = card {
                if hide {
                    privates.push_str("??");
                } else {
                    privates.push_str(&c.to_string());
                }
            }
        }
        let board = self.board.map(|c| c.to_string()).unwrap_or_default();
        format!("{}|{}|{}|{}", seat_field, privates, board, self.betting_string())
    }

    /// Token for `action` as it would be taken here (`k` for a check).
    pub fn action_token(&self, action: Action) -> String {
        match action {
            Action::Call if self.phase == Phase::Betting && !self.facing_bet() => "k".into(),
            other => other.to_string(),
        }
    }

    pub fn info(&self) -> StateInfo {
        StateInfo {
            is_terminal: self.is_terminal(),
            acting: self.actor(),
            utility: self.utility(),
            infoset_key: self.infoset_key(),
        }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.game)?;
        for a in &self.history {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::extend_with_seat_chance;

    fn card(s: &str) -> Card {
        s.parse().unwrap()
    }

    fn play(game: GameDescriptor, tokens: &[&str]) -> GameState {
        tokens
            .iter()
            .fold(game.initial_state(), |s, t| s.apply(t.parse().unwrap()).unwrap())
    }

    #[test]
    fn roots() {
        let k = GameDescriptor::kuhn().initial_state();
        assert!(k.history().is_empty());
        assert_eq!(k.actor(), Some(Actor::Chance));
        let l = GameDescriptor::leduc().initial_state();
        assert_eq!(l.pot(), 2);
        let ext = extend_with_seat_chance(GameDescriptor::leduc()).initial_state();
        let dist = ext.chance_distribution().unwrap();
        assert_eq!(dist, vec![(Action::Seat(0), 0.5), (Action::Seat(1), 0.5)]);
    }

    #[test]
    fn kuhn_root_has_six_ordered_deals() {
        let root = GameDescriptor::kuhn().initial_state();
        let deals = root.legal_actions().unwrap();
        assert_eq!(deals.len(), 6);
        let mut sorted = deals.clone();
        sorted.sort();
        assert_eq!(sorted, deals);
        for (_, p) in root.chance_distribution().unwrap() {
            assert_eq!(p, 1.0 / 6.0);
        }
    }

    #[test]
    fn kuhn_check_check_showdown() {
        let s = play(GameDescriptor::kuhn(), &["JsQs", "k", "k"]);
        assert!(s.is_terminal());
        assert_eq!(s.utility(), Some([-1.0, 1.0]));
        let s = play(GameDescriptor::kuhn(), &["KsQs", "r", "c"]);
        assert_eq!(s.utility(), Some([2.0, -2.0]));
        let s = play(GameDescriptor::kuhn(), &["JsQs", "k", "r", "f"]);
        assert_eq!(s.utility(), Some([-1.0, 1.0]));
    }

    #[test]
    fn kuhn_bet_cap_is_one() {
        let s = play(GameDescriptor::kuhn(), &["JsQs", "r"]);
        assert_eq!(s.legal_actions().unwrap(), vec![Action::Fold, Action::Call]);
    }

    #[test]
    fn leduc_board_after_check_check() {
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "k", "k"]);
        assert_eq!(s.actor(), Some(Actor::Chance));
        let dist = s.chance_distribution().unwrap();
        assert_eq!(dist.len(), 4);
        assert!(dist.iter().all(|&(_, p)| p == 0.25));
    }

    #[test]
    fn leduc_raise_cap() {
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "r", "r"]);
        assert_eq!(s.legal_actions().unwrap(), vec![Action::Fold, Action::Call]);
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "k", "r", "r"]);
        assert_eq!(s.legal_actions().unwrap(), vec![Action::Fold, Action::Call]);
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "r"]);
        assert_eq!(
            s.legal_actions().unwrap(),
            vec![Action::Fold, Action::Call, Action::Raise]
        );
    }

    #[test]
    fn leduc_fold_loses_commitment() {
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "r", "f"]);
        assert!(s.is_terminal());
        assert_eq!(s.utility(), Some([1.0, -1.0]));
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "r", "r", "f"]);
        assert_eq!(s.utility(), Some([-3.0, 3.0]));
    }

    #[test]
    fn leduc_pair_beats_high_card() {
        // total pot 6: 3 chips each after a round-1 bet and call
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "r", "c", "Qh", "k", "k"]);
        assert_eq!(s.pot(), 6);
        assert_eq!(s.utility(), Some([3.0, -3.0]));
        let s = play(GameDescriptor::leduc(), &["Js", "Ks", "r", "r", "c", "Jh", "k", "k"]);
        assert_eq!(s.committed(), [5, 5]);
        assert_eq!(s.utility(), Some([5.0, -5.0]));
    }

    #[test]
    fn leduc_tie_splits() {
        let s = play(GameDescriptor::leduc(), &["Qs", "Qh", "r", "c", "Kh", "r", "c"]);
        assert_eq!(s.committed(), [7, 7]);
        assert_eq!(s.utility(), Some([0.0, 0.0]));
    }

    #[test]
    fn terminal_has_no_actions_and_rejects_moves() {
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "r", "f"]);
        assert!(matches!(s.legal_actions(), Err(Error::Usage(_))));
        assert!(matches!(s.apply(Action::Call), Err(Error::IllegalAction { .. })));
    }

    #[test]
    fn illegal_action_named() {
        let s = GameDescriptor::leduc().initial_state();
        let err = s.apply(Action::Fold).unwrap_err();
        assert!(err.to_string().contains("`f`"));
    }

    #[test]
    fn infoset_hides_opponent_card() {
        let a = play(GameDescriptor::leduc(), &["Qs", "Ks", "k"]);
        let b = play(GameDescriptor::leduc(), &["Js", "Ks", "k"]);
        assert_eq!(a.infoset_key(), b.infoset_key());
        assert_eq!(a.infoset_key().unwrap(), "2|Ks||k");
        let c = play(GameDescriptor::leduc(), &["Qs", "Ks", "k", "k", "Jh"]);
        assert_eq!(c.infoset_key().unwrap(), "1|Qs|Jh|kk.");
    }

    #[test]
    fn seat_extended_utilities_follow_agent() {
        let g = extend_with_seat_chance(GameDescriptor::kuhn());
        let s = play(g, &["x2", "JsQs", "k", "k"]);
        // x holds Qs in seat 2 and wins
        assert_eq!(s.utility(), Some([1.0, -1.0]));
        assert_eq!(s.seat_utility(), Some([-1.0, 1.0]));
    }

    #[test]
    fn view_key_hides_selected_seats() {
        let s = play(GameDescriptor::leduc(), &["Qs", "Ks", "k"]);
        assert_eq!(s.view_key([true, false]), "*|??Ks||k");
        assert_eq!(s.view_key([false, false]), "*|QsKs||k");
        let one = play(GameDescriptor::leduc(), &["Qs"]);
        assert_eq!(one.view_key([true, true]), "*|??||");
        assert_eq!(card("Kh").to_string(), "Kh");
    }
}
