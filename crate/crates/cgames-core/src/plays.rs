// SPDX-License-Identifier: Apache-2.0

//! Plays: chronological linearizations of strategy behaviour, with P-views,
//! visibility, and the alternating and non-alternating well-bracketing
//! disciplines.
//!
//! A play is a sequence of strategy events whose prefixes all form
//! configurations. Its moves display to game events; an answer's
//! *justifier* is the question it hangs under in the arena, located in the
//! play by local injectivity.

use crate::es::{BitSet, EventId, Polarity, QA};
use crate::strategy::Strategy;

/// A play over a fixed strategy: events in chronological order.
pub type Play = Vec<EventId>;

/// The justifier position of each move: the position of the move displaying
/// to the arena predecessor, `None` for initial moves.
pub fn justifiers(sigma: &Strategy, play: &Play) -> Vec<Option<usize>> {
    let game = &sigma.seq.game;
    play.iter()
        .enumerate()
        .map(|(i, &e)| {
            let parent = game.parent(sigma.display[e])?;
            play[..i].iter().position(|&f| sigma.display[f] == parent)
        })
        .collect()
}

/// Positions of answered questions: a question is answered when a later
/// answer points at it.
fn answered_before(sigma: &Strategy, play: &Play, upto: usize) -> Vec<bool> {
    let just = justifiers(sigma, play);
    let mut answered = vec![false; play.len()];
    for i in 0..upto {
        if sigma.qa(play[i]) == QA::Answer {
            if let Some(j) = just[i] {
                answered[j] = true;
            }
        }
    }
    answered
}

/// Check the play conditions: valid prefixes, non-repetitive, negative
/// start; alternation optionally.
pub fn is_play(sigma: &Strategy, play: &Play, alternating: bool) -> bool {
    let n = sigma.es.len();
    let mut x = BitSet::new(n);
    let mut last_pol: Option<Polarity> = None;
    for (i, &e) in play.iter().enumerate() {
        if x.contains(e) {
            return false;
        }
        if i == 0 && sigma.pol(e) != Polarity::Neg {
            return false;
        }
        if alternating {
            if let Some(p) = last_pol {
                if sigma.pol(e) == p {
                    return false;
                }
            }
        }
        x.insert(e);
        if !sigma.es.is_configuration(&x) {
            return false;
        }
        last_pol = Some(sigma.pol(e));
    }
    true
}

/// All linearizations of the strategy's configurations, capped in number.
pub fn unfold_nonalt(sigma: &Strategy, max_plays: usize, max_len: usize) -> Vec<Play> {
    let mut out: Vec<Play> = vec![Vec::new()];
    let mut frontier: Vec<(BitSet, Play)> = vec![(BitSet::new(sigma.es.len()), Vec::new())];
    while let Some((x, play)) = frontier.pop() {
        if play.len() >= max_len || out.len() >= max_plays {
            continue;
        }
        for e in sigma.es.enabled(&x) {
            if play.is_empty() && sigma.pol(e) != Polarity::Neg {
                continue;
            }
            let mut nx = x.clone();
            nx.insert(e);
            let mut np = play.clone();
            np.push(e);
            if out.len() < max_plays {
                out.push(np.clone());
                frontier.push((nx, np));
            }
        }
    }
    out
}

/// The alternating sublanguage of the unfolding.
pub fn unfold_alt(sigma: &Strategy, max_plays: usize, max_len: usize) -> Vec<Play> {
    let mut out: Vec<Play> = vec![Vec::new()];
    let mut frontier: Vec<(BitSet, Play)> = vec![(BitSet::new(sigma.es.len()), Vec::new())];
    while let Some((x, play)) = frontier.pop() {
        if play.len() >= max_len || out.len() >= max_plays {
            continue;
        }
        for e in sigma.es.enabled(&x) {
            match play.last() {
                None => {
                    if sigma.pol(e) != Polarity::Neg {
                        continue;
                    }
                }
                Some(&l) => {
                    if sigma.pol(e) == sigma.pol(l) {
                        continue;
                    }
                }
            }
            let mut nx = x.clone();
            nx.insert(e);
            let mut np = play.clone();
            np.push(e);
            if out.len() < max_plays {
                out.push(np.clone());
                frontier.push((nx, np));
            }
        }
    }
    out
}

/// The P-view of an alternating play, as a subsequence of positions:
/// Player moves keep the view so far; an Opponent move restarts from its
/// justifier (or from itself when initial).
pub fn pview(sigma: &Strategy, play: &Play) -> Vec<usize> {
    let just = justifiers(sigma, play);
    fn go(sigma: &Strategy, play: &Play, just: &[Option<usize>], upto: usize) -> Vec<usize> {
        if upto == 0 {
            return Vec::new();
        }
        let i = upto - 1;
        if sigma.pol(play[i]) == Polarity::Pos {
            let mut v = go(sigma, play, just, i);
            v.push(i);
            v
        } else {
            match just[i] {
                None => vec![i],
                Some(j) => {
                    // View of the prefix up to and including the justifier.
                    let mut v = go(sigma, play, just, j + 1);
                    v.push(i);
                    v
                }
            }
        }
    }
    go(sigma, play, &just, play.len())
}

/// P-visibility: for every prefix, the P-view is itself a valid play (in
/// particular its displayed events are down-closed in the game).
pub fn p_visible(sigma: &Strategy, play: &Play) -> bool {
    for k in 1..=play.len() {
        let prefix: Play = play[..k].to_vec();
        let view = pview(sigma, &prefix);
        let events: Play = view.iter().map(|&i| prefix[i]).collect();
        let displayed = BitSet::from_iter(
            sigma.seq.game.es.len(),
            events.iter().map(|&e| sigma.display[e]),
        );
        if !sigma.seq.game.es.is_configuration(&displayed) {
            return false;
        }
    }
    true
}

/// Alternating well-bracketing: each answer answers the last unanswered
/// question of the prefix before it (the pending question).
pub fn wb_alternating(sigma: &Strategy, play: &Play) -> bool {
    let just = justifiers(sigma, play);
    for i in 0..play.len() {
        if sigma.qa(play[i]) != QA::Answer {
            continue;
        }
        let answered = answered_before(sigma, play, i);
        let pending = (0..i)
            .rev()
            .find(|&j| sigma.qa(play[j]) == QA::Question && !answered[j]);
        if just[i] != pending {
            return false;
        }
    }
    true
}

/// Non-alternating well-bracketing: a question may only justify further
/// moves while unanswered (*fork*), and may only be answered once every
/// question it justified has been answered (*wait*).
pub fn wb_nonalternating(sigma: &Strategy, play: &Play) -> bool {
    let just = justifiers(sigma, play);
    for i in 0..play.len() {
        let q = match just[i] {
            Some(q) => q,
            None => continue,
        };
        let answered = answered_before(sigma, play, i);
        // fork: the justifier is still unanswered.
        if answered[q] {
            return false;
        }
        // wait: answering a question requires its sub-questions closed.
        if sigma.qa(play[i]) == QA::Answer {
            for j in 0..i {
                if just[j] == Some(q) && sigma.qa(play[j]) == QA::Question && !answered[j] {
                    return false;
                }
            }
        }
    }
    true
}

/// Well-bracketing at the strategy level (either discipline): the strategy
/// is never the first to break it — every Player move extending a
/// well-bracketed play keeps it well-bracketed.
pub fn wb_strategy(
    sigma: &Strategy,
    alternating: bool,
    max_plays: usize,
    max_len: usize,
) -> bool {
    let plays = if alternating {
        unfold_alt(sigma, max_plays, max_len)
    } else {
        unfold_nonalt(sigma, max_plays, max_len)
    };
    let check: fn(&Strategy, &Play) -> bool =
        if alternating { wb_alternating } else { wb_nonalternating };
    for play in &plays {
        if play.is_empty() {
            continue;
        }
        let last = *play.last().unwrap();
        if sigma.pol(last) != Polarity::Pos {
            continue;
        }
        let prefix: Play = play[..play.len() - 1].to_vec();
        if check(sigma, &prefix) && !check(sigma, play) {
            return false;
        }
    }
    true
}

/// Complete plays: every question in the play has been answered.
pub fn complete(sigma: &Strategy, play: &Play) -> bool {
    let answered = answered_before(sigma, play, play.len());
    (0..play.len()).all(|i| sigma.qa(play[i]) != QA::Question || answered[i])
}

/// The pointer quotient of a play: per move, its meager label (copy indices
/// erased) and justifier position. Comparing with and without the pointer
/// component distinguishes strategies that differ only in pointers.
pub fn pointer_quotient(sigma: &Strategy, play: &Play) -> Vec<(String, Option<usize>)> {
    let just = justifiers(sigma, play);
    play.iter()
        .enumerate()
        .map(|(i, &e)| (sigma.seq.game.lbl(sigma.display[e]).to_string(), just[i]))
        .collect()
}
