//! Transcripts of announced ballots and their binary flag projections.
//!
//! A [`Transcript`] stores only valid ballots, in the order they were read
//! out. Every analysis works on a [`FlagSequence`]: one flag per ballot,
//! set when the ballot satisfies some rule (marks a given candidate, marks
//! every precinct leader, and so on).

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper limit on marks for a ballot to count as valid.
pub const DEFAULT_MAX_MARKS: usize = 5;

/// True iff a ballot with `mark_count` marks is valid.
pub fn validity_filter(mark_count: usize, max_marks: usize) -> bool {
    (1..=max_marks).contains(&mark_count)
}

/// The set of candidates (roster indices) marked on one ballot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ballot(BTreeSet<usize>);

impl Ballot {
    pub fn new(marks: impl IntoIterator<Item = usize>) -> Self {
        Ballot(marks.into_iter().collect())
    }

    pub fn marks(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, candidate: usize) -> bool {
        self.0.contains(&candidate)
    }

    pub fn is_subset_of(&self, other: &BTreeSet<usize>) -> bool {
        self.0.is_subset(other)
    }
}

/// The valid ballots of one precinct in announcement order.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    precinct_id: String,
    candidates: Vec<String>,
    ballots: Vec<Ballot>,
    max_marks: usize,
    invalid: usize,
}

impl Transcript {
    /// Creates an empty transcript for the given roster.
    pub fn new(
        precinct_id: impl Into<String>,
        candidates: Vec<String>,
        max_marks: usize,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Roster("roster is empty".into()));
        }
        if max_marks == 0 {
            return Err(Error::domain("max_marks must be positive"));
        }
        let mut seen = BTreeSet::new();
        for label in &candidates {
            if !seen.insert(label.as_str()) {
                return Err(Error::Roster(format!("duplicate candidate `{label}`")));
            }
        }
        Ok(Transcript {
            precinct_id: precinct_id.into(),
            candidates,
            ballots: Vec::new(),
            max_marks,
            invalid: 0,
        })
    }

    /// Builds a transcript from roster-index ballots, dropping invalid ones.
    pub fn from_ballots<I, B>(
        precinct_id: impl Into<String>,
        candidates: Vec<String>,
        max_marks: usize,
        ballots: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = usize>,
    {
        let mut t = Transcript::new(precinct_id, candidates, max_marks)?;
        for b in ballots {
            t.push(Ballot::new(b))?;
        }
        Ok(t)
    }

    /// Appends a ballot in announcement order. Returns `false` (and counts
    /// the ballot as invalid) when it fails the validity filter.
    pub fn push(&mut self, ballot: Ballot) -> Result<bool> {
        if let Some(bad) = ballot.marks().find(|&i| i >= self.candidates.len()) {
            return Err(Error::Roster(format!(
                "mark for candidate index {bad} outside a roster of {}",
                self.candidates.len()
            )));
        }
        if !validity_filter(ballot.len(), self.max_marks) {
            self.invalid += 1;
            return Ok(false);
        }
        self.ballots.push(ballot);
        Ok(true)
    }

    pub fn precinct_id(&self) -> &str {
        &self.precinct_id
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn max_marks(&self) -> usize {
        self.max_marks
    }

    /// Number of valid ballots.
    pub fn n(&self) -> usize {
        self.ballots.len()
    }

    /// Number of candidates on the roster.
    pub fn c(&self) -> usize {
        self.candidates.len()
    }

    /// Ballots rejected by the validity filter.
    pub fn invalid_count(&self) -> usize {
        self.invalid
    }

    pub fn candidate_index(&self, label: &str) -> Result<usize> {
        self.candidates
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownCandidate(label.to_string()))
    }

    /// Votes received by each candidate, in roster order.
    pub fn vote_counts(&self) -> Vec<usize> {
        let mut votes = vec![0; self.c()];
        for b in &self.ballots {
            for i in b.marks() {
                votes[i] += 1;
            }
        }
        votes
    }

    /// Returns a transcript with the same roster and a new ballot order.
    pub(crate) fn with_ballots(&self, ballots: Vec<Ballot>) -> Transcript {
        Transcript {
            precinct_id: self.precinct_id.clone(),
            candidates: self.candidates.clone(),
            ballots,
            max_marks: self.max_marks,
            invalid: self.invalid,
        }
    }
}

/// Binary state of a single flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlagState {
    Zero,
    One,
}

impl FlagState {
    pub fn as_bool(self) -> bool {
        matches!(self, FlagState::One)
    }

    pub fn flipped(self) -> FlagState {
        match self {
            FlagState::Zero => FlagState::One,
            FlagState::One => FlagState::Zero,
        }
    }
}

impl fmt::Display for FlagState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.as_bool() { "1" } else { "0" })
    }
}

/// Ordered binary flags extracted from a transcript under some rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagSequence {
    label: String,
    flags: Vec<bool>,
    r1: usize,
}

impl FlagSequence {
    pub fn new(label: impl Into<String>, flags: Vec<bool>) -> Self {
        let r1 = flags.iter().filter(|&&f| f).count();
        FlagSequence {
            label: label.into(),
            flags,
            r1,
        }
    }

    /// Parses a string of `0`/`1` characters; other characters are skipped.
    pub fn from_bits(label: impl Into<String>, bits: &str) -> Self {
        let flags = bits
            .chars()
            .filter_map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        FlagSequence::new(label, flags)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn n(&self) -> usize {
        self.flags.len()
    }

    pub fn r0(&self) -> usize {
        self.flags.len() - self.r1
    }

    pub fn r1(&self) -> usize {
        self.r1
    }

    pub fn count(&self, state: FlagState) -> usize {
        match state {
            FlagState::Zero => self.r0(),
            FlagState::One => self.r1(),
        }
    }

    /// Empirical frequency of `state`; zero for an empty sequence.
    pub fn frequency(&self, state: FlagState) -> f64 {
        if self.flags.is_empty() {
            0.0
        } else {
            self.count(state) as f64 / self.n() as f64
        }
    }

    pub fn reversed(&self) -> FlagSequence {
        let mut flags = self.flags.clone();
        flags.reverse();
        FlagSequence::new(self.label.clone(), flags)
    }

    pub fn complemented(&self) -> FlagSequence {
        FlagSequence::new(self.label.clone(), self.flags.iter().map(|f| !f).collect())
    }

    /// Maximal constant runs as `(state, range)` pairs in sequence order.
    pub fn runs(&self) -> Vec<(FlagState, Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.flags.len() {
            if k == self.flags.len() || self.flags[k] != self.flags[start] {
                let state = if self.flags[start] {
                    FlagState::One
                } else {
                    FlagState::Zero
                };
                out.push((state, start..k));
                start = k;
            }
        }
        out
    }

    /// Position of the first longest run of `state`, if the state occurs.
    pub fn longest_run_span(&self, state: FlagState) -> Option<Range<usize>> {
        self.runs()
            .into_iter()
            .filter(|(s, _)| *s == state)
            .map(|(_, r)| r)
            .fold(None, |best: Option<Range<usize>>, r| match best {
                Some(b) if b.len() >= r.len() => Some(b),
                _ => Some(r),
            })
    }
}

/// Longest runs of each state and total number of runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub s0: usize,
    pub s1: usize,
    pub m: usize,
}

impl RunStats {
    pub fn longest(&self, state: FlagState) -> usize {
        match state {
            FlagState::Zero => self.s0,
            FlagState::One => self.s1,
        }
    }
}

pub fn run_stats(seq: &FlagSequence) -> Result<RunStats> {
    let flags = seq.flags();
    let Some(&first) = flags.first() else {
        return Err(Error::InsufficientData("empty flag sequence".into()));
    };
    let mut stats = RunStats { s0: 0, s1: 0, m: 1 };
    let mut current = first;
    let mut len = 0usize;
    for &f in flags {
        if f == current {
            len += 1;
        } else {
            stats.m += 1;
            current = f;
            len = 1;
        }
        let slot = if current {
            &mut stats.s1
        } else {
            &mut stats.s0
        };
        *slot = (*slot).max(len);
    }
    Ok(stats)
}

/// Flags ballots marking `candidate`.
pub fn candidate_flags(transcript: &Transcript, candidate: &str) -> Result<FlagSequence> {
    let idx = transcript.candidate_index(candidate)?;
    Ok(FlagSequence::new(
        candidate,
        transcript
            .ballots()
            .iter()
            .map(|b| b.contains(idx))
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub index: usize,
    pub label: String,
    pub votes: usize,
}

/// Candidates ordered by vote count, ties resolved by roster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    entries: Vec<RankedCandidate>,
}

/// The leading `k` candidates of a ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaders {
    pub indices: BTreeSet<usize>,
    pub labels: Vec<String>,
    /// Set when the candidate just inside the cut has the same count as the
    /// one just outside it, so the leader set depends on roster order.
    pub tie_at_cut: bool,
}

impl Ranking {
    /// Ranks a roster given its per-candidate vote counts.
    pub fn from_votes(candidates: &[String], votes: &[usize]) -> Result<Self> {
        if candidates.len() != votes.len() {
            return Err(Error::Roster(format!(
                "{} candidates but {} vote counts",
                candidates.len(),
                votes.len()
            )));
        }
        let mut entries: Vec<RankedCandidate> = candidates
            .iter()
            .zip(votes)
            .enumerate()
            .map(|(index, (label, &votes))| RankedCandidate {
                index,
                label: label.clone(),
                votes,
            })
            .collect();
        // stable sort keeps roster order among equal counts
        entries.sort_by_key(|e| std::cmp::Reverse(e.votes));
        Ok(Ranking { entries })
    }

    pub fn entries(&self) -> &[RankedCandidate] {
        &self.entries
    }

    pub fn leaders(&self, k: usize) -> Result<Leaders> {
        if k == 0 || k > self.entries.len() {
            return Err(Error::domain(format!(
                "top-k of {k} is outside 1..={}",
                self.entries.len()
            )));
        }
        let top = &self.entries[..k];
        let tie_at_cut = self
            .entries
            .get(k)
            .is_some_and(|next| next.votes == top[k - 1].votes);
        Ok(Leaders {
            indices: top.iter().map(|e| e.index).collect(),
            labels: top.iter().map(|e| e.label.clone()).collect(),
            tie_at_cut,
        })
    }
}

pub fn rank_candidates(transcript: &Transcript) -> Result<Ranking> {
    if transcript.n() == 0 {
        return Err(Error::InsufficientData(
            "transcript has no valid ballots".into(),
        ));
    }
    Ranking::from_votes(transcript.candidates(), &transcript.vote_counts())
}

/// A flag sequence derived from a group of leading candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFlags {
    pub flags: FlagSequence,
    pub leaders: Leaders,
}

/// Flags ballots that mark every one of the `top_k` precinct leaders.
pub fn consolidated_flags(transcript: &Transcript, top_k: usize) -> Result<GroupFlags> {
    let leaders = rank_candidates(transcript)?.leaders(top_k)?;
    let flags = transcript
        .ballots()
        .iter()
        .map(|b| leaders.indices.iter().all(|&i| b.contains(i)))
        .collect();
    let label = format!("all of top {top_k}: {}", leaders.labels.join(", "));
    Ok(GroupFlags {
        flags: FlagSequence::new(label, flags),
        leaders,
    })
}

/// Flags ballots whose marks all fall within the `top_k` most popular
/// candidates.
pub fn tuned_flags(transcript: &Transcript, top_k: usize) -> Result<GroupFlags> {
    let leaders = rank_candidates(transcript)?.leaders(top_k)?;
    let flags = transcript
        .ballots()
        .iter()
        .map(|b| !b.is_empty() && b.is_subset_of(&leaders.indices))
        .collect();
    let label = format!("only top {top_k}: {}", leaders.labels.join(", "));
    Ok(GroupFlags {
        flags: FlagSequence::new(label, flags),
        leaders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roster(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn validity_bounds() {
        assert!(!validity_filter(0, 5));
        assert!(validity_filter(5, 5));
        assert!(!validity_filter(6, 5));
        assert!(validity_filter(1, 1));
    }

    #[test]
    fn candidate_flags_follow_marks() {
        let t =
            Transcript::from_ballots("t", roster(&["A", "B"]), 5, [vec![0], vec![0, 1], vec![1]])
                .unwrap();
        let a = candidate_flags(&t, "A").unwrap();
        assert_eq!(a.flags(), &[true, true, false]);
        assert_eq!(a.r1(), 2);
        assert!(matches!(
            candidate_flags(&t, "Z"),
            Err(Error::UnknownCandidate(_))
        ));

        let t = Transcript::from_ballots("t", roster(&["A", "B"]), 5, [vec![1]]).unwrap();
        let a = candidate_flags(&t, "A").unwrap();
        assert_eq!(a.flags(), &[false]);
        assert_eq!(a.r1(), 0);
    }

    #[test]
    fn candidate_on_every_ballot_is_all_ones() {
        let t =
            Transcript::from_ballots("t", roster(&["A", "B"]), 5, [vec![0], vec![0, 1], vec![0]])
                .unwrap();
        let a = candidate_flags(&t, "A").unwrap();
        assert_eq!(a.r0(), 0);
        assert_eq!(run_stats(&a).unwrap(), RunStats { s0: 0, s1: 3, m: 1 });
    }

    #[test]
    fn invalid_ballots_are_counted_not_stored() {
        let t = Transcript::from_ballots(
            "t",
            roster(&["A", "B", "C"]),
            2,
            [vec![], vec![0], vec![0, 1, 2], vec![2]],
        )
        .unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.invalid_count(), 2);
    }

    #[test]
    fn out_of_roster_mark_is_rejected() {
        let mut t = Transcript::new("t", roster(&["A"]), 5).unwrap();
        assert!(matches!(t.push(Ballot::new([3])), Err(Error::Roster(_))));
        assert!(Transcript::new("t", roster(&["A", "A"]), 5).is_err());
    }

    #[test]
    fn run_stats_examples() {
        let s = FlagSequence::from_bits("x", "1101");
        assert_eq!(run_stats(&s).unwrap(), RunStats { s0: 1, s1: 2, m: 3 });
        let s = FlagSequence::from_bits("x", "1111111");
        assert_eq!(run_stats(&s).unwrap(), RunStats { s0: 0, s1: 7, m: 1 });
        let s = FlagSequence::from_bits("x", "0101");
        assert_eq!(run_stats(&s).unwrap(), RunStats { s0: 1, s1: 1, m: 4 });
        assert!(matches!(
            run_stats(&FlagSequence::new("x", vec![])),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn longest_span_picks_first_longest() {
        let s = FlagSequence::from_bits("x", "0110111011");
        assert_eq!(s.longest_run_span(FlagState::One), Some(4..7));
        assert_eq!(s.longest_run_span(FlagState::Zero), Some(0..1));
        assert_eq!(
            FlagSequence::from_bits("x", "11").longest_run_span(FlagState::Zero),
            None
        );
    }

    #[test]
    fn ranking_sorts_and_breaks_ties_by_roster() {
        let names = roster(&["A", "B", "C"]);
        let r = Ranking::from_votes(&names, &[3, 5, 1]).unwrap();
        let order: Vec<_> = r.entries().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(order, ["B", "A", "C"]);

        let names = roster(&["A", "B"]);
        let r = Ranking::from_votes(&names, &[2, 2]).unwrap();
        assert_eq!(r.entries()[0].label, "A");
        assert!(!r.leaders(2).unwrap().tie_at_cut);
        assert!(r.leaders(1).unwrap().tie_at_cut);
        assert!(r.leaders(3).is_err());
    }

    #[test]
    fn rank_empty_transcript_errors() {
        let t = Transcript::new("t", roster(&["A"]), 5).unwrap();
        assert!(matches!(
            rank_candidates(&t),
            Err(Error::InsufficientData(_))
        ));
    }

    fn six_leader_transcript() -> Transcript {
        // votes: A..E lead, F sixth, G last
        let names = roster(&["A", "B", "C", "D", "E", "F", "G"]);
        Transcript::from_ballots(
            "t",
            names,
            5,
            [
                vec![0, 1, 2, 3, 4],
                vec![0, 1, 2, 3, 6],
                vec![0, 1],
                vec![0, 1, 2, 3, 4],
                vec![2, 4, 5],
                vec![3, 4, 5],
                vec![0, 1, 2, 3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn consolidated_requires_every_leader() {
        let t = six_leader_transcript();
        let g = consolidated_flags(&t, 5).unwrap();
        assert_eq!(
            g.flags.flags(),
            &[true, false, false, true, false, false, false]
        );
        assert_eq!(g.leaders.labels, ["A", "B", "C", "D", "E"]);
        assert!(consolidated_flags(&t, 8).is_err());
    }

    #[test]
    fn tuned_requires_containment_in_leaders() {
        let t = six_leader_transcript();
        let g = tuned_flags(&t, 6).unwrap();
        assert_eq!(
            g.flags.flags(),
            &[true, false, true, true, true, true, true]
        );
    }

    #[test]
    fn consolidated_with_full_roster_needs_all_marks() {
        let names = roster(&["A", "B", "C"]);
        let t =
            Transcript::from_ballots("t", names, 5, [vec![0, 1, 2], vec![0, 1], vec![2]]).unwrap();
        let g = consolidated_flags(&t, 3).unwrap();
        assert_eq!(g.flags.flags(), &[true, false, false]);
    }
}
