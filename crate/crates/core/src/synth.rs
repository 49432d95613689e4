//! Synthetic transcripts: an honest IID null, batch injection of identical
//! ballots, and partial mixing by chunk shuffling.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so a scenario and
//! a seed determine the transcript exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagseq::{validity_filter, Ballot, Transcript, DEFAULT_MAX_MARKS};

const MAX_DRAWS_PER_BALLOT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub label: String,
    /// Chance an honest voter marks this candidate.
    pub probability: f64,
}

/// Candidates marked together by one like-minded group of voters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slate {
    pub members: Vec<String>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSpec {
    /// Candidates marked on every stuffed ballot.
    pub pattern: Vec<String>,
    pub size: usize,
    /// Insertion index; drawn uniformly from `0..=n_honest` when absent.
    #[serde(default)]
    pub position: Option<usize>,
}

fn default_precinct() -> String {
    "synthetic".into()
}

fn default_max_marks() -> usize {
    DEFAULT_MAX_MARKS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FraudScenario {
    #[serde(default = "default_precinct")]
    pub precinct_id: String,
    pub candidates: Vec<CandidateSpec>,
    pub n_honest: usize,
    #[serde(default = "default_max_marks")]
    pub max_marks: usize,
    #[serde(default)]
    pub slate: Option<Slate>,
    #[serde(default)]
    pub batch: Option<BatchSpec>,
    /// Chunk length for partial mixing; 0 disables mixing.
    #[serde(default)]
    pub mixing_chunk: usize,
    #[serde(default)]
    pub seed: u64,
}

impl FraudScenario {
    pub fn roster(&self) -> Vec<String> {
        self.candidates.iter().map(|c| c.label.clone()).collect()
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.candidates
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| Error::Scenario(format!("unknown candidate `{label}`")))
    }

    fn slate_indices(&self) -> Result<Option<(Vec<usize>, f64)>> {
        self.slate
            .as_ref()
            .map(|s| {
                let idx = s
                    .members
                    .iter()
                    .map(|m| self.index_of(m))
                    .collect::<Result<Vec<_>>>()?;
                Ok((idx, s.probability))
            })
            .transpose()
    }

    pub fn validate(&self) -> Result<()> {
        if self.candidates.is_empty() {
            return Err(Error::Scenario("no candidates".into()));
        }
        if self.max_marks == 0 {
            return Err(Error::Scenario("max_marks must be positive".into()));
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if let Some(bad) = self.candidates.iter().find(|c| !prob_ok(c.probability)) {
            return Err(Error::Scenario(format!(
                "probability {} for `{}` outside [0, 1]",
                bad.probability, bad.label
            )));
        }
        if let Some((members, p)) = self.slate_indices()? {
            if !prob_ok(p) {
                return Err(Error::Scenario(format!(
                    "slate probability {p} outside [0, 1]"
                )));
            }
            if !validity_filter(members.len(), self.max_marks) {
                return Err(Error::Scenario("slate is not a valid ballot".into()));
            }
        }
        let slate_can_vote = self
            .slate
            .as_ref()
            .is_some_and(|s| s.probability > 0.0 && !s.members.is_empty());
        if !slate_can_vote && self.candidates.iter().all(|c| c.probability == 0.0) {
            return Err(Error::Scenario(
                "every probability is zero; no valid ballot can be drawn".into(),
            ));
        }
        if let Some(batch) = &self.batch {
            let pattern = batch
                .pattern
                .iter()
                .map(|m| self.index_of(m))
                .collect::<Result<Vec<_>>>()?;
            if !validity_filter(Ballot::new(pattern).len(), self.max_marks) {
                return Err(Error::Scenario(
                    "batch pattern is not a valid ballot".into(),
                ));
            }
            if batch.position.is_some_and(|p| p > self.n_honest) {
                return Err(Error::Scenario(
                    "batch position beyond the honest ballots".into(),
                ));
            }
        }
        Ok(())
    }

    /// Honest ballots, then the batch (if any), then mixing (if enabled).
    pub fn generate(&self, seed: u64) -> Result<Transcript> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut transcript = honest_transcript(self, &mut rng)?;
        if let Some(batch) = &self.batch {
            let pattern = Ballot::new(
                batch
                    .pattern
                    .iter()
                    .map(|m| self.index_of(m))
                    .collect::<Result<Vec<_>>>()?,
            );
            let position = match batch.position {
                Some(p) => p,
                None => rng.gen_range(0..=transcript.n()),
            };
            transcript = inject_batch(&transcript, &pattern, batch.size, position)?;
        }
        if self.mixing_chunk > 0 {
            transcript = mix_with(&transcript, self.mixing_chunk, &mut rng);
        }
        Ok(transcript)
    }
}

fn draw_ballot(
    scenario: &FraudScenario,
    slate: &Option<(Vec<usize>, f64)>,
    rng: &mut ChaCha8Rng,
) -> Result<Ballot> {
    for _ in 0..MAX_DRAWS_PER_BALLOT {
        let slate_marked = slate.as_ref().is_some_and(|(_, p)| rng.gen::<f64>() < *p);
        let marks: Vec<usize> = scenario
            .candidates
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let on_slate = slate_marked
                    && slate
                        .as_ref()
                        .is_some_and(|(members, _)| members.contains(&i));
                let independent = rng.gen::<f64>() < c.probability;
                (on_slate || independent).then_some(i)
            })
            .collect();
        if validity_filter(marks.len(), scenario.max_marks) {
            return Ok(Ballot::new(marks));
        }
    }
    Err(Error::Scenario(format!(
        "no valid ballot in {MAX_DRAWS_PER_BALLOT} draws"
    )))
}

fn honest_transcript(scenario: &FraudScenario, rng: &mut ChaCha8Rng) -> Result<Transcript> {
    scenario.validate()?;
    let slate = scenario.slate_indices()?;
    let mut t = Transcript::new(
        scenario.precinct_id.clone(),
        scenario.roster(),
        scenario.max_marks,
    )?;
    for _ in 0..scenario.n_honest {
        t.push(draw_ballot(scenario, &slate, rng)?)?;
    }
    Ok(t)
}

/// Honest IID transcript: each candidate marked independently (plus the
/// optional slate), redrawn until the ballot is valid. Ignores the
/// scenario's batch and mixing settings.
pub fn gen_iid_transcript(scenario: &FraudScenario, seed: u64) -> Result<Transcript> {
    honest_transcript(scenario, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Inserts `size` copies of `pattern` as one contiguous block before
/// ballot `position`.
pub fn inject_batch(
    transcript: &Transcript,
    pattern: &Ballot,
    size: usize,
    position: usize,
) -> Result<Transcript> {
    if position > transcript.n() {
        return Err(Error::Scenario(format!(
            "position {position} beyond {} ballots",
            transcript.n()
        )));
    }
    if !validity_filter(pattern.len(), transcript.max_marks()) {
        return Err(Error::Scenario(
            "batch pattern is not a valid ballot".into(),
        ));
    }
    if pattern.marks().any(|i| i >= transcript.c()) {
        return Err(Error::Scenario("batch pattern outside the roster".into()));
    }
    let mut ballots = transcript.ballots().to_vec();
    ballots.splice(
        position..position,
        std::iter::repeat_n(pattern.clone(), size),
    );
    Ok(transcript.with_ballots(ballots))
}

fn mix_with(transcript: &Transcript, chunk: usize, rng: &mut ChaCha8Rng) -> Transcript {
    if chunk == 0 || chunk >= transcript.n() {
        return transcript.clone();
    }
    let mut chunks: Vec<&[Ballot]> = transcript.ballots().chunks(chunk).collect();
    chunks.shuffle(rng);
    transcript.with_ballots(chunks.concat())
}

/// Cuts the ballots into consecutive chunks of `chunk` and shuffles the
/// chunk order. Order inside a chunk is kept. `chunk == 0` is a no-op.
pub fn partial_mix(transcript: &Transcript, chunk: usize, seed: u64) -> Transcript {
    mix_with(transcript, chunk, &mut ChaCha8Rng::seed_from_u64(seed))
}
