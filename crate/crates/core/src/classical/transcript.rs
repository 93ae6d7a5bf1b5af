use super::Granularity;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One query round: the positions asked and the answers, in the same order.
/// Bit answers are 0/1; block answers are the block's little-endian value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub round: usize,
    pub indices: Vec<usize>,
    pub answers: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub granularity: Granularity,
    pub parallelism: usize,
    pub rounds: Vec<Round>,
    pub answer: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct FinalLine {
    answer: bool,
}

impl Transcript {
    pub fn new(granularity: Granularity, parallelism: usize) -> Self {
        Transcript { granularity, parallelism, rounds: Vec::new(), answer: None }
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn query_count(&self) -> usize {
        self.rounds.iter().map(|r| r.indices.len()).sum()
    }

    /// Position → answer over all rounds; later answers win (they agree on
    /// any consistent oracle).
    pub fn known(&self) -> BTreeMap<usize, u64> {
        self.rounds.iter().flat_map(|r| r.indices.iter().copied().zip(r.answers.iter().copied())).collect()
    }

    pub fn lookup(&self, index: usize) -> Option<u64> {
        self.rounds
            .iter()
            .rev()
            .find_map(|r| r.indices.iter().position(|&i| i == index).map(|k| r.answers[k]))
    }

    /// One JSON object per round, then `{"answer":…}` if the run finished.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            out.push_str(&serde_json::to_string(r).expect("rounds serialize"));
            out.push('\n');
        }
        if let Some(a) = self.answer {
            out.push_str(&serde_json::to_string(&FinalLine { answer: a }).expect("answer serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str, granularity: Granularity, parallelism: usize) -> serde_json::Result<Self> {
        let mut t = Transcript::new(granularity, parallelism);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            if let Ok(r) = serde_json::from_str::<Round>(line) {
                t.rounds.push(r);
            } else {
                t.answer = Some(serde_json::from_str::<FinalLine>(line)?.answer);
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_round_trip() {
        let mut t = Transcript::new(Granularity::Block, 2);
        t.rounds.push(Round { round: 0, indices: vec![0, 3], answers: vec![2, 1] });
        t.rounds.push(Round { round: 1, indices: vec![2], answers: vec![0] });
        t.answer = Some(true);
        let text = t.to_json_lines();
        assert_eq!(text.lines().next().unwrap(), r#"{"round":0,"indices":[0,3],"answers":[2,1]}"#);
        assert_eq!(text.lines().last().unwrap(), r#"{"answer":true}"#);
        assert_eq!(Transcript::from_json_lines(&text, Granularity::Block, 2).unwrap(), t);
        assert_eq!((t.round_count(), t.query_count()), (2, 3));
        assert_eq!(t.lookup(3), Some(1));
        assert_eq!(t.lookup(1), None);
    }
}
