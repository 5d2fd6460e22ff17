use crate::rng::RngStream;
use crate::state::TransitionRecord;

#[derive(Debug)]
struct Slot {
    seq: u64,
    episode: u64,
    rec: TransitionRecord,
}

/// Uniform-sampling ring buffer of transitions that hands out contiguous
/// same-episode windows. Records carry a monotone sequence number, so a
/// candidate window is valid exactly when its sequence numbers are
/// consecutive and its episode ids equal; that single check rejects windows
/// that span an episode boundary, the overwrite seam of the ring, or both.
/// Terminal records close their episode, so a valid window can only contain
/// one at its final position.
#[derive(Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    slots: Vec<Slot>,
    cursor: usize,
    next_seq: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1);
        ReplayBuffer { capacity, slots: Vec::new(), cursor: 0, next_seq: 0 }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn push(&mut self, episode: u64, rec: TransitionRecord) {
        if let Some(prev) = self.newest() {
            debug_assert!(
                !(prev.rec.terminal && prev.episode == episode),
                "episode {episode} continued past its terminal record"
            );
        }
        let slot = Slot { seq: self.next_seq, episode, rec };
        self.next_seq += 1;
        if self.slots.len() < self.capacity {
            self.slots.push(slot);
        } else {
            self.slots[self.cursor] = slot;
            self.cursor = (self.cursor + 1) % self.capacity;
        }
    }

    fn newest(&self) -> Option<&Slot> {
        if self.slots.is_empty() {
            None
        } else if self.slots.len() < self.capacity {
            self.slots.last()
        } else {
            let idx = (self.cursor + self.capacity - 1) % self.capacity;
            Some(&self.slots[idx])
        }
    }

    fn window_at(&self, start: usize, len: usize) -> Option<Vec<&TransitionRecord>> {
        let n = self.slots.len();
        let first = &self.slots[start];
        let mut out = Vec::with_capacity(len);
        for j in 0..len {
            let slot = &self.slots[(start + j) % n];
            if slot.seq != first.seq + j as u64 || slot.episode != first.episode {
                return None;
            }
            out.push(&slot.rec);
        }
        Some(out)
    }

    /// A uniformly random valid window of exactly `len` records, or `None`
    /// when no such window exists yet. Rejection-samples physical start
    /// positions (each valid window has exactly one), falling back to a
    /// full scan so short buffers cannot stall.
    pub fn sample_window(&self, len: usize, rng: &mut RngStream) -> Option<Vec<&TransitionRecord>> {
        assert!(len >= 1);
        let n = self.slots.len();
        if n < len {
            return None;
        }
        for _ in 0..64 {
            let start = rng.below(n);
            if let Some(w) = self.window_at(start, len) {
                return Some(w);
            }
        }
        let starts: Vec<usize> =
            (0..n).filter(|&s| self.window_at(s, len).is_some()).collect();
        if starts.is_empty() {
            return None;
        }
        self.window_at(starts[rng.below(starts.len())], len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Action, AgentStateVector};

    fn rec(tag: f64, terminal: bool) -> TransitionRecord {
        TransitionRecord {
            x: AgentStateVector(vec![tag]),
            action: Action(0),
            reward: tag,
            x_next: AgentStateVector(vec![tag + 0.5]),
            action_next: Action(0),
            terminal,
            hidden: None,
        }
    }

    /// Episodes of length 3 tagged by reward; the last record of each
    /// episode is terminal.
    fn fill(buffer: &mut ReplayBuffer, episodes: u64) {
        for e in 0..episodes {
            for t in 0..3 {
                buffer.push(e, rec((e * 10 + t) as f64, t == 2));
            }
        }
    }

    #[test]
    fn no_window_ever_spans_an_episode_boundary() {
        let mut buffer = ReplayBuffer::new(12);
        fill(&mut buffer, 4);
        // Exhaustive over every physical start and window length.
        for len in 1..=4 {
            for start in 0..buffer.len() {
                if let Some(w) = buffer.window_at(start, len) {
                    let episode = (w[0].reward / 10.0).floor();
                    for r in &w {
                        assert_eq!((r.reward / 10.0).floor(), episode);
                    }
                    for r in &w[..len - 1] {
                        assert!(!r.terminal, "terminal mid-window");
                    }
                }
            }
        }
        // No length-4 window exists: episodes are only 3 long.
        let mut rng = RngStream::from_seed(51);
        assert!(buffer.sample_window(4, &mut rng).is_none());
    }

    #[test]
    fn sampled_windows_are_contiguous_and_same_episode() {
        let mut buffer = ReplayBuffer::new(64);
        fill(&mut buffer, 12);
        let mut rng = RngStream::from_seed(52);
        for _ in 0..500 {
            let w = buffer.sample_window(2, &mut rng).unwrap();
            assert_eq!(w[1].reward - w[0].reward, 1.0, "records not consecutive");
            assert!(!w[0].terminal);
        }
    }

    #[test]
    fn overwrite_seam_is_never_crossed() {
        let mut buffer = ReplayBuffer::new(7);
        // One long episode so the only invalid windows are seam-crossers.
        for t in 0..10 {
            buffer.push(0, rec(t as f64, false));
        }
        assert_eq!(buffer.len(), 7);
        let mut rng = RngStream::from_seed(53);
        for _ in 0..300 {
            let w = buffer.sample_window(3, &mut rng).unwrap();
            assert_eq!(w[1].reward - w[0].reward, 1.0);
            assert_eq!(w[2].reward - w[1].reward, 1.0);
        }
    }

    #[test]
    fn all_single_records_are_reachable() {
        let mut buffer = ReplayBuffer::new(9);
        fill(&mut buffer, 3);
        let mut rng = RngStream::from_seed(54);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..2000 {
            let w = buffer.sample_window(1, &mut rng).unwrap();
            seen.insert(w[0].reward as i64);
        }
        assert_eq!(seen.len(), 9);
    }
}
