use rand::Rng;

use crate::sim::{Action, STATE_DIM};

/// One stored step `(s, a, r, s′, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: [f64; STATE_DIM],
    pub action: Action,
    pub reward: f64,
    pub next_state: [f64; STATE_DIM],
    /// Set only when the step reached the goal; horizon cut-offs bootstrap.
    pub terminal: bool,
}

/// Fixed-capacity ring; once full, each insertion overwrites the oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    slots: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            slots: Vec::with_capacity(capacity.min(1 << 16)),
            capacity,
            cursor: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Index the next insertion will write to.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn push(&mut self, t: Transition) {
        if self.slots.len() < self.capacity {
            self.slots.push(t);
        } else {
            self.slots[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// Stored transitions from oldest to newest.
    pub fn iter_oldest_first(&self) -> impl Iterator<Item = &Transition> + '_ {
        let split = if self.slots.len() < self.capacity { 0 } else { self.cursor };
        self.slots[split..].iter().chain(self.slots[..split].iter())
    }

    /// Uniform sample with replacement.
    pub fn sample<'a, R: Rng + ?Sized>(&'a self, n: usize, rng: &mut R) -> Vec<&'a Transition> {
        if self.slots.is_empty() {
            return Vec::new();
        }
        (0..n).map(|_| &self.slots[rng.random_range(0..self.slots.len())]).collect()
    }
}
