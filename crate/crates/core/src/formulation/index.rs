//! Column layout of a stage block.
//!
//! ```text
//! [ C (9) | ΔC (9) | ΔC_reti | 21 operational series × N | 3 inventories × (N+1) | setpoints × K | slacks ]
//! ```

use std::ops::Range;

use crate::domain::{Facility, OpVar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableIndexMap {
    pub timesteps: usize,
    pub setpoint_count: usize,
    op_start: [usize; 24],
    setpoint_start: usize,
    slack_start: usize,
    slack_count: usize,
}

const CAPACITY: usize = 0;
const ADDED: usize = Facility::COUNT;
const RETIRED: usize = 2 * Facility::COUNT;
const OP_START: usize = 2 * Facility::COUNT + 1;

impl VariableIndexMap {
    pub fn new(timesteps: usize, setpoint_count: usize) -> Self {
        let mut op_start = [0usize; 24];
        let mut next = OP_START;
        for v in OpVar::ALL {
            op_start[v.index()] = next;
            next += if v.is_state() { timesteps + 1 } else { timesteps };
        }
        Self {
            timesteps,
            setpoint_count,
            op_start,
            setpoint_start: next,
            slack_start: next + setpoint_count,
            slack_count: 0,
        }
    }

    pub(crate) fn set_slack_count(&mut self, count: usize) {
        self.slack_count = count;
    }

    #[inline]
    pub fn capacity(&self, f: Facility) -> usize {
        CAPACITY + f.index()
    }

    #[inline]
    pub fn added(&self, f: Facility) -> usize {
        ADDED + f.index()
    }

    #[inline]
    pub fn retired(&self) -> usize {
        RETIRED
    }

    #[inline]
    pub fn op(&self, v: OpVar, t: usize) -> usize {
        debug_assert!(t < self.op_len(v));
        self.op_start[v.index()] + t
    }

    pub fn op_len(&self, v: OpVar) -> usize {
        if v.is_state() {
            self.timesteps + 1
        } else {
            self.timesteps
        }
    }

    pub fn op_range(&self, v: OpVar) -> Range<usize> {
        let s = self.op_start[v.index()];
        s..s + self.op_len(v)
    }

    #[inline]
    pub fn setpoint(&self, k: usize) -> usize {
        debug_assert!(k < self.setpoint_count);
        self.setpoint_start + k
    }

    pub fn setpoint_range(&self) -> Range<usize> {
        self.setpoint_start..self.slack_start
    }

    pub fn structural_dim(&self) -> usize {
        self.slack_start
    }

    pub fn slack_range(&self) -> Range<usize> {
        self.slack_start..self.slack_start + self.slack_count
    }

    pub fn dim(&self) -> usize {
        self.slack_start + self.slack_count
    }

    /// Every named symbol with its column range, in layout order.
    pub fn symbol_ranges(&self) -> Vec<(String, Range<usize>)> {
        let mut out = vec![
            ("capacity".to_string(), CAPACITY..ADDED),
            ("added".to_string(), ADDED..RETIRED),
            ("retired_cfpp".to_string(), RETIRED..OP_START),
        ];
        for v in OpVar::ALL {
            out.push((v.name().to_string(), self.op_range(v)));
        }
        out.push(("setpoints".to_string(), self.setpoint_range()));
        out.push(("slacks".to_string(), self.slack_range()));
        out
    }
}
