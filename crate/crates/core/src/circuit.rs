//! Single-output boolean circuits over witness bits.
//!
//! Gates are stored in topological order: every operand index is smaller than
//! the index of the gate that reads it. Inputs are numbered from 1, leftmost
//! witness bit first.

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::DEFAULT_ENUMERATION_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Witness bit `i`, 1-based.
    Input(usize),
    Const(bool),
    Not(GateId),
    And(GateId, GateId),
    Or(GateId, GateId),
    Xor(GateId, GateId),
}

impl Gate {
    fn operands(&self) -> impl Iterator<Item = GateId> {
        let (a, b) = match *self {
            Gate::Input(_) | Gate::Const(_) => (None, None),
            Gate::Not(a) => (Some(a), None),
            Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    input_count: usize,
    gates: Vec<Gate>,
    output: GateId,
}

/// Lane patterns for the low six assignment bits of a 64-wide word.
const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Circuit {
    pub fn new(input_count: usize, gates: Vec<Gate>, output: GateId) -> Result<Self> {
        for (idx, gate) in gates.iter().enumerate() {
            if let Gate::Input(i) = *gate {
                if i == 0 || i > input_count {
                    return Err(Error::construction(format!(
                        "gate {idx}: input {i} outside 1..={input_count}"
                    )));
                }
            }
            if let Some(bad) = gate.operands().find(|op| op.0 >= idx) {
                return Err(Error::construction(format!(
                    "gate {idx}: operand {} does not precede it",
                    bad.0
                )));
            }
        }
        if output.0 >= gates.len() {
            return Err(Error::construction(format!(
                "output {} is not a gate",
                output.0
            )));
        }
        Ok(Circuit {
            input_count,
            gates,
            output,
        })
    }

    /// The constant circuit over `input_count` free witness bits.
    pub fn constant(input_count: usize, value: bool) -> Self {
        Circuit {
            input_count,
            gates: vec![Gate::Const(value)],
            output: GateId(0),
        }
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn evaluate(&self, w: &BitString) -> Result<bool> {
        if w.len() != self.input_count {
            return Err(Error::InputArity {
                expected: self.input_count,
                got: w.len(),
            });
        }
        let bits = w.bits();
        let mut values: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(i) => bits[i - 1],
                Gate::Const(c) => c,
                Gate::Not(a) => !values[a.0],
                Gate::And(a, b) => values[a.0] && values[b.0],
                Gate::Or(a, b) => values[a.0] || values[b.0],
                Gate::Xor(a, b) => values[a.0] ^ values[b.0],
            };
            values.push(v);
        }
        Ok(values[self.output.0])
    }

    /// Evaluates 64 assignments at once. `inputs[i - 1]` holds witness bit `i` in every lane.
    fn evaluate_word(&self, inputs: &[u64], scratch: &mut Vec<u64>) -> u64 {
        scratch.clear();
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(i) => inputs[i - 1],
                Gate::Const(c) => {
                    if c {
                        u64::MAX
                    } else {
                        0
                    }
                }
                Gate::Not(a) => !scratch[a.0],
                Gate::And(a, b) => scratch[a.0] & scratch[b.0],
                Gate::Or(a, b) => scratch[a.0] | scratch[b.0],
                Gate::Xor(a, b) => scratch[a.0] ^ scratch[b.0],
            };
            scratch.push(v);
        }
        scratch[self.output.0]
    }

    /// Output mask of the 64 assignments `64 * word .. 64 * word + 63`.
    ///
    /// Assignment number `a` sets witness bit `k` to bit `n - k` of `a`, so
    /// ascending `a` is ascending lexicographic order on witness strings.
    fn accept_mask(&self, word: u64, inputs: &mut [u64], scratch: &mut Vec<u64>) -> u64 {
        let n = self.input_count;
        for (k, slot) in inputs.iter_mut().enumerate() {
            let shift = n - 1 - k;
            *slot = if shift < 6 {
                LANE_PATTERNS[shift]
            } else if (word >> (shift - 6)) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
        }
        let lanes = if n < 6 { (1u64 << (1 << n)) - 1 } else { u64::MAX };
        self.evaluate_word(inputs, scratch) & lanes
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.input_count > cap {
            return Err(Error::ResourceLimit {
                what: "witness bits",
                size: self.input_count as u64,
                cap: cap as u64,
            });
        }
        Ok(())
    }

    fn word_count(&self) -> u64 {
        if self.input_count <= 6 {
            1
        } else {
            1u64 << (self.input_count - 6)
        }
    }

    /// Number of accepting witness assignments, by exhaustive enumeration under the default cap.
    pub fn count_witnesses(&self) -> Result<u64> {
        self.count_witnesses_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn count_witnesses_with_cap(&self, cap: usize) -> Result<u64> {
        self.check_cap(cap)?;
        let n = self.input_count;
        Ok((0..self.word_count() as usize)
            .into_par_iter()
            .with_min_len(256)
            .map_init(
                || (vec![0u64; n], Vec::with_capacity(self.gates.len())),
                |(inputs, scratch), word| u64::from(self.accept_mask(word as u64, inputs, scratch).count_ones()),
            )
            .sum())
    }

    /// All accepting witness strings in increasing order.
    pub fn accepting_assignments(&self) -> Result<Vec<BitString>> {
        self.accepting_assignments_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn accepting_assignments_with_cap(&self, cap: usize) -> Result<Vec<BitString>> {
        self.check_cap(cap)?;
        let n = self.input_count;
        let mut inputs = vec![0u64; n];
        let mut scratch = Vec::with_capacity(self.gates.len());
        let mut out = Vec::new();
        for word in 0..self.word_count() {
            let mut mask = self.accept_mask(word, &mut inputs, &mut scratch);
            while mask != 0 {
                let lane = u64::from(mask.trailing_zeros());
                mask &= mask - 1;
                out.push(BitString::from_u64(word * 64 + lane, n));
            }
        }
        Ok(out)
    }
}

/// Incremental circuit construction. Gates are appended, so every operand
/// always precedes its user.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    input_count: usize,
    gates: Vec<Gate>,
    inputs: Vec<Option<GateId>>,
    consts: [Option<GateId>; 2],
}

impl CircuitBuilder {
    pub fn new(input_count: usize) -> Self {
        CircuitBuilder {
            input_count,
            gates: Vec::new(),
            inputs: vec![None; input_count],
            consts: [None; 2],
        }
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    fn push(&mut self, gate: Gate) -> GateId {
        debug_assert!(gate.operands().all(|op| op.0 < self.gates.len()));
        self.gates.push(gate);
        GateId(self.gates.len() - 1)
    }

    /// Witness bit `i` (1-based).
    pub fn input(&mut self, i: usize) -> Result<GateId> {
        if i == 0 || i > self.input_count {
            return Err(Error::construction(format!(
                "input {i} outside 1..={}",
                self.input_count
            )));
        }
        if let Some(id) = self.inputs[i - 1] {
            return Ok(id);
        }
        let id = self.push(Gate::Input(i));
        self.inputs[i - 1] = Some(id);
        Ok(id)
    }

    pub fn constant(&mut self, value: bool) -> GateId {
        if let Some(id) = self.consts[value as usize] {
            return id;
        }
        let id = self.push(Gate::Const(value));
        self.consts[value as usize] = Some(id);
        id
    }

    pub fn not(&mut self, a: GateId) -> GateId {
        self.push(Gate::Not(a))
    }

    pub fn and(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Or(a, b))
    }

    pub fn xor(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Xor(a, b))
    }

    /// Conjunction of `terms`; the empty conjunction is constant true.
    pub fn and_all(&mut self, terms: &[GateId]) -> GateId {
        match terms.split_first() {
            None => self.constant(true),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.and(acc, t)),
        }
    }

    /// Disjunction of `terms`; the empty disjunction is constant false.
    pub fn or_all(&mut self, terms: &[GateId]) -> GateId {
        match terms.split_first() {
            None => self.constant(false),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.or(acc, t)),
        }
    }

    /// `a` if `value` is 1, `NOT a` otherwise.
    pub fn equals_bit(&mut self, a: GateId, value: bool) -> GateId {
        if value {
            a
        } else {
            self.not(a)
        }
    }

    /// Strict lexicographic comparison `a < b`, most significant bit first.
    pub fn less_than(&mut self, a: &[GateId], b: &[GateId]) -> Result<GateId> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::construction(format!(
                "less_than needs equal nonzero widths, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        // Fold from the least significant end:
        // lt_i = (!a_i & b_i) | (!(a_i ^ b_i) & lt_{i+1}).
        let mut lt: Option<GateId> = None;
        for (&ai, &bi) in a.iter().zip(b).rev() {
            let na = self.not(ai);
            let here = self.and(na, bi);
            lt = Some(match lt {
                None => here,
                Some(rest) => {
                    let diff = self.xor(ai, bi);
                    let same = self.not(diff);
                    let tail = self.and(same, rest);
                    self.or(here, tail)
                }
            });
        }
        Ok(lt.expect("nonempty width"))
    }

    /// Copies `circuit` into this builder, wiring its input `i` to `inputs[i - 1]`.
    /// Returns the copy's output gate.
    pub fn embed(&mut self, circuit: &Circuit, inputs: &[GateId]) -> Result<GateId> {
        if inputs.len() != circuit.input_count {
            return Err(Error::construction(format!(
                "embedding a {}-input circuit with {} wires",
                circuit.input_count,
                inputs.len()
            )));
        }
        let mut map = Vec::with_capacity(circuit.gates.len());
        for gate in &circuit.gates {
            let id = match *gate {
                Gate::Input(i) => inputs[i - 1],
                Gate::Const(c) => self.constant(c),
                Gate::Not(a) => self.not(map[a.0]),
                Gate::And(a, b) => self.and(map[a.0], map[b.0]),
                Gate::Or(a, b) => self.or(map[a.0], map[b.0]),
                Gate::Xor(a, b) => self.xor(map[a.0], map[b.0]),
            };
            map.push(id);
        }
        Ok(map[circuit.output.0])
    }

    /// Panics if `output` was not produced by this builder.
    pub fn finish(self, output: GateId) -> Circuit {
        Circuit::new(self.input_count, self.gates, output).expect("builder preserves invariants")
    }
}

/// Fragment over `input_count` inputs that is 1 iff the bits at `a_inputs` are
/// strictly below the bits at `b_inputs` (leftmost index most significant).
pub fn build_less_than(input_count: usize, a_inputs: &[usize], b_inputs: &[usize]) -> Result<Circuit> {
    let mut builder = CircuitBuilder::new(input_count);
    let a = a_inputs
        .iter()
        .map(|&i| builder.input(i))
        .collect::<Result<Vec<_>>>()?;
    let b = b_inputs
        .iter()
        .map(|&i| builder.input(i))
        .collect::<Result<Vec<_>>>()?;
    let out = builder.less_than(&a, &b)?;
    Ok(builder.finish(out))
}

/// Fragment that is 1 iff witness bit `input_index` equals `value`.
pub fn build_bit_equals(input_count: usize, input_index: usize, value: bool) -> Result<Circuit> {
    let mut builder = CircuitBuilder::new(input_count);
    let bit = builder.input(input_index)?;
    let out = builder.equals_bit(bit, value);
    Ok(builder.finish(out))
}

/// AND of all fragments over a shared input space; `conjoin(n, [])` is constant true.
pub fn conjoin(input_count: usize, fragments: &[Circuit]) -> Result<Circuit> {
    let mut builder = CircuitBuilder::new(input_count);
    let wires = (1..=input_count)
        .map(|i| builder.input(i))
        .collect::<Result<Vec<_>>>()?;
    let mut outs = Vec::with_capacity(fragments.len());
    for (idx, fragment) in fragments.iter().enumerate() {
        if fragment.input_count != input_count {
            return Err(Error::construction(format!(
                "fragment {idx} has {} inputs, expected {input_count}",
                fragment.input_count
            )));
        }
        outs.push(builder.embed(fragment, &wires)?);
    }
    let out = builder.and_all(&outs);
    Ok(builder.finish(out))
}
