//! Few-style witness machines.
//!
//! A machine is a verifier-circuit generator: on input `x` it yields a
//! circuit over exactly `p(|x|)` witness bits, and a computation path of the
//! machine is a witness string accepted by that circuit. The number of
//! accepting paths is `f(x)`. A [`FewLanguage`] adds the census bound `q` and
//! the decision predicate `R`, so `x` is a member iff `R(x, f(x))`.

use std::fmt;
use std::sync::Arc;

use crate::bits::BitString;
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::error::{Error, Result};

/// A polynomial with non-negative integer coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyBound {
    coefficients: Vec<u64>,
}

impl PolyBound {
    pub fn new(coefficients: Vec<u64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::construction("polynomial needs at least one coefficient"));
        }
        Ok(PolyBound { coefficients })
    }

    pub fn constant(c: u64) -> Self {
        PolyBound {
            coefficients: vec![c],
        }
    }

    /// `p(n) = n`.
    pub fn identity() -> Self {
        PolyBound {
            coefficients: vec![0, 1],
        }
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// Horner evaluation, saturating at `u64::MAX`.
    pub fn eval(&self, n: u64) -> u64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc.saturating_mul(n).saturating_add(c))
    }
}

impl fmt::Display for PolyBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (deg, &c) in self.coefficients.iter().enumerate() {
            match (deg, c) {
                (_, 0) => {}
                (0, c) => terms.push(c.to_string()),
                (1, 1) => terms.push("n".to_string()),
                (1, c) => terms.push(format!("{c}n")),
                (d, 1) => terms.push(format!("n^{d}")),
                (d, c) => terms.push(format!("{c}n^{d}")),
            }
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

type DecisionFn = dyn Fn(&BitString, u64) -> bool + Send + Sync;

/// The predicate `R(x, count)`.
#[derive(Clone)]
pub struct Decision {
    name: String,
    predicate: Arc<DecisionFn>,
}

impl Decision {
    pub fn new(name: impl Into<String>, predicate: impl Fn(&BitString, u64) -> bool + Send + Sync + 'static) -> Self {
        Decision {
            name: name.into(),
            predicate: Arc::new(predicate),
        }
    }

    /// `R(x, f) = [f = 0]`.
    pub fn is_zero() -> Self {
        Decision::new("is-zero", |_, f| f == 0)
    }

    /// `R(x, f) = [f > 0]`; with it a Few machine decides a FewP (or UP) language.
    pub fn nonzero() -> Self {
        Decision::new("nonzero", |_, f| f > 0)
    }

    /// `R(x, f) = [f is odd]`.
    pub fn parity() -> Self {
        Decision::new("parity", |_, f| f % 2 == 1)
    }

    pub fn even() -> Self {
        Decision::new("even", |_, f| f % 2 == 0)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "is-zero" => Some(Self::is_zero()),
            "nonzero" => Some(Self::nonzero()),
            "parity" => Some(Self::parity()),
            "even" => Some(Self::even()),
            _ => None,
        }
    }

    pub const NAMES: [&'static str; 4] = ["is-zero", "nonzero", "parity", "even"];

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decide(&self, x: &BitString, count: u64) -> bool {
        (self.predicate)(x, count)
    }
}

impl fmt::Debug for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Decision").field(&self.name).finish()
    }
}

type VerifierFn = dyn Fn(&BitString) -> Circuit + Send + Sync;

/// Outcome of checking the census promise `f(x) <= q(|x|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromiseCheck {
    Ok,
    Violated { f: u64, bound: u64 },
}

#[derive(Clone)]
pub struct FewLanguage {
    name: String,
    p: PolyBound,
    q: PolyBound,
    verifier: Arc<VerifierFn>,
    decision: Decision,
}

impl fmt::Debug for FewLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FewLanguage")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("q", &self.q)
            .field("decision", &self.decision)
            .finish()
    }
}

impl FewLanguage {
    /// Builds a language and checks the verifier's arity on every input of length at most 2.
    ///
    /// `p` must be at least 1 on all nonempty inputs.
    pub fn new(
        name: impl Into<String>,
        p: PolyBound,
        q: PolyBound,
        verifier: impl Fn(&BitString) -> Circuit + Send + Sync + 'static,
        decision: Decision,
    ) -> Result<Self> {
        let lang = FewLanguage {
            name: name.into(),
            p,
            q,
            verifier: Arc::new(verifier),
            decision,
        };
        if lang.p.eval(1) == 0 {
            return Err(Error::construction(format!(
                "path length {} is zero on nonempty inputs",
                lang.p
            )));
        }
        for len in 0..=2 {
            for v in 0..(1u64 << len) {
                lang.verifier(&BitString::from_u64(v, len))?;
            }
        }
        Ok(lang)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> &PolyBound {
        &self.p
    }

    pub fn q(&self) -> &PolyBound {
        &self.q
    }

    pub fn decision(&self) -> &Decision {
        &self.decision
    }

    pub fn with_decision(mut self, decision: Decision) -> Self {
        self.decision = decision;
        self
    }

    /// Replaces the census bound. The promise is not re-checked.
    pub fn with_census_bound(mut self, q: PolyBound) -> Self {
        self.q = q;
        self
    }

    pub fn path_length(&self, x: &BitString) -> u64 {
        self.p.eval(x.len() as u64)
    }

    pub fn census_bound(&self, x: &BitString) -> u64 {
        self.q.eval(x.len() as u64)
    }

    pub fn decide(&self, x: &BitString, count: u64) -> bool {
        self.decision.decide(x, count)
    }

    /// The verifier circuit for `x`, checked to have `p(|x|)` witness bits.
    pub fn verifier(&self, x: &BitString) -> Result<Circuit> {
        let c = (self.verifier)(x);
        let expected = self.path_length(x);
        if c.input_count() as u64 != expected {
            return Err(Error::construction(format!(
                "machine {} on x={x}: verifier has {} witness bits, p(|x|) = {expected}",
                self.name,
                c.input_count()
            )));
        }
        Ok(c)
    }

    /// `f(x)` by enumerating all `2^p(|x|)` paths.
    pub fn brute_force_f(&self, x: &BitString, cap: usize) -> Result<u64> {
        self.verifier(x)?.count_witnesses_with_cap(cap)
    }

    /// All accepting paths of the machine on `x`, in increasing order.
    pub fn brute_force_paths(&self, x: &BitString, cap: usize) -> Result<Vec<BitString>> {
        self.verifier(x)?.accepting_assignments_with_cap(cap)
    }

    pub fn verify_promise(&self, x: &BitString, cap: usize) -> Result<PromiseCheck> {
        let f = self.brute_force_f(x, cap)?;
        let bound = self.census_bound(x);
        Ok(if f <= bound {
            PromiseCheck::Ok
        } else {
            PromiseCheck::Violated { f, bound }
        })
    }
}

/// Example machines with known census behavior.
pub mod library {
    use super::*;

    /// Never accepts. `p ≡ path_len`, `q ≡ 1`, `R = is-zero`.
    pub fn const0(path_len: u64) -> Result<FewLanguage> {
        let w = usize::try_from(path_len).map_err(|_| Error::construction("path length too large"))?;
        FewLanguage::new(
            "const0",
            PolyBound::constant(path_len),
            PolyBound::constant(1),
            move |_| Circuit::constant(w, false),
            Decision::is_zero(),
        )
    }

    /// Accepts exactly the path `pattern`: a UP machine (`q ≡ 1`, `R = nonzero`).
    pub fn exact1(pattern: BitString) -> Result<FewLanguage> {
        let width = pattern.len();
        FewLanguage::new(
            format!("exact1({pattern})"),
            PolyBound::constant(width as u64),
            PolyBound::constant(1),
            move |_| {
                let mut b = CircuitBuilder::new(width);
                let terms: Vec<GateId> = pattern
                    .bits()
                    .iter()
                    .enumerate()
                    .map(|(i, &bit)| {
                        let w = b.input(i + 1).expect("in range");
                        b.equals_bit(w, bit)
                    })
                    .collect();
                let out = b.and_all(&terms);
                b.finish(out)
            },
            Decision::nonzero(),
        )
    }

    /// Two-bit paths accepted iff the bits differ, so `f ≡ 2`. `q ≡ 2`, `R = parity`.
    pub fn xor2() -> FewLanguage {
        FewLanguage::new(
            "xor2",
            PolyBound::constant(2),
            PolyBound::constant(2),
            |_| {
                let mut b = CircuitBuilder::new(2);
                let (w1, w2) = (b.input(1).expect("in range"), b.input(2).expect("in range"));
                let out = b.xor(w1, w2);
                b.finish(out)
            },
            Decision::parity(),
        )
        .expect("xor2 is well-formed")
    }

    /// `n`-bit paths with exactly one 1, so `f(x) = |x|`. `p(n) = q(n) = n`, `R = nonzero`.
    pub fn onehot() -> FewLanguage {
        FewLanguage::new(
            "onehot",
            PolyBound::identity(),
            PolyBound::identity(),
            |x| exactly_one(x.len()),
            Decision::nonzero(),
        )
        .expect("onehot is well-formed")
    }

    pub(crate) fn exactly_one(n: usize) -> Circuit {
        let mut b = CircuitBuilder::new(n);
        let mut seen = b.constant(false);
        let mut dup = b.constant(false);
        for i in 1..=n {
            let w = b.input(i).expect("in range");
            let both = b.and(seen, w);
            dup = b.or(dup, both);
            seen = b.or(seen, w);
        }
        let nd = b.not(dup);
        let out = b.and(seen, nd);
        b.finish(out)
    }

    /// Subset sum over the digits of `x`: position `i` (1-based) is an item of
    /// weight `i` when `x_i = 1`. A path selects items and is accepted iff it
    /// selects only available items whose weights sum to the target, which is
    /// `target` if given and `|x|` otherwise. `p(n) = n`, `q ≡ 2`, `R = nonzero`.
    pub fn subset_sum(target: Option<u64>) -> FewLanguage {
        let name = match target {
            Some(t) => format!("subsetsum({t})"),
            None => "subsetsum".to_string(),
        };
        FewLanguage::new(
            name,
            PolyBound::identity(),
            PolyBound::constant(2),
            move |x| subset_sum_circuit(x, target.unwrap_or(x.len() as u64)),
            Decision::nonzero(),
        )
        .expect("subsetsum is well-formed")
    }

    fn subset_sum_circuit(x: &BitString, target: u64) -> Circuit {
        let n = x.len();
        let max_sum = (n as u64) * (n as u64 + 1) / 2;
        let width = (64 - max_sum.leading_zeros()).max(1) as usize;
        let mut b = CircuitBuilder::new(n);
        let mut constraints = Vec::new();
        // little-endian running sum; None is a constant 0 bit
        let mut sum: Vec<Option<GateId>> = vec![None; width];
        for (i, &available) in x.bits().iter().enumerate() {
            let w = b.input(i + 1).expect("in range");
            if !available {
                constraints.push(b.not(w));
                continue;
            }
            let weight = i as u64 + 1;
            let addend: Vec<Option<GateId>> = (0..width)
                .map(|t| ((weight >> t) & 1 == 1).then_some(w))
                .collect();
            sum = ripple_add(&mut b, &sum, &addend);
        }
        if target > max_sum {
            constraints.push(b.constant(false));
        } else {
            for (t, bit) in sum.iter().enumerate() {
                let want = (target >> t) & 1 == 1;
                let term = match (bit, want) {
                    (None, false) => continue,
                    (None, true) => b.constant(false),
                    (Some(g), _) => b.equals_bit(*g, want),
                };
                constraints.push(term);
            }
        }
        let out = b.and_all(&constraints);
        b.finish(out)
    }

    fn ripple_add(b: &mut CircuitBuilder, x: &[Option<GateId>], y: &[Option<GateId>]) -> Vec<Option<GateId>> {
        let mut carry: Option<GateId> = None;
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let present: Vec<GateId> = [xi, yi, carry].into_iter().flatten().collect();
                let (s, c) = match present.as_slice() {
                    [] => (None, None),
                    [a] => (Some(*a), None),
                    [a, c] => (Some(b.xor(*a, *c)), Some(b.and(*a, *c))),
                    [a, c, d] => {
                        let ac = b.xor(*a, *c);
                        let s = b.xor(ac, *d);
                        let both = b.and(*a, *c);
                        let prop = b.and(ac, *d);
                        (Some(s), Some(b.or(both, prop)))
                    }
                    _ => unreachable!(),
                };
                carry = c;
                s
            })
            .collect()
    }

    /// Machine names accepted by [`by_name`].
    pub const NAMES: [&str; 5] = ["const0", "exact1", "xor2", "onehot", "subsetsum"];

    /// Looks up a library machine by name with integer parameters:
    ///
    /// * `const0 [PATH_LEN=2]`
    /// * `exact1 [WIDTH=2] [VALUE=2]` pins the path to `VALUE` written in `WIDTH` bits
    /// * `xor2`, `onehot`
    /// * `subsetsum [TARGET]`
    pub fn by_name(name: &str, params: &[u64]) -> Result<FewLanguage> {
        let too_many = |max: usize| {
            if params.len() > max {
                Err(Error::construction(format!(
                    "{name} takes at most {max} parameters, got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        match name {
            "const0" => {
                too_many(1)?;
                const0(params.first().copied().unwrap_or(2))
            }
            "exact1" => {
                too_many(2)?;
                let width = params.first().copied().unwrap_or(2);
                let value = params.get(1).copied().unwrap_or(2);
                if width == 0 || width > 63 || value >> width != 0 {
                    return Err(Error::construction(format!(
                        "exact1: value {value} does not fit {width} bits"
                    )));
                }
                exact1(BitString::from_u64(value, width as usize))
            }
            "xor2" => {
                too_many(0)?;
                Ok(xor2())
            }
            "onehot" => {
                too_many(0)?;
                Ok(onehot())
            }
            "subsetsum" => {
                too_many(1)?;
                Ok(subset_sum(params.first().copied()))
            }
            _ => Err(Error::construction(format!("unknown machine {name:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;
    use crate::DEFAULT_ENUMERATION_CAP as CAP;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn shown(paths: &[BitString]) -> Vec<String> {
        paths.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn poly_eval() {
        let p = PolyBound::new(vec![1, 0, 2]).unwrap();
        assert_eq!(p.eval(0), 1);
        assert_eq!(p.eval(3), 19);
        assert_eq!(p.to_string(), "1 + 2n^2");
        assert!(PolyBound::new(vec![]).is_err());
        assert_eq!(PolyBound::new(vec![0, 0, 0, 9]).unwrap().eval(u64::MAX), u64::MAX);
    }

    #[test]
    fn brute_force_f_examples() {
        for x in ["0", "0110", "111"] {
            assert_eq!(xor2().brute_force_f(&bits(x), CAP), Ok(2));
            assert_eq!(const0(2).unwrap().brute_force_f(&bits(x), CAP), Ok(0));
        }
        assert_eq!(onehot().brute_force_f(&bits("010"), CAP), Ok(3));
    }

    #[test]
    fn brute_force_paths_examples() {
        assert_eq!(shown(&xor2().brute_force_paths(&bits("1"), CAP).unwrap()), ["01", "10"]);
        let pinned = exact1(bits("10")).unwrap();
        assert_eq!(shown(&pinned.brute_force_paths(&bits("0"), CAP).unwrap()), ["10"]);
        assert!(const0(3).unwrap().brute_force_paths(&bits("1"), CAP).unwrap().is_empty());
    }

    #[test]
    fn verify_promise_examples() {
        let x = bits("01");
        assert_eq!(xor2().verify_promise(&x, CAP), Ok(PromiseCheck::Ok));
        assert_eq!(
            xor2().with_census_bound(PolyBound::constant(1)).verify_promise(&x, CAP),
            Ok(PromiseCheck::Violated { f: 2, bound: 1 })
        );
        let c0 = const0(2).unwrap().with_census_bound(PolyBound::constant(0));
        assert_eq!(c0.verify_promise(&x, CAP), Ok(PromiseCheck::Ok));
    }

    #[test]
    fn subset_sum_counts() {
        let m = subset_sum(None);
        // target 5 over items {1..5}: {5}, {1,4}, {2,3}
        assert_eq!(m.brute_force_f(&bits("11111"), CAP), Ok(3));
        assert_eq!(shown(&m.brute_force_paths(&bits("10001"), CAP).unwrap()), ["00001"]);
        assert_eq!(m.brute_force_f(&bits("10000"), CAP), Ok(0));
        // target 8 over {1..8} available at 1,3,4,5,8: {8}, {3,5}, {1,3,4}
        assert_eq!(m.brute_force_f(&bits("10111001"), CAP), Ok(3));
        let fixed = subset_sum(Some(3));
        // {3}, {1,2}
        assert_eq!(fixed.brute_force_f(&bits("1110"), CAP), Ok(2));
        assert_eq!(fixed.brute_force_f(&bits("1"), CAP), Ok(0));
    }

    #[test]
    fn library_paths_are_sorted_and_counted() {
        let machines = [
            const0(2).unwrap(),
            exact1(bits("101")).unwrap(),
            xor2(),
            onehot(),
            subset_sum(None),
        ];
        for m in &machines {
            for len in 1..=6u32 {
                for v in 0..(1u64 << len) {
                    let x = BitString::from_u64(v, len as usize);
                    let paths = m.brute_force_paths(&x, CAP).unwrap();
                    assert_eq!(paths.len() as u64, m.brute_force_f(&x, CAP).unwrap());
                    assert!(paths.windows(2).all(|w| w[0] < w[1]));
                    assert!(paths.iter().all(|p| p.len() as u64 == m.path_length(&x)));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_verifiers() {
        let wrong = FewLanguage::new(
            "wrong",
            PolyBound::constant(3),
            PolyBound::constant(1),
            |_| Circuit::constant(2, true),
            Decision::nonzero(),
        );
        assert!(wrong.is_err());
        let zero = FewLanguage::new(
            "zero",
            PolyBound::constant(0),
            PolyBound::constant(1),
            |_| Circuit::constant(0, true),
            Decision::nonzero(),
        );
        assert!(zero.is_err());
    }

    #[test]
    fn by_name_lookup() {
        assert_eq!(by_name("exact1", &[3, 5]).unwrap().name(), "exact1(101)");
        assert_eq!(by_name("const0", &[]).unwrap().path_length(&bits("1")), 2);
        assert!(by_name("exact1", &[2, 4]).is_err());
        assert!(by_name("xor2", &[1]).is_err());
        assert!(by_name("nope", &[]).is_err());
        for name in NAMES {
            assert!(by_name(name, &[]).is_ok(), "{name}");
        }
    }

    #[test]
    fn decisions() {
        let x = bits("0");
        assert!(Decision::parity().decide(&x, 3));
        assert!(!Decision::parity().decide(&x, 2));
        assert!(Decision::is_zero().decide(&x, 0));
        assert!(Decision::nonzero().decide(&x, 1));
        for name in Decision::NAMES {
            assert_eq!(Decision::by_name(name).unwrap().name(), name);
        }
        assert!(Decision::by_name("odd?").is_none());
    }
}
