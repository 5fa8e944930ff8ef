//! Machine descriptions, the direct simulator, and the key-value text format.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Left,
    Right,
    Stay,
}

/// One transition: on (state, symbol) move, write, and switch state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Action {
    pub mv: Move,
    pub write: usize,
    pub next: usize,
}

/// A machine over symbol indices `1..=alphabet.len()` (0 and len+1 mark the
/// borders inside the encoding) and state indices `0..states.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMSpec {
    pub states: Vec<String>,
    pub accept: usize,
    pub alphabet: Vec<String>,
    pub delta: BTreeMap<(usize, usize), Action>,
    /// Polynomial coefficients, index = degree.
    pub poly: Vec<u64>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TMError {
    #[error("machine needs at least the symbols false, true, blank")]
    AlphabetTooSmall,
    #[error("no states declared")]
    NoStates,
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("transition missing for state {state} symbol {symbol}")]
    MissingTransition { state: String, symbol: String },
    #[error("accepting state must be absorbing, offending transition on {0}")]
    NotAbsorbing(String),
    #[error("polynomial must have a positive coefficient")]
    ZeroPolynomial,
    #[error("spec parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl TMSpec {
    pub fn validate(&self) -> Result<(), TMError> {
        if self.alphabet.len() < 3 {
            return Err(TMError::AlphabetTooSmall);
        }
        if self.states.is_empty() {
            return Err(TMError::NoStates);
        }
        if self.poly.iter().all(|c| *c == 0) {
            return Err(TMError::ZeroPolynomial);
        }
        for s in 0..self.states.len() {
            if s == self.accept {
                continue;
            }
            for a in 1..=self.alphabet.len() {
                if !self.delta.contains_key(&(s, a)) {
                    return Err(TMError::MissingTransition {
                        state: self.states[s].clone(),
                        symbol: self.alphabet[a - 1].clone(),
                    });
                }
            }
        }
        for ((s, _), act) in &self.delta {
            if *s == self.accept && (act.next != self.accept) {
                return Err(TMError::NotAbsorbing(self.states[*s].clone()));
            }
        }
        Ok(())
    }

    /// Degree of the clock polynomial.
    pub fn degree(&self) -> usize {
        self.poly.iter().rposition(|c| *c > 0).unwrap_or(0)
    }

    /// Majorized coefficient: the sum of all coefficients.
    pub fn big_k(&self) -> u64 {
        self.poly.iter().sum()
    }

    /// Least `e >= 1` with `degree <= 2^e`.
    pub fn exponent(&self) -> usize {
        let k = self.degree().max(1);
        let mut e = 1usize;
        while (1usize << e) < k {
            e += 1;
        }
        e
    }

    /// Clock value for an input of length `n`.
    pub fn clock(&self, n: u64) -> u64 {
        self.big_k() * n.pow(1 << self.exponent())
    }

    /// The transition for a (state, symbol) pair; the accepting state stays
    /// put and rewrites the scanned symbol.
    pub fn action(&self, state: usize, symbol: usize) -> Action {
        if state == self.accept {
            return Action { mv: Move::Stay, write: symbol, next: state };
        }
        *self.delta.get(&(state, symbol)).expect("validated spec is total")
    }

    pub fn blank(&self) -> usize {
        3
    }
}

/// A simulated tape: symbol indices, head position, current state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeState {
    pub state: usize,
    pub tape: Vec<usize>,
    pub head: usize,
}

impl TapeState {
    /// The output portion: the symbol under the head and everything to its
    /// right up to the first blank.
    pub fn output_portion(&self, spec: &TMSpec) -> Vec<usize> {
        let mut out = Vec::new();
        for &sym in self.tape.iter().skip(self.head) {
            if sym == spec.blank() {
                break;
            }
            out.push(sym);
        }
        out
    }
}

/// Run the machine for the given number of steps, growing the tape with
/// blanks on demand.
pub fn tm_simulate(spec: &TMSpec, input: &[usize], steps: u64) -> TapeState {
    let mut tape: Vec<usize> = input.to_vec();
    if tape.is_empty() {
        tape.push(spec.blank());
    }
    let mut head = 0usize;
    let mut state = 0usize;
    for _ in 0..steps {
        let sym = tape[head];
        let act = spec.action(state, sym);
        tape[head] = act.write;
        state = act.next;
        match act.mv {
            Move::Stay => {}
            Move::Right => {
                head += 1;
                if head == tape.len() {
                    tape.push(spec.blank());
                }
            }
            Move::Left => {
                if head == 0 {
                    tape.insert(0, spec.blank());
                } else {
                    head -= 1;
                }
            }
        }
    }
    TapeState { state, tape, head }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

impl fmt::Display for TMSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "accept: {}", self.states[self.accept])?;
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        writeln!(
            f,
            "poly: {}",
            self.poly.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
        )?;
        writeln!(f, "delta:")?;
        for ((s, a), act) in &self.delta {
            let mv = match act.mv {
                Move::Left => "L",
                Move::Right => "R",
                Move::Stay => "S",
            };
            writeln!(
                f,
                "{} {} -> {} {} {}",
                self.states[*s],
                self.alphabet[*a - 1],
                mv,
                self.alphabet[act.write - 1],
                self.states[act.next]
            )?;
        }
        Ok(())
    }
}

/// Parse the key-value format emitted by `Display`.
pub fn parse_tmspec(src: &str) -> Result<TMSpec, TMError> {
    let mut states: Vec<String> = Vec::new();
    let mut accept_name = String::new();
    let mut alphabet: Vec<String> = Vec::new();
    let mut poly: Vec<u64> = Vec::new();
    let mut delta = BTreeMap::new();
    let mut in_delta = false;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |msg: &str| TMError::Parse { line: lineno, msg: msg.to_string() };
        if let Some(rest) = line.strip_prefix("states:") {
            states = rest.split_whitespace().map(String::from).collect();
        } else if let Some(rest) = line.strip_prefix("accept:") {
            accept_name = rest.trim().to_string();
        } else if let Some(rest) = line.strip_prefix("alphabet:") {
            alphabet = rest.split_whitespace().map(String::from).collect();
        } else if let Some(rest) = line.strip_prefix("poly:") {
            poly = rest
                .split_whitespace()
                .map(|c| c.parse().map_err(|_| perr("bad coefficient")))
                .collect::<Result<_, _>>()?;
        } else if line == "delta:" {
            in_delta = true;
        } else if in_delta {
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| perr("expected '->'"))?;
            let l: Vec<&str> = lhs.split_whitespace().collect();
            let r: Vec<&str> = rhs.split_whitespace().collect();
            if l.len() != 2 || r.len() != 3 {
                return Err(perr("expected 'state symbol -> move symbol state'"));
            }
            let sidx = states
                .iter()
                .position(|s| s == l[0])
                .ok_or_else(|| TMError::UnknownState(l[0].into()))?;
            let aidx = alphabet
                .iter()
                .position(|a| a == l[1])
                .ok_or_else(|| TMError::UnknownSymbol(l[1].into()))?
                + 1;
            let mv = match r[0] {
                "L" => Move::Left,
                "R" => Move::Right,
                "S" => Move::Stay,
                other => return Err(perr(&format!("bad move {other}"))),
            };
            let widx = alphabet
                .iter()
                .position(|a| a == r[1])
                .ok_or_else(|| TMError::UnknownSymbol(r[1].into()))?
                + 1;
            let nidx = states
                .iter()
                .position(|s| s == r[2])
                .ok_or_else(|| TMError::UnknownState(r[2].into()))?;
            delta.insert((sidx, aidx), Action { mv, write: widx, next: nidx });
        } else {
            return Err(perr("unknown directive"));
        }
    }
    let accept = states
        .iter()
        .position(|s| *s == accept_name)
        .ok_or(TMError::UnknownState(accept_name))?;
    let spec = TMSpec { states, accept, alphabet, delta, poly };
    spec.validate()?;
    Ok(spec)
}

/// A machine that flips the bits of its input, then parks on the result.
pub fn bit_flip() -> TMSpec {
    parse_tmspec(
        "states: s0 back acc\n\
         accept: acc\n\
         alphabet: f t blank\n\
         poly: 0 3\n\
         delta:\n\
         s0 f -> R t s0\n\
         s0 t -> R f s0\n\
         s0 blank -> L blank back\n\
         back f -> L f back\n\
         back t -> L t back\n\
         back blank -> R blank acc\n",
    )
    .unwrap()
}

/// Unary increment: appends one `t` to a block of `t`s.
pub fn unary_increment() -> TMSpec {
    parse_tmspec(
        "states: s0 back acc\n\
         accept: acc\n\
         alphabet: f t blank\n\
         poly: 3 3\n\
         delta:\n\
         s0 t -> R t s0\n\
         s0 f -> R t s0\n\
         s0 blank -> L t back\n\
         back t -> L t back\n\
         back f -> L f back\n\
         back blank -> R blank acc\n",
    )
    .unwrap()
}

/// Parity of the number of `t`s: result one symbol, `t` iff odd.
pub fn parity() -> TMSpec {
    parse_tmspec(
        "states: even odd ce co acc\n\
         accept: acc\n\
         alphabet: f t blank\n\
         poly: 0 3\n\
         delta:\n\
         even f -> R blank even\n\
         even t -> R blank odd\n\
         even blank -> L blank ce\n\
         odd f -> R blank odd\n\
         odd t -> R blank even\n\
         odd blank -> L blank co\n\
         ce f -> L blank ce\n\
         ce t -> L blank ce\n\
         ce blank -> S f acc\n\
         co f -> L blank co\n\
         co t -> L blank co\n\
         co blank -> S t acc\n",
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulator_basics() {
        let m = bit_flip();
        // input "t f" flips to "f t"
        let end = tm_simulate(&m, &[2, 1], m.clock(2));
        assert_eq!(end.state, m.accept);
        assert_eq!(end.output_portion(&m), vec![1, 2]);
        // accepting state is absorbing
        let more = tm_simulate(&m, &[2, 1], m.clock(2) + 17);
        assert_eq!(more.output_portion(&m), vec![1, 2]);
        assert_eq!(more.state, m.accept);
    }

    #[test]
    fn empty_input_runs() {
        let m = unary_increment();
        let end = tm_simulate(&m, &[], m.clock(0).max(8));
        assert_eq!(end.state, m.accept);
        assert_eq!(end.output_portion(&m), vec![2]);
    }

    #[test]
    fn parity_machine() {
        let m = parity();
        for (input, want) in [(vec![2, 2], 1), (vec![2, 1, 2, 2], 2), (vec![], 1)] {
            let end = tm_simulate(&m, &input, m.clock(input.len() as u64).max(8));
            assert_eq!(end.state, m.accept, "input {input:?}");
            assert_eq!(end.output_portion(&m), vec![want], "input {input:?}");
        }
    }

    #[test]
    fn spec_round_trip() {
        for m in [bit_flip(), unary_increment(), parity()] {
            let printed = m.to_string();
            assert_eq!(parse_tmspec(&printed).unwrap(), m);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            parse_tmspec("states: a\naccept: a\nalphabet: f t\npoly: 1\ndelta:\n"),
            Err(TMError::AlphabetTooSmall)
        ));
        assert!(parse_tmspec(
            "states: a b\naccept: b\nalphabet: f t blank\npoly: 1\ndelta:\na f -> R t a\n"
        )
        .is_err());
    }

    #[test]
    fn exponent_and_clock() {
        let m = bit_flip(); // degree 1
        assert_eq!(m.degree(), 1);
        assert_eq!(m.exponent(), 1);
        assert_eq!(m.clock(2), 3 * 4);
        let mut q = m.clone();
        q.poly = vec![1, 0, 2]; // degree 2, K = 3
        assert_eq!(q.exponent(), 1);
        assert_eq!(q.clock(3), 27); // 3 * 3^2
    }
}
