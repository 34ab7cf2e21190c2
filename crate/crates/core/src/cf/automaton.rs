//! Forbidden-pattern recognition for geodesic continued fractions.
//!
//! Coefficients are abstracted to six symbols and the forbidden families are
//! written as regular expressions over them. Each expression is compiled to a
//! Thompson NFA and determinised by subset construction. The detector
//! recognises Σ*FΣ*, so it can stream an unbounded coefficient sequence with
//! constant memory; separate anchored automata recover which family matched.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::algebraic::{HeckeIndex, QContext};
use crate::error::{Error, Result};

/// Abstract coefficient alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Symbol {
    Zero,
    PlusOne,
    MinusOne,
    PlusTwo,
    MinusTwo,
    Other,
}

impl Symbol {
    pub const ALL: [Symbol; 6] = [
        Symbol::Zero,
        Symbol::PlusOne,
        Symbol::MinusOne,
        Symbol::PlusTwo,
        Symbol::MinusTwo,
        Symbol::Other,
    ];

    pub fn of(b: i64) -> Symbol {
        match b {
            0 => Symbol::Zero,
            1 => Symbol::PlusOne,
            -1 => Symbol::MinusOne,
            2 => Symbol::PlusTwo,
            -2 => Symbol::MinusTwo,
            _ => Symbol::Other,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn negated(self) -> Symbol {
        match self {
            Symbol::PlusOne => Symbol::MinusOne,
            Symbol::MinusOne => Symbol::PlusOne,
            Symbol::PlusTwo => Symbol::MinusTwo,
            Symbol::MinusTwo => Symbol::PlusTwo,
            s => s,
        }
    }
}

const ALPHABET: usize = 6;

#[derive(Clone, Debug)]
enum Re {
    Sym(Symbol),
    Any,
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    Star(Box<Re>),
}

impl Re {
    fn negated(&self) -> Re {
        match self {
            Re::Sym(s) => Re::Sym(s.negated()),
            Re::Any => Re::Any,
            Re::Cat(v) => Re::Cat(v.iter().map(Re::negated).collect()),
            Re::Alt(v) => Re::Alt(v.iter().map(Re::negated).collect()),
            Re::Star(r) => Re::Star(Box::new(r.negated())),
        }
    }
}

fn ones(n: usize) -> Re {
    Re::Cat(vec![Re::Sym(Symbol::PlusOne); n])
}

fn two() -> Re {
    Re::Sym(Symbol::PlusTwo)
}

/// Which forbidden family a match belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// A zero coefficient (a backtrack in the path).
    Zero,
    /// A run of r ones.
    Ones,
    /// Ones interleaved with twos (the long way round a chain of faces).
    Interleaved,
}

/// Positive-sign expressions for the families relevant to `q`.
fn families(q: HeckeIndex) -> Vec<(PatternKind, Re)> {
    let mut out = vec![(PatternKind::Zero, Re::Sym(Symbol::Zero))];
    let HeckeIndex::Finite(q) = q else {
        return out;
    };
    let r = (q / 2) as usize;
    out.push((PatternKind::Ones, ones(r)));
    let interleaved = if q % 2 == 0 {
        // 1^{r-1} 2 (1^{r-2} 2)* 1^{r-1}
        Re::Cat(vec![
            ones(r - 1),
            two(),
            Re::Star(Box::new(Re::Cat(vec![ones(r - 2), two()]))),
            ones(r - 1),
        ])
    } else {
        // 1^{r-1} 2 1^{r-1} (2 1^{r-2} 2 1^{r-1})* 2 1^{r-1}
        Re::Cat(vec![
            ones(r - 1),
            two(),
            ones(r - 1),
            Re::Star(Box::new(Re::Cat(vec![
                two(),
                ones(r - 2),
                two(),
                ones(r - 1),
            ]))),
            two(),
            ones(r - 1),
        ])
    };
    out.push((PatternKind::Interleaved, interleaved));
    out
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    /// Thompson construction; returns (entry, exit).
    fn build(&mut self, re: &Re) -> (usize, usize) {
        match re {
            Re::Sym(s) => {
                let (a, b) = (self.state(), self.state());
                self.moves[a].push((s.index(), b));
                (a, b)
            }
            Re::Any => {
                let (a, b) = (self.state(), self.state());
                for s in 0..ALPHABET {
                    self.moves[a].push((s, b));
                }
                (a, b)
            }
            Re::Cat(parts) => {
                let start = self.state();
                let mut cur = start;
                for p in parts {
                    let (s, e) = self.build(p);
                    self.eps[cur].push(s);
                    cur = e;
                }
                (start, cur)
            }
            Re::Alt(parts) => {
                let (a, b) = (self.state(), self.state());
                for p in parts {
                    let (s, e) = self.build(p);
                    self.eps[a].push(s);
                    self.eps[e].push(b);
                }
                (a, b)
            }
            Re::Star(inner) => {
                let (a, b) = (self.state(), self.state());
                let (s, e) = self.build(inner);
                self.eps[a].push(s);
                self.eps[a].push(b);
                self.eps[e].push(s);
                self.eps[e].push(b);
                (a, b)
            }
        }
    }

    fn closure(&self, seed: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack: Vec<usize> = seed.into_iter().collect();
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            out.push(s);
            stack.extend(self.eps[s].iter().copied());
        }
        out.sort_unstable();
        out
    }
}

/// A complete deterministic automaton over [`Symbol`].
#[derive(Clone, Debug)]
struct Dfa {
    table: Vec<[usize; ALPHABET]>,
    accepting: Vec<bool>,
}

impl Dfa {
    fn compile(re: &Re) -> Dfa {
        let mut nfa = Nfa::default();
        let (start, accept) = nfa.build(re);
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let init = nfa.closure([start]);
        ids.insert(init.clone(), 0);
        sets.push(init);
        let mut table = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let set = sets[i].clone();
            accepting.push(set.binary_search(&accept).is_ok());
            let mut row = [0usize; ALPHABET];
            for (sym, slot) in row.iter_mut().enumerate() {
                let targets = set
                    .iter()
                    .flat_map(|&s| nfa.moves[s].iter())
                    .filter(|&&(c, _)| c == sym)
                    .map(|&(_, t)| t);
                let next = nfa.closure(targets);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        sets.push(next.clone());
                        ids.insert(next, sets.len() - 1);
                        sets.len() - 1
                    }
                };
                *slot = id;
            }
            table.push(row);
            i += 1;
        }
        Dfa { table, accepting }
    }

    fn accepts(&self, word: impl IntoIterator<Item = Symbol>) -> bool {
        let mut s = 0;
        for c in word {
            s = self.table[s][c.index()];
        }
        self.accepting[s]
    }
}

/// A located forbidden pattern. Positions are 1-based and inclusive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternMatch {
    pub kind: PatternKind,
    pub sign: i8,
    pub start: usize,
    pub end: usize,
    pub window: Vec<i64>,
}

impl fmt::Display for PatternMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.window.iter().map(i64::to_string).collect();
        write!(f, "pattern ({}) at index {}", items.join(","), self.start)
    }
}

/// Detector for the forbidden families of one Hecke group.
#[derive(Debug)]
pub struct PatternAutomaton {
    q: HeckeIndex,
    detector: Dfa,
    families: Vec<(PatternKind, Dfa)>,
}

/// The automaton for `ctx`, shared between calls.
pub fn build_pattern_automaton(ctx: &Arc<QContext>) -> Result<Arc<PatternAutomaton>> {
    let q = ctx.q();
    if q == HeckeIndex::Finite(3) {
        return Err(Error::Unsupported {
            q: "3".into(),
            reason: "no forbidden-pattern characterisation; use the distance oracle",
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<HeckeIndex, Arc<PatternAutomaton>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = cache.lock().expect("automaton cache poisoned").get(&q) {
        return Ok(Arc::clone(a));
    }
    let fams = families(q);
    let union = Re::Alt(
        fams.iter()
            .flat_map(|(_, re)| [re.clone(), re.negated()])
            .collect(),
    );
    let any_star = Re::Star(Box::new(Re::Any));
    let detector = Dfa::compile(&Re::Cat(vec![any_star.clone(), union, any_star]));
    let families = fams
        .into_iter()
        .map(|(kind, re)| (kind, Dfa::compile(&re)))
        .collect();
    let a = Arc::new(PatternAutomaton {
        q,
        detector,
        families,
    });
    cache
        .lock()
        .expect("automaton cache poisoned")
        .insert(q, Arc::clone(&a));
    Ok(a)
}

impl PatternAutomaton {
    pub fn q(&self) -> HeckeIndex {
        self.q
    }

    pub fn num_states(&self) -> usize {
        self.detector.table.len()
    }

    pub fn start_state(&self) -> usize {
        0
    }

    pub fn next_state(&self, state: usize, symbol: Symbol) -> usize {
        self.detector.table[state][symbol.index()]
    }

    /// Accepting means a forbidden pattern has been seen.
    pub fn is_accepting(&self, state: usize) -> bool {
        self.detector.accepting[state]
    }

    /// Scans `b_2, …, b_n` and reports the forbidden pattern with the
    /// earliest end, preferring the shortest window ending there.
    pub fn find(&self, coeffs: &[i64]) -> Option<PatternMatch> {
        let mut state = self.start_state();
        for (end, &b) in coeffs.iter().enumerate().skip(1) {
            state = self.next_state(state, Symbol::of(b));
            if self.is_accepting(state) {
                return Some(self.identify(coeffs, end));
            }
        }
        None
    }

    /// True when `coeffs[1..]` contains no forbidden pattern.
    pub fn accepts_as_geodesic(&self, coeffs: &[i64]) -> bool {
        let mut state = self.start_state();
        for &b in coeffs.iter().skip(1) {
            state = self.next_state(state, Symbol::of(b));
            if self.is_accepting(state) {
                return false;
            }
        }
        true
    }

    /// Finds the shortest window `coeffs[s..=end]` (s ≥ 1) matching a family.
    fn identify(&self, coeffs: &[i64], end: usize) -> PatternMatch {
        for s in (1..=end).rev() {
            let window = &coeffs[s..=end];
            for sign in [1i8, -1] {
                let syms = window.iter().map(|&b| {
                    let sym = Symbol::of(b);
                    if sign < 0 {
                        sym.negated()
                    } else {
                        sym
                    }
                });
                for (kind, dfa) in &self.families {
                    if dfa.accepts(syms.clone()) {
                        let sign = if *kind == PatternKind::Zero { 1 } else { sign };
                        return PatternMatch {
                            kind: *kind,
                            sign,
                            start: s + 1,
                            end: end + 1,
                            window: window.to_vec(),
                        };
                    }
                }
            }
        }
        unreachable!("detector accepted but no family matches")
    }
}
