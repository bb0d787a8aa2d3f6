//! Markov tree-shifts: alphabets, height-2 patterns, and the allowed-tuple table.
//!
//! A Markov tree-shift over an alphabet of `k` symbols on the `d`-ary tree is
//! determined by which `(root, children)` patterns may appear. Internally the
//! table of *allowed* child tuples per root symbol is canonical; forbidden sets
//! are derived as its complement.
//!
//! Child tuples are ordered lexicographically by alphabet position. The same
//! order fixes the column layout of indicator matrices downstream.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Hard cap on `k^d`, the number of child tuples per root.
pub const MAX_TUPLES: usize = 1 << 22;

/// Ordered set of distinct symbol names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (position, name) in symbols.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptySymbolName { position });
            }
            if index.insert(name.clone(), position).is_some() {
                return Err(Error::DuplicateSymbol {
                    name: name.clone(),
                    position,
                });
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// `a1, a2, ..., ak`.
    pub fn numbered(k: usize) -> Result<Self> {
        Alphabet::new((1..=k).map(|i| format!("a{i}")))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

/// A block of height 2: a root symbol and the labels of its `d` children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern2 {
    pub root: usize,
    pub children: Vec<usize>,
}

impl Pattern2 {
    pub fn new(root: usize, children: Vec<usize>) -> Self {
        Pattern2 { root, children }
    }
}

/// Which list a specification document carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternList {
    Allowed,
    Forbidden,
}

impl PatternList {
    fn key(self) -> &'static str {
        match self {
            PatternList::Allowed => "allowed",
            PatternList::Forbidden => "forbidden",
        }
    }
}

/// A validated Markov tree-shift of finite type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeShiftSpec {
    alphabet: Alphabet,
    arity: usize,
    /// `allowed[i]` is the sorted list of permitted child tuples under root `i`.
    allowed: Vec<Vec<Vec<usize>>>,
}

impl TreeShiftSpec {
    /// Build from an allowed-pattern list. Duplicates are rejected.
    pub fn from_allowed<I>(alphabet: Alphabet, arity: usize, patterns: I) -> Result<Self>
    where
        I: IntoIterator<Item = Pattern2>,
    {
        let k = alphabet.len();
        check_size(k, arity)?;
        let mut allowed: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); k];
        for (entry, p) in patterns.into_iter().enumerate() {
            validate_pattern(&p, k, arity, "allowed", entry)?;
            if !allowed[p.root].insert(p.children) {
                return Err(Error::DuplicatePattern {
                    list: "allowed",
                    entry,
                });
            }
        }
        Ok(TreeShiftSpec {
            alphabet,
            arity,
            allowed: allowed.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Build from a forbidden-pattern list; the allowed table is its complement.
    pub fn from_forbidden<I>(alphabet: Alphabet, arity: usize, patterns: I) -> Result<Self>
    where
        I: IntoIterator<Item = Pattern2>,
    {
        let k = alphabet.len();
        check_size(k, arity)?;
        let mut forbidden: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); k];
        for (entry, p) in patterns.into_iter().enumerate() {
            validate_pattern(&p, k, arity, "forbidden", entry)?;
            if !forbidden[p.root].insert(p.children) {
                return Err(Error::DuplicatePattern {
                    list: "forbidden",
                    entry,
                });
            }
        }
        let allowed = forbidden
            .iter()
            .map(|banned| {
                TupleIter::new(k, arity)
                    .filter(|t| !banned.contains(t))
                    .collect()
            })
            .collect();
        Ok(TreeShiftSpec {
            alphabet,
            arity,
            allowed,
        })
    }

    /// The full tree-shift: every pattern allowed.
    pub fn full(alphabet: Alphabet, arity: usize) -> Result<Self> {
        TreeShiftSpec::from_forbidden(alphabet, arity, std::iter::empty())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    /// Allowed child tuples for `root`, lexicographically sorted.
    pub fn allowed(&self, root: usize) -> &[Vec<usize>] {
        &self.allowed[root]
    }

    pub fn allowed_table(&self) -> &[Vec<Vec<usize>>] {
        &self.allowed
    }

    pub fn is_allowed(&self, pattern: &Pattern2) -> bool {
        pattern.root < self.num_symbols()
            && self.allowed[pattern.root]
                .binary_search(&pattern.children)
                .is_ok()
    }

    pub fn allowed_patterns(&self) -> impl Iterator<Item = Pattern2> + '_ {
        self.allowed.iter().enumerate().flat_map(|(root, tuples)| {
            tuples.iter().map(move |t| Pattern2::new(root, t.clone()))
        })
    }

    /// Forbidden child tuples for `root`, lexicographically sorted.
    pub fn forbidden(&self, root: usize) -> Vec<Vec<usize>> {
        let allowed = &self.allowed[root];
        TupleIter::new(self.num_symbols(), self.arity)
            .filter(|t| allowed.binary_search(t).is_err())
            .collect()
    }

    pub fn forbidden_patterns(&self) -> Vec<Pattern2> {
        (0..self.num_symbols())
            .flat_map(|root| {
                self.forbidden(root)
                    .into_iter()
                    .map(move |t| Pattern2::new(root, t))
            })
            .collect()
    }

    /// `k^d`, the number of child tuples under each root.
    pub fn tuples_per_root(&self) -> usize {
        self.num_symbols().pow(self.arity as u32)
    }

    /// Copy of this shift with one more pattern forbidden.
    pub fn without_pattern(&self, pattern: &Pattern2) -> Result<Self> {
        if !self.is_allowed(pattern) {
            return Err(Error::PatternNotAllowed);
        }
        let mut next = self.clone();
        next.allowed[pattern.root].retain(|t| t != &pattern.children);
        Ok(next)
    }

    /// Iteratively drop symbols that root no allowed pattern, together with
    /// every tuple mentioning them, until nothing changes.
    ///
    /// Returns the pruned shift (survivors keep their relative order) and the
    /// names of removed symbols.
    pub fn prune_dead_symbols(&self) -> Result<(TreeShiftSpec, Vec<String>)> {
        let k = self.num_symbols();
        let mut alive = vec![true; k];
        let mut allowed = self.allowed.clone();
        loop {
            let dead: Vec<usize> = (0..k)
                .filter(|&i| alive[i] && allowed[i].is_empty())
                .collect();
            if dead.is_empty() {
                break;
            }
            for &i in &dead {
                alive[i] = false;
            }
            for tuples in allowed.iter_mut() {
                tuples.retain(|t| t.iter().all(|&c| alive[c]));
            }
        }
        let removed: Vec<String> = (0..k)
            .filter(|&i| !alive[i])
            .map(|i| self.alphabet.name(i).to_string())
            .collect();
        if removed.len() == k {
            return Err(Error::EmptyShift);
        }
        if removed.is_empty() {
            return Ok((self.clone(), removed));
        }
        let mut remap = vec![usize::MAX; k];
        let mut names = Vec::new();
        for i in (0..k).filter(|&i| alive[i]) {
            remap[i] = names.len();
            names.push(self.alphabet.name(i).to_string());
        }
        let alphabet = Alphabet::new(names)?;
        let patterns = (0..k).filter(|&i| alive[i]).flat_map(|i| {
            let remap = &remap;
            allowed[i].iter().map(move |t| {
                Pattern2::new(remap[i], t.iter().map(|&c| remap[c]).collect())
            })
        });
        let pruned = TreeShiftSpec::from_allowed(alphabet, self.arity, patterns.collect::<Vec<_>>())?;
        Ok((pruned, removed))
    }

    /// Parse a specification document (JSON object with `d`, `alphabet`, and
    /// exactly one of `forbidden` / `allowed`).
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        TreeShiftSpec::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Document("top level must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "d" | "alphabet" | "forbidden" | "allowed") {
                return Err(Error::Document(format!("unknown field {key:?}")));
            }
        }
        let arity = obj
            .get("d")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Document("field `d` must be a non-negative integer".into()))?
            as usize;
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        let names = obj
            .get("alphabet")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Document("field `alphabet` must be an array".into()))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Document("alphabet entries must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let alphabet = Alphabet::new(names)?;

        let (list, entries) = match (obj.get("forbidden"), obj.get("allowed")) {
            (Some(f), None) => (PatternList::Forbidden, f),
            (None, Some(a)) => (PatternList::Allowed, a),
            (Some(_), Some(_)) => {
                return Err(Error::Document(
                    "give exactly one of `forbidden` or `allowed`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Document(
                    "missing pattern list: give `forbidden` or `allowed`".into(),
                ))
            }
        };
        let entries = entries.as_array().ok_or_else(|| {
            Error::Document(format!("field `{}` must be an array", list.key()))
        })?;
        let patterns = entries
            .iter()
            .enumerate()
            .map(|(entry, v)| parse_entry(v, &alphabet, arity, list.key(), entry))
            .collect::<Result<Vec<_>>>()?;
        match list {
            PatternList::Allowed => TreeShiftSpec::from_allowed(alphabet, arity, patterns),
            PatternList::Forbidden => TreeShiftSpec::from_forbidden(alphabet, arity, patterns),
        }
    }

    /// Canonical document: entries sorted lexicographically by alphabet order.
    pub fn to_value(&self, list: PatternList) -> Value {
        let patterns = match list {
            PatternList::Allowed => self.allowed_patterns().collect::<Vec<_>>(),
            PatternList::Forbidden => self.forbidden_patterns(),
        };
        let entries: Vec<Value> = patterns
            .iter()
            .map(|p| {
                let children: Vec<&str> =
                    p.children.iter().map(|&c| self.alphabet.name(c)).collect();
                json!([self.alphabet.name(p.root), children])
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("d".into(), json!(self.arity));
        obj.insert("alphabet".into(), json!(self.alphabet.symbols()));
        obj.insert(list.key().into(), Value::Array(entries));
        Value::Object(obj)
    }

    pub fn to_document(&self, list: PatternList) -> String {
        serde_json::to_string(&self.to_value(list)).expect("document serializes")
    }

    /// Render a pattern with symbol names, e.g. `(a, (a, b))`.
    pub fn display_pattern(&self, p: &Pattern2) -> String {
        let children: Vec<&str> = p.children.iter().map(|&c| self.alphabet.name(c)).collect();
        format!("({}, ({}))", self.alphabet.name(p.root), children.join(", "))
    }

    /// Parse a pattern fragment `["root", ["c1", ..., "cd"]]` against this alphabet.
    pub fn parse_pattern(&self, text: &str) -> Result<Pattern2> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        parse_entry(&value, &self.alphabet, self.arity, "pattern", 0)
    }
}

fn check_size(k: usize, arity: usize) -> Result<()> {
    if arity == 0 {
        return Err(Error::ZeroArity);
    }
    let too_many = Error::TooManyTuples {
        symbols: k,
        arity,
        limit: MAX_TUPLES,
    };
    let count = k
        .checked_pow(u32::try_from(arity).map_err(|_| too_many.clone())?)
        .ok_or_else(|| too_many.clone())?;
    if count > MAX_TUPLES {
        return Err(too_many);
    }
    Ok(())
}

fn validate_pattern(
    p: &Pattern2,
    k: usize,
    arity: usize,
    list: &'static str,
    entry: usize,
) -> Result<()> {
    if p.children.len() != arity {
        return Err(Error::ArityMismatch {
            list,
            entry,
            expected: arity,
            found: p.children.len(),
        });
    }
    for &s in std::iter::once(&p.root).chain(&p.children) {
        if s >= k {
            return Err(Error::SymbolOutOfRange { index: s, size: k });
        }
    }
    Ok(())
}

fn parse_entry(
    value: &Value,
    alphabet: &Alphabet,
    arity: usize,
    list: &'static str,
    entry: usize,
) -> Result<Pattern2> {
    let malformed = || {
        Error::Document(format!(
            "{list} entry {entry}: expected [root, [child_1, ..., child_d]]"
        ))
    };
    let pair = value.as_array().ok_or_else(malformed)?;
    if pair.len() != 2 {
        return Err(malformed());
    }
    let lookup = |v: &Value| -> Result<usize> {
        match v {
            Value::String(name) => alphabet.position(name).ok_or_else(|| Error::UnknownSymbol {
                list,
                entry,
                name: name.clone(),
            }),
            Value::Array(_) | Value::Object(_) => Err(Error::NotMarkov { list, entry }),
            _ => Err(malformed()),
        }
    };
    let root = lookup(&pair[0])?;
    let children = pair[1].as_array().ok_or_else(malformed)?;
    if children.len() != arity {
        return Err(Error::ArityMismatch {
            list,
            entry,
            expected: arity,
            found: children.len(),
        });
    }
    let children = children.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    Ok(Pattern2::new(root, children))
}

/// All `d`-tuples over `0..k` in lexicographic order.
#[derive(Debug, Clone)]
pub struct TupleIter {
    k: usize,
    current: Option<Vec<usize>>,
}

impl TupleIter {
    pub fn new(k: usize, d: usize) -> Self {
        TupleIter {
            k,
            current: (k > 0).then(|| vec![0; d]),
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.k {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

/// Position of `tuple` in the lexicographic enumeration of `k^d` tuples.
pub fn tuple_rank(tuple: &[usize], k: usize) -> usize {
    tuple.iter().fold(0, |acc, &s| acc * k + s)
}
