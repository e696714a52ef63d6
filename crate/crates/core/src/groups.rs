//! Finite groups given by multiplication tables, truncated free groups, and
//! Cayley-graph word lengths.
//!
//! Finite-group elements are dense indices `0..N`. Free-group elements are
//! reduced words over the letters `±1..±k` (`a, b, …` and `A, B, …` for the
//! inverses when printed).

use crate::cocycles::LengthFunction;
use crate::{Error, Result};
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

/// Default word budget for [`FreeGroupBall`].
pub const DEFAULT_WORD_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl FiniteGroup {
    /// The cyclic group `Z_n` under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let inverse = (0..n).map(|j| (n - j) % n).collect();
        Ok(Self { order: n, table, identity: 0, inverse, labels: None })
    }

    /// Validates a Cayley table: Latin square, identity, associativity.
    pub fn from_table(rows: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup("table is not square".into()));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::InvalidGroup("label count differs from order".into()));
            }
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        if table.iter().any(|&x| x >= n) {
            return Err(Error::InvalidGroup("entry out of range".into()));
        }
        for a in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for b in 0..n {
                let r = table[a * n + b];
                let c = table[b * n + a];
                if row_seen[r] {
                    return Err(Error::InvalidGroup(format!("row {a} is not a permutation")));
                }
                if col_seen[c] {
                    return Err(Error::InvalidGroup(format!("column {a} is not a permutation")));
                }
                row_seen[r] = true;
                col_seen[c] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e * n + g] == g && table[g * n + e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b];
                for c in 0..n {
                    if table[ab * n + c] != table[a * n + table[b * n + c]] {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|g| (0..n).find(|&h| table[g * n + h] == identity).expect("latin square has inverses"))
            .collect();
        Ok(Self { order: n, table, identity, inverse, labels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Whether `set` is closed under products and inverses (and non-empty).
    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return false;
        }
        let mut member = vec![false; self.order];
        for &g in set {
            if g >= self.order {
                return false;
            }
            member[g] = true;
        }
        set.iter().all(|&g| member[self.inv(g)] && set.iter().all(|&h| member[self.mul(g, h)]))
    }

    /// Breadth-first word length for the symmetrized generating set.
    pub fn word_length(&self, generators: &[usize]) -> Result<Vec<usize>> {
        let mut gens: Vec<usize> = generators.iter().flat_map(|&s| [s, self.inv(s)]).collect();
        gens.retain(|&s| s < self.order && s != self.identity);
        gens.sort_unstable();
        gens.dedup();
        let mut dist = vec![usize::MAX; self.order];
        dist[self.identity] = 0;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &s in &gens {
                let h = self.mul(g, s);
                if dist[h] == usize::MAX {
                    dist[h] = dist[g] + 1;
                    queue.push_back(h);
                }
            }
        }
        match dist.iter().position(|&d| d == usize::MAX) {
            Some(g) => Err(Error::NotGenerating(g)),
            None => Ok(dist),
        }
    }
}

/// A reduced word in a free group. Letters are `±1..=±k`.
pub type Word = Vec<i32>;

/// Freely reduces a letter sequence.
pub fn reduce(word: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn is_reduced(word: &[i32]) -> bool {
    word.iter().all(|&l| l != 0) && word.windows(2).all(|w| w[0] != -w[1])
}

pub fn word_mul(a: &[i32], b: &[i32]) -> Word {
    // cancel at the junction only; both inputs are reduced
    let mut i = 0;
    while i < a.len() && i < b.len() && a[a.len() - 1 - i] == -b[i] {
        i += 1;
    }
    let mut out = a[..a.len() - i].to_vec();
    out.extend_from_slice(&b[i..]);
    out
}

pub fn word_inv(a: &[i32]) -> Word {
    a.iter().rev().map(|&l| -l).collect()
}

/// `g ≥ h` in the prefix order: `h` lies on the geodesic from `e` to `g`.
pub fn prefix_geq(g: &[i32], h: &[i32]) -> bool {
    h.len() <= g.len() && g[..h.len()] == *h
}

/// Length of the longest common prefix: the Gromov product of `g` and `h`.
pub fn common_prefix_len(g: &[i32], h: &[i32]) -> usize {
    g.iter().zip(h).take_while(|(a, b)| a == b).count()
}

/// Human-readable form: `e`, `aB`, …
pub fn format_word(w: &[i32]) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.iter()
        .map(|&l| {
            let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
            if l > 0 {
                c
            } else {
                c.to_ascii_uppercase()
            }
        })
        .collect()
}

pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s == "e" || s.is_empty() {
        return Ok(Vec::new());
    }
    let w: Word = s
        .chars()
        .map(|c| {
            if c.is_ascii_lowercase() {
                Ok((c as u8 - b'a' + 1) as i32)
            } else if c.is_ascii_uppercase() {
                Ok(-((c as u8 - b'A' + 1) as i32))
            } else {
                Err(Error::Invalid(format!("bad letter {c:?} in word {s:?}")))
            }
        })
        .collect::<Result<_>>()?;
    if !is_reduced(&w) {
        return Err(Error::NotReduced(w));
    }
    Ok(w)
}

/// All reduced words of length at most `radius` in the free group on `k`
/// generators, in shortlex order (index 0 is the identity).
#[derive(Debug, Clone)]
pub struct FreeGroupBall {
    k: usize,
    radius: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    parent: Vec<Option<usize>>,
    inverse: Vec<usize>,
}

impl FreeGroupBall {
    pub fn new(k: usize, radius: usize) -> Result<Self> {
        Self::with_budget(k, radius, DEFAULT_WORD_BUDGET)
    }

    pub fn with_budget(k: usize, radius: usize, budget: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGroup("free group needs k ≥ 1".into()));
        }
        let count = ball_size(k, radius);
        if count > budget as u128 {
            return Err(Error::BallTooLarge { words: count.min(usize::MAX as u128) as usize, budget });
        }
        let letters: Vec<i32> = (1..=k as i32).flat_map(|l| [l, -l]).collect();
        let mut words: Vec<Word> = vec![Vec::new()];
        let mut parent = vec![None];
        let mut level_start = 0;
        for _ in 0..radius {
            let level_end = words.len();
            for idx in level_start..level_end {
                let base = words[idx].clone();
                for &l in &letters {
                    if base.last() == Some(&-l) {
                        continue;
                    }
                    let mut w = base.clone();
                    w.push(l);
                    words.push(w);
                    parent.push(Some(idx));
                }
            }
            level_start = level_end;
        }
        let index: HashMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let inverse = words.iter().map(|w| index[&word_inv(w)]).collect();
        Ok(Self { k, radius, words, index, parent, inverse })
    }

    pub fn generators(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &[i32] {
        &self.words[i]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn index_of(&self, w: &[i32]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// `|g|`.
    pub fn length(&self, i: usize) -> usize {
        self.words[i].len()
    }

    /// `g⁻`: the word with its last letter deleted (`None` at the identity).
    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Index of the reduced product, or `None` when it leaves the ball.
    pub fn mul(&self, g: usize, h: usize) -> Option<usize> {
        let w = word_mul(&self.words[g], &self.words[h]);
        self.index_of(&w)
    }

    pub fn prefix_geq(&self, g: usize, h: usize) -> bool {
        prefix_geq(&self.words[g], &self.words[h])
    }
}

/// `1 + 2k Σ_{r=1}^{R} (2k−1)^{r−1}`.
pub fn ball_size(k: usize, radius: usize) -> u128 {
    let mut total: u128 = 1;
    let mut level: u128 = 2 * k as u128;
    for _ in 0..radius {
        total = total.saturating_add(level);
        level = level.saturating_mul(2 * k as u128 - 1);
    }
    total
}

/// Either a finite group or a truncated free group.
#[derive(Debug, Clone)]
pub enum Group {
    Finite(FiniteGroup),
    FreeBall(FreeGroupBall),
}

pub type GroupRef = Arc<Group>;

impl Group {
    pub fn order(&self) -> usize {
        match self {
            Group::Finite(g) => g.order(),
            Group::FreeBall(b) => b.len(),
        }
    }

    pub fn identity(&self) -> usize {
        match self {
            Group::Finite(g) => g.identity(),
            Group::FreeBall(_) => 0,
        }
    }

    pub fn inv(&self, g: usize) -> usize {
        match self {
            Group::Finite(gr) => gr.inv(g),
            Group::FreeBall(b) => b.inv(g),
        }
    }

    /// Product, `None` when it leaves a truncated ball.
    pub fn mul(&self, g: usize, h: usize) -> Option<usize> {
        match self {
            Group::Finite(gr) => Some(gr.mul(g, h)),
            Group::FreeBall(b) => b.mul(g, h),
        }
    }

    pub fn as_finite(&self) -> Result<&FiniteGroup> {
        match self {
            Group::Finite(g) => Ok(g),
            Group::FreeBall(_) => Err(Error::RequiresFiniteGroup),
        }
    }

    pub fn as_free(&self) -> Result<&FreeGroupBall> {
        match self {
            Group::FreeBall(b) => Ok(b),
            Group::Finite(_) => Err(Error::RequiresFreeBall),
        }
    }

    /// Short description used in reports.
    pub fn describe(&self) -> String {
        match self {
            Group::Finite(g) => format!("finite(order={})", g.order()),
            Group::FreeBall(b) => format!("free-ball(k={},R={})", b.generators(), b.radius()),
        }
    }

    pub fn element_label(&self, g: usize) -> String {
        match self {
            Group::Finite(gr) => gr.labels().map(|l| l[g].clone()).unwrap_or_else(|| g.to_string()),
            Group::FreeBall(b) => format_word(b.word(g)),
        }
    }

    pub fn into_ref(self) -> GroupRef {
        Arc::new(self)
    }
}

/// Word length of a finite group as a [`LengthFunction`].
pub fn word_length(group: &GroupRef, generators: &[usize]) -> Result<LengthFunction> {
    let g = group.as_finite()?;
    let d = g.word_length(generators)?;
    LengthFunction::new(group.clone(), d.into_iter().map(|x| x as f64).collect(), "word")
}
