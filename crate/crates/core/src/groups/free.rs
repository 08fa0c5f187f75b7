//! Free groups on generators `a, b, c, ...` with reduced words as elements.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word over signed generator indices: `+i` is generator `i` (1-based),
/// `-i` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used.
    pub fn rank(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Parses letters `a..z` (uppercase for inverses) with optional `^n`
    /// exponents, e.g. `"ab^-1"`, `"a^2 B"`, `"abAB"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if !c.is_ascii_alphabetic() {
                return Err(Error::InvalidClass(format!("unexpected character {c:?} in word {text:?}")));
            }
            let gen = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
            let mut letter = if c.is_ascii_uppercase() { -gen } else { gen };
            i += 1;
            let mut power = 1i64;
            if i < chars.len() && chars[i] == '^' {
                let start = i + 1;
                let mut end = start;
                if end < chars.len() && chars[end] == '-' {
                    end += 1;
                }
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                let digits: String = chars[start..end].iter().collect();
                power = digits
                    .parse()
                    .map_err(|_| Error::InvalidClass(format!("bad exponent {digits:?} in word {text:?}")))?;
                i = end;
            }
            if power < 0 {
                letter = -letter;
            }
            letters.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        }
        Ok(Word(letters))
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn rotation(&self, k: usize) -> Word {
        let n = self.0.len();
        Word((0..n).map(|i| self.0[(i + k) % n]).collect())
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced() && (self.0.len() < 2 || self.0[0] != -self.0[self.0.len() - 1])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.0 {
            let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
            write!(f, "{}", if l < 0 { c.to_ascii_uppercase() } else { c })?;
        }
        Ok(())
    }
}

/// Free reduction.
pub fn reduce(w: &Word) -> Word {
    let mut out: Vec<i32> = Vec::with_capacity(w.0.len());
    for &l in &w.0 {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Cyclic reduction of a reduced word.
fn cyclic_core(w: &Word) -> Word {
    let v = &w.0;
    let (mut i, mut j) = (0, v.len());
    while j - i >= 2 && v[i] == -v[j - 1] {
        i += 1;
        j -= 1;
    }
    Word(v[i..j].to_vec())
}

/// Conjugacy class data of a nontrivial element of a free group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeClassSpec {
    /// Cyclically reduced representative.
    pub core: Word,
    /// Primitive root of `core`; `core = root^power`.
    pub root: Word,
    pub power: usize,
    /// `ℓ_K`, the length of `core`.
    pub length: usize,
    /// `m_K`, the number of distinct cyclic conjugates of `core`.
    pub cyclic_conjugates: usize,
}

pub fn cyclic_data(w: &Word) -> Result<FreeClassSpec> {
    let core = cyclic_core(&reduce(w));
    if core.is_empty() {
        return Err(Error::IdentityClass(format!("{w} reduces to the identity")));
    }
    let n = core.len();
    // Smallest period p | n with core invariant under rotation by p.
    let p = (1..=n).find(|p| n % p == 0 && core.rotation(*p) == core).unwrap_or(n);
    Ok(FreeClassSpec {
        root: Word(core.0[..p].to_vec()),
        power: n / p,
        length: n,
        cyclic_conjugates: p,
        core,
    })
}

/// Reduced words of length exactly `len` over `k` generators, in lexicographic
/// order of letter choices.
fn reduced_words_of_length(k: usize, len: usize) -> Vec<Word> {
    let letters: Vec<i32> = (1..=k as i32).flat_map(|g| [g, -g]).collect();
    let mut layer = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * (2 * k - 1).max(1));
        for w in &layer {
            for &l in &letters {
                if w.0.last() != Some(&-l) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        layer = next;
    }
    layer
}

fn check_rank(k: usize, class: &FreeClassSpec) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidGroup(format!("free group rank must be at least 2, got {k}")));
    }
    if class.core.rank() > k {
        return Err(Error::RankMismatch { expected: k, found: class.core.rank() });
    }
    Ok(())
}

/// Counts elements of the class with word length at most `n` by generating
/// every reduced `α γ' α⁻¹` with `γ'` a cyclic conjugate of the core and
/// `2|α| + ℓ_K ≤ n`, deduplicating the reduced results.
pub fn free_conj_count_bfs(k: usize, class: &FreeClassSpec, n: usize) -> Result<u64> {
    check_rank(k, class)?;
    if n < class.length {
        return Ok(0);
    }
    let rotations: BTreeSet<Word> = (0..class.length).map(|i| class.core.rotation(i)).collect();
    let mut seen = std::collections::HashSet::new();
    for j in 0..=(n - class.length) / 2 {
        for alpha in reduced_words_of_length(k, j) {
            let inv = alpha.inverse();
            for r in &rotations {
                let w = reduce(&alpha.concat(r).concat(&inv));
                if w.len() <= n {
                    seen.insert(w);
                }
            }
        }
    }
    Ok(seen.len() as u64)
}

/// `m_K (2k-1)^⌊(n-ℓ_K)/2⌋`, or 0 below `ℓ_K`.
pub fn free_conj_count_closed(k: usize, class: &FreeClassSpec, n: usize) -> Result<u64> {
    check_rank(k, class)?;
    if n < class.length {
        return Ok(0);
    }
    let exp = ((n - class.length) / 2) as u32;
    Ok(class.cyclic_conjugates as u64 * (2 * k as u64 - 1).pow(exp))
}

/// The originally stated closed form `m_K (2k-2)(2k-1)^⌊(n-ℓ_K-2)/2⌋`.
/// Kept for side-by-side reports; it undercounts (see the tests).
pub fn free_conj_count_literal(k: usize, class: &FreeClassSpec, n: usize) -> Result<u64> {
    check_rank(k, class)?;
    if n < class.length + 2 {
        return Ok(0);
    }
    let exp = ((n - class.length - 2) / 2) as u32;
    Ok(class.cyclic_conjugates as u64 * (2 * k as u64 - 2) * (2 * k as u64 - 1).pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("ab^-1"), Word(vec![1, -2]));
        assert_eq!(w("a^2 B"), Word(vec![1, 1, -2]));
        assert_eq!(w("A^-2"), Word(vec![1, 1]));
        assert_eq!(w("abAB").to_string(), "abAB");
        assert!(Word::parse("a1").is_err());
    }

    #[test]
    fn reduction() {
        // a b b⁻¹ a → aa
        assert_eq!(reduce(&w("abBa")), w("aa"));
        let x = w("abBAcCa");
        assert_eq!(reduce(&reduce(&x)), reduce(&x));
        assert_eq!(reduce(&x), w("a"));
    }

    #[test]
    fn cyclic_data_examples() {
        let c = cyclic_data(&w("Bab")).unwrap();
        assert_eq!((c.core.clone(), c.length, c.cyclic_conjugates), (w("a"), 1, 1));
        let c = cyclic_data(&w("abab")).unwrap();
        assert_eq!((c.root.clone(), c.power, c.length, c.cyclic_conjugates), (w("ab"), 2, 4, 2));
        assert!(matches!(cyclic_data(&w("abBA")), Err(Error::IdentityClass(_))));
    }

    #[test]
    fn bfs_examples() {
        let ab = cyclic_data(&w("ab")).unwrap();
        let aa = cyclic_data(&w("aa")).unwrap();
        assert_eq!(free_conj_count_bfs(2, &ab, 1).unwrap(), 0);
        assert_eq!(free_conj_count_bfs(2, &ab, 4).unwrap(), 6);
        assert_eq!(free_conj_count_bfs(2, &aa, 4).unwrap(), 3);
        assert_eq!(free_conj_count_bfs(2, &ab, 6).unwrap(), 18);
    }

    #[test]
    fn closed_form_examples() {
        let ab = cyclic_data(&w("ab")).unwrap();
        let aa = cyclic_data(&w("aa")).unwrap();
        assert_eq!(free_conj_count_closed(2, &ab, 6).unwrap(), 18);
        assert_eq!(free_conj_count_closed(2, &aa, 4).unwrap(), 3);
        assert_eq!(free_conj_count_closed(2, &aa, 1).unwrap(), 0);
        // The printed formula gives 2 and 4 where the true counts are 3 and 6.
        assert_eq!(free_conj_count_literal(2, &aa, 4).unwrap(), 2);
        assert_eq!(free_conj_count_literal(2, &ab, 4).unwrap(), 4);
    }

    #[test]
    fn rank_checks() {
        let abc = cyclic_data(&w("abc")).unwrap();
        assert!(matches!(free_conj_count_bfs(2, &abc, 5), Err(Error::RankMismatch { .. })));
        assert!(free_conj_count_closed(1, &abc, 5).is_err());
    }

    /// Independent oracle: enumerate the whole ball and test conjugacy by
    /// comparing cyclic cores up to rotation.
    fn ball_oracle(k: usize, class: &FreeClassSpec, n: usize) -> u64 {
        let target: BTreeSet<Word> = (0..class.length).map(|i| class.core.rotation(i)).collect();
        (0..=n)
            .flat_map(|len| reduced_words_of_length(k, len))
            .filter(|x| target.contains(&cyclic_core(x)))
            .count() as u64
    }

    #[test]
    fn bfs_matches_full_ball_oracle() {
        for class in ["ab", "aa", "aab", "abab", "aBab"] {
            let c = cyclic_data(&w(class)).unwrap();
            for n in 0..=9 {
                assert_eq!(free_conj_count_bfs(2, &c, n).unwrap(), ball_oracle(2, &c, n), "{class} n={n}");
            }
        }
        let c = cyclic_data(&w("ab")).unwrap();
        for n in 0..=6 {
            assert_eq!(free_conj_count_bfs(3, &c, n).unwrap(), ball_oracle(3, &c, n));
        }
    }

    #[test]
    fn closed_form_matches_bfs_up_to_fourteen() {
        for k in [2, 3] {
            for class in ["ab", "aa", "aab", "abab"] {
                let c = cyclic_data(&w(class)).unwrap();
                let mut prev = 0;
                for n in 0..=14 {
                    let bfs = free_conj_count_bfs(k, &c, n).unwrap();
                    assert_eq!(bfs, free_conj_count_closed(k, &c, n).unwrap(), "k={k} {class} n={n}");
                    assert!(bfs >= prev);
                    if bfs > prev {
                        assert_eq!(n % 2, c.length % 2);
                    }
                    prev = bfs;
                }
            }
        }
    }
}
