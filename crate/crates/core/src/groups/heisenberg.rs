//! Integer Heisenberg groups `A × Z` with `(a, z)(a', z') = (a + a', z + z' + ⟨a, a'⟩)`
//! for an antisymmetric integer form on `A = Z^{2k}`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeisenbergElt {
    pub a: Vec<i64>,
    pub z: i64,
}

impl HeisenbergElt {
    pub fn new(a: Vec<i64>, z: i64) -> Self {
        Self { a, z }
    }

    pub fn is_central(&self) -> bool {
        self.a.iter().all(|x| *x == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSpec {
    pub rank: usize,
    pub form: Vec<Vec<i64>>,
    pub generators: Vec<HeisenbergElt>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Determinant by fraction-free elimination.
fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

impl HeisenbergSpec {
    /// Standard symplectic form `⟨a, a'⟩ = Σ a_i a'_{i+k} - a_{i+k} a'_i` with
    /// the unit vectors as generators.
    pub fn standard(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("Heisenberg rank must be positive".into()));
        }
        let n = 2 * rank;
        let mut form = vec![vec![0; n]; n];
        for i in 0..rank {
            form[i][i + rank] = 1;
            form[i + rank][i] = -1;
        }
        let generators = (0..n)
            .map(|i| {
                let mut a = vec![0; n];
                a[i] = 1;
                HeisenbergElt::new(a, 0)
            })
            .collect();
        Ok(Self { rank, form, generators })
    }

    pub fn validate(&self) -> Result<()> {
        let n = 2 * self.rank;
        if self.rank == 0 || self.form.len() != n || self.form.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup(format!("form must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if self.form[i][j] != -self.form[j][i] {
                    return Err(Error::InvalidGroup("form is not antisymmetric".into()));
                }
            }
        }
        if det(&self.form) == 0 {
            return Err(Error::InvalidGroup("form is degenerate".into()));
        }
        if self.generators.is_empty() {
            return Err(Error::InvalidGroup("no generators".into()));
        }
        for g in &self.generators {
            self.check(g)?;
        }
        Ok(())
    }

    fn check(&self, g: &HeisenbergElt) -> Result<()> {
        if g.a.len() != 2 * self.rank {
            return Err(Error::RankMismatch { expected: 2 * self.rank, found: g.a.len() });
        }
        Ok(())
    }

    pub fn pairing(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.form.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                s += a[i] * f * b[j];
            }
        }
        s
    }

    pub fn identity(&self) -> HeisenbergElt {
        HeisenbergElt::new(vec![0; 2 * self.rank], 0)
    }

    pub fn multiply(&self, g: &HeisenbergElt, h: &HeisenbergElt) -> Result<HeisenbergElt> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    fn mul_unchecked(&self, g: &HeisenbergElt, h: &HeisenbergElt) -> HeisenbergElt {
        let a = g.a.iter().zip(&h.a).map(|(x, y)| x + y).collect();
        HeisenbergElt::new(a, g.z + h.z + self.pairing(&g.a, &h.a))
    }

    pub fn invert(&self, g: &HeisenbergElt) -> Result<HeisenbergElt> {
        self.check(g)?;
        Ok(HeisenbergElt::new(g.a.iter().map(|x| -x).collect(), -g.z))
    }

    /// `h g h⁻¹`.
    pub fn conjugate(&self, g: &HeisenbergElt, h: &HeisenbergElt) -> Result<HeisenbergElt> {
        let hg = self.multiply(h, g)?;
        self.multiply(&hg, &self.invert(h)?)
    }

    pub fn pow(&self, g: &HeisenbergElt, n: i64) -> Result<HeisenbergElt> {
        self.check(g)?;
        let base = if n < 0 { self.invert(g)? } else { g.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul_unchecked(&acc, &base);
        }
        Ok(acc)
    }

    /// `g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, g: &HeisenbergElt, h: &HeisenbergElt) -> Result<HeisenbergElt> {
        let gh = self.multiply(g, h)?;
        let gi = self.invert(g)?;
        let hi = self.invert(h)?;
        self.multiply(&self.multiply(&gh, &gi)?, &hi)
    }

    /// Word-metric ball of radius `n` for the generators and their inverses,
    /// with each element's word length.
    pub fn ball(&self, n: usize) -> Result<HashMap<HeisenbergElt, u32>> {
        self.validate()?;
        let mut steps = Vec::new();
        for g in &self.generators {
            steps.push(g.clone());
            steps.push(self.invert(g)?);
        }
        let mut seen = HashMap::new();
        let id = self.identity();
        seen.insert(id.clone(), 0u32);
        let mut frontier = vec![id];
        for layer in 1..=n as u32 {
            let mut next = Vec::new();
            for f in &frontier {
                for s in &steps {
                    let g = self.mul_unchecked(f, s);
                    if !seen.contains_key(&g) {
                        seen.insert(g.clone(), layer);
                        next.push(g);
                    }
                }
            }
            frontier = next;
        }
        Ok(seen)
    }

    /// Membership in the class `{(a₀, z₀ + 2⟨a, a₀⟩) : a ∈ A}` of `g0`.
    fn class_test(&self, g0: &HeisenbergElt) -> Result<impl Fn(&HeisenbergElt) -> bool + '_> {
        self.check(g0)?;
        if g0.is_central() {
            return Err(Error::IdentityClass(format!(
                "({:?}, {}) is central, so its conjugacy class is a singleton",
                g0.a, g0.z
            )));
        }
        // ⟨a, a₀⟩ ranges over the multiples of the gcd of the entries of J a₀.
        let step = (0..2 * self.rank)
            .map(|i| self.form[i].iter().zip(&g0.a).map(|(f, x)| f * x).sum::<i64>())
            .fold(0, gcd)
            * 2;
        let g0 = g0.clone();
        Ok(move |g: &HeisenbergElt| g.a == g0.a && (step == 0 && g.z == g0.z || step != 0 && (g.z - g0.z) % step == 0))
    }

    /// `N_K(m)` for `m = 0..=n`: class elements of word length at most `m`.
    pub fn conj_count_series(&self, g0: &HeisenbergElt, n: usize) -> Result<Vec<u64>> {
        self.validate()?;
        let in_class = self.class_test(g0)?;
        let ball = self.ball(n)?;
        let mut per_layer = vec![0u64; n + 1];
        for (g, len) in &ball {
            if in_class(g) {
                per_layer[*len as usize] += 1;
            }
        }
        let mut acc = 0;
        Ok(per_layer
            .into_iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect())
    }

    pub fn conj_count(&self, g0: &HeisenbergElt, n: usize) -> Result<u64> {
        Ok(*self.conj_count_series(g0, n)?.last().unwrap_or(&0))
    }
}
