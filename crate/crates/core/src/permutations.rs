//! Permutations of Bob's message labels, enumerated in reverse lexicographic order.
//!
//! A permutation `σ` is stored as its image array (0-based). Its matrix
//! `Π_σ` has a one at `(i, σ(i))`, so right-multiplying a state by `Π_σ`
//! moves input column `i` to output column `σ(i)`.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Largest supported message size; `8! = 40320` permutations.
pub const MAX_ORDER: usize = 8;

pub(crate) fn check_order(m: usize) -> Result<()> {
    if m > MAX_ORDER {
        Err(Error::Capacity(m))
    } else if m == 0 {
        Err(Error::Contract("message size must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `m!` for `m ≤ 20`.
pub fn factorial(m: usize) -> usize {
    (1..=m).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its 0-based image, checking bijectivity.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(Error::Contract(format!("{image:?} is not a bijection on 0..{n}")));
            }
            seen[j] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).collect() }
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Self { image: inv }
    }

    /// `self` followed by `next`: `i ↦ next(self(i))`. Its matrix is `Π_self · Π_next`.
    pub fn then(&self, next: &Permutation) -> Result<Self> {
        if self.order() != next.order() {
            return Err(Error::Dimension(format!(
                "cannot compose permutations of order {} and {}",
                self.order(),
                next.order()
            )));
        }
        Ok(Self { image: self.image.iter().map(|&j| next.image[j]).collect() })
    }

    /// 1-based image, as printed in tables.
    pub fn one_based(&self) -> Vec<usize> {
        self.image.iter().map(|j| j + 1).collect()
    }
}

/// The dense 0/1 matrix `Π_σ` with `Π_σ[i][σ(i)] = 1`.
pub fn permutation_matrix(sigma: &Permutation) -> Array2<f64> {
    let n = sigma.order();
    let mut m = Array2::zeros((n, n));
    for (i, &j) in sigma.image.iter().enumerate() {
        m[[i, j]] = 1.0;
    }
    m
}

/// Right-multiplies `matrix` by `Π_σ` without materializing it.
pub fn permute_columns(matrix: &Array2<f64>, sigma: &Permutation) -> Result<Array2<f64>> {
    let (rows, cols) = matrix.dim();
    if cols != sigma.order() {
        return Err(Error::Dimension(format!(
            "matrix has {cols} columns but permutation has order {}",
            sigma.order()
        )));
    }
    let mut out = Array2::zeros((rows, cols));
    for r in 0..rows {
        for (i, &j) in sigma.image.iter().enumerate() {
            out[[r, j]] = matrix[[r, i]];
        }
    }
    Ok(out)
}

/// Steps to the lexicographically previous arrangement; false when already smallest.
fn prev_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] <= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] >= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All `m!` permutations of order `m` in descending lexicographic order of image tuples.
///
/// Row `k` is the permutation bound to weight index `k`; the last row is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTable {
    order: usize,
    rows: Vec<Permutation>,
}

impl PermutationTable {
    pub fn reverse_lex(m: usize) -> Result<Self> {
        check_order(m)?;
        let mut current: Vec<usize> = (0..m).rev().collect();
        let mut rows = Vec::with_capacity(factorial(m));
        loop {
            rows.push(Permutation { image: current.clone() });
            if !prev_permutation(&mut current) {
                break;
            }
        }
        Ok(Self { order: m, rows })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Permutation> {
        self.rows.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Permutation> {
        self.rows.iter()
    }

    pub fn identity_index(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn index_of(&self, sigma: &Permutation) -> Option<usize> {
        self.rows.iter().position(|p| p == sigma)
    }
}

/// Convenience alias for [`PermutationTable::reverse_lex`].
pub fn enumerate_reverse_lex(m: usize) -> Result<PermutationTable> {
    PermutationTable::reverse_lex(m)
}
