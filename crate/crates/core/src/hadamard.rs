//! Element-wise (Hadamard) tensor arithmetic and the Shannon measures built on it.
//!
//! All logarithms are base 2, so every information quantity is in bits. The
//! conventions `0 · log 0 = 0` and `0 / 0 = flagged-zero` hold throughout: a
//! flagged entry is represented as `None` in a [`Flagged`] tensor and
//! contributes nothing to a Hadamard sum.

use ndarray::{Array, Array1, Array2, ArrayBase, Axis, Data, Dimension, Zip};

use crate::error::{Error, Result};

/// Tolerance on `sum == 1` for probability vectors and joint states.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance for identities between information measures.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Threshold on conditional entropies for conditional purity.
pub const PURITY_TOL: f64 = 1e-10;

/// A tensor whose entries may carry the flagged-zero marker (`None`).
pub type Flagged<D> = Array<Option<f64>, D>;

fn check_shape(a: &[usize], b: &[usize]) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("shapes {a:?} and {b:?} differ")));
    }
    Ok(())
}

/// Element-wise product `a ∘ b`.
pub fn hadamard_product<S, T, D>(a: &ArrayBase<S, D>, b: &ArrayBase<T, D>) -> Result<Array<f64, D>>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
    D: Dimension,
{
    check_shape(a.shape(), b.shape())?;
    Ok(Zip::from(a).and(b).map_collect(|&x, &y| x * y))
}

/// Sum over all elements of the Hadamard product, `a ⊙ b`.
pub fn hadamard_sum<S, T, D>(a: &ArrayBase<S, D>, b: &ArrayBase<T, D>) -> Result<f64>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
    D: Dimension,
{
    check_shape(a.shape(), b.shape())?;
    let mut acc = 0.0;
    Zip::from(a).and(b).for_each(|&x, &y| acc += x * y);
    Ok(acc)
}

/// `a ⊙ b` where `b` may hold flagged entries; flagged positions contribute 0.
pub fn hadamard_sum_flagged<S, D>(a: &ArrayBase<S, D>, b: &Flagged<D>) -> Result<f64>
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    check_shape(a.shape(), b.shape())?;
    let mut acc = 0.0;
    Zip::from(a).and(b).for_each(|&x, y| {
        if let Some(y) = y {
            acc += x * y;
        }
    });
    Ok(acc)
}

/// Element-wise base-2 logarithm. Zero entries become flagged-zero.
pub fn hadamard_log<S, D>(a: &ArrayBase<S, D>) -> Result<Flagged<D>>
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    if let Some(bad) = a.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::Domain(format!("logarithm of negative entry {bad}")));
    }
    Ok(a.mapv(|x| if x == 0.0 { None } else { Some(x.log2()) }))
}

/// Element-wise base-2 logarithm of an already-flagged tensor; flags propagate.
pub fn hadamard_log_flagged<D: Dimension>(a: &Flagged<D>) -> Result<Flagged<D>> {
    let mut out = a.clone();
    for x in out.iter_mut() {
        match *x {
            Some(v) if v < 0.0 || v.is_nan() => {
                return Err(Error::Domain(format!("logarithm of negative entry {v}")))
            }
            Some(0.0) => *x = None,
            Some(v) => *x = Some(v.log2()),
            None => {}
        }
    }
    Ok(out)
}

fn divide_entry(index: usize, num: f64, den: f64) -> Result<Option<f64>> {
    if den == 0.0 {
        if num == 0.0 {
            Ok(None)
        } else {
            Err(Error::Division { index, numerator: num })
        }
    } else {
        Ok(Some(num / den))
    }
}

/// Element-wise quotient `a ⊘ b` of equal-shaped tensors.
pub fn hadamard_divide<S, T, D>(a: &ArrayBase<S, D>, b: &ArrayBase<T, D>) -> Result<Flagged<D>>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
    D: Dimension,
{
    check_shape(a.shape(), b.shape())?;
    let mut out = Array::from_elem(a.raw_dim(), None);
    for (i, ((o, &x), &y)) in out.iter_mut().zip(a.iter()).zip(b.iter()).enumerate() {
        *o = divide_entry(i, x, y)?;
    }
    Ok(out)
}

/// Which axis of a matrix a broadcast divisor runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Broadcast {
    /// `out[i][j] = a[i][j] / b[j]`: each column divided by its entry (conditioning on Bob).
    Columns,
    /// `out[i][j] = a[i][j] / b[i]`: each row divided by its entry (conditioning on Alice).
    Rows,
}

/// Broadcast quotient of a matrix by a vector.
pub fn hadamard_divide_broadcast<S, T>(
    a: &ArrayBase<S, ndarray::Ix2>,
    b: &ArrayBase<T, ndarray::Ix1>,
    along: Broadcast,
) -> Result<Flagged<ndarray::Ix2>>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
{
    let (rows, cols) = a.dim();
    let expected = match along {
        Broadcast::Columns => cols,
        Broadcast::Rows => rows,
    };
    if b.len() != expected {
        return Err(Error::Dimension(format!(
            "divisor of length {} cannot broadcast over {rows}x{cols} matrix ({along:?})",
            b.len()
        )));
    }
    let mut out = Array2::from_elem((rows, cols), None);
    for ((i, j), o) in out.indexed_iter_mut() {
        let den = match along {
            Broadcast::Columns => b[j],
            Broadcast::Rows => b[i],
        };
        *o = divide_entry(i * cols + j, a[[i, j]], den)?;
    }
    Ok(out)
}

/// Sum of absolute entries.
pub fn one_norm<S: Data<Elem = f64>, D: Dimension>(a: &ArrayBase<S, D>) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

/// Euclidean (Frobenius) norm. Not used for normalization; probabilities use [`one_norm`].
pub fn two_norm<S: Data<Elem = f64>, D: Dimension>(a: &ArrayBase<S, D>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn validate_probabilities(entries: &[f64]) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::Contract("empty distribution".into()));
    }
    if let Some(bad) = entries.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::Contract(format!("entry {bad} is not a nonnegative finite number")));
    }
    let total: f64 = entries.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Contract(format!("entries sum to {total}, not 1")));
    }
    Ok(())
}

/// `-Σ x log₂ x` with `0 log 0 = 0`. No normalization check.
#[inline]
pub(crate) fn neg_xlogx_sum(entries: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &x in entries {
        if x > 0.0 {
            acc -= x * x.log2();
        }
    }
    acc
}

/// A normalized probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Array1<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        validate_probabilities(&entries)?;
        Ok(Self(Array1::from(entries)))
    }

    /// Divides by the one-norm first.
    pub fn normalized(entries: Vec<f64>) -> Result<Self> {
        let total: f64 = entries.iter().sum();
        if !(total > 0.0) || entries.iter().any(|x| *x < 0.0) {
            return Err(Error::Degenerate(format!(
                "cannot normalize vector with sum {total} or negative entries"
            )));
        }
        Self::new(entries.into_iter().map(|x| x / total).collect())
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Contract("empty distribution".into()));
        }
        Ok(Self(Array1::from_elem(len, 1.0 / len as f64)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice().expect("standard layout")
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0.to_vec()
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.0).expect("validated at construction")
    }
}

/// A definite message: a unit vector `δ_m` of length `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Versor {
    pub index: usize,
    pub len: usize,
}

impl Versor {
    pub fn new(index: usize, len: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::Dimension(format!("versor index {index} out of range for length {len}")));
        }
        Ok(Self { index, len })
    }

    pub fn to_prob_vector(self) -> ProbVector {
        let mut v = Array1::zeros(self.len);
        v[self.index] = 1.0;
        ProbVector(v)
    }
}

/// The joint message distribution shared by Alice (rows) and Bob (columns).
///
/// Always square (`M^A = M^B`), nonnegative, and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState(Array2<f64>);

impl JointState {
    pub fn new(matrix: Array2<f64>) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c {
            return Err(Error::Dimension(format!("joint state must be square, got {r}x{c}")));
        }
        let matrix = matrix.as_standard_layout().into_owned();
        validate_probabilities(matrix.as_slice().expect("standard layout"))?;
        Ok(Self(matrix))
    }

    /// Divides by the total sum first.
    pub fn normalized(matrix: Array2<f64>) -> Result<Self> {
        let total = matrix.sum();
        if !(total > 0.0) || matrix.iter().any(|x| *x < 0.0) {
            return Err(Error::Degenerate(format!(
                "cannot normalize matrix with sum {total} or negative entries"
            )));
        }
        Self::new(matrix / total)
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("joint state rows must form a square matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(Array2::from_shape_vec((n, n), flat).expect("shape checked"))
    }

    /// Bipartite versor `δ_{mm'}`.
    pub fn versor(n: usize, row: usize, col: usize) -> Result<Self> {
        if row >= n || col >= n {
            return Err(Error::Dimension(format!("versor ({row},{col}) out of range for size {n}")));
        }
        let mut m = Array2::zeros((n, n));
        m[[row, col]] = 1.0;
        Ok(Self(m))
    }

    /// Outer product of two marginals; has zero mutual information.
    pub fn product(alice: &ProbVector, bob: &ProbVector) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(Error::Dimension("product marginals must have equal length".into()));
        }
        let a = alice.as_array();
        let b = bob.as_array();
        let m = Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j]);
        Self::new(m)
    }

    /// Number of messages per party.
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice().expect("standard layout")
    }

    pub fn into_array(self) -> Array2<f64> {
        self.0
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.0).expect("validated at construction")
    }
}

/// Shannon entropy `H(p) = −p ⊙ log₂ p` in bits of any normalized tensor.
pub fn entropy_of<S: Data<Elem = f64>, D: Dimension>(p: &ArrayBase<S, D>) -> Result<f64> {
    let flat: Vec<f64> = p.iter().copied().collect();
    validate_probabilities(&flat)?;
    let logs = hadamard_log(p)?;
    // Subtracting from +0 keeps definite distributions at +0 rather than −0.
    Ok(0.0 - hadamard_sum_flagged(p, &logs)?)
}

/// Alice's marginal (row sums).
pub fn marginal_a(p: &JointState) -> ProbVector {
    ProbVector(p.0.sum_axis(Axis(1)))
}

/// Bob's marginal (column sums).
pub fn marginal_b(p: &JointState) -> ProbVector {
    ProbVector(p.0.sum_axis(Axis(0)))
}

/// Alice conditioned on Bob, `p^{A|B} = p^{AB} ⊘ p^B` (columns normalized).
pub fn conditional_a_given_b(p: &JointState) -> Flagged<ndarray::Ix2> {
    hadamard_divide_broadcast(&p.0, marginal_b(p).as_array(), Broadcast::Columns)
        .expect("a zero marginal forces a zero column")
}

/// Bob conditioned on Alice, `p^{B|A} = p^{AB} ⊘ p^A` (rows normalized).
pub fn conditional_b_given_a(p: &JointState) -> Flagged<ndarray::Ix2> {
    hadamard_divide_broadcast(&p.0, marginal_a(p).as_array(), Broadcast::Rows)
        .expect("a zero marginal forces a zero row")
}

/// `H(A|B) = −Σ p_{mm'} log₂(p_{mm'} / p^B_{m'}) = H(AB) − H(B)`.
pub fn conditional_entropy_a_given_b(p: &JointState) -> f64 {
    let cond = conditional_a_given_b(p);
    let logs = hadamard_log_flagged(&cond).expect("conditionals are nonnegative");
    let h = -hadamard_sum_flagged(&p.0, &logs).expect("same shape");
    h.max(0.0)
}

/// `H(B|A) = H(AB) − H(A)`.
pub fn conditional_entropy_b_given_a(p: &JointState) -> f64 {
    let cond = conditional_b_given_a(p);
    let logs = hadamard_log_flagged(&cond).expect("conditionals are nonnegative");
    let h = -hadamard_sum_flagged(&p.0, &logs).expect("same shape");
    h.max(0.0)
}

/// `I = H(A) + H(B) − H(AB)` in bits.
pub fn mutual_information(p: &JointState) -> f64 {
    mutual_information_slice(p.as_slice(), p.size())
}

/// The Hadamard form `p ⊙ log₂(p ⊘ p^A ⊘ p^B)`, an independent route to [`mutual_information`].
pub fn mutual_information_hadamard(p: &JointState) -> f64 {
    let pa = marginal_a(p);
    let pb = marginal_b(p);
    let outer = Array2::from_shape_fn(p.0.dim(), |(i, j)| pa.0[i] * pb.0[j]);
    let ratio = hadamard_divide(&p.0, &outer).expect("zero marginals force zero entries");
    let logs = hadamard_log_flagged(&ratio).expect("ratios are nonnegative");
    hadamard_sum_flagged(&p.0, &logs).expect("same shape")
}

/// `J = H(A) − H(A|B)`.
pub fn alternative_mutual_information(p: &JointState) -> f64 {
    marginal_a(p).entropy() - conditional_entropy_a_given_b(p)
}

/// Mutual information of a row-major `n × n` joint distribution.
#[inline]
pub(crate) fn mutual_information_slice(p: &[f64], n: usize) -> f64 {
    debug_assert_eq!(p.len(), n * n);
    if n > 8 {
        let m = ndarray::ArrayView2::from_shape((n, n), p).expect("square");
        let rows = m.sum_axis(Axis(1));
        let cols = m.sum_axis(Axis(0));
        return neg_xlogx_sum(rows.as_slice().unwrap()) + neg_xlogx_sum(cols.as_slice().unwrap())
            - neg_xlogx_sum(p);
    }
    let mut rows = [0.0f64; 8];
    let mut cols = [0.0f64; 8];
    for i in 0..n {
        for j in 0..n {
            let x = p[i * n + j];
            rows[i] += x;
            cols[j] += x;
        }
    }
    neg_xlogx_sum(&rows[..n]) + neg_xlogx_sum(&cols[..n]) - neg_xlogx_sum(p)
}

/// Total-variation distance `½ Σ |p_i − q_i|`.
pub fn tv_distance(p: &JointState, q: &JointState) -> Result<f64> {
    if p.0.dim() != q.0.dim() {
        return Err(Error::Dimension(format!(
            "cannot compare states of shapes {:?} and {:?}",
            p.0.dim(),
            q.0.dim()
        )));
    }
    Ok(tv_slice(p.as_slice(), q.as_slice()))
}

#[inline]
pub(crate) fn tv_slice(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// True iff every row and every column holds at most one nonzero entry.
pub fn is_conditionally_pure(p: &JointState) -> bool {
    let nonzero_rows = p.0.rows().into_iter().all(|r| r.iter().filter(|x| **x > 0.0).count() <= 1);
    let nonzero_cols = p.0.columns().into_iter().all(|c| c.iter().filter(|x| **x > 0.0).count() <= 1);
    nonzero_rows && nonzero_cols
}
