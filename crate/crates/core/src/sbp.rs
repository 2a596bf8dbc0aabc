//! Sequential binary partitions.
//!
//! A k-SBP splits a 2^k-ary channel into k ordered binary bit channels, bit
//! channel `i` observing the channel output together with bits `0..i`. This
//! module holds the pieces that are independent of any particular channel:
//! labelings, capacity profiles and their mean/variance, and the index and
//! matrix bookkeeping of product concatenation.

use std::fmt::{self, Display, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::scalar::Scalar;

/// Which family a labeling belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LabelingKind {
    /// Natural binary, least significant bit decoded first.
    SetPartitioning,
    /// Binary-reflected Gray code, least significant bit decoded first.
    Gray,
    Custom(String),
}

impl LabelingKind {
    pub fn name(&self) -> &str {
        match self {
            LabelingKind::SetPartitioning => "sp",
            LabelingKind::Gray => "gray",
            LabelingKind::Custom(name) => name,
        }
    }
}

impl Display for LabelingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bijection between binary labels and constellation point indices.
///
/// A label is packed as `g = sum_i b_i 2^i`; `b_0` is the first decoded bit
/// level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    m: u32,
    kind: LabelingKind,
    label_to_point: Vec<usize>,
    point_to_label: Vec<usize>,
}

impl Labeling {
    /// Custom labeling from a table indexed by packed label.
    pub fn from_table(m: u32, kind: LabelingKind, label_to_point: Vec<usize>) -> Result<Self> {
        check_bits(m)?;
        let size = 1usize << m;
        if label_to_point.len() != size {
            return Err(Error::length("labeling table", size, label_to_point.len()));
        }
        let mut point_to_label = vec![usize::MAX; size];
        for (label, &p) in label_to_point.iter().enumerate() {
            if p >= size || point_to_label[p] != usize::MAX {
                return Err(Error::out_of_range("labeling point", p, "each point exactly once"));
            }
            point_to_label[p] = label;
        }
        Ok(Self {
            m,
            kind,
            label_to_point,
            point_to_label,
        })
    }

    pub fn bits(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> usize {
        self.label_to_point.len()
    }

    pub fn kind(&self) -> &LabelingKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        self.kind.name()
    }

    /// Point index carrying packed label `label`.
    #[inline]
    pub fn point(&self, label: usize) -> usize {
        self.label_to_point[label]
    }

    /// Packed label of point `point`.
    #[inline]
    pub fn label(&self, point: usize) -> usize {
        self.point_to_label[point]
    }

    /// Point index of the bit tuple `[b_0, .., b_{m-1}]`.
    pub fn point_of_bits(&self, bits: &[u8]) -> usize {
        self.point(pack_bits(bits))
    }

    /// Bit tuple `[b_0, .., b_{m-1}]` of a point.
    pub fn bits_of_point(&self, point: usize) -> Vec<u8> {
        let g = self.label(point);
        (0..self.m).map(|i| ((g >> i) & 1) as u8).collect()
    }

    /// Text form: a comment line with the name and order, then `label,point`
    /// rows in label order.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# labeling {} m={}\nlabel,point\n", self.name(), self.m);
        for (g, p) in self.label_to_point.iter().enumerate() {
            let _ = writeln!(out, "{g},{p}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or_else(|| Error::parse(1, "empty labeling"))?;
        let mut parts = head
            .strip_prefix("# labeling ")
            .ok_or_else(|| Error::parse(1, "expected '# labeling <name> m=<m>'"))?
            .split_whitespace();
        let name = parts.next().ok_or_else(|| Error::parse(1, "missing name"))?;
        let m: u32 = parts
            .next()
            .and_then(|s| s.strip_prefix("m="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(1, "missing m=<bits>"))?;
        match lines.next() {
            Some((_, "label,point")) => {}
            _ => return Err(Error::parse(2, "expected header 'label,point'")),
        }
        let mut table = Vec::new();
        for (idx, line) in lines {
            let (g, p) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(idx + 1, "expected 'label,point'"))?;
            let g: usize = g.trim().parse().map_err(|_| Error::parse(idx + 1, "bad label"))?;
            let p: usize = p.trim().parse().map_err(|_| Error::parse(idx + 1, "bad point"))?;
            if g != table.len() {
                return Err(Error::parse(idx + 1, "labels must be listed in order"));
            }
            table.push(p);
        }
        let kind = match name {
            "sp" => LabelingKind::SetPartitioning,
            "gray" => LabelingKind::Gray,
            other => LabelingKind::Custom(other.to_string()),
        };
        Labeling::from_table(m, kind, table)
    }
}

fn check_bits(m: u32) -> Result<()> {
    if (1..=crate::channels::MAX_BITS_PER_SYMBOL).contains(&m) {
        Ok(())
    } else {
        Err(Error::out_of_range("bits per symbol", m, "1..=8"))
    }
}

pub(crate) fn pack_bits(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b & 1) << i))
}

/// Set-partitioning labeling for ASK: natural binary, `p = sum_i b_i 2^i`.
pub fn sp_labeling(m: u32) -> Result<Labeling> {
    check_bits(m)?;
    Labeling::from_table(m, LabelingKind::SetPartitioning, (0..1usize << m).collect())
}

/// Binary-reflected Gray labeling: point `p` carries `g = p ^ (p >> 1)`.
pub fn gray_labeling(m: u32) -> Result<Labeling> {
    check_bits(m)?;
    let size = 1usize << m;
    let mut table = vec![0; size];
    for p in 0..size {
        table[p ^ (p >> 1)] = p;
    }
    Labeling::from_table(m, LabelingKind::Gray, table)
}

/// Looks up `sp` or `gray` by name.
pub fn labeling_by_name(name: &str, m: u32) -> Result<Labeling> {
    match name.to_ascii_lowercase().as_str() {
        "sp" | "set-partitioning" => sp_labeling(m),
        "gray" | "g" => gray_labeling(m),
        other => Err(Error::Config(format!(
            "unknown labeling '{other}' (expected sp or gray)"
        ))),
    }
}

/// Per-bit-channel capacities in decode order, with optional error
/// probabilities and Gaussian LLR means for the same channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityProfile<T> {
    capacities: Vec<T>,
    error_probs: Option<Vec<T>>,
    llr_means: Option<Vec<T>>,
}

impl<T: Scalar> CapacityProfile<T> {
    pub fn new(capacities: Vec<T>) -> Result<Self> {
        for c in &capacities {
            if !(*c >= T::zero() && *c <= T::one()) {
                return Err(Error::out_of_range("bit channel capacity", format!("{c:?}"), "[0, 1]"));
            }
        }
        Ok(Self {
            capacities,
            error_probs: None,
            llr_means: None,
        })
    }

    pub fn with_error_probs(mut self, error_probs: Vec<T>) -> Result<Self> {
        if error_probs.len() != self.capacities.len() {
            return Err(Error::length(
                "error probabilities",
                self.capacities.len(),
                error_probs.len(),
            ));
        }
        for p in &error_probs {
            if !(*p >= T::zero() && *p <= T::one()) {
                return Err(Error::out_of_range("error probability", format!("{p:?}"), "[0, 1]"));
            }
        }
        self.error_probs = Some(error_probs);
        Ok(self)
    }

    pub fn with_llr_means(mut self, llr_means: Vec<T>) -> Result<Self> {
        if llr_means.len() != self.capacities.len() {
            return Err(Error::length("LLR means", self.capacities.len(), llr_means.len()));
        }
        if let Some(bad) = llr_means.iter().find(|m| !(**m >= T::zero())) {
            return Err(Error::out_of_range("LLR mean", format!("{bad:?}"), ">= 0"));
        }
        self.llr_means = Some(llr_means);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    pub fn capacities(&self) -> &[T] {
        &self.capacities
    }

    pub fn error_probs(&self) -> Option<&[T]> {
        self.error_probs.as_deref()
    }

    pub fn llr_means(&self) -> Option<&[T]> {
        self.llr_means.as_deref()
    }

    pub fn mean(&self) -> Result<T> {
        profile_mean(self)
    }

    pub fn variance(&self) -> Result<T> {
        profile_variance(self)
    }

    /// Sum of the capacities (mutual information of the partitioned channel).
    pub fn total(&self) -> T {
        self.capacities.iter().cloned().fold(T::zero(), |a, b| a + b)
    }
}

impl<T: Scalar + Display> CapacityProfile<T> {
    /// CSV rows `index,capacity[,p_e][,llr_mean]` under a header row.
    pub fn to_csv(&self) -> String {
        let mut header = String::from("index,capacity");
        if self.error_probs.is_some() {
            header.push_str(",p_e");
        }
        if self.llr_means.is_some() {
            header.push_str(",llr_mean");
        }
        let mut out = header;
        out.push('\n');
        for (i, c) in self.capacities.iter().enumerate() {
            let _ = write!(out, "{i},{c}");
            if let Some(pe) = &self.error_probs {
                let _ = write!(out, ",{}", pe[i]);
            }
            if let Some(mu) = &self.llr_means {
                let _ = write!(out, ",{}", mu[i]);
            }
            out.push('\n');
        }
        out
    }
}

impl<T: Scalar + FromStr> CapacityProfile<T> {
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty profile"))?;
        let cols: Vec<&str> = header.split(',').collect();
        let has_pe = cols.contains(&"p_e");
        let has_mu = cols.contains(&"llr_mean");
        if cols.first() != Some(&"index") || cols.get(1) != Some(&"capacity") {
            return Err(Error::parse(1, "expected header starting 'index,capacity'"));
        }
        let (mut caps, mut pes, mut mus) = (Vec::new(), Vec::new(), Vec::new());
        for (idx, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::parse(idx + 1, "wrong number of fields"));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<T>()
                    .map_err(|_| Error::parse(idx + 1, format!("bad number '{s}'")))
            };
            let index: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| Error::parse(idx + 1, "bad index"))?;
            if index != caps.len() {
                return Err(Error::parse(idx + 1, "indices must be consecutive from 0"));
            }
            caps.push(parse(fields[1])?);
            let mut next = 2;
            if has_pe {
                pes.push(parse(fields[next])?);
                next += 1;
            }
            if has_mu {
                mus.push(parse(fields[next])?);
            }
        }
        let mut profile = CapacityProfile::new(caps)?;
        if has_pe {
            profile = profile.with_error_probs(pes)?;
        }
        if has_mu {
            profile = profile.with_llr_means(mus)?;
        }
        Ok(profile)
    }
}

/// Arithmetic mean of the bit channel capacities.
pub fn profile_mean<T: Scalar>(profile: &CapacityProfile<T>) -> Result<T> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    Ok(profile.total() / T::from_count(profile.len()))
}

/// Population variance of the bit channel capacities.
///
/// Evaluated as `sum (I - M)^2 / k`, which equals `sum I^2 / k - M^2`
/// exactly in exact arithmetic and cannot go negative in floating point.
pub fn profile_variance<T: Scalar>(profile: &CapacityProfile<T>) -> Result<T> {
    let mean = profile_mean(profile)?;
    let ss = profile.capacities.iter().fold(T::zero(), |acc, c| {
        let d = c.clone() - mean.clone();
        acc + d.clone() * d
    });
    Ok(ss / T::from_count(profile.len()))
}

/// Bit channel index `k2 * i + j` of the product partition.
pub fn product_bit_index(i: usize, j: usize, k1: usize, k2: usize) -> Result<usize> {
    check_product_indices(i, j, k1, k2)?;
    Ok(k2 * i + j)
}

/// Position `i + k1 * j` that the product labeling permutation sends
/// component `k2 * i + j` to.
pub fn product_position(i: usize, j: usize, k1: usize, k2: usize) -> Result<usize> {
    check_product_indices(i, j, k1, k2)?;
    Ok(i + k1 * j)
}

fn check_product_indices(i: usize, j: usize, k1: usize, k2: usize) -> Result<()> {
    if i >= k1 {
        return Err(Error::out_of_range("outer index", i, "0 <= i < k1"));
    }
    if j >= k2 {
        return Err(Error::out_of_range("inner index", j, "0 <= j < k2"));
    }
    Ok(())
}

/// `perm[k2 * i + j] = i + k1 * j` for the product of a k1- and a k2-SBP.
pub fn product_permutation(k1: usize, k2: usize) -> Vec<usize> {
    let mut perm = vec![0; k1 * k2];
    for i in 0..k1 {
        for j in 0..k2 {
            perm[k2 * i + j] = i + k1 * j;
        }
    }
    perm
}

/// The permutation matrix of [`product_permutation`] acting on row vectors.
pub fn product_permutation_matrix(k1: usize, k2: usize) -> BinaryMatrix {
    BinaryMatrix::permutation(&product_permutation(k1, k2)).expect("product permutation is a bijection")
}

/// Variance of a product partition from the outer profile and the variances
/// of the inner partition applied to each outer bit channel.
pub fn compose_variance<T: Scalar>(outer: &CapacityProfile<T>, inner_variances: &[T]) -> Result<T> {
    if inner_variances.len() != outer.len() {
        return Err(Error::length("inner variances", outer.len(), inner_variances.len()));
    }
    let outer_var = profile_variance(outer)?;
    let inner_sum = inner_variances.iter().cloned().fold(T::zero(), |a, b| a + b);
    Ok(outer_var + inner_sum / T::from_count(outer.len()))
}

/// Profile of a product partition: inner profile `i` describes the inner
/// partition of outer bit channel `i`, and its channel `j` lands at index
/// `k2 * i + j`.
pub fn product_profile<T: Scalar>(inner: &[CapacityProfile<T>]) -> Result<CapacityProfile<T>> {
    let k2 = inner.first().map(CapacityProfile::len).ok_or(Error::EmptyProfile)?;
    let mut caps = Vec::with_capacity(k2 * inner.len());
    for p in inner {
        if p.len() != k2 {
            return Err(Error::length("inner profile", k2, p.len()));
        }
        caps.extend_from_slice(p.capacities());
    }
    CapacityProfile::new(caps)
}

/// A k-SBP whose labeling is `b -> b * A` for an invertible binary matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSbp {
    matrix: BinaryMatrix,
}

impl LinearSbp {
    pub fn new(matrix: BinaryMatrix) -> Result<Self> {
        if !matrix.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { matrix })
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn label(&self, bits: &[u8]) -> Result<Vec<u8>> {
        self.matrix.left_mul_vec(bits)
    }

    /// `self ⊗ inner`, with `self` applied first.
    pub fn product(&self, inner: &LinearSbp) -> LinearSbp {
        let matrix =
            linear_product_matrix(&self.matrix, &inner.matrix).expect("product of invertible matrices is invertible");
        LinearSbp { matrix }
    }
}

/// Labeling matrix `P_{k1,k2} (A_inner ⊗ A_outer)` of the product of two
/// linear SBPs, where `k1`/`k2` are the orders of the outer/inner SBP.
pub fn linear_product_matrix(a_outer: &BinaryMatrix, a_inner: &BinaryMatrix) -> Result<BinaryMatrix> {
    if !a_outer.is_invertible() || !a_inner.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let p = product_permutation_matrix(a_outer.rows(), a_inner.rows());
    p.mul(&a_inner.kron(a_outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn prof(v: &[f64]) -> CapacityProfile<f64> {
        CapacityProfile::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sp_small() {
        let l = sp_labeling(2).unwrap();
        assert_eq!(l.point_of_bits(&[0, 0]), 0);
        assert_eq!(l.point_of_bits(&[1, 0]), 1);
        assert_eq!(l.point_of_bits(&[0, 1]), 2);
        assert_eq!(l.point_of_bits(&[1, 1]), 3);
        let l1 = sp_labeling(1).unwrap();
        assert_eq!((l1.point(0), l1.point(1)), (0, 1));
    }

    #[test]
    fn sp_subset_spacing_doubles() {
        let c = crate::channels::ask_constellation::<f64>(2).unwrap();
        let l = sp_labeling(2).unwrap();
        let full = c.point(1) - c.point(0);
        let sub: Vec<f64> = (0..4)
            .filter(|&p| l.bits_of_point(p)[0] == 0)
            .map(|p| c.point(p))
            .collect();
        assert_eq!(sub.len(), 2);
        assert!(((sub[1] - sub[0]) - 2.0 * full).abs() < 1e-12);
    }

    #[test]
    fn gray_small_and_adjacency() {
        let g = gray_labeling(2).unwrap();
        let labels: Vec<usize> = (0..4).map(|p| g.label(p)).collect();
        assert_eq!(labels, vec![0, 1, 3, 2]);
        for m in 1..=8 {
            let g = gray_labeling(m).unwrap();
            for p in 1..g.size() {
                assert_eq!((g.label(p) ^ g.label(p - 1)).count_ones(), 1);
            }
        }
        assert_eq!(
            gray_labeling(1).unwrap().label_to_point,
            sp_labeling(1).unwrap().label_to_point
        );
    }

    #[test]
    fn labelings_are_bijective() {
        for m in 1..=8 {
            for l in [sp_labeling(m).unwrap(), gray_labeling(m).unwrap()] {
                let mut seen = vec![false; l.size()];
                for g in 0..l.size() {
                    let p = l.point(g);
                    assert!(!seen[p]);
                    seen[p] = true;
                    assert_eq!(l.label(p), g);
                }
            }
        }
        assert!(sp_labeling(0).is_err());
        assert!(gray_labeling(9).is_err());
        assert!(Labeling::from_table(2, LabelingKind::Custom("bad".into()), vec![0, 1, 1, 2]).is_err());
    }

    #[test]
    fn labeling_text_round_trip() {
        for l in [gray_labeling(3).unwrap(), sp_labeling(2).unwrap()] {
            let text = l.to_csv();
            let back = Labeling::from_csv(&text).unwrap();
            assert_eq!(back, l);
            assert_eq!(back.to_csv(), text);
        }
    }

    #[test]
    fn mean_and_variance() {
        assert_eq!(prof(&[0.25, 0.75]).mean().unwrap(), 0.5);
        assert_eq!(prof(&[0.0, 1.0]).mean().unwrap(), 0.5);
        assert_eq!(prof(&[0.25, 0.75]).variance().unwrap(), 0.0625);
        assert_eq!(prof(&[0.0, 1.0]).variance().unwrap(), 0.25);
        assert_eq!(prof(&[0.3, 0.3, 0.3]).variance().unwrap(), 0.0);
        let empty = CapacityProfile::<f64>::new(vec![]).unwrap();
        assert!(matches!(profile_mean(&empty), Err(Error::EmptyProfile)));
        assert!(matches!(profile_variance(&empty), Err(Error::EmptyProfile)));
        assert!(CapacityProfile::new(vec![1.5f64]).is_err());
    }

    #[test]
    fn exact_rational_statistics() {
        let r = |n: i64, d: i64| Ratio::new(n, d);
        let p = CapacityProfile::new(vec![r(1, 16), r(7, 16), r(9, 16), r(15, 16)]).unwrap();
        assert_eq!(p.mean().unwrap(), r(1, 2));
        assert_eq!(p.variance().unwrap(), r(25, 256));
    }

    #[test]
    fn product_indexing() {
        assert_eq!(product_permutation(2, 2), vec![0, 2, 1, 3]);
        assert_eq!(product_bit_index(1, 3, 2, 4).unwrap(), 7);
        assert_eq!(product_position(1, 3, 2, 4).unwrap(), 7);
        assert!(product_bit_index(2, 0, 2, 4).is_err());
        assert!(product_position(0, 4, 2, 4).is_err());
        for k1 in 1..=8 {
            for k2 in 1..=8 {
                let a = product_permutation_matrix(k1, k2);
                let b = product_permutation_matrix(k2, k1);
                assert_eq!(a.mul(&b).unwrap(), BinaryMatrix::identity(k1 * k2), "k1={k1} k2={k2}");
            }
        }
    }

    #[test]
    fn compose_variance_cases() {
        // Erasure channel eps = 1/2: one polar step gives [1/4, 3/4]; each
        // child polarized once more has variance 0.03515625.
        let outer = prof(&[0.25, 0.75]);
        let v = compose_variance(&outer, &[0.03515625, 0.03515625]).unwrap();
        assert_eq!(v, 0.09765625);
        assert_eq!(prof(&[0.0625, 0.4375, 0.5625, 0.9375]).variance().unwrap(), 0.09765625);
        assert_eq!(compose_variance(&outer, &[0.0, 0.0]).unwrap(), 0.0625);
        assert_eq!(compose_variance(&prof(&[0.4]), &[0.02]).unwrap(), 0.02);
        assert!(compose_variance(&outer, &[0.0]).is_err());
    }

    #[test]
    fn linear_products() {
        let id = BinaryMatrix::identity(2);
        assert_eq!(
            linear_product_matrix(&id, &id).unwrap(),
            product_permutation_matrix(2, 2)
        );

        let f2 = BinaryMatrix::from_rows(&[[1u8, 0], [1, 1]]).unwrap();
        let got = linear_product_matrix(&f2, &f2).unwrap();
        // expanded by hand: F2 ⊗ F2 = [1000;1100;1010;1111], rows 1 and 2 swapped
        let want = BinaryMatrix::from_rows(&[[1u8, 0, 0, 0], [1, 0, 1, 0], [1, 1, 0, 0], [1, 1, 1, 1]]).unwrap();
        assert_eq!(got, want);
        assert_eq!(got.determinant().unwrap(), 1);

        let singular = BinaryMatrix::from_rows(&[[1u8, 1], [1, 1]]).unwrap();
        assert!(matches!(
            linear_product_matrix(&singular, &f2),
            Err(Error::SingularMatrix)
        ));
        assert!(LinearSbp::new(singular).is_err());
    }

    #[test]
    fn profile_csv_round_trip() {
        let p = prof(&[0.0625, 0.4375])
            .with_error_probs(vec![0.46875, 0.28125])
            .unwrap()
            .with_llr_means(vec![0.1, 2.5])
            .unwrap();
        let text = p.to_csv();
        assert!(text.starts_with("index,capacity,p_e,llr_mean\n0,0.0625,0.46875,0.1\n"));
        let back = CapacityProfile::<f64>::from_csv(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_csv(), text);

        let bare = prof(&[0.5]);
        assert_eq!(CapacityProfile::<f64>::from_csv(&bare.to_csv()).unwrap(), bare);
    }
}
