//! Exact Gaussian matrix-moment oracle.
//!
//! A moment word is a product of factors X = ξξᵀ (ξ ~ N(0, C)) and the
//! constant C. Expanding the expectation entrywise over pair partitions of
//! the Gaussian factors classifies every pairing by a graph on the word's
//! slot boundaries 0..p: letter j spans boundary (j−1, j); a C letter
//! contributes the fixed edge (j−1, j); an X letter contributes one free
//! endpoint at boundary j−1 and one at boundary j, which the pairing joins
//! into edges. Boundaries 0 and p have degree 1 and every interior boundary
//! has degree 2, so the edge multigraph always splits into exactly one path
//! from 0 to p — a chain of length c, worth C^c — and disjoint cycles —
//! loops of length l, each worth tr(C^l). Self-edges are 1-cycles worth
//! tr(C).
//!
//! Everything here is exact integer combinatorics on top of that model; the
//! entrywise brute-force expansion (`numeric_word_moment`) is kept as an
//! independent cross-check of the symbolic route.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectra::{symmetric_eigenvalues, CovarianceMatrix};

/// Hard cap on pairing endpoints: (15)!! = 2,027,025 matchings is the most
/// the enumeration will materialize or walk.
pub const MAX_ENDPOINTS: usize = 16;

/// Hard cap on word length for the symbolic machinery.
pub const MAX_WORD_LEN: usize = 8;

/// Work guard for the brute-force numeric expansion.
pub const NUMERIC_WORK_LIMIT: f64 = 1e7;

/// Relative slack allowed below zero in the PSD dominance check.
pub const PSD_DOMINANCE_TOL: f64 = 1e-8;

/// One factor of a moment word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    /// The random factor ξξᵀ.
    X,
    /// The constant factor C.
    C,
}

/// Ordered product of X and C factors, length ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Domain("word must have length >= 1".into()));
        }
        Ok(Word { letters })
    }

    /// Parse a word like "XCX".
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch {
                'X' | 'x' => Ok(Letter::X),
                'C' | 'c' => Ok(Letter::C),
                other => Err(Error::Parse(format!("invalid word letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }

    pub fn repeated_x(p: usize) -> Result<Self> {
        Word::new(vec![Letter::X; p])
    }

    /// Word of length p whose C positions are the set bits of `mask`
    /// (bit j = letter j+1).
    fn from_mask(p: usize, mask: u32) -> Word {
        let letters = (0..p)
            .map(|j| {
                if mask >> j & 1 == 1 {
                    Letter::C
                } else {
                    Letter::X
                }
            })
            .collect();
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Number of C letters (k).
    pub fn c_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::C).count()
    }

    /// Number of Gaussian endpoints, 2·(number of X letters).
    pub fn endpoint_count(&self) -> usize {
        2 * (self.len() - self.c_count())
    }

    /// Boundary node of each Gaussian endpoint (in left-to-right order) and
    /// the fixed edges contributed by C letters.
    fn layout(&self) -> (Vec<usize>, Vec<(usize, usize)>) {
        let mut endpoints = Vec::with_capacity(self.endpoint_count());
        let mut fixed = Vec::new();
        for (j, &letter) in self.letters.iter().enumerate() {
            match letter {
                Letter::X => {
                    endpoints.push(j);
                    endpoints.push(j + 1);
                }
                Letter::C => fixed.push((j, j + 1)),
            }
        }
        (endpoints, fixed)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &l in &self.letters {
            f.write_str(if l == Letter::X { "X" } else { "C" })?;
        }
        Ok(())
    }
}

/// A perfect matching of endpoints 0..m−1, as (a, b) pairs with a < b.
/// Endpoint indices fit in u8 under the `MAX_ENDPOINTS` guard.
pub type Matching = Vec<(u8, u8)>;

fn check_endpoint_count(m: usize) -> Result<()> {
    if !m.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "perfect matchings need an even point count, got {m}"
        )));
    }
    if m > MAX_ENDPOINTS {
        return Err(Error::SizeLimit(format!(
            "{m} endpoints exceeds the {MAX_ENDPOINTS}-endpoint enumeration cap"
        )));
    }
    Ok(())
}

/// Visit every perfect matching of {0..m−1} without materializing the list.
/// m = 0 visits the single empty matching, matching the (−1)!! = 1
/// convention.
fn for_each_pairing<F: FnMut(&[(u8, u8)])>(m: usize, f: &mut F) {
    debug_assert!(m.is_multiple_of(2) && m <= MAX_ENDPOINTS);
    let full: u16 = if m == 16 { u16::MAX } else { (1u16 << m) - 1 };
    let mut pairs: Matching = Vec::with_capacity(m / 2);
    recurse(full, &mut pairs, f);

    fn recurse<F: FnMut(&[(u8, u8)])>(mask: u16, pairs: &mut Matching, f: &mut F) {
        if mask == 0 {
            f(pairs);
            return;
        }
        let a = mask.trailing_zeros() as u8;
        let rest = mask & !(1 << a);
        let mut candidates = rest;
        while candidates != 0 {
            let b = candidates.trailing_zeros() as u8;
            candidates &= !(1 << b);
            pairs.push((a, b));
            recurse(rest & !(1 << b), pairs, f);
            pairs.pop();
        }
    }
}

/// All perfect matchings of {0..m−1}; exactly (m−1)!! of them.
pub fn pairings(m: usize) -> Result<Vec<Matching>> {
    check_endpoint_count(m)?;
    let mut out = Vec::new();
    for_each_pairing(m, &mut |pairs| out.push(pairs.to_vec()));
    Ok(out)
}

/// Scalar Gaussian moment E[ξ_{idx[0]} ⋯ ξ_{idx[m−1]}] by summing the
/// covariance products over all pairings. Odd orders are 0 without
/// enumeration.
pub fn gaussian_scalar_moment(idx: &[usize], c: &CovarianceMatrix) -> Result<f64> {
    let d = c.dim();
    if let Some(&bad) = idx.iter().find(|&&i| i >= d) {
        return Err(Error::Domain(format!(
            "component index {bad} out of range for dimension {d}"
        )));
    }
    if !idx.len().is_multiple_of(2) {
        return Ok(0.0);
    }
    check_endpoint_count(idx.len())?;
    Ok(scalar_pairing_sum(idx, c.matrix()))
}

fn scalar_pairing_sum(idx: &[usize], c: &Matrix) -> f64 {
    let mut total = 0.0;
    for_each_pairing(idx.len(), &mut |pairs| {
        let mut prod = 1.0;
        for &(a, b) in pairs {
            prod *= c[(idx[a as usize], idx[b as usize])];
        }
        total += prod;
    });
    total
}

/// Chain length and sorted loop lengths of the boundary multigraph formed by
/// the word's C edges plus one edge per matched endpoint pair.
pub fn chain_loop_decompose(w: &Word, matching: &Matching) -> Result<(usize, Vec<usize>)> {
    let (endpoints, fixed) = w.layout();
    let m = endpoints.len();
    // Validate: the matching must cover each endpoint exactly once.
    if matching.len() * 2 != m {
        return Err(Error::Domain(format!(
            "matching has {} pairs, word needs {}",
            matching.len(),
            m / 2
        )));
    }
    let mut seen = vec![false; m];
    for &(a, b) in matching {
        let (a, b) = (a as usize, b as usize);
        if a >= m || b >= m || a == b || seen[a] || seen[b] {
            return Err(Error::Domain(
                "matching is not a perfect matching of the word's endpoints".into(),
            ));
        }
        seen[a] = true;
        seen[b] = true;
    }

    let mut edges = fixed;
    edges.extend(
        matching
            .iter()
            .map(|&(a, b)| (endpoints[a as usize], endpoints[b as usize])),
    );
    Ok(decompose_edges(w.len(), &edges))
}

fn decompose_edges(p: usize, edges: &[(usize, usize)]) -> (usize, Vec<usize>) {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(2); p + 1];
    for (id, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((id, v));
        adj[v].push((id, u));
    }
    let mut used = vec![false; edges.len()];

    // Path from boundary 0 to boundary p; both have degree 1, interiors 2.
    let mut chain = 0;
    let mut cur = 0;
    while cur != p {
        let &(id, next) = adj[cur]
            .iter()
            .find(|&&(id, _)| !used[id])
            .expect("matching degrees guarantee a 0..p path");
        used[id] = true;
        chain += 1;
        cur = next;
    }

    // Remaining edges close into cycles; a self-edge is a 1-cycle.
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (anchor, mut cur) = edges[start];
        let mut len = 1;
        while cur != anchor {
            let &(id, next) = adj[cur]
                .iter()
                .find(|&&(id, _)| !used[id])
                .expect("leftover edges form closed cycles");
            used[id] = true;
            len += 1;
            cur = next;
        }
        loops.push(len);
    }
    loops.sort_unstable();
    (chain, loops)
}

/// One symbolic term coeff · C^chain · ∏ⱼ tr(C^{loops[j]}).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentTerm {
    pub coeff: i64,
    pub chain: usize,
    /// Ascending loop lengths.
    pub loops: Vec<usize>,
}

/// Integer-coefficient expansion of a Gaussian matrix moment. Terms are kept
/// in canonical order: chain length descending, then loops lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolicMoment {
    terms: Vec<MomentTerm>,
}

impl SymbolicMoment {
    /// Build from (coeff, chain, loops) triples: loops are sorted, like terms
    /// merged, zero coefficients dropped, canonical order applied.
    pub fn from_terms<I: IntoIterator<Item = (i64, usize, Vec<usize>)>>(terms: I) -> Self {
        let mut map: std::collections::BTreeMap<(usize, Vec<usize>), i64> =
            std::collections::BTreeMap::new();
        for (coeff, chain, mut loops) in terms {
            loops.sort_unstable();
            *map.entry((chain, loops)).or_insert(0) += coeff;
        }
        let mut terms: Vec<MomentTerm> = map
            .into_iter()
            .filter(|&(_, coeff)| coeff != 0)
            .map(|((chain, loops), coeff)| MomentTerm {
                coeff,
                chain,
                loops,
            })
            .collect();
        terms.sort_by(|a, b| b.chain.cmp(&a.chain).then_with(|| a.loops.cmp(&b.loops)));
        SymbolicMoment { terms }
    }

    pub fn zero() -> Self {
        SymbolicMoment { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[MomentTerm] {
        &self.terms
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.terms.iter().map(|t| t.coeff).sum()
    }

    /// Every term of a degree-p moment satisfies chain + Σ loops = p.
    pub fn degree_conserved(&self, p: usize) -> bool {
        self.terms
            .iter()
            .all(|t| t.chain + t.loops.iter().sum::<usize>() == p)
    }

    pub fn negate(mut self) -> Self {
        for t in &mut self.terms {
            t.coeff = -t.coeff;
        }
        self
    }
}

fn check_word_len(p: usize) -> Result<()> {
    if p > MAX_WORD_LEN {
        return Err(Error::SizeLimit(format!(
            "word length {p} exceeds the symbolic cap of {MAX_WORD_LEN}"
        )));
    }
    Ok(())
}

/// Exact symbolic expectation of a word: the sum over all pairings of the
/// chain/loop decomposition, like terms merged.
pub fn symbolic_word_moment(w: &Word) -> Result<SymbolicMoment> {
    check_word_len(w.len())?;
    let (endpoints, fixed) = w.layout();
    let p = w.len();
    let mut map: std::collections::BTreeMap<(usize, Vec<usize>), i64> =
        std::collections::BTreeMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(p);
    for_each_pairing(endpoints.len(), &mut |pairs| {
        edges.clear();
        edges.extend_from_slice(&fixed);
        edges.extend(
            pairs
                .iter()
                .map(|&(a, b)| (endpoints[a as usize], endpoints[b as usize])),
        );
        let (chain, loops) = decompose_edges(p, &edges);
        *map.entry((chain, loops)).or_insert(0) += 1;
    });
    Ok(SymbolicMoment::from_terms(
        map.into_iter().map(|((c, l), n)| (n, c, l)),
    ))
}

/// Brute-force entrywise expectation of a word: for each external index pair,
/// sum over all internal indices and all pairings of the Gaussian factors.
/// Independent of the symbolic route; serves as its oracle.
pub fn numeric_word_moment(w: &Word, c: &CovarianceMatrix) -> Result<Matrix> {
    let d = c.dim();
    let p = w.len();
    let k = w.c_count();
    let gauss_order = 2 * (p - k);
    check_endpoint_count(gauss_order)?;
    let work = (d as f64).powi(p as i32 - 1) * double_factorial(gauss_order as i64 - 1) as f64;
    if work > NUMERIC_WORK_LIMIT {
        return Err(Error::SizeLimit(format!(
            "numeric expansion needs ~{work:.1e} pairing evaluations (cap {NUMERIC_WORK_LIMIT:.0e})"
        )));
    }

    let cm = c.matrix();
    let letters = w.letters();
    let mut out = Matrix::zeros(d);
    let mut slots = vec![0usize; p + 1];
    let mut gauss = Vec::with_capacity(gauss_order);
    for a in 0..d {
        slots[0] = a;
        for b in 0..d {
            slots[p] = b;
            let mut total = 0.0;
            // Odometer over the p−1 internal indices.
            let mut internal = vec![0usize; p.saturating_sub(1)];
            loop {
                for (i, &v) in internal.iter().enumerate() {
                    slots[i + 1] = v;
                }
                let mut cprod = 1.0;
                gauss.clear();
                for (j, &letter) in letters.iter().enumerate() {
                    match letter {
                        Letter::X => {
                            gauss.push(slots[j]);
                            gauss.push(slots[j + 1]);
                        }
                        Letter::C => cprod *= cm[(slots[j], slots[j + 1])],
                    }
                }
                if cprod != 0.0 {
                    total += cprod * scalar_pairing_sum(&gauss, cm);
                }
                // Advance the odometer.
                let mut pos = 0;
                loop {
                    if pos == internal.len() {
                        break;
                    }
                    internal[pos] += 1;
                    if internal[pos] < d {
                        break;
                    }
                    internal[pos] = 0;
                    pos += 1;
                }
                if pos == internal.len() {
                    break;
                }
            }
            out[(a, b)] = total;
        }
    }
    Ok(out)
}

/// Evaluate Σ coeff·C^chain·∏ tr(C^l) on a concrete matrix.
pub fn evaluate_symbolic(sm: &SymbolicMoment, c: &CovarianceMatrix) -> Matrix {
    let d = c.dim();
    let max_pow = sm
        .terms()
        .iter()
        .map(|t| t.chain.max(t.loops.last().copied().unwrap_or(0)))
        .max()
        .unwrap_or(0);
    let mut powers = Vec::with_capacity(max_pow + 1);
    powers.push(Matrix::identity(d));
    for k in 1..=max_pow {
        let next = powers[k - 1].matmul(c.matrix());
        powers.push(next);
    }
    let traces: Vec<f64> = powers.iter().map(Matrix::trace).collect();

    let mut out = Matrix::zeros(d);
    for t in sm.terms() {
        let mut w = t.coeff as f64;
        for &l in &t.loops {
            w *= traces[l];
        }
        out = out.add(&powers[t.chain].scale(w));
    }
    out
}

/// Which side the centering subtracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CenterSign {
    /// E[(X − C)^p].
    Plus,
    /// E[(C − X)^p].
    Minus,
}

/// Symbolic E[(X−C)^p] (PLUS) or E[(C−X)^p] (MINUS), expanded over all 2^p
/// ordered words — matrix products do not commute, so words are enumerated
/// individually rather than collected into binomial coefficients.
pub fn centered_moment(p: usize, sign: CenterSign) -> Result<SymbolicMoment> {
    if p < 2 {
        return Err(Error::Domain(format!(
            "centered moments need p >= 2, got {p}"
        )));
    }
    check_word_len(p)?;
    let mut acc: Vec<(i64, usize, Vec<usize>)> = Vec::new();
    for mask in 0..(1u32 << p) {
        let word = Word::from_mask(p, mask);
        let k = mask.count_ones() as usize;
        let flips = match sign {
            CenterSign::Plus => k,
            CenterSign::Minus => p - k,
        };
        let s: i64 = if flips % 2 == 0 { 1 } else { -1 };
        let sm = symbolic_word_moment(&word)?;
        acc.extend(
            sm.terms()
                .iter()
                .map(|t| (s * t.coeff, t.chain, t.loops.clone())),
        );
    }
    Ok(SymbolicMoment::from_terms(acc))
}

/// Which moment the dominance certificate covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MomentKind {
    /// E[X^p] against (p!/2)·B^{p−2}·(tr(C)C + 2C²).
    Raw,
    /// E[(X−C)^p] against (p!/2)·B^{p−2}·Σ₂.
    Centered,
    /// E[(C−X)^p] against (p!/2)·B^{p−2}·Σ₂.
    NegCentered,
}

impl std::fmt::Display for MomentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MomentKind::Raw => "RAW",
            MomentKind::Centered => "CENTERED",
            MomentKind::NegCentered => "NEG_CENTERED",
        })
    }
}

/// Outcome of one PSD dominance check at moment order p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdCertificate {
    pub p: usize,
    pub kind: MomentKind,
    /// Smallest eigenvalue of dominator − moment, symmetrized.
    pub min_eig_of_slack: f64,
    /// Spectral norm of the dominating matrix; the pass threshold is
    /// −`PSD_DOMINANCE_TOL` times this.
    pub dominator_norm: f64,
    pub pass: bool,
}

/// Check the moment-dominance inequality at order p on a concrete C with
/// B = 2·tr(C): the dominating matrix is (p!/2)·B^{p−2}·(tr(C)C + 2C²) for
/// RAW and (p!/2)·B^{p−2}·(tr(C)C + C²) for the centered kinds.
pub fn verify_bernstein(
    p: usize,
    c: &CovarianceMatrix,
    kind: MomentKind,
) -> Result<PsdCertificate> {
    if !(2..=MAX_WORD_LEN).contains(&p) {
        return Err(Error::Domain(format!(
            "verify_bernstein supports p in 2..={MAX_WORD_LEN}, got {p}"
        )));
    }
    let tr = c.trace();
    if tr <= 0.0 {
        return Err(Error::Domain(
            "verify_bernstein requires a nonzero covariance matrix".into(),
        ));
    }
    let b = 2.0 * tr;
    let c2 = c.matrix().matmul(c.matrix());

    let moment = match kind {
        MomentKind::Raw => symbolic_word_moment(&Word::repeated_x(p)?)?,
        MomentKind::Centered => centered_moment(p, CenterSign::Plus)?,
        MomentKind::NegCentered => centered_moment(p, CenterSign::Minus)?,
    };
    let moment_mat = evaluate_symbolic(&moment, c);

    let base = match kind {
        MomentKind::Raw => c.matrix().scale(tr).add(&c2.scale(2.0)),
        MomentKind::Centered | MomentKind::NegCentered => c.matrix().scale(tr).add(&c2),
    };
    let scale = factorial(p) as f64 / 2.0 * b.powi(p as i32 - 2);
    let dominator = base.scale(scale);

    let slack = dominator.sub(&moment_mat).symmetrized();
    let slack_eigs = symmetric_eigenvalues(&slack);
    let min_eig_of_slack = *slack_eigs.last().expect("d >= 1");
    let dom_eigs = symmetric_eigenvalues(&dominator);
    let dominator_norm = dom_eigs[0].abs().max(dom_eigs.last().unwrap().abs());
    let pass = min_eig_of_slack >= -PSD_DOMINANCE_TOL * dominator_norm;
    Ok(PsdCertificate {
        p,
        kind,
        min_eig_of_slack,
        dominator_norm,
        pass,
    })
}

/// Pairing-term counts for words of length p with k C letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    /// C(p,k)·(2p−2k−1)!! terms across all such words.
    pub total: u64,
    /// C(p−2,k)·(2p−2k−3)!! of them have a single-edge chain; 0 when
    /// k > p−2 (a singleton chain needs X letters at both ends).
    pub singleton_chain: u64,
}

pub fn term_counts(p: usize, k: usize) -> Result<TermCounts> {
    if p < 2 {
        return Err(Error::Domain(format!("term counts need p >= 2, got {p}")));
    }
    if p > 16 {
        return Err(Error::SizeLimit(format!(
            "term counts overflow u64 beyond p = 16, got {p}"
        )));
    }
    if k > p {
        return Err(Error::Domain(format!("k must lie in 0..={p}, got {k}")));
    }
    let total = binomial(p, k) * double_factorial(2 * (p - k) as i64 - 1);
    let singleton_chain = if k <= p - 2 {
        binomial(p - 2, k) * double_factorial(2 * (p - k) as i64 - 3)
    } else {
        0
    };
    Ok(TermCounts {
        total,
        singleton_chain,
    })
}

/// (−1)!! = 1; for odd m ≥ 1 the product m·(m−2)···1.
pub fn double_factorial(m: i64) -> u64 {
    debug_assert!(m >= -1 && m % 2 != 0);
    let mut out: u64 = 1;
    let mut i = m;
    while i > 1 {
        out *= i as u64;
        i -= 2;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out as u64
}

fn factorial(p: usize) -> u64 {
    (1..=p as u64).product()
}

/// Frozen closed forms used as exact cross-checks by the oracle battery.
pub mod reference {
    use super::SymbolicMoment;

    /// E[X²] = tr(C)·C + 2·C².
    pub fn second_moment() -> SymbolicMoment {
        SymbolicMoment::from_terms([(2, 2, vec![]), (1, 1, vec![1])])
    }

    /// E[X³] = tr(C)²·C + 2·tr(C²)·C + 4·tr(C)·C² + 8·C³.
    pub fn third_moment() -> SymbolicMoment {
        SymbolicMoment::from_terms([
            (8, 3, vec![]),
            (4, 2, vec![1]),
            (1, 1, vec![1, 1]),
            (2, 1, vec![2]),
        ])
    }

    /// E[XCX] = 2·C³ + tr(C²)·C.
    pub fn x_c_x_moment() -> SymbolicMoment {
        SymbolicMoment::from_terms([(2, 3, vec![]), (1, 1, vec![2])])
    }

    /// Σ₂ = E[(X−C)²] = tr(C)·C + C².
    pub fn sigma2() -> SymbolicMoment {
        SymbolicMoment::from_terms([(1, 2, vec![]), (1, 1, vec![1])])
    }

    /// Σ₃ = E[(X−C)³] = tr(C)²·C + tr(C²)·C + 2·tr(C)·C² + 4·C³.
    pub fn sigma3() -> SymbolicMoment {
        SymbolicMoment::from_terms([
            (4, 3, vec![]),
            (2, 2, vec![1]),
            (1, 1, vec![1, 1]),
            (1, 1, vec![2]),
        ])
    }
}
