//! Exact and log-space moments of the induced rooted forest counts of
//! G(n,p), the concentration window, the ordered-pair terms behind the
//! second moment, and the auxiliary envelope function with its bounds.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::counting::{
    factorial, forest_extension_count, binomial, cayley_tree_count, for_each_partition,
    multinomial, ForestShape,
};
use crate::error::{Error, Result};
use crate::exact::{ln_rational, pow_i64, pow_u64, to_f64, Rational};
use crate::graph::check_probability;
use crate::solver::count_induced_rooted_forests;
use crate::graph::Graph;

/// Guard half-width used when a floor/ceiling argument sits within float
/// noise of an integer; the window is widened outward instead of guessing.
const INTEGER_GUARD: f64 = 1e-12;

fn big(u: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(u))
}

fn check_moment_args(n: u64, k: u64, p: &Rational) -> Result<()> {
    check_probability(p)?;
    if k < 1 || k > n {
        return Err(Error::param(format!("k={k} out of range [1, n] for n={n}")));
    }
    Ok(())
}

/// `k*p*q + 1` with `q = 1/(1-p)`.
fn branching_factor(k: u64, p: &Rational) -> Rational {
    let q = (Rational::one() - p).recip();
    Rational::from_integer(BigInt::from(k)) * p * q + Rational::one()
}

/// Exact `E[X_k]` for G(n,p): `C(n,k) * (1-p)^C(k,2) * (k*p*q + 1)^(k-1)`.
pub fn expected_xk_exact(n: u64, k: u64, p: &Rational) -> Result<Rational> {
    check_moment_args(n, k, p)?;
    let survive = pow_u64(&(Rational::one() - p), k * (k - 1) / 2);
    Ok(big(binomial(n, k)) * survive * pow_u64(&branching_factor(k, p), k - 1))
}

/// `ln E[X_k]` evaluated in log space from the exact closed form, usable for
/// very large `n`.
pub fn expected_xk_log(n: u64, k: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("p={p} outside (0, 1)")));
    }
    if k < 1 || k > n {
        return Err(Error::param(format!("k={k} out of range [1, n] for n={n}")));
    }
    let choose2 = (k as u128 * (k as u128 - 1) / 2) as f64;
    let kpq = k as f64 * p / (1.0 - p);
    Ok(ln_choose(n, k) + choose2 * (1.0 - p).ln() + (k - 1) as f64 * kpq.ln_1p())
}

/// `ln C(n, k)`. Small `min(k, n-k)` uses a compensated direct sum; the rest
/// goes through log-gamma.
fn ln_choose(n: u64, k: u64) -> f64 {
    let kk = k.min(n - k);
    if kk == 0 {
        return 0.0;
    }
    if kk <= 1 << 20 {
        // Kahan-summed ln(n) + ln(n-1) + ... minus ln(kk!)
        let mut sum = 0.0f64;
        let mut carry = 0.0f64;
        for i in 0..kk {
            let term = ((n - i) as f64).ln() - carry;
            let t = sum + term;
            carry = (t - sum) - term;
            sum = t;
        }
        sum - libm::lgamma(kk as f64 + 1.0)
    } else {
        libm::lgamma(n as f64 + 1.0)
            - libm::lgamma(kk as f64 + 1.0)
            - libm::lgamma((n - kk) as f64 + 1.0)
    }
}

/// Concentration interval `[k_minus, k_plus]` for the maximum induced forest
/// of G(n,p) at slack `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub n: u64,
    pub p: Rational,
    pub eps: Rational,
    pub k_minus: i64,
    pub k_plus: i64,
}

impl Window {
    /// Average degree scale `n*p`; callers judge how asymptotic the regime is.
    pub fn np(&self) -> f64 {
        self.n as f64 * to_f64(&self.p)
    }

    pub fn contains(&self, size: i64) -> bool {
        self.k_minus <= size && size <= self.k_plus
    }
}

/// Computes `k_minus = floor(2 log_q(e n p (1-eps)) + 3)` and
/// `k_plus = ceil(2 log_q(e n p (1+eps)) + 3)`. The floor/ceiling argument is
/// bracketed by `INTEGER_GUARD`; a bracket that straddles an integer widens
/// the window outward rather than trusting the last float bit.
pub fn window(n: u64, p: &Rational, eps: &Rational) -> Result<Window> {
    check_probability(p)?;
    if !eps.is_positive() {
        return Err(Error::param("eps must be positive"));
    }
    if n == 0 {
        return Err(Error::param("window requires n >= 1"));
    }
    let ln_q = -ln_rational(&(Rational::one() - p))?;
    let n_rat = Rational::from_integer(BigInt::from(n));

    let arg = |factor: Rational| -> Result<f64> {
        let a = &n_rat * p * factor;
        if !a.is_positive() {
            return Err(Error::param("enp(1-eps) must exceed 1; eps too large"));
        }
        // ln(e * a) = 1 + ln a
        Ok(1.0 + ln_rational(&a)?)
    };
    let low = arg(Rational::one() - eps)?;
    if low <= INTEGER_GUARD {
        return Err(Error::param(
            "window undefined: enp(1-eps) must exceed 1".to_string(),
        ));
    }
    let high = arg(Rational::one() + eps)?;

    let t_minus = 2.0 * low / ln_q + 3.0;
    let t_plus = 2.0 * high / ln_q + 3.0;
    let k_minus = (t_minus - INTEGER_GUARD).floor() as i64;
    let k_plus = (t_plus + INTEGER_GUARD).ceil() as i64;
    debug_assert!(k_minus <= k_plus);
    Ok(Window {
        n,
        p: p.clone(),
        eps: eps.clone(),
        k_minus,
        k_plus,
    })
}

/// One term of the second-moment expansion: the expected number of ordered
/// pairs of induced rooted `k`-forests sharing exactly `ell` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerm {
    pub ell: u64,
    pub value: Rational,
}

/// Exact `F_ell`: the outer multinomial picks the shared vertices and the two
/// private sides; the inner sum runs over the component-size partitions of
/// the shared forest, counts the two extensions, and weighs edges and
/// non-edges. The two extension factors enter symmetrically, as a square of
/// a single sum in `r = (1-p)/p`.
pub fn pair_term_exact(n: u64, k: u64, ell: u64, p: &Rational) -> Result<PairTerm> {
    check_probability(p)?;
    if ell < 1 || ell > k {
        return Err(Error::param(format!(
            "ell={ell} out of range [1, k] for k={k}"
        )));
    }
    let outer = multinomial(&[
        ell as i64,
        (k - ell) as i64,
        (k - ell) as i64,
        n as i64 - 2 * k as i64 + ell as i64,
    ]);
    if outer.is_zero() {
        return Ok(PairTerm {
            ell,
            value: Rational::zero(),
        });
    }

    let r = (Rational::one() - p) / p;
    // 2*C(k,2) - C(ell,2) pair slots inside the union of the two subsets.
    let pair_slots = (k * (k - 1)) as i64 - (ell * (ell - 1) / 2) as i64;
    let q_complement = Rational::one() - p;

    let mut inner = Rational::zero();
    let mut failure: Option<Error> = None;
    for_each_partition(ell, &mut |parts| {
        if failure.is_some() {
            return;
        }
        match partition_contribution(k, ell, parts, &r, p, &q_complement, pair_slots) {
            Ok(term) => inner += term,
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PairTerm {
        ell,
        value: big(outer) * inner,
    })
}

#[allow(clippy::too_many_arguments)]
fn partition_contribution(
    k: u64,
    ell: u64,
    parts: &[u64],
    r: &Rational,
    p: &Rational,
    q_complement: &Rational,
    pair_slots: i64,
) -> Result<Rational> {
    let m = parts.len() as u64;
    let shape = ForestShape::new(parts.to_vec())?;

    // Number of forests on the `ell` shared labelled vertices with this
    // component-size multiset: multinomial(ell; parts) * prod f^(f-2),
    // divided by the permutations of equal-sized components.
    let mut forests = multinomial(&parts.iter().map(|&f| f as i64).collect::<Vec<_>>());
    for &f in parts {
        forests *= cayley_tree_count(f)?;
    }
    let mut run = 1u64;
    let mut mult_factor = BigUint::one();
    for i in 1..parts.len() {
        if parts[i] == parts[i - 1] {
            run += 1;
        } else {
            mult_factor *= factorial(run);
            run = 1;
        }
    }
    mult_factor *= factorial(run);
    debug_assert!((&forests % &mult_factor).is_zero());
    forests /= mult_factor;

    // sum_h f(k, h, shape) r^h appears once per side of the ordered pair.
    let mut extension_sum = Rational::zero();
    let mut r_pow = Rational::one();
    for h in 1..=(k - ell + m) {
        r_pow *= r;
        extension_sum += big(forest_extension_count(k, h, &shape)?) * &r_pow;
    }

    let weight_exp = (2 * k - ell + m) as i64;
    let edges_weight = pow_i64(p, weight_exp);
    let nonedges_weight = pow_i64(q_complement, pair_slots - weight_exp);
    Ok(big(forests) * (&extension_sum * &extension_sum) * edges_weight * nonedges_weight)
}

/// Exact `E[X_k^2] = F_0 + sum_{ell=1}^{k} F_ell`, where the disjoint-pair
/// term `F_0` factorizes because induced-forest events depend only on pairs
/// inside their own vertex set.
pub fn second_moment_exact(n: u64, k: u64, p: &Rational) -> Result<Rational> {
    check_moment_args(n, k, p)?;
    let per_subset = pow_u64(&(Rational::one() - p), k * (k - 1) / 2)
        * pow_u64(&branching_factor(k, p), k - 1);
    let disjoint = big(binomial(n, k)) * big(binomial(n - k, k)) * (&per_subset * &per_subset);
    let mut total = disjoint;
    for ell in 1..=k {
        total += pair_term_exact(n, k, ell, p)?.value;
    }
    Ok(total)
}

/// `Var(X_k) / E[X_k]^2`, computed exactly and converted at the end.
pub fn variance_ratio(n: u64, k: u64, p: &Rational) -> Result<f64> {
    let e = expected_xk_exact(n, k, p)?;
    let sm = second_moment_exact(n, k, p)?;
    let e2 = &e * &e;
    Ok(to_f64(&((sm - &e2) / e2)))
}

/// Arguments of the envelope function `g(x,y,z,alpha) = (y z^x / x^alpha)^x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GParams {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub alpha: f64,
}

impl GParams {
    pub fn new(x: f64, y: f64, z: f64, alpha: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::param(format!("x={x} must be finite and >= 0")));
        }
        for (name, v) in [("y", y), ("z", z), ("alpha", alpha)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::param(format!("{name}={v} must be finite and > 0")));
            }
        }
        Ok(GParams { x, y, z, alpha })
    }
}

/// `ln g`; the `x = 0` limit is 0 (so `g(0) = 1`).
pub fn g_ln(params: &GParams) -> f64 {
    let GParams { x, y, z, alpha } = *params;
    if x == 0.0 {
        return 0.0;
    }
    x * (y.ln() + x * z.ln() - alpha * x.ln())
}

pub fn g_eval(params: &GParams) -> f64 {
    g_ln(params).exp()
}

/// Outcome of checking the two envelope upper bounds over `[a, b]` on a
/// uniform grid. All quantities are natural logs so huge values compare
/// safely.
#[derive(Debug, Clone, PartialEq)]
pub struct GBoundsReport {
    pub grid_max_ln: f64,
    pub grid_argmax_x: f64,
    /// RHS of the unconditional bound:
    /// `max{ exp(alpha/2 * y^(1/alpha)), g(a), g(b) }`.
    pub unconditional_bound_ln: f64,
    pub unconditional_pass: bool,
    /// RHS of the sharper bound, defined when `a >= y^(1/alpha)`:
    /// `max{ (y (e/a)^alpha)^(a/2), g(a), g(b) }`.
    pub restricted_bound_ln: Option<f64>,
    pub restricted_pass: Option<bool>,
}

impl GBoundsReport {
    pub fn pass(&self) -> bool {
        self.unconditional_pass && self.restricted_pass.unwrap_or(true)
    }
}

/// Evaluates `g` on `grid_points` uniform points of `[a, b]` and compares the
/// maximum against both upper bounds, with multiplicative tolerance `1e-9`.
pub fn verify_g_bounds(
    a: f64,
    b: f64,
    y: f64,
    z: f64,
    alpha: f64,
    grid_points: usize,
) -> Result<GBoundsReport> {
    if !(b >= a && a >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param(format!("need finite B >= A >= 0, got A={a}, B={b}")));
    }
    if grid_points == 0 {
        return Err(Error::param("grid needs at least one point"));
    }
    GParams::new(a, y, z, alpha)?; // validates y, z, alpha

    let mut grid_max_ln = f64::NEG_INFINITY;
    let mut grid_argmax_x = a;
    for i in 0..grid_points {
        let x = if grid_points == 1 {
            a
        } else {
            a + (b - a) * i as f64 / (grid_points - 1) as f64
        };
        let v = g_ln(&GParams { x, y, z, alpha });
        if v > grid_max_ln {
            grid_max_ln = v;
            grid_argmax_x = x;
        }
    }

    let tolerance = 1e-9f64.ln_1p();
    let g_a = g_ln(&GParams { x: a, y, z, alpha });
    let g_b = g_ln(&GParams { x: b, y, z, alpha });

    let stationary_cap = alpha / 2.0 * y.powf(1.0 / alpha);
    let unconditional_bound_ln = stationary_cap.max(g_a).max(g_b);
    let unconditional_pass = grid_max_ln <= unconditional_bound_ln + tolerance;

    let (restricted_bound_ln, restricted_pass) = if a >= y.powf(1.0 / alpha) && a > 0.0 {
        let cap = a / 2.0 * (y.ln() + alpha * (1.0 - a.ln()));
        let bound = cap.max(g_a).max(g_b);
        (Some(bound), Some(grid_max_ln <= bound + tolerance))
    } else {
        (None, None)
    };

    Ok(GBoundsReport {
        grid_max_ln,
        grid_argmax_x,
        unconditional_bound_ln,
        unconditional_pass,
        restricted_bound_ln,
        restricted_pass,
    })
}

// ---------------------------------------------------------------------------
// Whole-space enumeration oracles
// ---------------------------------------------------------------------------

/// `E[X_k]` and `E[X_k^2]` for every `k = 0..=n` by exact enumeration of all
/// `2^C(n,2)` graphs; limited to `n <= 6`.
pub fn moments_by_enumeration(n: usize, p: &Rational) -> Result<(Vec<Rational>, Vec<Rational>)> {
    check_probability(p)?;
    if n > 6 {
        return Err(Error::param(format!(
            "whole-space enumeration is limited to n <= 6, got n={n}"
        )));
    }
    let pair_count = n * (n.max(1) - 1) / 2;
    // Accumulate integer counts bucketed by edge count; weigh at the end.
    let mut count_by_edges = vec![vec![BigUint::zero(); pair_count + 1]; n + 1];
    let mut square_by_edges = vec![vec![BigUint::zero(); pair_count + 1]; n + 1];

    for_each_graph(n, |g, edges| {
        for k in 0..=n {
            let x = count_induced_rooted_forests(g, k).expect("k in range");
            count_by_edges[k][edges] += &x;
            square_by_edges[k][edges] += &x * &x;
        }
    });

    let weights = edge_weights(pair_count, p);
    let expect = |table: &Vec<Vec<BigUint>>| -> Vec<Rational> {
        table
            .iter()
            .map(|per_k| {
                per_k
                    .iter()
                    .zip(&weights)
                    .map(|(c, w)| big(c.clone()) * w)
                    .sum()
            })
            .collect()
    };
    Ok((expect(&count_by_edges), expect(&square_by_edges)))
}

/// `F_ell` for `ell = 0..=k` by exact enumeration of all graphs: the expected
/// number of ordered pairs of induced rooted `k`-forests sharing `ell`
/// vertices. Limited to `n <= 6`.
pub fn pair_terms_by_enumeration(n: usize, k: usize, p: &Rational) -> Result<Vec<Rational>> {
    check_probability(p)?;
    if n > 6 {
        return Err(Error::param(format!(
            "whole-space enumeration is limited to n <= 6, got n={n}"
        )));
    }
    if k > n {
        return Err(Error::param(format!("k={k} out of range [0, {n}]")));
    }
    let pair_count = n * (n.max(1) - 1) / 2;
    let mut by_overlap = vec![vec![BigUint::zero(); pair_count + 1]; k + 1];

    let subsets: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect();
    for_each_graph(n, |g, edges| {
        let rows: Vec<u32> = (0..n)
            .map(|v| {
                let mut r = 0u32;
                for u in g.neighbors(v) {
                    r |= 1 << u;
                }
                r
            })
            .collect();
        let rootings: Vec<Option<u64>> = subsets
            .iter()
            .map(|&mask| rooting_product(&rows, mask))
            .collect();
        for (i, &s1) in subsets.iter().enumerate() {
            let Some(r1) = rootings[i] else { continue };
            for (j, &s2) in subsets.iter().enumerate() {
                let Some(r2) = rootings[j] else { continue };
                let overlap = (s1 & s2).count_ones() as usize;
                by_overlap[overlap][edges] += r1 * r2;
            }
        }
    });

    let weights = edge_weights(pair_count, p);
    Ok(by_overlap
        .iter()
        .map(|per_e| {
            per_e
                .iter()
                .zip(&weights)
                .map(|(c, w)| big(c.clone()) * w)
                .sum()
        })
        .collect())
}

/// Product of component sizes of the subgraph induced by `mask`, or `None`
/// if it has a cycle. The empty mask yields 1.
fn rooting_product(rows: &[u32], mask: u32) -> Option<u64> {
    let mut product = 1u64;
    let mut edges = 0u32;
    let mut vertices = 0usize;
    let mut components = 0usize;
    let mut t = mask;
    while t != 0 {
        let v = t.trailing_zeros() as usize;
        t &= t - 1;
        vertices += 1;
        edges += (rows[v] & mask).count_ones();
    }
    let edges = (edges / 2) as usize;
    let mut unseen = mask;
    while unseen != 0 {
        components += 1;
        let mut frontier = unseen & unseen.wrapping_neg();
        let mut seen = frontier;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= rows[v] & mask & !seen;
            }
            seen |= next;
            frontier = next;
        }
        product *= seen.count_ones() as u64 - (seen & !unseen).count_ones() as u64;
        unseen &= !seen;
    }
    if edges + components == vertices {
        Some(product)
    } else {
        None
    }
}

/// Calls `f` with every labelled graph on `n` vertices and its edge count.
fn for_each_graph(n: usize, mut f: impl FnMut(&Graph, usize)) {
    let mut pairs = Vec::new();
    for v in 1..n {
        for u in 0..v {
            pairs.push((u, v));
        }
    }
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(n, &edges).expect("pairs are canonical");
        f(&g, edges.len());
    }
}

/// `p^e (1-p)^(M-e)` for `e = 0..=M`.
fn edge_weights(pair_count: usize, p: &Rational) -> Vec<Rational> {
    let q = Rational::one() - p;
    (0..=pair_count)
        .map(|e| pow_u64(p, e as u64) * pow_u64(&q, (pair_count - e) as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{format_rational, rational, rational_int};

    #[test]
    fn expected_count_spot_values() {
        let half = rational(1, 2);
        assert_eq!(expected_xk_exact(5, 1, &half).unwrap(), rational_int(5));
        // C(4,2) * (1 + p)
        assert_eq!(expected_xk_exact(4, 2, &half).unwrap(), rational_int(9));
        assert_eq!(expected_xk_exact(3, 3, &half).unwrap(), rational_int(2));
        assert!(expected_xk_exact(3, 0, &half).is_err());
        assert!(expected_xk_exact(3, 4, &half).is_err());
        assert!(expected_xk_exact(3, 1, &rational(7, 2)).is_err());
    }

    #[test]
    fn expected_x2_is_choose2_times_one_plus_p() {
        for (num, den) in [(1i64, 3i64), (2, 7), (5, 9), (1, 100)] {
            let p = rational(num, den);
            for n in 2..=12u64 {
                let want = big(binomial(n, 2)) * (Rational::one() + &p);
                assert_eq!(expected_xk_exact(n, 2, &p).unwrap(), want, "n={n}, p={num}/{den}");
            }
        }
    }

    #[test]
    fn log_matches_exact_for_modest_sizes() {
        let cases = [(5u64, 1u64), (4, 2), (10, 4), (30, 7), (60, 12)];
        for (n, k) in cases {
            for (num, den) in [(1i64, 2i64), (1, 3), (3, 4)] {
                let p = rational(num, den);
                let exact = expected_xk_exact(n, k, &p).unwrap();
                let want = ln_rational(&exact).unwrap();
                let got = expected_xk_log(n, k, num as f64 / den as f64).unwrap();
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "n={n}, k={k}, p={num}/{den}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn log_handles_huge_n() {
        let v = expected_xk_log(1_000_000, 40, 0.5).unwrap();
        assert!(v.is_finite());
        // The window endpoints bracket the sign change of ln E[X_k].
        let w = window(1_000_000, &rational(1, 2), &rational(1, 10)).unwrap();
        let lo = expected_xk_log(1_000_000, w.k_minus as u64, 0.5).unwrap();
        let hi = expected_xk_log(1_000_000, w.k_plus as u64, 0.5).unwrap();
        assert!(lo > 0.0, "ln E at k_minus = {lo}");
        assert!(hi < 0.0, "ln E at k_plus = {hi}");
    }

    #[test]
    fn window_spot_values() {
        let w = window(1024, &rational(1, 2), &rational(1, 10)).unwrap();
        assert_eq!((w.k_minus, w.k_plus), (23, 25));
        assert!(w.contains(24));
        assert!(!w.contains(26));
        assert!((w.np() - 512.0).abs() < 1e-9);
    }

    #[test]
    fn window_is_monotone_in_eps() {
        let p = rational(1, 2);
        let mut prev = window(4096, &p, &rational(1, 20)).unwrap();
        for eps_num in [2i64, 3, 4, 6] {
            let w = window(4096, &p, &rational(eps_num, 20)).unwrap();
            assert!(w.k_minus <= prev.k_minus && w.k_plus >= prev.k_plus);
            prev = w;
        }
    }

    #[test]
    fn window_rejects_bad_domains() {
        assert!(window(10, &rational(1, 2), &rational(-1, 10)).is_err());
        assert!(window(10, &rational(1, 2), &rational(0, 1)).is_err());
        // enp(1-eps) <= 1
        assert!(window(1, &rational(1, 100), &rational(1, 10)).is_err());
        assert!(window(10, &rational(1, 2), &rational(1, 1)).is_err());
        assert!(window(0, &rational(1, 2), &rational(1, 10)).is_err());
    }

    #[test]
    fn pair_term_single_vertex_overlap() {
        // n=2, k=1, ell=1: two rooted single vertices coincide.
        for (num, den) in [(1i64, 2i64), (1, 3), (9, 10)] {
            let p = rational(num, den);
            let t = pair_term_exact(2, 1, 1, &p).unwrap();
            assert_eq!(t.value, rational_int(2), "p={num}/{den}");
        }
    }

    #[test]
    fn pair_term_rejects_bad_ranges() {
        let p = rational(1, 2);
        assert!(pair_term_exact(4, 2, 0, &p).is_err());
        assert!(pair_term_exact(4, 2, 3, &p).is_err());
        // Too small n zero-drops instead of erroring.
        assert_eq!(pair_term_exact(1, 1, 1, &p).unwrap().value, rational_int(1));
        assert_eq!(pair_term_exact(2, 2, 1, &p).unwrap().value, rational_int(0));
    }

    #[test]
    fn pair_terms_match_enumeration_small() {
        for (n, k) in [(4usize, 2usize), (5, 2), (5, 3)] {
            for (num, den) in [(1i64, 2i64), (1, 3)] {
                let p = rational(num, den);
                let oracle = pair_terms_by_enumeration(n, k, &p).unwrap();
                for ell in 1..=k {
                    let got = pair_term_exact(n as u64, k as u64, ell as u64, &p).unwrap();
                    assert_eq!(
                        got.value, oracle[ell],
                        "n={n}, k={k}, ell={ell}, p={num}/{den}"
                    );
                }
            }
        }
    }

    #[test]
    fn second_moment_matches_enumeration_small() {
        for n in 1..=5usize {
            for (num, den) in [(1i64, 2i64), (1, 3)] {
                let p = rational(num, den);
                let (_, squares) = moments_by_enumeration(n, &p).unwrap();
                for k in 1..=n {
                    let got = second_moment_exact(n as u64, k as u64, &p).unwrap();
                    assert_eq!(
                        got, squares[k],
                        "n={n}, k={k}, p={num}/{den}: got {} want {}",
                        format_rational(&got),
                        format_rational(&squares[k])
                    );
                }
            }
        }
    }

    #[test]
    fn first_moment_matches_enumeration_small() {
        for n in 1..=5usize {
            for (num, den) in [(1i64, 2i64), (1, 3)] {
                let p = rational(num, den);
                let (expectations, _) = moments_by_enumeration(n, &p).unwrap();
                for k in 1..=n {
                    let got = expected_xk_exact(n as u64, k as u64, &p).unwrap();
                    assert_eq!(got, expectations[k], "n={n}, k={k}, p={num}/{den}");
                }
            }
        }
    }

    #[test]
    fn deterministic_x1_has_zero_variance() {
        let p = rational(1, 2);
        assert_eq!(second_moment_exact(3, 1, &p).unwrap(), rational_int(9));
        assert_eq!(variance_ratio(3, 1, &p).unwrap(), 0.0);
    }

    #[test]
    fn variance_ratio_matches_enumeration() {
        let p = rational(1, 2);
        let (expectations, squares) = moments_by_enumeration(5, &p).unwrap();
        let e2 = &expectations[2] * &expectations[2];
        let want = to_f64(&((&squares[2] - &e2) / &e2));
        let got = variance_ratio(5, 2, &p).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!(got >= -1e-12);
    }

    #[test]
    fn variance_ratio_decreases_along_window_lower_endpoints() {
        // Numeric companion of the vanishing-variance direction: at
        // k = k_minus(n, 1/2, 1/5) the relative variance shrinks as n grows.
        let p = rational(1, 2);
        let eps = rational(1, 5);
        let mut previous = f64::INFINITY;
        for n in [40u64, 80, 160] {
            let w = window(n, &p, &eps).unwrap();
            let ratio = variance_ratio(n, w.k_minus as u64, &p).unwrap();
            assert!(ratio >= -1e-12, "n={n}: ratio {ratio}");
            assert!(
                ratio < previous,
                "n={n}: ratio {ratio} did not decrease from {previous}"
            );
            previous = ratio;
        }
    }

    #[test]
    fn second_moment_dominates_squared_expectation() {
        for n in 2..=7u64 {
            for k in 1..=n.min(5) {
                let p = rational(2, 5);
                let e = expected_xk_exact(n, k, &p).unwrap();
                let sm = second_moment_exact(n, k, &p).unwrap();
                assert!(sm >= &e * &e, "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn g_spot_values() {
        assert_eq!(g_eval(&GParams::new(1.0, 3.0, 2.0, 7.0).unwrap()), 6.0);
        assert_eq!(g_eval(&GParams::new(0.0, 5.0, 9.0, 2.0).unwrap()), 1.0);
        let v = g_eval(&GParams::new(2.0, 1.0, 2.0, 1.0).unwrap());
        assert!((v - 4.0).abs() < 1e-12);
        assert!(GParams::new(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GParams::new(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn g_bounds_trivial_and_decreasing_cases() {
        // A == B: the grid max is g(A) itself.
        let r = verify_g_bounds(2.0, 2.0, 1.5, 1.1, 2.0, 1).unwrap();
        assert!(r.pass());
        assert!((r.grid_max_ln - g_ln(&GParams::new(2.0, 1.5, 1.1, 2.0).unwrap())).abs() < 1e-12);
        // Decreasing case from g(0)=1 downward.
        let r = verify_g_bounds(0.0, 4.0, 1.0, 1.0, 1.0, 1001).unwrap();
        assert!(r.unconditional_pass);
        assert!(r.restricted_bound_ln.is_none(), "A=0 cannot satisfy A >= y^(1/alpha)");
        assert!(verify_g_bounds(3.0, 2.0, 1.0, 1.0, 1.0, 10).is_err());
        assert!(verify_g_bounds(0.0, 1.0, 1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn g_bounds_hold_on_random_parameters() {
        use crate::rng::Stream;
        let mut s = Stream::new(0xA11CE);
        for trial in 0..200 {
            let y = 0.05 + 4.0 * s.unit_f64();
            let z = 0.05 + 3.0 * s.unit_f64();
            let alpha = 0.1 + 4.0 * s.unit_f64();
            let a = 5.0 * s.unit_f64();
            let b = a + 8.0 * s.unit_f64();
            let r = verify_g_bounds(a, b, y, z, alpha, 2000).unwrap();
            assert!(r.pass(), "trial {trial}: {r:?}");
        }
    }
}
