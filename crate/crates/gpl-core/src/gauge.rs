//! The circular product, gauge group, Maurer-Cartan set and Deligne
//! groupoid of a complete braced algebra.
//!
//! Everything here is generic over [`BracedAlgebra`]; the series defining
//! the circular product and the gauge action are finite because arguments
//! carry positive filtration weight and the algebra is truncated at its
//! weight cap.

use serde::Serialize;

use crate::braced::BracedAlgebra;
use crate::error::{Error, Result};
use crate::ring::Scalar;
use crate::trees::ClassTree;

/// An element of the unital extension: `unit * 1 + body`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPlus<E> {
    pub unit: Scalar,
    pub body: E,
}

/// A gauge group element `1 + mu` with `mu` of degree zero and positive
/// filtration weight.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeElement<E> {
    pub mu: E,
}

pub fn one<A: BracedAlgebra>(alg: &A) -> UnitPlus<A::Elem> {
    UnitPlus { unit: alg.ring().one(), body: alg.zero() }
}

pub fn gauge<A: BracedAlgebra>(alg: &A, mu: A::Elem) -> Result<GaugeElement<A::Elem>> {
    if !alg.is_zero(&mu) {
        if alg.degree(&mu) != Some(0) {
            return Err(Error::DegreeError(format!(
                "gauge element body must be homogeneous of degree 0, got {}",
                alg.render(&mu)
            )));
        }
        if alg.min_weight(&mu) < 1 {
            return Err(Error::DegreeError("gauge element body must have positive weight".into()));
        }
    }
    Ok(GaugeElement { mu })
}

/// The truncated series sum_n a{mu}_n on the algebra itself.
pub fn circ_body<A: BracedAlgebra>(alg: &A, a: &A::Elem, g: &GaugeElement<A::Elem>) -> Result<A::Elem> {
    let cap = alg.weight_cap();
    let mut out = alg.zero();
    if alg.is_zero(a) {
        return Ok(out);
    }
    let base = alg.min_weight(a);
    let step = alg.min_weight(&g.mu).max(1);
    let mut n = 0u32;
    while base + n * step <= cap {
        let term = alg.brace(a, &[(g.mu.clone(), n)])?;
        out = alg.add(&out, &term)?;
        if alg.is_zero(&g.mu) {
            break;
        }
        n += 1;
    }
    Ok(out)
}

/// The circular product alpha (.) (1 + mu) on the unital extension.
pub fn circ<A: BracedAlgebra>(
    alg: &A,
    alpha: &UnitPlus<A::Elem>,
    g: &GaugeElement<A::Elem>,
) -> Result<UnitPlus<A::Elem>> {
    // 1 (.) (1 + mu) = 1 + mu, and the body contributes its own series.
    let body_series = circ_body(alg, &alpha.body, g)?;
    let unit_part = alg.scale(&alpha.unit, &g.mu)?;
    Ok(UnitPlus { unit: alpha.unit.clone(), body: alg.add(&body_series, &unit_part)? })
}

/// Composition of gauge elements: (1 + mu) (.) (1 + nu).
pub fn gauge_compose<A: BracedAlgebra>(
    alg: &A,
    g: &GaugeElement<A::Elem>,
    h: &GaugeElement<A::Elem>,
) -> Result<GaugeElement<A::Elem>> {
    let as_unit = UnitPlus { unit: alg.ring().one(), body: g.mu.clone() };
    let prod = circ(alg, &as_unit, h)?;
    debug_assert!(prod.unit.is_one());
    gauge(alg, prod.body)
}

/// The pointed series alpha (.) (1 + mu; beta) = sum_n alpha{mu, beta}_{n,1}.
pub fn circ_pointed<A: BracedAlgebra>(
    alg: &A,
    alpha: &UnitPlus<A::Elem>,
    g: &GaugeElement<A::Elem>,
    beta: &A::Elem,
) -> Result<A::Elem> {
    let cap = alg.weight_cap();
    // 1{mu, beta}_{0,1} = beta and 1{...} = 0 for higher total weight.
    let mut out = alg.scale(&alpha.unit, beta)?;
    if alg.is_zero(&alpha.body) || alg.is_zero(beta) {
        if alg.is_zero(&alpha.body) {
            return Ok(out);
        }
    }
    let base = alg.min_weight(&alpha.body) + alg.min_weight(beta);
    let step = alg.min_weight(&g.mu).max(1);
    let mut n = 0u32;
    while base + n * step <= cap {
        let term = alg.brace(&alpha.body, &[(g.mu.clone(), n), (beta.clone(), 1)])?;
        out = alg.add(&out, &term)?;
        if alg.is_zero(&g.mu) {
            break;
        }
        n += 1;
    }
    Ok(out)
}

/// Evaluates the nested brace expression attached to an unlabeled tree with
/// every vertex decorated by `mu`: the root braces over its child subtrees
/// grouped by isomorphism class.
pub fn ot_eval<A: BracedAlgebra>(alg: &A, shape: &ClassTree, mu: &A::Elem) -> Result<A::Elem> {
    if alg.degree(mu).map_or(false, |d| d != 0) {
        return Err(Error::DegreeError("tree evaluation requires degree 0".into()));
    }
    ot_eval_inner(alg, shape, mu)
}

fn ot_eval_inner<A: BracedAlgebra>(alg: &A, shape: &ClassTree, mu: &A::Elem) -> Result<A::Elem> {
    let mut args: Vec<(A::Elem, u32)> = Vec::new();
    for (kid, mult) in shape.grouped_kids() {
        args.push((ot_eval_inner(alg, kid, mu)?, mult));
    }
    alg.brace(mu, &args)
}

/// The inverse of `1 + nu` for the circular product, via the unlabeled-tree
/// sum applied to mu = -nu: (1 - mu)^{-1} = 1 + sum over trees of Ot(mu).
pub fn gauge_inverse<A: BracedAlgebra>(
    alg: &A,
    g: &GaugeElement<A::Elem>,
) -> Result<GaugeElement<A::Elem>> {
    let mu = alg.neg(&g.mu);
    let cap = alg.weight_cap();
    let step = alg.min_weight(&mu).max(1);
    let max_vertices = cap / step;
    let mut body = alg.zero();
    if !alg.is_zero(&mu) {
        for size_group in crate::trees::enumerate_unlabeled(max_vertices.max(1)) {
            for shape in &size_group {
                let term = ot_eval_inner(alg, shape, &mu)?;
                body = alg.add(&body, &term)?;
            }
        }
    }
    gauge(alg, body)
}

/// Order-by-order solver for the inverse, used as an independent oracle:
/// iterates x <- -nu - sum_{n >= 1} nu{x}_n to the filtration depth.
pub fn gauge_inverse_solver<A: BracedAlgebra>(
    alg: &A,
    g: &GaugeElement<A::Elem>,
) -> Result<GaugeElement<A::Elem>> {
    let nu = &g.mu;
    let cap = alg.weight_cap();
    let mut x = alg.neg(nu);
    for _ in 0..cap {
        let mut correction = alg.zero();
        let mut n = 1u32;
        let base = alg.min_weight(nu);
        let step = alg.min_weight(&x).max(1);
        while base + n * step <= cap {
            let term = alg.brace(nu, &[(x.clone(), n)])?;
            correction = alg.add(&correction, &term)?;
            n += 1;
        }
        x = alg.neg(&alg.add(nu, &correction)?);
    }
    gauge(alg, x)
}

/// The Maurer-Cartan residual d(alpha) + alpha{alpha}_1.
pub fn mc_residual<A: BracedAlgebra>(alg: &A, alpha: &A::Elem) -> Result<A::Elem> {
    if !alg.is_zero(alpha) && alg.degree(alpha) != Some(1) {
        return Err(Error::DegreeError(format!(
            "Maurer-Cartan candidates have degree 1, got {:?}",
            alg.degree(alpha)
        )));
    }
    let d = alg.differential(alpha)?;
    let sq = alg.brace(alpha, &[(alpha.clone(), 1)])?;
    alg.add(&d, &sq)
}

pub fn is_mc<A: BracedAlgebra>(alg: &A, alpha: &A::Elem) -> Result<bool> {
    Ok(alg.is_zero(&mc_residual(alg, alpha)?))
}

/// The gauge action (1 + mu) . alpha =
/// (alpha + mu{alpha}_1 - d(mu)) (.) (1 + mu)^{-1}.
pub fn gauge_act<A: BracedAlgebra>(
    alg: &A,
    g: &GaugeElement<A::Elem>,
    alpha: &A::Elem,
) -> Result<A::Elem> {
    let residual = mc_residual(alg, alpha)?;
    if !alg.is_zero(&residual) {
        return Err(Error::NotMaurerCartan(alg.render(&residual)));
    }
    let moved = {
        let shifted = alg.brace(&g.mu, &[(alpha.clone(), 1)])?;
        let dmu = alg.differential(&g.mu)?;
        alg.sub(&alg.add(alpha, &shifted)?, &dmu)?
    };
    let inv = gauge_inverse(alg, g)?;
    circ_body(alg, &moved, &inv)
}

/// Checks the homotopy equation d(lambda) = alpha + lambda{alpha}_1
/// - beta (.) (1 + lambda) connecting two Maurer-Cartan elements, and
/// returns the verdict together with the residual (lhs - rhs). The equation
/// holds iff (1 + lambda) carries alpha to beta.
pub fn homotopy_certificate<A: BracedAlgebra>(
    alg: &A,
    alpha: &A::Elem,
    beta: &A::Elem,
    lambda: &A::Elem,
) -> Result<(bool, A::Elem)> {
    for e in [alpha, beta] {
        let r = mc_residual(alg, e)?;
        if !alg.is_zero(&r) {
            return Err(Error::NotMaurerCartan(alg.render(&r)));
        }
    }
    let g = gauge(alg, lambda.clone())?;
    let beta_moved = circ_body(alg, beta, &g)?;
    let shifted = alg.brace(lambda, &[(alpha.clone(), 1)])?;
    let rhs = alg.sub(&alg.add(alpha, &shifted)?, &beta_moved)?;
    let lhs = alg.differential(lambda)?;
    let residual = alg.sub(&lhs, &rhs)?;
    Ok((alg.is_zero(&residual), residual))
}

/// One gauge orbit of an enumerated Deligne groupoid.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitSummary {
    pub size: usize,
    pub aut_order: usize,
}

/// Exhaustively enumerated Deligne groupoid of a finite braced algebra.
#[derive(Debug, Clone)]
pub struct GroupoidReport<E> {
    /// All Maurer-Cartan elements, in enumeration order.
    pub mc: Vec<E>,
    /// Orbit index of each Maurer-Cartan element.
    pub orbit_of: Vec<usize>,
    /// Per-orbit sizes and automorphism group orders.
    pub orbits: Vec<OrbitSummary>,
    /// Order of the gauge group.
    pub gauge_order: usize,
}

/// JSON shape of a groupoid report.
#[derive(Debug, Clone, Serialize)]
pub struct GroupoidReportJson {
    pub mc_count: usize,
    pub orbit_count: usize,
    pub orbits: Vec<OrbitSummary>,
}

impl<E> GroupoidReport<E> {
    pub fn to_json(&self) -> GroupoidReportJson {
        GroupoidReportJson {
            mc_count: self.mc.len(),
            orbit_count: self.orbits.len(),
            orbits: self.orbits.clone(),
        }
    }
}

/// All elements of a finite degree component, as exact linear combinations
/// of the component basis.
pub fn enumerate_component<A: BracedAlgebra>(
    alg: &A,
    degree: i64,
    budget: u128,
) -> Result<Vec<A::Elem>> {
    let basis = alg
        .component_basis(degree)
        .ok_or_else(|| Error::NotFiniteField("component basis unavailable".into()))?;
    let card = alg
        .ring()
        .cardinality()
        .ok_or_else(|| Error::NotFiniteField(alg.ring().to_string()))?;
    let need = card.checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
    if need > budget {
        return Err(Error::BudgetExceeded { need, budget });
    }
    let scalars = alg.ring().elements().expect("finite ring");
    let mut out: Vec<A::Elem> = vec![alg.zero()];
    for b in &basis {
        let mut next = Vec::with_capacity(out.len() * scalars.len());
        for prefix in &out {
            for c in &scalars {
                let term = alg.scale(c, b)?;
                next.push(alg.add(prefix, &term)?);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Worker-thread count: bounded by the GPL_THREADS environment variable,
/// defaulting to one (results are merged deterministically either way).
pub fn thread_count() -> usize {
    std::env::var("GPL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Enumerates the full Deligne groupoid of a finite braced algebra:
/// Maurer-Cartan set, gauge orbits and automorphism group orders.
pub fn deligne_enumerate<A>(alg: &A, budget: u128) -> Result<GroupoidReport<A::Elem>>
where
    A: BracedAlgebra + Sync,
    A::Elem: Send + Sync,
{
    let candidates = enumerate_component(alg, 1, budget)?;
    let gauge_bodies = enumerate_component(alg, 0, budget)?;

    // Maurer-Cartan filter, chunked over worker threads with a
    // deterministic ordered merge.
    let threads = thread_count().min(candidates.len().max(1));
    let mc: Vec<A::Elem> = if threads <= 1 {
        let mut mc = Vec::new();
        for c in candidates {
            if is_mc(alg, &c)? {
                mc.push(c);
            }
        }
        mc
    } else {
        let chunk = candidates.len().div_ceil(threads);
        let chunks: Vec<&[A::Elem]> = candidates.chunks(chunk).collect();
        let results: Vec<Result<Vec<A::Elem>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|slice| {
                    scope.spawn(move || {
                        let mut keep = Vec::new();
                        for c in slice {
                            if is_mc(alg, c)? {
                                keep.push(c.clone());
                            }
                        }
                        Ok(keep)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker")).collect()
        });
        let mut mc = Vec::new();
        for r in results {
            mc.extend(r?);
        }
        mc
    };

    // Index Maurer-Cartan elements by rendered canonical key.
    let index: std::collections::HashMap<String, usize> =
        mc.iter().enumerate().map(|(i, e)| (alg.render(e), i)).collect();

    let mut orbit_of = vec![usize::MAX; mc.len()];
    let mut orbits: Vec<OrbitSummary> = Vec::new();
    for start in 0..mc.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let orbit_id = orbits.len();
        let mut members = Vec::new();
        let mut aut = 0usize;
        for mu in &gauge_bodies {
            let g = gauge(alg, mu.clone())?;
            let image = gauge_act(alg, &g, &mc[start])?;
            let key = alg.render(&image);
            let &target = index
                .get(&key)
                .expect("gauge action must preserve the Maurer-Cartan set");
            if target == start {
                aut += 1;
            }
            if orbit_of[target] == usize::MAX {
                orbit_of[target] = orbit_id;
                members.push(target);
            }
        }
        // orbit-stabilizer consistency
        assert_eq!(
            members.len() * aut,
            gauge_bodies.len(),
            "orbit-stabilizer identity violated"
        );
        orbits.push(OrbitSummary { size: members.len(), aut_order: aut });
    }
    Ok(GroupoidReport { mc, orbit_of, orbits, gauge_order: gauge_bodies.len() })
}

/// The morphism set Hom(alpha, beta) of the Deligne groupoid: all gauge
/// elements carrying alpha to beta.
pub fn hom_set<A>(alg: &A, alpha: &A::Elem, beta: &A::Elem, budget: u128) -> Result<Vec<A::Elem>>
where
    A: BracedAlgebra,
{
    let gauge_bodies = enumerate_component(alg, 0, budget)?;
    let mut out = Vec::new();
    let target = alg.render(beta);
    for mu in gauge_bodies {
        let g = gauge(alg, mu)?;
        if alg.render(&gauge_act(alg, &g, alpha)?) == target {
            out.push(g.mu);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{AlgebraSpec, GammaAlgebra};
    use crate::ring::Ring;

    fn gauge_alg(ring: Ring, cap: u32) -> GammaAlgebra {
        // m of degree 0, x of degree 1, d = 0.
        let spec = AlgebraSpec::new(ring, &[("m", 0), ("x", 1)], &[], cap).unwrap();
        GammaAlgebra::new(spec)
    }

    #[test]
    fn circ_unit_laws() {
        let a = gauge_alg(Ring::Integers, 5);
        let m = a.generator("m").unwrap();
        let g = gauge(&a, m.clone()).unwrap();
        // 1 (.) (1 + mu) = 1 + mu.
        let lhs = circ(&a, &one(&a), &g).unwrap();
        assert!(lhs.unit.is_one());
        assert_eq!(lhs.body, m);
        // a (.) 1 = a.
        let alpha = UnitPlus { unit: a.ring().zero(), body: a.generator("x").unwrap() };
        let trivial = gauge(&a, a.zero()).unwrap();
        let rhs = circ(&a, &alpha, &trivial).unwrap();
        assert_eq!(rhs.body, alpha.body);
    }

    #[test]
    fn circ_is_associative() {
        use crate::braced::BracedAlgebra as _;
        let a = gauge_alg(Ring::prime_field(3), 5);
        let m = a.generator("m").unwrap();
        let m2 = a.star(&m, &m).unwrap();
        let mu = a.add(&m, &m2).unwrap();
        let nu = a.sub(&m, &m2).unwrap();
        let alpha = UnitPlus { unit: a.ring().one(), body: a.generator("x").unwrap() };
        let g_mu = gauge(&a, mu).unwrap();
        let g_nu = gauge(&a, nu).unwrap();
        let lhs = circ(&a, &circ(&a, &alpha, &g_mu).unwrap(), &g_nu).unwrap();
        let composed = gauge_compose(&a, &g_mu, &g_nu).unwrap();
        let rhs = circ(&a, &alpha, &composed).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tree_sum_inverse_examples() {
        // truncation at weight 3: 1 + mu + mu{mu}_1 + mu{mu}_2 + mu{mu{mu}_1}_1.
        let a = gauge_alg(Ring::Integers, 3);
        let m = a.generator("m").unwrap();
        let neg_m = a.neg(&m);
        let g = gauge(&a, neg_m).unwrap(); // 1 - m
        let inv = gauge_inverse(&a, &g).unwrap();
        let mut expected = m.clone();
        expected = a.add(&expected, &a.star(&m, &m).unwrap()).unwrap();
        expected = a.add(&expected, &a.brace(&m, &[(m.clone(), 2)]).unwrap()).unwrap();
        expected = a
            .add(&expected, &a.star(&m, &a.star(&m, &m).unwrap()).unwrap())
            .unwrap();
        assert_eq!(inv.mu, expected);
        // weight-1 truncation: inverse is 1 + m.
        let a1 = gauge_alg(Ring::Integers, 1);
        let m1 = a1.generator("m").unwrap();
        let g1 = gauge(&a1, a1.neg(&m1)).unwrap();
        assert_eq!(gauge_inverse(&a1, &g1).unwrap().mu, m1);
    }

    #[test]
    fn inverse_is_two_sided_and_matches_solver() {
        for ring in [Ring::Integers, Ring::prime_field(2), Ring::prime_field(3)] {
            let a = gauge_alg(ring, 6);
            let m = a.generator("m").unwrap();
            let m2 = a.star(&m, &m).unwrap();
            for body in [m.clone(), a.add(&m, &m2).unwrap(), a.neg(&m)] {
                let g = gauge(&a, body).unwrap();
                let inv = gauge_inverse(&a, &g).unwrap();
                let solver = gauge_inverse_solver(&a, &g).unwrap();
                assert_eq!(inv.mu, solver.mu, "tree sum vs solver");
                let left = gauge_compose(&a, &inv, &g).unwrap();
                let right = gauge_compose(&a, &g, &inv).unwrap();
                assert!(a.is_zero(&left.mu), "left inverse failed");
                assert!(a.is_zero(&right.mu), "right inverse failed");
            }
        }
    }

    #[test]
    fn ot_eval_examples() {
        let a = gauge_alg(Ring::Integers, 12);
        let m = a.generator("m").unwrap();
        let leaf = ClassTree::leaf(0);
        assert_eq!(ot_eval(&a, &leaf, &m).unwrap(), m);
        let chain = ClassTree::node(0, vec![ClassTree::leaf(0)]);
        assert_eq!(ot_eval(&a, &chain, &m).unwrap(), a.star(&m, &m).unwrap());
        // the displayed example: root with children mu{mu}_2 twice,
        // mu{mu}_3 once and a bare vertex.
        let two_leaves = ClassTree::node(0, vec![ClassTree::leaf(0), ClassTree::leaf(0)]);
        let three_leaves =
            ClassTree::node(0, vec![ClassTree::leaf(0), ClassTree::leaf(0), ClassTree::leaf(0)]);
        let shape = ClassTree::node(
            0,
            vec![two_leaves.clone(), two_leaves.clone(), three_leaves.clone(), ClassTree::leaf(0)],
        );
        let lhs = ot_eval(&a, &shape, &m).unwrap();
        let inner2 = a.brace(&m, &[(m.clone(), 2)]).unwrap();
        let inner3 = a.brace(&m, &[(m.clone(), 3)]).unwrap();
        let rhs = a
            .brace(&m, &[(inner2, 2), (inner3, 1), (m.clone(), 1)])
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mc_check_examples() {
        let a = gauge_alg(Ring::Integers, 4);
        assert!(is_mc(&a, &a.zero()).unwrap());
        // a generator x with d(x) = 0 is not Maurer-Cartan: x{x}_1 is the
        // 2-chain class.
        let x = a.generator("x").unwrap();
        let r = mc_residual(&a, &x).unwrap();
        assert_eq!(a.render(&r), "x[x]");
        // degree error for degree-0 input
        let m = a.generator("m").unwrap();
        assert!(mc_residual(&a, &m).is_err());
    }

    #[test]
    fn classical_mc_over_the_rationals() {
        // d(alpha) + (1/2)[alpha, alpha] with [x, y] = x*y - (-1)^{|x||y|} y*x.
        let a = gauge_alg(Ring::Rationals, 4);
        let x = a.generator("x").unwrap();
        let xs = a.star(&x, &x).unwrap();
        // [x,x] = x*x + x*x = 2 x*x, so half of it is x*x = x{x}_1.
        let half = Scalar::rational(1, 2);
        let bracket = a.add(&xs, &xs).unwrap();
        let classical = a.scale(&half, &bracket).unwrap();
        let residual = mc_residual(&a, &x).unwrap();
        assert_eq!(residual, classical); // d = 0 here
    }

    #[test]
    fn gauge_act_identity_and_composition() {
        let a = gauge_alg(Ring::prime_field(2), 4);
        // alpha = 0 is Maurer-Cartan; all gauge elements act on it.
        let m = a.generator("m").unwrap();
        let g = gauge(&a, m.clone()).unwrap();
        let res = gauge_act(&a, &g, &a.zero()).unwrap();
        assert!(is_mc(&a, &res).unwrap());
        // identity acts trivially
        let id = gauge(&a, a.zero()).unwrap();
        assert_eq!(gauge_act(&a, &id, &a.zero()).unwrap(), a.zero());
    }

    #[test]
    fn odd_double_slot_vanishes() {
        // mu{alpha, alpha}_{1,1} = 0 for alpha of odd degree.
        let a = gauge_alg(Ring::Integers, 6);
        let m = a.generator("m").unwrap();
        let x = a.generator("x").unwrap();
        let out = a.brace(&m, &[(x.clone(), 1), (x.clone(), 1)]).unwrap();
        assert!(a.is_zero(&out));
    }
}
