//! Random generators and reusable property checks shared by the test targets.
#![allow(dead_code)]

use std::collections::HashSet;

use polymat::entropy::Row;
use polymat::ground::subsets_of_size;
use polymat::inequalities::{mmrv_gap_term, Roles};
use polymat::polymatroid::VALIDATION_TOL;
use polymat::secret_sharing::{realizes, AccessStructure, DensePort, ExplicitStructure};
use polymat::{
    helgason_expand, mmrv_identity_residual, FactorMap, GroundSet, JointDistribution, Matroid, Polymatroid, RankVector,
    SetFunction, SubsetMask,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn letters(n: usize) -> GroundSet {
    GroundSet::letters(n).unwrap()
}

fn nonempty_mask(rng: &mut ChaCha8Rng, n: usize) -> SubsetMask {
    SubsetMask(rng.gen_range(1..(1u32 << n)))
}

/// `Σ c_A r_A` over a few random non-empty `A` with integer weights.
pub fn coverage_int(rng: &mut ChaCha8Rng, n: usize, terms: usize, max_weight: i64) -> RankVector<i64> {
    let picks: Vec<(SubsetMask, i64)> =
        (0..terms).map(|_| (nonempty_mask(rng, n), rng.gen_range(1..=max_weight))).collect();
    RankVector::from_fn(letters(n), |s| picks.iter().filter(|(a, _)| !a.is_disjoint(s)).map(|(_, c)| c).sum())
}

/// Rank over GF(2) of a multiset of vectors given as bitmasks.
pub fn gf2_rank(vectors: impl IntoIterator<Item = u32>) -> i64 {
    let mut basis: Vec<u32> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|x, y| y.cmp(x));
        }
    }
    basis.len() as i64
}

/// Column matroid of `n` random vectors in `GF(2)^dim`.
pub fn gf2_matroid(rng: &mut ChaCha8Rng, n: usize, dim: u32) -> Matroid {
    let vectors: Vec<u32> = (0..n).map(|_| rng.gen_range(0..(1u32 << dim))).collect();
    let rank = RankVector::from_fn(letters(n), |s| gf2_rank(s.elements().map(|i| vectors[i])));
    Matroid::new(Polymatroid::validate(rank, 0.0).unwrap()).unwrap()
}

/// Random matroid on `n` elements: GF(2) column matroid, possibly summed with a uniform one.
pub fn random_matroid(rng: &mut ChaCha8Rng, n: usize) -> Matroid {
    if n >= 4 && rng.gen_bool(0.3) {
        // Direct sum of a GF(2) matroid and a uniform matroid.
        let split = rng.gen_range(1..n);
        let k = rng.gen_range(0..=(n - split));
        let dim = rng.gen_range(1..=3);
        let left = gf2_matroid(rng, split, dim);
        let rank = RankVector::from_fn(letters(n), |s| {
            let low = SubsetMask(s.bits() & ((1 << split) - 1));
            left.rank(low) + (s.len() - low.len()).min(k) as i64
        });
        Matroid::new(Polymatroid::validate(rank, 0.0).unwrap()).unwrap()
    } else {
        let dim = rng.gen_range(1..=(n as u32).min(4));
        gf2_matroid(rng, n, dim)
    }
}

pub fn connected_matroid(rng: &mut ChaCha8Rng, n: usize) -> Matroid {
    loop {
        let m = random_matroid(rng, n);
        if m.is_connected() {
            return m;
        }
    }
}

/// Random integer polymatroid: coverage functions, scaled matroids,
/// sums of both, and truncations.
pub fn random_int_polymatroid(rng: &mut ChaCha8Rng, n: usize) -> Polymatroid<i64> {
    let rank = match rng.gen_range(0..4) {
        0 => {
            let terms = rng.gen_range(1..=5);
            coverage_int(rng, n, terms, 3)
        }
        1 => {
            let k = rng.gen_range(1..=3);
            random_matroid(rng, n).polymatroid().rank_vector().map(|v| v * k)
        }
        2 => {
            let terms = rng.gen_range(1..=3);
            let c = coverage_int(rng, n, terms, 2);
            let m = random_matroid(rng, n);
            RankVector::from_fn(letters(n), |s| c.get(s) + m.rank(s))
        }
        _ => {
            let terms = rng.gen_range(2..=6);
            let c = coverage_int(rng, n, terms, 3);
            let cap = rng.gen_range(1..=c.full_rank().max(1));
            c.map(|v| v.min(cap))
        }
    };
    Polymatroid::validate(rank, 0.0).unwrap()
}

/// Random float polymatroid: non-negative combination of `r_A`, matroid and
/// entropy-vector components.
pub fn random_float_polymatroid(rng: &mut ChaCha8Rng, n: usize) -> Polymatroid<f64> {
    let int = random_int_polymatroid(rng, n).to_float();
    let w: f64 = rng.gen_range(0.1..3.0);
    let dist = random_distribution(rng, n, 3, 8);
    let h = dist.entropy_vector();
    let rank = RankVector::from_fn(letters(n), |s| w * int.rank(s) + h.rank(s));
    Polymatroid::validate(rank, VALIDATION_TOL).unwrap()
}

/// Distribution on `n` variables over `0..alphabet` with at most `support` atoms.
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize, alphabet: i64, support: usize) -> JointDistribution {
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for _ in 0..support {
        let values: Vec<i64> = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
        if seen.insert(values.clone()) {
            rows.push(Row { values, prob: rng.gen_range(0.0..1.0) });
        }
    }
    if rng.gen_bool(0.2) {
        rows[0].prob = 0.0;
    }
    let mut total: f64 = rows.iter().map(|r| r.prob).sum();
    if total == 0.0 {
        rows[0].prob = 1.0;
        total = 1.0;
    }
    for r in &mut rows {
        r.prob /= total;
    }
    JointDistribution::new(GroundSet::new(["a", "b", "c", "d", "e"].iter().take(n).copied()).unwrap(), rows).unwrap()
}

fn differ<T: polymat::Rank>(what: &str, x: &Polymatroid<T>, y: &Polymatroid<T>, tol: f64) -> Check {
    let d = x.rank_vector().max_abs_diff(y.rank_vector()).map_err(|e| e.to_string())?;
    if d <= tol {
        Ok(())
    } else {
        Err(format!("{what}: deviation {d}"))
    }
}

pub fn check_dual_laws<T: polymat::Rank>(p: &Polymatroid<T>, tol: f64) -> Check {
    let d = p.dual();
    Polymatroid::validate(d.rank_vector().clone(), tol).map_err(|e| format!("dual not a polymatroid: {e}"))?;
    if !d.is_tight(tol) {
        return Err("dual is not tight".into());
    }
    differ("dual∘dual vs tighten", &d.dual(), &p.tighten(), tol)?;
    let t = p.tighten();
    differ("dual involution on tight part", &t.dual().dual(), &t, tol)?;
    if p.is_connected(tol) != d.is_connected(tol) {
        return Err("dual changed connectivity".into());
    }
    Ok(())
}

pub fn check_tighten_order(p: &Polymatroid<i64>, rng: &mut ChaCha8Rng) -> Check {
    let mut order: Vec<usize> = (0..p.n()).collect();
    order.shuffle(rng);
    let mut q = p.clone();
    for i in order {
        q = q.tighten_at(i).map_err(|e| e.to_string())?;
    }
    differ("tighten order", &q, &p.tighten(), 0.0)
}

/// Splits element `a` with parts `(alpha, h(a) - alpha)`.
pub fn split(p: &Polymatroid<i64>, a: usize, alpha: i64) -> Polymatroid<i64> {
    let h = p.singleton(a);
    p.split_atom(a, alpha, h - alpha, ["s1", "s2"], 0.0).unwrap()
}

pub fn check_split_laws(p: &Polymatroid<i64>, a: usize, alpha: i64) -> Check {
    let q = split(p, a, alpha);
    Polymatroid::validate(q.rank_vector().clone(), 0.0).map_err(|e| format!("split invalid: {e}"))?;
    let map = FactorMap::collapse(q.ground(), &["s1", "s2"], p.ground().label(a)).map_err(|e| e.to_string())?;
    differ("split then factor", &q.factor(&map).unwrap(), p, 0.0)?;
    let t = p.tighten();
    let beta = alpha.min(t.singleton(a));
    differ("split/dual commutation", &split(&t, a, beta).dual(), &split(&t.dual(), a, beta), 0.0)
}

pub fn check_principal_extension(p: &Polymatroid<i64>, a: usize, alpha: i64) -> Check {
    let q = p.principal_extension(a, alpha, "z").map_err(|e| e.to_string())?;
    Polymatroid::validate(q.rank_vector().clone(), 0.0).map_err(|e| format!("extension invalid: {e}"))?;
    let n = p.n();
    for s in p.ground().subsets() {
        if q.rank(s) != p.rank(s) {
            return Err("extension changed an old rank".into());
        }
    }
    let z = SubsetMask::singleton(n);
    if q.rank(z) != alpha.min(p.singleton(a)) {
        return Err("extension has the wrong singleton rank".into());
    }
    Ok(())
}

pub fn check_identity_residual<F: SetFunction<f64>>(f: &F) -> Check {
    let roles = Roles::positional(f.ground()).map_err(|e| e.to_string())?;
    let r = mmrv_identity_residual(f, &roles).map_err(|e| e.to_string())?;
    if r.abs() <= 1e-9 {
        Ok(())
    } else {
        Err(format!("identity residual {r}"))
    }
}

pub fn check_entropy_vector(dist: &JointDistribution) -> Check {
    let h = dist.entropy_vector();
    Polymatroid::validate(h.rank_vector().clone(), VALIDATION_TOL).map_err(|e| format!("Shannon violated: {e}"))?;
    let g = h.ground().clone();
    for a in g.subsets() {
        for b in g.subsets().filter(|b| b.is_disjoint(a)) {
            let cond = h.rank(a | b) - h.rank(b);
            if cond < -1e-9 || cond > h.rank(a) + 1e-9 {
                return Err(format!("H(A|B) = {cond} outside [0, {}]", h.rank(a)));
            }
        }
    }
    if g.len() == 5 {
        let v = polymat::mmrv(&h).map_err(|e| e.to_string())?;
        if v < -1e-9 {
            return Err(format!("entropic vector violates MMRV: {v}"));
        }
    }
    Ok(())
}

/// Glues the `abc` and `bcde` marginals of a five-variable distribution.
pub fn check_conditional_product(dist: &JointDistribution) -> Check {
    let abc = dist.marginal(SubsetMask(0b00111)).map_err(|e| e.to_string())?;
    let bcde = dist.marginal(SubsetMask(0b11110)).map_err(|e| e.to_string())?;
    let glued = JointDistribution::conditional_product(&abc, &bcde).map_err(|e| e.to_string())?;
    let h = glued.entropy_vector();
    let original = dist.entropy_vector();
    for s in [SubsetMask(0b00111), SubsetMask(0b11110)] {
        for t in s.submasks() {
            if (h.rank(t) - original.rank(t)).abs() > 1e-9 {
                return Err(format!("marginal entropy differs on {t:?}"));
            }
        }
    }
    let roles = Roles::positional(h.ground()).unwrap();
    let gap = mmrv_gap_term(&roles).eval_unit(&h);
    if gap.abs() > 1e-9 {
        return Err(format!("I(a;de|bc) = {gap}"));
    }
    if h.full_rank() < original.full_rank() - 1e-9 {
        return Err("glued distribution has less entropy than a coupling".into());
    }
    Ok(())
}

/// Dense matroid obtained by splitting off unit-rank pieces in the given
/// block order; `owner[e]` is the block of dense element `e`.
pub fn iterated_split(base: &Polymatroid<i64>, order: &[usize]) -> (Polymatroid<i64>, Vec<usize>) {
    let mut current = base.clone();
    let mut owner: Vec<usize> = (0..base.n()).collect();
    let mut labels_used = 0;
    for &block in order {
        // The element still carrying rank > 1 for this block is its original position.
        let h = current.singleton(block);
        labels_used += 1;
        let fresh = format!("x{labels_used}");
        let keep = current.ground().label(block).to_string();
        current = current.split_atom(block, h - 1, 1, [&keep, &fresh], 0.0).unwrap();
        owner.push(block);
    }
    (current, owner)
}

/// All distinct sequences of block choices that split every block down to unit rank.
pub fn split_orders(sizes: &[i64]) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<i64>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.iter().all(|&r| r <= 1) {
            out.push(prefix.clone());
            return;
        }
        for b in 0..rest.len() {
            if rest[b] > 1 {
                rest[b] -= 1;
                prefix.push(b);
                go(rest, prefix, out);
                prefix.pop();
                rest[b] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut sizes.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Compares the expansion oracle with every splitting order on every subset.
/// Rank-zero elements stay loops in the dense matroid and have empty blocks.
pub fn check_helgason_against_splits(base: &Polymatroid<i64>) -> Check {
    let e = helgason_expand(base).map_err(|e| e.to_string())?;
    let sizes: Vec<i64> = (0..base.n()).map(|i| base.singleton(i)).collect();
    for order in split_orders(&sizes) {
        let (dense, owner) = iterated_split(base, &order);
        for s in dense.ground().subsets() {
            // Rank-zero elements are loops in the dense matroid and outside every block.
            let mut counts = vec![0u32; base.n()];
            for x in s.elements().filter(|&x| sizes[owner[x]] > 0) {
                counts[owner[x]] += 1;
            }
            let oracle = e.rank(&polymat::BlockCounts(counts)).map_err(|e| e.to_string())?;
            if oracle != dense.rank(s) {
                return Err(format!("order {order:?}, subset {s:?}: oracle {oracle}, dense {}", dense.rank(s)));
            }
        }
    }
    Ok(())
}

/// Factor recovery, plus dual commutation on block unions for tight bases.
pub fn check_expansion_factor(base: &Polymatroid<i64>) -> Check {
    let e = helgason_expand(base).map_err(|e| e.to_string())?;
    let d = e.dual();
    let dual_base = base.dual();
    let tight = base.is_tight(0.0);
    for s in base.ground().subsets() {
        let counts = e.block_union(s);
        if e.rank(&counts).unwrap() != base.rank(s) {
            return Err(format!("factor recovery fails on {s:?}"));
        }
        if tight && d.rank(&counts).unwrap() != dual_base.rank(s) {
            return Err(format!("dual commutation fails on {s:?}"));
        }
    }
    Ok(())
}

/// Circuit-connectivity is an equivalence relation with one class iff connected.
#[allow(clippy::needless_range_loop)]
pub fn check_circuit_relation(m: &Matroid) -> Check {
    let n = m.n();
    let mut rel = vec![vec![false; n]; n];
    for x in 0..n {
        rel[x][x] = true;
        for y in (x + 1)..n {
            let c = m.circuit_connected(x, y).map_err(|e| e.to_string())?;
            rel[x][y] = c;
            rel[y][x] = c;
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if rel[x][y] && rel[y][z] && !rel[x][z] {
                    return Err(format!("not transitive at {x},{y},{z}"));
                }
            }
        }
    }
    let classes = m.circuit_classes().map_err(|e| e.to_string())?;
    for c in &classes {
        let mut it = c.elements();
        let first = it.next().unwrap();
        if it.any(|y| !rel[first][y]) {
            return Err("class disagrees with the relation".into());
        }
    }
    if (classes.len() == 1) != m.is_connected() {
        return Err(format!("{} classes but is_connected = {}", classes.len(), m.is_connected()));
    }
    for c in m.circuits().map_err(|e| e.to_string())? {
        let k = c.len() as i64;
        if m.rank(c) != k - 1 || c.elements().any(|i| m.rank(c.without(i)) != k - 1) {
            return Err(format!("circuit {c:?} fails the rank identities"));
        }
    }
    Ok(())
}

pub fn threshold(n: usize, k: usize) -> ExplicitStructure {
    let g = GroundSet::new((1..=n).map(|i| format!("p{i}"))).unwrap();
    ExplicitStructure::threshold(g, k).unwrap()
}

/// Realization laws for the port of a connected matroid at a random secret.
pub fn check_port_laws(m: &Matroid, secret: usize) -> Check {
    let p = m.polymatroid();
    let port = AccessStructure::Port(DensePort::new(p.clone(), secret).map_err(|e| e.to_string())?);
    let explicit = AccessStructure::Explicit(port.to_explicit().map_err(|e| e.to_string())?);
    let holds = |q: &Polymatroid<i64>, a: &AccessStructure| realizes(q, secret, a, 0.0).map(|r| r.holds());
    if !holds(p, &explicit).map_err(|e| e.to_string())? {
        return Err("matroid does not realize its own port".into());
    }
    if !holds(&p.dual(), &explicit.dual()).map_err(|e| e.to_string())? {
        return Err("dual matroid does not realize the dual structure".into());
    }
    let wrapped = port.dual().to_explicit().map_err(|e| e.to_string())?;
    if wrapped != explicit.dual().to_explicit().unwrap() {
        return Err("oracle dual disagrees with the explicit dual".into());
    }
    if !holds(&p.tighten(), &explicit).map_err(|e| e.to_string())? {
        return Err("tightening broke realization".into());
    }
    let (important, connected) = explicit.important_participants().unwrap();
    let (_, dual_connected) = explicit.dual().important_participants().unwrap();
    if connected != dual_connected {
        return Err("connectedness not dual-invariant".into());
    }
    let fs = p.singleton(secret);
    for i in important.elements() {
        let x = SubsetMask::singleton(i).insert_gap(secret).elements().next().unwrap();
        if p.singleton(x) < fs {
            return Err("important participant with a share smaller than the secret".into());
        }
        if connected && p.singleton(x) == fs && p.private_info(x) != 0 {
            return Err("participant with f(i) = f(s) is not tight".into());
        }
    }
    Ok(())
}

/// Every matroid on `n` elements, from basis families satisfying the exchange axiom.
pub fn all_matroids(n: usize) -> Vec<Matroid> {
    let g = letters(n);
    let mut out = Vec::new();
    for k in 0..=n {
        let candidates: Vec<SubsetMask> = subsets_of_size(n, k).collect();
        for family in 1u64..(1u64 << candidates.len()) {
            let bases: Vec<SubsetMask> =
                (0..candidates.len()).filter(|&j| family >> j & 1 == 1).map(|j| candidates[j]).collect();
            let is_basis = |s: SubsetMask| bases.contains(&s);
            let exchange = bases.iter().all(|&b1| {
                bases.iter().all(|&b2| {
                    (b1 - b2).elements().all(|x| (b2 - b1).elements().any(|y| is_basis(b1.without(x).with(y))))
                })
            });
            if exchange {
                let rank =
                    RankVector::from_fn(g.clone(), |s| bases.iter().map(|b| (*b & s).len() as i64).max().unwrap());
                out.push(Matroid::new(Polymatroid::validate(rank, 0.0).unwrap()).unwrap());
            }
        }
    }
    out
}

/// The realizations of `port(m, secret)` among `pool` with unit singleton ranks
/// (the secret included) are exactly `{m}`.
pub fn check_port_uniqueness(m: &Matroid, secret: usize, pool: &[Matroid]) -> Check {
    let target = AccessStructure::Explicit(
        AccessStructure::Port(DensePort::new(m.polymatroid().clone(), secret).unwrap()).to_explicit().unwrap(),
    );
    let mut found = 0;
    for q in pool.iter().filter(|q| (0..q.n()).all(|i| q.rank(SubsetMask::singleton(i)) == 1)) {
        if realizes(q.polymatroid(), secret, &target, 0.0).unwrap().holds() {
            if q != m {
                return Err(format!("a second matroid realizes the port at {secret}"));
            }
            found += 1;
        }
    }
    if found == 1 {
        Ok(())
    } else {
        Err(format!("found {found} realizations"))
    }
}
