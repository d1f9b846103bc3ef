//! Permutation groups given by generators, enumerated by closure, together with
//! alternating supporting partitions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{cap_error, Error, Result};

/// Default cap on the number of group elements produced by closure.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// A permutation of `0..n`, stored by images. Composition is right to left:
/// `p.compose(q)` maps `x` to `p(q(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i as usize >= n || seen[i as usize] {
                return Err(Error::Structure(format!("not a bijection: {images:?}")));
            }
            seen[i as usize] = true;
        }
        Ok(Perm(images))
    }

    pub fn from_usize(images: &[usize]) -> Result<Perm> {
        Self::from_images(images.iter().map(|&i| i as u32).collect())
    }

    /// Transposition of two 0-based points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut p = Self::identity(n);
        p.0.swap(a, b);
        p
    }

    /// The cycle `(c[0] c[1] ... c[k-1])` on 0-based points.
    pub fn cycle(n: usize, c: &[usize]) -> Perm {
        let mut p = Self::identity(n);
        for (k, &x) in c.iter().enumerate() {
            p.0[x] = c[(k + 1) % c.len()] as u32;
        }
        p
    }

    /// Parses 1-based cycle notation such as `"(1 2)(3 4 5)"` on `n` points.
    pub fn parse_cycles(n: usize, s: &str) -> Result<Perm> {
        let mut p = Self::identity(n);
        let s = s.trim();
        if s.is_empty() || s == "()" {
            return Ok(p);
        }
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| Error::Structure(format!("bad cycle notation {s:?}")))?;
            let close = rest.find(')').ok_or_else(|| Error::Structure(format!("bad cycle notation {s:?}")))?;
            if !rest[..open].trim().is_empty() || close < open {
                return Err(Error::Structure(format!("bad cycle notation {s:?}")));
            }
            let pts: Vec<usize> = rest[open + 1..close]
                .split(|c: char| c == ' ' || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| Error::Structure(format!("bad point {t:?}"))))
                .collect::<Result<_>>()?;
            if pts.iter().any(|&x| x == 0 || x > n) {
                return Err(Error::Structure(format!("point out of range in {s:?}")));
            }
            let c = Perm::cycle(n, &pts.iter().map(|x| x - 1).collect::<Vec<_>>());
            let c = Perm::from_images(c.0)?;
            p = p.compose(&c);
            rest = rest[close + 1..].trim_start();
        }
        Ok(p)
    }

    /// 1-based cycle notation; the identity prints as `()`.
    pub fn to_cycles(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for s in 0..n {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            let mut c = vec![s + 1];
            seen[s] = true;
            let mut x = self.0[s] as usize;
            while x != s {
                seen[x] = true;
                c.push(x + 1);
                x = self.0[x] as usize;
            }
            out.push('(');
            out.push_str(&c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn is_even(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }

    /// Conjugate `σ p σ⁻¹`.
    pub fn conjugate_by(&self, sigma: &Perm) -> Perm {
        sigma.compose(self).compose(&sigma.inverse())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycles())
    }
}

/// Enumerated elements of a group with a membership index.
#[derive(Debug)]
pub struct Elements {
    list: Vec<Perm>,
    index: HashSet<Perm>,
}

impl Elements {
    pub fn list(&self) -> &[Perm] {
        &self.list
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains(p)
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// A permutation group on `0..degree` given by generators.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    cache: Arc<OnceLock<Arc<Elements>>>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::Structure(format!("generator {g:?} has degree {} not {degree}", g.degree())));
        }
        Ok(PermGroup { degree, generators, cache: Arc::new(OnceLock::new()) })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup { degree, generators: Vec::new(), cache: Arc::new(OnceLock::new()) }
    }

    /// `Sym(n)` generated by adjacent transpositions.
    pub fn symmetric(n: usize) -> PermGroup {
        let gens = (0..n.saturating_sub(1)).map(|i| Perm::transposition(n, i, i + 1)).collect();
        PermGroup { degree: n, generators: gens, cache: Arc::new(OnceLock::new()) }
    }

    /// `Alt(n)` generated by the 3-cycles `(0 1 i)`.
    pub fn alternating(n: usize) -> PermGroup {
        let gens = (2..n).map(|i| Perm::cycle(n, &[0, 1, i])).collect();
        PermGroup { degree: n, generators: gens, cache: Arc::new(OnceLock::new()) }
    }

    /// Parses 1-based cycle-notation generators.
    pub fn from_cycle_strings(degree: usize, gens: &[&str]) -> Result<PermGroup> {
        let g = gens.iter().map(|s| Perm::parse_cycles(degree, s)).collect::<Result<Vec<_>>>()?;
        Self::new(degree, g)
    }

    /// A group given by its full element list; the list must be closed under composition.
    pub fn from_elements(degree: usize, elements: Vec<Perm>) -> Result<PermGroup> {
        let mut list = Vec::new();
        let mut index = HashSet::new();
        let id = Perm::identity(degree);
        index.insert(id.clone());
        list.push(id);
        for e in elements {
            if e.degree() != degree {
                return Err(Error::Structure("element degree mismatch".into()));
            }
            if index.insert(e.clone()) {
                list.push(e);
            }
        }
        list.sort();
        for a in &list {
            for b in &list {
                if !index.contains(&a.compose(b)) {
                    return Err(Error::Structure("element list is not closed under composition".into()));
                }
            }
        }
        let gens = list.iter().filter(|p| !p.is_identity()).cloned().collect();
        let cache = OnceLock::new();
        let _ = cache.set(Arc::new(Elements { list, index }));
        Ok(PermGroup { degree, generators: gens, cache: Arc::new(cache) })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// All elements, in sorted order. Closure stops with an error once more than `cap`
    /// elements have been found.
    pub fn enumerate(&self, cap: usize) -> Result<Arc<Elements>> {
        if let Some(e) = self.cache.get() {
            if e.len() > cap {
                return Err(cap_error("group enumeration", cap, e.len()));
            }
            return Ok(e.clone());
        }
        let id = Perm::identity(self.degree);
        let mut index = HashSet::new();
        index.insert(id.clone());
        let mut list = vec![id];
        let mut i = 0;
        while i < list.len() {
            let x = list[i].clone();
            i += 1;
            for g in &self.generators {
                let y = g.compose(&x);
                if !index.contains(&y) {
                    if list.len() >= cap {
                        return Err(cap_error("group enumeration", cap, list.len()));
                    }
                    index.insert(y.clone());
                    list.push(y);
                }
            }
        }
        list.sort();
        let e = Arc::new(Elements { list, index });
        let _ = self.cache.set(e.clone());
        Ok(self.cache.get().cloned().unwrap_or(e))
    }

    pub fn order(&self, cap: usize) -> Result<usize> {
        Ok(self.enumerate(cap)?.len())
    }

    pub fn contains(&self, p: &Perm, cap: usize) -> Result<bool> {
        Ok(self.enumerate(cap)?.contains(p))
    }

    /// Orbit of `x` under a left action, discovered by breadth-first search over generators.
    pub fn orbit<T, F>(&self, x: T, act: F) -> Vec<T>
    where
        T: Clone + Eq + std::hash::Hash,
        F: Fn(&Perm, &T) -> T,
    {
        let mut seen = HashSet::new();
        seen.insert(x.clone());
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            let y = out[i].clone();
            i += 1;
            for g in &self.generators {
                let z = act(g, &y);
                if seen.insert(z.clone()) {
                    out.push(z);
                }
            }
        }
        out
    }

    /// Stabilizer of `x`, as an enumerated subgroup.
    pub fn stabilizer<T, F>(&self, x: &T, act: F, cap: usize) -> Result<PermGroup>
    where
        T: Eq,
        F: Fn(&Perm, &T) -> T,
    {
        let el = self.enumerate(cap)?;
        let fix: Vec<Perm> = el.list().iter().filter(|p| act(p, x) == *x).cloned().collect();
        PermGroup::from_elements(self.degree, fix)
    }

    /// `|self| / |sub|`, after checking that `sub` is a subgroup.
    pub fn index(&self, sub: &PermGroup, cap: usize) -> Result<usize> {
        let el = self.enumerate(cap)?;
        let sl = sub.enumerate(cap)?;
        if sl.list().iter().any(|p| !el.contains(p)) {
            return Err(Error::Validation("index: not a subgroup".into()));
        }
        Ok(el.len() / sl.len())
    }

    /// `σ G σ⁻¹`.
    pub fn conjugate(&self, sigma: &Perm) -> PermGroup {
        PermGroup {
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.conjugate_by(sigma)).collect(),
            cache: Arc::new(OnceLock::new()),
        }
    }
}

/// A partition of `0..n` in canonical form: each part sorted, parts ordered by least element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

/// Coarse shape classes of a partition, as used by the quadratic-orbit bound.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Whole,
    OneVsRest,
    Singletons,
    Other,
}

impl Partition {
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Partition> {
        let mut seen = vec![false; n];
        let mut parts: Vec<Vec<usize>> = parts.into_iter().filter(|p| !p.is_empty()).collect();
        for p in &mut parts {
            p.sort_unstable();
            for &x in p.iter() {
                if x >= n || seen[x] {
                    return Err(Error::Structure(format!("parts overlap or leave the domain at {x}")));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Structure("parts do not cover the domain".into()));
        }
        parts.sort();
        Ok(Partition { n, parts })
    }

    pub fn whole(n: usize) -> Partition {
        Partition { n, parts: if n == 0 { vec![] } else { vec![(0..n).collect()] } }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition { n, parts: (0..n).map(|i| vec![i]).collect() }
    }

    /// Parses 1-based parts.
    pub fn from_one_based(n: usize, parts: &[&[usize]]) -> Result<Partition> {
        Self::new(n, parts.iter().map(|p| p.iter().map(|x| x.wrapping_sub(1)).collect()).collect())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    /// Whether every part of `self` lies inside a part of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let mut owner = vec![0; self.n];
        for (k, p) in other.parts.iter().enumerate() {
            for &x in p {
                owner[x] = k;
            }
        }
        self.parts.iter().all(|p| p.iter().all(|&x| owner[x] == owner[p[0]]))
    }

    /// Finest common coarsening: connected components of overlapping parts.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf: Vec<usize> = (0..self.n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let nx = uf[y];
                uf[y] = r;
                y = nx;
            }
            r
        }
        for p in self.parts.iter().chain(&other.parts) {
            for &x in &p[1..] {
                let a = find(&mut uf, p[0]);
                let b = find(&mut uf, x);
                uf[a] = b;
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in 0..self.n {
            let r = find(&mut uf, x);
            groups.entry(r).or_default().push(x);
        }
        Partition::new(self.n, groups.into_values().collect()).expect("join of partitions is a partition")
    }

    pub fn apply(&self, p: &Perm) -> Partition {
        Partition::new(self.n, self.parts.iter().map(|q| q.iter().map(|&x| p.apply(x)).collect()).collect())
            .expect("image of a partition is a partition")
    }

    pub fn shape(&self) -> Shape {
        let k = self.parts.len();
        if k <= 1 {
            Shape::Whole
        } else if k == self.n {
            Shape::Singletons
        } else if k == 2 && self.parts.iter().any(|p| p.len() == 1) {
            Shape::OneVsRest
        } else {
            Shape::Other
        }
    }

    /// 1-based rendering such as `{{1,2},{3,4,5}}`.
    pub fn to_one_based_string(&self) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("{{{}}}", p.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Generators of `∏_{|P|<5} Sym(P) × ∏_{|P|≥5} Alt(P)` for a single part.
fn part_generators(n: usize, part: &[usize]) -> Vec<Perm> {
    if part.len() < 2 {
        Vec::new()
    } else if part.len() < 5 {
        part.windows(2).map(|w| Perm::transposition(n, w[0], w[1])).collect()
    } else {
        (2..part.len()).map(|i| Perm::cycle(n, &[part[0], part[1], part[i]])).collect()
    }
}

fn part_is_good(g: &Elements, n: usize, part: &[usize]) -> bool {
    part_generators(n, part).iter().all(|p| g.contains(p))
}

/// Whether the product group attached to `p` is contained in `g`.
pub fn is_alt_supporting(p: &Partition, g: &PermGroup, cap: usize) -> Result<bool> {
    if p.degree() != g.degree() {
        return Err(Error::Structure("partition and group act on different domains".into()));
    }
    let el = g.enumerate(cap)?;
    Ok(p.parts().iter().all(|q| part_is_good(&el, g.degree(), q)))
}

/// Which engine produced a coarsest supporting partition.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaEngine {
    /// Exhaustive partition-lattice scan, cross-checked with the merge engine.
    Exhaustive,
    /// Merge engine alone: supporting, but coarsest-ness is not certified.
    MergeHeuristic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaResult {
    pub partition: Partition,
    pub engine: SpaEngine,
}

impl SpaResult {
    pub fn certified(&self) -> bool {
        self.engine == SpaEngine::Exhaustive
    }
}

/// Largest domain handled by the exhaustive engine.
pub const EXHAUSTIVE_MAX_DEGREE: usize = 9;

/// Scans all set partitions of the domain and returns the coarsest supporting one,
/// checking that every supporting partition refines it.
pub fn coarsest_spa_exhaustive(g: &PermGroup, cap: usize) -> Result<Partition> {
    let n = g.degree();
    if n > EXHAUSTIVE_MAX_DEGREE {
        return Err(Error::Parameter(format!("exhaustive engine supports degree ≤ {EXHAUSTIVE_MAX_DEGREE}, got {n}")));
    }
    let el = g.enumerate(cap)?;
    if n == 0 {
        return Ok(Partition::whole(0));
    }
    let mut good = vec![false; 1 << n];
    for mask in 1usize..1 << n {
        let part: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        good[mask] = part_is_good(&el, n, &part);
    }
    // Restricted growth strings enumerate each set partition exactly once.
    let mut supporting: Vec<Vec<usize>> = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, n: usize, max: usize, rgs: &mut Vec<usize>, good: &[bool], out: &mut Vec<Vec<usize>>) {
        if i == n {
            let k = max + 1;
            let mut masks = vec![0usize; k];
            for (x, &b) in rgs.iter().enumerate() {
                masks[b] |= 1 << x;
            }
            if masks.iter().all(|&m| good[m]) {
                out.push(masks);
            }
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            rec(i + 1, n, max.max(b), rgs, good, out);
        }
    }
    rgs[0] = 0;
    rec(1, n, 0, &mut rgs, &good, &mut supporting);
    let to_partition = |masks: &Vec<usize>| {
        Partition::new(n, masks.iter().map(|&m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect())
            .expect("restricted growth string yields a partition")
    };
    let best = supporting.iter().min_by_key(|m| m.len()).expect("singletons always support");
    let best = to_partition(best);
    for m in &supporting {
        if !to_partition(m).refines(&best) {
            return Err(Error::Inconsistent("two incomparable maximal supporting partitions".into()));
        }
    }
    Ok(best)
}

/// Merge engine: joins points lying in a common 2-set or 5-set whose product group
/// lies in `g`, then keeps only merged parts that are themselves supporting.
///
/// A union of two intersecting supporting parts is supporting, so maximal supporting
/// parts are exactly the connected components of supporting 2-sets and 5-sets
/// (every supporting part of size ≥ 2 is covered by such small subsets).
pub fn coarsest_spa_merge(g: &PermGroup, cap: usize) -> Result<Partition> {
    let n = g.degree();
    let el = g.enumerate(cap)?;
    let mut current = Partition::singletons(n);
    for a in 0..n {
        for b in a + 1..n {
            if part_is_good(&el, n, &[a, b]) {
                current = current.join(&Partition::new(n, pair_parts(n, &[a, b])).unwrap());
            }
        }
    }
    if n >= 5 {
        let mut combo = [0usize, 1, 2, 3, 4];
        loop {
            if part_is_good(&el, n, &combo) {
                current = current.join(&Partition::new(n, pair_parts(n, &combo)).unwrap());
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    // Components are unions of intersecting supporting sets; verify anyway.
    for p in current.parts() {
        if !part_is_good(&el, n, p) {
            return Err(Error::Inconsistent(format!("merged part {p:?} is not supporting")));
        }
    }
    Ok(current)
}

fn pair_parts(n: usize, set: &[usize]) -> Vec<Vec<usize>> {
    let mut parts = vec![set.to_vec()];
    parts.extend((0..n).filter(|x| !set.contains(x)).map(|x| vec![x]));
    parts
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Coarsest alternating supporting partition. Small domains use the exhaustive engine
/// and cross-check the merge engine; larger domains fall back to the merge engine alone.
pub fn coarsest_alt_supporting_partition(g: &PermGroup, cap: usize) -> Result<SpaResult> {
    let merged = coarsest_spa_merge(g, cap)?;
    if g.degree() <= EXHAUSTIVE_MAX_DEGREE {
        let exact = coarsest_spa_exhaustive(g, cap)?;
        if exact != merged {
            return Err(Error::Inconsistent(format!(
                "engines disagree: exhaustive {} vs merge {}",
                exact.to_one_based_string(),
                merged.to_one_based_string()
            )));
        }
        Ok(SpaResult { partition: exact, engine: SpaEngine::Exhaustive })
    } else {
        Ok(SpaResult { partition: merged, engine: SpaEngine::MergeHeuristic })
    }
}

/// Checks `∏ Sym/Alt(P) ≤ G ≤ Stab(SP_A(G))`.
pub fn sandwich_check(g: &PermGroup, cap: usize) -> Result<bool> {
    let spa = coarsest_alt_supporting_partition(g, cap)?.partition;
    if !is_alt_supporting(&spa, g, cap)? {
        return Ok(false);
    }
    let el = g.enumerate(cap)?;
    Ok(el.list().iter().all(|p| spa.apply(p) == spa))
}

/// Checks `σ SP_A(G) = SP_A(σ G σ⁻¹)`.
pub fn conjugate_partition_check(g: &PermGroup, sigma: &Perm, cap: usize) -> Result<bool> {
    let lhs = coarsest_alt_supporting_partition(g, cap)?.partition.apply(sigma);
    let rhs = coarsest_alt_supporting_partition(&g.conjugate(sigma), cap)?.partition;
    Ok(lhs == rhs)
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |a, b| a * b)
}

/// Exact size of the `Alt(n)`-orbit of `p`, with its shape class.
pub fn alt_partition_orbit_size(p: &Partition) -> Result<(BigUint, Shape)> {
    let n = p.degree();
    if n < 4 {
        return Err(Error::Parameter(format!("orbit formula requires n ≥ 4, got {n}")));
    }
    let mut mult: HashMap<usize, usize> = HashMap::new();
    for s in p.sizes() {
        *mult.entry(s).or_default() += 1;
    }
    let mut stab = BigUint::one();
    for (&s, &m) in &mult {
        stab *= factorial(m) * num_traits::pow(factorial(s), m);
    }
    // The setwise stabilizer in Sym(n) contains an odd permutation iff some part has
    // size ≥ 2 or two parts of equal odd size can be swapped by an odd product.
    let has_odd = mult.iter().any(|(&s, &m)| s >= 2 || (m >= 2 && s % 2 == 1));
    let stab_alt = if has_odd { stab / 2u32 } else { stab };
    let alt_order = factorial(n) / 2u32;
    Ok((alt_order / stab_alt, p.shape()))
}

/// The same orbit size by enumerating `Alt(n)` (intended for `n ≤ 7`).
pub fn alt_partition_orbit_by_enumeration(p: &Partition, cap: usize) -> Result<usize> {
    let g = PermGroup::alternating(p.degree());
    let el = g.enumerate(cap)?;
    let images: HashSet<Partition> = el.list().iter().map(|s| p.apply(s)).collect();
    Ok(images.len())
}

/// All set partitions of `0..n` (small `n` only).
pub fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        return vec![Partition::whole(0)];
    }
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, n: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == n {
            let mut parts = vec![Vec::new(); max + 1];
            for (x, &b) in rgs.iter().enumerate() {
                parts[b].push(x);
            }
            out.push(Partition::new(n, parts).unwrap());
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            rec(i + 1, n, max.max(b), rgs, out);
        }
    }
    rec(1, n, 0, &mut rgs, &mut out);
    out
}
