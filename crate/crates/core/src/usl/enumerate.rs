//! Enumeration of labeled join-generated USLs ("diagrams").
//!
//! A USL generated by `n` labeled generators and 0 is determined by the
//! atomic facts `g <= join(T)` for generators `g` and generator subsets `T`.
//! Closed under the three rules (`g ∈ T`; enlarging `T`; transitivity through
//! `T`), those facts are exactly a closure operator `cl` on subsets, with
//! `g <= join(T)` iff `g ∈ cl(T)`. The elements are the closed sets. So we
//! enumerate closure systems: families of subsets containing the full set and
//! closed under intersection.
//!
//! The search visits subsets in decreasing bitmask order. A subset is forced
//! into the family exactly when it is the intersection of the members above
//! it, otherwise it is a free choice. Every branch ends in a distinct closure
//! system, so there are no dead ends in the unconstrained search.

use std::ops::ControlFlow;

use super::{canonicalize, CanonicalKey, Element, FiniteUsl, GeneratorValuation, UslEmbedding, UslError};

/// Largest generator count the bitmap search supports (2^6 subsets fit a u64).
pub const MAX_GENERATORS: usize = 6;

/// Result of a capped enumeration. `truncated` is set whenever some
/// structure was skipped because its carrier exceeded the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub truncated: bool,
}

/// A USL generated by `n` labeled generators, presented by its closure map
/// on generator subsets (bitmasks).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    generators: usize,
    closure: Vec<u8>,
}

impl Diagram {
    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn closure(&self, mask: u32) -> u32 {
        self.closure[mask as usize] as u32
    }

    /// `join(s) <= join(t)` for generator subsets `s`, `t`.
    pub fn leq_masks(&self, s: u32, t: u32) -> bool {
        s & !self.closure(t) == 0
    }

    /// Closed sets in first-appearance order; index in this list is the
    /// canonical element index.
    pub fn closed_sets(&self) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        let mut seen = 0u64;
        for mask in 0..self.closure.len() {
            let c = self.closure[mask];
            if seen >> c & 1 == 0 {
                seen |= 1 << c;
                out.push(c as u32);
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.closed_sets().len()
    }

    /// The canonical element index of `join(mask)`.
    pub fn element_of(&self, mask: u32) -> Element {
        let c = self.closure(mask);
        self.closed_sets().iter().position(|&s| s == c).expect("closure is a closed set")
    }

    /// Canonically labeled USL plus the valuation `names[i] -> join({i})`.
    pub fn to_usl(&self, names: &[String]) -> Result<(FiniteUsl, GeneratorValuation), UslError> {
        if names.len() != self.generators {
            return Err(UslError::Valuation(format!("{} names for {} generators", names.len(), self.generators)));
        }
        let sets = self.closed_sets();
        let n = sets.len();
        let index = |c: u32| sets.iter().position(|&s| s == c).unwrap();
        let leq = (0..n).map(|a| (0..n).map(|b| sets[a] & !sets[b] == 0).collect()).collect();
        let join = (0..n).map(|a| (0..n).map(|b| index(self.closure(sets[a] | sets[b]))).collect()).collect();
        let usl = FiniteUsl::from_tables(leq, join)?;
        let val = GeneratorValuation::new(
            names.iter().enumerate().map(|(i, name)| (name.clone(), self.element_of(1 << i))).collect(),
        )?;
        Ok((usl, val))
    }

    pub fn canonical_key(&self, names: &[String]) -> Result<CanonicalKey, UslError> {
        let (u, v) = self.to_usl(names)?;
        canonicalize(&u, Some(&v))
    }

    /// Diagram of a USL together with a generating valuation.
    pub fn from_usl(u: &FiniteUsl, v: &GeneratorValuation) -> Result<Diagram, UslError> {
        if v.len() > MAX_GENERATORS {
            return Err(UslError::Valuation(format!(
                "{} generators exceed the supported maximum {MAX_GENERATORS}",
                v.len()
            )));
        }
        if !v.generates(u) {
            return Err(UslError::Valuation("valuation does not generate the carrier".into()));
        }
        let targets: Vec<Element> = v.targets().collect();
        let n = targets.len();
        let join_of = |mask: u32| u.join_all((0..n).filter(|i| mask >> i & 1 == 1).map(|i| targets[i]));
        let closure = (0..1u32 << n)
            .map(|t| {
                let top = join_of(t);
                (0..n).filter(|&g| u.leq(targets[g], top)).fold(0u8, |acc, g| acc | 1 << g)
            })
            .collect();
        Ok(Diagram { generators: n, closure })
    }

    /// Total order used for deterministic reporting: size, then order
    /// matrix, then generator targets (all in canonical labeling).
    pub fn sort_key(&self) -> (usize, Vec<bool>, Vec<Element>) {
        let sets = self.closed_sets();
        let mut leq = Vec::with_capacity(sets.len() * sets.len());
        for &a in &sets {
            for &b in &sets {
                leq.push(a & !b == 0);
            }
        }
        let targets = (0..self.generators).map(|i| self.element_of(1 << i)).collect();
        (sets.len(), leq, targets)
    }

    /// End extensions by `j` fresh generators (bits `n..n+j`), streamed to
    /// `visit`. Returns true when some structure was skipped by the cap.
    pub fn for_each_end_extension(
        &self,
        j: usize,
        cap: usize,
        mut visit: impl FnMut(&Diagram) -> ControlFlow<()>,
    ) -> bool {
        let n = self.generators + j;
        assert!(n <= MAX_GENERATORS, "too many generators");
        let mut family = 0u64;
        for c in self.closed_sets() {
            family |= 1 << c;
        }
        let search = Search::new(n, Some(Base { k: self.generators, family }));
        let mut truncated = false;
        let _ = search.run(&mut |members| {
            if members.count_ones() as usize > cap {
                truncated = true;
                return ControlFlow::Continue(());
            }
            let d = search.diagram(members);
            if !search.is_end_extension(&d, members) {
                return ControlFlow::Continue(());
            }
            visit(&d)
        });
        truncated
    }
}

#[derive(Clone, Copy)]
struct Base {
    k: usize,
    family: u64,
}

struct Search {
    n: usize,
    supersets: Vec<u64>,
    lacking: Vec<u64>,
    base: Option<Base>,
}

impl Search {
    fn new(n: usize, base: Option<Base>) -> Self {
        let count = 1usize << n;
        let supersets =
            (0..count).map(|m| (0..count).filter(|&s| s & m == m).fold(0u64, |acc, s| acc | 1 << s)).collect();
        let lacking =
            (0..n).map(|b| (0..count).filter(|&s| s >> b & 1 == 0).fold(0u64, |acc, s| acc | 1 << s)).collect();
        Search { n, supersets, lacking, base }
    }

    fn run(&self, visit: &mut dyn FnMut(u64) -> ControlFlow<()>) -> ControlFlow<()> {
        self.step((1i32 << self.n) - 1, 0, 0, visit)
    }

    /// True when `mask` equals the intersection of the members above it.
    fn forced(&self, mask: usize, members: u64) -> bool {
        let above = members & self.supersets[mask];
        (0..self.n).filter(|&b| mask >> b & 1 == 0).all(|b| above & self.lacking[b] != 0)
    }

    fn step(
        &self,
        mask: i32,
        members: u64,
        covered: u64,
        visit: &mut dyn FnMut(u64) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if mask < 0 {
            return visit(members);
        }
        let m = mask as usize;
        let forced = self.forced(m, members);
        let (may_include, may_exclude, proj) = match self.base {
            None => (true, !forced, 0),
            Some(Base { k, family }) => {
                let proj = m & ((1 << k) - 1);
                let in_family = family >> proj & 1 == 1;
                let must_include = m == proj && in_family && covered >> proj & 1 == 0;
                (in_family, !forced && !must_include, proj)
            }
        };
        if may_include {
            self.step(mask - 1, members | 1 << m, covered | 1 << proj, visit)?;
        }
        if may_exclude {
            self.step(mask - 1, members, covered, visit)?;
        }
        ControlFlow::Continue(())
    }

    fn diagram(&self, members: u64) -> Diagram {
        let closure = (0..1usize << self.n)
            .map(|t| {
                let above = members & self.supersets[t];
                (0..self.n)
                    .filter(|&b| t >> b & 1 == 0 && above & self.lacking[b] == 0)
                    .fold(t as u8, |acc, b| acc | 1 << b)
            })
            .collect();
        Diagram { generators: self.n, closure }
    }

    /// No closed set below the top of the base image lies outside the image.
    fn is_end_extension(&self, d: &Diagram, members: u64) -> bool {
        let Some(Base { k, .. }) = self.base else {
            return true;
        };
        let xmask = (1u32 << k) - 1;
        let top = d.closure(xmask);
        (0..1u32 << self.n).filter(|&f| members >> f & 1 == 1 && f & !top == 0).all(|f| d.closure(f & xmask) == f)
    }
}

fn sorted(mut items: Vec<Diagram>) -> Vec<Diagram> {
    let mut keyed: Vec<_> = items.drain(..).map(|d| (d.sort_key(), d)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, d)| d).collect()
}

/// All labeled diagrams on `k` generators with carrier at most `cap`,
/// sorted by [`Diagram::sort_key`].
pub fn enumerate_generated(k: usize, cap: usize) -> Result<Enumeration<Diagram>, UslError> {
    if k > MAX_GENERATORS {
        return Err(UslError::Valuation(format!("{k} generators exceed the supported maximum {MAX_GENERATORS}")));
    }
    let search = Search::new(k, None);
    let mut items = Vec::new();
    let mut truncated = false;
    let _ = search.run(&mut |members| {
        if members.count_ones() as usize > cap {
            truncated = true;
        } else {
            items.push(search.diagram(members));
        }
        ControlFlow::Continue(())
    });
    Ok(Enumeration { items: sorted(items), truncated })
}

/// One end extension of a base USL, with the induced embedding of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndExtension {
    pub usl: FiniteUsl,
    pub valuation: GeneratorValuation,
    pub embedding: UslEmbedding,
    pub diagram: Diagram,
}

/// End extensions of `(m, mv)` by generators named `new_names`, one per
/// isomorphism class fixing the valuations, sorted by diagram order.
pub fn enumerate_end_extensions(
    m: &FiniteUsl,
    mv: &GeneratorValuation,
    new_names: &[String],
    cap: usize,
) -> Result<Enumeration<EndExtension>, UslError> {
    let base = Diagram::from_usl(m, mv)?;
    let j = new_names.len();
    if base.generators + j > MAX_GENERATORS {
        return Err(UslError::Valuation(format!(
            "{} generators exceed the supported maximum {MAX_GENERATORS}",
            base.generators + j
        )));
    }
    let names: Vec<String> = mv.names().map(str::to_string).chain(new_names.iter().cloned()).collect();
    // validates distinctness of the combined names
    GeneratorValuation::new(names.iter().map(|n| (n.clone(), 0)).collect())?;

    let mut diagrams = Vec::new();
    let truncated = base.for_each_end_extension(j, cap, |d| {
        diagrams.push(d.clone());
        ControlFlow::Continue(())
    });
    let k = base.generators;
    let mut items = Vec::with_capacity(diagrams.len());
    for d in sorted(diagrams) {
        let (usl, valuation) = d.to_usl(&names)?;
        let mut map = vec![usize::MAX; m.size()];
        let targets: Vec<Element> = mv.targets().collect();
        for mask in 0..1u32 << k {
            let src = m.join_all((0..k).filter(|i| mask >> i & 1 == 1).map(|i| targets[i]));
            map[src] = d.element_of(mask);
        }
        let embedding = UslEmbedding { source: m.clone(), dest: usl.clone(), map };
        items.push(EndExtension { usl, valuation, embedding, diagram: d });
    }
    Ok(Enumeration { items, truncated })
}
