//! Normal-ordering engine for tensor products of (confluent) Verma modules over
//! truncated current algebras `sl₂ ⊗ ℂ[z]/z^{r+1}`.
//!
//! A basis vector is a PBW word: for each site a multiset of lowering indices q
//! standing for `∏ (f⊗z^q)` applied to the highest-weight vector.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Regular,
    /// Site at ∞: no `z⁰` part except `h⊗1`, and `e⊗z^r`, `f⊗z^r` act as zero.
    Primed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteSpec {
    pub rank: usize,
    pub flavor: Flavor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub sites: Vec<SiteSpec>,
}

impl AlgebraSpec {
    pub fn new(sites: Vec<SiteSpec>) -> Self {
        AlgebraSpec { sites }
    }

    fn f_killed(&self, site: usize, p: usize) -> bool {
        let s = self.sites[site];
        p > s.rank || (s.flavor == Flavor::Primed && (p == 0 || p >= s.rank))
    }

    fn e_killed(&self, site: usize, p: usize) -> bool {
        self.f_killed(site, p)
    }

    fn h_killed(&self, site: usize, p: usize) -> bool {
        p > self.sites[site].rank
    }
}

/// `γ_p` per site, as polynomials in t; index 0 at a primed site must be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HighestWeight<S> {
    pub gammas: Vec<Vec<Poly<S>>>,
}

impl<S: Scalar> HighestWeight<S> {
    pub fn validate(&self, spec: &AlgebraSpec) -> Result<()> {
        if self.gammas.len() != spec.sites.len() {
            return Err(Error::InvalidArgument("one gamma tuple per site".into()));
        }
        for (g, s) in self.gammas.iter().zip(&spec.sites) {
            if g.len() != s.rank + 1 {
                return Err(Error::InvalidArgument(format!("site of rank {} needs {} gammas", s.rank, s.rank + 1)));
            }
            if s.flavor == Flavor::Primed && !g[0].is_zero() {
                return Err(Error::InvalidArgument("(h⊗1)𝟏 must vanish at a primed site".into()));
            }
        }
        Ok(())
    }
}

pub type Word = Vec<Vec<usize>>;

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement<S> {
    pub terms: BTreeMap<Word, Poly<S>>,
}

impl<S: Scalar> ModuleElement<S> {
    pub fn zero() -> Self {
        ModuleElement { terms: BTreeMap::new() }
    }

    pub fn vacuum(spec: &AlgebraSpec) -> Self {
        Self::word(vec![Vec::new(); spec.sites.len()])
    }

    pub fn word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, Poly::constant(S::one()));
        ModuleElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Poly<S>) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(Poly::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Poly<S>) -> Self {
        let mut out = Self::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    pub fn coeff(&self, w: &Word) -> Poly<S> {
        self.terms.get(w).cloned().unwrap_or_else(Poly::zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    E,
    F,
    H,
}

/// `x ⊗ z^power` acting at `site`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GenKind,
    pub power: usize,
    pub site: usize,
}

pub fn e(power: usize, site: usize) -> Generator {
    Generator { kind: GenKind::E, power, site }
}
pub fn f(power: usize, site: usize) -> Generator {
    Generator { kind: GenKind::F, power, site }
}
pub fn h(power: usize, site: usize) -> Generator {
    Generator { kind: GenKind::H, power, site }
}

fn with_site(w: &Word, site: usize, fs: Vec<usize>) -> Word {
    let mut nw = w.clone();
    let mut fs = fs;
    fs.sort_unstable();
    nw[site] = fs;
    nw
}

fn act_word<S: Scalar>(spec: &AlgebraSpec, hw: &HighestWeight<S>, g: Generator, w: &Word) -> ModuleElement<S> {
    let site = g.site;
    let p = g.power;
    let fs = &w[site];
    let mut out = ModuleElement::zero();
    match g.kind {
        GenKind::F => {
            if !spec.f_killed(site, p) {
                let mut nf = fs.clone();
                nf.push(p);
                out.add_term(with_site(w, site, nf), Poly::constant(S::one()));
            }
        }
        GenKind::H => {
            if spec.h_killed(site, p) {
                return out;
            }
            out.add_term(w.clone(), hw.gammas[site][p].clone());
            // [h⊗z^p, f⊗z^q] = −2 f⊗z^{p+q}
            for j in 0..fs.len() {
                let q = fs[j] + p;
                if spec.f_killed(site, q) {
                    continue;
                }
                let mut nf = fs.clone();
                nf[j] = q;
                out.add_term(with_site(w, site, nf), Poly::constant(S::from_i64(-2)));
            }
        }
        GenKind::E => {
            if spec.e_killed(site, p) || fs.is_empty() {
                return out;
            }
            // e_p f_q R = h_{p+q} R + f_q e_p R
            let q = fs[0];
            let rest = with_site(w, site, fs[1..].to_vec());
            out = act_word(spec, hw, h(p + q, site), &rest);
            let inner = act_word(spec, hw, g, &rest);
            for (w2, c) in inner.terms {
                let mut nf = w2[site].clone();
                nf.push(q);
                out.add_term(with_site(&w2, site, nf), c);
            }
        }
    }
    out
}

/// Applies one generator to a module element and re-expresses the result in PBW words.
pub fn normal_order_apply<S: Scalar>(
    spec: &AlgebraSpec,
    hw: &HighestWeight<S>,
    g: Generator,
    elem: &ModuleElement<S>,
) -> Result<ModuleElement<S>> {
    if g.site >= spec.sites.len() {
        return Err(Error::InvalidArgument(format!("no site {}", g.site)));
    }
    let mut out = ModuleElement::zero();
    for (w, c) in &elem.terms {
        if w.len() != spec.sites.len() {
            return Err(Error::NotInSpan(format!("word {w:?} has the wrong number of sites")));
        }
        for (w2, c2) in act_word(spec, hw, g, w).terms {
            out.add_term(w2, &c2 * c);
        }
    }
    Ok(out)
}

/// `Σ coeff · g₁g₂⋯g_k` (rightmost generator acts first) plus `scalar · id`.
#[derive(Clone, Debug)]
pub struct OperatorExpr<S> {
    pub terms: Vec<(Poly<S>, Vec<Generator>)>,
    pub scalar: Poly<S>,
}

impl<S: Scalar> OperatorExpr<S> {
    pub fn new() -> Self {
        OperatorExpr { terms: Vec::new(), scalar: Poly::zero() }
    }

    pub fn term(mut self, c: Poly<S>, word: Vec<Generator>) -> Self {
        if !c.is_zero() {
            self.terms.push((c, word));
        }
        self
    }

    pub fn plus_scalar(mut self, c: Poly<S>) -> Self {
        self.scalar = &self.scalar + &c;
        self
    }

    pub fn apply(&self, spec: &AlgebraSpec, hw: &HighestWeight<S>, v: &ModuleElement<S>) -> Result<ModuleElement<S>> {
        let mut out = v.scale(&self.scalar);
        for (c, word) in &self.terms {
            let mut cur = v.clone();
            for g in word.iter().rev() {
                cur = normal_order_apply(spec, hw, *g, &cur)?;
                if cur.is_zero() {
                    break;
                }
            }
            out = out.add(&cur.scale(c));
        }
        Ok(out)
    }
}

impl<S: Scalar> Default for OperatorExpr<S> {
    fn default() -> Self {
        Self::new()
    }
}
