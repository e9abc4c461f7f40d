//! Torus geometry, block regions, and the GF(2) star-group combinatorics that
//! feed every closed-form evaluator.
//!
//! Links are identified by the vertex they leave from: `h(x,y)` joins `(x,y)`
//! to `(x+1,y)` and `v(x,y)` joins `(x,y)` to `(x,y+1)`, coordinates mod `k`.
//! Link indices are row-major over vertices with the horizontal link first, so
//! `index = 2 (y k + x) + {0 for h, 1 for v}`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A link of the torus. Field order gives the derived `Ord` the same order as
/// [`Link::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub y: usize,
    pub x: usize,
    pub orientation: Orientation,
}

impl Link {
    pub fn h(x: usize, y: usize) -> Self {
        Self {
            x,
            y,
            orientation: Orientation::Horizontal,
        }
    }

    pub fn v(x: usize, y: usize) -> Self {
        Self {
            x,
            y,
            orientation: Orientation::Vertical,
        }
    }

    pub fn index(&self, k: usize) -> usize {
        let o = match self.orientation {
            Orientation::Horizontal => 0,
            Orientation::Vertical => 1,
        };
        2 * (self.y * k + self.x) + o
    }

    pub fn from_index(index: usize, k: usize) -> Self {
        let vertex = index / 2;
        let (x, y) = (vertex % k, vertex / k);
        if index % 2 == 0 {
            Self::h(x, y)
        } else {
            Self::v(x, y)
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.orientation {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
        };
        write!(f, "{tag}:{},{}", self.x, self.y)
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("malformed link identifier {s:?}"));
        let (tag, coords) = s.trim().split_once(':').ok_or_else(bad)?;
        let (x, y) = coords.split_once(',').ok_or_else(bad)?;
        let x: usize = x.trim().parse().map_err(|_| bad())?;
        let y: usize = y.trim().parse().map_err(|_| bad())?;
        match tag {
            "h" => Ok(Link::h(x, y)),
            "v" => Ok(Link::v(x, y)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Link {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Link {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bit vector over the links of a lattice; the GF(2) row type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkMask {
    words: Vec<u64>,
    len: usize,
}

impl LinkMask {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &LinkMask) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &LinkMask) -> LinkMask {
        Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    pub fn complement(&self) -> LinkMask {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Self {
            words,
            len: self.len,
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn lowest_set(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| 64 * i + w.trailing_zeros() as usize)
    }
}

/// Rank over GF(2) by elimination on the lowest set bit.
pub fn gf2_rank(rows: &[LinkMask]) -> usize {
    let mut pivots: Vec<(usize, LinkMask)> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (bit, p) in &pivots {
            if r.get(*bit) {
                r.xor_assign(p);
            }
        }
        // Each pivot is already reduced by its predecessors, so a single
        // forward pass keeps earlier pivot bits cleared.
        if let Some(bit) = r.lowest_set() {
            pivots.push((bit, r));
        }
    }
    pivots.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    k: usize,
}

impl TorusLattice {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!(
                "torus side k = {k} is too small (need k >= 2)"
            )));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_links(&self) -> usize {
        2 * self.k * self.k
    }

    pub fn n_stars(&self) -> usize {
        self.k * self.k
    }

    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        (0..self.n_links()).map(move |i| Link::from_index(i, self.k))
    }

    pub fn contains(&self, link: &Link) -> bool {
        link.x < self.k && link.y < self.k
    }

    /// Endpoints of a link, as vertex coordinates.
    pub fn endpoints(&self, link: &Link) -> [(usize, usize); 2] {
        let k = self.k;
        match link.orientation {
            Orientation::Horizontal => [(link.x, link.y), ((link.x + 1) % k, link.y)],
            Orientation::Vertical => [(link.x, link.y), (link.x, (link.y + 1) % k)],
        }
    }

    /// The four links meeting at vertex `(x, y)`.
    pub fn star_links(&self, x: usize, y: usize) -> [Link; 4] {
        let k = self.k;
        [
            Link::h(x, y),
            Link::h((x + k - 1) % k, y),
            Link::v(x, y),
            Link::v(x, (y + k - 1) % k),
        ]
    }

    /// The four links bounding the face whose lower-left corner is `(x, y)`.
    pub fn plaquette_links(&self, x: usize, y: usize) -> [Link; 4] {
        let k = self.k;
        [
            Link::h(x, y),
            Link::h(x, (y + 1) % k),
            Link::v(x, y),
            Link::v((x + 1) % k, y),
        ]
    }

    /// Vertices in row-major order; star `s` sits at `(s % k, s / k)`.
    pub fn vertex(&self, s: usize) -> (usize, usize) {
        (s % self.k, s / self.k)
    }

    pub fn star_mask(&self, x: usize, y: usize) -> LinkMask {
        self.mask_of(self.star_links(x, y).iter())
    }

    pub fn mask_of<'a>(&self, links: impl IntoIterator<Item = &'a Link>) -> LinkMask {
        let mut m = LinkMask::zeros(self.n_links());
        for l in links {
            m.set(l.index(self.k));
        }
        m
    }

    fn check_subset(&self, subset: &BTreeSet<Link>) -> Result<()> {
        match subset.iter().find(|l| !self.contains(l)) {
            Some(l) => Err(Error::InvalidInput(format!(
                "link {l} lies outside the {0}x{0} torus",
                self.k
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRegion {
    pub l: usize,
    pub links: BTreeSet<Link>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaCounts {
    pub sigma_a: u64,
    pub sigma_b: u64,
    pub sigma_ab: u64,
}

impl SigmaCounts {
    pub fn n_stars(&self) -> u64 {
        self.sigma_a + self.sigma_b + self.sigma_ab
    }
}

/// Base-2 exponents of |G|, d_A, d_B and f = |G| / d_B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCombinatorics {
    pub log2_g: u64,
    pub log2_da: u64,
    pub log2_db: u64,
    pub log2_f: u64,
}

impl RegionCombinatorics {
    /// Exponents of a region whose star counts are known. Valid whenever the
    /// stars acting only on A (resp. B) are independent, as for blocks.
    pub fn from_sigma(s: &SigmaCounts) -> Result<Self> {
        if s.sigma_ab == 0 {
            return Err(Error::InvalidInput(
                "region has no boundary stars; f = |G|/d_B is not defined by the star counts".into(),
            ));
        }
        Ok(Self {
            log2_g: s.n_stars() - 1,
            log2_da: s.sigma_a,
            log2_db: s.sigma_b,
            log2_f: s.sigma_ab - 1 + s.sigma_a,
        })
    }
}

fn check_block(k: usize, l: usize) -> Result<()> {
    let fits = l >= 1 && k >= l + 2 && k * k >= l * l + 4 * l;
    if fits {
        Ok(())
    } else {
        Err(Error::BlockTooLarge { k, l })
    }
}

/// Star counts of an `L x L` block of sites on the `k x k` torus.
pub fn block_sigma(k: usize, l: usize) -> Result<SigmaCounts> {
    check_block(k, l)?;
    let (k, l) = (k as u64, l as u64);
    Ok(SigmaCounts {
        sigma_a: l * l,
        sigma_b: k * k - l * l - 4 * l,
        sigma_ab: 4 * l,
    })
}

/// All links incident to at least one vertex of the block `{0..L-1}^2`.
pub fn enumerate_block_links(k: usize, l: usize) -> Result<BlockRegion> {
    check_block(k, l)?;
    let lattice = TorusLattice::new(k)?;
    let mut links = BTreeSet::new();
    for y in 0..l {
        for x in 0..l {
            links.extend(lattice.star_links(x, y));
        }
    }
    Ok(BlockRegion { l, links })
}

/// Classifies every star by where its links fall: only in A, only in B, or both.
pub fn classify_stars(lattice: &TorusLattice, subset: &BTreeSet<Link>) -> SigmaCounts {
    let mut counts = SigmaCounts {
        sigma_a: 0,
        sigma_b: 0,
        sigma_ab: 0,
    };
    for s in 0..lattice.n_stars() {
        let (x, y) = lattice.vertex(s);
        let inside = lattice
            .star_links(x, y)
            .iter()
            .filter(|l| subset.contains(l))
            .count();
        match inside {
            4 => counts.sigma_a += 1,
            0 => counts.sigma_b += 1,
            _ => counts.sigma_ab += 1,
        }
    }
    counts
}

/// Group exponents for an arbitrary link subset A, by GF(2) rank.
///
/// G is generated by every star except the last vertex's. An element acts
/// trivially on B exactly when its coefficient vector lies in the null space
/// of the generators restricted to B, so `log2 d_A = (n_s - 1) - rank(S|_B)`.
pub fn subset_combinatorics(
    lattice: &TorusLattice,
    subset: &BTreeSet<Link>,
) -> Result<RegionCombinatorics> {
    lattice.check_subset(subset)?;
    let a_mask = lattice.mask_of(subset);
    let b_mask = a_mask.complement();
    let generators: Vec<LinkMask> = (0..lattice.n_stars() - 1)
        .map(|s| {
            let (x, y) = lattice.vertex(s);
            lattice.star_mask(x, y)
        })
        .collect();
    let n_gen = generators.len();
    let on_b: Vec<LinkMask> = generators.iter().map(|g| g.and(&b_mask)).collect();
    let on_a: Vec<LinkMask> = generators.iter().map(|g| g.and(&a_mask)).collect();
    let log2_da = (n_gen - gf2_rank(&on_b)) as u64;
    let log2_db = (n_gen - gf2_rank(&on_a)) as u64;
    let log2_g = n_gen as u64;
    Ok(RegionCombinatorics {
        log2_g,
        log2_da,
        log2_db,
        log2_f: log2_g - log2_db,
    })
}

/// Region selector used on the command line: `block:L`, `star:x,y`, or
/// `links:h:0,0;v:1,0;...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetSpec {
    Block(usize),
    Star(usize, usize),
    Links(Vec<Link>),
}

impl SubsetSpec {
    pub fn resolve(&self, lattice: &TorusLattice) -> Result<BTreeSet<Link>> {
        let set: BTreeSet<Link> = match self {
            SubsetSpec::Block(l) => enumerate_block_links(lattice.k(), *l)?.links,
            SubsetSpec::Star(x, y) => {
                if *x >= lattice.k() || *y >= lattice.k() {
                    return Err(Error::InvalidInput(format!(
                        "vertex ({x},{y}) lies outside the torus"
                    )));
                }
                lattice.star_links(*x, *y).into_iter().collect()
            }
            SubsetSpec::Links(links) => links.iter().copied().collect(),
        };
        lattice.check_subset(&set)?;
        Ok(set)
    }
}

impl FromStr for SubsetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidInput(format!(
                "subset {s:?} is not one of block:L, star:x,y, links:<h:x,y;v:x,y;...>"
            ))
        };
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "block" => rest.trim().parse().map(SubsetSpec::Block).map_err(|_| bad()),
            "star" => {
                let (x, y) = rest.split_once(',').ok_or_else(bad)?;
                let x = x.trim().parse().map_err(|_| bad())?;
                let y = y.trim().parse().map_err(|_| bad())?;
                Ok(SubsetSpec::Star(x, y))
            }
            "links" => rest
                .split(|c: char| c == ';' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<Link>>>()
                .map(SubsetSpec::Links),
            _ => Err(bad()),
        }
    }
}
