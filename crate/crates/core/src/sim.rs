//! End-to-end run of a PDA scheme on byte payloads.
//!
//! Each file is split into `F` packets. User `k` caches packet `j` of every
//! file when cell `(j, k)` is a star. For each symbol `s` the server sends
//! the XOR of `W_{d_k, j}` over the cells `(j, k)` holding `s`; a user
//! recovers a missing packet from the one signal that carries it by XOR-ing
//! out the other terms from its cache.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pda::{Cell, PdaGrid};

pub const DEFAULT_PACKET_LEN: usize = 64;

/// `N` files of `F` packets each, filled from a seeded generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileLibrary {
    files: usize,
    rows: usize,
    packet_len: usize,
    data: Vec<u8>,
}

impl FileLibrary {
    pub fn generate(files: usize, rows: usize, packet_len: usize, seed: u64) -> Result<Self> {
        if files == 0 || rows == 0 || packet_len == 0 {
            return Err(Error::params("library needs N, F and packet length ≥ 1"));
        }
        let len = files
            .checked_mul(rows)
            .and_then(|x| x.checked_mul(packet_len))
            .filter(|&x| x <= 1 << 30)
            .ok_or_else(|| Error::Overflow("library larger than 1 GiB".into()))?;
        let mut data = vec![0u8; len];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut data);
        Ok(FileLibrary {
            files,
            rows,
            packet_len,
            data,
        })
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn packet_len(&self) -> usize {
        self.packet_len
    }

    /// `W_{n,j}` (0-based).
    pub fn packet(&self, file: usize, row: usize) -> &[u8] {
        let start = (file * self.rows + row) * self.packet_len;
        &self.data[start..start + self.packet_len]
    }

    pub fn file(&self, file: usize) -> &[u8] {
        let size = self.rows * self.packet_len;
        &self.data[file * size..(file + 1) * size]
    }
}

/// `d_k` for each user (0-based file indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, files: usize) -> Result<Self> {
        if let Some(&bad) = demands.iter().find(|&&d| d >= files) {
            return Err(Error::params(format!("demand {} outside [1,{files}]", bad + 1)));
        }
        Ok(DemandVector(demands))
    }

    /// Parses a comma-separated list of 1-based file indices.
    pub fn parse(text: &str, files: usize) -> Result<Self> {
        let demands = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .and_then(|d| d.checked_sub(1))
                    .ok_or_else(|| Error::params(format!("bad demand `{}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(demands, files)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|d| d + 1).collect()
    }
}

/// What one user stores: packet `j` of every file for each cached row `j`.
#[derive(Clone, Debug)]
pub struct UserCache {
    pub user: usize,
    /// Cached rows, ascending.
    pub rows: Vec<usize>,
    packets: Vec<Vec<u8>>,
}

impl UserCache {
    pub fn get(&self, file: usize, row: usize) -> Option<&[u8]> {
        let pos = self.rows.binary_search(&row).ok()?;
        self.packets
            .get(file * self.rows.len() + pos)
            .map(|p| p.as_slice())
    }

    /// Number of packets held, `N·Z`.
    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }
}

pub fn place(grid: &PdaGrid, lib: &FileLibrary) -> Result<Vec<UserCache>> {
    if grid.rows() != lib.rows() {
        return Err(Error::params(format!(
            "grid has F = {} but the library has {} packets per file",
            grid.rows(),
            lib.rows()
        )));
    }
    Ok((0..grid.cols())
        .map(|k| {
            let rows: Vec<usize> = (0..grid.rows())
                .filter(|&j| grid.cell(j, k).is_star())
                .collect();
            let packets = (0..lib.files())
                .flat_map(|n| rows.iter().map(move |&j| lib.packet(n, j).to_vec()))
                .collect();
            UserCache {
                user: k,
                rows,
                packets,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub user: usize,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signal {
    /// The symbol this signal serves.
    pub id: u32,
    /// Cells holding the symbol, by user.
    pub terms: Vec<Term>,
    pub payload: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliveryTranscript {
    pub demand: DemandVector,
    pub signals: Vec<Signal>,
    /// For each user, `(row, signal id)` for every row it must receive.
    pub decode_log: Vec<Vec<(usize, u32)>>,
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    acc.iter_mut().zip(other).for_each(|(a, b)| *a ^= b);
}

/// Builds the signals for one demand. The grid is not re-verified; an
/// invalid grid shows up as a decode error.
pub fn deliver(grid: &PdaGrid, lib: &FileLibrary, demand: &DemandVector) -> Result<DeliveryTranscript> {
    if demand.len() != grid.cols() {
        return Err(Error::params(format!(
            "demand has {} entries for {} users",
            demand.len(),
            grid.cols()
        )));
    }
    if grid.rows() != lib.rows() || demand.as_slice().iter().any(|&d| d >= lib.files()) {
        return Err(Error::params("demand or grid does not match the library"));
    }
    let mut by_symbol: BTreeMap<u32, Vec<Term>> = BTreeMap::new();
    for j in 0..grid.rows() {
        for k in 0..grid.cols() {
            if let Cell::Symbol(s) = grid.cell(j, k) {
                by_symbol.entry(s).or_default().push(Term { user: k, row: j });
            }
        }
    }
    let mut decode_log = vec![Vec::new(); grid.cols()];
    let signals = by_symbol
        .into_iter()
        .map(|(id, mut terms)| {
            terms.sort();
            let mut payload = vec![0u8; lib.packet_len()];
            for t in &terms {
                xor_into(&mut payload, lib.packet(demand.as_slice()[t.user], t.row));
                decode_log[t.user].push((t.row, id));
            }
            Signal { id, terms, payload }
        })
        .collect();
    for log in &mut decode_log {
        log.sort();
    }
    Ok(DeliveryTranscript {
        demand: demand.clone(),
        signals,
        decode_log,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// The file each user reassembled.
    pub files: Vec<Vec<u8>>,
    /// True when every reassembled file equals the requested original.
    pub verified: bool,
}

/// One-shot decoding at every user, using only its cache and the signals.
pub fn decode(
    transcript: &DeliveryTranscript,
    caches: &[UserCache],
    lib: &FileLibrary,
) -> Result<DecodeOutcome> {
    let demand = transcript.demand.as_slice();
    let mut carrier: BTreeMap<Term, usize> = BTreeMap::new();
    for (i, sig) in transcript.signals.iter().enumerate() {
        for &t in &sig.terms {
            carrier.insert(t, i);
        }
    }
    let rows = lib.rows();
    let plen = lib.packet_len();
    let mut files = Vec::with_capacity(caches.len());
    for cache in caches {
        let k = cache.user;
        let want = demand[k];
        let mut out = vec![0u8; rows * plen];
        for j in 0..rows {
            let dst = &mut out[j * plen..(j + 1) * plen];
            if let Some(p) = cache.get(want, j) {
                dst.copy_from_slice(p);
                continue;
            }
            let &i = carrier
                .get(&Term { user: k, row: j })
                .ok_or(Error::Undeliverable { user: k + 1, row: j + 1 })?;
            let sig = &transcript.signals[i];
            dst.copy_from_slice(&sig.payload);
            for t in sig.terms.iter().filter(|t| t.user != k || t.row != j) {
                let p = cache
                    .get(demand[t.user], t.row)
                    .ok_or(Error::Decode {
                        signal: sig.id,
                        user: k + 1,
                        row: t.row + 1,
                    })?;
                xor_into(dst, p);
            }
        }
        files.push(out);
    }
    let verified = files
        .iter()
        .zip(demand)
        .all(|(f, &d)| f.as_slice() == lib.file(d));
    Ok(DecodeOutcome { files, verified })
}

/// Which demand vectors to try.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DemandSampler {
    /// All `N^K` vectors.
    All,
    /// `count` vectors drawn uniformly from a seeded generator.
    Random { count: usize, seed: u64 },
    Fixed(Vec<DemandVector>),
}

/// The `index`-th vector of `[N]^K` in lexicographic order.
fn nth_demand(mut index: u128, files: usize, users: usize) -> DemandVector {
    let mut d = vec![0; users];
    for slot in d.iter_mut().rev() {
        *slot = (index % files as u128) as usize;
        index /= files as u128;
    }
    DemandVector(d)
}

impl DemandSampler {
    /// Materialises the demand vectors. `All` is refused above a million.
    pub fn demands(&self, files: usize, users: usize) -> Result<Vec<DemandVector>> {
        match self {
            DemandSampler::All => {
                let total = (files as u128)
                    .checked_pow(users as u32)
                    .filter(|&t| t <= 1_000_000)
                    .ok_or_else(|| {
                        Error::Overflow(format!("{files}^{users} demands is too many to sweep"))
                    })?;
                Ok((0..total).map(|i| nth_demand(i, files, users)).collect())
            }
            DemandSampler::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| {
                        DemandVector(
                            (0..users)
                                .map(|_| (rng.next_u64() % files as u64) as usize)
                                .collect(),
                        )
                    })
                    .collect())
            }
            DemandSampler::Fixed(v) => {
                for d in v {
                    if d.len() != users || d.as_slice().iter().any(|&x| x >= files) {
                        return Err(Error::params("fixed demand does not fit K and N"));
                    }
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateMeasurement {
    pub demands_checked: usize,
    pub max_signals: usize,
    pub rows: usize,
    /// `max_signals / F`.
    pub rate: Ratio<u64>,
    /// True when every demand needed the same number of signals.
    pub constant: bool,
    /// True when every user decoded its file at every demand.
    pub all_decoded: bool,
}

/// Runs delivery and decoding for every sampled demand (in parallel) and
/// reports the worst-case load. The first failing demand in sampling order
/// determines the error, independent of scheduling.
pub fn measure_rate(grid: &PdaGrid, lib: &FileLibrary, sampler: &DemandSampler) -> Result<RateMeasurement> {
    let demands = sampler.demands(lib.files(), grid.cols())?;
    let caches = place(grid, lib)?;
    let results: Vec<Result<(usize, bool)>> = demands
        .par_iter()
        .map(|d| {
            let t = deliver(grid, lib, d)?;
            let out = decode(&t, &caches, lib)?;
            Ok((t.signals.len(), out.verified))
        })
        .collect();
    let mut counts = Vec::with_capacity(results.len());
    let mut all_decoded = true;
    for r in results {
        let (n, ok) = r?;
        counts.push(n);
        all_decoded &= ok;
    }
    let max_signals = counts.iter().copied().max().unwrap_or(0);
    Ok(RateMeasurement {
        demands_checked: counts.len(),
        max_signals,
        rows: grid.rows(),
        rate: Ratio::new(max_signals as u64, grid.rows() as u64),
        constant: counts.iter().all(|&c| c == max_signals),
        all_decoded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pda::text::parse_pda;

    fn eq3() -> PdaGrid {
        parse_pda("PDA 4 6\n* * * 1 2 3\n* 1 2 * * 4\n1 * 3 * 4 *\n2 3 * 4 * *\n").unwrap()
    }

    #[test]
    fn library_is_seeded() {
        let a = FileLibrary::generate(3, 4, 8, 7).unwrap();
        let b = FileLibrary::generate(3, 4, 8, 7).unwrap();
        let c = FileLibrary::generate(3, 4, 8, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.file(1).len(), 32);
    }

    #[test]
    fn caches_follow_stars() {
        let lib = FileLibrary::generate(6, 4, 8, 1).unwrap();
        let caches = place(&eq3(), &lib).unwrap();
        assert_eq!(caches[0].rows, vec![0, 1]);
        assert_eq!(caches[0].len(), 12);
        assert_eq!(caches[0].get(5, 1), Some(lib.packet(5, 1)));
        assert_eq!(caches[0].get(5, 2), None);
    }

    #[test]
    fn eq3_round_trip() {
        let g = eq3();
        let lib = FileLibrary::generate(6, 4, 16, 3).unwrap();
        let d = DemandVector::parse("1,2,3,4,5,6", 6).unwrap();
        let t = deliver(&g, &lib, &d).unwrap();
        assert_eq!(t.signals.len(), 4);
        let first: Vec<(usize, usize)> = t.signals[0].terms.iter().map(|t| (t.user, t.row)).collect();
        assert_eq!(first, vec![(0, 2), (1, 1), (3, 0)]);
        let out = decode(&t, &place(&g, &lib).unwrap(), &lib).unwrap();
        assert!(out.verified);
    }

    #[test]
    fn all_star_grid_sends_nothing() {
        let g = PdaGrid::all_stars(3, 2).unwrap();
        let lib = FileLibrary::generate(2, 3, 4, 0).unwrap();
        let m = measure_rate(&g, &lib, &DemandSampler::All).unwrap();
        assert_eq!(m.max_signals, 0);
        assert_eq!(m.rate, Ratio::new(0, 1));
        assert!(m.all_decoded);
    }

    #[test]
    fn broken_grid_fails_to_decode() {
        // Same symbol in one column: user 1 cannot cancel its own other row.
        let g = parse_pda("PDA 2 1\n1\n1\n").unwrap();
        let lib = FileLibrary::generate(1, 2, 4, 0).unwrap();
        let d = DemandVector::new(vec![0], 1).unwrap();
        let t = deliver(&g, &lib, &d).unwrap();
        let err = decode(&t, &place(&g, &lib).unwrap(), &lib).unwrap_err();
        assert!(matches!(err, Error::Decode { signal: 1, user: 1, .. }));
    }

    #[test]
    fn demand_parsing() {
        assert!(DemandVector::parse("1,0", 3).is_err());
        assert!(DemandVector::parse("1,4", 3).is_err());
        assert!(DemandVector::parse("1,x", 3).is_err());
        assert_eq!(DemandVector::parse(" 2 ,3", 3).unwrap().as_slice(), &[1, 2]);
    }

    #[test]
    fn sampler_counts() {
        assert_eq!(DemandSampler::All.demands(3, 2).unwrap().len(), 9);
        let r = DemandSampler::Random { count: 5, seed: 9 };
        assert_eq!(r.demands(4, 3).unwrap(), r.demands(4, 3).unwrap());
        assert!(DemandSampler::All.demands(10, 7).is_err());
    }
}
