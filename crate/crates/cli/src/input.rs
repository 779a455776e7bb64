use discord_witness::linalg::random_state;
use discord_witness::oracle::random_classical_quantum;
use discord_witness::{io, states, BipartiteState, Error, NumericConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::InputArgs;

/// Where a state came from, plus a content hash of the validated matrix.
#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub source: String,
    pub dims: [usize; 2],
    pub fingerprint: String,
}

pub fn load(args: &InputArgs, seed: u64, cfg: &NumericConfig) -> Result<(BipartiteState, InputInfo), Error> {
    let (state, source) = match (&args.input, &args.generator) {
        (Some(path), None) => (io::read_state(path, cfg)?, format!("file:{}", path.display())),
        (None, Some(spec)) => (generate(spec, seed)?, format!("gen:{spec}")),
        _ => unreachable!("clap enforces exactly one input source"),
    };
    let info = describe(&state, source);
    Ok((state, info))
}

pub fn describe(state: &BipartiteState, source: String) -> InputInfo {
    let (da, db) = state.dims();
    InputInfo { source, dims: [da, db], fingerprint: fingerprint(state) }
}

/// SHA-256 over the dims and the bit patterns of every entry, row-major.
pub fn fingerprint(state: &BipartiteState) -> String {
    let mut h = Sha256::new();
    let (da, db) = state.dims();
    h.update((da as u64).to_le_bytes());
    h.update((db as u64).to_le_bytes());
    let m = state.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            h.update(m[(i, j)].re.to_bits().to_le_bytes());
            h.update(m[(i, j)].im.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn parse_dims(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::InvalidParameter(format!("dimensions must look like 2x3, got '{s}'"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

/// Builds a state from a generator spec.
pub fn generate(spec: &str, seed: u64) -> Result<BipartiteState, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["bell"] => Ok(states::bell()),
        ["werner", p] => {
            let p: f64 = p.parse().map_err(|_| Error::InvalidParameter(format!("bad Werner weight '{p}'")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("Werner weight {p} outside [0, 1]")));
            }
            states::werner(p)
        }
        ["mixed", dims] => {
            let (da, db) = parse_dims(dims)?;
            states::maximally_mixed(da, db)
        }
        ["random", dims] => {
            let (da, db) = parse_dims(dims)?;
            random_state(da, db, da * db, seed)
        }
        ["random", dims, rank] => {
            let (da, db) = parse_dims(dims)?;
            let rank = rank.parse().map_err(|_| Error::InvalidParameter(format!("bad rank '{rank}'")))?;
            random_state(da, db, rank, seed)
        }
        ["cq", dims] => {
            let (da, db) = parse_dims(dims)?;
            random_classical_quantum(da, db, da, seed)
        }
        _ => Err(Error::InvalidParameter(format!("unknown generator '{spec}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(generate("bell", 0).unwrap().dims(), (2, 2));
        assert_eq!(generate("random:2x3", 4).unwrap().dims(), (2, 3));
        assert_eq!(generate("random:3x2:1", 4).unwrap().spectrum().iter().filter(|&&l| l > 1e-10).count(), 1);
        assert_eq!(generate("cq:2x3", 1).unwrap().dims(), (2, 3));
        assert!(generate("werner:1.5", 0).is_err());
        assert!(generate("random:2by3", 0).is_err());
        assert!(generate("ghz", 0).is_err());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = generate("random:2x2", 1).unwrap();
        let b = generate("random:2x2", 2).unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&a.clone()));
        assert_ne!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).len(), 64);
    }
}
