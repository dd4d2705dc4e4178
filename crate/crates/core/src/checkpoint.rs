//! Persisted progress of a weight-table pass.
//!
//! The file is canonical JSON: fixed field order, chunks and entries sorted,
//! big integers as decimal strings, one trailing newline.
//!
//! ```json
//! {"format":"bsize-weight-table","version":1,"n":40,"k":8,
//!  "completed_chunks":[[1,40],[2,20]],"partitions":2,
//!  "entries":[["0","-5"],["76904685","1"]]}
//! ```
//!
//! Files are written and read as streams, so a checkpoint never has to fit
//! in memory as text.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::de::{self, DeserializeSeed, Deserializer, MapAccess, SeqAccess, Visitor};

use crate::basesize::WeightTable;
use crate::error::{Error, Result};
use crate::store::Accumulator;

pub const FORMAT: &str = "bsize-weight-table";
pub const VERSION: u32 = 1;

/// A unit of the partition pass: all partitions whose largest part is
/// `largest`, occurring exactly `mult` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChunkId {
    pub largest: u32,
    pub mult: u32,
}

/// Completed chunks plus the weights they contributed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub completed: BTreeSet<ChunkId>,
    pub partitions: u64,
    pub weights: WeightTable,
}

impl Checkpoint {
    pub fn n(&self) -> u32 {
        self.weights.n()
    }

    pub fn k(&self) -> u32 {
        self.weights.k()
    }

    pub fn write_to(&self, out: impl Write) -> io::Result<()> {
        write_parts(
            out,
            self.n(),
            self.k(),
            &self.completed,
            self.partitions,
            self.weights.entries(),
        )
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("checkpoints are ASCII")
    }

    /// Parses a checkpoint; `origin` is only used in error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        Self::read_from(text.as_bytes(), origin)
    }

    pub fn read_from(input: impl Read, origin: &Path) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_reader(input);
        let bad = |e: serde_json::Error| Error::Checkpoint {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        };
        let cp = de.deserialize_map(CheckpointVisitor).map_err(bad)?;
        de.end().map_err(bad)?;
        Ok(cp)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Checkpoint {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::read_from(BufReader::new(file), path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_atomically(path, |out| self.write_to(out))
    }
}

/// Writes the canonical layout; `entries` must be ascending and nonzero.
pub(crate) fn write_parts(
    mut out: impl Write,
    n: u32,
    k: u32,
    completed: &BTreeSet<ChunkId>,
    partitions: u64,
    entries: impl Iterator<Item = (BigUint, BigInt)>,
) -> io::Result<()> {
    write!(
        out,
        "{{\"format\":\"{FORMAT}\",\"version\":{VERSION},\"n\":{n},\"k\":{k},\"completed_chunks\":["
    )?;
    for (i, c) in completed.iter().enumerate() {
        let sep = if i == 0 { "" } else { "," };
        write!(out, "{sep}[{},{}]", c.largest, c.mult)?;
    }
    write!(out, "],\"partitions\":{partitions},\"entries\":[")?;
    for (i, (m, w)) in entries.enumerate() {
        let sep = if i == 0 { "" } else { "," };
        write!(out, "{sep}[\"{m}\",\"{w}\"]")?;
    }
    writeln!(out, "]}}")?;
    out.flush()
}

/// Writes via a sibling temporary file and a rename, so a crash never
/// leaves a truncated checkpoint behind.
pub(crate) fn save_atomically(
    path: &Path,
    write: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let mut out = BufWriter::new(File::create(&tmp)?);
    write(&mut out)?;
    out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct CheckpointVisitor;

impl<'de> Visitor<'de> for CheckpointVisitor {
    type Value = Checkpoint;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a {FORMAT} object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Checkpoint, A::Error> {
        let (mut version, mut n, mut k, mut partitions) = (None, None, None, None);
        let mut format: Option<String> = None;
        let mut completed: Option<Vec<(u32, u32)>> = None;
        let mut weights: Option<Accumulator> = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "format" => {
                    let f: String = map.next_value()?;
                    if f != FORMAT {
                        return Err(de::Error::custom(format!(
                            "unrecognised format {f:?}, expected {FORMAT:?}"
                        )));
                    }
                    format = Some(f);
                }
                "version" => {
                    let v: u64 = map.next_value()?;
                    if v != u64::from(VERSION) {
                        return Err(de::Error::custom(format!(
                            "unsupported format version {v}, expected {VERSION}"
                        )));
                    }
                    version = Some(v);
                }
                "n" => n = Some(map.next_value::<u32>()?),
                "k" => k = Some(map.next_value::<u32>()?),
                "completed_chunks" => completed = Some(map.next_value()?),
                "partitions" => partitions = Some(map.next_value::<u64>()?),
                "entries" => {
                    let n = n.ok_or_else(|| de::Error::custom("entries must follow n"))?;
                    let mut acc = Accumulator::new(n);
                    map.next_value_seed(EntriesSeed(&mut acc))?;
                    weights = Some(acc);
                }
                other => return Err(de::Error::unknown_field(other, FIELDS)),
            }
        }
        if format.is_none() {
            return Err(de::Error::missing_field("format"));
        }
        if version.is_none() {
            return Err(de::Error::missing_field("version"));
        }
        let n = n.ok_or_else(|| de::Error::missing_field("n"))?;
        let k = k.ok_or_else(|| de::Error::missing_field("k"))?;
        let completed = completed.ok_or_else(|| de::Error::missing_field("completed_chunks"))?;
        let partitions = partitions.ok_or_else(|| de::Error::missing_field("partitions"))?;
        let weights = weights.ok_or_else(|| de::Error::missing_field("entries"))?;
        Ok(Checkpoint {
            completed: completed
                .into_iter()
                .map(|(largest, mult)| ChunkId { largest, mult })
                .collect(),
            partitions,
            weights: WeightTable::from_store(n, k, weights.into_store()),
        })
    }
}

const FIELDS: &[&str] = &[
    "format",
    "version",
    "n",
    "k",
    "completed_chunks",
    "partitions",
    "entries",
];

/// Streams `[["m","w"], ...]` straight into an accumulator.
struct EntriesSeed<'a>(&'a mut Accumulator);

impl<'de> DeserializeSeed<'de> for EntriesSeed<'_> {
    type Value = ();

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<(), D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for EntriesSeed<'_> {
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a list of [fix count, weight] decimal string pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<(), A::Error> {
        let mut last: Option<BigUint> = None;
        while let Some((m, w)) = seq.next_element::<(String, String)>()? {
            let m = BigUint::from_str(&m)
                .map_err(|_| de::Error::custom(format!("bad fix count {m:?}")))?;
            let w =
                BigInt::from_str(&w).map_err(|_| de::Error::custom(format!("bad weight {w:?}")))?;
            if last.as_ref().is_some_and(|prev| *prev >= m) {
                return Err(de::Error::custom(format!(
                    "entries are not strictly ascending at fix count {m}"
                )));
            }
            self.0
                .add_weight(m.clone(), &w)
                .map_err(de::Error::custom)?;
            last = Some(m);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Checkpoint {
        Checkpoint {
            completed: [
                ChunkId {
                    largest: 12,
                    mult: 1,
                },
                ChunkId {
                    largest: 5,
                    mult: 2,
                },
            ]
            .into_iter()
            .collect(),
            partitions: 7,
            weights: WeightTable::from_entries(
                12,
                3,
                [
                    (BigUint::from(0u32), BigInt::from(-4)),
                    (BigUint::from(220u32), BigInt::from(1)),
                ],
            )
            .unwrap(),
        }
    }

    #[test]
    fn canonical_layout() {
        assert_eq!(
            sample().to_json(),
            "{\"format\":\"bsize-weight-table\",\"version\":1,\"n\":12,\"k\":3,\
             \"completed_chunks\":[[5,2],[12,1]],\"partitions\":7,\
             \"entries\":[[\"0\",\"-4\"],[\"220\",\"1\"]]}\n"
        );
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let p = Path::new("cp.json");
        let v2 = sample().to_json().replace("\"version\":1", "\"version\":2");
        let err = Checkpoint::from_json(&v2, p).unwrap_err().to_string();
        assert!(err.contains("unsupported format version"), "{err}");
        assert!(Checkpoint::from_json("{", p).is_err());
        assert!(Checkpoint::from_json("{\"format\":\"other\",\"version\":1}", p).is_err());
        let bad_num = sample().to_json().replace("\"-4\"", "\"-4x\"");
        assert!(Checkpoint::from_json(&bad_num, p).is_err());
        let unsorted = sample()
            .to_json()
            .replace("[\"220\",\"1\"]", "[\"0\",\"1\"]");
        let err = Checkpoint::from_json(&unsorted, p).unwrap_err().to_string();
        assert!(err.contains("ascending"), "{err}");
        let huge = sample()
            .to_json()
            .replace("\"-4\"", &format!("\"{}\"", BigInt::from(1) << 200));
        assert!(Checkpoint::from_json(&huge, p).is_err());
        let trailing = sample().to_json() + "{}";
        assert!(Checkpoint::from_json(&trailing, p).is_err());
    }

    #[test]
    fn save_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        sample().save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), sample());
    }

    proptest! {
        #[test]
        fn json_round_trip(
            n in 40u32..200,
            k in 0u32..100,
            chunks in prop::collection::btree_set((1u32..200, 1u32..200), 0..20),
            entries in prop::collection::btree_map(any::<u128>(), any::<i128>(), 0..20),
        ) {
            let entries = entries
                .into_iter()
                .filter(|&(_, w)| w != 0)
                .map(|(m, w)| (BigUint::from(m), BigInt::from(w)));
            let cp = Checkpoint {
                completed: chunks.into_iter().map(|(largest, mult)| ChunkId { largest, mult }).collect(),
                partitions: 99,
                weights: WeightTable::from_entries(n, k, entries).unwrap(),
            };
            let text = cp.to_json();
            let back = Checkpoint::from_json(&text, Path::new("x")).unwrap();
            prop_assert_eq!(back.to_json(), text);
            prop_assert_eq!(back, cp);
        }
    }
}
