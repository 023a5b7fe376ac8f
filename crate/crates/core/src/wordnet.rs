//! WNDB `index.<pos>` parsing and the lemma×synset formal context.

use std::fmt;
use std::io::BufRead;
use std::path::Path;

use crate::context::{ContextBuilder, FormalContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn tag(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }

    /// Database letter code. The adjective-satellite marker `s` is normalized
    /// to `adj`.
    pub fn from_letter(letter: &str) -> Option<Pos> {
        match letter {
            "n" => Some(Pos::Noun),
            "v" => Some(Pos::Verb),
            "a" | "s" => Some(Pos::Adj),
            "r" => Some(Pos::Adv),
            _ => None,
        }
    }

    pub fn index_file_name(self) -> &'static str {
        match self {
            Pos::Noun => "index.noun",
            Pos::Verb => "index.verb",
            Pos::Adj => "index.adj",
            Pos::Adv => "index.adv",
        }
    }
}

/// A word form plus its part of speech; spaces appear as underscores, as in
/// the database files.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lemma {
    pub form: String,
    pub pos: Pos,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.form, self.pos.tag())
    }
}

/// A synset identity: part of speech plus the byte-offset string exactly as
/// printed in the database files.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SynsetId {
    pub pos: Pos,
    pub offset: String,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.pos.tag(), self.offset)
    }
}

#[derive(Debug, Clone)]
pub struct IndexEntry {
    pub lemma: Lemma,
    pub synsets: Vec<SynsetId>,
}

/// Parses one WNDB index file. License header lines (leading two spaces) are
/// skipped; every other line must be a well-formed index record:
/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt offset...`
pub fn parse_index_file(path: &Path, pos: Pos) -> Result<Vec<IndexEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_index_reader(std::io::BufReader::new(file), pos, path)
}

pub fn parse_index_reader<R: BufRead>(reader: R, pos: Pos, path: &Path) -> Result<Vec<IndexEntry>> {
    let mut entries = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = lineno + 1;
        if line.starts_with("  ") || line.is_empty() {
            continue;
        }
        entries.push(parse_index_line(&line, pos, path, lineno)?);
    }
    Ok(entries)
}

fn parse_index_line(line: &str, pos: Pos, path: &Path, lineno: usize) -> Result<IndexEntry> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 6 {
        return Err(Error::parse(path, lineno, "too few fields for an index record"));
    }
    let form = fields[0].to_string();
    if form.is_empty() {
        return Err(Error::parse(path, lineno, "empty lemma"));
    }
    let line_pos = Pos::from_letter(fields[1])
        .ok_or_else(|| Error::parse(path, lineno, format!("unknown pos code {:?}", fields[1])))?;
    if line_pos != pos {
        return Err(Error::parse(
            path,
            lineno,
            format!("pos code {:?} does not match file pos {}", fields[1], pos.tag()),
        ));
    }
    let synset_cnt: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, lineno, format!("bad synset_cnt {:?}", fields[2])))?;
    if synset_cnt == 0 {
        return Err(Error::structural(
            path,
            format!("line {lineno}: synset_cnt is zero"),
        ));
    }
    let p_cnt: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse(path, lineno, format!("bad p_cnt {:?}", fields[3])))?;
    let expected = 4 + p_cnt + 2 + synset_cnt;
    if fields.len() != expected {
        return Err(Error::structural(
            path,
            format!(
                "line {lineno}: {} fields, expected {expected} \
                 (synset_cnt {synset_cnt}, p_cnt {p_cnt})",
                fields.len()
            ),
        ));
    }
    let offsets = &fields[4 + p_cnt + 2..];
    let synsets = offsets
        .iter()
        .map(|&off| {
            if off.chars().all(|c| c.is_ascii_digit()) {
                Ok(SynsetId {
                    pos,
                    offset: off.to_string(),
                })
            } else {
                Err(Error::parse(path, lineno, format!("bad synset offset {off:?}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexEntry {
        lemma: Lemma { form, pos },
        synsets,
    })
}

/// Parses all four index files under `dir`.
pub fn load_database(dir: &Path) -> Result<Vec<IndexEntry>> {
    let mut entries = Vec::new();
    for pos in Pos::ALL {
        let path = dir.join(pos.index_file_name());
        entries.extend(parse_index_file(&path, pos)?);
    }
    Ok(entries)
}

/// Lemmas become objects (`surface#pos`), synsets become attributes
/// (`pos:offset`); both dimensions ordered lexicographically.
pub fn build_wordnet_context(entries: &[IndexEntry]) -> Result<FormalContext> {
    if entries.is_empty() {
        return Err(Error::EmptyContext("object"));
    }
    let mut objects: Vec<String> = entries.iter().map(|e| e.lemma.to_string()).collect();
    objects.sort_unstable();
    objects.dedup();
    let mut attributes: Vec<String> = entries
        .iter()
        .flat_map(|e| e.synsets.iter().map(SynsetId::to_string))
        .collect();
    attributes.sort_unstable();
    attributes.dedup();

    let mut builder = ContextBuilder::new();
    for name in &objects {
        builder.add_object(name)?;
    }
    for name in &attributes {
        builder.add_attribute(name)?;
    }
    for entry in entries {
        let object = entry.lemma.to_string();
        for synset in &entry.synsets {
            builder.add_incidence(&object, &synset.to_string())?;
        }
    }
    Ok(builder.build())
}
