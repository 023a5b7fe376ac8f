//! Formal contexts: objects, attributes, and an incidence relation.
//!
//! The incidence relation is kept twice, row-wise (attributes per object) and
//! column-wise (objects per attribute), as sorted index vectors. The two views
//! are transposes of each other by construction; `incidence_consistent`
//! verifies it. Derivation results are returned as dense bit sets so lattice
//! algorithms can run word-at-a-time.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::bitset::{AttributeSet, ObjectSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    object_index: HashMap<String, u32>,
    attribute_index: HashMap<String, u32>,
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
}

impl FormalContext {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_name(&self, index: usize) -> Result<&str> {
        self.objects
            .get(index)
            .map(String::as_str)
            .ok_or(Error::IndexOutOfRange {
                dimension: "objects",
                index,
                size: self.objects.len(),
            })
    }

    pub fn attribute_name(&self, index: usize) -> Result<&str> {
        self.attributes
            .get(index)
            .map(String::as_str)
            .ok_or(Error::IndexOutOfRange {
                dimension: "attributes",
                index,
                size: self.attributes.len(),
            })
    }

    pub fn object_id(&self, name: &str) -> Option<usize> {
        self.object_index.get(name).map(|&i| i as usize)
    }

    pub fn attribute_id(&self, name: &str) -> Option<usize> {
        self.attribute_index.get(name).map(|&i| i as usize)
    }

    /// Attribute indices incident to object `o`, sorted ascending.
    pub fn row(&self, o: usize) -> &[u32] {
        &self.rows[o]
    }

    /// Object indices incident to attribute `a`, sorted ascending.
    pub fn col(&self, a: usize) -> &[u32] {
        &self.cols[a]
    }

    pub fn incidence_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn empty_object_set(&self) -> ObjectSet {
        ObjectSet::empty(self.objects.len())
    }

    pub fn empty_attribute_set(&self) -> AttributeSet {
        AttributeSet::empty(self.attributes.len())
    }

    pub fn object_set_from(&self, indices: &[usize]) -> Result<ObjectSet> {
        let mut set = self.empty_object_set();
        for &i in indices {
            if i >= self.objects.len() {
                return Err(Error::IndexOutOfRange {
                    dimension: "objects",
                    index: i,
                    size: self.objects.len(),
                });
            }
            set.insert(i);
        }
        Ok(set)
    }

    pub fn attribute_set_from(&self, indices: &[usize]) -> Result<AttributeSet> {
        let mut set = self.empty_attribute_set();
        for &i in indices {
            if i >= self.attributes.len() {
                return Err(Error::IndexOutOfRange {
                    dimension: "attributes",
                    index: i,
                    size: self.attributes.len(),
                });
            }
            set.insert(i);
        }
        Ok(set)
    }

    fn check_object_set(&self, set: &ObjectSet) -> Result<()> {
        if set.universe() != self.objects.len() {
            return Err(Error::UniverseMismatch {
                dimension: "object",
                got: set.universe(),
                expected: self.objects.len(),
            });
        }
        Ok(())
    }

    fn check_attribute_set(&self, set: &AttributeSet) -> Result<()> {
        if set.universe() != self.attributes.len() {
            return Err(Error::UniverseMismatch {
                dimension: "attribute",
                got: set.universe(),
                expected: self.attributes.len(),
            });
        }
        Ok(())
    }

    /// X' = the attributes shared by every object in `extent`.
    /// The empty extent derives to the full attribute set.
    pub fn derive_objects(&self, extent: &ObjectSet) -> Result<AttributeSet> {
        self.check_object_set(extent)?;
        let mut acc: Option<Vec<u32>> = None;
        for o in extent.iter() {
            acc = Some(match acc {
                None => self.rows[o].clone(),
                Some(cur) => intersect_sorted(&cur, &self.rows[o]),
            });
            if acc.as_ref().is_some_and(Vec::is_empty) {
                break;
            }
        }
        Ok(match acc {
            None => AttributeSet::full(self.attributes.len()),
            Some(indices) => AttributeSet::from_indices(
                self.attributes.len(),
                indices.iter().map(|&i| i as usize),
            ),
        })
    }

    /// Y' = the objects having every attribute in `intent`.
    /// The empty intent derives to the full object set.
    pub fn derive_attributes(&self, intent: &AttributeSet) -> Result<ObjectSet> {
        self.check_attribute_set(intent)?;
        let mut acc: Option<Vec<u32>> = None;
        for a in intent.iter() {
            acc = Some(match acc {
                None => self.cols[a].clone(),
                Some(cur) => intersect_sorted(&cur, &self.cols[a]),
            });
            if acc.as_ref().is_some_and(Vec::is_empty) {
                break;
            }
        }
        Ok(match acc {
            None => ObjectSet::full(self.objects.len()),
            Some(indices) => {
                ObjectSet::from_indices(self.objects.len(), indices.iter().map(|&i| i as usize))
            }
        })
    }

    /// Y'' — the closure of an attribute set.
    pub fn close_attributes(&self, intent: &AttributeSet) -> Result<AttributeSet> {
        let extent = self.derive_attributes(intent)?;
        self.derive_objects(&extent)
    }

    /// X'' — the closure of an object set.
    pub fn close_objects(&self, extent: &ObjectSet) -> Result<ObjectSet> {
        let intent = self.derive_objects(extent)?;
        self.derive_attributes(&intent)
    }

    /// Full row/column cross-check; used by tests and `read_tsv`.
    pub fn incidence_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.attributes.len()];
        for (o, row) in self.rows.iter().enumerate() {
            for &a in row {
                rebuilt[a as usize].push(o as u32);
            }
        }
        rebuilt == self.cols
    }

    /// Writes the context TSV exchange format: `#!` declaration comments for
    /// every object and attribute (preserving order and isolated rows), then
    /// one `object<TAB>attribute` line per incidence pair.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# context TSV: object<TAB>attribute, one incidence per line")?;
        for name in &self.objects {
            writeln!(out, "#! object\t{name}")?;
        }
        for name in &self.attributes {
            writeln!(out, "#! attribute\t{name}")?;
        }
        for (o, row) in self.rows.iter().enumerate() {
            for &a in row {
                writeln!(out, "{}\t{}", self.objects[o], self.attributes[a as usize])?;
            }
        }
        Ok(())
    }

    pub fn write_tsv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_tsv(&mut w).map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Reads the context TSV format. `#!` declarations fix ordering and allow
    /// isolated objects or attributes; other `#` lines are comments. Duplicate
    /// pairs are ignored.
    pub fn read_tsv<R: BufRead>(reader: R, path: &Path) -> Result<FormalContext> {
        let mut builder = ContextBuilder::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = lineno + 1;
            if let Some(decl) = line.strip_prefix("#!") {
                let decl = decl.trim_start();
                if let Some(name) = decl.strip_prefix("object\t") {
                    builder.add_object(name)?;
                } else if let Some(name) = decl.strip_prefix("attribute\t") {
                    builder.add_attribute(name)?;
                } else {
                    return Err(Error::parse(path, lineno, format!("bad declaration {decl:?}")));
                }
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((obj, attr)) = line.split_once('\t') else {
                return Err(Error::parse(path, lineno, "expected object<TAB>attribute"));
            };
            builder.add_incidence(obj, attr)?;
        }
        Ok(builder.build())
    }

    pub fn read_tsv_file(path: &Path) -> Result<FormalContext> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_tsv(std::io::BufReader::new(file), path)
    }
}

/// Incremental construction of a `FormalContext`.
#[derive(Debug, Default)]
pub struct ContextBuilder {
    objects: Vec<String>,
    attributes: Vec<String>,
    object_index: HashMap<String, u32>,
    attribute_index: HashMap<String, u32>,
    pairs: Vec<(u32, u32)>,
}

fn check_identifier(name: &str) -> Result<()> {
    if name.contains('\t') || name.contains('\n') || name.contains('\r') {
        return Err(Error::InvalidIdentifier(name.to_string()));
    }
    Ok(())
}

impl ContextBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an object, returning its index. Re-registration is a no-op.
    pub fn add_object(&mut self, name: &str) -> Result<u32> {
        check_identifier(name)?;
        if let Some(&i) = self.object_index.get(name) {
            return Ok(i);
        }
        let i = self.objects.len() as u32;
        self.objects.push(name.to_string());
        self.object_index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn add_attribute(&mut self, name: &str) -> Result<u32> {
        check_identifier(name)?;
        if let Some(&i) = self.attribute_index.get(name) {
            return Ok(i);
        }
        let i = self.attributes.len() as u32;
        self.attributes.push(name.to_string());
        self.attribute_index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn add_incidence(&mut self, object: &str, attribute: &str) -> Result<()> {
        let o = self.add_object(object)?;
        let a = self.add_attribute(attribute)?;
        self.pairs.push((o, a));
        Ok(())
    }

    pub fn build(self) -> FormalContext {
        let mut rows = vec![Vec::new(); self.objects.len()];
        let mut cols = vec![Vec::new(); self.attributes.len()];
        let mut pairs = self.pairs;
        pairs.sort_unstable();
        pairs.dedup();
        for (o, a) in pairs {
            rows[o as usize].push(a);
            cols[a as usize].push(o);
        }
        FormalContext {
            objects: self.objects,
            attributes: self.attributes,
            object_index: self.object_index,
            attribute_index: self.attribute_index,
            rows,
            cols,
        }
    }
}

impl FormalContext {
    /// Test- and fixture-friendly constructor: `rows[i]` lists the attribute
    /// indices of object `i`.
    pub fn from_rows(objects: &[&str], attributes: &[&str], rows: &[&[usize]]) -> Result<Self> {
        let mut builder = ContextBuilder::new();
        for name in objects {
            let before = builder.objects.len();
            builder.add_object(name)?;
            if builder.objects.len() == before {
                return Err(Error::DuplicateIdentifier {
                    dimension: "objects",
                    name: name.to_string(),
                });
            }
        }
        for name in attributes {
            let before = builder.attributes.len();
            builder.add_attribute(name)?;
            if builder.attributes.len() == before {
                return Err(Error::DuplicateIdentifier {
                    dimension: "attributes",
                    name: name.to_string(),
                });
            }
        }
        for (o, row) in rows.iter().enumerate() {
            for &a in row.iter() {
                if a >= attributes.len() {
                    return Err(Error::IndexOutOfRange {
                        dimension: "attributes",
                        index: a,
                        size: attributes.len(),
                    });
                }
                builder.pairs.push((o as u32, a as u32));
            }
        }
        Ok(builder.build())
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// The fish context: eel is the only euryhaline fish (Coast, Sea and River);
/// the other four rows are fixture filler.
pub fn fish_fixture() -> FormalContext {
    FormalContext::from_rows(
        &["bream", "carp", "eel", "salmon", "shark"],
        &["Coast", "Sea", "River"],
        &[
            &[0, 1],    // bream: Coast, Sea
            &[2],       // carp: River
            &[0, 1, 2], // eel: Coast, Sea, River
            &[1, 2],    // salmon: Sea, River
            &[1],       // shark: Sea
        ],
    )
    .expect("fixture is well formed")
}
