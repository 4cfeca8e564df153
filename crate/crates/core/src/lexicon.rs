//! Per-word lexical annotations, consumed from a tab-separated file produced
//! offline (POS tags, capitalization, dictionary membership) plus the word
//! pair lists for the three inflection relations.
//!
//! Words missing from the file fall back to pos OTHER, capitalization
//! inferred from the token's first character, and in_dictionary = false.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};

pub const RELATIONS_SECTION: &str = "## RELATIONS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Num,
    Propn,
    Other,
}

impl PosTag {
    pub fn parse(s: &str) -> Option<PosTag> {
        match s {
            "NOUN" => Some(PosTag::Noun),
            "VERB" => Some(PosTag::Verb),
            "ADJ" => Some(PosTag::Adj),
            "ADV" => Some(PosTag::Adv),
            "NUM" => Some(PosTag::Num),
            "PROPN" => Some(PosTag::Propn),
            "OTHER" => Some(PosTag::Other),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Num => "NUM",
            PosTag::Propn => "PROPN",
            PosTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    PluralNoun,
    Participle,
    PastTense,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::PluralNoun, Relation::Participle, Relation::PastTense];

    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "PLURAL-NOUN" => Some(Relation::PluralNoun),
            "PARTICIPLE" => Some(Relation::Participle),
            "PAST-TENSE" => Some(Relation::PastTense),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::PluralNoun => "PLURAL-NOUN",
            Relation::Participle => "PARTICIPLE",
            Relation::PastTense => "PAST-TENSE",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconEntry {
    pub pos: PosTag,
    pub is_capitalized: bool,
    pub in_dictionary: bool,
}

/// A (base word, inflected word) pair for one of the relations.
pub type WordPair = (String, String);

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
    relation_pairs: BTreeMap<Relation, Vec<WordPair>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn insert(&mut self, word: impl Into<String>, entry: LexiconEntry) {
        self.entries.insert(word.into(), entry);
    }

    pub fn add_pair(&mut self, relation: Relation, base: impl Into<String>, inflected: impl Into<String>) {
        self.relation_pairs
            .entry(relation)
            .or_default()
            .push((base.into(), inflected.into()));
    }

    /// Annotation for `word`, falling back to the documented defaults when
    /// the word was not in the file.
    pub fn lookup(&self, word: &str) -> LexiconEntry {
        self.entries.get(word).copied().unwrap_or(LexiconEntry {
            pos: PosTag::Other,
            is_capitalized: word.chars().next().map(char::is_uppercase).unwrap_or(false),
            in_dictionary: false,
        })
    }

    pub fn has_entry(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn pairs(&self, relation: Relation) -> &[WordPair] {
        self.relation_pairs
            .get(&relation)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Keeps only pairs whose two words both resolve in `space`. Returns the
    /// surviving pairs per relation and the number dropped; errors when a
    /// relation is left with fewer than 10 pairs.
    pub fn resolve_pairs(
        &self,
        space: &EmbeddingSpace,
    ) -> Result<(BTreeMap<Relation, Vec<WordPair>>, usize)> {
        let mut out = BTreeMap::new();
        let mut dropped = 0usize;
        for &relation in &Relation::ALL {
            let mut kept = Vec::new();
            for (base, inflected) in self.pairs(relation) {
                if space.index_of(base).is_some() && space.index_of(inflected).is_some() {
                    kept.push((base.clone(), inflected.clone()));
                } else {
                    dropped += 1;
                }
            }
            if kept.len() < 10 {
                return Err(Error::Domain(format!(
                    "relation {relation} has only {} resolvable pairs (need 10)",
                    kept.len()
                )));
            }
            out.insert(relation, kept);
        }
        if dropped > 0 {
            eprintln!("warning: dropped {dropped} relation pairs with out-of-vocabulary words");
        }
        Ok((out, dropped))
    }

    /// Parses the two-section TSV format: `word<TAB>pos<TAB>cap<TAB>dict`
    /// rows, a `## RELATIONS` line, then `relation<TAB>base<TAB>inflected`
    /// rows.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut lexicon = Lexicon::new();
        let mut in_relations = false;

        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line_no = i + 1;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.is_empty() {
                continue;
            }
            if trimmed == RELATIONS_SECTION {
                in_relations = true;
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if in_relations {
                if fields.len() != 3 {
                    return Err(Error::parse(path, line_no, "relation row needs 3 fields"));
                }
                let relation = Relation::parse(fields[0]).ok_or_else(|| {
                    Error::parse(path, line_no, format!("unknown relation {:?}", fields[0]))
                })?;
                lexicon.add_pair(relation, fields[1], fields[2]);
            } else {
                if fields.len() != 4 {
                    return Err(Error::parse(path, line_no, "entry row needs 4 fields"));
                }
                let pos = PosTag::parse(fields[1]).ok_or_else(|| {
                    Error::parse(path, line_no, format!("unknown pos tag {:?}", fields[1]))
                })?;
                let is_capitalized = parse_flag(path, line_no, fields[2])?;
                let in_dictionary = parse_flag(path, line_no, fields[3])?;
                lexicon.insert(
                    fields[0],
                    LexiconEntry {
                        pos,
                        is_capitalized,
                        in_dictionary,
                    },
                );
            }
        }
        Ok(lexicon)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut words: Vec<&String> = self.entries.keys().collect();
        words.sort();
        for word in words {
            let e = &self.entries[word];
            writeln!(
                w,
                "{word}\t{}\t{}\t{}",
                e.pos,
                e.is_capitalized as u8,
                e.in_dictionary as u8
            )
            .map_err(|err| Error::io(path, err))?;
        }
        writeln!(w, "{RELATIONS_SECTION}").map_err(|e| Error::io(path, e))?;
        for (&relation, pairs) in &self.relation_pairs {
            for (base, inflected) in pairs {
                writeln!(w, "{relation}\t{base}\t{inflected}").map_err(|e| Error::io(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn parse_flag(path: &Path, line_no: usize, s: &str) -> Result<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::parse(path, line_no, format!("flag must be 0/1, got {s:?}"))),
    }
}
