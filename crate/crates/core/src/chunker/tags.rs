use std::fmt;
use std::str::FromStr;

use super::ChunkError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChunkKind {
    Np,
    Vp,
}

impl ChunkKind {
    pub const ALL: [ChunkKind; 2] = [ChunkKind::Np, ChunkKind::Vp];

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkKind::Np => "NP",
            ChunkKind::Vp => "VP",
        }
    }
}

impl fmt::Display for ChunkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five-tag IOB scheme. `I_X` marks a token inside a chunk of kind X;
/// `B_X` marks the first token of an X chunk that directly follows another
/// X chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChunkTag {
    INp,
    BNp,
    IVp,
    BVp,
    O,
}

impl ChunkTag {
    pub const ALL: [ChunkTag; 5] = [
        ChunkTag::INp,
        ChunkTag::O,
        ChunkTag::BNp,
        ChunkTag::IVp,
        ChunkTag::BVp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkTag::INp => "I_NP",
            ChunkTag::BNp => "B_NP",
            ChunkTag::IVp => "I_VP",
            ChunkTag::BVp => "B_VP",
            ChunkTag::O => "O",
        }
    }

    pub fn inside(kind: ChunkKind) -> Self {
        match kind {
            ChunkKind::Np => ChunkTag::INp,
            ChunkKind::Vp => ChunkTag::IVp,
        }
    }

    pub fn begin(kind: ChunkKind) -> Self {
        match kind {
            ChunkKind::Np => ChunkTag::BNp,
            ChunkKind::Vp => ChunkTag::BVp,
        }
    }

    pub fn kind(self) -> Option<ChunkKind> {
        match self {
            ChunkTag::INp | ChunkTag::BNp => Some(ChunkKind::Np),
            ChunkTag::IVp | ChunkTag::BVp => Some(ChunkKind::Vp),
            ChunkTag::O => None,
        }
    }

    pub fn is_begin(self) -> bool {
        matches!(self, ChunkTag::BNp | ChunkTag::BVp)
    }
}

impl fmt::Display for ChunkTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChunkTag {
    type Err = ChunkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChunkTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ChunkError::UnknownTag(s.to_string()))
    }
}

/// A base chunk over the inclusive token span `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chunk {
    pub kind: ChunkKind,
    pub start: usize,
    pub end: usize,
}

impl Chunk {
    pub fn new(kind: ChunkKind, start: usize, end: usize) -> Self {
        Chunk { kind, start, end }
    }

    /// Chunks span at least one token, so there is no `is_empty`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains(&self, token: usize) -> bool {
        self.start <= token && token <= self.end
    }
}

/// Assigns one tag per token for a set of non-overlapping chunks.
pub fn encode_chunks_to_tags(len: usize, chunks: &[Chunk]) -> Result<Vec<ChunkTag>, ChunkError> {
    let mut sorted = chunks.to_vec();
    sorted.sort_by_key(|c| c.start);
    let mut tags = vec![ChunkTag::O; len];
    let mut previous: Option<Chunk> = None;
    for chunk in sorted {
        if chunk.start > chunk.end || chunk.end >= len {
            return Err(ChunkError::ChunkOutOfRange { chunk, len });
        }
        if let Some(prev) = previous {
            if chunk.start <= prev.end {
                return Err(ChunkError::Overlap(prev, chunk));
            }
        }
        for tag in &mut tags[chunk.start..=chunk.end] {
            *tag = ChunkTag::inside(chunk.kind);
        }
        if let Some(prev) = previous {
            if prev.end + 1 == chunk.start && prev.kind == chunk.kind {
                tags[chunk.start] = ChunkTag::begin(chunk.kind);
            }
        }
        previous = Some(chunk);
    }
    Ok(tags)
}

/// Reads chunks off a tag sequence. Any sequence decodes: `I_X` continues
/// an open X chunk or opens one, `B_X` always opens a new X chunk, and `O`
/// closes whatever is open.
pub fn decode_tags_to_chunks(tags: &[ChunkTag]) -> Vec<Chunk> {
    let mut chunks = Vec::new();
    let mut open: Option<Chunk> = None;
    for (i, &tag) in tags.iter().enumerate() {
        match tag.kind() {
            None => {
                chunks.extend(open.take());
            }
            Some(kind) => match open.as_mut() {
                Some(chunk) if chunk.kind == kind && !tag.is_begin() => chunk.end = i,
                _ => {
                    chunks.extend(open.take());
                    open = Some(Chunk::new(kind, i, i));
                }
            },
        }
    }
    chunks.extend(open);
    chunks
}
