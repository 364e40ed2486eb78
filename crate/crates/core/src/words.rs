//! Alphabets and freely reduced words of a free group.
//!
//! Text convention: a lowercase symbol is a generator, the same symbol with
//! its first character uppercased is the inverse (`a` vs `A`, `x12` vs
//! `X12`). `a^4` is sugar for `aaaa` and is expanded before reduction.
//! Words are kept freely reduced at all times; the empty word is the
//! identity.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from alphabet construction and word parsing/combination.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    /// An alphabet needs at least one symbol.
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    /// Symbol names are a lowercase ASCII letter optionally followed by digits.
    #[error("invalid symbol name {name:?} (expect a lowercase ASCII letter, then digits)")]
    BadName {
        /// The offending name.
        name: String,
    },
    /// Symbols must be pairwise distinct.
    #[error("duplicate symbol {name:?} in alphabet")]
    DuplicateName {
        /// The repeated name.
        name: String,
    },
    /// A parsed symbol is not in the alphabet.
    #[error("unknown symbol {symbol:?} at byte {position}")]
    UnknownSymbol {
        /// Symbol as written (case preserved).
        symbol: String,
        /// Byte offset in the input text.
        position: usize,
    },
    /// `^` must be followed by a non-negative decimal exponent.
    #[error("malformed exponent at byte {position}")]
    BadExponent {
        /// Byte offset of the `^`.
        position: usize,
    },
    /// A raw letter index is outside the alphabet.
    #[error("letter index {letter} out of range for alphabet of rank {rank}")]
    LetterOutOfRange {
        /// The bad index.
        letter: usize,
        /// Rank of the alphabet.
        rank: usize,
    },
    /// Two words (or a word and a graph) built over different alphabets.
    #[error("alphabet mismatch")]
    AlphabetMismatch,
}

/// A finite set of free-group generators, identified by name.
///
/// The rank is the number of symbols. Names follow the text convention
/// above so that inverses are printable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from symbol names, validating the convention.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<Self>, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for name in &names {
            if !valid_name(name) {
                return Err(WordError::BadName { name: name.clone() });
            }
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(WordError::DuplicateName { name: name.clone() });
            }
        }
        Ok(Arc::new(Alphabet { names }))
    }

    /// The default alphabet of a given rank: `a..z` up to rank 26, the
    /// indexed symbols `x1, x2, ...` beyond that.
    pub fn with_rank(rank: usize) -> Result<Arc<Self>, WordError> {
        if rank == 0 {
            return Err(WordError::EmptyAlphabet);
        }
        let names = if rank <= 26 {
            (0..rank)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect()
        } else {
            (1..=rank).map(|i| format!("x{i}")).collect()
        };
        Ok(Arc::new(Alphabet { names }))
    }

    /// Number of generators.
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Name of letter `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// All names in order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of a (lowercase) name, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

/// One letter of a word: a generator index plus an inversion flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedLetter {
    /// Index into the alphabet.
    pub letter: usize,
    /// True for the inverse generator.
    pub inverse: bool,
}

impl SignedLetter {
    /// The generator `letter`.
    pub fn gen(letter: usize) -> Self {
        SignedLetter { letter, inverse: false }
    }

    /// The inverse of generator `letter`.
    pub fn inv(letter: usize) -> Self {
        SignedLetter { letter, inverse: true }
    }

    /// The formally inverse letter.
    pub fn inverse_letter(self) -> Self {
        SignedLetter { letter: self.letter, inverse: !self.inverse }
    }

    fn cancels(self, other: Self) -> bool {
        self.letter == other.letter && self.inverse != other.inverse
    }
}

/// A freely reduced word over an [`Alphabet`].
///
/// Construction reduces eagerly, so no `Word` ever contains a factor
/// `x x^-1`. Words compare equal only over equal alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<SignedLetter>,
}

impl Word {
    /// The empty word (the identity).
    pub fn empty(alphabet: &Arc<Alphabet>) -> Self {
        Word { alphabet: alphabet.clone(), letters: Vec::new() }
    }

    /// Builds a word from raw letters, validating indices and reducing.
    pub fn from_letters(
        alphabet: &Arc<Alphabet>,
        letters: impl IntoIterator<Item = SignedLetter>,
    ) -> Result<Self, WordError> {
        let rank = alphabet.rank();
        let mut reduced: Vec<SignedLetter> = Vec::new();
        for l in letters {
            if l.letter >= rank {
                return Err(WordError::LetterOutOfRange { letter: l.letter, rank });
            }
            push_reduced(&mut reduced, l);
        }
        Ok(Word { alphabet: alphabet.clone(), letters: reduced })
    }

    /// Parses text into a reduced word.
    ///
    /// Whitespace is ignored. Each token is a symbol (case selects
    /// generator vs inverse) optionally followed by `^` and a decimal
    /// exponent; `a^0` contributes nothing.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self, WordError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let mut letters: Vec<SignedLetter> = Vec::new();
        while pos < bytes.len() {
            let b = bytes[pos];
            if b.is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            if !b.is_ascii_alphabetic() {
                return Err(WordError::UnknownSymbol {
                    symbol: (b as char).to_string(),
                    position: pos,
                });
            }
            let start = pos;
            let inverse = b.is_ascii_uppercase();
            pos += 1;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let symbol = &text[start..pos];
            let lower = symbol.to_ascii_lowercase();
            let letter = alphabet.index_of(&lower).ok_or(WordError::UnknownSymbol {
                symbol: symbol.to_string(),
                position: start,
            })?;
            let mut count = 1usize;
            if pos < bytes.len() && bytes[pos] == b'^' {
                let caret = pos;
                pos += 1;
                let digits_start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == digits_start {
                    return Err(WordError::BadExponent { position: caret });
                }
                count = text[digits_start..pos]
                    .parse()
                    .map_err(|_| WordError::BadExponent { position: caret })?;
            }
            let l = SignedLetter { letter, inverse };
            for _ in 0..count {
                push_reduced(&mut letters, l);
            }
        }
        Ok(Word { alphabet: alphabet.clone(), letters })
    }

    /// The alphabet this word is written over.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// The reduced letters.
    pub fn letters(&self) -> &[SignedLetter] {
        &self.letters
    }

    /// Reduced length.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True for the identity.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// True when no letter is inverted (a word of the free monoid).
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.inverse)
    }

    /// The reduced concatenation `self · other`.
    ///
    /// Both words must share one alphabet. Cancellation happens only at
    /// the seam, since both inputs are already reduced.
    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        if self.alphabet != other.alphabet {
            return Err(WordError::AlphabetMismatch);
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word { alphabet: self.alphabet.clone(), letters })
    }

    /// The group inverse: letters reversed and individually inverted.
    pub fn inverse(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| l.inverse_letter())
            .collect();
        Word { alphabet: self.alphabet.clone(), letters }
    }
}

/// Push a letter onto a reduced letter stack, cancelling with the top.
fn push_reduced(stack: &mut Vec<SignedLetter>, l: SignedLetter) {
    match stack.last() {
        Some(&top) if top.cancels(l) => {
            stack.pop();
        }
        _ => stack.push(l),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            let name = self.alphabet.name(l.letter);
            if l.inverse {
                let mut chars = name.chars();
                let first = chars.next().expect("names are nonempty");
                write!(f, "{}{}", first.to_ascii_uppercase(), chars.as_str())?;
            } else {
                f.write_str(name)?;
            }
        }
        Ok(())
    }
}
