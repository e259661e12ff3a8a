//! Class codes: KR classes of Goursat flags (words over {1,2}) and
//! singularity classes of special 2-flags (words over {1,2,3}).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::CodeError;
use crate::symexpr::Mode;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassCode {
    mode: Mode,
    letters: Vec<u8>,
}

impl ClassCode {
    /// Check a dotted word such as `1.2.3` against the rules of `mode`.
    pub fn validate(word: &str, mode: Mode) -> Result<ClassCode, CodeError> {
        let word = word.trim();
        if word.is_empty() {
            return Err(CodeError::Empty);
        }
        let letters = word
            .split('.')
            .map(|s| match s {
                "1" => Ok(1),
                "2" => Ok(2),
                "3" if mode == Mode::Flag2 => Ok(3),
                _ => Err(CodeError::Alphabet(s.to_string())),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        ClassCode::from_letters(mode, letters)
    }

    pub fn from_letters(mode: Mode, letters: Vec<u8>) -> Result<ClassCode, CodeError> {
        let max = if mode == Mode::Flag2 { 3 } else { 2 };
        if let Some(&l) = letters.iter().find(|&&l| l == 0 || l > max) {
            return Err(CodeError::Alphabet(l.to_string()));
        }
        if letters.is_empty() {
            return Err(CodeError::Empty);
        }
        if letters[0] != 1 {
            return Err(CodeError::FirstLetter);
        }
        match mode {
            Mode::Goursat => {
                if letters.len() < 2 {
                    return Err(CodeError::TooShort { got: letters.len(), min: 2 });
                }
                if letters[1] != 1 {
                    return Err(CodeError::SecondLetter);
                }
            }
            Mode::Flag2 => {
                let mut seen_two = false;
                for (i, &l) in letters.iter().enumerate() {
                    match l {
                        2 => seen_two = true,
                        3 if !seen_two => return Err(CodeError::ThreeBeforeTwo(i + 1)),
                        _ => {}
                    }
                }
            }
        }
        Ok(ClassCode { mode, letters })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// The letter `i_j`, 1-based.
    pub fn letter(&self, j: usize) -> u8 {
        self.letters[j - 1]
    }

    /// The code truncated to its first `j` letters (not re-validated; Goursat
    /// prefixes of length 1 are used internally for the contact level).
    pub fn prefix(&self, j: usize) -> ClassCode {
        ClassCode { mode: self.mode, letters: self.letters[..j].to_vec() }
    }

    pub fn extended(&self, letter: u8) -> Result<ClassCode, CodeError> {
        let mut letters = self.letters.clone();
        letters.push(letter);
        ClassCode::from_letters(self.mode, letters)
    }

    /// Number of 2's plus twice the number of 3's.
    pub fn codimension(&self) -> Result<usize, CodeError> {
        if self.mode != Mode::Flag2 {
            return Err(CodeError::Flag2Only);
        }
        Ok(self
            .letters
            .iter()
            .map(|&l| match l {
                2 => 1,
                3 => 2,
                _ => 0,
            })
            .sum())
    }

    /// The lookback position `s(j)`: the last position before `j` carrying a
    /// letter other than 1 (positions from 3 on for Goursat codes, from 2 on
    /// for flag2 codes), or 0 when there is none.
    pub fn s_of(&self, j: usize) -> Result<usize, CodeError> {
        let lo = match self.mode {
            Mode::Goursat => 3,
            Mode::Flag2 => 2,
        };
        if j < lo || j > self.len() {
            return Err(CodeError::OutOfRange { j, r: self.len() });
        }
        Ok(self.lookback(j))
    }

    pub(crate) fn lookback(&self, j: usize) -> usize {
        (2..j).rev().find(|&s| self.letter(s) > 1).unwrap_or(0)
    }

    pub fn sandwich(&self) -> Result<SandwichWord, CodeError> {
        if self.mode != Mode::Flag2 {
            return Err(CodeError::Flag2Only);
        }
        Ok(SandwichWord(
            self.letters.iter().map(|&l| if l == 1 { Sandwich::One } else { Sandwich::Two }).collect(),
        ))
    }
}

impl fmt::Display for ClassCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(u8::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl Serialize for ClassCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Enumerate every class of length `r` in lexicographic order (1 < 2 < 3).
pub fn enumerate(r: usize, mode: Mode) -> Vec<ClassCode> {
    let mut out = Vec::new();
    let min = if mode == Mode::Goursat { 2 } else { 1 };
    if r < min {
        return out;
    }
    let mut prefix = match mode {
        Mode::Goursat => vec![1, 1],
        Mode::Flag2 => vec![1],
    };
    grow(mode, r, &mut prefix, &mut out);
    out
}

fn grow(mode: Mode, r: usize, prefix: &mut Vec<u8>, out: &mut Vec<ClassCode>) {
    if prefix.len() == r {
        out.push(ClassCode { mode, letters: prefix.clone() });
        return;
    }
    let max = match mode {
        Mode::Goursat => 2,
        Mode::Flag2 if prefix.contains(&2) => 3,
        Mode::Flag2 => 2,
    };
    for l in 1..=max {
        prefix.push(l);
        grow(mode, r, prefix, out);
        prefix.pop();
    }
}

/// Closed-form class counts: `2^(r-2)` (Goursat), `(3^(r-1) + 1) / 2` (flag2).
pub fn expected_count(r: usize, mode: Mode) -> u64 {
    match mode {
        Mode::Goursat if r >= 2 => 1 << (r - 2),
        Mode::Goursat => 0,
        Mode::Flag2 if r >= 1 => 3u64.pow(r as u32 - 1).div_ceil(2),
        Mode::Flag2 => 0,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sandwich {
    One,
    /// The underlined letter: non-transverse sandwich.
    Two,
}

/// A sandwich class: word over {1, 2̲} starting with 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SandwichWord(pub Vec<Sandwich>);

impl SandwichWord {
    /// All singularity classes refining this sandwich class: the first 2̲
    /// becomes 2, every later 2̲ independently 2 or 3.
    pub fn refinements(&self) -> Vec<ClassCode> {
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        let mut seen = false;
        for l in &self.0 {
            let choices: &[u8] = match (l, seen) {
                (Sandwich::One, _) => &[1],
                (Sandwich::Two, false) => &[2],
                (Sandwich::Two, true) => &[2, 3],
            };
            if *l == Sandwich::Two {
                seen = true;
            }
            words = words
                .into_iter()
                .flat_map(|w| {
                    choices.iter().map(move |&c| {
                        let mut w = w.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        words
            .into_iter()
            .map(|letters| ClassCode { mode: Mode::Flag2, letters })
            .collect()
    }
}

/// All sandwich words of length `r` (first letter 1).
pub fn enumerate_sandwich(r: usize) -> Vec<SandwichWord> {
    if r == 0 {
        return Vec::new();
    }
    (0..1u64 << (r - 1))
        .map(|mask| {
            let mut w = vec![Sandwich::One];
            for i in (0..r - 1).rev() {
                w.push(if mask >> i & 1 == 1 { Sandwich::Two } else { Sandwich::One });
            }
            SandwichWord(w)
        })
        .collect()
}

impl fmt::Display for SandwichWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|l| match l {
                Sandwich::One => "1",
                Sandwich::Two => "2\u{332}",
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Mode {
    type Err = crate::error::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2(w: &str) -> ClassCode {
        ClassCode::validate(w, Mode::Flag2).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ClassCode::validate("1.2.3", Mode::Flag2).is_ok());
        assert_eq!(ClassCode::validate("1.3.2", Mode::Flag2), Err(CodeError::ThreeBeforeTwo(2)));
        assert_eq!(ClassCode::validate("1.2.1", Mode::Goursat), Err(CodeError::SecondLetter));
        assert_eq!(ClassCode::validate("2.1", Mode::Flag2), Err(CodeError::FirstLetter));
        assert!(matches!(ClassCode::validate("1.1.3", Mode::Goursat), Err(CodeError::Alphabet(_))));
        assert!(matches!(ClassCode::validate("1.4", Mode::Flag2), Err(CodeError::Alphabet(_))));
        assert_eq!(ClassCode::validate("1", Mode::Goursat), Err(CodeError::TooShort { got: 1, min: 2 }));
        assert_eq!(ClassCode::validate("", Mode::Flag2), Err(CodeError::Empty));
        assert_eq!(f2("1").len(), 1);
    }

    #[test]
    fn enumeration_examples() {
        let four: Vec<String> = enumerate(4, Mode::Flag2).iter().map(|c| c.to_string()).collect();
        assert_eq!(
            four,
            [
                "1.1.1.1", "1.1.1.2", "1.1.2.1", "1.1.2.2", "1.1.2.3", "1.2.1.1", "1.2.1.2", "1.2.1.3",
                "1.2.2.1", "1.2.2.2", "1.2.2.3", "1.2.3.1", "1.2.3.2", "1.2.3.3"
            ]
        );
        assert_eq!(enumerate(7, Mode::Flag2).len(), 365);
        assert_eq!(enumerate(4, Mode::Goursat).len(), 4);
        assert_eq!(enumerate(1, Mode::Goursat).len(), 0);
    }

    #[test]
    fn codimensions() {
        assert_eq!(f2("1.2.3").codimension(), Ok(3));
        assert_eq!(f2("1.1.1.1").codimension(), Ok(0));
        assert_eq!(f2("1.2.2.3").codimension(), Ok(4));
        let g = ClassCode::validate("1.1.2", Mode::Goursat).unwrap();
        assert_eq!(g.codimension(), Err(CodeError::Flag2Only));
    }

    #[test]
    fn lookback_index() {
        assert_eq!(f2("1.2.1.2.1.2.1").s_of(7), Ok(6));
        let ones = f2("1.1.1.1");
        for j in 2..=4 {
            assert_eq!(ones.s_of(j), Ok(0));
        }
        let g = ClassCode::validate("1.1.2.1", Mode::Goursat).unwrap();
        assert_eq!(g.s_of(4), Ok(3));
        assert_eq!(g.s_of(3), Ok(0));
        assert_eq!(g.s_of(2), Err(CodeError::OutOfRange { j: 2, r: 4 }));
        assert_eq!(f2("1.2").s_of(3), Err(CodeError::OutOfRange { j: 3, r: 2 }));
        assert_eq!(f2("1.2.3").s_of(3), Ok(2));
    }

    #[test]
    fn sandwich_projection() {
        assert_eq!(f2("1.2.3").sandwich().unwrap().to_string(), "1.2\u{332}.2\u{332}");
        assert_eq!(f2("1.1.1").sandwich().unwrap().to_string(), "1.1.1");
        assert_eq!(f2("1.2.1.2").sandwich().unwrap().to_string(), "1.2\u{332}.1.2\u{332}");
    }
}
