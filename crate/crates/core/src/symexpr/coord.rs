use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Which family of charts a coordinate, expression or code belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Goursat,
    Flag2,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode, ParseError> {
        match s {
            "goursat" => Ok(Mode::Goursat),
            "flag2" => Ok(Mode::Flag2),
            _ => Err(ParseError::Mode(s.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Goursat => "goursat",
            Mode::Flag2 => "flag2",
        }
    }

    /// The three coordinates the free base functions depend on.
    pub fn base_coords(self) -> [Coord; 3] {
        match self {
            Mode::Flag2 => [Coord::t(), Coord::x(0), Coord::y(0)],
            Mode::Goursat => [Coord::g(1), Coord::g(2), Coord::g(3)],
        }
    }

    /// Number of chart coordinates for a code of length `r`.
    pub fn chart_dim(self, r: usize) -> usize {
        match self {
            Mode::Flag2 => 2 * r + 3,
            Mode::Goursat => r + 2,
        }
    }

    /// All chart coordinates for length `r`, in the fixed total order.
    pub fn chart_coords(self, r: usize) -> Vec<Coord> {
        match self {
            Mode::Flag2 => (0..self.chart_dim(r) as u16)
                .map(|index| Coord { mode: self, index })
                .collect(),
            Mode::Goursat => (1..=self.chart_dim(r)).map(Coord::g).collect(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A chart coordinate.
///
/// Flag2 indices: `t = 0`, `x^j = 2j + 1`, `y^j = 2j + 2`, which realizes the
/// order `t < x^0 < y^0 < x^1 < y^1 < ...`. Goursat indices are the subscripts
/// `1..=r+2` of `x_1, ..., x_{r+2}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    mode: Mode,
    index: u16,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CoordKind {
    T,
    X(usize),
    Y(usize),
    G(usize),
}

impl Coord {
    pub fn t() -> Coord {
        Coord { mode: Mode::Flag2, index: 0 }
    }

    pub fn x(j: usize) -> Coord {
        Coord { mode: Mode::Flag2, index: (2 * j + 1) as u16 }
    }

    pub fn y(j: usize) -> Coord {
        Coord { mode: Mode::Flag2, index: (2 * j + 2) as u16 }
    }

    pub fn g(i: usize) -> Coord {
        assert!(i >= 1, "goursat coordinates start at x_1");
        Coord { mode: Mode::Goursat, index: i as u16 }
    }

    pub fn mode(self) -> Mode {
        self.mode
    }

    pub fn kind(self) -> CoordKind {
        match self.mode {
            Mode::Goursat => CoordKind::G(self.index as usize),
            Mode::Flag2 => match self.index {
                0 => CoordKind::T,
                i if i % 2 == 1 => CoordKind::X((i as usize - 1) / 2),
                i => CoordKind::Y((i as usize - 2) / 2),
            },
        }
    }

    /// The jet level of the coordinate: `j` for `x^j, y^j`, `0` for `t`.
    /// Goursat: the subscript.
    pub fn level(self) -> usize {
        match self.kind() {
            CoordKind::T => 0,
            CoordKind::X(j) | CoordKind::Y(j) => j,
            CoordKind::G(i) => i,
        }
    }

    /// Slot of this coordinate among the base coordinates, if it is one.
    pub fn base_slot(self) -> Option<usize> {
        match self.mode {
            Mode::Flag2 if self.index <= 2 => Some(self.index as usize),
            Mode::Goursat if (1..=3).contains(&self.index) => Some(self.index as usize - 1),
            _ => None,
        }
    }

    pub fn is_base(self) -> bool {
        self.base_slot().is_some()
    }

    pub fn name(self) -> String {
        match self.kind() {
            CoordKind::T => "t".into(),
            CoordKind::X(j) => format!("x{j}"),
            CoordKind::Y(j) => format!("y{j}"),
            CoordKind::G(i) => format!("x{i}"),
        }
    }

    pub fn latex(self) -> String {
        match self.kind() {
            CoordKind::T => "t".into(),
            CoordKind::X(j) => format!("x^{{{j}}}"),
            CoordKind::Y(j) => format!("y^{{{j}}}"),
            CoordKind::G(i) => format!("x^{{{i}}}"),
        }
    }

    pub fn parse(mode: Mode, s: &str) -> Result<Coord, ParseError> {
        let err = || ParseError::Coord(s.to_string());
        if mode == Mode::Flag2 && s == "t" {
            return Ok(Coord::t());
        }
        let (head, tail) = s.split_at(s.find(|c: char| c.is_ascii_digit()).ok_or_else(err)?);
        let n: usize = tail.parse().map_err(|_| err())?;
        if tail.starts_with('0') && tail.len() > 1 {
            return Err(err());
        }
        match (mode, head) {
            (Mode::Flag2, "x") => Ok(Coord::x(n)),
            (Mode::Flag2, "y") => Ok(Coord::y(n)),
            (Mode::Goursat, "x") if n >= 1 => Ok(Coord::g(n)),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The free base functions: `A, B, C` for special 2-flags, the contact
/// hamiltonian `f` for Goursat flags.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    A,
    B,
    C,
    F,
}

impl Base {
    pub fn letter(self) -> char {
        match self {
            Base::A => 'A',
            Base::B => 'B',
            Base::C => 'C',
            Base::F => 'f',
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Base::F => Mode::Goursat,
            _ => Mode::Flag2,
        }
    }
}

/// A partial derivative of a base function, left formal.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct DerivAtom {
    pub base: Base,
    /// Differentiation orders along the three base coordinates.
    pub multi: [u32; 3],
}

impl DerivAtom {
    pub fn new(base: Base, multi: [u32; 3]) -> Self {
        DerivAtom { base, multi }
    }

    pub fn pure(base: Base) -> Self {
        DerivAtom { base, multi: [0; 3] }
    }

    pub fn order(&self) -> u32 {
        self.multi.iter().sum()
    }

    pub fn raised(&self, slot: usize) -> DerivAtom {
        let mut multi = self.multi;
        multi[slot] += 1;
        DerivAtom { base: self.base, multi }
    }

    pub fn mode(&self) -> Mode {
        self.base.mode()
    }

    /// The base coordinates differentiated along, with repetition, in order.
    pub fn derivative_coords(&self) -> Vec<Coord> {
        let base = self.mode().base_coords();
        let mut out = Vec::new();
        for (slot, k) in self.multi.iter().enumerate() {
            for _ in 0..*k {
                out.push(base[slot]);
            }
        }
        out
    }

    /// Text form: `B`, `A_t`, `B_t_x0_x0`, `f_x2_x3`.
    pub fn name(&self) -> String {
        let mut s = self.base.letter().to_string();
        for c in self.derivative_coords() {
            s.push('_');
            s.push_str(&c.name());
        }
        s
    }

    /// LaTeX form: `A_t`, `B_{x^0 x^0}`, `f_{23}`.
    pub fn latex(&self) -> String {
        let coords = self.derivative_coords();
        let letter = self.base.letter();
        if coords.is_empty() {
            return letter.to_string();
        }
        match self.mode() {
            Mode::Goursat => {
                let digits: String = coords.iter().map(|c| c.level().to_string()).collect();
                if digits.len() == 1 {
                    format!("{letter}_{digits}")
                } else {
                    format!("{letter}_{{{digits}}}")
                }
            }
            Mode::Flag2 => {
                if coords.len() == 1 && coords[0] == Coord::t() {
                    format!("{letter}_t")
                } else {
                    let body: Vec<String> = coords.iter().map(|c| c.latex()).collect();
                    format!("{letter}_{{{}}}", body.join(" "))
                }
            }
        }
    }

    pub fn parse(s: &str) -> Result<DerivAtom, ParseError> {
        let err = || ParseError::Atom(s.to_string());
        let mut parts = s.split('_');
        let base = match parts.next().ok_or_else(err)? {
            "A" => Base::A,
            "B" => Base::B,
            "C" => Base::C,
            "f" => Base::F,
            _ => return Err(err()),
        };
        let mut atom = DerivAtom::pure(base);
        for p in parts {
            let c = Coord::parse(base.mode(), p).map_err(|_| err())?;
            let slot = c.base_slot().ok_or_else(err)?;
            atom = atom.raised(slot);
        }
        Ok(atom)
    }
}

impl Ord for DerivAtom {
    /// Base letter first, then graded order, then larger exponents on earlier
    /// base coordinates first (so `A_t < A_x0 < A_y0`).
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.base
            .cmp(&other.base)
            .then(self.order().cmp(&other.order()))
            .then(other.multi.cmp(&self.multi))
    }
}

impl PartialOrd for DerivAtom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DerivAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A monomial in chart coordinates: sorted `(coord, exponent)` pairs, exponents positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<(Coord, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(c: Coord) -> Mono {
        Mono(vec![(c, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Coord, u32)>) -> Mono {
        let mut m = Mono::one();
        for (c, e) in pairs {
            if e > 0 {
                m = m.mul(&Mono(vec![(c, e)]));
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Coord, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, c: Coord) -> u32 {
        self.0
            .binary_search_by(|(k, _)| k.cmp(&c))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// `(k, m / c)` where `k` is the exponent of `c`; `None` if `c` is absent.
    pub fn lowered(&self, c: Coord) -> Option<(u32, Mono)> {
        let i = self.0.binary_search_by(|(k, _)| k.cmp(&c)).ok()?;
        let mut v = self.0.clone();
        let k = v[i].1;
        if k == 1 {
            v.remove(i);
        } else {
            v[i].1 -= 1;
        }
        Some((k, Mono(v)))
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        self.0.iter().map(|(c, _)| *c)
    }
}
