//! The fixed symbol vocabulary of the toolkit.
//!
//! The grammar works over a closed set of names: chart variables
//! `x y t u z w s`, named constants `c1 c2 a b c eps epsp`, elementary
//! functions `exp ln tanh`, and the unknown functions `u(x,y,t)`,
//! `f(z,w)`, `g(s)`.

use std::fmt;

/// A symbol name. Whether it acts as a variable, a named constant or an
/// unknown-function head is decided by the expression node that carries it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sym {
    X,
    Y,
    T,
    U,
    Z,
    W,
    S,
    F,
    G,
    C1,
    C2,
    A,
    B,
    C,
    Eps,
    EpsP,
}

impl Sym {
    pub fn name(self) -> &'static str {
        match self {
            Sym::X => "x",
            Sym::Y => "y",
            Sym::T => "t",
            Sym::U => "u",
            Sym::Z => "z",
            Sym::W => "w",
            Sym::S => "s",
            Sym::F => "f",
            Sym::G => "g",
            Sym::C1 => "c1",
            Sym::C2 => "c2",
            Sym::A => "a",
            Sym::B => "b",
            Sym::C => "c",
            Sym::Eps => "eps",
            Sym::EpsP => "epsp",
        }
    }

    pub fn from_name(name: &str) -> Option<Sym> {
        Some(match name {
            "x" => Sym::X,
            "y" => Sym::Y,
            "t" => Sym::T,
            "u" => Sym::U,
            "z" => Sym::Z,
            "w" => Sym::W,
            "s" => Sym::S,
            "f" => Sym::F,
            "g" => Sym::G,
            "c1" => Sym::C1,
            "c2" => Sym::C2,
            "a" => Sym::A,
            "b" => Sym::B,
            "c" => Sym::C,
            "eps" => Sym::Eps,
            "epsp" => Sym::EpsP,
            _ => return None,
        })
    }

    /// Symbols the grammar treats as variables.
    pub const VARIABLES: [Sym; 9] = [
        Sym::X,
        Sym::Y,
        Sym::T,
        Sym::U,
        Sym::Z,
        Sym::W,
        Sym::S,
        Sym::F,
        Sym::G,
    ];

    /// Symbols the grammar treats as named constants.
    pub const CONSTANTS: [Sym; 7] = [
        Sym::C1,
        Sym::C2,
        Sym::A,
        Sym::B,
        Sym::C,
        Sym::Eps,
        Sym::EpsP,
    ];

    pub fn is_variable_name(self) -> bool {
        Sym::VARIABLES.contains(&self)
    }

    pub fn is_constant_name(self) -> bool {
        Sym::CONSTANTS.contains(&self)
    }

    /// Default argument list of an unknown function, or `None` if the symbol
    /// is not an unknown-function head. `u` lives on the main chart, `f` on
    /// the reduced chart, `g` on the ODE chart.
    pub fn unknown_signature(self) -> Option<&'static [Sym]> {
        match self {
            Sym::U => Some(&[Sym::X, Sym::Y, Sym::T]),
            Sym::F => Some(&[Sym::Z, Sym::W]),
            Sym::G => Some(&[Sym::S]),
            _ => None,
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Elementary function heads.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Func {
    Exp,
    Ln,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
