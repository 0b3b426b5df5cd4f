//! `name(key=value, …)` descriptors for potentials, families and initial
//! data, e.g. `mollified(base=clipped_quadratic(u_star=1), ratio=1, eps=0.1)`.

use std::fmt;

use fracwave::experiments::{interior_bump, interior_sine, random_smooth};
use fracwave::potentials::{
    ball_potential, capped_quadratic, clipped_quadratic, example41_family, example41_member,
    mollified_family, Potential, RegularizedFamily,
};
use fracwave::spectral::{Domain, Field};

/// Parsed but uninterpreted descriptor term.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Number(f64),
    Call { name: String, args: Vec<(String, Term)> },
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(format!("expected '{c}' at offset {}, found '{x}'", self.pos)),
            None => Err(format!("expected '{c}' at end of input")),
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(format!("expected a name at offset {}", self.pos));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn term(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let rest = &self.src[self.pos..];
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || "+-.".contains(c)))
                    .unwrap_or(rest.len());
                let text = &rest[..len];
                let value: f64 = text.parse().map_err(|_| format!("invalid number '{text}'"))?;
                self.pos += len;
                Ok(Term::Number(value))
            }
            _ => {
                let name = self.ident()?;
                let mut args = Vec::new();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    if self.peek() != Some(')') {
                        loop {
                            let key = self.ident()?;
                            self.expect('=')?;
                            let value = self.term()?;
                            if args.iter().any(|(k, _)| k == &key) {
                                return Err(format!("argument '{key}' given twice"));
                            }
                            args.push((key, value));
                            if self.peek() == Some(',') {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(')')?;
                }
                Ok(Term::Call { name, args })
            }
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term, String> {
    let mut p = Parser { src, pos: 0 };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(format!("unexpected trailing input '{}'", &src[p.pos..]));
    }
    Ok(t)
}

/// Argument accessor that rejects unknown and missing keys.
struct Args<'a> {
    call: &'a str,
    args: &'a [(String, Term)],
}

impl<'a> Args<'a> {
    fn new(call: &'a str, args: &'a [(String, Term)], allowed: &[&str]) -> Result<Self, String> {
        for (k, _) in args {
            if !allowed.contains(&k.as_str()) {
                return Err(format!(
                    "unknown argument '{k}' for {call}(…); expected one of: {}",
                    allowed.join(", ")
                ));
            }
        }
        Ok(Args { call, args })
    }

    fn get(&self, key: &str) -> Option<&'a Term> {
        self.args.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Term::Number(x)) => Ok(Some(*x)),
            Some(_) => Err(format!("argument '{key}' of {}(…) must be a number", self.call)),
        }
    }

    fn required(&self, key: &str) -> Result<f64, String> {
        self.number(key)?
            .ok_or_else(|| format!("{}(…) requires argument '{key}'", self.call))
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.number(key)? {
            None => Ok(default),
            Some(x) if x >= 1.0 && x.fract() == 0.0 && x <= 1e6 => Ok(x as usize),
            Some(x) => Err(format!("argument '{key}' of {}(…) must be a positive integer, got {x}", self.call)),
        }
    }
}

type NamedArgs = [(String, Term)];

fn as_call(t: &Term) -> Result<(&str, &NamedArgs), String> {
    match t {
        Term::Call { name, args } => Ok((name, args)),
        Term::Number(x) => Err(format!("expected a descriptor, found the number {x}")),
    }
}

/// Shortest decimal that round-trips.
fn num(x: f64) -> String {
    format!("{x:?}").trim_end_matches(".0").to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialDescriptor {
    Zero { m: usize },
    ClippedQuadratic { u_star: f64 },
    Ball { m: usize },
    Capped { m: usize, r_in: f64, r_out: f64 },
    Example41 { eps: f64 },
    Mollified { base: Box<PotentialDescriptor>, ratio: f64, eps: f64 },
}

impl PotentialDescriptor {
    pub fn parse(src: &str) -> Result<Self, String> {
        Self::from_term(&parse_term(src)?)
    }

    fn from_term(t: &Term) -> Result<Self, String> {
        let (name, args) = as_call(t)?;
        Ok(match name {
            "zero" => {
                let a = Args::new(name, args, &["m"])?;
                PotentialDescriptor::Zero { m: a.count("m", 1)? }
            }
            "clipped_quadratic" => {
                let a = Args::new(name, args, &["u_star"])?;
                PotentialDescriptor::ClippedQuadratic {
                    u_star: a.number("u_star")?.unwrap_or(1.0),
                }
            }
            "ball" => {
                let a = Args::new(name, args, &["m"])?;
                PotentialDescriptor::Ball { m: a.count("m", 1)? }
            }
            "capped" => {
                let a = Args::new(name, args, &["m", "r_in", "r_out"])?;
                PotentialDescriptor::Capped {
                    m: a.count("m", 1)?,
                    r_in: a.required("r_in")?,
                    r_out: a.required("r_out")?,
                }
            }
            "example41" => {
                let a = Args::new(name, args, &["eps"])?;
                PotentialDescriptor::Example41 { eps: a.required("eps")? }
            }
            "mollified" => {
                let a = Args::new(name, args, &["base", "ratio", "eps"])?;
                let base = a
                    .get("base")
                    .ok_or_else(|| "mollified(…) requires argument 'base'".to_string())?;
                PotentialDescriptor::Mollified {
                    base: Box::new(Self::from_term(base)?),
                    ratio: a.number("ratio")?.unwrap_or(1.0),
                    eps: a.required("eps")?,
                }
            }
            other => {
                return Err(format!(
                    "unknown potential '{other}'; expected zero, clipped_quadratic, ball, capped, example41 or mollified"
                ))
            }
        })
    }

    pub fn build(&self) -> fracwave::Result<Potential> {
        match self {
            PotentialDescriptor::Zero { m } => Potential::zero(*m),
            PotentialDescriptor::ClippedQuadratic { u_star } => clipped_quadratic(*u_star),
            PotentialDescriptor::Ball { m } => ball_potential(*m),
            PotentialDescriptor::Capped { m, r_in, r_out } => capped_quadratic(*m, *r_in, *r_out),
            PotentialDescriptor::Example41 { eps } => example41_member(*eps),
            PotentialDescriptor::Mollified { base, ratio, eps } => {
                mollified_family(&base.build()?, *ratio)?.make(*eps)
            }
        }
    }
}

impl fmt::Display for PotentialDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialDescriptor::Zero { m } => write!(f, "zero(m={m})"),
            PotentialDescriptor::ClippedQuadratic { u_star } => write!(f, "clipped_quadratic(u_star={})", num(*u_star)),
            PotentialDescriptor::Ball { m } => write!(f, "ball(m={m})"),
            PotentialDescriptor::Capped { m, r_in, r_out } => {
                write!(f, "capped(m={m}, r_in={}, r_out={})", num(*r_in), num(*r_out))
            }
            PotentialDescriptor::Example41 { eps } => write!(f, "example41(eps={})", num(*eps)),
            PotentialDescriptor::Mollified { base, ratio, eps } => {
                write!(f, "mollified(base={base}, ratio={}, eps={})", num(*ratio), num(*eps))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyDescriptor {
    Example41,
    Mollified { base: PotentialDescriptor, ratio: f64 },
    Constant { base: PotentialDescriptor },
}

impl FamilyDescriptor {
    pub fn parse(src: &str) -> Result<Self, String> {
        let t = parse_term(src)?;
        let (name, args) = as_call(&t)?;
        Ok(match name {
            "example41" => {
                Args::new(name, args, &[])?;
                FamilyDescriptor::Example41
            }
            "mollified" | "constant" => {
                let allowed: &[&str] = if name == "mollified" { &["base", "ratio"] } else { &["base"] };
                let a = Args::new(name, args, allowed)?;
                let base = PotentialDescriptor::from_term(
                    a.get("base")
                        .ok_or_else(|| format!("{name}(…) requires argument 'base'"))?,
                )?;
                if name == "mollified" {
                    FamilyDescriptor::Mollified {
                        base,
                        ratio: a.number("ratio")?.unwrap_or(1.0),
                    }
                } else {
                    FamilyDescriptor::Constant { base }
                }
            }
            other => {
                return Err(format!(
                    "unknown family '{other}'; expected example41, mollified or constant"
                ))
            }
        })
    }

    pub fn build(&self) -> fracwave::Result<RegularizedFamily> {
        match self {
            FamilyDescriptor::Example41 => Ok(example41_family()),
            FamilyDescriptor::Mollified { base, ratio } => mollified_family(&base.build()?, *ratio),
            FamilyDescriptor::Constant { base } => RegularizedFamily::constant(&base.build()?),
        }
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyDescriptor::Example41 => write!(f, "example41"),
            FamilyDescriptor::Mollified { base, ratio } => write!(f, "mollified(base={base}, ratio={})", num(*ratio)),
            FamilyDescriptor::Constant { base } => write!(f, "constant(base={base})"),
        }
    }
}

/// Initial-data shapes; all vanish outside Ω in exterior-Dirichlet mode.
#[derive(Debug, Clone, PartialEq)]
pub enum DataDescriptor {
    Zero,
    Constant { value: f64 },
    Bump { amplitude: f64 },
    Sine { k: usize, amplitude: f64 },
    /// Seeded random smooth data; the seed comes from `[run] seed`.
    Random { amplitude: f64 },
}

impl DataDescriptor {
    pub fn parse(src: &str) -> Result<Self, String> {
        let t = parse_term(src)?;
        let (name, args) = as_call(&t)?;
        Ok(match name {
            "zero" => {
                Args::new(name, args, &[])?;
                DataDescriptor::Zero
            }
            "constant" => {
                let a = Args::new(name, args, &["value"])?;
                DataDescriptor::Constant { value: a.required("value")? }
            }
            "bump" => {
                let a = Args::new(name, args, &["amplitude"])?;
                DataDescriptor::Bump {
                    amplitude: a.number("amplitude")?.unwrap_or(1.0),
                }
            }
            "sine" => {
                let a = Args::new(name, args, &["k", "amplitude"])?;
                DataDescriptor::Sine {
                    k: a.count("k", 1)?,
                    amplitude: a.number("amplitude")?.unwrap_or(1.0),
                }
            }
            "random" => {
                let a = Args::new(name, args, &["amplitude"])?;
                DataDescriptor::Random {
                    amplitude: a.number("amplitude")?.unwrap_or(1.0),
                }
            }
            other => {
                return Err(format!(
                    "unknown initial data '{other}'; expected zero, constant, bump, sine or random"
                ))
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DataDescriptor::Zero)
    }

    pub fn build(&self, domain: &Domain, m: usize, seed: u64) -> Result<Field, String> {
        Ok(match self {
            DataDescriptor::Zero => Field::zeros(domain, m),
            DataDescriptor::Constant { value } => {
                if domain.mode() == fracwave::spectral::BoundaryMode::ExteriorDirichlet && *value != 0.0 {
                    return Err("nonzero constant data does not vanish outside the domain".into());
                }
                Field::constant(domain, &vec![*value; m])
            }
            DataDescriptor::Bump { amplitude } => interior_bump(domain, m, *amplitude),
            DataDescriptor::Sine { k, amplitude } => {
                if m != 1 {
                    return Err("sine data is scalar; the potential acts on R^m with m > 1".into());
                }
                interior_sine(domain, *k, *amplitude)
            }
            DataDescriptor::Random { amplitude } => random_smooth(domain, m, *amplitude, seed),
        })
    }
}

impl fmt::Display for DataDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataDescriptor::Zero => write!(f, "zero"),
            DataDescriptor::Constant { value } => write!(f, "constant(value={})", num(*value)),
            DataDescriptor::Bump { amplitude } => write!(f, "bump(amplitude={})", num(*amplitude)),
            DataDescriptor::Sine { k, amplitude } => write!(f, "sine(k={k}, amplitude={})", num(*amplitude)),
            DataDescriptor::Random { amplitude } => write!(f, "random(amplitude={})", num(*amplitude)),
        }
    }
}
