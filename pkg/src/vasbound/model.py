"""Stochastic VAS/CRN models, reachability properties, and CTMC-edge semantics.

Models are parsed from a small line-oriented text format (see `parse_model`)
into immutable dataclasses.  All state-level operations are pure functions;
propensities are mass-action with falling-factorial combination counts, so a
reaction needing more molecules than a state holds fires at rate 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterator, Sequence

State = tuple[int, ...]


class ModelSyntaxError(ValueError):
    """Raised for malformed model text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Species:
    index: int
    name: str


@dataclass(frozen=True)
class Reaction:
    index: int
    name: str
    reactants: tuple[int, ...]
    products: tuple[int, ...]
    rate_const: float
    update: tuple[int, ...]
    # exact decimal form of the rate constant; propensities multiply the
    # combination count into the numerator and round once at the division
    rate_num: int = 0
    rate_den: int = 1


@dataclass(frozen=True)
class VasModel:
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]
    s0: State

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.reactions)

    @property
    def update_matrix(self) -> tuple[tuple[int, ...], ...]:
        """m x n integer matrix whose column i is the update vector of reaction i."""
        return tuple(tuple(r.update[j] for r in self.reactions) for j in range(self.m))

    def species_index(self, name: str) -> int:
        for sp in self.species:
            if sp.name == name:
                return sp.index
        raise KeyError(name)


@dataclass(frozen=True)
class SubstateFormula:
    """One conjunct ``S_target = beta + sum(coeffs[k] * S_k)``."""

    target: int
    beta: int
    coeffs: tuple[tuple[int, Fraction], ...] = field(default=())

    def __post_init__(self):
        if any(k == self.target for k, _ in self.coeffs):
            raise ValueError("target species cannot appear among its own coefficients")
        if self.beta < 0:
            raise ValueError("constant term must be a nonnegative integer")
        if any(a < 0 for _, a in self.coeffs):
            raise ValueError("coefficients must be nonnegative rationals")


@dataclass(frozen=True)
class PropertySpec:
    substates: tuple[SubstateFormula, ...]
    time_bound: float

    def __post_init__(self):
        if not self.substates:
            raise ValueError("property needs at least one substate formula")
        if self.time_bound < 0:
            raise ValueError("time bound must be nonnegative")


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _logical_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_rat(tok: str, lineno: int) -> Fraction:
    try:
        return Fraction(tok)  # accepts 'p/q', decimals, and exponent notation
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return Fraction(Decimal(tok))
    except (InvalidOperation, ValueError) as exc:
        raise ModelSyntaxError(f"bad rational {tok!r}", lineno) from exc


def _parse_side(side: str, name_to_idx: dict[str, int], lineno: int) -> tuple[int, ...]:
    counts = [0] * len(name_to_idx)
    side = side.strip()
    if side == "0":
        return tuple(counts)
    for term in side.split("+"):
        term = term.strip()
        if not term:
            raise ModelSyntaxError("empty term in reaction side", lineno)
        if "*" in term:
            k_str, name = (p.strip() for p in term.split("*", 1))
            try:
                k = int(k_str)
            except ValueError as exc:
                raise ModelSyntaxError(f"bad stoichiometry {k_str!r}", lineno) from exc
            if k <= 0:
                raise ModelSyntaxError("stoichiometry must be a positive integer", lineno)
        else:
            k, name = 1, term
        if name not in name_to_idx:
            raise ModelSyntaxError(f"unknown species {name!r}", lineno)
        counts[name_to_idx[name]] += k
    return tuple(counts)


def parse_model(text: str) -> tuple[VasModel, PropertySpec]:
    """Parse model text into a validated (model, property) pair.

    Format (one directive per line; '#' starts a comment):
      species: <name> <name> ...
      init: <int> ...                        # same arity as species
      time: <nonnegative decimal>
      target: <name> = <int> [+ <rat>*<name> ...]   # one or more, conjoined
      reaction: <name> : <side> -> <side> @ <positive decimal>
    where a side is ``0`` or ``k*Name + ...`` (k omitted means 1).
    """
    species: list[Species] = []
    name_to_idx: dict[str, int] = {}
    s0: tuple[int, ...] | None = None
    time_bound: float | None = None
    targets: list[SubstateFormula] = []
    reactions: list[Reaction] = []

    for lineno, line in _logical_lines(text):
        if ":" not in line:
            raise ModelSyntaxError(f"expected '<keyword>: ...', got {line!r}", lineno)
        keyword, rest = (p.strip() for p in line.split(":", 1))
        if keyword == "species":
            if species:
                raise ModelSyntaxError("duplicate species line", lineno)
            for name in rest.split():
                if not _NAME.match(name):
                    raise ModelSyntaxError(f"bad species name {name!r}", lineno)
                if name in name_to_idx:
                    raise ModelSyntaxError(f"duplicate species name {name!r}", lineno)
                name_to_idx[name] = len(species)
                species.append(Species(len(species), name))
            if not species:
                raise ModelSyntaxError("species line names no species", lineno)
        elif keyword == "init":
            if not species:
                raise ModelSyntaxError("init before species line", lineno)
            if s0 is not None:
                raise ModelSyntaxError("duplicate init line", lineno)
            toks = rest.split()
            if len(toks) != len(species):
                raise ModelSyntaxError(
                    f"init has {len(toks)} entries for {len(species)} species", lineno
                )
            try:
                counts = tuple(int(t) for t in toks)
            except ValueError as exc:
                raise ModelSyntaxError("init entries must be integers", lineno) from exc
            if any(c < 0 for c in counts):
                raise ModelSyntaxError("negative initial count", lineno)
            s0 = counts
        elif keyword == "time":
            if time_bound is not None:
                raise ModelSyntaxError("duplicate time line", lineno)
            try:
                time_bound = float(rest)
            except ValueError as exc:
                raise ModelSyntaxError(f"bad time bound {rest!r}", lineno) from exc
            if time_bound < 0:
                raise ModelSyntaxError("time bound must be nonnegative", lineno)
        elif keyword == "target":
            if not species:
                raise ModelSyntaxError("target before species line", lineno)
            if "=" not in rest:
                raise ModelSyntaxError("target needs '<name> = ...'", lineno)
            lhs, rhs = (p.strip() for p in rest.split("=", 1))
            if not lhs:
                raise ModelSyntaxError("empty target species", lineno)
            if lhs not in name_to_idx:
                raise ModelSyntaxError(f"unknown species {lhs!r}", lineno)
            terms = [t.strip() for t in rhs.split("+")]
            if not terms or not terms[0]:
                raise ModelSyntaxError("empty target right-hand side", lineno)
            try:
                beta = int(terms[0])
            except ValueError as exc:
                raise ModelSyntaxError(
                    f"target constant must be an integer, got {terms[0]!r}", lineno
                ) from exc
            if beta < 0:
                raise ModelSyntaxError("target constant must be nonnegative", lineno)
            coeffs: dict[int, Fraction] = {}
            for term in terms[1:]:
                if "*" not in term:
                    raise ModelSyntaxError(f"expected '<rat>*<name>', got {term!r}", lineno)
                a_str, name = (p.strip() for p in term.split("*", 1))
                if name not in name_to_idx:
                    raise ModelSyntaxError(f"unknown species {name!r}", lineno)
                a = _parse_rat(a_str, lineno)
                if a < 0:
                    raise ModelSyntaxError("coefficients must be nonnegative", lineno)
                k = name_to_idx[name]
                if k == name_to_idx[lhs]:
                    raise ModelSyntaxError("target species on both sides", lineno)
                coeffs[k] = coeffs.get(k, Fraction(0)) + a
            targets.append(
                SubstateFormula(
                    target=name_to_idx[lhs],
                    beta=beta,
                    coeffs=tuple(sorted(coeffs.items())),
                )
            )
        elif keyword == "reaction":
            if not species:
                raise ModelSyntaxError("reaction before species line", lineno)
            m = re.match(r"^(\S+)\s*:\s*(.*?)->(.*?)@(.*)$", rest)
            if not m:
                raise ModelSyntaxError(
                    "reaction needs '<name> : <side> -> <side> @ <rate>'", lineno
                )
            rname, lhs, rhs, rate_str = (g.strip() for g in m.groups())
            if not _NAME.match(rname):
                raise ModelSyntaxError(f"bad reaction name {rname!r}", lineno)
            if any(r.name == rname for r in reactions):
                raise ModelSyntaxError(f"duplicate reaction name {rname!r}", lineno)
            reactants = _parse_side(lhs, name_to_idx, lineno)
            products = _parse_side(rhs, name_to_idx, lineno)
            rate_exact = _parse_rat(rate_str, lineno)
            if not rate_exact > 0:
                raise ModelSyntaxError("rate constant must be positive", lineno)
            update = tuple(p - r for p, r in zip(products, reactants))
            reactions.append(
                Reaction(
                    len(reactions),
                    rname,
                    reactants,
                    products,
                    rate_exact.numerator / rate_exact.denominator,
                    update,
                    rate_exact.numerator,
                    rate_exact.denominator,
                )
            )
        else:
            raise ModelSyntaxError(f"unknown directive {keyword!r}", lineno)

    if not species:
        raise ModelSyntaxError("missing species line")
    if s0 is None:
        raise ModelSyntaxError("missing init line")
    if time_bound is None:
        raise ModelSyntaxError("missing time line")
    if not targets:
        raise ModelSyntaxError("missing target line")
    if not reactions:
        raise ModelSyntaxError("missing reaction lines")

    model = VasModel(tuple(species), tuple(reactions), s0)
    prop = PropertySpec(tuple(targets), time_bound)
    return model, prop


def parse_model_file(path) -> tuple[VasModel, PropertySpec]:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def _format_side(counts: Sequence[int], model: VasModel) -> str:
    terms = []
    for j, k in enumerate(counts):
        if k == 1:
            terms.append(model.species[j].name)
        elif k > 1:
            terms.append(f"{k}*{model.species[j].name}")
    return " + ".join(terms) if terms else "0"


def _format_exact(num: int, den: int) -> str:
    """Exact decimal rendering when the denominator allows one, else 'num/den'."""
    d, twos, fives = den, 0, 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    k = max(twos, fives)
    if k == 0:
        return str(num)
    digits = str(num * 10**k // den).rjust(k + 1, "0")
    return digits[:-k] + "." + digits[-k:]


def serialize_model(model: VasModel, prop: PropertySpec) -> str:
    """Canonical text form; parse -> serialize -> parse is the identity."""
    lines = [
        "species: " + " ".join(sp.name for sp in model.species),
        "init: " + " ".join(str(c) for c in model.s0),
        f"time: {prop.time_bound!r}",
    ]
    for f in prop.substates:
        rhs = str(f.beta)
        for k, a in f.coeffs:
            rhs += f" + {a}*{model.species[k].name}"
        lines.append(f"target: {model.species[f.target].name} = {rhs}")
    for r in model.reactions:
        lines.append(
            f"reaction: {r.name} : {_format_side(r.reactants, model)}"
            f" -> {_format_side(r.products, model)} @ {_format_exact(r.rate_num, r.rate_den)}"
        )
    return "\n".join(lines) + "\n"


def propensity(model: VasModel, i: int, s: State) -> float:
    """Mass-action firing rate of reaction i at state s (0 when not enabled).

    The combination count is the falling factorial of each reactant count by
    its stoichiometry.  The exact decimal rate constant is multiplied in as
    integers and rounded once, so worked decimal values are reproduced exactly.
    """
    r = model.reactions[i]
    combos = 1
    for j, need in enumerate(r.reactants):
        if need:
            have = s[j]
            if have < need:
                return 0.0
            for t in range(need):
                combos *= have - t
    return (r.rate_num * combos) / r.rate_den


def reaction_enabled(model: VasModel, i: int, s: State) -> bool:
    r = model.reactions[i]
    return all(s[j] >= need for j, need in enumerate(r.reactants) if need)


def enabled_successors(model: VasModel, s: State) -> list[tuple[int, float, State]]:
    """All (reaction index, rate, successor) triples, ascending reaction index.

    Successors are valid by stoichiometry whenever the rate is positive.
    """
    out = []
    for i in range(model.n):
        rate = propensity(model, i, s)
        if rate > 0.0:
            upd = model.reactions[i].update
            out.append((i, rate, tuple(x + d for x, d in zip(s, upd))))
    return out


def exit_rate(model: VasModel, s: State) -> float:
    total = 0.0
    for i in range(model.n):
        rate = propensity(model, i, s)
        if rate > 0.0:
            total += rate
    return total


def satisfies(prop: PropertySpec, s: State) -> bool:
    """Exact check of every substate formula (integer/rational arithmetic)."""
    for f in prop.substates:
        if f.coeffs:
            rhs = Fraction(f.beta) + sum((a * s[k] for k, a in f.coeffs), Fraction(0))
            if s[f.target] != rhs:
                return False
        elif s[f.target] != f.beta:
            return False
    return True
