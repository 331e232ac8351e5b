"""Named fixtures with expected verdicts, loaded from ``data/fixtures.ini``.

Each fixture binds an input (density asymptote, moment asymptote or log-Levy
law) to the verdict expected for every value of its swept parameter.
"""
from __future__ import annotations

import configparser
import fnmatch
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterator

from . import convex as cx
from . import criteria as cr
from . import levy
from . import oracle

__all__ = ["Fixture", "FixtureResult", "load_fixtures", "fixture_names", "get_fixture", "run_fixture", "run_catalog"]

_PREFIX = "fixture:"
_LEVY_KEYS = ("psi", "b", "sigma2", "family", "alpha", "c", "lam", "mu", "density", "side")


def _split(text: str | None) -> list[str]:
    return [p.strip() for p in (text or "").split(",") if p.strip()]


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str
    spec: dict
    param: str | None
    values: tuple[float, ...]
    expected: tuple[cr.Outcome, ...]
    reason: str = ""
    note: str = ""
    source: str = ""

    def __post_init__(self):
        if self.kind not in ("density", "moments", "levy"):
            raise ValueError(f"fixture {self.name}: unknown kind {self.kind!r}")
        n = max(len(self.values), 1)
        if len(self.expected) != n:
            raise ValueError(f"fixture {self.name}: {len(self.expected)} expectations for {n} parameter values")

    @classmethod
    def from_section(cls, name: str, sec) -> "Fixture":
        values = tuple(float(v) for v in _split(sec.get("values")))
        expected = tuple(cr.Outcome(v) for v in _split(sec.get("expected")))
        reserved = {"kind", "param", "values", "expected", "reason", "note", "source"}
        spec = {k: v for k, v in sec.items() if k not in reserved}
        return cls(name, sec["kind"].strip(), spec, (sec.get("param") or "").strip() or None, values, expected,
                   sec.get("reason", ""), sec.get("note", ""), sec.get("source", ""))

    def cases(self) -> list[dict]:
        if self.param is None:
            return [{}]
        return [{self.param: v} for v in self.values]

    def expected_for(self, params: dict) -> cr.Outcome:
        if self.param is None:
            return self.expected[0]
        if self.param not in params:
            raise ValueError(f"fixture {self.name} needs parameter {self.param!r}")
        val = float(params[self.param])
        for v, e in zip(self.values, self.expected):
            if v == val:
                return e
        raise ValueError(f"{self.param}={val!r} is not a declared value of fixture {self.name} {list(self.values)}")

    def fill(self, text: str, params: dict) -> str:
        return text.format(**{k: repr(float(v)) for k, v in params.items()})

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "spec": dict(self.spec), "param": self.param,
                "values": list(self.values), "expected": [e.value for e in self.expected],
                "reason": self.reason, "note": self.note, "source": self.source}


@dataclass
class FixtureResult:
    fixture: str
    params: dict
    verdict: cr.Verdict
    expected: cr.Verdict
    match: bool
    seconds: float = field(default=0.0, compare=False)

    def __iter__(self):
        # unpacks as (verdict, expected, match)
        return iter((self.verdict, self.expected, self.match))

    def to_dict(self) -> dict:
        return {"fixture": self.fixture, "params": self.params, "match": self.match,
                "expected": self.expected.to_dict(), "verdict": self.verdict.to_dict()}


def load_fixtures(path=None) -> dict[str, Fixture]:
    """Parse the fixture file (the packaged one by default)."""
    cp = configparser.ConfigParser(interpolation=None)
    if path is None:
        cp.read_string(resources.files("stieltjes").joinpath("data/fixtures.ini").read_text())
    else:
        with open(path) as fh:
            cp.read_file(fh)
    out = {}
    for sec in cp.sections():
        if sec.startswith(_PREFIX):
            name = sec[len(_PREFIX):]
            out[name] = Fixture.from_section(name, cp[sec])
    return out


_CACHE: dict[str, Fixture] | None = None


def _fixtures() -> dict[str, Fixture]:
    global _CACHE
    if _CACHE is None:
        _CACHE = load_fixtures()
    return _CACHE


def fixture_names(pattern: str = "*") -> list[str]:
    return [n for n in _fixtures() if fnmatch.fnmatch(n, pattern)]


def get_fixture(name: str) -> Fixture:
    try:
        return _fixtures()[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(_fixtures())}") from None


def _cond_b(text: str | None):
    t = (text or "unknown").strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    if t == "unknown":
        return None
    raise ValueError(f"cond_b must be true, false or unknown, got {text!r}")


def _evaluate(fx: Fixture, params: dict, config: oracle.BlockConfig | None) -> cr.Verdict:
    spec = fx.spec
    if fx.kind == "density":
        d = cr.DensityAsymptote.from_expr(fx.fill(spec["gstar"], params), spec.get("relation", "two-sided"))
        return cr.classify_from_density_asymptote(d, config=config)
    if fx.kind == "moments":
        G = cx.profile(fx.fill(spec["g"], params))
        return cr.classify_from_moment_asymptote(G, _cond_b(spec.get("cond_b")), config=config)
    t = float(params.get("t", spec.get("t", 1.0)))
    law = levy.law_from_config({k: spec[k] for k in _LEVY_KEYS if k in spec}, t)
    return levy.classify_loglevy(law, config=config)


def _matches(fx: Fixture, verdict: cr.Verdict, expected: cr.Outcome) -> bool:
    if verdict.outcome is not expected:
        return False
    return not fx.reason or verdict.reason.startswith(fx.reason)


def run_fixture(name: str, params: dict | None = None, config: oracle.BlockConfig | None = None) -> FixtureResult:
    """Run one fixture case; unpacks as ``(verdict, expected, match)``."""
    fx = get_fixture(name)
    params = dict(params or {})
    if fx.param is None and params:
        raise ValueError(f"fixture {name} takes no parameters")
    outcome = fx.expected_for(params)
    expected = cr.Verdict(outcome, reason=fx.reason)
    if fx.note:
        expected.add("note", fx.note)
    t0 = time.perf_counter()
    verdict = _evaluate(fx, params, config)
    return FixtureResult(name, params, verdict, expected, _matches(fx, verdict, outcome),
                         time.perf_counter() - t0)


def run_catalog(pattern: str = "*", config: oracle.BlockConfig | None = None) -> Iterator[FixtureResult]:
    """Every declared case of every fixture whose name matches ``pattern``."""
    for name in fixture_names(pattern):
        for params in get_fixture(name).cases():
            yield run_fixture(name, params, config)
