"""Data-side tooling: triples, stratification, curriculum mixing, back-translation.

A triple aligns a natural-language component with its Lean fragment and,
except for atomic pairs, its operator tree. Non-atomic triples are ranked by
the composite complexity key (node_count, depth, width), the most complex
fraction is dropped, and the remainder splits into Simple / Moderate /
Complex at configurable percentile cuts. Curriculum phases then mix the
current tier with replayed samples from earlier tiers.

Default cuts (51%, 90%) of the post-filter ranking approximate the tier
proportions used to train the formalizer; both cuts and the drop fraction
are reproducibility knobs, not constants of nature.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .errors import EmptyTier, MissingOpt, MissingSection, UnmappedLine
from .opt_tree import OptNode, metrics, node_from_payload, node_to_payload, serialize_opt
from .prompts import build_backtranslation_prompt, build_structure_prompt
from .statement import is_binder_sequence

__all__ = [
    "Tier",
    "Triple",
    "PhasePlan",
    "CURRICULUM_PLANS",
    "StratifySummary",
    "stratify",
    "build_phase_mix",
    "build_backtranslation_prompt",
    "parse_backtranslation",
    "triple_to_training_pair",
    "read_triples",
    "write_triples",
]


class Tier(str, Enum):
    ATOMIC = "Atomic"
    SIMPLE = "Simple"
    MODERATE = "Moderate"
    COMPLEX = "Complex"


@dataclass(frozen=True)
class Triple:
    nl: str
    fl: str
    opt: OptNode | None = None
    tier: Tier | None = None

    def to_payload(self) -> dict:
        payload: dict = {"nl": self.nl, "fl": self.fl}
        if self.opt is not None:
            payload["opt"] = node_to_payload(self.opt)
        if self.tier is not None:
            payload["tier"] = self.tier.value
        return payload

    @classmethod
    def from_payload(cls, payload: dict) -> "Triple":
        return cls(
            nl=payload["nl"],
            fl=payload["fl"],
            opt=node_from_payload(payload["opt"]) if payload.get("opt") else None,
            tier=Tier(payload["tier"]) if payload.get("tier") else None,
        )


@dataclass(frozen=True)
class PhasePlan:
    """One curriculum phase: primary tier plus replay tiers, with run metadata."""

    phase: int
    primary: tuple[Tier, float]
    replay: tuple[tuple[Tier, float], ...]
    epochs: int
    batch_size: int
    learning_rate: float
    warmup_ratio: float

    def __post_init__(self):
        total = self.primary[1] + sum(fraction for _, fraction in self.replay)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"phase {self.phase} fractions sum to {total}, not 1.0")


CURRICULUM_PLANS: dict[int, PhasePlan] = {
    1: PhasePlan(1, (Tier.ATOMIC, 1.0), (), 1, 128, 2e-4, 0.03),
    2: PhasePlan(2, (Tier.SIMPLE, 0.9), ((Tier.ATOMIC, 0.1),), 1, 128, 1e-4, 0.10),
    3: PhasePlan(3, (Tier.MODERATE, 0.7), ((Tier.SIMPLE, 0.3),), 1, 128, 5e-5, 0.03),
    4: PhasePlan(
        4, (Tier.COMPLEX, 0.5), ((Tier.MODERATE, 0.3), (Tier.SIMPLE, 0.2)), 1, 64, 1e-5, 0.03
    ),
}


def complexity_key(triple: Triple) -> tuple[int, int, int]:
    m = metrics(triple.opt)
    return (m.node_count, m.depth, m.width)


@dataclass(frozen=True)
class StratifySummary:
    total: int
    atomic: int
    dropped: int
    simple: int
    moderate: int
    complex: int
    extreme_fraction: float
    cut_percentiles: tuple[float, float]

    def to_payload(self) -> dict:
        return {
            "total": self.total,
            "atomic": self.atomic,
            "dropped": self.dropped,
            "simple": self.simple,
            "moderate": self.moderate,
            "complex": self.complex,
            "extreme_fraction": self.extreme_fraction,
            "cut_percentiles": list(self.cut_percentiles),
        }


def stratify(
    triples: list[Triple],
    cut_percentiles: tuple[float, float] = (0.51, 0.90),
    extreme_fraction: float = 0.01,
) -> tuple[list[Triple], list[Triple], StratifySummary]:
    """Assign tiers; returns (tiered triples, dropped triples, summary).

    Atomic triples pass through untouched. The drop count floors, so a tiny
    corpus drops nothing; percentile boundaries round, and ties keep stable
    input order.
    """
    low, high = cut_percentiles
    if not (0.0 <= low <= high <= 1.0):
        raise ValueError("cut percentiles must satisfy 0 <= low <= high <= 1")
    atomic = [t for t in triples if t.tier is Tier.ATOMIC]
    ranked = [t for t in triples if t.tier is not Tier.ATOMIC]
    for i, triple in enumerate(ranked):
        if triple.opt is None:
            raise MissingOpt(f"non-atomic triple {i} has no operator tree")

    ranked = sorted(ranked, key=complexity_key)  # ascending complexity, stable
    drop_count = math.floor(extreme_fraction * len(ranked))
    kept = ranked[: len(ranked) - drop_count] if drop_count else ranked
    dropped = ranked[len(ranked) - drop_count :] if drop_count else []

    simple_end = round(low * len(kept))
    moderate_end = round(high * len(kept))
    tiered = list(atomic)
    tiered += [replace(t, tier=Tier.SIMPLE) for t in kept[:simple_end]]
    tiered += [replace(t, tier=Tier.MODERATE) for t in kept[simple_end:moderate_end]]
    tiered += [replace(t, tier=Tier.COMPLEX) for t in kept[moderate_end:]]

    summary = StratifySummary(
        total=len(triples),
        atomic=len(atomic),
        dropped=drop_count,
        simple=simple_end,
        moderate=moderate_end - simple_end,
        complex=len(kept) - moderate_end,
        extreme_fraction=extreme_fraction,
        cut_percentiles=cut_percentiles,
    )
    return tiered, dropped, summary


def build_phase_mix(
    triples: list[Triple],
    plan: PhasePlan,
    total: int,
    seed: int,
) -> tuple[list[Triple], dict]:
    """Seeded sampling per the phase plan; primary tier absorbs rounding residue.

    Sampling is without replacement unless a tier is smaller than its quota,
    which flips that tier to with-replacement and flags it in the summary.
    """
    if total < 1:
        raise ValueError("total must be positive")
    pools: dict[Tier, list[Triple]] = {tier: [] for tier in Tier}
    for triple in triples:
        if triple.tier is not None:
            pools[triple.tier].append(triple)

    quotas: list[tuple[Tier, int]] = []
    replay_total = 0
    for tier, fraction in plan.replay:
        quota = round(fraction * total)
        quotas.append((tier, quota))
        replay_total += quota
    quotas.insert(0, (plan.primary[0], total - replay_total))

    rng = random.Random(seed)
    samples: list[Triple] = []
    with_replacement: list[str] = []
    for tier, quota in quotas:
        if quota <= 0:
            continue
        pool = pools[tier]
        if not pool:
            raise EmptyTier(tier.value)
        if quota <= len(pool):
            samples.extend(rng.sample(pool, quota))
        else:
            with_replacement.append(tier.value)
            samples.extend(rng.choice(pool) for _ in range(quota))
    rng.shuffle(samples)

    summary = {
        "phase": plan.phase,
        "total": total,
        "seed": seed,
        "quotas": {tier.value: quota for tier, quota in quotas},
        "with_replacement": with_replacement,
    }
    return samples, summary


# ---------------------------------------------------------------------------
# Back-translation (formal fragments -> informal text, line by line)

_CONDITIONS_HEADING = "**Informal Conditions:**"
_CONCLUSION_HEADING = "**Informal Conclusion:**"
_ARROW = "-->"


@dataclass(frozen=True)
class BackTranslation:
    condition_pairs: tuple[tuple[str, str], ...]
    conclusion_pair: tuple[str, str]


def parse_backtranslation(response: str) -> BackTranslation:
    """Each ``X --> Y`` line yields an (X, Y) pair; 'No conditions' yields none."""
    cond_idx = response.find(_CONDITIONS_HEADING)
    if cond_idx < 0:
        raise MissingSection(_CONDITIONS_HEADING)
    concl_idx = response.find(_CONCLUSION_HEADING)
    if concl_idx < 0:
        raise MissingSection(_CONCLUSION_HEADING)
    cond_block = response[cond_idx + len(_CONDITIONS_HEADING) : concl_idx]
    concl_block = response[concl_idx + len(_CONCLUSION_HEADING) :]

    condition_pairs: list[tuple[str, str]] = []
    for raw_line in cond_block.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if line.lower().rstrip(".") == "no conditions":
            continue
        if _ARROW not in line:
            raise UnmappedLine(line)
        formal, informal = line.split(_ARROW, 1)
        condition_pairs.append((formal.strip(), informal.strip()))

    conclusion_pair: tuple[str, str] | None = None
    for raw_line in concl_block.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if _ARROW not in line:
            raise UnmappedLine(line)
        formal, informal = line.split(_ARROW, 1)
        conclusion_pair = (formal.strip(), informal.strip())
        break
    if conclusion_pair is None:
        raise MissingSection("conclusion mapping line")
    return BackTranslation(tuple(condition_pairs), conclusion_pair)


# ---------------------------------------------------------------------------
# Training-pair emission (matches the formalizer's output contract)


def triple_to_training_pair(triple: Triple, phase: int | None = None) -> dict:
    """{prompt, completion} in the exact shape the formalizer parses back."""
    tag = "Condition" if is_binder_sequence(triple.fl) else "Conclusion"
    prompt = build_structure_prompt(triple.nl, tag)
    completion = f"```lean\n{triple.fl}\n```"
    if triple.opt is not None:
        completion += f"\n\n```json\n{serialize_opt(triple.opt)}\n```"
    pair = {"prompt": prompt, "completion": completion}
    if phase is not None:
        pair["phase"] = phase
    if triple.tier is not None:
        pair["tier"] = triple.tier.value
    return pair


def read_triples(path: str | Path) -> list[Triple]:
    triples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                triples.append(Triple.from_payload(json.loads(line)))
    return triples


def write_triples(triples: list[Triple], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for triple in triples:
            fh.write(json.dumps(triple.to_payload(), ensure_ascii=False) + "\n")
