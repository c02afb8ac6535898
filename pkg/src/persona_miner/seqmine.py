"""Frequent-subsequence mining over compressed style trajectories (level-wise
GSP with apriori pruning), archetype extraction, and branch annotation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

MODES = ("gapped", "contiguous")


@dataclass(frozen=True)
class Pattern:
    items: tuple
    support: int


@dataclass(frozen=True)
class SequenceDb:
    """Sequence database: (sequence id, cluster-id tuple) pairs."""
    sequences: tuple

    def __post_init__(self):
        if not self.sequences:
            raise ValueError("sequence database must not be empty")
        for sid, items in self.sequences:
            if not items:
                raise ValueError(f"sequence {sid!r} is empty")

    @classmethod
    def from_paths(cls, compressed) -> "SequenceDb":
        return cls(sequences=tuple((t.session_id, tuple(t.path)) for t in compressed))

    def __len__(self) -> int:
        return len(self.sequences)


def contains_sequence(haystack, needle, mode: str = "gapped") -> bool:
    """Order-preserving containment; `contiguous` requires a consecutive run."""
    if mode == "gapped":
        it = iter(haystack)
        return all(item in it for item in needle)
    if mode == "contiguous":
        n, m = len(haystack), len(needle)
        needle = tuple(needle)
        return any(tuple(haystack[i:i + m]) == needle for i in range(n - m + 1))
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _support(db: SequenceDb, candidate: tuple, mode: str) -> int:
    return sum(1 for _sid, seq in db.sequences if contains_sequence(seq, candidate, mode))


def _subpatterns(candidate: tuple, mode: str):
    """All one-shorter subsequences used for apriori pruning."""
    if mode == "gapped":
        seen = set()
        for i in range(len(candidate)):
            sub = candidate[:i] + candidate[i + 1:]
            if sub not in seen:
                seen.add(sub)
                yield sub
    else:
        yield candidate[:-1]
        yield candidate[1:]


def gsp_mine(db: SequenceDb, min_support: int, mode: str = "gapped") -> list[Pattern]:
    """All patterns with support >= min_support, ordered by (length, items).

    Candidates of length l+1 join length-l patterns sharing an (l-1)-overlap
    and are apriori-pruned before support counting. Support counts each
    database sequence at most once.
    """
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    items = sorted({item for _sid, seq in db.sequences for item in seq})
    level = []
    for item in items:
        support = _support(db, (item,), mode)
        if support >= min_support:
            level.append(Pattern(items=(item,), support=support))

    result = list(level)
    while level:
        frequent = {p.items for p in level}
        candidates = set()
        for p in level:
            for q in level:
                if p.items[1:] == q.items[:-1]:
                    candidates.add(p.items + (q.items[-1],))
        next_level = []
        for cand in sorted(candidates):
            if any(sub not in frequent for sub in _subpatterns(cand, mode)):
                continue
            support = _support(db, cand, mode)
            if support >= min_support:
                next_level.append(Pattern(items=cand, support=support))
        result.extend(next_level)
        level = next_level
    result.sort(key=lambda p: (len(p.items), p.items))
    return result


def relative_min_support(db_size: int, fraction: float = 0.15) -> int:
    """Absolute count for a relative support threshold (at least 1)."""
    return max(1, math.ceil(fraction * db_size))


def maximal_patterns(patterns: list[Pattern], mode: str = "gapped") -> list[Pattern]:
    """Patterns not strictly contained in any other pattern of the set."""
    out = []
    for p in patterns:
        contained = any(
            q.items != p.items and contains_sequence(q.items, p.items, mode)
            for q in patterns)
        if not contained:
            out.append(p)
    out.sort(key=lambda p: (len(p.items), p.items))
    return out


@dataclass(frozen=True)
class Archetype:
    name: str
    items: tuple
    support: int


@dataclass(frozen=True)
class BranchPoint:
    archetype_index: int
    position: int
    targets: tuple  # ((cluster id, count), ...) sorted by count desc, id asc


@dataclass(frozen=True)
class PersonaReport:
    archetypes: tuple
    branches: tuple = ()
    requested_top_k: int = 4
    complete: bool = True

    def to_json_dict(self) -> dict:
        return {
            "archetypes": [{"name": a.name, "items": list(a.items), "support": a.support}
                           for a in self.archetypes],
            "branches": [{"archetype_index": b.archetype_index, "position": b.position,
                          "targets": [{"cluster": c, "count": n} for c, n in b.targets]}
                         for b in self.branches],
            "requested_top_k": self.requested_top_k,
            "complete": self.complete,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PersonaReport":
        return cls(
            archetypes=tuple(Archetype(name=a["name"], items=tuple(a["items"]),
                                       support=int(a["support"]))
                             for a in doc["archetypes"]),
            branches=tuple(BranchPoint(archetype_index=int(b["archetype_index"]),
                                       position=int(b["position"]),
                                       targets=tuple((int(t["cluster"]), int(t["count"]))
                                                     for t in b["targets"]))
                           for b in doc.get("branches", [])),
            requested_top_k=int(doc.get("requested_top_k", 4)),
            complete=bool(doc.get("complete", True)),
        )


def extract_archetypes(db: SequenceDb, min_support: int, top_k: int = 4,
                       mode: str = "gapped") -> PersonaReport:
    """Top-k maximal frequent patterns ranked by support, then length, then
    item order; flags the report incomplete when fewer exist."""
    patterns = gsp_mine(db, min_support, mode)
    maximal = maximal_patterns(patterns, mode)
    ranked = sorted(maximal, key=lambda p: (-p.support, -len(p.items), p.items))
    top = ranked[:top_k]
    archetypes = tuple(Archetype(name=f"archetype-{i + 1}", items=p.items, support=p.support)
                       for i, p in enumerate(top))
    return PersonaReport(archetypes=archetypes, requested_top_k=top_k,
                         complete=len(maximal) >= top_k)


def branch_annotation(db: SequenceDb, report: PersonaReport,
                      min_branch_freq: int) -> PersonaReport:
    """Count one-step deviations from each archetype.

    A sequence branches at position p when its first p+1 elements equal the
    archetype's and its next element differs from (or extends past) the
    archetype's next element.
    """
    if min_branch_freq < 1:
        raise ValueError(f"min_branch_freq must be >= 1, got {min_branch_freq}")
    branches = []
    for ai, arch in enumerate(report.archetypes):
        items = arch.items
        for p in range(len(items)):
            tally: dict[int, int] = {}
            for _sid, seq in db.sequences:
                if len(seq) <= p + 1 or tuple(seq[:p + 1]) != items[:p + 1]:
                    continue
                nxt = seq[p + 1]
                if p + 1 < len(items) and nxt == items[p + 1]:
                    continue
                tally[nxt] = tally.get(nxt, 0) + 1
            targets = tuple(sorted(((c, n) for c, n in tally.items() if n >= min_branch_freq),
                                   key=lambda cn: (-cn[1], cn[0])))
            if targets:
                branches.append(BranchPoint(archetype_index=ai, position=p, targets=targets))
    return replace(report, branches=tuple(branches))


def personas_table(report: PersonaReport) -> str:
    """Human-readable archetype and branch summary."""
    lines = [f"{'rank':<6}{'name':<16}{'support':<9}path"]
    for i, arch in enumerate(report.archetypes, start=1):
        path = ">".join(str(c) for c in arch.items)
        lines.append(f"{i:<6}{arch.name:<16}{arch.support:<9}{{{path}}}")
    if not report.archetypes:
        lines.append("(no archetypes found)")
    if report.branches:
        lines.append("")
        lines.append("branches (archetype @ position -> target x count):")
        for b in report.branches:
            arch = report.archetypes[b.archetype_index]
            at = arch.items[b.position]
            targets = ", ".join(f"{c} x{n}" for c, n in b.targets)
            lines.append(f"  {arch.name} @ {b.position} (cluster {at}) -> {targets}")
    return "\n".join(lines) + "\n"
