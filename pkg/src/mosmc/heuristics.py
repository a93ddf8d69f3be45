"""Candidate-selection rules that discard seemingly suboptimal strategies.

A witness strategy excludes a candidate when the rule's inequality holds in
every dimension. All six rules are stated for maximised dimensions; minimised
dimensions are handled by negation. `simple` compares sample means only; the
other rules use the one-sided confidence-interval widths to require a safety
margin (candidate upper side and witness lower side, which for symmetric
intervals coincide with the printed half-widths).

Comparisons are exact floating point: the rules already encode slack through
the interval widths. Candidates whose mean vector exactly equals a witness's
are only excluded by a witness with a smaller id, so groups of equal-mean
strategies keep exactly one representative instead of eliminating each other.
"""

from __future__ import annotations

import enum

from .model import Direction


class Rule(enum.Enum):
    SIMPLE = "simple"
    FE = "fe"        # far enough
    FFE = "ffe"      # far from excluded
    FFW = "ffw"      # far from witness
    FFEO = "ffeo"    # far from each other
    CF = "cf"        # conservatively far

    @classmethod
    def from_string(cls, name: str) -> "Rule":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(
                f"unknown heuristic {name!r}; choose from "
                + ", ".join(r.value for r in cls)
            ) from None


def _normalized_dims(box, dirs):
    """Per-dimension (mean, lower, upper) in all-maximise orientation."""
    out = []
    for mean, lo, hi, d in zip(box.means, box.lowers, box.uppers, dirs):
        if d is Direction.MIN:
            out.append((-mean, -hi, -lo))
        else:
            out.append((mean, lo, hi))
    return out


def pair_excludes(rule: Rule, candidate_box, witness_box, dirs) -> bool:
    """True iff the witness excludes the candidate under `rule` in every dim
    (ignores the equal-mean tie-break; see `excludes`)."""
    if candidate_box.dimensions != witness_box.dimensions or len(dirs) != candidate_box.dimensions:
        raise ValueError("dimension mismatch between boxes and directions")
    for (mc, _lc, hc), (mw, lw, _hw) in zip(
        _normalized_dims(candidate_box, dirs), _normalized_dims(witness_box, dirs)
    ):
        up_c = hc - mc       # candidate's upper-side width
        low_w = mw - lw      # witness's lower-side width
        if rule is Rule.SIMPLE:
            ok = mc <= mw
        elif rule is Rule.FE:
            ok = mc <= mw - min(low_w, up_c)
        elif rule is Rule.FFE:
            ok = mc + up_c <= mw
        elif rule is Rule.FFW:
            ok = mc <= mw - low_w
        elif rule is Rule.FFEO:
            ok = mc <= mw - max(low_w, up_c)
        elif rule is Rule.CF:
            ok = mc + up_c <= mw - low_w
        else:  # pragma: no cover
            raise ValueError(rule)
        if not ok:
            return False
    return True


def excludes(rule: Rule, candidate_sigma: int, candidate_box, witness_sigma: int,
             witness_box, dirs) -> bool:
    """Rule check including the deterministic equal-mean tie-break."""
    if not pair_excludes(rule, candidate_box, witness_box, dirs):
        return False
    if candidate_box.means == witness_box.means:
        return witness_sigma < candidate_sigma
    return True


def select_candidates(rule: Rule, stats, dirs) -> list[int]:
    """Strategies not excluded by any witness in `stats` (witnesses range
    over all evaluated strategies, including ones that are themselves
    excluded). Output is sorted by id; independent of iteration order."""
    boxes = stats.boxes() if hasattr(stats, "boxes") else dict(stats)
    survivors = []
    for sigma, box in boxes.items():
        if not any(
            excludes(rule, sigma, box, other, obox, dirs)
            for other, obox in boxes.items()
            if other != sigma
        ):
            survivors.append(sigma)
    return sorted(survivors)
