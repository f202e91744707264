"""Tunable limits for the synthesis search."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass
class SearchConfig:
    timeout_ms: int = 100_000
    max_sketch_size: int = 7
    # enumeration caps; predicates are an AND of at most max_clauses clauses,
    # each an OR of at most max_prims_per_clause primitive tests
    max_prims_per_clause: int = 2
    max_clauses: int = 2
    max_join_pairs: int = 2
    max_projection_combos: int = 100_000
    projection_mode: str = "fast"  # "fast" or "baseline"

    def __post_init__(self) -> None:
        if self.projection_mode not in ("fast", "baseline"):
            raise ValueError(f"unknown projection mode {self.projection_mode!r}")

    def with_overrides(self, **kwargs) -> "SearchConfig":
        return replace(self, **kwargs)
