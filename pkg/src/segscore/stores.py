"""Persistent stores: user profiles and page snapshots.

Profiles are small versioned JSON files mapping terms to weights in
[0, 1].  Snapshots keep one directory per URL (named by URL hash) with
one JSON file per capture, written atomically via a temp file rename,
so a crashed writer can never leave a half-written snapshot behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime
from hashlib import sha256
from pathlib import Path

from .errors import MalformedProfile, MissingFile, StorageFailure
from .segmenter import Segment
from .terms import tokenize

__all__ = [
    "Profile",
    "load_profile",
    "save_profile",
    "SnapshotSegment",
    "SnapshotRecord",
    "SnapshotStore",
    "match_prior_segment",
    "token_jaccard",
]


@dataclass(frozen=True)
class Profile:
    """A user's weighted interest terms.

    Terms must be single normalized tokens (what tokenize() would give
    back unchanged) and weights must lie in [0, 1].
    """

    owner_id: str = ""
    terms: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for term, weight in self.terms.items():
            if tokenize(term) != [term]:
                raise MalformedProfile(f"profile term {term!r} is not a single normalized token")
            if not isinstance(weight, (int, float)) or not 0.0 <= weight <= 1.0:
                raise MalformedProfile(f"weight for {term!r} must be in [0, 1], got {weight!r}")


def load_profile(path: str | Path) -> Profile:
    """Read a profile file.

    Accepts the versioned object form written by save_profile, a bare
    JSON list of {term, weight} entries, or an empty file (zero terms).
    """
    p = Path(path)
    try:
        raw = p.read_text("utf-8")
    except FileNotFoundError:
        raise MissingFile(f"profile file not found: {p}") from None
    except OSError as exc:
        raise MalformedProfile(f"cannot read profile file {p}: {exc}") from exc
    if not raw.strip():
        return Profile()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedProfile(f"{p}: not valid JSON: {exc}") from exc

    owner_id = ""
    if isinstance(data, list):
        items = data
    elif isinstance(data, dict):
        owner_id = str(data.get("owner_id", ""))
        items = data.get("terms", [])
        if not isinstance(items, list):
            raise MalformedProfile(f"{p}: 'terms' must be a list")
    else:
        raise MalformedProfile(f"{p}: profile must be a JSON object or list")

    terms: dict[str, float] = {}
    for item in items:
        if not isinstance(item, dict) or "term" not in item or "weight" not in item:
            raise MalformedProfile(f"{p}: each entry needs 'term' and 'weight', got {item!r}")
        term = item["term"]
        if term in terms:
            raise MalformedProfile(f"{p}: duplicate term {term!r}")
        terms[term] = item["weight"]
    return Profile(owner_id=owner_id, terms=terms)


def save_profile(profile: Profile, path: str | Path) -> None:
    """Write the versioned profile file; same profile always gives same bytes."""
    payload = {
        "v": 1,
        "owner_id": profile.owner_id,
        "terms": [
            {"term": term, "weight": weight}
            for term, weight in sorted(profile.terms.items())
        ],
    }
    try:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
    except OSError as exc:
        raise StorageFailure(f"cannot write profile file {path}: {exc}") from exc


# ── snapshots ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class SnapshotSegment:
    """What freshness needs from a past segment: fingerprint and tokens."""

    fingerprint: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class SnapshotRecord:
    url: str
    captured_at: datetime  # timezone-aware
    segments: tuple[SnapshotSegment, ...]

    def __post_init__(self) -> None:
        if self.captured_at.tzinfo is None:
            raise ValueError("captured_at must be timezone-aware")

    @classmethod
    def for_segments(cls, url: str, captured_at: datetime,
                     segments: list[Segment]) -> "SnapshotRecord":
        return cls(
            url=url,
            captured_at=captured_at,
            segments=tuple(
                SnapshotSegment(seg.fingerprint, tuple(seg.tokens)) for seg in segments
            ),
        )


class SnapshotStore:
    """Directory-per-URL snapshot storage with atomic writes."""

    def __init__(self, root: str | Path):
        self._root = Path(root)

    def _dir_for(self, url: str) -> Path:
        return self._root / sha256(url.encode("utf-8")).hexdigest()[:16]

    def put_snapshot(self, record: SnapshotRecord) -> Path:
        """Persist one capture; timestamps must strictly increase per URL."""
        latest = self.latest_snapshot(record.url)
        if latest is not None and record.captured_at <= latest.captured_at:
            raise StorageFailure(
                f"snapshot timestamps must increase: {record.captured_at.isoformat()} "
                f"is not after {latest.captured_at.isoformat()}"
            )
        payload = {
            "v": 1,
            "url": record.url,
            "captured_at": record.captured_at.isoformat(),
            "segments": [
                {"fingerprint": str(seg.fingerprint), "tokens": list(seg.tokens)}
                for seg in record.segments
            ],
        }
        directory = self._dir_for(record.url)
        final = directory / (record.captured_at.strftime("%Y%m%dT%H%M%S_%f") + ".json")
        try:
            directory.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=directory, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    json.dump(payload, handle, indent=2, sort_keys=True)
                os.replace(tmp_name, final)  # atomic on POSIX
            except BaseException:
                try:
                    os.unlink(tmp_name)
                except FileNotFoundError:
                    pass
                raise
        except OSError as exc:
            raise StorageFailure(f"cannot write snapshot for {record.url}: {exc}") from exc
        return final

    def latest_snapshot(self, url: str) -> SnapshotRecord | None:
        """Most recent capture of the URL, or None on first visit."""
        directory = self._dir_for(url)
        try:
            names = sorted(p.name for p in directory.glob("*.json"))
        except OSError as exc:
            raise StorageFailure(f"cannot list snapshots for {url}: {exc}") from exc
        if not names:
            return None
        latest_path = directory / names[-1]  # filenames sort by capture time
        try:
            data = json.loads(latest_path.read_text("utf-8"))
            return SnapshotRecord(
                url=data["url"],
                captured_at=datetime.fromisoformat(data["captured_at"]),
                segments=tuple(
                    SnapshotSegment(int(seg["fingerprint"]), tuple(seg["tokens"]))
                    for seg in data["segments"]
                ),
            )
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise StorageFailure(f"corrupt snapshot {latest_path}: {exc}") from exc


def token_jaccard(a: set[str], b: set[str]) -> float:
    """Jaccard similarity of two token sets; two empty sets count as equal."""
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def match_prior_segment(segment: Segment, snap: SnapshotRecord) -> SnapshotSegment | None:
    """Find the snapshot segment this segment descends from, if any.

    Exact fingerprint matches win; otherwise the positionally nearest
    prior segment with token Jaccard >= 0.5; None when nothing clears
    the threshold (the segment is new to the page).  Ties go to the
    earlier prior segment, keeping the choice deterministic.
    """
    best: tuple[tuple[int, int], SnapshotSegment] | None = None
    for index, prior in enumerate(snap.segments):
        if prior.fingerprint == segment.fingerprint:
            key = (abs(index - segment.id), index)
            if best is None or key < best[0]:
                best = (key, prior)
    if best is not None:
        return best[1]

    current = set(segment.tokens)
    for index, prior in enumerate(snap.segments):
        if token_jaccard(current, set(prior.tokens)) >= 0.5:
            key = (abs(index - segment.id), index)
            if best is None or key < best[0]:
                best = (key, prior)
    return best[1] if best else None
