"""Recording manifests and leakage-controlled train/test splits.

A manifest row describes one clip: who spoke it, in which session and
repetition block, over which microphone, which word, plus audio path and
transcript. Splits never cut through a policy's grouping unit, so
recordings that must stay together (e.g. all microphone copies of one
utterance) always land on the same side:

* ``strict``  groups by word: zero lexical overlap between sides.
* ``mixed``   groups by (speaker, session, block): a whole repetition block
  moves as one, so no microphone copy of a session block leaks across.
* ``natural`` groups by (speaker, session, block, word): individual
  per-word recording events move as one, giving more diverse combinations
  than ``mixed`` while still preventing microphone leakage.
"""

from __future__ import annotations

import csv
import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusForgeError
from .textnorm import normalize_word

logger = logging.getLogger(__name__)

POLICIES = ("strict", "mixed", "natural")

MANIFEST_COLUMNS = (
    "speaker_id",
    "session_id",
    "block_id",
    "microphone_id",
    "word",
    "repetition_index",
    "audio_path",
    "transcript",
)


class ManifestError(CorpusForgeError):
    """Malformed manifest input."""


class SplitError(CorpusForgeError):
    """Split cannot be produced (bad ratio, single group, ...)."""


@dataclass(frozen=True)
class RecordingEntry:
    speaker_id: str
    session_id: str
    block_id: str
    microphone_id: str
    word: str
    repetition_index: int
    audio_path: str
    transcript: str

    @property
    def key(self) -> tuple[str, str, str, str, str, int]:
        return (
            self.speaker_id,
            self.session_id,
            self.block_id,
            self.microphone_id,
            self.word,
            self.repetition_index,
        )

    @property
    def entry_id(self) -> str:
        return "|".join(str(part) for part in self.key)


@dataclass(frozen=True)
class RecordingManifest:
    """Validated recording entries in stable file order."""

    entries: tuple[RecordingEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _build_manifest(rows: list[tuple[int, dict]], source: str) -> RecordingManifest:
    entries: list[RecordingEntry] = []
    seen: dict[tuple, int] = {}
    for lineno, row in rows:
        missing = [
            c
            for c in MANIFEST_COLUMNS
            if row.get(c) is None or (row.get(c) == "" and c != "transcript")
        ]
        if missing:
            raise ManifestError(
                f"{source}: row {lineno}: missing field(s) {', '.join(missing)}"
            )
        try:
            rep = int(row["repetition_index"])
        except (TypeError, ValueError):
            raise ManifestError(
                f"{source}: row {lineno}: repetition_index must be an integer, "
                f"got {row['repetition_index']!r}"
            ) from None
        if rep < 0:
            raise ManifestError(f"{source}: row {lineno}: repetition_index < 0")
        entry = RecordingEntry(
            speaker_id=str(row["speaker_id"]),
            session_id=str(row["session_id"]),
            block_id=str(row["block_id"]),
            microphone_id=str(row["microphone_id"]),
            word=normalize_word(str(row["word"])),
            repetition_index=rep,
            audio_path=str(row["audio_path"]),
            transcript=str(row["transcript"]),
        )
        if entry.key in seen:
            raise ManifestError(
                f"{source}: duplicate recording key {entry.entry_id!r} "
                f"at rows {seen[entry.key]} and {lineno}"
            )
        seen[entry.key] = lineno
        entries.append(entry)
    if not entries:
        raise ManifestError(f"{source}: manifest is empty")
    return RecordingManifest(tuple(entries))


def load_manifest(path: str | Path) -> RecordingManifest:
    """Load a manifest from CSV (with header) or JSONL, by file extension.

    Unknown extra columns are ignored with a warning; missing required
    columns or duplicate recording keys are errors naming the rows.
    """
    path = Path(path)
    rows: list[tuple[int, dict]] = []
    if path.suffix.lower() in (".jsonl", ".json"):
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ManifestError(
                        f"{path}: row {lineno}: invalid JSON: {exc}"
                    ) from exc
                if not isinstance(record, dict):
                    raise ManifestError(
                        f"{path}: row {lineno}: expected a JSON object"
                    )
                extra = set(record) - set(MANIFEST_COLUMNS)
                if extra:
                    logger.warning(
                        "%s: row %d: ignoring unknown field(s) %s",
                        path, lineno, ", ".join(sorted(extra)),
                    )
                rows.append((lineno, record))
    else:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None:
                raise ManifestError(f"{path}: no header row")
            missing = [c for c in MANIFEST_COLUMNS if c not in reader.fieldnames]
            if missing:
                raise ManifestError(
                    f"{path}: missing column(s) {', '.join(missing)}"
                )
            extra = [c for c in reader.fieldnames if c not in MANIFEST_COLUMNS]
            if extra:
                logger.warning(
                    "%s: ignoring unknown column(s) %s", path, ", ".join(extra)
                )
            for lineno, record in enumerate(reader, start=2):
                rows.append((lineno, record))
    return _build_manifest(rows, str(path))


def group_key(entry: RecordingEntry, policy: str) -> tuple[str, ...]:
    if policy == "strict":
        return (entry.word,)
    if policy == "mixed":
        return (entry.speaker_id, entry.session_id, entry.block_id)
    if policy == "natural":
        return (entry.speaker_id, entry.session_id, entry.block_id, entry.word)
    raise SplitError(f"unknown policy {policy!r}, expected one of {POLICIES}")


@dataclass(frozen=True)
class SplitAssignment:
    """Per-entry train/test labels plus the group-level audit trail."""

    policy: str
    seed: int
    train_ratio: float
    labels: dict[str, str]  # entry_id -> "train" | "test"
    group_key_audit: dict[str, str]  # "|"-joined group key -> side


def split(
    manifest: RecordingManifest, policy: str, train_ratio: float, seed: int
) -> SplitAssignment:
    """Assign every entry to train or test without cutting any group.

    Groups (by the policy's key) are shuffled with a seeded permutation of
    their canonical key order, then assigned to train until the train entry
    count first reaches ``train_ratio * total``; the rest go to test. If
    that leaves test empty, the smallest train group moves over. The result
    depends only on (manifest content, policy, ratio, seed), not on row
    order.
    """
    if not 0 < train_ratio < 1:
        raise SplitError(f"train_ratio must be in (0, 1), got {train_ratio}")
    groups: dict[tuple[str, ...], list[str]] = {}
    for entry in manifest.entries:
        groups.setdefault(group_key(entry, policy), []).append(entry.entry_id)
    if len(groups) < 2:
        raise SplitError(
            f"policy {policy!r} yields a single group; cannot fill both sides"
        )
    keys = sorted(groups)
    random.Random(seed).shuffle(keys)

    total = len(manifest.entries)
    target = train_ratio * total
    train_keys: list[tuple[str, ...]] = []
    count = 0
    boundary = len(keys)
    for i, key in enumerate(keys):
        train_keys.append(key)
        count += len(groups[key])
        if count >= target:
            boundary = i + 1
            break
    test_keys = keys[boundary:]
    if not test_keys:
        smallest = min(train_keys, key=lambda k: (len(groups[k]), k))
        train_keys.remove(smallest)
        test_keys = [smallest]

    side_of = {key: "train" for key in train_keys}
    side_of.update({key: "test" for key in test_keys})
    labels = {
        entry.entry_id: side_of[group_key(entry, policy)]
        for entry in manifest.entries
    }
    audit = {"|".join(key): side_of[key] for key in sorted(side_of)}
    return SplitAssignment(
        policy=policy,
        seed=seed,
        train_ratio=train_ratio,
        labels=labels,
        group_key_audit=audit,
    )


@dataclass(frozen=True)
class LeakageAudit:
    """Recomputed leakage figures for a split; spanning groups must be 0."""

    policy: str
    total_entries: int
    train_entries: int
    test_entries: int
    realized_train_ratio: float
    spanning_group_keys: int
    vocabulary_overlap: int

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "total_entries": self.total_entries,
            "train_entries": self.train_entries,
            "test_entries": self.test_entries,
            "realized_train_ratio": self.realized_train_ratio,
            "spanning_group_keys": self.spanning_group_keys,
            "vocabulary_overlap": self.vocabulary_overlap,
        }


def audit_leakage(
    manifest: RecordingManifest, assignment: SplitAssignment
) -> LeakageAudit:
    """Recompute group sides from the labels and report leakage figures.

    Works from the labels alone (not the stored audit map), so a corrupted
    assignment shows up as spanning group keys.
    """
    sides_by_group: dict[tuple[str, ...], set[str]] = {}
    vocab: dict[str, set[str]] = {"train": set(), "test": set()}
    counts = {"train": 0, "test": 0}
    for entry in manifest.entries:
        side = assignment.labels.get(entry.entry_id)
        if side not in ("train", "test"):
            raise SplitError(f"entry {entry.entry_id!r} not covered by assignment")
        sides_by_group.setdefault(group_key(entry, assignment.policy), set()).add(side)
        vocab[side].add(entry.word)
        counts[side] += 1
    spanning = sum(1 for sides in sides_by_group.values() if len(sides) > 1)
    total = counts["train"] + counts["test"]
    return LeakageAudit(
        policy=assignment.policy,
        total_entries=total,
        train_entries=counts["train"],
        test_entries=counts["test"],
        realized_train_ratio=counts["train"] / total,
        spanning_group_keys=spanning,
        vocabulary_overlap=len(vocab["train"] & vocab["test"]),
    )


def write_assignment(assignment: SplitAssignment, path: str | Path) -> None:
    """Write the assignment as JSONL rows of {entry_id, side}."""
    with open(path, "w", encoding="utf-8") as f:
        for entry_id, side in assignment.labels.items():
            f.write(json.dumps({"entry_id": entry_id, "side": side}) + "\n")
