"""Three-annotator labeling workflow with majority-vote merging.

Votes are persisted to an append-only JSON-lines log.  Replaying the
log reconstructs the full store state, so the file doubles as an audit
trail of who voted what.  An item is decided once all three annotators
have voted and at least two agree; three-way splits queue up for manual
adjudication instead of being tie-broken automatically.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus, LabeledWord, Tag
from .errors import (
    DuplicateVote,
    NotInAdjudication,
    StoreFormatError,
    TooManyVotes,
    UnknownAnnotator,
    UnknownItem,
)

__all__ = [
    "NUM_ANNOTATORS",
    "NO_CONSENSUS",
    "AnnotationItem",
    "AnnotationRecord",
    "Decision",
    "AgreementReport",
    "AnnotationStore",
    "majority_vote",
]

NUM_ANNOTATORS = 3

#: Sentinel outcome for items where no tag reached two votes.
NO_CONSENSUS = "no-consensus"

STATUS_OPEN = "open"
STATUS_DECIDED = "decided"
STATUS_NEEDS_ADJUDICATION = "needs_adjudication"


@dataclass
class AnnotationItem:
    item_id: str
    word: str
    batch: int
    status: str = STATUS_OPEN


@dataclass(frozen=True)
class AnnotationRecord:
    item_id: str
    annotator_id: str
    tag: Tag
    timestamp: str


@dataclass(frozen=True)
class Decision:
    item_id: str
    outcome: Tag | str  # a Tag, or NO_CONSENSUS
    vote_counts: dict[Tag, int]
    adjudicator: str | None = None


@dataclass(frozen=True)
class AgreementReport:
    """Raw agreement statistics over the store.

    ``pairwise`` maps annotator pairs to the fraction of co-labeled
    items they tagged identically (``None`` when a pair shares no
    items).  Consensus fractions are over items with all three votes;
    both are 0.0 when no item is fully voted.
    """

    pairwise: dict[tuple[str, str], float | None]
    full_consensus: float
    no_consensus: float


def majority_vote(votes: Sequence[Tag]) -> Tag | str:
    """Resolve up to three votes to a tag or ``NO_CONSENSUS``.

    Returns the unique tag with at least two votes if one exists.  With
    fewer than three votes a tag is returned only if it already has two;
    otherwise the item is still pending and ``NO_CONSENSUS`` is
    returned.  Order of votes never matters.
    """
    if len(votes) > NUM_ANNOTATORS:
        raise TooManyVotes(f"got {len(votes)} votes, at most {NUM_ANNOTATORS} allowed")
    for tag in set(votes):
        if sum(1 for v in votes if v == tag) >= 2:
            return tag
    return NO_CONSENSUS


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class AnnotationStore:
    """Append-only annotation log with derived in-memory state.

    Line kinds are distinguished by their keys:

    * ``{"annotators": [...]}`` registers the annotator set (first line);
    * ``{"item_id", "word", "batch"}`` registers an item;
    * ``{"item_id", "word", "annotator", "tag", "ts"}`` records a vote;
    * adjudications carry ``"adjudicator"`` instead of ``"annotator"``.

    Writes are serialized by a lock, so concurrent annotators cannot
    lose updates; reads see the last committed state.
    """

    def __init__(self, path: str | Path, annotators: Sequence[str]):
        self.path = Path(path)
        self.annotators = list(annotators)
        self.items: dict[str, AnnotationItem] = {}
        self.order: list[str] = []
        self.records: dict[str, dict[str, AnnotationRecord]] = {}
        self.adjudications: dict[str, tuple[Tag, str]] = {}
        self._lock = threading.RLock()

    # -- construction --------------------------------------------------

    @classmethod
    def create(cls, path: str | Path, annotators: Sequence[str]) -> "AnnotationStore":
        """Start a fresh store file with a registered annotator set."""
        annotators = list(annotators)
        if len(annotators) != NUM_ANNOTATORS:
            raise StoreFormatError(
                f"exactly {NUM_ANNOTATORS} annotators must be registered, got {len(annotators)}"
            )
        if len(set(annotators)) != len(annotators):
            raise StoreFormatError("annotator ids must be distinct")
        store = cls(path, annotators)
        store.path.parent.mkdir(parents=True, exist_ok=True)
        store._append({"annotators": annotators})
        return store

    @classmethod
    def open(cls, path: str | Path) -> "AnnotationStore":
        """Replay an existing log file into a live store."""
        path = Path(path)
        if not path.exists():
            raise StoreFormatError(f"annotation store {path} does not exist")
        store = cls(path, [])
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise StoreFormatError(f"{path}:{line_no}: bad JSON ({exc})") from None
                store._replay(obj, line_no)
        if not store.annotators:
            raise StoreFormatError(f"{path}: no annotator registration line found")
        return store

    def _replay(self, obj: dict, line_no: int) -> None:
        if "annotators" in obj:
            self.annotators = list(obj["annotators"])
        elif "annotator" in obj:
            self._apply_vote(obj["item_id"], obj["annotator"], Tag.parse(obj["tag"]), obj.get("ts", ""))
        elif "adjudicator" in obj:
            self.adjudications[obj["item_id"]] = (Tag.parse(obj["tag"]), obj["adjudicator"])
            item = self.items.get(obj["item_id"])
            if item is not None:
                item.status = STATUS_DECIDED
        elif "item_id" in obj:
            item = AnnotationItem(obj["item_id"], obj["word"], int(obj.get("batch", 1)))
            self.items[item.item_id] = item
            self.order.append(item.item_id)
        else:
            raise StoreFormatError(f"{self.path}:{line_no}: unrecognized record {obj!r}")

    def _append(self, obj: dict) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")

    # -- item management ------------------------------------------------

    def add_items(self, words: Iterable[str], batch: int | None = None) -> list[AnnotationItem]:
        """Register words as open items.

        With ``batch=None`` the words are split in half, first half into
        batch 1 and second half into batch 2.
        """
        words = list(words)
        with self._lock:
            added = []
            half = (len(words) + 1) // 2
            for i, word in enumerate(words):
                b = batch if batch is not None else (1 if i < half else 2)
                if b not in (1, 2):
                    raise ValueError(f"batch must be 1 or 2, got {b}")
                item_id = f"itm-{len(self.order) + 1:06d}"
                item = AnnotationItem(item_id, word, b)
                self.items[item_id] = item
                self.order.append(item_id)
                self._append({"item_id": item_id, "word": word, "batch": b})
                added.append(item)
            return added

    def _require_item(self, item_id: str) -> AnnotationItem:
        try:
            return self.items[item_id]
        except KeyError:
            raise UnknownItem(f"unknown item {item_id!r}") from None

    def _require_annotator(self, annotator_id: str) -> None:
        if annotator_id not in self.annotators:
            raise UnknownAnnotator(
                f"unknown annotator {annotator_id!r} (registered: {', '.join(self.annotators)})"
            )

    # -- voting ----------------------------------------------------------

    def record_label(
        self, item_id: str, annotator_id: str, tag: Tag | str, overwrite: bool = False
    ) -> str:
        """Persist one vote and return the item's updated status.

        An annotator may vote once per item unless ``overwrite`` is set,
        in which case the latest vote wins (both stay in the log).
        """
        if isinstance(tag, str):
            tag = Tag.parse(tag)
        with self._lock:
            item = self._require_item(item_id)
            self._require_annotator(annotator_id)
            existing = self.records.get(item_id, {})
            if annotator_id in existing and not overwrite:
                raise DuplicateVote(
                    f"annotator {annotator_id!r} already voted on {item_id!r}"
                )
            ts = _utcnow()
            self._append(
                {"item_id": item_id, "word": item.word, "annotator": annotator_id,
                 "tag": str(tag), "ts": ts}
            )
            self._apply_vote(item_id, annotator_id, tag, ts)
            return self.items[item_id].status

    def _apply_vote(self, item_id: str, annotator_id: str, tag: Tag, ts: str) -> None:
        item = self._require_item(item_id)
        self._require_annotator(annotator_id)
        self.records.setdefault(item_id, {})[annotator_id] = AnnotationRecord(
            item_id, annotator_id, tag, ts
        )
        self._refresh_status(item)

    def _refresh_status(self, item: AnnotationItem) -> None:
        if item.item_id in self.adjudications:
            item.status = STATUS_DECIDED
            return
        votes = [r.tag for r in self.records.get(item.item_id, {}).values()]
        if len(votes) < NUM_ANNOTATORS:
            # Items stay pending until all three votes are in, even on
            # 2-of-2 agreement, so batch review sees complete triples.
            item.status = STATUS_OPEN
        elif majority_vote(votes) == NO_CONSENSUS:
            item.status = STATUS_NEEDS_ADJUDICATION
        else:
            item.status = STATUS_DECIDED

    # -- decisions ---------------------------------------------------------

    def votes(self, item_id: str) -> list[AnnotationRecord]:
        self._require_item(item_id)
        return list(self.records.get(item_id, {}).values())

    def decision(self, item_id: str) -> Decision:
        """Current decision state for an item (pending items included)."""
        self._require_item(item_id)
        votes = [r.tag for r in self.records.get(item_id, {}).values()]
        counts = {t: votes.count(t) for t in Tag if votes.count(t)}
        if item_id in self.adjudications:
            tag, who = self.adjudications[item_id]
            return Decision(item_id, tag, counts, adjudicator=who)
        return Decision(item_id, majority_vote(votes), counts)

    def adjudicate(self, item_id: str, tag: Tag | str, adjudicator_id: str) -> Decision:
        """Resolve a no-consensus item by hand; records provenance."""
        if isinstance(tag, str):
            tag = Tag.parse(tag)
        with self._lock:
            item = self._require_item(item_id)
            if item.status != STATUS_NEEDS_ADJUDICATION:
                raise NotInAdjudication(
                    f"item {item_id!r} has status {item.status!r}, not "
                    f"{STATUS_NEEDS_ADJUDICATION!r}"
                )
            ts = _utcnow()
            self._append(
                {"item_id": item_id, "word": item.word,
                 "adjudicator": adjudicator_id, "tag": str(tag), "ts": ts}
            )
            self.adjudications[item_id] = (tag, adjudicator_id)
            item.status = STATUS_DECIDED
            return self.decision(item_id)

    # -- queries -----------------------------------------------------------

    def next_batch(self, annotator_id: str, limit: int) -> list[AnnotationItem]:
        """Open items this annotator has not voted on, batch 1 first."""
        self._require_annotator(annotator_id)
        if limit <= 0:
            return []
        out: list[AnnotationItem] = []
        for b in (1, 2):
            for item_id in self.order:
                item = self.items[item_id]
                if item.batch != b or item.status != STATUS_OPEN:
                    continue
                if annotator_id in self.records.get(item_id, {}):
                    continue
                out.append(item)
                if len(out) >= limit:
                    return out
        return out

    def merge(self) -> tuple[Corpus, list[dict]]:
        """Merge decided items into a gold corpus.

        Returns the corpus plus the adjudication queue: one entry per
        needs-adjudication item, carrying the full vote detail.
        """
        labeled: list[LabeledWord] = []
        pending_adjudication: list[dict] = []
        for item_id in self.order:
            item = self.items[item_id]
            if item.status == STATUS_DECIDED:
                outcome = self.decision(item_id).outcome
                assert isinstance(outcome, Tag)
                labeled.append(LabeledWord(item.word, outcome))
            elif item.status == STATUS_NEEDS_ADJUDICATION:
                pending_adjudication.append(
                    {
                        "item_id": item_id,
                        "word": item.word,
                        "votes": [
                            {"annotator": r.annotator_id, "tag": str(r.tag)}
                            for r in self.votes(item_id)
                        ],
                    }
                )
        return Corpus(labeled, name="gold"), pending_adjudication

    def agreement(self) -> AgreementReport:
        """Pairwise raw agreement plus consensus fractions."""
        pairwise: dict[tuple[str, str], float | None] = {}
        for i, a in enumerate(self.annotators):
            for b in self.annotators[i + 1:]:
                shared = same = 0
                for item_id, recs in self.records.items():
                    if a in recs and b in recs:
                        shared += 1
                        same += recs[a].tag == recs[b].tag
                pairwise[(a, b)] = same / shared if shared else None
        full = sum(
            1 for recs in self.records.values()
            if len(recs) == NUM_ANNOTATORS
            and len({r.tag for r in recs.values()}) == 1
        )
        split = sum(
            1 for recs in self.records.values()
            if len(recs) == NUM_ANNOTATORS
            and len({r.tag for r in recs.values()}) == NUM_ANNOTATORS
        )
        voted = sum(1 for recs in self.records.values() if len(recs) == NUM_ANNOTATORS)
        return AgreementReport(
            pairwise=pairwise,
            full_consensus=full / voted if voted else 0.0,
            no_consensus=split / voted if voted else 0.0,
        )

    def progress(self) -> dict:
        """Counts by status plus the tag distribution of decided items."""
        by_status = {STATUS_OPEN: 0, STATUS_DECIDED: 0, STATUS_NEEDS_ADJUDICATION: 0}
        for item in self.items.values():
            by_status[item.status] += 1
        gold, _ = self.merge()
        dist = gold.stats()
        return {
            "total": len(self.items),
            "by_status": by_status,
            "decided_tags": {
                "counts": {str(t): c for t, c in dist.counts.items()},
                "fractions": {str(t): f for t, f in dist.fractions.items()},
            },
        }
