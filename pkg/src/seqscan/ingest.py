"""Per-source streaming detection over connection-attempt events.

Only the first attempt from a source to each distinct destination is an
observation; repeats are dropped.  Once a source is decided, its further
events are discarded and counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .config import Detector
from .errors import MalformedEventError
from .trwa import log_ratio


@dataclass(frozen=True)
class ConnectionEvent:
    timestamp: int
    src: str
    dst: str
    outcome: int


def parse_event(line: str) -> ConnectionEvent:
    """Parse one JSONL record; unknown fields are ignored."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedEventError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedEventError("event must be a JSON object")
    try:
        ts, src, dst, outcome = obj["timestamp"], obj["src"], obj["dst"], obj["outcome"]
    except KeyError as exc:
        raise MalformedEventError(f"missing field {exc.args[0]!r}") from None
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise MalformedEventError("timestamp must be an integer (epoch ms)")
    if not isinstance(src, str) or not src or not isinstance(dst, str) or not dst:
        raise MalformedEventError("src and dst must be non-empty strings")
    if outcome not in (0, 1) or isinstance(outcome, float):
        raise MalformedEventError(f"outcome must be 0 or 1, got {outcome!r}")
    return ConnectionEvent(ts, src, dst, int(outcome))


@dataclass
class SourceSession:
    src: str
    detector: object
    seen_destinations: set = field(default_factory=set)
    decision_emitted: bool = False
    last_ts: int = 0


def decision_record(src, decision, n, s, ts) -> dict:
    return {"src": src, "decision": decision, "n": n, "s": s, "ts": ts}


class SessionStore:
    """In-memory map of source -> session, with JSON snapshots for restarts."""

    def __init__(self, detector: Detector):
        self.detector = detector
        self.sessions: dict = {}
        self.duplicates = 0
        self.discarded = 0

    def session(self, src: str) -> SourceSession:
        sess = self.sessions.get(src)
        if sess is None:
            sess = self.sessions[src] = SourceSession(src, self.detector.initial())
        return sess

    def ingest(self, event: ConnectionEvent):
        """Apply one event; returns a decision record when the source just got decided."""
        sess = self.session(event.src)
        if sess.decision_emitted:
            self.discarded += 1
            return None
        if event.dst in sess.seen_destinations:
            self.duplicates += 1
            return None
        sess.seen_destinations.add(event.dst)
        sess.last_ts = event.timestamp
        state = self.detector.advance(sess.detector, event.outcome)
        sess.detector = state
        if state.decided:
            sess.decision_emitted = True
            return decision_record(event.src, state.decision, state.n, state.s, event.timestamp)
        return None

    def undecided_records(self):
        """Summary records for sources still undecided, in first-seen order."""
        for sess in self.sessions.values():
            if not sess.decision_emitted:
                st = sess.detector
                yield decision_record(sess.src, "undecided", st.n, st.s, sess.last_ts)

    def snapshot(self) -> dict:
        return {
            "kind": self.detector.kind,
            "duplicates": self.duplicates,
            "discarded": self.discarded,
            "sessions": [
                {
                    "src": s.src,
                    "seen": sorted(s.seen_destinations),
                    "n": s.detector.n,
                    "s": s.detector.s,
                    "decision": s.detector.decision,
                    "emitted": s.decision_emitted,
                    "last_ts": s.last_ts,
                }
                for s in self.sessions.values()
            ],
        }

    def restore(self, snap: dict) -> None:
        """Load a snapshot taken with a detector of the same kind.

        Detector state is rebuilt from the counts, which is exact for all
        three detector kinds since each is a function of ``(n, s)``.
        """
        if snap.get("kind") != self.detector.kind:
            raise ValueError(f"snapshot kind {snap.get('kind')!r} != {self.detector.kind!r}")
        self.duplicates = snap.get("duplicates", 0)
        self.discarded = snap.get("discarded", 0)
        self.sessions = {}
        for rec in snap["sessions"]:
            st = self.detector.initial()
            st.n, st.s, st.decision = rec["n"], rec["s"], rec["decision"]
            if hasattr(st, "llr"):
                st.llr = log_ratio(st.n, st.s, self.detector.spec)
            self.sessions[rec["src"]] = SourceSession(
                rec["src"], st, set(rec["seen"]), rec["emitted"], rec["last_ts"]
            )
