"""Strategy providers for the repeated open-source game.

A provider is asked once per meta-round for a program source, given the full
history of previous meta-rounds and the opponent's source from the previous
round (never the current one).  Static providers always submit the same
source, scripted providers follow a schedule, and external providers bridge
to a child process speaking newline-delimited JSON on its standard streams
(the socket where model-backed agents attach).

Wire protocol (one JSON object per line):

    -> {"type": "hello", "protocol": 1, "game": "ipd"}
    <- {"type": "ready"}
    -> {"type": "propose", "meta_round": k, "history": [...],
        "opponent_previous_source": "..." | null}
    <- {"type": "program", "source": "..."}          # optional "rationale" ignored
    -> {"type": "shutdown"}
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from dataclasses import dataclass, field

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT = 60.0


class ProviderError(Exception):
    pass


@dataclass
class ProposalContext:
    game: str
    meta_round: int  # 1-based
    history: list[dict]
    opponent_previous_source: str | None


@dataclass
class Provider:
    provider_id: str
    tag: str = ""
    kind: str = "static"

    def start(self, game: str) -> None:
        pass

    def propose(self, ctx: ProposalContext) -> str:
        raise NotImplementedError

    def close(self) -> None:
        pass

    def describe(self) -> dict:
        return {"id": self.provider_id, "tag": self.tag, "kind": self.kind}


@dataclass
class StaticProvider(Provider):
    source: str = ""
    kind: str = "static"

    def propose(self, ctx: ProposalContext) -> str:
        return self.source


@dataclass
class ScriptedProvider(Provider):
    """Submits the source of the last schedule entry whose round has begun.

    schedule: list of (from_round, source), from_round 1-based ascending.
    """

    schedule: list[tuple[int, str]] = field(default_factory=list)
    kind: str = "scripted"

    def propose(self, ctx: ProposalContext) -> str:
        chosen: str | None = None
        for from_round, source in self.schedule:
            if ctx.meta_round >= from_round:
                chosen = source
        if chosen is None:
            raise ProviderError(
                f"scripted provider {self.provider_id} has no entry for "
                f"meta-round {ctx.meta_round}"
            )
        return chosen


class _LineReader:
    """Blocking readline with a timeout, via a daemon thread."""

    def __init__(self, stream):
        self._queue: queue.Queue[str | None] = queue.Queue()
        self._thread = threading.Thread(target=self._pump, args=(stream,), daemon=True)
        self._thread.start()

    def _pump(self, stream):
        try:
            for line in stream:
                self._queue.put(line)
        finally:
            self._queue.put(None)

    def readline(self, timeout: float) -> str:
        try:
            line = self._queue.get(timeout=timeout)
        except queue.Empty:
            raise ProviderError(f"no reply within {timeout} seconds") from None
        if line is None:
            raise ProviderError("agent process closed its output")
        return line


@dataclass
class ExternalProvider(Provider):
    command: list[str] = field(default_factory=list)
    timeout: float = DEFAULT_TIMEOUT
    kind: str = "external"

    _process: subprocess.Popen | None = None
    _reader: _LineReader | None = None
    _transcript: list[str] = field(default_factory=list)

    @property
    def transcript(self) -> list[str]:
        return list(self._transcript)

    def start(self, game: str) -> None:
        if not self.command:
            raise ProviderError(f"external provider {self.provider_id} has no command")
        try:
            self._process = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ProviderError(
                f"cannot start agent {self.command!r}: {exc.strerror or exc}"
            ) from exc
        self._reader = _LineReader(self._process.stdout)
        reply = self._exchange(
            {"type": "hello", "protocol": PROTOCOL_VERSION, "game": game}
        )
        if reply.get("type") != "ready":
            raise ProviderError(
                f"agent handshake failed, expected ready, got {reply!r};"
                f" transcript: {self._transcript}"
            )

    def _exchange(self, message: dict) -> dict:
        assert self._process is not None and self._reader is not None
        line = json.dumps(message, sort_keys=True)
        self._transcript.append(f"-> {line}")
        try:
            self._process.stdin.write(line + "\n")
            self._process.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProviderError(f"agent pipe closed: {exc}") from exc
        raw = self._reader.readline(self.timeout)
        self._transcript.append(f"<- {raw.rstrip()}")
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"agent sent malformed JSON: {raw!r}") from exc

    def propose(self, ctx: ProposalContext) -> str:
        if self._process is None:
            raise ProviderError("provider not started")
        reply = self._exchange(
            {
                "type": "propose",
                "meta_round": ctx.meta_round,
                "history": ctx.history,
                "opponent_previous_source": ctx.opponent_previous_source,
            }
        )
        if reply.get("type") != "program" or not isinstance(reply.get("source"), str):
            raise ProviderError(f"agent sent an invalid program message: {reply!r}")
        return reply["source"]

    def close(self) -> None:
        proc = self._process
        if proc is None:
            return
        self._process = None
        try:
            if proc.stdin:
                proc.stdin.write(json.dumps({"type": "shutdown"}) + "\n")
                proc.stdin.flush()
        except (BrokenPipeError, OSError):
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()


def provider_from_spec(spec: dict, provider_id: str) -> Provider:
    """Build a provider from its JSON config entry."""
    kind = spec.get("kind", "static")
    tag = spec.get("tag", "")
    if kind == "static":
        return StaticProvider(provider_id, tag, source=_read_source(spec))
    if kind == "scripted":
        schedule = []
        for entry in spec.get("schedule", []):
            schedule.append((int(entry["from_round"]), _read_source(entry)))
        if not schedule:
            raise ProviderError("scripted provider needs a non-empty schedule")
        schedule.sort(key=lambda e: e[0])
        return ScriptedProvider(provider_id, tag, schedule=schedule)
    if kind == "external":
        command = spec.get("command")
        if not isinstance(command, list) or not command:
            raise ProviderError("external provider needs a command list")
        timeout = float(spec.get("timeout", DEFAULT_TIMEOUT))
        return ExternalProvider(provider_id, tag, command=command, timeout=timeout)
    raise ProviderError(f"unknown provider kind {kind!r}")


def _read_source(spec: dict) -> str:
    if "source" in spec:
        return spec["source"]
    if "path" in spec:
        from pathlib import Path

        return Path(spec["path"]).read_text(encoding="utf-8")
    raise ProviderError("provider entry needs 'source' or 'path'")
