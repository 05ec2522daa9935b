"""The bank's classical side as a long-running, crash-safe service.

Each minted series is a record of (parameters, secret, verification history,
attempt counter) plus a freshness set shared between the money, one-time-pad
and voting flows: once a pair (I, R) has been submitted for verification or
consumed as a pad, it can never authorize anything again.

Durability comes from an append-only log with one record per request,
written (and optionally fsynced) before the response leaves the service.
Recovery replays the log through the same decision logic and refuses to
start if any replayed decision disagrees with what was logged, which is how
log corruption is detected.

Wire protocol (one request per line, whitespace-separated fields, binary
payloads hex-encoded lowercase):

    VERIFY <series> <I> <R_hex>   ->  OK | REJECT <reason> | ERROR <reason>
    DECODE <series> <I> <C_hex>   ->  OK <M_hex> | REJECT <reason> | ERROR <reason>
    VOTE   <series> <I> <C_hex>   ->  OK | REJECT <reason> | ERROR <reason>

Log file format, one record per line:

    <verb> <series> <I> <payload_hex> <decision>

where <decision> is OK, OK:<payload>, REJECT:<reason> or ERROR:<reason>, and
series registrations are recorded as `SERIES <series> <k> <S_hex> OK`.
"""

from __future__ import annotations

import os
import socket
import socketserver
import threading
from collections import Counter
from dataclasses import dataclass, field

from .scheme import SchemeParams, SecretString, TokenReport, VerificationHistory


class CorruptLogError(RuntimeError):
    """Raised when recovery cannot trust the log; carries the bad offset."""

    def __init__(self, message: str, line_number: int, byte_offset: int):
        super().__init__(f"{message} (line {line_number}, byte offset {byte_offset})")
        self.line_number = line_number
        self.byte_offset = byte_offset


@dataclass(frozen=True)
class Decision:
    status: str  # OK | REJECT | ERROR
    reason: str | None = None
    payload: int | None = None
    payload_width: int = 0

    def wire(self) -> str:
        if self.status == "OK":
            if self.payload is None:
                return "OK"
            return f"OK {self.payload:0{self.payload_width}x}"
        return f"{self.status} {self.reason}"

    def log_token(self) -> str:
        if self.status == "OK":
            if self.payload is None:
                return "OK"
            return f"OK:{self.payload:0{self.payload_width}x}"
        return f"{self.status}:{self.reason}"


@dataclass
class SeriesRecord:
    series_id: str
    params: SchemeParams
    secret: SecretString
    history: VerificationHistory = field(default_factory=VerificationHistory)
    pads_used: set[int] = field(default_factory=set)
    tally: Counter = field(default_factory=Counter)
    accepted: int = 0

    @property
    def attempts(self) -> int:
        return len(self.history)

    def pair_seen(self, wire: int) -> bool:
        return self.history.contains_wire(wire) or wire in self.pads_used


class BankService:
    """Linearized verification, pad decoding and vote tallying over series.

    All mutations run under one lock, so concurrent clients see a single
    serial order of decisions; with a log attached, every decision is
    persisted before it is returned.
    """

    def __init__(self, log_path: str | None = None, sync: bool = True):
        self._lock = threading.Lock()
        self._series: dict[str, SeriesRecord] = {}
        self._log_path = log_path
        self._sync = sync
        self._log = open(log_path, "a", encoding="ascii") if log_path else None

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def recover(cls, log_path: str, sync: bool = True) -> BankService:
        """Rebuild service state by replaying the log; verify every decision."""
        service = cls.__new__(cls)
        service._lock = threading.Lock()
        service._series = {}
        service._log_path = log_path
        service._sync = sync
        service._log = None
        offset = 0
        if os.path.exists(log_path):
            with open(log_path, "r", encoding="ascii") as fh:
                for line_no, raw in enumerate(fh, start=1):
                    service._replay(raw, line_no, offset)
                    offset += len(raw.encode("ascii"))
        service._log = open(log_path, "a", encoding="ascii")
        return service

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None

    def _append_log(self, verb: str, series_id: str, index, payload: str, decision: Decision):
        if self._log is None:
            return
        self._log.write(f"{verb} {series_id} {index} {payload} {decision.log_token()}\n")
        self._log.flush()
        if self._sync:
            os.fsync(self._log.fileno())

    # -- series management --------------------------------------------------

    def register_series(self, secret: SecretString, series_id: str | None = None) -> str:
        sid = series_id if series_id is not None else secret.series_id
        with self._lock:
            self._register(secret, sid)
            if self._log is not None:
                self._log.write(f"SERIES {sid} {secret.k} {secret.to_hex()} OK\n")
                self._log.flush()
                if self._sync:
                    os.fsync(self._log.fileno())
        return sid

    def _register(self, secret: SecretString, sid: str) -> None:
        if sid in self._series:
            raise ValueError(f"series {sid!r} already registered")
        params = SchemeParams.for_k(secret.k)
        self._series[sid] = SeriesRecord(sid, params, secret)

    def series_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._series)

    def series_k(self, series_id: str) -> int | None:
        rec = self._series.get(series_id)
        return rec.params.k if rec else None

    def snapshot(self, series_id: str) -> dict:
        """Point-in-time view of one series, for tests and inspection."""
        with self._lock:
            rec = self._series[series_id]
            return {
                "attempts": rec.attempts,
                "accepted": rec.accepted,
                "submitted": [r.wire() for r in rec.history.entries],
                "pads_used": sorted(rec.pads_used),
                "tally": dict(rec.tally),
            }

    def tally(self, series_id: str) -> dict[int, int]:
        with self._lock:
            return dict(self._series[series_id].tally)

    # -- decision cores (callers hold the lock) ------------------------------

    def _apply_verify(self, rec: SeriesRecord, rep: TokenReport) -> Decision:
        if rec.attempts >= rec.params.cap_test:
            return Decision("REJECT", "budget-exhausted")
        valid = rec.secret.block(rep.index) == rep.value
        fresh = not rec.pair_seen(rep.wire())
        rec.history.append(rep)
        if not valid:
            return Decision("REJECT", "bad-value")
        if not fresh:
            return Decision("REJECT", "double-spend")
        rec.accepted += 1
        return Decision("OK")

    def _apply_decode(self, rec: SeriesRecord, index: int, cipher: int, vote: bool) -> Decision:
        k = rec.params.k
        if not 1 <= index <= 1 << k:
            return Decision("ERROR", "bad-index")
        if not 0 <= cipher < 1 << k:
            return Decision("ERROR", "bad-payload")
        pad = rec.secret.block(index)
        wire = ((index - 1) << k) | pad
        if rec.pair_seen(wire):
            return Decision("REJECT", "double-vote" if vote else "reused-pad")
        rec.pads_used.add(wire)
        message = cipher ^ pad
        if vote:
            rec.tally[message] += 1
            return Decision("OK")
        return Decision("OK", payload=message, payload_width=k // 4)

    # -- handlers ------------------------------------------------------------

    def handle_verify(self, series_id: str, rep: TokenReport) -> Decision:
        with self._lock:
            rec = self._series.get(series_id)
            if rec is not None and rep.k != rec.params.k:
                raise ValueError("report and series have different k")
            if rec is None:
                decision = Decision("ERROR", "unknown-series")
            else:
                decision = self._apply_verify(rec, rep)
            payload = rep.to_hex() if rep.k % 2 == 0 else format(rep.value, "x")
            self._append_log("VERIFY", series_id, rep.index, payload, decision)
            return decision

    def handle_decode(self, series_id: str, index: int, cipher: int) -> Decision:
        with self._lock:
            rec = self._series.get(series_id)
            if rec is None:
                decision = Decision("ERROR", "unknown-series")
                width = 1
            else:
                decision = self._apply_decode(rec, index, cipher, vote=False)
                width = rec.params.k // 4
            self._append_log("DECODE", series_id, index, f"{cipher:0{width}x}", decision)
            return decision

    def handle_vote(self, series_id: str, index: int, cipher: int) -> Decision:
        with self._lock:
            rec = self._series.get(series_id)
            if rec is None:
                decision = Decision("ERROR", "unknown-series")
                width = 1
            else:
                decision = self._apply_decode(rec, index, cipher, vote=True)
                width = rec.params.k // 4
            self._append_log("VOTE", series_id, index, f"{cipher:0{width}x}", decision)
            return decision

    # -- wire protocol ---------------------------------------------------------

    def handle_line(self, line: str) -> str:
        parts = line.split()
        if len(parts) != 4:
            return "ERROR bad-request"
        verb, series_id, index_s, payload_hex = parts
        try:
            index = int(index_s)
            payload = int(payload_hex, 16)
        except ValueError:
            return "ERROR bad-request"
        if verb == "VERIFY":
            k = self.series_k(series_id)
            if k is None:
                return "ERROR unknown-series"
            try:
                rep = TokenReport(index, payload, k)
            except ValueError:
                return "REJECT bad-value"
            return self.handle_verify(series_id, rep).wire()
        if verb == "DECODE":
            return self.handle_decode(series_id, index, payload).wire()
        if verb == "VOTE":
            return self.handle_vote(series_id, index, payload).wire()
        return "ERROR bad-request"

    # -- recovery ---------------------------------------------------------------

    def _replay(self, raw: str, line_no: int, byte_offset: int) -> None:
        parts = raw.split()
        if len(parts) != 5:
            raise CorruptLogError("malformed log record", line_no, byte_offset)
        verb, series_id, index_s, payload, logged = parts
        try:
            if verb == "SERIES":
                secret = SecretString.from_hex(int(index_s), payload, series_id)
                self._register(secret, series_id)
                if logged != "OK":
                    raise ValueError("series record must end with OK")
                return
            index = int(index_s)
            rec = self._series.get(series_id)
            if verb == "VERIFY":
                if rec is None:
                    decision = Decision("ERROR", "unknown-series")
                else:
                    rep = TokenReport.from_hex(rec.params.k, payload)
                    if rep.index != index:
                        raise ValueError("index does not match serialized report")
                    decision = self._apply_verify(rec, rep)
            elif verb in ("DECODE", "VOTE"):
                if rec is None:
                    decision = Decision("ERROR", "unknown-series")
                else:
                    decision = self._apply_decode(
                        rec, index, int(payload, 16), vote=(verb == "VOTE")
                    )
            else:
                raise ValueError(f"unknown verb {verb!r}")
        except CorruptLogError:
            raise
        except Exception as exc:
            raise CorruptLogError(f"unreplayable record: {exc}", line_no, byte_offset)
        if decision.log_token() != logged:
            raise CorruptLogError(
                f"replayed decision {decision.log_token()} != logged {logged}",
                line_no,
                byte_offset,
            )


# -- socket front end ------------------------------------------------------------


class _LineHandler(socketserver.StreamRequestHandler):
    def handle(self):
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace")
            response = self.server.service.handle_line(line)
            self.wfile.write((response + "\n").encode("utf-8"))
            self.wfile.flush()


class _TcpServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class _UnixServer(socketserver.ThreadingUnixStreamServer):
    daemon_threads = True


def _parse_address(address: str):
    if ":" in address:
        host, port = address.rsplit(":", 1)
        return (host or "127.0.0.1", int(port)), False
    return address, True


class BankServer:
    """Serve a BankService over a local stream socket (TCP host:port or unix path)."""

    def __init__(self, service: BankService, address: str):
        addr, is_unix = _parse_address(address)
        if is_unix and os.path.exists(addr):
            os.unlink(addr)
        server_cls = _UnixServer if is_unix else _TcpServer
        self._server = server_cls(addr, _LineHandler)
        self._server.service = service
        self._is_unix = is_unix
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        if self._is_unix:
            return self._server.server_address
        host, port = self._server.server_address[:2]
        return f"{host}:{port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._is_unix and os.path.exists(self._server.server_address):
            os.unlink(self._server.server_address)
        if self._thread is not None:
            self._thread.join(timeout=5)


class BankClient:
    """Minimal line-protocol client for tests and the CLI."""

    def __init__(self, address: str):
        addr, is_unix = _parse_address(address)
        if is_unix:
            self._sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
            self._sock.connect(addr)
        else:
            self._sock = socket.create_connection(addr)
        self._file = self._sock.makefile("rw", encoding="utf-8", newline="\n")

    def request(self, line: str) -> str:
        self._file.write(line.rstrip("\n") + "\n")
        self._file.flush()
        response = self._file.readline()
        if not response:
            raise ConnectionError("server closed the connection")
        return response.rstrip("\n")

    def close(self) -> None:
        self._file.close()
        self._sock.close()
