"""Email-log ingestion: parsing, address normalization and cleaning.

Two line-oriented carriers are supported. CSV with header
``timestamp,sender,recipients`` where ``recipients`` is a single
``;``-delimited field, and JSON lines with keys ``ts``, ``from`` and ``to``.
Timestamps are integer epoch seconds or RFC 3339 strings.

Malformed lines are counted, never fatal, unless more than half of the data
lines are bad, in which case the declared format is assumed to be wrong.
"""
from __future__ import annotations

import csv
import gzip
import io
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import parseaddr
from typing import IO, Iterable, Iterator, Sequence

from .errors import AddressError, FormatMismatchError

logger = logging.getLogger(__name__)

CSV_HEADER = ("timestamp", "sender", "recipients")
RECIPIENT_DELIMITER = ";"
FORMATS = ("csv", "jsonl")

DEFAULT_BOUNCE_LOCAL_PARTS = frozenset(
    {"mailer-daemon", "postmaster", "bounce", "no-reply", "noreply"}
)


@dataclass(frozen=True, order=True)
class Address:
    local: str
    domain: str

    def __post_init__(self) -> None:
        if not self.local or not self.domain:
            raise AddressError(f"{self.local}@{self.domain}", "empty local part or domain")
        if any(ch.isspace() for ch in self.local + self.domain):
            raise AddressError(f"{self.local}@{self.domain}", "contains whitespace")

    @property
    def bare(self) -> bool:
        """True when the domain has no dot (e.g. ``localhost``)."""
        return "." not in self.domain

    @property
    def tld(self) -> str:
        return self.domain.rsplit(".", 1)[-1]

    def in_domain(self, suffix: str) -> bool:
        suffix = suffix.lower().lstrip(".")
        return self.domain == suffix or self.domain.endswith("." + suffix)

    def __str__(self) -> str:
        return f"{self.local}@{self.domain}"


def normalize_address(raw: str) -> Address:
    """Parse ``raw`` into a lowercase :class:`Address`.

    Display names and angle brackets are dropped, so
    ``"Alice A. <Alice@Lab.GOV>"`` becomes ``alice@lab.gov``. Plus tags are
    kept as part of the local part.
    """
    if raw is None or not raw.strip():
        raise AddressError(raw or "", "empty input")
    text = raw.strip()
    if "<" in text:
        _, text = parseaddr(text)
        if not text:
            # parseaddr gives up on some exotic display names; fall back to the brackets
            inner = raw[raw.rfind("<") + 1:]
            text = inner.split(">", 1)[0]
    text = text.strip().strip("<>").strip().lower()
    if "@" not in text:
        raise AddressError(raw)
    local, _, domain = text.rpartition("@")
    if not local:
        raise AddressError(raw, "empty local part")
    if not domain:
        raise AddressError(raw, "empty domain")
    return Address(local, domain)


@dataclass(frozen=True)
class EmailRecord:
    """One logged message. Recipients are de-duplicated, first occurrence kept."""

    timestamp: int
    sender: Address
    recipients: tuple[Address, ...]

    def __post_init__(self) -> None:
        if self.timestamp < 0:
            raise ValueError(f"negative timestamp {self.timestamp}")
        if self.sender is None:
            raise ValueError("record has no sender")
        recips = tuple(dict.fromkeys(self.recipients))
        if not recips:
            raise ValueError("record has no recipients")
        object.__setattr__(self, "recipients", recips)


@dataclass
class ParsedLog:
    """Result of :func:`parse_email_log`."""

    records: list[EmailRecord]
    malformed: int = 0
    data_lines: int = 0
    malformed_lines: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EmailRecord]:
        return iter(self.records)


@dataclass(frozen=True)
class CleaningPolicy:
    bounce_local_parts: frozenset[str] = DEFAULT_BOUNCE_LOCAL_PARTS
    internal_domain_suffix: str | None = None
    # non-person senders (software support services etc.) are never dropped
    keep_non_person_domains: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "bounce_local_parts", frozenset(p.lower() for p in self.bounce_local_parts)
        )
        if self.internal_domain_suffix is not None and not self.internal_domain_suffix.strip():
            raise ValueError("internal_domain_suffix must be non-empty when given")


def parse_timestamp(value: str | int | float) -> int:
    """Epoch seconds from an int-like value or an RFC 3339 string (naive means UTC)."""
    if isinstance(value, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(value, int):
        ts = value
    elif isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"fractional epoch {value}")
        ts = int(value)
    else:
        text = str(value).strip()
        if text.lstrip("-").isdigit():
            ts = int(text)
        else:
            if text.endswith(("Z", "z")):
                text = text[:-1] + "+00:00"
            dt = datetime.fromisoformat(text)
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            ts = int(dt.timestamp())
    if ts < 0:
        raise ValueError(f"timestamp before epoch: {value}")
    return ts


def _text_lines(source) -> Iterator[str]:
    if isinstance(source, (bytes, bytearray)):
        yield from io.StringIO(bytes(source).decode("utf-8"))
        return
    if isinstance(source, (str, os.PathLike)):
        opener = gzip.open if os.fspath(source).endswith(".gz") else open
        with opener(source, "rt", encoding="utf-8", newline="") as fh:
            yield from fh
        return
    for line in source:
        yield line.decode("utf-8") if isinstance(line, (bytes, bytearray)) else line


def _record_from_fields(ts, sender, recipients: Iterable[str]) -> EmailRecord:
    recips = [normalize_address(r) for r in recipients if r and r.strip()]
    return EmailRecord(parse_timestamp(ts), normalize_address(sender), tuple(recips))


def _parse_csv_line(line: str) -> EmailRecord:
    rows = list(csv.reader([line]))
    if len(rows) != 1 or len(rows[0]) != 3:
        raise ValueError("expected 3 fields")
    ts, sender, recips = rows[0]
    return _record_from_fields(ts, sender, recips.split(RECIPIENT_DELIMITER))


def _parse_jsonl_line(line: str) -> EmailRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict) or not {"ts", "from", "to"} <= obj.keys():
        raise ValueError("missing ts/from/to")
    to = obj["to"]
    if isinstance(to, str) or not isinstance(to, list):
        raise ValueError("'to' must be an array")
    return _record_from_fields(obj["ts"], obj["from"], to)


def parse_email_log(source, fmt: str = "csv") -> ParsedLog:
    """Parse a CSV or JSON-lines email log.

    ``source`` may be a path, raw bytes, or an iterable of lines (text or
    bytes). Blank lines are skipped; the CSV header is optional.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown log format {fmt!r}; expected one of {FORMATS}")
    parse_line = _parse_csv_line if fmt == "csv" else _parse_jsonl_line
    out = ParsedLog(records=[])
    first_bad: tuple[int, str] | None = None
    seen_data = False
    try:
        for line_no, line in enumerate(_text_lines(source), start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if fmt == "csv" and not seen_data:
                seen_data = True
                if tuple(f.strip().lower() for f in stripped.split(",")) == CSV_HEADER:
                    continue
            out.data_lines += 1
            try:
                out.records.append(parse_line(stripped))
            except (ValueError, TypeError, KeyError, csv.Error):
                out.malformed += 1
                out.malformed_lines.append(line_no)
                if first_bad is None:
                    first_bad = (line_no, stripped)
    except UnicodeDecodeError as exc:
        raise FormatMismatchError(f"log is not UTF-8 text: {exc}") from exc
    if out.data_lines and out.malformed * 2 > out.data_lines:
        line_no, text = first_bad
        raise FormatMismatchError(
            f"{out.malformed}/{out.data_lines} lines malformed for format {fmt!r}; "
            f"first offending line {line_no}: {text[:200]!r}",
            line_no=line_no,
            line=text,
        )
    if out.malformed:
        logger.warning("%d malformed lines skipped (first at line %d)", out.malformed, first_bad[0])
    return out


def write_email_log(records: Iterable[EmailRecord], stream: IO[str], fmt: str = "csv") -> None:
    """Serialize records; timestamps are written as epoch seconds."""
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(
                [rec.timestamp, str(rec.sender), RECIPIENT_DELIMITER.join(map(str, rec.recipients))]
            )
    elif fmt == "jsonl":
        for rec in records:
            obj = {"ts": rec.timestamp, "from": str(rec.sender), "to": [str(r) for r in rec.recipients]}
            stream.write(json.dumps(obj, separators=(",", ":")) + "\n")
    else:
        raise ValueError(f"unknown log format {fmt!r}; expected one of {FORMATS}")


def clean_records(
    records: Sequence[EmailRecord], policy: CleaningPolicy | None = None
) -> list[EmailRecord]:
    """Drop automatically generated bounce traffic, keyed on the sender local part.

    Non-person senders such as support services stay in. If the policy names
    an internal suffix the result is additionally restricted to it.
    """
    policy = policy or CleaningPolicy()
    kept = [r for r in records if r.sender.local not in policy.bounce_local_parts]
    if policy.internal_domain_suffix:
        kept = restrict_to_domain(kept, policy.internal_domain_suffix)
    return kept


def restrict_to_domain(records: Sequence[EmailRecord], suffix: str) -> list[EmailRecord]:
    """Keep internal senders and internal recipients only.

    ``suffix`` matches the domain itself or any subdomain of it, so
    ``lab.gov`` matches ``t.lab.gov`` but not ``notlab.gov``.
    """
    if not suffix or not suffix.strip():
        raise ValueError("domain suffix must be non-empty")
    out = []
    for rec in records:
        if not rec.sender.in_domain(suffix):
            continue
        recips = tuple(r for r in rec.recipients if r.in_domain(suffix))
        if len(recips) == len(rec.recipients):
            out.append(rec)
        elif recips:
            out.append(EmailRecord(rec.timestamp, rec.sender, recips))
    return out
